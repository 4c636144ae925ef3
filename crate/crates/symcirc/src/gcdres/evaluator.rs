//! Streaming evaluation of decomposition-backed circuits at concrete
//! coefficient inputs.
//!
//! The composed circuits carry one extraction layer whose points scale every
//! block slot, and each slot value is affine in at most one auxiliary ring
//! variable `z`. Evaluating the layer literally would re-run every root
//! cone once per (layer point, z sample) pair. Instead: a root cone is a
//! polynomial of bounded degree in its block's slots, so its restriction to
//! the affine plane `u * c + v * e` is a bivariate polynomial of the same
//! degree — reconstruct it from a tensor grid of field evaluations once,
//! then answer every (point, sample) query by Horner evaluation. The layer's
//! weighted sum and the small top circuit run per query. The result is
//! exactly the layered circuit's value (the tests pin this against direct
//! evaluation); only the schedule differs.

use crate::circuit::{EvalScratch, Val};
use crate::error::{Error, Result};
use crate::field::FieldElem;
use crate::gadgets::InterpPlan;
use crate::polyring::{Ring, TruncMV, UniSeriesRing};
use crate::symdec::MultiSymPieces;

/// A slot value `c + z * e`.
#[derive(Clone, Copy, Debug)]
pub struct SlotAffine {
    pub c: FieldElem,
    pub e: FieldElem,
}

/// Per-root reconstructed restriction of the cone to the affine plane
/// `(u, v) -> cone(u*wc + v*we)`, held in the Newton basis of the `u` grid:
/// `Phi = C_0(v) + (u - u_0)(C_1(v) + (u - u_1)(...))` with
/// `deg C_i <= D - i` (total degree), so the triangular sample set suffices.
struct ConeOnPlane {
    /// Newton coefficients: `newton[i]` is the v-coefficient vector of `C_i`
    newton: Vec<Vec<FieldElem>>,
    /// the `u` grid points the Newton basis is anchored at
    u_points: Vec<FieldElem>,
    alpha: FieldElem,
}

impl ConeOnPlane {
    /// Partial evaluation at `u`, returning the `v`-coefficient vector.
    fn at_u(&self, ctx: &crate::field::FieldCtx, u: FieldElem) -> Vec<FieldElem> {
        let vdeg = self.newton.iter().map(Vec::len).max().unwrap_or(0);
        let mut acc = vec![ctx.zero(); vdeg];
        for i in (0..self.newton.len()).rev() {
            if i < self.newton.len() - 1 {
                let factor = ctx.sub(u, self.u_points[i]);
                for a in acc.iter_mut() {
                    *a = ctx.mul(*a, factor);
                }
            }
            for (j, &c) in self.newton[i].iter().enumerate() {
                acc[j] = ctx.add(acc[j], c);
            }
        }
        acc
    }
}

fn horner(ctx: &crate::field::FieldCtx, coeffs: &[FieldElem], x: FieldElem) -> FieldElem {
    let mut acc = ctx.zero();
    for &c in coeffs.iter().rev() {
        acc = ctx.add(ctx.mul(acc, x), c);
    }
    acc
}

/// Evaluates all outputs of the composed construction at the given slot
/// values, treating the optional passthrough input `y_name` as a symbolic
/// variable. Returns per-output polynomials in the variables `(y, z)` with
/// `z`-degree at most `z_bound` (exactly the layered circuit's value, which
/// is guaranteed to have that degree).
pub(crate) fn stream_eval(
    pieces: &MultiSymPieces,
    slots: &[SlotAffine],
    y_name: Option<&str>,
    z_bound: usize,
) -> Result<Vec<TruncMV>> {
    let composed = &pieces.composed;
    let ctx = composed.ctx().clone();
    assert_eq!(
        composed.layers.len(),
        1,
        "stream evaluation expects exactly one extraction layer"
    );
    let layer = &composed.layers[0];

    // slot values in the layer's translated coordinates
    let total_slots: usize = pieces.blocks.iter().map(|b| b.size).sum();
    assert_eq!(slots.len(), total_slots, "one affine value per block slot");
    let offsets = layer
        .offsets
        .as_ref()
        .expect("decomposition layers carry the coordinate translation");

    let z_free = slots.iter().all(|s| ctx.is_zero(s.e));
    let n_samples = if z_free { 1 } else { z_bound + 1 };
    let zetas: Vec<FieldElem> = (0..n_samples as u64).map(|i| ctx.element(i)).collect();

    // reconstruct each root cone on its block's affine plane
    let mut slot_base = 0usize;
    let mut cone_planes: Vec<Vec<ConeOnPlane>> = Vec::with_capacity(pieces.blocks.len());
    for blk in &pieces.blocks {
        let n = blk.size;
        // translated affine values for this block's slots
        let mut wc = Vec::with_capacity(n);
        let mut we = Vec::with_capacity(n);
        for (r, s) in slots[slot_base..slot_base + n].iter().enumerate() {
            // the composed circuit's input index for this slot
            let idx = composed
                .input_index(&blk.slot_names[r])
                .expect("slot input present");
            wc.push(ctx.sub(s.c, offsets[idx]));
            we.push(s.e);
        }
        let block_z_free = we.iter().all(|&e| ctx.is_zero(e));
        let mut planes = Vec::with_capacity(n);
        let mut scratch = EvalScratch::default();
        let mut outbuf: Vec<FieldElem> = Vec::new();
        let mut assign: Vec<FieldElem> = vec![ctx.zero(); n];
        for (i, raw) in blk.roots_raw.iter().enumerate() {
            let deg = raw.syntactic_degree(&crate::circuit::InputSel::group("zs"));
            let plan = InterpPlan::for_degree(&ctx, deg)?;
            let pts = plan.points();
            let coeffs = if block_z_free {
                // 1-D restriction u -> cone(u * wc): Newton coefficients by
                // divided differences
                let mut vals: Vec<FieldElem> = pts
                    .iter()
                    .map(|&u| {
                        for (a, &c) in assign.iter_mut().zip(&wc) {
                            *a = ctx.mul(u, c);
                        }
                        raw.eval_field_fast(&assign, &mut scratch, &mut outbuf)?;
                        Ok(outbuf[0])
                    })
                    .collect::<Result<_>>()?;
                for step in 1..vals.len() {
                    for a in (step..vals.len()).rev() {
                        let denom = ctx
                            .inv(ctx.sub(pts[a], pts[a - step]))
                            .expect("distinct points");
                        vals[a] = ctx.mul(ctx.sub(vals[a], vals[a - 1]), denom);
                    }
                }
                vals.into_iter().map(|c| vec![c]).collect()
            } else {
                // triangular grid (a + b <= D): the restriction has total
                // degree <= D, so the Newton-basis columns need fewer and
                // fewer v samples
                let dmax = pts.len() - 1;
                let mut grid: Vec<Vec<FieldElem>> = Vec::with_capacity(pts.len());
                for (a, &u) in pts.iter().enumerate() {
                    let mut row = Vec::with_capacity(dmax + 1 - a);
                    let uwc: Vec<FieldElem> = wc.iter().map(|&c| ctx.mul(u, c)).collect();
                    for &v in &pts[..=dmax - a] {
                        for (sl, (&b0, &e)) in assign.iter_mut().zip(uwc.iter().zip(&we)) {
                            *sl = ctx.add(b0, ctx.mul(v, e));
                        }
                        raw.eval_field_fast(&assign, &mut scratch, &mut outbuf)?;
                        row.push(outbuf[0]);
                    }
                    grid.push(row);
                }
                // divided differences along u: after step i, grid[a][b] holds
                // the order-a difference over u_0..u_a at v_b (b <= D - a)
                for step in 1..=dmax {
                    for a in (step..=dmax).rev() {
                        let denom = ctx
                            .inv(ctx.sub(pts[a], pts[a - step]))
                            .expect("distinct points");
                        let keep = grid[a].len();
                        for b in 0..keep.min(grid[a - 1].len()) {
                            let hi = grid[a][b];
                            let lo = grid[a - 1][b];
                            grid[a][b] = ctx.mul(ctx.sub(hi, lo), denom);
                        }
                    }
                }
                // Newton column i: interpolate C_i from its D - i + 1 values
                let mut newton = Vec::with_capacity(dmax + 1);
                for (i2, row) in grid.iter().enumerate() {
                    let sub = InterpPlan::for_degree(&ctx, dmax - i2)?;
                    newton.push(sub.coefficients_from_values(&row[..=dmax - i2]));
                }
                newton
            };
            planes.push(ConeOnPlane {
                newton: coeffs,
                u_points: pts.to_vec(),
                alpha: blk.alphas[i],
            });
        }
        cone_planes.push(planes);
        slot_base += n;
    }

    // assignment template for the top circuit
    let yring = UniSeriesRing::new(ctx.clone(), None);
    let top = &pieces.top;
    let n_out = top.num_outputs();
    let mut acc: Vec<Vec<Vec<FieldElem>>> = vec![vec![Vec::new(); n_samples]; n_out];

    // index map: top input -> (block, root) or y
    enum TopIn {
        Root(usize, usize),
        Y,
    }
    let top_map: Vec<TopIn> = top
        .inputs()
        .iter()
        .map(|decl| {
            if Some(decl.name.as_str()) == y_name {
                return Ok(TopIn::Y);
            }
            for (b, blk) in pieces.blocks.iter().enumerate() {
                for i in 0..blk.size {
                    if decl.name == crate::symdec::sigma_slot(b, i) {
                        return Ok(TopIn::Root(b, i));
                    }
                }
            }
            Err(Error::MissingInput(decl.name.clone()))
        })
        .collect::<Result<_>>()?;

    for &(point, weight) in &layer.pairs {
        // partial-evaluate every cone at u = point
        let at_u: Vec<Vec<Vec<FieldElem>>> = cone_planes
            .iter()
            .map(|planes| planes.iter().map(|p| p.at_u(&ctx, point)).collect())
            .collect();
        for (s, &zeta) in zetas.iter().enumerate() {
            let v = ctx.mul(point, zeta);
            let assign: Vec<Val<UniSeriesRing>> = top_map
                .iter()
                .map(|ti| match ti {
                    TopIn::Y => Val::R(yring.var()),
                    TopIn::Root(b, i) => {
                        let val = horner(&ctx, &at_u[*b][*i], v);
                        Val::F(ctx.add(cone_planes[*b][*i].alpha, val))
                    }
                })
                .collect();
            let outs = top.eval(&yring, &assign)?;
            for (o, out) in outs.into_iter().enumerate() {
                let weighted = yring.scale(&out, weight);
                let cur = std::mem::take(&mut acc[o][s]);
                acc[o][s] = yring.add(&cur, &weighted);
            }
        }
    }

    // interpolate back over z and package as polynomials in (y, z)
    let zplan = if z_free {
        None
    } else {
        Some(InterpPlan::for_degree(&ctx, z_bound)?)
    };
    let mut results = Vec::with_capacity(n_out);
    for per_sample in acc {
        let mut out = TruncMV::zero(&ctx, 2, TruncMV::NO_CAP);
        if let Some(plan) = &zplan {
            let max_y = per_sample.iter().map(Vec::len).max().unwrap_or(0);
            for ypow in 0..max_y {
                let samples: Vec<FieldElem> = per_sample
                    .iter()
                    .map(|p| p.get(ypow).copied().unwrap_or_else(|| ctx.zero()))
                    .collect();
                let zc = plan.coefficients_from_values(&samples);
                for (zpow, c) in zc.into_iter().enumerate() {
                    out.add_term(vec![ypow as u16, zpow as u16], c);
                }
            }
        } else {
            for (ypow, &c) in per_sample[0].iter().enumerate() {
                out.add_term(vec![ypow as u16, 0], c);
            }
        }
        // the layer's constant shift applies to every output
        out.add_term(vec![0, 0], composed.layers[0].plus_const);
        results.push(out);
    }
    Ok(results)
}
