//! Decomposition of (multi-)symmetric circuits through elementary symmetric
//! polynomials: given a circuit for `P` symmetric within each block of a
//! variable partition, produce a circuit for the unique `Q` with
//! `P = Q(Esym-blocks)`.
//!
//! Construction per block of size `n`: a generic monic polynomial
//! `F(z, y) = y^n - (z_1 + b_1) y^{n-1} + ... + (-1)^n (z_n + b_n)` whose
//! fiber at `z = 0` splits into distinct planted points; its power-series
//! roots are produced by the multiplicity-one root circuits, substituted
//! into `P`, and one shared extraction recovers the degree-`<= d` part,
//! which equals `Q` after translating the inputs back by the fiber's
//! symmetric values.

use std::collections::HashMap;

use crate::circuit::{Builder, Circuit, HomLayer, InputDecl, InputSel};
use crate::error::{Error, Result};
use crate::field::{FieldCtx, FieldElem};
use crate::gadgets::InterpPlan;
use crate::polyring::{esym_eval, FieldRing};
use crate::roots::{root_power_sum_raw, RootSpec};

/// An ordered partition of a circuit's inputs into symmetry blocks; inputs
/// not named in any block pass through untouched.
#[derive(Clone, Debug)]
pub struct Partition {
    pub blocks: Vec<Vec<String>>,
}

impl Partition {
    pub fn single(names: Vec<String>) -> Partition {
        Partition {
            blocks: vec![names],
        }
    }
}

/// The generic monic polynomial for one block: the circuit for `F(z, y)`,
/// the planted fiber points, and their elementary symmetric values.
pub struct GenericEsymPoly {
    pub circuit: Circuit,
    pub alphas: Vec<FieldElem>,
    pub betas: Vec<FieldElem>,
    pub slot_names: Vec<String>,
}

/// Builds `F(z, y) = y^n + sum_i (-1)^i (z_i + b_i) y^{n-i}` with
/// `b_i = Esym_i(a_1..a_n)` over distinct points `a_i`, so the fiber
/// `F(0, y) = prod (y - a_i)` is square-free by construction.
pub fn generic_esym_poly(ctx: &FieldCtx, n: usize, block_tag: &str) -> Result<GenericEsymPoly> {
    let alphas = ctx.distinct_points(n)?;
    let ring = FieldRing(ctx.clone());
    let betas: Vec<FieldElem> = (1..=n)
        .map(|i| esym_eval(&ring, &alphas, i).expect("i <= n"))
        .collect();
    let slot_names: Vec<String> = (1..=n).map(|r| format!("{block_tag}_z{r}")).collect();
    let mut b = Builder::new(ctx);
    let slots: Vec<u32> = slot_names.iter().map(|s| b.input(s, Some("zs"))).collect();
    let y = b.input("y", None);
    let mut terms = vec![b.mul(vec![y; n])];
    for (i, (&slot, &beta)) in slots.iter().zip(&betas).enumerate() {
        let deg = i + 1;
        let bconst = b.constant(beta);
        let shifted = b.add(vec![slot, bconst]);
        let sign = if deg % 2 == 0 { 1 } else { -1 };
        let sgn = b.int(sign);
        let mut args = vec![sgn, shifted];
        args.extend(std::iter::repeat(y).take(n - deg));
        terms.push(b.mul(args));
    }
    let f = b.add(terms);
    Ok(GenericEsymPoly {
        circuit: b.finish(vec![f]),
        alphas,
        betas,
        slot_names,
    })
}

/// Per-block construction data shared with the resultant/GCD pipeline.
pub(crate) struct BlockPieces {
    pub size: usize,
    pub slot_names: Vec<String>,
    pub alphas: Vec<FieldElem>,
    pub betas: Vec<FieldElem>,
    /// per root: the raw (un-truncated) extraction sum over the block slots;
    /// the root value is `alphas[i] +` this
    pub roots_raw: Vec<Circuit>,
}

/// Everything the decomposition produces: the composed layered circuit over
/// shifted coordinates, plus the pieces the specialized evaluators stream.
pub(crate) struct MultiSymPieces {
    pub blocks: Vec<BlockPieces>,
    /// `P` renamed to root-slot inputs `sigma{b}_{i}` (+ passthrough)
    pub top: Circuit,
    /// core = top with roots substituted, one extraction layer over all block
    /// slots; computes `Q` directly on the coordinate inputs (the layer
    /// translates by the fiber's symmetric values before scaling)
    pub composed: Circuit,
    pub required_q: u64,
}

pub(crate) fn sigma_slot(block: usize, i: usize) -> String {
    format!("sigma{block}_{i}")
}

/// Core builder: `top` is a circuit over root-slot inputs `sigma{b}_{i}`
/// (`i < block_sizes[b]`) plus passthrough inputs; `d` bounds the degree of
/// the decomposition `Q`.
pub(crate) fn build_multisym(
    ctx: &FieldCtx,
    top: &Circuit,
    block_sizes: &[usize],
    d: usize,
) -> Result<MultiSymPieces> {
    let top = top.materialize();
    // field-size demand, computed bottom-up before any heavy work
    let m_sum = 2 * (d + 1);
    let top_sigma_deg = top.syntactic_degree(&InputSel::group("sigma"));
    let nmax = block_sizes.iter().copied().max().unwrap_or(1);
    let per_block_points = nmax * (m_sum + 1) + 1;
    let outer_points_bound = top_sigma_deg * (m_sum + 1) + 1;
    let required_q = [nmax as u64, per_block_points as u64, outer_points_bound as u64]
        .into_iter()
        .max()
        .unwrap();
    if ctx.cardinality() < required_q {
        return Err(Error::FieldTooSmall {
            needed: required_q,
            have: ctx.cardinality(),
        });
    }

    let mut blocks = Vec::with_capacity(block_sizes.len());
    for (b, &n) in block_sizes.iter().enumerate() {
        let gen = generic_esym_poly(ctx, n, &format!("b{b}"))?;
        let mut roots_raw = Vec::with_capacity(n);
        for i in 0..n {
            let spec = RootSpec::simple(
                gen.circuit.clone(),
                "y",
                InputSel::group("zs"),
                gen.alphas[i],
                d,
            );
            roots_raw.push(root_power_sum_raw(&spec)?);
        }
        blocks.push(BlockPieces {
            size: n,
            slot_names: gen.slot_names,
            alphas: gen.alphas,
            betas: gen.betas,
            roots_raw,
        });
    }

    // compose: declare slots first, then passthrough in top order
    let mut bldr = Builder::new(ctx);
    for blk in &blocks {
        for s in &blk.slot_names {
            bldr.input(s, Some("zs"));
        }
    }
    let mut root_nodes: HashMap<String, u32> = HashMap::new();
    for (b, blk) in blocks.iter().enumerate() {
        for i in 0..blk.size {
            let raw = &blk.roots_raw[i];
            let imap: Vec<u32> = raw
                .inputs()
                .iter()
                .map(|decl| bldr.input(&decl.name, decl.group.as_deref()))
                .collect();
            let raw_out = bldr.instantiate(raw, &imap)[0];
            let a = bldr.constant(blk.alphas[i]);
            root_nodes.insert(sigma_slot(b, i), bldr.add(vec![a, raw_out]));
        }
    }
    let imap: Vec<u32> = top
        .inputs()
        .iter()
        .map(|decl| match root_nodes.get(&decl.name) {
            Some(&id) => id,
            None => bldr.input(&decl.name, decl.group.as_deref()),
        })
        .collect();
    let outs = bldr.instantiate(&top, &imap);
    let core = bldr.finish(outs);

    let bound = core.syntactic_degree(&InputSel::group("zs"));
    let plan = InterpPlan::for_degree(ctx, bound)?;
    // the layer translates each slot by its block's symmetric value before
    // scaling, so the circuit reads natural coordinates while the extraction
    // happens around the split fiber
    let mut offsets = vec![ctx.zero(); core.inputs().len()];
    for blk in &blocks {
        for (r, slot) in blk.slot_names.iter().enumerate() {
            if let Some(i) = core.input_index(slot) {
                offsets[i] = blk.betas[r];
            }
        }
    }
    let layer = HomLayer {
        scaled: InputSel::group("zs").mask(core.inputs()),
        pairs: plan.hom_le_pairs(d),
        cap: Some(d),
        plus_const: ctx.zero(),
        offsets: Some(offsets),
    };
    let composed = core.with_layer(layer);
    Ok(MultiSymPieces {
        blocks,
        top,
        composed,
        required_q: required_q.max(bound as u64 + 1),
    })
}

/// Randomized symmetry precheck: transposition evaluations at random points,
/// per block pair.
fn check_symmetry(p: &Circuit, blocks: &[Vec<usize>], rng: &mut impl rand::Rng) -> Result<()> {
    let ctx = p.ctx().clone();
    let n_in = p.inputs().len();
    for (btag, idxs) in blocks.iter().enumerate() {
        for a in 0..idxs.len() {
            for b in a + 1..idxs.len() {
                for _ in 0..20 {
                    let mut pt: Vec<FieldElem> = (0..n_in).map(|_| ctx.rand(rng)).collect();
                    let v1 = p.eval_field(&pt)?[0];
                    pt.swap(idxs[a], idxs[b]);
                    let v2 = p.eval_field(&pt)?[0];
                    if v1 != v2 {
                        return Err(Error::NotSymmetric(format!(" in block {btag}")));
                    }
                }
            }
        }
    }
    Ok(())
}

/// The output of the decomposition: the circuit for `Q` plus the pieces the
/// recomposition tests want.
pub struct Decomposition {
    /// circuit over inputs `z{b}_{r}` (group "zs") plus passthrough
    pub circuit: Circuit,
    pub betas: Vec<Vec<FieldElem>>,
    pub required_q: u64,
}

/// Multi-symmetric decomposition: `P` must be symmetric within each block of
/// the partition; `d` bounds the degree of `Q`. Inputs of `P` outside the
/// partition pass through.
pub fn multi_symmetric_decomposition_circuit(
    p: &Circuit,
    part: &Partition,
    d: usize,
    rng: &mut impl rand::Rng,
) -> Result<Decomposition> {
    let ctx = p.ctx().clone();
    let block_idxs: Vec<Vec<usize>> = part
        .blocks
        .iter()
        .map(|names| {
            names
                .iter()
                .map(|n| {
                    p.input_index(n)
                        .ok_or_else(|| Error::MissingInput(n.clone()))
                })
                .collect::<Result<Vec<usize>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    check_symmetry(p, &block_idxs, rng)?;

    // rename block inputs to the root-slot convention
    let mut rename: HashMap<String, InputDecl> = HashMap::new();
    for (b, names) in part.blocks.iter().enumerate() {
        for (i, n) in names.iter().enumerate() {
            rename.insert(
                n.clone(),
                InputDecl {
                    name: sigma_slot(b, i),
                    group: Some("sigma".into()),
                },
            );
        }
    }
    let top = p.rename_inputs(&rename);
    let sizes: Vec<usize> = part.blocks.iter().map(Vec::len).collect();
    let pieces = build_multisym(&ctx, &top, &sizes, d)?;

    // the slots already read natural coordinates (the layer translates);
    // rename them to the public convention
    let mut rename: HashMap<String, InputDecl> = HashMap::new();
    for (b, blk) in pieces.blocks.iter().enumerate() {
        for (r, slot) in blk.slot_names.iter().enumerate() {
            rename.insert(
                slot.clone(),
                InputDecl {
                    name: format!("z{}_{}", b + 1, r + 1),
                    group: Some("zs".into()),
                },
            );
        }
    }
    let circuit = pieces.composed.rename_inputs(&rename);
    Ok(Decomposition {
        circuit,
        betas: pieces.blocks.iter().map(|b| b.betas.clone()).collect(),
        required_q: pieces.required_q,
    })
}

/// Single-block decomposition: `P` symmetric in all of its inputs; the
/// result takes inputs `z1_1 .. z1_n`.
pub fn symmetric_decomposition_circuit(
    p: &Circuit,
    d: usize,
    rng: &mut impl rand::Rng,
) -> Result<Decomposition> {
    let names: Vec<String> = p.inputs().iter().map(|d| d.name.clone()).collect();
    multi_symmetric_decomposition_circuit(p, &Partition::single(names), d, rng)
}
