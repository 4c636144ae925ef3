//! Constant-depth resultant circuits, elementary-symmetric evaluations on
//! polynomial roots, root filters with advice, and the piece-wise rational
//! GCD family.
//!
//! All constructions share one pattern: a small circuit over the (virtual)
//! roots of the inputs, multi-symmetric in the root blocks, pushed through
//! the symmetric-decomposition pipeline so the final circuits read the
//! polynomials' coefficients. Families carry their circuits over signed
//! coefficient coordinates (`f_r = Esym_r(roots)`); the plain-coefficient
//! translation is [`CoeffConvention`].

mod evaluator;

pub use evaluator::SlotAffine;
pub(crate) use evaluator::stream_eval;

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use once_cell::sync::Lazy;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::circuit::{
    Builder, Circuit, InputDecl, PiecewiseFamily, RatioCircuit,
};
use crate::error::{Error, Result};
use crate::field::{Embedding, FieldCtx, FieldElem};
use crate::gadgets::InterpPlan;
use crate::polyring::{sylvester_resultant, TruncMV, UniPoly};
use crate::symdec::{build_multisym, sigma_slot, MultiSymPieces};

/// Conversion between plain ascending coefficients of a monic polynomial and
/// the signed coordinates `f_r = Esym_r(roots)`, i.e.
/// `f(y) = y^d - f_1 y^{d-1} + ... + (-1)^d f_d`.
pub struct CoeffConvention;

impl CoeffConvention {
    /// Signed coordinates `f_1..f_d` of a monic polynomial.
    pub fn to_signed(f: &UniPoly) -> Result<Vec<FieldElem>> {
        let ctx = f.ctx().clone();
        if !f.is_monic() {
            return Err(Error::DegenerateInput("polynomial must be monic".into()));
        }
        let d = f.degree().unwrap();
        Ok((1..=d)
            .map(|r| {
                let a = f.coeff(d - r);
                if r % 2 == 0 {
                    a
                } else {
                    ctx.neg(a)
                }
            })
            .collect())
    }

    /// Monic polynomial from signed coordinates.
    pub fn from_signed(ctx: &FieldCtx, signed: &[FieldElem]) -> UniPoly {
        let d = signed.len();
        let mut coeffs = vec![ctx.zero(); d + 1];
        coeffs[d] = ctx.one();
        for (r, &s) in signed.iter().enumerate() {
            let r = r + 1;
            coeffs[d - r] = if r % 2 == 0 { s } else { ctx.neg(s) };
        }
        UniPoly::new(ctx, coeffs)
    }
}

fn family_rng() -> ChaCha8Rng {
    // construction-internal randomness (symmetry prechecks, ratio checks)
    ChaCha8Rng::seed_from_u64(0x5eed)
}

fn signed_input_decl(side: &str, r: usize) -> InputDecl {
    InputDecl {
        name: format!("{side}{r}"),
        group: Some("zs".into()),
    }
}

/// Renames the block slots of a decomposition to signed-coefficient names:
/// block 0 becomes `f1..f{n0}`, block 1 `g1..g{n1}`, block 2 `h1..h{n2}`.
fn rename_slots(pieces: &MultiSymPieces, composed: &Circuit) -> Circuit {
    let sides = ["f", "g", "h"];
    let mut rename = HashMap::new();
    for (b, blk) in pieces.blocks.iter().enumerate() {
        for (r, slot) in blk.slot_names.iter().enumerate() {
            rename.insert(slot.clone(), signed_input_decl(sides[b], r + 1));
        }
    }
    composed.rename_inputs(&rename)
}

// ---------------------------------------------------------------------------
// Resultant
// ---------------------------------------------------------------------------

/// The constant-depth resultant construction for monic degree pairs
/// `(d1, d2)`: the bi-symmetric product of root differences decomposed over
/// both blocks. The circuit reads signed coefficients `f1..f{d1}, g1..g{d2}`.
pub struct ResultantCircuit {
    pub circuit: Circuit,
    pub d1: usize,
    pub d2: usize,
    pub required_q: u64,
    pieces: MultiSymPieces,
}

pub fn resultant_circuit(ctx: &FieldCtx, d1: usize, d2: usize) -> Result<ResultantCircuit> {
    if d1 == 0 || d2 == 0 {
        return Err(Error::DegreeZero);
    }
    // top: prod_{i,j} (sigma_i - tau_j), one flat product of differences
    let mut b = Builder::new(ctx);
    let sigmas: Vec<u32> = (0..d1).map(|i| b.input(&sigma_slot(0, i), Some("sigma"))).collect();
    let taus: Vec<u32> = (0..d2).map(|j| b.input(&sigma_slot(1, j), Some("sigma"))).collect();
    let mut factors = Vec::with_capacity(d1 * d2);
    for &s in &sigmas {
        for &t in &taus {
            factors.push(b.sub(s, t));
        }
    }
    let prod = b.mul(factors);
    let top = b.finish(vec![prod]);
    // the resultant has total degree d1 + d2 in the coefficients (each
    // Sylvester-determinant term takes d2 entries from f-rows and d1 from
    // g-rows), so the reconstruction degree is d1 + d2 rather than the
    // product degree of the root expression
    let d = d1 + d2;
    let pieces = build_multisym(ctx, &top, &[d1, d2], d)?;
    let circuit = rename_slots(&pieces, &pieces.composed);
    Ok(ResultantCircuit {
        circuit,
        d1,
        d2,
        required_q: pieces.required_q,
        pieces,
    })
}

impl ResultantCircuit {
    /// Evaluates the circuit on the coefficients of two monic polynomials.
    pub fn eval_poly(&self, f: &UniPoly, g: &UniPoly) -> Result<FieldElem> {
        let ctx = f.ctx().clone();
        if f.degree() != Some(self.d1) || g.degree() != Some(self.d2) {
            return Err(Error::DegenerateInput(
                "degree mismatch with the constructed family".into(),
            ));
        }
        let fs = CoeffConvention::to_signed(f)?;
        let gs = CoeffConvention::to_signed(g)?;
        let slots: Vec<SlotAffine> = fs
            .iter()
            .chain(gs.iter())
            .map(|&c| SlotAffine { c, e: ctx.zero() })
            .collect();
        let out = stream_eval(&self.pieces, &slots, None, 0)?;
        Ok(out[0].coeff(&[0, 0]))
    }
}

// ---------------------------------------------------------------------------
// Esym of g on the roots of f
// ---------------------------------------------------------------------------

/// Circuit for `Esym_r({g(s_1), ..., g(s_{d1})})` over the signed
/// coefficients of monic `f` (roots `s_i`) and monic `g`.
pub struct EsymOnRootsCircuit {
    pub circuit: Circuit,
    pub d1: usize,
    pub d2: usize,
    pub r: usize,
    pub required_q: u64,
    pieces: MultiSymPieces,
}

/// Builds the evaluation products `g(s_i) = prod_j (s_i - t_j)` and the
/// degree-3 symmetric gadget over them, then decomposes over both blocks.
pub fn esym_on_roots_circuit(
    ctx: &FieldCtx,
    d1: usize,
    d2: usize,
    r: usize,
) -> Result<EsymOnRootsCircuit> {
    if d1 == 0 || d2 == 0 {
        return Err(Error::DegreeZero);
    }
    if r > d1 {
        return Err(Error::IndexOutOfRange { index: r, max: d1 });
    }
    let mut b = Builder::new(ctx);
    let sigmas: Vec<u32> = (0..d1).map(|i| b.input(&sigma_slot(0, i), Some("sigma"))).collect();
    let taus: Vec<u32> = (0..d2).map(|j| b.input(&sigma_slot(1, j), Some("sigma"))).collect();
    let evals: Vec<u32> = sigmas
        .iter()
        .map(|&s| {
            let diffs: Vec<u32> = taus.iter().map(|&t| b.sub(s, t)).collect();
            b.mul(diffs)
        })
        .collect();
    // Esym_r over the evaluations: coefficient extraction from the
    // generating product at d1 + 1 points
    let plan = InterpPlan::for_degree(ctx, d1)?;
    let row = plan.weight_row(r);
    let one = b.int(1);
    let mut terms = Vec::new();
    for (a, &point) in plan.points().iter().enumerate() {
        let factors: Vec<u32> = evals
            .iter()
            .map(|&u| {
                let cu = b.constant(point);
                let cu_u = b.mul(vec![cu, u]);
                b.add(vec![one, cu_u])
            })
            .collect();
        let mut args = factors;
        args.push(b.constant(row[a]));
        terms.push(b.mul(args));
    }
    let out = b.add(terms);
    let top = b.finish(vec![out]);
    let d = (r * d2).max(1);
    let pieces = build_multisym(ctx, &top, &[d1, d2], d)?;
    let circuit = rename_slots(&pieces, &pieces.composed);
    Ok(EsymOnRootsCircuit {
        circuit,
        d1,
        d2,
        r,
        required_q: pieces.required_q,
        pieces,
    })
}

impl EsymOnRootsCircuit {
    pub fn eval_poly(&self, f: &UniPoly, g: &UniPoly) -> Result<FieldElem> {
        let ctx = f.ctx().clone();
        let fs = CoeffConvention::to_signed(f)?;
        let gs = CoeffConvention::to_signed(g)?;
        if fs.len() != self.d1 || gs.len() != self.d2 {
            return Err(Error::DegenerateInput(
                "degree mismatch with the constructed family".into(),
            ));
        }
        let slots: Vec<SlotAffine> = fs
            .iter()
            .chain(gs.iter())
            .map(|&c| SlotAffine { c, e: ctx.zero() })
            .collect();
        let out = stream_eval(&self.pieces, &slots, None, 0)?;
        Ok(out[0].coeff(&[0, 0]))
    }
}

// ---------------------------------------------------------------------------
// Esym of a rational function on the roots of f
// ---------------------------------------------------------------------------

/// `Esym_r({g(s_i)/h(s_i)})` as a ratio of circuits over the signed
/// coefficients of `f`, `g`, `h`; the denominator is `prod_i h(s_i)`.
pub struct EsymRationalCircuit {
    pub ratio: RatioCircuit,
    pub d_f: usize,
    pub d_g: usize,
    pub d_h: usize,
    pub r: usize,
    num_pieces: MultiSymPieces,
    den: EsymOnRootsCircuit,
}

pub fn esym_rational_on_roots(
    ctx: &FieldCtx,
    d_f: usize,
    d_g: usize,
    d_h: usize,
    r: usize,
) -> Result<EsymRationalCircuit> {
    if d_f == 0 || d_h == 0 {
        return Err(Error::DegreeZero);
    }
    if r > d_f {
        return Err(Error::IndexOutOfRange { index: r, max: d_f });
    }
    // numerator: [t^r] prod_i ( h(s_i) + t * g(s_i) ), multi-symmetric over
    // the three root blocks
    let mut b = Builder::new(ctx);
    let sigmas: Vec<u32> = (0..d_f).map(|i| b.input(&sigma_slot(0, i), Some("sigma"))).collect();
    let taus: Vec<u32> = (0..d_g).map(|j| b.input(&sigma_slot(1, j), Some("sigma"))).collect();
    let rhos: Vec<u32> = (0..d_h).map(|j| b.input(&sigma_slot(2, j), Some("sigma"))).collect();
    let one = b.int(1);
    let g_evals: Vec<u32> = sigmas
        .iter()
        .map(|&s| {
            if taus.is_empty() {
                one
            } else {
                let diffs: Vec<u32> = taus.iter().map(|&t| b.sub(s, t)).collect();
                b.mul(diffs)
            }
        })
        .collect();
    let h_evals: Vec<u32> = sigmas
        .iter()
        .map(|&s| {
            let diffs: Vec<u32> = rhos.iter().map(|&t| b.sub(s, t)).collect();
            b.mul(diffs)
        })
        .collect();
    let plan = InterpPlan::for_degree(ctx, d_f)?;
    let row = plan.weight_row(r);
    let mut terms = Vec::new();
    for (a, &point) in plan.points().iter().enumerate() {
        let factors: Vec<u32> = g_evals
            .iter()
            .zip(&h_evals)
            .map(|(&ge, &he)| {
                let cp = b.constant(point);
                let tg = b.mul(vec![cp, ge]);
                b.add(vec![he, tg])
            })
            .collect();
        let mut args = factors;
        args.push(b.constant(row[a]));
        terms.push(b.mul(args));
    }
    let out = b.add(terms);
    let top = b.finish(vec![out]);
    let mut sizes = vec![d_f];
    sizes.push(d_g);
    sizes.push(d_h);
    // blocks of size zero contribute nothing; keep them out of the pipeline
    let sizes: Vec<usize> = sizes.into_iter().filter(|&n| n > 0).collect();
    let d = (r * d_g + (d_f - r) * d_h).max(1);
    let pieces = build_multisym(ctx, &top, &sizes, d)?;
    let num = rename_slots(&pieces, &pieces.composed);
    let den = esym_on_roots_circuit(ctx, d_f, d_h, d_f)?;
    // the denominator circuit reads (f, h); rename its second block to h
    let mut rename = HashMap::new();
    for rr in 1..=d_h {
        rename.insert(format!("g{rr}"), signed_input_decl("h", rr));
    }
    let den_c = den.circuit.rename_inputs(&rename);
    let mut rng = family_rng();
    let ratio = RatioCircuit::new(num, den_c, &mut rng)?;
    Ok(EsymRationalCircuit {
        ratio,
        d_f,
        d_g,
        d_h,
        r,
        num_pieces: pieces,
        den,
    })
}

impl EsymRationalCircuit {
    /// Evaluates numerator and denominator on coefficient inputs; rejects
    /// instances where `f` and `h` share a root.
    pub fn eval_poly(
        &self,
        f: &UniPoly,
        g: &UniPoly,
        h: &UniPoly,
    ) -> Result<(FieldElem, FieldElem)> {
        let ctx = f.ctx().clone();
        if h.degree() >= Some(1) {
            let res = sylvester_resultant(f, h)?;
            if ctx.is_zero(res) {
                return Err(Error::SharedRoots(
                    "f and h have a common root on this instance".into(),
                ));
            }
        }
        let fs = CoeffConvention::to_signed(f)?;
        let gs = CoeffConvention::to_signed(g)?;
        let hs = CoeffConvention::to_signed(h)?;
        let slots: Vec<SlotAffine> = fs
            .iter()
            .chain(gs.iter())
            .chain(hs.iter())
            .map(|&c| SlotAffine { c, e: ctx.zero() })
            .collect();
        let num = stream_eval(&self.num_pieces, &slots, None, 0)?[0].coeff(&[0, 0]);
        let den = self.den.eval_poly(f, h)?;
        Ok((num, den))
    }
}

// ---------------------------------------------------------------------------
// Filter family
// ---------------------------------------------------------------------------

/// Which side of the root filter to compute.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FilterCond {
    /// roots of `f` where `g` does not vanish
    NonZero,
    /// roots of `f` where `g` vanishes (the complementary cofactor)
    Zero,
}

/// Result of a filter evaluation.
#[derive(Clone, Debug)]
pub struct FilterResult {
    pub advice_r: usize,
    pub numerator: UniPoly,
    pub denominator: FieldElem,
    pub poly: UniPoly,
}

/// The piece-wise family computing root filters: test circuits
/// `T_k = Esym_k({g(s_i)})`, numerators `A_k = Esym_k({(y - s_i) g(s_i)})`
/// (with `y` carried through), denominators `B_k = T_k`.
pub struct FilterFamily {
    pub family: PiecewiseFamily,
    pub d1: usize,
    pub d2: usize,
    pieces: MultiSymPieces,
}

pub fn filter_family(ctx: &FieldCtx, d1: usize, d2: usize) -> Result<FilterFamily> {
    if d1 == 0 || d2 == 0 {
        return Err(Error::DegreeZero);
    }
    // multi-output top over the two root blocks and the passthrough y:
    // outputs [T_0..T_d1, A_0..A_d1]
    let mut b = Builder::new(ctx);
    let sigmas: Vec<u32> = (0..d1).map(|i| b.input(&sigma_slot(0, i), Some("sigma"))).collect();
    let taus: Vec<u32> = (0..d2).map(|j| b.input(&sigma_slot(1, j), Some("sigma"))).collect();
    let y = b.input("y", None);
    let u_evals: Vec<u32> = sigmas
        .iter()
        .map(|&s| {
            let diffs: Vec<u32> = taus.iter().map(|&t| b.sub(s, t)).collect();
            b.mul(diffs)
        })
        .collect();
    let h_evals: Vec<u32> = sigmas
        .iter()
        .zip(&u_evals)
        .map(|(&s, &u)| {
            let ys = b.sub(y, s);
            b.mul(vec![ys, u])
        })
        .collect();
    let plan = InterpPlan::for_degree(ctx, d1)?;
    let one = b.int(1);
    let mut w_t = Vec::new();
    let mut w_a = Vec::new();
    for &point in plan.points().iter() {
        let t_factors: Vec<u32> = u_evals
            .iter()
            .map(|&u| {
                let cp = b.constant(point);
                let cu = b.mul(vec![cp, u]);
                b.add(vec![one, cu])
            })
            .collect();
        w_t.push(b.mul(t_factors));
        let a_factors: Vec<u32> = h_evals
            .iter()
            .map(|&h| {
                let cp = b.constant(point);
                let ch = b.mul(vec![cp, h]);
                b.add(vec![one, ch])
            })
            .collect();
        w_a.push(b.mul(a_factors));
    }
    let mut outputs = Vec::with_capacity(2 * (d1 + 1));
    for k in 0..=d1 {
        let row = plan.weight_row(k);
        let terms: Vec<u32> = w_t
            .iter()
            .enumerate()
            .map(|(a, &w)| {
                let c = b.constant(row[a]);
                b.mul(vec![c, w])
            })
            .collect();
        outputs.push(b.add(terms));
    }
    for k in 0..=d1 {
        let row = plan.weight_row(k);
        let terms: Vec<u32> = w_a
            .iter()
            .enumerate()
            .map(|(a, &w)| {
                let c = b.constant(row[a]);
                b.mul(vec![c, w])
            })
            .collect();
        outputs.push(b.add(terms));
    }
    let top = b.finish(outputs);
    // degree of the decomposition: the numerators reach d1 * (d2 + 1)
    let d = d1 * (d2 + 1);
    let pieces = build_multisym(ctx, &top, &[d1, d2], d)?;
    let composed = rename_slots(&pieces, &pieces.composed);
    let tests: Vec<Circuit> = (0..=d1).map(|k| composed.select_output(k)).collect();
    let nums: Vec<Circuit> = (0..=d1).map(|k| composed.select_output(d1 + 1 + k)).collect();
    let dens = tests.clone();
    let family = PiecewiseFamily {
        params: vec![("d1".into(), d1 as u64), ("d2".into(), d2 as u64)],
        tests,
        nums,
        dens,
        advice_rule: "r = max { k : T_k(coeffs) != 0 }; filter = A_r / B_r".into(),
        required_q: pieces.required_q,
    };
    Ok(FilterFamily {
        family,
        d1,
        d2,
        pieces,
    })
}

impl FilterFamily {
    /// Evaluates all tests and numerators at the given coefficient slots
    /// (possibly affine in an auxiliary variable); returns per-`k`
    /// polynomials in `(y, z)`.
    pub(crate) fn eval_all(
        &self,
        slots: &[SlotAffine],
        z_bound: usize,
    ) -> Result<(Vec<TruncMV>, Vec<TruncMV>)> {
        let out = stream_eval(&self.pieces, slots, Some("y"), z_bound)?;
        let tests = out[..=self.d1].to_vec();
        let nums = out[self.d1 + 1..].to_vec();
        Ok((tests, nums))
    }

    fn signed_slots(&self, f: &UniPoly, g: &UniPoly) -> Result<Vec<SlotAffine>> {
        let ctx = f.ctx().clone();
        let fs = CoeffConvention::to_signed(f)?;
        let gs = CoeffConvention::to_signed(g)?;
        if fs.len() != self.d1 || gs.len() != self.d2 {
            return Err(Error::DegenerateInput(
                "degree mismatch with the constructed family".into(),
            ));
        }
        Ok(fs
            .iter()
            .chain(gs.iter())
            .map(|&c| SlotAffine { c, e: ctx.zero() })
            .collect())
    }
}

/// Evaluates the filter family on monic `(f, g)` and selects the advice.
pub fn filter_eval(
    fam: &FilterFamily,
    f: &UniPoly,
    g: &UniPoly,
    cond: FilterCond,
) -> Result<FilterResult> {
    let ctx = f.ctx().clone();
    let slots = fam.signed_slots(f, g)?;
    let (tests, nums) = fam.eval_all(&slots, 0)?;
    let test_vals: Vec<FieldElem> = tests.iter().map(|t| t.coeff(&[0, 0])).collect();
    let advice_r = match (0..=fam.d1).rev().find(|&k| !ctx.is_zero(test_vals[k])) {
        Some(r) => r,
        None => return Err(Error::AllTestsZero),
    };
    let denominator = test_vals[advice_r];
    // numerator A_r as a polynomial in y
    let numerator = {
        let a = &nums[advice_r];
        let ydeg = a.degree_in(0);
        let coeffs: Vec<FieldElem> = (0..=ydeg).map(|i| a.coeff(&[i as u16, 0])).collect();
        UniPoly::new(&ctx, coeffs)
    };
    let nonzero_part = numerator.scale(ctx.inv(denominator)?);
    let poly = match cond {
        FilterCond::NonZero => nonzero_part,
        FilterCond::Zero => f.div_exact(&nonzero_part)?,
    };
    Ok(FilterResult {
        advice_r,
        numerator,
        denominator,
        poly,
    })
}

// ---------------------------------------------------------------------------
// GCD family
// ---------------------------------------------------------------------------

/// The piece-wise rational GCD family for monic degree pairs `d1 > d2 >= 1`:
/// the filter family applied to `F(y, z) = f(y) + z g(y)` against `g`. The
/// coefficients of `F` are affine in `z`, every signed-coordinate input is
/// evaluated over `K[z]`, and the advice is the pair `(r, i)`: `r` the
/// largest nonvanishing test, `i` the least `z`-power of the denominator.
pub struct GcdFamily {
    pub filter: FilterFamily,
    pub d1: usize,
    pub d2: usize,
}

impl GcdFamily {
    /// Depth of the family including the coefficient preparation stage that
    /// feeds `F`'s signed coordinates (two levels: the `z * g_j` products and
    /// the affine combination).
    pub fn depth(&self) -> u64 {
        self.filter.family.depth() + 2
    }

    pub fn required_q(&self) -> u64 {
        self.filter.family.required_q
    }
}

pub fn gcd_family(ctx: &FieldCtx, d1: usize, d2: usize) -> Result<GcdFamily> {
    if !(d1 > d2 && d2 >= 1) {
        return Err(Error::DegenerateInput(
            "gcd family requires d1 > d2 >= 1".into(),
        ));
    }
    let filter = filter_family(ctx, d1, d2)?;
    Ok(GcdFamily { filter, d1, d2 })
}

/// Advice and bookkeeping from a GCD evaluation.
#[derive(Clone, Debug)]
pub struct GcdReport {
    pub advice_r: usize,
    pub advice_i: usize,
    /// normalized degrees actually used by the family
    pub d1: usize,
    pub d2: usize,
    /// field the evaluation ran in (lifted when the base is too small)
    pub field_used: String,
    /// true when the answer came from a degenerate shortcut, not the family
    pub shortcut: bool,
}

static FAMILY_CACHE: Lazy<Mutex<HashMap<(u64, usize, usize), Arc<GcdFamily>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

fn cached_gcd_family(ctx: &FieldCtx, d1: usize, d2: usize) -> Result<Arc<GcdFamily>> {
    let key = (ctx.fingerprint(), d1, d2);
    if let Some(f) = FAMILY_CACHE.lock().unwrap().get(&key) {
        return Ok(f.clone());
    }
    let fam = Arc::new(gcd_family(ctx, d1, d2)?);
    FAMILY_CACHE.lock().unwrap().insert(key, fam.clone());
    Ok(fam)
}

/// Computes the monic GCD of two monic polynomials through the piece-wise
/// family, lifting to an extension when the base field is too small for the
/// interpolation demands. The advice law `r = d1 - deg(gcd)` is asserted.
pub fn gcd_eval(f: &UniPoly, g: &UniPoly) -> Result<(UniPoly, GcdReport)> {
    let ctx = f.ctx().clone();
    if f.is_zero() && g.is_zero() {
        return Err(Error::DegenerateInput("gcd(0, 0) is undefined".into()));
    }
    let shortcut = |poly: UniPoly, d1: usize, d2: usize| {
        let report = GcdReport {
            advice_r: d1.saturating_sub(poly.degree().unwrap_or(0)),
            advice_i: 0,
            d1,
            d2,
            field_used: ctx.spec_string(),
            shortcut: true,
        };
        (poly, report)
    };
    if f.is_zero() {
        return Ok(shortcut(g.monic()?, 0, g.degree().unwrap()));
    }
    if g.is_zero() {
        return Ok(shortcut(f.monic()?, f.degree().unwrap(), 0));
    }
    let mut a = f.monic()?;
    let mut b = g.monic()?;
    if a.degree() < b.degree() {
        std::mem::swap(&mut a, &mut b);
    }
    // equal degrees: work with (f, g - f), rescaled monic
    while a.degree() == b.degree() {
        let diff = b.sub(&a);
        if diff.is_zero() {
            let d = a.degree().unwrap();
            return Ok(shortcut(a, d, d));
        }
        b = diff.monic()?;
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
    }
    let d1 = a.degree().unwrap();
    let d2 = b.degree().unwrap();
    if d2 == 0 {
        return Ok(shortcut(UniPoly::one(&ctx), d1, d2));
    }

    // build (or fetch) the family, lifting the field if needed
    let (work_ctx, emb) = match cached_gcd_family(&ctx, d1, d2) {
        Ok(fam) => {
            return gcd_eval_in(&fam, &a, &b, None);
        }
        Err(Error::FieldTooSmall { needed, .. }) => {
            let big = ctx.extension_with_cardinality(needed)?;
            let emb = Embedding::new(&ctx, &big)?;
            (big, emb)
        }
        Err(e) => return Err(e),
    };
    let lift_poly = |p: &UniPoly| {
        UniPoly::new(
            &work_ctx,
            p.coeffs().iter().map(|&c| emb.lift(c)).collect(),
        )
    };
    let fam = cached_gcd_family(&work_ctx, d1, d2)?;
    let (gcd_big, mut report) = gcd_eval_in(&fam, &lift_poly(&a), &lift_poly(&b), Some(&emb))?;
    let coeffs: Result<Vec<FieldElem>> = gcd_big
        .coeffs()
        .iter()
        .map(|&c| {
            emb.project(c).ok_or_else(|| {
                Error::DegenerateInput("lifted gcd left the base field".into())
            })
        })
        .collect();
    report.field_used = work_ctx.spec_string();
    Ok((UniPoly::new(&ctx, coeffs?), report))
}

fn gcd_eval_in(
    fam: &GcdFamily,
    f: &UniPoly,
    g: &UniPoly,
    _emb: Option<&Embedding>,
) -> Result<(UniPoly, GcdReport)> {
    let ctx = f.ctx().clone();
    let d1 = fam.d1;
    let d2 = fam.d2;
    // signed coordinates of F = f + z g are affine in z
    let gs = CoeffConvention::to_signed(g)?;
    let mut slots = Vec::with_capacity(d1 + d2);
    for r in 1..=d1 {
        // F_r = (-1)^r (a_{d1-r} + z b_{d1-r})
        let sign_neg = r % 2 == 1;
        let a_c = f.coeff(d1 - r);
        let b_c = if d1 - r <= d2 { g.coeff(d1 - r) } else { ctx.zero() };
        let (mut c, mut e) = (a_c, b_c);
        if sign_neg {
            c = ctx.neg(c);
            e = ctx.neg(e);
        }
        slots.push(SlotAffine { c, e });
    }
    for &c in &gs {
        slots.push(SlotAffine { c, e: ctx.zero() });
    }

    let z_bound = d1 * (d2 + 1);
    let (tests, nums) = fam.filter.eval_all(&slots, z_bound)?;
    let advice_r = match (0..=d1).rev().find(|&k| !tests[k].is_zero()) {
        Some(r) => r,
        None => return Err(Error::AllTestsZero),
    };

    // N(y, z) = F * B_r, D(y, z) = A_r; strip the common z-power and divide
    let b_r = &tests[advice_r]; // polynomial in z only
    let a_r = &nums[advice_r]; // polynomial in (y, z)
    let f_poly = TruncMV::from_unipoly(f, 2, 0, TruncMV::NO_CAP);
    let g_poly = TruncMV::from_unipoly(g, 2, 0, TruncMV::NO_CAP);
    let z_var = TruncMV::variable(&ctx, 2, 1, TruncMV::NO_CAP);
    let big_f = f_poly.add(&z_var.mul(&g_poly));
    let n_poly = big_f.mul(b_r);

    let advice_i = (0..=z_bound + 1)
        .find(|&i| !a_r.coeff_of(1, i).is_zero())
        .ok_or(Error::NonzeroRemainder)?;
    let d_i = a_r.coeff_of(1, advice_i).to_unipoly(0)?;
    let n_i = n_poly.coeff_of(1, advice_i).to_unipoly(0)?;
    let gcd = n_i.div_exact(&d_i)?;
    if !gcd.is_monic() {
        return Err(Error::NonzeroRemainder);
    }
    // advice law
    debug_assert_eq!(advice_r, d1 - gcd.degree().unwrap_or(0));
    let report = GcdReport {
        advice_r,
        advice_i,
        d1,
        d2,
        field_used: ctx.spec_string(),
        shortcut: false,
    };
    Ok((gcd, report))
}

/// `lcm(f, g) = f * g / gcd(f, g)`, monic.
pub fn lcm_eval(f: &UniPoly, g: &UniPoly) -> Result<UniPoly> {
    let (gcd, _) = gcd_eval(f, g)?;
    f.mul(g).div_exact(&gcd)?.monic()
}
