//! Acceptance suite: one test per criterion, each printing a PASS line with
//! its measured scope and wall time (run with `--nocapture` to see them).
//! Every tolerance is exact equality over the field; randomized instance
//! streams are seeded, so failures replay deterministically.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use symcirc::circuit::{InputSel, Val};
use symcirc::field::FieldCtx;
use symcirc::gadgets::esym_gadget;
use symcirc::gcdres::{gcd_eval, resultant_circuit, CoeffConvention, gcd_family};
use symcirc::gen::{
    planted_factor_instance, planted_gcd_pair, planted_simple_root, planted_symdec, rand_monic,
};
use symcirc::polyring::{
    binomial_in_field, esym_eval, newton_lift, symdecomp_oracle, sylvester_resultant, FieldRing,
    TruncMV, TruncRing, UniPoly,
};
use symcirc::roots::{eval_root_series, furstenberg_root_circuit, RootSpec};
use symcirc::smallchar::factor_power;
use symcirc::symdec::{generic_esym_poly, symmetric_decomposition_circuit};

fn f10007() -> FieldCtx {
    FieldCtx::prime(10007).unwrap()
}

/// Criterion 1: differential GCD suite. 200 random monic pairs per degree
/// profile (2,1), (3,2), (4,3), (5,3) over F_10007 plus 100 planted
/// non-squarefree pairs over each of F_{2^12} and F_{3^4} (multiplicities
/// divisible by the characteristic included); exact coefficient equality
/// with the Euclidean oracle and the advice law on every trial.
#[test]
fn acceptance_1_gcd_differential() {
    let t0 = Instant::now();
    let ctx = f10007();
    let mut rng = ChaCha8Rng::seed_from_u64(1001);
    let mut trials = 0usize;
    for (d1, d2) in [(2usize, 1usize), (3, 2), (4, 3), (5, 3)] {
        for _ in 0..200 {
            let f = rand_monic(&ctx, d1, &mut rng);
            let g = rand_monic(&ctx, d2, &mut rng);
            let expect = f.euclid_gcd(&g).unwrap();
            let (got, report) = gcd_eval(&f, &g).unwrap();
            assert_eq!(got, expect, "profile ({d1},{d2}): f={f}, g={g}");
            if !report.shortcut {
                assert_eq!(
                    report.advice_r,
                    report.d1 - expect.degree().unwrap_or(0),
                    "advice law violated on f={f}, g={g}"
                );
            }
            trials += 1;
        }
    }
    // planted non-squarefree pairs over small-characteristic extensions
    for ctx in [
        FieldCtx::extension(2, 12, None).unwrap(),
        FieldCtx::extension(3, 4, None).unwrap(),
    ] {
        let p = ctx.characteristic() as usize;
        for i in 0..100 {
            // multiplicity divisible by the characteristic on most trials
            let mult = if i % 4 == 3 { 2.max(p - 1) } else { p };
            let pad_f = 1 + (i % 2);
            let pad_g = 1;
            let planted = planted_gcd_pair(&ctx, mult, pad_f, pad_g, &mut rng);
            let expect = planted.f.euclid_gcd(&planted.g).unwrap();
            let (got, report) = gcd_eval(&planted.f, &planted.g).unwrap();
            assert_eq!(got, expect, "planted over {}", ctx.spec_string());
            assert!(
                planted.gcd.divrem(&got).unwrap().1.is_zero(),
                "planted divisor must divide the result"
            );
            if !report.shortcut {
                assert_eq!(report.advice_r, report.d1 - expect.degree().unwrap_or(0));
            }
            trials += 1;
        }
    }
    println!(
        "ACCEPT-1 PASS gcd differential: {trials} trials, 0 mismatches ({:.1?})",
        t0.elapsed()
    );
}

/// Criterion 2: resultant suite. 200 random monic pairs with degrees <= 5
/// over each of F_10007, F_{2^16}, F_{3^8}, exact agreement with the
/// Sylvester determinant, plus 20 planted common-root pairs evaluating to 0.
#[test]
fn acceptance_2_resultant_vs_sylvester() {
    let t0 = Instant::now();
    let mut trials = 0usize;
    for ctx in [
        f10007(),
        FieldCtx::extension(2, 16, None).unwrap(),
        FieldCtx::extension(3, 8, None).unwrap(),
    ] {
        let mut rng = ChaCha8Rng::seed_from_u64(2002);
        for _ in 0..200 {
            let d1 = rng.gen_range(1..=5usize);
            let d2 = rng.gen_range(1..=5usize);
            let rc = resultant_circuit(&ctx, d1, d2).unwrap();
            let f = rand_monic(&ctx, d1, &mut rng);
            let g = rand_monic(&ctx, d2, &mut rng);
            assert_eq!(
                rc.eval_poly(&f, &g).unwrap(),
                sylvester_resultant(&f, &g).unwrap(),
                "({d1},{d2}) over {}",
                ctx.spec_string()
            );
            trials += 1;
        }
    }
    // planted common roots
    let ctx = f10007();
    let mut rng = ChaCha8Rng::seed_from_u64(2003);
    for _ in 0..20 {
        let d1 = rng.gen_range(2..=4usize);
        let d2 = rng.gen_range(2..=4usize);
        let shared = ctx.rand(&mut rng);
        let mut roots_f = vec![shared];
        let mut roots_g = vec![shared];
        while roots_f.len() < d1 {
            roots_f.push(ctx.rand(&mut rng));
        }
        while roots_g.len() < d2 {
            roots_g.push(ctx.rand(&mut rng));
        }
        let rc = resultant_circuit(&ctx, d1, d2).unwrap();
        let v = rc
            .eval_poly(
                &UniPoly::from_roots(&ctx, &roots_f),
                &UniPoly::from_roots(&ctx, &roots_g),
            )
            .unwrap();
        assert!(ctx.is_zero(v), "shared-root resultant must vanish");
        trials += 1;
    }
    println!(
        "ACCEPT-2 PASS resultant vs Sylvester: {trials} trials, 0 mismatches ({:.1?})",
        t0.elapsed()
    );
}

/// Criterion 3: symmetric decomposition. For n in {2,3} and d <= 4, 50
/// random planted compositions are decomposed; the result agrees with the
/// plant at 50 random points and exactly matches the linear-algebra oracle;
/// the fixed witnesses z1^2 - 2 z2 (F_10007) and z1^2 (F_{2^12}) are
/// recovered exactly.
#[test]
fn acceptance_3_symmetric_decomposition() {
    let t0 = Instant::now();
    let ctx = f10007();
    let mut rng = ChaCha8Rng::seed_from_u64(3003);
    let mut trials = 0usize;
    for _ in 0..50 {
        let n = rng.gen_range(2..=3usize);
        let d = rng.gen_range(1..=4usize);
        let plant = planted_symdec(&ctx, n, d, &mut rng);
        let dec = symmetric_decomposition_circuit(&plant.p_circuit, d, &mut rng).unwrap();
        for _ in 0..50 {
            let z: Vec<_> = (0..n).map(|_| ctx.rand(&mut rng)).collect();
            assert_eq!(
                dec.circuit.eval_field(&z).unwrap()[0],
                plant.q_poly.eval(&z),
                "plant disagreement at n={n} d={d}"
            );
        }
        // exact match against the oracle
        let oracle = symdecomp_oracle(&plant.p_poly, d, &mut rng).unwrap();
        let ring = TruncRing::new(ctx.clone(), n, d);
        let assign: Vec<Val<TruncRing>> = (0..n).map(|i| Val::R(ring.var(i))).collect();
        let sym = dec.circuit.eval(&ring, &assign).unwrap()[0].clone();
        assert_eq!(sym, oracle, "oracle disagreement at n={n} d={d}");
        trials += 1;
    }
    // fixed witnesses
    let witness = |ctx: &FieldCtx| -> TruncMV {
        let mut b = symcirc::circuit::Builder::new(ctx);
        let x0 = b.input("x0", None);
        let x1 = b.input("x1", None);
        let s0 = b.mul(vec![x0, x0]);
        let s1 = b.mul(vec![x1, x1]);
        let out = b.add(vec![s0, s1]);
        let p = b.finish(vec![out]);
        let dec = symmetric_decomposition_circuit(&p, 2, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
        let ring = TruncRing::new(ctx.clone(), 2, 4);
        let assign: Vec<Val<TruncRing>> = (0..2).map(|i| Val::R(ring.var(i))).collect();
        dec.circuit.eval(&ring, &assign).unwrap()[0].clone()
    };
    let q1 = witness(&ctx);
    let mut expect1 = TruncMV::zero(&ctx, 2, 4);
    expect1.add_term(vec![2, 0], ctx.one());
    expect1.add_term(vec![0, 1], ctx.from_int(-2));
    assert_eq!(q1, expect1, "witness z1^2 - 2 z2");
    let ctx2 = FieldCtx::extension(2, 12, None).unwrap();
    let q2 = witness(&ctx2);
    let mut expect2 = TruncMV::zero(&ctx2, 2, 4);
    expect2.add_term(vec![2, 0], ctx2.one());
    assert_eq!(q2, expect2, "witness z1^2 over F_2^12");
    println!(
        "ACCEPT-3 PASS symmetric decomposition: {trials} plants + 2 witnesses ({:.1?})",
        t0.elapsed()
    );
}

/// Criterion 4: root lifting. 100 random bivariate polynomials with a
/// planted simple root: the constructed circuit equals the Newton oracle
/// modulo t^{d+1} for d <= 6; the Catalan witness t + t^2 + 2t^3 + 5t^4 is
/// exact.
#[test]
fn acceptance_4_root_lifting() {
    let t0 = Instant::now();
    let ctx = f10007();
    let mut rng = ChaCha8Rng::seed_from_u64(4004);
    for i in 0..100 {
        let d = 1 + (i % 6);
        let plant = planted_simple_root(&ctx, &mut rng);
        let spec = RootSpec::simple(
            plant.circuit.clone(),
            "y",
            InputSel::group("t"),
            plant.y0,
            d,
        );
        let root = furstenberg_root_circuit(&spec).unwrap();
        let got = eval_root_series(&root, d).unwrap();
        let oracle = newton_lift(&plant.poly, plant.y0, d).unwrap();
        assert_eq!(got, oracle, "trial {i}, d={d}");
    }
    // Catalan witness
    let mut p = TruncMV::zero(&ctx, 2, TruncMV::NO_CAP);
    p.add_term(vec![0, 2], ctx.one());
    p.add_term(vec![0, 1], ctx.from_int(-1));
    p.add_term(vec![1, 0], ctx.one());
    let c = symcirc::gadgets::poly_to_circuit(&p, &[("t", Some("t")), ("y", None)]);
    let spec = RootSpec::simple(c, "y", InputSel::group("t"), ctx.zero(), 4);
    let root = furstenberg_root_circuit(&spec).unwrap();
    assert_eq!(
        eval_root_series(&root, 4).unwrap(),
        UniPoly::from_ints(&ctx, &[0, 1, 1, 2, 5])
    );
    println!(
        "ACCEPT-4 PASS root lifting: 100 Newton comparisons + Catalan witness ({:.1?})",
        t0.elapsed()
    );
}

/// Criterion 5: small-characteristic factor powers. 50 planted instances per
/// field in {F_2, F_3, F_4, F_{2^12}} with factor degrees <= 3 and
/// multiplicity splits (l, e) in {(1,1), (0,2), (0,3)} plus (2,1) in
/// characteristic 2; the computed factor power equals the planted
/// g^{p^l} mod t^{d+1} exactly.
#[test]
fn acceptance_5_factor_powers() {
    let t0 = Instant::now();
    let fields = [
        FieldCtx::prime(2).unwrap(),
        FieldCtx::prime(3).unwrap(),
        FieldCtx::extension(2, 2, None).unwrap(),
        FieldCtx::extension(2, 12, None).unwrap(),
    ];
    let mut total = 0usize;
    for ctx in &fields {
        let p = ctx.characteristic();
        let mut rng = ChaCha8Rng::seed_from_u64(5005 + ctx.cardinality());
        // multiplicity splits valid for this characteristic (gcd(p, e) = 1)
        let mut splits: Vec<(u32, u64)> = vec![(1, 1), (0, 2), (0, 3)];
        if p == 2 {
            splits.push((2, 1));
        }
        splits.retain(|&(_, e)| e % p != 0);
        let mut done = 0usize;
        while done < 50 {
            let (ell, e) = splits[done % splits.len()];
            let d = 3 + (done % 4);
            let Some(plant) = planted_factor_instance(ctx, ell, e, 3, d, &mut rng) else {
                continue;
            };
            let (got, _) = factor_power(&plant.instance).unwrap();
            assert_eq!(
                got,
                plant.truth,
                "field {}, split ({ell},{e}), d={d}",
                ctx.spec_string()
            );
            done += 1;
            total += 1;
        }
    }
    println!(
        "ACCEPT-5 PASS factor powers: {total} planted instances, 0 mismatches ({:.1?})",
        t0.elapsed()
    );
}

/// Criterion 6: depth constancy. The measured depth of every circuit family
/// is identical across the size sweep: gcd_family and resultant_circuit over
/// d1 in {2..6}, symmetric decomposition at fixed degree over n in {2..5}.
#[test]
fn acceptance_6_depth_constancy() {
    let t0 = Instant::now();
    let ctx = f10007();
    let gcd_depths: Vec<u64> = (2..=6usize)
        .map(|d1| gcd_family(&ctx, d1, d1 - 1).unwrap().depth())
        .collect();
    assert!(
        gcd_depths.iter().all(|&d| d == gcd_depths[0]),
        "gcd family depths varied: {gcd_depths:?}"
    );
    let res_depths: Vec<u64> = (2..=6usize)
        .map(|d| resultant_circuit(&ctx, d, d).unwrap().circuit.stats().depth)
        .collect();
    assert!(
        res_depths.iter().all(|&d| d == res_depths[0]),
        "resultant depths varied: {res_depths:?}"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(6006);
    let sym_depths: Vec<u64> = (2..=5usize)
        .map(|n| {
            // power sum of fixed degree 3 across the arity sweep
            let mut b = symcirc::circuit::Builder::new(&ctx);
            let mut terms = Vec::new();
            for i in 0..n {
                let x = b.input(&format!("x{i}"), None);
                terms.push(b.mul(vec![x; 3]));
            }
            let out = b.add(terms);
            let p = b.finish(vec![out]);
            let dec = symmetric_decomposition_circuit(&p, 3, &mut rng).unwrap();
            dec.circuit.stats().depth
        })
        .collect();
    assert!(
        sym_depths.iter().all(|&d| d == sym_depths[0]),
        "symmetric decomposition depths varied: {sym_depths:?}"
    );
    println!(
        "ACCEPT-6 PASS depth constancy: gcd={}, resultant={}, symdec={} across sweeps ({:.1?})",
        gcd_depths[0], res_depths[0], sym_depths[0], t0.elapsed()
    );
}

/// Criterion 7: size polynomiality (soft). Least-squares slope of
/// log(wires) against log(d1) over the gcd-family sweep is at most 12;
/// the measured value is reported.
#[test]
fn acceptance_7_size_slope() {
    let t0 = Instant::now();
    let ctx = f10007();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for d1 in 2..=6usize {
        let fam = gcd_family(&ctx, d1, d1 - 1).unwrap();
        let wires: u64 = fam
            .filter
            .family
            .tests
            .iter()
            .chain(&fam.filter.family.nums)
            .map(|c| c.stats().wires)
            .max()
            .unwrap();
        xs.push((d1 as f64).ln());
        ys.push((wires as f64).ln());
    }
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(a, b)| a * b).sum();
    let sxx: f64 = xs.iter().map(|a| a * a).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    assert!(slope <= 12.0, "size slope {slope:.2} exceeds 12");
    println!(
        "ACCEPT-7 PASS size polynomiality: log-log slope {slope:.2} <= 12 ({:.1?})",
        t0.elapsed()
    );
}

/// Criterion 8: oracle self-consistency. Hasse product rule, the Vieta
/// identities of the generic block polynomial, division reconstruction and
/// Frobenius additivity, 1000 randomized checks each with zero failures.
#[test]
fn acceptance_8_oracle_self_consistency() {
    let t0 = Instant::now();
    let ctx = f10007();
    let ctx2 = FieldCtx::extension(2, 12, None).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8008);

    // Hasse product rule
    for i in 0..1000 {
        let c = if i % 2 == 0 { &ctx } else { &ctx2 };
        let g = rand_monic(c, rng.gen_range(1..5), &mut rng);
        let h = rand_monic(c, rng.gen_range(1..5), &mut rng);
        let k = rng.gen_range(0..4usize);
        let mut rhs = UniPoly::zero(c);
        for i2 in 0..=k {
            rhs = rhs.add(&g.hasse_derivative(i2).mul(&h.hasse_derivative(k - i2)));
        }
        assert_eq!(g.mul(&h).hasse_derivative(k), rhs);
    }
    // Vieta identities of the generic block polynomial: F(0, y) has the
    // planted points as roots and Esym of the roots equals the beta values
    for _ in 0..1000 {
        let n = rng.gen_range(1..6usize);
        let gen = generic_esym_poly(&ctx, n, "b0").unwrap();
        let ring = FieldRing(ctx.clone());
        for (r, &beta) in gen.betas.iter().enumerate() {
            assert_eq!(esym_eval(&ring, &gen.alphas, r + 1).unwrap(), beta);
        }
        let mut point = vec![ctx.zero(); n + 1];
        let alpha = gen.alphas[rng.gen_range(0..n)];
        point[n] = alpha;
        assert!(ctx.is_zero(gen.circuit.eval_field(&point).unwrap()[0]));
    }
    // divrem reconstruction
    for i in 0..1000 {
        let c = if i % 2 == 0 { &ctx } else { &ctx2 };
        let f = rand_monic(c, rng.gen_range(0..8), &mut rng);
        let g = rand_monic(c, rng.gen_range(1..5), &mut rng);
        let (q, r) = f.divrem(&g).unwrap();
        assert_eq!(q.mul(&g).add(&r), f);
    }
    // Frobenius additivity
    for i in 0..1000 {
        let c = if i % 2 == 0 { &ctx } else { &ctx2 };
        let p = c.characteristic();
        let a = c.rand(&mut rng);
        let b = c.rand(&mut rng);
        assert_eq!(c.pow(c.add(a, b), p), c.add(c.pow(a, p), c.pow(b, p)));
    }
    println!(
        "ACCEPT-8 PASS oracle self-consistency: 4 x 1000 checks, 0 failures ({:.1?})",
        t0.elapsed()
    );
}

/// Signed-coefficient convention sanity shared by the suites above.
#[test]
fn acceptance_support_coeff_convention() {
    let ctx = f10007();
    let mut rng = ChaCha8Rng::seed_from_u64(9009);
    let ring = FieldRing(ctx.clone());
    for _ in 0..200 {
        let deg = rng.gen_range(1..6);
        let roots: Vec<_> = (0..deg).map(|_| ctx.rand(&mut rng)).collect();
        let f = UniPoly::from_roots(&ctx, &roots);
        let signed = CoeffConvention::to_signed(&f).unwrap();
        for (r, &s) in signed.iter().enumerate() {
            assert_eq!(s, esym_eval(&ring, &roots, r + 1).unwrap());
        }
        assert_eq!(CoeffConvention::from_signed(&ctx, &signed), f);
        // binomial consistency keeps Lucas reduction honest
        let n = rng.gen_range(0..60u64);
        let k = rng.gen_range(0..=n);
        let _ = binomial_in_field(&ctx, n, k);
    }
    // esym gadget vs oracle spot check
    for m in 1..=6usize {
        for r in 0..=m {
            let g = esym_gadget(&ctx, m, r).unwrap();
            let vals: Vec<_> = (0..m).map(|_| ctx.rand(&mut rng)).collect();
            assert_eq!(
                g.eval_field(&vals).unwrap()[0],
                esym_eval(&ring, &vals, r).unwrap()
            );
        }
    }
}
