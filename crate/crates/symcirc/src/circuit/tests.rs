use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::polyring::{TruncMV, TruncRing, UniSeriesRing};

fn f7() -> FieldCtx {
    FieldCtx::prime(7).unwrap()
}
fn fbig() -> FieldCtx {
    FieldCtx::prime(10007).unwrap()
}

/// x * y + 1
fn xy_plus_one(ctx: &FieldCtx) -> Circuit {
    let mut b = Builder::new(ctx);
    let x = b.input("x", None);
    let y = b.input("y", None);
    let m = b.mul(vec![x, y]);
    let one = b.int(1);
    let out = b.add(vec![m, one]);
    b.finish(vec![out])
}

#[test]
fn eval_examples() {
    let ctx = f7();
    let c = xy_plus_one(&ctx);
    // (2, 3) -> 7 = 0 over F_7
    let v = c
        .eval_field(&[ctx.from_int(2), ctx.from_int(3)])
        .unwrap();
    assert!(ctx.is_zero(v[0]));

    // x -> z, y -> z gives z^2 + 1 in F_7[z]
    let ring = UniSeriesRing::new(ctx.clone(), None);
    let z = ring.var();
    let out = c
        .eval(&ring, &[Val::R(z.clone()), Val::R(z)])
        .unwrap();
    assert_eq!(
        out[0],
        vec![ctx.one(), ctx.zero(), ctx.one()]
    );

    // constant circuit with empty assignment
    let mut b = Builder::new(&ctx);
    let five = b.int(5);
    let c5 = b.finish(vec![five]);
    assert_eq!(c5.eval_field(&[]).unwrap()[0], ctx.from_int(5));

    // missing input reported by name
    assert_eq!(
        xy_plus_one(&ctx).eval_field(&[ctx.one()]),
        Err(Error::MissingInput("y".into()))
    );
}

#[test]
fn stats_examples() {
    let ctx = f7();
    // single Add of 5 inputs: gates 1, wires 5, depth 1
    let mut b = Builder::new(&ctx);
    let ins: Vec<u32> = (0..5).map(|i| b.input(&format!("x{i}"), None)).collect();
    let a = b.add(ins);
    let c = b.finish(vec![a]);
    assert_eq!(
        c.stats(),
        CircuitStats {
            gates: 1,
            wires: 5,
            depth: 1
        }
    );

    // Mul(Add(x, y), Add(x, y)) with the Add shared: gates 2, depth 2
    let mut b = Builder::new(&ctx);
    let x = b.input("x", None);
    let y = b.input("y", None);
    let s1 = b.add(vec![x, y]);
    let s2 = b.add(vec![x, y]); // hash-consed to s1
    assert_eq!(s1, s2);
    let m = b.mul(vec![s1, s2]);
    let c = b.finish(vec![m]);
    assert_eq!(
        c.stats(),
        CircuitStats {
            gates: 2,
            wires: 4,
            depth: 2
        }
    );

    // input passthrough has depth 0
    let mut b = Builder::new(&ctx);
    let x = b.input("x", None);
    let c = b.finish(vec![x]);
    assert_eq!(c.stats().depth, 0);
}

#[test]
fn depth_invariant_under_topological_reordering() {
    let ctx = f7();
    let mut b = Builder::new(&ctx);
    let x = b.input("x", None);
    let y = b.input("y", None);
    let s = b.add(vec![x, y]);
    let m = b.mul(vec![s, x]);
    let t = b.add(vec![m, y]);
    let c = b.finish(vec![t]);
    let baseline = c.stats();

    // rebuild with an alternative valid topological order: emit y's path first
    let core = &c.core;
    let order: Vec<u32> = vec![1, 0, 2, 3, 4]; // swap the two input gates
    let mut pos = vec![0u32; core.gates.len()];
    for (newi, &oldi) in order.iter().enumerate() {
        pos[oldi as usize] = newi as u32;
    }
    let mut gates = Vec::new();
    let mut args = Vec::new();
    for &oldi in &order {
        let g = core.gates[oldi as usize];
        gates.push(match g {
            Gate::Input(i) => Gate::Input(i),
            Gate::Const(i) => Gate::Const(i),
            Gate::Add { off, len } => {
                let o = args.len() as u32;
                for &a in &core.args[off as usize..(off + len) as usize] {
                    args.push(pos[a as usize]);
                }
                Gate::Add { off: o, len }
            }
            Gate::Mul { off, len } => {
                let o = args.len() as u32;
                for &a in &core.args[off as usize..(off + len) as usize] {
                    args.push(pos[a as usize]);
                }
                Gate::Mul { off: o, len }
            }
        });
    }
    let reordered = Circuit {
        core: Arc::new(CircuitCore::new(
            core.ctx.clone(),
            core.inputs.clone(),
            core.consts.clone(),
            gates,
            args,
        )),
        outputs: c.outputs.iter().map(|&o| pos[o as usize]).collect(),
        layers: Vec::new(),
    };
    assert_eq!(reordered.stats(), baseline);
}

#[test]
fn substitute_shares_plugged_circuits() {
    let ctx = f7();
    // x * y with both inputs plugged by the same a + b circuit
    let mut b = Builder::new(&ctx);
    let x = b.input("x", None);
    let y = b.input("y", None);
    let m = b.mul(vec![x, y]);
    let c = b.finish(vec![m]);
    let before = c.stats().gates;

    let mut pb = Builder::new(&ctx);
    let a = pb.input("a", None);
    let bb = pb.input("b", None);
    let s = pb.add(vec![a, bb]);
    let plug = pb.finish(vec![s]);

    let mut plugs = HashMap::new();
    plugs.insert("x".to_string(), plug.clone());
    plugs.insert("y".to_string(), plug.clone());
    let composed = c.substitute(&plugs).unwrap();
    // the shared Add instance adds exactly one gate
    assert_eq!(composed.stats().gates, before + 1);

    // substituting identity circuits is evaluation-equivalent
    let mut ib = Builder::new(&ctx);
    let xi = ib.input("x", None);
    let idx = ib.add(vec![xi]);
    let id_x = ib.finish(vec![idx]);
    let mut ib = Builder::new(&ctx);
    let yi = ib.input("y", None);
    let idy = ib.add(vec![yi]);
    let id_y = ib.finish(vec![idy]);
    let mut plugs = HashMap::new();
    plugs.insert("x".to_string(), id_x);
    plugs.insert("y".to_string(), id_y);
    let c2 = c.substitute(&plugs).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..20 {
        let pt = [ctx.rand(&mut rng), ctx.rand(&mut rng)];
        assert_eq!(c.eval_field(&pt).unwrap(), c2.eval_field(&pt).unwrap());
    }
}

#[test]
fn syntactic_degree_examples() {
    let ctx = f7();
    // (x + y) * (x + y) grouped {x} -> 2
    let mut b = Builder::new(&ctx);
    let x = b.input("x", Some("g"));
    let y = b.input("y", None);
    let s = b.add(vec![x, y]);
    let m = b.mul(vec![s, s]);
    let c = b.finish(vec![m]);
    assert_eq!(c.syntactic_degree(&InputSel::group("g")), 2);
    assert_eq!(c.syntactic_degree(&InputSel::All), 2);

    // constants have degree 0
    let mut b = Builder::new(&ctx);
    let k = b.int(3);
    let c = b.finish(vec![k]);
    assert_eq!(c.syntactic_degree(&InputSel::All), 0);

    // Mul of k copies of x -> k
    let mut b = Builder::new(&ctx);
    let x = b.input("x", None);
    let m = b.mul(vec![x; 6]);
    let c = b.finish(vec![m]);
    assert_eq!(c.syntactic_degree(&InputSel::name("x")), 6);
}

fn random_circuit(ctx: &FieldCtx, rng: &mut impl Rng) -> Circuit {
    let mut b = Builder::new(ctx);
    let nin = rng.gen_range(1..4usize);
    let mut pool: Vec<u32> = (0..nin)
        .map(|i| b.input(&format!("x{i}"), Some("g")))
        .collect();
    for _ in 0..rng.gen_range(1..8usize) {
        let fan = rng.gen_range(1..4usize);
        let args: Vec<u32> = (0..fan)
            .map(|_| pool[rng.gen_range(0..pool.len())])
            .collect();
        let id = if rng.gen_bool(0.5) {
            b.add(args)
        } else {
            // keep syntactic degrees small
            let mut args = args;
            args.truncate(2);
            b.mul(args)
        };
        pool.push(id);
    }
    if rng.gen_bool(0.3) {
        let c = ctx.rand(rng);
        let k = b.constant(c);
        pool.push(k);
    }
    let out = *pool.last().unwrap();
    b.finish(vec![out])
}

#[test]
fn syntactic_degree_dominates_true_degree() {
    let ctx = fbig();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let c = random_circuit(&ctx, &mut rng);
        let n = c.inputs().len();
        let bound = c.syntactic_degree(&InputSel::All);
        let ring = TruncRing::new(ctx.clone(), n, TruncMV::NO_CAP);
        let assign: Vec<Val<TruncRing>> =
            (0..n).map(|i| Val::R(ring.var(i))).collect();
        let sym = c.eval(&ring, &assign).unwrap();
        assert!(sym[0].total_degree() <= bound);
    }
}

#[test]
fn eval_is_ring_homomorphism_gatewise() {
    // spot-check gate-local identities on random assignments: the value of
    // an Add/Mul gate equals the ring op applied to its argument values
    let ctx = f7();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..50 {
        let a = ctx.rand(&mut rng);
        let b_ = ctx.rand(&mut rng);
        let c_ = ctx.rand(&mut rng);
        let mut b = Builder::new(&ctx);
        let x = b.input("x", None);
        let y = b.input("y", None);
        let z = b.input("z", None);
        let s = b.add(vec![x, y, z]);
        let m = b.mul(vec![x, y, z]);
        let c = b.finish(vec![s, m]);
        let v = c.eval_field(&[a, b_, c_]).unwrap();
        assert_eq!(v[0], ctx.add(ctx.add(a, b_), c_));
        assert_eq!(v[1], ctx.mul(ctx.mul(a, b_), c_));
    }
}

#[test]
fn serialization_roundtrip_and_errors() {
    let ctx = FieldCtx::extension(2, 4, None).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for _ in 0..20 {
        let c = random_circuit(&ctx, &mut rng);
        let json = c.serialize_json();
        let back = Circuit::deserialize_json(&json).unwrap();
        assert_eq!(back.serialize_json(), json);
        // structural identity: same evaluation everywhere
        for _ in 0..10 {
            let pt: Vec<FieldElem> =
                (0..c.inputs().len()).map(|_| ctx.rand(&mut rng)).collect();
            assert_eq!(c.eval_field(&pt).unwrap(), back.eval_field(&pt).unwrap());
        }
    }

    let c = xy_plus_one(&f7());
    let json = c.serialize_json();
    // truncation breaks parsing
    assert!(matches!(
        Circuit::deserialize_json(&json[..json.len() / 2]),
        Err(Error::ParseError { .. })
    ));
    // version mismatch
    let bumped = json.replace("\"version\": 1", "\"version\": 2");
    assert!(matches!(
        Circuit::deserialize_json(&bumped),
        Err(Error::ParseError { .. })
    ));
    // forward references are rejected
    let bad = r#"{"version":1,"field":"7","inputs":[{"name":"x"}],
        "gates":[{"op":"add","args":[1]},{"op":"in","index":0}],"outputs":[0]}"#;
    assert!(matches!(
        Circuit::deserialize_json(bad),
        Err(Error::ParseError { .. })
    ));
}

/// Builds a small layered circuit: core = (x + y)^2 * x with a layer
/// extracting the homogeneous parts of degree <= cap in {x}.
fn layered_example(ctx: &FieldCtx, cap: usize) -> Circuit {
    let mut b = Builder::new(ctx);
    let x = b.input("x", Some("s"));
    let y = b.input("y", None);
    let s = b.add(vec![x, y]);
    let m = b.mul(vec![s, s, x]);
    let base = b.finish(vec![m]);
    let plan = crate::gadgets::InterpPlan::for_degree(ctx, 3).unwrap();
    let pairs = plan.hom_le_pairs(cap);
    base.with_layer(HomLayer {
        scaled: vec![true, false],
        pairs,
        cap: Some(cap),
        plus_const: ctx.zero(),
        offsets: None,
    })
}

#[test]
fn layered_eval_and_stats_match_materialized() {
    let ctx = fbig();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for cap in 0..=3 {
        let lc = layered_example(&ctx, cap);
        let flat = lc.materialize();
        assert!(flat.layers.is_empty());
        for _ in 0..30 {
            let pt = [ctx.rand(&mut rng), ctx.rand(&mut rng)];
            assert_eq!(
                lc.eval_field(&pt).unwrap(),
                flat.eval_field(&pt).unwrap()
            );
        }
        assert_eq!(lc.stats(), flat.stats());
        // the layer caps the syntactic degree on its group
        assert_eq!(lc.syntactic_degree(&InputSel::group("s")), cap.min(3));
    }
}

#[test]
fn layered_extraction_is_correct() {
    // core computes (x + y)^2 * x; hom parts in x: deg1 y^2 x, deg2 2 x^2 y,
    // deg3 x^3
    let ctx = fbig();
    let mut rng = ChaCha8Rng::seed_from_u64(78);
    for _ in 0..20 {
        let xv = ctx.rand(&mut rng);
        let yv = ctx.rand(&mut rng);
        let lc = layered_example(&ctx, 2);
        let got = lc.eval_field(&[xv, yv]).unwrap()[0];
        // deg <= 2 part: y^2 x + 2 x^2 y
        let expect = ctx.add(
            ctx.mul(ctx.mul(yv, yv), xv),
            ctx.mul(ctx.from_int(2), ctx.mul(ctx.mul(xv, xv), yv)),
        );
        assert_eq!(got, expect);
    }
}

#[test]
fn offset_layer_matches_materialization() {
    // layers with input translation: eval and stats agree with the expansion
    let ctx = fbig();
    let mut rng = ChaCha8Rng::seed_from_u64(91);
    let mut b = Builder::new(&ctx);
    let x = b.input("x", Some("s"));
    let y = b.input("y", None);
    let s_g = b.add(vec![x, y]);
    let m = b.mul(vec![s_g, x]);
    let base = b.finish(vec![m]);
    let plan = crate::gadgets::InterpPlan::for_degree(&ctx, 2).unwrap();
    let lc = base.with_layer(HomLayer {
        scaled: vec![true, false],
        pairs: plan.hom_le_pairs(1),
        cap: Some(1),
        plus_const: ctx.from_int(3),
        offsets: Some(vec![ctx.from_int(7), ctx.zero()]),
    });
    let flat = lc.materialize();
    for _ in 0..30 {
        let pt = [ctx.rand(&mut rng), ctx.rand(&mut rng)];
        assert_eq!(lc.eval_field(&pt).unwrap(), flat.eval_field(&pt).unwrap());
    }
    assert_eq!(lc.stats(), flat.stats());
}

#[test]
fn ratio_circuit_rejects_zero_denominator() {
    let ctx = f7();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let c = xy_plus_one(&ctx);
    let mut b = Builder::new(&ctx);
    let x = b.input("x", None);
    let zero = b.int(0);
    let z = b.mul(vec![zero, x]);
    let zc = b.finish(vec![z]);
    assert!(RatioCircuit::new(c.clone(), zc, &mut rng).is_err());
    assert!(RatioCircuit::new(c.clone(), c, &mut rng).is_ok());
}
