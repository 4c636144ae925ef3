//! The arithmetic-circuit IR: a DAG of unbounded fan-in add/multiply gates
//! over field constants and named inputs, with resource metrics,
//! ring-generic evaluation, composition and serialization.
//!
//! Circuits are immutable after construction. The [`Builder`] hash-conses
//! structurally identical gates, which keeps the interpolation-heavy
//! constructions at manageable size; consing merges only identical subtrees,
//! so it never changes the depth of anything.
//!
//! Large extraction steps (the outermost interpolation of the decomposition
//! constructions) are carried as [`HomLayer`]s on top of a shared core
//! instead of materialized copies: a layer stores the scaling points and
//! recovery weights of one homogeneous-part extraction, the evaluator
//! streams over the points, and [`Circuit::materialize`] expands the layer
//! into plain gates when the result is small enough to want as a flat DAG.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldCtx, FieldElem};
use crate::polyring::Ring;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDecl {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gate {
    Input(u32),
    Const(u32),
    Add { off: u32, len: u32 },
    Mul { off: u32, len: u32 },
}

#[derive(Debug)]
pub struct CircuitCore {
    pub ctx: FieldCtx,
    pub inputs: Vec<InputDecl>,
    pub consts: Vec<FieldElem>,
    pub gates: Vec<Gate>,
    pub args: Vec<u32>,
    /// run-length-encoded arguments, built lazily for the scalar fast path
    compiled: std::sync::OnceLock<CompiledArgs>,
}

/// Arguments with repeated factors collapsed to `(gate id, count)` runs;
/// the sorted canonical order guarantees repeats are contiguous.
#[derive(Debug)]
struct CompiledArgs {
    runs: Vec<(u32, u32)>,
    /// per gate: span into `runs` (empty for inputs/constants)
    spans: Vec<(u32, u32)>,
}

impl CircuitCore {
    pub(crate) fn new(
        ctx: FieldCtx,
        inputs: Vec<InputDecl>,
        consts: Vec<FieldElem>,
        gates: Vec<Gate>,
        args: Vec<u32>,
    ) -> CircuitCore {
        CircuitCore {
            ctx,
            inputs,
            consts,
            gates,
            args,
            compiled: std::sync::OnceLock::new(),
        }
    }

    fn compiled(&self) -> &CompiledArgs {
        self.compiled.get_or_init(|| {
            let mut runs = Vec::new();
            let mut spans = Vec::with_capacity(self.gates.len());
            for g in &self.gates {
                match *g {
                    Gate::Input(_) | Gate::Const(_) => spans.push((0, 0)),
                    Gate::Add { off, len } | Gate::Mul { off, len } => {
                        let start = runs.len() as u32;
                        let ids = &self.args[off as usize..(off + len) as usize];
                        let mut k = 0usize;
                        while k < ids.len() {
                            let id = ids[k];
                            let mut j = k + 1;
                            while j < ids.len() && ids[j] == id {
                                j += 1;
                            }
                            runs.push((id, (j - k) as u32));
                            k = j;
                        }
                        spans.push((start, runs.len() as u32 - start));
                    }
                }
            }
            CompiledArgs { runs, spans }
        })
    }
}

/// One deferred interpolation layer over the core: for scaling points and
/// recovery weights `(a_j, w_j)`, the layer computes (per output)
/// `plus_const + sum_j w_j * core(a_j * x_S, x_rest)` where `x_S` ranges over
/// the inputs selected by `scaled`.
#[derive(Clone, Debug)]
pub struct HomLayer {
    /// mask over the core's inputs: true = scaled by the layer
    pub scaled: Vec<bool>,
    /// (scaling point, recovery weight) pairs
    pub pairs: Vec<(FieldElem, FieldElem)>,
    /// certified degree bound in the scaled group after extraction
    pub cap: Option<usize>,
    /// constant folded into the final sum
    pub plus_const: FieldElem,
    /// per-input translation applied before scaling: a scaled input `x_i`
    /// enters the core as `a_j * (x_i - offsets[i])`; `None` means no
    /// translation anywhere
    pub offsets: Option<Vec<FieldElem>>,
}

/// An arithmetic circuit: shared gate core, output gate list, and deferred
/// extraction layers. Several circuits may share one core with different
/// outputs (the piece-wise families do).
#[derive(Clone, Debug)]
pub struct Circuit {
    pub core: Arc<CircuitCore>,
    pub outputs: Vec<u32>,
    pub layers: Vec<HomLayer>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitStats {
    pub gates: u64,
    pub wires: u64,
    pub depth: u64,
}

/// Input selector used by gadgets and metrics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InputSel {
    All,
    Group(String),
    Name(String),
}

impl InputSel {
    pub fn group(g: &str) -> InputSel {
        InputSel::Group(g.to_string())
    }
    pub fn name(n: &str) -> InputSel {
        InputSel::Name(n.to_string())
    }

    pub fn mask(&self, inputs: &[InputDecl]) -> Vec<bool> {
        inputs
            .iter()
            .map(|d| match self {
                InputSel::All => true,
                InputSel::Group(g) => d.group.as_deref() == Some(g.as_str()),
                InputSel::Name(n) => d.name == *n,
            })
            .collect()
    }
}

// ---------------------------------------------------------------------------
// Builder
// ---------------------------------------------------------------------------

#[derive(Clone, PartialEq, Eq, Hash)]
enum GateKey {
    Input(u32),
    Const(u64),
    Add(Box<[u32]>),
    Mul(Box<[u32]>),
}

pub struct Builder {
    ctx: FieldCtx,
    inputs: Vec<InputDecl>,
    consts: Vec<FieldElem>,
    const_ids: HashMap<u64, u32>,
    gates: Vec<Gate>,
    args: Vec<u32>,
    cons: HashMap<GateKey, u32>,
}

impl Builder {
    pub fn new(ctx: &FieldCtx) -> Builder {
        Builder {
            ctx: ctx.clone(),
            inputs: Vec::new(),
            consts: Vec::new(),
            const_ids: HashMap::new(),
            gates: Vec::new(),
            args: Vec::new(),
            cons: HashMap::new(),
        }
    }

    pub fn ctx(&self) -> FieldCtx {
        self.ctx.clone()
    }

    /// Declares (or reuses) a named input; returns its gate id.
    pub fn input(&mut self, name: &str, group: Option<&str>) -> u32 {
        if let Some(idx) = self.inputs.iter().position(|d| d.name == name) {
            return self.intern(GateKey::Input(idx as u32), Gate::Input(idx as u32));
        }
        self.inputs.push(InputDecl {
            name: name.to_string(),
            group: group.map(str::to_string),
        });
        let idx = (self.inputs.len() - 1) as u32;
        self.intern(GateKey::Input(idx), Gate::Input(idx))
    }

    pub fn constant(&mut self, c: FieldElem) -> u32 {
        let packed = self.ctx.to_packed(c);
        if let Some(&id) = self.cons.get(&GateKey::Const(packed)) {
            return id;
        }
        let cid = match self.const_ids.get(&packed) {
            Some(&id) => id,
            None => {
                self.consts.push(c);
                let id = (self.consts.len() - 1) as u32;
                self.const_ids.insert(packed, id);
                id
            }
        };
        self.intern(GateKey::Const(packed), Gate::Const(cid))
    }

    pub fn int(&mut self, n: i64) -> u32 {
        let c = self.ctx.from_int(n);
        self.constant(c)
    }

    /// Unbounded fan-in addition; args are canonically sorted for consing.
    pub fn add(&mut self, mut args: Vec<u32>) -> u32 {
        assert!(!args.is_empty(), "Add fan-in must be >= 1");
        args.sort_unstable();
        if let Some(&id) = self.cons.get(&GateKey::Add(args.clone().into_boxed_slice())) {
            return id;
        }
        let off = self.args.len() as u32;
        let len = args.len() as u32;
        let key = GateKey::Add(args.clone().into_boxed_slice());
        self.args.extend_from_slice(&args);
        let id = self.push(Gate::Add { off, len });
        self.cons.insert(key, id);
        id
    }

    /// Unbounded fan-in multiplication; args sorted, so repeated factors sit
    /// in runs (the evaluator exponentiates runs directly).
    pub fn mul(&mut self, mut args: Vec<u32>) -> u32 {
        assert!(!args.is_empty(), "Mul fan-in must be >= 1");
        args.sort_unstable();
        if let Some(&id) = self.cons.get(&GateKey::Mul(args.clone().into_boxed_slice())) {
            return id;
        }
        let off = self.args.len() as u32;
        let len = args.len() as u32;
        let key = GateKey::Mul(args.clone().into_boxed_slice());
        self.args.extend_from_slice(&args);
        let id = self.push(Gate::Mul { off, len });
        self.cons.insert(key, id);
        id
    }

    fn push(&mut self, g: Gate) -> u32 {
        self.gates.push(g);
        (self.gates.len() - 1) as u32
    }

    fn intern(&mut self, key: GateKey, gate: Gate) -> u32 {
        if let Some(&id) = self.cons.get(&key) {
            return id;
        }
        let id = self.push(gate);
        self.cons.insert(key, id);
        id
    }

    /// `a - b` as `a + (-1) * b`; scalar constants are free leaves.
    pub fn sub(&mut self, a: u32, b: u32) -> u32 {
        let m1 = self.int(-1);
        let nb = self.mul(vec![m1, b]);
        self.add(vec![a, nb])
    }

    /// `c * x^n` as a single Mul gate of `n` copies (depth 1 over `x`).
    pub fn scaled_power(&mut self, c: Option<FieldElem>, x: u32, n: usize) -> u32 {
        let mut args = vec![x; n.max(1)];
        if let Some(c) = c {
            let cid = self.constant(c);
            args.push(cid);
        }
        self.mul(args)
    }

    /// Splices a flat circuit into this builder, mapping its inputs through
    /// `input_map`; returns the images of its outputs. Structure is shared
    /// through consing, so repeated instantiation is cheap.
    pub fn instantiate(&mut self, other: &Circuit, input_map: &[u32]) -> Vec<u32> {
        assert!(other.layers.is_empty(), "materialize before instantiating");
        let core = &other.core;
        assert_eq!(input_map.len(), core.inputs.len());
        let mut map: Vec<u32> = Vec::with_capacity(core.gates.len());
        for g in core.gates.iter() {
            let id = match *g {
                Gate::Input(i) => input_map[i as usize],
                Gate::Const(c) => self.constant(core.consts[c as usize]),
                Gate::Add { off, len } => {
                    let xs: Vec<u32> = core.args[off as usize..(off + len) as usize]
                        .iter()
                        .map(|&a| map[a as usize])
                        .collect();
                    self.add(xs)
                }
                Gate::Mul { off, len } => {
                    let xs: Vec<u32> = core.args[off as usize..(off + len) as usize]
                        .iter()
                        .map(|&a| map[a as usize])
                        .collect();
                    self.mul(xs)
                }
            };
            map.push(id);
        }
        other.outputs.iter().map(|&o| map[o as usize]).collect()
    }

    pub fn finish(self, outputs: Vec<u32>) -> Circuit {
        Circuit {
            core: Arc::new(CircuitCore::new(
                self.ctx,
                self.inputs,
                self.consts,
                self.gates,
                self.args,
            )),
            outputs,
            layers: Vec::new(),
        }
    }
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

/// A value during mixed evaluation: still a field scalar, or already promoted
/// into the target ring. Gates over pure scalars stay in the field, so the
/// scalar-only regions of a circuit evaluate at field speed even when some
/// inputs are ring elements.
pub enum Val<R: Ring> {
    F(FieldElem),
    R(R::Elem),
}

// manual impls: the derives would demand `R: Clone + Debug` although only
// the element type matters
impl<R: Ring> Clone for Val<R> {
    fn clone(&self) -> Self {
        match self {
            Val::F(c) => Val::F(*c),
            Val::R(v) => Val::R(v.clone()),
        }
    }
}

impl<R: Ring> std::fmt::Debug for Val<R> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Val::F(c) => write!(f, "F({c:?})"),
            Val::R(v) => write!(f, "R({v:?})"),
        }
    }
}

impl<R: Ring> Val<R> {
    pub fn into_ring(self, ring: &R) -> R::Elem {
        match self {
            Val::F(c) => ring.embed(c),
            Val::R(v) => v,
        }
    }
}

impl CircuitCore {
    pub(crate) fn eval_gates<R: Ring>(
        &self,
        ring: &R,
        assign: &[Val<R>],
        outputs: &[u32],
    ) -> Vec<Val<R>> {
        let ctx = &self.ctx;
        let mut vals: Vec<Val<R>> = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            let v = match *g {
                Gate::Input(i) => assign[i as usize].clone(),
                Gate::Const(c) => Val::F(self.consts[c as usize]),
                Gate::Add { off, len } => {
                    let ids = &self.args[off as usize..(off + len) as usize];
                    let mut facc = ctx.zero();
                    let mut racc: Option<R::Elem> = None;
                    for &a in ids {
                        match &vals[a as usize] {
                            Val::F(c) => facc = ctx.add(facc, *c),
                            Val::R(v) => {
                                racc = Some(match racc {
                                    None => v.clone(),
                                    Some(acc) => ring.add(&acc, v),
                                })
                            }
                        }
                    }
                    match racc {
                        None => Val::F(facc),
                        Some(acc) => {
                            if ctx.is_zero(facc) {
                                Val::R(acc)
                            } else {
                                Val::R(ring.add(&acc, &ring.embed(facc)))
                            }
                        }
                    }
                }
                Gate::Mul { off, len } => {
                    let ids = &self.args[off as usize..(off + len) as usize];
                    // exponentiate runs of repeated args instead of
                    // multiplying copy by copy
                    let mut facc = ctx.one();
                    let mut racc: Option<R::Elem> = None;
                    let mut i = 0usize;
                    while i < ids.len() {
                        let mut j = i + 1;
                        while j < ids.len() && ids[j] == ids[i] {
                            j += 1;
                        }
                        let e = (j - i) as u64;
                        match &vals[ids[i] as usize] {
                            Val::F(c) => {
                                let p = if e == 1 { *c } else { ctx.pow(*c, e) };
                                facc = ctx.mul(facc, p);
                            }
                            Val::R(v) => {
                                let p = if e == 1 { v.clone() } else { ring.pow(v, e) };
                                racc = Some(match racc {
                                    None => p,
                                    Some(acc) => ring.mul(&acc, &p),
                                });
                            }
                        }
                        i = j;
                    }
                    match racc {
                        None => Val::F(facc),
                        Some(acc) => Val::R(ring.scale(&acc, facc)),
                    }
                }
            };
            vals.push(v);
        }
        outputs.iter().map(|&o| vals[o as usize].clone()).collect()
    }
}

impl Circuit {
    pub fn ctx(&self) -> &FieldCtx {
        &self.core.ctx
    }

    pub fn inputs(&self) -> &[InputDecl] {
        &self.core.inputs
    }

    pub fn num_outputs(&self) -> usize {
        self.outputs.len()
    }

    /// A view of one output over the shared core (no gate copying).
    pub fn select_output(&self, i: usize) -> Circuit {
        Circuit {
            core: self.core.clone(),
            outputs: vec![self.outputs[i]],
            layers: self.layers.clone(),
        }
    }

    pub fn input_index(&self, name: &str) -> Option<usize> {
        self.core.inputs.iter().position(|d| d.name == name)
    }

    /// Ring-generic evaluation; the assignment is positional over
    /// [`Circuit::inputs`].
    pub fn eval<R: Ring>(&self, ring: &R, assign: &[Val<R>]) -> Result<Vec<R::Elem>> {
        if assign.len() != self.core.inputs.len() {
            let missing = self
                .core
                .inputs
                .get(assign.len())
                .map(|d| d.name.clone())
                .unwrap_or_else(|| "?".into());
            return Err(Error::MissingInput(missing));
        }
        Ok(self
            .eval_layered(ring, assign, self.layers.len())
            .into_iter()
            .map(|v| v.into_ring(ring))
            .collect())
    }

    fn eval_layered<R: Ring>(&self, ring: &R, assign: &[Val<R>], depth: usize) -> Vec<Val<R>> {
        let ctx = self.ctx();
        if depth == 0 {
            return self.core.eval_gates(ring, assign, &self.outputs);
        }
        let layer = &self.layers[depth - 1];
        let mut acc: Vec<Val<R>> = vec![Val::F(layer.plus_const); self.outputs.len()];
        let mut scaled: Vec<Val<R>> = assign.to_vec();
        for &(point, weight) in &layer.pairs {
            for (i, v) in assign.iter().enumerate() {
                scaled[i] = if layer.scaled[i] {
                    let shifted: Val<R> = match layer.offsets.as_ref() {
                        None => v.clone(),
                        Some(offs) => match v {
                            Val::F(c) => Val::F(ctx.sub(*c, offs[i])),
                            Val::R(r) => Val::R(ring.sub(r, &ring.embed(offs[i]))),
                        },
                    };
                    match shifted {
                        Val::F(c) => Val::F(ctx.mul(c, point)),
                        Val::R(r) => Val::R(ring.scale(&r, point)),
                    }
                } else {
                    v.clone()
                };
            }
            let outs = self.eval_layered(ring, &scaled, depth - 1);
            for (a, o) in acc.iter_mut().zip(outs) {
                let weighted: Val<R> = match o {
                    Val::F(c) => Val::F(ctx.mul(c, weight)),
                    Val::R(r) => Val::R(ring.scale(&r, weight)),
                };
                *a = match (a.clone(), weighted) {
                    (Val::F(x), Val::F(y)) => Val::F(ctx.add(x, y)),
                    (Val::F(x), Val::R(y)) => Val::R(ring.add(&ring.embed(x), &y)),
                    (Val::R(x), Val::F(y)) => Val::R(ring.add(&x, &ring.embed(y))),
                    (Val::R(x), Val::R(y)) => Val::R(ring.add(&x, &y)),
                };
            }
        }
        acc
    }

    /// Field-valued evaluation shortcut.
    pub fn eval_field(&self, point: &[FieldElem]) -> Result<Vec<FieldElem>> {
        let ring = crate::polyring::FieldRing(self.ctx().clone());
        let assign: Vec<Val<crate::polyring::FieldRing>> =
            point.iter().map(|&c| Val::F(c)).collect();
        self.eval(&ring, &assign)
    }

    /// Gate count, wire count and depth. Inputs and constants are free
    /// leaves: they count as neither gates nor wires and have depth 0.
    /// A layer is accounted as its materialization would be: the cone
    /// depending on scaled inputs is copied per point, everything else is
    /// shared (mirroring the builder's consing).
    pub fn stats(&self) -> CircuitStats {
        if self.layers.len() > 1 {
            // stacked layers never occur on the hot paths; expand instead of
            // compounding the accounting
            return self.materialize().stats();
        }
        let core = &self.core;
        let layer = self.layers.first();
        let scaled =
            |idx: u32| -> bool { layer.map_or(false, |l| l.scaled[idx as usize]) };
        // translation adds one more level under the scale gates
        let scale_depth: u64 = match layer {
            Some(l) if l.offsets.is_some() => 2,
            Some(_) => 1,
            None => 0,
        };
        let mut depth = vec![0u64; core.gates.len()];
        for (i, g) in core.gates.iter().enumerate() {
            depth[i] = match *g {
                Gate::Input(idx) => {
                    if scaled(idx) {
                        scale_depth
                    } else {
                        0
                    }
                }
                Gate::Const(_) => 0,
                Gate::Add { off, len } | Gate::Mul { off, len } => {
                    1 + core.args[off as usize..(off + len) as usize]
                        .iter()
                        .map(|&a| depth[a as usize])
                        .max()
                        .unwrap_or(0)
                }
            };
        }
        let is_op = |g: &Gate| matches!(g, Gate::Add { .. } | Gate::Mul { .. });
        let fan_in = |g: &Gate| match *g {
            Gate::Add { len, .. } | Gate::Mul { len, .. } => len as u64,
            _ => 0,
        };
        let mut gates: u64 = core.gates.iter().filter(|g| is_op(g)).count() as u64;
        let mut wires: u64 = core.gates.iter().map(fan_in).sum();
        let mut d = self
            .outputs
            .iter()
            .map(|&o| depth[o as usize])
            .max()
            .unwrap_or(0);

        if let Some(layer) = layer {
            let mut dep = vec![false; core.gates.len()];
            let mut used_scaled_inputs = 0u64;
            for (i, g) in core.gates.iter().enumerate() {
                dep[i] = match *g {
                    Gate::Input(idx) => {
                        let s = scaled(idx);
                        if s {
                            used_scaled_inputs += 1;
                        }
                        s
                    }
                    Gate::Const(_) => false,
                    Gate::Add { off, len } | Gate::Mul { off, len } => core.args
                        [off as usize..(off + len) as usize]
                        .iter()
                        .any(|&a| dep[a as usize]),
                };
            }
            let points = layer.pairs.len() as u64;
            let dep_gates: u64 = core
                .gates
                .iter()
                .enumerate()
                .filter(|(i, g)| is_op(g) && dep[*i])
                .count() as u64;
            let dep_wires: u64 = core
                .gates
                .iter()
                .enumerate()
                .filter(|&(i, _)| dep[i])
                .map(|(_, g)| fan_in(g))
                .sum();
            let outs = self.outputs.len() as u64;
            let has_plus = u64::from(!self.ctx().is_zero(layer.plus_const));
            // translation gates are shared across points
            let offset_gates = if layer.offsets.is_some() {
                used_scaled_inputs
            } else {
                0
            };
            gates = (gates - dep_gates)
                + offset_gates
                + points * (used_scaled_inputs + dep_gates + outs)
                + outs;
            wires = (wires - dep_wires)
                + 2 * offset_gates
                + points * (2 * used_scaled_inputs + dep_wires + 2 * outs)
                + outs * (points + has_plus);
            d += 2;
        }
        CircuitStats {
            gates,
            wires,
            depth: d,
        }
    }

    /// Structural degree bound in the selected inputs: an `Input` in the
    /// selection counts 1, `Add` takes the max, `Mul` the sum. Extraction
    /// layers cap the bound on their own group but never raise it.
    pub fn syntactic_degree(&self, sel: &InputSel) -> usize {
        let core = &self.core;
        let mask = sel.mask(&core.inputs);
        let mut deg = vec![0usize; core.gates.len()];
        for (i, g) in core.gates.iter().enumerate() {
            deg[i] = match *g {
                Gate::Input(idx) => usize::from(mask[idx as usize]),
                Gate::Const(_) => 0,
                Gate::Add { off, len } => core.args[off as usize..(off + len) as usize]
                    .iter()
                    .map(|&a| deg[a as usize])
                    .max()
                    .unwrap_or(0),
                Gate::Mul { off, len } => core.args[off as usize..(off + len) as usize]
                    .iter()
                    .map(|&a| deg[a as usize])
                    .fold(0usize, usize::saturating_add),
            };
        }
        let mut d = self
            .outputs
            .iter()
            .map(|&o| deg[o as usize])
            .max()
            .unwrap_or(0);
        for layer in &self.layers {
            if let Some(cap) = layer.cap {
                let contained = mask.iter().zip(&layer.scaled).all(|(&m, &s)| !m || s);
                if contained {
                    d = d.min(cap);
                }
            }
        }
        d
    }

    /// Pushes an extraction layer (shared core, no materialization).
    pub fn with_layer(mut self, layer: HomLayer) -> Circuit {
        assert_eq!(layer.scaled.len(), self.core.inputs.len());
        self.layers.push(layer);
        self
    }

    /// Renames inputs (and optionally regroups them) without touching gates.
    pub fn rename_inputs(&self, map: &HashMap<String, InputDecl>) -> Circuit {
        let mut core = CircuitCore::new(
            self.core.ctx.clone(),
            self.core
                .inputs
                .iter()
                .map(|d| map.get(&d.name).cloned().unwrap_or_else(|| d.clone()))
                .collect(),
            self.core.consts.clone(),
            self.core.gates.clone(),
            self.core.args.clone(),
        );
        debug_assert_eq!(
            {
                let mut names: Vec<&String> = core.inputs.iter().map(|d| &d.name).collect();
                names.sort();
                names.dedup();
                names.len()
            },
            core.inputs.len(),
            "renaming must keep input names distinct"
        );
        core.inputs.shrink_to_fit();
        Circuit {
            core: Arc::new(core),
            outputs: self.outputs.clone(),
            layers: self.layers.clone(),
        }
    }

    /// Expands all layers into plain gates via the builder (hash-consed), so
    /// the result is a flat DAG with identical semantics.
    pub fn materialize(&self) -> Circuit {
        if self.layers.is_empty() {
            return self.clone();
        }
        let mut b = Builder::new(self.ctx());
        let input_ids: Vec<u32> = self
            .core
            .inputs
            .iter()
            .map(|d| b.input(&d.name, d.group.as_deref()))
            .collect();
        let outs = materialize_into(&mut b, self, &input_ids);
        b.finish(outs)
    }

    /// Splices `plugs` into the inputs of `self`: input `name` is replaced by
    /// the single output of `plugs[name]`; absent names stay inputs. Each
    /// plugged circuit is instantiated once and shares structure.
    pub fn substitute(&self, plugs: &HashMap<String, Circuit>) -> Result<Circuit> {
        let me = self.materialize();
        let mut sig: Vec<InputDecl> = Vec::new();
        for p in plugs.values() {
            for d in p.inputs() {
                match sig.iter().find(|s| s.name == d.name) {
                    None => sig.push(d.clone()),
                    Some(s) if s.group == d.group => {}
                    Some(_) => return Err(Error::SignatureMismatch),
                }
            }
        }
        let mut b = Builder::new(self.ctx());
        let mut plug_outs: HashMap<String, u32> = HashMap::new();
        // instantiate plugs in the host's input order so gate numbering is
        // deterministic
        for decl in me.core.inputs.iter() {
            let Some(p) = plugs.get(&decl.name) else {
                continue;
            };
            let flat = p.materialize();
            let imap: Vec<u32> = flat
                .inputs()
                .iter()
                .map(|d| b.input(&d.name, d.group.as_deref()))
                .collect();
            let outs = b.instantiate(&flat, &imap);
            if outs.len() != 1 {
                return Err(Error::SignatureMismatch);
            }
            plug_outs.insert(decl.name.clone(), outs[0]);
        }
        let imap: Vec<u32> = me
            .core
            .inputs
            .iter()
            .map(|d| match plug_outs.get(&d.name) {
                Some(&id) => id,
                None => b.input(&d.name, d.group.as_deref()),
            })
            .collect();
        let outs = b.instantiate(&me, &imap);
        Ok(b.finish(outs))
    }
}

/// Expands `c` (with all its layers) into the builder, mapping its inputs to
/// `input_ids`; returns output gate ids.
pub(crate) fn materialize_into(b: &mut Builder, c: &Circuit, input_ids: &[u32]) -> Vec<u32> {
    fn rec(b: &mut Builder, c: &Circuit, input_ids: &[u32], depth: usize) -> Vec<u32> {
        if depth == 0 {
            let flat = Circuit {
                core: c.core.clone(),
                outputs: c.outputs.clone(),
                layers: Vec::new(),
            };
            return b.instantiate(&flat, input_ids);
        }
        let layer = &c.layers[depth - 1];
        // translation gates shared across the points
        let shifted_ids: Vec<u32> = input_ids
            .iter()
            .enumerate()
            .map(|(i, &id)| match layer.offsets.as_ref() {
                Some(offs) if layer.scaled[i] => {
                    let ctx = b.ctx();
                    let neg = b.constant(ctx.neg(offs[i]));
                    b.add(vec![id, neg])
                }
                _ => id,
            })
            .collect();
        let mut per_output: Vec<Vec<u32>> = vec![Vec::new(); c.outputs.len()];
        for &(point, weight) in &layer.pairs {
            let scaled_ids: Vec<u32> = shifted_ids
                .iter()
                .enumerate()
                .map(|(i, &id)| {
                    if layer.scaled[i] {
                        let p = b.constant(point);
                        b.mul(vec![p, id])
                    } else {
                        id
                    }
                })
                .collect();
            let outs = rec(b, c, &scaled_ids, depth - 1);
            for (o, out) in outs.into_iter().enumerate() {
                let w = b.constant(weight);
                per_output[o].push(b.mul(vec![w, out]));
            }
        }
        per_output
            .into_iter()
            .map(|mut terms| {
                if !b.ctx.is_zero(layer.plus_const) {
                    let c0 = b.constant(layer.plus_const);
                    terms.push(c0);
                }
                b.add(terms)
            })
            .collect()
    }
    rec(b, c, input_ids, c.layers.len())
}

// ---------------------------------------------------------------------------
// Serialization (JSON, version 1)
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct GateRepr {
    op: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    index: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    value: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    args: Option<Vec<u32>>,
}

#[derive(Serialize, Deserialize)]
struct CircuitRepr {
    version: u32,
    field: String,
    inputs: Vec<InputDecl>,
    gates: Vec<GateRepr>,
    outputs: Vec<u32>,
}

impl Circuit {
    /// Canonical JSON: gates in topological index order; layers are expanded
    /// first so the format stays the flat four-op form.
    pub fn serialize_json(&self) -> String {
        let flat = self.materialize();
        let core = &flat.core;
        let gates = core
            .gates
            .iter()
            .map(|g| match *g {
                Gate::Input(i) => GateRepr {
                    op: "in".into(),
                    index: Some(i),
                    value: None,
                    args: None,
                },
                Gate::Const(c) => GateRepr {
                    op: "const".into(),
                    index: None,
                    value: Some(core.ctx.to_packed(core.consts[c as usize])),
                    args: None,
                },
                Gate::Add { off, len } => GateRepr {
                    op: "add".into(),
                    index: None,
                    value: None,
                    args: Some(core.args[off as usize..(off + len) as usize].to_vec()),
                },
                Gate::Mul { off, len } => GateRepr {
                    op: "mul".into(),
                    index: None,
                    value: None,
                    args: Some(core.args[off as usize..(off + len) as usize].to_vec()),
                },
            })
            .collect();
        let field = if core.ctx.extension_degree() == 1 {
            core.ctx.spec_string()
        } else {
            // pin the defining polynomial so round-trips rebuild the exact field
            format!(
                "{}:{}",
                core.ctx.spec_string(),
                core.ctx
                    .defining_poly()
                    .iter()
                    .map(u64::to_string)
                    .collect::<Vec<_>>()
                    .join(",")
            )
        };
        let repr = CircuitRepr {
            version: 1,
            field,
            inputs: core.inputs.clone(),
            gates,
            outputs: flat.outputs.clone(),
        };
        serde_json::to_string_pretty(&repr).expect("circuit serialization cannot fail")
    }

    pub fn deserialize_json(text: &str) -> Result<Circuit> {
        let repr: CircuitRepr = serde_json::from_str(text).map_err(|e| Error::ParseError {
            at: format!("line {} column {}", e.line(), e.column()),
            msg: e.to_string(),
        })?;
        if repr.version != 1 {
            return Err(Error::ParseError {
                at: "version".into(),
                msg: format!("unsupported version {}", repr.version),
            });
        }
        let ctx = FieldCtx::parse_spec(&repr.field)?;
        let mut gates = Vec::with_capacity(repr.gates.len());
        let mut consts = Vec::new();
        let mut args = Vec::new();
        for (pos, g) in repr.gates.iter().enumerate() {
            let at = format!("gates[{pos}]");
            let gate = match g.op.as_str() {
                "in" => {
                    let i = g.index.ok_or_else(|| Error::ParseError {
                        at: at.clone(),
                        msg: "missing index".into(),
                    })?;
                    if i as usize >= repr.inputs.len() {
                        return Err(Error::ParseError {
                            at,
                            msg: format!("input index {i} out of range"),
                        });
                    }
                    Gate::Input(i)
                }
                "const" => {
                    let v = g.value.ok_or_else(|| Error::ParseError {
                        at: at.clone(),
                        msg: "missing value".into(),
                    })?;
                    if v >= ctx.cardinality() {
                        return Err(Error::ParseError {
                            at,
                            msg: format!("constant {v} out of field range"),
                        });
                    }
                    consts.push(ctx.from_packed(v));
                    Gate::Const((consts.len() - 1) as u32)
                }
                "add" | "mul" => {
                    let xs = g.args.clone().ok_or_else(|| Error::ParseError {
                        at: at.clone(),
                        msg: "missing args".into(),
                    })?;
                    if xs.is_empty() {
                        return Err(Error::ParseError {
                            at: at.clone(),
                            msg: "fan-in must be >= 1".into(),
                        });
                    }
                    for &x in &xs {
                        if x as usize >= pos {
                            return Err(Error::ParseError {
                                at: at.clone(),
                                msg: format!("arg {x} does not precede gate {pos}"),
                            });
                        }
                    }
                    let off = args.len() as u32;
                    let len = xs.len() as u32;
                    args.extend_from_slice(&xs);
                    if g.op == "add" {
                        Gate::Add { off, len }
                    } else {
                        Gate::Mul { off, len }
                    }
                }
                other => {
                    return Err(Error::ParseError {
                        at,
                        msg: format!("unknown op `{other}`"),
                    })
                }
            };
            gates.push(gate);
        }
        for &o in &repr.outputs {
            if o as usize >= gates.len() {
                return Err(Error::ParseError {
                    at: "outputs".into(),
                    msg: format!("output {o} out of range"),
                });
            }
        }
        Ok(Circuit {
            core: Arc::new(CircuitCore::new(ctx, repr.inputs, consts, gates, args)),
            outputs: repr.outputs,
            layers: Vec::new(),
        })
    }
}

// ---------------------------------------------------------------------------
// Ratio circuits and piece-wise families
// ---------------------------------------------------------------------------

/// A rational function as a pair of circuits over the same inputs.
#[derive(Clone, Debug)]
pub struct RatioCircuit {
    pub num: Circuit,
    pub den: Circuit,
}

impl RatioCircuit {
    /// Checks (Schwartz–Zippel style, 20 random points) that the denominator
    /// is not identically zero.
    pub fn new(num: Circuit, den: Circuit, rng: &mut impl rand::Rng) -> Result<RatioCircuit> {
        let ctx = den.ctx().clone();
        let n = den.inputs().len();
        let mut nonzero = false;
        for _ in 0..20 {
            let point: Vec<FieldElem> = (0..n).map(|_| ctx.rand(rng)).collect();
            if den.eval_field(&point)?.iter().any(|&v| !ctx.is_zero(v)) {
                nonzero = true;
                break;
            }
        }
        if !nonzero {
            return Err(Error::DegenerateInput(
                "denominator circuit is zero at every sampled point".into(),
            ));
        }
        Ok(RatioCircuit { num, den })
    }
}

/// A piece-wise rational circuit family: indexed computation circuits
/// `(A_k, B_k)` and test circuits `T_k`; the represented function at a point
/// is `A_r / B_r` where `r` is the largest index whose test is nonzero.
#[derive(Clone, Debug)]
pub struct PiecewiseFamily {
    /// parameter tags, e.g. the degree pair the family was built for
    pub params: Vec<(String, u64)>,
    pub tests: Vec<Circuit>,
    pub nums: Vec<Circuit>,
    pub dens: Vec<Circuit>,
    /// human-readable advice-selection rule
    pub advice_rule: String,
    /// distinct-point demand of the construction
    pub required_q: u64,
}

impl PiecewiseFamily {
    /// Maximum advice index (the circuits are indexed `0..=max_index`).
    pub fn max_index(&self) -> usize {
        self.tests.len() - 1
    }

    /// The family's depth: max depth over all member circuits.
    pub fn depth(&self) -> u64 {
        self.tests
            .iter()
            .chain(&self.nums)
            .chain(&self.dens)
            .map(|c| c.stats().depth)
            .max()
            .unwrap_or(0)
    }
}

#[cfg(test)]
mod tests;

// ---------------------------------------------------------------------------
// Specialized scalar evaluation
// ---------------------------------------------------------------------------

/// Reusable buffers for repeated scalar evaluation of flat circuits; the
/// power cache turns the repeated-factor gates of the extraction sums into
/// one multiplication each (consecutive exponents of the same gate).
#[derive(Default)]
pub struct EvalScratch {
    vals: Vec<FieldElem>,
    pow_epoch: Vec<u32>,
    pow_exp: Vec<u32>,
    pow_val: Vec<FieldElem>,
    epoch: u32,
}

impl Circuit {
    /// Field-only evaluation of a flat circuit with reusable scratch; the
    /// hot path of the streaming evaluators.
    pub fn eval_field_fast(
        &self,
        assign: &[FieldElem],
        scratch: &mut EvalScratch,
        out: &mut Vec<FieldElem>,
    ) -> Result<()> {
        assert!(self.layers.is_empty(), "fast path evaluates flat circuits");
        let core = &self.core;
        let ctx = &core.ctx;
        if assign.len() != core.inputs.len() {
            let missing = core
                .inputs
                .get(assign.len())
                .map(|d| d.name.clone())
                .unwrap_or_else(|| "?".into());
            return Err(Error::MissingInput(missing));
        }
        let n = core.gates.len();
        scratch.vals.resize(n, ctx.zero());
        if scratch.pow_epoch.len() < n {
            scratch.pow_epoch.resize(n, 0);
            scratch.pow_exp.resize(n, 0);
            scratch.pow_val.resize(n, ctx.zero());
        }
        scratch.epoch = scratch.epoch.wrapping_add(1);
        if scratch.epoch == 0 {
            scratch.pow_epoch.iter_mut().for_each(|e| *e = 0);
            scratch.epoch = 1;
        }
        let epoch = scratch.epoch;
        let compiled = core.compiled();
        for (i, g) in core.gates.iter().enumerate() {
            let v = match *g {
                Gate::Input(idx) => assign[idx as usize],
                Gate::Const(c) => core.consts[c as usize],
                Gate::Add { off, len } => {
                    let mut acc = ctx.zero();
                    for &a in &core.args[off as usize..(off + len) as usize] {
                        acc = ctx.add(acc, scratch.vals[a as usize]);
                    }
                    acc
                }
                Gate::Mul { .. } => {
                    let (off, len) = compiled.spans[i];
                    let mut acc = ctx.one();
                    for &(id32, count) in &compiled.runs[off as usize..(off + len) as usize] {
                        let id = id32 as usize;
                        let base = scratch.vals[id];
                        let powed = if count == 1 {
                            base
                        } else if scratch.pow_epoch[id] == epoch
                            && scratch.pow_exp[id] <= count
                            && scratch.pow_exp[id] > 0
                        {
                            // climb from the cached power
                            let mut v = scratch.pow_val[id];
                            for _ in scratch.pow_exp[id]..count {
                                v = ctx.mul(v, base);
                            }
                            scratch.pow_exp[id] = count;
                            scratch.pow_val[id] = v;
                            v
                        } else {
                            let v = ctx.pow(base, count as u64);
                            scratch.pow_epoch[id] = epoch;
                            scratch.pow_exp[id] = count;
                            scratch.pow_val[id] = v;
                            v
                        };
                        acc = ctx.mul(acc, powed);
                    }
                    acc
                }
            };
            scratch.vals[i] = v;
        }
        out.clear();
        out.extend(self.outputs.iter().map(|&o| scratch.vals[o as usize]));
        Ok(())
    }
}
