//! The shared tree traversal in its two forms.
//!
//! Both forms walk the elimination tree through the same three shapes:
//!
//! * **leaf** — every edge of the leaf's bucket picks an interpretation
//!   choice; each choice spawns arc obligations into tail vertices, paying a
//!   copy-count factor and (exact form) shifting the residue vector, or
//!   (transformed form) paying a root-of-unity power of the target residue.
//! * **forget** — the node's vertex leaves the tail: sum over admissible
//!   membership/capped-count/copy-count branches with inclusion–exclusion
//!   weights; the exact form consumes the vertex's residue coordinate by
//!   direct summation, the transformed form by the inverse transform
//!   (summing over transformed coordinates with inverse root powers).
//! * **join** — children values at the same index are combined: the exact
//!   form convolves residue vectors and merges summary states, the
//!   transformed form multiplies pointwise.
//!
//! The root value with an exactly-realized falsified set is obtained by
//! inclusion–exclusion over subsets of the allowed set.

use crate::algebra::{Algebra, QAlgebra};
use crate::hooks::{Hooks, StateModel};
use crate::instance::{decode_radix, Index, Instance, TailEntry, VertexBranch};
use crate::{fnv1a, EngineError, RunCtx};
use neo_graph::Vertex;
use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

/// Exact-form node value: summary state -> dense vector over the residue
/// functions of the current tail (mixed radix, tail position major).
pub struct PVal<V> {
    pub states: BTreeMap<Vec<u8>, Vec<V>>,
}

impl<V> PVal<V> {
    pub fn zero() -> Self {
        PVal {
            states: BTreeMap::new(),
        }
    }

    /// The single value of a stateless, tail-free result (as produced at the
    /// root): zero if no entry survived.
    pub fn into_scalar<A: Algebra<V = V>>(mut self, alg: &A) -> V {
        assert!(self.states.len() <= 1, "stateless result expected");
        match self.states.pop_first() {
            Some((state, mut vec)) => {
                assert!(state.is_empty() && vec.len() == 1);
                vec.pop().unwrap()
            }
            None => alg.zero(),
        }
    }
}

pub struct Evaluator<'e, A: Algebra, S: StateModel, H: Hooks> {
    pub inst: &'e Instance<'e>,
    pub alg: &'e A,
    pub state: &'e S,
    pub hooks: &'e H,
    pub ctx: &'e RunCtx,
    branch_cache: RefCell<HashMap<(Vertex, u64), Rc<Vec<VertexBranch>>>>,
    choice_cache: RefCell<HashMap<(usize, u64), Rc<Vec<crate::instance::EdgeChoiceStatic>>>>,
}

impl<'e, A: Algebra, S: StateModel, H: Hooks> Evaluator<'e, A, S, H> {
    pub fn new(inst: &'e Instance<'e>, alg: &'e A, state: &'e S, hooks: &'e H, ctx: &'e RunCtx) -> Self {
        Evaluator {
            inst,
            alg,
            state,
            hooks,
            ctx,
            branch_cache: RefCell::new(HashMap::new()),
            choice_cache: RefCell::new(HashMap::new()),
        }
    }

    fn branches(&self, u: Vertex, fm: u64) -> Result<Rc<Vec<VertexBranch>>, EngineError> {
        if let Some(b) = self.branch_cache.borrow().get(&(u, fm)) {
            return Ok(b.clone());
        }
        let b = Rc::new(self.inst.vertex_branches(u, fm, self.hooks)?);
        self.branch_cache.borrow_mut().insert((u, fm), b.clone());
        Ok(b)
    }

    fn choices(&self, e: usize, fm: u64) -> Rc<Vec<crate::instance::EdgeChoiceStatic>> {
        if let Some(c) = self.choice_cache.borrow().get(&(e, fm)) {
            return c.clone();
        }
        let c = Rc::new(self.inst.edge_choices(e, fm));
        self.choice_cache.borrow_mut().insert((e, fm), c.clone());
        c
    }

    fn trace_call(&self, u: Vertex, closed: bool, stack: &[TailEntry], fm: u64) {
        if self.ctx.trace.is_none() {
            return;
        }
        let mut bytes = Vec::new();
        bytes.push(if closed { 1u8 } else { 0 });
        bytes.extend_from_slice(&(u as u64).to_le_bytes());
        bytes.extend_from_slice(&fm.to_le_bytes());
        for en in stack {
            bytes.extend_from_slice(&(en.v as u64).to_le_bytes());
            bytes.extend_from_slice(&en.f.to_le_bytes());
            for xs in [&en.e, &en.a, &en.delta] {
                for &x in xs {
                    bytes.extend_from_slice(&x.to_le_bytes());
                }
            }
        }
        let h = fnv1a(bytes);
        self.ctx.trace_line(&format!(
            "CALL {u} {} {h:016x}",
            if closed { "closed" } else { "open" }
        ));
    }

    fn trace_ret(&self, text: String) {
        if self.ctx.trace.is_some() {
            self.ctx.trace_line(&format!("RET {text}"));
        }
    }

    /// Digitwise sum mod the period of two residue-vector indices.
    fn gadd(&self, mut a: usize, mut b: usize) -> usize {
        let p = self.inst.p as usize;
        if p == 1 {
            return 0;
        }
        let mut out = 0usize;
        let mut w = 1usize;
        while a > 0 || b > 0 {
            out += ((a % p) + (b % p)) % p * w;
            a /= p;
            b /= p;
            w *= p;
        }
        out
    }

    /// Add one to digit `di` (mod the period) of a residue-vector index.
    fn gbump(&self, idx: usize, di: usize) -> usize {
        let p = self.inst.p as usize;
        if p == 1 {
            return idx;
        }
        let w = p.pow(di as u32);
        let digit = (idx / w) % p;
        idx - digit * w + (digit + 1) % p * w
    }

    fn conv(&self, a: &[A::V], b: &[A::V]) -> Vec<A::V> {
        let mut out = vec![self.alg.zero(); a.len()];
        for (i, ai) in a.iter().enumerate() {
            if self.alg.is_zero(ai) {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                if self.alg.is_zero(bj) {
                    continue;
                }
                let prod = self.alg.mul(ai, bj);
                self.alg.add_assign(&mut out[self.gadd(i, j)], &prod);
            }
        }
        out
    }

    fn apply_exps(&self, v: &mut A::V, exps: &[(usize, u32)]) {
        for &(slot, e) in exps {
            self.alg.mul_mono(v, slot, e);
        }
    }

    /// The per-edge sum of interpretation choices at a leaf, as a residue
    /// shift (exact form). Returns a dense vector over the tail group.
    fn leaf_edge_vector(
        &self,
        e: usize,
        stack: &[TailEntry],
        fm: u64,
        glen: usize,
    ) -> Result<Vec<A::V>, EngineError> {
        let mut local = vec![self.alg.zero(); glen];
        let flookup = |v: Vertex| -> u64 {
            stack
                .iter()
                .find(|en| en.v == v)
                .map(|en| en.f)
                .unwrap_or(0)
        };
        for choice in self.choices(e, fm).iter() {
            if !self.hooks.edge_allowed(e, choice.ge, &flookup) {
                continue;
            }
            let mut val = self.alg.one();
            let mut shift = 0usize;
            let mut dead = false;
            for (s, t, ci) in self.inst.obligations(e, choice.ge, &flookup) {
                let pos = stack
                    .iter()
                    .position(|en| en.v == t)
                    .expect("edge endpoints lie on the tail of the owning leaf");
                let cap = stack[pos].a[ci];
                if cap == 0 {
                    dead = true;
                    break;
                }
                match self.hooks.tau_slot() {
                    None => self.alg.scale_i64(&mut val, cap as i64),
                    Some(ts) => {
                        let mut arc = self.alg.zero();
                        for j in 1..=cap {
                            let mut term = self.alg.one();
                            self.alg
                                .mul_mono(&mut term, ts, self.hooks.arc_weight_exp(ci, s, t, j));
                            self.alg.add_assign(&mut arc, &term);
                        }
                        val = self.alg.mul(&val, &arc);
                    }
                }
                if stack[pos].e[ci] < self.inst.d {
                    self.alg.mul_mono(&mut val, 1, 1);
                }
                shift = self.gbump(shift, pos * self.inst.ncat() + ci);
            }
            if dead {
                continue;
            }
            self.apply_exps(&mut val, &choice.slot_exps);
            let mut extra = Vec::new();
            self.hooks.edge_exps(e, choice.ge, &flookup, &mut extra);
            self.apply_exps(&mut val, &extra);
            self.alg.add_assign(&mut local[shift], &val);
        }
        Ok(local)
    }

    /// Exact-form value of the closed frame of `u`: tail = `stack`
    /// (including `u` as its last entry).
    pub fn p_closed(
        &self,
        u: Vertex,
        stack: &mut Vec<TailEntry>,
        fm: u64,
    ) -> Result<PVal<A::V>, EngineError> {
        self.ctx.tick()?;
        self.trace_call(u, true, stack, fm);
        let out = if self.inst.t.is_leaf(u) {
            let glen = self.inst.delta_group_len(stack.len());
            let mut acc = vec![self.alg.zero(); glen];
            acc[0] = self.alg.one();
            for &e in &self.inst.sheafs.by_node[u] {
                let local = self.leaf_edge_vector(e, stack, fm, glen)?;
                acc = self.conv(&acc, &local);
            }
            let mut states = BTreeMap::new();
            states.insert(self.state.empty_state(), acc);
            PVal { states }
        } else {
            let children = self.inst.t.children[u].clone();
            let mut acc: Option<PVal<A::V>> = None;
            for c in children {
                let cv = self.p_open(c, stack, fm)?;
                acc = Some(match acc {
                    None => cv,
                    Some(prev) => self.join_pvals(prev, cv),
                });
            }
            acc.expect("internal nodes have children")
        };
        self.trace_ret(format!("states={}", out.states.len()));
        Ok(out)
    }

    fn join_pvals(&self, a: PVal<A::V>, b: PVal<A::V>) -> PVal<A::V> {
        let mut out: BTreeMap<Vec<u8>, Vec<A::V>> = BTreeMap::new();
        for (sa, va) in &a.states {
            for (sb, vb) in &b.states {
                let s = self.state.combine(sa, sb);
                let vec = self.conv(va, vb);
                match out.get_mut(&s) {
                    Some(acc) => {
                        for (x, y) in acc.iter_mut().zip(&vec) {
                            self.alg.add_assign(x, y);
                        }
                    }
                    None => {
                        out.insert(s, vec);
                    }
                }
            }
        }
        PVal { states: out }
    }

    /// Exact-form value of the open frame of `u`: tail = `stack` (excluding
    /// `u`); `u` is forgotten here.
    pub fn p_open(
        &self,
        u: Vertex,
        stack: &mut Vec<TailEntry>,
        fm: u64,
    ) -> Result<PVal<A::V>, EngineError> {
        self.ctx.tick()?;
        self.trace_call(u, false, stack, fm);
        let ncat = self.inst.ncat();
        let stride = self.inst.delta_group_len(stack.len());
        let branches = self.branches(u, fm)?;
        let mut out: BTreeMap<Vec<u8>, Vec<A::V>> = BTreeMap::new();
        for br in branches.iter() {
            stack.push(TailEntry {
                v: u,
                f: br.fv,
                e: br.ev.clone(),
                a: br.av.clone(),
                delta: vec![0; ncat],
            });
            let child = self.p_closed(u, stack, fm);
            stack.pop();
            let child = child?;
            for (stkey, vec) in &child.states {
                let newstate = self.state.forget(stkey, u, br.fv, stack);
                let ovec = out
                    .entry(newstate)
                    .or_insert_with(|| vec![self.alg.zero(); stride]);
                for (du, allowed) in br.dmask.iter().enumerate() {
                    if !allowed {
                        continue;
                    }
                    for dt in 0..stride {
                        let src = &vec[dt + du * stride];
                        if self.alg.is_zero(src) {
                            continue;
                        }
                        let mut term = src.clone();
                        self.alg.scale_i64(&mut term, br.weight);
                        self.alg.mul_mono(&mut term, 0, br.a_exp);
                        self.apply_exps(&mut term, &br.slot_exps);
                        self.alg.add_assign(&mut ovec[dt], &term);
                    }
                }
            }
        }
        let out = PVal { states: out };
        self.trace_ret(format!("states={}", out.states.len()));
        Ok(out)
    }

    /// Root inclusion–exclusion in the exact form: values whose realized
    /// falsified set is exactly the given one, per summary state.
    pub fn p_root_exact(&self, fm: u64) -> Result<BTreeMap<Vec<u8>, A::V>, EngineError> {
        let total = fm.count_ones();
        let mut acc: BTreeMap<Vec<u8>, A::V> = BTreeMap::new();
        let mut kept = fm;
        loop {
            let sign = if (total - kept.count_ones()) % 2 == 0 {
                1i64
            } else {
                -1
            };
            let mut stack = Vec::new();
            let pv = self.p_open(self.inst.t.root, &mut stack, kept)?;
            for (s, v) in pv.states {
                let mut v = v.into_iter().next().expect("tail-free vector has length 1");
                self.alg.scale_i64(&mut v, sign);
                match acc.get_mut(&s) {
                    Some(a) => self.alg.add_assign(a, &v),
                    None => {
                        acc.insert(s, v);
                    }
                }
            }
            if kept == 0 {
                break;
            }
            kept = (kept - 1) & fm;
        }
        acc.retain(|_, v| !self.alg.is_zero(v));
        Ok(acc)
    }
}

// ---------------------------------------------------------------------------
// Transformed form
// ---------------------------------------------------------------------------

impl<'e, A: QAlgebra, S: StateModel, H: Hooks> Evaluator<'e, A, S, H> {
    /// Transformed value of the closed frame of `u`; the `delta` fields on
    /// the stack are transformed coordinates.
    pub fn q_closed(
        &self,
        u: Vertex,
        stack: &mut Vec<TailEntry>,
        fm: u64,
    ) -> Result<A::V, EngineError> {
        self.ctx.tick()?;
        self.trace_call(u, true, stack, fm);
        let out = if self.inst.t.is_leaf(u) {
            let mut acc = self.alg.one();
            let flookup = |v: Vertex| -> u64 {
                stack
                    .iter()
                    .find(|en| en.v == v)
                    .map(|en| en.f)
                    .unwrap_or(0)
            };
            for &e in &self.inst.sheafs.by_node[u] {
                let mut edge_sum = self.alg.zero();
                for choice in self.choices(e, fm).iter() {
                    if !self.hooks.edge_allowed(e, choice.ge, &flookup) {
                        continue;
                    }
                    let mut val = self.alg.one();
                    let mut dead = false;
                    for (s, t, ci) in self.inst.obligations(e, choice.ge, &flookup) {
                        let pos = stack
                            .iter()
                            .position(|en| en.v == t)
                            .expect("edge endpoints lie on the tail of the owning leaf");
                        let cap = stack[pos].a[ci];
                        if cap == 0 {
                            dead = true;
                            break;
                        }
                        match self.hooks.tau_slot() {
                            None => self.alg.scale_i64(&mut val, cap as i64),
                            Some(ts) => {
                                let mut arc = self.alg.zero();
                                for j in 1..=cap {
                                    let mut term = self.alg.one();
                                    self.alg.mul_mono(
                                        &mut term,
                                        ts,
                                        self.hooks.arc_weight_exp(ci, s, t, j),
                                    );
                                    self.alg.add_assign(&mut arc, &term);
                                }
                                val = self.alg.mul(&val, &arc);
                            }
                        }
                        let w = self.alg.omega_pow(stack[pos].delta[ci] as i64);
                        self.alg.scale_field(&mut val, w);
                        if stack[pos].e[ci] < self.inst.d {
                            self.alg.mul_mono(&mut val, 1, 1);
                        }
                    }
                    if dead {
                        continue;
                    }
                    self.apply_exps(&mut val, &choice.slot_exps);
                    let mut extra = Vec::new();
                    self.hooks.edge_exps(e, choice.ge, &flookup, &mut extra);
                    self.apply_exps(&mut val, &extra);
                    self.alg.add_assign(&mut edge_sum, &val);
                }
                acc = self.alg.mul(&acc, &edge_sum);
                if self.alg.is_zero(&acc) {
                    break;
                }
            }
            acc
        } else {
            let children = self.inst.t.children[u].clone();
            let mut acc = self.alg.one();
            for c in children {
                let cv = self.q_open(c, stack, fm)?;
                acc = self.alg.mul(&acc, &cv);
                if self.alg.is_zero(&acc) {
                    break;
                }
            }
            acc
        };
        self.trace_ret(self.alg.describe(&out));
        Ok(out)
    }

    /// Transformed value of the open frame of `u`: forget by summing over
    /// the transformed coordinate with inverse root-of-unity twists.
    pub fn q_open(
        &self,
        u: Vertex,
        stack: &mut Vec<TailEntry>,
        fm: u64,
    ) -> Result<A::V, EngineError> {
        debug_assert!(
            self.state.state_len() == 0,
            "summary states require the exact form"
        );
        self.ctx.tick()?;
        self.trace_call(u, false, stack, fm);
        let ncat = self.inst.ncat();
        let pcat = self.inst.pcat();
        let p = self.inst.p as i64;
        let inv = self.alg.inv_pcat(ncat)?;
        let branches = self.branches(u, fm)?;
        let mut out = self.alg.zero();
        for br in branches.iter() {
            for qcode in 0..pcat {
                let qv = decode_radix(qcode, self.inst.p, ncat);
                // twist sum over admissible residues of the forgotten vertex
                let mut w = 0u64;
                for (dcode, allowed) in br.dmask.iter().enumerate() {
                    if !allowed {
                        continue;
                    }
                    let dv = decode_radix(dcode, self.inst.p, ncat);
                    let dot: i64 = qv
                        .iter()
                        .zip(&dv)
                        .map(|(&q, &d)| (q as i64 * d as i64) % p)
                        .sum();
                    w = self.alg.field_add(w, self.alg.omega_pow(-dot));
                }
                if w == 0 {
                    continue;
                }
                stack.push(TailEntry {
                    v: u,
                    f: br.fv,
                    e: br.ev.clone(),
                    a: br.av.clone(),
                    delta: qv,
                });
                let child = self.q_closed(u, stack, fm);
                stack.pop();
                let mut child = child?;
                self.alg.scale_field(&mut child, w);
                self.alg.scale_field(&mut child, inv);
                self.alg.scale_i64(&mut child, br.weight);
                self.alg.mul_mono(&mut child, 0, br.a_exp);
                self.apply_exps(&mut child, &br.slot_exps);
                self.alg.add_assign(&mut out, &child);
            }
        }
        self.trace_ret(self.alg.describe(&out));
        Ok(out)
    }

    /// Transformed root value with exact falsified set, by inclusion–
    /// exclusion (the root tail is empty, so transformed = exact there).
    pub fn q_root_exact(&self, fm: u64) -> Result<A::V, EngineError> {
        let total = fm.count_ones();
        let mut acc = self.alg.zero();
        let mut kept = fm;
        loop {
            let sign = if (total - kept.count_ones()) % 2 == 0 {
                1i64
            } else {
                -1
            };
            let mut stack = Vec::new();
            let mut v = self.q_open(self.inst.t.root, &mut stack, kept)?;
            self.alg.scale_i64(&mut v, sign);
            self.alg.add_assign(&mut acc, &v);
            if kept == 0 {
                break;
            }
            kept = (kept - 1) & fm;
        }
        Ok(acc)
    }

    // --- named entry points over explicit indexes -------------------------

    /// Transformed leaf value at an index whose entries cover the closed
    /// tail of `u` (last entry is `u` itself).
    pub fn q_leaf(&self, u: Vertex, index: &Index) -> Result<A::V, EngineError> {
        if !self.inst.t.is_leaf(u) {
            return Err(EngineError::NotALeaf(u));
        }
        self.inst.check_index(u, true, index)?;
        let mut stack = index.entries.clone();
        self.q_closed(u, &mut stack, index.false_mask)
    }

    /// Transformed open value of `u` at an index over the tail excluding
    /// `u` (the forget step happens here).
    pub fn q_forget(&self, u: Vertex, index: &Index) -> Result<A::V, EngineError> {
        self.inst.check_index(u, false, index)?;
        let mut stack = index.entries.clone();
        self.q_open(u, &mut stack, index.false_mask)
    }

    /// Transformed closed value of an internal node at an index over its
    /// closed tail: the product of its children's open values.
    pub fn q_join(&self, u: Vertex, index: &Index) -> Result<A::V, EngineError> {
        if self.inst.t.is_leaf(u) {
            return Err(EngineError::BadIndex(format!(
                "node {u} is a leaf; the combination step needs children"
            )));
        }
        self.inst.check_index(u, true, index)?;
        let mut stack = index.entries.clone();
        self.q_closed(u, &mut stack, index.false_mask)
    }

    /// Root value with exactly-realized falsified set.
    pub fn root_value(&self, false_set: &std::collections::BTreeSet<usize>) -> Result<A::V, EngineError> {
        let fm = self.inst.false_mask(false_set)?;
        self.q_root_exact(fm)
    }
}
