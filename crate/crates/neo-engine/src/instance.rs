//! A bound problem instance: graph + elimination tree + core formula, with
//! everything the traversal needs precomputed — variable/category indices,
//! per-vertex and per-edge falsification tables, counting-slot layouts, and
//! the enumeration of forget branches and edge-interpretation choices.

use crate::hooks::Hooks;
use crate::EngineError;
use neo_algebra::incexc_coeff;
use neo_graph::{ElimTree, Graph, Sheafs, Vertex};
use neo_logic::{sigma_member_high, CoreFormula, FinRecSet, Prim, Term, VarKind};
use std::collections::BTreeSet;

/// Cap on set variables of one sort: memberships are bitmasks in a `u64`
/// table index, kept small enough for dense tables.
const MAX_VARS_PER_SORT: usize = 16;
/// Cap on primitive atoms: falsification sets are `u64` bitmasks.
const MAX_PRIMS: usize = 64;

/// One tail vertex of a recursion index: variable memberships, per category
/// pair the capped qualifying-edge count `e`, the admitted copy count `a`,
/// and the arc-count residue `delta` (only meaningful where `e` hit the cap).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TailEntry {
    pub v: Vertex,
    /// membership bitmask over vertex-set variables
    pub f: u64,
    /// per category pair: qualifying-edge count capped at `d_phi`
    pub e: Vec<u32>,
    /// per category pair: admitted copies, `a <= e` pointwise
    pub a: Vec<u32>,
    /// per category pair: residue mod `p_phi`
    pub delta: Vec<u32>,
}

/// A recursion index: the per-tail-vertex data plus the set of equality
/// prims guessed false (as a bitmask over prim indices).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Index {
    pub entries: Vec<TailEntry>,
    pub false_mask: u64,
}

impl Index {
    pub fn root(false_mask: u64) -> Self {
        Index {
            entries: Vec::new(),
            false_mask,
        }
    }
}

/// One admissible way to forget a vertex: memberships, capped counts and
/// copy counts, together with the inclusion–exclusion weight, the exponent
/// on the uncapped-count slot, extra monomial factors, and the set of
/// residues `delta_u` whose falsified prims stay inside the allowed set.
#[derive(Debug, Clone)]
pub struct VertexBranch {
    pub fv: u64,
    pub ev: Vec<u32>,
    pub av: Vec<u32>,
    /// inclusion–exclusion weight `prod_c (-1)^{e-a} C(e, a)`
    pub weight: i64,
    /// exponent on slot 0: sum of capped counts that stayed below the cap
    pub a_exp: u32,
    pub slot_exps: Vec<(usize, u32)>,
    /// admissible residues, indexed by the mixed-radix code of `delta_u`
    pub dmask: Vec<bool>,
}

/// An edge-interpretation choice that keeps its falsified edge equalities
/// inside the allowed set (hook admissibility is checked later, per index).
#[derive(Debug, Clone)]
pub struct EdgeChoiceStatic {
    pub ge: u64,
    pub slot_exps: Vec<(usize, u32)>,
}

struct NeighInfo {
    prim: usize,
    sigma: FinRecSet,
    cat: usize,
}

pub struct Instance<'a> {
    pub g: &'a Graph,
    pub t: &'a ElimTree,
    pub core: &'a CoreFormula,
    pub sheafs: Sheafs,
    /// vertex-set variable names in index order (bit order of `f` masks)
    pub vvars: Vec<String>,
    /// edge-set variable names in index order (bit order of `ge` masks)
    pub evars: Vec<String>,
    /// category pairs as (vertex-variable index, edge-variable index)
    pub cat: Vec<(usize, usize)>,
    pub d: u32,
    pub p: u32,
    /// bitmask over prim indices of all equality prims
    pub eq_mask: u64,
    /// equality prim indices in ascending order
    pub eq_prims: Vec<usize>,
    /// measured variables in measurement order: (local index, is_edge)
    pub measured: Vec<(usize, bool)>,
    /// vertex-set variables under a clique predicate, in first-occurrence order
    pub clique_vars: Vec<usize>,
    /// slots: 0 = uncapped-count, 1 = below-cap-arc, 2.. = one per measured
    /// variable, then hook extras
    pub nslots: usize,
    pub base_slots: usize,

    neigh: Vec<NeighInfo>,
    /// [v][fv] -> falsified vertex-equality prims (bitmask)
    veq_false: Vec<Vec<u64>>,
    /// [v][fv] -> right-hand-side membership per `neigh` position (bitmask)
    neigh_rhs: Vec<Vec<u64>>,
    /// [e][ge] -> falsified edge-equality prims (bitmask)
    eeq_false: Vec<Vec<u64>>,
    /// [fv] -> measurement slot exponents for a vertex with mask `fv`
    gamma_v: Vec<Vec<(usize, u32)>>,
    /// [ge] -> measurement slot exponents for an edge with mask `ge`
    gamma_e: Vec<Vec<(usize, u32)>>,
}

pub fn decode_radix(mut code: usize, radix: u32, len: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push((code % radix as usize) as u32);
        code /= radix as usize;
    }
    out
}

pub fn encode_radix(digits: &[u32], radix: u32) -> usize {
    let mut code = 0usize;
    for &d in digits.iter().rev() {
        code = code * radix as usize + d as usize;
    }
    code
}

impl<'a> Instance<'a> {
    pub fn new(
        g: &'a Graph,
        t: &'a ElimTree,
        core: &'a CoreFormula,
        extra_slots: usize,
    ) -> Result<Self, EngineError> {
        let mut vvars = Vec::new();
        let mut evars = Vec::new();
        for (name, kind) in &core.vars {
            match kind {
                VarKind::VertexSet => vvars.push(name.clone()),
                VarKind::EdgeSet => evars.push(name.clone()),
                VarKind::VertexElem => {
                    return Err(EngineError::UnknownVariable(format!(
                        "{name} (element variables must be eliminated first)"
                    )))
                }
            }
        }
        if vvars.len() > MAX_VARS_PER_SORT || evars.len() > MAX_VARS_PER_SORT {
            return Err(EngineError::TooLarge(format!(
                "{} vertex-set and {} edge-set variables (cap {MAX_VARS_PER_SORT} each)",
                vvars.len(),
                evars.len()
            )));
        }
        if core.prims.len() > MAX_PRIMS {
            return Err(EngineError::TooLarge(format!(
                "{} primitive atoms (cap {MAX_PRIMS})",
                core.prims.len()
            )));
        }

        let vidx = |name: &str| -> Result<usize, EngineError> {
            vvars
                .iter()
                .position(|x| x == name)
                .ok_or_else(|| EngineError::UnknownVariable(name.to_string()))
        };
        let eidx = |name: &str| -> Result<usize, EngineError> {
            evars
                .iter()
                .position(|x| x == name)
                .ok_or_else(|| EngineError::UnknownVariable(name.to_string()))
        };

        let mut cat = Vec::with_capacity(core.cat.len());
        for (x, y) in &core.cat {
            cat.push((vidx(x)?, eidx(y)?));
        }

        let mut measured = Vec::new();
        for mv in &core.measured_vars {
            match core.kind_of(mv) {
                Some(VarKind::EdgeSet) => measured.push((eidx(mv)?, true)),
                Some(_) => measured.push((vidx(mv)?, false)),
                None => return Err(EngineError::UnknownVariable(mv.clone())),
            }
        }

        let mut clique_vars = Vec::new();
        for p in &core.prims {
            if let Prim::Clique { var } = p {
                let i = vidx(var)?;
                if !clique_vars.contains(&i) {
                    clique_vars.push(i);
                }
            }
        }

        // validate all terms (colors exist with the right sort, variables
        // resolve) before building dense tables
        let mut neigh = Vec::new();
        for (i, p) in core.prims.iter().enumerate() {
            match p {
                Prim::VertexEq(a, b) => {
                    validate_term(g, &vvars, a, false)?;
                    validate_term(g, &vvars, b, false)?;
                }
                Prim::EdgeEq(a, b) => {
                    validate_term(g, &evars, a, true)?;
                    validate_term(g, &evars, b, true)?;
                }
                Prim::NeighborEq { sigma, x, y, rhs } => {
                    vidx(x)?;
                    eidx(y)?;
                    validate_term(g, &vvars, rhs, false)?;
                    let cat_i = core
                        .cat
                        .iter()
                        .position(|(cx, cy)| cx == x && cy == y)
                        .expect("category pair registered during normalization");
                    neigh.push(NeighInfo {
                        prim: i,
                        sigma: sigma.clone(),
                        cat: cat_i,
                    });
                }
                Prim::Card { var, .. }
                | Prim::Conn { var, .. }
                | Prim::Acy { var, .. }
                | Prim::Clique { var } => {
                    if core.kind_of(var).is_none() {
                        return Err(EngineError::UnknownVariable(var.clone()));
                    }
                }
            }
        }

        let nv = vvars.len();
        let ne = evars.len();
        let vmasks = 1usize << nv;
        let emasks = 1usize << ne;

        let mut veq_false = vec![vec![0u64; vmasks]; g.n];
        let mut neigh_rhs = vec![vec![0u64; vmasks]; g.n];
        for v in 0..g.n {
            for fv in 0..vmasks {
                let mut fm = 0u64;
                for (i, p) in core.prims.iter().enumerate() {
                    if let Prim::VertexEq(a, b) = p {
                        let ma = vterm_member(g, &vvars, a, v, fv as u64);
                        let mb = vterm_member(g, &vvars, b, v, fv as u64);
                        if ma != mb {
                            fm |= 1 << i;
                        }
                    }
                }
                veq_false[v][fv] = fm;
                let mut rm = 0u64;
                for (k, ni) in neigh.iter().enumerate() {
                    let Prim::NeighborEq { rhs, .. } = &core.prims[ni.prim] else {
                        unreachable!()
                    };
                    if vterm_member(g, &vvars, rhs, v, fv as u64) {
                        rm |= 1 << k;
                    }
                }
                neigh_rhs[v][fv] = rm;
            }
        }

        let mut eeq_false = vec![vec![0u64; emasks]; g.m()];
        for e in 0..g.m() {
            for ge in 0..emasks {
                let mut fm = 0u64;
                for (i, p) in core.prims.iter().enumerate() {
                    if let Prim::EdgeEq(a, b) = p {
                        let ma = eterm_member(g, &evars, a, e, ge as u64);
                        let mb = eterm_member(g, &evars, b, e, ge as u64);
                        if ma != mb {
                            fm |= 1 << i;
                        }
                    }
                }
                eeq_false[e][ge] = fm;
            }
        }

        let base_slots = 2 + measured.len();
        let mut gamma_v = vec![Vec::new(); vmasks];
        for (fv, out) in gamma_v.iter_mut().enumerate() {
            for (mi, &(var, is_edge)) in measured.iter().enumerate() {
                if !is_edge && fv & (1 << var) != 0 {
                    out.push((2 + mi, 1u32));
                }
            }
        }
        let mut gamma_e = vec![Vec::new(); emasks];
        for (ge, out) in gamma_e.iter_mut().enumerate() {
            for (mi, &(var, is_edge)) in measured.iter().enumerate() {
                if is_edge && ge & (1 << var) != 0 {
                    out.push((2 + mi, 1u32));
                }
            }
        }

        let mut eq_mask = 0u64;
        let eq_prims = core.eq_prims();
        for &i in &eq_prims {
            eq_mask |= 1 << i;
        }

        let inst = Instance {
            g,
            t,
            core,
            sheafs: Sheafs::build(g, t),
            vvars,
            evars,
            cat,
            d: core.d_phi,
            p: core.p_phi.max(1),
            eq_mask,
            eq_prims,
            measured,
            clique_vars,
            nslots: base_slots + extra_slots,
            base_slots,
            neigh,
            veq_false,
            neigh_rhs,
            eeq_false,
            gamma_v,
            gamma_e,
        };
        inst.check_group_sizes()?;
        Ok(inst)
    }

    fn check_group_sizes(&self) -> Result<(), EngineError> {
        let digits = (self.t.depth as u32) * self.cat.len() as u32;
        let size = (self.p as f64).powi(digits as i32);
        if size > (1u64 << 24) as f64 {
            return Err(EngineError::TooLarge(format!(
                "residue-vector length {size:.0} exceeds 2^24"
            )));
        }
        Ok(())
    }

    pub fn ncat(&self) -> usize {
        self.cat.len()
    }

    /// `p_phi^{ncat}`: number of residue functions of a single vertex.
    pub fn pcat(&self) -> usize {
        (self.p as usize).pow(self.ncat() as u32)
    }

    /// Length of the dense residue vector for a tail of `tail_len` vertices.
    pub fn delta_group_len(&self, tail_len: usize) -> usize {
        (self.p as usize).pow((tail_len * self.ncat()) as u32)
    }

    /// Number of distinct capped-count vectors of one vertex.
    pub fn ecat(&self) -> usize {
        ((self.d + 1) as usize).pow(self.ncat() as u32)
    }

    pub fn vvar_index(&self, name: &str) -> Option<usize> {
        self.vvars.iter().position(|x| x == name)
    }

    pub fn evar_index(&self, name: &str) -> Option<usize> {
        self.evars.iter().position(|x| x == name)
    }

    pub fn false_mask(&self, false_set: &BTreeSet<usize>) -> Result<u64, EngineError> {
        let mut m = 0u64;
        for &i in false_set {
            if i >= self.core.prims.len() {
                return Err(EngineError::BadIndex(format!("prim index {i} out of range")));
            }
            m |= 1 << i;
        }
        Ok(m)
    }

    pub fn false_set_of_mask(&self, mask: u64) -> BTreeSet<usize> {
        (0..self.core.prims.len())
            .filter(|i| mask & (1 << i) != 0)
            .collect()
    }

    /// Falsified prims when vertex `v` enters the subtree with memberships
    /// `fv`, capped counts `ev` and residues `dv`.
    pub fn vfalse(&self, v: Vertex, fv: u64, ev: &[u32], dv: &[u32]) -> u64 {
        let mut mask = self.veq_false[v][fv as usize];
        for (k, ni) in self.neigh.iter().enumerate() {
            let lhs = if ev[ni.cat] < self.d {
                ni.sigma.contains(ev[ni.cat])
            } else {
                sigma_member_high(&ni.sigma, dv[ni.cat], self.d, self.p)
            };
            let rhs = self.neigh_rhs[v][fv as usize] & (1 << k) != 0;
            if lhs != rhs {
                mask |= 1 << ni.prim;
            }
        }
        mask
    }

    /// Falsified prims of edge `e` under membership mask `ge`.
    pub fn efalse(&self, e: usize, ge: u64) -> u64 {
        self.eeq_false[e][ge as usize]
    }

    /// Admissible forget branches of vertex `u` relative to an allowed
    /// falsification mask.
    pub fn vertex_branches<H: Hooks>(
        &self,
        u: Vertex,
        false_mask: u64,
        hooks: &H,
    ) -> Result<Vec<VertexBranch>, EngineError> {
        let ncat = self.ncat();
        let pcat = self.pcat();
        let mut out = Vec::new();
        for fv in 0..(1u64 << self.vvars.len()) {
            if self.veq_false[u][fv as usize] & !false_mask != 0 {
                continue;
            }
            for ecode in 0..self.ecat() {
                let ev = decode_radix(ecode, self.d + 1, ncat);
                // residue admissibility: prims reading a capped count are
                // fixed; prims reading a residue depend on delta_u
                let mut dmask = Vec::with_capacity(pcat);
                let mut any = false;
                for dcode in 0..pcat {
                    let dv = decode_radix(dcode, self.p, ncat);
                    let ok = self.vfalse(u, fv, &ev, &dv) & !false_mask == 0;
                    any |= ok;
                    dmask.push(ok);
                }
                if !any {
                    continue;
                }
                let a_exp: u32 = ev.iter().filter(|&&e| e < self.d).sum();
                let mut slot_exps = self.gamma_v[fv as usize].clone();
                hooks.vertex_exps(u, fv, &ev, &mut slot_exps);
                // all pointwise-dominated copy-count vectors
                let mut av = vec![0u32; ncat];
                loop {
                    let weight = incexc_coeff(&ev, &av)?;
                    out.push(VertexBranch {
                        fv,
                        ev: ev.clone(),
                        av: av.clone(),
                        weight,
                        a_exp,
                        slot_exps: slot_exps.clone(),
                        dmask: dmask.clone(),
                    });
                    // increment av in mixed radix bounded by ev
                    let mut i = 0;
                    loop {
                        if i == ncat {
                            break;
                        }
                        if av[i] < ev[i] {
                            av[i] += 1;
                            break;
                        }
                        av[i] = 0;
                        i += 1;
                    }
                    if i == ncat {
                        break;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Edge-interpretation choices of edge `e` that keep falsified edge
    /// equalities inside the allowed mask.
    pub fn edge_choices(&self, e: usize, false_mask: u64) -> Vec<EdgeChoiceStatic> {
        let mut out = Vec::new();
        for ge in 0..(1u64 << self.evars.len()) {
            if self.eeq_false[e][ge as usize] & !false_mask != 0 {
                continue;
            }
            out.push(EdgeChoiceStatic {
                ge,
                slot_exps: self.gamma_e[ge as usize].clone(),
            });
        }
        out
    }

    /// Per-category-pair arc obligations of edge `e` under choice `ge`,
    /// given a vertex-membership lookup: `(source, target, pair)` triples.
    pub fn obligations(
        &self,
        e: usize,
        ge: u64,
        f: &dyn Fn(Vertex) -> u64,
    ) -> Vec<(Vertex, Vertex, usize)> {
        let (x, y) = self.g.edges[e];
        let mut out = Vec::new();
        for (ci, &(xv, yv)) in self.cat.iter().enumerate() {
            if ge & (1 << yv) == 0 {
                continue;
            }
            if f(x) & (1 << xv) != 0 {
                out.push((x, y, ci));
            }
            if f(y) & (1 << xv) != 0 {
                out.push((y, x, ci));
            }
        }
        out
    }

    /// Check that an index fits node `u` (closed: tail includes `u`).
    pub fn check_index(&self, u: Vertex, closed: bool, index: &Index) -> Result<(), EngineError> {
        let mut tail = self.t.tail_closed(u);
        if !closed {
            tail.pop();
        }
        if index.entries.len() != tail.len()
            || index.entries.iter().zip(&tail).any(|(en, &v)| en.v != v)
        {
            return Err(EngineError::BadIndex(format!(
                "entries do not match the tail of node {u}"
            )));
        }
        let ncat = self.ncat();
        for en in &index.entries {
            if en.e.len() != ncat || en.a.len() != ncat || en.delta.len() != ncat {
                return Err(EngineError::BadIndex(format!(
                    "entry for vertex {} has wrong category arity",
                    en.v
                )));
            }
            for c in 0..ncat {
                if en.e[c] > self.d || en.a[c] > en.e[c] || en.delta[c] >= self.p {
                    return Err(EngineError::BadIndex(format!(
                        "entry for vertex {} violates e <= cap, a <= e or delta < period",
                        en.v
                    )));
                }
            }
            if en.f >> self.vvars.len() != 0 {
                return Err(EngineError::BadIndex(format!(
                    "membership mask of vertex {} uses undeclared variables",
                    en.v
                )));
            }
        }
        if index.false_mask & !self.eq_mask != 0 {
            return Err(EngineError::BadIndex(
                "allowed-false mask contains non-equality prims".into(),
            ));
        }
        Ok(())
    }

    /// All tail entries for vertex `v` (memberships x capped counts x copy
    /// counts x residues); used by tests to sweep index spaces.
    pub fn enumerate_entries(&self, v: Vertex) -> Vec<TailEntry> {
        let ncat = self.ncat();
        let mut out = Vec::new();
        for fv in 0..(1u64 << self.vvars.len()) {
            for ecode in 0..self.ecat() {
                let ev = decode_radix(ecode, self.d + 1, ncat);
                let mut av = vec![0u32; ncat];
                loop {
                    for dcode in 0..self.pcat() {
                        let dv = decode_radix(dcode, self.p, ncat);
                        out.push(TailEntry {
                            v,
                            f: fv,
                            e: ev.clone(),
                            a: av.clone(),
                            delta: dv,
                        });
                    }
                    let mut i = 0;
                    loop {
                        if i == ncat {
                            break;
                        }
                        if av[i] < ev[i] {
                            av[i] += 1;
                            break;
                        }
                        av[i] = 0;
                        i += 1;
                    }
                    if i == ncat {
                        break;
                    }
                }
            }
        }
        out
    }
}

fn validate_term(
    g: &Graph,
    vars: &[String],
    t: &Term,
    is_edge: bool,
) -> Result<(), EngineError> {
    match t {
        Term::Var(x) => {
            if !vars.iter().any(|v| v == x) {
                return Err(EngineError::UnknownVariable(x.clone()));
            }
        }
        Term::Color(c) => {
            let known = if is_edge {
                g.edge_colors.contains_key(c)
            } else {
                g.vertex_colors.contains_key(c)
            };
            if !known {
                return Err(EngineError::UnknownColor {
                    kind: if is_edge { "edge" } else { "vertex" },
                    name: c.clone(),
                });
            }
        }
        Term::Cup(a, b) | Term::Cap(a, b) | Term::SetMinus(a, b) => {
            validate_term(g, vars, a, is_edge)?;
            validate_term(g, vars, b, is_edge)?;
        }
        Term::Comp(a) => validate_term(g, vars, a, is_edge)?,
        Term::AllV | Term::AllE | Term::Empty => {}
        Term::N { .. } => {
            return Err(EngineError::BadIndex(
                "operator inside a supposedly operator-free term".into(),
            ))
        }
    }
    Ok(())
}

fn vterm_member(g: &Graph, vvars: &[String], t: &Term, v: Vertex, fv: u64) -> bool {
    match t {
        Term::Var(x) => {
            let i = vvars.iter().position(|n| n == x).expect("validated");
            fv & (1 << i) != 0
        }
        Term::AllV => true,
        Term::AllE => false,
        Term::Empty => false,
        Term::Color(c) => g.vertex_colors[c].binary_search(&v).is_ok(),
        Term::Cup(a, b) => {
            vterm_member(g, vvars, a, v, fv) || vterm_member(g, vvars, b, v, fv)
        }
        Term::Cap(a, b) => {
            vterm_member(g, vvars, a, v, fv) && vterm_member(g, vvars, b, v, fv)
        }
        Term::SetMinus(a, b) => {
            vterm_member(g, vvars, a, v, fv) && !vterm_member(g, vvars, b, v, fv)
        }
        Term::Comp(a) => !vterm_member(g, vvars, a, v, fv),
        Term::N { .. } => unreachable!("validated to be operator-free"),
    }
}

fn eterm_member(g: &Graph, evars: &[String], t: &Term, e: usize, ge: u64) -> bool {
    match t {
        Term::Var(x) => {
            let i = evars.iter().position(|n| n == x).expect("validated");
            ge & (1 << i) != 0
        }
        Term::AllE => true,
        Term::AllV => false,
        Term::Empty => false,
        Term::Color(c) => g.edge_colors[c].binary_search(&e).is_ok(),
        Term::Cup(a, b) => {
            eterm_member(g, evars, a, e, ge) || eterm_member(g, evars, b, e, ge)
        }
        Term::Cap(a, b) => {
            eterm_member(g, evars, a, e, ge) && eterm_member(g, evars, b, e, ge)
        }
        Term::SetMinus(a, b) => {
            eterm_member(g, evars, a, e, ge) && !eterm_member(g, evars, b, e, ge)
        }
        Term::Comp(a) => !eterm_member(g, evars, a, e, ge),
        Term::N { .. } => unreachable!("validated to be operator-free"),
    }
}
