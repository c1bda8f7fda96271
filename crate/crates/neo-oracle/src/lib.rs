//! Brute-force semantic evaluator: the ground truth every engine result is
//! compared against. Set variables range over all subsets of V(G) or E(G)
//! (as 64-bit masks), element variables over single vertices; terms and
//! predicates are evaluated literally.

use neo_graph::Graph;
use neo_logic::{Atom, Body, CardCmp, CoreFormula, Formula, Term, VarKind};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("instance too large for exhaustive search: {bits} assignment bits (cap {cap})")]
    TooLarge { bits: u64, cap: u64 },
    #[error("unknown color {0:?}")]
    UnknownColor(String),
    #[error("graph has more than 64 vertices or edges")]
    MaskOverflow,
}

pub const DEFAULT_CAP_BITS: u64 = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Sort {
    Vertex,
    Edge,
}

/// One assignment: per-variable masks (vertex ids or edge ids as bits);
/// element variables hold a single-bit vertex mask.
type Masks = BTreeMap<String, u64>;

struct Ctx<'a> {
    g: &'a Graph,
    kinds: BTreeMap<String, VarKind>,
}

impl<'a> Ctx<'a> {
    fn universe(&self, s: Sort) -> u64 {
        match s {
            Sort::Vertex => mask_all(self.g.n),
            Sort::Edge => mask_all(self.g.m()),
        }
    }

    fn term_sort(&self, t: &Term) -> Option<Sort> {
        match t {
            Term::Var(x) => match self.kinds.get(x) {
                Some(VarKind::EdgeSet) => Some(Sort::Edge),
                Some(_) => Some(Sort::Vertex),
                None => None,
            },
            Term::AllV | Term::N { .. } => Some(Sort::Vertex),
            Term::AllE => Some(Sort::Edge),
            Term::Empty => None,
            Term::Color(c) => {
                if self.g.edge_colors.contains_key(c) {
                    Some(Sort::Edge)
                } else if self.g.vertex_colors.contains_key(c) {
                    Some(Sort::Vertex)
                } else {
                    None
                }
            }
            Term::Cup(a, b) | Term::Cap(a, b) | Term::SetMinus(a, b) => {
                self.term_sort(a).or_else(|| self.term_sort(b))
            }
            Term::Comp(a) => self.term_sort(a),
        }
    }

    fn eval_term(&self, t: &Term, sort: Sort, a: &Masks) -> Result<u64, OracleError> {
        Ok(match t {
            Term::Var(x) => a[x],
            Term::AllV | Term::AllE => self.universe(sort),
            Term::Empty => 0,
            Term::Color(c) => match sort {
                Sort::Vertex => self
                    .g
                    .vertex_colors
                    .get(c)
                    .ok_or_else(|| OracleError::UnknownColor(c.clone()))?
                    .iter()
                    .fold(0u64, |m, &v| m | (1 << v)),
                Sort::Edge => self
                    .g
                    .edge_colors
                    .get(c)
                    .ok_or_else(|| OracleError::UnknownColor(c.clone()))?
                    .iter()
                    .fold(0u64, |m, &e| m | (1 << e)),
            },
            Term::Cup(x, y) => self.eval_term(x, sort, a)? | self.eval_term(y, sort, a)?,
            Term::Cap(x, y) => self.eval_term(x, sort, a)? & self.eval_term(y, sort, a)?,
            Term::SetMinus(x, y) => {
                self.eval_term(x, sort, a)? & !self.eval_term(y, sort, a)?
            }
            Term::Comp(x) => self.universe(sort) & !self.eval_term(x, sort, a)?,
            Term::N { sigma, arg, edges } => {
                let u_set = self.eval_term(arg, Sort::Vertex, a)?;
                let f_set = match edges {
                    Some(e) => self.eval_term(e, Sort::Edge, a)?,
                    None => self.universe(Sort::Edge),
                };
                let mut out = 0u64;
                for v in 0..self.g.n {
                    let mut deg = 0u32;
                    for &(w, eid) in &self.g.adj[v] {
                        if f_set & (1 << eid) != 0 && u_set & (1 << w) != 0 {
                            deg += 1;
                        }
                    }
                    if sigma.contains(deg) {
                        out |= 1 << v;
                    }
                }
                out
            }
        })
    }

    fn eval_atom(&self, atom: &Atom, a: &Masks) -> Result<bool, OracleError> {
        Ok(match atom {
            Atom::Eq(s, t) => {
                let sort = self.term_sort(s).or_else(|| self.term_sort(t)).unwrap_or(Sort::Vertex);
                self.eval_term(s, sort, a)? == self.eval_term(t, sort, a)?
            }
            Atom::SubsetEq(s, t) => {
                let sort = self.term_sort(s).or_else(|| self.term_sort(t)).unwrap_or(Sort::Vertex);
                let sv = self.eval_term(s, sort, a)?;
                sv & self.eval_term(t, sort, a)? == sv
            }
            Atom::SupsetEq(s, t) => {
                let sort = self.term_sort(s).or_else(|| self.term_sort(t)).unwrap_or(Sort::Vertex);
                let tv = self.eval_term(t, sort, a)?;
                tv & self.eval_term(s, sort, a)? == tv
            }
            Atom::Card(t, cmp, k) => {
                let sort = self.term_sort(t).unwrap_or(Sort::Vertex);
                cmp.holds(self.eval_term(t, sort, a)?.count_ones() as u64, *k)
            }
            Atom::Conn(t) => {
                let sort = self.term_sort(t).unwrap_or(Sort::Vertex);
                let m = self.eval_term(t, sort, a)?;
                match sort {
                    Sort::Vertex => is_connected_vertices(self.g, m),
                    Sort::Edge => is_connected_edges(self.g, m),
                }
            }
            Atom::Acy(t) => {
                let sort = self.term_sort(t).unwrap_or(Sort::Vertex);
                let m = self.eval_term(t, sort, a)?;
                match sort {
                    Sort::Vertex => is_acyclic_vertices(self.g, m),
                    Sort::Edge => is_acyclic_edges(self.g, m),
                }
            }
            Atom::Clique(t) => {
                let m = self.eval_term(t, Sort::Vertex, a)?;
                let vs: Vec<usize> = (0..self.g.n).filter(|&v| m & (1 << v) != 0).collect();
                vs.iter()
                    .all(|&u| vs.iter().all(|&v| u == v || self.g.has_edge(u, v)))
            }
            Atom::In(x, t) => {
                let m = self.eval_term(t, Sort::Vertex, a)?;
                a[x] & m == a[x] && a[x] != 0
            }
            Atom::Adj(x, y) => {
                let u = a[x].trailing_zeros() as usize;
                let v = a[y].trailing_zeros() as usize;
                u != v && self.g.has_edge(u, v)
            }
        })
    }

    fn eval_body(&self, b: &Body, a: &Masks) -> Result<bool, OracleError> {
        Ok(match b {
            Body::Atom(atom) => self.eval_atom(atom, a)?,
            Body::And(xs) => {
                for x in xs {
                    if !self.eval_body(x, a)? {
                        return Ok(false);
                    }
                }
                true
            }
            Body::Or(xs) => {
                for x in xs {
                    if self.eval_body(x, a)? {
                        return Ok(true);
                    }
                }
                false
            }
            Body::Not(x) => !self.eval_body(x, a)?,
            Body::Exists(..) => unreachable!("quantifiers are hoisted in parsed formulas"),
        })
    }
}

fn mask_all(k: usize) -> u64 {
    if k >= 64 {
        u64::MAX
    } else {
        (1u64 << k) - 1
    }
}

/// Is the subgraph induced by the vertex mask connected (vacuously true for
/// the empty set)?
pub fn is_connected_vertices(g: &Graph, m: u64) -> bool {
    if m == 0 {
        return true;
    }
    let start = m.trailing_zeros() as usize;
    let mut seen = 1u64 << start;
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for &(w, _) in &g.adj[v] {
            if m & (1 << w) != 0 && seen & (1 << w) == 0 {
                seen |= 1 << w;
                stack.push(w);
            }
        }
    }
    seen == m
}

/// Is the subgraph formed by the edge mask (on its incident vertices)
/// connected?
pub fn is_connected_edges(g: &Graph, m: u64) -> bool {
    if m == 0 {
        return true;
    }
    let mut verts = 0u64;
    for (eid, &(u, v)) in g.edges.iter().enumerate() {
        if m & (1 << eid) != 0 {
            verts |= (1 << u) | (1 << v);
        }
    }
    let start = verts.trailing_zeros() as usize;
    let mut seen = 1u64 << start;
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for &(w, eid) in &g.adj[v] {
            if m & (1 << eid) != 0 && seen & (1 << w) == 0 {
                seen |= 1 << w;
                stack.push(w);
            }
        }
    }
    seen == verts
}

pub fn is_acyclic_vertices(g: &Graph, m: u64) -> bool {
    let edges: u64 = g
        .edges
        .iter()
        .enumerate()
        .filter(|(_, &(u, v))| m & (1 << u) != 0 && m & (1 << v) != 0)
        .fold(0, |acc, (eid, _)| acc | (1 << eid));
    is_acyclic_edges(g, edges)
}

pub fn is_acyclic_edges(g: &Graph, m: u64) -> bool {
    let mut parent: Vec<usize> = (0..g.n).collect();
    fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (eid, &(u, v)) in g.edges.iter().enumerate() {
        if m & (1 << eid) != 0 {
            let ru = find(&mut parent, u);
            let rv = find(&mut parent, v);
            if ru == rv {
                return false;
            }
            parent[ru] = rv;
        }
    }
    true
}

fn assignment_bits(g: &Graph, vars: &[(String, VarKind)]) -> u64 {
    vars.iter()
        .map(|(_, k)| match k {
            VarKind::VertexSet => g.n as u64,
            VarKind::EdgeSet => g.m() as u64,
            VarKind::VertexElem => (64 - (g.n.max(1) as u64 - 1).leading_zeros()) as u64,
        })
        .sum()
}

/// Iterate every assignment, calling `f`; returns early if `f` returns true
/// and `short_circuit` is set.
fn for_each_assignment(
    g: &Graph,
    vars: &[(String, VarKind)],
    short_circuit: bool,
    f: &mut dyn FnMut(&Masks) -> Result<bool, OracleError>,
) -> Result<bool, OracleError> {
    let sizes: Vec<u64> = vars
        .iter()
        .map(|(_, k)| match k {
            VarKind::VertexSet => 1u64 << g.n,
            VarKind::EdgeSet => 1u64 << g.m(),
            VarKind::VertexElem => g.n as u64,
        })
        .collect();
    let mut idx = vec![0u64; vars.len()];
    loop {
        let mut masks = Masks::new();
        for (i, (name, kind)) in vars.iter().enumerate() {
            let m = match kind {
                VarKind::VertexElem => 1u64 << idx[i],
                _ => idx[i],
            };
            masks.insert(name.clone(), m);
        }
        if f(&masks)? && short_circuit {
            return Ok(true);
        }
        // increment mixed-radix counter
        let mut i = 0;
        loop {
            if i == vars.len() {
                return Ok(false);
            }
            idx[i] += 1;
            if idx[i] < sizes[i].max(1) {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

/// Exists-an-assignment truth of a formula, by exhaustive enumeration.
pub fn brute_force_check(g: &Graph, f: &Formula, cap_bits: u64) -> Result<bool, OracleError> {
    if g.n > 64 || g.m() > 64 {
        return Err(OracleError::MaskOverflow);
    }
    let bits = assignment_bits(g, &f.vars);
    if bits > cap_bits {
        return Err(OracleError::TooLarge { bits, cap: cap_bits });
    }
    let ctx = Ctx {
        g,
        kinds: f.vars.iter().cloned().collect(),
    };
    for_each_assignment(g, &f.vars, true, &mut |a| ctx.eval_body(&f.body, a))
}

pub fn brute_force_check_core(
    g: &Graph,
    core: &CoreFormula,
    cap_bits: u64,
) -> Result<bool, OracleError> {
    brute_force_check(g, &neo_logic::core_to_ast(core), cap_bits)
}

/// Count the number of models (assignments satisfying the body).
pub fn count_models(g: &Graph, f: &Formula, cap_bits: u64) -> Result<u64, OracleError> {
    if g.n > 64 || g.m() > 64 {
        return Err(OracleError::MaskOverflow);
    }
    let bits = assignment_bits(g, &f.vars);
    if bits > cap_bits {
        return Err(OracleError::TooLarge { bits, cap: cap_bits });
    }
    let ctx = Ctx {
        g,
        kinds: f.vars.iter().cloned().collect(),
    };
    let mut count = 0u64;
    for_each_assignment(g, &f.vars, false, &mut |a| {
        if ctx.eval_body(&f.body, a)? {
            count += 1;
        }
        Ok(false)
    })?;
    Ok(count)
}

/// Distribution of assignments over (set of falsified equality prims,
/// measured-variable sizes): the ground truth the counting recursion is
/// checked against. Keys are (sorted falsified prim indices, sizes in
/// measured-variable order).
pub fn count_models_by_false_set(
    g: &Graph,
    core: &CoreFormula,
    cap_bits: u64,
) -> Result<BTreeMap<(Vec<usize>, Vec<u64>), u64>, OracleError> {
    if g.n > 64 || g.m() > 64 {
        return Err(OracleError::MaskOverflow);
    }
    let bits = assignment_bits(g, &core.vars);
    if bits > cap_bits {
        return Err(OracleError::TooLarge { bits, cap: cap_bits });
    }
    let ast = neo_logic::core_to_ast(core);
    let ctx = Ctx {
        g,
        kinds: core.vars.iter().cloned().collect(),
    };
    // pre-extract each equality prim as an atom
    let eq_idx = core.eq_prims();
    let eq_atoms: Vec<(usize, Atom)> = eq_idx
        .iter()
        .map(|&i| {
            let Body::Atom(a) = body_of_prim(&ast, core, i) else {
                unreachable!()
            };
            (i, a)
        })
        .collect();
    let mut out: BTreeMap<(Vec<usize>, Vec<u64>), u64> = BTreeMap::new();
    for_each_assignment(g, &core.vars, false, &mut |a| {
        let mut falsified = Vec::new();
        for (i, atom) in &eq_atoms {
            if !ctx.eval_atom(atom, a)? {
                falsified.push(*i);
            }
        }
        let c_bar: Vec<u64> = core
            .measured_vars
            .iter()
            .map(|v| a[v].count_ones() as u64)
            .collect();
        *out.entry((falsified, c_bar)).or_insert(0) += 1;
        Ok(false)
    })?;
    Ok(out)
}

fn body_of_prim(_ast: &Formula, core: &CoreFormula, i: usize) -> Body {
    use neo_logic::Prim;
    match &core.prims[i] {
        Prim::VertexEq(a, b) | Prim::EdgeEq(a, b) => Body::Atom(Atom::Eq(a.clone(), b.clone())),
        Prim::NeighborEq { sigma, x, y, rhs } => Body::Atom(Atom::Eq(
            Term::N {
                sigma: sigma.clone(),
                arg: Box::new(Term::Var(x.clone())),
                edges: Some(Box::new(Term::Var(y.clone()))),
            },
            rhs.clone(),
        )),
        _ => unreachable!("only equality prims are queried"),
    }
}

/// Convenience: truth of a single size comparison.
pub fn card_holds(cmp: CardCmp, value: u64, bound: u64) -> bool {
    cmp.holds(value, bound)
}
