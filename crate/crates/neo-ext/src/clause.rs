//! Clause-level rewriting of connectivity, acyclicity and negated special
//! predicates.
//!
//! The quantifier-free part is brought into disjunctive normal form; each
//! conjunctive clause is then rewritten so that the plain engine can decide
//! it:
//!
//! * negated connectivity becomes a nonempty two-part split of the set with
//!   no crossing edges (the split pair is vetoed structurally);
//! * negated acyclicity becomes a nonempty subset of minimum induced degree
//!   two;
//! * positive connectivity splits the clause into an empty-set variant and a
//!   nonempty variant carrying a consistent-cut pair (left/right side
//!   variables whose crossing edges are vetoed); the number of such counted
//!   pairs drives the power-of-two divisibility test;
//! * positive acyclicity adds a universal vertex to a copy of the graph and
//!   asks for an edge set that forms a tree on the set plus the new vertex:
//!   induced edges are force-included, edges to the new vertex are optional,
//!   an anchored cut certifies connectedness, and two exponent counters
//!   (edge count vs. vertex count) must agree at the root.

use neo_engine::EngineError;
use neo_graph::{ElimTree, Graph};
use neo_logic::{CoreBody, CoreFormula, FinRecSet, Prim, Term, VarKind};
use std::collections::{BTreeMap, BTreeSet};

/// Cap on the number of conjunctive clauses produced by DNF expansion.
pub const MAX_CLAUSES: usize = 4096;

pub const STAR_VERTEX_COLOR: &str = "_star";
pub const ORIG_VERTEX_COLOR: &str = "_orig";
pub const ORIG_EDGE_COLOR: &str = "_origedges";
pub const STAR_EDGE_COLOR: &str = "_staredges";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutKind {
    /// An unanchored consistent-cut pair: contributes a factor 2 per
    /// component and one unit to the divisibility exponent.
    Counted,
    /// A cut anchored at the universal vertex (acyclicity certificates):
    /// contributes a factor 2 per non-anchored component and nothing to the
    /// divisibility exponent.
    Anchored,
    /// A separation pair from negated connectivity: both sides are ordinary
    /// weighted variables; only the crossing-edge veto applies.
    Separator,
}

/// A pair of side variables whose crossing edges are structurally forbidden.
#[derive(Debug, Clone)]
pub struct CutSpec {
    pub kind: CutKind,
    pub left: String,
    pub right: String,
    /// restrict the crossing test to edges inside this edge-set variable
    pub edge_filter: Option<String>,
}

/// Bookkeeping of one positive acyclicity constraint after rewriting.
#[derive(Debug, Clone)]
pub struct AcySpec {
    /// the constrained vertex-set variable
    pub x: String,
    /// edge-set variable holding the candidate tree edges
    pub s_var: String,
}

/// One conjunctive clause under rewriting: variables, primitive atoms, the
/// literal list, and the structural constraints attached by the rewrites.
#[derive(Debug, Clone)]
pub struct Clause {
    pub vars: Vec<(String, VarKind)>,
    pub prims: Vec<Prim>,
    /// (prim index, positive) literals
    pub lits: Vec<(usize, bool)>,
    pub cuts: Vec<CutSpec>,
    pub acys: Vec<AcySpec>,
    /// true once the clause runs on the universal-vertex augmentation
    pub star: bool,
    /// contradictory literal pair detected; the clause is unsatisfiable
    pub dead: bool,
    fresh: usize,
}

fn term_vars(t: &Term, out: &mut BTreeSet<String>) {
    match t {
        Term::Var(x) => {
            out.insert(x.clone());
        }
        Term::Cup(a, b) | Term::Cap(a, b) | Term::SetMinus(a, b) => {
            term_vars(a, out);
            term_vars(b, out);
        }
        Term::Comp(a) => term_vars(a, out),
        Term::N { arg, edges, .. } => {
            term_vars(arg, out);
            if let Some(e) = edges {
                term_vars(e, out);
            }
        }
        _ => {}
    }
}

fn prim_vars(p: &Prim, out: &mut BTreeSet<String>) {
    match p {
        Prim::VertexEq(a, b) | Prim::EdgeEq(a, b) => {
            term_vars(a, out);
            term_vars(b, out);
        }
        Prim::NeighborEq { x, y, rhs, .. } => {
            out.insert(x.clone());
            out.insert(y.clone());
            term_vars(rhs, out);
        }
        Prim::Card { var, .. }
        | Prim::Conn { var, .. }
        | Prim::Acy { var, .. }
        | Prim::Clique { var } => {
            out.insert(var.clone());
        }
    }
}

fn var(x: &str) -> Term {
    Term::Var(x.to_string())
}

fn cup(a: Term, b: Term) -> Term {
    Term::Cup(Box::new(a), Box::new(b))
}

fn cap(a: Term, b: Term) -> Term {
    Term::Cap(Box::new(a), Box::new(b))
}

impl Clause {
    /// Extract one DNF clause of `core`, keeping only the primitives and
    /// variables it references.
    pub fn from_core_clause(core: &CoreFormula, lits: &BTreeMap<usize, bool>) -> Clause {
        let mut prims = Vec::new();
        let mut map: BTreeMap<usize, usize> = BTreeMap::new();
        let mut newlits = Vec::new();
        for (&i, &pol) in lits {
            let ni = *map.entry(i).or_insert_with(|| {
                prims.push(core.prims[i].clone());
                prims.len() - 1
            });
            newlits.push((ni, pol));
        }
        let mut used = BTreeSet::new();
        for p in &prims {
            prim_vars(p, &mut used);
        }
        let vars = core
            .vars
            .iter()
            .filter(|(n, _)| used.contains(n))
            .cloned()
            .collect();
        Clause {
            vars,
            prims,
            lits: newlits,
            cuts: Vec::new(),
            acys: Vec::new(),
            star: false,
            dead: false,
            fresh: 0,
        }
    }

    pub fn kind_of(&self, name: &str) -> Option<VarKind> {
        self.vars.iter().find(|(n, _)| n == name).map(|&(_, k)| k)
    }

    fn fresh_var(&mut self, kind: VarKind) -> String {
        let name = format!("_k{}", self.fresh);
        self.fresh += 1;
        self.vars.push((name.clone(), kind));
        name
    }

    fn prim_index(&mut self, p: Prim) -> usize {
        if let Some(i) = self.prims.iter().position(|q| *q == p) {
            return i;
        }
        self.prims.push(p);
        self.prims.len() - 1
    }

    fn add_lit(&mut self, p: Prim, positive: bool) {
        let i = self.prim_index(p);
        if self.lits.contains(&(i, !positive)) {
            self.dead = true;
        }
        if !self.lits.contains(&(i, positive)) {
            self.lits.push((i, positive));
        }
    }

    fn require(&mut self, p: Prim) {
        self.add_lit(p, true);
    }

    fn forbid(&mut self, p: Prim) {
        self.add_lit(p, false);
    }

    /// A vertex variable pinned to the whole vertex set, reusing one if the
    /// clause already defines it.
    fn ensure_allv(&mut self) -> String {
        for p in &self.prims {
            if let Prim::VertexEq(Term::Var(z), Term::AllV) | Prim::VertexEq(Term::AllV, Term::Var(z)) = p
            {
                return z.clone();
            }
        }
        let z = self.fresh_var(VarKind::VertexSet);
        self.require(Prim::VertexEq(var(&z), Term::AllV));
        z
    }

    /// An edge variable pinned to the whole edge set.
    fn ensure_alle(&mut self) -> String {
        for p in &self.prims {
            if let Prim::EdgeEq(Term::Var(z), Term::AllE) | Prim::EdgeEq(Term::AllE, Term::Var(z)) = p
            {
                return z.clone();
            }
        }
        let z = self.fresh_var(VarKind::EdgeSet);
        self.require(Prim::EdgeEq(var(&z), Term::AllE));
        z
    }

    /// Replace negated connectivity/acyclicity literals by their positive
    /// subformulas; negated clique literals stay (the summary state decides
    /// them at the root).
    pub fn rewrite_negations(mut self) -> Clause {
        let lits = std::mem::take(&mut self.lits);
        for (i, pol) in lits {
            let prim = self.prims[i].clone();
            match (prim, pol) {
                (Prim::Conn { var: x, is_edge }, false) => self.add_not_conn(&x, is_edge),
                (Prim::Acy { var: x, is_edge }, false) => self.add_not_acy(&x, is_edge),
                _ => {
                    if self.lits.contains(&(i, !pol)) {
                        self.dead = true;
                    }
                    if !self.lits.contains(&(i, pol)) {
                        self.lits.push((i, pol));
                    }
                }
            }
        }
        self
    }

    /// Nonempty two-part split of the set with no crossing edges.
    fn add_not_conn(&mut self, x: &str, is_edge: bool) {
        if !is_edge {
            let z1 = self.fresh_var(VarKind::VertexSet);
            let z2 = self.fresh_var(VarKind::VertexSet);
            self.require(Prim::VertexEq(cup(var(&z1), var(&z2)), var(x)));
            self.require(Prim::VertexEq(cap(var(&z1), var(&z2)), Term::Empty));
            self.forbid(Prim::VertexEq(var(&z1), Term::Empty));
            self.forbid(Prim::VertexEq(var(&z2), Term::Empty));
            self.cuts.push(CutSpec {
                kind: CutKind::Separator,
                left: z1,
                right: z2,
                edge_filter: None,
            });
        } else {
            // split the edge set into two nonempty parts covering disjoint
            // vertex sets
            let y1 = self.fresh_var(VarKind::EdgeSet);
            let y2 = self.fresh_var(VarKind::EdgeSet);
            self.require(Prim::EdgeEq(cup(var(&y1), var(&y2)), var(x)));
            self.require(Prim::EdgeEq(cap(var(&y1), var(&y2)), Term::Empty));
            self.forbid(Prim::EdgeEq(var(&y1), Term::Empty));
            self.forbid(Prim::EdgeEq(var(&y2), Term::Empty));
            let av = self.ensure_allv();
            let w1 = self.fresh_var(VarKind::VertexSet);
            self.require(Prim::NeighborEq {
                sigma: FinRecSet::geq(1),
                x: av.clone(),
                y: y1,
                rhs: var(&w1),
            });
            let w2 = self.fresh_var(VarKind::VertexSet);
            self.require(Prim::NeighborEq {
                sigma: FinRecSet::geq(1),
                x: av,
                y: y2,
                rhs: var(&w2),
            });
            self.require(Prim::VertexEq(cap(var(&w1), var(&w2)), Term::Empty));
        }
    }

    /// Nonempty subset of minimum degree two (a subgraph witnessing a cycle).
    fn add_not_acy(&mut self, x: &str, is_edge: bool) {
        if !is_edge {
            let yp = self.fresh_var(VarKind::VertexSet);
            self.require(Prim::VertexEq(cap(var(&yp), var(x)), var(&yp)));
            self.forbid(Prim::VertexEq(var(&yp), Term::Empty));
            let ae = self.ensure_alle();
            let b = self.fresh_var(VarKind::VertexSet);
            self.require(Prim::NeighborEq {
                sigma: FinRecSet::geq(2),
                x: yp.clone(),
                y: ae,
                rhs: var(&b),
            });
            self.require(Prim::VertexEq(cap(var(&yp), var(&b)), var(&yp)));
        } else {
            let yp = self.fresh_var(VarKind::EdgeSet);
            self.require(Prim::EdgeEq(cap(var(&yp), var(x)), var(&yp)));
            self.forbid(Prim::EdgeEq(var(&yp), Term::Empty));
            let av = self.ensure_allv();
            let w = self.fresh_var(VarKind::VertexSet);
            self.require(Prim::NeighborEq {
                sigma: FinRecSet::geq(1),
                x: av.clone(),
                y: yp.clone(),
                rhs: var(&w),
            });
            let b = self.fresh_var(VarKind::VertexSet);
            self.require(Prim::NeighborEq {
                sigma: FinRecSet::geq(2),
                x: av,
                y: yp,
                rhs: var(&b),
            });
            self.require(Prim::VertexEq(cap(var(&w), var(&b)), var(&w)));
        }
    }

    /// The primitive-atom list as a core formula with recomputed metadata.
    pub fn build_core(&self) -> CoreFormula {
        let mut cat = Vec::new();
        let mut eq_v = Vec::new();
        let mut eq_e = Vec::new();
        let mut measured = Vec::new();
        let mut d_phi = 1u32;
        let mut p_phi = 1u32;
        for (i, p) in self.prims.iter().enumerate() {
            match p {
                Prim::VertexEq(..) => eq_v.push(i),
                Prim::EdgeEq(..) => eq_e.push(i),
                Prim::NeighborEq { sigma, x, y, .. } => {
                    eq_v.push(i);
                    let pair = (x.clone(), y.clone());
                    if !cat.contains(&pair) {
                        cat.push(pair);
                    }
                    d_phi = d_phi.max(sigma.d);
                    p_phi = lcm(p_phi, sigma.p);
                }
                Prim::Card { var, .. } => {
                    if !measured.contains(var) {
                        measured.push(var.clone());
                    }
                }
                _ => {}
            }
        }
        let body = CoreBody::And(
            self.lits
                .iter()
                .map(|&(i, pol)| {
                    if pol {
                        CoreBody::Prim(i)
                    } else {
                        CoreBody::Not(Box::new(CoreBody::Prim(i)))
                    }
                })
                .collect(),
        );
        CoreFormula {
            vars: self.vars.clone(),
            prims: self.prims.clone(),
            body,
            cat,
            eq_v,
            eq_e,
            measured_vars: measured,
            d_phi,
            p_phi,
        }
    }

    fn positive_special(&self, want_conn: bool) -> Vec<(usize, String, bool)> {
        self.lits
            .iter()
            .filter_map(|&(i, pol)| {
                if !pol {
                    return None;
                }
                match &self.prims[i] {
                    Prim::Conn { var, is_edge } if want_conn => {
                        Some((i, var.clone(), *is_edge))
                    }
                    Prim::Acy { var, is_edge } if !want_conn => {
                        Some((i, var.clone(), *is_edge))
                    }
                    _ => None,
                }
            })
            .collect()
    }
}

fn lcm(a: u32, b: u32) -> u32 {
    fn gcd(a: u32, b: u32) -> u32 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

/// DNF expansion of a core body into literal maps (prim index -> polarity).
/// Clauses containing a contradictory pair are dropped.
fn dnf_of(b: &CoreBody, neg: bool) -> Result<Vec<BTreeMap<usize, bool>>, EngineError> {
    Ok(match (b, neg) {
        (CoreBody::Prim(i), _) => vec![BTreeMap::from([(*i, !neg)])],
        (CoreBody::Not(x), _) => dnf_of(x, !neg)?,
        (CoreBody::And(xs), false) | (CoreBody::Or(xs), true) => {
            let mut acc: Vec<BTreeMap<usize, bool>> = vec![BTreeMap::new()];
            for x in xs {
                let parts = dnf_of(x, neg)?;
                let mut next = Vec::new();
                for a in &acc {
                    'parts: for p in &parts {
                        let mut m = a.clone();
                        for (&i, &pol) in p {
                            if let Some(old) = m.insert(i, pol) {
                                if old != pol {
                                    continue 'parts;
                                }
                            }
                        }
                        next.push(m);
                    }
                }
                if next.len() > MAX_CLAUSES {
                    return Err(EngineError::TooLarge(format!(
                        "disjunctive normal form exceeds {MAX_CLAUSES} clauses"
                    )));
                }
                acc = next;
            }
            acc
        }
        (CoreBody::Or(xs), false) | (CoreBody::And(xs), true) => {
            let mut acc = Vec::new();
            for x in xs {
                acc.extend(dnf_of(x, neg)?);
                if acc.len() > MAX_CLAUSES {
                    return Err(EngineError::TooLarge(format!(
                        "disjunctive normal form exceeds {MAX_CLAUSES} clauses"
                    )));
                }
            }
            acc
        }
    })
}

/// Expand the body into conjunctive clauses and rewrite negated
/// connectivity/acyclicity literals away. Contradictory clauses are dropped.
pub fn rewrite_for_dnf(core: &CoreFormula) -> Result<Vec<Clause>, EngineError> {
    let mut out = Vec::new();
    let mut seen: BTreeSet<Vec<(usize, bool)>> = BTreeSet::new();
    for lits in dnf_of(&core.body, false)? {
        let key: Vec<(usize, bool)> = lits.iter().map(|(&i, &p)| (i, p)).collect();
        if !seen.insert(key) {
            continue;
        }
        let cl = Clause::from_core_clause(core, &lits).rewrite_negations();
        if !cl.dead {
            out.push(cl);
        }
    }
    Ok(out)
}

/// Replace positive connectivity literals by consistent-cut pairs. Each
/// constraint splits the clause into an empty-set variant and a nonempty
/// variant with a counted cut, so that a clause's solutions contribute a
/// factor of exactly two per nonempty connected constraint.
pub fn rewrite_connectivity(mut clause: Clause) -> Vec<Clause> {
    let conns = clause.positive_special(true);
    clause.lits.retain(|&(i, pol)| {
        !(pol && conns.iter().any(|&(j, _, _)| j == i))
    });
    let mut out = vec![clause];
    for (_, x, is_edge) in conns {
        let mut next = Vec::new();
        for c in out {
            // empty-set variant: vacuously connected
            let mut ce = c.clone();
            if is_edge {
                ce.require(Prim::EdgeEq(var(&x), Term::Empty));
            } else {
                ce.require(Prim::VertexEq(var(&x), Term::Empty));
            }
            next.push(ce);
            // nonempty variant: consistent-cut pair
            let mut cc = c;
            if is_edge {
                cc.forbid(Prim::EdgeEq(var(&x), Term::Empty));
                let av = cc.ensure_allv();
                let w = cc.fresh_var(VarKind::VertexSet);
                cc.require(Prim::NeighborEq {
                    sigma: FinRecSet::geq(1),
                    x: av,
                    y: x.clone(),
                    rhs: var(&w),
                });
                let wl = cc.fresh_var(VarKind::VertexSet);
                let wr = cc.fresh_var(VarKind::VertexSet);
                cc.require(Prim::VertexEq(cup(var(&wl), var(&wr)), var(&w)));
                cc.require(Prim::VertexEq(cap(var(&wl), var(&wr)), Term::Empty));
                cc.cuts.push(CutSpec {
                    kind: CutKind::Counted,
                    left: wl,
                    right: wr,
                    edge_filter: Some(x.clone()),
                });
            } else {
                cc.forbid(Prim::VertexEq(var(&x), Term::Empty));
                let xl = cc.fresh_var(VarKind::VertexSet);
                let xr = cc.fresh_var(VarKind::VertexSet);
                cc.require(Prim::VertexEq(cup(var(&xl), var(&xr)), var(&x)));
                cc.require(Prim::VertexEq(cap(var(&xl), var(&xr)), Term::Empty));
                cc.cuts.push(CutSpec {
                    kind: CutKind::Counted,
                    left: xl,
                    right: xr,
                    edge_filter: None,
                });
            }
            next.push(cc);
        }
        out = next;
    }
    out.retain(|c| !c.dead);
    out
}

fn relativize_term(t: &Term, is_edge: bool) -> Term {
    match t {
        Term::AllV => Term::Color(ORIG_VERTEX_COLOR.to_string()),
        Term::AllE => Term::Color(ORIG_EDGE_COLOR.to_string()),
        Term::Comp(a) => Term::SetMinus(
            Box::new(Term::Color(
                if is_edge { ORIG_EDGE_COLOR } else { ORIG_VERTEX_COLOR }.to_string(),
            )),
            Box::new(relativize_term(a, is_edge)),
        ),
        Term::Cup(a, b) => Term::Cup(
            Box::new(relativize_term(a, is_edge)),
            Box::new(relativize_term(b, is_edge)),
        ),
        Term::Cap(a, b) => Term::Cap(
            Box::new(relativize_term(a, is_edge)),
            Box::new(relativize_term(b, is_edge)),
        ),
        Term::SetMinus(a, b) => Term::SetMinus(
            Box::new(relativize_term(a, is_edge)),
            Box::new(relativize_term(b, is_edge)),
        ),
        other => other.clone(),
    }
}

/// Rewrite every primitive so it evaluates over the original structure when
/// a universal vertex is added: the full vertex/edge sets become colors of
/// the original elements, and neighborhood right-hand sides absorb the new
/// vertex when the condition set contains zero.
fn relativize_prim(p: &mut Prim) {
    match p {
        Prim::VertexEq(a, b) => {
            *a = relativize_term(a, false);
            *b = relativize_term(b, false);
        }
        Prim::EdgeEq(a, b) => {
            *a = relativize_term(a, true);
            *b = relativize_term(b, true);
        }
        Prim::NeighborEq { sigma, rhs, .. } => {
            let mut r = relativize_term(rhs, false);
            if sigma.contains(0) {
                r = cup(r, Term::Color(STAR_VERTEX_COLOR.to_string()));
            }
            *rhs = r;
        }
        _ => {}
    }
}

/// Copy of the graph and tree with a universal vertex appended as the new
/// root, plus marker colors for the original and added elements.
pub fn augment_with_universal_vertex(
    g: &Graph,
    t: &ElimTree,
) -> Result<(Graph, ElimTree), EngineError> {
    let star = g.n;
    let mut edges = g.edges.clone();
    for v in 0..g.n {
        edges.push((v, star));
    }
    let mut g2 = Graph::new(g.n + 1, &edges)?;
    for (name, vs) in &g.vertex_colors {
        g2.add_vertex_color(name, vs)?;
    }
    for (name, ids) in &g.edge_colors {
        for &e in ids {
            let (u, v) = g.edges[e];
            g2.add_edge_color(name, u, v)?;
        }
    }
    g2.add_vertex_color(STAR_VERTEX_COLOR, &[star])?;
    let orig: Vec<usize> = (0..g.n).collect();
    g2.add_vertex_color(ORIG_VERTEX_COLOR, &orig)?;
    for &(u, v) in &g.edges {
        g2.add_edge_color(ORIG_EDGE_COLOR, u, v)?;
    }
    for v in 0..g.n {
        g2.add_edge_color(STAR_EDGE_COLOR, v, star)?;
    }
    let mut parent: Vec<Option<usize>> = (0..g.n)
        .map(|v| t.parent[v].or(Some(star)))
        .collect();
    parent.push(None);
    let mut order: Vec<usize> = vec![star];
    order.extend(0..g.n);
    let t2 = ElimTree::from_parents(parent, &order)?;
    Ok((g2, t2))
}

/// Replace positive acyclicity literals by tree certificates over a copy of
/// the graph with a universal vertex. Returns the augmented graph and tree
/// when the clause needed them.
pub fn rewrite_acyclicity(
    g: &Graph,
    t: &ElimTree,
    mut clause: Clause,
) -> Result<(Clause, Option<(Graph, ElimTree)>), EngineError> {
    let acys = clause.positive_special(false);
    if acys.is_empty() {
        return Ok((clause, None));
    }
    if acys.iter().any(|&(_, _, is_edge)| is_edge) {
        return Err(EngineError::UnsupportedPredicate(
            "acyclicity over edge sets",
        ));
    }
    clause
        .lits
        .retain(|&(i, pol)| !(pol && acys.iter().any(|&(j, _, _)| j == i)));

    // evaluate all existing primitives over the original structure only
    for p in &mut clause.prims {
        relativize_prim(p);
    }
    // the universal vertex joins no set variable of the original clause
    let vnames: Vec<String> = clause
        .vars
        .iter()
        .filter(|(_, k)| *k == VarKind::VertexSet)
        .map(|(n, _)| n.clone())
        .collect();
    for x in vnames {
        clause.require(Prim::VertexEq(
            cap(var(&x), Term::Color(STAR_VERTEX_COLOR.to_string())),
            Term::Empty,
        ));
    }

    for (_, x, _) in acys {
        let s = clause.fresh_var(VarKind::EdgeSet);
        let al = clause.fresh_var(VarKind::VertexSet);
        let ar = clause.fresh_var(VarKind::VertexSet);
        clause.require(Prim::VertexEq(
            cup(var(&al), var(&ar)),
            cup(var(&x), Term::Color(STAR_VERTEX_COLOR.to_string())),
        ));
        clause.require(Prim::VertexEq(cap(var(&al), var(&ar)), Term::Empty));
        clause.require(Prim::VertexEq(
            cap(Term::Color(STAR_VERTEX_COLOR.to_string()), var(&al)),
            Term::Color(STAR_VERTEX_COLOR.to_string()),
        ));
        clause.cuts.push(CutSpec {
            kind: CutKind::Anchored,
            left: al,
            right: ar,
            edge_filter: Some(s.clone()),
        });
        clause.acys.push(AcySpec { x, s_var: s });
    }
    clause.star = true;
    let aug = augment_with_universal_vertex(g, t)?;
    Ok((clause, Some(aug)))
}
