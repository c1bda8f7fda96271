//! Normalization into the core fragment.
//!
//! A core formula is an existential prefix of set variables over a boolean
//! combination of primitive atoms of seven kinds: pointwise vertex-term
//! equalities, pointwise edge-term equalities, neighborhood equalities
//! `N^sigma(X, Y) = t` with variable arguments and an operator-free
//! right-hand side, size measurements on variables, and the connectivity /
//! acyclicity / clique predicates on variables.
//!
//! `to_core` performs, in order: quantifier hoisting, elimination of element
//! variables via singleton sets (with nonemptiness guards and one added size
//! measurement), inclusion removal (`t1 ⊆ t2` becomes `t1 ∩ t2 = t1`),
//! completion of unary neighborhood operators (`N^sigma(t)` becomes
//! `N^sigma(t, E)`), and flattening of nested operators and non-variable
//! arguments through fresh variables. Fresh variables carry defining
//! equalities that are conjoined at the top level; each is functionally
//! determined by the original variables, so the rewriting preserves models
//! even when the rewritten atom sits under a negation.

use crate::{Atom, Body, CardCmp, FinRecSet, Formula, LogicError, Term, VarKind};
use std::collections::{BTreeMap, BTreeSet};

/// Primitive atom of the core fragment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Prim {
    /// pointwise equality of operator-free vertex terms
    VertexEq(Term, Term),
    /// pointwise equality of operator-free edge terms
    EdgeEq(Term, Term),
    /// `N^sigma(X, Y) = rhs` with `rhs` operator-free
    NeighborEq {
        sigma: FinRecSet,
        x: String,
        y: String,
        rhs: Term,
    },
    /// size measurement on a variable
    Card {
        var: String,
        cmp: CardCmp,
        bound: u64,
    },
    Conn { var: String, is_edge: bool },
    Acy { var: String, is_edge: bool },
    Clique { var: String },
}

pub type Cmp = CardCmp;

/// Boolean structure over primitive atoms (indices into `CoreFormula::prims`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoreBody {
    Prim(usize),
    And(Vec<CoreBody>),
    Or(Vec<CoreBody>),
    Not(Box<CoreBody>),
}

#[derive(Debug, Clone)]
pub struct CoreFormula {
    /// existential prefix: original set variables, then variables introduced
    /// by element elimination and flattening
    pub vars: Vec<(String, VarKind)>,
    pub prims: Vec<Prim>,
    pub body: CoreBody,
    /// distinct (vertex variable, edge variable) pairs under a neighborhood
    /// operator
    pub cat: Vec<(String, String)>,
    /// indices of vertex-term equality prims (incl. neighborhood equalities)
    pub eq_v: Vec<usize>,
    /// indices of edge-term equality prims
    pub eq_e: Vec<usize>,
    /// measured variables in order of first measurement
    pub measured_vars: Vec<String>,
    pub d_phi: u32,
    pub p_phi: u32,
}

impl CoreFormula {
    pub fn kind_of(&self, name: &str) -> Option<VarKind> {
        self.vars.iter().find(|(n, _)| n == name).map(|&(_, k)| k)
    }

    /// All equality prim indices (the set `False` guesses range over).
    pub fn eq_prims(&self) -> Vec<usize> {
        let mut v = self.eq_v.clone();
        v.extend_from_slice(&self.eq_e);
        v.sort_unstable();
        v
    }

    pub fn measured_index(&self, var: &str) -> Option<usize> {
        self.measured_vars.iter().position(|m| m == var)
    }

    pub fn sigma_multiset(&self) -> Vec<FinRecSet> {
        let mut out: Vec<FinRecSet> = self
            .prims
            .iter()
            .filter_map(|p| match p {
                Prim::NeighborEq { sigma, .. } => Some(sigma.clone()),
                _ => None,
            })
            .collect();
        out.sort();
        out
    }

    /// Symbol count, measured like `Formula::size`.
    pub fn size(&self) -> usize {
        fn prim_size(p: &Prim) -> usize {
            match p {
                Prim::VertexEq(a, b) | Prim::EdgeEq(a, b) => 1 + tsize(a) + tsize(b),
                Prim::NeighborEq { rhs, .. } => 5 + tsize(rhs),
                Prim::Card { .. } => 3,
                Prim::Conn { .. } | Prim::Acy { .. } | Prim::Clique { .. } => 2,
            }
        }
        fn tsize(t: &Term) -> usize {
            match t {
                Term::Var(_) | Term::AllV | Term::AllE | Term::Empty | Term::Color(_) => 1,
                Term::Cup(a, b) | Term::Cap(a, b) | Term::SetMinus(a, b) => {
                    1 + tsize(a) + tsize(b)
                }
                Term::Comp(a) => 1 + tsize(a),
                Term::N { .. } => unreachable!("core terms are operator-free"),
            }
        }
        fn bsize(b: &CoreBody, prims: &[Prim]) -> usize {
            match b {
                CoreBody::Prim(i) => prim_size(&prims[*i]),
                CoreBody::And(xs) | CoreBody::Or(xs) => {
                    1 + xs.iter().map(|x| bsize(x, prims)).sum::<usize>()
                }
                CoreBody::Not(x) => 1 + bsize(x, prims),
            }
        }
        self.vars.len() + bsize(&self.body, &self.prims)
    }
}

/// Metadata bundle derived from a core formula.
#[derive(Debug, Clone)]
pub struct FormulaConstants {
    pub d_phi: u32,
    pub p_phi: u32,
    pub cat: Vec<(String, String)>,
    pub eq_v: Vec<usize>,
    pub eq_e: Vec<usize>,
    pub measured_vars: Vec<String>,
}

pub fn formula_constants(core: &CoreFormula) -> FormulaConstants {
    FormulaConstants {
        d_phi: core.d_phi,
        p_phi: core.p_phi,
        cat: core.cat.clone(),
        eq_v: core.eq_v.clone(),
        eq_e: core.eq_e.clone(),
        measured_vars: core.measured_vars.clone(),
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

struct Builder {
    vars: Vec<(String, VarKind)>,
    kinds: BTreeMap<String, VarKind>,
    prims: Vec<Prim>,
    /// defining constraints for fresh variables, conjoined at top level
    aux: Vec<CoreBody>,
    fresh: usize,
}

impl Builder {
    fn fresh_var(&mut self, kind: VarKind) -> String {
        let name = format!("_g{}", self.fresh);
        self.fresh += 1;
        self.vars.push((name.clone(), kind));
        self.kinds.insert(name.clone(), kind);
        name
    }

    fn push_prim(&mut self, p: Prim) -> usize {
        // dedup identical defining prims to keep the formula small
        if let Some(i) = self.prims.iter().position(|q| *q == p) {
            return i;
        }
        self.prims.push(p);
        self.prims.len() - 1
    }

    /// Operator-free form of a vertex-sort term; nested `N` operators are
    /// replaced by fresh variables with defining neighborhood equalities.
    fn flatten_vterm(&mut self, t: &Term) -> Term {
        match t {
            Term::Cup(a, b) => Term::Cup(
                Box::new(self.flatten_vterm(a)),
                Box::new(self.flatten_vterm(b)),
            ),
            Term::Cap(a, b) => Term::Cap(
                Box::new(self.flatten_vterm(a)),
                Box::new(self.flatten_vterm(b)),
            ),
            Term::SetMinus(a, b) => Term::SetMinus(
                Box::new(self.flatten_vterm(a)),
                Box::new(self.flatten_vterm(b)),
            ),
            Term::Comp(a) => Term::Comp(Box::new(self.flatten_vterm(a))),
            Term::N { .. } => {
                let w = self.fresh_var(VarKind::VertexSet);
                let rhs = Term::Var(w.clone());
                self.neighbor_eq_prim(t, rhs.clone());
                rhs
            }
            other => other.clone(),
        }
    }

    /// Emit `N^sigma(X, Y) = rhs` for an `N` term, introducing fresh
    /// variables for non-variable arguments, and conjoin it to `aux`.
    fn neighbor_eq_prim(&mut self, n_term: &Term, rhs: Term) {
        let Term::N { sigma, arg, edges } = n_term else {
            unreachable!("caller passes an N term")
        };
        let x = self.ensure_var(arg, VarKind::VertexSet);
        let edge_term = edges
            .as_ref()
            .map(|e| (**e).clone())
            .unwrap_or(Term::AllE);
        let y = self.ensure_var(&edge_term, VarKind::EdgeSet);
        let i = self.push_prim(Prim::NeighborEq {
            sigma: sigma.clone(),
            x,
            y,
            rhs,
        });
        self.aux.push(CoreBody::Prim(i));
    }

    /// A variable denoting the given term, introducing a fresh one with a
    /// defining pointwise equality if the term is not already a variable.
    fn ensure_var(&mut self, t: &Term, kind: VarKind) -> String {
        let flat = match kind {
            VarKind::EdgeSet => t.clone(), // edge terms never contain N
            _ => self.flatten_vterm(t),
        };
        if let Term::Var(x) = &flat {
            return x.clone();
        }
        let w = self.fresh_var(kind);
        let prim = match kind {
            VarKind::EdgeSet => Prim::EdgeEq(Term::Var(w.clone()), flat),
            _ => Prim::VertexEq(Term::Var(w.clone()), flat),
        };
        let i = self.push_prim(prim);
        self.aux.push(CoreBody::Prim(i));
        w
    }
}

/// Sort of a term: true if edge-sort. Uses variable kinds; colors inherit
/// the sort forced by context (resolved during inference in the parser).
fn term_is_edge(t: &Term, kinds: &BTreeMap<String, VarKind>) -> bool {
    match t {
        Term::Var(x) => kinds.get(x) == Some(&VarKind::EdgeSet),
        Term::AllE => true,
        Term::AllV | Term::N { .. } => false,
        Term::Cup(a, b) | Term::Cap(a, b) | Term::SetMinus(a, b) => {
            term_is_edge(a, kinds) || term_is_edge(b, kinds)
        }
        Term::Comp(a) => term_is_edge(a, kinds),
        Term::Empty | Term::Color(_) => false,
    }
}

pub fn to_core(ast: &Formula) -> Result<CoreFormula, LogicError> {
    // 1. hoist nested existentials
    let mut vars = ast.vars.clone();
    let mut declared: BTreeSet<String> = vars.iter().map(|(n, _)| n.clone()).collect();
    let body = hoist(&ast.body, &mut vars, &mut declared, false)?;

    let mut b = Builder {
        kinds: vars.iter().cloned().collect(),
        vars,
        prims: Vec::new(),
        aux: Vec::new(),
        fresh: 0,
    };

    // 2. eliminate element variables: x becomes a nonempty set variable X_x,
    //    constrained together with the other element variables by one size
    //    measurement |X_1 ∪ ... ∪ X_t| <= t.
    let elem_vars: Vec<String> = b
        .vars
        .iter()
        .filter(|(_, k)| *k == VarKind::VertexElem)
        .map(|(n, _)| n.clone())
        .collect();
    for (name, kind) in b.vars.iter_mut() {
        if *kind == VarKind::VertexElem {
            *kind = VarKind::VertexSet;
            b.kinds.insert(name.clone(), VarKind::VertexSet);
        }
    }
    let body = eliminate_elements(&body);
    let mut guards: Vec<CoreBody> = Vec::new();
    if !elem_vars.is_empty() {
        let union = elem_vars
            .iter()
            .skip(1)
            .fold(Term::Var(elem_vars[0].clone()), |acc, v| {
                Term::Cup(Box::new(acc), Box::new(Term::Var(v.clone())))
            });
        let u = b.ensure_var(&union, VarKind::VertexSet);
        let i = b.push_prim(Prim::Card {
            var: u,
            cmp: CardCmp::Leq,
            bound: elem_vars.len() as u64,
        });
        guards.push(CoreBody::Prim(i));
        for x in &elem_vars {
            let i = b.push_prim(Prim::VertexEq(Term::Var(x.clone()), Term::Empty));
            guards.push(CoreBody::Not(Box::new(CoreBody::Prim(i))));
        }
    }

    // 3.-5. rewrite atoms into primitives
    let main = convert_body(&body, &mut b)?;
    let mut parts = std::mem::take(&mut b.aux);
    parts.extend(guards);
    parts.push(main);
    let body = if parts.len() == 1 {
        parts.pop().unwrap()
    } else {
        CoreBody::And(parts)
    };

    // metadata
    let mut cat = Vec::new();
    let mut eq_v = Vec::new();
    let mut eq_e = Vec::new();
    let mut measured = Vec::new();
    let mut d_phi = 1u32;
    let mut p_phi = 1u32;
    for (i, p) in b.prims.iter().enumerate() {
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
    Ok(CoreFormula {
        vars: b.vars,
        prims: b.prims,
        body,
        cat,
        eq_v,
        eq_e,
        measured_vars: measured,
        d_phi,
        p_phi,
    })
}

fn hoist(
    body: &Body,
    vars: &mut Vec<(String, VarKind)>,
    declared: &mut BTreeSet<String>,
    under_not: bool,
) -> Result<Body, LogicError> {
    Ok(match body {
        Body::Exists(names, inner) => {
            if under_not {
                return Err(LogicError::QuantifierUnderNegation);
            }
            for n in names {
                if !declared.insert(n.clone()) {
                    return Err(LogicError::Redeclared(n.clone()));
                }
                // kind was inferred at parse time and stored on the AST root;
                // nested declarations default to vertex sets unless the parser
                // recorded otherwise — the parser hoists declarations itself,
                // so this only runs for hand-built ASTs
                vars.push((n.clone(), VarKind::VertexSet));
            }
            hoist(inner, vars, declared, under_not)?
        }
        Body::And(xs) => Body::And(
            xs.iter()
                .map(|x| hoist(x, vars, declared, under_not))
                .collect::<Result<_, _>>()?,
        ),
        Body::Or(xs) => Body::Or(
            xs.iter()
                .map(|x| hoist(x, vars, declared, under_not))
                .collect::<Result<_, _>>()?,
        ),
        Body::Not(x) => Body::Not(Box::new(hoist(x, vars, declared, true)?)),
        Body::Atom(a) => Body::Atom(a.clone()),
    })
}

/// Replace element atoms by set atoms over the corresponding singleton-set
/// variables: `x in t` becomes `X_x ⊆ t`, adjacency becomes a
/// neighborhood inclusion with sigma = {1}, element equality becomes set
/// equality.
fn eliminate_elements(body: &Body) -> Body {
    match body {
        Body::Atom(Atom::In(x, t)) => Body::Atom(Atom::SubsetEq(Term::Var(x.clone()), t.clone())),
        Body::Atom(Atom::Adj(x, y)) => Body::Atom(Atom::SubsetEq(
            Term::Var(x.clone()),
            Term::N {
                sigma: FinRecSet::eq(1),
                arg: Box::new(Term::Var(y.clone())),
                edges: None,
            },
        )),
        Body::Atom(a) => Body::Atom(a.clone()),
        Body::And(xs) => Body::And(xs.iter().map(eliminate_elements).collect()),
        Body::Or(xs) => Body::Or(xs.iter().map(eliminate_elements).collect()),
        Body::Not(x) => Body::Not(Box::new(eliminate_elements(x))),
        Body::Exists(vs, x) => Body::Exists(vs.clone(), Box::new(eliminate_elements(x))),
    }
}

fn convert_body(body: &Body, b: &mut Builder) -> Result<CoreBody, LogicError> {
    Ok(match body {
        Body::And(xs) => CoreBody::And(
            xs.iter()
                .map(|x| convert_body(x, b))
                .collect::<Result<_, _>>()?,
        ),
        Body::Or(xs) => CoreBody::Or(
            xs.iter()
                .map(|x| convert_body(x, b))
                .collect::<Result<_, _>>()?,
        ),
        Body::Not(x) => CoreBody::Not(Box::new(convert_body(x, b)?)),
        Body::Exists(..) => unreachable!("quantifiers hoisted before conversion"),
        Body::Atom(a) => convert_atom(a, b)?,
    })
}

fn convert_atom(a: &Atom, b: &mut Builder) -> Result<CoreBody, LogicError> {
    Ok(match a {
        Atom::SupsetEq(t1, t2) => convert_atom(&Atom::SubsetEq(t2.clone(), t1.clone()), b)?,
        Atom::SubsetEq(t1, t2) => convert_atom(
            &Atom::Eq(
                Term::Cap(Box::new(t1.clone()), Box::new(t2.clone())),
                t1.clone(),
            ),
            b,
        )?,
        Atom::Eq(t1, t2) => {
            if term_is_edge(t1, &b.kinds) || term_is_edge(t2, &b.kinds) {
                let i = b.push_prim(Prim::EdgeEq(t1.clone(), t2.clone()));
                CoreBody::Prim(i)
            } else {
                // keep the direct shape N^sigma(X, Y) = t when one side is a
                // lone operator and the other is operator-free
                let i = match (t1, t2) {
                    (Term::N { .. }, t) | (t, Term::N { .. }) if !t.contains_n() => {
                        let n_term = if matches!(t1, Term::N { .. }) { t1 } else { t2 };
                        let Term::N { sigma, arg, edges } = n_term else {
                            unreachable!()
                        };
                        let x = b.ensure_var(arg, VarKind::VertexSet);
                        let edge_term = edges
                            .as_ref()
                            .map(|e| (**e).clone())
                            .unwrap_or(Term::AllE);
                        let y = b.ensure_var(&edge_term, VarKind::EdgeSet);
                        b.push_prim(Prim::NeighborEq {
                            sigma: sigma.clone(),
                            x,
                            y,
                            rhs: t.clone(),
                        })
                    }
                    _ => {
                        let l = b.flatten_vterm(t1);
                        let r = b.flatten_vterm(t2);
                        b.push_prim(Prim::VertexEq(l, r))
                    }
                };
                CoreBody::Prim(i)
            }
        }
        Atom::Card(t, cmp, k) => {
            let kind = if term_is_edge(t, &b.kinds) {
                VarKind::EdgeSet
            } else {
                VarKind::VertexSet
            };
            let var = b.ensure_var(t, kind);
            let i = b.push_prim(Prim::Card {
                var,
                cmp: *cmp,
                bound: *k,
            });
            CoreBody::Prim(i)
        }
        Atom::Conn(t) => {
            let is_edge = term_is_edge(t, &b.kinds);
            let kind = if is_edge {
                VarKind::EdgeSet
            } else {
                VarKind::VertexSet
            };
            let var = b.ensure_var(t, kind);
            CoreBody::Prim(b.push_prim(Prim::Conn { var, is_edge }))
        }
        Atom::Acy(t) => {
            let is_edge = term_is_edge(t, &b.kinds);
            let kind = if is_edge {
                VarKind::EdgeSet
            } else {
                VarKind::VertexSet
            };
            let var = b.ensure_var(t, kind);
            CoreBody::Prim(b.push_prim(Prim::Acy { var, is_edge }))
        }
        Atom::Clique(t) => {
            let var = b.ensure_var(t, VarKind::VertexSet);
            CoreBody::Prim(b.push_prim(Prim::Clique { var }))
        }
        Atom::In(..) | Atom::Adj(..) => unreachable!("element atoms eliminated earlier"),
    })
}

/// Truth of the core body under a guess: every equality prim in `false_set`
/// is replaced by false (the rest by true) and every measurement on the i-th
/// measured variable compares `c_bar[i]` against its bound. Connectivity,
/// acyclicity and clique prims must not occur (they are rewritten away or
/// handled by their dedicated drivers before this is called).
pub fn eval_under_guess(core: &CoreFormula, false_set: &BTreeSet<usize>, c_bar: &[u64]) -> bool {
    eval_under_guess_with(core, false_set, c_bar, &|_| {
        panic!("connectivity/acyclicity/clique prim has no guessed value")
    })
}

/// As `eval_under_guess`, with an explicit truth value for connectivity /
/// acyclicity / clique prims (used by the clique driver).
pub fn eval_under_guess_with(
    core: &CoreFormula,
    false_set: &BTreeSet<usize>,
    c_bar: &[u64],
    special: &dyn Fn(usize) -> bool,
) -> bool {
    fn eval(
        b: &CoreBody,
        core: &CoreFormula,
        false_set: &BTreeSet<usize>,
        c_bar: &[u64],
        special: &dyn Fn(usize) -> bool,
    ) -> bool {
        match b {
            CoreBody::And(xs) => xs.iter().all(|x| eval(x, core, false_set, c_bar, special)),
            CoreBody::Or(xs) => xs.iter().any(|x| eval(x, core, false_set, c_bar, special)),
            CoreBody::Not(x) => !eval(x, core, false_set, c_bar, special),
            CoreBody::Prim(i) => match &core.prims[*i] {
                Prim::VertexEq(..) | Prim::EdgeEq(..) | Prim::NeighborEq { .. } => {
                    !false_set.contains(i)
                }
                Prim::Card { var, cmp, bound } => {
                    let pos = core
                        .measured_index(var)
                        .expect("measured variable is registered");
                    cmp.holds(c_bar[pos], *bound)
                }
                Prim::Conn { .. } | Prim::Acy { .. } | Prim::Clique { .. } => special(*i),
            },
        }
    }
    eval(&core.body, core, false_set, c_bar, special)
}

/// Express a core formula back in surface syntax (used to run the semantic
/// oracle on the core form and compare with the original).
pub fn core_to_ast(core: &CoreFormula) -> Formula {
    fn prim_atom(p: &Prim) -> Atom {
        match p {
            Prim::VertexEq(a, b) | Prim::EdgeEq(a, b) => Atom::Eq(a.clone(), b.clone()),
            Prim::NeighborEq { sigma, x, y, rhs } => Atom::Eq(
                Term::N {
                    sigma: sigma.clone(),
                    arg: Box::new(Term::Var(x.clone())),
                    edges: Some(Box::new(Term::Var(y.clone()))),
                },
                rhs.clone(),
            ),
            Prim::Card { var, cmp, bound } => {
                Atom::Card(Term::Var(var.clone()), *cmp, *bound)
            }
            Prim::Conn { var, .. } => Atom::Conn(Term::Var(var.clone())),
            Prim::Acy { var, .. } => Atom::Acy(Term::Var(var.clone())),
            Prim::Clique { var } => Atom::Clique(Term::Var(var.clone())),
        }
    }
    fn conv(b: &CoreBody, prims: &[Prim]) -> Body {
        match b {
            CoreBody::Prim(i) => Body::Atom(prim_atom(&prims[*i])),
            CoreBody::And(xs) => Body::And(xs.iter().map(|x| conv(x, prims)).collect()),
            CoreBody::Or(xs) => Body::Or(xs.iter().map(|x| conv(x, prims)).collect()),
            CoreBody::Not(x) => Body::Not(Box::new(conv(x, prims))),
        }
    }
    Formula {
        vars: core.vars.clone(),
        body: conv(&core.body, &core.prims),
    }
}
