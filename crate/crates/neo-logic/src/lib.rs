//! Formula frontend: finitely recognizable neighborhood-condition sets,
//! S-expression surface syntax, sort inference, and normalization into the
//! core fragment consumed by the engine.
//!
//! The logic is fully existential: a prefix of existential set variables over
//! vertices and edges (element variables are eliminated by a singleton-set
//! encoding), followed by a boolean combination of primitive atoms — term
//! equalities and inclusions, neighborhood operators `N^sigma(X, Y)`, size
//! measurements, and the connectivity / acyclicity / clique predicates.

mod core_form;
mod parser;
mod sigma;

pub use core_form::{
    core_to_ast, eval_under_guess, eval_under_guess_with, formula_constants, to_core, Cmp,
    CoreBody, CoreFormula, FormulaConstants, Prim,
};
pub use parser::parse;
pub use sigma::{sigma_member_high, FinRecSet};

use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LogicError {
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("unknown neighborhood-set name {name:?} at {line}:{col}")]
    UnknownSigmaName { name: String, line: usize, col: usize },
    #[error("variable {0:?} uses the reserved `_` prefix")]
    ReservedName(String),
    #[error("undeclared variable {0:?}")]
    Undeclared(String),
    #[error("variable {0:?} declared twice")]
    Redeclared(String),
    #[error("sort conflict: {0}")]
    SortConflict(String),
    #[error("quantifier under negation is not allowed")]
    QuantifierUnderNegation,
}

/// Sort of a declared variable after inference.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    VertexSet,
    EdgeSet,
    /// first-order vertex variable (eliminated by `to_core`)
    VertexElem,
}

/// Set-valued term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Var(String),
    /// all vertices
    AllV,
    /// all edges
    AllE,
    Empty,
    Color(String),
    Cup(Box<Term>, Box<Term>),
    Cap(Box<Term>, Box<Term>),
    SetMinus(Box<Term>, Box<Term>),
    Comp(Box<Term>),
    /// `N^sigma(arg)` or `N^sigma(arg, edges)`
    N {
        sigma: FinRecSet,
        arg: Box<Term>,
        edges: Option<Box<Term>>,
    },
}

impl Term {
    pub fn contains_n(&self) -> bool {
        match self {
            Term::N { .. } => true,
            Term::Cup(a, b) | Term::Cap(a, b) | Term::SetMinus(a, b) => {
                a.contains_n() || b.contains_n()
            }
            Term::Comp(a) => a.contains_n(),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CardCmp {
    Geq,
    Leq,
    Eq,
}

impl CardCmp {
    pub fn holds(self, value: u64, bound: u64) -> bool {
        match self {
            CardCmp::Geq => value >= bound,
            CardCmp::Leq => value <= bound,
            CardCmp::Eq => value == bound,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Atom {
    Eq(Term, Term),
    SubsetEq(Term, Term),
    SupsetEq(Term, Term),
    Card(Term, CardCmp, u64),
    Conn(Term),
    Acy(Term),
    Clique(Term),
    /// element membership `x in t`
    In(String, Term),
    /// element adjacency
    Adj(String, String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Body {
    Atom(Atom),
    And(Vec<Body>),
    Or(Vec<Body>),
    Not(Box<Body>),
    Exists(Vec<String>, Box<Body>),
}

/// Parsed formula: top-level existential prefix plus body (further `exists`
/// may be nested inside the body and are hoisted by `to_core`).
#[derive(Debug, Clone)]
pub struct Formula {
    /// declared variables in prefix order with inferred sorts
    pub vars: Vec<(String, VarKind)>,
    pub body: Body,
}

impl Formula {
    pub fn kind_of(&self, name: &str) -> Option<VarKind> {
        self.vars
            .iter()
            .find(|(n, _)| n == name)
            .map(|&(_, k)| k)
    }

    /// Multiset of neighborhood-condition sets occurring in the formula,
    /// normalized, as a sorted list.
    pub fn sigma_multiset(&self) -> Vec<FinRecSet> {
        let mut out = Vec::new();
        collect_sigmas_body(&self.body, &mut out);
        out.sort();
        out
    }

    /// Symbol count: one per variable declaration, connective, atom head,
    /// term constructor, constant and neighborhood-condition set.
    pub fn size(&self) -> usize {
        self.vars.len() + body_size(&self.body)
    }
}

fn body_size(b: &Body) -> usize {
    match b {
        Body::Atom(a) => atom_size(a),
        Body::And(xs) | Body::Or(xs) => 1 + xs.iter().map(body_size).sum::<usize>(),
        Body::Not(x) => 1 + body_size(x),
        Body::Exists(vs, x) => vs.len() + body_size(x),
    }
}

fn atom_size(a: &Atom) -> usize {
    match a {
        Atom::Eq(s, t) | Atom::SubsetEq(s, t) | Atom::SupsetEq(s, t) => {
            1 + term_size(s) + term_size(t)
        }
        Atom::Card(t, _, _) => 2 + term_size(t),
        Atom::Conn(t) | Atom::Acy(t) | Atom::Clique(t) => 1 + term_size(t),
        Atom::In(_, t) => 2 + term_size(t),
        Atom::Adj(_, _) => 3,
    }
}

fn term_size(t: &Term) -> usize {
    match t {
        Term::Var(_) | Term::AllV | Term::AllE | Term::Empty | Term::Color(_) => 1,
        Term::Cup(a, b) | Term::Cap(a, b) | Term::SetMinus(a, b) => {
            1 + term_size(a) + term_size(b)
        }
        Term::Comp(a) => 1 + term_size(a),
        Term::N { arg, edges, .. } => {
            2 + term_size(arg) + edges.as_ref().map_or(0, |e| term_size(e))
        }
    }
}

fn collect_sigmas_term(t: &Term, out: &mut Vec<FinRecSet>) {
    match t {
        Term::Cup(a, b) | Term::Cap(a, b) | Term::SetMinus(a, b) => {
            collect_sigmas_term(a, out);
            collect_sigmas_term(b, out);
        }
        Term::Comp(a) => collect_sigmas_term(a, out),
        Term::N { sigma, arg, edges } => {
            out.push(sigma.clone());
            collect_sigmas_term(arg, out);
            if let Some(e) = edges {
                collect_sigmas_term(e, out);
            }
        }
        _ => {}
    }
}

fn collect_sigmas_body(b: &Body, out: &mut Vec<FinRecSet>) {
    match b {
        Body::Atom(a) => match a {
            Atom::Eq(s, t) | Atom::SubsetEq(s, t) | Atom::SupsetEq(s, t) => {
                collect_sigmas_term(s, out);
                collect_sigmas_term(t, out);
            }
            Atom::Card(t, _, _) | Atom::Conn(t) | Atom::Acy(t) | Atom::Clique(t) => {
                collect_sigmas_term(t, out)
            }
            Atom::In(_, t) => collect_sigmas_term(t, out),
            Atom::Adj(_, _) => {}
        },
        Body::And(xs) | Body::Or(xs) => xs.iter().for_each(|x| collect_sigmas_body(x, out)),
        Body::Not(x) | Body::Exists(_, x) => collect_sigmas_body(x, out),
    }
}

/// Interpretation of set variables for direct semantic evaluation:
/// variable name -> sorted element ids (vertex ids or edge ids by sort).
pub type Assignment = BTreeMap<String, Vec<usize>>;
