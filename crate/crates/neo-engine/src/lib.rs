//! The core decision procedure: recursion indexes over elimination-tree
//! triads, the leaf/forget/join/root recursive equalities in both the exact
//! (big-integer, per-residue-vector) form and the transformed (finite-field,
//! root-of-unity) form, univariate exponent packing, and coefficient-driven
//! acceptance.
//!
//! Two execution modes share one traversal skeleton:
//!
//! * `bigint` — symbolic sparse multivariate polynomials with exact integer
//!   coefficients. Residue functions ("how many auxiliary arcs enter a tail
//!   vertex, modulo the formula period") are carried as dense vectors, so no
//!   root of unity is needed. This mode doubles as the internal oracle for
//!   the evaluated mode.
//! * `crt` — the recursion is evaluated pointwise in prime fields; the
//!   residue dimension is folded away by a discrete Fourier transform using
//!   a root of unity, and the single interesting packed coefficient is
//!   recovered exactly by Chinese-remainder reconstruction.

pub mod algebra;
pub mod decide;
pub mod enumerate;
pub mod eval;
pub mod hooks;
pub mod instance;

pub use algebra::{Algebra, BigSym, FpEval, FpSym, QAlgebra};
pub use decide::{decide, decide_bigint, decide_crt, DecideOpts, ExponentLayout, Mode};
pub use enumerate::{enumerate_partial_solutions, PartialSolution};
pub use eval::{Evaluator, PVal};
pub use hooks::{Hooks, NoHooks, NoState, StateModel};
pub use instance::{EdgeChoiceStatic, Index, Instance, TailEntry, VertexBranch};

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("node {0} is not a leaf of the elimination tree")]
    NotALeaf(usize),
    #[error("budget exceeded after {nodes} recursion nodes")]
    BudgetExceeded { nodes: u64 },
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("predicate {0} is not handled by the plain decision procedure")]
    UnsupportedPredicate(&'static str),
    #[error("unknown {kind} color {name:?}")]
    UnknownColor { kind: &'static str, name: String },
    #[error("unknown variable {0:?}")]
    UnknownVariable(String),
    #[error("malformed index: {0}")]
    BadIndex(String),
    #[error(transparent)]
    Algebra(#[from] neo_algebra::AlgebraError),
    #[error(transparent)]
    Graph(#[from] neo_graph::GraphError),
}

/// Shared run context: budgets, node counting and the optional trace sink.
/// Node counting is atomic so that evaluated-mode workers can share one
/// budget; the trace sink is only used single-threaded.
pub struct RunCtx {
    pub node_budget: Option<u64>,
    pub deadline: Option<Instant>,
    nodes: AtomicU64,
    pub trace: Option<Mutex<Box<dyn FnMut(&str) + Send>>>,
}

impl Default for RunCtx {
    fn default() -> Self {
        RunCtx {
            node_budget: None,
            deadline: None,
            nodes: AtomicU64::new(0),
            trace: None,
        }
    }
}

impl RunCtx {
    pub fn with_budget(nodes: Option<u64>, deadline: Option<Instant>) -> Self {
        RunCtx {
            node_budget: nodes,
            deadline,
            nodes: AtomicU64::new(0),
            trace: None,
        }
    }

    pub fn set_trace(&mut self, f: Box<dyn FnMut(&str) + Send>) {
        self.trace = Some(Mutex::new(f));
    }

    pub fn nodes_used(&self) -> u64 {
        self.nodes.load(Ordering::Relaxed)
    }

    /// Count one recursion node and enforce the budgets.
    pub fn tick(&self) -> Result<(), EngineError> {
        let n = self.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        if let Some(cap) = self.node_budget {
            if n > cap {
                return Err(EngineError::BudgetExceeded { nodes: n });
            }
        }
        if n % 1024 == 0 {
            if let Some(deadline) = self.deadline {
                if Instant::now() > deadline {
                    return Err(EngineError::BudgetExceeded { nodes: n });
                }
            }
        }
        Ok(())
    }

    pub fn trace_line(&self, line: &str) {
        if let Some(t) = &self.trace {
            if let Ok(mut f) = t.lock() {
                f(line);
            }
        }
    }
}

/// FNV-1a over a byte stream; used for the `CALL` trace index hashes.
pub(crate) fn fnv1a(bytes: impl IntoIterator<Item = u8>) -> u64 {
    let mut h = 0xcbf29ce484222325u64;
    for b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}
