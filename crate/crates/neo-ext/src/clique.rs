//! Clique predicates as a deterministic summary state.
//!
//! Per clique-constrained variable the traversal keeps one of three values:
//! 0 = no member seen yet, 1 = members seen and pairwise adjacent so far,
//! 2 = a non-adjacent pair exists. When a vertex is forgotten it is checked
//! against the members on the tail above it (any earlier member not on that
//! tail is incomparable in the elimination tree and handled at the join).
//! Two vertices in different subtrees of the tree are never adjacent, so a
//! join of two nonempty sides always falsifies the clique.

use crate::clause::Clause;
use neo_engine::hooks::StateModel;
use neo_engine::instance::{Instance, TailEntry};
use neo_engine::EngineError;
use neo_graph::{Graph, Vertex};
use neo_logic::Prim;
use std::collections::BTreeSet;

/// Update one clique value when vertex `u` with membership mask `fv` is
/// forgotten; `tail` is the tail above `u` and `bit` the variable's mask bit.
pub fn clique_forget_update(
    g: &Graph,
    state: u8,
    bit: u64,
    u: Vertex,
    fv: u64,
    tail: &[TailEntry],
) -> u8 {
    if fv & bit == 0 {
        return state;
    }
    for en in tail {
        if en.f & bit != 0 && !g.has_edge(u, en.v) {
            return 2;
        }
    }
    state.max(1)
}

/// Merge one clique value across a join of two sibling subtrees.
pub fn clique_join_combine(a: u8, b: u8) -> u8 {
    match (a, b) {
        (0, x) => x,
        (x, 0) => x,
        // members on both sides are incomparable, hence non-adjacent
        _ => 2,
    }
}

/// Per-subtree state: one three-valued entry per clique-constrained variable
/// in `Instance::clique_vars` order.
pub struct CliqueModel<'a> {
    g: &'a Graph,
    /// membership-mask bit per tracked variable
    pub bits: Vec<u64>,
}

impl<'a> CliqueModel<'a> {
    pub fn new(g: &'a Graph, inst: &Instance) -> Self {
        CliqueModel {
            g,
            bits: inst.clique_vars.iter().map(|&i| 1u64 << i).collect(),
        }
    }
}

impl StateModel for CliqueModel<'_> {
    fn state_len(&self) -> usize {
        self.bits.len()
    }

    fn forget(&self, state: &[u8], u: Vertex, fv: u64, tail: &[TailEntry]) -> Vec<u8> {
        self.bits
            .iter()
            .zip(state)
            .map(|(&bit, &s)| clique_forget_update(self.g, s, bit, u, fv, tail))
            .collect()
    }

    fn combine(&self, a: &[u8], b: &[u8]) -> Vec<u8> {
        a.iter()
            .zip(b)
            .map(|(&x, &y)| clique_join_combine(x, y))
            .collect()
    }
}

/// Readable summary of a root state vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliqueState {
    /// variables (positions in `Instance::clique_vars`) with a witnessed
    /// non-adjacent pair
    pub falsified: BTreeSet<usize>,
    /// variables with at least one member
    pub nonempty: BTreeSet<usize>,
}

pub fn summarize_clique_state(state: &[u8]) -> CliqueState {
    let mut falsified = BTreeSet::new();
    let mut nonempty = BTreeSet::new();
    for (i, &s) in state.iter().enumerate() {
        if s >= 1 {
            nonempty.insert(i);
        }
        if s == 2 {
            falsified.insert(i);
        }
    }
    CliqueState {
        falsified,
        nonempty,
    }
}

/// Clique literals of a clause resolved to state positions:
/// `(position, positive)`.
pub fn clique_literal_slots(
    clause: &Clause,
    inst: &Instance,
) -> Result<Vec<(usize, bool)>, EngineError> {
    let mut out = Vec::new();
    for &(i, pol) in &clause.lits {
        if let Prim::Clique { var } = &clause.prims[i] {
            let vi = inst
                .vvars
                .iter()
                .position(|v| v == var)
                .ok_or_else(|| EngineError::UnknownVariable(var.clone()))?;
            let slot = inst
                .clique_vars
                .iter()
                .position(|&c| c == vi)
                .ok_or_else(|| EngineError::UnknownVariable(var.clone()))?;
            out.push((slot, pol));
        }
    }
    Ok(out)
}
