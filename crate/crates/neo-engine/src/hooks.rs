//! Extension points of the shared traversal.
//!
//! [`Hooks`] lets a caller attach extra per-choice monomial factors and veto
//! individual edge-interpretation choices. The randomized
//! connectivity/acyclicity drivers are built entirely on these: isolation
//! weights live in extra slots, consistent-cut crossing edges are vetoed
//! structurally, and tree-ness certificates count edges and vertices into a
//! pair of slots that must agree at the root.
//!
//! [`StateModel`] lets a caller thread a small deterministic summary state
//! (per partially processed subtree) through the recursion; the clique
//! driver uses a three-valued state per clique variable.

use crate::instance::TailEntry;
use neo_graph::{EdgeId, Vertex};

/// Membership lookup: vertex -> bitmask over vertex-set variables. Vertices
/// outside the current tail are not queryable; hook implementations only ask
/// about tail vertices (every sheaf edge of a leaf joins tail vertices).
pub type FLookup<'a> = dyn Fn(Vertex) -> u64 + 'a;

pub trait Hooks {
    /// Number of extra monomial slots beyond the base layout.
    fn extra_slots(&self) -> usize {
        0
    }

    /// Extra monomial factors applied once when vertex `u` is forgotten with
    /// membership mask `fv` and per-pair degree caps `ev`.
    fn vertex_exps(&self, _u: Vertex, _fv: u64, _ev: &[u32], _out: &mut Vec<(usize, u32)>) {}

    /// Veto an edge-interpretation choice at a leaf. `ge` is the edge's
    /// membership mask over edge-set variables.
    fn edge_allowed(&self, _e: EdgeId, _ge: u64, _f: &FLookup) -> bool {
        true
    }

    /// Extra monomial factors for an admitted edge choice.
    fn edge_exps(&self, _e: EdgeId, _ge: u64, _f: &FLookup, _out: &mut Vec<(usize, u32)>) {}

    /// Slot receiving per-arc isolation weights, if any. When set, an
    /// obligation into target `t` contributes `sum_{j=1..cap} x^{w(s,t,pair,j)}`
    /// on this slot instead of the plain scalar `cap`.
    fn tau_slot(&self) -> Option<usize> {
        None
    }

    /// Isolation weight of the arc from source `s` into copy `j` (1-based)
    /// of target `t` under category pair `pair`.
    fn arc_weight_exp(&self, _pair: usize, _s: Vertex, _t: Vertex, _j: u32) -> u32 {
        0
    }
}

/// No extensions: the plain decision procedure.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoHooks;

impl Hooks for NoHooks {}

/// Deterministic summary state carried per subtree in the exact traversal.
/// `combine` must be associative and commutative with `forget` applied once
/// per vertex; the traversal groups values by state.
pub trait StateModel {
    fn state_len(&self) -> usize;

    /// State of an empty subtree.
    fn empty_state(&self) -> Vec<u8> {
        vec![0; self.state_len()]
    }

    /// Update when vertex `u` (membership mask `fv`) moves from the tail
    /// into the subtree; `tail` is the remaining tail above `u`.
    fn forget(&self, state: &[u8], u: Vertex, fv: u64, tail: &[TailEntry]) -> Vec<u8>;

    /// Merge the states of two sibling subtree groups.
    fn combine(&self, a: &[u8], b: &[u8]) -> Vec<u8>;
}

/// Trivial model: no state.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoState;

impl StateModel for NoState {
    fn state_len(&self) -> usize {
        0
    }
    fn forget(&self, _state: &[u8], _u: Vertex, _fv: u64, _tail: &[TailEntry]) -> Vec<u8> {
        Vec::new()
    }
    fn combine(&self, _a: &[u8], _b: &[u8]) -> Vec<u8> {
        Vec::new()
    }
}
