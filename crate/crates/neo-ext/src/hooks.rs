//! Traversal hooks wiring one rewritten clause into the engine:
//! isolation-weight slots, cut-crossing vetoes, and tree certificates for
//! acyclicity.

use crate::clause::{Clause, CutKind};
use crate::weights::WeightScheme;
use neo_engine::hooks::{FLookup, Hooks};
use neo_engine::EngineError;
use neo_graph::{EdgeId, Graph, Vertex};

struct CutBits {
    left: u64,
    right: u64,
    /// restrict the crossing test to edges carrying this edge-variable bit
    filter: Option<u64>,
}

struct AcyBits {
    /// constrained vertex variable
    x_bit: u64,
    /// candidate tree-edge variable
    s_bit: u64,
    /// slot counting tree edges
    rho_edges: usize,
    /// slot counting constrained vertices
    rho_verts: usize,
}

/// Hooks for one randomized clause: slot 0 past the base layout collects
/// isolation weights, then two counter slots per acyclicity constraint.
pub struct AckHooks<'a> {
    g: &'a Graph,
    scheme: &'a WeightScheme,
    tau: usize,
    cuts: Vec<CutBits>,
    acys: Vec<AcyBits>,
    /// edge-variable bits allowed on edges at the universal vertex
    star_free: u64,
    star: Option<Vertex>,
}

fn vbit(vvars: &[String], name: &str) -> Result<u64, EngineError> {
    vvars
        .iter()
        .position(|v| v == name)
        .map(|i| 1u64 << i)
        .ok_or_else(|| EngineError::UnknownVariable(name.to_string()))
}

fn ebit(evars: &[String], name: &str) -> Result<u64, EngineError> {
    evars
        .iter()
        .position(|v| v == name)
        .map(|i| 1u64 << i)
        .ok_or_else(|| EngineError::UnknownVariable(name.to_string()))
}

fn cut_bits(
    clause: &Clause,
    vvars: &[String],
    evars: &[String],
) -> Result<Vec<CutBits>, EngineError> {
    clause
        .cuts
        .iter()
        .map(|c| {
            Ok(CutBits {
                left: vbit(vvars, &c.left)?,
                right: vbit(vvars, &c.right)?,
                filter: match &c.edge_filter {
                    Some(f) => Some(ebit(evars, f)?),
                    None => None,
                },
            })
        })
        .collect()
}

fn crossing_allowed(cuts: &[CutBits], e: EdgeId, g: &Graph, ge: u64, f: &FLookup) -> bool {
    let (u, v) = g.edges[e];
    for c in cuts {
        if let Some(fb) = c.filter {
            if ge & fb == 0 {
                continue;
            }
        }
        let (fu, fv) = (f(u), f(v));
        if (fu & c.left != 0 && fv & c.right != 0) || (fu & c.right != 0 && fv & c.left != 0) {
            return false;
        }
    }
    true
}

/// Crossing-edge vetoes only: for clauses decided exactly (separation pairs
/// from negated connectivity carry no weights and no counters).
pub struct CutHooks<'a> {
    g: &'a Graph,
    cuts: Vec<CutBits>,
}

impl<'a> CutHooks<'a> {
    pub fn new(
        g: &'a Graph,
        clause: &Clause,
        vvars: &[String],
        evars: &[String],
    ) -> Result<Self, EngineError> {
        Ok(CutHooks {
            g,
            cuts: cut_bits(clause, vvars, evars)?,
        })
    }
}

impl Hooks for CutHooks<'_> {
    fn edge_allowed(&self, e: EdgeId, ge: u64, f: &FLookup) -> bool {
        crossing_allowed(&self.cuts, e, self.g, ge, f)
    }
}

impl<'a> AckHooks<'a> {
    pub fn new(
        g: &'a Graph,
        clause: &Clause,
        scheme: &'a WeightScheme,
        vvars: &[String],
        evars: &[String],
        base_slots: usize,
    ) -> Result<Self, EngineError> {
        let cuts = cut_bits(clause, vvars, evars)?;
        let mut acys = Vec::new();
        let mut star_free = 0u64;
        for (j, a) in clause.acys.iter().enumerate() {
            let s_bit = ebit(evars, &a.s_var)?;
            star_free |= s_bit;
            acys.push(AcyBits {
                x_bit: vbit(vvars, &a.x)?,
                s_bit,
                rho_edges: base_slots + 1 + 2 * j,
                rho_verts: base_slots + 2 + 2 * j,
            });
        }
        let star = if clause.star { Some(g.n - 1) } else { None };
        Ok(AckHooks {
            g,
            scheme,
            tau: base_slots,
            cuts,
            acys,
            star_free,
            star,
        })
    }
}

impl Hooks for AckHooks<'_> {
    fn extra_slots(&self) -> usize {
        1 + 2 * self.acys.len()
    }

    fn vertex_exps(&self, u: Vertex, fv: u64, _ev: &[u32], out: &mut Vec<(usize, u32)>) {
        let mut tau = 0u64;
        for (k, w) in self.scheme.vertex_weights.iter().enumerate() {
            if fv & (1 << k) != 0 {
                if let Some(w) = w {
                    tau += w[u] as u64;
                }
            }
        }
        if tau > 0 {
            out.push((self.tau, tau as u32));
        }
        for a in &self.acys {
            if fv & a.x_bit != 0 {
                out.push((a.rho_verts, 1));
            }
        }
    }

    fn edge_allowed(&self, e: EdgeId, ge: u64, f: &FLookup) -> bool {
        let (u, v) = self.g.edges[e];
        let is_star = match self.star {
            Some(s) => u == s || v == s,
            None => false,
        };
        // edges at the universal vertex may only enter tree-edge variables
        if is_star && ge & !self.star_free != 0 {
            return false;
        }
        for a in &self.acys {
            let in_s = ge & a.s_bit != 0;
            if is_star {
                // optional anchor edge, but only towards constrained vertices
                let x = if Some(u) == self.star { v } else { u };
                if in_s && f(x) & a.x_bit == 0 {
                    return false;
                }
            } else {
                // an original edge is a tree edge exactly when both its
                // endpoints are constrained (forced-edge rule)
                let both = f(u) & a.x_bit != 0 && f(v) & a.x_bit != 0;
                if in_s != both {
                    return false;
                }
            }
        }
        crossing_allowed(&self.cuts, e, self.g, ge, f)
    }

    fn edge_exps(&self, e: EdgeId, ge: u64, _f: &FLookup, out: &mut Vec<(usize, u32)>) {
        let mut tau = 0u64;
        for (k, w) in self.scheme.edge_weights.iter().enumerate() {
            if ge & (1 << k) != 0 {
                tau += w[e] as u64;
            }
        }
        if tau > 0 {
            out.push((self.tau, tau as u32));
        }
        for a in &self.acys {
            if ge & a.s_bit != 0 {
                out.push((a.rho_edges, 1));
            }
        }
    }

    fn tau_slot(&self) -> Option<usize> {
        Some(self.tau)
    }

    fn arc_weight_exp(&self, pair: usize, s: Vertex, t: Vertex, j: u32) -> u32 {
        let e = self
            .g
            .edge_id(s, t)
            .expect("arc endpoints are adjacent");
        let dir = usize::from(s > t);
        self.scheme.arc_weights[pair][e][dir][(j - 1) as usize]
    }
}

/// Number of counted cut pairs: the divisibility test rejects coefficients
/// divisible by `2^{r+1}`.
pub fn counted_cuts(clause: &Clause) -> usize {
    clause
        .cuts
        .iter()
        .filter(|c| c.kind == CutKind::Counted)
        .count()
}
