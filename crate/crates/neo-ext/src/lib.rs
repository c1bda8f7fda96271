//! Decision driver for formulas that use connectivity, acyclicity or clique
//! predicates on top of the plain fragment.
//!
//! The body is expanded into conjunctive clauses; each clause is rewritten
//! ([`clause`]) so that the special predicates become either structural
//! constraints (cut pairs, tree certificates, a universal-vertex copy of the
//! graph) or a summary state ([`clique`]). Clauses without counted cuts and
//! without tree certificates are decided exactly; the rest go through
//! seeded Monte-Carlo repetitions ([`weights`], [`hooks`]): a solution
//! surviving the power-of-two divisibility test certifies satisfiability,
//! and each repetition finds a solution with probability at least one half
//! when one exists.

pub mod clause;
pub mod clique;
pub mod hooks;
pub mod weights;

pub use clause::{
    augment_with_universal_vertex, rewrite_acyclicity, rewrite_connectivity, rewrite_for_dnf,
    AcySpec, Clause, CutKind, CutSpec,
};
pub use clique::{
    clique_forget_update, clique_join_combine, summarize_clique_state, CliqueModel, CliqueState,
};
pub use hooks::AckHooks;
pub use weights::WeightScheme;

use neo_engine::instance::Instance;
use neo_engine::{BigSym, EngineError, Evaluator, RunCtx};
use neo_graph::{ElimTree, Graph};
use neo_logic::{CoreFormula, Prim, VarKind};
use num_bigint::BigInt;
use num_traits::Zero;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// a certified model was found
    Sat,
    /// exhaustive: no clause has a model
    Unsat,
    /// randomized clauses found nothing in any repetition; a model escapes
    /// each repetition with probability at most one half
    ProbablyUnsat,
}

#[derive(Debug, Clone, Copy)]
pub struct AckConfig {
    pub seed: u64,
    pub repetitions: u32,
}

impl Default for AckConfig {
    fn default() -> Self {
        AckConfig {
            seed: 1,
            repetitions: 10,
        }
    }
}

/// Falsified-prim mask of a clause: its negative equality literals. Clause
/// models falsify exactly these (positive literals pin the rest to true).
fn false_mask(clause: &Clause) -> u64 {
    let mut fm = 0u64;
    for &(i, pol) in &clause.lits {
        if !pol
            && matches!(
                clause.prims[i],
                Prim::VertexEq(..) | Prim::EdgeEq(..) | Prim::NeighborEq { .. }
            )
        {
            fm |= 1 << i;
        }
    }
    fm
}

/// Decide one rewritten clause on `(g, t)`. With no weight scheme the root
/// polynomial is scanned exactly (requires the clause to have no counted
/// cuts and no tree certificates); with a scheme the divisibility test is
/// applied and a hit certifies a model.
fn decide_clause(
    g: &Graph,
    t: &ElimTree,
    clause: &Clause,
    core: &CoreFormula,
    scheme: Option<&WeightScheme>,
    ctx: &RunCtx,
) -> Result<bool, EngineError> {
    let extra = if scheme.is_some() {
        1 + 2 * clause.acys.len()
    } else {
        0
    };
    let inst = Instance::new(g, t, core, extra)?;
    let model = CliqueModel::new(g, &inst);
    let alg = BigSym {
        nslots: inst.nslots,
    };
    let fm = false_mask(clause);
    let rootvals = match scheme {
        None => {
            let hk = hooks::CutHooks::new(g, clause, &inst.vvars, &inst.evars)?;
            Evaluator::new(&inst, &alg, &model, &hk, ctx).p_root_exact(fm)?
        }
        Some(s) => {
            let hk = AckHooks::new(g, clause, s, &inst.vvars, &inst.evars, inst.base_slots)?;
            Evaluator::new(&inst, &alg, &model, &hk, ctx).p_root_exact(fm)?
        }
    };

    let clique_lits = clique::clique_literal_slots(clause, &inst)?;
    let card_lits: Vec<(usize, neo_logic::CardCmp, u64, bool)> = clause
        .lits
        .iter()
        .filter_map(|&(i, pol)| match &clause.prims[i] {
            Prim::Card { var, cmp, bound } => core
                .measured_vars
                .iter()
                .position(|v| v == var)
                .map(|mi| (mi, *cmp, *bound, pol)),
            _ => None,
        })
        .collect();
    let rho: Vec<(usize, usize)> = (0..clause.acys.len())
        .map(|j| (inst.base_slots + 1 + 2 * j, inst.base_slots + 2 + 2 * j))
        .collect();
    let r = hooks::counted_cuts(clause);
    let modulus: BigInt = BigInt::from(1) << (r + 1);
    let zero = BigInt::zero();

    for (state, poly) in &rootvals {
        let ok_clique = clique_lits
            .iter()
            .all(|&(s, pol)| if pol { state[s] <= 1 } else { state[s] == 2 });
        if !ok_clique {
            continue;
        }
        for (exps, coeff) in &poly.terms {
            if exps[0] != exps[1] {
                continue;
            }
            if scheme.is_some() && !rho.iter().all(|&(a, b)| exps[a] == exps[b]) {
                continue;
            }
            let ok_card = card_lits
                .iter()
                .all(|&(mi, cmp, bound, pol)| cmp.holds(exps[2 + mi] as u64, bound) == pol);
            if !ok_card {
                continue;
            }
            let hit = match scheme {
                None => *coeff > zero,
                Some(_) => coeff % &modulus != zero,
            };
            if hit {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Weight scheme for one repetition over one clause: the bound is twice the
/// clause size times the per-item slot budget, which makes a uniquely light
/// solution likely; cut-side variables stay unweighted.
fn sample_for(
    g: &Graph,
    t: &ElimTree,
    clause: &Clause,
    core: &CoreFormula,
    seed: u64,
    stream: u64,
) -> WeightScheme {
    let size = core.size().max(1) as u64;
    let n = (g.n as u64).max(1);
    let td = (t.depth as u64).max(1);
    let d = core.d_phi as u64;
    let max_weight = 2 * size * n * (1 + td + (d + 1) + td * 2 * d);
    let vvars: Vec<&String> = core
        .vars
        .iter()
        .filter(|(_, k)| *k == VarKind::VertexSet)
        .map(|(name, _)| name)
        .collect();
    let nev = core
        .vars
        .iter()
        .filter(|(_, k)| *k == VarKind::EdgeSet)
        .count();
    let unweighted: Vec<bool> = vvars
        .iter()
        .map(|name| {
            clause.cuts.iter().any(|c| {
                matches!(c.kind, CutKind::Counted | CutKind::Anchored)
                    && (&c.left == *name || &c.right == *name)
            })
        })
        .collect();
    WeightScheme::sample(
        seed,
        stream,
        max_weight,
        g.n,
        g.m(),
        vvars.len(),
        nev,
        core.cat.len(),
        core.d_phi,
        &unweighted,
    )
}

/// Decide a core formula that may use connectivity, acyclicity and clique
/// predicates. Deterministic clauses are decided exactly; randomized
/// clauses run `repetitions` seeded Monte-Carlo rounds each.
pub fn decide_ack(
    g: &Graph,
    t: &ElimTree,
    core: &CoreFormula,
    cfg: &AckConfig,
    ctx: &RunCtx,
) -> Result<Verdict, EngineError> {
    let mut det = Vec::new();
    let mut rnd = Vec::new();
    let mut aug: Option<(Graph, ElimTree)> = None;
    for cl in rewrite_for_dnf(core)? {
        for c in rewrite_connectivity(cl) {
            let (c2, a) = rewrite_acyclicity(g, t, c)?;
            if c2.dead {
                continue;
            }
            if aug.is_none() {
                aug = a;
            }
            let randomized = !c2.acys.is_empty() || hooks::counted_cuts(&c2) > 0;
            if randomized {
                rnd.push(c2);
            } else {
                det.push(c2);
            }
        }
    }

    for c in &det {
        let core_c = c.build_core();
        if decide_clause(g, t, c, &core_c, None, ctx)? {
            return Ok(Verdict::Sat);
        }
    }

    let prepared: Vec<(Clause, CoreFormula)> = rnd
        .into_iter()
        .map(|c| {
            let k = c.build_core();
            (c, k)
        })
        .collect();
    for rep in 0..cfg.repetitions {
        for (ci, (c, core_c)) in prepared.iter().enumerate() {
            let (gg, tt) = if c.star {
                let a = aug.as_ref().expect("augmentation built with the clause");
                (&a.0, &a.1)
            } else {
                (g, t)
            };
            let stream = ((rep as u64) << 16) | ci as u64;
            ctx.trace_line(&format!(
                "MC rep={} clause={} seed={} stream={}",
                rep, ci, cfg.seed, stream
            ));
            let scheme = sample_for(gg, tt, c, core_c, cfg.seed, stream);
            if decide_clause(gg, tt, c, core_c, Some(&scheme), ctx)? {
                return Ok(Verdict::Sat);
            }
        }
    }
    Ok(if prepared.is_empty() {
        Verdict::Unsat
    } else {
        Verdict::ProbablyUnsat
    })
}
