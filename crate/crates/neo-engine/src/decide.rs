//! The two decision procedures over the plain fragment (no connectivity /
//! acyclicity / clique predicates — those are rewritten by the extension
//! drivers before reaching this layer).
//!
//! * `bigint`: run the exact recursion once per guessed falsified set,
//!   obtaining the full counting polynomial at the root; accept if any
//!   monomial lies on the arc-balance diagonal, its measurements satisfy the
//!   body under the guess, and its coefficient is nonzero.
//! * `crt`: the same acceptance test, but each candidate coefficient is
//!   probed individually. Exponents are packed into one variable by a
//!   mixed-radix layout whose radii are per-slot degree bounds, the packed
//!   polynomial is evaluated at generator powers in several prime fields via
//!   the transformed recursion, and the coefficient is reconstructed by the
//!   Chinese remainder theorem. Evaluation tables are cached per falsified
//!   set and shared across candidates.

use crate::algebra::{BigSym, FpEval};
use crate::eval::Evaluator;
use crate::hooks::{NoHooks, NoState};
use crate::instance::Instance;
use crate::{EngineError, RunCtx};
use neo_algebra::{crt_reconstruct_coefficient, find_prime_plan, PrimePlan};
use neo_graph::{ElimTree, Graph};
use neo_logic::{eval_under_guess, CoreFormula, Prim};
use std::collections::{BTreeSet, HashMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Bigint,
    Crt,
}

#[derive(Debug, Clone)]
pub struct DecideOpts {
    pub mode: Mode,
    /// worker threads for evaluated-mode table building
    pub threads: usize,
}

impl Default for DecideOpts {
    fn default() -> Self {
        DecideOpts {
            mode: Mode::Bigint,
            threads: 1,
        }
    }
}

/// Mixed-radix packing of the counting slots into a single exponent.
#[derive(Debug, Clone)]
pub struct ExponentLayout {
    /// inclusive per-slot degree bounds (base slots only)
    pub bounds: Vec<u64>,
    /// positional weights: slot k contributes `exp * weights[k]`
    pub weights: Vec<u64>,
    /// degree bound of the packed univariate polynomial
    pub degree_bound: u64,
    /// bits bounding the absolute value of any coefficient
    pub coeff_bits: u64,
}

impl ExponentLayout {
    pub fn new(inst: &Instance) -> Result<Self, EngineError> {
        let n = inst.g.n as u64;
        let m = inst.g.m() as u64;
        let ncat = inst.ncat() as u64;
        let d = inst.d as u64;
        let mut bounds = Vec::with_capacity(inst.base_slots);
        bounds.push(ncat * d.saturating_sub(1) * n); // uncapped-count slot
        bounds.push(if d <= 1 { 0 } else { 2 * m * ncat }); // below-cap arcs
        for &(_, is_edge) in &inst.measured {
            bounds.push(if is_edge { m } else { n });
        }

        let mut weights = Vec::with_capacity(bounds.len());
        let mut w: u64 = 1;
        for &b in &bounds {
            weights.push(w);
            w = w
                .checked_mul(b + 1)
                .ok_or_else(|| EngineError::TooLarge("packed degree overflows".into()))?;
        }
        let degree_bound = w - 1;
        if degree_bound > 1 << 40 {
            return Err(EngineError::TooLarge(format!(
                "packed degree bound {degree_bound} exceeds 2^40"
            )));
        }

        // coefficient bound: the smaller of the generic recursion bound and
        // a structural count of the objects a coefficient enumerates
        let size = inst.core.size() as u64;
        let td = inst.t.depth as u64;
        let generic = 5 * n * td * size * (64 - (d + 1).leading_zeros() as u64);
        let log_d1 = 64 - d.leading_zeros().max(1) as u64; // ceil-ish log2(d+1)
        let structural = n * inst.vvars.len() as u64
            + m * inst.evars.len() as u64
            + n * ncat * log_d1
            + 2 * m * ncat * (64 - d.max(1).leading_zeros() as u64)
            + n * ncat * d
            + inst.eq_prims.len() as u64
            + 8;
        let coeff_bits = generic.min(structural) + 2;
        Ok(ExponentLayout {
            bounds,
            weights,
            degree_bound,
            coeff_bits,
        })
    }

    pub fn pack(&self, exps: &[u64]) -> u64 {
        exps.iter().zip(&self.weights).map(|(e, w)| e * w).sum()
    }

    /// Per-slot evaluation bases at point `s` mod `p`: slot k gets
    /// `s^{weights[k]}`, extended by 1 for any hook slots.
    pub fn point_bases(&self, s: u64, p: u64, nslots: usize) -> Vec<u64> {
        let mut out: Vec<u64> = self
            .weights
            .iter()
            .map(|&w| neo_algebra::mod_pow(s, w, p))
            .collect();
        out.resize(nslots, 1);
        out
    }
}

fn reject_special(core: &CoreFormula) -> Result<(), EngineError> {
    for p in &core.prims {
        match p {
            Prim::Conn { .. } => return Err(EngineError::UnsupportedPredicate("connectivity")),
            Prim::Acy { .. } => return Err(EngineError::UnsupportedPredicate("acyclicity")),
            Prim::Clique { .. } => return Err(EngineError::UnsupportedPredicate("clique")),
            _ => {}
        }
    }
    Ok(())
}

/// Visit every measurement vector within range; `f` returns true to stop
/// (a satisfying candidate was found). Returns whether `f` stopped.
fn any_candidate(
    inst: &Instance,
    mut f: impl FnMut(&[u64]) -> bool,
) -> bool {
    let ranges: Vec<u64> = inst
        .measured
        .iter()
        .map(|&(_, is_edge)| if is_edge { inst.g.m() as u64 } else { inst.g.n as u64 })
        .collect();
    let mut c = vec![0u64; ranges.len()];
    loop {
        if f(&c) {
            return true;
        }
        let mut i = 0;
        loop {
            if i == c.len() {
                return false;
            }
            if c[i] < ranges[i] {
                c[i] += 1;
                break;
            }
            c[i] = 0;
            i += 1;
        }
    }
}

fn guess_useful(inst: &Instance, false_set: &BTreeSet<usize>) -> bool {
    any_candidate(inst, |c| eval_under_guess(inst.core, false_set, c))
}

pub fn decide(
    g: &Graph,
    t: &ElimTree,
    core: &CoreFormula,
    opts: &DecideOpts,
    ctx: &RunCtx,
) -> Result<bool, EngineError> {
    reject_special(core)?;
    match opts.mode {
        Mode::Bigint => decide_bigint(g, t, core, ctx),
        Mode::Crt => decide_crt(g, t, core, opts.threads.max(1), ctx),
    }
}

/// Exact mode: full root polynomial per falsified-set guess.
pub fn decide_bigint(
    g: &Graph,
    t: &ElimTree,
    core: &CoreFormula,
    ctx: &RunCtx,
) -> Result<bool, EngineError> {
    reject_special(core)?;
    let inst = Instance::new(g, t, core, 0)?;
    let alg = BigSym {
        nslots: inst.nslots,
    };
    let ev = Evaluator::new(&inst, &alg, &NoState, &NoHooks, ctx);
    let nmeas = inst.measured.len();
    let mut fm = inst.eq_mask;
    loop {
        let false_set = inst.false_set_of_mask(fm);
        if guess_useful(&inst, &false_set) {
            let rootvals = ev.p_root_exact(fm)?;
            if let Some(poly) = rootvals.get(&Vec::new()) {
                for exps in poly.terms.keys() {
                    if exps[0] != exps[1] {
                        continue;
                    }
                    let c_bar: Vec<u64> = exps[2..2 + nmeas].iter().map(|&x| x as u64).collect();
                    if eval_under_guess(core, &false_set, &c_bar) {
                        return Ok(true);
                    }
                }
            }
        }
        if fm == 0 {
            break;
        }
        fm = (fm - 1) & inst.eq_mask;
    }
    Ok(false)
}

/// Evaluated mode: candidate coefficients reconstructed from prime-field
/// point evaluations of the transformed recursion.
pub fn decide_crt(
    g: &Graph,
    t: &ElimTree,
    core: &CoreFormula,
    threads: usize,
    ctx: &RunCtx,
) -> Result<bool, EngineError> {
    reject_special(core)?;
    let inst = Instance::new(g, t, core, 0)?;
    let layout = ExponentLayout::new(&inst)?;
    let plan = find_prime_plan(inst.p as u64, layout.degree_bound, layout.coeff_bits)?;
    let j_max = layout.bounds[0].min(layout.bounds[1]);

    // point-evaluation tables per falsified-set mask: [prime][point value]
    let mut tables: HashMap<u64, Vec<Vec<u64>>> = HashMap::new();

    let mut fm = inst.eq_mask;
    loop {
        let false_set = inst.false_set_of_mask(fm);
        // candidates under this guess
        let mut cands: Vec<(u64, Vec<u64>)> = Vec::new();
        any_candidate(&inst, |c| {
            if eval_under_guess(core, &false_set, c) {
                for j in 0..=j_max {
                    cands.push((j, c.to_vec()));
                }
            }
            false
        });
        if !cands.is_empty() {
            // make sure every subset table needed by inclusion–exclusion exists
            let mut kept = fm;
            loop {
                if !tables.contains_key(&kept) {
                    let tab = build_table(&inst, &layout, &plan, kept, threads, ctx)?;
                    tables.insert(kept, tab);
                }
                if kept == 0 {
                    break;
                }
                kept = (kept - 1) & fm;
            }
            let total = fm.count_ones();
            for (j, c_bar) in cands {
                let mut exps = vec![j, j];
                exps.extend_from_slice(&c_bar);
                let k = layout.pack(&exps);
                let mut evaluator = |i: usize, s: u64| -> u64 {
                    let p = plan.primes[i];
                    let mut acc = 0u64;
                    let mut kept = fm;
                    loop {
                        let v = tables[&kept][i][s as usize];
                        if (total - kept.count_ones()) % 2 == 0 {
                            acc = neo_algebra::mod_add(acc, v, p);
                        } else {
                            acc = neo_algebra::mod_sub(acc, v, p);
                        }
                        if kept == 0 {
                            break;
                        }
                        kept = (kept - 1) & fm;
                    }
                    acc
                };
                let coeff = crt_reconstruct_coefficient(k, &mut evaluator, &plan)?;
                if coeff != num_bigint::BigInt::from(0) {
                    return Ok(true);
                }
            }
        }
        if fm == 0 {
            break;
        }
        fm = (fm - 1) & inst.eq_mask;
    }
    Ok(false)
}

/// Root values of the transformed recursion at every generator power in
/// every plan prime, for one allowed falsified mask.
fn build_table(
    inst: &Instance,
    layout: &ExponentLayout,
    plan: &PrimePlan,
    fm: u64,
    threads: usize,
    ctx: &RunCtx,
) -> Result<Vec<Vec<u64>>, EngineError> {
    let nprimes = plan.primes.len();
    let work = |i: usize| -> Result<Vec<u64>, EngineError> {
        let p = plan.primes[i];
        let mut row = vec![0u64; p as usize];
        // points visited by reconstruction are exactly the nonzero elements
        for s in 1..p {
            let bases = layout.point_bases(s, p, inst.nslots);
            let alg = FpEval::new(p, inst.p, bases)?;
            let ev = Evaluator::new(inst, &alg, &NoState, &NoHooks, ctx);
            let mut stack = Vec::new();
            row[s as usize] = ev.q_open(inst.t.root, &mut stack, fm)?;
        }
        Ok(row)
    };
    if threads <= 1 || nprimes <= 1 {
        (0..nprimes).map(work).collect()
    } else {
        let results: Vec<Result<Vec<u64>, EngineError>> = std::thread::scope(|scope| {
            let chunk = nprimes.div_ceil(threads);
            let mut handles = Vec::new();
            for c in 0..threads {
                let lo = c * chunk;
                let hi = ((c + 1) * chunk).min(nprimes);
                if lo >= hi {
                    continue;
                }
                let work = &work;
                handles.push(scope.spawn(move || (lo..hi).map(work).collect::<Vec<_>>()));
            }
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("table worker panicked"))
                .collect()
        });
        results.into_iter().collect()
    }
}
