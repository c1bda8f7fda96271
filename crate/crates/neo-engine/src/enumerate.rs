//! Brute-force enumeration of the combinatorial structures a frame value
//! counts: extensions of a recursion index over a triad's subtree and edge
//! bucket, together with an arc assignment that serves every obligation.
//!
//! This is deliberately independent of the traversal — it only shares the
//! instance's membership/falsification helpers — and is used by tests to
//! pin the leaf, forget and join equalities against first principles on
//! small frames.

use crate::instance::{Index, Instance};
use crate::EngineError;
use neo_graph::{Triad, Vertex};

/// Cap on enumerated assignments before giving up.
const ENUM_CAP: usize = 20_000_000;
const MAX_SUBTREE: usize = 8;

/// One structure counted by an exact-form frame value: an extension of the
/// index to the subtree and edge bucket plus a copy choice per obligation.
#[derive(Debug, Clone)]
pub struct PartialSolution {
    /// membership masks of subtree vertices (in `triad.subtree` order)
    pub subtree_f: Vec<(Vertex, u64)>,
    /// capped qualifying-edge counts of subtree vertices
    pub subtree_e: Vec<(Vertex, Vec<u32>)>,
    /// membership masks of bucket edges (in `triad.sheaf` order)
    pub sheaf_g: Vec<(usize, u64)>,
    /// arcs as (source, target, pair, copy)
    pub arcs: Vec<(Vertex, Vertex, usize, u32)>,
    /// arc-count residues of subtree vertices
    pub delta_w: Vec<(Vertex, Vec<u32>)>,
    /// sum of below-cap capped counts over the subtree
    pub a: u32,
    /// number of arcs into below-cap targets
    pub b: u32,
    /// per measured variable: contribution of the subtree / bucket
    pub c_bar: Vec<u64>,
    /// prims falsified by the subtree and bucket part
    pub false_mask: u64,
}

/// All structures compatible with `index` on the given triad. The tail part
/// of each structure is fixed by the index (memberships, capped counts,
/// admitted copies, residues); the subtree and bucket parts are enumerated.
pub fn enumerate_partial_solutions(
    inst: &Instance,
    triad: &Triad,
    index: &Index,
) -> Result<Vec<PartialSolution>, EngineError> {
    if triad.subtree.len() > MAX_SUBTREE {
        return Err(EngineError::TooLarge(format!(
            "subtree of {} vertices exceeds the enumeration cap {MAX_SUBTREE}",
            triad.subtree.len()
        )));
    }
    if index.entries.len() != triad.tail.len()
        || index
            .entries
            .iter()
            .zip(&triad.tail)
            .any(|(en, &v)| en.v != v)
    {
        return Err(EngineError::BadIndex(
            "index entries do not match the triad tail".into(),
        ));
    }

    let ncat = inst.ncat();
    let nv = inst.vvars.len();
    let ne = inst.evars.len();
    let d = inst.d;

    let vassign = (1usize << nv) * inst.ecat();
    let vtotal = vassign.checked_pow(triad.subtree.len() as u32);
    let etotal = (1usize << ne).checked_pow(triad.sheaf.len() as u32);
    match (vtotal, etotal) {
        (Some(a), Some(b)) if a.checked_mul(b).is_some_and(|x| x <= ENUM_CAP) => {}
        _ => {
            return Err(EngineError::TooLarge(
                "assignment space exceeds the enumeration cap".into(),
            ))
        }
    }

    let tail_pos = |v: Vertex| triad.tail.iter().position(|&x| x == v);
    let sub_pos = |v: Vertex| triad.subtree.iter().position(|&x| x == v);

    let mut out = Vec::new();

    // mixed-radix sweep over subtree assignments
    let mut vcodes = vec![0usize; triad.subtree.len()];
    'vloop: loop {
        let mut f_hat = Vec::with_capacity(triad.subtree.len());
        let mut e_hat: Vec<Vec<u32>> = Vec::with_capacity(triad.subtree.len());
        for (&w, &code) in triad.subtree.iter().zip(&vcodes) {
            let fv = (code % (1 << nv)) as u64;
            let ev = crate::instance::decode_radix(code / (1 << nv), d + 1, ncat);
            f_hat.push((w, fv));
            e_hat.push(ev);
        }

        let member = |v: Vertex| -> u64 {
            if let Some(i) = tail_pos(v) {
                index.entries[i].f
            } else if let Some(i) = sub_pos(v) {
                f_hat[i].1
            } else {
                unreachable!("edge endpoint outside the triad broom")
            }
        };

        let mut gcodes = vec![0usize; triad.sheaf.len()];
        'eloop: loop {
            // obligations under this joint assignment
            let mut obligations: Vec<(Vertex, Vertex, usize)> = Vec::new();
            for (&e, &gcode) in triad.sheaf.iter().zip(&gcodes) {
                obligations.extend(inst.obligations(e, gcode as u64, &member));
            }

            // copy ranges per obligation
            let mut ranges = Vec::with_capacity(obligations.len());
            let mut feasible = true;
            for &(_, t, ci) in &obligations {
                let cap = if let Some(i) = tail_pos(t) {
                    index.entries[i].a[ci]
                } else {
                    e_hat[sub_pos(t).unwrap()][ci]
                };
                if cap == 0 {
                    feasible = false;
                    break;
                }
                ranges.push(cap);
            }
            // a subtree vertex with a positive capped count but no incoming
            // obligations on that pair can never be covered
            if feasible {
                'cov: for (si, ev) in e_hat.iter().enumerate() {
                    for (ci, &e) in ev.iter().enumerate() {
                        if e > 0
                            && !obligations
                                .iter()
                                .any(|&(_, t, c)| c == ci && sub_pos(t) == Some(si))
                        {
                            feasible = false;
                            break 'cov;
                        }
                    }
                }
            }

            if feasible {
                let arc_space: Option<usize> = ranges
                    .iter()
                    .try_fold(1usize, |acc, &r| acc.checked_mul(r as usize));
                match arc_space {
                    Some(s) if s <= ENUM_CAP => {}
                    _ => {
                        return Err(EngineError::TooLarge(
                            "arc space exceeds the enumeration cap".into(),
                        ))
                    }
                }
                let mut copies = vec![1u32; obligations.len()];
                'arcloop: loop {
                    record_if_valid(
                        inst, triad, index, &f_hat, &e_hat, &gcodes, &obligations, &copies,
                        &tail_pos, &sub_pos, &mut out,
                    );
                    // increment copies in mixed radix over `ranges`
                    let mut i = 0;
                    loop {
                        if i == copies.len() {
                            break 'arcloop;
                        }
                        if copies[i] < ranges[i] {
                            copies[i] += 1;
                            break;
                        }
                        copies[i] = 1;
                        i += 1;
                    }
                }
            }

            // next bucket assignment
            let mut i = 0;
            loop {
                if i == gcodes.len() {
                    break 'eloop;
                }
                if gcodes[i] + 1 < (1 << ne) {
                    gcodes[i] += 1;
                    break;
                }
                gcodes[i] = 0;
                i += 1;
            }
        }

        // next subtree assignment
        let mut i = 0;
        loop {
            if i == vcodes.len() {
                break 'vloop;
            }
            if vcodes[i] + 1 < vassign {
                vcodes[i] += 1;
                break;
            }
            vcodes[i] = 0;
            i += 1;
        }
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn record_if_valid(
    inst: &Instance,
    triad: &Triad,
    index: &Index,
    f_hat: &[(Vertex, u64)],
    e_hat: &[Vec<u32>],
    gcodes: &[usize],
    obligations: &[(Vertex, Vertex, usize)],
    copies: &[u32],
    tail_pos: &dyn Fn(Vertex) -> Option<usize>,
    sub_pos: &dyn Fn(Vertex) -> Option<usize>,
    out: &mut Vec<PartialSolution>,
) {
    let ncat = inst.ncat();
    let p = inst.p;
    let d = inst.d;

    // arc counts per (broom position, pair); tail first, then subtree
    let nt = triad.tail.len();
    let mut counts = vec![0u32; (nt + triad.subtree.len()) * ncat.max(1)];
    let mut covered: Vec<Vec<bool>> = e_hat
        .iter()
        .map(|ev| {
            let mx = ev.iter().copied().max().unwrap_or(0);
            vec![false; (mx as usize + 1) * ncat]
        })
        .collect();
    for (&(_, t, ci), &j) in obligations.iter().zip(copies) {
        if let Some(i) = tail_pos(t) {
            counts[i * ncat + ci] += 1;
        } else {
            let si = sub_pos(t).unwrap();
            counts[(nt + si) * ncat + ci] += 1;
            let stride = covered[si].len() / ncat.max(1);
            covered[si][ci * stride + j as usize - 1] = true;
        }
    }

    // tail residue consistency
    for (i, en) in index.entries.iter().enumerate() {
        for ci in 0..ncat {
            if counts[i * ncat + ci] % p != en.delta[ci] {
                return;
            }
        }
    }
    // subtree coverage: copies 1..=e all hit
    for (si, ev) in e_hat.iter().enumerate() {
        let stride = covered[si].len() / ncat.max(1);
        for (ci, &e) in ev.iter().enumerate() {
            for j in 0..e as usize {
                if !covered[si][ci * stride + j] {
                    return;
                }
            }
        }
    }

    // falsified prims of the subtree + bucket part
    let mut fm = 0u64;
    let mut delta_w = Vec::with_capacity(triad.subtree.len());
    for (si, &(w, fv)) in f_hat.iter().enumerate() {
        let dv: Vec<u32> = (0..ncat)
            .map(|ci| counts[(nt + si) * ncat + ci] % p)
            .collect();
        fm |= inst.vfalse(w, fv, &e_hat[si], &dv);
        delta_w.push((w, dv));
    }
    for (&e, &g) in triad.sheaf.iter().zip(gcodes) {
        fm |= inst.efalse(e, g as u64);
    }
    if fm & !index.false_mask != 0 {
        return;
    }

    // annotations
    let a: u32 = e_hat
        .iter()
        .flat_map(|ev| ev.iter())
        .filter(|&&e| e < d)
        .sum();
    let mut b = 0u32;
    for &(_, t, ci) in obligations {
        let e = if let Some(i) = tail_pos(t) {
            index.entries[i].e[ci]
        } else {
            e_hat[sub_pos(t).unwrap()][ci]
        };
        if e < d {
            b += 1;
        }
    }
    let mut c_bar = vec![0u64; inst.measured.len()];
    for (mi, &(var, is_edge)) in inst.measured.iter().enumerate() {
        if is_edge {
            c_bar[mi] = triad
                .sheaf
                .iter()
                .zip(gcodes)
                .filter(|(_, &g)| g as u64 & (1 << var) != 0)
                .count() as u64;
        } else {
            c_bar[mi] = f_hat.iter().filter(|(_, fv)| fv & (1 << var) != 0).count() as u64;
        }
    }

    out.push(PartialSolution {
        subtree_f: f_hat.to_vec(),
        subtree_e: triad
            .subtree
            .iter()
            .zip(e_hat)
            .map(|(&w, ev)| (w, ev.clone()))
            .collect(),
        sheaf_g: triad
            .sheaf
            .iter()
            .zip(gcodes)
            .map(|(&e, &g)| (e, g as u64))
            .collect(),
        arcs: obligations
            .iter()
            .zip(copies)
            .map(|(&(s, t, ci), &j)| (s, t, ci, j))
            .collect(),
        delta_w,
        a,
        b,
        c_bar,
        false_mask: fm,
    });
}
