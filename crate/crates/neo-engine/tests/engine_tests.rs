use neo_algebra::{BigIntOps, SparsePoly};
use neo_engine::*;
use neo_engine::instance::decode_radix;
use neo_graph::{triad_closed, triad_open, ElimTree, Graph};
use neo_logic::{parse, to_core, CoreFormula};
use num_bigint::BigInt;
use std::collections::BTreeSet;

fn chain_tree(n: usize) -> ElimTree {
    let parent: Vec<Option<usize>> = (0..n).map(|v| if v == 0 { None } else { Some(v - 1) }).collect();
    let order: Vec<usize> = (0..n).collect();
    ElimTree::from_parents(parent, &order).unwrap()
}

fn star_tree(n: usize) -> ElimTree {
    let parent: Vec<Option<usize>> = (0..n).map(|v| if v == 0 { None } else { Some(0) }).collect();
    let order: Vec<usize> = (0..n).collect();
    ElimTree::from_parents(parent, &order).unwrap()
}

fn path(n: usize) -> Graph {
    Graph::new(n, &(0..n - 1).map(|i| (i, i + 1)).collect::<Vec<_>>()).unwrap()
}

fn core_of(src: &str) -> CoreFormula {
    to_core(&parse(src).unwrap()).unwrap()
}

const F_GEQ: &str = "(exists X Y (= (N (geq 1) X Y) V))";
const F_MOD: &str = "(exists X Y (= (N (mod 2 1) X Y) V))";
const F_EQ2: &str = "(exists X Y (= (N (eq 2) X Y) V))";
const F_INDEP2: &str = "(exists X (and (= (cap (N (geq 1) X) X) empty) (geq (card X) 2)))";

/// Tail entry options with all-zero residues (the exact form ignores them).
fn entry_options(inst: &Instance, v: usize) -> Vec<TailEntry> {
    inst.enumerate_entries(v)
        .into_iter()
        .filter(|e| e.delta.iter().all(|&d| d == 0))
        .collect()
}

/// Cartesian sweep over per-position option lists, visiting every `step`-th
/// combination.
fn sweep(opts: &[Vec<TailEntry>], step: usize, mut f: impl FnMut(Vec<TailEntry>)) {
    let total: usize = opts.iter().map(|o| o.len()).product();
    let mut i = 0;
    while i < total {
        let mut code = i;
        let mut entries = Vec::with_capacity(opts.len());
        for o in opts {
            entries.push(o[code % o.len()].clone());
            code /= o.len();
        }
        f(entries);
        i += step;
    }
}

/// Expected exact-form residue vector of a frame, from first principles.
fn expected_vec(
    inst: &Instance,
    triad: &neo_graph::Triad,
    entries: &[TailEntry],
    fm: u64,
) -> Vec<SparsePoly<BigInt>> {
    let glen = inst.delta_group_len(entries.len());
    let ncat = inst.ncat();
    let mut out = vec![SparsePoly::zero(inst.nslots); glen];
    for (dcode, slot) in out.iter_mut().enumerate() {
        let digits = decode_radix(dcode, inst.p, entries.len() * ncat.max(1));
        let mut ents = entries.to_vec();
        for (pos, en) in ents.iter_mut().enumerate() {
            en.delta = digits[pos * ncat..(pos + 1) * ncat].to_vec();
        }
        let index = Index {
            entries: ents,
            false_mask: fm,
        };
        let sols = enumerate_partial_solutions(inst, triad, &index).unwrap();
        for s in sols {
            let mut exps = vec![s.a, s.b];
            exps.extend(s.c_bar.iter().map(|&c| c as u32));
            slot.add_assign(
                &BigIntOps,
                &SparsePoly::monomial(&BigIntOps, inst.nslots, exps, 1),
            );
        }
    }
    out
}

fn frames_match_enumeration(g: &Graph, t: &ElimTree, core: &CoreFormula, step: usize) {
    let inst = Instance::new(g, t, core, 0).unwrap();
    let alg = BigSym {
        nslots: inst.nslots,
    };
    let ctx = RunCtx::default();
    let ev = Evaluator::new(&inst, &alg, &NoState, &NoHooks, &ctx);
    for u in 0..g.n {
        for closed in [true, false] {
            let triad = if closed {
                triad_closed(t, &inst.sheafs, u)
            } else {
                triad_open(t, &inst.sheafs, u)
            };
            let opts: Vec<Vec<TailEntry>> =
                triad.tail.iter().map(|&v| entry_options(&inst, v)).collect();
            for fm in [0u64, inst.eq_mask] {
                sweep(&opts, step, |mut entries| {
                    let got = if closed {
                        ev.p_closed(u, &mut entries, fm).unwrap()
                    } else {
                        ev.p_open(u, &mut entries, fm).unwrap()
                    };
                    let zero = vec![SparsePoly::zero(inst.nslots); inst.delta_group_len(triad.tail.len())];
                    let gotvec = got.states.get(&Vec::new()).unwrap_or(&zero);
                    let want = expected_vec(&inst, &triad, &entries, fm);
                    assert_eq!(
                        gotvec, &want,
                        "frame mismatch at node {u} closed={closed} fm={fm:#b}"
                    );
                });
            }
        }
    }
}

#[test]
fn single_edge_leaf_value_is_copies_plus_one() {
    let g = path(2);
    let t = chain_tree(2);
    let core = core_of(F_GEQ);
    let inst = Instance::new(&g, &t, &core, 0).unwrap();
    let alg = FpSym::new(13, core.p_phi, inst.nslots).unwrap();
    let ctx = RunCtx::default();
    let ev = Evaluator::new(&inst, &alg, &NoState, &NoHooks, &ctx);
    let xbit = 1u64 << inst.vvar_index("X").unwrap();
    for a in 0..=1u32 {
        let index = Index {
            entries: vec![
                TailEntry {
                    v: 0,
                    f: xbit, // the source endpoint carries the obligation
                    e: vec![1],
                    a: vec![0],
                    delta: vec![0],
                },
                TailEntry {
                    v: 1,
                    f: 0,
                    e: vec![1], // capped target: no below-cap factor
                    a: vec![a],
                    delta: vec![0],
                },
            ],
            false_mask: 0,
        };
        let got = ev.q_leaf(1, &index).unwrap();
        let want = SparsePoly::constant(&neo_algebra::FpOps { p: 13 }, inst.nslots, (a + 1) as i64);
        assert_eq!(got, want, "a = {a}");
    }
}

#[test]
fn q_leaf_rejects_internal_nodes_and_bad_indexes() {
    let g = path(3);
    let t = chain_tree(3);
    let core = core_of(F_GEQ);
    let inst = Instance::new(&g, &t, &core, 0).unwrap();
    let alg = FpSym::new(13, core.p_phi, inst.nslots).unwrap();
    let ctx = RunCtx::default();
    let ev = Evaluator::new(&inst, &alg, &NoState, &NoHooks, &ctx);
    assert!(matches!(
        ev.q_leaf(1, &Index::root(0)),
        Err(EngineError::NotALeaf(1))
    ));
    // wrong tail for the leaf
    assert!(matches!(
        ev.q_leaf(2, &Index::root(0)),
        Err(EngineError::BadIndex(_))
    ));
}

#[test]
fn chain_frames_match_enumeration() {
    let g = path(3);
    let t = chain_tree(3);
    for (src, step) in [(F_GEQ, 1), (F_MOD, 1), (F_EQ2, 7)] {
        let core = core_of(src);
        frames_match_enumeration(&g, &t, &core, step);
    }
}

#[test]
fn star_join_frames_match_enumeration() {
    let g = Graph::new(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
    let t = star_tree(4);
    for (src, step) in [(F_GEQ, 1), (F_MOD, 1)] {
        let core = core_of(src);
        frames_match_enumeration(&g, &t, &core, step);
    }
}

#[test]
fn transformed_form_is_residue_transform_of_exact_form() {
    let g = path(3);
    let t = chain_tree(3);
    for src in [F_GEQ, F_MOD] {
        let core = core_of(src);
        let inst = Instance::new(&g, &t, &core, 0).unwrap();
        let p_field = 17u64; // 17 = 1 mod 2, admits the needed root of unity
        let alg = FpSym::new(p_field, inst.p, inst.nslots).unwrap();
        let ctx = RunCtx::default();
        let ev = Evaluator::new(&inst, &alg, &NoState, &NoHooks, &ctx);
        let ncat = inst.ncat();
        for u in 0..g.n {
            for closed in [true, false] {
                let tail = {
                    let mut t2 = t.tail_closed(u);
                    if !closed {
                        t2.pop();
                    }
                    t2
                };
                let opts: Vec<Vec<TailEntry>> =
                    tail.iter().map(|&v| entry_options(&inst, v)).collect();
                for fm in [0u64, inst.eq_mask] {
                    sweep(&opts, 3, |mut entries| {
                        // exact-form vector over residues
                        let pv = if closed {
                            ev.p_closed(u, &mut entries, fm).unwrap()
                        } else {
                            ev.p_open(u, &mut entries, fm).unwrap()
                        };
                        let glen = inst.delta_group_len(tail.len());
                        let zero = vec![SparsePoly::zero(inst.nslots); glen];
                        let pvec = pv.states.get(&Vec::new()).unwrap_or(&zero);
                        // transformed value at each transformed coordinate
                        for dstar in 0..glen {
                            let digits =
                                decode_radix(dstar, inst.p, tail.len() * ncat.max(1));
                            let mut ents = entries.clone();
                            for (pos, en) in ents.iter_mut().enumerate() {
                                en.delta = digits[pos * ncat..(pos + 1) * ncat].to_vec();
                            }
                            let qv = if closed {
                                ev.q_closed(u, &mut ents, fm).unwrap()
                            } else {
                                ev.q_open(u, &mut ents, fm).unwrap()
                            };
                            // sum_q omega^{q . dstar} P[q]
                            let mut want = SparsePoly::zero(inst.nslots);
                            for (q, pq) in pvec.iter().enumerate() {
                                let dot: i64 = decode_radix(
                                    q,
                                    inst.p,
                                    tail.len() * ncat.max(1),
                                )
                                .iter()
                                .zip(&digits)
                                .map(|(&a, &b)| a as i64 * b as i64)
                                .sum();
                                let mut term = pq.clone();
                                alg.scale_field(&mut term, alg.omega_pow(dot));
                                want.add_assign(&neo_algebra::FpOps { p: p_field }, &term);
                            }
                            assert_eq!(
                                qv, want,
                                "transform mismatch at node {u} closed={closed}"
                            );
                        }
                    });
                }
            }
        }
    }
}

#[test]
fn root_diagonal_matches_model_counts() {
    use neo_oracle::count_models_by_false_set;
    let cases = [
        (path(2), chain_tree(2), F_INDEP2),
        (path(3), chain_tree(3), F_INDEP2),
        (path(3), chain_tree(3), F_MOD),
        (path(3), chain_tree(3), F_EQ2),
    ];
    for (g, t, src) in cases {
        let core = core_of(src);
        let inst = Instance::new(&g, &t, &core, 0).unwrap();
        let alg = BigSym {
            nslots: inst.nslots,
        };
        let ctx = RunCtx::default();
        let ev = Evaluator::new(&inst, &alg, &NoState, &NoHooks, &ctx);
        let counts = count_models_by_false_set(&g, &core, 24).unwrap();
        let nmeas = inst.measured.len();
        let mut fm = inst.eq_mask;
        loop {
            let _false_set: BTreeSet<usize> = inst.false_set_of_mask(fm);
            let rootvals = ev.p_root_exact(fm).unwrap();
            let empty = SparsePoly::zero(inst.nslots);
            let poly = rootvals.get(&Vec::new()).unwrap_or(&empty);
            // realizable measurement vectors according to the recursion
            let mut realized: BTreeSet<Vec<u64>> = BTreeSet::new();
            for (exps, coeff) in &poly.terms {
                assert!(coeff > &BigInt::from(0), "negative surviving coefficient");
                if exps[0] == exps[1] {
                    realized
                        .insert(exps[2..2 + nmeas].iter().map(|&x| x as u64).collect());
                }
            }
            let oracle: BTreeSet<Vec<u64>> = counts
                .iter()
                .filter(|((fs, _), &cnt)| {
                    cnt > 0 && inst.false_mask(&fs.iter().copied().collect()).unwrap() == fm
                })
                .map(|((_, c), _)| c.clone())
                .collect();
            assert_eq!(realized, oracle, "formula {src} fm={fm:#b} n={}", g.n);
            if fm == 0 {
                break;
            }
            fm = (fm - 1) & inst.eq_mask;
        }
    }
}

#[test]
fn symbolic_and_evaluated_roots_cohere() {
    for src in [F_INDEP2, F_MOD] {
        let g = path(3);
        let t = chain_tree(3);
        let core = core_of(src);
        let inst = Instance::new(&g, &t, &core, 0).unwrap();
        let layout = ExponentLayout::new(&inst).unwrap();
        let plan =
            neo_algebra::find_prime_plan(inst.p as u64, layout.degree_bound, layout.coeff_bits)
                .unwrap();
        let alg = BigSym {
            nslots: inst.nslots,
        };
        let ctx = RunCtx::default();
        let ev = Evaluator::new(&inst, &alg, &NoState, &NoHooks, &ctx);
        for fm in [0u64, inst.eq_mask] {
            let mut stack = Vec::new();
            let pv = ev.p_open(inst.t.root, &mut stack, fm).unwrap();
            let empty = SparsePoly::zero(inst.nslots);
            let poly = pv
                .states
                .get(&Vec::new())
                .map(|v| &v[0])
                .unwrap_or(&empty);
            for (i, &p) in plan.primes.iter().enumerate().take(2) {
                for s in [1u64, 2, p - 1] {
                    let bases = layout.point_bases(s, p, inst.nslots);
                    let falg = FpEval::new(p, inst.p, bases.clone()).unwrap();
                    let fev = Evaluator::new(&inst, &falg, &NoState, &NoHooks, &ctx);
                    let mut stack = Vec::new();
                    let got = fev.q_open(inst.t.root, &mut stack, fm).unwrap();
                    let want = poly.eval_mod(&bases, p);
                    assert_eq!(got, want, "src={src} prime#{i}={p} point={s} fm={fm:#b}");
                }
            }
        }
    }
}

#[test]
fn decide_agrees_with_oracle_both_modes() {
    use neo_oracle::brute_force_check_core;
    let c5 = {
        let mut e: Vec<_> = (0..4).map(|i| (i, i + 1)).collect();
        e.push((4, 0));
        Graph::new(5, &e).unwrap()
    };
    let k2 = path(2);
    let p3 = path(3);
    let f_indep3 = "(exists X (and (= (cap (N (geq 1) X) X) empty) (geq (card X) 3)))";
    let f_dom = "(exists X (and (= (cup X (N (geq 1) X)) V) (leq (card X) 1)))";
    let f_odd = "(exists X (= (N (mod 2 1) X) V))";
    let cases: Vec<(&Graph, &str)> = vec![
        (&c5, F_INDEP2),
        (&c5, f_indep3),
        (&p3, f_dom),
        (&k2, f_odd),
        (&p3, f_odd),
        (&p3, F_EQ2),
    ];
    for (g, src) in cases {
        let t = neo_graph::build_dfs_elimination_tree(g).unwrap();
        let core = core_of(src);
        let want = brute_force_check_core(g, &core, 24).unwrap();
        let ctx = RunCtx::default();
        let got_big = decide_bigint(g, &t, &core, &ctx).unwrap();
        assert_eq!(got_big, want, "bigint on {src} (n={})", g.n);
        let ctx = RunCtx::default();
        let got_crt = decide_crt(g, &t, &core, 2, &ctx).unwrap();
        assert_eq!(got_crt, want, "crt on {src} (n={})", g.n);
    }
}

#[test]
fn budgets_are_enforced() {
    let g = path(3);
    let t = chain_tree(3);
    let core = core_of(F_INDEP2);
    let ctx = RunCtx::with_budget(Some(5), None);
    assert!(matches!(
        decide_bigint(&g, &t, &core, &ctx),
        Err(EngineError::BudgetExceeded { .. })
    ));
}

#[test]
fn special_predicates_are_rejected() {
    let g = path(3);
    let t = chain_tree(3);
    for (src, what) in [
        ("(exists X (conn X))", "connectivity"),
        ("(exists X (acy X))", "acyclicity"),
        ("(exists X (clique X))", "clique"),
    ] {
        let core = core_of(src);
        let ctx = RunCtx::default();
        match decide_bigint(&g, &t, &core, &ctx) {
            Err(EngineError::UnsupportedPredicate(w)) => assert_eq!(w, what),
            other => panic!("expected rejection for {src}, got {other:?}"),
        }
    }
}

#[test]
fn trace_lines_are_emitted_and_well_formed() {
    let g = path(2);
    let t = chain_tree(2);
    let core = core_of(F_GEQ);
    let lines = std::sync::Arc::new(std::sync::Mutex::new(Vec::<String>::new()));
    let sink = lines.clone();
    let mut ctx = RunCtx::default();
    ctx.set_trace(Box::new(move |l| sink.lock().unwrap().push(l.to_string())));
    decide_bigint(&g, &t, &core, &ctx).unwrap();
    let lines = lines.lock().unwrap();
    assert!(!lines.is_empty());
    for l in lines.iter() {
        let ok_call = {
            let parts: Vec<&str> = l.split_whitespace().collect();
            parts.len() == 4
                && parts[0] == "CALL"
                && parts[1].parse::<usize>().is_ok()
                && (parts[2] == "open" || parts[2] == "closed")
                && u64::from_str_radix(parts[3], 16).is_ok()
        };
        let ok_ret = l.starts_with("RET ");
        assert!(ok_call || ok_ret, "malformed trace line: {l}");
    }
    assert_eq!(
        lines.iter().filter(|l| l.starts_with("CALL")).count(),
        lines.iter().filter(|l| l.starts_with("RET")).count()
    );
}
