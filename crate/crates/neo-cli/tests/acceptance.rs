//! Acceptance suite: one test per criterion, each printing a single
//! `ACCEPTANCE <n> (<name>): PASS|FAIL` line (run with `--nocapture` to see
//! them live). Work gates: the oracle refuses instances beyond its
//! assignment-bit cap and the engine runs under a node budget; gated pairs
//! are counted and reported, never silently dropped, and zero tolerance
//! applies to every pair that ran.

use neo_algebra::{
    dft, dft_table_size, find_prime_plan, inverse_dft, mobius_transform, mod_add, mod_i64,
    mod_mul, mod_pow, zeta_transform, BigIntOps, SparsePoly,
};
use neo_cli::{corpus_dir, load_corpus, selftest, worker_threads};
use neo_engine::instance::decode_radix;
use neo_engine::*;
use neo_ext::{decide_ack, AckConfig, Verdict};
use neo_graph::{build_dfs_elimination_tree, triad_closed, triad_open, ElimTree, Graph};
use neo_logic::{parse, to_core, Atom, Body, CoreFormula, Formula, Term};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use std::collections::BTreeSet;
use std::panic::{catch_unwind, resume_unwind, AssertUnwindSafe};

fn criterion(n: u32, name: &str, f: impl FnOnce() -> String) {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(note) => println!("ACCEPTANCE {n} ({name}): PASS — {note}"),
        Err(e) => {
            println!("ACCEPTANCE {n} ({name}): FAIL");
            resume_unwind(e);
        }
    }
}

fn read_formula(name: &str) -> (Formula, CoreFormula) {
    let path = corpus_dir().join("formulas").join(name);
    let text = std::fs::read_to_string(&path).unwrap();
    let ast = parse(&text).unwrap();
    let core = to_core(&ast).unwrap();
    (ast, core)
}

fn read_graph(name: &str) -> Graph {
    let path = corpus_dir().join("graphs").join(name);
    Graph::parse(&std::fs::read_to_string(&path).unwrap()).unwrap()
}

fn tree(g: &Graph) -> ElimTree {
    build_dfs_elimination_tree(g).unwrap()
}

fn term_colors(t: &Term, out: &mut BTreeSet<String>) {
    match t {
        Term::Color(c) => {
            out.insert(c.clone());
        }
        Term::Cup(a, b) | Term::Cap(a, b) | Term::SetMinus(a, b) => {
            term_colors(a, out);
            term_colors(b, out);
        }
        Term::Comp(a) => term_colors(a, out),
        Term::N { arg, edges, .. } => {
            term_colors(arg, out);
            if let Some(e) = edges {
                term_colors(e, out);
            }
        }
        _ => {}
    }
}

fn atom_terms(a: &Atom) -> Vec<&Term> {
    match a {
        Atom::Eq(s, t) | Atom::SubsetEq(s, t) | Atom::SupsetEq(s, t) => vec![s, t],
        Atom::Card(t, _, _) | Atom::Conn(t) | Atom::Acy(t) | Atom::Clique(t) => vec![t],
        Atom::In(_, t) => vec![t],
        Atom::Adj(_, _) => vec![],
    }
}

fn walk_atoms<'a>(b: &'a Body, out: &mut Vec<&'a Atom>) {
    match b {
        Body::Atom(a) => out.push(a),
        Body::And(xs) | Body::Or(xs) => xs.iter().for_each(|x| walk_atoms(x, out)),
        Body::Not(x) => walk_atoms(x, out),
        Body::Exists(_, x) => walk_atoms(x, out),
    }
}

fn formula_colors(ast: &Formula) -> BTreeSet<String> {
    let mut atoms = Vec::new();
    walk_atoms(&ast.body, &mut atoms);
    let mut colors = BTreeSet::new();
    for a in atoms {
        for t in atom_terms(a) {
            term_colors(t, &mut colors);
        }
    }
    colors
}

// ---------------------------------------------------------------------------
// criterion 1: oracle equivalence on the plain fragment, both engine modes
// ---------------------------------------------------------------------------

const PLAIN_FORMULAS: [&str; 12] = [
    "indep2.neo",
    "indep3.neo",
    "domset1.neo",
    "eds1.neo",
    "maxcut4.neo",
    "maxcut5.neo",
    "regular2.neo",
    "perfcode.neo",
    "odddom.neo",
    "minpardom1.neo",
    "satinc.neo",
    "maxsat1.neo",
];

#[test]
fn criterion_1_oracle_equivalence() {
    criterion(1, "oracle equivalence, bigint and crt", || {
        let mut graphs: Vec<(String, Graph)> = [
            "c4.gr", "c5.gr", "p3.gr", "p4.gr", "k2.gr", "k3.gr", "k4.gr", "k14.gr",
            "satinc.gr", "unsatinc.gr",
        ]
        .iter()
        .map(|n| (n.to_string(), read_graph(n)))
        .collect();
        let mut rng = ChaCha12Rng::seed_from_u64(2024);
        for i in 0..30 {
            let n = rng.gen_range(4..=7usize);
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(0.4) {
                        edges.push((u, v));
                    }
                }
            }
            graphs.push((format!("rand{i}(n={n})"), Graph::new(n, &edges).unwrap()));
        }

        let mut ran = 0usize;
        let mut gated = 0usize;
        for fname in PLAIN_FORMULAS {
            let (ast, core) = read_formula(fname);
            let need = formula_colors(&ast);
            let mut ran_f = 0usize;
            for (gname, g) in &graphs {
                let have = need.iter().all(|c| {
                    g.vertex_colors.contains_key(c) || g.edge_colors.contains_key(c)
                });
                if !have {
                    continue;
                }
                let truth = match neo_oracle::brute_force_check(g, &ast, 24) {
                    Ok(v) => v,
                    Err(neo_oracle::OracleError::TooLarge { .. }) => {
                        gated += 1;
                        continue;
                    }
                    Err(e) => panic!("oracle failed on {gname}/{fname}: {e}"),
                };
                let t = tree(g);
                let mut ctx = RunCtx::default();
                ctx.node_budget = Some(3_000_000);
                for mode in [Mode::Bigint, Mode::Crt] {
                    let opts = DecideOpts {
                        mode,
                        threads: worker_threads().min(4),
                    };
                    match decide(g, &t, &core, &opts, &ctx) {
                        Ok(got) => {
                            assert_eq!(
                                got, truth,
                                "mismatch: {fname} on {gname} mode {mode:?}"
                            );
                            ran += 1;
                            ran_f += 1;
                        }
                        Err(EngineError::BudgetExceeded { .. }) => gated += 1,
                        Err(e) => panic!("engine failed on {gname}/{fname}: {e}"),
                    }
                }
            }
            assert!(
                ran_f >= 2,
                "formula {fname} never ran in both modes on any graph"
            );
        }
        format!("{ran} (formula,graph,mode) runs agreed with the oracle, {gated} gated by work caps")
    });
}

// ---------------------------------------------------------------------------
// criterion 2: recursion families vs enumeration and transform, 4 vertices
// ---------------------------------------------------------------------------

const F_GEQ: &str = "(exists X Y (= (N (geq 1) X Y) V))";
const F_MOD: &str = "(exists X Y (= (N (mod 2 1) X Y) V))";

fn chain_tree(n: usize) -> ElimTree {
    let parent: Vec<Option<usize>> =
        (0..n).map(|v| if v == 0 { None } else { Some(v - 1) }).collect();
    ElimTree::from_parents(parent, &(0..n).collect::<Vec<_>>()).unwrap()
}

fn star_tree(n: usize) -> ElimTree {
    let parent: Vec<Option<usize>> =
        (0..n).map(|v| if v == 0 { None } else { Some(0) }).collect();
    ElimTree::from_parents(parent, &(0..n).collect::<Vec<_>>()).unwrap()
}

fn core_of(src: &str) -> CoreFormula {
    to_core(&parse(src).unwrap()).unwrap()
}

fn four_vertex_instances() -> Vec<(&'static str, Graph, ElimTree)> {
    vec![
        ("path", Graph::new(4, &[(0, 1), (1, 2), (2, 3)]).unwrap(), chain_tree(4)),
        ("star", Graph::new(4, &[(0, 1), (0, 2), (0, 3)]).unwrap(), star_tree(4)),
        (
            "cycle",
            Graph::new(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap(),
            chain_tree(4),
        ),
    ]
}

fn entry_options(inst: &Instance, v: usize) -> Vec<TailEntry> {
    inst.enumerate_entries(v)
        .into_iter()
        .filter(|e| e.delta.iter().all(|&d| d == 0))
        .collect()
}

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

/// Frame value derived from first principles: enumerate every compatible
/// partial solution per residue vector and sum its monomial.
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
        for s in enumerate_partial_solutions(inst, triad, &index).unwrap() {
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

/// Check all frames (leaf, forget and join nodes, open and closed) against
/// enumeration; every produced polynomial is also fed to `sink`.
fn frames_match_enumeration(
    g: &Graph,
    t: &ElimTree,
    core: &CoreFormula,
    step: usize,
    sink: &mut dyn FnMut(&SparsePoly<BigInt>),
) {
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
                    let zero =
                        vec![SparsePoly::zero(inst.nslots); inst.delta_group_len(triad.tail.len())];
                    let gotvec = got.states.get(&Vec::new()).unwrap_or(&zero);
                    let want = expected_vec(&inst, &triad, &entries, fm);
                    assert_eq!(
                        gotvec, &want,
                        "frame mismatch at node {u} closed={closed} fm={fm:#b}"
                    );
                    for p in gotvec {
                        sink(p);
                    }
                });
            }
        }
    }
}

/// Check that the transformed recursion is the residue transform of the
/// exact one at every frame: Q(δ*) = Σ_q ω^{q·δ*} P[q].
fn transform_matches(g: &Graph, t: &ElimTree, core: &CoreFormula, step: usize) {
    let inst = Instance::new(g, t, core, 0).unwrap();
    let p_field = 17u64;
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
                sweep(&opts, step, |mut entries| {
                    let pv = if closed {
                        ev.p_closed(u, &mut entries, fm).unwrap()
                    } else {
                        ev.p_open(u, &mut entries, fm).unwrap()
                    };
                    let glen = inst.delta_group_len(tail.len());
                    let zero = vec![SparsePoly::zero(inst.nslots); glen];
                    let pvec = pv.states.get(&Vec::new()).unwrap_or(&zero);
                    for dstar in 0..glen {
                        let digits = decode_radix(dstar, inst.p, tail.len() * ncat.max(1));
                        let mut ents = entries.clone();
                        for (pos, en) in ents.iter_mut().enumerate() {
                            en.delta = digits[pos * ncat..(pos + 1) * ncat].to_vec();
                        }
                        let qv = if closed {
                            ev.q_closed(u, &mut ents, fm).unwrap()
                        } else {
                            ev.q_open(u, &mut ents, fm).unwrap()
                        };
                        let mut want = SparsePoly::zero(inst.nslots);
                        for (q, pq) in pvec.iter().enumerate() {
                            let dot: i64 = decode_radix(q, inst.p, tail.len() * ncat.max(1))
                                .iter()
                                .zip(&digits)
                                .map(|(&a, &b)| a as i64 * b as i64)
                                .sum();
                            let mut term = pq.clone();
                            alg.scale_field(&mut term, alg.omega_pow(dot));
                            want.add_assign(&neo_algebra::FpOps { p: p_field }, &term);
                        }
                        assert_eq!(qv, want, "transform mismatch at node {u} closed={closed}");
                    }
                });
            }
        }
    }
}

#[test]
fn criterion_2_recursion_families() {
    criterion(2, "leaf/forget/join vs enumeration and transform", || {
        let mut frames = 0usize;
        for (name, g, t) in four_vertex_instances() {
            for src in [F_GEQ, F_MOD] {
                let core = core_of(src);
                assert_eq!(core.cat.len(), 1, "{name}: one category pair expected");
                assert!(core.d_phi <= 2 && core.p_phi <= 2);
                frames_match_enumeration(&g, &t, &core, 3, &mut |_| frames += 1);
                transform_matches(&g, &t, &core, 7);
            }
        }
        format!("{frames} frame polynomials matched first-principles enumeration")
    });
}

// ---------------------------------------------------------------------------
// criterion 3: algebra identities
// ---------------------------------------------------------------------------

#[test]
fn criterion_3_algebra_suite() {
    criterion(3, "transform, cover-product and reconstruction identities", || {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        // transform round-trip, |D| <= 3, r <= 4, three admissible primes
        for dlen in 0..=3usize {
            for r in 1..=4u64 {
                for p in [5u64, 13, 17] {
                    if (p - 1) % r != 0 {
                        continue;
                    }
                    let size = dft_table_size(dlen, r);
                    let h: Vec<u64> = (0..size).map(|_| rng.gen_range(0..p)).collect();
                    let t = dft(dlen, r, p, &h).unwrap();
                    assert_eq!(inverse_dft(dlen, r, p, &t).unwrap(), h);
                }
            }
        }
        // convolution through the transform
        for (dlen, r, p) in [(1usize, 2u64, 13u64), (2, 2, 5), (2, 4, 17)] {
            let size = dft_table_size(dlen, r);
            let a: Vec<u64> = (0..size).map(|_| rng.gen_range(0..p)).collect();
            let b: Vec<u64> = (0..size).map(|_| rng.gen_range(0..p)).collect();
            let mut conv = vec![0u64; size];
            let rr = r as usize;
            for (x, &av) in a.iter().enumerate() {
                for (y, &bv) in b.iter().enumerate() {
                    let mut z = 0usize;
                    for d in (0..dlen).rev() {
                        let pw = rr.pow(d as u32);
                        z = z * rr + ((x / pw) % rr + (y / pw) % rr) % rr;
                    }
                    conv[z] = mod_add(conv[z], mod_mul(av, bv, p), p);
                }
            }
            let ta = dft(dlen, r, p, &a).unwrap();
            let tb = dft(dlen, r, p, &b).unwrap();
            let prod: Vec<u64> = ta.iter().zip(&tb).map(|(&x, &y)| mod_mul(x, y, p)).collect();
            assert_eq!(inverse_dft(dlen, r, p, &prod).unwrap(), conv);
        }
        // union-partition (cover) identity and inversion, |U| <= 4
        for bits in 0..=4usize {
            let n = 1usize << bits;
            let g: Vec<i64> = (0..n).map(|_| rng.gen_range(-10..10)).collect();
            let h: Vec<i64> = (0..n).map(|_| rng.gen_range(-10..10)).collect();
            assert_eq!(mobius_transform(bits, &zeta_transform(bits, &g)), g);
            let mut direct = vec![0i64; n];
            for a in 0..n {
                for b in 0..n {
                    direct[a | b] += g[a] * h[b];
                }
            }
            let pw: Vec<i64> = zeta_transform(bits, &g)
                .iter()
                .zip(&zeta_transform(bits, &h))
                .map(|(x, y)| x * y)
                .collect();
            assert_eq!(mobius_transform(bits, &pw), direct);
        }
        // coefficient reconstruction on 100 random polynomials, degree <= 30
        for trial in 0..100 {
            let deg = rng.gen_range(0..=30u64);
            let mut coeffs = std::collections::BTreeMap::<u64, i64>::new();
            for _ in 0..rng.gen_range(1..=6usize) {
                coeffs.insert(rng.gen_range(0..=deg), rng.gen_range(-1000..1000));
            }
            let plan = find_prime_plan(1, deg, 24).unwrap();
            let mut eval = |i: usize, x: u64| {
                let p = plan.primes[i];
                coeffs.iter().fold(0u64, |acc, (&d, &c)| {
                    mod_add(acc, mod_mul(mod_i64(c, p), mod_pow(x, d, p), p), p)
                })
            };
            let k = rng.gen_range(0..=deg);
            let want = BigInt::from(*coeffs.get(&k).unwrap_or(&0));
            assert_eq!(
                neo_algebra::crt_reconstruct_coefficient(k, &mut eval, &plan).unwrap(),
                want,
                "trial {trial}"
            );
        }
        "round-trip, convolution, cover product and 100 reconstructions held".to_string()
    });
}

// ---------------------------------------------------------------------------
// criterion 4: exponent and coefficient bounds
// ---------------------------------------------------------------------------

#[test]
fn criterion_4_bound_conformance() {
    criterion(4, "exponent and coefficient bounds", || {
        let mut checked = 0usize;
        for (_, g, t) in four_vertex_instances() {
            for src in [F_GEQ, F_MOD] {
                let core = core_of(src);
                let inst = Instance::new(&g, &t, &core, 0).unwrap();
                let layout = ExponentLayout::new(&inst).unwrap();
                let n = g.n as u64;
                let td = t.depth as u64;
                let size = core.size() as u64;
                let d = core.d_phi as u64;
                let coeff_bound = BigInt::from(d + 1).pow((5 * n * td * size) as u32);
                frames_match_enumeration(&g, &t, &core, 5, &mut |p| {
                    let degs = p.max_degree_per_slot();
                    for (k, &b) in layout.bounds.iter().enumerate() {
                        assert!(
                            degs[k] as u64 <= b,
                            "slot {k} exponent {} exceeds bound {b}",
                            degs[k]
                        );
                    }
                    assert!(
                        p.max_abs_coeff() <= coeff_bound,
                        "coefficient beyond (d+1)^(5*n*td*size)"
                    );
                    checked += 1;
                });
            }
        }
        format!("{checked} polynomials within exponent and coefficient bounds")
    });
}

// ---------------------------------------------------------------------------
// criterion 5: Monte-Carlo soundness and completeness
// ---------------------------------------------------------------------------

#[test]
fn criterion_5_monte_carlo() {
    criterion(5, "randomized soundness and per-run completeness", || {
        let runs = 200u64;
        let one_rep = |g: &Graph, core: &CoreFormula, seed: u64| {
            let t = tree(g);
            let cfg = AckConfig {
                seed,
                repetitions: 1,
            };
            decide_ack(g, &t, core, &cfg, &RunCtx::default()).unwrap()
        };
        // soundness: SAT is never reported on unsatisfiable instances
        let unsat: [(&str, &str); 2] = [("p4.gr", "hamilton.neo"), ("e2.gr", "conn2.neo")];
        for (gname, fname) in unsat {
            let g = read_graph(gname);
            let (_, core) = read_formula(fname);
            for seed in 0..runs {
                assert_ne!(
                    one_rep(&g, &core, seed),
                    Verdict::Sat,
                    "unsound SAT on {gname}/{fname} seed {seed}"
                );
            }
        }
        // completeness: single-repetition success rate >= 1/2
        // (binomial, alpha = 0.01: at least 84 of 200 successes required)
        let sat: [(&str, &str); 2] = [("c4.gr", "hamilton.neo"), ("k3.gr", "connacy2.neo")];
        let mut rates = Vec::new();
        for (gname, fname) in sat {
            let g = read_graph(gname);
            let (_, core) = read_formula(fname);
            let hits = (0..runs)
                .filter(|&seed| one_rep(&g, &core, seed) == Verdict::Sat)
                .count();
            assert!(
                hits >= 84,
                "success rate {hits}/200 below the 1/2 bound on {gname}/{fname}"
            );
            rates.push(format!("{fname} on {gname}: {hits}/200"));
        }
        format!("no unsound SAT in 400 runs; completeness {}", rates.join(", "))
    });
}

// ---------------------------------------------------------------------------
// criterion 6: clique determinism
// ---------------------------------------------------------------------------

#[test]
fn criterion_6_clique_determinism() {
    criterion(6, "clique decisions match the oracle deterministically", || {
        let pairs = [
            ("k3.gr", "clique3.neo"),
            ("p3.gr", "clique3.neo"),
            ("k4.gr", "clique4.neo"),
            ("c4.gr", "clique4.neo"),
        ];
        for (gname, fname) in pairs {
            let g = read_graph(gname);
            let (_, core) = read_formula(fname);
            let truth = neo_oracle::brute_force_check_core(&g, &core, 24).unwrap();
            let t = tree(&g);
            let got = decide_ack(&g, &t, &core, &AckConfig::default(), &RunCtx::default()).unwrap();
            let want = if truth { Verdict::Sat } else { Verdict::Unsat };
            assert_eq!(got, want, "{gname}/{fname} (must be exact, not probable)");
        }
        "4 clique instances decided exactly, matching the oracle".to_string()
    });
}

// ---------------------------------------------------------------------------
// criterion 7: core-conversion contract
// ---------------------------------------------------------------------------

fn term_sigmas(t: &Term, out: &mut Vec<String>) {
    match t {
        Term::Cup(a, b) | Term::Cap(a, b) | Term::SetMinus(a, b) => {
            term_sigmas(a, out);
            term_sigmas(b, out);
        }
        Term::Comp(a) => term_sigmas(a, out),
        Term::N { sigma, arg, edges } => {
            out.push(format!("{sigma:?}"));
            term_sigmas(arg, out);
            if let Some(e) = edges {
                term_sigmas(e, out);
            }
        }
        _ => {}
    }
}

#[test]
fn criterion_7_core_conversion() {
    criterion(7, "core conversion size, sigma and semantics contract", || {
        let dir = corpus_dir();
        let entries = load_corpus(&dir).unwrap();
        let mut checked = 0usize;
        for e in &entries {
            let text = std::fs::read_to_string(&e.formula).unwrap();
            let ast = parse(&text).unwrap();
            let core = to_core(&ast).unwrap();
            // size blow-up bounded
            assert!(
                core.size() <= 10 * ast.size(),
                "{}: |core| = {} > 10 * {}",
                e.name,
                core.size(),
                ast.size()
            );
            // condition sets preserved (identical duplicated atoms may merge)
            let mut ast_sigmas = Vec::new();
            let mut atoms = Vec::new();
            walk_atoms(&ast.body, &mut atoms);
            let mut ast_cards = 0usize;
            for a in &atoms {
                if matches!(a, Atom::Card(..)) {
                    ast_cards += 1;
                }
                for t in atom_terms(a) {
                    term_sigmas(t, &mut ast_sigmas);
                }
            }
            let core_sigmas: BTreeSet<String> = core
                .prims
                .iter()
                .filter_map(|p| match p {
                    neo_logic::Prim::NeighborEq { sigma, .. } => Some(format!("{sigma:?}")),
                    _ => None,
                })
                .collect();
            let ast_set: BTreeSet<String> = ast_sigmas.into_iter().collect();
            assert_eq!(ast_set, core_sigmas, "{}: condition sets differ", e.name);
            // at most two added size measurements
            let core_cards = core
                .prims
                .iter()
                .filter(|p| matches!(p, neo_logic::Prim::Card { .. }))
                .count();
            assert!(
                core_cards <= ast_cards + 2,
                "{}: {core_cards} measurements from {ast_cards} atoms",
                e.name
            );
            // semantic equivalence on the instance's own graph
            let g = Graph::parse(&std::fs::read_to_string(&e.graph).unwrap()).unwrap();
            let a = neo_oracle::brute_force_check(&g, &ast, 24).unwrap();
            let b = neo_oracle::brute_force_check_core(&g, &core, 24).unwrap();
            assert_eq!(a, b, "{}: ast and core disagree", e.name);
            checked += 1;
        }
        format!("{checked} corpus formulas satisfy the conversion contract")
    });
}

// ---------------------------------------------------------------------------
// criterion 8: problem-encoding regression
// ---------------------------------------------------------------------------

#[test]
fn criterion_8_corpus_regression() {
    criterion(8, "fixed corpus verdicts in every mode", || {
        let fixed = [
            ("indep2-c5", "SAT"),
            ("indep3-c5", "UNSAT"),
            ("domset1-k14", "SAT"),
            ("maxcut4-c4", "SAT"),
            ("maxcut5-c4", "UNSAT"),
            ("satinc-sat", "SAT"),
            ("satinc-unsat", "UNSAT"),
            ("odddom-k2", "SAT"),
        ];
        let report = selftest(1, 10).unwrap();
        assert_eq!(report.disagreements, 0, "selftest disagreements");
        for (name, want) in fixed {
            let row = report
                .rows
                .iter()
                .find(|r| r.name == name)
                .unwrap_or_else(|| panic!("corpus entry {name} missing"));
            assert_eq!(row.expected, want, "frozen verdict changed for {name}");
            assert!(row.ok, "verdict disagreement for {name}");
        }
        format!(
            "{} corpus entries agree in oracle/bigint/crt; 8 frozen verdicts intact",
            report.rows.len()
        )
    });
}
