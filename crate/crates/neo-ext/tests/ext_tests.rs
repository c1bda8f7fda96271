use neo_engine::{decide_bigint, RunCtx};
use neo_ext::{decide_ack, AckConfig, Verdict};
use neo_graph::{build_dfs_elimination_tree, ElimTree, Graph};
use neo_logic::{parse, to_core, CoreFormula};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use std::sync::{Arc, Mutex};

fn core_of(src: &str) -> CoreFormula {
    to_core(&parse(src).unwrap()).unwrap()
}

fn tree(g: &Graph) -> ElimTree {
    build_dfs_elimination_tree(g).unwrap()
}

fn run(g: &Graph, src: &str) -> Verdict {
    let t = tree(g);
    decide_ack(g, &t, &core_of(src), &AckConfig::default(), &RunCtx::default()).unwrap()
}

fn path(n: usize) -> Graph {
    Graph::new(n, &(0..n - 1).map(|i| (i, i + 1)).collect::<Vec<_>>()).unwrap()
}

fn cycle(n: usize) -> Graph {
    Graph::new(n, &(0..n).map(|i| (i, (i + 1) % n)).collect::<Vec<_>>()).unwrap()
}

fn complete(n: usize) -> Graph {
    let mut e = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            e.push((u, v));
        }
    }
    Graph::new(n, &e).unwrap()
}

fn edgeless(n: usize) -> Graph {
    Graph::new(n, &[]).unwrap()
}

#[test]
fn plain_formulas_agree_with_plain_decision() {
    let cases = [
        (
            cycle(5),
            "(exists X (and (= (cap (N (geq 1) X) X) empty) (geq (card X) 2)))",
        ),
        (
            cycle(5),
            "(exists X (and (= (cap (N (geq 1) X) X) empty) (geq (card X) 3)))",
        ),
        (
            path(3),
            "(exists X (and (= (cup X (N (geq 1) X)) V) (leq (card X) 1)))",
        ),
        (path(3), "(exists X (= (N (mod 2 1) X) V))"),
    ];
    for (g, src) in cases {
        let t = tree(&g);
        let core = core_of(src);
        let expect = decide_bigint(&g, &t, &core, &RunCtx::default()).unwrap();
        let got = decide_ack(&g, &t, &core, &AckConfig::default(), &RunCtx::default()).unwrap();
        let want = if expect { Verdict::Sat } else { Verdict::Unsat };
        assert_eq!(got, want, "formula {src}");
    }
}

#[test]
fn connectivity_verdicts() {
    let conn2 = "(exists X (and (conn X) (geq (card X) 2)))";
    let conn3 = "(exists X (and (conn X) (geq (card X) 3)))";
    assert_eq!(run(&path(3), conn2), Verdict::Sat);
    assert_eq!(run(&edgeless(3), conn2), Verdict::ProbablyUnsat);
    let two_edges = Graph::new(4, &[(0, 1), (2, 3)]).unwrap();
    assert_eq!(run(&two_edges, conn2), Verdict::Sat);
    assert_eq!(run(&two_edges, conn3), Verdict::ProbablyUnsat);
    assert_eq!(run(&path(3), conn3), Verdict::Sat);
}

#[test]
fn negated_connectivity_is_decided_exactly() {
    let src = "(exists X (and (not (conn X)) (geq (card X) 2)))";
    assert_eq!(run(&path(3), src), Verdict::Sat); // the two endpoints
    assert_eq!(run(&complete(3), src), Verdict::Unsat); // every subset connected
}

#[test]
fn clique_verdicts() {
    let cl3 = "(exists X (and (clique X) (geq (card X) 3)))";
    let cl4 = "(exists X (and (clique X) (geq (card X) 4)))";
    assert_eq!(run(&complete(3), cl3), Verdict::Sat);
    assert_eq!(run(&path(3), cl3), Verdict::Unsat);
    assert_eq!(run(&complete(4), cl4), Verdict::Sat);
    assert_eq!(run(&cycle(4), cl3), Verdict::Unsat);
    let notcl = "(exists X (and (not (clique X)) (leq (card X) 2)))";
    assert_eq!(run(&path(3), notcl), Verdict::Sat); // a non-adjacent pair
    assert_eq!(run(&complete(3), notcl), Verdict::Unsat);
}

#[test]
fn connected_acyclic_subsets() {
    let st2 = "(exists X (and (conn X) (acy X) (geq (card X) 2)))";
    let st3 = "(exists X (and (conn X) (acy X) (geq (card X) 3)))";
    assert_eq!(run(&complete(3), st2), Verdict::Sat); // one edge's endpoints
    assert_eq!(run(&complete(3), st3), Verdict::ProbablyUnsat); // only the triangle
    assert_eq!(run(&path(3), st3), Verdict::Sat); // the whole path
}

#[test]
fn acyclicity_alone() {
    let acy3 = "(exists X (and (acy X) (geq (card X) 3)))";
    assert_eq!(run(&complete(3), acy3), Verdict::ProbablyUnsat);
    assert_eq!(run(&cycle(4), acy3), Verdict::Sat); // drop one vertex
    let notacy = "(exists X (not (acy X)))";
    assert_eq!(run(&complete(3), notacy), Verdict::Sat);
    assert_eq!(run(&path(3), notacy), Verdict::Unsat);
}

#[test]
fn edge_set_acyclicity_is_rejected() {
    let g = cycle(4);
    let t = tree(&g);
    let core = core_of("(exists Y (and (acy Y) (= Y E)))");
    let err = decide_ack(&g, &t, &core, &AckConfig::default(), &RunCtx::default()).unwrap_err();
    assert!(matches!(
        err,
        neo_engine::EngineError::UnsupportedPredicate("acyclicity over edge sets")
    ));
}

#[test]
fn hamiltonian_cycle() {
    let src = "(exists Y A (and (= A V) (= (N (eq 2) A Y) V) (conn Y)))";
    assert_eq!(run(&cycle(4), src), Verdict::Sat);
    assert_eq!(run(&path(4), src), Verdict::ProbablyUnsat);
}

#[test]
fn verdicts_are_deterministic_per_seed_and_traced() {
    let g = cycle(4);
    let t = tree(&g);
    let core = core_of("(exists X (and (conn X) (geq (card X) 3)))");
    let cfg = AckConfig {
        seed: 7,
        repetitions: 3,
    };
    let lines = Arc::new(Mutex::new(Vec::<String>::new()));
    let sink = lines.clone();
    let mut ctx = RunCtx::default();
    ctx.trace = Some(Mutex::new(Box::new(move |l: &str| {
        sink.lock().unwrap().push(l.to_string());
    })));
    let a = decide_ack(&g, &t, &core, &cfg, &ctx).unwrap();
    let b = decide_ack(&g, &t, &core, &cfg, &RunCtx::default()).unwrap();
    assert_eq!(a, b);
    assert_eq!(a, Verdict::Sat);
    let lines = lines.lock().unwrap();
    assert!(
        lines.iter().any(|l| l.starts_with("MC rep=0 ")),
        "expected a Monte-Carlo trace line, got {:?}",
        lines.iter().take(5).collect::<Vec<_>>()
    );
}

#[test]
fn random_graphs_agree_with_oracle() {
    let formulas = [
        "(exists X (and (conn X) (geq (card X) 3)))",
        "(exists X (and (conn X) (acy X) (geq (card X) 3)))",
        "(exists X (and (clique X) (geq (card X) 3)))",
        "(exists X (and (not (conn X)) (acy X) (geq (card X) 2)))",
    ];
    let mut rng = ChaCha12Rng::seed_from_u64(42);
    for case in 0..6 {
        let n = 4;
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(0.5) {
                    edges.push((u, v));
                }
            }
        }
        let g = Graph::new(n, &edges).unwrap();
        let t = tree(&g);
        for src in formulas {
            let core = core_of(src);
            let truth = neo_oracle::brute_force_check_core(&g, &core, 24).unwrap();
            let got =
                decide_ack(&g, &t, &core, &AckConfig::default(), &RunCtx::default()).unwrap();
            if truth {
                assert_eq!(
                    got,
                    Verdict::Sat,
                    "case {case} edges {edges:?} formula {src}"
                );
            } else {
                assert_ne!(
                    got,
                    Verdict::Sat,
                    "case {case} edges {edges:?} formula {src}"
                );
            }
        }
    }
}
