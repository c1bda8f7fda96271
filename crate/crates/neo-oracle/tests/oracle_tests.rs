use neo_graph::Graph;
use neo_logic::{parse, to_core};
use neo_oracle::*;

fn cycle(n: usize) -> Graph {
    let mut e: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
    e.push((n - 1, 0));
    Graph::new(n, &e).unwrap()
}

fn path(n: usize) -> Graph {
    Graph::new(n, &(0..n - 1).map(|i| (i, i + 1)).collect::<Vec<_>>()).unwrap()
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

const INDEP2: &str = "(exists X (and (= (cap (N (geq 1) X) X) empty) (geq (card X) 2)))";
const INDEP3: &str = "(exists X (and (= (cap (N (geq 1) X) X) empty) (geq (card X) 3)))";

#[test]
fn independent_set_on_c5() {
    let g = cycle(5);
    let f2 = parse(INDEP2).unwrap();
    let f3 = parse(INDEP3).unwrap();
    assert!(brute_force_check(&g, &f2, 24).unwrap());
    assert!(!brute_force_check(&g, &f3, 24).unwrap());
}

#[test]
fn clique_on_k3() {
    let g = complete(3);
    let f = parse("(exists X (and (clique X) (geq (card X) 3)))").unwrap();
    assert!(brute_force_check(&g, &f, 24).unwrap());
    assert!(!brute_force_check(&path(3), &f, 24).unwrap());
}

#[test]
fn sat_incidence_formula() {
    // CNF (x ∨ y) ∧ (¬x ∨ ¬y): incidence graph with variable vertices 0,1
    // and clause vertices 2,3; positive-occurrence edges colored `pos`,
    // negative ones `neg`. SAT iff some truth assignment X of variables
    // touches every clause through a pos edge (var true) or neg edge (var
    // false): C ⊆ N^{>=1}(X, pos-edges) ∪ N^{>=1}(comp(X), neg-edges)
    // restricted to clause vertices.
    let mut g = Graph::new(4, &[(0, 2), (1, 2), (0, 3), (1, 3)]).unwrap();
    g.add_vertex_color("vars", &[0, 1]).unwrap();
    g.add_vertex_color("cls", &[2, 3]).unwrap();
    g.add_edge_color("pos", 0, 2).unwrap();
    g.add_edge_color("pos", 1, 2).unwrap();
    g.add_edge_color("neg", 0, 3).unwrap();
    g.add_edge_color("neg", 1, 3).unwrap();
    let sat = "(exists X (and (subseteq X (color vars)) \
               (subseteq (color cls) (cup (N (geq 1) X (color pos)) \
                                          (N (geq 1) (cap (comp X) (color vars)) (color neg))))))";
    let f = parse(sat).unwrap();
    assert!(brute_force_check(&g, &f, 24).unwrap());

    // x ∧ ¬x: one variable, two clauses {x}, {¬x} — unsatisfiable
    let mut g2 = Graph::new(3, &[(0, 1), (0, 2)]).unwrap();
    g2.add_vertex_color("vars", &[0]).unwrap();
    g2.add_vertex_color("cls", &[1, 2]).unwrap();
    g2.add_edge_color("pos", 0, 1).unwrap();
    g2.add_edge_color("neg", 0, 2).unwrap();
    assert!(!brute_force_check(&g2, &f, 24).unwrap());
}

#[test]
fn hamiltonian_cycle() {
    let f = parse("(exists Y (and (conn Y) (= (N (eq 2) V Y) V)))").unwrap();
    assert!(brute_force_check(&cycle(4), &f, 24).unwrap());
    assert!(!brute_force_check(&path(4), &f, 24).unwrap());
}

#[test]
fn conn_and_acy_empty_set_conventions() {
    let g = Graph::new(3, &[]).unwrap(); // edgeless
    let f = parse("(exists X (and (conn X) (acy X) (leq (card X) 0)))").unwrap();
    assert!(brute_force_check(&g, &f, 24).unwrap());
    // connected set of size >= 2 impossible on an edgeless graph
    let f2 = parse("(exists X (and (conn X) (geq (card X) 2)))").unwrap();
    assert!(!brute_force_check(&g, &f2, 24).unwrap());
}

#[test]
fn too_large_is_reported() {
    let g = complete(5); // n=5, m=10: two edge vars = 20 bits + 5 = 25 > 24
    let f = parse("(exists X Y B (and (= (N (geq 1) X Y) V) (= (N (geq 1) X B) V)))").unwrap();
    assert!(matches!(
        brute_force_check(&g, &f, 24),
        Err(OracleError::TooLarge { .. })
    ));
}

#[test]
fn count_models_by_false_set_on_k2() {
    let g = complete(2);
    let f = parse("(exists X Y2 (= X Y2))").unwrap();
    let core = to_core(&f).unwrap();
    let map = count_models_by_false_set(&g, &core, 24).unwrap();
    let eq = core.eq_prims();
    assert_eq!(eq.len(), 1);
    assert_eq!(map[&(vec![], vec![])], 4);
    assert_eq!(map[&(eq.clone(), vec![])], 12);
    let total: u64 = map.values().sum();
    assert_eq!(total, 16);
}

#[test]
fn false_set_mass_with_no_equalities() {
    let g = path(3);
    let f = parse("(exists X (geq (card X) 1))").unwrap();
    let core = to_core(&f).unwrap();
    let map = count_models_by_false_set(&g, &core, 24).unwrap();
    assert!(map.keys().all(|(fs, _)| fs.is_empty()));
    let total: u64 = map.values().sum();
    assert_eq!(total, 8);
}

#[test]
fn ast_and_core_agree() {
    let graphs = [cycle(4), cycle(5), path(4), complete(4), complete(3)];
    let formulas = [
        INDEP2,
        INDEP3,
        "(exists X (= (cup X (N (geq 1) X)) V))",
        "(exists Y (= (N (eq 2) V Y) V))",
        "(exists X (and (clique X) (geq (card X) 3)))",
        "(exists x y (adj x y))",
        "(exists x X (and (in x X) (leq (card X) 2)))",
    ];
    for g in &graphs {
        for src in &formulas {
            let ast = parse(src).unwrap();
            let core = to_core(&ast).unwrap();
            let a = brute_force_check(g, &ast, 26).unwrap();
            let b = brute_force_check_core(g, &core, 26).unwrap();
            assert_eq!(a, b, "formula {src} on graph n={}", g.n);
        }
    }
}

#[test]
fn dominating_set_on_star() {
    // K_{1,4}: center 0
    let g = Graph::new(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
    let f = parse("(exists X (and (= (cup X (N (geq 1) X)) V) (leq (card X) 1)))").unwrap();
    assert!(brute_force_check(&g, &f, 24).unwrap());
}
