//! Plumbing for the `neomc` binary: load graph/tree/formula files, pick a
//! decision path, and render a report. Also hosts the built-in corpus
//! self-test used by the binary and the acceptance suite.

use neo_engine::{decide_bigint, decide_crt, EngineError, RunCtx};
use neo_ext::{decide_ack, AckConfig, Verdict};
use neo_graph::{build_dfs_elimination_tree, ElimTree, Graph};
use neo_logic::{parse, to_core, CoreFormula, Formula, Prim};
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::{Duration, Instant};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Bigint,
    Crt,
    Oracle,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Bigint => "bigint",
            Mode::Crt => "crt",
            Mode::Oracle => "oracle",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "bigint" => Ok(Mode::Bigint),
            "crt" => Ok(Mode::Crt),
            "oracle" => Ok(Mode::Oracle),
            other => Err(format!("unknown mode {other:?} (bigint|crt|oracle)")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub graph: PathBuf,
    pub tree: Option<PathBuf>,
    pub formula: PathBuf,
    pub mode: Mode,
    pub seed: u64,
    pub repetitions: u32,
    pub trace: bool,
    pub json: bool,
    pub budget_ms: Option<u64>,
    pub budget_nodes: Option<u64>,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub verdict: String,
    pub mode: &'static str,
    pub d_phi: u32,
    pub p_phi: u32,
    pub cat_pairs: usize,
    pub formula_size: usize,
    pub tree_depth: usize,
    pub auto_tree: bool,
    /// primes in the reconstruction plan (crt mode on the plain fragment)
    pub prime_plan: Option<usize>,
    /// Monte-Carlo parameters when the randomized driver ran
    pub randomized: Option<(u64, u32)>,
    pub wall_ms: u64,
}

impl Report {
    /// Exit status: 0 SAT, 1 UNSAT / PROBABLY_UNSAT.
    pub fn exit_code(&self) -> i32 {
        if self.verdict == "SAT" {
            0
        } else {
            1
        }
    }

    pub fn render_text(&self) -> String {
        let mut s = format!("{}\n", self.verdict);
        s += &format!("mode: {}\n", self.mode);
        s += &format!(
            "formula: size={} d_phi={} p_phi={} cat_pairs={}\n",
            self.formula_size, self.d_phi, self.p_phi, self.cat_pairs
        );
        s += &format!(
            "tree: depth={}{}\n",
            self.tree_depth,
            if self.auto_tree {
                " (auto-built by DFS; no --tree given)"
            } else {
                " (from file)"
            }
        );
        if let Some(np) = self.prime_plan {
            s += &format!("prime_plan: {np} primes\n");
        }
        if let Some((seed, reps)) = self.randomized {
            s += &format!("randomized: seed={seed} repetitions={reps}\n");
        }
        s += &format!("wall_ms: {}\n", self.wall_ms);
        s
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Graph(#[from] neo_graph::GraphError),
    #[error(transparent)]
    Logic(#[from] neo_logic::LogicError),
    #[error(transparent)]
    Oracle(#[from] neo_oracle::OracleError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

impl CliError {
    /// 3 for exceeded budgets, 2 for any other failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Engine(EngineError::BudgetExceeded { .. }) => 3,
            _ => 2,
        }
    }
}

fn read(p: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(p)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", p.display())))
}

pub fn worker_threads() -> usize {
    if let Ok(v) = std::env::var("NEOMC_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            return n.max(1);
        }
    }
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

fn has_special(core: &CoreFormula) -> bool {
    core.prims
        .iter()
        .any(|p| matches!(p, Prim::Conn { .. } | Prim::Acy { .. } | Prim::Clique { .. }))
}

fn make_ctx(cfg: &RunConfig) -> RunCtx {
    let mut ctx = RunCtx::default();
    ctx.node_budget = cfg.budget_nodes;
    ctx.deadline = cfg.budget_ms.map(|ms| Instant::now() + Duration::from_millis(ms));
    if cfg.trace {
        ctx.trace = Some(Mutex::new(Box::new(|line: &str| {
            eprintln!("{line}");
        })));
    }
    ctx
}

pub struct Loaded {
    pub g: Graph,
    pub t: ElimTree,
    pub auto_tree: bool,
    pub ast: Formula,
    pub core: CoreFormula,
}

pub fn load(cfg: &RunConfig) -> Result<Loaded, CliError> {
    let g = Graph::parse(&read(&cfg.graph)?)?;
    let (t, auto_tree) = match &cfg.tree {
        Some(p) => (ElimTree::parse(&read(p)?, g.n)?, false),
        None => (build_dfs_elimination_tree(&g)?, true),
    };
    let ast = parse(&read(&cfg.formula)?)?;
    let core = to_core(&ast)?;
    Ok(Loaded {
        g,
        t,
        auto_tree,
        ast,
        core,
    })
}

pub fn run(cfg: &RunConfig) -> Result<Report, CliError> {
    let start = Instant::now();
    let l = load(cfg)?;
    let ctx = make_ctx(cfg);
    let special = has_special(&l.core);
    let mut prime_plan = None;
    let mut randomized = None;

    let verdict = match cfg.mode {
        Mode::Oracle => {
            if neo_oracle::brute_force_check(&l.g, &l.ast, neo_oracle::DEFAULT_CAP_BITS)? {
                "SAT"
            } else {
                "UNSAT"
            }
        }
        _ if special => {
            let ack = AckConfig {
                seed: cfg.seed,
                repetitions: cfg.repetitions,
            };
            randomized = Some((cfg.seed, cfg.repetitions));
            match decide_ack(&l.g, &l.t, &l.core, &ack, &ctx)? {
                Verdict::Sat => "SAT",
                Verdict::Unsat => "UNSAT",
                Verdict::ProbablyUnsat => "PROBABLY_UNSAT",
            }
        }
        Mode::Bigint => {
            if decide_bigint(&l.g, &l.t, &l.core, &ctx)? {
                "SAT"
            } else {
                "UNSAT"
            }
        }
        Mode::Crt => {
            let inst = neo_engine::instance::Instance::new(&l.g, &l.t, &l.core, 0)?;
            let layout = neo_engine::ExponentLayout::new(&inst)?;
            let plan = neo_algebra::find_prime_plan(
                inst.p as u64,
                layout.degree_bound,
                layout.coeff_bits,
            )
            .map_err(EngineError::from)?;
            prime_plan = Some(plan.primes.len());
            drop(inst);
            if decide_crt(&l.g, &l.t, &l.core, worker_threads(), &ctx)? {
                "SAT"
            } else {
                "UNSAT"
            }
        }
    };

    Ok(Report {
        verdict: verdict.to_string(),
        mode: cfg.mode.as_str(),
        d_phi: l.core.d_phi,
        p_phi: l.core.p_phi,
        cat_pairs: l.core.cat.len(),
        formula_size: l.core.size(),
        tree_depth: l.t.depth,
        auto_tree: l.auto_tree,
        prime_plan,
        randomized,
        wall_ms: start.elapsed().as_millis() as u64,
    })
}

/// One corpus entry from `corpus/manifest.tsv`:
/// `name<TAB>graph<TAB>formula<TAB>expected`.
#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub name: String,
    pub graph: PathBuf,
    pub formula: PathBuf,
    pub expected: String,
}

/// The in-repo corpus directory: `NEOMC_CORPUS` if set, else the `corpus`
/// directory next to the workspace this binary was built from.
pub fn corpus_dir() -> PathBuf {
    if let Ok(p) = std::env::var("NEOMC_CORPUS") {
        return PathBuf::from(p);
    }
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .join("corpus")
}

pub fn load_corpus(dir: &Path) -> Result<Vec<CorpusEntry>, CliError> {
    let manifest = read(&dir.join("manifest.tsv"))?;
    let mut out = Vec::new();
    for line in manifest.lines() {
        let l = line.trim();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = l.split('\t').collect();
        if cols.len() != 4 {
            return Err(CliError::Io(format!(
                "manifest line needs 4 tab-separated columns: {l:?}"
            )));
        }
        out.push(CorpusEntry {
            name: cols[0].to_string(),
            graph: dir.join("graphs").join(cols[1]),
            formula: dir.join("formulas").join(cols[2]),
            expected: cols[3].to_string(),
        });
    }
    Ok(out)
}

#[derive(Debug, Serialize)]
pub struct SelftestRow {
    pub name: String,
    pub expected: String,
    pub verdicts: Vec<(String, String)>,
    pub ok: bool,
}

#[derive(Debug, Serialize)]
pub struct SelftestReport {
    pub rows: Vec<SelftestRow>,
    pub disagreements: usize,
}

/// Two verdict strings agree when they assert the same satisfiability;
/// PROBABLY_UNSAT (randomized negative) is compatible with UNSAT.
fn verdicts_agree(expected: &str, got: &str) -> bool {
    let sat = |v: &str| v == "SAT";
    sat(expected) == sat(got)
}

/// Run every corpus entry in every applicable mode and compare against the
/// expected verdict (frozen from oracle runs).
pub fn selftest(seed: u64, repetitions: u32) -> Result<SelftestReport, CliError> {
    let dir = corpus_dir();
    let mut rows = Vec::new();
    let mut disagreements = 0;
    for e in load_corpus(&dir)? {
        let mut verdicts = Vec::new();
        let mut ok = true;
        for mode in [Mode::Oracle, Mode::Bigint, Mode::Crt] {
            let cfg = RunConfig {
                graph: e.graph.clone(),
                tree: None,
                formula: e.formula.clone(),
                mode,
                seed,
                repetitions,
                trace: false,
                json: false,
                budget_ms: None,
                budget_nodes: None,
            };
            let report = run(&cfg)?;
            if !verdicts_agree(&e.expected, &report.verdict) {
                ok = false;
            }
            verdicts.push((mode.as_str().to_string(), report.verdict));
        }
        if !ok {
            disagreements += 1;
        }
        rows.push(SelftestRow {
            name: e.name,
            expected: e.expected,
            verdicts,
            ok,
        });
    }
    Ok(SelftestReport {
        rows,
        disagreements,
    })
}
