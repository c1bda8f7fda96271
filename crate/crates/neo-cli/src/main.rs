use clap::{Args, Parser, Subcommand};
use neo_cli::{selftest, Mode, RunConfig};
use std::path::PathBuf;
use std::process::ExitCode;

/// Model checker for neighborhood-operator logic with connectivity,
/// acyclicity and clique constraints on graphs of bounded elimination-tree
/// depth.
#[derive(Parser)]
#[command(name = "neomc", version, about)]
struct Cli {
    #[command(subcommand)]
    cmd: Option<Cmd>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args)]
struct RunArgs {
    /// graph file (`p n m` / `e u v` / `vc` / `ec` lines)
    #[arg(long)]
    graph: Option<PathBuf>,
    /// elimination-tree file (`t v parent|-1` lines); omitted: DFS tree
    #[arg(long)]
    tree: Option<PathBuf>,
    /// formula file (S-expressions)
    #[arg(long)]
    formula: Option<PathBuf>,
    /// decision mode: bigint | crt | oracle
    #[arg(long, default_value = "bigint")]
    mode: String,
    /// seed for the randomized connectivity/acyclicity driver
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Monte-Carlo repetitions per randomized clause
    #[arg(long, default_value_t = 10)]
    repetitions: u32,
    /// print recursion and Monte-Carlo trace lines to stderr
    #[arg(long)]
    trace: bool,
    /// machine-readable JSON report on stdout
    #[arg(long)]
    json: bool,
    /// wall-clock budget in milliseconds (exit 3 when exceeded)
    #[arg(long)]
    budget_ms: Option<u64>,
    /// recursion-node budget (exit 3 when exceeded)
    #[arg(long)]
    budget_nodes: Option<u64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the built-in corpus in all applicable modes and report
    /// agreements with the frozen expected verdicts.
    Selftest {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        repetitions: u32,
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.cmd {
        Some(Cmd::Selftest {
            seed,
            repetitions,
            json,
        }) => match selftest(seed, repetitions) {
            Ok(rep) => {
                if json {
                    println!("{}", serde_json::to_string_pretty(&rep).unwrap());
                } else {
                    for row in &rep.rows {
                        let modes: Vec<String> = row
                            .verdicts
                            .iter()
                            .map(|(m, v)| format!("{m}={v}"))
                            .collect();
                        println!(
                            "{} {}: expected {} | {}",
                            if row.ok { "ok  " } else { "FAIL" },
                            row.name,
                            row.expected,
                            modes.join(" ")
                        );
                    }
                    println!(
                        "{} entries, {} disagreements",
                        rep.rows.len(),
                        rep.disagreements
                    );
                }
                if rep.disagreements == 0 {
                    ExitCode::from(0)
                } else {
                    ExitCode::from(1)
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(e.exit_code() as u8)
            }
        },
        None => {
            let (Some(graph), Some(formula)) = (cli.run.graph, cli.run.formula) else {
                eprintln!("error: --graph and --formula are required (or use `selftest`)");
                return ExitCode::from(2);
            };
            let mode: Mode = match cli.run.mode.parse() {
                Ok(m) => m,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            let cfg = RunConfig {
                graph,
                tree: cli.run.tree,
                formula,
                mode,
                seed: cli.run.seed,
                repetitions: cli.run.repetitions,
                trace: cli.run.trace,
                json: cli.run.json,
                budget_ms: cli.run.budget_ms,
                budget_nodes: cli.run.budget_nodes,
            };
            match neo_cli::run(&cfg) {
                Ok(report) => {
                    if cfg.json {
                        println!("{}", serde_json::to_string_pretty(&report).unwrap());
                    } else {
                        print!("{}", report.render_text());
                    }
                    ExitCode::from(report.exit_code() as u8)
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(e.exit_code() as u8)
                }
            }
        }
    }
}
