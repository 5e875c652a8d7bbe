use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use lcflow::commands::{self, parse_budget, parse_rational_arg, resolve_seed};
use lcflow::format::{parse_demand, parse_graph, parse_pairs, GraphFile};
use lcflow::json::{parse_witness_bundle, render};
use lcflow::suite::{run_suite, SuiteCommand, SuiteOptions};
use lcflow_core::boosting::MincostKind;
use lcflow_core::demand::{Demand, SourceSinkPair};
use lcflow_core::lowstep::Tau;

#[derive(Parser)]
#[command(name = "lcflow", version, about = "Length-constrained multi-commodity flow solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum TauArg {
    One,
    Full,
}

impl From<TauArg> for Tau {
    fn from(t: TauArg) -> Tau {
        match t {
            TauArg::One => Tau::One,
            TauArg::Full => Tau::Full,
        }
    }
}

#[derive(Args)]
struct GraphArg {
    /// Graph file in the `p lcf` format.
    #[arg(long)]
    graph: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// (1+eps)-approximate h-length multi-commodity maxflow.
    Lcmaxflow {
        #[command(flatten)]
        g: GraphArg,
        #[arg(long)]
        pairs: PathBuf,
        #[arg(long)]
        h: u64,
        #[arg(long, default_value = "1/10")]
        eps: String,
    },
    /// Greedy low-step flow (directed on edge graphs, undirected on vertex graphs).
    Lowstep {
        #[command(flatten)]
        g: GraphArg,
        #[arg(long)]
        demand: PathBuf,
        #[arg(long)]
        t: usize,
        #[arg(long, value_enum, default_value = "full")]
        tau: TauArg,
        #[arg(long, default_value = "1/2")]
        eps: String,
    },
    /// Approximate min-total-length flow through the identity shortcut.
    Mtl {
        #[command(flatten)]
        g: GraphArg,
        #[arg(long)]
        demand: PathBuf,
        #[arg(long, value_enum, default_value = "full")]
        tau: TauArg,
        #[arg(long, default_value = "1/2")]
        eps: String,
    },
    /// Concurrent mincost flow: maximise lambda with lambda*D routed within budget.
    MincostConcurrent {
        #[command(flatten)]
        g: GraphArg,
        #[arg(long)]
        demand: PathBuf,
        /// Cost budget, a rational or `inf`.
        #[arg(long)]
        budget: Option<String>,
        #[arg(long, default_value = "1/12")]
        eps: String,
    },
    /// Non-concurrent mincost flow: maximise the total routed value within budget.
    MincostNonconcurrent {
        #[command(flatten)]
        g: GraphArg,
        #[arg(long)]
        pairs: PathBuf,
        #[arg(long)]
        budget: Option<String>,
        #[arg(long, default_value = "1/12")]
        eps: String,
    },
    /// Seeded neighborhood cover with h_diam = beta * h_cov.
    Cover {
        #[command(flatten)]
        g: GraphArg,
        #[arg(long)]
        h_cov: u64,
        #[arg(long, default_value = "4")]
        beta: String,
        /// Overridden by LCFLOW_SEED.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Moving-cut tools.
    Cuts {
        #[command(subcommand)]
        command: CutsCommand,
    },
    /// Exact exponential-time reference solvers.
    Oracle {
        #[command(subcommand)]
        command: OracleCommand,
    },
    /// Run a corpus directory against expected-value sidecars.
    Suite(SuiteArgs),
}

#[derive(Subcommand)]
enum CutsCommand {
    /// Verify a cut-sequence witness bundle (JSON).
    VerifyUnion {
        #[command(flatten)]
        g: GraphArg,
        #[arg(long)]
        witness: PathBuf,
        /// Constant in the n^{c/s} factor of the size bound.
        #[arg(long, default_value_t = 4)]
        c: u32,
    },
}

#[derive(Subcommand)]
enum OracleCommand {
    Lcmaxflow {
        #[command(flatten)]
        g: GraphArg,
        #[arg(long)]
        pairs: PathBuf,
        /// Length bound; omit for the unconstrained maxflow.
        #[arg(long)]
        h: Option<u64>,
    },
    /// Exact t-step min-total-length flow of value tau.
    Lowstep {
        #[command(flatten)]
        g: GraphArg,
        #[arg(long)]
        demand: PathBuf,
        #[arg(long)]
        t: Option<usize>,
        #[arg(long, value_enum, default_value = "full")]
        tau: TauArg,
    },
    MincostConcurrent {
        #[command(flatten)]
        g: GraphArg,
        #[arg(long)]
        demand: PathBuf,
        #[arg(long)]
        budget: Option<String>,
    },
    MincostNonconcurrent {
        #[command(flatten)]
        g: GraphArg,
        #[arg(long)]
        pairs: PathBuf,
        #[arg(long)]
        budget: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteCommandArg {
    Lcmaxflow,
    Lowstep,
    MincostConcurrent,
    MincostNonconcurrent,
    Cover,
    VerifyUnion,
}

#[derive(Args)]
struct SuiteArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, value_enum)]
    command: SuiteCommandArg,
    #[arg(long, default_value_t = 4)]
    h: u64,
    #[arg(long, default_value = "1/4")]
    eps: String,
    #[arg(long, default_value_t = 3)]
    t: usize,
    #[arg(long, value_enum, default_value = "full")]
    tau: TauArg,
    #[arg(long)]
    budget: Option<String>,
    #[arg(long, default_value_t = 2)]
    h_cov: u64,
    #[arg(long, default_value = "4")]
    beta: String,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 4)]
    c: u32,
}

fn read(p: &Path) -> Result<String> {
    fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display()))
}

fn load_graph(p: &Path) -> Result<GraphFile> {
    parse_graph(&read(p)?).with_context(|| format!("{}", p.display()))
}

fn load_demand(p: &Path, n: usize) -> Result<Demand> {
    parse_demand(&read(p)?, n).with_context(|| format!("{}", p.display()))
}

fn load_pairs(p: &Path, n: usize) -> Result<Vec<SourceSinkPair>> {
    parse_pairs(&read(p)?, n).with_context(|| format!("{}", p.display()))
}

fn env_seed() -> Option<String> {
    std::env::var("LCFLOW_SEED").ok()
}

/// Report plus exit status (0 success, 2 failed verification).
fn run(cli: Cli) -> Result<(Value, u8)> {
    let ok = |v: Value| Ok((v, 0));
    let verdict = |(v, passed): (Value, bool)| Ok((v, if passed { 0 } else { 2 }));
    match cli.command {
        Command::Lcmaxflow { g, pairs, h, eps } => {
            let gf = load_graph(&g.graph)?;
            let p = load_pairs(&pairs, gf.graph.n())?;
            ok(commands::lcmaxflow(&gf.graph, &p, h, &parse_rational_arg(&eps)?)?)
        }
        Command::Lowstep { g, demand, t, tau, eps } => {
            let gf = load_graph(&g.graph)?;
            let d = load_demand(&demand, gf.graph.n())?;
            ok(commands::lowstep(&gf.graph, &d, t, tau.into(), &parse_rational_arg(&eps)?)?)
        }
        Command::Mtl { g, demand, tau, eps } => {
            let gf = load_graph(&g.graph)?;
            let d = load_demand(&demand, gf.graph.n())?;
            ok(commands::mtl(&gf.graph, &d, tau.into(), &parse_rational_arg(&eps)?)?)
        }
        Command::MincostConcurrent { g, demand, budget, eps } => {
            let gf = load_graph(&g.graph)?;
            let d = load_demand(&demand, gf.graph.n())?;
            let b = parse_budget(budget.as_deref())?;
            ok(commands::mincost(&gf, MincostKind::Concurrent(d), b, &parse_rational_arg(&eps)?)?)
        }
        Command::MincostNonconcurrent { g, pairs, budget, eps } => {
            let gf = load_graph(&g.graph)?;
            let p = commands::single_pairs(&load_pairs(&pairs, gf.graph.n())?)?;
            let b = parse_budget(budget.as_deref())?;
            ok(commands::mincost(&gf, MincostKind::NonConcurrent(p), b, &parse_rational_arg(&eps)?)?)
        }
        Command::Cover { g, h_cov, beta, seed } => {
            let gf = load_graph(&g.graph)?;
            let seed = resolve_seed(seed, env_seed().as_deref())?;
            verdict(commands::cover(&gf.graph, h_cov, &parse_rational_arg(&beta)?, seed)?)
        }
        Command::Cuts { command: CutsCommand::VerifyUnion { g, witness, c } } => {
            let gf = load_graph(&g.graph)?;
            let text = read(&witness)?;
            let v: Value = serde_json::from_str(&text).with_context(|| format!("{}", witness.display()))?;
            let bundle = parse_witness_bundle(&v, gf.graph.n()).with_context(|| format!("{}", witness.display()))?;
            verdict(commands::verify_union(&gf.graph, &bundle, c)?)
        }
        Command::Oracle { command } => match command {
            OracleCommand::Lcmaxflow { g, pairs, h } => {
                let gf = load_graph(&g.graph)?;
                let p = load_pairs(&pairs, gf.graph.n())?;
                ok(commands::oracle_lcmaxflow(&gf.graph, &p, h)?)
            }
            OracleCommand::Lowstep { g, demand, t, tau } => {
                let gf = load_graph(&g.graph)?;
                let d = load_demand(&demand, gf.graph.n())?;
                ok(commands::oracle_mincost(&gf.graph, &d, tau.into(), t)?)
            }
            OracleCommand::MincostConcurrent { g, demand, budget } => {
                let gf = load_graph(&g.graph)?;
                let d = load_demand(&demand, gf.graph.n())?;
                ok(commands::oracle_concurrent(&gf, &d, parse_budget(budget.as_deref())?.as_ref())?)
            }
            OracleCommand::MincostNonconcurrent { g, pairs, budget } => {
                let gf = load_graph(&g.graph)?;
                let p = commands::single_pairs(&load_pairs(&pairs, gf.graph.n())?)?;
                ok(commands::oracle_nonconcurrent(&gf, &p, parse_budget(budget.as_deref())?.as_ref())?)
            }
        },
        Command::Suite(a) => {
            let command = match a.command {
                SuiteCommandArg::Lcmaxflow => SuiteCommand::LcMaxflow,
                SuiteCommandArg::Lowstep => SuiteCommand::LowStep,
                SuiteCommandArg::MincostConcurrent => SuiteCommand::MincostConcurrent,
                SuiteCommandArg::MincostNonconcurrent => SuiteCommand::MincostNonConcurrent,
                SuiteCommandArg::Cover => SuiteCommand::Cover,
                SuiteCommandArg::VerifyUnion => SuiteCommand::VerifyUnion,
            };
            let opts = SuiteOptions {
                command,
                h: a.h,
                eps: parse_rational_arg(&a.eps)?,
                t: a.t,
                tau: a.tau.into(),
                budget: parse_budget(a.budget.as_deref())?,
                h_cov: a.h_cov,
                beta: parse_rational_arg(&a.beta)?,
                seed: resolve_seed(a.seed, env_seed().as_deref())?,
                c: a.c,
            };
            let out = run_suite(&a.corpus, &opts)?;
            for w in &out.warnings {
                eprintln!("{w}");
            }
            Ok((out.report, u8::from(out.failed > 0)))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok((report, code)) => {
            print!("{}", render(&report));
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
