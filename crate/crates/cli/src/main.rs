use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use mfhg::dynamics::{run_dynamics, Scheduler, ScriptedMove};
use mfhg::experiments::{
    generate, parse_suite, run_suite, Family, InstanceSpec, Params, RationalParam,
};
use mfhg::solvers::{
    brute_force_optimum, greedy_core, optimal_basic_partition, strong_nash_from_optimum,
    SolverOptions,
};
use mfhg::{CheckOptions, Checker, CoalitionStructure, DeviationMode, Error, Graph, StabilityKind};

#[derive(Parser)]
#[command(
    name = "mfhg",
    version,
    about = "Modified fractional hedonic games on weighted graphs"
)]
struct Cli {
    /// stop a stability search after this many candidate deviations
    #[arg(long, global = true, default_value_t = mfhg::stability::DEFAULT_GUARD_LIMIT)]
    guard_limit: u64,
    /// worker threads for `suite`
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// seed for the random scheduler and for `generate random-er`
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check whether a partition is stable
    Check {
        graph: PathBuf,
        /// partition file, or `singletons` / `grand`
        partition: String,
        /// nash, kstrong, core, strict-core, or a full form such as kstrong(3)
        #[arg(long, default_value = "nash")]
        kind: String,
        /// deviation size for kstrong: a number or `n`
        #[arg(long)]
        k: Option<String>,
        /// deviators may stay even, as long as one gains
        #[arg(long)]
        relaxed: bool,
    },
    /// Build a partition with one of the solvers
    Solve {
        graph: PathBuf,
        #[arg(long, value_enum)]
        alg: Alg,
        #[arg(long, default_value_t = mfhg::solvers::DEFAULT_MAX_AGENTS)]
        max_agents: usize,
        /// skip the exhaustive stability check of the result
        #[arg(long)]
        no_verify: bool,
    },
    /// Run improvement dynamics and print one JSON line per move
    Dynamics {
        graph: PathBuf,
        /// initial partition file, or `singletons` / `grand`
        init: String,
        #[arg(long, value_enum, default_value = "best-response")]
        scheduler: Sched,
        /// moves for the scripted scheduler: `agent:target` or a bare agent
        /// (best response), separated by commas
        #[arg(long)]
        script: Option<String>,
        #[arg(long, default_value_t = 1000)]
        max_steps: usize,
    },
    /// Write an instance graph to stdout
    Generate {
        family: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        eps: Option<String>,
        #[arg(long)]
        m: Option<String>,
        #[arg(long)]
        p: Option<f64>,
        /// comma separated weight set for random-er
        #[arg(long)]
        weights: Option<String>,
    },
    /// Run an experiment suite and report measured ratios
    Suite {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Alg {
    Brute,
    OptimalBasic,
    StrongNash,
    GreedyCore,
}

#[derive(Clone, Copy, ValueEnum)]
enum Sched {
    FirstImprove,
    BestResponse,
    Scripted,
    Random,
}

enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome = Result<bool, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_limit() { 3 } else { 2 })
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<Graph, Failure> {
    Ok(Graph::parse(&read(path)?)?)
}

fn load_partition(arg: &str, n: usize) -> Result<CoalitionStructure, Failure> {
    let path = Path::new(arg);
    let c = if !path.exists() && arg == "singletons" {
        CoalitionStructure::singletons(n)
    } else if !path.exists() && arg == "grand" {
        CoalitionStructure::grand(n)
    } else {
        CoalitionStructure::from_json(&read(path)?)?
    };
    if c.n() != n {
        return Err(Failure::Usage(format!(
            "partition has {} agents, graph has {n}",
            c.n()
        )));
    }
    Ok(c)
}

fn stability_kind(kind: &str, k: Option<&str>, relaxed: bool) -> Result<StabilityKind, Failure> {
    let mode = if relaxed {
        DeviationMode::Relaxed
    } else {
        DeviationMode::Strict
    };
    if kind == "kstrong" || kind == "relaxed-kstrong" {
        let k = match k {
            None | Some("n") => None,
            Some(k) => Some(
                k.parse::<usize>()
                    .map_err(|_| Failure::Usage(format!("bad --k `{k}`")))?,
            ),
        };
        let mode = if kind == "relaxed-kstrong" {
            DeviationMode::Relaxed
        } else {
            mode
        };
        return Ok(StabilityKind::KStrong { k, mode });
    }
    let parsed: StabilityKind = kind.parse()?;
    Ok(match parsed {
        StabilityKind::KStrong { k, .. } if relaxed => StabilityKind::KStrong { k, mode },
        other => other,
    })
}

fn parse_script(text: &str) -> Result<Vec<ScriptedMove>, Failure> {
    let bad = |s: &str| Failure::Usage(format!("bad script entry `{s}`"));
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            let (agent, target) = match s.split_once(':') {
                Some((a, t)) => (a, Some(t.trim().parse().map_err(|_| bad(s))?)),
                None => (s, None),
            };
            let agent = agent.trim().parse().map_err(|_| bad(s))?;
            Ok(ScriptedMove { agent, target })
        })
        .collect()
}

fn rational(text: &str) -> Result<RationalParam, Failure> {
    Ok(text.parse()?)
}

fn run(cli: &Cli) -> Outcome {
    let solver = |max_agents, verify| SolverOptions {
        max_agents,
        guard_limit: cli.guard_limit,
        verify,
    };
    match &cli.command {
        Command::Check {
            graph,
            partition,
            kind,
            k,
            relaxed,
        } => {
            let g = load_graph(graph)?;
            let c = load_partition(partition, g.n())?;
            let kind = stability_kind(kind, k.as_deref(), *relaxed)?;
            let checker = Checker::with_options(
                &g,
                CheckOptions {
                    guard_limit: cli.guard_limit,
                },
            );
            let result = checker.check(&c, kind)?;
            let witness = serde_json::to_string(&result.witness()).expect("witness serializes");
            println!(
                "{{\"kind\":\"{kind}\",\"stable\":{},\"witness\":{witness}}}",
                result.is_stable()
            );
            Ok(result.is_stable())
        }
        Command::Solve {
            graph,
            alg,
            max_agents,
            no_verify,
        } => {
            let g = load_graph(graph)?;
            let opts = solver(*max_agents, !no_verify);
            let report = match alg {
                Alg::Brute => brute_force_optimum(&g, &opts)?,
                Alg::OptimalBasic => optimal_basic_partition(&g)?,
                Alg::StrongNash => strong_nash_from_optimum(&g, &opts)?,
                Alg::GreedyCore => greedy_core(&g, &opts)?,
            };
            println!("{}", report.to_json());
            Ok(true)
        }
        Command::Dynamics {
            graph,
            init,
            scheduler,
            script,
            max_steps,
        } => {
            let g = load_graph(graph)?;
            let c = load_partition(init, g.n())?;
            let scheduler = match scheduler {
                Sched::FirstImprove => Scheduler::FirstImprove,
                Sched::BestResponse => Scheduler::BestResponse,
                Sched::Random => Scheduler::Random {
                    seed: cli.seed.unwrap_or(0),
                },
                Sched::Scripted => {
                    let text = script.as_deref().ok_or_else(|| {
                        Failure::Usage("scripted scheduler needs --script".into())
                    })?;
                    Scheduler::Scripted(parse_script(text)?)
                }
            };
            let trace = run_dynamics(&g, &c, &scheduler, *max_steps)?;
            print!("{}", trace.to_json_lines());
            Ok(true)
        }
        Command::Generate {
            family,
            n,
            k,
            eps,
            m,
            p,
            weights,
        } => {
            let family: Family = family.parse()?;
            let weights = match weights {
                Some(w) => Some(
                    w.split(',')
                        .map(|x| rational(x.trim()))
                        .collect::<Result<_, _>>()?,
                ),
                None => None,
            };
            let spec = InstanceSpec {
                family,
                params: Params {
                    n: *n,
                    k: *k,
                    eps: eps.as_deref().map(rational).transpose()?,
                    m: m.as_deref().map(rational).transpose()?,
                    p: *p,
                    weights,
                    seed: cli.seed,
                },
            };
            print!("{}", generate(&spec)?.to_text());
            Ok(true)
        }
        Command::Suite { config } => {
            let entries = parse_suite(&read(config)?)?;
            let report = run_suite(
                &entries,
                &solver(mfhg::solvers::DEFAULT_MAX_AGENTS, true),
                cli.jobs.max(1),
            )?;
            println!("{}", report.to_json());
            for r in report.results.iter().filter(|r| !r.pass) {
                eprintln!(
                    "entry {} instance {} ({}): {}",
                    r.entry,
                    r.instance,
                    r.family,
                    r.failures.join("; ")
                );
            }
            Ok(report.all_passed())
        }
    }
}
