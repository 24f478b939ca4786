use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use rpd_bench::config::load_params;
use rpd_bench::experiment::load_source;
use rpd_bench::{hypothesis_table, load_instance, read_rows, report, run_experiment, summarize, write_rows};
use rpd_bench::{ExperimentConfig, Method};
use rpd_core::alns::run_pool;
use rpd_core::baselines::best_heuristic;
use rpd_core::instance::{VariantKind, VariantSpec};
use rpd_core::oracle::{default_big_m, exact_solve, export_milp, OracleLimits};
use rpd_core::pipeline::run_pipeline;
use rpd_core::schedule::{coordination_metrics, evaluate, Solution, SolutionFile};

#[derive(Parser)]
#[command(name = "vrp-rpd", version, about = "Routing with resource-constrained pickup and delivery")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance (JSON instance, or TSPLIB file with base times).
    Solve {
        instance: PathBuf,
        #[arg(long, default_value = "pipeline")]
        method: Method,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// TOML file with optional [alns] and [brkga] tables.
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate processing-time variants of a TSPLIB file as instance JSON.
    Variants {
        tsp: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "base,2x,5x,1r10,1r20")]
        kinds: Vec<VariantKind>,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        /// Replicates of the stochastic kinds.
        #[arg(long, default_value_t = 10)]
        replicates: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run an experiment grid from a TOML config.
    Bench {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Replay a solution and report makespan, metrics and constraint checks.
    Verify {
        instance: PathBuf,
        solution: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Exact optimum of a tiny instance.
    Oracle {
        instance: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 6)]
        max_customers: usize,
    },
    /// Paired tests of variants against base from result rows.
    Stats {
        #[arg(long)]
        rows: PathBuf,
    },
    /// Write the MILP model in LP format.
    ExportMilp {
        instance: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Big-M constant; defaults to a serial-schedule upper bound.
        #[arg(long)]
        big_m: Option<f64>,
    },
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Solve {
            instance,
            method,
            seed,
            params,
            out,
        } => solve(&instance, method, seed, params.as_deref(), out.as_deref()),
        Command::Variants {
            tsp,
            kinds,
            seed,
            replicates,
            out,
        } => variants(&tsp, &kinds, seed, replicates, &out),
        Command::Bench { config, out } => bench(&config, &out),
        Command::Verify {
            instance,
            solution,
            seed,
        } => verify(&instance, &solution, seed),
        Command::Oracle {
            instance,
            seed,
            max_customers,
        } => {
            let inst = load_instance(&instance, seed)?;
            let limits = OracleLimits {
                max_customers,
                ..OracleLimits::default()
            };
            let res = exact_solve(&inst, limits)?;
            println!("makespan {}", res.makespan);
            println!("optimal {} ({} nodes)", res.optimal, res.nodes);
            print!("{}", res.solution);
            Ok(())
        }
        Command::Stats { rows } => {
            let file = fs::File::open(&rows).with_context(|| format!("opening {}", rows.display()))?;
            let rows = read_rows(file)?;
            print!("{}", report::hypothesis_table(&hypothesis_table(&rows)));
            Ok(())
        }
        Command::ExportMilp {
            instance,
            out,
            seed,
            big_m,
        } => {
            let inst = load_instance(&instance, seed)?;
            let m = big_m.unwrap_or_else(|| default_big_m(&inst));
            fs::write(&out, export_milp(&inst, m)).with_context(|| format!("writing {}", out.display()))?;
            println!("wrote {}", out.display());
            Ok(())
        }
    }
}

fn solve(path: &Path, method: Method, seed: u64, params: Option<&Path>, out: Option<&Path>) -> Result<()> {
    let inst = load_instance(path, seed)?;
    let params = load_params(params)?;
    let sol = match method {
        Method::Heuristics => best_heuristic(&inst, seed),
        Method::Alns => run_pool(&inst, &params.alns, params.alns.workers_per_pool, seed)?.0,
        Method::Pipeline => {
            let r = run_pipeline(&inst, &params, seed)?;
            println!("alns makespan {}", r.alns_makespan);
            r.solution
        }
    };
    let s = evaluate(&inst, &sol)?;
    let metrics = coordination_metrics(&inst, &sol, &s);
    println!("makespan {}", s.makespan);
    println!("cross_agent_pct {:.2}", metrics.cross_agent_pct);
    println!("interleaved_pct {:.2}", metrics.interleaved_pct);
    print!("{sol}");
    if let Some(out) = out {
        let text = serde_json::to_string_pretty(&sol.to_file(&inst.label))?;
        fs::write(out, text).with_context(|| format!("writing {}", out.display()))?;
    }
    Ok(())
}

fn variants(tsp: &Path, kinds: &[VariantKind], seed: u64, replicates: u32, out: &Path) -> Result<()> {
    let source = load_source(tsp)?;
    fs::create_dir_all(out)?;
    for &kind in kinds {
        let reps = if kind.is_stochastic() { replicates } else { 1 };
        for r in 0..reps {
            let inst = source.instance(VariantSpec::new(kind, seed).with_replicate(r))?;
            let name = if kind.is_stochastic() {
                format!("{}_{kind}_{r}.json", source.name())
            } else {
                format!("{}_{kind}.json", source.name())
            };
            let file = out.join(name);
            fs::write(&file, inst.to_json())?;
            println!("{}", file.display());
        }
    }
    Ok(())
}

fn bench(config: &Path, out: &Path) -> Result<()> {
    let cfg = ExperimentConfig::load(config)?;
    fs::create_dir_all(out)?;
    let exp = run_experiment(&cfg, |rows| {
        for r in rows {
            if r.ok() {
                eprintln!(
                    "{} {} r{} seed {} {}: {:.1} ({:.1}s)",
                    r.instance, r.variant, r.replicate, r.seed, r.method, r.makespan, r.runtime
                );
            } else {
                eprintln!("{} {} {}: error {}", r.instance, r.variant, r.method, r.error);
            }
        }
    })?;
    write_rows(&exp.rows, fs::File::create(out.join("results.csv"))?)?;
    let summaries = summarize(&exp.rows);
    let hyp = hypothesis_table(&exp.rows);
    let text = format!(
        "{}\n{}",
        report::makespan_table(&summaries),
        report::hypothesis_table(&hyp)
    );
    fs::write(out.join("report.txt"), &text)?;
    fs::write(out.join("summary.json"), serde_json::to_string_pretty(&(summaries, hyp))?)?;
    print!("{text}");
    Ok(())
}

fn verify(instance: &Path, solution: &Path, seed: u64) -> Result<()> {
    let inst = load_instance(instance, seed)?;
    let text = fs::read_to_string(solution).with_context(|| format!("reading {}", solution.display()))?;
    let sol: Solution = serde_json::from_str::<SolutionFile>(&text)?.into_solution();
    let s = match evaluate(&inst, &sol) {
        Ok(s) => s,
        Err(e) => bail!("infeasible: {e}"),
    };
    let metrics = coordination_metrics(&inst, &sol, &s);
    println!("makespan {}", s.makespan);
    println!("cross_agent_pct {:.2}", metrics.cross_agent_pct);
    println!("interleaved_pct {:.2}", metrics.interleaved_pct);
    let precedence = inst
        .customers()
        .filter(|&c| s.t_pickup[c] - s.t_drop[c] < inst.p(c) - 1e-9)
        .count();
    let capacity = s.load.iter().flatten().filter(|&&q| q > inst.k()).count();
    println!("precedence violations {precedence}");
    println!("capacity violations {capacity}");
    for r in s.event_rows(&sol) {
        println!(
            "v{} #{} {} arrive {:.1} depart {:.1} load {}",
            r.vehicle, r.position, r.op, r.arrival, r.departure, r.load_after
        );
    }
    Ok(())
}
