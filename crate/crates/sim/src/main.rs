use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use allreduce_core::costmodel::{self, CostParams, TreeParam};
use allreduce_core::protocol::Algorithm;
use allreduce_core::topology::TreeTopology;
use allreduce_sim::bench::{self, Blocking, ExperimentConfig};
use allreduce_sim::format;
use allreduce_sim::ops::OpKind;
use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

/// Simulated pipelined allreduce over dual binary trees.
#[derive(Parser, Debug)]
#[command(name = "allreduce-sim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compare every rank's result against a sequential fold.
    Verify(VerifyArgs),
    /// Sweep element counts and tabulate simulated and modelled times.
    Run(RunArgs),
    /// Print optimal block counts and predicted times.
    Model(ModelArgs),
    /// Print the tree layout.
    DumpTopology(TopologyArgs),
}

#[derive(Args, Debug)]
struct Workload {
    /// Number of ranks.
    #[arg(long)]
    procs: usize,
    /// Elements per vector.
    #[arg(long, conflicts_with = "sweep")]
    elements: Option<usize>,
    /// Sweep element counts in `lo:hi`.
    #[arg(long, value_parser = parse_range)]
    sweep: Option<(usize, usize)>,
    /// Elements per block (default 16000).
    #[arg(long, conflicts_with = "blocks")]
    block_size: Option<usize>,
    /// Number of blocks, instead of a block size.
    #[arg(long)]
    blocks: Option<usize>,
    /// Algorithms, comma separated.
    #[arg(long, value_delimiter = ',', value_parser = parse_alg, default_value = "doubly,pipelined,naive")]
    alg: Vec<Algorithm>,
    /// Reduction operator: sum, max, affine or mat2.
    #[arg(long, default_value = "sum")]
    op: OpKind,
    /// Seed for the input vectors.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Write the result table to this file instead of stdout.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Also print the tree layout to stderr.
    #[arg(long)]
    dump_topology: bool,
}

#[derive(Args, Debug)]
struct CostArgs {
    /// Per-message latency.
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Per-element transfer time.
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    /// Per-element reduction time.
    #[arg(long, default_value_t = 0.0)]
    gamma: f64,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    work: Workload,
    /// Corrupt the first non-empty message with this sequence number or later.
    #[arg(long)]
    corrupt: Option<u64>,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[command(flatten)]
    work: Workload,
    #[command(flatten)]
    cost: CostArgs,
    /// Repetitions per configuration; the fastest is kept.
    #[arg(long, default_value_t = 1)]
    reps: usize,
    /// Write every run's full report as CSV to this file.
    #[arg(long)]
    reports: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ModelArgs {
    /// Number of ranks; determines h.
    #[arg(long, conflicts_with = "h", required_unless_present = "h")]
    procs: Option<usize>,
    /// Tree parameter directly.
    #[arg(long)]
    h: Option<u32>,
    /// Elements per vector.
    #[arg(long, conflicts_with = "sweep", required_unless_present = "sweep")]
    elements: Option<usize>,
    /// Sweep element counts in `lo:hi`.
    #[arg(long, value_parser = parse_range)]
    sweep: Option<(usize, usize)>,
    #[command(flatten)]
    cost: CostArgs,
    /// Write the table to this file instead of stdout.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TopologyArgs {
    /// Number of ranks.
    #[arg(long)]
    procs: usize,
    /// Single tree over all ranks instead of the dual pair.
    #[arg(long)]
    single: bool,
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let (lo, hi) = s.split_once(':').ok_or("expected lo:hi")?;
    let lo = lo.trim().parse::<usize>().map_err(|e| e.to_string())?;
    let hi = hi.trim().parse::<usize>().map_err(|e| e.to_string())?;
    if lo > hi {
        return Err("lo must not exceed hi".into());
    }
    Ok((lo, hi))
}

fn parse_alg(s: &str) -> Result<Algorithm, String> {
    Algorithm::from_name(s.trim()).ok_or_else(|| format!("unknown algorithm `{s}`"))
}

fn counts(elements: Option<usize>, sweep: Option<(usize, usize)>) -> anyhow::Result<Vec<usize>> {
    match (elements, sweep) {
        (Some(m), _) => Ok(vec![m]),
        (None, Some((lo, hi))) => Ok(bench::sweep_counts(lo, hi)),
        (None, None) => bail!("one of --elements or --sweep is required"),
    }
}

fn cost(c: &CostArgs) -> anyhow::Result<CostParams> {
    Ok(CostParams::new(c.alpha, c.beta, c.gamma)?)
}

fn config(w: &Workload) -> anyhow::Result<ExperimentConfig> {
    let blocking = match (w.block_size, w.blocks) {
        (_, Some(b)) => Blocking::Count(b),
        (Some(bs), None) => Blocking::Size(bs),
        (None, None) => Blocking::Size(16000),
    };
    let mut cfg = ExperimentConfig::new(w.procs, counts(w.elements, w.sweep)?, blocking, w.op);
    cfg.algorithms = w.alg.clone();
    cfg.seed = w.seed;
    if w.dump_topology {
        eprint!(
            "{}",
            format::dump_topology(&TreeTopology::build_dual_trees(w.procs)?)
        );
    }
    Ok(cfg)
}

fn emit(path: Option<&PathBuf>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn verify(args: VerifyArgs) -> anyhow::Result<bool> {
    let mut cfg = config(&args.work)?;
    cfg.corrupt_message = args.corrupt;
    let summary = bench::verify(&cfg)?;
    print!("{}", summary.to_text());
    if let Some(p) = &args.work.csv {
        emit(Some(p), &summary.to_csv())?;
    }
    Ok(summary.passed())
}

fn run(args: RunArgs) -> anyhow::Result<bool> {
    let mut cfg = config(&args.work)?;
    cfg.params = cost(&args.cost)?;
    cfg.reps = args.reps;
    let table = bench::run_sweep(&cfg)?;
    emit(args.work.csv.as_ref(), &table.to_csv())?;
    if let Some(p) = &args.reports {
        emit(Some(p), &table.reports_csv())?;
    }
    Ok(table.ok())
}

fn model(args: ModelArgs) -> anyhow::Result<bool> {
    let c = cost(&args.cost)?;
    let (dual, single) = match (args.procs, args.h) {
        (Some(p), _) => (
            costmodel::dual_tree_param(p)?,
            costmodel::single_tree_param(p)?,
        ),
        (None, Some(h)) => {
            let t = TreeParam { h, exact: true };
            (t, t)
        }
        (None, None) => bail!("one of --procs or --h is required"),
    };
    let mut out = String::from(
        "h,h_label,count,blocks_doubly,time_doubly,closed_form_doubly,blocks_reduce_bcast,time_reduce_bcast,closed_form_reduce_bcast,ratio\n",
    );
    for m in counts(args.elements, args.sweep)?
        .into_iter()
        .filter(|&m| m > 0)
    {
        let d = costmodel::optimal_blocks(dual.h, m as u64, &c)?;
        let r = costmodel::optimal_blocks_reduce_bcast(single.h, m as u64, &c)?;
        out.push_str(&format!(
            "{},{},{m},{},{:.6},{:.6},{},{:.6},{:.6},{:.6}\n",
            dual.h,
            dual.label(),
            d.blocks,
            d.time,
            d.closed_form,
            r.blocks,
            r.time,
            r.closed_form,
            r.time / d.time
        ));
    }
    emit(args.csv.as_ref(), &out)?;
    Ok(true)
}

fn dump(args: TopologyArgs) -> anyhow::Result<bool> {
    let topo = if args.single {
        TreeTopology::build_single_tree(args.procs)?
    } else {
        TreeTopology::build_dual_trees(args.procs)?
    };
    print!("{}", format::dump_topology(&topo));
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Verify(a) => verify(a),
        Command::Run(a) => run(a),
        Command::Model(a) => model(a),
        Command::DumpTopology(a) => dump(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
