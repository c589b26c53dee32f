//! Experiment driver: count sweeps over the simulated algorithms, a
//! comparison table in CSV, and oracle verification.

use std::fmt::Write;

use allreduce_core::blocks::BlockPartition;
use allreduce_core::costmodel::{self, CostParams, TreeParam};
use allreduce_core::protocol::{run, Algorithm, RunOptions, RunOutcome, RunReport};
use allreduce_core::reducer::sequential_fold_oracle;
use allreduce_core::transport::MessageMeta;

use crate::error::{Result, SimError};
use crate::ops::{random_inputs, ExactOp, OpKind};
use crate::with_op;

/// How vectors are cut into pipeline blocks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Blocking {
    /// Fixed elements per block; the count follows from `m`.
    Size(usize),
    /// Fixed number of blocks (capped at `m`).
    Count(usize),
}

impl Blocking {
    pub fn block_size_for(self, elements: usize) -> usize {
        match self {
            Blocking::Size(bs) => bs,
            Blocking::Count(b) => elements.div_ceil(b).max(1),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub procs: usize,
    pub counts: Vec<usize>,
    pub blocking: Blocking,
    pub op: OpKind,
    pub algorithms: Vec<Algorithm>,
    pub params: CostParams,
    pub reps: usize,
    pub seed: u64,
    /// Corrupt the first non-empty message with this sequence number or later.
    pub corrupt_message: Option<u64>,
}

impl ExperimentConfig {
    pub fn new(procs: usize, counts: Vec<usize>, blocking: Blocking, op: OpKind) -> Self {
        Self {
            procs,
            counts,
            blocking,
            op,
            algorithms: Algorithm::ALL.to_vec(),
            params: CostParams::new(1.0, 1.0, 0.0).expect("valid"),
            reps: 1,
            seed: 1,
            corrupt_message: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(SimError::Config(msg.to_string()));
        if self.procs == 0 {
            return bad("--procs must be at least 1");
        }
        if self.reps == 0 {
            return bad("--reps must be at least 1");
        }
        if matches!(self.blocking, Blocking::Size(0) | Blocking::Count(0)) {
            return bad("block size / block count must be at least 1");
        }
        if self.algorithms.is_empty() {
            return bad("no algorithm selected");
        }
        if self.counts.windows(2).any(|w| w[0] > w[1]) {
            return bad("element counts must be ascending");
        }
        Ok(())
    }

    fn inputs_seed(&self, elements: usize) -> u64 {
        self.seed ^ (elements as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
    }
}

/// Counts following the benchmark tool's pattern: `0, 1`, then
/// `⌊2.5·10^k · f⌋` for `f ∈ {1, 3.5, 6, 8.5}`, restricted to `[lo, hi]`,
/// with `hi` always included.
pub fn sweep_counts(lo: usize, hi: usize) -> Vec<usize> {
    let mut out: Vec<usize> = [0, 1]
        .into_iter()
        .filter(|c| (lo..=hi).contains(c))
        .collect();
    let mut decade = 2.5f64;
    'outer: loop {
        for f in [1.0, 3.5, 6.0, 8.5] {
            let c = (decade * f) as usize;
            if c > hi {
                break 'outer;
            }
            if c >= lo && out.last() != Some(&c) {
                out.push(c);
            }
        }
        decade *= 10.0;
    }
    if hi >= lo && out.last() != Some(&hi) {
        out.push(hi);
    }
    out
}

/// Where a rank's result first departs from the oracle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankDiff {
    pub rank: usize,
    pub element: usize,
    pub block: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CaseResult {
    pub algorithm: Algorithm,
    pub elements: usize,
    pub block_size: usize,
    pub diffs: Vec<RankDiff>,
    /// Protocol error, if the run did not complete.
    pub error: Option<String>,
    pub report: Option<RunReport>,
}

impl CaseResult {
    pub fn passed(&self) -> bool {
        self.diffs.is_empty() && self.error.is_none()
    }
}

fn run_case<R: ExactOp>(
    op: &R,
    cfg: &ExperimentConfig,
    algorithm: Algorithm,
    elements: usize,
) -> CaseResult {
    let block_size = cfg.blocking.block_size_for(elements);
    let inputs = random_inputs::<R>(cfg.procs, elements, cfg.inputs_seed(elements));
    let want = sequential_fold_oracle(op, &inputs).expect("inputs are consistent");
    let mut best: Option<RunOutcome<R::Elem>> = None;
    let mut error = None;
    for _ in 0..cfg.reps {
        let mut corrupted = false;
        let mut corrupt = |meta: &MessageMeta, payload: &mut Vec<R::Elem>| {
            if let (Some(at), false, Some(first)) =
                (cfg.corrupt_message, corrupted, payload.first_mut())
            {
                if meta.seq >= at {
                    *first = R::perturb(*first);
                    corrupted = true;
                }
            }
        };
        let mut opts = RunOptions::new(cfg.params);
        if cfg.corrupt_message.is_some() {
            opts.tap = Some(&mut corrupt);
        }
        match run(algorithm, op, inputs.clone(), block_size, opts) {
            Ok(out) => {
                if best
                    .as_ref()
                    .is_none_or(|b| out.report.model_time < b.report.model_time)
                {
                    best = Some(out);
                }
            }
            Err(e) => {
                error = Some(e.to_string());
                break;
            }
        }
    }
    let part = BlockPartition::new(elements, block_size).expect("block size >= 1");
    let diffs = best
        .as_ref()
        .map(|out| {
            out.results
                .iter()
                .enumerate()
                .filter_map(|(rank, got)| {
                    let element = got.iter().zip(&want).position(|(a, b)| a != b)?;
                    let block = if algorithm == Algorithm::Naive {
                        0
                    } else {
                        part.block_of(element)
                    };
                    Some(RankDiff {
                        rank,
                        element,
                        block,
                    })
                })
                .collect()
        })
        .unwrap_or_default();
    CaseResult {
        algorithm,
        elements,
        block_size,
        diffs,
        error,
        report: best.map(|b| b.report),
    }
}

fn run_cases(cfg: &ExperimentConfig, elements: usize) -> Vec<CaseResult> {
    with_op!(cfg.op, op => cfg
        .algorithms
        .iter()
        .map(|&alg| run_case(&op, cfg, alg, elements))
        .collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub elements: usize,
    pub block_size: usize,
    pub blocks: usize,
    /// Indexed like [`Algorithm::ALL`]; `None` when not selected.
    pub cases: [Option<CaseResult>; 3],
    pub model_doubly: f64,
    pub model_reduce_bcast: f64,
    /// Stand-in for the vendor library column: best doubly pipelined time
    /// over real `b`. Synthetic, not simulated.
    pub native_synthetic: f64,
    pub dual_h: TreeParam,
}

impl SweepRow {
    pub fn case(&self, alg: Algorithm) -> Option<&CaseResult> {
        self.cases[alg as usize].as_ref()
    }

    pub fn ok(&self) -> bool {
        self.cases.iter().flatten().all(CaseResult::passed)
    }

    /// Simulated pipelined time over simulated doubly pipelined time.
    pub fn sim_ratio(&self) -> Option<f64> {
        let t = |a| self.case(a)?.report.as_ref().map(|r| r.model_time);
        let (p, d) = (t(Algorithm::Pipelined)?, t(Algorithm::Doubly)?);
        (d > 0.0).then(|| p / d)
    }

    pub fn model_ratio(&self) -> Option<f64> {
        (self.model_doubly > 0.0).then(|| self.model_reduce_bcast / self.model_doubly)
    }
}

pub const SWEEP_HEADER: &str = "count,blocks,block_size,doubly_steps,doubly_time,pipelined_steps,pipelined_time,naive_steps,naive_time,native_synthetic,model_doubly,model_reduce_bcast,sim_ratio,model_ratio,h,h_label,verify";

#[derive(Clone, Debug, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn ok(&self) -> bool {
        self.rows.iter().all(SweepRow::ok)
    }

    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map_or_else(String::new, |v| format!("{v:.6}"));
        let mut out = String::from(SWEEP_HEADER);
        out.push('\n');
        for row in &self.rows {
            write!(out, "{},{},{}", row.elements, row.blocks, row.block_size).unwrap();
            for alg in Algorithm::ALL {
                match row.case(alg).and_then(|c| c.report.as_ref()) {
                    Some(r) => write!(out, ",{},{:.6}", r.steps, r.model_time).unwrap(),
                    None => out.push_str(",,"),
                }
            }
            writeln!(
                out,
                ",{:.6},{:.6},{:.6},{},{},{},{},{}",
                row.native_synthetic,
                row.model_doubly,
                row.model_reduce_bcast,
                opt(row.sim_ratio()),
                opt(row.model_ratio()),
                row.dual_h.h,
                row.dual_h.label(),
                if row.ok() { "OK" } else { "FAIL" }
            )
            .unwrap();
        }
        out
    }

    /// Every run's report, one CSV row each.
    pub fn reports_csv(&self) -> String {
        let mut out = crate::format::report_csv_header();
        out.push('\n');
        for row in &self.rows {
            for case in row.cases.iter().flatten() {
                if let Some(r) = &case.report {
                    out.push_str(&crate::format::report_csv_row(r));
                    out.push('\n');
                }
            }
        }
        out
    }
}

/// Runs every selected algorithm for every count.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepTable> {
    cfg.validate()?;
    let dual_h = costmodel::dual_tree_param(cfg.procs)?;
    let single_h = costmodel::single_tree_param(cfg.procs)?;
    let mut rows = Vec::with_capacity(cfg.counts.len());
    for &m in &cfg.counts {
        let block_size = cfg.blocking.block_size_for(m);
        let blocks = BlockPartition::new(m, block_size)?.blocks();
        let mut cases: [Option<CaseResult>; 3] = Default::default();
        for case in run_cases(cfg, m) {
            let idx = case.algorithm as usize;
            cases[idx] = Some(case);
        }
        let (model_doubly, model_reduce_bcast, native_synthetic) = if m == 0 {
            (0.0, 0.0, 0.0)
        } else {
            let (b, m64) = (blocks as u64, m as u64);
            (
                costmodel::predict_doubly(dual_h.h, b, m64, &cfg.params)?,
                costmodel::predict_reduce_bcast(single_h.h, b, m64, &cfg.params)?,
                costmodel::doubly_closed_form(dual_h.h, m64, &cfg.params),
            )
        };
        rows.push(SweepRow {
            elements: m,
            block_size,
            blocks,
            cases,
            model_doubly,
            model_reduce_bcast,
            native_synthetic,
            dual_h,
        });
    }
    Ok(SweepTable { rows })
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifySummary {
    pub procs: usize,
    pub op: OpKind,
    pub cases: Vec<CaseResult>,
}

pub const VERIFY_HEADER: &str =
    "algorithm,procs,count,block_size,op,status,bad_ranks,first_bad_rank,first_bad_block";

impl VerifySummary {
    pub fn passed(&self) -> bool {
        self.cases.iter().all(CaseResult::passed)
    }

    /// Human-readable: one PASS/FAIL line per case, then per-rank diffs.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.cases {
            let status = if c.passed() { "PASS" } else { "FAIL" };
            writeln!(
                out,
                "{status} alg={} p={} m={} B={} op={}",
                c.algorithm.name(),
                self.procs,
                c.elements,
                c.block_size,
                self.op
            )
            .unwrap();
            if let Some(e) = &c.error {
                writeln!(out, "  error: {e}").unwrap();
            }
            for d in &c.diffs {
                writeln!(
                    out,
                    "  rank {} differs at element {} (block {})",
                    d.rank, d.element, d.block
                )
                .unwrap();
            }
        }
        writeln!(out, "{}", if self.passed() { "PASS" } else { "FAIL" }).unwrap();
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(VERIFY_HEADER);
        out.push('\n');
        for c in &self.cases {
            let first = c.diffs.first();
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                c.algorithm.name(),
                self.procs,
                c.elements,
                c.block_size,
                self.op,
                if c.passed() { "PASS" } else { "FAIL" },
                c.diffs.len(),
                first.map_or_else(String::new, |d| d.rank.to_string()),
                first.map_or_else(String::new, |d| d.block.to_string()),
            )
            .unwrap();
        }
        out
    }
}

/// Oracle comparison for every configured count and algorithm.
pub fn verify(cfg: &ExperimentConfig) -> Result<VerifySummary> {
    cfg.validate()?;
    let cases = cfg.counts.iter().flat_map(|&m| run_cases(cfg, m)).collect();
    Ok(VerifySummary {
        procs: cfg.procs,
        op: cfg.op,
        cases,
    })
}
