//! Plain-text formats: topology dumps and run reports.

use std::fmt::Write;

use allreduce_core::topology::TreeTopology;
use allreduce_core::RunReport;

pub const TOPOLOGY_HEADER: &str = "# rank tree parent child_first child_second depth";

/// One line per rank, `-` for a missing link.
pub fn dump_topology(topo: &TreeTopology) -> String {
    let link = |r: Option<usize>| r.map_or_else(|| "-".to_string(), |r| r.to_string());
    let mut out = String::from(TOPOLOGY_HEADER);
    out.push('\n');
    for (rank, n) in topo.nodes().iter().enumerate() {
        writeln!(
            out,
            "{rank} {} {} {} {} {}",
            n.tree.as_char(),
            link(n.parent),
            link(n.child_first),
            link(n.child_second),
            n.depth
        )
        .unwrap();
    }
    out
}

fn join<T: ToString>(items: &[T], sep: &str) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(sep)
}

fn fields(r: &RunReport, list_sep: &str) -> Vec<(&'static str, String)> {
    vec![
        ("algorithm", r.algorithm.name().to_string()),
        ("procs", r.procs.to_string()),
        ("elements", r.elements.to_string()),
        ("block_size", r.block_size.to_string()),
        ("blocks", r.blocks.to_string()),
        ("steps", r.steps.to_string()),
        ("model_time", r.model_time.to_string()),
        ("gamma_cost", r.gamma_cost.to_string()),
        ("messages", r.messages.to_string()),
        ("exchanges", r.exchanges.to_string()),
        ("elements_sent", r.elements_sent.to_string()),
        ("elements_received", r.elements_received.to_string()),
        ("combines", r.combines.to_string()),
        ("rank_rounds", join(&r.rank_rounds, list_sep)),
        ("rank_finish_step", join(&r.rank_finish_step, list_sep)),
        ("rank_result_step", join(&r.rank_result_step, list_sep)),
    ]
}

/// `key=value` lines; per-rank lists are space separated.
pub fn report_kv(r: &RunReport) -> String {
    fields(r, " ")
        .into_iter()
        .map(|(k, v)| format!("{k}={v}\n"))
        .collect()
}

pub fn report_csv_header() -> String {
    let dummy = fields(&empty_report(), ";");
    join(&dummy.iter().map(|(k, _)| *k).collect::<Vec<_>>(), ",")
}

/// One CSV row in [`report_csv_header`] order; per-rank lists are `;` separated.
pub fn report_csv_row(r: &RunReport) -> String {
    join(
        &fields(r, ";")
            .into_iter()
            .map(|(_, v)| v)
            .collect::<Vec<_>>(),
        ",",
    )
}

fn empty_report() -> RunReport {
    RunReport {
        algorithm: allreduce_core::Algorithm::Doubly,
        procs: 0,
        elements: 0,
        block_size: 0,
        blocks: 0,
        steps: 0,
        model_time: 0.0,
        gamma_cost: 0.0,
        messages: 0,
        exchanges: 0,
        elements_sent: 0,
        elements_received: 0,
        combines: 0,
        rank_rounds: vec![],
        rank_finish_step: vec![],
        rank_result_step: vec![],
        rank_stats: vec![],
    }
}
