//! One OS thread per rank, exchanging over channels.
//!
//! Sends never block (channels are unbounded), receives do; every rank
//! posts its send before waiting on its receive, so any schedule the
//! lock-step simulator completes also completes here. Results must match
//! the simulator exactly; step accounting is only defined by the simulator.

use std::collections::HashMap;
use std::sync::mpsc::{channel, Receiver, Sender};
use std::thread;

use allreduce_core::blocks::BlockPartition;
use allreduce_core::protocol::{Algorithm, DoublyPipelined, DualOrientation, ReduceBcast};
use allreduce_core::reducer::Reducer;
use allreduce_core::topology::{Rank, TreeTopology};
use allreduce_core::transport::{drive, Endpoint, Intent, RankProgram};
use allreduce_core::Error;

use crate::error::{Result, SimError};

pub struct ChannelEndpoint<T> {
    rank: Rank,
    outbox: HashMap<Rank, Sender<Vec<T>>>,
    inbox: HashMap<Rank, Receiver<Vec<T>>>,
}

impl<T: Copy> Endpoint<T> for ChannelEndpoint<T> {
    fn exchange(&mut self, intent: &Intent, payload: &[T]) -> allreduce_core::Result<Vec<T>> {
        let rank = self.rank;
        if let Some(to) = intent.send_to {
            let tx = self
                .outbox
                .get(&to)
                .ok_or(Error::PeerMismatch { rank, peer: to })?;
            tx.send(payload.to_vec())
                .map_err(|_| Error::Disconnected { rank, peer: to })?;
        }
        match intent.recv_from {
            Some(from) => {
                let rx = self
                    .inbox
                    .get(&from)
                    .ok_or(Error::PeerMismatch { rank, peer: from })?;
                rx.recv()
                    .map_err(|_| Error::Disconnected { rank, peer: from })
            }
            None => Ok(Vec::new()),
        }
    }
}

/// Endpoints for every rank with a channel in each direction of every
/// tree edge and of the dual-root link.
pub fn endpoints<T>(topo: &TreeTopology) -> Vec<ChannelEndpoint<T>> {
    let mut eps: Vec<ChannelEndpoint<T>> = (0..topo.procs())
        .map(|rank| ChannelEndpoint {
            rank,
            outbox: HashMap::new(),
            inbox: HashMap::new(),
        })
        .collect();
    let mut link = |a: Rank, b: Rank| {
        let (tx, rx) = channel();
        eps[a].outbox.insert(b, tx);
        eps[b].inbox.insert(a, rx);
    };
    for (rank, n) in topo.nodes().iter().enumerate() {
        if let Some(parent) = n.parent {
            link(rank, parent);
            link(parent, rank);
        }
    }
    if let (a, Some(b)) = (topo.root_a(), topo.root_b()) {
        link(a, b);
        link(b, a);
    }
    eps
}

fn run_programs<P>(programs: Vec<P>, endpoints: Vec<ChannelEndpoint<P::Elem>>) -> Result<Vec<P>>
where
    P: RankProgram + Send,
    P::Elem: Send,
{
    thread::scope(|s| {
        let handles: Vec<_> = programs
            .into_iter()
            .zip(endpoints)
            .map(|(mut prog, mut ep)| {
                s.spawn(move || -> allreduce_core::Result<P> {
                    drive(&mut prog, &mut ep)?;
                    Ok(prog)
                })
            })
            .collect();
        // join all before reporting, so a failure cannot leave threads behind
        let joined: Vec<_> = handles.into_iter().map(|h| h.join()).collect();
        joined
            .into_iter()
            .map(|r| r.map_err(|_| SimError::Panicked)?.map_err(SimError::from))
            .collect()
    })
}

/// Runs `algorithm` with one thread per rank and returns every rank's result.
pub fn run_threaded<R>(
    algorithm: Algorithm,
    op: &R,
    inputs: Vec<Vec<R::Elem>>,
    block_size: usize,
) -> Result<Vec<Vec<R::Elem>>>
where
    R: Reducer + Sync,
    R::Elem: Send + Sync,
{
    let procs = inputs.len();
    let m = inputs.first().map_or(0, Vec::len);
    match algorithm {
        Algorithm::Doubly => {
            let topo = TreeTopology::build_dual_trees(procs)?;
            let part = BlockPartition::new(m, block_size)?;
            let programs = inputs
                .into_iter()
                .enumerate()
                .map(|(r, x)| DoublyPipelined::new(&topo, part, op, r, x, DualOrientation::Ordered))
                .collect::<allreduce_core::Result<Vec<_>>>()?;
            let done = run_programs(programs, endpoints(&topo))?;
            Ok(done.into_iter().map(DoublyPipelined::into_result).collect())
        }
        Algorithm::Pipelined | Algorithm::Naive => {
            let topo = TreeTopology::build_single_tree(procs)?;
            let part = if algorithm == Algorithm::Naive {
                BlockPartition::unpipelined(m)
            } else {
                BlockPartition::new(m, block_size)?
            };
            let programs = inputs
                .into_iter()
                .enumerate()
                .map(|(r, x)| ReduceBcast::new(&topo, part, op, r, x))
                .collect::<allreduce_core::Result<Vec<_>>>()?;
            let done = run_programs(programs, endpoints(&topo))?;
            Ok(done.into_iter().map(ReduceBcast::into_result).collect())
        }
    }
}
