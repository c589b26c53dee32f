//! Bidirectional exchange contract and the deterministic lock-step simulator.
//!
//! A rank program exposes one pending [`Intent`] at a time: an optional send
//! to one peer together with an optional receive from one peer (the same peer
//! for a telephone-style exchange). The simulator advances a global step
//! counter; in each step it fires the largest set of pending intents whose
//! partners are all pending on the matching side, so exchanges pair up in
//! per-channel FIFO order without assuming any global slot alignment.
//!
//! Model time is accounted per rank: a fired group starts when its latest
//! member is free and lasts `alpha + beta * max(sent, received)` of its most
//! expensive member. The report's model time is the latest rank's clock.

use alloc::vec;
use alloc::vec::Vec;

use crate::costmodel::CostParams;
use crate::error::{Error, Result};
use crate::topology::Rank;

/// One pending communication operation of a rank.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Intent {
    pub send_to: Option<Rank>,
    pub recv_from: Option<Rank>,
    /// Upper bound on the incoming element count.
    pub recv_capacity: usize,
}

/// Per-rank counters kept by the protocol state machines.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RankStats {
    /// Operations that went through the transport.
    pub exchanges: u64,
    /// Exchanges with a non-existing peer; they move nothing and cost nothing.
    pub void_exchanges: u64,
    pub elements_sent: u64,
    pub elements_received: u64,
    /// Element-wise `⊙` applications.
    pub combines: u64,
    /// Rounds with at least one (possibly void) exchange.
    pub rounds: usize,
    pub max_exchanges_per_round: usize,
    /// Block-level `⊙` applications in the busiest round.
    pub max_reductions_per_round: usize,
}

/// A rank's side of a collective, driven one [`Intent`] at a time.
pub trait RankProgram {
    type Elem: Copy;

    fn rank(&self) -> Rank;

    /// The next operation, or `None` once the rank is done.
    fn pending(&self) -> Option<Intent>;

    /// Payload of the pending send (empty when the intent has no send).
    fn outgoing(&self) -> &[Self::Elem];

    /// Finishes the pending operation. `received` is empty when the intent
    /// has no receive; its length is the actual element count.
    fn complete(&mut self, received: &[Self::Elem]) -> Result<()>;

    /// True once the rank holds the complete result.
    fn has_result(&self) -> bool;

    fn result(&self) -> &[Self::Elem];

    fn stats(&self) -> &RankStats;
}

/// Metadata of one message as it passes through the simulator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MessageMeta {
    pub step: u64,
    /// Global delivery order, starting at 0.
    pub seq: u64,
    pub from: Rank,
    pub to: Rank,
}

/// Sees (and may alter) every payload in flight. Used for tracing and fault
/// injection.
pub trait Tap<T> {
    fn on_message(&mut self, meta: &MessageMeta, payload: &mut Vec<T>);
}

pub struct NoTap;

impl<T> Tap<T> for NoTap {
    fn on_message(&mut self, _: &MessageMeta, _: &mut Vec<T>) {}
}

impl<T, F: FnMut(&MessageMeta, &mut Vec<T>)> Tap<T> for F {
    fn on_message(&mut self, meta: &MessageMeta, payload: &mut Vec<T>) {
        self(meta, payload)
    }
}

/// Something that can carry out one intent for a single rank, e.g. a
/// channel-backed endpoint in a threaded runtime.
pub trait Endpoint<T> {
    /// Sends `payload` to `intent.send_to` (if any) and receives from
    /// `intent.recv_from` (if any) as one full-duplex operation.
    fn exchange(&mut self, intent: &Intent, payload: &[T]) -> Result<Vec<T>>;
}

/// Runs one program to completion over an endpoint.
pub fn drive<P: RankProgram, E: Endpoint<P::Elem>>(
    program: &mut P,
    endpoint: &mut E,
) -> Result<()> {
    while let Some(intent) = program.pending() {
        let received = endpoint.exchange(&intent, program.outgoing())?;
        if received.len() > intent.recv_capacity {
            return Err(Error::CapacityOverflow {
                from: intent.recv_from.unwrap_or(program.rank()),
                to: program.rank(),
                capacity: intent.recv_capacity,
                received: received.len(),
            });
        }
        program.complete(&received)?;
    }
    Ok(())
}

/// Step and cost accounting of one simulated run.
#[derive(Clone, Debug, PartialEq)]
pub struct Trace {
    /// Global steps in which at least one exchange fired; equals the step at
    /// which the last rank finished.
    pub steps: u64,
    pub messages: u64,
    /// Per rank: step of its last operation (0 if it never communicated).
    pub finish_step: Vec<u64>,
    /// Per rank: step after which it held the full result.
    pub result_step: Vec<u64>,
    /// Per rank: model clock after its last operation.
    pub finish_time: Vec<f64>,
}

impl Trace {
    /// Critical-path model time: the clock of the latest rank.
    pub fn model_time(&self) -> f64 {
        self.finish_time.iter().copied().fold(0.0, f64::max)
    }
}

/// Deterministic single-threaded lock-step transport.
pub struct Simulator<'t, T> {
    params: CostParams,
    tap: Option<&'t mut dyn Tap<T>>,
}

impl<'t, T: Copy> Simulator<'t, T> {
    pub fn new(params: CostParams) -> Self {
        Self { params, tap: None }
    }

    pub fn with_tap(params: CostParams, tap: &'t mut dyn Tap<T>) -> Self {
        Self {
            params,
            tap: Some(tap),
        }
    }

    pub fn run<P: RankProgram<Elem = T>>(&mut self, programs: &mut [P]) -> Result<Trace> {
        let p = programs.len();
        for (i, prog) in programs.iter().enumerate() {
            if prog.rank() != i {
                return Err(Error::InconsistentWorld(
                    "program order does not match ranks",
                ));
            }
        }
        let mut clock = vec![0.0f64; p];
        let mut finish_step = vec![0u64; p];
        let mut result_step: Vec<Option<u64>> = programs
            .iter()
            .map(|prog| prog.has_result().then_some(0))
            .collect();
        let mut step = 0u64;
        let mut seq = 0u64;
        let mut inbox: Vec<Vec<T>> = (0..p).map(|_| Vec::new()).collect();
        let mut out_len = vec![0usize; p];
        let mut group = vec![0usize; p];

        loop {
            let intents: Vec<Option<Intent>> = programs.iter().map(|prog| prog.pending()).collect();
            if intents.iter().all(Option::is_none) {
                break;
            }
            for (r, intent) in intents.iter().enumerate() {
                if let Some(i) = intent {
                    for peer in [i.send_to, i.recv_from].into_iter().flatten() {
                        if peer >= p || peer == r {
                            return Err(Error::PeerMismatch { rank: r, peer });
                        }
                    }
                }
            }
            let fired = matching_set(&intents);
            if !fired.iter().any(|&f| f) {
                let pending = intents
                    .iter()
                    .enumerate()
                    .filter_map(|(r, i)| i.map(|i| (r, i.send_to, i.recv_from)))
                    .collect();
                return Err(Error::Deadlock { step, pending });
            }
            step += 1;

            for r in (0..p).filter(|&r| fired[r]) {
                let intent = intents[r].expect("fired rank has an intent");
                out_len[r] = 0;
                if let Some(to) = intent.send_to {
                    let mut payload = programs[r].outgoing().to_vec();
                    if let Some(tap) = self.tap.as_mut() {
                        let meta = MessageMeta {
                            step,
                            seq,
                            from: r,
                            to,
                        };
                        tap.on_message(&meta, &mut payload);
                    }
                    seq += 1;
                    let capacity = intents[to].map_or(0, |i| i.recv_capacity);
                    if payload.len() > capacity {
                        return Err(Error::CapacityOverflow {
                            from: r,
                            to,
                            capacity,
                            received: payload.len(),
                        });
                    }
                    out_len[r] = payload.len();
                    inbox[to] = payload;
                }
            }

            // Fired ranks linked by a message form one group; a group starts
            // when its latest member is free and ends together.
            for (r, g) in group.iter_mut().enumerate() {
                *g = r;
            }
            for r in (0..p).filter(|&r| fired[r]) {
                if let Some(to) = intents[r].and_then(|i| i.send_to) {
                    let (a, b) = (find(&mut group, r), find(&mut group, to));
                    group[a.max(b)] = a.min(b);
                }
            }
            let mut start = vec![f64::NEG_INFINITY; p];
            let mut span = vec![0.0f64; p];
            for r in (0..p).filter(|&r| fired[r]) {
                let g = find(&mut group, r);
                let n = out_len[r].max(inbox[r].len());
                start[g] = start[g].max(clock[r]);
                span[g] = span[g].max(self.params.slot_cost(n as f64));
            }

            for r in (0..p).filter(|&r| fired[r]) {
                let g = find(&mut group, r);
                clock[r] = start[g] + span[g];
                finish_step[r] = step;
                let received = core::mem::take(&mut inbox[r]);
                programs[r].complete(&received)?;
                if result_step[r].is_none() && programs[r].has_result() {
                    result_step[r] = Some(step);
                }
            }
        }

        Ok(Trace {
            steps: step,
            messages: seq,
            finish_step,
            result_step: result_step.into_iter().map(|s| s.unwrap_or(step)).collect(),
            finish_time: clock,
        })
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Greatest set of pending intents whose every partner is pending on the
/// matching side and itself in the set.
fn matching_set(intents: &[Option<Intent>]) -> Vec<bool> {
    let mut fire: Vec<bool> = intents.iter().map(Option::is_some).collect();
    loop {
        let mut changed = false;
        for r in 0..intents.len() {
            if !fire[r] {
                continue;
            }
            let i = intents[r].expect("pending");
            let send_ok = i
                .send_to
                .is_none_or(|s| fire[s] && intents[s].is_some_and(|o| o.recv_from == Some(r)));
            let recv_ok = i
                .recv_from
                .is_none_or(|q| fire[q] && intents[q].is_some_and(|o| o.send_to == Some(r)));
            if !(send_ok && recv_ok) {
                fire[r] = false;
                changed = true;
            }
        }
        if !changed {
            return fire;
        }
    }
}
