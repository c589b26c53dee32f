//! Per-rank state machines for the three allreduce algorithms.
//!
//! * [`DoublyPipelined`]: two post-order trees, each round exchanges with the
//!   first child, the second child, then the parent (or the dual root). The
//!   upward stream of partial results and the downward stream of final
//!   results run concurrently, offset by the rank's depth.
//! * [`ReduceBcast`]: a pipelined reduce to the root of one post-order tree
//!   followed by a pipelined broadcast, both with the same block partition.
//!   With a single block this is the unpipelined reduce-then-broadcast.

use alloc::vec::Vec;

use crate::blocks::BlockPartition;
use crate::costmodel::CostParams;
use crate::error::{Error, Result};
use crate::reducer::{reduce_block_into, Orientation, Reducer};
use crate::topology::{Node, Rank, TreeTopology};
use crate::transport::{Intent, RankProgram, RankStats, Simulator, Tap, Trace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    /// Dual-root, doubly pipelined.
    Doubly,
    /// Pipelined single-tree reduce followed by pipelined broadcast.
    Pipelined,
    /// Single-tree reduce followed by broadcast, one block.
    Naive,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Doubly, Algorithm::Pipelined, Algorithm::Naive];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Doubly => "doubly",
            Algorithm::Pipelined => "pipelined",
            Algorithm::Naive => "naive",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.name() == name)
    }
}

/// How the two roots combine the block received from each other.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DualOrientation {
    /// Lower-numbered root computes `Y ⊙ t`, the higher one `t ⊙ Y`; both end
    /// up with (tree A product) ⊙ (tree B product).
    #[default]
    Ordered,
    /// Both orientations flipped. Wrong for non-commutative operators; exists
    /// so tests can prove they would notice.
    Swapped,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Peer {
    Rank(Rank),
    /// A missing child: the exchange moves zero elements and costs nothing.
    Void,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    FirstChild,
    SecondChild,
    /// Parent, or the dual root for a tree root.
    Upward,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RecvTarget {
    /// Into the temporary buffer, to be combined into `Y[block]`.
    Temp {
        block: isize,
        orientation: Orientation,
    },
    /// Straight into `Y[block]`.
    Result { block: isize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SlotPlan {
    pub slot: Slot,
    pub peer: Peer,
    pub send_block: isize,
    pub recv: RecvTarget,
}

/// Up to three exchanges of one round, in execution order.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RoundScript {
    pub round: usize,
    slots: [Option<SlotPlan>; 3],
}

impl RoundScript {
    pub fn slots(&self) -> impl Iterator<Item = &SlotPlan> {
        self.slots.iter().flatten()
    }

    pub fn len(&self) -> usize {
        self.slots().count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn get(&self, idx: usize) -> Option<&SlotPlan> {
        self.slots().nth(idx)
    }
}

/// The exchanges rank `rank` performs in round `round` of the doubly
/// pipelined algorithm.
///
/// Children get `Y[j - d - 1]` and return their partial `Y[j]`; the parent
/// gets this rank's partial `Y[j]` and returns final block `Y[j - d]`. The
/// upward exchange is dropped once the last final block has arrived
/// (`j > b - 1 + d`); the child exchanges continue through `j = b + d` so the
/// last final block reaches the children.
pub fn plan_round(
    topo: &TreeTopology,
    part: &BlockPartition,
    rank: Rank,
    round: usize,
    dual_orientation: DualOrientation,
) -> Result<RoundScript> {
    let node = *topo.node(rank)?;
    let b = part.blocks();
    let last = b + node.depth;
    if round > last {
        return Err(Error::RoundOutOfRange { rank, round, last });
    }
    let j = round as isize;
    let d = node.depth as isize;
    let mut slots = [None; 3];

    if let Some(first) = node.child_first {
        let down = j - d - 1;
        let from_child = RecvTarget::Temp {
            block: j,
            orientation: Orientation::Left,
        };
        slots[0] = Some(SlotPlan {
            slot: Slot::FirstChild,
            peer: Peer::Rank(first),
            send_block: down,
            recv: from_child,
        });
        slots[1] = Some(SlotPlan {
            slot: Slot::SecondChild,
            peer: node.child_second.map_or(Peer::Void, Peer::Rank),
            send_block: down,
            recv: from_child,
        });
    }

    if b > 0 && j < b as isize + d {
        slots[2] = Some(match node.parent {
            Some(parent) => SlotPlan {
                slot: Slot::Upward,
                peer: Peer::Rank(parent),
                send_block: j,
                recv: RecvTarget::Result { block: j - d },
            },
            None => {
                let dual = topo.dual_of(rank);
                let lower = dual.is_some_and(|other| rank < other);
                let orientation = match (lower, dual_orientation) {
                    (true, DualOrientation::Ordered) | (false, DualOrientation::Swapped) => {
                        Orientation::Right
                    }
                    _ => Orientation::Left,
                };
                SlotPlan {
                    slot: Slot::Upward,
                    peer: dual.map_or(Peer::Void, Peer::Rank),
                    send_block: j,
                    recv: RecvTarget::Temp {
                        block: j,
                        orientation,
                    },
                }
            }
        });
    }
    Ok(RoundScript { round, slots })
}

/// Bookkeeping shared by both state machines.
struct Local<'a, R: Reducer> {
    rank: Rank,
    part: BlockPartition,
    op: &'a R,
    y: Vec<R::Elem>,
    stats: RankStats,
    round_exchanges: usize,
    round_reductions: usize,
}

impl<'a, R: Reducer> Local<'a, R> {
    fn new(rank: Rank, part: BlockPartition, op: &'a R, input: Vec<R::Elem>) -> Result<Self> {
        if input.len() != part.elements() {
            return Err(Error::InconsistentWorld(
                "input length differs from partition",
            ));
        }
        Ok(Self {
            rank,
            part,
            op,
            y: input,
            stats: RankStats::default(),
            round_exchanges: 0,
            round_reductions: 0,
        })
    }

    fn block(&self, j: isize) -> &[R::Elem] {
        &self.y[self.part.range(j)]
    }

    fn check_len(&self, block: isize, received: usize) -> Result<()> {
        let expected = self.part.len_of(block);
        if expected != received {
            return Err(Error::LengthMismatch {
                rank: self.rank,
                block,
                expected,
                received,
            });
        }
        Ok(())
    }

    fn accept(&mut self, target: RecvTarget, received: &[R::Elem]) -> Result<()> {
        match target {
            RecvTarget::Temp { block, orientation } => {
                self.check_len(block, received.len())?;
                let range = self.part.range(block);
                let n = reduce_block_into(self.op, received, &mut self.y[range], orientation)?;
                self.stats.combines += n as u64;
                self.round_reductions += 1;
            }
            RecvTarget::Result { block } => {
                self.check_len(block, received.len())?;
                let range = self.part.range(block);
                self.y[range].copy_from_slice(received);
            }
        }
        Ok(())
    }

    fn count_exchange(&mut self, sent: usize, received: usize) {
        self.stats.exchanges += 1;
        self.stats.elements_sent += sent as u64;
        self.stats.elements_received += received as u64;
        self.round_exchanges += 1;
    }

    fn close_round(&mut self) {
        let s = &mut self.stats;
        s.max_exchanges_per_round = s.max_exchanges_per_round.max(self.round_exchanges);
        s.max_reductions_per_round = s.max_reductions_per_round.max(self.round_reductions);
        self.round_exchanges = 0;
        self.round_reductions = 0;
    }
}

/// One rank of the dual-root, doubly pipelined allreduce.
pub struct DoublyPipelined<'a, R: Reducer> {
    local: Local<'a, R>,
    topo: &'a TreeTopology,
    node: Node,
    dual_orientation: DualOrientation,
    script: RoundScript,
    slot: usize,
    finished: bool,
    has_result: bool,
}

impl<'a, R: Reducer> DoublyPipelined<'a, R> {
    pub fn new(
        topo: &'a TreeTopology,
        part: BlockPartition,
        op: &'a R,
        rank: Rank,
        input: Vec<R::Elem>,
        dual_orientation: DualOrientation,
    ) -> Result<Self> {
        let node = *topo.node(rank)?;
        let local = Local::new(rank, part, op, input)?;
        let b = part.blocks();
        let alone = node.is_root() && topo.dual_of(rank).is_none();
        let mut state = Self {
            local,
            topo,
            node,
            dual_orientation,
            script: RoundScript::default(),
            slot: 0,
            finished: b == 0,
            has_result: b == 0 || alone,
        };
        if !state.finished {
            state.enter_round(0)?;
            state.settle();
        }
        Ok(state)
    }

    pub fn round(&self) -> usize {
        self.script.round
    }

    pub fn depth(&self) -> usize {
        self.node.depth
    }

    /// True once the rank holds every block of the result.
    pub fn is_terminated(&self) -> bool {
        self.has_result
    }

    /// True once nothing is left to send either.
    pub fn is_finished(&self) -> bool {
        self.finished
    }

    pub fn into_result(self) -> Vec<R::Elem> {
        self.local.y
    }

    fn enter_round(&mut self, round: usize) -> Result<()> {
        self.script = plan_round(
            self.topo,
            &self.local.part,
            self.local.rank,
            round,
            self.dual_orientation,
        )?;
        self.slot = 0;
        if !self.script.is_empty() {
            self.local.stats.rounds += 1;
        }
        Ok(())
    }

    fn current(&self) -> Option<&SlotPlan> {
        if self.finished {
            None
        } else {
            self.script.get(self.slot)
        }
    }

    /// Skips void exchanges and exhausted rounds until a real exchange is
    /// pending or the loop bound is passed.
    fn settle(&mut self) {
        loop {
            match self.current().copied() {
                Some(plan) if plan.peer == Peer::Void => {
                    self.local.stats.void_exchanges += 1;
                    self.slot += 1;
                }
                Some(_) => return,
                None if self.finished => return,
                None => {
                    self.local.close_round();
                    let next = self.script.round + 1;
                    if next > self.local.part.blocks() + self.node.depth {
                        self.finished = true;
                        return;
                    }
                    self.enter_round(next)
                        .expect("next round is within the loop bound");
                }
            }
        }
    }
}

impl<R: Reducer> RankProgram for DoublyPipelined<'_, R> {
    type Elem = R::Elem;

    fn rank(&self) -> Rank {
        self.local.rank
    }

    fn pending(&self) -> Option<Intent> {
        let plan = self.current()?;
        let Peer::Rank(peer) = plan.peer else {
            return None;
        };
        Some(Intent {
            send_to: Some(peer),
            recv_from: Some(peer),
            recv_capacity: self.local.part.block_size(),
        })
    }

    fn outgoing(&self) -> &[R::Elem] {
        match self.current() {
            Some(plan) => self.local.block(plan.send_block),
            None => &[],
        }
    }

    fn complete(&mut self, received: &[R::Elem]) -> Result<()> {
        let plan = *self
            .current()
            .ok_or(Error::InvalidArgument("no pending exchange"))?;
        let sent = self.local.part.len_of(plan.send_block);
        self.local.count_exchange(sent, received.len());
        self.local.accept(plan.recv, received)?;
        if plan.slot == Slot::Upward {
            let b = self.local.part.blocks();
            if self.script.round + 1 == b + self.node.depth {
                self.has_result = true;
            }
        }
        self.slot += 1;
        self.settle();
        Ok(())
    }

    fn has_result(&self) -> bool {
        self.has_result
    }

    fn result(&self) -> &[R::Elem] {
        &self.local.y
    }

    fn stats(&self) -> &RankStats {
        &self.local.stats
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Phase {
    Reduce,
    Bcast,
    Done,
}

/// One operation of the reduce-then-broadcast baseline: an optional receive
/// from one peer paired with an optional send to another, as a single
/// full-duplex step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BaselineOp {
    pub send: Option<(Rank, isize)>,
    pub recv: Option<(Rank, RecvTarget)>,
}

/// One rank of the single-tree reduce followed by broadcast.
///
/// Reduce phase, per block `j`: receive `j` from the first child while
/// forwarding the finished block `j - 1` to the parent, then receive `j`
/// from the second child. Broadcast phase, per block `j`: receive `j` from
/// the parent while forwarding `j - 1` to the last child, then send `j` to
/// the first child. Each phase costs two steps per block in steady state.
pub struct ReduceBcast<'a, R: Reducer> {
    local: Local<'a, R>,
    node: Node,
    phase: Phase,
    index: usize,
    has_result: bool,
}

impl<'a, R: Reducer> ReduceBcast<'a, R> {
    pub fn new(
        topo: &'a TreeTopology,
        part: BlockPartition,
        op: &'a R,
        rank: Rank,
        input: Vec<R::Elem>,
    ) -> Result<Self> {
        if topo.root_b().is_some() {
            return Err(Error::InvalidArgument(
                "reduce-bcast needs a single-tree topology",
            ));
        }
        let node = *topo.node(rank)?;
        let local = Local::new(rank, part, op, input)?;
        let b = part.blocks();
        let mut state = Self {
            local,
            node,
            phase: Phase::Reduce,
            index: 0,
            has_result: b == 0 || (node.is_root() && node.is_leaf()),
        };
        state.settle();
        Ok(state)
    }

    pub fn is_terminated(&self) -> bool {
        self.has_result
    }

    pub fn into_result(self) -> Vec<R::Elem> {
        self.local.y
    }

    fn per_block(&self) -> usize {
        if self.node.child_second.is_some() {
            2
        } else {
            1
        }
    }

    /// The `index`-th operation of `phase`, or `None` past its end.
    fn op_at(&self, phase: Phase, index: usize) -> Option<BaselineOp> {
        let b = self.local.part.blocks();
        let n = &self.node;
        let per = self.per_block();
        let temp = |block| RecvTarget::Temp {
            block: block as isize,
            orientation: Orientation::Left,
        };
        match phase {
            Phase::Reduce => match (n.parent, n.child_first) {
                (None, None) => None,
                (Some(parent), None) => (index < b).then_some(BaselineOp {
                    send: Some((parent, index as isize)),
                    recv: None,
                }),
                (parent, Some(first)) => {
                    let (j, sub) = (index / per, index % per);
                    if j < b {
                        Some(match sub {
                            0 => BaselineOp {
                                send: parent.filter(|_| j > 0).map(|p| (p, j as isize - 1)),
                                recv: Some((first, temp(j))),
                            },
                            _ => BaselineOp {
                                send: None,
                                recv: Some((n.child_second.expect("per_block"), temp(j))),
                            },
                        })
                    } else if index == b * per && b > 0 {
                        parent.map(|p| BaselineOp {
                            send: Some((p, b as isize - 1)),
                            recv: None,
                        })
                    } else {
                        None
                    }
                }
            },
            Phase::Bcast => {
                let last_child = n.child_second.or(n.child_first);
                match (n.parent, n.child_first) {
                    (None, None) => None,
                    (Some(parent), None) => (index < b).then_some(BaselineOp {
                        send: None,
                        recv: Some((
                            parent,
                            RecvTarget::Result {
                                block: index as isize,
                            },
                        )),
                    }),
                    (None, Some(first)) => {
                        let (j, sub) = (index / per, index % per);
                        let to = if sub == 0 { first } else { n.child_second? };
                        (j < b).then_some(BaselineOp {
                            send: Some((to, j as isize)),
                            recv: None,
                        })
                    }
                    (Some(parent), Some(first)) => {
                        let (j, sub) = (index / per, index % per);
                        let last = last_child.expect("has a child");
                        if j < b {
                            Some(match sub {
                                0 => BaselineOp {
                                    send: (j > 0).then(|| (last, j as isize - 1)),
                                    recv: Some((parent, RecvTarget::Result { block: j as isize })),
                                },
                                _ => BaselineOp {
                                    send: Some((first, j as isize)),
                                    recv: None,
                                },
                            })
                        } else if index == b * per && b > 0 {
                            Some(BaselineOp {
                                send: Some((last, b as isize - 1)),
                                recv: None,
                            })
                        } else {
                            None
                        }
                    }
                }
            }
            Phase::Done => None,
        }
    }

    fn current(&self) -> Option<BaselineOp> {
        self.op_at(self.phase, self.index)
    }

    fn settle(&mut self) {
        while self.phase != Phase::Done && self.current().is_none() {
            self.phase = match self.phase {
                Phase::Reduce => Phase::Bcast,
                _ => Phase::Done,
            };
            self.index = 0;
            self.local.close_round();
        }
    }
}

impl<R: Reducer> RankProgram for ReduceBcast<'_, R> {
    type Elem = R::Elem;

    fn rank(&self) -> Rank {
        self.local.rank
    }

    fn pending(&self) -> Option<Intent> {
        let op = self.current()?;
        Some(Intent {
            send_to: op.send.map(|(to, _)| to),
            recv_from: op.recv.map(|(from, _)| from),
            recv_capacity: if op.recv.is_some() {
                self.local.part.block_size()
            } else {
                0
            },
        })
    }

    fn outgoing(&self) -> &[R::Elem] {
        match self.current().and_then(|op| op.send) {
            Some((_, block)) => self.local.block(block),
            None => &[],
        }
    }

    fn complete(&mut self, received: &[R::Elem]) -> Result<()> {
        let op = self
            .current()
            .ok_or(Error::InvalidArgument("no pending exchange"))?;
        let sent = op
            .send
            .map_or(0, |(_, block)| self.local.part.len_of(block));
        self.local.count_exchange(sent, received.len());
        if let Some((_, target)) = op.recv {
            self.local.accept(target, received)?;
        }
        let b = self.local.part.blocks();
        if (self.index + 1).is_multiple_of(self.per_block()) {
            self.local.stats.rounds += 1;
            self.local.close_round();
        }
        let final_block = b as isize - 1;
        match (self.phase, op.recv) {
            (Phase::Reduce, Some((_, RecvTarget::Temp { block, .. })))
                if self.node.is_root()
                    && block == final_block
                    && self.index + 1 == b * self.per_block() =>
            {
                self.has_result = true;
            }
            (Phase::Bcast, Some((_, RecvTarget::Result { block }))) if block == final_block => {
                self.has_result = true;
            }
            _ => {}
        }
        self.index += 1;
        self.settle();
        Ok(())
    }

    fn has_result(&self) -> bool {
        self.has_result
    }

    fn result(&self) -> &[R::Elem] {
        &self.local.y
    }

    fn stats(&self) -> &RankStats {
        &self.local.stats
    }
}

/// Results and accounting of one simulated collective.
#[derive(Clone, Debug, PartialEq)]
pub struct RunOutcome<T> {
    pub results: Vec<Vec<T>>,
    pub report: RunReport,
}

/// Everything measured about one simulated run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunReport {
    pub algorithm: Algorithm,
    pub procs: usize,
    pub elements: usize,
    pub block_size: usize,
    pub blocks: usize,
    /// Synchronous steps executed; the step at which the last rank finished.
    pub steps: u64,
    /// Critical-path time under the alpha-beta model.
    pub model_time: f64,
    /// `gamma` times the number of element-wise `⊙` applications; reported
    /// apart from `model_time`.
    pub gamma_cost: f64,
    pub messages: u64,
    pub exchanges: u64,
    pub elements_sent: u64,
    pub elements_received: u64,
    pub combines: u64,
    pub rank_rounds: Vec<usize>,
    pub rank_finish_step: Vec<u64>,
    pub rank_result_step: Vec<u64>,
    pub rank_stats: Vec<RankStats>,
}

impl RunReport {
    fn assemble(
        algorithm: Algorithm,
        part: &BlockPartition,
        params: &CostParams,
        trace: Trace,
        stats: Vec<RankStats>,
    ) -> Self {
        let sum = |f: fn(&RankStats) -> u64| stats.iter().map(f).sum::<u64>();
        let combines = sum(|s| s.combines);
        RunReport {
            algorithm,
            procs: stats.len(),
            elements: part.elements(),
            block_size: part.block_size(),
            blocks: part.blocks(),
            steps: trace.steps,
            model_time: trace.model_time(),
            gamma_cost: params.gamma * combines as f64,
            messages: trace.messages,
            exchanges: sum(|s| s.exchanges),
            elements_sent: sum(|s| s.elements_sent),
            elements_received: sum(|s| s.elements_received),
            combines,
            rank_rounds: stats.iter().map(|s| s.rounds).collect(),
            rank_finish_step: trace.finish_step,
            rank_result_step: trace.result_step,
            rank_stats: stats,
        }
    }
}

/// Knobs for a simulated run beyond the algorithm itself.
pub struct RunOptions<'t, T> {
    pub params: CostParams,
    pub dual_orientation: DualOrientation,
    pub tap: Option<&'t mut dyn Tap<T>>,
}

impl<T> RunOptions<'_, T> {
    pub fn new(params: CostParams) -> Self {
        Self {
            params,
            dual_orientation: DualOrientation::Ordered,
            tap: None,
        }
    }
}

fn check_inputs<T>(procs: usize, inputs: &[Vec<T>]) -> Result<usize> {
    if inputs.len() != procs {
        return Err(Error::InconsistentWorld(
            "one input vector per rank required",
        ));
    }
    let m = inputs.first().map_or(0, Vec::len);
    if inputs.iter().any(|x| x.len() != m) {
        return Err(Error::InconsistentWorld("input vectors differ in length"));
    }
    Ok(m)
}

fn simulate<P: RankProgram>(
    programs: &mut [P],
    opts: &mut RunOptions<'_, P::Elem>,
) -> Result<Trace> {
    match opts.tap.as_deref_mut() {
        Some(tap) => Simulator::with_tap(opts.params, tap).run(programs),
        None => Simulator::new(opts.params).run(programs),
    }
}

/// Doubly pipelined dual-root allreduce over `inputs.len()` ranks.
pub fn run_doubly_pipelined<R: Reducer>(
    op: &R,
    inputs: Vec<Vec<R::Elem>>,
    block_size: usize,
    mut opts: RunOptions<'_, R::Elem>,
) -> Result<RunOutcome<R::Elem>> {
    let topo = TreeTopology::build_dual_trees(inputs.len())?;
    let m = check_inputs(topo.procs(), &inputs)?;
    let part = BlockPartition::new(m, block_size)?;
    let mut programs = inputs
        .into_iter()
        .enumerate()
        .map(|(rank, x)| DoublyPipelined::new(&topo, part, op, rank, x, opts.dual_orientation))
        .collect::<Result<Vec<_>>>()?;
    let trace = simulate(&mut programs, &mut opts)?;
    let stats = programs.iter().map(|p| p.stats().clone()).collect();
    let report = RunReport::assemble(Algorithm::Doubly, &part, &opts.params, trace, stats);
    Ok(RunOutcome {
        results: programs
            .into_iter()
            .map(DoublyPipelined::into_result)
            .collect(),
        report,
    })
}

fn run_reduce_bcast<R: Reducer>(
    algorithm: Algorithm,
    op: &R,
    inputs: Vec<Vec<R::Elem>>,
    part_for: impl FnOnce(usize) -> Result<BlockPartition>,
    mut opts: RunOptions<'_, R::Elem>,
) -> Result<RunOutcome<R::Elem>> {
    let topo = TreeTopology::build_single_tree(inputs.len())?;
    let m = check_inputs(topo.procs(), &inputs)?;
    let part = part_for(m)?;
    let mut programs = inputs
        .into_iter()
        .enumerate()
        .map(|(rank, x)| ReduceBcast::new(&topo, part, op, rank, x))
        .collect::<Result<Vec<_>>>()?;
    let trace = simulate(&mut programs, &mut opts)?;
    let stats = programs.iter().map(|p| p.stats().clone()).collect();
    let report = RunReport::assemble(algorithm, &part, &opts.params, trace, stats);
    Ok(RunOutcome {
        results: programs.into_iter().map(ReduceBcast::into_result).collect(),
        report,
    })
}

/// Pipelined single-tree reduce followed by pipelined broadcast.
pub fn run_pipelined_reduce_bcast<R: Reducer>(
    op: &R,
    inputs: Vec<Vec<R::Elem>>,
    block_size: usize,
    opts: RunOptions<'_, R::Elem>,
) -> Result<RunOutcome<R::Elem>> {
    run_reduce_bcast(
        Algorithm::Pipelined,
        op,
        inputs,
        |m| BlockPartition::new(m, block_size),
        opts,
    )
}

/// Reduce then broadcast with the whole vector as one block.
pub fn run_naive_reduce_bcast<R: Reducer>(
    op: &R,
    inputs: Vec<Vec<R::Elem>>,
    opts: RunOptions<'_, R::Elem>,
) -> Result<RunOutcome<R::Elem>> {
    run_reduce_bcast(
        Algorithm::Naive,
        op,
        inputs,
        |m| Ok(BlockPartition::unpipelined(m)),
        opts,
    )
}

/// Dispatch on [`Algorithm`]. `block_size` is ignored for [`Algorithm::Naive`].
pub fn run<R: Reducer>(
    algorithm: Algorithm,
    op: &R,
    inputs: Vec<Vec<R::Elem>>,
    block_size: usize,
    opts: RunOptions<'_, R::Elem>,
) -> Result<RunOutcome<R::Elem>> {
    match algorithm {
        Algorithm::Doubly => run_doubly_pipelined(op, inputs, block_size, opts),
        Algorithm::Pipelined => run_pipelined_reduce_bcast(op, inputs, block_size, opts),
        Algorithm::Naive => run_naive_reduce_bcast(op, inputs, opts),
    }
}
