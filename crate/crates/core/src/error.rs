use core::fmt;

use crate::topology::Rank;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    /// A caller supplied an argument outside the operation's domain.
    InvalidArgument(&'static str),
    RankOutOfRange {
        rank: Rank,
        procs: usize,
    },
    /// A round index past the rank's loop bound.
    RoundOutOfRange {
        rank: Rank,
        round: usize,
        last: usize,
    },
    /// Received block length disagrees with the block it is combined into.
    LengthMismatch {
        rank: Rank,
        block: isize,
        expected: usize,
        received: usize,
    },
    /// Two blocks combined element-wise differ in length.
    BlockLengthMismatch {
        incoming: usize,
        local: usize,
    },
    /// A peer sent more elements than the receiver's buffer holds.
    CapacityOverflow {
        from: Rank,
        to: Rank,
        capacity: usize,
        received: usize,
    },
    /// An intent names a peer the topology does not connect to this rank.
    PeerMismatch {
        rank: Rank,
        peer: Rank,
    },
    /// The peer's side of a channel went away mid-run.
    Disconnected {
        rank: Rank,
        peer: Rank,
    },
    /// No exchange could fire although some ranks still have pending intents.
    Deadlock {
        step: u64,
        pending: alloc::vec::Vec<(Rank, Option<Rank>, Option<Rank>)>,
    },
    /// Inputs with differing lengths, or a rank count that does not match the topology.
    InconsistentWorld(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::RankOutOfRange { rank, procs } => {
                write!(f, "rank {rank} out of range for {procs} processes")
            }
            Error::RoundOutOfRange { rank, round, last } => {
                write!(f, "rank {rank}: round {round} beyond loop bound {last}")
            }
            Error::LengthMismatch {
                rank,
                block,
                expected,
                received,
            } => write!(
                f,
                "rank {rank}: block {block} expected {expected} elements, received {received}"
            ),
            Error::BlockLengthMismatch { incoming, local } => write!(
                f,
                "cannot combine a {incoming}-element block into a {local}-element block"
            ),
            Error::CapacityOverflow {
                from,
                to,
                capacity,
                received,
            } => write!(
                f,
                "message {from} -> {to} carries {received} elements, receive capacity is {capacity}"
            ),
            Error::PeerMismatch { rank, peer } => {
                write!(f, "rank {rank} is not connected to peer {peer}")
            }
            Error::Disconnected { rank, peer } => {
                write!(f, "rank {rank}: peer {peer} disconnected")
            }
            Error::Deadlock { step, pending } => {
                write!(f, "deadlock at step {step}; pending intents:")?;
                for (rank, send_to, recv_from) in pending {
                    write!(f, " [rank {rank}: send->{send_to:?} recv<-{recv_from:?}]")?;
                }
                Ok(())
            }
            Error::InconsistentWorld(msg) => write!(f, "inconsistent world: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
