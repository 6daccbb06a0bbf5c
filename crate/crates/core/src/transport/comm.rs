use std::cell::RefCell;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError, Sender};
use std::sync::{Arc, Mutex};
use std::time::Duration;

use super::topology::{CartTopology, RankId, TopologyKind};
use crate::{Error, Result};

const POLL: Duration = Duration::from_millis(5);

/// Tags at or above this value are reserved for collectives.
pub const RESERVED_TAG_BASE: u32 = 1 << 30;
const TAG_REDUCE: u32 = RESERVED_TAG_BASE;
const TAG_BCAST: u32 = RESERVED_TAG_BASE + 1;
const TAG_GATHER: u32 = RESERVED_TAG_BASE + 2;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TransportError {
    #[error(
        "length mismatch on tag {tag}: rank {receiver} expected {expected} values from rank {sender}, got {actual}"
    )]
    LengthMismatch {
        sender: RankId,
        receiver: RankId,
        tag: u32,
        expected: usize,
        actual: usize,
    },

    #[error("rank {0} is not a member of this communicator")]
    InvalidRank(RankId),

    #[error("rank {peer} is no longer reachable from rank {rank}")]
    PeerGone { rank: RankId, peer: RankId },

    #[error("rank {0} aborted: another rank failed")]
    Aborted(RankId),
}

#[derive(Debug)]
pub struct Message {
    pub source: RankId,
    pub tag: u32,
    pub payload: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
pub enum ReduceOp {
    Sum,
    Max,
    Min,
}

impl ReduceOp {
    fn apply(self, a: f64, b: f64) -> f64 {
        match self {
            ReduceOp::Sum => a + b,
            ReduceOp::Max => a.max(b),
            ReduceOp::Min => a.min(b),
        }
    }
}

/// Per-rank communicator handle.
///
/// Sends are buffered and never block; receives block until a message with
/// the requested source and tag arrives. Messages between one pair of ranks
/// with the same tag are delivered in order.
pub struct Comm {
    rank: RankId,
    topology: CartTopology,
    outboxes: Vec<Sender<Message>>,
    inbox: Receiver<Message>,
    pending: RefCell<Vec<Message>>,
    abort: Arc<AtomicBool>,
}

impl Comm {
    pub fn rank(&self) -> RankId {
        self.rank
    }

    pub fn size(&self) -> usize {
        self.outboxes.len()
    }

    pub fn topology(&self) -> &CartTopology {
        &self.topology
    }

    pub fn coords(&self) -> Vec<usize> {
        self.topology.coords(self.rank)
    }

    /// Neighbor along `axis` at displacement `disp`, if any.
    pub fn neighbor(&self, axis: usize, disp: isize) -> Option<RankId> {
        self.topology.shift(self.rank, axis, disp)
    }

    pub fn send(&self, dest: RankId, tag: u32, payload: Vec<f64>) -> Result<(), TransportError> {
        let outbox = self
            .outboxes
            .get(dest.0)
            .ok_or(TransportError::InvalidRank(dest))?;
        outbox
            .send(Message {
                source: self.rank,
                tag,
                payload,
            })
            .map_err(|_| TransportError::PeerGone {
                rank: self.rank,
                peer: dest,
            })
    }

    pub fn recv(&self, source: RankId, tag: u32) -> Result<Vec<f64>, TransportError> {
        if source.0 >= self.size() {
            return Err(TransportError::InvalidRank(source));
        }
        {
            let mut pending = self.pending.borrow_mut();
            if let Some(k) = pending
                .iter()
                .position(|m| m.source == source && m.tag == tag)
            {
                return Ok(pending.remove(k).payload);
            }
        }
        loop {
            match self.inbox.recv_timeout(POLL) {
                Ok(msg) if msg.source == source && msg.tag == tag => return Ok(msg.payload),
                Ok(msg) => self.pending.borrow_mut().push(msg),
                Err(RecvTimeoutError::Timeout) => {
                    if self.abort.load(Ordering::Acquire) {
                        return Err(TransportError::Aborted(self.rank));
                    }
                }
                Err(RecvTimeoutError::Disconnected) => {
                    return Err(TransportError::PeerGone {
                        rank: self.rank,
                        peer: source,
                    })
                }
            }
        }
    }

    /// Receives into `buf`, requiring the incoming payload to match its length.
    pub fn recv_into(&self, source: RankId, tag: u32, buf: &mut [f64]) -> Result<(), TransportError> {
        let payload = self.recv(source, tag)?;
        if payload.len() != buf.len() {
            return Err(TransportError::LengthMismatch {
                sender: source,
                receiver: self.rank,
                tag,
                expected: buf.len(),
                actual: payload.len(),
            });
        }
        buf.copy_from_slice(&payload);
        Ok(())
    }

    /// Sends `send_buf` to `send_to` and receives `recv_buf` from `recv_from`.
    pub fn sendrecv(
        &self,
        send_to: RankId,
        send_buf: &[f64],
        recv_from: RankId,
        recv_buf: &mut [f64],
        tag: u32,
    ) -> Result<(), TransportError> {
        self.send(send_to, tag, send_buf.to_vec())?;
        self.recv_into(recv_from, tag, recv_buf)
    }

    /// Combines `value` over all ranks, in rank order, and returns the result
    /// on every rank.
    pub fn allreduce(&self, value: f64, op: ReduceOp) -> Result<f64, TransportError> {
        let root = RankId(0);
        if self.rank == root {
            let mut acc = value;
            for r in 1..self.size() {
                let v = self.recv(RankId(r), TAG_REDUCE)?;
                acc = op.apply(acc, v[0]);
            }
            for r in 1..self.size() {
                self.send(RankId(r), TAG_BCAST, vec![acc])?;
            }
            Ok(acc)
        } else {
            self.send(root, TAG_REDUCE, vec![value])?;
            Ok(self.recv(root, TAG_BCAST)?[0])
        }
    }

    /// Collects every rank's buffer on every rank, indexed by rank.
    pub fn allgather(&self, buf: &[f64]) -> Result<Vec<Vec<f64>>, TransportError> {
        let root = RankId(0);
        if self.rank == root {
            let mut all = vec![buf.to_vec()];
            for r in 1..self.size() {
                all.push(self.recv(RankId(r), TAG_GATHER)?);
            }
            for r in 1..self.size() {
                for part in &all {
                    self.send(RankId(r), TAG_BCAST, part.clone())?;
                }
            }
            Ok(all)
        } else {
            self.send(root, TAG_GATHER, buf.to_vec())?;
            (0..self.size()).map(|_| self.recv(root, TAG_BCAST)).collect()
        }
    }

    pub fn barrier(&self) -> Result<(), TransportError> {
        self.allreduce(0.0, ReduceOp::Sum).map(|_| ())
    }
}

/// Runs `program` on `n` concurrent ranks arranged in a balanced topology.
pub fn spawn_ranks<T, F>(n: usize, kind: TopologyKind, program: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&Comm) -> Result<T> + Sync,
{
    spawn_ranks_with(CartTopology::new(kind, n)?, program)
}

/// Runs `program` once per rank of `topology`, each on its own thread.
///
/// If any rank fails, the others are released from blocking receives and the
/// first failure is returned once all ranks have stopped.
pub fn spawn_ranks_with<T, F>(topology: CartTopology, program: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&Comm) -> Result<T> + Sync,
{
    let n = topology.size();
    let (senders, receivers): (Vec<_>, Vec<_>) = (0..n).map(|_| mpsc::channel()).unzip();
    let abort = Arc::new(AtomicBool::new(false));
    let first_error: Mutex<Option<Error>> = Mutex::new(None);

    let comms: Vec<Comm> = receivers
        .into_iter()
        .enumerate()
        .map(|(r, inbox)| Comm {
            rank: RankId(r),
            topology: topology.clone(),
            outboxes: senders.clone(),
            inbox,
            pending: RefCell::new(Vec::new()),
            abort: Arc::clone(&abort),
        })
        .collect();
    drop(senders);

    let fail = |err: Error| {
        let mut slot = first_error.lock().unwrap();
        let is_abort = matches!(err, Error::Transport(TransportError::Aborted(_)));
        if slot.is_none() || (!is_abort && matches!(*slot, Some(Error::Transport(TransportError::Aborted(_))))) {
            *slot = Some(err);
        }
        abort.store(true, Ordering::Release);
    };

    let results: Vec<Option<T>> = std::thread::scope(|s| {
        let handles: Vec<_> = comms
            .into_iter()
            .map(|comm| {
                let (program, fail) = (&program, &fail);
                s.spawn(move || {
                    let rank = comm.rank.0;
                    match catch_unwind(AssertUnwindSafe(|| program(&comm))) {
                        Ok(Ok(value)) => Some(value),
                        Ok(Err(err)) => {
                            fail(err);
                            None
                        }
                        Err(panic) => {
                            let message = panic
                                .downcast_ref::<&str>()
                                .map(|s| s.to_string())
                                .or_else(|| panic.downcast_ref::<String>().cloned())
                                .unwrap_or_else(|| "unknown panic".into());
                            fail(Error::RankPanicked { rank, message });
                            None
                        }
                    }
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("rank thread panicked outside its program"))
            .collect()
    });

    if let Some(err) = first_error.into_inner().unwrap() {
        return Err(err);
    }
    Ok(results.into_iter().map(|r| r.expect("rank produced no result")).collect())
}
