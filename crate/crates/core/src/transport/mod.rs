//! In-process message passing between ranks.
//!
//! Each rank runs on its own thread with a [`Comm`] handle. Ranks are laid
//! out on a [`CartTopology`]: a periodic ring for the N-body ring exchange
//! and a non-periodic 2-D grid for the structured-grid halo exchange.

mod comm;
mod halo;
mod topology;

pub use comm::{
    spawn_ranks, spawn_ranks_with, Comm, Message, ReduceOp, TransportError, RESERVED_TAG_BASE,
};
pub use halo::halo_exchange;
pub use topology::{dims_create, CartTopology, RankId, TopologyKind};

use crate::{Error, Result};

const TAG_RING: u32 = 1;

/// One step of the ring: every rank sends `buf` to its successor and
/// replaces it with its predecessor's buffer.
pub fn ring_shift(comm: &Comm, buf: &mut [f64]) -> Result<()> {
    if comm.topology().kind() != TopologyKind::Ring1D {
        return Err(Error::Config("ring_shift needs a Ring1D communicator".into()));
    }
    let next = comm.neighbor(0, 1).expect("ring is periodic");
    let prev = comm.neighbor(0, -1).expect("ring is periodic");
    let outgoing = buf.to_vec();
    comm.sendrecv(next, &outgoing, prev, buf, TAG_RING)?;
    Ok(())
}

#[cfg(test)]
mod tests;
