//! Performance-portability miniapps.
//!
//! Two proxy applications, an all-pairs Lennard-Jones N-body code and a 2-D
//! vorticity/stream-function flow solver, written against a small execution
//! layer ([`portability`]) and an in-process rank transport ([`transport`]).
//! The [`bench`] module drives them with a repetition/median timing protocol
//! and [`vtk`] writes per-rank legacy VTK files.

pub mod bench;
pub mod grid;
pub mod nbody;
pub mod portability;
pub mod timing;
pub mod transport;
pub mod vtk;

use std::path::PathBuf;

pub use portability::{Backend, BackendKind, Layout, View2D};
pub use transport::{spawn_ranks, CartTopology, Comm, RankId, TopologyKind, TransportError};

/// Errors surfaced by the miniapps and their drivers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Transport(#[from] TransportError),

    #[error("rank {rank} panicked: {message}")]
    RankPanicked { rank: usize, message: String },

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error on {}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
