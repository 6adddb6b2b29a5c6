//! Statistical inference on dense multiplex networks: generators for
//! multiplex Erdős–Rényi, SBM and block-exchangeable models, exact cross-layer
//! motif counts, moment-based estimation of the layer-subset graphons,
//! limiting covariances and multiplier sampling statistics, and the
//! similarity and edge-wise independence tests.

pub mod asymptotics;
pub mod error;
pub mod estimation;
pub mod genmodel;
pub mod graphon;
pub mod hyptests;
pub mod io;
pub mod motif;
pub mod motifs;
pub mod multibern;
pub mod network;
pub mod oracle;
pub mod subset;

pub use error::{Error, Result};
pub use graphon::{BlockGraphonVector, CommunityAssignment};
pub use motif::{builtin_motif, copies_containing_edge12, Motif};
pub use network::{intersection_adjacency, Adjacency, MultiplexNetwork};
pub use subset::LayerSubset;
