//! Uncover process on uniformly random labeled trees: sampling, exact
//! enumeration formulas, limit laws, brute-force oracles and Monte Carlo
//! harnesses.

pub mod dsu;
pub mod error;
pub mod asymptotics;
pub mod exact;
pub mod oracle;
pub mod rng;
pub mod stats;
pub mod tree;
pub mod uncover;

pub use error::{Error, Result};
pub use rng::RngStream;
pub use tree::{prufer_decode, prufer_encode, sample_uniform_rooted_tree, sample_uniform_tree, LabeledTree, PrueferSeq, RootedTree};
pub use uncover::{cluster_report, uncover_path, ClusterReport, UncoverPath, UncoverProcess};
