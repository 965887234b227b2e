//! Spanning-tree embedding: tree analysis and the Case I / Case II strategies.

pub mod case1;
pub mod case2;
pub mod census;
pub mod decompose;
pub mod embed;
pub mod partition;
pub mod spec;
pub mod strategy;

pub use census::{classify_case, degree_census, select_independent_leaves, DegreeCensus, TreeCase};
pub use decompose::{bare_decomposition, BarePath, Decomposition};
pub use embed::{PartialEmbedding, VertexStatus};
pub use partition::{random_partition, Partition, PartitionConfig};
pub use spec::TreeSpec;
pub use strategy::{ThresholdConfig, TreeEmbedMaker, TreeGuards};
