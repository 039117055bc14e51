//! Monte Carlo simulation of grouped, block-correlated case/control data.

mod covariance;
mod partition;
mod sampling;
mod scenario;
mod signals;
mod study;

pub use covariance::{
    build_covariance, nearest_pd_repair, BlockSparseCovariance, Component, CorrelatedPair, EIGEN_FLOOR,
};
pub use partition::build_group_sizes;
pub use sampling::{sample_dataset, DataMatrix};
pub use scenario::{round_count, CouplingScheme, GroupSizeScheme, SimulationScenario};
pub use signals::{assign_signals, SignalMask};
pub use study::{
    replicate_rng, run_replicate, run_replicate_with_pvalues, run_study, summarize, ReplicateOutcome,
    SimulatedDataset, StudyPoint,
};
