//! Core engine of `finch`, a coverage-guided greybox fuzzer that treats
//! every uncovered branch as a numeric objective.
//!
//! Instead of ranking inputs by coverage alone, the engine scores each
//! execution with per-branch *distances* ([`distance`]), keeps the seeds that
//! are Pareto-minimal across the open branches ([`pareto`]), trains a small
//! network to predict distances from raw bytes ([`model`]), and walks its
//! input gradients byte by byte ([`mutator`]). Targets run in-process behind
//! a reporting harness ([`target`]); [`engine`] ties the loop together, and
//! [`coverage`] supplies the classic edge bitmap both modes share.

pub mod coverage;
pub mod distance;
pub mod engine;
pub mod model;
pub mod mutator;
pub mod pareto;
pub mod target;

pub use coverage::{edge_id, BlockId, CoverageBitmap, ENTRY_BLOCK};
pub use distance::{
    branch_distance, signed_operand, BranchSiteId, DistanceBitmap, DistanceMode, Normalization,
    Relation, DEFAULT_K,
};
pub use engine::{
    baseline_fuzz, dedup_crash, fuzz, hot_fuzz, Budget, CampaignResult, CampaignSink, CrashRecord,
    EngineConfig, FuzzMode, GenerationTrace, NullSink, PoolSeed, StatsRow, STATS_HEADER,
};
pub use model::{
    build_training_set, masked_bce, train, Model, ParamGradients, TrainConfig, TrainReport,
    TrainingSet,
};
pub use mutator::{group_trajectory, havoc, mutate_hot_bytes, top, GradientRanking};
pub use pareto::{dominates, just_missed, min_pareto_set, pareto_boundary, MinParetoSet};
pub use target::{
    builtin_targets, find_target, make_lava_target, ExecConfig, ExecutionResult, Harness, Outcome,
    TargetConfigError, TargetHandle,
};
