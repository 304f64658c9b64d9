//! Training-free visual token compression for GUI agents.
//!
//! History screenshots are downscaled on a recency-weighted token budget
//! ([`tar`]); the current screenshot's tokens are pruned in three strata,
//! structural foreground, salient background and a uniform layout skeleton
//! ([`ssp`]), using a foreground mask from a classical edge pipeline
//! ([`vision`]). [`accounting`] turns a plan and a selection into token and
//! FLOPs figures, and [`io`] drives the whole thing from files.

pub mod accounting;
pub mod error;
pub mod io;
pub mod sim;
pub mod ssp;
pub mod tar;
pub mod types;
pub mod vision;

pub use accounting::EfficiencyReport;
pub use error::{Error, ErrorKind, Result};
pub use ssp::{prune, StratumBudget};
pub use tar::{plan_history, HistoryBudgetPlan};
pub use types::{
    CompressionConfig, CostModelParams, ImportanceMap, PartitionMask, PruneSelection, Stratum, TokenGrid,
};
