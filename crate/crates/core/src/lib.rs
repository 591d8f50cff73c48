//! Tracks static-analysis warnings across two revisions of a codebase.
//!
//! Two pipelines are provided:
//!
//! * [`tracker::track_soa`]: the classic greedy cascade of exact, location,
//!   snippet and hash matching.
//! * [`tracker::track_improved`]: rewrites pre-commit warnings through
//!   refactoring records, drops hash matching, and resolves the remaining
//!   location/snippet candidates with a global maximum-weight assignment.
//!
//! [`evaluation`] scores either report against ground-truth labels.

pub mod assignment;
pub mod config;
pub mod corpus;
pub mod diff;
pub mod error;
pub mod evaluation;
pub mod ingest;
pub mod model;
pub mod refactor;
pub mod strategies;
pub mod tracker;

pub use config::MatchConfig;
pub use error::{Error, Result};
pub use model::{
    metadata_equal, warning_id, Approach, CommitPair, EvolutionStatus, Match, Side, Strategy,
    TrackingReport, WarningInstance, WarningSet,
};
