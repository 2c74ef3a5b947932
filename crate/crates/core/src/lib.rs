//! Attractiveness scaling analysis for geo-tagged media and migration data.
//!
//! The crate turns raw media-object metadata into per-region counts of
//! objects taken by foreign visitors, relates them to population through a
//! log-log power-law fit, and ranks regions by how far they sit above or
//! below the trend. A migration origin/destination matrix and a city list
//! feed the same fitting machinery.
//!
//! | module | does |
//! |--------|------|
//! | [`ingest`] | streams and prunes tab-separated exports |
//! | [`geoassign`] | point-in-polygon lookup against GeoJSON regions |
//! | [`homeinfer`] | infers each user's home country |
//! | [`metrics`] | attractiveness tables (media, migration, city structure) |
//! | [`scaling`] | power-law fits, classification, residuals, log-normal fits |
//! | [`synth`] | seeded synthetic tables with a known exponent |
//! | [`pipeline`] | file-to-file stages and the one-shot run with a manifest |
//!
//! Runnable walkthroughs live in `examples/`; `cargo run --example` lists them.

pub mod config;
pub mod geoassign;
pub mod homeinfer;
pub mod ingest;
pub mod metrics;
pub mod pipeline;
pub mod scaling;
pub mod synth;

pub use geoassign::{assign_batch, load_regions, AssignedRecord, Polygon, Region, RegionSet};
pub use homeinfer::{accumulate, coverage_stats, infer_home, infer_homes, UserProfile};
pub use ingest::{parse_record, MediaRecord, PruneStats, Schema};
pub use metrics::{flickr_attractiveness, migration_attractiveness, AttractivenessTable};
pub use pipeline::{run_pipeline, PipelineConfig};
pub use scaling::{classify, fit_lognormal, fit_power_law, residuals, Classification, ScalingFit};
pub use synth::{generate_synthetic, SynthConfig};
