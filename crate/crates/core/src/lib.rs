//! Synthetic classroom scenes rendered into aligned photo, label and depth
//! images, packaged as paired training data and scored with per-pixel
//! accuracy metrics.

pub mod dataset;
pub mod error;
pub mod evalmetrics;
pub mod geometry;
pub mod json;
pub mod render;
pub mod rng;
pub mod scenegen;

pub use dataset::{
    build_dataset, compose_pair, split_manifest, BuildOutcome, DatasetConfig, DatasetManifest,
    ManifestEntry, PairTarget, PairedImage, SplitCounts, SplitName,
};
pub use error::{Error, Result};
pub use evalmetrics::{
    aggregate, evaluate_directory, exact_accuracy, thresh_accuracy, Aggregate, ChannelRule,
    EvalConfig, EvalReport,
};
pub use render::{
    render_depth, render_label, render_photo, render_triple, DoorLabel, LabelPalette,
    RenderSettings, RenderTriple,
};
pub use scenegen::{sample_scene, RoomRanges, SceneSpec};
