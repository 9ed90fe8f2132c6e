//! Record formats, caching and the end-to-end pipeline behind the `yf` binary.

pub mod cache;
pub mod pipeline;
pub mod records;

pub use cache::{sha256_hex, write_atomic, Cache};
pub use pipeline::{run_pipeline, run_pipeline_with_threads, Check, PipelineOutcome, RunConfig, Session};
