//! Parametric node-closeness measures on graphs, kernel k-means community
//! detection, LFR-style benchmark generation and the analysis pipeline that
//! compares measures across the benchmark's parameter space.
//!
//! The crate is organised bottom-up:
//!
//! - [`graph`]: graphs with planted labels and their derived matrices.
//! - [`measures`]: 15 measure families, 25 measures counting log variants.
//! - [`clustering`]: kernel k-means with best-of-18 trial selection.
//! - [`scoring`]: adjusted Rand index and modularity.
//! - [`lfr`]: benchmark graph generation.
//! - [`bench`]: grid sweeps and the result stores.
//! - [`analysis`]: leaderboards, LDA and leadership zones.
//! - [`cli`]: the `gm` binary.
//!
//! Runnable walkthroughs live in `examples/`.

pub mod analysis;
pub mod bench;
pub mod cli;
pub mod clustering;
pub mod error;
pub mod graph;
pub mod lfr;
pub mod linalg;
pub mod measures;
pub mod scoring;
pub mod seed;

pub use error::{Error, Result};
