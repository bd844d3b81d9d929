//! Multi-target radar tracking over synthetic range-Doppler data.
//!
//! The crate combines a range-Doppler radar simulator, a CFAR/DBSCAN
//! detection front end, a message-passing tracker with probabilistic data
//! association, a small trainable CNN/MLP measurement classifier, and
//! Dempster-Shafer fusion of tracker and classifier beliefs. Tracking can
//! run in three modes: plain message passing (`Mp`), message passing after
//! hard classifier gating (`MpNn`), and neural-enhanced message passing
//! (`Nemp`) where classifier output refines the clutter messages of the
//! data association loop.
//!
//! Monte Carlo sweeps fan out across a rayon pool when the `parallel`
//! feature (default) is enabled; the sequential fallback produces
//! identical results.

pub mod config;
pub mod dataset;
pub mod detect;
pub mod ds;
pub mod error;
pub mod exec;
pub mod metrics;
pub mod mp;
pub mod nemp;
pub mod nn;
pub mod pipeline;
pub mod scenario;

pub use error::{Error, Result};
