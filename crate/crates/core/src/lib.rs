//! String- and brane-like maps over currency tick series.
//!
//! A price window `p(τ..τ+l_s)` is projected onto a real sequence over an
//! internal coordinate `h` with pinned (Dirichlet-type) end points — a
//! boundary-respecting detrending transform. On top of the maps sit the
//! statistics: midpoint sweeps over the string length, intra-string
//! profiles, Fourier modes, buy-condition polarization with a correlation
//! dimension, inter-currency rotation measures, and directional derivatives.
//!
//! Modules follow the pipeline: [`ingest`] → [`maps`]/[`brane`] →
//! [`stats`]/[`polarization`]/[`rotation`]/[`gateaux`], with [`synth`]
//! providing deterministic test inputs and [`export`] the fixed-schema
//! CSV/JSON output.

pub mod brane;
pub mod error;
pub mod export;
pub mod gateaux;
pub mod ingest;
pub mod maps;
pub mod numeric;
pub mod polarization;
pub mod rotation;
pub mod stats;
pub mod synth;

pub use error::{Error, Result};
pub use ingest::{GridSeries, Tick, TickSeries};
pub use maps::{Channel, ConjugateState, StringConfig, StringState, Topology};
