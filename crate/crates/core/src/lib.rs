//! Formal chains of combinatorial manifolds.
//!
//! Small exact topology (dimensions 0 to 2), universal manifold pairings on
//! complex superpositions, CDT-style growth with mirror doubling, a
//! Regge-type action, a Metropolis sampler over formal chains, and a
//! two-level quantum-mechanics toy model.

pub mod action;
pub mod cdt;
pub mod chain;
pub mod config;
pub mod error;
pub mod formal;
pub mod pairing;
pub mod topo;
pub mod twofield;

pub use action::{ActionBreakdown, ActionParams};
pub use cdt::{Cobordism, GrowthConfig, Layer};
pub use chain::{detect_termination, total_action, ChainStats, FormalChain, NeighborGraph, SamplerConfig};
pub use config::RunConfig;
pub use error::{Error, Result};
pub use formal::{Amplitude, Complex64, ExactAmplitude, Superposition};
pub use pairing::{pair, MockEquivalence, PairingRule};
pub use topo::{Closed0Class, Closed1Class, ClosedSurfaceClass, LoopKey, Triangulation};
