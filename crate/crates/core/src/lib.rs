//! Mirror-Langevin sampling on constrained domains.
//!
//! The crate provides mirror maps ([`MirrorMap`]) with their dual maps and
//! Hessian factors, target potentials, the two-stage mirror-Langevin
//! algorithm with unadjusted and projected Langevin baselines, exact
//! assignment-based transport diagnostics, reference samplers, and the
//! harness that drives the benchmark experiments.

pub mod error;
pub mod harness;
pub mod mirror;
pub mod oracle;
pub mod potentials;
pub mod rng;
pub mod samplers;
pub mod transport;

pub use error::{Error, Result};
pub use mirror::{HessianFactor, MapKind, MirrorMap};
pub use potentials::{ConvexityProfile, LogisticDataset, Potential, QuadraticPotential};
pub use rng::{derive_seed, tag, NoiseSource, Stream};
pub use samplers::{ChainState, Projection, Sampler, SamplerConfig, Trajectory};
pub use transport::EmpiricalMeasure;
