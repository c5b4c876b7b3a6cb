//! Numerical analysis of a predator-prey model in which the predator
//! population carries two genotypes and feeds through a Holling type II
//! response.
//!
//! The crate computes the three equilibria in closed form, classifies the
//! Routh-Hurwitz conditions at the coexistence point along the
//! half-saturation axis, integrates trajectories and locates transcritical
//! and Hopf critical values.

pub mod bifurcation;
pub mod cli;
pub mod config;
pub mod dynamics;
pub mod eigen;
pub mod equilibria;
pub mod error;
pub mod model;
pub mod numeric;
pub mod output;
pub mod stability;

pub use error::{Error, Result};
pub use model::{Matrix3, RawParameters, ScaledParameters, StateVector};
