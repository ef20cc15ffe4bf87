//! Mean–variance analysis of finite-horizon Markov decision processes.
//!
//! All model arithmetic is exact ([`rational::Rational`]). The crate covers
//! the data model and exact policy evaluation ([`model`]), an exact simplex
//! solver ([`lp`]), occupation-measure feasibility queries ([`frequency`]),
//! grid approximations of the mean–variance tradeoff ([`tradeoff`]),
//! set-valued dynamic programming over moment polygons ([`setdp`], built on
//! [`geometry`]), and the reachability game, enumeration oracle, and
//! reduction generators ([`games`]).

pub mod error;
pub mod fixtures;
pub mod frequency;
pub mod games;
pub mod geometry;
pub mod lp;
pub mod model;
pub mod rational;
pub mod setdp;
pub mod tradeoff;

pub use error::{Error, Result};
pub use model::{Mdp, PolicyClass, PolicySpec};
pub use rational::{Extended, Rational};
