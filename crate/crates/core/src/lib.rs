//! Exact depth calculus for p-adic groups.
//!
//! * [`plcalc`]: exact piecewise-linear functions on `[0, ∞)`.
//! * [`ramification`]: Herbrand functions from lower-numbering break data.
//! * [`depth`]: depth of torus parameters and depth-transfer functions.
//! * [`lattice`]: integer matrices, Smith/Hermite normal forms.
//! * [`rootdata`]: root data with Galois actions, coinvariants, ellipticity.
//! * [`affine`]: extended affine Weyl groups, σ-fixed points, Cartan orbits.
//! * [`finitemodels`]: brute-force matrix groups over truncated rings and
//!   their Hecke algebras.
//! * [`hecke`]: presented Iwahori–Hecke algebras twisted by `C[Ω, μ]`.
//! * [`fixtures`]: the worked examples shipped with the CLI.
//! * [`acceptance`]: the end-to-end acceptance checks, also run by the CLI.

pub mod error;
pub mod exec;
pub mod rational;

pub mod depth;
pub mod plcalc;
pub mod lattice;
pub mod ramification;
pub mod rootdata;
pub mod affine;
pub mod finitemodels;
pub mod hecke;
pub mod fixtures;
pub mod acceptance;

pub use error::{Error, Result};
pub use exec::Exec;
pub use plcalc::PLFunction;
pub use rational::Q;
pub use ramification::RamificationProfile;
