//! Limit cycles of the perturbed Euler top.
//!
//! The free rigid body (Euler top) is a Lie-Poisson system whose Casimir
//! invariant `D = x1^2 + x2^2 + x3^2` foliates phase space into invariant
//! spheres. This crate constructs polynomial perturbations that keep either a
//! single sphere or all spheres invariant, computes the first-order
//! Poincare-Pontryagin function `I(h)` of the reduced planar system in closed
//! form, predicts which periodic orbits bifurcate into limit cycles, and
//! confirms the predictions by direct integration and return-map analysis.
//!
//! Module map:
//! - [`model`]: the unperturbed top, its invariants and the semisphere chart.
//! - [`polynomial`]: exact sparse trivariate polynomials and real root
//!   isolation for polynomials in `sqrt(h)`.
//! - [`perturbation`]: the admissible Casimir-compatible perturbation
//!   families and the perturbed vector field.
//! - [`melnikov`]: trigonometric moments, closed-form `I(h)` for both
//!   families, a quadrature oracle and the admissibility filter.
//! - [`verifier`]: adaptive Runge-Kutta integration, Poincare return maps,
//!   cycle location and Casimir drift monitoring.
//! - [`families`]: canned perturbation fields (worked examples, homogeneous
//!   witnesses, random field generators).
//! - [`specfile`]: the JSON perturbation-spec format.

pub mod families;
pub mod melnikov;
pub mod model;
pub mod perturbation;
pub mod polynomial;
pub mod specfile;
pub mod verifier;

pub use model::{InertiaParams, State3};
pub use perturbation::PerturbedSystem;
