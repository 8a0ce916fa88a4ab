//! # wolbdyn
//!
//! Deterministic models of a vertically transmitted, cytoplasmic-
//! incompatibility-inducing endosymbiont invading a host population:
//!
//! - [`models`] — scaled single-strain and two-strain ODE vector fields,
//!   with presets for the compatible, mutually incompatible, and
//!   double-infection variants, plus a fecundity-cost variant.
//! - [`equilibria`] — closed-form equilibria, Jacobian eigenvalue
//!   classification, the `(xi, tau, q)` region map, the continuum family of
//!   the compatible system, the persistence threshold in the transmission
//!   efficacy, and saddle separatrix tracing.
//! - [`odeint`] — an adaptive embedded Runge-Kutta 5(4) integrator with
//!   convergence detection, deterministic to the bit.
//! - [`agestruct`] — the age-structured variant: transport simulation along
//!   characteristics, steady-state solvers, the characteristic function of
//!   the linearisation, and stability criteria.
//! - [`cli`] — config-driven scenario runs emitting reproducible CSV/JSON,
//!   exposed by the `wolbdyn` binary.
//!
//! Every computation is pure and deterministic: identical inputs give
//! bitwise identical outputs, with no global state. See the `examples/`
//! directory for one runnable walkthrough per capability.

pub mod agestruct;
pub mod cli;
pub mod equilibria;
pub mod error;
pub mod models;
pub mod odeint;

mod numerics;

pub use error::{Error, Result};
