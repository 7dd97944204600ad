//! Finite-variation laboratory for stationary increment mixed moving average
//! (SIMMA) processes driven by infinitely divisible noise.
//!
//! A SIMMA process is the stochastic integral
//! `X_t = ∫ (f(t-s, v) - f0(-s, v)) W(ds, dv)` of a kernel pair against an
//! independently scattered random measure `W` with characteristic triplet
//! `(θ(v), σ²(v), ρ_v)` over a mixing space `V`. This crate decides, from the
//! analytic side, whether the sample paths of such a process have finite
//! variation on `[0, 1]`, and cross-validates those verdicts by simulating
//! paths on dyadic grids and estimating their total variation by Monte Carlo.
//!
//! The crate is organized mirroring that split:
//!
//! * [`noise`] — parametric Lévy-measure families and their tail/moment
//!   functionals (`ξ`, moment ratios, infinite-variation tests).
//! * [`kernels`] — kernel sections, derivatives, section BV norms on dyadic
//!   grids, and the uniform shifted-section bound `k*`.
//! * [`numerics`] — adaptive quadrature with singularity handling, divergence
//!   detection, dyadic-grid utilities, deterministic seeding.
//! * [`criteria`] — the decision layer: sufficiency integrals `C_f`/`D_f`,
//!   necessity integrals, existence check, expected-BV bound, verdicts and
//!   zero-one-law classification.
//! * [`simulate`] — path synthesis (compound Poisson superposition, Gaussian
//!   grid convolution, shot-noise series for stable and tempered stable
//!   noise) and the Monte Carlo estimators confronting the criteria.
//! * [`config`] / [`report`] — the JSON configuration schema and the
//!   machine-readable reports used by the CLI.
//! * [`identities`] — the closed-form-versus-quadrature battery behind the
//!   `identities` subcommand.
//! * [`catalog`] — the canonical reference models behind the `table`
//!   subcommand.
//!
//! The mixing space is always a finite discrete set: each component carries a
//! positive weight, a drift, a Gaussian variance, an optional Lévy measure and
//! a kernel pair. Continuous mixing must be pre-discretized by the caller.

pub mod catalog;
pub mod config;
pub mod criteria;
pub mod identities;
pub mod kernels;
pub mod noise;
pub mod numerics;
pub mod report;
pub mod simulate;

pub use criteria::{MixedModel, Verdict, VerdictStatus};
pub use kernels::{Kernel, KernelPair};
pub use noise::{LevyMeasure, MixedNoise, NoiseComponent};
pub use numerics::SeedSpec;
pub use simulate::{PathSample, SimPlan};
