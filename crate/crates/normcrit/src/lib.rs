//! # normcrit
//!
//! A desk-scale numerical laboratory for normalized solutions of a
//! two-component Schrödinger system with Sobolev-critical coupling,
//!
//! ```text
//!   −Δu + λ₁u = μ₁|u|^{p−2}u + να|u|^{α−2}u|v|^β,
//!   −Δv + λ₂v = μ₂|v|^{q−2}v + νβ|v|^{β−2}v|u|^α,      in ℝ^N, N ≥ 3,
//!   ∫u² = a,  ∫v² = b,
//! ```
//!
//! with mass-subcritical powers 2 < p, q < 2 + 4/N and critical coupling
//! α + β = 2N/(N−2). The multipliers λ₁, λ₂ are unknowns determined by the
//! mass constraints. The crate computes the two positive radial solutions
//! this regime supports — a local minimizer inside a kinetic-energy ball
//! and a mountain-pass solution above it — and machine-checks the
//! quantitative facts the construction rests on: threshold formulas,
//! energy-level windows below the compactness-loss ceiling, bubble
//! asymptotics, and the elementary inequalities used by the analysis.
//!
//! Modules, bottom to top:
//!
//! * [`grid`] — graded radial meshes, quadrature, dilation, decay checks;
//! * [`linalg`] — banded symmetric/general factorizations and bordered
//!   (constrained) solves;
//! * [`functionals`] — energy, Pohozaev functional, fiber expansion,
//!   multipliers, Sobolev and Gagliardo–Nirenberg constants;
//! * [`scalar`] — single-component ground states and the GN bootstrap;
//! * [`localmin`] — thresholds ρ₀, ν₀, k₀ and the constrained local
//!   minimizer, plus the coupling-strength sweep;
//! * [`bubble`] — truncated extremal bubbles, test pairs, and the
//!   mountain-pass level window;
//! * [`mountain`] — fiber projection onto the unstable branch and the
//!   mountain-pass solver;
//! * [`rearrange`] — coupled radial rearrangement and its inequalities;
//! * [`scans`] — randomized oracles for the scalar inequalities the
//!   analysis uses;
//! * [`config`], [`run`] — flat-file configuration and the reproducible
//!   run harness behind the `normcrit` binary.
//!
//! The `examples/` directory exercises every capability end to end; start
//! with `cargo run --release --example constants_bootstrap`.

pub mod bubble;
pub mod config;
pub mod functionals;
pub mod grid;
pub mod linalg;
pub mod localmin;
pub mod mountain;
pub mod rearrange;
pub mod run;
pub mod scalar;
pub mod scans;
