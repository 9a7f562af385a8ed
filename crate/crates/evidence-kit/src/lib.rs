//! Executable theory of statistical randomness on finite sample spaces.
//!
//! E-functions score evidence against a hypothesis by their integral
//! (`∫ f dP ≤ 1` under every measure of the hypothesis); p-functions by their
//! lower tail (`P{f ≤ ε} ≤ ε`). This crate makes the calculus of those two
//! scales executable:
//!
//! - [`calibration`] — the p↔e calibrators (power family `κ p^{κ−1}`, the
//!   logarithmic family, and `e ↦ min(1, 1/e)`), with certified admissibility
//!   quadrature.
//! - [`testing`] — membership checks against simple measures and composite
//!   models, including the certified upper envelope over the Bernoulli family
//!   computed in Bernstein form.
//! - [`bayes`] — joint/marginal constructions for Bayesian and para-Bayesian
//!   models, the constructive product decomposition of joint e-functions, and
//!   inf/sup projections.
//! - [`bernoulli`] — Bernoulli/binomial/exchangeable classes on binary
//!   strings, the sin² parameter net with its count partition, and certified
//!   per-N brackets for the best constant relating the binomial and
//!   partition-uniform e-function classes.
//! - [`cli`] — the `evidence-kit` command-line front end.
//!
//! All values live in `[0, ∞]` ([`num::ExtReal`]) and carry their numeric
//! mode: exact rational wherever inputs are rational, binary64 with explicit
//! tolerances where continuous optimization or `sin²` enters. Everything is
//! immutable after construction and safe to share across threads.

pub mod bayes;
pub mod bernoulli;
pub mod bernstein;
pub mod calibration;
pub mod cli;
pub mod error;
pub mod io;
pub mod measure;
pub mod num;
pub mod score;
pub mod simplex;
pub mod space;
pub mod testing;
pub mod verdict;

pub use error::{Error, Result};
pub use measure::{integrate, make_measure, pushforward, Measure};
pub use num::{ExtReal, Mode};
pub use score::{ConditionalScoreFn, ScoreFn};
pub use space::FiniteSpace;
pub use verdict::{Decision, NumericsPolicy, Verdict, Witness};
