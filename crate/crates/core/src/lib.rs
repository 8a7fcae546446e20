//! Finite (alternating) Euler sums and finite multiple T/S-values modulo primes.
//!
//! The library evaluates four families of finite nested sums
//! (Euler sums `ES`, multiple T-values `T`, multiple S-values `S`, and
//! alternating multiple T-values `AT`) modulo odd primes, generates exact
//! Q-linear relations among them (reversal, linear shuffle, sum formula,
//! homogeneous and low-depth closed forms), and computes ranks of the
//! resulting systems and of sampled per-prime value matrices with exact
//! arithmetic throughout.
//!
//! Modules:
//! - [`modint`]: modular kernels and special constants (Bernoulli and Euler
//!   numbers mod p, Fermat quotients, the finite Catalan constant);
//! - [`wordalg`]: compositions, words over `{e0, e+, e-}`, shuffle products,
//!   the `tau` involution and the series/integral conversions;
//! - [`evaluator`]: per-prime evaluation and cached prime sweeps;
//! - [`relgen`]: relation generators producing exact (possibly
//!   parity-twisted) rational relations;
//! - [`exactla`]: exact rank/kernel computations over Q and prime fields;
//! - [`experiments`]: audit suites, the rational-coefficient fitter, the
//!   dimension pipeline and conjecture monitors.

pub mod error;
pub mod evaluator;
pub mod exactla;
pub mod experiments;
pub mod modint;
pub mod recon;
pub mod relgen;
pub mod wordalg;

pub use error::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
