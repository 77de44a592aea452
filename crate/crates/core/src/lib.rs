//! Numerical laboratory for two-prover non-local games with quantum
//! strategies.
//!
//! The crate simulates k-round games exactly at desk scale, compiles
//! arbitrary shared-state strategies into ones backed only by an
//! embezzlement catalyst (with a quantified value loss), and rewrites prover
//! circuits into a fixed programmable dispatch form.
//!
//! Module map:
//! - [`qlin`]: dense complex linear algebra, states, POVMs, distances.
//! - [`embezzle`]: the embezzlement state family, structured top-product
//!   selection, closed-form fidelity, and the local embezzling unitaries.
//! - [`games`]: classical-entangled and circuit-model games, exact value
//!   computation, built-in CHSH and magic-square instances.
//! - [`optimize`]: see-saw ascent over fixed-dimension strategies.
//! - [`transform`]: strategy compilation onto embezzlement catalysts and the
//!   value-loss bound check.
//! - [`synth`]: the programmable dispatch circuit, gate-program search, and
//!   end-to-end universal-form compilation.

pub mod config;
pub mod embezzle;
pub mod error;
pub mod games;
pub mod optimize;
pub mod qlin;
pub mod synth;
pub mod transform;

pub use config::{Tolerances, DEFAULT_DENSE_CAP};
pub use error::{Error, Result};
