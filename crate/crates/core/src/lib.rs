//! Symbolic-numeric toolkit for complex-valued `(λ, μ)`-eigenfunctions on
//! round spheres and the minimal submanifolds cut out by their level sets.
//!
//! The exact layer ([`polycore`], [`parser`], [`calculus`], [`eigen`]) works
//! over Gaussian rationals. The numeric layer ([`geometry`], [`minimality`],
//! [`search`]) samples varieties on the unit sphere and measures mean
//! curvature in `f64`.

pub mod calculus;
pub mod cli;
pub mod eigen;
pub mod error;
pub mod geometry;
pub mod minimality;
pub mod parser;
pub mod polycore;
pub mod search;
pub mod selftest;

pub use error::{Error, FailedCondition, Result};
pub use parser::{parse, render};
pub use polycore::{GaussianRational, Monomial, NumericPolynomial, Polynomial};

/// Seeded generator used for every random draw in the crate.
///
/// Independent work items take `stream = item index`, so parallel runs are
/// reproducible regardless of scheduling.
pub fn seeded_rng(seed: u64, stream: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
