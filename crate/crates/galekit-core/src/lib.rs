//! Core algorithms for a constructive-dimension laboratory: finite words and
//! lazy binary sequences, exact-rational martingales and s-gales, a total
//! prefix-free complexity model with dimension estimators, the dilution
//! transform, selection rules, Martin-Löf/Schnorr test objects, stage-wise
//! reduction transducers, and bounded-quantifier class evaluators.
//!
//! The crate is `no_std` (with `alloc`); all IO, file formats, and the CLI
//! live in the companion `galekit` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod bitseq;
pub mod classify;
pub mod complexity;
pub mod error;
pub mod gales;
pub mod randtest;
pub mod reductions;
pub mod transforms;

pub use error::CoreError;

/// Exact rational scalar used throughout the crate.
pub type Q = num_rational::BigRational;

use num_bigint::BigInt;

/// Convenience constructor for an exact rational from an integer pair.
pub fn ratio(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

/// 2^(-e) as an exact rational.
pub fn pow2_neg(e: u64) -> Q {
    let mut den = BigInt::from(1u8);
    den <<= e;
    Q::new(BigInt::from(1u8), den)
}

/// 2^e as an exact rational.
pub fn pow2(e: u64) -> Q {
    let mut num = BigInt::from(1u8);
    num <<= e;
    Q::from_integer(num)
}
