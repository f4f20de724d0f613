//! Error types shared by the core modules.

use alloc::string::String;
use core::fmt;

/// Errors raised by core operations.
///
/// Every fallible operation in this crate reports one of these variants;
/// IO-level errors live in the companion `galekit` crate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoreError {
    /// A finite (explicit or file-backed) source was asked for more bits
    /// than it holds.
    Truncated { requested: usize, available: usize },
    /// A rational parameter fell outside its domain (e.g. `alpha` outside
    /// `(0, 1)`).
    ParameterOutOfRange { name: &'static str, detail: String },
    /// `standard_order` was asked for `s >= 1`, which would not be unbounded.
    OrderNotUnbounded,
    /// A process evaluated to a negative value.
    NegativeValue { context: String },
    /// A mixture component is not normalized to value 1 at the empty word.
    NotNormalized { index: usize },
    /// A cylinder-family construction cannot reach the requested measure.
    InfeasibleMeasure { detail: String },
    /// An operation that needs a nonempty word received the empty word.
    EmptyWord,
    /// A level oracle violated the required anti-monotonicity in `s`.
    AntiMonotone { k: u64, s: u64 },
    /// `pi2_dense_witness` found no extension within budget at a level.
    DensityViolated { level: u64 },
    /// A bounded formula evaluation received the wrong number of bounds.
    BoundsMismatch { expected: usize, got: usize },
    /// Precondition violation not covered by a more specific variant.
    Precondition { detail: String },
}

impl fmt::Display for CoreError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoreError::Truncated {
                requested,
                available,
            } => write!(
                f,
                "source truncated: requested {requested} bits, only {available} available"
            ),
            CoreError::ParameterOutOfRange { name, detail } => {
                write!(f, "parameter `{name}` out of range: {detail}")
            }
            CoreError::OrderNotUnbounded => {
                write!(
                    f,
                    "order parameter s must satisfy 0 <= s < 1 for unboundedness"
                )
            }
            CoreError::NegativeValue { context } => {
                write!(f, "process produced a negative value at {context}")
            }
            CoreError::NotNormalized { index } => {
                write!(
                    f,
                    "mixture component {index} is not normalized to 1 at the empty word"
                )
            }
            CoreError::InfeasibleMeasure { detail } => {
                write!(f, "infeasible measure request: {detail}")
            }
            CoreError::EmptyWord => write!(f, "operation requires a nonempty word"),
            CoreError::AntiMonotone { k, s } => write!(
                f,
                "level oracle violates anti-monotonicity at k={k}, s={s}: contains(k,{},w) \
                 holds without contains(k,{s},w)",
                s + 1
            ),
            CoreError::DensityViolated { level } => {
                write!(
                    f,
                    "density-violated-at-budget: no extension at level {level}"
                )
            }
            CoreError::BoundsMismatch { expected, got } => {
                write!(f, "expected {expected} quantifier bounds, got {got}")
            }
            CoreError::Precondition { detail } => write!(f, "precondition violated: {detail}"),
        }
    }
}

impl core::error::Error for CoreError {}
