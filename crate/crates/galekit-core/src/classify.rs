//! Bounded-quantifier membership evaluators for the dimension classes
//! `DIM^{≤α}`, `DIM^{≥α}`, `DIM_str^{≤α}`, `DIM_str^{≥α}`, and a generic
//! evaluator for bounded hierarchy formulas.
//!
//! Every verdict is bound-relative: quantifiers are truncated to supplied
//! finite bounds, so the evaluator demonstrates the *shape* of the defining
//! formulas rather than deciding true membership (which is infinitary).

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::One;

use crate::bitseq::SequenceSource;
use crate::complexity::ComplexityModel;
use crate::error::CoreError;
use crate::gales::{order_success, standard_order, MixtureSupermartingale, Order, Value};
use crate::{ratio, Q};

// ---------------------------------------------------------------------------
// ApproxReal
// ---------------------------------------------------------------------------

/// A real given by a computable rational approximant `n ↦ α̂(n)`; the
/// evaluator only ever reads finitely many approximant values.
#[derive(Clone)]
pub struct ApproxReal {
    label: String,
    approx: Arc<dyn Fn(u64) -> Q + Send + Sync>,
}

impl ApproxReal {
    pub fn from_fn<F>(label: String, approx: F) -> Self
    where
        F: Fn(u64) -> Q + Send + Sync + 'static,
    {
        ApproxReal {
            label,
            approx: Arc::new(approx),
        }
    }

    /// The constant approximant of a rational.
    pub fn constant(q: Q) -> Self {
        let label = alloc::format!("{q}");
        Self::from_fn(label, move |_| q.clone())
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn value(&self, n: u64) -> Q {
        (self.approx)(n)
    }
}

impl core::fmt::Debug for ApproxReal {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "ApproxReal({})", self.label)
    }
}

// ---------------------------------------------------------------------------
// HierarchyFormula
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuantKind {
    ForAll,
    Exists,
}

/// Classification of the kernel predicate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    /// Total and decided directly.
    Decidable,
    /// Holds via a bounded existential search (e.g. for a short codeword).
    EnumerableBounded,
    /// Fails via a bounded existential search.
    CoEnumerableBounded,
}

/// Evaluation context handed to kernels: a materialized source prefix and,
/// when the formula requests it, the exact code-length table of all its
/// prefixes.
pub struct EvalContext {
    bits: Vec<bool>,
    code_lengths: Option<Vec<u32>>,
}

impl EvalContext {
    /// Builds a context directly from prefix bits, mainly so callers can
    /// cross-check kernels with an independent evaluator.
    pub fn new(bits: Vec<bool>, code_lengths: Option<Vec<u32>>) -> Self {
        Self { bits, code_lengths }
    }

    /// The first `n` source bits (`n` within the materialized prefix).
    pub fn prefix(&self, n: usize) -> &[bool] {
        &self.bits[..n]
    }

    pub fn prefix_len(&self) -> usize {
        self.bits.len()
    }

    /// `C(A↾n)` from the precomputed table.
    pub fn code_length(&self, n: usize) -> u32 {
        self.code_lengths
            .as_ref()
            .expect("formula did not request code lengths")[n]
    }
}

/// A quantifier prefix over natural variables `k_m, …, k_1` with a kernel
/// predicate `P(k_m, …, k_1, context)`; the innermost variable conventionally
/// indexes a source prefix.
/// Shared kernel predicate: takes the bound variable values (outermost first)
/// and the evaluation context.
pub type KernelFn = Arc<dyn Fn(&[u64], &EvalContext) -> Result<bool, CoreError> + Send + Sync>;

#[derive(Clone)]
pub struct HierarchyFormula {
    name: String,
    quantifiers: Vec<QuantKind>,
    kernel_kind: KernelKind,
    needs_code_lengths: bool,
    kernel: KernelFn,
}

impl HierarchyFormula {
    pub fn new<F>(
        name: String,
        quantifiers: Vec<QuantKind>,
        kernel_kind: KernelKind,
        needs_code_lengths: bool,
        kernel: F,
    ) -> Result<Self, CoreError>
    where
        F: Fn(&[u64], &EvalContext) -> Result<bool, CoreError> + Send + Sync + 'static,
    {
        if quantifiers.is_empty() {
            return Err(CoreError::Precondition {
                detail: String::from("quantifier prefix must be nonempty"),
            });
        }
        Ok(HierarchyFormula {
            name,
            quantifiers,
            kernel_kind,
            needs_code_lengths,
            kernel: Arc::new(kernel),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn quantifiers(&self) -> &[QuantKind] {
        &self.quantifiers
    }

    /// Evaluates the kernel at a full variable assignment.
    pub fn eval_kernel(&self, vars: &[u64], ctx: &EvalContext) -> Result<bool, CoreError> {
        (self.kernel)(vars, ctx)
    }

    pub fn kernel_kind(&self) -> KernelKind {
        self.kernel_kind
    }
}

impl core::fmt::Debug for HierarchyFormula {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(
            f,
            "HierarchyFormula({}, {:?}, {:?})",
            self.name, self.quantifiers, self.kernel_kind
        )
    }
}

/// Three-valued bound-relative verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    HoldsAtBounds,
    FailsAtBounds,
    KernelTimeout,
}

/// Verdict plus the decisive assignment: for each quantifier along the
/// deciding path, the witness (for a deciding ∃) or refuter (for a
/// deciding ∀).
#[derive(Debug, Clone)]
pub struct EvalReport {
    pub verdict: Verdict,
    pub deciding: Vec<u64>,
}

enum Three {
    True(Vec<u64>),
    False(Vec<u64>),
    Timeout,
}

fn eval_rec(
    formula: &HierarchyFormula,
    ctx: &EvalContext,
    bounds: &[u64],
    vars: &mut Vec<u64>,
) -> Three {
    let depth = vars.len();
    if depth == formula.quantifiers.len() {
        return match (formula.kernel)(vars, ctx) {
            Ok(true) => Three::True(Vec::new()),
            Ok(false) => Three::False(Vec::new()),
            Err(_) => Three::Timeout,
        };
    }
    let q = formula.quantifiers[depth];
    for k in 1..=bounds[depth] {
        vars.push(k);
        let sub = eval_rec(formula, ctx, bounds, vars);
        vars.pop();
        match (q, sub) {
            (_, Three::Timeout) => return Three::Timeout,
            (QuantKind::Exists, Three::True(mut path)) => {
                path.insert(0, k);
                return Three::True(path);
            }
            (QuantKind::ForAll, Three::False(mut path)) => {
                path.insert(0, k);
                return Three::False(path);
            }
            _ => {}
        }
    }
    match q {
        QuantKind::Exists => Three::False(Vec::new()),
        QuantKind::ForAll => Three::True(Vec::new()),
    }
}

/// Evaluates `formula` on `source` with every quantifier truncated to its
/// bound (variables range over `1..=bound`).
pub fn eval_bounded(
    formula: &HierarchyFormula,
    source: &SequenceSource,
    bounds: &[u64],
) -> Result<EvalReport, CoreError> {
    if bounds.len() != formula.quantifiers.len() {
        return Err(CoreError::BoundsMismatch {
            expected: formula.quantifiers.len(),
            got: bounds.len(),
        });
    }
    if bounds.iter().any(|&b| b < 1) {
        return Err(CoreError::ParameterOutOfRange {
            name: "bounds",
            detail: String::from("every quantifier bound must be >= 1"),
        });
    }
    let max_prefix = *bounds.iter().max().expect("nonempty") as usize;
    let prefix = source.prefix(max_prefix)?;
    let bits = prefix.bits().to_vec();
    let code_lengths = if formula.needs_code_lengths {
        Some(ComplexityModel::v1().code_lengths_of_prefixes(&bits))
    } else {
        None
    };
    let ctx = EvalContext { bits, code_lengths };
    let mut vars = Vec::new();
    Ok(match eval_rec(formula, &ctx, bounds, &mut vars) {
        Three::True(path) => EvalReport {
            verdict: Verdict::HoldsAtBounds,
            deciding: path,
        },
        Three::False(path) => EvalReport {
            verdict: Verdict::FailsAtBounds,
            deciding: path,
        },
        Three::Timeout => EvalReport {
            verdict: Verdict::KernelTimeout,
            deciding: Vec::new(),
        },
    })
}

/// Default bound profile `(k, N, n) = (4, 64, 4096)` for the dimension
/// formulas. `N = 64` leaves room for the tail quantifier to skip the
/// short prefixes whose code lengths are dominated by header overhead.
pub fn default_bounds() -> [u64; 3] {
    [4, 64, 4096]
}

// ---------------------------------------------------------------------------
// Dimension-class formulas
// ---------------------------------------------------------------------------

fn q_of(n: u64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// `DIM^{≤α}` as a Π⁰₂ formula:
/// `(∀k)(∀N)(∃n ≥ N)  C(A↾n) < (α̂(n) + 1/k)·n`.
pub fn dim_le_formula(alpha: &ApproxReal) -> HierarchyFormula {
    let alpha = alpha.clone();
    HierarchyFormula::new(
        alloc::format!("dim<={}", alpha.label()),
        alloc::vec![QuantKind::ForAll, QuantKind::ForAll, QuantKind::Exists],
        KernelKind::Decidable,
        true,
        move |vars: &[u64], ctx: &EvalContext| {
            let (k, cap_n, n) = (vars[0], vars[1], vars[2]);
            if n < cap_n {
                return Ok(false);
            }
            let c = q_of(ctx.code_length(n as usize) as u64);
            Ok(c < (alpha.value(n) + ratio(1, k as i64)) * q_of(n))
        },
    )
    .expect("static formula")
}

/// `DIM^{≥α}` as a Π⁰₃ formula:
/// `(∀k)(∃N)(∀n ≥ N)  C(A↾n) > (α̂(N) − 1/k)·n`.
pub fn dim_ge_formula(alpha: &ApproxReal) -> HierarchyFormula {
    let alpha = alpha.clone();
    HierarchyFormula::new(
        alloc::format!("dim>={}", alpha.label()),
        alloc::vec![QuantKind::ForAll, QuantKind::Exists, QuantKind::ForAll],
        KernelKind::Decidable,
        true,
        move |vars: &[u64], ctx: &EvalContext| {
            let (k, cap_n, n) = (vars[0], vars[1], vars[2]);
            if n < cap_n {
                return Ok(true);
            }
            let c = q_of(ctx.code_length(n as usize) as u64);
            Ok(c > (alpha.value(cap_n) - ratio(1, k as i64)) * q_of(n))
        },
    )
    .expect("static formula")
}

/// The two strong-dimension formulas.
///
/// `DIM_str^{≤α}`: `(∀k)(∃N)(∀n ≥ N) (∃⟨π,t⟩) |π| < (α̂(N) + 1/k)·n` — the
/// inner existential over programs is local to the kernel and realized as a
/// bounded codeword search: since the code-length table is the exact
/// minimum over all codewords, the bounded search for a codeword shorter
/// than the threshold succeeds iff `C(A↾n)` is below it (kernel kind
/// `EnumerableBounded`).
///
/// `DIM_str^{≥α}`: `(∀k)(∀N)(∃n ≥ N)  C(A↾n) > (α̂(n) − 1/k)·n` (kernel kind
/// `CoEnumerableBounded`).
pub fn dimstr_formulas(alpha: &ApproxReal) -> (HierarchyFormula, HierarchyFormula) {
    let a1 = alpha.clone();
    let le = HierarchyFormula::new(
        alloc::format!("dimstr<={}", alpha.label()),
        alloc::vec![QuantKind::ForAll, QuantKind::Exists, QuantKind::ForAll],
        KernelKind::EnumerableBounded,
        true,
        move |vars: &[u64], ctx: &EvalContext| {
            let (k, cap_n, n) = (vars[0], vars[1], vars[2]);
            if n < cap_n {
                return Ok(true);
            }
            let c = q_of(ctx.code_length(n as usize) as u64);
            Ok(c < (a1.value(cap_n) + ratio(1, k as i64)) * q_of(n))
        },
    )
    .expect("static formula");
    let a2 = alpha.clone();
    let ge = HierarchyFormula::new(
        alloc::format!("dimstr>={}", alpha.label()),
        alloc::vec![QuantKind::ForAll, QuantKind::ForAll, QuantKind::Exists],
        KernelKind::CoEnumerableBounded,
        true,
        move |vars: &[u64], ctx: &EvalContext| {
            let (k, cap_n, n) = (vars[0], vars[1], vars[2]);
            if n < cap_n {
                return Ok(false);
            }
            let c = q_of(ctx.code_length(n as usize) as u64);
            Ok(c > (a2.value(n) - ratio(1, k as i64)) * q_of(n))
        },
    )
    .expect("static formula");
    (le, ge)
}

// ---------------------------------------------------------------------------
// cdim catalog estimate
// ---------------------------------------------------------------------------

/// Catalog/horizon-relative upper proxy for constructive dimension: the
/// least grid `s` such that the catalog mixture order-succeeds against
/// `h_s(n) = 2^{(1−s)n}` within the horizon, or 1 if no grid point is
/// witnessed.
///
/// Success against an order is an infinitely-often condition, so a witness
/// only counts if it occurs in the tail window `[horizon/2, horizon]`;
/// early crossings at tiny `n` (where `h_s(n)` is still close to 1) are
/// transient and say nothing about the limit behavior.
pub fn cdim_catalog_estimate(
    source: &SequenceSource,
    mixture: &MixtureSupermartingale,
    s_grid: &[Q],
    horizon: usize,
) -> Result<Q, CoreError> {
    let one = Q::one();
    for pair in s_grid.windows(2) {
        if pair[0] >= pair[1] {
            return Err(CoreError::ParameterOutOfRange {
                name: "s_grid",
                detail: String::from("grid must be strictly ascending"),
            });
        }
    }
    if let (Some(first), Some(last)) = (s_grid.first(), s_grid.last()) {
        if first <= &num_traits::Zero::zero() || last > &one {
            return Err(CoreError::ParameterOutOfRange {
                name: "s_grid",
                detail: String::from("grid points must lie in (0, 1]"),
            });
        }
    }
    let process = mixture.as_process();
    for s in s_grid {
        let order = if s < &one {
            standard_order(s)?
        } else {
            // h_1 ≡ 1: success means the capital ever reaches 1.
            Order::from_fn("h_1", |_| Value::one())
        };
        let report = order_success(&process, &order, source, horizon)?;
        let tail_start = core::cmp::max(1, horizon / 2);
        if report.witnessed && report.largest_witness.is_some_and(|n| n >= tail_start) {
            return Ok(s.clone());
        }
    }
    Ok(one)
}

/// The shipped estimation grid `{1/20, 2/20, …, 19/20}`.
pub fn default_s_grid() -> Vec<Q> {
    (1..20).map(|i| ratio(i, 20)).collect()
}
