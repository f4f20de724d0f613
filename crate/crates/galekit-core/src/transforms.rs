//! The dilution transform `f_α`, selection rules with their induced
//! subsequence map `Φ`, the stochasticity (law-of-large-numbers) check, and
//! the sparse-removal construction.
//!
//! All positions in this module are 1-based, matching the block indexing of
//! the dilution layout.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::bitseq::{SequenceSource, Word};
use crate::error::CoreError;
use crate::Q;

// ---------------------------------------------------------------------------
// DilutionPlan
// ---------------------------------------------------------------------------

/// Exact block layout of the dilution transform.
///
/// The diluted sequence is `x₁ y₁ x₂ y₂ ⋯` where `x_n` is the n-th source
/// block with `|x_n| = 2n − 1` (so `|x₁⋯x_n| = n²`) and `y_n = 0^{k_n}` with
///
/// `k_n = ⌈(2n − 1)(1 − α)/α⌉`.
///
/// The pad is proportional to the block just written, which gives the exact
/// sandwich `n²/α ≤ |x₁y₁⋯x_ny_n| ≤ n²/α + n ≤ (n+1)²/α` and hence the
/// dilution factor α. (A pad of `⌈n(1−α)/α⌉` — proportional to the block
/// *index* — would make the interleaving asymptotically `(1+α)/(2α)`-fold
/// and scale dimension by `2α/(1+α)` instead of α, violating both sandwich
/// inequalities; see the design notes.)
#[derive(Debug, Clone)]
pub struct DilutionPlan {
    alpha: Q,
}

impl DilutionPlan {
    pub fn new(alpha: Q) -> Result<Self, CoreError> {
        if alpha <= Q::zero() || alpha >= Q::one() {
            return Err(CoreError::ParameterOutOfRange {
                name: "alpha",
                detail: String::from("dilution requires 0 < alpha < 1"),
            });
        }
        Ok(DilutionPlan { alpha })
    }

    pub fn alpha(&self) -> &Q {
        &self.alpha
    }

    /// `|x_n| = 2n − 1` for block index `n ≥ 1`.
    pub fn block_length(&self, n: u64) -> u64 {
        debug_assert!(n >= 1);
        2 * n - 1
    }

    /// `k_n = ⌈(2n − 1)(1 − α)/α⌉ ≥ 1`, nondecreasing in `n`.
    pub fn pad_length(&self, n: u64) -> u64 {
        debug_assert!(n >= 1);
        let w = Q::from_integer(BigInt::from(2 * n - 1));
        let ratio = (Q::one() - &self.alpha) / &self.alpha;
        let k = (w * ratio).ceil().to_integer();
        k.to_u64().expect("pad length fits in u64")
    }

    /// Output offset (0-based) at which block `x_n` starts: the total
    /// length of `x₁y₁⋯x_{n−1}y_{n−1}`.
    pub fn block_offset(&self, n: u64) -> u64 {
        let mut off = 0u64;
        for m in 1..n {
            off += self.block_length(m) + self.pad_length(m);
        }
        off
    }

    /// Total length of `x₁y₁⋯x_ny_n`.
    pub fn total_length(&self, n: u64) -> u64 {
        self.block_offset(n + 1)
    }

    /// The two proof inequalities, checked exactly:
    /// `total(n−1) ≥ (n−1)²/α` and `total(n) ≤ n²/α + n ≤ (n+1)²/α`.
    pub fn check_proof_inequalities(&self, n: u64) -> bool {
        let q = |v: u64| Q::from_integer(BigInt::from(v));
        let lower_ok = if n >= 1 {
            q(self.total_length(n - 1)) >= q((n - 1) * (n - 1)) / &self.alpha
        } else {
            true
        };
        let total_n = q(self.total_length(n));
        let mid = q(n * n) / &self.alpha + q(n);
        let upper_ok = total_n <= mid && mid <= q((n + 1) * (n + 1)) / &self.alpha;
        lower_ok && upper_ok
    }
}

// ---------------------------------------------------------------------------
// dilute / undilute
// ---------------------------------------------------------------------------

/// Dilutes `source` by interleaving its blocks with zero pads per
/// `DilutionPlan`; lazily computable bit-by-bit.
pub fn dilute(alpha: &Q, source: &SequenceSource) -> Result<SequenceSource, CoreError> {
    let plan = DilutionPlan::new(alpha.clone())?;
    let inner = source.clone();
    let label = format!("dilute(alpha={}, {})", alpha, source.label());
    Ok(SequenceSource::transformed(label, move |n, out| {
        // Count how many source bits the first n output bits consume.
        let mut produced = 0usize;
        let mut needed = 0usize;
        let mut block = 1u64;
        while produced < n {
            let bl = plan.block_length(block) as usize;
            let take = core::cmp::min(bl, n - produced);
            needed += take;
            produced += take;
            if produced >= n {
                break;
            }
            produced += core::cmp::min(plan.pad_length(block) as usize, n - produced);
            block += 1;
        }
        let src = inner.prefix(needed)?;
        let bits = src.bits();
        let mut cursor = 0usize;
        let mut block = 1u64;
        while out.len() < n {
            let bl = plan.block_length(block) as usize;
            for _ in 0..bl {
                if out.len() == n {
                    return Ok(());
                }
                out.push(bits[cursor]);
                cursor += 1;
            }
            let pad = plan.pad_length(block) as usize;
            for _ in 0..pad {
                if out.len() == n {
                    return Ok(());
                }
                out.push(false);
            }
            block += 1;
        }
        Ok(())
    }))
}

/// Extracts the x-blocks from a diluted source; left inverse of `dilute`.
pub fn undilute(alpha: &Q, diluted: &SequenceSource) -> Result<SequenceSource, CoreError> {
    let plan = DilutionPlan::new(alpha.clone())?;
    let inner = diluted.clone();
    let label = format!("undilute(alpha={}, {})", alpha, diluted.label());
    Ok(SequenceSource::transformed(label, move |n, out| {
        // The first n x-bits end inside block m where m² ≥ n; the diluted
        // prefix needed ends at block_offset(m) + (bits of x_m required).
        let mut collected = 0usize;
        let mut diluted_len = 0usize;
        let mut block = 1u64;
        loop {
            let bl = plan.block_length(block) as usize;
            let take = core::cmp::min(bl, n - collected);
            diluted_len += take;
            collected += take;
            if collected == n {
                break;
            }
            diluted_len += plan.pad_length(block) as usize;
            block += 1;
        }
        let prefix = inner.prefix(diluted_len)?;
        let bits = prefix.bits();
        let mut cursor = 0usize;
        let mut block = 1u64;
        while out.len() < n {
            let bl = plan.block_length(block) as usize;
            for _ in 0..bl {
                if out.len() == n {
                    return Ok(());
                }
                out.push(bits[cursor]);
                cursor += 1;
            }
            cursor += plan.pad_length(block) as usize;
            block += 1;
        }
        Ok(())
    }))
}

// ---------------------------------------------------------------------------
// SelectionRule and Φ
// ---------------------------------------------------------------------------

/// A selection rule `φ : words → {0, 1}`, inducing the selected-subsequence
/// map `Φ` by the recursion `Φ(λ) = λ`, `Φ(wi) = Φ(w)i` if `φ(w) = 1`, else
/// `Φ(wi) = Φ(w)`. (The next bit is kept iff the rule accepts the word of
/// bits seen so far, i.e. position `|w| + 1` in 1-based terms.)
#[derive(Clone)]
pub struct SelectionRule {
    name: String,
    select: Arc<dyn Fn(&Word) -> bool + Send + Sync>,
}

impl SelectionRule {
    pub fn new<F>(name: String, select: F) -> Self
    where
        F: Fn(&Word) -> bool + Send + Sync + 'static,
    {
        SelectionRule {
            name,
            select: Arc::new(select),
        }
    }

    /// Keeps every bit.
    pub fn all() -> Self {
        Self::new(String::from("all"), |_| true)
    }

    /// Keeps the next bit when the seen word has even length (1-based
    /// positions 1, 3, 5, …).
    pub fn even_length() -> Self {
        Self::new(String::from("even-length"), |w: &Word| {
            w.len().is_multiple_of(2)
        })
    }

    /// Keeps the next bit when its 1-based position `|w| + 1` is a power of
    /// two.
    pub fn powers_of_two() -> Self {
        Self::new(String::from("powers-of-two"), |w: &Word| {
            let pos = w.len() as u64 + 1;
            pos & (pos - 1) == 0
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn selects(&self, w: &Word) -> bool {
        (self.select)(w)
    }

    /// `Φ(w)` by the defining recursion.
    pub fn phi(&self, w: &Word) -> Word {
        let mut seen = Word::empty();
        let mut out = Word::empty();
        for i in 0..w.len() {
            if self.selects(&seen) {
                out.push(w.bit(i));
            }
            seen.push(w.bit(i));
        }
        out
    }
}

impl core::fmt::Debug for SelectionRule {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "SelectionRule({})", self.name)
    }
}

/// Result of running a selection rule along a source prefix.
#[derive(Debug, Clone)]
pub struct SelectionReport {
    pub selected: Word,
    /// `min over 1 ≤ m ≤ horizon of |Φ(prefix(m))| / m` — a finite check of
    /// the density property `inf |Φ(w)|/|w| > 0`.
    pub min_ratio: Q,
    /// The `m` attaining the minimum (smallest such).
    pub min_at: usize,
    pub horizon: usize,
}

/// Applies `Φ` along `source` up to `horizon`, reporting the selected word
/// and the minimum selection density over all prefixes.
pub fn select_subsequence(
    rule: &SelectionRule,
    source: &SequenceSource,
    horizon: usize,
) -> Result<SelectionReport, CoreError> {
    if horizon < 1 {
        return Err(CoreError::ParameterOutOfRange {
            name: "horizon",
            detail: String::from("selection requires horizon >= 1"),
        });
    }
    let prefix = source.prefix(horizon)?;
    let mut seen = Word::empty();
    let mut selected = Word::empty();
    let mut min_ratio: Option<Q> = None;
    let mut min_at = 1usize;
    for m in 1..=horizon {
        let bit = prefix.bit(m - 1);
        if rule.selects(&seen) {
            selected.push(bit);
        }
        seen.push(bit);
        let ratio = crate::ratio(selected.len() as i64, m as i64);
        if min_ratio.as_ref().is_none_or(|r| &ratio < r) {
            min_ratio = Some(ratio);
            min_at = m;
        }
    }
    Ok(SelectionReport {
        selected,
        min_ratio: min_ratio.expect("horizon >= 1"),
        min_at,
        horizon,
    })
}

// ---------------------------------------------------------------------------
// Stochasticity check
// ---------------------------------------------------------------------------

/// Verdict of the law-of-large-numbers check on a selected word.
#[derive(Debug, Clone)]
pub struct StochasticityVerdict {
    pub pass: bool,
    /// Exact frequency of ones.
    pub frequency: Q,
    /// Exact deviation `|frequency − 1/2|`.
    pub deviation: Q,
    pub tolerance: Q,
}

/// Passes iff the frequency of ones deviates from 1/2 by at most
/// `tolerance`, all arithmetic exact.
pub fn stochasticity_check(
    selected: &Word,
    tolerance: &Q,
) -> Result<StochasticityVerdict, CoreError> {
    if selected.is_empty() {
        return Err(CoreError::EmptyWord);
    }
    let frequency = crate::ratio(selected.count_ones() as i64, selected.len() as i64);
    let deviation = (frequency.clone() - crate::ratio(1, 2)).abs();
    Ok(StochasticityVerdict {
        pass: &deviation <= tolerance,
        frequency,
        deviation,
        tolerance: tolerance.clone(),
    })
}

// ---------------------------------------------------------------------------
// remove_sparse
// ---------------------------------------------------------------------------

/// A decidable set of 1-based positions.
#[derive(Clone)]
pub struct PositionSet {
    name: String,
    contains: Arc<dyn Fn(u64) -> bool + Send + Sync>,
}

impl PositionSet {
    pub fn new<F>(name: String, contains: F) -> Self
    where
        F: Fn(u64) -> bool + Send + Sync + 'static,
    {
        PositionSet {
            name,
            contains: Arc::new(contains),
        }
    }

    /// `D = {2^n : n ≥ 0}` — the exponentially sparse domain.
    pub fn powers_of_two() -> Self {
        Self::new(String::from("powers-of-two"), |pos| {
            pos >= 1 && pos & (pos - 1) == 0
        })
    }

    pub fn empty() -> Self {
        Self::new(String::from("empty"), |_| false)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn contains(&self, pos: u64) -> bool {
        (self.contains)(pos)
    }
}

impl core::fmt::Debug for PositionSet {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "PositionSet({})", self.name)
    }
}

/// Forces the bits at the listed (1-based) positions to 0, reading `A − D`
/// as a set difference of characteristic sequences. No positions are
/// deleted.
pub fn remove_sparse(source: &SequenceSource, positions: &PositionSet) -> SequenceSource {
    let inner = source.clone();
    let pos = positions.clone();
    let label = format!("remove-sparse({}, {})", positions.name(), source.label());
    SequenceSource::transformed(label, move |n, out| {
        let prefix = inner.prefix(n)?;
        for i in 0..n {
            let p = i as u64 + 1;
            out.push(if pos.contains(p) {
                false
            } else {
                prefix.bit(i)
            });
        }
        Ok(())
    })
}
