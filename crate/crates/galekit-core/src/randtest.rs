//! Martin-Löf and Schnorr test objects with exact measures, and
//! finite-horizon randomness verdicts against the shipped martingale
//! catalog.
//!
//! Tests are finite objects: levels are materialized cylinder families up
//! to a depth limit (default 20), and every verdict is horizon-relative.
//! Catalog-consistency makes no claim of genuine randomness.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use num_traits::One;

use crate::bitseq::{member, CylinderFamily, SequenceSource, Word};
use crate::error::CoreError;
use crate::gales::{catalog, Value};
use crate::{pow2_neg, Q};

/// Default depth limit for materialized test levels.
pub const DEFAULT_DEPTH_LIMIT: u32 = 20;

/// Default capital budget for catalog verdicts: 2^20.
pub fn default_budget() -> Q {
    crate::pow2(20)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestKind {
    /// Levels satisfy `μ(U_i) ≤ 2^(−i)`.
    MartinLof,
    /// Levels satisfy `μ(U_i) = 2^(−i)` exactly.
    Schnorr,
}

/// A randomness test: a level map `i ↦ U_i` validated against the kind's
/// measure invariant on materialization, up to a depth limit.
#[derive(Clone)]
pub struct TestFamily {
    kind: TestKind,
    depth_limit: u32,
    levels: Arc<dyn Fn(u32) -> Result<CylinderFamily, CoreError> + Send + Sync>,
}

impl TestFamily {
    pub fn new<F>(kind: TestKind, depth_limit: u32, levels: F) -> Self
    where
        F: Fn(u32) -> Result<CylinderFamily, CoreError> + Send + Sync + 'static,
    {
        TestFamily {
            kind,
            depth_limit,
            levels: Arc::new(levels),
        }
    }

    pub fn kind(&self) -> TestKind {
        self.kind
    }

    pub fn depth_limit(&self) -> u32 {
        self.depth_limit
    }

    /// Materializes level `i`, enforcing the measure invariant exactly.
    pub fn level(&self, i: u32) -> Result<CylinderFamily, CoreError> {
        if i > self.depth_limit {
            return Err(CoreError::ParameterOutOfRange {
                name: "level",
                detail: format!("level {i} exceeds depth limit {}", self.depth_limit),
            });
        }
        let fam = (self.levels)(i)?;
        let bound = pow2_neg(i as u64);
        let ok = match self.kind {
            TestKind::MartinLof => fam.measure() <= &bound,
            TestKind::Schnorr => fam.measure() == &bound,
        };
        if !ok {
            return Err(CoreError::InfeasibleMeasure {
                detail: format!(
                    "level {i} has measure {} against requirement {} 2^-{i}",
                    fam.measure(),
                    if self.kind == TestKind::Schnorr {
                        "="
                    } else {
                        "<="
                    },
                ),
            });
        }
        Ok(fam)
    }
}

impl core::fmt::Debug for TestFamily {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(
            f,
            "TestFamily(kind={:?}, depth_limit={})",
            self.kind, self.depth_limit
        )
    }
}

/// Carves a sub-family of `[w]` of exact dyadic measure `target ≤ 2^(−|w|)`
/// by leftmost descent.
fn carve(w: &Word, target: &Q, out: &mut Vec<Word>) {
    if target == &pow2_neg(w.len() as u64) {
        out.push(w.clone());
        return;
    }
    debug_assert!(target < &pow2_neg(w.len() as u64));
    let half = pow2_neg(w.len() as u64 + 1);
    let left = if target < &half {
        target.clone()
    } else {
        half.clone()
    };
    if !num_traits::Zero::is_zero(&left) {
        carve(&w.child(false), &left, out);
    }
    let rest = target - &left;
    if !num_traits::Zero::is_zero(&rest) {
        carve(&w.child(true), &rest, out);
    }
}

/// Builds a cylinder family of exact measure `2^(−i)` from the seed words,
/// trimming or taking sub-cylinders deterministically (leftmost-first in
/// the normalized generator order).
pub fn make_schnorr_level(i: u32, seeds: &[Word]) -> Result<CylinderFamily, CoreError> {
    let normalized = CylinderFamily::from_generators(seeds.to_vec());
    let target = pow2_neg(i as u64);
    if normalized.measure() < &target {
        return Err(CoreError::InfeasibleMeasure {
            detail: format!("seed words cover measure {} < 2^-{i}", normalized.measure()),
        });
    }
    let mut remaining = target;
    let mut chosen: Vec<Word> = Vec::new();
    for w in normalized.generators() {
        if num_traits::Zero::is_zero(&remaining) {
            break;
        }
        let mu = w.cylinder_measure();
        if mu <= remaining {
            chosen.push(w.clone());
            remaining -= mu;
        } else {
            carve(w, &remaining, &mut chosen);
            remaining = Q::from_integer(num_bigint::BigInt::from(0));
        }
    }
    let fam = CylinderFamily::from_generators(chosen);
    debug_assert_eq!(fam.measure(), &pow2_neg(i as u64));
    Ok(fam)
}

/// Deepest level `i ≤ max_level` whose cylinder family contains the source,
/// or `None`.
pub fn test_membership(
    family: &TestFamily,
    source: &SequenceSource,
    max_level: u32,
) -> Result<Option<u32>, CoreError> {
    if max_level > family.depth_limit() {
        return Err(CoreError::ParameterOutOfRange {
            name: "max_level",
            detail: format!(
                "max_level {max_level} exceeds depth limit {}",
                family.depth_limit()
            ),
        });
    }
    for i in (0..=max_level).rev() {
        let fam = family.level(i)?;
        if member(&fam, source)? {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

// ---------------------------------------------------------------------------
// Catalog verdicts
// ---------------------------------------------------------------------------

/// Per-martingale outcome of a finite-horizon catalog run.
#[derive(Debug, Clone)]
pub struct MartingaleVerdict {
    pub name: String,
    /// `max over n ≤ horizon of d(prefix(n))`, exact.
    pub max_value: Value,
    /// Least `n` attaining the maximum.
    pub max_at: usize,
    /// True iff `max_value ≥ budget`.
    pub rejected: bool,
}

/// Horizon-relative randomness report against the shipped catalog.
#[derive(Debug, Clone)]
pub struct CatalogVerdictReport {
    pub verdicts: Vec<MartingaleVerdict>,
    /// True iff no catalog martingale reached the budget.
    pub catalog_consistent: bool,
    pub horizon: usize,
    pub budget: Q,
}

/// Runs every catalog martingale along the source to `horizon`; a
/// martingale rejects iff its capital reaches `budget`.
pub fn catalog_random_verdict(
    source: &SequenceSource,
    horizon: usize,
    budget: &Q,
) -> Result<CatalogVerdictReport, CoreError> {
    if horizon < 1 {
        return Err(CoreError::ParameterOutOfRange {
            name: "horizon",
            detail: String::from("verdict requires horizon >= 1"),
        });
    }
    if budget < &Q::one() {
        return Err(CoreError::ParameterOutOfRange {
            name: "budget",
            detail: String::from("budget must be >= 1"),
        });
    }
    let prefix = source.prefix(horizon)?;
    let budget_v = Value::from_rational(budget.clone());
    let mut verdicts = Vec::new();
    for p in catalog() {
        let mut stepper = p.stepper();
        let mut max_value = stepper.value();
        let mut max_at = 0usize;
        for n in 1..=horizon {
            stepper.step(prefix.bit(n - 1));
            let v = stepper.value();
            if v.cmp_exact(&max_value) == core::cmp::Ordering::Greater {
                max_value = v;
                max_at = n;
            }
        }
        let rejected = max_value.cmp_exact(&budget_v) != core::cmp::Ordering::Less;
        verdicts.push(MartingaleVerdict {
            name: String::from(p.name()),
            max_value,
            max_at,
            rejected,
        });
    }
    let catalog_consistent = verdicts.iter().all(|v| !v.rejected);
    Ok(CatalogVerdictReport {
        verdicts,
        catalog_consistent,
        horizon,
        budget: budget.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitseq::DEFAULT_SEED;
    use crate::ratio;

    #[test]
    fn schnorr_level_examples() {
        // i = 3, seeds {000} → {[000]}.
        let fam = make_schnorr_level(3, &[Word::from_str01("000").unwrap()]).unwrap();
        assert_eq!(fam.generators(), &[Word::from_str01("000").unwrap()]);
        assert_eq!(fam.measure(), &ratio(1, 8));
        // i = 2, seeds {0} → leftmost trim {[00]}.
        let fam = make_schnorr_level(2, &[Word::from_str01("0").unwrap()]).unwrap();
        assert_eq!(fam.generators(), &[Word::from_str01("00").unwrap()]);
        // i = 1, seeds {00, 01} → both.
        let fam = make_schnorr_level(
            1,
            &[
                Word::from_str01("00").unwrap(),
                Word::from_str01("01").unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(fam.measure(), &ratio(1, 2));
        // Sibling generators are kept separate; only prefix-dominated
        // generators are pruned, and the measure is exact either way.
        assert_eq!(fam.generators().len(), 2);
        // Infeasible: seeds too small.
        assert!(matches!(
            make_schnorr_level(1, &[Word::from_str01("000").unwrap()]),
            Err(CoreError::InfeasibleMeasure { .. })
        ));
    }

    #[test]
    fn schnorr_levels_exact_to_depth_20() {
        // Seeds covering the whole space; every level must be exact.
        let family = TestFamily::new(TestKind::Schnorr, DEFAULT_DEPTH_LIMIT, |i| {
            make_schnorr_level(i, &[Word::empty()])
        });
        for i in 0..=20 {
            let fam = family.level(i).unwrap();
            assert_eq!(fam.measure(), &pow2_neg(i as u64), "level {i}");
        }
    }

    #[test]
    fn martin_lof_invariant_enforced() {
        let family = TestFamily::new(TestKind::MartinLof, 10, |_| {
            Ok(CylinderFamily::from_generators(alloc::vec![Word::empty()]))
        });
        assert!(family.level(0).is_ok());
        assert!(matches!(
            family.level(1),
            Err(CoreError::InfeasibleMeasure { .. })
        ));
    }

    #[test]
    fn membership_examples() {
        // Nested levels U_i = [0^i].
        let family = TestFamily::new(TestKind::MartinLof, 10, |i| {
            Ok(CylinderFamily::from_generators(alloc::vec![
                Word::from_bits(alloc::vec![false; i as usize],)
            ]))
        });
        let zeros = SequenceSource::zeros();
        assert_eq!(test_membership(&family, &zeros, 10).unwrap(), Some(10));
        let ones = SequenceSource::periodic(&Word::from_str01("1").unwrap()).unwrap();
        assert_eq!(test_membership(&family, &ones, 10).unwrap(), Some(0));
        assert_eq!(test_membership(&family, &ones, 0).unwrap(), Some(0));
        // Monotonicity in max_level.
        let mut last = None;
        for m in 0..=10 {
            let d = test_membership(&family, &zeros, m).unwrap();
            assert!(d >= last);
            last = d;
        }
        assert!(test_membership(&family, &zeros, 11).is_err());
    }

    #[test]
    fn verdict_examples() {
        // All-zeros is rejected by doubling-on-zero at budget 2^10.
        let report =
            catalog_random_verdict(&SequenceSource::zeros(), 64, &crate::pow2(10)).unwrap();
        assert!(!report.catalog_consistent);
        assert!(report
            .verdicts
            .iter()
            .any(|v| v.rejected && v.name.contains("doubling")));
        // Periodic 01 is rejected by the period-2 pattern bettor.
        let per = SequenceSource::periodic(&Word::from_str01("01").unwrap()).unwrap();
        let report = catalog_random_verdict(&per, 4096, &crate::pow2(10)).unwrap();
        assert!(report
            .verdicts
            .iter()
            .any(|v| v.rejected && v.name.contains("pattern")));
        // Seeded-random is catalog-consistent at the default budget.
        let rnd = SequenceSource::seeded_random(DEFAULT_SEED);
        let report = catalog_random_verdict(&rnd, 4096, &default_budget()).unwrap();
        assert!(
            report.catalog_consistent,
            "{:?}",
            report
                .verdicts
                .iter()
                .filter(|v| v.rejected)
                .map(|v| v.name.clone())
                .collect::<Vec<_>>()
        );
    }
}
