//! Martingales, supermartingales, s-(super)gales, orders, success-set
//! evaluators, and the desk-scale catalog mixture that stands in for a
//! universal supermartingale.
//!
//! Values are carried as `m · 2^e` with rational mantissa `m` and rational
//! exponent `e`, so the averaging law `2^s d(w) = d(w0) + d(w1)` is exact
//! symbolic arithmetic whenever the exponents involved differ by integers
//! (which holds for every s-gale derived from a martingale via
//! `to_s_gale`). A high-precision logarithmic comparison at relative
//! tolerance `1e-9` is the documented fallback for foreign processes.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::bitseq::{splitmix64_at, SequenceSource, Word};
use crate::error::CoreError;
use crate::{pow2_neg, Q};

/// Relative tolerance for logarithmic-form comparisons of values whose
/// exponents do not align exactly.
pub const LOG_TOLERANCE: f64 = 1e-9;

// ---------------------------------------------------------------------------
// Value: m · 2^e with rational m and rational e
// ---------------------------------------------------------------------------

/// An exact nonnegative value of the form `m · 2^e`.
///
/// Comparisons and additions are exact whenever the exponents involved
/// differ by integers; comparison falls back to exact integer-power
/// arithmetic for small exponent denominators and never to floating point.
#[derive(Clone, Debug, PartialEq)]
pub struct Value {
    m: Q,
    e: Q,
}

impl Value {
    pub fn zero() -> Self {
        Value {
            m: Q::zero(),
            e: Q::zero(),
        }
    }

    pub fn one() -> Self {
        Value {
            m: Q::one(),
            e: Q::zero(),
        }
    }

    pub fn new(m: Q, e: Q) -> Self {
        Value { m, e }
    }

    pub fn from_rational(m: Q) -> Self {
        Value { m, e: Q::zero() }
    }

    /// `2^e` for a rational exponent.
    pub fn pow2(e: Q) -> Self {
        Value { m: Q::one(), e }
    }

    pub fn mantissa(&self) -> &Q {
        &self.m
    }

    pub fn exponent(&self) -> &Q {
        &self.e
    }

    pub fn is_zero(&self) -> bool {
        self.m.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.m.is_negative()
    }

    /// Multiplies by `2^q`.
    pub fn scale_pow2(&self, q: &Q) -> Value {
        if self.is_zero() {
            return Value::zero();
        }
        Value {
            m: self.m.clone(),
            e: &self.e + q,
        }
    }

    pub fn mul_rational(&self, r: &Q) -> Value {
        Value {
            m: &self.m * r,
            e: self.e.clone(),
        }
    }

    /// The exact rational this value denotes, if its exponent is an integer.
    pub fn to_rational(&self) -> Option<Q> {
        if self.is_zero() {
            return Some(Q::zero());
        }
        if !self.e.is_integer() {
            return None;
        }
        let e = self.e.to_integer();
        let shift = e.magnitude().to_u64()?;
        let mut v = self.m.clone();
        if e.sign() == Sign::Minus {
            v /= crate::pow2(shift);
        } else {
            v *= crate::pow2(shift);
        }
        Some(v)
    }

    /// Exact addition; defined when the exponents differ by an integer (or
    /// either side is zero).
    pub fn checked_add(&self, other: &Value) -> Option<Value> {
        if self.is_zero() {
            return Some(other.clone());
        }
        if other.is_zero() {
            return Some(self.clone());
        }
        let diff = &other.e - &self.e;
        if !diff.is_integer() {
            return None;
        }
        let d = diff.to_integer();
        let shift = d.magnitude().to_u64()?;
        let factor = crate::pow2(shift);
        let m = if d.sign() == Sign::Minus {
            &self.m + &other.m / factor
        } else {
            &self.m + &other.m * factor
        };
        Some(Value {
            m,
            e: self.e.clone(),
        })
    }

    /// Exact total-order comparison.
    pub fn cmp_exact(&self, other: &Value) -> Ordering {
        let sa = sign_of(&self.m);
        let sb = sign_of(&other.m);
        if sa != sb {
            return sa.cmp(&sb);
        }
        if sa == 0 {
            return Ordering::Equal;
        }
        // Both strictly same nonzero sign.
        let flip = sa < 0;
        let ord = cmp_pos(&self.m.abs(), &self.e, &other.m.abs(), &other.e);
        if flip {
            ord.reverse()
        } else {
            ord
        }
    }

    /// Base-2 logarithm as `f64` (`-inf` for zero), for reporting only.
    pub fn log2(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        log2_q(&self.m.abs()) + q_to_f64(&self.e)
    }

    pub fn approx_f64(&self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            let sign = if self.m.is_negative() { -1.0 } else { 1.0 };
            sign * libm::exp2(self.log2())
        }
    }
}

fn sign_of(q: &Q) -> i8 {
    if q.is_zero() {
        0
    } else if q.is_negative() {
        -1
    } else {
        1
    }
}

/// Compares `a·2^ea` with `b·2^eb` for strictly positive rationals `a`, `b`.
fn cmp_pos(a: &Q, ea: &Q, b: &Q, eb: &Q) -> Ordering {
    // Reduce to comparing r = a/b with 2^x, x = eb - ea.
    let r = a / b;
    let x = eb - ea;
    cmp_q_pow2(&r, &x)
}

/// Compares a strictly positive rational `r` with `2^x` exactly.
pub fn cmp_q_pow2(r: &Q, x: &Q) -> Ordering {
    if x.is_integer() {
        let e = x.to_integer();
        let shift = e.magnitude().to_u64().expect("exponent magnitude fits u64");
        let rhs = if e.sign() == Sign::Minus {
            pow2_neg(shift)
        } else {
            crate::pow2(shift)
        };
        return r.cmp(&rhs);
    }
    // Fast path: bit-length bounds give 2^(bn-bd-1) <= r < 2^(bn-bd+1).
    let bn = r.numer().bits() as i128;
    let bd = r.denom().bits() as i128;
    let fl = x
        .floor()
        .to_integer()
        .to_i128()
        .expect("exponent floor fits i128");
    if bn - bd > fl + 1 {
        return Ordering::Greater;
    }
    if bn - bd < fl {
        return Ordering::Less;
    }
    // Exact fallback: with x = p/q (q > 0), compare r^q against 2^p.
    let q = x
        .denom()
        .to_u32()
        .expect("exponent denominator fits u32 for exact comparison");
    let p = x.numer();
    let num_pow = r.numer().pow(q);
    let den_pow = r.denom().pow(q);
    let shift = p.magnitude().to_u64().expect("exponent numerator fits u64");
    if p.sign() == Sign::Minus {
        (num_pow << shift).cmp(&den_pow)
    } else {
        num_pow.cmp(&(den_pow << shift))
    }
}

fn log2_q(q: &Q) -> f64 {
    log2_bigint(q.numer()) - log2_bigint(q.denom())
}

fn log2_bigint(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 52 {
        return libm::log2(n.to_f64().expect("small BigInt converts"));
    }
    let shift = bits - 52;
    let top: BigInt = n >> shift;
    libm::log2(top.to_f64().expect("52-bit value converts")) + shift as f64
}

fn q_to_f64(q: &Q) -> f64 {
    let sign = if q.is_negative() { -1.0 } else { 1.0 };
    let a = q.abs();
    if a.is_zero() {
        return 0.0;
    }
    sign * libm::exp2(log2_q(&a))
}

// ---------------------------------------------------------------------------
// Steppers and processes
// ---------------------------------------------------------------------------

/// Incremental evaluator of a process along one branch of the word tree.
/// Obtained positioned at the empty word; `step` appends one bit.
pub trait Stepper {
    fn value(&self) -> Value;
    fn step(&mut self, bit: bool);
    fn boxed_clone(&self) -> Box<dyn Stepper>;
}

impl Clone for Box<dyn Stepper> {
    fn clone(&self) -> Self {
        self.boxed_clone()
    }
}

/// Process kinds and their averaging laws.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    /// `2 d(w) = d(w0) + d(w1)`
    Martingale,
    /// `2 d(w) ≥ d(w0) + d(w1)`
    Supermartingale,
    /// `2^s d(w) = d(w0) + d(w1)`
    SGale,
    /// `2^s d(w) ≥ d(w0) + d(w1)`
    SSupergale,
}

impl Kind {
    pub fn is_equality(self) -> bool {
        matches!(self, Kind::Martingale | Kind::SGale)
    }
}

#[derive(Clone)]
enum ProcessImpl {
    ByWord(Arc<dyn Fn(&Word) -> Value + Send + Sync>),
    Stepwise(Arc<dyn Fn() -> Box<dyn Stepper> + Send + Sync>),
}

/// An exact-valued function on words tagged with its kind and s-parameter.
#[derive(Clone)]
pub struct ValuedProcess {
    kind: Kind,
    s: Q,
    name: String,
    imp: ProcessImpl,
}

impl core::fmt::Debug for ValuedProcess {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(
            f,
            "ValuedProcess({}, {:?}, s={})",
            self.name, self.kind, self.s
        )
    }
}

/// Stepper that re-evaluates a by-word process from scratch at each step.
struct ByWordStepper {
    f: Arc<dyn Fn(&Word) -> Value + Send + Sync>,
    word: Word,
}

impl Stepper for ByWordStepper {
    fn value(&self) -> Value {
        (self.f)(&self.word)
    }
    fn step(&mut self, bit: bool) {
        self.word.push(bit);
    }
    fn boxed_clone(&self) -> Box<dyn Stepper> {
        Box::new(ByWordStepper {
            f: self.f.clone(),
            word: self.word.clone(),
        })
    }
}

impl ValuedProcess {
    /// Wraps an arbitrary evaluation function.
    pub fn from_fn<F>(name: &str, kind: Kind, s: Q, f: F) -> Self
    where
        F: Fn(&Word) -> Value + Send + Sync + 'static,
    {
        ValuedProcess {
            kind,
            s,
            name: String::from(name),
            imp: ProcessImpl::ByWord(Arc::new(f)),
        }
    }

    /// Wraps a stepper factory (preferred: evaluation along a sequence is
    /// incremental).
    pub fn from_stepper<F>(name: &str, kind: Kind, s: Q, factory: F) -> Self
    where
        F: Fn() -> Box<dyn Stepper> + Send + Sync + 'static,
    {
        ValuedProcess {
            kind,
            s,
            name: String::from(name),
            imp: ProcessImpl::Stepwise(Arc::new(factory)),
        }
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn s(&self) -> &Q {
        &self.s
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Evaluates at a word.
    pub fn value(&self, w: &Word) -> Value {
        match &self.imp {
            ProcessImpl::ByWord(f) => f(w),
            ProcessImpl::Stepwise(factory) => {
                let mut st = factory();
                for i in 0..w.len() {
                    st.step(w.bit(i));
                }
                st.value()
            }
        }
    }

    /// A stepper positioned at the empty word.
    pub fn stepper(&self) -> Box<dyn Stepper> {
        match &self.imp {
            ProcessImpl::ByWord(f) => Box::new(ByWordStepper {
                f: f.clone(),
                word: Word::empty(),
            }),
            ProcessImpl::Stepwise(factory) => factory(),
        }
    }

    /// Rational value at a word; defined when the exponent is integral
    /// (always, for martingales and supermartingales).
    pub fn rational_value(&self, w: &Word) -> Option<Q> {
        self.value(w).to_rational()
    }
}

// ---------------------------------------------------------------------------
// Catalog martingales
// ---------------------------------------------------------------------------

/// The shipped catalog of computable martingales. Each is normalized to
/// value 1 at the empty word and satisfies the exact averaging law.
#[derive(Clone, Debug, PartialEq)]
pub enum CatalogMartingale {
    /// Bets everything on the next bit equalling `b`; capital doubles on a
    /// match and drops to 0 on a mismatch.
    DoublingOnBit(bool),
    /// Bets everything on the next bit following the periodic pattern.
    PatternBettor(Vec<bool>),
    /// Bets a constant fraction expecting 1s with frequency `p`:
    /// multiplier `2p` on a 1, `2(1-p)` on a 0.
    FreqBettor(Q),
    /// Doubles on 0 at 1-based positions that are powers of two; elsewhere
    /// abstains (multiplier 1).
    SelectiveZeroAtPowersOfTwo,
}

impl CatalogMartingale {
    pub fn name(&self) -> String {
        match self {
            CatalogMartingale::DoublingOnBit(false) => String::from("doubling-on-zero"),
            CatalogMartingale::DoublingOnBit(true) => String::from("doubling-on-one"),
            CatalogMartingale::PatternBettor(p) => {
                alloc::format!("pattern-bettor({})", Word::from_bits(p.clone()))
            }
            CatalogMartingale::FreqBettor(p) => alloc::format!("freq-bettor({p})"),
            CatalogMartingale::SelectiveZeroAtPowersOfTwo => {
                String::from("selective-zero-at-powers-of-two")
            }
        }
    }

    /// Capital multiplier when reading `bit` at 0-based position `pos`.
    fn multiplier(&self, pos: u64, bit: bool) -> Q {
        match self {
            CatalogMartingale::DoublingOnBit(b) => {
                if bit == *b {
                    crate::ratio(2, 1)
                } else {
                    Q::zero()
                }
            }
            CatalogMartingale::PatternBettor(pat) => {
                let predicted = pat[(pos as usize) % pat.len()];
                if bit == predicted {
                    crate::ratio(2, 1)
                } else {
                    Q::zero()
                }
            }
            CatalogMartingale::FreqBettor(p) => {
                if bit {
                    crate::ratio(2, 1) * p
                } else {
                    crate::ratio(2, 1) * (Q::one() - p)
                }
            }
            CatalogMartingale::SelectiveZeroAtPowersOfTwo => {
                let position = pos + 1; // 1-based
                if position.is_power_of_two() {
                    if bit {
                        Q::zero()
                    } else {
                        crate::ratio(2, 1)
                    }
                } else {
                    Q::one()
                }
            }
        }
    }

    pub fn to_process(&self) -> ValuedProcess {
        let this = self.clone();
        ValuedProcess::from_stepper(&self.name(), Kind::Martingale, Q::one(), move || {
            Box::new(CatalogStepper {
                mart: this.clone(),
                value: Q::one(),
                pos: 0,
            })
        })
    }
}

#[derive(Clone)]
struct CatalogStepper {
    mart: CatalogMartingale,
    value: Q,
    pos: u64,
}

impl Stepper for CatalogStepper {
    fn value(&self) -> Value {
        Value::from_rational(self.value.clone())
    }
    fn step(&mut self, bit: bool) {
        if !self.value.is_zero() {
            let m = self.mart.multiplier(self.pos, bit);
            self.value = &self.value * m;
        }
        self.pos += 1;
    }
    fn boxed_clone(&self) -> Box<dyn Stepper> {
        Box::new(self.clone())
    }
}

/// The shipped catalog, in mixture order. Aggressive all-or-nothing bettors
/// are listed late (and therefore weighted low) so that the mixture's early
/// behavior is dominated by the conservative frequency bettors.
pub fn catalog() -> Vec<ValuedProcess> {
    let pat01 = alloc::vec![false, true];
    let pat10 = alloc::vec![true, false];
    alloc::vec![
        CatalogMartingale::FreqBettor(crate::ratio(1, 4)).to_process(),
        CatalogMartingale::FreqBettor(crate::ratio(1, 3)).to_process(),
        CatalogMartingale::FreqBettor(crate::ratio(1, 2)).to_process(),
        CatalogMartingale::FreqBettor(crate::ratio(2, 3)).to_process(),
        CatalogMartingale::FreqBettor(crate::ratio(3, 4)).to_process(),
        CatalogMartingale::PatternBettor(pat01).to_process(),
        CatalogMartingale::PatternBettor(pat10).to_process(),
        CatalogMartingale::DoublingOnBit(false).to_process(),
        CatalogMartingale::DoublingOnBit(true).to_process(),
        CatalogMartingale::SelectiveZeroAtPowersOfTwo.to_process(),
    ]
}

/// The everywhere-1 martingale (fair abstention).
pub fn constant_martingale() -> ValuedProcess {
    CatalogMartingale::FreqBettor(crate::ratio(1, 2)).to_process()
}

/// Deterministically generated finitely-supported martingale: mass is split
/// top-down with rational ratios `t ∈ {0/8, …, 8/8}` drawn from the seeded
/// generator; below `depth`, the split is fair (multiplier 1), so the
/// averaging law holds everywhere.
pub fn random_martingale(seed: u64, depth: u32) -> ValuedProcess {
    let name = alloc::format!("random-martingale(seed={seed},depth={depth})");
    ValuedProcess::from_stepper(&name, Kind::Martingale, Q::one(), move || {
        Box::new(RandomMartStepper {
            seed,
            depth,
            value: Q::one(),
            node: 1, // heap index of the empty word
            len: 0,
        })
    })
}

#[derive(Clone)]
struct RandomMartStepper {
    seed: u64,
    depth: u32,
    value: Q,
    node: u128,
    len: u32,
}

impl Stepper for RandomMartStepper {
    fn value(&self) -> Value {
        Value::from_rational(self.value.clone())
    }
    fn step(&mut self, bit: bool) {
        if self.len < self.depth && !self.value.is_zero() {
            // t = d(w0) / (2 d(w)), derived purely from (seed, node index).
            let r = splitmix64_at(self.seed, (self.node % (u64::MAX as u128)) as u64) % 9;
            let t = crate::ratio(r as i64, 8);
            let factor = if bit {
                crate::ratio(2, 1) * (Q::one() - t)
            } else {
                crate::ratio(2, 1) * t
            };
            self.value = &self.value * factor;
        }
        self.node = self.node * 2 + if bit { 1 } else { 0 };
        self.len += 1;
    }
    fn boxed_clone(&self) -> Box<dyn Stepper> {
        Box::new(self.clone())
    }
}

// ---------------------------------------------------------------------------
// Mixture supermartingale
// ---------------------------------------------------------------------------

/// Weighted sum `Σ_k 2^(−k) d_k` of normalized martingales; the k-th listed
/// component gets weight `2^(−k)`. The sum of weights is strictly below 1,
/// so the mixture is a supermartingale (indeed a martingale, but tagged
/// conservatively as the underlying components are interchangeable).
#[derive(Clone)]
pub struct MixtureSupermartingale {
    comps: Vec<ValuedProcess>,
}

impl MixtureSupermartingale {
    pub fn components(&self) -> &[ValuedProcess] {
        &self.comps
    }

    /// Weight of component `i` (0-based): `2^{-(i+1)}`.
    pub fn weight(&self, i: usize) -> Q {
        pow2_neg(i as u64 + 1)
    }

    /// Exact rational value of the mixture at a word.
    pub fn value(&self, w: &Word) -> Q {
        let mut acc = Q::zero();
        for (i, c) in self.comps.iter().enumerate() {
            let v = c
                .rational_value(w)
                .expect("mixture components are martingales with integral exponents");
            acc += v * self.weight(i);
        }
        acc
    }

    pub fn stepper(&self) -> MixtureStepper {
        MixtureStepper {
            comps: self.comps.iter().map(|c| c.stepper()).collect(),
            weights: (0..self.comps.len()).map(|i| self.weight(i)).collect(),
        }
    }

    /// View as a generic process (kind supermartingale).
    pub fn as_process(&self) -> ValuedProcess {
        let this = self.clone();
        ValuedProcess::from_stepper(
            "catalog-mixture",
            Kind::Supermartingale,
            Q::one(),
            move || Box::new(this.stepper()),
        )
    }
}

/// Incremental evaluator for a mixture.
#[derive(Clone)]
pub struct MixtureStepper {
    comps: Vec<Box<dyn Stepper>>,
    weights: Vec<Q>,
}

impl MixtureStepper {
    pub fn rational_value(&self) -> Q {
        let mut acc = Q::zero();
        for (st, w) in self.comps.iter().zip(&self.weights) {
            let v = st
                .value()
                .to_rational()
                .expect("mixture components are martingales with integral exponents");
            acc += v * w;
        }
        acc
    }
}

impl Stepper for MixtureStepper {
    fn value(&self) -> Value {
        Value::from_rational(self.rational_value())
    }
    fn step(&mut self, bit: bool) {
        for st in &mut self.comps {
            st.step(bit);
        }
    }
    fn boxed_clone(&self) -> Box<dyn Stepper> {
        Box::new(self.clone())
    }
}

/// Builds the weighted mixture of normalized martingales. Errors if any
/// component is not a martingale normalized to `d(λ) = 1`.
pub fn make_mixture(components: Vec<ValuedProcess>) -> Result<MixtureSupermartingale, CoreError> {
    for (i, c) in components.iter().enumerate() {
        if c.kind() != Kind::Martingale {
            return Err(CoreError::Precondition {
                detail: alloc::format!("mixture component {i} is not a martingale"),
            });
        }
        match c.rational_value(&Word::empty()) {
            Some(v) if v.is_one() => {}
            _ => return Err(CoreError::NotNormalized { index: i }),
        }
    }
    Ok(MixtureSupermartingale { comps: components })
}

/// The default catalog mixture (all downstream results are relative to it).
pub fn catalog_mixture() -> MixtureSupermartingale {
    make_mixture(catalog()).expect("catalog components are normalized martingales")
}

// ---------------------------------------------------------------------------
// Orders
// ---------------------------------------------------------------------------

/// An unbounded nondecreasing function `h : ℕ → (0, ∞)`.
#[derive(Clone)]
pub struct Order {
    name: String,
    f: Arc<dyn Fn(u64) -> Value + Send + Sync>,
}

impl core::fmt::Debug for Order {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "Order({})", self.name)
    }
}

impl Order {
    pub fn from_fn<F>(name: &str, f: F) -> Self
    where
        F: Fn(u64) -> Value + Send + Sync + 'static,
    {
        Order {
            name: String::from(name),
            f: Arc::new(f),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn evaluate(&self, n: u64) -> Value {
        (self.f)(n)
    }

    /// Spot-checks that the order is nondecreasing over `0..=horizon` and
    /// strictly grows somewhere in the sampled range.
    pub fn spot_check(&self, horizon: u64) -> bool {
        let mut prev = self.evaluate(0);
        let mut grew = false;
        for n in 1..=horizon {
            let cur = self.evaluate(n);
            match cur.cmp_exact(&prev) {
                Ordering::Less => return false,
                Ordering::Greater => grew = true,
                Ordering::Equal => {}
            }
            prev = cur;
        }
        grew
    }
}

/// The standard order `h_s(n) = 2^((1−s) n)`, exact for rational `s`.
/// Rejects `s ≥ 1` (not unbounded) and `s < 0`.
pub fn standard_order(s: &Q) -> Result<Order, CoreError> {
    if s >= &Q::one() {
        return Err(CoreError::OrderNotUnbounded);
    }
    if s.is_negative() {
        return Err(CoreError::ParameterOutOfRange {
            name: "s",
            detail: String::from("standard order requires 0 <= s < 1"),
        });
    }
    let one_minus_s = Q::one() - s;
    let name = alloc::format!("h_{s}");
    Ok(Order::from_fn(&name, move |n| {
        Value::pow2(&one_minus_s * Q::from_integer(BigInt::from(n)))
    }))
}

// ---------------------------------------------------------------------------
// Operations: to_s_gale, check_averaging, conservation, success sets
// ---------------------------------------------------------------------------

/// `d^(s)(w) = 2^((s−1)|w|) · d(w)`: the s-gale (s-supergale) induced by a
/// martingale (supermartingale).
pub fn to_s_gale(d: &ValuedProcess, s: &Q) -> Result<ValuedProcess, CoreError> {
    if s.is_negative() {
        return Err(CoreError::ParameterOutOfRange {
            name: "s",
            detail: String::from("s-gale parameter must be nonnegative"),
        });
    }
    let kind = match d.kind() {
        Kind::Martingale => Kind::SGale,
        Kind::Supermartingale => Kind::SSupergale,
        _ => {
            return Err(CoreError::Precondition {
                detail: String::from("to_s_gale expects a martingale or supermartingale"),
            })
        }
    };
    let name = alloc::format!("{}^({s})", d.name());
    let inner = d.clone();
    let s_cl = s.clone();
    Ok(ValuedProcess::from_stepper(
        &name,
        kind,
        s.clone(),
        move || {
            Box::new(SGaleStepper {
                inner: inner.stepper(),
                shift_per_step: &s_cl - Q::one(),
                shift: Q::zero(),
            })
        },
    ))
}

#[derive(Clone)]
struct SGaleStepper {
    inner: Box<dyn Stepper>,
    shift_per_step: Q,
    shift: Q,
}

impl Stepper for SGaleStepper {
    fn value(&self) -> Value {
        self.inner.value().scale_pow2(&self.shift)
    }
    fn step(&mut self, bit: bool) {
        self.inner.step(bit);
        self.shift += self.shift_per_step.clone();
    }
    fn boxed_clone(&self) -> Box<dyn Stepper> {
        Box::new(self.clone())
    }
}

/// One averaging violation: the word and both sides in log2 form.
#[derive(Debug, Clone)]
pub struct AveragingViolation {
    pub word: Word,
    pub lhs_log2: f64,
    pub rhs_log2: f64,
    /// True when the comparison was decided exactly (symbolically).
    pub exact: bool,
}

/// Report of an averaging check over all words shorter than a depth.
#[derive(Debug, Clone)]
pub struct AveragingReport {
    pub kind: Kind,
    pub depth: u32,
    pub words_checked: u64,
    pub violations: Vec<AveragingViolation>,
}

impl AveragingReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Verifies the kind-appropriate averaging (in)equality at every word of
/// length `< depth`. Exact symbolic comparison whenever the exponents
/// align; logarithmic comparison at [`LOG_TOLERANCE`] otherwise.
pub fn check_averaging(p: &ValuedProcess, depth: u32) -> Result<AveragingReport, CoreError> {
    const MAX_DEPTH: u32 = 20;
    if depth > MAX_DEPTH {
        return Err(CoreError::ParameterOutOfRange {
            name: "depth",
            detail: alloc::format!("depth {depth} exceeds configured maximum {MAX_DEPTH}"),
        });
    }
    let mut report = AveragingReport {
        kind: p.kind(),
        depth,
        words_checked: 0,
        violations: Vec::new(),
    };
    let factor = match p.kind() {
        Kind::Martingale | Kind::Supermartingale => Q::one(),
        Kind::SGale | Kind::SSupergale => p.s().clone(),
    };
    let mut stack: Vec<(Box<dyn Stepper>, Word)> = alloc::vec![(p.stepper(), Word::empty())];
    while let Some((st, w)) = stack.pop() {
        let v = st.value();
        if v.is_negative() {
            return Err(CoreError::NegativeValue {
                context: alloc::format!("word {w}"),
            });
        }
        if (w.len() as u32) < depth {
            let mut s0 = st.clone();
            s0.step(false);
            let mut s1 = st.clone();
            s1.step(true);
            let lhs = v.scale_pow2(&factor);
            let v0 = s0.value();
            let v1 = s1.value();
            report.words_checked += 1;
            let (ok, exact, lhs_l, rhs_l) = averaging_holds(&lhs, &v0, &v1, p.kind().is_equality());
            if !ok {
                report.violations.push(AveragingViolation {
                    word: w.clone(),
                    lhs_log2: lhs_l,
                    rhs_log2: rhs_l,
                    exact,
                });
            }
            if (w.len() as u32) + 1 < depth + 1 {
                stack.push((s0, w.child(false)));
                stack.push((s1, w.child(true)));
            }
        }
    }
    Ok(report)
}

fn averaging_holds(lhs: &Value, v0: &Value, v1: &Value, equality: bool) -> (bool, bool, f64, f64) {
    if let Some(rhs) = v0.checked_add(v1) {
        let ord = lhs.cmp_exact(&rhs);
        let ok = if equality {
            ord == Ordering::Equal
        } else {
            ord != Ordering::Less
        };
        return (ok, true, lhs.log2(), rhs.log2());
    }
    // Exponents do not align: logarithmic comparison at tolerance.
    let rhs_l = log2_sum(v0, v1);
    let lhs_l = lhs.log2();
    let ok = if equality {
        (lhs_l - rhs_l).abs() <= LOG_TOLERANCE * (1.0 + lhs_l.abs())
    } else {
        lhs_l >= rhs_l - LOG_TOLERANCE * (1.0 + rhs_l.abs())
    };
    (ok, false, lhs_l, rhs_l)
}

fn log2_sum(a: &Value, b: &Value) -> f64 {
    let la = a.log2();
    let lb = b.log2();
    if la == f64::NEG_INFINITY {
        return lb;
    }
    if lb == f64::NEG_INFINITY {
        return la;
    }
    let (hi, lo) = if la >= lb { (la, lb) } else { (lb, la) };
    hi + libm::log2(1.0 + libm::exp2(lo - hi))
}

/// Checks the conservation law `Σ_{|w|=n} 2^(−sn) d(w) = d(λ)` exactly when
/// the level sum has aligned exponents; returns whether it holds.
pub fn check_conservation(p: &ValuedProcess, n: u32) -> Result<bool, CoreError> {
    let s = match p.kind() {
        Kind::Martingale | Kind::Supermartingale => Q::one(),
        _ => p.s().clone(),
    };
    let tax = -&s * Q::from_integer(BigInt::from(n));
    let mut sum = Value::zero();
    let mut exact = true;
    let mut sum_log: f64 = f64::NEG_INFINITY;
    // Iterate all words of length n via DFS with steppers.
    let mut stack: Vec<(Box<dyn Stepper>, u32)> = alloc::vec![(p.stepper(), 0)];
    while let Some((st, len)) = stack.pop() {
        if len == n {
            let v = st.value().scale_pow2(&tax);
            if exact {
                match sum.checked_add(&v) {
                    Some(s2) => sum = s2,
                    None => {
                        exact = false;
                        sum_log = log2_sum_f(sum.log2(), v.log2());
                    }
                }
            } else {
                sum_log = log2_sum_f(sum_log, v.log2());
            }
            continue;
        }
        let mut s0 = st.clone();
        s0.step(false);
        let mut s1 = st;
        s1.step(true);
        stack.push((s0, len + 1));
        stack.push((s1, len + 1));
    }
    let initial = p.value(&Word::empty());
    if exact {
        // Equality for martingales and s-gales; `≤` for the super kinds.
        let ord = sum.cmp_exact(&initial);
        Ok(if p.kind().is_equality() {
            ord == Ordering::Equal
        } else {
            ord != Ordering::Greater
        })
    } else {
        let diff = (sum_log - initial.log2()).abs();
        Ok(diff <= LOG_TOLERANCE * (1.0 + initial.log2().abs()))
    }
}

fn log2_sum_f(la: f64, lb: f64) -> f64 {
    if la == f64::NEG_INFINITY {
        return lb;
    }
    if lb == f64::NEG_INFINITY {
        return la;
    }
    let (hi, lo) = if la >= lb { (la, lb) } else { (lb, la) };
    hi + libm::log2(1.0 + libm::exp2(lo - hi))
}

// ---------------------------------------------------------------------------
// Success-set evaluators
// ---------------------------------------------------------------------------

/// Finite-horizon verdict for order-success. This is an approximation at a
/// horizon: `witnessed` means some `n ≤ horizon` reached the order; absence
/// of a witness never refutes success in the limit.
#[derive(Debug, Clone)]
pub struct OrderSuccessReport {
    pub horizon: usize,
    /// max over `1 ≤ n ≤ horizon` of `log2( d(A↾n) / h(n) )`.
    pub max_ratio_log2: f64,
    pub witness_count: usize,
    pub largest_witness: Option<usize>,
    pub witnessed: bool,
}

/// Evaluates the order-`h` success condition `d(A↾n) ≥ h(n)` along a source
/// up to a horizon; each comparison is exact.
pub fn order_success(
    d: &ValuedProcess,
    h: &Order,
    source: &SequenceSource,
    horizon: usize,
) -> Result<OrderSuccessReport, CoreError> {
    if horizon < 1 {
        return Err(CoreError::Precondition {
            detail: String::from("order_success requires horizon >= 1"),
        });
    }
    let prefix = source.prefix(horizon)?;
    let mut st = d.stepper();
    let mut max_ratio_log2 = f64::NEG_INFINITY;
    let mut witness_count = 0usize;
    let mut largest = None;
    for n in 1..=horizon {
        st.step(prefix.bit(n - 1));
        let v = st.value();
        let hv = h.evaluate(n as u64);
        let ratio = v.log2() - hv.log2();
        if ratio > max_ratio_log2 {
            max_ratio_log2 = ratio;
        }
        if !v.is_zero() && v.cmp_exact(&hv) != Ordering::Less {
            witness_count += 1;
            largest = Some(n);
        }
    }
    Ok(OrderSuccessReport {
        horizon,
        max_ratio_log2,
        witness_count,
        largest_witness: largest,
        witnessed: witness_count >= 1,
    })
}

/// Finite-horizon proxy verdict for strong success (`liminf d(A↾n) = ∞`):
/// the minimum of `d` over the tail window `[horizon/2, horizon]` compared
/// against a threshold.
#[derive(Debug, Clone)]
pub struct StrongSuccessReport {
    pub horizon: usize,
    pub window_start: usize,
    pub tail_min_log2: f64,
    pub consistent_with_strong_success: bool,
}

pub fn strong_success(
    d: &ValuedProcess,
    source: &SequenceSource,
    horizon: usize,
    threshold: &Q,
) -> Result<StrongSuccessReport, CoreError> {
    if horizon < 1 {
        return Err(CoreError::Precondition {
            detail: String::from("strong_success requires horizon >= 1"),
        });
    }
    let window_start = core::cmp::max(1, horizon / 2);
    let prefix = source.prefix(horizon)?;
    let mut st = d.stepper();
    let mut tail_min: Option<Value> = None;
    for n in 1..=horizon {
        st.step(prefix.bit(n - 1));
        if n >= window_start {
            let v = st.value();
            let smaller = match &tail_min {
                None => true,
                Some(cur) => v.cmp_exact(cur) == Ordering::Less,
            };
            if smaller {
                tail_min = Some(v);
            }
        }
    }
    let tail_min = tail_min.expect("window nonempty");
    let thr = Value::from_rational(threshold.clone());
    Ok(StrongSuccessReport {
        horizon,
        window_start,
        tail_min_log2: tail_min.log2(),
        consistent_with_strong_success: tail_min.cmp_exact(&thr) != Ordering::Less,
    })
}
