//! Finite words, lazy infinite sequences, cylinders, and exact dyadic
//! measure — the substrate every other module consumes.
//!
//! Conventions: bits are stored most-significant-first in word order.
//! Externally visible positions are 1-based (position `p` is bit index
//! `p - 1`); every API that takes a position documents which convention it
//! uses.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use num_traits::Zero;

use crate::error::CoreError;
use crate::Q;

// ---------------------------------------------------------------------------
// Word
// ---------------------------------------------------------------------------

/// A finite binary word. The empty word is permitted.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word {
    bits: Vec<bool>,
}

impl Word {
    /// The empty word.
    pub fn empty() -> Self {
        Word { bits: Vec::new() }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Word { bits }
    }

    /// Parses a word from '0'/'1' characters; whitespace is ignored.
    pub fn from_str01(s: &str) -> Result<Self, CoreError> {
        let mut bits = Vec::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                c if c.is_whitespace() => {}
                c => {
                    return Err(CoreError::Precondition {
                        detail: alloc::format!("invalid character {c:?} in bit string"),
                    })
                }
            }
        }
        Ok(Word { bits })
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Bit at 0-based index `i`.
    pub fn bit(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn push(&mut self, bit: bool) {
        self.bits.push(bit);
    }

    /// Returns `self` extended by one bit, without mutating `self`.
    pub fn child(&self, bit: bool) -> Word {
        let mut bits = self.bits.clone();
        bits.push(bit);
        Word { bits }
    }

    /// Concatenation `self · other`.
    pub fn concat(&self, other: &Word) -> Word {
        let mut bits = self.bits.clone();
        bits.extend_from_slice(&other.bits);
        Word { bits }
    }

    /// Prefix relation `self ⊑ other`.
    pub fn is_prefix_of(&self, other: &Word) -> bool {
        self.len() <= other.len() && other.bits[..self.len()] == self.bits[..]
    }

    /// The length-`n` prefix of this word; `n` must be at most `len()`.
    pub fn prefix(&self, n: usize) -> Word {
        Word {
            bits: self.bits[..n].to_vec(),
        }
    }

    /// Count of `1` bits.
    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Exact uniform measure `2^(-|w|)` of the cylinder `[w]`.
    pub fn cylinder_measure(&self) -> Q {
        pow2_neg(self.len() as u64)
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word(\"{self}\")")
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

use crate::pow2_neg;

// ---------------------------------------------------------------------------
// Deterministic seeded bits (splitmix64)
// ---------------------------------------------------------------------------

/// The documented deterministic generator behind seeded-random sources.
///
/// Word `i` of the stream for seed `s` is `splitmix64(s + (i+1)·GOLDEN)`,
/// a pure function of `(s, i)`, so any prefix can be recomputed
/// independently and reproducibly.
pub fn splitmix64_at(seed: u64, index: u64) -> u64 {
    const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Bit `i` (0-based) of the seeded stream: bit `i % 64` of stream word
/// `i / 64`, taken from the most significant end.
pub fn seeded_bit(seed: u64, i: u64) -> bool {
    let w = splitmix64_at(seed, i / 64);
    (w >> (63 - (i % 64))) & 1 == 1
}

/// Default seed used by shipped examples and tests.
pub const DEFAULT_SEED: u64 = 7;

// ---------------------------------------------------------------------------
// SequenceSource
// ---------------------------------------------------------------------------

/// Kind tag of a sequence source.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceKind {
    ExplicitList,
    Periodic,
    SeededRandom,
    Transformed,
    FileBacked,
}

/// Implementation trait behind [`SequenceSource`]. `prefix_into` must be a
/// pure function of `n`: repeated calls agree bit-for-bit.
pub trait SourceImpl: Send + Sync {
    fn prefix_into(&self, n: usize, out: &mut Vec<bool>) -> Result<(), CoreError>;
}

/// A lazy generator of an infinite (or finite, file-backed/explicit) binary
/// sequence, addressable by prefix length.
///
/// All sources are immutable and deterministic: `prefix(n) ⊑ prefix(m)`
/// whenever `n ≤ m`. Cloning is cheap (shared ownership).
#[derive(Clone)]
pub struct SequenceSource {
    imp: Arc<dyn SourceImpl>,
    kind: SourceKind,
    label: String,
}

impl fmt::Debug for SequenceSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SequenceSource({}, {:?})", self.label, self.kind)
    }
}

struct ExplicitSource {
    bits: Vec<bool>,
    // Explicit sources from memory are `ExplicitList`; sources read from a
    // file use the same representation but report `FileBacked`.
}

impl SourceImpl for ExplicitSource {
    fn prefix_into(&self, n: usize, out: &mut Vec<bool>) -> Result<(), CoreError> {
        if n > self.bits.len() {
            return Err(CoreError::Truncated {
                requested: n,
                available: self.bits.len(),
            });
        }
        out.extend_from_slice(&self.bits[..n]);
        Ok(())
    }
}

struct PeriodicSource {
    pattern: Vec<bool>,
}

impl SourceImpl for PeriodicSource {
    fn prefix_into(&self, n: usize, out: &mut Vec<bool>) -> Result<(), CoreError> {
        let p = self.pattern.len();
        for i in 0..n {
            out.push(self.pattern[i % p]);
        }
        Ok(())
    }
}

struct SeededSource {
    seed: u64,
}

impl SourceImpl for SeededSource {
    fn prefix_into(&self, n: usize, out: &mut Vec<bool>) -> Result<(), CoreError> {
        for i in 0..n as u64 {
            out.push(seeded_bit(self.seed, i));
        }
        Ok(())
    }
}

/// Alternating blocks: for k = 1, 2, 3, … a block of `factor^k` seeded-random
/// bits followed by `factor^k` zeros. The random bits are consumed from the
/// seeded stream in order, so the generator is a pure function of the index.
struct BlockAlternatingSource {
    seed: u64,
    factor: u64,
}

impl SourceImpl for BlockAlternatingSource {
    fn prefix_into(&self, n: usize, out: &mut Vec<bool>) -> Result<(), CoreError> {
        let mut rand_cursor: u64 = 0;
        let mut block: u64 = self.factor;
        while out.len() < n {
            let take = core::cmp::min(block as usize, n - out.len());
            for _ in 0..take {
                out.push(seeded_bit(self.seed, rand_cursor));
                rand_cursor += 1;
            }
            rand_cursor += block - take as u64; // keep stream alignment stable
            if out.len() >= n {
                break;
            }
            let zeros = core::cmp::min(block as usize, n - out.len());
            for _ in 0..zeros {
                out.push(false);
            }
            block = block.saturating_mul(self.factor);
        }
        Ok(())
    }
}

struct FnSource<F: Fn(usize, &mut Vec<bool>) -> Result<(), CoreError> + Send + Sync> {
    f: F,
}

impl<F: Fn(usize, &mut Vec<bool>) -> Result<(), CoreError> + Send + Sync> SourceImpl
    for FnSource<F>
{
    fn prefix_into(&self, n: usize, out: &mut Vec<bool>) -> Result<(), CoreError> {
        (self.f)(n, out)
    }
}

impl SequenceSource {
    fn new(imp: Arc<dyn SourceImpl>, kind: SourceKind, label: String) -> Self {
        SequenceSource { imp, kind, label }
    }

    /// A finite, explicitly listed sequence; prefixes beyond its length are
    /// truncation errors.
    pub fn explicit(bits: Vec<bool>) -> Self {
        Self::new(
            Arc::new(ExplicitSource { bits }),
            SourceKind::ExplicitList,
            String::from("explicit"),
        )
    }

    /// A finite sequence backed by bits read from a file. Same semantics as
    /// [`SequenceSource::explicit`], distinct kind tag.
    pub fn file_backed(bits: Vec<bool>) -> Self {
        Self::new(
            Arc::new(ExplicitSource { bits }),
            SourceKind::FileBacked,
            String::from("file-backed"),
        )
    }

    /// The infinite periodic repetition of a nonempty pattern.
    pub fn periodic(pattern: &Word) -> Result<Self, CoreError> {
        if pattern.is_empty() {
            return Err(CoreError::EmptyWord);
        }
        Ok(Self::new(
            Arc::new(PeriodicSource {
                pattern: pattern.bits().to_vec(),
            }),
            SourceKind::Periodic,
            alloc::format!("periodic({pattern})"),
        ))
    }

    /// The all-zeros sequence.
    pub fn zeros() -> Self {
        Self::periodic(&Word::from_bits(alloc::vec![false])).expect("nonempty pattern")
    }

    /// Seeded-random source over the documented splitmix64 stream.
    pub fn seeded_random(seed: u64) -> Self {
        Self::new(
            Arc::new(SeededSource { seed }),
            SourceKind::SeededRandom,
            alloc::format!("seeded-random(seed={seed})"),
        )
    }

    /// Alternating seeded-random/zero blocks of geometrically growing length
    /// (`factor^k` each, k = 1, 2, …). Used to exhibit a liminf/limsup gap
    /// between the two dimension estimators.
    pub fn block_alternating(seed: u64, factor: u64) -> Result<Self, CoreError> {
        if factor < 2 {
            return Err(CoreError::ParameterOutOfRange {
                name: "factor",
                detail: String::from("block factor must be at least 2"),
            });
        }
        Ok(Self::new(
            Arc::new(BlockAlternatingSource { seed, factor }),
            SourceKind::SeededRandom,
            alloc::format!("block-alternating(seed={seed},factor={factor})"),
        ))
    }

    /// A transformed source defined by a pure prefix function.
    pub fn transformed<F>(label: String, f: F) -> Self
    where
        F: Fn(usize, &mut Vec<bool>) -> Result<(), CoreError> + Send + Sync + 'static,
    {
        Self::new(Arc::new(FnSource { f }), SourceKind::Transformed, label)
    }

    pub fn kind(&self) -> SourceKind {
        self.kind
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// The unique length-`n` prefix of the sequence.
    pub fn prefix(&self, n: usize) -> Result<Word, CoreError> {
        let mut out = Vec::with_capacity(n);
        self.imp.prefix_into(n, &mut out)?;
        debug_assert_eq!(out.len(), n);
        Ok(Word::from_bits(out))
    }
}

// ---------------------------------------------------------------------------
// CylinderFamily
// ---------------------------------------------------------------------------

/// A finite union of basic open sets `[w]`, represented by pairwise
/// prefix-minimal generators, with its exact dyadic measure.
#[derive(Clone, PartialEq, Eq)]
pub struct CylinderFamily {
    generators: Vec<Word>,
    measure: Q,
}

impl fmt::Debug for CylinderFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "CylinderFamily({:?}, measure {})",
            self.generators, self.measure
        )
    }
}

impl CylinderFamily {
    /// The empty family (empty open set, measure 0).
    pub fn empty() -> Self {
        CylinderFamily {
            generators: Vec::new(),
            measure: Q::zero(),
        }
    }

    /// Builds a family from arbitrary generator words, dropping any word
    /// that extends another so the stored set is an antichain. Sibling
    /// generators are kept as given (no `{[w0],[w1]} → [w]` merging).
    pub fn from_generators(mut words: Vec<Word>) -> Self {
        // Sorting lexicographically with prefixes first lets a single pass
        // drop all words dominated by an earlier prefix.
        words.sort();
        words.dedup();
        let mut kept: Vec<Word> = Vec::with_capacity(words.len());
        for w in words {
            if let Some(last) = kept.last() {
                if last.is_prefix_of(&w) {
                    continue;
                }
            }
            kept.push(w);
        }
        let measure = kept
            .iter()
            .fold(Q::zero(), |acc, w| acc + w.cylinder_measure());
        CylinderFamily {
            generators: kept,
            measure,
        }
    }

    pub fn generators(&self) -> &[Word] {
        &self.generators
    }

    /// Exact dyadic measure `Σ 2^(−|w|)` over the generators.
    pub fn measure(&self) -> &Q {
        &self.measure
    }

    pub fn max_generator_len(&self) -> usize {
        self.generators.iter().map(Word::len).max().unwrap_or(0)
    }
}

/// Union of finitely many cylinder families; the result's generators are
/// again pairwise prefix-minimal.
pub fn cylinder_union(families: &[CylinderFamily]) -> CylinderFamily {
    let mut all: Vec<Word> = Vec::new();
    for f in families {
        all.extend(f.generators.iter().cloned());
    }
    CylinderFamily::from_generators(all)
}

/// True iff some generator of `family` is a prefix of `source`.
pub fn member(family: &CylinderFamily, source: &SequenceSource) -> Result<bool, CoreError> {
    let horizon = family.max_generator_len();
    let prefix = source.prefix(horizon)?;
    Ok(family
        .generators
        .iter()
        .any(|g| &prefix.bits()[..g.len()] == g.bits()))
}
