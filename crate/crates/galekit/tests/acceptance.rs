//! Acceptance gate: one test — and one printed PASS/FAIL line — per
//! criterion. Criteria that are provably unattainable for the shipped
//! finite proxies are still asserted faithfully and fail honestly; the
//! failure messages say which clause fell and why.

use std::collections::HashSet;

use num_traits::Signed;
use std::time::{Duration, Instant};

use galekit_core::bitseq::{splitmix64_at, SequenceSource, Word};
use galekit_core::classify::{
    cdim_catalog_estimate, default_s_grid, dim_ge_formula, dim_le_formula, eval_bounded,
    ApproxReal, EvalContext, HierarchyFormula, KernelKind, QuantKind, Verdict,
};
use galekit_core::complexity::{dim_estimate, strong_dim_estimate, ComplexityModel};
use galekit_core::gales::{
    catalog_mixture, check_averaging, check_conservation, random_martingale, to_s_gale,
};
use galekit_core::reductions::{wadge_dim1, wadge_dimstr, LevelOracle, SearchBudget};
use galekit_core::transforms::{
    dilute, remove_sparse, select_subsequence, undilute, DilutionPlan, PositionSet, SelectionRule,
};
use galekit_core::{pow2_neg, ratio, CoreError, Q};

/// Writes straight to the stderr handle so the line survives libtest's
/// output capture and shows up even for passing tests.
fn report(criterion: u32, verdict: &str, detail: &str) {
    use std::io::Write;
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "criterion {criterion:02}: {verdict} — {detail}");
}

fn pass(criterion: u32, detail: &str) {
    report(criterion, "PASS", detail);
}

fn fail(criterion: u32, detail: &str) -> ! {
    report(criterion, "FAIL", detail);
    panic!("criterion {criterion:02}: FAIL — {detail}");
}

fn f64_of(q: &Q) -> f64 {
    use num_traits::ToPrimitive;
    q.numer().to_f64().unwrap_or(f64::NAN) / q.denom().to_f64().unwrap_or(f64::NAN)
}

fn word_of(v: u32, len: usize) -> Word {
    Word::from_bits((0..len).map(|i| (v >> (len - 1 - i)) & 1 == 1).collect())
}

// ---------------------------------------------------------------------------

#[test]
fn criterion_01_kraft_and_prefix_freeness() {
    let start = Instant::now();
    let model = ComplexityModel::v1();
    const MAX: u32 = 24;
    let mut codewords: Vec<(u8, u32)> = Vec::new();
    model.enumerate_codewords(MAX, &mut |left_aligned, len| {
        codewords.push((len, left_aligned >> (32 - len as u32)));
    });
    // Kraft sum, exactly, scaled by 2^24.
    let kraft: u128 = codewords
        .iter()
        .map(|&(len, _)| 1u128 << (MAX - len as u32))
        .sum();
    if kraft > 1u128 << MAX {
        fail(1, &format!("Kraft sum exceeds 1: {kraft}/2^{MAX}"));
    }
    // Prefix-freeness: no codeword is a proper prefix of another.
    let set: HashSet<(u8, u32)> = codewords.iter().copied().collect();
    for &(len, v) in &codewords {
        for plen in 1..len {
            if set.contains(&(plen, v >> (len - plen))) {
                fail(
                    1,
                    &format!("codeword of length {plen} prefixes one of length {len}"),
                );
            }
        }
    }
    let elapsed = start.elapsed();
    if elapsed >= Duration::from_secs(60) {
        fail(1, &format!("runtime {elapsed:?} exceeds 60 s"));
    }
    pass(
        1,
        &format!(
            "{} codewords <= {MAX} bits, Kraft {kraft}/{} <= 1, prefix-free, in {elapsed:?}",
            codewords.len(),
            1u128 << MAX
        ),
    );
}

#[test]
fn criterion_02_oracle_equivalence() {
    let start = Instant::now();
    let model = ComplexityModel::v1();
    let mut words = 0u64;
    for len in 0..=12usize {
        for v in 0..(1u32 << len) {
            let w = word_of(v, len);
            let c = model.code_length(&w);
            if model.brute_force_length(&w, c) != Some(c) {
                fail(2, &format!("mismatch at {w} (dp {c})"));
            }
            words += 1;
        }
    }
    assert_eq!(words, 8191);
    let elapsed = start.elapsed();
    if elapsed >= Duration::from_secs(60) {
        fail(2, &format!("runtime {elapsed:?} exceeds 60 s"));
    }
    pass(
        2,
        &format!("code_length == brute force on all {words} words <= 12 bits in {elapsed:?}"),
    );
}

#[test]
fn criterion_03_exact_averaging() {
    let s_values = [ratio(1, 4), ratio(1, 2), ratio(3, 4)];
    for seed in 0..1000u64 {
        let d = random_martingale(seed, 12);
        let rep = check_averaging(&d, 12).unwrap();
        if !rep.ok() {
            fail(
                3,
                &format!(
                    "martingale seed {seed}: {} averaging violations",
                    rep.violations.len()
                ),
            );
        }
        for s in &s_values {
            let g = to_s_gale(&d, s).unwrap();
            let rep = check_averaging(&g, 12).unwrap();
            if !rep.ok() {
                fail(
                    3,
                    &format!("s-gale (seed {seed}, s={s}): averaging violated"),
                );
            }
            if !check_conservation(&g, 12).unwrap() {
                fail(
                    3,
                    &format!("s-gale (seed {seed}, s={s}): conservation violated at level 12"),
                );
            }
        }
    }
    pass(3, "1000 random martingales exact at depth 12; derived s-gales for s in {1/4,1/2,3/4} pass log-form averaging and level-12 conservation");
}

#[test]
fn criterion_04_dilution_layout() {
    let source = SequenceSource::seeded_random(7);
    for (p, q) in [(1i64, 4i64), (1, 3), (1, 2), (2, 3), (3, 4)] {
        let alpha = ratio(p, q);
        let plan = DilutionPlan::new(alpha.clone()).unwrap();
        // Proof inequalities and offsets against naive concatenation.
        let mut naive_offset = 0u64;
        for n in 1..=1000u64 {
            if !plan.check_proof_inequalities(n) {
                fail(
                    4,
                    &format!("proof inequality violated at alpha {p}/{q}, n={n}"),
                );
            }
            if plan.block_offset(n) != naive_offset {
                fail(4, &format!("offset mismatch at alpha {p}/{q}, n={n}"));
            }
            naive_offset += plan.block_length(n) + plan.pad_length(n);
        }
        // Bit-for-bit agreement with naive interleaving over all 1000 blocks.
        let total = plan.total_length(1000) as usize;
        let x = source.prefix(1000 * 1000).unwrap();
        let mut naive = Vec::with_capacity(total);
        let mut consumed = 0usize;
        for n in 1..=1000u64 {
            for _ in 0..plan.block_length(n) {
                naive.push(x.bit(consumed));
                consumed += 1;
            }
            let padded = naive.len() + plan.pad_length(n) as usize;
            naive.resize(padded, false);
        }
        let diluted = dilute(&alpha, &source).unwrap().prefix(total).unwrap();
        if diluted.bits() != naive.as_slice() {
            fail(4, &format!("bitstream mismatch at alpha {p}/{q}"));
        }
    }
    pass(4, "offsets, proof inequalities, and bit-for-bit layout agree for n <= 1000 and all five alphas");
}

#[test]
fn criterion_05_dilution_scaling() {
    let start = Instant::now();
    let model = ComplexityModel::v1();
    let tail = galekit_core::complexity::default_tail_fraction();
    let source = SequenceSource::seeded_random(7);
    const HORIZON: usize = 50_000;
    let (_, d0) = dim_estimate(&model, &source, HORIZON, &tail).unwrap();
    let (_, s0) = strong_dim_estimate(&model, &source, HORIZON, &tail).unwrap();
    if d0 < ratio(9, 10) {
        fail(5, &format!("undiluted dim estimate {} < 0.9", f64_of(&d0)));
    }
    let bound = ratio(1, 10);
    let mut failures = Vec::new();
    let mut report = Vec::new();
    for (p, q) in [(1i64, 4i64), (1, 2), (3, 4)] {
        let alpha = ratio(p, q);
        let diluted = dilute(&alpha, &source).unwrap();
        let (_, d) = dim_estimate(&model, &diluted, HORIZON, &tail).unwrap();
        let (_, s) = strong_dim_estimate(&model, &diluted, HORIZON, &tail).unwrap();
        let err_d = (&d - &alpha * &d0).abs();
        let err_s = (&s - &alpha * &s0).abs();
        report.push(format!(
            "alpha {p}/{q}: dim {:.4} (err {:.4}), strong {:.4} (err {:.4})",
            f64_of(&d),
            f64_of(&err_d),
            f64_of(&s),
            f64_of(&err_s)
        ));
        if err_d > bound {
            failures.push(format!(
                "dim error {:.4} > 0.1 at alpha {p}/{q}",
                f64_of(&err_d)
            ));
        }
        if err_s > bound {
            failures.push(format!(
                "strong error {:.4} > 0.1 at alpha {p}/{q}",
                f64_of(&err_s)
            ));
        }
    }
    let elapsed = start.elapsed();
    if elapsed >= Duration::from_secs(300) {
        failures.push(format!("runtime {elapsed:?} exceeds 5 min"));
    }
    if !failures.is_empty() {
        fail(
            5,
            &format!(
                "{} [{}] — the optimal-parse cost of the block/pad interleaving carries \
                 Theta(sqrt(n) log n) header bits at this horizon, an intrinsic positive \
                 bias of ~0.07-0.14 for the shipped code; see README \"Known deviations\"",
                failures.join("; "),
                report.join("; ")
            ),
        );
    }
    pass(5, &format!("{} in {elapsed:?}", report.join("; ")));
}

#[test]
fn criterion_06_dim_strong_dim_separation() {
    let model = ComplexityModel::v1();
    let source = SequenceSource::block_alternating(7, 4).unwrap();
    let tail = ratio(1, 4);
    let (_, d) = dim_estimate(&model, &source, 1 << 16, &tail).unwrap();
    let (_, s) = strong_dim_estimate(&model, &source, 1 << 16, &tail).unwrap();
    if d > ratio(3, 5) {
        fail(6, &format!("dim estimate {} > 0.6", f64_of(&d)));
    }
    if s < ratio(2, 5) {
        fail(6, &format!("strong estimate {} < 0.4", f64_of(&s)));
    }
    if &s - &d < ratio(1, 5) {
        fail(6, &format!("gap {} < 0.2", f64_of(&(&s - &d))));
    }
    pass(
        6,
        &format!(
            "dim {:.4} <= 0.6, strong {:.4} >= 0.4, gap {:.4} >= 0.2 at horizon 2^16",
            f64_of(&d),
            f64_of(&s),
            f64_of(&(&s - &d))
        ),
    );
}

#[test]
fn criterion_07_schnorr_measures_exact() {
    for i in 0..=20u32 {
        let fam = galekit_core::randtest::make_schnorr_level(i, &[Word::empty()]).unwrap();
        if fam.measure() != &pow2_neg(i as u64) {
            fail(7, &format!("level {i} measure {} != 2^-{i}", fam.measure()));
        }
    }
    pass(7, "mu(U_i) = 2^-i exactly for all i <= 20");
}

#[test]
fn criterion_08_selection_rules() {
    // Phi recursion against direct unrolling, exhaustively to length 10.
    let rules = [
        SelectionRule::all(),
        SelectionRule::even_length(),
        SelectionRule::powers_of_two(),
    ];
    for rule in &rules {
        for len in 0..=10usize {
            for v in 0..(1u32 << len) {
                let w = word_of(v, len);
                // Direct unrolling of phi(wb) = phi(w)b if selected else phi(w).
                let mut unrolled = Word::empty();
                let mut seen = Word::empty();
                for i in 0..w.len() {
                    if rule.selects(&seen) {
                        unrolled.push(w.bit(i));
                    }
                    seen.push(w.bit(i));
                }
                if rule.phi(&w) != unrolled {
                    fail(8, &format!("phi mismatch for rule {} at {w}", rule.name()));
                }
            }
        }
    }
    // Powers-of-two density at horizon 1024: eleven selected positions
    // (1, 2, 4, ..., 1024); the minimum density is attained just before the
    // eleventh, at m = 1023 — the hand count behind the 11/1024-scale bound.
    let ones = SequenceSource::periodic(&Word::from_str01("1").unwrap()).unwrap();
    let rep = select_subsequence(&SelectionRule::powers_of_two(), &ones, 1024).unwrap();
    if rep.selected.len() != 11 {
        fail(
            8,
            &format!("selected {} bits, expected 11", rep.selected.len()),
        );
    }
    if rep.min_ratio != ratio(10, 1023) || rep.min_ratio > ratio(11, 1024) {
        fail(
            8,
            &format!("min ratio {} != hand-counted 10/1023", rep.min_ratio),
        );
    }
    // remove_sparse along D, then selecting along D, yields all zeros.
    let sparse = remove_sparse(&ones, &PositionSet::powers_of_two());
    let sel = select_subsequence(&SelectionRule::powers_of_two(), &sparse, 1024).unwrap();
    if !sel.selected.bits().iter().all(|&b| !b) {
        fail(8, "selection along D after remove_sparse is not all-zeros");
    }
    pass(8, "phi recursion exhaustive to length 10; min density 10/1023 (11 picks by 1024); remove_sparse/selection composition all-zero");
}

#[test]
fn criterion_09_wadge_dim1() {
    let start = Instant::now();
    let mixture = catalog_mixture();
    let budget = SearchBudget::default();
    let x = SequenceSource::zeros();
    let run_false = wadge_dim1(&LevelOracle::const_false(), &x, 20, &mixture, &budget).unwrap();
    assert_eq!(run_false.trace.len(), 20);
    for st in &run_false.trace {
        if !st.boundary_within_linear {
            fail(
                9,
                &format!("oracle false: mixture(tau) > |tau| at stage {}", st.s),
            );
        }
        if st.a.is_some() {
            fail(
                9,
                &format!("oracle false: unexpected substage (a) at stage {}", st.s),
            );
        }
    }
    let run_true = wadge_dim1(&LevelOracle::const_true(), &x, 20, &mixture, &budget).unwrap();
    let witnesses = run_true
        .trace
        .iter()
        .filter(|st| {
            st.a.as_ref()
                .is_some_and(|a| a.found && a.meets_requirement)
        })
        .count();
    let elapsed = start.elapsed();
    if elapsed >= Duration::from_secs(120) {
        fail(9, &format!("runtime {elapsed:?} exceeds 2 min"));
    }
    if witnesses != 20 {
        fail(
            9,
            &format!(
                "oracle true: {witnesses}/20 substage-(a) witnesses with mixture(sigma) >= 2^|sigma| \
                 (oracle-false clause passed; the witness clause is unattainable for any finite \
                 mixture of martingales: its initial capital 1023/1024 < 1 forces \
                 mixture(sigma) < 2^|sigma| on every word, so every stage honestly reports \
                 witness-not-found; see README \"Known deviations\")"
            ),
        );
    }
    pass(9, &format!("both oracle clauses witnessed in {elapsed:?}"));
}

#[test]
fn criterion_10_wadge_dimstr() {
    let model = ComplexityModel::v1();
    let budget = SearchBudget::default();
    let run = wadge_dimstr(
        &LevelOracle::const_false(),
        &SequenceSource::zeros(),
        10,
        &Q::from_integer(0.into()),
        &model,
        &budget,
    )
    .unwrap();
    let tail = galekit_core::complexity::default_tail_fraction();
    let (_, s) = strong_dim_estimate(&model, &run.source(), run.output.len(), &tail).unwrap();
    if s > ratio(1, 10) {
        fail(10, &format!("strong dim estimate {} > 0.1", f64_of(&s)));
    }
    let inexact: Vec<u64> = run
        .trace
        .iter()
        .filter(|st| !st.pad_exact)
        .map(|st| st.s)
        .collect();
    if !inexact.is_empty() {
        fail(
            10,
            &format!(
                "strong-dim clause passed ({:.5} <= 0.1) but stages {:?} have boundaries off \
                 |sigma|^2 (exact squaring doubles the exponent each stage and needs 2^512 bits \
                 by stage 10; the shipped transducer caps pads at 2^16 and forces one bit of \
                 progress per stage, flagging every capped stage; see README \"Known deviations\")",
                f64_of(&s),
                inexact
            ),
        );
    }
    pass(
        10,
        &format!(
            "strong dim {:.5} <= 0.1 and all stage boundaries exactly |sigma|^2",
            f64_of(&s)
        ),
    );
}

#[test]
fn criterion_11_cdim_catalog_estimate() {
    let mixture = catalog_mixture();
    let grid = default_s_grid();
    let bound = ratio(1, 20); // 0.05
    let zeros = SequenceSource::zeros();
    let per01 = SequenceSource::periodic(&Word::from_str01("01").unwrap()).unwrap();
    let rand = SequenceSource::seeded_random(7);
    let ladder_cheap = [500usize, 1000, 2000];
    let ladder_rand = [250usize, 500, 1000];
    for (name, src, ladder, check) in [
        ("all-zeros", &zeros, &ladder_cheap, "low"),
        ("periodic-01", &per01, &ladder_cheap, "low"),
        ("seeded-random", &rand, &ladder_rand, "one"),
    ] {
        let mut prev: Option<Q> = None;
        for &h in ladder {
            let est = cdim_catalog_estimate(src, &mixture, &grid, h).unwrap();
            match check {
                "low" if est > bound => fail(
                    11,
                    &format!("{name} @ {h}: estimate {} > 0.05", f64_of(&est)),
                ),
                "one" if est != ratio(1, 1) => {
                    fail(11, &format!("{name} @ {h}: estimate {} != 1", f64_of(&est)))
                }
                _ => {}
            }
            if let Some(p) = &prev {
                if &est > p {
                    fail(
                        11,
                        &format!("{name}: estimate not antitone on the ladder at horizon {h}"),
                    );
                }
            }
            prev = Some(est);
        }
    }
    pass(
        11,
        "zeros and periodic <= 0.05, seeded-random = 1, antitone on all three horizon ladders",
    );
}

// --- criterion 12 support: an independent brute-force tree evaluator -------

fn brute_force_holds(f: &HierarchyFormula, ctx: &EvalContext, bounds: &[u64]) -> Option<bool> {
    fn rec(
        f: &HierarchyFormula,
        ctx: &EvalContext,
        bounds: &[u64],
        vars: &mut Vec<u64>,
    ) -> Result<bool, CoreError> {
        let depth = vars.len();
        if depth == f.quantifiers().len() {
            return f.eval_kernel(vars, ctx);
        }
        let mut acc = match f.quantifiers()[depth] {
            QuantKind::Exists => false,
            QuantKind::ForAll => true,
        };
        for k in 1..=bounds[depth] {
            vars.push(k);
            let sub = rec(f, ctx, bounds, vars)?;
            vars.pop();
            match f.quantifiers()[depth] {
                QuantKind::Exists => acc = acc || sub,
                QuantKind::ForAll => acc = acc && sub,
            }
        }
        Ok(acc)
    }
    rec(f, ctx, bounds, &mut Vec::new()).ok()
}

fn random_formula(seed: u64) -> (HierarchyFormula, Vec<u64>) {
    let r = |i: u64| splitmix64_at(seed, i);
    let depth = 1 + (r(0) % 3) as usize;
    let quantifiers: Vec<QuantKind> = (0..depth)
        .map(|i| {
            if r(1 + i as u64) % 2 == 0 {
                QuantKind::Exists
            } else {
                QuantKind::ForAll
            }
        })
        .collect();
    let bounds: Vec<u64> = (0..depth).map(|i| 1 + r(10 + i as u64) % 8).collect();
    // Kernel family: arithmetic congruences over the variables mixed with a
    // prefix bit lookup.
    let a = 1 + r(20) % 7;
    let b = 1 + r(21) % 7;
    let m = 2 + r(22) % 5;
    let variant = r(23) % 3;
    let kernel = move |vars: &[u64], ctx: &EvalContext| -> Result<bool, CoreError> {
        let first = vars[0];
        let last = vars[vars.len() - 1];
        Ok(match variant {
            0 => (a * first + b * last).is_multiple_of(m),
            // The lookup depth never exceeds `last`, so both evaluators see
            // enough materialized prefix bits.
            1 => {
                ctx.prefix((1 + a % last) as usize)
                    .iter()
                    .filter(|&&x| x)
                    .count() as u64
                    % m
                    == first % m
            }
            _ => vars.iter().sum::<u64>() % m < b,
        })
    };
    let f = HierarchyFormula::new(
        format!("random-{seed}"),
        quantifiers,
        KernelKind::Decidable,
        false,
        kernel,
    )
    .unwrap();
    (f, bounds)
}

#[test]
fn criterion_12_bounded_evaluator() {
    let source = SequenceSource::seeded_random(3);
    // Part 1: 200 random formulas, bounds <= 8, against the brute-force tree.
    for seed in 0..200u64 {
        let (formula, bounds) = random_formula(seed);
        let report = eval_bounded(&formula, &source, &bounds).unwrap();
        let max_prefix = *bounds.iter().max().unwrap() as usize;
        let prefix = source.prefix(max_prefix).unwrap();
        let ctx = EvalContext::new(prefix.bits().to_vec(), None);
        let expected = brute_force_holds(&formula, &ctx, &bounds).unwrap();
        let got = match report.verdict {
            Verdict::HoldsAtBounds => true,
            Verdict::FailsAtBounds => false,
            Verdict::KernelTimeout => fail(12, &format!("unexpected timeout on formula {seed}")),
        };
        if got != expected {
            fail(
                12,
                &format!("formula {seed}: evaluator {got}, brute force {expected}"),
            );
        }
    }
    // Part 2: dim_le/dim_ge consistency across the shipped grid. The slack
    // bound k = 40 is finer than the grid spacing 1/20, so le(alpha) and
    // ge(alpha') can never both hold for alpha' > alpha on the same trace.
    let bounds = [40u64, 64, 2048];
    let grid = default_s_grid();
    for src in [SequenceSource::zeros(), SequenceSource::seeded_random(7)] {
        let le: Vec<bool> = grid
            .iter()
            .map(|a| {
                eval_bounded(
                    &dim_le_formula(&ApproxReal::constant(a.clone())),
                    &src,
                    &bounds,
                )
                .unwrap()
                .verdict
                    == Verdict::HoldsAtBounds
            })
            .collect();
        let ge: Vec<bool> = grid
            .iter()
            .map(|a| {
                eval_bounded(
                    &dim_ge_formula(&ApproxReal::constant(a.clone())),
                    &src,
                    &bounds,
                )
                .unwrap()
                .verdict
                    == Verdict::HoldsAtBounds
            })
            .collect();
        for i in 0..grid.len() {
            for j in (i + 1)..grid.len() {
                if le[i] && ge[j] {
                    fail(
                        12,
                        &format!(
                            "both dim<={} and dim>={} hold on {}",
                            grid[i],
                            grid[j],
                            src.label()
                        ),
                    );
                }
            }
        }
    }
    pass(12, "200 random formulas match the brute-force tree; dim_le/dim_ge never jointly hold for alpha' > alpha on the shipped grid");
}

#[test]
fn criterion_13_roundtrip_and_determinism() {
    const N: usize = 100_000;
    let alpha = ratio(1, 2);
    let source = SequenceSource::seeded_random(7);
    let recovered = undilute(&alpha, &dilute(&alpha, &source).unwrap()).unwrap();
    let original = source.prefix(N).unwrap();
    if recovered.prefix(N).unwrap() != original {
        fail(13, "undilute(dilute(x)) != x on 10^5 bits");
    }
    // Determinism: repeated runs byte-identical, for the transform chain and
    // for both file formats.
    let again = undilute(&alpha, &dilute(&alpha, &source).unwrap())
        .unwrap()
        .prefix(N)
        .unwrap();
    if again != recovered.prefix(N).unwrap() {
        fail(13, "repeated transform runs differ");
    }
    for format in [galekit::BitFormat::Ascii, galekit::BitFormat::Packed] {
        let mut first = Vec::new();
        let mut second = Vec::new();
        galekit::write_bits(&mut first, original.bits(), format).unwrap();
        galekit::write_bits(&mut second, original.bits(), format).unwrap();
        if first != second {
            fail(13, "repeated serializations differ");
        }
        let back = galekit::read_bits(&mut first.as_slice()).unwrap();
        if back != original.bits() {
            fail(13, "format round-trip corrupted the stream");
        }
    }
    pass(
        13,
        "dilute/undilute identity on 10^5 bits; repeated runs and both formats byte-identical",
    );
}
