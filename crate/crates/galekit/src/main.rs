//! `galekit` — command-line front end for the constructive-dimension
//! laboratory.
//!
//! Exit codes: 0 success, 1 domain error, 2 I/O error, 64 usage error.
//! Rationals on the command line are always written `p/q`; the environment
//! variable `GALEKIT_SEED` overrides `--seed`.

use std::fs::File;
use std::io::{self, Read, Write};

use clap::error::ErrorKind as ClapErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::One;

use galekit::format::{read_bits, write_bits, BitFormat};
use galekit::report::{
    parse_q, q_f64, q_str, write_gale_trace_csv, write_ratio_trace_csv, CdimReport, ClassifyReport,
    EstimateReport, MartingaleVerdictJson, RandVerdictReport, SchnorrReport, SelectReport,
    WadgeDim1StageJson, WadgeDimstrStageJson,
};
use galekit_core::bitseq::{SequenceSource, Word, DEFAULT_SEED};
use galekit_core::classify::{
    cdim_catalog_estimate, default_s_grid, dim_ge_formula, dim_le_formula, dimstr_formulas,
    eval_bounded, ApproxReal, HierarchyFormula, Verdict,
};
use galekit_core::complexity::{
    default_tail_fraction, dim_estimate, strong_dim_estimate, ComplexityModel,
};
use galekit_core::gales::{catalog, catalog_mixture, standard_order, Order, ValuedProcess};
use galekit_core::randtest::{
    catalog_random_verdict, default_budget, make_schnorr_level, test_membership, TestFamily,
    TestKind, DEFAULT_DEPTH_LIMIT,
};
use galekit_core::reductions::{wadge_dim1, wadge_dimstr, LevelOracle, SearchBudget};
use galekit_core::transforms::{dilute, select_subsequence, undilute, DilutionPlan, SelectionRule};
use galekit_core::{CoreError, Q};

// ---------------------------------------------------------------------------
// Error plumbing
// ---------------------------------------------------------------------------

enum AppError {
    /// Invalid parameters or values outside the mathematical domain → 1.
    Domain(String),
    /// Filesystem / stream / encoding failure → 2.
    Io(String),
}

type AppResult<T> = Result<T, AppError>;

impl From<CoreError> for AppError {
    fn from(e: CoreError) -> Self {
        AppError::Domain(e.to_string())
    }
}

impl From<io::Error> for AppError {
    fn from(e: io::Error) -> Self {
        AppError::Io(e.to_string())
    }
}

fn domain(msg: impl Into<String>) -> AppError {
    AppError::Domain(msg.into())
}

// ---------------------------------------------------------------------------
// CLI surface
// ---------------------------------------------------------------------------

#[derive(Parser)]
#[command(
    name = "galekit",
    about = "Exact-arithmetic constructive-dimension laboratory",
    version
)]
struct Cli {
    /// Worker-thread bound for parallel stages (results are independent of
    /// this value). Defaults to the number of available cores.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Zeros,
    Periodic,
    SeededRandom,
    BlockAlternating,
}

#[derive(Clone, Copy, ValueEnum)]
enum RuleKind {
    All,
    Even,
    PowersOfTwo,
}

#[derive(Clone, Copy, ValueEnum)]
enum WadgeVariant {
    Dim1,
    Dimstr,
}

#[derive(Clone, Copy, ValueEnum)]
enum ClassKind {
    DimLe,
    DimGe,
    DimstrLe,
    DimstrGe,
}

#[derive(Args)]
struct OutArgs {
    /// Output path ('-' for stdout).
    #[arg(long, default_value = "-")]
    out: String,
    /// Output bitstream format.
    #[arg(long, default_value = "ascii")]
    format: BitFormat,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a bitstream from one of the shipped deterministic sources.
    Gen {
        #[arg(long, value_enum)]
        kind: GenKind,
        /// Number of bits to emit.
        #[arg(long)]
        n: usize,
        /// Pattern for --kind periodic, as a 0/1 string.
        #[arg(long)]
        pattern: Option<String>,
        /// Seed for the seeded sources (overridden by GALEKIT_SEED).
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Block-length growth factor for --kind block-alternating.
        #[arg(long, default_value_t = 4)]
        factor: u64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Dilute a bitstream: block n of 2n-1 input bits, then a zero pad.
    Dilute {
        /// Dilution rate, 0 < p/q < 1.
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value = "-")]
        r#in: String,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Invert the dilution: recover every input bit determined by the
    /// diluted stream.
    Undilute {
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value = "-")]
        r#in: String,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Apply a selection rule and emit the selected subsequence.
    Select {
        #[arg(long, value_enum)]
        rule: RuleKind,
        #[arg(long, default_value = "-")]
        r#in: String,
        /// Emit the selection report as JSON (to stderr; bits go to --out).
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Model-relative dimension estimate (tail-window minimum of C(A|n)/n).
    EstimateDim {
        #[command(flatten)]
        est: EstimateArgs,
    },
    /// Model-relative strong-dimension estimate (tail-window maximum).
    EstimateDimstr {
        #[command(flatten)]
        est: EstimateArgs,
    },
    /// Run a catalog martingale (or the mixture) along a bitstream and emit
    /// the value trace as CSV.
    GaleRun {
        #[arg(long, default_value = "-")]
        r#in: String,
        /// "mixture" or a catalog index 0..=9.
        #[arg(long, default_value = "mixture")]
        gale: String,
        /// Order parameter s (p/q, 0 <= s < 1) selecting h_s(n) = 2^((1-s)n);
        /// omitted means the constant order h = 1.
        #[arg(long)]
        s: Option<String>,
        /// CSV output path ('-' for stdout).
        #[arg(long, default_value = "-")]
        trace: String,
    },
    /// Materialize the leftmost nested Schnorr test and locate the input.
    SchnorrTest {
        /// Deepest level to materialize (<= 20).
        #[arg(long)]
        levels: u32,
        #[arg(long, default_value = "-")]
        r#in: String,
        #[arg(long)]
        json: bool,
    },
    /// Finite-horizon randomness verdict against the martingale catalog.
    RandVerdict {
        #[arg(long, default_value = "-")]
        r#in: String,
        #[arg(long)]
        horizon: Option<usize>,
        /// Rejection budget as p/q (default 1048576/1).
        #[arg(long)]
        budget: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Run a stage-wise reduction transducer; bits to --out, stage trace as
    /// JSON lines to --trace (default stderr).
    Wadge {
        #[arg(long, value_enum)]
        variant: WadgeVariant,
        /// Target rate for --variant dimstr (p/q, 0 <= alpha < 1).
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long)]
        stages: u64,
        /// "true", "false", or a path to an oracle listing file with lines
        /// "k t prefix" (prefix a 0/1 string, possibly empty as "-").
        #[arg(long)]
        oracle: String,
        /// Input sequence X ('-' for stdin; omitted = all-zeros).
        #[arg(long)]
        r#in: Option<String>,
        /// JSONL trace path ('-' for stderr).
        #[arg(long, default_value = "-")]
        trace: String,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Evaluate a bounded-quantifier dimension-class formula on the input.
    Classify {
        #[arg(long, value_enum)]
        class: ClassKind,
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value = "-")]
        r#in: String,
        /// Quantifier bounds a,b,c (default 4,64,4096).
        #[arg(long)]
        bounds: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Catalog/horizon-relative constructive-dimension estimate.
    CdimEst {
        #[arg(long, default_value = "-")]
        r#in: String,
        #[arg(long)]
        horizon: Option<usize>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct EstimateArgs {
    #[arg(long, default_value = "-")]
    r#in: String,
    /// Prefix length to analyze (default: full input; must be >= 16).
    #[arg(long)]
    horizon: Option<usize>,
    /// Tail-window fraction as p/q in (0,1) (default 1/2).
    #[arg(long)]
    tail: Option<String>,
    /// Write the full ratio trace as CSV to this path.
    #[arg(long)]
    trace: Option<String>,
    #[arg(long)]
    json: bool,
}

// ---------------------------------------------------------------------------
// IO helpers
// ---------------------------------------------------------------------------

fn read_input(path: &str) -> AppResult<Vec<bool>> {
    if path == "-" {
        Ok(read_bits(&mut io::stdin().lock())?)
    } else {
        let mut f =
            File::open(path).map_err(|e| AppError::Io(format!("cannot open '{path}': {e}")))?;
        Ok(read_bits(&mut f)?)
    }
}

fn write_output(out: &OutArgs, bits: &[bool]) -> AppResult<()> {
    if out.out == "-" {
        let stdout = io::stdout();
        let mut lock = stdout.lock();
        write_bits(&mut lock, bits, out.format)?;
        lock.flush()?;
    } else {
        let mut f = File::create(&out.out)
            .map_err(|e| AppError::Io(format!("cannot create '{}': {e}", out.out)))?;
        write_bits(&mut f, bits, out.format)?;
    }
    Ok(())
}

fn open_writer(path: &str) -> AppResult<Box<dyn Write>> {
    if path == "-" {
        Ok(Box::new(io::stdout().lock()))
    } else {
        Ok(Box::new(File::create(path).map_err(|e| {
            AppError::Io(format!("cannot create '{path}': {e}"))
        })?))
    }
}

fn parse_alpha(s: &str) -> AppResult<Q> {
    parse_q(s).map_err(domain)
}

fn effective_seed(cli_seed: u64) -> AppResult<u64> {
    match std::env::var("GALEKIT_SEED") {
        Ok(v) => v
            .trim()
            .parse::<u64>()
            .map_err(|_| domain(format!("GALEKIT_SEED must be a u64, got '{v}'"))),
        Err(_) => Ok(cli_seed),
    }
}

fn print_json<T: serde::Serialize>(value: &T) -> AppResult<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| AppError::Io(format!("JSON serialization failed: {e}")))?;
    println!("{text}");
    Ok(())
}

// ---------------------------------------------------------------------------
// Subcommand implementations
// ---------------------------------------------------------------------------

fn run_gen(
    kind: GenKind,
    n: usize,
    pattern: Option<String>,
    seed: u64,
    factor: u64,
    out: &OutArgs,
) -> AppResult<()> {
    let seed = effective_seed(seed)?;
    let source = match kind {
        GenKind::Zeros => SequenceSource::zeros(),
        GenKind::Periodic => {
            let p = pattern.ok_or_else(|| domain("--kind periodic requires --pattern"))?;
            SequenceSource::periodic(&Word::from_str01(&p)?)?
        }
        GenKind::SeededRandom => SequenceSource::seeded_random(seed),
        GenKind::BlockAlternating => SequenceSource::block_alternating(seed, factor)?,
    };
    let prefix = source.prefix(n)?;
    write_output(out, prefix.bits())
}

fn run_dilute(alpha: &str, input: &str, out: &OutArgs) -> AppResult<()> {
    let alpha = parse_alpha(alpha)?;
    let bits = read_input(input)?;
    let len = bits.len() as u64;
    let plan = DilutionPlan::new(alpha.clone())?;
    // Complete blocks B with B^2 <= len, plus the determined leading bits of
    // the partial block B+1.
    let mut complete = 0u64;
    while (complete + 1) * (complete + 1) <= len {
        complete += 1;
    }
    let leftover = len - complete * complete;
    let out_len = plan.total_length(complete) + leftover;
    let diluted = dilute(&alpha, &SequenceSource::file_backed(bits))?;
    let prefix = diluted.prefix(out_len as usize)?;
    write_output(out, prefix.bits())
}

fn run_undilute(alpha: &str, input: &str, out: &OutArgs) -> AppResult<()> {
    let alpha = parse_alpha(alpha)?;
    let bits = read_input(input)?;
    let m = bits.len() as u64;
    let plan = DilutionPlan::new(alpha.clone())?;
    // Every input bit whose position in the diluted stream is < m is
    // recoverable.
    let mut count = 0u64;
    let mut n = 1u64;
    loop {
        let start = plan.block_offset(n);
        if start >= m {
            break;
        }
        count += (m - start).min(plan.block_length(n));
        n += 1;
    }
    let recovered = undilute(&alpha, &SequenceSource::file_backed(bits))?;
    let prefix = recovered.prefix(count as usize)?;
    write_output(out, prefix.bits())
}

fn run_select(rule: RuleKind, input: &str, json: bool, out: &OutArgs) -> AppResult<()> {
    let rule = match rule {
        RuleKind::All => SelectionRule::all(),
        RuleKind::Even => SelectionRule::even_length(),
        RuleKind::PowersOfTwo => SelectionRule::powers_of_two(),
    };
    let bits = read_input(input)?;
    if bits.is_empty() {
        return Err(domain("select requires a nonempty input"));
    }
    let horizon = bits.len();
    let report = select_subsequence(&rule, &SequenceSource::file_backed(bits), horizon)?;
    write_output(out, report.selected.bits())?;
    let shape = SelectReport {
        rule: rule.name().to_string(),
        horizon: report.horizon,
        selected_len: report.selected.len(),
        min_ratio: q_str(&report.min_ratio),
        min_at: report.min_at,
    };
    if json {
        let text = serde_json::to_string(&shape)
            .map_err(|e| AppError::Io(format!("JSON serialization failed: {e}")))?;
        eprintln!("{text}");
    } else {
        eprintln!(
            "selected {} of {} bits (min density {} at n={})",
            shape.selected_len, shape.horizon, shape.min_ratio, shape.min_at
        );
    }
    Ok(())
}

fn run_estimate(strong: bool, est: &EstimateArgs) -> AppResult<()> {
    let bits = read_input(&est.r#in)?;
    let horizon = est.horizon.unwrap_or(bits.len());
    let tail = match &est.tail {
        Some(t) => parse_q(t).map_err(domain)?,
        None => default_tail_fraction(),
    };
    let model = ComplexityModel::v1();
    let source = SequenceSource::file_backed(bits);
    let (trace, estimate) = if strong {
        strong_dim_estimate(&model, &source, horizon, &tail)?
    } else {
        dim_estimate(&model, &source, horizon, &tail)?
    };
    if let Some(path) = &est.trace {
        let mut w = open_writer(path)?;
        write_ratio_trace_csv(&mut w, &trace)?;
    }
    let report = EstimateReport {
        kind: if strong { "dimstr" } else { "dim" },
        model: model.name(),
        horizon,
        window_start: trace.window_start,
        tail_fraction: q_str(&tail),
        estimate: q_str(&estimate),
        estimate_float: q_f64(&estimate),
    };
    if est.json {
        print_json(&report)
    } else {
        println!(
            "{} estimate (model {}, horizon {}, window from {}): {} ~ {:.4}",
            report.kind,
            report.model,
            report.horizon,
            report.window_start,
            report.estimate,
            report.estimate_float
        );
        Ok(())
    }
}

fn resolve_gale(spec: &str) -> AppResult<ValuedProcess> {
    if spec == "mixture" {
        return Ok(catalog_mixture().as_process());
    }
    let idx: usize = spec.parse().map_err(|_| {
        domain(format!(
            "--gale must be 'mixture' or an index, got '{spec}'"
        ))
    })?;
    let cat = catalog();
    cat.into_iter()
        .nth(idx)
        .ok_or_else(|| domain(format!("catalog index {idx} out of range")))
}

fn run_gale_run(input: &str, gale: &str, s: Option<&str>, trace: &str) -> AppResult<()> {
    let bits = read_input(input)?;
    let process = resolve_gale(gale)?;
    let order = match s {
        Some(s) => standard_order(&parse_q(s).map_err(domain)?)?,
        None => Order::from_fn("1", |_| galekit_core::gales::Value::one()),
    };
    let mut w = open_writer(trace)?;
    write_gale_trace_csv(&mut w, &process, &order, &bits)?;
    Ok(())
}

fn run_schnorr_test(levels: u32, input: &str, json: bool) -> AppResult<()> {
    if levels > DEFAULT_DEPTH_LIMIT {
        return Err(domain(format!(
            "--levels {levels} exceeds the depth limit {DEFAULT_DEPTH_LIMIT}"
        )));
    }
    let bits = read_input(input)?;
    if (bits.len() as u64) < levels as u64 {
        return Err(domain(format!(
            "input carries {} bits; {levels} levels need at least {levels}",
            bits.len()
        )));
    }
    let family = TestFamily::new(TestKind::Schnorr, DEFAULT_DEPTH_LIMIT, |i| {
        make_schnorr_level(i, &[Word::empty()])
    });
    let source = SequenceSource::file_backed(bits);
    let deepest = test_membership(&family, &source, levels)?;
    let measures: Vec<String> = (0..=levels)
        .map(|i| q_str(family.level(i).expect("materializable").measure()))
        .collect();
    let report = SchnorrReport {
        levels,
        level_measures: measures,
        deepest_member: deepest,
    };
    if json {
        print_json(&report)
    } else {
        match report.deepest_member {
            Some(i) => println!("input lies in every level up to U_{i} (of {levels})"),
            None => println!("input escapes the test at level 0"),
        }
        Ok(())
    }
}

fn run_rand_verdict(
    input: &str,
    horizon: Option<usize>,
    budget: Option<&str>,
    json: bool,
) -> AppResult<()> {
    let bits = read_input(input)?;
    let horizon = horizon.unwrap_or(bits.len());
    let budget = match budget {
        Some(b) => parse_q(b).map_err(domain)?,
        None => default_budget(),
    };
    let source = SequenceSource::file_backed(bits);
    let report = catalog_random_verdict(&source, horizon, &budget)?;
    let shape = RandVerdictReport {
        horizon: report.horizon,
        budget: q_str(&report.budget),
        catalog_consistent: report.catalog_consistent,
        verdicts: report
            .verdicts
            .iter()
            .map(|v| MartingaleVerdictJson {
                name: v.name.clone(),
                max_value_log2: v.max_value.log2(),
                max_at: v.max_at,
                rejected: v.rejected,
            })
            .collect(),
    };
    if json {
        print_json(&shape)
    } else {
        for v in &shape.verdicts {
            println!(
                "{:<34} max log2 {:>9.3} at n={:<6} {}",
                v.name,
                v.max_value_log2,
                v.max_at,
                if v.rejected { "REJECTED" } else { "ok" }
            );
        }
        println!(
            "catalog-consistent: {} (horizon {}, budget {})",
            shape.catalog_consistent, shape.horizon, shape.budget
        );
        Ok(())
    }
}

/// Oracle listing file: one entry per line, `k t prefix`, where `prefix` is
/// a 0/1 string or `-` for the empty word. `contains(k, s, w)` holds iff
/// some entry has the same `k`, `s <= t`, and its prefix is a prefix of
/// `w` — anti-monotone in `s` by construction.
fn load_oracle(spec: &str) -> AppResult<LevelOracle> {
    match spec {
        "true" => return Ok(LevelOracle::const_true()),
        "false" => return Ok(LevelOracle::const_false()),
        _ => {}
    }
    let mut text = String::new();
    File::open(spec)
        .map_err(|e| AppError::Io(format!("cannot open oracle file '{spec}': {e}")))?
        .read_to_string(&mut text)?;
    let mut entries: Vec<(u64, u64, Word)> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let parse_fail = || {
            domain(format!(
                "oracle file line {}: expected 'k t prefix'",
                lineno + 1
            ))
        };
        let k: u64 = parts
            .next()
            .and_then(|p| p.parse().ok())
            .ok_or_else(parse_fail)?;
        let t: u64 = parts
            .next()
            .and_then(|p| p.parse().ok())
            .ok_or_else(parse_fail)?;
        let w = match parts.next().ok_or_else(parse_fail)? {
            "-" => Word::empty(),
            s => Word::from_str01(s)?,
        };
        entries.push((k, t, w));
    }
    Ok(LevelOracle::new(format!("file:{spec}"), move |k, s, w| {
        entries
            .iter()
            .any(|(ek, et, ew)| *ek == k && s <= *et && ew.is_prefix_of(w))
    })?)
}

#[allow(clippy::too_many_arguments)]
fn run_wadge(
    variant: WadgeVariant,
    alpha: Option<&str>,
    stages: u64,
    oracle_spec: &str,
    input: Option<&str>,
    trace_path: &str,
    out: &OutArgs,
) -> AppResult<()> {
    let oracle = load_oracle(oracle_spec)?;
    let x = match input {
        Some(path) => SequenceSource::file_backed(read_input(path)?),
        None => SequenceSource::zeros(),
    };
    let budget = SearchBudget::default();
    let mut trace_lines: Vec<String> = Vec::new();
    let output = match variant {
        WadgeVariant::Dim1 => {
            if alpha.is_some() {
                return Err(domain("--alpha applies only to --variant dimstr"));
            }
            let run = wadge_dim1(&oracle, &x, stages, &catalog_mixture(), &budget)?;
            for st in &run.trace {
                let line = WadgeDim1StageJson {
                    s: st.s,
                    k: st.k,
                    a_found: st.a.as_ref().map(|a| a.found),
                    a_sigma_len: st.a.as_ref().map(|a| a.sigma_len),
                    a_meets_requirement: st.a.as_ref().map(|a| a.meets_requirement),
                    b_found: st.b_found,
                    boundary_len: st.boundary_len,
                    boundary_value: q_str(&st.boundary_value),
                    boundary_within_linear: st.boundary_within_linear,
                };
                trace_lines.push(
                    serde_json::to_string(&line)
                        .map_err(|e| AppError::Io(format!("JSON serialization failed: {e}")))?,
                );
            }
            run.output
        }
        WadgeVariant::Dimstr => {
            let alpha =
                parse_alpha(alpha.ok_or_else(|| domain("--variant dimstr requires --alpha"))?)?;
            let run = wadge_dimstr(&oracle, &x, stages, &alpha, &ComplexityModel::v1(), &budget)?;
            for st in &run.trace {
                let line = WadgeDimstrStageJson {
                    s: st.s,
                    k: st.k,
                    a_found: st.a.as_ref().map(|a| a.found),
                    a_len: st.a.as_ref().map(|a| a.len),
                    b_found: st.b.as_ref().map(|b| b.found),
                    b_len: st.b.as_ref().map(|b| b.len),
                    sigma_len: st.sigma_len,
                    pad_len: st.pad_len,
                    pad_exact: st.pad_exact,
                    boundary_len: st.boundary_len,
                };
                trace_lines.push(
                    serde_json::to_string(&line)
                        .map_err(|e| AppError::Io(format!("JSON serialization failed: {e}")))?,
                );
            }
            run.output
        }
    };
    write_output(out, output.bits())?;
    if trace_path == "-" {
        for line in &trace_lines {
            eprintln!("{line}");
        }
    } else {
        let mut w = open_writer(trace_path)?;
        for line in &trace_lines {
            writeln!(w, "{line}")?;
        }
    }
    Ok(())
}

fn build_formula(class: ClassKind, alpha: &Q) -> HierarchyFormula {
    let a = ApproxReal::constant(alpha.clone());
    match class {
        ClassKind::DimLe => dim_le_formula(&a),
        ClassKind::DimGe => dim_ge_formula(&a),
        ClassKind::DimstrLe => dimstr_formulas(&a).0,
        ClassKind::DimstrGe => dimstr_formulas(&a).1,
    }
}

fn run_classify(
    class: ClassKind,
    alpha: &str,
    input: &str,
    bounds: Option<&str>,
    json: bool,
) -> AppResult<()> {
    let alpha = parse_alpha(alpha)?;
    let bounds: Vec<u64> = match bounds {
        Some(spec) => spec
            .split(',')
            .map(|p| p.trim().parse::<u64>())
            .collect::<Result<_, _>>()
            .map_err(|_| {
                domain(format!(
                    "--bounds must be comma-separated integers, got '{spec}'"
                ))
            })?,
        None => galekit_core::classify::default_bounds().to_vec(),
    };
    let bits = read_input(input)?;
    let formula = build_formula(class, &alpha);
    let report = eval_bounded(&formula, &SequenceSource::file_backed(bits), &bounds)?;
    let shape = ClassifyReport {
        formula: formula.name().to_string(),
        bounds,
        verdict: match report.verdict {
            Verdict::HoldsAtBounds => "holds-at-bounds",
            Verdict::FailsAtBounds => "fails-at-bounds",
            Verdict::KernelTimeout => "kernel-timeout",
        },
        deciding: report.deciding,
    };
    if json {
        print_json(&shape)
    } else {
        println!(
            "{}: {} (bounds {:?}, deciding path {:?})",
            shape.formula, shape.verdict, shape.bounds, shape.deciding
        );
        Ok(())
    }
}

fn run_cdim_est(input: &str, horizon: Option<usize>, json: bool) -> AppResult<()> {
    let bits = read_input(input)?;
    let horizon = horizon.unwrap_or(bits.len());
    let grid = default_s_grid();
    let estimate = cdim_catalog_estimate(
        &SequenceSource::file_backed(bits),
        &catalog_mixture(),
        &grid,
        horizon,
    )?;
    let shape = CdimReport {
        horizon,
        grid: grid.iter().map(q_str).collect(),
        estimate: q_str(&estimate),
        estimate_float: q_f64(&estimate),
    };
    if json {
        print_json(&shape)
    } else {
        if estimate.is_one() {
            println!(
                "cdim estimate: 1/1 (no grid point witnessed at horizon {})",
                shape.horizon
            );
        } else {
            println!(
                "cdim estimate: {} ~ {:.4} (horizon {})",
                shape.estimate, shape.estimate_float, shape.horizon
            );
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

fn dispatch(cli: Cli) -> AppResult<()> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(domain("--jobs must be at least 1"));
        }
    }
    match cli.command {
        Command::Gen {
            kind,
            n,
            pattern,
            seed,
            factor,
            out,
        } => run_gen(kind, n, pattern, seed, factor, &out),
        Command::Dilute { alpha, r#in, out } => run_dilute(&alpha, &r#in, &out),
        Command::Undilute { alpha, r#in, out } => run_undilute(&alpha, &r#in, &out),
        Command::Select {
            rule,
            r#in,
            json,
            out,
        } => run_select(rule, &r#in, json, &out),
        Command::EstimateDim { est } => run_estimate(false, &est),
        Command::EstimateDimstr { est } => run_estimate(true, &est),
        Command::GaleRun {
            r#in,
            gale,
            s,
            trace,
        } => run_gale_run(&r#in, &gale, s.as_deref(), &trace),
        Command::SchnorrTest { levels, r#in, json } => run_schnorr_test(levels, &r#in, json),
        Command::RandVerdict {
            r#in,
            horizon,
            budget,
            json,
        } => run_rand_verdict(&r#in, horizon, budget.as_deref(), json),
        Command::Wadge {
            variant,
            alpha,
            stages,
            oracle,
            r#in,
            trace,
            out,
        } => run_wadge(
            variant,
            alpha.as_deref(),
            stages,
            &oracle,
            r#in.as_deref(),
            &trace,
            &out,
        ),
        Command::Classify {
            class,
            alpha,
            r#in,
            bounds,
            json,
        } => run_classify(class, &alpha, &r#in, bounds.as_deref(), json),
        Command::CdimEst {
            r#in,
            horizon,
            json,
        } => run_cdim_est(&r#in, horizon, json),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ClapErrorKind::DisplayHelp | ClapErrorKind::DisplayVersion => 0,
                _ => 64,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let code = match dispatch(cli) {
        Ok(()) => 0,
        Err(AppError::Domain(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(AppError::Io(msg)) => {
            eprintln!("I/O error: {msg}");
            2
        }
    };
    std::process::exit(code);
}
