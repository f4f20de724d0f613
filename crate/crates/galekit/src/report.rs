//! Machine-readable report shapes (JSON) and CSV trace export.
//!
//! Every estimate is model- and horizon-relative; the JSON shapes carry
//! that labelling explicitly so downstream consumers cannot mistake a
//! finite proxy for a limit claim.

use galekit_core::complexity::RatioTrace;
use galekit_core::gales::{Order, ValuedProcess};
use galekit_core::Q;
use num_traits::ToPrimitive;
use serde::Serialize;
use std::io::{self, Write};

/// Serializes an exact rational as `num/den` (always with the slash).
pub fn q_str(q: &Q) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Best-effort float view of an exact rational, for the human-facing
/// columns only.
pub fn q_f64(q: &Q) -> f64 {
    match (q.numer().to_f64(), q.denom().to_f64()) {
        (Some(n), Some(d)) if d != 0.0 => n / d,
        _ => f64::NAN,
    }
}

/// Parses a command-line rational, which must be written `p/q`.
pub fn parse_q(s: &str) -> Result<Q, String> {
    let (p, q) = s
        .split_once('/')
        .ok_or_else(|| format!("rational '{s}' must be written p/q"))?;
    let num: num_bigint::BigInt = p
        .trim()
        .parse()
        .map_err(|_| format!("invalid numerator '{p}'"))?;
    let den: num_bigint::BigInt = q
        .trim()
        .parse()
        .map_err(|_| format!("invalid denominator '{q}'"))?;
    if den == num_bigint::BigInt::from(0) {
        return Err(format!("rational '{s}' has zero denominator"));
    }
    Ok(Q::new(num, den))
}

// ---------------------------------------------------------------------------
// JSON report shapes
// ---------------------------------------------------------------------------

#[derive(Serialize)]
pub struct EstimateReport {
    /// "dim" or "dimstr".
    pub kind: &'static str,
    /// Complexity model identifier; all estimates are model-relative.
    pub model: &'static str,
    pub horizon: usize,
    pub window_start: usize,
    pub tail_fraction: String,
    /// Exact estimate as `num/den`.
    pub estimate: String,
    pub estimate_float: f64,
}

#[derive(Serialize)]
pub struct MartingaleVerdictJson {
    pub name: String,
    pub max_value_log2: f64,
    pub max_at: usize,
    pub rejected: bool,
}

#[derive(Serialize)]
pub struct RandVerdictReport {
    pub horizon: usize,
    pub budget: String,
    pub catalog_consistent: bool,
    pub verdicts: Vec<MartingaleVerdictJson>,
}

#[derive(Serialize)]
pub struct SchnorrReport {
    pub levels: u32,
    /// Exact measure `1/2^i` per materialized level.
    pub level_measures: Vec<String>,
    /// Deepest level containing the input, if any.
    pub deepest_member: Option<u32>,
}

#[derive(Serialize)]
pub struct ClassifyReport {
    pub formula: String,
    pub bounds: Vec<u64>,
    /// "holds-at-bounds" | "fails-at-bounds" | "kernel-timeout".
    pub verdict: &'static str,
    /// Witnessing/refuting assignment along the deciding path.
    pub deciding: Vec<u64>,
}

#[derive(Serialize)]
pub struct CdimReport {
    pub horizon: usize,
    pub grid: Vec<String>,
    /// Least witnessed grid point (or 1/1 when none is witnessed).
    pub estimate: String,
    pub estimate_float: f64,
}

#[derive(Serialize)]
pub struct WadgeDim1StageJson {
    pub s: u64,
    pub k: Option<u64>,
    pub a_found: Option<bool>,
    pub a_sigma_len: Option<usize>,
    pub a_meets_requirement: Option<bool>,
    pub b_found: bool,
    pub boundary_len: usize,
    pub boundary_value: String,
    pub boundary_within_linear: bool,
}

#[derive(Serialize)]
pub struct WadgeDimstrStageJson {
    pub s: u64,
    pub k: Option<u64>,
    pub a_found: Option<bool>,
    pub a_len: Option<usize>,
    pub b_found: Option<bool>,
    pub b_len: Option<usize>,
    pub sigma_len: usize,
    pub pad_len: usize,
    pub pad_exact: bool,
    pub boundary_len: usize,
}

#[derive(Serialize)]
pub struct SelectReport {
    pub rule: String,
    pub horizon: usize,
    pub selected_len: usize,
    pub min_ratio: String,
    pub min_at: usize,
}

// ---------------------------------------------------------------------------
// CSV trace export
// ---------------------------------------------------------------------------

/// Writes a complexity-ratio trace as CSV: `n, C, ratio, ratio_float`.
pub fn write_ratio_trace_csv<W: Write>(w: &mut W, trace: &RatioTrace) -> io::Result<()> {
    writeln!(w, "n,C,ratio,ratio_float")?;
    for e in &trace.entries {
        writeln!(
            w,
            "{},{},{},{}",
            e.n,
            e.complexity,
            q_str(&e.ratio),
            q_f64(&e.ratio)
        )?;
    }
    Ok(())
}

/// Writes a gale-run trace as CSV: `n, value, h, ratio, ratio_float`, where
/// `ratio = value / h(n)`. Exact rationals are emitted as `num/den`; values
/// outside rational range (huge power-of-two exponents) fall back to a
/// base-2 logarithm column rendered as `log2:<x>`.
pub fn write_gale_trace_csv<W: Write>(
    w: &mut W,
    process: &ValuedProcess,
    order: &Order,
    bits: &[bool],
) -> io::Result<()> {
    writeln!(w, "n,value,h,ratio,ratio_float")?;
    let mut stepper = process.stepper();
    for (i, &bit) in bits.iter().enumerate() {
        stepper.step(bit);
        let n = i + 1;
        let v = stepper.value();
        let h = order.evaluate(n as u64);
        let (v_str, h_str, ratio_str, ratio_float) = match (v.to_rational(), h.to_rational()) {
            (Some(vq), Some(hq)) if !hq.numer().to_string().is_empty() => {
                let ratio = &vq / &hq;
                (q_str(&vq), q_str(&hq), q_str(&ratio), q_f64(&ratio))
            }
            _ => {
                let rl = v.log2() - h.log2();
                (
                    format!("log2:{}", v.log2()),
                    format!("log2:{}", h.log2()),
                    format!("log2:{rl}"),
                    rl.exp2(),
                )
            }
        };
        writeln!(w, "{n},{v_str},{h_str},{ratio_str},{ratio_float}")?;
    }
    Ok(())
}
