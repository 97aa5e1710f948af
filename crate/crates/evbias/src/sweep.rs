//! One-bias-at-a-time sweeps: vary a single register over a value grid with
//! every other register at its default, simulate the same scene with the
//! same seed for each value, score the accumulated frames, and tabulate
//! `(value, mean_ag, events, frames)` rows.
//!
//! Holding the seed and all non-test registers fixed makes the swept
//! register the only varying factor, so the resulting curve is attributable
//! to that register alone. Results serialize to a small CSV meant for any
//! external plotting tool, and [`trend`] condenses a curve to a Spearman
//! rank correlation for automated monotonicity checks.

use crate::bias::{bias_range, default_biases, tested_values, BiasName};
use crate::frame::{accumulate, FrameError, FrameMode};
use crate::scene::{SceneError, SceneSpec};
use crate::sharpness::mean_ag;
use crate::sim::{bias_to_params, simulate_with_params, SimError};

/// Everything a sweep run depends on. Identical configs produce
/// byte-identical CSVs.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    /// The register under test.
    pub bias: BiasName,
    /// Values to test, in output order.
    pub values: Vec<u8>,
    pub scene: SceneSpec,
    /// Simulation step, microseconds.
    pub dt_us: u64,
    /// Accumulation window, microseconds.
    pub period_us: u64,
    pub mode: FrameMode,
    pub seed: u64,
    /// When false, background activity is forced off for every row —
    /// useful for isolating scene-driven events (e.g. when counting
    /// events across a dead-time sweep).
    pub noise: bool,
}

impl SweepConfig {
    /// Sweep `bias` over its standard tested grid on `scene`, with the
    /// defaults used throughout: 200 us steps, 33 333 us windows (about
    /// 30 frames per second), polarity rendering, seed 0, noise on.
    pub fn new(bias: BiasName, scene: SceneSpec) -> SweepConfig {
        SweepConfig {
            bias,
            values: tested_values(bias).to_vec(),
            scene,
            dt_us: 200,
            period_us: 33_333,
            mode: FrameMode::Polarity,
            seed: 0,
            noise: true,
        }
    }
}

/// One measured point of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub bias: BiasName,
    pub value: u8,
    pub mean_ag: f64,
    pub events: u64,
    pub frames: u64,
}

/// Rows in request order, one per configured value.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SweepError {
    #[error("{bias} value {value} outside allowed range {lo}..={hi}")]
    ValueOutOfRange {
        bias: BiasName,
        value: u8,
        lo: u8,
        hi: u8,
    },
    #[error("rank correlation needs at least 3 rows, got {0}")]
    NotEnoughRows(usize),
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Frame(#[from] FrameError),
}

/// Runs the sweep. For each value the swept register is set on an
/// otherwise-default [`crate::bias::BiasSet`]; every row shares the scene,
/// step, period and seed. A row that produces no frames (no events at all)
/// scores `mean_ag = 0.0`.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepResult, SweepError> {
    let range = bias_range(config.bias);
    for &value in &config.values {
        if !range.contains(&value) {
            return Err(SweepError::ValueOutOfRange {
                bias: config.bias,
                value,
                lo: *range.start(),
                hi: *range.end(),
            });
        }
    }
    let sampler = config.scene.sampler()?;
    let mut rows = Vec::with_capacity(config.values.len());
    for &value in &config.values {
        let biases = default_biases().with_value(config.bias, value);
        let mut params = bias_to_params(&biases, config.dt_us)?;
        if !config.noise {
            params.lambda_ba_hz = 0.0;
        }
        let stream = simulate_with_params(&sampler, &params, config.seed)?;
        let frames = accumulate(&stream, config.period_us, config.mode)?;
        let score = if frames.is_empty() {
            0.0
        } else {
            mean_ag(&frames).expect("accumulated frames share one geometry")
        };
        rows.push(SweepRow {
            bias: config.bias,
            value,
            mean_ag: score,
            events: stream.len() as u64,
            frames: frames.len() as u64,
        });
    }
    Ok(SweepResult { rows })
}

/// Spearman rank correlation between bias value and mean score, average
/// ranks on ties. A constant column (zero rank variance on either side)
/// yields 0 — no trend either way.
pub fn trend(result: &SweepResult) -> Result<f64, SweepError> {
    if result.rows.len() < 3 {
        return Err(SweepError::NotEnoughRows(result.rows.len()));
    }
    let values: Vec<f64> = result.rows.iter().map(|r| r.value as f64).collect();
    let scores: Vec<f64> = result.rows.iter().map(|r| r.mean_ag).collect();
    Ok(spearman(&values, &scores))
}

/// Spearman rho: Pearson correlation of the two average-rank vectors.
/// Zero variance on either side yields 0.
pub fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len(), "rank correlation needs paired samples");
    let rx = average_ranks(xs);
    let ry = average_ranks(ys);
    let n = rx.len() as f64;
    let mean = |v: &[f64]| v.iter().sum::<f64>() / n;
    let (mx, my) = (mean(&rx), mean(&ry));
    let mut cov = 0.0;
    let mut var_x = 0.0;
    let mut var_y = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        let (dx, dy) = (a - mx, b - my);
        cov += dx * dy;
        var_x += dx * dx;
        var_y += dy * dy;
    }
    if var_x == 0.0 || var_y == 0.0 {
        return 0.0;
    }
    cov / (var_x * var_y).sqrt()
}

/// 1-based ranks; tied values share the average of their positions.
fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let shared = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = shared;
        }
        i = j + 1;
    }
    ranks
}

/// Formats with 6 significant digits in plain decimal notation
/// (locale-independent): `0.125` becomes `"0.125000"`.
pub fn format_sig6(v: f64) -> String {
    if v == 0.0 {
        return "0.000000".to_string();
    }
    let sci = format!("{v:e}");
    let exponent: i32 = sci
        .split('e')
        .nth(1)
        .expect("f64 {:e} format always contains an exponent")
        .parse()
        .expect("f64 {:e} exponent is an integer");
    let precision = (5 - exponent).max(0) as usize;
    format!("{v:.precision$}")
}

pub const SWEEP_CSV_HEADER: &str = "bias,value,mean_ag,events,frames";

/// Serializes a sweep as CSV: fixed header, one row per entry, `mean_ag`
/// with 6 significant digits, every line newline-terminated.
pub fn write_sweep_csv(result: &SweepResult) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for row in &result.rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            row.bias,
            row.value,
            format_sig6(row.mean_ag),
            row.events,
            row.frames
        ));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SweepCsvError {
    #[error("line 1: expected header {SWEEP_CSV_HEADER:?}")]
    BadHeader,
    #[error("line {line}: expected 5 comma-separated fields, got {got}")]
    FieldCount { line: usize, got: usize },
    #[error("line {line}: bad {field}: {text:?}")]
    BadField {
        line: usize,
        field: &'static str,
        text: String,
    },
}

/// Parses [`write_sweep_csv`] output back into rows.
pub fn read_sweep_csv(text: &str) -> Result<SweepResult, SweepCsvError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, line)) if line == SWEEP_CSV_HEADER => {}
        _ => return Err(SweepCsvError::BadHeader),
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(SweepCsvError::FieldCount {
                line: line_no,
                got: fields.len(),
            });
        }
        let field = |name: &'static str, text: &str| SweepCsvError::BadField {
            line: line_no,
            field: name,
            text: text.to_string(),
        };
        rows.push(SweepRow {
            bias: fields[0].parse().map_err(|_| field("bias", fields[0]))?,
            value: fields[1].parse().map_err(|_| field("value", fields[1]))?,
            mean_ag: {
                let v: f64 = fields[2].parse().map_err(|_| field("mean_ag", fields[2]))?;
                if !v.is_finite() {
                    return Err(field("mean_ag", fields[2]));
                }
                v
            },
            events: fields[3].parse().map_err(|_| field("events", fields[3]))?,
            frames: fields[4].parse().map_err(|_| field("frames", fields[4]))?,
        });
    }
    Ok(SweepResult { rows })
}
