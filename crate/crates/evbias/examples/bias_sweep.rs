//! Sweeps one register — the bandwidth control — over a custom value grid
//! while everything else stays at the defaults, then prints the sharpness
//! curve, its rank correlation, and the CSV that records it.
//!
//! Run with: `cargo run --example bias_sweep`
//! The CSV lands in `target/bias_sweep/`.

use std::fs;
use std::path::Path;

use evbias::{format_sig6, run_sweep, trend, write_sweep_csv, BiasName, SceneSpec, SweepConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out_dir = Path::new("target/bias_sweep");
    fs::create_dir_all(out_dir)?;

    // A shortened desk scene keeps the ten simulations near a second total.
    let scene = SceneSpec {
        duration_us: 1_000_000,
        ..SceneSpec::desk_default()
    };
    let config = SweepConfig {
        values: vec![0, 15, 30, 45, 60, 74, 90, 105, 120, 135],
        ..SweepConfig::new(BiasName::Fo, scene)
    };

    let result = run_sweep(&config)?;
    println!(
        "{:>5}  {:>10}  {:>8}  {:>6}",
        "value", "mean score", "events", "frames"
    );
    for row in &result.rows {
        println!(
            "{:>5}  {:>10}  {:>8}  {:>6}",
            row.value,
            format_sig6(row.mean_ag),
            row.events,
            row.frames
        );
    }
    println!(
        "\nrank correlation between register value and score: {:+.3}",
        trend(&result)?
    );
    println!("(raising the bandwidth register sharpens frames until the curve plateaus)");

    let path = out_dir.join("sweep_bias_fo.csv");
    fs::write(&path, write_sweep_csv(&result))?;
    println!("wrote {}", path.display());
    Ok(())
}
