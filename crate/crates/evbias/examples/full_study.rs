//! The complete single-factor register study: sweep each of the five
//! registers over its standard test grid on the default desk scene, score
//! every setting, and print the five curves with their rank correlations.
//!
//! Each sweep holds everything fixed (scene, seed, step, window, the other
//! four registers) except the register under test, so each curve shows that
//! register's isolated effect on frame sharpness.
//!
//! Run with: `cargo run --example full_study`
//! CSVs land in `target/full_study/`.

use std::time::Instant;

use evbias::{run_sweep, trend, write_sweep_csv, BiasName, SceneSpec, SweepConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out_dir = std::path::Path::new("target/full_study");
    std::fs::create_dir_all(out_dir)?;

    let scene = SceneSpec::desk_default();
    println!(
        "scene: {}x{} textured surface, {:.0} px/s, {:.1} s",
        scene.width,
        scene.height,
        scene.speed_px_s,
        scene.duration_us as f64 / 1e6
    );
    println!();

    for &bias in BiasName::ALL.iter() {
        let config = SweepConfig::new(bias, scene.clone());
        let started = Instant::now();
        let result = run_sweep(&config)?;
        let elapsed = started.elapsed().as_secs_f64();

        println!("== {bias} sweep ({elapsed:.1} s) ==");
        println!(
            "{:>7} {:>12} {:>10} {:>7}",
            "value", "mean_ag", "events", "frames"
        );
        for row in &result.rows {
            println!(
                "{:>7} {:>12.6} {:>10} {:>7}",
                row.value, row.mean_ag, row.events, row.frames
            );
        }
        println!(
            "rank correlation (value vs mean_ag): {:+.3}",
            trend(&result)?
        );

        let csv_path = out_dir.join(format!("sweep_{bias}.csv"));
        std::fs::write(&csv_path, write_sweep_csv(&result))?;
        println!("wrote {}", csv_path.display());
        println!();
    }
    Ok(())
}
