//! Runs the pixel-array simulation once at the default register settings and
//! once with the dead time maxed out, then compares the two event streams
//! and saves both serialization formats.
//!
//! Run with: `cargo run --example simulate_events`
//! Streams land in `target/simulate_events/`.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

use evbias::{default_biases, simulate, write_csv, write_evt0, BiasSet, Polarity, SceneSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out_dir = Path::new("target/simulate_events");
    fs::create_dir_all(out_dir)?;

    // One second of the default desk scene keeps this example quick.
    let scene = SceneSpec {
        duration_us: 1_000_000,
        ..SceneSpec::desk_default()
    };
    let sampler = scene.sampler()?;
    let dt_us = 200;
    let seed = 0;

    let runs = [
        ("defaults", default_biases()),
        (
            "long dead time",
            BiasSet {
                bias_refr: 225,
                ..default_biases()
            },
        ),
    ];
    for (name, biases) in &runs {
        let stream = simulate(&sampler, biases, dt_us, seed)?;
        let on = stream.iter().filter(|e| e.p == Polarity::On).count();
        let off = stream.len() - on;
        let rate = stream.len() as f64 / (scene.duration_us as f64 / 1e6);
        println!(
            "{name:>14}: {:>6} events ({on} ON / {off} OFF), {rate:>9.0} events/s",
            stream.len()
        );
        if let Some(first) = stream.iter().next() {
            println!(
                "{:>14}  first event: ({}, {}) at t = {} us, {:?}",
                "", first.x, first.y, first.t, first.p
            );
        }

        let slug = name.replace(' ', "_");
        let mut writer = BufWriter::new(File::create(out_dir.join(format!("{slug}.evt0")))?);
        let bytes = write_evt0(&stream, &mut writer)?;
        fs::write(out_dir.join(format!("{slug}.csv")), write_csv(&stream))?;
        println!(
            "{:>14}  saved {slug}.evt0 ({bytes} bytes) and {slug}.csv",
            ""
        );
    }

    println!("\nthe longer dead time can only remove events, never add them");
    Ok(())
}
