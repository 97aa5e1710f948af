//! Renders each built-in stimulus — moving bar, drifting grating, seeded
//! texture — as a strip of luminance snapshots, showing how scenes are
//! specified and sampled before any events exist.
//!
//! Run with: `cargo run --example scene_gallery`
//! Snapshots land in `target/scene_gallery/` as PGM images.

use std::fs;
use std::path::Path;

use evbias::{write_pgm, Frame, SceneKind, SceneSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out_dir = Path::new("target/scene_gallery");
    fs::create_dir_all(out_dir)?;

    let base = SceneSpec {
        width: 64,
        height: 64,
        duration_us: 1_000_000,
        kind: SceneKind::Bar,
        speed_px_s: 48.0,
        contrast: 0.6,
        background: 0.2,
        spatial_period_px: 16.0,
        bar_width_px: 10,
        seed: 1,
        half_period_us: None,
    };

    for kind in [SceneKind::Bar, SceneKind::Grating, SceneKind::Texture] {
        let spec = SceneSpec {
            kind,
            ..base.clone()
        };
        let sampler = spec.sampler()?;
        let geometry = sampler.geometry();
        let mut lum = vec![0.0; geometry.pixel_count()];

        println!("{kind:?}:");
        for (i, t_us) in [0, 250_000, 500_000, 750_000, 1_000_000].iter().enumerate() {
            sampler.fill_row_major(*t_us, &mut lum);
            let frame = Frame::new(geometry, lum.clone())?;
            let name = format!("{}_{i}.pgm", format!("{kind:?}").to_lowercase());
            fs::write(out_dir.join(&name), write_pgm(&frame)?)?;

            let mean = lum.iter().sum::<f64>() / lum.len() as f64;
            println!(
                "  t = {:>9} us  displacement {:>6.2} px  mean luminance {mean:.3}  -> {name}",
                t_us,
                sampler.displacement_px(*t_us),
            );
        }
    }

    println!("\nwrote 15 snapshots to {}", out_dir.display());
    Ok(())
}
