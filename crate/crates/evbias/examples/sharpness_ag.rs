//! Scores frames with the average-gradient metric: hand-checkable patterns
//! first, then the two invariances that make the score comparable across
//! settings, then a real simulated stream.
//!
//! Run with: `cargo run --example sharpness_ag`

use evbias::{
    accumulate, average_gradient, default_biases, mean_ag, simulate, Frame, FrameMode, SceneSpec,
    SensorGeometry,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Hand-checkable patterns.
    let geometry = SensorGeometry::new(3, 3).unwrap();
    let flat = Frame::uniform(geometry, 0.5)?;
    let checker = Frame::new(geometry, vec![0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0])?;
    let soft = Frame::new(
        geometry,
        vec![0.25, 0.75, 0.25, 0.75, 0.25, 0.75, 0.25, 0.75, 0.25],
    )?;
    println!("uniform frame:        {:.6}", average_gradient(&flat));
    println!(
        "checkerboard:         {:.6}  (sqrt(2): every cell has |dx| = |dy| = 1)",
        average_gradient(&checker)
    );
    println!(
        "half-contrast board:  {:.6}  (scales linearly with contrast)",
        average_gradient(&soft)
    );

    // Shift invariance and positive homogeneity, shown numerically.
    let base = Frame::new(geometry, vec![0.1, 0.5, 0.2, 0.8, 0.3, 0.6, 0.0, 0.4, 0.7])?;
    let shifted = Frame::new(geometry, base.values().iter().map(|v| v + 0.2).collect())?;
    let scaled = Frame::new(geometry, base.values().iter().map(|v| v * 0.5).collect())?;
    println!("\nrandom frame:         {:.6}", average_gradient(&base));
    println!(
        "same + 0.2 everywhere: {:.6}  (unchanged)",
        average_gradient(&shifted)
    );
    println!(
        "same * 0.5:            {:.6}  (halved)",
        average_gradient(&scaled)
    );

    // A simulated stream, scored as the mean over its frames.
    let scene = SceneSpec {
        duration_us: 1_000_000,
        ..SceneSpec::desk_default()
    };
    let stream = simulate(&scene.sampler()?, &default_biases(), 200, 0)?;
    let frames = accumulate(&stream, 33_333, FrameMode::Polarity)?;
    println!(
        "\ndesk scene, default registers: {} events -> {} frames -> mean score {:.6}",
        stream.len(),
        frames.len(),
        mean_ag(&frames)?
    );
    Ok(())
}
