//! Event-camera bias exploration: simulate a pixel array under a given
//! register configuration, accumulate the emitted events into frames,
//! score the frames' sharpness, and sweep one register at a time to see
//! how each one shapes the output.
//!
//! The pipeline, end to end:
//!
//! ```text
//! SceneSpec --> SceneSampler --> simulate --> EventStream
//!                                                |
//!                           accumulate <---------+--> evt0/csv files
//!                               |
//!                            [Frame] --> mean_ag --> SweepRow/CSV
//! ```
//!
//! - [`scene`] describes synthetic moving stimuli (bar, grating, textured
//!   surface) and samples their luminance at any pixel and microsecond.
//! - [`bias`] holds the five 8-bit sensor registers, their legal ranges,
//!   defaults, and standard test grids.
//! - [`sim`] maps registers to continuous model parameters and runs the
//!   per-pixel filter/threshold/refractory model, producing events.
//! - [`event`] defines events, sensor geometry, and the canonical
//!   `(t, y, x, polarity)` stream order everything else relies on.
//! - [`io`] serializes streams (binary EVT0, text CSV) and frames (PGM).
//! - [`frame`] renders a stream into constant-period frames.
//! - [`sharpness`] scores frames by average gradient magnitude.
//! - [`sweep`] drives one-bias-at-a-time experiments and writes curve CSVs.
//!
//! Everything is deterministic: a configuration plus a seed fixes every
//! byte of output, independent of platform or thread count.
//!
//! # Example
//!
//! ```
//! use evbias::{accumulate, default_biases, mean_ag, simulate, FrameMode, SceneSpec};
//!
//! let scene = SceneSpec { duration_us: 100_000, ..SceneSpec::desk_default() };
//! let sampler = scene.sampler()?;
//! let stream = simulate(&sampler, &default_biases(), 200, 0)?;
//! let frames = accumulate(&stream, 33_333, FrameMode::Polarity)?;
//! let score = mean_ag(&frames)?;
//! assert!(score > 0.0);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod bias;
pub mod event;
pub mod frame;
pub mod io;
pub mod scene;
pub mod sharpness;
pub mod sim;
pub mod sweep;

pub use bias::{bias_range, default_biases, tested_values, BiasName, BiasSet, BiasViolation};
pub use event::{
    canonical_sort, is_canonical, Event, EventError, EventStream, Polarity, SensorGeometry,
};
pub use frame::{accumulate, accumulate_clipped, Frame, FrameError, FrameMode, DEFAULT_COUNT_CLIP};
pub use io::{
    evt0_bytes, read_csv, read_evt0, read_pgm, write_csv, write_evt0, write_pgm, CsvError,
    Evt0Error, OrderPolicy, PgmError,
};
pub use scene::{SceneError, SceneKind, SceneSampler, SceneSpec};
pub use sharpness::{average_gradient, mean_ag, SharpnessError};
pub use sim::{
    bias_to_params, simulate, simulate_with_params, PixelState, SimError, SimParams, StepCoeffs,
};
pub use sweep::{
    format_sig6, read_sweep_csv, run_sweep, trend, write_sweep_csv, SweepConfig, SweepError,
    SweepResult, SweepRow,
};
