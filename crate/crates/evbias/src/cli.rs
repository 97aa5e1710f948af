//! The `evbias` command line: simulate, accumulate, score, sweep.
//!
//! Exit codes are script-friendly: 0 success, 1 environment/I-O failure,
//! 2 invalid user input (with a one-line diagnostic naming the offending
//! flag). All subcommands are deterministic given their flags.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use evbias::{
    accumulate_clipped, bias_to_params, default_biases, format_sig6, mean_ag, read_csv, read_evt0,
    read_pgm, run_sweep, simulate_with_params, tested_values, write_csv, write_evt0, write_pgm,
    write_sweep_csv, BiasName, BiasSet, EventStream, Frame, FrameMode, OrderPolicy, SceneSpec,
    SensorGeometry, SweepConfig, SweepError,
};

#[derive(Parser)]
#[command(
    name = "evbias",
    version,
    about = "Event-camera bias exploration: simulate, accumulate, score, sweep"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate an event stream from a scene description
    Simulate(SimulateArgs),
    /// Render an event stream into constant-period frames
    Accumulate(AccumulateArgs),
    /// Score an event stream or a directory of PGM frames by mean average gradient
    Ag(AgArgs),
    /// Vary one bias register over a value grid and write the curve as CSV
    Sweep(SweepArgs),
}

#[derive(clap::Args)]
struct BiasArgs {
    /// Source-follower bandwidth register, 0-255
    #[arg(long, default_value_t = default_biases().bias_fo)]
    bias_fo: u8,
    /// High-pass filter register, 0-255 (0 disables the filter)
    #[arg(long, default_value_t = default_biases().bias_hpf)]
    bias_hpf: u8,
    /// ON contrast threshold register, 81-255
    #[arg(long, default_value_t = default_biases().bias_diff_on)]
    bias_diff_on: u8,
    /// OFF contrast threshold register, 0-79
    #[arg(long, default_value_t = default_biases().bias_diff_off)]
    bias_diff_off: u8,
    /// Refractory (deadtime) register, 0-255
    #[arg(long, default_value_t = default_biases().bias_refr)]
    bias_refr: u8,
}

impl BiasArgs {
    fn to_set(&self) -> Result<BiasSet, CliError> {
        let set = BiasSet {
            bias_fo: self.bias_fo,
            bias_hpf: self.bias_hpf,
            bias_diff_on: self.bias_diff_on,
            bias_diff_off: self.bias_diff_off,
            bias_refr: self.bias_refr,
        };
        let violations = set.validate();
        if violations.is_empty() {
            return Ok(set);
        }
        let mut message = String::new();
        for v in violations {
            let flag = v.bias.as_str().replace('_', "-");
            let _ = write!(message, "--{flag}: {v}; ");
        }
        Err(CliError::Usage(message.trim_end_matches("; ").to_string()))
    }
}

#[derive(clap::Args)]
struct SimulateArgs {
    /// Scene description (JSON); omitted = the built-in desk scene
    #[arg(long)]
    scene: Option<PathBuf>,
    #[command(flatten)]
    biases: BiasArgs,
    /// Simulation step, microseconds
    #[arg(long, default_value_t = 200)]
    dt_us: u64,
    /// Seed for the background-activity noise substreams
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Disable background-activity noise
    #[arg(long)]
    no_noise: bool,
    /// Output events file; format from the extension (.evt0 or .csv).
    /// CSV carries no geometry — downstream consumers need --width/--height.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    /// Net polarity per pixel: OFF-dominated 0, quiet 0.5, ON-dominated 1
    Polarity,
    /// Clipped event count per pixel, scaled to [0, 1]
    Count,
}

impl From<ModeArg> for FrameMode {
    fn from(m: ModeArg) -> FrameMode {
        match m {
            ModeArg::Polarity => FrameMode::Polarity,
            ModeArg::Count => FrameMode::Count,
        }
    }
}

#[derive(clap::Args)]
struct AccumulateArgs {
    /// Input events file (.evt0 or .csv, canonical order)
    #[arg(long = "in")]
    input: PathBuf,
    /// Sensor width; required for CSV input (CSV carries no geometry)
    #[arg(long)]
    width: Option<u16>,
    /// Sensor height; required for CSV input
    #[arg(long)]
    height: Option<u16>,
    /// Accumulation window, microseconds
    #[arg(long, default_value_t = 33_333)]
    period_us: u64,
    #[arg(long, value_enum, default_value_t = ModeArg::Polarity)]
    mode: ModeArg,
    /// Count-mode clip: counts saturate at this many events per pixel
    #[arg(long, default_value_t = 5)]
    count_clip: u32,
    /// Write each frame as a binary PGM into --out-dir
    #[arg(long, requires = "out_dir")]
    pgm: bool,
    /// Directory for frame_NNNNNN.pgm files (with --pgm)
    #[arg(long, requires = "pgm")]
    out_dir: Option<PathBuf>,
}

#[derive(clap::Args)]
struct AgArgs {
    /// Input: an events file (.evt0 or .csv) or a directory of PGM frames
    #[arg(long = "in")]
    input: PathBuf,
    /// Sensor width; required for CSV input
    #[arg(long)]
    width: Option<u16>,
    /// Sensor height; required for CSV input
    #[arg(long)]
    height: Option<u16>,
    /// Accumulation window for event input, microseconds
    #[arg(long, default_value_t = 33_333)]
    period_us: u64,
    #[arg(long, value_enum, default_value_t = ModeArg::Polarity)]
    mode: ModeArg,
    /// Count-mode clip: counts saturate at this many events per pixel
    #[arg(long, default_value_t = 5)]
    count_clip: u32,
}

#[derive(clap::Args)]
struct SweepArgs {
    /// Register under test: bias_fo, bias_hpf, bias_diff_on, bias_diff_off, bias_refr
    #[arg(long)]
    bias: String,
    /// Comma-separated register values, or "paper" for the standard grid
    #[arg(long, default_value = "paper")]
    values: String,
    /// Scene description (JSON); omitted = the built-in desk scene
    #[arg(long)]
    scene: Option<PathBuf>,
    /// Simulation step, microseconds
    #[arg(long, default_value_t = 200)]
    dt_us: u64,
    /// Accumulation window, microseconds
    #[arg(long, default_value_t = 33_333)]
    period_us: u64,
    #[arg(long, value_enum, default_value_t = ModeArg::Polarity)]
    mode: ModeArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Disable background-activity noise
    #[arg(long)]
    no_noise: bool,
    /// Output CSV path
    #[arg(long)]
    out: PathBuf,
}

enum CliError {
    /// Invalid user input -> exit 2. The message names the offending flag.
    Usage(String),
    /// Environment or I/O failure -> exit 1.
    Io(String),
}

impl CliError {
    fn report(self) -> ExitCode {
        match self {
            CliError::Usage(msg) => {
                eprintln!("error: {msg}");
                ExitCode::from(2)
            }
            CliError::Io(msg) => {
                eprintln!("error: {msg}");
                ExitCode::from(1)
            }
        }
    }
}

fn usage(flag: &str, detail: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("{flag}: {detail}"))
}

fn io_error(context: &str, path: &Path, err: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{context} {}: {err}", path.display()))
}

/// Parses the process arguments and runs the selected subcommand.
/// Argument-syntax errors exit 2 via clap before this returns a command.
pub fn run() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(args) => cmd_simulate(args),
        Command::Accumulate(args) => cmd_accumulate(args),
        Command::Ag(args) => cmd_ag(args),
        Command::Sweep(args) => cmd_sweep(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => err.report(),
    }
}

fn load_scene(path: &Option<PathBuf>) -> Result<SceneSpec, CliError> {
    let Some(path) = path else {
        return Ok(SceneSpec::desk_default());
    };
    let text =
        std::fs::read_to_string(path).map_err(|e| io_error("cannot read scene file", path, e))?;
    let spec: SceneSpec = serde_json::from_str(&text).map_err(|e| usage("--scene", e))?;
    spec.validate().map_err(|e| usage("--scene", e))?;
    Ok(spec)
}

#[derive(PartialEq, Eq, Clone, Copy)]
enum EventFormat {
    Evt0,
    Csv,
}

fn event_format(flag: &str, path: &Path) -> Result<EventFormat, CliError> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("evt0") => Ok(EventFormat::Evt0),
        Some("csv") => Ok(EventFormat::Csv),
        _ => Err(usage(
            flag,
            format!("{}: expected a .evt0 or .csv extension", path.display()),
        )),
    }
}

fn csv_geometry(width: Option<u16>, height: Option<u16>) -> Result<SensorGeometry, CliError> {
    let (Some(w), Some(h)) = (width, height) else {
        return Err(usage(
            "--width/--height",
            "required for CSV input (the format carries no geometry)",
        ));
    };
    SensorGeometry::new(w, h).map_err(|e| usage("--width/--height", e))
}

fn load_events(
    flag: &str,
    path: &Path,
    width: Option<u16>,
    height: Option<u16>,
) -> Result<EventStream, CliError> {
    match event_format(flag, path)? {
        EventFormat::Evt0 => {
            let bytes = std::fs::read(path).map_err(|e| io_error("cannot read", path, e))?;
            read_evt0(&mut bytes.as_slice(), OrderPolicy::Strict)
                .map_err(|e| usage(flag, format!("{}: {e}", path.display())))
        }
        EventFormat::Csv => {
            let geometry = csv_geometry(width, height)?;
            let text =
                std::fs::read_to_string(path).map_err(|e| io_error("cannot read", path, e))?;
            read_csv(&text, geometry, OrderPolicy::Strict)
                .map_err(|e| usage(flag, format!("{}: {e}", path.display())))
        }
    }
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let format = event_format("--out", &args.out)?;
    let scene = load_scene(&args.scene)?;
    let biases = args.biases.to_set()?;
    let sampler = scene.sampler().map_err(|e| usage("--scene", e))?;
    let mut params = bias_to_params(&biases, args.dt_us).map_err(|e| usage("--dt-us", e))?;
    if args.no_noise {
        params.lambda_ba_hz = 0.0;
    }
    let stream = simulate_with_params(&sampler, &params, args.seed)
        .map_err(|e| CliError::Usage(e.to_string()))?;

    match format {
        EventFormat::Evt0 => {
            let mut file = std::fs::File::create(&args.out)
                .map_err(|e| io_error("cannot create", &args.out, e))?;
            write_evt0(&stream, &mut file).map_err(|e| io_error("cannot write", &args.out, e))?;
        }
        EventFormat::Csv => {
            std::fs::write(&args.out, write_csv(&stream))
                .map_err(|e| io_error("cannot write", &args.out, e))?;
        }
    }
    println!("events: {}", stream.len());
    Ok(())
}

fn build_frames(
    stream: &EventStream,
    period_us: u64,
    mode: ModeArg,
    count_clip: u32,
) -> Result<Vec<Frame>, CliError> {
    accumulate_clipped(stream, period_us, mode.into(), count_clip).map_err(|e| {
        let flag = if period_us == 0 {
            "--period-us"
        } else {
            "--count-clip"
        };
        usage(flag, e)
    })
}

fn cmd_accumulate(args: AccumulateArgs) -> Result<(), CliError> {
    let stream = load_events("--in", &args.input, args.width, args.height)?;
    let frames = build_frames(&stream, args.period_us, args.mode, args.count_clip)?;

    if args.pgm {
        let dir = args
            .out_dir
            .as_deref()
            .expect("clap enforces --out-dir with --pgm");
        std::fs::create_dir_all(dir).map_err(|e| io_error("cannot create directory", dir, e))?;
        for (index, frame) in frames.iter().enumerate() {
            let bytes = write_pgm(frame).expect("accumulated frames are always valid");
            let path = dir.join(format!("frame_{index:06}.pgm"));
            std::fs::write(&path, bytes).map_err(|e| io_error("cannot write", &path, e))?;
        }
    }
    println!("frames: {}", frames.len());
    Ok(())
}

fn load_frame_dir(flag: &str, dir: &Path) -> Result<Vec<Frame>, CliError> {
    let entries = std::fs::read_dir(dir).map_err(|e| io_error("cannot read directory", dir, e))?;
    let mut paths: Vec<PathBuf> = entries
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| io_error("cannot read directory", dir, e))?
        .into_iter()
        .map(|entry| entry.path())
        .filter(|p| p.extension().and_then(|e| e.to_str()) == Some("pgm"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(usage(
            flag,
            format!("{}: no .pgm files found", dir.display()),
        ));
    }
    let mut frames = Vec::with_capacity(paths.len());
    for path in &paths {
        let bytes = std::fs::read(path).map_err(|e| io_error("cannot read", path, e))?;
        frames.push(read_pgm(&bytes).map_err(|e| usage(flag, format!("{}: {e}", path.display())))?);
    }
    Ok(frames)
}

fn cmd_ag(args: AgArgs) -> Result<(), CliError> {
    let frames = if args.input.is_dir() {
        load_frame_dir("--in", &args.input)?
    } else {
        let stream = load_events("--in", &args.input, args.width, args.height)?;
        build_frames(&stream, args.period_us, args.mode, args.count_clip)?
    };
    // An eventless stream yields no frames; score that 0 rather than
    // failing, matching how sweeps record eventless rows.
    let score = if frames.is_empty() {
        0.0
    } else {
        mean_ag(&frames).map_err(|e| usage("--in", e))?
    };
    println!("mean_ag: {}", format_sig6(score));
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<(), CliError> {
    let bias: BiasName = args.bias.parse().map_err(|e| usage("--bias", e))?;
    let values: Vec<u8> = if args.values == "paper" {
        tested_values(bias).to_vec()
    } else {
        args.values
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<u8>()
                    .map_err(|_| usage("--values", format!("{tok:?} is not an integer in 0-255")))
            })
            .collect::<Result<_, _>>()?
    };
    let scene = load_scene(&args.scene)?;
    let config = SweepConfig {
        bias,
        values,
        scene,
        dt_us: args.dt_us,
        period_us: args.period_us,
        mode: args.mode.into(),
        seed: args.seed,
        noise: !args.no_noise,
    };
    let result = run_sweep(&config).map_err(|e| match &e {
        SweepError::ValueOutOfRange { .. } => usage("--values", e),
        SweepError::Sim(_) => usage("--dt-us", e),
        SweepError::Frame(_) => usage("--period-us", e),
        _ => usage("--scene", e),
    })?;
    std::fs::write(&args.out, write_sweep_csv(&result))
        .map_err(|e| io_error("cannot write", &args.out, e))?;
    println!("rows: {}", result.rows.len());
    Ok(())
}
