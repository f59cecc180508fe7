//! Command-line driver: generate synthetic sequences, run detection,
//! sweep ROC curves, and run tuning experiments.

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;
use tsdn::config::ModelConfig;
use tsdn::detect::{detect_from_maps, Detection};
use tsdn::error::{Error, Result};
use tsdn::eval::{roc_sweep, tuning_experiment, RocPoint, TuningAttribute, TuningScale};
use tsdn::io;
use tsdn::stimulus::{generate, Background, StimulusSpec};
use tsdn::Pipeline;

#[derive(Parser)]
#[command(name = "tsdn", about = "Small target motion detection pipeline", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Render a synthetic sequence with ground truth.
    Generate(GenerateArgs),
    /// Run the pipeline over a sequence and write detections.
    Detect(DetectArgs),
    /// Sweep the detection threshold and write ROC curves for both modes.
    Roc(RocArgs),
    /// Sweep one target attribute and write STMD/LPTC tuning curves.
    Tune(TuneArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Stimulus spec file (`key = value`); defaults describe the
    /// reference scene.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Overrides the procedural background seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output sequence directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DetectArgs {
    /// Sequence directory (manifest + PGM frames).
    sequence: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Which response volume to threshold.
    #[arg(long, default_value = "tsdn", value_parser = ["stmd", "tsdn"])]
    mode: String,
    /// Detection threshold; defaults to the config's beta.
    #[arg(long)]
    beta: Option<f64>,
    /// Output directory for detections.csv and the run manifest.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RocArgs {
    sequence: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Threshold grid as `start:end:step`, inclusive, ascending.
    #[arg(long)]
    beta_grid: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TuneArgs {
    /// Attribute to sweep: contrast, velocity, width or height.
    #[arg(long)]
    attribute: String,
    /// Grid as `start:end:step`, inclusive, ascending.
    #[arg(long)]
    grid: String,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            std::process::exit(0);
        }
        Err(e) => {
            eprint!("{e}");
            std::process::exit(1);
        }
    };
    let result = match cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Detect(args) => cmd_detect(args),
        Command::Roc(args) => cmd_roc(args),
        Command::Tune(args) => cmd_tune(args),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code() as i32);
    }
}

fn load_config(path: &Option<PathBuf>) -> Result<ModelConfig> {
    match path {
        None => Ok(ModelConfig::default()),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
            ModelConfig::parse(&text)
        }
    }
}

/// Parses `start:end:step` into an inclusive ascending grid.
fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::invalid("grid", format!("`{s}` is not `start:end:step`")));
    }
    let parse = |p: &str| {
        p.parse::<f64>()
            .map_err(|e| Error::invalid("grid", format!("`{p}`: {e}")))
    };
    let (start, end, step) = (parse(parts[0])?, parse(parts[1])?, parse(parts[2])?);
    if step <= 0.0 {
        return Err(Error::invalid("grid", "step must be positive"));
    }
    if end < start {
        return Err(Error::invalid("grid", "grid must be ascending (end >= start)"));
    }
    let mut values = Vec::new();
    let mut i = 0u64;
    loop {
        let v = start + i as f64 * step;
        if v > end + step * 1e-9 {
            break;
        }
        values.push(v.min(end));
        i += 1;
    }
    Ok(values)
}

fn write_run_manifest(out: &Path, sections: &[(&str, String)]) -> Result<()> {
    let mut text = String::new();
    for (name, body) in sections {
        text.push_str(&format!("[{name}]\n{body}\n"));
    }
    io::write_text(&out.join("run_manifest.txt"), &text)
}

fn cmd_generate(args: GenerateArgs) -> Result<()> {
    let mut spec = match &args.spec {
        None => StimulusSpec::default(),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
            let base = p.parent().unwrap_or(Path::new("."));
            io::parse_stimulus_spec(&text, base)?
        }
    };
    if let Some(seed) = args.seed {
        match &mut spec.background {
            Background::Procedural { seed: s } => *s = seed,
            _ => {
                return Err(Error::invalid(
                    "seed",
                    "--seed only applies to procedural backgrounds",
                ))
            }
        }
    }
    let clock = Instant::now();
    let (seq, track) = generate(&spec)?;
    let render_secs = clock.elapsed().as_secs_f64();
    let truth = spec.target.as_ref().map(|_| &track);
    io::write_sequence(&args.out, &seq, truth)?;
    let frames = seq.frames.len();
    write_run_manifest(
        &args.out,
        &[
            ("stimulus", io::stimulus_spec_to_text(&spec, None)),
            (
                "timing",
                format!("render: {:.1} frames/s\n", frames as f64 / render_secs),
            ),
            (
                "layout",
                "manifest.txt, frame_NNNNNN.pgm, ground_truth.csv (when a target exists)\n"
                    .to_string(),
            ),
        ],
    )?;
    println!("wrote {frames} frames to {}", args.out.display());
    Ok(())
}

/// Runs the pipeline over a sequence, returning per-frame detections on
/// the selected volume plus per-frame max maps for both modes when
/// requested by `collect_maps`.
struct RunOutput {
    detections: Vec<Vec<Detection>>,
    stmd_maps: Vec<tsdn::Frame>,
    tsdn_maps: Vec<tsdn::Frame>,
    warmup: usize,
    timing: String,
}

fn run_pipeline(
    seq: &tsdn::ImageSequence,
    config: &ModelConfig,
    mode: &str,
    beta: f64,
    collect_maps: bool,
) -> Result<RunOutput> {
    let mut pipe = Pipeline::new(config)?;
    let mut detections = Vec::with_capacity(seq.frames.len());
    let mut stmd_maps = Vec::new();
    let mut tsdn_maps = Vec::new();
    for (t, frame) in seq.frames.iter().enumerate() {
        let out = pipe.step(frame)?;
        let volume = if mode == "stmd" { &out.e } else { &out.t_volume };
        let (max, argdir) = volume.max_over_directions();
        detections.push(detect_from_maps(&max, &argdir, volume.directions(), beta, t));
        if collect_maps {
            stmd_maps.push(out.e.max_over_directions().0);
            tsdn_maps.push(out.t_volume.max_over_directions().0);
        }
    }
    Ok(RunOutput {
        detections,
        stmd_maps,
        tsdn_maps,
        warmup: pipe.warmup(),
        timing: pipe.timings().report(),
    })
}

fn cmd_detect(args: DetectArgs) -> Result<()> {
    let config = load_config(&args.config)?;
    let beta = args.beta.unwrap_or(config.beta);
    let (seq, _) = io::read_sequence(&args.sequence)?;
    let run = run_pipeline(&seq, &config, &args.mode, beta, false)?;
    let flat: Vec<Detection> = run.detections.into_iter().flatten().collect();
    fs::create_dir_all(&args.out).map_err(|e| Error::io(&args.out, e))?;
    io::write_detections(&args.out.join("detections.csv"), &flat)?;
    write_run_manifest(
        &args.out,
        &[
            ("config", config.to_text()),
            (
                "run",
                format!(
                    "sequence = {}\nmode = {}\nbeta = {}\nframes = {}\nwarmup_frames = {}\ndetections = {}\n",
                    args.sequence.display(),
                    args.mode,
                    beta,
                    seq.frames.len(),
                    run.warmup,
                    flat.len()
                ),
            ),
            ("timing", run.timing.clone()),
        ],
    )?;
    println!(
        "{} frames ({} warm-up), {} detections at beta = {beta}",
        seq.frames.len(),
        run.warmup,
        flat.len()
    );
    print!("{}", run.timing);
    Ok(())
}

fn cmd_roc(args: RocArgs) -> Result<()> {
    let config = load_config(&args.config)?;
    let grid = parse_grid(&args.beta_grid)?;
    let (seq, truth) = io::read_sequence(&args.sequence)?;
    let run = run_pipeline(&seq, &config, "tsdn", config.beta, true)?;
    let truth_points: Vec<Option<(f64, f64)>> = match &truth {
        Some(track) => track.positions.iter().map(|&p| Some(p)).collect(),
        None => vec![None; seq.frames.len()],
    };
    let directions = config.directions()?;
    let stmd = roc_sweep(&run.stmd_maps, &directions, &truth_points, &grid, 5.0, run.warmup)?;
    let tsdn_curve = roc_sweep(&run.tsdn_maps, &directions, &truth_points, &grid, 5.0, run.warmup)?;
    fs::create_dir_all(&args.out).map_err(|e| Error::io(&args.out, e))?;
    io::write_roc(&args.out.join("roc_stmd.csv"), &stmd)?;
    io::write_roc(&args.out.join("roc_tsdn.csv"), &tsdn_curve)?;
    write_run_manifest(
        &args.out,
        &[
            ("config", config.to_text()),
            (
                "run",
                format!(
                    "sequence = {}\nbeta_grid = {}\nframes = {}\nwarmup_frames = {}\n",
                    args.sequence.display(),
                    args.beta_grid,
                    seq.frames.len(),
                    run.warmup
                ),
            ),
            ("timing", run.timing.clone()),
        ],
    )?;
    let show = |name: &str, points: &[RocPoint]| {
        for p in points {
            println!("{name} beta={} fa={:.4} dr={:.4}", p.beta, p.false_alarm_rate, p.detection_rate);
        }
    };
    show("stmd", &stmd);
    show("tsdn", &tsdn_curve);
    Ok(())
}

fn cmd_tune(args: TuneArgs) -> Result<()> {
    let config = load_config(&args.config)?;
    let attribute: TuningAttribute = args.attribute.parse()?;
    let grid = parse_grid(&args.grid)?;
    let clock = Instant::now();
    let curve = tuning_experiment(attribute, &grid, &config, TuningScale::default())?;
    fs::create_dir_all(&args.out).map_err(|e| Error::io(&args.out, e))?;
    io::write_tuning(&args.out.join("tuning.csv"), &curve)?;
    write_run_manifest(
        &args.out,
        &[
            ("config", config.to_text()),
            (
                "run",
                format!("attribute = {}\ngrid = {}\npoints = {}\n", args.attribute, args.grid, grid.len()),
            ),
            (
                "timing",
                format!("sweep: {:.1} s total\n", clock.elapsed().as_secs_f64()),
            ),
        ],
    )?;
    for ((v, s), l) in curve.values.iter().zip(&curve.stmd).zip(&curve.lptc) {
        println!("{v}: stmd={s:.4} lptc={l:.4}");
    }
    Ok(())
}
