//! `pi` command-line front end.
//!
//! Every subcommand writes plain-text artifacts (CSV for series, JSON for
//! single results) plus a `manifest.json` recording the full parameter set,
//! so a run can be repeated byte for byte. Exit codes: 0 success, 2 bad
//! input, 1 runtime failure.
//!
//! `--config FILE` reads a flat `key = value` file whose keys are flag names
//! without the leading dashes; flags given on the command line win.

use std::ffi::OsString;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::corr::{
    correlation_csv, correlation_table, load_dataset, DatasetSource, SubjectiveDataset,
};
use crate::error::Error;
use crate::loss::{ks_statistic, loss_curve, sample_throughputs, throughput_curve, GammaParams};
use crate::model::{model_sweep, PlayoutRate};
use crate::pause_stats::{
    first_passage_monte_carlo, pause_duration_distribution, play_duration_distribution,
    BufferThresholds, DurationDistribution, SegmentConfig,
};
use crate::sim::{run_session, sweep_csv, sweep_loss, SimConfig, SimMode};
use crate::tcp::{LinkConstraints, TcpParams, MAX_LOSS};
use crate::trace::{compute_metrics, ingest_trace};

/// Throughput samples drawn for the `--mc-check` KS comparison.
const KS_SAMPLES: usize = 5000;

#[derive(Debug, Parser)]
#[command(
    name = "pi",
    version,
    about = "Pause Intensity model, simulator and analysis tools"
)]
#[command(args_override_self = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Closed-form model curves over a loss grid, with critical points.
    Model(ModelArgs),
    /// Buffer simulation sweep compared against the model.
    Simulate(SimulateArgs),
    /// Pearson correlation of pause measures with MOS per content class.
    Correlate(CorrelateArgs),
    /// Empirical pause metrics of a trace file.
    Analyze(AnalyzeArgs),
    /// Loss, throughput, pause and play distributions.
    Distributions(DistributionsArgs),
}

#[derive(Debug, Args, Serialize)]
struct CommonArgs {
    /// RNG seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for output files.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Flat `key = value` file of flag defaults.
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

impl CommonArgs {
    fn out_dir(&self) -> PathBuf {
        self.out_dir.clone().unwrap_or_else(|| PathBuf::from("."))
    }
}

#[derive(Debug, Args, Serialize)]
struct TcpArgs {
    /// Round-trip time, seconds.
    #[arg(long, default_value_t = 0.128)]
    rtt: f64,
    /// Retransmission timeout, seconds.
    #[arg(long, default_value_t = 0.128)]
    timeout: f64,
    /// Rounds per window increment.
    #[arg(long, default_value_t = 2)]
    rounds_per_increment: u32,
    /// Packet size, bytes.
    #[arg(long, default_value_t = 1500.0)]
    packet_size: f64,
    /// Bottleneck bandwidth, bytes/second.
    #[arg(long, default_value_t = 125_000.0)]
    bottleneck: f64,
    /// Advertised window, packets.
    #[arg(long, default_value_t = 20.0)]
    window: f64,
}

impl TcpArgs {
    fn params(&self) -> Result<(TcpParams, LinkConstraints), Error> {
        Ok((
            TcpParams::new(
                self.rtt,
                self.timeout,
                self.rounds_per_increment,
                self.packet_size,
            )?,
            LinkConstraints::new(self.bottleneck, self.window)?,
        ))
    }
}

#[derive(Debug, Args, Serialize)]
struct BufferArgs {
    /// Pause threshold, bytes.
    #[arg(long, default_value_t = 1_500.0)]
    q_min: f64,
    /// Resume threshold, bytes.
    #[arg(long, default_value_t = 200_000.0)]
    q_max: f64,
    /// Playout rate, bytes/second.
    #[arg(long, default_value_t = 100_000.0)]
    lambda: f64,
}

impl BufferArgs {
    fn parse(&self) -> Result<(BufferThresholds, PlayoutRate), Error> {
        Ok((
            BufferThresholds::new(self.q_min, self.q_max)?,
            PlayoutRate::new(self.lambda)?,
        ))
    }
}

#[derive(Debug, Args, Serialize)]
struct ModelArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    tcp: TcpArgs,
    #[command(flatten)]
    buffer: BufferArgs,
    /// Loss grid as `start:step:end`.
    #[arg(long, default_value = "0.005:0.005:0.12")]
    loss_grid: String,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum ModeArg {
    Deterministic,
    Stochastic,
}

#[derive(Debug, Args, Serialize)]
struct SimulateArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    tcp: TcpArgs,
    #[command(flatten)]
    buffer: BufferArgs,
    /// Loss grid as `start:step:end`.
    #[arg(long, default_value = "0.005:0.005:0.12")]
    loss_grid: String,
    /// Simulation step, seconds.
    #[arg(long, default_value_t = 0.1)]
    step: f64,
    /// Session length, seconds.
    #[arg(long, default_value_t = 10_000.0)]
    session_length: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::Deterministic)]
    mode: ModeArg,
    /// Runs per loss rate.
    #[arg(long, default_value_t = 10)]
    runs: usize,
    /// Gamma shape of the per-step loss law (stochastic mode).
    #[arg(long, default_value_t = 2.8)]
    jitter_shape: f64,
    /// Loss rate of the single session written to trace.csv.
    #[arg(long, default_value_t = 0.035)]
    trace_loss: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum Builtin {
    Table3,
    Table5,
}

#[derive(Debug, Args, Serialize)]
struct CorrelateArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Bundled dataset; repeatable. Defaults to both tables when no source is given.
    #[arg(long, value_enum)]
    builtin: Vec<Builtin>,
    /// External dataset CSV; repeatable.
    #[arg(long)]
    dataset: Vec<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct AnalyzeArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Trace CSV (`time_s,event`).
    #[arg(long)]
    trace: PathBuf,
    /// Measurement window as `start:end` seconds.
    #[arg(long)]
    window: Option<String>,
}

#[derive(Debug, Args, Serialize)]
struct DistributionsArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    tcp: TcpArgs,
    #[command(flatten)]
    buffer: BufferArgs,
    #[arg(long, default_value_t = 2.8)]
    gamma_shape: f64,
    #[arg(long, default_value_t = 0.7)]
    gamma_scale: f64,
    /// Divisor mapping the Gamma variate to a loss probability.
    #[arg(long, default_value_t = 100.0)]
    gamma_divisor: f64,
    #[arg(long, default_value_t = crate::loss::DEFAULT_GRID_POINTS)]
    grid_points: usize,
    /// Segment length Δt, seconds.
    #[arg(long, default_value_t = 0.1)]
    segment_length: f64,
    #[arg(long, default_value_t = 2000)]
    max_segments: usize,
    /// Add Monte Carlo comparison columns and KS/TV statistics.
    #[arg(long)]
    mc_check: bool,
    /// First-passage trials for `--mc-check`.
    #[arg(long, default_value_t = 100_000)]
    trials: usize,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Runtime(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_invalid_input() {
            CliError::Usage(e.to_string())
        } else {
            CliError::Runtime(e.to_string())
        }
    }
}

type CliResult<T> = Result<T, CliError>;

/// Everything needed to repeat a run.
#[derive(Debug, Serialize)]
struct RunManifest<'a, P: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    seed: u64,
    parameters: &'a P,
    outputs: Vec<String>,
}

/// Parse `args` (including the program name), run, and return the exit code.
pub fn main_with_args<I: IntoIterator<Item = OsString>>(args: I) -> i32 {
    let args: Vec<OsString> = args.into_iter().collect();
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("error: {msg}");
            return 2;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let outcome = match &cli.command {
        Command::Model(a) => cmd_model(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Correlate(a) => cmd_correlate(a),
        Command::Analyze(a) => cmd_analyze(a),
        Command::Distributions(a) => cmd_distributions(a),
    };
    match outcome {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            1
        }
    }
}

/// Splice `--config` file entries in front of the command-line flags.
fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>, String> {
    let mut path = None;
    for (i, a) in args.iter().enumerate() {
        let s = a.to_string_lossy();
        if s == "--config" {
            path = args.get(i + 1).map(PathBuf::from);
        } else if let Some(p) = s.strip_prefix("--config=") {
            path = Some(PathBuf::from(p));
        }
    }
    let Some(path) = path else {
        return Ok(args);
    };
    let text = fs::read_to_string(&path)
        .map_err(|e| format!("cannot read config file {}: {e}", path.display()))?;
    let mut extra = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("{}:{}: expected `key = value`", path.display(), n + 1))?;
        let key = key.trim().trim_start_matches("--");
        let value = value.trim().trim_matches('"');
        if key == "config" {
            continue;
        }
        match value {
            "true" => extra.push(OsString::from(format!("--{key}"))),
            "false" => {}
            _ => {
                extra.push(OsString::from(format!("--{key}")));
                extra.push(OsString::from(value));
            }
        }
    }
    // program, subcommand, config flags, then the user's flags
    let split = args.len().min(2);
    let mut out = args[..split].to_vec();
    out.extend(extra);
    out.extend_from_slice(&args[split..]);
    Ok(out)
}

fn parse_grid(text: &str) -> CliResult<Vec<f64>> {
    let bad = || CliError::Usage(format!("loss grid `{text}` must be start:step:end"));
    let parts: Vec<f64> = text
        .split(':')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad())?;
    let [start, step, end] = parts[..] else {
        return Err(bad());
    };
    if !(step > 0.0 && start > 0.0 && end >= start && end <= MAX_LOSS + 1e-12) {
        return Err(CliError::Usage(format!(
            "loss grid `{text}` must have 0 < start <= end <= 0.12 and a positive step"
        )));
    }
    let n = ((end - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..n)
        .map(|i| {
            let p = start + step * i as f64;
            // shave representation noise so grid values print cleanly
            ((p * 1e12).round() / 1e12).min(MAX_LOSS)
        })
        .collect())
}

fn parse_window(text: &str) -> CliResult<(f64, f64)> {
    let bad = || CliError::Usage(format!("window `{text}` must be start:end"));
    let (a, b) = text.split_once(':').ok_or_else(bad)?;
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    Ok((a, b))
}

fn prepare_out_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", dir.display())))
}

fn write_file(dir: &Path, name: &str, contents: &[u8], outputs: &mut Vec<String>) -> CliResult<()> {
    let path = dir.join(name);
    fs::write(&path, contents)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))?;
    outputs.push(path.display().to_string());
    Ok(())
}

fn write_manifest<P: Serialize>(
    dir: &Path,
    command: &'static str,
    seed: u64,
    parameters: &P,
    mut outputs: Vec<String>,
) -> CliResult<()> {
    outputs.push(dir.join("manifest.json").display().to_string());
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command,
        seed,
        parameters,
        outputs,
    };
    let text = to_json(&manifest)?;
    fs::write(dir.join("manifest.json"), text)
        .map_err(|e| CliError::Runtime(format!("cannot write manifest: {e}")))
}

/// Pretty JSON with floats rounded to 12 decimals.
fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    to_json_rounded(value, 12)
}

fn to_json_rounded<T: Serialize>(value: &T, decimals: i32) -> CliResult<String> {
    let mut v = serde_json::to_value(value).map_err(|e| CliError::Runtime(e.to_string()))?;
    round_floats(&mut v, 10f64.powi(decimals));
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| CliError::Runtime(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn round_floats(v: &mut Value, scale: f64) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64() {
                let r = (x * scale).round() / scale;
                if let Some(num) = serde_json::Number::from_f64(r) {
                    *n = num;
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(|x| round_floats(x, scale)),
        Value::Object(map) => map.values_mut().for_each(|x| round_floats(x, scale)),
        _ => {}
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn cmd_model(a: &ModelArgs) -> CliResult<()> {
    let (params, caps) = a.tcp.params()?;
    let (buffer, lambda) = a.buffer.parse()?;
    let grid = parse_grid(&a.loss_grid)?;
    let q0 = buffer.fluctuation_area();
    let (cp, rows) = model_sweep(&params, &caps, lambda, q0, &grid)?;

    let mut csv = String::from(
        "loss,throughput,avg_pause_duration,avg_play_duration,pause_frequency,pause_intensity,period_sensitivity,region\n",
    );
    for r in &rows {
        let m = &r.metrics;
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.loss,
            r.throughput,
            opt(m.avg_pause_duration),
            opt(m.avg_play_duration),
            m.pause_frequency,
            m.pause_intensity,
            opt(m.period_sensitivity),
            r.region
        ));
    }
    let summary = to_json(&json!({
        "p0": cp.p0,
        "p1": cp.p1,
        "capped_max_throughput": cp.capped_max_throughput,
        "always_pause": cp.always_pause,
        "playout_rate": lambda.value(),
        "fluctuation_area": q0,
        "rows": rows.len(),
    }))?;

    let dir = a.common.out_dir();
    prepare_out_dir(&dir)?;
    let mut outputs = Vec::new();
    write_file(&dir, "model.csv", csv.as_bytes(), &mut outputs)?;
    write_file(&dir, "model_summary.json", summary.as_bytes(), &mut outputs)?;
    write_manifest(&dir, "model", a.common.seed, a, outputs)?;
    print!("{summary}");
    Ok(())
}

fn cmd_simulate(a: &SimulateArgs) -> CliResult<()> {
    let (params, caps) = a.tcp.params()?;
    let (buffer, lambda) = a.buffer.parse()?;
    let grid = parse_grid(&a.loss_grid)?;
    let jitter = GammaParams::new(a.jitter_shape, 1.0, GammaParams::default().rescale_divisor)?;
    let cfg = SimConfig {
        tcp: params,
        caps,
        buffer,
        playout_rate: lambda.value(),
        step: a.step,
        session_length: a.session_length,
        mode: match a.mode {
            ModeArg::Deterministic => SimMode::Deterministic,
            ModeArg::Stochastic => SimMode::Stochastic,
        },
        loss_rate: a.trace_loss,
        loss_jitter: jitter,
        seed: a.common.seed,
        record_occupancy: true,
    };
    cfg.validate()?;
    if a.runs == 0 {
        return Err(CliError::Usage("--runs must be at least 1".into()));
    }

    let (trace, single) = run_session(&cfg)?;
    let rows = sweep_loss(&cfg, &grid, a.runs)?;

    let mut occupancy = String::from("time_s,occupancy_bytes\n");
    for (t, q) in &trace.occupancy {
        occupancy.push_str(&format!("{t:.6},{q}\n"));
    }

    let dir = a.common.out_dir();
    prepare_out_dir(&dir)?;
    let mut outputs = Vec::new();
    write_file(&dir, "trace.csv", trace.to_csv().as_bytes(), &mut outputs)?;
    write_file(&dir, "occupancy.csv", occupancy.as_bytes(), &mut outputs)?;
    write_file(&dir, "sweep.csv", sweep_csv(&rows).as_bytes(), &mut outputs)?;
    write_manifest(&dir, "simulate", a.common.seed, a, outputs)?;
    print!("{}", to_json(&single.runs[0])?);
    Ok(())
}

fn cmd_correlate(a: &CorrelateArgs) -> CliResult<()> {
    let mut sources: Vec<DatasetSource> = a
        .builtin
        .iter()
        .map(|b| match b {
            Builtin::Table3 => DatasetSource::Table3,
            Builtin::Table5 => DatasetSource::Table5,
        })
        .collect();
    sources.extend(a.dataset.iter().cloned().map(DatasetSource::External));
    if sources.is_empty() {
        sources = vec![DatasetSource::Table3, DatasetSource::Table5];
    }
    let mut merged: Option<SubjectiveDataset> = None;
    for s in sources {
        let ds = load_dataset(s).map_err(|e| match e {
            // unreadable dataset files are bad input, not a runtime failure
            Error::Io { .. } => CliError::Usage(e.to_string()),
            other => other.into(),
        })?;
        merged = Some(match merged {
            None => ds,
            Some(m) => m.merge(ds)?,
        });
    }
    let ds = merged.expect("at least one source");
    let rows = correlation_table(&ds)?;
    let csv = correlation_csv(&rows);

    let dir = a.common.out_dir();
    prepare_out_dir(&dir)?;
    let mut outputs = Vec::new();
    write_file(&dir, "table4.csv", csv.as_bytes(), &mut outputs)?;
    write_manifest(&dir, "correlate", a.common.seed, a, outputs)?;
    print!("{csv}");
    Ok(())
}

fn cmd_analyze(a: &AnalyzeArgs) -> CliResult<()> {
    let window = a.window.as_deref().map(parse_window).transpose()?;
    let trace = ingest_trace(&a.trace).map_err(|e| CliError::Usage(e.to_string()))?;
    let metrics = compute_metrics(&trace, window)?;
    // trace times carry microsecond resolution
    let text = to_json_rounded(&metrics, 9)?;
    if let Some(dir) = &a.common.out_dir {
        prepare_out_dir(dir)?;
        let mut outputs = Vec::new();
        write_file(dir, "metrics.json", text.as_bytes(), &mut outputs)?;
        write_manifest(dir, "analyze", a.common.seed, a, outputs)?;
    }
    print!("{text}");
    Ok(())
}

fn pmf_csv(analytic: &DurationDistribution, mc: Option<&DurationDistribution>) -> String {
    let mut out = String::from("duration_s,probability");
    if mc.is_some() {
        out.push_str(",mc_probability");
    }
    out.push('\n');
    for (i, (d, p)) in analytic
        .durations()
        .iter()
        .zip(analytic.probabilities())
        .enumerate()
    {
        out.push_str(&format!("{d},{p}"));
        if let Some(mc) = mc {
            let q = mc.probabilities().get(i).copied().unwrap_or(0.0);
            out.push_str(&format!(",{q}"));
        }
        out.push('\n');
    }
    out
}

fn cmd_distributions(a: &DistributionsArgs) -> CliResult<()> {
    let (params, _) = a.tcp.params()?;
    let (buffer, lambda) = a.buffer.parse()?;
    let gamma = GammaParams::new(a.gamma_shape, a.gamma_scale, a.gamma_divisor)?;
    let seg = SegmentConfig::new(a.segment_length, a.max_segments)?;
    if a.grid_points < 16 {
        return Err(CliError::Usage("--grid-points must be at least 16".into()));
    }

    let loss = loss_curve(&gamma, a.grid_points)?;
    let th = throughput_curve(&gamma, &params, a.grid_points)?;
    let pause = pause_duration_distribution(&th, &buffer, &seg)?;
    let play = play_duration_distribution(&th, &buffer, &seg, lambda.value())?;

    let mut loss_csv = Vec::new();
    loss.write_csv(&mut loss_csv)
        .map_err(|e| CliError::Runtime(e.to_string()))?;

    let dir = a.common.out_dir();
    prepare_out_dir(&dir)?;
    let mut outputs = Vec::new();
    write_file(&dir, "loss_pdf.csv", &loss_csv, &mut outputs)?;

    if a.mc_check {
        let mut rng = ChaCha8Rng::seed_from_u64(a.common.seed);
        let samples = sample_throughputs(&gamma, &params, KS_SAMPLES, &mut rng)?;
        let ks = ks_statistic(&th, &samples);
        let q0 = buffer.fluctuation_area();
        let mc_pause = first_passage_monte_carlo(&th, q0, &seg, 0.0, a.trials, &mut rng)?;
        let mc_play = first_passage_monte_carlo(&th, q0, &seg, lambda.value(), a.trials, &mut rng)?;

        let mut sorted = samples.clone();
        sorted.sort_by(f64::total_cmp);
        let sampler = th.sampler();
        let mut th_csv = String::from("x,density,cdf,mc_cdf\n");
        for (x, d) in th.grid().iter().zip(th.density()) {
            let empirical = sorted.partition_point(|s| s <= x) as f64 / sorted.len() as f64;
            th_csv.push_str(&format!("{x},{d},{},{empirical}\n", sampler.cdf(*x)));
        }
        write_file(&dir, "throughput_pdf.csv", th_csv.as_bytes(), &mut outputs)?;
        write_file(
            &dir,
            "pause_pmf.csv",
            pmf_csv(&pause, Some(&mc_pause)).as_bytes(),
            &mut outputs,
        )?;
        write_file(
            &dir,
            "play_pmf.csv",
            pmf_csv(&play, Some(&mc_play)).as_bytes(),
            &mut outputs,
        )?;
        let stats = to_json(&json!({
            "ks_statistic": ks,
            "ks_samples": KS_SAMPLES,
            "tv_pause": pause.total_variation(&mc_pause),
            "tv_play": play.total_variation(&mc_play),
            "trials": a.trials,
            "pause_mean_s": pause.mean(),
            "pause_mc_mean_s": mc_pause.mean(),
            "play_mean_s": play.mean(),
            "play_mc_mean_s": mc_play.mean(),
        }))?;
        write_file(&dir, "mc_check.json", stats.as_bytes(), &mut outputs)?;
        print!("{stats}");
    } else {
        let mut th_csv = Vec::new();
        th.write_csv(&mut th_csv)
            .map_err(|e| CliError::Runtime(e.to_string()))?;
        write_file(&dir, "throughput_pdf.csv", &th_csv, &mut outputs)?;
        write_file(
            &dir,
            "pause_pmf.csv",
            pmf_csv(&pause, None).as_bytes(),
            &mut outputs,
        )?;
        write_file(
            &dir,
            "play_pmf.csv",
            pmf_csv(&play, None).as_bytes(),
            &mut outputs,
        )?;
    }
    write_manifest(&dir, "distributions", a.common.seed, a, outputs)?;
    let m = th.moments();
    let _ = writeln!(
        std::io::stderr(),
        "throughput mean {:.1} B/s, std {:.1} B/s; mean pause {:.3} s, mean play {:.3} s",
        m.mean,
        m.std,
        pause.mean(),
        play.mean()
    );
    Ok(())
}
