//! Segment-level playout-buffer simulator.
//!
//! Each step of length `Δt` delivers data at a constant rate derived from
//! that step's loss probability. Within a step the occupancy moves linearly,
//! so threshold crossings are timed exactly; the remainder of the step runs
//! in the new state.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::loss::{sample_loss_rate, GammaParams};
use crate::model::{pause_play_metrics, PauseMetrics, PlayoutRate};
use crate::pause_stats::BufferThresholds;
use crate::tcp::{capped_rate, LinkConstraints, LossRate, TcpParams, Throughput};
use crate::trace::{compute_metrics, EmpiricalMetrics, EventKind, SessionTrace, TraceEvent};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimMode {
    /// Constant throughput at the nominal loss rate.
    Deterministic,
    /// Per-step loss drawn from a Gamma whose mean is the nominal loss.
    Stochastic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub tcp: TcpParams,
    pub caps: LinkConstraints,
    pub buffer: BufferThresholds,
    /// Bytes/second.
    pub playout_rate: f64,
    /// Seconds.
    pub step: f64,
    /// Seconds.
    pub session_length: f64,
    pub mode: SimMode,
    pub loss_rate: f64,
    /// Shape and divisor of the per-step loss law; the scale is re-derived
    /// from `loss_rate`.
    pub loss_jitter: GammaParams,
    pub seed: u64,
    /// Record occupancy at the end of every step.
    pub record_occupancy: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            tcp: TcpParams::default(),
            caps: LinkConstraints::default(),
            buffer: BufferThresholds {
                q_min: 1_500.0,
                q_max: 200_000.0,
            },
            playout_rate: 100_000.0,
            step: 0.1,
            session_length: 10_000.0,
            mode: SimMode::Deterministic,
            loss_rate: 0.035,
            loss_jitter: GammaParams::default(),
            seed: 0,
            record_occupancy: false,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        self.tcp.validate()?;
        self.caps.validate()?;
        self.buffer.validate()?;
        self.loss_jitter.validate()?;
        PlayoutRate::new(self.playout_rate)?;
        LossRate::new(self.loss_rate)?;
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::domain("step", self.step, "must be positive"));
        }
        if !(self.session_length >= 100.0 * self.step) || !self.session_length.is_finite() {
            return Err(Error::domain(
                "session length",
                self.session_length,
                "must cover at least 100 steps",
            ));
        }
        Ok(())
    }
}

/// Mean and sample standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stat {
    pub mean: f64,
    pub std: f64,
}

impl Stat {
    fn of(values: &[f64]) -> Option<Stat> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Some(Stat { mean, std })
    }
}

/// Metrics of one or more runs plus their spread.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimResult {
    pub runs: Vec<EmpiricalMetrics>,
    /// Over runs that completed at least one pause.
    pub mean_pause_duration: Option<Stat>,
    pub pause_frequency: Stat,
    pub pause_intensity: Stat,
}

impl SimResult {
    pub fn from_runs(runs: Vec<EmpiricalMetrics>) -> Self {
        let durations: Vec<f64> = runs.iter().filter_map(|r| r.mean_pause_duration).collect();
        let freq: Vec<f64> = runs.iter().map(|r| r.pause_frequency).collect();
        let pi: Vec<f64> = runs.iter().map(|r| r.pause_intensity).collect();
        SimResult {
            mean_pause_duration: Stat::of(&durations),
            pause_frequency: Stat::of(&freq).unwrap_or(Stat {
                mean: 0.0,
                std: 0.0,
            }),
            pause_intensity: Stat::of(&pi).unwrap_or(Stat {
                mean: 0.0,
                std: 0.0,
            }),
            runs,
        }
    }
}

/// Totals kept alongside the trace for conservation checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BufferLedger {
    pub inflow: f64,
    pub outflow: f64,
    pub final_occupancy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum State {
    Filling,
    Playing,
    Paused,
}

/// Run one session and measure it.
pub fn run_session(cfg: &SimConfig) -> Result<(SessionTrace, SimResult)> {
    let (trace, _) = simulate(cfg)?;
    let metrics = compute_metrics(&trace, None)?;
    Ok((trace, SimResult::from_runs(vec![metrics])))
}

/// Run one session, returning the trace and the byte ledger.
pub fn simulate(cfg: &SimConfig) -> Result<(SessionTrace, BufferLedger)> {
    cfg.validate()?;
    let steps = (cfg.session_length / cfg.step).round() as u64;
    let dt = cfg.step;
    let lambda = cfg.playout_rate;
    let (q_min, q_max) = (cfg.buffer.q_min, cfg.buffer.q_max);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let jitter = cfg.loss_jitter.mean_matched(cfg.loss_rate)?;
    let nominal = capped_rate(cfg.loss_rate, &cfg.tcp, &cfg.caps);

    let mut events = Vec::new();
    let mut occupancy = Vec::new();
    let mut state = State::Filling;
    let mut q = 0.0;
    let (mut inflow, mut outflow) = (0.0, 0.0);

    for i in 0..steps {
        let t0 = i as f64 * dt;
        let eta = match cfg.mode {
            SimMode::Deterministic => nominal,
            SimMode::Stochastic => {
                let p = sample_loss_rate(&jitter, &mut rng)?;
                capped_rate(p.value(), &cfg.tcp, &cfg.caps)
            }
        };
        inflow += eta * dt;

        let mut elapsed = 0.0;
        while elapsed < dt {
            let remaining = dt - elapsed;
            match state {
                State::Filling | State::Paused => {
                    if eta > 0.0 {
                        let to_full = ((q_max - q) / eta).max(0.0);
                        if to_full <= remaining {
                            q = q_max;
                            elapsed += to_full;
                            state = State::Playing;
                            events.push(TraceEvent {
                                time: t0 + elapsed,
                                kind: EventKind::PlayStart,
                            });
                            continue;
                        }
                    }
                    q += eta * remaining;
                    elapsed = dt;
                }
                State::Playing => {
                    let net = eta - lambda;
                    if net < 0.0 {
                        let to_empty = ((q - q_min) / -net).max(0.0);
                        if to_empty <= remaining {
                            q = q_min;
                            elapsed += to_empty;
                            outflow += lambda * to_empty;
                            state = State::Paused;
                            events.push(TraceEvent {
                                time: t0 + elapsed,
                                kind: EventKind::PauseStart,
                            });
                            continue;
                        }
                    }
                    q += net * remaining;
                    outflow += lambda * remaining;
                    elapsed = dt;
                }
            }
        }
        if cfg.record_occupancy {
            occupancy.push((t0 + dt, q));
        }
    }

    // merge events that landed on the same instant (zero-length phases)
    dedup_events(&mut events);
    let end = steps as f64 * dt;
    let mut trace = SessionTrace::new(events, Some(end))?;
    trace.occupancy = occupancy;
    Ok((
        trace,
        BufferLedger {
            inflow,
            outflow,
            final_occupancy: q,
        },
    ))
}

fn dedup_events(events: &mut Vec<TraceEvent>) {
    let mut out: Vec<TraceEvent> = Vec::with_capacity(events.len());
    for e in events.drain(..) {
        match out.last() {
            Some(prev) if !(e.time > prev.time) => {
                out.pop();
            }
            _ => out.push(e),
        }
    }
    *events = out;
}

/// One loss rate of a sweep: model values and simulated spread.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub loss: f64,
    pub model: PauseMetrics,
    pub sim: SimResult,
}

/// Run `runs_per_point` sessions (seeds `seed + i`) at each loss rate.
pub fn sweep_loss(
    cfg: &SimConfig,
    loss_grid: &[f64],
    runs_per_point: usize,
) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    if runs_per_point == 0 {
        return Err(Error::domain("runs per point", 0.0, "must be at least 1"));
    }
    for &p in loss_grid {
        LossRate::new(p)?;
    }
    let lambda = PlayoutRate::new(cfg.playout_rate)?;
    let q0 = cfg.buffer.fluctuation_area();

    let jobs: Vec<(usize, usize)> = (0..loss_grid.len())
        .flat_map(|i| (0..runs_per_point).map(move |r| (i, r)))
        .collect();
    let runs = jobs
        .par_iter()
        .map(|&(i, r)| {
            let run_cfg = SimConfig {
                loss_rate: loss_grid[i],
                seed: cfg.seed.wrapping_add(r as u64),
                record_occupancy: false,
                ..*cfg
            };
            let (trace, _) = simulate(&run_cfg)?;
            compute_metrics(&trace, None)
        })
        .collect::<Result<Vec<_>>>()?;

    loss_grid
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let eta = capped_rate(p, &cfg.tcp, &cfg.caps);
            let chunk = runs[i * runs_per_point..(i + 1) * runs_per_point].to_vec();
            Ok(SweepRow {
                loss: p,
                model: pause_play_metrics(Throughput::new(eta)?, lambda, q0)?,
                sim: SimResult::from_runs(chunk),
            })
        })
        .collect()
}

pub const SWEEP_HEADER: &str = "loss,model_pi,sim_pi_mean,sim_pi_std,model_freq,sim_freq_mean,sim_freq_std,model_dur,sim_dur_mean,sim_dur_std";

/// Sweep table as CSV; absent durations are empty cells.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        let dur = r.sim.mean_pause_duration;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.loss,
            r.model.pause_intensity,
            r.sim.pause_intensity.mean,
            r.sim.pause_intensity.std,
            r.model.pause_frequency,
            r.sim.pause_frequency.mean,
            r.sim.pause_frequency.std,
            opt(r.model.avg_pause_duration),
            opt(dur.map(|s| s.mean)),
            opt(dur.map(|s| s.std)),
        ));
    }
    out
}

/// Periodic trace with the given pause frequency and pause duration.
///
/// Each period of `1/frequency` seconds is a play phase followed by a pause
/// of `pause_duration`. The trace opens with playback at t = 0 and must
/// contain at least two pause starts so that one full cycle is measurable.
pub fn synthesize_trace(
    frequency: f64,
    pause_duration: f64,
    session_length: f64,
) -> Result<SessionTrace> {
    if !(frequency > 0.0 && pause_duration > 0.0) {
        return Err(Error::Config(
            "frequency and pause duration must be positive".into(),
        ));
    }
    if !(frequency * pause_duration < 1.0) {
        return Err(Error::Config(format!(
            "frequency × duration = {} must be below 1",
            frequency * pause_duration
        )));
    }
    let period = 1.0 / frequency;
    let play = period - pause_duration;
    if !(play + period <= session_length) {
        return Err(Error::Config(format!(
            "session of {session_length} s cannot hold a full {period} s cycle"
        )));
    }
    let mut events = vec![TraceEvent {
        time: 0.0,
        kind: EventKind::PlayStart,
    }];
    let mut k = 0u64;
    loop {
        let pause_at = k as f64 * period + play;
        if pause_at > session_length {
            break;
        }
        events.push(TraceEvent {
            time: pause_at,
            kind: EventKind::PauseStart,
        });
        let resume = (k + 1) as f64 * period;
        if resume > session_length {
            break;
        }
        events.push(TraceEvent {
            time: resume,
            kind: EventKind::PlayStart,
        });
        k += 1;
    }
    SessionTrace::new(events, Some(session_length))
}
