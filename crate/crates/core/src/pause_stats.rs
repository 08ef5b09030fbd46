//! Pause- and play-duration distributions from the throughput density.
//!
//! The buffer gains `Δt·η_i` per segment. Treating the segment sum as normal
//! with mean `m·μ_η` and variance `m·σ_η²`, the probability that `m` segments
//! exactly span the fluctuation area `q0` is read off the normal density and
//! assigned to the duration `m·Δt`. A Monte Carlo first-passage simulation
//! of the same segment process serves as a cross-check.

use std::f64::consts::PI;
use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::loss::DensityCurve;

const MIN_TRIALS: usize = 10_000;
const MAX_PASSAGE_SEGMENTS: u64 = 10_000_000;
const MC_CHUNKS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmentConfig {
    /// Δt, seconds.
    pub segment_length: f64,
    /// Largest segment count considered.
    pub max_segments: usize,
}

impl Default for SegmentConfig {
    fn default() -> Self {
        SegmentConfig {
            segment_length: 0.1,
            max_segments: 2000,
        }
    }
}

impl SegmentConfig {
    pub fn new(segment_length: f64, max_segments: usize) -> Result<Self> {
        let seg = SegmentConfig {
            segment_length,
            max_segments,
        };
        seg.validate()?;
        Ok(seg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.segment_length > 0.0 && self.segment_length.is_finite()) {
            return Err(Error::domain(
                "segment length",
                self.segment_length,
                "must be positive",
            ));
        }
        if self.max_segments < 10 {
            return Err(Error::domain(
                "max segments",
                self.max_segments as f64,
                "must be at least 10",
            ));
        }
        Ok(())
    }
}

/// Playout-buffer thresholds, bytes.
///
/// Playback pauses when the occupancy drops below `q_min` and resumes once
/// it reaches `q_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BufferThresholds {
    pub q_min: f64,
    pub q_max: f64,
}

impl Default for BufferThresholds {
    fn default() -> Self {
        BufferThresholds {
            q_min: 1_500.0,
            q_max: 200_000.0,
        }
    }
}

impl BufferThresholds {
    pub fn new(q_min: f64, q_max: f64) -> Result<Self> {
        let b = BufferThresholds { q_min, q_max };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.q_min >= 0.0) {
            return Err(Error::domain("q_min", self.q_min, "must be non-negative"));
        }
        if !(self.q_max > self.q_min && self.q_max.is_finite()) {
            return Err(Error::domain("q_max", self.q_max, "must exceed q_min"));
        }
        Ok(())
    }

    /// `q0 = q_max − q_min`.
    pub fn fluctuation_area(&self) -> f64 {
        self.q_max - self.q_min
    }
}

/// A probability mass function over durations (seconds).
#[derive(Debug, Clone, PartialEq)]
pub struct DurationDistribution {
    durations: Vec<f64>,
    probabilities: Vec<f64>,
    truncated: bool,
}

impl DurationDistribution {
    /// Normalizes `weights` to sum to one.
    pub fn new(durations: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if durations.is_empty() || durations.len() != weights.len() {
            return Err(Error::Config(
                "durations and probabilities must be non-empty and equal length".into(),
            ));
        }
        if durations[0] <= 0.0 || durations.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Config(
                "durations must be positive and strictly ascending".into(),
            ));
        }
        if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(Error::Config(
                "probabilities must be finite and non-negative".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(Error::Config("distribution has no mass".into()));
        }
        let probabilities = weights.into_iter().map(|w| w / total).collect();
        Ok(DurationDistribution {
            durations,
            probabilities,
            truncated: false,
        })
    }

    pub fn durations(&self) -> &[f64] {
        &self.durations
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    /// Set when a material part of the mass falls beyond `max_segments`.
    pub fn truncated(&self) -> bool {
        self.truncated
    }

    pub fn mean(&self) -> f64 {
        self.durations
            .iter()
            .zip(&self.probabilities)
            .map(|(d, p)| d * p)
            .sum()
    }

    pub fn mode(&self) -> f64 {
        self.durations[argmax(&self.probabilities)]
    }

    /// Non-decreasing up to the peak and non-increasing after it.
    pub fn is_unimodal(&self) -> bool {
        is_unimodal(&self.probabilities)
    }

    /// Total-variation distance `½·Σ|p − q|` over the union of supports.
    pub fn total_variation(&self, other: &DurationDistribution) -> f64 {
        let (a, b) = (self, other);
        let (mut i, mut j, mut sum) = (0, 0, 0.0);
        while i < a.durations.len() || j < b.durations.len() {
            let da = a.durations.get(i).copied().unwrap_or(f64::INFINITY);
            let db = b.durations.get(j).copied().unwrap_or(f64::INFINITY);
            let tol = 1e-9 * da.abs().min(db.abs()).max(1.0);
            if (da - db).abs() <= tol {
                sum += (a.probabilities[i] - b.probabilities[j]).abs();
                i += 1;
                j += 1;
            } else if da < db {
                sum += a.probabilities[i];
                i += 1;
            } else {
                sum += b.probabilities[j];
                j += 1;
            }
        }
        0.5 * sum
    }

    /// CSV `duration_s,probability` with header.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "duration_s,probability")?;
        for (d, p) in self.durations.iter().zip(&self.probabilities) {
            writeln!(out, "{d},{p}")?;
        }
        Ok(())
    }
}

fn argmax(v: &[f64]) -> usize {
    v.iter()
        .enumerate()
        .fold(
            (0, f64::MIN),
            |best, (i, &x)| if x > best.1 { (i, x) } else { best },
        )
        .0
}

pub(crate) fn is_unimodal(v: &[f64]) -> bool {
    let peak = argmax(v);
    v[..=peak].windows(2).all(|w| w[1] >= w[0]) && v[peak..].windows(2).all(|w| w[1] <= w[0])
}

/// Normal-approximation pmf over `m = 1..=max_segments` for a segment sum
/// with per-segment mean `step_mean` and std `step_std` reaching `level`.
fn clt_passage_pmf(
    step_mean: f64,
    step_std: f64,
    level: f64,
    seg: &SegmentConfig,
) -> Result<DurationDistribution> {
    let max = seg.max_segments;
    let durations: Vec<f64> = (1..=max).map(|m| m as f64 * seg.segment_length).collect();

    if step_std == 0.0 {
        let m0 = (level / step_mean).round().clamp(1.0, max as f64) as usize;
        let mut weights = vec![0.0; max];
        weights[m0 - 1] = 1.0;
        let mut dist = DurationDistribution::new(durations, weights)?;
        dist.truncated = level / step_mean > max as f64 + 0.5;
        return Ok(dist);
    }

    let log_weight = |m: usize| {
        let m = m as f64;
        let z = level - m * step_mean;
        -z * z / (2.0 * m * step_std * step_std) - step_std.ln() - 0.5 * (2.0 * PI * m).ln()
    };
    let logs: Vec<f64> = (1..=max).map(log_weight).collect();
    let peak_log = logs.iter().copied().fold(f64::MIN, f64::max);
    let weights: Vec<f64> = logs.iter().map(|l| (l - peak_log).exp()).collect();

    // weight beyond the last segment, for the truncation flag
    let kept: f64 = weights.iter().sum();
    let mut beyond = 0.0;
    for m in max + 1..=20 * max {
        let w = (log_weight(m) - peak_log).exp();
        beyond += w;
        if w < 1e-18 * (kept + beyond) && m as f64 * step_mean > level {
            break;
        }
    }
    let mut dist = DurationDistribution::new(durations, weights)?;
    dist.truncated = beyond > 0.1 * (kept + beyond);
    Ok(dist)
}

/// Distribution of pause durations: the buffer refills from `q_min` to
/// `q_max` at the sampled throughput, with no playout.
pub fn pause_duration_distribution(
    th: &DensityCurve,
    buf: &BufferThresholds,
    seg: &SegmentConfig,
) -> Result<DurationDistribution> {
    buf.validate()?;
    seg.validate()?;
    let m = th.moments();
    if !(m.mean > 0.0) {
        return Err(Error::domain(
            "mean throughput",
            m.mean,
            "must be positive for the buffer to refill",
        ));
    }
    let level = buf.fluctuation_area() / seg.segment_length;
    clt_passage_pmf(m.mean, m.std, level, seg)
}

/// Distribution of play durations: the buffer drains from `q_max` to `q_min`
/// at net rate `λ − η`.
pub fn play_duration_distribution(
    th: &DensityCurve,
    buf: &BufferThresholds,
    seg: &SegmentConfig,
    playout_rate: f64,
) -> Result<DurationDistribution> {
    buf.validate()?;
    seg.validate()?;
    let m = th.moments();
    if !(playout_rate > m.mean) {
        return Err(Error::NoPauseRegime {
            playout_rate,
            mean_throughput: m.mean,
        });
    }
    let level = buf.fluctuation_area() / seg.segment_length;
    clt_passage_pmf(playout_rate - m.mean, m.std, level, seg)
}

/// Empirical first-passage pmf of `|Σ Δt·(η_i − drift_offset)| ≥ threshold`
/// with `η_i` drawn i.i.d. from `th`.
///
/// `drift_offset = 0` gives pause durations, `drift_offset = λ` play
/// durations. Trials run in fixed chunks seeded from `rng`, so the result
/// depends only on the caller's RNG state.
pub fn first_passage_monte_carlo<R: Rng + ?Sized>(
    th: &DensityCurve,
    threshold: f64,
    seg: &SegmentConfig,
    drift_offset: f64,
    trials: usize,
    rng: &mut R,
) -> Result<DurationDistribution> {
    seg.validate()?;
    if trials < MIN_TRIALS {
        return Err(Error::domain(
            "trials",
            trials as f64,
            "need at least 10^4 trials",
        ));
    }
    if !(threshold > 0.0) {
        return Err(Error::domain("threshold", threshold, "must be positive"));
    }
    let sampler = th.sampler();
    let dt = seg.segment_length;
    let seeds: Vec<u64> = (0..MC_CHUNKS).map(|_| rng.random()).collect();

    let counts = seeds
        .par_iter()
        .enumerate()
        .map(|(chunk, &seed)| {
            let n = trials / MC_CHUNKS + usize::from(chunk < trials % MC_CHUNKS);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut hist: Vec<u64> = Vec::new();
            for _ in 0..n {
                let mut acc = 0.0;
                let mut m: u64 = 0;
                loop {
                    m += 1;
                    acc += dt * (sampler.sample(&mut rng) - drift_offset);
                    if acc.abs() >= threshold {
                        break;
                    }
                    if m >= MAX_PASSAGE_SEGMENTS {
                        return Err(Error::IterationCap(MAX_PASSAGE_SEGMENTS));
                    }
                }
                let m = m as usize;
                if hist.len() < m {
                    hist.resize(m, 0);
                }
                hist[m - 1] += 1;
            }
            Ok(hist)
        })
        .collect::<Result<Vec<_>>>()?;

    let len = counts.iter().map(Vec::len).max().unwrap_or(0);
    let mut total = vec![0u64; len];
    for hist in &counts {
        for (t, c) in total.iter_mut().zip(hist) {
            *t += c;
        }
    }
    let durations = (1..=len).map(|m| m as f64 * dt).collect();
    DurationDistribution::new(durations, total.into_iter().map(|c| c as f64).collect())
}
