//! Closed-form pause/play model.
//!
//! With mean throughput `η` below the playout rate `λ` the buffer cycles
//! between `q_min` and `q_max`: it refills in `v = q0/η`, drains in
//! `v′ = q0/(λ−η)`, and the cycle lasts `w = q0·λ/(η(λ−η))`. Pause
//! intensity is the product of mean pause duration and pause frequency,
//! which reduces to `1 − η/λ`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tcp::{
    capped_rate, invert_throughput, reno_rate, LinkConstraints, LossRate, TcpParams, Throughput,
    MAX_LOSS,
};

/// Video playout rate, bytes/second.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct PlayoutRate(f64);

impl PlayoutRate {
    pub fn new(bytes_per_sec: f64) -> Result<Self> {
        if bytes_per_sec > 0.0 && bytes_per_sec.is_finite() {
            Ok(PlayoutRate(bytes_per_sec))
        } else {
            Err(Error::domain(
                "playout rate",
                bytes_per_sec,
                "must be positive",
            ))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl Default for PlayoutRate {
    /// 100 KB/s.
    fn default() -> Self {
        PlayoutRate(100_000.0)
    }
}

/// Model quantities at one operating point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PauseMetrics {
    /// `v̄`, seconds. `None` when throughput keeps up with playout.
    pub avg_pause_duration: Option<f64>,
    /// `v̄′`, seconds.
    pub avg_play_duration: Option<f64>,
    /// `w`, seconds; infinite without pauses.
    pub period: f64,
    /// `f̄_v = 1/w`, 1/seconds.
    pub pause_frequency: f64,
    pub pause_intensity: f64,
    /// `β = dw/dη`, seconds per (byte/second).
    pub period_sensitivity: Option<f64>,
    pub no_pause: bool,
}

/// Pause/play durations, frequency, intensity and `β` for throughput `eta`.
pub fn pause_play_metrics(eta: Throughput, lambda: PlayoutRate, q0: f64) -> Result<PauseMetrics> {
    let (eta, lambda) = (eta.value(), lambda.value());
    if !(eta > 0.0) {
        return Err(Error::domain("throughput", eta, "must be positive"));
    }
    if !(q0 > 0.0) {
        return Err(Error::domain("q0", q0, "must be positive"));
    }
    if eta >= lambda {
        return Ok(PauseMetrics {
            avg_pause_duration: None,
            avg_play_duration: None,
            period: f64::INFINITY,
            pause_frequency: 0.0,
            pause_intensity: 0.0,
            period_sensitivity: None,
            no_pause: true,
        });
    }
    let deficit = lambda - eta;
    Ok(PauseMetrics {
        avg_pause_duration: Some(q0 / eta),
        avg_play_duration: Some(q0 / deficit),
        period: q0 * lambda / (eta * deficit),
        pause_frequency: eta * deficit / (q0 * lambda),
        pause_intensity: 1.0 - eta / lambda,
        period_sensitivity: Some(beta(eta, lambda, q0)),
        no_pause: false,
    })
}

/// `max(0, 1 − η/λ)`; does not depend on the buffer size.
pub fn pause_intensity(eta: Throughput, lambda: PlayoutRate) -> f64 {
    (1.0 - eta.value() / lambda.value()).max(0.0)
}

fn beta(eta: f64, lambda: f64, q0: f64) -> f64 {
    let d = eta * (lambda - eta);
    q0 * (-lambda * (lambda - 2.0 * eta)) / (d * d)
}

/// `β = ∂w/∂η = −q0·λ(λ−2η) / (η(λ−η))²`.
///
/// Negative below `λ/2`, zero at `λ/2`, positive above.
pub fn period_sensitivity(eta: Throughput, lambda: PlayoutRate, q0: f64) -> Result<f64> {
    let (e, l) = (eta.value(), lambda.value());
    if !(e > 0.0 && e < l) {
        return Err(Error::domain(
            "throughput",
            e,
            "must lie strictly between 0 and the playout rate",
        ));
    }
    Ok(beta(e, l, q0))
}

/// `∂w/∂λ = −q0/(λ−η)²`, the playout-rate term of the period's total
/// differential.
pub fn period_rate_sensitivity(eta: Throughput, lambda: PlayoutRate, q0: f64) -> Result<f64> {
    let (e, l) = (eta.value(), lambda.value());
    if !(e > 0.0 && e < l) {
        return Err(Error::domain(
            "throughput",
            e,
            "must lie strictly between 0 and the playout rate",
        ));
    }
    Ok(-q0 / ((l - e) * (l - e)))
}

/// Loss probabilities bounding the three pause regimes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalPoints {
    /// Reno throughput equals `λ`; pauses start here. Zero when the caps
    /// keep throughput below `λ` everywhere.
    pub p0: f64,
    /// Reno throughput equals `λ/2`: pause and play durations are equal and
    /// pause frequency peaks.
    pub p1: f64,
    /// Highest achievable throughput after caps, bytes/second.
    pub capped_max_throughput: f64,
    /// The caps hold throughput below `λ` for every loss rate, so region A
    /// is empty.
    pub always_pause: bool,
}

/// Solve the uncapped Reno curve for `λ` and `λ/2`.
pub fn critical_points(
    params: &TcpParams,
    caps: &LinkConstraints,
    lambda: PlayoutRate,
) -> Result<CriticalPoints> {
    params.validate()?;
    caps.validate()?;
    let l = lambda.value();
    let cap = caps.cap(params);
    let p1 = invert_throughput(Throughput::new(l / 2.0)?, params)?.value();
    let always_pause = l > cap;
    let p0 = if always_pause {
        0.0
    } else {
        invert_throughput(Throughput::new(l)?, params)?.value()
    };
    Ok(CriticalPoints {
        p0,
        p1,
        capped_max_throughput: cap,
        always_pause,
    })
}

/// Loss regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Region {
    /// Throughput above playout rate: no pauses.
    A,
    /// Pauses shorter than plays.
    B,
    /// Pauses longer than plays.
    C,
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Region::A => "A",
            Region::B => "B",
            Region::C => "C",
        };
        f.write_str(s)
    }
}

pub fn classify_region(p: LossRate, cp: &CriticalPoints) -> Region {
    let p = p.value();
    if p < cp.p0 {
        Region::A
    } else if p < cp.p1 {
        Region::B
    } else {
        Region::C
    }
}

/// One row of a model sweep over loss.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelPoint {
    pub loss: f64,
    /// Capped throughput, bytes/second.
    pub throughput: f64,
    pub metrics: PauseMetrics,
    pub region: Region,
}

/// Evaluate the model at each loss rate using the capped throughput.
pub fn model_sweep(
    params: &TcpParams,
    caps: &LinkConstraints,
    lambda: PlayoutRate,
    q0: f64,
    losses: &[f64],
) -> Result<(CriticalPoints, Vec<ModelPoint>)> {
    let cp = critical_points(params, caps, lambda)?;
    let rows = losses
        .iter()
        .map(|&p| {
            let loss = LossRate::new(p)?;
            let eta = capped_rate(p, params, caps);
            Ok(ModelPoint {
                loss: p,
                throughput: eta,
                metrics: pause_play_metrics(Throughput::new(eta)?, lambda, q0)?,
                region: classify_region(loss, &cp),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((cp, rows))
}

/// Pause duration `q0/η` implied by the capped throughput, defined whether
/// or not pauses occur. Flat while the caps bind, rising once Reno takes
/// over.
pub fn refill_time(p: LossRate, params: &TcpParams, caps: &LinkConstraints, q0: f64) -> f64 {
    q0 / capped_rate(p.value(), params, caps)
}

/// Throughput range reachable on the Reno curve inside the loss domain.
pub fn reno_range(params: &TcpParams) -> (f64, f64) {
    (
        reno_rate(MAX_LOSS, params),
        reno_rate(crate::tcp::LOSS_FLOOR, params),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q0: f64 = 198_500.0;

    fn rate(v: f64) -> Throughput {
        Throughput::new(v).unwrap()
    }

    fn lambda() -> PlayoutRate {
        PlayoutRate::default()
    }

    #[test]
    fn boundary_at_playout_rate() {
        let m = pause_play_metrics(rate(100_000.0), lambda(), Q0).unwrap();
        assert!(m.no_pause);
        assert_eq!(m.pause_intensity, 0.0);
        assert_eq!(m.pause_frequency, 0.0);
        assert!(m.period.is_infinite());
        assert_eq!(m.avg_pause_duration, None);
    }

    #[test]
    fn half_rate_operating_point() {
        let m = pause_play_metrics(rate(50_000.0), lambda(), Q0).unwrap();
        assert!((m.avg_pause_duration.unwrap() - 3.97).abs() < 1e-12);
        assert!((m.avg_play_duration.unwrap() - 3.97).abs() < 1e-12);
        assert!((m.period - 7.94).abs() < 1e-12);
        assert!((m.pause_frequency - 1.0 / 7.94).abs() < 1e-15);
        assert!((m.pause_frequency - 0.1259).abs() < 1e-4);
        assert!((m.pause_intensity - 0.5).abs() < 1e-15);
        assert_eq!(m.period_sensitivity, Some(0.0));
    }

    #[test]
    fn three_quarter_rate_operating_point() {
        let m = pause_play_metrics(rate(75_000.0), lambda(), Q0).unwrap();
        assert!((m.pause_intensity - 0.25).abs() < 1e-15);
        assert!((m.avg_pause_duration.unwrap() - 2.646_666_666_666_667).abs() < 1e-12);
        let f = 75.0 * 25.0 / (198.5 * 100.0);
        assert!((m.pause_frequency - f).abs() < 1e-15);
        assert!((m.pause_frequency - 0.09446).abs() < 1e-5);
    }

    #[test]
    fn domain_errors() {
        assert!(pause_play_metrics(rate(0.0), lambda(), Q0).is_err());
        assert!(pause_play_metrics(rate(1.0), lambda(), 0.0).is_err());
        assert!(PlayoutRate::new(0.0).is_err());
        assert!(period_sensitivity(rate(100_000.0), lambda(), Q0).is_err());
        assert!(period_sensitivity(rate(0.0), lambda(), Q0).is_err());
    }

    #[test]
    fn intensity_limits() {
        assert_eq!(pause_intensity(rate(0.0), lambda()), 1.0);
        assert_eq!(pause_intensity(rate(150_000.0), lambda()), 0.0);
        assert_eq!(
            pause_intensity(rate(50.0), PlayoutRate::new(100.0).unwrap()),
            0.5
        );
    }

    #[test]
    fn beta_signs() {
        assert_eq!(
            period_sensitivity(rate(50_000.0), lambda(), Q0).unwrap(),
            0.0
        );
        assert!(period_sensitivity(rate(25_000.0), lambda(), Q0).unwrap() < 0.0);
        assert!(period_sensitivity(rate(75_000.0), lambda(), Q0).unwrap() > 0.0);
    }

    #[test]
    fn beta_matches_finite_difference_at_quarter_rate() {
        let w = |e: f64| Q0 * 100_000.0 / (e * (100_000.0 - e));
        let e = 25_000.0;
        let h = 1e-4 * e;
        let fd = (w(e + h) - w(e - h)) / (2.0 * h);
        let b = period_sensitivity(rate(e), lambda(), Q0).unwrap();
        assert!((b - fd).abs() / b.abs() < 1e-6);
    }

    #[test]
    fn rate_sensitivity_matches_finite_difference() {
        let w = |l: f64| Q0 * l / (40_000.0 * (l - 40_000.0));
        let h = 1.0;
        let fd = (w(100_000.0 + h) - w(100_000.0 - h)) / (2.0 * h);
        let d = period_rate_sensitivity(rate(40_000.0), lambda(), Q0).unwrap();
        assert!((d - fd).abs() / d.abs() < 1e-6);
    }

    #[test]
    fn table1_critical_points() {
        let cp =
            critical_points(&TcpParams::default(), &LinkConstraints::default(), lambda()).unwrap();
        assert!((cp.p0 - 0.009_856_287).abs() < 1e-8);
        assert!((cp.p1 - 0.035_173_096).abs() < 1e-8);
        assert!(cp.p0 < cp.p1);
        assert!(!cp.always_pause);
        assert_eq!(cp.capped_max_throughput, 125_000.0);
    }

    #[test]
    fn playout_beyond_caps_always_pauses() {
        let cp = critical_points(
            &TcpParams::default(),
            &LinkConstraints::default(),
            PlayoutRate::new(250_000.0).unwrap(),
        )
        .unwrap();
        assert!(cp.always_pause);
        assert_eq!(cp.p0, 0.0);
        assert!(cp.p0 < cp.p1);
        assert_eq!(
            classify_region(LossRate::new(1e-4).unwrap(), &cp),
            Region::B
        );
    }

    #[test]
    fn regions() {
        let cp =
            critical_points(&TcpParams::default(), &LinkConstraints::default(), lambda()).unwrap();
        let at = |p: f64| classify_region(LossRate::new(p).unwrap(), &cp);
        assert_eq!(at(cp.p0 / 2.0), Region::A);
        assert_eq!(at((cp.p0 + cp.p1) / 2.0), Region::B);
        assert_eq!(at(0.10), Region::C);
        assert_eq!(at(cp.p0), Region::B);
        assert_eq!(at(cp.p1), Region::C);
    }

    #[test]
    fn refill_time_is_flat_then_rising() {
        let params = TcpParams::default();
        let caps = LinkConstraints::default();
        let grid: Vec<f64> = (1..=24).map(|i| 0.005 * i as f64).collect();
        let v: Vec<f64> = grid
            .iter()
            .map(|&p| refill_time(LossRate::new(p).unwrap(), &params, &caps, Q0))
            .collect();
        assert_eq!(v[0], Q0 / 125_000.0);
        assert!(v.windows(2).all(|w| w[1] >= w[0]));
        assert!(v[23] > 4.0 * v[0]);
    }
}
