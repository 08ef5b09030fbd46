//! Steady-state TCP-Reno throughput as a function of packet loss.
//!
//! Rates are bytes/second. The Reno formula yields packets/second and is
//! scaled by the packet size. 1 KB = 1000 bytes, 1 Mb = 10^6 bits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper end of the loss range where `min(1, 3·sqrt(3bp/8))` resolves to its
/// second argument (for b = 2).
pub const MAX_LOSS: f64 = 0.12;

/// Lower end of the invertible range; the throughput is singular at p = 0.
pub const LOSS_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TcpParams {
    /// Round-trip time, seconds.
    pub rtt: f64,
    /// Retransmission timeout, seconds.
    pub timeout: f64,
    /// Rounds per congestion-window increment (delayed ACK factor).
    pub rounds_per_window_increment: u32,
    /// Bytes.
    pub packet_size: f64,
}

impl Default for TcpParams {
    fn default() -> Self {
        TcpParams {
            rtt: 0.128,
            timeout: 0.128,
            rounds_per_window_increment: 2,
            packet_size: 1500.0,
        }
    }
}

impl TcpParams {
    pub fn new(
        rtt: f64,
        timeout: f64,
        rounds_per_window_increment: u32,
        packet_size: f64,
    ) -> Result<Self> {
        let params = TcpParams {
            rtt,
            timeout,
            rounds_per_window_increment,
            packet_size,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rtt > 0.0 && self.rtt.is_finite()) {
            return Err(Error::domain("rtt", self.rtt, "must be positive"));
        }
        if !(self.timeout > 0.0 && self.timeout.is_finite()) {
            return Err(Error::domain("timeout", self.timeout, "must be positive"));
        }
        if self.rounds_per_window_increment < 1 {
            return Err(Error::domain(
                "rounds_per_window_increment",
                f64::from(self.rounds_per_window_increment),
                "must be at least 1",
            ));
        }
        if !(self.packet_size > 0.0 && self.packet_size.is_finite()) {
            return Err(Error::domain(
                "packet_size",
                self.packet_size,
                "must be positive",
            ));
        }
        Ok(())
    }

    fn b(&self) -> f64 {
        f64::from(self.rounds_per_window_increment)
    }
}

/// Bottleneck and receiver-window caps on the achievable rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkConstraints {
    /// Bytes/second.
    pub bottleneck_bandwidth: f64,
    /// Advertised receiver window, packets.
    pub advertised_window: f64,
}

impl Default for LinkConstraints {
    fn default() -> Self {
        // 1 Mb/s bottleneck, 20-packet window.
        LinkConstraints {
            bottleneck_bandwidth: 125_000.0,
            advertised_window: 20.0,
        }
    }
}

impl LinkConstraints {
    pub fn new(bottleneck_bandwidth: f64, advertised_window: f64) -> Result<Self> {
        let caps = LinkConstraints {
            bottleneck_bandwidth,
            advertised_window,
        };
        caps.validate()?;
        Ok(caps)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.bottleneck_bandwidth > 0.0) {
            return Err(Error::domain(
                "bottleneck_bandwidth",
                self.bottleneck_bandwidth,
                "must be positive",
            ));
        }
        if !(self.advertised_window > 0.0) {
            return Err(Error::domain(
                "advertised_window",
                self.advertised_window,
                "must be positive",
            ));
        }
        Ok(())
    }

    /// Window-limited rate `Wm · packet_size / RTT`, bytes/second.
    pub fn window_rate(&self, params: &TcpParams) -> f64 {
        self.advertised_window * params.packet_size / params.rtt
    }

    /// The smaller of the two caps, bytes/second.
    pub fn cap(&self, params: &TcpParams) -> f64 {
        self.bottleneck_bandwidth.min(self.window_rate(params))
    }
}

/// Delivered byte rate.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Throughput(f64);

impl Throughput {
    pub fn new(bytes_per_sec: f64) -> Result<Self> {
        if bytes_per_sec >= 0.0 && !bytes_per_sec.is_nan() {
            Ok(Throughput(bytes_per_sec))
        } else {
            Err(Error::domain(
                "throughput",
                bytes_per_sec,
                "must be non-negative",
            ))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Packet loss probability in `(0, MAX_LOSS]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct LossRate(f64);

impl LossRate {
    pub fn new(p: f64) -> Result<Self> {
        if p > 0.0 && p <= MAX_LOSS {
            Ok(LossRate(p))
        } else {
            Err(Error::domain("loss rate", p, "must lie in (0, 0.12]"))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Which case of the Reno model to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenoBranch {
    WithTimeout,
    WithoutTimeout,
}

/// Reno throughput with timeouts, bytes/second, for `p` already known to be
/// in range.
///
/// `1 / (R·sqrt(2bp/3) + 3·T0·sqrt(3bp/8)·p·(1 + 32p²))` packets/second. With
/// b = 2 the two terms reduce to `(2R/√3)·p^½` and `(3√3·T0/2)·p^{3/2}`.
pub(crate) fn reno_rate(p: f64, params: &TcpParams) -> f64 {
    let b = params.b();
    let window_term = params.rtt * (2.0 * b * p / 3.0).sqrt();
    let timeout_term = params.timeout * 3.0 * (3.0 * b * p / 8.0).sqrt() * p * (1.0 + 32.0 * p * p);
    params.packet_size / (window_term + timeout_term)
}

pub fn reno_throughput_timeout(p: LossRate, params: &TcpParams) -> Throughput {
    Throughput(reno_rate(p.0, params))
}

/// Both cases of the Reno model over the full `(0, 1)` loss range.
///
/// Only the timeout case is used by the rest of the crate.
pub fn reno_throughput_general(
    p: f64,
    params: &TcpParams,
    branch: RenoBranch,
) -> Result<Throughput> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain("loss rate", p, "must lie in (0, 1)"));
    }
    params.validate()?;
    let b = params.b();
    let window_term = params.rtt * (2.0 * b * p / 3.0).sqrt();
    let packets = match branch {
        RenoBranch::WithTimeout => {
            let retransmit = (3.0 * (3.0 * b * p / 8.0).sqrt()).min(1.0);
            1.0 / (window_term + params.timeout * retransmit * p * (1.0 + 32.0 * p * p))
        }
        RenoBranch::WithoutTimeout => 1.0 / window_term,
    };
    Ok(Throughput(packets * params.packet_size))
}

/// Reno throughput limited by the bottleneck and the receiver window.
pub fn effective_throughput(
    p: LossRate,
    params: &TcpParams,
    caps: &LinkConstraints,
) -> Result<Throughput> {
    caps.validate()?;
    Ok(Throughput(capped_rate(p.0, params, caps)))
}

pub(crate) fn capped_rate(p: f64, params: &TcpParams, caps: &LinkConstraints) -> f64 {
    reno_rate(p, params).min(caps.cap(params))
}

/// Loss rate at which the uncapped Reno throughput equals `target`.
///
/// Bisection on `[LOSS_FLOOR, MAX_LOSS]`; the throughput is strictly
/// decreasing in p.
pub fn invert_throughput(target: Throughput, params: &TcpParams) -> Result<LossRate> {
    params.validate()?;
    let y = target.0;
    let high = reno_rate(LOSS_FLOOR, params);
    let low = reno_rate(MAX_LOSS, params);
    if !(y >= low && y <= high) {
        return Err(Error::OutOfRange {
            target: y,
            low,
            high,
        });
    }
    let (mut lo, mut hi) = (LOSS_FLOOR, MAX_LOSS);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if reno_rate(mid, params) > y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // pick the closer endpoint
    let p = if (reno_rate(lo, params) - y).abs() <= (reno_rate(hi, params) - y).abs() {
        lo
    } else {
        hi
    };
    LossRate::new(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table1() -> TcpParams {
        TcpParams::default()
    }

    fn loss(p: f64) -> LossRate {
        LossRate::new(p).unwrap()
    }

    #[test]
    fn reno_reference_values() {
        // 40-digit evaluation of the closed form
        let at_1pct = reno_throughput_timeout(loss(0.01), &table1()).value();
        assert!((at_1pct - 99_247.145_439_136_71).abs() / at_1pct < 1e-12);
        let at_3_5pct = reno_throughput_timeout(loss(0.035), &table1()).value();
        assert!((at_3_5pct - 50_143.664_406_974_38).abs() / at_3_5pct < 1e-12);
    }

    #[test]
    fn reno_grows_without_bound_near_zero() {
        let a = reno_throughput_timeout(loss(1e-4), &table1()).value();
        let b = reno_throughput_timeout(loss(1e-8), &table1()).value();
        assert!(b > 50.0 * a);
    }

    #[test]
    fn loss_rate_domain() {
        assert!(LossRate::new(0.0).is_err());
        assert!(LossRate::new(-0.01).is_err());
        assert!(LossRate::new(0.1201).is_err());
        assert!(LossRate::new(0.12).is_ok());
    }

    #[test]
    fn general_with_timeout_matches_simplified() {
        let general = reno_throughput_general(0.01, &table1(), RenoBranch::WithTimeout).unwrap();
        let simple = reno_throughput_timeout(loss(0.01), &table1());
        assert!((general.value() - simple.value()).abs() / simple.value() < 1e-12);
    }

    #[test]
    fn general_without_timeout() {
        let t = reno_throughput_general(0.01, &table1(), RenoBranch::WithoutTimeout).unwrap();
        let expected = 1500.0 / (0.128 * (2.0 * 2.0 * 0.01 / 3.0f64).sqrt());
        assert!((t.value() - expected).abs() < 1e-9);
        assert!((t.value() - 101_487.352).abs() < 0.01);
    }

    #[test]
    fn general_clamps_retransmit_factor() {
        let t = reno_throughput_general(0.5, &table1(), RenoBranch::WithTimeout).unwrap();
        let b = 2.0;
        let expected = 1500.0
            / (0.128 * (2.0 * b * 0.5 / 3.0f64).sqrt() + 0.128 * 1.0 * 0.5 * (1.0 + 32.0 * 0.25));
        assert!(t.value().is_finite() && t.value() > 0.0);
        assert!((t.value() - expected).abs() < 1e-9);
        assert!(reno_throughput_general(1.0, &table1(), RenoBranch::WithTimeout).is_err());
        assert!(reno_throughput_general(0.0, &table1(), RenoBranch::WithoutTimeout).is_err());
    }

    #[test]
    fn effective_bottleneck_limited() {
        let caps = LinkConstraints::default();
        assert_eq!(caps.window_rate(&table1()), 234_375.0);
        let t = effective_throughput(loss(0.001), &table1(), &caps).unwrap();
        assert_eq!(t.value(), 125_000.0);
    }

    #[test]
    fn effective_reno_limited() {
        let t = effective_throughput(loss(0.035), &table1(), &LinkConstraints::default()).unwrap();
        assert!((t.value() - 50_143.66).abs() < 0.01);
    }

    #[test]
    fn zero_bottleneck_rejected() {
        let caps = LinkConstraints {
            bottleneck_bandwidth: 0.0,
            advertised_window: 20.0,
        };
        assert!(effective_throughput(loss(0.01), &table1(), &caps).is_err());
        assert!(LinkConstraints::new(0.0, 20.0).is_err());
    }

    #[test]
    fn invert_100_kbps() {
        let p = invert_throughput(Throughput::new(100_000.0).unwrap(), &table1()).unwrap();
        assert!((p.value() - 0.009_856_287_289_512_836).abs() < 1e-12);
    }

    #[test]
    fn invert_round_trip_at_5pct() {
        let t = reno_throughput_timeout(loss(0.05), &table1());
        let p = invert_throughput(t, &table1()).unwrap();
        assert!((p.value() - 0.05).abs() < 1e-9);
    }

    #[test]
    fn invert_range_edges() {
        // 10 MB/s sits just below the throughput at the loss floor (~10.15 MB/s)
        let p = invert_throughput(Throughput::new(10e6).unwrap(), &table1()).unwrap();
        assert!(p.value() > LOSS_FLOOR && p.value() < 1.1e-6);
        let err = invert_throughput(Throughput::new(20e6).unwrap(), &table1());
        assert!(matches!(err, Err(Error::OutOfRange { .. })));
        let err = invert_throughput(Throughput::new(20_000.0).unwrap(), &table1());
        assert!(matches!(err, Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn invalid_params() {
        assert!(TcpParams::new(0.0, 0.1, 2, 1500.0).is_err());
        assert!(TcpParams::new(0.1, -1.0, 2, 1500.0).is_err());
        assert!(TcpParams::new(0.1, 0.1, 0, 1500.0).is_err());
        assert!(TcpParams::new(0.1, 0.1, 2, 0.0).is_err());
        assert!(Throughput::new(-1.0).is_err());
    }
}
