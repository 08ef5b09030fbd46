use pause_intensity::corr::{pearson, spearman};
use pause_intensity::loss::{
    distribution_moments, sample_loss_rate, sample_throughputs, throughput_curve, GammaParams,
    DEFAULT_GRID_POINTS,
};
use pause_intensity::model::{
    pause_intensity, pause_play_metrics, period_sensitivity, PlayoutRate,
};
use pause_intensity::pause_stats::{
    pause_duration_distribution, play_duration_distribution, BufferThresholds, SegmentConfig,
};
use pause_intensity::sim::synthesize_trace;
use pause_intensity::tcp::{
    effective_throughput, invert_throughput, reno_throughput_timeout, LinkConstraints, LossRate,
    TcpParams, Throughput,
};
use pause_intensity::trace::{compute_metrics, EventKind, SessionTrace, TraceEvent};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF, Gamma};

fn reno(p: f64) -> f64 {
    reno_throughput_timeout(LossRate::new(p).unwrap(), &TcpParams::default()).value()
}

proptest! {
    #[test]
    fn reno_decreases_in_loss(a in 1e-6f64..0.12, b in 1e-6f64..0.12) {
        prop_assume!(a != b);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(reno(lo) > reno(hi));
    }

    #[test]
    fn inversion_round_trip(p in 1e-5f64..0.12) {
        let params = TcpParams::default();
        let back = invert_throughput(Throughput::new(reno(p)).unwrap(), &params).unwrap().value();
        prop_assert!((back - p).abs() <= 1e-9 * p.max(1e-3));
    }

    #[test]
    fn effective_is_bounded_by_each_limit(p in 1e-6f64..0.12, bw in 1e3f64..1e7, wm in 1.0f64..100.0) {
        let params = TcpParams::default();
        let caps = LinkConstraints::new(bw, wm).unwrap();
        let eta = effective_throughput(LossRate::new(p).unwrap(), &params, &caps).unwrap().value();
        prop_assert!(eta <= reno(p));
        prop_assert!(eta <= bw);
        prop_assert!(eta <= caps.window_rate(&params));
    }

    #[test]
    fn closed_form_identities(lambda in 1e3f64..1e7, frac in 1e-3f64..0.999, q0 in 1.0f64..1e7) {
        let eta = lambda * frac;
        let m = pause_play_metrics(Throughput::new(eta).unwrap(), PlayoutRate::new(lambda).unwrap(), q0).unwrap();
        let (v, vp) = (m.avg_pause_duration.unwrap(), m.avg_play_duration.unwrap());
        let pi = 1.0 - frac;
        prop_assert!((v * m.pause_frequency - pi).abs() <= 1e-12 * pi.max(1e-3) + 1e-15);
        prop_assert!((v + vp - m.period).abs() <= 1e-12 * m.period);
        prop_assert!((m.pause_frequency * m.period - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn beta_matches_finite_differences(lambda in 1e4f64..1e6, frac in 0.05f64..0.95, q0 in 1e3f64..1e6) {
        prop_assume!((frac - 0.5).abs() > 0.02);
        let eta = lambda * frac;
        let w = |e: f64| q0 * lambda / (e * (lambda - e));
        let h = eta * 1e-5;
        let fd = (w(eta + h) - w(eta - h)) / (2.0 * h);
        let beta = period_sensitivity(Throughput::new(eta).unwrap(), PlayoutRate::new(lambda).unwrap(), q0).unwrap();
        prop_assert!((beta - fd).abs() <= 1e-6 * beta.abs());
    }

    #[test]
    fn pi_grows_with_loss(a in 1e-6f64..0.12, b in 1e-6f64..0.12) {
        let params = TcpParams::default();
        let caps = LinkConstraints::default();
        let lambda = PlayoutRate::default();
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let pi = |p: f64| pause_intensity(effective_throughput(LossRate::new(p).unwrap(), &params, &caps).unwrap(), lambda);
        prop_assert!(pi(hi) >= pi(lo));
    }

    #[test]
    fn pearson_symmetric_and_affine(
        xy in prop::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 3..40),
        a in 0.1f64..10.0,
        c in -100.0f64..100.0,
    ) {
        let (x, y): (Vec<f64>, Vec<f64>) = xy.into_iter().unzip();
        let Ok(r) = pearson(&x, &y) else { return Ok(()); };
        prop_assert_eq!(r, pearson(&y, &x).unwrap());
        let scaled: Vec<f64> = x.iter().map(|v| a * v + c).collect();
        prop_assert!((pearson(&scaled, &y).unwrap() - r).abs() <= 1e-12);
        let flipped: Vec<f64> = x.iter().map(|v| -a * v).collect();
        prop_assert!((pearson(&flipped, &y).unwrap() + r).abs() <= 1e-12);
    }

    #[test]
    fn spearman_ignores_monotone_transforms(xy in prop::collection::vec((0.01f64..50.0, -1e3f64..1e3), 3..40)) {
        let (x, y): (Vec<f64>, Vec<f64>) = xy.into_iter().unzip();
        let Ok(r) = spearman(&x, &y) else { return Ok(()); };
        let t: Vec<f64> = x.iter().map(|v| v.ln() * 3.0 + v.powi(3)).collect();
        prop_assert!((spearman(&t, &y).unwrap() - r).abs() <= 1e-12);
    }

    #[test]
    fn trace_csv_round_trip(gaps in prop::collection::vec(0.001f64..100.0, 1..60), tail in 0.0f64..50.0) {
        let mut t = 0.0;
        let mut events = Vec::new();
        for (i, g) in gaps.iter().enumerate() {
            let kind = if i % 2 == 0 { EventKind::PlayStart } else { EventKind::PauseStart };
            events.push(TraceEvent { time: (t * 1e6f64).round() / 1e6, kind });
            t += g;
        }
        let end = ((events.last().unwrap().time + tail) * 1e6f64).round() / 1e6;
        let trace = SessionTrace::new(events, Some(end)).unwrap();
        let csv = trace.to_csv();
        let back = SessionTrace::from_csv(&csv).unwrap();
        prop_assert_eq!(back.to_csv(), csv);
    }

    #[test]
    fn whole_cycle_windows_agree(f in 0.01f64..0.5, share in 0.05f64..0.95, k in 1usize..5) {
        let d = share / f;
        let trace = synthesize_trace(f, d, 40.0 / f).unwrap();
        let default = compute_metrics(&trace, None).unwrap();
        let period = 1.0 / f;
        let start = default.window.0;
        let wider = compute_metrics(&trace, Some((start, start + k as f64 * period))).unwrap();
        prop_assert!((wider.pause_intensity - default.pause_intensity).abs() <= 1e-9);
        prop_assert!((wider.pause_frequency - default.pause_frequency).abs() <= 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn duration_pmfs_are_unimodal(shape in 2.0f64..4.0, scale in 0.4f64..0.9, qmax in 1e5f64..4e5) {
        let g = GammaParams::new(shape, scale, 100.0).unwrap();
        let th = throughput_curve(&g, &TcpParams::default(), 1024).unwrap();
        let buf = BufferThresholds::new(1500.0, qmax).unwrap();
        let seg = SegmentConfig::default();
        prop_assert!(pause_duration_distribution(&th, &buf, &seg).unwrap().is_unimodal());
        let mean = distribution_moments(&th).mean;
        if mean < 95_000.0 {
            prop_assert!(play_duration_distribution(&th, &buf, &seg, 100_000.0).unwrap().is_unimodal());
        }
    }
}

#[test]
fn loss_samples_fit_truncated_gamma() {
    let g = GammaParams::default();
    let dist = Gamma::new(g.shape, 1.0 / g.scale).unwrap();
    let cdf = |p: f64| dist.cdf(p * g.rescale_divisor);
    let mass = cdf(0.12);
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let n = 20_000;
    let bins = 50;
    let mut counts = vec![0.0; bins];
    for _ in 0..n {
        let p = sample_loss_rate(&g, &mut rng).unwrap().value();
        counts[((p / 0.12 * bins as f64) as usize).min(bins - 1)] += 1.0;
    }
    let expected: Vec<f64> = (0..bins)
        .map(|i| {
            let (a, b) = (
                0.12 * i as f64 / bins as f64,
                0.12 * (i + 1) as f64 / bins as f64,
            );
            n as f64 * (cdf(b) - cdf(a)) / mass
        })
        .collect();
    // merge adjacent bins until each expects at least 5
    let (mut obs, mut exp) = (Vec::new(), Vec::new());
    let (mut o, mut e) = (0.0, 0.0);
    for (c, x) in counts.iter().zip(&expected) {
        o += c;
        e += x;
        if e >= 5.0 {
            obs.push(o);
            exp.push(e);
            o = 0.0;
            e = 0.0;
        }
    }
    if e > 0.0 {
        *obs.last_mut().unwrap() += o;
        *exp.last_mut().unwrap() += e;
    }
    let stat: f64 = obs
        .iter()
        .zip(&exp)
        .map(|(o, e)| (o - e) * (o - e) / e)
        .sum();
    let critical = ChiSquared::new((obs.len() - 1) as f64)
        .unwrap()
        .inverse_cdf(0.99);
    assert!(
        stat < critical,
        "chi-square {stat:.2} over {} bins, critical {critical:.2}",
        obs.len()
    );
}

#[test]
fn throughput_moments_match_monte_carlo() {
    let g = GammaParams::default();
    let params = TcpParams::default();
    let curve = throughput_curve(&g, &params, DEFAULT_GRID_POINTS).unwrap();
    let m = distribution_moments(&curve);
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let xs = sample_throughputs(&g, &params, 200_000, &mut rng).unwrap();
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let std = (xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)).sqrt();
    assert!(
        (m.mean - mean).abs() / mean < 0.02,
        "mean {} vs {mean}",
        m.mean
    );
    assert!((m.std - std).abs() / std < 0.02, "std {} vs {std}", m.std);
}
