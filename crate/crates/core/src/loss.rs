//! Loss-probability distribution and its image under the throughput map.
//!
//! Loss is modelled as a Gamma variate divided by `rescale_divisor` and
//! truncated to `(0, MAX_LOSS]`. Densities are carried as sampled curves;
//! the throughput density is obtained pointwise by change of variables.

use std::io::{self, Write};

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::tcp::{reno_rate, TcpParams, LOSS_FLOOR, MAX_LOSS};

/// Default number of grid points for sampled densities.
pub const DEFAULT_GRID_POINTS: usize = 2048;

const SAMPLE_ITERATION_CAP: u64 = 1_000_000;

/// Raw Gamma(shape, scale) variate mapped to a loss probability by division.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaParams {
    pub shape: f64,
    pub scale: f64,
    pub rescale_divisor: f64,
}

impl Default for GammaParams {
    /// Gamma(2.8, 0.7) read as a percentage: mean loss 1.96%.
    fn default() -> Self {
        GammaParams {
            shape: 2.8,
            scale: 0.7,
            rescale_divisor: 100.0,
        }
    }
}

impl GammaParams {
    pub fn new(shape: f64, scale: f64, rescale_divisor: f64) -> Result<Self> {
        let g = GammaParams {
            shape,
            scale,
            rescale_divisor,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.shape > 0.0 && self.shape.is_finite()) {
            return Err(Error::domain("gamma shape", self.shape, "must be positive"));
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(Error::domain("gamma scale", self.scale, "must be positive"));
        }
        if !(self.rescale_divisor > 0.0 && self.rescale_divisor.is_finite()) {
            return Err(Error::domain(
                "rescale divisor",
                self.rescale_divisor,
                "must be positive",
            ));
        }
        Ok(())
    }

    /// Mean loss of the untruncated rescaled variate.
    pub fn mean_loss(&self) -> f64 {
        self.shape * self.scale / self.rescale_divisor
    }

    /// Same shape and divisor, scale chosen so the mean loss is `loss`.
    pub fn mean_matched(&self, loss: f64) -> Result<Self> {
        GammaParams::new(
            self.shape,
            loss * self.rescale_divisor / self.shape,
            self.rescale_divisor,
        )
    }
}

/// Gamma pdf `x^(k-1)·e^(-x/θ) / (Γ(k)·θ^k)` of the raw variate.
pub fn gamma_density(x: f64, g: &GammaParams) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::domain("x", x, "gamma density is defined for x >= 0"));
    }
    Ok(gamma_pdf(x, g.shape, g.scale))
}

fn gamma_pdf(x: f64, shape: f64, scale: f64) -> f64 {
    if x == 0.0 {
        return match shape.partial_cmp(&1.0) {
            Some(std::cmp::Ordering::Greater) => 0.0,
            Some(std::cmp::Ordering::Equal) => 1.0 / scale,
            _ => f64::INFINITY,
        };
    }
    let log = (shape - 1.0) * x.ln() - x / scale - ln_gamma(shape) - shape * scale.ln();
    log.exp()
}

/// Density of the rescaled (untruncated) loss variate at `p`.
pub fn loss_density(p: f64, g: &GammaParams) -> f64 {
    if p < 0.0 {
        return 0.0;
    }
    g.rescale_divisor * gamma_pdf(p * g.rescale_divisor, g.shape, g.scale)
}

/// Draw a loss rate from the truncated, rescaled Gamma by rejection.
pub fn sample_loss_rate<R: Rng + ?Sized>(
    g: &GammaParams,
    rng: &mut R,
) -> Result<crate::tcp::LossRate> {
    g.validate()?;
    let dist = Gamma::new(g.shape, g.scale).map_err(|e| Error::Config(e.to_string()))?;
    for _ in 0..SAMPLE_ITERATION_CAP {
        let p = dist.sample(rng) / g.rescale_divisor;
        if p > 0.0 && p <= MAX_LOSS {
            return crate::tcp::LossRate::new(p);
        }
    }
    Err(Error::IterationCap(SAMPLE_ITERATION_CAP))
}

/// A probability density sampled on an ascending grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityCurve {
    grid: Vec<f64>,
    density: Vec<f64>,
}

/// Mean and standard deviation of a [`DensityCurve`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Moments {
    pub mean: f64,
    pub std: f64,
    /// The computed variance came out negative and was clamped to zero.
    pub variance_clamped: bool,
}

impl DensityCurve {
    /// Wrap an already-normalized density.
    pub fn new(grid: Vec<f64>, density: Vec<f64>) -> Result<Self> {
        check_shape(&grid, &density)?;
        let curve = DensityCurve { grid, density };
        let total = curve.integral();
        if !(0.99..=1.01).contains(&total) {
            return Err(Error::Config(format!(
                "density integrates to {total}, expected 1"
            )));
        }
        Ok(curve)
    }

    /// Scale `density` to unit integral over `grid`.
    pub fn normalized(grid: Vec<f64>, mut density: Vec<f64>) -> Result<Self> {
        check_shape(&grid, &density)?;
        let total = trapezoid(&grid, &density);
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::Config(format!(
                "density has non-positive total mass {total}"
            )));
        }
        density.iter_mut().for_each(|d| *d /= total);
        Ok(DensityCurve { grid, density })
    }

    /// Sample `f` on `n` evenly spaced points of `[lo, hi]` and normalize.
    pub fn from_fn(lo: f64, hi: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let grid = linspace(lo, hi, n);
        let density = grid.iter().map(|&x| f(x)).collect();
        DensityCurve::normalized(grid, density)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn integral(&self) -> f64 {
        trapezoid(&self.grid, &self.density)
    }

    /// Linear interpolation, zero outside the grid.
    pub fn eval(&self, x: f64) -> f64 {
        let g = &self.grid;
        if x < g[0] || x > g[g.len() - 1] {
            return 0.0;
        }
        let i = segment_index(g, x);
        let t = (x - g[i]) / (g[i + 1] - g[i]);
        self.density[i] + t * (self.density[i + 1] - self.density[i])
    }

    pub fn moments(&self) -> Moments {
        distribution_moments(self)
    }

    /// Grid point with the largest density.
    pub fn mode(&self) -> f64 {
        let (i, _) = self
            .density
            .iter()
            .enumerate()
            .fold(
                (0, f64::MIN),
                |best, (i, &d)| if d > best.1 { (i, d) } else { best },
            );
        self.grid[i]
    }

    pub fn sampler(&self) -> CurveSampler {
        CurveSampler::new(self)
    }

    /// Two-column CSV `x,density` with header.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "x,density")?;
        for (x, d) in self.grid.iter().zip(&self.density) {
            writeln!(out, "{x},{d}")?;
        }
        Ok(())
    }
}

fn check_shape(grid: &[f64], density: &[f64]) -> Result<()> {
    if grid.len() < 2 || grid.len() != density.len() {
        return Err(Error::Config(format!(
            "density curve needs matching grid and density of length >= 2 (got {} and {})",
            grid.len(),
            density.len()
        )));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Config(
            "density grid must be strictly ascending".into(),
        ));
    }
    if density.iter().any(|d| !(*d >= 0.0) || !d.is_finite()) {
        return Err(Error::Config(
            "density values must be finite and non-negative".into(),
        ));
    }
    Ok(())
}

pub(crate) fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi - lo) / (n - 1) as f64;
    (0..n)
        .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
        .collect()
}

fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xs, ys)| 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1]))
        .sum()
}

/// Index `i` with `g[i] <= x <= g[i+1]`, for `x` inside the grid.
fn segment_index(g: &[f64], x: f64) -> usize {
    let i = g.partition_point(|&v| v <= x);
    i.clamp(1, g.len() - 1) - 1
}

/// Inverse-CDF sampling from a piecewise-linear density.
#[derive(Debug, Clone)]
pub struct CurveSampler {
    grid: Vec<f64>,
    density: Vec<f64>,
    cdf: Vec<f64>,
}

impl CurveSampler {
    fn new(curve: &DensityCurve) -> Self {
        let mut cdf = Vec::with_capacity(curve.len());
        let mut acc = 0.0;
        cdf.push(0.0);
        for (xs, ys) in curve.grid.windows(2).zip(curve.density.windows(2)) {
            acc += 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1]);
            cdf.push(acc);
        }
        let total = acc;
        cdf.iter_mut().for_each(|c| *c /= total);
        let density = curve.density.iter().map(|d| d / total).collect();
        CurveSampler {
            grid: curve.grid.clone(),
            density,
            cdf,
        }
    }

    /// Cumulative probability at `x`.
    pub fn cdf(&self, x: f64) -> f64 {
        let g = &self.grid;
        if x <= g[0] {
            return 0.0;
        }
        if x >= g[g.len() - 1] {
            return 1.0;
        }
        let i = segment_index(g, x);
        let h = g[i + 1] - g[i];
        let t = x - g[i];
        let (f0, f1) = (self.density[i], self.density[i + 1]);
        self.cdf[i] + f0 * t + (f1 - f0) * t * t / (2.0 * h)
    }

    /// Quantile at probability `u` in `[0, 1]`.
    pub fn quantile(&self, u: f64) -> f64 {
        let n = self.grid.len();
        let i = self.cdf.partition_point(|&c| c <= u).clamp(1, n - 1) - 1;
        let need = u - self.cdf[i];
        if need <= 0.0 {
            return self.grid[i];
        }
        let h = self.grid[i + 1] - self.grid[i];
        let (f0, f1) = (self.density[i], self.density[i + 1]);
        let a = (f1 - f0) / (2.0 * h);
        let t = if a.abs() < 1e-300 || (a * need).abs() < 1e-12 * f0 * f0 {
            if f0 > 0.0 {
                need / f0
            } else {
                0.0
            }
        } else {
            // a·t² + f0·t − need = 0, root in [0, h]
            let disc = (f0 * f0 + 4.0 * a * need).max(0.0);
            2.0 * need / (f0 + disc.sqrt())
        };
        self.grid[i] + t.clamp(0.0, h)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile(rng.random::<f64>())
    }
}

/// Density of `y = forward(x)` for `x ~ fx`, on `out_grid`.
///
/// `forward` must be strictly monotone over the span of `fx`'s grid. Each
/// `y` is pulled back by bisection and divided by `|forward'(x)|` (central
/// difference, relative step 1e-7). The result is renormalized.
pub fn transform_density(
    fx: &DensityCurve,
    forward: impl Fn(f64) -> f64,
    out_grid: &[f64],
) -> Result<DensityCurve> {
    let xs = fx.grid();
    let ys: Vec<f64> = xs.iter().map(|&x| forward(x)).collect();
    let increasing = ys[1] > ys[0];
    for (w, x) in ys.windows(2).zip(xs) {
        let step = w[1] - w[0];
        let ok = if increasing { step > 0.0 } else { step < 0.0 };
        if !ok || !w[1].is_finite() {
            return Err(Error::NonMonotone { at: *x });
        }
    }
    let (lo, hi) = if increasing {
        (ys[0], ys[ys.len() - 1])
    } else {
        (ys[ys.len() - 1], ys[0])
    };

    let mut density = Vec::with_capacity(out_grid.len());
    for &y in out_grid {
        if !(y >= lo && y <= hi) {
            return Err(Error::OutOfRange {
                target: y,
                low: lo,
                high: hi,
            });
        }
        let x = pull_back(xs, &ys, increasing, &forward, y);
        let h = 1e-7 * x.abs().max(f64::MIN_POSITIVE.sqrt());
        let slope = (forward(x + h) - forward(x - h)) / (2.0 * h);
        density.push(fx.eval(x) / slope.abs());
    }
    DensityCurve::normalized(out_grid.to_vec(), density)
}

fn pull_back(
    xs: &[f64],
    ys: &[f64],
    increasing: bool,
    forward: &impl Fn(f64) -> f64,
    y: f64,
) -> f64 {
    // bracket from the sampled values, then bisect
    let above = |v: f64| if increasing { v > y } else { v < y };
    let k = ys.partition_point(|&v| !above(v)).clamp(1, ys.len() - 1);
    let (mut lo, mut hi) = (xs[k - 1], xs[k]);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if above(forward(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Trapezoidal mean and standard deviation.
pub fn distribution_moments(f: &DensityCurve) -> Moments {
    let total = f.integral();
    let xs = f.grid();
    let first: Vec<f64> = xs.iter().zip(f.density()).map(|(x, d)| x * d).collect();
    let mean = trapezoid(xs, &first) / total;
    let second: Vec<f64> = xs
        .iter()
        .zip(f.density())
        .map(|(x, d)| (x - mean) * (x - mean) * d)
        .collect();
    let var = trapezoid(xs, &second) / total;
    let variance_clamped = var < 0.0;
    Moments {
        mean,
        std: var.max(0.0).sqrt(),
        variance_clamped,
    }
}

/// Truncated loss density on `[LOSS_FLOOR, MAX_LOSS]`.
pub fn loss_curve(g: &GammaParams, points: usize) -> Result<DensityCurve> {
    g.validate()?;
    DensityCurve::from_fn(LOSS_FLOOR, MAX_LOSS, points, |p| loss_density(p, g))
}

/// Probability left above the top of the throughput grid built by
/// [`throughput_curve`].
pub const THROUGHPUT_TAIL_MASS: f64 = 1e-7;

/// Throughput density implied by the loss distribution through the uncapped
/// Reno curve.
///
/// The output grid is evenly spaced from the throughput at `MAX_LOSS` up to
/// the throughput at the loss quantile [`THROUGHPUT_TAIL_MASS`].
pub fn throughput_curve(
    g: &GammaParams,
    params: &TcpParams,
    points: usize,
) -> Result<DensityCurve> {
    params.validate()?;
    let loss = loss_curve(g, points)?;
    let p_top = loss
        .sampler()
        .quantile(THROUGHPUT_TAIL_MASS)
        .max(LOSS_FLOOR);
    let out = linspace(
        reno_rate(MAX_LOSS, params),
        reno_rate(p_top, params),
        points,
    );
    transform_density(&loss, |p| reno_rate(p, params), &out)
}

/// Throughput values from `n` independent loss draws mapped through the
/// uncapped Reno curve.
pub fn sample_throughputs<R: Rng + ?Sized>(
    g: &GammaParams,
    params: &TcpParams,
    n: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    params.validate()?;
    (0..n)
        .map(|_| Ok(reno_rate(sample_loss_rate(g, rng)?.value(), params)))
        .collect()
}

/// Kolmogorov–Smirnov distance between `samples` and the curve's CDF.
pub fn ks_statistic(curve: &DensityCurve, samples: &[f64]) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let cdf = curve.sampler();
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf.cdf(x);
            ((i + 1) as f64 / n - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    #[test]
    fn gamma_density_edges() {
        let g = GammaParams::default();
        assert_eq!(gamma_density(0.0, &g).unwrap(), 0.0);
        let exp = GammaParams::new(1.0, 1.0, 1.0).unwrap();
        assert_eq!(gamma_density(0.0, &exp).unwrap(), 1.0);
        assert!(gamma_density(-1e-9, &g).is_err());
    }

    #[test]
    fn gamma_density_reference() {
        // Γ(2.8) = 1.67649...; pdf(1.96) from an independent evaluation
        assert!((ln_gamma(2.8).exp() - 1.676_490_787_764_436_6).abs() < 1e-12);
        let v = gamma_density(1.96, &GammaParams::default()).unwrap();
        assert!((v - 0.330_644_037_686_504_13).abs() < 1e-12);
    }

    #[test]
    fn gamma_curve_moments() {
        let g = GammaParams::default();
        let curve =
            DensityCurve::from_fn(0.0, 40.0, 8192, |x| gamma_pdf(x, g.shape, g.scale)).unwrap();
        let m = curve.moments();
        assert!((m.mean - 1.96).abs() < 1e-3, "{m:?}");
        assert!((m.std - 1.372f64.sqrt()).abs() < 1e-3, "{m:?}");
    }

    #[test]
    fn narrow_curve_moments() {
        let curve = DensityCurve::from_fn(49.0, 51.0, 2001, |x| {
            (1.0 - (x - 50.0).abs() / 1e-2).max(0.0)
        })
        .unwrap();
        let m = curve.moments();
        assert!((m.mean - 50.0).abs() < 1e-9);
        assert!(m.std < 1e-2);
        assert!(!m.variance_clamped);
    }

    #[test]
    fn sampling_is_deterministic_and_bounded() {
        let g = GammaParams::default();
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..1000)
                .map(|_| sample_loss_rate(&g, &mut rng).unwrap().value())
                .collect::<Vec<_>>()
        };
        let a = draw(7);
        assert_eq!(a, draw(7));
        assert!(a.iter().all(|&p| p > 0.0 && p <= MAX_LOSS));
    }

    #[test]
    fn sample_mean_near_two_percent() {
        let g = GammaParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 100_000;
        let mean = (0..n)
            .map(|_| sample_loss_rate(&g, &mut rng).unwrap().value())
            .sum::<f64>()
            / n as f64;
        assert!((mean - 0.0196).abs() < 0.001, "{mean}");
    }

    #[test]
    fn rejection_cap_reports_error() {
        // essentially all mass far above 0.12
        let g = GammaParams::new(50.0, 10.0, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(matches!(
            sample_loss_rate(&g, &mut rng),
            Err(Error::IterationCap(_))
        ));
    }

    #[test]
    fn identity_transform() {
        let g = GammaParams::default();
        let fx =
            DensityCurve::from_fn(0.0, 20.0, 2048, |x| gamma_pdf(x, g.shape, g.scale)).unwrap();
        let fy = transform_density(&fx, |x| x, fx.grid()).unwrap();
        for (a, b) in fx.density().iter().zip(fy.density()) {
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn doubling_transform() {
        let g = GammaParams::default();
        let fx =
            DensityCurve::from_fn(0.0, 20.0, 2048, |x| gamma_pdf(x, g.shape, g.scale)).unwrap();
        let out = linspace(0.0, 40.0, 2048);
        let fy = transform_density(&fx, |x| 2.0 * x, &out).unwrap();
        assert!((fy.integral() - 1.0).abs() < 1e-12);
        for (&y, &d) in out.iter().zip(fy.density()).step_by(37) {
            let expected = gamma_pdf(y / 2.0, g.shape, g.scale) / 2.0;
            assert!((d - expected).abs() < 1e-4, "y={y} {d} vs {expected}");
        }
    }

    #[test]
    fn non_monotone_map_rejected() {
        let fx = DensityCurve::from_fn(-1.0, 1.0, 101, |x| 1.0 - x.abs()).unwrap();
        let out = linspace(0.0, 1.0, 11);
        assert!(matches!(
            transform_density(&fx, |x| x * x, &out),
            Err(Error::NonMonotone { .. })
        ));
    }

    #[test]
    fn image_bound_checked() {
        let fx = DensityCurve::from_fn(0.0, 1.0, 101, |_| 1.0).unwrap();
        let out = linspace(0.0, 3.0, 11);
        assert!(matches!(
            transform_density(&fx, |x| 2.0 * x, &out),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn throughput_density_is_right_skewed() {
        let th = throughput_curve(
            &GammaParams::default(),
            &TcpParams::default(),
            DEFAULT_GRID_POINTS,
        )
        .unwrap();
        assert!((th.integral() - 1.0).abs() < 1e-3);
        let m = th.moments();
        // the thin low-loss tail becomes a long high-throughput tail
        let median = th.sampler().quantile(0.5);
        assert!(
            th.mode() < median && median < m.mean,
            "mode {} median {median} mean {}",
            th.mode(),
            m.mean
        );
    }

    #[test]
    fn sampler_quantile_inverts_cdf() {
        let fx = DensityCurve::from_fn(0.0, 2.0, 51, |x| x * (2.0 - x)).unwrap();
        let s = fx.sampler();
        for u in [0.0, 0.01, 0.3, 0.5, 0.77, 0.999] {
            let x = s.quantile(u);
            assert!((s.cdf(x) - u).abs() < 1e-9, "u={u}");
        }
    }

    #[test]
    fn invalid_curves() {
        assert!(DensityCurve::new(vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
        assert!(DensityCurve::new(vec![0.0, 1.0], vec![-1.0, 3.0]).is_err());
        assert!(DensityCurve::new(vec![0.0, 1.0], vec![3.0, 3.0]).is_err());
        assert!(DensityCurve::new(vec![0.0, 1.0], vec![1.0, 1.0]).is_ok());
    }

    #[test]
    fn csv_header() {
        let fx = DensityCurve::new(vec![0.0, 1.0], vec![1.0, 1.0]).unwrap();
        let mut buf = Vec::new();
        fx.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "x,density\n0,1\n1,1\n");
    }
}
