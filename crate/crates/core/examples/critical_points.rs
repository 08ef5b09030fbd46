//! Pause regimes and model curves over loss.

use pause_intensity::model::{critical_points, model_sweep, PlayoutRate};
use pause_intensity::tcp::{LinkConstraints, TcpParams};

fn main() -> pause_intensity::Result<()> {
    let params = TcpParams::default();
    let caps = LinkConstraints::default();
    let lambda = PlayoutRate::default();
    let cp = critical_points(&params, &caps, lambda)?;
    println!("p0 = {:.5}  p1 = {:.5}", cp.p0, cp.p1);

    let grid: Vec<f64> = (1..=12).map(|i| i as f64 * 0.01).collect();
    let (_, rows) = model_sweep(&params, &caps, lambda, 198_500.0, &grid)?;
    println!(
        "{:>6} {:>9} {:>8} {:>8} {:>6} region",
        "loss", "eta", "pause s", "freq", "PI"
    );
    for r in rows {
        let m = r.metrics;
        println!(
            "{:>6.2} {:>9.0} {:>8.2} {:>8.4} {:>6.3} {}",
            r.loss,
            r.throughput,
            m.avg_pause_duration.unwrap_or(0.0),
            m.pause_frequency,
            m.pause_intensity,
            r.region
        );
    }
    Ok(())
}
