//! Measure pause metrics on synthetic traces: two very different pause
//! patterns with the same intensity.

use pause_intensity::sim::synthesize_trace;
use pause_intensity::trace::compute_metrics;

fn main() -> pause_intensity::Result<()> {
    for (f, d) in [(0.03, 10.0), (0.25, 1.2), (0.11, 3.97)] {
        let trace = synthesize_trace(f, d, 2_000.0)?;
        let m = compute_metrics(&trace, None)?;
        println!(
            "f = {f}, d = {d}: {} pauses, measured f {:.4}, d {:.3}, PI {:.4}",
            m.pause_count,
            m.pause_frequency,
            m.mean_pause_duration.unwrap_or(0.0),
            m.pause_intensity
        );
    }
    let first = synthesize_trace(0.11, 3.97, 60.0)?;
    print!("{}", first.to_csv());
    Ok(())
}
