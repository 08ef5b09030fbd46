//! Loss density and the throughput density it induces.

use pause_intensity::loss::{loss_curve, throughput_curve, GammaParams, DEFAULT_GRID_POINTS};
use pause_intensity::tcp::TcpParams;

fn main() -> pause_intensity::Result<()> {
    let g = GammaParams::default();
    let loss = loss_curve(&g, DEFAULT_GRID_POINTS)?;
    let th = throughput_curve(&g, &TcpParams::default(), DEFAULT_GRID_POINTS)?;
    let lm = loss.moments();
    let tm = th.moments();
    println!(
        "loss:       mean {:.5}  std {:.5}  mode {:.5}",
        lm.mean,
        lm.std,
        loss.mode()
    );
    println!(
        "throughput: mean {:.0}  std {:.0}  mode {:.0} B/s",
        tm.mean,
        tm.std,
        th.mode()
    );
    let sampler = th.sampler();
    for q in [0.05, 0.25, 0.5, 0.75, 0.95] {
        println!(
            "  {:>4.0}% quantile {:>9.0} B/s",
            q * 100.0,
            sampler.quantile(q)
        );
    }
    Ok(())
}
