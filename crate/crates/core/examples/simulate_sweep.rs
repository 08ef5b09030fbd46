//! Simulated sessions against the closed-form model.

use pause_intensity::sim::{sweep_loss, SimConfig, SimMode};

fn main() -> pause_intensity::Result<()> {
    let grid = [0.015, 0.025, 0.035, 0.05, 0.08, 0.12];
    for mode in [SimMode::Deterministic, SimMode::Stochastic] {
        let cfg = SimConfig {
            mode,
            session_length: 5_000.0,
            seed: 3,
            ..SimConfig::default()
        };
        println!("{mode:?}");
        for row in sweep_loss(&cfg, &grid, 5)? {
            println!(
                "  loss {:.3}: PI model {:.3} sim {:.3} ± {:.3}; freq model {:.4} sim {:.4}",
                row.loss,
                row.model.pause_intensity,
                row.sim.pause_intensity.mean,
                row.sim.pause_intensity.std,
                row.model.pause_frequency,
                row.sim.pause_frequency.mean
            );
        }
    }
    Ok(())
}
