//! Pause and play duration distributions, with a Monte Carlo comparison.

use pause_intensity::loss::{throughput_curve, GammaParams, DEFAULT_GRID_POINTS};
use pause_intensity::pause_stats::{
    first_passage_monte_carlo, pause_duration_distribution, play_duration_distribution,
    BufferThresholds, SegmentConfig,
};
use pause_intensity::tcp::TcpParams;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> pause_intensity::Result<()> {
    let th = throughput_curve(
        &GammaParams::default(),
        &TcpParams::default(),
        DEFAULT_GRID_POINTS,
    )?;
    let buf = BufferThresholds::default();
    let seg = SegmentConfig::default();
    let lambda = 100_000.0;
    let pause = pause_duration_distribution(&th, &buf, &seg)?;
    let play = play_duration_distribution(&th, &buf, &seg, lambda)?;

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let q0 = buf.fluctuation_area();
    let mc_pause = first_passage_monte_carlo(&th, q0, &seg, 0.0, 50_000, &mut rng)?;
    let mc_play = first_passage_monte_carlo(&th, q0, &seg, lambda, 50_000, &mut rng)?;

    println!(
        "pause: mode {:.1} s, mean {:.3} s (MC {:.3} s), TV {:.3}",
        pause.mode(),
        pause.mean(),
        mc_pause.mean(),
        pause.total_variation(&mc_pause)
    );
    println!(
        "play:  mode {:.1} s, mean {:.3} s (MC {:.3} s), TV {:.3}",
        play.mode(),
        play.mean(),
        mc_play.mean(),
        play.total_variation(&mc_play)
    );
    Ok(())
}
