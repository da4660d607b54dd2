//! Directional TRN sweep and codebook angle estimation: simulate the data
//! cube, estimate per-CPI azimuth/elevation, and score against the walker
//! ground truth.
//!
//! ```bash
//! cargo run --example beam_sweep_angles [2x2|2x8|8x8]
//! ```

use bisense::angles::{accuracy, cpi_midpoints, estimate_angles, ground_truth_angles};
use bisense::config::ScenarioConfig;
use bisense::kinematics::build_walker;
use bisense::pipeline::simulate_cube;

fn main() -> bisense::Result<()> {
    let book = std::env::args().nth(1).unwrap_or_else(|| "2x8".into());
    let mut cfg = ScenarioConfig::paper_directional();
    cfg.directional.codebook = book.clone();

    println!(
        "sweeping codebook {book} over {} packets (TRN-R, SNR {} dB) ...",
        cfg.schedule.n_packets, cfg.noise.snr_db
    );
    let cube = simulate_cube(&cfg)?;
    let codebook = cfg.codebook()?;
    println!(
        "cube: {} directions x {} taps x {} packets",
        cube.n_directions(),
        cube.n_fast(),
        cube.n_slow()
    );

    let estimates = estimate_angles(&cube, &codebook, cfg.processing.cpi, cfg.processing.nfft)?;
    let traj = build_walker(&cfg.body(), &cfg.gait_params())?;
    let times = cpi_midpoints(&cube.slow_axis, cfg.processing.cpi);
    let truths = ground_truth_angles(&traj, cfg.environment.rx, &times)?;

    println!("cpi   est az   est el   true az  true el");
    for (e, t) in estimates.iter().zip(&truths) {
        println!(
            "{:>3}  {:>7.1}  {:>7.1}  {:>8.2}  {:>7.2}",
            e.cpi_index, e.azimuth, e.elevation, t.0, t.1
        );
    }
    let az = accuracy(
        &estimates.iter().map(|e| e.azimuth).collect::<Vec<_>>(),
        &truths.iter().map(|t| t.0).collect::<Vec<_>>(),
        5.0,
    )?;
    let el = accuracy(
        &estimates.iter().map(|e| e.elevation).collect::<Vec<_>>(),
        &truths.iter().map(|t| t.1).collect::<Vec<_>>(),
        5.0,
    )?;
    println!(
        "azimuth MAE {:.2} deg, elevation MAE {:.2} deg over {} CPIs",
        az.mean_abs_error,
        el.mean_abs_error,
        estimates.len()
    );
    Ok(())
}
