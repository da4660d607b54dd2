//! Threshold-gated CSI feedback: sweep the reduction curve, then rebuild
//! the stream from the reports at one level and compare micro-Doppler
//! quality against full feedback.
//!
//! ```bash
//! cargo run --example threshold_feedback
//! ```

use bisense::config::ScenarioConfig;
use bisense::pipeline::simulate_siso_stream;
use bisense::sensing::{build_matrix, clutter_removal, stft_micro_doppler};
use bisense::threshold::{apply_policy, reconstruct, reduction_sweep, write_sweep_csv};

fn main() -> bisense::Result<()> {
    let cfg = ScenarioConfig::paper_siso();
    let stream = simulate_siso_stream(&cfg)?;

    let levels: Vec<f64> = (0..=20).map(|i| i as f64 * 0.01).collect();
    let sweep = reduction_sweep(&stream, &levels)?;
    println!("threshold  reduction");
    for (th, red) in sweep.iter().step_by(5) {
        println!("{th:>9.2}  {:>8.1}%", red * 100.0);
    }

    let out = std::path::Path::new("examples_out/threshold_feedback");
    std::fs::create_dir_all(out)?;
    let mut buf = Vec::new();
    write_sweep_csv(&sweep, &mut buf)?;
    std::fs::write(out.join("reduction_vs_threshold.csv"), buf)?;

    // Reconstruct at 0.05 and compare spectrogram energy to full feedback.
    let schedule = cfg.schedule();
    let w = cfg.window_spec();
    let full = stft_micro_doppler(
        &clutter_removal(&build_matrix(&stream)?)?,
        &w,
    )?;
    for level in [0.05, 0.1] {
        let log = apply_policy(&stream, level)?;
        let rebuilt = reconstruct(&log, &schedule)?;
        let sg = stft_micro_doppler(&clutter_removal(&build_matrix(&rebuilt)?)?, &w)?;
        let err: f64 = sg
            .magnitudes
            .iter()
            .zip(full.magnitudes.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let norm: f64 = full.magnitudes.iter().map(|v| v * v).sum::<f64>().sqrt();
        println!(
            "threshold {level}: {} of {} packets reported ({:.1}% reduction), spectrogram distortion {:.1}%",
            log.reported.len(),
            log.n_total,
            log.reduction() * 100.0,
            err / norm * 100.0,
        );
        std::fs::write(
            out.join(format!("feedback_{level}.json")),
            serde_json::to_string_pretty(&log.to_json())?,
        )?;
    }
    println!("wrote {}", out.display());
    Ok(())
}
