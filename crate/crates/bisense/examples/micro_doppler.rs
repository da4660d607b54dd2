//! Full SISO pipeline: simulate the walking scenario, remove clutter, and
//! write micro-Doppler spectrograms at 50% and 90% window overlap.
//!
//! ```bash
//! cargo run --example micro_doppler
//! ```

use bisense::config::ScenarioConfig;
use bisense::output::{spectrogram_image, write_heatmap_pgm, write_spectrogram_csv};
use bisense::pipeline::simulate_siso_stream;
use bisense::sensing::{build_matrix, clutter_removal, stft_micro_doppler, WindowSpec};

fn main() -> bisense::Result<()> {
    let cfg = ScenarioConfig::paper_siso();
    println!(
        "simulating {} packets at {} Hz, SNR {} dB ...",
        cfg.schedule.n_packets, cfg.schedule.prf, cfg.noise.snr_db
    );
    let stream = simulate_siso_stream(&cfg)?;
    let matrix = build_matrix(&stream)?;
    let cleaned = clutter_removal(&matrix)?;

    let out = std::path::Path::new("examples_out/micro_doppler");
    std::fs::create_dir_all(out)?;
    for overlap in [0.5, 0.9] {
        let w = WindowSpec {
            overlap,
            ..cfg.window_spec()
        };
        let sg = stft_micro_doppler(&cleaned, &w)?;
        let tag = format!("{}", (overlap * 100.0) as u32);
        let csv = out.join(format!("micro_doppler_{tag}.csv"));
        let mut buf = Vec::new();
        write_spectrogram_csv(&sg, &mut buf)?;
        std::fs::write(&csv, buf)?;
        let pgm = out.join(format!("micro_doppler_{tag}.pgm"));
        write_heatmap_pgm(&pgm, &spectrogram_image(&sg), -60.0)?;
        println!(
            "{}% overlap: {} frames x {} Doppler bins -> {}, {}",
            tag,
            sg.frame_times.len(),
            sg.doppler_axis.len(),
            csv.display(),
            pgm.display()
        );
    }
    Ok(())
}
