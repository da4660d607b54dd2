//! Range-Doppler map of one coherent processing interval, with the peak
//! location translated to bi-static delay and radial velocity.
//!
//! ```bash
//! cargo run --example range_doppler_map
//! ```

use bisense::config::ScenarioConfig;
use bisense::output::{range_doppler_image, write_heatmap_pgm, write_range_doppler_csv};
use bisense::pipeline::simulate_siso_stream;
use bisense::sensing::{build_matrix, clutter_removal, range_doppler, velocity_axis, WindowSpec};

fn main() -> bisense::Result<()> {
    let cfg = ScenarioConfig::paper_siso();
    let stream = simulate_siso_stream(&cfg)?;
    let matrix = build_matrix(&stream)?;
    let cleaned = clutter_removal(&matrix)?;

    let w = WindowSpec {
        len: cfg.processing.cpi,
        overlap: 0.0,
        ..cfg.window_spec()
    };
    let start = (matrix.n_slow() - w.len) / 2;
    let rd = range_doppler(&cleaned, &w, start)?;

    // Peak over the map.
    let mut best = (0usize, 0usize, 0.0f64);
    for r in 0..rd.magnitudes.nrows() {
        for c in 0..rd.magnitudes.ncols() {
            if rd.magnitudes[[r, c]] > best.2 {
                best = (r, c, rd.magnitudes[[r, c]]);
            }
        }
    }
    let lambda = cfg.environment_model().wavelength();
    let velocities = velocity_axis(&rd.doppler_axis, lambda);
    println!(
        "CPI of {} packets starting at packet {start}: peak at delay {:.2} ns, Doppler {:+.1} Hz ({:+.3} m/s mono-static convention)",
        w.len,
        rd.range_axis[best.0] * 1e9,
        rd.doppler_axis[best.1],
        velocities[best.1],
    );

    let out = std::path::Path::new("examples_out/range_doppler");
    std::fs::create_dir_all(out)?;
    let mut buf = Vec::new();
    write_range_doppler_csv(&rd, &mut buf)?;
    std::fs::write(out.join("range_doppler.csv"), buf)?;
    write_heatmap_pgm(&out.join("range_doppler.pgm"), &range_doppler_image(&rd), -60.0)?;
    println!("wrote {}", out.display());
    Ok(())
}
