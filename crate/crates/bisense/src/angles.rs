//! Codebook-direction angle estimation from directional data cubes.
//!
//! Per coherent processing interval (CPI) each direction slice is clutter
//! removed and Doppler transformed; the direction with the most non-DC
//! Doppler power summed over range wins. Estimates are always codebook
//! members (no interpolation), so the quantization floor is set by the
//! codebook grid. Ground truth uses the torso joint as seen from the
//! trained node, in the shared boresight-+x convention.

use crate::error::{Error, Result};
use crate::geom::{self, Point3};
use crate::kinematics::{joints, JointTrajectory};
use crate::phy::Codebook;
use crate::sensing::{clutter_removal, range_doppler, RadarDataCube, WindowKind, WindowSpec};

/// One per-CPI direction estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleEstimate {
    pub cpi_index: usize,
    /// Azimuth of the chosen codebook direction, degrees.
    pub azimuth: f64,
    /// Elevation of the chosen codebook direction, degrees.
    pub elevation: f64,
    /// Index into the codebook direction list.
    pub direction_index: usize,
    /// Non-DC Doppler power behind the decision (linear).
    pub power: f64,
}

/// Histogram bin of angular errors.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct HistogramBin {
    /// Inclusive lower edge, degrees.
    pub lo: f64,
    /// Exclusive upper edge, degrees.
    pub hi: f64,
    pub count: usize,
}

/// Angular error statistics against ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct AccuracyReport {
    /// Per-estimate wrapped errors (estimate - truth) in (-180, 180].
    pub errors: Vec<f64>,
    pub histogram: Vec<HistogramBin>,
    pub mean_abs_error: f64,
    /// Histogram bin width in degrees.
    pub bin_width: f64,
}

impl AccuracyReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "mean_abs_error_deg": self.mean_abs_error,
            "bin_width_deg": self.bin_width,
            "errors_deg": self.errors,
            "histogram": self.histogram,
        })
    }

    /// CSV rows `bin_lo,bin_hi,count`.
    pub fn write_histogram_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "bin_lo_deg,bin_hi_deg,count")?;
        for b in &self.histogram {
            writeln!(w, "{},{},{}", b.lo, b.hi, b.count)?;
        }
        Ok(())
    }
}

/// Default histogram bin width in degrees.
pub const DEFAULT_BIN_WIDTH: f64 = 5.0;

/// Midpoint times of consecutive non-overlapping CPI blocks.
pub fn cpi_midpoints(slow_axis: &[f64], cpi_len: usize) -> Vec<f64> {
    let n_cpis = slow_axis.len() / cpi_len;
    (0..n_cpis)
        .map(|c| {
            let lo = c * cpi_len;
            let hi = lo + cpi_len - 1;
            0.5 * (slow_axis[lo] + slow_axis[hi])
        })
        .collect()
}

/// Per-CPI codebook argmax on non-DC Doppler power.
///
/// CPIs are non-overlapping blocks of `cpi_len` packets (the tail is
/// truncated). The Doppler transform is a plain (rectangular-window) FFT of
/// length `nfft` per fast-time row after clutter removal of the CPI slice.
pub fn estimate_angles(
    cube: &RadarDataCube,
    codebook: &Codebook,
    cpi_len: usize,
    nfft: usize,
) -> Result<Vec<AngleEstimate>> {
    if cpi_len < 2 {
        return Err(Error::InvalidArgument(
            "cpi length must be at least 2 packets".into(),
        ));
    }
    if cube.n_slow() < cpi_len {
        return Err(Error::SliceTooLong {
            wanted: cpi_len,
            available: cube.n_slow(),
        });
    }
    if codebook.n_directions() != cube.n_directions() {
        return Err(Error::LengthMismatch(format!(
            "codebook has {} directions, cube has {}",
            codebook.n_directions(),
            cube.n_directions()
        )));
    }
    let directions = codebook.directions();
    let n_cpis = cube.n_slow() / cpi_len;
    let window = WindowSpec {
        kind: WindowKind::Rect,
        len: cpi_len,
        overlap: 0.0,
        nfft,
    };
    window.validate()?;
    let dc_bin = nfft / 2;

    let mut out = Vec::with_capacity(n_cpis);
    for cpi in 0..n_cpis {
        let lo = cpi * cpi_len;
        let mut best: Option<(usize, f64)> = None;
        for dir in 0..cube.n_directions() {
            let full = cube.direction_matrix(dir);
            let slice = crate::sensing::RadarDataMatrix {
                samples: full.samples.slice(ndarray::s![.., lo..lo + cpi_len]).to_owned(),
                fast_axis: full.fast_axis.clone(),
                slow_axis: full.slow_axis[lo..lo + cpi_len].to_vec(),
                pri: full.pri,
            };
            let cleaned = clutter_removal(&slice)?;
            let rd = range_doppler(&cleaned, &window, 0)?;
            let mut power = 0.0;
            for row in rd.magnitudes.rows() {
                for (bin, &mag) in row.iter().enumerate() {
                    if bin != dc_bin {
                        power += mag * mag;
                    }
                }
            }
            match best {
                Some((_, p)) if p >= power => {}
                _ => best = Some((dir, power)),
            }
        }
        let (dir, power) = best.unwrap();
        if power == 0.0 {
            return Err(Error::NoTargetPower);
        }
        let (azimuth, elevation) = directions[dir];
        out.push(AngleEstimate {
            cpi_index: cpi,
            azimuth,
            elevation,
            direction_index: dir,
            power,
        });
    }
    Ok(out)
}

/// Ground-truth (azimuth, elevation) of the torso joint as seen from
/// `node_pos` at the given times.
pub fn ground_truth_angles(
    traj: &JointTrajectory,
    node_pos: Point3,
    times: &[f64],
) -> Result<Vec<(f64, f64)>> {
    if traj.is_empty() {
        return Err(Error::EmptyInput("joint trajectory"));
    }
    let t0 = traj.timestamps[0];
    let t1 = traj.timestamps[traj.len() - 1];
    let tol = 1e-9;
    times
        .iter()
        .map(|&t| {
            if t < t0 - tol || t > t1 + tol {
                return Err(Error::InvalidArgument(format!(
                    "time {t} outside trajectory span [{t0}, {t1}]"
                )));
            }
            let torso = traj.frame_at(t)[joints::SPINE_ORIGIN];
            geom::direction_angles(node_pos, torso).ok_or(Error::DegeneratePath)
        })
        .collect()
}

/// Wrapped angular errors, histogram, and mean absolute error.
pub fn accuracy(estimates: &[f64], truths: &[f64], bin_width: f64) -> Result<AccuracyReport> {
    if estimates.len() != truths.len() {
        return Err(Error::LengthMismatch(format!(
            "{} estimates vs {} truths",
            estimates.len(),
            truths.len()
        )));
    }
    if !(bin_width > 0.0) {
        return Err(Error::InvalidArgument(
            "histogram bin width must be positive".into(),
        ));
    }
    let errors: Vec<f64> = estimates
        .iter()
        .zip(truths)
        .map(|(&e, &t)| geom::wrap_degrees(e - t))
        .collect();
    let mean_abs_error = if errors.is_empty() {
        0.0
    } else {
        errors.iter().map(|e| e.abs()).sum::<f64>() / errors.len() as f64
    };
    let n_bins = (360.0 / bin_width).ceil() as usize;
    let mut histogram: Vec<HistogramBin> = (0..n_bins)
        .map(|i| HistogramBin {
            lo: -180.0 + i as f64 * bin_width,
            hi: (-180.0 + (i + 1) as f64 * bin_width).min(180.0),
            count: 0,
        })
        .collect();
    for &e in &errors {
        let idx = (((e + 180.0) / bin_width).floor() as usize).min(n_bins - 1);
        histogram[idx].count += 1;
    }
    Ok(AccuracyReport {
        errors,
        histogram,
        mean_abs_error,
        bin_width,
    })
}

/// Estimates as CSV: `cpi,azimuth_deg,elevation_deg,direction_index,power`.
pub fn write_estimates_csv<W: std::io::Write>(
    estimates: &[AngleEstimate],
    mut w: W,
) -> Result<()> {
    writeln!(w, "cpi,azimuth_deg,elevation_deg,direction_index,power")?;
    for e in estimates {
        writeln!(
            w,
            "{},{},{},{},{}",
            e.cpi_index, e.azimuth, e.elevation, e.direction_index, e.power
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::Environment;
    use crate::kinematics::{build_walker, BodyModel, GaitParams};
    use crate::phy::{trn_sweep_with, CirGrid, NoiseModel, PacketSchedule, TrnConfig, TrnMode};
    use approx::assert_relative_eq;
    use ndarray::Array3;
    use num_complex::Complex64;

    #[test]
    fn ground_truth_convention_anchors() {
        // Build a degenerate "trajectory" by hand: torso fixed at known
        // offsets from the node.
        let mut frame = [[0.0; 3]; joints::COUNT];
        let node = [0.0, 0.0, 1.0];
        // Due boresight: +x, same height -> (0, 90).
        frame[joints::SPINE_ORIGIN] = [2.0, 0.0, 1.0];
        let traj = JointTrajectory {
            positions: vec![frame, frame],
            timestamps: vec![0.0, 1.0],
        };
        let gt = ground_truth_angles(&traj, node, &[0.5]).unwrap();
        assert_relative_eq!(gt[0].0, 0.0, epsilon = 1e-12);
        assert_relative_eq!(gt[0].1, 90.0, epsilon = 1e-12);

        // 45 degrees off in the horizontal plane.
        frame[joints::SPINE_ORIGIN] = [1.0, 1.0, 1.0];
        let traj = JointTrajectory {
            positions: vec![frame, frame],
            timestamps: vec![0.0, 1.0],
        };
        let gt = ground_truth_angles(&traj, node, &[0.0]).unwrap();
        assert_relative_eq!(gt[0].0, 45.0, epsilon = 1e-12);
        assert_relative_eq!(gt[0].1, 90.0, epsilon = 1e-12);

        // Directly above the node: zenith elevation 0.
        frame[joints::SPINE_ORIGIN] = [0.0, 0.0, 2.5];
        let traj = JointTrajectory {
            positions: vec![frame, frame],
            timestamps: vec![0.0, 1.0],
        };
        let gt = ground_truth_angles(&traj, node, &[1.0]).unwrap();
        assert_relative_eq!(gt[0].1, 0.0, epsilon = 1e-12);

        // Out-of-span time rejected.
        assert!(ground_truth_angles(&traj, node, &[2.0]).is_err());
    }

    #[test]
    fn radial_scatterer_locks_every_cpi() {
        // Scatterer on a codebook direction moving radially toward the
        // trained RX: every CPI must pick that direction (brute force is
        // what estimate_angles does internally; the point is end-to-end).
        let env = Environment::new([19.0, 10.0, 3.0], [3.0, 5.0, 1.5], [4.0, 7.0, 1.5], 60e9);
        let book = Codebook::preset_2x2();
        let dir_star = 22; // az 315, el 90
        let (az, el) = book.directions()[dir_star];
        let u = geom::unit_of_angles(az, el);
        let schedule = PacketSchedule {
            prf: 590.0,
            n_packets: 32,
            t_start: 0.0,
        };
        let grid = CirGrid {
            bandwidth_hz: 1.76e9,
            n_taps: 64,
        };
        let rx = env.rx_pos;
        let cube = trn_sweep_with(
            &env,
            move |t| {
                let range = 2.0 - 0.4 * t;
                vec![
                    [
                        rx[0] + range * u[0],
                        rx[1] + range * u[1],
                        rx[2] + range * u[2],
                    ],
                ]
            },
            &schedule,
            &book,
            &TrnConfig::with_mode(TrnMode::RxTraining),
            &NoiseModel::noiseless(),
            &grid,
        )
        .unwrap();
        let estimates = estimate_angles(&cube, &book, 8, 16).unwrap();
        assert_eq!(estimates.len(), 4);
        for e in &estimates {
            assert_eq!(e.direction_index, dir_star, "cpi {}", e.cpi_index);
            assert_eq!((e.azimuth, e.elevation), (az, el));
        }
    }

    #[test]
    fn zero_cube_is_rejected() {
        let cube = RadarDataCube {
            samples: Array3::zeros((2, 4, 64)),
            direction_axis: vec![0, 1],
            fast_axis: vec![0.0; 4],
            slow_axis: (0..64).map(|k| k as f64 / 590.0).collect(),
            pri: 1.0 / 590.0,
        };
        let book = Codebook {
            name: "tiny".into(),
            n_rows: 1,
            n_cols: 2,
            azimuths: vec![0.0, 45.0],
            elevations: vec![90.0],
        };
        assert!(matches!(
            estimate_angles(&cube, &book, 32, 64),
            Err(Error::NoTargetPower)
        ));
    }

    #[test]
    fn cpi_count_truncates_tail() {
        // 600 packets, CPI 32 -> 18 estimates.
        let n_slow = 600;
        let mut samples = Array3::zeros((2, 1, n_slow));
        for k in 0..n_slow {
            // Moving phase on direction 1 so power concentrates there.
            samples[[1, 0, k]] = Complex64::from_polar(1.0, 0.7 * k as f64);
            samples[[0, 0, k]] = Complex64::new(0.1, 0.0);
        }
        let cube = RadarDataCube {
            samples,
            direction_axis: vec![0, 1],
            fast_axis: vec![10e-9],
            slow_axis: (0..n_slow).map(|k| k as f64 / 590.0).collect(),
            pri: 1.0 / 590.0,
        };
        let book = Codebook {
            name: "tiny".into(),
            n_rows: 1,
            n_cols: 2,
            azimuths: vec![0.0, 45.0],
            elevations: vec![90.0],
        };
        let est = estimate_angles(&cube, &book, 32, 64).unwrap();
        assert_eq!(est.len(), 18);
        assert!(est.iter().all(|e| e.direction_index == 1));
        // Cube shorter than one CPI errors.
        assert!(estimate_angles(&cube, &book, 1024, 2048).is_err());
    }

    #[test]
    fn estimates_always_codebook_members() {
        let book = Codebook::preset_2x2();
        let dirs = book.directions();
        let n_slow = 64;
        let mut samples = Array3::zeros((dirs.len(), 2, n_slow));
        for d in 0..dirs.len() {
            for k in 0..n_slow {
                samples[[d, 0, k]] =
                    Complex64::from_polar((d + 1) as f64 * 0.01, 0.5 * k as f64);
            }
        }
        let cube = RadarDataCube {
            samples,
            direction_axis: (0..dirs.len()).collect(),
            fast_axis: vec![0.0, 1e-9],
            slow_axis: (0..n_slow).map(|k| k as f64 / 590.0).collect(),
            pri: 1.0 / 590.0,
        };
        let est = estimate_angles(&cube, &book, 32, 64).unwrap();
        for e in &est {
            assert!(dirs.contains(&(e.azimuth, e.elevation)));
        }
    }

    #[test]
    fn permutation_changes_bookkeeping_not_angles() {
        // Two directions, power concentrated on one: permuting the
        // codebook order changes direction_index but not the angles.
        let mk_cube = |strong_first: bool| {
            let n_slow = 32;
            let mut samples = Array3::zeros((2, 1, n_slow));
            for k in 0..n_slow {
                let strong = Complex64::from_polar(1.0, 0.9 * k as f64);
                let weak = Complex64::from_polar(0.05, 0.9 * k as f64);
                samples[[0, 0, k]] = if strong_first { strong } else { weak };
                samples[[1, 0, k]] = if strong_first { weak } else { strong };
            }
            RadarDataCube {
                samples,
                direction_axis: vec![0, 1],
                fast_axis: vec![0.0],
                slow_axis: (0..n_slow).map(|k| k as f64 / 590.0).collect(),
                pri: 1.0 / 590.0,
            }
        };
        let book_a = Codebook {
            name: "a".into(),
            n_rows: 1,
            n_cols: 2,
            azimuths: vec![45.0, 315.0],
            elevations: vec![90.0],
        };
        let mut book_b = book_a.clone();
        book_b.azimuths = vec![315.0, 45.0];
        // Strong direction is azimuth 45 in both orderings.
        let ea = estimate_angles(&mk_cube(true), &book_a, 16, 16).unwrap();
        let eb = estimate_angles(&mk_cube(false), &book_b, 16, 16).unwrap();
        for (a, b) in ea.iter().zip(&eb) {
            assert_eq!((a.azimuth, a.elevation), (b.azimuth, b.elevation));
            assert_ne!(a.direction_index, b.direction_index);
        }
    }

    #[test]
    fn accuracy_zero_error_and_wrap() {
        let report = accuracy(&[10.0, 350.0], &[10.0, 350.0], 5.0).unwrap();
        assert_eq!(report.errors, vec![0.0, 0.0]);
        assert_eq!(report.mean_abs_error, 0.0);
        // 350 vs 10 wraps to -20.
        let report = accuracy(&[350.0], &[10.0], 5.0).unwrap();
        assert_relative_eq!(report.errors[0], -20.0, epsilon = 1e-12);
        // Histogram sums to the number of estimates.
        let total: usize = report.histogram.iter().map(|b| b.count).sum();
        assert_eq!(total, 1);
        assert!(matches!(
            accuracy(&[0.0], &[0.0, 1.0], 5.0),
            Err(Error::LengthMismatch(_))
        ));
    }

    #[test]
    fn quantization_mae_bounded_by_half_largest_gap() {
        // Perfect nearest-direction selection against a dense truth sweep:
        // MAE is bounded by half the largest angular gap of the codebook.
        let azimuths = Codebook::preset_2x8().azimuths;
        let mut largest_gap = 0.0f64;
        let mut sorted = azimuths.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for i in 0..sorted.len() {
            let next = if i + 1 == sorted.len() {
                sorted[0] + 360.0
            } else {
                sorted[i + 1]
            };
            largest_gap = largest_gap.max(next - sorted[i]);
        }
        let truths: Vec<f64> = (0..720).map(|k| k as f64 * 0.5).collect();
        let estimates: Vec<f64> = truths
            .iter()
            .map(|&t| {
                *azimuths
                    .iter()
                    .min_by(|&&a, &&b| {
                        geom::wrap_degrees(a - t)
                            .abs()
                            .partial_cmp(&geom::wrap_degrees(b - t).abs())
                            .unwrap()
                    })
                    .unwrap()
            })
            .collect();
        let report = accuracy(&estimates, &truths, 5.0).unwrap();
        assert!(
            report.mean_abs_error <= largest_gap / 2.0,
            "MAE {} vs half-gap {}",
            report.mean_abs_error,
            largest_gap / 2.0
        );
    }

    #[test]
    fn cpi_midpoints_values() {
        let slow: Vec<f64> = (0..10).map(|k| k as f64).collect();
        let mids = cpi_midpoints(&slow, 4);
        assert_eq!(mids, vec![1.5, 5.5]);
    }

    #[test]
    fn walker_ground_truth_smoke() {
        let body = BodyModel::standard(1.8);
        let gait = GaitParams {
            start: [4.0, 4.0],
            end: [5.0, 4.0],
            duration: 1.0,
            sample_interval: 0.01,
        };
        let traj = build_walker(&body, &gait).unwrap();
        let gt = ground_truth_angles(&traj, [4.0, 7.0, 1.5], &[0.0, 0.5, 0.99]).unwrap();
        // Walker is south of the node: azimuth in the 270-ish sector,
        // elevation a bit below horizontal (> 90).
        for (az, el) in gt {
            assert!((180.0..360.0).contains(&az), "az {az}");
            assert!(el > 90.0, "el {el}");
        }
    }

    #[test]
    fn estimates_csv_format() {
        let est = vec![AngleEstimate {
            cpi_index: 0,
            azimuth: 315.0,
            elevation: 90.0,
            direction_index: 22,
            power: 1.25e-9,
        }];
        let mut buf = Vec::new();
        write_estimates_csv(&est, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("cpi,azimuth_deg,elevation_deg,direction_index,power"));
        assert!(text.contains("0,315,90,22,"));
    }
}
