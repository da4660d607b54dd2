//! Pulse-Doppler style processing of CIR streams.
//!
//! Estimated CIRs collected packet by packet form the radar data matrix
//! (fast time x slow time); directional sweeps stack one matrix per steering
//! direction into a data cube. Processing follows the classic chain: remove
//! static clutter by subtracting the slow-time mean per range bin, window a
//! slow-time slice, zero-pad to the Doppler FFT length, and read magnitudes
//! off the shifted Doppler axis. The micro-Doppler spectrogram repeats that
//! per STFT frame and collapses range by taking the maximum magnitude per
//! Doppler bin.
//!
//! Magnitudes stay linear throughout; dB conversion happens only at
//! rendering time.

use ndarray::{Array2, Array3};
use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::channel::Cir;
use crate::error::{Error, Result};

/// Complex CIR taps arranged fast time x slow time.
#[derive(Debug, Clone, PartialEq)]
pub struct RadarDataMatrix {
    /// `[n_fast, n_slow]` complex samples.
    pub samples: Array2<Complex64>,
    /// Tap delays in seconds.
    pub fast_axis: Vec<f64>,
    /// Packet timestamps in seconds (strictly increasing, uniform).
    pub slow_axis: Vec<f64>,
    /// Slow-time sampling period (1 / prf); 0 for a single packet.
    pub pri: f64,
}

impl RadarDataMatrix {
    pub fn n_fast(&self) -> usize {
        self.samples.nrows()
    }

    pub fn n_slow(&self) -> usize {
        self.samples.ncols()
    }
}

/// Direction-resolved radar data: one matrix per codebook entry.
#[derive(Debug, Clone, PartialEq)]
pub struct RadarDataCube {
    /// `[n_directions, n_fast, n_slow]` complex samples.
    pub samples: Array3<Complex64>,
    /// Codebook direction indices.
    pub direction_axis: Vec<usize>,
    pub fast_axis: Vec<f64>,
    pub slow_axis: Vec<f64>,
    pub pri: f64,
}

impl RadarDataCube {
    pub fn n_directions(&self) -> usize {
        self.samples.shape()[0]
    }

    pub fn n_fast(&self) -> usize {
        self.samples.shape()[1]
    }

    pub fn n_slow(&self) -> usize {
        self.samples.shape()[2]
    }

    /// Copy of one direction slice as a standalone matrix.
    pub fn direction_matrix(&self, dir: usize) -> RadarDataMatrix {
        let slice = self.samples.index_axis(ndarray::Axis(0), dir);
        RadarDataMatrix {
            samples: slice.to_owned(),
            fast_axis: self.fast_axis.clone(),
            slow_axis: self.slow_axis.clone(),
            pri: self.pri,
        }
    }
}

/// Window function families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WindowKind {
    Rect,
    Hann,
    Hamming,
    BlackmanHarris,
}

impl std::str::FromStr for WindowKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rect" | "rectangular" | "boxcar" => Ok(WindowKind::Rect),
            "hann" => Ok(WindowKind::Hann),
            "hamming" => Ok(WindowKind::Hamming),
            "blackman-harris" | "blackmanharris" => Ok(WindowKind::BlackmanHarris),
            other => Err(Error::UnknownWindow(other.to_string())),
        }
    }
}

impl std::fmt::Display for WindowKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            WindowKind::Rect => "rect",
            WindowKind::Hann => "hann",
            WindowKind::Hamming => "hamming",
            WindowKind::BlackmanHarris => "blackman-harris",
        };
        f.write_str(name)
    }
}

/// STFT framing parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowSpec {
    pub kind: WindowKind,
    /// Window length L in slow-time samples.
    pub len: usize,
    /// Overlap fraction in [0, 1).
    pub overlap: f64,
    /// Doppler FFT length (frames are zero-padded up to this).
    pub nfft: usize,
}

impl WindowSpec {
    pub fn validate(&self) -> Result<()> {
        if self.len < 2 {
            return Err(Error::InvalidArgument(format!(
                "window length must be at least 2, got {}",
                self.len
            )));
        }
        if !(0.0..1.0).contains(&self.overlap) {
            return Err(Error::InvalidArgument(format!(
                "overlap must be in [0, 1), got {}",
                self.overlap
            )));
        }
        if self.nfft < self.len {
            return Err(Error::InvalidArgument(format!(
                "nfft {} must be at least the window length {}",
                self.nfft, self.len
            )));
        }
        Ok(())
    }

    /// Hop between frames: `max(1, round(L * (1 - overlap)))`.
    pub fn hop(&self) -> usize {
        ((self.len as f64 * (1.0 - self.overlap)).round() as usize).max(1)
    }

    /// Number of STFT frames over `n_slow` samples.
    pub fn n_frames(&self, n_slow: usize) -> Result<usize> {
        self.validate()?;
        if n_slow < self.len {
            return Err(Error::SliceTooLong {
                wanted: self.len,
                available: n_slow,
            });
        }
        Ok((n_slow - self.len) / self.hop() + 1)
    }
}

/// How the range dimension collapses into the spectrogram.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RangeCollapse {
    /// Maximum magnitude per Doppler bin (default).
    Max,
    /// Sum of magnitudes per Doppler bin.
    Sum,
}

/// Doppler magnitudes over range bins for one slow-time slice.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeDopplerMap {
    /// `[n_fast, nfft]` non-negative magnitudes, Doppler axis fft-shifted.
    pub magnitudes: Array2<f64>,
    /// Doppler frequencies in Hz, DC at index nfft/2.
    pub doppler_axis: Vec<f64>,
    /// Bi-static tap delays in seconds.
    pub range_axis: Vec<f64>,
}

/// Micro-Doppler magnitudes over STFT frames.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram {
    /// `[n_frames, nfft]` non-negative magnitudes.
    pub magnitudes: Array2<f64>,
    /// Frame center times in seconds.
    pub frame_times: Vec<f64>,
    /// Doppler frequencies in Hz, DC at index nfft/2.
    pub doppler_axis: Vec<f64>,
}

/// Stack a CIR stream into a radar data matrix.
///
/// The stream is canonicalized by sorting on timestamps; all CIRs must share
/// one tap grid and the timestamps must be uniformly spaced.
pub fn build_matrix(stream: &[(f64, Cir)]) -> Result<RadarDataMatrix> {
    if stream.is_empty() {
        return Err(Error::EmptyInput("CIR stream"));
    }
    let mut order: Vec<usize> = (0..stream.len()).collect();
    order.sort_by(|&a, &b| stream[a].0.partial_cmp(&stream[b].0).unwrap());

    let first = &stream[order[0]].1;
    let n_fast = first.n_taps();
    let n_slow = stream.len();
    for &i in &order {
        if !stream[i].1.same_grid(first) {
            return Err(Error::TapGridMismatch(format!(
                "packet at t={} has a different tap grid",
                stream[i].0
            )));
        }
    }
    let slow_axis: Vec<f64> = order.iter().map(|&i| stream[i].0).collect();
    let pri = if n_slow > 1 {
        let dt0 = slow_axis[1] - slow_axis[0];
        for w in slow_axis.windows(2) {
            let dt = w[1] - w[0];
            if dt <= 0.0 {
                return Err(Error::NonUniformSampling(
                    "duplicate or non-increasing timestamps".into(),
                ));
            }
            if (dt - dt0).abs() > 1e-6 * dt0 {
                return Err(Error::NonUniformSampling(format!(
                    "spacing {dt} differs from {dt0}; reconstruct the stream first"
                )));
            }
        }
        (slow_axis[n_slow - 1] - slow_axis[0]) / (n_slow - 1) as f64
    } else {
        0.0
    };

    let mut samples = Array2::zeros((n_fast, n_slow));
    for (col, &i) in order.iter().enumerate() {
        for (row, tap) in stream[i].1.taps.iter().enumerate() {
            samples[[row, col]] = *tap;
        }
    }
    let fast_axis = (0..n_fast).map(|k| first.tap_delay(k)).collect();
    Ok(RadarDataMatrix {
        samples,
        fast_axis,
        slow_axis,
        pri,
    })
}

/// Standard window coefficient formulas, symmetric by construction with
/// peak 1 at the center.
pub fn window_coefficients(kind: WindowKind, len: usize) -> Result<Vec<f64>> {
    if len < 2 {
        return Err(Error::InvalidArgument(format!(
            "window length must be at least 2, got {len}"
        )));
    }
    let mut w = vec![0.0; len];
    let denom = (len - 1) as f64;
    for k in 0..=(len - 1) / 2 {
        let x = 2.0 * std::f64::consts::PI * k as f64 / denom;
        let v = match kind {
            WindowKind::Rect => 1.0,
            WindowKind::Hann => 0.5 - 0.5 * x.cos(),
            WindowKind::Hamming => 0.54 - 0.46 * x.cos(),
            WindowKind::BlackmanHarris => {
                0.35875 - 0.48829 * x.cos() + 0.14128 * (2.0 * x).cos()
                    - 0.01168 * (3.0 * x).cos()
            }
        };
        w[k] = v;
        w[len - 1 - k] = v;
    }
    Ok(w)
}

/// Subtract the slow-time mean from every fast-time row, suppressing
/// returns from static scatterers.
pub fn clutter_removal(m: &RadarDataMatrix) -> Result<RadarDataMatrix> {
    if m.n_slow() < 2 {
        return Err(Error::NotEnoughSamples(
            "clutter removal needs at least 2 slow-time samples".into(),
        ));
    }
    let mut samples = m.samples.clone();
    let n = m.n_slow() as f64;
    for mut row in samples.rows_mut() {
        let mean = row.iter().sum::<Complex64>() / n;
        for v in row.iter_mut() {
            *v -= mean;
        }
    }
    Ok(RadarDataMatrix {
        samples,
        fast_axis: m.fast_axis.clone(),
        slow_axis: m.slow_axis.clone(),
        pri: m.pri,
    })
}

/// Centered Doppler axis in Hz: bin `i` maps to `(i - nfft/2) * prf / nfft`.
pub fn doppler_axis(nfft: usize, prf: f64) -> Vec<f64> {
    (0..nfft)
        .map(|i| (i as f64 - (nfft / 2) as f64) * prf / nfft as f64)
        .collect()
}

/// Mono-static velocity axis: `v = f_D * lambda / 2` per Doppler bin.
pub fn velocity_axis(doppler_axis: &[f64], lambda: f64) -> Vec<f64> {
    doppler_axis.iter().map(|f| f * lambda / 2.0).collect()
}

/// Doppler map of one slow-time slice `[slow_start, slow_start + L)`.
///
/// Each fast-time row is windowed, zero-padded to `nfft`, transformed, and
/// fft-shifted; magnitudes are returned.
pub fn range_doppler(
    m: &RadarDataMatrix,
    w: &WindowSpec,
    slow_start: usize,
) -> Result<RangeDopplerMap> {
    w.validate()?;
    if slow_start + w.len > m.n_slow() {
        return Err(Error::SliceTooLong {
            wanted: slow_start + w.len,
            available: m.n_slow(),
        });
    }
    let coeffs = window_coefficients(w.kind, w.len)?;
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(w.nfft);

    let prf = if m.pri > 0.0 { 1.0 / m.pri } else { 0.0 };
    let mut magnitudes = Array2::zeros((m.n_fast(), w.nfft));
    let mut buf = vec![Complex64::new(0.0, 0.0); w.nfft];
    for row in 0..m.n_fast() {
        for v in buf.iter_mut() {
            *v = Complex64::new(0.0, 0.0);
        }
        for k in 0..w.len {
            buf[k] = m.samples[[row, slow_start + k]] * coeffs[k];
        }
        fft.process(&mut buf);
        let half = w.nfft / 2;
        for i in 0..w.nfft {
            magnitudes[[row, i]] = buf[(i + half) % w.nfft].norm();
        }
    }
    Ok(RangeDopplerMap {
        magnitudes,
        doppler_axis: doppler_axis(w.nfft, prf),
        range_axis: m.fast_axis.clone(),
    })
}

/// Micro-Doppler spectrogram with the default max-over-range collapse.
pub fn stft_micro_doppler(m: &RadarDataMatrix, w: &WindowSpec) -> Result<Spectrogram> {
    stft_micro_doppler_with(m, w, RangeCollapse::Max)
}

/// Micro-Doppler spectrogram: per STFT frame a Doppler map is computed and
/// collapsed over range into one spectral line.
pub fn stft_micro_doppler_with(
    m: &RadarDataMatrix,
    w: &WindowSpec,
    collapse: RangeCollapse,
) -> Result<Spectrogram> {
    let n_frames = w.n_frames(m.n_slow())?;
    let hop = w.hop();
    let mut magnitudes = Array2::zeros((n_frames, w.nfft));
    let mut frame_times = Vec::with_capacity(n_frames);
    for f in 0..n_frames {
        let start = f * hop;
        let rd = range_doppler(m, w, start)?;
        for bin in 0..w.nfft {
            let col = rd.magnitudes.column(bin);
            magnitudes[[f, bin]] = match collapse {
                RangeCollapse::Max => col.iter().cloned().fold(0.0, f64::max),
                RangeCollapse::Sum => col.sum(),
            };
        }
        frame_times.push(0.5 * (m.slow_axis[start] + m.slow_axis[start + w.len - 1]));
    }
    let prf = if m.pri > 0.0 { 1.0 / m.pri } else { 0.0 };
    Ok(Spectrogram {
        magnitudes,
        frame_times,
        doppler_axis: doppler_axis(w.nfft, prf),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn cir_of(taps: Vec<Complex64>) -> Cir {
        Cir {
            taps,
            tap_spacing: 1.0 / 1.76e9,
            t0: 0.0,
        }
    }

    fn tone_matrix(n_fast: usize, n_slow: usize, f: f64, prf: f64) -> RadarDataMatrix {
        let stream: Vec<(f64, Cir)> = (0..n_slow)
            .map(|k| {
                let t = k as f64 / prf;
                let phase = 2.0 * std::f64::consts::PI * f * k as f64 / prf;
                let taps = vec![Complex64::from_polar(1.0, phase); n_fast];
                (t, cir_of(taps))
            })
            .collect();
        build_matrix(&stream).unwrap()
    }

    /// Direct O(n^2) DFT oracle with fftshift.
    fn direct_dft_shifted(x: &[Complex64], nfft: usize) -> Vec<f64> {
        let mut out = vec![0.0; nfft];
        for (i, o) in out.iter_mut().enumerate() {
            let bin = (i + nfft / 2) % nfft;
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, v) in x.iter().enumerate() {
                let ang = -2.0 * std::f64::consts::PI * bin as f64 * k as f64 / nfft as f64;
                acc += v * Complex64::from_polar(1.0, ang);
            }
            *o = acc.norm();
        }
        out
    }

    #[test]
    fn build_matrix_shapes() {
        let m = tone_matrix(64, 768, 0.0, 590.0);
        assert_eq!(m.n_fast(), 64);
        assert_eq!(m.n_slow(), 768);
        assert_relative_eq!(m.pri, 1.0 / 590.0, max_relative = 1e-9);
        // Single packet.
        let one = build_matrix(&[(0.0, cir_of(vec![Complex64::new(1.0, 0.0); 64]))]).unwrap();
        assert_eq!(one.n_fast(), 64);
        assert_eq!(one.n_slow(), 1);
        assert_eq!(one.pri, 0.0);
    }

    #[test]
    fn build_matrix_canonicalizes_order() {
        let mk = |k: usize| {
            (
                k as f64 * 0.1,
                cir_of(vec![Complex64::new(k as f64, 0.0); 4]),
            )
        };
        let sorted: Vec<_> = (0..6).map(mk).collect();
        let mut shuffled = sorted.clone();
        shuffled.swap(0, 5);
        shuffled.swap(1, 3);
        let a = build_matrix(&sorted).unwrap();
        let b = build_matrix(&shuffled).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn build_matrix_rejects_bad_streams() {
        let a = (0.0, cir_of(vec![Complex64::new(1.0, 0.0); 4]));
        let mut b = (0.1, cir_of(vec![Complex64::new(1.0, 0.0); 8]));
        assert!(matches!(
            build_matrix(&[a.clone(), b.clone()]),
            Err(Error::TapGridMismatch(_))
        ));
        b.1 = cir_of(vec![Complex64::new(1.0, 0.0); 4]);
        let c = (0.35, b.1.clone());
        assert!(matches!(
            build_matrix(&[a.clone(), b.clone(), c]),
            Err(Error::NonUniformSampling(_))
        ));
        assert!(matches!(build_matrix(&[]), Err(Error::EmptyInput(_))));
    }

    #[test]
    fn window_endpoint_values() {
        let hann = window_coefficients(WindowKind::Hann, 32).unwrap();
        assert_eq!(hann[0], 0.0);
        assert_eq!(hann[31], 0.0);
        let hamming = window_coefficients(WindowKind::Hamming, 32).unwrap();
        assert!((hamming[0] - 0.08).abs() < 1e-12);
        assert!((hamming[31] - 0.08).abs() < 1e-12);
        let rect = window_coefficients(WindowKind::Rect, 8).unwrap();
        assert!(rect.iter().all(|&v| v == 1.0));
        // Blackman-Harris endpoints: a0 - a1 + a2 - a3.
        let bh = window_coefficients(WindowKind::BlackmanHarris, 32).unwrap();
        let expect = 0.35875 - 0.48829 + 0.14128 - 0.01168;
        assert!((bh[0] - expect).abs() < 1e-12);
        // Odd-length windows peak at exactly 1 in the middle.
        let hann33 = window_coefficients(WindowKind::Hann, 33).unwrap();
        assert_eq!(hann33[16], 1.0);
    }

    #[test]
    fn window_symmetry_exact() {
        for kind in [
            WindowKind::Rect,
            WindowKind::Hann,
            WindowKind::Hamming,
            WindowKind::BlackmanHarris,
        ] {
            for len in [2usize, 5, 32, 33, 128] {
                let w = window_coefficients(kind, len).unwrap();
                for k in 0..len {
                    assert_eq!(w[k], w[len - 1 - k], "{kind} length {len} index {k}");
                }
            }
        }
    }

    #[test]
    fn window_kind_parsing() {
        assert_eq!("hann".parse::<WindowKind>().unwrap(), WindowKind::Hann);
        assert_eq!(
            "blackman-harris".parse::<WindowKind>().unwrap(),
            WindowKind::BlackmanHarris
        );
        assert!(matches!(
            "kaiser".parse::<WindowKind>(),
            Err(Error::UnknownWindow(_))
        ));
        assert!(window_coefficients(WindowKind::Hann, 1).is_err());
    }

    #[test]
    fn clutter_removal_annihilates_constants() {
        let m = tone_matrix(8, 32, 0.0, 590.0);
        let out = clutter_removal(&m).unwrap();
        for v in out.samples.iter() {
            assert!(v.norm() < 1e-12);
        }
    }

    #[test]
    fn clutter_removal_keeps_on_bin_tone() {
        // Tone on bin 5 of 64 samples: zero mean over integer periods.
        let prf = 590.0;
        let f = 5.0 * prf / 64.0;
        let m = tone_matrix(4, 64, f, prf);
        let out = clutter_removal(&m).unwrap();
        for (a, b) in m.samples.iter().zip(out.samples.iter()) {
            assert!((a - b).norm() < 1e-9);
        }
    }

    #[test]
    fn clutter_removal_idempotent() {
        let prf = 590.0;
        let mut m = tone_matrix(4, 50, 73.0, prf);
        // Add a static offset.
        for v in m.samples.iter_mut() {
            *v += Complex64::new(2.0, -1.0);
        }
        let once = clutter_removal(&m).unwrap();
        let twice = clutter_removal(&once).unwrap();
        for (a, b) in once.samples.iter().zip(twice.samples.iter()) {
            assert!((a - b).norm() < 1e-12);
        }
        // Single column is rejected.
        let one = build_matrix(&[(0.0, cir_of(vec![Complex64::new(1.0, 0.0); 4]))]).unwrap();
        assert!(clutter_removal(&one).is_err());
    }

    #[test]
    fn range_doppler_tone_peak_bin() {
        // 100 Hz tone at prf 590, nfft 128: peak 22 bins from center.
        let prf = 590.0;
        let m = tone_matrix(1, 128, 100.0, prf);
        let w = WindowSpec {
            kind: WindowKind::Rect,
            len: 128,
            overlap: 0.0,
            nfft: 128,
        };
        let rd = range_doppler(&m, &w, 0).unwrap();
        let row = rd.magnitudes.row(0);
        let peak = row
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        assert_eq!(peak as i64 - 64, 22);
        assert_relative_eq!(rd.doppler_axis[64], 0.0, epsilon = 1e-12);
        // Zero input -> zero map; negation leaves magnitudes unchanged.
        let zero = RadarDataMatrix {
            samples: Array2::zeros((2, 128)),
            fast_axis: vec![0.0; 2],
            slow_axis: m.slow_axis.clone(),
            pri: m.pri,
        };
        let rdz = range_doppler(&zero, &w, 0).unwrap();
        assert!(rdz.magnitudes.iter().all(|&v| v == 0.0));
        let mut neg = m.clone();
        neg.samples.mapv_inplace(|v| -v);
        let rdn = range_doppler(&neg, &w, 0).unwrap();
        for (a, b) in rd.magnitudes.iter().zip(rdn.magnitudes.iter()) {
            assert_relative_eq!(a, b, epsilon = 1e-9);
        }
    }

    #[test]
    fn range_doppler_matches_direct_dft() {
        let prf = 590.0;
        for nfft in [64usize, 128] {
            // Two-tone synthetic row.
            let n = nfft;
            let stream: Vec<(f64, Cir)> = (0..n)
                .map(|k| {
                    let t = k as f64 / prf;
                    let p1 = 2.0 * std::f64::consts::PI * 80.0 * k as f64 / prf;
                    let p2 = 2.0 * std::f64::consts::PI * (-130.0) * k as f64 / prf;
                    let tap = Complex64::from_polar(1.0, p1) + Complex64::from_polar(0.4, p2);
                    (t, cir_of(vec![tap]))
                })
                .collect();
            let m = build_matrix(&stream).unwrap();
            let w = WindowSpec {
                kind: WindowKind::Hann,
                len: n,
                overlap: 0.0,
                nfft,
            };
            let rd = range_doppler(&m, &w, 0).unwrap();
            // Oracle: window the raw row, then direct DFT.
            let coeffs = window_coefficients(WindowKind::Hann, n).unwrap();
            let x: Vec<Complex64> = (0..n).map(|k| m.samples[[0, k]] * coeffs[k]).collect();
            let oracle = direct_dft_shifted(&x, nfft);
            let peak = oracle.iter().cloned().fold(0.0, f64::max);
            for i in 0..nfft {
                assert!(
                    (rd.magnitudes[[0, i]] - oracle[i]).abs() <= 1e-9 * peak,
                    "nfft {nfft} bin {i}: {} vs {}",
                    rd.magnitudes[[0, i]],
                    oracle[i]
                );
            }
        }
    }

    #[test]
    fn stft_frame_counts_paper_settings() {
        let counts = [(0.0, 24usize), (0.5, 47), (0.9, 246)];
        for (overlap, expect) in counts {
            let w = WindowSpec {
                kind: WindowKind::BlackmanHarris,
                len: 32,
                overlap,
                nfft: 128,
            };
            assert_eq!(w.n_frames(768).unwrap(), expect, "overlap {overlap}");
        }
        // Hop behind the 90% case: round(3.2) = 3.
        assert_eq!(
            WindowSpec {
                kind: WindowKind::Rect,
                len: 32,
                overlap: 0.9,
                nfft: 128
            }
            .hop(),
            3
        );
    }

    #[test]
    fn stft_degenerates_to_plain_fft() {
        let prf = 590.0;
        let m = tone_matrix(3, 64, 92.0, prf);
        let w = WindowSpec {
            kind: WindowKind::Hamming,
            len: 64,
            overlap: 0.0,
            nfft: 64,
        };
        let sg = stft_micro_doppler(&m, &w).unwrap();
        assert_eq!(sg.magnitudes.nrows(), 1);
        let rd = range_doppler(&m, &w, 0).unwrap();
        for bin in 0..64 {
            let col_max = rd
                .magnitudes
                .column(bin)
                .iter()
                .cloned()
                .fold(0.0, f64::max);
            assert_eq!(sg.magnitudes[[0, bin]], col_max);
        }
        // Too-short input errors.
        let w_long = WindowSpec { len: 65, ..w };
        assert!(stft_micro_doppler(&m, &w_long).is_err());
    }

    #[test]
    fn stft_sum_collapse_differs() {
        let prf = 590.0;
        let m = tone_matrix(4, 64, 92.0, prf);
        let w = WindowSpec {
            kind: WindowKind::Hann,
            len: 32,
            overlap: 0.5,
            nfft: 64,
        };
        let max = stft_micro_doppler_with(&m, &w, RangeCollapse::Max).unwrap();
        let sum = stft_micro_doppler_with(&m, &w, RangeCollapse::Sum).unwrap();
        // Four identical rows: sum = 4x max.
        for (a, b) in max.magnitudes.iter().zip(sum.magnitudes.iter()) {
            assert_relative_eq!(4.0 * a, b, max_relative = 1e-9);
        }
    }

    #[test]
    fn velocity_axis_values() {
        let lambda = crate::geom::SPEED_OF_LIGHT / 60e9;
        let v = velocity_axis(&[0.0, 295.0, -100.0], lambda);
        assert_eq!(v[0], 0.0);
        // Frozen: 295 Hz * 4.9965 mm / 2 = 0.737 m/s.
        assert!((v[1] - 0.737).abs() < 5e-4, "got {}", v[1]);
        assert!(v[2] < 0.0);
    }

    #[test]
    fn doppler_axis_layout() {
        let axis = doppler_axis(128, 590.0);
        assert_relative_eq!(axis[64], 0.0, epsilon = 1e-12);
        assert_relative_eq!(axis[0], -295.0, epsilon = 1e-9);
        assert_relative_eq!(axis[127], 295.0 - 590.0 / 128.0, epsilon = 1e-9);
    }

    #[test]
    fn cube_direction_slices() {
        let mut samples = Array3::zeros((2, 3, 4));
        samples[[1, 2, 3]] = Complex64::new(5.0, 0.0);
        let cube = RadarDataCube {
            samples,
            direction_axis: vec![0, 1],
            fast_axis: vec![0.0, 1e-9, 2e-9],
            slow_axis: (0..4).map(|k| k as f64).collect(),
            pri: 1.0,
        };
        let m = cube.direction_matrix(1);
        assert_eq!(m.samples[[2, 3]], Complex64::new(5.0, 0.0));
        assert_eq!(cube.n_directions(), 2);
        assert_eq!(cube.n_fast(), 3);
        assert_eq!(cube.n_slow(), 4);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn frame_count_formula_holds(n_slow in 2usize..600, len in 2usize..64, overlap in 0.0f64..0.99) {
            prop_assume!(n_slow >= len);
            let w = WindowSpec { kind: WindowKind::Hann, len, overlap, nfft: len.next_power_of_two() };
            let hop = ((len as f64 * (1.0 - overlap)).round() as usize).max(1);
            let expect = (n_slow - len) / hop + 1;
            prop_assert_eq!(w.n_frames(n_slow).unwrap(), expect);
        }

        #[test]
        fn windows_symmetric_and_bounded(len in 2usize..200) {
            for kind in [WindowKind::Rect, WindowKind::Hann, WindowKind::Hamming, WindowKind::BlackmanHarris] {
                let w = window_coefficients(kind, len).unwrap();
                for k in 0..len {
                    prop_assert_eq!(w[k], w[len - 1 - k]);
                    prop_assert!(w[k] <= 1.0 + 1e-12);
                }
            }
        }

        #[test]
        fn clutter_removal_linear(scale in 0.1f64..5.0) {
            let m = tone_matrix(2, 16, 110.0, 590.0);
            let mut scaled = m.clone();
            scaled.samples.mapv_inplace(|v| v * scale);
            let a = clutter_removal(&m).unwrap();
            let b = clutter_removal(&scaled).unwrap();
            for (x, y) in a.samples.iter().zip(b.samples.iter()) {
                prop_assert!((x * scale - y).norm() < 1e-9);
            }
        }
    }
}
