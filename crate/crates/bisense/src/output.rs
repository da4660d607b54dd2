//! Artifact writers: CSV tables with axis headers, grayscale PGM heatmaps,
//! raw complex binaries, and the SHA-256 run manifest.

use ndarray::Array2;
use num_complex::Complex64;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::config::hex_string;
use crate::error::{Error, Result};
use crate::sensing::{RangeDopplerMap, Spectrogram};

/// dB floor applied when rendering heatmaps.
pub const RENDER_FLOOR_DB: f64 = -120.0;

/// One file tracked by a run manifest.
#[derive(Debug, Clone, Serialize)]
pub struct ArtifactEntry {
    pub name: String,
    /// Path relative to the manifest directory.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

/// Reproducibility record of one run: configuration hash, seed, software
/// version, and a checksummed file list.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub config_hash: String,
    pub seed: u64,
    pub artifacts: Vec<ArtifactEntry>,
}

impl RunManifest {
    pub fn new(config_hash: String, seed: u64) -> Self {
        RunManifest {
            tool: "bisense".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config_hash,
            seed,
            artifacts: Vec::new(),
        }
    }

    /// Hash a just-written file into the manifest.
    pub fn add_file(&mut self, base_dir: &Path, path: &Path) -> Result<()> {
        let bytes = std::fs::read(path)?;
        let mut hasher = Sha256::new();
        hasher.update(&bytes);
        let rel = path
            .strip_prefix(base_dir)
            .unwrap_or(path)
            .to_string_lossy()
            .into_owned();
        self.artifacts.push(ArtifactEntry {
            name: path
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default(),
            path: rel,
            sha256: hex_string(&hasher.finalize()),
            bytes: bytes.len() as u64,
        });
        Ok(())
    }

    /// Write `manifest.json` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join("manifest.json");
        std::fs::write(&path, serde_json::to_string_pretty(self)?)?;
        Ok(path)
    }
}

/// SHA-256 hex digest of a file on disk.
pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path)?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    Ok(hex_string(&hasher.finalize()))
}

/// Write raw interleaved little-endian f64 (re, im) pairs.
pub fn write_complex_bin<'a, I>(path: &Path, values: I) -> Result<()>
where
    I: IntoIterator<Item = &'a Complex64>,
{
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    for v in values {
        w.write_all(&v.re.to_le_bytes())?;
        w.write_all(&v.im.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

/// Read back `n` complex values written by [`write_complex_bin`].
pub fn read_complex_bin(path: &Path, n: usize) -> Result<Vec<Complex64>> {
    let bytes = std::fs::read(path)?;
    if bytes.len() != n * 16 {
        return Err(Error::Artifact(format!(
            "{} holds {} bytes, expected {} for {} complex values",
            path.display(),
            bytes.len(),
            n * 16,
            n
        )));
    }
    let mut out = Vec::with_capacity(n);
    for chunk in bytes.chunks_exact(16) {
        let re = f64::from_le_bytes(chunk[0..8].try_into().unwrap());
        let im = f64::from_le_bytes(chunk[8..16].try_into().unwrap());
        out.push(Complex64::new(re, im));
    }
    Ok(out)
}

/// Spectrogram CSV: header row carries the Doppler axis, first column the
/// frame center times.
pub fn write_spectrogram_csv<W: Write>(sg: &Spectrogram, mut w: W) -> Result<()> {
    write!(w, "t_s")?;
    for f in &sg.doppler_axis {
        write!(w, ",{f}")?;
    }
    writeln!(w)?;
    for (i, t) in sg.frame_times.iter().enumerate() {
        write!(w, "{t}")?;
        for v in sg.magnitudes.row(i) {
            write!(w, ",{v}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Range-Doppler CSV: header row carries the Doppler axis, first column the
/// tap delay in nanoseconds.
pub fn write_range_doppler_csv<W: Write>(rd: &RangeDopplerMap, mut w: W) -> Result<()> {
    write!(w, "delay_ns")?;
    for f in &rd.doppler_axis {
        write!(w, ",{f}")?;
    }
    writeln!(w)?;
    for (i, d) in rd.range_axis.iter().enumerate() {
        write!(w, "{}", d * 1e9)?;
        for v in rd.magnitudes.row(i) {
            write!(w, ",{v}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Render magnitudes as an 8-bit binary PGM (P5).
///
/// Pixel row r, column c maps to `img[[r, c]]`; values are converted to dB
/// with `floor_db` and normalized so the image maximum is white.
pub fn write_heatmap_pgm(path: &Path, img: &Array2<f64>, floor_db: f64) -> Result<()> {
    let (rows, cols) = img.dim();
    let max = img.iter().cloned().fold(0.0f64, f64::max);
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "P5")?;
    writeln!(w, "{cols} {rows}")?;
    writeln!(w, "255")?;
    for r in 0..rows {
        for c in 0..cols {
            let v = img[[r, c]];
            let db = if max > 0.0 && v > 0.0 {
                (20.0 * (v / max).log10()).max(floor_db)
            } else {
                floor_db
            };
            let px = ((db - floor_db) / -floor_db * 255.0).round().clamp(0.0, 255.0) as u8;
            w.write_all(&[px])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Spectrogram oriented for viewing: Doppler vertical (positive up), time
/// horizontal.
pub fn spectrogram_image(sg: &Spectrogram) -> Array2<f64> {
    let (n_frames, nfft) = sg.magnitudes.dim();
    let mut img = Array2::zeros((nfft, n_frames));
    for f in 0..n_frames {
        for bin in 0..nfft {
            img[[nfft - 1 - bin, f]] = sg.magnitudes[[f, bin]];
        }
    }
    img
}

/// Range-Doppler map oriented for viewing: range vertical (near range on
/// top), Doppler horizontal.
pub fn range_doppler_image(rd: &RangeDopplerMap) -> Array2<f64> {
    rd.magnitudes.clone()
}
