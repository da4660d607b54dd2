//! Abstract CSI acquisition over the simulated channel.
//!
//! Channel estimation is modeled as truth plus complex Gaussian noise at a
//! configured SNR; waveform-level preamble correlation is out of scope, so
//! the Golay processing gain appears only as a recorded link parameter. The
//! directional path models TRN-R / TRN-T beam training sweeps: for every
//! packet the trained end applies each codebook antenna-weight vector in
//! turn (the untrained end stays omni), producing a direction-resolved CIR
//! cube.
//!
//! Arrays are uniform planar, boresight +x, rows stacked vertically (z) and
//! columns horizontally (y), with half-wavelength element spacing by
//! default.

use ndarray::Array3;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::channel::{self, Cir, Environment};
use crate::error::{Error, Result};
use crate::geom::{self, Point3};
use crate::kinematics::JointTrajectory;
use crate::sensing::RadarDataCube;

/// Default element spacing in wavelengths.
pub const HALF_WAVELENGTH: f64 = 0.5;

/// Number of TRN subfields available for receive training per TRN-R unit.
pub const TRN_R_SUBFIELDS: usize = 10;

/// Uniform packet timing.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PacketSchedule {
    /// Packet repetition frequency in Hz.
    pub prf: f64,
    pub n_packets: usize,
    /// Time of packet 0 in seconds.
    pub t_start: f64,
}

impl PacketSchedule {
    pub fn validate(&self) -> Result<()> {
        if !(self.prf > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "prf must be positive, got {}",
                self.prf
            )));
        }
        if self.n_packets == 0 {
            return Err(Error::InvalidArgument("n_packets must be at least 1".into()));
        }
        Ok(())
    }

    /// Timestamp of packet `k`.
    pub fn timestamp(&self, k: usize) -> f64 {
        self.t_start + k as f64 / self.prf
    }

    pub fn timestamps(&self) -> Vec<f64> {
        (0..self.n_packets).map(|k| self.timestamp(k)).collect()
    }

    /// Packet repetition interval in seconds.
    pub fn pri(&self) -> f64 {
        1.0 / self.prf
    }
}

/// Estimation noise description.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct NoiseModel {
    /// Per-tap SNR in dB relative to the mean tap power; `inf` disables
    /// noise entirely.
    pub snr_db: f64,
    pub seed: u64,
}

impl NoiseModel {
    pub fn noiseless() -> Self {
        NoiseModel {
            snr_db: f64::INFINITY,
            seed: 0,
        }
    }
}

/// Phased-array steering codebook: the Cartesian product of azimuth and
/// elevation lists.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Codebook {
    pub name: String,
    /// Vertical antenna count.
    pub n_rows: usize,
    /// Horizontal antenna count.
    pub n_cols: usize,
    /// Azimuth entries in degrees, [0, 360).
    pub azimuths: Vec<f64>,
    /// Elevation entries in degrees, [0, 180].
    pub elevations: Vec<f64>,
}

impl Codebook {
    pub fn validate(&self) -> Result<()> {
        if self.n_rows == 0 || self.n_cols == 0 {
            return Err(Error::InvalidArgument("array dimensions must be >= 1".into()));
        }
        if self.azimuths.is_empty() || self.elevations.is_empty() {
            return Err(Error::InvalidArgument(
                "codebook needs at least one azimuth and one elevation".into(),
            ));
        }
        for &az in &self.azimuths {
            if !(0.0..360.0).contains(&az) {
                return Err(Error::InvalidArgument(format!(
                    "azimuth {az} outside [0, 360)"
                )));
            }
        }
        for &el in &self.elevations {
            if !(0.0..=180.0).contains(&el) {
                return Err(Error::InvalidArgument(format!(
                    "elevation {el} outside [0, 180]"
                )));
            }
        }
        Ok(())
    }

    pub fn n_directions(&self) -> usize {
        self.azimuths.len() * self.elevations.len()
    }

    /// Direction list in azimuth-major order: index `i` maps to
    /// `(azimuths[i / n_el], elevations[i % n_el])`.
    pub fn directions(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(self.n_directions());
        for &az in &self.azimuths {
            for &el in &self.elevations {
                out.push((az, el));
            }
        }
        out
    }

    /// 2x2 array, 25 directions (5 azimuths x 5 elevations).
    pub fn preset_2x2() -> Self {
        Codebook {
            name: "2x2".into(),
            n_rows: 2,
            n_cols: 2,
            azimuths: vec![0.0, 45.0, 90.0, 270.0, 315.0],
            elevations: vec![0.0, 45.0, 90.0, 135.0, 180.0],
        }
    }

    /// 2x8 array, 85 directions (17 azimuths x 5 elevations).
    pub fn preset_2x8() -> Self {
        Codebook {
            name: "2x8".into(),
            n_rows: 2,
            n_cols: 8,
            azimuths: vec![
                0.0, 11.0, 23.0, 34.0, 45.0, 56.0, 68.0, 79.0, 90.0, 270.0, 281.0, 292.0,
                304.0, 315.0, 326.0, 337.0, 349.0,
            ],
            elevations: vec![0.0, 45.0, 90.0, 135.0, 180.0],
        }
    }

    /// 8x8 array, 289 directions (17 azimuths x 17 elevations).
    pub fn preset_8x8() -> Self {
        Codebook {
            name: "8x8".into(),
            n_rows: 8,
            n_cols: 8,
            azimuths: vec![
                0.0, 11.0, 23.0, 34.0, 45.0, 56.0, 68.0, 79.0, 90.0, 270.0, 281.0, 292.0,
                304.0, 315.0, 326.0, 337.0, 349.0,
            ],
            elevations: vec![
                0.0, 11.0, 22.0, 33.0, 45.0, 56.0, 67.0, 78.0, 90.0, 101.0, 112.0, 123.0,
                135.0, 146.0, 157.0, 168.0, 180.0,
            ],
        }
    }

    /// Built-in codebook by name ("2x2", "2x8", "8x8").
    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "2x2" => Ok(Self::preset_2x2()),
            "2x8" => Ok(Self::preset_2x8()),
            "8x8" => Ok(Self::preset_8x8()),
            other => Err(Error::UnknownPreset(other.to_string())),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cb: Codebook = toml::from_str(text)?;
        cb.validate()?;
        Ok(cb)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        Ok(toml::to_string_pretty(self)?)
    }
}

/// TRN field training mode: which link end sweeps its AWV.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrnMode {
    /// Receiver training (EDMG BRP-RX): RX sweeps, TX stays omni.
    RxTraining,
    /// Transmitter training (EDMG BRP-TX): TX sweeps, RX stays omni.
    TxTraining,
}

/// TRN-unit structure (P, M, N subfield counts).
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct TrnConfig {
    pub mode: TrnMode,
    pub p: u32,
    pub m: u32,
    pub n: u32,
}

impl TrnConfig {
    /// P=2, M=15, N=1 unit structure.
    pub fn with_mode(mode: TrnMode) -> Self {
        TrnConfig {
            mode,
            p: 2,
            m: 15,
            n: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.mode == TrnMode::TxTraining && self.m == 0 {
            return Err(Error::InvalidArgument(
                "TX training requires at least one M subfield".into(),
            ));
        }
        if self.n == 0 {
            return Err(Error::InvalidArgument("TRN N must be at least 1".into()));
        }
        Ok(())
    }

    /// TRN subfields usable for training per unit: 10 for RX training,
    /// M + 1 for TX training.
    pub fn subfields_per_unit(&self) -> usize {
        match self.mode {
            TrnMode::RxTraining => TRN_R_SUBFIELDS,
            TrnMode::TxTraining => self.m as usize + 1,
        }
    }
}

/// Training length in TRN units needed to sweep a whole codebook.
pub fn training_length(codebook: &Codebook, trn: &TrnConfig) -> usize {
    let subfields = trn.subfields_per_unit();
    codebook.n_directions().div_ceil(subfields)
}

/// Antenna weight vector of a uniform planar array.
#[derive(Debug, Clone, PartialEq)]
pub struct Awv {
    /// Per-element complex weights, row-major (`r * n_cols + c`).
    pub weights: Vec<Complex64>,
    pub n_rows: usize,
    pub n_cols: usize,
    /// Element spacing in wavelengths.
    pub spacing: f64,
}

impl Awv {
    pub fn n_elements(&self) -> usize {
        self.n_rows * self.n_cols
    }

    fn check(&self) -> Result<()> {
        if self.weights.len() != self.n_elements() {
            return Err(Error::AwvDimension(format!(
                "{} weights for a {}x{} array",
                self.weights.len(),
                self.n_rows,
                self.n_cols
            )));
        }
        Ok(())
    }
}

/// Unit-magnitude steering weights of a uniform planar array pointed at
/// (azimuth, elevation); `||weights||^2 = n_rows * n_cols`.
pub fn steering_vector(
    n_rows: usize,
    n_cols: usize,
    az_deg: f64,
    el_deg: f64,
    spacing: f64,
) -> Result<Awv> {
    if n_rows == 0 || n_cols == 0 {
        return Err(Error::InvalidArgument("array dimensions must be >= 1".into()));
    }
    if !(spacing > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "element spacing must be positive, got {spacing}"
        )));
    }
    let u = geom::unit_of_angles(az_deg, el_deg);
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut weights = Vec::with_capacity(n_rows * n_cols);
    for r in 0..n_rows {
        for c in 0..n_cols {
            let phase = -two_pi * spacing * (c as f64 * u[1] + r as f64 * u[2]);
            weights.push(Complex64::from_polar(1.0, phase));
        }
    }
    Ok(Awv {
        weights,
        n_rows,
        n_cols,
        spacing,
    })
}

/// Complex array response of `awv` toward (azimuth, elevation), normalized
/// by sqrt(n_elements): magnitude peaks at sqrt(n) in the steered direction.
pub fn array_gain(awv: &Awv, az_deg: f64, el_deg: f64) -> Result<Complex64> {
    awv.check()?;
    let probe = steering_vector(awv.n_rows, awv.n_cols, az_deg, el_deg, awv.spacing)?;
    let acc: Complex64 = awv
        .weights
        .iter()
        .zip(&probe.weights)
        .map(|(a, b)| a.conj() * b)
        .sum();
    Ok(acc / (awv.weights.len() as f64).sqrt())
}

/// Noisy channel estimate: true taps plus i.i.d. circular complex Gaussian
/// noise with per-tap power `mean tap power / 10^(snr/10)`. Deterministic
/// in (seed, draw_index).
pub fn estimate_cir(true_cir: &Cir, noise: &NoiseModel, draw_index: u64) -> Cir {
    let mut out = true_cir.clone();
    apply_estimation_noise(&mut out.taps, noise, draw_index);
    out
}

fn apply_estimation_noise(taps: &mut [Complex64], noise: &NoiseModel, draw_index: u64) {
    if noise.snr_db.is_infinite() && noise.snr_db > 0.0 {
        return;
    }
    let energy: f64 = taps.iter().map(|c| c.norm_sqr()).sum();
    if energy == 0.0 {
        return;
    }
    let mean_power = energy / taps.len() as f64;
    let noise_power = mean_power / 10f64.powf(noise.snr_db / 10.0);
    let sigma = (noise_power / 2.0).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(channel::mix_seed(noise.seed, draw_index));
    for tap in taps.iter_mut() {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        *tap += Complex64::new(re * sigma, im * sigma);
    }
}

/// CIR tap-grid configuration shared by a simulation run.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CirGrid {
    pub bandwidth_hz: f64,
    pub n_taps: usize,
}

impl CirGrid {
    pub fn tap_spacing(&self) -> f64 {
        1.0 / self.bandwidth_hz
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.bandwidth_hz > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "bandwidth must be positive, got {}",
                self.bandwidth_hz
            )));
        }
        if self.n_taps == 0 {
            return Err(Error::InvalidArgument("n_taps must be at least 1".into()));
        }
        Ok(())
    }
}

/// Directional codebook sweep over a walker trajectory.
///
/// For every packet and every codebook direction the trained end applies
/// its AWV (per-ray weighting by the array response at the ray's AoA for
/// RX training, AoD for TX training) and the resulting CIR is estimated
/// with noise; the untrained end is a single isotropic element. Output is
/// indexed `[direction, tap, packet]`.
pub fn trn_sweep(
    env: &Environment,
    traj: &JointTrajectory,
    schedule: &PacketSchedule,
    codebook: &Codebook,
    trn: &TrnConfig,
    noise: &NoiseModel,
    grid: &CirGrid,
) -> Result<RadarDataCube> {
    if traj.is_empty() {
        return Err(Error::EmptyInput("joint trajectory"));
    }
    let t_first = traj.timestamps[0];
    let t_last = traj.timestamps[traj.len() - 1];
    let tol = 1e-9;
    let last_packet = schedule.timestamp(schedule.n_packets.saturating_sub(1));
    if schedule.t_start < t_first - tol || last_packet > t_last + tol {
        return Err(Error::InvalidArgument(format!(
            "packet schedule [{}, {last_packet}] outside trajectory span [{t_first}, {t_last}]",
            schedule.t_start
        )));
    }
    trn_sweep_with(
        env,
        |t| traj.frame_at(t).to_vec(),
        schedule,
        codebook,
        trn,
        noise,
        grid,
    )
}

/// Directional sweep over arbitrary time-varying scatterer sets; the walker
/// entry point [`trn_sweep`] delegates here.
pub fn trn_sweep_with<F>(
    env: &Environment,
    scatterers_at: F,
    schedule: &PacketSchedule,
    codebook: &Codebook,
    trn: &TrnConfig,
    noise: &NoiseModel,
    grid: &CirGrid,
) -> Result<RadarDataCube>
where
    F: Fn(f64) -> Vec<Point3>,
{
    env.validate()?;
    schedule.validate()?;
    codebook.validate()?;
    trn.validate()?;
    grid.validate()?;

    let directions = codebook.directions();
    let n_dirs = directions.len();
    let awvs: Vec<Awv> = directions
        .iter()
        .map(|&(az, el)| steering_vector(codebook.n_rows, codebook.n_cols, az, el, HALF_WAVELENGTH))
        .collect::<Result<_>>()?;
    let norm = ((codebook.n_rows * codebook.n_cols) as f64).sqrt();

    let spacing = grid.tap_spacing();
    // The LOS (shortest) path is static, so one grid serves every packet.
    let t0 = geom::dist(env.tx_pos, env.rx_pos) / geom::SPEED_OF_LIGHT - 2.0 * spacing;

    let times = schedule.timestamps();
    let mut samples = Array3::zeros((n_dirs, grid.n_taps, schedule.n_packets));
    let mut dir_taps = vec![vec![Complex64::new(0.0, 0.0); grid.n_taps]; n_dirs];

    for (k, &t) in times.iter().enumerate() {
        let points = scatterers_at(t);
        let real = channel::trace_rays(env, &points, t)?;

        for taps in dir_taps.iter_mut() {
            taps.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        }
        for ray in &real.rays {
            let profile = channel::delay_tap_profile(ray.delay, t0, spacing, grid.n_taps)?;
            let (az, el) = match trn.mode {
                TrnMode::RxTraining => ray.aoa,
                TrnMode::TxTraining => ray.aod,
            };
            let response =
                steering_vector(codebook.n_rows, codebook.n_cols, az, el, HALF_WAVELENGTH)?;
            let base = ray.amplitude();
            for (awv, taps) in awvs.iter().zip(dir_taps.iter_mut()) {
                let g: Complex64 = awv
                    .weights
                    .iter()
                    .zip(&response.weights)
                    .map(|(w, s)| w.conj() * s)
                    .sum::<Complex64>()
                    / norm;
                let amp = base * g;
                for (tap, p) in taps.iter_mut().zip(&profile) {
                    *tap += amp * p;
                }
            }
        }
        for (d, taps) in dir_taps.iter_mut().enumerate() {
            apply_estimation_noise(taps, noise, (k * n_dirs + d) as u64);
            for (row, &v) in taps.iter().enumerate() {
                samples[[d, row, k]] = v;
            }
        }
    }

    Ok(RadarDataCube {
        samples,
        direction_axis: (0..n_dirs).collect(),
        fast_axis: (0..grid.n_taps)
            .map(|k| t0 + k as f64 * spacing)
            .collect(),
        slow_axis: times,
        pri: schedule.pri(),
    })
}
