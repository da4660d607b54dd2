//! Scenario configuration: a single TOML file with nested sections, strict
//! about unknown keys so typos fail fast, plus the built-in paper presets.
//!
//! The MCS index and Golay sequence length are recorded for provenance only;
//! the abstract PHY never consumes them (channel estimation is truth plus
//! noise).

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::channel::{DdhcParams, Environment};
use crate::error::{Error, Result};
use crate::geom;
use crate::kinematics::{BodyModel, GaitParams};
use crate::phy::{CirGrid, Codebook, NoiseModel, PacketSchedule, TrnConfig, TrnMode};
use crate::sensing::{WindowKind, WindowSpec};

/// What the simulate step produces: an omni SISO CIR stream or a
/// direction-resolved cube.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunMode {
    Siso,
    Directional,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentSection {
    /// Room dimensions in metres.
    pub room: [f64; 3],
    pub tx: [f64; 3],
    pub rx: [f64; 3],
    pub carrier_hz: f64,
    pub wall_reflections: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaitSection {
    /// Walker height in metres.
    pub height: f64,
    pub start: [f64; 2],
    pub end: [f64; 2],
    /// Walk duration in seconds.
    pub duration: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSection {
    pub prf: f64,
    pub n_packets: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSection {
    /// Per-tap SNR in dB; `inf` disables noise.
    pub snr_db: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DdhcSection {
    pub rho: f64,
    pub t0: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSection {
    pub bandwidth_hz: f64,
    pub n_taps: usize,
    /// Per-joint scattering attenuation in dB on top of Friis loss.
    pub scatter_atten_db: f64,
    /// Autoregressive blending of target-unrelated components; omit to
    /// disable.
    pub ddhc: Option<DdhcSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessingSection {
    pub window: WindowKind,
    pub window_len: usize,
    pub overlap: f64,
    pub nfft: usize,
    /// Coherent processing interval in packets.
    pub cpi: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdSection {
    /// CSI-variation threshold levels to sweep.
    pub levels: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DirectionalSection {
    /// Built-in codebook name ("2x2", "2x8", "8x8") or a path to a
    /// codebook TOML file.
    pub codebook: String,
    pub trn_mode: TrnMode,
    pub trn_p: u32,
    pub trn_m: u32,
    pub trn_n: u32,
}

/// Link parameters recorded in configs and manifests for fidelity; they do
/// not affect the abstract PHY.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkSection {
    pub mcs_index: u32,
    pub golay_length: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: String,
    /// Subset of "csv", "json", "pgm".
    pub formats: Vec<String>,
}

/// Full scenario description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub mode: RunMode,
    pub environment: EnvironmentSection,
    pub gait: GaitSection,
    pub schedule: ScheduleSection,
    pub noise: NoiseSection,
    pub channel: ChannelSection,
    pub processing: ProcessingSection,
    pub threshold: ThresholdSection,
    pub directional: DirectionalSection,
    pub link: LinkSection,
    pub output: OutputSection,
}

fn cfg_err(field: &str, message: impl Into<String>) -> Error {
    Error::Config {
        field: field.to_string(),
        message: message.into(),
    }
}

impl ScenarioConfig {
    /// Names and one-line descriptions of the built-in presets.
    pub fn preset_names() -> &'static [(&'static str, &'static str)] {
        &[
            (
                "paper-siso",
                "SISO micro-Doppler/threshold scenario: 19x10x3 m room, TX (4,5,1.5), RX (6,3,1.5), 768 packets at 590 Hz, 60 GHz, SNR 20 dB",
            ),
            (
                "paper-directional",
                "Directional TRN sweep scenario: TX (3,5,1.5), RX (4,7,1.5), 600 packets at 590 Hz, SNR 40 dB, CPI 32, 64-point Doppler FFT",
            ),
        ]
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "paper-siso" => Ok(Self::paper_siso()),
            "paper-directional" => Ok(Self::paper_directional()),
            other => Err(Error::UnknownPreset(other.to_string())),
        }
    }

    pub fn paper_siso() -> Self {
        let prf = 590.0;
        let n_packets = 768;
        ScenarioConfig {
            mode: RunMode::Siso,
            environment: EnvironmentSection {
                room: [19.0, 10.0, 3.0],
                tx: [4.0, 5.0, 1.5],
                rx: [6.0, 3.0, 1.5],
                carrier_hz: 60e9,
                wall_reflections: false,
            },
            gait: GaitSection {
                height: 1.8,
                start: [4.0, 4.0],
                end: [5.0, 4.0],
                duration: n_packets as f64 / prf,
            },
            schedule: ScheduleSection { prf, n_packets },
            noise: NoiseSection {
                snr_db: 20.0,
                seed: 1,
            },
            channel: ChannelSection {
                bandwidth_hz: 1.76e9,
                n_taps: 64,
                scatter_atten_db: crate::channel::DEFAULT_SCATTER_ATTEN_DB,
                ddhc: None,
            },
            processing: ProcessingSection {
                window: WindowKind::BlackmanHarris,
                window_len: 32,
                overlap: 0.5,
                nfft: 128,
                cpi: 32,
            },
            threshold: ThresholdSection {
                levels: vec![0.0, 0.025, 0.05, 0.1, 0.2],
            },
            directional: DirectionalSection {
                codebook: "2x2".into(),
                trn_mode: TrnMode::RxTraining,
                trn_p: 2,
                trn_m: 15,
                trn_n: 1,
            },
            link: LinkSection {
                mcs_index: 12,
                golay_length: 128,
            },
            output: OutputSection {
                dir: "out".into(),
                formats: vec!["csv".into(), "json".into()],
            },
        }
    }

    pub fn paper_directional() -> Self {
        let mut cfg = Self::paper_siso();
        cfg.mode = RunMode::Directional;
        cfg.environment.tx = [3.0, 5.0, 1.5];
        cfg.environment.rx = [4.0, 7.0, 1.5];
        cfg.schedule.n_packets = 600;
        cfg.gait.duration = 600.0 / cfg.schedule.prf;
        cfg.noise.snr_db = 40.0;
        cfg.processing.nfft = 64;
        cfg.link.mcs_index = 2;
        cfg
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = toml::from_str(text)?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        Ok(toml::to_string_pretty(self)?)
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_toml_string()?)?;
        Ok(())
    }

    /// SHA-256 of the canonical TOML serialization.
    pub fn config_hash(&self) -> Result<String> {
        let text = self.to_toml_string()?;
        let mut hasher = Sha256::new();
        hasher.update(text.as_bytes());
        Ok(hex_string(&hasher.finalize()))
    }

    pub fn validate(&self) -> Result<()> {
        let env = self.environment_model();
        env.validate()
            .map_err(|e| cfg_err("environment", e.to_string()))?;

        if !(self.gait.height > 0.0) {
            return Err(cfg_err("gait.height", "must be positive"));
        }
        self.gait_params()
            .validate()
            .map_err(|e| cfg_err("gait", e.to_string()))?;
        self.schedule()
            .validate()
            .map_err(|e| cfg_err("schedule", e.to_string()))?;

        let expected = self.gait.duration * self.schedule.prf;
        if (expected - self.schedule.n_packets as f64).abs() > 1.0 {
            return Err(cfg_err(
                "schedule.n_packets",
                format!(
                    "{} packets inconsistent with duration * prf = {expected:.2}",
                    self.schedule.n_packets
                ),
            ));
        }

        self.grid()
            .validate()
            .map_err(|e| cfg_err("channel", e.to_string()))?;
        if let Some(ddhc) = self.ddhc_params() {
            ddhc.validate()
                .map_err(|e| cfg_err("channel.ddhc", e.to_string()))?;
        }

        // With wall images enabled the static image paths must fit the tap
        // window (they are the longest static delays).
        if self.environment.wall_reflections {
            let spacing = self.grid().tap_spacing();
            let los = geom::dist(env.tx_pos, env.rx_pos) / geom::SPEED_OF_LIGHT;
            let t0 = los - 2.0 * spacing;
            let t1 = t0 + (self.channel.n_taps - 1) as f64 * spacing;
            for axis in 0..3 {
                for &plane in &[0.0, self.environment.room[axis]] {
                    let mut image = env.tx_pos;
                    image[axis] = 2.0 * plane - image[axis];
                    let delay = geom::dist(image, env.rx_pos) / geom::SPEED_OF_LIGHT;
                    if delay > t1 {
                        let needed =
                            ((delay - t0) / spacing).ceil() as usize + 1;
                        return Err(cfg_err(
                            "channel.n_taps",
                            format!(
                                "wall image at {:.1} ns exceeds the {}-tap window; use at least {} taps",
                                delay * 1e9,
                                self.channel.n_taps,
                                needed
                            ),
                        ));
                    }
                }
            }
        }

        self.window_spec()
            .validate()
            .map_err(|e| cfg_err("processing", e.to_string()))?;
        if self.processing.cpi < 2 {
            return Err(cfg_err("processing.cpi", "must be at least 2 packets"));
        }
        if self.processing.cpi > self.schedule.n_packets {
            return Err(cfg_err(
                "processing.cpi",
                "cannot exceed the packet count",
            ));
        }
        if self.processing.nfft < self.processing.cpi {
            return Err(cfg_err(
                "processing.nfft",
                "must be at least the CPI length",
            ));
        }

        for (i, level) in self.threshold.levels.iter().enumerate() {
            if !(0.0..=1.0).contains(level) {
                return Err(cfg_err(
                    "threshold.levels",
                    format!("level #{i} = {level} outside [0, 1]"),
                ));
            }
        }

        self.codebook()
            .map_err(|e| cfg_err("directional.codebook", e.to_string()))?;
        self.trn_config()
            .validate()
            .map_err(|e| cfg_err("directional", e.to_string()))?;

        for fmt in &self.output.formats {
            if !matches!(fmt.as_str(), "csv" | "json" | "pgm") {
                return Err(cfg_err(
                    "output.formats",
                    format!("unknown format {fmt:?} (expected csv, json, or pgm)"),
                ));
            }
        }
        Ok(())
    }

    pub fn environment_model(&self) -> Environment {
        Environment {
            room: self.environment.room,
            tx_pos: self.environment.tx,
            rx_pos: self.environment.rx,
            carrier_hz: self.environment.carrier_hz,
            wall_reflections: self.environment.wall_reflections,
            scatter_atten_db: self.channel.scatter_atten_db,
        }
    }

    pub fn body(&self) -> BodyModel {
        BodyModel::standard(self.gait.height)
    }

    /// Trajectory sampled at the packet rate.
    pub fn gait_params(&self) -> GaitParams {
        GaitParams {
            start: self.gait.start,
            end: self.gait.end,
            duration: self.gait.duration,
            sample_interval: 1.0 / self.schedule.prf,
        }
    }

    pub fn schedule(&self) -> PacketSchedule {
        PacketSchedule {
            prf: self.schedule.prf,
            n_packets: self.schedule.n_packets,
            t_start: 0.0,
        }
    }

    pub fn noise(&self) -> NoiseModel {
        NoiseModel {
            snr_db: self.noise.snr_db,
            seed: self.noise.seed,
        }
    }

    pub fn grid(&self) -> CirGrid {
        CirGrid {
            bandwidth_hz: self.channel.bandwidth_hz,
            n_taps: self.channel.n_taps,
        }
    }

    pub fn ddhc_params(&self) -> Option<DdhcParams> {
        self.channel.ddhc.as_ref().map(|d| DdhcParams {
            rho: d.rho,
            t0: d.t0,
            generator_seed: d.seed,
        })
    }

    pub fn window_spec(&self) -> WindowSpec {
        WindowSpec {
            kind: self.processing.window,
            len: self.processing.window_len,
            overlap: self.processing.overlap,
            nfft: self.processing.nfft,
        }
    }

    pub fn trn_config(&self) -> TrnConfig {
        TrnConfig {
            mode: self.directional.trn_mode,
            p: self.directional.trn_p,
            m: self.directional.trn_m,
            n: self.directional.trn_n,
        }
    }

    /// Resolve the codebook: a built-in name or a TOML file path.
    pub fn codebook(&self) -> Result<Codebook> {
        let name = self.directional.codebook.as_str();
        if name.ends_with(".toml") {
            Codebook::load(std::path::Path::new(name))
        } else {
            Codebook::preset(name)
        }
    }
}

pub(crate) fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        for (name, _) in ScenarioConfig::preset_names() {
            let cfg = ScenarioConfig::preset(name).unwrap();
            cfg.validate().unwrap();
        }
        assert!(ScenarioConfig::preset("nope").is_err());
    }

    #[test]
    fn paper_siso_values() {
        let cfg = ScenarioConfig::paper_siso();
        assert_eq!(cfg.environment.tx, [4.0, 5.0, 1.5]);
        assert_eq!(cfg.environment.rx, [6.0, 3.0, 1.5]);
        assert_eq!(cfg.schedule.n_packets, 768);
        assert_eq!(cfg.environment.carrier_hz, 60e9);
        assert_eq!(cfg.noise.snr_db, 20.0);
        assert_eq!(cfg.link.mcs_index, 12);
        // Trajectory sampling matches the packet rate (about 1.69 ms).
        let dt = 1.0 / cfg.schedule.prf;
        assert!((dt - 1.69e-3).abs() < 1e-5);
        assert_eq!(cfg.gait_params().n_samples(), 768);
    }

    #[test]
    fn paper_directional_values() {
        let cfg = ScenarioConfig::paper_directional();
        assert_eq!(cfg.environment.tx, [3.0, 5.0, 1.5]);
        assert_eq!(cfg.environment.rx, [4.0, 7.0, 1.5]);
        assert_eq!(cfg.schedule.n_packets, 600);
        assert_eq!(cfg.noise.snr_db, 40.0);
        assert_eq!(cfg.processing.nfft, 64);
        assert_eq!(cfg.processing.cpi, 32);
        assert_eq!(cfg.mode, RunMode::Directional);
    }

    #[test]
    fn toml_round_trip_identity() {
        let cfg = ScenarioConfig::paper_siso();
        let text = cfg.to_toml_string().unwrap();
        let back = ScenarioConfig::from_toml_str(&text).unwrap();
        assert_eq!(cfg, back);
        let text2 = back.to_toml_string().unwrap();
        assert_eq!(text, text2);
    }

    #[test]
    fn unknown_keys_rejected() {
        let cfg = ScenarioConfig::paper_siso();
        let mut text = cfg.to_toml_string().unwrap();
        text.push_str("\n[extra]\nfoo = 1\n");
        assert!(ScenarioConfig::from_toml_str(&text).is_err());
        // Typo inside a section.
        let bad = text.replace("wall_reflections", "wall_reflectons");
        assert!(ScenarioConfig::from_toml_str(&bad).is_err());
    }

    #[test]
    fn validation_field_messages() {
        let mut cfg = ScenarioConfig::paper_siso();
        cfg.schedule.n_packets = 100; // inconsistent with duration * prf
        match cfg.validate() {
            Err(Error::Config { field, .. }) => assert_eq!(field, "schedule.n_packets"),
            other => panic!("expected config error, got {other:?}"),
        }
        let mut cfg = ScenarioConfig::paper_siso();
        cfg.threshold.levels = vec![0.5, 1.5];
        assert!(matches!(
            cfg.validate(),
            Err(Error::Config { field, .. }) if field == "threshold.levels"
        ));
        let mut cfg = ScenarioConfig::paper_siso();
        cfg.environment.tx = [25.0, 5.0, 1.5];
        assert!(matches!(
            cfg.validate(),
            Err(Error::Config { field, .. }) if field == "environment"
        ));
        let mut cfg = ScenarioConfig::paper_siso();
        cfg.directional.codebook = "9x9".into();
        assert!(matches!(
            cfg.validate(),
            Err(Error::Config { field, .. }) if field == "directional.codebook"
        ));
    }

    #[test]
    fn wall_window_check() {
        let mut cfg = ScenarioConfig::paper_siso();
        cfg.environment.wall_reflections = true;
        // 64 taps cannot hold the far-wall image of a 19 m room.
        match cfg.validate() {
            Err(Error::Config { field, message }) => {
                assert_eq!(field, "channel.n_taps");
                assert!(message.contains("taps"), "{message}");
            }
            other => panic!("expected n_taps error, got {other:?}"),
        }
        cfg.channel.n_taps = 192;
        cfg.validate().unwrap();
    }

    #[test]
    fn config_hash_stable_and_sensitive() {
        let cfg = ScenarioConfig::paper_siso();
        let h1 = cfg.config_hash().unwrap();
        let h2 = cfg.config_hash().unwrap();
        assert_eq!(h1, h2);
        assert_eq!(h1.len(), 64);
        let mut other = cfg.clone();
        other.noise.seed = 2;
        assert_ne!(h1, other.config_hash().unwrap());
    }

    #[test]
    fn noise_inf_round_trips() {
        let mut cfg = ScenarioConfig::paper_siso();
        cfg.noise.snr_db = f64::INFINITY;
        let text = cfg.to_toml_string().unwrap();
        let back = ScenarioConfig::from_toml_str(&text).unwrap();
        assert!(back.noise.snr_db.is_infinite());
    }
}
