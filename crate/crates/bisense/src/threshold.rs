//! TRRS-based CSI variation and threshold-gated feedback.
//!
//! The time-reversal resonating strength (TRRS) between two CIRs is the
//! maximum cross-correlation magnitude over all integer tap lags, normalized
//! by both energies; it is 1 exactly when one CIR is a scaled, shifted copy
//! of the other. CSI variation is its complement in [0, 1].
//!
//! Feedback reporting keeps the last reported CIR as reference: a packet is
//! reported when its variation against the reference exceeds the threshold
//! (strict inequality, so a threshold of 1 suppresses everything after the
//! first packet). Missing packets are rebuilt with per-tap linear
//! interpolation between reports, holding the nearest report beyond the
//! ends.

use num_complex::Complex64;

use crate::channel::Cir;
use crate::error::{Error, Result};
use crate::phy::PacketSchedule;

/// One reported packet.
#[derive(Debug, Clone, PartialEq)]
pub struct FeedbackReport {
    /// Packet index in the original stream.
    pub index: usize,
    pub timestamp: f64,
    pub cir: Cir,
}

/// Outcome of running a feedback policy over a packet stream.
#[derive(Debug, Clone, PartialEq)]
pub struct FeedbackLog {
    pub reported: Vec<FeedbackReport>,
    /// Total packets observed.
    pub n_total: usize,
    /// Variation against the rolling reference for every packet.
    pub variations: Vec<f64>,
    /// Threshold the log was produced with.
    pub threshold: f64,
}

impl FeedbackLog {
    /// Fraction of packets that did not need reporting.
    pub fn reduction(&self) -> f64 {
        1.0 - self.reported.len() as f64 / self.n_total as f64
    }

    /// JSON rendering with indices, timestamps, variations, and reduction.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "threshold": self.threshold,
            "n_total": self.n_total,
            "n_reported": self.reported.len(),
            "reduction": self.reduction(),
            "reported_indices": self.reported.iter().map(|r| r.index).collect::<Vec<_>>(),
            "reported_timestamps": self.reported.iter().map(|r| r.timestamp).collect::<Vec<_>>(),
            "variations": self.variations,
        })
    }
}

/// Time-reversal resonating strength between two CIRs on the same tap grid.
///
/// `max over lags |xcorr(a, b)| / (||a|| * ||b||)`, searched over the full
/// lag range +-(n_taps - 1).
pub fn trrs(a: &Cir, b: &Cir) -> Result<f64> {
    if a.n_taps() != b.n_taps() || a.tap_spacing != b.tap_spacing {
        return Err(Error::TapGridMismatch(
            "TRRS inputs must share the tap grid".into(),
        ));
    }
    let ea = a.energy();
    let eb = b.energy();
    if ea == 0.0 || eb == 0.0 {
        return Err(Error::ZeroEnergyCir("trrs"));
    }
    let n = a.n_taps() as isize;
    let mut best = 0.0f64;
    for lag in -(n - 1)..n {
        let mut acc = Complex64::new(0.0, 0.0);
        let k_lo = lag.max(0);
        let k_hi = (n + lag).min(n);
        for k in k_lo..k_hi {
            acc += a.taps[k as usize] * b.taps[(k - lag) as usize].conj();
        }
        let mag = acc.norm();
        if mag > best {
            best = mag;
        }
    }
    Ok((best / (ea.sqrt() * eb.sqrt())).min(1.0))
}

/// CSI variation in [0, 1]: `1 - trrs(a, b)`; 0 means the channel is
/// unchanged.
pub fn csi_variation(a: &Cir, b: &Cir) -> Result<f64> {
    Ok((1.0 - trrs(a, b)?).max(0.0))
}

/// Run the threshold feedback policy over a time-sorted packet stream.
///
/// Packet 0 is always reported and becomes the reference; packet k is
/// reported iff its variation against the reference exceeds `threshold`,
/// whereupon the reference updates.
pub fn apply_policy(stream: &[(f64, Cir)], threshold: f64) -> Result<FeedbackLog> {
    if stream.is_empty() {
        return Err(Error::EmptyInput("packet stream"));
    }
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::InvalidArgument(format!(
            "threshold must be in [0, 1], got {threshold}"
        )));
    }
    let mut reported = vec![FeedbackReport {
        index: 0,
        timestamp: stream[0].0,
        cir: stream[0].1.clone(),
    }];
    let mut variations = vec![0.0];
    let mut reference = &stream[0].1;
    for (k, (t, cir)) in stream.iter().enumerate().skip(1) {
        let v = csi_variation(reference, cir)?;
        variations.push(v);
        if v > threshold {
            reported.push(FeedbackReport {
                index: k,
                timestamp: *t,
                cir: cir.clone(),
            });
            reference = cir;
        }
    }
    Ok(FeedbackLog {
        reported,
        n_total: stream.len(),
        variations,
        threshold,
    })
}

/// Rebuild a regularly sampled stream from irregular reports.
///
/// Reported packets pass through bit-exactly; gaps are filled by per-tap
/// linear interpolation on the packet index, and packets before the first
/// or after the last report hold the nearest report.
pub fn reconstruct(log: &FeedbackLog, schedule: &PacketSchedule) -> Result<Vec<(f64, Cir)>> {
    if log.reported.is_empty() {
        return Err(Error::EmptyInput("feedback log"));
    }
    schedule.validate()?;
    let reports = &log.reported;
    let mut out = Vec::with_capacity(schedule.n_packets);
    let mut hi = 0usize;
    for k in 0..schedule.n_packets {
        let t = schedule.timestamp(k);
        while hi < reports.len() && reports[hi].index < k {
            hi += 1;
        }
        let cir = if hi < reports.len() && reports[hi].index == k {
            reports[hi].cir.clone()
        } else if hi == 0 {
            reports[0].cir.clone()
        } else if hi == reports.len() {
            reports[reports.len() - 1].cir.clone()
        } else {
            let a = &reports[hi - 1];
            let b = &reports[hi];
            let w = (k - a.index) as f64 / (b.index - a.index) as f64;
            let taps = a
                .cir
                .taps
                .iter()
                .zip(&b.cir.taps)
                .map(|(x, y)| x + (y - x) * w)
                .collect();
            Cir {
                taps,
                tap_spacing: a.cir.tap_spacing,
                t0: a.cir.t0,
            }
        };
        out.push((t, cir));
    }
    Ok(out)
}

/// Reduction as a function of threshold for one stream.
pub fn reduction_sweep(stream: &[(f64, Cir)], thresholds: &[f64]) -> Result<Vec<(f64, f64)>> {
    thresholds
        .iter()
        .map(|&th| Ok((th, apply_policy(stream, th)?.reduction())))
        .collect()
}

/// Reduction-vs-threshold sweep as CSV.
pub fn write_sweep_csv<W: std::io::Write>(sweep: &[(f64, f64)], mut w: W) -> Result<()> {
    writeln!(w, "threshold,reduction,reported_fraction")?;
    for (th, red) in sweep {
        writeln!(w, "{},{},{}", th, red, 1.0 - red)?;
    }
    Ok(())
}
