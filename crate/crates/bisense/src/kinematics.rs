//! Parametric walking-human model: 17 joint points on 16 rigid segments.
//!
//! The walker provides the set of moving scatterers for the channel model.
//! It is a simplified averaging gait, not a biomechanical reproduction: the
//! torso translates at constant planar speed with a sinusoidal vertical
//! bounce, and hip/knee/shoulder/elbow flexing angles are sinusoids of the
//! gait phase. Joint positions come from forward kinematics over the segment
//! tree, so segment lengths are constant by construction.
//!
//! Conventions:
//! * segment lengths and joint heights are fixed fractions of body height
//!   (see the `proportions` constants);
//! * the gait cycle length is proportional to the relative velocity
//!   (speed / height) via [`GAIT_CYCLE_SCALE`];
//! * oscillation amplitudes ramp with relative velocity and saturate, so a
//!   stationary walker degenerates to a standing pose.

use crate::error::{Error, Result};
use crate::geom::Point3;

/// Joint indices and names of the 17-point body model.
pub mod joints {
    pub const SPINE_ORIGIN: usize = 0;
    pub const NECK: usize = 1;
    pub const HEAD: usize = 2;
    pub const SHOULDER_L: usize = 3;
    pub const SHOULDER_R: usize = 4;
    pub const ELBOW_L: usize = 5;
    pub const ELBOW_R: usize = 6;
    pub const WRIST_L: usize = 7;
    pub const WRIST_R: usize = 8;
    pub const HIP_L: usize = 9;
    pub const HIP_R: usize = 10;
    pub const KNEE_L: usize = 11;
    pub const KNEE_R: usize = 12;
    pub const ANKLE_L: usize = 13;
    pub const ANKLE_R: usize = 14;
    pub const TOE_L: usize = 15;
    pub const TOE_R: usize = 16;

    /// Number of joint points.
    pub const COUNT: usize = 17;

    /// Joint names, indexed by the constants above.
    pub const NAMES: [&str; COUNT] = [
        "spine_origin",
        "neck",
        "head",
        "shoulder_l",
        "shoulder_r",
        "elbow_l",
        "elbow_r",
        "wrist_l",
        "wrist_r",
        "hip_l",
        "hip_r",
        "knee_l",
        "knee_r",
        "ankle_l",
        "ankle_r",
        "toe_l",
        "toe_r",
    ];
}

/// Body proportions as fractions of total height (standard anthropometric
/// averages).
pub mod proportions {
    /// Spine origin (pelvis center) height.
    pub const SPINE_Z: f64 = 0.530;
    /// Spine origin to neck.
    pub const TORSO: f64 = 0.285;
    /// Neck to head center.
    pub const NECK_HEAD: f64 = 0.115;
    /// Neck to shoulder (half biacromial width).
    pub const SHOULDER_HALF: f64 = 0.129;
    /// Spine origin to hip (half pelvic width).
    pub const HIP_HALF: f64 = 0.0955;
    /// Shoulder to elbow.
    pub const UPPER_ARM: f64 = 0.186;
    /// Elbow to wrist.
    pub const FOREARM: f64 = 0.146;
    /// Hip to knee.
    pub const THIGH: f64 = 0.245;
    /// Knee to ankle.
    pub const SHANK: f64 = 0.246;
    /// Ankle to toe (foot kept horizontal).
    pub const FOOT: f64 = 0.114;
}

/// Gait cycle length per unit relative velocity, in metre-seconds:
/// `cycle_length = GAIT_CYCLE_SCALE * speed / height`. Equivalently the
/// cycle period is `GAIT_CYCLE_SCALE / height`, i.e. 0.833 s for a 1.8 m
/// walker.
pub const GAIT_CYCLE_SCALE: f64 = 1.5;

/// Relative velocity at which oscillation amplitudes reach their nominal
/// values; amplitudes saturate at 1.3x nominal.
const AMPLITUDE_REF_RV: f64 = 0.45;
const AMPLITUDE_CAP: f64 = 1.3;

/// Nominal flexing amplitudes in degrees and bounce in fractions of height.
const HIP_AMP_DEG: f64 = 22.0;
const KNEE_AMP_DEG: f64 = 32.0;
const SHOULDER_AMP_DEG: f64 = 10.0;
const ELBOW_AMP_DEG: f64 = 14.0;
const BOUNCE_AMP_FRAC: f64 = 0.010;

/// Fore-aft speed modulation depth at nominal relative velocity: the torso
/// slows while vaulting over the stance leg and re-accelerates at double
/// support, twice per cycle. The modulation is endpoint-corrected so the
/// total displacement stays exactly `end - start`.
const SPEED_MOD_FRAC: f64 = 0.20;

/// One rigid segment of the body tree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub parent: usize,
    pub child: usize,
    /// Nominal length in metres.
    pub length: f64,
}

/// 17-joint, 16-segment body model rooted at the spine origin.
#[derive(Debug, Clone)]
pub struct BodyModel {
    /// Total height in metres.
    pub height: f64,
    /// Ordered joint labels.
    pub joint_names: Vec<&'static str>,
    /// The 16 segments of the tree.
    pub segments: Vec<Segment>,
}

impl BodyModel {
    /// Standard proportions for a walker of the given height.
    pub fn standard(height: f64) -> Self {
        use joints::*;
        use proportions::*;
        let h = height;
        let segments = vec![
            Segment { parent: SPINE_ORIGIN, child: NECK, length: TORSO * h },
            Segment { parent: NECK, child: HEAD, length: NECK_HEAD * h },
            Segment { parent: NECK, child: SHOULDER_L, length: SHOULDER_HALF * h },
            Segment { parent: NECK, child: SHOULDER_R, length: SHOULDER_HALF * h },
            Segment { parent: SHOULDER_L, child: ELBOW_L, length: UPPER_ARM * h },
            Segment { parent: SHOULDER_R, child: ELBOW_R, length: UPPER_ARM * h },
            Segment { parent: ELBOW_L, child: WRIST_L, length: FOREARM * h },
            Segment { parent: ELBOW_R, child: WRIST_R, length: FOREARM * h },
            Segment { parent: SPINE_ORIGIN, child: HIP_L, length: HIP_HALF * h },
            Segment { parent: SPINE_ORIGIN, child: HIP_R, length: HIP_HALF * h },
            Segment { parent: HIP_L, child: KNEE_L, length: THIGH * h },
            Segment { parent: HIP_R, child: KNEE_R, length: THIGH * h },
            Segment { parent: KNEE_L, child: ANKLE_L, length: SHANK * h },
            Segment { parent: KNEE_R, child: ANKLE_R, length: SHANK * h },
            Segment { parent: ANKLE_L, child: TOE_L, length: FOOT * h },
            Segment { parent: ANKLE_R, child: TOE_R, length: FOOT * h },
        ];
        BodyModel {
            height,
            joint_names: joints::NAMES.to_vec(),
            segments,
        }
    }

    /// Check the structural invariants: 17 joints, 16 segments forming a
    /// tree rooted at the spine origin, positive lengths, and a leg chain
    /// shorter than the body.
    pub fn validate(&self) -> Result<()> {
        if self.height <= 0.0 {
            return Err(Error::Kinematics(format!(
                "height must be positive, got {}",
                self.height
            )));
        }
        if self.joint_names.len() != joints::COUNT {
            return Err(Error::Kinematics(format!(
                "expected {} joints, got {}",
                joints::COUNT,
                self.joint_names.len()
            )));
        }
        if self.segments.len() != joints::COUNT - 1 {
            return Err(Error::Kinematics(format!(
                "expected {} segments, got {}",
                joints::COUNT - 1,
                self.segments.len()
            )));
        }
        let mut seen_child = [false; joints::COUNT];
        for s in &self.segments {
            if s.length <= 0.0 {
                return Err(Error::Kinematics(format!(
                    "segment {}->{} has non-positive length {}",
                    s.parent, s.child, s.length
                )));
            }
            if s.parent >= joints::COUNT || s.child >= joints::COUNT {
                return Err(Error::Kinematics("segment joint index out of range".into()));
            }
            if s.child == joints::SPINE_ORIGIN {
                return Err(Error::Kinematics("root joint cannot be a child".into()));
            }
            if seen_child[s.child] {
                return Err(Error::Kinematics(format!(
                    "joint {} has multiple parents",
                    s.child
                )));
            }
            seen_child[s.child] = true;
        }
        // Every non-root joint has exactly one parent, so the 16 edges over
        // 17 vertices form a tree as long as the root is reachable; verify
        // connectivity by walking up from each child.
        for start in 1..joints::COUNT {
            let mut cur = start;
            let mut hops = 0;
            while cur != joints::SPINE_ORIGIN {
                let seg = self
                    .segments
                    .iter()
                    .find(|s| s.child == cur)
                    .ok_or_else(|| Error::Kinematics(format!("joint {cur} is disconnected")))?;
                cur = seg.parent;
                hops += 1;
                if hops > joints::COUNT {
                    return Err(Error::Kinematics("segment graph has a cycle".into()));
                }
            }
        }
        let leg: f64 = proportions::THIGH + proportions::SHANK + proportions::FOOT;
        if leg * self.height >= self.height {
            return Err(Error::Kinematics(
                "leg chain length must be shorter than the body height".into(),
            ));
        }
        Ok(())
    }

    /// Nominal length of the segment ending at `child`.
    pub fn segment_length_to(&self, child: usize) -> Option<f64> {
        self.segments.iter().find(|s| s.child == child).map(|s| s.length)
    }
}

/// Straight-line walk description.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaitParams {
    /// Planar start point in metres.
    pub start: [f64; 2],
    /// Planar end point in metres.
    pub end: [f64; 2],
    /// Walk duration in seconds.
    pub duration: f64,
    /// Trajectory sampling interval in seconds.
    pub sample_interval: f64,
}

impl GaitParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.duration > 0.0) {
            return Err(Error::Kinematics(format!(
                "duration must be positive, got {}",
                self.duration
            )));
        }
        if !(self.sample_interval > 0.0) {
            return Err(Error::Kinematics(format!(
                "sample_interval must be positive, got {}",
                self.sample_interval
            )));
        }
        if self.sample_interval >= self.duration {
            return Err(Error::Kinematics(format!(
                "sample_interval {} must be smaller than duration {}",
                self.sample_interval, self.duration
            )));
        }
        if self.duration / self.sample_interval < 2.0 {
            return Err(Error::Kinematics(
                "duration must cover at least two sample intervals".into(),
            ));
        }
        Ok(())
    }

    /// Number of trajectory samples: `round(duration / sample_interval)`.
    pub fn n_samples(&self) -> usize {
        (self.duration / self.sample_interval).round() as usize
    }

    /// Mean planar speed |end - start| / duration in m/s.
    pub fn mean_speed(&self) -> f64 {
        let dx = self.end[0] - self.start[0];
        let dy = self.end[1] - self.start[1];
        (dx * dx + dy * dy).sqrt() / self.duration
    }

    /// Walk speed normalized by body height, in 1/s.
    pub fn relative_velocity(&self, height: f64) -> f64 {
        self.mean_speed() / height
    }
}

/// Gait cycle period in seconds for this walker.
///
/// With the cycle length proportional to relative velocity the period
/// reduces to `GAIT_CYCLE_SCALE / height` independent of speed; a stationary
/// walker keeps the nominal period with zero amplitudes.
pub fn gait_cycle_period(body: &BodyModel, _gait: &GaitParams) -> f64 {
    GAIT_CYCLE_SCALE / body.height
}

/// Time-sampled 3-D positions of the 17 joints.
#[derive(Debug, Clone, PartialEq)]
pub struct JointTrajectory {
    /// Per-sample joint positions, metres.
    pub positions: Vec<[Point3; joints::COUNT]>,
    /// Sample times, seconds.
    pub timestamps: Vec<f64>,
}

impl JointTrajectory {
    pub fn len(&self) -> usize {
        self.timestamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timestamps.is_empty()
    }

    /// Joint positions at time `t`, linearly interpolated between samples
    /// and clamped to the trajectory span. Exactly at a sample time the
    /// stored frame is returned bit-identically.
    pub fn frame_at(&self, t: f64) -> [Point3; joints::COUNT] {
        let n = self.len();
        assert!(n > 0, "empty trajectory");
        if t <= self.timestamps[0] {
            return self.positions[0];
        }
        if t >= self.timestamps[n - 1] {
            return self.positions[n - 1];
        }
        let hi = self.timestamps.partition_point(|&ts| ts < t);
        if self.timestamps[hi] == t {
            return self.positions[hi];
        }
        let lo = hi - 1;
        let w = (t - self.timestamps[lo]) / (self.timestamps[hi] - self.timestamps[lo]);
        let mut out = [[0.0; 3]; joints::COUNT];
        for j in 0..joints::COUNT {
            for c in 0..3 {
                let a = self.positions[lo][j][c];
                let b = self.positions[hi][j][c];
                out[j][c] = a + w * (b - a);
            }
        }
        out
    }

    /// Dump as CSV with columns `t,joint,x,y,z`.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,joint,x,y,z")?;
        for (k, frame) in self.positions.iter().enumerate() {
            for (j, p) in frame.iter().enumerate() {
                writeln!(w, "{},{},{},{},{}", self.timestamps[k], j, p[0], p[1], p[2])?;
            }
        }
        Ok(())
    }
}

/// Build the joint trajectory of a straight-line walk.
pub fn build_walker(body: &BodyModel, gait: &GaitParams) -> Result<JointTrajectory> {
    body.validate()?;
    gait.validate()?;

    let n = gait.n_samples();
    let dt = gait.sample_interval;
    let h = body.height;
    let speed = gait.mean_speed();
    let rv = gait.relative_velocity(h);

    // Walk frame: forward unit vector in the plane, left = z x forward.
    let (fwd, along) = {
        let dx = gait.end[0] - gait.start[0];
        let dy = gait.end[1] - gait.start[1];
        let d = (dx * dx + dy * dy).sqrt();
        if d == 0.0 {
            ([1.0, 0.0], 0.0)
        } else {
            ([dx / d, dy / d], d)
        }
    };
    let _ = along;
    let left = [-fwd[1], fwd[0]];

    // Amplitudes ramp with relative velocity and saturate.
    let s = (rv / AMPLITUDE_REF_RV).min(AMPLITUDE_CAP);
    let hip_amp = (HIP_AMP_DEG * s).to_radians();
    let knee_amp = (KNEE_AMP_DEG * s).to_radians();
    let shoulder_amp = (SHOULDER_AMP_DEG * s).to_radians();
    let elbow_amp = (ELBOW_AMP_DEG * s).to_radians();
    let bounce_amp = BOUNCE_AMP_FRAC * h * s;

    let omega = 2.0 * std::f64::consts::PI / gait_cycle_period(body, gait);

    // Fore-aft modulation as a position offset: v(t) = v0 (1 - a cos(2 w t))
    // integrates to -a v0 / (2 w) sin(2 w t); a linear ramp pins the
    // endpoint displacement to exactly end - start.
    let speed_mod = SPEED_MOD_FRAC * s;
    let along_mod = |t: f64| -> f64 {
        if speed == 0.0 {
            return 0.0;
        }
        let raw = -speed_mod * speed / (2.0 * omega) * (2.0 * omega * t).sin();
        let raw_end =
            -speed_mod * speed / (2.0 * omega) * (2.0 * omega * gait.duration).sin();
        raw - t / gait.duration * raw_end
    };

    use joints::*;
    use proportions::*;

    let mut positions = Vec::with_capacity(n);
    let mut timestamps = Vec::with_capacity(n);
    for k in 0..n {
        let t = k as f64 * dt;
        let phase = omega * t;

        // Torso: mean planar speed plus the twice-per-cycle gait
        // oscillations. The bounce is phased so its vertical velocity and
        // the fore-aft modulation share the same twice-per-cycle phase.
        let along = speed * t + along_mod(t);
        let sx = gait.start[0] + fwd[0] * along;
        let sy = gait.start[1] + fwd[1] * along;
        let sz = SPINE_Z * h - bounce_amp * (2.0 * phase).sin();
        let spine: Point3 = [sx, sy, sz];

        let mut frame = [[0.0; 3]; COUNT];
        frame[SPINE_ORIGIN] = spine;

        let up: Point3 = [0.0, 0.0, 1.0];
        let f3: Point3 = [fwd[0], fwd[1], 0.0];
        let l3: Point3 = [left[0], left[1], 0.0];

        let neck = addmul(spine, up, TORSO * h);
        frame[NECK] = neck;
        frame[HEAD] = addmul(neck, up, NECK_HEAD * h);
        frame[SHOULDER_L] = addmul(neck, l3, SHOULDER_HALF * h);
        frame[SHOULDER_R] = addmul(neck, l3, -(SHOULDER_HALF * h));
        frame[HIP_L] = addmul(spine, l3, HIP_HALF * h);
        frame[HIP_R] = addmul(spine, l3, -(HIP_HALF * h));

        // Sagittal-plane limb angles. Right limbs lead by half a cycle; arms
        // counter-swing their same-side leg.
        for (side_phase, hip, knee, ankle, toe, shoulder, elbow, wrist) in [
            (phase, HIP_R, KNEE_R, ANKLE_R, TOE_R, SHOULDER_R, ELBOW_R, WRIST_R),
            (
                phase + std::f64::consts::PI,
                HIP_L,
                KNEE_L,
                ANKLE_L,
                TOE_L,
                SHOULDER_L,
                ELBOW_L,
                WRIST_L,
            ),
        ] {
            // Thigh angle from vertical (positive forward) and knee flexion
            // peaking mid-swing.
            let alpha = hip_amp * side_phase.sin();
            let beta = knee_amp * 0.5 * (1.0 + side_phase.cos());
            let knee_p = limb_point(frame[hip], f3, alpha, THIGH * h);
            frame[knee] = knee_p;
            frame[ankle] = limb_point(knee_p, f3, alpha - beta, SHANK * h);
            frame[toe] = addmul(frame[ankle], f3, FOOT * h);

            // Arm: shoulder swing opposes the leg, elbow bends forward.
            let sigma = shoulder_amp * (side_phase + std::f64::consts::PI).sin();
            let eps = elbow_amp * 0.5 * (1.0 + (side_phase + std::f64::consts::PI).sin());
            let elbow_p = limb_point(frame[shoulder], f3, sigma, UPPER_ARM * h);
            frame[elbow] = elbow_p;
            frame[wrist] = limb_point(elbow_p, f3, sigma + eps, FOREARM * h);
        }

        positions.push(frame);
        timestamps.push(t);
    }

    Ok(JointTrajectory {
        positions,
        timestamps,
    })
}

#[inline]
fn addmul(p: Point3, dir: Point3, s: f64) -> Point3 {
    [p[0] + dir[0] * s, p[1] + dir[1] * s, p[2] + dir[2] * s]
}

/// Point at `length` from `origin` along a direction tilted `angle` from
/// straight down toward `forward`.
#[inline]
fn limb_point(origin: Point3, forward: Point3, angle: f64, length: f64) -> Point3 {
    let (sin, cos) = angle.sin_cos();
    [
        origin[0] + forward[0] * length * sin,
        origin[1] + forward[1] * length * sin,
        origin[2] - length * cos,
    ]
}

/// Joint velocities by finite differences: central in the interior,
/// one-sided at the ends.
pub fn joint_velocities(traj: &JointTrajectory) -> Result<Vec<[Point3; joints::COUNT]>> {
    let n = traj.len();
    if n < 2 {
        return Err(Error::NotEnoughSamples(
            "joint_velocities needs at least 2 trajectory samples".into(),
        ));
    }
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let (k0, k1) = if k == 0 {
            (0, 1)
        } else if k == n - 1 {
            (n - 2, n - 1)
        } else {
            (k - 1, k + 1)
        };
        let dt = traj.timestamps[k1] - traj.timestamps[k0];
        let mut v = [[0.0; 3]; joints::COUNT];
        for j in 0..joints::COUNT {
            for c in 0..3 {
                v[j][c] = (traj.positions[k1][j][c] - traj.positions[k0][j][c]) / dt;
            }
        }
        out.push(v);
    }
    Ok(out)
}
