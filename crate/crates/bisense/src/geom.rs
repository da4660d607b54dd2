//! Small 3-D vector helpers and the shared angle conventions.
//!
//! Angles follow one convention everywhere in the crate:
//!
//! * azimuth: degrees in [0, 360), measured in the horizontal plane from the
//!   boresight axis (+x) toward +y;
//! * elevation: degrees in [0, 180], measured from zenith (+z), so broadside
//!   in the horizontal plane is 90 and straight up is 0.
//!
//! Both simulated nodes face boresight +x.

/// Speed of light in m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// 3-D point or vector in metres.
pub type Point3 = [f64; 3];

#[inline]
pub fn sub(a: Point3, b: Point3) -> Point3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn add(a: Point3, b: Point3) -> Point3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn scale(v: Point3, s: f64) -> Point3 {
    [v[0] * s, v[1] * s, v[2] * s]
}

#[inline]
pub fn dot(a: Point3, b: Point3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn norm(v: Point3) -> f64 {
    dot(v, v).sqrt()
}

#[inline]
pub fn dist(a: Point3, b: Point3) -> f64 {
    norm(sub(a, b))
}

/// Unit vector from `a` toward `b`. Returns `None` for coincident points.
pub fn unit_towards(a: Point3, b: Point3) -> Option<Point3> {
    let d = sub(b, a);
    let n = norm(d);
    if n == 0.0 {
        None
    } else {
        Some(scale(d, 1.0 / n))
    }
}

/// (azimuth, elevation) in degrees of the direction from `from` toward `to`.
///
/// Returns `None` for coincident points.
pub fn direction_angles(from: Point3, to: Point3) -> Option<(f64, f64)> {
    let u = unit_towards(from, to)?;
    Some(angles_of_unit(u))
}

/// (azimuth, elevation) in degrees of a unit direction vector.
pub fn angles_of_unit(u: Point3) -> (f64, f64) {
    let az = u[1].atan2(u[0]).to_degrees().rem_euclid(360.0);
    let el = u[2].clamp(-1.0, 1.0).acos().to_degrees();
    (az, el)
}

/// Unit direction vector of (azimuth, elevation) in degrees.
pub fn unit_of_angles(az_deg: f64, el_deg: f64) -> Point3 {
    let az = az_deg.to_radians();
    let el = el_deg.to_radians();
    [el.sin() * az.cos(), el.sin() * az.sin(), el.cos()]
}

/// Wrap an angular difference in degrees to (-180, 180].
pub fn wrap_degrees(delta: f64) -> f64 {
    let mut d = delta.rem_euclid(360.0);
    if d > 180.0 {
        d -= 360.0;
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn angle_convention_anchors() {
        // Boresight (+x) in the horizontal plane.
        let (az, el) = angles_of_unit([1.0, 0.0, 0.0]);
        assert_relative_eq!(az, 0.0, epsilon = 1e-12);
        assert_relative_eq!(el, 90.0, epsilon = 1e-12);
        // Straight up is zenith.
        let (_, el) = angles_of_unit([0.0, 0.0, 1.0]);
        assert_relative_eq!(el, 0.0, epsilon = 1e-12);
        // +y is azimuth 90.
        let (az, _) = angles_of_unit([0.0, 1.0, 0.0]);
        assert_relative_eq!(az, 90.0, epsilon = 1e-12);
        // -y wraps to 270.
        let (az, _) = angles_of_unit([0.0, -1.0, 0.0]);
        assert_relative_eq!(az, 270.0, epsilon = 1e-12);
    }

    #[test]
    fn unit_angles_round_trip() {
        for &(az, el) in &[(0.0, 90.0), (45.0, 45.0), (281.0, 101.0), (349.0, 157.0)] {
            let u = unit_of_angles(az, el);
            let (az2, el2) = angles_of_unit(u);
            assert_relative_eq!(az, az2, epsilon = 1e-9);
            assert_relative_eq!(el, el2, epsilon = 1e-9);
        }
    }

    #[test]
    fn wrap_rule() {
        assert_relative_eq!(wrap_degrees(350.0 - 10.0), -20.0, epsilon = 1e-12);
        assert_relative_eq!(wrap_degrees(10.0 - 350.0), 20.0, epsilon = 1e-12);
        assert_relative_eq!(wrap_degrees(180.0), 180.0, epsilon = 1e-12);
        assert_relative_eq!(wrap_degrees(-180.0), 180.0, epsilon = 1e-12);
    }
}
