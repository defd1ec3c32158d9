//! Planar scenario geometry.
//!
//! Everything lives in the x-y plane at antenna height; the z axis only
//! appears in [`FieldDirection`]. Reflectors are infinite planes `x = const`
//! and first-order reflections use the image method. Incidence angles and
//! field directions are computed once per access point from its center.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::{Add, Mul, Sub};

use crate::em::Material;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self - other).norm()
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, s: f64) -> Point2 {
        Point2::new(self.x * s, self.y * s)
    }
}

/// An access point with a uniform linear array of dual-polarized antennas.
#[derive(Debug, Clone, PartialEq)]
pub struct AccessPoint {
    pub center: Point2,
    /// Number of dual-polarized antennas K_l.
    pub num_dualpol: usize,
    /// Inter-antenna distance, m.
    pub spacing: f64,
    /// Unit vector along the array.
    pub axis: Point2,
}

impl AccessPoint {
    /// Array along the x axis.
    pub fn new(center: Point2, num_dualpol: usize, spacing: f64) -> Self {
        AccessPoint {
            center,
            num_dualpol,
            spacing,
            axis: Point2::new(1.0, 0.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_dualpol == 0 {
            return Err(Error::invalid("k", "at least one antenna required"));
        }
        if !(self.spacing.is_finite() && self.spacing > 0.0) {
            return Err(Error::invalid("spacing", "must be > 0"));
        }
        if (self.axis.norm() - 1.0).abs() > 1e-9 {
            return Err(Error::invalid("axis", "must be a unit vector"));
        }
        if !(self.center.x.is_finite() && self.center.y.is_finite()) {
            return Err(Error::invalid("center", "must be finite"));
        }
        Ok(())
    }
}

/// Antenna positions, ordered by increasing offset along the axis.
///
/// Antenna `k` sits at `center + (k − (K−1)/2)·spacing·axis`.
pub fn antenna_positions(ap: &AccessPoint) -> Vec<Point2> {
    let half = (ap.num_dualpol as f64 - 1.0) / 2.0;
    (0..ap.num_dualpol)
        .map(|k| ap.center + ap.axis * ((k as f64 - half) * ap.spacing))
        .collect()
}

/// Infinite planar reflector `x = plane_x`.
#[derive(Debug, Clone, PartialEq)]
pub struct Reflector {
    pub plane_x: f64,
    pub material: Material,
}

impl Reflector {
    pub fn new(plane_x: f64, material: Material) -> Self {
        Reflector { plane_x, material }
    }

    /// Signed offset of `p` from the plane.
    fn side(&self, p: Point2) -> f64 {
        p.x - self.plane_x
    }
}

pub fn mirror_image(p: Point2, r: &Reflector) -> Point2 {
    Point2::new(2.0 * r.plane_x - p.x, p.y)
}

/// Length and incidence angle of one propagation path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathGeometry {
    pub length: f64,
    /// θ_i from the plane normal; 0 for line of sight.
    pub incidence_angle: f64,
    /// 0 for line of sight, `m ≥ 1` for reflector `m`.
    pub path_index: usize,
}

pub fn los_path(antenna: Point2, rx: Point2) -> Result<PathGeometry> {
    let length = antenna.distance(rx);
    if length == 0.0 {
        return Err(Error::DegenerateGeometry("receiver coincides with antenna"));
    }
    Ok(PathGeometry {
        length,
        incidence_angle: 0.0,
        path_index: 0,
    })
}

/// First-order reflection off `r`, with the incidence angle taken from the
/// image of `ap_center`. `path_index` is left at 1; callers number
/// reflectors themselves.
pub fn reflected_path(
    antenna: Point2,
    rx: Point2,
    r: &Reflector,
    ap_center: Point2,
) -> Result<PathGeometry> {
    let a = r.side(antenna);
    let b = r.side(rx);
    let c = r.side(ap_center);
    if a == 0.0 || b == 0.0 || c == 0.0 {
        return Err(Error::DegenerateGeometry("point lies on reflector plane"));
    }
    if a.signum() != b.signum() || a.signum() != c.signum() {
        return Err(Error::DegenerateGeometry(
            "transmitter and receiver on opposite sides of reflector",
        ));
    }
    let length = mirror_image(antenna, r).distance(rx);
    let ray = rx - mirror_image(ap_center, r);
    Ok(PathGeometry {
        length,
        incidence_angle: ray.y.abs().atan2(ray.x.abs()),
        path_index: 1,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarization {
    /// Vertical; perpendicular to the plane of incidence for y-z reflectors.
    Vertical,
    /// Horizontal; parallel to the plane of incidence.
    Horizontal,
}

impl Polarization {
    pub const BOTH: [Polarization; 2] = [Polarization::Vertical, Polarization::Horizontal];
}

/// Unit vector of the received electric field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldDirection {
    pub u: [f64; 3],
}

impl FieldDirection {
    pub const Z: FieldDirection = FieldDirection { u: [0.0, 0.0, 1.0] };
}

/// Received field direction at `rx` for one path.
///
/// Vertical polarization is always `ẑ`. For horizontal polarization, let
/// `p̂` be the arrival direction (from the AP center, or its image for a
/// reflected path, toward `rx`):
///
/// - reflected paths use `(p̂_y, −p̂_x, 0)`, which equals
///   `x̂ sin θ_r − ŷ cos θ_r` off a reflector on the left of the AP and
///   `x̂ sin θ_r + ŷ cos θ_r` off one on the right, with the reflection
///   angle `θ_r` signed like `p̂_y`;
/// - line of sight uses `x̂ sin φ − ŷ cos φ` with `φ = θ_l mod π`, where
///   `θ_l = atan2(p̂_y, p̂_x)`. `φ` is taken in `(0, π]`, so propagation
///   exactly along ±x̂ yields `+ŷ`.
pub fn field_direction(
    ap_center: Point2,
    rx: Point2,
    path: &PathGeometry,
    reflectors: &[Reflector],
    pol: Polarization,
) -> Result<FieldDirection> {
    let source = match path.path_index {
        0 => ap_center,
        m => {
            let r = reflectors.get(m - 1).ok_or(Error::OutOfRange {
                what: "reflector",
                index: m - 1,
                len: reflectors.len(),
            })?;
            mirror_image(ap_center, r)
        }
    };
    let d = rx - source;
    let len = d.norm();
    if len == 0.0 {
        return Err(Error::DegenerateGeometry("receiver coincides with source"));
    }
    if pol == Polarization::Vertical {
        return Ok(FieldDirection::Z);
    }
    if path.path_index == 0 {
        let theta = d.y.atan2(d.x);
        let phi = if theta > 0.0 { theta } else { theta + PI };
        return Ok(FieldDirection {
            u: [phi.sin(), -phi.cos(), 0.0],
        });
    }
    Ok(FieldDirection {
        u: [d.y / len, -d.x / len, 0.0],
    })
}
