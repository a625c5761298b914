//! Points on the unit-area sphere.
//!
//! All geometry is angular. A point is stored as a unit direction vector and
//! the distance between two points is the central angle between them, so a
//! closed ball `B_R(v)` is a spherical cap. Areas are normalised so that the
//! whole sphere has area 1; the physical radius `1/(2*sqrt(pi))` never needs
//! to be stored.
//!
//! The central-angle convention is the one under which the cap area behaves
//! like `R^2/4` for small `R` on the unit-area sphere.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const UNIT_TOLERANCE: f64 = 1e-12;

/// A unit direction on the sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct SpherePoint {
    dir: [f64; 3],
}

impl SpherePoint {
    /// Accepts a direction whose Euclidean norm is 1 within `1e-12`.
    pub fn from_unit(dir: [f64; 3]) -> Result<Self> {
        let norm = dir.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > UNIT_TOLERANCE {
            return Err(Error::NotUnit(norm));
        }
        Ok(Self { dir })
    }

    /// Builds a point from colatitude `theta` in `[0, pi]` and longitude `phi`
    /// (any real; taken modulo `2*pi`).
    pub fn from_angles(colatitude: f64, longitude: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&colatitude) || !longitude.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "colatitude {colatitude} / longitude {longitude}"
            )));
        }
        let (st, ct) = colatitude.sin_cos();
        let (sp, cp) = longitude.sin_cos();
        Ok(Self {
            dir: [st * cp, st * sp, ct],
        })
    }

    pub fn north_pole() -> Self {
        Self { dir: [0.0, 0.0, 1.0] }
    }

    pub fn south_pole() -> Self {
        Self { dir: [0.0, 0.0, -1.0] }
    }

    #[inline]
    pub fn direction(&self) -> [f64; 3] {
        self.dir
    }

    /// Colatitude in `[0, pi]`.
    pub fn colatitude(&self) -> f64 {
        self.dir[2].clamp(-1.0, 1.0).acos()
    }

    /// Longitude in `[0, 2*pi)`.
    pub fn longitude(&self) -> f64 {
        let phi = self.dir[1].atan2(self.dir[0]);
        if phi < 0.0 {
            let wrapped = phi + TAU;
            // -0.0 + TAU rounds to TAU for tiny negatives
            if wrapped >= TAU {
                0.0
            } else {
                wrapped
            }
        } else {
            phi
        }
    }

    #[inline]
    pub fn dot(&self, other: &SpherePoint) -> f64 {
        self.dir[0] * other.dir[0] + self.dir[1] * other.dir[1] + self.dir[2] * other.dir[2]
    }
}

impl TryFrom<[f64; 3]> for SpherePoint {
    type Error = Error;

    fn try_from(dir: [f64; 3]) -> Result<Self> {
        SpherePoint::from_unit(dir)
    }
}

impl From<SpherePoint> for [f64; 3] {
    fn from(p: SpherePoint) -> Self {
        p.dir
    }
}

/// An angular radius in `[0, pi]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct AngularRadius(f64);

impl AngularRadius {
    pub fn new(value: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&value) {
            return Err(Error::RadiusOutOfRange(value));
        }
        Ok(Self(value))
    }

    /// The whole sphere.
    pub fn full() -> Self {
        Self(PI)
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for AngularRadius {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        AngularRadius::new(value)
    }
}

impl From<AngularRadius> for f64 {
    fn from(r: AngularRadius) -> Self {
        r.0
    }
}

/// Central angle between `p` and `q`, in `[0, pi]`.
///
/// Evaluated as `atan2(|p x q|, p . q)`, which equals `arccos(p . q)` but stays
/// accurate for nearly coincident and nearly antipodal points, and is exactly
/// zero for identical points.
#[inline]
pub fn angular_distance(p: &SpherePoint, q: &SpherePoint) -> f64 {
    let [a0, a1, a2] = p.dir;
    let [b0, b1, b2] = q.dir;
    let cx = a1 * b2 - a2 * b1;
    let cy = a2 * b0 - a0 * b2;
    let cz = a0 * b1 - a1 * b0;
    let cross = (cx * cx + cy * cy + cz * cz).sqrt();
    cross.atan2(p.dot(q))
}

/// Area of a cap of angular radius `radius`, as a fraction of the sphere.
///
/// `(1 - cos R)/2`, evaluated as `sin^2(R/2)`.
#[inline]
pub fn cap_area(radius: AngularRadius) -> f64 {
    let h = (radius.0 / 2.0).sin();
    h * h
}

/// Draws an area-uniform point: `cos(colatitude)` uniform on `[-1, 1]`,
/// longitude uniform on `[0, 2*pi)`.
pub fn sample_uniform<R: Rng + ?Sized>(rng: &mut R) -> SpherePoint {
    let z: f64 = 1.0 - 2.0 * rng.gen::<f64>();
    let phi: f64 = TAU * rng.gen::<f64>();
    let s = (1.0 - z * z).max(0.0).sqrt();
    let (sp, cp) = phi.sin_cos();
    SpherePoint {
        dir: [s * cp, s * sp, z],
    }
}
