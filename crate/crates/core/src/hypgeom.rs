//! Closed-form hyperbolic trigonometry for triangles.
//!
//! Every length is carried as `s = sinh(ℓ/2)`. In that parametrization the
//! triangle area, the semicyclic radius and the semicyclic area are all
//! algebraic in `s` up to one final inverse-trig call, so the kernels below
//! never evaluate `sinh`/`cosh` themselves.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack allowed above 1 in an `acos`/`asin` argument before it is treated
/// as invalid geometry rather than roundoff.
pub const CLAMP_TOLERANCE: f64 = 1e-9;

/// A positive hyperbolic length ℓ stored as `sinh(ℓ/2)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct HalfSinhLength(f64);

impl HalfSinhLength {
    /// Wraps an already computed `sinh(ℓ/2)` value.
    pub fn new(s: f64) -> Result<Self> {
        if s.is_finite() && s > 0.0 {
            Ok(Self(s))
        } else {
            Err(Error::NonPositiveLength(s))
        }
    }

    /// Converts a raw hyperbolic length ℓ.
    pub fn from_length(length: f64) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::NonPositiveLength(length));
        }
        Self::new((length / 2.0).sinh())
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    /// The raw hyperbolic length `2·asinh(s)`.
    pub fn to_length(self) -> f64 {
        2.0 * self.0.asinh()
    }

    /// `cosh(ℓ/2) = √(1 + s²)`.
    #[inline]
    pub fn cosh_half(self) -> f64 {
        (1.0 + self.0 * self.0).sqrt()
    }

    /// `tanh(ℓ/2) = s / √(1 + s²)`.
    #[inline]
    pub fn tanh_half(self) -> f64 {
        self.0 / self.cosh_half()
    }
}

impl TryFrom<f64> for HalfSinhLength {
    type Error = Error;

    fn try_from(s: f64) -> Result<Self> {
        Self::new(s)
    }
}

impl From<HalfSinhLength> for f64 {
    fn from(s: HalfSinhLength) -> f64 {
        s.0
    }
}

impl fmt::Display for HalfSinhLength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Clamps an inverse-trig argument that exceeds 1 by at most
/// [`CLAMP_TOLERANCE`]; anything further out is a domain error.
fn clamp_unit(x: f64, context: impl FnOnce() -> String) -> Result<f64> {
    if !(-1.0 - CLAMP_TOLERANCE..=1.0 + CLAMP_TOLERANCE).contains(&x) {
        return Err(Error::Domain {
            context: context(),
            argument: x,
        });
    }
    Ok(x.clamp(-1.0, 1.0))
}

/// Area of the compact hyperbolic triangle with the given sides (hyperbolic
/// Heron formula).
///
/// Fails with [`Error::Domain`] when the sides violate the triangle
/// inequality. A degenerate triangle within roundoff has area 0.
pub fn triangle_area(a: HalfSinhLength, b: HalfSinhLength, c: HalfSinhLength) -> Result<f64> {
    let (sa, sb, sc) = (a.0, b.0, c.0);
    let num = sa * sa + sb * sb + sc * sc + 2.0;
    let den = 2.0 * a.cosh_half() * b.cosh_half() * c.cosh_half();
    let arg = clamp_unit(num / den, || {
        format!("triangle with half-sinh sides ({sa:?}, {sb:?}, {sc:?}) violates the triangle inequality")
    })?;
    Ok(2.0 * arg.acos())
}

/// Side completing `a` and `b` to a semicyclic triangle, whose longest side
/// is a diameter of its circumcircle. Equivalently `sinh J` for the
/// circumradius `J`.
#[inline]
pub fn semicyclic_radius(a: HalfSinhLength, b: HalfSinhLength) -> HalfSinhLength {
    HalfSinhLength((a.0 * a.0 + b.0 * b.0).sqrt())
}

/// Area of the semicyclic triangle with shorter sides `a` and `b`:
/// `2·asin(tanh(a/2)·tanh(b/2))`.
#[inline]
pub fn semicyclic_area(a: HalfSinhLength, b: HalfSinhLength) -> f64 {
    2.0 * (a.tanh_half() * b.tanh_half()).asin()
}

/// Area of the semicyclic triangle with two sides equal to `d`.
#[inline]
pub fn a_m(d: HalfSinhLength) -> f64 {
    semicyclic_area(d, d)
}
