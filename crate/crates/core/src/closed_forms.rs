//! Closed forms for the bound on `(b, b, b, x)` with `sinh(b/2) = 1`,
//! as functions of `X = sinh(x/2)`.
//!
//! There is a single tree with four frontier edges. Up to symmetry the long
//! side either sits at the non-root vertex (`identity`) or at the root
//! (`sigma`); the bound is the smaller of the two.

use std::f64::consts::{FRAC_PI_3, SQRT_2};

const SQRT_3: f64 = 1.732_050_807_568_877_2;

fn semicyclic_one(x: f64) -> f64 {
    2.0 * (x / (SQRT_2 * (x * x + 1.0).sqrt())).asin()
}

/// Long side on a slot of the non-root vertex.
pub fn identity_case(x: f64) -> f64 {
    let root = if x <= 1.0 {
        2.0 * ((5.0 + x * x) / (4.0 * (x * x + 2.0).sqrt())).acos()
    } else {
        FRAC_PI_3
    };
    semicyclic_one(x) + root
}

/// Long side on a slot of the root.
pub fn sigma_case(x: f64) -> f64 {
    let root = if x <= 1.0 {
        semicyclic_one(x)
    } else if x <= SQRT_3 {
        2.0 * ((5.0 + x * x) / (2.0 * (6.0 * (x * x + 1.0)).sqrt())).acos()
    } else {
        2.0 * (1.0 / SQRT_3).asin()
    };
    FRAC_PI_3 + root
}

/// The bound itself: the identity case up to `X = 1`, the sigma case after.
pub fn piecewise_minimum(x: f64) -> f64 {
    if x <= 1.0 {
        identity_case(x)
    } else {
        sigma_case(x)
    }
}

/// Value of the bound for every `X ≥ √3`.
pub fn plateau() -> f64 {
    FRAC_PI_3 + 2.0 * (1.0 / SQRT_3).asin()
}
