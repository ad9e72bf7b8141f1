//! Thin wrappers over `libm` so the same code paths compile with and without
//! `std` and produce identical results under either feature set.

#[inline]
pub fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub fn acos(x: f64) -> f64 {
    libm::acos(x)
}

#[inline]
pub fn hypot(x: f64, y: f64) -> f64 {
    libm::hypot(x, y)
}

/// Natural log of Euler's number is 1; the constant itself.
pub const E: f64 = core::f64::consts::E;
pub const PI: f64 = core::f64::consts::PI;
pub const SQRT_2: f64 = core::f64::consts::SQRT_2;
pub const FRAC_2_SQRT_PI: f64 = core::f64::consts::FRAC_2_SQRT_PI;

/// l2 norm of a slice.
pub fn norm2(xs: &[f64]) -> f64 {
    sqrt(xs.iter().map(|x| x * x).sum())
}

/// l1 norm of a slice.
pub fn norm1(xs: &[f64]) -> f64 {
    xs.iter().map(|x| abs(*x)).sum()
}

/// Dot product.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// True when every entry is >= 0 or every entry is <= 0.
pub fn is_equisigned(xs: &[f64]) -> bool {
    xs.iter().all(|&x| x >= 0.0) || xs.iter().all(|&x| x <= 0.0)
}
