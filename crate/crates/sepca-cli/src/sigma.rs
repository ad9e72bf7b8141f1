//! Robust noise level estimation from finest-scale differences.
//!
//! Adjacent-column differences `(X[i][2k+1] - X[i][2k]) / sqrt(2)` cancel the
//! signal wherever `v` varies slowly, leaving pure noise samples of standard
//! deviation `sigma / sqrt(n)`. The median absolute deviation about the
//! median, scaled by 1.4826 for Gaussian consistency and by `sqrt(n)` for
//! the per-entry variance convention, estimates `sigma`.

use crate::CliError;
use sepca::DataMatrix;

#[derive(Debug, Clone, Copy)]
pub struct SigmaEstimate {
    pub sigma: f64,
    /// Set when the detail coefficients were all identical (for example a
    /// constant matrix), which pins the estimate at zero.
    pub degenerate: bool,
}

/// Gaussian consistency factor 1 / Phi^{-1}(3/4), conventional value.
const MAD_SCALE: f64 = 1.4826;

pub fn estimate_sigma(x: &DataMatrix) -> Result<SigmaEstimate, CliError> {
    let n = x.cols();
    if n < 2 {
        return Err(CliError::config(
            "sigma estimation needs at least two columns",
        ));
    }
    let pairs = n / 2; // odd n drops the last column
    let mut details = Vec::with_capacity(x.rows() * pairs);
    for row in x.row_iter() {
        for k in 0..pairs {
            details.push((row[2 * k + 1] - row[2 * k]) / std::f64::consts::SQRT_2);
        }
    }
    let med = median(&mut details.clone());
    let mut deviations: Vec<f64> = details.iter().map(|d| (d - med).abs()).collect();
    let mad = median(&mut deviations);
    let sigma = MAD_SCALE * mad * (n as f64).sqrt();
    Ok(SigmaEstimate {
        sigma,
        degenerate: mad == 0.0,
    })
}

fn median(xs: &mut [f64]) -> f64 {
    xs.sort_unstable_by(|a, b| a.total_cmp(b));
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        0.5 * (xs[m - 1] + xs[m])
    }
}
