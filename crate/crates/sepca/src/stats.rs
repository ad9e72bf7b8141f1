//! Row test statistics and the FWER-controlling thresholds.
//!
//! Thresholds are calibrated so that under pure noise the probability that
//! any of the p statistics crosses is at most `1/(e p)`. The sum statistic
//! has two threshold variants: the exact expression and the looser
//! closed-form bound `sigma * C_U * sqrt(log p / n)` that the detection
//! boundary formulas use.

use crate::error::Error;
use crate::math;
use crate::special::erfinv;

/// The three row statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StatKind {
    /// `|sum_k x_k| / sqrt(n)`; uses the equisigned structure of `v`.
    Sum,
    /// `sum_k |x_k| / sqrt(n)`.
    Ell1,
    /// `sum_k x_k^2`.
    Ell2,
}

/// Which expression to use for the sum-statistic threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SumVariant {
    /// The exact threshold; the default for selection.
    #[default]
    Exact,
    /// The closed-form bound `sigma * C_U * sqrt(log p / n)` with `kappa_U`
    /// at its minimum feasible value. Detection boundary formulas use this.
    TableBound,
}

/// Threshold constants for a given problem size.
///
/// `K = e` throughout. `kappa_U` is set to its smallest admissible value
/// `sqrt(2)/U(p) * (3 + sqrt(log p))`, which makes the bound variant the
/// tightest justified one.
#[derive(Debug, Clone, Copy)]
pub struct ThresholdConstants {
    /// `e * sqrt(1 - 2/pi)`, the l1 concentration constant.
    pub c1: f64,
    /// `sqrt(2) * e`, the l2 concentration constant.
    pub c2: f64,
    /// `sqrt(2) * erfinv(1 - 1/p)`; the upper quantile scale of p Gaussians.
    pub u_p: f64,
    /// `(pi^2 / 12) (log p)^{-3/2}`.
    pub delta_p: f64,
    /// `sqrt(2)/U(p) * (3 + sqrt(log p))`.
    pub kappa_u: f64,
    /// `sqrt(2) + kappa_U / (3 sqrt(2))`.
    pub c_u: f64,
}

impl ThresholdConstants {
    pub fn new(p: usize) -> Result<Self, Error> {
        if p < 2 {
            return Err(Error::DimensionTooSmall {
                what: "p",
                min: 2,
                got: p,
            });
        }
        let k = math::E;
        let c1 = k * math::sqrt(1.0 - 2.0 / math::PI);
        let c2 = math::SQRT_2 * k;
        let p_f = p as f64;
        let u_p = math::SQRT_2 * erfinv(1.0 - 1.0 / p_f)?;
        let log_p = math::ln(p_f);
        let delta_p = math::PI * math::PI / 12.0 * math::powf(log_p, -1.5);
        let kappa_u = math::SQRT_2 / u_p * (3.0 + math::sqrt(log_p));
        let c_u = math::SQRT_2 + kappa_u / (3.0 * math::SQRT_2);
        Ok(ThresholdConstants {
            c1,
            c2,
            u_p,
            delta_p,
            kappa_u,
            c_u,
        })
    }
}

/// Everything needed to evaluate one FWER threshold.
#[derive(Debug, Clone)]
pub struct ThresholdSpec {
    pub kind: StatKind,
    pub n: usize,
    pub p: usize,
    pub sigma: f64,
    /// Only observed for `StatKind::Sum`.
    pub variant: SumVariant,
}

impl ThresholdSpec {
    pub fn new(kind: StatKind, n: usize, p: usize, sigma: f64) -> Self {
        ThresholdSpec {
            kind,
            n,
            p,
            sigma,
            variant: SumVariant::default(),
        }
    }

    pub fn with_variant(mut self, variant: SumVariant) -> Self {
        self.variant = variant;
        self
    }

    pub fn constants(&self) -> Result<ThresholdConstants, Error> {
        ThresholdConstants::new(self.p)
    }
}

/// Evaluate one row statistic.
pub fn row_statistic(kind: StatKind, row: &[f64]) -> Result<f64, Error> {
    if row.is_empty() {
        return Err(Error::DimensionTooSmall {
            what: "row length",
            min: 1,
            got: 0,
        });
    }
    if row.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite { what: "row" });
    }
    let n = row.len() as f64;
    Ok(match kind {
        StatKind::Sum => math::abs(row.iter().sum::<f64>()) / math::sqrt(n),
        StatKind::Ell1 => row.iter().map(|x| math::abs(*x)).sum::<f64>() / math::sqrt(n),
        StatKind::Ell2 => row.iter().map(|x| x * x).sum(),
    })
}

/// The FWER threshold `tau_{n,p}` for the given statistic.
pub fn fwer_threshold(spec: &ThresholdSpec) -> Result<f64, Error> {
    if spec.n < 1 {
        return Err(Error::DimensionTooSmall {
            what: "n",
            min: 1,
            got: spec.n,
        });
    }
    if !(spec.sigma > 0.0 && spec.sigma.is_finite()) {
        return Err(Error::InvalidParam {
            name: "sigma",
            reason: "threshold needs a positive finite noise scale",
        });
    }
    let c = spec.constants()?;
    let n = spec.n as f64;
    let p = spec.p as f64;
    let log_ep = 1.0 + math::ln(p);
    let sigma = spec.sigma;
    Ok(match spec.kind {
        StatKind::Ell1 => sigma * (math::sqrt(2.0 / math::PI) + c.c1 * log_ep / math::sqrt(n)),
        StatKind::Ell2 => sigma * sigma * (1.0 + c.c2 * log_ep / math::sqrt(n)),
        StatKind::Sum => match spec.variant {
            SumVariant::Exact => {
                let log_p = math::ln(p);
                sigma / math::sqrt(n)
                    * (math::sqrt(2.0 * log_p)
                        + (log_ep / 3.0 + math::sqrt(log_ep)) / c.u_p
                        + c.delta_p)
            }
            SumVariant::TableBound => sigma * c.c_u * math::sqrt(math::ln(p) / n),
        },
    })
}
