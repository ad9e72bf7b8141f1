//! Geometric power comparisons between the selectors.
//!
//! After absorbing the coordinate size into the row vector and taking
//! `sigma = 1`, each sum-family selector keeps a row when it lies outside a
//! hyperplane at distance `r - h` from the origin (normal along the all-ones
//! direction of its orthant), and each l2-family selector keeps it outside a
//! ball of radius `r`. When the hyperplane cuts the ball, the directions
//! detected by the sum-family selector but not the l2 one form a
//! hyperspherical cap of opening angle `theta_lim = arccos((r - h)/r)`; no
//! intersection means the l2-family selector is uniformly more powerful.
//! Comparisons within one family reduce to threshold ratios.

use crate::error::Error;
use crate::math;
use crate::stats::ThresholdConstants;
use crate::theory::rho;
use crate::Algorithm;
use alloc::vec::Vec;

/// Parameters consumed by the comparison formulas.
#[derive(Debug, Clone)]
pub struct GeometryParams {
    /// Sparsity index for HC members.
    pub beta_sparsity: Option<f64>,
    /// Detected model size for the penalized FDR member.
    pub k_hat: usize,
    pub zeta: f64,
    pub nu: f64,
    /// Optional vector whose angle is compared against the cap.
    pub v: Option<Vec<f64>>,
}

impl Default for GeometryParams {
    fn default() -> Self {
        GeometryParams {
            beta_sparsity: None,
            k_hat: 1,
            zeta: 1.02,
            nu: math::E * math::E,
            v: None,
        }
    }
}

/// One pairwise comparison.
#[derive(Debug, Clone)]
pub struct GeometryReport {
    pub pair: (Algorithm, Algorithm),
    /// Ball radius for mixed pairs; the second threshold for same-family
    /// pairs.
    pub r: f64,
    /// Cap height (`r` minus the hyperplane distance) for mixed pairs; the
    /// threshold gap for same-family pairs.
    pub h: f64,
    /// Cap opening angle; 0 when the cap is empty or the pair is
    /// same-family.
    pub theta_lim: f64,
    /// `arccos(||v||_1 / (||v||_2 sqrt(n)))` when a v was supplied.
    pub theta_v: Option<f64>,
    /// Whether the hyperplane cuts the ball, so that some directions favor
    /// the sum-family member. Same-family pairs report `ratio <= 1`.
    pub cap_exists: bool,
    /// Mixed pairs: `(r - h)/r`, the cosine of the cap angle before
    /// clamping. Same-family pairs: threshold ratio first/second.
    pub ratio: f64,
    /// The uniformly or conditionally preferred member, when determined.
    pub preferred: Option<Algorithm>,
}

/// Angle between a vector and the all-ones direction of its orthant.
pub fn vector_angle(v: &[f64]) -> Result<f64, Error> {
    if v.is_empty() {
        return Err(Error::DimensionTooSmall {
            what: "v",
            min: 1,
            got: 0,
        });
    }
    let l2 = math::norm2(v);
    if l2 == 0.0 {
        return Err(Error::ZeroNorm { what: "v" });
    }
    let cosine = math::norm1(v) / (l2 * math::sqrt(v.len() as f64));
    Ok(math::acos(cosine.clamp(-1.0, 1.0)))
}

/// Hyperplane distance `r - h` of a sum-family selector at noise scale 1.
fn plane_distance(
    alg: Algorithm,
    n: usize,
    p: usize,
    params: &GeometryParams,
) -> Result<f64, Error> {
    let n_f = n as f64;
    let p_f = p as f64;
    let log_p = math::ln(p_f);
    match alg {
        Algorithm::Sum => {
            let c = ThresholdConstants::new(p)?;
            Ok(c.c_u * math::sqrt(log_p / n_f))
        }
        Algorithm::HcSum => {
            let r = rho(params.beta_sparsity.ok_or(Error::InvalidParam {
                name: "beta_sparsity",
                reason: "HC comparisons need a sparsity index",
            })?)?;
            Ok(math::sqrt(2.0 * r * log_p / n_f))
        }
        Algorithm::Fdr => {
            if params.k_hat == 0 || params.k_hat > p {
                return Err(Error::InvalidParam {
                    name: "k_hat",
                    reason: "needs 1 <= k_hat <= p",
                });
            }
            let lam = math::sqrt(params.zeta)
                * (1.0 + math::sqrt(2.0 * math::ln(params.nu * p_f / params.k_hat as f64)));
            Ok(lam / math::sqrt(n_f))
        }
        _ => unreachable!("plane_distance is only called for the sum family"),
    }
}

/// Ball radius of an l2-family selector at noise scale 1.
fn ball_radius(alg: Algorithm, n: usize, p: usize, params: &GeometryParams) -> Result<f64, Error> {
    let n_f = n as f64;
    let log_p = math::ln(p as f64);
    match alg {
        Algorithm::Ell2 => {
            let c = ThresholdConstants::new(p)?;
            Ok(math::sqrt(c.c2) * math::sqrt((1.0 + log_p) / math::sqrt(n_f)))
        }
        Algorithm::HcEll2 => {
            let r = rho(params.beta_sparsity.ok_or(Error::InvalidParam {
                name: "beta_sparsity",
                reason: "HC comparisons need a sparsity index",
            })?)?;
            Ok(r * 2.0 * log_p / math::sqrt(n_f))
        }
        _ => unreachable!("ball_radius is only called for the l2 family"),
    }
}

/// The closed-form `cos theta_lim` for a mixed pair, written directly in the
/// threshold constants. Agrees with the radii ratio by construction; both
/// routes are exposed so they can be cross-checked.
pub fn cos_theta_closed_form(
    plane: Algorithm,
    ball: Algorithm,
    n: usize,
    p: usize,
    params: &GeometryParams,
) -> Result<f64, Error> {
    let n_f = n as f64;
    let p_f = p as f64;
    let log_p = math::ln(p_f);
    let log_ep = 1.0 + log_p;
    let c = ThresholdConstants::new(p)?;
    let beta = params.beta_sparsity;
    match (plane, ball) {
        (Algorithm::Sum, Algorithm::Ell2) => {
            Ok(c.c_u / math::sqrt(c.c2) * math::sqrt(log_p / (log_ep * math::sqrt(n_f))))
        }
        (Algorithm::HcSum, Algorithm::Ell2) => {
            let r = rho(beta.ok_or(Error::InvalidParam {
                name: "beta_sparsity",
                reason: "HC comparisons need a sparsity index",
            })?)?;
            Ok(math::sqrt(2.0 * r / c.c2) * math::sqrt(log_p / (log_ep * math::sqrt(n_f))))
        }
        (Algorithm::Fdr, Algorithm::Ell2) => {
            let lam = math::sqrt(params.zeta)
                * (1.0 + math::sqrt(2.0 * math::ln(params.nu * p_f / params.k_hat as f64)));
            Ok(lam / (math::sqrt(c.c2) * math::powf(n_f, 0.25) * math::sqrt(log_ep)))
        }
        (Algorithm::Sum, Algorithm::HcEll2) => {
            let r = rho(beta.ok_or(Error::InvalidParam {
                name: "beta_sparsity",
                reason: "HC comparisons need a sparsity index",
            })?)?;
            Ok(c.c_u / (2.0 * r * math::sqrt(log_p)))
        }
        (Algorithm::HcSum, Algorithm::HcEll2) => {
            let r = rho(beta.ok_or(Error::InvalidParam {
                name: "beta_sparsity",
                reason: "HC comparisons need a sparsity index",
            })?)?;
            Ok(1.0 / math::sqrt(2.0 * r * log_p))
        }
        (Algorithm::Fdr, Algorithm::HcEll2) => {
            let r = rho(beta.ok_or(Error::InvalidParam {
                name: "beta_sparsity",
                reason: "HC comparisons need a sparsity index",
            })?)?;
            let lam = math::sqrt(params.zeta)
                * (1.0 + math::sqrt(2.0 * math::ln(params.nu * p_f / params.k_hat as f64)));
            Ok(lam / (2.0 * r * log_p))
        }
        _ => Err(Error::UndefinedComparison { a: plane, b: ball }),
    }
}

/// Sufficient cap-existence conditions for mixed pairs, stated at the
/// canonical parameters `nu = e`, `zeta -> 1`, `k_hat = 1` for the
/// penalized FDR member.
pub fn cap_predicate(
    plane: Algorithm,
    ball: Algorithm,
    n: usize,
    p: usize,
    beta_sparsity: Option<f64>,
) -> Result<bool, Error> {
    let c = ThresholdConstants::new(p)?;
    let n_f = n as f64;
    let log_p = math::ln(p as f64);
    match (plane, ball) {
        (Algorithm::Sum, Algorithm::Ell2) => Ok(n_f >= math::powf(c.c_u, 4.0) / (c.c2 * c.c2)),
        (Algorithm::HcSum, Algorithm::Ell2) => Ok(true),
        (Algorithm::Fdr, Algorithm::Ell2) => Ok(p >= 11),
        (Algorithm::Sum, Algorithm::HcEll2) => {
            let r = rho(beta_sparsity.ok_or(Error::InvalidParam {
                name: "beta_sparsity",
                reason: "HC comparisons need a sparsity index",
            })?)?;
            Ok(log_p >= c.c_u * c.c_u / (4.0 * r * r))
        }
        (Algorithm::HcSum, Algorithm::HcEll2) => {
            let r = rho(beta_sparsity.ok_or(Error::InvalidParam {
                name: "beta_sparsity",
                reason: "HC comparisons need a sparsity index",
            })?)?;
            Ok(log_p >= 1.0 / (2.0 * r))
        }
        (Algorithm::Fdr, Algorithm::HcEll2) => {
            let r = rho(beta_sparsity.ok_or(Error::InvalidParam {
                name: "beta_sparsity",
                reason: "HC comparisons need a sparsity index",
            })?)?;
            Ok(log_p >= (1.0 + 2.0 * r + math::sqrt(8.0 * r * r + 4.0 * r + 1.0)) / (4.0 * r * r))
        }
        _ => Err(Error::UndefinedComparison { a: plane, b: ball }),
    }
}

/// Compare two selectors geometrically.
///
/// Defined pairs: any sum-family member against any l2-family member (cap
/// construction), the two l2-family members against each other, and
/// sum-family members pairwise (threshold ratios). l1 comparisons are
/// undefined because its boundary has no closed form.
pub fn geometry_compare(
    a: Algorithm,
    b: Algorithm,
    n: usize,
    p: usize,
    params: &GeometryParams,
) -> Result<GeometryReport, Error> {
    if n == 0 {
        return Err(Error::DimensionTooSmall {
            what: "n",
            min: 1,
            got: 0,
        });
    }
    if p < 2 {
        return Err(Error::DimensionTooSmall {
            what: "p",
            min: 2,
            got: p,
        });
    }
    if a == Algorithm::Ell1 || b == Algorithm::Ell1 || a == b {
        return Err(Error::UndefinedComparison { a, b });
    }
    let theta_v = match &params.v {
        Some(v) => Some(vector_angle(v)?),
        None => None,
    };

    if a.is_sum_family() && b.is_ell2_family() {
        let dist = plane_distance(a, n, p, params)?;
        let r = ball_radius(b, n, p, params)?;
        let ratio = dist / r;
        let cap_exists = ratio <= 1.0;
        let theta_lim = math::acos(ratio.min(1.0));
        let preferred = if !cap_exists {
            Some(b)
        } else {
            theta_v.map(|tv| if tv <= theta_lim { a } else { b })
        };
        return Ok(GeometryReport {
            pair: (a, b),
            r,
            h: r - dist,
            theta_lim,
            theta_v,
            cap_exists,
            ratio,
            preferred,
        });
    }
    if a.is_ell2_family() && b.is_sum_family() {
        // Normalize so the plane is first, then swap the preference back.
        let mut report = geometry_compare(b, a, n, p, params)?;
        report.pair = (a, b);
        return Ok(report);
    }

    // Same-family pairs compare scalar thresholds.
    let (ta, tb) = if a.is_sum_family() {
        (
            plane_distance(a, n, p, params)?,
            plane_distance(b, n, p, params)?,
        )
    } else {
        (ball_radius(a, n, p, params)?, ball_radius(b, n, p, params)?)
    };
    let ratio = ta / tb;
    Ok(GeometryReport {
        pair: (a, b),
        r: tb,
        h: tb - ta,
        theta_lim: 0.0,
        theta_v,
        cap_exists: ratio <= 1.0,
        ratio,
        preferred: if ratio < 1.0 {
            Some(a)
        } else if ratio > 1.0 {
            Some(b)
        } else {
            None
        },
    })
}
