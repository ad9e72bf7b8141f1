//! Loss metrics, detection boundaries, and the SVD breakdown limit.
//!
//! The detection boundary `beta_crit` of an algorithm is the smallest
//! coordinate magnitude `|theta u_i|` it selects with probability tending to
//! one. The sum-family boundaries scale with `1 / ||v||_1`, the l2-family
//! ones with powers of `log p / sqrt(n)`; the l1 boundary is only available
//! through an implicit equation solved here by bisection.

use crate::error::Error;
use crate::math;
use crate::special::erf;
use crate::stats::ThresholdConstants;
use crate::Algorithm;
use alloc::vec::Vec;

/// Sign-aligned squared l2 estimation error, `||u - sign(<u, u_hat>) u_hat||^2`.
///
/// Global sign flips of either argument leave it unchanged; `sign(0)` counts
/// as positive. Bounded by 2 for unit-norm arguments, attained at orthogonal
/// pairs.
pub fn l2_loss(u: &[f64], u_hat: &[f64]) -> f64 {
    assert_eq!(u.len(), u_hat.len(), "loss needs equal-length vectors");
    let inner = math::dot(u, u_hat);
    let sign = if inner < 0.0 { -1.0 } else { 1.0 };
    u.iter()
        .zip(u_hat)
        .map(|(a, b)| {
            let d = a - sign * b;
            d * d
        })
        .sum()
}

/// Support recovery metrics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportMetrics {
    /// Symmetric-difference cardinality.
    pub hamming: usize,
    /// `|I and I_hat| / |I|`; see `tpr_degenerate` when `I` is empty.
    pub tpr: f64,
    /// `|I_hat minus I| / |I_hat|`, 0 when nothing was selected.
    pub fdr: f64,
    /// Set when `I` was empty and the TPR convention (1 for an empty
    /// selection, 0 otherwise) was applied.
    pub tpr_degenerate: bool,
}

/// Hamming distance, true positive rate and false discovery rate between a
/// true support and a selected set. Both sets are 0-based index sets in
/// `0..p`; duplicates are ignored.
pub fn support_metrics(
    truth: &[usize],
    selected: &[usize],
    p: usize,
) -> Result<SupportMetrics, Error> {
    let mut in_truth = alloc::vec![false; p];
    let mut in_selected = alloc::vec![false; p];
    for &i in truth {
        if i >= p {
            return Err(Error::IndexOutOfRange { index: i, bound: p });
        }
        in_truth[i] = true;
    }
    for &i in selected {
        if i >= p {
            return Err(Error::IndexOutOfRange { index: i, bound: p });
        }
        in_selected[i] = true;
    }
    let truth_n = in_truth.iter().filter(|b| **b).count();
    let selected_n = in_selected.iter().filter(|b| **b).count();
    let hit = (0..p).filter(|&i| in_truth[i] && in_selected[i]).count();
    let hamming = truth_n + selected_n - 2 * hit;
    let (tpr, tpr_degenerate) = if truth_n > 0 {
        (hit as f64 / truth_n as f64, false)
    } else {
        (if selected_n == 0 { 1.0 } else { 0.0 }, true)
    };
    let fdr = if selected_n > 0 {
        (selected_n - hit) as f64 / selected_n as f64
    } else {
        0.0
    };
    Ok(SupportMetrics {
        hamming,
        tpr,
        fdr,
        tpr_degenerate,
    })
}

/// The Higher Criticism detection boundary exponent.
///
/// `beta - 1/2` on (1/2, 3/4] and `(1 - sqrt(1 - beta))^2` on [3/4, 1); the
/// two branches agree at 3/4.
pub fn rho(beta: f64) -> Result<f64, Error> {
    if !(beta > 0.5 && beta < 1.0) {
        return Err(Error::InvalidParam {
            name: "beta",
            reason: "sparsity index must lie in (1/2, 1)",
        });
    }
    Ok(if beta < 0.75 {
        beta - 0.5
    } else {
        let t = 1.0 - math::sqrt(1.0 - beta);
        t * t
    })
}

/// Asymptotic squared overlap `|<u_hat, u>|^2` of the plain SVD estimate,
/// as a function of the aspect ratio `c = p / n` and eigen-SNR.
///
/// Zero at and below the breakdown point `theta / sigma = c^{1/4}`.
pub fn svd_overlap_limit(theta: f64, sigma: f64, c: f64) -> Result<f64, Error> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidParam {
            name: "c",
            reason: "aspect ratio p/n must be positive",
        });
    }
    if !(sigma > 0.0) || !(theta >= 0.0) {
        return Err(Error::InvalidParam {
            name: "theta/sigma",
            reason: "needs theta >= 0 and sigma > 0",
        });
    }
    let phi = theta / sigma;
    let phi2 = phi * phi;
    if phi2 * phi2 < c {
        return Ok(0.0);
    }
    Ok((1.0 - c * (1.0 + phi2) / (phi2 * (c + phi2))).max(0.0))
}

/// Expansion limit for the l1 boundary bracket.
const T_ELL1_BRACKET_LIMIT: f64 = 1e6;
const T_ELL1_RESIDUAL_TOL: f64 = 1e-10;

/// Expected l1 row statistic at coordinate size `t` (noise scale 1),
/// `g(t) = (1/n) sqrt(2/pi) [sum_k exp(-a_k^2) + sqrt(pi) sum_k a_k erf(a_k)]`
/// with `a_k = sqrt(n) t v_k / sqrt(2)`. Increasing in t, `g(0) = sqrt(2/pi)`.
pub fn ell1_mean(t: f64, n: usize, v: &[f64]) -> f64 {
    let sqrt_n = math::sqrt(n as f64);
    let mut acc = 0.0;
    for &vk in v {
        let a = sqrt_n * t * vk / math::SQRT_2;
        acc += math::exp(-a * a) + math::sqrt(math::PI) * a * erf(a);
    }
    math::sqrt(2.0 / math::PI) * acc / n as f64
}

/// Solve the implicit l1 boundary equation
/// `g(t) = sqrt(2/pi) + C_1 log(ep) / sqrt(n)` for `t > 0` by bracketed
/// bisection to a residual of 1e-10.
pub fn solve_t_ell1(n: usize, p: usize, v: &[f64]) -> Result<f64, Error> {
    if n == 0 || v.is_empty() {
        return Err(Error::DimensionTooSmall {
            what: "n",
            min: 1,
            got: 0,
        });
    }
    if v.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: v.len(),
        });
    }
    let norm = math::norm2(v);
    if math::abs(norm - 1.0) > 1e-9 {
        return Err(Error::NonUnitNorm { what: "v", norm });
    }
    let constants = ThresholdConstants::new(p)?;
    let target = math::sqrt(2.0 / math::PI)
        + constants.c1 * (1.0 + math::ln(p as f64)) / math::sqrt(n as f64);

    // g(0) = sqrt(2/pi) < target, and g grows linearly for large t, so a
    // root exists; expand the bracket geometrically.
    let mut hi = 1.0;
    while ell1_mean(hi, n, v) < target {
        hi *= 2.0;
        if hi > T_ELL1_BRACKET_LIMIT {
            return Err(Error::BracketExpansion {
                limit: T_ELL1_BRACKET_LIMIT,
            });
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let g = ell1_mean(mid, n, v);
        if math::abs(g - target) <= T_ELL1_RESIDUAL_TOL {
            return Ok(mid);
        }
        if g < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Inputs for one detection boundary evaluation.
#[derive(Debug, Clone)]
pub struct BoundarySpec {
    pub algorithm: Algorithm,
    pub n: usize,
    pub p: usize,
    pub sigma: f64,
    /// Unit right singular vector; needed for the sum family and l1.
    pub v: Option<Vec<f64>>,
    /// Sparsity index in (1/2, 1); needed for the HC variants.
    pub beta_sparsity: Option<f64>,
    /// Detected model size; needed for the penalized FDR boundary.
    pub k_hat: usize,
    pub zeta: f64,
    pub nu: f64,
}

impl BoundarySpec {
    pub fn new(algorithm: Algorithm, n: usize, p: usize, sigma: f64) -> Self {
        BoundarySpec {
            algorithm,
            n,
            p,
            sigma,
            v: None,
            beta_sparsity: None,
            k_hat: 1,
            zeta: 1.02,
            nu: math::E * math::E,
        }
    }

    pub fn with_v(mut self, v: Vec<f64>) -> Self {
        self.v = Some(v);
        self
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta_sparsity = Some(beta);
        self
    }

    /// Derive the sparsity index from a sparsity level s via
    /// `beta = 1 - log s / log p`, clamped into (1/2, 1).
    pub fn with_sparsity(mut self, s: usize) -> Self {
        let p_f = self.p as f64;
        let raw = 1.0 - math::ln(s.max(1) as f64) / math::ln(p_f);
        self.beta_sparsity = Some(raw.clamp(0.5 + 1e-6, 1.0 - 1e-6));
        self
    }

    pub fn with_k_hat(mut self, k_hat: usize) -> Self {
        self.k_hat = k_hat;
        self
    }

    pub fn with_fdr_params(mut self, zeta: f64, nu: f64) -> Self {
        self.zeta = zeta;
        self.nu = nu;
        self
    }

    fn v_ref(&self) -> Result<&[f64], Error> {
        self.v.as_deref().ok_or(Error::InvalidParam {
            name: "v",
            reason: "this boundary depends on v; supply one",
        })
    }

    fn beta(&self) -> Result<f64, Error> {
        self.beta_sparsity.ok_or(Error::InvalidParam {
            name: "beta_sparsity",
            reason: "HC boundaries need a sparsity index in (1/2, 1)",
        })
    }
}

/// Sum-family boundaries require an equisigned v, for which
/// `|sum_k v_k| = ||v||_1 > 0`.
fn equisigned_l1(v: &[f64]) -> Result<f64, Error> {
    if !math::is_equisigned(v) {
        return Err(Error::NotEquisigned);
    }
    let l1 = math::norm1(v);
    if l1 == 0.0 {
        return Err(Error::ZeroNorm { what: "v" });
    }
    Ok(l1)
}

/// Smallest detectable coordinate magnitude for the given algorithm.
pub fn beta_crit(spec: &BoundarySpec) -> Result<f64, Error> {
    if spec.p < 2 {
        return Err(Error::DimensionTooSmall {
            what: "p",
            min: 2,
            got: spec.p,
        });
    }
    if !(spec.sigma > 0.0 && spec.sigma.is_finite()) {
        return Err(Error::InvalidParam {
            name: "sigma",
            reason: "boundaries need a positive finite noise scale",
        });
    }
    let n = spec.n as f64;
    let p = spec.p as f64;
    let log_p = math::ln(p);
    let sigma = spec.sigma;
    match spec.algorithm {
        Algorithm::Sum => {
            let c = ThresholdConstants::new(spec.p)?;
            let l1 = equisigned_l1(spec.v_ref()?)?;
            Ok(sigma * c.c_u * math::sqrt(log_p) / l1)
        }
        Algorithm::Ell2 => {
            let c = ThresholdConstants::new(spec.p)?;
            Ok(sigma * math::sqrt(c.c2) * math::sqrt((1.0 + log_p) / math::sqrt(n)))
        }
        Algorithm::Ell1 => Ok(sigma * solve_t_ell1(spec.n, spec.p, spec.v_ref()?)?),
        Algorithm::HcSum => {
            let l1 = equisigned_l1(spec.v_ref()?)?;
            let r = rho(spec.beta()?)?;
            Ok(sigma * math::sqrt(r) * math::sqrt(2.0 * log_p) / l1)
        }
        Algorithm::HcEll2 => {
            let r = rho(spec.beta()?)?;
            Ok(sigma * r * 2.0 * log_p / math::sqrt(n))
        }
        Algorithm::Fdr => {
            if spec.k_hat == 0 || spec.k_hat > spec.p {
                return Err(Error::InvalidParam {
                    name: "k_hat",
                    reason: "needs 1 <= k_hat <= p",
                });
            }
            if !(spec.zeta > 1.0) || !(spec.nu >= math::E) {
                return Err(Error::InvalidParam {
                    name: "zeta/nu",
                    reason: "needs zeta > 1 and nu >= e",
                });
            }
            let l1 = equisigned_l1(spec.v_ref()?)?;
            let lam = math::sqrt(spec.zeta)
                * (1.0 + math::sqrt(2.0 * math::ln(spec.nu * p / spec.k_hat as f64)));
            Ok(sigma * lam / l1)
        }
    }
}
