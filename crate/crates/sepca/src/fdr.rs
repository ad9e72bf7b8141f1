//! FDR-controlled coordinate selection: Higher Criticism on row statistics
//! and penalized least squares hard thresholding.
//!
//! Both selectors consume the same row reductions as the FWER path: the row
//! sum `y_i = sum_k X[i][k]`, standardized so `y_i / sigma` is N(0,1) under
//! the null, or the scaled sum of squares `n T_i / sigma^2`, chi-square with
//! n degrees of freedom under the null. Either feeds the shared second stage
//! through a [`SelectionResult`].

use crate::error::Error;
use crate::fwer::SelectionResult;
use crate::math;
use crate::model::DataMatrix;
use crate::special::{chi2_sf, normal_two_sided_p};
use crate::stats::StatKind;
use crate::Algorithm;
use alloc::vec::Vec;

/// Smallest p for which the HC threshold `sqrt(2 log log p)` is a positive
/// real.
pub const HC_MIN_P: usize = 16;

/// How the per-rank HC exceedances map to a selected set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HcRule {
    /// Select every coordinate whose sorted rank is at most the largest rank
    /// exceeding the threshold. Monotone in the p-values; the default.
    #[default]
    DownwardClosed,
    /// Select exactly the ranks whose HC value exceeds the threshold.
    PerRank,
}

/// Higher Criticism evaluation over one vector of p-values.
#[derive(Debug, Clone)]
pub struct HcResult {
    /// Input p-values in their original order.
    pub pvalues: Vec<f64>,
    /// `sorted_index[rank]` is the original index of the rank-th smallest
    /// p-value (ties broken by original index).
    pub sorted_index: Vec<usize>,
    /// Per-sorted-rank HC values; `None` outside the admissible p-value
    /// range `[1/p, 1/2]`.
    pub hc_values: Vec<Option<f64>>,
    /// Largest admissible HC value, `-inf` when no rank is admissible.
    pub hc_max: f64,
    /// The selection threshold `sqrt(2 log log p)`.
    pub threshold: f64,
    /// Selected original indices, ascending.
    pub selected: Vec<usize>,
    pub rule: HcRule,
}

impl HcResult {
    /// Repackage for the shared second stage.
    pub fn to_selection(&self, kind: Algorithm) -> SelectionResult {
        SelectionResult {
            selected: self.selected.clone(),
            stats: self.pvalues.clone(),
            threshold: self.threshold,
            kind,
        }
    }
}

/// Per-row p-values against the noise-only null.
///
/// `Sum`: two-sided Gaussian tail of the standardized row sum.
/// `Ell2`: chi-square survival of `n T_i / sigma^2` with n degrees of
/// freedom. `Ell1` has no p-value route here.
pub fn pvalues(x: &DataMatrix, kind: StatKind, sigma: f64) -> Result<Vec<f64>, Error> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidParam {
            name: "sigma",
            reason: "p-values need a positive finite noise scale",
        });
    }
    let n = x.cols();
    let mut out = Vec::with_capacity(x.rows());
    match kind {
        StatKind::Sum => {
            for row in x.row_iter() {
                let y: f64 = row.iter().sum();
                out.push(normal_two_sided_p(y / sigma));
            }
        }
        StatKind::Ell2 => {
            for row in x.row_iter() {
                let t: f64 = row.iter().map(|e| e * e).sum();
                out.push(chi2_sf(n as f64 * t / (sigma * sigma), n as u32)?);
            }
        }
        StatKind::Ell1 => {
            return Err(Error::InvalidParam {
                name: "kind",
                reason: "no p-value route for the l1 statistic",
            })
        }
    }
    Ok(out)
}

/// Higher Criticism selection over p-values.
///
/// `HC[i] = sqrt(p) (i/p - p_(i)) / sqrt(p_(i) (1 - p_(i)))` is evaluated at
/// every sorted rank whose p-value lies in `[1/p, 1/2]`, and coordinates are
/// selected by comparing against `sqrt(2 log log p)` under the given rule.
///
/// Ranks with a p-value below `1/p` sit outside the evaluated band (they
/// carry no HC value and do not enter `hc_max`), but they always qualify for
/// selection: the HC expression diverges as `p_(i) -> 0`, and treating them
/// otherwise would let a coordinate drop out of the selection when its
/// p-value shrinks.
pub fn hc_select(pvals: &[f64], rule: HcRule) -> Result<HcResult, Error> {
    let p = pvals.len();
    if p < HC_MIN_P {
        return Err(Error::DimensionTooSmall {
            what: "p (Higher Criticism)",
            min: HC_MIN_P,
            got: p,
        });
    }
    if pvals.iter().any(|q| !(*q >= 0.0 && *q <= 1.0)) {
        return Err(Error::InvalidParam {
            name: "pvalues",
            reason: "p-values must lie in [0, 1]",
        });
    }
    let p_f = p as f64;
    let threshold = math::sqrt(2.0 * math::ln(math::ln(p_f)));

    let mut sorted_index: Vec<usize> = (0..p).collect();
    sorted_index.sort_unstable_by(|&a, &b| pvals[a].total_cmp(&pvals[b]).then(a.cmp(&b)));

    let sqrt_p = math::sqrt(p_f);
    let mut hc_values: Vec<Option<f64>> = Vec::with_capacity(p);
    let mut hc_max = f64::NEG_INFINITY;
    let mut last_exceeding_rank: Option<usize> = None;
    let mut per_rank_hits: Vec<usize> = Vec::new();
    for (rank0, &orig) in sorted_index.iter().enumerate() {
        let q = pvals[orig];
        if q < 1.0 / p_f {
            // Below the evaluated band the statistic diverges; the rank
            // qualifies unconditionally.
            hc_values.push(None);
            last_exceeding_rank = Some(rank0);
            per_rank_hits.push(rank0);
            continue;
        }
        if q > 0.5 {
            hc_values.push(None);
            continue;
        }
        let i = (rank0 + 1) as f64;
        let hc = sqrt_p * (i / p_f - q) / math::sqrt(q * (1.0 - q));
        if hc > hc_max {
            hc_max = hc;
        }
        if hc > threshold {
            last_exceeding_rank = Some(rank0);
            per_rank_hits.push(rank0);
        }
        hc_values.push(Some(hc));
    }

    let mut selected: Vec<usize> = match rule {
        HcRule::DownwardClosed => match last_exceeding_rank {
            Some(last) => sorted_index[..=last].to_vec(),
            None => Vec::new(),
        },
        HcRule::PerRank => per_rank_hits.iter().map(|&r| sorted_index[r]).collect(),
    };
    selected.sort_unstable();

    Ok(HcResult {
        pvalues: pvals.to_vec(),
        sorted_index,
        hc_values,
        hc_max,
        threshold,
        selected,
        rule,
    })
}

/// The complexity penalty `pen(k) = xi1 * zeta * k * (1 + sqrt(2 log(nu p / k)))^2`
/// and its increments.
#[derive(Debug, Clone)]
pub struct FdrPenalty {
    pub p: usize,
    pub zeta: f64,
    pub nu: f64,
    /// Upper eigenvalue bound of the noise covariance; 1 for identity noise.
    pub xi1: f64,
}

impl FdrPenalty {
    /// Penalty value at k coordinates kept; `pen(0) = 0`, strictly
    /// increasing in k.
    pub fn pen(&self, k: usize) -> Result<f64, Error> {
        self.check_k(k)?;
        if k == 0 {
            return Ok(0.0);
        }
        let k_f = k as f64;
        let l = math::ln(self.nu * self.p as f64 / k_f);
        let root = 1.0 + math::sqrt(2.0 * l);
        Ok(self.xi1 * self.zeta * k_f * root * root)
    }

    /// Threshold increment `t_k = sqrt(pen(k) - pen(k-1))` for k >= 1.
    pub fn t(&self, k: usize) -> Result<f64, Error> {
        if k == 0 {
            return Err(Error::InvalidParam {
                name: "k",
                reason: "t_k is defined for k >= 1",
            });
        }
        Ok(math::sqrt(self.pen(k)? - self.pen(k - 1)?))
    }

    /// The closed form `lambda_{p,k} = sqrt(xi1 zeta) (1 + sqrt(2 log(nu p / k)))`
    /// that brackets `t_k` from above.
    pub fn lambda(&self, k: usize) -> Result<f64, Error> {
        self.check_k(k)?;
        if k == 0 {
            return Err(Error::InvalidParam {
                name: "k",
                reason: "lambda_{p,k} is defined for k >= 1",
            });
        }
        let l = math::ln(self.nu * self.p as f64 / k as f64);
        Ok(math::sqrt(self.xi1 * self.zeta) * (1.0 + math::sqrt(2.0 * l)))
    }

    fn check_k(&self, k: usize) -> Result<(), Error> {
        if k > self.p {
            return Err(Error::IndexOutOfRange {
                index: k,
                bound: self.p + 1,
            });
        }
        Ok(())
    }
}

/// Build the penalty after validating the parameter ranges.
pub fn fdr_penalty(p: usize, zeta: f64, nu: f64, xi1: f64) -> Result<FdrPenalty, Error> {
    if p == 0 {
        return Err(Error::DimensionTooSmall {
            what: "p",
            min: 1,
            got: 0,
        });
    }
    if !(zeta > 1.0 && zeta.is_finite()) {
        return Err(Error::InvalidParam {
            name: "zeta",
            reason: "penalty slack must satisfy zeta > 1",
        });
    }
    if !(nu >= math::E && nu.is_finite()) {
        return Err(Error::InvalidParam {
            name: "nu",
            reason: "nu must be at least e",
        });
    }
    if !(xi1 >= 1.0 && xi1.is_finite()) {
        return Err(Error::InvalidParam {
            name: "xi1",
            reason: "noise covariance bound must be at least 1",
        });
    }
    Ok(FdrPenalty { p, zeta, nu, xi1 })
}

/// Penalized least squares selection: `k_hat` minimizes
/// `sum_{i > k} |y|_(i)^2 + sigma^2 pen(k)` and the selected set is
/// `{i : |y_i| >= sigma t_{k_hat}}` (empty when `k_hat = 0`).
pub fn fdr_select(
    x: &DataMatrix,
    sigma: f64,
    penalty: &FdrPenalty,
) -> Result<SelectionResult, Error> {
    let p = x.rows();
    if penalty.p != p {
        return Err(Error::DimensionMismatch {
            expected: p,
            got: penalty.p,
        });
    }
    let y: Vec<f64> = x.row_iter().map(|row| row.iter().sum()).collect();
    let k_hat = fdr_k_hat(&y, sigma, penalty)?;
    let (selected, threshold) = if k_hat == 0 {
        (Vec::new(), f64::INFINITY)
    } else {
        let cut = sigma * penalty.t(k_hat)?;
        ((0..p).filter(|&i| math::abs(y[i]) >= cut).collect(), cut)
    };
    Ok(SelectionResult {
        selected,
        stats: y,
        threshold,
        kind: Algorithm::Fdr,
    })
}

/// The model-size argmin over k = 0..=p of the penalized residual objective.
/// Full scan; sorting plus suffix sums keep it at O(p log p). Ties in |y|
/// break by original index, ties in the objective by the smaller k.
pub fn fdr_k_hat(y: &[f64], sigma: f64, penalty: &FdrPenalty) -> Result<usize, Error> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidParam {
            name: "sigma",
            reason: "selection needs a positive finite noise scale",
        });
    }
    let p = y.len();
    if penalty.p != p {
        return Err(Error::DimensionMismatch {
            expected: p,
            got: penalty.p,
        });
    }
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_unstable_by(|&a, &b| math::abs(y[b]).total_cmp(&math::abs(y[a])).then(a.cmp(&b)));
    // objective_tail[k] = sum of |y|^2 over sorted positions k..p.
    let mut suffix = 0.0;
    let mut objective_tail: Vec<f64> = Vec::with_capacity(p + 1);
    objective_tail.push(0.0);
    for &idx in order.iter().rev() {
        suffix += y[idx] * y[idx];
        objective_tail.push(suffix);
    }
    objective_tail.reverse();

    let mut best_k = 0;
    let mut best = f64::INFINITY;
    for k in 0..=p {
        let obj = objective_tail[k] + sigma * sigma * penalty.pen(k)?;
        if obj < best {
            best = obj;
            best_k = k;
        }
    }
    Ok(best_k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DataMatrix;
    use crate::rng::GaussianSource;
    use alloc::vec;

    fn matrix_from_rows(rows: Vec<Vec<f64>>) -> DataMatrix {
        let p = rows.len();
        let n = rows[0].len();
        DataMatrix::from_vec(p, n, rows.into_iter().flatten().collect()).unwrap()
    }

    #[test]
    fn sum_pvalues_match_gaussian_tail() {
        // Row sums 0 and 1.96 sigma.
        let x = matrix_from_rows(vec![vec![0.0, 0.0, 0.0, 0.0], vec![0.49, 0.49, 0.49, 0.49]]);
        let pv = pvalues(&x, StatKind::Sum, 1.0).unwrap();
        assert_eq!(pv[0], 1.0);
        assert!((pv[1] - 0.05).abs() <= 1e-3);
    }

    #[test]
    fn ell2_pvalue_is_one_at_zero() {
        let x = matrix_from_rows(vec![vec![0.0; 6]]);
        let pv = pvalues(&x, StatKind::Ell2, 1.0).unwrap();
        assert_eq!(pv[0], 1.0);
        assert!(pvalues(&x, StatKind::Ell1, 1.0).is_err());
    }

    #[test]
    fn hc_zero_on_exact_uniform_grid() {
        // p_(i) = i/p exactly makes every admissible HC value zero.
        let p = 64;
        let pv: Vec<f64> = (1..=p).map(|i| i as f64 / p as f64).collect();
        let hc = hc_select(&pv, HcRule::DownwardClosed).unwrap();
        assert!(hc.selected.is_empty());
        for v in hc.hc_values.iter().flatten() {
            assert!(v.abs() <= 1e-12);
        }
        assert!(hc.hc_max <= 1e-12);
    }

    #[test]
    fn hc_flags_one_tiny_pvalue() {
        let p = 10_000;
        let mut pv: Vec<f64> = (1..=p).map(|i| (i as f64 - 0.5) / p as f64).collect();
        pv[137] = 1e-12;
        let hc = hc_select(&pv, HcRule::DownwardClosed).unwrap();
        assert!(hc.selected.contains(&137), "selected {:?}", hc.selected);
        // Its rank sits below the evaluated band, where the raw HC
        // expression would be enormous compared with the threshold.
        assert!(hc.hc_values[0].is_none());
        let raw = (p as f64).sqrt() * (1.0 / p as f64 - 1e-12) / 1e-12f64.sqrt();
        assert!(raw > 50.0 * hc.threshold);
        // Under the per-rank rule it is selected as well.
        let literal = hc_select(&pv, HcRule::PerRank).unwrap();
        assert!(literal.selected.contains(&137));
    }

    #[test]
    fn hc_requires_p16_and_valid_pvalues() {
        let pv = vec![0.5; 15];
        assert!(hc_select(&pv, HcRule::DownwardClosed).is_err());
        let mut bad = vec![0.5; 16];
        bad[3] = 1.5;
        assert!(hc_select(&bad, HcRule::DownwardClosed).is_err());
    }

    #[test]
    fn hc_handles_equal_and_extreme_pvalues() {
        // All equal inside the admissible band: no NaN anywhere.
        let pv = vec![0.3; 32];
        let hc = hc_select(&pv, HcRule::DownwardClosed).unwrap();
        assert!(hc.hc_values.iter().flatten().all(|v| v.is_finite()));
        // Exact zeros and ones fall outside the admissible band.
        let mut pv = vec![0.3; 32];
        pv[0] = 0.0;
        pv[1] = 1.0;
        let hc = hc_select(&pv, HcRule::DownwardClosed).unwrap();
        assert!(hc.hc_values[0].is_none());
        assert!(hc.hc_values[31].is_none());
    }

    #[test]
    fn hc_selection_is_permutation_invariant() {
        let mut g = GaussianSource::new(5);
        let p = 200;
        let pv: Vec<f64> = (0..p)
            .map(|i| if i < 4 { 1e-9 } else { g.uniform().max(1e-15) })
            .collect();
        let base = hc_select(&pv, HcRule::DownwardClosed).unwrap();
        let shift = 73;
        let rotated: Vec<f64> = (0..p).map(|i| pv[(i + shift) % p]).collect();
        let rot = hc_select(&rotated, HcRule::DownwardClosed).unwrap();
        let mut mapped: Vec<usize> = base.selected.iter().map(|&i| (i + p - shift) % p).collect();
        mapped.sort_unstable();
        assert_eq!(mapped, rot.selected);
    }

    #[test]
    fn hc_selection_monotone_under_pvalue_decrease() {
        let mut g = GaussianSource::new(17);
        let p = 300;
        let mut pv: Vec<f64> = (0..p)
            .map(|i| if i < 6 { 1e-8 } else { g.uniform().max(1e-15) })
            .collect();
        let before = hc_select(&pv, HcRule::DownwardClosed).unwrap();
        // Shrink one null p-value; the selected set must not shrink.
        pv[100] = pv[100].min(0.01);
        let after = hc_select(&pv, HcRule::DownwardClosed).unwrap();
        for idx in &before.selected {
            if *idx != 100 {
                assert!(after.selected.contains(idx));
            }
        }
        assert!(after.selected.len() >= before.selected.len());
    }

    #[test]
    fn per_rank_rule_is_a_subset_of_closure() {
        let mut g = GaussianSource::new(23);
        let p = 500;
        let pv: Vec<f64> = (0..p)
            .map(|i| {
                if i % 50 == 0 {
                    1e-7
                } else {
                    g.uniform().max(1e-15)
                }
            })
            .collect();
        let closed = hc_select(&pv, HcRule::DownwardClosed).unwrap();
        let literal = hc_select(&pv, HcRule::PerRank).unwrap();
        for idx in &literal.selected {
            assert!(closed.selected.contains(idx));
        }
    }

    #[test]
    fn penalty_basics() {
        let pen = fdr_penalty(100, 1.02, math::E * math::E, 1.0).unwrap();
        assert_eq!(pen.pen(0).unwrap(), 0.0);
        // t_1^2 = pen(1).
        let t1 = pen.t(1).unwrap();
        assert!((t1 * t1 - pen.pen(1).unwrap()).abs() <= 1e-12);
        // pen strictly increasing.
        let mut prev = 0.0;
        for k in 1..=100 {
            let cur = pen.pen(k).unwrap();
            assert!(cur > prev, "pen not increasing at k = {k}");
            prev = cur;
        }
        assert!(pen.pen(101).is_err());
        assert!(fdr_penalty(10, 1.0, 8.0, 1.0).is_err());
        assert!(fdr_penalty(10, 1.02, 2.0, 1.0).is_err());
        assert!(fdr_penalty(10, 1.02, 8.0, 0.5).is_err());
    }

    #[test]
    fn t_k_bracketed_by_lambda() {
        // lambda_{p,k} - 4 zeta b / lambda_{p,k} <= t_k <= lambda_{p,k}
        // with b = 1 for nu >= e^2.
        let zeta = 1.02;
        let pen = fdr_penalty(100, zeta, math::E * math::E, 1.0).unwrap();
        for k in 1..=100 {
            let t = pen.t(k).unwrap();
            let lam = pen.lambda(k).unwrap();
            assert!(t <= lam + 1e-12, "k = {k}: t {t} > lambda {lam}");
            assert!(
                lam - t <= 4.0 * zeta / lam + 1e-12,
                "k = {k}: gap {} bound {}",
                lam - t,
                4.0 * zeta / lam
            );
        }
    }

    #[test]
    fn zero_matrix_keeps_nothing() {
        let x = matrix_from_rows(vec![vec![0.0; 5]; 50]);
        let pen = fdr_penalty(50, 1.02, math::E * math::E, 1.0).unwrap();
        let sel = fdr_select(&x, 1.0, &pen).unwrap();
        assert!(sel.selected.is_empty());
    }

    #[test]
    fn one_huge_row_sum_selected() {
        let p = 50;
        let n = 4;
        let mut rows = vec![vec![0.0; n]; p];
        rows[7] = vec![25.0; n]; // row sum 100 sigma
        let x = matrix_from_rows(rows);
        let pen = fdr_penalty(p, 1.02, math::E * math::E, 1.0).unwrap();
        let sel = fdr_select(&x, 1.0, &pen).unwrap();
        assert_eq!(sel.selected, vec![7]);
        // k = 1 beats k = 0: the penalty is far below the saved residual.
        assert!(pen.pen(1).unwrap() < 1e4);
    }

    #[test]
    fn k_hat_matches_brute_force_on_random_instances() {
        let mut g = GaussianSource::new(404);
        for trial in 0..200 {
            let p = 3 + (trial % 62);
            let n = 3;
            let data: Vec<f64> = (0..p * n).map(|_| 2.0 * g.standard_normal()).collect();
            let x = DataMatrix::from_vec(p, n, data).unwrap();
            let pen = fdr_penalty(p, 1.02, math::E * math::E, 1.0).unwrap();
            let sigma = 0.8;

            // Oracle: evaluate the objective naively at every k.
            let y: Vec<f64> = x.row_iter().map(|r| r.iter().sum()).collect();
            let mut abs_sorted: Vec<f64> = y.iter().map(|v| math::abs(*v)).collect();
            abs_sorted.sort_unstable_by(|a, b| b.total_cmp(a));
            let mut best_k = 0usize;
            let mut best = f64::INFINITY;
            for k in 0..=p {
                let resid: f64 = abs_sorted[k..].iter().map(|v| v * v).sum();
                let obj = resid + sigma * sigma * pen.pen(k).unwrap();
                if obj < best {
                    best = obj;
                    best_k = k;
                }
            }
            assert_eq!(fdr_k_hat(&y, sigma, &pen).unwrap(), best_k, "trial {trial}");

            // The hard threshold keeps exactly the k_hat largest row sums
            // here (no ties in these draws).
            let sel = fdr_select(&x, sigma, &pen).unwrap();
            assert_eq!(sel.selected.len(), best_k, "trial {trial}");
        }
    }
}
