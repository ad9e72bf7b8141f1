//! FWER-controlled coordinate selection and the shared second stage.
//!
//! Selection computes one row statistic per row of `X` and keeps the rows at
//! or above the FWER threshold. The second stage runs a rank-1 SVD on the
//! selected rows and embeds the left factor back into R^p, zero off the
//! selected set. Both stages are O(pn) plus the SVD iterations.

use crate::error::Error;
use crate::model::DataMatrix;
use crate::stats::{fwer_threshold, row_statistic, StatKind, SumVariant, ThresholdSpec};
use crate::svd::rank1_svd;
use crate::Algorithm;
use alloc::vec;
use alloc::vec::Vec;

/// Outcome of a coordinate selection stage.
#[derive(Debug, Clone)]
pub struct SelectionResult {
    /// Selected row indices, ascending.
    pub selected: Vec<usize>,
    /// The per-row statistic the selector thresholded. For the FWER
    /// selectors this is the Table-style row statistic; for the penalized
    /// FDR selector it is the standardized row sum.
    pub stats: Vec<f64>,
    /// The threshold the selector applied, in the units of `stats`. Higher
    /// Criticism selections carry the HC threshold `sqrt(2 log log p)`.
    pub threshold: f64,
    /// Which selector produced this result.
    pub kind: Algorithm,
}

/// Two-stage estimate of the signal triple.
#[derive(Debug, Clone)]
pub struct Estimate {
    /// Estimated left singular vector in R^p, zero off the selected set,
    /// unit norm unless `empty` is set (then all zero).
    pub u_hat: Vec<f64>,
    /// Estimated right singular vector, unit norm.
    pub v_hat: Vec<f64>,
    /// Estimated signal strength (top singular value of the submatrix).
    pub theta_hat: f64,
    /// Set when nothing was selected; the estimate is then the flagged zero
    /// vector rather than a silent fallback.
    pub empty: bool,
    pub selection: SelectionResult,
}

/// Algorithm-1 coordinate selection: keep every row whose statistic reaches
/// the FWER threshold (ties selected).
pub fn select_fwer(
    x: &DataMatrix,
    kind: StatKind,
    sigma: f64,
    variant: SumVariant,
) -> Result<SelectionResult, Error> {
    let spec = ThresholdSpec::new(kind, x.cols(), x.rows(), sigma).with_variant(variant);
    let threshold = fwer_threshold(&spec)?;
    let mut stats = Vec::with_capacity(x.rows());
    for row in x.row_iter() {
        stats.push(row_statistic(kind, row)?);
    }
    let selected = (0..x.rows()).filter(|&i| stats[i] >= threshold).collect();
    Ok(SelectionResult {
        selected,
        stats,
        threshold,
        kind: match kind {
            StatKind::Sum => Algorithm::Sum,
            StatKind::Ell1 => Algorithm::Ell1,
            StatKind::Ell2 => Algorithm::Ell2,
        },
    })
}

/// Second stage: rank-1 SVD of the selected rows, embedded into R^p.
pub fn estimate_two_stage(x: &DataMatrix, selection: &SelectionResult) -> Result<Estimate, Error> {
    let p = x.rows();
    if selection.selected.is_empty() {
        return Ok(Estimate {
            u_hat: vec![0.0; p],
            v_hat: vec![0.0; x.cols()],
            theta_hat: 0.0,
            empty: true,
            selection: selection.clone(),
        });
    }
    let sub = x.select_rows(&selection.selected)?;
    let svd = rank1_svd(&sub);
    let mut u_hat = vec![0.0; p];
    for (slot, &row) in selection.selected.iter().enumerate() {
        u_hat[row] = svd.u_hat[slot];
    }
    Ok(Estimate {
        u_hat,
        v_hat: svd.v_hat,
        theta_hat: svd.sigma1,
        empty: false,
        selection: selection.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{generate_data, make_u, make_v, SignalModel, USpec, VProfile};
    use crate::theory::l2_loss;

    fn zero_matrix(p: usize, n: usize) -> DataMatrix {
        DataMatrix::from_vec(p, n, vec![0.0; p * n]).unwrap()
    }

    #[test]
    fn zero_matrix_selects_nothing() {
        let x = zero_matrix(8, 10);
        for kind in [StatKind::Sum, StatKind::Ell1, StatKind::Ell2] {
            let sel = select_fwer(&x, kind, 1.0, SumVariant::default()).unwrap();
            assert!(sel.selected.is_empty());
            assert!(sel.stats.iter().all(|&t| t == 0.0));
        }
    }

    #[test]
    fn noiseless_signal_selects_exact_support() {
        let p = 40;
        let n = 100;
        let u = make_u(
            p,
            &USpec::Explicit {
                support: vec![3, 17, 29],
                values: vec![0.6, -0.64, 0.48],
            },
        )
        .unwrap();
        let v = make_v(&VProfile::Uniform { n }).unwrap().vector;
        // Large theta so every support row statistic clears the threshold.
        let model = SignalModel::new(50.0, u, v, 0.0).unwrap();
        let x = generate_data(&model, 0);
        for kind in [StatKind::Sum, StatKind::Ell1, StatKind::Ell2] {
            let sel = select_fwer(&x, kind, 1.0, SumVariant::default()).unwrap();
            assert_eq!(sel.selected, vec![3, 17, 29], "{kind:?}");
        }
    }

    #[test]
    fn estimate_on_full_selection_equals_plain_svd() {
        let u = make_u(6, &USpec::WorstCase { m: 2, r: 0.3 }).unwrap();
        let v = make_v(&VProfile::RiseFall { n: 30 }).unwrap().vector;
        let model = SignalModel::new(3.0, u, v, 0.5).unwrap();
        let x = generate_data(&model, 5);
        let all = SelectionResult {
            selected: (0..6).collect(),
            stats: vec![0.0; 6],
            threshold: 0.0,
            kind: Algorithm::Sum,
        };
        let est = estimate_two_stage(&x, &all).unwrap();
        let direct = rank1_svd(&x);
        assert!((est.theta_hat - direct.sigma1).abs() <= 1e-12);
        for i in 0..6 {
            assert!((est.u_hat[i] - direct.u_hat[i]).abs() <= 1e-12);
        }
    }

    #[test]
    fn noiseless_two_stage_recovers_signal() {
        let p = 25;
        let n = 60;
        let u = make_u(
            p,
            &USpec::Explicit {
                support: vec![2, 9],
                values: vec![0.8, 0.6],
            },
        )
        .unwrap();
        let v = make_v(&VProfile::RiseFall { n }).unwrap().vector;
        let theta = 7.0;
        let model = SignalModel::new(theta, u.clone(), v.clone(), 0.0).unwrap();
        let x = generate_data(&model, 0);
        let sel = select_fwer(&x, StatKind::Sum, 1e-6, SumVariant::default()).unwrap();
        assert_eq!(sel.selected, vec![2, 9]);
        let est = estimate_two_stage(&x, &sel).unwrap();
        assert!((est.theta_hat - theta).abs() <= 1e-8);
        assert!(l2_loss(&u, &est.u_hat) <= 1e-16);
        for k in 0..n {
            assert!((est.v_hat[k].abs() - v[k].abs()).abs() <= 1e-8);
        }
    }

    #[test]
    fn empty_selection_yields_flagged_zero_estimate() {
        let x = zero_matrix(5, 8);
        let sel = select_fwer(&x, StatKind::Sum, 1.0, SumVariant::default()).unwrap();
        let est = estimate_two_stage(&x, &sel).unwrap();
        assert!(est.empty);
        assert!(est.u_hat.iter().all(|&c| c == 0.0));
        // The loss against any true unit u is then exactly its norm.
        let u = make_u(
            5,
            &USpec::Explicit {
                support: vec![0],
                values: vec![1.0],
            },
        )
        .unwrap();
        assert!((l2_loss(&u, &est.u_hat) - 1.0).abs() <= 1e-15);
    }

    #[test]
    fn selection_commutes_with_row_permutation() {
        let u = make_u(12, &USpec::WorstCase { m: 3, r: 0.4 }).unwrap();
        let v = make_v(&VProfile::Uniform { n: 40 }).unwrap().vector;
        let model = SignalModel::new(6.0, u, v, 1.0).unwrap();
        let x = generate_data(&model, 11);
        let (p, n) = (x.rows(), x.cols());
        let shift = 5;
        let mut rotated = vec![0.0; p * n];
        for i in 0..p {
            rotated[((i + shift) % p) * n..((i + shift) % p + 1) * n].copy_from_slice(x.row(i));
        }
        let xr = DataMatrix::from_vec(p, n, rotated).unwrap();
        for kind in [StatKind::Sum, StatKind::Ell1, StatKind::Ell2] {
            let a = select_fwer(&x, kind, 1.0, SumVariant::default()).unwrap();
            let b = select_fwer(&xr, kind, 1.0, SumVariant::default()).unwrap();
            let mut mapped: Vec<usize> = a.selected.iter().map(|&i| (i + shift) % p).collect();
            mapped.sort_unstable();
            assert_eq!(mapped, b.selected, "{kind:?}");
        }
    }

    #[test]
    fn selection_is_scale_covariant() {
        let u = make_u(10, &USpec::WorstCase { m: 2, r: 0.5 }).unwrap();
        let v = make_v(&VProfile::RiseFall { n: 50 }).unwrap().vector;
        let model = SignalModel::new(2.0, u, v, 1.0).unwrap();
        let x = generate_data(&model, 3);
        let c = 3.7;
        let scaled =
            DataMatrix::from_vec(x.rows(), x.cols(), x.data().iter().map(|e| c * e).collect())
                .unwrap();
        for kind in [StatKind::Sum, StatKind::Ell1, StatKind::Ell2] {
            let a = select_fwer(&x, kind, 1.0, SumVariant::default()).unwrap();
            let b = select_fwer(&scaled, kind, c, SumVariant::default()).unwrap();
            assert_eq!(a.selected, b.selected, "{kind:?}");
        }
    }

    #[test]
    fn sigma_must_be_positive() {
        let x = zero_matrix(4, 4);
        assert!(select_fwer(&x, StatKind::Sum, 0.0, SumVariant::default()).is_err());
        assert!(select_fwer(&x, StatKind::Sum, -2.0, SumVariant::default()).is_err());
    }
}
