//! Property tests for the structural invariants: norms, symmetries,
//! permutation behavior, and monotonicity.

use proptest::prelude::*;
use sepca::rng::derive_seed;
use sepca::special::{chi2_sf, erf, erfinv};
use sepca::{hc_select, l2_loss, make_u, row_statistic, HcRule, StatKind, USpec};

fn unit_vector(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, len..=len).prop_filter_map("nonzero norm", |v| {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        (norm > 1e-6).then(|| v.into_iter().map(|x| x / norm).collect::<Vec<f64>>())
    })
}

proptest! {
    #[test]
    fn worst_case_u_is_always_unit_norm(
        p in 2usize..40,
        m_frac in 0.0f64..1.0,
        r in 0.0f64..0.999,
    ) {
        let m = 1 + ((p - 2) as f64 * m_frac) as usize;
        let u = make_u(p, &USpec::WorstCase { m, r }).unwrap();
        let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assert!((norm - 1.0).abs() <= 1e-12);
        prop_assert_eq!(u.len(), p);
        // Support is the first coordinate plus m small ones (unless r = 0).
        let nonzero = u.iter().filter(|x| **x != 0.0).count();
        if r > 0.0 {
            prop_assert_eq!(nonzero, m + 1);
        }
    }

    #[test]
    fn loss_is_sign_invariant_and_bounded(
        u in unit_vector(9),
        w in unit_vector(9),
    ) {
        let base = l2_loss(&u, &w);
        let neg_w: Vec<f64> = w.iter().map(|x| -x).collect();
        let neg_u: Vec<f64> = u.iter().map(|x| -x).collect();
        prop_assert!((l2_loss(&u, &neg_w) - base).abs() <= 1e-12);
        prop_assert!((l2_loss(&neg_u, &w) - base).abs() <= 1e-12);
        prop_assert!((0.0..=2.0 + 1e-12).contains(&base));
    }

    #[test]
    fn erf_roundtrip_and_oddness(y in -0.9999f64..0.9999) {
        let x = erfinv(y).unwrap();
        prop_assert!((erf(x) - y).abs() <= 1e-12);
        prop_assert!((erf(-x) + y).abs() <= 1e-12);
    }

    #[test]
    fn chi2_sf_bounded_and_monotone(
        x in 0.0f64..500.0,
        dx in 0.001f64..50.0,
        dof in 1u32..300,
    ) {
        let a = chi2_sf(x, dof).unwrap();
        let b = chi2_sf(x + dx, dof).unwrap();
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!(b <= a);
    }

    #[test]
    fn row_statistics_scale_correctly(
        row in prop::collection::vec(-100.0f64..100.0, 1..40),
        c in 0.01f64..50.0,
    ) {
        let scaled: Vec<f64> = row.iter().map(|x| c * x).collect();
        let sum = row_statistic(StatKind::Sum, &row).unwrap();
        let ell1 = row_statistic(StatKind::Ell1, &row).unwrap();
        let ell2 = row_statistic(StatKind::Ell2, &row).unwrap();
        prop_assert!((row_statistic(StatKind::Sum, &scaled).unwrap() - c * sum).abs() <= 1e-9 * (1.0 + c * sum));
        prop_assert!((row_statistic(StatKind::Ell1, &scaled).unwrap() - c * ell1).abs() <= 1e-9 * (1.0 + c * ell1));
        prop_assert!((row_statistic(StatKind::Ell2, &scaled).unwrap() - c * c * ell2).abs() <= 1e-9 * (1.0 + c * c * ell2));
    }

    #[test]
    fn hc_selection_permutes_with_input(
        pv in prop::collection::vec(1e-12f64..1.0, 16..80),
        shift in 0usize..80,
    ) {
        let p = pv.len();
        let shift = shift % p;
        let rotated: Vec<f64> = (0..p).map(|i| pv[(i + shift) % p]).collect();
        let base = hc_select(&pv, HcRule::DownwardClosed).unwrap();
        let rot = hc_select(&rotated, HcRule::DownwardClosed).unwrap();
        let mut mapped: Vec<usize> = base
            .selected
            .iter()
            .map(|&i| (i + p - shift) % p)
            .collect();
        mapped.sort_unstable();
        prop_assert_eq!(mapped, rot.selected);
    }

    #[test]
    fn seed_derivation_prefix_stable(root in any::<u64>(), cell in any::<u64>()) {
        let long: Vec<u64> = (0..20).map(|t| derive_seed(root, cell, t)).collect();
        let short: Vec<u64> = (0..7).map(|t| derive_seed(root, cell, t)).collect();
        prop_assert_eq!(&long[..7], &short[..]);
        // Neighboring cells diverge.
        prop_assert_ne!(derive_seed(root, cell, 0), derive_seed(root, cell.wrapping_add(1), 0));
    }
}
