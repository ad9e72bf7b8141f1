//! Ground-truth signal model and synthetic data generation.
//!
//! The observation is `X = theta * u v^T + sigma * G` with `u` a unit-norm
//! sparse vector in R^p, `v` a unit-norm vector in R^n, and `G` filled with
//! i.i.d. N(0, 1/n) entries. Each entry `X[i][k]` is Gaussian with mean
//! `theta * u[i] * v[k]` and variance `sigma^2 / n`, so
//! `E(X X^T) = theta^2 u u^T + sigma^2 I`.

use crate::error::Error;
use crate::math;
use crate::rng::GaussianSource;
use alloc::vec;
use alloc::vec::Vec;

const UNIT_NORM_TOL: f64 = 1e-12;

/// Ground truth for one synthetic experiment.
#[derive(Debug, Clone)]
pub struct SignalModel {
    theta: f64,
    u: Vec<f64>,
    v: Vec<f64>,
    sigma: f64,
    support: Vec<usize>,
    v_equisigned: bool,
}

impl SignalModel {
    /// Validates unit norms of `u` and `v`, records the support of `u` and
    /// whether `v` is equisigned.
    pub fn new(theta: f64, u: Vec<f64>, v: Vec<f64>, sigma: f64) -> Result<Self, Error> {
        if !theta.is_finite() || theta < 0.0 {
            return Err(Error::InvalidParam {
                name: "theta",
                reason: "signal strength must be a finite nonnegative real",
            });
        }
        if !sigma.is_finite() || sigma < 0.0 {
            return Err(Error::InvalidParam {
                name: "sigma",
                reason: "noise scale must be a finite nonnegative real",
            });
        }
        if u.is_empty() || v.is_empty() {
            return Err(Error::DimensionTooSmall {
                what: "u and v",
                min: 1,
                got: 0,
            });
        }
        check_unit("u", &u)?;
        check_unit("v", &v)?;
        let support: Vec<usize> = u
            .iter()
            .enumerate()
            .filter(|(_, x)| **x != 0.0)
            .map(|(i, _)| i)
            .collect();
        if support.is_empty() {
            return Err(Error::EmptySupport);
        }
        let v_equisigned = math::is_equisigned(&v);
        Ok(SignalModel {
            theta,
            u,
            v,
            sigma,
            support,
            v_equisigned,
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    /// Number of rows p.
    pub fn p(&self) -> usize {
        self.u.len()
    }

    /// Number of columns n.
    pub fn n(&self) -> usize {
        self.v.len()
    }

    /// Indices of the nonzero coordinates of `u`, ascending.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn v_equisigned(&self) -> bool {
        self.v_equisigned
    }
}

fn check_unit(what: &'static str, xs: &[f64]) -> Result<(), Error> {
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite { what });
    }
    let norm = math::norm2(xs);
    if math::abs(norm - 1.0) > UNIT_NORM_TOL {
        return Err(Error::NonUnitNorm { what, norm });
    }
    Ok(())
}

/// Dense p x n observation matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DataMatrix {
    /// Builds a matrix from row-major data, rejecting NaN and infinities.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, Error> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionTooSmall {
                what: "matrix dimensions",
                min: 1,
                got: 0,
            });
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite { what: "matrix" });
        }
        Ok(DataMatrix { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, k: usize) -> f64 {
        self.data[i * self.cols + k]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.cols)
    }

    /// New matrix keeping only the given rows, in the given order.
    pub fn select_rows(&self, indices: &[usize]) -> Result<DataMatrix, Error> {
        let mut data = Vec::with_capacity(indices.len() * self.cols);
        for &i in indices {
            if i >= self.rows {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    bound: self.rows,
                });
            }
            data.extend_from_slice(self.row(i));
        }
        DataMatrix::from_vec(indices.len(), self.cols, data)
    }
}

/// Draw `X = theta u v^T + sigma G` with `G[i][k] ~ N(0, 1/n)` i.i.d.
///
/// Identical `(model, seed)` inputs give bit-identical matrices within one
/// build. Safe to call concurrently with distinct seeds.
pub fn generate_data(model: &SignalModel, seed: u64) -> DataMatrix {
    let p = model.p();
    let n = model.n();
    let mut src = GaussianSource::new(seed);
    let noise_sd = model.sigma / math::sqrt(n as f64);
    let mut data = Vec::with_capacity(p * n);
    for i in 0..p {
        let scale = model.theta * model.u[i];
        for k in 0..n {
            data.push(scale * model.v[k] + noise_sd * src.standard_normal());
        }
    }
    DataMatrix {
        rows: p,
        cols: n,
        data,
    }
}

/// Built-in right singular vector profiles.
#[derive(Debug, Clone, PartialEq)]
pub enum VProfile {
    /// `v_k` proportional to `exp(-5k/n) |sin(4k/n)|`; a rise-and-fall shape.
    RiseFall { n: usize },
    /// `v_k` proportional to `1/k^2`; most mass on the first coordinates.
    PowerDecay { n: usize },
    /// Constant `1/sqrt(n)`.
    Uniform { n: usize },
    /// Arbitrary vector, normalized on realization.
    Custom(Vec<f64>),
}

impl VProfile {
    pub fn len(&self) -> usize {
        match self {
            VProfile::RiseFall { n } | VProfile::PowerDecay { n } | VProfile::Uniform { n } => *n,
            VProfile::Custom(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A realized unit-norm `v` plus the scale that was applied to reach unit
/// norm. `applied_scale` is `Some` only for custom inputs, so callers can
/// surface a warning when silent normalization changed the data.
#[derive(Debug, Clone)]
pub struct RealizedV {
    pub vector: Vec<f64>,
    pub applied_scale: Option<f64>,
}

/// Realize a profile as a unit l2-norm vector.
///
/// The three built-ins are equisigned by construction. Custom vectors are
/// normalized silently; the applied scale is reported back.
pub fn make_v(profile: &VProfile) -> Result<RealizedV, Error> {
    if profile.is_empty() {
        return Err(Error::DimensionTooSmall {
            what: "v length",
            min: 1,
            got: 0,
        });
    }
    let (mut raw, custom): (Vec<f64>, bool) = match profile {
        VProfile::RiseFall { n } => {
            let n_f = *n as f64;
            (
                (1..=*n)
                    .map(|k| {
                        let t = k as f64 / n_f;
                        math::exp(-5.0 * t) * math::abs(libm::sin(4.0 * t))
                    })
                    .collect(),
                false,
            )
        }
        VProfile::PowerDecay { n } => (
            (1..=*n).map(|k| 1.0 / (k as f64 * k as f64)).collect(),
            false,
        ),
        VProfile::Uniform { n } => (vec![1.0; *n], false),
        VProfile::Custom(v) => {
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite { what: "custom v" });
            }
            (v.clone(), true)
        }
    };
    let norm = math::norm2(&raw);
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::ZeroNorm { what: "v profile" });
    }
    for x in &mut raw {
        *x /= norm;
    }
    Ok(RealizedV {
        vector: raw,
        applied_scale: custom.then_some(1.0 / norm),
    })
}

/// Sparse left singular vector specifications.
#[derive(Debug, Clone, PartialEq)]
pub enum USpec {
    /// Place `values` at `support` (0-based indices) and normalize.
    Explicit {
        support: Vec<usize>,
        values: Vec<f64>,
    },
    /// One large coordinate `sqrt(1 - r^2)` at index 0 and `m` equal small
    /// coordinates `r / sqrt(m)` at indices 1..=m. The small coordinates sit
    /// exactly at the edge of detectability when `r` is tuned to a boundary,
    /// which makes this the worst case for support recovery.
    WorstCase { m: usize, r: f64 },
}

/// Realize a unit-norm sparse `u` in R^p.
pub fn make_u(p: usize, spec: &USpec) -> Result<Vec<f64>, Error> {
    if p == 0 {
        return Err(Error::DimensionTooSmall {
            what: "p",
            min: 1,
            got: 0,
        });
    }
    match spec {
        USpec::Explicit { support, values } => {
            if support.is_empty() {
                return Err(Error::EmptySupport);
            }
            if support.len() != values.len() {
                return Err(Error::DimensionMismatch {
                    expected: support.len(),
                    got: values.len(),
                });
            }
            let mut u = vec![0.0; p];
            for (&i, &val) in support.iter().zip(values) {
                if i >= p {
                    return Err(Error::IndexOutOfRange { index: i, bound: p });
                }
                if !val.is_finite() {
                    return Err(Error::NonFinite { what: "u values" });
                }
                u[i] = val;
            }
            let norm = math::norm2(&u);
            if norm == 0.0 {
                return Err(Error::ZeroNorm { what: "u values" });
            }
            for x in &mut u {
                *x /= norm;
            }
            Ok(u)
        }
        USpec::WorstCase { m, r } => {
            if !(*r >= 0.0 && *r < 1.0) {
                return Err(Error::InvalidParam {
                    name: "r",
                    reason: "worst-case u needs r in [0, 1)",
                });
            }
            if *m == 0 {
                return Err(Error::InvalidParam {
                    name: "m",
                    reason: "worst-case u needs at least one small coordinate",
                });
            }
            if m + 1 > p {
                return Err(Error::DimensionTooSmall {
                    what: "p",
                    min: m + 1,
                    got: p,
                });
            }
            let mut u = vec![0.0; p];
            u[0] = math::sqrt(1.0 - r * r);
            let small = r / math::sqrt(*m as f64);
            for x in u.iter_mut().take(m + 1).skip(1) {
                *x = small;
            }
            Ok(u)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(p: usize, i: usize) -> Vec<f64> {
        let mut u = vec![0.0; p];
        u[i] = 1.0;
        u
    }

    #[test]
    fn zero_signal_zero_noise_gives_zero_matrix() {
        let u = unit(4, 0);
        let v = make_v(&VProfile::Uniform { n: 6 }).unwrap().vector;
        let model = SignalModel::new(0.0, u, v, 0.0).unwrap();
        let x = generate_data(&model, 99);
        assert!(x.data().iter().all(|&e| e == 0.0));
    }

    #[test]
    fn noiseless_rank1_rows() {
        let u = unit(3, 0);
        let n = 16;
        let v = make_v(&VProfile::Uniform { n }).unwrap().vector;
        let model = SignalModel::new(5.0, u, v, 0.0).unwrap();
        let x = generate_data(&model, 1);
        let want = 5.0 / (n as f64).sqrt();
        for k in 0..n {
            assert!((x.get(0, k) - want).abs() <= 1e-15);
        }
        for i in 1..3 {
            assert!(x.row(i).iter().all(|&e| e == 0.0));
        }
    }

    #[test]
    fn generate_is_deterministic_per_seed() {
        let u = make_u(10, &USpec::WorstCase { m: 4, r: 0.6 }).unwrap();
        let v = make_v(&VProfile::RiseFall { n: 20 }).unwrap().vector;
        let model = SignalModel::new(2.0, u, v, 1.0).unwrap();
        let a = generate_data(&model, 7);
        let b = generate_data(&model, 7);
        let c = generate_data(&model, 8);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn pure_noise_entry_variance_is_one_over_n() {
        // Monte Carlo moment check over 10 seeds.
        let p = 50;
        let n = 200;
        let u = unit(p, 0);
        let v = make_v(&VProfile::Uniform { n }).unwrap().vector;
        let model = SignalModel::new(0.0, u, v, 1.0).unwrap();
        let mut acc = 0.0;
        let mut count = 0usize;
        for seed in 0..10u64 {
            let x = generate_data(&model, seed);
            acc += x.data().iter().map(|e| e * e).sum::<f64>();
            count += x.data().len();
        }
        let var = acc / count as f64;
        let want = 1.0 / n as f64;
        assert!(
            (var - want).abs() <= 0.05 * want,
            "sample variance {var} vs {want}"
        );
    }

    #[test]
    fn row_mean_and_covariance_match_model() {
        // E(X X^T) = theta^2 u u^T + sigma^2 I, within 10% Frobenius over
        // 200 seeds at p = 20, n = 200.
        let p = 20;
        let n = 200;
        let u = make_u(p, &USpec::WorstCase { m: 3, r: 0.5 }).unwrap();
        let v = make_v(&VProfile::RiseFall { n }).unwrap().vector;
        let theta = 2.0;
        let sigma = 1.0;
        let model = SignalModel::new(theta, u.clone(), v, sigma).unwrap();
        let trials = 200u64;
        let mut gram = vec![0.0; p * p];
        for seed in 0..trials {
            let x = generate_data(&model, seed);
            for i in 0..p {
                for j in 0..p {
                    gram[i * p + j] += math::dot(x.row(i), x.row(j));
                }
            }
        }
        let mut err2 = 0.0;
        let mut ref2 = 0.0;
        for i in 0..p {
            for j in 0..p {
                let want = theta * theta * u[i] * u[j] + if i == j { sigma * sigma } else { 0.0 };
                let got = gram[i * p + j] / trials as f64;
                err2 += (got - want) * (got - want);
                ref2 += want * want;
            }
        }
        assert!(
            err2.sqrt() <= 0.10 * ref2.sqrt(),
            "Frobenius error {} vs reference {}",
            err2.sqrt(),
            ref2.sqrt()
        );
    }

    #[test]
    fn make_v_uniform_small() {
        let v = make_v(&VProfile::Uniform { n: 4 }).unwrap();
        assert_eq!(v.vector, vec![0.5, 0.5, 0.5, 0.5]);
        assert!(v.applied_scale.is_none());
    }

    #[test]
    fn make_v_power_decay_l1_limit() {
        // Independent series oracle: sum 1/k^2 over sqrt(sum 1/k^4).
        let n = 1_000_000usize;
        let mut s2 = 0.0;
        let mut s4 = 0.0;
        for k in 1..=n {
            let k2 = (k as f64) * (k as f64);
            s2 += 1.0 / k2;
            s4 += 1.0 / (k2 * k2);
        }
        let oracle = s2 / s4.sqrt();
        let v = make_v(&VProfile::PowerDecay { n }).unwrap().vector;
        let l1 = math::norm1(&v);
        assert!((l1 - oracle).abs() <= 1e-9, "{l1} vs oracle {oracle}");
        // Analytic limit of the stated series ratio.
        assert!((l1 - 1.5811388300841898).abs() <= 1e-5, "{l1}");
    }

    #[test]
    fn make_v_rise_fall_is_equisigned_unit() {
        let v = make_v(&VProfile::RiseFall { n: 500 }).unwrap().vector;
        assert!(v.iter().all(|&x| x >= 0.0));
        assert!((math::norm2(&v) - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn make_v_custom_reports_scale() {
        let v = make_v(&VProfile::Custom(vec![3.0, 4.0])).unwrap();
        assert!((v.vector[0] - 0.6).abs() <= 1e-15);
        assert!((v.vector[1] - 0.8).abs() <= 1e-15);
        assert!((v.applied_scale.unwrap() - 0.2).abs() <= 1e-15);
        assert!(make_v(&VProfile::Custom(vec![0.0, 0.0])).is_err());
    }

    #[test]
    fn make_u_explicit_and_worst_case() {
        let e1 = make_u(
            5,
            &USpec::Explicit {
                support: vec![0],
                values: vec![1.0],
            },
        )
        .unwrap();
        assert_eq!(e1, unit(5, 0));

        let w = make_u(10, &USpec::WorstCase { m: 4, r: 0.6 }).unwrap();
        assert!((w[0] - 0.8).abs() <= 1e-15);
        for i in 1..5 {
            assert!((w[i] - 0.3).abs() <= 1e-15);
        }
        assert!(w[5..].iter().all(|&x| x == 0.0));
        assert!((math::norm2(&w) - 1.0).abs() <= 1e-15);

        let degenerate = make_u(10, &USpec::WorstCase { m: 4, r: 0.0 }).unwrap();
        assert_eq!(degenerate, unit(10, 0));

        assert!(make_u(
            5,
            &USpec::Explicit {
                support: vec![],
                values: vec![]
            }
        )
        .is_err());
        assert!(make_u(3, &USpec::WorstCase { m: 3, r: 0.5 }).is_err());
    }

    #[test]
    fn model_rejects_non_unit_vectors() {
        let v = make_v(&VProfile::Uniform { n: 4 }).unwrap().vector;
        assert!(matches!(
            SignalModel::new(1.0, vec![0.9, 0.1], v.clone(), 1.0),
            Err(Error::NonUnitNorm { .. })
        ));
        assert!(SignalModel::new(1.0, unit(3, 1), v, 1.0).is_ok());
    }

    #[test]
    fn matrix_rejects_non_finite_and_ragged() {
        assert!(DataMatrix::from_vec(2, 2, vec![1.0, 2.0, f64::NAN, 4.0]).is_err());
        assert!(DataMatrix::from_vec(2, 2, vec![1.0, 2.0, 3.0]).is_err());
        let m = DataMatrix::from_vec(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(m.row(1), &[3.0, 4.0]);
    }
}
