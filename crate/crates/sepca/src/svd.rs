//! Truncated rank-1 SVD by power iteration.
//!
//! The iteration runs on whichever Gram matrix (`M M^T` or `M^T M`) is
//! smaller; above a size cutoff the Gram matrix is not materialized and the
//! two matrix-vector products are applied instead. Degenerate spectra
//! (`sigma1` close to `sigma2`) converge slowly; the iteration cap bounds the
//! cost and the iteration count is reported for diagnostics.

use crate::math;
use crate::model::DataMatrix;
use crate::rng::GaussianSource;
use alloc::vec;
use alloc::vec::Vec;

/// Relative tolerance on the Rayleigh quotient between iterations.
pub const RAYLEIGH_REL_TOL: f64 = 1e-10;
/// Iteration cap.
pub const MAX_ITERATIONS: usize = 1000;
/// Largest Gram side that is materialized (8 * 2048^2 bytes = 32 MiB).
const GRAM_DIM_LIMIT: usize = 2048;
/// Seed for restart vectors drawn after an iteration breakdown.
const RESTART_SEED: u64 = 0x5ebc_a5ee_d001;

/// Top singular triple of a dense matrix.
#[derive(Debug, Clone)]
pub struct Rank1Svd {
    /// Left singular vector, unit norm; its largest-magnitude entry is
    /// positive.
    pub u_hat: Vec<f64>,
    /// Right singular vector, unit norm.
    pub v_hat: Vec<f64>,
    /// Top singular value.
    pub sigma1: f64,
    /// Power iterations performed.
    pub iterations: usize,
    /// Whether the Rayleigh quotient met the relative tolerance before the
    /// iteration cap.
    pub converged: bool,
    /// Set for a zero matrix; `u_hat`/`v_hat` are then arbitrary unit vectors.
    pub degenerate: bool,
}

enum GramSide {
    Rows,
    Cols,
}

/// Power iteration for the top singular triple.
///
/// Deterministic all-ones start vector; if the iterate is annihilated the
/// start is re-drawn from a fixed seed. A zero matrix yields `sigma1 = 0`
/// with the `degenerate` flag set.
pub fn rank1_svd(m: &DataMatrix) -> Rank1Svd {
    let p = m.rows();
    let n = m.cols();

    if m.data().iter().all(|&x| x == 0.0) {
        let mut u = vec![0.0; p];
        let mut v = vec![0.0; n];
        u[0] = 1.0;
        v[0] = 1.0;
        return Rank1Svd {
            u_hat: u,
            v_hat: v,
            sigma1: 0.0,
            iterations: 0,
            converged: true,
            degenerate: true,
        };
    }

    let side = if p <= n {
        GramSide::Rows
    } else {
        GramSide::Cols
    };
    let dim = p.min(n);
    let gram = (dim <= GRAM_DIM_LIMIT).then(|| build_gram(m, &side));
    let apply = |x: &[f64], y: &mut [f64], scratch: &mut [f64]| match &gram {
        Some(b) => sym_matvec(b, dim, x, y),
        None => apply_gram(m, &side, x, y, scratch),
    };

    let mut x = vec![1.0 / math::sqrt(dim as f64); dim];
    let mut y = vec![0.0; dim];
    let mut scratch = vec![0.0; p.max(n)];
    let mut restarts = GaussianSource::new(RESTART_SEED);

    let mut iterations = 0;
    let mut converged = false;

    while iterations < MAX_ITERATIONS {
        apply(&x, &mut y, &mut scratch);
        iterations += 1;
        let norm = math::norm2(&y);
        if norm == 0.0 {
            // Iterate lies in the kernel; re-draw the start vector.
            for xi in x.iter_mut() {
                *xi = restarts.standard_normal();
            }
            let xn = math::norm2(&x);
            for xi in x.iter_mut() {
                *xi /= xn;
            }
            continue;
        }
        // Residual form of the Rayleigh-quotient tolerance: with unit x and
        // lambda = x'Bx, stop once ||Bx - lambda x|| <= tol * lambda.
        let lambda = math::dot(&x, &y);
        let mut resid2 = 0.0;
        for (xi, yi) in x.iter().zip(&y) {
            let d = yi - lambda * xi;
            resid2 += d * d;
        }
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = yi / norm;
        }
        if lambda > 0.0 && math::sqrt(resid2) <= RAYLEIGH_REL_TOL * lambda {
            converged = true;
            break;
        }
    }

    // One two-dimensional Rayleigh-Ritz step on span{x, Bx}. For a pair of
    // clustered top eigenvalues (where the iteration stalls) the pair spans
    // an invariant subspace and the step recovers the top eigenvector to
    // floating point accuracy.
    ritz_polish(&mut x, &mut y, &mut scratch, apply);

    // Recover the other factor with one exact matvec.
    let (mut u_hat, mut v_hat, sigma1) = match side {
        GramSide::Rows => {
            let mut v = vec![0.0; n];
            for (i, row) in m.row_iter().enumerate() {
                let xi = x[i];
                for (vk, rk) in v.iter_mut().zip(row) {
                    *vk += xi * rk;
                }
            }
            let s = math::norm2(&v);
            if s > 0.0 {
                for vk in v.iter_mut() {
                    *vk /= s;
                }
            }
            (x, v, s)
        }
        GramSide::Cols => {
            let mut u = vec![0.0; p];
            for (i, row) in m.row_iter().enumerate() {
                u[i] = math::dot(row, &x);
            }
            let s = math::norm2(&u);
            if s > 0.0 {
                for ui in u.iter_mut() {
                    *ui /= s;
                }
            }
            (u, x, s)
        }
    };

    // Sign convention: the largest-magnitude entry of u_hat is positive.
    let lead = u_hat
        .iter()
        .enumerate()
        .max_by(|(_, a), (_, b)| math::abs(**a).total_cmp(&math::abs(**b)))
        .map(|(i, _)| i)
        .unwrap_or(0);
    if u_hat[lead] < 0.0 {
        for ui in u_hat.iter_mut() {
            *ui = -*ui;
        }
        for vi in v_hat.iter_mut() {
            *vi = -*vi;
        }
    }

    Rank1Svd {
        u_hat,
        v_hat,
        sigma1,
        iterations,
        converged,
        degenerate: false,
    }
}

/// Rayleigh-Ritz on the two-dimensional Krylov space span{x, Bx}; writes the
/// refined top eigenvector back into `x`.
fn ritz_polish(
    x: &mut [f64],
    y: &mut [f64],
    scratch: &mut [f64],
    apply: impl Fn(&[f64], &mut [f64], &mut [f64]),
) {
    let dim = x.len();
    apply(x, y, scratch); // y = B q1 with q1 = x
    let a = math::dot(x, y); // q1' B q1
                             // Orthogonalize Bx against x to get q2.
    let mut q2: Vec<f64> = y.iter().zip(x.iter()).map(|(yi, xi)| yi - a * xi).collect();
    let q2n = math::norm2(&q2);
    if !(q2n > a * 1e-12) {
        // The residual is at rounding-noise scale; its direction carries no
        // information and x is already an eigenvector to working precision.
        return;
    }
    for q in q2.iter_mut() {
        *q /= q2n;
    }
    // One re-orthogonalization pass; the cancellation above leaves a
    // spurious x component that the projected 2x2 problem must not see.
    let spill = math::dot(x, &q2);
    for (q, xi) in q2.iter_mut().zip(x.iter()) {
        *q -= spill * xi;
    }
    let q2n2 = math::norm2(&q2);
    if q2n2 == 0.0 {
        return;
    }
    for q in q2.iter_mut() {
        *q /= q2n2;
    }
    let mut bq2 = vec![0.0; dim];
    apply(&q2, &mut bq2, scratch);
    let c = math::dot(x, &bq2); // q1' B q2
    let b = math::dot(&q2, &bq2); // q2' B q2
                                  // Top eigenpair of [[a, c], [c, b]], taking whichever null-space form of
                                  // (T - top I) is better conditioned.
    let half_diff = 0.5 * (a - b);
    let top = 0.5 * (a + b) + math::hypot(half_diff, c);
    let (e1, e2) = if math::hypot(c, top - a) >= math::hypot(top - b, c) {
        (c, top - a)
    } else {
        (top - b, c)
    };
    let en = math::hypot(e1, e2);
    if en == 0.0 {
        return;
    }
    let (e1, e2) = (e1 / en, e2 / en);
    for (xi, q) in x.iter_mut().zip(&q2) {
        *xi = e1 * *xi + e2 * *q;
    }
    let xn = math::norm2(x);
    for xi in x.iter_mut() {
        *xi /= xn;
    }
}

/// Materialize the smaller Gram matrix, exploiting symmetry.
fn build_gram(m: &DataMatrix, side: &GramSide) -> Vec<f64> {
    match side {
        GramSide::Rows => {
            let p = m.rows();
            let mut b = vec![0.0; p * p];
            for i in 0..p {
                let ri = m.row(i);
                for j in i..p {
                    let val = math::dot(ri, m.row(j));
                    b[i * p + j] = val;
                    b[j * p + i] = val;
                }
            }
            b
        }
        GramSide::Cols => {
            let n = m.cols();
            let mut c = vec![0.0; n * n];
            for row in m.row_iter() {
                for (k, &rk) in row.iter().enumerate() {
                    let dst = &mut c[k * n + k..(k + 1) * n];
                    for (d, &rl) in dst.iter_mut().zip(&row[k..]) {
                        *d += rk * rl;
                    }
                }
            }
            for k in 0..n {
                for l in (k + 1)..n {
                    c[l * n + k] = c[k * n + l];
                }
            }
            c
        }
    }
}

fn sym_matvec(b: &[f64], dim: usize, x: &[f64], y: &mut [f64]) {
    for (i, yi) in y.iter_mut().enumerate() {
        *yi = math::dot(&b[i * dim..(i + 1) * dim], x);
    }
}

/// y = (M M^T) x or (M^T M) x without materializing the Gram matrix.
fn apply_gram(m: &DataMatrix, side: &GramSide, x: &[f64], y: &mut [f64], scratch: &mut [f64]) {
    match side {
        GramSide::Rows => {
            let t = &mut scratch[..m.cols()];
            t.fill(0.0);
            for (i, row) in m.row_iter().enumerate() {
                let xi = x[i];
                for (tk, rk) in t.iter_mut().zip(row) {
                    *tk += xi * rk;
                }
            }
            for (i, row) in m.row_iter().enumerate() {
                y[i] = math::dot(row, t);
            }
        }
        GramSide::Cols => {
            let t = &mut scratch[..m.rows()];
            for (i, row) in m.row_iter().enumerate() {
                t[i] = math::dot(row, x);
            }
            y.fill(0.0);
            for (i, row) in m.row_iter().enumerate() {
                let ti = t[i];
                for (yk, rk) in y.iter_mut().zip(row) {
                    *yk += ti * rk;
                }
            }
        }
    }
}
