//! Sparse equisigned PCA.
//!
//! Estimators for the model `X = theta * u v^T + sigma * G`, where the left
//! singular vector `u` is sparse, the right singular vector `v` is equisigned
//! (all entries of one sign), and `G` has i.i.d. Gaussian entries of variance
//! `1/n`. Six two-stage estimators are provided: a coordinate selection stage
//! (row statistics against FWER thresholds, Higher Criticism, or penalized
//! FDR thresholding) followed by a rank-1 SVD of the selected rows.
//!
//! The crate is `no_std`-compatible (requires `alloc`); all I/O, file formats
//! and the benchmark harness live in the companion `sepca-cli` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod error;
pub mod fdr;
pub mod fwer;
pub mod geometry;
pub mod math;
pub mod model;
pub mod rng;
pub mod special;
pub mod stats;
pub mod svd;
pub mod theory;

pub use error::Error;
pub use fdr::{
    fdr_k_hat, fdr_penalty, fdr_select, hc_select, pvalues, FdrPenalty, HcResult, HcRule,
};
pub use fwer::{estimate_two_stage, select_fwer, Estimate, SelectionResult};
pub use geometry::{geometry_compare, vector_angle, GeometryParams, GeometryReport};
pub use model::{generate_data, make_u, make_v, DataMatrix, SignalModel, USpec, VProfile};
pub use stats::{fwer_threshold, row_statistic, StatKind, SumVariant, ThresholdSpec};
pub use svd::{rank1_svd, Rank1Svd};
pub use theory::{
    beta_crit, l2_loss, rho, solve_t_ell1, support_metrics, svd_overlap_limit, BoundarySpec,
    SupportMetrics,
};

use core::fmt;
use core::str::FromStr;

/// The six coordinate selection schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    /// Row sums against an FWER threshold.
    Sum,
    /// Row l1 norms against an FWER threshold.
    Ell1,
    /// Row sums of squares against an FWER threshold.
    Ell2,
    /// Higher Criticism on row-sum p-values.
    HcSum,
    /// Higher Criticism on sum-of-squares p-values.
    HcEll2,
    /// Penalized least squares hard thresholding of row sums.
    Fdr,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::Sum,
        Algorithm::Ell1,
        Algorithm::Ell2,
        Algorithm::HcSum,
        Algorithm::HcEll2,
        Algorithm::Fdr,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Sum => "sum",
            Algorithm::Ell1 => "ell1",
            Algorithm::Ell2 => "ell2",
            Algorithm::HcSum => "hc-sum",
            Algorithm::HcEll2 => "hc-ell2",
            Algorithm::Fdr => "fdr",
        }
    }

    /// Selectors whose detection region is a half-space of large row sums.
    pub fn is_sum_family(self) -> bool {
        matches!(self, Algorithm::Sum | Algorithm::HcSum | Algorithm::Fdr)
    }

    /// Selectors whose detection region is the exterior of an l2 ball.
    pub fn is_ell2_family(self) -> bool {
        matches!(self, Algorithm::Ell2 | Algorithm::HcEll2)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "sum" => Ok(Algorithm::Sum),
            "ell1" | "l1" => Ok(Algorithm::Ell1),
            "ell2" | "l2" => Ok(Algorithm::Ell2),
            "hc-sum" => Ok(Algorithm::HcSum),
            "hc-ell2" | "hc-l2" => Ok(Algorithm::HcEll2),
            "fdr" => Ok(Algorithm::Fdr),
            _ => Err(Error::UnknownAlgorithm),
        }
    }
}
