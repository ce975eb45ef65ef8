//! Infinite occupancy (Karlin) urn schemes.
//!
//! Balls are thrown independently into infinitely many urns, ball landing
//! in urn `i` with probability `p_i`. The crate provides:
//!
//! * urn probability models with regularly varying counting functions
//!   ([`model`]), including exact tail handling for infinite supports;
//! * closed-form limit theory for occupancy counts ([`theory`]): the
//!   covariance kernel of the limiting Gaussian process, exact prelimit
//!   covariances, and expected occupancy at finite sample sizes;
//! * path simulation of occupancy processes with deterministic seeding
//!   ([`sim`]);
//! * sampling of the limiting Gaussian processes themselves ([`gp`]);
//! * statistical verification harnesses comparing simulation against
//!   theory ([`verify`]).
//!
//! Everything downstream of a seed is deterministic: replications draw
//! from counter-derived ChaCha streams, and parallel reductions are
//! ordered, so results are identical across thread counts.

pub mod error;
pub mod gp;
pub mod model;
pub mod numeric;
pub mod seed;
pub mod sim;
pub mod theory;
pub mod verify;

pub use error::{Error, Result};
pub use gp::{build_kernel_matrix, sample_gaussian_paths, sample_wiener, GridKernelMatrix};
pub use model::{RegularVariationProfile, SampledUrn, UrnDistribution, UrnFamily};
pub use sim::{differences_exact_k, normalize_path, run_path, NormalizedPath, OccupancyState, PathRecord};
pub use theory::{
    b_n, cov_exact_counts, cov_exact_poissonized, cov_limit, exact_counts_identity_residual,
    expected_occupancy, gamma_tail_asymptotic_check, k_const, k_const_integral, KernelParams,
    MomentTable,
};
pub use verify::{
    brute_force_expectation, empirical_cov, estimate_theta, increment_mean_slack, ks_normal,
    run_experiment, short_time_ratio, wiener_limit_check, CheckOutcome, DistributionSpec,
    ExperimentConfig, ExperimentReport, MarginalNormality, Tolerances, WienerReport,
};

use serde::{Deserialize, Serialize};

/// How the number of balls is chosen for a path.
///
/// `Fixed` throws exactly `n` balls. `Poissonized` throws a Poisson(n)
/// number, which makes urn counts independent across urns and matches the
/// exact prelimit covariance formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingRegime {
    Fixed,
    Poissonized,
}

impl std::fmt::Display for SamplingRegime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SamplingRegime::Fixed => write!(f, "fixed"),
            SamplingRegime::Poissonized => write!(f, "poissonized"),
        }
    }
}
