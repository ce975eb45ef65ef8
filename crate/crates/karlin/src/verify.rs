//! Monte-Carlo verification harness.
//!
//! Runs replicated path simulations, aggregates empirical moments, and
//! compares them against the closed-form limit theory: covariance
//! kernels on a grid, marginal normality at the endpoint, the Wiener
//! behavior of the θ = 1 family, and brute-force oracles for small
//! cases. Every tolerance that depends on Monte-Carlo noise is
//! recomputed from standard-error formulas and reported alongside the
//! comparison rather than hard-coded into the verdict.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::UrnDistribution;
use crate::numeric::special::normal_cdf;
use crate::seed::child_seed;
use crate::sim::{normalize_path, run_path};
use crate::theory::{cov_limit, expected_occupancy, MomentTable};
use crate::SamplingRegime;

/// Distribution block of an experiment: everything needed to rebuild
/// the urn model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DistributionSpec {
    Zipf { theta: f64, truncation_index: u64, tail_mass_tol: f64 },
    LogZipf { truncation_index: u64, tail_mass_tol: f64 },
    FiniteExplicit { probs: Vec<f64> },
}

impl DistributionSpec {
    pub fn build(&self) -> Result<UrnDistribution> {
        match self {
            DistributionSpec::Zipf { theta, truncation_index, tail_mass_tol } => {
                UrnDistribution::zipf(*theta, *truncation_index, *tail_mass_tol)
            }
            DistributionSpec::LogZipf { truncation_index, tail_mass_tol } => {
                UrnDistribution::log_zipf(*truncation_index, *tail_mass_tol)
            }
            DistributionSpec::FiniteExplicit { probs } => {
                UrnDistribution::finite_explicit(probs.clone())
            }
        }
    }
}

fn default_relative() -> f64 {
    0.15
}
fn default_se_multiplier() -> f64 {
    5.0
}
fn default_ks_level() -> f64 {
    0.01
}
fn default_increment_corr() -> f64 {
    0.1
}

/// Comparison tolerances. The relative band applies to kernel entries
/// and regression coefficients; the SE multiplier widens every band by
/// the Monte-Carlo standard error of the quantity under test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_relative")]
    pub relative: f64,
    #[serde(default = "default_se_multiplier")]
    pub se_multiplier: f64,
    #[serde(default = "default_ks_level")]
    pub ks_level: f64,
    #[serde(default = "default_increment_corr")]
    pub increment_corr: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            relative: default_relative(),
            se_multiplier: default_se_multiplier(),
            ks_level: default_ks_level(),
            increment_corr: default_increment_corr(),
        }
    }
}

fn default_regime() -> SamplingRegime {
    SamplingRegime::Fixed
}
fn default_kmax() -> u32 {
    1
}

/// One replicated experiment: distribution, sampling plan, and
/// comparison tolerances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub distribution: DistributionSpec,
    pub n: u64,
    pub grid: Vec<f64>,
    #[serde(default = "default_kmax")]
    pub kmax: u32,
    #[serde(default = "default_regime")]
    pub regime: SamplingRegime,
    pub m_reps: u64,
    pub master_seed: u64,
    #[serde(default)]
    pub tolerances: Tolerances,
}

impl ExperimentConfig {
    /// All constraint violations, one message each; empty when valid.
    pub fn validation_errors(&self) -> Vec<String> {
        let mut errors = Vec::new();
        match &self.distribution {
            DistributionSpec::Zipf { theta, .. } => {
                if !(*theta > 0.0 && *theta <= 1.0) {
                    errors.push(format!("theta out of range (0,1]: {theta}"));
                }
            }
            DistributionSpec::FiniteExplicit { probs } => {
                if probs.is_empty() {
                    errors.push("finite distribution needs at least one probability".to_string());
                }
            }
            DistributionSpec::LogZipf { .. } => {}
        }
        if self.n < 1 {
            errors.push("n must be at least 1".to_string());
        }
        if self.m_reps < 2 {
            errors.push("m_reps must be at least 2".to_string());
        }
        if self.kmax < 1 {
            errors.push("kmax must be at least 1".to_string());
        }
        if let Err(e) = crate::theory::check_grid(&self.grid) {
            errors.push(grid_error_message(&self.grid, &e));
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("relative", t.relative),
            ("se_multiplier", t.se_multiplier),
            ("ks_level", t.ks_level),
            ("increment_corr", t.increment_corr),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                errors.push(format!("tolerance {name} must be positive, got {v}"));
            }
        }
        errors
    }

    pub fn validate(&self) -> Result<()> {
        let errors = self.validation_errors();
        if errors.is_empty() {
            Ok(())
        } else {
            Err(Error::config(errors.join("; ")))
        }
    }
}

fn grid_error_message(grid: &[f64], fallback: &Error) -> String {
    let ascending = grid.windows(2).all(|w| w[1] > w[0]);
    if !grid.is_empty() && !ascending {
        "grid not ascending".to_string()
    } else {
        format!("{fallback}")
    }
}

/// One named pass/fail verdict inside a report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Kolmogorov–Smirnov verdict for one endpoint marginal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarginalNormality {
    /// Threshold component tested at t = 1.
    pub i: u32,
    /// Limit standard deviation the sample was tested against.
    pub sigma: f64,
    pub statistic: f64,
    pub p_value: f64,
}

/// Aggregated result of a replicated kernel experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub n: u64,
    pub m_reps: u64,
    pub regime: SamplingRegime,
    pub theta: f64,
    pub grid: Vec<f64>,
    pub nu: u32,
    /// Row-major (|grid|·nu)² empirical covariance of the normalized
    /// paths; symmetric by construction.
    pub empirical_cov: Vec<f64>,
    /// Limit kernel entries on the same layout.
    pub kernel: Vec<f64>,
    /// |empirical − kernel| / |kernel| per entry.
    pub relative_errors: Vec<f64>,
    /// Monte-Carlo standard error of each empirical entry, from the
    /// kernel values.
    pub standard_errors: Vec<f64>,
    /// Band actually applied per entry: max(relative·|kernel|,
    /// se_multiplier·SE).
    pub entry_tolerances: Vec<f64>,
    /// Endpoint normality per threshold; empty when replications are too
    /// few for the KS test.
    pub normality: Vec<MarginalNormality>,
    /// Mean of ln(R_n)/ln(n) over replications.
    pub theta_estimate: f64,
    /// Set when m_reps is too small for distributional statistics; the
    /// SE-driven bands are then very wide and the KS test is skipped.
    pub low_replication: bool,
    pub checks: Vec<CheckOutcome>,
    pub overall_pass: bool,
}

/// Fewest replications the KS machinery accepts.
pub const KS_MIN_SAMPLES: usize = 50;

/// Run a replicated kernel experiment: simulate, normalize, aggregate,
/// and compare against the limit kernel entry by entry.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let d = cfg.distribution.build()?;
    let theta = match d.theta() {
        Some(t) if t < 1.0 => t,
        Some(_) => {
            return Err(Error::config(
                "the kernel experiment needs theta below 1; use the wiener limit check for the logarithmic family",
            ))
        }
        None => {
            return Err(Error::config(
                "the kernel experiment needs a power-law family; explicit finite distributions have no limit kernel",
            ))
        }
    };
    let table = MomentTable::build(&d, cfg.n, &cfg.grid, cfg.kmax)?;
    let nu = cfg.kmax;
    let dim = cfg.grid.len() * nu as usize;
    let per_rep: Vec<(Vec<f64>, u64)> = (0..cfg.m_reps)
        .into_par_iter()
        .map(|rep| {
            let seed = child_seed(cfg.master_seed, rep);
            let record = run_path(&d, cfg.n, &cfg.grid, nu, cfg.regime, seed)
                .map_err(|e| Error::numerical("run_experiment", format!("replication {rep}: {e}")))?;
            let endpoint = record.raw.last().expect("nonempty grid")[0];
            let norm = normalize_path(&record, &table)
                .map_err(|e| Error::numerical("run_experiment", format!("replication {rep}: {e}")))?;
            let flat: Vec<f64> = norm.values.into_iter().flatten().collect();
            Ok((flat, endpoint))
        })
        .collect::<Result<_>>()?;
    let samples: Vec<Vec<f64>> = per_rep.iter().map(|(flat, _)| flat.clone()).collect();
    let empirical = empirical_cov(&samples)?;

    let mut kernel = vec![0.0; dim * dim];
    for (g, &tg) in cfg.grid.iter().enumerate() {
        for i in 1..=nu {
            let r = g * nu as usize + (i - 1) as usize;
            for (h, &th) in cfg.grid.iter().enumerate() {
                for j in 1..=nu {
                    let c = h * nu as usize + (j - 1) as usize;
                    kernel[r * dim + c] = cov_limit(i, j, tg, th, theta)?;
                }
            }
        }
    }

    let m = cfg.m_reps as f64;
    let mut relative_errors = vec![0.0; dim * dim];
    let mut standard_errors = vec![0.0; dim * dim];
    let mut entry_tolerances = vec![0.0; dim * dim];
    let mut worst_entry = (0usize, 0.0f64);
    let mut cov_failures = 0usize;
    for r in 0..dim {
        for c in 0..dim {
            let idx = r * dim + c;
            let ker = kernel[idx];
            let diff = (empirical[idx] - ker).abs();
            relative_errors[idx] = if ker.abs() > 0.0 { diff / ker.abs() } else { diff };
            let se = ((kernel[r * dim + r] * kernel[c * dim + c] + ker * ker) / m).sqrt();
            standard_errors[idx] = se;
            let tol = (cfg.tolerances.relative * ker.abs()).max(cfg.tolerances.se_multiplier * se);
            entry_tolerances[idx] = tol;
            if diff > tol {
                cov_failures += 1;
            }
            if diff > worst_entry.1 {
                worst_entry = (idx, diff);
            }
        }
    }

    let low_replication = (cfg.m_reps as usize) < KS_MIN_SAMPLES;
    let mut checks = Vec::new();
    checks.push(CheckOutcome {
        name: "covariance entries within tolerance".to_string(),
        passed: cov_failures == 0,
        detail: format!(
            "{cov_failures} of {} entries out of band; worst |Δ| = {:.3e} at flat index {}",
            dim * dim,
            worst_entry.1,
            worst_entry.0
        ),
    });

    let mut normality = Vec::new();
    if !low_replication {
        let endpoint_g = cfg.grid.len() - 1;
        for i in 1..=nu {
            let col = endpoint_g * nu as usize + (i - 1) as usize;
            let series: Vec<f64> = samples.iter().map(|row| row[col]).collect();
            let sigma = cov_limit(i, i, 1.0, 1.0, theta)?.sqrt();
            let (statistic, p_value) = ks_normal(&series, sigma)?;
            checks.push(CheckOutcome {
                name: format!("endpoint normality, threshold {i}"),
                passed: p_value > cfg.tolerances.ks_level,
                detail: format!("KS statistic {statistic:.4}, p {p_value:.4}"),
            });
            normality.push(MarginalNormality { i, sigma, statistic, p_value });
        }
    } else {
        checks.push(CheckOutcome {
            name: "endpoint normality".to_string(),
            passed: true,
            detail: format!(
                "skipped: {} replications are below the KS minimum of {KS_MIN_SAMPLES}",
                cfg.m_reps
            ),
        });
    }

    let theta_estimate = per_rep
        .iter()
        .map(|&(_, endpoint)| estimate_theta(endpoint.max(1), cfg.n.max(2)).expect("valid inputs"))
        .sum::<f64>()
        / m;

    let overall_pass = checks.iter().all(|c| c.passed);
    Ok(ExperimentReport {
        n: cfg.n,
        m_reps: cfg.m_reps,
        regime: cfg.regime,
        theta,
        grid: cfg.grid.clone(),
        nu,
        empirical_cov: empirical,
        kernel,
        relative_errors,
        standard_errors,
        entry_tolerances,
        normality,
        theta_estimate,
        low_replication,
        checks,
        overall_pass,
    })
}

/// Unbiased sample covariance (divisor reps − 1) of replicated
/// coordinate vectors, row-major over coordinates.
pub fn empirical_cov(samples: &[Vec<f64>]) -> Result<Vec<f64>> {
    let reps = samples.len();
    if reps < 2 {
        return Err(Error::InsufficientData(format!(
            "sample covariance needs at least 2 replications, got {reps}"
        )));
    }
    let dim = samples[0].len();
    if samples.iter().any(|row| row.len() != dim) {
        return Err(Error::invalid("sample covariance needs rows of equal length"));
    }
    let m = reps as f64;
    let mut mean = vec![0.0; dim];
    for row in samples {
        for (acc, &v) in mean.iter_mut().zip(row) {
            *acc += v / m;
        }
    }
    let mut cov = vec![0.0; dim * dim];
    for row in samples {
        for r in 0..dim {
            let dr = row[r] - mean[r];
            for c in r..dim {
                cov[r * dim + c] += dr * (row[c] - mean[c]) / (m - 1.0);
            }
        }
    }
    for r in 0..dim {
        for c in 0..r {
            cov[r * dim + c] = cov[c * dim + r];
        }
    }
    Ok(cov)
}

/// One-sample Kolmogorov–Smirnov statistic against Normal(0, σ²), with
/// the asymptotic p-value series.
pub fn ks_normal(samples: &[f64], sigma: f64) -> Result<(f64, f64)> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::invalid(format!("KS test needs sigma > 0, got {sigma}")));
    }
    if samples.len() < KS_MIN_SAMPLES {
        return Err(Error::InsufficientData(format!(
            "KS test needs at least {KS_MIN_SAMPLES} samples, got {}",
            samples.len()
        )));
    }
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("KS test needs finite samples"));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite samples"));
    let m = sorted.len() as f64;
    let mut statistic = 0.0f64;
    for (idx, &x) in sorted.iter().enumerate() {
        let f = normal_cdf(x / sigma);
        let above = (idx as f64 + 1.0) / m - f;
        let below = f - idx as f64 / m;
        statistic = statistic.max(above).max(below);
    }
    let statistic = statistic.clamp(0.0, 1.0);
    let lambda = (m.sqrt() + 0.12 + 0.11 / m.sqrt()) * statistic;
    let mut p = 0.0;
    for k in 1..=100u32 {
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        let term = 2.0 * sign * (-2.0 * (k as f64 * lambda).powi(2)).exp();
        p += term;
        if term.abs() < 1e-12 {
            break;
        }
    }
    Ok((statistic, p.clamp(0.0, 1.0)))
}

/// Consistent estimator ln(r_n)/ln(n) of the regular-variation index
/// from a single occupancy count.
pub fn estimate_theta(r_n: u64, n: u64) -> Result<f64> {
    if r_n < 1 {
        return Err(Error::invalid("theta estimate needs r_n at least 1"));
    }
    if n < 2 {
        return Err(Error::invalid("theta estimate needs n at least 2"));
    }
    Ok((r_n as f64).ln() / (n as f64).ln())
}

/// Exact E R*_{n,k} for a tiny explicit distribution by enumerating all
/// |probs|^n ball assignments.
pub fn brute_force_expectation(probs: &[f64], n: u32, k: u32) -> Result<f64> {
    if probs.is_empty() || probs.len() > 4 {
        return Err(Error::invalid("brute force handles 1 to 4 urns"));
    }
    if n > 8 {
        return Err(Error::invalid("brute force handles at most 8 balls"));
    }
    if k < 1 {
        return Err(Error::invalid("brute force needs k at least 1"));
    }
    if probs.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
        return Err(Error::invalid("brute force needs nonnegative probabilities"));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::invalid(format!("brute force needs probabilities summing to 1, got {total}")));
    }
    let urns = probs.len();
    let outcomes = (urns as u64).pow(n);
    let mut expectation = 0.0;
    for code in 0..outcomes {
        let mut rest = code;
        let mut counts = [0u32; 4];
        let mut weight = 1.0;
        for _ in 0..n {
            let urn = (rest % urns as u64) as usize;
            rest /= urns as u64;
            counts[urn] += 1;
            weight *= probs[urn];
        }
        let hits = counts[..urns].iter().filter(|&&c| c >= k).count();
        expectation += weight * hits as f64;
    }
    Ok(expectation)
}

/// Ratio E R_{Π(nδ)} / (α(n)·δ^{θ/2}) (with n·l*(n) replacing α at
/// θ = 1): bounded uniformly over δ ∈ (0,1] and stable in n for
/// regularly varying families.
pub fn short_time_ratio(d: &UrnDistribution, n: f64, delta: f64) -> Result<f64> {
    let theta = d
        .theta()
        .ok_or_else(|| Error::invalid("short-time ratio needs a regularly varying family"))?;
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::invalid(format!("delta must lie in (0,1], got {delta}")));
    }
    let numerator = expected_occupancy(d, n * delta, 1, SamplingRegime::Poissonized)?;
    let scale = if theta >= 1.0 { n * d.l_star(n)? } else { d.alpha(n)? as f64 };
    if scale <= 0.0 {
        return Err(Error::numerical("short_time_ratio", "vanishing normalization".to_string()));
    }
    Ok(numerator / (scale * delta.powf(theta / 2.0)))
}

/// Slack of the increment-mean bound
/// E R_{Π(t−τ)} − (E R*_{Π(t),k} − E R*_{Π(τ),k}); nonnegative for
/// every k ≥ 1 and τ ≤ t.
pub fn increment_mean_slack(d: &UrnDistribution, tau: f64, t: f64, k: u32) -> Result<f64> {
    if !(tau >= 0.0 && t >= tau) {
        return Err(Error::invalid(format!("need 0 ≤ tau ≤ t, got ({tau}, {t})")));
    }
    let upper = expected_occupancy(d, t - tau, 1, SamplingRegime::Poissonized)?;
    let at_t = expected_occupancy(d, t, k, SamplingRegime::Poissonized)?;
    let at_tau = expected_occupancy(d, tau, k, SamplingRegime::Poissonized)?;
    Ok(upper - (at_t - at_tau))
}

/// Wiener-limit verdict for the θ = 1 family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WienerReport {
    pub n: u64,
    pub m_reps: u64,
    pub regime: SamplingRegime,
    pub grid: Vec<f64>,
    /// Sample variance of the normalized count at each grid time.
    pub variances: Vec<f64>,
    /// Monte-Carlo standard error of each variance.
    pub variance_se: Vec<f64>,
    /// Least-squares fit of variance against time.
    pub slope: f64,
    pub intercept: f64,
    /// Variance at t = 1.
    pub endpoint_variance: f64,
    /// Var(t=0.5)/Var(t=1) when the grid contains 0.5.
    pub half_time_ratio: Option<f64>,
    /// Correlations of adjacent-interval increments across replications.
    pub increment_correlations: Vec<f64>,
    pub low_replication: bool,
    pub checks: Vec<CheckOutcome>,
    pub overall_pass: bool,
}

/// Check the Wiener limit of the θ = 1 family: normalized counts should
/// show variance growing linearly in t with unit slope and uncorrelated
/// increments over disjoint intervals.
pub fn wiener_limit_check(cfg: &ExperimentConfig) -> Result<WienerReport> {
    cfg.validate()?;
    if !matches!(cfg.distribution, DistributionSpec::LogZipf { .. }) {
        return Err(Error::config("the wiener limit check needs the logarithmic (theta = 1) family"));
    }
    let d = cfg.distribution.build()?;
    let table = MomentTable::build(&d, cfg.n, &cfg.grid, cfg.kmax)?;
    let paths: Vec<Vec<f64>> = (0..cfg.m_reps)
        .into_par_iter()
        .map(|rep| {
            let seed = child_seed(cfg.master_seed, rep);
            let record = run_path(&d, cfg.n, &cfg.grid, cfg.kmax, cfg.regime, seed)
                .map_err(|e| Error::numerical("wiener_limit_check", format!("replication {rep}: {e}")))?;
            let norm = normalize_path(&record, &table)
                .map_err(|e| Error::numerical("wiener_limit_check", format!("replication {rep}: {e}")))?;
            Ok(norm.values.iter().map(|row| row[0]).collect())
        })
        .collect::<Result<_>>()?;

    let m = cfg.m_reps as f64;
    let g_len = cfg.grid.len();
    let mut means = vec![0.0; g_len];
    for p in &paths {
        for (acc, &v) in means.iter_mut().zip(p) {
            *acc += v / m;
        }
    }
    let mut variances = vec![0.0; g_len];
    for p in &paths {
        for g in 0..g_len {
            variances[g] += (p[g] - means[g]).powi(2) / (m - 1.0);
        }
    }
    let variance_se: Vec<f64> = variances.iter().map(|v| v * (2.0 / (m - 1.0)).sqrt()).collect();

    // Least squares of variance against grid time.
    let tbar = cfg.grid.iter().sum::<f64>() / g_len as f64;
    let vbar = variances.iter().sum::<f64>() / g_len as f64;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (t, v) in cfg.grid.iter().zip(&variances) {
        sxx += (t - tbar).powi(2);
        sxy += (t - tbar) * (v - vbar);
    }
    if sxx <= 0.0 {
        return Err(Error::InsufficientData(
            "variance regression needs at least two distinct grid times".to_string(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = vbar - slope * tbar;

    let endpoint_variance = *variances.last().expect("nonempty grid");
    let half_time_ratio = cfg
        .grid
        .iter()
        .position(|&t| t == 0.5)
        .map(|g| variances[g] / endpoint_variance);

    let mut increment_correlations = Vec::new();
    for g in 1..g_len.saturating_sub(1) {
        let a: Vec<f64> = paths.iter().map(|p| p[g] - p[g - 1]).collect();
        let b: Vec<f64> = paths.iter().map(|p| p[g + 1] - p[g]).collect();
        increment_correlations.push(correlation(&a, &b));
    }
    if g_len >= 2 {
        let a: Vec<f64> = paths.iter().map(|p| p[0]).collect();
        let b: Vec<f64> = paths.iter().map(|p| p[1] - p[0]).collect();
        increment_correlations.insert(0, correlation(&a, &b));
    }

    let tol = &cfg.tolerances;
    let m_sqrt = m.sqrt();
    // SE of the regression slope under independent variance estimates,
    // and of a correlation near zero.
    let slope_se = {
        let mut acc = 0.0;
        for (t, se) in cfg.grid.iter().zip(&variance_se) {
            acc += ((t - tbar) / sxx * se).powi(2);
        }
        acc.sqrt()
    };
    let corr_se = 1.0 / m_sqrt;
    let low_replication = (cfg.m_reps as usize) < KS_MIN_SAMPLES;

    let mut checks = Vec::new();
    checks.push(CheckOutcome {
        name: "variance slope near 1".to_string(),
        passed: (slope - 1.0).abs() <= tol.relative.max(tol.se_multiplier * slope_se),
        detail: format!("slope {slope:.4} (SE {slope_se:.4}), band ±{:.4}", tol.relative.max(tol.se_multiplier * slope_se)),
    });
    checks.push(CheckOutcome {
        name: "variance intercept near 0".to_string(),
        passed: intercept.abs() <= tol.relative.max(tol.se_multiplier * slope_se),
        detail: format!("intercept {intercept:.4}"),
    });
    checks.push(CheckOutcome {
        name: "endpoint variance near 1".to_string(),
        passed: (endpoint_variance - 1.0).abs()
            <= tol.relative.max(tol.se_multiplier * variance_se[g_len - 1]),
        detail: format!("Var(1) = {endpoint_variance:.4} (SE {:.4})", variance_se[g_len - 1]),
    });
    if let Some(ratio) = half_time_ratio {
        checks.push(CheckOutcome {
            name: "half-time variance ratio near 0.5".to_string(),
            passed: (ratio - 0.5).abs() <= 0.5 * tol.relative.max(tol.se_multiplier * corr_se),
            detail: format!("Var(0.5)/Var(1) = {ratio:.4}"),
        });
    }
    for (idx, &rho) in increment_correlations.iter().enumerate() {
        checks.push(CheckOutcome {
            name: format!("increment correlation {idx} near 0"),
            passed: rho.abs() <= tol.increment_corr.max(tol.se_multiplier * corr_se),
            detail: format!("rho = {rho:.4} (SE {corr_se:.4})"),
        });
    }

    let overall_pass = checks.iter().all(|c| c.passed);
    Ok(WienerReport {
        n: cfg.n,
        m_reps: cfg.m_reps,
        regime: cfg.regime,
        grid: cfg.grid.clone(),
        variances,
        variance_se,
        slope,
        intercept,
        endpoint_variance,
        half_time_ratio,
        increment_correlations,
        low_replication,
        checks,
        overall_pass,
    })
}

/// Pearson correlation; zero for degenerate inputs so degenerate
/// configurations report cleanly instead of propagating NaN.
fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let m = a.len() as f64;
    let ma = a.iter().sum::<f64>() / m;
    let mb = b.iter().sum::<f64>() / m;
    let mut saa = 0.0;
    let mut sbb = 0.0;
    let mut sab = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        saa += (x - ma).powi(2);
        sbb += (y - mb).powi(2);
        sab += (x - ma) * (y - mb);
    }
    if saa <= 0.0 || sbb <= 0.0 {
        return 0.0;
    }
    sab / (saa * sbb).sqrt()
}
