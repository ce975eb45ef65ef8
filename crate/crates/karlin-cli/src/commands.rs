//! Subcommand implementations.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use karlin::seed::child_seed;
use karlin::DistributionSpec;

use crate::config::{parse_config, OutputFormat};
use crate::output::{write_json_report, Cell, Table};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] karlin::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Global flags that override config-file settings.
pub struct Overrides {
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub format: Option<OutputFormat>,
}

impl Overrides {
    fn resolve_dir(&self, configured: Option<&Path>) -> PathBuf {
        self.out_dir
            .clone()
            .or_else(|| configured.map(Path::to_path_buf))
            .or_else(|| std::env::var_os("KARLIN_OUT_DIR").map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."))
    }

    fn resolve_formats(&self, configured: &[OutputFormat]) -> Vec<OutputFormat> {
        match self.format {
            Some(format) => vec![format],
            None => configured.to_vec(),
        }
    }
}

struct Prepared {
    experiment: karlin::ExperimentConfig,
    out_dir: PathBuf,
    formats: Vec<OutputFormat>,
}

fn load(path: &Path, ov: &Overrides) -> Result<Prepared, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut file = parse_config(&text).map_err(|errors| CliError::Config(errors.join("\n")))?;
    if let Some(seed) = ov.seed {
        file.experiment.master_seed = seed;
    }
    let out_dir = ov.resolve_dir(file.output.directory.as_deref());
    let formats = ov.resolve_formats(&file.output.formats);
    Ok(Prepared { experiment: file.experiment_config(), out_dir, formats })
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

#[derive(Debug, clap::Args)]
pub struct TheoryArgs {
    /// Regular-variation index of the urn family.
    #[arg(long)]
    pub theta: f64,
    /// Occupancy threshold of the first coordinate.
    #[arg(long, default_value_t = 1)]
    pub i: u32,
    /// Occupancy threshold of the second coordinate.
    #[arg(long, default_value_t = 1)]
    pub j: u32,
    /// Time of the first coordinate.
    #[arg(long, default_value_t = 1.0)]
    pub tau: f64,
    /// Time of the second coordinate.
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    /// Tabulate every threshold pair up to this bound instead of the
    /// single (i, j) point; needs --grid.
    #[arg(long, requires = "grid")]
    pub nu: Option<u32>,
    /// Comma-separated time grid for table mode.
    #[arg(long, value_delimiter = ',')]
    pub grid: Option<Vec<f64>>,
}

/// Evaluate the limit covariance kernel: a single value on stdout, or
/// a table over all threshold pairs and grid times.
pub fn theory(args: &TheoryArgs, ov: &Overrides) -> Result<i32, CliError> {
    match &args.grid {
        None => {
            let value = karlin::cov_limit(args.i, args.j, args.tau, args.t, args.theta)?;
            println!("{value:.16e}");
        }
        Some(grid) => {
            let nu = args.nu.unwrap_or(1);
            if nu < 1 {
                return Err(CliError::Config("nu must be at least 1".to_string()));
            }
            let mut table = Table::new(&["i", "j", "tau", "t", "theta", "c_star"]);
            for i in 1..=nu {
                for j in 1..=nu {
                    for &tau in grid {
                        for &t in grid {
                            let value = karlin::cov_limit(i, j, tau, t, args.theta)?;
                            table.push(vec![
                                Cell::Int(u64::from(i)),
                                Cell::Int(u64::from(j)),
                                Cell::Float(tau),
                                Cell::Float(t),
                                Cell::Float(args.theta),
                                Cell::Float(value),
                            ]);
                        }
                    }
                }
            }
            let dir = ov.resolve_dir(None);
            let formats = ov.resolve_formats(&[OutputFormat::Csv]);
            for path in table.write(&dir, "theory", &formats)? {
                println!("wrote {}", path.display());
            }
        }
    }
    Ok(0)
}

/// Simulate replicated occupancy paths, writing raw and normalized
/// counts per replication, checkpoint, and threshold.
pub fn simulate(config: &Path, ov: &Overrides) -> Result<i32, CliError> {
    let prepared = load(config, ov)?;
    let exp = &prepared.experiment;
    let d = exp.distribution.build()?;
    let moments = karlin::MomentTable::build(&d, exp.n, &exp.grid, exp.kmax)?;
    let paths: Vec<(karlin::PathRecord, karlin::NormalizedPath)> = (0..exp.m_reps)
        .into_par_iter()
        .map(|rep| {
            let record = karlin::run_path(
                &d,
                exp.n,
                &exp.grid,
                exp.kmax,
                exp.regime,
                child_seed(exp.master_seed, rep),
            )?;
            let normalized = karlin::normalize_path(&record, &moments)?;
            Ok((record, normalized))
        })
        .collect::<karlin::Result<_>>()?;

    let mut table = Table::new(&["rep", "t", "k", "raw", "normalized"]);
    for (rep, (record, normalized)) in paths.iter().enumerate() {
        for (g, &t) in record.grid.iter().enumerate() {
            for k in 1..=exp.kmax as usize {
                table.push(vec![
                    Cell::Int(rep as u64),
                    Cell::Float(t),
                    Cell::Int(k as u64),
                    Cell::Int(record.raw[g][k - 1]),
                    Cell::Float(normalized.values[g][k - 1]),
                ]);
            }
        }
    }
    println!(
        "simulated {} {} paths of n = {} (normalization alpha_n = {:.16e})",
        exp.m_reps, exp.regime, exp.n, moments.alpha_n
    );
    for path in table.write(&prepared.out_dir, "simulate", &prepared.formats)? {
        println!("wrote {}", path.display());
    }
    Ok(0)
}

/// Sample centered Gaussian paths with the limit kernel covariance on
/// the configured grid.
pub fn gp(config: &Path, ov: &Overrides) -> Result<i32, CliError> {
    let prepared = load(config, ov)?;
    let exp = &prepared.experiment;
    let theta = match exp.distribution {
        DistributionSpec::Zipf { theta, .. } if theta < 1.0 => theta,
        _ => {
            return Err(CliError::Config(
                "gp needs a zipf distribution with theta below 1; only there is the limit a Gaussian process with the covariance kernel".to_string(),
            ))
        }
    };
    let params = karlin::KernelParams::new(theta, exp.kmax)?;
    let kernel = karlin::build_kernel_matrix(params, &exp.grid)?;
    let paths = karlin::sample_gaussian_paths(&kernel, exp.master_seed, exp.m_reps);

    let mut table = Table::new(&["rep", "t", "k", "value"]);
    for (rep, flat) in paths.iter().enumerate() {
        for (g, &t) in exp.grid.iter().enumerate() {
            for i in 1..=exp.kmax {
                table.push(vec![
                    Cell::Int(rep as u64),
                    Cell::Float(t),
                    Cell::Int(u64::from(i)),
                    Cell::Float(flat[kernel.index(g, i)]),
                ]);
            }
        }
    }
    println!(
        "sampled {} Gaussian paths on {} grid times (dimension {})",
        exp.m_reps,
        exp.grid.len(),
        kernel.dim()
    );
    for path in table.write(&prepared.out_dir, "gp", &prepared.formats)? {
        println!("wrote {}", path.display());
    }
    Ok(0)
}

/// Run the replicated verification experiment for the configured
/// family and report one verdict per check; exits nonzero when a check
/// fails.
pub fn verify(config: &Path, ov: &Overrides) -> Result<i32, CliError> {
    let prepared = load(config, ov)?;
    let exp = &prepared.experiment;
    let pass = if matches!(exp.distribution, DistributionSpec::LogZipf { .. }) {
        let report = karlin::wiener_limit_check(exp)?;
        for check in &report.checks {
            println!("{} {}: {}", verdict(check.passed), check.name, check.detail);
        }
        write_json_report(&prepared.out_dir, "verify_report", &report)?;

        let mut variances = Table::new(&["t", "variance", "variance_se"]);
        for ((t, v), se) in report.grid.iter().zip(&report.variances).zip(&report.variance_se) {
            variances.push(vec![Cell::Float(*t), Cell::Float(*v), Cell::Float(*se)]);
        }
        variances.write(&prepared.out_dir, "verify_wiener", &prepared.formats)?;

        let mut correlations = Table::new(&["pair", "correlation"]);
        for (idx, rho) in report.increment_correlations.iter().enumerate() {
            correlations.push(vec![Cell::Int(idx as u64), Cell::Float(*rho)]);
        }
        correlations.write(&prepared.out_dir, "verify_increments", &prepared.formats)?;
        report.overall_pass
    } else {
        let report = karlin::run_experiment(exp)?;
        for check in &report.checks {
            println!("{} {}: {}", verdict(check.passed), check.name, check.detail);
        }
        write_json_report(&prepared.out_dir, "verify_report", &report)?;

        let nu = report.nu as usize;
        let dim = report.grid.len() * nu;
        let mut entries = Table::new(&[
            "i",
            "tau",
            "j",
            "t",
            "empirical",
            "kernel",
            "abs_error",
            "rel_error",
            "standard_error",
            "tolerance",
            "within",
        ]);
        for r in 0..dim {
            for c in 0..dim {
                let idx = r * dim + c;
                let diff = (report.empirical_cov[idx] - report.kernel[idx]).abs();
                entries.push(vec![
                    Cell::Int((r % nu + 1) as u64),
                    Cell::Float(report.grid[r / nu]),
                    Cell::Int((c % nu + 1) as u64),
                    Cell::Float(report.grid[c / nu]),
                    Cell::Float(report.empirical_cov[idx]),
                    Cell::Float(report.kernel[idx]),
                    Cell::Float(diff),
                    Cell::Float(report.relative_errors[idx]),
                    Cell::Float(report.standard_errors[idx]),
                    Cell::Float(report.entry_tolerances[idx]),
                    Cell::Flag(diff <= report.entry_tolerances[idx]),
                ]);
            }
        }
        entries.write(&prepared.out_dir, "verify_cov", &prepared.formats)?;
        report.overall_pass
    };
    println!("overall: {}", verdict(pass));
    Ok(if pass { 0 } else { 1 })
}

/// Estimate the tail index from replicated endpoint occupancy counts.
pub fn estimate(config: &Path, ov: &Overrides) -> Result<i32, CliError> {
    let prepared = load(config, ov)?;
    let exp = &prepared.experiment;
    if exp.n < 2 {
        return Err(CliError::Config("estimate needs n at least 2".to_string()));
    }
    let d = exp.distribution.build()?;
    let endpoint_grid = [1.0];
    let estimates: Vec<(u64, f64)> = (0..exp.m_reps)
        .into_par_iter()
        .map(|rep| {
            let record = karlin::run_path(
                &d,
                exp.n,
                &endpoint_grid,
                1,
                exp.regime,
                child_seed(exp.master_seed, rep),
            )?;
            let r_n = record.raw[0][0].max(1);
            Ok((r_n, karlin::estimate_theta(r_n, exp.n)?))
        })
        .collect::<karlin::Result<_>>()?;

    let m = estimates.len() as f64;
    let mean = estimates.iter().map(|&(_, est)| est).sum::<f64>() / m;
    let sd = if estimates.len() > 1 {
        (estimates.iter().map(|&(_, est)| (est - mean).powi(2)).sum::<f64>() / (m - 1.0)).sqrt()
    } else {
        0.0
    };

    let mut table = Table::new(&["rep", "r_n", "theta_hat"]);
    for (rep, &(r_n, est)) in estimates.iter().enumerate() {
        table.push(vec![Cell::Int(rep as u64), Cell::Int(r_n), Cell::Float(est)]);
    }
    println!("theta_hat mean {mean:.6}, sd {sd:.6}, {} replications", exp.m_reps);
    if let Some(theta) = d.theta() {
        println!("family index {theta}");
    }
    for path in table.write(&prepared.out_dir, "estimate", &prepared.formats)? {
        println!("wrote {}", path.display());
    }
    Ok(0)
}
