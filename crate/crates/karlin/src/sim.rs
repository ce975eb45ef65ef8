//! Path simulation of the occupancy process.
//!
//! A path follows the threshold counts R*_{m,k} (urns holding at least
//! k balls after m throws) along a time grid, under either a fixed ball
//! budget or a Poissonized one. Everything is driven by a single u64
//! seed per replication, so any path can be regenerated in isolation.

use std::collections::HashMap;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{SampledUrn, UrnDistribution};
use crate::theory::MomentTable;
use crate::SamplingRegime;

/// Urns indexed at or below this bound live in a flat array; rarer urns
/// fall back to a hash map.
const DENSE_PREFIX: u64 = 1024;

/// Ball counts per urn together with incrementally maintained threshold
/// counts.
///
/// Balls reported as [`SampledUrn::Fresh`] land beyond the addressable
/// index range, where individual urn probabilities are so small that two
/// such balls sharing an urn is impossible in any feasible sample; each
/// one is therefore counted as a previously unseen singleton urn.
#[derive(Debug, Clone)]
pub struct OccupancyState {
    dense: Vec<u32>,
    sparse: HashMap<u64, u32>,
    fresh_urns: u64,
    r_star: Vec<u64>,
    balls_thrown: u64,
}

impl OccupancyState {
    pub fn new(kmax: u32) -> Result<Self> {
        if kmax < 1 {
            return Err(Error::invalid("occupancy state: kmax must be at least 1"));
        }
        Ok(OccupancyState {
            dense: vec![0; DENSE_PREFIX as usize],
            sparse: HashMap::new(),
            fresh_urns: 0,
            r_star: vec![0; kmax as usize],
            balls_thrown: 0,
        })
    }

    pub fn kmax(&self) -> u32 {
        self.r_star.len() as u32
    }

    /// Threshold counts: entry k−1 holds the number of urns with at
    /// least k balls.
    pub fn r_star(&self) -> &[u64] {
        &self.r_star
    }

    pub fn balls_thrown(&self) -> u64 {
        self.balls_thrown
    }

    /// Balls that landed beyond the addressable index range, each
    /// counted as its own singleton urn.
    pub fn fresh_urns(&self) -> u64 {
        self.fresh_urns
    }

    /// Ball count of a 1-based urn index.
    pub fn count(&self, urn: u64) -> u32 {
        if urn >= 1 && urn <= DENSE_PREFIX {
            self.dense[(urn - 1) as usize]
        } else {
            self.sparse.get(&urn).copied().unwrap_or(0)
        }
    }

    /// All urns holding at least one ball, excluding fresh singletons.
    pub fn occupied_counts(&self) -> impl Iterator<Item = (u64, u32)> + '_ {
        let dense = self
            .dense
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| (i as u64 + 1, c));
        dense.chain(self.sparse.iter().map(|(&i, &c)| (i, c)))
    }

    pub fn throw(&mut self, urn: SampledUrn) {
        self.balls_thrown += 1;
        let reached = match urn {
            SampledUrn::Fresh => {
                self.fresh_urns += 1;
                1
            }
            SampledUrn::Index(i) => {
                let slot = if i >= 1 && i <= DENSE_PREFIX {
                    &mut self.dense[(i - 1) as usize]
                } else {
                    self.sparse.entry(i).or_insert(0)
                };
                *slot += 1;
                *slot
            }
        };
        if reached as usize <= self.r_star.len() {
            self.r_star[reached as usize - 1] += 1;
        }
    }

    /// Threshold counts recomputed from scratch out of the stored ball
    /// counts; equals [`Self::r_star`] for a consistent state.
    pub fn recount(&self) -> Vec<u64> {
        let mut tally = vec![0u64; self.r_star.len()];
        for (_, c) in self.occupied_counts() {
            for k in 1..=(c as usize).min(tally.len()) {
                tally[k - 1] += 1;
            }
        }
        tally[0] += self.fresh_urns;
        tally
    }
}

/// Raw threshold counts of one simulated path along a time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathRecord {
    /// Ascending checkpoint times in (0, 1], ending at 1.
    pub grid: Vec<f64>,
    /// `raw[g][k-1]` = R*_{·,k} at checkpoint g.
    pub raw: Vec<Vec<u64>>,
    /// Ball budget (exact for fixed sampling, Poisson intensity otherwise).
    pub n: u64,
    pub regime: SamplingRegime,
    /// Replication seed the path was generated from.
    pub seed: u64,
}

/// A path after centering by exact expectations and scaling by the
/// counting-function normalization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizedPath {
    pub grid: Vec<f64>,
    /// `values[g][k-1]` = (raw − E raw) / √alpha_n.
    pub values: Vec<Vec<f64>>,
    pub alpha_n: f64,
}

fn check_path_grid(grid: &[f64]) -> Result<()> {
    crate::theory::check_grid(grid)?;
    if *grid.last().expect("nonempty grid") != 1.0 {
        return Err(Error::invalid("path grid must end at t = 1"));
    }
    Ok(())
}

/// Simulate one path, returning both the record and the final state.
pub(crate) fn run_path_state(
    d: &UrnDistribution,
    n: u64,
    grid: &[f64],
    kmax: u32,
    regime: SamplingRegime,
    seed: u64,
) -> Result<(PathRecord, OccupancyState)> {
    check_path_grid(grid)?;
    let mut state = OccupancyState::new(kmax)?;
    let record = |raw: Vec<Vec<u64>>| PathRecord { grid: grid.to_vec(), raw, n, regime, seed };
    if n == 0 {
        let raw = vec![vec![0; kmax as usize]; grid.len()];
        return Ok((record(raw), state));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut raw = Vec::with_capacity(grid.len());
    match regime {
        SamplingRegime::Fixed => {
            for &t in grid {
                let target = (n as f64 * t).floor() as u64;
                while state.balls_thrown() < target {
                    let u: f64 = rng.gen();
                    state.throw(d.quantile(u));
                }
                raw.push(state.r_star().to_vec());
            }
        }
        SamplingRegime::Poissonized => {
            let total_balls = Poisson::new(n as f64)
                .map_err(|e| Error::invalid(format!("poisson budget: {e}")))?
                .sample(&mut rng) as u64;
            let mut remaining = total_balls;
            let mut prev_t = 0.0;
            for (g, &t) in grid.iter().enumerate() {
                let take = if g + 1 == grid.len() {
                    remaining
                } else {
                    let p = ((t - prev_t) / (1.0 - prev_t)).clamp(0.0, 1.0);
                    Binomial::new(remaining, p)
                        .map_err(|e| Error::invalid(format!("binomial thinning: {e}")))?
                        .sample(&mut rng)
                };
                for _ in 0..take {
                    let u: f64 = rng.gen();
                    state.throw(d.quantile(u));
                }
                remaining -= take;
                prev_t = t;
                raw.push(state.r_star().to_vec());
            }
        }
    }
    Ok((record(raw), state))
}

/// Simulate one path of threshold counts.
///
/// Fixed sampling throws exactly n balls, recording counts after
/// ⌊n·t⌋ throws for each grid time t. Poissonized sampling draws a
/// Poisson(n) total and distributes it over the grid increments by
/// binomial thinning, which makes the checkpoint counts a genuine
/// Poisson process observed at the grid times.
pub fn run_path(
    d: &UrnDistribution,
    n: u64,
    grid: &[f64],
    kmax: u32,
    regime: SamplingRegime,
    seed: u64,
) -> Result<PathRecord> {
    run_path_state(d, n, grid, kmax, regime, seed).map(|(record, _)| record)
}

/// Center a raw path by the exact expectations in the moment table and
/// scale by √alpha_n.
pub fn normalize_path(record: &PathRecord, table: &MomentTable) -> Result<NormalizedPath> {
    if record.n != table.n {
        return Err(Error::invalid(format!(
            "normalize: path has n = {}, moment table has n = {}",
            record.n, table.n
        )));
    }
    if record.grid != table.grid {
        return Err(Error::invalid("normalize: path and moment table grids differ"));
    }
    let width = table.kmax as usize;
    if record.raw.iter().any(|row| row.len() != width) {
        return Err(Error::invalid("normalize: path width does not match moment table kmax"));
    }
    let means = table.values(record.regime);
    let scale = table.alpha_n.sqrt();
    let values = record
        .raw
        .iter()
        .zip(means)
        .map(|(row, mean_row)| {
            row.iter().zip(mean_row).map(|(&r, &m)| (r as f64 - m) / scale).collect()
        })
        .collect();
    Ok(NormalizedPath { grid: record.grid.clone(), values, alpha_n: table.alpha_n })
}

/// Path of counts of urns holding exactly k balls, recovered as the
/// difference of adjacent threshold counts.
pub fn differences_exact_k(record: &PathRecord, k: u32) -> Result<Vec<u64>> {
    let width = record.raw.first().map_or(0, Vec::len);
    if k < 1 || (k as usize) >= width {
        return Err(Error::invalid(format!(
            "exact-count difference needs 1 ≤ k < kmax = {width}, got {k}"
        )));
    }
    record
        .raw
        .iter()
        .map(|row| {
            row[k as usize - 1].checked_sub(row[k as usize]).ok_or_else(|| {
                Error::invalid("exact-count difference needs threshold counts nonincreasing in k")
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::child_seed;

    const GRID41: [f64; 4] = [0.25, 0.5, 0.75, 1.0];

    #[test]
    fn state_tracks_thresholds_incrementally() {
        let mut s = OccupancyState::new(3).unwrap();
        for urn in [1u64, 2, 1, 5_000_000, 1, 2, 7] {
            s.throw(SampledUrn::Index(urn));
        }
        s.throw(SampledUrn::Fresh);
        assert_eq!(s.balls_thrown(), 8);
        assert_eq!(s.count(1), 3);
        assert_eq!(s.count(2), 2);
        assert_eq!(s.count(5_000_000), 1);
        assert_eq!(s.count(3), 0);
        assert_eq!(s.fresh_urns(), 1);
        assert_eq!(s.r_star(), &[5, 2, 1]);
        assert_eq!(s.recount(), s.r_star());
    }

    #[test]
    fn zero_budget_gives_zero_paths() {
        let d = UrnDistribution::zipf(0.5, 1_000, 0.01).unwrap();
        for regime in [SamplingRegime::Fixed, SamplingRegime::Poissonized] {
            let rec = run_path(&d, 0, &GRID41, 2, regime, 7).unwrap();
            assert!(rec.raw.iter().all(|row| row.iter().all(|&v| v == 0)));
        }
    }

    #[test]
    fn grid_must_be_ascending_and_end_at_one() {
        let d = UrnDistribution::zipf(0.5, 1_000, 0.01).unwrap();
        assert!(run_path(&d, 10, &[0.5, 0.25, 1.0], 1, SamplingRegime::Fixed, 7).is_err());
        assert!(run_path(&d, 10, &[0.5, 0.75], 1, SamplingRegime::Fixed, 7).is_err());
        assert!(run_path(&d, 10, &[], 1, SamplingRegime::Fixed, 7).is_err());
        assert!(run_path(&d, 10, &GRID41, 0, SamplingRegime::Fixed, 7).is_err());
    }

    #[test]
    fn fixed_paths_hit_checkpoints_exactly_and_stay_monotone() {
        let d = UrnDistribution::zipf(0.5, 20_000, 0.01).unwrap();
        let grid = [0.3, 0.6, 1.0];
        let (rec, state) =
            run_path_state(&d, 1_000, &grid, 4, SamplingRegime::Fixed, 42).unwrap();
        assert_eq!(state.balls_thrown(), 1_000);
        assert_eq!(rec.raw.last().unwrap().as_slice(), state.r_star());
        assert_eq!(state.recount(), state.r_star());
        for g in 0..grid.len() {
            for k in 0..4 {
                if g > 0 {
                    assert!(rec.raw[g][k] >= rec.raw[g - 1][k], "not monotone in time");
                }
                if k > 0 {
                    assert!(rec.raw[g][k] <= rec.raw[g][k - 1], "not monotone in threshold");
                }
            }
        }
    }

    #[test]
    fn paths_are_deterministic_in_the_seed() {
        let d = UrnDistribution::zipf(0.5, 20_000, 0.01).unwrap();
        for regime in [SamplingRegime::Fixed, SamplingRegime::Poissonized] {
            let a = run_path(&d, 5_000, &GRID41, 3, regime, 1967).unwrap();
            let b = run_path(&d, 5_000, &GRID41, 3, regime, 1967).unwrap();
            assert_eq!(a, b);
            let c = run_path(&d, 5_000, &GRID41, 3, regime, 1968).unwrap();
            assert_ne!(a.raw, c.raw);
        }
    }

    #[test]
    fn two_fair_urns_match_the_exact_mean() {
        let d = UrnDistribution::finite_explicit(vec![0.5, 0.5]).unwrap();
        let reps = 100_000u64;
        let mut sum = 0u64;
        for rep in 0..reps {
            let rec =
                run_path(&d, 2, &[1.0], 1, SamplingRegime::Fixed, child_seed(31, rep)).unwrap();
            sum += rec.raw[0][0];
        }
        let mean = sum as f64 / reps as f64;
        assert!((mean - 1.5).abs() <= 0.01, "mean {mean}");
    }

    #[test]
    fn zipf_endpoint_is_on_the_limit_scale() {
        let d = UrnDistribution::zipf(0.5, 1_000_000, 1e-4).unwrap();
        let n = 1_000_000u64;
        let rec = run_path(&d, n, &[1.0], 1, SamplingRegime::Fixed, 1967).unwrap();
        let alpha = d.alpha(n as f64).unwrap() as f64;
        let ratio = rec.raw[0][0] as f64 / alpha;
        let gamma_half = std::f64::consts::PI.sqrt();
        assert!(
            (ratio - gamma_half).abs() <= 0.15 * gamma_half,
            "R/alpha = {ratio}, limit {gamma_half}"
        );
    }

    #[test]
    fn poissonized_top_urn_counts_have_poisson_moments() {
        let probs = [0.30, 0.25, 0.20, 0.15, 0.10];
        let d = UrnDistribution::finite_explicit(probs.to_vec()).unwrap();
        let (n, reps) = (400u64, 1_500u64);
        let mut sums = [0.0f64; 5];
        let mut squares = [0.0f64; 5];
        for rep in 0..reps {
            let (_, state) = run_path_state(
                &d,
                n,
                &[1.0],
                1,
                SamplingRegime::Poissonized,
                child_seed(90_210, rep),
            )
            .unwrap();
            for u in 0..probs.len() {
                let c = state.count(u as u64 + 1) as f64;
                sums[u] += c;
                squares[u] += c * c;
            }
        }
        let m = reps as f64;
        for (u, &p) in probs.iter().enumerate() {
            let lambda = n as f64 * p;
            let mean = sums[u] / m;
            let var = (squares[u] - m * mean * mean) / (m - 1.0);
            let mean_se = (lambda / m).sqrt();
            let var_se = ((2.0 * lambda * lambda + lambda) / m).sqrt();
            assert!(
                (mean - lambda).abs() <= 3.0 * mean_se,
                "urn {u}: mean {mean} vs lambda {lambda}"
            );
            assert!(
                (var - lambda).abs() <= 3.0 * var_se,
                "urn {u}: var {var} vs lambda {lambda}"
            );
        }
    }

    #[test]
    fn tail_draws_reach_beyond_the_prefix() {
        let d = UrnDistribution::log_zipf(50, 0.2).unwrap();
        let (rec, state) =
            run_path_state(&d, 5_000, &[1.0], 2, SamplingRegime::Fixed, 11).unwrap();
        assert!(state.fresh_urns() > 0, "no draws beyond the addressable range");
        assert!(
            state.occupied_counts().any(|(i, _)| i > 50),
            "no resolved tail indices beyond the truncation"
        );
        assert_eq!(state.recount(), state.r_star());
        assert_eq!(rec.raw[0].as_slice(), state.r_star());
    }

    #[test]
    fn normalized_paths_are_centered() {
        let d = UrnDistribution::zipf(0.5, 20_000, 0.01).unwrap();
        let n = 2_000u64;
        let table = MomentTable::build(&d, n, &GRID41, 2).unwrap();
        for regime in [SamplingRegime::Fixed, SamplingRegime::Poissonized] {
            let reps = 300u64;
            let mut mean = vec![vec![0.0; 2]; GRID41.len()];
            for rep in 0..reps {
                let rec = run_path(&d, n, &GRID41, 2, regime, child_seed(5, rep)).unwrap();
                let norm = normalize_path(&rec, &table).unwrap();
                for g in 0..GRID41.len() {
                    for k in 0..2 {
                        mean[g][k] += norm.values[g][k] / reps as f64;
                    }
                }
            }
            for row in &mean {
                for &v in row {
                    assert!(v.abs() <= 0.25, "normalized mean {v} too far from zero");
                }
            }
        }
    }

    #[test]
    fn normalize_rejects_mismatched_tables() {
        let d = UrnDistribution::zipf(0.5, 20_000, 0.01).unwrap();
        let table = MomentTable::build(&d, 2_000, &GRID41, 2).unwrap();
        let rec = run_path(&d, 2_000, &GRID41, 2, SamplingRegime::Fixed, 3).unwrap();
        assert!(normalize_path(&rec, &table).is_ok());
        let other_n = MomentTable::build(&d, 2_001, &GRID41, 2).unwrap();
        assert!(normalize_path(&rec, &other_n).is_err());
        let other_grid = MomentTable::build(&d, 2_000, &[0.5, 1.0], 2).unwrap();
        assert!(normalize_path(&rec, &other_grid).is_err());
        let other_k = MomentTable::build(&d, 2_000, &GRID41, 3).unwrap();
        assert!(normalize_path(&rec, &other_k).is_err());
    }

    #[test]
    fn exact_count_differences_match_a_recount() {
        let d = UrnDistribution::zipf(0.5, 20_000, 0.01).unwrap();
        let (rec, state) =
            run_path_state(&d, 3_000, &GRID41, 4, SamplingRegime::Fixed, 8).unwrap();
        for k in 1..4u32 {
            let diffs = differences_exact_k(&rec, k).unwrap();
            let mut exact = state.occupied_counts().filter(|&(_, c)| c == k).count() as u64;
            if k == 1 {
                exact += state.fresh_urns();
            }
            assert_eq!(*diffs.last().unwrap(), exact, "k = {k}");
        }
        assert!(differences_exact_k(&rec, 0).is_err());
        assert!(differences_exact_k(&rec, 4).is_err());
    }
}
