//! Closed-form constants, limit covariance kernels, and exact
//! finite-intensity moments for the occupancy process.
//!
//! Everything here is deterministic numerics: the occupancy constants
//! K_k, the limiting Gaussian covariance kernel of the threshold-count
//! paths, the fixed-time covariances of the exact-count statistics, the
//! exact Poissonized finite-n covariances they approximate, expected
//! occupancy tables used for centering simulated paths, and the
//! variance normalization `b_n`.

use crate::error::{Error, Result};
use crate::model::UrnDistribution;
use crate::numeric::discrete::{binomial_tail_ge, poisson_tail_ge};
use crate::numeric::gamma::gamma_fn;
use crate::numeric::quad::{integrate, QuadOptions};
use crate::numeric::KahanSum;
use crate::SamplingRegime;

/// Rate threshold above which an urn's covariance term is evaluated via
/// "< threshold" probabilities instead of "≥ threshold" ones. Large-rate
/// urns have near-one tail probabilities whose difference would cancel;
/// small-rate urns have near-one complement probabilities with the same
/// problem in the other direction.
const COMPLEMENT_SWITCH: f64 = 30.0;

/// Largest admissible value of rate·(probability beyond the prefix) for
/// the analytic far-tail series; beyond this the alternating power-sum
/// series loses its monotone decay.
const FAR_TAIL_MAX_RATE: f64 = 0.5;

/// Validated kernel parameters: regular-variation index and the maximum
/// threshold component.
#[derive(Debug, Clone, Copy)]
pub struct KernelParams {
    pub theta: f64,
    pub nu: u32,
}

impl KernelParams {
    pub fn new(theta: f64, nu: u32) -> Result<Self> {
        check_theta(theta)?;
        if nu < 1 {
            return Err(Error::invalid("kernel params: nu must be at least 1"));
        }
        Ok(KernelParams { theta, nu })
    }
}

/// Exact occupancy expectations E R*_{·,k} on a time grid for both
/// sampling regimes, plus the variance normalization, precomputed once
/// per experiment and shared by every replication.
#[derive(Debug, Clone)]
pub struct MomentTable {
    pub grid: Vec<f64>,
    pub n: u64,
    pub kmax: u32,
    /// `fixed[g][k-1]` = E R*_{[n·grid[g]],k} under fixed ball counts.
    pub fixed: Vec<Vec<f64>>,
    /// `poissonized[g][k-1]` = E R*_{Π(n·grid[g]),k}.
    pub poissonized: Vec<Vec<f64>>,
    /// α(n) for θ < 1 and finite families; n·l*(n) when θ = 1.
    pub alpha_n: f64,
}

impl MomentTable {
    pub fn build(d: &UrnDistribution, n: u64, grid: &[f64], kmax: u32) -> Result<Self> {
        if n < 1 {
            return Err(Error::invalid("moment table: n must be at least 1"));
        }
        if kmax < 1 {
            return Err(Error::invalid("moment table: kmax must be at least 1"));
        }
        check_grid(grid)?;
        let nf = n as f64;
        let mut fixed = Vec::with_capacity(grid.len());
        let mut poissonized = Vec::with_capacity(grid.len());
        for &t in grid {
            let mut row_f = Vec::with_capacity(kmax as usize);
            let mut row_p = Vec::with_capacity(kmax as usize);
            for k in 1..=kmax {
                row_f.push(expected_occupancy(d, nf * t, k, SamplingRegime::Fixed)?);
                row_p.push(expected_occupancy(d, nf * t, k, SamplingRegime::Poissonized)?);
            }
            fixed.push(row_f);
            poissonized.push(row_p);
        }
        let alpha_n = match d.theta() {
            Some(theta) if theta >= 1.0 => nf * d.l_star(nf)?,
            _ => {
                let a = d.alpha(nf)?;
                if a == 0 {
                    return Err(Error::config(
                        "moment table: counting function is zero at n; nothing to normalize by",
                    ));
                }
                a as f64
            }
        };
        Ok(MomentTable { grid: grid.to_vec(), n, kmax, fixed, poissonized, alpha_n })
    }

    /// Expectation row for the requested regime.
    pub fn values(&self, regime: SamplingRegime) -> &[Vec<f64>] {
        match regime {
            SamplingRegime::Fixed => &self.fixed,
            SamplingRegime::Poissonized => &self.poissonized,
        }
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::invalid(format!("theta must lie in (0,1), got {theta}")));
    }
    Ok(())
}

pub(crate) fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::invalid("time grid must not be empty"));
    }
    let mut prev = 0.0;
    for &t in grid {
        if !(t > prev && t <= 1.0) {
            return Err(Error::invalid(format!(
                "time grid must be strictly ascending within (0,1], got entry {t}"
            )));
        }
        prev = t;
    }
    Ok(())
}

fn factorial(k: u32) -> f64 {
    (1..=k).fold(1.0, |acc, v| acc * v as f64)
}

/// The occupancy constant K_k: −Γ(1−θ) for k = 0 and θΓ(k−θ) for k ≥ 1.
pub fn k_const(k: u32, theta: f64) -> Result<f64> {
    check_theta(theta)?;
    if k == 0 {
        Ok(-gamma_fn(1.0 - theta))
    } else {
        Ok(theta * gamma_fn(k as f64 - theta))
    }
}

/// The same constant through its integral representation
/// ∫₀^∞ (r·y^{θ−r−1} − y^{θ−r−2})·e^{−1/y} dy, evaluated by quadrature
/// on (0, Y] plus an expansion of e^{−1/y} for the algebraic tail.
pub fn k_const_integral(r: u32, theta: f64) -> Result<f64> {
    check_theta(theta)?;
    let rf = r as f64;
    let split = 10.0;
    let opts = QuadOptions { abs_tol: 1e-12, rel_tol: 1e-12, ..QuadOptions::default() };
    let head = integrate(
        |y| {
            if y <= 0.0 {
                return 0.0;
            }
            (rf * y.powf(theta - rf - 1.0) - y.powf(theta - rf - 2.0)) * (-1.0 / y).exp()
        },
        0.0,
        split,
        opts,
    )?;
    let mut tail = KahanSum::new();
    let mut inv_fact = 1.0;
    for m in 0..60u32 {
        if m > 0 {
            inv_fact /= m as f64;
        }
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        let e1 = theta - rf - m as f64;
        let e2 = e1 - 1.0;
        let term = sign
            * inv_fact
            * (rf * split.powf(e1) / (rf + m as f64 - theta)
                - split.powf(e2) / (rf + m as f64 + 1.0 - theta));
        tail.add(term);
        if term.abs() < 1e-17 * (1.0 + tail.value().abs()) {
            break;
        }
    }
    Ok(head.value + tail.value())
}

fn pow00(base: f64, exp: u32) -> f64 {
    if exp == 0 {
        1.0
    } else {
        base.powi(exp as i32)
    }
}

/// Double sum shared by both kernel branches:
/// Σ_{s<i} Σ_{m<j} τ^s·t^m·K_{m+s} / ((t+τ)^{m+s−θ}·s!·m!).
fn kernel_cross_sum(i: u32, j: u32, tau: f64, t: f64, theta: f64) -> Result<f64> {
    let mut acc = KahanSum::new();
    for s in 0..i {
        for m in 0..j {
            let k = k_const(m + s, theta)?;
            let term = pow00(tau, s) * pow00(t, m) * k
                / ((t + tau).powf((m + s) as f64 - theta) * factorial(s) * factorial(m));
            acc.add(term);
        }
    }
    Ok(acc.value())
}

fn kernel_branch_lt(i: u32, j: u32, tau: f64, t: f64, theta: f64) -> Result<f64> {
    let mut head = KahanSum::new();
    for s in 0..i {
        for m in 0..(j - s) {
            let k = k_const(m + s, theta)?;
            let term = pow00(tau, s) * pow00(t - tau, m) * k
                / (t.powf((m + s) as f64 - theta) * factorial(s) * factorial(m));
            head.add(term);
        }
    }
    Ok(head.value() - kernel_cross_sum(i, j, tau, t, theta)?)
}

fn kernel_branch_ge(i: u32, j: u32, tau: f64, t: f64, theta: f64) -> Result<f64> {
    let mut head = KahanSum::new();
    for m in 0..j {
        head.add(k_const(m, theta)? / factorial(m));
    }
    Ok(t.powf(theta) * head.value() - kernel_cross_sum(i, j, tau, t, theta)?)
}

/// Limit covariance kernel c*_{ij}(τ,t) of the threshold-count paths,
/// with the 0⁰ = 1 convention. Arguments with τ > t are reduced through
/// the symmetry c*_{ij}(τ,t) = c*_{ji}(t,τ); either time at zero gives
/// zero. Valid on all nonnegative times (the kernel is homogeneous of
/// degree θ, so scales beyond [0,1] are meaningful).
pub fn cov_limit(i: u32, j: u32, tau: f64, t: f64, theta: f64) -> Result<f64> {
    check_theta(theta)?;
    if i < 1 || j < 1 {
        return Err(Error::invalid("cov_limit: component indices start at 1"));
    }
    if !(tau >= 0.0) || !(t >= 0.0) || !tau.is_finite() || !t.is_finite() {
        return Err(Error::invalid(format!(
            "cov_limit: times must be finite and nonnegative, got ({tau}, {t})"
        )));
    }
    if tau == 0.0 || t == 0.0 {
        return Ok(0.0);
    }
    if tau > t {
        return cov_limit(j, i, t, tau, theta);
    }
    let value =
        if i < j { kernel_branch_lt(i, j, tau, t, theta)? } else { kernel_branch_ge(i, j, tau, t, theta)? };
    if !value.is_finite() {
        return Err(Error::numerical("cov_limit", format!("non-finite kernel value at ({tau}, {t})")));
    }
    Ok(value)
}

/// Limiting covariance of the exact-count statistics at the endpoint:
/// the multivariate normal covariance c_{r_i,r_j} for counts of urns
/// holding exactly r balls.
pub fn cov_exact_counts(ri: u32, rj: u32, theta: f64) -> Result<f64> {
    check_theta(theta)?;
    if ri < 1 || rj < 1 {
        return Err(Error::invalid("cov_exact_counts: counts start at 1"));
    }
    let (rif, rjf) = (ri as f64, rj as f64);
    if ri == rj {
        let g1 = gamma_fn(rif + 1.0);
        Ok(theta / g1 * (gamma_fn(rif - theta) - 2f64.powf(theta - 2.0 * rif) * gamma_fn(2.0 * rif - theta) / g1))
    } else {
        Ok(-theta * gamma_fn(rif + rjf - theta) / (factorial(ri) * factorial(rj))
            * 2f64.powf(theta - rif - rjf))
    }
}

/// |c_{ij} − (c*_{ij} − c*_{i+1,j} − c*_{i,j+1} + c*_{i+1,j+1})(1,1)|:
/// the endpoint covariances of the exact counts must be recoverable from
/// four kernel evaluations; the residual is the defect of that identity.
pub fn exact_counts_identity_residual(i: u32, j: u32, theta: f64) -> Result<f64> {
    let direct = cov_exact_counts(i, j, theta)?;
    let combined = cov_limit(i, j, 1.0, 1.0, theta)? - cov_limit(i + 1, j, 1.0, 1.0, theta)?
        - cov_limit(i, j + 1, 1.0, 1.0, theta)?
        + cov_limit(i + 1, j + 1, 1.0, 1.0, theta)?;
    Ok((direct - combined).abs())
}

/// P(Poisson(lambda) < m), summed directly so the result stays accurate
/// when it is tiny.
fn pois_cdf_lt(m: i64, lambda: f64) -> f64 {
    if m <= 0 {
        return 0.0;
    }
    let mut pmf = (-lambda).exp();
    let mut sum = pmf;
    for s in 1..m {
        pmf *= lambda / s as f64;
        sum += pmf;
    }
    sum.min(1.0)
}

/// Covariance contribution of a single urn with split rates
/// λ_τ = τp, λ_δ = (t−τ)p, λ_t = tp, using the independence of the
/// increment over (τ, t].
fn urn_cov_term(i: u32, j: u32, l_tau: f64, l_delta: f64, l_t: f64) -> f64 {
    if l_t > COMPLEMENT_SWITCH {
        let mut pmf = (-l_tau).exp();
        let mut joint = 0.0;
        for s in 0..i {
            if s > 0 {
                pmf *= l_tau / s as f64;
            }
            joint += pmf * pois_cdf_lt(j as i64 - s as i64, l_delta);
        }
        joint - pois_cdf_lt(i as i64, l_tau) * pois_cdf_lt(j as i64, l_t)
    } else {
        let mut joint = poisson_tail_ge(i.max(j), l_tau);
        if i < j {
            let mut pmf = (-l_tau).exp();
            for s in 0..j {
                if s > 0 {
                    pmf *= l_tau / s as f64;
                }
                if s >= i {
                    joint += pmf * poisson_tail_ge(j - s, l_delta);
                }
            }
        }
        joint - poisson_tail_ge(i, l_tau) * poisson_tail_ge(j, l_t)
    }
}

/// Memoized power sums S_a = Σ_{u>from} p_u^a.
struct TailPowers<'a> {
    d: &'a UrnDistribution,
    from: u64,
    cache: Vec<f64>,
}

impl<'a> TailPowers<'a> {
    fn new(d: &'a UrnDistribution, from: u64) -> Self {
        TailPowers { d, from, cache: Vec::new() }
    }

    fn get(&mut self, a: u32) -> Result<f64> {
        while self.cache.len() < a as usize {
            let next = self.d.tail_sum(self.from, self.cache.len() as u32 + 1)?;
            self.cache.push(next);
        }
        Ok(self.cache[a as usize - 1])
    }
}

/// Σ_{u>from} e^{−c·p_u}·p_u^d for d ≥ 1, through the exponential series
/// in power sums. Terms are chained by consecutive power-sum ratios so
/// no factor ever overflows.
fn tail_exp_weighted(pw: &mut TailPowers<'_>, d: u32, c: f64) -> Result<f64> {
    let mut term = pw.get(d)?;
    let mut acc = KahanSum::new();
    acc.add(term);
    for nu in 1..200u32 {
        let s_prev = pw.get(d + nu - 1)?;
        if s_prev == 0.0 {
            break;
        }
        term *= (-c / nu as f64) * (pw.get(d + nu)? / s_prev);
        acc.add(term);
        if term.abs() < 1e-18 * (acc.value().abs() + 1e-300) {
            break;
        }
    }
    Ok(acc.value())
}

/// Σ_{u>from} (e^{−t·p_u} − e^{−(t+τ)·p_u}): the degree-zero part of the
/// far-tail covariance, where the constant terms of the two exponential
/// series cancel exactly and summation starts at the linear term.
fn tail_exp_difference(pw: &mut TailPowers<'_>, t: f64, c2: f64) -> Result<f64> {
    let s1 = pw.get(1)?;
    if s1 == 0.0 {
        return Ok(0.0);
    }
    let mut term_a = -t * s1;
    let mut term_b = -c2 * s1;
    let mut acc = KahanSum::new();
    acc.add(term_a - term_b);
    for nu in 2..200u32 {
        let s_prev = pw.get(nu - 1)?;
        if s_prev == 0.0 {
            break;
        }
        let ratio = pw.get(nu)? / s_prev;
        term_a *= (-t / nu as f64) * ratio;
        term_b *= (-c2 / nu as f64) * ratio;
        acc.add(term_a - term_b);
        if term_b.abs() < 1e-18 * (acc.value().abs() + 1e-300) {
            break;
        }
    }
    Ok(acc.value())
}

/// Far-tail covariance beyond the materialized prefix. Both joint and
/// product probabilities are polynomial-times-exponential in the urn
/// probability, so the sum over the tail reduces to exponential-weighted
/// power sums with the polynomial coefficients below.
fn far_tail_cov(i: u32, j: u32, tau: f64, t: f64, d: &UrnDistribution, from: u64) -> Result<f64> {
    let mut pw = TailPowers::new(d, from);
    let mut acc = KahanSum::new();
    acc.add(tail_exp_difference(&mut pw, t, t + tau)?);
    // joint probability: Σ_{s<i} Σ_{r<j−s} τ^s (t−τ)^r p^{s+r} e^{−tp} / (s! r!)
    for deg in 1..j {
        let mut coeff = KahanSum::new();
        for s in 0..=deg.min(i - 1) {
            let r = deg - s;
            if r < j - s {
                coeff.add(pow00(tau, s) * pow00(t - tau, r) / (factorial(s) * factorial(r)));
            }
        }
        if coeff.value() != 0.0 {
            acc.add(coeff.value() * tail_exp_weighted(&mut pw, deg, t)?);
        }
    }
    // product of marginals: Σ_{s<i} Σ_{r<j} τ^s t^r p^{s+r} e^{−(t+τ)p} / (s! r!)
    for deg in 1..=(i + j).saturating_sub(2) {
        let mut coeff = KahanSum::new();
        let s_lo = deg.saturating_sub(j - 1);
        for s in s_lo..=deg.min(i - 1) {
            let r = deg - s;
            coeff.add(pow00(tau, s) * pow00(t, r) / (factorial(s) * factorial(r)));
        }
        if coeff.value() != 0.0 {
            acc.add(-coeff.value() * tail_exp_weighted(&mut pw, deg, t + tau)?);
        }
    }
    Ok(acc.value())
}

/// Exact Poissonized covariance c̃_{ij}(τ,t) = Cov(R*_{Π(τ),i}, R*_{Π(t),j}),
/// summed urn by urn with an analytic series for the infinite tail.
/// Arguments with τ > t reduce through c̃_{ij}(τ,t) = c̃_{ji}(t,τ).
pub fn cov_exact_poissonized(i: u32, j: u32, tau: f64, t: f64, d: &UrnDistribution) -> Result<f64> {
    if i < 1 || j < 1 {
        return Err(Error::invalid("cov_exact_poissonized: component indices start at 1"));
    }
    if !(tau >= 0.0) || !(t >= 0.0) || !tau.is_finite() || !t.is_finite() {
        return Err(Error::invalid(format!(
            "cov_exact_poissonized: times must be finite and nonnegative, got ({tau}, {t})"
        )));
    }
    if tau > t {
        return cov_exact_poissonized(j, i, t, tau, d);
    }
    if tau == 0.0 {
        return Ok(0.0);
    }
    let prefix_len = d.prefix_len();
    let mut prefix = KahanSum::new();
    for u in 1..=prefix_len {
        let p = d.prob(u);
        prefix.add(urn_cov_term(i, j, tau * p, (t - tau) * p, t * p));
    }
    let mut total = prefix.value();
    let p_next = d.prob(prefix_len + 1);
    if p_next > 0.0 {
        let rate = (t + tau) * p_next;
        if rate > FAR_TAIL_MAX_RATE {
            return Err(Error::numerical(
                "cov_exact_poissonized",
                format!("far-tail series needs (t+τ)·p ≤ {FAR_TAIL_MAX_RATE} beyond the prefix, got {rate:.3e}"),
            ));
        }
        total += far_tail_cov(i, j, tau, t, d, prefix_len)?;
    }
    Ok(total)
}

/// Far tail of Σ_u P(Poisson(m·p_u) ≥ k) as a power-sum series: the
/// upper-tail probability is entire in p with vanishing coefficients
/// below degree k.
fn far_tail_expected_poissonized(
    d: &UrnDistribution,
    from: u64,
    m: f64,
    k: u32,
) -> Result<f64> {
    let mut pw = TailPowers::new(d, from);
    let mut acc = KahanSum::new();
    let mut m_pow = m.powi(k as i32);
    for deg in k..k + 120 {
        if deg > k {
            m_pow *= m;
            if !m_pow.is_finite() {
                break;
            }
        }
        let s_deg = pw.get(deg)?;
        if s_deg == 0.0 {
            break;
        }
        let mut coeff = 0.0;
        for r in 0..k {
            let sign = if (deg - r) % 2 == 0 { 1.0 } else { -1.0 };
            coeff -= sign / (factorial(r) * factorial(deg - r));
        }
        let term = coeff * m_pow * s_deg;
        acc.add(term);
        if term.abs() < 1e-18 * (acc.value().abs() + 1e-300) {
            break;
        }
    }
    Ok(acc.value())
}

/// Far tail of Σ_u P(Binomial(m, p_u) ≥ k): same construction through
/// the binomial expansion of (1−p)^{m−s}. The counts stay below 2^53,
/// so f64 binomial products are exact until they vanish.
fn far_tail_expected_fixed(d: &UrnDistribution, from: u64, m: u64, k: u32) -> Result<f64> {
    let mut pw = TailPowers::new(d, from);
    let mut acc = KahanSum::new();
    let mf = m as f64;
    // head[s] = C(m, s); running[s] = C(m−s, a−s), advanced with a
    let mut head = Vec::with_capacity(k as usize);
    let mut running = Vec::with_capacity(k as usize);
    for s in 0..k {
        let mut b = 1.0f64;
        for u in 0..s {
            b *= (mf - u as f64) / (u + 1) as f64;
        }
        head.push(b);
        let mut c = 1.0f64;
        for u in 0..(k - s) {
            c *= (mf - (s + u) as f64).max(0.0) / (u + 1) as f64;
        }
        running.push(c);
    }
    for a in k..k + 150 {
        if u64::from(a) > m {
            break;
        }
        if a > k {
            for (s, r) in running.iter_mut().enumerate() {
                *r *= (mf + 1.0 - a as f64) / (a - s as u32) as f64;
            }
        }
        let s_a = pw.get(a)?;
        if s_a == 0.0 {
            break;
        }
        let mut g = 0.0;
        for s in 0..k {
            let sign = if (a - s) % 2 == 0 { 1.0 } else { -1.0 };
            g -= sign * head[s as usize] * running[s as usize];
        }
        let term = g * s_a;
        acc.add(term);
        if term.abs() < 1e-18 * (acc.value().abs() + 1e-300) {
            break;
        }
    }
    Ok(acc.value())
}

/// E R*_{·,k}: the expected number of urns holding at least k balls
/// after m fixed throws, or at Poisson intensity m. Fixed mode uses the
/// integer part of m. The materialized prefix is summed directly and the
/// infinite tail is restored by an analytic series.
pub fn expected_occupancy(d: &UrnDistribution, m: f64, k: u32, regime: SamplingRegime) -> Result<f64> {
    if k < 1 {
        return Err(Error::invalid("expected_occupancy: threshold k starts at 1"));
    }
    if !(m >= 0.0) || !m.is_finite() {
        return Err(Error::invalid(format!("expected_occupancy: m must be finite and nonnegative, got {m}")));
    }
    if m >= 9.0e15 {
        return Err(Error::invalid("expected_occupancy: ball budget exceeds exact integer range"));
    }
    let m_fixed = m.floor() as u64;
    if m == 0.0 || (regime == SamplingRegime::Fixed && m_fixed == 0) {
        return Ok(0.0);
    }
    let prefix_len = d.prefix_len();
    let mut prefix = KahanSum::new();
    for u in 1..=prefix_len {
        let p = d.prob(u);
        let term = match regime {
            SamplingRegime::Fixed => binomial_tail_ge(k, m_fixed, p),
            SamplingRegime::Poissonized => poisson_tail_ge(k, m * p),
        };
        prefix.add(term);
    }
    let mut total = prefix.value();
    let p_next = d.prob(prefix_len + 1);
    if p_next > 0.0 {
        let rate = m * p_next;
        if rate > FAR_TAIL_MAX_RATE {
            return Err(Error::numerical(
                "expected_occupancy",
                format!("far-tail series needs m·p ≤ {FAR_TAIL_MAX_RATE} beyond the prefix, got {rate:.3e}"),
            ));
        }
        total += match regime {
            SamplingRegime::Fixed => far_tail_expected_fixed(d, prefix_len, m_fixed, k)?,
            SamplingRegime::Poissonized => far_tail_expected_poissonized(d, prefix_len, m, k)?,
        };
    }
    Ok(total)
}

/// Variance normalization: Γ(1−θ)(2^θ−1)·α(n) for θ < 1, and n·l*(n)
/// for the θ = 1 family.
pub fn b_n(d: &UrnDistribution, n: f64) -> Result<f64> {
    if !(n >= 1.0) || !n.is_finite() {
        return Err(Error::invalid(format!("b_n: n must be finite and at least 1, got {n}")));
    }
    match d.theta() {
        None => Err(Error::invalid("b_n is defined only for the regularly varying families")),
        Some(theta) if theta >= 1.0 => Ok(n * d.l_star(n)?),
        Some(theta) => {
            let alpha = d.alpha(n)? as f64;
            Ok(gamma_fn(1.0 - theta) * (2f64.powf(theta) - 1.0) * alpha)
        }
    }
}

/// Ratio of ∫₀^∞ u^r e^{−u} α(t/u) du to α(t)·Γ(r+1−θ); approaches one
/// as t grows. The integrand uses the smooth counting function, which
/// differs from the integer staircase by less than a single urn, a
/// deviation of order 1/α(t) against tolerances of a few percent; the
/// normalization keeps the exact integer count.
pub fn gamma_tail_asymptotic_check(r: u32, t: f64, d: &UrnDistribution) -> Result<f64> {
    let theta = d
        .theta()
        .ok_or_else(|| Error::invalid("tail asymptotics require a regularly varying family"))?;
    if theta >= 1.0 && r == 0 {
        return Err(Error::invalid("the r = 0 tail integral diverges when theta is 1"));
    }
    if !(t >= 10.0) || !t.is_finite() {
        return Err(Error::invalid(format!("tail asymptotics need t ≥ 10, got {t}")));
    }
    let rf = r as f64;
    // The counting function vanishes for u beyond t·p₁, and the
    // exponential factor underflows long before u = 700; the smaller of
    // the two bounds keeps the adaptive panels where the mass lives.
    let upper = (t * d.prob(1)).min(700.0);
    let split = upper.min(1.0);
    let opts = QuadOptions { abs_tol: 1e-7, rel_tol: 1e-9, ..QuadOptions::default() };
    // u = split·w^{1/e} flattens the u^{r−θ} growth at zero to a bounded
    // integrand in w.
    let e = rf + 1.0 - theta;
    let inner = integrate(
        |w| {
            if w <= 0.0 {
                return 0.0;
            }
            let u = split * w.powf(1.0 / e);
            u.powi(r as i32) * (-u).exp() * d.alpha_smooth(t / u) * (split / e) * w.powf(1.0 / e - 1.0)
        },
        0.0,
        1.0,
        opts,
    )?
    .value;
    let outer = if upper > split {
        integrate(
            |u| u.powi(r as i32) * (-u).exp() * d.alpha_smooth(t / u),
            split,
            upper,
            opts,
        )?
        .value
    } else {
        0.0
    };
    let denom = d.alpha(t)? as f64 * gamma_fn(rf + 1.0 - theta);
    if denom <= 0.0 {
        return Err(Error::numerical("gamma_tail_asymptotic_check", "vanishing normalization".to_string()));
    }
    Ok((inner + outer) / denom)
}
