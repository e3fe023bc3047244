//! Scalar information-theory and distribution utilities: Bernoulli KL
//! divergence, its upper inverse, Beta sampling, and the Beta/Binomial CDF
//! pair whose identity ties the two together.
//!
//! All logarithms are natural; KL values are in nats.

use rand::RngCore;
use rand_distr::Distribution;
use statrs::distribution::{Beta, ContinuousCDF};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

fn check_prob(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(Error::Domain(format!("{name} = {p} outside [0,1]")));
    }
    Ok(())
}

/// d(p, q): KL divergence between Bernoulli(p) and Bernoulli(q), with the
/// conventions 0·log(0/x) = 0 and d(p, q) = +∞ when q ∈ {0,1} and p ≠ q.
pub fn kl_bernoulli(p: f64, q: f64) -> Result<f64> {
    check_prob("p", p)?;
    check_prob("q", q)?;
    if p == q {
        return Ok(0.0);
    }
    if q == 0.0 || q == 1.0 {
        return Ok(f64::INFINITY);
    }
    let mut d = 0.0;
    if p > 0.0 {
        d += p * (p / q).ln();
    }
    if p < 1.0 {
        d += (1.0 - p) * ((1.0 - p) / (1.0 - q)).ln();
    }
    // Rounding can push tiny negative values through for p ≈ q.
    Ok(d.max(0.0))
}

/// The unique q ∈ [p, 1] with d(p, q) = target, clamped to 1 when target
/// exceeds d(p, 1). Binary search to absolute tolerance 1e-12 in q.
pub fn kl_upper_inverse(p: f64, target: f64) -> Result<f64> {
    check_prob("p", p)?;
    if p >= 1.0 {
        return Err(Error::Domain("p must lie in [0,1)".into()));
    }
    if target < 0.0 || target.is_nan() {
        return Err(Error::Domain(format!("target = {target} must be ≥ 0")));
    }
    if target == 0.0 {
        return Ok(p);
    }
    let (mut lo, mut hi) = (p, 1.0f64);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if kl_bernoulli(p, mid)? > target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// One draw from Beta(a, b), deterministic given the rng stream.
pub fn sample_beta(a: f64, b: f64, rng: &mut dyn RngCore) -> Result<f64> {
    if a <= 0.0 || b <= 0.0 || a.is_nan() || b.is_nan() {
        return Err(Error::Domain(format!("Beta shapes ({a}, {b}) must be > 0")));
    }
    let dist = rand_distr::Beta::new(a, b)
        .map_err(|e| Error::Domain(format!("Beta({a}, {b}): {e}")))?;
    Ok(dist.sample(&mut *rng))
}

/// F^Beta_{a,b}(y) for positive integer shapes.
pub fn beta_cdf(a: u32, b: u32, y: f64) -> Result<f64> {
    if a < 1 || b < 1 {
        return Err(Error::Domain(format!("integer shapes ({a}, {b}) must be ≥ 1")));
    }
    check_prob("y", y)?;
    if y == 0.0 {
        return Ok(0.0);
    }
    if y == 1.0 {
        return Ok(1.0);
    }
    let dist = Beta::new(a as f64, b as f64)
        .map_err(|e| Error::Domain(format!("Beta({a}, {b}): {e}")))?;
    Ok(dist.cdf(y))
}

/// F^B_{n,p}(k) = Σ_{j≤k} C(n,j) p^j (1−p)^{n−j} by direct stable summation;
/// terms go through log space once n exceeds 500.
pub fn binomial_cdf(n: u64, p: f64, k: i64) -> Result<f64> {
    check_prob("p", p)?;
    if k < 0 {
        return Ok(0.0);
    }
    if k as u64 >= n {
        return Ok(1.0);
    }
    let k = k as u64;
    if p == 0.0 {
        return Ok(1.0);
    }
    if p == 1.0 {
        // k < n here
        return Ok(0.0);
    }
    if n <= 500 {
        let mut term = (1.0 - p).powi(n as i32);
        let mut sum = term;
        let ratio = p / (1.0 - p);
        for j in 0..k {
            term *= (n - j) as f64 / (j + 1) as f64 * ratio;
            sum += term;
        }
        Ok(sum.min(1.0))
    } else {
        let ln_n_fact = ln_gamma(n as f64 + 1.0);
        let log_terms: Vec<f64> = (0..=k)
            .map(|j| {
                ln_n_fact - ln_gamma(j as f64 + 1.0) - ln_gamma((n - j) as f64 + 1.0)
                    + j as f64 * p.ln()
                    + (n - j) as f64 * (1.0 - p).ln()
            })
            .collect();
        let m = log_terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let sum: f64 = log_terms.iter().map(|lt| (lt - m).exp()).sum();
        Ok((m + sum.ln()).exp().min(1.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn kl_basics() {
        assert_eq!(kl_bernoulli(0.5, 0.5).unwrap(), 0.0);
        // extended-precision evaluation of 0.8·ln(8/9) + 0.2·ln(2)
        let expected = 0.8 * (8.0f64 / 9.0).ln() + 0.2 * 2.0f64.ln();
        assert_abs_diff_eq!(kl_bernoulli(0.8, 0.9).unwrap(), expected, epsilon = 1e-12);
        assert_eq!(kl_bernoulli(0.3, 1.0).unwrap(), f64::INFINITY);
        assert_eq!(kl_bernoulli(0.3, 0.0).unwrap(), f64::INFINITY);
        assert_eq!(kl_bernoulli(1.0, 1.0).unwrap(), 0.0);
        assert_eq!(kl_bernoulli(0.0, 0.0).unwrap(), 0.0);
        assert!(kl_bernoulli(1.2, 0.5).is_err());
        assert!(kl_bernoulli(0.5, -0.1).is_err());
    }

    #[test]
    fn kl_upper_inverse_round_trip() {
        assert_eq!(kl_upper_inverse(0.5, 0.0).unwrap(), 0.5);
        let d = kl_bernoulli(0.2, 0.7).unwrap();
        assert_abs_diff_eq!(kl_upper_inverse(0.2, d).unwrap(), 0.7, epsilon = 1e-10);
        assert_abs_diff_eq!(kl_upper_inverse(0.9, 1e6).unwrap(), 1.0, epsilon = 1e-12);
        assert!(kl_upper_inverse(1.0, 0.1).is_err());
        assert!(kl_upper_inverse(0.5, -1.0).is_err());
    }

    #[test]
    fn beta_uniform_and_concentrated_moments() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let n = 1_000_000usize;
        let mean: f64 = (0..n)
            .map(|_| sample_beta(1.0, 1.0, &mut rng).unwrap())
            .sum::<f64>()
            / n as f64;
        assert!((mean - 0.5).abs() < 0.002, "Beta(1,1) mean {mean}");

        let draws: Vec<f64> = (0..200_000)
            .map(|_| sample_beta(50.0, 50.0, &mut rng).unwrap())
            .collect();
        let m = draws.iter().sum::<f64>() / draws.len() as f64;
        let v = draws.iter().map(|x| (x - m).powi(2)).sum::<f64>() / draws.len() as f64;
        assert!((m - 0.5).abs() < 0.005);
        let expected_var = 0.25 / 101.0;
        assert!((v - expected_var).abs() / expected_var < 0.10, "var {v}");
    }

    #[test]
    fn beta_sampling_deterministic_under_seed() {
        let draw = |seed| {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            (0..100)
                .map(|_| sample_beta(2.5, 3.5, &mut rng).unwrap())
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(42), draw(42));
        assert!(sample_beta(0.0, 1.0, &mut ChaCha12Rng::seed_from_u64(0)).is_err());
    }

    #[test]
    fn beta_cdf_examples() {
        assert_abs_diff_eq!(beta_cdf(1, 1, 0.3).unwrap(), 0.3, epsilon = 1e-12);
        // 1 − F^B_{4,0.5}(2) = 1 − 11/16 = 5/16
        assert_abs_diff_eq!(beta_cdf(3, 2, 0.5).unwrap(), 5.0 / 16.0, epsilon = 1e-12);
        assert_eq!(beta_cdf(7, 3, 1.0).unwrap(), 1.0);
        assert_eq!(beta_cdf(7, 3, 0.0).unwrap(), 0.0);
        assert!(beta_cdf(0, 3, 0.5).is_err());
    }

    #[test]
    fn binomial_cdf_examples() {
        // all 16 outcomes of 4 fair trials: C(4,0)+C(4,1)+C(4,2) = 11
        assert_abs_diff_eq!(binomial_cdf(4, 0.5, 2).unwrap(), 11.0 / 16.0, epsilon = 1e-14);
        assert_eq!(binomial_cdf(10, 0.3, -1).unwrap(), 0.0);
        assert_eq!(binomial_cdf(10, 0.0, 0).unwrap(), 1.0);
        assert_eq!(binomial_cdf(10, 0.3, 10).unwrap(), 1.0);
        assert_eq!(binomial_cdf(10, 1.0, 9).unwrap(), 0.0);
    }

    #[test]
    fn binomial_cdf_log_space_agrees_with_beta_route() {
        // straddle the n = 500 switchover; the Beta identity
        // F^B_{n,p}(k) = 1 − F^Beta_{k+1, n−k}(p) is the independent route
        for &(n, p) in &[(400u64, 0.3), (600, 0.3), (1000, 0.7), (2000, 0.05)] {
            let k = (n as f64 * p) as i64;
            let via_sum = binomial_cdf(n, p, k).unwrap();
            let via_beta = 1.0 - beta_cdf(k as u32 + 1, (n - k as u64) as u32, p).unwrap();
            assert_abs_diff_eq!(via_sum, via_beta, epsilon = 1e-9);
        }
    }

    #[test]
    fn beta_binomial_identity_spot_checks() {
        for &(a, b, y) in &[(3u32, 2u32, 0.5f64), (1, 1, 0.25), (10, 7, 0.4), (50, 50, 0.5)] {
            let lhs = beta_cdf(a, b, y).unwrap();
            let rhs = 1.0 - binomial_cdf((a + b - 1) as u64, y, a as i64 - 1).unwrap();
            assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-10);
        }
    }

    #[test]
    fn pinsker_and_monotonicity_grid() {
        let grid: Vec<f64> = (1..200).map(|i| i as f64 / 200.0).collect();
        for &p in &grid {
            let mut prev = 0.0;
            for &q in &grid {
                let d = kl_bernoulli(p, q).unwrap();
                assert!(d + 1e-15 >= 2.0 * (p - q) * (p - q), "Pinsker fails at ({p},{q})");
                if q >= p {
                    assert!(d >= prev - 1e-15, "not increasing at ({p},{q})");
                    prev = d;
                }
            }
        }
    }
}
