//! Brute-force computations over integers that check the prime-side formulas
//! by a different route.
//!
//! * `Z_i(s)` equals the sum of `n^-s` over `p_i`-smooth `n`.
//! * `a_k(s) p_k^-s` equals the sum of `n^-s` over `n` whose smallest prime
//!   factor is `p_k`. Grouping `2..=N` by smallest prime factor gives one
//!   truncated estimate per prime, off by at most the Dirichlet tail past `N`.

use num_complex::Complex64;

use crate::error::{Result, ZetaError};
use crate::kernel::{check_finite, power_term, prime_power_term, ComplexValue};
use crate::methods::{
    correction_coefficient, dirichlet_tail_bound, Accumulator, EvalOptions, EvaluationResult,
    Summation, TruncationSpec,
};
use crate::primes::{isqrt, spf_by_trial, PrimeCache};

fn require_convergent(sigma: f64) -> Result<()> {
    if sigma > 1.0 {
        Ok(())
    } else {
        Err(ZetaError::NonConvergent { sigma })
    }
}

/// `sum n^-s` over `p_i`-smooth `n <= bound`, largest `n` first.
pub fn smooth_sum_oracle(
    cache: &mut PrimeCache,
    i: usize,
    s: ComplexValue,
    bound: u64,
    summation: Summation,
) -> Result<ComplexValue> {
    check_finite(s)?;
    require_convergent(s.re)?;
    let smooth = cache.smooth_numbers(i, bound)?;
    let mut acc = Accumulator::new(summation);
    for &n in smooth.iter().rev() {
        acc.add(power_term(n, s)?);
    }
    Ok(acc.total())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartitionRow {
    pub prime: u64,
    /// `sum n^-s` over `2 <= n <= N` with smallest prime factor `prime`.
    pub sum: ComplexValue,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionTable {
    pub cutoff: u64,
    pub s: ComplexValue,
    /// One row per prime `<= cutoff`, ascending.
    pub rows: Vec<PartitionRow>,
}

impl PartitionTable {
    /// `1 + sum of rows`, equal to the Dirichlet partial sum up to the cutoff.
    pub fn total(&self) -> ComplexValue {
        self.rows
            .iter()
            .fold(Complex64::new(1.0, 0.0), |acc, r| acc + r.sum)
    }

    /// Row for `prime`; zero if `prime` exceeds the cutoff.
    pub fn row(&self, prime: u64) -> ComplexValue {
        self.rows
            .binary_search_by_key(&prime, |r| r.prime)
            .map(|idx| self.rows[idx].sum)
            .unwrap_or_default()
    }
}

/// Group `2..=n_max` by smallest prime factor and sum `n^-s` in each group.
///
/// The partition is exact for any `s`; reading row `p_k` as an estimate of
/// `a_k(s) p_k^-s` needs `Re(s) > 1`.
pub fn spf_partition_sum(
    cache: &mut PrimeCache,
    s: ComplexValue,
    n_max: u64,
) -> Result<PartitionTable> {
    check_finite(s)?;
    if n_max < 2 {
        return Err(ZetaError::InvalidArgument(format!(
            "partition cutoff must be at least 2, got {n_max}"
        )));
    }
    cache.extend_to(n_max.max(isqrt(n_max)));
    let primes = cache.primes_up_to(n_max);
    let mut sums = vec![Complex64::new(0.0, 0.0); primes.len()];
    for n in 2..=n_max {
        let spf = spf_by_trial(primes, n);
        let idx = primes.partition_point(|&p| p < spf);
        sums[idx] += power_term(n, s)?;
    }
    Ok(PartitionTable {
        cutoff: n_max,
        s,
        rows: primes
            .iter()
            .zip(sums)
            .map(|(&prime, sum)| PartitionRow { prime, sum })
            .collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crosscheck {
    pub k: usize,
    pub prime: u64,
    pub coefficient: EvaluationResult,
    /// `a_k(s) p_k^-s` from the truncated product.
    pub weighted: ComplexValue,
    /// Partition row for `p_k`.
    pub row: ComplexValue,
    pub residual: f64,
    /// `spec.tolerance + N^(1-sigma) / (sigma - 1)`.
    pub allowance: f64,
}

impl Crosscheck {
    pub fn passed(&self) -> bool {
        self.residual <= self.allowance
    }
}

/// Compare `a_k(s) p_k^-s` from the product against the partition row of an
/// existing table.
pub fn coefficient_crosscheck_with(
    cache: &mut PrimeCache,
    table: &PartitionTable,
    k: usize,
    spec: &TruncationSpec,
    opts: &EvalOptions,
) -> Result<Crosscheck> {
    let s = table.s;
    require_convergent(s.re)?;
    let coefficient = correction_coefficient(cache, k, s, spec, opts)?;
    let prime = cache.nth_prime(k)?;
    let weighted = coefficient.value * prime_power_term(prime, s)?;
    let row = table.row(prime);
    Ok(Crosscheck {
        k,
        prime,
        coefficient,
        weighted,
        row,
        residual: (weighted - row).norm(),
        allowance: spec.tolerance + dirichlet_tail_bound(table.cutoff, s.re)?,
    })
}

pub fn coefficient_crosscheck(
    cache: &mut PrimeCache,
    k: usize,
    s: ComplexValue,
    n_max: u64,
    spec: &TruncationSpec,
    opts: &EvalOptions,
) -> Result<Crosscheck> {
    check_finite(s)?;
    require_convergent(s.re)?;
    let table = spf_partition_sum(cache, s, n_max)?;
    coefficient_crosscheck_with(cache, &table, k, spec, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::DEFAULT_SINGULAR_TOL;
    use crate::methods::{dirichlet_partial, euler_partial, zeta_eval, Method};
    use num_rational::Rational64;

    fn c(re: f64, im: f64) -> ComplexValue {
        Complex64::new(re, im)
    }

    #[test]
    fn smooth_sum_examples() {
        let mut cache = PrimeCache::new();
        let got = smooth_sum_oracle(&mut cache, 1, c(2.0, 0.0), 1 << 20, Summation::Plain).unwrap();
        let closed = (1.0 - 4f64.powi(-21)) / (1.0 - 0.25);
        assert!((got.re - closed).abs() < 1e-15);
        assert!((got.re - 4.0 / 3.0).abs() < 1e-12);

        let got =
            smooth_sum_oracle(&mut cache, 2, c(3.0, 0.0), 1_000_000, Summation::Plain).unwrap();
        assert!((got.re - 108.0 / 91.0).abs() < 1e-5);

        let got = smooth_sum_oracle(&mut cache, 1, c(2.0, 0.0), 1, Summation::Plain).unwrap();
        assert_eq!(got, c(1.0, 0.0));

        assert!(matches!(
            smooth_sum_oracle(&mut cache, 1, c(1.0, 0.0), 10, Summation::Plain),
            Err(ZetaError::NonConvergent { .. })
        ));
    }

    #[test]
    fn smooth_sum_converges_monotonically() {
        let mut cache = PrimeCache::new();
        for (i, sigma) in [(3usize, 2.0), (5, 1.5), (10, 3.0)] {
            let target = euler_partial(cache.first(i), c(sigma, 0.0), DEFAULT_SINGULAR_TOL)
                .unwrap()
                .re;
            let mut prev = 0.0;
            for bound in [1u64, 10, 100, 1_000, 10_000, 100_000, 2_000_000] {
                let v = smooth_sum_oracle(&mut cache, i, c(sigma, 0.0), bound, Summation::Plain)
                    .unwrap()
                    .re;
                assert!(v >= prev, "i = {i}, bound = {bound}");
                assert!(v <= target + 1e-14);
                prev = v;
            }
            assert!(target - prev < 1e-2, "i = {i}: {prev} vs {target}");
        }
    }

    #[test]
    fn partition_examples() {
        let mut cache = PrimeCache::new();
        let table = spf_partition_sum(&mut cache, c(3.0, 0.0), 10).unwrap();
        let primes: Vec<u64> = table.rows.iter().map(|r| r.prime).collect();
        assert_eq!(primes, vec![2, 3, 5, 7]);
        // 2^-3 + 4^-3 + 6^-3 + 8^-3 + 10^-3 in exact rationals
        let row2 = [2i64, 4, 6, 8, 10]
            .iter()
            .map(|&n| Rational64::new(1, n * n * n))
            .fold(Rational64::from_integer(0), |a, b| a + b);
        assert_eq!(row2, Rational64::new(256_103, 1_728_000));
        assert!((table.row(2).re - 256_103.0 / 1_728_000.0).abs() < 1e-15);
        assert!((table.row(7).re - 1.0 / 343.0).abs() < 1e-17);
        assert_eq!(table.row(11), c(0.0, 0.0));
        let direct = dirichlet_partial(10, c(3.0, 0.0), Summation::Plain).unwrap();
        assert!((table.total() - direct).norm() < 1e-15);
        assert!(spf_partition_sum(&mut cache, c(3.0, 0.0), 1).is_err());
    }

    #[test]
    fn partition_is_exhaustive() {
        let mut cache = PrimeCache::new();
        for s in [c(2.0, 0.0), c(3.0, 0.0), c(2.0, 1.0)] {
            for n in [2u64, 3, 17, 100, 997, 4096, 10_000] {
                let table = spf_partition_sum(&mut cache, s, n).unwrap();
                let direct = dirichlet_partial(n, s, Summation::Plain).unwrap();
                assert!(
                    (table.total() - direct).norm() <= 1e-12 * direct.norm(),
                    "s = {s}, N = {n}"
                );
            }
        }
    }

    #[test]
    fn crosscheck_examples() {
        let mut cache = PrimeCache::new();
        let opts = EvalOptions::default();
        let spec = TruncationSpec::new(5, 100_000, 1e-10).unwrap();
        let x = coefficient_crosscheck(&mut cache, 1, c(3.0, 0.0), 100_000, &spec, &opts).unwrap();
        assert!(x.residual <= 1e-4 && x.passed(), "{x:?}");
        let x = coefficient_crosscheck(&mut cache, 3, c(4.0, 0.0), 100_000, &spec, &opts).unwrap();
        assert_eq!(x.prime, 5);
        assert!(x.residual <= 1e-8 && x.passed(), "{x:?}");

        let spec = TruncationSpec::new(1, 10, 1e-6).unwrap();
        let x = coefficient_crosscheck(&mut cache, 1, c(2.0, 0.0), 10, &spec, &opts).unwrap();
        assert!(x.residual > 1e-2);
        assert!((x.allowance - (1e-6 + 0.1)).abs() < 1e-15);
        assert!(x.passed());

        assert!(matches!(
            coefficient_crosscheck(&mut cache, 1, c(1.0, 0.0), 10, &spec, &opts),
            Err(ZetaError::NonConvergent { .. })
        ));
    }

    #[test]
    fn crosscheck_complex_rows() {
        let mut cache = PrimeCache::new();
        let opts = EvalOptions::default();
        let spec = TruncationSpec::new(5, 20_000, 1e-9).unwrap();
        let table = spf_partition_sum(&mut cache, c(2.5, 7.0), 20_000).unwrap();
        for k in 1..=8 {
            let x = coefficient_crosscheck_with(&mut cache, &table, k, &spec, &opts).unwrap();
            assert!(x.passed(), "k = {k}: {x:?}");
        }
    }

    #[test]
    fn dirichlet_and_reformulated_within_joint_bound() {
        let mut cache = PrimeCache::new();
        let opts = EvalOptions::default();
        for sigma in [2.0, 3.0, 4.0] {
            let d = zeta_eval(&mut cache, c(sigma, 0.0), Method::Dirichlet, 1e-6, &opts).unwrap();
            let r =
                zeta_eval(&mut cache, c(sigma, 0.0), Method::Reformulated, 1e-6, &opts).unwrap();
            assert!((d.value - r.value).norm() <= d.tail_error_bound + r.tail_error_bound);
        }
    }
}
