//! Partial Euler products, the prime-indexed sum-of-products form, and
//! adaptive evaluation of zeta for `Re(s) > 1`.
//!
//! For the first `i` primes with factors `f_j = (1 - p_j^-s)^-1`:
//!
//! ```text
//! Z_i(s) = f_1 f_2 ... f_i
//! S_i(s) = sum_{k=1..i} p_k^-s * (f_k f_{k+1} ... f_i)
//! ```
//!
//! and `Z_i = 1 + S_i` for every `s` where no factor is singular. Letting
//! `i -> infinity` gives `zeta(s) = 1 + sum_k a_k(s) p_k^-s` with
//! `a_k = prod_{j >= k} f_j`.
//!
//! Truncation is certified from the real part alone. For `sigma = Re(s) > 1`
//! and every prime `q > p_i`, `|q^-s| <= 1/3`, so `|log f_q| <= 2 q^-sigma`
//! and the log of the omitted product is at most
//! `2 p_i^(1-sigma) / (sigma - 1)` ([`tail_bound`]). The kept product is
//! bounded in modulus by its value at `s = sigma`, which turns the log bound
//! into an absolute one ([`product_error_bound`]).

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::dd::ComplexDd;
use crate::error::{Result, ZetaError};
use crate::kernel::{
    check_finite, euler_factor_from_term, power_term, prime_power_term, ComplexValue,
    DEFAULT_SINGULAR_TOL,
};
use crate::primes::PrimeCache;

/// Tolerances below this are out of reach in double precision.
pub const MIN_TOLERANCE: f64 = 1e-14;

/// Smallest tolerance accepted by [`zeta_eval`].
pub const MIN_EVAL_TOLERANCE: f64 = 1e-12;

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Dirichlet,
    EulerProduct,
    Reformulated,
}

impl Method {
    pub const ALL: [Method; 3] = [
        Method::Dirichlet,
        Method::EulerProduct,
        Method::Reformulated,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Dirichlet => "dirichlet",
            Method::EulerProduct => "euler_product",
            Method::Reformulated => "reformulated",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = ZetaError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dirichlet" => Ok(Method::Dirichlet),
            "euler_product" | "euler-product" | "euler" => Ok(Method::EulerProduct),
            "reformulated" | "reform" => Ok(Method::Reformulated),
            other => Err(ZetaError::InvalidArgument(format!(
                "unknown method {other:?} (expected dirichlet, euler_product or reformulated)"
            ))),
        }
    }
}

/// How sums are accumulated. Plain is the reference behaviour.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Summation {
    #[default]
    Plain,
    /// Neumaier compensation on each component. The sum-of-products form
    /// additionally carries its factors and suffix products in double-double.
    Compensated,
}

/// Work limits for the adaptive evaluators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Largest integer the prime cache may be sieved to.
    pub max_prime: u64,
    pub max_dirichlet_terms: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_prime: 500_000_000,
            max_dirichlet_terms: 100_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    pub singular_tol: f64,
    pub summation: Summation,
    pub budget: Budget,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            singular_tol: DEFAULT_SINGULAR_TOL,
            summation: Summation::Plain,
            budget: Budget::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationSpec {
    pub prime_index: usize,
    pub dirichlet_cutoff: u64,
    pub tolerance: f64,
}

impl TruncationSpec {
    pub fn new(prime_index: usize, dirichlet_cutoff: u64, tolerance: f64) -> Result<Self> {
        if prime_index == 0 {
            return Err(ZetaError::InvalidArgument(
                "prime index must be at least 1".into(),
            ));
        }
        if dirichlet_cutoff == 0 {
            return Err(ZetaError::InvalidArgument(
                "Dirichlet cutoff must be at least 1".into(),
            ));
        }
        if !(tolerance >= MIN_TOLERANCE) || !tolerance.is_finite() {
            return Err(ZetaError::InvalidArgument(format!(
                "tolerance {tolerance:e} is below the double-precision floor {MIN_TOLERANCE:e}"
            )));
        }
        Ok(TruncationSpec {
            prime_index,
            dirichlet_cutoff,
            tolerance,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvaluationResult {
    pub value: ComplexValue,
    pub method: Method,
    /// Primes for the product methods, integers for Dirichlet.
    pub terms_used: u64,
    /// Upper bound on `|value - limit|` from truncation.
    pub tail_error_bound: f64,
}

/// Complex accumulator, optionally Neumaier-compensated.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Accumulator {
    sum: Complex64,
    comp: Complex64,
    mode: Summation,
}

impl Accumulator {
    pub(crate) fn new(mode: Summation) -> Self {
        Accumulator {
            sum: ZERO,
            comp: ZERO,
            mode,
        }
    }

    pub(crate) fn add(&mut self, x: Complex64) {
        match self.mode {
            Summation::Plain => self.sum += x,
            Summation::Compensated => {
                let (re, cre) = neumaier(self.sum.re, self.comp.re, x.re);
                let (im, cim) = neumaier(self.sum.im, self.comp.im, x.im);
                self.sum = Complex64::new(re, im);
                self.comp = Complex64::new(cre, cim);
            }
        }
    }

    pub(crate) fn total(&self) -> Complex64 {
        self.sum + self.comp
    }
}

fn neumaier(sum: f64, comp: f64, x: f64) -> (f64, f64) {
    let t = sum + x;
    let c = if sum.abs() >= x.abs() {
        (sum - t) + x
    } else {
        (x - t) + sum
    };
    (t, comp + c)
}

/// `Z_i(s)` over the given primes (the first `i`), ascending. Empty gives 1.
pub fn euler_partial(primes: &[u64], s: ComplexValue, tol: f64) -> Result<ComplexValue> {
    check_finite(s)?;
    primes.iter().try_fold(ONE, |acc, &p| {
        let term = prime_power_term(p, s)?;
        Ok(acc * euler_factor_from_term(p, s, term, tol)?)
    })
}

/// `S_i(s)` over the given primes, built right to left with a running suffix
/// product so each factor is evaluated once. Empty gives 0.
pub fn reform_partial(
    primes: &[u64],
    s: ComplexValue,
    tol: f64,
    summation: Summation,
) -> Result<ComplexValue> {
    check_finite(s)?;
    if summation == Summation::Compensated {
        return reform_partial_dd(primes, s, tol);
    }
    let mut suffix = ONE;
    let mut acc = Accumulator::new(summation);
    for &p in primes.iter().rev() {
        let term = prime_power_term(p, s)?;
        suffix *= euler_factor_from_term(p, s, term, tol)?;
        acc.add(term * suffix);
    }
    Ok(acc.total())
}

fn reform_partial_dd(primes: &[u64], s: ComplexValue, tol: f64) -> Result<ComplexValue> {
    let mut suffix = ComplexDd::ONE;
    let mut acc = ComplexDd::default();
    for &p in primes.iter().rev() {
        let term = prime_power_term(p, s)?;
        euler_factor_from_term(p, s, term, tol)?;
        let term = ComplexDd::from_c64(term);
        suffix = suffix * (ComplexDd::ONE - term).recip();
        acc = acc + term * suffix;
    }
    let total = acc.to_c64();
    if total.is_finite() {
        Ok(total)
    } else {
        Err(ZetaError::Overflow { base: primes[0], s })
    }
}

/// `|Z_i(s) - 1 - S_i(s)|`, identically zero in exact arithmetic. `S_i` is
/// taken from the compensated form, whose terms can exceed `|Z_i|` by many
/// orders of magnitude when `Re(s) <= 0`.
pub fn identity_residual(primes: &[u64], s: ComplexValue, tol: f64) -> Result<f64> {
    let z = euler_partial(primes, s, tol)?;
    let sum = reform_partial(primes, s, tol, Summation::Compensated)?;
    Ok((z - ONE - sum).norm())
}

/// Residual of one induction step from `i` to `i + 1`:
/// `|f_{i+1} (p_{i+1}^-s + S_i) + 1 - Z_{i+1}|`.
///
/// `primes` must hold at least `i + 1` primes.
pub fn induction_step_check(primes: &[u64], i: usize, s: ComplexValue, tol: f64) -> Result<f64> {
    if primes.len() <= i {
        return Err(ZetaError::InvalidArgument(format!(
            "induction step from i = {i} needs {} primes, got {}",
            i + 1,
            primes.len()
        )));
    }
    let next = primes[i];
    let sum = reform_partial(&primes[..i], s, tol, Summation::Compensated)?;
    let term = prime_power_term(next, s)?;
    let factor = euler_factor_from_term(next, s, term, tol)?;
    let z_next = euler_partial(&primes[..=i], s, tol)?;
    Ok((factor * (term + sum) + ONE - z_next).norm())
}

/// `sum_{n=1..n_max} n^-s`, ascending.
pub fn dirichlet_partial(
    n_max: u64,
    s: ComplexValue,
    summation: Summation,
) -> Result<ComplexValue> {
    if n_max == 0 {
        return Err(ZetaError::InvalidArgument(
            "Dirichlet cutoff must be at least 1".into(),
        ));
    }
    check_finite(s)?;
    let mut acc = Accumulator::new(summation);
    for n in 1..=n_max {
        acc.add(power_term(n, s)?);
    }
    Ok(acc.total())
}

fn require_convergent(sigma: f64) -> Result<()> {
    if sigma > 1.0 {
        Ok(())
    } else {
        Err(ZetaError::NonConvergent { sigma })
    }
}

/// Bound on `|log prod_{q > last_prime} (1 - q^-s)^-1|` over the line
/// `Re(s) = sigma`: `2 last_prime^(1-sigma) / (sigma - 1)`.
///
/// `last_prime = 1` stands for the empty product (no primes kept).
pub fn tail_bound(last_prime: u64, sigma: f64) -> Result<f64> {
    require_convergent(sigma)?;
    if last_prime == 0 {
        return Err(ZetaError::InvalidArgument(
            "truncation prime must be at least 1".into(),
        ));
    }
    Ok(2.0 * (last_prime as f64).powf(1.0 - sigma) / (sigma - 1.0))
}

/// Integral bound `n^(1-sigma) / (sigma - 1)` on `|sum_{m > n} m^-s|`.
pub fn dirichlet_tail_bound(n: u64, sigma: f64) -> Result<f64> {
    require_convergent(sigma)?;
    if n == 0 {
        return Err(ZetaError::InvalidArgument(
            "cutoff must be at least 1".into(),
        ));
    }
    Ok((n as f64).powf(1.0 - sigma) / (sigma - 1.0))
}

/// Absolute error bound for a product truncated after `last_prime`, given the
/// kept product evaluated at the real point `sigma` (which dominates its
/// modulus anywhere on the line).
pub fn product_error_bound(real_partial: f64, last_prime: u64, sigma: f64) -> Result<f64> {
    Ok(real_partial * tail_bound(last_prime, sigma)?.exp_m1())
}

/// Where to stop a product that starts at `primes[start]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductPlan {
    /// One past the last prime index used (0-based), so the kept primes are
    /// `primes[start..end]`.
    pub end: usize,
    pub bound: f64,
}

/// First truncation point whose certified bound is within `tol`, or `None`
/// if `primes` runs out first.
pub fn plan_product(
    primes: &[u64],
    start: usize,
    sigma: f64,
    tol: f64,
) -> Result<Option<ProductPlan>> {
    require_convergent(sigma)?;
    let mut real = 1.0;
    for (idx, &p) in primes.iter().enumerate().skip(start) {
        real /= 1.0 - (p as f64).powf(-sigma);
        let bound = product_error_bound(real, p, sigma)?;
        if bound <= tol {
            return Ok(Some(ProductPlan {
                end: idx + 1,
                bound,
            }));
        }
    }
    Ok(None)
}

/// Smallest cutoff `n` with `n^(1-sigma) / (sigma - 1) <= tol`.
pub fn dirichlet_cutoff_for(sigma: f64, tol: f64) -> Result<f64> {
    require_convergent(sigma)?;
    let guess = (tol * (sigma - 1.0)).powf(-1.0 / (sigma - 1.0)).ceil();
    if !guess.is_finite() || guess > u64::MAX as f64 / 2.0 {
        return Ok(f64::INFINITY);
    }
    let mut n = (guess as u64).max(1);
    while n > 1 && dirichlet_tail_bound(n - 1, sigma)? <= tol {
        n -= 1;
    }
    while dirichlet_tail_bound(n, sigma)? > tol {
        n += 1;
    }
    Ok(n as f64)
}

/// Grow `cache` until a product starting at prime index `start` (0-based)
/// can be certified to `tol` on the line `Re(s) = sigma`.
pub fn ensure_primes_for(
    cache: &mut PrimeCache,
    start: usize,
    sigma: f64,
    tol: f64,
    budget: &Budget,
) -> Result<ProductPlan> {
    require_convergent(sigma)?;
    cache.ensure_count(start + 1);
    loop {
        if let Some(plan) = plan_product(cache.primes(), start, sigma, tol)? {
            return Ok(plan);
        }
        let limit = cache.source_limit();
        if limit >= budget.max_prime {
            return Err(ZetaError::BudgetExceeded {
                what: "certified product truncation",
                needed: estimate_prime_limit(sigma, tol),
                budget: budget.max_prime,
            });
        }
        cache.extend_to_capped(
            limit.saturating_mul(2).clamp(64, budget.max_prime),
            budget.max_prime,
        );
    }
}

/// A-priori prime limit sufficient for [`plan_product`] from the start, using
/// `zeta(sigma) <= sigma / (sigma - 1)`. Only used for reporting.
fn estimate_prime_limit(sigma: f64, tol: f64) -> f64 {
    let log_budget = (tol * (sigma - 1.0) / sigma).ln_1p();
    (2.0 / (log_budget * (sigma - 1.0))).powf(1.0 / (sigma - 1.0))
}

fn validate_eval(s: ComplexValue, tolerance: f64) -> Result<()> {
    check_finite(s)?;
    if !(tolerance >= MIN_EVAL_TOLERANCE) || !tolerance.is_finite() {
        return Err(ZetaError::InvalidArgument(format!(
            "tolerance {tolerance:e} must be at least {MIN_EVAL_TOLERANCE:e}"
        )));
    }
    require_convergent(s.re)
}

/// Make sure `cache` holds enough primes to evaluate at any `s` on
/// `Re(s) = sigma` with [`zeta_eval_in`].
pub fn prepare_eval(
    cache: &mut PrimeCache,
    s: ComplexValue,
    method: Method,
    tolerance: f64,
    opts: &EvalOptions,
) -> Result<()> {
    validate_eval(s, tolerance)?;
    match method {
        Method::Dirichlet => {
            let n = dirichlet_cutoff_for(s.re, tolerance)?;
            if n > opts.budget.max_dirichlet_terms as f64 {
                return Err(ZetaError::BudgetExceeded {
                    what: "Dirichlet terms",
                    needed: n,
                    budget: opts.budget.max_dirichlet_terms,
                });
            }
            Ok(())
        }
        Method::EulerProduct | Method::Reformulated => {
            ensure_primes_for(cache, 0, s.re, tolerance, &opts.budget).map(|_| ())
        }
    }
}

/// [`zeta_eval`] against a fixed prime snapshot, for parallel use after
/// [`prepare_eval`].
pub fn zeta_eval_in(
    primes: &[u64],
    s: ComplexValue,
    method: Method,
    tolerance: f64,
    opts: &EvalOptions,
) -> Result<EvaluationResult> {
    validate_eval(s, tolerance)?;
    let sigma = s.re;
    match method {
        Method::Dirichlet => {
            let n = dirichlet_cutoff_for(sigma, tolerance)?;
            if n > opts.budget.max_dirichlet_terms as f64 {
                return Err(ZetaError::BudgetExceeded {
                    what: "Dirichlet terms",
                    needed: n,
                    budget: opts.budget.max_dirichlet_terms,
                });
            }
            let n = n as u64;
            Ok(EvaluationResult {
                value: dirichlet_partial(n, s, opts.summation)?,
                method,
                terms_used: n,
                tail_error_bound: dirichlet_tail_bound(n, sigma)?,
            })
        }
        Method::EulerProduct | Method::Reformulated => {
            let plan = plan_product(primes, 0, sigma, tolerance)?.ok_or_else(|| {
                ZetaError::BudgetExceeded {
                    what: "certified product truncation",
                    needed: estimate_prime_limit(sigma, tolerance),
                    budget: primes.last().copied().unwrap_or(0),
                }
            })?;
            let kept = &primes[..plan.end];
            let value = if method == Method::EulerProduct {
                euler_partial(kept, s, opts.singular_tol)?
            } else {
                ONE + reform_partial(kept, s, opts.singular_tol, opts.summation)?
            };
            Ok(EvaluationResult {
                value,
                method,
                terms_used: plan.end as u64,
                tail_error_bound: plan.bound,
            })
        }
    }
}

/// Adaptive zeta evaluation for `Re(s) > 1`.
///
/// The product methods keep adding primes until the certified truncation
/// bound is within `tolerance`; `EulerProduct` returns `Z_i` and
/// `Reformulated` returns `1 + S_i` for the same `i`. `Dirichlet` picks the
/// smallest `N` whose integral tail bound is within `tolerance`.
pub fn zeta_eval(
    cache: &mut PrimeCache,
    s: ComplexValue,
    method: Method,
    tolerance: f64,
    opts: &EvalOptions,
) -> Result<EvaluationResult> {
    prepare_eval(cache, s, method, tolerance, opts)?;
    zeta_eval_in(cache.primes(), s, method, tolerance, opts)
}

/// `a_k(s) = prod_{j >= k} (1 - p_j^-s)^-1`, truncated once the certified
/// bound is within `spec.tolerance`. `k` is 1-based.
pub fn correction_coefficient(
    cache: &mut PrimeCache,
    k: usize,
    s: ComplexValue,
    spec: &TruncationSpec,
    opts: &EvalOptions,
) -> Result<EvaluationResult> {
    check_finite(s)?;
    if k == 0 {
        return Err(ZetaError::InvalidArgument(
            "prime index k must be at least 1".into(),
        ));
    }
    require_convergent(s.re)?;
    let plan = ensure_primes_for(cache, k - 1, s.re, spec.tolerance, &opts.budget)?;
    let value = euler_partial(&cache.primes()[k - 1..plan.end], s, opts.singular_tol)?;
    Ok(EvaluationResult {
        value,
        method: Method::EulerProduct,
        terms_used: (plan.end - (k - 1)) as u64,
        tail_error_bound: plan.bound,
    })
}

/// One row of a convergence run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergeStep {
    /// Number of primes kept.
    pub i: usize,
    pub prime: u64,
    /// `Z_i(s)`.
    pub euler: ComplexValue,
    /// `1 + S_i(s)`.
    pub reformulated: ComplexValue,
    /// Certified `|Z_i - zeta|` bound; also bounds `|1 + S_i - zeta|`.
    pub product_bound: f64,
    /// Dirichlet partial sum cut at `N = p_i`.
    pub dirichlet: ComplexValue,
    pub dirichlet_bound: f64,
}

/// Convergence profile at `i = 1, 2, 4, ...` up to the first `i` whose
/// certified bound meets `tolerance` (always the last row).
pub fn converge(
    cache: &mut PrimeCache,
    s: ComplexValue,
    tolerance: f64,
    opts: &EvalOptions,
) -> Result<Vec<ConvergeStep>> {
    validate_eval(s, tolerance)?;
    let sigma = s.re;
    let plan = ensure_primes_for(cache, 0, sigma, tolerance, &opts.budget)?;
    let primes = &cache.primes()[..plan.end];
    let last_n = primes[plan.end - 1];
    if last_n > opts.budget.max_dirichlet_terms {
        return Err(ZetaError::BudgetExceeded {
            what: "Dirichlet terms",
            needed: last_n as f64,
            budget: opts.budget.max_dirichlet_terms,
        });
    }

    let mut checkpoints: Vec<usize> = std::iter::successors(Some(1usize), |&i| i.checked_mul(2))
        .take_while(|&i| i < plan.end)
        .collect();
    checkpoints.push(plan.end);

    let mut steps = Vec::with_capacity(checkpoints.len());
    let mut euler = ONE;
    let mut real = 1.0;
    let mut dirichlet = Accumulator::new(opts.summation);
    let mut n_done = 0u64;
    let mut next = 0usize;
    for (idx, &p) in primes.iter().enumerate() {
        let term = prime_power_term(p, s)?;
        euler *= euler_factor_from_term(p, s, term, opts.singular_tol)?;
        real /= 1.0 - (p as f64).powf(-sigma);
        if idx + 1 != checkpoints[next] {
            continue;
        }
        next += 1;
        for n in n_done + 1..=p {
            dirichlet.add(power_term(n, s)?);
        }
        n_done = p;
        let kept = &primes[..=idx];
        steps.push(ConvergeStep {
            i: idx + 1,
            prime: p,
            euler,
            reformulated: ONE + reform_partial(kept, s, opts.singular_tol, opts.summation)?,
            product_bound: product_error_bound(real, p, sigma)?,
            dirichlet: dirichlet.total(),
            dirichlet_bound: dirichlet_tail_bound(p, sigma)?,
        });
    }
    Ok(steps)
}
