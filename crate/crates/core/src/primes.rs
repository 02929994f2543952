//! Prime generation and the integer helpers the oracles need.
//!
//! [`PrimeCache`] holds every prime up to the largest integer sieved so far.
//! It only ever grows: asking for a larger range sieves the new segment
//! `(source_limit, new_limit]` against the primes already known, with the new
//! limit at least doubling the old one. Growth needs `&mut self`, reads need
//! `&self`, so a shared snapshot is always a consistent prefix.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Result, ZetaError};

/// Environment variable naming the on-disk prime cache.
pub const CACHE_ENV: &str = "ZETA_PRIME_CACHE";

/// Above this bound `smooth_numbers` enumerates products of prime powers
/// instead of filtering every integer.
const SMOOTH_FILTER_LIMIT: u64 = 1_000_000;

const SEGMENT_LEN: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeCache {
    primes: Vec<u64>,
    source_limit: u64,
}

impl Default for PrimeCache {
    fn default() -> Self {
        Self::new()
    }
}

impl PrimeCache {
    pub fn new() -> Self {
        PrimeCache {
            primes: Vec::new(),
            source_limit: 1,
        }
    }

    pub fn with_limit(limit: u64) -> Self {
        let mut cache = Self::new();
        cache.extend_to(limit);
        cache
    }

    /// All primes found so far, ascending.
    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// Largest integer that has been sieved.
    pub fn source_limit(&self) -> u64 {
        self.source_limit
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// Sieve at least up to `limit`. Extensions at least double the sieved
    /// range so repeated small requests stay amortized.
    pub fn extend_to(&mut self, limit: u64) {
        if limit <= self.source_limit {
            return;
        }
        let target = limit.max(self.source_limit.saturating_mul(2));
        self.sieve_through(target);
    }

    /// Like [`extend_to`](Self::extend_to) but never sieves past `cap`
    /// (unless `limit` itself is larger).
    pub fn extend_to_capped(&mut self, limit: u64, cap: u64) {
        if limit <= self.source_limit {
            return;
        }
        let target = limit.max(self.source_limit.saturating_mul(2).min(cap));
        self.sieve_through(target);
    }

    /// Extend until at least `count` primes are known.
    pub fn ensure_count(&mut self, count: usize) {
        if self.primes.len() >= count {
            return;
        }
        // p_k < k (ln k + ln ln k) for k >= 6
        let k = count.max(6) as f64;
        let estimate = (k * (k.ln() + k.ln().ln())).ceil() as u64;
        self.extend_to(estimate.max(13));
        while self.primes.len() < count {
            let next = self.source_limit.saturating_mul(2);
            self.extend_to(next);
        }
    }

    /// The first `count` primes.
    pub fn first(&mut self, count: usize) -> &[u64] {
        self.ensure_count(count);
        &self.primes[..count]
    }

    /// Exactly the primes in `[2, limit]`, ascending.
    pub fn primes_up_to(&mut self, limit: u64) -> &[u64] {
        self.extend_to(limit);
        let end = self.primes.partition_point(|&p| p <= limit);
        &self.primes[..end]
    }

    /// The `k`-th prime, 1-based.
    pub fn nth_prime(&mut self, k: usize) -> Result<u64> {
        if k == 0 {
            return Err(ZetaError::InvalidArgument(
                "prime index must be at least 1".into(),
            ));
        }
        self.ensure_count(k);
        Ok(self.primes[k - 1])
    }

    pub fn smallest_prime_factor(&mut self, n: u64) -> Result<u64> {
        if n < 2 {
            return Err(ZetaError::InvalidArgument(format!(
                "smallest prime factor needs n >= 2, got {n}"
            )));
        }
        self.extend_to(isqrt(n));
        Ok(spf_by_trial(&self.primes, n))
    }

    /// All `n <= bound` whose prime factors are all at most `p_i`, including 1.
    pub fn smooth_numbers(&mut self, i: usize, bound: u64) -> Result<Vec<u64>> {
        if i == 0 || bound == 0 {
            return Err(ZetaError::InvalidArgument(format!(
                "smooth_numbers needs i >= 1 and bound >= 1, got i = {i}, bound = {bound}"
            )));
        }
        self.ensure_count(i);
        if bound > SMOOTH_FILTER_LIMIT {
            Ok(smooth_by_products(&self.primes[..i], bound))
        } else {
            let largest = self.primes[i - 1];
            self.extend_to(isqrt(bound));
            Ok(smooth_by_filter(&self.primes, largest, bound))
        }
    }

    /// Path named by `ZETA_PRIME_CACHE`, if set and non-empty.
    pub fn env_path() -> Option<PathBuf> {
        std::env::var_os(CACHE_ENV)
            .filter(|v| !v.is_empty())
            .map(PathBuf::from)
    }

    /// Load from `ZETA_PRIME_CACHE` when it names an existing file; otherwise
    /// start empty.
    pub fn from_env() -> Result<Self> {
        match Self::env_path() {
            Some(path) if path.exists() => Self::load(&path),
            _ => Ok(Self::new()),
        }
    }

    /// Read a cache file: one decimal prime per line, ascending from 2.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| ZetaError::Cache(format!("{}: {e}", path.display())))?;
        let mut primes = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let p: u64 = line.parse().map_err(|_| {
                ZetaError::Cache(format!(
                    "{}:{}: not an integer: {line:?}",
                    path.display(),
                    lineno + 1
                ))
            })?;
            if let Some(&prev) = primes.last() {
                if p <= prev || p.is_multiple_of(2) {
                    return Err(ZetaError::Cache(format!(
                        "{}:{}: {p} breaks the ascending odd-prime sequence",
                        path.display(),
                        lineno + 1
                    )));
                }
            } else if p != 2 {
                return Err(ZetaError::Cache(format!(
                    "{}: first prime must be 2, found {p}",
                    path.display()
                )));
            }
            primes.push(p);
        }
        let source_limit = primes.last().copied().unwrap_or(1);
        Ok(PrimeCache {
            primes,
            source_limit,
        })
    }

    /// Write the cache atomically (temp file + rename).
    pub fn save(&self, path: &Path) -> Result<()> {
        let io = |e: std::io::Error| ZetaError::Cache(format!("{}: {e}", path.display()));
        let tmp = path.with_extension("tmp");
        {
            let mut out = std::io::BufWriter::new(fs::File::create(&tmp).map_err(io)?);
            for p in &self.primes {
                writeln!(out, "{p}").map_err(io)?;
            }
            out.flush().map_err(io)?;
        }
        fs::rename(&tmp, path).map_err(io)
    }

    fn sieve_through(&mut self, hi: u64) {
        let root = isqrt(hi);
        if root > self.source_limit {
            self.sieve_through(root);
        }
        let base_len = self.primes.partition_point(|&p| p <= root);
        let mut found = Vec::new();
        let mut lo = self.source_limit + 1;
        let mut composite = Vec::new();
        while lo <= hi {
            let seg_hi = hi.min(lo.saturating_add(SEGMENT_LEN - 1));
            composite.clear();
            composite.resize((seg_hi - lo + 1) as usize, false);
            for &p in &self.primes[..base_len] {
                let sq = p * p;
                if sq > seg_hi {
                    break;
                }
                let mut m = sq.max(lo.div_ceil(p) * p);
                while m <= seg_hi {
                    composite[(m - lo) as usize] = true;
                    m += p;
                }
            }
            found.extend(
                composite
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| !c)
                    .map(|(off, _)| lo + off as u64)
                    .filter(|&n| n >= 2),
            );
            lo = seg_hi + 1;
        }
        self.primes.extend(found);
        self.source_limit = hi;
    }
}

pub fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r.checked_mul(r).is_none_or(|sq| sq > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|sq| sq <= n) {
        r += 1;
    }
    r
}

/// Trial division by `primes`, which must contain every prime up to `sqrt(n)`.
pub(crate) fn spf_by_trial(primes: &[u64], n: u64) -> u64 {
    for &p in primes {
        if p * p > n {
            break;
        }
        if n.is_multiple_of(p) {
            return p;
        }
    }
    n
}

fn smooth_by_filter(primes: &[u64], largest: u64, bound: u64) -> Vec<u64> {
    (1..=bound)
        .filter(|&n| {
            let mut m = n;
            while m > 1 {
                let q = spf_by_trial(primes, m);
                if q > largest {
                    return false;
                }
                m /= q;
            }
            true
        })
        .collect()
}

fn smooth_by_products(primes: &[u64], bound: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for &p in primes {
        if p > bound {
            break;
        }
        let len = out.len();
        for idx in 0..len {
            let mut m = out[idx];
            while let Some(next) = m.checked_mul(p).filter(|&x| x <= bound) {
                out.push(next);
                m = next;
            }
        }
    }
    out.sort_unstable();
    out
}
