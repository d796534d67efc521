use crate::error::{invalid, Result};
use serde::{Deserialize, Serialize};

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut f = 3;
    while f * f <= n {
        if n.is_multiple_of(f) {
            return false;
        }
        f += 2;
    }
    true
}

/// Primes `p` with `lo ≤ p ≤ hi`.
pub fn primes_between(lo: u64, hi: u64) -> Vec<u64> {
    (lo..=hi).filter(|&n| is_prime(n)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum ScheduleMode {
    /// Greedy: `p_{k+1}` is the smallest prime in `[c·p_k, C·p_k)`.
    Ratio { c: f64, cap: f64, first: u64 },
    /// `p_k` is the smallest prime in `(2^k, 2^{k+1/2})`, from the first `k` where one exists.
    DyadicHalf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrimeSchedule {
    pub primes: Vec<u64>,
    /// Dyadic exponent each term came from (dyadic-half mode only).
    pub exponents: Vec<u32>,
    /// Terms that fell back to `(2^k, 2^{k+1})` because the half interval had no prime.
    pub fallback: Vec<bool>,
}

impl PrimeSchedule {
    pub fn any_fallback(&self) -> bool {
        self.fallback.iter().any(|&f| f)
    }
}

fn dyadic_half_prime(k: u32) -> Option<(u64, bool)> {
    let lo = 1u64 << k;
    // p < 2^{k+1/2} ⇔ p² < 2^{2k+1}
    let strict = (lo + 1..).take_while(|&n| (n as u128).pow(2) < 1u128 << (2 * k + 1)).find(|&n| is_prime(n));
    match strict {
        Some(p) => Some((p, false)),
        None => (lo + 1..2 * lo).find(|&n| is_prime(n)).map(|p| (p, true)),
    }
}

pub fn prime_schedule(mode: &ScheduleMode, count: usize) -> Result<PrimeSchedule> {
    if count == 0 {
        return Err(invalid("a schedule needs at least one prime"));
    }
    match *mode {
        ScheduleMode::Ratio { c, cap, first } => {
            if !(c > 1.0 && cap > c) || !is_prime(first) {
                return Err(invalid("ratio mode needs 1 < c < C and a prime start"));
            }
            let mut primes = vec![first];
            while primes.len() < count {
                let p = *primes.last().unwrap_or(&first) as f64;
                let lo = (c * p).ceil() as u64;
                let hi = (cap * p).ceil() as u64; // exclusive
                let next = (lo..hi)
                    .find(|&n| is_prime(n))
                    .ok_or_else(|| invalid(format!("no prime in [{lo}, {hi}) after {p}")))?;
                primes.push(next);
            }
            Ok(PrimeSchedule { exponents: Vec::new(), fallback: vec![false; count], primes })
        }
        ScheduleMode::DyadicHalf => {
            let mut s = PrimeSchedule { primes: Vec::new(), exponents: Vec::new(), fallback: Vec::new() };
            let mut k = 0u32;
            // skip the leading exponents with no prime in the half interval at all
            while dyadic_half_prime(k).is_none_or(|(_, fb)| fb) {
                k += 1;
            }
            while s.primes.len() < count {
                if k > 60 {
                    return Err(invalid("dyadic schedule exhausted 64-bit range"));
                }
                let (p, fb) =
                    dyadic_half_prime(k).ok_or_else(|| invalid(format!("no prime in (2^{k}, 2^{})", k + 1)))?;
                s.primes.push(p);
                s.exponents.push(k);
                s.fallback.push(fb);
                k += 1;
            }
            Ok(s)
        }
    }
}

/// `p_k ≈ 2^{γk}` by repeating dyadic-half terms: term `k` (from 1) uses the
/// exponent `max(k₀, ⌈kγ⌉)` where `k₀` is the first exponent of the raw schedule.
pub fn repeated_schedule(gamma: f64, count: usize) -> Result<PrimeSchedule> {
    if !(gamma > 0.0) {
        return Err(invalid("γ must be positive"));
    }
    let first = prime_schedule(&ScheduleMode::DyadicHalf, 1)?;
    let k0 = first.exponents[0];
    let mut s = PrimeSchedule { primes: Vec::new(), exponents: Vec::new(), fallback: Vec::new() };
    for k in 1..=count {
        let e = ((k as f64 * gamma).ceil() as u32).max(k0);
        let (p, fb) = dyadic_half_prime(e).ok_or_else(|| invalid(format!("no prime above 2^{e}")))?;
        s.primes.push(p);
        s.exponents.push(e);
        s.fallback.push(fb);
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dyadic_half_examples() {
        let s = prime_schedule(&ScheduleMode::DyadicHalf, 6).unwrap();
        assert_eq!(&s.primes[..2], &[5, 11]);
        assert_eq!(s.exponents[0], 2);
        for (&p, &k) in s.primes.iter().zip(&s.exponents) {
            assert!(p > 1 << k);
            assert!(!s.any_fallback() && (p as f64) < 2f64.powf(k as f64 + 0.5));
        }
    }

    #[test]
    fn ratio_example() {
        let s = prime_schedule(&ScheduleMode::Ratio { c: 2.0, cap: 4.0, first: 5 }, 4).unwrap();
        assert_eq!(s.primes[1], 11);
        for w in s.primes.windows(2) {
            assert!(2 * w[0] <= w[1] && w[1] < 4 * w[0]);
        }
    }

    #[test]
    fn repeated_schedule_repeats() {
        let s = repeated_schedule(0.5, 8).unwrap();
        assert_eq!(s.primes[0], 5);
        assert!(s.primes.windows(2).any(|w| w[0] == w[1]));
        assert!(s.primes.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn primality() {
        assert_eq!(primes_between(1, 30), vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }
}
