use crate::error::{invalid, Result};
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UnrestrictedCount {
    pub n: u64,
    pub count: u128,
    /// `#E_n / (n ln n)`; undefined (`None`) at `n = 1`.
    pub ratio: Option<f64>,
}

/// `#E_n = #{(s_r, t_s) : rs ≤ n}` for strictly increasing enumerations.
///
/// Injectivity makes the pairs distinct, so the count is `Σ_{r ≤ n} ⌊n/r⌋`;
/// the enumerations are still checked over the prefix that is used.
pub fn unrestricted_divergence_count(s: &[i64], t: &[i64], n: u64) -> Result<UnrestrictedCount> {
    if n < 1 {
        return Err(invalid("n must be at least 1"));
    }
    let need = n as usize;
    if s.len() < need || t.len() < need {
        return Err(invalid(format!("enumerations need {need} terms")));
    }
    if s[..need].windows(2).any(|w| w[1] <= w[0]) || t[..need].windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("enumerations must be strictly increasing"));
    }
    let count: u128 = (1..=n).map(|r| (n / r) as u128).sum();
    let ratio = (n > 1).then(|| count as f64 / (n as f64 * (n as f64).ln()));
    Ok(UnrestrictedCount { n, count, ratio })
}

/// Identity enumerations `s_m = m`, `t_m = m`.
pub fn unrestricted_count_identity(n: u64) -> Result<UnrestrictedCount> {
    let ids: Vec<i64> = (1..=n as i64).collect();
    unrestricted_divergence_count(&ids, &ids, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn small_cases() {
        assert_eq!(unrestricted_count_identity(4).unwrap().count, 8);
        assert_eq!(unrestricted_count_identity(1).unwrap().count, 1);
        assert!(unrestricted_count_identity(0).is_err());
    }

    #[test]
    fn matches_pair_enumeration() {
        let s: Vec<i64> = (1..=60).map(|m| m * m).collect();
        let t: Vec<i64> = (1..=60).map(|m| 3 * m + 1).collect();
        for n in [1u64, 7, 30, 60] {
            let mut pairs = HashSet::new();
            for r in 1..=n {
                for q in 1..=n / r {
                    pairs.insert((s[r as usize - 1], t[q as usize - 1]));
                }
            }
            assert_eq!(unrestricted_divergence_count(&s, &t, n).unwrap().count, pairs.len() as u128);
        }
    }

    #[test]
    fn rejects_non_increasing() {
        assert!(unrestricted_divergence_count(&[1, 1, 2], &[1, 2, 3], 3).is_err());
    }
}
