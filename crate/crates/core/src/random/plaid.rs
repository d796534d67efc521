use super::dense::{odometer, ols_slope};
use super::profile::spread;
use crate::error::{budget, invalid, Result};
use crate::lattice::{LatticePoint, SparseMeasure};
use crate::rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub(crate) const STREAM_PLAID: u64 = 0x91A1D;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlaidConfig {
    pub d: usize,
    pub alpha: f64,
    pub seed: u64,
    pub jmin: u32,
    pub jmax: u32,
    /// Shares one stream across axes. Not supported; kept so configs can say so.
    #[serde(default)]
    pub diagonal: bool,
}

impl PlaidConfig {
    pub fn validate(&self) -> Result<()> {
        if self.diagonal {
            return Err(invalid("the diagonal plaid variant is not supported"));
        }
        if self.d == 0 || self.d > 4 {
            return Err(invalid("plaid sets need 1 ≤ d ≤ 4"));
        }
        if !(0.0..1.0).contains(&self.alpha) {
            return Err(invalid("plaid sets need 0 ≤ α < 1"));
        }
        if self.jmin == 0 || self.jmin > self.jmax || self.jmax > 30 {
            return Err(invalid("plaid j-range must satisfy 1 ≤ jmin ≤ jmax ≤ 30"));
        }
        Ok(())
    }
}

/// `ξ_{i,n}` with `P(ξ_{i,n} = 1) = n^{−α}`; the same stream serves every scale.
pub fn plaid_coin(cfg: &PlaidConfig, axis: usize, n: i64) -> bool {
    rng::coin(cfg.seed, STREAM_PLAID + axis as u64, &[n], (n as f64).powf(-cfg.alpha))
}

/// Per-axis selections on `[1, 2^{j+1} − 1]`; the sampled set is their product
/// minus the inner box `[1, 2^j − 1]^d`.
#[derive(Clone, Debug)]
pub struct PlaidSample {
    pub d: usize,
    pub j: u32,
    pub alpha: f64,
    pub seed: u64,
    pub axes: Vec<Vec<i64>>,
}

pub fn sample_plaid(cfg: &PlaidConfig, j: u32) -> Result<PlaidSample> {
    cfg.validate()?;
    if j == 0 {
        return Err(invalid("plaid scales start at j = 1"));
    }
    let l1 = (1i64 << (j + 1)) - 1;
    let axes = (0..cfg.d).map(|i| (1..=l1).filter(|&n| plaid_coin(cfg, i, n)).collect()).collect();
    Ok(PlaidSample { d: cfg.d, j, alpha: cfg.alpha, seed: cfg.seed, axes })
}

impl PlaidSample {
    fn l1(&self) -> i64 {
        (1i64 << (self.j + 1)) - 1
    }

    fn l0(&self) -> i64 {
        (1i64 << self.j) - 1
    }

    /// `2^{d(α−1)j}`.
    pub fn height(&self) -> f64 {
        (self.d as f64 * (self.alpha - 1.0) * self.j as f64).exp2()
    }

    fn in_shell(&self, n: &[i64]) -> bool {
        n.iter().any(|&c| c > self.l0())
    }

    fn for_each_product(&self, lists: &[Vec<i64>], mut visit: impl FnMut(&[i64])) {
        if lists.iter().any(|l| l.is_empty()) {
            return;
        }
        let mut pos = vec![0usize; self.d];
        let mut cur: Vec<i64> = lists.iter().map(|l| l[0]).collect();
        loop {
            if self.in_shell(&cur) {
                visit(&cur);
            }
            let mut i = self.d;
            loop {
                if i == 0 {
                    return;
                }
                i -= 1;
                pos[i] += 1;
                if pos[i] < lists[i].len() {
                    cur[i] = lists[i][pos[i]];
                    break;
                }
                pos[i] = 0;
                cur[i] = lists[i][0];
            }
        }
    }

    pub fn support_size(&self) -> u128 {
        let full: u128 = self.axes.iter().map(|a| a.len() as u128).product();
        let inner: u128 = self.axes.iter().map(|a| a.iter().filter(|&&n| n <= self.l0()).count() as u128).product();
        full - inner
    }

    pub fn mu(&self) -> Result<SparseMeasure<f64>> {
        budget("random.plaid.mu", 50_000_000, self.support_size())?;
        let a = self.height();
        let mut items = Vec::new();
        self.for_each_product(&self.axes, |n| items.push((LatticePoint::new(n), a)));
        SparseMeasure::from_entries(self.d, items, format!("plaid.mu[j={}]", self.j))
    }

    /// `ν_j = μ_j − Eμ_j = μ_j − 2^{d(α−1)j}∏n_i^{−α}` on the positive shell.
    pub fn nu(&self) -> Result<SparseMeasure<f64>> {
        let l1 = self.l1();
        budget("random.plaid.nu", 4_000_000, (l1 as u128).pow(self.d as u32))?;
        let a = self.height();
        let full: Vec<Vec<i64>> = vec![(1..=l1).collect(); self.d];
        let mu = self.mu()?;
        let mut items = Vec::new();
        self.for_each_product(&full, |n| {
            let w: f64 = n.iter().map(|&c| (c as f64).powf(-self.alpha)).product();
            let p = LatticePoint::new(n);
            let v = mu.get(&p) - a * w;
            items.push((p, v));
        });
        SparseMeasure::from_entries(self.d, items, format!("plaid.nu[j={}]", self.j))
    }

    /// The four rank-one terms of `ν_j / 2^{d(α−1)j}`: `(sign, per-axis vectors on [1, L1])`.
    fn tensor_terms(&self) -> Vec<(f64, Vec<Vec<f64>>)> {
        let (l1, l0) = (self.l1() as usize, self.l0() as usize);
        let mut terms = Vec::new();
        for (sign, len, selected) in [(1.0, l1, true), (-1.0, l0, true), (-1.0, l1, false), (1.0, l0, false)] {
            let factors = (0..self.d)
                .map(|i| {
                    let mut v = vec![0.0; l1];
                    if selected {
                        for &n in self.axes[i].iter().take_while(|&&n| n as usize <= len) {
                            v[n as usize - 1] = 1.0;
                        }
                    } else {
                        for (k, slot) in v.iter_mut().enumerate().take(len) {
                            *slot = ((k + 1) as f64).powf(-self.alpha);
                        }
                    }
                    v
                })
                .collect();
            terms.push((sign, factors));
        }
        terms
    }
}

/// `Σ_n u(n)v(n − y)` for `y ∈ [−(L−1), L−1]`, stored at `y + L − 1`.
fn correlate_1d(u: &[f64], v: &[f64]) -> Vec<f64> {
    let l = u.len();
    let mut out = vec![0.0; 2 * l - 1];
    for (n, &un) in u.iter().enumerate() {
        if un == 0.0 {
            continue;
        }
        for (m, &vm) in v.iter().enumerate() {
            // y = n − m
            out[n + l - 1 - m] += un * vm;
        }
    }
    out
}

/// `ν_j∗ν̃_j` split by the nonzero pattern of the argument.
#[derive(Clone, Debug)]
pub struct PlaidDecomposition {
    pub j: u32,
    pub full: SparseMeasure<f64>,
    /// Keyed by the sorted list of nonzero coordinates.
    pub pieces: BTreeMap<Vec<usize>, SparseMeasure<f64>>,
}

impl PlaidDecomposition {
    /// `Σ_I χ_{j,I}` rebuilt and compared entry by entry with the full correlation.
    pub fn reconstruction_exact(&self) -> bool {
        let mut total = SparseMeasure::zero(self.full.dim(), "plaid.chi.sum");
        for piece in self.pieces.values() {
            for (x, v) in piece.iter() {
                if total.get(x) != 0.0 {
                    return false;
                }
                if total.add_at(x.clone(), v).is_err() {
                    return false;
                }
            }
        }
        total.len() == self.full.len() && self.full.iter().all(|(x, v)| total.get(x) == *v)
    }

    pub fn sup_by_pattern(&self) -> BTreeMap<Vec<usize>, f64> {
        self.pieces.iter().map(|(k, m)| (k.clone(), m.iter().map(|(_, v)| v.abs()).fold(0.0, f64::max))).collect()
    }
}

pub fn pattern(x: &[i64]) -> Vec<usize> {
    x.iter().enumerate().filter(|(_, &c)| c != 0).map(|(i, _)| i).collect()
}

/// Visits every `(x, ν_j∗ν̃_j(x))` of the difference cube through the rank-one
/// expansion: 16 products of one-dimensional correlations.
fn scan_plaid(s: &PlaidSample, max_cells: u128, mut visit: impl FnMut(&[i64], f64)) -> Result<()> {
    let h = s.l1() - 1;
    budget("random.plaid_profile", max_cells, ((2 * h + 1) as u128).pow(s.d as u32))?;
    let terms = s.tensor_terms();
    let a2 = s.height() * s.height();
    let mut pairs: Vec<(f64, Vec<Vec<f64>>)> = Vec::with_capacity(16);
    for (cs, us) in &terms {
        for (ct, vs) in &terms {
            let corr = us.iter().zip(vs).map(|(u, v)| correlate_1d(u, v)).collect();
            pairs.push((a2 * cs * ct, corr));
        }
    }
    let mut x = vec![-h; s.d];
    loop {
        let mut w = 0.0;
        for (c, corr) in &pairs {
            let mut prod = *c;
            for (i, &xi) in x.iter().enumerate() {
                prod *= corr[i][(xi + h) as usize];
            }
            w += prod;
        }
        visit(&x, w);
        if !odometer(&mut x, h) {
            break;
        }
    }
    Ok(())
}

/// Cells a materialized decomposition may hold.
pub const PLAID_MATERIALIZE_CELLS: u128 = 1 << 22;

/// `ν_j∗ν̃_j` and its pieces `χ_{j,I}` as sparse measures (small scales).
pub fn plaid_correlation(s: &PlaidSample) -> Result<PlaidDecomposition> {
    let mut full_items = Vec::new();
    let mut pieces: BTreeMap<Vec<usize>, Vec<(LatticePoint, f64)>> = BTreeMap::new();
    scan_plaid(s, PLAID_MATERIALIZE_CELLS, |x, w| {
        if w != 0.0 {
            let p = LatticePoint::new(x);
            pieces.entry(pattern(x)).or_default().push((p.clone(), w));
            full_items.push((p, w));
        }
    })?;
    let full = SparseMeasure::from_entries(s.d, full_items, format!("plaid.autocorrelation[j={}]", s.j))?;
    let pieces = pieces
        .into_iter()
        .map(|(k, items)| {
            let m = SparseMeasure::from_entries(s.d, items, format!("plaid.chi[j={},I={:?}]", s.j, k));
            m.map(|m| (k, m))
        })
        .collect::<Result<_>>()?;
    Ok(PlaidDecomposition { j: s.j, full, pieces })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlaidRow {
    pub seed: u64,
    pub j: u32,
    pub at0: f64,
    pub support_size: u128,
    pub support_radius: i64,
    pub reconstruction_exact: bool,
    /// `(I, sup |χ_{j,I}|)` for every pattern present.
    pub sup_by_pattern: Vec<(Vec<usize>, f64)>,
    pub degenerate: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PatternSlope {
    pub pattern: Vec<usize>,
    pub slope: Option<f64>,
    /// `−d − #I/2 + dα`.
    pub predicted: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlaidProfile {
    pub seed: u64,
    pub rows: Vec<PlaidRow>,
    pub slopes: Vec<PatternSlope>,
    /// `max/min` over `j` of `at0 / 2^{d(α−1)j}`.
    pub origin_ratio_spread: Option<f64>,
    /// `I ⊊ I′ ⇒ sup χ_{I′} ≤ sup χ_I` at the largest `j`.
    pub nested_order_holds: bool,
}

pub fn plaid_profile(cfg: &PlaidConfig, max_cells: u128) -> Result<PlaidProfile> {
    cfg.validate()?;
    let mut rows = Vec::new();
    let patterns: Vec<Vec<usize>> =
        (0u32..1 << cfg.d).map(|m| (0..cfg.d).filter(|i| m >> i & 1 == 1).collect()).collect();
    for j in cfg.jmin..=cfg.jmax {
        let s = sample_plaid(cfg, j)?;
        let mut at0 = 0.0;
        let mut sup: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
        let mut mismatches = 0u64;
        scan_plaid(&s, max_cells, |x, w| {
            let own = pattern(x);
            // Σ_I χ_{j,I}(x), each piece being w on its own pattern and 0 elsewhere
            let mut rebuilt = 0.0;
            for p in &patterns {
                rebuilt += if *p == own { w } else { 0.0 };
            }
            if rebuilt != w {
                mismatches += 1;
            }
            if own.is_empty() {
                at0 = w;
            }
            if w != 0.0 {
                let e = sup.entry(own).or_insert(0.0);
                *e = e.max(w.abs());
            }
        })?;
        let support_size = s.support_size();
        rows.push(PlaidRow {
            seed: cfg.seed,
            j,
            at0,
            support_size,
            support_radius: if support_size == 0 {
                0
            } else {
                s.axes.iter().filter_map(|a| a.last().copied()).max().unwrap_or(0)
            },
            reconstruction_exact: mismatches == 0,
            sup_by_pattern: sup.into_iter().collect(),
            degenerate: support_size == 0,
        });
    }
    let d = cfg.d as f64;
    let mut by_pattern: BTreeMap<Vec<usize>, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for r in rows.iter().filter(|r| !r.degenerate) {
        for (k, v) in &r.sup_by_pattern {
            if *v > 0.0 {
                let e = by_pattern.entry(k.clone()).or_default();
                e.0.push(r.j as f64);
                e.1.push(v.log2());
            }
        }
    }
    let slopes = by_pattern
        .into_iter()
        .map(|(k, (xs, ys))| PatternSlope {
            predicted: -d - k.len() as f64 / 2.0 + d * cfg.alpha,
            slope: ols_slope(&xs, &ys),
            pattern: k,
        })
        .collect();
    let nested_order_holds = rows.last().is_none_or(|r| {
        r.sup_by_pattern.iter().all(|(i, si)| {
            r.sup_by_pattern.iter().all(|(i2, si2)| {
                let strict_superset = i2.len() > i.len() && i.iter().all(|c| i2.contains(c));
                !strict_superset || si2 <= si
            })
        })
    });
    let origin_ratio_spread =
        spread(rows.iter().filter(|r| !r.degenerate).map(|r| r.at0 / (d * (cfg.alpha - 1.0) * r.j as f64).exp2()));
    Ok(PlaidProfile { seed: cfg.seed, rows, slopes, origin_ratio_spread, nested_order_holds })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(d: usize, alpha: f64, seed: u64) -> PlaidConfig {
        PlaidConfig { d, alpha, seed, jmin: 1, jmax: 6, diagonal: false }
    }

    #[test]
    fn zero_alpha_is_the_full_shell_with_null_companion() {
        let s = sample_plaid(&cfg(2, 0.0, 1), 2).unwrap();
        assert_eq!(s.support_size(), 49 - 9);
        let nu = s.nu().unwrap();
        assert!(nu.iter().all(|(_, v)| *v == 0.0));
    }

    #[test]
    fn diagonal_is_rejected() {
        let c = PlaidConfig { diagonal: true, ..cfg(2, 0.4, 0) };
        assert!(sample_plaid(&c, 2).is_err());
    }

    #[test]
    fn marginal_frequency_matches_product() {
        // P((2,3) present) = 2^{−α}3^{−α}
        let alpha = 0.4;
        let trials = 20_000;
        let hits = (0..trials)
            .filter(|&seed| {
                let c = cfg(2, alpha, seed);
                plaid_coin(&c, 0, 2) && plaid_coin(&c, 1, 3)
            })
            .count();
        let p = 6f64.powf(-alpha);
        let sd = (p * (1.0 - p) / trials as f64).sqrt();
        assert!((hits as f64 / trials as f64 - p).abs() < 5.0 * sd);
    }

    #[test]
    fn tensor_correlation_matches_direct() {
        for (d, j) in [(1, 3), (2, 1), (2, 3), (3, 2)] {
            for seed in 0..3 {
                let s = sample_plaid(&cfg(d, 0.4, seed), j).unwrap();
                let nu = s.nu().unwrap();
                let direct = nu.convolve(&nu.reflect()).unwrap();
                let dec = plaid_correlation(&s).unwrap();
                let scale = direct.stats().unwrap().linf.max(1e-300);
                for (x, v) in direct.iter() {
                    assert!((dec.full.get(x) - v).abs() <= 1e-12 * scale);
                }
                for (x, v) in dec.full.iter() {
                    assert!((direct.get(x) - v).abs() <= 1e-12 * scale);
                }
                assert!(dec.reconstruction_exact());
                assert!(dec.pieces.keys().all(|k| dec.pieces[k].iter().all(|(x, _)| pattern(x.coords()) == *k)));
            }
        }
    }

    #[test]
    fn profile_orders_patterns() {
        let c = PlaidConfig { jmin: 3, jmax: 7, ..cfg(2, 0.4, 2) };
        let p = plaid_profile(&c, 1 << 24).unwrap();
        assert!(p.rows.iter().all(|r| r.reconstruction_exact));
        assert!(p.nested_order_holds);
        assert_eq!(p.slopes.len(), 4);
    }
}
