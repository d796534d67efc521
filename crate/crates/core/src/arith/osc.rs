//! `μ_N` (averages along the curve sequence), `ν_N` (weighted block averages),
//! and the sharp-cutoff multipliers `V_t`.

use super::fourier::{e, FiniteFieldFn};
use super::set::ArithParams;
use crate::error::{budget, invalid, Result};
use crate::rng::CounterRng;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OscConfig {
    pub params: ArithParams,
    /// Frequencies `k/grid` per axis.
    pub grid: usize,
    /// Side of the torus `ℤ_L^d` carrying the `V_t` checks.
    pub torus: usize,
    /// Lacunary times `⌈ρ^i⌉`.
    pub lacunary_ratio: f64,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockSup {
    pub k: usize,
    pub n: u64,
    pub sup: f64,
    pub argmax: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FMultSums {
    /// `sup_α Σ_{t∈I} |ν̂_t(α) − V̂_t(α)|` over the grid and a dyadic diagonal.
    pub sup: f64,
    pub argmax: Vec<f64>,
    /// The three pieces at the maximizer: `k(t) < K`, `k(t) = K`, `k(t) > K`, with `|α| ≈ 1/p_K`.
    pub below: f64,
    pub same: f64,
    pub above: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradientRow {
    pub t: u64,
    pub k: usize,
    /// `‖∇ν̂_t‖_∞ = 2π·max_c Σ n_c ν_t(n)` (supports lie in the positive orthant).
    pub gradient: f64,
    pub over_block_side: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TelescopeRow {
    pub sample: usize,
    pub f_l2_sq: f64,
    pub sum: f64,
    pub excess: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OscProfile {
    pub blocks: Vec<BlockSup>,
    /// Some three consecutive complete blocks have strictly decreasing sups.
    pub decreasing_triple: bool,
    pub lacunary: Vec<u64>,
    pub fmult: FMultSums,
    pub gradients: Vec<GradientRow>,
    pub telescoping: Vec<TelescopeRow>,
    pub telescoping_max_excess: f64,
}

/// `Σ_{n=a}^{a+len−1} e(nα)`.
fn interval_sum(a: i64, len: u64, alpha: f64) -> Complex64 {
    let x = alpha.rem_euclid(1.0);
    if x == 0.0 {
        return Complex64::new(len as f64, 0.0);
    }
    let r = e(x);
    e((a as f64 * x).rem_euclid(1.0)) * (e((len as f64 * x).rem_euclid(1.0)) - 1.0) / (r - 1.0)
}

/// Signed representative in `(−1/2, 1/2]`.
fn signed(x: f64) -> f64 {
    let y = x.rem_euclid(1.0);
    if y > 0.5 {
        y - 1.0
    } else {
        y
    }
}

struct Layout<'a> {
    params: &'a ArithParams,
    ends: Vec<u64>,
}

impl<'a> Layout<'a> {
    fn new(params: &'a ArithParams) -> Self {
        let ends = (1..=params.primes.len()).map(|k| params.block_end(k)).collect();
        Self { params, ends }
    }

    /// `(k(t), j(t))` with `1 ≤ j ≤ p_k`; a block end belongs to its own block.
    fn locate(&self, t: u64) -> (usize, u64) {
        let k = self.ends.partition_point(|&n| n < t) + 1;
        let prev = if k > 1 { self.ends[k - 2] } else { 0 };
        (k, t - prev)
    }

    fn side(&self, k: usize) -> u64 {
        self.params.primes[k - 1].pow(self.params.q as u32)
    }

    /// `ν̂_t(α)`. Block `k` carries mass `p_k` (or `j(t)` for the current one) uniformly on
    /// `a_k + [0, p_k^q − 1]^d`.
    fn nu_hat(&self, t: u64, alpha: &[f64]) -> Complex64 {
        let (kt, jt) = self.locate(t);
        let mut acc = Complex64::default();
        for k in 1..=kt {
            let p = self.params.primes[k - 1];
            let mass = if k == kt { jt } else { p } as f64;
            let side = self.side(k);
            let a = self.params.shifts[k - 1];
            let mut box_hat = Complex64::new(mass / (side as f64).powi(self.params.d as i32), 0.0);
            for &x in alpha {
                box_hat *= interval_sum(a, side, x);
            }
            acc += box_hat;
        }
        acc / t as f64
    }

    /// `2π max_c Σ n_c ν_t(n)`.
    fn gradient(&self, t: u64) -> f64 {
        let (kt, jt) = self.locate(t);
        let mut moment = 0.0;
        for k in 1..=kt {
            let mass = if k == kt { jt } else { self.params.primes[k - 1] } as f64;
            let side = self.side(k) as f64;
            let a = self.params.shifts[k - 1] as f64;
            moment += mass * (a + (side - 1.0) / 2.0);
        }
        2.0 * std::f64::consts::PI * moment / t as f64
    }
}

fn grid_points(d: usize, grid: usize) -> impl Iterator<Item = Vec<f64>> {
    (0..grid.pow(d as u32)).map(move |mut c| {
        let mut a = vec![0.0; d];
        for x in a.iter_mut().rev() {
            *x = (c % grid) as f64 / grid as f64;
            c /= grid;
        }
        a
    })
}

pub fn lacunary_times(ratio: f64, max: u64) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::new();
    let mut x = 1.0f64;
    while x.ceil() as u64 <= max {
        let t = x.ceil() as u64;
        if out.last() != Some(&t) {
            out.push(t);
        }
        x *= ratio;
    }
    out
}

/// Block-end sups of `|μ̂_N − ν̂_N|` over the frequency grid.
pub fn block_sups(params: &ArithParams, grid: usize) -> Result<Vec<BlockSup>> {
    params.validate()?;
    let d = params.d;
    let cells = (grid as u128).pow(d as u32);
    budget("arith.osc.grid", 1 << 22, cells)?;
    let total = params.block_end(params.primes.len());
    budget("arith.osc.points", 50_000_000, total as u128 * cells)?;
    let layout = Layout::new(params);
    let alphas: Vec<Vec<f64>> = grid_points(d, grid).collect();
    let mut mu_sum = vec![Complex64::default(); alphas.len()];
    let mut out = Vec::new();
    for k in 1..=params.primes.len() {
        for pt in params.block(k)? {
            for (s, a) in mu_sum.iter_mut().zip(&alphas) {
                let phase: f64 = pt.coords().iter().zip(a).map(|(&n, &x)| (n as f64 * x).rem_euclid(1.0)).sum();
                *s += e(phase);
            }
        }
        let n = layout.ends[k - 1];
        let (mut sup, mut arg) = (0.0f64, vec![0.0; d]);
        for (s, a) in mu_sum.iter().zip(&alphas) {
            let diff = (*s / n as f64 - layout.nu_hat(n, a)).norm();
            if diff > sup {
                sup = diff;
                arg = a.clone();
            }
        }
        out.push(BlockSup { k, n, sup, argmax: arg });
    }
    Ok(out)
}

fn fmult_sums(layout: &Layout, times: &[u64], d: usize, grid: usize) -> FMultSums {
    let diagonal = (1..=20).map(|s| vec![(-(s as f64)).exp2(); d]);
    let mut best = FMultSums { sup: 0.0, argmax: vec![0.0; d], below: 0.0, same: 0.0, above: 0.0 };
    for alpha in grid_points(d, grid).chain(diagonal) {
        let size = alpha.iter().map(|&x| signed(x).abs()).fold(0.0, f64::max);
        // K with 1/p_K closest to |α| on a log scale
        let big_k = if size == 0.0 {
            usize::MAX
        } else {
            (1..=layout.params.primes.len())
                .min_by(|&a, &b| {
                    let da = (size * layout.params.primes[a - 1] as f64).ln().abs();
                    let db = (size * layout.params.primes[b - 1] as f64).ln().abs();
                    da.total_cmp(&db)
                })
                .unwrap_or(1)
        };
        let (mut below, mut same, mut above) = (0.0, 0.0, 0.0);
        for &t in times {
            let (k, _) = layout.locate(t);
            let v = if size <= 1.0 / layout.params.primes[k - 1] as f64 { 1.0 } else { 0.0 };
            let gap = (layout.nu_hat(t, &alpha) - v).norm();
            match k.cmp(&big_k) {
                std::cmp::Ordering::Less => below += gap,
                std::cmp::Ordering::Equal => same += gap,
                std::cmp::Ordering::Greater => above += gap,
            }
        }
        let total = below + same + above;
        if total > best.sup {
            best = FMultSums { sup: total, argmax: alpha, below, same, above };
        }
    }
    best
}

/// `V_t` on `ℤ_L^d`: keep frequencies with `|ξ/L|_∞ ≤ 1/p_{k(t)}`. Returns
/// `(‖f‖², Σ_n ‖V_{t_{n−1}}f − V_{t_n}f‖²)`, the norms computed in physical space.
pub fn telescoping_sum(primes_at: &[u64], side: usize, f: &FiniteFieldFn) -> (f64, f64) {
    let hat = f.dft();
    let len = f.len() as f64;
    let moduli = f.moduli().to_vec();
    let size_of = |mut c: usize| {
        let mut s = 0.0f64;
        for &m in moduli.iter().rev() {
            s = s.max(signed((c % m) as f64 / side as f64).abs());
            c /= m;
        }
        s
    };
    let sizes: Vec<f64> = (0..f.len()).map(size_of).collect();
    let mut total = 0.0;
    for w in primes_at.windows(2) {
        let (a, b) = (1.0 / w[0] as f64, 1.0 / w[1] as f64);
        // conjugate trick: the inverse transform is conj(DFT(conj h))/|G|
        let h: Vec<Complex64> = hat
            .values()
            .iter()
            .zip(&sizes)
            .map(|(v, &s)| {
                let keep = (s <= a) as i32 as f64 - (s <= b) as i32 as f64;
                (v * keep).conj()
            })
            .collect();
        let g = FiniteFieldFn::new(moduli.clone(), h).expect("same shape").dft();
        total += g.values().iter().map(|v| (v.conj() / len).norm_sqr()).sum::<f64>();
    }
    (f.l2_sq(), total)
}

pub fn osc_profile(cfg: &OscConfig) -> Result<OscProfile> {
    let params = &cfg.params;
    if params.primes.len() < 3 {
        return Err(invalid("need at least three complete blocks"));
    }
    if cfg.lacunary_ratio <= 1.0 || cfg.grid == 0 || cfg.torus == 0 {
        return Err(invalid("lacunary ratio must exceed 1 and grids must be nonempty"));
    }
    let blocks = block_sups(params, cfg.grid)?;
    let decreasing_triple = blocks.windows(3).any(|w| w[0].sup > w[1].sup && w[1].sup > w[2].sup);
    let layout = Layout::new(params);
    let total = *layout.ends.last().expect("nonempty");
    let lacunary = lacunary_times(cfg.lacunary_ratio, total);
    let fmult = fmult_sums(&layout, &lacunary, params.d, cfg.grid);
    let gradients = lacunary
        .iter()
        .map(|&t| {
            let (k, _) = layout.locate(t);
            let g = layout.gradient(t);
            GradientRow { t, k, gradient: g, over_block_side: g / layout.side(k) as f64 }
        })
        .collect();

    let cells = cfg.torus.pow(params.d as u32);
    budget("arith.osc.torus", 1 << 20, cells as u128)?;
    let primes_at: Vec<u64> = lacunary.iter().map(|&t| params.primes[layout.locate(t).0 - 1]).collect();
    let mut rng = CounterRng::new(cfg.seed, 0x05C);
    let mut telescoping = Vec::new();
    for sample in 0..cfg.samples {
        let values: Vec<Complex64> = (0..cells).map(|_| Complex64::new(2.0 * rng.next_f64() - 1.0, 0.0)).collect();
        let f = FiniteFieldFn::new(vec![cfg.torus; params.d], values)?;
        let (norm, sum) = telescoping_sum(&primes_at, cfg.torus, &f);
        telescoping.push(TelescopeRow { sample, f_l2_sq: norm, sum, excess: sum - norm });
    }
    let telescoping_max_excess = telescoping.iter().map(|r| r.excess).fold(f64::NEG_INFINITY, f64::max);
    Ok(OscProfile { blocks, decreasing_triple, lacunary, fmult, gradients, telescoping, telescoping_max_excess })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> ArithParams {
        ArithParams::generate(2, 1, vec![5, 11, 23, 47], 2.0, 4.0).unwrap()
    }

    #[test]
    fn interval_sum_matches_direct() {
        for (a, len, x) in [(3i64, 7u64, 0.13), (0, 1, 0.4), (-2, 5, 0.0), (10, 9, 0.5)] {
            let direct: Complex64 = (a..a + len as i64).map(|n| e((n as f64 * x).rem_euclid(1.0))).sum();
            assert!((direct - interval_sum(a, len, x)).norm() < 1e-10);
        }
    }

    #[test]
    fn nu_is_a_probability_measure() {
        let p = params();
        let l = Layout::new(&p);
        for t in [1u64, 5, 6, 20, 86] {
            assert!((l.nu_hat(t, &[0.0, 0.0]) - 1.0).norm() < 1e-12);
        }
        assert_eq!(l.locate(5), (1, 5));
        assert_eq!(l.locate(6), (2, 1));
    }

    #[test]
    fn nu_hat_matches_direct_sum() {
        let p = ArithParams::generate(1, 1, vec![3, 7], 2.0, 4.0).unwrap();
        let l = Layout::new(&p);
        // t = 5: all of block 1 on [0, 2] plus two points' worth on a_2 + [0, 6]
        let alpha = 0.137;
        let mut direct = Complex64::default();
        for n in 0..3i64 {
            direct += e(n as f64 * alpha) * (3.0 / 3.0);
        }
        for n in 0..7i64 {
            direct += e(((p.shifts[1] + n) as f64 * alpha).rem_euclid(1.0)) * (2.0 / 7.0);
        }
        assert!((l.nu_hat(5, &[alpha]) - direct / 5.0).norm() < 1e-12);
    }

    #[test]
    fn full_curve_has_no_discrepancy() {
        // m = 1: the curve is all of ℤ_p, so μ_N = ν_N at block ends
        let p = ArithParams::generate(1, 1, vec![5, 11, 23], 2.0, 4.0).unwrap();
        assert!(block_sups(&p, 32).unwrap().iter().all(|b| b.sup < 1e-9));
    }

    #[test]
    fn lacunary_is_strictly_increasing() {
        let t = lacunary_times(1.5, 100);
        assert_eq!(t[0], 1);
        assert!(t.windows(2).all(|w| w[0] < w[1]));
        assert!(*t.last().unwrap() <= 100);
    }

    #[test]
    fn telescoping_never_exceeds_norm() {
        let cfg = OscConfig { params: params(), grid: 16, torus: 32, lacunary_ratio: 2.0, samples: 3, seed: 4 };
        let prof = osc_profile(&cfg).unwrap();
        assert!(prof.telescoping_max_excess <= 1e-9);
        assert!(prof.blocks.iter().all(|b| b.sup >= 0.0));
        assert!(prof.fmult.sup.is_finite());
    }
}
