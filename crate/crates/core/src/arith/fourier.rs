//! Finite abelian groups `∏ℤ_{n_i}`, their DFT, and the character-sum bounds
//! for the moment curve.

use super::primes::is_prime;
use super::set::pow_mod;
use crate::error::{budget, invalid, Result};
use crate::rng::CounterRng;
use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// `e(x) = exp(2πix)`.
#[inline]
pub fn e(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * x)
}

fn roots(n: usize) -> Vec<Complex64> {
    (0..n).map(|k| e(k as f64 / n as f64)).collect()
}

/// Dense complex function on `∏ℤ_{n_i}`, row-major with the last axis fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteFieldFn {
    moduli: Vec<usize>,
    values: Vec<Complex64>,
}

pub const FINITE_FN_MAX_CELLS: u128 = 1 << 24;

impl FiniteFieldFn {
    pub fn new(moduli: Vec<usize>, values: Vec<Complex64>) -> Result<Self> {
        let size: u128 = moduli.iter().map(|&n| n as u128).product();
        budget("arith.finite_fn", FINITE_FN_MAX_CELLS, size)?;
        if moduli.is_empty() || moduli.contains(&0) || values.len() as u128 != size {
            return Err(invalid("values must fill the group"));
        }
        Ok(Self { moduli, values })
    }

    pub fn from_fn(moduli: Vec<usize>, f: impl Fn(&[usize]) -> Complex64) -> Result<Self> {
        let size: u128 = moduli.iter().map(|&n| n as u128).product();
        budget("arith.finite_fn", FINITE_FN_MAX_CELLS, size)?;
        let mut values = Vec::with_capacity(size as usize);
        let mut idx = vec![0usize; moduli.len()];
        for _ in 0..size {
            values.push(f(&idx));
            for a in (0..moduli.len()).rev() {
                idx[a] += 1;
                if idx[a] < moduli[a] {
                    break;
                }
                idx[a] = 0;
            }
        }
        Self::new(moduli, values)
    }

    pub fn moduli(&self) -> &[usize] {
        &self.moduli
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn index(&self, x: &[usize]) -> usize {
        x.iter().zip(&self.moduli).fold(0, |acc, (&v, &n)| acc * n + v % n)
    }

    pub fn get(&self, x: &[usize]) -> Complex64 {
        self.values[self.index(x)]
    }

    /// `f̂(ξ) = Σ_n f(n) e(Σ n_i ξ_i / n_i)`, one axis at a time with root tables.
    pub fn dft(&self) -> Self {
        let mut data = self.values.clone();
        let mut stride = 1usize;
        for a in (0..self.moduli.len()).rev() {
            let n = self.moduli[a];
            let table = roots(n);
            let block = stride * n;
            let mut line = vec![Complex64::default(); n];
            for outer in (0..data.len()).step_by(block) {
                for inner in 0..stride {
                    let base = outer + inner;
                    for k in 0..n {
                        let mut acc = Complex64::default();
                        for t in 0..n {
                            acc += data[base + t * stride] * table[(t * k) % n];
                        }
                        line[k] = acc;
                    }
                    for k in 0..n {
                        data[base + k * stride] = line[k];
                    }
                }
            }
            stride = block;
        }
        Self { moduli: self.moduli.clone(), values: data }
    }

    pub fn l2_sq(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }

    /// `|‖f‖₂² − ‖f̂‖₂²/|G|| / max(‖f‖₂², tiny)`.
    pub fn parseval_error(&self, hat: &Self) -> f64 {
        let lhs = self.l2_sq();
        let rhs = hat.l2_sq() / self.len() as f64;
        (lhs - rhs).abs() / lhs.max(1e-300)
    }
}

/// `μ̂′(θ) = (1/p) Σ_j e((jθ₁ + j²θ₂ + … + j^mθ_m)/p)` by direct summation.
pub fn curve_transform(p: u64, theta: &[u64]) -> Complex64 {
    let mut acc = Complex64::default();
    for j in 0..p {
        let mut ph = 0u64;
        let mut pw = 1u64;
        for &t in theta {
            pw = pw * j % p;
            ph = (ph + t % p * pw) % p;
        }
        acc += e(ph as f64 / p as f64);
    }
    acc / p as f64
}

/// `μ′` as a dense function on `ℤ_p^m`.
pub fn curve_measure(p: u64, m: usize) -> Result<FiniteFieldFn> {
    let mut values = vec![Complex64::default(); (p as usize).pow(m as u32)];
    let moduli = vec![p as usize; m];
    let mut f = FiniteFieldFn::new(moduli, std::mem::take(&mut values))?;
    for j in 0..p {
        let x: Vec<usize> = (1..=m).map(|i| pow_mod(j, i as u64, p) as usize).collect();
        let k = f.index(&x);
        f.values[k] += Complex64::new(1.0 / p as f64, 0.0);
    }
    Ok(f)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeilReport {
    pub p: u64,
    pub m: usize,
    pub frequencies: u64,
    pub max_nonzero: f64,
    pub argmax: Vec<u64>,
    /// `(m−1)p^{−1/2}`.
    pub bound: f64,
    pub at_zero: f64,
    pub violations: u64,
    pub pass: bool,
}

fn check_weil_args(p: u64, m: usize) -> Result<()> {
    if m < 1 || !is_prime(p) {
        return Err(invalid("p must be prime and m ≥ 1"));
    }
    if p <= m as u64 {
        return Err(crate::error::Error::Refused(format!("Weil's bound needs p > m (p = {p}, m = {m})")));
    }
    Ok(())
}

/// Exhaustive `max_{θ≠0} |μ̂′(θ)|` over `ℤ_p^m`. For each `(θ₂, …, θ_m)` the sum over
/// `j` is a length-`p` DFT in `θ₁`, so rows are transformed in batches.
pub fn dft_weil_check(p: u64, m: usize) -> Result<WeilReport> {
    check_weil_args(p, m)?;
    let pu = p as usize;
    budget("arith.weil", 1 << 36, (p as u128).pow(m as u32 + 1))?;
    let table = roots(pu);
    let powers: Vec<Vec<u64>> = (0..=m as u64).map(|i| (0..p).map(|j| pow_mod(j, i, p)).collect()).collect();
    let fft = FftPlanner::new().plan_fft(pu, FftDirection::Inverse);
    // rows: θ₂ ∈ ℤ_p (or a single row when m = 1); outer: (θ₃, …, θ_m)
    let rows = if m >= 2 { pu } else { 1 };
    let outer_count = if m >= 3 { pu.pow(m as u32 - 2) } else { 1 };
    let mut buf = vec![Complex64::default(); rows * pu];
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    let mut outer = vec![0u64; m.saturating_sub(2)];
    let mut rest = vec![0u64; pu];
    let bound = (m as f64 - 1.0) / (p as f64).sqrt();
    let mut best = (0.0f64, vec![0u64; m]);
    let mut violations = 0u64;
    let mut at_zero = 0.0;
    for o in 0..outer_count {
        for (j, r) in rest.iter_mut().enumerate() {
            *r = outer.iter().enumerate().map(|(i, &t)| t * powers[i + 3][j] % p).sum::<u64>() % p;
        }
        for t2 in 0..rows {
            let row = &mut buf[t2 * pu..(t2 + 1) * pu];
            for j in 0..pu {
                let sq = if m >= 2 { t2 as u64 * powers[2][j] % p } else { 0 };
                row[j] = table[((sq + rest[j]) % p) as usize];
            }
        }
        fft.process_with_scratch(&mut buf, &mut scratch);
        let outer_zero = o == 0;
        for t2 in 0..rows {
            for t1 in 0..pu {
                let v = buf[t2 * pu + t1].norm() / p as f64;
                if outer_zero && t2 == 0 && t1 == 0 {
                    at_zero = v;
                    continue;
                }
                if v > bound * (1.0 + 1e-12) {
                    violations += 1;
                }
                if v > best.0 {
                    let mut theta = vec![t1 as u64];
                    if m >= 2 {
                        theta.push(t2 as u64);
                    }
                    theta.extend(&outer);
                    best = (v, theta);
                }
            }
        }
        for o in outer.iter_mut() {
            *o += 1;
            if *o < p {
                break;
            }
            *o = 0;
        }
    }
    Ok(WeilReport {
        p,
        m,
        frequencies: p.pow(m as u32) - 1,
        max_nonzero: best.0,
        argmax: best.1,
        bound,
        at_zero,
        violations,
        pass: violations == 0,
    })
}

/// The same maximum by direct summation at every frequency; `O(p^{m+1})`.
pub fn weil_max_direct(p: u64, m: usize) -> Result<f64> {
    check_weil_args(p, m)?;
    budget("arith.weil_direct", 1 << 28, (p as u128).pow(m as u32 + 1))?;
    let mut theta = vec![0u64; m];
    let mut best = 0.0f64;
    loop {
        let mut i = 0;
        while i < m {
            theta[i] += 1;
            if theta[i] < p {
                break;
            }
            theta[i] = 0;
            i += 1;
        }
        if i == m {
            return Ok(best);
        }
        best = best.max(curve_transform(p, &theta).norm());
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductWeilReport {
    pub primes: Vec<u64>,
    pub m: usize,
    /// Max of `|μ̂_r′|` over frequencies whose every block is nonzero.
    pub max_all_blocks_nonzero: f64,
    /// `(m−1)^r / ∏√p_i`.
    pub bound: f64,
    /// Max over all `θ ≠ 0`; a zero block contributes a factor 1.
    pub max_unrestricted: f64,
    /// Product of the per-factor nonzero maxima.
    pub factored_max: f64,
    pub pass: bool,
}

/// Exhaustive scan of the dense product transform on `∏ℤ_{p_i}^m`.
pub fn product_weil_check(primes: &[u64], m: usize) -> Result<ProductWeilReport> {
    if primes.is_empty() {
        return Err(invalid("at least one factor"));
    }
    for &p in primes {
        check_weil_args(p, m)?;
    }
    let moduli: Vec<usize> = primes.iter().flat_map(|&p| std::iter::repeat_n(p as usize, m)).collect();
    let factors: Vec<FiniteFieldFn> = primes.iter().map(|&p| curve_measure(p, m)).collect::<Result<_>>()?;
    let product = FiniteFieldFn::from_fn(moduli, |x| {
        factors.iter().enumerate().map(|(i, f)| f.get(&x[i * m..(i + 1) * m])).product()
    })?;
    let hat = product.dft();
    let mut all_nonzero = 0.0f64;
    let mut unrestricted = 0.0f64;
    let mut idx = vec![0usize; hat.moduli.len()];
    for v in &hat.values {
        let blocks_nonzero = (0..primes.len()).all(|i| idx[i * m..(i + 1) * m].iter().any(|&t| t != 0));
        let is_zero = idx.iter().all(|&t| t == 0);
        let a = v.norm();
        if !is_zero {
            unrestricted = unrestricted.max(a);
        }
        if blocks_nonzero {
            all_nonzero = all_nonzero.max(a);
        }
        for a in (0..idx.len()).rev() {
            idx[a] += 1;
            if idx[a] < hat.moduli[a] {
                break;
            }
            idx[a] = 0;
        }
    }
    let factored_max = primes.iter().map(|&p| dft_weil_check(p, m).map(|r| r.max_nonzero)).product::<Result<f64>>()?;
    let bound = (m as f64 - 1.0).powi(primes.len() as i32) / primes.iter().map(|&p| (p as f64).sqrt()).product::<f64>();
    Ok(ProductWeilReport {
        primes: primes.to_vec(),
        m,
        max_all_blocks_nonzero: all_nonzero,
        bound,
        max_unrestricted: unrestricted,
        factored_max,
        pass: all_nonzero <= bound * (1.0 + 1e-12),
    })
}

/// Max over random frequencies of `|direct − factored|` for `μ̂_r′`; the direct
/// side sums over the whole product support without factoring.
pub fn product_factorization_error(primes: &[u64], m: usize, samples: usize, seed: u64) -> Result<f64> {
    let support: u128 = primes.iter().map(|&p| p as u128).product();
    budget("arith.product_factorization", 1 << 26, support * samples as u128)?;
    let mut rng = CounterRng::new(seed, 0xFAC7);
    let norm = support as f64;
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let theta: Vec<Vec<u64>> =
            primes.iter().map(|&p| (0..m).map(|_| rng.below(p as usize) as u64).collect()).collect();
        let factored: Complex64 = primes.iter().zip(&theta).map(|(&p, t)| curve_transform(p, t)).product();
        let mut direct = Complex64::default();
        let mut js = vec![0u64; primes.len()];
        loop {
            let mut phase = 0.0;
            for (i, (&p, t)) in primes.iter().zip(&theta).enumerate() {
                let mut ph = 0u64;
                let mut pw = 1u64;
                for &ti in t {
                    pw = pw * js[i] % p;
                    ph = (ph + ti * pw) % p;
                }
                phase += ph as f64 / p as f64;
            }
            direct += e(phase);
            let mut i = 0;
            while i < js.len() {
                js[i] += 1;
                if js[i] < primes[i] {
                    break;
                }
                js[i] = 0;
                i += 1;
            }
            if i == js.len() {
                break;
            }
        }
        worst = worst.max((direct / norm - factored).norm());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dft_matches_definition_and_parseval() {
        let f = FiniteFieldFn::from_fn(vec![3, 5], |x| {
            Complex64::new(x[0] as f64 - 0.5 * x[1] as f64, (x[0] * x[1]) as f64)
        })
        .unwrap();
        let hat = f.dft();
        for xi0 in 0..3 {
            for xi1 in 0..5 {
                let mut direct = Complex64::default();
                for n0 in 0..3 {
                    for n1 in 0..5 {
                        direct += f.get(&[n0, n1]) * e((n0 * xi0) as f64 / 3.0 + (n1 * xi1) as f64 / 5.0);
                    }
                }
                assert!((direct - hat.get(&[xi0, xi1])).norm() < 1e-12);
            }
        }
        assert!(f.parseval_error(&hat) < 1e-12);
    }

    #[test]
    fn weil_examples() {
        let r = dft_weil_check(7, 2).unwrap();
        assert!((r.max_nonzero - 7f64.powf(-0.5)).abs() < 1e-12);
        assert!((r.at_zero - 1.0).abs() < 1e-12);
        assert_eq!(r.frequencies, 48);
        let r = dft_weil_check(11, 3).unwrap();
        assert!(r.pass && r.max_nonzero <= 2.0 / 11f64.sqrt());
        assert!(dft_weil_check(3, 3).is_err());
    }

    #[test]
    fn fft_route_matches_direct_summation() {
        for (p, m) in [(5, 1), (5, 2), (7, 3), (11, 2), (13, 3), (7, 4)] {
            let fast = dft_weil_check(p, m).unwrap();
            let direct = weil_max_direct(p, m).unwrap();
            assert!((fast.max_nonzero - direct).abs() < 1e-12, "{p} {m}");
            let t = &fast.argmax;
            assert!((curve_transform(p, t).norm() - fast.max_nonzero).abs() < 1e-12);
        }
    }

    #[test]
    fn curve_measure_transform() {
        let mu = curve_measure(7, 2).unwrap();
        let hat = mu.dft();
        for t0 in 0..7 {
            for t1 in 0..7 {
                assert!((hat.get(&[t0, t1]) - curve_transform(7, &[t0 as u64, t1 as u64])).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn product_example() {
        let r = product_weil_check(&[5, 7], 2).unwrap();
        assert!((r.max_all_blocks_nonzero - 35f64.powf(-0.5)).abs() < 1e-9);
        assert!((r.factored_max - r.max_all_blocks_nonzero).abs() < 1e-9);
        assert!(r.pass);
        assert!((r.max_unrestricted - 5f64.powf(-0.5)).abs() < 1e-9);
        assert!(product_factorization_error(&[5, 7, 11], 2, 100, 1).unwrap() < 1e-12);
    }
}
