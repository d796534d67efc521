//! The trapezoid cutoff, the `ℓ¹` size of its transform, and the transfer
//! operators `Γ₁: ℓ¹(ℤ_p^m) → ℓ¹(ℤ^m)` and `Γ₂: ℓ¹(ℤ^m) → ℓ¹(ℤ^d)`.

use super::fourier::e;
use super::set::{curve_point, pow_mod};
use crate::error::{budget, invalid, Result};
use crate::lattice::{rat, LatticePoint, Rational, Scalar, SparseMeasure};
use crate::rng::CounterRng;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

fn check_odd(p: u64) -> Result<()> {
    if p < 3 || p.is_multiple_of(2) {
        return Err(invalid(format!("the trapezoid needs odd p ≥ 3, got {p}")));
    }
    Ok(())
}

/// `φ` on `[−p, 2p−1]`: 1 on `[0, p−1]`, 0 up to `(−p−1)/2` and from `3(p−1)/2`, affine between.
pub fn varphi(p: u64, n: i64) -> Rational {
    let p = p as i128;
    let n = n as i128;
    let left = (-p - 1) / 2;
    let right = 3 * (p - 1) / 2;
    if (0..p).contains(&n) {
        rat(1, 1)
    } else if n <= left || n >= right {
        rat(0, 1)
    } else if n < 0 {
        rat(n - left, -left)
    } else {
        rat(right - n, right - (p - 1))
    }
}

/// `Σ_{n ∈ [−p, 2p−1]} φ(n) = (3p − 2)/2`.
pub fn varphi_sum(p: u64) -> Rational {
    rat(3 * p as i128 - 2, 2)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsiReport {
    pub p: u64,
    pub eta: f64,
    /// `Σ_ξ |Σ_j φ(j)e(jη)e(jξ/3p)|`.
    pub l1: f64,
    pub ratio: f64,
    /// The `ξ = 0` term; at most `Σφ ≤ 3p`.
    pub xi0: f64,
    /// `‖Δ²Φ‖₁` with `Φ(j) = φ(j)e(jη)` extended `3p`-periodically.
    pub delta2_l1: f64,
    pub delta2_l1_times_p: f64,
    /// `Σ_{ξ≠0} |e(ξ/3p) − 1|^{−2}`.
    pub inverse_sum: f64,
    pub inverse_sum_over_p2: f64,
    /// Max over `ξ ≠ 0` of the mismatch in `Σ Φ(j)ω^j = (ω−1)^{−2} Σ Δ²Φ(j)ω^{j+2}`.
    pub summation_by_parts_error: f64,
}

pub fn smoothing_psi_l1(p: u64, eta: f64, eta_constant: f64) -> Result<PsiReport> {
    check_odd(p)?;
    if eta.abs() > eta_constant / p as f64 {
        return Err(invalid(format!("|η| must be ≤ {eta_constant}/p")));
    }
    let n = 3 * p as usize;
    let lo = -(p as i64);
    let phi: Vec<Complex64> = (0..n)
        .map(|k| {
            let j = lo + k as i64;
            e(j as f64 * eta) * Scalar::to_f64(&varphi(p, j))
        })
        .collect();
    let root = |t: i64| e(t.rem_euclid(n as i64) as f64 / n as f64);
    let table: Vec<Complex64> = (0..n as i64).map(root).collect();
    let mut l1 = 0.0;
    let mut xi0 = 0.0;
    let delta2: Vec<Complex64> = (0..n).map(|k| phi[(k + 2) % n] - phi[(k + 1) % n] * 2.0 + phi[k]).collect();
    let mut worst_identity = 0.0f64;
    let mut inverse_sum = 0.0;
    for xi in 0..n as i64 {
        let mut s = Complex64::default();
        let mut s2 = Complex64::default();
        for k in 0..n {
            let j = lo + k as i64;
            let w = table[(j * xi).rem_euclid(n as i64) as usize];
            s += phi[k] * w;
            s2 += delta2[k] * table[((j + 2) * xi).rem_euclid(n as i64) as usize];
        }
        l1 += s.norm();
        if xi == 0 {
            xi0 = s.norm();
        } else {
            let omega_minus_one = table[xi as usize] - 1.0;
            let denom = omega_minus_one * omega_minus_one;
            worst_identity = worst_identity.max((s - s2 / denom).norm() / s.norm().max(1.0));
            inverse_sum += 1.0 / denom.norm();
        }
    }
    let delta2_l1: f64 = delta2.iter().map(|v| v.norm()).sum();
    Ok(PsiReport {
        p,
        eta,
        l1,
        ratio: l1 / p as f64,
        xi0,
        delta2_l1,
        delta2_l1_times_p: delta2_l1 * p as f64,
        inverse_sum,
        inverse_sum_over_p2: inverse_sum / (p as f64 * p as f64),
        summation_by_parts_error: worst_identity,
    })
}

/// `μ′ = p^{−1} Σ_j δ_{(j, j², …, j^m)}` on `[0, p−1]^m`.
pub fn curve_measure_exact(p: u64, m: usize) -> SparseMeasure<Rational> {
    let w = rat(1, p as i128);
    SparseMeasure::from_entries(
        m,
        (0..p).map(|j| {
            let x: Vec<i64> = (1..=m).map(|i| pow_mod(j, i as u64, p) as i64).collect();
            (LatticePoint::from(x), w)
        }),
        format!("curve[p={p},m={m}]"),
    )
    .expect("points share the dimension")
}

/// `ν′ = p^{−m}` on all of `[0, p−1]^m`.
pub fn uniform_measure_exact(p: u64, m: usize) -> Result<SparseMeasure<Rational>> {
    budget("arith.uniform", 4_000_000, (p as u128).pow(m as u32))?;
    let w = Rational::one().mul_checked(&rat(1, (p as i128).pow(m as u32)))?;
    let mut items = Vec::new();
    let mut x = vec![0i64; m];
    loop {
        items.push((LatticePoint::new(&x), w));
        let mut i = m;
        loop {
            if i == 0 {
                return SparseMeasure::from_entries(m, items, format!("uniform[p={p},m={m}]"));
            }
            i -= 1;
            x[i] += 1;
            if x[i] < p as i64 {
                break;
            }
            x[i] = 0;
        }
    }
}

/// `Γ₁f(j) = 1_{[−p,2p−1]^m}(j)·φ(τ_{3p}j)·f(τ_p j)`. Each support point of `f` has `3^m` lifts.
pub fn gamma1(p: u64, f: &SparseMeasure<Rational>) -> Result<SparseMeasure<Rational>> {
    check_odd(p)?;
    let m = f.dim();
    budget("arith.gamma1", 50_000_000, f.len() as u128 * 3u128.pow(m as u32))?;
    let pi = p as i64;
    let mut items = Vec::new();
    for (s, v) in f.iter() {
        if s.coords().iter().any(|&c| c < 0 || c >= pi) {
            return Err(invalid("Γ₁ expects representatives in [0, p−1]^m"));
        }
        for lift in 0..3usize.pow(m as u32) {
            let mut t = lift;
            let mut j = Vec::with_capacity(m);
            let mut w = *v;
            for &c in s.coords() {
                let jc = c + pi * ((t % 3) as i64 - 1);
                t /= 3;
                w = w.mul_checked(&varphi(p, jc))?;
                j.push(jc);
            }
            if !w.is_zero() {
                items.push((LatticePoint::from(j), w));
            }
        }
    }
    SparseMeasure::from_entries(m, items, format!("gamma1[p={p}]({})", f.provenance()))
}

/// `F(j) = (Σ_{i≤q} p^{i−1} j_i, Σ_{i≤q} p^{i−1} j_{q+i}, …)`.
pub fn freiman(p: u64, q: usize, j: &[i64]) -> LatticePoint {
    let d = j.len() / q;
    let pi = p as i64;
    LatticePoint::from(
        (0..d).map(|c| j[c * q..(c + 1) * q].iter().rev().fold(0i64, |acc, &v| acc * pi + v)).collect::<Vec<_>>(),
    )
}

/// `Γ₂g(n) = Σ_{F(j) = n} g(j)`.
pub fn gamma2(p: u64, q: usize, g: &SparseMeasure<Rational>) -> Result<SparseMeasure<Rational>> {
    if !g.dim().is_multiple_of(q) {
        return Err(invalid("m must be a multiple of q"));
    }
    SparseMeasure::from_entries(
        g.dim() / q,
        g.iter().map(|(j, v)| (freiman(p, q, j.coords()), *v)),
        format!("gamma2[p={p},q={q}]({})", g.provenance()),
    )
}

/// `F` maps `[0, p−1]^{qd}` onto `[0, p^q − 1]^d` injectively.
pub fn freiman_bijective(p: u64, q: usize, d: usize) -> Result<bool> {
    let m = q * d;
    budget("arith.freiman", 20_000_000, (p as u128).pow(m as u32))?;
    let side = (p as i64).pow(q as u32);
    let mut seen = BTreeSet::new();
    let mut j = vec![0i64; m];
    loop {
        let n = freiman(p, q, &j);
        if n.coords().iter().any(|&c| c < 0 || c >= side) || !seen.insert(n) {
            return Ok(false);
        }
        let mut i = m;
        loop {
            if i == 0 {
                return Ok(seen.len() as u128 == (side as u128).pow(d as u32));
            }
            i -= 1;
            j[i] += 1;
            if j[i] < p as i64 {
                break;
            }
            j[i] = 0;
        }
    }
}

/// One-dimensional fiber profile `g(n) = Σ_{Σ p^{i−1} j_i = n} ∏φ(j_i)`, `j ∈ [−p, 2p−1]^q`.
fn fiber_profile(p: u64, q: usize) -> Result<SparseMeasure<Rational>> {
    let mut g = SparseMeasure::delta(LatticePoint::from([0]), Rational::one(), "fiber");
    for i in 0..q {
        let w = (p as i64).pow(i as u32);
        let layer = SparseMeasure::from_entries(
            1,
            (-(p as i64)..2 * p as i64).map(|j| (LatticePoint::from([j * w]), varphi(p, j))),
            "phi",
        )?;
        g = g.convolve(&layer)?;
    }
    Ok(g)
}

/// `‖ν‴‖₁` for `ν‴ = Γ₂Γ₁ν′`. Since `ν′` is uniform, `ν‴` is `p^{−m}` times a
/// product of `d` fiber profiles, so the norm factors.
pub fn nu_triple_l1(p: u64, q: usize, d: usize) -> Result<Rational> {
    check_odd(p)?;
    let g = fiber_profile(p, q)?;
    let mass = g.iter().try_fold(Rational::zero(), |acc, (_, v)| acc.add_checked(&v.abs()))?;
    let mut total = rat(1, 1);
    for _ in 0..d {
        total = total.mul_checked(&mass)?;
    }
    for _ in 0..q * d {
        total = total.mul_checked(&rat(1, p as i128))?;
    }
    Ok(total)
}

/// The same norm by materializing `Γ₂Γ₁ν′` (small `p^m` only).
pub fn nu_triple_l1_materialized(p: u64, q: usize, d: usize) -> Result<Rational> {
    let nu = gamma2(p, q, &gamma1(p, &uniform_measure_exact(p, q * d)?)?)?;
    let total = nu.iter().try_fold(Rational::zero(), |acc, (_, v)| acc.add_checked(&v.abs()));
    total
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransferReport {
    pub p: u64,
    pub q: usize,
    pub d: usize,
    pub m: usize,
    pub freiman_bijective: Option<bool>,
    pub mu_support: usize,
    /// `3^m·p`.
    pub mu_support_bound: u128,
    /// Largest `|n|_∞` on the support of `μ‴`.
    pub support_radius: i64,
    /// Support inside `[−(p−1)/2·S, (3(p−1)/2 − 1)·S]^d`, `S = 1 + p + … + p^{q−1}`.
    pub within_box: bool,
    pub majorization: bool,
    pub nu_l1: f64,
    pub nu_l1_exact: String,
    pub nu_l1_bound: f64,
    pub fourier_identity_error: f64,
}

/// Sup over random `θ ∈ 𝕋^d` of `|Γ̂₂Γ₁f(θ) − Γ̂₁f(θ₁, θ₁p, …, θ₁p^{q−1}, θ₂, …)|`.
pub fn fourier_identity_error(
    p: u64,
    q: usize,
    g1: &SparseMeasure<Rational>,
    g2: &SparseMeasure<Rational>,
    samples: usize,
    seed: u64,
) -> f64 {
    let d = g2.dim();
    let mut rng = CounterRng::new(seed, 0x7A5);
    let g1f: Vec<(Vec<i64>, f64)> = g1.iter().map(|(j, v)| (j.coords().to_vec(), Scalar::to_f64(v))).collect();
    let g2f: Vec<(Vec<i64>, f64)> = g2.iter().map(|(n, v)| (n.coords().to_vec(), Scalar::to_f64(v))).collect();
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let theta: Vec<f64> = (0..d).map(|_| rng.next_f64()).collect();
        let lifted: Vec<f64> =
            theta.iter().flat_map(|&t| (0..q).map(move |i| (t * (p as f64).powi(i as i32)).rem_euclid(1.0))).collect();
        let lhs: Complex64 =
            g2f.iter().map(|(n, v)| e(n.iter().zip(&theta).map(|(&a, &b)| a as f64 * b).sum::<f64>()) * *v).sum();
        let rhs: Complex64 = g1f
            .iter()
            .map(|(j, v)| e(j.iter().zip(&lifted).map(|(&a, &b)| (a as f64 * b).rem_euclid(1.0)).sum::<f64>()) * *v)
            .sum();
        worst = worst.max((lhs - rhs).norm());
    }
    worst
}

/// Runs every transfer check for one `(p, q, d)`.
pub fn gamma_transfer(p: u64, q: usize, d: usize, samples: usize, seed: u64) -> Result<TransferReport> {
    check_odd(p)?;
    let m = q * d;
    if p <= m as u64 {
        return Err(invalid("p must exceed m"));
    }
    let mu1 = gamma1(p, &curve_measure_exact(p, m))?;
    let mu3 = gamma2(p, q, &mu1)?;
    let floor = (0..m).try_fold(rat(1, 1), |acc, _| acc.mul_checked(&rat(1, p as i128)))?;
    let nonnegative = mu3.iter().all(|(_, v)| *v >= Rational::zero());
    let covers = (0..p).all(|j| mu3.get(&LatticePoint::from(curve_point(p, q, d, j))) >= floor);
    let geometric: i64 = (0..q as u32).map(|i| (p as i64).pow(i)).sum();
    let (lo, hi) = (-((p as i64 - 1) / 2) * geometric, (3 * (p as i64 - 1) / 2 - 1) * geometric);
    let within_box = mu3.support().all(|n| n.coords().iter().all(|&c| (lo..=hi).contains(&c)));
    let support_radius =
        mu3.support().flat_map(|n| n.coords().iter().map(|c| c.abs()).collect::<Vec<_>>()).max().unwrap_or(0);
    let nu = nu_triple_l1(p, q, d)?;
    let freiman_ok = if (p as u128).pow(m as u32) <= 20_000_000 { Some(freiman_bijective(p, q, d)?) } else { None };
    Ok(TransferReport {
        p,
        q,
        d,
        m,
        freiman_bijective: freiman_ok,
        mu_support: mu1.len(),
        mu_support_bound: 3u128.pow(m as u32) * p as u128,
        support_radius,
        within_box,
        majorization: nonnegative && covers,
        nu_l1: Scalar::to_f64(&nu),
        nu_l1_exact: format!("{}/{}", nu.numer(), nu.denom()),
        nu_l1_bound: 3f64.powi(m as i32),
        fourier_identity_error: fourier_identity_error(p, q, &mu1, &mu3, samples, seed),
    })
}

/// A random sparse rational function on `[0, p−1]^m` for identity checks.
pub fn random_finite_fn(p: u64, m: usize, points: usize, seed: u64) -> SparseMeasure<Rational> {
    let mut rng = CounterRng::new(seed, 0xF1F);
    SparseMeasure::from_entries(
        m,
        (0..points).map(|_| {
            let x: Vec<i64> = (0..m).map(|_| rng.below(p as usize) as i64).collect();
            (LatticePoint::from(x), rat(rng.range_i64(-9, 9) as i128, rng.range_i64(1, 9) as i128))
        }),
        "random-finite-fn",
    )
    .expect("points share the dimension")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trapezoid_shape_and_mass() {
        for p in [3u64, 5, 11, 31] {
            let s = (-(p as i64)..2 * p as i64).fold(rat(0, 1), |a, n| a + varphi(p, n));
            assert_eq!(s, varphi_sum(p));
            assert_eq!(varphi(p, (-(p as i64) - 1) / 2), rat(0, 1));
            assert_eq!(varphi(p, 3 * (p as i64 - 1) / 2), rat(0, 1));
            assert_eq!(varphi(p, 0), rat(1, 1));
            assert_eq!(varphi(p, p as i64 - 1), rat(1, 1));
        }
        assert!(smoothing_psi_l1(10, 0.0, 1.0).is_err());
    }

    #[test]
    fn psi_pieces() {
        let r = smoothing_psi_l1(11, 1.0 / 22.0, 1.0).unwrap();
        assert!(r.xi0 <= 33.0);
        assert!(r.summation_by_parts_error < 1e-9);
        let r0 = smoothing_psi_l1(11, 0.0, 1.0).unwrap();
        assert!((r0.xi0 - 31.0 / 2.0).abs() < 1e-12);
    }

    #[test]
    fn freiman_examples() {
        assert_eq!(freiman(3, 2, &[2, 1]), LatticePoint::from([5]));
        assert!(freiman_bijective(3, 2, 1).unwrap());
        assert!(freiman_bijective(5, 1, 2).unwrap());
        // q = 1 is the identity
        let g = curve_measure_exact(5, 2);
        assert_eq!(gamma2(5, 1, &g).unwrap().iter().collect::<Vec<_>>(), g.iter().collect::<Vec<_>>());
    }

    #[test]
    fn nu_norm_structured_equals_materialized() {
        for (p, q, d) in [(3, 1, 1), (5, 1, 2), (5, 2, 1), (7, 2, 1), (3, 2, 2)] {
            let a = nu_triple_l1(p, q, d).unwrap();
            assert_eq!(a, nu_triple_l1_materialized(p, q, d).unwrap());
            let m = (q * d) as i32;
            let closed = (0..m).fold(rat(1, 1), |acc, _| acc * varphi_sum(p) / (p as i128));
            assert_eq!(a, closed);
        }
    }

    #[test]
    fn transfer_report_small() {
        let r = gamma_transfer(11, 2, 1, 20, 3).unwrap();
        assert_eq!(r.freiman_bijective, Some(true));
        assert!(r.majorization && r.within_box);
        assert!(r.fourier_identity_error < 1e-9);
        assert!(r.nu_l1 <= r.nu_l1_bound);
        assert!(r.mu_support as u128 <= r.mu_support_bound);
    }

    #[test]
    fn fourier_identity_on_random_functions() {
        let f = random_finite_fn(7, 4, 30, 9);
        let g1 = gamma1(7, &f).unwrap();
        let g2 = gamma2(7, 2, &g1).unwrap();
        assert!(fourier_identity_error(7, 2, &g1, &g2, 50, 1) < 1e-9);
    }
}
