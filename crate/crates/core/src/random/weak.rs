//! Empirical weak-(1,1) constants of `sup_j |f∗μ_j|`.

use super::speckled::sample_shell;
use crate::error::{invalid, Error, Result};
use crate::lattice::{LatticePoint, SparseMeasure};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakRow {
    pub lambda: f64,
    pub count: u64,
    /// `λ·#{M f > λ} / ‖f‖₁`.
    pub constant: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakSweep {
    pub rows: Vec<WeakRow>,
    pub constant: f64,
    /// Points where some `f∗μ_j` is nonzero.
    pub window: usize,
    pub l1: f64,
}

/// `λ = 2^{−k}` for `k = kmax, …, 0`.
pub fn dyadic_lambdas(kmax: u32) -> Vec<f64> {
    (0..=kmax).rev().map(|k| (-(k as f64)).exp2()).collect()
}

/// `M f(x) = max_j |f∗μ_j(x)|` over the union of the convolution supports,
/// then the level-set counts on `lambdas`. `max_pairs` bounds the total work of
/// all convolutions together and is the window guard.
pub fn weak11_sweep(
    family: &[SparseMeasure<f64>],
    f: &SparseMeasure<f64>,
    lambdas: &[f64],
    max_pairs: u128,
) -> Result<WeakSweep> {
    let l1 = f.iter().map(|(_, v)| v.abs()).sum::<f64>();
    if l1 == 0.0 {
        return Err(invalid("weak sweep needs a nonzero test function"));
    }
    let requested: u128 = family.iter().map(|m| m.len() as u128 * f.len() as u128).sum();
    if requested > max_pairs {
        return Err(Error::Budget { module: "random.weak11_sweep", limit: max_pairs, requested });
    }
    let mut maximal: HashMap<LatticePoint, f64> = HashMap::new();
    for mu in family {
        let conv = f.convolve_with_budget(mu, max_pairs)?;
        for (x, v) in conv.iter() {
            let e = maximal.entry(x.clone()).or_insert(0.0);
            *e = e.max(v.abs());
        }
    }
    let mut values: Vec<f64> = maximal.into_values().collect();
    values.sort_by(|a, b| a.total_cmp(b));
    let rows: Vec<WeakRow> = lambdas
        .iter()
        .map(|&lambda| {
            let below = values.partition_point(|&v| v <= lambda);
            let count = (values.len() - below) as u64;
            WeakRow { lambda, count, constant: lambda * count as f64 / l1 }
        })
        .collect();
    Ok(WeakSweep { constant: rows.iter().map(|r| r.constant).fold(0.0, f64::max), window: values.len(), rows, l1 })
}

/// `μ_j` for `j ∈ [jmin, jmax]` at any `γ ≥ 0`. Values `γ ≥ d` give the control family
/// whose heights `2^{(γ−d)j}` grow.
pub fn speckled_family(d: usize, gamma: f64, seed: u64, jmin: u32, jmax: u32) -> Result<Vec<SparseMeasure<f64>>> {
    if gamma < 0.0 || d == 0 || jmin > jmax {
        return Err(invalid("speckled family needs γ ≥ 0, d ≥ 1 and jmin ≤ jmax"));
    }
    (jmin..=jmax).map(|j| Ok(sample_shell(d, gamma, seed, j)?.mu())).collect()
}

pub fn delta_test(d: usize) -> SparseMeasure<f64> {
    SparseMeasure::delta(LatticePoint::origin(d), 1.0, "test.delta")
}

/// Indicator of `[0, 2^level)^d`.
pub fn cube_test(d: usize, level: u32) -> Result<SparseMeasure<f64>> {
    let side = 1i64 << level;
    let mut items = Vec::new();
    let mut x = vec![0i64; d];
    'outer: loop {
        items.push((LatticePoint::new(&x), 1.0));
        for i in (0..d).rev() {
            if x[i] + 1 < side {
                x[i] += 1;
                continue 'outer;
            }
            x[i] = 0;
        }
        break;
    }
    SparseMeasure::from_entries(d, items, format!("test.cube[{level}]"))
}

/// Unit deltas at the reflected support of `mu`, so that every `f∗μ` peaks at the origin.
pub fn adversarial_test(mu: &SparseMeasure<f64>) -> SparseMeasure<f64> {
    SparseMeasure::from_entries(mu.dim(), mu.support().map(|p| (p.neg(), 1.0)), "test.adversarial")
        .expect("support points share the dimension")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_sweep_counts_the_family_directly() {
        let fam = speckled_family(2, 0.8, 3, 1, 4).unwrap();
        let lambdas = dyadic_lambdas(10);
        let sweep = weak11_sweep(&fam, &delta_test(2), &lambdas, 1 << 30).unwrap();
        for row in &sweep.rows {
            let brute = fam.iter().flat_map(|m| m.iter()).filter(|(_, v)| **v > row.lambda).count() as u64;
            assert_eq!(row.count, brute);
        }
    }

    #[test]
    fn cube_matches_brute_force_maximal_function() {
        let fam = speckled_family(1, 0.4, 8, 1, 5).unwrap();
        let f = cube_test(1, 3).unwrap();
        let lambdas = dyadic_lambdas(8);
        let sweep = weak11_sweep(&fam, &f, &lambdas, 1 << 30).unwrap();
        let mut brute = vec![0.0f64; 200];
        for mu in &fam {
            for x in -100i64..100 {
                let v: f64 = mu.iter().map(|(y, m)| m * f.get(&[x - y.coords()[0]].into())).sum();
                brute[(x + 100) as usize] = brute[(x + 100) as usize].max(v.abs());
            }
        }
        for row in &sweep.rows {
            let c = brute.iter().filter(|&&v| v > row.lambda).count() as u64;
            assert_eq!(row.count, c);
        }
    }

    #[test]
    fn larger_grids_never_lower_the_constant() {
        let fam = speckled_family(2, 0.8, 1, 2, 5).unwrap();
        let f = cube_test(2, 2).unwrap();
        let small = weak11_sweep(&fam, &f, &dyadic_lambdas(4), 1 << 30).unwrap();
        let big = weak11_sweep(&fam, &f, &dyadic_lambdas(10), 1 << 30).unwrap();
        assert!(big.constant >= small.constant);
    }

    #[test]
    fn guard_refuses_huge_windows() {
        let fam = speckled_family(2, 0.8, 1, 2, 5).unwrap();
        let f = cube_test(2, 4).unwrap();
        assert!(weak11_sweep(&fam, &f, &[1.0], 100).is_err());
    }
}
