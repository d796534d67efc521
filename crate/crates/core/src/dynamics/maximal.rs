use crate::error::{budget, invalid, Error, Result};
use crate::lattice::{LatticePoint, SparseMeasure};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaximalWindow {
    /// Sup-norm radius of the window `[−W, W]^d`.
    pub window: i64,
    /// `sup_j |φ∗μ_j|` at every nonzero point of the window.
    #[serde(skip)]
    pub values: HashMap<LatticePoint, f64>,
    pub max: f64,
    /// `(λ, #{x : sup_j |φ∗μ_j(x)| > λ})`.
    pub distribution: Vec<(f64, usize)>,
}

fn radius<S: crate::lattice::Scalar>(m: &SparseMeasure<S>) -> i64 {
    m.support().map(|p| p.norm() as i64).max().unwrap_or(0)
}

/// Pointwise `sup_j |φ∗μ_j|` on a window that must contain every `supp φ + supp μ_j`.
pub fn maximal_function_window(
    phi: &SparseMeasure<f64>,
    family: &[SparseMeasure<f64>],
    window: i64,
    lambdas: &[f64],
) -> Result<MaximalWindow> {
    if family.is_empty() {
        return Err(invalid("empty measure family"));
    }
    let reach = radius(phi) + family.iter().map(radius).max().unwrap_or(0);
    if reach > window {
        return Err(Error::Refused(format!(
            "window radius {window} is smaller than supp φ + supp μ_j (radius {reach}); truncation would be silent"
        )));
    }
    budget("dynamics.maximal", 1 << 26, ((2 * window + 1) as u128).pow(phi.dim() as u32))?;
    let mut values: HashMap<LatticePoint, f64> = HashMap::new();
    for mu in family {
        for (p, v) in phi.convolve(mu)?.iter() {
            let e = values.entry(p.clone()).or_insert(0.0);
            *e = e.max(v.abs());
        }
    }
    let max = values.values().copied().fold(0.0, f64::max);
    let distribution = lambdas.iter().map(|&l| (l, values.values().filter(|&&v| v > l).count())).collect();
    Ok(MaximalWindow { window, values, max, distribution })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{GroupModel, WordBall};

    #[test]
    fn delta_against_balls() {
        let ball = WordBall::new(&GroupModel::Lattice { d: 2 }, 6).unwrap();
        let family: Vec<SparseMeasure<f64>> = (0..=6u32)
            .map(|r| {
                let w = 1.0 / ball.size(r) as f64;
                SparseMeasure::from_entries(2, ball.within(r).iter().map(|g| (g.clone(), w)), "ball").unwrap()
            })
            .collect();
        let phi = SparseMeasure::delta(LatticePoint::origin(2), 1.0, "delta");
        let lambdas = [0.001, 0.01, 0.1, 0.5];
        let m = maximal_function_window(&phi, &family, 6, &lambdas).unwrap();
        for (x, v) in &m.values {
            // the smallest ball reaching x has the largest weight
            assert_eq!(*v, 1.0 / ball.size(x.l1_norm() as u32) as f64);
        }
        assert!(m.distribution.windows(2).all(|w| w[0].1 >= w[1].1));
        assert!(maximal_function_window(&phi, &family, 5, &lambdas).is_err());
    }
}
