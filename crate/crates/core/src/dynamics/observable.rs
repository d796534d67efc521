use super::action::State;
use crate::error::{invalid, Result};
use crate::lattice::{rat, Rational};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Test functions with known space means.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Observable {
    /// `Σ a·cos(2πk·x) + b·sin(2πk·x)` over `(k, a, b)`.
    Trig { terms: Vec<(Vec<i64>, f64, f64)> },
    /// Indicator of the cell `Π [c_i/g, (c_i+1)/g)` of 𝕋^D, or of the single point `c` of `ℤ_L^D`.
    Cell { grid: u64, cell: Vec<u64> },
    /// Exact values on `ℤ_L^D`, indexed with the last coordinate fastest.
    Table { side: u64, values: Vec<Rational> },
}

impl Observable {
    /// `cos(2πx₁)`.
    pub fn cos_first(dim: usize) -> Self {
        let mut k = vec![0; dim];
        k[0] = 1;
        Self::Trig { terms: vec![(k, 1.0, 0.0)] }
    }

    pub fn constant(c: f64, dim: usize) -> Self {
        Self::Trig { terms: vec![(vec![0; dim], c, 0.0)] }
    }

    pub fn eval(&self, x: &State) -> Result<f64> {
        match (self, x) {
            (Self::Trig { terms }, State::Torus(x)) => Ok(terms
                .iter()
                .map(|(k, a, b)| {
                    let phase: f64 = k.iter().zip(x).map(|(&k, &x)| (k as f64 * x).rem_euclid(1.0)).sum();
                    a * (TAU * phase).cos() + b * (TAU * phase).sin()
                })
                .sum()),
            (Self::Cell { grid, cell }, State::Torus(x)) => {
                Ok(x.iter().zip(cell).all(|(&x, &c)| (x * *grid as f64).floor() as u64 == c) as i32 as f64)
            }
            _ => self.eval_exact(x).map(|v| crate::lattice::Scalar::to_f64(&v)),
        }
    }

    /// Exact value on a finite torus.
    pub fn eval_exact(&self, x: &State) -> Result<Rational> {
        let State::Finite(x) = x else {
            return Err(invalid("exact evaluation needs a finite state"));
        };
        match self {
            Self::Table { side, values } => {
                let idx = x.iter().fold(0usize, |acc, &v| acc * *side as usize + v as usize);
                values.get(idx).copied().ok_or_else(|| invalid("state outside the table"))
            }
            Self::Cell { cell, .. } => Ok(rat(x.iter().zip(cell).all(|(&a, &b)| a as u64 == b) as i128, 1)),
            Self::Trig { terms } if terms.iter().all(|(k, _, b)| k.iter().all(|&c| c == 0) && *b == 0.0) => {
                let c: f64 = terms.iter().map(|t| t.1).sum();
                Rational::approximate_float(c).ok_or_else(|| invalid("constant is not representable"))
            }
            Self::Trig { .. } => Err(invalid("nonconstant trigonometric observables are torus-only")),
        }
    }

    /// Space mean on 𝕋^D.
    pub fn torus_mean(&self, dim: usize) -> f64 {
        match self {
            Self::Trig { terms } => terms.iter().filter(|(k, _, _)| k.iter().all(|&c| c == 0)).map(|t| t.1).sum(),
            Self::Cell { grid, .. } => (*grid as f64).powi(-(dim as i32)),
            Self::Table { .. } => f64::NAN,
        }
    }

    /// Exact mean on `ℤ_L^D`.
    pub fn finite_mean(&self, side: u64, dim: usize) -> Result<Rational> {
        match self {
            Self::Table { values, .. } => {
                let s = values.iter().fold(rat(0, 1), |a, v| a + v);
                Ok(s / values.len() as i128)
            }
            Self::Cell { .. } => Ok(rat(1, (side as i128).pow(dim as u32))),
            Self::Trig { .. } => self.eval_exact(&State::Finite(vec![0; dim])),
        }
    }

    pub fn sup_norm(&self) -> f64 {
        match self {
            Self::Trig { terms } => terms.iter().map(|(_, a, b)| a.abs() + b.abs()).sum(),
            Self::Cell { .. } => 1.0,
            Self::Table { values, .. } => {
                values.iter().map(|v| crate::lattice::Scalar::to_f64(v).abs()).fold(0.0, f64::max)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn means_and_values() {
        let f = Observable::cos_first(2);
        assert!((f.eval(&State::Torus(vec![0.5, 0.2])).unwrap() + 1.0).abs() < 1e-15);
        assert_eq!(f.torus_mean(2), 0.0);
        let c = Observable::Cell { grid: 4, cell: vec![1, 3] };
        assert_eq!(c.eval(&State::Torus(vec![0.3, 0.8])).unwrap(), 1.0);
        assert_eq!(c.torus_mean(2), 1.0 / 16.0);
        let t = Observable::Table { side: 3, values: vec![rat(1, 1), rat(0, 1), rat(1, 2)] };
        assert_eq!(t.finite_mean(3, 1).unwrap(), rat(1, 2));
        assert_eq!(t.eval_exact(&State::Finite(vec![2])).unwrap(), rat(1, 2));
    }
}
