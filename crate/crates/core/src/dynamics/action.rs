use crate::error::{budget, invalid, Result};
use crate::rng::CounterRng;
use serde::{Deserialize, Serialize};

/// A measure-preserving ℤ^d action given by `d` commuting generator maps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ActionModel {
    /// `T(n)x = x + Σ n_i α_i (mod 1)` on `𝕋^D`.
    TorusRotation { alphas: Vec<Vec<f64>> },
    /// `T(n)x = x + Σ n_i s_i (mod L)` on `ℤ_L^D`.
    FiniteTorusShift { side: u64, shifts: Vec<Vec<i64>> },
}

#[derive(Clone, Debug, PartialEq)]
pub enum State {
    Torus(Vec<f64>),
    Finite(Vec<i64>),
}

impl ActionModel {
    /// `α = ((√2−1, 0), (0, √3−1))`.
    pub fn quadratic_rotation() -> Self {
        Self::TorusRotation { alphas: vec![vec![2f64.sqrt() - 1.0, 0.0], vec![0.0, 3f64.sqrt() - 1.0]] }
    }

    pub fn validate(&self) -> Result<()> {
        let rows: Vec<usize> = match self {
            Self::TorusRotation { alphas } => alphas.iter().map(|a| a.len()).collect(),
            Self::FiniteTorusShift { side, shifts } => {
                if *side == 0 {
                    return Err(invalid("finite torus needs L ≥ 1"));
                }
                shifts.iter().map(|s| s.len()).collect()
            }
        };
        if rows.is_empty() || rows[0] == 0 || rows.iter().any(|&r| r != rows[0]) {
            return Err(invalid("every generator needs a vector of the same nonzero dimension"));
        }
        Ok(())
    }

    /// Number of generators `d`.
    pub fn rank(&self) -> usize {
        match self {
            Self::TorusRotation { alphas } => alphas.len(),
            Self::FiniteTorusShift { shifts, .. } => shifts.len(),
        }
    }

    /// Dimension `D` of the space.
    pub fn space_dim(&self) -> usize {
        match self {
            Self::TorusRotation { alphas } => alphas[0].len(),
            Self::FiniteTorusShift { shifts, .. } => shifts[0].len(),
        }
    }

    /// `T(n)x`, computed from `x` directly (no accumulated drift).
    pub fn act(&self, n: &[i64], x: &State) -> Result<State> {
        if n.len() != self.rank() {
            return Err(invalid(format!("action has {} generators, got a {}-vector", self.rank(), n.len())));
        }
        match (self, x) {
            (Self::TorusRotation { alphas }, State::Torus(x)) if x.len() == alphas[0].len() => Ok(State::Torus(
                (0..x.len())
                    .map(|c| {
                        let shift: f64 = n.iter().zip(alphas).map(|(&k, a)| (k as f64 * a[c]).rem_euclid(1.0)).sum();
                        (x[c] + shift).rem_euclid(1.0)
                    })
                    .collect(),
            )),
            (Self::FiniteTorusShift { side, shifts }, State::Finite(x)) if x.len() == shifts[0].len() => {
                let l = *side as i128;
                Ok(State::Finite(
                    (0..x.len())
                        .map(|c| {
                            let s: i128 = n.iter().zip(shifts).map(|(&k, v)| k as i128 * v[c] as i128).sum();
                            (x[c] as i128 + s).rem_euclid(l) as i64
                        })
                        .collect(),
                ))
            }
            _ => Err(invalid("state does not match the action's space")),
        }
    }

    /// Generator maps commute on random states: to 1e-12 on the torus, exactly on finite tori.
    pub fn check_commute(&self, samples: usize, seed: u64) -> Result<bool> {
        let mut rng = CounterRng::new(seed, 0xC0);
        let d = self.rank();
        for _ in 0..samples {
            let x = match self {
                Self::TorusRotation { .. } => State::Torus((0..self.space_dim()).map(|_| rng.next_f64()).collect()),
                Self::FiniteTorusShift { side, .. } => {
                    State::Finite((0..self.space_dim()).map(|_| rng.below(*side as usize) as i64).collect())
                }
            };
            for i in 0..d {
                for j in 0..d {
                    let (mut ei, mut ej) = (vec![0; d], vec![0; d]);
                    ei[i] = 1;
                    ej[j] = 1;
                    let a = self.act(&ei, &self.act(&ej, &x)?)?;
                    let b = self.act(&ej, &self.act(&ei, &x)?)?;
                    let same = match (a, b) {
                        (State::Torus(a), State::Torus(b)) => a.iter().zip(&b).all(|(u, v)| {
                            let diff = (u - v).rem_euclid(1.0);
                            diff.min(1.0 - diff) <= 1e-12
                        }),
                        (a, b) => a == b,
                    };
                    if !same {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    /// Every generator map is a bijection of `ℤ_L^D` (finite models only).
    pub fn check_permutations(&self) -> Result<bool> {
        let Self::FiniteTorusShift { side, .. } = self else {
            return Err(invalid("permutation check needs a finite model"));
        };
        let dim = self.space_dim();
        let cells = (*side as u128).pow(dim as u32);
        budget("dynamics.permutation", 1 << 24, cells)?;
        let l = *side as i64;
        for g in 0..self.rank() {
            let mut e = vec![0; self.rank()];
            e[g] = 1;
            let mut seen = vec![false; cells as usize];
            for code in 0..cells as i64 {
                let mut c = code;
                let x: Vec<i64> = (0..dim)
                    .map(|_| {
                        let v = c % l;
                        c /= l;
                        v
                    })
                    .collect();
                let State::Finite(y) = self.act(&e, &State::Finite(x))? else { unreachable!() };
                let idx = y.iter().rev().fold(0i64, |acc, &v| acc * l + v) as usize;
                if std::mem::replace(&mut seen[idx], true) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn commute_and_permute() {
        let rot = ActionModel::quadratic_rotation();
        rot.validate().unwrap();
        assert!(rot.check_commute(50, 1).unwrap());
        let fin = ActionModel::FiniteTorusShift { side: 12, shifts: vec![vec![1, 3], vec![5, 0]] };
        assert!(fin.check_commute(50, 1).unwrap());
        assert!(fin.check_permutations().unwrap());
        assert!(rot.check_permutations().is_err());
        assert!(rot.act(&[1], &State::Torus(vec![0.0, 0.0])).is_err());
    }

    #[test]
    fn finite_act_wraps() {
        let fin = ActionModel::FiniteTorusShift { side: 7, shifts: vec![vec![3]] };
        assert_eq!(fin.act(&[-5], &State::Finite(vec![2])).unwrap(), State::Finite(vec![1]));
    }
}
