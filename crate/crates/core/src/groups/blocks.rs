use super::ball::WordBall;
use super::model::GroupModel;
use crate::blocks::{difference_report, TempelmanReport};
use crate::error::{invalid, Error, Result};
use crate::lattice::LatticePoint;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// Blocks `a_k·𝔸^{ℓ_k}` along a sequence of centers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupBlockPlan {
    pub model: GroupModel,
    pub lengths: Vec<u32>,
    pub centers: Vec<LatticePoint>,
    /// Constant in `ℓ_k ≥ C·ρ(a_{k−1}, e)`.
    pub c: f64,
}

impl GroupBlockPlan {
    /// Centers `X^{n_k}` with `n_1 = 0`, `n_{k+1} = n_k + ℓ_k + ℓ_{k+1} + 1`, and
    /// `ℓ_{k+1} = max(ℓ_1, ⌈C·n_k⌉)`. `X` is the second generator.
    pub fn generate(model: &GroupModel, blocks: usize, first: u32, c: f64) -> Result<Self> {
        if blocks == 0 || first == 0 || !(c > 0.0) {
            return Err(invalid("group block plan needs blocks ≥ 1, ℓ₁ ≥ 1, C > 0"));
        }
        let x = model.generators()[1].clone();
        let (mut lengths, mut powers) = (vec![first], vec![0u64]);
        for _ in 1..blocks {
            let n = *powers.last().unwrap();
            let l = first.max((c * n as f64).ceil() as u32);
            powers.push(n + *lengths.last().unwrap() as u64 + l as u64 + 1);
            lengths.push(l);
        }
        let centers = powers.iter().map(|&n| model.pow(&x, n)).collect();
        let plan = Self { model: model.clone(), lengths, centers, c };
        Ok(plan)
    }

    /// `ρ(a_{k+1}, e) > ρ(a_k, e) + ℓ_k` and `ℓ_k ≥ C·ρ(a_{k−1}, e)`, using `ball` for lengths.
    pub fn validate(&self, ball: &WordBall) -> Result<()> {
        let rho = |g: &LatticePoint| {
            ball.length(g)
                .ok_or_else(|| invalid(format!("center {g:?} lies outside the ball of radius {}", ball.radius)))
        };
        for k in 0..self.centers.len() {
            if k + 1 < self.centers.len() && rho(&self.centers[k + 1])? <= rho(&self.centers[k])? + self.lengths[k] {
                return Err(Error::PlanViolation {
                    condition: "spacing".into(),
                    detail: format!("ρ(a_{}) ≤ ρ(a_{}) + ℓ_{}", k + 2, k + 1, k + 1),
                });
            }
            if k >= 1 && (self.lengths[k] as f64) < self.c * rho(&self.centers[k - 1])? as f64 {
                return Err(Error::PlanViolation {
                    condition: "growth".into(),
                    detail: format!("ℓ_{} < C·ρ(a_{})", k + 1, k),
                });
            }
        }
        Ok(())
    }

    /// `S(k, r) = ⋃_{i≤k} a_i𝔸^{ℓ_i} ∪ a_{k+1}𝔸^r` (blocks counted from 1, `k ≥ 0`).
    pub fn set(&self, ball: &WordBall, k: usize, r: u32) -> Result<Vec<LatticePoint>> {
        if k > self.centers.len() || (r > 0 && k >= self.centers.len()) {
            return Err(invalid(format!("S({k},{r}) needs more blocks than the plan has")));
        }
        if r > 0 && r >= self.lengths[k] {
            return Err(invalid(format!("r = {r} must be below ℓ_{}", k + 1)));
        }
        let mut out = BTreeSet::new();
        let mut add = |center: &LatticePoint, radius: u32| -> Result<()> {
            if radius > ball.radius {
                return Err(invalid("block radius exceeds the precomputed ball"));
            }
            out.extend(ball.within(radius).iter().map(|b| self.model.mul(center, b)));
            Ok(())
        };
        for i in 0..k {
            add(&self.centers[i], self.lengths[i])?;
        }
        if r > 0 {
            add(&self.centers[k], r)?;
        }
        Ok(out.into_iter().collect())
    }

    /// Exact `#(S⁻¹S)/#S` and Følner defects of `S(k, r)`.
    pub fn tempelman(&self, ball: &WordBall, k: usize, r: u32) -> Result<TempelmanReport> {
        let s = self.set(ball, k, r)?;
        difference_report(&s, |a, b| self.model.mul(a, b), |a| self.model.inv(a), &self.model.labelled_generators())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocks::BlockPlan;
    use crate::lattice::rat;

    #[test]
    fn single_ball_ratio_is_doubling() {
        for model in [GroupModel::Lattice { d: 2 }, GroupModel::Heisenberg] {
            let ball = WordBall::new(&model, 8).unwrap();
            let plan = GroupBlockPlan::generate(&model, 1, 4, 1.0).unwrap();
            let rep = plan.tempelman(&ball, 1, 0).unwrap();
            assert_eq!(rep.ratio, rat(ball.size(8) as i128, ball.size(4) as i128));
        }
    }

    #[test]
    fn z1_matches_interval_blocks() {
        let model = GroupModel::Lattice { d: 1 };
        let ball = WordBall::new(&model, 200).unwrap();
        let plan = GroupBlockPlan::generate(&model, 3, 2, 1.5).unwrap();
        plan.validate(&ball).unwrap();
        // a·𝔸^ℓ = [a − ℓ, a + ℓ] = [u + 1, u + len]
        let u: Vec<i64> = plan.centers.iter().zip(&plan.lengths).map(|(c, &l)| c.coords()[0] - l as i64 - 1).collect();
        let a: Vec<i64> = plan.lengths.iter().map(|&l| 2 * l as i64 + 1).collect();
        let intervals = BlockPlan::new(u, a).unwrap();
        for k in 1..=3 {
            let set = intervals.complete_set(k);
            let want = rat(set.difference_set().len() as i128, set.len() as i128);
            assert_eq!(plan.tempelman(&ball, k, 0).unwrap().ratio, want);
        }
        // r = 0 is the complete-block sequence
        assert_eq!(plan.set(&ball, 2, 0).unwrap().len() as u128, intervals.complete_set(2).len());
    }

    #[test]
    fn violations_are_named() {
        let model = GroupModel::Lattice { d: 1 };
        let ball = WordBall::new(&model, 50).unwrap();
        let mut plan = GroupBlockPlan::generate(&model, 3, 2, 1.0).unwrap();
        plan.centers[1] = LatticePoint::from([2]);
        match plan.validate(&ball) {
            Err(Error::PlanViolation { condition, .. }) => assert_eq!(condition, "spacing"),
            other => panic!("{other:?}"),
        }
    }
}
