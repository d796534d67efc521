use super::intervals::IntervalSet;
use crate::error::{invalid, Error, Result};
use crate::lattice::{rat, Rational};
use serde::{Deserialize, Serialize};

/// One axis of a block plan: block `k` (1-based) is `[u_k + 1, u_k + a_k]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockPlan {
    pub u: Vec<i64>,
    pub a: Vec<i64>,
    /// Constant in `a_k ≥ C·u_{k−1}`.
    pub regularity_c: f64,
    /// The last `Σ_{i<k} a_i / a_k` must fall below this.
    pub growth_threshold: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlanValidation {
    pub wellspaced: bool,
    pub growingblocks: bool,
    pub regularity: bool,
    /// `Σ_{i<k} a_i / a_k` for `k = 2..K`.
    pub growth_ratios: Vec<f64>,
    pub violations: Vec<String>,
}

impl PlanValidation {
    pub fn all(&self) -> bool {
        self.wellspaced && self.growingblocks && self.regularity
    }
}

impl BlockPlan {
    pub fn new(u: Vec<i64>, a: Vec<i64>) -> Result<Self> {
        if u.len() != a.len() || u.is_empty() {
            return Err(invalid("plan needs equally many offsets and lengths"));
        }
        if a.iter().any(|&x| x < 1) {
            return Err(invalid("block lengths must be positive"));
        }
        Ok(Self { u, a, regularity_c: 1.0, growth_threshold: 0.1 })
    }

    /// Generator used throughout: gap `⌈a_{k−1}/k⌉` after each block and
    /// `a_k = max(⌈ρ·k(k−1)·a_{k−1}⌉, ⌈C·u_{k−1}⌉)`, starting from `u_1 = a_1 = 1`.
    /// Shrinking relative gaps make the difference-set ratio peak early.
    pub fn generate(blocks: usize, rho: f64, regularity_c: f64) -> Result<Self> {
        if blocks == 0 || !(rho > 0.0) || !(regularity_c > 0.0) {
            return Err(invalid("generator needs blocks ≥ 1, ρ > 0, C > 0"));
        }
        let (mut u, mut a) = (vec![1i64], vec![1i64]);
        for k in 2..=blocks as i64 {
            let (pu, pa) = (u[u.len() - 1], a[a.len() - 1]);
            let gap = (pa + k - 1) / k;
            let next_u =
                pu.checked_add(pa).and_then(|x| x.checked_add(gap)).ok_or(Error::Overflow { context: "plan" })?;
            let grow = (rho * (k * (k - 1)) as f64 * pa as f64).ceil();
            let reg = (regularity_c * pu as f64).ceil();
            let next_a = grow.max(reg);
            if next_a > 4e18 {
                return Err(Error::Overflow { context: "plan" });
            }
            u.push(next_u);
            a.push(next_a as i64);
        }
        let mut p = Self::new(u, a)?;
        p.regularity_c = regularity_c;
        Ok(p)
    }

    pub fn blocks(&self) -> usize {
        self.a.len()
    }

    /// The `k`-th block as an interval, `k` 1-based.
    pub fn block(&self, k: usize) -> (i64, i64) {
        (self.u[k - 1] + 1, self.u[k - 1] + self.a[k - 1])
    }

    pub fn validate(&self) -> PlanValidation {
        let mut violations = Vec::new();
        let mut wellspaced = true;
        for k in 1..self.blocks() {
            if self.u[k] < self.u[k - 1] + self.a[k - 1] {
                wellspaced = false;
                violations.push(format!("wellspaced fails at k={}", k + 1));
            }
        }
        let mut regularity = true;
        for k in 1..self.blocks() {
            if (self.a[k] as f64) < self.regularity_c * self.u[k - 1] as f64 {
                regularity = false;
                violations.push(format!("regularity fails at k={}", k + 1));
            }
        }
        let mut prefix = 0i128;
        let mut growth_ratios = Vec::new();
        for k in 0..self.blocks() {
            if k > 0 {
                growth_ratios.push(prefix as f64 / self.a[k] as f64);
            }
            prefix += self.a[k] as i128;
        }
        let monotone = growth_ratios.windows(2).all(|w| w[1] < w[0]);
        let small = growth_ratios.last().is_some_and(|&r| r < self.growth_threshold);
        if !monotone {
            violations.push("growingblocks: ratios not strictly decreasing".into());
        }
        if !small {
            violations.push(format!("growingblocks: final ratio not below {}", self.growth_threshold));
        }
        PlanValidation { wellspaced, growingblocks: monotone && small, regularity, growth_ratios, violations }
    }

    /// The union of the first `k` complete blocks.
    pub fn complete_set(&self, k: usize) -> IntervalSet {
        IntervalSet::from_intervals((1..=k).map(|i| self.block(i)).collect())
    }

    /// `A(k, r) = A(k−1) ∪ [u_k + 1, u_k + r]`. Needs only the spacing condition;
    /// the growth conditions are reported by [`BlockPlan::validate`].
    pub fn intermediate_set(&self, k: usize, r: i64) -> Result<IntervalSet> {
        if k == 0 || k > self.blocks() {
            return Err(invalid(format!("plan has {} blocks, asked for {k}", self.blocks())));
        }
        if r < 1 || r > self.a[k - 1] {
            return Err(invalid(format!("r={r} outside [1, a_{k}={}]", self.a[k - 1])));
        }
        if !self.validate().wellspaced {
            return Err(Error::PlanViolation { condition: "wellspaced".into(), detail: "blocks overlap".into() });
        }
        let mut v: Vec<(i64, i64)> = (1..k).map(|i| self.block(i)).collect();
        v.push((self.u[k - 1] + 1, self.u[k - 1] + r));
        Ok(IntervalSet::from_intervals(v))
    }
}

/// One grid point of the Tempelman sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub k: usize,
    pub r: i64,
    pub size: u128,
    pub diff_size: u128,
    pub ratio: f64,
    pub folner_defect: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TempelmanSweep {
    pub rows: Vec<SweepRow>,
    /// `max_r ratio(k, r)` for each `k`.
    pub max_by_k: Vec<f64>,
    pub running_max: Vec<f64>,
    /// Exact value of the overall maximum.
    pub sup_ratio: Rational,
}

/// Ratio `#(A(k,r) − A(k,r)) / #A(k,r)` maximised over `r` for every `k`.
///
/// `#(A−A)` is piecewise linear in `r` with breaks only where a moving endpoint
/// of some pairwise difference interval meets another endpoint, so the ratio
/// (linear over linear) peaks at such breaks or at `r = 1, a_k`. Those
/// candidates, padded by ±2, are evaluated exactly; `exhaustive` evaluates
/// every `r` instead.
pub fn tempelman_sweep(plan: &BlockPlan, exhaustive: bool) -> Result<TempelmanSweep> {
    let mut rows = Vec::new();
    let mut max_by_k = Vec::new();
    let mut sup = rat(0, 1);
    for k in 1..=plan.blocks() {
        let ak = plan.a[k - 1];
        let rs: Vec<i64> = if exhaustive { (1..=ak).collect() } else { candidate_radii(plan, k) };
        let mut best = 0f64;
        for r in rs {
            let set = plan.intermediate_set(k, r)?;
            let size = set.len();
            let diff = set.difference_set().len();
            let ratio = rat(diff as i128, size as i128);
            if ratio > sup {
                sup = ratio;
            }
            let shifted = set.shift(1);
            let defect = 2.0 * (size - set.intersection_len(&shifted)) as f64 / size as f64;
            let rf = diff as f64 / size as f64;
            best = best.max(rf);
            rows.push(SweepRow { k, r, size, diff_size: diff, ratio: rf, folner_defect: defect });
        }
        max_by_k.push(best);
    }
    let running_max = max_by_k
        .iter()
        .scan(0f64, |m, &x| {
            *m = m.max(x);
            Some(*m)
        })
        .collect();
    Ok(TempelmanSweep { rows, max_by_k, running_max, sup_ratio: sup })
}

fn candidate_radii(plan: &BlockPlan, k: usize) -> Vec<i64> {
    let ak = plan.a[k - 1];
    let u = plan.u[k - 1];
    let prev: Vec<(i64, i64)> = (1..k).map(|i| plan.block(i)).collect();
    // endpoint expressions `slope·r + c` of all pairwise difference intervals
    let mut fixed: Vec<i64> = Vec::new();
    let mut moving: Vec<(i64, i64)> = Vec::new();
    for &(a, b) in &prev {
        for &(c, d) in &prev {
            fixed.push(a - d);
            fixed.push(b - c);
        }
        // N_r − J = [u+1−b, u+r−a],  J − N_r = [a−u−r, b−u−1]
        fixed.push(u + 1 - b);
        moving.push((1, u - a));
        moving.push((-1, a - u));
        fixed.push(b - u - 1);
    }
    // N_r − N_r = [−(r−1), r−1]
    moving.push((1, -1));
    moving.push((-1, 1));
    let mut cands = vec![1, ak];
    let mut push = |r0: i64| {
        for dlt in -2..=2 {
            let r = r0 + dlt;
            if (1..=ak).contains(&r) {
                cands.push(r);
            }
        }
    };
    for &(s, c) in &moving {
        for &f in &fixed {
            // s·r + c = f ± 1
            for e in [f - 1, f, f + 1] {
                push(s * (e - c));
            }
        }
        for &(s2, c2) in &moving {
            if s2 == -s {
                // s·r + c = −s·r + c2  ⇒  r = (c2 − c) / (2s)
                let num = (c2 - c) * s;
                push(num.div_euclid(2));
            }
        }
    }
    cands.sort_unstable();
    cands.dedup();
    cands
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec_plan() -> BlockPlan {
        BlockPlan::new(vec![0, 10, 100], vec![2, 8, 80]).unwrap()
    }

    #[test]
    fn intermediate_example() {
        let p = spec_plan();
        let s = p.intermediate_set(2, 3).unwrap();
        assert_eq!(s.runs(), &[(1, 2), (11, 13)]);
        assert_eq!(s.len(), 5);
        assert_eq!(p.intermediate_set(2, 8).unwrap(), p.complete_set(2));
        assert_eq!(p.intermediate_set(1, 2).unwrap().len(), 2);
        assert!(p.intermediate_set(2, 9).is_err());
        assert!(p.intermediate_set(4, 1).is_err());
    }

    #[test]
    fn example_plan_fails_only_the_growth_threshold() {
        let v = spec_plan().validate();
        assert!(v.wellspaced && v.regularity);
        assert!(!v.growingblocks);
        assert!((v.growth_ratios[1] - 10.0 / 80.0).abs() < 1e-12);
    }

    #[test]
    fn generated_plan_is_valid() {
        let p = BlockPlan::generate(8, 1.0, 1.0).unwrap();
        assert_eq!(p.u[..5], [1, 3, 6, 21, 194]);
        assert_eq!(p.a[..5], [1, 2, 12, 144, 2880]);
        let v = p.validate();
        assert!(v.all(), "{:?}", v.violations);
    }

    #[test]
    fn nesting() {
        let p = BlockPlan::generate(5, 1.0, 1.0).unwrap();
        for k in 1..=5 {
            let ak = p.a[k - 1];
            for r in 1..ak {
                let s = p.intermediate_set(k, r).unwrap();
                assert!(s.is_subset_of(&p.intermediate_set(k, r + 1).unwrap()));
                assert_eq!(s.len(), p.a[..k - 1].iter().sum::<i64>() as u128 + r as u128);
            }
            if k < 5 {
                assert!(p.complete_set(k).is_subset_of(&p.intermediate_set(k + 1, 1).unwrap()));
            }
        }
    }

    #[test]
    fn candidate_sweep_matches_exhaustive() {
        for plan in [
            BlockPlan::generate(5, 1.0, 1.0).unwrap(),
            BlockPlan::generate(4, 0.5, 1.0).unwrap(),
            BlockPlan::new(vec![0, 5, 30, 90], vec![3, 7, 40, 300]).unwrap(),
        ] {
            let fast = tempelman_sweep(&plan, false).unwrap();
            let full = tempelman_sweep(&plan, true).unwrap();
            assert_eq!(fast.max_by_k, full.max_by_k);
            assert_eq!(fast.sup_ratio, full.sup_ratio);
        }
    }
}
