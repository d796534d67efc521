use crate::error::{budget, Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

/// Square-block plan in ℤ²: block `k` is `(a_k, 0) + [0, s_k − 1]²`.
///
/// Side counts stand in for diameters via `ℓ_k = √2·s_k`, so a block holds
/// `s_k² = ½ℓ_k²` points and its left face `{a_k} × [0, s_k − 1]` holds
/// `s_k = (√2/2)ℓ_k` points, matching the counting in the construction.
#[derive(Clone, Debug, PartialEq)]
pub struct SquarePlan {
    pub sides: Vec<BigInt>,
    pub shifts: Vec<BigInt>,
    /// `C` in `ℓ_k ≥ C·|a_{k−1}|`, as `num/den`.
    pub c_num: u64,
    pub c_den: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WitnessRow {
    pub k: usize,
    pub side: String,
    pub shift: String,
    pub left_face_average: f64,
    /// The construction's lower bound `s_k / (Σ_{i<k} s_i² + s_k)`.
    pub left_face_lower_bound: f64,
    pub block_end_average: f64,
    /// Exact equality of the counted block-end average with `Σs_i / Σs_i²`.
    pub block_end_matches_formula: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DivergenceWitnessReport {
    pub norm: &'static str,
    pub rows: Vec<WitnessRow>,
    pub all_left_faces_above_half: bool,
    pub block_ends_strictly_decreasing: bool,
}

fn violation(cond: &str, detail: String) -> Error {
    Error::PlanViolation { condition: cond.into(), detail }
}

impl SquarePlan {
    /// Smallest admissible schedule: `s_1 = 1`, `s_{k+1} = (2Σ_{i≤k} s_i²)² + 1`, `a_k = 2s_k²`.
    pub fn generate(k_max: usize) -> Self {
        let mut sides: Vec<BigInt> = vec![BigInt::one()];
        while sides.len() < k_max {
            let sum: BigInt = sides.iter().map(|s| s * s).sum::<BigInt>() * 2;
            sides.push(&sum * &sum + 1);
        }
        let shifts = sides.iter().map(|s| s * s * 2).collect();
        Self { sides, shifts, c_num: 1, c_den: 1 }
    }

    /// Conditions (2)–(4) of the construction plus the general spacing
    /// rules; condition (1) (square blocks) holds by type.
    pub fn check(&self) -> Result<()> {
        let n = self.sides.len();
        if n == 0 || self.shifts.len() != n {
            return Err(violation("shape", "sides and shifts must have equal nonzero length".into()));
        }
        let two = BigInt::from(2);
        let mut sq_sum = BigInt::zero();
        for k in 0..n {
            let (s, a) = (&self.sides[k], &self.shifts[k]);
            if s < &BigInt::one() || a < &BigInt::zero() {
                return Err(violation("shape", format!("block {} has nonpositive size", k + 1)));
            }
            // (2) ℓ_k² ≤ |a_k|
            if &(s * s * &two) > a {
                return Err(violation("(2) l_k^2 <= |a_k|", format!("k={}", k + 1)));
            }
            sq_sum += s * s * &two;
            if k + 1 < n {
                // (3) (√2/2)ℓ_{k+1} > (Σ_{i≤k} ℓ_i²)²
                if self.sides[k + 1] <= &sq_sum * &sq_sum {
                    return Err(violation("(3) growth of l_{k+1}", format!("k={}", k + 1)));
                }
                // |a_{k+1}| > |a_k| + ℓ_k, both sides positive so compare squares
                let gap = &self.shifts[k + 1] - a;
                if gap <= BigInt::zero() || &gap * &gap <= s * s * &two {
                    return Err(violation("spacing |a_{k+1}| > |a_k| + l_k", format!("k={}", k + 1)));
                }
            }
            if k > 0 {
                // ℓ_k ≥ C|a_{k−1}|  ⇔  2 s_k² den² ≥ num² a_{k−1}²
                let lhs = s * s * &two * BigInt::from(self.c_den).pow(2);
                let rhs = BigInt::from(self.c_num).pow(2) * &self.shifts[k - 1] * &self.shifts[k - 1];
                if lhs < rhs {
                    return Err(violation("l_k >= C|a_{k-1}|", format!("k={}", k + 1)));
                }
            }
        }
        Ok(())
    }

    /// `#(S ∩ B_r)` for the Euclidean ball with `r² = r2`.
    pub fn count_in_ball(&self, r2: &BigInt, max_columns: u64) -> Result<BigInt> {
        let mut total = BigInt::zero();
        let mut columns = 0u64;
        for (s, a) in self.sides.iter().zip(&self.shifts) {
            if &(a * a) > r2 {
                continue;
            }
            let far: BigInt = a + s - 1;
            let top: BigInt = s - 1;
            if &(&far * &far + &top * &top) <= r2 {
                total += s * s;
                continue;
            }
            let xmax = far.clone().min(r2.sqrt());
            let mut x = a.clone();
            while x <= xmax {
                columns += 1;
                budget("blocks.count_in_ball", max_columns as u128, columns as u128)?;
                let h: BigInt = (r2 - &x * &x).sqrt() + 1;
                total += h.min(s.clone());
                x += 1;
            }
        }
        Ok(total)
    }

    /// Mass of the witness `f = Σ 1_{left face k}` inside `B_r`.
    pub fn faces_in_ball(&self, r2: &BigInt) -> BigInt {
        self.sides
            .iter()
            .zip(&self.shifts)
            .filter(|(_, a)| &(*a * *a) <= r2)
            .map(|(s, a)| {
                let h: BigInt = (r2 - a * a).sqrt() + 1;
                h.min(s.clone())
            })
            .sum()
    }
}

fn ratio_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Averages of the witness over `S ∩ B_r` at each left-face radius
/// `r_k² = a_k² + s_k²` and at each block end, by exact counting.
pub fn divergence_witness(plan: &SquarePlan) -> Result<DivergenceWitnessReport> {
    plan.check()?;
    let mut rows = Vec::new();
    let mut prev_sq = BigInt::zero();
    let mut sum_s = BigInt::zero();
    for k in 0..plan.sides.len() {
        let (s, a) = (&plan.sides[k], &plan.shifts[k]);
        let r_face = a * a + s * s;
        let n_face = plan.count_in_ball(&r_face, 1 << 22)?;
        let face_avg = BigRational::new(plan.faces_in_ball(&r_face), n_face);
        let lower = BigRational::new(s.clone(), &prev_sq + s);
        let end = a + s - 1;
        let r_end = &end * &end + (s - 1) * (s - 1);
        let n_end = plan.count_in_ball(&r_end, 1 << 22)?;
        let end_avg = BigRational::new(plan.faces_in_ball(&r_end), n_end);
        sum_s += s;
        prev_sq += s * s;
        let formula = BigRational::new(sum_s.clone(), prev_sq.clone());
        rows.push(WitnessRow {
            k: k + 1,
            side: s.to_string(),
            shift: a.to_string(),
            left_face_average: ratio_f64(&face_avg),
            left_face_lower_bound: ratio_f64(&lower),
            block_end_average: ratio_f64(&end_avg),
            block_end_matches_formula: end_avg == formula,
        });
    }
    let half = 0.5;
    Ok(DivergenceWitnessReport {
        norm: "euclidean",
        all_left_faces_above_half: rows.iter().all(|r| r.left_face_average > half),
        block_ends_strictly_decreasing: rows.windows(2).all(|w| w[1].block_end_average < w[0].block_end_average),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_schedule() {
        let p = SquarePlan::generate(4);
        assert_eq!(p.sides[1], BigInt::from(5));
        assert_eq!(p.sides[2], BigInt::from(2705));
        assert!(p.check().is_ok());
    }

    #[test]
    fn first_block_average_is_one() {
        let r = divergence_witness(&SquarePlan::generate(1)).unwrap();
        assert_eq!(r.rows[0].left_face_average, 1.0);
    }

    #[test]
    fn witness_k5() {
        let r = divergence_witness(&SquarePlan::generate(5)).unwrap();
        assert!(r.all_left_faces_above_half);
        assert!(r.block_ends_strictly_decreasing);
        assert!(r.rows.iter().all(|w| w.block_end_matches_formula));
        assert!(r.rows.iter().all(|w| w.left_face_average >= w.left_face_lower_bound));
        assert!(r.rows[4].block_end_average < 0.1);
    }

    #[test]
    fn refuses_slow_growth() {
        let mut p = SquarePlan::generate(3);
        p.sides[2] = BigInt::from(100);
        p.shifts[2] = BigInt::from(20000);
        let e = divergence_witness(&p).unwrap_err();
        assert!(e.to_string().contains("(3)"));
    }

    #[test]
    fn ball_count_matches_enumeration() {
        let p = SquarePlan {
            sides: vec![BigInt::from(3), BigInt::from(4)],
            shifts: vec![BigInt::from(5), BigInt::from(9)],
            c_num: 1,
            c_den: 1,
        };
        for r2 in [0i64, 24, 25, 30, 60, 81, 100, 150, 200, 400] {
            let mut brute = 0;
            for (s, a) in [(3i64, 5i64), (4, 9)] {
                for x in a..a + s {
                    for y in 0..s {
                        if x * x + y * y <= r2 {
                            brute += 1;
                        }
                    }
                }
            }
            assert_eq!(p.count_in_ball(&BigInt::from(r2), 1000).unwrap(), BigInt::from(brute));
        }
    }
}
