use super::primes::is_prime;
use crate::error::{invalid, Error, Result};
use crate::lattice::LatticePoint;
use serde::{Deserialize, Serialize};

/// Parameters of the curve-set construction. Shifts are diagonal, `a_k = (A_k, …, A_k)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArithParams {
    pub d: usize,
    pub q: usize,
    pub primes: Vec<u64>,
    pub shifts: Vec<i64>,
    pub c: f64,
    pub cap: f64,
}

pub(crate) fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

/// `x_{k,j}`: coordinate `c` is `Σ_{i=1}^{q} p^{i−1}[j^{cq+i}]_p`.
pub fn curve_point(p: u64, q: usize, d: usize, j: u64) -> Vec<i64> {
    (0..d)
        .map(|c| {
            let mut acc = 0u64;
            let mut w = 1u64;
            for i in 1..=q {
                acc += w * pow_mod(j, (c * q + i) as u64, p);
                w *= p;
            }
            acc as i64
        })
        .collect()
}

fn violation(condition: &str, detail: String) -> Error {
    Error::PlanViolation { condition: condition.into(), detail }
}

impl ArithParams {
    pub fn m(&self) -> usize {
        self.q * self.d
    }

    /// Shifts `A_1 = 0`, `A_k = A_{k−1} + p_{k−1}^q + 1`, then validation.
    pub fn generate(d: usize, q: usize, primes: Vec<u64>, c: f64, cap: f64) -> Result<Self> {
        let mut shifts = Vec::with_capacity(primes.len());
        let mut a = 0i64;
        for k in 0..primes.len() {
            if k > 0 {
                let prev = primes[k - 1] as i64;
                a += prev.checked_pow(q as u32).ok_or(Error::Overflow { context: "arith shifts" })? + 1;
            }
            shifts.push(a);
        }
        let params = Self { d, q, primes, shifts, c, cap };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 || self.q == 0 {
            return Err(invalid("d and q must be positive"));
        }
        if self.primes.is_empty() || self.primes.len() != self.shifts.len() {
            return Err(invalid("one shift per prime is required"));
        }
        let m = self.m() as u64;
        for (k, &p) in self.primes.iter().enumerate() {
            if !is_prime(p) {
                return Err(violation("prime", format!("p_{} = {p} is not prime", k + 1)));
            }
            if p <= m {
                return Err(violation("p > m", format!("p_{} = {p} ≤ m = {m}", k + 1)));
            }
        }
        for (k, w) in self.primes.windows(2).enumerate() {
            let (a, b) = (w[0] as f64, w[1] as f64);
            if !(self.c * a <= b && b < self.cap * a) {
                return Err(violation(
                    "c·p_k ≤ p_{k+1} < C·p_k",
                    format!("p_{} = {}, p_{} = {}", k + 1, w[0], k + 2, w[1]),
                ));
            }
        }
        for k in 0..self.primes.len() {
            let pq = (self.primes[k] as f64).powi(self.q as i32);
            let a = self.shifts[k].unsigned_abs() as f64;
            if a > self.cap * pq {
                return Err(violation("|a_k| ≤ C·p_k^q", format!("k = {}: {a} > {}", k + 1, self.cap * pq)));
            }
            if k > 0 {
                let prev = self.shifts[k - 1].unsigned_abs() as f64 + (self.primes[k - 1] as f64).powi(self.q as i32);
                if !(prev < a) {
                    return Err(violation("|a_{k−1}| + p_{k−1}^q < |a_k|", format!("k = {}: {prev} ≥ {a}", k + 1)));
                }
            }
        }
        Ok(())
    }

    /// Block `k` (from 1) as `a_k + x_{k,j}`, ordered by first coordinate.
    pub fn block(&self, k: usize) -> Result<Vec<LatticePoint>> {
        if k == 0 || k > self.primes.len() {
            return Err(invalid(format!("block {k} outside the schedule")));
        }
        let p = self.primes[k - 1];
        let a = self.shifts[k - 1];
        let mut pts: Vec<(u64, LatticePoint)> = (0..p)
            .map(|j| {
                let x: Vec<i64> = curve_point(p, self.q, self.d, j).into_iter().map(|c| c + a).collect();
                (j, LatticePoint::from(x))
            })
            .collect();
        // the lowest base-p digit of the first coordinate is j, so first coordinates are distinct
        pts.sort_by(|x, y| x.1.coords()[0].cmp(&y.1.coords()[0]));
        Ok(pts.into_iter().map(|(_, p)| p).collect())
    }

    /// All points of blocks `1..=k` in dictionary order (block, then first coordinate).
    pub fn sequence(&self, blocks: usize) -> Result<Vec<LatticePoint>> {
        let mut out = Vec::new();
        for k in 1..=blocks {
            out.extend(self.block(k)?);
        }
        Ok(out)
    }

    /// `Σ_{i≤k} p_i`, the sequence index closing block `k`.
    pub fn block_end(&self, k: usize) -> u64 {
        self.primes[..k].iter().sum()
    }

    /// Sup-norm radii `[min, max]` of block `k`.
    pub fn block_radii(&self, k: usize) -> Result<(u64, u64)> {
        let b = self.block(k)?;
        let norms = b.iter().map(|p| p.norm());
        let lo = norms.clone().min().unwrap_or(0);
        Ok((lo, norms.max().unwrap_or(0)))
    }

    /// Radius ranges of consecutive blocks do not overlap.
    pub fn blocks_disjoint(&self) -> Result<bool> {
        let mut prev_max: Option<u64> = None;
        for k in 1..=self.primes.len() {
            let (lo, hi) = self.block_radii(k)?;
            if prev_max.is_some_and(|m| lo <= m) {
                return Ok(false);
            }
            prev_max = Some(hi);
        }
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digit_examples() {
        assert_eq!(curve_point(5, 1, 2, 3), vec![3, 4]);
        assert_eq!(curve_point(3, 2, 1, 2), vec![5]);
        for (p, q, d) in [(5, 1, 2), (7, 2, 2), (11, 3, 1)] {
            assert!(curve_point(p, q, d, 0).iter().all(|&c| c == 0));
        }
    }

    #[test]
    fn generated_params_are_valid_and_disjoint() {
        let p = ArithParams::generate(2, 1, vec![5, 11, 23, 47, 97], 2.0, 4.0).unwrap();
        assert!(p.blocks_disjoint().unwrap());
        let seq = p.sequence(5).unwrap();
        assert_eq!(seq.len() as u64, p.block_end(5));
        assert!(seq.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn block_order_is_by_first_coordinate() {
        let p = ArithParams::generate(1, 2, vec![5, 11], 2.0, 4.0).unwrap();
        let b = p.block(1).unwrap();
        assert!(b.windows(2).all(|w| w[0].coords()[0] < w[1].coords()[0]));
        // by j the first coordinates are not monotone once q ≥ 2: j = 3 ↦ 23, j = 4 ↦ 9
        assert_eq!(curve_point(5, 2, 1, 3), vec![23]);
        assert_eq!(curve_point(5, 2, 1, 4), vec![9]);
    }

    #[test]
    fn violations_are_named() {
        let bad = ArithParams { d: 1, q: 1, primes: vec![5, 7], shifts: vec![0, 1], c: 1.2, cap: 4.0 };
        match bad.validate() {
            Err(Error::PlanViolation { condition, .. }) => assert!(condition.contains("a_{k−1}")),
            other => panic!("{other:?}"),
        }
        assert!(ArithParams::generate(2, 1, vec![2, 5], 2.0, 4.0).is_err());
        assert!(ArithParams::generate(2, 1, vec![5, 7], 2.0, 4.0).is_err());
    }
}
