use crate::error::{budget, invalid, Error, Result};
use serde::Serialize;

/// Inclusive box `∏ [lo_i, hi_i]` in ℤ^d.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LatticeBox {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
}

impl LatticeBox {
    pub fn volume(&self) -> u128 {
        self.lo.iter().zip(&self.hi).map(|(a, b)| (b - a + 1).max(0) as u128).product()
    }

    /// `self − other`.
    pub fn minus(&self, o: &Self) -> Self {
        Self {
            lo: self.lo.iter().zip(&o.hi).map(|(a, b)| a - b).collect(),
            hi: self.hi.iter().zip(&o.lo).map(|(a, b)| a - b).collect(),
        }
    }
}

/// `#(∪ boxes)` by coordinate compression.
pub fn union_volume(boxes: &[LatticeBox], max_cells: u128) -> Result<u128> {
    let Some(first) = boxes.first() else {
        return Ok(0);
    };
    let d = first.lo.len();
    let cuts: Vec<Vec<i64>> = (0..d)
        .map(|i| {
            let mut c: Vec<i64> = boxes.iter().flat_map(|b| [b.lo[i], b.hi[i] + 1]).collect();
            c.sort_unstable();
            c.dedup();
            c
        })
        .collect();
    let dims: Vec<usize> = cuts.iter().map(|c| c.len() - 1).collect();
    let cells: u128 = dims.iter().map(|&n| n as u128).product();
    budget("blocks.union_volume", max_cells, cells)?;
    let mut covered = vec![false; cells as usize];
    for b in boxes {
        let ranges: Vec<(usize, usize)> = (0..d)
            .map(|i| {
                let s = cuts[i].binary_search(&b.lo[i]).unwrap();
                let e = cuts[i].binary_search(&(b.hi[i] + 1)).unwrap();
                (s, e)
            })
            .collect();
        mark(&mut covered, &dims, &ranges, 0, 0);
    }
    let mut total = 0u128;
    let mut idx = vec![0usize; d];
    for (flat, &c) in covered.iter().enumerate() {
        if c {
            let mut rem = flat;
            for i in (0..d).rev() {
                idx[i] = rem % dims[i];
                rem /= dims[i];
            }
            total += (0..d).map(|i| (cuts[i][idx[i] + 1] - cuts[i][idx[i]]) as u128).product::<u128>();
        }
    }
    Ok(total)
}

fn mark(cov: &mut [bool], dims: &[usize], ranges: &[(usize, usize)], axis: usize, base: usize) {
    if axis == dims.len() {
        cov[base] = true;
        return;
    }
    for x in ranges[axis].0..ranges[axis].1 {
        mark(cov, dims, ranges, axis + 1, base * dims[axis] + x);
    }
}

/// Diagonal cube plan: block `k` is `(a_k, …, a_k) + [0, s_k − 1]^d`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CornerPlan {
    pub d: usize,
    pub sides: Vec<i64>,
    pub shifts: Vec<i64>,
    pub c: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CornerRow {
    pub r: i64,
    pub size: u128,
    pub diff_size: u128,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CornersReport {
    pub norm: &'static str,
    pub rows: Vec<CornerRow>,
    pub sup_ratio: f64,
}

impl CornerPlan {
    /// `a_1 = 1, s_1 = 2`, then `a_k = a_{k−1} + 2s_{k−1}` and `s_k = 2(a_{k−1} + s_{k−1})`.
    pub fn generate(d: usize, blocks: usize) -> Result<Self> {
        if d == 0 || blocks == 0 {
            return Err(invalid("corner plan needs d ≥ 1 and at least one block"));
        }
        let (mut sides, mut shifts) = (vec![2i64], vec![1i64]);
        for _ in 1..blocks {
            let (s, a) = (*sides.last().unwrap(), *shifts.last().unwrap());
            shifts.push(a + 2 * s);
            sides.push(2 * (a + s));
        }
        let p = Self { d, sides, shifts, c: 1.0 };
        p.validate()?;
        Ok(p)
    }

    /// Sup-norm diameters `ℓ_k = s_k − 1`.
    pub fn validate(&self) -> Result<()> {
        let n = self.sides.len();
        if n == 0 || self.shifts.len() != n || self.sides.iter().any(|&s| s < 1) {
            return Err(invalid("malformed corner plan"));
        }
        for k in 0..n {
            if k + 1 < n && self.shifts[k + 1] < self.shifts[k] + self.sides[k] {
                return Err(Error::PlanViolation {
                    condition: "|a_{k+1}| > |a_k| + l_k".into(),
                    detail: format!("k={}", k + 1),
                });
            }
            if k > 0 && ((self.sides[k] - 1) as f64) < self.c * self.shifts[k - 1] as f64 {
                return Err(Error::PlanViolation {
                    condition: "l_k >= C|a_{k-1}|".into(),
                    detail: format!("k={}", k + 1),
                });
            }
        }
        Ok(())
    }

    /// `S ∩ B_r` for the sup-norm ball, as clipped boxes.
    pub fn clipped(&self, r: i64) -> Vec<LatticeBox> {
        self.sides
            .iter()
            .zip(&self.shifts)
            .filter(|(_, &a)| a <= r)
            .map(|(&s, &a)| LatticeBox { lo: vec![a; self.d], hi: vec![(a + s - 1).min(r); self.d] })
            .collect()
    }

    /// Radii at, just before, inside and at the end of every block.
    pub fn default_radii(&self) -> Vec<i64> {
        let mut rs = Vec::new();
        for (&s, &a) in self.sides.iter().zip(&self.shifts) {
            rs.extend([a - 1, a, a + s / 4, a + s / 2, a + s - 1, a + s]);
        }
        rs.sort_unstable();
        rs.dedup();
        rs.retain(|&r| r >= 0);
        rs
    }
}

/// `#((S∩B_r) − (S∩B_r)) / #(S∩B_r)` over the radii; empty prefixes are skipped.
pub fn corners_first_check(plan: &CornerPlan, radii: &[i64]) -> Result<CornersReport> {
    plan.validate()?;
    let mut rows = Vec::new();
    for &r in radii {
        let boxes = plan.clipped(r);
        if boxes.is_empty() {
            continue;
        }
        let size: u128 = boxes.iter().map(LatticeBox::volume).sum();
        let diffs: Vec<LatticeBox> = boxes.iter().flat_map(|a| boxes.iter().map(move |b| a.minus(b))).collect();
        let diff_size = union_volume(&diffs, 50_000_000)?;
        rows.push(CornerRow { r, size, diff_size, ratio: diff_size as f64 / size as f64 });
    }
    let sup_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(CornersReport { norm: "sup", rows, sup_ratio })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn brute(boxes: &[LatticeBox]) -> (usize, usize) {
        let mut pts = Vec::new();
        for b in boxes {
            let mut cur = b.lo.clone();
            loop {
                pts.push(cur.clone());
                let mut i = 0;
                loop {
                    if i == cur.len() {
                        break;
                    }
                    cur[i] += 1;
                    if cur[i] <= b.hi[i] {
                        break;
                    }
                    cur[i] = b.lo[i];
                    i += 1;
                }
                if i == cur.len() {
                    break;
                }
            }
        }
        let set: HashSet<Vec<i64>> = pts.iter().cloned().collect();
        let diffs: HashSet<Vec<i64>> =
            set.iter().flat_map(|a| set.iter().map(move |b| a.iter().zip(b).map(|(x, y)| x - y).collect())).collect();
        (set.len(), diffs.len())
    }

    #[test]
    fn matches_enumeration() {
        let plan = CornerPlan::generate(2, 3).unwrap();
        let rep = corners_first_check(&plan, &plan.default_radii()).unwrap();
        for row in &rep.rows {
            let (n, dd) = brute(&plan.clipped(row.r));
            assert_eq!((row.size, row.diff_size), (n as u128, dd as u128), "r={}", row.r);
        }
    }

    #[test]
    fn single_prism_bound() {
        for d in 1..=3 {
            let plan = CornerPlan::generate(d, 1).unwrap();
            let rep = corners_first_check(&plan, &[0, 1, 2]).unwrap();
            assert_eq!(rep.rows.len(), 2, "r = 0 lies below the first prism");
            assert!(rep.sup_ratio <= 4f64.powi(d as i32));
        }
    }

    #[test]
    fn union_volume_overlaps() {
        let b = |lo: [i64; 2], hi: [i64; 2]| LatticeBox { lo: lo.to_vec(), hi: hi.to_vec() };
        let v = union_volume(&[b([0, 0], [2, 2]), b([1, 1], [3, 3])], 1000).unwrap();
        assert_eq!(v, 9 + 9 - 4);
    }
}
