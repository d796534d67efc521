use super::measure::SparseMeasure;
use super::point::LatticePoint;
use super::scalar::Scalar;
use crate::error::{invalid, Result};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet, HashMap};

/// `∏_i [k_i 2^s, (k_i+1) 2^s)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct DyadicCube {
    pub level: u32,
    pub index: LatticePoint,
}

impl DyadicCube {
    pub fn containing(n: &LatticePoint, level: u32) -> Self {
        Self { level, index: LatticePoint(n.coords().iter().map(|&c| c >> level).collect()) }
    }

    pub fn side(&self) -> i64 {
        1i64 << self.level
    }

    /// `#Q = 2^{sd}`.
    pub fn volume(&self) -> u128 {
        1u128 << (self.level as usize * self.index.dim())
    }

    pub fn contains(&self, n: &LatticePoint) -> bool {
        n.coords().iter().zip(self.index.coords()).all(|(&c, &k)| c >> self.level == k)
    }

    pub fn parent(&self) -> Self {
        Self { level: self.level + 1, index: LatticePoint(self.index.coords().iter().map(|&k| k >> 1).collect()) }
    }

    pub fn disjoint(&self, o: &Self) -> bool {
        let (lo, hi) = if self.level <= o.level { (self, o) } else { (o, self) };
        let shift = hi.level - lo.level;
        lo.index.coords().iter().zip(hi.index.coords()).any(|(&a, &b)| a >> shift != b)
    }
}

/// `f = g + Σ b_{s,k}` at height λ.
#[derive(Clone, Debug)]
pub struct CzDecomposition<S: Scalar> {
    pub lambda: S,
    pub good: SparseMeasure<S>,
    pub bad: Vec<(DyadicCube, SparseMeasure<S>)>,
}

/// Outcome of checking every decomposition invariant.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct CzCheck {
    pub reconstruction: bool,
    pub cubes_disjoint: bool,
    pub good_bounded: bool,
    pub cube_volume_bounded: bool,
    pub bad_mass_bounded: bool,
}

impl CzCheck {
    pub fn all(&self) -> bool {
        self.reconstruction
            && self.cubes_disjoint
            && self.good_bounded
            && self.cube_volume_bounded
            && self.bad_mass_bounded
    }
}

fn pow2<S: Scalar>(e: u32) -> S {
    assert!(e < 63, "dyadic height out of range");
    S::from_i64(1i64 << e)
}

/// Stopping-time decomposition: the selected cubes are the maximal dyadic
/// cubes whose average of `f` exceeds `lambda`.
pub fn cz_decompose<S: Scalar>(f: &SparseMeasure<S>, lambda: &S) -> Result<CzDecomposition<S>> {
    if !(lambda > &S::zero()) {
        return Err(invalid("CZ height must be positive"));
    }
    if f.iter().any(|(_, v)| v < &S::zero()) {
        return Err(invalid("CZ input must be nonnegative"));
    }
    let d = f.dim() as u32;
    let total = f.total_mass()?;
    // Above s_top every cube has average ≤ λ, so no selected cube lives there.
    let mut s_top = 0u32;
    while lambda.mul_checked(&pow2(s_top * d))? < total {
        s_top += 1;
    }
    let mut selected: BTreeSet<DyadicCube> = BTreeSet::new();
    for s in (0..s_top).rev() {
        let mut sums: HashMap<DyadicCube, S> = HashMap::new();
        for (n, v) in f.iter() {
            let q = DyadicCube::containing(n, s);
            let cur = sums.remove(&q).unwrap_or_else(S::zero);
            sums.insert(q, cur.add_checked(v)?);
        }
        let thr = lambda.mul_checked(&pow2(s * d))?;
        let mut hits: Vec<DyadicCube> = sums.into_iter().filter(|(_, sum)| sum > &thr).map(|(q, _)| q).collect();
        hits.sort();
        for q in hits {
            let mut anc = q.clone();
            let mut covered = false;
            while anc.level + 1 < s_top {
                anc = anc.parent();
                if selected.contains(&anc) {
                    covered = true;
                    break;
                }
            }
            if !covered {
                selected.insert(q);
            }
        }
    }
    let mut bad: BTreeMap<DyadicCube, SparseMeasure<S>> = BTreeMap::new();
    let mut good = SparseMeasure::zero(f.dim(), "cz.good");
    for (n, v) in f.iter() {
        let owner = (0..s_top).map(|s| DyadicCube::containing(n, s)).find(|q| selected.contains(q));
        match owner {
            Some(q) => bad
                .entry(q.clone())
                .or_insert_with(|| SparseMeasure::zero(f.dim(), format!("cz.bad[{}]", q.level)))
                .add_at(n.clone(), v)?,
            None => good.add_at(n.clone(), v)?,
        }
    }
    Ok(CzDecomposition { lambda: lambda.clone(), good, bad: bad.into_iter().collect() })
}

impl<S: Scalar> CzDecomposition<S> {
    /// `b_s = Σ_k b_{s,k}`.
    pub fn bad_at_level(&self, s: u32) -> Result<SparseMeasure<S>> {
        let mut out = SparseMeasure::zero(self.good.dim(), format!("cz.b_{s}"));
        for (q, b) in self.bad.iter().filter(|(q, _)| q.level == s) {
            let _ = q;
            out = out.add(b)?;
        }
        Ok(out)
    }

    pub fn levels(&self) -> BTreeSet<u32> {
        self.bad.iter().map(|(q, _)| q.level).collect()
    }

    /// Checks the five invariants against the input `f`.
    pub fn check(&self, f: &SparseMeasure<S>) -> Result<CzCheck> {
        let d = f.dim() as u32;
        let mut rebuilt = self.good.clone();
        for (_, b) in &self.bad {
            rebuilt = rebuilt.add(b)?;
        }
        let reconstruction = rebuilt.iter().eq(f.iter());
        let mut cubes_disjoint = true;
        for (i, (a, _)) in self.bad.iter().enumerate() {
            for (b, _) in &self.bad[i + 1..] {
                cubes_disjoint &= a.disjoint(b);
            }
        }
        let good_cap = self.lambda.mul_checked(&pow2(d))?;
        let good_bounded = self.good.iter().all(|(_, v)| v.abs() <= good_cap);
        let vol: u128 = self.bad.iter().map(|(q, _)| q.volume()).sum();
        // Σ #Q ≤ (2^d/λ)‖f‖₁  ⇔  λ Σ#Q ≤ 2^d ‖f‖₁
        let lhs = self.lambda.to_f64() * vol as f64;
        let rhs = pow2::<S>(d).mul_checked(&f.total_mass()?)?.to_f64();
        let cube_volume_bounded = if S::EXACT && vol < (1u128 << 62) {
            self.lambda.mul_checked(&S::from_i64(vol as i64))? <= pow2::<S>(d).mul_checked(&f.total_mass()?)?
        } else {
            lhs <= rhs * (1.0 + 1e-12)
        };
        let mut bad_mass_bounded = true;
        for (q, b) in &self.bad {
            let mass = b.stats()?.l1;
            let cap = good_cap.mul_checked(&S::from_i64(q.volume() as i64))?;
            bad_mass_bounded &= mass <= cap && b.support().all(|n| q.contains(n));
        }
        Ok(CzCheck { reconstruction, cubes_disjoint, good_bounded, cube_volume_bounded, bad_mass_bounded })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::scalar::{rat, Rational};

    fn pt(c: &[i64]) -> LatticePoint {
        LatticePoint::new(c)
    }

    #[test]
    fn delta_below_height_is_good() {
        let f = SparseMeasure::delta(pt(&[0]), rat(1, 1), "f");
        let cz = cz_decompose(&f, &rat(2, 1)).unwrap();
        assert!(cz.bad.is_empty());
        assert_eq!(cz.good.get(&pt(&[0])), rat(1, 1));
        assert!(cz.check(&f).unwrap().all());
    }

    #[test]
    fn three_delta_selects_pair_cube() {
        let f = SparseMeasure::delta(pt(&[0]), rat(3, 1), "f");
        let cz = cz_decompose(&f, &rat(1, 1)).unwrap();
        assert_eq!(cz.bad.len(), 1);
        let (q, b) = &cz.bad[0];
        assert_eq!(q.level, 1);
        assert_eq!(q.index, pt(&[0]));
        assert_eq!(b.get(&pt(&[0])), rat(3, 1));
        assert!(cz.good.is_empty());
        assert!(cz.check(&f).unwrap().all());
    }

    #[test]
    fn flat_half_height_cube_is_good() {
        let items = (0..4).flat_map(|x| (4..8).map(move |y| (pt(&[x, y]), rat(1, 2))));
        let f = SparseMeasure::<Rational>::from_entries(2, items, "f").unwrap();
        let cz = cz_decompose(&f, &rat(1, 1)).unwrap();
        assert!(cz.bad.is_empty());
        assert_eq!(cz.good, f.clone().with_provenance("cz.good"));
    }

    #[test]
    fn empty_input() {
        let f = SparseMeasure::<Rational>::zero(2, "f");
        let cz = cz_decompose(&f, &rat(1, 1)).unwrap();
        assert!(cz.good.is_empty() && cz.bad.is_empty());
    }

    #[test]
    fn negative_coordinates_use_floor_cubes() {
        let q = DyadicCube::containing(&pt(&[-1, 5]), 2);
        assert_eq!(q.index, pt(&[-1, 1]));
        assert!(q.contains(&pt(&[-4, 4])) && !q.contains(&pt(&[0, 4])));
        assert!(q.disjoint(&DyadicCube::containing(&pt(&[0, 4]), 2)));
        assert!(!q.disjoint(&DyadicCube::containing(&pt(&[-3, 6]), 0)));
    }

    #[test]
    fn rejects_bad_input() {
        let f = SparseMeasure::delta(pt(&[0]), rat(-1, 1), "f");
        assert!(cz_decompose(&f, &rat(1, 1)).is_err());
        let g = SparseMeasure::delta(pt(&[0]), rat(1, 1), "g");
        assert!(cz_decompose(&g, &rat(0, 1)).is_err());
    }
}
