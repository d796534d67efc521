use super::model::GroupModel;
use crate::error::{budget, Result};
use crate::lattice::LatticePoint;
use serde::Serialize;
use std::collections::{BTreeMap, HashMap};

/// A finitely supported real function on a group.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroupMeasure {
    pub model: GroupModel,
    values: BTreeMap<LatticePoint, f64>,
}

pub const GROUP_CONV_MAX_PAIRS: u128 = 400_000_000;

impl GroupMeasure {
    pub fn new(model: &GroupModel, items: impl IntoIterator<Item = (LatticePoint, f64)>) -> Self {
        let mut values = BTreeMap::new();
        for (g, v) in items {
            *values.entry(g).or_insert(0.0) += v;
        }
        values.retain(|_, v| *v != 0.0);
        Self { model: model.clone(), values }
    }

    pub fn delta(model: &GroupModel, g: LatticePoint, v: f64) -> Self {
        Self::new(model, [(g, v)])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, g: &LatticePoint) -> f64 {
        self.values.get(g).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&LatticePoint, &f64)> {
        self.values.iter()
    }

    pub fn l1(&self) -> f64 {
        self.values.values().map(|v| v.abs()).sum()
    }

    pub fn l2_sq(&self) -> f64 {
        self.values.values().map(|v| v * v).sum()
    }

    pub fn total(&self) -> f64 {
        self.values.values().sum()
    }

    /// `ν̃(g) = ν(g⁻¹)`.
    pub fn reflect(&self) -> Self {
        Self::new(&self.model, self.values.iter().map(|(g, v)| (self.model.inv(g), *v)))
    }

    /// `(a∗b)(g) = Σ_{xy = g} a(x)b(y)`.
    pub fn convolve(&self, o: &Self) -> Result<Self> {
        budget("groups.convolve", GROUP_CONV_MAX_PAIRS, self.len() as u128 * o.len() as u128)?;
        let mut acc: HashMap<LatticePoint, f64> = HashMap::with_capacity(self.len() + o.len());
        for (x, a) in &self.values {
            for (y, b) in &o.values {
                *acc.entry(self.model.mul(x, y)).or_insert(0.0) += a * b;
            }
        }
        Ok(Self::new(&self.model, acc))
    }

    /// `φ ↦ ν∗φ`, whose adjoint composition is convolution with `ν̃∗ν`.
    pub fn apply(&self, phi: &Self) -> Result<Self> {
        self.convolve(phi)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TtStar {
    pub m: u32,
    pub l1: f64,
    pub l2: f64,
    /// `‖(ν̃∗ν)^M‖₁^{1/2M}`, an upper bound for `‖ν‖_op`.
    pub op_upper: f64,
}

/// Norms of the `M`-th convolution power of `ν̃∗ν`.
pub fn tt_star_norm(nu: &GroupMeasure, m: u32) -> Result<TtStar> {
    if !(1..=3).contains(&m) {
        return Err(crate::error::invalid("M must be 1, 2 or 3"));
    }
    let base = nu.reflect().convolve(nu)?;
    let mut power = base.clone();
    for _ in 1..m {
        power = power.convolve(&base)?;
    }
    Ok(TtStar { m, l1: power.l1(), l2: power.l2_sq().sqrt(), op_upper: power.l1().powf(1.0 / (2 * m) as f64) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::SparseMeasure;

    #[test]
    fn toy_tt_star() {
        let h = GroupModel::Heisenberg;
        let g = LatticePoint::from([1, 2, 0]);
        let nu = GroupMeasure::new(&h, [(h.identity(), 1.0), (g.clone(), -1.0)]);
        let tt = nu.reflect().convolve(&nu).unwrap();
        assert_eq!(tt.get(&h.identity()), 2.0);
        assert_eq!(tt.get(&g), -1.0);
        assert_eq!(tt.get(&h.inv(&g)), -1.0);
        assert_eq!(tt_star_norm(&nu, 1).unwrap().l1, 4.0);
    }

    #[test]
    fn lattice_instance_matches_lattice_convolution() {
        let model = GroupModel::Lattice { d: 2 };
        let pts = [([0, 1], 0.5), ([2, -1], -1.25), ([3, 3], 2.0), ([-1, 0], 0.75)];
        let a = GroupMeasure::new(&model, pts.map(|(p, v)| (LatticePoint::from(p), v)));
        let b = GroupMeasure::new(&model, pts[1..].iter().map(|&(p, v)| (LatticePoint::from(p), v * 3.0)));
        let la = SparseMeasure::from_entries(2, a.iter().map(|(p, v)| (p.clone(), *v)), "a").unwrap();
        let lb = SparseMeasure::from_entries(2, b.iter().map(|(p, v)| (p.clone(), *v)), "b").unwrap();
        let lc = la.convolve(&lb).unwrap();
        let gc = a.convolve(&b).unwrap();
        assert_eq!(gc.len(), lc.len());
        for (p, v) in lc.iter() {
            assert_eq!(gc.get(p), *v);
        }
    }
}
