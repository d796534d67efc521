use serde::{Deserialize, Serialize};
use smallvec::SmallVec;
use std::fmt;

/// A point of ℤ^d. Ordered lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticePoint(pub SmallVec<[i64; 4]>);

impl LatticePoint {
    pub fn new(coords: &[i64]) -> Self {
        assert!(!coords.is_empty(), "a lattice point needs d >= 1");
        Self(SmallVec::from_slice(coords))
    }

    pub fn origin(d: usize) -> Self {
        Self(SmallVec::from_elem(0, d))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn is_origin(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn add(&self, o: &Self) -> Self {
        debug_assert_eq!(self.dim(), o.dim());
        Self(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        debug_assert_eq!(self.dim(), o.dim());
        Self(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> Self {
        Self(self.0.iter().map(|a| -a).collect())
    }

    /// `|n|`: the sup-norm.
    pub fn norm(&self) -> u64 {
        self.0.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0)
    }

    pub fn l1_norm(&self) -> u64 {
        self.0.iter().map(|c| c.unsigned_abs()).sum()
    }
}

impl fmt::Debug for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0.as_slice())
    }
}

impl From<Vec<i64>> for LatticePoint {
    fn from(v: Vec<i64>) -> Self {
        Self::new(&v)
    }
}

impl<const N: usize> From<[i64; N]> for LatticePoint {
    fn from(v: [i64; N]) -> Self {
        Self::new(&v)
    }
}

/// Dyadic shell index: `j` with `2^j <= |n| < 2^{j+1}`, `None` at the origin.
pub fn shell_index(n: &LatticePoint) -> Option<u32> {
    let r = n.norm();
    (r > 0).then(|| 63 - r.leading_zeros())
}

/// Number of points of ℤ^d with `2^j <= |n| < 2^{j+1}`.
pub fn shell_size(d: usize, j: u32) -> u128 {
    let big = (1u128 << (j + 2)) - 1;
    let small = (1u128 << (j + 1)) - 1;
    big.pow(d as u32) - small.pow(d as u32)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_lexicographic() {
        let a = LatticePoint::from([-2, 0]);
        let b = LatticePoint::from([0, 2]);
        assert!(a < b);
        assert_eq!(a.norm(), b.norm());
    }

    #[test]
    fn shells() {
        assert_eq!(shell_index(&LatticePoint::from([0, 0])), None);
        assert_eq!(shell_index(&LatticePoint::from([1, -1])), Some(0));
        assert_eq!(shell_index(&LatticePoint::from([3, 2])), Some(1));
        assert_eq!(shell_index(&LatticePoint::from([0, -4])), Some(2));
        // shell 0 in d = 2 is the 8 neighbours of the origin
        assert_eq!(shell_size(2, 0), 8);
        assert_eq!(shell_size(1, 3), 16);
    }
}
