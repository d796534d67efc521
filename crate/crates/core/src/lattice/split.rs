use super::cz::CzDecomposition;
use super::measure::SparseMeasure;
use super::point::LatticePoint;
use super::scalar::Scalar;
use crate::error::{invalid, Result};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "lowercase")]
pub enum SplitVariant {
    /// Pointwise threshold `2^{(d−γ)j}`.
    Speckled { gamma: f64 },
    /// Fiber-sum thresholds `2^{(d−α(d−#I)+ε)j}` inside `Q_{j,n}`, and
    /// `2^{(d−dα)j}` pointwise for `I = ∅`.
    Plaid { alpha: f64, eps: f64 },
}

/// One scale `j` of one level `s`: `b_s = selected + retained`.
#[derive(Clone, Debug)]
pub struct HeightSplit<S: Scalar> {
    pub j: u32,
    pub level: u32,
    pub selected: SparseMeasure<S>,
    pub retained: SparseMeasure<S>,
    /// Plaid only: `b^{j,I}_s` for each proper `I`, as coordinate index lists.
    pub pieces: Vec<(Vec<usize>, SparseMeasure<S>)>,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct SplitCheck {
    pub partition: bool,
    pub retained_bounded: bool,
    pub max_retained: f64,
    pub threshold: f64,
}

pub fn speckled_threshold(d: usize, gamma: f64, j: u32) -> f64 {
    ((d as f64 - gamma) * j as f64).exp2()
}

pub fn plaid_threshold(d: usize, alpha: f64, eps: f64, j: u32, card_i: usize) -> f64 {
    if card_i == 0 {
        ((d as f64 - d as f64 * alpha) * j as f64).exp2()
    } else {
        ((d as f64 - alpha * (d - card_i) as f64 + eps) * j as f64).exp2()
    }
}

/// All `I ⊊ {0..d}` in increasing bitmask order.
pub fn proper_subsets(d: usize) -> Vec<Vec<usize>> {
    (0u32..(1 << d) - 1).map(|mask| (0..d).filter(|i| mask >> i & 1 == 1).collect()).collect()
}

fn fiber_key(n: &LatticePoint, i_set: &[usize], j: u32) -> (LatticePoint, Vec<i64>) {
    let cube = LatticePoint(n.coords().iter().map(|&c| c >> j).collect());
    let perp = n.coords().iter().enumerate().filter(|(i, _)| !i_set.contains(i)).map(|(_, &c)| c).collect();
    (cube, perp)
}

fn fiber_sums<S: Scalar>(b: &SparseMeasure<S>, i_set: &[usize], j: u32) -> HashMap<(LatticePoint, Vec<i64>), f64> {
    let mut sums = HashMap::new();
    for (n, v) in b.iter() {
        *sums.entry(fiber_key(n, i_set, j)).or_insert(0.0) += v.abs().to_f64();
    }
    sums
}

/// Splits one level `b_s` at scale `j`.
pub fn split_level<S: Scalar>(
    b: &SparseMeasure<S>,
    level: u32,
    j: u32,
    variant: SplitVariant,
) -> Result<HeightSplit<S>> {
    let d = b.dim();
    match variant {
        SplitVariant::Speckled { gamma } => {
            if !(gamma > 0.0 && gamma < d as f64) {
                return Err(invalid("speckled split needs 0 < γ < d"));
            }
            let thr = speckled_threshold(d, gamma, j);
            let selected = b.restrict(|n| b.get(n).abs().to_f64() > thr);
            let retained = b.sub(&selected)?;
            Ok(HeightSplit {
                j,
                level,
                selected: selected.with_provenance(format!("b^({j})_{level}")),
                retained: retained.with_provenance(format!("B^({j})_{level}")),
                pieces: Vec::new(),
            })
        }
        SplitVariant::Plaid { alpha, eps } => {
            if !(alpha > 0.0 && alpha < 1.0) || eps < 0.0 {
                return Err(invalid("plaid split needs 0 < α < 1 and ε ≥ 0"));
            }
            let mut pieces = Vec::new();
            let mut hit: std::collections::BTreeSet<LatticePoint> = Default::default();
            for i_set in proper_subsets(d) {
                let thr = plaid_threshold(d, alpha, eps, j, i_set.len());
                let piece = if i_set.is_empty() {
                    b.restrict(|n| b.get(n).abs().to_f64() > thr)
                } else {
                    let sums = fiber_sums(b, &i_set, j);
                    b.restrict(|n| sums[&fiber_key(n, &i_set, j)] > thr)
                };
                hit.extend(piece.support().cloned());
                pieces.push((i_set, piece));
            }
            let selected = b.restrict(|n| hit.contains(n));
            let retained = b.sub(&selected)?;
            Ok(HeightSplit {
                j,
                level,
                selected: selected.with_provenance(format!("b^({j})_{level}")),
                retained: retained.with_provenance(format!("B^({j})_{level}")),
                pieces,
            })
        }
    }
}

/// Splits every level of a CZ decomposition at scale `j`.
pub fn split_by_height<S: Scalar>(
    cz: &CzDecomposition<S>,
    j: u32,
    variant: SplitVariant,
) -> Result<Vec<HeightSplit<S>>> {
    cz.levels().into_iter().map(|s| split_level(&cz.bad_at_level(s)?, s, j, variant)).collect()
}

impl<S: Scalar> HeightSplit<S> {
    /// Partition exactness and the retained-part bounds.
    pub fn check(&self, b: &SparseMeasure<S>, variant: SplitVariant) -> Result<SplitCheck> {
        let d = b.dim();
        let partition = self.selected.add(&self.retained)?.iter().eq(b.iter());
        let max_retained = self.retained.iter().map(|(_, v)| v.abs().to_f64()).fold(0.0, f64::max);
        let (retained_bounded, threshold) = match variant {
            SplitVariant::Speckled { gamma } => {
                let thr = speckled_threshold(d, gamma, self.j);
                (max_retained <= thr, thr)
            }
            SplitVariant::Plaid { alpha, eps } => {
                let thr0 = plaid_threshold(d, alpha, eps, self.j, 0);
                let mut ok = max_retained <= thr0;
                for i_set in proper_subsets(d).into_iter().filter(|i| !i.is_empty()) {
                    let thr = plaid_threshold(d, alpha, eps, self.j, i_set.len());
                    ok &= fiber_sums(&self.retained, &i_set, self.j).values().all(|&s| s <= thr);
                }
                // |B − b| ≤ Σ_I |b^{j,I}|
                for (n, v) in self.selected.iter() {
                    let cover: f64 = self.pieces.iter().map(|(_, p)| p.get(n).abs().to_f64()).sum();
                    ok &= v.abs().to_f64() <= cover;
                }
                (ok, thr0)
            }
        };
        Ok(SplitCheck { partition, retained_bounded, max_retained, threshold })
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
    fn tall_delta_is_selected() {
        let b = SparseMeasure::delta(pt(&[0]), rat(5, 1), "b");
        let v = SplitVariant::Speckled { gamma: 0.5 };
        let s = split_level(&b, 0, 2, v).unwrap();
        assert_eq!(s.selected.get(&pt(&[0])), rat(5, 1));
        assert!(s.retained.is_empty());
        let c = s.check(&b, v).unwrap();
        assert!(c.partition && c.retained_bounded);
        assert!((c.threshold - 2.0).abs() < 1e-12);
    }

    #[test]
    fn short_input_is_retained() {
        let b =
            SparseMeasure::<Rational>::from_entries(1, [(pt(&[0]), rat(2, 1)), (pt(&[3]), rat(1, 1))], "b").unwrap();
        let s = split_level(&b, 0, 2, SplitVariant::Speckled { gamma: 0.5 }).unwrap();
        assert!(s.selected.is_empty());
        assert_eq!(s.retained.len(), 2);
    }

    #[test]
    fn plaid_row_threshold() {
        // a row of total mass m along coordinate 0 inside one level-j cube
        let (alpha, eps, j) = (0.4, 0.05, 3u32);
        let thr = plaid_threshold(2, alpha, eps, j, 1);
        assert!((thr - ((2.0 - alpha + eps) * 3.0f64).exp2()).abs() < 1e-9);
        let row = |m: i128| {
            SparseMeasure::<Rational>::from_entries(2, (0..8).map(|x| (pt(&[x, 3]), rat(m, 8))), "b").unwrap()
        };
        let v = SplitVariant::Plaid { alpha, eps };
        let above = (thr.floor() as i128) + 1;
        let below = thr.floor() as i128;
        let s = split_level(&row(above), 0, j, v).unwrap();
        let i1 = &s.pieces.iter().find(|(i, _)| i == &vec![0]).unwrap().1;
        assert_eq!(i1.len(), 8);
        let s = split_level(&row(below), 0, j, v).unwrap();
        let i1 = &s.pieces.iter().find(|(i, _)| i == &vec![0]).unwrap().1;
        assert!(i1.is_empty());
        assert!(s.check(&row(below), v).unwrap().retained_bounded);
    }

    #[test]
    fn subsets() {
        assert_eq!(proper_subsets(2), vec![vec![], vec![0], vec![1]]);
        assert_eq!(proper_subsets(3).len(), 7);
    }
}
