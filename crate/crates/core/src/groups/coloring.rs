use super::model::GroupModel;
use crate::error::{Error, Result};
use crate::lattice::LatticePoint;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};

/// Pair variables `Y_g = X_g X_{hg}` for `g ∈ D = E ∩ h⁻¹E`, split into classes
/// whose dependency sets `{g, hg}` are pairwise disjoint.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThreeColoring {
    pub classes: Vec<Vec<LatticePoint>>,
    pub paths: usize,
    pub even_cycles: usize,
    pub odd_cycles: usize,
}

impl ThreeColoring {
    pub fn domain(&self) -> usize {
        self.classes.iter().map(|c| c.len()).sum()
    }
}

/// `D = {g ∈ E : hg ∈ E}`.
pub fn pair_domain(model: &GroupModel, e: &BTreeSet<LatticePoint>, h: &LatticePoint) -> BTreeSet<LatticePoint> {
    e.iter().filter(|g| e.contains(&model.mul(h, g))).cloned().collect()
}

pub fn three_color_partition(model: &GroupModel, e: &[LatticePoint], h: &LatticePoint) -> Result<ThreeColoring> {
    if *h == model.identity() {
        return Err(Error::Refused("the pair partition needs h ≠ e".into()));
    }
    let set: BTreeSet<LatticePoint> = e.iter().cloned().collect();
    let dom = pair_domain(model, &set, h);
    let hinv = model.inv(h);
    // the conflict graph g ~ hg has in- and out-degree ≤ 1: paths and cycles
    let mut color: BTreeMap<LatticePoint, usize> = BTreeMap::new();
    let (mut paths, mut even, mut odd) = (0, 0, 0);
    let starts: Vec<LatticePoint> = dom.iter().filter(|g| !dom.contains(&model.mul(&hinv, g))).cloned().collect();
    for s in starts {
        let mut g = s;
        let mut c = 0;
        loop {
            color.insert(g.clone(), c);
            c ^= 1;
            let next = model.mul(h, &g);
            if !dom.contains(&next) {
                break;
            }
            g = next;
        }
        paths += 1;
    }
    for g0 in &dom {
        if color.contains_key(g0) {
            continue;
        }
        let mut cycle = vec![g0.clone()];
        let mut g = model.mul(h, g0);
        while g != *g0 {
            cycle.push(g.clone());
            g = model.mul(h, &g);
        }
        let n = cycle.len();
        for (i, x) in cycle.into_iter().enumerate() {
            let c = if n % 2 == 1 && i == n - 1 { 2 } else { i % 2 };
            color.insert(x, c);
        }
        if n % 2 == 1 {
            odd += 1;
        } else {
            even += 1;
        }
    }
    let mut classes = vec![Vec::new(); 3];
    for (g, c) in color {
        classes[c].push(g);
    }
    while classes.last().is_some_and(|c| c.is_empty()) {
        classes.pop();
    }
    Ok(ThreeColoring { classes, paths, even_cycles: even, odd_cycles: odd })
}

/// Structural check: at most 3 classes, disjoint, covering `D`, and no element
/// of `E` appears twice among the dependency sets of one class.
pub fn verify_coloring(model: &GroupModel, e: &[LatticePoint], h: &LatticePoint, c: &ThreeColoring) -> bool {
    let set: BTreeSet<LatticePoint> = e.iter().cloned().collect();
    let dom = pair_domain(model, &set, h);
    let mut seen = BTreeSet::new();
    for class in &c.classes {
        let mut deps = BTreeSet::new();
        for g in class {
            if !dom.contains(g) || !seen.insert(g.clone()) {
                return false;
            }
            if !deps.insert(g.clone()) || !deps.insert(model.mul(h, g)) {
                return false;
            }
        }
    }
    c.classes.len() <= 3 && seen == dom
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::WordBall;
    use crate::rng::CounterRng;

    #[test]
    fn path_uses_two_colors() {
        let z = GroupModel::Lattice { d: 1 };
        let e: Vec<LatticePoint> = (0..4).map(|x| LatticePoint::from([x])).collect();
        let h = LatticePoint::from([1]);
        let c = three_color_partition(&z, &e, &h).unwrap();
        assert_eq!(c.classes.len(), 2);
        assert_eq!(c.domain(), 3);
        assert!(verify_coloring(&z, &e, &h, &c));
    }

    #[test]
    fn verifier_rejects_shared_dependencies() {
        let z = GroupModel::Lattice { d: 1 };
        let e: Vec<LatticePoint> = (0..4).map(|x| LatticePoint::from([x])).collect();
        let h = LatticePoint::from([1]);
        let bad = ThreeColoring { classes: vec![e[..3].to_vec()], paths: 1, even_cycles: 0, odd_cycles: 0 };
        assert!(!verify_coloring(&z, &e, &h, &bad));
    }

    #[test]
    fn odd_cycle_needs_three() {
        let g = GroupModel::Cyclic { n: 3 };
        let e: Vec<LatticePoint> = (0..3).map(|x| LatticePoint::from([x])).collect();
        let c = three_color_partition(&g, &e, &LatticePoint::from([1])).unwrap();
        assert_eq!(c.classes.len(), 3);
        assert_eq!(c.odd_cycles, 1);
        assert!(verify_coloring(&g, &e, &LatticePoint::from([1]), &c));
    }

    #[test]
    fn empty_and_refused() {
        let z = GroupModel::Lattice { d: 1 };
        let e = vec![LatticePoint::from([0]), LatticePoint::from([5])];
        let c = three_color_partition(&z, &e, &LatticePoint::from([1])).unwrap();
        assert!(c.classes.is_empty());
        assert!(three_color_partition(&z, &e, &LatticePoint::from([0])).is_err());
    }

    #[test]
    fn random_pairs_in_z_and_heisenberg() {
        let mut rng = CounterRng::new(7, 1);
        for model in [GroupModel::Lattice { d: 1 }, GroupModel::Heisenberg] {
            let ball = WordBall::new(&model, 5).unwrap();
            for _ in 0..50 {
                let e: Vec<LatticePoint> = ball.elements.iter().filter(|_| rng.next_f64() < 0.5).cloned().collect();
                let mut h = model.identity();
                while h == model.identity() {
                    h = ball.within(2)[rng.below(ball.size(2))].clone();
                }
                let c = three_color_partition(&model, &e, &h).unwrap();
                assert!(verify_coloring(&model, &e, &h, &c));
            }
        }
    }
}
