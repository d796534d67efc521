use super::model::GroupModel;
use crate::error::{budget, Result};
use crate::lattice::LatticePoint;
use crate::random::ols_slope;
use crate::rng::CounterRng;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// `𝔸^N` by breadth-first closure; `elements` is in BFS order, so layer `r`
/// is `elements[layer_ends[r−1]..layer_ends[r]]`.
#[derive(Clone, Debug)]
pub struct WordBall {
    pub model: GroupModel,
    pub radius: u32,
    pub elements: Vec<LatticePoint>,
    pub layer_ends: Vec<usize>,
    length: HashMap<LatticePoint, u32>,
}

pub const BALL_MAX_ELEMENTS: u128 = 20_000_000;

impl WordBall {
    pub fn new(model: &GroupModel, radius: u32) -> Result<Self> {
        let gens = model.generators();
        let e = model.identity();
        let mut length = HashMap::from([(e.clone(), 0u32)]);
        let mut elements = vec![e];
        let mut layer_ends = vec![1usize];
        let mut start = 0;
        for r in 1..=radius {
            let end = elements.len();
            for i in start..end {
                for g in &gens[1..] {
                    let h = model.mul(&elements[i], g);
                    if !length.contains_key(&h) {
                        length.insert(h.clone(), r);
                        elements.push(h);
                    }
                }
            }
            budget("groups.word_ball", BALL_MAX_ELEMENTS, elements.len() as u128)?;
            start = end;
            layer_ends.push(elements.len());
        }
        Ok(Self { model: model.clone(), radius, elements, layer_ends, length })
    }

    /// `#𝔸^N` for `N ≤ radius`.
    pub fn size(&self, n: u32) -> usize {
        self.layer_ends[n.min(self.radius) as usize]
    }

    /// Elements of `𝔸^N`.
    pub fn within(&self, n: u32) -> &[LatticePoint] {
        &self.elements[..self.size(n)]
    }

    /// `ρ(g, e)` if `g` lies in the ball.
    pub fn length(&self, g: &LatticePoint) -> Option<u32> {
        self.length.get(g).copied()
    }

    /// `ρ(g, h) = min{N : gh⁻¹ ∈ 𝔸^N}` if it is at most the radius.
    pub fn rho(&self, g: &LatticePoint, h: &LatticePoint) -> Option<u32> {
        self.length(&self.model.mul(g, &self.model.inv(h)))
    }

    /// Word length by meet in the middle: `min |a| + |b|` over `g = ab` with `|a| ≤ ⌈R/2⌉`.
    pub fn length_by_halves(&self, g: &LatticePoint) -> Option<u32> {
        let half = self.radius.div_ceil(2);
        self.within(half)
            .iter()
            .filter_map(|a| {
                let b = self.model.mul(&self.model.inv(a), g);
                let lb = self.length(&b)?;
                (lb <= half).then(|| self.length[a] + lb)
            })
            .min()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub model: String,
    pub counts: Vec<u64>,
    /// OLS slope of `log #𝔸^N` on `log N` over the top half of the range.
    pub slope: f64,
    pub degree: u32,
    /// `#𝔸^N / N^degree` for `N ≥ 1`.
    pub ratios: Vec<f64>,
    pub window: (u32, u32),
    /// `max/min` of the ratios in the window, minus one.
    pub band: f64,
    /// `#𝔸^{2N} / #𝔸^N`, the difference-set ratio of the ball (`𝔸^N` is symmetric).
    pub doubling: Vec<f64>,
}

pub fn word_ball_growth(model: &GroupModel, n_max: u32, window: (u32, u32)) -> Result<GrowthReport> {
    let ball = WordBall::new(model, n_max)?;
    let counts: Vec<u64> = (0..=n_max).map(|n| ball.size(n) as u64).collect();
    let lo = (n_max / 2).max(1);
    let (xs, ys): (Vec<f64>, Vec<f64>) =
        (lo..=n_max).map(|n| ((n as f64).ln(), (counts[n as usize] as f64).ln())).unzip();
    let slope = ols_slope(&xs, &ys).unwrap_or(0.0);
    let degree = slope.round().max(0.0) as u32;
    let ratios: Vec<f64> = (1..=n_max).map(|n| counts[n as usize] as f64 / (n as f64).powi(degree as i32)).collect();
    let inside: Vec<f64> = (window.0.max(1)..=window.1.min(n_max)).map(|n| ratios[n as usize - 1]).collect();
    let band = match (inside.iter().cloned().reduce(f64::max), inside.iter().cloned().reduce(f64::min)) {
        (Some(hi), Some(lo)) if lo > 0.0 => hi / lo - 1.0,
        _ => f64::NAN,
    };
    let doubling = (0..=n_max / 2).map(|n| counts[2 * n as usize] as f64 / counts[n as usize] as f64).collect();
    Ok(GrowthReport { model: model.name(), counts, slope, degree, ratios, window, band, doubling })
}

/// Spot-checks `ρ(g, h) = ρ(h, g)` and BFS length against meet-in-the-middle.
pub fn metric_checks(ball: &WordBall, samples: usize, seed: u64) -> bool {
    let mut rng = CounterRng::new(seed, 0xBA11);
    let half = ball.within(ball.radius / 2);
    (0..samples).all(|_| {
        let g = &half[rng.below(half.len())];
        let h = &half[rng.below(half.len())];
        let sym = ball.rho(g, h) == ball.rho(h, g);
        let k = &ball.elements[rng.below(ball.elements.len())];
        sym && ball.length_by_halves(k) == ball.length(k)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z2_ball_is_l1_ball() {
        let b = WordBall::new(&GroupModel::Lattice { d: 2 }, 12).unwrap();
        for n in 0..=12u32 {
            assert_eq!(b.size(n) as u64, 2 * (n as u64).pow(2) + 2 * n as u64 + 1);
        }
        assert_eq!(b.within(0), &[LatticePoint::origin(2)]);
        assert_eq!(b.length(&LatticePoint::from([3, -4])), Some(7));
        let king = WordBall::new(&GroupModel::LatticeKing { d: 2 }, 5).unwrap();
        assert_eq!(king.size(5), 121);
        assert_eq!(king.length(&LatticePoint::from([3, -4])), Some(4));
    }

    #[test]
    fn balls_are_nested_and_products() {
        let h = GroupModel::Heisenberg;
        let b = WordBall::new(&h, 6).unwrap();
        // 𝔸^{N+1} = 𝔸^N·𝔸
        for n in 0..6u32 {
            let mut next: Vec<LatticePoint> = b
                .within(n)
                .iter()
                .flat_map(|x| h.generators().into_iter().map(move |g| (x.clone(), g)))
                .map(|(x, g)| h.mul(&x, &g))
                .collect();
            next.sort();
            next.dedup();
            let mut want = b.within(n + 1).to_vec();
            want.sort();
            assert_eq!(next, want);
        }
        assert!(metric_checks(&b, 200, 3));
    }

    #[test]
    fn finite_group_saturates() {
        let b = WordBall::new(&GroupModel::Cyclic { n: 5 }, 6).unwrap();
        assert_eq!(b.size(2), 5);
        assert_eq!(b.size(6), 5);
    }
}
