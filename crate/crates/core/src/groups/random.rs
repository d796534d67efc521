use super::ball::WordBall;
use super::measure::{tt_star_norm, GroupMeasure};
use super::model::GroupModel;
use crate::error::{budget, invalid, Result};
use crate::lattice::LatticePoint;
use crate::random::ols_slope;
use crate::rng::{self, CounterRng};
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

const STREAM_GROUP: u64 = 0x6E0;

/// `P(ξ_g = 1) = ρ(g, e)^{−α}`, and 1 at the identity.
pub fn marginal_probability(length: u32, alpha: f64) -> f64 {
    if length == 0 {
        1.0
    } else {
        (length as f64).powf(-alpha)
    }
}

fn check_alpha(model: &GroupModel, alpha: f64) -> Result<()> {
    let d = model.growth_degree() as f64;
    if !(alpha > 0.0 && alpha < d) {
        return Err(invalid(format!("α must lie in (0, {d}) for {}", model.name())));
    }
    Ok(())
}

/// One scale: `μ_j = 2^{(α−d)j}ξ` on `𝔸^{2^j}`.
#[derive(Clone, Debug)]
pub struct GroupRandomSample {
    pub model: GroupModel,
    pub alpha: f64,
    pub j: u32,
    pub seed: u64,
    /// Selected elements with their word lengths, in BFS order.
    pub points: Vec<(LatticePoint, u32)>,
    /// Every element of `𝔸^{2^j}` with its length (needed for `Eμ_j`).
    ball: Vec<(LatticePoint, u32)>,
}

/// Membership of `g` in the random set `{ξ_g = 1}`, with `ρ(g, e)` read from `ball`.
pub fn group_random_contains(ball: &WordBall, alpha: f64, seed: u64, g: &LatticePoint) -> Option<bool> {
    let l = ball.length(g)?;
    Some(rng::coin(seed, STREAM_GROUP, g.coords(), marginal_probability(l, alpha)))
}

pub fn sample_group_random(ball: &WordBall, alpha: f64, j: u32, seed: u64) -> Result<GroupRandomSample> {
    check_alpha(&ball.model, alpha)?;
    let radius = 1u32 << j;
    if radius > ball.radius {
        return Err(invalid(format!("scale j={j} needs a ball of radius {radius}")));
    }
    let members: Vec<(LatticePoint, u32)> =
        ball.within(radius).iter().map(|g| (g.clone(), ball.length(g).expect("member of the ball"))).collect();
    let points = members
        .iter()
        .filter(|(g, l)| rng::coin(seed, STREAM_GROUP, g.coords(), marginal_probability(*l, alpha)))
        .cloned()
        .collect();
    Ok(GroupRandomSample { model: ball.model.clone(), alpha, j, seed, points, ball: members })
}

impl GroupRandomSample {
    /// `2^{(α−d)j}`.
    pub fn height(&self) -> f64 {
        ((self.alpha - self.model.growth_degree() as f64) * self.j as f64).exp2()
    }

    pub fn mu(&self) -> GroupMeasure {
        let h = self.height();
        GroupMeasure::new(&self.model, self.points.iter().map(|(g, _)| (g.clone(), h)))
    }

    pub fn expectation(&self) -> GroupMeasure {
        let h = self.height();
        GroupMeasure::new(
            &self.model,
            self.ball.iter().map(|(g, l)| (g.clone(), h * marginal_probability(*l, self.alpha))),
        )
    }

    pub fn nu(&self) -> GroupMeasure {
        let h = self.height();
        GroupMeasure::new(
            &self.model,
            self.ball.iter().map(|(g, l)| {
                let hit = rng::coin(self.seed, STREAM_GROUP, g.coords(), marginal_probability(*l, self.alpha));
                (g.clone(), h * (hit as i32 as f64 - marginal_probability(*l, self.alpha)))
            }),
        )
    }

    /// `r_j`.
    pub fn support_size(&self) -> usize {
        self.points.len()
    }

    /// `R_j`.
    pub fn support_radius(&self) -> u32 {
        self.points.iter().map(|(_, l)| *l).max().unwrap_or(0)
    }

    /// `Σ_g Var η_g = h² Σ P(1 − P)`.
    pub fn variance_sum(&self) -> f64 {
        let h = self.height();
        self.ball
            .iter()
            .map(|(_, l)| {
                let p = marginal_probability(*l, self.alpha);
                h * h * p * (1.0 - p)
            })
            .sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupScaleRow {
    pub j: u32,
    pub support_size: usize,
    pub support_radius: u32,
    pub mu_mass: f64,
    pub nu_mass: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupRandomProfile {
    pub model: String,
    pub alpha: f64,
    pub seed: u64,
    pub rows: Vec<GroupScaleRow>,
    /// `max_k Σ_{j≤k} r_j / r_k`, the realized constant in the support-growth hypothesis.
    pub support_growth_constant: f64,
    /// Slope of `log Σ_{𝔸^N} Eξ` on `log N` over the upper half of `1..=N`.
    pub expected_count_exponent: f64,
    pub predicted_exponent: f64,
    /// Radial profile of `Eμ_J`: mass on each word-length sphere, normalized.
    pub radial_weights: Vec<f64>,
}

pub fn group_random_profile(model: &GroupModel, alpha: f64, jmax: u32, seed: u64) -> Result<GroupRandomProfile> {
    check_alpha(model, alpha)?;
    let ball = WordBall::new(model, 1 << jmax)?;
    let mut rows = Vec::new();
    let mut last = None;
    for j in 0..=jmax {
        let s = sample_group_random(&ball, alpha, j, seed)?;
        rows.push(GroupScaleRow {
            j,
            support_size: s.support_size(),
            support_radius: s.support_radius(),
            mu_mass: s.mu().total(),
            nu_mass: s.nu().total(),
        });
        last = Some(s);
    }
    let mut acc = 0usize;
    let support_growth_constant = rows
        .iter()
        .map(|r| {
            acc += r.support_size;
            acc as f64 / r.support_size.max(1) as f64
        })
        .fold(0.0, f64::max);
    let n_max = ball.radius;
    let mut running = 0.0;
    let mut counts = Vec::new();
    for r in 0..=n_max {
        let layer = (ball.size(r) - if r == 0 { 0 } else { ball.size(r - 1) }) as f64;
        running += layer * marginal_probability(r, alpha);
        counts.push(running);
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) =
        ((n_max / 2).max(1)..=n_max).map(|n| ((n as f64).ln(), counts[n as usize].ln())).unzip();
    let last = last.expect("at least one scale");
    let e = last.expectation();
    let total = e.total();
    let mut radial = vec![0.0; (1usize << jmax) + 1];
    for (g, v) in e.iter() {
        radial[ball.length(g).expect("in ball") as usize] += v / total;
    }
    Ok(GroupRandomProfile {
        model: model.name(),
        alpha,
        seed,
        rows,
        support_growth_constant,
        expected_count_exponent: ols_slope(&xs, &ys).unwrap_or(f64::NAN),
        predicted_exponent: model.growth_degree() as f64 - alpha,
        radial_weights: radial,
    })
}

/// `max ‖ν∗φ‖₂/‖φ‖₂` over random `φ` on `𝔸^r`, with the bound `‖ν̃∗ν‖₁^{1/2}`.
pub fn op_norm_check(nu: &GroupMeasure, ball: &WordBall, r: u32, samples: usize, seed: u64) -> Result<(f64, f64)> {
    let bound = tt_star_norm(nu, 1)?.op_upper;
    let mut rng = CounterRng::new(seed, 0x0B);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let phi = GroupMeasure::new(&nu.model, ball.within(r).iter().map(|g| (g.clone(), 2.0 * rng.next_f64() - 1.0)));
        let out = nu.apply(&phi)?;
        worst = worst.max((out.l2_sq() / phi.l2_sq()).sqrt());
    }
    Ok((worst, bound))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentRow {
    pub j: u32,
    pub seeds: usize,
    /// Mean of `‖ν̃∗ν‖₂²` over seeds.
    pub mean_l2_sq: f64,
    /// `(Σ_g Var η_g)²`.
    pub variance_sum_sq: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentSweep {
    pub alpha: f64,
    pub rows: Vec<MomentRow>,
    /// `max/min` of the ratios.
    pub ratio_spread: f64,
    /// Slope of `log₂ mean` minus slope of `log₂ (ΣVar)²` against `j`.
    pub slope_gap: f64,
}

/// `‖ν̃∗ν‖₂²` on ℤ² via `(1/L²)Σ|ν̂|⁴`, zero-padded so the autocorrelation does not wrap.
fn autocorrelation_l2_sq(planner: &mut FftPlanner<f64>, radius: i64, values: impl Fn(i64, i64) -> f64) -> f64 {
    let side = (4 * radius + 1) as usize;
    let fft = planner.plan_fft_forward(side);
    let mut grid = vec![Complex64::default(); side * side];
    for x in -radius..=radius {
        let span = radius - x.abs();
        for y in -span..=span {
            let idx = x.rem_euclid(side as i64) as usize * side + y.rem_euclid(side as i64) as usize;
            grid[idx] = Complex64::new(values(x, y), 0.0);
        }
    }
    for row in grid.chunks_mut(side) {
        fft.process(row);
    }
    let mut column = vec![Complex64::default(); side];
    let mut total = 0.0;
    for c in 0..side {
        for r in 0..side {
            column[r] = grid[r * side + c];
        }
        fft.process(&mut column);
        total += column.iter().map(|v| v.norm_sqr().powi(2)).sum::<f64>();
    }
    total / (side * side) as f64
}

/// Monte Carlo of `E‖ν̃∗ν‖₂²` against `(Σ Var η_g)²` on ℤ² with `𝔸 = {0, ±e_i}`.
pub fn moment_sweep_z2(alpha: f64, js: &[u32], seeds: usize, base_seed: u64) -> Result<MomentSweep> {
    check_alpha(&GroupModel::Lattice { d: 2 }, alpha)?;
    if js.is_empty() || seeds == 0 {
        return Err(invalid("moment sweep needs scales and seeds"));
    }
    let mut planner = FftPlanner::new();
    let mut rows = Vec::new();
    for &j in js {
        let radius = 1i64 << j;
        budget("groups.moment_sweep", 1 << 24, ((4 * radius + 1) as u128).pow(2))?;
        let h = ((alpha - 2.0) * j as f64).exp2();
        let p = |x: i64, y: i64| marginal_probability((x.abs() + y.abs()) as u32, alpha);
        let mut var = 0.0;
        for x in -radius..=radius {
            let span = radius - x.abs();
            for y in -span..=span {
                var += h * h * p(x, y) * (1.0 - p(x, y));
            }
        }
        let mut sum = 0.0;
        for s in 0..seeds as u64 {
            let seed = base_seed.wrapping_add(s);
            sum += autocorrelation_l2_sq(&mut planner, radius, |x, y| {
                let hit = rng::coin(seed, STREAM_GROUP, &[x, y], p(x, y));
                h * (hit as i32 as f64 - p(x, y))
            });
        }
        let mean = sum / seeds as f64;
        rows.push(MomentRow { j, seeds, mean_l2_sq: mean, variance_sum_sq: var * var, ratio: mean / (var * var) });
    }
    let hi = rows.iter().map(|r| r.ratio).fold(f64::MIN, f64::max);
    let lo = rows.iter().map(|r| r.ratio).fold(f64::MAX, f64::min);
    let js_f: Vec<f64> = rows.iter().map(|r| r.j as f64).collect();
    let a = ols_slope(&js_f, &rows.iter().map(|r| r.mean_l2_sq.log2()).collect::<Vec<_>>());
    let b = ols_slope(&js_f, &rows.iter().map(|r| r.variance_sum_sq.log2()).collect::<Vec<_>>());
    Ok(MomentSweep {
        alpha,
        rows,
        ratio_spread: hi / lo,
        slope_gap: match (a, b) {
            (Some(a), Some(b)) => a - b,
            _ => f64::NAN,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::SpeckledConfig;

    #[test]
    fn sample_is_centered_and_deterministic() {
        let model = GroupModel::Heisenberg;
        let ball = WordBall::new(&model, 8).unwrap();
        let a = sample_group_random(&ball, 1.5, 3, 5).unwrap();
        let b = sample_group_random(&ball, 1.5, 3, 5).unwrap();
        assert_eq!(a.points, b.points);
        assert!(a.points.iter().any(|(g, _)| *g == model.identity()));
        let nu = a.nu();
        let diff = a.mu().total() - a.expectation().total();
        assert!((nu.total() - diff).abs() < 1e-9);
        assert!(sample_group_random(&ball, 4.0, 3, 5).is_err());
        assert!(sample_group_random(&ball, 1.0, 4, 5).is_err());
    }

    #[test]
    fn fft_moment_matches_exact_convolution() {
        let model = GroupModel::Lattice { d: 2 };
        let ball = WordBall::new(&model, 8).unwrap();
        let s = sample_group_random(&ball, 1.0, 3, 11).unwrap();
        let exact = tt_star_norm(&s.nu(), 1).unwrap().l2.powi(2);
        let mut planner = FftPlanner::new();
        let h = s.height();
        let fast = autocorrelation_l2_sq(&mut planner, 8, |x, y| {
            let p = marginal_probability((x.abs() + y.abs()) as u32, 1.0);
            h * (rng::coin(11, STREAM_GROUP, &[x, y], p) as i32 as f64 - p)
        });
        assert!((exact - fast).abs() <= 1e-9 * exact);
    }

    #[test]
    fn op_norm_below_tt_star_bound() {
        let model = GroupModel::Heisenberg;
        let ball = WordBall::new(&model, 4).unwrap();
        let s = sample_group_random(&ball, 2.0, 2, 3).unwrap();
        let (worst, bound) = op_norm_check(&s.nu(), &ball, 3, 10, 1).unwrap();
        assert!(worst <= bound + 1e-12);
    }

    #[test]
    fn marginals_match_speckled_on_the_axis() {
        // ρ((2^j, 0), e) = 2^j in both metrics, so ρ^{−α} = 2^{−αj}
        for j in 1..10u32 {
            let cfg = SpeckledConfig { d: 2, gamma: 0.8, seed: 0, jmin: j, jmax: j };
            assert!((marginal_probability(1 << j, 0.8) - cfg.probability(j)).abs() < 1e-15);
        }
    }
}
