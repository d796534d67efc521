use super::ball::WordBall;
use super::model::GroupModel;
use crate::error::{invalid, Result};
use crate::lattice::LatticePoint;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// `β_{j,M}` over index blocks `[2^j, 2^{j+1})` (1-based) and the thinning it drives.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapProfile {
    pub model: String,
    pub m_grid: Vec<u32>,
    /// `beta[j][i] = β_{j, m_grid[i]}`.
    pub beta: Vec<Vec<f64>>,
    /// Whether index block `j` lies entirely inside the sequence.
    pub complete: Vec<bool>,
    /// Chosen `M_j`.
    pub schedule: Vec<u32>,
    pub budget: f64,
    /// Running `Σ_{i≤j} β_{i,M_i}`.
    pub spent: Vec<f64>,
    /// 1-based indices `n_k` of the thinned sequence.
    #[serde(skip)]
    pub kept: Vec<usize>,
    /// `min_{m<n} ρ(g_n, g_m)` capped at `max(m_grid)`, index `n − 1`.
    #[serde(skip)]
    pub min_gap: Vec<u32>,
}

fn block_of(n: usize) -> usize {
    (usize::BITS - 1 - n.leading_zeros()) as usize
}

/// `min_{m<n} ρ(g_n, g_m)`, capped at `cap`, for every `n`.
pub fn min_gaps(model: &GroupModel, seq: &[LatticePoint], cap: u32) -> Result<Vec<u32>> {
    if cap == 0 {
        return Err(invalid("gap cap must be positive"));
    }
    if let Some(lens) = seq.iter().map(|g| model.word_length(g)).collect::<Option<Vec<u32>>>() {
        if lens.windows(2).any(|w| w[0] > w[1]) {
            return Err(invalid("sequence must be ordered by nondecreasing word length"));
        }
    }
    let ball = WordBall::new(model, cap - 1)?;
    let index: HashMap<&LatticePoint, usize> = seq.iter().enumerate().map(|(i, g)| (g, i)).collect();
    if index.len() != seq.len() {
        return Err(invalid("sequence has repeated elements"));
    }
    Ok(seq
        .iter()
        .enumerate()
        .map(|(n, g)| {
            // ρ(g_n, g_m) = |b| for g_m = b⁻¹g_n; BFS order visits b by length
            ball.elements
                .iter()
                .skip(1)
                .find(|b| index.get(&model.mul(&model.inv(b), g)).is_some_and(|&m| m < n))
                .map_or(cap, |b| ball.length(b).expect("ball member"))
        })
        .collect())
}

/// Profiles `β_{j,M}` and thins greedily: `M_j` is the largest grid value keeping
/// `Σ_{i≤j} β_{i,M_i} ≤ budget·(1 − 2^{−(j+1)})`.
pub fn gap_profile_and_thin(
    model: &GroupModel,
    seq: &[LatticePoint],
    m_grid: &[u32],
    budget: f64,
) -> Result<GapProfile> {
    if m_grid.is_empty() || m_grid.windows(2).any(|w| w[0] >= w[1]) || m_grid[0] == 0 {
        return Err(invalid("M grid must be positive and strictly increasing"));
    }
    if seq.is_empty() {
        return Err(invalid("empty sequence"));
    }
    let cap = *m_grid.last().unwrap();
    let gaps = min_gaps(model, seq, cap)?;
    let blocks = block_of(seq.len()) + 1;
    let mut beta = vec![vec![0.0; m_grid.len()]; blocks];
    for (i, &g) in gaps.iter().enumerate() {
        let j = block_of(i + 1);
        for (k, &m) in m_grid.iter().enumerate() {
            if g < m {
                beta[j][k] += 1.0;
            }
        }
    }
    for (j, row) in beta.iter_mut().enumerate() {
        for v in row.iter_mut() {
            *v /= (1u64 << j) as f64;
        }
    }
    let complete = (0..blocks).map(|j| seq.len() >= (1usize << (j + 1)) - 1).collect();
    let (mut schedule, mut spent) = (Vec::new(), Vec::new());
    let mut total = 0.0;
    for (j, row) in beta.iter().enumerate() {
        let allowance = budget * (1.0 - (-((j + 1) as f64)).exp2());
        let pick = (0..m_grid.len()).rev().find(|&k| total + row[k] <= allowance).unwrap_or(0);
        total += row[pick];
        schedule.push(m_grid[pick]);
        spent.push(total);
    }
    let kept = (1..=seq.len()).filter(|&n| gaps[n - 1] >= schedule[block_of(n)]).collect();
    Ok(GapProfile {
        model: model.name(),
        m_grid: m_grid.to_vec(),
        beta,
        complete,
        schedule,
        budget,
        spent,
        kept,
        min_gap: gaps,
    })
}

impl GapProfile {
    /// `n_k / k`.
    pub fn index_ratio(&self, k: usize) -> Option<f64> {
        (k >= 1).then(|| self.kept.get(k - 1).map(|&n| n as f64 / k as f64)).flatten()
    }

    pub fn beta_at(&self, j: usize, m: u32) -> Option<f64> {
        let i = self.m_grid.iter().position(|&x| x == m)?;
        self.beta.get(j).map(|r| r[i])
    }

    /// Recomputes gaps on the thinned sequence: every kept `n` in block `j` is at
    /// distance `≥ M_j` from every earlier kept element.
    pub fn verify_thinned(&self, model: &GroupModel, seq: &[LatticePoint]) -> Result<bool> {
        let thinned: Vec<LatticePoint> = self.kept.iter().map(|&n| seq[n - 1].clone()).collect();
        let cap = *self.m_grid.last().unwrap();
        let gaps = min_gaps(model, &thinned, cap)?;
        Ok(self.kept.iter().zip(&gaps).all(|(&n, &g)| g >= self.schedule[block_of(n)]))
    }
}

/// `{Σ_{i∈I} 3^i}` in increasing order, starting from 1.
pub fn cantor_sequence(count: usize) -> Vec<LatticePoint> {
    (1..=count as u64)
        .map(|n| {
            let (mut x, mut p, mut m) = (0i64, 1i64, n);
            while m > 0 {
                x += (m & 1) as i64 * p;
                p *= 3;
                m >>= 1;
            }
            LatticePoint::from([x])
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BanachEstimate {
    pub n: u32,
    pub ball_size: usize,
    /// Largest sampled `#{b ∈ 𝔸^N : gb ∈ F}/#𝔸^N`. A lower bound for the sup over all `g`.
    pub lower_bound: f64,
    pub argmax: LatticePoint,
    pub shifts: usize,
}

/// Sampled Banach-density ratio at radius `N`.
pub fn banach_density_estimate(
    ball: &WordBall,
    n: u32,
    member: impl Fn(&LatticePoint) -> bool,
    shifts: &[LatticePoint],
) -> Result<BanachEstimate> {
    if n > ball.radius || shifts.is_empty() {
        return Err(invalid("need N within the ball and at least one shift"));
    }
    let inner = ball.within(n);
    let mut best = (-1.0, shifts[0].clone());
    for g in shifts {
        let hits = inner.iter().filter(|b| member(&ball.model.mul(g, b))).count();
        let r = hits as f64 / inner.len() as f64;
        if r > best.0 {
            best = (r, g.clone());
        }
    }
    Ok(BanachEstimate { n, ball_size: inner.len(), lower_bound: best.0, argmax: best.1, shifts: shifts.len() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn progression_has_no_collisions() {
        let z = GroupModel::Lattice { d: 1 };
        let seq: Vec<LatticePoint> = (1..200).map(|n| LatticePoint::from([5 * n])).collect();
        let prof = gap_profile_and_thin(&z, &seq, &[1, 3, 5], 0.1).unwrap();
        assert!(prof.beta.iter().all(|r| r[..3].iter().all(|&b| b == 0.0)));
        assert_eq!(prof.kept.len(), seq.len());
        assert_eq!(prof.schedule.iter().max(), Some(&5));
    }

    #[test]
    fn cantor_set_is_flagged() {
        let z = GroupModel::Lattice { d: 1 };
        let seq = cantor_sequence((1 << 10) - 1);
        assert_eq!(seq[..5].iter().map(|p| p.coords()[0]).collect::<Vec<_>>(), vec![1, 3, 4, 9, 10]);
        let prof = gap_profile_and_thin(&z, &seq, &[1, 2, 4], 0.1).unwrap();
        for j in 1..10 {
            assert_eq!(prof.beta_at(j, 2), Some(0.5));
        }
        assert!(prof.verify_thinned(&z, &seq).unwrap());
    }

    #[test]
    fn beta_monotone_in_m_and_gaps_direct() {
        let z = GroupModel::Lattice { d: 2 };
        let seq: Vec<LatticePoint> =
            [[1, 0], [0, 1], [2, 1], [-3, 0], [0, -4], [4, 1]].into_iter().map(LatticePoint::from).collect();
        let gaps = min_gaps(&z, &seq, 10).unwrap();
        for (n, g) in seq.iter().enumerate() {
            let direct = seq[..n].iter().map(|h| g.sub(h).l1_norm() as u32).min().unwrap_or(10).min(10);
            assert_eq!(gaps[n], direct);
        }
        let prof = gap_profile_and_thin(&z, &seq, &[1, 2, 3, 6], 0.5).unwrap();
        assert!(prof.beta.iter().all(|r| r.windows(2).all(|w| w[0] <= w[1])));
        let unordered = vec![LatticePoint::from([5, 0]), LatticePoint::from([1, 0])];
        assert!(min_gaps(&z, &unordered, 3).is_err());
    }

    #[test]
    fn banach_of_everything_is_one() {
        let ball = WordBall::new(&GroupModel::Heisenberg, 4).unwrap();
        let e = banach_density_estimate(&ball, 3, |_| true, &ball.elements[..10]).unwrap();
        assert_eq!(e.lower_bound, 1.0);
    }
}
