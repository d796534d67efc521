use crate::error::{budget, invalid, Result};
use crate::lattice::{shell_index, shell_size, LatticePoint, SparseMeasure};
use crate::rng;
use serde::{Deserialize, Serialize};

pub(crate) const STREAM_SPECKLED: u64 = 0x5EC;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpeckledConfig {
    pub d: usize,
    pub gamma: f64,
    pub seed: u64,
    pub jmin: u32,
    pub jmax: u32,
}

impl SpeckledConfig {
    pub fn validate(&self) -> Result<()> {
        if self.d == 0 || self.d > 4 {
            return Err(invalid("speckled sets need 1 ≤ d ≤ 4"));
        }
        if !(self.gamma >= 0.0 && self.gamma < self.d as f64) {
            return Err(invalid("speckled sets need 0 ≤ γ < d"));
        }
        if self.jmin > self.jmax || self.jmax > 30 {
            return Err(invalid("bad j-range"));
        }
        Ok(())
    }

    /// `P(ξ_n = 1) = 2^{−γj}` on shell `j`.
    pub fn probability(&self, j: u32) -> f64 {
        (-self.gamma * j as f64).exp2()
    }
}

/// The selected points of one shell. `μ_j = a·ξ` and `ν_j = a·(ξ − p)` there,
/// with `a = 2^{(γ−d)j}` and `p = 2^{−γj}`.
#[derive(Clone, Debug)]
pub struct SpeckledSample {
    pub d: usize,
    pub j: u32,
    pub gamma: f64,
    pub seed: u64,
    /// Selected points, lexicographically sorted.
    pub points: Vec<LatticePoint>,
}

/// Calls `visit` on every point of the shell `2^j ≤ |n| < 2^{j+1}` in lexicographic order.
pub(crate) fn for_each_shell_point(d: usize, j: u32, mut visit: impl FnMut(&[i64])) {
    let hi = (1i64 << (j + 1)) - 1;
    let inner = (1i64 << j) - 1;
    let mut cur = vec![-hi; d];
    loop {
        if cur.iter().any(|c| c.abs() > inner) {
            visit(&cur);
        }
        let mut i = d;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if cur[i] < hi {
                cur[i] += 1;
                break;
            }
            cur[i] = -hi;
        }
    }
}

pub(crate) fn speckled_coin(seed: u64, n: &[i64], p: f64) -> bool {
    rng::coin(seed, STREAM_SPECKLED, n, p)
}

/// Membership of a single point, consistent with [`sample_speckled`].
pub fn speckled_contains(cfg: &SpeckledConfig, n: &LatticePoint) -> bool {
    shell_index(n).is_some_and(|j| speckled_coin(cfg.seed, n.coords(), cfg.probability(j)))
}

pub fn sample_speckled(cfg: &SpeckledConfig, j: u32) -> Result<SpeckledSample> {
    cfg.validate()?;
    sample_shell(cfg.d, cfg.gamma, cfg.seed, j)
}

/// Samples one shell for any `γ ≥ 0`; `γ ≥ d` is only used for control families.
pub(crate) fn sample_shell(d: usize, gamma: f64, seed: u64, j: u32) -> Result<SpeckledSample> {
    budget("random.sample_speckled", 1 << 31, shell_size(d, j))?;
    let p = (-gamma * j as f64).exp2();
    let mut points = Vec::new();
    for_each_shell_point(d, j, |n| {
        if speckled_coin(seed, n, p) {
            points.push(LatticePoint::new(n));
        }
    });
    Ok(SpeckledSample { d, j, gamma, seed, points })
}

impl SpeckledSample {
    /// `2^{(γ−d)j}`.
    pub fn height(&self) -> f64 {
        ((self.gamma - self.d as f64) * self.j as f64).exp2()
    }

    pub fn probability(&self) -> f64 {
        (-self.gamma * self.j as f64).exp2()
    }

    pub fn shell_size(&self) -> u128 {
        shell_size(self.d, self.j)
    }

    pub fn mu(&self) -> SparseMeasure<f64> {
        let a = self.height();
        SparseMeasure::from_entries(
            self.d,
            self.points.iter().map(|p| (p.clone(), a)),
            format!("speckled.mu[j={}]", self.j),
        )
        .expect("points share the dimension")
    }

    /// `ν_j = μ_j − 2^{−dj}` on the whole shell (dense; guarded).
    pub fn nu(&self) -> Result<SparseMeasure<f64>> {
        budget("random.speckled.nu", 4_000_000, self.shell_size())?;
        let a = self.height();
        let c = (-(self.d as f64) * self.j as f64).exp2();
        let mut items = Vec::with_capacity(self.shell_size() as usize);
        let mut sel = self.points.iter().peekable();
        for_each_shell_point(self.d, self.j, |n| {
            let hit = sel.peek().is_some_and(|p| p.coords() == n);
            if hit {
                sel.next();
            }
            items.push((LatticePoint::new(n), if hit { a - c } else { -c }));
        });
        SparseMeasure::from_entries(self.d, items, format!("speckled.nu[j={}]", self.j))
    }

    /// `‖ν_j‖₂² = a²[K(1−p)² + (#shell − K)p²]`.
    pub fn nu_l2_sq(&self) -> f64 {
        let (a, p) = (self.height(), self.probability());
        let k = self.points.len() as f64;
        let rest = self.shell_size() as f64 - k;
        a * a * (k * (1.0 - p) * (1.0 - p) + rest * p * p)
    }

    pub fn expected_mass(&self) -> f64 {
        speckled_expected_mass(self.d, self.j)
    }
}

/// `E‖μ_j‖₁ = 2^{(γ−d)j}·2^{−γj}·#shell = 2^{−dj}·#shell`.
pub fn speckled_expected_mass(d: usize, j: u32) -> f64 {
    (-(d as f64) * j as f64).exp2() * shell_size(d, j) as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(seed: u64) -> SpeckledConfig {
        SpeckledConfig { d: 2, gamma: 0.8, seed, jmin: 1, jmax: 6 }
    }

    #[test]
    fn shell_walk_counts() {
        for (d, j) in [(1, 0), (1, 3), (2, 0), (2, 2), (3, 1)] {
            let mut n = 0u128;
            for_each_shell_point(d, j, |p| {
                let r = p.iter().map(|c| c.unsigned_abs()).max().unwrap();
                assert!(r >= 1 << j && r < 2 << j);
                n += 1;
            });
            assert_eq!(n, shell_size(d, j));
        }
    }

    #[test]
    fn expected_mass_tends_to_twelve() {
        assert!((speckled_expected_mass(2, 12) - 12.0).abs() < 0.01);
        assert!(speckled_expected_mass(2, 12) > speckled_expected_mass(2, 11));
        let s = sample_speckled(&cfg(1), 2).unwrap();
        assert_eq!(s.expected_mass(), 4f64.powi(-2) * ((15 * 15 - 7 * 7) as f64));
    }

    #[test]
    fn deterministic_and_shared_across_scales() {
        let a = sample_speckled(&cfg(9), 4).unwrap();
        let b = sample_speckled(&cfg(9), 4).unwrap();
        assert_eq!(a.points, b.points);
        assert!(a.points.iter().all(|p| speckled_contains(&cfg(9), p)));
        let c = sample_speckled(&cfg(10), 4).unwrap();
        assert_ne!(a.points, c.points);
        // γ = 0 selects everything
        let full = sample_speckled(&SpeckledConfig { gamma: 0.0, ..cfg(3) }, 2).unwrap();
        assert_eq!(full.points.len() as u128, shell_size(2, 2));
    }

    #[test]
    fn nu_matches_closed_forms() {
        let s = sample_speckled(&cfg(5), 3).unwrap();
        let nu = s.nu().unwrap();
        assert_eq!(nu.len() as u128, s.shell_size());
        let l2 = nu.stats().unwrap().l2_sq;
        assert!((l2 - s.nu_l2_sq()).abs() <= 1e-12 * l2);
        let mu = s.mu();
        for (p, v) in nu.iter() {
            let m = mu.get(p);
            assert!((v - (m - 2f64.powi(-6))).abs() < 1e-15);
        }
    }
}
