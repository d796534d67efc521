//! Exact self-correlations `ν_j∗ν̃_j` of the random companions.
//!
//! The speckled companion is `a(1_S − p·1_shell)` with `S` the selected set.
//! Expanding gives `a²[R(x) − p(A(x) + A(−x)) + p²·O(x)]` where `R` counts
//! differences inside `S`, `A(x) = #{y ∈ S : y − x ∈ shell}` and `O` is the
//! shell self-overlap. `R` is accumulated by a pair loop over `S` only; `A`
//! comes from prefix sums and `O` from interval lengths.

use super::dense::{box_filter, odometer, ols_slope, overlap_1d, Grid};
use super::speckled::{sample_speckled, SpeckledConfig, SpeckledSample};
use crate::error::{budget, Result};
use crate::lattice::{LatticePoint, SparseMeasure};
use serde::{Deserialize, Serialize};

/// Half-grid cells a single speckled profile may allocate.
pub const SPECKLED_MAX_CELLS: u128 = 1 << 28;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub seed: u64,
    pub j: u32,
    pub at0: f64,
    /// `‖ν_j‖₂²` from the closed form; must agree with `at0`.
    pub l2_sq: f64,
    pub sup_punctured: f64,
    pub argmax: Vec<i64>,
    /// `r_j`.
    pub support_size: usize,
    /// `R_j`.
    pub support_radius: u64,
    pub degenerate: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CancellationProfile {
    pub seed: u64,
    pub rows: Vec<ProfileRow>,
    /// Least-squares slope of `log₂ sup_punctured` against `j`, degenerate rows excluded.
    pub slope: Option<f64>,
    /// `max/min` over `j` of `at0 / 2^{(γ−d)j}`.
    pub origin_ratio_spread: Option<f64>,
}

struct Layout {
    l1: i64,
    l0: i64,
    grid: Grid,
    codes: Vec<i64>,
}

fn layout(s: &SpeckledSample) -> Layout {
    let l1 = (1i64 << (s.j + 1)) - 1;
    let grid = Grid::new(s.d, 2 * l1);
    let codes = s.points.iter().map(|p| grid.code(p.coords())).collect();
    Layout { l1, l0: (1i64 << s.j) - 1, grid, codes }
}

/// Difference counts for lexicographically positive `x`, indexed by `code(x) − 1`.
///
/// Pairs are visited by first-coordinate offset so that each pass writes into
/// one slab of the table.
fn positive_differences(lay: &Layout, points: &[LatticePoint], max_cells: u128) -> Result<Vec<u32>> {
    let half = (lay.grid.cells() / 2) as usize;
    budget("random.speckled_profile", max_cells, half as u128)?;
    let mut r = vec![0u32; half];
    let codes = &lay.codes;
    let l1 = lay.l1;
    let width = (2 * l1 + 1) as usize;
    let mut rows = vec![0usize; width + 1];
    for p in points {
        rows[(p.coords()[0] + l1) as usize + 1] += 1;
    }
    for i in 0..width {
        rows[i + 1] += rows[i];
    }
    for i in 0..width {
        let row = &codes[rows[i]..rows[i + 1]];
        for (a, &ca) in row.iter().enumerate() {
            for &cb in &row[a + 1..] {
                r[(cb - ca - 1) as usize] += 1;
            }
        }
    }
    for dx in 1..width {
        for i in 0..width - dx {
            let lower = &codes[rows[i]..rows[i + 1]];
            let upper = &codes[rows[i + dx]..rows[i + dx + 1]];
            for &ca in lower {
                let base = ca + 1;
                for &cb in upper {
                    r[(cb - base) as usize] += 1;
                }
            }
        }
    }
    Ok(r)
}

/// `#{y ∈ S : y − x ∈ shell}` for every `x` of the grid.
fn shifted_shell_counts(lay: &Layout, max_cells: u128) -> Result<Vec<i32>> {
    let cells = lay.grid.cells();
    budget("random.speckled_profile", max_cells, cells)?;
    let center = lay.grid.center();
    let mut outer = vec![0i32; cells as usize];
    for &c in &lay.codes {
        outer[(c + center) as usize] += 1;
    }
    let mut inner = outer.clone();
    box_filter(&lay.grid, &mut outer, lay.l1);
    if lay.l0 >= 0 {
        box_filter(&lay.grid, &mut inner, lay.l0);
        for (o, i) in outer.iter_mut().zip(&inner) {
            *o -= i;
        }
    }
    Ok(outer)
}

/// Visits `(x, ν∗ν̃(x))` for `x = 0` and every lexicographically positive `x`
/// in the difference cube. The correlation is even, so this is all of it.
fn scan_speckled(s: &SpeckledSample, max_cells: u128, mut visit: impl FnMut(&[i64], f64)) -> Result<()> {
    let lay = layout(s);
    let r = positive_differences(&lay, &s.points, max_cells)?;
    let shifted = shifted_shell_counts(&lay, max_cells)?;
    let (a, p) = (s.height(), s.probability());
    let a2 = a * a;
    let k = s.points.len() as f64;
    let shell = s.shell_size() as f64;
    visit(&vec![0; s.d], a2 * (k - 2.0 * p * k + p * p * shell));

    // per-axis interval overlaps; the shell overlap is an alternating sum of products
    let h = lay.grid.h;
    let table = |la: i64, lb: i64| -> Vec<i64> { (-h..=h).map(|x| overlap_1d(la, lb, x)).collect() };
    let (l1, l0) = (lay.l1, lay.l0);
    let tables = [table(l1, l1), table(l1, l0), table(l0, l1), table(l0, l0)];
    let signs = [1i64, -1, -1, if l0 >= 0 { 1 } else { 0 }];

    let last = shifted.len() - 1;
    let center = lay.grid.center() as usize;
    let mut x = vec![0i64; s.d];
    let mut idx = 0usize;
    while odometer(&mut x, h) {
        let mut ov = 0i64;
        for (t, sign) in tables.iter().zip(signs) {
            ov += sign * x.iter().map(|&xi| t[(xi + h) as usize]).product::<i64>();
        }
        let w = if ov == 0 {
            // disjoint shifted shells also force R = A = 0
            0.0
        } else {
            let f = center + 1 + idx;
            let am = shifted[f] + shifted[last - f];
            a2 * (r[idx] as f64 - p * am as f64 + p * p * ov as f64)
        };
        visit(&x, w);
        idx += 1;
    }
    Ok(())
}

/// The full correlation `ν_j∗ν̃_j` as a sparse measure (both halves, zeros dropped).
pub fn speckled_correlation(s: &SpeckledSample) -> Result<SparseMeasure<f64>> {
    let mut items = Vec::new();
    scan_speckled(s, SPECKLED_MAX_CELLS, |x, w| {
        if w != 0.0 {
            items.push((LatticePoint::new(x), w));
            if x.iter().any(|&c| c != 0) {
                items.push((x.iter().map(|c| -c).collect::<Vec<_>>().into(), w));
            }
        }
    })?;
    SparseMeasure::from_entries(s.d, items, format!("speckled.autocorrelation[j={}]", s.j))
}

pub fn speckled_profile_row(s: &SpeckledSample, max_cells: u128) -> Result<ProfileRow> {
    let mut at0 = 0.0;
    let mut sup = 0.0f64;
    let mut argmax = vec![0; s.d];
    let mut first = true;
    scan_speckled(s, max_cells, |x, w| {
        if first {
            at0 = w;
            first = false;
        } else if w.abs() > sup {
            sup = w.abs();
            argmax.copy_from_slice(x);
        }
    })?;
    Ok(ProfileRow {
        seed: s.seed,
        j: s.j,
        at0,
        l2_sq: s.nu_l2_sq(),
        sup_punctured: sup,
        argmax,
        support_size: s.points.len(),
        support_radius: s.points.iter().map(|p| p.norm()).max().unwrap_or(0),
        degenerate: s.points.is_empty(),
    })
}

fn fit(rows: &[ProfileRow]) -> Option<f64> {
    let live: Vec<&ProfileRow> = rows.iter().filter(|r| !r.degenerate && r.sup_punctured > 0.0).collect();
    let xs: Vec<f64> = live.iter().map(|r| r.j as f64).collect();
    let ys: Vec<f64> = live.iter().map(|r| r.sup_punctured.log2()).collect();
    ols_slope(&xs, &ys)
}

pub(crate) fn spread(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    (lo > 0.0 && lo.is_finite()).then(|| hi / lo)
}

/// Profiles `cfg.jmin..=cfg.jmax` for one seed.
pub fn speckled_profile(cfg: &SpeckledConfig, max_cells: u128) -> Result<CancellationProfile> {
    cfg.validate()?;
    let mut rows = Vec::new();
    for j in cfg.jmin..=cfg.jmax {
        let s = sample_speckled(cfg, j)?;
        rows.push(speckled_profile_row(&s, max_cells)?);
    }
    let d = cfg.d as f64;
    let origin_ratio_spread =
        spread(rows.iter().filter(|r| !r.degenerate).map(|r| r.at0 / ((cfg.gamma - d) * r.j as f64).exp2()));
    Ok(CancellationProfile { seed: cfg.seed, slope: fit(&rows), rows, origin_ratio_spread })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(d: usize, gamma: f64, seed: u64, j: u32) -> SpeckledSample {
        let cfg = SpeckledConfig { d, gamma, seed, jmin: 0, jmax: j };
        sample_speckled(&cfg, j).unwrap()
    }

    #[test]
    fn matches_direct_convolution() {
        for (d, gamma, j) in [(1, 0.5, 0), (1, 0.5, 4), (2, 0.8, 0), (2, 0.8, 1), (2, 0.8, 3), (3, 1.5, 1)] {
            for seed in 0..3 {
                let s = sample(d, gamma, seed, j);
                let nu = s.nu().unwrap();
                let direct = nu.convolve(&nu.reflect()).unwrap();
                let fast = speckled_correlation(&s).unwrap();
                let scale = direct.get(&vec![0i64; d].into()).abs().max(1e-300);
                for (x, v) in direct.iter() {
                    assert!((fast.get(x) - v).abs() <= 1e-12 * scale, "{d} {j} {x:?}");
                }
                for (x, v) in fast.iter() {
                    assert!((direct.get(x) - v).abs() <= 1e-12 * scale);
                }
            }
        }
    }

    #[test]
    fn origin_is_l2_norm() {
        for seed in 0..5 {
            let s = sample(2, 0.8, seed, 5);
            let row = speckled_profile_row(&s, SPECKLED_MAX_CELLS).unwrap();
            assert!((row.at0 - row.l2_sq).abs() <= 1e-12 * row.l2_sq);
            assert!(row.sup_punctured < row.at0);
        }
    }

    #[test]
    fn profile_is_deterministic() {
        let cfg = SpeckledConfig { d: 2, gamma: 0.8, seed: 4, jmin: 3, jmax: 6 };
        let a = speckled_profile(&cfg, SPECKLED_MAX_CELLS).unwrap();
        let b = speckled_profile(&cfg, SPECKLED_MAX_CELLS).unwrap();
        assert_eq!(a, b);
        assert!(a.slope.unwrap() < 0.0);
    }

    #[test]
    fn budget_refuses_large_grids() {
        let s = sample(2, 1.9, 0, 6);
        assert!(speckled_profile_row(&s, 1000).is_err());
    }
}
