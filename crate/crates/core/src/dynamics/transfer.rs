use crate::error::{invalid, Error, Result};
use crate::groups::{GroupModel, WordBall};
use crate::lattice::{rat, LatticePoint, Rational};
use num_integer::Integer;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// A rational measure on ℤ^d stored as integer weights over a common denominator.
#[derive(Clone, Debug, PartialEq)]
pub struct IntMeasure {
    pub points: Vec<(Vec<i64>, i64)>,
    pub denom: i64,
}

impl IntMeasure {
    pub fn from_rational(items: &[(LatticePoint, Rational)]) -> Result<Self> {
        let denom = items.iter().try_fold(1i128, |l, (_, v)| {
            let m = l.lcm(v.denom());
            (m <= i64::MAX as i128).then_some(m).ok_or_else(|| invalid("denominators too large"))
        })?;
        Ok(Self {
            points: items
                .iter()
                .map(|(p, v)| (p.coords().to_vec(), (v.numer() * (denom / v.denom())) as i64))
                .collect(),
            denom: denom as i64,
        })
    }

    /// Uniform probability on a finite set.
    pub fn uniform(set: &[LatticePoint]) -> Self {
        Self { points: set.iter().map(|p| (p.coords().to_vec(), 1)).collect(), denom: set.len() as i64 }
    }

    fn radius(&self) -> u64 {
        self.points.iter().map(|(p, _)| p.iter().map(|c| c.unsigned_abs()).sum::<u64>()).max().unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransferRow {
    pub lambda: String,
    /// `|{y : sup_j |A_j f(y)| > λ}| / |X|`.
    pub dynamic_density: f64,
    /// Mean over `x` of `#{h ∈ 𝔸^{K+R} : sup_j |φ_x∗μ_j(h)| > λ} / #𝔸^{K+R}`.
    pub group_density: f64,
    pub bound: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransferReport {
    pub side: u64,
    pub d: usize,
    pub k: u32,
    pub reach: u32,
    /// `#(𝔸^K + supp)/#𝔸^K`.
    pub edge_factor: f64,
    pub edge_factor_exact: String,
    pub rows: Vec<TransferRow>,
    /// Points of `𝔸^K` where the two maximal functions differ (should be none).
    pub interior_mismatches: usize,
    /// Points of `𝔸^{K+R} ∖ 𝔸^K` where the truncated group side differs, summed over `x`.
    pub boundary_mismatches: usize,
    pub all_hold: bool,
}

/// Calderón transference on `ℤ_L^d` with the coordinate shifts. For each base point `x` the
/// pullback is `φ_x(g) = f(x + g)` on `𝔸^{K+R}`, zero elsewhere; then `A_j f(x + h) = φ_x∗μ̃_j(h)`
/// for `h ∈ 𝔸^K`, and averaging over `x` gives the level-set inequality with the edge factor.
pub fn transference_check(
    side: u64,
    f: &[i64],
    family: &[IntMeasure],
    k: u32,
    lambdas: &[Rational],
) -> Result<TransferReport> {
    let d = match f.len() as u64 {
        n if n == side => 1,
        n if n == side * side => 2,
        _ => return Err(invalid("f must be a table on ℤ_L or ℤ_L²")),
    };
    if family.is_empty() || lambdas.is_empty() {
        return Err(invalid("need a family and at least one λ"));
    }
    let model = GroupModel::Lattice { d };
    let reach = family.iter().map(|m| m.radius()).max().unwrap_or(0) as u32;
    let ball = WordBall::new(&model, k + reach)?;
    let inner = ball.size(k);
    let outer = ball.size(k + reach);
    if outer > 2 * inner || 2 * (k + reach) as u64 >= side {
        return Err(Error::Refused(format!("K = {k} is too large for L = {side}: edge factor or wraparound")));
    }
    let l = side as i64;
    let index = |p: &[i64]| p.iter().fold(0usize, |acc, &c| acc * side as usize + c.rem_euclid(l) as usize);
    let cells = f.len();
    // a_j(y) = Σ_g w_j(g) f(y + g), compared as numerator/denominator pairs
    let averages = |value: &dyn Fn(&[i64]) -> Option<i64>, y: &[i64]| -> Option<Rational> {
        let mut best: Option<Rational> = None;
        for m in family {
            let mut s = 0i64;
            let mut p = vec![0i64; d];
            for (g, w) in &m.points {
                for c in 0..d {
                    p[c] = y[c] + g[c];
                }
                s += w * value(&p)?;
            }
            let v = rat(s.abs() as i128, m.denom as i128);
            best = Some(best.map_or(v, |b: Rational| b.max(v)));
        }
        best
    };
    let coords = |code: usize| -> Vec<i64> {
        let mut c = code;
        let mut out = vec![0i64; d];
        for x in out.iter_mut().rev() {
            *x = (c % side as usize) as i64;
            c /= side as usize;
        }
        out
    };
    let on_torus = |p: &[i64]| Some(f[index(p)]);
    let dynamic: Vec<Rational> = (0..cells).map(|c| averages(&on_torus, &coords(c)).expect("total")).collect();
    let position: HashMap<&LatticePoint, usize> = ball.elements.iter().enumerate().map(|(i, g)| (g, i)).collect();
    // for each h ∈ 𝔸^{K+R} and family member: ball positions of h + g (None where φ_x vanishes)
    type Links = Vec<Vec<(Option<usize>, i64)>>;
    let links: Vec<Links> = ball
        .elements
        .iter()
        .map(|h| {
            family
                .iter()
                .map(|m| {
                    m.points
                        .iter()
                        .map(|(g, w)| {
                            let p: Vec<i64> = h.coords().iter().zip(g).map(|(a, b)| a + b).collect();
                            (position.get(&LatticePoint::from(p)).copied(), *w)
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let mut group_counts = vec![0usize; lambdas.len()];
    let (mut interior_mismatches, mut boundary_mismatches) = (0, 0);
    let mut phi = vec![0i64; outer];
    for c in 0..cells {
        let x = coords(c);
        for (slot, g) in phi.iter_mut().zip(&ball.elements) {
            *slot = f[index(&x.iter().zip(g.coords()).map(|(a, b)| a + b).collect::<Vec<_>>())];
        }
        for (i, h) in ball.elements.iter().enumerate() {
            let v = links[i]
                .iter()
                .zip(family)
                .map(|(terms, m)| {
                    let s: i64 = terms.iter().map(|(at, w)| at.map_or(0, |j| w * phi[j])).sum();
                    rat(s.abs() as i128, m.denom as i128)
                })
                .max()
                .expect("nonempty family");
            let y: Vec<i64> = x.iter().zip(h.coords()).map(|(a, b)| a + b).collect();
            if v != dynamic[index(&y)] {
                if i < inner {
                    interior_mismatches += 1;
                } else {
                    boundary_mismatches += 1;
                }
            }
            for (n, lam) in lambdas.iter().enumerate() {
                if v > *lam {
                    group_counts[n] += 1;
                }
            }
        }
    }
    let edge = rat(outer as i128, inner as i128);
    let rows: Vec<TransferRow> = lambdas
        .iter()
        .zip(&group_counts)
        .map(|(lam, &count)| {
            let dyn_count = dynamic.iter().filter(|v| *v > lam).count();
            // |{Mf > λ}|/|X| ≤ (#𝔸^{K+R}/#𝔸^K) · mean_x(group count / #𝔸^{K+R}), in exact integers
            let holds = (dyn_count as u128) * inner as u128 <= count as u128;
            let group_density = count as f64 / (cells * outer) as f64;
            TransferRow {
                lambda: format!("{}/{}", lam.numer(), lam.denom()),
                dynamic_density: dyn_count as f64 / cells as f64,
                group_density,
                bound: group_density * outer as f64 / inner as f64,
                holds,
            }
        })
        .collect();
    Ok(TransferReport {
        side,
        d,
        k,
        reach,
        edge_factor: outer as f64 / inner as f64,
        edge_factor_exact: format!("{}/{}", edge.numer(), edge.denom()),
        all_hold: rows.iter().all(|r| r.holds),
        rows,
        interior_mismatches,
        boundary_mismatches,
    })
}

/// Normalized `ℓ¹` balls of the given radii in ℤ^d.
pub fn ball_family(d: usize, radii: &[u32]) -> Result<Vec<IntMeasure>> {
    let ball = WordBall::new(&GroupModel::Lattice { d }, radii.iter().copied().max().unwrap_or(0))?;
    Ok(radii.iter().map(|&r| IntMeasure::uniform(ball.within(r))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_mass_on_small_torus() {
        let side = 32u64;
        let mut f = vec![0i64; (side * side) as usize];
        f[5 * 32 + 7] = 1;
        let fam = ball_family(2, &[0, 1]).unwrap();
        let lambdas = [rat(1, 10), rat(1, 3), rat(1, 2)];
        let r = transference_check(side, &f, &fam, 4, &lambdas).unwrap();
        assert!(r.all_hold);
        assert_eq!(r.interior_mismatches, 0);
        assert_eq!(r.edge_factor_exact, "61/41");
    }

    #[test]
    fn constant_function_agrees_inside() {
        let side = 24u64;
        let f = vec![3i64; (side * side) as usize];
        let fam = ball_family(2, &[1]).unwrap();
        let r = transference_check(side, &f, &fam, 3, &[rat(2, 1)]).unwrap();
        assert_eq!(r.rows[0].dynamic_density, 1.0);
        assert_eq!(r.interior_mismatches, 0);
        assert!(r.boundary_mismatches > 0);
        assert!(r.all_hold);
    }

    #[test]
    fn refuses_large_k() {
        let f = vec![0i64; 16 * 16];
        let fam = ball_family(2, &[1]).unwrap();
        assert!(transference_check(16, &f, &fam, 8, &[rat(1, 2)]).is_err());
        assert!(
            IntMeasure::from_rational(&[(LatticePoint::from([0]), rat(1, 3)), (LatticePoint::from([1]), rat(1, 2))])
                .unwrap()
                .denom
                == 6
        );
    }
}
