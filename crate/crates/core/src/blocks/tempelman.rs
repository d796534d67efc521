use crate::error::{invalid, Result};
use crate::lattice::{rat, LatticePoint, Rational};
use serde::Serialize;
use std::collections::HashSet;
use std::hash::Hash;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TempelmanReport {
    pub size: usize,
    /// `#(F⁻¹F)`.
    pub diff_size: usize,
    pub ratio: Rational,
    /// `#(gF △ F) / #F` per generator label.
    pub defects: Vec<(String, Rational)>,
}

/// Difference-set ratio and Følner defects of a finite subset of a group
/// given by its multiplication and inversion.
pub fn difference_report<E: Clone + Eq + Hash>(
    set: &[E],
    mul: impl Fn(&E, &E) -> E,
    inv: impl Fn(&E) -> E,
    generators: &[(String, E)],
) -> Result<TempelmanReport> {
    let f: HashSet<E> = set.iter().cloned().collect();
    if f.is_empty() {
        return Err(invalid("Tempelman ratio of an empty set"));
    }
    let items: Vec<&E> = f.iter().collect();
    let mut diffs: HashSet<E> = HashSet::with_capacity(items.len() * 4);
    for a in &items {
        let ai = inv(a);
        for b in &items {
            diffs.insert(mul(&ai, b));
        }
    }
    let n = f.len() as i128;
    let defects = generators
        .iter()
        .map(|(name, g)| {
            let overlap = items.iter().filter(|x| f.contains(&mul(g, x))).count() as i128;
            (name.clone(), rat(2 * (n - overlap), n))
        })
        .collect();
    Ok(TempelmanReport { size: f.len(), diff_size: diffs.len(), ratio: rat(diffs.len() as i128, n), defects })
}

/// ℤ^d version: `F⁻¹F = F − F`, generators `±e_i`.
pub fn tempelman_folner_report(set: &[LatticePoint]) -> Result<TempelmanReport> {
    let d = set.first().map_or(1, |p| p.dim());
    let mut gens = Vec::new();
    for i in 0..d {
        for s in [1i64, -1] {
            let mut e = LatticePoint::origin(d);
            e.0[i] = s;
            gens.push((format!("{}e{}", if s > 0 { "+" } else { "-" }, i + 1), e));
        }
    }
    difference_report(set, |a, b| a.add(b), |a| a.neg(), &gens)
}

/// `#(F − F)` for a finite subset of ℤ^d.
pub fn difference_count(set: &[LatticePoint]) -> usize {
    let mut diffs = HashSet::new();
    for a in set {
        for b in set {
            diffs.insert(a.sub(b));
        }
    }
    diffs.len()
}

/// `X × Y ⊂ ℤ^{d_X + d_Y}`.
pub fn product_set(x: &[LatticePoint], y: &[LatticePoint]) -> Vec<LatticePoint> {
    x.iter()
        .flat_map(|a| {
            y.iter().map(move |b| {
                let mut c = a.0.clone();
                c.extend_from_slice(b.coords());
                LatticePoint(c)
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(v: &[i64]) -> Vec<LatticePoint> {
        v.iter().map(|&x| LatticePoint::from([x])).collect()
    }

    #[test]
    fn interval_ratio() {
        for n in 1..30 {
            let f: Vec<i64> = (1..=n).collect();
            let r = tempelman_folner_report(&line(&f)).unwrap();
            assert_eq!(r.ratio, rat(2 * n as i128 - 1, n as i128));
            assert_eq!(r.defects[0].1, rat(2, n as i128));
        }
    }

    #[test]
    fn squares() {
        let f = [0i64, 1, 4, 9, 16, 25];
        let brute: HashSet<i64> = f.iter().flat_map(|a| f.iter().map(move |b| a - b)).collect();
        let r = tempelman_folner_report(&line(&f)).unwrap();
        assert_eq!(r.diff_size, brute.len());
        assert_eq!(r.diff_size, 27);
        assert_eq!(r.ratio, rat(27, 6));
    }

    #[test]
    fn product_multiplies() {
        let x = line(&[0, 2, 3]);
        let y = line(&[5, 6, 10, 11]);
        let xy = product_set(&x, &y);
        assert_eq!(difference_count(&xy), difference_count(&x) * difference_count(&y));
    }

    #[test]
    fn empty_set_is_refused() {
        assert!(tempelman_folner_report(&[]).is_err());
    }
}
