//! Brute-force reference computations used to cross-check the fast paths.
//! Everything here is deliberately naive.

use crate::lattice::{rat, LatticePoint, Rational, SparseMeasure};
use std::collections::BTreeSet;
use std::f64::consts::TAU;

/// `Σ_y a(y) b(x − y)` by scanning every pair.
pub fn convolution_at(a: &SparseMeasure<Rational>, b: &SparseMeasure<Rational>, x: &LatticePoint) -> Rational {
    let mut s = rat(0, 1);
    for (y, va) in a.iter() {
        for (z, vb) in b.iter() {
            if &y.add(z) == x {
                s += va * vb;
            }
        }
    }
    s
}

/// `Σ_{y,z,w : y+z+w = x} a(y) b(z) c(w)`.
pub fn triple_convolution_at(
    a: &SparseMeasure<Rational>,
    b: &SparseMeasure<Rational>,
    c: &SparseMeasure<Rational>,
    x: &LatticePoint,
) -> Rational {
    let mut s = rat(0, 1);
    for (y, va) in a.iter() {
        for (z, vb) in b.iter() {
            let yz = y.add(z);
            for (w, vc) in c.iter() {
                if &yz.add(w) == x {
                    s += va * vb * vc;
                }
            }
        }
    }
    s
}

/// Every point reachable as `y + z + w` with `y, z, w` in the three supports.
pub fn triple_support(
    a: &SparseMeasure<Rational>,
    b: &SparseMeasure<Rational>,
    c: &SparseMeasure<Rational>,
) -> BTreeSet<LatticePoint> {
    let mut out = BTreeSet::new();
    for y in a.support() {
        for z in b.support() {
            for w in c.support() {
                out.insert(y.add(z).add(w));
            }
        }
    }
    out
}

/// `max_{θ ≠ 0} |p^{−1} Σ_j e((θ₁j + θ₂j²)/p)|`, summed term by term.
pub fn quadratic_sum_max(p: u64) -> f64 {
    let mut best = 0.0f64;
    for t1 in 0..p {
        for t2 in 0..p {
            if t1 == 0 && t2 == 0 {
                continue;
            }
            let (mut re, mut im) = (0.0, 0.0);
            for j in 0..p {
                let ph = ((t1 * j + t2 * j * j) % p) as f64 / p as f64;
                re += (TAU * ph).cos();
                im += (TAU * ph).sin();
            }
            best = best.max(re.hypot(im) / p as f64);
        }
    }
    best
}

/// `#{(x, y) ∈ ℤ² : |x| + |y| ≤ n}` by scanning the square.
pub fn l1_ball_count(n: i64) -> u64 {
    let mut c = 0;
    for x in -n..=n {
        for y in -n..=n {
            if x.abs() + y.abs() <= n {
                c += 1;
            }
        }
    }
    c
}

/// `#{(r, s) : r, s ≥ 1, rs ≤ n}` by scanning pairs.
pub fn product_pairs(n: u64) -> u64 {
    let mut c = 0;
    for r in 1..=n {
        for s in 1..=n {
            if r * s <= n {
                c += 1;
            }
        }
    }
    c
}

/// `F − F` for a finite subset of ℤ^d.
pub fn difference_set(f: &[LatticePoint]) -> BTreeSet<LatticePoint> {
    f.iter().flat_map(|a| f.iter().map(move |b| a.sub(b))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(l1_ball_count(2), 13);
        assert_eq!(product_pairs(4), 8);
        assert!((quadratic_sum_max(7) - 7f64.powf(-0.5)).abs() < 1e-12);
        let f: Vec<LatticePoint> = [0i64, 1, 3].iter().map(|&x| LatticePoint::from([x])).collect();
        assert_eq!(difference_set(&f).len(), 7);
    }

    #[test]
    fn convolution_of_deltas() {
        let a = SparseMeasure::delta(LatticePoint::from([1]), rat(2, 1), "a");
        let b = SparseMeasure::delta(LatticePoint::from([3]), rat(1, 3), "b");
        assert_eq!(convolution_at(&a, &b, &LatticePoint::from([4])), rat(2, 3));
        assert_eq!(triple_convolution_at(&a, &b, &a, &LatticePoint::from([5])), rat(4, 3));
    }
}
