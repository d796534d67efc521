use crate::error::{invalid, Result};
use crate::lattice::LatticePoint;
use crate::rng::CounterRng;
use serde::{Deserialize, Serialize};

/// Built-in finitely generated groups. Elements are integer normal forms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupModel {
    /// `ℤ^d` with `𝔸 = {0, ±e_i}`; the word metric is the `ℓ¹` norm.
    Lattice { d: usize },
    /// `ℤ^d` with `𝔸 = {−1, 0, 1}^d`; the word metric is the sup-norm.
    LatticeKing { d: usize },
    /// `H₃(ℤ)`: `(x,y,z)(x′,y′,z′) = (x+x′, y+y′, z+z′+xy′)`, `𝔸 = {e, X^{±1}, Y^{±1}}`.
    Heisenberg,
    /// `ℤ_n` with `𝔸 = {0, ±1}`.
    Cyclic { n: u64 },
}

impl GroupModel {
    /// Accepts `z1`..`z4`, `king2`, `heis3`, `cyclic:N`.
    pub fn parse(s: &str) -> Result<Self> {
        if s == "heis3" {
            return Ok(Self::Heisenberg);
        }
        if let Some(n) = s.strip_prefix("cyclic:") {
            let n: u64 = n.parse().map_err(|_| invalid(format!("bad cyclic order in {s}")))?;
            if n == 0 {
                return Err(invalid("cyclic order must be positive"));
            }
            return Ok(Self::Cyclic { n });
        }
        for (prefix, king) in [("king", true), ("z", false)] {
            if let Some(d) = s.strip_prefix(prefix).and_then(|d| d.parse::<usize>().ok()) {
                if (1..=4).contains(&d) {
                    return Ok(if king { Self::LatticeKing { d } } else { Self::Lattice { d } });
                }
            }
        }
        Err(invalid(format!("unknown group {s}; expected z1..z4, king1..king4, heis3 or cyclic:N")))
    }

    pub fn name(&self) -> String {
        match self {
            Self::Lattice { d } => format!("z{d}"),
            Self::LatticeKing { d } => format!("king{d}"),
            Self::Heisenberg => "heis3".into(),
            Self::Cyclic { n } => format!("cyclic:{n}"),
        }
    }

    /// Length of the normal form.
    pub fn rank(&self) -> usize {
        match self {
            Self::Lattice { d } | Self::LatticeKing { d } => *d,
            Self::Heisenberg => 3,
            Self::Cyclic { .. } => 1,
        }
    }

    /// Polynomial growth degree (0 for finite groups).
    pub fn growth_degree(&self) -> u32 {
        match self {
            Self::Lattice { d } | Self::LatticeKing { d } => *d as u32,
            Self::Heisenberg => 4,
            Self::Cyclic { .. } => 0,
        }
    }

    pub fn identity(&self) -> LatticePoint {
        LatticePoint::origin(self.rank())
    }

    pub fn mul(&self, a: &LatticePoint, b: &LatticePoint) -> LatticePoint {
        match self {
            Self::Lattice { .. } | Self::LatticeKing { .. } => a.add(b),
            Self::Heisenberg => {
                let (x, y) = (a.coords(), b.coords());
                LatticePoint::from([x[0] + y[0], x[1] + y[1], x[2] + y[2] + x[0] * y[1]])
            }
            Self::Cyclic { n } => LatticePoint::from([(a.coords()[0] + b.coords()[0]).rem_euclid(*n as i64)]),
        }
    }

    pub fn inv(&self, a: &LatticePoint) -> LatticePoint {
        match self {
            Self::Lattice { .. } | Self::LatticeKing { .. } => a.neg(),
            Self::Heisenberg => {
                let x = a.coords();
                LatticePoint::from([-x[0], -x[1], -x[2] + x[0] * x[1]])
            }
            Self::Cyclic { n } => LatticePoint::from([(-a.coords()[0]).rem_euclid(*n as i64)]),
        }
    }

    /// `ρ(g, e)` in closed form where one exists (not for the Heisenberg group).
    pub fn word_length(&self, g: &LatticePoint) -> Option<u32> {
        match self {
            Self::Lattice { .. } => Some(g.l1_norm() as u32),
            Self::LatticeKing { .. } => Some(g.norm() as u32),
            Self::Heisenberg => None,
            Self::Cyclic { n } => {
                let x = g.coords()[0].rem_euclid(*n as i64) as u64;
                Some(x.min(n - x) as u32)
            }
        }
    }

    /// `g^k` for `k ≥ 0`.
    pub fn pow(&self, g: &LatticePoint, k: u64) -> LatticePoint {
        (0..k).fold(self.identity(), |acc, _| self.mul(&acc, g))
    }

    /// The symmetric generating set, identity first.
    pub fn generators(&self) -> Vec<LatticePoint> {
        let r = self.rank();
        let mut out = vec![self.identity()];
        match self {
            Self::Lattice { d } => {
                for i in 0..*d {
                    for s in [1, -1] {
                        let mut g = LatticePoint::origin(r);
                        g.0[i] = s;
                        out.push(g);
                    }
                }
            }
            Self::LatticeKing { d } => {
                for code in 0..3usize.pow(*d as u32) {
                    let mut c = code;
                    let g: Vec<i64> = (0..*d)
                        .map(|_| {
                            let v = (c % 3) as i64 - 1;
                            c /= 3;
                            v
                        })
                        .collect();
                    if g.iter().any(|&v| v != 0) {
                        out.push(LatticePoint::from(g));
                    }
                }
            }
            Self::Heisenberg => {
                out.extend([[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0]].map(LatticePoint::from));
            }
            Self::Cyclic { n } => {
                for g in [1 % *n as i64, (*n as i64 - 1) % *n as i64] {
                    let g = LatticePoint::from([g]);
                    if !out.contains(&g) {
                        out.push(g);
                    }
                }
            }
        }
        out
    }

    /// Generators with printable labels (identity omitted), for Følner defects.
    pub fn labelled_generators(&self) -> Vec<(String, LatticePoint)> {
        self.generators().into_iter().skip(1).map(|g| (format!("{g:?}"), g)).collect()
    }

    /// A random word of length `len`.
    pub fn random_word(&self, rng: &mut CounterRng, len: usize) -> LatticePoint {
        let gens = self.generators();
        (0..len).fold(self.identity(), |acc, _| self.mul(&acc, &gens[rng.below(gens.len())]))
    }

    /// Associativity and inverse laws on random triples of words.
    pub fn check_laws(&self, samples: usize, word_len: usize, seed: u64) -> bool {
        let mut rng = CounterRng::new(seed, 0x6A0);
        let e = self.identity();
        (0..samples).all(|_| {
            let a = self.random_word(&mut rng, word_len);
            let b = self.random_word(&mut rng, word_len);
            let c = self.random_word(&mut rng, word_len);
            self.mul(&self.mul(&a, &b), &c) == self.mul(&a, &self.mul(&b, &c))
                && self.mul(&a, &self.inv(&a)) == e
                && self.mul(&self.inv(&a), &a) == e
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laws_hold() {
        for g in [
            GroupModel::Lattice { d: 2 },
            GroupModel::LatticeKing { d: 2 },
            GroupModel::Heisenberg,
            GroupModel::Cyclic { n: 7 },
        ] {
            assert!(g.check_laws(200, 12, 1), "{}", g.name());
            let gens = g.generators();
            assert_eq!(gens[0], g.identity());
            assert!(gens.iter().all(|x| gens.contains(&g.inv(x))));
            assert_eq!(GroupModel::parse(&g.name()).unwrap(), g);
        }
        assert!(GroupModel::parse("q7").is_err());
        assert_eq!(GroupModel::LatticeKing { d: 2 }.generators().len(), 9);
    }

    #[test]
    fn heisenberg_is_not_abelian() {
        let h = GroupModel::Heisenberg;
        let (x, y) = (LatticePoint::from([1, 0, 0]), LatticePoint::from([0, 1, 0]));
        let comm = h.mul(&h.mul(&x, &y), &h.mul(&h.inv(&x), &h.inv(&y)));
        assert_eq!(comm, LatticePoint::from([0, 0, 1]));
        assert_eq!(h.inv(&LatticePoint::from([2, 3, 5])), LatticePoint::from([-2, -3, 1]));
    }
}
