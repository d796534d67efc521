use super::point::LatticePoint;
use super::scalar::{Rational, Scalar};
use crate::error::{budget, invalid, Error, Result};
use std::collections::{BTreeMap, HashMap};
use std::io::{BufRead, Write};

/// Default cap on `#supp(a) * #supp(b)` for a single convolution.
pub const DEFAULT_MAX_PAIRS: u128 = 200_000_000;

/// A finitely supported function on ℤ^d. Zero values are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMeasure<S: Scalar> {
    dim: usize,
    entries: BTreeMap<LatticePoint, S>,
    provenance: String,
}

/// Norms and support data. `l2` is always a float; `l2_sq` is exact for exact scalars.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct MeasureStats<S: Scalar> {
    pub l1: S,
    pub l2_sq: S,
    pub l2: f64,
    pub linf: S,
    pub linf_punctured: S,
    pub support_size: usize,
    pub support_radius: u64,
}

impl<S: Scalar> SparseMeasure<S> {
    pub fn zero(dim: usize, provenance: impl Into<String>) -> Self {
        assert!(dim >= 1);
        Self { dim, entries: BTreeMap::new(), provenance: provenance.into() }
    }

    pub fn delta(at: LatticePoint, value: S, provenance: impl Into<String>) -> Self {
        let mut m = Self::zero(at.dim(), provenance);
        if !value.is_zero() {
            m.entries.insert(at, value);
        }
        m
    }

    /// Builds a measure from `(point, value)` pairs, summing repeats.
    pub fn from_entries(
        dim: usize,
        items: impl IntoIterator<Item = (LatticePoint, S)>,
        provenance: impl Into<String>,
    ) -> Result<Self> {
        let mut m = Self::zero(dim, provenance);
        for (p, v) in items {
            m.add_at(p, &v)?;
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn with_provenance(mut self, provenance: impl Into<String>) -> Self {
        self.provenance = provenance.into();
        self
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, p: &LatticePoint) -> S {
        self.entries.get(p).cloned().unwrap_or_else(S::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&LatticePoint, &S)> {
        self.entries.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &LatticePoint> {
        self.entries.keys()
    }

    /// Adds `v` at `p`, dropping the entry if it cancels to zero.
    pub fn add_at(&mut self, p: LatticePoint, v: &S) -> Result<()> {
        if p.dim() != self.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: p.dim() });
        }
        if v.is_zero() {
            return Ok(());
        }
        match self.entries.get_mut(&p) {
            Some(cur) => {
                let s = cur.add_checked(v)?;
                if s.is_zero() {
                    self.entries.remove(&p);
                } else {
                    *cur = s;
                }
            }
            None => {
                self.entries.insert(p, v.clone());
            }
        }
        Ok(())
    }

    fn check_dim(&self, o: &Self) -> Result<()> {
        if self.dim != o.dim {
            Err(Error::DimensionMismatch { left: self.dim, right: o.dim })
        } else {
            Ok(())
        }
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check_dim(o)?;
        let mut out = self.clone();
        for (p, v) in &o.entries {
            out.add_at(p.clone(), v)?;
        }
        Ok(out)
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.check_dim(o)?;
        let mut out = self.clone();
        for (p, v) in &o.entries {
            out.add_at(p.clone(), &v.neg())?;
        }
        Ok(out)
    }

    pub fn scale(&self, c: &S) -> Result<Self> {
        let mut out = Self::zero(self.dim, self.provenance.clone());
        for (p, v) in &self.entries {
            let w = v.mul_checked(c)?;
            if !w.is_zero() {
                out.entries.insert(p.clone(), w);
            }
        }
        Ok(out)
    }

    /// `ã(x) = a(−x)`.
    pub fn reflect(&self) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|(p, v)| (p.neg(), v.clone())).collect(),
            provenance: format!("reflect({})", self.provenance),
        }
    }

    pub fn total_mass(&self) -> Result<S> {
        let mut s = S::zero();
        for v in self.entries.values() {
            s = s.add_checked(v)?;
        }
        Ok(s)
    }

    /// `(a∗b)(x) = Σ_y a(y) b(x−y)`, with the default pair budget.
    pub fn convolve(&self, o: &Self) -> Result<Self> {
        self.convolve_with_budget(o, DEFAULT_MAX_PAIRS)
    }

    pub fn convolve_with_budget(&self, o: &Self, max_pairs: u128) -> Result<Self> {
        self.check_dim(o)?;
        budget("lattice.convolve", max_pairs, self.len() as u128 * o.len() as u128)?;
        // Inputs are walked in key order, so each output cell accumulates its
        // terms in a fixed order and float results are reproducible.
        let mut acc: HashMap<LatticePoint, S> = HashMap::with_capacity(self.len() + o.len());
        for (y, ay) in &self.entries {
            for (z, bz) in &o.entries {
                let prod = ay.mul_checked(bz)?;
                let x = y.add(z);
                match acc.get_mut(&x) {
                    Some(cur) => *cur = cur.add_checked(&prod)?,
                    None => {
                        acc.insert(x, prod);
                    }
                }
            }
        }
        Ok(Self {
            dim: self.dim,
            entries: acc.into_iter().filter(|(_, v)| !v.is_zero()).collect(),
            provenance: format!("({})*({})", self.provenance, o.provenance),
        })
    }

    pub fn stats(&self) -> Result<MeasureStats<S>> {
        let mut l1 = S::zero();
        let mut l2_sq = S::zero();
        let mut linf = S::zero();
        let mut linf_p = S::zero();
        let mut radius = 0u64;
        for (p, v) in &self.entries {
            let a = v.abs();
            l1 = l1.add_checked(&a)?;
            l2_sq = l2_sq.add_checked(&v.mul_checked(v)?)?;
            if a > linf {
                linf = a.clone();
            }
            if !p.is_origin() && a > linf_p {
                linf_p = a;
            }
            radius = radius.max(p.norm());
        }
        Ok(MeasureStats {
            l2: l2_sq.to_f64().sqrt(),
            l1,
            l2_sq,
            linf,
            linf_punctured: linf_p,
            support_size: self.entries.len(),
            support_radius: radius,
        })
    }

    pub fn map_values<T: Scalar>(&self, f: impl Fn(&S) -> T) -> SparseMeasure<T> {
        SparseMeasure {
            dim: self.dim,
            entries: self.entries.iter().map(|(p, v)| (p.clone(), f(v))).filter(|(_, v)| !v.is_zero()).collect(),
            provenance: self.provenance.clone(),
        }
    }

    pub fn to_f64(&self) -> SparseMeasure<f64> {
        self.map_values(|v| v.to_f64())
    }

    /// Restriction to the points where `keep` holds.
    pub fn restrict(&self, keep: impl Fn(&LatticePoint) -> bool) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().filter(|(p, _)| keep(p)).map(|(p, v)| (p.clone(), v.clone())).collect(),
            provenance: self.provenance.clone(),
        }
    }

    /// Componentwise bounding box of the support, `None` when empty.
    pub fn bounding_box(&self) -> Option<(Vec<i64>, Vec<i64>)> {
        let mut it = self.entries.keys();
        let first = it.next()?;
        let mut lo = first.coords().to_vec();
        let mut hi = lo.clone();
        for p in it {
            for (i, &c) in p.coords().iter().enumerate() {
                lo[i] = lo[i].min(c);
                hi[i] = hi[i].max(c);
            }
        }
        Some((lo, hi))
    }

    /// One JSON object per line: `{"pt":[..],"num":..,"den":..}` (exact) or `{"pt":[..],"val":..}`.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<()> {
        for (p, v) in &self.entries {
            let mut obj = serde_json::Map::new();
            obj.insert("pt".into(), serde_json::json!(p.coords()));
            v.to_json(&mut obj);
            serde_json::to_writer(&mut w, &obj)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn read_jsonl<R: BufRead>(r: R, provenance: impl Into<String>) -> Result<Self> {
        let mut items = Vec::new();
        let mut dim = None;
        for line in r.lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let obj: serde_json::Map<String, serde_json::Value> = serde_json::from_str(&line)?;
            let pt: Vec<i64> =
                serde_json::from_value(obj.get("pt").cloned().ok_or_else(|| invalid("missing field `pt`"))?)?;
            if pt.is_empty() {
                return Err(invalid("empty point"));
            }
            match dim {
                None => dim = Some(pt.len()),
                Some(d) if d != pt.len() => return Err(Error::DimensionMismatch { left: d, right: pt.len() }),
                _ => {}
            }
            items.push((LatticePoint::new(&pt), S::from_json(&obj)?));
        }
        let dim = dim.ok_or_else(|| invalid("empty measure file has no dimension"))?;
        Self::from_entries(dim, items, provenance)
    }
}

impl SparseMeasure<Rational> {
    /// Exact conversion of a float measure whose values are dyadic rationals.
    pub fn try_from_f64(m: &SparseMeasure<f64>) -> Result<Self> {
        let mut out = Self::zero(m.dim, m.provenance.clone());
        for (p, v) in m.iter() {
            let r = dyadic(*v).ok_or(Error::Overflow { context: "float to rational" })?;
            out.add_at(p.clone(), &r)?;
        }
        Ok(out)
    }
}

/// Exact value of a finite float as `m·2^e`, when it fits `i128`.
fn dyadic(v: f64) -> Option<Rational> {
    use num_traits::float::FloatCore;
    if !v.is_finite() {
        return None;
    }
    let (m, e, sign) = FloatCore::integer_decode(v);
    let m = sign as i128 * m as i128;
    if e >= 0 {
        m.checked_mul(1i128.checked_shl(e as u32).filter(|_| e < 64)?).map(Rational::from_integer)
    } else if -e <= 126 {
        Some(Rational::new(m, 1i128 << (-e)))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::scalar::rat;

    fn d1(items: &[(i64, Rational)]) -> SparseMeasure<Rational> {
        SparseMeasure::from_entries(1, items.iter().map(|(p, v)| (LatticePoint::from([*p]), *v)), "t").unwrap()
    }

    #[test]
    fn delta_identity_and_translation() {
        let e = SparseMeasure::delta(LatticePoint::from([0, 0]), rat(1, 1), "e");
        assert_eq!(e.convolve(&e).unwrap().iter().count(), 1);
        let u = SparseMeasure::delta(LatticePoint::from([1, 2]), rat(1, 1), "u");
        let v = SparseMeasure::delta(LatticePoint::from([3, -1]), rat(1, 1), "v");
        let w = u.convolve(&v).unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(w.get(&LatticePoint::from([4, 1])), rat(1, 1));
    }

    #[test]
    fn two_point_average_squared() {
        let a = d1(&[(0, rat(1, 2)), (1, rat(1, 2))]);
        let c = a.convolve(&a).unwrap();
        assert_eq!(c, d1(&[(0, rat(1, 4)), (1, rat(1, 2)), (2, rat(1, 4))]).with_provenance(c.provenance()));
    }

    #[test]
    fn stats_of_dipole() {
        let a = SparseMeasure::from_entries(
            2,
            [(LatticePoint::from([0, 0]), rat(1, 1)), (LatticePoint::from([1, 0]), rat(-1, 1))],
            "t",
        )
        .unwrap();
        let s = a.stats().unwrap();
        assert_eq!(s.l1, rat(2, 1));
        assert_eq!(s.l2_sq, rat(2, 1));
        assert!((s.l2 - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(s.linf_punctured, rat(1, 1));
        assert_eq!(s.support_size, 2);
        let delta = SparseMeasure::delta(LatticePoint::from([0]), rat(1, 1), "d").stats().unwrap();
        assert_eq!((delta.l1, delta.linf, delta.linf_punctured), (rat(1, 1), rat(1, 1), rat(0, 1)));
    }

    #[test]
    fn cancellation_drops_entries() {
        let a = d1(&[(0, rat(1, 1)), (0, rat(-1, 1))]);
        assert!(a.is_empty());
    }

    #[test]
    fn overflow_is_reported() {
        let big = d1(&[(0, rat(i128::MAX / 2, 1))]);
        assert!(matches!(big.convolve(&big), Err(Error::Overflow { .. })));
    }

    #[test]
    fn dimension_mismatch() {
        let a = SparseMeasure::delta(LatticePoint::from([0]), rat(1, 1), "a");
        let b = SparseMeasure::delta(LatticePoint::from([0, 0]), rat(1, 1), "b");
        assert!(matches!(a.convolve(&b), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn budget_guard() {
        let a = d1(&[(0, rat(1, 1)), (1, rat(1, 1))]);
        assert!(matches!(a.convolve_with_budget(&a, 3), Err(Error::Budget { .. })));
    }

    #[test]
    fn dyadic_floats_convert_exactly() {
        assert_eq!(dyadic(0.375), Some(rat(3, 8)));
        assert_eq!(dyadic(-6.0), Some(rat(-6, 1)));
        assert_eq!(dyadic(f64::NAN), None);
    }

    #[test]
    fn jsonl_round_trip() {
        let a = d1(&[(-3, rat(2, 7)), (5, rat(-1, 3))]);
        let mut buf = Vec::new();
        a.write_jsonl(&mut buf).unwrap();
        let line = String::from_utf8(buf.clone()).unwrap();
        assert!(line.starts_with("{\"pt\":[-3],\"num\":2,\"den\":7}"));
        let b = SparseMeasure::<Rational>::read_jsonl(&buf[..], "t").unwrap();
        assert_eq!(a, b);
    }
}
