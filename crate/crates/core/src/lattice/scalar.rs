use crate::error::{Error, Result};
use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, Signed, ToPrimitive, Zero};
use std::fmt::Debug;

/// Exact rational scalar. Overflow of the `i128` parts is an error, never a wrap.
pub type Rational = Ratio<i128>;

/// Values a [`SparseMeasure`](super::SparseMeasure) may carry.
pub trait Scalar: Clone + PartialOrd + Debug + serde::Serialize + Send + Sync + 'static {
    /// True for exact arithmetic.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add_checked(&self, o: &Self) -> Result<Self>;
    fn sub_checked(&self, o: &Self) -> Result<Self>;
    fn mul_checked(&self, o: &Self) -> Result<Self>;
    fn neg(&self) -> Self;
    fn abs(&self) -> Self;
    fn to_f64(&self) -> f64;
    fn from_i64(v: i64) -> Self;

    fn to_json(&self, obj: &mut serde_json::Map<String, serde_json::Value>);
    fn from_json(obj: &serde_json::Map<String, serde_json::Value>) -> Result<Self>;
}

fn overflow(context: &'static str) -> Error {
    Error::Overflow { context }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        Ratio::from_integer(1)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_checked(&self, o: &Self) -> Result<Self> {
        self.checked_add(o).ok_or_else(|| overflow("rational add"))
    }
    fn sub_checked(&self, o: &Self) -> Result<Self> {
        self.checked_sub(o).ok_or_else(|| overflow("rational sub"))
    }
    fn mul_checked(&self, o: &Self) -> Result<Self> {
        self.checked_mul(o).ok_or_else(|| overflow("rational mul"))
    }
    fn neg(&self) -> Self {
        -*self
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn from_i64(v: i64) -> Self {
        Ratio::from_integer(v as i128)
    }
    fn to_json(&self, obj: &mut serde_json::Map<String, serde_json::Value>) {
        obj.insert("num".into(), int_json(*self.numer()));
        obj.insert("den".into(), int_json(*self.denom()));
    }
    fn from_json(obj: &serde_json::Map<String, serde_json::Value>) -> Result<Self> {
        let get = |k: &str| -> Result<i128> {
            obj.get(k)
                .and_then(|v| v.as_i64().map(i128::from).or_else(|| v.as_str()?.parse().ok()))
                .ok_or_else(|| Error::InvalidParameter(format!("missing integer field `{k}`")))
        };
        let den = get("den")?;
        if den == 0 {
            return Err(Error::InvalidParameter("zero denominator".into()));
        }
        Ok(Ratio::new(get("num")?, den))
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn add_checked(&self, o: &Self) -> Result<Self> {
        finite(self + o)
    }
    fn sub_checked(&self, o: &Self) -> Result<Self> {
        finite(self - o)
    }
    fn mul_checked(&self, o: &Self) -> Result<Self> {
        finite(self * o)
    }
    fn neg(&self) -> Self {
        -self
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn to_json(&self, obj: &mut serde_json::Map<String, serde_json::Value>) {
        obj.insert("val".into(), serde_json::json!(self));
    }
    fn from_json(obj: &serde_json::Map<String, serde_json::Value>) -> Result<Self> {
        obj.get("val")
            .and_then(|v| v.as_f64())
            .or_else(|| {
                let n = obj.get("num")?.as_f64()?;
                let d = obj.get("den")?.as_f64()?;
                Some(n / d)
            })
            .ok_or_else(|| Error::InvalidParameter("missing field `val`".into()))
    }
}

/// JSON numbers for values that fit `i64`, decimal strings beyond that.
fn int_json(v: i128) -> serde_json::Value {
    match i64::try_from(v) {
        Ok(x) => serde_json::json!(x),
        Err(_) => serde_json::Value::String(v.to_string()),
    }
}

fn finite(v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(overflow("float arithmetic"))
    }
}

/// Shorthand for `n/d`.
pub fn rat(n: i128, d: i128) -> Rational {
    Ratio::new(n, d)
}
