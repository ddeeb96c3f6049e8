//! The periodic Jacobi instance and its spectrum-preserving transforms.
//!
//! A `p`-periodic Jacobi operator acts on `l^2(Z)` as
//! `(Jy)_n = a_{n-1} y_{n-1} + b_n y_n + a_n y_{n+1}` with `a_{n+p} = a_n`,
//! `b_{n+p} = b_n` and every `a_n > 0`. Storage is 0-based: `a[n]` couples
//! sites `n` and `n + 1`, and `a[p - 1]` closes the period.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A validated `p`-periodic Jacobi matrix `J(a, b)`.
///
/// Immutable after construction. Constant sequences are accepted as
/// `p`-periodic; the minimal period is not enforced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawInstance", into = "RawInstance")]
pub struct PeriodicJacobi {
    a: Vec<f64>,
    b: Vec<f64>,
}

/// JSON wire shape `{"a": [...], "b": [...]}`.
#[derive(Serialize, Deserialize)]
struct RawInstance {
    a: Vec<f64>,
    b: Vec<f64>,
}

impl TryFrom<RawInstance> for PeriodicJacobi {
    type Error = Error;

    fn try_from(raw: RawInstance) -> Result<Self> {
        PeriodicJacobi::new(raw.a, raw.b)
    }
}

impl From<PeriodicJacobi> for RawInstance {
    fn from(j: PeriodicJacobi) -> Self {
        RawInstance { a: j.a, b: j.b }
    }
}

impl PeriodicJacobi {
    /// Validates and builds an instance from one period of couplings `a`
    /// and diagonal entries `b`.
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::LengthMismatch { a: a.len(), b: b.len() });
        }
        if a.len() < 2 {
            return Err(Error::PeriodTooSmall(a.len()));
        }
        for (index, &value) in a.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite { name: "a", index });
            }
            if value <= 0.0 {
                return Err(Error::NonPositiveCoupling { index, value });
            }
        }
        if let Some(index) = b.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { name: "b", index });
        }
        Ok(Self { a, b })
    }

    /// The constant instance `a = 1`, `b = 0` viewed as `p`-periodic.
    pub fn free(p: usize) -> Result<Self> {
        Self::new(vec![1.0; p], vec![0.0; p])
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("instance serialization cannot fail")
    }

    #[inline]
    pub fn period(&self) -> usize {
        self.a.len()
    }

    #[inline]
    pub fn a(&self) -> &[f64] {
        &self.a
    }

    #[inline]
    pub fn b(&self) -> &[f64] {
        &self.b
    }

    /// Coupling `a_n` for any integer site index (wraps modulo `p`).
    #[inline]
    pub fn coupling(&self, n: isize) -> f64 {
        self.a[n.rem_euclid(self.period() as isize) as usize]
    }

    /// Diagonal `b_n` for any integer site index (wraps modulo `p`).
    #[inline]
    pub fn diagonal(&self, n: isize) -> f64 {
        self.b[n.rem_euclid(self.period() as isize) as usize]
    }

    pub fn min_a(&self) -> f64 {
        self.a.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_a(&self) -> f64 {
        self.a.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_b(&self) -> f64 {
        self.b.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_b(&self) -> f64 {
        self.b.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Geometric mean `(a_0 ... a_{p-1})^{1/p}`, evaluated in log space.
    pub fn geometric_mean_a(&self) -> f64 {
        let mean_log = self.a.iter().map(|v| v.ln()).sum::<f64>() / self.period() as f64;
        mean_log.exp()
    }

    /// `J + t I`: moves every diagonal entry by `t`, leaving couplings alone.
    pub fn shift(&self, t: f64) -> Self {
        Self { a: self.a.clone(), b: self.b.iter().map(|v| v + t).collect() }
    }

    /// `s J` for `s > 0`.
    pub fn scale(&self, s: f64) -> Result<Self> {
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::NonPositiveScale(s));
        }
        Self::new(self.a.iter().map(|v| v * s).collect(), self.b.iter().map(|v| v * s).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_constant_and_theorem_family() {
        let j = PeriodicJacobi::new(vec![1.0, 1.0], vec![0.0, 0.0]).unwrap();
        assert_eq!(j.period(), 2);
        let j = PeriodicJacobi::new(vec![1.0, 1.0, 1.0, 0.9], vec![0.0; 4]).unwrap();
        assert_eq!(j.period(), 4);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(
            PeriodicJacobi::new(vec![1.0, -1.0], vec![0.0, 0.0]),
            Err(Error::NonPositiveCoupling { index: 1, value: -1.0 })
        );
        assert!(matches!(
            PeriodicJacobi::new(vec![1.0, 0.0], vec![0.0, 0.0]),
            Err(Error::NonPositiveCoupling { index: 1, .. })
        ));
        assert_eq!(PeriodicJacobi::new(vec![1.0, 1.0], vec![0.0]), Err(Error::LengthMismatch { a: 2, b: 1 }));
        assert_eq!(PeriodicJacobi::new(vec![1.0], vec![0.0]), Err(Error::PeriodTooSmall(1)));
        assert_eq!(PeriodicJacobi::new(vec![], vec![]), Err(Error::PeriodTooSmall(0)));
        assert_eq!(
            PeriodicJacobi::new(vec![1.0, f64::NAN], vec![0.0, 0.0]),
            Err(Error::NonFinite { name: "a", index: 1 })
        );
        assert_eq!(
            PeriodicJacobi::new(vec![1.0, 1.0], vec![f64::INFINITY, 0.0]),
            Err(Error::NonFinite { name: "b", index: 0 })
        );
    }

    #[test]
    fn shift_examples() {
        let j = PeriodicJacobi::new(vec![1.0, 1.0], vec![0.0, 0.0]).unwrap();
        assert_eq!(j.shift(5.0).b(), &[5.0, 5.0]);
        let j = PeriodicJacobi::new(vec![1.0, 2.0], vec![0.0, 1.0]).unwrap();
        let s = j.shift(-1.0);
        assert_eq!(s.b(), &[-1.0, 0.0]);
        assert_eq!(s.a(), j.a());
    }

    #[test]
    fn scale_examples() {
        let j = PeriodicJacobi::new(vec![1.0, 1.0], vec![0.0, 0.0]).unwrap();
        assert_eq!(j.scale(2.0).unwrap().a(), &[2.0, 2.0]);
        assert_eq!(j.scale(1.0).unwrap(), j);
        assert_eq!(j.scale(0.0), Err(Error::NonPositiveScale(0.0)));
        assert_eq!(j.scale(-3.0), Err(Error::NonPositiveScale(-3.0)));
    }

    #[test]
    fn wraparound_indexing() {
        let j = PeriodicJacobi::new(vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]).unwrap();
        assert_eq!(j.coupling(-1), 3.0);
        assert_eq!(j.coupling(3), 1.0);
        assert_eq!(j.diagonal(-4), 6.0);
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let j = PeriodicJacobi::new(vec![0.1, 1.0 / 3.0, 2e-300], vec![-7.25, 1e300, 0.0]).unwrap();
        let text = j.to_json();
        let back = PeriodicJacobi::from_json(&text).unwrap();
        for (x, y) in j.a().iter().chain(j.b()).zip(back.a().iter().chain(back.b())) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }

    #[test]
    fn json_validation_applies() {
        assert!(matches!(PeriodicJacobi::from_json(r#"{"a":[1,-1],"b":[0,0]}"#), Err(Error::Json(_))));
        let j = PeriodicJacobi::from_json(r#"{"a":[1,2],"b":[0,0]}"#).unwrap();
        assert_eq!(j.a(), &[1.0, 2.0]);
    }
}
