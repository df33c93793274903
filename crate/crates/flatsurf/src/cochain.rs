//! Real 1-cochains on triangulation edges.
//!
//! A `Cochain1` stores one value per dart with reversal antisymmetry and
//! satisfies closure (zero sum around every triangle), so it represents a
//! class in H^1(S, Σ; R). Since every vertex of our triangulations is a
//! labelled singularity, a closed cochain determines its class uniquely.

use crate::error::{Error, Result};
use crate::num::Scalar;
use crate::surface::{Dart, TranslationSurface, Triangulation};

#[derive(Clone, Debug, PartialEq)]
pub struct Cochain1<S> {
    values: Vec<S>,
}

impl<S: Scalar> Cochain1<S> {
    /// Validates antisymmetry and triangle closure against `tri`.
    pub fn new(tri: &Triangulation, values: Vec<S>, scale: f64) -> Result<Self> {
        if values.len() != tri.num_darts() {
            return Err(Error::InvalidSurface("cochain length mismatch".into()));
        }
        for d in 0..values.len() {
            let r = values[d].clone() + values[tri.twin[d]].clone();
            if !r.near_zero(scale) {
                return Err(Error::ClosureViolation(format!(
                    "cochain not antisymmetric at dart {d}"
                )));
            }
        }
        for (t, tr) in tri.triangles.iter().enumerate() {
            let s = values[tr[0]].clone() + values[tr[1]].clone() + values[tr[2]].clone();
            if !s.near_zero(scale) {
                return Err(Error::ClosureViolation(format!(
                    "cochain does not close around triangle {t}"
                )));
            }
        }
        Ok(Cochain1 { values })
    }

    /// Builds from values on canonical darts, filling reversals by negation.
    pub fn from_canonical<F: Fn(Dart) -> S>(tri: &Triangulation, f: F, scale: f64) -> Result<Self> {
        let mut values = vec![S::zero(); tri.num_darts()];
        for d in 0..tri.num_darts() {
            if d <= tri.twin[d] {
                let v = f(d);
                values[tri.twin[d]] = -v.clone();
                values[d] = v;
            }
        }
        Cochain1::new(tri, values, scale)
    }

    pub fn zero(tri: &Triangulation) -> Self {
        Cochain1 {
            values: vec![S::zero(); tri.num_darts()],
        }
    }

    pub fn value(&self, d: Dart) -> &S {
        &self.values[d]
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    /// Evaluation on an integer edge chain.
    pub fn eval_chain(&self, chain: &[(Dart, i64)]) -> S {
        let mut acc = S::zero();
        for &(d, c) in chain {
            acc += self.values[d].clone() * S::from_int(c);
        }
        acc
    }

    pub fn add(&self, o: &Self) -> Self {
        Cochain1 {
            values: self
                .values
                .iter()
                .zip(&o.values)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Cochain1 {
            values: self
                .values
                .iter()
                .zip(&o.values)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        }
    }

    pub fn scale(&self, s: &S) -> Self {
        Cochain1 {
            values: self.values.iter().map(|v| v.clone() * s.clone()).collect(),
        }
    }

    pub fn is_zero(&self, scale: f64) -> bool {
        self.values.iter().all(|v| v.near_zero(scale))
    }

    pub fn max_abs(&self) -> f64 {
        self.values
            .iter()
            .map(|v| v.to_f64().abs())
            .fold(0.0, f64::max)
    }

    pub fn map<T: Scalar, F: Fn(&S) -> T>(&self, f: F) -> Cochain1<T> {
        Cochain1 {
            values: self.values.iter().map(f).collect(),
        }
    }

    /// Unchecked constructor for internal use where closure is structural.
    pub(crate) fn from_raw(values: Vec<S>) -> Self {
        Cochain1 { values }
    }
}

/// The x-part of the holonomy as a cochain (hol^(x)).
pub fn hol_x<S: Scalar>(q: &TranslationSurface<S>) -> Cochain1<S> {
    Cochain1::from_raw((0..q.tri.num_darts()).map(|d| q.hol(d).x.clone()).collect())
}

/// The y-part of the holonomy as a cochain (hol^(y)).
pub fn hol_y<S: Scalar>(q: &TranslationSurface<S>) -> Cochain1<S> {
    Cochain1::from_raw((0..q.tri.num_darts()).map(|d| q.hol(d).y.clone()).collect())
}

/// Cup-product evaluation (alpha ∪ beta)[S] for closed cochains, computed
/// as the orientation-averaged corner sum over all triangles:
/// (1/6) Σ_T Σ_cyc [alpha(e_i) beta(e_{i+1}) − alpha(e_{i+1}) beta(e_i)].
///
/// For alpha = hol^(x), beta = hol^(y) this evaluates to the area.
pub fn cup<S: Scalar>(tri: &Triangulation, alpha: &Cochain1<S>, beta: &Cochain1<S>) -> S {
    let mut acc = S::zero();
    for t in &tri.triangles {
        for i in 0..3 {
            let a = alpha.value(t[i]).clone();
            let b = beta.value(t[(i + 1) % 3]).clone();
            let c = alpha.value(t[(i + 1) % 3]).clone();
            let d = beta.value(t[i]).clone();
            acc += a * b - c * d;
        }
    }
    acc * S::from_ratio(1, 6)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::Rat;
    use crate::surface::fixtures::square_torus_exact;

    #[test]
    fn cup_of_holonomy_parts_is_area() {
        let q = square_torus_exact();
        let x = hol_x(&q);
        let y = hol_y(&q);
        assert_eq!(cup(&q.tri, &x, &y), crate::num::rat_int(1));
        assert_eq!(cup(&q.tri, &y, &x), crate::num::rat_int(-1));
        assert_eq!(cup(&q.tri, &x, &x), crate::num::rat_int(0));
    }

    #[test]
    fn closure_enforced() {
        let q = square_torus_exact();
        let mut vals = vec![crate::num::rat_int(0); q.tri.num_darts()];
        vals[0] = crate::num::rat_int(1);
        vals[q.tri.twin[0]] = crate::num::rat_int(-1);
        assert!(Cochain1::new(&q.tri, vals, 1.0).is_err());
    }
}
