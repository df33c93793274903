//! Planar vectors and 2x2 matrices over either scalar mode.

use crate::num::Scalar;
use std::ops::{Add, Mul, Neg, Sub};

/// Holonomy vector: horizontal and vertical components of a developed edge.
#[derive(Clone, Debug, PartialEq)]
pub struct Vec2<S> {
    pub x: S,
    pub y: S,
}

impl<S: Scalar> Vec2<S> {
    pub fn new(x: S, y: S) -> Self {
        Vec2 { x, y }
    }

    pub fn zero() -> Self {
        Vec2::new(S::zero(), S::zero())
    }

    /// Cross product `self.x * o.y - self.y * o.x`; positive iff `o` lies
    /// counterclockwise from `self`.
    pub fn cross(&self, o: &Self) -> S {
        self.x.clone() * o.y.clone() - self.y.clone() * o.x.clone()
    }

    pub fn dot(&self, o: &Self) -> S {
        self.x.clone() * o.x.clone() + self.y.clone() * o.y.clone()
    }

    pub fn norm(&self) -> f64 {
        self.x.to_f64().hypot(self.y.to_f64())
    }

    pub fn to_f64(&self) -> Vec2<f64> {
        Vec2::new(self.x.to_f64(), self.y.to_f64())
    }

    pub fn scale(&self, s: &S) -> Self {
        Vec2::new(self.x.clone() * s.clone(), self.y.clone() * s.clone())
    }
}

impl Vec2<f64> {
    pub fn norm2(&self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn angle(&self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn unit(theta: f64) -> Self {
        Vec2::new(theta.cos(), theta.sin())
    }
}

impl<S: Scalar> Add for Vec2<S> {
    type Output = Vec2<S>;
    fn add(self, o: Self) -> Self {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl<S: Scalar> Sub for Vec2<S> {
    type Output = Vec2<S>;
    fn sub(self, o: Self) -> Self {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl<S: Scalar> Neg for Vec2<S> {
    type Output = Vec2<S>;
    fn neg(self) -> Self {
        Vec2::new(-self.x, -self.y)
    }
}

impl<'a, S: Scalar> Neg for &'a Vec2<S> {
    type Output = Vec2<S>;
    fn neg(self) -> Vec2<S> {
        Vec2::new(-self.x.clone(), -self.y.clone())
    }
}

/// Element of GL(2,R) acting on period coordinates; group elements are
/// checked to have determinant 1 within tolerance.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat2<S> {
    pub a: S,
    pub b: S,
    pub c: S,
    pub d: S,
}

impl<S: Scalar> Mat2<S> {
    pub fn new(a: S, b: S, c: S, d: S) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn identity() -> Self {
        Mat2::new(S::one(), S::zero(), S::zero(), S::one())
    }

    /// Horocycle element u_s = [[1, s], [0, 1]].
    pub fn horocycle(s: S) -> Self {
        Mat2::new(S::one(), s, S::zero(), S::one())
    }

    /// Diagonal element diag(a, 1/a).
    pub fn diagonal(a: S) -> Self {
        let inv = S::one() / a.clone();
        Mat2::new(a, S::zero(), S::zero(), inv)
    }

    pub fn det(&self) -> S {
        self.a.clone() * self.d.clone() - self.b.clone() * self.c.clone()
    }

    pub fn apply(&self, v: &Vec2<S>) -> Vec2<S> {
        Vec2::new(
            self.a.clone() * v.x.clone() + self.b.clone() * v.y.clone(),
            self.c.clone() * v.x.clone() + self.d.clone() * v.y.clone(),
        )
    }

    pub fn is_unimodular(&self) -> bool {
        (self.det() - S::one()).near_zero(1.0)
    }

    pub fn to_f64(&self) -> Mat2<f64> {
        Mat2::new(
            self.a.to_f64(),
            self.b.to_f64(),
            self.c.to_f64(),
            self.d.to_f64(),
        )
    }
}

impl Mat2<f64> {
    /// Geodesic element g_t = diag(e^t, e^-t).
    pub fn geodesic(t: f64) -> Self {
        Mat2::diagonal(t.exp())
    }

    /// Time-reversed geodesic element g_{-t}.
    pub fn geodesic_rev(t: f64) -> Self {
        Mat2::geodesic(-t)
    }

    /// Rotation by `theta`.
    pub fn rotation(theta: f64) -> Self {
        Mat2::new(theta.cos(), -theta.sin(), theta.sin(), theta.cos())
    }

    /// Operator norm (largest singular value).
    pub fn op_norm(&self) -> f64 {
        let t = self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d;
        let det = self.det();
        ((t + (t * t - 4.0 * det * det).max(0.0).sqrt()) / 2.0).sqrt()
    }

    pub fn inverse(&self) -> Self {
        let det = self.det();
        Mat2::new(self.d / det, -self.b / det, -self.c / det, self.a / det)
    }
}

impl<S: Scalar> Mul for Mat2<S> {
    type Output = Mat2<S>;
    fn mul(self, o: Self) -> Self {
        Mat2::new(
            self.a.clone() * o.a.clone() + self.b.clone() * o.c.clone(),
            self.a * o.b.clone() + self.b * o.d.clone(),
            self.c.clone() * o.a + self.d.clone() * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}
