//! The SL(2,R) action in period coordinates, the truncated sup-norm
//! Finsler metric, and the deviation inequalities for nearby orbits.

use crate::cochain::Cochain1;
use crate::error::{Error, Result};
use crate::geom::{Mat2, Vec2};
use crate::num::Scalar;
use crate::saddle::{enumerate_saddle_connections, SaddleConnection};
use crate::surface::TranslationSurface;

/// Post-composes every chart with `g`: each edge holonomy becomes g·hol(e).
pub fn apply_matrix<S: Scalar>(
    q: &TranslationSurface<S>,
    g: &Mat2<S>,
) -> Result<TranslationSurface<S>> {
    if !g.det().is_positive() {
        return Err(Error::OrientationViolation(
            "matrix determinant is not positive".into(),
        ));
    }
    q.map_holonomy(|_, v| g.apply(v))
}

/// R^2-valued cochain: a tangent vector in period coordinates.
#[derive(Clone, Debug)]
pub struct TangentCochain<S> {
    pub x: Cochain1<S>,
    pub y: Cochain1<S>,
}

impl<S: Scalar> TangentCochain<S> {
    pub fn horizontal(x: Cochain1<S>) -> Self {
        let y = x.map(|_| S::zero());
        TangentCochain { x, y }
    }

    fn eval(&self, chain: &[(usize, i64)]) -> Vec2<f64> {
        Vec2::new(
            self.x.eval_chain(chain).to_f64(),
            self.y.eval_chain(chain).to_f64(),
        )
    }
}

/// Truncated sup-norm of a tangent cochain at `q`: the sup of
/// ||beta(sigma)|| / l(sigma) over saddle connections of length <= l_max.
///
/// This is a monotone-in-`l_max` lower bound of the true sup-norm.
pub fn sup_norm<S: Scalar>(
    q: &TranslationSurface<S>,
    beta: &TangentCochain<S>,
    l_max: f64,
) -> (f64, Option<SaddleConnection<S>>) {
    let conns = enumerate_saddle_connections(q, l_max, None);
    sup_norm_over(&conns, beta)
}

/// Same sup over an explicit connection set (used to keep truncation
/// consistent across compared surfaces).
pub fn sup_norm_over<S: Scalar>(
    conns: &[SaddleConnection<S>],
    beta: &TangentCochain<S>,
) -> (f64, Option<SaddleConnection<S>>) {
    let mut best = 0.0;
    let mut attained = None;
    for c in conns {
        let len = c.length();
        if len == 0.0 {
            continue;
        }
        let chain: Vec<(usize, i64)> = c.chain.iter().map(|&d| (d, 1)).collect();
        let v = beta.eval(&chain).norm() / len;
        if v > best {
            best = v;
            attained = Some(c.clone());
        }
    }
    (best, attained)
}

/// Default truncation: five times the diameter estimate.
pub fn default_l_max<S: Scalar>(q: &TranslationSurface<S>) -> f64 {
    5.0 * q.diameter_estimate()
}

/// A parametrized family of surfaces with tangent cochains, for path-length
/// estimates.
pub trait SurfacePath<S: Scalar> {
    fn at(&self, t: f64) -> TranslationSurface<S>;
    fn tangent(&self, t: f64) -> TangentCochain<S>;
}

/// Straight segment in period coordinates between two surfaces on a common
/// triangulation.
pub struct LinearPath<'a, S: Scalar> {
    pub from: &'a TranslationSurface<S>,
    pub to: &'a TranslationSurface<S>,
}

impl<'a, S: Scalar> SurfacePath<S> for LinearPath<'a, S> {
    fn at(&self, t: f64) -> TranslationSurface<S> {
        let t = S::from_f64(t);
        self.from
            .map_holonomy(|d, v| {
                let w = self.to.hol(d);
                Vec2::new(
                    v.x.clone() + (w.x.clone() - v.x.clone()) * t.clone(),
                    v.y.clone() + (w.y.clone() - v.y.clone()) * t.clone(),
                )
            })
            .expect("interpolants of validated surfaces on a common chart")
    }

    fn tangent(&self, _t: f64) -> TangentCochain<S> {
        let x = Cochain1::from_raw(
            (0..self.from.tri.num_darts())
                .map(|d| self.to.hol(d).x.clone() - self.from.hol(d).x.clone())
                .collect(),
        );
        let y = Cochain1::from_raw(
            (0..self.from.tri.num_darts())
                .map(|d| self.to.hol(d).y.clone() - self.from.hol(d).y.clone())
                .collect(),
        );
        TangentCochain { x, y }
    }
}

/// Riemann-sum upper estimate of the path length in the truncated sup-norm
/// metric. Truncation length adapts to each sample surface.
pub fn dist_upper<S: Scalar, P: SurfacePath<S>>(path: &P, n_steps: usize) -> f64 {
    assert!(n_steps > 0);
    let mut total = 0.0;
    for i in 0..n_steps {
        // right endpoint sampling; callers treat the result as an estimate
        let t = (i as f64 + 0.5) / n_steps as f64;
        let q = path.at(t);
        let beta = path.tangent(t);
        let (v, _) = sup_norm(&q, &beta, default_l_max(&q));
        total += v / n_steps as f64;
    }
    total
}

/// One row of the deviation report.
#[derive(Clone, Debug)]
pub struct DeviationRow {
    pub kind: &'static str,
    pub parameter: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

/// Report of the horocycle/geodesic deviation inequalities on a grid.
#[derive(Clone, Debug, Default)]
pub struct DeviationReport {
    pub rows: Vec<DeviationRow>,
}

impl DeviationReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("kind,s_or_t,lhs,rhs,pass\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{:.17e},{:.17e},{}\n",
                r.kind, r.parameter, r.lhs, r.rhs, r.pass
            ));
        }
        s
    }
}

/// Verifies the quadratic horocycle bound and the exponential geodesic
/// bound between two nearby surfaces on a common triangulation.
///
/// Truncation is kept consistent: the saddle connections are enumerated on
/// the base surface once and their images under the group element are used
/// on the displaced side.
pub fn deviation_check(
    q0: &TranslationSurface<f64>,
    q1: &TranslationSurface<f64>,
    s_grid: &[f64],
    t_grid: &[f64],
) -> Result<DeviationReport> {
    if q0.tri.triangles != q1.tri.triangles {
        return Err(Error::InvalidSurface(
            "deviation check needs a common triangulation".into(),
        ));
    }
    let mut report = DeviationReport::default();
    let l_max = default_l_max(q0);
    let conns = enumerate_saddle_connections(q0, l_max, None);
    let base = path_sup_estimate(q0, q1, &conns, 16);

    for &s in s_grid {
        let g = Mat2::horocycle(s);
        let factor = 1.0 + (s * s + s.abs() * (s * s + 4.0).sqrt()) / 2.0;
        let lhs = displaced_sup_estimate(q0, q1, &conns, &g, 16);
        let rhs = factor * base;
        report.rows.push(DeviationRow {
            kind: "horocycle",
            parameter: s,
            lhs,
            rhs,
            pass: lhs <= rhs * (1.0 + 1e-9) + 1e-15,
        });
    }
    for &t in t_grid {
        let g = Mat2::geodesic(t);
        let factor = (2.0 * t.abs()).exp();
        let lhs = displaced_sup_estimate(q0, q1, &conns, &g, 16);
        let rhs = factor * base;
        report.rows.push(DeviationRow {
            kind: "geodesic",
            parameter: t,
            lhs,
            rhs,
            pass: lhs <= rhs * (1.0 + 1e-9) + 1e-15,
        });
    }
    Ok(report)
}

fn path_sup_estimate(
    q0: &TranslationSurface<f64>,
    q1: &TranslationSurface<f64>,
    conns: &[SaddleConnection<f64>],
    n_steps: usize,
) -> f64 {
    let path = LinearPath { from: q0, to: q1 };
    let beta = path.tangent(0.0);
    let mut total = 0.0;
    for i in 0..n_steps {
        let t = (i as f64 + 0.5) / n_steps as f64;
        let q = path.at(t);
        // evaluate the fixed connection set on the interpolated surface
        let mut best: f64 = 0.0;
        for c in conns {
            let chain: Vec<(usize, i64)> = c.chain.iter().map(|&d| (d, 1)).collect();
            let num = beta.eval(&chain).norm();
            let len = chain_length(&q, &chain);
            if len > 0.0 {
                best = best.max(num / len);
            }
        }
        total += best / n_steps as f64;
    }
    total
}

fn displaced_sup_estimate(
    q0: &TranslationSurface<f64>,
    q1: &TranslationSurface<f64>,
    conns: &[SaddleConnection<f64>],
    g: &Mat2<f64>,
    n_steps: usize,
) -> f64 {
    let g0 = apply_matrix(q0, g).expect("det 1");
    let g1 = apply_matrix(q1, g).expect("det 1");
    path_sup_estimate(&g0, &g1, conns, n_steps)
}

fn chain_length(q: &TranslationSurface<f64>, chain: &[(usize, i64)]) -> f64 {
    let mut x = 0.0;
    let mut y = 0.0;
    for &(d, c) in chain {
        x += q.hol(d).x * c as f64;
        y += q.hol(d).y * c as f64;
    }
    x.hypot(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cochain::{hol_x, hol_y};
    use crate::num::Rat;
    use crate::surface::fixtures::{square_torus_exact, square_torus_f64};

    #[test]
    fn u2_on_square_torus() {
        let q = square_torus_exact();
        let u2 = Mat2::horocycle(crate::num::rat_int(2));
        let q2 = apply_matrix(&q, &u2).unwrap();
        // a=(1,0) fixed, b=(0,1)->(2,1), d=(1,1)->(3,1)
        assert_eq!(q2.hol(0).to_f64(), crate::geom::Vec2::new(1.0, 0.0));
        assert_eq!(q2.hol(2).to_f64(), crate::geom::Vec2::new(2.0, 1.0));
        assert_eq!(q2.hol(4).to_f64(), crate::geom::Vec2::new(3.0, 1.0));
        assert_eq!(q2.area(), crate::num::rat_int(1));
    }

    #[test]
    fn geodesic_scales_components() {
        let q = square_torus_f64();
        let g = Mat2::geodesic(2f64.ln());
        let q2 = apply_matrix(&q, &g).unwrap();
        let d = q2.hol(4);
        assert!((d.x - 2.0).abs() < 1e-12 && (d.y - 0.5).abs() < 1e-12);
    }

    #[test]
    fn group_action_law() {
        let q = square_torus_f64();
        let g = Mat2::horocycle(0.7);
        let h = Mat2::geodesic(0.3);
        let lhs = apply_matrix(&apply_matrix(&q, &h).unwrap(), &g).unwrap();
        let gh = g * h;
        let rhs = apply_matrix(&q, &gh).unwrap();
        for d in 0..q.tri.num_darts() {
            assert!((lhs.hol(d).x - rhs.hol(d).x).abs() < 1e-12);
            assert!((lhs.hol(d).y - rhs.hol(d).y).abs() < 1e-12);
        }
    }

    #[test]
    fn sup_norm_of_dy_is_one_on_square_torus() {
        let q = square_torus_exact();
        let beta = TangentCochain::horizontal(hol_y(&q));
        let (v, at) = sup_norm(&q, &beta, 3.0);
        assert!((v - 1.0).abs() < 1e-12);
        // attained at a vertical connection (0, +/-1)
        let h = at.unwrap().holonomy.to_f64();
        assert_eq!(h.x, 0.0);
        assert_eq!(h.y.abs(), 1.0);
    }

    #[test]
    fn sup_norm_zero_cochain() {
        let q = square_torus_exact();
        let z = Cochain1::zero(&q.tri);
        let beta = TangentCochain::horizontal(z);
        assert_eq!(sup_norm(&q, &beta, 3.0).0, 0.0);
    }

    #[test]
    fn sup_norm_core_curve_dual() {
        // values: b -> 1, a -> 0, d -> 1; sup over the 16 connections of
        // length <= 3 is 1, attained at (0,1).
        let q = square_torus_exact();
        let mut vals = vec![<Rat as Scalar>::zero(); q.tri.num_darts()];
        for (d, v) in [(2usize, 1i64), (3, -1), (4, 1), (5, -1)] {
            vals[d] = crate::num::rat_int(v);
        }
        let c = Cochain1::new(&q.tri, vals, 1.0).unwrap();
        let beta = TangentCochain::horizontal(c);
        let (v, _) = sup_norm(&q, &beta, 3.0);
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sup_norm_monotone_in_l_max() {
        let q = square_torus_f64();
        let beta = TangentCochain::horizontal(hol_x(&q));
        let (v1, _) = sup_norm(&q, &beta, 1.5);
        let (v2, _) = sup_norm(&q, &beta, 4.0);
        assert!(v2 >= v1);
    }

    #[test]
    fn deviation_identity_pair() {
        let q = square_torus_f64();
        let report = deviation_check(&q, &q, &[-2.0, 0.0, 2.0], &[-1.0, 0.0, 1.0]).unwrap();
        assert!(report.all_pass());
        for r in &report.rows {
            assert_eq!(r.lhs, 0.0);
        }
    }
}
