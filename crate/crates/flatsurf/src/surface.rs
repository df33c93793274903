//! Triangulated translation surfaces with per-edge holonomy.
//!
//! A surface is a list of counterclockwise triangles over directed edges
//! ("darts"), a fixed-point-free gluing involution pairing each dart with
//! its reversal, and a holonomy vector per dart. Validation enforces
//! reversal antisymmetry, triangle closure, positive orientation, labelled
//! cone angles and connectivity. Surfaces are immutable after validation.

use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::num::Scalar;
use std::collections::BTreeMap;

/// Directed edge index.
pub type Dart = usize;
/// Triangle index.
pub type Tri = usize;

/// Combinatorics of a triangulated surface: triangles as dart triples plus
/// the gluing involution and labelled vertex orbits.
#[derive(Clone, Debug)]
pub struct Triangulation {
    /// Counterclockwise dart triples.
    pub triangles: Vec<[Dart; 3]>,
    /// `twin[d]` is the reversal of dart `d` on the neighboring triangle.
    pub twin: Vec<Dart>,
    /// Singularity labels, one per vertex orbit, with cone-angle orders.
    pub vertex_labels: Vec<VertexLabel>,
    tri_of: Vec<Tri>,
    pos_of: Vec<u8>,
    /// Vertex orbit id per dart (orbit = darts sharing an origin).
    vertex_of: Vec<usize>,
}

/// A labelled singularity: `order` r means total cone angle 2π(r+1).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexLabel {
    pub label: String,
    pub order: usize,
    /// Representative dart whose origin is this vertex.
    pub dart: Dart,
}

impl Triangulation {
    /// Builds and checks combinatorics: involution validity, one triangle
    /// per dart, connectivity, labelled orbits, and Σ order = 2g−2.
    pub fn new(triangles: Vec<[Dart; 3]>, twin: Vec<Dart>, labels: Vec<VertexLabel>) -> Result<Self> {
        let n = twin.len();
        let mut tri_of = vec![usize::MAX; n];
        let mut pos_of = vec![0u8; n];
        for (t, tri) in triangles.iter().enumerate() {
            for (i, &d) in tri.iter().enumerate() {
                if d >= n {
                    return Err(Error::InvalidSurface(format!("dart {d} out of range")));
                }
                if tri_of[d] != usize::MAX {
                    return Err(Error::InvalidSurface(format!("dart {d} in two triangles")));
                }
                tri_of[d] = t;
                pos_of[d] = i as u8;
            }
        }
        if let Some(d) = tri_of.iter().position(|&t| t == usize::MAX) {
            return Err(Error::InvalidSurface(format!("dart {d} not in any triangle")));
        }
        for d in 0..n {
            if twin[d] >= n || twin[twin[d]] != d || twin[d] == d {
                return Err(Error::InvalidSurface(format!(
                    "gluing is not a fixed-point-free involution at dart {d}"
                )));
            }
        }

        let mut tri = Triangulation {
            triangles,
            twin,
            vertex_labels: labels,
            tri_of,
            pos_of,
            vertex_of: Vec::new(),
        };
        tri.vertex_of = tri.compute_vertex_orbits();
        tri.check_connected()?;
        tri.check_labels()?;
        Ok(tri)
    }

    pub fn num_darts(&self) -> usize {
        self.twin.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn num_edges(&self) -> usize {
        self.num_darts() / 2
    }

    pub fn num_vertices(&self) -> usize {
        self.vertex_labels.len()
    }

    pub fn tri_of(&self, d: Dart) -> Tri {
        self.tri_of[d]
    }

    /// Next dart in the same triangle (counterclockwise).
    pub fn next(&self, d: Dart) -> Dart {
        let t = &self.triangles[self.tri_of[d]];
        t[(self.pos_of[d] as usize + 1) % 3]
    }

    /// Previous dart in the same triangle.
    pub fn prev(&self, d: Dart) -> Dart {
        let t = &self.triangles[self.tri_of[d]];
        t[(self.pos_of[d] as usize + 2) % 3]
    }

    /// Rotates `d` to the next outgoing dart around its origin.
    pub fn rot(&self, d: Dart) -> Dart {
        self.twin[self.prev(d)]
    }

    /// Vertex orbit id of the origin of `d`.
    pub fn vertex_of(&self, d: Dart) -> usize {
        self.vertex_of[d]
    }

    /// Canonical undirected-edge representative: `min(d, twin[d])`.
    pub fn canon(&self, d: Dart) -> Dart {
        d.min(self.twin[d])
    }

    /// All darts whose origin lies in orbit `v`.
    pub fn darts_at_vertex(&self, v: usize) -> Vec<Dart> {
        (0..self.num_darts()).filter(|&d| self.vertex_of[d] == v).collect()
    }

    fn compute_vertex_orbits(&self) -> Vec<usize> {
        let n = self.num_darts();
        let mut orbit = vec![usize::MAX; n];
        let mut next_id = 0;
        for d in 0..n {
            if orbit[d] != usize::MAX {
                continue;
            }
            let mut e = d;
            loop {
                orbit[e] = next_id;
                e = self.rot(e);
                if e == d {
                    break;
                }
            }
            next_id += 1;
        }
        orbit
    }

    fn check_connected(&self) -> Result<()> {
        let f = self.num_triangles();
        if f == 0 {
            return Err(Error::InvalidSurface("no triangles".into()));
        }
        let mut seen = vec![false; f];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(t) = stack.pop() {
            for &d in &self.triangles[t] {
                let u = self.tri_of[self.twin[d]];
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        if seen.iter().all(|&s| s) {
            Ok(())
        } else {
            Err(Error::Disconnected)
        }
    }

    fn check_labels(&self) -> Result<()> {
        let nv = self.vertex_of.iter().max().unwrap() + 1;
        if self.vertex_labels.len() != nv {
            return Err(Error::InvalidSurface(format!(
                "{} vertex labels for {} vertex orbits",
                self.vertex_labels.len(),
                nv
            )));
        }
        let mut seen = vec![false; nv];
        for vl in &self.vertex_labels {
            if vl.dart >= self.num_darts() {
                return Err(Error::InvalidSurface("label dart out of range".into()));
            }
            let v = self.vertex_of[vl.dart];
            if seen[v] {
                return Err(Error::InvalidSurface(format!(
                    "two labels name vertex orbit {v}"
                )));
            }
            seen[v] = true;
        }
        let orders: i64 = self.vertex_labels.iter().map(|v| v.order as i64).sum();
        let g = self.genus();
        if orders != 2 * g - 2 {
            return Err(Error::ConeAngleMismatch(format!(
                "sum of orders {orders} != 2g-2 = {}",
                2 * g - 2
            )));
        }
        Ok(())
    }

    /// Genus from the Euler characteristic V − E + F = 2 − 2g.
    pub fn genus(&self) -> i64 {
        let v = self.num_vertices() as i64;
        let e = self.num_edges() as i64;
        let f = self.num_triangles() as i64;
        (2 - (v - e + f)) / 2
    }

    /// Label record for the vertex orbit `v`.
    pub fn label_of_vertex(&self, v: usize) -> &VertexLabel {
        self.vertex_labels
            .iter()
            .find(|vl| self.vertex_of[vl.dart] == v)
            .expect("checked in construction")
    }
}

/// A validated translation surface: triangulation plus holonomy.
#[derive(Clone, Debug)]
pub struct TranslationSurface<S> {
    pub tri: Triangulation,
    hol: Vec<Vec2<S>>,
    /// Optional named triangle regions (e.g. the two tori of a slit pair).
    pub regions: BTreeMap<String, Vec<Tri>>,
}

impl<S: Scalar> TranslationSurface<S> {
    /// Validates all surface invariants, consuming holonomy for each dart.
    ///
    /// Holonomy may be given either for every dart (reversal antisymmetry is
    /// then checked) or only for canonical darts with `None` on the rest
    /// (the reversal is filled in exactly).
    pub fn new(
        tri: Triangulation,
        mut hol_in: Vec<Option<Vec2<S>>>,
        regions: BTreeMap<String, Vec<Tri>>,
    ) -> Result<Self> {
        let n = tri.num_darts();
        if hol_in.len() != n {
            return Err(Error::InvalidSurface("holonomy length mismatch".into()));
        }
        let scale = hol_in
            .iter()
            .flatten()
            .map(|v| v.to_f64().norm())
            .fold(0.0, f64::max);
        for d in 0..n {
            let t = tri.twin[d];
            match (&hol_in[d], &hol_in[t]) {
                (None, None) => {
                    return Err(Error::InvalidSurface(format!("no holonomy for edge {d}")))
                }
                (Some(v), None) => hol_in[t] = Some(-v),
                (Some(v), Some(w)) => {
                    let r = v.clone() + w.clone();
                    if !(r.x.near_zero(scale) && r.y.near_zero(scale)) {
                        return Err(Error::ClosureViolation(format!(
                            "hol({t}) != -hol({d})"
                        )));
                    }
                }
                _ => {}
            }
        }
        let hol: Vec<Vec2<S>> = hol_in.into_iter().map(|v| v.unwrap()).collect();
        let surf = TranslationSurface { tri, hol, regions };
        surf.validate(scale)?;
        Ok(surf)
    }

    fn validate(&self, scale: f64) -> Result<()> {
        for (t, tri) in self.tri.triangles.iter().enumerate() {
            let s = self.hol[tri[0]].clone() + self.hol[tri[1]].clone() + self.hol[tri[2]].clone();
            if !(s.x.near_zero(scale) && s.y.near_zero(scale)) {
                return Err(Error::ClosureViolation(format!(
                    "triangle {t} does not close"
                )));
            }
            let cr = self.hol[tri[0]].cross(&self.hol[tri[1]]);
            if !cr.is_positive() {
                return Err(Error::OrientationViolation(format!(
                    "triangle {t} is degenerate or clockwise"
                )));
            }
        }
        // Cone angles: 2π(r+1) per labelled vertex, within 1e-9 radians.
        for v in 0..self.tri.num_vertices() {
            let lbl = self.tri.label_of_vertex(v);
            let want = 2.0 * std::f64::consts::PI * (lbl.order as f64 + 1.0);
            let got = self.cone_angle(v);
            if (got - want).abs() > 1e-9 {
                return Err(Error::ConeAngleMismatch(format!(
                    "vertex {} (label {}): angle {got:.12} != {want:.12}",
                    v, lbl.label
                )));
            }
        }
        Ok(())
    }

    /// Total angle at vertex orbit `v`, summed over incident triangle corners.
    pub fn cone_angle(&self, v: usize) -> f64 {
        let mut total = 0.0;
        for d in 0..self.tri.num_darts() {
            if self.tri.vertex_of(d) == v {
                total += self.corner_angle(d);
            }
        }
        total
    }

    /// Interior angle of the corner at the origin of `d` in its triangle.
    pub fn corner_angle(&self, d: Dart) -> f64 {
        let a = self.hol[d].to_f64();
        let b = -self.hol[self.tri.prev(d)].to_f64();
        let cross = a.x * b.y - a.y * b.x;
        let dot = a.x * b.x + a.y * b.y;
        cross.atan2(dot).rem_euclid(2.0 * std::f64::consts::PI)
    }

    pub fn hol(&self, d: Dart) -> &Vec2<S> {
        &self.hol[d]
    }

    pub fn hols(&self) -> &[Vec2<S>] {
        &self.hol
    }

    /// Develops the corners of triangle `t` with the tail of its first dart
    /// at the origin; returns the three vertex positions.
    pub fn develop_triangle(&self, t: Tri) -> [Vec2<S>; 3] {
        let [d0, d1, _] = self.tri.triangles[t];
        let v0 = Vec2::zero();
        let v1 = self.hol[d0].clone();
        let v2 = self.hol[d0].clone() + self.hol[d1].clone();
        [v0, v1, v2]
    }

    /// Sum of triangle areas.
    pub fn area(&self) -> S {
        let mut total = S::zero();
        let half = S::from_ratio(1, 2);
        for tri in &self.tri.triangles {
            total += self.hol[tri[0]].cross(&self.hol[tri[1]]) * half.clone();
        }
        total
    }

    /// Rescales holonomies by area^(-1/2) so the result has area one.
    ///
    /// In exact mode this requires the area to be a square in Q; otherwise
    /// the caller should convert to float mode first.
    pub fn normalize_area(&self) -> Result<Self> {
        let area = self.area();
        if !area.is_positive() {
            return Err(Error::OrientationViolation("area <= 0".into()));
        }
        let root = area.sqrt_exact().ok_or_else(|| {
            Error::Numeric("area has no exact square root in rational mode".into())
        })?;
        let inv = S::one() / root;
        let hol = self.hol.iter().map(|v| Some(v.scale(&inv))).collect();
        TranslationSurface::new(self.tri.clone(), hol, self.regions.clone())
    }

    /// Forgets exactness, yielding the float-mode surface.
    pub fn to_f64(&self) -> TranslationSurface<f64> {
        let hol = self.hol.iter().map(|v| Some(v.to_f64())).collect();
        TranslationSurface::new(self.tri.clone(), hol, self.regions.clone())
            .expect("valid surface stays valid under rounding")
    }

    /// Largest holonomy norm; reference scale for tolerances.
    pub fn max_edge(&self) -> f64 {
        self.hol.iter().map(|v| v.to_f64().norm()).fold(0.0, f64::max)
    }

    /// Shortest holonomy norm.
    pub fn min_edge(&self) -> f64 {
        self.hol
            .iter()
            .map(|v| v.to_f64().norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// Crude upper estimate of the diameter: half the total perimeter.
    pub fn diameter_estimate(&self) -> f64 {
        self.hol.iter().map(|v| v.to_f64().norm()).sum::<f64>() / 2.0
    }

    /// Triangle set of a named region.
    pub fn region(&self, name: &str) -> Option<&[Tri]> {
        self.regions.get(name).map(|v| v.as_slice())
    }

    /// Replaces every holonomy via `f`, revalidating all invariants.
    pub fn map_holonomy<F: Fn(Dart, &Vec2<S>) -> Vec2<S>>(&self, f: F) -> Result<Self> {
        let hol = (0..self.tri.num_darts())
            .map(|d| Some(f(d, &self.hol[d])))
            .collect();
        TranslationSurface::new(self.tri.clone(), hol, self.regions.clone())
    }
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use crate::num::{Rat, Scalar};

    #[test]
    fn square_torus_validates() {
        let t = square_torus_exact();
        assert_eq!(t.tri.genus(), 1);
        assert_eq!(t.tri.num_vertices(), 1);
        assert_eq!(t.area(), crate::num::rat_int(1));
        let angle = t.cone_angle(0);
        assert!((angle - 2.0 * std::f64::consts::PI).abs() < 1e-9);
    }

    #[test]
    fn negative_diagonal_rejected() {
        // Same combinatorics with the diagonal flipped to (1,-1) breaks
        // the counterclockwise condition.
        let r = crate::builders::torus(
            crate::geom::Vec2::new(1.0, 0.0),
            crate::geom::Vec2::new(0.0, -1.0),
        );
        assert!(matches!(r, Err(crate::error::Error::OrientationViolation(_))));
    }

    #[test]
    fn normalize_area_exact_square() {
        let t = torus(
            crate::geom::Vec2::new(crate::num::rat_int(2), crate::num::rat_int(0)),
            crate::geom::Vec2::new(crate::num::rat_int(0), crate::num::rat_int(2)),
        );
        assert_eq!(t.area(), crate::num::rat_int(4));
        let n = t.normalize_area().unwrap();
        assert_eq!(n.area(), crate::num::rat_int(1));
        // idempotent
        let n2 = n.normalize_area().unwrap();
        assert_eq!(n2.area(), crate::num::rat_int(1));
        assert_eq!(n2.hols(), n.hols());
    }

    #[test]
    fn normalize_area_irrational_fails_exact() {
        let t = torus(
            crate::geom::Vec2::new(crate::num::rat_int(2), crate::num::rat_int(0)),
            crate::geom::Vec2::new(crate::num::rat_int(0), crate::num::rat_int(1)),
        );
        assert!(t.normalize_area().is_err());
        let f = t.to_f64().normalize_area().unwrap();
        assert!((f.area() - 1.0).abs() < 1e-12);
        // longest edge is the diagonal (2,1)/sqrt(2)
        assert!((f.max_edge() - (2.5f64).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn float_validation_tolerance() {
        let t = square_torus_f64();
        assert!((t.area() - 1.0).abs() < 1e-15);
        assert_eq!(t.tri.genus(), 1);
    }
}
