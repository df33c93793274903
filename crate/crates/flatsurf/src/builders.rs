//! Convenience constructors for the standard surfaces used throughout.

use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::num::Scalar;
use crate::surface::{Dart, TranslationSurface, Triangulation, VertexLabel};
use std::collections::BTreeMap;

/// Torus from lattice generators `u`, `v` with `u x v > 0`.
///
/// Two triangles glued along the diagonal `u + v`; one marked point of
/// order 0. Darts: 0/1 = u, 2/3 = v, 4/5 = diagonal.
pub fn torus<S: Scalar>(u: Vec2<S>, v: Vec2<S>) -> Result<TranslationSurface<S>> {
    if !u.cross(&v).is_positive() {
        return Err(Error::OrientationViolation(
            "lattice generators not positively oriented".into(),
        ));
    }
    let d = u.clone() + v.clone();
    // Lower triangle (0,0) -> u -> u+v, upper triangle u+v -> v -> (0,0).
    let triangles = vec![[0, 2, 5], [4, 1, 3]];
    let twin = vec![1, 0, 3, 2, 5, 4];
    let labels = vec![VertexLabel {
        label: "p0".into(),
        order: 0,
        dart: 0,
    }];
    let tri = Triangulation::new(triangles, twin, labels)?;
    let hol = vec![
        Some(u),           // 0
        None,              // 1
        Some(v),           // 2
        None,              // 3
        Some(d),           // 4
        None,              // 5
    ];
    TranslationSurface::new(tri, hol, BTreeMap::new())
}

/// Torus with two marked points at 0 and `w`, triangulated by spokes from
/// `w` to the four corners of the fundamental parallelogram of (u, v).
///
/// Used by the slit construction; `w` must be interior to the parallelogram
/// in the sense that all eight triangles below are positively oriented.
///
/// Darts (twin pairs): 0/1 = u bottom, 2/3 = v left, 4/5 = spoke w->0,
/// 6/7 = spoke w->u, 8/9 = spoke w->u+v, 10/11 = spoke w->v.
/// Triangles: (0,u,w), (u,u+v,w), (u+v,v,w), (v,0,w).
pub fn two_marked_torus<S: Scalar>(
    u: Vec2<S>,
    v: Vec2<S>,
    w: Vec2<S>,
) -> Result<TranslationSurface<S>> {
    if !u.cross(&v).is_positive() {
        return Err(Error::OrientationViolation(
            "lattice generators not positively oriented".into(),
        ));
    }
    // Spoke holonomies from w.
    let s0 = -w.clone(); // w -> 0
    let s1 = u.clone() - w.clone(); // w -> u
    let s2 = u.clone() + v.clone() - w.clone(); // w -> u+v
    let s3 = v.clone() - w.clone(); // w -> v
    let triangles = vec![[0, 7, 4], [2, 9, 6], [1, 11, 8], [3, 5, 10]];
    // twins: (0,1) u, (2,3) v, (4,5) s0, (6,7) s1, (8,9) s2, (10,11) s3.
    let twin = vec![1, 0, 3, 2, 5, 4, 7, 6, 9, 8, 11, 10];
    let labels = vec![
        VertexLabel {
            label: "z0".into(),
            order: 0,
            dart: 0,
        },
        VertexLabel {
            label: "z1".into(),
            order: 0,
            dart: 4,
        },
    ];
    let tri = Triangulation::new(triangles, twin, labels)?;
    let hol = vec![
        Some(u),
        None,
        Some(v),
        None,
        Some(s0),
        None,
        Some(s1),
        None,
        Some(s2),
        None,
        Some(s3),
        None,
    ];
    TranslationSurface::new(tri, hol, BTreeMap::new()).map_err(|e| match e {
        Error::OrientationViolation(_) => Error::OrientationViolation(
            "marked point is not interior to the spoke triangulation".into(),
        ),
        e => e,
    })
}

/// Dart carrying the slit holonomy `w` (tail at the 0-vertex) in the
/// `two_marked_torus` layout: the reversal of spoke w->0.
pub const TWO_MARKED_SLIT_DART: Dart = 5;
