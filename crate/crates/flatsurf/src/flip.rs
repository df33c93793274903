//! Edge flips: the change of chart between overlapping triangulations.
//!
//! A flip replaces the diagonal of the convex quadrilateral formed by the
//! two triangles adjacent to an edge. The two dart slots of the old
//! diagonal are reused for the new one, so every other dart keeps its
//! identity; transports rewrite cochains and edge chains accordingly,
//! preserving cohomology classes.

use crate::cochain::Cochain1;
use crate::error::{Error, Result};
use crate::num::Scalar;
use crate::surface::{Dart, TranslationSurface, Triangulation, VertexLabel};

/// One flip record.
///
/// Quad around the diagonal `dart` = A->B with apexes C (left) and D
/// (right): `n1` = B->C, `p1` = C->A, `n2` = A->D, `p2` = D->B. These four
/// darts and their twins survive the flip unchanged; after the flip the
/// slot `dart` holds D->C.
#[derive(Clone, Debug)]
pub struct Flip {
    pub dart: Dart,
    pub twin: Dart,
    n1: Dart,
    p1: Dart,
    n2: Dart,
    p2: Dart,
    tn2: Dart,
    tp2: Dart,
}

/// A composite of flips, applied left to right.
#[derive(Clone, Debug, Default)]
pub struct Transport {
    pub flips: Vec<Flip>,
}

impl Transport {
    pub fn identity() -> Self {
        Transport::default()
    }

    pub fn is_identity(&self) -> bool {
        self.flips.is_empty()
    }

    pub fn then(mut self, mut later: Transport) -> Transport {
        self.flips.append(&mut later.flips);
        self
    }

    /// Rewrites a cochain from the pre-flip edge basis to the post-flip one.
    pub fn cochain_forward<S: Scalar>(&self, c: &Cochain1<S>) -> Cochain1<S> {
        let mut vals = c.values().to_vec();
        for f in &self.flips {
            // closure in the new triangle (n2, dart, p1)
            let v = -(vals[f.n2].clone() + vals[f.p1].clone());
            vals[f.twin] = -v.clone();
            vals[f.dart] = v;
        }
        Cochain1::from_raw(vals)
    }

    /// Rewrites a cochain on the final triangulation back to the original
    /// edge basis.
    pub fn cochain_backward<S: Scalar>(&self, c: &Cochain1<S>) -> Cochain1<S> {
        let mut vals = c.values().to_vec();
        for f in self.flips.iter().rev() {
            // closure in the old triangle (dart, n1, p1)
            let v = -(vals[f.n1].clone() + vals[f.p1].clone());
            vals[f.twin] = -v.clone();
            vals[f.dart] = v;
        }
        Cochain1::from_raw(vals)
    }

    /// Rewrites an integer edge chain in the original basis to one in the
    /// final basis representing the same relative homology class.
    pub fn chain_forward(&self, chain: &[(Dart, i64)]) -> Vec<(Dart, i64)> {
        let mut cur: Vec<(Dart, i64)> = chain.to_vec();
        for f in &self.flips {
            let mut next = Vec::with_capacity(cur.len() + 2);
            for &(d, c) in &cur {
                if d == f.dart {
                    // A->B rehomotoped to A->D->B
                    next.push((f.n2, c));
                    next.push((f.p2, c));
                } else if d == f.twin {
                    next.push((f.tp2, c));
                    next.push((f.tn2, c));
                } else {
                    next.push((d, c));
                }
            }
            cur = next;
        }
        cur
    }
}

/// Flips edge `e`, returning the new surface and the transport map.
///
/// Fails with `NonConvexFlip` unless the new diagonal is positively
/// oriented in both new triangles (quad strictly convex).
pub fn flip_edge<S: Scalar>(
    q: &TranslationSurface<S>,
    e: Dart,
) -> Result<(TranslationSurface<S>, Transport)> {
    let tri = &q.tri;
    let te = tri.twin[e];
    let t1 = tri.tri_of(e);
    let t2 = tri.tri_of(te);
    if t1 == t2 {
        // both sides of e bound the same triangle: no quadrilateral
        return Err(Error::NonConvexFlip(e));
    }
    let n1 = tri.next(e);
    let p1 = tri.prev(e);
    let n2 = tri.next(te);
    let p2 = tri.prev(te);

    // New diagonal D->C in the development A=0, B=hol(e), C=B+hol(n1),
    // D=hol(n2).
    let hol_f = q.hol(n1).clone() + q.hol(e).clone() - q.hol(n2).clone();
    // New triangles (A,D,C) = (n2, f, p1) and (D,B,C) = (p2, n1, tf).
    if !q.hol(n2).cross(&hol_f).is_positive()
        || !q.hol(p2).cross(q.hol(n1)).is_positive()
    {
        return Err(Error::NonConvexFlip(e));
    }

    let mut triangles = tri.triangles.clone();
    triangles[t1] = [n2, e, p1];
    triangles[t2] = [p2, n1, te];

    // Labels referencing the diagonal slots move to surviving darts with the
    // same origin: origin(e)=A is also origin(twin(p1)); origin(te)=B is
    // also origin(n1).
    let labels: Vec<VertexLabel> = tri
        .vertex_labels
        .iter()
        .map(|vl| {
            let mut vl = vl.clone();
            if vl.dart == e {
                vl.dart = tri.twin[p1];
            } else if vl.dart == te {
                vl.dart = n1;
            }
            vl
        })
        .collect();

    let new_tri = Triangulation::new(triangles, tri.twin.clone(), labels)?;
    let mut hol: Vec<Option<crate::geom::Vec2<S>>> =
        q.hols().iter().map(|v| Some(v.clone())).collect();
    hol[te] = Some(-&hol_f);
    hol[e] = Some(hol_f);

    // A region stays valid only if it contains both or neither of the two
    // re-triangulated slots.
    let mut regions = q.regions.clone();
    regions.retain(|_, tris| tris.contains(&t1) == tris.contains(&t2));

    let q2 = TranslationSurface::new(new_tri, hol, regions)?;
    let flip = Flip {
        dart: e,
        twin: te,
        n1,
        p1,
        n2,
        p2,
        tn2: tri.twin[n2],
        tp2: tri.twin[p2],
    };
    Ok((q2, Transport { flips: vec![flip] }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cochain::{cup, hol_x, hol_y};
    use crate::num::Rat;
    use crate::surface::fixtures::square_torus_exact;

    #[test]
    fn flip_square_torus_diagonal() {
        let q = square_torus_exact();
        // diagonal darts are 4/5 with holonomy (1,1)
        let (q2, tr) = flip_edge(&q, 4).unwrap();
        // new diagonal is (-1,1) or (1,-1) depending on slot orientation
        let h = q2.hol(4).to_f64();
        assert_eq!(h.x.abs(), 1.0);
        assert_eq!(h.y.abs(), 1.0);
        assert_eq!((h.x + h.y).abs(), 0.0);
        assert_eq!(q2.area(), crate::num::rat_int(1));

        // transport of dy: new diagonal value = +/- sum of the y-components
        // it replaces; closure must hold on the new triangulation
        let dy = hol_y(&q);
        let dy2 = tr.cochain_forward(&dy);
        assert_eq!(dy2.values(), hol_y(&q2).values());

        // pairing with hol_x is preserved by transport
        let dx = hol_x(&q);
        let dx2 = tr.cochain_forward(&dx);
        assert_eq!(cup(&q.tri, &dx, &dy), cup(&q2.tri, &dx2, &dy2));
    }

    #[test]
    fn flip_twice_restores_surface() {
        // double flip restores the original diagonal, possibly with the
        // two dart slots swapped; transports compose to the identity on
        // classes
        let q = square_torus_exact();
        let (q2, t1) = flip_edge(&q, 4).unwrap();
        let (q3, t2) = flip_edge(&q2, 4).unwrap();
        let same = q3.hols() == q.hols();
        let swapped = q3.hol(4) == q.hol(5) && q3.hol(5) == q.hol(4);
        assert!(same || swapped);
        let tr = t1.then(t2);
        let x = hol_x(&q);
        let y = hol_y(&q);
        for chain in [vec![(0usize, 1i64)], vec![(2, 1)], vec![(4, 1)], vec![(0, 1), (2, 1)]] {
            let moved = tr.chain_forward(&chain);
            assert_eq!(hol_x(&q3).eval_chain(&moved), x.eval_chain(&chain));
            assert_eq!(hol_y(&q3).eval_chain(&moved), y.eval_chain(&chain));
        }
    }

    #[test]
    fn chain_transport_preserves_holonomy() {
        let q = square_torus_exact();
        let (q2, tr) = flip_edge(&q, 4).unwrap();
        // the old diagonal as a chain
        let chain = vec![(4usize, 1i64)];
        let new_chain = tr.chain_forward(&chain);
        let x2 = hol_x(&q2);
        let y2 = hol_y(&q2);
        assert_eq!(x2.eval_chain(&new_chain), hol_x(&q).eval_chain(&chain));
        assert_eq!(y2.eval_chain(&new_chain), hol_y(&q).eval_chain(&chain));
    }

    #[test]
    fn nonconvex_flip_rejected() {
        // On the two-marked torus, the quad around a lattice edge can be
        // nonconvex for a skewed marked point.
        let q = crate::builders::two_marked_torus(
            crate::geom::Vec2::new(1.0, 0.0),
            crate::geom::Vec2::new(0.0, 1.0),
            crate::geom::Vec2::new(0.9, 0.05),
        )
        .unwrap();
        let mut any_rejected = false;
        for d in 0..q.tri.num_darts() {
            if flip_edge(&q, d).is_err() {
                any_rejected = true;
            }
        }
        assert!(any_rejected);
    }
}
