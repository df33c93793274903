//! Saddle connection enumeration by expanding visibility sectors through
//! triangle corners, pruned by developed distance.

use crate::geom::Vec2;
use crate::num::Scalar;
use crate::surface::{Dart, TranslationSurface};

/// A straight geodesic between singularities with no singularity interior.
#[derive(Clone, Debug)]
pub struct SaddleConnection<S> {
    pub start_vertex: usize,
    pub end_vertex: usize,
    pub holonomy: Vec2<S>,
    /// Darts crossed transversally, in order (empty for edge connections).
    pub crossed: Vec<Dart>,
    /// Edge chain from start to end representing the same relative class.
    pub chain: Vec<Dart>,
    /// Set when the connection runs along a triangulation edge.
    pub along_edge: Option<Dart>,
}

impl<S: Scalar> SaddleConnection<S> {
    pub fn length(&self) -> f64 {
        self.holonomy.to_f64().norm()
    }

    pub fn is_horizontal(&self, scale: f64) -> bool {
        self.holonomy.y.near_zero(scale)
    }
}

/// Closed angular window for filtering connection directions.
#[derive(Clone, Debug)]
pub struct DirectionWindow {
    pub lo: Vec2<f64>,
    pub hi: Vec2<f64>,
}

impl DirectionWindow {
    /// Window of half-width `delta` radians around `theta`.
    pub fn around(theta: f64, delta: f64) -> Self {
        DirectionWindow {
            lo: Vec2::unit(theta - delta),
            hi: Vec2::unit(theta + delta),
        }
    }

    fn contains(&self, v: &Vec2<f64>) -> bool {
        self.lo.cross(v) >= -1e-15 && v.cross(&self.hi) >= -1e-15
    }

    /// Whether the open cone (lo, hi) can intersect the window.
    fn may_intersect<S: Scalar>(&self, lo: &Vec2<S>, hi: &Vec2<S>) -> bool {
        let lo = lo.to_f64();
        let hi = hi.to_f64();
        self.lo.cross(&hi) > -1e-15 && lo.cross(&self.hi) > -1e-15
    }
}

struct Search<'a, S: Scalar> {
    q: &'a TranslationSurface<S>,
    l2: S,
    l_max: f64,
    filter: Option<&'a DirectionWindow>,
    out: Vec<SaddleConnection<S>>,
}

/// All saddle connections of length at most `l_max`, each reported once
/// from its start singularity (so an undirected geodesic appears twice,
/// with opposite holonomy). Results are sorted by (length, angle, chain).
pub fn enumerate_saddle_connections<S: Scalar>(
    q: &TranslationSurface<S>,
    l_max: f64,
    filter: Option<&DirectionWindow>,
) -> Vec<SaddleConnection<S>> {
    let l2 = S::from_f64(l_max) * S::from_f64(l_max);
    let mut search = Search {
        q,
        l2,
        l_max,
        filter,
        out: Vec::new(),
    };

    // Edge connections.
    for d in 0..q.tri.num_darts() {
        let h = q.hol(d);
        let n2 = h.dot(h);
        if n2 <= search.l2 {
            if let Some(f) = filter {
                if !f.contains(&h.to_f64()) {
                    continue;
                }
            }
            search.out.push(SaddleConnection {
                start_vertex: q.tri.vertex_of(d),
                end_vertex: q.tri.vertex_of(q.tri.twin[d]),
                holonomy: h.clone(),
                crossed: vec![],
                chain: vec![d],
                along_edge: Some(d),
            });
        }
    }

    // Interior connections from every corner.
    for d in 0..q.tri.num_darts() {
        search.corner(d);
    }

    search.out.sort_by(|a, b| {
        let la = a.length();
        let lb = b.length();
        la.partial_cmp(&lb)
            .unwrap()
            .then_with(|| {
                let aa = a.holonomy.to_f64().angle();
                let ab = b.holonomy.to_f64().angle();
                aa.partial_cmp(&ab).unwrap()
            })
            .then_with(|| a.chain.cmp(&b.chain))
    });
    search.out
}

impl<'a, S: Scalar> Search<'a, S> {
    /// Expands the sector of the corner at the origin of `d`.
    fn corner(&mut self, d: Dart) {
        let n = self.q.tri.next(d);
        let v1 = self.q.hol(d).clone();
        let v2 = v1.clone() + self.q.hol(n).clone();
        // lo = v1, hi = v2; window = far edge n developed from v1 to v2
        self.expand(
            d,
            n,
            v1.clone(),
            v2.clone(),
            v1,
            v2,
            vec![],
            vec![d],
            0,
        );
    }

    #[allow(clippy::too_many_arguments)]
    fn expand(
        &mut self,
        start: Dart,
        window: Dart,
        g0: Vec2<S>,
        g1: Vec2<S>,
        lo: Vec2<S>,
        hi: Vec2<S>,
        crossed: Vec<Dart>,
        chain_to_g0: Vec<Dart>,
        depth: usize,
    ) {
        // Sector must be nonempty and the window within reach.
        if !lo.cross(&hi).is_positive() {
            return;
        }
        if seg_dist2_exceeds(&g0, &g1, &self.l2, self.l_max) {
            return;
        }
        if let Some(f) = self.filter {
            if !f.may_intersect(&lo, &hi) {
                return;
            }
        }
        if depth > 10_000 {
            // unreachable for sane l_max; guards against pathological input
            return;
        }

        let tri = &self.q.tri;
        let gp = tri.twin[window];
        let np = tri.next(gp);
        let pp = tri.prev(gp);
        let apex = g0.clone() + self.q.hol(np).clone();

        let mut crossed2 = crossed.clone();
        crossed2.push(window);

        // Candidate at the apex.
        if lo.cross(&apex).is_positive() && apex.cross(&hi).is_positive() {
            let n2 = apex.dot(&apex);
            if n2 <= self.l2 {
                let ok = self
                    .filter
                    .map(|f| f.contains(&apex.to_f64()))
                    .unwrap_or(true);
                if ok {
                    let mut chain = chain_to_g0.clone();
                    chain.push(np);
                    self.out.push(SaddleConnection {
                        start_vertex: tri.vertex_of(start),
                        end_vertex: tri.vertex_of(pp),
                        holonomy: apex.clone(),
                        crossed: crossed2.clone(),
                        chain,
                        along_edge: None,
                    });
                }
            }
        }

        // Sub-window (g0, apex) across np: lo side unchanged.
        {
            let lo2 = if lo.cross(&g0).is_positive() { g0.clone() } else { lo.clone() };
            let hi2 = if apex.cross(&hi).is_positive() { apex.clone() } else { hi.clone() };
            if lo2.cross(&hi2).is_positive() {
                self.expand(
                    start,
                    np,
                    g0.clone(),
                    apex.clone(),
                    lo2,
                    hi2,
                    crossed2.clone(),
                    chain_to_g0.clone(),
                    depth + 1,
                );
            }
        }

        // Sub-window (apex, g1) across pp: chain extends to the apex.
        {
            let lo2 = if lo.cross(&apex).is_positive() { apex.clone() } else { lo.clone() };
            let hi2 = if g1.cross(&hi).is_positive() { g1.clone() } else { hi.clone() };
            if lo2.cross(&hi2).is_positive() {
                let mut chain = chain_to_g0;
                chain.push(np);
                self.expand(start, pp, apex, g1, lo2, hi2, crossed2, chain, depth + 1);
            }
        }
    }
}

/// Whether the squared distance from the origin to segment [a, b] exceeds
/// `l2`. Exact in rational mode; float mode adds no tolerance.
fn seg_dist2_exceeds<S: Scalar>(a: &Vec2<S>, b: &Vec2<S>, l2: &S, _l_max: f64) -> bool {
    let ab = b.clone() - a.clone();
    let denom = ab.dot(&ab);
    if denom.is_zero() {
        return a.dot(a) > *l2;
    }
    // projection parameter t = -<a, ab> / |ab|^2, clamped to [0,1]
    let neg_num = -(a.dot(&ab));
    let d2 = if !neg_num.is_positive() {
        a.dot(a)
    } else if neg_num >= denom {
        b.dot(b)
    } else {
        // |a|^2 - num^2/denom
        a.dot(a) - neg_num.clone() * neg_num / denom
    };
    d2 > *l2
}

/// Smallest saddle-connection length (the systole), found by enumerating
/// within the shortest edge length.
pub fn systole<S: Scalar>(q: &TranslationSurface<S>) -> f64 {
    let l = q.min_edge();
    enumerate_saddle_connections(q, l * (1.0 + 1e-9), None)
        .iter()
        .map(|c| c.length())
        .fold(f64::INFINITY, f64::min)
}

/// First horizontal saddle connection with length at most `l_max`, if any.
pub fn horizontal_connection<S: Scalar>(
    q: &TranslationSurface<S>,
    l_max: f64,
) -> Option<SaddleConnection<S>> {
    let scale = q.max_edge();
    let w = DirectionWindow::around(0.0, 1e-9);
    let mut cands = enumerate_saddle_connections(q, l_max, Some(&w));
    let w2 = DirectionWindow::around(std::f64::consts::PI, 1e-9);
    cands.extend(enumerate_saddle_connections(q, l_max, Some(&w2)));
    cands.into_iter().find(|c| c.is_horizontal(scale))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::Rat;
    use crate::surface::fixtures::{square_torus_exact, square_torus_f64};

    #[test]
    fn square_torus_eight_connections() {
        let q = square_torus_exact();
        let cs = enumerate_saddle_connections(&q, 1.5, None);
        assert_eq!(cs.len(), 8);
        let mut hols: Vec<(i64, i64)> = cs
            .iter()
            .map(|c| {
                (
                    c.holonomy.x.to_f64().round() as i64,
                    c.holonomy.y.to_f64().round() as i64,
                )
            })
            .collect();
        hols.sort();
        hols.dedup();
        assert_eq!(
            hols,
            vec![(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)]
        );
    }

    #[test]
    fn below_systole_empty() {
        let q = square_torus_f64();
        assert!(enumerate_saddle_connections(&q, 0.5, None).is_empty());
        assert!((systole(&q) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn chains_evaluate_to_holonomy() {
        let q = square_torus_exact();
        let x = crate::cochain::hol_x(&q);
        let y = crate::cochain::hol_y(&q);
        for c in enumerate_saddle_connections(&q, 3.0, None) {
            let chain: Vec<(usize, i64)> = c.chain.iter().map(|&d| (d, 1)).collect();
            assert_eq!(x.eval_chain(&chain), c.holonomy.x, "chain {:?}", c.chain);
            assert_eq!(y.eval_chain(&chain), c.holonomy.y);
        }
    }

    #[test]
    fn lattice_oracle_matches_up_to_l10() {
        // Torus with lattice {(1,0),(1/3,7/5)}: compare against the
        // brute-force primitive-vector count for L = 10.
        let u = crate::geom::Vec2::new(crate::num::rat_int(1), crate::num::rat_int(0));
        let v = crate::geom::Vec2::new(crate::num::rat_ratio(1, 3), crate::num::rat_ratio(7, 5));
        let q = crate::builders::torus(u, v).unwrap();
        let cs = enumerate_saddle_connections(&q, 10.0, None);
        // oracle: m*u + n*v primitive (gcd(m,n)=1), length <= 10
        let mut count = 0;
        for m in -15i64..=15 {
            for n in -15i64..=15 {
                if (m, n) == (0, 0) || num_integer::gcd(m, n) != 1 {
                    continue;
                }
                let x = m as f64 + n as f64 / 3.0;
                let y = n as f64 * 7.0 / 5.0;
                if x.hypot(y) <= 10.0 {
                    count += 1;
                }
            }
        }
        assert_eq!(cs.len(), count);
    }
}
