//! Transverse systems: arcs transverse to the horizontal foliation, the
//! prong systems trimmed to first-separatrix hits, and the first-return
//! interval exchange of the rightward horizontal flow.
//!
//! Arcs are parametrized by their vertical extent (the dy measure), which
//! the horizontal flow preserves; first-return maps are then genuine
//! interval exchanges.

use crate::error::{Error, Result};
use crate::flow::{flow_ex, FlowOutcome, FlowRun, Point, StopSegments};
use crate::geom::Vec2;
use crate::num::Scalar;
use crate::surface::{Dart, TranslationSurface, Tri};

/// Straight sub-segment of an arc inside one triangle, oriented by
/// increasing y.
#[derive(Clone, Debug)]
pub struct ArcPiece<S> {
    pub tri: Tri,
    pub a: Vec2<S>,
    pub b: Vec2<S>,
}

/// An arc transverse to the horizontal foliation, nowhere horizontal,
/// parametrized by cumulative vertical extent from its lowest point.
#[derive(Clone, Debug)]
pub struct Arc<S> {
    pub pieces: Vec<ArcPiece<S>>,
    /// Edge crossings between consecutive pieces: (param, dart, sign of
    /// det[arc direction (ascending), hol(dart)]).
    pub edge_crossings: Vec<(S, Dart, i8)>,
    pub y_len: S,
    /// Marked point parameter, kept away from edge crossings.
    pub marked: S,
}

impl<S: Scalar> Arc<S> {
    /// Builds an arc from recorded flow segments (one straight chord per
    /// triangle) and the crossings between them. `dir` is the flow
    /// direction used; it must not be horizontal.
    fn from_flow(
        q: &TranslationSurface<S>,
        segments: &[(Tri, Vec2<S>, Vec2<S>)],
        cross_darts: &[Dart],
        dir: &Vec2<S>,
    ) -> Result<Self> {
        if dir.y.is_zero() {
            return Err(Error::InvalidSurface("arc direction is horizontal".into()));
        }
        let ascending = dir.y.is_positive();
        let mut pieces: Vec<ArcPiece<S>> = segments
            .iter()
            .map(|(t, a, b)| {
                if ascending {
                    ArcPiece {
                        tri: *t,
                        a: a.clone(),
                        b: b.clone(),
                    }
                } else {
                    ArcPiece {
                        tri: *t,
                        a: b.clone(),
                        b: a.clone(),
                    }
                }
            })
            .collect();
        // crossing i sits between segments i and i+1
        let mut crossing_list: Vec<(usize, Dart)> = cross_darts.iter().copied().enumerate().collect();
        if !ascending {
            pieces.reverse();
            crossing_list.reverse();
        }
        // ascending arc direction
        let adir = if ascending { dir.clone() } else { -dir.clone() };
        let mut y_len = S::zero();
        let mut prefix = vec![S::zero()];
        for p in &pieces {
            let dy = p.b.y.clone() - p.a.y.clone();
            if !dy.is_positive() && !dy.is_zero() {
                return Err(Error::InvalidSurface("arc piece not ascending".into()));
            }
            y_len += dy;
            prefix.push(y_len.clone());
        }
        if y_len.is_zero() {
            return Err(Error::InvalidSurface("arc has zero vertical extent".into()));
        }
        // crossing params: boundary between piece k and k+1 (in ascending
        // order) is at prefix[k+1]
        let mut edge_crossings = Vec::new();
        let n = pieces.len();
        for (pos, (orig_idx, dart)) in crossing_list.iter().enumerate() {
            let _ = orig_idx;
            // in ascending order, crossing `pos` separates pieces pos,pos+1
            if pos + 1 >= n {
                break;
            }
            let sign = if adir.cross(q.hol(*dart)).is_positive() {
                1i8
            } else {
                -1i8
            };
            edge_crossings.push((prefix[pos + 1].clone(), *dart, sign));
        }
        // marked point: midpoint, nudged off edge crossings
        let half = S::from_ratio(1, 2);
        let mut marked = y_len.clone() * half;
        let offsets = [(1i64, 2i64), (13, 29), (17, 41), (23, 53)];
        'outer: for (num, den) in offsets {
            let cand = y_len.clone() * S::from_ratio(num, den);
            let clear = edge_crossings.iter().all(|(p, _, _)| {
                let d = (p.clone() - cand.clone()).to_f64().abs();
                if S::EXACT {
                    *p != cand
                } else {
                    d > 1e-9 * y_len.to_f64()
                }
            });
            if clear {
                marked = cand;
                break 'outer;
            }
        }
        Ok(Arc {
            pieces,
            edge_crossings,
            y_len,
            marked,
        })
    }

    /// Surface point at parameter `p` in [0, y_len].
    pub fn point_at(&self, p: &S) -> Point<S> {
        let mut acc = S::zero();
        for piece in &self.pieces {
            let dy = piece.b.y.clone() - piece.a.y.clone();
            let next = acc.clone() + dy.clone();
            if *p <= next || std::ptr::eq(piece, self.pieces.last().unwrap()) {
                if dy.is_zero() {
                    return Point {
                        tri: piece.tri,
                        xy: piece.a.clone(),
                    };
                }
                let t = (p.clone() - acc) / dy;
                let xy = Vec2::new(
                    piece.a.x.clone() + (piece.b.x.clone() - piece.a.x.clone()) * t.clone(),
                    piece.a.y.clone() + (piece.b.y.clone() - piece.a.y.clone()) * t,
                );
                return Point {
                    tri: piece.tri,
                    xy,
                };
            }
            acc = next;
        }
        unreachable!("parameter within arc length")
    }

    /// Parameter of a point known to lie on piece `k` (clamped to the
    /// arc's parameter range).
    pub fn param_of(&self, k: usize, at: &Vec2<S>) -> S {
        let mut acc = S::zero();
        for piece in &self.pieces[..k] {
            acc += piece.b.y.clone() - piece.a.y.clone();
        }
        let p = acc + (at.y.clone() - self.pieces[k].a.y.clone());
        if p < S::zero() {
            S::zero()
        } else if p > self.y_len {
            self.y_len.clone()
        } else {
            p
        }
    }

    /// Signed count of crossings with `dart` along the param range
    /// [from, to] (sign flips when to < from).
    pub fn crossings_between(&self, from: &S, to: &S, out: &mut Vec<(Dart, i64)>) {
        let (lo, hi, flip) = if from <= to {
            (from, to, 1i64)
        } else {
            (to, from, -1i64)
        };
        for (p, d, s) in &self.edge_crossings {
            if p > lo && p < hi {
                out.push((*d, *s as i64 * flip));
            }
        }
    }

    /// Keeps only the top portion of depth `depth` (measured down from the
    /// highest point).
    pub fn trim_top(&self, depth: &S) -> Arc<S> {
        let cut = self.y_len.clone() - depth.clone();
        if !cut.is_positive() {
            return self.clone();
        }
        let mut pieces = Vec::new();
        let mut acc = S::zero();
        for piece in &self.pieces {
            let dy = piece.b.y.clone() - piece.a.y.clone();
            let next = acc.clone() + dy.clone();
            if next > cut {
                if acc >= cut {
                    pieces.push(piece.clone());
                } else {
                    // split this piece at param `cut`
                    let t = (cut.clone() - acc.clone()) / dy.clone();
                    let a = Vec2::new(
                        piece.a.x.clone()
                            + (piece.b.x.clone() - piece.a.x.clone()) * t.clone(),
                        piece.a.y.clone()
                            + (piece.b.y.clone() - piece.a.y.clone()) * t,
                    );
                    pieces.push(ArcPiece {
                        tri: piece.tri,
                        a,
                        b: piece.b.clone(),
                    });
                }
            }
            acc = next;
        }
        let edge_crossings = self
            .edge_crossings
            .iter()
            .filter(|(p, _, _)| *p > cut)
            .map(|(p, d, s)| (p.clone() - cut.clone(), *d, *s))
            .collect();
        let y_len = depth.clone();
        let half = S::from_ratio(1, 2);
        let marked = y_len.clone() * half;
        Arc {
            pieces,
            edge_crossings,
            y_len,
            marked,
        }
    }
}

/// A system of disjoint transverse arcs with a recorded coverage bound.
#[derive(Clone, Debug)]
pub struct TransverseSystem<S> {
    pub arcs: Vec<Arc<S>>,
    /// Certified length: every rightward separatrix hits the system or a
    /// singularity within this flow length (set by `first_return`).
    pub l_cert: f64,
}

impl<S: Scalar> TransverseSystem<S> {
    pub fn new(arcs: Vec<Arc<S>>) -> Self {
        TransverseSystem { arcs, l_cert: 0.0 }
    }

    pub fn total_len(&self) -> S {
        let mut acc = S::zero();
        for a in &self.arcs {
            acc += a.y_len.clone();
        }
        acc
    }

    pub fn offsets(&self) -> Vec<S> {
        let mut off = vec![S::zero()];
        for a in &self.arcs {
            let last = off.last().unwrap().clone();
            off.push(last + a.y_len.clone());
        }
        off
    }

    pub fn stop_segments(&self, num_tris: usize) -> StopSegments<S> {
        let mut by_tri = vec![Vec::new(); num_tris];
        for (ai, arc) in self.arcs.iter().enumerate() {
            for (pi, piece) in arc.pieces.iter().enumerate() {
                by_tri[piece.tri].push((ai, pi, piece.a.clone(), piece.b.clone()));
            }
        }
        StopSegments { by_tri }
    }
}

/// Downward vertical prong directions at vertex orbit `v`: corner darts
/// whose open sector contains (0,-1).
fn downward_corners<S: Scalar>(q: &TranslationSurface<S>, v: usize) -> Vec<Dart> {
    let down = Vec2::new(S::zero(), -S::one());
    (0..q.tri.num_darts())
        .filter(|&d| q.tri.vertex_of(d) == v)
        .filter(|&d| {
            let lo = q.hol(d).clone();
            let hi = -q.hol(q.tri.prev(d)).clone();
            lo.cross(&down).is_positive() && down.cross(&hi).is_positive()
        })
        .collect()
}

/// Horizontal separatrix corners at `v` in direction `dir` (+1 rightward,
/// -1 leftward): corners containing the direction, including the boundary
/// case where an edge points exactly that way.
fn horizontal_corners<S: Scalar>(q: &TranslationSurface<S>, v: usize, rightward: bool) -> Vec<Dart> {
    let h = if rightward {
        Vec2::new(S::one(), S::zero())
    } else {
        Vec2::new(-S::one(), S::zero())
    };
    (0..q.tri.num_darts())
        .filter(|&d| q.tri.vertex_of(d) == v)
        .filter(|&d| {
            let lo = q.hol(d).clone();
            let hi = -q.hol(q.tri.prev(d)).clone();
            // open sector, or exactly along the leading edge
            let on_lo = lo.cross(&h).is_zero() && lo.dot(&h).is_positive();
            (lo.cross(&h).is_positive() && h.cross(&hi).is_positive()) || on_lo
        })
        .collect()
}

/// Start state for a ray leaving the origin corner of dart `d`.
fn corner_start<S: Scalar>(q: &TranslationSurface<S>, d: Dart) -> Point<S> {
    let t = q.tri.tri_of(d);
    let pos = q.tri.triangles[t].iter().position(|&x| x == d).unwrap();
    let c = q.develop_triangle(t);
    Point {
        tri: t,
        xy: c[pos].clone(),
    }
}

/// Traces a vertical prong of length `len` downward from the corner of
/// dart `d`.
fn trace_prong<S: Scalar>(q: &TranslationSurface<S>, d: Dart, len: f64) -> Result<Arc<S>> {
    let start = corner_start(q, d);
    let dir = Vec2::new(S::zero(), -S::one());
    let run = FlowRun {
        record_crossings: true,
        record_segments: true,
        detect_period: false,
        stops: None,
    };
    let res = crate::flow::flow_from_corner(q, &start, &dir, len, &run)?;
    match res.outcome {
        FlowOutcome::Ran { .. } => {}
        FlowOutcome::HitSingularity { time, .. } => {
            return Err(Error::ProngHitsSingularity(time))
        }
        _ => return Err(Error::Numeric("unexpected prong outcome".into())),
    }
    let darts: Vec<Dart> = res.crossings.iter().map(|c| c.dart).collect();
    Arc::from_flow(q, &res.segments, &darts, &dir)
}

/// Builds the prong system: downward vertical prongs of length e^{-t} from
/// the first labelled singularity, trimmed to the deepest first hit of a
/// horizontal separatrix (when any separatrix hits).
pub fn prong_system<S: Scalar>(q: &TranslationSurface<S>, t: f64) -> Result<TransverseSystem<S>> {
    let first = &q.tri.vertex_labels[0];
    let v = q.tri.vertex_of(first.dart);
    let len = (-t).exp();
    let corners = downward_corners(q, v);
    if corners.len() != first.order + 1 {
        return Err(Error::InvalidSurface(format!(
            "expected {} downward prongs at the first singularity, found {} \
             (vertical edge at the vertex?)",
            first.order + 1,
            corners.len()
        )));
    }
    let arcs: Vec<Arc<S>> = corners
        .iter()
        .map(|&d| trace_prong(q, d, len))
        .collect::<Result<_>>()?;
    let mut sys = TransverseSystem::new(arcs);

    // Trim to the deepest first separatrix hit.
    let stops = sys.stop_segments(q.tri.num_triangles());
    let cap = 64.0 * (1.0 + q.area().to_f64() / len.min(1.0));
    let mut eps: Option<S> = None;
    for vtx in 0..q.tri.num_vertices() {
        for rightward in [true, false] {
            for d in horizontal_corners(q, vtx, rightward) {
                let dir = if rightward {
                    Vec2::new(S::one(), S::zero())
                } else {
                    Vec2::new(-S::one(), S::zero())
                };
                let start = corner_start(q, d);
                let run = FlowRun {
                    record_crossings: false,
                    record_segments: false,
                    detect_period: false,
                    stops: Some(&stops),
                };
                if let Ok(res) = crate::flow::flow_from_corner(q, &start, &dir, cap, &run) {
                    if let FlowOutcome::HitSegment { arc, piece, at, .. } = res.outcome {
                        let param = sys.arcs[arc].param_of(piece, &at);
                        let depth = sys.arcs[arc].y_len.clone() - param;
                        // a hit at the very top carries no interior
                        // information (the leaf through the singularity)
                        if !depth.is_positive() || depth.near_zero(sys.arcs[arc].y_len.to_f64()) {
                            continue;
                        }
                        let deeper = match &eps {
                            None => true,
                            Some(e) => depth > *e,
                        };
                        if deeper {
                            eps = Some(depth);
                        }
                    }
                }
            }
        }
    }
    if let Some(eps) = eps {
        sys = TransverseSystem::new(
            sys.arcs
                .iter()
                .map(|a| if a.y_len > eps { a.trim_top(&eps) } else { a.clone() })
                .collect(),
        );
    }
    Ok(sys)
}

/// Prong systems at increasing depth parameters, trimmed so that each
/// system is contained in the previous one (the nesting the cone
/// comparison relies on).
pub fn prong_tower<S: Scalar>(
    q: &TranslationSurface<S>,
    ts: &[f64],
) -> Result<Vec<TransverseSystem<S>>> {
    let mut out: Vec<TransverseSystem<S>> = Vec::with_capacity(ts.len());
    for &t in ts {
        let mut sys = prong_system(q, t)?;
        if let Some(prev) = out.last() {
            let capped: Vec<Arc<S>> = sys
                .arcs
                .iter()
                .zip(&prev.arcs)
                .map(|(a, p)| {
                    if a.y_len > p.y_len {
                        a.trim_top(&p.y_len)
                    } else {
                        a.clone()
                    }
                })
                .collect();
            sys = TransverseSystem::new(capped);
        }
        out.push(sys);
    }
    Ok(out)
}

/// Closed vertical circle through `start` (must close up within `max_len`).
pub fn vertical_circle<S: Scalar>(
    q: &TranslationSurface<S>,
    start: &Point<S>,
    max_len: f64,
) -> Result<Arc<S>> {
    let dir = Vec2::new(S::zero(), S::one());
    let run = FlowRun {
        record_crossings: true,
        record_segments: true,
        detect_period: true,
        stops: None,
    };
    let res = flow_ex(q, start, &dir, max_len, &run)?;
    match res.outcome {
        FlowOutcome::Periodic { .. } => {}
        _ => {
            return Err(Error::Numeric(
                "vertical line does not close up within the length bound".into(),
            ))
        }
    }
    let darts: Vec<Dart> = res.crossings.iter().map(|c| c.dart).collect();
    Arc::from_flow(q, &res.segments, &darts, &dir)
}

/// The first-return interval exchange of the rightward horizontal flow.
#[derive(Clone, Debug)]
pub struct IetData<S> {
    /// Interval lengths (vertical measure), in source order.
    pub lengths: Vec<S>,
    /// Global source start parameter per interval.
    pub src_start: Vec<S>,
    /// Global target start parameter per interval.
    pub dst_start: Vec<S>,
    /// Ranking of targets: permutation[i] = position of interval i's image.
    pub permutation: Vec<usize>,
    /// dst_start - src_start per interval.
    pub translations: Vec<S>,
    /// Darts crossed by the return flight of each interval.
    pub words: Vec<Vec<Dart>>,
    /// Source/target arc ids.
    pub src_arc: Vec<usize>,
    pub dst_arc: Vec<usize>,
    /// Arc-local target parameter of each interval's start.
    pub dst_param: Vec<S>,
    /// Arc-local source parameter of each interval's start.
    pub src_param: Vec<S>,
    /// Flight length of the representative orbit per interval.
    pub flights: Vec<f64>,
    /// Developed displacement of the return flight (horizontal).
    pub return_holonomies: Vec<Vec2<S>>,
    pub total: S,
}

impl<S: Scalar> IetData<S> {
    pub fn num_intervals(&self) -> usize {
        self.lengths.len()
    }

    /// Checks the piecewise-isometry invariants: positive lengths summing
    /// to the total, a bijective permutation, and image intervals tiling
    /// the parameter range.
    pub fn validate(&self) -> Result<()> {
        let n = self.num_intervals();
        let scale = self.total.to_f64();
        let mut sum = S::zero();
        for l in &self.lengths {
            if !l.is_positive() {
                return Err(Error::Numeric("nonpositive interval length".into()));
            }
            sum += l.clone();
        }
        if !(sum.clone() - self.total.clone()).near_zero(scale) {
            return Err(Error::Numeric("interval lengths do not sum to total".into()));
        }
        let mut perm = self.permutation.clone();
        perm.sort_unstable();
        if perm != (0..n).collect::<Vec<_>>() {
            return Err(Error::Numeric("permutation not bijective".into()));
        }
        // image tiling: sort by dst and check consecutive starts
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            self.dst_start[a]
                .partial_cmp(&self.dst_start[b])
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let mut expect = S::zero();
        for &i in &order {
            if !(self.dst_start[i].clone() - expect.clone()).near_zero(scale) {
                let dump: Vec<(f64, f64, f64)> = (0..n)
                    .map(|j| {
                        (
                            self.src_start[j].to_f64(),
                            self.lengths[j].to_f64(),
                            self.dst_start[j].to_f64(),
                        )
                    })
                    .collect();
                return Err(Error::Numeric(format!(
                    "image intervals do not tile: expected start {}, got {}                      [(src,len,dst)] = {dump:?}",
                    expect.to_f64(),
                    self.dst_start[i].to_f64()
                )));
            }
            expect = self.dst_start[i].clone() + self.lengths[i].clone();
        }
        if !(expect - self.total.clone()).near_zero(scale) {
            return Err(Error::Numeric("image intervals do not reach the end".into()));
        }
        Ok(())
    }

    /// Structured export of lengths, permutation, and translations.
    pub fn to_json(&self) -> String {
        let lengths: Vec<f64> = self.lengths.iter().map(|x| x.to_f64()).collect();
        let translations: Vec<f64> = self.translations.iter().map(|x| x.to_f64()).collect();
        serde_json::json!({
            "format": "iet-v1",
            "total": self.total.to_f64(),
            "lengths": lengths,
            "permutation": self.permutation,
            "translations": translations,
            "src_arc": self.src_arc,
            "dst_arc": self.dst_arc,
            "flights": self.flights,
        })
        .to_string()
    }
}

/// Doubling schedule for coverage flights.
fn coverage_budget<S: Scalar>(q: &TranslationSurface<S>, sys: &TransverseSystem<S>) -> f64 {
    let width = sys.total_len().to_f64();
    10.0 * q.area().to_f64() / width.max(1e-12)
}

/// Computes the first-return IET of the rightward horizontal flow to `sys`.
pub fn first_return<S: Scalar>(
    q: &TranslationSurface<S>,
    sys: &TransverseSystem<S>,
) -> Result<(IetData<S>, TransverseSystem<S>)> {
    let stops = sys.stop_segments(q.tri.num_triangles());
    let right = Vec2::new(S::one(), S::zero());
    let left = Vec2::new(-S::one(), S::zero());
    let scale = sys.total_len().to_f64();

    // coverage: every rightward separatrix hits the system or terminates
    // at a singularity within the certified bound
    let mut l_cert = coverage_budget(q, sys);
    'cov: loop {
        let mut ok = true;
        'outer: for v in 0..q.tri.num_vertices() {
            for d in horizontal_corners(q, v, true) {
                let start = corner_start(q, d);
                let run = FlowRun {
                    record_crossings: false,
                    record_segments: false,
                    detect_period: false,
                    stops: Some(&stops),
                };
                let res = crate::flow::flow_from_corner(q, &start, &right, l_cert, &run)?;
                match res.outcome {
                    FlowOutcome::HitSegment { .. } | FlowOutcome::HitSingularity { .. } => {}
                    _ => {
                        ok = false;
                        break 'outer;
                    }
                }
            }
        }
        if ok {
            break 'cov;
        }
        l_cert *= 2.0;
        if l_cert > coverage_budget(q, sys) * 1024.0 {
            return Err(Error::UncoveredLeaf(l_cert));
        }
    }

    // cut points per arc
    let offsets = sys.offsets();
    let mut cuts: Vec<Vec<S>> = sys
        .arcs
        .iter()
        .map(|a| vec![S::zero(), a.y_len.clone()])
        .collect();
    let add_cut = |cuts: &mut Vec<Vec<S>>, arc: usize, p: S| {
        cuts[arc].push(p);
    };

    // backward flights from singular leftward separatrices
    for v in 0..q.tri.num_vertices() {
        for d in horizontal_corners(q, v, false) {
            let start = corner_start(q, d);
            let run = FlowRun {
                record_crossings: false,
                record_segments: false,
                detect_period: false,
                stops: Some(&stops),
            };
            let res = crate::flow::flow_from_corner(q, &start, &left, l_cert * 1024.0, &run)?;
            if let FlowOutcome::HitSegment { arc, piece, at, .. } = res.outcome {
                let p = sys.arcs[arc].param_of(piece, &at);
                add_cut(&mut cuts, arc, p);
            }
        }
    }
    // backward flights from arc endpoints
    for arc in &sys.arcs {
        for p in [S::zero(), arc.y_len.clone()] {
            let pt = arc.point_at(&p);
            // endpoints at singularities are covered by separatrices
            let run = FlowRun {
                record_crossings: false,
                record_segments: false,
                detect_period: false,
                stops: Some(&stops),
            };
            match flow_ex(q, &pt, &left, l_cert * 1024.0, &run) {
                Ok(res) => {
                    if let FlowOutcome::HitSegment { arc: a2, piece, at, .. } = res.outcome {
                        let p2 = sys.arcs[a2].param_of(piece, &at);
                        add_cut(&mut cuts, a2, p2);
                    }
                }
                Err(Error::StartAtSingularity) => {}
                Err(e) => return Err(e),
            }
        }
    }

    // sort and dedupe cuts
    for c in cuts.iter_mut() {
        c.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        c.dedup_by(|a, b| {
            let d = (a.clone() - b.clone()).to_f64().abs();
            if S::EXACT {
                a == b
            } else {
                d <= 1e-12 * scale.max(1.0)
            }
        });
    }

    // intervals and their return data
    let mut data = IetData {
        lengths: vec![],
        src_start: vec![],
        dst_start: vec![],
        permutation: vec![],
        translations: vec![],
        words: vec![],
        src_arc: vec![],
        dst_arc: vec![],
        dst_param: vec![],
        src_param: vec![],
        flights: vec![],
        return_holonomies: vec![],
        total: sys.total_len(),
    };
    let half = S::from_ratio(1, 2);
    for (ai, arc_cuts) in cuts.iter().enumerate() {
        for w in arc_cuts.windows(2) {
            let (lo, hi) = (&w[0], &w[1]);
            let len = hi.clone() - lo.clone();
            if !len.is_positive() || len.near_zero(scale) {
                continue;
            }
            let mid = lo.clone() + len.clone() * half.clone();
            let pt = sys.arcs[ai].point_at(&mid);
            let run = FlowRun {
                record_crossings: true,
                record_segments: false,
                detect_period: false,
                stops: Some(&stops),
            };
            let res = flow_ex(q, &pt, &right, l_cert * 1024.0, &run)?;
            let FlowOutcome::HitSegment {
                time,
                arc: a2,
                piece,
                at,
            } = res.outcome
            else {
                return Err(Error::UncoveredLeaf(l_cert * 1024.0));
            };
            let p2 = sys.arcs[a2].param_of(piece, &at);
            let mid_global = offsets[ai].clone() + mid.clone();
            let dst_global = offsets[a2].clone() + p2.clone();
            let translation = dst_global.clone() - mid_global.clone();
            let src_start = offsets[ai].clone() + lo.clone();
            data.lengths.push(len.clone());
            data.src_start.push(src_start.clone());
            data.dst_start.push(src_start.clone() + translation.clone());
            data.translations.push(translation);
            data.words.push(res.crossings.iter().map(|c| c.dart).collect());
            data.src_arc.push(ai);
            data.dst_arc.push(a2);
            data.src_param.push(lo.clone());
            data.dst_param.push(p2 - (mid - lo.clone()));
            data.flights.push(time);
            data.return_holonomies
                .push(Vec2::new(S::from_f64(time), S::zero()));
        }
    }

    // permutation: rank of each interval's image start
    let n = data.lengths.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        data.dst_start[a]
            .partial_cmp(&data.dst_start[b])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut perm = vec![0usize; n];
    for (rank, &i) in order.iter().enumerate() {
        perm[i] = rank;
    }
    data.permutation = perm;
    data.validate()?;

    // Full-coverage certificate: the return strips (interval dy-length
    // times flight length) tile the surface exactly when the system meets
    // every horizontal leaf.
    let swept: f64 = data
        .lengths
        .iter()
        .zip(&data.flights)
        .map(|(l, f)| l.to_f64() * f)
        .sum();
    let area = q.area().to_f64();
    if (swept - area).abs() > 1e-6 * area.max(1.0) {
        return Err(Error::UncoveredLeaf(swept));
    }

    let mut certified = sys.clone();
    certified.l_cert = l_cert;
    Ok((data, certified))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::torus;
    use crate::flow::contains;

    #[test]
    fn torus_rotation_first_return() {
        // lattice {(1,sqrt2),(0,1)}: rightward flow returns to a vertical
        // circle as the rotation by -sqrt2 mod 1
        let q = torus(Vec2::new(1.0, 2f64.sqrt()), Vec2::new(0.0, 1.0)).unwrap();
        let start = Point {
            tri: 0,
            xy: Vec2::new(0.5, 0.5 * 2f64.sqrt() + 1e-3),
        };
        assert!(contains(&q, 0, &start.xy));
        let circle = vertical_circle(&q, &start, 5.0).unwrap();
        assert!((circle.y_len - 1.0).abs() < 1e-12);
        let sys = TransverseSystem::new(vec![circle]);
        let (iet, _) = first_return(&q, &sys).unwrap();
        // the rotation appears on 2 intervals plus possibly one artificial
        // cut at the circle's closing point
        assert!(
            iet.num_intervals() == 2 || iet.num_intervals() == 3,
            "intervals {}",
            iet.num_intervals()
        );
        let rot = 2f64.sqrt() - 1.0; // -sqrt2 mod 1 = 2 - sqrt2 = 1 - rot
        for i in 0..iet.num_intervals() {
            let t = iet.translations[i].to_f64().rem_euclid(1.0);
            assert!(
                (t - (1.0 - rot)).abs() < 1e-9,
                "translation {t} vs {}",
                1.0 - rot
            );
        }
        iet.validate().unwrap();
    }

    #[test]
    fn square_torus_identity_return() {
        // all horizontal leaves are periodic: the return map is the
        // identity on the circle
        let q = torus(Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)).unwrap();
        let start = Point {
            tri: 0,
            xy: Vec2::new(0.5, 0.25),
        };
        let circle = vertical_circle(&q, &start, 5.0).unwrap();
        let sys = TransverseSystem::new(vec![circle]);
        let (iet, _) = first_return(&q, &sys).unwrap();
        for i in 0..iet.num_intervals() {
            assert!(iet.translations[i].to_f64().abs() < 1e-12);
        }
    }

    #[test]
    fn prongs_on_generic_torus() {
        // basis without vertical edges
        let a = 2f64.sqrt();
        let q = torus(Vec2::new(1.0, a), Vec2::new(1.0, 1.0 + a)).unwrap();
        // the lattice contains (0,1): prongs of length e^{-1/4} < 1 avoid it
        let sys = prong_system(&q, 0.25).unwrap();
        assert_eq!(sys.arcs.len(), 1);
        assert!(sys.arcs[0].y_len <= (-0.25f64).exp() + 1e-12);
        let (iet, _) = first_return(&q, &sys).unwrap();
        iet.validate().unwrap();
        assert!(iet.num_intervals() >= 2);
    }

    #[test]
    fn periodic_surface_uncovered() {
        // square torus with non-vertical basis: prongs miss the periodic
        // leaves and the return flights run off
        let q = torus(Vec2::new(1.0, 0.0), Vec2::new(0.3, 1.0)).unwrap();
        let sys = prong_system(&q, 1.5).unwrap();
        match first_return(&q, &sys) {
            Err(Error::UncoveredLeaf(_)) => {}
            Ok(_) => panic!("expected UncoveredLeaf"),
            Err(e) => panic!("expected UncoveredLeaf, got {e}"),
        }
    }
}
