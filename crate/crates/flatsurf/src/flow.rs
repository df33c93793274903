//! Straightline flow through triangle gluings, with segment-exact crossing
//! times, singularity-hit detection, periodicity detection, and Birkhoff
//! averages of triangle-region indicators.
//!
//! The stepper can also stop at marked transverse segments; the
//! first-return machinery feeds it the arcs of a transverse system.

use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::num::Scalar;
use crate::surface::{Dart, TranslationSurface, Tri};

/// Hit tolerance: a crossing within this distance of a triangle vertex is
/// declared singular (float mode; exact mode detects exact hits).
pub const HIT_TOL: f64 = 1e-10;

/// Position on a surface: a triangle and planar coordinates in its
/// development (first vertex of the triangle at the origin).
#[derive(Clone, Debug, PartialEq)]
pub struct Point<S> {
    pub tri: Tri,
    pub xy: Vec2<S>,
}

/// One transversal crossing of a triangle edge.
#[derive(Clone, Debug)]
pub struct Crossing<S> {
    /// Flow time (arc length) at the crossing.
    pub time: f64,
    /// Dart crossed, oriented as an edge of the triangle being exited.
    pub dart: Dart,
    /// Position along the dart, in (0, 1).
    pub frac: S,
}

/// Straight pieces of trajectory, one per triangle visited.
pub type Segment<S> = (Tri, Vec2<S>, Vec2<S>);

/// Transverse stop segments, indexed by triangle: (arc id, piece id, a, b).
#[derive(Clone, Debug, Default)]
pub struct StopSegments<S> {
    pub by_tri: Vec<Vec<(usize, usize, Vec2<S>, Vec2<S>)>>,
}

/// Outcome of a flow run.
#[derive(Clone, Debug)]
pub enum FlowOutcome<S> {
    /// Returned to the start point with the same direction.
    Periodic { period: f64 },
    /// Hit a singularity at the given time.
    HitSingularity { time: f64, vertex: usize },
    /// Ran for the full requested length.
    Ran { time: f64 },
    /// Hit a stop segment.
    HitSegment {
        time: f64,
        arc: usize,
        piece: usize,
        at: Vec2<S>,
    },
}

#[derive(Clone, Debug)]
pub struct FlowResult<S> {
    pub outcome: FlowOutcome<S>,
    pub end: Point<S>,
    pub crossings: Vec<Crossing<S>>,
    pub segments: Vec<Segment<S>>,
    /// Time spent in each triangle.
    pub occupancy: Vec<f64>,
}

/// Recording and stopping options for a flow run.
pub struct FlowRun<'a, S> {
    pub record_crossings: bool,
    pub record_segments: bool,
    pub detect_period: bool,
    pub stops: Option<&'a StopSegments<S>>,
}

impl<'a, S> Default for FlowRun<'a, S> {
    fn default() -> Self {
        FlowRun {
            record_crossings: true,
            record_segments: false,
            detect_period: true,
            stops: None,
        }
    }
}

fn corners<S: Scalar>(q: &TranslationSurface<S>, t: Tri) -> [Vec2<S>; 3] {
    q.develop_triangle(t)
}

/// Barycentric check that `p` lies inside (or on the boundary of) `t`.
pub fn contains<S: Scalar>(q: &TranslationSurface<S>, t: Tri, p: &Vec2<S>) -> bool {
    let c = corners(q, t);
    for i in 0..3 {
        let a = &c[i];
        let b = &c[(i + 1) % 3];
        let e = b.clone() - a.clone();
        let v = p.clone() - a.clone();
        if e.cross(&v) < S::zero() {
            return false;
        }
    }
    true
}

/// Centroid of triangle `t`.
pub fn centroid<S: Scalar>(q: &TranslationSurface<S>, t: Tri) -> Point<S> {
    let c = corners(q, t);
    let third = S::from_ratio(1, 3);
    let xy = Vec2::new(
        (c[0].x.clone() + c[1].x.clone() + c[2].x.clone()) * third.clone(),
        (c[0].y.clone() + c[1].y.clone() + c[2].y.clone()) * third,
    );
    Point { tri: t, xy }
}

/// Flows from `start` in direction `dir` for arc length `t_max`.
pub fn flow<S: Scalar>(
    q: &TranslationSurface<S>,
    start: &Point<S>,
    dir: &Vec2<S>,
    t_max: f64,
) -> Result<FlowResult<S>> {
    flow_ex(q, start, dir, t_max, &FlowRun::default())
}

/// Launches a ray from a triangle corner (separatrices and prongs start at
/// singularities, which the ordinary stepper rejects).
pub fn flow_from_corner<S: Scalar>(
    q: &TranslationSurface<S>,
    start: &Point<S>,
    dir: &Vec2<S>,
    t_max: f64,
    run: &FlowRun<S>,
) -> Result<FlowResult<S>> {
    flow_inner(q, start, dir, t_max, run, true)
}

/// Full-control flow run.
pub fn flow_ex<S: Scalar>(
    q: &TranslationSurface<S>,
    start: &Point<S>,
    dir: &Vec2<S>,
    t_max: f64,
    run: &FlowRun<S>,
) -> Result<FlowResult<S>> {
    flow_inner(q, start, dir, t_max, run, false)
}

fn flow_inner<S: Scalar>(
    q: &TranslationSurface<S>,
    start: &Point<S>,
    dir: &Vec2<S>,
    t_max: f64,
    run: &FlowRun<S>,
    allow_singular_start: bool,
) -> Result<FlowResult<S>> {
    let dir_norm = dir.to_f64().norm();
    if dir_norm == 0.0 {
        return Err(Error::Numeric("zero flow direction".into()));
    }
    let scale = q.max_edge();
    let mut cur = start.clone();
    let mut remaining = t_max;
    let mut crossings = Vec::new();
    let mut segments: Vec<Segment<S>> = Vec::new();
    let mut occupancy = vec![0.0; q.tri.num_triangles()];
    let mut time = 0.0;

    // start at a singularity?
    if !allow_singular_start {
        let c = corners(q, start.tri);
        for v in c.iter() {
            let d = (start.xy.clone() - v.clone()).to_f64().norm();
            let singular = if S::EXACT {
                start.xy == *v
            } else {
                d <= HIT_TOL * scale.max(1.0)
            };
            if singular {
                return Err(Error::StartAtSingularity);
            }
        }
    }

    let mut skip_local: Option<usize> = None;
    let max_steps = 100_000_000usize;
    for step in 0..max_steps {
        let tri_darts = q.tri.triangles[cur.tri];
        let c = corners(q, cur.tri);
        let mut exit: Option<(S, usize, S)> = None; // (s, local edge idx, frac)
        for i in 0..3 {
            if skip_local == Some(i) {
                continue;
            }
            let a = c[i].clone();
            let e = c[(i + 1) % 3].clone() - a.clone();
            // solve p + s*dir = a + u*e
            let denom = dir.cross(&e);
            if denom.is_zero() {
                continue;
            }
            let ap = a.clone() - cur.xy.clone();
            let s = ap.cross(&e) / denom.clone();
            let u = ap.cross(dir) / denom;
            if s > S::zero() && u >= S::zero() && u <= S::one() {
                let better = match &exit {
                    None => true,
                    Some((bs, _, _)) => s < bs.clone(),
                };
                if better {
                    exit = Some((s, i, u));
                }
            }
        }
        let Some((s, i, u)) = exit else {
            return Err(Error::Numeric(
                "flow failed to exit a triangle (degenerate data)".into(),
            ));
        };
        let step_len = s.to_f64() * dir_norm;

        // stop-segment hits within this triangle piece
        if let Some(stops) = run.stops {
            if let Some(list) = stops.by_tri.get(cur.tri) {
                let mut best: Option<(S, usize, usize)> = None;
                for (arc, piece, a, b) in list {
                    let e = b.clone() - a.clone();
                    let denom = dir.cross(&e);
                    if denom.is_zero() {
                        continue;
                    }
                    let ap = a.clone() - cur.xy.clone();
                    let sh = ap.cross(&e) / denom.clone();
                    let uh = ap.cross(dir) / denom;
                    let pos = if S::EXACT {
                        sh.is_positive()
                    } else {
                        sh.to_f64() * dir_norm > 1e-12 * scale.max(1.0)
                    };
                    // float mode widens the parameter range a whisker so
                    // that hits landing exactly on a piece junction (a
                    // triangulation edge) are not lost to rounding
                    let (u_lo, u_hi) = if S::EXACT {
                        (S::zero(), S::one())
                    } else {
                        (S::from_f64(-1e-9), S::from_f64(1.0 + 1e-9))
                    };
                    // hits landing exactly on the exit edge must not be
                    // lost to the s-comparison either
                    let within_step = if S::EXACT {
                        sh <= s
                    } else {
                        sh.to_f64() * dir_norm <= s.to_f64() * dir_norm + 1e-9 * scale.max(1.0)
                    };
                    if pos && uh >= u_lo && uh <= u_hi && within_step {
                        let better = match &best {
                            None => true,
                            Some((bs, _, _)) => sh < bs.clone(),
                        };
                        if better {
                            best = Some((sh, *arc, *piece));
                        }
                    }
                }
                if let Some((sh, arc, piece)) = best {
                    let seg = sh.to_f64() * dir_norm;
                    if seg <= remaining {
                        let at = Vec2::new(
                            cur.xy.x.clone() + dir.x.clone() * sh.clone(),
                            cur.xy.y.clone() + dir.y.clone() * sh,
                        );
                        occupancy[cur.tri] += seg;
                        time += seg;
                        if run.record_segments {
                            segments.push((cur.tri, cur.xy.clone(), at.clone()));
                        }
                        return Ok(FlowResult {
                            outcome: FlowOutcome::HitSegment {
                                time,
                                arc,
                                piece,
                                at: at.clone(),
                            },
                            end: Point { tri: cur.tri, xy: at },
                            crossings,
                            segments,
                            occupancy,
                        });
                    }
                }
            }
        }

        // mid-segment periodicity
        if run.detect_period && step > 0 && cur.tri == start.tri {
            let diff = start.xy.clone() - cur.xy.clone();
            let collinear = diff.cross(dir);
            let along = diff.dot(dir);
            let ok = if S::EXACT {
                collinear.is_zero() && along.is_positive()
            } else {
                collinear.to_f64().abs() <= 1e-9 * scale.max(1.0) * dir_norm
                    && along.to_f64() > 0.0
            };
            if ok {
                let s_star = along.to_f64() / (dir_norm * dir_norm);
                let seg = s_star * dir_norm;
                if s_star <= s.to_f64() && seg <= remaining {
                    occupancy[cur.tri] += seg;
                    time += seg;
                    if run.record_segments {
                        segments.push((cur.tri, cur.xy.clone(), start.xy.clone()));
                    }
                    return Ok(FlowResult {
                        outcome: FlowOutcome::Periodic { period: time },
                        end: start.clone(),
                        crossings,
                        segments,
                        occupancy,
                    });
                }
            }
        }

        if step_len >= remaining {
            let t = S::from_f64(remaining / dir_norm);
            occupancy[cur.tri] += remaining;
            time += remaining;
            let xy = Vec2::new(
                cur.xy.x.clone() + dir.x.clone() * t.clone(),
                cur.xy.y.clone() + dir.y.clone() * t,
            );
            if run.record_segments {
                segments.push((cur.tri, cur.xy.clone(), xy.clone()));
            }
            return Ok(FlowResult {
                outcome: FlowOutcome::Ran { time },
                end: Point { tri: cur.tri, xy },
                crossings,
                segments,
                occupancy,
            });
        }

        occupancy[cur.tri] += step_len;
        time += step_len;
        remaining -= step_len;

        let dart = tri_darts[i];
        let exit_xy = Vec2::new(
            cur.xy.x.clone() + dir.x.clone() * s.clone(),
            cur.xy.y.clone() + dir.y.clone() * s.clone(),
        );
        if run.record_segments {
            segments.push((cur.tri, cur.xy.clone(), exit_xy.clone()));
        }

        // singularity at the crossing?
        let hit_end = {
            if S::EXACT {
                u.is_zero() || u == S::one()
            } else {
                let elen = q.hol(dart).to_f64().norm();
                let d0 = u.to_f64() * elen;
                let d1 = (1.0 - u.to_f64()) * elen;
                d0 <= HIT_TOL * scale.max(1.0) || d1 <= HIT_TOL * scale.max(1.0)
            }
        };
        if hit_end {
            let vertex = if u.to_f64() < 0.5 {
                q.tri.vertex_of(dart)
            } else {
                q.tri.vertex_of(q.tri.twin[dart])
            };
            return Ok(FlowResult {
                outcome: FlowOutcome::HitSingularity { time, vertex },
                end: Point {
                    tri: cur.tri,
                    xy: exit_xy,
                },
                crossings,
                segments,
                occupancy,
            });
        }

        if run.record_crossings {
            crossings.push(Crossing {
                time,
                dart,
                frac: u.clone(),
            });
        }

        // move into the neighboring triangle
        let td = q.tri.twin[dart];
        let nt = q.tri.tri_of(td);
        let nc = corners(q, nt);
        let j = q.tri.triangles[nt]
            .iter()
            .position(|&d| d == td)
            .expect("twin in its triangle");
        let a = nc[j].clone();
        let e = nc[(j + 1) % 3].clone() - a.clone();
        let one_minus = S::one() - u;
        let xy = Vec2::new(
            a.x.clone() + e.x.clone() * one_minus.clone(),
            a.y.clone() + e.y.clone() * one_minus,
        );
        cur = Point { tri: nt, xy };
        skip_local = Some(j);
    }
    Err(Error::Numeric("flow step limit exceeded".into()))
}

/// Time average of the indicator of a triangle set along the flow.
pub fn birkhoff_average<S: Scalar>(
    q: &TranslationSurface<S>,
    start: &Point<S>,
    dir: &Vec2<S>,
    t_max: f64,
    region: &[Tri],
) -> Result<f64> {
    let run = FlowRun {
        record_crossings: false,
        record_segments: false,
        detect_period: false,
        stops: None,
    };
    let res = flow_ex(q, start, dir, t_max, &run)?;
    let total: f64 = res.occupancy.iter().sum();
    if total == 0.0 {
        return Err(Error::Numeric("zero flow time".into()));
    }
    let inside: f64 = region.iter().map(|&t| res.occupancy[t]).sum();
    Ok(inside / total)
}

/// Time average of the indicator {frac(lambda) < cut} along the flow,
/// where `lambda` is given per triangle chart as affine coefficients
/// (a, b, c) with lambda(x, y) = a x + b y + c, consistent across gluings
/// up to integers. Occupancy is computed segment-exactly by splitting each
/// straight piece at the level crossings of lambda.
pub fn banded_occupancy<S: Scalar>(
    q: &TranslationSurface<S>,
    start: &Point<S>,
    dir: &Vec2<S>,
    t_max: f64,
    lambda: &[(f64, f64, f64)],
    cut: f64,
) -> Result<f64> {
    let run = FlowRun {
        record_crossings: false,
        record_segments: true,
        detect_period: false,
        stops: None,
    };
    let res = flow_ex(q, start, dir, t_max, &run)?;
    let mut inside = 0.0;
    let mut total = 0.0;
    for (tri, a, b) in &res.segments {
        let (ca, cb, cc) = lambda[*tri];
        let la = ca * a.x.to_f64() + cb * a.y.to_f64() + cc;
        let lb = ca * b.x.to_f64() + cb * b.y.to_f64() + cc;
        let len = (b.clone() - a.clone()).to_f64().norm();
        total += len;
        inside += len * band_fraction(la, lb, cut);
    }
    if total == 0.0 {
        return Err(Error::Numeric("zero flow time".into()));
    }
    Ok(inside / total)
}

/// Fraction of the parameter interval where frac(l) < cut, for l moving
/// affinely from la to lb.
fn band_fraction(la: f64, lb: f64, cut: f64) -> f64 {
    let (lo, hi) = if la <= lb { (la, lb) } else { (lb, la) };
    let span = hi - lo;
    if span < 1e-15 {
        return if (lo - lo.floor()) < cut { 1.0 } else { 0.0 };
    }
    // measure of {t in [lo, hi] : frac(t) < cut}
    let full = |x: f64| -> f64 { x.floor() * cut + (x - x.floor()).min(cut) };
    (full(hi) - full(lo)) / span
}

/// Trajectory export rows: (time, triangle, dart, frac).
pub fn trajectory_csv<S: Scalar>(
    q: &TranslationSurface<S>,
    start: &Point<S>,
    dir: &Vec2<S>,
    t_max: f64,
) -> Result<String> {
    let res = flow(q, start, dir, t_max)?;
    let mut out = String::from("time,triangle,dart,frac\n");
    for c in &res.crossings {
        out.push_str(&format!(
            "{:.12},{},{},{:.12}\n",
            c.time,
            q.tri.tri_of(c.dart),
            c.dart,
            c.frac.to_f64()
        ));
    }
    let kind = match res.outcome {
        FlowOutcome::Periodic { period } => format!("periodic,{period:.12}"),
        FlowOutcome::HitSingularity { time, vertex } => {
            format!("singularity,{time:.12},{vertex}")
        }
        FlowOutcome::Ran { time } => format!("ran,{time:.12}"),
        FlowOutcome::HitSegment { time, arc, .. } => format!("arc,{time:.12},{arc}"),
    };
    out.push_str(&format!("# outcome,{kind}\n"));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::Rat;
    use crate::surface::fixtures::{square_torus_exact, square_torus_f64};
    use crate::surface::TranslationSurface;

    fn pt_exact(q: &TranslationSurface<Rat>, t: Tri, x: (i64, i64), y: (i64, i64)) -> Point<Rat> {
        let p = Point {
            tri: t,
            xy: Vec2::new(crate::num::rat_ratio(x.0, x.1), crate::num::rat_ratio(y.0, y.1)),
        };
        assert!(contains(q, t, &p.xy));
        p
    }

    #[test]
    fn horizontal_flow_on_square_torus_is_periodic() {
        let q = square_torus_exact();
        let p = pt_exact(&q, 0, (1, 2), (1, 4));
        let dir = Vec2::new(crate::num::rat_int(1), crate::num::rat_int(0));
        let res = flow(&q, &p, &dir, 10.0).unwrap();
        match res.outcome {
            FlowOutcome::Periodic { period } => assert!((period - 1.0).abs() < 1e-12),
            o => panic!("expected periodic, got {o:?}"),
        }
    }

    #[test]
    fn diagonal_flow_from_offcenter_is_periodic() {
        // the (1,1)-orbit through (1/2,1/4) misses the lattice and closes
        // after length sqrt(2)
        let q = square_torus_exact();
        let p = pt_exact(&q, 0, (1, 2), (1, 4));
        let dir = Vec2::new(crate::num::rat_int(1), crate::num::rat_int(1));
        let res = flow(&q, &p, &dir, 10.0).unwrap();
        match res.outcome {
            FlowOutcome::Periodic { period } => {
                assert!((period - 2f64.sqrt()).abs() < 1e-12);
            }
            o => panic!("expected periodic, got {o:?}"),
        }
    }

    #[test]
    fn diagonal_flow_from_corner_ray_hits_singularity() {
        // from (1/4, 1/4) along (1,1): orbit passes through lattice points
        let q = square_torus_exact();
        let p = pt_exact(&q, 0, (1, 4), (1, 8));
        let dir = Vec2::new(crate::num::rat_int(2), crate::num::rat_int(1));
        // along (2,1) from (1/4,1/8): reaches (1/4+2t, 1/8+t); lattice hit
        // needs 2t = 3/4 mod 1 and t = 7/8 mod 1: t = 7/8, point (2,1)
        let res = flow(&q, &p, &dir, 10.0).unwrap();
        match res.outcome {
            FlowOutcome::HitSingularity { time, .. } => {
                let expect = (7.0 / 8.0) * 5f64.sqrt();
                assert!((time - expect).abs() < 1e-9, "time {time} vs {expect}");
            }
            o => panic!("expected singular hit, got {o:?}"),
        }
    }

    #[test]
    fn forty_five_degrees_from_center_reaches_corner() {
        let q = square_torus_f64();
        // (0.5, 0.5) sits on the diagonal; nudge into triangle 0
        let p = Point {
            tri: 0,
            xy: Vec2::new(0.5 + 1e-12, 0.5 - 1e-12),
        };
        let dir = Vec2::new(1.0, 1.0);
        let res = flow(&q, &p, &dir, 10.0).unwrap();
        match res.outcome {
            FlowOutcome::HitSingularity { time, .. } => {
                assert!((time - 0.5 * 2f64.sqrt()).abs() < 1e-6);
            }
            o => panic!("expected singular hit, got {o:?}"),
        }
    }

    #[test]
    fn birkhoff_indicator_complement_sums_to_one() {
        let q = square_torus_f64();
        let p = Point {
            tri: 0,
            xy: Vec2::new(0.3, 0.2),
        };
        let dir = Vec2::new(1.0, 0.5f64.sqrt());
        let a = birkhoff_average(&q, &p, &dir, 500.0, &[0]).unwrap();
        let b = birkhoff_average(&q, &p, &dir, 500.0, &[1]).unwrap();
        assert!((a + b - 1.0).abs() < 1e-12);
    }

    #[test]
    fn full_region_average_is_one() {
        let q = square_torus_f64();
        let p = Point {
            tri: 0,
            xy: Vec2::new(0.3, 0.2),
        };
        let dir = Vec2::new(1.0, 0.3);
        let a = birkhoff_average(&q, &p, &dir, 100.0, &[0, 1]).unwrap();
        assert_eq!(a, 1.0);
    }

    #[test]
    fn irrational_flow_runs_without_singularity() {
        let q = crate::builders::torus(Vec2::new(1.0, 2f64.sqrt()), Vec2::new(0.0, 1.0)).unwrap();
        let p = centroid(&q, 0);
        let dir = Vec2::new(1.0, 0.0);
        let res = flow(&q, &p, &dir, 10_000.0).unwrap();
        assert!(matches!(res.outcome, FlowOutcome::Ran { .. }));
    }

    #[test]
    fn stop_segment_is_hit() {
        let q = square_torus_f64();
        // vertical stop segment in triangle 0 at x = 0.75, y in (0.05, 0.7)
        let mut stops = StopSegments {
            by_tri: vec![vec![], vec![]],
        };
        stops.by_tri[0].push((0, 0, Vec2::new(0.75, 0.05), Vec2::new(0.75, 0.7)));
        let p = Point {
            tri: 0,
            xy: Vec2::new(0.25, 0.1),
        };
        let run = FlowRun {
            stops: Some(&stops),
            ..FlowRun::default()
        };
        let res = flow_ex(&q, &p, &Vec2::new(1.0, 0.0), 10.0, &run).unwrap();
        match res.outcome {
            FlowOutcome::HitSegment { time, arc, .. } => {
                assert_eq!(arc, 0);
                assert!((time - 0.5).abs() < 1e-12);
            }
            o => panic!("expected segment hit, got {o:?}"),
        }
    }
}
