//! The locus of two tori glued along a slit: slit construction with
//! shears, the order-2 involution and its projections, checkerboard
//! subdivisions with controlled area imbalance, and the sheared family
//! used as a non-unique-ergodicity witness.

use crate::builders::two_marked_torus;
use crate::cochain::Cochain1;
use crate::error::{Error, Result};
use crate::flip::Transport;
use crate::geom::Vec2;
use crate::num::{looks_rational, Scalar};
use crate::surface::{Dart, TranslationSurface, Triangulation, VertexLabel};
use std::collections::BTreeMap;

/// Parameters of a surface in the locus: a lattice, a slit vector interior
/// to the fundamental parallelogram, and horizontal shears of the two tori.
#[derive(Clone, Debug)]
pub struct SlitTorusData<S> {
    pub u: Vec2<S>,
    pub v: Vec2<S>,
    pub slit: Vec2<S>,
    pub shears: (S, S),
}

/// Order-2 translation equivalence as a dart permutation.
#[derive(Clone, Debug)]
pub struct Involution {
    pub perm: Vec<Dart>,
}

impl Involution {
    pub fn apply(&self, d: Dart) -> Dart {
        self.perm[d]
    }

    pub fn is_order_two(&self) -> bool {
        self.perm.iter().enumerate().all(|(d, &e)| {
            e < self.perm.len() && self.perm[e] == d && e != d
        })
    }

    /// Pullback action on cochains: (i* beta)(d) = beta(i(d)).
    pub fn pullback<S: Scalar>(&self, beta: &Cochain1<S>) -> Cochain1<S> {
        Cochain1::from_raw(
            (0..self.perm.len())
                .map(|d| beta.value(self.perm[d]).clone())
                .collect(),
        )
    }
}

/// Number of darts in one torus copy of the slit construction.
const COPY: usize = 12;

/// Builds the genus-2 surface from the slit construction: two copies of
/// the (u, v)-torus cut along the slit from the origin to `slit` and
/// cross-glued, with horizontal shears applied to the copies.
///
/// Regions "A" and "B" name the two torus copies. The slit must lie
/// strictly inside the fundamental parallelogram; shears require a
/// horizontal slit.
pub fn slit_construct<S: Scalar>(
    data: &SlitTorusData<S>,
) -> Result<(TranslationSurface<S>, Involution)> {
    let det = data.u.cross(&data.v);
    if !det.is_positive() {
        return Err(Error::OrientationViolation(
            "lattice generators not positively oriented".into(),
        ));
    }
    // slit = alpha u + beta v with 0 < alpha, beta < 1 keeps the slit off
    // the lattice
    let alpha = data.slit.cross(&data.v) / det.clone();
    let beta = data.u.cross(&data.slit) / det;
    for c in [&alpha, &beta] {
        if !c.is_positive() || *c >= S::one() {
            return Err(Error::SlitThroughLatticePoint);
        }
    }
    let shearing = !(data.shears.0.is_zero() && data.shears.1.is_zero());
    if shearing && !data.slit.y.near_zero(data.u.to_f64().norm().max(data.v.to_f64().norm())) {
        return Err(Error::InvalidSurface(
            "shears require a horizontal slit".into(),
        ));
    }

    // model copy to borrow the validated combinatorics
    let model = two_marked_torus(data.u.clone(), data.v.clone(), data.slit.clone())?;
    let mt = &model.tri;

    let mut triangles = Vec::with_capacity(8);
    for copy in 0..2 {
        for t in &mt.triangles {
            triangles.push([t[0] + copy * COPY, t[1] + copy * COPY, t[2] + copy * COPY]);
        }
    }
    // gluing: within copies except the slit pair (darts 4/5) which crosses
    let mut twin = vec![0usize; 2 * COPY];
    for d in 0..COPY {
        for copy in 0..2 {
            twin[d + copy * COPY] = mt.twin[d] + copy * COPY;
        }
    }
    let (a4, a5, b4, b5) = (4, 5, 4 + COPY, 5 + COPY);
    twin[a5] = b4;
    twin[b4] = a5;
    twin[b5] = a4;
    twin[a4] = b5;

    let labels = vec![
        VertexLabel {
            label: "z0".into(),
            order: 1,
            dart: 0,
        },
        VertexLabel {
            label: "z1".into(),
            order: 1,
            dart: 4,
        },
    ];
    let tri = Triangulation::new(triangles, twin, labels)?;

    let mut hol: Vec<Option<Vec2<S>>> = vec![None; 2 * COPY];
    for copy in 0..2 {
        let s = if copy == 0 {
            data.shears.0.clone()
        } else {
            data.shears.1.clone()
        };
        for d in 0..COPY {
            let h = model.hol(d);
            hol[d + copy * COPY] = Some(Vec2::new(
                h.x.clone() + s.clone() * h.y.clone(),
                h.y.clone(),
            ));
        }
    }
    let mut regions = BTreeMap::new();
    regions.insert("A".to_string(), vec![0usize, 1, 2, 3]);
    regions.insert("B".to_string(), vec![4usize, 5, 6, 7]);

    let q = TranslationSurface::new(tri, hol, regions)?;
    let perm: Vec<Dart> = (0..2 * COPY)
        .map(|d| if d < COPY { d + COPY } else { d - COPY })
        .collect();
    let inv = Involution { perm };
    Ok((q, inv))
}

/// Validates that `inv` is an order-2 holonomy-preserving equivalence.
pub fn involution_is_equivalence<S: Scalar>(
    q: &TranslationSurface<S>,
    inv: &Involution,
) -> bool {
    if !inv.is_order_two() {
        return false;
    }
    let scale = q.max_edge();
    (0..q.tri.num_darts()).all(|d| {
        let a = q.hol(d);
        let b = q.hol(inv.apply(d));
        (a.x.clone() - b.x.clone()).near_zero(scale) && (a.y.clone() - b.y.clone()).near_zero(scale)
    })
}

/// Quotient by the involution: the underlying once-marked torus.
pub fn project_to_torus<S: Scalar>(
    q: &TranslationSurface<S>,
    _inv: &Involution,
) -> Result<TranslationSurface<S>> {
    // copy A carries the full quotient data: its lattice generators
    let u = q.hol(0).clone();
    let v = q.hol(2).clone();
    crate::builders::torus(u, v)
}

/// Eigenspace projections of a cochain under the involution:
/// plus = (beta + i* beta)/2, minus = (beta - i* beta)/2.
pub fn p_projections<S: Scalar>(
    inv: &Involution,
    beta: &Cochain1<S>,
) -> (Cochain1<S>, Cochain1<S>) {
    let pb = inv.pullback(beta);
    let half = S::from_ratio(1, 2);
    let plus = beta.add(&pb).scale(&half);
    let minus = beta.sub(&pb).scale(&half);
    (plus, minus)
}

/// Desk-scale aperiodicity certificate: no periodic horizontal orbit is
/// detected from triangle centroids within the cutoff length (20 times the
/// diameter estimate). Reports the cutoff used.
pub fn aperiodicity_certificate<S: Scalar>(q: &TranslationSurface<S>) -> Result<f64> {
    let cutoff = 20.0 * q.diameter_estimate();
    let dir = Vec2::new(S::one(), S::zero());
    for t in 0..q.tri.num_triangles() {
        let p = crate::flow::centroid(q, t);
        let run = crate::flow::FlowRun {
            record_crossings: false,
            record_segments: false,
            detect_period: true,
            stops: None,
        };
        match crate::flow::flow_ex(q, &p, &dir, cutoff, &run) {
            Ok(res) => {
                if let crate::flow::FlowOutcome::Periodic { period } = res.outcome {
                    return Err(Error::AperiodicityUnverified(period));
                }
            }
            Err(Error::StartAtSingularity) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(cutoff)
}

/// Verifies the balanced-iff-anti-invariant correspondence for a cocycle
/// with Hahn provenance on an aperiodic surface: L_q(beta) = 0 iff the
/// anti-invariant part of beta equals beta.
pub fn balanced_is_antiinvariant_check<S: Scalar>(
    q: &TranslationSurface<S>,
    inv: &Involution,
    f: &crate::cocycle::FoliationCocycle<S>,
) -> Result<bool> {
    aperiodicity_certificate(q)?;
    let beta = f.class();
    let l = crate::cocycle::signed_mass(q, &beta)?.to_f64();
    let (_, minus) = p_projections(inv, &beta);
    let scale = q.max_edge().max(beta.max_abs());
    let anti_invariant = minus.sub(&beta).is_zero(scale);
    let balanced = l.abs() <= 1e-9 * scale.max(1.0);
    Ok(balanced == anti_invariant)
}

/// Result of the checkerboard search on the standard torus R^2/Z^2 with a
/// slit of holonomy (x, alpha x).
#[derive(Clone, Debug)]
pub struct CheckerboardResult {
    pub m: i64,
    pub n: i64,
    pub k: u64,
    /// Holonomy of the second slit k(m,n) + (x, alpha x).
    pub sigma2: Vec2<f64>,
    /// 1 - x (m alpha - n).
    pub imbalance: f64,
    /// Angle of sigma2 against the horizontal.
    pub theta: f64,
}

/// Searches coprime (m, n) with |x(m alpha - n) - (1 - c)| < eta and an
/// even k placing the second slit's length in (big_h, (1+eta) big_h) with
/// |theta| < eta.
pub fn checkerboard_search(
    x: f64,
    alpha: f64,
    c: f64,
    eta: f64,
    big_h: f64,
    search_bound: u64,
) -> Result<CheckerboardResult> {
    if !(0.0 < c && c < 1.0) {
        return Err(Error::InsufficientData("imbalance target must be in (0,1)".into()));
    }
    if looks_rational(alpha, 1_000_000, 5e-14) {
        let (p, qd) = crate::num::rational_approx(alpha, 1_000_000);
        return Err(Error::RationalSlope(p, qd as i64));
    }
    let target = 1.0 - c;
    for radius in 1..=(search_bound as i64) {
        let mut candidates: Vec<(i64, i64)> = Vec::new();
        for m in 1..=radius {
            for n in -radius..=radius {
                if m.max(n.abs()) == radius && num_integer::gcd(m, n) == 1 {
                    candidates.push((m, n));
                }
            }
        }
        candidates.sort();
        for (m, n) in candidates {
            let val = x * (m as f64 * alpha - n as f64);
            if val <= 0.0 || (val - target).abs() >= eta {
                continue;
            }
            // even k with length in the window and a small angle
            let step = ((m * m + n * n) as f64).sqrt();
            let mut k = ((big_h / step).ceil() as u64).max(2);
            if k % 2 == 1 {
                k += 1;
            }
            for _ in 0..64 {
                let sigma2 = Vec2::new(
                    k as f64 * m as f64 + x,
                    k as f64 * n as f64 + x * alpha,
                );
                let len = sigma2.norm();
                if len > (1.0 + eta) * big_h {
                    break;
                }
                let theta = sigma2.angle();
                if len > big_h && theta.abs() < eta {
                    return Ok(CheckerboardResult {
                        m,
                        n,
                        k,
                        sigma2,
                        imbalance: 1.0 - val,
                        theta,
                    });
                }
                k += 2;
            }
        }
    }
    Err(Error::SearchExhausted(search_bound))
}

/// Report of the four checkerboard verifications.
#[derive(Clone, Debug)]
pub struct CheckerboardReport {
    pub z2_trivial: bool,
    pub coloring_proper: bool,
    pub imbalance_from_coloring: f64,
    pub imbalance_formula: f64,
    pub strip_area: f64,
    pub strip_area_det: f64,
}

impl CheckerboardReport {
    pub fn all_pass(&self, tol: f64) -> bool {
        self.z2_trivial
            && self.coloring_proper
            && (self.imbalance_from_coloring - self.imbalance_formula).abs() <= tol
            && (self.strip_area - self.strip_area_det).abs() <= 1e-12
    }
}

fn frac(v: f64) -> f64 {
    v - v.floor()
}

fn wrap(p: Vec2<f64>) -> Vec2<f64> {
    Vec2::new(frac(p.x), frac(p.y))
}

/// Face index: strips 1..k-1 (strip j based at Q_{j-1}), complement = 0.
fn locate(
    p: &Vec2<f64>,
    bases: &[Vec2<f64>],
    m_col1: &Vec2<f64>,
    m_col2: &Vec2<f64>,
    k: usize,
) -> usize {
    let det = m_col1.x * m_col2.y - m_col1.y * m_col2.x;
    let zr = (m_col1.x.abs() + m_col2.x.abs()).ceil() as i64 + 1;
    for j in 1..k {
        let base = &bases[j - 1];
        for zx in -zr..=zr {
            for zy in -2..=2i64 {
                let dx = p.x + zx as f64 - base.x;
                let dy = p.y + zy as f64 - base.y;
                let a = (dx * m_col2.y - dy * m_col2.x) / det;
                let b = (m_col1.x * dy - m_col1.y * dx) / det;
                if (0.0..=1.0).contains(&a) && (0.0..=1.0).contains(&b) {
                    return j;
                }
            }
        }
    }
    0
}

/// Verifies the checkerboard combinatorics on the standard torus: Z/2
/// triviality, a proper two-coloring of the strip subdivision, the
/// coloring's area imbalance against 1 - x(m alpha - n), and the strip
/// area against the determinant formula.
pub fn checkerboard_verify(
    x: f64,
    alpha: f64,
    result: &CheckerboardResult,
) -> Result<CheckerboardReport> {
    let (m, n, k) = (result.m as f64, result.n as f64, result.k as usize);
    let kf = result.k as f64;
    // (a) [sigma1] - [sigma2] = -k(m,n) in H_1(T; Z/2)
    let z2_trivial = (result.k * result.m.unsigned_abs()) % 2 == 0
        && (result.k * result.n.unsigned_abs()) % 2 == 0;

    // division points Q_j = (j/k) sigma1 mod Z^2; sigma2(j/k) must land on
    // them
    let sigma1 = Vec2::new(x, x * alpha);
    let sigma2 = &result.sigma2;
    let q_pts: Vec<Vec2<f64>> = (1..k)
        .map(|j| wrap(Vec2::new(sigma1.x * j as f64 / kf, sigma1.y * j as f64 / kf)))
        .collect();
    // strip j is based at Q_{j-1}, starting from Q_0 at the origin
    let bases: Vec<Vec2<f64>> = std::iter::once(Vec2::new(0.0, 0.0))
        .chain(q_pts.iter().cloned())
        .take(k.saturating_sub(1))
        .collect();
    for (j, qp) in q_pts.iter().enumerate() {
        let s2 = wrap(Vec2::new(
            sigma2.x * (j + 1) as f64 / kf,
            sigma2.y * (j + 1) as f64 / kf,
        ));
        let d = ((s2.x - qp.x).rem_euclid(1.0)).min((qp.x - s2.x).rem_euclid(1.0))
            + ((s2.y - qp.y).rem_euclid(1.0)).min((qp.y - s2.y).rem_euclid(1.0));
        if d > 1e-7 {
            return Err(Error::ColoringInconsistent(format!(
                "division point {j} mismatch ({d:.2e})"
            )));
        }
    }

    // strip sides sigma2/k and sigma1/k
    let col1 = Vec2::new(sigma2.x / kf, sigma2.y / kf);
    let col2 = Vec2::new(sigma1.x / kf, sigma1.y / kf);
    let strip_area_det = (col1.x * col2.y - col1.y * col2.x).abs();
    let strip_area = (x / kf) * (m * alpha - n).abs();

    // adjacency sampling: both sides of every sigma1- and sigma2-piece
    // must carry different colors; strips are colored by parity and the
    // complement is color 0
    let color = |face: usize| -> usize {
        if face == 0 {
            0
        } else {
            face % 2
        }
    };
    let widths = strip_area_det / col1.norm().max(col2.norm());
    let eps = (widths * 0.01).max(1e-12);
    let mut coloring_proper = true;
    // sigma2 pieces: piece j from sigma2((j-1)/k) to sigma2(j/k)
    let n2 = Vec2::new(-col1.y / col1.norm(), col1.x / col1.norm());
    for j in 1..=k {
        let mid = wrap(Vec2::new(
            sigma2.x * (j as f64 - 0.5) / kf,
            sigma2.y * (j as f64 - 0.5) / kf,
        ));
        let a = locate(
            &wrap(Vec2::new(mid.x + eps * n2.x, mid.y + eps * n2.y)),
            &bases,
            &col1,
            &col2,
            k,
        );
        let b = locate(
            &wrap(Vec2::new(mid.x - eps * n2.x, mid.y - eps * n2.y)),
            &bases,
            &col1,
            &col2,
            k,
        );
        if color(a) == color(b) {
            coloring_proper = false;
        }
    }
    let n1 = Vec2::new(-col2.y / col2.norm(), col2.x / col2.norm());
    for j in 1..=k {
        let mid = wrap(Vec2::new(
            sigma1.x * (j as f64 - 0.5) / kf,
            sigma1.y * (j as f64 - 0.5) / kf,
        ));
        let a = locate(
            &wrap(Vec2::new(mid.x + eps * n1.x, mid.y + eps * n1.y)),
            &bases,
            &col1,
            &col2,
            k,
        );
        let b = locate(
            &wrap(Vec2::new(mid.x - eps * n1.x, mid.y - eps * n1.y)),
            &bases,
            &col1,
            &col2,
            k,
        );
        if color(a) == color(b) {
            coloring_proper = false;
        }
    }

    // (c) area difference of the two colors from the combinatorial coloring
    let odd_strips = (1..k).filter(|j| j % 2 == 1).count() as f64;
    let even_strips = (1..k).filter(|j| j % 2 == 0).count() as f64;
    let color1_area = odd_strips * strip_area;
    let color0_area = 1.0 - (k as f64 - 1.0) * strip_area + even_strips * strip_area;
    let imbalance_from_coloring = (color0_area - color1_area).abs();
    let imbalance_formula = (1.0 - x * (m * alpha - n)).abs();

    Ok(CheckerboardReport {
        z2_trivial,
        coloring_proper,
        imbalance_from_coloring,
        imbalance_formula,
        strip_area,
        strip_area_det,
    })
}

/// The sheared slit-pair family: torus A sheared by u_{2a}, torus B fixed.
/// Equals the tremor of the plain slit pair by 2a times restriction(A).
pub fn nonergodic_family<S: Scalar>(
    u: Vec2<S>,
    v: Vec2<S>,
    slit: Vec2<S>,
    a: S,
) -> Result<(TranslationSurface<S>, Involution)> {
    let slope = u.y.to_f64() / v.y.to_f64();
    if u.y.near_zero(1.0) || v.y.near_zero(1.0) || looks_rational(slope, 1_000_000, 5e-14) {
        return Err(Error::PeriodicHorizontal);
    }
    let two_a = a.clone() + a;
    slit_construct(&SlitTorusData {
        u,
        v,
        slit,
        shears: (two_a, S::zero()),
    })
}

/// Identity transport placeholder for constructions that stay in chart.
pub fn no_transport() -> Transport {
    Transport::identity()
}
