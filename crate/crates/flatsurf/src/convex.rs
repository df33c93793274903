//! Convex polytopes in dimension 2 and 3: hulls, facet inequalities, the
//! inradius linear program, and Monte-Carlo thin-set fractions with the
//! explicit covering-lemma constants.

use crate::error::{Error, Result};
use rand::Rng;

/// Threshold constant c = 1 / (2^(d+2) d): 1/32 in d=2, 1/96 in d=3.
pub fn thin_constant(d: usize) -> f64 {
    1.0 / (f64::powi(2.0, d as i32 + 2) * d as f64)
}

/// Bound constant C = 6 * 3^(d-1) (d-1) / (2^(d-1) - 1): 18 in d=2, 36 in
/// d=3.
pub fn thin_bound(d: usize) -> f64 {
    let c_prime = f64::powi(3.0, d as i32 - 1) * (d as f64 - 1.0)
        / (f64::powi(2.0, d as i32 - 1) - 1.0);
    6.0 * c_prime
}

/// Volume of the unit ball.
pub fn unit_ball_volume(d: usize) -> f64 {
    match d {
        2 => std::f64::consts::PI,
        3 => 4.0 * std::f64::consts::PI / 3.0,
        _ => unreachable!("dimensions 2 and 3 only"),
    }
}

/// Full-dimensional convex polytope given by hull vertices and facet
/// inequalities a.x <= b with unit normals.
#[derive(Clone, Debug)]
pub struct ConvexBody {
    pub dim: usize,
    pub vertices: Vec<Vec<f64>>,
    pub facets: Vec<(Vec<f64>, f64)>,
    pub volume: f64,
    pub bbox: (Vec<f64>, Vec<f64>),
    inradius: f64,
}

impl ConvexBody {
    pub fn from_points(dim: usize, pts: &[Vec<f64>]) -> Result<ConvexBody> {
        let mut body = match dim {
            2 => hull_2d(pts),
            3 => hull_3d(pts),
            _ => Err(Error::Degenerate("dimension must be 2 or 3".into())),
        }?;
        body.inradius = chebyshev_radius(&body)?;
        if body.inradius <= 0.0 {
            return Err(Error::Degenerate("zero inradius".into()));
        }
        Ok(body)
    }

    pub fn contains(&self, p: &[f64], tol: f64) -> bool {
        self.facets
            .iter()
            .all(|(a, b)| dot(a, p) <= *b + tol)
    }

    pub fn diameter(&self) -> f64 {
        let mut best: f64 = 0.0;
        for (i, p) in self.vertices.iter().enumerate() {
            for q in &self.vertices[i + 1..] {
                best = best.max(dist(p, q));
            }
        }
        best
    }

    /// Chebyshev center radius: the largest inscribed ball, solved as a
    /// linear program over the facet inequalities (computed once at
    /// construction).
    pub fn inradius(&self) -> Result<f64> {
        Ok(self.inradius)
    }

    /// Uniform sample by bounding-box rejection.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        let (lo, hi) = &self.bbox;
        loop {
            let p: Vec<f64> = (0..self.dim)
                .map(|i| rng.gen_range(lo[i]..hi[i]))
                .collect();
            if self.contains(&p, 0.0) {
                return p;
            }
        }
    }
}

/// maximize r subject to a_i . x + r <= b_i over the facet normals
/// (unit), via a dense two-phase simplex in floats. The polytope is
/// bounded and contains interior points, so the LP is feasible and
/// bounded; Bland's rule with a small pivot tolerance keeps it stable.
fn chebyshev_radius(k: &ConvexBody) -> Result<f64> {
    let d = k.dim;
    let m = k.facets.len();
    if m < d + 1 {
        return Err(Error::Degenerate("not enough facets".into()));
    }
    // shift coordinates so that 0 is interior (vertex centroid), making
    // every rhs positive; then x free split is unnecessary for phase 1
    // (slack basis is feasible) and a plain max-simplex suffices.
    let centroid: Vec<f64> = (0..d)
        .map(|i| k.vertices.iter().map(|v| v[i]).sum::<f64>() / k.vertices.len() as f64)
        .collect();
    // variables: x+ (d), x- (d), r (1), slacks (m)
    let n = 2 * d + 1 + m;
    let mut t = vec![vec![0.0f64; n + 1]; m];
    for (i, (a, b)) in k.facets.iter().enumerate() {
        for j in 0..d {
            t[i][j] = a[j];
            t[i][d + j] = -a[j];
        }
        t[i][2 * d] = 1.0;
        t[i][2 * d + 1 + i] = 1.0;
        t[i][n] = b - dot(a, &centroid);
        if t[i][n] < 0.0 {
            return Err(Error::Degenerate("centroid outside body".into()));
        }
    }
    let mut cost = vec![0.0f64; n];
    cost[2 * d] = -1.0; // minimize -r
    let mut basis: Vec<usize> = (2 * d + 1..n).collect();
    for _ in 0..10_000 {
        // reduced costs
        let mut enter = None;
        for j in 0..n {
            if basis.contains(&j) {
                continue;
            }
            let mut rj = cost[j];
            for i in 0..m {
                if cost[basis[i]] != 0.0 {
                    rj -= cost[basis[i]] * t[i][j];
                }
            }
            if rj < -1e-12 {
                enter = Some(j);
                break;
            }
        }
        let Some(e) = enter else { break };
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            if t[i][e] > 1e-12 {
                let ratio = t[i][n] / t[i][e];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => {
                        ratio < lr - 1e-15 || (ratio <= lr + 1e-15 && basis[i] < basis[*li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((l, _)) = leave else {
            return Err(Error::Degenerate("unbounded inradius LP".into()));
        };
        let piv = t[l][e];
        for x in t[l].iter_mut() {
            *x /= piv;
        }
        for i in 0..m {
            if i != l && t[i][e].abs() > 0.0 {
                let f = t[i][e];
                for j in 0..=n {
                    t[i][j] -= f * t[l][j];
                }
            }
        }
        basis[l] = e;
    }
    let mut r = 0.0;
    for i in 0..m {
        if basis[i] == 2 * d {
            r = t[i][n];
        }
    }
    Ok(r.max(0.0))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn bbox(pts: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let d = pts[0].len();
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for p in pts {
        for i in 0..d {
            lo[i] = lo[i].min(p[i]);
            hi[i] = hi[i].max(p[i]);
        }
    }
    (lo, hi)
}

fn hull_2d(pts: &[Vec<f64>]) -> Result<ConvexBody> {
    let mut p: Vec<(f64, f64)> = pts.iter().map(|v| (v[0], v[1])).collect();
    p.sort_by(|a, b| a.partial_cmp(b).unwrap());
    p.dedup();
    if p.len() < 3 {
        return Err(Error::Degenerate("fewer than 3 distinct points".into()));
    }
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let mut lower: Vec<(f64, f64)> = Vec::new();
    for &pt in &p {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], pt) <= 0.0
        {
            lower.pop();
        }
        lower.push(pt);
    }
    let mut upper: Vec<(f64, f64)> = Vec::new();
    for &pt in p.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], pt) <= 0.0
        {
            upper.pop();
        }
        upper.push(pt);
    }
    lower.pop();
    upper.pop();
    let hull: Vec<(f64, f64)> = lower.into_iter().chain(upper).collect();
    if hull.len() < 3 {
        return Err(Error::Degenerate("degenerate 2d hull".into()));
    }
    // area and edge inequalities (ccw hull)
    let mut area = 0.0;
    let mut facets = Vec::new();
    let n = hull.len();
    for i in 0..n {
        let a = hull[i];
        let b = hull[(i + 1) % n];
        area += a.0 * b.1 - a.1 * b.0;
        // outward normal of ccw edge a->b
        let e = (b.0 - a.0, b.1 - a.1);
        let len = (e.0 * e.0 + e.1 * e.1).sqrt();
        let nrm = vec![e.1 / len, -e.0 / len];
        let rhs = nrm[0] * a.0 + nrm[1] * a.1;
        facets.push((nrm, rhs));
    }
    area /= 2.0;
    if area <= 0.0 {
        return Err(Error::Degenerate("zero hull area".into()));
    }
    let vertices: Vec<Vec<f64>> = hull.iter().map(|&(x, y)| vec![x, y]).collect();
    let bb = bbox(&vertices);
    Ok(ConvexBody {
        dim: 2,
        vertices,
        facets,
        volume: area,
        bbox: bb,
        inradius: 0.0,
    })
}

fn hull_3d(pts: &[Vec<f64>]) -> Result<ConvexBody> {
    let mut p: Vec<Vec<f64>> = pts.to_vec();
    p.dedup_by(|a, b| dist(a, b) < 1e-12);
    if p.len() < 4 {
        return Err(Error::Degenerate("fewer than 4 points".into()));
    }
    let scale = p
        .iter()
        .flat_map(|v| v.iter())
        .fold(0.0f64, |m, &x| m.max(x.abs()))
        .max(1.0);
    let eps = 1e-12 * scale;

    // initial simplex: spread-out quadruple
    let mut i0 = 0;
    let mut i1 = 1;
    let mut best = 0.0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            let d = dist(&p[i], &p[j]);
            if d > best {
                best = d;
                i0 = i;
                i1 = j;
            }
        }
    }
    if best < eps {
        return Err(Error::Degenerate("all points coincide".into()));
    }
    let sub = |a: &[f64], b: &[f64]| vec![a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    let crossv = |a: &[f64], b: &[f64]| {
        vec![
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ]
    };
    let e01 = sub(&p[i1], &p[i0]);
    let mut i2 = usize::MAX;
    let mut best2 = 0.0;
    for i in 0..p.len() {
        let c = crossv(&e01, &sub(&p[i], &p[i0]));
        let a = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
        if a > best2 {
            best2 = a;
            i2 = i;
        }
    }
    if best2 < eps * eps {
        return Err(Error::Degenerate("points are collinear".into()));
    }
    let nrm = crossv(&e01, &sub(&p[i2], &p[i0]));
    let mut i3 = usize::MAX;
    let mut best3 = 0.0;
    for i in 0..p.len() {
        let v = dot(&nrm, &sub(&p[i], &p[i0])).abs();
        if v > best3 {
            best3 = v;
            i3 = i;
        }
    }
    if best3 < eps * best2 {
        return Err(Error::Degenerate("points are coplanar".into()));
    }

    // incremental hull over triangular faces
    #[derive(Clone)]
    struct Face {
        v: [usize; 3],
        n: Vec<f64>,
        b: f64,
        alive: bool,
    }
    let mk_face = |p: &[Vec<f64>], a: usize, b: usize, c: usize, interior: &[f64]| -> Face {
        let mut n = crossv(&sub(&p[b], &p[a]), &sub(&p[c], &p[a]));
        let mut rhs = dot(&n, &p[a]);
        if dot(&n, interior) > rhs {
            n = vec![-n[0], -n[1], -n[2]];
            rhs = -rhs;
            return Face {
                v: [a, c, b],
                n,
                b: rhs,
                alive: true,
            };
        }
        Face {
            v: [a, b, c],
            n,
            b: rhs,
            alive: true,
        }
    };
    let interior: Vec<f64> = (0..3)
        .map(|k| (p[i0][k] + p[i1][k] + p[i2][k] + p[i3][k]) / 4.0)
        .collect();
    let mut faces = vec![
        mk_face(&p, i0, i1, i2, &interior),
        mk_face(&p, i0, i1, i3, &interior),
        mk_face(&p, i0, i2, i3, &interior),
        mk_face(&p, i1, i2, i3, &interior),
    ];
    for (idx, pt) in p.iter().enumerate() {
        if idx == i0 || idx == i1 || idx == i2 || idx == i3 {
            continue;
        }
        let visible: Vec<usize> = faces
            .iter()
            .enumerate()
            .filter(|(_, f)| f.alive && dot(&f.n, pt) > f.b + eps * norm3(&f.n))
            .map(|(i, _)| i)
            .collect();
        if visible.is_empty() {
            continue;
        }
        // horizon edges: edges of visible faces shared with a hidden face
        let mut edge_count: std::collections::BTreeMap<(usize, usize), i32> = Default::default();
        for &fi in &visible {
            let v = faces[fi].v;
            for (a, b) in [(v[0], v[1]), (v[1], v[2]), (v[2], v[0])] {
                let key = (a.min(b), a.max(b));
                *edge_count.entry(key).or_insert(0) += 1;
            }
        }
        for &fi in &visible {
            faces[fi].alive = false;
        }
        for ((a, b), cnt) in edge_count {
            if cnt == 1 {
                faces.push(mk_face(&p, a, b, idx, &interior));
            }
        }
    }

    let live: Vec<&Face> = faces.iter().filter(|f| f.alive).collect();
    let mut vset: Vec<usize> = live.iter().flat_map(|f| f.v).collect();
    vset.sort_unstable();
    vset.dedup();
    let vertices: Vec<Vec<f64>> = vset.iter().map(|&i| p[i].clone()).collect();
    let mut volume = 0.0;
    let mut facets = Vec::new();
    for f in &live {
        let n_len = norm3(&f.n);
        if n_len < eps {
            continue;
        }
        facets.push((
            f.n.iter().map(|x| x / n_len).collect::<Vec<f64>>(),
            f.b / n_len,
        ));
        // tetra from the interior point
        let a = sub(&p[f.v[0]], &interior);
        let b = sub(&p[f.v[1]], &interior);
        let c = sub(&p[f.v[2]], &interior);
        volume += dot(&a, &crossv(&b, &c)).abs() / 6.0;
    }
    if volume <= 0.0 || facets.len() < 4 {
        return Err(Error::Degenerate("zero hull volume".into()));
    }
    let bb = bbox(&vertices);
    Ok(ConvexBody {
        dim: 3,
        vertices,
        facets,
        volume,
        bbox: bb,
        inradius: 0.0,
    })
}

fn norm3(v: &[f64]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// Uniform point in the ball B(center, r).
fn sample_ball<R: Rng>(rng: &mut R, center: &[f64], r: f64) -> Vec<f64> {
    let d = center.len();
    loop {
        let p: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n2: f64 = p.iter().map(|x| x * x).sum();
        if n2 <= 1.0 {
            return (0..d).map(|i| center[i] + r * p[i]).collect();
        }
    }
}

/// Monte-Carlo estimate of |K^(eps)| / |K|: the fraction of K where the
/// eps R ball mass is at most c (eps R)^d, with c = 1/(2^(d+2) d). Points
/// whose estimated mass is within two standard errors of the threshold
/// count as thin, keeping the verified inequality one-sided.
pub fn eps_thin_fraction(
    k: &ConvexBody,
    eps: f64,
    n_outer: usize,
    n_inner: usize,
    seed: u64,
) -> Result<f64> {
    let r = k.inradius()?;
    if r <= 0.0 {
        return Err(Error::Degenerate("zero inradius".into()));
    }
    let rad = eps * r;
    let threshold = thin_constant(k.dim) * rad.powi(k.dim as i32);
    let ball_vol = unit_ball_volume(k.dim) * rad.powi(k.dim as i32);
    let mut rng = crate::rng(seed);
    let mut thin = 0usize;
    for _ in 0..n_outer {
        let x = k.sample(&mut rng);
        let mut inside = 0usize;
        for _ in 0..n_inner {
            let y = sample_ball(&mut rng, &x, rad);
            if k.contains(&y, 0.0) {
                inside += 1;
            }
        }
        let p = inside as f64 / n_inner as f64;
        let sigma = (p * (1.0 - p) / n_inner as f64).sqrt();
        let mass = p * ball_vol;
        if mass <= threshold + 2.0 * sigma * ball_vol {
            thin += 1;
        }
    }
    Ok(thin as f64 / n_outer as f64)
}

/// Documented random polytope generator: convex hull of 3..=30 uniform
/// points in a box, rejection-sampled to inradius >= 0.05 diameter.
pub fn random_polytope<R: Rng>(dim: usize, rng: &mut R) -> ConvexBody {
    loop {
        let n = rng.gen_range(dim + 1..=30);
        let pts: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..dim).map(|_| rng.gen_range(0.0..1.0)).collect())
            .collect();
        let Ok(body) = ConvexBody::from_points(dim, &pts) else {
            continue;
        };
        let Ok(r) = body.inradius() else { continue };
        if r >= 0.05 * body.diameter() {
            return body;
        }
    }
}

/// Samples points of the corollary's thin set
/// K^(eps, cbar) = { x in K : |B(x, eps R) ∩ K| < cbar |B(x, eps R)| }.
///
/// Candidates are proposed near the boundary features (convex
/// combinations pulled toward vertex/edge points) and kept when the
/// Monte-Carlo ball mass classifies them as thin; the proposal only
/// shapes the density, membership is decided by the classifier.
pub fn sample_thin_set<R: Rng>(
    k: &ConvexBody,
    eps: f64,
    cbar: f64,
    want: usize,
    rng: &mut R,
) -> Vec<Vec<f64>> {
    let Ok(r) = k.inradius() else { return vec![] };
    let rad = eps * r;
    let n_full = 50_000usize;
    let mut out = Vec::new();
    let nv = k.vertices.len();
    for _ in 0..500 * want {
        if out.len() >= want {
            break;
        }
        let v1 = &k.vertices[rng.gen_range(0..nv)];
        let v2 = &k.vertices[rng.gen_range(0..nv)];
        let s: f64 = rng.gen_range(0.0..1.0);
        let edge_pt: Vec<f64> = (0..k.dim)
            .map(|i| (1.0 - s) * v1[i] + s * v2[i])
            .collect();
        let y = k.sample(rng);
        let t: f64 = rng.gen_range(0.0f64..1.0).powi(3);
        let x: Vec<f64> = (0..k.dim)
            .map(|i| (1.0 - t) * edge_pt[i] + t * y[i])
            .collect();
        if !k.contains(&x, 0.0) {
            continue;
        }
        // sequential classifier: the threshold fraction cbar is tiny, so
        // clearly-heavy points are rejected after a short prefix
        let mut inside = 0usize;
        let mut n_done = 0usize;
        let mut rejected = false;
        while n_done < n_full {
            let chunk = 2000.min(n_full - n_done);
            for _ in 0..chunk {
                let z = sample_ball(rng, &x, rad);
                if k.contains(&z, 0.0) {
                    inside += 1;
                }
            }
            n_done += chunk;
            let p = inside as f64 / n_done as f64;
            if p > 3.0 * cbar + 10.0 / n_done as f64 {
                rejected = true;
                break;
            }
        }
        if !rejected && (inside as f64 / n_full as f64) < cbar {
            out.push(x);
        }
    }
    out
}

/// Sliver family with genuinely nonempty thin sets: a sharp triangle in
/// d=2 (apex angle `angle`), a thin wedge prism in d=3 (dihedral `angle`
/// along a unit edge).
pub fn sliver(dim: usize, angle: f64) -> Result<ConvexBody> {
    match dim {
        2 => ConvexBody::from_points(
            2,
            &[
                vec![0.0, 0.0],
                vec![1.0, 0.0],
                vec![angle.cos(), angle.sin()],
            ],
        ),
        3 => {
            // prism over a thin triangle, extruded along its sharp edge;
            // the length is tied to the inradius so covering counts stay
            // in a testable range
            let len = 10.0 * angle;
            let (cy, cz) = (angle.cos(), angle.sin());
            ConvexBody::from_points(
                3,
                &[
                    vec![0.0, 0.0, 0.0],
                    vec![len, 0.0, 0.0],
                    vec![0.0, 1.0, 0.0],
                    vec![len, 1.0, 0.0],
                    vec![0.0, cy, cz],
                    vec![len, cy, cz],
                ],
            )
        }
        _ => Err(Error::Degenerate("dimension must be 2 or 3".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_match_dimensions() {
        assert!((thin_constant(2) - 1.0 / 32.0).abs() < 1e-15);
        assert!((thin_constant(3) - 1.0 / 96.0).abs() < 1e-15);
        assert!((thin_bound(2) - 18.0).abs() < 1e-12);
        assert!((thin_bound(3) - 36.0).abs() < 1e-12);
    }

    #[test]
    fn inradius_unit_square() {
        let k = ConvexBody::from_points(
            2,
            &[
                vec![0.0, 0.0],
                vec![1.0, 0.0],
                vec![1.0, 1.0],
                vec![0.0, 1.0],
            ],
        )
        .unwrap();
        assert!((k.inradius().unwrap() - 0.5).abs() < 1e-12);
        assert!((k.volume - 1.0).abs() < 1e-12);
    }

    #[test]
    fn inradius_regular_64gon() {
        let pts: Vec<Vec<f64>> = (0..64)
            .map(|i| {
                let t = 2.0 * std::f64::consts::PI * i as f64 / 64.0;
                vec![0.5 * t.cos(), 0.5 * t.sin()]
            })
            .collect();
        let k = ConvexBody::from_points(2, &pts).unwrap();
        let expect = 0.5 * (std::f64::consts::PI / 64.0).cos();
        assert!((k.inradius().unwrap() - expect).abs() < 1e-6);
    }

    #[test]
    fn inradius_right_triangle() {
        let k = ConvexBody::from_points(
            2,
            &[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]],
        )
        .unwrap();
        // incircle radius (2 - sqrt 2)/2 from the area/semiperimeter oracle
        let expect = (2.0 - 2f64.sqrt()) / 2.0;
        assert!((k.inradius().unwrap() - expect).abs() < 1e-9);
    }

    #[test]
    fn cube_hull_and_inradius() {
        let mut pts = Vec::new();
        for x in 0..2 {
            for y in 0..2 {
                for z in 0..2 {
                    pts.push(vec![x as f64, y as f64, z as f64]);
                }
            }
        }
        let k = ConvexBody::from_points(3, &pts).unwrap();
        assert!((k.volume - 1.0).abs() < 1e-9);
        assert!((k.inradius().unwrap() - 0.5).abs() < 1e-9);
        assert_eq!(k.vertices.len(), 8);
    }

    #[test]
    fn disk_has_no_thin_part() {
        let pts: Vec<Vec<f64>> = (0..64)
            .map(|i| {
                let t = 2.0 * std::f64::consts::PI * i as f64 / 64.0;
                vec![0.5 * t.cos(), 0.5 * t.sin()]
            })
            .collect();
        let k = ConvexBody::from_points(2, &pts).unwrap();
        let f = eps_thin_fraction(&k, 0.1, 2000, 256, 11).unwrap();
        assert_eq!(f, 0.0);
    }

    #[test]
    fn sliver_has_thin_tip() {
        let k = sliver(2, 0.005).unwrap();
        let f = eps_thin_fraction(&k, 0.2, 4000, 512, 5).unwrap();
        assert!(f > 0.0, "sharp triangle tip should register as thin");
        assert!(f <= thin_bound(2) * 0.04 + 3.0 * (f * (1.0 - f) / 4000.0).sqrt() + 1e-9);
    }
}
