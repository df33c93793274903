//! Covering numbers, box-counting dimension estimation, and the sampled
//! tremor clouds in a fixed period-coordinate chart.

use crate::cocycle::{combination, restriction_dy};
use crate::eigenform::{slit_construct, SlitTorusData};
use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::homology::homology_basis;
use crate::tremor::tremor;
use rand::Rng;

/// Greedy covering count with balls of radius `r` centered at points; an
/// upper bound within a factor of two of the unrestricted optimum. Sets of
/// at most 20 points are refined to the exact point-centered minimum.
pub fn covering_number(points: &[Vec<f64>], r: f64) -> usize {
    if points.is_empty() {
        return 0;
    }
    if points.len() <= 20 {
        return exact_cover(points, r);
    }
    greedy_cover(points, r)
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn greedy_cover(points: &[Vec<f64>], r: f64) -> usize {
    let r2 = r * r;
    let n = points.len();
    let mut covered = vec![false; n];
    let mut remaining = n;
    let mut count = 0;
    while remaining > 0 {
        // center at the point covering the most uncovered points
        let mut best_i = usize::MAX;
        let mut best_gain = 0usize;
        for i in 0..n {
            let gain = (0..n)
                .filter(|&j| !covered[j] && dist2(&points[i], &points[j]) <= r2)
                .count();
            if gain > best_gain {
                best_gain = gain;
                best_i = i;
            }
        }
        count += 1;
        for j in 0..n {
            if !covered[j] && dist2(&points[best_i], &points[j]) <= r2 {
                covered[j] = true;
                remaining -= 1;
            }
        }
    }
    count
}

fn exact_cover(points: &[Vec<f64>], r: f64) -> usize {
    let n = points.len();
    let r2 = r * r;
    let masks: Vec<u32> = (0..n)
        .map(|i| {
            let mut m = 0u32;
            for j in 0..n {
                if dist2(&points[i], &points[j]) <= r2 {
                    m |= 1 << j;
                }
            }
            m
        })
        .collect();
    let full = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    // BFS over covered-set states
    let mut dist = std::collections::HashMap::new();
    let mut queue = std::collections::VecDeque::new();
    dist.insert(0u32, 0usize);
    queue.push_back(0u32);
    while let Some(s) = queue.pop_front() {
        let d = dist[&s];
        if s == full {
            return d;
        }
        // cover the lowest uncovered point
        let first = (!s & full).trailing_zeros() as usize;
        for (i, m) in masks.iter().enumerate() {
            if m & (1 << first) != 0 {
                let t = s | m;
                if !dist.contains_key(&t) {
                    dist.insert(t, d + 1);
                    queue.push_back(t);
                }
            }
            let _ = i;
        }
    }
    greedy_cover(points, r)
}

/// Occupied-cell count at scale `r`: the box-counting variant of N(A, r),
/// equal to the ball-covering count up to a dimension constant and scaled
/// out by the log-log fit.
pub fn box_count(points: &[Vec<f64>], r: f64) -> usize {
    let mut cells = std::collections::HashSet::new();
    for p in points {
        let key: Vec<i64> = p.iter().map(|&x| (x / r).floor() as i64).collect();
        cells.insert(key);
    }
    cells.len()
}

/// Radius grid, counts, and the fitted slope of log N against log(1/R).
#[derive(Clone, Debug)]
pub struct CoverReport {
    pub radii: Vec<f64>,
    pub counts: Vec<usize>,
    pub slope: f64,
    /// Half-width of the 95% confidence band of the slope.
    pub ci: f64,
    pub seed: u64,
}

impl CoverReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("R,N,logN\n");
        for (r, n) in self.radii.iter().zip(&self.counts) {
            s.push_str(&format!("{r:.9e},{n},{:.9}\n", (*n as f64).ln()));
        }
        s.push_str(&format!(
            "# slope,{:.6},ci,{:.6},seed,{}\n",
            self.slope, self.ci, self.seed
        ));
        s
    }
}

/// Least-squares box-counting dimension over the given radii.
pub fn box_dim_estimate(points: &[Vec<f64>], radii: &[f64], seed: u64) -> Result<CoverReport> {
    if points.len() < 1000 {
        return Err(Error::InsufficientData(format!(
            "{} points (need at least 1000)",
            points.len()
        )));
    }
    let mut radii = radii.to_vec();
    radii.sort_by(|a, b| b.partial_cmp(a).unwrap());
    if radii.len() < 4 {
        return Err(Error::InsufficientData("need at least 4 radii".into()));
    }
    let span = radii[0] / radii[radii.len() - 1];
    if span < 10.0 * (1.0 - 1e-9) {
        return Err(Error::InsufficientData(format!(
            "radii span {span:.2}x (need a decade)"
        )));
    }
    let counts: Vec<usize> = radii.iter().map(|&r| box_count(points, r)).collect();
    for w in counts.windows(2) {
        if w[1] < w[0] {
            return Err(Error::Numeric("counts not monotone in radius".into()));
        }
    }
    // all identical points: dimension zero
    let xs: Vec<f64> = radii.iter().map(|r| (1.0 / r).ln()).collect();
    let ys: Vec<f64> = counts.iter().map(|&n| (n as f64).ln()).collect();
    let n = xs.len() as f64;
    let xb = xs.iter().sum::<f64>() / n;
    let yb = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - xb) * (x - xb)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xb) * (y - yb)).sum();
    let slope = sxy / sxx;
    let resid2: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let e = y - (yb + slope * (x - xb));
            e * e
        })
        .sum();
    let se = (resid2 / (n - 2.0) / sxx).sqrt();
    Ok(CoverReport {
        radii,
        counts,
        slope,
        ci: 1.96 * se,
        seed,
    })
}

/// Middle-thirds Cantor set sample to the given depth (4^?: 2^depth
/// points).
pub fn cantor_cloud(depth: usize) -> Vec<Vec<f64>> {
    let mut xs = vec![0.0f64];
    let mut scale = 1.0;
    for _ in 0..depth {
        scale /= 3.0;
        let mut next = Vec::with_capacity(xs.len() * 2);
        for x in xs {
            next.push(x);
            next.push(x + 2.0 * scale);
        }
        xs = next;
    }
    xs.into_iter().map(|x| vec![x, 0.0]).collect()
}

/// Point cloud sampled from the tremor set near a base chart: surfaces
/// trem(q, beta, 1) with q a random slit pair and beta a signed
/// combination of the two torus restrictions with total variation at most
/// `a`, embedded by the holonomy of a fixed homology basis.
///
/// Samples mix plain slit pairs with tilted slits (beta = 0, the locus
/// slice itself) and horizontal-slit pairs carrying independent
/// restriction weights (w_A, w_B) with (|w_A| + |w_B|)/2 <= a, so clouds
/// are nested in `a`. Returns the cloud and the resample count.
pub fn sample_tremor_set(a: f64, n: usize, seed: u64) -> Result<(Vec<Vec<f64>>, usize)> {
    let mut rng = crate::rng(seed);
    let mut cloud = Vec::with_capacity(n);
    let mut resampled = 0usize;

    // fixed homology basis chains of the base combinatoric chart
    let base = base_slit_pair(0.0, 0.0, 0.0, 0.0, 0.0)?;
    let basis = homology_basis(&base.0)?;
    let chains: Vec<crate::homology::Chain> = basis
        .pairs
        .iter()
        .flat_map(|(x, y)| [x.clone(), y.clone()])
        .chain(basis.relative_arcs.iter().cloned())
        .collect();

    let mut guard = 0;
    while cloud.len() < n {
        guard += 1;
        if guard > 20 * n {
            return Err(Error::ChartEscape(resampled));
        }
        let d1 = rng.gen_range(-0.25..0.25);
        let d2 = rng.gen_range(-0.25..0.25);
        let d3 = rng.gen_range(-0.25..0.25);
        let w1 = rng.gen_range(-0.2..0.2);
        let tilted = a == 0.0 || rng.gen_bool(0.15);
        let w2 = if tilted { rng.gen_range(-0.12..0.12) } else { 0.0 };
        let Ok((q, _inv)) = base_slit_pair(d1, d2, d3, w1, w2) else {
            resampled += 1;
            continue;
        };
        let (qt, transport) = if tilted || a == 0.0 {
            (q, crate::flip::Transport::identity())
        } else {
            // restriction weights with |L| = (|wa| + |wb|)/2 <= a
            let (wa, wb) = loop {
                let wa = rng.gen_range(-2.0 * a..2.0 * a);
                let wb = rng.gen_range(-2.0 * a..2.0 * a);
                if wa.abs() + wb.abs() <= 2.0 * a {
                    break (wa, wb);
                }
            };
            let ra = restriction_dy(&q, q.region("A").unwrap(), "A")?;
            let rb = restriction_dy(&q, q.region("B").unwrap(), "B")?;
            let beta = combination(&q, &[(wa, &ra), (wb, &rb)])?;
            match tremor(&q, &beta, 1.0) {
                Ok((qt, tr, _)) => (qt, tr),
                Err(_) => {
                    resampled += 1;
                    continue;
                }
            }
        };
        // embed by the holonomy of the fixed basis chains, rewritten
        // through any flips
        let x = crate::cochain::hol_x(&qt);
        let y = crate::cochain::hol_y(&qt);
        let mut coord = Vec::with_capacity(chains.len() * 2);
        for ch in &chains {
            let moved = transport.chain_forward(ch);
            coord.push(x.eval_chain(&moved));
            coord.push(y.eval_chain(&moved));
        }
        cloud.push(coord);
    }
    Ok((cloud, resampled))
}

/// Slit pair near the base chart: tilted lattice u=(1+d1, -1/2+d2),
/// v=(1/7+d3, *) tuned to det 1/2 (area 1/2 per torus), slit near
/// (1/2 + w1, w2). A horizontal slit (w2 = 0) admits the region
/// restrictions.
fn base_slit_pair(
    d1: f64,
    d2: f64,
    d3: f64,
    w1: f64,
    w2: f64,
) -> Result<(crate::surface::TranslationSurface<f64>, crate::eigenform::Involution)> {
    let u = Vec2::new(1.0 + d1, -0.5 + d2);
    // det(u, v) = 1/2 fixes v.y
    let vx = 1.0 / 7.0 + d3;
    let vy = (0.5 + u.y * vx) / u.x;
    let v = Vec2::new(vx, vy);
    let slit = Vec2::new(0.5 + w1, w2);
    slit_construct(&SlitTorusData {
        u,
        v,
        slit,
        shears: (0.0, 0.0),
    })
}

/// Uniform cloud in the unit square (estimator calibration).
pub fn square_cloud(n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = crate::rng(seed);
    (0..n)
        .map(|_| vec![rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)])
        .collect()
}
