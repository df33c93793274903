//! Signed foliation cocycles with Hahn structure by provenance: the
//! canonical dy, restrictions of dy to horizontal-boundary regions, their
//! combinations (all carrying a per-triangle density), and empirical
//! loop-derived cocycles. Signed mass, total variation, and balancing.

use crate::cochain::{hol_y, Cochain1};
use crate::error::{Error, Result};
use crate::flow::{centroid, Point};
use crate::geom::Vec2;
use crate::homology::{homology_basis, HomologyBasis};
use crate::num::Scalar;
use crate::surface::{TranslationSurface, Tri};
use rand::Rng;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    CanonicalDy,
    Region(String),
    Combination,
    Empirical(String),
}

/// A signed foliation cocycle: Hahn parts plus and minus, each arising
/// from nonnegative transverse data by construction.
#[derive(Clone, Debug)]
pub struct FoliationCocycle<S> {
    pub plus: Cochain1<S>,
    pub minus: Cochain1<S>,
    /// Per-triangle density with respect to dy, when the cocycle is a
    /// combination of region restrictions of dy.
    pub weights: Option<Vec<S>>,
    /// No atoms on horizontal saddle connections (constructor-certified).
    pub non_atomic: bool,
    pub provenance: Provenance,
}

impl<S: Scalar> FoliationCocycle<S> {
    /// The represented class plus - minus.
    pub fn class(&self) -> Cochain1<S> {
        self.plus.sub(&self.minus)
    }

    pub fn scaled(&self, c: &S) -> FoliationCocycle<S> {
        let mut f = if c.is_positive() || c.is_zero() {
            FoliationCocycle {
                plus: self.plus.scale(c),
                minus: self.minus.scale(c),
                weights: self
                    .weights
                    .as_ref()
                    .map(|w| w.iter().map(|x| x.clone() * c.clone()).collect()),
                non_atomic: self.non_atomic,
                provenance: Provenance::Combination,
            }
        } else {
            let a = -c.clone();
            FoliationCocycle {
                plus: self.minus.scale(&a),
                minus: self.plus.scale(&a),
                weights: self
                    .weights
                    .as_ref()
                    .map(|w| w.iter().map(|x| x.clone() * c.clone()).collect()),
                non_atomic: self.non_atomic,
                provenance: Provenance::Combination,
            }
        };
        if self.provenance == Provenance::CanonicalDy && (c.clone() - S::one()).is_zero() {
            f.provenance = Provenance::CanonicalDy;
        }
        f
    }
}

/// Builds the cochain of the measure with per-triangle density `w` against
/// dy: value on dart d is w[tri(d)] * hol_y(d). Requires edges between
/// triangles of different weight to be horizontal.
fn weighted_cochain<S: Scalar>(
    q: &TranslationSurface<S>,
    w: &[S],
) -> Result<Cochain1<S>> {
    let tri = &q.tri;
    let scale = q.max_edge();
    let mut vals = vec![S::zero(); tri.num_darts()];
    for d in 0..tri.num_darts() {
        let t = tri.tri_of(d);
        let t2 = tri.tri_of(tri.twin[d]);
        if !(w[t].clone() - w[t2].clone()).is_zero() && !q.hol(d).y.near_zero(scale) {
            return Err(Error::NonHorizontalBoundary(d));
        }
        vals[d] = q.hol(d).y.clone() * w[t].clone();
    }
    Cochain1::new(tri, vals, scale)
}

/// Cocycle from a signed per-triangle density, split into Hahn parts.
pub fn from_weights<S: Scalar>(
    q: &TranslationSurface<S>,
    weights: Vec<S>,
    provenance: Provenance,
) -> Result<FoliationCocycle<S>> {
    let wp: Vec<S> = weights
        .iter()
        .map(|w| if w.is_positive() { w.clone() } else { S::zero() })
        .collect();
    let wm: Vec<S> = weights
        .iter()
        .map(|w| {
            if w.is_positive() || w.is_zero() {
                S::zero()
            } else {
                -w.clone()
            }
        })
        .collect();
    let plus = weighted_cochain(q, &wp)?;
    let minus = weighted_cochain(q, &wm)?;
    Ok(FoliationCocycle {
        plus,
        minus,
        weights: Some(weights),
        non_atomic: true,
        provenance,
    })
}

/// The canonical foliation cocycle (dy)_q.
pub fn canonical_dy<S: Scalar>(q: &TranslationSurface<S>) -> FoliationCocycle<S> {
    FoliationCocycle {
        plus: hol_y(q),
        minus: Cochain1::zero(&q.tri),
        weights: Some(vec![S::one(); q.tri.num_triangles()]),
        non_atomic: true,
        provenance: Provenance::CanonicalDy,
    }
}

/// Restriction of dy to a union of triangles whose boundary is horizontal.
pub fn restriction_dy<S: Scalar>(
    q: &TranslationSurface<S>,
    region: &[Tri],
    name: &str,
) -> Result<FoliationCocycle<S>> {
    let mut w = vec![S::zero(); q.tri.num_triangles()];
    for &t in region {
        if t >= w.len() {
            return Err(Error::InvalidSurface(format!("region triangle {t} out of range")));
        }
        w[t] = S::one();
    }
    from_weights(q, w, Provenance::Region(name.into()))
}

/// Linear combination of weight-carrying cocycles.
pub fn combination<S: Scalar>(
    q: &TranslationSurface<S>,
    terms: &[(S, &FoliationCocycle<S>)],
) -> Result<FoliationCocycle<S>> {
    let n = q.tri.num_triangles();
    let mut w = vec![S::zero(); n];
    for (c, f) in terms {
        let fw = f.weights.as_ref().ok_or(Error::AtomicCocycle)?;
        for t in 0..n {
            w[t] += c.clone() * fw[t].clone();
        }
    }
    from_weights(q, w, Provenance::Combination)
}

/// Empirical cocycle from loop data (an explicit closed cochain). The
/// caller certifies whether the underlying curve avoids horizontal saddle
/// connections.
pub fn empirical<S: Scalar>(
    beta: Cochain1<S>,
    non_atomic: bool,
    label: &str,
) -> FoliationCocycle<S> {
    FoliationCocycle {
        minus: beta.map(|_| S::zero()),
        plus: beta,
        weights: None,
        non_atomic,
        provenance: Provenance::Empirical(label.into()),
    }
}

/// Signed mass L_q(beta): the evaluation of hol^(x) cup beta on the
/// fundamental class, computed by the Riemann bilinear relations over a
/// symplectic homology basis.
pub fn signed_mass_with_basis<S: Scalar>(
    q: &TranslationSurface<S>,
    basis: &HomologyBasis,
    beta: &Cochain1<S>,
) -> S {
    let x = crate::cochain::hol_x(q);
    let mut acc = S::zero();
    for (a, b) in &basis.pairs {
        acc += x.eval_chain(a) * beta.eval_chain(b) - x.eval_chain(b) * beta.eval_chain(a);
    }
    acc
}

pub fn signed_mass<S: Scalar>(q: &TranslationSurface<S>, beta: &Cochain1<S>) -> Result<S> {
    let basis = homology_basis(q)?;
    Ok(signed_mass_with_basis(q, &basis, beta))
}

/// Signed mass and total variation of a Hahn-structured cocycle.
#[derive(Clone, Debug)]
pub struct MassReport {
    pub l: f64,
    pub l_abs: f64,
    pub balanced: bool,
}

pub fn total_variation<S: Scalar>(
    q: &TranslationSurface<S>,
    f: &FoliationCocycle<S>,
) -> Result<MassReport> {
    let basis = homology_basis(q)?;
    let lp = signed_mass_with_basis(q, &basis, &f.plus).to_f64();
    let lm = signed_mass_with_basis(q, &basis, &f.minus).to_f64();
    let l = lp - lm;
    let l_abs = lp + lm;
    Ok(MassReport {
        l,
        l_abs,
        balanced: l.abs() <= 1e-12 * l_abs.max(1.0),
    })
}

/// Balancing: s = L_q(beta) and beta_0 = beta - s dy, so that
/// trem(q, beta) = trem(u_s q, beta_0) downstream.
pub fn balance<S: Scalar>(
    q: &TranslationSurface<S>,
    f: &FoliationCocycle<S>,
) -> Result<(S, FoliationCocycle<S>)> {
    let basis = homology_basis(q)?;
    let s = signed_mass_with_basis(q, &basis, &f.class());
    let balanced = match &f.weights {
        Some(w) => {
            let w2: Vec<S> = w.iter().map(|x| x.clone() - s.clone()).collect();
            from_weights(q, w2, Provenance::Combination)?
        }
        None => {
            // approximate split: push s dy into the appropriate part
            let dy = hol_y(q);
            if s.is_positive() {
                FoliationCocycle {
                    plus: f.plus.clone(),
                    minus: f.minus.add(&dy.scale(&s)),
                    weights: None,
                    non_atomic: f.non_atomic,
                    provenance: Provenance::Combination,
                }
            } else {
                FoliationCocycle {
                    plus: f.plus.add(&dy.scale(&-s.clone())),
                    minus: f.minus.clone(),
                    weights: None,
                    non_atomic: f.non_atomic,
                    provenance: Provenance::Combination,
                }
            }
        }
    };
    Ok((s, balanced))
}

/// Monte-Carlo lower estimate of the Radon-Nikodym sup-norm of a
/// weight-carrying cocycle: the max over random vertical arcs of
/// |∫ dν| / ∫ dy.
pub fn rn_bound_estimate<S: Scalar>(
    q: &TranslationSurface<S>,
    f: &FoliationCocycle<S>,
    n_arcs: usize,
    seed: u64,
) -> Result<f64> {
    let w = f.weights.as_ref().ok_or(Error::AtomicCocycle)?;
    let mut rng = crate::rng(seed);
    let areas: Vec<f64> = (0..q.tri.num_triangles())
        .map(|t| {
            let [d0, d1, _] = q.tri.triangles[t];
            q.hol(d0).to_f64().cross(&q.hol(d1).to_f64()) / 2.0
        })
        .collect();
    let total: f64 = areas.iter().sum();
    let h_scale = q.max_edge();
    let mut best: f64 = 0.0;
    let mut tries = 0;
    let mut done = 0;
    while done < n_arcs && tries < 50 * n_arcs {
        tries += 1;
        // triangle by area, point by uniform barycentric
        let mut pick = rng.gen_range(0.0..total);
        let mut t = 0;
        for (i, a) in areas.iter().enumerate() {
            if pick < *a {
                t = i;
                break;
            }
            pick -= a;
        }
        let c = q.develop_triangle(t);
        let (mut u, mut v) = (rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0));
        if u + v > 1.0 {
            u = 1.0 - u;
            v = 1.0 - v;
        }
        let p = Point {
            tri: t,
            xy: Vec2::new(
                c[0].x.clone()
                    + (c[1].x.clone() - c[0].x.clone()) * S::from_f64(u)
                    + (c[2].x.clone() - c[0].x.clone()) * S::from_f64(v),
                c[0].y.clone()
                    + (c[1].y.clone() - c[0].y.clone()) * S::from_f64(u)
                    + (c[2].y.clone() - c[0].y.clone()) * S::from_f64(v),
            ),
        };
        let len = rng.gen_range(0.05..1.0) * h_scale;
        let dir = Vec2::new(S::zero(), -S::one());
        let run = crate::flow::FlowRun {
            record_crossings: false,
            record_segments: true,
            detect_period: false,
            stops: None,
        };
        let Ok(res) = crate::flow::flow_ex(q, &p, &dir, len, &run) else {
            continue;
        };
        let mut int_nu = 0.0;
        let mut int_dy = 0.0;
        for (tri, a, b) in &res.segments {
            let dy = (b.y.clone() - a.y.clone()).to_f64().abs();
            int_dy += dy;
            int_nu += w[*tri].to_f64() * dy;
        }
        if int_dy > 1e-9 * h_scale {
            best = best.max(int_nu.abs() / int_dy);
            done += 1;
        }
    }
    if done == 0 {
        return Err(Error::Numeric("no valid sample arcs".into()));
    }
    Ok(best)
}

/// Convenience: centroid start point for flow experiments.
pub fn interior_point<S: Scalar>(q: &TranslationSurface<S>, t: Tri) -> Point<S> {
    centroid(q, t)
}

// re-export used by rn_bound sampling paths
pub use crate::flow::FlowOutcome as _FlowOutcome;

#[allow(unused_imports)]
use crate::flow::FlowRun;
