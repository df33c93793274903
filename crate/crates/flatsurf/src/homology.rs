//! Homology bases from the spanning-tree/cotree construction.
//!
//! The closed-cochain space of a triangulation is rational and independent
//! of holonomy, so the symplectic structure is computed exactly over Q for
//! both scalar modes. Absolute cycles are integer edge chains; the a/b
//! pairs are reduced to the standard symplectic intersection form.

use crate::cochain::{cup, hol_x, hol_y, Cochain1};
use crate::error::{Error, Result};
use crate::linalg;
use crate::num::{Rat, Scalar};
use crate::surface::{Dart, TranslationSurface, Triangulation};
use num_traits::{ToPrimitive, Zero};

/// Integer edge chain: dart coefficients, canonicalized so only darts with
/// `d < twin(d)` carry nonzero coefficients.
pub type Chain = Vec<(Dart, i64)>;

fn canonicalize(tri: &Triangulation, chain: &Chain) -> Chain {
    let mut acc: std::collections::BTreeMap<Dart, i64> = Default::default();
    for &(d, c) in chain {
        let (cd, cc) = if d <= tri.twin[d] { (d, c) } else { (tri.twin[d], -c) };
        *acc.entry(cd).or_insert(0) += cc;
    }
    acc.into_iter().filter(|&(_, c)| c != 0).collect()
}

fn add_scaled(tri: &Triangulation, a: &Chain, b: &Chain, t: i64) -> Chain {
    let mut v = a.clone();
    for &(d, c) in b {
        v.push((d, c * t));
    }
    canonicalize(tri, &v)
}

/// Symplectic basis of absolute homology plus relative arcs.
#[derive(Clone, Debug)]
pub struct HomologyBasis {
    /// Pairs (a_i, b_i) with intersection matrix in standard form:
    /// i(a_i, b_j) = δ_ij, i(a_i, a_j) = i(b_i, b_j) = 0.
    pub pairs: Vec<(Chain, Chain)>,
    /// Tree darts joining the k labelled singularities (k-1 arcs).
    pub relative_arcs: Vec<Chain>,
    /// Intersection matrix of the flattened (a_1, b_1, ..., a_g, b_g).
    pub intersection: Vec<Vec<i64>>,
}

impl HomologyBasis {
    pub fn genus(&self) -> usize {
        self.pairs.len()
    }

    /// Flattened absolute cycles a_1, b_1, ..., a_g, b_g.
    pub fn absolute_cycles(&self) -> Vec<&Chain> {
        self.pairs.iter().flat_map(|(a, b)| [a, b]).collect()
    }
}

/// Basis of the closed-cochain space over Q, as per-dart value vectors.
pub fn closed_cochain_basis(tri: &Triangulation) -> Vec<Cochain1<Rat>> {
    // Variables: canonical darts. Constraints: triangle closure.
    let canon: Vec<Dart> = (0..tri.num_darts()).filter(|&d| d <= tri.twin[d]).collect();
    let col_of = {
        let mut v = vec![usize::MAX; tri.num_darts()];
        for (i, &d) in canon.iter().enumerate() {
            v[d] = i;
        }
        v
    };
    let mut rows = Vec::new();
    for t in &tri.triangles {
        let mut row = vec![<Rat as Scalar>::zero(); canon.len()];
        for &d in t {
            if d <= tri.twin[d] {
                row[col_of[d]] += <Rat as Scalar>::one();
            } else {
                row[col_of[tri.twin[d]]] -= <Rat as Scalar>::one();
            }
        }
        rows.push(row);
    }
    linalg::nullspace(&rows, canon.len())
        .into_iter()
        .map(|v| {
            let mut vals = vec![<Rat as Scalar>::zero(); tri.num_darts()];
            for (i, &d) in canon.iter().enumerate() {
                vals[d] = v[i].clone();
                vals[tri.twin[d]] = -v[i].clone();
            }
            Cochain1::from_raw(vals)
        })
        .collect()
}

fn eval_on_chain(c: &Cochain1<Rat>, chain: &Chain) -> Rat {
    c.eval_chain(chain)
}

/// Spanning tree of the singularity graph; returns (parent dart per vertex,
/// tree darts, non-tree canonical darts).
fn spanning_tree(tri: &Triangulation) -> (Vec<Option<Dart>>, Vec<Dart>, Vec<Dart>) {
    let nv = tri.num_vertices();
    let mut parent: Vec<Option<Dart>> = vec![None; nv]; // dart pointing from parent to vertex
    let mut seen = vec![false; nv];
    let mut tree_darts = Vec::new();
    let mut order = vec![0];
    seen[tri.vertex_of(tri.vertex_labels[0].dart)] = true;
    // BFS over darts
    let mut queue = std::collections::VecDeque::new();
    queue.push_back(tri.vertex_of(tri.vertex_labels[0].dart));
    while let Some(v) = queue.pop_front() {
        for d in 0..tri.num_darts() {
            if tri.vertex_of(d) == v {
                let w = tri.vertex_of(tri.twin[d]);
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some(d);
                    tree_darts.push(d);
                    order.push(w);
                    queue.push_back(w);
                }
            }
        }
    }
    let tree_set: std::collections::BTreeSet<Dart> = tree_darts
        .iter()
        .flat_map(|&d| [d, tri.twin[d]])
        .collect();
    let cotree: Vec<Dart> = (0..tri.num_darts())
        .filter(|&d| d <= tri.twin[d] && !tree_set.contains(&d))
        .collect();
    (parent, tree_darts, cotree)
}

/// Path from the root to vertex `v` along tree darts.
fn tree_path(tri: &Triangulation, parent: &[Option<Dart>], v: usize) -> Chain {
    let mut chain = Vec::new();
    let mut cur = v;
    while let Some(d) = parent[cur] {
        chain.push((d, 1));
        cur = tri.vertex_of(d);
    }
    chain.reverse();
    chain
}

/// Builds the symplectic homology basis of a triangulation.
pub fn homology_basis<S: Scalar>(q: &TranslationSurface<S>) -> Result<HomologyBasis> {
    let tri = &q.tri;
    let (parent, tree_darts, cotree) = spanning_tree(tri);

    // Loops from cotree darts: root -> tail, dart, head -> root.
    let mut loops: Vec<Chain> = Vec::new();
    for &d in &cotree {
        let to_tail = tree_path(tri, &parent, tri.vertex_of(d));
        let to_head = tree_path(tri, &parent, tri.vertex_of(tri.twin[d]));
        let mut chain = to_tail;
        chain.push((d, 1));
        for &(t, c) in to_head.iter().rev() {
            chain.push((t, -c));
        }
        loops.push(canonicalize(tri, &chain));
    }

    // Intersection Gram matrix via the cup pairing on Poincare-dual
    // cochain classes.
    let basis = closed_cochain_basis(tri);
    let n = basis.len();
    let mut p = vec![vec![<Rat as Scalar>::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            p[i][j] = cup(tri, &basis[i], &basis[j]);
        }
    }
    let mut duals: Vec<Vec<Rat>> = Vec::new();
    for l in &loops {
        let w: Vec<Rat> = basis.iter().map(|b| eval_on_chain(b, l)).collect();
        let c = linalg::solve(&p, &w).ok_or_else(|| {
            Error::Numeric("loop evaluation not in the image of the cup pairing".into())
        })?;
        duals.push(c);
    }
    let m = loops.len();
    let mut gram = vec![vec![0i64; m]; m];
    for i in 0..m {
        for j in 0..m {
            let mut acc = <Rat as Scalar>::zero();
            for (a, row) in duals[i].iter().zip(p.iter()) {
                if Zero::is_zero(a) {
                    continue;
                }
                for (b, pij) in duals[j].iter().zip(row.iter()) {
                    acc += a.clone() * b.clone() * pij.clone();
                }
            }
            if !acc.is_integer() {
                return Err(Error::Numeric("non-integer intersection number".into()));
            }
            gram[i][j] = acc
                .to_integer()
                .to_i64()
                .ok_or_else(|| Error::Numeric("intersection overflow".into()))?;
        }
    }

    // Integer symplectic reduction: produce pairs with i(a,b) = 1 and zero
    // pairings across pairs. Row operations mirror onto the chains.
    let mut chains = loops;
    let mut g = gram;
    let mut pairs: Vec<(Chain, Chain)> = Vec::new();
    let mut active: Vec<usize> = (0..m).collect();

    // Applies chains[k] += t * chains[src], updating the Gram matrix.
    let apply = |chains: &mut Vec<Chain>, g: &mut Vec<Vec<i64>>, k: usize, src: usize, t: i64| {
        if t == 0 {
            return;
        }
        chains[k] = add_scaled(&q.tri, &chains[k], &chains[src], t);
        for l in 0..m {
            g[k][l] += t * g[src][l];
        }
        for l in 0..m {
            g[l][k] = -g[k][l];
        }
        g[k][k] = 0;
    };

    loop {
        // minimal nonzero pairing among active chains
        let mut best: Option<(usize, usize)> = None;
        for &i in &active {
            for &j in &active {
                if i != j && g[i][j] != 0 {
                    let better = match best {
                        None => true,
                        Some((bi, bj)) => g[i][j].abs() < g[bi][bj].abs(),
                    };
                    if better {
                        best = Some((i, j));
                    }
                }
            }
        }
        let Some((i, j)) = best else { break };
        let d = g[i][j];

        // Euclidean step if d does not divide some pairing with the pair.
        let mut progressed = false;
        for &k in &active {
            if k == i || k == j {
                continue;
            }
            if g[i][k] % d != 0 {
                // i(i, k - t*j) = g[i][k] - t*d
                let t = -(g[i][k] / d);
                apply(&mut chains, &mut g, k, j, t);
                progressed = true;
                break;
            }
            if g[j][k] % d != 0 {
                // i(j, k + t*i) = g[j][k] - t*d
                let t = g[j][k] / d;
                apply(&mut chains, &mut g, k, i, t);
                progressed = true;
                break;
            }
        }
        if progressed {
            continue;
        }
        if d.abs() != 1 {
            return Err(Error::Numeric(format!(
                "intersection form pivot {d} is not unimodular"
            )));
        }
        // orient so i(a,b) = +1
        let (a_idx, b_idx) = if d > 0 { (i, j) } else { (j, i) };
        // k' = k + i(b,k)*a - i(a,k)*b clears both pairings
        let others: Vec<usize> = active
            .iter()
            .copied()
            .filter(|&k| k != i && k != j)
            .collect();
        for k in others {
            let ca = g[a_idx][k];
            let cb = g[b_idx][k];
            apply(&mut chains, &mut g, k, a_idx, cb);
            apply(&mut chains, &mut g, k, b_idx, -ca);
            debug_assert_eq!(g[a_idx][k], 0);
            debug_assert_eq!(g[b_idx][k], 0);
        }
        pairs.push((chains[a_idx].clone(), chains[b_idx].clone()));
        active.retain(|&k| k != i && k != j);
    }

    let genus = q.tri.genus();
    if pairs.len() as i64 != genus {
        return Err(Error::Numeric(format!(
            "symplectic reduction found {} pairs, genus is {genus}",
            pairs.len()
        )));
    }

    // Orientation: the Riemann bilinear sum of hol must equal +area.
    let x = hol_x(q);
    let y = hol_y(q);
    let bilinear: f64 = pairs
        .iter()
        .map(|(a, b)| {
            let xa = x.eval_chain(a).to_f64();
            let xb = x.eval_chain(b).to_f64();
            let ya = y.eval_chain(a).to_f64();
            let yb = y.eval_chain(b).to_f64();
            xa * yb - xb * ya
        })
        .sum();
    let area = q.area().to_f64();
    let pairs = if bilinear < 0.0 {
        pairs.into_iter().map(|(a, b)| (b, a)).collect()
    } else {
        pairs
    };
    let check: f64 = pairs
        .iter()
        .map(|(a, b)| {
            let xa = x.eval_chain(a).to_f64();
            let xb = x.eval_chain(b).to_f64();
            let ya = y.eval_chain(a).to_f64();
            let yb = y.eval_chain(b).to_f64();
            xa * yb - xb * ya
        })
        .sum();
    if (check - area).abs() > 1e-6 * area.max(1.0) {
        return Err(Error::Numeric(format!(
            "bilinear relation {check} does not match area {area}"
        )));
    }

    let relative_arcs: Vec<Chain> = tree_darts.iter().map(|&d| vec![(d, 1)]).collect();
    let g2 = pairs.len() * 2;
    let mut intersection = vec![vec![0i64; g2]; g2];
    for i in 0..pairs.len() {
        intersection[2 * i][2 * i + 1] = 1;
        intersection[2 * i + 1][2 * i] = -1;
    }
    Ok(HomologyBasis {
        pairs,
        relative_arcs,
        intersection,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::fixtures::square_torus_exact;

    #[test]
    fn torus_basis() {
        let q = square_torus_exact();
        let h = homology_basis(&q).unwrap();
        assert_eq!(h.genus(), 1);
        assert_eq!(h.relative_arcs.len(), 0);
        let x = hol_x(&q);
        let y = hol_y(&q);
        let (a, b) = &h.pairs[0];
        let ev = |c: &Cochain1<crate::num::Rat>, ch: &Chain| Scalar::to_f64(&c.eval_chain(ch));
        let det = ev(&x, a) * ev(&y, b) - ev(&x, b) * ev(&y, a);
        assert!((det - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_marked_torus_has_relative_arc() {
        let q = crate::builders::two_marked_torus(
            crate::geom::Vec2::new(1.0, 0.0),
            crate::geom::Vec2::new(0.0, 1.0),
            crate::geom::Vec2::new(0.4, 0.3),
        )
        .unwrap();
        let h = homology_basis(&q).unwrap();
        assert_eq!(h.genus(), 1);
        // k = 2 marked points: exactly one relative arc
        assert_eq!(h.relative_arcs.len(), 1);
    }
}
