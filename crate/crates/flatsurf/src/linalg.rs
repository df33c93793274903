//! Small exact rational linear algebra: nullspaces, linear solves, and a
//! two-phase simplex for cone feasibility. Matrices here are tiny (tens of
//! rows), so dense elimination with exact pivots is appropriate.

use crate::num::Rat;
use num_traits::{One, Signed, Zero};

pub type Mat = Vec<Vec<Rat>>;

fn rz() -> Rat {
    Rat::zero()
}

fn r1() -> Rat {
    Rat::one()
}

/// Basis of the right nullspace of `a` (rows = constraints).
pub fn nullspace(a: &Mat, cols: usize) -> Vec<Vec<Rat>> {
    let mut m: Mat = a.to_vec();
    let rows = m.len();
    let mut pivot_col = vec![usize::MAX; rows];
    let mut r = 0;
    for c in 0..cols {
        let mut piv = None;
        for i in r..rows {
            if !m[i][c].is_zero() {
                piv = Some(i);
                break;
            }
        }
        let Some(p) = piv else { continue };
        m.swap(r, p);
        let inv = r1() / m[r][c].clone();
        for x in m[r].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let t = m[r][j].clone() * f.clone();
                    m[i][j] = m[i][j].clone() - t;
                }
            }
        }
        pivot_col[r] = c;
        r += 1;
        if r == rows {
            break;
        }
    }
    let pivots: Vec<usize> = pivot_col[..r].to_vec();
    let mut is_pivot = vec![false; cols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let mut basis = Vec::new();
    for free in 0..cols {
        if is_pivot[free] {
            continue;
        }
        let mut v = vec![rz(); cols];
        v[free] = r1();
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = -m[row][free].clone();
        }
        basis.push(v);
    }
    basis
}

/// Solves `a x = b` exactly; returns any solution or None if inconsistent.
pub fn solve(a: &Mat, b: &[Rat]) -> Option<Vec<Rat>> {
    let rows = a.len();
    if rows == 0 {
        return Some(vec![]);
    }
    let cols = a[0].len();
    let mut m: Mat = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let mut r = 0;
    let mut pivot_col = Vec::new();
    for c in 0..cols {
        let mut piv = None;
        for i in r..rows {
            if !m[i][c].is_zero() {
                piv = Some(i);
                break;
            }
        }
        let Some(p) = piv else { continue };
        m.swap(r, p);
        let inv = r1() / m[r][c].clone();
        for x in m[r].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..=cols {
                    let t = m[r][j].clone() * f.clone();
                    m[i][j] = m[i][j].clone() - t;
                }
            }
        }
        pivot_col.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    for i in r..rows {
        if !m[i][cols].is_zero() {
            return None;
        }
    }
    let mut x = vec![rz(); cols];
    for (row, &pc) in pivot_col.iter().enumerate() {
        x[pc] = m[row][cols].clone();
    }
    Some(x)
}

/// Two-phase simplex: min cost.x subject to a x = b, x >= 0.
/// Returns None when infeasible or unbounded. Bland's rule throughout.
pub fn simplex_min(a: &Mat, b: &[Rat], cost: &[Rat]) -> Option<(Rat, Vec<Rat>)> {
    let m = a.len();
    if m == 0 {
        return Some((rz(), vec![rz(); cost.len()]));
    }
    let n = a[0].len();
    // tableau rows: m constraints over columns [x (n) | artificials (m) | rhs]
    let mut t: Mat = Vec::with_capacity(m);
    for i in 0..m {
        let flip = b[i].is_negative();
        let mut row = Vec::with_capacity(n + m + 1);
        for j in 0..n {
            row.push(if flip { -a[i][j].clone() } else { a[i][j].clone() });
        }
        for j in 0..m {
            row.push(if i == j { r1() } else { rz() });
        }
        row.push(if flip { -b[i].clone() } else { b[i].clone() });
        t.push(row);
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    let pivot = |t: &mut Mat, basis: &mut Vec<usize>, l: usize, e: usize| {
        let inv = r1() / t[l][e].clone();
        for x in t[l].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        for i in 0..t.len() {
            if i != l && !t[i][e].is_zero() {
                let f = t[i][e].clone();
                for j in 0..t[l].len() {
                    let d = t[l][j].clone() * f.clone();
                    t[i][j] = t[i][j].clone() - d;
                }
            }
        }
        basis[l] = e;
    };

    // generic phase: minimize sum_{i in basis} c[basis[i]] * rhs_i over
    // admissible columns; `c` has length n+m
    let run_phase = |t: &mut Mat,
                     basis: &mut Vec<usize>,
                     c: &[Rat],
                     admissible: &dyn Fn(usize) -> bool|
     -> Option<()> {
        loop {
            // reduced costs: r_j = c_j - sum_i c_basis[i] * t[i][j]
            let mut enter = None;
            'search: for j in 0..n + m {
                if !admissible(j) || basis.contains(&j) {
                    continue;
                }
                let mut rj = c[j].clone();
                for i in 0..m {
                    if !c[basis[i]].is_zero() && !t[i][j].is_zero() {
                        rj = rj - c[basis[i]].clone() * t[i][j].clone();
                    }
                }
                if rj.is_negative() {
                    enter = Some(j);
                    break 'search;
                }
            }
            let Some(e) = enter else { return Some(()) };
            let mut leave: Option<(usize, Rat)> = None;
            for i in 0..m {
                if t[i][e].is_positive() {
                    let ratio = t[i][n + m].clone() / t[i][e].clone();
                    let better = match &leave {
                        None => true,
                        Some((li, lr)) => {
                            ratio < *lr || (ratio == *lr && basis[i] < basis[*li])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((l, _)) = leave else { return None }; // unbounded
            pivot(t, basis, l, e);
        }
    };

    // phase 1: drive artificials to zero
    let mut phase1_cost = vec![rz(); n + m];
    for j in n..n + m {
        phase1_cost[j] = r1();
    }
    run_phase(&mut t, &mut basis, &phase1_cost, &|_| true)?;
    let mut infeas = rz();
    for i in 0..m {
        if basis[i] >= n {
            infeas = infeas + t[i][n + m].clone();
        }
    }
    if !infeas.is_zero() {
        return None;
    }
    // pivot out any degenerate basic artificials where possible
    for i in 0..m {
        if basis[i] >= n {
            if let Some(e) = (0..n).find(|&j| !t[i][j].is_zero()) {
                pivot(&mut t, &mut basis, i, e);
            }
        }
    }

    // phase 2: real cost, artificial columns blocked
    let mut full_cost = vec![rz(); n + m];
    full_cost[..n].clone_from_slice(cost);
    run_phase(&mut t, &mut basis, &full_cost, &|j| j < n)?;

    let mut x = vec![rz(); n];
    for i in 0..m {
        if basis[i] < n {
            x[basis[i]] = t[i][n + m].clone();
        }
    }
    let mut value = rz();
    for j in 0..n {
        if !x[j].is_zero() {
            value = value + cost[j].clone() * x[j].clone();
        }
    }
    Some((value, x))
}

/// Exact feasibility of `g c = target, c >= 0`.
pub fn nonneg_solve(g: &Mat, target: &[Rat]) -> Option<Vec<Rat>> {
    let n = if g.is_empty() { 0 } else { g[0].len() };
    let cost = vec![rz(); n];
    simplex_min(g, target, &cost).map(|(_, x)| x)
}

/// Minimal L1 residual min ||g c - target||_1 over c >= 0, with a witness.
pub fn l1_cone_distance(g: &Mat, target: &[Rat]) -> (Rat, Vec<Rat>) {
    let m = g.len();
    if m == 0 {
        return (rz(), vec![]);
    }
    let n = g[0].len();
    // augment with +/- slack pairs per row
    let mut a: Mat = Vec::with_capacity(m);
    for i in 0..m {
        let mut row = g[i].clone();
        for j in 0..m {
            row.push(if i == j { r1() } else { rz() });
        }
        for j in 0..m {
            row.push(if i == j { -r1() } else { rz() });
        }
        a.push(row);
    }
    let mut cost = vec![rz(); n + 2 * m];
    for c in cost.iter_mut().skip(n) {
        *c = r1();
    }
    let (value, x) = simplex_min(&a, target, &cost).expect("L1 fit is always feasible");
    (value, x[..n].to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rat {
        crate::num::rat_int(n)
    }

    #[test]
    fn nullspace_of_sum_constraint() {
        let a = vec![vec![r(1), r(1), r(1)]];
        let ns = nullspace(&a, 3);
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert!((v[0].clone() + v[1].clone() + v[2].clone()).is_zero());
        }
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let a = vec![vec![r(1), r(2)], vec![r(2), r(4)]];
        assert!(solve(&a, &[r(3), r(6)]).is_some());
        assert!(solve(&a, &[r(3), r(7)]).is_none());
    }

    #[test]
    fn cone_feasibility() {
        let g = vec![vec![r(1), r(0)], vec![r(0), r(1)]];
        let x = nonneg_solve(&g, &[r(1), r(1)]).unwrap();
        assert_eq!(x, vec![r(1), r(1)]);
        assert!(nonneg_solve(&g, &[r(-1), r(0)]).is_none());
        let g2 = vec![vec![r(1), r(0), r(1)], vec![r(0), r(1), r(1)]];
        assert!(nonneg_solve(&g2, &[r(2), r(3)]).is_some());
    }

    #[test]
    fn l1_distance_outside_cone() {
        // cone spanned by (1,0): distance of (1,1) is 1; of (2,0) is 0
        let g = vec![vec![r(1)], vec![r(0)]];
        let (d, _) = l1_cone_distance(&g, &[r(1), r(1)]);
        assert_eq!(d, r(1));
        let (d0, c) = l1_cone_distance(&g, &[r(2), r(0)]);
        assert!(d0.is_zero());
        assert_eq!(c[0], r(2));
    }

    #[test]
    fn simplex_minimizes_cost() {
        // min x+y s.t. x+y+s=2 with x,y,s>=0 and x - y = 0
        let a = vec![vec![r(1), r(1), r(1)], vec![r(1), r(-1), r(0)]];
        let (v, x) = simplex_min(&a, &[r(2), r(0)], &[r(1), r(1), r(0)]).unwrap();
        assert!(v.is_zero());
        assert!(x[0].is_zero() && x[1].is_zero());
    }
}
