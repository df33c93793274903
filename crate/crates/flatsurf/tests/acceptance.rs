//! Acceptance suite: identity, inequality, and calibration experiments at
//! pinned tolerances. Each test prints one pass/fail line; run with
//! `cargo test --test acceptance -- --nocapture` to see them.

use flatsurf::cochain::{cup, hol_x, hol_y, Cochain1};
use flatsurf::cocycle::{
    balance, canonical_dy, combination, from_weights, restriction_dy, signed_mass,
    total_variation, FoliationCocycle, Provenance,
};
use flatsurf::convex::{
    eps_thin_fraction, random_polytope, sample_thin_set, sliver, thin_bound, thin_constant,
    unit_ball_volume,
};
use flatsurf::cover::{box_dim_estimate, cantor_cloud, covering_number, sample_tremor_set, square_cloud};
use flatsurf::eigenform::{
    checkerboard_search, checkerboard_verify, slit_construct, Involution, SlitTorusData,
};
use flatsurf::flow::banded_occupancy;
use flatsurf::geom::{Mat2, Vec2};
use flatsurf::linear::{apply_matrix, deviation_check};
use flatsurf::loops::{cone_contains, cone_generators};
use flatsurf::num::{rat_int, rat_ratio, Rat, Scalar};
use flatsurf::saddle::enumerate_saddle_connections;
use flatsurf::transverse::{first_return, prong_tower};
use flatsurf::tremor::tremor;
use flatsurf::TranslationSurface;
use rand::Rng;

type Inv = Involution;

fn report(criterion: &str, pass: bool, detail: &str) {
    println!(
        "criterion {criterion}: {} - {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion} failed: {detail}");
}

fn runtime_gate(name: &str, start: std::time::Instant, limit_s: f64) {
    let elapsed = start.elapsed().as_secs_f64();
    println!("  [{name}] runtime {elapsed:.2}s (budget {limit_s}s)");
    // the stated budgets assume optimized builds; tests compile with
    // opt-level 2, so enforce them directly
    assert!(
        elapsed < limit_s,
        "{name} exceeded the runtime budget: {elapsed:.2}s > {limit_s}s"
    );
}

/// Random exact slit pair with a horizontal slit inside a tilted lattice.
fn random_exact_slit_pair(rng: &mut impl Rng) -> (TranslationSurface<Rat>, Inv) {
    loop {
        let num = |rng: &mut dyn rand::RngCore, lo: i64, hi: i64| -> i64 {
            let mut r = rng.gen_range(lo..=hi);
            if r == 0 {
                r = 1;
            }
            r
        };
        let u = Vec2::new(
            rat_int(1),
            rat_ratio(num(rng, -6, -2), num(rng, 7, 13).abs()),
        );
        let vx = rat_ratio(num(rng, 1, 4), num(rng, 9, 15).abs());
        // det(u, v) = 1/2 exactly
        let vy = (rat_ratio(1, 2) + u.y.clone() * vx.clone()) / u.x.clone();
        let v = Vec2::new(vx, vy);
        let slit = Vec2::new(rat_ratio(num(rng, 2, 8).abs(), 16), rat_int(0));
        let data = SlitTorusData {
            u,
            v,
            slit,
            shears: (rat_int(0), rat_int(0)),
        };
        if let Ok(pair) = slit_construct(&data) {
            return pair;
        }
    }
}

/// Random float slit pair with a horizontal slit (supports restrictions).
fn random_float_slit_pair(rng: &mut impl Rng) -> (TranslationSurface<f64>, Inv) {
    loop {
        let u = Vec2::new(1.0 + rng.gen_range(-0.2..0.2), rng.gen_range(-0.7..-0.3));
        let vx = rng.gen_range(0.05..0.3);
        let vy = (0.5 + u.y * vx) / u.x;
        let v = Vec2::new(vx, vy);
        let slit = Vec2::new(rng.gen_range(0.2..0.6), 0.0);
        let data = SlitTorusData {
            u,
            v,
            slit,
            shears: (0.0, 0.0),
        };
        if let Ok(pair) = slit_construct(&data) {
            return pair;
        }
    }
}

fn max_edge_discrepancy(a: &TranslationSurface<f64>, b: &TranslationSurface<f64>) -> f64 {
    (0..a.tri.num_darts())
        .map(|d| {
            let u = a.hol(d);
            let v = b.hol(d);
            (u.x - v.x).abs().max((u.y - v.y).abs())
        })
        .fold(0.0, f64::max)
}

/// A random weight-carrying cocycle: dy, a region restriction, or a
/// balanced combination.
fn random_cocycle(
    q: &TranslationSurface<f64>,
    rng: &mut impl Rng,
) -> FoliationCocycle<f64> {
    let ra = restriction_dy(q, q.region("A").unwrap(), "A").unwrap();
    let rb = restriction_dy(q, q.region("B").unwrap(), "B").unwrap();
    match rng.gen_range(0..4) {
        0 => canonical_dy(q),
        1 => ra,
        2 => rb,
        _ => {
            let c = rng.gen_range(0.2..1.5);
            combination(q, &[(c, &ra), (-c, &rb)]).unwrap()
        }
    }
}

// ---------------------------------------------------------------- C1

#[test]
fn criterion_1_horocycle_as_tremor() {
    let start = std::time::Instant::now();
    let mut rng = flatsurf::rng(101);
    let mut worst_exact_zero = true;
    for _ in 0..100 {
        let (q, _) = random_exact_slit_pair(&mut rng);
        let s = rat_ratio(rng.gen_range(-20..=20), rng.gen_range(5..=15));
        if s.to_f64().abs() > 2.0 {
            continue;
        }
        let dy = canonical_dy(&q);
        let (trem_q, transport, _) = tremor(&q, &dy, s.clone()).unwrap();
        let horo = apply_matrix(&q, &Mat2::horocycle(s)).unwrap();
        if !transport.is_identity() || trem_q.hols() != horo.hols() {
            worst_exact_zero = false;
        }
    }
    runtime_gate("C1", start, 10.0);
    report(
        "1 (horocycle-as-tremor identity)",
        worst_exact_zero,
        "exact edge-holonomy match on 100 rational slit pairs, s in [-2,2]",
    );
}

// ---------------------------------------------------------------- C2

#[test]
fn criterion_2_commutation_and_b_normalization() {
    let start = std::time::Instant::now();
    let mut rng = flatsurf::rng(202);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (q, _) = random_float_slit_pair(&mut rng);
        let f = random_cocycle(&q, &mut rng);
        let s = rng.gen_range(-2.0..2.0);
        let a = rng.gen_range(0.5..2.0);

        // commutation with u_s: u_s trem(q, beta) = trem(u_s q, beta)
        let (t_then_u, _, _) = tremor(&q, &f, 1.0).unwrap();
        let lhs = apply_matrix(&t_then_u, &Mat2::horocycle(s)).unwrap();
        let uq = apply_matrix(&q, &Mat2::horocycle(s)).unwrap();
        let f_on_uq = from_weights(&uq, f.weights.clone().unwrap(), Provenance::Combination)
            .unwrap();
        let (rhs, _, _) = tremor(&uq, &f_on_uq, 1.0).unwrap();
        worst = worst.max(max_edge_discrepancy(&lhs, &rhs));

        // B-normalization with g = diag(a, 1/a):
        // g trem_beta(q) = trem_{a beta}(g q)
        let g = Mat2::diagonal(a);
        let (tq, _, _) = tremor(&q, &f, 1.0).unwrap();
        let lhs_b = apply_matrix(&tq, &g).unwrap();
        let gq = apply_matrix(&q, &g).unwrap();
        // weights are densities against dy, which g scales by 1/a; the
        // cocycle a*beta on gq carries the same weights scaled by a
        let wa: Vec<f64> = f.weights.clone().unwrap().iter().map(|w| w * a).collect();
        let f_on_gq = from_weights(&gq, wa, Provenance::Combination).unwrap();
        let (rhs_b, _, _) = tremor(&gq, &f_on_gq, 1.0).unwrap();
        worst = worst.max(max_edge_discrepancy(&lhs_b, &rhs_b));
    }
    runtime_gate("C2", start, 30.0);
    report(
        "2 (commutation and B-normalization)",
        worst < 1e-9,
        &format!("max edge discrepancy {worst:.2e} over 100 draws (tolerance 1e-9)"),
    );
}

// ---------------------------------------------------------------- C3

#[test]
fn criterion_3_mass_laws() {
    let mut rng = flatsurf::rng(303);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (q, _) = random_float_slit_pair(&mut rng);
        let f = random_cocycle(&q, &mut rng);
        let s = rng.gen_range(-2.0..2.0);
        let t = rng.gen_range(-1.0..1.0);
        let beta = f.class();
        let l0 = signed_mass(&q, &beta).unwrap();

        // invariance under u_s (same cochain values on the common chart)
        let uq = apply_matrix(&q, &Mat2::horocycle(s)).unwrap();
        let l1 = signed_mass(&uq, &beta).unwrap();
        worst = worst.max((l1 - l0).abs() / l0.abs().max(1.0));

        // scaling under the reversed geodesic: L_{g~_t q}(beta) = e^-t L_q(beta)
        let gq = apply_matrix(&q, &Mat2::geodesic_rev(t)).unwrap();
        let l2 = signed_mass(&gq, &beta).unwrap();
        worst = worst.max((l2 - (-t).exp() * l0).abs() / l0.abs().max(1.0));
    }
    report(
        "3 (mass laws along U and the geodesic)",
        worst < 1e-9,
        &format!("max relative discrepancy {worst:.2e} (tolerance 1e-9)"),
    );
}

// ---------------------------------------------------------------- C4

#[test]
fn criterion_4_area_conservation() {
    let mut rng = flatsurf::rng(404);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (q, _) = random_float_slit_pair(&mut rng);
        let f = random_cocycle(&q, &mut rng);
        let t = rng.gen_range(-3.0..3.0);
        let (qt, _, _) = tremor(&q, &f, t).unwrap();
        worst = worst.max((qt.area() - q.area()).abs());
    }

    // flip-forcing case: an anti-invariant empirical loop cocycle on a
    // slit pair (gamma - iota gamma has zero y-period, so the tremor is
    // exactly area preserving, and its direction is not a per-triangle
    // shear, so triangles degenerate and flips fire)
    let mut rng2 = flatsurf::rng(405);
    let (q, inv) = random_float_slit_pair(&mut rng2);
    let sys = flatsurf::transverse::prong_system(&q, 0.7).unwrap();
    let (iet, sys) = first_return(&q, &sys).unwrap();
    let gens = cone_generators(&q, &sys, &iet).unwrap();
    let mut flips_seen = false;
    let mut flip_area_err: f64 = f64::NAN;
    'outer: for g in &gens {
        let anti = g.sub(&inv.pullback(g));
        if anti.max_abs() == 0.0 {
            continue;
        }
        let f = flatsurf::cocycle::empirical(anti, true, "anti-invariant loop dual");
        for t in [1.0, 2.0, 4.0, 8.0, -1.0, -2.0, -4.0] {
            if let Ok((qt, transport, _)) = tremor(&q, &f, t) {
                if !transport.is_identity() {
                    flips_seen = true;
                    flip_area_err = (qt.area() - q.area()).abs();
                    break 'outer;
                }
            }
        }
    }
    report(
        "4 (area conservation along tremor paths)",
        worst < 1e-10 && flips_seen && flip_area_err < 1e-10,
        &format!(
            "max |area drift| {worst:.2e} on 100 draws; flip case drift {flip_area_err:.2e}"
        ),
    );
}

// ---------------------------------------------------------------- C5

#[test]
fn criterion_5_checkerboard() {
    let start = std::time::Instant::now();
    // worked instance
    let r = checkerboard_search(0.5, 2f64.sqrt(), 0.3, 0.01, 200.0, 100).unwrap();
    let worked = (r.m, r.n) == (1, 0) && (r.imbalance - 0.29289).abs() < 1e-5;

    // 50 random instances: coloring area difference matches the formula
    let mut rng = flatsurf::rng(505);
    let bases = [
        2f64.sqrt(),
        3f64.sqrt(),
        5f64.sqrt(),
        (1.0 + 5f64.sqrt()) / 2.0,
        std::f64::consts::E,
        std::f64::consts::PI / 2.0,
    ];
    let mut worst: f64 = 0.0;
    let mut done = 0;
    while done < 50 {
        let alpha = bases[rng.gen_range(0..bases.len())] * rng.gen_range(0.618..1.618);
        let x = rng.gen_range(0.2..0.9);
        let c = rng.gen_range(0.15..0.85);
        let Ok(res) = checkerboard_search(x, alpha, c, 0.01, 150.0, 200) else {
            continue;
        };
        let rep = checkerboard_verify(x, alpha, &res).unwrap();
        assert!(rep.z2_trivial && rep.coloring_proper, "subdivision checks");
        worst = worst.max((rep.imbalance_from_coloring - rep.imbalance_formula).abs());
        done += 1;
    }
    runtime_gate("C5", start, 60.0);
    report(
        "5 (checkerboard search and verification)",
        worked && worst < 1e-8,
        &format!(
            "worked instance (m,n)=({},{}), imbalance {:.5}; max coloring-formula gap {worst:.2e} on 50 draws",
            r.m, r.n, r.imbalance
        ),
    );
}

// ---------------------------------------------------------------- C6

#[test]
fn criterion_6_convex_lemma_constants() {
    let start = std::time::Instant::now();
    let mut all_bounded = true;
    for dim in [2usize, 3] {
        let c_bound = thin_bound(dim);
        let mut rng = flatsurf::rng(600 + dim as u64);
        for i in 0..200 {
            let k = random_polytope(dim, &mut rng);
            for eps in [0.4, 0.2, 0.1] {
                let n_outer = 120;
                let f = eps_thin_fraction(&k, eps, n_outer, 96, 6000 + i).unwrap();
                let sigma = (f * (1.0 - f) / n_outer as f64).sqrt();
                if f > c_bound * eps * eps + 3.0 * sigma {
                    all_bounded = false;
                }
            }
        }
    }

    // slope calibration on sliver bodies whose thin sets are nonempty
    let mut slopes = Vec::new();
    for dim in [2usize, 3] {
        let angle = 5e-3;
        let k = sliver(dim, angle).unwrap();
        let eps_grid = [0.9, 0.7, 0.5];
        let mut fractions = Vec::new();
        for (j, &eps) in eps_grid.iter().enumerate() {
            let n_outer = if dim == 2 { 200_000 } else { 150_000 };
            let f = eps_thin_fraction(&k, eps, n_outer, 512, 7000 + j as u64).unwrap();
            assert!(f > 0.0, "sliver thin set empty at eps {eps} (d={dim})");
            fractions.push(f);
        }
        let xs: Vec<f64> = eps_grid.iter().map(|e| e.ln()).collect();
        let ys: Vec<f64> = fractions.iter().map(|f| f.ln()).collect();
        let xb = xs.iter().sum::<f64>() / 3.0;
        let yb = ys.iter().sum::<f64>() / 3.0;
        let slope = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| (x - xb) * (y - yb))
            .sum::<f64>()
            / xs.iter().map(|x| (x - xb) * (x - xb)).sum::<f64>();
        slopes.push(slope);
    }
    let slopes_ok = slopes.iter().all(|&s| s >= 2.0 - 0.3);
    runtime_gate("C6", start, 300.0);
    report(
        "6 (convex lemma with paper constants)",
        all_bounded && slopes_ok,
        &format!(
            "fraction <= C eps^2 + 3 sigma on 200 polytopes in d=2 (c=1/32, C=18) and d=3 \
             (c=1/96, C=36); sliver log-log slopes {slopes:.3?} >= 1.7"
        ),
    );
}

// ---------------------------------------------------------------- C7

#[test]
fn criterion_7_covering_corollary() {
    let start = std::time::Instant::now();
    let mut all_banded = true;
    let mut details = String::new();
    for dim in [2usize, 3] {
        // cbar from the corollary's derivation: cbar < c / (2^d V_d)
        let cbar = thin_constant(dim) / (f64::powi(2.0, dim as i32) * unit_ball_volume(dim)) / 2.0;
        let angle = if dim == 2 { cbar / 3.0 } else { 2.0 * cbar };
        let k = sliver(dim, angle).unwrap();
        let r = k.inradius().unwrap();
        let mut rng = flatsurf::rng(700 + dim as u64);
        let mut scaled = Vec::new();
        for eps in [0.5, 0.25, 0.1, 0.05] {
            let want = if dim == 2 { 400 } else { 2200 };
            let pts = sample_thin_set(&k, eps, cbar, want, &mut rng);
            assert!(
                pts.len() >= want / 2,
                "thin-set sampling starved at eps {eps} (d={dim})"
            );
            let n = covering_number(&pts, eps * r);
            scaled.push(n as f64 * eps.powi(dim as i32 - 2));
        }
        let lo = scaled.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = scaled.iter().cloned().fold(0.0f64, f64::max);
        if hi / lo > 2.0 {
            all_banded = false;
        }
        details.push_str(&format!("d={dim}: N*eps^(d-2) = {scaled:.2?}; "));
    }
    runtime_gate("C7", start, 300.0);
    report(
        "7 (covering corollary scaling)",
        all_banded,
        &format!("{details}within a factor-2 band across a decade of eps"),
    );
}

// ---------------------------------------------------------------- C8

#[test]
fn criterion_8_deviation_inequalities() {
    let mut rng = flatsurf::rng(808);
    let s_grid: Vec<f64> = (-3..=3).map(|k| k as f64).collect();
    let t_grid = [-1.0, 0.0, 1.0];
    let mut all_pass = true;
    for i in 0..20 {
        let (q0, _) = if i % 2 == 0 {
            random_float_slit_pair(&mut rng)
        } else {
            let a = 1.0 + rng.gen_range(0.1..0.9);
            let q = flatsurf::builders::torus(
                Vec2::new(1.0, rng.gen_range(0.3..0.9)),
                Vec2::new(rng.gen_range(-0.2..0.2), a),
            )
            .unwrap();
            (q, Involution { perm: vec![] })
        };
        // perturb along a closed x-cochain to stay a valid surface
        let basis = flatsurf::homology::closed_cochain_basis(&q0.tri);
        let dir = &basis[rng.gen_range(0..basis.len())];
        let scale = 1e-3 / dir.max_abs().max(1.0);
        let q1 = q0
            .map_holonomy(|d, v| {
                Vec2::new(v.x + scale * dir.value(d).to_f64(), v.y)
            })
            .unwrap();
        let rep = deviation_check(&q0, &q1, &s_grid, &t_grid).unwrap();
        if !rep.all_pass() {
            all_pass = false;
        }
    }
    report(
        "8 (horocycle and geodesic deviation bounds)",
        all_pass,
        "quadratic and exponential factors hold at every grid point for 20 perturbed pairs",
    );
}

// ---------------------------------------------------------------- C9

#[test]
fn criterion_9_cone_containment() {
    let start = std::time::Instant::now();
    let mut rng = flatsurf::rng(909);
    let irrationals = [
        2f64.sqrt(),
        3f64.sqrt(),
        5f64.sqrt(),
        (1.0 + 5f64.sqrt()) / 2.0,
        std::f64::consts::E - 2.0,
        std::f64::consts::PI - 3.0,
        2f64.sqrt() / 2.0,
        3f64.sqrt() / 3.0,
        7f64.sqrt() - 2.0,
        std::f64::consts::LN_2,
    ];
    let t_levels = [0.0, 1.0, 2.0, 3.0];
    let mut all_ok = true;

    // 10 horizontally-minimal tori (lattice basis without vertical edges)
    for (i, &alpha) in irrationals.iter().enumerate() {
        let a = 0.5 + alpha.fract();
        let q = flatsurf::builders::torus(Vec2::new(1.0, a), Vec2::new(1.0, 1.0 + a)).unwrap();
        if !cone_ladder_ok(&q, &t_levels, i as u64) {
            all_ok = false;
        }
    }
    // 5 slit pairs
    for _ in 0..5 {
        let (q, _) = random_float_slit_pair(&mut rng);
        if !cone_ladder_ok(&q, &t_levels, 77) {
            all_ok = false;
        }
    }
    runtime_gate("C9", start, 120.0);
    report(
        "9 (cone containment and nesting)",
        all_ok,
        "dy feasible in C+(prongs) for t in {0,1,2,3}, deeper generators feasible in shallower cones",
    );
}

fn cone_ladder_ok(q: &TranslationSurface<f64>, t_levels: &[f64], _tag: u64) -> bool {
    let Ok(tower) = prong_tower(q, t_levels) else {
        return false;
    };
    let dy = hol_y(q);
    let mut prev_gens: Option<Vec<Cochain1<f64>>> = None;
    for sys in tower {
        let Ok((iet, sys)) = first_return(q, &sys) else {
            return false;
        };
        let Ok(gens) = cone_generators(q, &sys, &iet) else {
            return false;
        };
        if !cone_contains(&q.tri, &gens, &dy, 1e-9) {
            return false;
        }
        if let Some(prev) = &prev_gens {
            for g in &gens {
                if !cone_contains(&q.tri, prev, g, 1e-9) {
                    return false;
                }
            }
        }
        prev_gens = Some(gens);
    }
    true
}

// ---------------------------------------------------------------- C10

#[test]
fn criterion_10_iet_correctness() {
    // rotation by -sqrt2 mod 1 on the vertical circle
    let alpha = 2f64.sqrt();
    let q = flatsurf::builders::torus(Vec2::new(1.0, alpha), Vec2::new(0.0, 1.0)).unwrap();
    let start = flatsurf::flow::Point {
        tri: 0,
        xy: Vec2::new(0.5, 0.5 * alpha + 1e-3),
    };
    let circle = flatsurf::transverse::vertical_circle(&q, &start, 5.0).unwrap();
    let sys = flatsurf::transverse::TransverseSystem::new(vec![circle]);
    let (iet, _) = first_return(&q, &sys).unwrap();
    let expect = 0.5857864376;
    let mut rot_ok = true;
    for i in 0..iet.num_intervals() {
        let t = iet.translations[i].rem_euclid(1.0);
        if (t - expect).abs() > 1e-9 {
            rot_ok = false;
        }
    }

    // Birkhoff average of the half band {frac(y - alpha x) < 1/2}
    let p = flatsurf::flow::centroid(&q, 0);
    let lambda = vec![(-alpha, 1.0, 0.0); 2];
    let avg = banded_occupancy(&q, &p, &Vec2::new(1.0, 0.0), 1e4, &lambda, 0.5).unwrap();
    let birkhoff_ok = (avg - 0.5).abs() < 0.01;
    report(
        "10 (first-return IET and Birkhoff average)",
        rot_ok && birkhoff_ok,
        &format!(
            "rotation translations match {expect} to 1e-9; half-band average {avg:.4} = 0.5 +/- 0.01"
        ),
    );
}

// ---------------------------------------------------------------- C11

#[test]
fn criterion_11_nonergodicity_witness() {
    // Documented parameter set: Liouville-type rotation number theta with
    // continued fraction [0; 2, 800, 6000, ...] and slit length 1/2. The
    // surface is two tori glued along the horizontal slit with torus A
    // sheared by u_{2a}; occupancy averages of region A from
    // iota-symmetric start points differ by > 0.05 at T = 1e5. This is a
    // finite-horizon witness, not a proof of non-ergodicity.
    let theta = cf_value(&[2.0, 800.0, 6000.0, 40000.0]);
    let x = 0.5;
    let a = 0.25;
    let (q, inv) = witness_surface(theta, x, a);
    let region_a: Vec<usize> = q.region("A").unwrap().to_vec();

    // iota-symmetric start points: a point of torus A and its involution
    // image in torus B
    let p = flatsurf::flow::centroid(&q, 1);
    let p_img = involution_image(&q, &inv, &p);
    let t_max = 1e5;
    let occ_a = flatsurf::flow::birkhoff_average(&q, &p, &Vec2::new(1.0, 0.0), t_max, &region_a)
        .unwrap();
    let occ_b =
        flatsurf::flow::birkhoff_average(&q, &p_img, &Vec2::new(1.0, 0.0), t_max, &region_a)
            .unwrap();
    let gap = (occ_a - occ_b).abs();
    report(
        "11 (non-unique-ergodicity witness)",
        gap > 0.05,
        &format!(
            "occupancy gap {gap:.4} > 0.05 at T = 1e5 (finite-horizon witness; theta CF [0;2,800,6000,40000], x = 1/2, a = 1/4)"
        ),
    );
}

fn cf_value(partial_quotients: &[f64]) -> f64 {
    let mut v = 0.0;
    for &a in partial_quotients.iter().rev() {
        v = 1.0 / (a + v);
    }
    v
}

/// Slit pair whose horizontal first-return rotation number is theta:
/// lattice u = (1, theta - 1), v = (1/2, theta/2), horizontal slit (x, 0),
/// torus A sheared by u_{2a}.
fn witness_surface(theta: f64, x: f64, a: f64) -> (TranslationSurface<f64>, Inv) {
    let u = Vec2::new(1.0, theta - 1.0);
    let v = Vec2::new(0.5, theta / 2.0);
    flatsurf::eigenform::slit_construct(&SlitTorusData {
        u,
        v,
        slit: Vec2::new(x, 0.0),
        shears: (2.0 * a, 0.0),
    })
    .unwrap()
}

fn involution_image(
    q: &TranslationSurface<f64>,
    inv: &Inv,
    p: &flatsurf::flow::Point<f64>,
) -> flatsurf::flow::Point<f64> {
    // the involution maps triangle slots by the dart permutation; centroid
    // of the image triangle mirrors the centroid of the source
    let d0 = q.tri.triangles[p.tri][0];
    let image_tri = q.tri.tri_of(inv.apply(d0));
    flatsurf::flow::centroid(q, image_tri)
}

// ---------------------------------------------------------------- C12

#[test]
fn criterion_12_dimension_calibration() {
    let start = std::time::Instant::now();
    // unit square
    let pts = square_cloud(20_000, 3);
    let rep = box_dim_estimate(&pts, &[0.2, 0.1, 0.05, 0.02, 0.01], 3).unwrap();
    let square_ok = (rep.slope - 2.0).abs() < 0.15;

    // Cantor cloud
    let cpts = cantor_cloud(12);
    let radii: Vec<f64> = (0..6).map(|i| 0.1 * 3f64.powi(-i)).collect();
    let crep = box_dim_estimate(&cpts, &radii, 0).unwrap();
    let cantor_ok = (crep.slope - 0.6309).abs() < 0.05;

    // locus slice (a = 0) and tremor cloud (a = 1): each cloud is
    // measured in its own min-max normalized chart with a fixed
    // four-radius decade grid
    let n = 2_000_000;
    let grid: Vec<f64> = (0..4).map(|i| 1.2 * 10f64.powf(-(i as f64) / 3.0)).collect();
    let (slice, _) = sample_tremor_set(0.0, n, 5).unwrap();
    let slice = normalize_cloud(slice);
    let srep = box_dim_estimate(&slice, &grid, 5).unwrap();
    let slice_ok = (srep.slope - 5.0).abs() < 0.3;
    drop(slice);

    let (cloud, _) = sample_tremor_set(1.0, n, 6).unwrap();
    let cloud = normalize_cloud(cloud);
    let trep = box_dim_estimate(&cloud, &grid, 6).unwrap();
    // The desk-computable tremor cloud is itself five-dimensional: by the
    // pass-to-balanced identity the symmetric shear component moves the
    // base point inside the horizontal-slit family, so only the balanced
    // direction extends it; the strictly-greater comparison below has no
    // mathematical driver at desk scale and is expected to fail by a
    // small margin. It is asserted as stated rather than weakened.
    let tremor_ok = trep.slope > srep.slope && trep.slope < 6.0;

    runtime_gate("C12", start, 600.0);
    report(
        "12 (dimension estimator calibration)",
        square_ok && cantor_ok && slice_ok && tremor_ok,
        &format!(
            "square {:.3}+/-{:.3}; cantor {:.3}+/-{:.3}; slice(a=0) {:.3}+/-{:.3}; tremor(a=1) {:.3}+/-{:.3} strictly between",
            rep.slope, rep.ci, crep.slope, crep.ci, srep.slope, srep.ci, trep.slope, trep.ci
        ),
    );
}

fn normalize_cloud(mut cloud: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let dim = cloud[0].len();
    for i in 0..dim {
        let lo = cloud.iter().map(|p| p[i]).fold(f64::INFINITY, f64::min);
        let hi = cloud.iter().map(|p| p[i]).fold(f64::NEG_INFINITY, f64::max);
        let span = (hi - lo).max(1e-9);
        for p in cloud.iter_mut() {
            p[i] = (p[i] - lo) / span;
        }
    }
    cloud
}

// ------------------------------------------------- supporting identities

#[test]
fn tremor_flow_group_law_on_slit_pairs() {
    let mut rng = flatsurf::rng(4242);
    let (q, _) = random_float_slit_pair(&mut rng);
    let f = random_cocycle(&q, &mut rng);
    let (q1, _, f1) = tremor(&q, &f, 0.7).unwrap();
    let (q12, _, _) = tremor(&q1, &f1, 0.5).unwrap();
    let (q2, _, _) = tremor(&q, &f, 1.2).unwrap();
    assert!(max_edge_discrepancy(&q12, &q2) < 1e-12);
}

#[test]
fn balance_identity_on_slit_pairs() {
    // trem(q, beta) = trem(u_s q, beta - s dy) with s = L(beta)
    let mut rng = flatsurf::rng(2424);
    let (q, _) = random_float_slit_pair(&mut rng);
    let ra = restriction_dy(&q, q.region("A").unwrap(), "A").unwrap();
    let (s, balanced) = balance(&q, &ra).unwrap();
    assert!((s - 0.5).abs() < 1e-12);
    let (lhs, _, _) = tremor(&q, &ra, 1.0).unwrap();
    let uq = apply_matrix(&q, &Mat2::horocycle(s)).unwrap();
    let b_on_uq =
        from_weights(&uq, balanced.weights.clone().unwrap(), Provenance::Combination).unwrap();
    let (rhs, _, _) = tremor(&uq, &b_on_uq, 1.0).unwrap();
    assert!(max_edge_discrepancy(&lhs, &rhs) < 1e-10);
    let rep = total_variation(&q, &balanced).unwrap();
    assert!(rep.balanced && (rep.l_abs - 0.5).abs() < 1e-9);
}

#[test]
fn signed_mass_agrees_with_cup_product_oracle() {
    // the bilinear-relations route must agree with the direct cup
    // evaluation for random cocycles on slit pairs
    let mut rng = flatsurf::rng(5151);
    for _ in 0..10 {
        let (q, _) = random_float_slit_pair(&mut rng);
        let f = random_cocycle(&q, &mut rng);
        let beta = f.class();
        let via_basis = signed_mass(&q, &beta).unwrap();
        let via_cup = cup(&q.tri, &hol_x(&q), &beta);
        assert!(
            (via_basis - via_cup).abs() < 1e-9,
            "bilinear {via_basis} vs cup {via_cup}"
        );
    }
}

#[test]
fn saddle_connection_horizontal_filter_finds_slits() {
    let mut rng = flatsurf::rng(6161);
    let (q, _) = random_float_slit_pair(&mut rng);
    let slit_len = q.hol(5).x.abs();
    let conns = enumerate_saddle_connections(&q, slit_len * 1.01, None);
    let horizontal: Vec<_> = conns
        .iter()
        .filter(|c| c.is_horizontal(q.max_edge()) && (c.length() - slit_len).abs() < 1e-9)
        .collect();
    assert!(
        horizontal.len() >= 2,
        "expected both slit connections, found {}",
        horizontal.len()
    );
}
