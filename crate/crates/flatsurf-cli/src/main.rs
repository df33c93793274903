//! Batch experiment harness: validates surface documents and drives the
//! tremor, flow, cone, checkerboard, and dimension experiments with
//! reproducible seeded outputs.
//!
//! Exit codes: 0 ok, 2 validation error, 3 numeric failure, 4 search
//! exhausted.

use clap::{Parser, Subcommand};
use flatsurf::cocycle::{canonical_dy, combination, restriction_dy};
use flatsurf::cover::{box_dim_estimate, sample_tremor_set};
use flatsurf::eigenform::{checkerboard_search, checkerboard_verify};
use flatsurf::error::Error;
use flatsurf::flow::{centroid, trajectory_csv, Point};
use flatsurf::geom::Vec2;
use flatsurf::loops::{cone_contains, cone_generators};
use flatsurf::saddle::systole;
use flatsurf::specfile::{doc_from_surface_f64, LoadedSurface, SurfaceDoc};
use flatsurf::transverse::{first_return, prong_system};
use flatsurf::tremor::tremor;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "flatsurf", about = "translation-surface experiment harness")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Load and validate a surface document; print genus, cone angles,
    /// area, and a systole estimate.
    Validate {
        #[arg(long)]
        surface: PathBuf,
        #[arg(long)]
        allow_mixed: bool,
    },
    /// Apply a tremor and write the deformed surface document.
    Tremor {
        #[arg(long)]
        surface: PathBuf,
        /// dy | restriction:REGION | combo:REGION=W,REGION=W,dy=W
        #[arg(long)]
        beta: String,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        allow_mixed: bool,
    },
    /// Trace the straightline flow and export crossings as CSV.
    Flow {
        #[arg(long)]
        surface: PathBuf,
        #[arg(long, default_value_t = 0)]
        triangle: usize,
        #[arg(long, default_value_t = 0.0)]
        theta: f64,
        #[arg(long)]
        time: f64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        allow_mixed: bool,
        /// Instead of a trajectory, build the prong system at this depth
        /// parameter and export the first-return interval exchange.
        #[arg(long)]
        first_return_t: Option<f64>,
    },
    /// Build prong-system cones and test dy for membership.
    Cone {
        #[arg(long)]
        surface: PathBuf,
        /// Comma-separated prong depth parameters.
        #[arg(long, default_value = "0,1,2,3")]
        t_levels: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        allow_mixed: bool,
    },
    /// Search for a checkerboard pair and verify its subdivision.
    Checkerboard {
        #[arg(long)]
        x: f64,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        c: f64,
        #[arg(long)]
        eta: f64,
        #[arg(long, default_value_t = 200.0)]
        big_h: f64,
        #[arg(long, default_value_t = 100)]
        search_bound: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a surface document: a torus or a slit pair.
    Make {
        /// torus | slitpair
        #[arg(long)]
        kind: String,
        /// Lattice generators as x,y pairs.
        #[arg(long, default_value = "1,0")]
        u: String,
        #[arg(long, default_value = "0,1")]
        v: String,
        /// Slit vector (slitpair only).
        #[arg(long, default_value = "0.5,0")]
        slit: String,
        /// Horizontal shears of the two tori (slitpair only).
        #[arg(long, default_value = "0,0")]
        shears: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Box-counting dimension of a point cloud (CSV rows of coordinates),
    /// or of a freshly sampled tremor cloud.
    Dim {
        #[arg(long)]
        input: Option<PathBuf>,
        /// Sample a tremor cloud with this total-variation bound instead
        /// of reading a file.
        #[arg(long)]
        tremor_cloud: Option<f64>,
        #[arg(long, default_value_t = 2000)]
        n: usize,
        #[arg(long)]
        radii: String,
        #[arg(long, default_value_t = 17)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error[{}]: {e}", error_code(&e));
            std::process::exit(e.exit_code());
        }
    }
}

fn error_code(e: &Error) -> String {
    let dbg = format!("{e:?}");
    dbg.split(['(', ' ']).next().unwrap_or("Error").to_string()
}

fn load(path: &PathBuf, allow_mixed: bool) -> Result<LoadedSurface, Error> {
    let text = std::fs::read_to_string(path)?;
    SurfaceDoc::from_json(&text)?.build(allow_mixed)
}

fn write_out(path: &Option<PathBuf>, content: &str) -> Result<(), Error> {
    match path {
        Some(p) => std::fs::write(p, content).map_err(Error::from),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.cmd {
        Cmd::Validate {
            surface,
            allow_mixed,
        } => {
            let s = load(&surface, allow_mixed)?;
            let q = s.to_float();
            println!("mode: {}", s.mode());
            println!("genus: {}", q.tri.genus());
            println!("area: {:.12}", q.area());
            for v in 0..q.tri.num_vertices() {
                let lbl = q.tri.label_of_vertex(v);
                println!(
                    "cone angle[{}]: {:.12} (order {})",
                    lbl.label,
                    q.cone_angle(v),
                    lbl.order
                );
            }
            println!("systole (estimate): {:.12}", systole(&q));
            Ok(())
        }
        Cmd::Tremor {
            surface,
            beta,
            t,
            out,
            allow_mixed,
        } => {
            let q = load(&surface, allow_mixed)?.to_float();
            let f = parse_beta(&q, &beta)?;
            let (q2, transport, _) = tremor(&q, &f, t)?;
            let doc = doc_from_surface_f64(&q2);
            let mut json: serde_json::Value =
                serde_json::from_str(&doc.to_json()).expect("roundtrip");
            json["config"] = serde_json::json!({
                "command": "tremor", "beta": beta, "t": t,
                "flips": transport.flips.len(),
            });
            std::fs::write(&out, serde_json::to_string_pretty(&json).unwrap())?;
            println!(
                "tremor applied: t = {t}, flips = {}, area = {:.12}",
                transport.flips.len(),
                q2.area()
            );
            Ok(())
        }
        Cmd::Flow {
            surface,
            triangle,
            theta,
            time,
            out,
            allow_mixed,
            first_return_t,
        } => {
            let q = load(&surface, allow_mixed)?.to_float();
            match first_return_t {
                None => {
                    let p: Point<f64> = centroid(&q, triangle);
                    let dir = Vec2::unit(theta);
                    let csv = trajectory_csv(&q, &p, &dir, time)?;
                    std::fs::write(&out, csv)?;
                    println!("trajectory written to {}", out.display());
                }
                Some(tp) => {
                    let sys = prong_system(&q, tp)?;
                    let (iet, sys) = first_return(&q, &sys)?;
                    std::fs::write(&out, iet.to_json())?;
                    println!(
                        "first-return IET: {} intervals over {} arcs (coverage length {:.3})",
                        iet.num_intervals(),
                        sys.arcs.len(),
                        sys.l_cert
                    );
                }
            }
            Ok(())
        }
        Cmd::Cone {
            surface,
            t_levels,
            out,
            allow_mixed,
        } => {
            let q = load(&surface, allow_mixed)?.to_float();
            let levels: Vec<f64> = t_levels
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| Error::Parse(e.to_string()))?;
            let dy = flatsurf::cochain::hol_y(&q);
            let mut csv = String::from("t,generators,dy_in_cone\n");
            for &t in &levels {
                let sys = prong_system(&q, t)?;
                let (iet, sys) = first_return(&q, &sys)?;
                let gens = cone_generators(&q, &sys, &iet)?;
                let inside = cone_contains(&q.tri, &gens, &dy, 1e-9);
                println!("t = {t}: {} generators, dy in cone: {inside}", gens.len());
                csv.push_str(&format!("{t},{},{inside}\n", gens.len()));
            }
            write_out(&out, &csv)?;
            Ok(())
        }
        Cmd::Checkerboard {
            x,
            alpha,
            c,
            eta,
            big_h,
            search_bound,
            out,
        } => {
            let r = checkerboard_search(x, alpha, c, eta, big_h, search_bound)?;
            let rep = checkerboard_verify(x, alpha, &r)?;
            let json = serde_json::json!({
                "config": {"command": "checkerboard", "x": x, "alpha": alpha,
                            "c": c, "eta": eta, "big_h": big_h},
                "m": r.m, "n": r.n, "k": r.k,
                "sigma2": [r.sigma2.x, r.sigma2.y],
                "imbalance": r.imbalance,
                "theta": r.theta,
                "checks": {
                    "z2_trivial": rep.z2_trivial,
                    "coloring_proper": rep.coloring_proper,
                    "imbalance_from_coloring": rep.imbalance_from_coloring,
                    "imbalance_formula": rep.imbalance_formula,
                    "strip_area": rep.strip_area,
                    "strip_area_det": rep.strip_area_det,
                },
            });
            println!(
                "(m,n) = ({},{}), k = {}, imbalance = {:.6}, checks pass: {}",
                r.m,
                r.n,
                r.k,
                r.imbalance,
                rep.all_pass(1e-8)
            );
            write_out(&out, &serde_json::to_string_pretty(&json).unwrap())?;
            Ok(())
        }
        Cmd::Make {
            kind,
            u,
            v,
            slit,
            shears,
            out,
        } => {
            let pair = |s: &str| -> Result<(f64, f64), Error> {
                let (a, b) = s
                    .split_once(',')
                    .ok_or_else(|| Error::Parse(format!("expected x,y pair: {s:?}")))?;
                Ok((
                    a.trim().parse().map_err(|e: std::num::ParseFloatError| {
                        Error::Parse(e.to_string())
                    })?,
                    b.trim().parse().map_err(|e: std::num::ParseFloatError| {
                        Error::Parse(e.to_string())
                    })?,
                ))
            };
            let (ux, uy) = pair(&u)?;
            let (vx, vy) = pair(&v)?;
            let q = match kind.as_str() {
                "torus" => flatsurf::builders::torus(Vec2::new(ux, uy), Vec2::new(vx, vy))?,
                "slitpair" => {
                    let (wx, wy) = pair(&slit)?;
                    let (s1, s2) = pair(&shears)?;
                    let (q, _inv) = flatsurf::eigenform::slit_construct(
                        &flatsurf::eigenform::SlitTorusData {
                            u: Vec2::new(ux, uy),
                            v: Vec2::new(vx, vy),
                            slit: Vec2::new(wx, wy),
                            shears: (s1, s2),
                        },
                    )?;
                    q
                }
                other => return Err(Error::Parse(format!("unknown kind {other:?}"))),
            };
            std::fs::write(&out, doc_from_surface_f64(&q).to_json())?;
            println!(
                "{kind} written to {} (genus {}, area {:.6})",
                out.display(),
                q.tri.genus(),
                q.area()
            );
            Ok(())
        }
        Cmd::Dim {
            input,
            tremor_cloud,
            n,
            radii,
            seed,
            out,
        } => {
            let radii: Vec<f64> = radii
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| Error::Parse(e.to_string()))?;
            let points: Vec<Vec<f64>> = match (&input, tremor_cloud) {
                (Some(path), _) => {
                    let text = std::fs::read_to_string(path)?;
                    text.lines()
                        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
                        .map(|l| {
                            l.split(',')
                                .map(|v| v.trim().parse::<f64>())
                                .collect::<Result<Vec<f64>, _>>()
                                .map_err(|e| Error::Parse(e.to_string()))
                        })
                        .collect::<Result<_, _>>()?
                }
                (None, Some(a)) => {
                    let (cloud, resampled) = sample_tremor_set(a, n, seed)?;
                    println!("sampled {} surfaces ({} resampled)", cloud.len(), resampled);
                    cloud
                }
                (None, None) => {
                    return Err(Error::Parse(
                        "need --input or --tremor-cloud".into(),
                    ))
                }
            };
            let rep = box_dim_estimate(&points, &radii, seed)?;
            println!(
                "box dimension: {:.4} +/- {:.4} over {} radii (seed {seed})",
                rep.slope,
                rep.ci,
                rep.radii.len()
            );
            write_out(&out, &rep.to_csv())?;
            Ok(())
        }
    }
}

/// Cocycle syntax: "dy", "restriction:REGION", or
/// "combo:A=1.5,B=-1.5,dy=0.25".
fn parse_beta(
    q: &flatsurf::TranslationSurface<f64>,
    spec: &str,
) -> Result<flatsurf::cocycle::FoliationCocycle<f64>, Error> {
    if spec == "dy" {
        return Ok(canonical_dy(q));
    }
    if let Some(region) = spec.strip_prefix("restriction:") {
        let tris = q
            .region(region)
            .ok_or_else(|| Error::Parse(format!("unknown region {region:?}")))?;
        return restriction_dy(q, tris, region);
    }
    if let Some(rest) = spec.strip_prefix("combo:") {
        let mut terms = Vec::new();
        for part in rest.split(',') {
            let (name, w) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("bad combo term {part:?}")))?;
            let w: f64 = w.parse().map_err(|e: std::num::ParseFloatError| {
                Error::Parse(e.to_string())
            })?;
            let f = if name == "dy" {
                canonical_dy(q)
            } else {
                let tris = q
                    .region(name)
                    .ok_or_else(|| Error::Parse(format!("unknown region {name:?}")))?;
                restriction_dy(q, tris, name)?
            };
            terms.push((w, f));
        }
        let refs: Vec<(f64, &flatsurf::cocycle::FoliationCocycle<f64>)> =
            terms.iter().map(|(w, f)| (*w, f)).collect();
        return combination(q, &refs);
    }
    Err(Error::Parse(format!("unknown cocycle spec {spec:?}")))
}
