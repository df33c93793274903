//! Python bindings: float-mode surfaces, the group actions and tremors,
//! slit pairs, first-return interval exchanges, checkerboards, and the
//! covering estimators.

use flatsurf::cocycle::{canonical_dy, combination, restriction_dy, total_variation};
use flatsurf::cover::{box_dim_estimate, sample_tremor_set};
use flatsurf::eigenform::{checkerboard_search, checkerboard_verify, slit_construct, SlitTorusData};
use flatsurf::flow::{birkhoff_average, centroid, Point};
use flatsurf::geom::{Mat2, Vec2};
use flatsurf::linear::apply_matrix;
use flatsurf::loops::{cone_contains, cone_generators};
use flatsurf::saddle::{enumerate_saddle_connections, systole};
use flatsurf::specfile::{doc_from_surface_f64, SurfaceDoc};
use flatsurf::transverse::{first_return, prong_system};
use flatsurf::TranslationSurface;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: flatsurf::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A validated float-mode translation surface.
#[pyclass]
#[derive(Clone)]
struct Surface {
    q: TranslationSurface<f64>,
}

#[pymethods]
impl Surface {
    /// Load from a tsurf-v1 JSON string.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let doc = SurfaceDoc::from_json(text).map_err(err)?;
        let q = doc.build(true).map_err(err)?.to_float();
        Ok(Surface { q })
    }

    /// Torus from lattice generators.
    #[staticmethod]
    fn torus(u: (f64, f64), v: (f64, f64)) -> PyResult<Self> {
        let q = flatsurf::builders::torus(Vec2::new(u.0, u.1), Vec2::new(v.0, v.1))
            .map_err(err)?;
        Ok(Surface { q })
    }

    /// Two tori glued along a slit, with horizontal shears.
    #[staticmethod]
    #[pyo3(signature = (u, v, slit, shears=(0.0, 0.0)))]
    fn slit_pair(
        u: (f64, f64),
        v: (f64, f64),
        slit: (f64, f64),
        shears: (f64, f64),
    ) -> PyResult<Self> {
        let (q, _inv) = slit_construct(&SlitTorusData {
            u: Vec2::new(u.0, u.1),
            v: Vec2::new(v.0, v.1),
            slit: Vec2::new(slit.0, slit.1),
            shears,
        })
        .map_err(err)?;
        Ok(Surface { q })
    }

    fn to_json(&self) -> String {
        doc_from_surface_f64(&self.q).to_json()
    }

    #[getter]
    fn genus(&self) -> i64 {
        self.q.tri.genus()
    }

    #[getter]
    fn area(&self) -> f64 {
        self.q.area()
    }

    fn cone_angles(&self) -> Vec<f64> {
        (0..self.q.tri.num_vertices())
            .map(|v| self.q.cone_angle(v))
            .collect()
    }

    fn systole(&self) -> f64 {
        systole(&self.q)
    }

    fn num_saddle_connections(&self, l_max: f64) -> usize {
        enumerate_saddle_connections(&self.q, l_max, None).len()
    }

    /// Apply the horocycle element u_s.
    fn horocycle(&self, s: f64) -> PyResult<Self> {
        Ok(Surface {
            q: apply_matrix(&self.q, &Mat2::horocycle(s)).map_err(err)?,
        })
    }

    /// Apply the geodesic element g_t = diag(e^t, e^-t).
    fn geodesic(&self, t: f64) -> PyResult<Self> {
        Ok(Surface {
            q: apply_matrix(&self.q, &Mat2::geodesic(t)).map_err(err)?,
        })
    }

    /// Tremor along dy (equals the horocycle flow).
    fn tremor_dy(&self, t: f64) -> PyResult<Self> {
        let dy = canonical_dy(&self.q);
        let (q, _, _) = flatsurf::tremor::tremor(&self.q, &dy, t).map_err(err)?;
        Ok(Surface { q })
    }

    /// Tremor along a combination of named region restrictions.
    fn tremor_regions(&self, weights: Vec<(String, f64)>, t: f64) -> PyResult<Self> {
        let mut terms = Vec::new();
        for (name, w) in &weights {
            let tris = self
                .q
                .region(name)
                .ok_or_else(|| PyValueError::new_err(format!("unknown region {name:?}")))?;
            terms.push((*w, restriction_dy(&self.q, tris, name).map_err(err)?));
        }
        let refs: Vec<(f64, &flatsurf::cocycle::FoliationCocycle<f64>)> =
            terms.iter().map(|(w, f)| (*w, f)).collect();
        let beta = combination(&self.q, &refs).map_err(err)?;
        let (q, _, _) = flatsurf::tremor::tremor(&self.q, &beta, t).map_err(err)?;
        Ok(Surface { q })
    }

    /// Signed mass and total variation of a region-restriction cocycle.
    fn mass_of_region(&self, name: &str) -> PyResult<(f64, f64)> {
        let tris = self
            .q
            .region(name)
            .ok_or_else(|| PyValueError::new_err(format!("unknown region {name:?}")))?;
        let f = restriction_dy(&self.q, tris, name).map_err(err)?;
        let rep = total_variation(&self.q, &f).map_err(err)?;
        Ok((rep.l, rep.l_abs))
    }

    /// Edge holonomies as a list of (dart, x, y).
    fn holonomies(&self) -> Vec<(usize, f64, f64)> {
        (0..self.q.tri.num_darts())
            .map(|d| (d, self.q.hol(d).x, self.q.hol(d).y))
            .collect()
    }

    /// Birkhoff average of a triangle-set indicator along the flow from
    /// the centroid of `start_tri`.
    fn birkhoff(&self, start_tri: usize, theta: f64, time: f64, region: Vec<usize>) -> PyResult<f64> {
        let p: Point<f64> = centroid(&self.q, start_tri);
        birkhoff_average(&self.q, &p, &Vec2::unit(theta), time, &region).map_err(err)
    }

    /// First-return interval exchange over the prong system at depth
    /// parameter `t`: returns (lengths, permutation, translations).
    fn prong_iet(&self, t: f64) -> PyResult<(Vec<f64>, Vec<usize>, Vec<f64>)> {
        let sys = prong_system(&self.q, t).map_err(err)?;
        let (iet, _) = first_return(&self.q, &sys).map_err(err)?;
        Ok((iet.lengths.clone(), iet.permutation.clone(), iet.translations.clone()))
    }

    /// Whether dy lies in the cone generated by the prong system's
    /// almost-horizontal loops.
    fn dy_in_prong_cone(&self, t: f64) -> PyResult<bool> {
        let sys = prong_system(&self.q, t).map_err(err)?;
        let (iet, sys) = first_return(&self.q, &sys).map_err(err)?;
        let gens = cone_generators(&self.q, &sys, &iet).map_err(err)?;
        Ok(cone_contains(
            &self.q.tri,
            &gens,
            &flatsurf::cochain::hol_y(&self.q),
            1e-9,
        ))
    }

    fn __repr__(&self) -> String {
        format!(
            "Surface(genus={}, area={:.6}, vertices={})",
            self.q.tri.genus(),
            self.q.area(),
            self.q.tri.num_vertices()
        )
    }
}

/// Checkerboard search on the standard torus; returns a dict-like tuple
/// (m, n, k, imbalance, theta, checks_pass).
#[pyfunction]
fn checkerboard(
    x: f64,
    alpha: f64,
    c: f64,
    eta: f64,
    big_h: f64,
) -> PyResult<(i64, i64, u64, f64, f64, bool)> {
    let r = checkerboard_search(x, alpha, c, eta, big_h, 100).map_err(err)?;
    let rep = checkerboard_verify(x, alpha, &r).map_err(err)?;
    Ok((r.m, r.n, r.k, r.imbalance, r.theta, rep.all_pass(1e-8)))
}

/// Box-counting dimension of a point cloud: returns (slope, ci).
#[pyfunction]
fn box_dimension(points: Vec<Vec<f64>>, radii: Vec<f64>) -> PyResult<(f64, f64)> {
    let rep = box_dim_estimate(&points, &radii, 0).map_err(err)?;
    Ok((rep.slope, rep.ci))
}

/// Sampled tremor cloud in period coordinates: n points, seeded.
#[pyfunction]
fn tremor_cloud(a: f64, n: usize, seed: u64) -> PyResult<Vec<Vec<f64>>> {
    let (cloud, _) = sample_tremor_set(a, n, seed).map_err(err)?;
    Ok(cloud)
}

#[pymodule]
fn flatsurf_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Surface>()?;
    m.add_function(wrap_pyfunction!(checkerboard, m)?)?;
    m.add_function(wrap_pyfunction!(box_dimension, m)?)?;
    m.add_function(wrap_pyfunction!(tremor_cloud, m)?)?;
    Ok(())
}
