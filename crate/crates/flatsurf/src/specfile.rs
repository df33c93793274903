//! The `tsurf-v1` surface document: a JSON description of a triangulated
//! translation surface with either exact rational or float holonomy.
//!
//! Numeric entries are `[numerator, denominator]` pairs (exact) or plain
//! decimal floats. A document mixing both kinds is rejected unless
//! `allow_mixed` is set, in which case everything is read as floats.

use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::num::{Rat, Scalar};
use crate::surface::{TranslationSurface, Triangulation, VertexLabel};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NumVal {
    Exact([i64; 2]),
    Float(f64),
}

impl NumVal {
    fn is_exact(&self) -> bool {
        matches!(self, NumVal::Exact(_))
    }

    fn to_rat(&self) -> Rat {
        match self {
            NumVal::Exact([n, d]) => crate::num::rat_ratio(*n, *d),
            NumVal::Float(x) => crate::num::rat_from_f64(*x),
        }
    }

    fn to_float(&self) -> f64 {
        match self {
            NumVal::Exact([n, d]) => *n as f64 / *d as f64,
            NumVal::Float(x) => *x,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EdgeEntry {
    pub dart: usize,
    pub x: NumVal,
    pub y: NumVal,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VertexEntry {
    pub dart: usize,
    pub label: String,
    pub order: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SurfaceDoc {
    pub format: String,
    pub triangles: Vec<[usize; 3]>,
    pub gluing: Vec<usize>,
    pub holonomy: Vec<EdgeEntry>,
    pub vertices: Vec<VertexEntry>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub regions: BTreeMap<String, Vec<usize>>,
}

/// A validated surface in whichever numeric mode the document used.
pub enum LoadedSurface {
    Exact(TranslationSurface<Rat>),
    Float(TranslationSurface<f64>),
}

impl LoadedSurface {
    pub fn mode(&self) -> &'static str {
        match self {
            LoadedSurface::Exact(_) => "exact",
            LoadedSurface::Float(_) => "float",
        }
    }

    pub fn to_float(&self) -> TranslationSurface<f64> {
        match self {
            LoadedSurface::Exact(q) => q.to_f64(),
            LoadedSurface::Float(q) => q.clone(),
        }
    }
}

impl SurfaceDoc {
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SurfaceDoc =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if doc.format != "tsurf-v1" {
            return Err(Error::Parse(format!("unknown format {:?}", doc.format)));
        }
        Ok(doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    /// Builds the surface, selecting exact mode iff every entry is a
    /// rational pair.
    pub fn build(&self, allow_mixed: bool) -> Result<LoadedSurface> {
        let exact_count = self
            .holonomy
            .iter()
            .map(|e| e.x.is_exact() as usize + e.y.is_exact() as usize)
            .sum::<usize>();
        let total = 2 * self.holonomy.len();
        if exact_count == total {
            Ok(LoadedSurface::Exact(self.build_scalar(NumVal::to_rat)?))
        } else if exact_count == 0 || allow_mixed {
            Ok(LoadedSurface::Float(self.build_scalar(NumVal::to_float)?))
        } else {
            Err(Error::MixedNumericMode)
        }
    }

    fn build_scalar<S: Scalar, F: Fn(&NumVal) -> S>(&self, conv: F) -> Result<TranslationSurface<S>> {
        let labels = self
            .vertices
            .iter()
            .map(|v| VertexLabel {
                label: v.label.clone(),
                order: v.order,
                dart: v.dart,
            })
            .collect();
        let tri = Triangulation::new(self.triangles.clone(), self.gluing.clone(), labels)?;
        let mut hol: Vec<Option<Vec2<S>>> = vec![None; tri.num_darts()];
        for e in &self.holonomy {
            if e.dart >= hol.len() {
                return Err(Error::Parse(format!("holonomy dart {} out of range", e.dart)));
            }
            if hol[e.dart].is_some() {
                return Err(Error::Parse(format!("duplicate holonomy for dart {}", e.dart)));
            }
            hol[e.dart] = Some(Vec2::new(conv(&e.x), conv(&e.y)));
        }
        TranslationSurface::new(tri, hol, self.regions.clone())
    }
}

/// Serializes a float surface back to a document (canonical darts only).
pub fn doc_from_surface_f64(q: &TranslationSurface<f64>) -> SurfaceDoc {
    doc_from_surface(q, |s| NumVal::Float(*s))
}

/// Serializes an exact surface; numerator/denominator must fit in i64.
pub fn doc_from_surface_exact(q: &TranslationSurface<Rat>) -> Result<SurfaceDoc> {
    use num_traits::ToPrimitive;
    let mut oversize = false;
    let doc = doc_from_surface(q, |s: &Rat| {
        match (s.numer().to_i64(), s.denom().to_i64()) {
            (Some(n), Some(d)) => NumVal::Exact([n, d]),
            _ => {
                oversize = true;
                NumVal::Float(Scalar::to_f64(s))
            }
        }
    });
    if oversize {
        return Err(Error::Numeric(
            "exact holonomy does not fit in i64 rational pairs".into(),
        ));
    }
    Ok(doc)
}

fn doc_from_surface<S: Scalar>(
    q: &TranslationSurface<S>,
    mut conv: impl FnMut(&S) -> NumVal,
) -> SurfaceDoc {
    let tri = &q.tri;
    let holonomy = (0..tri.num_darts())
        .filter(|&d| d <= tri.twin[d])
        .map(|d| EdgeEntry {
            dart: d,
            x: conv(&q.hol(d).x),
            y: conv(&q.hol(d).y),
        })
        .collect();
    let vertices = tri
        .vertex_labels
        .iter()
        .map(|v| VertexEntry {
            dart: v.dart,
            label: v.label.clone(),
            order: v.order,
        })
        .collect();
    SurfaceDoc {
        format: "tsurf-v1".into(),
        triangles: tri.triangles.clone(),
        gluing: tri.twin.clone(),
        holonomy,
        vertices,
        regions: q.regions.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQUARE_TORUS: &str = r#"{
        "format": "tsurf-v1",
        "triangles": [[0,2,5],[4,1,3]],
        "gluing": [1,0,3,2,5,4],
        "holonomy": [
            {"dart": 0, "x": [1,1], "y": [0,1]},
            {"dart": 2, "x": [0,1], "y": [1,1]},
            {"dart": 4, "x": [1,1], "y": [1,1]}
        ],
        "vertices": [{"dart": 0, "label": "p0", "order": 0}]
    }"#;

    #[test]
    fn load_exact_square_torus() {
        let doc = SurfaceDoc::from_json(SQUARE_TORUS).unwrap();
        let s = doc.build(false).unwrap();
        assert_eq!(s.mode(), "exact");
        match s {
            LoadedSurface::Exact(q) => {
                assert_eq!(q.tri.genus(), 1);
                assert_eq!(q.area(), crate::num::rat_int(1));
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn mixed_mode_rejected_unless_allowed() {
        let text = SQUARE_TORUS.replace("\"x\": [1,1], \"y\": [0,1]", "\"x\": 1.0, \"y\": [0,1]");
        let doc = SurfaceDoc::from_json(&text).unwrap();
        assert!(matches!(doc.build(false), Err(Error::MixedNumericMode)));
        assert_eq!(doc.build(true).unwrap().mode(), "float");
    }

    #[test]
    fn broken_closure_rejected() {
        let text = SQUARE_TORUS.replace("{\"dart\": 4, \"x\": [1,1], \"y\": [1,1]}", "{\"dart\": 4, \"x\": [1,1], \"y\": [2,1]}");
        let doc = SurfaceDoc::from_json(&text).unwrap();
        assert!(matches!(
            doc.build(false),
            Err(Error::ClosureViolation(_))
        ));
    }

    #[test]
    fn roundtrip() {
        let doc = SurfaceDoc::from_json(SQUARE_TORUS).unwrap();
        let s1 = doc.build(false).unwrap();
        let q1 = match s1 {
            LoadedSurface::Exact(q) => q,
            _ => unreachable!(),
        };
        let doc2 = doc_from_surface_exact(&q1).unwrap();
        let q2 = match doc2.build(false).unwrap() {
            LoadedSurface::Exact(q) => q,
            _ => unreachable!(),
        };
        assert_eq!(q1.hols(), q2.hols());
    }
}
