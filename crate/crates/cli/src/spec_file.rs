//! Input file format: a JSON document describing either a cone by the
//! generators of its rays, or a lattice polytope by its vertices.

use conecount::ratmath::{Int, IntVec};
use serde::Deserialize;
use std::path::Path;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeSpecFile {
    pub name: String,
    pub dim: usize,
    #[serde(default)]
    pub rays: Option<Vec<Vec<i64>>>,
    #[serde(default)]
    pub polytope_vertices: Option<Vec<Vec<i64>>>,
    #[serde(default)]
    pub xi: Option<Vec<i64>>,
}

pub enum SpecKind {
    Cone { rays: Vec<IntVec>, xi: Option<IntVec> },
    Polytope { vertices: Vec<IntVec> },
}

pub struct Spec {
    pub name: String,
    pub dim: usize,
    pub kind: SpecKind,
}

fn to_intvecs(vs: &[Vec<i64>]) -> Vec<IntVec> {
    vs.iter()
        .map(|v| v.iter().map(|&x| Int::from(x)).collect())
        .collect()
}

pub fn load(path: &Path) -> Result<Spec, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("{}: {e}", path.display()))?;
    let file: ConeSpecFile = serde_json::from_str(&text)
        .map_err(|e| format!("{}: {e}", path.display()))?;
    let ctx = |field: &str, msg: String| format!("{}: {field}: {msg}", path.display());
    match (&file.rays, &file.polytope_vertices) {
        (Some(_), Some(_)) => {
            return Err(ctx("rays", "exactly one of rays / polytope_vertices allowed".into()))
        }
        (None, None) => {
            return Err(ctx("rays", "one of rays / polytope_vertices required".into()))
        }
        _ => {}
    }
    let check_vectors = |vs: &[Vec<i64>], field: &str| -> Result<(), String> {
        if vs.is_empty() {
            return Err(ctx(field, "must be nonempty".into()));
        }
        for (i, v) in vs.iter().enumerate() {
            if v.len() != file.dim {
                return Err(ctx(
                    field,
                    format!("entry {i} has length {}, expected dim = {}", v.len(), file.dim),
                ));
            }
        }
        Ok(())
    };
    let kind = if let Some(rays) = &file.rays {
        check_vectors(rays, "rays")?;
        if let Some(xi) = &file.xi {
            if xi.len() != file.dim {
                return Err(ctx("xi", format!("length {}, expected {}", xi.len(), file.dim)));
            }
        }
        SpecKind::Cone {
            rays: to_intvecs(rays),
            xi: file
                .xi
                .as_ref()
                .map(|v| v.iter().map(|&x| Int::from(x)).collect()),
        }
    } else {
        let verts = file.polytope_vertices.as_ref().unwrap();
        check_vectors(verts, "polytope_vertices")?;
        if file.xi.is_some() {
            return Err(ctx("xi", "not meaningful for polytope files".into()));
        }
        SpecKind::Polytope {
            vertices: to_intvecs(verts),
        }
    };
    Ok(Spec {
        name: file.name,
        dim: file.dim,
        kind,
    })
}
