//! Shared corpus loading for the integration suites.

use conecount::cones::{make_cone, Cone};
use conecount::ratmath::{Int, IntVec};
use serde_json::Value;
use std::path::PathBuf;

pub struct CorpusCone {
    pub name: String,
    pub cone: Cone,
    pub xi: Option<IntVec>,
}

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

pub fn load_corpus() -> Vec<CorpusCone> {
    let mut out = Vec::new();
    let mut paths: Vec<PathBuf> = std::fs::read_dir(corpus_dir())
        .expect("corpus directory present")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    paths.sort();
    for p in paths {
        let v: Value = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
        let name = v["name"].as_str().unwrap().to_string();
        let rays: Vec<IntVec> = v["rays"]
            .as_array()
            .unwrap()
            .iter()
            .map(|r| {
                r.as_array()
                    .unwrap()
                    .iter()
                    .map(|x| Int::from(x.as_i64().unwrap()))
                    .collect()
            })
            .collect();
        let xi = v.get("xi").and_then(|x| x.as_array()).map(|a| {
            a.iter()
                .map(|x| Int::from(x.as_i64().unwrap()))
                .collect()
        });
        out.push(CorpusCone {
            name,
            cone: make_cone(&rays).unwrap(),
            xi,
        });
    }
    assert!(out.len() >= 8, "corpus ships at least eight cones");
    out
}
