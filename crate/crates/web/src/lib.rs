//! Browser bindings: a partial information plot, a backflow trajectory and a
//! small certification run, each returned as a JSON string.
//!
//! The `*_json` functions are plain Rust so they can be tested natively; the
//! `#[wasm_bindgen]` wrappers only translate errors.

use darwinlab::certify::{self, Check};
use darwinlab::darwinism::{self, Quantity, SamplingConfig};
use darwinlab::nonmarkov::{self, AncillaMode, ModelConfig};
use darwinlab::states;
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Keeps the page responsive: everything runs on the main thread.
pub const MAX_WEB_ENV: usize = 10;
pub const MAX_WEB_SAMPLES: usize = 2000;

#[derive(Serialize)]
struct PipView {
    ell: Vec<usize>,
    mean_i: Vec<f64>,
    h_s: f64,
    f_delta: Option<usize>,
    r_delta: f64,
    plateau_found: bool,
}

#[derive(Serialize)]
struct BackflowView {
    t: Vec<usize>,
    trace_distance: Vec<f64>,
    cmi: Vec<f64>,
    blp_total: f64,
    cmi_backflow_total: f64,
}

#[derive(Serialize)]
struct CertifyView {
    check: String,
    samples: usize,
    violations: usize,
    min_margin: Option<f64>,
    margins: Vec<f64>,
}

fn check_env(n: usize) -> Result<(), String> {
    if n == 0 || n > MAX_WEB_ENV {
        return Err(format!("fragments must be in 1..={MAX_WEB_ENV}"));
    }
    Ok(())
}

fn to_json<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

/// `model` is `ghz`, `branching` (uses `overlap`) or `collision` (uses `g`).
pub fn pip_json(model: &str, n_env: usize, delta: f64, overlap: f64, g: f64) -> Result<String, String> {
    check_env(n_env)?;
    let rho = match model {
        "ghz" => states::ghz_state(n_env),
        "branching" => states::overlap_branching_state(n_env, overlap),
        "collision" => {
            let cfg = ModelConfig { n_env, steps: n_env, g, ..Default::default() };
            nonmarkov::run_model(&cfg, &AncillaMode::None).map(|t| t.last().clone())
        }
        other => return Err(format!("unknown model '{other}'")),
    }
    .map_err(|e| e.to_string())?;
    let curve = darwinism::pip_scan(&rho, &darwinism::single_fragments(n_env), Quantity::SymmetricI, &SamplingConfig::default())
        .map_err(|e| e.to_string())?;
    let rep = darwinism::plateau_detect(&curve, delta).map_err(|e| e.to_string())?;
    to_json(&PipView {
        ell: curve.points.iter().map(|p| p.ell).collect(),
        mean_i: curve.points.iter().map(|p| p.mean_i).collect(),
        h_s: curve.h_s,
        f_delta: rep.f_delta_size,
        r_delta: rep.redundancy,
        plateau_found: rep.plateau_found,
    })
}

pub fn backflow_json(n_env: usize, g: f64, steps: usize) -> Result<String, String> {
    check_env(n_env)?;
    let cfg = ModelConfig { n_env, g, steps, ..Default::default() };
    let s = nonmarkov::backflow(&cfg, &AncillaMode::Maxent, None).map_err(|e| e.to_string())?;
    to_json(&BackflowView {
        t: s.times,
        trace_distance: s.trace_distance,
        cmi: s.cmi,
        blp_total: s.blp_total,
        cmi_backflow_total: s.cmi_backflow_total,
    })
}

pub fn certify_json(check: &str, samples: usize, seed: u64) -> Result<String, String> {
    if samples > MAX_WEB_SAMPLES {
        return Err(format!("at most {MAX_WEB_SAMPLES} samples in the browser"));
    }
    let c: Check = check.parse().map_err(|e: darwinlab::Error| e.to_string())?;
    let rows = certify::certify(c, samples, seed).map_err(|e| e.to_string())?;
    let margins: Vec<f64> = rows.iter().map(|r| r.margin).collect();
    to_json(&CertifyView {
        check: c.name().to_string(),
        samples,
        violations: rows.iter().filter(|r| !r.passed).count(),
        min_margin: margins.iter().copied().reduce(f64::min),
        margins,
    })
}

fn js<T>(r: Result<T, String>) -> Result<T, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn pip(model: &str, n_env: usize, delta: f64, overlap: f64, g: f64) -> Result<String, JsValue> {
    js(pip_json(model, n_env, delta, overlap, g))
}

#[wasm_bindgen]
pub fn backflow(n_env: usize, g: f64, steps: usize) -> Result<String, JsValue> {
    js(backflow_json(n_env, g, steps))
}

#[wasm_bindgen]
pub fn certify_run(check: &str, samples: usize, seed: u64) -> Result<String, JsValue> {
    js(certify_json(check, samples, seed))
}
