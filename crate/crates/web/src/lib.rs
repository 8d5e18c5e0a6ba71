//! Browser bindings: feasibility verdicts, rotational profiles with their
//! constant `P` coefficient, and reconstructed meshes of the `Q = 1` family.
//!
//! The `*_impl` functions hold the logic and are what the native tests call;
//! the exported wrappers only convert errors.

use wasm_bindgen::prelude::*;

use homsurf::differentials::{ar_p, feasibility_audit};
use homsurf::families::{gen_example31, gen_example32, Example31Params, Example32Params};
use homsurf::reconstruction::{integrate_surface, Seed};
use homsurf::{AmbientChart, ConformalGrid, SpaceParams};

fn js(e: impl ToString) -> JsValue {
    JsValue::from_str(&e.to_string())
}

pub fn feasibility_impl(kappa: f64, tau: f64) -> Result<String, String> {
    let space = SpaceParams::new(kappa, tau).map_err(|e| e.to_string())?;
    serde_json::to_string(&feasibility_audit(&space)).map_err(|e| e.to_string())
}

/// Verdict for E(kappa, tau) as JSON: `{"tag", "allowed_h_interval", "citation"}`.
#[wasm_bindgen]
pub fn feasibility(kappa: f64, tau: f64) -> Result<String, JsValue> {
    feasibility_impl(kappa, tau).map_err(js)
}

pub fn rotational_profile_impl(kappa: f64, a: f64, b: f64, s0: f64, s1: f64, n: usize) -> Result<Vec<f64>, String> {
    if n < 5 || !(s1 > s0) {
        return Err("need s1 > s0 and at least 5 samples".into());
    }
    let params = Example31Params { kappa, a, b };
    let grid = ConformalGrid::spanning(s0, s1, 0.0, 1.0, n, 5).map_err(|e| e.to_string())?;
    let d = gen_example31(&params, grid).map_err(|e| e.to_string())?;
    let p = ar_p(&d).map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(4 * n);
    for i in 0..n {
        let s = grid.s(i);
        out.extend([s, params.height(s, s0), d.h.re(i, 0), p.coeff.re(i, 0)]);
    }
    Ok(out)
}

/// Rows of `(s, h(s) − h(s0), H, Re P)` flattened, `n` rows.
#[wasm_bindgen]
pub fn rotational_profile(kappa: f64, a: f64, b: f64, s0: f64, s1: f64, n: usize) -> Result<Vec<f64>, JsValue> {
    rotational_profile_impl(kappa, a, b, s0, s1, n).map_err(js)
}

pub fn q_one_mesh_impl(delta: i32, alpha0: f64, alpha_prime0: f64, size: f64, cells: usize) -> Result<Vec<f64>, String> {
    if cells < 4 || cells > 400 || !(size > 0.0) {
        return Err("need 4 to 400 cells and a positive patch size".into());
    }
    let h = size / (2 * cells) as f64;
    let grid = ConformalGrid::new(0.0, 0.0, h, h, 2 * cells + 1, 2 * cells + 1).map_err(|e| e.to_string())?;
    let mut params = Example32Params::new(delta, alpha0, alpha_prime0);
    params.step = params.step.min(h);
    let d = gen_example32(&params, grid).map_err(|e| e.to_string())?;
    let mesh = integrate_surface(&d, &AmbientChart::new(d.space), &Seed::default()).map_err(|e| e.to_string())?;
    Ok(mesh.points.iter().flat_map(|p| [p[0], p[1], p[2]]).collect())
}

/// Vertex coordinates `x, y, z` of a `(cells + 1)²` mesh, row-major in `s`.
#[wasm_bindgen]
pub fn q_one_mesh(delta: i32, alpha0: f64, alpha_prime0: f64, size: f64, cells: usize) -> Result<Vec<f64>, JsValue> {
    q_one_mesh_impl(delta, alpha0, alpha_prime0, size, cells).map_err(js)
}
