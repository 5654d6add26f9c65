//! WebAssembly bindings for the static demo page in `www/`. Every export
//! returns a JSON string; the plain functions are callable natively too.

use inaccessible::inaccessibility::chi;
use inaccessible::lattice::{ideal_configuration, Statement, MAX_DOT_DIM};
use inaccessible::mes::{build, in_state_space, is_pure, marginals, q_from_bloch};
use inaccessible::quasiprob::{g_counterexample, g_family_range};
use inaccessible::qubit::{is_positive_semidefinite, q_to_rho};
use inaccessible::{Error, DEFAULT_TOL};
use serde_json::json;
use wasm_bindgen::prelude::*;

fn js_err(e: Error) -> JsValue {
    JsValue::from_str(&e.to_string())
}

/// Frame coefficients, marginals and admissibility of the state with Bloch
/// vector `(x, y, z)`. Points outside the unit ball are allowed; they give
/// states that fail the constraints.
pub fn explore_bloch(x: f64, y: f64, z: f64) -> Result<String, Error> {
    let model = build(2)?;
    let q = q_from_bloch([x, y, z]);
    let rho = q_to_rho(&q)?;
    Ok(json!({
        "q": q,
        "chi": chi(&q)?,
        "marginals": marginals(&model, &q)?,
        "admissible": in_state_space(&model, &q, DEFAULT_TOL)?,
        "pure": is_pure(&model, &q, DEFAULT_TOL)?,
        "positive": is_positive_semidefinite(&rho),
        "radius": (x * x + y * y + z * z).sqrt(),
    })
    .to_string())
}

/// Statements of the `(dim, depth)` lattice grouped by level, with the
/// accessibility labels of its canonical ideal configuration.
pub fn lattice_levels(dim: usize, depth: usize) -> Result<String, Error> {
    if dim > MAX_DOT_DIM {
        return Err(Error::DimensionTooLarge {
            dim,
            max: MAX_DOT_DIM,
        });
    }
    let cfg = ideal_configuration(dim, depth)?;
    let mut levels = vec![Vec::new(); dim + 1];
    for bits in 0..1u64 << dim {
        let s = Statement::new(dim, bits)?;
        levels[s.level()].push(json!({
            "bits": bits,
            "label": s.to_string(),
            "accessible": cfg.is_accessible(s),
        }));
    }
    Ok(json!({
        "D": dim,
        "d": depth,
        "blocks": cfg.level_blocks().iter().map(|b| b.to_string()).collect::<Vec<_>>(),
        "levels": levels,
    })
    .to_string())
}

/// `Q(A ∧ B | C)`, `Q(B | C)` and `Q(A | B ∧ C)` along the one-parameter
/// family, skipping the pole at `x = 1`.
pub fn monotonicity_curve(points: usize) -> Result<String, Error> {
    if points < 2 {
        return Err(Error::InvalidArgument("need at least two points".into()));
    }
    let (lo, hi) = g_family_range();
    let rows: Vec<_> = (0..points)
        .map(|k| lo + (hi - lo) * k as f64 / (points - 1) as f64)
        .filter_map(|x| g_counterexample(x).ok())
        .map(|g| json!([g.x, g.joint_given_c, g.b_given_c, g.a_given_bc]))
        .collect();
    Ok(json!({ "columns": ["x", "joint", "b_given_c", "a_given_bc"], "rows": rows }).to_string())
}

#[wasm_bindgen(js_name = exploreBloch)]
pub fn explore_bloch_js(x: f64, y: f64, z: f64) -> Result<String, JsValue> {
    explore_bloch(x, y, z).map_err(js_err)
}

#[wasm_bindgen(js_name = latticeLevels)]
pub fn lattice_levels_js(dim: usize, depth: usize) -> Result<String, JsValue> {
    lattice_levels(dim, depth).map_err(js_err)
}

#[wasm_bindgen(js_name = monotonicityCurve)]
pub fn monotonicity_curve_js(points: usize) -> Result<String, JsValue> {
    monotonicity_curve(points).map_err(js_err)
}
