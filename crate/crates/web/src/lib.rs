//! Browser bindings for the interactive demo page in `www/`.
//!
//! Each export takes plain numbers and returns a JSON string; the
//! `*_json` functions hold the logic so they can be tested natively.

use jmsteer::inequalities::closed_form_threshold;
use jmsteer::{
    busch_pair_criterion, jm_feasibility, memory_bound_report, projective_from_observable,
    unsharp_qubit_povm, werner_state, Matrix, Scenario, SolverOptions, UnsharpQubitSpec,
};
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Serialize)]
struct Curve {
    eta: Vec<f64>,
    lhs_sum: Vec<f64>,
    key_rate: Vec<f64>,
    steering_bound: f64,
    compatibility_threshold: f64,
    violation_threshold: f64,
}

#[derive(Serialize)]
struct JmCheck {
    busch_compatible: bool,
    solver: &'static str,
    residual: f64,
    iterations: usize,
}

fn scenario(eta: f64, w: f64) -> jmsteer::Result<Scenario> {
    Scenario::new(
        werner_state(w)?,
        projective_from_observable(&Matrix::pauli_x())?,
        projective_from_observable(&Matrix::pauli_z())?,
        unsharp_qubit_povm(&UnsharpQubitSpec::x(eta)?),
        unsharp_qubit_povm(&UnsharpQubitSpec::z(eta)?),
    )
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("plain data serializes")
}

/// Game entropy and key-rate bound along `steps` evenly spaced η in [0, 1]
/// for a Werner state of weight `w`.
pub fn game_curve_json(steps: usize, w: f64) -> Result<String, String> {
    if steps < 2 {
        return Err(format!("need at least 2 steps, got {steps}"));
    }
    let mut curve = Curve {
        eta: Vec::with_capacity(steps),
        lhs_sum: Vec::with_capacity(steps),
        key_rate: Vec::with_capacity(steps),
        steering_bound: 1.0,
        compatibility_threshold: std::f64::consts::FRAC_1_SQRT_2,
        violation_threshold: closed_form_threshold(1.0).map_err(|e| e.to_string())?,
    };
    for i in 0..steps {
        let eta = i as f64 / (steps - 1) as f64;
        let report = memory_bound_report(&scenario(eta, w).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?
            .rounded();
        curve.eta.push(eta);
        curve.lhs_sum.push(report.lhs_sum);
        curve.key_rate.push(report.key_rate_lower_bound);
    }
    Ok(to_json(&curve))
}

/// Full uncertainty report for Bob's η-unsharp X/Z on a Werner state.
pub fn evaluate_json(eta: f64, w: f64) -> Result<String, String> {
    let s = scenario(eta, w).map_err(|e| e.to_string())?;
    let report = memory_bound_report(&s).map_err(|e| e.to_string())?;
    Ok(to_json(&report.rounded()))
}

/// Analytic and numerical joint-measurability verdicts for two unsharp
/// qubit observables in the x–z plane, `angle_deg` apart.
pub fn jm_check_json(eta_a: f64, eta_b: f64, angle_deg: f64) -> Result<String, String> {
    let t = angle_deg.to_radians();
    let a = UnsharpQubitSpec::new([1.0, 0.0, 0.0], eta_a).map_err(|e| e.to_string())?;
    let b = UnsharpQubitSpec::new([t.cos(), 0.0, t.sin()], eta_b).map_err(|e| e.to_string())?;
    let verdict = jm_feasibility(&[unsharp_qubit_povm(&a), unsharp_qubit_povm(&b)], &SolverOptions::default())
        .map_err(|e| e.to_string())?;
    Ok(to_json(&JmCheck {
        busch_compatible: busch_pair_criterion(&a, &b),
        solver: verdict.status.as_str(),
        residual: jmsteer::format::tidy(verdict.residual),
        iterations: verdict.iterations,
    }))
}

#[wasm_bindgen]
pub fn game_curve(steps: usize, w: f64) -> Result<String, JsValue> {
    game_curve_json(steps, w).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn evaluate(eta: f64, w: f64) -> Result<String, JsValue> {
    evaluate_json(eta, w).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn jm_check(eta_a: f64, eta_b: f64, angle_deg: f64) -> Result<String, JsValue> {
    jm_check_json(eta_a, eta_b, angle_deg).map_err(|e| JsValue::from_str(&e))
}
