//! Browser bindings. The logic lives in plain functions so it can be tested
//! natively; the `#[wasm_bindgen]` wrappers only convert errors.

use wasm_bindgen::prelude::*;

use genlr::harness::{run_experiment, EtaSource, ExperimentSpec, GenSpec, OptimizerSpec, ProblemSpec};
use genlr::newton::{exact_eta_hvp, fit_quadratic, probe_losses, HvpSource, ProbePoints};
use genlr::{BatchSelector, ParamVector};

/// Values per trajectory point: x, y, loss, eta.
pub const TRAJECTORY_STRIDE: usize = 4;

fn problem(name: &str) -> Result<ProblemSpec, String> {
    match name {
        "rosenbrock" => Ok(ProblemSpec::Rosenbrock),
        "beale" => Ok(ProblemSpec::Beale),
        other => Err(format!("unknown problem `{other}`")),
    }
}

fn optimizer(name: &str, lr: f64) -> Result<OptimizerSpec, String> {
    match name {
        "sgd" => Ok(OptimizerSpec::sgd(lr)),
        "adamw" => Ok(OptimizerSpec::adamw(lr)),
        other => Err(format!("unknown optimizer `{other}`")),
    }
}

fn gen_spec(mode: &str) -> Result<Option<GenSpec>, String> {
    match mode {
        "off" => Ok(None),
        "probes" => Ok(Some(GenSpec::default())),
        "exact" => Ok(Some(GenSpec {
            gamma: 0.0,
            phi: 1,
            clamp_factor: f64::INFINITY,
            eta_source: EtaSource::ExactHvp,
            ..GenSpec::default()
        })),
        other => Err(format!("unknown GeN mode `{other}`, expected off, probes or exact")),
    }
}

/// Runs one optimizer from `(x, y)` and returns the flattened iterates
/// `[x, y, loss, eta]`, starting with `w_0` (whose `eta` is the initial rate).
pub fn trajectory(
    problem_name: &str,
    optimizer_name: &str,
    gen_mode: &str,
    lr: f64,
    iterations: usize,
    x: f64,
    y: f64,
) -> Result<Vec<f64>, String> {
    let mut spec = ExperimentSpec::new("web", problem(problem_name)?, optimizer(optimizer_name, lr)?, iterations)
        .with_start(&[x, y]);
    spec.gen = gen_spec(gen_mode)?;
    let result = run_experiment(&spec).map_err(|e| e.to_string())?;
    let obj = spec.problem.build().map_err(|e| e.to_string())?;
    let l0 = obj.loss(&result.iterates[0], &BatchSelector::FullData).map_err(|e| e.to_string())?;

    let mut out = Vec::with_capacity(result.iterates.len() * TRAJECTORY_STRIDE);
    out.extend([x, y, l0, lr]);
    for (w, rec) in result.iterates.iter().skip(1).zip(&result.records) {
        out.extend([w[0], w[1], rec.loss, rec.eta]);
    }
    Ok(out)
}

/// Three-point probe fit at `(x, y)` along the negative gradient:
/// `[eta_prev, L(w + ηg), L(w), L(w - ηg), a_star, b_star, r2, eta_candidate, eta_exact]`.
/// Candidates that do not exist are NaN.
pub fn probe_fit(problem_name: &str, x: f64, y: f64, eta_prev: f64) -> Result<Vec<f64>, String> {
    let obj = problem(problem_name)?.build().map_err(|e| e.to_string())?;
    let w = ParamVector::from_slice(&[x, y]).map_err(|e| e.to_string())?;
    let batch = BatchSelector::FullData;
    let (l0, g) = obj.loss_and_grad(&w, &batch).map_err(|e| e.to_string())?;
    let probes =
        probe_losses(obj.as_ref(), &w, &g, eta_prev, &batch, ProbePoints::Three, l0).map_err(|e| e.to_string())?;
    let fit = fit_quadratic(&probes).map_err(|e| e.to_string())?;
    let exact = exact_eta_hvp(obj.as_ref(), &w, &g, &g, &batch, HvpSource::Exact).unwrap_or(f64::NAN);
    Ok(vec![
        eta_prev,
        probes[0].loss,
        probes[1].loss,
        probes[2].loss,
        fit.a_star,
        fit.b_star,
        fit.r2,
        fit.eta_candidate.unwrap_or(f64::NAN),
        exact,
    ])
}

/// `log10(1 + L)` on an `nx × ny` grid, row-major from `y_max` down, for a heatmap.
pub fn loss_grid(
    problem_name: &str,
    x_range: (f64, f64),
    y_range: (f64, f64),
    nx: usize,
    ny: usize,
) -> Result<Vec<f64>, String> {
    if nx < 2 || ny < 2 {
        return Err("grid needs at least 2 × 2 cells".into());
    }
    let obj = problem(problem_name)?.build().map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        let y = y_range.1 - (y_range.1 - y_range.0) * j as f64 / (ny - 1) as f64;
        for i in 0..nx {
            let x = x_range.0 + (x_range.1 - x_range.0) * i as f64 / (nx - 1) as f64;
            let w = ParamVector::from_slice(&[x, y]).map_err(|e| e.to_string())?;
            let l = obj.loss(&w, &BatchSelector::FullData).unwrap_or(f64::INFINITY);
            out.push((1.0 + l).log10());
        }
    }
    Ok(out)
}

#[wasm_bindgen(js_name = runTrajectory)]
#[allow(clippy::too_many_arguments)]
pub fn run_trajectory(
    problem_name: &str,
    optimizer_name: &str,
    gen_mode: &str,
    lr: f64,
    iterations: usize,
    x: f64,
    y: f64,
) -> Result<Vec<f64>, JsValue> {
    trajectory(problem_name, optimizer_name, gen_mode, lr, iterations, x, y).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = probeFit)]
pub fn probe_fit_js(problem_name: &str, x: f64, y: f64, eta_prev: f64) -> Result<Vec<f64>, JsValue> {
    probe_fit(problem_name, x, y, eta_prev).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = lossGrid)]
pub fn loss_grid_js(
    problem_name: &str,
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
    nx: usize,
    ny: usize,
) -> Result<Vec<f64>, JsValue> {
    loss_grid(problem_name, (x_min, x_max), (y_min, y_max), nx, ny).map_err(|e| JsValue::from_str(&e))
}
