//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Every export takes and returns JSON strings: words use the library's word
//! file format and coins the coin file format. Errors come back as a thrown
//! string.

use std::f64::consts::TAU;

use cmv_spectra::cmv::VerblunskyWord;
use cmv_spectra::spectral::Spectrum;
use cmv_spectra::transfer::{discriminant, lyapunov, SpectralParameter};
use cmv_spectra::walk::{rage_diagnostics, step, CoinSequence, Spin, WalkState};
use serde_json::json;
use wasm_bindgen::prelude::*;

fn word(text: &str) -> Result<VerblunskyWord, String> {
    VerblunskyWord::from_json(text).map_err(|e| e.to_string())
}

/// Bands, gaps and a DOS profile on `n` grid points.
pub fn bands_dos(word_json: &str, n: usize) -> Result<String, String> {
    let w = word(word_json)?;
    let s = Spectrum::from_word(&w).map_err(|e| e.to_string())?;
    let p = s.dos_profile(n.clamp(16, 1 << 14));
    let b = s.bands();
    Ok(json!({
        "q": s.q(),
        "measure": b.measure(),
        "bands": b.bands.iter().map(|a| [a.left, a.right]).collect::<Vec<_>>(),
        "gaps": b.gaps.iter().map(|a| [a.left, a.right]).collect::<Vec<_>>(),
        "tau": p.tau_grid,
        "density": p.density,
        "cdf": p.cdf,
        "lower_bound": p.lower_bound,
    })
    .to_string())
}

/// Discriminant and Lyapunov exponent at `n` points of the circle.
pub fn lyapunov_scan(word_json: &str, n: usize) -> Result<String, String> {
    let w = word(word_json)?;
    let n = n.clamp(16, 1 << 14);
    let (mut tau, mut disc, mut lyap) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    for i in 0..n {
        let t = TAU * i as f64 / n as f64;
        let z = SpectralParameter::on_circle(t);
        tau.push(t);
        disc.push(discriminant(&w, z).map_err(|e| e.to_string())?.re);
        lyap.push(lyapunov(&w, z).map_err(|e| e.to_string())?);
    }
    Ok(json!({ "tau": tau, "discriminant": disc, "lyapunov": lyap }).to_string())
}

/// Site probabilities after `steps` steps from `delta_0^+`, plus the
/// survival and Cesaro series for the window `|m| <= j`.
pub fn walk_evolution(coins_json: &str, steps: usize, j: i64) -> Result<String, String> {
    let coins = CoinSequence::from_json(coins_json).map_err(|e| e.to_string())?;
    let steps = steps.clamp(1, 4096);
    let psi0 = WalkState::basis(0, Spin::Up);
    let mut psi = psi0.clone();
    for _ in 0..steps {
        psi = step(&psi, &coins);
    }
    let positions: Vec<i64> = (psi.lo()..=psi.hi()).collect();
    let probability: Vec<f64> = positions.iter().map(|&m| psi.site_probability(m)).collect();
    let report = rage_diagnostics(&coins, &psi0, j.max(0), steps);
    let survival: Vec<f64> = (0..=steps as i64).map(|n| report.survival_at(n)).collect();
    Ok(json!({
        "positions": positions,
        "probability": probability,
        "norm": psi.norm(),
        "survival": survival,
        "cesaro": report.cesaro,
        "wiener": report.wiener,
    })
    .to_string())
}

#[wasm_bindgen(js_name = bandsDos)]
pub fn bands_dos_js(word_json: &str, n: usize) -> Result<String, JsValue> {
    bands_dos(word_json, n).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = lyapunovScan)]
pub fn lyapunov_scan_js(word_json: &str, n: usize) -> Result<String, JsValue> {
    lyapunov_scan(word_json, n).map_err(|e| JsValue::from_str(&e))
}

/// `j` is unsigned here so JS passes a plain number rather than a BigInt.
#[wasm_bindgen(js_name = walkEvolution)]
pub fn walk_evolution_js(coins_json: &str, steps: usize, j: u32) -> Result<String, JsValue> {
    walk_evolution(coins_json, steps, j.into()).map_err(|e| JsValue::from_str(&e))
}
