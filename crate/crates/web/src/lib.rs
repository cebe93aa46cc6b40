//! WebAssembly bindings for the demo page in `www/`.
//!
//! Every exported function takes the coefficients as a flat
//! `[Re α, Im α, ...]` array in descending-`k` order and returns JSON. The
//! `*_json` functions hold the logic and are what the native tests call.

use serde::Serialize;
use superspin::radial::{assemble, build_sector, match_level, solve_bound, RadialGrid, SolveOptions};
use superspin::{mu_from_alphas, mu_squared_diagonal, InteractionSpec, C64};
use wasm_bindgen::prelude::*;

/// Points kept per channel when a wavefunction is sent to the page.
const PLOT_POINTS: usize = 400;

fn spec_from(two_s: i32, alphas: &[f64]) -> Result<InteractionSpec, String> {
    if two_s < 0 {
        return Err(format!("two_s must be non-negative, got {two_s}"));
    }
    let dim = two_s as usize + 1;
    if alphas.len() != 2 * dim {
        return Err(format!("expected {} numbers (re, im per coefficient), got {}", 2 * dim, alphas.len()));
    }
    let values = alphas.chunks(2).map(|c| C64::new(c[0], c[1])).collect();
    InteractionSpec::new(two_s, values).map_err(|e| e.to_string())
}

fn labels(two_s: i32) -> Vec<i32> {
    (0..=two_s).map(|i| two_s - 2 * i).collect()
}

#[derive(Serialize)]
struct MuTable {
    two_k: Vec<i32>,
    /// Row-major `[re, im]` pairs.
    entries: Vec<Vec<[f64; 2]>>,
    mu_squared_diagonal: Vec<f64>,
}

pub fn mu_table_json(two_s: i32, alphas: &[f64], phi: f64) -> Result<String, String> {
    let spec = spec_from(two_s, alphas)?;
    let mu = mu_from_alphas(&spec, phi).map_err(|e| e.to_string())?;
    let dim = spec.dim();
    let entries = (0..dim)
        .map(|r| (0..dim).map(|c| [mu.m[(r, c)].re, mu.m[(r, c)].im]).collect())
        .collect();
    let table = MuTable {
        two_k: labels(two_s),
        entries,
        mu_squared_diagonal: mu_squared_diagonal(&spec),
    };
    Ok(serde_json::to_string(&table).expect("plain data"))
}

#[derive(Serialize)]
struct Level {
    energy: f64,
    pair_two_k: i32,
    predicted: Option<f64>,
    two_j: Option<i32>,
    rel_err: Option<f64>,
}

pub fn spectrum_json(
    two_s: i32,
    alphas: &[f64],
    mass: f64,
    two_jz: i32,
    r_max: f64,
    n_points: usize,
) -> Result<String, String> {
    let spec = spec_from(two_s, alphas)?;
    let states = solve(&spec, mass, two_jz, r_max, n_points)?.1;
    let levels: Vec<Level> = states
        .iter()
        .map(|st| {
            let m = match_level(&spec, mass, two_jz, st.energy, Some(st.pair_two_k));
            Level {
                energy: st.energy,
                pair_two_k: st.pair_two_k,
                predicted: m.map(|m| m.predicted),
                two_j: m.map(|m| m.two_j),
                rel_err: m.map(|m| m.rel_err),
            }
        })
        .collect();
    Ok(serde_json::to_string(&levels).expect("plain data"))
}

type Solved = (
    superspin::radial::Sector,
    Vec<superspin::radial::BoundState>,
    RadialGrid,
);

fn solve(spec: &InteractionSpec, mass: f64, two_jz: i32, r_max: f64, n_points: usize) -> Result<Solved, String> {
    if !(mass > 0.0) {
        return Err(format!("mass must be positive, got {mass}"));
    }
    let grid = RadialGrid::new(r_max, n_points).map_err(|e| e.to_string())?;
    let sector = build_sector(spec, two_jz, mass).map_err(|e| e.to_string())?;
    let ham = assemble(&sector, spec, &grid).map_err(|e| e.to_string())?;
    let spectrum = solve_bound(&ham, &SolveOptions::default()).map_err(|e| e.to_string())?;
    Ok((sector, spectrum.states, grid))
}

#[derive(Serialize)]
struct ChannelTrace {
    two_k: i32,
    ell: i32,
    /// `|u(r)|²`; `u = √r ψ` is normalized to one over all channels.
    density: Vec<f64>,
}

#[derive(Serialize)]
struct Wavefunction {
    energy: f64,
    r: Vec<f64>,
    channels: Vec<ChannelTrace>,
}

pub fn wavefunction_json(
    two_s: i32,
    alphas: &[f64],
    mass: f64,
    two_jz: i32,
    level: usize,
    r_max: f64,
    n_points: usize,
) -> Result<String, String> {
    let spec = spec_from(two_s, alphas)?;
    let (sector, states, grid) = solve(&spec, mass, two_jz, r_max, n_points)?;
    let state = states
        .get(level)
        .ok_or_else(|| format!("sector has {} bound levels, asked for index {level}", states.len()))?;
    let stride = n_points.div_ceil(PLOT_POINTS).max(1);
    let picks: Vec<usize> = (0..n_points).step_by(stride).collect();
    let wf = Wavefunction {
        energy: state.energy,
        r: picks.iter().map(|&i| grid.node(i)).collect(),
        channels: sector
            .channels
            .iter()
            .zip(&state.channels)
            .map(|(c, u)| ChannelTrace {
                two_k: c.two_k,
                ell: c.ell,
                density: picks.iter().map(|&i| u[i].norm_sqr()).collect(),
            })
            .collect(),
    };
    Ok(serde_json::to_string(&wf).expect("plain data"))
}

fn js(r: Result<String, String>) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e))
}

/// μ(φ) and the diagonal of μ² as JSON.
#[wasm_bindgen]
pub fn mu_table(two_s: i32, alphas: Vec<f64>, phi: f64) -> Result<String, JsError> {
    js(mu_table_json(two_s, &alphas, phi))
}

/// Bound levels of one `J_z` sector with their closed-form matches.
#[wasm_bindgen]
pub fn spectrum(two_s: i32, alphas: Vec<f64>, mass: f64, two_jz: i32, r_max: f64, n_points: usize) -> Result<String, JsError> {
    js(spectrum_json(two_s, &alphas, mass, two_jz, r_max, n_points))
}

/// Channel densities of one bound level, thinned for plotting.
#[wasm_bindgen]
pub fn wavefunction(
    two_s: i32,
    alphas: Vec<f64>,
    mass: f64,
    two_jz: i32,
    level: usize,
    r_max: f64,
    n_points: usize,
) -> Result<String, JsError> {
    js(wavefunction_json(two_s, &alphas, mass, two_jz, level, r_max, n_points))
}
