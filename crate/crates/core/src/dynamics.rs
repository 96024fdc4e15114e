//! Depolarizing dynamics of the qubit coherences and the three-qubit indicators.
//!
//! The qubit `α|0⟩ + β|1⟩` and the register state `α|000⟩ + β|111⟩` both pass
//! through `E(ρ) = pI/d + (1-p)ρ` on their whole space (`d = 2` and `d = 8`). Closed
//! forms:
//!
//! - `C_d = h(x₁) - h(p/2)`, `x₁ = (1-p)α² + p/2`
//! - `C_f = h[(1 + sqrt(1 - x₂²))/2]`, `x₂ = 2(1-p)αβ`
//! - `τ_MED^UB = log₂(1 + ζ/4)`, `ζ = max[0, 8(1-p)|αβ| - p]`
//! - `τ_MEF^LB = h[(√ω + √(2-ω))²/4]`, `ω = ‖(ρ_{A|BC})^{T_A}‖₁`
//!
//! The indicators vanish for `p ≥ 8αβ/(1 + 8αβ)`.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::depolarize;
use crate::error::{Error, Result};
use crate::io::format_sig;
use crate::matcore::{h, h_of_sqrt_form, partial_transpose, trace_norm, C64};
use crate::measures::{c_d, c_f, tau_med_ub, tau_mef_lb};
use crate::states::{mcs_from_amplitudes, CoherentAmplitudes, DensityMatrix};

/// Threshold on `τ_MED^UB` below which a point counts as past sudden death.
pub const ESD_TOL: f64 = 1e-12;
/// Significant digits in the CSV output.
pub const CSV_DIGITS: usize = 12;

pub const CSV_HEADER: [&str; 7] = ["alpha", "p", "c_d", "c_f", "tau_med_ub", "tau_mef_lb", "esd"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DynamicsPoint {
    pub alpha: f64,
    pub p: f64,
    pub x1: f64,
    pub x2: f64,
    pub zeta: f64,
    pub omega: f64,
    pub c_d: f64,
    pub c_f: f64,
    pub tau_med_ub: f64,
    pub tau_mef_lb: f64,
    /// The same four quantities through depolarize + measures.
    pub c_d_num: f64,
    pub c_f_num: f64,
    pub tau_med_ub_num: f64,
    pub tau_mef_lb_num: f64,
    pub esd: bool,
}

impl DynamicsPoint {
    /// Largest closed-form versus pipeline discrepancy.
    pub fn max_discrepancy(&self) -> f64 {
        [
            self.c_d - self.c_d_num,
            self.c_f - self.c_f_num,
            self.tau_med_ub - self.tau_med_ub_num,
            self.tau_mef_lb - self.tau_mef_lb_num,
        ]
        .iter()
        .fold(0.0, |m, x| m.max(x.abs()))
    }
}

fn check_unit(name: &str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("{name} = {x} outside [0, 1]")));
    }
    Ok(())
}

fn beta(alpha: f64) -> f64 {
    (1.0 - alpha * alpha).max(0.0).sqrt()
}

fn noisy_states(alpha: f64, p: f64) -> Result<(DensityMatrix, DensityMatrix)> {
    let b = beta(alpha);
    let qubit = DensityMatrix::from_pure(&[C64::new(alpha, 0.0), C64::new(b, 0.0)], &[2])?;
    let amps = CoherentAmplitudes::from_real(&[alpha, b])?;
    let register = mcs_from_amplitudes(&amps, 3)?;
    Ok((depolarize(&qubit, p)?, depolarize(&register, p)?))
}

/// Closed forms at `(α, p)` with their numerical cross-checks.
pub fn point(alpha: f64, p: f64) -> Result<DynamicsPoint> {
    check_unit("alpha", alpha)?;
    check_unit("p", p)?;
    let b = beta(alpha);
    let x1 = (1.0 - p) * alpha * alpha + p / 2.0;
    let x2 = 2.0 * (1.0 - p) * alpha * b;
    let zeta = (8.0 * (1.0 - p) * (alpha * b).abs() - p).max(0.0);

    let (rho_a, rho_abc) = noisy_states(alpha, p)?;
    let omega = trace_norm(&partial_transpose(rho_abc.matrix(), rho_abc.dims(), 0)?)?;
    let c_d_closed = (h(x1) - h(p / 2.0)).max(0.0);
    let c_f_closed = h_of_sqrt_form(x2);
    let tau_med = (1.0 + zeta / 4.0).log2();
    // (√ω + √(2-ω))²/4 = (1 + sqrt(1 - (ω-1)²))/2
    let tau_mef = h_of_sqrt_form(omega.clamp(1.0, 2.0) - 1.0);

    Ok(DynamicsPoint {
        alpha,
        p,
        x1,
        x2,
        zeta,
        omega,
        c_d: c_d_closed,
        c_f: c_f_closed,
        tau_med_ub: tau_med,
        tau_mef_lb: tau_mef,
        c_d_num: c_d(&rho_a).value,
        c_f_num: c_f(&rho_a).value,
        tau_med_ub_num: tau_med_ub(&rho_abc)?.value,
        tau_mef_lb_num: tau_mef_lb(&rho_abc)?.value,
        esd: tau_med <= ESD_TOL,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EsdLine {
    pub alpha: f64,
    /// `8αβ/(1 + 8αβ)`
    pub formula: f64,
    /// Root of `8(1-p)αβ - p` on `[0, 1]` found by bisection.
    pub bisection: f64,
}

/// Noise strength at which the indicators hit zero.
pub fn esd_probability(alpha: f64) -> Result<EsdLine> {
    check_unit("alpha", alpha)?;
    let k = 8.0 * alpha * beta(alpha);
    let zeta = |p: f64| k * (1.0 - p) - p;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    if zeta(0.0) <= 0.0 {
        hi = 0.0;
    }
    while hi - lo > 1e-15 {
        let mid = 0.5 * (lo + hi);
        if zeta(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if mid == lo && mid == hi {
            break;
        }
    }
    Ok(EsdLine { alpha, formula: k / (1.0 + k), bisection: 0.5 * (lo + hi) })
}

/// `steps` evenly spaced values over `[0, 1]`, endpoints included.
pub fn unit_grid(steps: usize) -> Result<Vec<f64>> {
    if steps < 2 {
        return Err(Error::Config(format!("a grid needs at least 2 steps, got {steps}")));
    }
    Ok((0..steps).map(|i| i as f64 / (steps - 1) as f64).collect())
}

/// Every `(α, p)` pair in lexicographic order, evaluated in parallel.
pub fn sweep(alpha_grid: &[f64], p_grid: &[f64]) -> Result<Vec<DynamicsPoint>> {
    if alpha_grid.is_empty() || p_grid.is_empty() {
        return Err(Error::Config("empty dynamics grid".into()));
    }
    if let Some(x) = alpha_grid.iter().chain(p_grid).find(|x| !(0.0..=1.0).contains(*x)) {
        return Err(Error::Config(format!("grid value {x} outside [0, 1]")));
    }
    let np = p_grid.len();
    (0..alpha_grid.len() * np).into_par_iter().map(|k| point(alpha_grid[k / np], p_grid[k % np])).collect()
}

/// CSV with [`CSV_HEADER`] columns and [`CSV_DIGITS`] significant digits.
pub fn write_csv<W: Write>(points: &[DynamicsPoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for pt in points {
        let f = |x: f64| format_sig(x, CSV_DIGITS);
        w.write_record([
            f(pt.alpha),
            f(pt.p),
            f(pt.c_d),
            f(pt.c_f),
            f(pt.tau_med_ub),
            f(pt.tau_mef_lb),
            pt.esd.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
