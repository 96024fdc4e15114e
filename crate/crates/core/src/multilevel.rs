//! Genuine multi-level entanglement of two ququarts.
//!
//! A two-ququart pure state with Schmidt coefficients `s₀ ≥ s₁ ≥ s₂ ≥ s₃` is
//! decomposable into two entangled qubit pairs exactly when `s₀s₃ - s₁s₂ = 0`.
//! For a maximally correlated state the Schmidt coefficients are the moduli of the
//! coherent amplitudes, which gives the amplitude-level test in [`observation1`].

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{check_normalized, regroup_vector, singular_values, ComplexMatrix, C64};
use crate::measures::Bipartition;
use crate::states::CoherentAmplitudes;

/// Determinant tolerance for the decomposability verdict.
pub const DET_TOL: f64 = 1e-9;
/// Schmidt coefficients below this do not count towards the rank.
pub const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecomposabilityVerdict {
    pub decomposable: bool,
    /// `s₀s₃ - s₁s₂`
    pub det_s: f64,
    /// Sorted descending.
    pub schmidt_coeffs: Vec<f64>,
    pub criterion_residual: f64,
}

fn sorted_desc(mut v: Vec<f64>) -> Vec<f64> {
    // stable, so ties keep their input order
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

fn verdict_from(coeffs: Vec<f64>) -> DecomposabilityVerdict {
    let s = sorted_desc(coeffs);
    let det_s = s[0] * s[3] - s[1] * s[2];
    DecomposabilityVerdict {
        decomposable: det_s.abs() <= DET_TOL,
        det_s,
        schmidt_coeffs: s,
        criterion_residual: det_s.abs(),
    }
}

/// Schmidt-matrix determinant test on a normalized `[4, 4]` state vector.
pub fn kraft_decomposable(psi: &[C64]) -> Result<DecomposabilityVerdict> {
    if psi.len() != 16 {
        return Err(Error::dim(format!("two-ququart test needs 16 amplitudes, got {}", psi.len())));
    }
    check_normalized(psi)?;
    let m = ComplexMatrix::from_row_major(4, 4, psi.to_vec())?;
    Ok(verdict_from(singular_values(&m)))
}

/// Amplitude-level test `|α₀α₃| = |α₁α₂|` after sorting the moduli.
pub fn observation1(a: &CoherentAmplitudes) -> Result<DecomposabilityVerdict> {
    if a.dim() != 4 {
        return Err(Error::dim(format!("the amplitude test needs four levels, got {}", a.dim())));
    }
    Ok(verdict_from(a.moduli()))
}

/// Whether four amplitudes, read as `|ij⟩` over two qubits, form a product state.
pub fn is_product_amplitudes(a: &CoherentAmplitudes) -> bool {
    let x = a.as_slice();
    (x[0] * x[3] - x[1] * x[2]).norm() <= DET_TOL
}

/// `α|+⟩|0⟩ + β|−⟩|1⟩` as four amplitudes `(α, β, α, -β)/√2`.
pub fn plus_minus_family(alpha: f64) -> Result<CoherentAmplitudes> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Domain(format!("alpha = {alpha} outside [0, 1]")));
    }
    let beta = (1.0 - alpha * alpha).sqrt();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CoherentAmplitudes::from_real(&[alpha * s, beta * s, alpha * s, -beta * s])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutStatus {
    /// Schmidt rank 1, nothing to decompose.
    Product,
    Decomposable,
    Genuine,
    /// Schmidt rank other than 1 or 4.
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutVerdict {
    pub cut: String,
    pub schmidt_rank: usize,
    pub status: CutStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<DecomposabilityVerdict>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultilevelReport {
    pub dims: Vec<usize>,
    pub cuts: Vec<CutVerdict>,
    /// At least one cut admits the test and none of those is decomposable.
    pub genuine_multipartite_multilevel: bool,
}

fn cut_verdict(psi: &[C64], dims: &[usize], cut: &Bipartition) -> Result<CutVerdict> {
    let (v, dl, dr) = regroup_vector(psi, dims, cut.left());
    let s: Vec<f64> = singular_values(&ComplexMatrix::from_row_major(dl, dr, v)?);
    let rank = s.iter().filter(|&&x| x > RANK_TOL).count();
    let (status, verdict) = match rank {
        1 => (CutStatus::Product, None),
        4 => {
            let v = verdict_from(s[..4].to_vec());
            let st = if v.decomposable { CutStatus::Decomposable } else { CutStatus::Genuine };
            (st, Some(v))
        }
        _ => (CutStatus::NotApplicable, None),
    };
    Ok(CutVerdict { cut: cut.to_string(), schmidt_rank: rank, status, verdict })
}

/// Per-cut verdicts for an `N`-party pure state.
pub fn multilevel_report(psi: &[C64], dims: &[usize]) -> Result<MultilevelReport> {
    if dims.len() < 2 || dims.iter().product::<usize>() != psi.len() {
        return Err(Error::dim(format!(
            "dims {dims:?} do not describe {} amplitudes over two or more parties",
            psi.len()
        )));
    }
    check_normalized(psi)?;
    let cuts =
        Bipartition::all(dims.len()).par_iter().map(|c| cut_verdict(psi, dims, c)).collect::<Result<Vec<_>>>()?;
    let applicable: Vec<&CutVerdict> =
        cuts.iter().filter(|c| matches!(c.status, CutStatus::Decomposable | CutStatus::Genuine)).collect();
    let genuine = !applicable.is_empty() && applicable.iter().all(|c| c.status == CutStatus::Genuine);
    Ok(MultilevelReport { dims: dims.to_vec(), cuts, genuine_multipartite_multilevel: genuine })
}
