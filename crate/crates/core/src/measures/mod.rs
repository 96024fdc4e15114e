//! Coherence and entanglement quantifiers.
//!
//! Every quantifier returns a [`MeasureResult`] whose `kind` says whether the
//! number is exact, a closed form, or a bound (and in which direction). Composite
//! indicators propagate the bound direction of their ingredients.

mod roof;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use roof::{convex_roof_upper_bound, RoofOptions};

use crate::channels::dephase;
use crate::error::{Error, Result};
use crate::matcore::{
    self, h_of_sqrt_form, hermitian_eig, partial_transpose_parties, regroup_vector, shannon_entropy, singular_values,
    trace_norm, ComplexMatrix, C64,
};
use crate::states::{mcs_amplitude_state, DensityMatrix};

/// Purity deviation below which a state is treated as pure.
pub const PURE_TOL: f64 = 1e-10;
/// Entries outside the correlated subspace above this disqualify the MCS shortcut.
pub const MCS_TOL: f64 = 1e-12;
/// Log-negativity at or below this is a PPT state.
pub const PPT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureKind {
    Exact,
    ClosedForm,
    UpperBound,
    LowerBound,
    HeuristicUpperBound,
}

impl MeasureKind {
    pub fn is_exact(self) -> bool {
        matches!(self, MeasureKind::Exact | MeasureKind::ClosedForm)
    }

    pub fn is_upper(self) -> bool {
        matches!(self, MeasureKind::UpperBound | MeasureKind::HeuristicUpperBound)
    }

    pub fn is_lower(self) -> bool {
        matches!(self, MeasureKind::LowerBound)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            MeasureKind::Exact => "exact",
            MeasureKind::ClosedForm => "closed_form",
            MeasureKind::UpperBound => "upper_bound",
            MeasureKind::LowerBound => "lower_bound",
            MeasureKind::HeuristicUpperBound => "heuristic_upper_bound",
        }
    }
}

impl fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureResult {
    /// Bits.
    pub value: f64,
    pub kind: MeasureKind,
    pub method: String,
}

impl MeasureResult {
    /// Values down to -1e-9 are round-off and snap to zero; anything more negative is
    /// also clamped but the method tag records it.
    pub fn new(value: f64, kind: MeasureKind, method: impl Into<String>) -> Self {
        let mut method = method.into();
        let value = if value < -1e-9 {
            method.push_str("+clamped");
            0.0
        } else {
            value.max(0.0)
        };
        MeasureResult { value, kind, method }
    }

    fn exact(value: f64, method: &str) -> Self {
        Self::new(value, MeasureKind::Exact, method)
    }
}

/// A cut `α|ᾱ` of an `n`-party register. `left` is kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Bipartition {
    left: Vec<usize>,
    n_parties: usize,
}

impl Bipartition {
    pub fn new(left: &[usize], n_parties: usize) -> Result<Self> {
        let mut left = left.to_vec();
        left.sort_unstable();
        left.dedup();
        if left.is_empty() || left.len() >= n_parties || left.iter().any(|&p| p >= n_parties) {
            return Err(Error::dim(format!("{left:?} is not a proper cut of {n_parties} parties")));
        }
        Ok(Bipartition { left, n_parties })
    }

    /// Party `p` against everyone else.
    pub fn single(p: usize, n_parties: usize) -> Result<Self> {
        Self::new(&[p], n_parties)
    }

    pub fn left(&self) -> &[usize] {
        &self.left
    }

    pub fn right(&self) -> Vec<usize> {
        (0..self.n_parties).filter(|p| !self.left.contains(p)).collect()
    }

    pub fn n_parties(&self) -> usize {
        self.n_parties
    }

    /// All `2^(n-1) - 1` cuts, each listed once with party 0 on the left.
    pub fn all(n_parties: usize) -> Vec<Bipartition> {
        if n_parties < 2 {
            return Vec::new();
        }
        (0..(1usize << (n_parties - 1)) - 1)
            .map(|mask| {
                // party 0 always left; remaining parties follow the bits of `mask`
                let left: Vec<usize> =
                    std::iter::once(0).chain((1..n_parties).filter(|p| mask >> (p - 1) & 1 == 1)).collect();
                Bipartition { left, n_parties }
            })
            .collect()
    }

    /// Dimensions `(d_left, d_right)` for local dimensions `dims`.
    pub fn split_dims(&self, dims: &[usize]) -> (usize, usize) {
        let dl = self.left.iter().map(|&p| dims[p]).product();
        let dr = self.right().iter().map(|&p| dims[p]).product();
        (dl, dr)
    }

    fn check(&self, rho: &DensityMatrix) -> Result<()> {
        if self.n_parties != rho.n_parties() {
            return Err(Error::dim(format!(
                "cut over {} parties applied to a {}-party state",
                self.n_parties,
                rho.n_parties()
            )));
        }
        Ok(())
    }
}

fn party_label(p: usize) -> String {
    if p < 26 {
        ((b'A' + p as u8) as char).to_string()
    } else {
        format!("[{p}]")
    }
}

impl fmt::Display for Bipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l: String = self.left.iter().map(|&p| party_label(p)).collect();
        let r: String = self.right().iter().map(|&p| party_label(p)).collect();
        write!(f, "{l}|{r}")
    }
}

/// Parses `A|BC` (letters) or `0|1,2` / `0|12` (indices) against a party count.
pub fn parse_cut(text: &str, n_parties: usize) -> Result<Bipartition> {
    let (l, r) = text.split_once('|').ok_or_else(|| Error::Config(format!("cut `{text}` must look like A|BC")))?;
    let parse_side = |s: &str| -> Result<Vec<usize>> {
        let s = s.trim();
        if s.chars().all(|c| c.is_ascii_alphabetic()) {
            Ok(s.chars().map(|c| (c.to_ascii_uppercase() as u8 - b'A') as usize).collect())
        } else if s.contains(',') {
            s.split(',')
                .map(|t| t.trim().parse::<usize>().map_err(|_| Error::Config(format!("bad party `{t}` in cut"))))
                .collect()
        } else {
            s.chars()
                .map(|c| {
                    c.to_digit(10).map(|x| x as usize).ok_or_else(|| Error::Config(format!("bad party `{c}` in cut")))
                })
                .collect()
        }
    };
    let left = parse_side(l)?;
    let right = parse_side(r)?;
    let mut all: Vec<usize> = left.iter().chain(&right).copied().collect();
    all.sort_unstable();
    if all != (0..n_parties).collect::<Vec<_>>() {
        return Err(Error::Config(format!("cut `{text}` does not partition {n_parties} parties")));
    }
    Bipartition::new(&left, n_parties)
}

impl FromStr for MeasureKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "exact" => MeasureKind::Exact,
            "closed_form" => MeasureKind::ClosedForm,
            "upper_bound" => MeasureKind::UpperBound,
            "lower_bound" => MeasureKind::LowerBound,
            "heuristic_upper_bound" => MeasureKind::HeuristicUpperBound,
            other => return Err(Error::Format(format!("unknown measure kind `{other}`"))),
        })
    }
}

// ---------------------------------------------------------------------------
// pure-state kernels

fn dephased_entropy(psi: &[C64]) -> f64 {
    shannon_entropy(&psi.iter().map(|z| z.norm_sqr()).collect::<Vec<_>>())
}

/// Entanglement entropy of a pure state across `cut`.
pub fn pure_entanglement_entropy(psi: &[C64], dims: &[usize], cut: &Bipartition) -> f64 {
    let (v, dl, dr) = regroup_vector(psi, dims, cut.left());
    let m = ComplexMatrix::from_row_major(dl, dr, v).expect("regrouped vector has dl*dr entries");
    let s = singular_values(&m);
    shannon_entropy(&s.iter().map(|x| x * x).collect::<Vec<_>>())
}

fn pure_vector(rho: &DensityMatrix) -> Option<Vec<C64>> {
    rho.pure_vector(PURE_TOL)
}

// ---------------------------------------------------------------------------
// coherence

/// Distillable coherence `S(Δρ) - S(ρ)`.
pub fn c_d(rho: &DensityMatrix) -> MeasureResult {
    let dephased = dephase(rho, None).expect("all parties are valid");
    MeasureResult::exact(dephased.entropy() - rho.entropy(), "relative_entropy_of_coherence")
}

pub fn c_f(rho: &DensityMatrix) -> MeasureResult {
    c_f_with(rho, &RoofOptions::default())
}

/// Coherence of formation. Exact for pure states, closed form for a qubit,
/// reduced to the amplitude state for maximally correlated inputs, and a
/// heuristic roof bound otherwise.
pub fn c_f_with(rho: &DensityMatrix, opts: &RoofOptions) -> MeasureResult {
    if let Some(psi) = pure_vector(rho) {
        return MeasureResult::exact(dephased_entropy(&psi), "pure_dephased_entropy");
    }
    if rho.dim() == 2 {
        let x = 2.0 * rho.matrix()[(0, 1)].norm();
        return MeasureResult::new(h_of_sqrt_form(x), MeasureKind::ClosedForm, "qubit_closed_form");
    }
    if rho.n_parties() >= 2 {
        if let Ok(amp) = mcs_amplitude_state(rho, MCS_TOL) {
            let mut r = c_f_with(&amp, opts);
            r.method = format!("mcs_reduction:{}", r.method);
            return r;
        }
    }
    let v = convex_roof_upper_bound(rho.matrix(), &dephased_entropy, opts);
    MeasureResult::new(v, MeasureKind::HeuristicUpperBound, "convex_roof_search")
}

// ---------------------------------------------------------------------------
// bipartite entanglement

fn sqrt_psd(m: &ComplexMatrix) -> ComplexMatrix {
    let eig = hermitian_eig(m).expect("square");
    let n = m.rows();
    let mut out = ComplexMatrix::zeros(n, n);
    for (k, &l) in eig.values.iter().enumerate() {
        let s = l.max(0.0).sqrt();
        if s == 0.0 {
            continue;
        }
        let v = eig.vectors.column(k);
        for r in 0..n {
            for c in 0..n {
                out[(r, c)] += v[r] * v[c].conj() * s;
            }
        }
    }
    out
}

/// Wootters concurrence of a two-qubit state.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.dims() != [2, 2] {
        return Err(Error::dim(format!("concurrence needs dims [2, 2], got {:?}", rho.dims())));
    }
    let m = rho.matrix();
    // σ_y ⊗ σ_y has entries ±1 on the anti-diagonal: signs (-1, 1, 1, -1) for rows 0..3
    let sign = [-1.0, 1.0, 1.0, -1.0];
    let flipped = ComplexMatrix::from_fn(4, 4, |r, c| m[(3 - r, 3 - c)].conj() * (sign[r] * sign[c]));
    let root = sqrt_psd(m);
    let inner = root.matmul(&flipped)?.matmul(&root)?;
    let mut lam: Vec<f64> = matcore::hermitian_eigenvalues(&inner)?.into_iter().map(|x| x.max(0.0).sqrt()).collect();
    lam.sort_by(|a, b| b.total_cmp(a));
    Ok((lam[0] - lam[1] - lam[2] - lam[3]).max(0.0))
}

/// `log2 ‖ρ^{T_left}‖₁`.
pub fn log_negativity(rho: &DensityMatrix, cut: &Bipartition) -> Result<f64> {
    cut.check(rho)?;
    Ok(negativity_trace_norm(rho, cut)?.log2().max(0.0))
}

fn negativity_trace_norm(rho: &DensityMatrix, cut: &Bipartition) -> Result<f64> {
    let pt = partial_transpose_parties(rho.matrix(), rho.dims(), cut.left())?;
    trace_norm(&pt)
}

/// Chen-Albeverio-Fei lower bound `h[(1 + sqrt(1 - (Λ-1)²))/2]` with `Λ = ‖ρ^{T_A}‖₁ ∈ [1, 2]`;
/// one side of the cut must be a qubit.
pub fn e_f_lower_bound(rho: &DensityMatrix, cut: &Bipartition) -> Result<f64> {
    cut.check(rho)?;
    let (dl, dr) = cut.split_dims(rho.dims());
    if dl != 2 && dr != 2 {
        return Err(Error::dim(format!("lower bound needs a qubit side, cut {cut} has {dl}x{dr}")));
    }
    let lambda = negativity_trace_norm(rho, cut)?.clamp(1.0, 2.0);
    Ok(h_of_sqrt_form(lambda - 1.0))
}

pub fn e_f(rho: &DensityMatrix, cut: &Bipartition) -> Result<MeasureResult> {
    e_f_with(rho, cut, &RoofOptions::default())
}

/// Entanglement of formation across `cut`.
pub fn e_f_with(rho: &DensityMatrix, cut: &Bipartition, opts: &RoofOptions) -> Result<MeasureResult> {
    cut.check(rho)?;
    if let Some(psi) = pure_vector(rho) {
        return Ok(MeasureResult::exact(pure_entanglement_entropy(&psi, rho.dims(), cut), "pure_reduced_entropy"));
    }
    if rho.dims() == [2, 2] {
        let c = concurrence(rho)?;
        return Ok(MeasureResult::new(h_of_sqrt_form(c), MeasureKind::Exact, "wootters"));
    }
    if let Ok(amp) = mcs_amplitude_state(rho, MCS_TOL) {
        let mut r = c_f_with(&amp, opts);
        r.method = format!("mcs_reduction:{}", r.method);
        return Ok(r);
    }
    let dims = rho.dims().to_vec();
    let cut_owned = cut.clone();
    let cost = move |psi: &[C64]| pure_entanglement_entropy(psi, &dims, &cut_owned);
    let v = convex_roof_upper_bound(rho.matrix(), &cost, opts);
    Ok(MeasureResult::new(v, MeasureKind::HeuristicUpperBound, "convex_roof_search"))
}

/// Distillable entanglement across `cut`: exact for pure and maximally correlated
/// states, logarithmic negativity upper bound otherwise (exact zero when PPT).
pub fn e_d(rho: &DensityMatrix, cut: &Bipartition) -> Result<MeasureResult> {
    cut.check(rho)?;
    if let Some(psi) = pure_vector(rho) {
        return Ok(MeasureResult::exact(pure_entanglement_entropy(&psi, rho.dims(), cut), "pure_reduced_entropy"));
    }
    if let Ok(amp) = mcs_amplitude_state(rho, MCS_TOL) {
        let mut r = c_d(&amp);
        r.method = "mcs_reduction:relative_entropy_of_coherence".into();
        return Ok(r);
    }
    let en = log_negativity(rho, cut)?;
    if en <= PPT_TOL {
        return Ok(MeasureResult::exact(0.0, "ppt"));
    }
    Ok(MeasureResult::new(en, MeasureKind::UpperBound, "log_negativity"))
}

/// Hashing lower bound on `E_d`: `max(0, S(ρ_left) - S(ρ), S(ρ_right) - S(ρ))`.
pub fn coherent_information(rho: &DensityMatrix, cut: &Bipartition) -> Result<f64> {
    cut.check(rho)?;
    let s = rho.entropy();
    let left = rho.reduce(cut.left())?.entropy();
    let right = rho.reduce(&cut.right())?.entropy();
    Ok((left - s).max(right - s).max(0.0))
}

// ---------------------------------------------------------------------------
// genuine multipartite measures

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GmeBase {
    Distillable,
    Formation,
}

/// `min_α E_α(ψ)` over every cut; both base measures reduce to the entanglement entropy on pure states.
pub fn e_gme_pure(psi: &[C64], dims: &[usize], base: GmeBase) -> Result<(MeasureResult, Bipartition)> {
    matcore::check_normalized(psi)?;
    if dims.len() < 3 {
        return Err(Error::dim("genuine multipartite measure needs at least three parties"));
    }
    if dims.iter().product::<usize>() != psi.len() {
        return Err(Error::dim(format!("dims {dims:?} do not match vector length {}", psi.len())));
    }
    let mut best: Option<(f64, Bipartition)> = None;
    for cut in Bipartition::all(dims.len()) {
        let v = pure_entanglement_entropy(psi, dims, &cut);
        if best.as_ref().is_none_or(|(b, _)| v < *b) {
            best = Some((v, cut));
        }
    }
    let (v, cut) = best.expect("at least one cut");
    let method = match base {
        GmeBase::Distillable => "min_cut_distillable",
        GmeBase::Formation => "min_cut_formation",
    };
    Ok((MeasureResult::exact(v, method), cut))
}

/// `E_f^GME` of a maximally correlated state: the coherence of formation of its amplitude state.
pub fn e_f_gme_mcs(rho: &DensityMatrix) -> Result<MeasureResult> {
    e_f_gme_mcs_with(rho, &RoofOptions::default())
}

pub fn e_f_gme_mcs_with(rho: &DensityMatrix, opts: &RoofOptions) -> Result<MeasureResult> {
    let amp = mcs_amplitude_state(rho, MCS_TOL)?;
    let mut r = c_f_with(&amp, opts);
    r.method = format!("mcs_reduction:{}", r.method);
    Ok(r)
}

/// Multipartite relative entropy of entanglement of a maximally correlated state, equal to its `C_d`.
pub fn e_r_m_mcs(rho: &DensityMatrix) -> Result<MeasureResult> {
    mcs_amplitude_state(rho, MCS_TOL)?;
    let mut r = c_d(rho);
    r.method = "mcs_reduction:relative_entropy_of_coherence".into();
    Ok(r)
}

/// Quantum-incoherent relative entropy `min_{χ∈QI} S(ρ‖χ) = S(Δ_target ρ) - S(ρ)`,
/// where QI states are incoherent on the target party and arbitrary on the assisting parties.
pub fn qi_relative_entropy(rho: &DensityMatrix, target_party: usize) -> Result<MeasureResult> {
    if target_party >= rho.n_parties() {
        return Err(Error::dim(format!("target party {target_party} of {} parties", rho.n_parties())));
    }
    let dephased = dephase(rho, Some(&[target_party]))?;
    Ok(MeasureResult::new(dephased.entropy() - rho.entropy(), MeasureKind::ClosedForm, "target_dephasing"))
}

// ---------------------------------------------------------------------------
// monogamy indicators

fn check_qubits(rho: &DensityMatrix) -> Result<()> {
    if rho.n_parties() < 2 || rho.dims().iter().any(|&d| d != 2) {
        return Err(Error::dim(format!("indicator needs at least two qubits, got dims {:?}", rho.dims())));
    }
    Ok(())
}

/// Pair term of the distillable indicator: exact zero when PPT, exact when pure, else the
/// trivial lower bound 0 (keeps the indicator an upper bound).
fn pair_distillable(pair: &DensityMatrix) -> Result<(f64, bool)> {
    let cut = Bipartition::single(0, 2)?;
    if let Some(psi) = pure_vector(pair) {
        return Ok((pure_entanglement_entropy(&psi, pair.dims(), &cut), true));
    }
    if log_negativity(pair, &cut)? <= PPT_TOL {
        return Ok((0.0, true));
    }
    Ok((0.0, false))
}

fn pair_states(rho: &DensityMatrix) -> Result<Vec<DensityMatrix>> {
    (1..rho.n_parties()).map(|i| rho.reduce(&[0, i])).collect()
}

fn tau_med_from(first: &MeasureResult, rho: &DensityMatrix, method: &str) -> Result<MeasureResult> {
    let mut radicand = first.value * first.value;
    let mut all_pairs_exact = true;
    for pair in pair_states(rho)? {
        let (v, exact) = pair_distillable(&pair)?;
        radicand -= v * v;
        all_pairs_exact &= exact;
    }
    let kind = if first.kind.is_exact() && all_pairs_exact { MeasureKind::Exact } else { MeasureKind::UpperBound };
    Ok(MeasureResult::new(radicand.max(0.0).sqrt(), kind, method))
}

/// `τ_MED = sqrt(max[0, E_d²(A₁|rest) - Σ_i E_d²(A₁A_i)])` for qubits.
pub fn tau_med(rho: &DensityMatrix) -> Result<MeasureResult> {
    check_qubits(rho)?;
    let first = e_d(rho, &Bipartition::single(0, rho.n_parties())?)?;
    tau_med_from(&first, rho, &format!("monogamy_residual:{}", first.method))
}

/// Upper-bound variant with the one-vs-rest term replaced by the logarithmic negativity.
pub fn tau_med_ub(rho: &DensityMatrix) -> Result<MeasureResult> {
    check_qubits(rho)?;
    let en = log_negativity(rho, &Bipartition::single(0, rho.n_parties())?)?;
    let first = MeasureResult::new(en, MeasureKind::UpperBound, "log_negativity");
    let mut r = tau_med_from(&first, rho, "monogamy_residual:log_negativity")?;
    r.kind = MeasureKind::UpperBound;
    Ok(r)
}

fn tau_mef_from(first: &MeasureResult, rho: &DensityMatrix, method: &str) -> Result<MeasureResult> {
    let mut radicand = first.value * first.value;
    for pair in pair_states(rho)? {
        let ef = h_of_sqrt_form(concurrence(&pair)?);
        radicand -= ef * ef;
    }
    if first.kind.is_exact() {
        if radicand < -1e-9 {
            return Err(Error::NegativeRadicand { radicand });
        }
        return Ok(MeasureResult::new(radicand.max(0.0).sqrt(), MeasureKind::Exact, method));
    }
    // the one-vs-rest term is a lower bound, so a negative residual only means "no information"
    Ok(MeasureResult::new(radicand.max(0.0).sqrt(), MeasureKind::LowerBound, method))
}

/// `τ_MEF = sqrt(E_f²(A₁|rest) - Σ_i E_f²(A₁A_i))` for qubits. The one-vs-rest term is exact for
/// pure, two-qubit and maximally correlated states and falls back to the Chen lower bound otherwise.
pub fn tau_mef(rho: &DensityMatrix) -> Result<MeasureResult> {
    tau_mef_with(rho, &RoofOptions::default())
}

pub fn tau_mef_with(rho: &DensityMatrix, opts: &RoofOptions) -> Result<MeasureResult> {
    check_qubits(rho)?;
    let cut = Bipartition::single(0, rho.n_parties())?;
    let exact_route = pure_vector(rho).is_some() || rho.dims() == [2, 2] || mcs_amplitude_state(rho, MCS_TOL).is_ok();
    let first = if exact_route {
        e_f_with(rho, &cut, opts)?
    } else {
        MeasureResult::new(e_f_lower_bound(rho, &cut)?, MeasureKind::LowerBound, "chen_lower_bound")
    };
    tau_mef_from(&first, rho, &format!("monogamy_residual:{}", first.method))
}

/// Lower-bound variant with the one-vs-rest term replaced by the Chen bound.
pub fn tau_mef_lb(rho: &DensityMatrix) -> Result<MeasureResult> {
    check_qubits(rho)?;
    let lb = e_f_lower_bound(rho, &Bipartition::single(0, rho.n_parties())?)?;
    let first = MeasureResult::new(lb, MeasureKind::LowerBound, "chen_lower_bound");
    tau_mef_from(&first, rho, "monogamy_residual:chen_lower_bound")
}

#[cfg(test)]
mod tests;
