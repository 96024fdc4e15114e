//! Coherence to entanglement conversion, LICC transfer back to a single party,
//! the three-qubit cyclic protocol and the randomized inequality harness.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{
    apply_channel, licc_instrument, random_incoherent_channel, random_incoherent_unitary, u_mcn, KrausChannel,
};
use crate::error::{Error, Result};
use crate::io::DensityJson;
use crate::matcore::{kron, partial_trace, ComplexMatrix, C64};
use crate::measures::{
    c_d, c_f_with, coherent_information, concurrence, e_d, e_f_gme_mcs_with, e_f_lower_bound, e_f_with, e_r_m_mcs,
    pure_entanglement_entropy, tau_med, tau_mef_with, Bipartition, MeasureResult, RoofOptions, MCS_TOL,
};
use crate::rng::{rng_from_seed, substream_seed, SeedRng};
use crate::states::{is_mcs, mcs_amplitude_state, random_density, random_pure, validate_density, DensityMatrix};

/// Support threshold when counting populated basis states.
const SUPPORT_TOL: f64 = 1e-12;

fn party_label(i: usize) -> String {
    if i < 26 {
        ((b'A' + i as u8) as char).to_string()
    } else {
        format!("P{i}")
    }
}

fn ket0_density(dims: &[usize]) -> ComplexMatrix {
    let n: usize = dims.iter().product();
    let mut m = ComplexMatrix::zeros(n, n);
    m[(0, 0)] = C64::new(1.0, 0.0);
    m
}

/// `I ⊗ op ⊗ I` with `op` on `party`.
fn lift(op: &ComplexMatrix, dims: &[usize], party: usize) -> ComplexMatrix {
    let before: usize = dims[..party].iter().product();
    let after: usize = dims[party + 1..].iter().product();
    kron(&kron(&ComplexMatrix::identity(before), op), &ComplexMatrix::identity(after))
}

// ---------------------------------------------------------------------------
// conversion

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CutReport {
    pub cut: String,
    pub e_d: MeasureResult,
    pub e_f: MeasureResult,
    /// `|C_d(input) - E_d(cut)|`
    pub residual_d: f64,
    /// `|C_f(input) - E_f(cut)|`
    pub residual_f: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConversionReport {
    pub input_dims: Vec<usize>,
    pub n_ancillas: usize,
    pub output_dims: Vec<usize>,
    pub c_d: MeasureResult,
    pub c_f: MeasureResult,
    pub cuts: Vec<CutReport>,
    pub e_r_m: MeasureResult,
    pub e_f_gme: MeasureResult,
    /// Present for qubit registers with at least three parties.
    pub tau_med: Option<MeasureResult>,
    pub tau_mef: Option<MeasureResult>,
    pub max_residual: f64,
}

/// Applies `U_mcn` to `ρ_A ⊗ |0…0⟩⟨0…0|` with `n_ancillas` ancillas of the same dimension.
pub fn convert(rho_a: &DensityMatrix, n_ancillas: usize) -> Result<(DensityMatrix, ConversionReport)> {
    convert_with(rho_a, n_ancillas, &RoofOptions::default())
}

pub fn convert_with(
    rho_a: &DensityMatrix,
    n_ancillas: usize,
    opts: &RoofOptions,
) -> Result<(DensityMatrix, ConversionReport)> {
    if rho_a.n_parties() != 1 {
        return Err(Error::dim(format!("conversion input must be a single party, got dims {:?}", rho_a.dims())));
    }
    let d = rho_a.dim();
    let dims = vec![d; n_ancillas + 1];
    let input = validate_density(kron(rho_a.matrix(), &ket0_density(&dims[1..])), &dims)?;
    let channel = KrausChannel::unitary(u_mcn(d, n_ancillas)?, dims.clone())?;
    let out = apply_channel(&channel, &input)?;

    let cd = c_d(rho_a);
    let cf = c_f_with(rho_a, opts);
    let mut max_residual: f64 = 0.0;
    let mut cuts = Vec::new();
    for cut in Bipartition::all(dims.len()) {
        let ed = e_d(&out, &cut)?;
        let ef = e_f_with(&out, &cut, opts)?;
        let residual_d = (cd.value - ed.value).abs();
        let residual_f = (cf.value - ef.value).abs();
        max_residual = max_residual.max(residual_d).max(residual_f);
        cuts.push(CutReport { cut: cut.to_string(), e_d: ed, e_f: ef, residual_d, residual_f });
    }
    let e_r_m = e_r_m_mcs(&out)?;
    let e_f_gme = e_f_gme_mcs_with(&out, opts)?;
    max_residual = max_residual.max((cd.value - e_r_m.value).abs()).max((cf.value - e_f_gme.value).abs());
    let (tau_d, tau_f) = if d == 2 && dims.len() >= 3 {
        let td = tau_med(&out)?;
        let tf = tau_mef_with(&out, opts)?;
        max_residual = max_residual.max((cd.value - td.value).abs()).max((cf.value - tf.value).abs());
        (Some(td), Some(tf))
    } else {
        (None, None)
    };
    let report = ConversionReport {
        input_dims: rho_a.dims().to_vec(),
        n_ancillas,
        output_dims: dims,
        c_d: cd,
        c_f: cf,
        cuts,
        e_r_m,
        e_f_gme,
        tau_med: tau_d,
        tau_mef: tau_f,
        max_residual,
    };
    Ok((out, report))
}

// ---------------------------------------------------------------------------
// LICC transfer

/// How the measurement outcome of an LICC step is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeChoice {
    Forced(usize),
    /// Born-rule sampling from a generator seeded with this value.
    Sampled(u64),
}

#[derive(Debug, Clone)]
pub struct LiccStep {
    /// State of the remaining parties, in their original order.
    pub state: DensityMatrix,
    pub outcome: usize,
    pub probability: f64,
    pub probabilities: Vec<f64>,
}

fn check_parties(dims: &[usize], measured: usize, correction: usize) -> Result<()> {
    let n = dims.len();
    if measured >= n || correction >= n || measured == correction {
        return Err(Error::dim(format!(
            "measured party {measured} and correction party {correction} must be distinct parties of {n}"
        )));
    }
    if dims[measured] != dims[correction] {
        return Err(Error::dim(format!(
            "measured and correction parties have dimensions {} and {}",
            dims[measured], dims[correction]
        )));
    }
    Ok(())
}

/// Incoherent measurement `K_j = |j⟩⟨φ_j|` on `measured`, outcome sent to `correction`,
/// which applies `U_j`; the measured party is then discarded.
pub fn licc_step(rho: &DensityMatrix, measured: usize, correction: usize, choice: OutcomeChoice) -> Result<LiccStep> {
    mcs_amplitude_state(rho, MCS_TOL)?;
    let dims = rho.dims().to_vec();
    check_parties(&dims, measured, correction)?;
    let d = dims[measured];
    let inst = licc_instrument(d, None)?;
    let branches: Vec<ComplexMatrix> = inst
        .kraus
        .operators()
        .iter()
        .map(|k| lift(k, &dims, measured).conjugate(rho.matrix()))
        .collect::<Result<_>>()?;
    let probabilities: Vec<f64> = branches.iter().map(|b| b.trace().re.max(0.0)).collect();
    let outcome = match choice {
        OutcomeChoice::Forced(j) => {
            if j >= d {
                return Err(Error::Domain(format!("outcome {j} out of range for {d} outcomes")));
            }
            j
        }
        OutcomeChoice::Sampled(seed) => {
            let u: f64 = rng_from_seed(seed).random();
            let total: f64 = probabilities.iter().sum();
            let mut acc = 0.0;
            let mut pick = d - 1;
            for (j, p) in probabilities.iter().enumerate() {
                acc += p / total;
                if u < acc {
                    pick = j;
                    break;
                }
            }
            pick
        }
    };
    let probability = probabilities[outcome];
    if probability <= 1e-12 {
        return Err(Error::Domain(format!("outcome {outcome} has probability {probability:e}")));
    }
    let corrected = lift(&inst.corrections[outcome], &dims, correction).conjugate(&branches[outcome])?;
    let keep: Vec<usize> = (0..dims.len()).filter(|&p| p != measured).collect();
    let reduced = partial_trace(&corrected.scale_real(1.0 / probability), &dims, &keep)?;
    let kept_dims: Vec<usize> = keep.iter().map(|&p| dims[p]).collect();
    let state = validate_density(reduced, &kept_dims)?;
    Ok(LiccStep { state, outcome, probability, probabilities })
}

/// Outcome-averaged measure-and-correct map on the full register, keeping the measured party.
pub fn licc_channel(dims: &[usize], measured: usize, correction: usize) -> Result<KrausChannel> {
    check_parties(dims, measured, correction)?;
    let inst = licc_instrument(dims[measured], None)?;
    let ops = inst
        .kraus
        .operators()
        .iter()
        .zip(&inst.corrections)
        .map(|(k, u)| lift(u, dims, correction).matmul(&lift(k, dims, measured)))
        .collect::<Result<Vec<_>>>()?;
    KrausChannel::new(ops, dims.to_vec(), dims.to_vec())
}

// ---------------------------------------------------------------------------
// cyclic protocol

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceStep {
    pub label: String,
    pub parties: Vec<String>,
    /// Index into [`ProtocolTrace::snapshots`].
    pub snapshot: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outcome: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probability: Option<f64>,
    pub measures: BTreeMap<String, MeasureResult>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProtocolTrace {
    pub seed: u64,
    pub steps: Vec<TraceStep>,
    pub snapshots: Vec<DensityJson>,
    pub loss_c_d: f64,
    pub loss_c_f: f64,
    /// Larger of the two losses.
    pub loss: f64,
}

impl ProtocolTrace {
    fn push(&mut self, label: &str, parties: &[usize], rho: &DensityMatrix, measures: BTreeMap<String, MeasureResult>) {
        self.snapshots.push(DensityJson::from(rho));
        self.steps.push(TraceStep {
            label: label.into(),
            parties: parties.iter().map(|&p| party_label(p)).collect(),
            snapshot: self.snapshots.len() - 1,
            outcome: None,
            probability: None,
            measures,
        });
    }
}

fn coherence_pair(rho: &DensityMatrix, opts: &RoofOptions) -> BTreeMap<String, MeasureResult> {
    BTreeMap::from([("c_d".to_string(), c_d(rho)), ("c_f".to_string(), c_f_with(rho, opts))])
}

/// Qubit coherence → GHZ-class entanglement on ABC → coherence back on A.
///
/// Step two measures C and corrects B, step three measures B and corrects A. Outcomes are
/// sampled from sub-streams of `seed` and logged.
pub fn cyclic(rho_a: &DensityMatrix, seed: u64) -> Result<ProtocolTrace> {
    if rho_a.dims() != [2] {
        return Err(Error::dim(format!("cyclic protocol takes a qubit, got dims {:?}", rho_a.dims())));
    }
    let opts = RoofOptions::default();
    let mut trace =
        ProtocolTrace { seed, steps: Vec::new(), snapshots: Vec::new(), loss_c_d: 0.0, loss_c_f: 0.0, loss: 0.0 };

    let initial = coherence_pair(rho_a, &opts);
    trace.push("input", &[0], rho_a, initial.clone());

    let (abc, _) = convert_with(rho_a, 2, &opts)?;
    let mut m = coherence_pair(&abc, &opts);
    let a_bc = Bipartition::single(0, 3)?;
    m.insert("e_d_A|BC".into(), e_d(&abc, &a_bc)?);
    m.insert("e_f_A|BC".into(), e_f_with(&abc, &a_bc, &opts)?);
    m.insert("e_r_m".into(), e_r_m_mcs(&abc)?);
    m.insert("e_f_gme".into(), e_f_gme_mcs_with(&abc, &opts)?);
    m.insert("tau_med".into(), tau_med(&abc)?);
    m.insert("tau_mef".into(), tau_mef_with(&abc, &opts)?);
    trace.push("convert", &[0, 1, 2], &abc, m);

    let step = licc_step(&abc, 2, 1, OutcomeChoice::Sampled(substream_seed(seed, 0)))?;
    let ab = step.state;
    let mut m = coherence_pair(&ab, &opts);
    let a_b = Bipartition::single(0, 2)?;
    m.insert("e_d_A|B".into(), e_d(&ab, &a_b)?);
    m.insert("e_f_A|B".into(), e_f_with(&ab, &a_b, &opts)?);
    trace.push("measure_C_correct_B", &[0, 1], &ab, m);
    let last = trace.steps.last_mut().expect("just pushed");
    last.outcome = Some(step.outcome);
    last.probability = Some(step.probability);

    let step = licc_step(&ab, 1, 0, OutcomeChoice::Sampled(substream_seed(seed, 1)))?;
    let a = step.state;
    let fin = coherence_pair(&a, &opts);
    trace.loss_c_d = (initial["c_d"].value - fin["c_d"].value).abs();
    trace.loss_c_f = (initial["c_f"].value - fin["c_f"].value).abs();
    trace.loss = trace.loss_c_d.max(trace.loss_c_f);
    trace.push("measure_B_correct_A", &[0], &a, fin);
    let last = trace.steps.last_mut().expect("just pushed");
    last.outcome = Some(step.outcome);
    last.probability = Some(step.probability);
    Ok(trace)
}

// ---------------------------------------------------------------------------
// inequality harness

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub samples: usize,
    /// Local dimension of every party.
    pub d: usize,
    /// Number of ancillas.
    pub n: usize,
    pub seed: u64,
    pub tolerance: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { samples: 200, d: 2, n: 2, seed: 0, tolerance: 1e-8 }
    }
}

impl VerifyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::Config("samples must be positive".into()));
        }
        if !(2..=4).contains(&self.d) {
            return Err(Error::Config(format!("d = {} outside 2..=4", self.d)));
        }
        if !(1..=3).contains(&self.n) {
            return Err(Error::Config(format!("n = {} outside 1..=3", self.n)));
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(Error::Config(format!("tolerance {} must be positive", self.tolerance)));
        }
        Ok(())
    }
}

/// Certified range `[lo, hi]` of a quantity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn exact(v: f64) -> Self {
        Interval { lo: v, hi: v }
    }

    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo: lo.min(hi), hi }
    }

    /// Exact values collapse to a point; upper bounds give `[floor, v]`, lower bounds `[v, ∞)`.
    pub fn from_result(r: &MeasureResult, floor: f64) -> Self {
        if r.kind.is_exact() {
            Interval::exact(r.value)
        } else if r.kind.is_upper() {
            Interval::new(floor, r.value)
        } else {
            Interval::new(r.value.max(floor), f64::INFINITY)
        }
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }
}

/// `sqrt(max(0, a² - Σ p²))` over intervals: increasing in `a`, decreasing in every `p`.
fn residual_interval(first: Interval, pairs: &[Interval]) -> Interval {
    let f = |a: f64, ps: &mut dyn Iterator<Item = f64>| {
        let r = a * a - ps.map(|p| p * p).sum::<f64>();
        r.max(0.0).sqrt()
    };
    let lo = f(first.lo, &mut pairs.iter().map(|p| p.hi));
    let hi = f(first.hi, &mut pairs.iter().map(|p| p.lo));
    Interval::new(lo, hi)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Relation {
    AtMost,
    Equal,
}

struct Check {
    id: &'static str,
    detail: String,
    lhs: Interval,
    rhs: Interval,
    relation: Relation,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Verdict {
    Certified(f64),
    Violated(f64),
    Inconclusive,
}

impl Check {
    fn at_most(id: &'static str, detail: impl Into<String>, lhs: Interval, rhs: Interval) -> Self {
        Check { id, detail: detail.into(), lhs, rhs, relation: Relation::AtMost }
    }

    fn equal(id: &'static str, detail: impl Into<String>, lhs: Interval, rhs: Interval) -> Self {
        Check { id, detail: detail.into(), lhs, rhs, relation: Relation::Equal }
    }

    fn verdict(&self, tol: f64) -> Verdict {
        let le = |l: Interval, r: Interval| {
            let refute = r.hi - l.lo;
            let guarantee = r.lo - l.hi;
            if refute < -tol {
                Verdict::Violated(refute)
            } else if guarantee >= -tol {
                Verdict::Certified(guarantee)
            } else {
                Verdict::Inconclusive
            }
        };
        match self.relation {
            Relation::AtMost => le(self.lhs, self.rhs),
            Relation::Equal => {
                if self.lhs.is_point() && self.rhs.is_point() {
                    let m = self.rhs.lo - self.lhs.lo;
                    return if m.abs() <= tol { Verdict::Certified(m) } else { Verdict::Violated(m) };
                }
                match (le(self.lhs, self.rhs), le(self.rhs, self.lhs)) {
                    (Verdict::Violated(m), _) => Verdict::Violated(m),
                    (_, Verdict::Violated(m)) => Verdict::Violated(-m),
                    _ => Verdict::Inconclusive,
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub sample: usize,
    /// Seed that replays this sample through [`replay_sample`].
    pub seed: u64,
    /// `rhs - lhs`; negative beyond tolerance.
    pub margin: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub id: String,
    pub relation: String,
    pub samples: usize,
    pub checks: usize,
    pub certified: usize,
    /// Checks where the available bounds neither confirm nor refute the relation.
    pub inconclusive: usize,
    pub violations: Vec<Violation>,
    /// Smallest and largest `rhs - lhs` over decided checks.
    pub min_margin: Option<f64>,
    pub max_margin: Option<f64>,
}

impl TheoremReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

const REPORTS: &[(&str, &str)] = &[
    ("conversion.e_d", "C_d(ρ_A) ≥ E_d(Λ(ρ_A⊗σ)) across every cut"),
    ("conversion.e_f", "C_f(ρ_A) ≥ E_f(Λ(ρ_A⊗σ)) across every cut"),
    ("conversion.gme_pure", "C_d(ρ_A) ≥ E_d^GME and C_f(ρ_A) ≥ E_f^GME for pure outputs"),
    ("conversion.e_r_m", "C_d(ρ_A) ≥ E_r^M(Λ(ρ_A⊗σ))"),
    ("conversion.e_f_gme", "C_f(ρ_A) ≥ E_f^GME(Λ(ρ_A⊗σ))"),
    ("conversion.tau_med", "C_d(ρ_A) ≥ τ_MED(Λ(ρ_A⊗σ)) for qubits"),
    ("conversion.tau_mef", "C_f(ρ_A) ≥ τ_MEF(Λ(ρ_A⊗σ)) for qubits"),
    ("state.e_d_below_c_d", "E_d(ρ_α|ᾱ) ≤ C_d(ρ)"),
    ("state.e_f_below_c_f", "E_f(ρ_α|ᾱ) ≤ C_f(ρ)"),
    ("u_mcn.saturation", "U_mcn output: E_d = E_r^M = C_d(ρ_A), E_f = E_f^GME = C_f(ρ_A), τ = C"),
    ("mcs.saturation", "MCS: E_d(any cut) = E_r^M = C_d and E_f(any cut) = E_f^GME = C_f"),
    ("licc.c_d", "C_d(ρ_r) ≤ C_d(Λ_LICC(ρ^mc)) ≤ E_d(ρ^mc) = E_r^M(ρ^mc)"),
    ("licc.c_f", "C_f(ρ_r) ≤ C_f(Λ_LICC(ρ^mc)) ≤ E_f(ρ^mc) = E_f^GME(ρ^mc)"),
    ("licc.tau", "C_d(ρ_r) ≤ τ_MED(ρ^mc) and C_f(ρ_r) ≤ τ_MEF(ρ^mc) for qubits"),
    ("w_class.support", "incoherent unitaries on |ψ⟩⊗|0…0⟩ populate at most d basis states"),
];

/// Entanglement intervals of every cut plus the register-wide coherences of one state.
struct Profile {
    cuts: Vec<(Bipartition, Interval, Interval)>,
    c_d: f64,
    c_f: Interval,
    pure: Option<Vec<C64>>,
    mcs: bool,
}

fn coherence_of_formation(rho: &DensityMatrix, opts: &RoofOptions) -> Interval {
    // C_f ≥ C_d always
    Interval::from_result(&c_f_with(rho, opts), c_d(rho).value)
}

fn entanglement_intervals(rho: &DensityMatrix, cut: &Bipartition, opts: &RoofOptions) -> Result<(Interval, Interval)> {
    let hashing = coherent_information(rho, cut)?;
    let ed = Interval::from_result(&e_d(rho, cut)?, hashing);
    let ef_r = e_f_with(rho, cut, opts)?;
    let (dl, dr) = cut.split_dims(rho.dims());
    let chen = if dl == 2 || dr == 2 { e_f_lower_bound(rho, cut)? } else { 0.0 };
    // E_f ≥ E_d ≥ hashing
    let ef = Interval::from_result(&ef_r, chen.max(ed.lo));
    Ok((ed, ef))
}

fn profile(rho: &DensityMatrix, opts: &RoofOptions) -> Result<Profile> {
    let mut cuts = Vec::new();
    for cut in Bipartition::all(rho.n_parties()) {
        let (ed, ef) = entanglement_intervals(rho, &cut, opts)?;
        cuts.push((cut, ed, ef));
    }
    Ok(Profile {
        cuts,
        c_d: c_d(rho).value,
        c_f: coherence_of_formation(rho, opts),
        pure: rho.pure_vector(1e-10),
        mcs: is_mcs(rho, MCS_TOL),
    })
}

fn e_r_m_interval(rho: &DensityMatrix, p: &Profile) -> Result<Interval> {
    if p.mcs {
        return Ok(Interval::exact(e_r_m_mcs(rho)?.value));
    }
    // E_r^M ≥ E_r(cut) ≥ E_d(cut); the dephased state is fully separable, so C_d bounds it above
    let lo = p.cuts.iter().map(|c| c.1.lo).fold(0.0, f64::max);
    Ok(Interval::new(lo, p.c_d))
}

fn e_f_gme_interval(rho: &DensityMatrix, p: &Profile, opts: &RoofOptions) -> Result<Interval> {
    if let Some(psi) = &p.pure {
        let v = Bipartition::all(rho.n_parties())
            .iter()
            .map(|c| pure_entanglement_entropy(psi, rho.dims(), c))
            .fold(f64::INFINITY, f64::min);
        return Ok(Interval::exact(v));
    }
    if p.mcs {
        let amp = mcs_amplitude_state(rho, MCS_TOL)?;
        return Ok(Interval::from_result(&e_f_gme_mcs_with(rho, opts)?, c_d(&amp).value));
    }
    let hi = p.cuts.iter().map(|c| c.2.hi).fold(f64::INFINITY, f64::min);
    Ok(Interval::new(0.0, hi))
}

/// Interval versions of the two qubit monogamy residuals.
fn tau_intervals(rho: &DensityMatrix, p: &Profile) -> Result<(Interval, Interval)> {
    let n = rho.n_parties();
    let first = p.cuts.iter().find(|c| c.0.left() == [0] && n > 1).expect("single-party cut of A is enumerated");
    let mut pair_d = Vec::new();
    let mut pair_f = Vec::new();
    for i in 1..n {
        let pair = rho.reduce(&[0, i])?;
        let cut = Bipartition::single(0, 2)?;
        let hashing = coherent_information(&pair, &cut)?;
        pair_d.push(Interval::from_result(&e_d(&pair, &cut)?, hashing));
        let c = concurrence(&pair)?;
        pair_f.push(Interval::exact(crate::matcore::h_of_sqrt_form(c)));
    }
    Ok((residual_interval(first.1, &pair_d), residual_interval(first.2, &pair_f)))
}

fn support_size(rho: &DensityMatrix) -> usize {
    rho.matrix().diagonal().iter().filter(|z| z.re > SUPPORT_TOL).count()
}

fn random_register_state(d: usize, rng: &mut SeedRng) -> Result<DensityMatrix> {
    // mostly pure inputs, where every coherence value is exact
    if rng.random_bool(0.75) {
        DensityMatrix::from_pure(&random_pure(d, rng), &[d])
    } else {
        random_density(d, 2, rng)
    }
}

fn random_incoherent_ancilla(dims: &[usize], rng: &mut SeedRng) -> ComplexMatrix {
    if rng.random_bool(0.5) {
        return ket0_density(dims);
    }
    let n: usize = dims.iter().product();
    let w: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    let s: f64 = w.iter().sum();
    ComplexMatrix::from_real_diagonal(&w.iter().map(|x| x / s).collect::<Vec<_>>())
}

fn on_register(ch: KrausChannel, dims: &[usize]) -> Result<KrausChannel> {
    KrausChannel::new(ch.operators().to_vec(), dims.to_vec(), dims.to_vec())
}

fn conversion_checks(cfg: &VerifyConfig, rng: &mut SeedRng, out: &mut Vec<Check>) -> Result<()> {
    let d = cfg.d;
    let dims = vec![d; cfg.n + 1];
    let total: usize = dims.iter().product();
    let opts = RoofOptions::quick(rng.random());
    let rho_a = random_register_state(d, rng)?;
    let sigma = random_incoherent_ancilla(&dims[1..], rng);
    let n_ops = rng.random_range(1..=3);
    let ch = on_register(random_incoherent_channel(total, n_ops, rng)?, &dims)?;
    let input = validate_density(kron(rho_a.matrix(), &sigma), &dims)?;
    let rho = apply_channel(&ch, &input)?;

    let cd = Interval::exact(c_d(&rho_a).value);
    let cf = coherence_of_formation(&rho_a, &opts);
    let p = profile(&rho, &opts)?;
    for (cut, ed, ef) in &p.cuts {
        out.push(Check::at_most("conversion.e_d", format!("cut {cut}"), *ed, cd));
        out.push(Check::at_most("conversion.e_f", format!("cut {cut}"), *ef, cf));
        out.push(Check::at_most("state.e_d_below_c_d", format!("cut {cut}"), *ed, Interval::exact(p.c_d)));
        out.push(Check::at_most("state.e_f_below_c_f", format!("cut {cut}"), *ef, p.c_f));
    }
    if let Some(psi) = &p.pure {
        if dims.len() >= 3 {
            let gme = Bipartition::all(dims.len())
                .iter()
                .map(|c| pure_entanglement_entropy(psi, &dims, c))
                .fold(f64::INFINITY, f64::min);
            out.push(Check::at_most("conversion.gme_pure", "E_d^GME", Interval::exact(gme), cd));
            out.push(Check::at_most("conversion.gme_pure", "E_f^GME", Interval::exact(gme), cf));
        }
    }
    out.push(Check::at_most("conversion.e_r_m", "E_r^M", e_r_m_interval(&rho, &p)?, cd));
    out.push(Check::at_most("conversion.e_f_gme", "E_f^GME", e_f_gme_interval(&rho, &p, &opts)?, cf));
    if d == 2 && dims.len() >= 3 {
        let (td, tf) = tau_intervals(&rho, &p)?;
        out.push(Check::at_most("conversion.tau_med", "τ_MED", td, cd));
        out.push(Check::at_most("conversion.tau_mef", "τ_MEF", tf, cf));
    }
    Ok(())
}

fn saturation_checks(cfg: &VerifyConfig, rng: &mut SeedRng, out: &mut Vec<Check>) -> Result<()> {
    let d = cfg.d;
    // mixed qubits keep C_f in closed form; larger inputs stay pure so every value is exact
    let rank = if d == 2 { rng.random_range(1..=2) } else { 1 };
    let rho_a = random_density(d, rank, rng)?.with_dims(&[d])?;
    let opts = RoofOptions::quick(rng.random());
    let (rho, report) = convert_with(&rho_a, cfg.n, &opts)?;
    let point =
        |r: &MeasureResult| if r.kind.is_exact() { Interval::exact(r.value) } else { Interval::new(0.0, r.value) };
    let cd = point(&report.c_d);
    let cf = point(&report.c_f);
    for c in &report.cuts {
        out.push(Check::equal("u_mcn.saturation", format!("E_d {}", c.cut), point(&c.e_d), cd));
        out.push(Check::equal("u_mcn.saturation", format!("E_f {}", c.cut), point(&c.e_f), cf));
    }
    out.push(Check::equal("u_mcn.saturation", "E_r^M", point(&report.e_r_m), cd));
    out.push(Check::equal("u_mcn.saturation", "E_f^GME", point(&report.e_f_gme), cf));
    if let (Some(td), Some(tf)) = (&report.tau_med, &report.tau_mef) {
        out.push(Check::equal("u_mcn.saturation", "τ_MED", point(td), cd));
        out.push(Check::equal("u_mcn.saturation", "τ_MEF", point(tf), cf));
    }
    // the same state also exercises the register-level identities
    let whole_cd = Interval::exact(c_d(&rho).value);
    let whole_cf = point(&c_f_with(&rho, &opts));
    for c in &report.cuts {
        out.push(Check::equal("mcs.saturation", format!("E_d {} vs C_d", c.cut), point(&c.e_d), whole_cd));
        out.push(Check::equal("mcs.saturation", format!("E_f {} vs C_f", c.cut), point(&c.e_f), whole_cf));
    }
    out.push(Check::equal("mcs.saturation", "E_r^M vs C_d", point(&report.e_r_m), whole_cd));
    out.push(Check::equal("mcs.saturation", "E_f^GME vs C_f", point(&report.e_f_gme), whole_cf));
    Ok(())
}

/// Random LICC circuit of depth 1 to 3 on `dims`: local incoherent channels and
/// outcome-averaged measure-and-correct steps.
fn random_licc_circuit(dims: &[usize], rng: &mut SeedRng) -> Result<Vec<KrausChannel>> {
    let n = dims.len();
    let depth = rng.random_range(1..=3);
    let mut steps = Vec::with_capacity(depth);
    for _ in 0..depth {
        if rng.random_bool(0.5) {
            let party = rng.random_range(0..n);
            let local = random_incoherent_channel(dims[party], rng.random_range(1..=3), rng)?;
            steps.push(local.on_party(dims, party)?);
        } else {
            let measured = rng.random_range(0..n);
            let correction = (measured + rng.random_range(1..n)) % n;
            steps.push(licc_channel(dims, measured, correction)?);
        }
    }
    Ok(steps)
}

fn licc_checks(cfg: &VerifyConfig, rng: &mut SeedRng, out: &mut Vec<Check>) -> Result<()> {
    let d = cfg.d;
    let parties = cfg.n + 1;
    let dims = vec![d; parties];
    let opts = RoofOptions::quick(rng.random());
    let amp = random_density(d, rng.random_range(1..=d), rng)?.with_dims(&[d])?;
    let mcs = crate::states::mcs_from_matrix(&amp, parties)?;
    let a_rest = Bipartition::single(0, parties)?;
    let ed_mcs = Interval::from_result(&e_d(&mcs, &a_rest)?, 0.0);
    let erm = Interval::exact(e_r_m_mcs(&mcs)?.value);
    let ef_mcs = Interval::from_result(&e_f_with(&mcs, &a_rest, &opts)?, c_d(&amp).value);
    let gme = Interval::from_result(&e_f_gme_mcs_with(&mcs, &opts)?, c_d(&amp).value);

    let mut rho = mcs.clone();
    for step in random_licc_circuit(&dims, rng)? {
        rho = apply_channel(&step, &rho)?;
    }
    let mask = rng.random_range(1..(1usize << parties));
    let keep: Vec<usize> = (0..parties).filter(|i| mask >> i & 1 == 1).collect();
    let reduced = rho.reduce(&keep)?;
    let label = format!("kept {}", keep.iter().map(|&p| party_label(p)).collect::<String>());

    let cd_r = Interval::exact(c_d(&reduced).value);
    let cd_all = Interval::exact(c_d(&rho).value);
    out.push(Check::at_most("licc.c_d", format!("{label}: C_d(ρ_r) ≤ C_d(Λ(ρ))"), cd_r, cd_all));
    out.push(Check::at_most("licc.c_d", "C_d(Λ(ρ)) ≤ E_d(ρ^mc)", cd_all, ed_mcs));
    out.push(Check::equal("licc.c_d", "E_d(ρ^mc) = E_r^M(ρ^mc)", ed_mcs, erm));
    let cf_r = coherence_of_formation(&reduced, &opts);
    let cf_all = coherence_of_formation(&rho, &opts);
    out.push(Check::at_most("licc.c_f", format!("{label}: C_f(ρ_r) ≤ C_f(Λ(ρ))"), cf_r, cf_all));
    out.push(Check::at_most("licc.c_f", "C_f(Λ(ρ)) ≤ E_f(ρ^mc)", cf_all, ef_mcs));
    out.push(Check::equal("licc.c_f", "E_f(ρ^mc) = E_f^GME(ρ^mc)", ef_mcs, gme));
    if d == 2 && parties >= 3 {
        let p = profile(&mcs, &opts)?;
        let (td, tf) = tau_intervals(&mcs, &p)?;
        out.push(Check::at_most("licc.tau", format!("{label}: C_d(ρ_r) ≤ τ_MED"), cd_r, td));
        out.push(Check::at_most("licc.tau", format!("{label}: C_f(ρ_r) ≤ τ_MEF"), cf_r, tf));
    }
    Ok(())
}

fn w_class_checks(cfg: &VerifyConfig, rng: &mut SeedRng, out: &mut Vec<Check>) -> Result<()> {
    let d = cfg.d;
    let dims = vec![d; cfg.n + 1];
    let total: usize = dims.iter().product();
    let psi = random_pure(d, rng);
    let mut full = vec![C64::new(0.0, 0.0); total];
    let stride = total / d;
    for (i, a) in psi.iter().enumerate() {
        full[i * stride] = *a;
    }
    let u = random_incoherent_unitary(total, rng);
    let rho = DensityMatrix::from_pure(&u.apply(&full)?, &dims)?;
    let s = support_size(&rho) as f64;
    out.push(Check::at_most("w_class.support", format!("support {s}"), Interval::exact(s), Interval::exact(d as f64)));
    Ok(())
}

const GROUPS: u64 = 4;

fn sample_checks(cfg: &VerifyConfig, sample_seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let mut rng = rng_from_seed(substream_seed(sample_seed, 0));
    conversion_checks(cfg, &mut rng, &mut out)?;
    let mut rng = rng_from_seed(substream_seed(sample_seed, 1));
    saturation_checks(cfg, &mut rng, &mut out)?;
    let mut rng = rng_from_seed(substream_seed(sample_seed, 2));
    licc_checks(cfg, &mut rng, &mut out)?;
    let mut rng = rng_from_seed(substream_seed(sample_seed, GROUPS - 1));
    w_class_checks(cfg, &mut rng, &mut out)?;
    Ok(out)
}

fn merge(cfg: &VerifyConfig, per_sample: Vec<(usize, u64, Vec<Check>)>) -> Vec<TheoremReport> {
    let mut reports: Vec<TheoremReport> = REPORTS
        .iter()
        .map(|(id, rel)| TheoremReport {
            id: id.to_string(),
            relation: rel.to_string(),
            samples: 0,
            checks: 0,
            certified: 0,
            inconclusive: 0,
            violations: Vec::new(),
            min_margin: None,
            max_margin: None,
        })
        .collect();
    let index: BTreeMap<&str, usize> = REPORTS.iter().enumerate().map(|(i, (id, _))| (*id, i)).collect();
    for (sample, seed, checks) in per_sample {
        let mut seen = vec![false; reports.len()];
        for c in checks {
            let k = index[c.id];
            let r = &mut reports[k];
            if !seen[k] {
                seen[k] = true;
                r.samples += 1;
            }
            r.checks += 1;
            let margin = match c.verdict(cfg.tolerance) {
                Verdict::Certified(m) => {
                    r.certified += 1;
                    m
                }
                Verdict::Violated(m) => {
                    r.violations.push(Violation { sample, seed, margin: m, detail: c.detail });
                    m
                }
                Verdict::Inconclusive => {
                    r.inconclusive += 1;
                    continue;
                }
            };
            r.min_margin = Some(r.min_margin.map_or(margin, |x| x.min(margin)));
            r.max_margin = Some(r.max_margin.map_or(margin, |x| x.max(margin)));
        }
    }
    reports.retain(|r| r.samples > 0);
    reports
}

/// Runs every relation on `cfg.samples` independent samples in parallel.
///
/// Sample `i` draws from the sub-stream seed `substream_seed(cfg.seed, i)`, recorded with any
/// violation; the merged reports do not depend on thread scheduling.
pub fn verify_theorems(cfg: &VerifyConfig) -> Result<Vec<TheoremReport>> {
    cfg.validate()?;
    let per_sample = (0..cfg.samples)
        .into_par_iter()
        .map(|i| {
            let seed = substream_seed(cfg.seed, i as u64);
            sample_checks(cfg, seed).map(|c| (i, seed, c))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(merge(cfg, per_sample))
}

/// Re-runs the single sample drawn from `sample_seed`.
pub fn replay_sample(cfg: &VerifyConfig, sample_seed: u64) -> Result<Vec<TheoremReport>> {
    let cfg = VerifyConfig { samples: 1, ..*cfg };
    cfg.validate()?;
    Ok(merge(&cfg, vec![(0, sample_seed, sample_checks(&cfg, sample_seed)?)]))
}
