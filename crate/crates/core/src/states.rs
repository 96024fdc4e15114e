//! State construction, validation and random sampling.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{DensityViolation, Error, Result};
use crate::matcore::{self, check_normalized, hermitian_eigenvalues, partial_trace, ComplexMatrix, C64, ONE, ZERO};

pub const HERMITICITY_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-9;

/// A validated density matrix together with its subsystem dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    dims: Vec<usize>,
}

/// Checks hermiticity, unit trace and positivity; reports every violated condition at once.
pub fn validate_density(m: ComplexMatrix, dims: &[usize]) -> Result<DensityMatrix> {
    if !m.is_square() {
        return Err(Error::dim(format!("density matrix is {}x{}", m.rows(), m.cols())));
    }
    if dims.is_empty() || dims.contains(&0) || dims.iter().product::<usize>() != m.rows() {
        return Err(Error::dim(format!("dims {dims:?} do not match a {}x{} matrix", m.rows(), m.rows())));
    }
    let mut violations = Vec::new();
    let herm = m.hermiticity_deviation();
    if herm > HERMITICITY_TOL {
        violations.push(DensityViolation::Hermiticity { max_deviation: herm });
    }
    let tr = m.trace();
    if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
        violations.push(DensityViolation::Trace { trace: tr.re });
    }
    let min_eig = hermitian_eigenvalues(&m)?.last().copied().unwrap_or(0.0);
    if min_eig < -PSD_TOL {
        violations.push(DensityViolation::Positivity { min_eigenvalue: min_eig });
    }
    if violations.is_empty() {
        Ok(DensityMatrix { matrix: m, dims: dims.to_vec() })
    } else {
        Err(Error::InvalidDensity(violations))
    }
}

impl DensityMatrix {
    /// Skips validation; only for constructions that are PSD and unit-trace by design.
    pub(crate) fn from_parts_unchecked(matrix: ComplexMatrix, dims: Vec<usize>) -> Self {
        debug_assert_eq!(dims.iter().product::<usize>(), matrix.rows());
        DensityMatrix { matrix, dims }
    }

    pub fn from_pure(psi: &[C64], dims: &[usize]) -> Result<Self> {
        check_normalized(psi)?;
        validate_density(ComplexMatrix::outer(psi), dims)
    }

    pub fn maximally_mixed(dims: &[usize]) -> Self {
        let d: usize = dims.iter().product();
        Self::from_parts_unchecked(ComplexMatrix::identity(d).scale_real(1.0 / d as f64), dims.to_vec())
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn n_parties(&self) -> usize {
        self.dims.len()
    }

    pub fn entropy(&self) -> f64 {
        matcore::vn_entropy(&self.matrix)
    }

    pub fn purity(&self) -> f64 {
        let m = &self.matrix;
        m.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    /// State of the listed parties (ascending order).
    pub fn reduce(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let m = partial_trace(&self.matrix, &self.dims, keep)?;
        let mut kept: Vec<usize> = keep.to_vec();
        kept.sort_unstable();
        kept.dedup();
        let dims = kept.iter().map(|&k| self.dims[k]).collect();
        Ok(DensityMatrix::from_parts_unchecked(m, dims))
    }

    /// Same matrix viewed with a different factorization of the total dimension.
    pub fn with_dims(&self, dims: &[usize]) -> Result<DensityMatrix> {
        if dims.iter().product::<usize>() != self.dim() || dims.contains(&0) {
            return Err(Error::dim(format!("dims {dims:?} do not factor {}", self.dim())));
        }
        Ok(DensityMatrix { matrix: self.matrix.clone(), dims: dims.to_vec() })
    }

    /// The state vector when the state is pure (purity within `tol` of 1).
    pub fn pure_vector(&self, tol: f64) -> Option<Vec<C64>> {
        if (self.purity() - 1.0).abs() > tol {
            return None;
        }
        let eig = matcore::hermitian_eig(&self.matrix).ok()?;
        Some(eig.vectors.column(0))
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        let n = self.dim();
        (0..n).all(|r| (0..n).all(|c| r == c || self.matrix[(r, c)].norm() <= tol))
    }
}

/// Amplitudes `α_i` of a single-party coherent pure state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherentAmplitudes {
    amps: Vec<C64>,
}

impl CoherentAmplitudes {
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        if amps.len() < 2 {
            return Err(Error::dim("coherent amplitudes need at least two levels"));
        }
        let n2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (n2 - 1.0).abs() > 1e-10 {
            return Err(Error::Normalization { norm: n2.sqrt() });
        }
        Ok(CoherentAmplitudes { amps })
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::new(amps.iter().map(|&a| C64::new(a, 0.0)).collect())
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(amps: Vec<C64>) -> Result<Self> {
        let n = matcore::vector_norm(&amps);
        if n == 0.0 || !n.is_finite() {
            return Err(Error::Normalization { norm: n });
        }
        Self::new(amps.into_iter().map(|a| a / n).collect())
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.amps
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn moduli(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm()).collect()
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_parts_unchecked(ComplexMatrix::outer(&self.amps), vec![self.amps.len()])
    }
}

/// Index of `|m m ... m⟩` among `parties` d-level systems.
pub(crate) fn correlated_index(m: usize, d: usize, parties: usize) -> usize {
    (0..parties).fold(0, |acc, _| acc * d + m)
}

/// `Σ_{mn} ρ_mn |m…m⟩⟨n…n|` on `parties` copies of the single-party space.
pub fn mcs_from_matrix(rho_a: &DensityMatrix, parties: usize) -> Result<DensityMatrix> {
    if rho_a.n_parties() != 1 {
        return Err(Error::dim("maximally correlated embedding needs a single-party state"));
    }
    if parties < 1 {
        return Err(Error::dim("at least one party"));
    }
    let d = rho_a.dim();
    let total = d.pow(parties as u32);
    let mut m = ComplexMatrix::zeros(total, total);
    for r in 0..d {
        for c in 0..d {
            m[(correlated_index(r, d, parties), correlated_index(c, d, parties))] = rho_a.matrix()[(r, c)];
        }
    }
    Ok(DensityMatrix::from_parts_unchecked(m, vec![d; parties]))
}

pub fn mcs_from_amplitudes(a: &CoherentAmplitudes, parties: usize) -> Result<DensityMatrix> {
    mcs_from_matrix(&a.density(), parties)
}

/// Pure MCS vector `Σ α_m |m…m⟩`.
pub fn mcs_vector(a: &CoherentAmplitudes, parties: usize) -> Vec<C64> {
    let d = a.dim();
    let mut v = vec![ZERO; d.pow(parties as u32)];
    for (m, amp) in a.as_slice().iter().enumerate() {
        v[correlated_index(m, d, parties)] = *amp;
    }
    v
}

/// Recovers the single-party matrix `ρ_mn` from a state of maximally correlated form.
///
/// Fails with `NotMcs` when any entry outside the correlated subspace exceeds `tol`,
/// when local dimensions differ, or when there are fewer than two parties.
pub fn mcs_amplitude_state(rho: &DensityMatrix, tol: f64) -> Result<DensityMatrix> {
    let dims = rho.dims();
    if dims.len() < 2 {
        return Err(Error::NotMcs("fewer than two parties".into()));
    }
    let d = dims[0];
    if dims.iter().any(|&x| x != d) {
        return Err(Error::NotMcs(format!("unequal local dimensions {dims:?}")));
    }
    let parties = dims.len();
    let corr: Vec<usize> = (0..d).map(|m| correlated_index(m, d, parties)).collect();
    let n = rho.dim();
    let m = rho.matrix();
    for r in 0..n {
        for c in 0..n {
            if !(corr.contains(&r) && corr.contains(&c)) && m[(r, c)].norm() > tol {
                return Err(Error::NotMcs(format!(
                    "entry ({r},{c}) = {:.3e} outside the correlated subspace",
                    m[(r, c)].norm()
                )));
            }
        }
    }
    let small = ComplexMatrix::from_fn(d, d, |r, c| m[(corr[r], corr[c])]);
    Ok(DensityMatrix::from_parts_unchecked(small, vec![d]))
}

pub fn is_mcs(rho: &DensityMatrix, tol: f64) -> bool {
    mcs_amplitude_state(rho, tol).is_ok()
}

/// Named reference states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StandardState {
    /// `|i⟩⟨i|` in dimension `d`.
    Basis { d: usize, i: usize },
    /// `Ψ_d = (1/d) Σ_ij |i⟩⟨j|`
    MaxCoherent { d: usize },
    /// `(|00⟩ + |11⟩)/√2`
    Bell,
    /// `(|0…0⟩ + |1…1⟩)/√2` on `n` qubits.
    Ghz { n: usize },
    /// `(|100⟩ + |010⟩ + |001⟩)/√3`
    W3,
}

impl StandardState {
    /// Parses `basis`, `max_coherent`/`plus`, `bell`, `ghz`, `w3`; `params` supplies d / i / n.
    pub fn parse(name: &str, params: &[usize]) -> Result<Self> {
        let p = |k: usize, default: usize| params.get(k).copied().unwrap_or(default);
        match name.to_ascii_lowercase().as_str() {
            "basis" => Ok(StandardState::Basis { d: p(0, 2), i: p(1, 0) }),
            "max_coherent" | "maxcoherent" | "psi" => Ok(StandardState::MaxCoherent { d: p(0, 2) }),
            "plus" => Ok(StandardState::MaxCoherent { d: 2 }),
            "bell" => Ok(StandardState::Bell),
            "ghz" => Ok(StandardState::Ghz { n: p(0, 3) }),
            "w" | "w3" => Ok(StandardState::W3),
            other => Err(Error::UnknownState(other.to_string())),
        }
    }

    pub fn vector(&self) -> Result<(Vec<C64>, Vec<usize>)> {
        let r = |x: f64| C64::new(x, 0.0);
        match *self {
            StandardState::Basis { d, i } => {
                if d < 1 || i >= d {
                    return Err(Error::Domain(format!("basis state {i} in dimension {d}")));
                }
                let mut v = vec![ZERO; d];
                v[i] = ONE;
                Ok((v, vec![d]))
            }
            StandardState::MaxCoherent { d } => {
                if d < 2 {
                    return Err(Error::Domain("maximally coherent state needs d >= 2".into()));
                }
                Ok((vec![r(1.0 / (d as f64).sqrt()); d], vec![d]))
            }
            StandardState::Bell => {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                Ok((vec![r(s), ZERO, ZERO, r(s)], vec![2, 2]))
            }
            StandardState::Ghz { n } => {
                if n < 2 {
                    return Err(Error::Domain("GHZ state needs at least two qubits".into()));
                }
                let s = std::f64::consts::FRAC_1_SQRT_2;
                let mut v = vec![ZERO; 1 << n];
                v[0] = r(s);
                v[(1 << n) - 1] = r(s);
                Ok((v, vec![2; n]))
            }
            StandardState::W3 => {
                let s = 1.0 / 3f64.sqrt();
                let mut v = vec![ZERO; 8];
                v[0b100] = r(s);
                v[0b010] = r(s);
                v[0b001] = r(s);
                Ok((v, vec![2, 2, 2]))
            }
        }
    }

    pub fn density(&self) -> Result<DensityMatrix> {
        let (v, dims) = self.vector()?;
        DensityMatrix::from_pure(&v, &dims)
    }
}

pub fn standard_state(name: &str, params: &[usize]) -> Result<DensityMatrix> {
    StandardState::parse(name, params)?.density()
}

fn gaussian_complex<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

/// Haar-random pure state: normalized complex Gaussian vector.
pub fn random_pure<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<C64> {
    assert!(d >= 1);
    loop {
        let v: Vec<C64> = (0..d).map(|_| gaussian_complex(rng)).collect();
        let n = matcore::vector_norm(&v);
        if n > 1e-12 {
            return v.into_iter().map(|z| z / n).collect();
        }
    }
}

/// Hilbert-Schmidt induced mixed state `G G† / tr(G G†)` with `G` a `d x rank` Ginibre matrix.
pub fn random_density<R: Rng + ?Sized>(d: usize, rank: usize, rng: &mut R) -> Result<DensityMatrix> {
    if d < 1 || rank < 1 || rank > d {
        return Err(Error::Domain(format!("rank {rank} for dimension {d}")));
    }
    let g = ComplexMatrix::from_fn(d, rank, |_, _| gaussian_complex(rng));
    let gg = g.matmul(&g.adjoint())?;
    let tr = gg.trace().re;
    Ok(DensityMatrix::from_parts_unchecked(gg.scale_real(1.0 / tr), vec![d]))
}

pub fn random_coherent_amplitudes<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CoherentAmplitudes {
    CoherentAmplitudes::normalized(random_pure(d, rng)).expect("random vector is nonzero")
}

/// Unitary from QR of a Ginibre matrix with the phase fix, i.e. Haar distributed.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(d, d, |_, _| gaussian_complex(rng));
    let qr = g.to_nalgebra().qr();
    let q = qr.q();
    let r = qr.r();
    let mut u = ComplexMatrix::from_nalgebra(&q);
    for c in 0..d {
        let diag = r[(c, c)];
        let phase = if diag.norm() > 0.0 { diag / diag.norm() } else { ONE };
        for row in 0..d {
            u[(row, c)] *= phase;
        }
    }
    u
}
