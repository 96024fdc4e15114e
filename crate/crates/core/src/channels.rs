//! Incoherent operations: Kraus channels, the incoherence test, the generalized
//! controlled-NOT converter, LICC measurement instruments and noise.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{digits, flat_index, hermitian_eig, kron, ComplexMatrix, C64, ONE, ZERO};
use crate::states::{validate_density, DensityMatrix};

pub const COMPLETENESS_TOL: f64 = 1e-10;
pub const INCOHERENCE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    operators: Vec<ComplexMatrix>,
    input_dims: Vec<usize>,
    output_dims: Vec<usize>,
}

impl KrausChannel {
    /// Checks operator shapes and `Σ K†K = I` within `COMPLETENESS_TOL`.
    pub fn new(operators: Vec<ComplexMatrix>, input_dims: Vec<usize>, output_dims: Vec<usize>) -> Result<Self> {
        if operators.is_empty() {
            return Err(Error::dim("a channel needs at least one Kraus operator"));
        }
        let din: usize = input_dims.iter().product();
        let dout: usize = output_dims.iter().product();
        if input_dims.is_empty() || output_dims.is_empty() || din == 0 || dout == 0 {
            return Err(Error::dim("channel dimensions must be non-empty and positive"));
        }
        for (l, k) in operators.iter().enumerate() {
            if k.rows() != dout || k.cols() != din {
                return Err(Error::dim(format!("operator {l} is {}x{}, expected {dout}x{din}", k.rows(), k.cols())));
            }
        }
        let ch = KrausChannel { operators, input_dims, output_dims };
        let dev = ch.completeness_deviation();
        if dev > COMPLETENESS_TOL {
            return Err(Error::Domain(format!("Kraus operators are not complete (max |Σ K†K - I| = {dev:.3e})")));
        }
        Ok(ch)
    }

    pub fn unitary(u: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        Self::new(vec![u], dims.clone(), dims)
    }

    pub fn identity(dims: Vec<usize>) -> Self {
        let d = dims.iter().product();
        KrausChannel { operators: vec![ComplexMatrix::identity(d)], input_dims: dims.clone(), output_dims: dims }
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn input_dims(&self) -> &[usize] {
        &self.input_dims
    }

    pub fn output_dims(&self) -> &[usize] {
        &self.output_dims
    }

    pub fn completeness_deviation(&self) -> f64 {
        let din: usize = self.input_dims.iter().product();
        let mut sum = ComplexMatrix::zeros(din, din);
        for k in &self.operators {
            sum = &sum + &k.adjoint().matmul(k).expect("shapes checked");
        }
        sum.max_abs_diff(&ComplexMatrix::identity(din))
    }

    /// Lifts a single-party channel to act on `party` of a register with `dims`.
    pub fn on_party(&self, dims: &[usize], party: usize) -> Result<Self> {
        if party >= dims.len() || self.input_dims.iter().product::<usize>() != dims[party] {
            return Err(Error::dim(format!(
                "cannot place a {:?} channel on party {party} of {dims:?}",
                self.input_dims
            )));
        }
        if self.input_dims != self.output_dims {
            return Err(Error::dim("local embedding needs a dimension-preserving channel"));
        }
        let before: usize = dims[..party].iter().product();
        let after: usize = dims[party + 1..].iter().product();
        let ops = self
            .operators
            .iter()
            .map(|k| kron(&kron(&ComplexMatrix::identity(before), k), &ComplexMatrix::identity(after)))
            .collect();
        Ok(KrausChannel { operators: ops, input_dims: dims.to_vec(), output_dims: dims.to_vec() })
    }

    /// Sequential composition: `self` first, then `next`.
    pub fn then(&self, next: &KrausChannel) -> Result<Self> {
        if self.output_dims.iter().product::<usize>() != next.input_dims.iter().product::<usize>() {
            return Err(Error::dim("composition dimension mismatch"));
        }
        let mut ops = Vec::with_capacity(self.operators.len() * next.operators.len());
        for b in &next.operators {
            for a in &self.operators {
                ops.push(b.matmul(a)?);
            }
        }
        Ok(KrausChannel { operators: ops, input_dims: self.input_dims.clone(), output_dims: next.output_dims.clone() })
    }
}

/// Location of a column with two nonzero entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IncoherenceWitness {
    pub operator: usize,
    pub column: usize,
    pub rows: (usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IncoherenceVerdict {
    pub is_incoherent: bool,
    pub witness: Option<IncoherenceWitness>,
}

/// Every column of every Kraus operator may hold at most one nonzero entry.
pub fn is_incoherent_kraus(ch: &KrausChannel) -> IncoherenceVerdict {
    for (l, k) in ch.operators.iter().enumerate() {
        for c in 0..k.cols() {
            let mut first = None;
            for r in 0..k.rows() {
                if k[(r, c)].norm() > INCOHERENCE_TOL {
                    match first {
                        None => first = Some(r),
                        Some(r0) => {
                            return IncoherenceVerdict {
                                is_incoherent: false,
                                witness: Some(IncoherenceWitness { operator: l, column: c, rows: (r0, r) }),
                            }
                        }
                    }
                }
            }
        }
    }
    IncoherenceVerdict { is_incoherent: true, witness: None }
}

/// `|i⟩|j_1⟩…|j_n⟩ → |i⟩|(i+j_1) mod d⟩…|(i+j_n) mod d⟩` on `n + 1` d-level parties.
pub fn u_mcn(d: usize, n: usize) -> Result<ComplexMatrix> {
    if d < 2 || n < 1 {
        return Err(Error::Domain(format!("u_mcn needs d >= 2 and n >= 1 (got d={d}, n={n})")));
    }
    let dims = vec![d; n + 1];
    let total = d.pow((n + 1) as u32);
    let mut u = ComplexMatrix::zeros(total, total);
    for col in 0..total {
        let mut x = digits(col, &dims);
        let i = x[0];
        for j in x.iter_mut().skip(1) {
            *j = (i + *j) % d;
        }
        u[(flat_index(&x, &dims), col)] = ONE;
    }
    Ok(u)
}

/// `Λ(ρ) = Σ K ρ K†`, revalidated.
pub fn apply_channel(ch: &KrausChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    let din: usize = ch.input_dims.iter().product();
    if rho.dim() != din {
        return Err(Error::dim(format!("channel expects dimension {din}, state has {}", rho.dim())));
    }
    let dout: usize = ch.output_dims.iter().product();
    let mut out = ComplexMatrix::zeros(dout, dout);
    for k in &ch.operators {
        out = &out + &k.conjugate(rho.matrix())?;
    }
    validate_density(out, &ch.output_dims)
}

/// Zeroes coherences between basis states that differ on any of `parties` (`None` = all parties).
pub fn dephase(rho: &DensityMatrix, parties: Option<&[usize]>) -> Result<DensityMatrix> {
    let dims = rho.dims();
    let all: Vec<usize> = (0..dims.len()).collect();
    let sel = parties.unwrap_or(&all);
    if sel.iter().any(|&p| p >= dims.len()) {
        return Err(Error::dim(format!("parties {sel:?} out of range for {dims:?}")));
    }
    let n = rho.dim();
    let labels: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            let d = digits(i, dims);
            sel.iter().map(|&p| d[p]).collect()
        })
        .collect();
    let m = ComplexMatrix::from_fn(n, n, |r, c| if labels[r] == labels[c] { rho.matrix()[(r, c)] } else { ZERO });
    Ok(DensityMatrix::from_parts_unchecked(m, dims.to_vec()))
}

/// `E(ρ) = p I/d + (1-p) ρ` on the whole register.
pub fn depolarize(rho: &DensityMatrix, p: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("depolarizing probability {p} outside [0, 1]")));
    }
    let d = rho.dim();
    let noise = ComplexMatrix::identity(d).scale_real(p / d as f64);
    let m = &rho.matrix().scale_real(1.0 - p) + &noise;
    Ok(DensityMatrix::from_parts_unchecked(m, rho.dims().to_vec()))
}

/// An incoherent measurement `{K_j = |j⟩⟨φ_j|}` with outcome-indexed incoherent corrections.
#[derive(Debug, Clone)]
pub struct MeasurementInstrument {
    pub kraus: KrausChannel,
    pub corrections: Vec<ComplexMatrix>,
}

impl MeasurementInstrument {
    pub fn outcomes(&self) -> usize {
        self.corrections.len()
    }

    pub fn dim(&self) -> usize {
        self.kraus.input_dims[0]
    }
}

/// Fourier phase table `φ_k^j = 2πjk/d`.
pub fn fourier_phases(d: usize) -> Vec<Vec<f64>> {
    (0..d).map(|j| (0..d).map(|k| 2.0 * PI * (j * k) as f64 / d as f64).collect()).collect()
}

fn is_incoherent_unitary(u: &ComplexMatrix) -> bool {
    u.is_unitary(1e-10)
        && (0..u.cols()).all(|c| {
            let nz: Vec<C64> = u.column(c).into_iter().filter(|z| z.norm() > INCOHERENCE_TOL).collect();
            nz.len() == 1 && (nz[0].norm() - 1.0).abs() < 1e-10
        })
}

/// LICC instrument with `|φ_j⟩ = d^{-1/2} Σ_k e^{iφ_k^j}|k⟩` and corrections `U_j = Σ_k e^{iφ_k^j}|k⟩⟨k|`.
///
/// `phases[j][k]` is `φ_k^j`. With `None` the Fourier table is used; for `d = 2` that is the
/// exact pair `K_0 = |0⟩⟨+|`, `K_1 = |1⟩⟨-|` with corrections `I`, `σ_z`.
pub fn licc_instrument(d: usize, phases: Option<&[Vec<f64>]>) -> Result<MeasurementInstrument> {
    if d < 2 {
        return Err(Error::Domain("instrument dimension must be at least 2".into()));
    }
    if phases.is_none() && d == 2 {
        let s = C64::new(FRAC_1_SQRT_2, 0.0);
        let k0 = ComplexMatrix::from_row_major(2, 2, vec![s, s, ZERO, ZERO])?;
        let k1 = ComplexMatrix::from_row_major(2, 2, vec![ZERO, ZERO, s, -s])?;
        let z = ComplexMatrix::from_real_diagonal(&[1.0, -1.0]);
        return Ok(MeasurementInstrument {
            kraus: KrausChannel::new(vec![k0, k1], vec![2], vec![2])?,
            corrections: vec![ComplexMatrix::identity(2), z],
        });
    }
    let owned;
    let table = match phases {
        Some(t) => t,
        None => {
            owned = fourier_phases(d);
            &owned
        }
    };
    if table.len() != d || table.iter().any(|row| row.len() != d) {
        return Err(Error::dim(format!("phase table must be {d}x{d}")));
    }
    let norm = 1.0 / (d as f64).sqrt();
    let vectors: Vec<Vec<C64>> =
        table.iter().map(|row| row.iter().map(|&phi| C64::from_polar(norm, phi)).collect()).collect();
    let mut max_overlap: f64 = 0.0;
    for i in 0..d {
        for j in (i + 1)..d {
            let ov: C64 = vectors[i].iter().zip(&vectors[j]).map(|(a, b)| a.conj() * b).sum();
            max_overlap = max_overlap.max(ov.norm());
        }
    }
    if max_overlap > 1e-10 {
        return Err(Error::Orthogonality { max_overlap });
    }
    let ops = vectors
        .iter()
        .enumerate()
        .map(|(j, phi)| ComplexMatrix::from_fn(d, d, |r, c| if r == j { phi[c].conj() } else { ZERO }))
        .collect();
    let corrections: Vec<ComplexMatrix> = table
        .iter()
        .map(|row| {
            let mut u = ComplexMatrix::zeros(d, d);
            for (k, &phi) in row.iter().enumerate() {
                u[(k, k)] = C64::from_polar(1.0, phi);
            }
            u
        })
        .collect();
    debug_assert!(corrections.iter().all(is_incoherent_unitary));
    Ok(MeasurementInstrument { kraus: KrausChannel::new(ops, vec![d], vec![d])?, corrections })
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Random incoherent unitary: permutation times diagonal phases.
pub fn random_incoherent_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let mut perm: Vec<usize> = (0..d).collect();
    for i in (1..d).rev() {
        let j = rng.random_range(0..=i);
        perm.swap(i, j);
    }
    let mut u = ComplexMatrix::zeros(d, d);
    for (c, &r) in perm.iter().enumerate() {
        u[(r, c)] = C64::from_polar(1.0, rng.random_range(0.0..2.0 * PI));
    }
    u
}

const COMPLETION_ATTEMPTS: usize = 8;

/// Random incoherent channel on a `d_in`-dimensional register.
///
/// `n_ops = 1` gives an incoherent unitary. Otherwise `n_ops` operators are drawn with a uniform
/// random column-target map and Ginibre amplitudes, rescaled so `Σ K†K ≤ I`, and the remainder
/// is completed with rank-one measure-and-prepare operators `√μ |t⟩⟨v|`, which are incoherent.
pub fn random_incoherent_channel<R: Rng + ?Sized>(d_in: usize, n_ops: usize, rng: &mut R) -> Result<KrausChannel> {
    if n_ops < 1 || d_in < 1 {
        return Err(Error::Domain(format!("random incoherent channel with d={d_in}, n_ops={n_ops}")));
    }
    if n_ops == 1 {
        return KrausChannel::unitary(random_incoherent_unitary(d_in, rng), vec![d_in]);
    }
    for _ in 0..COMPLETION_ATTEMPTS {
        let mut ops: Vec<ComplexMatrix> = (0..n_ops)
            .map(|_| {
                let mut k = ComplexMatrix::zeros(d_in, d_in);
                for c in 0..d_in {
                    k[(rng.random_range(0..d_in), c)] = gaussian(rng);
                }
                k
            })
            .collect();
        let mut sum = ComplexMatrix::zeros(d_in, d_in);
        for k in &ops {
            sum = &sum + &k.adjoint().matmul(k)?;
        }
        let eig = hermitian_eig(&sum)?;
        let top = eig.values[0];
        if top.is_nan() || top <= 1e-12 {
            continue;
        }
        // random headroom left for the completion operators
        let scale = rng.random_range(0.5..1.0) / top;
        for k in ops.iter_mut() {
            *k = k.scale_real(scale.sqrt());
        }
        let rest = &ComplexMatrix::identity(d_in) - &sum.scale_real(scale);
        let rest_eig = hermitian_eig(&rest)?;
        for (idx, &mu) in rest_eig.values.iter().enumerate() {
            if mu <= 1e-15 {
                continue;
            }
            let v = rest_eig.vectors.column(idx);
            let t = rng.random_range(0..d_in);
            let amp = mu.sqrt();
            ops.push(ComplexMatrix::from_fn(d_in, d_in, |r, c| if r == t { v[c].conj() * amp } else { ZERO }));
        }
        if let Ok(ch) = KrausChannel::new(ops, vec![d_in], vec![d_in]) {
            debug_assert!(is_incoherent_kraus(&ch).is_incoherent);
            return Ok(ch);
        }
    }
    Err(Error::Completion { attempts: COMPLETION_ATTEMPTS })
}
