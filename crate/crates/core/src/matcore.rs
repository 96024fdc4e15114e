//! Dense complex linear algebra and entropy primitives.
//!
//! Matrices are stored row-major. Everything here is a pure function of its
//! inputs; eigen- and singular-value work is delegated to `nalgebra` and then
//! normalized to a deterministic ordering and phase convention.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Eigenvalues in `[-NEG_CLAMP, 0)` are treated as exact zeros.
pub const NEG_CLAMP: f64 = 1e-10;
/// Eigenvalues (and weights) below this count as outside the support.
pub const SUPPORT_TOL: f64 = 1e-12;

pub(crate) const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub(crate) const ONE: C64 = C64 { re: 1.0, im: 0.0 };

#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        ComplexMatrix { rows, cols, data }
    }

    /// Builds a matrix from row-major entries, rejecting wrong lengths and non-finite values.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::dim("matrix must have at least one row and column"));
        }
        if data.len() != rows * cols {
            return Err(Error::dim(format!("{} entries for a {rows}x{cols} matrix", data.len())));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Domain("matrix entries must be finite".into()));
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    /// `|v⟩⟨v|`
    pub fn outer(v: &[C64]) -> Self {
        Self::from_fn(v.len(), v.len(), |r, c| v[r] * v[c].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn row(&self, r: usize) -> &[C64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<C64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn scale(&self, s: C64) -> Self {
        ComplexMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// max |A - A†| entrywise.
    pub fn hermiticity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut worst: f64 = 0.0;
        for r in 0..n {
            for c in r..n {
                worst = worst.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        worst
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::dim(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a == ZERO {
                    continue;
                }
                let rhs_row = rhs.row(k);
                let out_row = &mut out.data[r * rhs.cols..(r + 1) * rhs.cols];
                for (o, b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.cols {
            return Err(Error::dim(format!("vector of length {} against {} columns", v.len(), self.cols)));
        }
        Ok((0..self.rows).map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum()).collect())
    }

    /// `A X A†`
    pub fn conjugate(&self, x: &Self) -> Result<Self> {
        self.matmul(x)?.matmul(&self.adjoint())
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.is_square()
            && self.adjoint().matmul(self).map(|p| p.max_abs_diff(&Self::identity(self.rows)) <= tol).unwrap_or(false)
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub(crate) fn from_nalgebra(m: &DMatrix<C64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)])
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.cols + c]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("matrix product dimension mismatch")
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(r) {
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Spectrum of a Hermitian matrix, eigenvalues descending.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub values: Vec<f64>,
    /// Columns are eigenvectors; first non-negligible component is real positive.
    pub vectors: ComplexMatrix,
}

pub fn hermitian_eig(a: &ComplexMatrix) -> Result<HermitianEig> {
    if !a.is_square() {
        return Err(Error::dim("eigendecomposition of a non-square matrix"));
    }
    // symmetrize to kill round-off asymmetry before handing to the solver
    let herm = ComplexMatrix::from_fn(a.rows, a.cols, |r, c| (a[(r, c)] + a[(c, r)].conj()) * 0.5);
    let eig = herm.to_nalgebra().symmetric_eigen();
    let n = a.rows;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]).then(i.cmp(&j)));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let col: Vec<C64> = (0..n).map(|r| eig.eigenvectors[(r, src)]).collect();
        let phase = col.iter().find(|z| z.norm() > 1e-12).map(|z| z.conj() / z.norm()).unwrap_or(ONE);
        for (r, z) in col.iter().enumerate() {
            vectors[(r, dst)] = z * phase;
        }
    }
    Ok(HermitianEig { values, vectors })
}

pub fn hermitian_eigenvalues(a: &ComplexMatrix) -> Result<Vec<f64>> {
    if !a.is_square() {
        return Err(Error::dim("eigenvalues of a non-square matrix"));
    }
    let herm = ComplexMatrix::from_fn(a.rows, a.cols, |r, c| (a[(r, c)] + a[(c, r)].conj()) * 0.5);
    let mut vals: Vec<f64> = herm.to_nalgebra().symmetric_eigenvalues().iter().copied().collect();
    vals.sort_by(|x, y| y.total_cmp(x));
    Ok(vals)
}

pub fn singular_values(a: &ComplexMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = a.to_nalgebra().singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_fn(a.rows * b.rows, a.cols * b.cols, |r, c| {
        a[(r / b.rows, c / b.cols)] * b[(r % b.rows, c % b.cols)]
    })
}

pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

fn check_dims(n: usize, dims: &[usize]) -> Result<()> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::dim("subsystem dimensions must be positive"));
    }
    let total: usize = dims.iter().product();
    if total != n {
        return Err(Error::dim(format!("dims {dims:?} multiply to {total}, matrix is {n}x{n}")));
    }
    Ok(())
}

/// Splits a flat index into per-party digits (party 0 most significant).
pub fn digits(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for (slot, &d) in out.iter_mut().zip(dims).rev() {
        *slot = index % d;
        index /= d;
    }
    out
}

pub fn flat_index(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&x, &d)| acc * d + x)
}

/// Reduced matrix on the parties listed in `keep` (any order; output follows ascending party order).
pub fn partial_trace(rho: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    if !rho.is_square() {
        return Err(Error::dim("partial trace of a non-square matrix"));
    }
    check_dims(rho.rows, dims)?;
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.iter().any(|&k| k >= dims.len()) {
        return Err(Error::dim(format!("keep {keep:?} out of range for {} parties", dims.len())));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|p| !kept.contains(p)).collect();
    let kept_dims: Vec<usize> = kept.iter().map(|&k| dims[k]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&k| dims[k]).collect();
    let dk: usize = kept_dims.iter().product();
    let dt: usize = traced_dims.iter().product();

    // full index from (kept digits, traced digits)
    let compose = |kept_idx: usize, traced_idx: usize| -> usize {
        let kd = digits(kept_idx, &kept_dims);
        let td = digits(traced_idx, &traced_dims);
        let mut full = vec![0; dims.len()];
        for (p, x) in kept.iter().zip(kd) {
            full[*p] = x;
        }
        for (p, x) in traced.iter().zip(td) {
            full[*p] = x;
        }
        flat_index(&full, dims)
    };
    let table: Vec<Vec<usize>> = (0..dk).map(|i| (0..dt).map(|t| compose(i, t)).collect()).collect();

    Ok(ComplexMatrix::from_fn(dk, dk, |r, c| (0..dt).map(|t| rho[(table[r][t], table[c][t])]).sum()))
}

/// Transpose on the tensor factors listed in `parties`.
pub fn partial_transpose_parties(rho: &ComplexMatrix, dims: &[usize], parties: &[usize]) -> Result<ComplexMatrix> {
    if !rho.is_square() {
        return Err(Error::dim("partial transpose of a non-square matrix"));
    }
    check_dims(rho.rows, dims)?;
    if parties.iter().any(|&p| p >= dims.len()) {
        return Err(Error::dim(format!("party {parties:?} out of range for {} parties", dims.len())));
    }
    let n = rho.rows;
    let mut out = ComplexMatrix::zeros(n, n);
    for r in 0..n {
        let rd = digits(r, dims);
        for c in 0..n {
            let cd = digits(c, dims);
            let (mut nr, mut nc) = (rd.clone(), cd.clone());
            for &p in parties {
                nr[p] = cd[p];
                nc[p] = rd[p];
            }
            out[(flat_index(&nr, dims), flat_index(&nc, dims))] = rho[(r, c)];
        }
    }
    Ok(out)
}

pub fn partial_transpose(rho: &ComplexMatrix, dims: &[usize], party: usize) -> Result<ComplexMatrix> {
    partial_transpose_parties(rho, dims, &[party])
}

/// Sum of singular values.
pub fn trace_norm(a: &ComplexMatrix) -> Result<f64> {
    if !a.is_square() {
        return Err(Error::dim("trace norm of a non-square matrix"));
    }
    if a.hermiticity_deviation() <= 1e-12 {
        return Ok(hermitian_eigenvalues(a)?.iter().map(|v| v.abs()).sum());
    }
    Ok(singular_values(a).iter().sum())
}

/// `x log2 x` with the 0 log 0 = 0 convention.
pub(crate) fn xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}

/// Shannon entropy (bits) of a probability vector; tiny and slightly negative entries count as zero.
pub fn shannon_entropy(p: &[f64]) -> f64 {
    let s: f64 = p.iter().map(|&x| clamp_eigenvalue(x)).map(xlog2x).sum();
    (-s).max(0.0)
}

fn clamp_eigenvalue(x: f64) -> f64 {
    if x < SUPPORT_TOL {
        0.0
    } else {
        x
    }
}

/// Von Neumann entropy in bits of a (validated) density matrix.
pub fn vn_entropy(rho: &ComplexMatrix) -> f64 {
    let vals = hermitian_eigenvalues(rho).expect("density matrices are square");
    shannon_entropy(&vals)
}

/// `S(ρ‖σ)` in bits; `f64::INFINITY` when the support of ρ leaves the support of σ.
pub fn relative_entropy(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<f64> {
    if rho.rows != sigma.rows || !rho.is_square() || !sigma.is_square() {
        return Err(Error::dim(format!(
            "relative entropy between {}x{} and {}x{}",
            rho.rows, rho.cols, sigma.rows, sigma.cols
        )));
    }
    let neg_entropy: f64 = hermitian_eigenvalues(rho)?.into_iter().map(clamp_eigenvalue).map(xlog2x).sum();
    let eig = hermitian_eig(sigma)?;
    let mut cross = 0.0;
    for (k, &lam) in eig.values.iter().enumerate() {
        let v = eig.vectors.column(k);
        let rv = rho.apply(&v)?;
        let weight: f64 = v.iter().zip(&rv).map(|(a, b)| (a.conj() * b).re).sum();
        if lam < SUPPORT_TOL {
            if weight > SUPPORT_TOL {
                return Ok(f64::INFINITY);
            }
            continue;
        }
        cross += weight * lam.log2();
    }
    Ok((neg_entropy - cross).max(0.0))
}

/// `h(x) = -x log2 x - (1-x) log2 (1-x)`.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(-SUPPORT_TOL..=1.0 + SUPPORT_TOL).contains(&x) || x.is_nan() {
        return Err(Error::Domain(format!("binary entropy argument {x} outside [0, 1]")));
    }
    Ok(h(x))
}

/// Clamping binary entropy for arguments known to be in range.
pub(crate) fn h(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    -(xlog2x(x) + xlog2x(1.0 - x))
}

/// `h((1 + sqrt(1 - x^2)) / 2)` evaluated through the small branch so tiny `x` keeps precision.
pub(crate) fn h_of_sqrt_form(x: f64) -> f64 {
    let x2 = (x * x).clamp(0.0, 1.0);
    let small = x2 / (2.0 * (1.0 + (1.0 - x2).sqrt()));
    h(small)
}

#[derive(Debug, Clone)]
pub struct SchmidtForm {
    /// Descending, non-negative.
    pub coefficients: Vec<f64>,
    /// Columns `u_i` on the first factor.
    pub left_basis: ComplexMatrix,
    /// Columns `v_i` on the second factor, so that `ψ = Σ s_i u_i ⊗ v_i`.
    pub right_basis: ComplexMatrix,
}

impl SchmidtForm {
    pub fn rank(&self, tol: f64) -> usize {
        self.coefficients.iter().filter(|&&s| s > tol).count()
    }

    pub fn reconstruct(&self) -> Vec<C64> {
        let da = self.left_basis.rows();
        let db = self.right_basis.rows();
        let mut psi = vec![ZERO; da * db];
        for (k, &s) in self.coefficients.iter().enumerate() {
            for i in 0..da {
                let u = self.left_basis[(i, k)] * s;
                for j in 0..db {
                    psi[i * db + j] += u * self.right_basis[(j, k)];
                }
            }
        }
        psi
    }
}

pub fn vector_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn check_normalized(v: &[C64]) -> Result<()> {
    let norm = vector_norm(v);
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::Normalization { norm });
    }
    Ok(())
}

pub fn schmidt(psi: &[C64], d_a: usize, d_b: usize) -> Result<SchmidtForm> {
    if d_a == 0 || d_b == 0 || d_a * d_b != psi.len() {
        return Err(Error::dim(format!("vector of length {} cannot be split as {d_a}x{d_b}", psi.len())));
    }
    check_normalized(psi)?;
    let m = DMatrix::from_row_slice(d_a, d_b, psi);
    let svd = m.svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V^T");
    let k = d_a.min(d_b);
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]).then(i.cmp(&j)));
    let coefficients = order.iter().map(|&i| svd.singular_values[i].max(0.0)).collect();
    let left_basis = ComplexMatrix::from_fn(d_a, k, |r, c| u[(r, order[c])]);
    // ψ_ij = Σ_k U_ik s_k (V†)_kj, so the right vector is row k of V†
    let right_basis = ComplexMatrix::from_fn(d_b, k, |r, c| v_t[(order[c], r)]);
    Ok(SchmidtForm { coefficients, left_basis, right_basis })
}

/// Reshapes `ψ` so the parties in `left` come first, returning the `d_L x d_R` split.
pub(crate) fn regroup_vector(psi: &[C64], dims: &[usize], left: &[usize]) -> (Vec<C64>, usize, usize) {
    let right: Vec<usize> = (0..dims.len()).filter(|p| !left.contains(p)).collect();
    let order: Vec<usize> = left.iter().chain(&right).copied().collect();
    let new_dims: Vec<usize> = order.iter().map(|&p| dims[p]).collect();
    let mut out = vec![ZERO; psi.len()];
    for (idx, amp) in psi.iter().enumerate() {
        let d = digits(idx, dims);
        let nd: Vec<usize> = order.iter().map(|&p| d[p]).collect();
        out[flat_index(&nd, &new_dims)] = *amp;
    }
    let dl = left.iter().map(|&p| dims[p]).product();
    let dr = right.iter().map(|&p| dims[p]).product();
    (out, dl, dr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn bell() -> ComplexMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        ComplexMatrix::outer(&[c(s), ZERO, ZERO, c(s)])
    }

    #[test]
    fn kron_identity_and_projectors() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), ComplexMatrix::identity(4));
        let p0 = ComplexMatrix::from_real_diagonal(&[1.0, 0.0]);
        let p1 = ComplexMatrix::from_real_diagonal(&[0.0, 1.0]);
        let k = kron(&p0, &p1);
        for r in 0..4 {
            for cc in 0..4 {
                let want = if (r, cc) == (1, 1) { 1.0 } else { 0.0 };
                assert_eq!(k[(r, cc)], c(want));
            }
        }
    }

    #[test]
    fn zz_commutes_with_ghz() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut v = vec![ZERO; 8];
        v[0] = c(s);
        v[7] = c(s);
        let ghz = ComplexMatrix::outer(&v);
        let z = ComplexMatrix::from_real_diagonal(&[1.0, -1.0]);
        let zz = kron(&kron(&z, &z), &ComplexMatrix::identity(2));
        let comm = &(&zz * &ghz) - &(&ghz * &zz);
        assert!(comm.frobenius_norm() < 1e-15);
    }

    #[test]
    fn partial_trace_examples() {
        let red = partial_trace(&bell(), &[2, 2], &[0]).unwrap();
        assert!(red.max_abs_diff(&ComplexMatrix::identity(2).scale_real(0.5)) < 1e-15);

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut v = vec![ZERO; 8];
        v[0] = c(s);
        v[7] = c(s);
        let ghz = ComplexMatrix::outer(&v);
        let a = partial_trace(&ghz, &[2, 2, 2], &[0]).unwrap();
        assert!(a.max_abs_diff(&ComplexMatrix::from_real_diagonal(&[0.5, 0.5])) < 1e-15);
    }

    #[test]
    fn partial_trace_of_mcs_matches_double_sum() {
        // ρ = Σ ρ_mn |mmm⟩⟨nnn| with generic ρ_01; direct oracle for Tr_C
        let amps = [c(0.8), C64::new(0.0, 0.6)];
        let mut v = vec![ZERO; 8];
        v[0] = amps[0];
        v[7] = amps[1];
        let rho = ComplexMatrix::outer(&v);
        let got = partial_trace(&rho, &[2, 2, 2], &[0, 1]).unwrap();
        let mut want = ComplexMatrix::zeros(4, 4);
        for r in 0..4 {
            for cc in 0..4 {
                for t in 0..2 {
                    want[(r, cc)] += rho[(r * 2 + t, cc * 2 + t)];
                }
            }
        }
        assert!(got.max_abs_diff(&want) < 1e-15);
        // the coherence between |00⟩ and |11⟩ does not survive
        assert_eq!(got[(0, 3)], ZERO);
        assert_abs_diff_eq!(got[(0, 0)].re, 0.64, epsilon = 1e-15);
        assert_abs_diff_eq!(got[(3, 3)].re, 0.36, epsilon = 1e-15);
    }

    #[test]
    fn partial_trace_rejects_bad_dims() {
        assert!(matches!(partial_trace(&bell(), &[2, 3], &[0]), Err(Error::Dimension(_))));
        assert!(matches!(partial_trace(&bell(), &[2, 2], &[5]), Err(Error::Dimension(_))));
    }

    #[test]
    fn bell_partial_transpose_spectrum() {
        let pt = partial_transpose(&bell(), &[2, 2], 0).unwrap();
        let vals = hermitian_eigenvalues(&pt).unwrap();
        let want = [0.5, 0.5, 0.5, -0.5];
        for (v, w) in vals.iter().zip(want) {
            assert_abs_diff_eq!(*v, w, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(trace_norm(&pt).unwrap(), 2.0, epsilon = 1e-12);
        assert_eq!(partial_transpose(&pt, &[2, 2], 0).unwrap(), bell());
    }

    #[test]
    fn trace_norm_basics() {
        assert_abs_diff_eq!(trace_norm(&ComplexMatrix::identity(4)).unwrap(), 4.0, epsilon = 1e-12);
        assert!(trace_norm(&ComplexMatrix::zeros(2, 3)).is_err());
        // non-Hermitian path
        let m = ComplexMatrix::from_row_major(2, 2, vec![ZERO, c(3.0), ZERO, ZERO]).unwrap();
        assert_abs_diff_eq!(trace_norm(&m).unwrap(), 3.0, epsilon = 1e-12);
    }

    #[test]
    fn entropy_values() {
        assert_abs_diff_eq!(vn_entropy(&ComplexMatrix::from_real_diagonal(&[1.0, 0.0])), 0.0);
        assert_abs_diff_eq!(vn_entropy(&ComplexMatrix::from_real_diagonal(&[0.5, 0.5])), 1.0, epsilon = 1e-14);
        let want = -(0.25f64 * 0.25f64.log2() + 0.75 * 0.75f64.log2());
        assert_abs_diff_eq!(vn_entropy(&ComplexMatrix::from_real_diagonal(&[0.25, 0.75])), want, epsilon = 1e-14);
        assert_abs_diff_eq!(want, 0.811278, epsilon = 1e-6);
    }

    #[test]
    fn relative_entropy_values() {
        let plus = ComplexMatrix::from_fn(2, 2, |_, _| c(0.5));
        let mixed = ComplexMatrix::identity(2).scale_real(0.5);
        assert_abs_diff_eq!(relative_entropy(&plus, &plus).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(relative_entropy(&plus, &mixed).unwrap(), 1.0, epsilon = 1e-12);
        let p0 = ComplexMatrix::from_real_diagonal(&[1.0, 0.0]);
        let p1 = ComplexMatrix::from_real_diagonal(&[0.0, 1.0]);
        assert_eq!(relative_entropy(&p0, &p1).unwrap(), f64::INFINITY);
        assert!(relative_entropy(&p0, &ComplexMatrix::identity(4)).is_err());
    }

    #[test]
    fn binary_entropy_values() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        let x: f64 = 0.11;
        let direct = -x * x.log2() - (1.0 - x) * (1.0 - x).log2();
        assert_abs_diff_eq!(binary_entropy(0.11).unwrap(), direct, epsilon = 1e-15);
        assert_abs_diff_eq!(direct, 0.499916, epsilon = 1e-6);
        assert!(binary_entropy(1.0 + 1e-13).is_ok());
        assert!(matches!(binary_entropy(-0.1), Err(Error::Domain(_))));
        assert!(binary_entropy(f64::NAN).is_err());
    }

    #[test]
    fn sqrt_form_matches_direct() {
        for &x in &[0.0f64, 0.1, 0.5, 0.8, 0.99, 1.0] {
            let direct = h((1.0 + (1.0 - x * x).sqrt()) / 2.0);
            assert_abs_diff_eq!(h_of_sqrt_form(x), direct, epsilon = 1e-12);
        }
        assert!(h_of_sqrt_form(1e-9) > 0.0);
    }

    #[test]
    fn schmidt_examples() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let f = schmidt(&[c(s), ZERO, ZERO, c(s)], 2, 2).unwrap();
        assert_abs_diff_eq!(f.coefficients[0], s, epsilon = 1e-12);
        assert_abs_diff_eq!(f.coefficients[1], s, epsilon = 1e-12);

        let f = schmidt(&[ZERO, c(1.0), ZERO, ZERO], 2, 2).unwrap();
        assert_abs_diff_eq!(f.coefficients[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(f.coefficients[1], 0.0, epsilon = 1e-12);

        let psi = [c(0.8), ZERO, ZERO, c(0.6)];
        let f = schmidt(&psi, 2, 2).unwrap();
        assert_abs_diff_eq!(f.coefficients[0], 0.8, epsilon = 1e-12);
        assert_abs_diff_eq!(f.coefficients[1], 0.6, epsilon = 1e-12);
        let back = f.reconstruct();
        for (a, b) in back.iter().zip(&psi) {
            assert!((a - b).norm() < 1e-12);
        }

        assert!(matches!(schmidt(&[c(1.0), c(1.0), ZERO, ZERO], 2, 2), Err(Error::Normalization { .. })));
        assert!(schmidt(&[c(1.0), ZERO, ZERO], 2, 2).is_err());
    }

    #[test]
    fn eig_phase_convention_is_deterministic() {
        let m =
            ComplexMatrix::from_row_major(2, 2, vec![c(0.5), C64::new(0.0, 0.5), C64::new(0.0, -0.5), c(0.5)]).unwrap();
        let e1 = hermitian_eig(&m).unwrap();
        let e2 = hermitian_eig(&m).unwrap();
        assert_eq!(e1.values, e2.values);
        assert_eq!(e1.vectors, e2.vectors);
        assert!(e1.vectors.is_unitary(1e-10));
        for k in 0..2 {
            let first = e1.vectors.column(k).into_iter().find(|z| z.norm() > 1e-12).unwrap();
            assert!(first.im.abs() < 1e-14 && first.re > 0.0);
        }
        assert!(e1.values[0] >= e1.values[1]);
    }

    #[test]
    fn from_row_major_rejects_nan() {
        assert!(ComplexMatrix::from_row_major(1, 1, vec![C64::new(f64::NAN, 0.0)]).is_err());
        assert!(ComplexMatrix::from_row_major(2, 2, vec![ZERO; 3]).is_err());
    }
}
