//! Dense complex linear algebra over labeled tensor-product spaces.
//!
//! Matrices are stored row-major. Every multipartite index is derived from
//! the fixed factor ordering of a [`HilbertSpace`]: the first factor is the
//! most significant digit.

use std::collections::HashSet;
use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{arg_err, pre_err, Error, Result};

pub type C64 = Complex64;

/// Largest total dimension any constructor will build.
pub const DEFAULT_DIM_CAP: usize = 1 << 14;

/// Entrywise tolerance for Hermiticity checks.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Eigenvalues at or below this are treated as exact zeros by matrix functions.
pub const SUPPORT_TOL: f64 = 1e-12;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SubsystemLabel {
    pub id: String,
    pub dim: usize,
}

impl SubsystemLabel {
    pub fn new(id: impl Into<String>, dim: usize) -> Self {
        Self { id: id.into(), dim }
    }

    pub fn qubit(id: impl Into<String>) -> Self {
        Self::new(id, 2)
    }
}

/// Ordered list of labeled tensor factors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HilbertSpace {
    factors: Vec<SubsystemLabel>,
}

impl HilbertSpace {
    pub fn new(factors: Vec<SubsystemLabel>) -> Result<Self> {
        let mut seen = HashSet::new();
        for f in &factors {
            if f.dim == 0 {
                return arg_err(format!("factor {} has dimension 0", f.id));
            }
            if !seen.insert(f.id.as_str()) {
                return arg_err(format!("duplicate factor label {}", f.id));
            }
        }
        let total = factors
            .iter()
            .try_fold(1usize, |acc, f| acc.checked_mul(f.dim))
            .unwrap_or(usize::MAX);
        if total > DEFAULT_DIM_CAP {
            return Err(Error::Capacity {
                what: "hilbert space dimension",
                requested: total,
                cap: DEFAULT_DIM_CAP,
            });
        }
        Ok(Self { factors })
    }

    /// All-qubit space with the given labels.
    pub fn qubits<S: AsRef<str>>(ids: &[S]) -> Result<Self> {
        Self::new(ids.iter().map(|s| SubsystemLabel::qubit(s.as_ref())).collect())
    }

    /// `S` followed by `n_env` qubit fragments `F1..Fn`.
    pub fn system_and_fragments(n_env: usize) -> Result<Self> {
        let mut f = vec![SubsystemLabel::qubit("S")];
        f.extend((1..=n_env).map(|i| SubsystemLabel::qubit(format!("F{i}"))));
        Self::new(f)
    }

    pub fn factors(&self) -> &[SubsystemLabel] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.dim).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.factors.iter().map(|f| f.dim).product()
    }

    pub fn ids(&self) -> Vec<&str> {
        self.factors.iter().map(|f| f.id.as_str()).collect()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.factors.iter().any(|f| f.id == id)
    }

    pub fn position(&self, id: &str) -> Result<usize> {
        self.factors
            .iter()
            .position(|f| f.id == id)
            .ok_or_else(|| Error::Argument(format!("unknown subsystem label {id}")))
    }

    /// Positions of `ids` in the order given; errors on unknown or repeated labels.
    pub fn positions<S: AsRef<str>>(&self, ids: &[S]) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(ids.len());
        for id in ids {
            let p = self.position(id.as_ref())?;
            if out.contains(&p) {
                return arg_err(format!("label {} listed twice", id.as_ref()));
            }
            out.push(p);
        }
        Ok(out)
    }

    /// Sub-space on the given positions, keeping this space's order.
    pub fn subspace(&self, positions: &[usize]) -> HilbertSpace {
        let mut sorted = positions.to_vec();
        sorted.sort_unstable();
        HilbertSpace {
            factors: sorted.iter().map(|&p| self.factors[p].clone()).collect(),
        }
    }

    pub fn dim_of(&self, positions: &[usize]) -> usize {
        positions.iter().map(|&p| self.factors[p].dim).product()
    }

    /// Space with the given factors appended (labels must stay unique).
    pub fn extend(&self, other: &HilbertSpace) -> Result<HilbertSpace> {
        let mut f = self.factors.clone();
        f.extend(other.factors.iter().cloned());
        HilbertSpace::new(f)
    }

    pub(crate) fn with_dims(&self, dims: &[usize]) -> HilbertSpace {
        HilbertSpace {
            factors: self
                .factors
                .iter()
                .zip(dims)
                .map(|(f, &d)| SubsystemLabel::new(f.id.clone(), d))
                .collect(),
        }
    }
}

impl fmt::Display for HilbertSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|l| format!("{}[{}]", l.id, l.dim))
            .collect();
        write!(f, "{}", parts.join("⊗"))
    }
}

/// Index table for splitting a multipartite index into a `targets` block
/// (digits in the order given) and the remaining factors (in space order).
///
/// `table[k * rest_dim + t]` is the full row-major index.
pub(crate) fn index_table(dims: &[usize], targets: &[usize]) -> (Vec<usize>, usize, usize) {
    let n = dims.len();
    let mut strides = vec![1usize; n];
    for i in (0..n.saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let rest: Vec<usize> = (0..n).filter(|p| !targets.contains(p)).collect();
    let target_dim: usize = targets.iter().map(|&p| dims[p]).product();
    let rest_dim: usize = rest.iter().map(|&p| dims[p]).product();

    let offsets = |positions: &[usize], count: usize| -> Vec<usize> {
        let mut offs = Vec::with_capacity(count);
        for mut idx in 0..count {
            let mut off = 0;
            for &p in positions.iter().rev() {
                off += (idx % dims[p]) * strides[p];
                idx /= dims[p];
            }
            offs.push(off);
        }
        offs
    };
    let t_off = offsets(targets, target_dim);
    let r_off = offsets(&rest, rest_dim);
    let mut table = Vec::with_capacity(target_dim * rest_dim);
    for &a in &t_off {
        for &b in &r_off {
            table.push(a + b);
        }
    }
    (table, target_dim, rest_dim)
}

/// Dense complex matrix, row-major.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|c| {
                    let z = self[(r, c)];
                    format!("{:+.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  {}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

impl CMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows * cols != data.len() {
            return arg_err(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            ));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return arg_err("matrix has non-finite entries");
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
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
        Self { rows, cols, data }
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * n + i] = C64::new(d, 0.0);
        }
        m
    }

    /// Real row-major matrix.
    pub fn from_real(rows: usize, cols: usize, values: &[f64]) -> Result<Self> {
        Self::new(rows, cols, values.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Column vector.
    pub fn column(v: &[C64]) -> Self {
        Self {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn outer(v: &[C64]) -> Self {
        let n = v.len();
        Self::from_fn(n, n, |r, c| v[r] * v[c].conj())
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

    pub fn column_vec(&self, c: usize) -> Vec<C64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn matmul(&self, other: &CMatrix) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let (n, k, m) = (self.rows, self.cols, other.cols);
        let mut out = vec![ZERO; n * m];
        for i in 0..n {
            let row = &self.data[i * k..(i + 1) * k];
            let acc = &mut out[i * m..(i + 1) * m];
            for (l, &a) in row.iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                let orow = &other.data[l * m..(l + 1) * m];
                for (o, &b) in acc.iter_mut().zip(orow) {
                    *o += a * b;
                }
            }
        }
        Self {
            rows: n,
            cols: m,
            data: out,
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn diagonal_re(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)].re).collect()
    }

    /// `max |m − m†|` entrywise.
    pub fn hermiticity_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut err = 0.0f64;
        for r in 0..n {
            for c in r..n {
                err = err.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        err
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    /// `(m + m†)/2`.
    pub fn hermitize(&self) -> Self {
        let n = self.rows;
        Self::from_fn(n, n, |r, c| (self[(r, c)] + self[(c, r)].conj()) * 0.5)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }

    /// `Σ |m_ij|²`; equals `tr ρ²` for Hermitian `ρ`.
    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub(crate) fn to_na(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub(crate) fn from_na(m: &DMatrix<C64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)])
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.cols + c]
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs)
    }
}

/// Kronecker product with the default dimension cap.
pub fn kron(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    kron_capped(a, b, DEFAULT_DIM_CAP)
}

pub fn kron_capped(a: &CMatrix, b: &CMatrix, cap: usize) -> Result<CMatrix> {
    let rows = a.rows.saturating_mul(b.rows);
    let cols = a.cols.saturating_mul(b.cols);
    if rows.max(cols) > cap {
        return Err(Error::Capacity {
            what: "kronecker product dimension",
            requested: rows.max(cols),
            cap,
        });
    }
    Ok(CMatrix::from_fn(rows, cols, |r, c| {
        a[(r / b.rows, c / b.cols)] * b[(r % b.rows, c % b.cols)]
    }))
}

/// Kronecker product of state vectors.
pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &x in a {
        for &y in b {
            out.push(x * y);
        }
    }
    out
}

/// Reduces `m` onto the `keep` factors (result ordered as in `space`).
pub fn partial_trace<S: AsRef<str>>(m: &CMatrix, space: &HilbertSpace, keep: &[S]) -> Result<CMatrix> {
    let positions = space.positions(keep)?;
    partial_trace_positions(m, space, &positions)
}

pub(crate) fn partial_trace_positions(
    m: &CMatrix,
    space: &HilbertSpace,
    keep: &[usize],
) -> Result<CMatrix> {
    if !m.is_square() || m.rows != space.total_dim() {
        return arg_err(format!(
            "matrix {}x{} does not act on {space}",
            m.rows, m.cols
        ));
    }
    let mut keep = keep.to_vec();
    keep.sort_unstable();
    if keep.len() == space.len() {
        return Ok(m.clone());
    }
    let (table, dk, dr) = index_table(&space.dims(), &keep);
    let n = m.rows;
    let mut out = CMatrix::zeros(dk, dk);
    for a in 0..dk {
        let ra = &table[a * dr..(a + 1) * dr];
        for b in 0..dk {
            let rb = &table[b * dr..(b + 1) * dr];
            let mut acc = ZERO;
            for (&i, &j) in ra.iter().zip(rb) {
                acc += m.data[i * n + j];
            }
            out.data[a * dk + b] = acc;
        }
    }
    Ok(out)
}

/// Reduced density matrix of a pure state `|ψ⟩` on the `keep` positions,
/// computed without forming `|ψ⟩⟨ψ|`.
pub(crate) fn reduce_pure(psi: &[C64], space: &HilbertSpace, keep: &[usize]) -> CMatrix {
    let mut keep = keep.to_vec();
    keep.sort_unstable();
    let (table, dk, dr) = index_table(&space.dims(), &keep);
    CMatrix::from_fn(dk, dk, |a, b| {
        let ra = &table[a * dr..(a + 1) * dr];
        let rb = &table[b * dr..(b + 1) * dr];
        ra.iter().zip(rb).map(|(&i, &j)| psi[i] * psi[j].conj()).sum()
    })
}

/// Applies `op` to the `targets` factors (digits in the given order) of the
/// row index of `m`, i.e. `(op ⊗ I) · m` up to factor permutation.
///
/// `out_target_dims` gives the target factor dimensions after the map; its
/// product must equal `op.rows()`.
pub(crate) fn apply_left(
    m: &CMatrix,
    dims: &[usize],
    targets: &[usize],
    op: &CMatrix,
    out_target_dims: &[usize],
) -> CMatrix {
    let (tab_in, din, dr) = index_table(dims, targets);
    assert_eq!(op.cols, din, "operator does not match target dimension");
    let mut dims_out = dims.to_vec();
    for (&p, &d) in targets.iter().zip(out_target_dims) {
        dims_out[p] = d;
    }
    let (tab_out, dout, dr2) = index_table(&dims_out, targets);
    debug_assert_eq!(dr, dr2);
    assert_eq!(op.rows, dout);
    let cols = m.cols;
    let mut out = CMatrix::zeros(dout * dr, cols);
    for t in 0..dr {
        for kp in 0..dout {
            let orow = tab_out[kp * dr + t];
            let dst = &mut out.data[orow * cols..(orow + 1) * cols];
            for k in 0..din {
                let w = op.data[kp * din + k];
                if w == ZERO {
                    continue;
                }
                let irow = tab_in[k * dr + t];
                let src = &m.data[irow * cols..(irow + 1) * cols];
                for (d, &s) in dst.iter_mut().zip(src) {
                    *d += w * s;
                }
            }
        }
    }
    out
}

/// `(K ⊗ I) ρ (K ⊗ I)†` with `K` acting on `targets`.
pub(crate) fn conjugate_local(
    rho: &CMatrix,
    dims: &[usize],
    targets: &[usize],
    k: &CMatrix,
    out_target_dims: &[usize],
) -> CMatrix {
    let left = apply_left(rho, dims, targets, k, out_target_dims);
    // rows of `left` now live on the output dims; columns still on the input dims
    let left_adj = left.adjoint();
    apply_left(&left_adj, dims, targets, k, out_target_dims).adjoint()
}

/// Result of a Hermitian eigendecomposition; eigenvalues ascending, eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct Eigh {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl Eigh {
    /// `V f(Λ) V†`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.values.len();
        let fv: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        let v = &self.vectors;
        let mut out = CMatrix::zeros(n, n);
        for (k, &w) in fv.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for r in 0..n {
                let a = v[(r, k)] * w;
                if a == ZERO {
                    continue;
                }
                for c in 0..n {
                    out.data[r * n + c] += a * v[(c, k)].conj();
                }
            }
        }
        out
    }
}

/// Hermitian eigendecomposition; the input is symmetrized before solving.
pub fn eigh(m: &CMatrix) -> Result<Eigh> {
    if !m.is_square() {
        return arg_err("eigh needs a square matrix");
    }
    let err = m.hermiticity_error();
    if err > HERMITIAN_TOL {
        return pre_err(format!("matrix is not Hermitian (max |m - m†| = {err:.3e})"));
    }
    Ok(eigh_unchecked(&m.hermitize()))
}

pub(crate) fn eigh_unchecked(m: &CMatrix) -> Eigh {
    let n = m.rows;
    if n == 1 {
        return Eigh {
            values: vec![m.data[0].re],
            vectors: CMatrix::identity(1),
        };
    }
    let se = nalgebra::SymmetricEigen::new(m.to_na());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let values = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| se.eigenvectors[(r, order[c])]);
    Eigh { values, vectors }
}

/// Hermitian eigenvalues only, ascending.
pub fn eigvalsh(m: &CMatrix) -> Result<Vec<f64>> {
    Ok(eigh(m)?.values)
}

pub(crate) fn eigvalsh_unchecked(m: &CMatrix) -> Vec<f64> {
    let n = m.rows;
    if n == 1 {
        return vec![m.data[0].re];
    }
    if n == 2 {
        let (a, d) = (m.data[0].re, m.data[3].re);
        let b = (m.data[1] + m.data[2].conj()) * 0.5;
        let mean = 0.5 * (a + d);
        let r = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
        return vec![mean - r, mean + r];
    }
    let mut v: Vec<f64> = m.hermitize().to_na().symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Sum of singular values.
pub fn trace_norm(m: &CMatrix) -> Result<f64> {
    if !m.is_square() {
        return arg_err("trace norm needs a square matrix");
    }
    if m.is_hermitian(HERMITIAN_TOL) {
        return Ok(eigvalsh_unchecked(m).iter().map(|l| l.abs()).sum());
    }
    Ok(singular_values(m).iter().sum())
}

pub(crate) fn singular_values(m: &CMatrix) -> Vec<f64> {
    m.to_na().singular_values().iter().copied().collect()
}

/// Square root on the support (eigenvalues ≤ [`SUPPORT_TOL`] dropped).
pub fn sqrt_psd(m: &CMatrix) -> Result<CMatrix> {
    Ok(eigh(m)?.map(|l| if l > SUPPORT_TOL { l.sqrt() } else { 0.0 }))
}

/// Pseudo-inverse square root on the support with the given cutoff.
pub fn inv_sqrt_on_support(m: &CMatrix, cutoff: f64) -> Result<CMatrix> {
    Ok(eigh(m)?.map(|l| if l > cutoff { 1.0 / l.sqrt() } else { 0.0 }))
}

fn check_density(m: &CMatrix, name: &str) -> Result<()> {
    if !m.is_square() {
        return arg_err(format!("{name} is not square"));
    }
    let tr = m.trace();
    if (tr.re - 1.0).abs() > 1e-9 || tr.im.abs() > 1e-9 {
        return pre_err(format!("{name} does not have unit trace (tr = {tr})"));
    }
    let e = eigh(m)?;
    if e.values[0] < -1e-9 {
        return pre_err(format!(
            "{name} is not positive semidefinite (min eigenvalue {:.3e})",
            e.values[0]
        ));
    }
    Ok(())
}

/// `√F(ρ,σ) = ‖√ρ √σ‖₁`.
pub fn root_fidelity(rho: &CMatrix, sigma: &CMatrix) -> Result<f64> {
    check_density(rho, "rho")?;
    check_density(sigma, "sigma")?;
    if rho.rows != sigma.rows {
        return arg_err("fidelity arguments differ in dimension");
    }
    Ok(root_fidelity_unchecked(rho, sigma))
}

pub(crate) fn root_fidelity_unchecked(rho: &CMatrix, sigma: &CMatrix) -> f64 {
    let sr = eigh_unchecked(&rho.hermitize()).map(|l| if l > SUPPORT_TOL { l.sqrt() } else { 0.0 });
    let ss = eigh_unchecked(&sigma.hermitize()).map(|l| if l > SUPPORT_TOL { l.sqrt() } else { 0.0 });
    let f: f64 = singular_values(&sr.matmul(&ss)).iter().sum();
    f.clamp(0.0, 1.0)
}

/// Clips eigenvalues in `[-tol, 0)` to zero and restores the input trace.
pub fn psd_project(m: &CMatrix, tol: f64) -> Result<CMatrix> {
    let e = eigh(m)?;
    let min = e.values.first().copied().unwrap_or(0.0);
    if min < -tol {
        return pre_err(format!("eigenvalue {min:.3e} below -{tol:.1e}"));
    }
    let h = m.hermitize();
    if min >= 0.0 {
        return Ok(h);
    }
    let tr = h.trace().re;
    let clipped = e.map(|l| l.max(0.0));
    let ctr = clipped.trace().re;
    if ctr <= 0.0 {
        return Err(Error::DegenerateInput("projection has zero trace".into()));
    }
    Ok(clipped.scale_re(tr / ctr))
}
