//! Dense complex matrix kernel.
//!
//! Operators are stored as column-major [`DMatrix<C64>`] behind
//! [`DenseOperator`], which additionally carries a role tag. Products go
//! through the `zgemm` kernel of `matrixmultiply`; eigendecompositions and
//! SVDs come from `nalgebra`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use matrixmultiply::CGemmOption;
use nalgebra::{DMatrix, SymmetricEigen};
pub use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

/// What a [`DenseOperator`] is known to be.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorTag {
    General,
    Hermitian,
    Unitary,
}

/// A square complex matrix together with its role tag.
///
/// Hermitian and unitary tags are only attached after the corresponding
/// residual has been checked against [`Tolerances::DEFAULT`].
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    mat: DMatrix<C64>,
    tag: OperatorTag,
}

impl DenseOperator {
    /// Wraps a square matrix with the `General` tag.
    pub fn new(mat: DMatrix<C64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::Shape(format!(
                "operator must be square, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        check_dim(mat.nrows())?;
        Ok(Self {
            mat,
            tag: OperatorTag::General,
        })
    }

    /// Wraps a matrix and checks Hermiticity.
    pub fn hermitian(mat: DMatrix<C64>) -> Result<Self> {
        let mut op = Self::new(mat)?;
        let residual = op.hermiticity_residual();
        if residual >= Tolerances::DEFAULT.hermitian {
            return Err(Error::Tag {
                expected: "hermitian",
                residual,
            });
        }
        op.tag = OperatorTag::Hermitian;
        Ok(op)
    }

    /// Wraps a matrix and checks unitarity.
    pub fn unitary(mat: DMatrix<C64>) -> Result<Self> {
        let mut op = Self::new(mat)?;
        let residual = op.unitarity_residual();
        if residual >= Tolerances::DEFAULT.unitary {
            return Err(Error::Tag {
                expected: "unitary",
                residual,
            });
        }
        op.tag = OperatorTag::Unitary;
        Ok(op)
    }

    /// Re-tags an operator as Hermitian after checking it.
    pub fn into_hermitian(self) -> Result<Self> {
        Self::hermitian(self.mat)
    }

    /// Re-tags an operator as unitary after checking it.
    pub fn into_unitary(self) -> Result<Self> {
        Self::unitary(self.mat)
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            mat: DMatrix::identity(dim, dim),
            tag: OperatorTag::Unitary,
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            mat: DMatrix::zeros(dim, dim),
            tag: OperatorTag::General,
        }
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self {
            mat: DMatrix::from_fn(dim, dim, f),
            tag: OperatorTag::General,
        }
    }

    /// Builds an operator from row-major entries.
    pub fn from_row_major(dim: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::Shape(format!(
                "expected {} entries, got {}",
                dim * dim,
                entries.len()
            )));
        }
        Self::new(DMatrix::from_row_slice(dim, dim, entries))
    }

    /// Builds an operator from real row-major entries.
    pub fn from_real_rows(dim: usize, entries: &[f64]) -> Result<Self> {
        let c: Vec<C64> = entries.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::from_row_major(dim, &c)
    }

    pub fn diagonal(diag: &[C64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, |r, c| if r == c { diag[r] } else { C64::new(0.0, 0.0) })
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn tag(&self) -> OperatorTag {
        self.tag
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.mat
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.mat[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        Self {
            mat: self.mat.adjoint(),
            tag: self.tag,
        }
    }

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &DenseOperator) -> DenseOperator {
        let tag = if self.tag == OperatorTag::Unitary && rhs.tag == OperatorTag::Unitary {
            OperatorTag::Unitary
        } else {
            OperatorTag::General
        };
        Self {
            mat: gemm(&self.mat, Op::N, &rhs.mat, Op::N),
            tag,
        }
    }

    pub fn add(&self, rhs: &DenseOperator) -> DenseOperator {
        let tag = if self.tag == OperatorTag::Hermitian && rhs.tag == OperatorTag::Hermitian {
            OperatorTag::Hermitian
        } else {
            OperatorTag::General
        };
        Self {
            mat: &self.mat + &rhs.mat,
            tag,
        }
    }

    pub fn sub(&self, rhs: &DenseOperator) -> DenseOperator {
        let tag = if self.tag == OperatorTag::Hermitian && rhs.tag == OperatorTag::Hermitian {
            OperatorTag::Hermitian
        } else {
            OperatorTag::General
        };
        Self {
            mat: &self.mat - &rhs.mat,
            tag,
        }
    }

    pub fn scale(&self, s: C64) -> DenseOperator {
        let tag = if self.tag == OperatorTag::Hermitian && s.im == 0.0 {
            OperatorTag::Hermitian
        } else {
            OperatorTag::General
        };
        Self {
            mat: &self.mat * s,
            tag,
        }
    }

    pub fn scale_real(&self, s: f64) -> DenseOperator {
        self.scale(C64::new(s, 0.0))
    }

    /// `U X U†` with `self` as `X`.
    pub fn conjugate_by(&self, u: &DenseOperator) -> DenseOperator {
        let ux = gemm(&u.mat, Op::N, &self.mat, Op::N);
        let mat = gemm(&ux, Op::N, &u.mat, Op::H);
        let tag = if u.tag == OperatorTag::Unitary {
            self.tag
        } else {
            OperatorTag::General
        };
        Self { mat, tag }
    }

    /// `[self, rhs]`.
    pub fn commutator(&self, rhs: &DenseOperator) -> DenseOperator {
        let ab = gemm(&self.mat, Op::N, &rhs.mat, Op::N);
        let ba = gemm(&rhs.mat, Op::N, &self.mat, Op::N);
        Self {
            mat: ab - ba,
            tag: OperatorTag::General,
        }
    }

    /// Hilbert-Schmidt 2-norm squared, `Tr(A†A)`.
    pub fn norm_sq(&self) -> f64 {
        self.mat.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.norm_sq())
    }

    pub fn max_abs_diff(&self, other: &DenseOperator) -> f64 {
        self.mat
            .iter()
            .zip(other.mat.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.mat.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Entrywise `max |A - A†|`.
    pub fn hermiticity_residual(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for c in 0..n {
            for r in 0..=c {
                let d = (self.mat[(r, c)] - self.mat[(c, r)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Entrywise `max |A A† - 1|`.
    pub fn unitarity_residual(&self) -> f64 {
        let prod = gemm(&self.mat, Op::N, &self.mat, Op::H);
        max_identity_deviation(&prod)
    }

    /// True when every entry is real (to the last bit).
    pub fn is_real(&self) -> bool {
        self.mat.iter().all(|z| z.im == 0.0)
    }
}

pub(crate) fn check_dim(dim: usize) -> Result<()> {
    let max = Tolerances::DEFAULT.max_dim;
    if dim > max {
        return Err(Error::Size { dim, max });
    }
    Ok(())
}

pub(crate) fn max_identity_deviation(m: &DMatrix<C64>) -> f64 {
    let mut worst = 0.0f64;
    for c in 0..m.ncols() {
        for r in 0..m.nrows() {
            let target = if r == c { 1.0 } else { 0.0 };
            worst = worst.max((m[(r, c)] - C64::new(target, 0.0)).norm());
        }
    }
    worst
}

/// Whether an operand enters a product as is or conjugate-transposed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    N,
    H,
}

/// `op(a) * op(b)` for column-major complex matrices of any shape.
pub fn gemm(a: &DMatrix<C64>, opa: Op, b: &DMatrix<C64>, opb: Op) -> DMatrix<C64> {
    // The kernel has no conjugation flag: adjoints are a conjugated copy
    // read with transposed strides.
    let ca;
    let (a, m, k, rsa, csa) = match opa {
        Op::N => (a, a.nrows(), a.ncols(), 1, a.nrows() as isize),
        Op::H => {
            ca = a.conjugate();
            (&ca, a.ncols(), a.nrows(), a.nrows() as isize, 1)
        }
    };
    let cb;
    let (b, kb, n, rsb, csb) = match opb {
        Op::N => (b, b.nrows(), b.ncols(), 1, b.nrows() as isize),
        Op::H => {
            cb = b.conjugate();
            (&cb, b.ncols(), b.nrows(), b.nrows() as isize, 1)
        }
    };
    assert_eq!(k, kb, "inner dimensions differ");
    let mut c = DMatrix::<C64>::zeros(m, n);
    if m == 0 || n == 0 || k == 0 {
        return c;
    }
    // SAFETY: `Complex<f64>` is `repr(C)` with layout `[f64; 2]`; the
    // pointers and strides describe exactly the storage of `a`, `b` and `c`,
    // and `c` does not alias the inputs.
    unsafe {
        matrixmultiply::zgemm(
            CGemmOption::Standard,
            CGemmOption::Standard,
            m,
            k,
            n,
            [1.0, 0.0],
            a.as_ptr() as *const [f64; 2],
            rsa,
            csa,
            b.as_ptr() as *const [f64; 2],
            rsb,
            csb,
            [0.0, 0.0],
            c.as_mut_ptr() as *mut [f64; 2],
            1,
            m as isize,
        );
    }
    c
}

/// Eigenvalues (ascending) and eigenvectors (columns) of a Hermitian operator.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    pub vectors: DMatrix<C64>,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `V diag(λ) V†`.
    pub fn reconstruct(&self) -> DenseOperator {
        let diag: Vec<C64> = self.values.iter().map(|&l| C64::new(l, 0.0)).collect();
        let scaled = scale_columns(&self.vectors, &diag);
        DenseOperator {
            mat: gemm(&scaled, Op::N, &self.vectors, Op::H),
            tag: OperatorTag::General,
        }
    }

    /// `max |V V† - 1|`.
    pub fn orthonormality_residual(&self) -> f64 {
        max_identity_deviation(&gemm(&self.vectors, Op::N, &self.vectors, Op::H))
    }

    /// Rotates an operator into the eigenbasis: `V† X V`.
    pub fn to_eigenbasis(&self, x: &DenseOperator) -> DMatrix<C64> {
        let xv = gemm(&x.mat, Op::N, &self.vectors, Op::N);
        gemm(&self.vectors, Op::H, &xv, Op::N)
    }
}

fn scale_columns(m: &DMatrix<C64>, s: &[C64]) -> DMatrix<C64> {
    let mut out = m.clone();
    for (c, &f) in s.iter().enumerate() {
        for v in out.column_mut(c).iter_mut() {
            *v *= f;
        }
    }
    out
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &DenseOperator, b: &DenseOperator) -> Result<DenseOperator> {
    let da = a.dim();
    let db = b.dim();
    let dim = da.checked_mul(db).ok_or(Error::Size {
        dim: usize::MAX,
        max: Tolerances::DEFAULT.max_dim,
    })?;
    check_dim(dim)?;
    let mat = DMatrix::from_fn(dim, dim, |r, c| {
        a.mat[(r / db, c / db)] * b.mat[(r % db, c % db)]
    });
    let tag = match (a.tag, b.tag) {
        (OperatorTag::Unitary, OperatorTag::Unitary) => OperatorTag::Unitary,
        (OperatorTag::Hermitian, OperatorTag::Hermitian) => OperatorTag::Hermitian,
        _ => OperatorTag::General,
    };
    Ok(DenseOperator { mat, tag })
}

/// Kronecker product of a list of operators, left to right.
pub fn kron_all(ops: &[DenseOperator]) -> Result<DenseOperator> {
    let mut acc = DenseOperator::identity(1);
    for op in ops {
        acc = kron(&acc, op)?;
    }
    Ok(acc)
}

/// Row-major strides of a tensor factorization: `stride[k] = Π_{l>k} dims[l]`.
pub fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// Flat offsets of every digit combination on `sites`, enumerated with the
/// first listed site most significant.
pub fn subset_offsets(dims: &[usize], sites: &[usize]) -> Vec<usize> {
    let st = strides(dims);
    let mut offs = vec![0usize];
    for &s in sites {
        let mut next = Vec::with_capacity(offs.len() * dims[s]);
        for &o in &offs {
            for a in 0..dims[s] {
                next.push(o + a * st[s]);
            }
        }
        offs = next;
    }
    offs
}

/// Sites of `0..m` not listed in `sites`, ascending.
pub fn complement(m: usize, sites: &[usize]) -> Vec<usize> {
    (0..m).filter(|s| !sites.contains(s)).collect()
}

fn validate_sites(dims: &[usize], sites: &[usize]) -> Result<()> {
    for (k, &s) in sites.iter().enumerate() {
        if s >= dims.len() {
            return Err(Error::SiteOutOfRange {
                site: s,
                sites: dims.len(),
            });
        }
        if sites[..k].contains(&s) {
            return Err(Error::Invalid(format!("site {s} listed twice")));
        }
    }
    Ok(())
}

fn check_dims_match(dims: &[usize], dim: usize) -> Result<()> {
    let prod: usize = dims.iter().product();
    if prod != dim {
        return Err(Error::Shape(format!(
            "product of dims {dims:?} is {prod}, operator has dimension {dim}"
        )));
    }
    Ok(())
}

/// Traces out every factor not in `keep`. The kept factors appear in the
/// order they are listed.
pub fn partial_trace(a: &DenseOperator, dims: &[usize], keep: &[usize]) -> Result<DenseOperator> {
    check_dims_match(dims, a.dim())?;
    validate_sites(dims, keep)?;
    let traced = complement(dims.len(), keep);
    Ok(DenseOperator {
        mat: partial_trace_raw(&a.mat, dims, keep, &traced),
        tag: match a.tag {
            OperatorTag::Hermitian => OperatorTag::Hermitian,
            _ => OperatorTag::General,
        },
    })
}

pub(crate) fn partial_trace_raw(
    a: &DMatrix<C64>,
    dims: &[usize],
    keep: &[usize],
    traced: &[usize],
) -> DMatrix<C64> {
    let kept_off = subset_offsets(dims, keep);
    let tr_off = subset_offsets(dims, traced);
    let dk = kept_off.len();
    DMatrix::from_fn(dk, dk, |kr, kc| {
        let (r0, c0) = (kept_off[kr], kept_off[kc]);
        tr_off
            .iter()
            .map(|&t| a[(r0 + t, c0 + t)])
            .fold(C64::new(0.0, 0.0), |acc, z| acc + z)
    })
}

/// `1 ⊗ … ⊗ b ⊗ … ⊗ 1` with `b` on `site`. No normalization is applied.
pub fn embed_local(b: &DenseOperator, site: usize, dims: &[usize]) -> Result<DenseOperator> {
    embed_on_sites(b, &[site], dims)
}

/// Places `op`, acting on the listed sites (first listed most significant),
/// into the full space with identity on the remaining factors.
pub fn embed_on_sites(op: &DenseOperator, sites: &[usize], dims: &[usize]) -> Result<DenseOperator> {
    validate_sites(dims, sites)?;
    let sub: usize = sites.iter().map(|&s| dims[s]).product();
    if sub != op.dim() {
        return Err(Error::Shape(format!(
            "operator dimension {} does not match sites {sites:?} of dims {dims:?}",
            op.dim()
        )));
    }
    let d: usize = dims.iter().product();
    check_dim(d)?;
    let kept_off = subset_offsets(dims, sites);
    let rest = complement(dims.len(), sites);
    let rest_off = subset_offsets(dims, &rest);
    let mut mat = DMatrix::<C64>::zeros(d, d);
    for &t in &rest_off {
        for (kc, &oc) in kept_off.iter().enumerate() {
            for (kr, &or) in kept_off.iter().enumerate() {
                mat[(or + t, oc + t)] = op.mat[(kr, kc)];
            }
        }
    }
    Ok(DenseOperator { mat, tag: op.tag })
}

/// Hermitian eigendecomposition with ascending eigenvalues.
///
/// Real symmetric inputs take a real-arithmetic path.
pub fn herm_eig(h: &DenseOperator) -> Result<EigenSystem> {
    let residual = h.hermiticity_residual();
    if h.tag != OperatorTag::Hermitian && residual >= Tolerances::DEFAULT.hermitian {
        return Err(Error::Tag {
            expected: "hermitian",
            residual,
        });
    }
    let n = h.dim();
    let max_iter = 1000 * n.max(1);
    let (values, vectors) = if h.is_real() {
        let re = h.mat.map(|z| z.re);
        let eig = SymmetricEigen::try_new(re, f64::EPSILON, max_iter).ok_or(Error::Convergence {
            residual: f64::NAN,
        })?;
        (
            eig.eigenvalues.iter().copied().collect::<Vec<_>>(),
            eig.eigenvectors.map(|x| C64::new(x, 0.0)),
        )
    } else {
        let eig = SymmetricEigen::try_new(h.mat.clone(), f64::EPSILON, max_iter).ok_or(
            Error::Convergence {
                residual: f64::NAN,
            },
        )?;
        (eig.eigenvalues.iter().copied().collect::<Vec<_>>(), eig.eigenvectors)
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let sorted_values = order.iter().map(|&k| values[k]).collect();
    let sorted_vectors = DMatrix::from_fn(n, n, |r, c| vectors[(r, order[c])]);
    let es = EigenSystem {
        values: sorted_values,
        vectors: sorted_vectors,
    };
    let ortho = es.orthonormality_residual();
    if !(ortho < Tolerances::DEFAULT.unitary) {
        return Err(Error::Convergence { residual: ortho });
    }
    Ok(es)
}

/// `U_t = V diag(e^{iλt}) V†`, i.e. `exp(iHt)`.
///
/// Real eigenvectors (real symmetric `H`) take two real products,
/// `V cos(λt) Vᵀ + i V sin(λt) Vᵀ`, at half the cost of one complex product.
pub fn propagator(es: &EigenSystem, t: f64) -> DenseOperator {
    let (sin, cos): (Vec<f64>, Vec<f64>) = es.values.iter().map(|&l| libm::sincos(l * t)).unzip();
    let mat = if es.vectors.iter().all(|z| z.im == 0.0) {
        let v = es.vectors.map(|z| z.re);
        let scaled = |f: &[f64]| {
            let mut out = v.clone();
            for (c, &x) in f.iter().enumerate() {
                out.column_mut(c).iter_mut().for_each(|e| *e *= x);
            }
            out
        };
        let re = gemm_real_nt(&scaled(&cos), &v);
        let im = gemm_real_nt(&scaled(&sin), &v);
        re.zip_map(&im, C64::new)
    } else {
        let phases: Vec<C64> = cos.iter().zip(&sin).map(|(&c, &s)| C64::new(c, s)).collect();
        gemm(&scale_columns(&es.vectors, &phases), Op::N, &es.vectors, Op::H)
    };
    DenseOperator {
        mat,
        tag: OperatorTag::Unitary,
    }
}

/// `a bᵀ` for real column-major matrices.
fn gemm_real_nt(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let (m, k, n) = (a.nrows(), a.ncols(), b.nrows());
    assert_eq!(k, b.ncols(), "inner dimensions differ");
    let mut c = DMatrix::<f64>::zeros(m, n);
    if m == 0 || n == 0 || k == 0 {
        return c;
    }
    // SAFETY: the pointers and strides describe exactly the storage of `a`,
    // `bᵀ` and `c`, and `c` does not alias the inputs.
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            1.0,
            a.as_ptr(),
            1,
            m as isize,
            b.as_ptr(),
            n as isize,
            1,
            0.0,
            c.as_mut_ptr(),
            1,
            m as isize,
        );
    }
    c
}

/// Site permutation `L|a_1…a_M⟩ = |a_{perm(1)}…a_{perm(M)}⟩`.
pub fn permutation_operator(perm: &[usize], dims: &[usize]) -> Result<DenseOperator> {
    let m = dims.len();
    if perm.len() != m {
        return Err(Error::InvalidPermutation(format!(
            "permutation of length {} for {m} sites",
            perm.len()
        )));
    }
    let mut seen = vec![false; m];
    for &p in perm {
        if p >= m || seen[p] {
            return Err(Error::InvalidPermutation(format!("{perm:?} is not a permutation")));
        }
        seen[p] = true;
    }
    for (k, &p) in perm.iter().enumerate() {
        if dims[k] != dims[p] {
            return Err(Error::InvalidPermutation(format!(
                "site {k} (dim {}) cannot take site {p} (dim {})",
                dims[k], dims[p]
            )));
        }
    }
    let d: usize = dims.iter().product();
    check_dim(d)?;
    let st = strides(dims);
    let mut mat = DMatrix::<C64>::zeros(d, d);
    let mut digits = vec![0usize; m];
    for col in 0..d {
        let mut rem = col;
        for k in 0..m {
            digits[k] = rem / st[k];
            rem %= st[k];
        }
        let row: usize = (0..m).map(|k| digits[perm[k]] * st[k]).sum();
        mat[(row, col)] = C64::new(1.0, 0.0);
    }
    Ok(DenseOperator {
        mat,
        tag: OperatorTag::Unitary,
    })
}

/// Swap `S_{ii'}` between factor `site` of `H` and its copy in `H ⊗ H`.
pub fn swap_pair(site: usize, dims: &[usize]) -> Result<DenseOperator> {
    let m = dims.len();
    if site >= m {
        return Err(Error::SiteOutOfRange { site, sites: m });
    }
    let d: usize = dims.iter().product();
    let max = Tolerances::DEFAULT.oracle_max_dim * Tolerances::DEFAULT.oracle_max_dim;
    if d * d > max {
        return Err(Error::Size { dim: d * d, max });
    }
    let doubled: Vec<usize> = dims.iter().chain(dims.iter()).copied().collect();
    let mut perm: Vec<usize> = (0..2 * m).collect();
    perm.swap(site, m + site);
    permutation_operator(&perm, &doubled)
}

/// Hilbert-Schmidt inner product `Tr(A†B)`.
pub fn hs_inner(a: &DenseOperator, b: &DenseOperator) -> C64 {
    a.mat
        .iter()
        .zip(b.mat.iter())
        .map(|(x, y)| x.conj() * y)
        .fold(C64::new(0.0, 0.0), |acc, z| acc + z)
}

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Pauli matrices, handy for builders and tests.
pub mod pauli {
    use super::{c, DenseOperator};

    pub fn x() -> DenseOperator {
        DenseOperator::from_row_major(2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)])
            .unwrap()
            .into_hermitian()
            .unwrap()
    }

    pub fn y() -> DenseOperator {
        DenseOperator::from_row_major(2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)])
            .unwrap()
            .into_hermitian()
            .unwrap()
    }

    pub fn z() -> DenseOperator {
        DenseOperator::from_row_major(2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)])
            .unwrap()
            .into_hermitian()
            .unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::randomness::{haar_unitary, SeededGenerator};
    use core::f64::consts::PI;

    fn random_matrix(d: usize, seed: u64) -> DenseOperator {
        let mut g = SeededGenerator::new(seed);
        DenseOperator::from_fn(d, |_, _| g.complex_gaussian())
    }

    fn random_hermitian(d: usize, seed: u64) -> DenseOperator {
        let a = random_matrix(d, seed);
        a.add(&a.adjoint()).scale_real(0.5).into_hermitian().unwrap()
    }

    #[test]
    fn kron_identities_and_pauli_layout() {
        let i2 = DenseOperator::identity(2);
        assert_eq!(kron(&i2, &i2).unwrap().max_abs_diff(&DenseOperator::identity(4)), 0.0);
        let xz = kron(&pauli::x(), &pauli::z()).unwrap();
        let expected = DenseOperator::from_real_rows(
            4,
            &[0., 0., 1., 0., 0., 0., 0., -1., 1., 0., 0., 0., 0., -1., 0., 0.],
        )
        .unwrap();
        assert_eq!(xz.max_abs_diff(&expected), 0.0);
    }

    #[test]
    fn kron_trace_factorizes() {
        let a = random_matrix(3, 1);
        let b = random_matrix(3, 2);
        let mut oracle = C64::new(0.0, 0.0);
        // trace of the Kronecker product by explicit index sum
        for i in 0..3 {
            for k in 0..3 {
                oracle += a.get(i, i) * b.get(k, k);
            }
        }
        let t = kron(&a, &b).unwrap().trace();
        assert!((t - oracle).norm() < 1e-12);
        assert!((t - a.trace() * b.trace()).norm() < 1e-12);
    }

    #[test]
    fn kron_rejects_oversized() {
        let big = DenseOperator::identity(300);
        assert!(matches!(kron(&big, &big), Err(Error::Size { .. })));
    }

    #[test]
    fn partial_trace_of_identity() {
        let dims = [2, 3, 2];
        let pt = partial_trace(&DenseOperator::identity(12), &dims, &[1]).unwrap();
        assert!(pt.max_abs_diff(&DenseOperator::identity(3).scale_real(4.0)) < 1e-15);
    }

    #[test]
    fn partial_trace_of_product_keeps_first_factor() {
        let rho = random_matrix(2, 3);
        let sigma = random_matrix(2, 4);
        let pt = partial_trace(&kron(&rho, &sigma).unwrap(), &[2, 2], &[0]).unwrap();
        // index-sum oracle: Σ_k (ρ⊗σ)[(i,k),(j,k)]
        let full = kron(&rho, &sigma).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let s = full.get(2 * i, 2 * j) + full.get(2 * i + 1, 2 * j + 1);
                assert!((pt.get(i, j) - s).norm() < 1e-14);
                assert!((pt.get(i, j) - sigma.trace() * rho.get(i, j)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn partial_trace_of_swap_is_identity() {
        let swap = permutation_operator(&[1, 0], &[2, 2]).unwrap();
        let pt = partial_trace(&swap, &[2, 2], &[0]).unwrap();
        assert!(pt.max_abs_diff(&DenseOperator::identity(2)) < 1e-15);
    }

    #[test]
    fn partial_trace_rejects_bad_dims() {
        let a = DenseOperator::identity(6);
        assert!(matches!(partial_trace(&a, &[2, 2], &[0]), Err(Error::Shape(_))));
        assert!(matches!(
            partial_trace(&a, &[2, 3], &[2]),
            Err(Error::SiteOutOfRange { .. })
        ));
    }

    #[test]
    fn embed_local_examples() {
        let e = embed_local(&DenseOperator::identity(2), 0, &[2, 2]).unwrap();
        assert_eq!(e.max_abs_diff(&DenseOperator::identity(4)), 0.0);
        let z2 = embed_local(&pauli::z(), 1, &[2, 2]).unwrap();
        let expected = DenseOperator::diagonal(&[c(1., 0.), c(-1., 0.), c(1., 0.), c(-1., 0.)]);
        assert_eq!(z2.max_abs_diff(&expected), 0.0);
        assert!(matches!(
            embed_local(&pauli::z(), 2, &[2, 2]),
            Err(Error::SiteOutOfRange { .. })
        ));
    }

    #[test]
    fn embedded_inner_product_scales_with_complement() {
        let dims = [2, 3];
        let a = random_matrix(3, 5);
        let b = random_matrix(3, 6);
        let ea = embed_local(&a, 1, &dims).unwrap();
        let eb = embed_local(&b, 1, &dims).unwrap();
        // kron oracle: 1_2 ⊗ a
        let ka = kron(&DenseOperator::identity(2), &a).unwrap();
        assert!(ea.max_abs_diff(&ka) < 1e-15);
        let lhs = ea.mul(&eb).trace();
        let rhs = a.mul(&b).trace() * 2.0;
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn embed_on_reordered_sites_matches_permuted_kron() {
        let dims = [2, 3, 2];
        let a = random_matrix(2, 7);
        let b = random_matrix(2, 8);
        let ab = kron(&a, &b).unwrap();
        // ab on sites (2, 0): a on site 2, b on site 0
        let e = embed_on_sites(&ab, &[2, 0], &dims).unwrap();
        let direct = kron_all(&[b.clone(), DenseOperator::identity(3), a.clone()]).unwrap();
        assert!(e.max_abs_diff(&direct) < 1e-14);
    }

    #[test]
    fn herm_eig_examples() {
        let h = DenseOperator::diagonal(&[c(3., 0.), c(1., 0.), c(2., 0.)])
            .into_hermitian()
            .unwrap();
        let es = herm_eig(&h).unwrap();
        assert_eq!(es.values, vec![1.0, 2.0, 3.0]);

        let es = herm_eig(&pauli::x()).unwrap();
        assert!((es.values[0] + 1.0).abs() < 1e-14 && (es.values[1] - 1.0).abs() < 1e-14);
        let s = 1.0 / 2f64.sqrt();
        // columns equal Hadamard columns up to a phase
        let v0 = [es.vectors[(0, 0)], es.vectors[(1, 0)]];
        let v1 = [es.vectors[(0, 1)], es.vectors[(1, 1)]];
        assert!(((v0[0].conj() * c(s, 0.) + v0[1].conj() * c(-s, 0.)).norm() - 1.0).abs() < 1e-12);
        assert!(((v1[0].conj() * c(s, 0.) + v1[1].conj() * c(s, 0.)).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn herm_eig_reconstructs_random_hermitian() {
        let h = random_hermitian(8, 11);
        let es = herm_eig(&h).unwrap();
        assert!(es.reconstruct().max_abs_diff(&h) < 1e-10);
        assert!(es.orthonormality_residual() < 1e-10);
        assert!(es.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn herm_eig_rejects_non_hermitian() {
        let a = random_matrix(4, 12);
        assert!(matches!(herm_eig(&a), Err(Error::Tag { .. })));
    }

    #[test]
    fn propagator_examples() {
        let h = random_hermitian(6, 13);
        let es = herm_eig(&h).unwrap();
        assert!(propagator(&es, 0.0).max_abs_diff(&DenseOperator::identity(6)) < 1e-12);

        let es_z = herm_eig(&pauli::z()).unwrap();
        let u = propagator(&es_z, PI);
        assert!(u.max_abs_diff(&DenseOperator::identity(2).scale_real(-1.0)) < 1e-12);

        // 20-term Taylor series of exp(iHt)
        let t = 0.1;
        let iht = h.scale(c(0.0, t));
        let mut term = DenseOperator::identity(6);
        let mut series = DenseOperator::identity(6);
        for k in 1..20 {
            term = term.mul(&iht).scale_real(1.0 / k as f64);
            series = series.add(&term);
        }
        assert!(propagator(&es, t).max_abs_diff(&series) < 1e-10);
    }

    #[test]
    fn swap_pair_traces() {
        let dims = [2, 3];
        for (i, &q) in dims.iter().enumerate() {
            let s = swap_pair(i, &dims).unwrap();
            let d = 6.0;
            assert!((s.trace() - c(d * d / q as f64, 0.0)).norm() < 1e-12);
            assert!(s.mul(&s).max_abs_diff(&DenseOperator::identity(36)) < 1e-15);
            assert!(s.max_abs_diff(&s.adjoint()) < 1e-15);
        }
        let dims = [2, 2];
        let s0 = swap_pair(0, &dims).unwrap();
        let s1 = swap_pair(1, &dims).unwrap();
        assert!((s0.mul(&s1).trace() - c(16.0 / 4.0, 0.0)).norm() < 1e-12);
        assert!(s0.mul(&s1).max_abs_diff(&s1.mul(&s0)) < 1e-15);
    }

    #[test]
    fn swap_pair_rejects_large_spaces() {
        assert!(matches!(swap_pair(0, &[2; 7]), Err(Error::Size { .. })));
    }

    #[test]
    fn hs_inner_examples() {
        let i3 = DenseOperator::identity(3);
        assert!((hs_inner(&i3, &i3) - c(3.0, 0.0)).norm() < 1e-15);
        assert!(hs_inner(&pauli::x(), &pauli::y()).norm() < 1e-15);
        let a = random_matrix(5, 14);
        let b = random_matrix(5, 15);
        let ab = hs_inner(&a, &b).norm_sqr();
        assert!(ab <= hs_inner(&a, &a).re * hs_inner(&b, &b).re);
    }

    #[test]
    fn permutation_operator_examples() {
        let id = permutation_operator(&[0, 1, 2], &[2, 3, 2]).unwrap();
        assert_eq!(id.max_abs_diff(&DenseOperator::identity(12)), 0.0);
        let swap = permutation_operator(&[1, 0], &[2, 2]).unwrap();
        let expected = DenseOperator::from_real_rows(
            4,
            &[1., 0., 0., 0., 0., 0., 1., 0., 0., 1., 0., 0., 0., 0., 0., 1.],
        )
        .unwrap();
        assert_eq!(swap.max_abs_diff(&expected), 0.0);
        let l = permutation_operator(&[2, 0, 1], &[2, 2, 2]).unwrap();
        assert!(l.unitarity_residual() < 1e-15);
        assert!(matches!(
            permutation_operator(&[1, 0], &[2, 3]),
            Err(Error::InvalidPermutation(_))
        ));
        assert!(matches!(
            permutation_operator(&[0, 0], &[2, 2]),
            Err(Error::InvalidPermutation(_))
        ));
    }

    #[test]
    fn permutation_moves_local_operators() {
        let dims = [2, 2, 2];
        let l = permutation_operator(&[2, 0, 1], &dims).unwrap();
        let z0 = embed_local(&pauli::z(), 0, &dims).unwrap();
        // output digit k carries input digit perm(k): input site 0 lands on site 1
        let moved = z0.conjugate_by(&l);
        let z1 = embed_local(&pauli::z(), 1, &dims).unwrap();
        assert!(moved.max_abs_diff(&z1) < 1e-15);
    }

    #[test]
    fn unitary_tag_is_checked() {
        let u = haar_unitary(4, &mut SeededGenerator::new(3));
        assert_eq!(u.tag(), OperatorTag::Unitary);
        assert!(DenseOperator::unitary(random_matrix(4, 4).into_matrix()).is_err());
        assert!(DenseOperator::hermitian(random_matrix(4, 4).into_matrix()).is_err());
    }
}
