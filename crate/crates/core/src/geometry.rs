//! The TPS distance Φ by three independent routes, its generalized form
//! for other algebra sets, and checks for extremal values.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    self, c, embed_local, gemm, kron_all, partial_trace, permutation_operator, DenseOperator, Op, C64,
};
use crate::scrambling;
use crate::structure::{gell_mann_basis, AlgebraSet, SiteView, TensorFactorization};
use crate::tolerance::Tolerances;

/// How a value of Φ was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Correlator,
    Man,
    Projection,
    /// A closed-form expression specific to the algebra set.
    ClosedForm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhiResult {
    pub value: f64,
    pub route: Route,
    /// `‖C_ij‖²` per pair of member algebras, when the route produces them.
    pub correlator_norms: Vec<Vec<f64>>,
    pub note: Option<String>,
}

impl PhiResult {
    fn degenerate(route: Route) -> Self {
        Self {
            value: 0.0,
            route,
            correlator_norms: Vec::new(),
            note: Some("single-factor space: W is the full operator algebra".into()),
        }
    }
}

fn check_unitary(u: &DenseOperator, d: usize) -> Result<()> {
    if u.dim() != d {
        return Err(Error::Shape(format!(
            "unitary has dimension {}, algebra set has {d}",
            u.dim()
        )));
    }
    if u.tag() != linalg::OperatorTag::Unitary {
        let residual = u.unitarity_residual();
        if residual >= Tolerances::DEFAULT.unitary {
            return Err(Error::Tag {
                expected: "unitary",
                residual,
            });
        }
    }
    Ok(())
}

fn is_degenerate(v: &SiteView<'_>) -> bool {
    v.tf.sites() == 1
}

/// Local Gell-Mann bases for every site of a factorization.
fn gell_mann_bases(tf: &TensorFactorization) -> Vec<Vec<DenseOperator>> {
    tf.dims().iter().map(|&q| gell_mann_basis(q)).collect()
}

/// Correlator blocks for all pairs of listed sites, with arbitrary
/// orthonormal traceless local bases (`bases[s]` acts on `C^{q_s}`).
fn correlator_blocks(
    tf: &TensorFactorization,
    u: &DenseOperator,
    sites: &[usize],
    bases: &[Vec<DenseOperator>],
) -> Result<Vec<Vec<DMatrix<C64>>>> {
    let d = tf.dim();
    let dims = tf.dims();
    let mut out = Vec::with_capacity(sites.len());
    for &i in sites {
        let scale_i = libm::sqrt(dims[i] as f64 / d as f64);
        let evolved: Vec<DenseOperator> = bases[i]
            .iter()
            .map(|b| Ok(embed_local(b, i, dims)?.scale_real(scale_i).conjugate_by(u)))
            .collect::<Result<_>>()?;
        let mut row = Vec::with_capacity(sites.len());
        for &j in sites {
            let scale_j = libm::sqrt(dims[j] as f64 / d as f64);
            let mut block = DMatrix::<C64>::zeros(evolved.len(), bases[j].len());
            for (a, x) in evolved.iter().enumerate() {
                let reduced = partial_trace(x, dims, &[j])?;
                for (b, p) in bases[j].iter().enumerate() {
                    block[(a, b)] = linalg::hs_inner(&reduced, p) * scale_j;
                }
            }
            row.push(block);
        }
        out.push(row);
    }
    Ok(out)
}

/// `[C_ij]_ab = ⟨U P_i^a U†, P_j^b⟩` in the Gell-Mann basis.
pub fn correlator_matrix(
    tf: &TensorFactorization,
    u: &DenseOperator,
    i: usize,
    j: usize,
) -> Result<DMatrix<f64>> {
    check_unitary(u, tf.dim())?;
    tf.check_site(i)?;
    tf.check_site(j)?;
    let mut bases: Vec<Vec<DenseOperator>> = vec![Vec::new(); tf.sites()];
    bases[i] = gell_mann_basis(tf.local_dim(i));
    bases[j] = gell_mann_basis(tf.local_dim(j));
    let dims = tf.dims();
    let d = tf.dim();
    let scale_i = libm::sqrt(dims[i] as f64 / d as f64);
    let scale_j = libm::sqrt(dims[j] as f64 / d as f64);
    let mut block = DMatrix::<f64>::zeros(bases[i].len(), bases[j].len());
    for (a, b_i) in bases[i].iter().enumerate() {
        let x = embed_local(b_i, i, dims)?.scale_real(scale_i).conjugate_by(u);
        let reduced = partial_trace(&x, dims, &[j])?;
        for (b, p) in bases[j].iter().enumerate() {
            block[(a, b)] = (linalg::hs_inner(&reduced, p) * scale_j).re;
        }
    }
    Ok(block)
}

fn phi_from_blocks(blocks: &[Vec<DMatrix<C64>>], w_dim: usize) -> PhiResult {
    let norms: Vec<Vec<f64>> = blocks
        .iter()
        .map(|row| row.iter().map(|b| b.iter().map(|z| z.norm_sqr()).sum()).collect())
        .collect();
    let total: f64 = norms.iter().flatten().sum();
    PhiResult {
        value: 1.0 - total / w_dim as f64,
        route: Route::Correlator,
        correlator_norms: norms,
        note: None,
    }
}

/// Φ from two-point correlators of the local Pauli bases.
pub fn phi_correlator(aset: &AlgebraSet, u: &DenseOperator) -> Result<PhiResult> {
    check_unitary(u, aset.dim())?;
    match aset {
        AlgebraSet::MaxAbelian(b) => Ok(abelian_correlator(b, u)),
        _ => {
            let v = site_view(aset)?;
            if is_degenerate(&v) {
                return Ok(PhiResult::degenerate(Route::Correlator));
            }
            let blocks = correlator_blocks(v.tf, u, v.sites, &gell_mann_bases(v.tf))?;
            Ok(phi_from_blocks(&blocks, aset.w_traceless_dim()))
        }
    }
}

/// [`phi_correlator`] on site-based algebra sets with caller-supplied
/// orthonormal traceless local bases, one per site of the factorization.
pub fn phi_correlator_with_bases(
    aset: &AlgebraSet,
    u: &DenseOperator,
    bases: &[Vec<DenseOperator>],
) -> Result<PhiResult> {
    check_unitary(u, aset.dim())?;
    let v = site_view(aset)?;
    if bases.len() != v.tf.sites() {
        return Err(Error::Shape(format!(
            "{} local bases for {} sites",
            bases.len(),
            v.tf.sites()
        )));
    }
    for (s, basis) in bases.iter().enumerate() {
        let q = v.tf.local_dim(s);
        if basis.len() != q * q - 1 || basis.iter().any(|b| b.dim() != q) {
            return Err(Error::Shape(format!("local basis of site {s} has the wrong shape")));
        }
    }
    if is_degenerate(&v) {
        return Ok(PhiResult::degenerate(Route::Correlator));
    }
    let blocks = correlator_blocks(v.tf, u, v.sites, bases)?;
    Ok(phi_from_blocks(&blocks, aset.w_traceless_dim()))
}

/// Correlators for the maximal abelian algebra of basis `b`. With
/// `W = B†UB` and diagonal Gell-Mann vectors `D`, the block is `Dᵀ|W|²D`.
fn abelian_correlator(b: &DenseOperator, u: &DenseOperator) -> PhiResult {
    let d = b.dim();
    let w = gemm(b.matrix(), Op::H, &gemm(u.matrix(), Op::N, b.matrix(), Op::N), Op::N);
    let w2 = w.map(|z| z.norm_sqr());
    let diag = DMatrix::from_fn(d, d - 1, |k, l| {
        let l = l + 1;
        let norm = 1.0 / libm::sqrt((l * (l + 1)) as f64);
        if k < l {
            norm
        } else if k == l {
            -(l as f64) * norm
        } else {
            0.0
        }
    });
    let block = diag.transpose() * w2 * diag;
    let total = block.norm_squared();
    PhiResult {
        value: 1.0 - total / (d - 1) as f64,
        route: Route::Correlator,
        correlator_norms: vec![vec![total]],
        note: None,
    }
}

/// Φ assembled from the mutual averaged non-commutativities
/// `S(U(A_i):A_j')` of the member algebras.
pub fn phi_man(aset: &AlgebraSet, u: &DenseOperator) -> Result<PhiResult> {
    check_unitary(u, aset.dim())?;
    if matches!(aset, AlgebraSet::MaxAbelian(_)) {
        return Err(Error::Unsupported(
            "the member algebras of a maximal abelian set are not mutually orthogonal".into(),
        ));
    }
    let v = site_view(aset)?;
    if is_degenerate(&v) {
        return Ok(PhiResult::degenerate(Route::Man));
    }
    let s = scrambling::man_matrix_sites(v.tf, u, v.sites)?;
    Ok(phi_from_man(v.tf, v.sites, &s, aset.w_traceless_dim()))
}

/// Φ from a matrix of MAN values over the listed sites.
pub fn phi_from_man(
    tf: &TensorFactorization,
    sites: &[usize],
    s: &[Vec<f64>],
    w_dim: usize,
) -> PhiResult {
    let dims = tf.dims();
    let mut value = 0.0;
    let mut norms = Vec::with_capacity(sites.len());
    for (a, &i) in sites.iter().enumerate() {
        let qi2 = (dims[i] * dims[i]) as f64;
        let mut inner = 1.0;
        let mut row = Vec::with_capacity(sites.len());
        for b in 0..sites.len() {
            inner -= 1.0 - s[a][b] / (1.0 - 1.0 / qi2);
            row.push(qi2 * (1.0 - s[a][b]) - 1.0);
        }
        value += inner * (qi2 - 1.0) / w_dim as f64;
        norms.push(row);
    }
    PhiResult {
        value,
        route: Route::Man,
        correlator_norms: norms,
        note: None,
    }
}

/// Orthonormal basis (as vectorized columns) of the span of `ops`,
/// by modified Gram-Schmidt with one re-orthogonalization pass.
fn orthonormal_span(ops: &[DenseOperator]) -> DMatrix<C64> {
    let d2 = ops.first().map(|o| o.dim() * o.dim()).unwrap_or(0);
    let mut cols: Vec<Vec<C64>> = Vec::new();
    for op in ops {
        let mut v: Vec<C64> = op.matrix().as_slice().to_vec();
        let start: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>();
        for _ in 0..2 {
            for e in &cols {
                let proj: C64 = e.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in v.iter_mut().zip(e) {
                    *x -= proj * y;
                }
            }
        }
        let n = libm::sqrt(v.iter().map(|z| z.norm_sqr()).sum::<f64>());
        if n > 1e-9 * libm::sqrt(start).max(1.0) {
            for x in &mut v {
                *x /= n;
            }
            cols.push(v);
        }
    }
    DMatrix::from_fn(d2, cols.len(), |r, k| cols[k][r])
}

/// Φ from the explicit `d²×d²` superoperator projections onto `W` and `U(W)`.
/// Oracle only, limited to small `d`.
pub fn phi_projection(aset: &AlgebraSet, u: &DenseOperator) -> Result<PhiResult> {
    let d = aset.dim();
    let max = Tolerances::DEFAULT.oracle_max_dim;
    if d > max {
        return Err(Error::Size { dim: d, max });
    }
    check_unitary(u, d)?;
    let mut spanning = vec![DenseOperator::identity(d)];
    for gens in aset.member_generators()? {
        spanning.extend(gens);
    }
    let basis = orthonormal_span(&spanning);
    let rank = basis.ncols();
    let expected = 1 + aset.w_traceless_dim();
    if rank != expected {
        return Err(Error::Invalid(format!(
            "W has rank {rank}, expected {expected}"
        )));
    }
    let evolved_cols: Vec<C64> = (0..rank)
        .flat_map(|k| {
            let op = DenseOperator::new(DMatrix::from_column_slice(d, d, basis.column(k).as_slice()))
                .expect("square");
            op.conjugate_by(u).into_matrix().as_slice().to_vec()
        })
        .collect();
    let evolved = DMatrix::from_column_slice(d * d, rank, &evolved_cols);
    let p_w = gemm(&basis, Op::N, &basis, Op::H);
    let p_uw = gemm(&evolved, Op::N, &evolved, Op::H);
    let trace = p_w.trace().re;
    if (trace - expected as f64).abs() > 1e-9 {
        return Err(Error::Invalid(format!("Tr P_W = {trace}, expected {expected}")));
    }
    let dist2 = (p_w - p_uw).norm_squared();
    Ok(PhiResult {
        value: dist2 / (2.0 * aset.w_traceless_dim() as f64),
        route: Route::Projection,
        correlator_norms: Vec::new(),
        note: Some(format!("Tr P_W = {trace:.12}")),
    })
}

/// Φ for a generalized algebra set: normalized operator entanglement for a
/// bipartite algebra, normalized coherence generating power for a maximal
/// abelian algebra, and the correlator route for a site subset.
pub fn generalized_phi(aset: &AlgebraSet, u: &DenseOperator) -> Result<PhiResult> {
    check_unitary(u, aset.dim())?;
    match aset {
        AlgebraSet::Bipartite(tf) => {
            let (d1, d2) = (tf.dims()[0], tf.dims()[1]);
            let e = scrambling::operator_entanglement(u, d1, d2)?;
            let q2 = (d1 * d1) as f64;
            Ok(PhiResult {
                value: e / (1.0 - 1.0 / q2),
                route: Route::ClosedForm,
                correlator_norms: Vec::new(),
                note: None,
            })
        }
        AlgebraSet::MaxAbelian(b) => {
            let d = b.dim() as f64;
            Ok(PhiResult {
                value: coherence_generating_power(b, u) / (1.0 - 1.0 / d),
                route: Route::ClosedForm,
                correlator_norms: Vec::new(),
                note: None,
            })
        }
        AlgebraSet::SiteSubset { .. } => phi_correlator(aset, u),
        AlgebraSet::FullTps(_) => Err(Error::Unsupported(
            "generalized Φ expects a bipartite, abelian or site-subset algebra set".into(),
        )),
    }
}

/// `1 − (1/d) Σ_ij |⟨i|U|j⟩|⁴` in the basis given by the columns of `b`.
pub fn coherence_generating_power(b: &DenseOperator, u: &DenseOperator) -> f64 {
    let d = b.dim();
    let w = gemm(b.matrix(), Op::H, &gemm(u.matrix(), Op::N, b.matrix(), Op::N), Op::N);
    let s: f64 = w.iter().map(|z| z.norm_sqr() * z.norm_sqr()).sum();
    1.0 - s / d as f64
}

fn site_view(aset: &AlgebraSet) -> Result<SiteView<'_>> {
    aset.site_view()
        .ok_or_else(|| Error::Unsupported("algebra set has no site structure".into()))
}

/// Φ by the fastest available route: the MAN contraction for site-based
/// sets, the closed correlator form for abelian ones.
pub fn phi(aset: &AlgebraSet, u: &DenseOperator) -> Result<PhiResult> {
    match aset {
        AlgebraSet::MaxAbelian(_) => phi_correlator(aset, u),
        _ => phi_man(aset, u),
    }
}

/// Deviation of the maximization contraction from `(d/(q_i q_j)) δ δ`,
/// for every pair `(i, j)`, with `U` expressed in the basis `B`.
pub fn check_max_condition(
    u: &DenseOperator,
    tf: &TensorFactorization,
    basis: &DenseOperator,
) -> Result<Vec<Vec<f64>>> {
    let d = tf.dim();
    check_unitary(u, d)?;
    check_unitary(basis, d)?;
    let w = gemm(basis.matrix(), Op::H, &gemm(u.matrix(), Op::N, basis.matrix(), Op::N), Op::N);
    let dims = tf.dims();
    let m = tf.sites();
    let mut out = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in 0..m {
            let (qi, qj) = (dims[i], dims[j]);
            // Y[(a_i, b_j), (rest rows, rest cols)]; the contraction is Y Y†.
            let y = reshape_split(&w, dims, i, j);
            let t = gemm(&y, Op::N, &y, Op::H);
            let target = d as f64 / (qi * qj) as f64;
            let mut worst = 0.0f64;
            for (r, cc) in (0..qi * qj).flat_map(|r| (0..qi * qj).map(move |cc| (r, cc))) {
                let expected = if r == cc { target } else { 0.0 };
                worst = worst.max((t[(r, cc)] - c(expected, 0.0)).norm());
            }
            out[i][j] = worst;
        }
    }
    Ok(out)
}

/// `Y[(a, b), (r, s)] = U[(a at row site, r), (b at column site, s)]`.
pub(crate) fn reshape_split(
    u: &DMatrix<C64>,
    dims: &[usize],
    row_site: usize,
    col_site: usize,
) -> DMatrix<C64> {
    let m = dims.len();
    let row_dig = linalg::subset_offsets(dims, &[row_site]);
    let row_rest = linalg::subset_offsets(dims, &linalg::complement(m, &[row_site]));
    let col_dig = linalg::subset_offsets(dims, &[col_site]);
    let col_rest = linalg::subset_offsets(dims, &linalg::complement(m, &[col_site]));
    let (qa, qb) = (row_dig.len(), col_dig.len());
    let (nr, nc) = (row_rest.len(), col_rest.len());
    let mut y = DMatrix::<C64>::zeros(qa * qb, nr * nc);
    for (s_idx, &s) in col_rest.iter().enumerate() {
        for (b, &cb) in col_dig.iter().enumerate() {
            let col = u.column(cb + s);
            for (r_idx, &r) in row_rest.iter().enumerate() {
                let ycol = r_idx * nc + s_idx;
                for (a, &ra) in row_dig.iter().enumerate() {
                    y[(a * qb + b, ycol)] = col[ra + r];
                }
            }
        }
    }
    y
}

/// The transpose of [`reshape_split`] with its summed index reordered:
/// `Z[(s, r), (a, b)] = U[(a at row site, r), (b at column site, s)]`.
/// Rows are filled contiguously, which makes this the fast layout when only
/// Gram-matrix norms are needed.
pub(crate) fn reshape_split_t(
    u: &DMatrix<C64>,
    dims: &[usize],
    row_site: usize,
    col_site: usize,
) -> DMatrix<C64> {
    let m = dims.len();
    let row_dig = linalg::subset_offsets(dims, &[row_site]);
    let row_rest = linalg::subset_offsets(dims, &linalg::complement(m, &[row_site]));
    let col_dig = linalg::subset_offsets(dims, &[col_site]);
    let col_rest = linalg::subset_offsets(dims, &linalg::complement(m, &[col_site]));
    let (qa, qb) = (row_dig.len(), col_dig.len());
    let nr = row_rest.len();
    let mut z = DMatrix::<C64>::zeros(nr * col_rest.len(), qa * qb);
    for (a, &ra) in row_dig.iter().enumerate() {
        for (b, &cb) in col_dig.iter().enumerate() {
            let mut zcol = z.column_mut(a * qb + b);
            for (s_idx, &s) in col_rest.iter().enumerate() {
                let ucol = u.column(cb + s);
                let base = s_idx * nr;
                for (r_idx, &r) in row_rest.iter().enumerate() {
                    zcol[base + r_idx] = ucol[ra + r];
                }
            }
        }
    }
    z
}

/// `U|i, j⟩ = |i + j, i + 2j⟩ (mod q)`, a 2-unitary permutation for odd prime `q`.
pub fn two_unitary_example(q: usize) -> Result<DenseOperator> {
    if q == 2 {
        return Err(Error::Unsupported("no 2-unitary exists on two qubits".into()));
    }
    if q < 2 || !is_prime(q) {
        return Err(Error::Unsupported(format!(
            "2-unitary construction needs a prime local dimension, got {q}"
        )));
    }
    let d = q * q;
    let mut u = DMatrix::<C64>::zeros(d, d);
    for i in 0..q {
        for j in 0..q {
            let out = ((i + j) % q) * q + (i + 2 * j) % q;
            u[(out, i * q + j)] = c(1.0, 0.0);
        }
    }
    DenseOperator::unitary(u)
}

fn is_prime(n: usize) -> bool {
    n >= 2 && (2..).take_while(|k| k * k <= n).all(|k| n % k != 0)
}

/// Residuals of the two unitarity conditions defining a 2-unitary on `C^q ⊗ C^q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoUnitaryResidual {
    /// `Σ_{k2,l2} U_{k1k2}^{l1l2} conj(U_{n1k2}^{m1l2}) = δ_{k1n1} δ_{l1m1}` (unitarity of the reshuffle).
    pub reshuffle: f64,
    /// `Σ_{k1,l2} U_{k1k2}^{l1l2} conj(U_{k1n2}^{m1l2}) = δ_{k2n2} δ_{l1m1}` (unitarity of the partial transpose).
    pub partial_transpose: f64,
}

impl TwoUnitaryResidual {
    pub fn max(&self) -> f64 {
        self.reshuffle.max(self.partial_transpose)
    }
}

pub fn is_two_unitary(u: &DenseOperator, q: usize) -> Result<TwoUnitaryResidual> {
    if u.dim() != q * q {
        return Err(Error::Shape(format!(
            "dimension {} is not q² for q = {q}",
            u.dim()
        )));
    }
    let dims = [q, q];
    let deviation = |y: &DMatrix<C64>| linalg::max_identity_deviation(&gemm(y, Op::N, y, Op::H));
    Ok(TwoUnitaryResidual {
        reshuffle: deviation(&reshape_split(u.matrix(), &dims, 0, 0)),
        partial_transpose: deviation(&reshape_split(u.matrix(), &dims, 1, 0)),
    })
}

/// `L · (V_1 ⊗ … ⊗ V_M)`: a free operation, under which Φ vanishes.
pub fn free_unitary(
    tf: &TensorFactorization,
    perm: &[usize],
    locals: &[DenseOperator],
) -> Result<DenseOperator> {
    if locals.len() != tf.sites() {
        return Err(Error::Shape(format!(
            "{} local unitaries for {} sites",
            locals.len(),
            tf.sites()
        )));
    }
    let l = permutation_operator(perm, tf.dims())?;
    let v = kron_all(locals)?;
    Ok(l.mul(&v))
}
