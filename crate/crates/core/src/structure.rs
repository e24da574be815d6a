//! Tensor factorizations, local operator bases and collections of commuting
//! local algebras.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, embed_local, embed_on_sites, DenseOperator, Op, C64};

/// Local dimensions `q_1..q_M` of `H ≅ ⊗_i C^{q_i}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorFactorization {
    dims: Vec<usize>,
}

impl TensorFactorization {
    pub fn new(dims: &[usize]) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::Invalid("a factorization needs at least one factor".into()));
        }
        if let Some(q) = dims.iter().find(|&&q| q < 2) {
            return Err(Error::Invalid(format!("local dimension {q} is below 2")));
        }
        let mut d: usize = 1;
        for &q in dims {
            d = d.checked_mul(q).ok_or(Error::Size {
                dim: usize::MAX,
                max: crate::Tolerances::DEFAULT.max_dim,
            })?;
        }
        linalg::check_dim(d)?;
        Ok(Self {
            dims: dims.to_vec(),
        })
    }

    /// `m` sites of dimension `q`.
    pub fn uniform(q: usize, m: usize) -> Result<Self> {
        Self::new(&vec![q; m])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn sites(&self) -> usize {
        self.dims.len()
    }

    pub fn local_dim(&self, site: usize) -> usize {
        self.dims[site]
    }

    pub fn check_site(&self, site: usize) -> Result<()> {
        if site >= self.dims.len() {
            return Err(Error::SiteOutOfRange {
                site,
                sites: self.dims.len(),
            });
        }
        Ok(())
    }

    /// Equal local dimension shared by every site, if any.
    pub fn uniform_dim(&self) -> Option<usize> {
        let q = self.dims[0];
        self.dims.iter().all(|&x| x == q).then_some(q)
    }
}

/// Hermitian, traceless, Hilbert-Schmidt orthonormal basis of `q×q`
/// matrices: symmetric and antisymmetric off-diagonal elements followed by
/// the diagonal ones. For `q = 2` this is `(σx, σy, σz)/√2`.
pub fn gell_mann_basis(q: usize) -> Vec<DenseOperator> {
    let mut out = Vec::with_capacity(q * q - 1);
    let s = core::f64::consts::FRAC_1_SQRT_2;
    for j in 0..q {
        for k in j + 1..q {
            out.push(DenseOperator::from_fn(q, |r, cc| {
                if (r, cc) == (j, k) || (r, cc) == (k, j) {
                    c(s, 0.0)
                } else {
                    c(0.0, 0.0)
                }
            }));
            out.push(DenseOperator::from_fn(q, |r, cc| {
                if (r, cc) == (j, k) {
                    c(0.0, -s)
                } else if (r, cc) == (k, j) {
                    c(0.0, s)
                } else {
                    c(0.0, 0.0)
                }
            }));
        }
    }
    for l in 1..q {
        let norm = 1.0 / libm::sqrt((l * (l + 1)) as f64);
        out.push(DenseOperator::from_fn(q, |r, cc| {
            if r != cc {
                c(0.0, 0.0)
            } else if r < l {
                c(norm, 0.0)
            } else if r == l {
                c(-(l as f64) * norm, 0.0)
            } else {
                c(0.0, 0.0)
            }
        }));
    }
    out.into_iter()
        .map(|b| b.into_hermitian().expect("Gell-Mann elements are Hermitian"))
        .collect()
}

/// Full-space orthonormal traceless basis `{P_i^a}` of the algebra on one site.
#[derive(Debug, Clone)]
pub struct LocalBasis {
    pub site: usize,
    pub elements: Vec<DenseOperator>,
}

/// `P_i^a = (B^a ⊗ 1) √(q_i/d)`, unit Hilbert-Schmidt norm on the full space.
pub fn local_basis(tf: &TensorFactorization, site: usize) -> Result<LocalBasis> {
    tf.check_site(site)?;
    let q = tf.local_dim(site);
    let scale = libm::sqrt(q as f64 / tf.dim() as f64);
    let elements = gell_mann_basis(q)
        .iter()
        .map(|b| embed_local(b, site, tf.dims()).map(|e| e.scale_real(scale)))
        .collect::<Result<Vec<_>>>()?;
    Ok(LocalBasis { site, elements })
}

/// The shared identity element `1/√d`.
pub fn identity_element(d: usize) -> DenseOperator {
    DenseOperator::identity(d).scale_real(1.0 / libm::sqrt(d as f64))
}

/// A collection of mutually commuting algebras with trivial pairwise
/// intersection whose span defines the subspace `W`.
#[derive(Debug, Clone)]
pub enum AlgebraSet {
    /// Every site of a factorization: the usual TPS.
    FullTps(TensorFactorization),
    /// The single algebra `L(H_1) ⊗ 1` of a two-factor space.
    Bipartite(TensorFactorization),
    /// The algebras `span{1, |k⟩⟨k|}` of the basis given by the columns of a unitary.
    MaxAbelian(DenseOperator),
    /// The algebras of a subset of sites; the remaining sites act as an environment.
    SiteSubset {
        tf: TensorFactorization,
        sites: Vec<usize>,
    },
}

/// The factorization and member sites of a site-based algebra set.
#[derive(Debug, Clone, Copy)]
pub struct SiteView<'a> {
    pub tf: &'a TensorFactorization,
    pub sites: &'a [usize],
}

impl AlgebraSet {
    pub fn full(dims: &[usize]) -> Result<Self> {
        Ok(Self::FullTps(TensorFactorization::new(dims)?))
    }

    pub fn bipartite(d1: usize, d2: usize) -> Result<Self> {
        Ok(Self::Bipartite(TensorFactorization::new(&[d1, d2])?))
    }

    pub fn max_abelian(basis: DenseOperator) -> Result<Self> {
        let residual = basis.unitarity_residual();
        if residual >= crate::Tolerances::DEFAULT.unitary {
            return Err(Error::Tag {
                expected: "unitary",
                residual,
            });
        }
        Ok(Self::MaxAbelian(basis.into_unitary()?))
    }

    /// Maximal abelian subalgebra of the computational basis.
    pub fn computational_abelian(d: usize) -> Result<Self> {
        linalg::check_dim(d)?;
        Ok(Self::MaxAbelian(DenseOperator::identity(d)))
    }

    pub fn site_subset(tf: TensorFactorization, sites: &[usize]) -> Result<Self> {
        if sites.is_empty() {
            return Err(Error::Invalid("site subset is empty".into()));
        }
        let mut sorted = sites.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != sites.len() {
            return Err(Error::Invalid(format!("repeated site in {sites:?}")));
        }
        for &s in &sorted {
            tf.check_site(s)?;
        }
        Ok(Self::SiteSubset { tf, sites: sorted })
    }

    /// Total Hilbert-space dimension `d`.
    pub fn dim(&self) -> usize {
        match self {
            Self::FullTps(tf) | Self::Bipartite(tf) | Self::SiteSubset { tf, .. } => tf.dim(),
            Self::MaxAbelian(b) => b.dim(),
        }
    }

    /// `dim(W/C1)`.
    pub fn w_traceless_dim(&self) -> usize {
        match self.site_view() {
            Some(v) => v.sites.iter().map(|&s| v.tf.local_dim(s).pow(2) - 1).sum(),
            None => self.dim() - 1,
        }
    }

    /// Number of member algebras.
    pub fn members(&self) -> usize {
        match self.site_view() {
            Some(v) => v.sites.len(),
            None => self.dim(),
        }
    }

    /// Factorization and member sites, for every kind except `MaxAbelian`.
    pub fn site_view(&self) -> Option<SiteView<'_>> {
        const ALL: [usize; 16] = [0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15];
        match self {
            Self::FullTps(tf) if tf.sites() <= ALL.len() => Some(SiteView {
                tf,
                sites: &ALL[..tf.sites()],
            }),
            Self::FullTps(_) => None,
            Self::Bipartite(tf) => Some(SiteView { tf, sites: &ALL[..1] }),
            Self::SiteSubset { tf, sites } => Some(SiteView { tf, sites }),
            Self::MaxAbelian(_) => None,
        }
    }

    /// Explicit orthonormal basis of the traceless part of `W`, grouped
    /// by member algebra where the members are mutually orthogonal.
    pub fn traceless_basis(&self) -> Result<Vec<DenseOperator>> {
        match self {
            Self::MaxAbelian(b) => {
                let d = b.dim();
                let mut out = Vec::with_capacity(d - 1);
                for diag in gell_mann_basis(d).into_iter().skip(d * d - d) {
                    out.push(diag.conjugate_by(b));
                }
                Ok(out)
            }
            _ => {
                let v = self.site_view().ok_or_else(too_many_sites)?;
                let mut out = Vec::new();
                for &s in v.sites {
                    out.extend(local_basis(v.tf, s)?.elements);
                }
                Ok(out)
            }
        }
    }

    /// Non-orthogonal spanning sets of each member algebra (including the
    /// identity): matrix units on a site, or basis projectors.
    pub fn member_generators(&self) -> Result<Vec<Vec<DenseOperator>>> {
        match self {
            Self::MaxAbelian(b) => {
                let d = b.dim();
                (0..d)
                    .map(|k| {
                        let proj = DenseOperator::from_fn(d, |r, cc| {
                            if r == k && cc == k {
                                c(1.0, 0.0)
                            } else {
                                c(0.0, 0.0)
                            }
                        });
                        Ok(vec![DenseOperator::identity(d), proj.conjugate_by(b)])
                    })
                    .collect()
            }
            _ => {
                let v = self.site_view().ok_or_else(too_many_sites)?;
                v.sites
                    .iter()
                    .map(|&s| {
                        let q = v.tf.local_dim(s);
                        let mut gens = Vec::with_capacity(q * q);
                        for k in 0..q {
                            for l in 0..q {
                                let unit = DenseOperator::from_fn(q, |r, cc| {
                                    if (r, cc) == (k, l) {
                                        c(1.0, 0.0)
                                    } else {
                                        c(0.0, 0.0)
                                    }
                                });
                                gens.push(embed_on_sites(&unit, &[s], v.tf.dims())?);
                            }
                        }
                        Ok(gens)
                    })
                    .collect()
            }
        }
    }

    /// Checks mutual commutativity and trivial intersection of the member
    /// algebras on their generators. Intended for small `d`.
    pub fn check_conditions(&self) -> Result<AlgebraCheck> {
        let gens = self.member_generators()?;
        let mut commutation = 0.0f64;
        let mut trivial_intersection = true;
        for i in 0..gens.len() {
            for j in i + 1..gens.len() {
                for a in &gens[i] {
                    for b in &gens[j] {
                        commutation = commutation.max(a.commutator(b).max_abs());
                    }
                }
                let ri = span_rank(&gens[i]);
                let rj = span_rank(&gens[j]);
                let both: Vec<DenseOperator> = gens[i].iter().chain(&gens[j]).cloned().collect();
                if span_rank(&both) != ri + rj - 1 {
                    trivial_intersection = false;
                }
            }
        }
        Ok(AlgebraCheck {
            commutation,
            trivial_intersection,
        })
    }
}

fn too_many_sites() -> Error {
    Error::Unsupported("more than 16 sites".into())
}

/// Outcome of [`AlgebraSet::check_conditions`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgebraCheck {
    /// Largest entry of any commutator between generators of different members.
    pub commutation: f64,
    pub trivial_intersection: bool,
}

/// Numerical rank of the span of a set of operators.
pub fn span_rank(ops: &[DenseOperator]) -> usize {
    if ops.is_empty() {
        return 0;
    }
    let d2 = ops[0].dim() * ops[0].dim();
    let vecs = DMatrix::from_fn(d2, ops.len(), |r, cc| ops[cc].matrix().as_slice()[r]);
    let gram = linalg::gemm(&vecs, Op::H, &vecs, Op::N);
    let eig = gram.symmetric_eigenvalues();
    let top = eig.iter().fold(0.0f64, |m, &x| m.max(x));
    eig.iter().filter(|&&x| x > 1e-10 * top.max(1.0)).count()
}

/// Orthogonal (Hilbert-Schmidt) projection of `x` onto `W`.
pub fn project_w(aset: &AlgebraSet, x: &DenseOperator) -> Result<DenseOperator> {
    let d = aset.dim();
    if x.dim() != d {
        return Err(Error::Shape(format!(
            "operator dimension {} does not match algebra set dimension {d}",
            x.dim()
        )));
    }
    match aset {
        AlgebraSet::MaxAbelian(b) => {
            let rotated = x.conjugate_by(&b.adjoint());
            let diag: Vec<C64> = (0..d).map(|k| rotated.get(k, k)).collect();
            Ok(DenseOperator::diagonal(&diag).conjugate_by(b))
        }
        _ => {
            let v = aset.site_view().ok_or_else(too_many_sites)?;
            let dims = v.tf.dims();
            let tr = x.trace() / d as f64;
            let mut acc = DenseOperator::identity(d).scale(tr * -((v.sites.len() as f64) - 1.0));
            for &s in v.sites {
                let reduced = linalg::partial_trace(x, dims, &[s])?;
                let q = dims[s] as f64;
                let back = embed_local(&reduced, s, dims)?.scale_real(q / d as f64);
                acc = acc.add(&back);
            }
            Ok(acc)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hs_inner, kron, pauli};
    use crate::randomness::{haar_unitary, SeededGenerator};

    fn gram_deviation(ops: &[DenseOperator]) -> f64 {
        let mut worst = 0.0f64;
        for (a, x) in ops.iter().enumerate() {
            for (b, y) in ops.iter().enumerate() {
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((hs_inner(x, y) - c(target, 0.0)).norm());
            }
        }
        worst
    }

    #[test]
    fn gell_mann_qubit_is_normalized_pauli() {
        let b = gell_mann_basis(2);
        let s = core::f64::consts::FRAC_1_SQRT_2;
        assert!(b[0].max_abs_diff(&pauli::x().scale_real(s)) < 1e-15);
        assert!(b[1].max_abs_diff(&pauli::y().scale_real(s)) < 1e-15);
        assert!(b[2].max_abs_diff(&pauli::z().scale_real(s)) < 1e-15);
    }

    #[test]
    fn gell_mann_orthonormal_traceless_complete() {
        for q in 2..6 {
            let b = gell_mann_basis(q);
            assert_eq!(b.len(), q * q - 1);
            assert!(gram_deviation(&b) < 1e-14);
            for x in &b {
                assert!(x.trace().norm() < 1e-14);
                assert!(x.hermiticity_residual() < 1e-15);
            }
            // Σ_a (B^a)² = (q² - 1)/q · 1
            let mut sum = DenseOperator::zeros(q);
            for x in &b {
                sum = sum.add(&x.mul(x));
            }
            let target = DenseOperator::identity(q).scale_real((q * q - 1) as f64 / q as f64);
            assert!(sum.max_abs_diff(&target) < 1e-13);
        }
    }

    #[test]
    fn local_basis_examples() {
        let tf = TensorFactorization::new(&[2, 2]).unwrap();
        let lb = local_basis(&tf, 0).unwrap();
        let expected = DenseOperator::diagonal(&[c(0.5, 0.), c(0.5, 0.), c(-0.5, 0.), c(-0.5, 0.)]);
        assert!(lb.elements[2].max_abs_diff(&expected) < 1e-15);

        let tf = TensorFactorization::new(&[2, 3]).unwrap();
        let p1 = local_basis(&tf, 0).unwrap().elements;
        let p2 = local_basis(&tf, 1).unwrap().elements;
        let all: Vec<DenseOperator> = p1.iter().chain(&p2).cloned().collect();
        assert!(gram_deviation(&all) < 1e-14);
        let id = identity_element(6);
        for p in &all {
            assert!(hs_inner(p, &id).norm() < 1e-15);
        }
        // P_1^a acts as identity on site 2
        let e = kron(&gell_mann_basis(2)[1], &DenseOperator::identity(3))
            .unwrap()
            .scale_real(libm::sqrt(2.0 / 6.0));
        assert!(p1[1].max_abs_diff(&e) < 1e-15);
    }

    #[test]
    fn factorization_validation() {
        assert!(TensorFactorization::new(&[]).is_err());
        assert!(TensorFactorization::new(&[2, 1]).is_err());
        assert!(TensorFactorization::new(&[2; 17]).is_err());
        let tf = TensorFactorization::new(&[2, 3, 4]).unwrap();
        assert_eq!(tf.dim(), 24);
        assert_eq!(tf.uniform_dim(), None);
        assert!(tf.check_site(3).is_err());
    }

    #[test]
    fn w_dimensions() {
        let a = AlgebraSet::full(&[2, 3, 2]).unwrap();
        assert_eq!(a.w_traceless_dim(), 3 + 8 + 3);
        assert_eq!(a.traceless_basis().unwrap().len(), 14);
        let m = AlgebraSet::computational_abelian(5).unwrap();
        assert_eq!(m.w_traceless_dim(), 4);
        let b = AlgebraSet::bipartite(2, 3).unwrap();
        assert_eq!(b.w_traceless_dim(), 3);
        let s = AlgebraSet::site_subset(TensorFactorization::new(&[2, 2, 3]).unwrap(), &[2, 0]).unwrap();
        assert_eq!(s.w_traceless_dim(), 11);
    }

    #[test]
    fn abelian_basis_is_orthonormal_and_diagonal_in_b() {
        let b = haar_unitary(4, &mut SeededGenerator::new(5));
        let aset = AlgebraSet::max_abelian(b.clone()).unwrap();
        let basis = aset.traceless_basis().unwrap();
        assert!(gram_deviation(&basis) < 1e-13);
        for x in &basis {
            let r = x.conjugate_by(&b.adjoint());
            for i in 0..4 {
                for j in 0..4 {
                    if i != j {
                        assert!(r.get(i, j).norm() < 1e-13);
                    }
                }
            }
        }
    }

    #[test]
    fn algebra_conditions_hold() {
        for aset in [
            AlgebraSet::full(&[2, 3]).unwrap(),
            AlgebraSet::computational_abelian(4).unwrap(),
            AlgebraSet::site_subset(TensorFactorization::new(&[2, 2, 2]).unwrap(), &[0, 2]).unwrap(),
        ] {
            let chk = aset.check_conditions().unwrap();
            assert!(chk.commutation < 1e-14);
            assert!(chk.trivial_intersection);
        }
    }

    #[test]
    fn project_w_examples() {
        let aset = AlgebraSet::full(&[2, 2]).unwrap();
        let id = DenseOperator::identity(4);
        assert!(project_w(&aset, &id).unwrap().max_abs_diff(&id) < 1e-15);
        let tf = TensorFactorization::new(&[2, 2]).unwrap();
        let p1 = local_basis(&tf, 0).unwrap().elements;
        let p2 = local_basis(&tf, 1).unwrap().elements;
        for a in &p1 {
            assert!(project_w(&aset, a).unwrap().max_abs_diff(a) < 1e-15);
            for b in &p2 {
                assert!(project_w(&aset, &a.mul(b)).unwrap().max_abs() < 1e-15);
            }
        }
    }

    #[test]
    fn project_w_matches_basis_expansion() {
        let mut g = SeededGenerator::new(21);
        let x = DenseOperator::from_fn(12, |_, _| g.complex_gaussian());
        for aset in [
            AlgebraSet::full(&[2, 3, 2]).unwrap(),
            AlgebraSet::max_abelian(haar_unitary(12, &mut g)).unwrap(),
            AlgebraSet::site_subset(TensorFactorization::new(&[2, 3, 2]).unwrap(), &[1]).unwrap(),
            AlgebraSet::bipartite(4, 3).unwrap(),
        ] {
            // oracle: expansion over the identity plus the orthonormal traceless basis
            let d = aset.dim();
            let id = identity_element(d);
            let mut expected = id.scale(hs_inner(&id, &x));
            for p in aset.traceless_basis().unwrap() {
                expected = expected.add(&p.scale(hs_inner(&p, &x)));
            }
            assert!(project_w(&aset, &x).unwrap().max_abs_diff(&expected) < 1e-12);
        }
    }
}
