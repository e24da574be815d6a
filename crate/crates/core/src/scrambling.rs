//! Mutual averaged non-commutativity (MAN), operator entanglement,
//! entangling power, reduced dynamics maps and Gaussian scrambling rates.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::reshape_split_t;
use crate::linalg::{
    self, c, embed_local, embed_on_sites, gemm, partial_trace, DenseOperator, Op, C64,
};
use crate::randomness::{haar_state, haar_unitary, Estimate, SeededGenerator};
use crate::structure::TensorFactorization;
use crate::tolerance::Tolerances;

/// `S(U(A_i):A_j')` for a pair of sites.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ManValue {
    pub i: usize,
    pub j: usize,
    pub value: f64,
}

fn check_u(tf: &TensorFactorization, u: &DenseOperator) -> Result<()> {
    if u.dim() != tf.dim() {
        return Err(Error::Shape(format!(
            "unitary has dimension {}, factorization has {}",
            u.dim(),
            tf.dim()
        )));
    }
    Ok(())
}

/// `Tr(U⊗²(S_ii') S_jj')`, contracted without leaving the single-copy space.
///
/// Reshaping `U` into `X[(β, α), (r, c)] = U[(β, r), (α, c)]`, with `β` the
/// row digit of site `j` and `α` the column digit of site `i`, the trace
/// equals `‖X X†‖²_F`; the smaller of the two Gram matrices is formed.
pub fn swap_contraction(tf: &TensorFactorization, u: &DenseOperator, i: usize, j: usize) -> Result<f64> {
    check_u(tf, u)?;
    tf.check_site(i)?;
    tf.check_site(j)?;
    // ‖X X†‖_F is unchanged by transposing X or reordering its summed index.
    let x = reshape_split_t(u.matrix(), tf.dims(), j, i);
    if x.ncols() <= NARROW_GRAM && x.ncols() <= x.nrows() {
        return Ok(narrow_gram_norm_sq(&x));
    }
    let g = if x.nrows() <= x.ncols() {
        gemm(&x, Op::N, &x, Op::H)
    } else {
        gemm(&x, Op::H, &x, Op::N)
    };
    Ok(g.iter().map(|z| z.norm_sqr()).sum())
}

/// Widest matrix whose Gram matrix is formed by explicit column products.
const NARROW_GRAM: usize = 16;

/// `Σ conj(a_k) b_k` with independent partial sums so the loop pipelines.
fn cdot(a: &[C64], b: &[C64]) -> (f64, f64) {
    let mut re = [0.0f64; 4];
    let mut im = [0.0f64; 4];
    let (ca, cb) = (a.chunks_exact(4), b.chunks_exact(4));
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for k in 0..4 {
            re[k] += x[k].re * y[k].re + x[k].im * y[k].im;
            im[k] += x[k].re * y[k].im - x[k].im * y[k].re;
        }
    }
    for (x, y) in ra.iter().zip(rb) {
        re[0] += x.re * y.re + x.im * y.im;
        im[0] += x.re * y.im - x.im * y.re;
    }
    (re.iter().sum(), im.iter().sum())
}

/// `‖Z† Z‖²_F` for a tall matrix with few columns, from the upper triangle.
fn narrow_gram_norm_sq(z: &DMatrix<C64>) -> f64 {
    let n = z.nrows();
    let cols: Vec<&[C64]> = z.as_slice().chunks_exact(n).collect();
    let mut total = 0.0;
    for p in 0..cols.len() {
        for q in p..cols.len() {
            let (re, im) = cdot(cols[p], cols[q]);
            let w = if p == q { 1.0 } else { 2.0 };
            total += w * (re * re + im * im);
        }
    }
    total
}

fn man_from_contraction(tf: &TensorFactorization, i: usize, j: usize, trace: f64) -> f64 {
    let (qi, qj) = (tf.local_dim(i) as f64, tf.local_dim(j) as f64);
    let d = tf.dim() as f64;
    1.0 - qj / (qi * d * d) * trace
}

pub fn man(tf: &TensorFactorization, u: &DenseOperator, i: usize, j: usize) -> Result<ManValue> {
    let trace = swap_contraction(tf, u, i, j)?;
    Ok(ManValue {
        i,
        j,
        value: man_from_contraction(tf, i, j, trace),
    })
}

/// MAN values for every ordered pair of the listed sites.
pub fn man_matrix_sites(
    tf: &TensorFactorization,
    u: &DenseOperator,
    sites: &[usize],
) -> Result<Vec<Vec<f64>>> {
    sites
        .iter()
        .map(|&i| sites.iter().map(|&j| man(tf, u, i, j).map(|m| m.value)).collect())
        .collect()
}

pub fn man_matrix(tf: &TensorFactorization, u: &DenseOperator) -> Result<Vec<Vec<f64>>> {
    let sites: Vec<usize> = (0..tf.sites()).collect();
    man_matrix_sites(tf, u, &sites)
}

/// MAN through the correlator bridge `1 − (1 + ‖C_ij‖²)/q_i²`.
pub fn man_via_correlator(tf: &TensorFactorization, u: &DenseOperator, i: usize, j: usize) -> Result<ManValue> {
    let cm = crate::geometry::correlator_matrix(tf, u, i, j)?;
    let qi2 = (tf.local_dim(i) * tf.local_dim(i)) as f64;
    Ok(ManValue {
        i,
        j,
        value: 1.0 - (1.0 + cm.norm_squared()) / qi2,
    })
}

/// Monte Carlo average of `‖[X, Y]‖²/2d` with `X = U (u ⊗ 1) U†`, `u` Haar on
/// site `i`, and `Y = v ⊗ 1_j`, `v` Haar on every site except `j`.
///
/// Sample `k` draws from `gen.fork(k)`.
pub fn man_commutator_mc(
    tf: &TensorFactorization,
    u: &DenseOperator,
    i: usize,
    j: usize,
    samples: usize,
    gen: &SeededGenerator,
) -> Result<Estimate> {
    check_u(tf, u)?;
    tf.check_site(i)?;
    tf.check_site(j)?;
    if samples < 2 {
        return Err(Error::Invalid("at least two samples are needed".into()));
    }
    let dims = tf.dims();
    let d = tf.dim();
    let rest = linalg::complement(dims.len(), &[j]);
    let rest_dim = d / dims[j];
    let xs: Vec<f64> = (0..samples)
        .map(|k| {
            let mut g = gen.fork(k as u64);
            let local = haar_unitary(dims[i], &mut g);
            let x = embed_local(&local, i, dims)?.conjugate_by(u);
            let v = haar_unitary(rest_dim, &mut g);
            let y = embed_on_sites(&v, &rest, dims)?;
            Ok(x.commutator(&y).norm_sq() / (2.0 * d as f64))
        })
        .collect::<Result<_>>()?;
    Ok(Estimate::from_samples(&xs))
}

/// Singular values of the realigned matrix `M[(a1,b1),(a2,b2)] = U[(a1,a2),(b1,b2)]`.
pub fn operator_schmidt_values(u: &DenseOperator, d1: usize, d2: usize) -> Result<Vec<f64>> {
    if d1 * d2 != u.dim() {
        return Err(Error::Shape(format!(
            "{d1}·{d2} does not match dimension {}",
            u.dim()
        )));
    }
    let m = DMatrix::from_fn(d1 * d1, d2 * d2, |r, cc| {
        let (a1, b1) = (r / d1, r % d1);
        let (a2, b2) = (cc / d2, cc % d2);
        u.get(a1 * d2 + a2, b1 * d2 + b2)
    });
    Ok(m.singular_values().iter().copied().collect())
}

/// `E(U) = 1 − Σ s_k⁴ / d²` over the operator-Schmidt coefficients.
pub fn operator_entanglement(u: &DenseOperator, d1: usize, d2: usize) -> Result<f64> {
    let s = operator_schmidt_values(u, d1, d2)?;
    let d = (d1 * d2) as f64;
    Ok(1.0 - s.iter().map(|x| x * x * x * x).sum::<f64>() / (d * d))
}

/// Relabels `C^{d1} ⊗ C^{d2}` as `C^{d2} ⊗ C^{d1}`.
pub fn swap_factors(u: &DenseOperator, d1: usize, d2: usize) -> Result<DenseOperator> {
    if d1 * d2 != u.dim() {
        return Err(Error::Shape(format!(
            "{d1}·{d2} does not match dimension {}",
            u.dim()
        )));
    }
    let d = d1 * d2;
    let m = DMatrix::from_fn(d, d, |r, cc| {
        let (b, a) = (r / d1, r % d1);
        let (bb, aa) = (cc / d1, cc % d1);
        u.get(a * d2 + b, aa * d2 + bb)
    });
    let op = DenseOperator::new(m)?;
    if u.tag() == linalg::OperatorTag::Unitary {
        op.into_unitary()
    } else {
        Ok(op)
    }
}

/// The two MAN values a bipartition is described by:
/// `S(U(A1):A2)` and `S(U(A1):A1)`, with the smaller factor as `A1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BipartiteMan {
    pub d1: usize,
    pub d2: usize,
    pub s12: f64,
    pub s11: f64,
}

pub fn bipartite_man(u: &DenseOperator, d1: usize, d2: usize) -> Result<BipartiteMan> {
    if d1 > d2 {
        return bipartite_man(&swap_factors(u, d1, d2)?, d2, d1);
    }
    let tf = TensorFactorization::new(&[d1, d2])?;
    Ok(BipartiteMan {
        d1,
        d2,
        s12: man(&tf, u, 0, 0)?.value,
        s11: man(&tf, u, 0, 1)?.value,
    })
}

impl BipartiteMan {
    pub fn entangling_power(&self) -> f64 {
        let q2 = (self.d1 * self.d1) as f64;
        let d = (self.d1 * self.d2) as f64;
        q2 / (q2 - 1.0) * self.s12 + q2 / (q2 - 1.0) * (q2 / d) * self.s11 - q2 / d
    }

    /// Φ of the two-factor TPS.
    pub fn phi(&self) -> f64 {
        let a = (self.d1 * self.d1) as f64;
        let b = (self.d2 * self.d2) as f64;
        let den = a + b - 2.0;
        (a + b) / den * self.s12 + 2.0 * a / den * self.s11 - 2.0 * (a - 1.0) / den
    }
}

/// Normalized entangling power from the two bipartite MAN values.
pub fn entangling_power(u: &DenseOperator, d1: usize, d2: usize) -> Result<f64> {
    Ok(bipartite_man(u, d1, d2)?.entangling_power())
}

/// Φ of the two-factor TPS `[d1, d2]` from the bipartite MAN values.
pub fn phi_bipartite(u: &DenseOperator, d1: usize, d2: usize) -> Result<f64> {
    Ok(bipartite_man(u, d1, d2)?.phi())
}

fn check_density(rho: &DenseOperator, q: usize) -> Result<()> {
    if rho.dim() != q {
        return Err(Error::Shape(format!(
            "state has dimension {}, site has {q}",
            rho.dim()
        )));
    }
    let tol = 1e-10;
    let herm = rho.hermiticity_residual();
    if herm >= tol {
        return Err(Error::Invalid(format!("state is not Hermitian (residual {herm:e})")));
    }
    let tr = rho.trace();
    if (tr - c(1.0, 0.0)).norm() >= tol {
        return Err(Error::Invalid(format!("state has trace {tr}")));
    }
    let eig = linalg::herm_eig(&rho.clone().into_hermitian()?)?;
    if eig.values[0] < -tol {
        return Err(Error::Invalid(format!(
            "state has negative eigenvalue {}",
            eig.values[0]
        )));
    }
    Ok(())
}

/// `Λ^{i→j}(ρ) = Tr_{j̄}(U (ρ ⊗ (q_i/d) 1_ī) U†)`.
pub fn reduced_map(
    tf: &TensorFactorization,
    u: &DenseOperator,
    i: usize,
    j: usize,
    rho: &DenseOperator,
) -> Result<DenseOperator> {
    check_u(tf, u)?;
    tf.check_site(i)?;
    tf.check_site(j)?;
    check_density(rho, tf.local_dim(i))?;
    let q = tf.local_dim(i) as f64;
    let input = embed_local(rho, i, tf.dims())?.scale_real(q / tf.dim() as f64);
    partial_trace(&input.conjugate_by(u), tf.dims(), &[j])
}

/// Linear entropies `S_lin(Λ^{i→j}(|ψ⟩⟨ψ|))` for every `j`.
fn pure_state_entropies(tf: &TensorFactorization, u: &DenseOperator, i: usize, psi: &[C64]) -> Vec<f64> {
    let dims = tf.dims();
    let d = tf.dim();
    let m = dims.len();
    let qi = dims[i];
    // Columns U|ψ, k⟩ for every basis state k of the complement of i.
    let site_off = linalg::subset_offsets(dims, &[i]);
    let rest_off = linalg::subset_offsets(dims, &linalg::complement(m, &[i]));
    let mut v = DMatrix::<C64>::zeros(d, rest_off.len());
    for (k, &r) in rest_off.iter().enumerate() {
        for (a, &o) in site_off.iter().enumerate() {
            v[(o + r, k)] = psi[a];
        }
    }
    let a = gemm(u.matrix(), Op::N, &v, Op::N);
    let scale = qi as f64 / d as f64;
    (0..m)
        .map(|j| {
            let j_off = linalg::subset_offsets(dims, &[j]);
            let jr_off = linalg::subset_offsets(dims, &linalg::complement(m, &[j]));
            let ncols = jr_off.len() * a.ncols();
            let y = DMatrix::from_fn(j_off.len(), ncols, |b, col| {
                let (r, k) = (col / a.ncols(), col % a.ncols());
                a[(j_off[b] + jr_off[r], k)]
            });
            let rho = gemm(&y, Op::N, &y, Op::H) * c(scale, 0.0);
            1.0 - rho.iter().map(|z| z.norm_sqr()).sum::<f64>()
        })
        .collect()
}

/// Φ from the average linear entropy produced by the reduced maps on Haar
/// pure states. Sample `k` draws one state per site from `gen.fork(k)`.
pub fn phi_entropy_mc(
    tf: &TensorFactorization,
    u: &DenseOperator,
    samples: usize,
    gen: &SeededGenerator,
) -> Result<Estimate> {
    check_u(tf, u)?;
    let q = tf
        .uniform_dim()
        .ok_or_else(|| Error::Unsupported("entropy route needs equal local dimensions".into()))?;
    if samples < 2 {
        return Err(Error::Invalid("at least two samples are needed".into()));
    }
    let m = tf.sites();
    let pref = q as f64 / (q as f64 - 1.0) / m as f64;
    let xs: Vec<f64> = (0..samples)
        .map(|k| {
            let mut g = gen.fork(k as u64);
            let total: f64 = (0..m)
                .map(|i| {
                    let psi = haar_state(q, &mut g);
                    pure_state_entropies(tf, u, i, &psi).iter().sum::<f64>()
                })
                .sum();
            pref * total - (m as f64 - 1.0)
        })
        .collect();
    Ok(Estimate::from_samples(&xs))
}

/// The interaction part of `H` across site `i`: what remains after removing
/// the orthogonal projection onto `A_i + A_i'`.
pub fn interaction_residual(h: &DenseOperator, tf: &TensorFactorization, i: usize) -> Result<DenseOperator> {
    if h.dim() != tf.dim() {
        return Err(Error::Shape(format!(
            "Hamiltonian has dimension {}, factorization has {}",
            h.dim(),
            tf.dim()
        )));
    }
    tf.check_site(i)?;
    let residual = h.hermiticity_residual();
    if residual >= Tolerances::DEFAULT.hermitian {
        return Err(Error::Tag {
            expected: "hermitian",
            residual,
        });
    }
    let dims = tf.dims();
    let d = tf.dim() as f64;
    let qi = dims[i] as f64;
    let rest = linalg::complement(dims.len(), &[i]);
    let on_rest = partial_trace(h, dims, &rest)?;
    let on_site = partial_trace(h, dims, &[i])?;
    let p_rest = embed_on_sites(&on_rest, &rest, dims)?.scale_real(1.0 / qi);
    let p_site = embed_local(&on_site, i, dims)?.scale_real(qi / d);
    let id = DenseOperator::identity(tf.dim()).scale(h.trace() / d);
    Ok(h.sub(&p_rest).sub(&p_site).add(&id))
}

/// Gaussian scrambling rate `τ^{-1}(i) = ‖interaction part‖₂ / √d`.
pub fn scrambling_rate(h: &DenseOperator, tf: &TensorFactorization, i: usize) -> Result<f64> {
    Ok(interaction_residual(h, tf, i)?.norm() / libm::sqrt(tf.dim() as f64))
}

/// Quadratic coefficient of `Φ(t)` under `U_t = exp(iHt)`:
/// `2 Σ_i q_i² τ^{-2}(i) / dim(W/C1)`.
pub fn short_time_coefficient(h: &DenseOperator, tf: &TensorFactorization) -> Result<f64> {
    if tf.sites() == 1 {
        return Ok(0.0);
    }
    let mut num = 0.0;
    let mut w = 0.0;
    for i in 0..tf.sites() {
        let q2 = (tf.local_dim(i) * tf.local_dim(i)) as f64;
        let r = scrambling_rate(h, tf, i)?;
        num += q2 * r * r;
        w += q2 - 1.0;
    }
    Ok(2.0 * num / w)
}

/// Upper bound `1 − 1/q_i²` of `S(U(A_i):A_j')`.
pub fn man_upper_bound(tf: &TensorFactorization, i: usize) -> f64 {
    let q = tf.local_dim(i) as f64;
    1.0 - 1.0 / (q * q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use crate::geometry::{phi_correlator, phi_man};
    use crate::linalg::{hs_inner, kron, pauli, permutation_operator};
    use crate::structure::AlgebraSet;

    fn tf(d: &[usize]) -> TensorFactorization {
        TensorFactorization::new(d).unwrap()
    }

    #[test]
    fn man_identity_values() {
        for dims in [vec![2, 2], vec![2, 3], vec![3, 2, 2]] {
            let t = tf(&dims);
            let id = DenseOperator::identity(t.dim());
            for i in 0..dims.len() {
                for j in 0..dims.len() {
                    let v = man(&t, &id, i, j).unwrap().value;
                    let expected = if i == j { 0.0 } else { man_upper_bound(&t, i) };
                    assert!((v - expected).abs() < 1e-14, "{dims:?} {i} {j} {v}");
                }
            }
        }
    }

    #[test]
    fn contraction_matches_correlator_bridge() {
        let mut g = SeededGenerator::new(2);
        for dims in [vec![2, 3], vec![3, 2], vec![2, 2, 2], vec![2, 3, 2]] {
            let t = tf(&dims);
            let u = haar_unitary(t.dim(), &mut g);
            for i in 0..dims.len() {
                for j in 0..dims.len() {
                    let a = man(&t, &u, i, j).unwrap().value;
                    let b = man_via_correlator(&t, &u, i, j).unwrap().value;
                    assert!((a - b).abs() < 1e-12, "{dims:?} {i} {j}");
                    assert!(a >= -1e-12 && a <= man_upper_bound(&t, i) + 1e-9);
                }
            }
        }
    }

    #[test]
    fn commutator_mc_identity() {
        let t = tf(&[2, 2]);
        let id = DenseOperator::identity(4);
        let gen = SeededGenerator::new(17);
        let same = man_commutator_mc(&t, &id, 0, 0, 50, &gen).unwrap();
        assert!(same.mean.abs() < 1e-12 && same.stderr < 1e-12);
        let cross = man_commutator_mc(&t, &id, 0, 1, 2000, &gen).unwrap();
        assert!(cross.within(0.75, 3.0, 0.0), "{cross:?}");
    }

    #[test]
    fn commutator_mc_random() {
        let t = tf(&[2, 2]);
        let u = haar_unitary(4, &mut SeededGenerator::new(5));
        let gen = SeededGenerator::new(6);
        for (i, j) in [(0, 0), (0, 1), (1, 0)] {
            let e = man_commutator_mc(&t, &u, i, j, 2000, &gen).unwrap();
            let exact = man(&t, &u, i, j).unwrap().value;
            assert!(e.within(exact, 3.0, 0.0), "{i}{j} {e:?} {exact}");
        }
    }

    #[test]
    fn operator_entanglement_examples() {
        assert!(operator_entanglement(&DenseOperator::identity(6), 2, 3).unwrap().abs() < 1e-13);
        let s = permutation_operator(&[1, 0], &[2, 2]).unwrap();
        assert!((operator_entanglement(&s, 2, 2).unwrap() - 0.75).abs() < 1e-13);
        let u = haar_unitary(6, &mut SeededGenerator::new(9));
        let e = operator_entanglement(&u, 2, 3).unwrap();
        let m = man(&tf(&[2, 3]), &u, 0, 0).unwrap().value;
        assert!((e - m).abs() < 1e-12);
    }

    #[test]
    fn entangling_power_examples() {
        assert!(entangling_power(&DenseOperator::identity(6), 2, 3).unwrap().abs() < 1e-13);
        assert!(entangling_power(&DenseOperator::identity(6), 3, 2).unwrap().abs() < 1e-13);
        let mut g = SeededGenerator::new(12);
        for q in [2, 3] {
            let u = haar_unitary(q * q, &mut g);
            let ep = entangling_power(&u, q, q).unwrap();
            let phi = phi_correlator(&AlgebraSet::full(&[q, q]).unwrap(), &u).unwrap().value;
            assert!((ep - phi).abs() < 1e-10);
            let s = permutation_operator(&[1, 0], &[q, q]).unwrap();
            let es = operator_entanglement(&s, q, q).unwrap();
            let alt = (operator_entanglement(&u, q, q).unwrap()
                + operator_entanglement(&u.mul(&s), q, q).unwrap()
                - es)
                / es;
            assert!((alt - phi).abs() < 1e-10);
        }
    }

    #[test]
    fn bipartite_identities_and_phi() {
        let mut g = SeededGenerator::new(13);
        for (d1, d2) in [(2, 3), (2, 4), (3, 2)] {
            let u = haar_unitary(d1 * d2, &mut g);
            let t = tf(&[d1, d2]);
            let s11 = man(&t, &u, 0, 1).unwrap().value;
            let s22 = man(&t, &u, 1, 0).unwrap().value;
            let r = (d1 * d1) as f64 / (d2 * d2) as f64;
            assert!((s22 - (1.0 - r * (1.0 - s11))).abs() < 1e-10);
            let pb = phi_bipartite(&u, d1, d2).unwrap();
            let pm = phi_man(&AlgebraSet::full(&[d1, d2]).unwrap(), &u).unwrap().value;
            assert!((pb - pm).abs() < 1e-10);
        }
    }

    #[test]
    fn swap_factors_relabels() {
        let a = haar_unitary(2, &mut SeededGenerator::new(1));
        let b = haar_unitary(3, &mut SeededGenerator::new(2));
        let ab = kron(&a, &b).unwrap();
        let ba = kron(&b, &a).unwrap();
        assert!(swap_factors(&ab, 2, 3).unwrap().max_abs_diff(&ba) < 1e-15);
    }

    #[test]
    fn reduced_map_examples() {
        let t = tf(&[2, 3]);
        let rho = DenseOperator::from_fn(2, |r, cc| match (r, cc) {
            (0, 0) => c(0.7, 0.0),
            (1, 1) => c(0.3, 0.0),
            (0, 1) => c(0.1, 0.2),
            _ => c(0.1, -0.2),
        });
        let id = DenseOperator::identity(6);
        assert!(reduced_map(&t, &id, 0, 0, &rho).unwrap().max_abs_diff(&rho) < 1e-14);
        let mixed = DenseOperator::identity(3).scale_real(1.0 / 3.0);
        assert!(reduced_map(&t, &id, 0, 1, &rho).unwrap().max_abs_diff(&mixed) < 1e-14);
        let u = haar_unitary(6, &mut SeededGenerator::new(3));
        for j in 0..2 {
            let out = reduced_map(&t, &u, 0, j, &rho).unwrap();
            assert!((out.trace() - c(1.0, 0.0)).norm() < 1e-12);
        }
        let bad = DenseOperator::diagonal(&[c(1.5, 0.0), c(-0.5, 0.0)]);
        assert!(reduced_map(&t, &id, 0, 0, &bad).is_err());
    }

    #[test]
    fn pure_state_entropies_match_reduced_map() {
        let t = tf(&[2, 2, 2]);
        let mut g = SeededGenerator::new(31);
        let u = haar_unitary(8, &mut g);
        let psi = haar_state(2, &mut g);
        let rho = DenseOperator::from_fn(2, |r, cc| psi[r] * psi[cc].conj());
        let fast = pure_state_entropies(&t, &u, 1, &psi);
        for j in 0..3 {
            let out = reduced_map(&t, &u, 1, j, &rho).unwrap();
            let slow = 1.0 - hs_inner(&out, &out).re;
            assert!((fast[j] - slow).abs() < 1e-12);
        }
    }

    #[test]
    fn entropy_route_free_unitaries() {
        let gen = SeededGenerator::new(40);
        let t = tf(&[2, 2]);
        let id = phi_entropy_mc(&t, &DenseOperator::identity(4), 200, &gen).unwrap();
        assert!(id.within(0.0, 3.0, 1e-12), "{id:?}");
        let s = permutation_operator(&[1, 0], &[2, 2]).unwrap();
        let sw = phi_entropy_mc(&t, &s, 200, &gen).unwrap();
        assert!(sw.within(0.0, 3.0, 1e-12), "{sw:?}");
        assert!(phi_entropy_mc(&tf(&[2, 3]), &DenseOperator::identity(6), 10, &gen).is_err());
    }

    #[test]
    fn rate_examples() {
        let t = tf(&[2, 2]);
        assert!(scrambling_rate(&DenseOperator::identity(4), &t, 0).unwrap() < 1e-15);
        let local = kron(&pauli::x(), &DenseOperator::identity(2)).unwrap();
        assert!(scrambling_rate(&local, &t, 0).unwrap() < 1e-15);
        assert!(scrambling_rate(&local, &t, 1).unwrap() < 1e-15);
        let zz = kron(&pauli::z(), &pauli::z()).unwrap();
        assert!((scrambling_rate(&zz, &t, 0).unwrap() - 1.0).abs() < 1e-14);
        assert!((short_time_coefficient(&zz, &t).unwrap() - 8.0 / 3.0).abs() < 1e-13);
        let field = local.add(&kron(&DenseOperator::identity(2), &pauli::z()).unwrap());
        assert!(short_time_coefficient(&field, &t).unwrap() < 1e-15);
    }

    #[test]
    fn residual_is_orthogonal_to_local_algebras() {
        let t = tf(&[2, 3, 2]);
        let mut g = SeededGenerator::new(77);
        let a = DenseOperator::from_fn(12, |_, _| g.complex_gaussian());
        let h = a.add(&a.adjoint()).into_hermitian().unwrap();
        for i in 0..3 {
            let r = interaction_residual(&h, &t, i).unwrap();
            let rest = linalg::complement(3, &[i]);
            for _ in 0..3 {
                let x = DenseOperator::from_fn(t.local_dim(i), |_, _| g.complex_gaussian());
                let y = DenseOperator::from_fn(12 / t.local_dim(i), |_, _| g.complex_gaussian());
                let xe = embed_local(&x, i, t.dims()).unwrap();
                let ye = embed_on_sites(&y, &rest, t.dims()).unwrap();
                assert!(hs_inner(&xe, &r).norm() < 1e-12);
                assert!(hs_inner(&ye, &r).norm() < 1e-12);
            }
        }
    }
}
