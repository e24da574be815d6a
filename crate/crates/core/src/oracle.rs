//! Independent small-dimension cross-checks built on the doubled space
//! `H ⊗ H` or on direct sampling. They are slow by design and meant for
//! tests and the `verify` command.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, gemm, kron, swap_pair, DenseOperator, EigenSystem, Op, C64};
use crate::randomness::{haar_state, Estimate, SeededGenerator};
use crate::structure::{gell_mann_basis, TensorFactorization};

/// Largest `d` for which the doubled-space oracles run.
pub const SWAP_ORACLE_MAX_DIM: usize = 16;

fn check_small(d: usize) -> Result<()> {
    if d > SWAP_ORACLE_MAX_DIM {
        return Err(Error::Size {
            dim: d,
            max: SWAP_ORACLE_MAX_DIM,
        });
    }
    Ok(())
}

/// `Tr(U⊗²(S_ii') S_jj')` with every operator built densely on `H ⊗ H`.
pub fn swap_trace(tf: &TensorFactorization, u: &DenseOperator, i: usize, j: usize) -> Result<f64> {
    check_small(tf.dim())?;
    let uu = kron(u, u)?;
    let si = swap_pair(i, tf.dims())?;
    let sj = swap_pair(j, tf.dims())?;
    Ok(si.conjugate_by(&uu).mul(&sj).trace().re)
}

/// `S(U(A_i):A_j') = 1 − (q_j/(q_i d²)) Tr(U⊗²(S_ii') S_jj')`, densely.
pub fn man_swap_trace(tf: &TensorFactorization, u: &DenseOperator, i: usize, j: usize) -> Result<f64> {
    let t = swap_trace(tf, u, i, j)?;
    let (qi, qj) = (tf.local_dim(i) as f64, tf.local_dim(j) as f64);
    let d = tf.dim() as f64;
    Ok(1.0 - qj / (qi * d * d) * t)
}

/// `E(U) = 1 − Tr(S_11' U⊗²(S_11'))/d²`, densely.
pub fn operator_entanglement_swap_trace(u: &DenseOperator, d1: usize, d2: usize) -> Result<f64> {
    let tf = TensorFactorization::new(&[d1, d2])?;
    let d = tf.dim() as f64;
    Ok(1.0 - swap_trace(&tf, u, 0, 0)? / (d * d))
}

/// Entangling power from the swap-trace expression of the Haar average over
/// product states, with `d1 ≤ d2`.
pub fn ep_formula(u: &DenseOperator, d1: usize, d2: usize) -> Result<f64> {
    if d1 > d2 {
        return Err(Error::Invalid(format!("expected d1 ≤ d2, got {d1} > {d2}")));
    }
    let tf = TensorFactorization::new(&[d1, d2])?;
    let (a, b) = (d1 as f64, d2 as f64);
    let d = a * b;
    let t11 = swap_trace(&tf, u, 0, 0)?;
    let t21 = swap_trace(&tf, u, 1, 0)?;
    let inner = d * (a + b) + t11 + t21;
    Ok((1.0 + 1.0 / b) / (1.0 - 1.0 / a) * (1.0 - inner / (d * (1.0 + a) * (1.0 + b))))
}

fn linear_entropy_first(phi: &[C64], d1: usize, d2: usize) -> f64 {
    let m = DMatrix::from_fn(d1, d2, |a, b| phi[a * d2 + b]);
    let rho = gemm(&m, Op::N, &m, Op::H);
    1.0 - rho.iter().map(|z| z.norm_sqr()).sum::<f64>()
}

/// Entangling power as the normalized Haar average of the linear entropy
/// of `U|ψ1⟩|ψ2⟩`, with normalization `(1 − 1/d1)/(1 + 1/d2)`.
pub fn ep_monte_carlo(
    u: &DenseOperator,
    d1: usize,
    d2: usize,
    samples: usize,
    gen: &SeededGenerator,
) -> Result<Estimate> {
    if d1 * d2 != u.dim() || d1 > d2 {
        return Err(Error::Invalid(format!(
            "bipartition {d1}x{d2} does not fit dimension {} with d1 ≤ d2",
            u.dim()
        )));
    }
    let norm = (1.0 - 1.0 / d1 as f64) / (1.0 + 1.0 / d2 as f64);
    let xs: Vec<f64> = (0..samples)
        .map(|k| {
            let mut g = gen.fork(k as u64);
            let p1 = haar_state(d1, &mut g);
            let p2 = haar_state(d2, &mut g);
            let prod = DMatrix::from_fn(d1 * d2, 1, |r, _| p1[r / d2] * p2[r % d2]);
            let out = gemm(u.matrix(), Op::N, &prod, Op::N);
            linear_entropy_first(out.as_slice(), d1, d2) / norm
        })
        .collect();
    Ok(Estimate::from_samples(&xs))
}

/// Entrywise Monte Carlo check of `E(|ψ⟩⟨ψ|)⊗² = (1 + S)/(q(q + 1))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentCheck {
    /// Largest `|mean − target| / stderr` over all entries (real and imaginary parts).
    pub max_sigma: f64,
    pub max_abs: f64,
}

pub fn swap_moment_mc(q: usize, samples: usize, gen: &SeededGenerator) -> Result<MomentCheck> {
    if q < 1 || q > 8 || samples < 2 {
        return Err(Error::Invalid(format!("swap moment check needs 1 ≤ q ≤ 8, got {q}")));
    }
    let d = q * q;
    let states: Vec<Vec<C64>> = (0..samples)
        .map(|k| haar_state(q, &mut gen.fork(k as u64)))
        .collect();
    let norm = 1.0 / (q * (q + 1)) as f64;
    let mut max_sigma = 0.0f64;
    let mut max_abs = 0.0f64;
    for r in 0..d {
        for cc in 0..d {
            let (a, b) = (r / q, r % q);
            let (a2, b2) = (cc / q, cc % q);
            let id = if r == cc { 1.0 } else { 0.0 };
            let sw = if a == b2 && b == a2 { 1.0 } else { 0.0 };
            let target = (id + sw) * norm;
            let vals: Vec<C64> = states
                .iter()
                .map(|p| p[a] * p[a2].conj() * p[b] * p[b2].conj())
                .collect();
            for (part, t) in [(0usize, target), (1, 0.0)] {
                let xs: Vec<f64> = vals.iter().map(|z| if part == 0 { z.re } else { z.im }).collect();
                let e = Estimate::from_samples(&xs);
                let dev = (e.mean - t).abs();
                max_abs = max_abs.max(dev);
                if e.stderr > 1e-14 {
                    max_sigma = max_sigma.max(dev / e.stderr);
                } else if dev > 1e-12 {
                    max_sigma = f64::INFINITY;
                }
            }
        }
    }
    Ok(MomentCheck { max_sigma, max_abs })
}

/// Infinite-time average of Φ under `exp(iHt)` for a full site TPS, by
/// keeping only resonant energy-gap contributions of each correlator.
/// Gaps closer than `gap_tol` are treated as equal.
pub fn phi_time_average_exact(es: &EigenSystem, tf: &TensorFactorization, gap_tol: f64) -> Result<f64> {
    let d = es.dim();
    let max = 256;
    if d > max {
        return Err(Error::Size { dim: d, max });
    }
    if d != tf.dim() {
        return Err(Error::Shape(format!(
            "eigensystem has dimension {d}, factorization has {}",
            tf.dim()
        )));
    }
    if tf.sites() == 1 {
        return Ok(0.0);
    }
    // Sort all ordered pairs (m, n) by gap λ_m − λ_n and group them.
    let mut pairs: Vec<(f64, usize, usize)> = (0..d)
        .flat_map(|m| (0..d).map(move |n| (m, n)))
        .map(|(m, n)| (es.values[m] - es.values[n], m, n))
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut group = Vec::with_capacity(pairs.len());
    let mut g = 0usize;
    for k in 0..pairs.len() {
        if k > 0 && pairs[k].0 - pairs[k - 1].0 > gap_tol {
            g += 1;
        }
        group.push(g);
    }
    let groups = g + 1;
    // Local basis operators in the eigenbasis, flattened in gap order:
    // f_a[k] = P̃_a[m_k, n_k] and g_b[k] = P̃_b[n_k, m_k].
    let dims = tf.dims();
    let mut fwd: Vec<Vec<C64>> = Vec::new();
    let mut bwd: Vec<Vec<C64>> = Vec::new();
    for (s, &q) in dims.iter().enumerate() {
        let scale = libm::sqrt(q as f64 / d as f64);
        for b in gell_mann_basis(q) {
            let p = linalg::embed_local(&b, s, dims)?.scale_real(scale);
            let pe = es.to_eigenbasis(&p);
            fwd.push(pairs.iter().map(|&(_, m, n)| pe[(m, n)]).collect());
            bwd.push(pairs.iter().map(|&(_, m, n)| pe[(n, m)]).collect());
        }
    }
    let mut total = 0.0;
    let mut z = alloc::vec![c(0.0, 0.0); groups];
    for f in &fwd {
        for bw in &bwd {
            z.iter_mut().for_each(|x| *x = c(0.0, 0.0));
            for k in 0..pairs.len() {
                z[group[k]] += f[k] * bw[k];
            }
            total += z.iter().map(|x| x.norm_sqr()).sum::<f64>();
        }
    }
    let w: usize = dims.iter().map(|q| q * q - 1).sum();
    Ok(1.0 - total / w as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use crate::linalg::permutation_operator;
    use crate::randomness::haar_unitary;
    use crate::scrambling::{man, operator_entanglement};

    #[test]
    fn swap_oracle_identity() {
        let tf = TensorFactorization::new(&[2, 2]).unwrap();
        let id = DenseOperator::identity(4);
        assert!(man_swap_trace(&tf, &id, 0, 0).unwrap().abs() < 1e-14);
        assert!((man_swap_trace(&tf, &id, 0, 1).unwrap() - 0.75).abs() < 1e-14);
        assert!((swap_trace(&tf, &id, 0, 1).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn contraction_matches_dense_swap_trace() {
        let mut g = SeededGenerator::new(3);
        for dims in [vec![2, 2], vec![2, 3], vec![3, 2], vec![2, 2, 2], vec![4, 2, 2]] {
            let tf = TensorFactorization::new(&dims).unwrap();
            let u = haar_unitary(tf.dim(), &mut g);
            for i in 0..dims.len() {
                for j in 0..dims.len() {
                    let a = man(&tf, &u, i, j).unwrap().value;
                    let b = man_swap_trace(&tf, &u, i, j).unwrap();
                    assert!((a - b).abs() < 1e-12, "{dims:?} {i} {j}");
                }
            }
        }
    }

    #[test]
    fn operator_entanglement_routes() {
        let cnot = DenseOperator::from_real_rows(
            4,
            &[1., 0., 0., 0., 0., 1., 0., 0., 0., 0., 0., 1., 0., 0., 1., 0.],
        )
        .unwrap();
        let a = operator_entanglement(&cnot, 2, 2).unwrap();
        let b = operator_entanglement_swap_trace(&cnot, 2, 2).unwrap();
        assert!((a - b).abs() < 1e-13);
        assert!((a - 0.5).abs() < 1e-13);
    }

    #[test]
    fn ep_formula_agrees_with_man_route() {
        let mut g = SeededGenerator::new(5);
        for (d1, d2) in [(2, 2), (2, 3), (2, 4), (3, 3)] {
            let u = haar_unitary(d1 * d2, &mut g);
            let a = crate::scrambling::entangling_power(&u, d1, d2).unwrap();
            let b = ep_formula(&u, d1, d2).unwrap();
            assert!((a - b).abs() < 1e-10, "{d1}x{d2}: {a} {b}");
        }
        let s = permutation_operator(&[1, 0], &[2, 2]).unwrap();
        assert!(ep_formula(&s, 2, 2).unwrap().abs() < 1e-12);
    }

    #[test]
    fn ep_monte_carlo_matches() {
        let u = haar_unitary(6, &mut SeededGenerator::new(8));
        let exact = crate::scrambling::entangling_power(&u, 2, 3).unwrap();
        let e = ep_monte_carlo(&u, 2, 3, 4000, &SeededGenerator::new(9)).unwrap();
        assert!(e.within(exact, 3.0, 0.0), "{e:?} {exact}");
    }

    #[test]
    fn swap_moment_q2() {
        let chk = swap_moment_mc(2, 20_000, &SeededGenerator::new(10)).unwrap();
        assert!(chk.max_sigma < 3.0, "{chk:?}");
    }

    #[test]
    fn time_average_of_local_hamiltonian_is_zero() {
        let tf = TensorFactorization::new(&[2, 3]).unwrap();
        let h = kron(
            &DenseOperator::diagonal(&[c(0.3, 0.), c(-1.1, 0.)]),
            &DenseOperator::identity(3),
        )
        .unwrap()
        .add(
            &kron(
                &DenseOperator::identity(2),
                &DenseOperator::diagonal(&[c(0.7, 0.), c(0.2, 0.), c(-2.0, 0.)]),
            )
            .unwrap(),
        );
        let es = linalg::herm_eig(&h).unwrap();
        assert!(phi_time_average_exact(&es, &tf, 1e-10).unwrap().abs() < 1e-12);
    }
}
