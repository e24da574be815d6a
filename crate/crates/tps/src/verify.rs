//! Identity cross-checks run by `tps verify`.
//!
//! Each check compares two independent evaluations and reports its largest
//! residual. Deterministic checks use absolute tolerances; the Monte Carlo
//! moment check reports the worst deviation in standard errors.

use serde::{Deserialize, Serialize};
use tps_core::geometry::{
    self, check_max_condition, free_unitary, generalized_phi, is_two_unitary, phi_correlator, phi_man,
    phi_projection, two_unitary_example,
};
use tps_core::oracle::{ep_formula, man_swap_trace, swap_moment_mc};
use tps_core::randomness::{haar_unitary, SeededGenerator};
use tps_core::scrambling::{entangling_power, man, man_via_correlator};
use tps_core::{AlgebraSet, DenseOperator, TensorFactorization};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Identity {
    /// Correlator, MAN and projection routes to Φ agree.
    RouteAgreement,
    /// MAN from the contraction equals MAN from correlator norms.
    BridgeIdentity,
    /// MAN from the contraction equals the doubled-space swap trace.
    SwapIdentity,
    /// Haar second moment of pure states is `(1 + S)/(q(q + 1))`.
    SwapMoment,
    /// On a symmetric bipartition Φ equals the entangling power.
    EpSymmetric,
    /// Entangling power from MAN equals the swap-trace closed form.
    EpFormula,
    /// Φ vanishes on free unitaries and is invariant under them.
    Faithfulness,
    /// The two-unitary example reaches Φ = 1.
    TwoUnitary,
    /// Closed-form abelian Φ equals the correlator route.
    Cgp,
}

impl Identity {
    pub const ALL: [Identity; 9] = [
        Self::RouteAgreement,
        Self::BridgeIdentity,
        Self::SwapIdentity,
        Self::SwapMoment,
        Self::EpSymmetric,
        Self::EpFormula,
        Self::Faithfulness,
        Self::TwoUnitary,
        Self::Cgp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::RouteAgreement => "route-agreement",
            Self::BridgeIdentity => "bridge-identity",
            Self::SwapIdentity => "swap-identity",
            Self::SwapMoment => "swap-moment",
            Self::EpSymmetric => "ep-symmetric",
            Self::EpFormula => "ep-formula",
            Self::Faithfulness => "faithfulness",
            Self::TwoUnitary => "two-unitary",
            Self::Cgp => "cgp",
        }
    }

    pub fn parse(s: &str) -> Result<Self, CliError> {
        Self::ALL.into_iter().find(|i| i.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Self::ALL.iter().map(|i| i.name()).collect();
            CliError::Usage(format!("unknown identity {s:?}; expected one of {}", names.join(", ")))
        })
    }

    /// Residual bound; in standard errors for the Monte Carlo check.
    pub fn tolerance(self) -> f64 {
        match self {
            Self::SwapMoment => 3.0,
            _ => 1e-9,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub identity: Identity,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub unit: &'static str,
}

struct Acc(f64);

impl Acc {
    fn push(&mut self, r: f64) {
        // NaN must fail the check.
        self.0 = if r.is_nan() || self.0.is_nan() { f64::NAN } else { self.0.max(r) };
    }
}

fn tf(dims: &[usize]) -> TensorFactorization {
    TensorFactorization::new(dims).expect("valid constant dimensions")
}

fn route_agreement(gen: &SeededGenerator) -> Result<f64, CliError> {
    let mut acc = Acc(0.0);
    let mut k = 0;
    for dims in [&[2, 2][..], &[2, 3], &[2, 2, 2], &[3, 3]] {
        let aset = AlgebraSet::full(dims)?;
        for _ in 0..5 {
            let u = haar_unitary(aset.dim(), &mut gen.fork(k));
            k += 1;
            let c = phi_correlator(&aset, &u)?.value;
            acc.push((c - phi_man(&aset, &u)?.value).abs());
            acc.push((c - phi_projection(&aset, &u)?.value).abs());
        }
    }
    Ok(acc.0)
}

fn pairwise(gen: &SeededGenerator, f: impl Fn(&TensorFactorization, &DenseOperator, usize, usize) -> Result<f64, CliError>) -> Result<f64, CliError> {
    let mut acc = Acc(0.0);
    let mut k = 0;
    for dims in [&[2, 2][..], &[2, 3], &[2, 2, 2], &[4, 2, 2]] {
        let t = tf(dims);
        for _ in 0..3 {
            let u = haar_unitary(t.dim(), &mut gen.fork(k));
            k += 1;
            for i in 0..dims.len() {
                for j in 0..dims.len() {
                    acc.push(f(&t, &u, i, j)?);
                }
            }
        }
    }
    Ok(acc.0)
}

fn ep_symmetric(gen: &SeededGenerator) -> Result<f64, CliError> {
    let mut acc = Acc(0.0);
    for (k, q) in [2usize, 2, 2, 3, 3, 3].into_iter().enumerate() {
        let u = haar_unitary(q * q, &mut gen.fork(k as u64));
        let phi = geometry::phi(&AlgebraSet::full(&[q, q])?, &u)?.value;
        acc.push((phi - entangling_power(&u, q, q)?).abs());
    }
    Ok(acc.0)
}

fn ep_formula_check(gen: &SeededGenerator) -> Result<f64, CliError> {
    let mut acc = Acc(0.0);
    let mut k = 0;
    for (d1, d2) in [(2, 2), (2, 3), (2, 4), (3, 3)] {
        for _ in 0..3 {
            let u = haar_unitary(d1 * d2, &mut gen.fork(k));
            k += 1;
            acc.push((entangling_power(&u, d1, d2)? - ep_formula(&u, d1, d2)?).abs());
        }
    }
    Ok(acc.0)
}

fn faithfulness(gen: &SeededGenerator) -> Result<f64, CliError> {
    let mut acc = Acc(0.0);
    let t = tf(&[2, 2, 2]);
    let aset = AlgebraSet::FullTps(t.clone());
    let perms = [[0, 1, 2], [1, 0, 2], [2, 0, 1], [1, 2, 0], [2, 1, 0], [0, 2, 1]];
    for (k, perm) in perms.iter().enumerate() {
        let mut g = gen.fork(k as u64);
        let locals: Vec<DenseOperator> = (0..3).map(|_| haar_unitary(2, &mut g)).collect();
        let v = free_unitary(&t, perm, &locals)?;
        acc.push(geometry::phi(&aset, &v)?.value.abs());
        let locals2: Vec<DenseOperator> = (0..3).map(|_| haar_unitary(2, &mut g)).collect();
        let w = free_unitary(&t, &perms[(k + 1) % perms.len()], &locals2)?;
        let u = haar_unitary(8, &mut g);
        let sandwiched = v.mul(&u).mul(&w);
        acc.push((geometry::phi(&aset, &sandwiched)?.value - geometry::phi(&aset, &u)?.value).abs());
    }
    Ok(acc.0)
}

fn two_unitary() -> Result<f64, CliError> {
    let mut acc = Acc(0.0);
    for q in [3, 5] {
        let u = two_unitary_example(q)?;
        let t = tf(&[q, q]);
        acc.push((geometry::phi(&AlgebraSet::FullTps(t.clone()), &u)?.value - 1.0).abs());
        acc.push(is_two_unitary(&u, q)?.max());
        for row in check_max_condition(&u, &t, &DenseOperator::identity(q * q))? {
            for r in row {
                acc.push(r);
            }
        }
    }
    Ok(acc.0)
}

fn cgp(gen: &SeededGenerator) -> Result<f64, CliError> {
    let mut acc = Acc(0.0);
    for k in 0..6u64 {
        let mut g = gen.fork(k);
        let d = [4, 8, 9][k as usize % 3];
        let b = haar_unitary(d, &mut g);
        let aset = AlgebraSet::max_abelian(b)?;
        let u = haar_unitary(d, &mut g);
        acc.push((generalized_phi(&aset, &u)?.value - phi_correlator(&aset, &u)?.value).abs());
    }
    Ok(acc.0)
}

pub fn run_identity(id: Identity, seed: u64, samples: usize) -> Result<Report, CliError> {
    let gen = SeededGenerator::new(seed);
    let (residual, unit) = match id {
        Identity::RouteAgreement => (route_agreement(&gen)?, "abs"),
        Identity::BridgeIdentity => (
            pairwise(&gen, |t, u, i, j| {
                Ok((man(t, u, i, j)?.value - man_via_correlator(t, u, i, j)?.value).abs())
            })?,
            "abs",
        ),
        Identity::SwapIdentity => (
            pairwise(&gen, |t, u, i, j| Ok((man(t, u, i, j)?.value - man_swap_trace(t, u, i, j)?).abs()))?,
            "abs",
        ),
        Identity::SwapMoment => (swap_moment_mc(2, samples, &gen)?.max_sigma, "sigma"),
        Identity::EpSymmetric => (ep_symmetric(&gen)?, "abs"),
        Identity::EpFormula => (ep_formula_check(&gen)?, "abs"),
        Identity::Faithfulness => (faithfulness(&gen)?, "abs"),
        Identity::TwoUnitary => (two_unitary()?, "abs"),
        Identity::Cgp => (cgp(&gen)?, "abs"),
    };
    let tolerance = id.tolerance();
    Ok(Report {
        identity: id,
        max_residual: residual,
        tolerance,
        passed: residual < tolerance,
        unit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_identity_passes_by_default() {
        for id in Identity::ALL {
            let r = run_identity(id, 0, 20_000).unwrap();
            assert!(r.passed, "{r:?}");
        }
    }

    #[test]
    fn names_round_trip() {
        for id in Identity::ALL {
            assert_eq!(Identity::parse(id.name()).unwrap(), id);
        }
    }

    #[test]
    fn nan_fails() {
        let mut a = Acc(0.0);
        a.push(f64::NAN);
        a.push(1.0);
        assert!(!(a.0 < 1e-9));
    }
}
