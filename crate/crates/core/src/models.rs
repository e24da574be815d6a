//! Hamiltonians of the many-body experiments: transverse-field Ising chains
//! in four regimes, the Temperley-Lieb qutrit chain and the t-Jz chain of
//! spinful fermions without double occupancy. Open boundaries throughout;
//! site 0 is the most significant tensor factor.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, DenseOperator, C64};
use crate::randomness::SeededGenerator;
use crate::structure::TensorFactorization;
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Tfim,
    TemperleyLieb,
    TJz,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TfimRegime {
    /// `h = 0.5`, `g_i = 1.05`.
    Nonintegrable,
    /// `h = 0`, `g_i = 1`.
    Integrable,
    /// `h = 0`, `g_i` uniform in `[−10, 10]`.
    Anderson,
    /// `h = 0.5`, `g_i` uniform in `[−10, 10]`.
    Mbl,
}

impl TfimRegime {
    pub const ALL: [TfimRegime; 4] = [Self::Nonintegrable, Self::Integrable, Self::Anderson, Self::Mbl];

    pub fn is_disordered(self) -> bool {
        matches!(self, Self::Anderson | Self::Mbl)
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Nonintegrable => "nonintegrable",
            Self::Integrable => "integrable",
            Self::Anderson => "anderson",
            Self::Mbl => "mbl",
        }
    }
}

/// Longitudinal field of the MBL regime.
pub const MBL_FIELD: f64 = 0.5;
/// Half-width of the transverse-field disorder of the localized regimes.
pub const TFIM_DISORDER: f64 = 10.0;

/// Resolved coupling constants of one Hamiltonian.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Couplings {
    Tfim {
        h: f64,
        g: Vec<f64>,
        /// Strength of the `σzσz` bonds; 1 in every regime.
        #[serde(default = "unit")]
        zz: f64,
    },
    TemperleyLieb {
        j: Vec<f64>,
    },
    TJz {
        t: Vec<f64>,
        jz: Vec<f64>,
        hz: Vec<f64>,
        gz: Vec<f64>,
    },
}

fn unit() -> f64 {
    1.0
}

impl Couplings {
    pub fn family(&self) -> Family {
        match self {
            Self::Tfim { .. } => Family::Tfim,
            Self::TemperleyLieb { .. } => Family::TemperleyLieb,
            Self::TJz { .. } => Family::TJz,
        }
    }

    pub fn sites(&self) -> usize {
        match self {
            Self::Tfim { g, .. } => g.len(),
            Self::TemperleyLieb { j } => j.len() + 1,
            Self::TJz { hz, .. } => hz.len(),
        }
    }

    pub fn tfim(regime: TfimRegime, n: usize, gen: &mut SeededGenerator) -> Self {
        let (h, g) = match regime {
            TfimRegime::Nonintegrable => (0.5, vec![1.05; n]),
            TfimRegime::Integrable => (0.0, vec![1.0; n]),
            TfimRegime::Anderson => (0.0, uniform_list(n, -TFIM_DISORDER, TFIM_DISORDER, gen)),
            TfimRegime::Mbl => (MBL_FIELD, uniform_list(n, -TFIM_DISORDER, TFIM_DISORDER, gen)),
        };
        Self::Tfim { h, g, zz: 1.0 }
    }
}

fn uniform_list(n: usize, lo: f64, hi: f64, gen: &mut SeededGenerator) -> Vec<f64> {
    (0..n).map(|_| gen.uniform(lo, hi)).collect()
}

/// Draws the disordered couplings of a family: TFIM transverse fields in
/// `[−10, 10]`, every TL and t-Jz coupling in `[0, 1]`.
pub fn sample_disorder(family: Family, n: usize, regime: TfimRegime, gen: &mut SeededGenerator) -> Couplings {
    match family {
        Family::Tfim => Couplings::tfim(regime, n, gen),
        Family::TemperleyLieb => Couplings::TemperleyLieb {
            j: uniform_list(n.saturating_sub(1), 0.0, 1.0, gen),
        },
        Family::TJz => Couplings::TJz {
            t: uniform_list(n.saturating_sub(1), 0.0, 1.0, gen),
            jz: uniform_list(n.saturating_sub(1), 0.0, 1.0, gen),
            hz: uniform_list(n, 0.0, 1.0, gen),
            gz: uniform_list(n, 0.0, 1.0, gen),
        },
    }
}

/// Disorder realizations of the full-scale runs, `⌊200/N⌋`.
pub fn disorder_repetitions(n: usize) -> usize {
    200 / n.max(1)
}

/// Disorder realizations of the desk-scale runs, `max(1, ⌊40/N⌋)`.
pub fn desk_repetitions(n: usize) -> usize {
    (40 / n.max(1)).max(1)
}

/// What to build: family, size, regime and the seed of the disorder draws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub family: Family,
    pub n: usize,
    /// TFIM only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regime: Option<TfimRegime>,
    #[serde(default)]
    pub disorder_seed: u64,
}

impl ModelConfig {
    pub fn tfim(n: usize, regime: TfimRegime) -> Self {
        Self {
            family: Family::Tfim,
            n,
            regime: Some(regime),
            disorder_seed: 0,
        }
    }

    pub fn new(family: Family, n: usize) -> Self {
        Self {
            family,
            n,
            regime: None,
            disorder_seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.disorder_seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Invalid(format!("a chain needs at least 2 sites, got {}", self.n)));
        }
        match (self.family, self.regime) {
            (Family::Tfim, None) => Err(Error::Invalid("TFIM needs a regime".into())),
            (Family::Tfim, _) => Ok(()),
            (_, Some(_)) => Err(Error::Invalid("only TFIM takes a regime".into())),
            (_, None) => Ok(()),
        }
    }

    /// Whether different realizations give different Hamiltonians.
    pub fn is_disordered(&self) -> bool {
        match self.family {
            Family::Tfim => self.regime.is_some_and(TfimRegime::is_disordered),
            _ => true,
        }
    }

    /// Couplings of realization `r`, drawn from stream `r + 1` of the seed.
    pub fn resolve(&self, realization: u64) -> Result<Couplings> {
        self.validate()?;
        let mut gen = SeededGenerator::new(self.disorder_seed).fork(realization);
        Ok(sample_disorder(
            self.family,
            self.n,
            self.regime.unwrap_or(TfimRegime::Nonintegrable),
            &mut gen,
        ))
    }

    pub fn build(&self, realization: u64) -> Result<BuiltModel> {
        build(&self.resolve(realization)?)
    }

    pub fn label(&self) -> String {
        match (self.family, self.regime) {
            (Family::Tfim, Some(r)) => format!("tfim-{}", r.name()),
            (Family::Tfim, None) => "tfim".into(),
            (Family::TemperleyLieb, _) => "temperley-lieb".into(),
            (Family::TJz, _) => "t-jz".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BuiltModel {
    pub hamiltonian: DenseOperator,
    pub tf: TensorFactorization,
    pub couplings: Couplings,
    /// `‖(1 − P) H_Fock P‖_F` for the t-Jz projection; `None` otherwise.
    pub leakage: Option<f64>,
}

pub fn build(couplings: &Couplings) -> Result<BuiltModel> {
    match couplings {
        Couplings::Tfim { h, g, zz } => build_tfim_with_coupling(g.len(), *h, g, *zz),
        Couplings::TemperleyLieb { j } => build_temperley_lieb(j.len() + 1, j),
        Couplings::TJz { t, jz, hz, gz } => build_tjz(hz.len(), t, jz, hz, gz),
    }
}

fn check_len(name: &str, got: usize, want: usize) -> Result<()> {
    if got != want {
        return Err(Error::Shape(format!("{name} has {got} entries, expected {want}")));
    }
    Ok(())
}

fn check_sites(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::Invalid(format!("a chain needs at least 2 sites, got {n}")));
    }
    Ok(())
}

/// `H = −Σ σz_i σz_{i+1} − Σ (h σz_i + g_i σx_i)`.
pub fn build_tfim(n: usize, h: f64, g: &[f64]) -> Result<BuiltModel> {
    build_tfim_with_coupling(n, h, g, 1.0)
}

/// TFIM with bond strength `zz`; `zz = 0` leaves a purely local Hamiltonian.
pub fn build_tfim_with_coupling(n: usize, h: f64, g: &[f64], zz: f64) -> Result<BuiltModel> {
    check_sites(n)?;
    check_len("g", g.len(), n)?;
    let tf = TensorFactorization::uniform(2, n)?;
    let d = tf.dim();
    let bit = |site: usize| 1usize << (n - 1 - site);
    let z = |s: usize, site: usize| if s & bit(site) == 0 { 1.0 } else { -1.0 };
    let mut m = DMatrix::<C64>::zeros(d, d);
    for s in 0..d {
        let mut diag = 0.0;
        for i in 0..n {
            diag -= h * z(s, i);
            if i + 1 < n {
                diag -= zz * z(s, i) * z(s, i + 1);
            }
            m[(s ^ bit(i), s)] -= c(g[i], 0.0);
        }
        m[(s, s)] += c(diag, 0.0);
    }
    Ok(BuiltModel {
        hamiltonian: DenseOperator::hermitian(m)?,
        tf,
        couplings: Couplings::Tfim {
            h,
            g: g.to_vec(),
            zz,
        },
        leakage: None,
    })
}

/// `H = Σ J_j e_{j,j+1}` with `e = Σ_{αβ} |αα⟩⟨ββ|` on neighbouring qutrits.
pub fn build_temperley_lieb(n: usize, j: &[f64]) -> Result<BuiltModel> {
    check_sites(n)?;
    check_len("J", j.len(), n - 1)?;
    let tf = TensorFactorization::uniform(3, n)?;
    let d = tf.dim();
    let strides = crate::linalg::strides(tf.dims());
    let digit = |s: usize, site: usize| (s / strides[site]) % 3;
    let mut m = DMatrix::<C64>::zeros(d, d);
    for s in 0..d {
        for (b, &jb) in j.iter().enumerate() {
            let (a0, a1) = (digit(s, b), digit(s, b + 1));
            if a0 != a1 {
                continue;
            }
            let base = s - a0 * strides[b] - a1 * strides[b + 1];
            for beta in 0..3 {
                let r = base + beta * (strides[b] + strides[b + 1]);
                m[(r, s)] += c(jb, 0.0);
            }
        }
    }
    Ok(BuiltModel {
        hamiltonian: DenseOperator::hermitian(m)?,
        tf,
        couplings: Couplings::TemperleyLieb { j: j.to_vec() },
        leakage: None,
    })
}

/// Fock state of `2N` fermionic modes as a bit mask; mode `2·site + spin`
/// with spin 0 = up, 1 = down.
type Fock = u64;

/// `c_k` or `c†_k` under the Jordan-Wigner ordering of the modes.
fn apply_mode(state: Fock, k: usize, create: bool) -> Option<(Fock, f64)> {
    let occupied = state & (1 << k) != 0;
    if occupied == create {
        return None;
    }
    let below = (state & ((1u64 << k) - 1)).count_ones();
    let sign = if below % 2 == 0 { 1.0 } else { -1.0 };
    Some((state ^ (1 << k), sign))
}

/// `c_a c†_b |state⟩`.
fn hop(state: Fock, a: usize, b: usize) -> Option<(Fock, f64)> {
    let (s1, x1) = apply_mode(state, b, true)?;
    let (s2, x2) = apply_mode(s1, a, false)?;
    Some((s2, x1 * x2))
}

/// Local constrained digit (0 empty, 1 up, 2 down) to Fock bits of a site.
fn digit_to_bits(site: usize, digit: usize) -> Fock {
    match digit {
        0 => 0,
        1 => 1 << (2 * site),
        _ => 1 << (2 * site + 1),
    }
}

/// Constrained index of a Fock state, if it has no doubly occupied site.
fn fock_to_index(state: Fock, n: usize) -> Option<usize> {
    let mut idx = 0;
    for site in 0..n {
        let up = state & (1 << (2 * site)) != 0;
        let dn = state & (1 << (2 * site + 1)) != 0;
        let digit = match (up, dn) {
            (false, false) => 0,
            (true, false) => 1,
            (false, true) => 2,
            (true, true) => return None,
        };
        idx = idx * 3 + digit;
    }
    Some(idx)
}

fn sz(state: Fock, site: usize) -> f64 {
    let up = (state >> (2 * site)) & 1;
    let dn = (state >> (2 * site + 1)) & 1;
    up as f64 - dn as f64
}

/// t-Jz chain: the Fock-space Hamiltonian
/// `Σ_j [−t_j Σ_σ (c_{jσ} c†_{j+1,σ} + h.c.) + Jz_j S^z_j S^z_{j+1}] + Σ_j (h_j S^z_j + g_j (S^z_j)²)`
/// with `S^z = n↑ − n↓`, restricted as `P H P` to the states without double
/// occupancy. Local basis `(empty, up, down)`.
pub fn build_tjz(n: usize, t: &[f64], jz: &[f64], hz: &[f64], gz: &[f64]) -> Result<BuiltModel> {
    check_sites(n)?;
    check_len("t", t.len(), n - 1)?;
    check_len("Jz", jz.len(), n - 1)?;
    check_len("h", hz.len(), n)?;
    check_len("g", gz.len(), n)?;
    let fock_dim = 1usize
        .checked_shl(2 * n as u32)
        .filter(|_| 2 * n < usize::BITS as usize)
        .unwrap_or(usize::MAX);
    let max = Tolerances::DEFAULT.max_fock_dim;
    if fock_dim > max {
        return Err(Error::Size { dim: fock_dim, max });
    }
    let tf = TensorFactorization::uniform(3, n)?;
    let d = tf.dim();
    let strides = crate::linalg::strides(tf.dims());
    let mut m = DMatrix::<C64>::zeros(d, d);
    let mut leak_sq = 0.0;
    for col in 0..d {
        let state: Fock = (0..n)
            .map(|site| digit_to_bits(site, (col / strides[site]) % 3))
            .fold(0, |a, b| a | b);
        let mut out: BTreeMap<Fock, f64> = BTreeMap::new();
        let mut diag = 0.0;
        for site in 0..n {
            let s = sz(state, site);
            diag += hz[site] * s + gz[site] * s * s;
            if site + 1 < n {
                diag += jz[site] * s * sz(state, site + 1);
            }
        }
        *out.entry(state).or_default() += diag;
        for bond in 0..n - 1 {
            for spin in 0..2 {
                let a = 2 * bond + spin;
                let b = 2 * (bond + 1) + spin;
                for (x, y) in [(a, b), (b, a)] {
                    if let Some((target, sign)) = hop(state, x, y) {
                        *out.entry(target).or_default() += -t[bond] * sign;
                    }
                }
            }
        }
        for (target, amp) in out {
            match fock_to_index(target, n) {
                Some(row) => m[(row, col)] += c(amp, 0.0),
                None => leak_sq += amp * amp,
            }
        }
    }
    Ok(BuiltModel {
        hamiltonian: DenseOperator::hermitian(m)?,
        tf,
        couplings: Couplings::TJz {
            t: t.to_vec(),
            jz: jz.to_vec(),
            hz: hz.to_vec(),
            gz: gz.to_vec(),
        },
        leakage: Some(libm::sqrt(leak_sq)),
    })
}

/// Total particle number and total `S^z` of the constrained t-Jz basis, as diagonals.
pub fn tjz_charges(n: usize) -> (Vec<f64>, Vec<f64>) {
    let d = 3usize.pow(n as u32);
    let mut num = vec![0.0; d];
    let mut spin = vec![0.0; d];
    for s in 0..d {
        let mut x = s;
        for _ in 0..n {
            match x % 3 {
                1 => {
                    num[s] += 1.0;
                    spin[s] += 1.0;
                }
                2 => {
                    num[s] += 1.0;
                    spin[s] -= 1.0;
                }
                _ => {}
            }
            x /= 3;
        }
    }
    (num, spin)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{herm_eig, kron_all, pauli};

    fn site_op(op: &DenseOperator, site: usize, n: usize) -> DenseOperator {
        let ops: Vec<DenseOperator> = (0..n)
            .map(|k| if k == site { op.clone() } else { DenseOperator::identity(2) })
            .collect();
        kron_all(&ops).unwrap()
    }

    fn tfim_oracle(n: usize, h: f64, g: &[f64]) -> DenseOperator {
        let mut acc = DenseOperator::zeros(1 << n);
        for i in 0..n {
            if i + 1 < n {
                let zz = site_op(&pauli::z(), i, n).mul(&site_op(&pauli::z(), i + 1, n));
                acc = acc.sub(&zz);
            }
            acc = acc.sub(&site_op(&pauli::z(), i, n).scale_real(h));
            acc = acc.sub(&site_op(&pauli::x(), i, n).scale_real(g[i]));
        }
        acc
    }

    #[test]
    fn tfim_examples() {
        let m = build_tfim(2, 0.0, &[0.0, 0.0]).unwrap();
        let es = herm_eig(&m.hamiltonian).unwrap();
        let expect = [-1.0, -1.0, 1.0, 1.0];
        for (a, b) in es.values.iter().zip(expect) {
            assert!((a - b).abs() < 1e-14);
        }
        let m = build_tfim(2, 0.0, &[1.0, 1.0]).unwrap();
        let es = herm_eig(&m.hamiltonian).unwrap();
        for k in 0..4 {
            assert!((es.values[k] + es.values[3 - k]).abs() < 1e-12);
        }
        let g = [1.0, 1.0, 1.0];
        let m = build_tfim(3, 0.0, &g).unwrap();
        assert!(m.hamiltonian.max_abs_diff(&tfim_oracle(3, 0.0, &g)) < 1e-14);
        let g = [0.3, -1.2, 2.0, 0.7];
        let m = build_tfim(4, 0.5, &g).unwrap();
        assert!(m.hamiltonian.max_abs_diff(&tfim_oracle(4, 0.5, &g)) < 1e-14);
        assert!(build_tfim(3, 0.0, &[1.0]).is_err());
    }

    #[test]
    fn temperley_lieb_examples() {
        let m = build_temperley_lieb(2, &[1.0]).unwrap();
        let e = &m.hamiltonian;
        assert!(e.mul(e).max_abs_diff(&e.scale_real(3.0)) < 1e-14);
        let es = herm_eig(e).unwrap();
        assert!((es.values[8] - 3.0).abs() < 1e-12);
        assert!(es.values[..8].iter().all(|x| x.abs() < 1e-12));
        let j = [0.3, 0.9, 0.5];
        let m = build_temperley_lieb(4, &j).unwrap();
        assert!((m.hamiltonian.trace().re - 3.0 * j.iter().sum::<f64>() * 9.0).abs() < 1e-12);
    }

    #[test]
    fn temperley_lieb_trace_per_bond() {
        // Each e_{j,j+1} has trace 3 on its two qutrits, times the identity elsewhere.
        let m = build_temperley_lieb(2, &[0.4]).unwrap();
        assert!((m.hamiltonian.trace().re - 3.0 * 0.4).abs() < 1e-14);
    }

    #[test]
    fn tjz_diagonal_without_hopping() {
        let m = build_tjz(3, &[0.0, 0.0], &[0.4, 0.7], &[0.1, 0.2, 0.3], &[0.5, 0.6, 0.9]).unwrap();
        let h = &m.hamiltonian;
        for r in 0..27 {
            for cc in 0..27 {
                if r != cc {
                    assert_eq!(h.get(r, cc), c(0.0, 0.0));
                }
            }
        }
        assert_eq!(m.leakage, Some(0.0));
        // |↑, ↓, ∅⟩ = digits (1, 2, 0)
        let idx = 9 + 2 * 3;
        let expected = 0.4 * (1.0 * -1.0) + 0.1 - 0.2 + 0.5 + 0.6;
        assert!((h.get(idx, idx).re - expected).abs() < 1e-14);
    }

    #[test]
    fn tjz_hopping_amplitudes() {
        // One particle on two sites: |↑,∅⟩ = 3, |∅,↑⟩ = 1.
        // c_{0↑} c†_{1↑} |↑,∅⟩: c†_{mode 2} passes one occupied mode (−1),
        // then c_{mode 0} passes none, so ⟨∅,↑|H|↑,∅⟩ = −t·(−1) = t.
        let t = 0.8;
        let m = build_tjz(2, &[t], &[0.0], &[0.0, 0.0], &[0.0, 0.0]).unwrap();
        let h = &m.hamiltonian;
        assert!((h.get(1, 3).re - t).abs() < 1e-15);
        assert!((h.get(3, 1).re - t).abs() < 1e-15);
        assert!((h.get(2, 6).re - t).abs() < 1e-15);
        // |↑,↓⟩ can only hop into a doubly occupied site: those amplitudes leak.
        assert!(m.leakage.unwrap() > 0.0);
        // No intervening occupied mode survives in the constrained space, so
        // every allowed hop carries the same +t.
        let m = build_tjz(3, &[0.3, 0.7], &[0.0, 0.0], &[0.0; 3], &[0.0; 3]).unwrap();
        for r in 0..27 {
            for cc in 0..27 {
                let v = m.hamiltonian.get(r, cc).re;
                assert!(v == 0.0 || (v - 0.3).abs() < 1e-15 || (v - 0.7).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn tjz_symmetries() {
        let mut g = SeededGenerator::new(3);
        let cpl = sample_disorder(Family::TJz, 4, TfimRegime::Integrable, &mut g);
        let m = build(&cpl).unwrap();
        let (num, spin) = tjz_charges(4);
        for q in [num, spin] {
            let qd: Vec<C64> = q.iter().map(|&x| c(x, 0.0)).collect();
            let op = DenseOperator::diagonal(&qd);
            assert!(m.hamiltonian.commutator(&op).max_abs() < 1e-12);
        }
    }

    #[test]
    fn tjz_size_limit() {
        assert!(build_tjz(8, &[0.0; 7], &[0.0; 7], &[0.0; 8], &[0.0; 8]).is_err());
    }

    #[test]
    fn disorder_ranges_and_repetitions() {
        assert_eq!(disorder_repetitions(10), 20);
        assert_eq!(disorder_repetitions(11), 18);
        let mut g = SeededGenerator::new(5);
        for _ in 0..20 {
            if let Couplings::Tfim { h, g: gs, .. } = sample_disorder(Family::Tfim, 10, TfimRegime::Mbl, &mut g) {
                assert_eq!(h, MBL_FIELD);
                assert!(gs.iter().all(|x| (-10.0..=10.0).contains(x)));
            }
            if let Couplings::TJz { t, jz, hz, gz } = sample_disorder(Family::TJz, 5, TfimRegime::Mbl, &mut g) {
                assert!(t.iter().chain(&jz).chain(&hz).chain(&gz).all(|x| (0.0..=1.0).contains(x)));
            }
            if let Couplings::TemperleyLieb { j } = sample_disorder(Family::TemperleyLieb, 5, TfimRegime::Mbl, &mut g) {
                assert!(j.iter().all(|x| (0.0..=1.0).contains(x)));
            }
        }
    }

    #[test]
    fn config_resolution_is_reproducible() {
        let cfg = ModelConfig::tfim(6, TfimRegime::Anderson).with_seed(9);
        assert_eq!(cfg.resolve(2).unwrap(), cfg.resolve(2).unwrap());
        assert_ne!(cfg.resolve(2).unwrap(), cfg.resolve(3).unwrap());
        assert!(ModelConfig::new(Family::Tfim, 4).validate().is_err());
        assert!(ModelConfig::new(Family::TJz, 1).validate().is_err());
        let built = cfg.build(0).unwrap();
        assert_eq!(built.tf.dim(), 64);
    }
}
