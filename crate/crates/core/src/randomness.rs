//! Seeded Haar sampling and closed-form typical values of the TPS distance.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{DenseOperator, C64};
use crate::structure::AlgebraSet;

/// Counter-based generator: a ChaCha8 stream selected by `(seed, stream)`.
///
/// Stream 0 is the root stream; [`SeededGenerator::fork`] hands out stream
/// `index + 1`, so sample `k` of a Monte Carlo run always sees the same
/// numbers regardless of how the samples are scheduled.
#[derive(Debug, Clone)]
pub struct SeededGenerator {
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
}

impl SeededGenerator {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { seed, stream, rng }
    }

    /// Independent generator for task `index`.
    pub fn fork(&self, index: u64) -> Self {
        Self::with_stream(self.seed, index.wrapping_add(1))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    pub fn gaussian(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    /// Complex normal with `E|z|² = 1`.
    pub fn complex_gaussian(&mut self) -> C64 {
        let s = core::f64::consts::FRAC_1_SQRT_2;
        C64::new(self.gaussian() * s, self.gaussian() * s)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.rng.random::<f64>()
    }
}

impl RngCore for SeededGenerator {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// Haar-random unitary from the QR decomposition of a Ginibre matrix, with
/// the phases of `diag(R)` moved into `Q`.
pub fn haar_unitary(d: usize, gen: &mut SeededGenerator) -> DenseOperator {
    let g = DMatrix::from_fn(d, d, |_, _| gen.complex_gaussian());
    let qr = g.qr();
    let (mut q, r) = qr.unpack();
    for c in 0..d {
        let rc = r[(c, c)];
        let n = rc.norm();
        let phase = if n > 0.0 { rc / n } else { C64::new(1.0, 0.0) };
        for v in q.column_mut(c).iter_mut() {
            *v *= phase;
        }
    }
    DenseOperator::unitary(q).expect("QR factor is unitary")
}

/// Haar-random pure state in `C^q`.
pub fn haar_state(q: usize, gen: &mut SeededGenerator) -> Vec<C64> {
    let mut v: Vec<C64> = (0..q).map(|_| gen.complex_gaussian()).collect();
    let n = libm::sqrt(v.iter().map(|z| z.norm_sqr()).sum::<f64>());
    for z in &mut v {
        *z /= n;
    }
    v
}

/// A Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
}

impl Estimate {
    /// Mean and standard error (unbiased sample variance).
    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len();
        // Shifting by the first sample keeps constant series exact.
        let shift = xs.first().copied().unwrap_or(0.0);
        let mean = shift + xs.iter().map(|x| x - shift).sum::<f64>() / n as f64;
        let var = if n > 1 {
            xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        Self {
            mean,
            stderr: libm::sqrt(var / n as f64),
            samples: n,
        }
    }

    /// `|mean - target| ≤ k·stderr`, treating a zero error bar as exact
    /// up to `floor`.
    pub fn within(&self, target: f64, k: f64, floor: f64) -> bool {
        (self.mean - target).abs() <= k * self.stderr + floor
    }
}

/// Haar average `1 - dim(W/C1)/(d² - 1)`.
pub fn typical_phi(aset: &AlgebraSet) -> Result<f64> {
    match aset {
        AlgebraSet::FullTps(tf) => {
            let d = tf.dim() as f64;
            if tf.sites() == 1 {
                return Ok(0.0);
            }
            Ok(1.0 - aset.w_traceless_dim() as f64 / (d * d - 1.0))
        }
        _ => Err(Error::Unsupported(
            "typical value is defined for full tensor product structures".into(),
        )),
    }
}

/// Haar average for `m` equal clusters of a `d`-dimensional space.
pub fn typical_phi_clustered(d: usize, m: usize) -> Result<f64> {
    if m == 0 || d < 2 {
        return Err(Error::Invalid(format!("invalid clustering d={d}, M={m}")));
    }
    let q = integer_root(d, m).ok_or_else(|| {
        Error::Invalid(format!("{d} is not a perfect {m}-th power; clusters must be equal"))
    })?;
    let d2 = (d as f64) * (d as f64);
    let q2 = (q as f64) * (q as f64);
    Ok(1.0 - m as f64 * (q2 - 1.0) / (d2 - 1.0))
}

fn integer_root(d: usize, m: usize) -> Option<usize> {
    let guess = libm::round(libm::pow(d as f64, 1.0 / m as f64)) as usize;
    for q in guess.saturating_sub(1)..=guess + 1 {
        if q >= 2 && q.checked_pow(m as u32) == Some(d) {
            return Some(q);
        }
    }
    None
}

/// Typical value for a qubit chain clustered into groups of `n_i` qubits,
/// with the best achievable value for the same number of qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitTypical {
    pub value: f64,
    /// `1 - 3N/(2^{2N} - 1)`.
    pub max_value: f64,
    /// The clustering attaining `max_value`: all ones.
    pub argmax: Vec<u32>,
}

pub fn typical_phi_qubit(n: &[u32]) -> Result<QubitTypical> {
    if n.is_empty() || n.iter().any(|&k| k == 0) {
        return Err(Error::Invalid("cluster sizes must be at least one qubit".into()));
    }
    let total: u32 = n.iter().sum();
    if total > 30 {
        return Err(Error::Size {
            dim: usize::MAX,
            max: 1 << 30,
        });
    }
    let full = libm::pow(2.0, 2.0 * total as f64) - 1.0;
    let local: f64 = n
        .iter()
        .map(|&k| libm::pow(2.0, 2.0 * k as f64) - 1.0)
        .sum();
    let value = if n.len() == 1 { 0.0 } else { 1.0 - local / full };
    let max_value = if total == 1 {
        0.0
    } else {
        1.0 - 3.0 * total as f64 / full
    };
    Ok(QubitTypical {
        value,
        max_value,
        argmax: alloc::vec![1; total as usize],
    })
}
