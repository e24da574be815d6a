//! Numeric tolerances and size limits shared by the library and its tests.

/// One record holding every epsilon and size cap used by the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Maximum entrywise `|A - A†|` accepted for a Hermitian tag.
    pub hermitian: f64,
    /// Maximum entrywise `|A A† - 1|` accepted for a unitary tag.
    pub unitary: f64,
    /// Default comparison tolerance between independent routes.
    pub compare: f64,
    /// Largest Hilbert-space dimension a dense operator may have.
    pub max_dim: usize,
    /// Largest dimension handled by the superoperator and doubled-space oracles.
    pub oracle_max_dim: usize,
    /// Largest Fock-space dimension for the constrained fermion builder.
    pub max_fock_dim: usize,
    /// Energy-gap grouping tolerance for the dephasing oracle.
    pub gap_grouping: f64,
    /// Largest accepted difference between the two half-window averages of
    /// a long-time average before it is flagged as not converged.
    pub half_window: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        hermitian: 1e-12,
        unitary: 1e-10,
        compare: 1e-9,
        max_dim: 65536,
        oracle_max_dim: 64,
        max_fock_dim: 16384,
        gap_grouping: 1e-10,
        half_window: 0.02,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}
