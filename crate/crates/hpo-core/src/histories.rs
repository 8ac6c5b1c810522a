//! Finite-dimensional consistent-histories machinery: class operators,
//! the decoherence functional, and homogeneous history propositions
//! realized as genuine projectors on a tensor product of copies of the
//! single-time Hilbert space.
//!
//! A history is a time-ordered list of single-time projectors. Its class
//! operator interleaves Schrodinger evolution between the sampling times
//! and is generally *not* a projector; the same data does define a
//! projector on the n-fold tensor product, which is the structural point
//! the module exists to exhibit.

use alloc::string::String;
use alloc::vec::Vec;

use crate::linalg::{self, CMat};
use crate::oscillator::OscillatorParams;
use crate::{C64, HpoError, Result};

/// Single-time quantum system: Hamiltonian and initial density matrix on
/// a finite-dimensional Hilbert space.
#[derive(Debug, Clone)]
pub struct SingleTimeSystem {
    dim: usize,
    hamiltonian: CMat,
    rho: CMat,
    hbar: f64,
}

impl SingleTimeSystem {
    pub fn new(hamiltonian: CMat, rho: CMat, hbar: f64) -> Result<Self> {
        if !hamiltonian.is_square() || !rho.is_square() || hamiltonian.rows() != rho.rows() {
            return Err(HpoError::DimensionMismatch(
                "Hamiltonian and density matrix must be square and equal-sized".into(),
            ));
        }
        let dim = hamiltonian.rows();
        if dim == 0 {
            return Err(HpoError::Precondition("empty Hilbert space".into()));
        }
        if !(hbar > 0.0) {
            return Err(HpoError::Precondition("hbar must be positive".into()));
        }
        let scale = hamiltonian.max_abs().max(1.0);
        if !hamiltonian.is_hermitian(1e-12 * scale) {
            return Err(HpoError::Precondition("Hamiltonian must be Hermitian".into()));
        }
        if !rho.is_hermitian(1e-12) {
            return Err(HpoError::Precondition("density matrix must be Hermitian".into()));
        }
        if (rho.trace() - C64::new(1.0, 0.0)).norm() > 1e-12 {
            return Err(HpoError::Precondition("density matrix must have unit trace".into()));
        }
        let eig = linalg::hermitian_eig(&rho)?;
        if eig.values.iter().any(|&v| v < -1e-12) {
            return Err(HpoError::Precondition("density matrix must be positive".into()));
        }
        Ok(SingleTimeSystem { dim, hamiltonian, rho, hbar })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn hamiltonian(&self) -> &CMat {
        &self.hamiltonian
    }

    pub fn rho(&self) -> &CMat {
        &self.rho
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// Schrodinger propagator `U(t, t') = exp(-i (t - t') H / hbar)`.
    pub fn propagator(&self, t: f64, t_prime: f64) -> Result<CMat> {
        linalg::expm_hermitian(&self.hamiltonian, C64::new(0.0, -(t - t_prime) / self.hbar))
    }
}

/// Checks `P` is an orthogonal projector: `P = P† = P^2` to `tol`.
pub fn is_projector(p: &CMat, tol: f64) -> bool {
    p.is_square() && p.is_hermitian(tol) && p.mul(p).sub(p).max_abs() <= tol
}

/// Homogeneous history proposition: projectors at strictly increasing
/// times, anchored at a fiducial initial time `t0`.
#[derive(Debug, Clone)]
pub struct HistoryProposition {
    t0: f64,
    times: Vec<f64>,
    projectors: Vec<CMat>,
    label: String,
}

impl HistoryProposition {
    pub fn new(
        t0: f64,
        times: Vec<f64>,
        projectors: Vec<CMat>,
        label: impl Into<String>,
    ) -> Result<Self> {
        if times.is_empty() || times.len() != projectors.len() {
            return Err(HpoError::Precondition(
                "a history needs one projector per sampling time".into(),
            ));
        }
        let mut prev = t0;
        for &t in &times {
            if !(t > prev) {
                return Err(HpoError::Precondition(
                    "sampling times must be strictly increasing and later than t0".into(),
                ));
            }
            prev = t;
        }
        let dim = projectors[0].rows();
        for p in &projectors {
            if p.rows() != dim || p.cols() != dim {
                return Err(HpoError::DimensionMismatch(
                    "all history slots must act on the same space".into(),
                ));
            }
            if !is_projector(p, 1e-12) {
                return Err(HpoError::Precondition("history slot is not a projector".into()));
            }
        }
        Ok(HistoryProposition { t0, times, projectors, label: label.into() })
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn projectors(&self) -> &[CMat] {
        &self.projectors
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn n_times(&self) -> usize {
        self.times.len()
    }

    pub fn dim(&self) -> usize {
        self.projectors[0].rows()
    }

    /// The proposition as a genuine projector on the n-fold tensor
    /// product of the single-time space (times ordered left to right).
    pub fn tensor_projector(&self) -> CMat {
        let mut out = self.projectors[0].clone();
        for p in &self.projectors[1..] {
            out = out.kron(p);
        }
        out
    }
}

fn check_history(system: &SingleTimeSystem, h: &HistoryProposition) -> Result<()> {
    if h.dim() != system.dim() {
        return Err(HpoError::DimensionMismatch(
            "history projectors do not act on the system space".into(),
        ));
    }
    Ok(())
}

/// Class operator of a homogeneous history, with evolution interleaved
/// between sampling times and closed back to the anchor time:
///
/// ```text
///   C(h) = U(t0, t1) P_1 U(t1, t2) P_2 ... P_n U(t_n, t0)
/// ```
pub fn class_operator(system: &SingleTimeSystem, h: &HistoryProposition) -> Result<CMat> {
    check_history(system, h)?;
    let mut out = system.propagator(h.t0(), h.times()[0])?;
    for k in 0..h.n_times() {
        out = out.mul(&h.projectors()[k]);
        let next = if k + 1 < h.n_times() { h.times()[k + 1] } else { h.t0() };
        out = out.mul(&system.propagator(h.times()[k], next)?);
    }
    Ok(out)
}

/// Decoherence functional `d(a, b) = tr(C(a)† rho C(b))`.
pub fn decoherence(
    system: &SingleTimeSystem,
    a: &HistoryProposition,
    b: &HistoryProposition,
) -> Result<C64> {
    let ca = class_operator(system, a)?;
    let cb = class_operator(system, b)?;
    Ok(ca.adjoint().mul(system.rho()).mul(&cb).trace())
}

/// An exhaustive exclusive family of histories on a common time support:
/// slot-wise, the projectors at each time resolve the identity.
pub fn check_exhaustive_family(histories: &[&HistoryProposition], tol: f64) -> Result<()> {
    if histories.is_empty() {
        return Err(HpoError::Precondition("empty history family".into()));
    }
    let n_times = histories[0].n_times();
    let dim = histories[0].dim();
    for h in histories {
        if h.n_times() != n_times || h.dim() != dim || h.times() != histories[0].times() {
            return Err(HpoError::Precondition(
                "family members must share the sampling times".into(),
            ));
        }
    }
    // The family must be a full product family: the sum over members of
    // the tensor projectors must be the identity on the product space.
    let mut sum = histories[0].tensor_projector();
    for h in &histories[1..] {
        sum = sum.add(&h.tensor_projector());
    }
    let d = sum.rows();
    if sum.sub(&CMat::identity(d)).max_abs() > tol {
        return Err(HpoError::Precondition(
            "family does not resolve the identity on the history space".into(),
        ));
    }
    Ok(())
}

/// Truncated harmonic oscillator: `H = diag((n + 1/2) hbar omega)` on
/// `dim` levels.
pub fn sho_hamiltonian(dim: usize, params: &OscillatorParams) -> CMat {
    CMat::from_fn(dim, dim, |i, j| {
        if i == j {
            C64::new((i as f64 + 0.5) * params.hbar * params.omega, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Truncated position operator in the number basis:
/// `x_{n, n+1} = sqrt(hbar / 2 m omega) sqrt(n + 1)` (symmetric).
pub fn sho_position(dim: usize, params: &OscillatorParams) -> CMat {
    let s = libm::sqrt(params.hbar / (2.0 * params.mass * params.omega));
    CMat::from_fn(dim, dim, |i, j| {
        if j == i + 1 {
            C64::new(s * libm::sqrt(j as f64), 0.0)
        } else if i == j + 1 {
            C64::new(s * libm::sqrt(i as f64), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Thermal (Gibbs) density matrix `e^{-beta H} / tr` for the truncated
/// oscillator; strictly positive, so decoherence weights are generic.
pub fn sho_gibbs_state(dim: usize, beta: f64, params: &OscillatorParams) -> Result<CMat> {
    if !(beta > 0.0) {
        return Err(HpoError::Precondition("inverse temperature must be positive".into()));
    }
    let h = sho_hamiltonian(dim, params);
    let unnorm = linalg::expm_hermitian(&h, C64::new(-beta, 0.0))?;
    let z = unnorm.trace();
    Ok(unnorm.scale(C64::new(1.0, 0.0) / z))
}

/// Spectral projector of the truncated position operator onto the
/// eigenvalues lying in `[lo, hi)`.
pub fn position_interval_projector(
    dim: usize,
    params: &OscillatorParams,
    lo: f64,
    hi: f64,
) -> Result<CMat> {
    if !(lo < hi) {
        return Err(HpoError::Precondition("empty position interval".into()));
    }
    let x = sho_position(dim, params);
    let eig = linalg::hermitian_eig(&x)?;
    let mut p = CMat::zeros(dim, dim);
    for (k, &ev) in eig.values.iter().enumerate() {
        if ev >= lo && ev < hi {
            for i in 0..dim {
                for j in 0..dim {
                    let add = eig.vectors[(i, k)] * eig.vectors[(j, k)].conj();
                    let cur = p[(i, j)];
                    p.set(i, j, cur + add);
                }
            }
        }
    }
    Ok(p)
}

/// The pair (x < 0 projector, x >= 0 projector); sums to the identity.
pub fn position_sign_projectors(dim: usize, params: &OscillatorParams) -> Result<(CMat, CMat)> {
    let neg = position_interval_projector(dim, params, f64::NEG_INFINITY, 0.0)?;
    let nonneg = CMat::identity(dim).sub(&neg);
    Ok((neg, nonneg))
}
