//! Truncated Fock representation of the quadratic algebra: dense or
//! coordinate-list matrices over occupation-number states, distinguished
//! vectors (n-particle and truncated coherent states), and block spectra.
//!
//! The matrix representation is deliberately independent of the symbolic
//! commutator arithmetic; comparing the two on the occupation sectors the
//! truncation represents faithfully is the main internal consistency
//! check of the crate.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::lattice::TestFunction;
use crate::linalg::{self, CMat};
use crate::oscillator::{self, OscillatorParams};
use crate::quadratic::{ModeSpace, QuadraticOperator};
use crate::{C64, HpoError, Result};

/// Largest dimension for which dense matrices are built.
pub const DENSE_CEILING: usize = 4096;

/// Largest number of basis states enumerated at all.
pub const STATE_CEILING: usize = 1_000_000;

/// Occupation-number basis of the Fock space truncated at total particle
/// number `n_max`, ordered by total occupation then lexicographically.
/// The vacuum is always index 0.
#[derive(Debug, Clone)]
pub struct FockBasis {
    modes: ModeSpace,
    n_max: usize,
    states: Vec<Vec<u16>>,
    index: BTreeMap<Vec<u16>, usize>,
}

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

impl FockBasis {
    pub fn new(modes: ModeSpace, n_max: usize) -> Result<Self> {
        let m = modes.size() as u128;
        let mut dim: u128 = 0;
        for total in 0..=(n_max as u128) {
            dim = dim.saturating_add(binomial(total + m - 1, m - 1));
        }
        if dim > STATE_CEILING as u128 {
            return Err(HpoError::Capacity(
                "truncated Fock space exceeds the enumerable state ceiling".into(),
            ));
        }
        let m = modes.size();
        let mut states = Vec::with_capacity(dim as usize);
        let mut current = vec![0u16; m];
        for total in 0..=n_max {
            enumerate_sector(&mut states, &mut current, 0, total as u16);
        }
        let index = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        Ok(FockBasis { modes, n_max, states, index })
    }

    pub fn modes(&self) -> &ModeSpace {
        &self.modes
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn state(&self, i: usize) -> &[u16] {
        &self.states[i]
    }

    pub fn index_of(&self, occupation: &[u16]) -> Option<usize> {
        self.index.get(occupation).copied()
    }

    pub fn total_occupation(&self, i: usize) -> usize {
        self.states[i].iter().map(|&n| n as usize).sum()
    }

    /// Indices of the basis states with total occupation exactly `n`.
    pub fn sector(&self, n: usize) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.total_occupation(i) == n).collect()
    }
}

fn enumerate_sector(out: &mut Vec<Vec<u16>>, current: &mut Vec<u16>, mode: usize, left: u16) {
    if mode + 1 == current.len() {
        current[mode] = left;
        out.push(current.clone());
        current[mode] = 0;
        return;
    }
    for n in (0..=left).rev() {
        current[mode] = n;
        enumerate_sector(out, current, mode + 1, left - n);
    }
    current[mode] = 0;
}

/// Vector of amplitudes over a [`FockBasis`].
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    amplitudes: Vec<C64>,
}

impl FockVector {
    pub fn new(amplitudes: Vec<C64>) -> Self {
        FockVector { amplitudes }
    }

    pub fn zero(dim: usize) -> Self {
        FockVector { amplitudes: vec![C64::new(0.0, 0.0); dim] }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.amplitudes.iter().map(|z| z.norm_sqr()).sum())
    }

    /// Inner product, conjugate-linear in `self`.
    pub fn dot(&self, other: &FockVector) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(HpoError::DimensionMismatch("vector dimensions differ".into()));
        }
        Ok(linalg::vdot(&self.amplitudes, &other.amplitudes))
    }
}

/// One matrix element action: scatter `amp * A |state_j>` into `emit`.
fn apply_to_state(
    op: &QuadraticOperator,
    basis: &FockBasis,
    j: usize,
    mut emit: impl FnMut(usize, C64),
) {
    let n = basis.modes().size();
    let state = basis.state(j);
    let total: u16 = state.iter().sum();
    let tiny = 0.0f64;

    let c = op.scalar();
    if c.norm() > tiny {
        emit(j, c);
    }

    // Linear creation.
    if (total as usize) < basis.n_max() {
        for (i, &a) in op.lin_create().iter().enumerate() {
            if a.norm() > tiny {
                let mut s = state.to_vec();
                s[i] += 1;
                let amp = a * libm::sqrt(s[i] as f64);
                emit(basis.index_of(&s).expect("within truncation"), amp);
            }
        }
    }

    // Linear annihilation.
    for (i, &b) in op.lin_annih().iter().enumerate() {
        if b.norm() > tiny && state[i] > 0 {
            let mut s = state.to_vec();
            let amp = b * libm::sqrt(s[i] as f64);
            s[i] -= 1;
            emit(basis.index_of(&s).expect("within truncation"), amp);
        }
    }

    // b†_i b_k terms conserve the total occupation.
    for k in 0..n {
        if state[k] == 0 {
            continue;
        }
        for i in 0..n {
            let m = op.quad_nc()[(i, k)];
            if m.norm() > tiny {
                let mut s = state.to_vec();
                let a1 = libm::sqrt(s[k] as f64);
                s[k] -= 1;
                s[i] += 1;
                let a2 = libm::sqrt(s[i] as f64);
                emit(basis.index_of(&s).expect("within truncation"), m * (a1 * a2));
            }
        }
    }

    // Pair creation (1/2) P_ik b†_i b†_k; states above n_max are dropped
    // by the truncation.
    if (total as usize) + 2 <= basis.n_max() {
        for k in 0..n {
            for i in 0..n {
                let p = op.quad_cc()[(i, k)];
                if p.norm() > tiny {
                    let mut s = state.to_vec();
                    s[k] += 1;
                    let a1 = libm::sqrt(s[k] as f64);
                    s[i] += 1;
                    let a2 = libm::sqrt(s[i] as f64);
                    emit(
                        basis.index_of(&s).expect("within truncation"),
                        p * (0.5 * a1 * a2),
                    );
                }
            }
        }
    }

    // Pair annihilation (1/2) Q_ik b_i b_k.
    for k in 0..n {
        if state[k] == 0 {
            continue;
        }
        for i in 0..n {
            let q = op.quad_aa()[(i, k)];
            if q.norm() > tiny {
                let mut s = state.to_vec();
                let a1 = libm::sqrt(s[k] as f64);
                s[k] -= 1;
                if s[i] == 0 {
                    continue;
                }
                let a2 = libm::sqrt(s[i] as f64);
                s[i] -= 1;
                emit(
                    basis.index_of(&s).expect("within truncation"),
                    q * (0.5 * a1 * a2),
                );
            }
        }
    }
}

fn check_basis(op: &QuadraticOperator, basis: &FockBasis) -> Result<()> {
    if op.modes() != basis.modes() {
        return Err(HpoError::DimensionMismatch(
            "operator and basis mode spaces differ".into(),
        ));
    }
    Ok(())
}

/// Dense truncated matrix of the operator. Errors with `Capacity` above
/// [`DENSE_CEILING`]; use [`to_coo`] for larger spaces.
pub fn to_matrix(op: &QuadraticOperator, basis: &FockBasis) -> Result<CMat> {
    check_basis(op, basis)?;
    let d = basis.dim();
    if d > DENSE_CEILING {
        return Err(HpoError::Capacity(
            "dense Fock matrix above the 4096-dimension ceiling; use the coordinate list".into(),
        ));
    }
    let mut m = CMat::zeros(d, d);
    for j in 0..d {
        apply_to_state(op, basis, j, |i, amp| {
            let cur = m[(i, j)];
            m.set(i, j, cur + amp);
        });
    }
    Ok(m)
}

/// Coordinate-list (row, column, value) representation, duplicate-free.
pub fn to_coo(op: &QuadraticOperator, basis: &FockBasis) -> Result<Vec<(usize, usize, C64)>> {
    check_basis(op, basis)?;
    let mut entries: BTreeMap<(usize, usize), C64> = BTreeMap::new();
    for j in 0..basis.dim() {
        apply_to_state(op, basis, j, |i, amp| {
            *entries.entry((i, j)).or_insert(C64::new(0.0, 0.0)) += amp;
        });
    }
    Ok(entries
        .into_iter()
        .filter(|(_, v)| v.norm() > 0.0)
        .map(|((i, j), v)| (i, j, v))
        .collect())
}

/// Apply the operator to a vector without materializing the matrix.
pub fn apply(op: &QuadraticOperator, basis: &FockBasis, v: &FockVector) -> Result<FockVector> {
    check_basis(op, basis)?;
    if v.dim() != basis.dim() {
        return Err(HpoError::DimensionMismatch("vector does not match the basis".into()));
    }
    let mut out = vec![C64::new(0.0, 0.0); basis.dim()];
    for j in 0..basis.dim() {
        let a = v.amplitudes()[j];
        if a.norm() == 0.0 {
            continue;
        }
        apply_to_state(op, basis, j, |i, amp| {
            out[i] += amp * a;
        });
    }
    Ok(FockVector::new(out))
}

/// Unnormalized n-particle vector `b†_{i_1} ... b†_{i_n} |0>`; repeated
/// mode indices contribute `sqrt(n_i!)` factors.
pub fn n_particle_vector(basis: &FockBasis, mode_indices: &[usize]) -> Result<FockVector> {
    if mode_indices.len() > basis.n_max() {
        return Err(HpoError::Capacity(
            "particle count exceeds the Fock truncation".into(),
        ));
    }
    let m = basis.modes().size();
    let mut occ = vec![0u16; m];
    for &i in mode_indices {
        if i >= m {
            return Err(HpoError::Precondition("mode index out of range".into()));
        }
        occ[i] += 1;
    }
    let mut amp = 1.0f64;
    for &n in &occ {
        for k in 1..=(n as u64) {
            amp *= libm::sqrt(k as f64);
        }
    }
    let idx = basis
        .index_of(&occ)
        .ok_or_else(|| HpoError::Capacity("state not represented in the truncation".into()))?;
    let mut v = FockVector::zero(basis.dim());
    v.amplitudes[idx] = C64::new(amp, 0.0);
    Ok(v)
}

/// Truncated unnormalized coherent vector `exp(Σ z_i b†_i) |0>` with
/// `z_i = sqrt(dt) phi_i`, and the exact squared-norm weight lost to the
/// truncation, `e^s - Σ_{k <= n_max} s^k / k!` with `s = <phi, phi>`.
pub fn coherent_vector(basis: &FockBasis, phi: &TestFunction) -> Result<(FockVector, f64)> {
    let lat = basis
        .modes()
        .time_lattice()
        .ok_or_else(|| HpoError::Precondition("coherent vectors need time-lattice modes".into()))?;
    if lat != phi.lattice() || basis.modes().internal_dim() != 1 {
        return Err(HpoError::DimensionMismatch(
            "coherent amplitude function does not match the mode space".into(),
        ));
    }
    let sdt = libm::sqrt(lat.dt());
    let z: Vec<C64> = phi.values().iter().map(|v| v * sdt).collect();
    let mut amps = vec![C64::new(0.0, 0.0); basis.dim()];
    for i in 0..basis.dim() {
        let occ = basis.state(i);
        let mut a = C64::new(1.0, 0.0);
        for (k, &n) in occ.iter().enumerate() {
            for j in 1..=(n as u64) {
                a = a * z[k] / libm::sqrt(j as f64);
            }
        }
        amps[i] = a;
    }
    let s: f64 = z.iter().map(|v| v.norm_sqr()).sum();
    let mut partial = 0.0f64;
    let mut term = 1.0f64;
    for k in 0..=basis.n_max() {
        if k > 0 {
            term *= s / k as f64;
        }
        partial += term;
    }
    let tail = (libm::exp(s) - partial).max(0.0);
    Ok((FockVector::new(amps), tail))
}

/// Exact overlap law for unnormalized coherent vectors:
/// `<exp phi | exp psi> = e^{<phi, psi>}`.
pub fn coherent_overlap_exact(phi: &TestFunction, psi: &TestFunction) -> Result<C64> {
    let ip = crate::lattice::inner_product(phi, psi)?;
    Ok(C64::from_polar(libm::exp(ip.re), ip.im))
}

/// Eigenvalues of a Hermitian, number-conserving operator restricted to
/// the `n`-particle sector.
pub fn sector_spectrum(
    op: &QuadraticOperator,
    basis: &FockBasis,
    n: usize,
) -> Result<Vec<f64>> {
    check_basis(op, basis)?;
    if !op.is_hermitian(1e-10) {
        return Err(HpoError::Precondition("spectrum requires a Hermitian operator".into()));
    }
    if !op.is_number_conserving(1e-12) {
        return Err(HpoError::Precondition(
            "spectrum requires a number-conserving operator".into(),
        ));
    }
    if n > basis.n_max() {
        return Err(HpoError::Capacity("sector beyond the truncation".into()));
    }
    let sector = basis.sector(n);
    let full = to_matrix(op, basis)?;
    let d = sector.len();
    let sub = CMat::from_fn(d, d, |i, j| full[(sector[i], sector[j])]);
    Ok(linalg::hermitian_eig(&sub)?.values)
}

/// Ground-state two-point function `<0| x_f x_g |0>` evaluated through
/// dense Fock matrices (independent of the symbolic route, which gives
/// `(hbar / 2 m omega) <f, g>`).
pub fn white_noise_correlation(
    basis: &FockBasis,
    f: &TestFunction,
    g: &TestFunction,
    params: &OscillatorParams,
) -> Result<C64> {
    let xf = oscillator::smear_position(basis.modes(), f, params)?;
    let xg = oscillator::smear_position(basis.modes(), g, params)?;
    let mut vac = FockVector::zero(basis.dim());
    vac.amplitudes[0] = C64::new(1.0, 0.0);
    let xg_vac = apply(&xg, basis, &vac)?;
    let xf_dag_vac = apply(&xf.adjoint(), basis, &vac)?;
    xf_dag_vac.dot(&xg_vac)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{inner_product, TimeLattice};
    use crate::linalg::cplx;
    use crate::quadratic::QuadraticOperator;

    fn basis(n_modes: usize, dt: f64, n_max: usize) -> FockBasis {
        let modes = ModeSpace::time(TimeLattice::periodic(n_modes, dt).unwrap());
        FockBasis::new(modes, n_max).unwrap()
    }

    #[test]
    fn basis_dimensions_and_order() {
        // 8 modes, n_max 3: 1 + 8 + 36 + 120 = 165 states.
        let b = basis(8, 0.5, 3);
        assert_eq!(b.dim(), 165);
        assert_eq!(b.total_occupation(0), 0);
        // 4 modes, n_max 6: C(10,4) = 210 states.
        let b = basis(4, 0.5, 6);
        assert_eq!(b.dim(), 210);
        assert_eq!(b.sector(6).len(), 84);
    }

    #[test]
    fn ladder_matrix_elements() {
        let b = basis(2, 1.0, 3);
        let modes = b.modes().clone();
        let create0 = QuadraticOperator::creator(modes.clone(), vec![cplx(1.0, 0.0), cplx(0.0, 0.0)]).unwrap();
        let m = to_matrix(&create0, &b).unwrap();
        // <1,0| b†_0 |0,0> = 1, <2,0| b†_0 |1,0> = sqrt(2).
        let vac = b.index_of(&[0, 0]).unwrap();
        let one = b.index_of(&[1, 0]).unwrap();
        let two = b.index_of(&[2, 0]).unwrap();
        assert!((m[(one, vac)] - cplx(1.0, 0.0)).norm() < 1e-15);
        assert!((m[(two, one)] - cplx(libm::sqrt(2.0), 0.0)).norm() < 1e-15);
        // Annihilation is the adjoint on the truncated space.
        let annih0 = create0.adjoint();
        let ma = to_matrix(&annih0, &b).unwrap();
        assert!(ma.sub(&m.adjoint()).max_abs() < 1e-15);
    }

    #[test]
    fn coo_matches_dense() {
        let b = basis(3, 0.5, 2);
        let modes = b.modes().clone();
        let op = QuadraticOperator::from_parts(
            modes,
            cplx(0.3, -0.1),
            vec![cplx(1.0, 2.0), cplx(0.0, 0.0), cplx(-1.0, 0.5)],
            vec![cplx(0.2, 0.0), cplx(1.5, -0.5), cplx(0.0, 0.0)],
            CMat::from_fn(3, 3, |i, j| cplx((i + j) as f64, (i as f64) - (j as f64))),
            CMat::from_fn(3, 3, |i, j| cplx(1.0 / (1.0 + (i + j) as f64), 0.2)),
            CMat::from_fn(3, 3, |i, j| cplx(0.1 * (i as f64), 0.3 * (j as f64))),
        )
        .unwrap();
        let dense = to_matrix(&op, &b).unwrap();
        let mut rebuilt = CMat::zeros(b.dim(), b.dim());
        for (i, j, v) in to_coo(&op, &b).unwrap() {
            rebuilt.set(i, j, v);
        }
        assert!(rebuilt.sub(&dense).max_abs() < 1e-14);
    }

    #[test]
    fn n_particle_amplitudes_carry_factorials() {
        let b = basis(2, 1.0, 3);
        // b†_0 b†_0 b†_0 |0> = sqrt(3!) |3,0>.
        let v = n_particle_vector(&b, &[0, 0, 0]).unwrap();
        let idx = b.index_of(&[3, 0]).unwrap();
        assert!((v.amplitudes()[idx] - cplx(libm::sqrt(6.0), 0.0)).norm() < 1e-14);
        assert!(n_particle_vector(&b, &[0, 0, 0, 0]).is_err());
    }

    #[test]
    fn coherent_overlap_approaches_exponential_law() {
        let lat = TimeLattice::periodic(4, 0.5).unwrap();
        let b = FockBasis::new(ModeSpace::time(lat), 6).unwrap();
        let phi = TestFunction::from_fn(lat, |t| cplx(0.3 * t, 0.1));
        let psi = TestFunction::from_fn(lat, |t| cplx(0.2, -0.15 * t));
        let (vp, tail_p) = coherent_vector(&b, &phi).unwrap();
        let (vq, tail_q) = coherent_vector(&b, &psi).unwrap();
        let got = vp.dot(&vq).unwrap();
        let exact = coherent_overlap_exact(&phi, &psi).unwrap();
        // The truncation error is bounded by the geometric mean of tails.
        let bound = libm::sqrt(tail_p * tail_q) + 1e-12;
        assert!((got - exact).norm() <= bound, "residual {} bound {}", (got - exact).norm(), bound);
    }

    #[test]
    fn white_noise_matches_inner_product() {
        let lat = TimeLattice::periodic(4, 0.25).unwrap();
        let b = FockBasis::new(ModeSpace::time(lat), 2).unwrap();
        let p = OscillatorParams { hbar: 0.9, mass: 1.4, omega: 2.0 };
        let f = TestFunction::real_from_fn(lat, |t| 1.0 + t);
        let g = TestFunction::real_from_fn(lat, |t| libm::sin(t) - 0.5);
        let got = white_noise_correlation(&b, &f, &g, &p).unwrap();
        let expected = inner_product(&f, &g).unwrap() * (p.hbar / (2.0 * p.mass * p.omega));
        assert!((got - expected).norm() < 1e-13);
    }

    #[test]
    fn dense_ceiling_enforced() {
        // 12 modes at n_max 5 is 6188 states: above the dense ceiling but
        // fine for the coordinate list.
        let modes = ModeSpace::time(TimeLattice::periodic(12, 0.5).unwrap());
        let b = FockBasis::new(modes.clone(), 5).unwrap();
        assert_eq!(b.dim(), 6188);
        let op = QuadraticOperator::constant(modes, cplx(1.0, 0.0)).unwrap();
        assert!(matches!(to_matrix(&op, &b), Err(HpoError::Capacity(_))));
        let coo = to_coo(&op, &b).unwrap();
        assert_eq!(coo.len(), 6188);
    }

    #[test]
    fn sector_spectrum_of_number_operator() {
        let lat = TimeLattice::periodic(3, 1.0).unwrap();
        let modes = ModeSpace::time(lat);
        let b = FockBasis::new(modes.clone(), 2).unwrap();
        let m = CMat::from_fn(3, 3, |i, j| if i == j { cplx((i + 1) as f64, 0.0) } else { cplx(0.0, 0.0) });
        let op = QuadraticOperator::number_form(modes, m).unwrap();
        let evs = sector_spectrum(&op, &b, 1).unwrap();
        assert_eq!(evs.len(), 3);
        assert!((evs[0] - 1.0).abs() < 1e-12 && (evs[2] - 3.0).abs() < 1e-12);
    }
}
