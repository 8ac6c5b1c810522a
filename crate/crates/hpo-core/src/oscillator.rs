//! Builders for the continuous-time oscillator algebra on a discretized
//! time lattice: smeared position and momentum, time-averaged Hamiltonians,
//! Heisenberg-picture fields, internal angular momentum, center of time,
//! and the velocity-extended family with spectral frequency operator.
//!
//! Conventions carried by every builder:
//!   - modes are dimensionless, `[b_i, b†_j] = δ_ij`;
//!   - a delta function at equal times becomes `δ_ij / dt`;
//!   - `b_f = Σ_i sqrt(dt) conj(f_i) b_i`, so `[b_f, b†_g] = <f, g>`
//!     with the dt-weighted inner product.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::lattice::{self, SpectralOperator, TestFunction, TimeLattice};
use crate::linalg::CMat;
use crate::quadratic::{ModeLabels, ModeSpace, OneParticleUnitary, QuadraticOperator};
use crate::{C64, HpoError, Result};

/// Physical constants of the oscillator family. Defaults are the unit
/// system used throughout the examples: `hbar = m = omega = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorParams {
    pub hbar: f64,
    pub mass: f64,
    pub omega: f64,
}

impl Default for OscillatorParams {
    fn default() -> Self {
        OscillatorParams { hbar: 1.0, mass: 1.0, omega: 1.0 }
    }
}

impl OscillatorParams {
    fn validate(&self) -> Result<()> {
        if !(self.hbar > 0.0 && self.mass > 0.0 && self.omega > 0.0) {
            return Err(HpoError::Precondition(
                "oscillator parameters must be strictly positive".into(),
            ));
        }
        Ok(())
    }
}

fn require_time_modes(modes: &ModeSpace, f: &TestFunction) -> Result<()> {
    match modes.labels() {
        ModeLabels::Time(l) | ModeLabels::TimeInternal(l, _) => {
            if *l != f.lattice() {
                return Err(HpoError::DimensionMismatch(
                    "test function lattice differs from mode-space lattice".into(),
                ));
            }
            Ok(())
        }
        ModeLabels::Grid(_) => Err(HpoError::Precondition(
            "time-lattice builder invoked on 4D grid modes".into(),
        )),
    }
}

/// `b_f` on the given internal component.
pub fn smear_annihilation(
    modes: &ModeSpace,
    internal: usize,
    f: &TestFunction,
) -> Result<QuadraticOperator> {
    require_time_modes(modes, f)?;
    if internal >= modes.internal_dim() {
        return Err(HpoError::Precondition("internal index out of range".into()));
    }
    let sdt = libm::sqrt(f.lattice().dt());
    let mut coeffs = vec![C64::new(0.0, 0.0); modes.size()];
    for (i, v) in f.values().iter().enumerate() {
        coeffs[modes.mode_of(i, internal)] = v.conj() * sdt;
    }
    QuadraticOperator::annihilator(modes.clone(), coeffs)
}

fn smear_ladder_combination(
    modes: &ModeSpace,
    internal: usize,
    f: &TestFunction,
    create_coeff: C64,
    annih_coeff: C64,
) -> Result<QuadraticOperator> {
    require_time_modes(modes, f)?;
    if internal >= modes.internal_dim() {
        return Err(HpoError::Precondition("internal index out of range".into()));
    }
    let sdt = libm::sqrt(f.lattice().dt());
    let n = modes.size();
    let mut create = vec![C64::new(0.0, 0.0); n];
    let mut annih = vec![C64::new(0.0, 0.0); n];
    for (i, v) in f.values().iter().enumerate() {
        let k = modes.mode_of(i, internal);
        create[k] = create_coeff * v * sdt;
        annih[k] = annih_coeff * v.conj() * sdt;
    }
    let zeros = CMat::zeros(n, n);
    QuadraticOperator::from_parts(
        modes.clone(),
        C64::new(0.0, 0.0),
        create,
        annih,
        zeros.clone(),
        zeros.clone(),
        zeros,
    )
}

/// Smeared position `x_f = sqrt(hbar/2 m omega) (b_f + b†_f)`.
pub fn smear_position(
    modes: &ModeSpace,
    f: &TestFunction,
    params: &OscillatorParams,
) -> Result<QuadraticOperator> {
    smear_position_internal(modes, 0, f, params)
}

/// Smeared momentum `p_f = i sqrt(m omega hbar / 2) (b†_f - b_f)`.
pub fn smear_momentum(
    modes: &ModeSpace,
    f: &TestFunction,
    params: &OscillatorParams,
) -> Result<QuadraticOperator> {
    smear_momentum_internal(modes, 0, f, params)
}

/// Position component `x^i_f` for internal-index mode spaces.
pub fn smear_position_internal(
    modes: &ModeSpace,
    internal: usize,
    f: &TestFunction,
    params: &OscillatorParams,
) -> Result<QuadraticOperator> {
    params.validate()?;
    let s = libm::sqrt(params.hbar / (2.0 * params.mass * params.omega));
    smear_ladder_combination(modes, internal, f, C64::new(s, 0.0), C64::new(s, 0.0))
}

/// Momentum component `p^i_f` for internal-index mode spaces.
pub fn smear_momentum_internal(
    modes: &ModeSpace,
    internal: usize,
    f: &TestFunction,
    params: &OscillatorParams,
) -> Result<QuadraticOperator> {
    params.validate()?;
    let s = libm::sqrt(params.mass * params.omega * params.hbar / 2.0);
    smear_ladder_combination(modes, internal, f, C64::new(0.0, s), C64::new(0.0, -s))
}

fn real_values(chi: &TestFunction, what: &str) -> Result<Vec<f64>> {
    if !chi.is_real(1e-12) {
        return Err(HpoError::Precondition(String::from(what) + " must be real-valued"));
    }
    Ok(chi.values().iter().map(|z| z.re).collect())
}

/// Time-averaged Hamiltonian `H(chi) = hbar omega Σ_i chi(t_i) b†_i b_i`
/// (summed over internal components when present). The smearing `dt` and
/// the equal-time delta normalization `1/dt` cancel, leaving a plain
/// diagonal number operator.
pub fn build_h(
    modes: &ModeSpace,
    chi: &TestFunction,
    params: &OscillatorParams,
) -> Result<QuadraticOperator> {
    params.validate()?;
    require_time_modes(modes, chi)?;
    let chi_v = real_values(chi, "averaging function")?;
    let n = modes.size();
    let d = modes.internal_dim();
    let mut m = CMat::zeros(n, n);
    for (i, c) in chi_v.iter().enumerate() {
        for j in 0..d {
            let k = modes.mode_of(i, j);
            m.set(k, k, C64::new(params.hbar * params.omega * c, 0.0));
        }
    }
    QuadraticOperator::number_form(modes.clone(), m)
}

/// Center-of-time operator: the number operator weighted by the label
/// time of each mode, `Σ_i t_i b†_i b_i`.
pub fn build_center_of_time(modes: &ModeSpace) -> Result<QuadraticOperator> {
    let n = modes.size();
    let mut m = CMat::zeros(n, n);
    for k in 0..n {
        m.set(k, k, C64::new(modes.time_of_mode(k), 0.0));
    }
    QuadraticOperator::number_form(modes.clone(), m)
}

/// One-particle unitary `b_i -> e^{-i omega chi(t_i)} b_i` generated by
/// `H(chi)`; conjugating `x_f` by it yields the Heisenberg-picture field.
pub fn evolution_unitary(
    modes: &ModeSpace,
    chi: &TestFunction,
    params: &OscillatorParams,
) -> Result<OneParticleUnitary> {
    params.validate()?;
    require_time_modes(modes, chi)?;
    let chi_v = real_values(chi, "averaging function")?;
    let d = modes.internal_dim();
    let mut phases = vec![0.0f64; modes.size()];
    for (i, c) in chi_v.iter().enumerate() {
        for j in 0..d {
            phases[modes.mode_of(i, j)] = -params.omega * c;
        }
    }
    OneParticleUnitary::diagonal_phases(modes.clone(), &phases, "exp(-i H(chi) tau / hbar)")
}

/// Heisenberg-picture position `x_f(chi) = U(chi)† x_f U(chi)`.
pub fn heisenberg_position(
    modes: &ModeSpace,
    f: &TestFunction,
    chi: &TestFunction,
    params: &OscillatorParams,
) -> Result<QuadraticOperator> {
    let x = smear_position(modes, f, params)?;
    let u = evolution_unitary(modes, chi, params)?;
    crate::quadratic::gaussian_conjugate(&x, &u)
}

const LEVI_CIVITA: [[[f64; 3]; 3]; 3] = {
    let mut e = [[[0.0f64; 3]; 3]; 3];
    e[0][1][2] = 1.0;
    e[1][2][0] = 1.0;
    e[2][0][1] = 1.0;
    e[0][2][1] = -1.0;
    e[2][1][0] = -1.0;
    e[1][0][2] = -1.0;
    e
};

/// Point-split internal angular momentum on a 3-component oscillator:
///
/// ```text
///   L^i(chi, eps) = i hbar Σ_n eps^i_{jk} u_n b†_{(n,j)} b_{(n + step, k)}
/// ```
///
/// with `u_n = exp(i omega (chi(t_n) - chi(t_{n + step})))` and the split
/// taken `step` lattice sites forward (periodic wrap). `step = 0` is the
/// coincident-point limit. Requires 3 internal components.
pub fn build_angular_momentum(
    modes: &ModeSpace,
    component: usize,
    chi: &TestFunction,
    step: usize,
    params: &OscillatorParams,
) -> Result<QuadraticOperator> {
    params.validate()?;
    require_time_modes(modes, chi)?;
    if modes.internal_dim() != 3 {
        return Err(HpoError::Precondition(
            "angular momentum needs 3 internal components".into(),
        ));
    }
    if component >= 3 {
        return Err(HpoError::Precondition("angular momentum component out of range".into()));
    }
    let lat = chi.lattice();
    if lat.boundary() != lattice::Boundary::Periodic {
        return Err(HpoError::Unsupported(
            "point-split angular momentum requires a periodic lattice".into(),
        ));
    }
    let chi_v = real_values(chi, "averaging function")?;
    let np = lat.n_points();
    let n = modes.size();
    let mut m = CMat::zeros(n, n);
    for t in 0..np {
        let ts = (t + step) % np;
        let u = C64::from_polar(params.hbar, params.omega * (chi_v[t] - chi_v[ts]));
        let iu = C64::new(0.0, 1.0) * u;
        for j in 0..3 {
            for k in 0..3 {
                let e = LEVI_CIVITA[component][j][k];
                if e != 0.0 {
                    let r = modes.mode_of(t, j);
                    let c = modes.mode_of(ts, k);
                    m.set(r, c, m[(r, c)] + iu * e);
                }
            }
        }
    }
    QuadraticOperator::number_form(modes.clone(), m)
}

/// Dense mode-basis matrix of a spectral operator on the periodic time
/// lattice: `A_ij = (1/N) Σ_k lambda_k e^{i 2 pi k (i - j) / N}`. A
/// constant spectrum short-circuits to an exact multiple of the identity.
pub fn spectral_matrix(op: &SpectralOperator) -> CMat {
    let lat = op.lattice();
    let n = lat.n_points();
    let evs = op.eigenvalues();
    let first = evs[0];
    if evs.iter().all(|e| (e - first).norm() == 0.0) {
        return CMat::identity(n).scale(first);
    }
    let mut m = CMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for (k, e) in evs.iter().enumerate() {
                let phase = core::f64::consts::TAU * (k as f64) * ((i as f64) - (j as f64))
                    / (n as f64);
                acc += e * C64::from_polar(1.0, phase);
            }
            m.set(i, j, acc / (n as f64));
        }
    }
    m
}

/// Velocity-extended oscillator with frequency operator
/// `Omega = sqrt(omega^2 - lambda D^2)` (spectral). Modes of the returned
/// builders are the dressed `c`-modes that diagonalize the extended
/// Hamiltonian; at `lambda = 0` they coincide with the plain oscillator
/// modes and every builder reduces to its plain counterpart exactly.
#[derive(Debug, Clone)]
pub struct VelocityExtended {
    modes: ModeSpace,
    omega_op: SpectralOperator,
    params: OscillatorParams,
    lambda: f64,
}

impl VelocityExtended {
    pub fn new(lattice: TimeLattice, lambda: f64, params: &OscillatorParams) -> Result<Self> {
        params.validate()?;
        let omega_op = SpectralOperator::sqrt_omega2_minus_lambda_d2(lattice, params.omega, lambda)?;
        Ok(VelocityExtended {
            modes: ModeSpace::time(lattice),
            omega_op,
            params: *params,
            lambda,
        })
    }

    pub fn modes(&self) -> &ModeSpace {
        &self.modes
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn frequency_operator(&self) -> &SpectralOperator {
        &self.omega_op
    }

    /// `x_f = sqrt(hbar/2m) Σ_i sqrt(dt) (Omega^{-1/2} f)_i (c_i + c†_i)`
    /// for real f; general f smears creation with f and annihilation with
    /// conj(f), matching the plain `smear_position` at `lambda = 0`.
    pub fn smear_position(&self, f: &TestFunction) -> Result<QuadraticOperator> {
        require_time_modes(&self.modes, f)?;
        let half = self.omega_op.powf(-0.5)?;
        let fv = half.apply_values(f.values());
        let fvc = half.apply_values(&f.conj().values().to_vec());
        let s = libm::sqrt(self.params.hbar / (2.0 * self.params.mass) * f.lattice().dt());
        let n = self.modes.size();
        let create: Vec<C64> = fv.iter().map(|z| z * s).collect();
        let annih: Vec<C64> = fvc.iter().map(|z| z * s).collect();
        let zeros = CMat::zeros(n, n);
        QuadraticOperator::from_parts(
            self.modes.clone(),
            C64::new(0.0, 0.0),
            create,
            annih,
            zeros.clone(),
            zeros.clone(),
            zeros,
        )
    }

    /// Time-averaged Hamiltonian `H(chi) = hbar c† W c` with the
    /// symmetrically ordered weight `W = (chi Omega + Omega chi) / 2`.
    pub fn build_h(&self, chi: &TestFunction) -> Result<QuadraticOperator> {
        require_time_modes(&self.modes, chi)?;
        let chi_v = real_values(chi, "averaging function")?;
        let omega_m = spectral_matrix(&self.omega_op);
        let n = self.modes.size();
        let mut w = CMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                w.set(i, j, omega_m[(i, j)] * (0.5 * (chi_v[i] + chi_v[j]) * self.params.hbar));
            }
        }
        QuadraticOperator::number_form(self.modes.clone(), w)
    }

    /// Two-point vacuum correlation `<0| x_f x_g |0>`; equals the
    /// dt-weighted quadratic form of the kernel of `Omega^{-1}` scaled by
    /// `hbar / 2m`.
    pub fn vacuum_position_correlation(
        &self,
        f: &TestFunction,
        g: &TestFunction,
    ) -> Result<C64> {
        let xf = self.smear_position(f)?;
        let xg = self.smear_position(g)?;
        crate::quadratic::vacuum_expectation_product(&xf, &xg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::inner_product;
    use crate::linalg::cplx;
    use crate::quadratic::{central_term, commutator};

    fn lat8() -> TimeLattice {
        TimeLattice::periodic(8, 0.25).unwrap()
    }

    #[test]
    fn position_momentum_commutator_matches_inner_product() {
        // [x_f, p_g] = i hbar <f, g> for real f, g (central, exact).
        let lat = lat8();
        let modes = ModeSpace::time(lat);
        let p = OscillatorParams { hbar: 0.7, mass: 1.3, omega: 2.1 };
        let f = TestFunction::real_from_fn(lat, |t| 1.0 + t * t);
        let g = TestFunction::real_from_fn(lat, |t| libm::cos(t));
        let xf = smear_position(&modes, &f, &p).unwrap();
        let pg = smear_momentum(&modes, &g, &p).unwrap();
        let comm = commutator(&xf, &pg).unwrap();
        let expected = cplx(0.0, p.hbar) * inner_product(&f, &g).unwrap();
        assert!((comm.scalar() - expected).norm() < 1e-13);
        // Everything but the scalar vanishes.
        let rest = comm
            .sub(&QuadraticOperator::constant(modes.clone(), comm.scalar()).unwrap())
            .unwrap();
        assert!(rest.is_zero(1e-14));
        // [x_f, x_g] = [p_f, p_g] = 0.
        let xg = smear_position(&modes, &g, &p).unwrap();
        assert!(commutator(&xf, &xg).unwrap().is_zero(1e-14));
        let pf = smear_momentum(&modes, &f, &p).unwrap();
        assert!(commutator(&pf, &pg).unwrap().is_zero(1e-14));
    }

    #[test]
    fn hamiltonian_generates_momentum() {
        // [H(chi), x_f] = -(i hbar / m) p_{chi f}.
        let lat = lat8();
        let modes = ModeSpace::time(lat);
        let p = OscillatorParams { hbar: 1.0, mass: 0.8, omega: 1.7 };
        let chi = TestFunction::real_from_fn(lat, |t| 0.5 + libm::sin(t));
        let f = TestFunction::real_from_fn(lat, |t| t + 0.2);
        let h = build_h(&modes, &chi, &p).unwrap();
        let xf = smear_position(&modes, &f, &p).unwrap();
        let lhs = commutator(&h, &xf).unwrap();
        let chif = chi.pointwise_mul(&f).unwrap();
        let rhs = smear_momentum(&modes, &chif, &p)
            .unwrap()
            .scale(cplx(0.0, -p.hbar / p.mass));
        assert!(lhs.sub(&rhs).unwrap().is_zero(1e-13));
    }

    #[test]
    fn heisenberg_functional_derivative_gives_momentum() {
        // d/ds x_f(s e_k) at s = 0 equals (dt f_k / m) p at the point k,
        // checked by a second-order central difference.
        let lat = lat8();
        let modes = ModeSpace::time(lat);
        let p = OscillatorParams::default();
        let f = TestFunction::real_from_fn(lat, |t| 1.0 + 0.3 * t);
        let k = 3usize;
        let h = 1e-5;
        let ek_h = TestFunction::indicator(lat, k).scale(cplx(h, 0.0));
        let ek_mh = TestFunction::indicator(lat, k).scale(cplx(-h, 0.0));
        let plus = heisenberg_position(&modes, &f, &ek_h, &p).unwrap();
        let minus = heisenberg_position(&modes, &f, &ek_mh, &p).unwrap();
        let deriv = plus.sub(&minus).unwrap().scale(cplx(1.0 / (2.0 * h), 0.0));
        let fek = f.pointwise_mul(&TestFunction::indicator(lat, k)).unwrap();
        let expected = smear_momentum(&modes, &fek, &p)
            .unwrap()
            .scale(cplx(1.0 / p.mass, 0.0));
        assert!(deriv.sub(&expected).unwrap().is_zero(1e-9));
    }

    #[test]
    fn center_of_time_weights_modes_by_label_time() {
        let lat = lat8();
        let modes = ModeSpace::time(lat);
        let ct = build_center_of_time(&modes).unwrap();
        assert!(ct.is_hermitian(1e-15));
        assert!((ct.quad_nc()[(5, 5)].re - lat.time(5)).abs() < 1e-15);
    }

    #[test]
    fn angular_momentum_is_hermitian_and_closes() {
        let lat = lat8();
        let modes = ModeSpace::time_internal(lat, 3).unwrap();
        let p = OscillatorParams::default();
        let chi = TestFunction::real_from_fn(lat, |t| 0.2 * t);
        // Coincident-point limit is Hermitian.
        let l0 = build_angular_momentum(&modes, 0, &chi, 0, &p).unwrap();
        assert!(l0.is_hermitian(1e-13));
        assert!(central_term(&l0, &l0).unwrap().norm() < 1e-14);
        // A finite split breaks Hermiticity; the adjoint is the operator
        // split the same distance backwards (periodic: step N - s).
        let zero = TestFunction::zero(lat);
        let l1 = build_angular_momentum(&modes, 0, &zero, 1, &p).unwrap();
        let l1_back = build_angular_momentum(&modes, 0, &zero, lat.n_points() - 1, &p).unwrap();
        assert!(l1.adjoint().sub(&l1_back).unwrap().is_zero(1e-14));
    }

    #[test]
    fn velocity_extension_reduces_to_plain_oscillator_at_zero_coupling() {
        let lat = lat8();
        let p = OscillatorParams { hbar: 1.0, mass: 1.2, omega: 1.9 };
        let vx = VelocityExtended::new(lat, 0.0, &p).unwrap();
        let modes = ModeSpace::time(lat);
        let f = TestFunction::real_from_fn(lat, |t| libm::sin(t) + 2.0);
        let chi = TestFunction::real_from_fn(lat, |t| 0.4 * t * t);
        let x_plain = smear_position(&modes, &f, &p).unwrap();
        let x_vext = vx.smear_position(&f).unwrap();
        assert!(x_plain.sub(&x_vext).unwrap().is_zero(1e-14));
        let h_plain = build_h(&modes, &chi, &p).unwrap();
        let h_vext = vx.build_h(&chi).unwrap();
        assert!(h_plain.sub(&h_vext).unwrap().is_zero(0.0));
    }

    #[test]
    fn velocity_extended_vacuum_correlation_matches_greens_kernel() {
        let lat = lat8();
        let p = OscillatorParams { hbar: 0.9, mass: 1.1, omega: 1.5 };
        let vx = VelocityExtended::new(lat, 0.3, &p).unwrap();
        let f = TestFunction::real_from_fn(lat, |t| 1.0 + t);
        let g = TestFunction::real_from_fn(lat, |t| libm::cos(2.0 * t));
        let got = vx.vacuum_position_correlation(&f, &g).unwrap();
        // Independent route through the integral kernel of Omega^{-1}.
        let kern = lattice::greens_kernel(vx.frequency_operator()).unwrap();
        let dt = lat.dt();
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..lat.n_points() {
            for j in 0..lat.n_points() {
                acc += f.values()[i] * kern[(i, j)] * g.values()[j] * dt * dt;
            }
        }
        let expected = acc * (p.hbar / (2.0 * p.mass));
        assert!((got - expected).norm() < 1e-12);
    }
}
