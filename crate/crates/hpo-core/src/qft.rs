//! Free scalar quantum field on a 4D spacetime grid with a flat spacelike
//! foliation. The one-particle structure is carried by the positive
//! operator `K_n = -spatial Laplacian + m^2` restricted to the foliation:
//! smeared fields dress test functions with `K_n^{-1/4}` (position-like)
//! or `K_n^{1/4}` (momentum-like) before coupling to the dimensionless
//! grid modes `a_I` with `[a_I, a†_J] = δ_IJ`.
//!
//! The covariant field operators `b(X)` with `[b(X), b†(Y)] = hbar δ^4`
//! correspond to `b_I = sqrt(hbar / dV) a_I`; the builders below absorb
//! those factors so that, e.g., `[phi_f, pi_g] = i hbar ∫ f g dV` holds
//! exactly as a central element.

use alloc::vec;
use alloc::vec::Vec;

use crate::lattice::{self, GridFunction, SpacetimeLattice, SpectralOperator4, TestFunction};
use crate::linalg::CMat;
use crate::quadratic::{ModeSpace, OneParticleUnitary, QuadraticOperator};
use crate::{C64, HpoError, Result};

/// Mass and hbar of the field; `mass > 0` keeps `K_n` invertible, which
/// the quarter-power dressings require.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldParams {
    pub hbar: f64,
    pub mass: f64,
}

impl Default for FieldParams {
    fn default() -> Self {
        FieldParams { hbar: 1.0, mass: 1.0 }
    }
}

impl FieldParams {
    fn validate(&self) -> Result<()> {
        if !(self.hbar > 0.0) {
            return Err(HpoError::Precondition("hbar must be positive".into()));
        }
        if !(self.mass > 0.0) {
            return Err(HpoError::Domain(
                "massless field: K_n is singular and the field dressing K_n^{-1/4} does not exist"
                    .into(),
            ));
        }
        Ok(())
    }
}

/// Scalar field algebra on one grid: caches the spectral quarter powers.
#[derive(Debug, Clone)]
pub struct ScalarField {
    modes: ModeSpace,
    lattice: SpacetimeLattice,
    params: FieldParams,
    kn: SpectralOperator4,
    quarter: SpectralOperator4,
    inv_quarter: SpectralOperator4,
}

impl ScalarField {
    pub fn new(lattice: SpacetimeLattice, params: &FieldParams) -> Result<Self> {
        params.validate()?;
        let kn = lattice::build_kn(&lattice, params.mass)?;
        let quarter = kn.powf(0.25)?;
        let inv_quarter = kn.powf(-0.25)?;
        Ok(ScalarField {
            modes: ModeSpace::grid(lattice.clone()),
            lattice,
            params: *params,
            kn,
            quarter,
            inv_quarter,
        })
    }

    pub fn modes(&self) -> &ModeSpace {
        &self.modes
    }

    pub fn lattice(&self) -> &SpacetimeLattice {
        &self.lattice
    }

    pub fn params(&self) -> FieldParams {
        self.params
    }

    pub fn kn(&self) -> &SpectralOperator4 {
        &self.kn
    }

    fn check_lattice(&self, f: &GridFunction) -> Result<()> {
        if *f.lattice() != self.lattice {
            return Err(HpoError::DimensionMismatch(
                "grid function lives on a different spacetime lattice".into(),
            ));
        }
        Ok(())
    }

    fn linear(&self, create: Vec<C64>, annih: Vec<C64>) -> Result<QuadraticOperator> {
        let n = self.modes.size();
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

    /// Covariantly smeared annihilation `b(f) = ∫ dV conj(f) b(X)`, i.e.
    /// `sqrt(hbar dV) Σ_I conj(f_I) a_I`.
    pub fn smear_annihilation(&self, f: &GridFunction) -> Result<QuadraticOperator> {
        self.check_lattice(f)?;
        let s = libm::sqrt(self.params.hbar * self.lattice.dv());
        QuadraticOperator::annihilator(
            self.modes.clone(),
            f.values().iter().map(|z| z.conj() * s).collect(),
        )
    }

    /// Smeared field `phi_f = sqrt(hbar dV / 2) Σ_I [(K^{-1/4} f)_I a†_I
    /// + (K^{-1/4} conj(f))_I a_I]`.
    pub fn smear_field(&self, f: &GridFunction) -> Result<QuadraticOperator> {
        self.check_lattice(f)?;
        let s = libm::sqrt(self.params.hbar * self.lattice.dv() / 2.0);
        let dressed = self.inv_quarter.apply_values(f.values());
        let dressed_conj = self
            .inv_quarter
            .apply_values(&f.values().iter().map(|z| z.conj()).collect::<Vec<_>>());
        self.linear(
            dressed.iter().map(|z| z * s).collect(),
            dressed_conj.iter().map(|z| z * s).collect(),
        )
    }

    /// Smeared conjugate momentum `pi_f = i sqrt(hbar dV / 2) Σ_I
    /// [(K^{1/4} f)_I a†_I - (K^{1/4} conj(f))_I a_I]`.
    pub fn smear_momentum(&self, f: &GridFunction) -> Result<QuadraticOperator> {
        self.check_lattice(f)?;
        let s = libm::sqrt(self.params.hbar * self.lattice.dv() / 2.0);
        let dressed = self.quarter.apply_values(f.values());
        let dressed_conj = self
            .quarter
            .apply_values(&f.values().iter().map(|z| z.conj()).collect::<Vec<_>>());
        self.linear(
            dressed.iter().map(|z| z * C64::new(0.0, s)).collect(),
            dressed_conj.iter().map(|z| z * C64::new(0.0, -s)).collect(),
        )
    }

    /// Dense grid-basis matrix of `sqrt(K_n)` (real symmetric).
    fn sqrt_kn_matrix(&self) -> Result<CMat> {
        let n = self.lattice.n_sites();
        let sqrt_kn = self.kn.sqrt()?;
        let mut m = CMat::zeros(n, n);
        let mut col = vec![C64::new(0.0, 0.0); n];
        for j in 0..n {
            col.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
            col[j] = C64::new(1.0, 0.0);
            let out = sqrt_kn.apply_values(&col);
            for i in 0..n {
                m.set(i, j, out[i]);
            }
        }
        Ok(m)
    }

    /// Time-averaged Hamiltonian `H_n(chi) = hbar Σ_IJ W_IJ a†_I a_J`
    /// with `W` the grid-basis matrix of `chi(n·X) sqrt(K_n)`. The time
    /// multiplier commutes with `K_n`, so `W` is Hermitian; it is
    /// symmetrized to remove rounding skew.
    pub fn build_hamiltonian(&self, chi: &TestFunction) -> Result<QuadraticOperator> {
        if chi.lattice() != self.lattice.time_axis() {
            return Err(HpoError::DimensionMismatch(
                "averaging function must live on the grid's time axis".into(),
            ));
        }
        if !chi.is_real(1e-12) {
            return Err(HpoError::Precondition("averaging function must be real-valued".into()));
        }
        let n = self.lattice.n_sites();
        let s = self.sqrt_kn_matrix()?;
        let chi_site: Vec<f64> = (0..n)
            .map(|i| chi.values()[self.lattice.coords(i)[0]].re)
            .collect();
        let mut w = CMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                w.set(
                    i,
                    j,
                    s[(i, j)] * (0.5 * (chi_site[i] + chi_site[j]) * self.params.hbar),
                );
            }
        }
        QuadraticOperator::number_form(self.modes.clone(), w)
    }

    /// One-particle evolution unitary `U(chi) = exp(-i chi(n·X) sqrt(K_n))`,
    /// built exactly in the mixed basis (time position x spatial Fourier)
    /// where both factors are diagonal.
    pub fn evolution_unitary(&self, chi: &TestFunction) -> Result<OneParticleUnitary> {
        if chi.lattice() != self.lattice.time_axis() {
            return Err(HpoError::DimensionMismatch(
                "averaging function must live on the grid's time axis".into(),
            ));
        }
        if !chi.is_real(1e-12) {
            return Err(HpoError::Precondition("averaging function must be real-valued".into()));
        }
        let n = self.lattice.n_sites();
        let m2 = self.params.mass * self.params.mass;
        let mut u = CMat::zeros(n, n);
        let mut col = vec![C64::new(0.0, 0.0); n];
        for j in 0..n {
            col.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
            col[j] = C64::new(1.0, 0.0);
            for axis in 1..4 {
                lattice::dft_axis(&self.lattice, &mut col, axis, false);
            }
            for (site, v) in col.iter_mut().enumerate() {
                let it = self.lattice.coords(site)[0];
                let freq = libm::sqrt(self.lattice.spatial_k2(site) + m2);
                *v *= C64::from_polar(1.0, -chi.values()[it].re * freq);
            }
            for axis in 1..4 {
                lattice::dft_axis(&self.lattice, &mut col, axis, true);
            }
            for i in 0..n {
                u.set(i, j, col[i]);
            }
        }
        OneParticleUnitary::new(self.modes.clone(), u, "exp(-i chi(n.X) sqrt(K_n))")
    }

    /// Heisenberg-picture field `phi_f(chi) = U(chi)† phi_f U(chi)`.
    pub fn heisenberg_field(
        &self,
        f: &GridFunction,
        chi: &TestFunction,
    ) -> Result<QuadraticOperator> {
        let phi = self.smear_field(f)?;
        let u = self.evolution_unitary(chi)?;
        crate::quadratic::gaussian_conjugate(&phi, &u)
    }
}

/// `i hbar dV Σ_I f_I g_I`: the exact central value of `[phi_f, pi_g]`.
pub fn field_ccr_value(
    lattice: &SpacetimeLattice,
    f: &GridFunction,
    g: &GridFunction,
    params: &FieldParams,
) -> C64 {
    let s: C64 = f.values().iter().zip(g.values()).map(|(a, b)| a * b).sum();
    s * C64::new(0.0, params.hbar * lattice.dv())
}
