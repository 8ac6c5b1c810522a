//! Discretized time and spacetime grids, test functions, and spectral
//! calculus of functions of differential operators.
//!
//! Conventions baked in here and relied on everywhere else:
//!
//! - the lattice delta is `δ(t-s) -> δ_ij / dt`, so the discrete pairing
//!   `<f,g> = Σ_i conj(f_i) g_i dt` makes smeared identities exact;
//! - derivatives are spectral (Fourier) on periodic lattices, never finite
//!   differences, so they commute exactly with every other spectral
//!   operator on the same lattice and `<f, Dg> = -<Df, g>` holds to
//!   rounding for real `f`, `g`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::CMat;
use crate::{C64, HpoError, Result};

pub const PI: f64 = core::f64::consts::PI;

/// Boundary condition of a time lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Periodic,
    Open,
}

/// Uniform one-dimensional time grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeLattice {
    n_points: usize,
    dt: f64,
    boundary: Boundary,
}

impl TimeLattice {
    pub fn new(n_points: usize, dt: f64, boundary: Boundary) -> Result<Self> {
        if n_points < 2 {
            return Err(HpoError::Precondition("time lattice needs at least 2 points".into()));
        }
        if !(dt > 0.0) {
            return Err(HpoError::Precondition("time step must be positive".into()));
        }
        Ok(TimeLattice { n_points, dt, boundary })
    }

    pub fn periodic(n_points: usize, dt: f64) -> Result<Self> {
        TimeLattice::new(n_points, dt, Boundary::Periodic)
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn span(&self) -> f64 {
        self.n_points as f64 * self.dt
    }

    /// Grid time of point `i` (origin at 0).
    pub fn time(&self, i: usize) -> f64 {
        i as f64 * self.dt
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.time(i)).collect()
    }

    /// Signed Fourier frequency of DFT index `k`, in radians per time unit.
    /// The Nyquist mode (even `n`, `k = n/2`) is assigned `+pi/dt`.
    pub fn frequency(&self, k: usize) -> f64 {
        let n = self.n_points as isize;
        let k = k as isize;
        let signed = if 2 * k <= n { k } else { k - n };
        2.0 * PI * signed as f64 / (self.n_points as f64 * self.dt)
    }

    /// Frequency used by the antisymmetric spectral derivative: identical
    /// to [`frequency`](Self::frequency) except that the unpaired Nyquist
    /// mode is zeroed, which keeps `D` exactly antisymmetric and real
    /// functions real.
    pub fn derivative_frequency(&self, k: usize) -> f64 {
        if self.n_points % 2 == 0 && k == self.n_points / 2 {
            0.0
        } else {
            self.frequency(k)
        }
    }
}

/// Complex-valued grid function on a [`TimeLattice`]; the smearing
/// argument of every operator.
#[derive(Debug, Clone, PartialEq)]
pub struct TestFunction {
    lattice: TimeLattice,
    values: Vec<C64>,
}

impl TestFunction {
    pub fn new(lattice: TimeLattice, values: Vec<C64>) -> Result<Self> {
        if values.len() != lattice.n_points() {
            return Err(HpoError::DimensionMismatch(format!(
                "test function has {} values on a {}-point lattice",
                values.len(),
                lattice.n_points()
            )));
        }
        Ok(TestFunction { lattice, values })
    }

    pub fn from_fn(lattice: TimeLattice, mut f: impl FnMut(f64) -> C64) -> Self {
        let values = (0..lattice.n_points()).map(|i| f(lattice.time(i))).collect();
        TestFunction { lattice, values }
    }

    pub fn real_from_fn(lattice: TimeLattice, mut f: impl FnMut(f64) -> f64) -> Self {
        TestFunction::from_fn(lattice, |t| C64::new(f(t), 0.0))
    }

    pub fn constant(lattice: TimeLattice, value: C64) -> Self {
        TestFunction { lattice, values: vec![value; lattice.n_points()] }
    }

    pub fn zero(lattice: TimeLattice) -> Self {
        TestFunction::constant(lattice, C64::new(0.0, 0.0))
    }

    /// Indicator of a single lattice point.
    pub fn indicator(lattice: TimeLattice, index: usize) -> Self {
        let mut values = vec![C64::new(0.0, 0.0); lattice.n_points()];
        values[index] = C64::new(1.0, 0.0);
        TestFunction { lattice, values }
    }

    pub fn lattice(&self) -> TimeLattice {
        self.lattice
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.values.iter().all(|z| z.im.abs() <= tol)
    }

    pub fn conj(&self) -> TestFunction {
        TestFunction {
            lattice: self.lattice,
            values: self.values.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, z: C64) -> TestFunction {
        TestFunction { lattice: self.lattice, values: self.values.iter().map(|v| v * z).collect() }
    }

    pub fn add(&self, other: &TestFunction) -> Result<TestFunction> {
        same_lattice(self, other)?;
        Ok(TestFunction {
            lattice: self.lattice,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        })
    }

    /// Pointwise product, e.g. the `χ·f` smearing of commutator identities.
    pub fn pointwise_mul(&self, other: &TestFunction) -> Result<TestFunction> {
        same_lattice(self, other)?;
        Ok(TestFunction {
            lattice: self.lattice,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect(),
        })
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(inner_product(self, self).expect("same lattice").re)
    }
}

fn same_lattice(f: &TestFunction, g: &TestFunction) -> Result<()> {
    if f.lattice != g.lattice {
        return Err(HpoError::DimensionMismatch("test functions on different lattices".into()));
    }
    Ok(())
}

/// Discrete L2 pairing `Σ_i conj(f_i) g_i dt`; conjugate-linear in the
/// first argument.
pub fn inner_product(f: &TestFunction, g: &TestFunction) -> Result<C64> {
    same_lattice(f, g)?;
    let dt = f.lattice.dt();
    Ok(f.values.iter().zip(&g.values).map(|(a, b)| a.conj() * b).sum::<C64>() * dt)
}

/// Plain DFT: `F_k = Σ_j f_j e^{-2πi jk/N}`.
pub fn dft(values: &[C64]) -> Vec<C64> {
    let n = values.len();
    let w = -2.0 * PI / n as f64;
    (0..n)
        .map(|k| {
            values
                .iter()
                .enumerate()
                .map(|(j, v)| v * C64::from_polar(1.0, w * (j * k % n) as f64))
                .sum()
        })
        .collect()
}

/// Inverse DFT: `f_j = (1/N) Σ_k F_k e^{+2πi jk/N}`.
pub fn idft(values: &[C64]) -> Vec<C64> {
    let n = values.len();
    let w = 2.0 * PI / n as f64;
    (0..n)
        .map(|j| {
            values
                .iter()
                .enumerate()
                .map(|(k, v)| v * C64::from_polar(1.0, w * (j * k % n) as f64))
                .sum::<C64>()
                / n as f64
        })
        .collect()
}

/// Spectral derivative `f -> df/dt` (exact for band-limited functions).
///
/// Requires a periodic lattice, or an open lattice with `f` vanishing at
/// both endpoints (the discrete stand-in for "vanishes at infinity").
pub fn derivative(f: &TestFunction) -> Result<TestFunction> {
    if f.lattice.boundary() == Boundary::Open {
        let n = f.lattice.n_points();
        let tol = 1e-12 * f.values.iter().map(|z| z.norm()).fold(1.0, f64::max);
        if f.values[0].norm() > tol || f.values[n - 1].norm() > tol {
            return Err(HpoError::Precondition(
                "open-boundary derivative requires the function to vanish at both endpoints"
                    .into(),
            ));
        }
    }
    let mut hat = dft(&f.values);
    for (k, v) in hat.iter_mut().enumerate() {
        *v *= C64::new(0.0, f.lattice.derivative_frequency(k));
    }
    Ok(TestFunction { lattice: f.lattice, values: idft(&hat) })
}

/// Function of a translation-invariant differential operator, stored as
/// its eigenvalue on each discrete Fourier mode.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralOperator {
    lattice: TimeLattice,
    eigenvalues: Vec<C64>,
    label: String,
    self_adjoint: bool,
    positive: bool,
}

impl SpectralOperator {
    pub fn new(lattice: TimeLattice, label: impl Into<String>, eigenvalues: Vec<C64>) -> Result<Self> {
        if eigenvalues.len() != lattice.n_points() {
            return Err(HpoError::DimensionMismatch(
                "one eigenvalue per Fourier mode required".into(),
            ));
        }
        if eigenvalues.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(HpoError::Domain("non-finite spectral eigenvalue".into()));
        }
        let self_adjoint = eigenvalues.iter().all(|z| z.im.abs() <= 1e-14 * (1.0 + z.norm()));
        let positive = self_adjoint && eigenvalues.iter().all(|z| z.re >= 0.0);
        Ok(SpectralOperator { lattice, eigenvalues, label: label.into(), self_adjoint, positive })
    }

    /// Builds from a real function of the signed Fourier frequency.
    pub fn from_frequency_fn(
        lattice: TimeLattice,
        label: impl Into<String>,
        mut f: impl FnMut(f64) -> f64,
    ) -> Result<Self> {
        let eigs = (0..lattice.n_points())
            .map(|k| C64::new(f(lattice.frequency(k)), 0.0))
            .collect();
        SpectralOperator::new(lattice, label, eigs)
    }

    /// The identity-shaped multiple `c`.
    pub fn scalar(lattice: TimeLattice, c: f64) -> Self {
        SpectralOperator::from_frequency_fn(lattice, format!("{c}"), |_| c).expect("finite")
    }

    /// The derivative operator `D = d/dt` (antisymmetric convention).
    pub fn derivative_op(lattice: TimeLattice) -> Self {
        let eigs = (0..lattice.n_points())
            .map(|k| C64::new(0.0, lattice.derivative_frequency(k)))
            .collect();
        SpectralOperator::new(lattice, "D", eigs).expect("finite")
    }

    /// `sqrt(omega^2 - lambda D^2)`: eigenvalue `sqrt(omega^2 + lambda w_k^2)`
    /// on the mode with frequency `w_k`.
    pub fn sqrt_omega2_minus_lambda_d2(
        lattice: TimeLattice,
        omega: f64,
        lambda: f64,
    ) -> Result<Self> {
        if lambda < 0.0 {
            return Err(HpoError::Precondition("lambda must be nonnegative".into()));
        }
        SpectralOperator::from_frequency_fn(
            lattice,
            format!("sqrt({omega}^2-{lambda} D^2)"),
            |w| libm::sqrt(omega * omega + lambda * w * w),
        )
    }

    pub fn lattice(&self) -> TimeLattice {
        self.lattice
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eigenvalues(&self) -> &[C64] {
        &self.eigenvalues
    }

    pub fn is_self_adjoint(&self) -> bool {
        self.self_adjoint
    }

    pub fn is_positive(&self) -> bool {
        self.positive
    }

    /// Real power via the spectral theorem; negative or complex
    /// eigenvalues under a fractional power are a domain error.
    pub fn powf(&self, p: f64) -> Result<SpectralOperator> {
        if p != libm::floor(p) || p < 0.0 {
            if !self.self_adjoint {
                return Err(HpoError::Domain(
                    "fractional power of a non-self-adjoint operator".into(),
                ));
            }
            if p < 0.0 && self.eigenvalues.iter().any(|z| z.norm() == 0.0) {
                return Err(HpoError::Domain(format!(
                    "operator {} is singular; negative power undefined",
                    self.label
                )));
            }
            if p != libm::floor(p) && self.eigenvalues.iter().any(|z| z.re < 0.0) {
                return Err(HpoError::Domain(format!(
                    "operator {} has negative eigenvalues; fractional power undefined",
                    self.label
                )));
            }
        }
        let eigs = self
            .eigenvalues
            .iter()
            .map(|z| {
                if self.self_adjoint {
                    C64::new(libm::pow(z.re, p), 0.0)
                } else {
                    z.powf(p)
                }
            })
            .collect();
        SpectralOperator::new(self.lattice, format!("({})^{p}", self.label), eigs)
    }

    pub fn sqrt(&self) -> Result<SpectralOperator> {
        self.powf(0.5)
    }

    pub fn inverse(&self) -> Result<SpectralOperator> {
        if self.eigenvalues.iter().any(|z| z.norm() == 0.0) {
            return Err(HpoError::Domain(format!("operator {} is singular", self.label)));
        }
        let eigs = self.eigenvalues.iter().map(|z| z.inv()).collect();
        SpectralOperator::new(self.lattice, format!("({})^-1", self.label), eigs)
    }

    pub fn compose(&self, other: &SpectralOperator) -> Result<SpectralOperator> {
        if self.lattice != other.lattice {
            return Err(HpoError::DimensionMismatch("spectral operators on different lattices".into()));
        }
        let eigs = self
            .eigenvalues
            .iter()
            .zip(&other.eigenvalues)
            .map(|(a, b)| a * b)
            .collect();
        SpectralOperator::new(self.lattice, format!("{}*{}", self.label, other.label), eigs)
    }

    /// Applies the operator to a grid function to itself (as a matrix
    /// acting on grid values), returning the transformed function.
    pub fn apply_values(&self, values: &[C64]) -> Vec<C64> {
        // A constant spectrum is a scalar; skip the transform round trip so
        // the result carries no DFT rounding.
        let first = self.eigenvalues[0];
        if self.eigenvalues.iter().all(|&e| e == first) {
            return values.iter().map(|&v| v * first).collect();
        }
        let mut hat = dft(values);
        for (k, v) in hat.iter_mut().enumerate() {
            *v *= self.eigenvalues[k];
        }
        idft(&hat)
    }
}

/// `inverse-DFT ∘ multiply-by-eigenvalues ∘ DFT` applied to `f`.
pub fn spectral_apply(op: &SpectralOperator, f: &TestFunction) -> Result<TestFunction> {
    if op.lattice != f.lattice {
        return Err(HpoError::DimensionMismatch(
            "operator and test function on different lattices".into(),
        ));
    }
    if f.lattice.boundary() != Boundary::Periodic {
        return Err(HpoError::Precondition("spectral calculus needs a periodic lattice".into()));
    }
    Ok(TestFunction { lattice: f.lattice, values: op.apply_values(&f.values) })
}

/// Integral kernel of `op` in the continuum normalization:
/// `(op f)_i = Σ_j dt K(i,j) f_j`, so the identity has kernel `δ_ij/dt`.
pub fn kernel(op: &SpectralOperator) -> CMat {
    let n = op.lattice.n_points();
    let norm = 1.0 / (n as f64 * op.lattice.dt());
    CMat::from_fn(n, n, |i, j| {
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..n {
            let phase = 2.0 * PI * ((i + n - j) % n * k % n) as f64 / n as f64;
            acc += op.eigenvalues[k] * C64::from_polar(1.0, phase);
        }
        acc * norm
    })
}

/// Kernel of `op^{-1}`; errors on a singular operator.
pub fn greens_kernel(op: &SpectralOperator) -> Result<CMat> {
    Ok(kernel(&op.inverse()?))
}

// ---------------------------------------------------------------------
// 4D spacetime grids
// ---------------------------------------------------------------------

/// Uniform grid on a 4-torus with a distinguished foliation direction.
/// Signature convention is (+,-,-,-); the foliation vector must satisfy
/// `η(n,n) = 1` and, in this build, must be the grid's first axis.
#[derive(Debug, Clone, PartialEq)]
pub struct SpacetimeLattice {
    dims: [usize; 4],
    spacings: [f64; 4],
    foliation: [f64; 4],
}

impl SpacetimeLattice {
    pub fn new(dims: [usize; 4], spacings: [f64; 4], foliation: [f64; 4]) -> Result<Self> {
        if dims.iter().any(|&d| d < 2) {
            return Err(HpoError::Precondition("each grid axis needs at least 2 points".into()));
        }
        if spacings.iter().any(|&s| !(s > 0.0)) {
            return Err(HpoError::Precondition("grid spacings must be positive".into()));
        }
        let n = foliation;
        let minkowski = n[0] * n[0] - n[1] * n[1] - n[2] * n[2] - n[3] * n[3];
        if (minkowski - 1.0).abs() > 1e-12 {
            return Err(HpoError::Precondition(
                "foliation vector must be normalized: eta(n,n) = 1".into(),
            ));
        }
        if (n[0] - 1.0).abs() > 1e-12 || n[1].abs() > 1e-12 || n[2].abs() > 1e-12 || n[3].abs() > 1e-12 {
            return Err(HpoError::Unsupported(
                "tilted foliations are not realized on the grid; relabel axes so n = (1,0,0,0)"
                    .into(),
            ));
        }
        Ok(SpacetimeLattice { dims, spacings, foliation })
    }

    /// Grid with the default foliation `n = (1,0,0,0)`.
    pub fn standard(dims: [usize; 4], spacings: [f64; 4]) -> Result<Self> {
        SpacetimeLattice::new(dims, spacings, [1.0, 0.0, 0.0, 0.0])
    }

    pub fn dims(&self) -> [usize; 4] {
        self.dims
    }

    pub fn spacings(&self) -> [f64; 4] {
        self.spacings
    }

    pub fn foliation(&self) -> [f64; 4] {
        self.foliation
    }

    pub fn n_sites(&self) -> usize {
        self.dims.iter().product()
    }

    /// 4-volume element `dt dx dy dz`.
    pub fn dv(&self) -> f64 {
        self.spacings.iter().product()
    }

    /// Row-major site index of `(it, ix, iy, iz)`.
    pub fn site(&self, idx: [usize; 4]) -> usize {
        ((idx[0] * self.dims[1] + idx[1]) * self.dims[2] + idx[2]) * self.dims[3] + idx[3]
    }

    pub fn coords(&self, site: usize) -> [usize; 4] {
        let iz = site % self.dims[3];
        let rest = site / self.dims[3];
        let iy = rest % self.dims[2];
        let rest = rest / self.dims[2];
        let ix = rest % self.dims[1];
        let it = rest / self.dims[1];
        [it, ix, iy, iz]
    }

    /// Foliation time `t = n·X` of a site (first axis by construction).
    pub fn time_of_site(&self, site: usize) -> f64 {
        self.coords(site)[0] as f64 * self.spacings[0]
    }

    /// The time axis as a standalone periodic [`TimeLattice`].
    pub fn time_axis(&self) -> TimeLattice {
        TimeLattice::periodic(self.dims[0], self.spacings[0]).expect("valid by construction")
    }

    fn axis_frequency(&self, axis: usize, k: usize) -> f64 {
        let n = self.dims[axis] as isize;
        let k = k as isize;
        let signed = if 2 * k <= n { k } else { k - n };
        2.0 * PI * signed as f64 / (self.dims[axis] as f64 * self.spacings[axis])
    }

    /// Squared spatial frequency of the 4D Fourier mode at `freq_site`
    /// (the time-axis index of the mode is ignored by construction).
    pub fn spatial_k2(&self, freq_site: usize) -> f64 {
        let k = self.coords(freq_site);
        (1..4).map(|a| { let w = self.axis_frequency(a, k[a]); w * w }).sum()
    }
}

/// Complex grid function on a [`SpacetimeLattice`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    lattice: SpacetimeLattice,
    values: Vec<C64>,
}

impl GridFunction {
    pub fn new(lattice: SpacetimeLattice, values: Vec<C64>) -> Result<Self> {
        if values.len() != lattice.n_sites() {
            return Err(HpoError::DimensionMismatch("grid function length mismatch".into()));
        }
        Ok(GridFunction { lattice, values })
    }

    pub fn from_fn(lattice: SpacetimeLattice, mut f: impl FnMut([usize; 4]) -> C64) -> Self {
        let values = (0..lattice.n_sites()).map(|s| f(lattice.coords(s))).collect();
        GridFunction { lattice, values }
    }

    pub fn lattice(&self) -> &SpacetimeLattice {
        &self.lattice
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }
}

/// DFT along one axis of a 4D array (in place).
pub(crate) fn dft_axis(lattice: &SpacetimeLattice, values: &mut [C64], axis: usize, inverse: bool) {
    let dims = lattice.dims();
    let len = dims[axis];
    let sign = if inverse { 2.0 * PI / len as f64 } else { -2.0 * PI / len as f64 };
    let twiddle: Vec<C64> = (0..len).map(|m| C64::from_polar(1.0, sign * m as f64)).collect();
    let scale = if inverse { 1.0 / len as f64 } else { 1.0 };

    // Stride of the axis in the row-major layout.
    let stride: usize = dims[axis + 1..].iter().product();
    let outer: usize = dims[..axis].iter().product();
    let inner = stride;
    let block = len * stride;

    let mut line = vec![C64::new(0.0, 0.0); len];
    for o in 0..outer {
        for i in 0..inner {
            let base = o * block + i;
            for (j, slot) in line.iter_mut().enumerate() {
                *slot = values[base + j * stride];
            }
            for k in 0..len {
                let mut acc = C64::new(0.0, 0.0);
                for (j, v) in line.iter().enumerate() {
                    acc += v * twiddle[j * k % len];
                }
                values[base + k * stride] = acc * scale;
            }
        }
    }
}

/// Function of a foliation-respecting differential operator on a 4D grid,
/// stored as an eigenvalue per 4D Fourier mode.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralOperator4 {
    lattice: SpacetimeLattice,
    eigenvalues: Vec<f64>,
    label: String,
}

impl SpectralOperator4 {
    pub fn new(lattice: SpacetimeLattice, label: impl Into<String>, eigenvalues: Vec<f64>) -> Result<Self> {
        if eigenvalues.len() != lattice.n_sites() {
            return Err(HpoError::DimensionMismatch("one eigenvalue per Fourier mode".into()));
        }
        if eigenvalues.iter().any(|v| !v.is_finite()) {
            return Err(HpoError::Domain("non-finite spectral eigenvalue".into()));
        }
        Ok(SpectralOperator4 { lattice, eigenvalues, label: label.into() })
    }

    pub fn lattice(&self) -> &SpacetimeLattice {
        &self.lattice
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn is_positive(&self) -> bool {
        self.eigenvalues.iter().all(|&v| v >= 0.0)
    }

    /// Flags the massless obstruction: a zero mode makes the operator
    /// non-invertible without being an error at construction time.
    pub fn is_invertible(&self) -> bool {
        self.eigenvalues.iter().all(|&v| v != 0.0)
    }

    pub fn powf(&self, p: f64) -> Result<SpectralOperator4> {
        if p != libm::floor(p) && self.eigenvalues.iter().any(|&v| v < 0.0) {
            return Err(HpoError::Domain(format!(
                "operator {} has negative eigenvalues; fractional power undefined",
                self.label
            )));
        }
        if p < 0.0 && !self.is_invertible() {
            return Err(HpoError::Domain(format!("operator {} is singular", self.label)));
        }
        let eigs = self.eigenvalues.iter().map(|&v| libm::pow(v, p)).collect();
        SpectralOperator4::new(self.lattice.clone(), format!("({})^{p}", self.label), eigs)
    }

    pub fn sqrt(&self) -> Result<SpectralOperator4> {
        self.powf(0.5)
    }

    /// Applies the operator by 4D Fourier diagonalization.
    pub fn apply_values(&self, values: &[C64]) -> Vec<C64> {
        let mut hat = values.to_vec();
        for axis in 0..4 {
            dft_axis(&self.lattice, &mut hat, axis, false);
        }
        for (v, &e) in hat.iter_mut().zip(&self.eigenvalues) {
            *v *= e;
        }
        for axis in 0..4 {
            dft_axis(&self.lattice, &mut hat, axis, true);
        }
        hat
    }

    pub fn apply(&self, f: &GridFunction) -> Result<GridFunction> {
        if f.lattice != self.lattice {
            return Err(HpoError::DimensionMismatch("operator and grid function lattices differ".into()));
        }
        GridFunction::new(self.lattice.clone(), self.apply_values(&f.values))
    }
}

/// `K_n = (η^{μν} - n^μ n^ν) ∂_μ ∂_ν + m²`: for `n = (1,0,0,0)` this is
/// `-∇²_space + m²`, acting only in directions orthogonal to `n`, so its
/// eigenvalues are independent of the time-direction Fourier index.
pub fn build_kn(lattice: &SpacetimeLattice, mass: f64) -> Result<SpectralOperator4> {
    if mass < 0.0 {
        return Err(HpoError::Precondition("mass must be nonnegative".into()));
    }
    let eigs = (0..lattice.n_sites())
        .map(|s| lattice.spatial_k2(s) + mass * mass)
        .collect();
    SpectralOperator4::new(lattice.clone(), format!("K_n(m={mass})"), eigs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn inner_product_constant() {
        let lat = TimeLattice::periodic(4, 0.5).unwrap();
        let one = TestFunction::constant(lat, c(1.0, 0.0));
        let ip = inner_product(&one, &one).unwrap();
        assert!((ip - c(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn inner_product_disjoint_supports() {
        let lat = TimeLattice::periodic(6, 0.25).unwrap();
        let f = TestFunction::indicator(lat, 1);
        let g = TestFunction::indicator(lat, 4);
        assert_eq!(inner_product(&f, &g).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn inner_product_lattice_mismatch() {
        let a = TimeLattice::periodic(4, 0.5).unwrap();
        let b = TimeLattice::periodic(4, 0.25).unwrap();
        let f = TestFunction::zero(a);
        let g = TestFunction::zero(b);
        assert!(matches!(inner_product(&f, &g), Err(HpoError::DimensionMismatch(_))));
    }

    #[test]
    fn derivative_of_constant_is_zero() {
        let lat = TimeLattice::periodic(8, 0.3).unwrap();
        let f = TestFunction::constant(lat, c(2.5, -1.0));
        let df = derivative(&f).unwrap();
        assert!(df.values().iter().all(|z| z.norm() < 1e-13));
    }

    #[test]
    fn derivative_of_sine_is_scaled_cosine() {
        let lat = TimeLattice::periodic(16, 0.5).unwrap();
        let span = lat.span();
        let f = TestFunction::real_from_fn(lat, |t| libm::sin(2.0 * PI * t / span));
        let df = derivative(&f).unwrap();
        for (i, z) in df.values().iter().enumerate() {
            let expect = 2.0 * PI / span * libm::cos(2.0 * PI * lat.time(i) / span);
            assert!((z.re - expect).abs() < 1e-12, "mode mismatch at {i}");
            assert!(z.im.abs() < 1e-12);
        }
    }

    #[test]
    fn derivative_is_antisymmetric() {
        let lat = TimeLattice::periodic(12, 0.7).unwrap();
        let f = TestFunction::real_from_fn(lat, |t| libm::sin(1.3 * t) + 0.2 * libm::cos(t));
        let g = TestFunction::real_from_fn(lat, |t| libm::cos(2.0 * t) - 0.5);
        let lhs = inner_product(&f, &derivative(&g).unwrap()).unwrap();
        let rhs = inner_product(&derivative(&f).unwrap(), &g).unwrap();
        assert!((lhs + rhs).norm() < 1e-12);
    }

    #[test]
    fn open_boundary_needs_vanishing_endpoints() {
        let lat = TimeLattice::new(8, 0.5, Boundary::Open).unwrap();
        let f = TestFunction::constant(lat, c(1.0, 0.0));
        assert!(matches!(derivative(&f), Err(HpoError::Precondition(_))));
        let mut vals = vec![c(0.0, 0.0); 8];
        vals[3] = c(1.0, 0.0);
        let g = TestFunction::new(lat, vals).unwrap();
        assert!(derivative(&g).is_ok());
    }

    #[test]
    fn sqrt_minus_d2_eigenvalues_four_point() {
        // n=4, dt=1, omega=0, lambda=1: eigenvalues {0, pi/2, pi, pi/2}.
        let lat = TimeLattice::periodic(4, 1.0).unwrap();
        let op = SpectralOperator::sqrt_omega2_minus_lambda_d2(lat, 0.0, 1.0).unwrap();
        let eigs: Vec<f64> = op.eigenvalues().iter().map(|z| z.re).collect();
        let expect = [0.0, PI / 2.0, PI, PI / 2.0];
        for (a, b) in eigs.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn spectral_apply_scalar_and_square() {
        let lat = TimeLattice::periodic(8, 0.5).unwrap();
        let omega = 1.7;
        let op = SpectralOperator::sqrt_omega2_minus_lambda_d2(lat, omega, 0.0).unwrap();
        let f = TestFunction::real_from_fn(lat, |t| libm::sin(t) + 0.3);
        // lambda = 0 -> multiplies by omega.
        let g = spectral_apply(&op, &f).unwrap();
        for (a, b) in g.values().iter().zip(f.values()) {
            assert!((a - b * omega).norm() < 1e-12);
        }
        // Apply sqrt twice vs squared operator once.
        let op_l = SpectralOperator::sqrt_omega2_minus_lambda_d2(lat, omega, 0.8).unwrap();
        let twice = spectral_apply(&op_l, &spectral_apply(&op_l, &f).unwrap()).unwrap();
        let squared = spectral_apply(&op_l.compose(&op_l).unwrap(), &f).unwrap();
        for (a, b) in twice.values().iter().zip(squared.values()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn spectral_operators_commute() {
        let lat = TimeLattice::periodic(10, 0.4).unwrap();
        let a = SpectralOperator::sqrt_omega2_minus_lambda_d2(lat, 1.0, 0.5).unwrap();
        let b = SpectralOperator::derivative_op(lat);
        let f = TestFunction::real_from_fn(lat, |t| libm::cos(1.1 * t));
        let ab = spectral_apply(&a, &spectral_apply(&b, &f).unwrap()).unwrap();
        let ba = spectral_apply(&b, &spectral_apply(&a, &f).unwrap()).unwrap();
        for (x, y) in ab.values().iter().zip(ba.values()) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn identity_kernel_is_lattice_delta() {
        let lat = TimeLattice::periodic(6, 0.5).unwrap();
        let id = SpectralOperator::scalar(lat, 1.0);
        let k = kernel(&id);
        for i in 0..6 {
            for j in 0..6 {
                let expect = if i == j { 1.0 / 0.5 } else { 0.0 };
                assert!((k[(i, j)] - c(expect, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn greens_kernel_of_scalar() {
        let lat = TimeLattice::periodic(6, 0.25).unwrap();
        let omega = 2.0;
        let op = SpectralOperator::sqrt_omega2_minus_lambda_d2(lat, omega, 0.0).unwrap();
        let k = greens_kernel(&op).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                let expect = if i == j { 1.0 / (omega * 0.25) } else { 0.0 };
                assert!((k[(i, j)] - c(expect, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn greens_kernel_matches_dense_inverse() {
        // Dense-inverse oracle: build the dense operator matrix by applying
        // the operator to indicator columns, invert by Gauss elimination,
        // and compare with the spectral kernel.
        let lat = TimeLattice::periodic(8, 0.5).unwrap();
        let op = SpectralOperator::sqrt_omega2_minus_lambda_d2(lat, 1.3, 0.7).unwrap();
        let n = lat.n_points();
        let dt = lat.dt();
        // Dense matrix of op in the same normalization: (op f)_i = dt Σ_j M_ij f_j.
        let mut m = CMat::zeros(n, n);
        for j in 0..n {
            let e = TestFunction::indicator(lat, j);
            let col = spectral_apply(&op, &e).unwrap();
            for i in 0..n {
                m[(i, j)] = col.values()[i] / dt;
            }
        }
        // Gauss-Jordan inverse of (dt * M).
        let mut a = CMat::from_fn(n, n, |i, j| m[(i, j)] * dt);
        let mut inv = CMat::identity(n);
        for col in 0..n {
            let mut piv = col;
            for r in col + 1..n {
                if a[(r, col)].norm() > a[(piv, col)].norm() {
                    piv = r;
                }
            }
            for j in 0..n {
                let tmp = a[(col, j)];
                a[(col, j)] = a[(piv, j)];
                a[(piv, j)] = tmp;
                let tmp = inv[(col, j)];
                inv[(col, j)] = inv[(piv, j)];
                inv[(piv, j)] = tmp;
            }
            let d = a[(col, col)];
            for j in 0..n {
                a[(col, j)] /= d;
                inv[(col, j)] /= d;
            }
            for r in 0..n {
                if r != col {
                    let factor = a[(r, col)];
                    for j in 0..n {
                        let acj = a[(col, j)];
                        let icj = inv[(col, j)];
                        a[(r, j)] -= factor * acj;
                        inv[(r, j)] -= factor * icj;
                    }
                }
            }
        }
        // inv is the inverse of dt*M, i.e. (op^{-1} f)_i = Σ_j inv_ij f_j
        // = dt Σ_j (inv_ij / dt) f_j, so the kernel is inv/dt.
        let k = greens_kernel(&op).unwrap();
        for i in 0..n {
            for j in 0..n {
                assert!((k[(i, j)] - inv[(i, j)] / dt).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn kn_on_constant_and_plane_wave() {
        let lat = SpacetimeLattice::standard([4, 4, 2, 2], [0.5, 0.5, 1.0, 1.0]).unwrap();
        let mass = 1.5;
        let kn = build_kn(&lat, mass).unwrap();
        // Constant -> m^2 * constant.
        let one = GridFunction::from_fn(lat.clone(), |_| c(1.0, 0.0));
        let out = kn.apply(&one).unwrap();
        for v in out.values() {
            assert!((v - c(mass * mass, 0.0)).norm() < 1e-12);
        }
        // Plane wave in x with Fourier index 1 -> (k^2 + m^2) * itself.
        let kx = 2.0 * PI / (4.0 * 0.5);
        let wave = GridFunction::from_fn(lat.clone(), |idx| {
            C64::from_polar(1.0, kx * idx[1] as f64 * 0.5)
        });
        let out = kn.apply(&wave).unwrap();
        let expect = kx * kx + mass * mass;
        for (a, b) in out.values().iter().zip(wave.values()) {
            assert!((a - b * expect).norm() < 1e-11);
        }
    }

    #[test]
    fn kn_time_independent_and_bounded_below() {
        let lat = SpacetimeLattice::standard([4, 2, 2, 2], [1.0, 1.0, 1.0, 1.0]).unwrap();
        let mass = 0.7;
        let kn = build_kn(&lat, mass).unwrap();
        for s in 0..lat.n_sites() {
            let k = lat.coords(s);
            let partner = lat.site([0, k[1], k[2], k[3]]);
            assert_eq!(kn.eigenvalues()[s], kn.eigenvalues()[partner]);
            assert!(kn.eigenvalues()[s] >= mass * mass);
        }
    }

    #[test]
    fn massless_kn_flagged_singular() {
        let lat = SpacetimeLattice::standard([2, 2, 2, 2], [1.0; 4]).unwrap();
        let kn = build_kn(&lat, 0.0).unwrap();
        assert!(!kn.is_invertible());
        assert!(kn.is_positive());
    }

    #[test]
    fn tilted_foliation_rejected() {
        let err = SpacetimeLattice::new([2, 2, 2, 2], [1.0; 4], [1.2, 0.663324958071, 0.0, 0.0]);
        assert!(err.is_err());
    }
}
