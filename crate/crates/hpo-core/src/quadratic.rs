//! Exact symbolic algebra of normal-ordered operators of degree at most
//! two in bosonic modes.
//!
//! Every operator in this crate is a polynomial
//!
//! ```text
//!   A = c + Σ_i α_i b†_i + Σ_i β_i b_i
//!         + Σ_ij M_ij b†_i b_j
//!         + (1/2) Σ_ij P_ij b†_i b†_j + (1/2) Σ_ij Q_ij b_i b_j
//! ```
//!
//! over dimensionless discrete modes with `[b_i, b†_j] = δ_ij`. This class
//! is closed under commutators and under conjugation by Gaussian
//! (one-particle) unitaries, which is what makes an exact engine possible:
//! no commutator ever produces a degree-3 term.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::lattice::{SpacetimeLattice, TimeLattice};
use crate::linalg::CMat;
use crate::{C64, HpoError, Result};

/// What the discrete modes are labelled by.
#[derive(Debug, Clone, PartialEq)]
pub enum ModeLabels {
    /// One mode per point of a time lattice.
    Time(TimeLattice),
    /// One mode per (time point, internal index) pair; the internal index
    /// runs over `0..internal_dim` and varies fastest.
    TimeInternal(TimeLattice, usize),
    /// One mode per site of a 4D spacetime grid.
    Grid(SpacetimeLattice),
}

/// Index space of the discrete bosonic modes.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSpace {
    labels: ModeLabels,
}

impl ModeSpace {
    pub fn time(lattice: TimeLattice) -> Self {
        ModeSpace { labels: ModeLabels::Time(lattice) }
    }

    pub fn time_internal(lattice: TimeLattice, internal_dim: usize) -> Result<Self> {
        if internal_dim == 0 {
            return Err(HpoError::Precondition("internal dimension must be positive".into()));
        }
        Ok(ModeSpace { labels: ModeLabels::TimeInternal(lattice, internal_dim) })
    }

    pub fn grid(lattice: SpacetimeLattice) -> Self {
        ModeSpace { labels: ModeLabels::Grid(lattice) }
    }

    pub fn labels(&self) -> &ModeLabels {
        &self.labels
    }

    pub fn size(&self) -> usize {
        match &self.labels {
            ModeLabels::Time(l) => l.n_points(),
            ModeLabels::TimeInternal(l, d) => l.n_points() * d,
            ModeLabels::Grid(l) => l.n_sites(),
        }
    }

    /// Internal dimension (1 unless the labels carry an internal index).
    pub fn internal_dim(&self) -> usize {
        match &self.labels {
            ModeLabels::TimeInternal(_, d) => *d,
            _ => 1,
        }
    }

    pub fn time_lattice(&self) -> Option<TimeLattice> {
        match &self.labels {
            ModeLabels::Time(l) | ModeLabels::TimeInternal(l, _) => Some(*l),
            ModeLabels::Grid(_) => None,
        }
    }

    /// Mode index of the (time point, internal component) pair.
    pub fn mode_of(&self, time_index: usize, internal: usize) -> usize {
        match &self.labels {
            ModeLabels::Time(_) => time_index,
            ModeLabels::TimeInternal(_, d) => time_index * d + internal,
            ModeLabels::Grid(_) => time_index,
        }
    }

    /// Label time of a mode (grid modes report the foliation time).
    pub fn time_of_mode(&self, mode: usize) -> f64 {
        match &self.labels {
            ModeLabels::Time(l) => l.time(mode),
            ModeLabels::TimeInternal(l, d) => l.time(mode / d),
            ModeLabels::Grid(l) => l.time_of_site(mode),
        }
    }

    /// Smearing weight: `dt` for time modes, `dt dx dy dz` for grid modes.
    pub fn weight(&self) -> f64 {
        match &self.labels {
            ModeLabels::Time(l) | ModeLabels::TimeInternal(l, _) => l.dt(),
            ModeLabels::Grid(l) => l.dv(),
        }
    }
}

fn check_same_modes(a: &ModeSpace, b: &ModeSpace) -> Result<()> {
    if a != b {
        return Err(HpoError::DimensionMismatch("operators on different mode spaces".into()));
    }
    Ok(())
}

/// Normal-ordered polynomial of degree at most two in the modes of a
/// [`ModeSpace`], plus a scalar. Canonical form: equality of operators is
/// equality of all components.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticOperator {
    modes: ModeSpace,
    scalar: C64,
    lin_create: Vec<C64>,
    lin_annih: Vec<C64>,
    quad_nc: CMat,
    quad_cc: CMat,
    quad_aa: CMat,
}

impl QuadraticOperator {
    pub fn zero(modes: ModeSpace) -> Result<Self> {
        let n = modes.size();
        if n == 0 {
            return Err(HpoError::Precondition("empty mode space".into()));
        }
        Ok(QuadraticOperator {
            modes,
            scalar: C64::new(0.0, 0.0),
            lin_create: vec![C64::new(0.0, 0.0); n],
            lin_annih: vec![C64::new(0.0, 0.0); n],
            quad_nc: CMat::zeros(n, n),
            quad_cc: CMat::zeros(n, n),
            quad_aa: CMat::zeros(n, n),
        })
    }

    /// Full constructor. `quad_cc` and `quad_aa` are symmetrized (only
    /// their symmetric parts are defined by the operator they encode).
    pub fn from_parts(
        modes: ModeSpace,
        scalar: C64,
        lin_create: Vec<C64>,
        lin_annih: Vec<C64>,
        quad_nc: CMat,
        quad_cc: CMat,
        quad_aa: CMat,
    ) -> Result<Self> {
        let n = modes.size();
        if n == 0 {
            return Err(HpoError::Precondition("empty mode space".into()));
        }
        let shape_ok = lin_create.len() == n
            && lin_annih.len() == n
            && quad_nc.rows() == n
            && quad_nc.cols() == n
            && quad_cc.rows() == n
            && quad_cc.cols() == n
            && quad_aa.rows() == n
            && quad_aa.cols() == n;
        if !shape_ok {
            return Err(HpoError::DimensionMismatch(
                "operator components do not match the mode-space size".into(),
            ));
        }
        Ok(QuadraticOperator {
            modes,
            scalar,
            lin_create,
            lin_annih,
            quad_nc,
            quad_cc: symmetrize(&quad_cc),
            quad_aa: symmetrize(&quad_aa),
        })
    }

    pub fn constant(modes: ModeSpace, c: C64) -> Result<Self> {
        let mut op = QuadraticOperator::zero(modes)?;
        op.scalar = c;
        Ok(op)
    }

    /// `Σ_i coeffs_i b_i`.
    pub fn annihilator(modes: ModeSpace, coeffs: Vec<C64>) -> Result<Self> {
        let n = modes.size();
        let mut op = QuadraticOperator::zero(modes)?;
        if coeffs.len() != n {
            return Err(HpoError::DimensionMismatch("coefficient length mismatch".into()));
        }
        op.lin_annih = coeffs;
        Ok(op)
    }

    /// `Σ_i coeffs_i b†_i`.
    pub fn creator(modes: ModeSpace, coeffs: Vec<C64>) -> Result<Self> {
        let n = modes.size();
        let mut op = QuadraticOperator::zero(modes)?;
        if coeffs.len() != n {
            return Err(HpoError::DimensionMismatch("coefficient length mismatch".into()));
        }
        op.lin_create = coeffs;
        Ok(op)
    }

    /// `Σ_ij M_ij b†_i b_j`.
    pub fn number_form(modes: ModeSpace, m: CMat) -> Result<Self> {
        let n = modes.size();
        let mut op = QuadraticOperator::zero(modes)?;
        if m.rows() != n || m.cols() != n {
            return Err(HpoError::DimensionMismatch("matrix shape mismatch".into()));
        }
        op.quad_nc = m;
        Ok(op)
    }

    pub fn modes(&self) -> &ModeSpace {
        &self.modes
    }

    pub fn scalar(&self) -> C64 {
        self.scalar
    }

    pub fn lin_create(&self) -> &[C64] {
        &self.lin_create
    }

    pub fn lin_annih(&self) -> &[C64] {
        &self.lin_annih
    }

    pub fn quad_nc(&self) -> &CMat {
        &self.quad_nc
    }

    pub fn quad_cc(&self) -> &CMat {
        &self.quad_cc
    }

    pub fn quad_aa(&self) -> &CMat {
        &self.quad_aa
    }

    /// Vacuum expectation `<0|A|0>` (the scalar of the normal form).
    pub fn vacuum_expectation(&self) -> C64 {
        self.scalar
    }

    pub fn adjoint(&self) -> QuadraticOperator {
        QuadraticOperator {
            modes: self.modes.clone(),
            scalar: self.scalar.conj(),
            lin_create: self.lin_annih.iter().map(|z| z.conj()).collect(),
            lin_annih: self.lin_create.iter().map(|z| z.conj()).collect(),
            quad_nc: self.quad_nc.adjoint(),
            quad_cc: self.quad_aa.conj(),
            quad_aa: self.quad_cc.conj(),
        }
    }

    pub fn scale(&self, z: C64) -> QuadraticOperator {
        QuadraticOperator {
            modes: self.modes.clone(),
            scalar: self.scalar * z,
            lin_create: self.lin_create.iter().map(|a| a * z).collect(),
            lin_annih: self.lin_annih.iter().map(|a| a * z).collect(),
            quad_nc: self.quad_nc.scale(z),
            quad_cc: self.quad_cc.scale(z),
            quad_aa: self.quad_aa.scale(z),
        }
    }

    pub fn add(&self, other: &QuadraticOperator) -> Result<QuadraticOperator> {
        check_same_modes(&self.modes, &other.modes)?;
        Ok(QuadraticOperator {
            modes: self.modes.clone(),
            scalar: self.scalar + other.scalar,
            lin_create: zip_add(&self.lin_create, &other.lin_create),
            lin_annih: zip_add(&self.lin_annih, &other.lin_annih),
            quad_nc: self.quad_nc.add(&other.quad_nc),
            quad_cc: self.quad_cc.add(&other.quad_cc),
            quad_aa: self.quad_aa.add(&other.quad_aa),
        })
    }

    pub fn sub(&self, other: &QuadraticOperator) -> Result<QuadraticOperator> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    /// Largest component magnitude across all parts; the operator norm
    /// surrogate used by every residual check.
    pub fn max_abs(&self) -> f64 {
        let lin = self
            .lin_create
            .iter()
            .chain(&self.lin_annih)
            .map(|z| z.norm())
            .fold(0.0f64, f64::max);
        self.scalar
            .norm()
            .max(lin)
            .max(self.quad_nc.max_abs())
            .max(self.quad_cc.max_abs())
            .max(self.quad_aa.max_abs())
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.max_abs() <= tol
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.sub(&self.adjoint()).map(|d| d.is_zero(tol)).unwrap_or(false)
    }

    /// Number-conserving: no linear or pair-creation/annihilation parts.
    pub fn is_number_conserving(&self, tol: f64) -> bool {
        self.lin_create.iter().chain(&self.lin_annih).all(|z| z.norm() <= tol)
            && self.quad_cc.max_abs() <= tol
            && self.quad_aa.max_abs() <= tol
    }
}

fn zip_add(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn symmetrize(m: &CMat) -> CMat {
    CMat::from_fn(m.rows(), m.cols(), |i, j| (m[(i, j)] + m[(j, i)]) * 0.5)
}

fn dotu(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Exact normal-ordered commutator `[A, B]`.
///
/// The closed-form component arithmetic below is the whole engine; it is
/// cross-checked against dense Fock-space matrices in the integration
/// tests. No degree-3 residue can occur.
pub fn commutator(a: &QuadraticOperator, b: &QuadraticOperator) -> Result<QuadraticOperator> {
    check_same_modes(&a.modes, &b.modes)?;
    let n = a.modes.size();

    let ma = &a.quad_nc;
    let mb = &b.quad_nc;
    let pa = &a.quad_cc;
    let pb = &b.quad_cc;
    let qa = &a.quad_aa;
    let qb = &b.quad_aa;

    // Scalar: β_A·α_B - β_B·α_A + (tr(P_B Q_A) - tr(P_A Q_B)) / 2.
    let scalar = dotu(&a.lin_annih, &b.lin_create) - dotu(&b.lin_annih, &a.lin_create)
        + (pb.mul(qa).trace() - pa.mul(qb).trace()) * 0.5;

    // Creation coefficients: M_A α_B - M_B α_A + P_A β_B ... signs below.
    let mut lin_create = vec![C64::new(0.0, 0.0); n];
    let mut lin_annih = vec![C64::new(0.0, 0.0); n];
    let t1 = ma.matvec(&b.lin_create);
    let t2 = mb.matvec(&a.lin_create);
    let t3 = pb.matvec(&a.lin_annih);
    let t4 = pa.matvec(&b.lin_annih);
    for i in 0..n {
        lin_create[i] = t1[i] - t2[i] + t3[i] - t4[i];
    }
    let mat = ma.transpose();
    let mbt = mb.transpose();
    let t5 = mbt.matvec(&a.lin_annih);
    let t6 = mat.matvec(&b.lin_annih);
    let t7 = qa.matvec(&b.lin_create);
    let t8 = qb.matvec(&a.lin_create);
    for i in 0..n {
        lin_annih[i] = t5[i] - t6[i] + t7[i] - t8[i];
    }

    // Quadratic parts.
    let quad_nc = ma
        .mul(mb)
        .sub(&mb.mul(ma))
        .sub(&pa.mul(qb))
        .add(&pb.mul(qa));
    let quad_cc = ma
        .mul(pb)
        .add(&pb.mul(&mat))
        .sub(&mb.mul(pa))
        .sub(&pa.mul(&mbt));
    let quad_aa = qa
        .mul(mb)
        .add(&mbt.mul(qa))
        .sub(&qb.mul(ma))
        .sub(&mat.mul(qb));

    QuadraticOperator::from_parts(
        a.modes.clone(),
        scalar,
        lin_create,
        lin_annih,
        quad_nc,
        quad_cc,
        quad_aa,
    )
}

/// The c-number central part of `[A, B]` (equals `<0|[A,B]|0>`).
pub fn central_term(a: &QuadraticOperator, b: &QuadraticOperator) -> Result<C64> {
    Ok(commutator(a, b)?.scalar)
}

/// Vacuum expectation of a *product*: `<0|A B|0>`.
pub fn vacuum_expectation_product(a: &QuadraticOperator, b: &QuadraticOperator) -> Result<C64> {
    check_same_modes(&a.modes, &b.modes)?;
    Ok(a.scalar * b.scalar
        + dotu(&a.lin_annih, &b.lin_create)
        + a.quad_aa.mul(&b.quad_cc).trace() * 0.5)
}

/// Unitary on the one-particle space, inducing a Bogoliubov-free (mode
/// mixing only) automorphism of the quadratic algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct OneParticleUnitary {
    modes: ModeSpace,
    matrix: CMat,
    label: String,
}

impl OneParticleUnitary {
    pub fn new(modes: ModeSpace, matrix: CMat, label: impl Into<String>) -> Result<Self> {
        if matrix.rows() != modes.size() || matrix.cols() != modes.size() {
            return Err(HpoError::DimensionMismatch("unitary shape mismatch".into()));
        }
        if !matrix.is_unitary(1e-12) {
            return Err(HpoError::Precondition("matrix is not unitary to 1e-12".into()));
        }
        Ok(OneParticleUnitary { modes, matrix, label: label.into() })
    }

    /// Diagonal phase unitary `b_i -> e^{i phase_i} b_i`.
    pub fn diagonal_phases(modes: ModeSpace, phases: &[f64], label: impl Into<String>) -> Result<Self> {
        let n = modes.size();
        if phases.len() != n {
            return Err(HpoError::DimensionMismatch("one phase per mode required".into()));
        }
        let m = CMat::from_fn(n, n, |i, j| {
            if i == j {
                C64::from_polar(1.0, phases[i])
            } else {
                C64::new(0.0, 0.0)
            }
        });
        OneParticleUnitary::new(modes, m, label)
    }

    pub fn identity(modes: ModeSpace) -> Self {
        let n = modes.size();
        OneParticleUnitary { modes, matrix: CMat::identity(n), label: "1".into() }
    }

    pub fn modes(&self) -> &ModeSpace {
        &self.modes
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

/// Conjugation by the Fock lift of a one-particle unitary: substitutes
/// `b -> U b`, `b† -> conj(U) b†` and so is a *-automorphism, preserving
/// adjoints and commutators exactly.
pub fn gaussian_conjugate(
    a: &QuadraticOperator,
    u: &OneParticleUnitary,
) -> Result<QuadraticOperator> {
    check_same_modes(&a.modes, &u.modes)?;
    let m = &u.matrix;
    let mdag = m.adjoint();
    let mconj = m.conj();
    let mt = m.transpose();
    QuadraticOperator::from_parts(
        a.modes.clone(),
        a.scalar,
        mdag.matvec(&a.lin_create),
        mt.matvec(&a.lin_annih),
        mdag.mul(&a.quad_nc).mul(m),
        mdag.mul(&a.quad_cc).mul(&mconj),
        mt.mul(&a.quad_aa).mul(m),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::TimeLattice;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn modes4() -> ModeSpace {
        ModeSpace::time(TimeLattice::periodic(4, 0.5).unwrap())
    }

    fn pseudo_random_op(modes: &ModeSpace, seed: u64) -> QuadraticOperator {
        let n = modes.size();
        let mut state = seed | 1;
        let mut rnd = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let mut rc = || c(rnd(), rnd());
        QuadraticOperator::from_parts(
            modes.clone(),
            rc(),
            (0..n).map(|_| rc()).collect(),
            (0..n).map(|_| rc()).collect(),
            CMat::from_fn(n, n, |_, _| rc()),
            CMat::from_fn(n, n, |_, _| rc()),
            CMat::from_fn(n, n, |_, _| rc()),
        )
        .unwrap()
    }

    #[test]
    fn basic_ccr() {
        // [b_i, b†_j] = δ_ij as operators.
        let modes = modes4();
        let bi = QuadraticOperator::annihilator(modes.clone(), {
            let mut v = vec![c(0.0, 0.0); 4];
            v[1] = c(1.0, 0.0);
            v
        })
        .unwrap();
        let bjd = QuadraticOperator::creator(modes.clone(), {
            let mut v = vec![c(0.0, 0.0); 4];
            v[1] = c(1.0, 0.0);
            v
        })
        .unwrap();
        let comm = commutator(&bi, &bjd).unwrap();
        assert!((comm.scalar() - c(1.0, 0.0)).norm() < 1e-15);
        assert!(comm.sub(&QuadraticOperator::constant(modes, c(1.0, 0.0)).unwrap()).unwrap().is_zero(1e-15));
    }

    #[test]
    fn antisymmetry_and_self_commutator() {
        let modes = modes4();
        let a = pseudo_random_op(&modes, 7);
        let b = pseudo_random_op(&modes, 99);
        let ab = commutator(&a, &b).unwrap();
        let ba = commutator(&b, &a).unwrap();
        assert!(ab.add(&ba).unwrap().is_zero(1e-13));
        assert!(commutator(&a, &a).unwrap().is_zero(1e-13));
    }

    #[test]
    fn jacobi_identity_on_random_triples() {
        let modes = modes4();
        for seed in [3u64, 17, 41] {
            let a = pseudo_random_op(&modes, seed);
            let b = pseudo_random_op(&modes, seed + 1000);
            let cc = pseudo_random_op(&modes, seed + 2000);
            let j = commutator(&commutator(&a, &b).unwrap(), &cc)
                .unwrap()
                .add(&commutator(&commutator(&b, &cc).unwrap(), &a).unwrap())
                .unwrap()
                .add(&commutator(&commutator(&cc, &a).unwrap(), &b).unwrap())
                .unwrap();
            assert!(j.is_zero(1e-12), "Jacobi residual {}", j.max_abs());
        }
    }

    #[test]
    fn adjoint_is_involutive_and_antihomomorphic() {
        let modes = modes4();
        let a = pseudo_random_op(&modes, 5);
        let b = pseudo_random_op(&modes, 6);
        assert!(a.adjoint().adjoint().sub(&a).unwrap().is_zero(1e-15));
        // [A,B]† = [B†, A†].
        let lhs = commutator(&a, &b).unwrap().adjoint();
        let rhs = commutator(&b.adjoint(), &a.adjoint()).unwrap();
        assert!(lhs.sub(&rhs).unwrap().is_zero(1e-13));
    }

    #[test]
    fn conjugation_is_automorphism() {
        let modes = modes4();
        let a = pseudo_random_op(&modes, 11);
        let b = pseudo_random_op(&modes, 12);
        let phases = [0.3, -1.2, 2.0, 0.7];
        let u = OneParticleUnitary::diagonal_phases(modes.clone(), &phases, "test").unwrap();
        let lhs = gaussian_conjugate(&commutator(&a, &b).unwrap(), &u).unwrap();
        let rhs = commutator(
            &gaussian_conjugate(&a, &u).unwrap(),
            &gaussian_conjugate(&b, &u).unwrap(),
        )
        .unwrap();
        assert!(lhs.sub(&rhs).unwrap().is_zero(1e-13));
        // *-automorphism: commutes with adjoint.
        let lhs = gaussian_conjugate(&a.adjoint(), &u).unwrap();
        let rhs = gaussian_conjugate(&a, &u).unwrap().adjoint();
        assert!(lhs.sub(&rhs).unwrap().is_zero(1e-13));
        // Identity leaves operators unchanged.
        let id = OneParticleUnitary::identity(modes);
        assert!(gaussian_conjugate(&a, &id).unwrap().sub(&a).unwrap().is_zero(1e-15));
    }

    #[test]
    fn non_unitary_rejected() {
        let modes = modes4();
        let m = CMat::from_fn(4, 4, |i, j| if i == j { c(2.0, 0.0) } else { c(0.0, 0.0) });
        assert!(matches!(
            OneParticleUnitary::new(modes, m, "bad"),
            Err(HpoError::Precondition(_))
        ));
    }

    #[test]
    fn empty_smearing_is_error() {
        assert!(TimeLattice::periodic(0, 1.0).is_err());
    }

    #[test]
    fn central_term_of_self_is_zero() {
        let modes = modes4();
        let a = pseudo_random_op(&modes, 23);
        assert!(central_term(&a, &a).unwrap().norm() < 1e-13);
    }
}
