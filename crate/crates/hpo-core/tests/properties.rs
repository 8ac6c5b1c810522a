//! Property tests for the structural invariants: Lie-algebra laws of the
//! commutator, *-structure, automorphism laws of Gaussian conjugation,
//! inner-product and spectral-calculus identities, and the canonical
//! commutation relations under random smearings.

use hpo_core::lattice::{derivative, inner_product, TestFunction, TimeLattice};
use hpo_core::linalg::{cplx, expm_hermitian, CMat};
use hpo_core::oscillator::{smear_momentum, smear_position, OscillatorParams};
use hpo_core::quadratic::{
    commutator, gaussian_conjugate, ModeSpace, OneParticleUnitary, QuadraticOperator,
};
use hpo_core::C64;
use proptest::prelude::*;

const N: usize = 4;

fn cvec() -> impl Strategy<Value = Vec<C64>> {
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| cplx(a, b)), N)
}

fn cmatrix() -> impl Strategy<Value = CMat> {
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| cplx(a, b)), N * N)
        .prop_map(|v| CMat::from_fn(N, N, |i, j| v[i * N + j]))
}

fn modes() -> ModeSpace {
    ModeSpace::time(TimeLattice::periodic(N, 0.5).unwrap())
}

fn quad_op() -> impl Strategy<Value = QuadraticOperator> {
    (
        (-1.0f64..1.0, -1.0f64..1.0),
        cvec(),
        cvec(),
        cmatrix(),
        cmatrix(),
        cmatrix(),
    )
        .prop_map(|(c, a, b, m, p, q)| {
            QuadraticOperator::from_parts(modes(), cplx(c.0, c.1), a, b, m, p, q).unwrap()
        })
}

fn unitary() -> impl Strategy<Value = OneParticleUnitary> {
    cmatrix().prop_map(|g| {
        let herm = g.add(&g.adjoint()).scale(cplx(0.5, 0.0));
        let u = expm_hermitian(&herm, cplx(0.0, 1.0)).unwrap();
        OneParticleUnitary::new(modes(), u, "random").unwrap()
    })
}

fn real_fn() -> impl Strategy<Value = TestFunction> {
    proptest::collection::vec(-2.0f64..2.0, N).prop_map(|v| {
        TestFunction::new(
            TimeLattice::periodic(N, 0.5).unwrap(),
            v.into_iter().map(|x| cplx(x, 0.0)).collect(),
        )
        .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn commutator_is_antisymmetric(a in quad_op(), b in quad_op()) {
        let ab = commutator(&a, &b).unwrap();
        let ba = commutator(&b, &a).unwrap();
        prop_assert!(ab.add(&ba).unwrap().is_zero(1e-12));
    }

    #[test]
    fn commutator_satisfies_jacobi(a in quad_op(), b in quad_op(), c in quad_op()) {
        let j = commutator(&commutator(&a, &b).unwrap(), &c).unwrap()
            .add(&commutator(&commutator(&b, &c).unwrap(), &a).unwrap()).unwrap()
            .add(&commutator(&commutator(&c, &a).unwrap(), &b).unwrap()).unwrap();
        prop_assert!(j.is_zero(1e-11), "Jacobi residual {}", j.max_abs());
    }

    #[test]
    fn commutator_is_bilinear(a in quad_op(), b in quad_op(), c in quad_op(),
                              za in -1.0f64..1.0, zb in -1.0f64..1.0) {
        let z1 = cplx(za, zb);
        let lhs = commutator(&a.scale(z1).add(&b).unwrap(), &c).unwrap();
        let rhs = commutator(&a, &c).unwrap().scale(z1)
            .add(&commutator(&b, &c).unwrap()).unwrap();
        prop_assert!(lhs.sub(&rhs).unwrap().is_zero(1e-12));
    }

    #[test]
    fn adjoint_reverses_commutators(a in quad_op(), b in quad_op()) {
        let lhs = commutator(&a, &b).unwrap().adjoint();
        let rhs = commutator(&b.adjoint(), &a.adjoint()).unwrap();
        prop_assert!(lhs.sub(&rhs).unwrap().is_zero(1e-12));
    }

    #[test]
    fn conjugation_is_star_automorphism(a in quad_op(), b in quad_op(), u in unitary()) {
        // Preserves the bracket.
        let lhs = gaussian_conjugate(&commutator(&a, &b).unwrap(), &u).unwrap();
        let rhs = commutator(
            &gaussian_conjugate(&a, &u).unwrap(),
            &gaussian_conjugate(&b, &u).unwrap(),
        ).unwrap();
        prop_assert!(lhs.sub(&rhs).unwrap().is_zero(1e-11));
        // Preserves the star.
        let lhs = gaussian_conjugate(&a.adjoint(), &u).unwrap();
        let rhs = gaussian_conjugate(&a, &u).unwrap().adjoint();
        prop_assert!(lhs.sub(&rhs).unwrap().is_zero(1e-11));
        // Preserves the vacuum expectation (no Bogoliubov mixing).
        prop_assert!(
            (gaussian_conjugate(&a, &u).unwrap().vacuum_expectation()
                - a.vacuum_expectation()).norm() < 1e-13
        );
    }

    #[test]
    fn inner_product_is_conjugate_symmetric(f in real_fn(), g in real_fn()) {
        let fg = inner_product(&f, &g).unwrap();
        let gf = inner_product(&g, &f).unwrap();
        prop_assert!((fg - gf.conj()).norm() < 1e-12);
        let ff = inner_product(&f, &f).unwrap();
        prop_assert!(ff.im.abs() < 1e-13 && ff.re >= -1e-13);
    }

    #[test]
    fn spectral_derivative_is_antisymmetric(f in real_fn(), g in real_fn()) {
        let df = derivative(&f).unwrap();
        let dg = derivative(&g).unwrap();
        let lhs = inner_product(&f, &dg).unwrap();
        let rhs = inner_product(&df, &g).unwrap();
        prop_assert!((lhs + rhs).norm() < 1e-11);
    }

    #[test]
    fn canonical_commutators_hold_for_random_smearings(f in real_fn(), g in real_fn()) {
        let p = OscillatorParams::default();
        let ms = modes();
        let xf = smear_position(&ms, &f, &p).unwrap();
        let pg = smear_momentum(&ms, &g, &p).unwrap();
        let xg = smear_position(&ms, &g, &p).unwrap();
        let pf = smear_momentum(&ms, &f, &p).unwrap();
        // [x_f, x_g] = [p_f, p_g] = 0.
        prop_assert!(commutator(&xf, &xg).unwrap().is_zero(1e-12));
        prop_assert!(commutator(&pf, &pg).unwrap().is_zero(1e-12));
        // [x_f, p_g] = i hbar <f, g>, purely central.
        let comm = commutator(&xf, &pg).unwrap();
        let expected = cplx(0.0, p.hbar) * inner_product(&f, &g).unwrap();
        prop_assert!((comm.scalar() - expected).norm() < 1e-12);
        let central = QuadraticOperator::constant(ms, comm.scalar()).unwrap();
        prop_assert!(comm.sub(&central).unwrap().is_zero(1e-13));
    }
}
