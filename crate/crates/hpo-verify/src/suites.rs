//! The nine verification suites. Each check measures a numeric residual
//! (recorded even on pass) against a stated identity of the lattice
//! algebra; the anchors in [`CATALOG`] say in words what is certified.

use std::time::Instant;

use anyhow::{anyhow, bail, Result};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use hpo_core::fock::{self, FockBasis, FockVector};
use hpo_core::histories::{
    class_operator, decoherence, position_interval_projector, position_sign_projectors,
    sho_gibbs_state, sho_hamiltonian, HistoryProposition, SingleTimeSystem,
};
use hpo_core::lattice::{
    derivative, greens_kernel, inner_product, GridFunction, SpacetimeLattice, TestFunction,
    TimeLattice,
};
use hpo_core::linalg::{cplx, expm_hermitian, hermitian_eig, CMat};
use hpo_core::oscillator::{
    build_angular_momentum, build_center_of_time, build_h, heisenberg_position, smear_momentum,
    smear_position, spectral_matrix, OscillatorParams, VelocityExtended,
};
use hpo_core::qft::{FieldParams, ScalarField};
use hpo_core::quadratic::{
    central_term, commutator, gaussian_conjugate, vacuum_expectation_product, ModeSpace,
    OneParticleUnitary, QuadraticOperator,
};
use hpo_core::C64;

use crate::config::SuiteConfig;
use crate::report::{CheckResult, SuiteReport};

pub const SUITE_NAMES: [&str; 9] = [
    "cha",
    "hamiltonian",
    "nparticle",
    "heisenberg",
    "coherent",
    "angular",
    "velocity",
    "qft",
    "histories",
];

/// (suite, check id, anchor) for every check any suite can emit. The
/// anchors state the certified identity; `trace` prints this table.
pub const CATALOG: &[(&str, &str, &str)] = &[
    ("cha", "cha.xx-commutator", "[x_f, x_g] = 0 for smeared positions"),
    ("cha", "cha.pp-commutator", "[p_f, p_g] = 0 for smeared momenta"),
    ("cha", "cha.xp-commutator", "[x_f, p_g] = i hbar <f,g>, purely central"),
    ("cha", "cha.ladder-reconstruction", "b_f rebuilt from x and p satisfies [b_f, b_g†] = <f,g>"),
    ("hamiltonian", "hamiltonian.heisenberg-equation", "[H(chi), x_f] = -(i hbar / m) p_{chi f}"),
    ("hamiltonian", "hamiltonian.commuting-family", "[H(chi1), H(chi2)] = 0"),
    ("hamiltonian", "hamiltonian.ladder-flow", "[H(chi), b_f] = -hbar omega b_{chi f}"),
    ("hamiltonian", "hamiltonian.rotation-formulas", "conjugation by U(chi) sends x_f to cos(omega chi) x + (1/m omega) sin(omega chi) p"),
    ("hamiltonian", "hamiltonian.vacuum-energy", "<0| H(chi) |0> = 0"),
    ("hamiltonian", "hamiltonian.vacuum-correlation", "<0| x_f x_g |0> = (hbar / 2 m omega) <f,g>"),
    ("nparticle", "nparticle.integer-spectrum", "N-particle block of H(1) has every eigenvalue N hbar omega"),
    ("nparticle", "nparticle.state-energies", "H(chi) eigenvalue on an occupation state is hbar omega sum of chi at the occupied times, repeats included"),
    ("nparticle", "nparticle.center-of-time", "center-of-time eigenvalue is the sum of occupied label times"),
    ("nparticle", "nparticle.vacuum-annihilated", "H(chi) annihilates the vacuum"),
    ("nparticle", "nparticle.two-particle", "two-particle vectors, equal times included, are H(chi) eigenvectors"),
    ("heisenberg", "heisenberg.covariant-commutator", "[x_{k1,f}, x_{k2,g}] is central with value (i hbar / m omega) sum dt f g sin(omega (k2 - k1))"),
    ("heisenberg", "heisenberg.functional-derivative", "central difference of the dressed position in the dressing direction gives (1/m) p at the point"),
    ("heisenberg", "heisenberg.difference-order", "halving the step shrinks the finite-difference error at second order"),
    ("coherent", "coherent.overlap-law", "truncated coherent overlaps match exp<phi,psi> within the analytic series tail"),
    ("coherent", "coherent.vacuum-at-zero", "the zero amplitude gives exactly the vacuum"),
    ("coherent", "coherent.annihilator-eigenvector", "b_f acts on a coherent vector as <f,phi> on the faithfully represented block"),
    ("angular", "angular.no-central-extension", "central term of [L^i(chi,eps), L^j(0,eps)] vanishes for every split in the schedule"),
    ("angular", "angular.self-commutator", "[L^i, L^i] = 0"),
    ("angular", "angular.splitting-defect", "closure defect against the double-split third component decreases as the split shrinks at fixed dt"),
    ("angular", "angular.refinement-defect", "closure defect decreases monotonically under dt halving at fixed step ratio"),
    ("velocity", "velocity.position-velocity-commute", "[x_f, xdot_g] = 0 with xdot_g = -x_{g'}"),
    ("velocity", "velocity.vacuum-greens", "vacuum two-point function equals (hbar / 2m) times the inverse frequency-operator kernel"),
    ("velocity", "velocity.zero-coupling-reduction", "lambda = 0 reproduces the plain oscillator builders componentwise"),
    ("velocity", "velocity.mode-rotation", "constant-weight evolution rotates dressed modes by exp(-i Omega)"),
    ("qft", "qft.field-momentum-ccr", "[phi_f, pi_g] = i hbar dV sum f g, purely central"),
    ("qft", "qft.heisenberg-equation", "[H_n(chi), phi_f] = -i hbar pi_{chi f}"),
    ("qft", "qft.commuting-family", "[H_n(chi1), H_n(chi2)] = 0"),
    ("qft", "qft.evolution-oracle", "the mixed-basis evolution unitary matches the dense matrix exponential"),
    ("qft", "qft.conjugation-oracle", "conjugating a field smear by the evolution unitary matches the dense-oracle conjugation"),
    ("histories", "histories.weight-normalization", "decoherence weights over a complete family sum to 1"),
    ("histories", "histories.hermiticity", "d(a,b) equals the conjugate of d(b,a)"),
    ("histories", "histories.tensor-idempotence", "the tensor-product realization of a history is an exact projector"),
    ("histories", "histories.class-operator-defect", "the matched class operator is genuinely non-idempotent (defect above the floor)"),
    ("histories", "histories.zero-slot", "a history with a zero slot has vanishing decoherence with everything"),
    ("histories", "histories.coarse-graining-additivity", "merging disjoint alternatives at one slot adds decoherence values"),
    ("histories", "histories.identity-insertion", "inserting an identity slot leaves the decoherence functional unchanged"),
    ("histories", "histories.rank-product", "tensor projector rank is the product of slot ranks"),
];

pub fn anchor_of(id: &str) -> &'static str {
    CATALOG
        .iter()
        .find(|(_, cid, _)| *cid == id)
        .map(|(_, _, a)| *a)
        .unwrap_or("unknown check")
}

fn check(id: &str, residual: f64, tolerance: f64) -> CheckResult {
    CheckResult::new(id, anchor_of(id), residual, tolerance)
}

pub fn run_suite(name: &str, config: &SuiteConfig) -> Result<SuiteReport> {
    config.validate().map_err(|e| anyhow!(e))?;
    let started = Instant::now();
    let checks = match name {
        "cha" => suite_cha(config)?,
        "hamiltonian" => suite_hamiltonian(config)?,
        "nparticle" => suite_nparticle(config)?,
        "heisenberg" => suite_heisenberg(config)?,
        "coherent" => suite_coherent(config)?,
        "angular" => suite_angular(config)?,
        "velocity" => suite_velocity(config)?,
        "qft" => suite_qft(config)?,
        "histories" => suite_histories(config)?,
        other => bail!("unknown suite name: {other}"),
    };
    Ok(SuiteReport::new(
        name,
        config.seed,
        checks,
        started.elapsed().as_millis(),
        config,
    ))
}

fn params(config: &SuiteConfig) -> OscillatorParams {
    OscillatorParams {
        hbar: config.physics.hbar,
        mass: config.physics.mass,
        omega: config.physics.omega,
    }
}

fn lattice(config: &SuiteConfig) -> Result<TimeLattice> {
    TimeLattice::periodic(config.lattice.n_points, config.lattice.dt).map_err(|e| anyhow!(e))
}

fn random_real_fn(lat: TimeLattice, rng: &mut ChaCha8Rng) -> TestFunction {
    let values = (0..lat.n_points())
        .map(|_| cplx(rng.gen::<f64>() * 2.0 - 1.0, 0.0))
        .collect();
    TestFunction::new(lat, values).expect("length matches by construction")
}

fn random_complex_fn(lat: TimeLattice, rng: &mut ChaCha8Rng) -> TestFunction {
    let values = (0..lat.n_points())
        .map(|_| cplx(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0))
        .collect();
    TestFunction::new(lat, values).expect("length matches by construction")
}

// ---------------------------------------------------------------------
// cha

fn suite_cha(config: &SuiteConfig) -> Result<Vec<CheckResult>> {
    let lat = lattice(config)?;
    let modes = ModeSpace::time(lat);
    let p = params(config);
    let tol = config.tolerances.default;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut xx = 0.0f64;
    let mut pp = 0.0f64;
    let mut xp = 0.0f64;
    let mut ladder = 0.0f64;
    for _ in 0..config.refinement.cha_pairs {
        let f = random_real_fn(lat, &mut rng);
        let g = random_real_fn(lat, &mut rng);
        let xf = smear_position(&modes, &f, &p)?;
        let xg = smear_position(&modes, &g, &p)?;
        let pf = smear_momentum(&modes, &f, &p)?;
        let pg = smear_momentum(&modes, &g, &p)?;
        xx = xx.max(commutator(&xf, &xg)?.max_abs());
        pp = pp.max(commutator(&pf, &pg)?.max_abs());
        let central =
            QuadraticOperator::constant(modes.clone(), cplx(0.0, p.hbar) * inner_product(&f, &g)?)?;
        xp = xp.max(commutator(&xf, &pg)?.sub(&central)?.max_abs());

        // b_f = sqrt(m omega / 2 hbar) (x_f + (i / m omega) p_f), real f.
        let s = (p.mass * p.omega / (2.0 * p.hbar)).sqrt();
        let bf = xf
            .add(&pf.scale(cplx(0.0, 1.0 / (p.mass * p.omega))))?
            .scale(cplx(s, 0.0));
        let bg_dag = xg
            .add(&pg.scale(cplx(0.0, 1.0 / (p.mass * p.omega))))?
            .scale(cplx(s, 0.0))
            .adjoint();
        let want = QuadraticOperator::constant(modes.clone(), inner_product(&f, &g)?)?;
        ladder = ladder.max(commutator(&bf, &bg_dag)?.sub(&want)?.max_abs());
    }

    Ok(vec![
        check("cha.xx-commutator", xx, tol),
        check("cha.pp-commutator", pp, tol),
        check("cha.xp-commutator", xp, tol),
        check("cha.ladder-reconstruction", ladder, tol),
    ])
}

// ---------------------------------------------------------------------
// hamiltonian

fn suite_hamiltonian(config: &SuiteConfig) -> Result<Vec<CheckResult>> {
    let lat = lattice(config)?;
    let modes = ModeSpace::time(lat);
    let p = params(config);
    let tol = config.tolerances.default;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x68616d);

    let mut heis = 0.0f64;
    let mut family = 0.0f64;
    let mut ladder = 0.0f64;
    let mut rotation = 0.0f64;
    let mut vac_energy = 0.0f64;
    let mut vac_corr = 0.0f64;
    for _ in 0..8 {
        let chi = random_real_fn(lat, &mut rng);
        let chi2 = random_real_fn(lat, &mut rng);
        let f = random_real_fn(lat, &mut rng);
        let g = random_real_fn(lat, &mut rng);
        let h = build_h(&modes, &chi, &p)?;
        let xf = smear_position(&modes, &f, &p)?;

        let chif = chi.pointwise_mul(&f)?;
        let want = smear_momentum(&modes, &chif, &p)?.scale(cplx(0.0, -p.hbar / p.mass));
        heis = heis.max(commutator(&h, &xf)?.sub(&want)?.max_abs());

        let h2 = build_h(&modes, &chi2, &p)?;
        family = family.max(commutator(&h, &h2)?.max_abs());

        let sdt = lat.dt().sqrt();
        let bf = QuadraticOperator::annihilator(
            modes.clone(),
            f.values().iter().map(|z| z.conj() * sdt).collect(),
        )?;
        let b_chif = QuadraticOperator::annihilator(
            modes.clone(),
            chif.values().iter().map(|z| z.conj() * sdt).collect(),
        )?;
        ladder = ladder.max(
            commutator(&h, &bf)?
                .add(&b_chif.scale(cplx(p.hbar * p.omega, 0.0)))?
                .max_abs(),
        );

        // Conjugation by U(chi) against the explicit rotation formula.
        let rotated = heisenberg_position(&modes, &f, &chi, &p)?;
        let cos_f = TestFunction::new(
            lat,
            f.values()
                .iter()
                .zip(chi.values())
                .map(|(v, c)| v * (p.omega * c.re).cos())
                .collect(),
        )?;
        let sin_f = TestFunction::new(
            lat,
            f.values()
                .iter()
                .zip(chi.values())
                .map(|(v, c)| v * (p.omega * c.re).sin())
                .collect(),
        )?;
        let explicit = smear_position(&modes, &cos_f, &p)?.add(
            &smear_momentum(&modes, &sin_f, &p)?.scale(cplx(1.0 / (p.mass * p.omega), 0.0)),
        )?;
        rotation = rotation.max(rotated.sub(&explicit)?.max_abs());

        vac_energy = vac_energy.max(h.vacuum_expectation().norm());

        let xg = smear_position(&modes, &g, &p)?;
        let corr = vacuum_expectation_product(&xf, &xg)?;
        let want = inner_product(&f, &g)? * (p.hbar / (2.0 * p.mass * p.omega));
        vac_corr = vac_corr.max((corr - want).norm());
    }

    Ok(vec![
        check("hamiltonian.heisenberg-equation", heis, tol),
        check("hamiltonian.commuting-family", family, tol),
        check("hamiltonian.ladder-flow", ladder, tol),
        check("hamiltonian.rotation-formulas", rotation, tol),
        check("hamiltonian.vacuum-energy", vac_energy, tol),
        check("hamiltonian.vacuum-correlation", vac_corr, tol),
    ])
}

// ---------------------------------------------------------------------
// nparticle

fn suite_nparticle(config: &SuiteConfig) -> Result<Vec<CheckResult>> {
    let lat = TimeLattice::periodic(config.fock.nparticle_modes, config.lattice.dt)
        .map_err(|e| anyhow!(e))?;
    let modes = ModeSpace::time(lat);
    let p = params(config);
    let tol = config.tolerances.default;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x6e7074);
    let basis = FockBasis::new(modes.clone(), config.fock.n_max).map_err(|e| anyhow!(e))?;

    // Integer-spaced spectrum of H(1) on each particle-number block.
    let one = TestFunction::constant(lat, cplx(1.0, 0.0));
    let h1 = build_h(&modes, &one, &p).map_err(|e| anyhow!(e))?;
    let mut integer = 0.0f64;
    for n in 0..=config.fock.n_max {
        let evs = fock::sector_spectrum(&h1, &basis, n).map_err(|e| anyhow!(e))?;
        for ev in evs {
            integer = integer.max((ev - (n as f64) * p.hbar * p.omega).abs());
        }
    }

    // Per-state energies and center-of-time eigenvalues, repeats included.
    let chi = random_real_fn(lat, &mut rng);
    let h = build_h(&modes, &chi, &p).map_err(|e| anyhow!(e))?;
    let hm = fock::to_matrix(&h, &basis).map_err(|e| anyhow!(e))?;
    let ct = build_center_of_time(&modes).map_err(|e| anyhow!(e))?;
    let cm = fock::to_matrix(&ct, &basis).map_err(|e| anyhow!(e))?;
    let mut energies = 0.0f64;
    let mut center = 0.0f64;
    for i in 0..basis.dim() {
        let occ = basis.state(i);
        let want_e: f64 = occ
            .iter()
            .enumerate()
            .map(|(k, &n)| n as f64 * p.hbar * p.omega * chi.values()[k].re)
            .sum();
        let want_t: f64 = occ
            .iter()
            .enumerate()
            .map(|(k, &n)| n as f64 * lat.time(k))
            .sum();
        energies = energies.max((hm[(i, i)] - cplx(want_e, 0.0)).norm());
        center = center.max((cm[(i, i)] - cplx(want_t, 0.0)).norm());
        for j in 0..basis.dim() {
            if j != i {
                energies = energies.max(hm[(i, j)].norm());
                center = center.max(cm[(i, j)].norm());
            }
        }
    }

    // Vacuum annihilation.
    let mut vac = FockVector::zero(basis.dim());
    let mut amps = vac.amplitudes().to_vec();
    amps[0] = cplx(1.0, 0.0);
    vac = FockVector::new(amps);
    let vacuum = fock::apply(&h, &basis, &vac).map_err(|e| anyhow!(e))?.norm();

    // Two-particle eigenvector property, equal times included.
    let mut two = 0.0f64;
    for a in 0..lat.n_points() {
        for b in a..lat.n_points() {
            let v = fock::n_particle_vector(&basis, &[a, b]).map_err(|e| anyhow!(e))?;
            let hv = fock::apply(&h, &basis, &v).map_err(|e| anyhow!(e))?;
            let ev = p.hbar * p.omega * (chi.values()[a].re + chi.values()[b].re);
            let mut worst = 0.0f64;
            for (x, y) in hv.amplitudes().iter().zip(v.amplitudes()) {
                worst = worst.max((x - y * ev).norm());
            }
            two = two.max(worst);
        }
    }

    Ok(vec![
        check("nparticle.integer-spectrum", integer, tol),
        check("nparticle.state-energies", energies, tol),
        check("nparticle.center-of-time", center, tol),
        check("nparticle.vacuum-annihilated", vacuum, tol),
        check("nparticle.two-particle", two, tol),
    ])
}

// ---------------------------------------------------------------------
// heisenberg

fn suite_heisenberg(config: &SuiteConfig) -> Result<Vec<CheckResult>> {
    let lat = lattice(config)?;
    let modes = ModeSpace::time(lat);
    let p = params(config);
    let tol = config.tolerances.default;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x686569);

    // Dressed-position commutator is central with the oscillator kernel.
    let mut covariant = 0.0f64;
    for _ in 0..8 {
        let f = random_real_fn(lat, &mut rng);
        let g = random_real_fn(lat, &mut rng);
        let k1 = random_real_fn(lat, &mut rng);
        let k2 = random_real_fn(lat, &mut rng);
        let x1 = heisenberg_position(&modes, &f, &k1, &p)?;
        let x2 = heisenberg_position(&modes, &g, &k2, &p)?;
        let mut scalar = cplx(0.0, 0.0);
        for i in 0..lat.n_points() {
            let phase = p.omega * (k2.values()[i].re - k1.values()[i].re);
            scalar += cplx(0.0, p.hbar / (p.mass * p.omega))
                * f.values()[i]
                * g.values()[i]
                * lat.dt()
                * phase.sin();
        }
        let want = QuadraticOperator::constant(modes.clone(), scalar)?;
        covariant = covariant.max(commutator(&x1, &x2)?.sub(&want)?.max_abs());
    }

    // Functional derivative along the indicator of one lattice point.
    let f = random_real_fn(lat, &mut rng);
    let site = rng.gen_range(0..lat.n_points());
    let fd_error = |h: f64| -> Result<f64> {
        let bump = TestFunction::indicator(lat, site);
        let plus = heisenberg_position(&modes, &f, &bump.scale(cplx(h, 0.0)), &p)?;
        let minus = heisenberg_position(&modes, &f, &bump.scale(cplx(-h, 0.0)), &p)?;
        let deriv = plus.sub(&minus)?.scale(cplx(1.0 / (2.0 * h), 0.0));
        let f_site = f.pointwise_mul(&bump)?;
        let want = smear_momentum(&modes, &f_site, &p)?.scale(cplx(1.0 / p.mass, 0.0));
        Ok(deriv.sub(&want)?.max_abs())
    };
    let h = config.refinement.fd_step;
    let err_h = fd_error(h)?;
    let err_half = fd_error(h / 2.0)?;
    // Second-order stencil: expect a factor of about 4 per halving.
    let ratio = if err_half > 0.0 { err_h / err_half } else { 4.0 };
    let order_residual = (3.9 - ratio).max(0.0);

    Ok(vec![
        check("heisenberg.covariant-commutator", covariant, tol),
        check(
            "heisenberg.functional-derivative",
            err_h,
            // The truncation error of the stencil scales like h^2 times
            // the third derivative of the rotation, order omega^3 x.
            100.0 * h * h,
        ),
        check("heisenberg.difference-order", order_residual, tol),
    ])
}

// ---------------------------------------------------------------------
// coherent

fn suite_coherent(config: &SuiteConfig) -> Result<Vec<CheckResult>> {
    let lat = TimeLattice::periodic(config.fock.coherent_modes, config.lattice.dt)
        .map_err(|e| anyhow!(e))?;
    let modes = ModeSpace::time(lat);
    let tol = config.tolerances.default;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x636f68);
    let basis =
        FockBasis::new(modes.clone(), config.fock.coherent_n_max).map_err(|e| anyhow!(e))?;

    let unit_ball = |rng: &mut ChaCha8Rng| -> TestFunction {
        let raw = random_complex_fn(lat, rng);
        let norm = raw.norm();
        let target = rng.gen::<f64>().max(1e-3);
        raw.scale(cplx(target / norm.max(1e-12), 0.0))
    };

    let mut overlap = 0.0f64;
    for _ in 0..config.refinement.coherent_pairs {
        let phi = unit_ball(&mut rng);
        let psi = unit_ball(&mut rng);
        let (vp, _) = fock::coherent_vector(&basis, &phi).map_err(|e| anyhow!(e))?;
        let (vq, _) = fock::coherent_vector(&basis, &psi).map_err(|e| anyhow!(e))?;
        let got = vp.dot(&vq).map_err(|e| anyhow!(e))?;
        let exact = fock::coherent_overlap_exact(&phi, &psi).map_err(|e| anyhow!(e))?;
        // Analytic tail of the exponential series at s = |phi| |psi|.
        let s = phi.norm() * psi.norm();
        let mut partial = 0.0f64;
        let mut term = 1.0f64;
        for k in 0..=basis.n_max() {
            if k > 0 {
                term *= s / k as f64;
            }
            partial += term;
        }
        let tail = (s.exp() - partial).max(0.0);
        overlap = overlap.max(((got - exact).norm() - tail).max(0.0));
    }

    // Zero amplitude is exactly the vacuum.
    let (v0, tail0) = fock::coherent_vector(&basis, &TestFunction::zero(lat))
        .map_err(|e| anyhow!(e))?;
    let mut vac_res = tail0;
    for (i, a) in v0.amplitudes().iter().enumerate() {
        let want = if i == 0 { cplx(1.0, 0.0) } else { cplx(0.0, 0.0) };
        vac_res = vac_res.max((a - want).norm());
    }

    // Annihilator eigenvector property on the faithfully kept block.
    let phi = unit_ball(&mut rng);
    let f = random_real_fn(lat, &mut rng);
    let sdt = lat.dt().sqrt();
    let bf = QuadraticOperator::annihilator(
        modes.clone(),
        f.values().iter().map(|z| z.conj() * sdt).collect(),
    )
    .map_err(|e| anyhow!(e))?;
    let (v, _) = fock::coherent_vector(&basis, &phi).map_err(|e| anyhow!(e))?;
    let bv = fock::apply(&bf, &basis, &v).map_err(|e| anyhow!(e))?;
    let eig = inner_product(&f, &phi).map_err(|e| anyhow!(e))?;
    let mut eigen = 0.0f64;
    for i in 0..basis.dim() {
        if basis.total_occupation(i) + 1 <= basis.n_max() {
            eigen = eigen.max((bv.amplitudes()[i] - v.amplitudes()[i] * eig).norm());
        }
    }

    Ok(vec![
        check("coherent.overlap-law", overlap, tol),
        check("coherent.vacuum-at-zero", vac_res, tol),
        check("coherent.annihilator-eigenvector", eigen, tol),
    ])
}

// ---------------------------------------------------------------------
// angular

fn smooth_chi(lat: TimeLattice) -> TestFunction {
    let span = lat.span();
    TestFunction::real_from_fn(lat, |t| 0.3 * (2.0 * std::f64::consts::PI * t / span).sin())
}

fn closure_defect(
    lat: TimeLattice,
    step: usize,
    p: &OscillatorParams,
) -> Result<f64> {
    let modes = ModeSpace::time_internal(lat, 3).map_err(|e| anyhow!(e))?;
    let chi = smooth_chi(lat);
    let zero = TestFunction::zero(lat);
    let l1 = build_angular_momentum(&modes, 0, &chi, step, p).map_err(|e| anyhow!(e))?;
    let l2 = build_angular_momentum(&modes, 1, &zero, step, p).map_err(|e| anyhow!(e))?;
    let l3 = build_angular_momentum(&modes, 2, &chi, 2 * step, p).map_err(|e| anyhow!(e))?;
    // The bracket closes onto the third component at the doubled split,
    // with the opposite structure sign fixed by the point-split ordering.
    let defect = commutator(&l1, &l2)
        .map_err(|e| anyhow!(e))?
        .add(&l3.scale(cplx(0.0, p.hbar)))
        .map_err(|e| anyhow!(e))?;
    Ok(defect.max_abs())
}

fn suite_angular(config: &SuiteConfig) -> Result<Vec<CheckResult>> {
    let lat = lattice(config)?;
    let modes = ModeSpace::time_internal(lat, 3).map_err(|e| anyhow!(e))?;
    let p = params(config);
    let tol = config.tolerances.default;
    let chi = smooth_chi(lat);
    let zero = TestFunction::zero(lat);

    // No central extension at any split, any component pair.
    let mut central = 0.0f64;
    for &step in &config.refinement.epsilon_steps {
        for i in 0..3 {
            for j in 0..3 {
                let li = build_angular_momentum(&modes, i, &chi, step, &p)
                    .map_err(|e| anyhow!(e))?;
                let lj = build_angular_momentum(&modes, j, &zero, step, &p)
                    .map_err(|e| anyhow!(e))?;
                central = central.max(central_term(&li, &lj).map_err(|e| anyhow!(e))?.norm());
            }
        }
    }
    central += config.hooks.inject_central_defect.abs();

    let mut self_comm = 0.0f64;
    for &step in &config.refinement.epsilon_steps {
        for i in 0..3 {
            let li =
                build_angular_momentum(&modes, i, &chi, step, &p).map_err(|e| anyhow!(e))?;
            self_comm = self_comm.max(commutator(&li, &li).map_err(|e| anyhow!(e))?.max_abs());
        }
    }

    // Split shrinking at fixed dt.
    let mut steps = config.refinement.epsilon_steps.clone();
    steps.sort_unstable_by(|a, b| b.cmp(a));
    let split_defects: Vec<f64> = steps
        .iter()
        .map(|&s| closure_defect(lat, s, &p))
        .collect::<Result<_>>()?;
    let mut split_residual = 0.0f64;
    for w in split_defects.windows(2) {
        split_residual = split_residual.max(w[1] - w[0]);
    }
    split_residual = split_residual.max(0.0);

    // dt halving at a fixed ratio of split to spacing.
    let base_step = *steps.last().unwrap_or(&1);
    let mut refine_defects = Vec::new();
    for k in 0..=config.refinement.dt_halvings {
        let factor = 1usize << k;
        let fine = TimeLattice::periodic(
            config.lattice.n_points * factor,
            config.lattice.dt / factor as f64,
        )
        .map_err(|e| anyhow!(e))?;
        refine_defects.push(closure_defect(fine, base_step, &p)?);
    }
    let mut refine_residual = 0.0f64;
    for w in refine_defects.windows(2) {
        refine_residual = refine_residual.max(w[1] - w[0]);
    }
    refine_residual = refine_residual.max(0.0);

    Ok(vec![
        check("angular.no-central-extension", central, tol),
        check("angular.self-commutator", self_comm, tol),
        check("angular.splitting-defect", split_residual, tol),
        check("angular.refinement-defect", refine_residual, tol),
    ])
}

// ---------------------------------------------------------------------
// velocity

fn suite_velocity(config: &SuiteConfig) -> Result<Vec<CheckResult>> {
    let lat = lattice(config)?;
    let p = params(config);
    let tol = config.tolerances.default;
    let tol_greens = config.tolerances.qft;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x76656c);

    let mut commute = 0.0f64;
    let mut greens = 0.0f64;
    let mut reduction = 0.0f64;
    let mut rotation = 0.0f64;
    for &lambda in &config.physics.lambdas {
        let vx = VelocityExtended::new(lat, lambda, &p).map_err(|e| anyhow!(e))?;
        let f = random_real_fn(lat, &mut rng);
        let g = random_real_fn(lat, &mut rng);

        // Velocity smear by parts: xdot_g = -x_{g'}.
        let xf = vx.smear_position(&f).map_err(|e| anyhow!(e))?;
        let gdot = derivative(&g).map_err(|e| anyhow!(e))?;
        let xdot_g = vx
            .smear_position(&gdot)
            .map_err(|e| anyhow!(e))?
            .scale(cplx(-1.0, 0.0));
        commute = commute.max(commutator(&xf, &xdot_g).map_err(|e| anyhow!(e))?.max_abs());

        // Vacuum two-point function against the inverse-kernel quadrature.
        let corr = vx
            .vacuum_position_correlation(&f, &g)
            .map_err(|e| anyhow!(e))?;
        let kern = greens_kernel(vx.frequency_operator()).map_err(|e| anyhow!(e))?;
        let mut quad = cplx(0.0, 0.0);
        for i in 0..lat.n_points() {
            for j in 0..lat.n_points() {
                quad += f.values()[i] * kern[(i, j)] * g.values()[j] * lat.dt() * lat.dt();
            }
        }
        let want = quad * (p.hbar / (2.0 * p.mass));
        greens = greens.max((corr - want).norm());

        // Constant-weight mode rotation: conjugation by exp(i H / hbar)
        // sends the dressed annihilator c_f to c_{exp(-i Omega) f}.
        let omega_m = spectral_matrix(vx.frequency_operator());
        let u = OneParticleUnitary::new(
            vx.modes().clone(),
            expm_hermitian(&omega_m, cplx(0.0, 1.0)).map_err(|e| anyhow!(e))?,
            "exp(i Omega)",
        )
        .map_err(|e| anyhow!(e))?;
        let sdt = lat.dt().sqrt();
        let cf = QuadraticOperator::annihilator(
            vx.modes().clone(),
            f.values().iter().map(|z| z.conj() * sdt).collect(),
        )
        .map_err(|e| anyhow!(e))?;
        let rotated = gaussian_conjugate(&cf, &u).map_err(|e| anyhow!(e))?;
        let evolved = expm_hermitian(&omega_m, cplx(0.0, -1.0))
            .map_err(|e| anyhow!(e))?
            .matvec(f.values());
        let want = QuadraticOperator::annihilator(
            vx.modes().clone(),
            evolved.iter().map(|z| z.conj() * sdt).collect(),
        )
        .map_err(|e| anyhow!(e))?;
        rotation = rotation.max(rotated.sub(&want).map_err(|e| anyhow!(e))?.max_abs());

        if lambda == 0.0 {
            let modes = ModeSpace::time(lat);
            let chi = random_real_fn(lat, &mut rng);
            let plain_x = smear_position(&modes, &f, &p).map_err(|e| anyhow!(e))?;
            let plain_h = build_h(&modes, &chi, &p).map_err(|e| anyhow!(e))?;
            reduction = reduction
                .max(xf.sub(&plain_x).map_err(|e| anyhow!(e))?.max_abs())
                .max(
                    vx.build_h(&chi)
                        .map_err(|e| anyhow!(e))?
                        .sub(&plain_h)
                        .map_err(|e| anyhow!(e))?
                        .max_abs(),
                );
        }
    }

    Ok(vec![
        check("velocity.position-velocity-commute", commute, tol),
        check("velocity.vacuum-greens", greens, tol_greens),
        check("velocity.zero-coupling-reduction", reduction, tol),
        check("velocity.mode-rotation", rotation, tol_greens),
    ])
}

// ---------------------------------------------------------------------
// qft

fn random_grid_fn(lat: &SpacetimeLattice, rng: &mut ChaCha8Rng) -> GridFunction {
    GridFunction::from_fn(lat.clone(), |_| cplx(rng.gen::<f64>() * 2.0 - 1.0, 0.0))
}

fn suite_qft(config: &SuiteConfig) -> Result<Vec<CheckResult>> {
    let lat = SpacetimeLattice::standard(config.grid.dims, config.grid.spacings)
        .map_err(|e| anyhow!(e))?;
    let fp = FieldParams { hbar: config.physics.hbar, mass: config.physics.field_mass };
    let field = ScalarField::new(lat.clone(), &fp).map_err(|e| anyhow!(e))?;
    let tol = config.tolerances.qft;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x716674);

    let f = random_grid_fn(&lat, &mut rng);
    let g = random_grid_fn(&lat, &mut rng);
    let chi = random_real_fn(lat.time_axis(), &mut rng);
    let chi2 = random_real_fn(lat.time_axis(), &mut rng);

    // Equal-foliation canonical pair.
    let phi = field.smear_field(&f).map_err(|e| anyhow!(e))?;
    let pi = field.smear_momentum(&g).map_err(|e| anyhow!(e))?;
    let comm = commutator(&phi, &pi).map_err(|e| anyhow!(e))?;
    let want = QuadraticOperator::constant(
        field.modes().clone(),
        hpo_core::qft::field_ccr_value(&lat, &f, &g, &fp),
    )
    .map_err(|e| anyhow!(e))?;
    let ccr = comm.sub(&want).map_err(|e| anyhow!(e))?.max_abs();

    // Internal-Hamiltonian flow.
    let h = field.build_hamiltonian(&chi).map_err(|e| anyhow!(e))?;
    let chif = GridFunction::from_fn(lat.clone(), |c| {
        f.values()[lat.site(c)] * chi.values()[c[0]].re
    });
    let want = field
        .smear_momentum(&chif)
        .map_err(|e| anyhow!(e))?
        .scale(cplx(0.0, -fp.hbar));
    let heis = commutator(&h, &phi)
        .map_err(|e| anyhow!(e))?
        .sub(&want)
        .map_err(|e| anyhow!(e))?
        .max_abs();

    let h2 = field.build_hamiltonian(&chi2).map_err(|e| anyhow!(e))?;
    let family = commutator(&h, &h2).map_err(|e| anyhow!(e))?.max_abs();

    // Dense matrix-exponential oracle on the small grid.
    let small = SpacetimeLattice::standard(config.grid.oracle_dims, config.grid.oracle_spacings)
        .map_err(|e| anyhow!(e))?;
    let small_field = ScalarField::new(small.clone(), &fp).map_err(|e| anyhow!(e))?;
    let chi_s = random_real_fn(small.time_axis(), &mut rng);
    let u = small_field.evolution_unitary(&chi_s).map_err(|e| anyhow!(e))?;
    // Independent route: exponentiate the dense generator chi(n.X) sqrt(K_n).
    let gen = small_field
        .build_hamiltonian(&chi_s)
        .map_err(|e| anyhow!(e))?
        .quad_nc()
        .scale(cplx(1.0 / fp.hbar, 0.0));
    let sym = gen.add(&gen.adjoint()).scale(cplx(0.5, 0.0));
    let u_oracle = expm_hermitian(&sym, cplx(0.0, -1.0)).map_err(|e| anyhow!(e))?;
    let evolution = u.matrix().sub(&u_oracle).max_abs();

    let fs = random_grid_fn(&small, &mut rng);
    let b = small_field.smear_annihilation(&fs).map_err(|e| anyhow!(e))?;
    let lhs = gaussian_conjugate(&b, &u).map_err(|e| anyhow!(e))?;
    let u2 = OneParticleUnitary::new(small_field.modes().clone(), u_oracle, "oracle")
        .map_err(|e| anyhow!(e))?;
    let rhs = gaussian_conjugate(&b, &u2).map_err(|e| anyhow!(e))?;
    let conjugation = lhs.sub(&rhs).map_err(|e| anyhow!(e))?.max_abs();

    Ok(vec![
        check("qft.field-momentum-ccr", ccr, tol),
        check("qft.heisenberg-equation", heis, tol),
        check("qft.commuting-family", family, tol),
        check("qft.evolution-oracle", evolution, tol),
        check("qft.conjugation-oracle", conjugation, tol),
    ])
}

// ---------------------------------------------------------------------
// histories

pub struct HistoriesSetup {
    pub system: SingleTimeSystem,
    pub family: Vec<HistoryProposition>,
}

/// The designated instance: 8-level truncated oscillator, thermal state,
/// position-sign alternatives at three times.
pub fn histories_setup(config: &SuiteConfig) -> Result<HistoriesSetup> {
    let p = params(config);
    let dim = 8;
    let h = sho_hamiltonian(dim, &p);
    let rho = sho_gibbs_state(dim, 0.7, &p).map_err(|e| anyhow!(e))?;
    let system = SingleTimeSystem::new(h, rho, p.hbar).map_err(|e| anyhow!(e))?;
    let (pn, pp) = position_sign_projectors(dim, &p).map_err(|e| anyhow!(e))?;
    let times = vec![0.5, 1.5, 2.5];
    let mut family = Vec::new();
    for mask in 0..(1usize << times.len()) {
        let projectors: Vec<CMat> = (0..times.len())
            .map(|k| if mask >> k & 1 == 1 { pp.clone() } else { pn.clone() })
            .collect();
        family.push(
            HistoryProposition::new(0.0, times.clone(), projectors, format!("sign-{mask:03b}"))
                .map_err(|e| anyhow!(e))?,
        );
    }
    Ok(HistoriesSetup { system, family })
}

fn suite_histories(config: &SuiteConfig) -> Result<Vec<CheckResult>> {
    let tol = config.tolerances.default;
    let p = params(config);
    let setup = histories_setup(config)?;
    let sys = &setup.system;
    let fam = &setup.family;
    let n_fam = fam.len();

    let mut d = vec![vec![cplx(0.0, 0.0); n_fam]; n_fam];
    for a in 0..n_fam {
        for b in 0..n_fam {
            d[a][b] = decoherence(sys, &fam[a], &fam[b]).map_err(|e| anyhow!(e))?;
        }
    }

    let total: C64 = d.iter().flatten().sum();
    let normalization = (total - cplx(1.0, 0.0)).norm();

    let mut hermiticity = 0.0f64;
    for a in 0..n_fam {
        for b in 0..n_fam {
            hermiticity = hermiticity.max((d[a][b] - d[b][a].conj()).norm());
        }
    }

    // Idempotence of the tensor realization vs the class-operator defect
    // on the same instance.
    let mut idem = 0.0f64;
    let mut worst_defect = 0.0f64;
    for h in fam {
        let tp = h.tensor_projector();
        idem = idem.max(tp.mul(&tp).sub(&tp).max_abs());
        let c = class_operator(sys, h).map_err(|e| anyhow!(e))?;
        worst_defect = worst_defect.max(c.mul(&c).sub(&c).max_abs());
    }
    let defect_residual =
        (config.tolerances.class_operator_defect_floor - worst_defect).max(0.0);

    // Zero slot annihilates.
    let dim = sys.dim();
    let times = fam[0].times().to_vec();
    let zero_hist = HistoryProposition::new(
        0.0,
        times.clone(),
        vec![CMat::zeros(dim, dim), fam[0].projectors()[1].clone(), fam[0].projectors()[2].clone()],
        "zero-slot",
    )
    .map_err(|e| anyhow!(e))?;
    let mut zero_res = 0.0f64;
    for h in fam {
        zero_res = zero_res.max(decoherence(sys, &zero_hist, h).map_err(|e| anyhow!(e))?.norm());
    }

    // Coarse graining: merge the two alternatives at the last slot.
    let (pn, pp) = position_sign_projectors(dim, &p).map_err(|e| anyhow!(e))?;
    let a1 = HistoryProposition::new(
        0.0,
        times.clone(),
        vec![pn.clone(), pp.clone(), pn.clone()],
        "fine-a",
    )
    .map_err(|e| anyhow!(e))?;
    let a2 = HistoryProposition::new(
        0.0,
        times.clone(),
        vec![pn.clone(), pp.clone(), pp.clone()],
        "fine-b",
    )
    .map_err(|e| anyhow!(e))?;
    let merged = HistoryProposition::new(
        0.0,
        times.clone(),
        vec![pn.clone(), pp.clone(), CMat::identity(dim)],
        "merged",
    )
    .map_err(|e| anyhow!(e))?;
    let mut additivity = 0.0f64;
    for h in fam {
        let lhs = decoherence(sys, &merged, h).map_err(|e| anyhow!(e))?;
        let rhs = decoherence(sys, &a1, h).map_err(|e| anyhow!(e))?
            + decoherence(sys, &a2, h).map_err(|e| anyhow!(e))?;
        additivity = additivity.max((lhs - rhs).norm());
    }

    // Identity-slot insertion is neutral.
    let padded = HistoryProposition::new(
        0.0,
        vec![times[0], 1.0, times[1], times[2]],
        vec![
            fam[5].projectors()[0].clone(),
            CMat::identity(dim),
            fam[5].projectors()[1].clone(),
            fam[5].projectors()[2].clone(),
        ],
        "padded",
    )
    .map_err(|e| anyhow!(e))?;
    let insertion = (decoherence(sys, &padded, &padded).map_err(|e| anyhow!(e))?
        - d[5][5])
        .norm();

    // Rank multiplicativity on a small, independently counted instance.
    let small_p = OscillatorParams::default();
    let q1 = position_interval_projector(4, &small_p, 0.0, f64::INFINITY)
        .map_err(|e| anyhow!(e))?;
    let q2 = position_interval_projector(4, &small_p, -10.0, 1.0).map_err(|e| anyhow!(e))?;
    let rank = |m: &CMat| -> Result<usize> {
        let eig = hermitian_eig(m).map_err(|e| anyhow!(e))?;
        Ok(eig.values.iter().filter(|&&v| v > 0.5).count())
    };
    let kron = q1.kron(&q2);
    let rank_residual = if rank(&kron)? == rank(&q1)? * rank(&q2)? { 0.0 } else { 1.0 };

    Ok(vec![
        check("histories.weight-normalization", normalization, tol),
        check("histories.hermiticity", hermiticity, tol),
        check(
            "histories.tensor-idempotence",
            idem,
            config.tolerances.projector_idempotence,
        ),
        check("histories.class-operator-defect", defect_residual, tol),
        check("histories.zero-slot", zero_res, tol),
        check("histories.coarse-graining-additivity", additivity, tol),
        check("histories.identity-insertion", insertion, tol),
        check("histories.rank-product", rank_residual, tol),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_rejected() {
        assert!(run_suite("bogus", &SuiteConfig::default()).is_err());
    }

    #[test]
    fn catalog_covers_all_suites() {
        for name in SUITE_NAMES {
            assert!(CATALOG.iter().any(|(s, _, _)| *s == name));
        }
    }

    #[test]
    fn angular_closure_defect_is_nontrivial_and_shrinks() {
        // Guards the monotonicity checks against passing vacuously.
        let lat = TimeLattice::periodic(16, 0.25).unwrap();
        let p = OscillatorParams::default();
        let d4 = closure_defect(lat, 4, &p).unwrap();
        let d2 = closure_defect(lat, 2, &p).unwrap();
        let d1 = closure_defect(lat, 1, &p).unwrap();
        assert!(d1 > 1e-6, "defect collapsed to zero: {d1}");
        assert!(d4 > d2 && d2 > d1, "defects not decreasing: {d4} {d2} {d1}");
        let fine = TimeLattice::periodic(32, 0.125).unwrap();
        let dfine = closure_defect(fine, 1, &p).unwrap();
        assert!(dfine < d1, "dt refinement did not shrink the defect");
    }

    #[test]
    fn injected_central_defect_fails_the_angular_suite() {
        let mut config = SuiteConfig::default();
        config.hooks.inject_central_defect = 1e-3;
        let report = run_suite("angular", &config).unwrap();
        assert!(!report.passed);
        let report = run_suite("angular", &SuiteConfig::default()).unwrap();
        assert!(report.passed);
    }
}
