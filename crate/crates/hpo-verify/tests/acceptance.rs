//! Acceptance gate: nine criteria, one pass/fail line each. Tolerances
//! are pinned here rather than read from the config so a loosened config
//! cannot silently weaken the gate.

use std::time::{Duration, Instant};

use hpo_verify::config::SuiteConfig;
use hpo_verify::report::SuiteReport;
use hpo_verify::suites::run_suite;

struct Gate {
    failures: Vec<String>,
}

impl Gate {
    fn new() -> Gate {
        Gate { failures: Vec::new() }
    }

    fn criterion(&mut self, number: usize, name: &str, outcome: Result<(), String>) {
        match outcome {
            Ok(()) => println!("criterion {number} ({name}): pass"),
            Err(why) => {
                println!("criterion {number} ({name}): FAIL ({why})");
                self.failures.push(format!("{number} ({name}): {why}"));
            }
        }
    }

    fn finish(self) {
        assert!(
            self.failures.is_empty(),
            "acceptance criteria failed:\n{}",
            self.failures.join("\n")
        );
    }
}

/// Every listed check must exist in the report, pass, and meet the pinned
/// tolerance (which may be tighter than the configured one).
fn require(report: &SuiteReport, pinned: &[(&str, f64)]) -> Result<(), String> {
    for (id, tol) in pinned {
        let check = report
            .checks
            .iter()
            .find(|c| c.id == *id)
            .ok_or_else(|| format!("missing check {id}"))?;
        if !check.pass {
            return Err(format!("{id} failed: residual {:.3e}", check.residual));
        }
        if !(check.residual.is_finite() && check.residual <= *tol) {
            return Err(format!(
                "{id} residual {:.3e} exceeds pinned tolerance {tol:.1e}",
                check.residual
            ));
        }
    }
    Ok(())
}

fn within(elapsed: Duration, budget: Duration) -> Result<(), String> {
    if elapsed <= budget {
        Ok(())
    } else {
        Err(format!("runtime {elapsed:?} exceeds budget {budget:?}"))
    }
}

fn timed_suite(name: &str, config: &SuiteConfig) -> (SuiteReport, Duration) {
    let started = Instant::now();
    let report = run_suite(name, config).expect("suite runs");
    (report, started.elapsed())
}

#[test]
fn acceptance_gate() {
    let config = SuiteConfig::default();
    assert_eq!(config.refinement.cha_pairs, 50);
    assert_eq!(config.refinement.coherent_pairs, 20);
    assert_eq!(config.fock.n_max, 3);
    assert_eq!(config.fock.coherent_n_max, 6);
    assert_eq!(config.fock.nparticle_modes, 8);
    assert_eq!(config.grid.dims, [8, 4, 4, 4]);
    assert_eq!(config.physics.lambdas, vec![0.0, 0.5, 1.0]);
    let mut gate = Gate::new();

    // 1. Canonical commutators over 50 random smearing pairs, under 1 s.
    let (cha, elapsed) = timed_suite("cha", &config);
    gate.criterion(
        1,
        "canonical commutators",
        require(
            &cha,
            &[
                ("cha.xx-commutator", 1e-12),
                ("cha.pp-commutator", 1e-12),
                ("cha.xp-commutator", 1e-12),
                ("cha.ladder-reconstruction", 1e-12),
            ],
        )
        .and(within(elapsed, Duration::from_secs(1))),
    );

    // 2. Time-averaged Hamiltonian algebra.
    let (ham, _) = timed_suite("hamiltonian", &config);
    gate.criterion(
        2,
        "averaged Hamiltonian",
        require(
            &ham,
            &[
                ("hamiltonian.heisenberg-equation", 1e-12),
                ("hamiltonian.commuting-family", 1e-12),
                ("hamiltonian.ladder-flow", 1e-12),
                ("hamiltonian.rotation-formulas", 1e-12),
                ("hamiltonian.vacuum-energy", 1e-12),
                ("hamiltonian.vacuum-correlation", 1e-12),
            ],
        ),
    );

    // 3. n-particle spectra at truncation 3 over 8 time modes.
    let (np, _) = timed_suite("nparticle", &config);
    gate.criterion(
        3,
        "n-particle spectra",
        require(
            &np,
            &[
                ("nparticle.integer-spectrum", 1e-12),
                ("nparticle.state-energies", 1e-12),
                ("nparticle.center-of-time", 1e-12),
                ("nparticle.vacuum-annihilated", 1e-12),
                ("nparticle.two-particle", 1e-12),
            ],
        ),
    );

    // 4. Dressed-position commutator plus a second-order functional
    //    derivative whose error drops by at least 3.9x per step halving.
    let (heis, _) = timed_suite("heisenberg", &config);
    let fd = config.refinement.fd_step;
    gate.criterion(
        4,
        "dressed positions",
        require(
            &heis,
            &[
                ("heisenberg.covariant-commutator", 1e-12),
                ("heisenberg.functional-derivative", 100.0 * fd * fd),
                ("heisenberg.difference-order", 0.0),
            ],
        ),
    );

    // 5. Coherent overlaps within the analytic series tail, 20 pairs of
    //    amplitude at most 1, truncation 6.
    let (coh, _) = timed_suite("coherent", &config);
    gate.criterion(
        5,
        "coherent overlaps",
        require(
            &coh,
            &[
                ("coherent.overlap-law", 1e-12),
                ("coherent.vacuum-at-zero", 1e-12),
                ("coherent.annihilator-eigenvector", 1e-12),
            ],
        ),
    );

    // 6. Point-split angular momenta: no central extension at any split in
    //    the schedule, closure defect monotone under refinement, under 10 s.
    let (ang, elapsed) = timed_suite("angular", &config);
    gate.criterion(
        6,
        "angular momenta",
        require(
            &ang,
            &[
                ("angular.no-central-extension", 1e-12),
                ("angular.self-commutator", 1e-12),
                ("angular.splitting-defect", 0.0),
                ("angular.refinement-defect", 0.0),
            ],
        )
        .and(within(elapsed, Duration::from_secs(10))),
    );

    // 7. Velocity extension for every configured coupling; the zero
    //    coupling must reproduce the plain builders.
    let (vel, _) = timed_suite("velocity", &config);
    gate.criterion(
        7,
        "velocity extension",
        require(
            &vel,
            &[
                ("velocity.position-velocity-commute", 1e-12),
                ("velocity.vacuum-greens", 1e-10),
                ("velocity.zero-coupling-reduction", 1e-14),
                ("velocity.mode-rotation", 1e-10),
            ],
        ),
    );

    // 8. Scalar field on the 8x4x4x4 grid plus the dense-exponential
    //    oracle on the small grid, under 30 s.
    let (qft, elapsed) = timed_suite("qft", &config);
    gate.criterion(
        8,
        "scalar field",
        require(
            &qft,
            &[
                ("qft.field-momentum-ccr", 1e-10),
                ("qft.heisenberg-equation", 1e-10),
                ("qft.commuting-family", 1e-10),
                ("qft.evolution-oracle", 1e-10),
                ("qft.conjugation-oracle", 1e-10),
            ],
        )
        .and(within(elapsed, Duration::from_secs(30))),
    );

    // 9. Decoherence functional: normalized and Hermitian, with the tensor
    //    realization exactly projective while the matched class operator is
    //    genuinely non-idempotent (defect above 0.1).
    let (hist, _) = timed_suite("histories", &config);
    gate.criterion(
        9,
        "history weights",
        require(
            &hist,
            &[
                ("histories.weight-normalization", 1e-12),
                ("histories.hermiticity", 1e-12),
                ("histories.tensor-idempotence", 1e-13),
                ("histories.class-operator-defect", 0.0),
                ("histories.zero-slot", 1e-12),
                ("histories.coarse-graining-additivity", 1e-12),
                ("histories.identity-insertion", 1e-12),
                ("histories.rank-product", 0.0),
            ],
        ),
    );

    gate.finish();
}
