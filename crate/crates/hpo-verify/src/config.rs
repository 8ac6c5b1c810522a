//! Suite configuration: flat TOML with one section per concern. Every
//! field has a desk-scale default, so an empty file (or no file) runs the
//! full battery in seconds.

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    /// Seed for all randomized checks; fixed seed means byte-identical
    /// report bodies.
    pub seed: u64,
    pub lattice: LatticeConfig,
    pub grid: GridConfig,
    pub physics: PhysicsConfig,
    pub fock: FockConfig,
    pub tolerances: ToleranceConfig,
    pub refinement: RefinementConfig,
    pub hooks: HookConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LatticeConfig {
    pub n_points: usize,
    pub dt: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub dims: [usize; 4],
    pub spacings: [f64; 4],
    /// Small grid for the dense matrix-exponential cross-check.
    pub oracle_dims: [usize; 4],
    pub oracle_spacings: [f64; 4],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhysicsConfig {
    pub hbar: f64,
    pub mass: f64,
    pub omega: f64,
    /// Velocity-coupling values swept by the velocity suite.
    pub lambdas: Vec<f64>,
    /// Field mass for the 4D suite (must be positive).
    pub field_mass: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FockConfig {
    /// Truncation for the n-particle suite (8 time modes).
    pub n_max: usize,
    /// Truncation for the coherent suite (4 time modes).
    pub coherent_n_max: usize,
    pub coherent_modes: usize,
    pub nparticle_modes: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToleranceConfig {
    pub default: f64,
    pub qft: f64,
    pub projector_idempotence: f64,
    /// A class operator counts as genuinely non-projective only above
    /// this idempotence defect.
    pub class_operator_defect_floor: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RefinementConfig {
    /// Point-splitting distances, in lattice steps, for the angular suite.
    pub epsilon_steps: Vec<usize>,
    /// Number of dt-halvings when studying the splitting limit.
    pub dt_halvings: usize,
    /// Central-difference step for functional derivatives.
    pub fd_step: f64,
    /// Randomized pair counts for the sampled identities.
    pub cha_pairs: usize,
    pub coherent_pairs: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HookConfig {
    /// Test hook: added verbatim to the angular suite's measured central
    /// term so the failure path of the runner can be exercised.
    pub inject_central_defect: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 20261,
            lattice: LatticeConfig::default(),
            grid: GridConfig::default(),
            physics: PhysicsConfig::default(),
            fock: FockConfig::default(),
            tolerances: ToleranceConfig::default(),
            refinement: RefinementConfig::default(),
            hooks: HookConfig::default(),
        }
    }
}

impl Default for LatticeConfig {
    fn default() -> Self {
        LatticeConfig { n_points: 16, dt: 0.25 }
    }
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            dims: [8, 4, 4, 4],
            spacings: [0.25, 0.5, 0.5, 0.5],
            oracle_dims: [2, 2, 2, 2],
            oracle_spacings: [0.25, 0.5, 0.5, 0.5],
        }
    }
}

impl Default for PhysicsConfig {
    fn default() -> Self {
        PhysicsConfig {
            hbar: 1.0,
            mass: 1.0,
            omega: 1.0,
            lambdas: vec![0.0, 0.5, 1.0],
            field_mass: 1.0,
        }
    }
}

impl Default for FockConfig {
    fn default() -> Self {
        FockConfig {
            n_max: 3,
            coherent_n_max: 6,
            coherent_modes: 4,
            nparticle_modes: 8,
        }
    }
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            default: 1e-12,
            qft: 1e-10,
            projector_idempotence: 1e-13,
            class_operator_defect_floor: 0.1,
        }
    }
}

impl Default for RefinementConfig {
    fn default() -> Self {
        RefinementConfig {
            epsilon_steps: vec![4, 2, 1],
            dt_halvings: 3,
            fd_step: 1e-5,
            cha_pairs: 50,
            coherent_pairs: 20,
        }
    }
}

impl Default for HookConfig {
    fn default() -> Self {
        HookConfig { inject_central_defect: 0.0 }
    }
}

impl SuiteConfig {
    pub fn load(path: &Path) -> Result<SuiteConfig> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        let config: SuiteConfig = toml::from_str(&text)
            .with_context(|| format!("cannot parse config file {}", path.display()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.lattice.n_points == 0 || !(self.lattice.dt > 0.0) {
            bail!("lattice requires n_points > 0 and dt > 0");
        }
        let t = &self.tolerances;
        if !(t.default > 0.0 && t.qft > 0.0 && t.projector_idempotence > 0.0) {
            bail!("tolerances must be strictly positive");
        }
        if !(t.class_operator_defect_floor > 0.0) {
            bail!("class operator defect floor must be strictly positive");
        }
        if !(self.physics.hbar > 0.0 && self.physics.mass > 0.0 && self.physics.omega > 0.0) {
            bail!("physics constants hbar, m, omega must be strictly positive");
        }
        if !(self.physics.field_mass > 0.0) {
            bail!("field mass must be strictly positive (the massless dressing is singular)");
        }
        if self.physics.lambdas.iter().any(|&l| l < 0.0) {
            bail!("velocity couplings must be nonnegative");
        }
        if self.refinement.epsilon_steps.is_empty() {
            bail!("the splitting schedule needs at least one entry");
        }
        if !(self.refinement.fd_step > 0.0) {
            bail!("finite-difference step must be positive");
        }
        if self.refinement.cha_pairs == 0 || self.refinement.coherent_pairs == 0 {
            bail!("sampled checks need at least one pair");
        }
        Ok(())
    }
}
