//! Run configuration: one TOML document with a section per experiment.
//!
//! Rates are in units of κ and times in units of 1/κ unless a `[units]` block
//! gives the physical value of κ, in which case every rate and time in the
//! file is read in that physical unit and rescaled on load.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::CliError;
use crate::dynamics::IntegratorConfig;
use crate::models::{EffectiveParams, FullModelParams};
use crate::protocol::{DetectorModel, Mode};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Must match the subcommand when given.
    pub experiment: Option<String>,
    pub seed: u64,
    /// Output directory; not part of the config hash.
    pub out: PathBuf,
    pub units: Option<Units>,
    pub model: ModelConfig,
    /// Overrides every experiment's default integrator.
    pub integrator: Option<IntegratorConfig>,
    pub evolve: EvolveConfig,
    pub purify: PurifyConfig,
    pub bell_surface: BellSurfaceConfig,
    pub regimes: RegimesConfig,
    pub localization: LocalizationConfig,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Units {
    /// Physical cavity decay rate, in the unit used for every rate in the file.
    pub kappa: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub g_eff: f64,
    pub omega_eff_drive: f64,
    /// Defaults to 1, or to the physical κ of `[units]`.
    pub kappa: Option<f64>,
    /// Opposite coupling signs: the Φ⁺ variant.
    pub opposite_phase: bool,
    /// Field cutoff; derived from the pointer amplitude when absent.
    pub n_max: Option<usize>,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            g_eff: 1.0,
            omega_eff_drive: 0.0,
            kappa: None,
            opposite_phase: false,
            n_max: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvolveMode {
    /// Interaction Hamiltonian, no loss; compared with the closed-form state.
    Unitary,
    /// Interaction Hamiltonian with cavity loss; reports `‖dρ/dt‖₁`.
    Dissipative,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolveConfig {
    pub mode: EvolveMode,
    pub t_final: f64,
    pub samples: usize,
    /// Initial Fock state of the field; the atoms start in `|gg⟩`.
    pub initial_photons: usize,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        Self {
            mode: EvolveMode::Unitary,
            t_final: 2.0,
            samples: 20,
            initial_photons: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PurifyConfig {
    pub rounds: u32,
    pub mode: Mode,
    pub detector: DetectorModel,
    /// Sampled detector runs per round; 0 disables sampling.
    pub detector_trials: u32,
}

impl Default for PurifyConfig {
    fn default() -> Self {
        Self {
            rounds: 3,
            mode: Mode::SteadyState,
            detector: DetectorModel::default(),
            detector_trials: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BellSurfaceConfig {
    /// `|α̃|` grid.
    pub alpha: Vec<f64>,
    pub rounds: Vec<u32>,
    /// Also simulate each `|α̃|` in steady-state mode.
    pub numeric: bool,
}

impl Default for BellSurfaceConfig {
    fn default() -> Self {
        Self {
            alpha: (1..=20).map(|k| k as f64 * 0.05).collect(),
            rounds: vec![1, 2, 3, 4, 5],
            numeric: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RegimesConfig {
    /// Explicit full-model parameters; when absent one design point per `ratios` entry is used.
    pub full: Option<FullModelParams>,
    /// Largest far-detuning ratio of each design point.
    pub ratios: Vec<f64>,
    pub g_eff: f64,
    pub omega_eff_drive: f64,
    pub omega_e: f64,
    pub omega_f: f64,
    pub n_max: usize,
    /// Horizon in units of `1/g_eff`.
    pub horizon: f64,
    pub samples: usize,
    /// Ratio threshold for the inequalities and trace-distance tolerance.
    pub tolerance: f64,
}

impl Default for RegimesConfig {
    fn default() -> Self {
        Self {
            full: None,
            ratios: vec![0.05, 0.15, 0.5],
            g_eff: 1.0,
            omega_eff_drive: 0.5,
            omega_e: 1.0,
            omega_f: 1.0,
            n_max: 8,
            horizon: 2.0,
            samples: 40,
            tolerance: 0.05,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LocalizationConfig {
    pub epsilon: Vec<f64>,
    /// Coupling of the reference atom; the model section's `g_eff` is not used here.
    pub g_eff: f64,
    pub mode: Mode,
}

impl Default for LocalizationConfig {
    fn default() -> Self {
        Self {
            epsilon: vec![0.0, 0.02, 0.05, 0.1, 0.15, 0.2],
            g_eff: 2.0,
            mode: Mode::Timed {
                tau: 3.0,
                damped: true,
            },
        }
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            experiment: None,
            seed: 0,
            out: PathBuf::from("out"),
            units: None,
            model: ModelConfig::default(),
            integrator: None,
            evolve: EvolveConfig::default(),
            purify: PurifyConfig::default(),
            bell_surface: BellSurfaceConfig::default(),
            regimes: RegimesConfig::default(),
            localization: LocalizationConfig::default(),
        }
    }
}

/// Parses a `--set` value as a TOML value, falling back to a bare string.
fn parse_value(raw: &str) -> toml::Value {
    match toml::from_str::<toml::Table>(&format!("v = {raw}")) {
        Ok(mut t) => t.remove("v").expect("key present"),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}

/// Applies `a.b.c=value` to a TOML tree, creating intermediate tables.
pub fn apply_override(root: &mut toml::Table, spec: &str) -> Result<(), CliError> {
    let (path, raw) = spec
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override `{spec}` is not key=value")))?;
    let keys: Vec<&str> = path.trim().split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(CliError::Config(format!("bad override key `{path}`")));
    }
    let (last, parents) = keys.split_last().expect("non-empty");
    let mut table = root;
    for key in parents {
        let entry = table
            .entry(key.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        table = entry.as_table_mut().ok_or_else(|| {
            CliError::Config(format!("override `{path}`: `{key}` is not a table"))
        })?;
    }
    table.insert(last.to_string(), parse_value(raw.trim()));
    Ok(())
}

const RATE_KEYS: &[&str] = &[
    "model.g_eff",
    "model.omega_eff_drive",
    "model.kappa",
    "integrator.steady_tol",
    "purify.detector.dark_count_rate",
    "localization.g_eff",
    "regimes.g_eff",
    "regimes.omega_eff_drive",
    "regimes.omega_e",
    "regimes.omega_f",
    "regimes.full.omega_e",
    "regimes.full.omega_c",
    "regimes.full.omega_f",
    "regimes.full.g1",
    "regimes.full.g2",
    "regimes.full.omega",
    "regimes.full.omega1p",
    "regimes.full.omega2p",
    "regimes.full.delta",
    "regimes.full.delta_p",
];

const TIME_KEYS: &[&str] = &[
    "integrator.dt",
    "integrator.t_final",
    "integrator.max_time",
    "evolve.t_final",
    "purify.mode.tau",
    "purify.detector.observation_window",
    "localization.mode.tau",
];

fn scale_key(root: &mut toml::Table, path: &str, factor: f64) -> Result<(), CliError> {
    let (last, parents) = path
        .rsplit_once('.')
        .map_or((path, None), |(p, l)| (l, Some(p)));
    let mut table = root;
    for key in parents.into_iter().flat_map(|p| p.split('.')) {
        match table.get_mut(key).and_then(|v| v.as_table_mut()) {
            Some(t) => table = t,
            None => return Ok(()),
        }
    }
    if let Some(v) = table.get_mut(last) {
        let x = match v {
            toml::Value::Float(x) => *x,
            toml::Value::Integer(i) => *i as f64,
            _ => return Err(CliError::Config(format!("`{path}` must be a number"))),
        };
        *v = toml::Value::Float(x * factor);
    }
    Ok(())
}

/// Folds `[units]` into the document: rates written in the file are divided
/// by the physical κ and times multiplied by it. Defaults are already in
/// units of κ and stay untouched.
fn normalize_units(root: &mut toml::Table) -> Result<(), CliError> {
    let Some(units) = root.remove("units") else {
        return Ok(());
    };
    let units: Units = units
        .try_into()
        .map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
    let k = units.kappa;
    if !(k > 0.0 && k.is_finite()) {
        return Err(CliError::Config(format!(
            "units.kappa must be > 0, got {k}"
        )));
    }
    for path in RATE_KEYS {
        scale_key(root, path, 1.0 / k)?;
    }
    for path in TIME_KEYS {
        scale_key(root, path, k)?;
    }
    let model = root
        .entry("model")
        .or_insert_with(|| toml::Value::Table(toml::Table::new()))
        .as_table_mut()
        .ok_or_else(|| CliError::Config("`model` is not a table".into()))?;
    model.entry("kappa").or_insert(toml::Value::Float(1.0));
    Ok(())
}

impl RunConfig {
    /// Reads an optional TOML document, applies overrides in order and validates the result.
    pub fn load(text: Option<&str>, overrides: &[String]) -> Result<Self, CliError> {
        let mut root: toml::Table = match text {
            Some(t) => toml::from_str(t).map_err(|e| CliError::Config(e.to_string()))?,
            None => toml::Table::new(),
        };
        for o in overrides {
            apply_override(&mut root, o)?;
        }
        normalize_units(&mut root)?;
        toml::Value::Table(root)
            .try_into()
            .map_err(|e: toml::de::Error| CliError::Config(e.to_string()))
    }

    pub fn kappa(&self) -> f64 {
        self.model.kappa.unwrap_or(1.0)
    }

    pub fn effective(&self) -> Result<EffectiveParams, CliError> {
        let signs = if self.model.opposite_phase {
            [1, -1]
        } else {
            [1, 1]
        };
        Ok(EffectiveParams::new(
            self.model.g_eff,
            self.model.omega_eff_drive,
            self.kappa(),
            signs,
        )?)
    }

    pub fn integrator_or(&self, default: IntegratorConfig) -> IntegratorConfig {
        self.integrator.clone().unwrap_or(default)
    }

    /// Canonical TOML of the semantically relevant fields.
    pub fn canonical(&self) -> String {
        let mut c = self.clone();
        c.out = PathBuf::new();
        c.model.kappa = Some(self.kappa());
        toml::to_string(&c).expect("config serializes")
    }

    /// SHA-256 of [`canonical`](Self::canonical), hex encoded.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical().as_bytes()))
    }
}
