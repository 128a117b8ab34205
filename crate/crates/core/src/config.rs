//! Run configuration read from TOML. Every section is optional and falls
//! back to its defaults; unknown keys are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::basin::GridSpec;
use crate::error::{Error, Result};
use crate::poset::Permutation;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub poset: PosetConfig,
    pub nilpotency: NilpotencyConfig,
    pub decomp: DecompConfig,
    pub solve: SolveConfig,
    pub basin: BasinConfig,
    pub epsilon: EpsilonConfig,
    pub pipeline: PipelineConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            poset: PosetConfig::default(),
            nilpotency: NilpotencyConfig::default(),
            decomp: DecompConfig::default(),
            solve: SolveConfig::default(),
            basin: BasinConfig::default(),
            epsilon: EpsilonConfig::default(),
            pipeline: PipelineConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PosetConfig {
    pub d: usize,
}

impl Default for PosetConfig {
    fn default() -> Self {
        Self { d: 2 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NilpotencyConfig {
    /// Relation check runs for `d = 1..=combi_max`.
    pub combi_max: usize,
    /// Dimensions for the random matrix check.
    pub matrix_dims: Vec<usize>,
    pub trials: usize,
}

impl Default for NilpotencyConfig {
    fn default() -> Self {
        Self { combi_max: 6, matrix_dims: vec![2, 3, 4], trials: 100 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SequenceKind {
    Random,
    Scalar,
    DiagonalExtremal,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DecompConfig {
    pub d: usize,
    pub lambda: f64,
    pub m: f64,
    pub horizon: usize,
    pub fit_from: usize,
    pub kind: SequenceKind,
}

impl Default for DecompConfig {
    fn default() -> Self {
        Self { d: 2, lambda: 0.5, m: 4.0, horizon: 40, fit_from: 5, kind: SequenceKind::Random }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolveConfig {
    pub d: usize,
    pub lambda: f64,
    pub m: f64,
    pub horizon: usize,
    /// Hide the triangular linear parts behind random unitary frames.
    pub general: bool,
    pub quad_scale: f64,
    pub pinching_max: f64,
    pub residual_tol: f64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            d: 2,
            lambda: 0.5,
            m: 3.9,
            horizon: 50,
            general: true,
            quad_scale: 1.0,
            pinching_max: 1e3,
            residual_tol: 1e-8,
        }
    }
}

/// Where the interleaved linear maps go.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScheduleSpec {
    /// `"nilpotency-word"` or `"none"`.
    Named(String),
    Explicit { times: Vec<usize>, perms: Vec<Vec<usize>> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub radius: f64,
    pub per_axis: usize,
    pub samples: usize,
    pub far_field: usize,
    pub far_radius: f64,
    pub slice_per_axis: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { radius: 5.0, per_axis: 21, samples: 500, far_field: 100, far_radius: 1e3, slice_per_axis: 21 }
    }
}

impl GridConfig {
    pub fn spec(&self, seed: u64) -> GridSpec {
        GridSpec {
            radius: self.radius,
            per_axis: self.per_axis,
            samples: self.samples,
            far_field: self.far_field,
            far_radius: self.far_radius,
            seed,
        }
    }

    pub fn slice_spec(&self, seed: u64) -> GridSpec {
        GridSpec { per_axis: self.slice_per_axis, ..self.spec(seed) }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BasinConfig {
    pub d: usize,
    pub lambda_lo: f64,
    pub lambda_hi: f64,
    pub quad_scale: f64,
    pub schedule: ScheduleSpec,
    /// Number of interleaving epochs `H`; the horizon is `10 m_H`.
    pub epochs: u32,
    pub eps_conv: f64,
    pub grid: GridConfig,
}

impl Default for BasinConfig {
    fn default() -> Self {
        Self {
            d: 2,
            lambda_lo: 0.1,
            lambda_hi: 0.2,
            quad_scale: 1.0,
            schedule: ScheduleSpec::Named("nilpotency-word".into()),
            epochs: 6,
            eps_conv: 1e-9,
            grid: GridConfig::default(),
        }
    }
}

impl BasinConfig {
    pub fn parsed_schedule(&self) -> Result<Option<Vec<(usize, Permutation)>>> {
        match &self.schedule {
            ScheduleSpec::Named(s) if s == "nilpotency-word" => Ok(None),
            ScheduleSpec::Named(s) if s == "none" => Ok(Some(Vec::new())),
            ScheduleSpec::Named(s) => Err(Error::Config(format!(
                "unknown schedule `{s}` (expected \"nilpotency-word\", \"none\" or a table)"
            ))),
            ScheduleSpec::Explicit { times, perms } => {
                if times.len() != perms.len() {
                    return Err(Error::Config("schedule times and perms differ in length".into()));
                }
                if times.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::Config("schedule times must be strictly increasing".into()));
                }
                let mut out = Vec::with_capacity(times.len());
                for (&t, p) in times.iter().zip(perms) {
                    if p.len() != self.d || p.iter().any(|&x| x == 0) {
                        return Err(Error::Config(format!("permutation {p:?} is not 1-based of length {}", self.d)));
                    }
                    let zero_based = p.iter().map(|&x| x - 1).collect();
                    let perm = Permutation::new(zero_based).map_err(|e| Error::Config(e.to_string()))?;
                    out.push((t, perm));
                }
                Ok(Some(out))
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EpsilonConfig {
    pub dmax: usize,
}

impl Default for EpsilonConfig {
    fn default() -> Self {
        Self { dmax: 6 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    pub d: usize,
    pub lambda: f64,
    pub m: f64,
    pub kind: SequenceKind,
    pub horizon: usize,
    pub quad_scale: f64,
    pub pinching_max: f64,
    pub residual_tol: f64,
    pub eps_conv: f64,
    pub grid: GridConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            d: 2,
            lambda: 0.45,
            m: 4.5,
            kind: SequenceKind::Random,
            horizon: 1100,
            quad_scale: 1.0,
            pinching_max: 1e3,
            residual_tol: 1e-8,
            eps_conv: 1e-9,
            grid: GridConfig { far_field: 0, ..GridConfig::default() },
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// SHA-256 of the canonical JSON form, so equivalent files hash equally.
    pub fn hash(&self) -> String {
        let canon = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(canon))
    }
}
