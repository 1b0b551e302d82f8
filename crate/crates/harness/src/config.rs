//! JSON experiment configuration.
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "master_seed": 7,
//!   "n_train": 200,
//!   "n_test": 1000,
//!   "repetitions": 10,
//!   "source": { "kind": "synthetic", "spec": { "model": "sparse_linear", "p": 50, "pi_0": 0.5, "delta": 2.0 } },
//!   "roster": [ { "method": "LDA" }, { "method": "RP_LDA", "d": 5, "b1": 100, "b2": 20 } ]
//! }
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize};

use rpens_core::estimation::ErrorEstimatorSpec;
use rpens_core::{Label, ProjectionFamily, RngSeed};

use crate::error::{HarnessError, Result};
use crate::loader::CsvOptions;
use crate::synthetic::SyntheticSpec;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MethodId {
    #[serde(rename = "LDA")]
    Lda,
    #[serde(rename = "QDA")]
    Qda,
    /// Projected-precision LDA ensemble with a single projection.
    #[serde(rename = "LDA_1")]
    Lda1,
    /// Projected-precision LDA ensemble, 1000 projections by default.
    #[serde(rename = "LDA_1000")]
    Lda1000,
    #[serde(rename = "RP_LDA")]
    RpLda,
    #[serde(rename = "RP_QDA")]
    RpQda,
    #[serde(rename = "RP_KNN", alias = "RP_knn")]
    RpKnn,
    /// LDA through one random projection.
    #[serde(rename = "SKETCH_LDA")]
    SketchLda,
    /// Predicts a fixed label; a baseline.
    #[serde(rename = "CONSTANT")]
    Constant,
}

impl MethodId {
    pub const ALL: [MethodId; 9] = [
        MethodId::Lda,
        MethodId::Qda,
        MethodId::Lda1,
        MethodId::Lda1000,
        MethodId::RpLda,
        MethodId::RpQda,
        MethodId::RpKnn,
        MethodId::SketchLda,
        MethodId::Constant,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MethodId::Lda => "LDA",
            MethodId::Qda => "QDA",
            MethodId::Lda1 => "LDA_1",
            MethodId::Lda1000 => "LDA_1000",
            MethodId::RpLda => "RP_LDA",
            MethodId::RpQda => "RP_QDA",
            MethodId::RpKnn => "RP_KNN",
            MethodId::SketchLda => "SKETCH_LDA",
            MethodId::Constant => "CONSTANT",
        }
    }

    pub fn is_rp_ensemble(self) -> bool {
        matches!(self, MethodId::RpLda | MethodId::RpQda | MethodId::RpKnn)
    }
}

impl fmt::Display for MethodId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MethodId {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        let upper = s.trim().to_ascii_uppercase();
        MethodId::ALL
            .into_iter()
            .find(|m| m.as_str() == upper)
            .ok_or_else(|| HarnessError::Config(format!("unknown method '{s}'")))
    }
}

/// Accept a family either as a name (`"haar"`, `"sparse:3"`) or as a tagged object.
fn family_from_json<'de, D: Deserializer<'de>>(de: D) -> std::result::Result<Option<ProjectionFamily>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Name(String),
        Full(ProjectionFamily),
    }
    match Option::<Repr>::deserialize(de)? {
        None => Ok(None),
        Some(Repr::Full(f)) => Ok(Some(f)),
        Some(Repr::Name(s)) => s.parse().map(Some).map_err(serde::de::Error::custom),
    }
}

/// One roster entry. Unset hyperparameters take the method's default.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodSpec {
    pub method: Option<MethodId>,
    /// Name used in reports; defaults to the method id.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b1: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b2: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Ensemble size for the projected-precision LDA methods.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<usize>,
    #[serde(default, deserialize_with = "family_from_json", skip_serializing_if = "Option::is_none")]
    pub family: Option<ProjectionFamily>,
    /// Fixed voting threshold; unset means data-driven.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimator: Option<ErrorEstimatorSpec>,
    /// Output of the constant baseline.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<Label>,
}

impl MethodSpec {
    pub fn new(method: MethodId) -> Self {
        Self { method: Some(method), ..Default::default() }
    }

    pub fn id(&self) -> Result<MethodId> {
        self.method.ok_or_else(|| HarnessError::Config("roster entry without a method".into()))
    }

    pub fn display_name(&self) -> String {
        match (&self.name, self.method) {
            (Some(n), _) => n.clone(),
            (None, Some(m)) => m.to_string(),
            (None, None) => "?".into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let id = self.id()?;
        let positive = |v: Option<usize>, what: &str| match v {
            Some(0) => Err(HarnessError::Config(format!("{id}: {what} must be positive"))),
            _ => Ok(()),
        };
        positive(self.d, "d")?;
        positive(self.b1, "b1")?;
        positive(self.b2, "b2")?;
        positive(self.k, "k")?;
        positive(self.b, "b")?;
        if let Some(a) = self.alpha {
            if !(0.0..=1.0).contains(&a) {
                return Err(HarnessError::Config(format!("{id}: alpha={a} outside [0, 1]")));
            }
        }
        if let Some(l) = self.label {
            if l > 1 {
                return Err(HarnessError::Config(format!("{id}: label {l} is not binary")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DataSource {
    Synthetic {
        spec: SyntheticSpec,
    },
    Csv {
        path: PathBuf,
        #[serde(default)]
        options: CsvOptions,
    },
    /// The epileptic seizure recognition table, fetched into the cache.
    Epilepsy {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cache_dir: Option<PathBuf>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        url: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sha256: Option<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub master_seed: RngSeed,
    pub n_train: usize,
    pub n_test: usize,
    pub repetitions: usize,
    pub source: DataSource,
    pub roster: Vec<MethodSpec>,
    /// Record wall-clock seconds per fit. Off by default so reports are
    /// reproducible byte for byte.
    #[serde(default)]
    pub record_timings: bool,
    /// Worker threads; unset uses all cores.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(HarnessError::Config(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.repetitions < 1 {
            return Err(HarnessError::Config("repetitions must be at least 1".into()));
        }
        if self.n_train < 2 || self.n_test < 1 {
            return Err(HarnessError::Config("need n_train >= 2 and n_test >= 1".into()));
        }
        if self.roster.is_empty() {
            return Err(HarnessError::Config("roster is empty".into()));
        }
        if self.threads == Some(0) {
            return Err(HarnessError::Config("threads must be positive".into()));
        }
        for m in &self.roster {
            m.validate()?;
        }
        Ok(())
    }

    /// Apply command-line overrides to every roster entry the parameter applies to.
    pub fn apply_overrides(&mut self, o: &Overrides) {
        if let Some(seed) = o.seed {
            self.master_seed = RngSeed(seed);
        }
        for m in &mut self.roster {
            let Some(id) = m.method else { continue };
            let rp = id.is_rp_ensemble();
            let sketch = matches!(id, MethodId::Lda1 | MethodId::Lda1000 | MethodId::SketchLda);
            if rp || sketch {
                m.d = o.d.or(m.d);
                m.family = o.family.or(m.family);
            }
            if rp {
                m.b1 = o.b1.or(m.b1);
                m.b2 = o.b2.or(m.b2);
                m.alpha = o.alpha.or(m.alpha);
            }
            if id == MethodId::RpKnn {
                m.k = o.k.or(m.k);
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub d: Option<usize>,
    pub b1: Option<usize>,
    pub b2: Option<usize>,
    pub k: Option<usize>,
    pub family: Option<ProjectionFamily>,
    pub alpha: Option<f64>,
}
