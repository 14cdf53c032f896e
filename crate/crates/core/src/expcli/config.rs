use serde::{Deserialize, Deserializer, Serialize};

use crate::algebra::{random_operator, AlgebraShape, Operator, OperatorKind};
use crate::ergodic::default_schedule;
use crate::error::{Error, Result};
use crate::kernels::random::{random_recipe, KernelFamily};
use crate::kernels::{KernelRep, Recipe};
use crate::rearrangement::NormId;

/// A kernel drawn from a random family; expanded to an explicit recipe
/// before anything runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename = "random")]
pub struct RandomKernelSpec {
    pub family: KernelFamily,
    /// Defaults to the experiment seed plus one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum KernelSpec {
    Random(RandomKernelSpec),
    Recipe(Recipe),
}

impl<'de> Deserialize<'de> for KernelSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let v = serde_json::Value::deserialize(d)?;
        if v.get("kind").and_then(|k| k.as_str()) == Some("random") {
            serde_json::from_value(v).map(KernelSpec::Random).map_err(D::Error::custom)
        } else {
            serde_json::from_value(v).map(KernelSpec::Recipe).map_err(D::Error::custom)
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementClass {
    #[default]
    General,
    Hermitian,
    Psd,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ElementSpec {
    Random {
        #[serde(default)]
        class: ElementClass,
        #[serde(default = "one")]
        scale: f64,
        /// Defaults to the experiment seed.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    /// Real diagonal entries, block after block.
    Diagonal { values: Vec<f64> },
    /// An operator in its JSON form.
    Json { operator: String },
}

fn one() -> f64 {
    1.0
}

impl Default for ElementSpec {
    fn default() -> Self {
        ElementSpec::Random { class: ElementClass::General, scale: 1.0, seed: None }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Budgets {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
}

pub const DEFAULT_N_MAX: u32 = 4;
pub const DEFAULT_EPSILON: f64 = 0.25;
pub const DEFAULT_BOUND: f64 = 1e-3;
pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_TRIALS: usize = 20;

impl Budgets {
    pub fn n_max(&self) -> u32 {
        self.n_max.unwrap_or(DEFAULT_N_MAX)
    }
    pub fn epsilon(&self) -> f64 {
        self.epsilon.unwrap_or(DEFAULT_EPSILON)
    }
    pub fn bound(&self) -> f64 {
        self.bound.unwrap_or(DEFAULT_BOUND)
    }
    pub fn tol(&self) -> f64 {
        self.tol.unwrap_or(DEFAULT_TOL)
    }
    pub fn trials(&self) -> usize {
        self.trials.unwrap_or(DEFAULT_TRIALS)
    }
}

/// One experiment: where, which kernel, which element, and the budgets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub id: String,
    pub seed: u64,
    /// `(dim, weight)` per block.
    pub shape: Vec<(usize, f64)>,
    pub kernel: KernelSpec,
    #[serde(default)]
    pub element: ElementSpec,
    /// Norm names as accepted by [`NormId`]'s parser; the four basic norms
    /// when empty.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub norms: Vec<String>,
    /// `1, 2, 4, …, 2^14` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<Vec<u64>>,
    #[serde(default)]
    pub budgets: Budgets,
}

/// Parses and validates; every semantic violation is reported, not just the
/// first.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(vec![e.to_string()]))?;
    cfg.validate()?;
    Ok(cfg)
}

impl ExperimentConfig {
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(vec![e.to_string()]))
    }

    pub fn validate(&self) -> Result<()> {
        let mut v = Vec::new();
        if self.id.trim().is_empty() {
            v.push("id must not be empty".to_string());
        }
        let shape = match AlgebraShape::new(self.shape.clone()) {
            Ok(s) => Some(s),
            Err(e) => {
                v.push(format!("shape: {e}"));
                None
            }
        };
        for name in &self.norms {
            if let Err(e) = name.parse::<NormId>() {
                v.push(format!("norms: `{name}`: {e}"));
            }
        }
        if let Some(s) = &self.schedule {
            if s.is_empty() {
                v.push("schedule must not be empty".into());
            } else if s[0] == 0 {
                v.push("schedule entries must be ≥ 1".into());
            }
            if s.windows(2).any(|w| w[1] <= w[0]) {
                v.push(format!("schedule {s:?} is not strictly increasing"));
            }
        }
        let b = &self.budgets;
        if b.n_max == Some(0) {
            v.push("budgets.n_max must be ≥ 1".into());
        }
        if b.trials == Some(0) {
            v.push("budgets.trials must be ≥ 1".into());
        }
        for (name, val) in [("epsilon", b.epsilon), ("bound", b.bound), ("tol", b.tol)] {
            if let Some(x) = val {
                if !(x > 0.0 && x.is_finite()) {
                    v.push(format!("budgets.{name} must be positive and finite, got {x}"));
                }
            }
        }
        if let Some(shape) = &shape {
            if b.epsilon() >= shape.total_trace() {
                v.push(format!("budgets.epsilon {} must be below τ(1) = {}", b.epsilon(), shape.total_trace()));
            }
            if let Err(e) = self.kernel_recipe(shape).and_then(|r| KernelRep::from_recipe(shape, r)) {
                v.push(format!("kernel: {e}"));
            }
            if let Err(e) = self.element(shape) {
                v.push(format!("element: {e}"));
            }
        }
        match &self.element {
            ElementSpec::Random { scale, .. } if !(scale.is_finite() && *scale > 0.0) => {
                v.push(format!("element.scale must be positive and finite, got {scale}"));
            }
            _ => {}
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(v))
        }
    }

    pub fn algebra_shape(&self) -> Result<AlgebraShape> {
        AlgebraShape::new(self.shape.clone())
    }

    pub fn norm_ids(&self) -> Result<Vec<NormId>> {
        if self.norms.is_empty() {
            return Ok(NormId::BASIC.to_vec());
        }
        self.norms.iter().map(|n| n.parse()).collect()
    }

    pub fn schedule(&self) -> Vec<u64> {
        self.schedule.clone().unwrap_or_else(default_schedule)
    }

    /// The kernel as an explicit recipe.
    pub fn kernel_recipe(&self, shape: &AlgebraShape) -> Result<Recipe> {
        match &self.kernel {
            KernelSpec::Recipe(r) => Ok(r.clone()),
            KernelSpec::Random(r) => random_recipe(shape, r.family, r.seed.unwrap_or(self.seed.wrapping_add(1))),
        }
    }

    pub fn kernel(&self, shape: &AlgebraShape) -> Result<KernelRep> {
        KernelRep::from_recipe(shape, self.kernel_recipe(shape)?)
    }

    pub fn element(&self, shape: &AlgebraShape) -> Result<Operator> {
        match &self.element {
            ElementSpec::Random { class, scale, seed } => {
                let kind = match class {
                    ElementClass::General => OperatorKind::General,
                    ElementClass::Hermitian => OperatorKind::Hermitian,
                    ElementClass::Psd => OperatorKind::Psd,
                };
                Ok(random_operator(shape, kind, seed.unwrap_or(self.seed))?.scale_real(*scale))
            }
            ElementSpec::Diagonal { values } => Operator::from_real_diagonal(shape, values),
            ElementSpec::Json { operator } => {
                let x = Operator::from_json(operator)?;
                if x.shape() != shape {
                    return Err(Error::mismatch(shape, x.shape()));
                }
                Ok(x)
            }
        }
    }

    /// The same experiment with the kernel and element written out
    /// explicitly, so that it no longer depends on any seed.
    pub fn resolved(&self) -> Result<ExperimentConfig> {
        let shape = self.algebra_shape()?;
        let mut out = self.clone();
        out.kernel = KernelSpec::Recipe(self.kernel_recipe(&shape)?);
        out.element = ElementSpec::Json { operator: self.element(&shape)?.to_json()? };
        out.schedule = Some(self.schedule());
        Ok(out)
    }
}
