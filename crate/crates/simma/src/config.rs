//! JSON configuration schema.
//!
//! One document describes the model (components with weight, drift, Gaussian
//! variance, Lévy family and kernel pair) and the simulation plan. Unknown
//! fields are rejected, defaults are filled at parse time so reports can
//! echo the fully resolved configuration, and numeric fields that may be
//! infinite accept the strings `"inf"`/`"-inf"`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::criteria::{CriteriaError, MixedModel};
use crate::kernels::{Kernel, KernelError, KernelPair};
use crate::noise::{LevyMeasure, MixedNoise, NoiseComponent, NoiseError};
use crate::simulate::{SimPlan, DEFAULT_SEED};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("configuration is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Noise(#[from] NoiseError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Criteria(#[from] CriteriaError),
    #[error("invalid configuration: {0}")]
    Semantics(String),
}

/// f64 field that accepts `"inf"`, `"-inf"` and `"nan"` spellings.
pub mod infable {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(v),
            Raw::Str(s) => match s.trim().to_ascii_lowercase().as_str() {
                "inf" | "+inf" | "infinity" => Ok(f64::INFINITY),
                "-inf" | "-infinity" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(serde::de::Error::custom(format!(
                    "expected a number or one of \"inf\"/\"-inf\"/\"nan\", got {other:?}"
                ))),
            },
        }
    }
}

fn default_weight() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum LevyConfig {
    Stable { c1: f64, c2: f64, alpha: f64 },
    TemperedStable { d1: f64, d2: f64, beta: f64, l1: f64, l2: f64 },
    FiniteAtoms { atoms: Vec<(f64, f64)> },
    TabulatedTail {
        grid: Vec<(f64, f64)>,
        #[serde(with = "infable")]
        tail_exponent: f64,
    },
}

impl LevyConfig {
    fn build(&self) -> Result<LevyMeasure, NoiseError> {
        match self {
            LevyConfig::Stable { c1, c2, alpha } => LevyMeasure::stable(*c1, *c2, *alpha),
            LevyConfig::TemperedStable { d1, d2, beta, l1, l2 } => {
                LevyMeasure::tempered_stable(*d1, *d2, *beta, *l1, *l2)
            }
            LevyConfig::FiniteAtoms { atoms } => LevyMeasure::finite_atoms(atoms.clone()),
            LevyConfig::TabulatedTail { grid, tail_exponent } => {
                LevyMeasure::tabulated(grid.clone(), *tail_exponent)
            }
        }
    }
}

fn default_terms() -> u32 {
    20
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelConfig {
    Fractional { alpha: f64 },
    Indicator { a: f64, b: f64 },
    SmoothBump { a: f64, b: f64 },
    WeierstrassBump {
        a: f64,
        b: u32,
        #[serde(default = "default_terms")]
        terms: u32,
    },
    PiecewiseLinear { knots: Vec<(f64, f64)> },
}

impl KernelConfig {
    fn build(&self) -> Result<Kernel, KernelError> {
        match self {
            KernelConfig::Fractional { alpha } => {
                let k = Kernel::fractional(*alpha);
                k.validate()?;
                Ok(k)
            }
            KernelConfig::Indicator { a, b } => Kernel::indicator(*a, *b),
            KernelConfig::SmoothBump { a, b } => Kernel::smooth_bump(*a, *b),
            KernelConfig::WeierstrassBump { a, b, terms } => {
                Kernel::weierstrass_bump(*a, *b, *terms)
            }
            KernelConfig::PiecewiseLinear { knots } => Kernel::piecewise_linear(knots.clone()),
        }
    }
}

/// Anchor choice for the pair `f0`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnchorConfig {
    /// `f0 ≡ 0`: plain moving average.
    #[default]
    Zero,
    /// `f0 = f`: anchored pair with `X_0 = 0`.
    Same,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentConfig {
    #[serde(default = "default_weight")]
    pub weight: f64,
    #[serde(default)]
    pub theta: f64,
    #[serde(default)]
    pub sigma2: f64,
    #[serde(default)]
    pub levy: Option<LevyConfig>,
    pub kernel: KernelConfig,
    #[serde(default)]
    pub kernel0: AnchorConfig,
}

fn default_n_max() -> u32 {
    12
}

fn default_replicas() -> usize {
    1000
}

fn default_series_terms() -> usize {
    10_000
}

fn default_compensation() -> bool {
    true
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanConfig {
    #[serde(default = "default_n_max")]
    pub n_max: u32,
    #[serde(default = "default_replicas")]
    pub replicas: usize,
    #[serde(default)]
    pub window: Option<(f64, f64)>,
    #[serde(default = "default_series_terms")]
    pub series_terms: usize,
    #[serde(default)]
    pub small_jump_cutoff: f64,
    #[serde(default = "default_compensation")]
    pub gaussian_compensation: bool,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

impl Default for PlanConfig {
    fn default() -> Self {
        PlanConfig {
            n_max: default_n_max(),
            replicas: default_replicas(),
            window: None,
            series_terms: default_series_terms(),
            small_jump_cutoff: 0.0,
            gaussian_compensation: true,
            seed: default_seed(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub components: Vec<ComponentConfig>,
    #[serde(default)]
    pub plan: PlanConfig,
}

impl RunConfig {
    /// Build the validated model; every constraint violation names the field
    /// and the rule it broke.
    pub fn model(&self) -> Result<MixedModel, ConfigError> {
        if self.components.is_empty() {
            return Err(ConfigError::Semantics(
                "components: at least one component is required".into(),
            ));
        }
        let mut comps = Vec::new();
        let mut kernels = Vec::new();
        for (i, c) in self.components.iter().enumerate() {
            let levy = c.levy.as_ref().map(|l| l.build()).transpose()?;
            let comp = NoiseComponent::new(c.weight, c.theta, c.sigma2, levy);
            comp.validate()?;
            if !comp.is_purely_stochastic() {
                return Err(ConfigError::Semantics(format!(
                    "components[{i}]: sigma2 = 0 with no (or empty) Lévy part violates the \
                     purely stochastic requirement"
                )));
            }
            let kernel = c.kernel.build()?;
            let pair = match c.kernel0 {
                AnchorConfig::Zero => KernelPair::moving_average(kernel),
                AnchorConfig::Same => KernelPair::anchored(kernel),
            };
            comps.push(comp);
            kernels.push(pair);
        }
        let noise = MixedNoise::new(comps);
        noise.validate()?;
        Ok(MixedModel::new(noise, kernels)?)
    }

    pub fn sim_plan(&self) -> SimPlan {
        SimPlan {
            n_max: self.plan.n_max,
            window: self.plan.window,
            series_terms: self.plan.series_terms,
            small_jump_cutoff: self.plan.small_jump_cutoff,
            gaussian_compensation: self.plan.gaussian_compensation,
            replicas: self.plan.replicas,
            seed: self.plan.seed,
        }
    }

    /// The configuration with defaults filled in, for report echoes.
    pub fn resolved_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serialization cannot fail")
    }
}

/// Parse and validate a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let cfg: RunConfig = serde_json::from_str(text)?;
    // Surface model-level violations eagerly so callers can rely on a parsed
    // config being buildable.
    cfg.model()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::{verdict, VerdictStatus};

    #[test]
    fn minimal_stable_config_fills_defaults() {
        let text = r#"{
            "components": [
                {"levy": {"family": "stable", "c1": 1, "c2": 1, "alpha": 1.5},
                 "kernel": {"family": "indicator", "a": 0, "b": 1}}
            ]
        }"#;
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.plan.n_max, 12);
        assert_eq!(cfg.plan.replicas, 1000);
        assert_eq!(cfg.plan.seed, DEFAULT_SEED);
        assert!(cfg.model().is_ok());
        let echo = cfg.resolved_value();
        assert_eq!(echo["plan"]["n_max"], 12);
        assert_eq!(echo["components"][0]["weight"], 1.0);
    }

    #[test]
    fn purely_deterministic_component_rejected() {
        let text = r#"{
            "components": [
                {"theta": 1.0, "kernel": {"family": "fractional", "alpha": 0.0},
                 "kernel0": "same"}
            ]
        }"#;
        let err = parse_config(text).unwrap_err();
        assert!(err.to_string().contains("purely stochastic"), "{err}");
    }

    #[test]
    fn unknown_fields_rejected() {
        let text = r#"{
            "components": [
                {"levy": {"family": "stable", "c1": 1, "c2": 1, "alpha": 1.5},
                 "kernel": {"family": "indicator", "a": 0, "b": 1},
                 "typo_field": 3}
            ]
        }"#;
        let err = parse_config(text).unwrap_err();
        assert!(err.to_string().contains("typo_field"), "{err}");
    }

    #[test]
    fn two_component_fractional_mixture() {
        let text = r#"{
            "components": [
                {"weight": 0.5,
                 "levy": {"family": "tempered_stable", "d1": 1, "d2": 1, "beta": 1.2, "l1": 1, "l2": 1},
                 "kernel": {"family": "fractional", "alpha": 0.2},
                 "kernel0": "same"},
                {"weight": 0.5,
                 "levy": {"family": "tempered_stable", "d1": 1, "d2": 1, "beta": 1.2, "l1": 1, "l2": 1},
                 "kernel": {"family": "fractional", "alpha": 0.4},
                 "kernel0": "same"}
            ],
            "plan": {"n_max": 8, "replicas": 50}
        }"#;
        let cfg = parse_config(text).unwrap();
        let model = cfg.model().unwrap();
        assert_eq!(model.kernels.len(), 2);
        assert_eq!(verdict(&model).unwrap().status, VerdictStatus::FiniteVariation);
    }

    #[test]
    fn inf_strings_parse_in_tail_exponent() {
        let text = r#"{
            "components": [
                {"levy": {"family": "tabulated_tail",
                          "grid": [[0.1, 10.0], [1.0, 1.0], [10.0, 0.0]],
                          "tail_exponent": "-inf"},
                 "kernel": {"family": "smooth_bump", "a": -1, "b": 1}}
            ]
        }"#;
        let cfg = parse_config(text).unwrap();
        match &cfg.components[0].levy {
            Some(LevyConfig::TabulatedTail { tail_exponent, .. }) => {
                assert_eq!(*tail_exponent, f64::NEG_INFINITY)
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn invalid_family_parameters_name_the_rule() {
        let text = r#"{
            "components": [
                {"levy": {"family": "stable", "c1": 1, "c2": 1, "alpha": 2.5},
                 "kernel": {"family": "indicator", "a": 0, "b": 1}}
            ]
        }"#;
        let err = parse_config(text).unwrap_err();
        assert!(err.to_string().contains("(0, 2)"), "{err}");
    }
}
