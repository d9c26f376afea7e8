use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::earthquake::Method;
use crate::error::{Error, Result};
use crate::laminations::{EnumerationBudget, MultiCurve};
use crate::solvers::SolverConfig;
use crate::surface::{FenchelNielsen, PantsGraph, SurfaceDoc};

pub const SCHEMA_VERSION: u32 = 1;

fn schema_version() -> u32 {
    SCHEMA_VERSION
}

fn default_slack() -> f64 {
    1e-6
}

/// A run: shared tolerances and budgets plus one section per command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default = "default_slack")]
    pub slack: f64,
    #[serde(default)]
    pub budget: EnumerationBudget,
    /// Inverse earthquakes.
    #[serde(default)]
    pub solver: SolverConfig,
    /// Length minimization.
    #[serde(default = "SolverConfig::minimization")]
    pub minimizer: SolverConfig,
    #[serde(default)]
    pub surface: Option<SurfaceDoc>,
    #[serde(default)]
    pub lemma: LemmaConfig,
    #[serde(default)]
    pub ukmap: UkConfig,
    #[serde(default)]
    pub project: ProjectConfig,
    #[serde(default)]
    pub duality: DualityConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults deserialize")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LemmaConfig {
    pub configs: usize,
    pub genus: usize,
    pub grid: Vec<f64>,
    pub method: Method,
    /// Negative control: predict the slope `-i(γ, l)` instead of `+i`.
    pub wrong_sign: bool,
}

impl Default for LemmaConfig {
    fn default() -> Self {
        Self {
            configs: 100,
            genus: 2,
            grid: vec![0.0, 0.1, 1.0, 5.0, 10.0, 50.0],
            method: Method::FnTwist,
            wrong_sign: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UkConfig {
    pub ks: Vec<f64>,
    pub pairs: usize,
    pub sweep: SweepConfig,
}

impl Default for UkConfig {
    fn default() -> Self {
        Self {
            ks: vec![-0.9, -0.99, -0.999],
            pairs: 10,
            sweep: SweepConfig::default(),
        }
    }
}

/// Family `l(t) = (1 - t) start + t end` over `grid`, based at `base`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub ks: Vec<f64>,
    pub grid: Vec<f64>,
    pub base: SurfaceDoc,
    pub gamma: String,
    pub start: serde_json::Value,
    pub end: serde_json::Value,
}

impl Default for SweepConfig {
    fn default() -> Self {
        let topo = PantsGraph::standard(2).expect("genus 2");
        let base = FenchelNielsen::new(vec![1.2, 0.9, 1.6], vec![0.3, -0.2, 0.5]);
        let lam = |w: [f64; 2]| {
            MultiCurve::new(vec![(topo.curve_class(0), w[0]), (topo.curve_class(2), w[1])])
                .expect("positive weights")
                .to_json()
        };
        Self {
            ks: vec![-0.9, -0.99],
            grid: (0..=10).map(|j| j as f64 / 10.0).collect(),
            base: SurfaceDoc::new(&topo, &base),
            gamma: "a1 a2".into(),
            start: lam([0.5, 1.5]),
            end: lam([1.5, 0.5]),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProjectConfig {
    pub genus: usize,
    /// `μ`; the marking-set current with unit weights when absent.
    pub current: Option<serde_json::Value>,
    /// `ω`; empty when absent.
    pub omega: Option<serde_json::Value>,
    /// First starting point; the symmetric surface with lengths 1.5 when absent.
    pub start: Option<FenchelNielsen>,
    /// Further seeded starting points.
    pub restarts: usize,
    pub scale: f64,
    pub agreement_tol: f64,
    pub scale_tol: f64,
}

impl Default for ProjectConfig {
    fn default() -> Self {
        Self {
            genus: 2,
            current: None,
            omega: None,
            start: None,
            restarts: 2,
            scale: 2.0,
            agreement_tol: 1e-5,
            scale_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DualityConfig {
    pub pairs: usize,
    /// Planes pass within this distance of the origin.
    pub spread: f64,
    pub transforms: usize,
    pub rapidity: f64,
    /// Number of equally spaced distances in `[0.05, 5]`.
    pub distances: usize,
    pub tol: f64,
}

impl Default for DualityConfig {
    fn default() -> Self {
        Self {
            pairs: 100,
            spread: 2.0,
            transforms: 10,
            rapidity: 1.0,
            distances: 50,
            tol: 1e-9,
        }
    }
}

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub slack: Option<f64>,
    pub budget_radius: Option<usize>,
    pub grid: Option<Vec<f64>>,
    pub wrong_sign: bool,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::Validation(format!("{name} must be positive, got {v}")));
    }
    Ok(())
}

impl RunConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(Error::Validation(format!(
                "unsupported schema_version {}, expected {SCHEMA_VERSION}",
                cfg.schema_version
            )));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Validation(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Seed required by commands that draw random configurations.
    pub fn require_seed(&self) -> Result<u64> {
        self.seed
            .ok_or_else(|| Error::Validation("this command needs a seed (--seed or \"seed\")".into()))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.slack >= 0.0) || !self.slack.is_finite() {
            return Err(Error::Validation(format!("slack must be non-negative, got {}", self.slack)));
        }
        self.budget.validate()?;
        self.solver.validate()?;
        self.minimizer.validate()?;
        let p = &self.project;
        for (name, v) in [("project.scale", p.scale), ("project.agreement_tol", p.agreement_tol), ("project.scale_tol", p.scale_tol)] {
            positive(name, v)?;
        }
        let d = &self.duality;
        for (name, v) in [("duality.spread", d.spread), ("duality.rapidity", d.rapidity), ("duality.tol", d.tol)] {
            positive(name, v)?;
        }
        Ok(())
    }

    /// The `--grid` flag replaces the grid of whichever command uses one.
    pub fn apply(&mut self, o: &Overrides) {
        if let Some(s) = o.seed {
            self.seed = Some(s);
        }
        if let Some(s) = o.slack {
            self.slack = s;
        }
        if let Some(r) = o.budget_radius {
            self.budget.max_radius = r;
        }
        if let Some(g) = &o.grid {
            self.lemma.grid = g.clone();
            self.ukmap.sweep.grid = g.clone();
        }
        if o.wrong_sign {
            self.lemma.wrong_sign = true;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_schema() {
        let cfg = RunConfig::default();
        assert_eq!(cfg.schema_version, 1);
        assert_eq!(cfg.lemma.grid.len(), 6);
        assert_eq!(cfg.ukmap.sweep.grid.len(), 11);
        assert!(cfg.validate().is_ok());
        assert!(RunConfig::from_json(r#"{"schema_version": 2}"#).is_err());
        assert!(matches!(RunConfig::from_json(r#"{"schema_version": 1, "sed": 3}"#), Err(Error::Parse(_))));
        let cfg = RunConfig::from_json(r#"{"schema_version": 1, "seed": 7, "lemma": {"configs": 3}}"#).unwrap();
        assert_eq!(cfg.lemma.configs, 3);
        assert_eq!(cfg.lemma.genus, 2);
        assert_eq!(cfg.minimizer, SolverConfig::minimization());
    }

    #[test]
    fn overrides() {
        let mut cfg = RunConfig::default();
        cfg.apply(&Overrides {
            seed: Some(5),
            grid: Some(vec![1.0]),
            budget_radius: Some(20),
            ..Default::default()
        });
        assert_eq!(cfg.seed, Some(5));
        assert_eq!(cfg.lemma.grid, vec![1.0]);
        assert_eq!(cfg.budget.max_radius, 20);
        cfg.slack = -1.0;
        assert!(cfg.validate().is_err());
    }
}
