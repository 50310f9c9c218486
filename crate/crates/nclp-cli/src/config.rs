//! Experiment configuration: JSON with a versioned schema. Identical config
//! and seed reproduce bit-identical reports (trials draw from per-index
//! counter-based streams and are reduced in index order).

use serde::{Deserialize, Serialize};

use nclp::schatten::PNorm;

pub const SCHEMA_VERSION: u32 = 1;

/// An exponent in the config: a number, or the string `"inf"`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PValue {
    Num(f64),
    Name(String),
}

impl PValue {
    pub fn to_pnorm(&self) -> anyhow::Result<PNorm> {
        match self {
            PValue::Num(v) => Ok(PNorm::new(*v).map_err(|e| anyhow::anyhow!("{e}"))?),
            PValue::Name(s) if s == "inf" || s == "infinity" => Ok(PNorm::Infinity),
            PValue::Name(s) => anyhow::bail!("unknown exponent {s:?} (use a number or \"inf\")"),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: u32,
    /// Matrix dimension for the randomized experiments.
    pub dim: usize,
    pub p_grid: Vec<PValue>,
    pub theta_grid: Vec<f64>,
    /// Weight exponents for the sandwich couples: `d_i = d^{alpha_i}`.
    pub alpha0: f64,
    pub alpha1: f64,
    pub trials: usize,
    pub seed: u64,
    /// Budget prefactor: the sandwich budget is
    /// `budget_scale * max(p, 2) * max(p, p')`.
    pub budget_scale: f64,
    /// Slack added to certified upper bounds before comparison.
    pub cert_slack: f64,
    /// Relative agreement required between quadrature and closed form.
    pub quadrature_rel: f64,
    /// Restrict the multipliers experiment to one family (by name).
    pub family: Option<String>,
    /// Report directory; the --out flag takes precedence.
    pub out_dir: Option<std::path::PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            schema: SCHEMA_VERSION,
            dim: 6,
            p_grid: vec![
                PValue::Num(1.0),
                PValue::Num(1.5),
                PValue::Num(2.0),
                PValue::Num(4.0),
                PValue::Name("inf".into()),
            ],
            theta_grid: vec![0.1, 0.3, 0.5, 0.7, 0.9],
            alpha0: 1.0,
            alpha1: 0.0,
            trials: 100,
            seed: 7,
            budget_scale: 8.0,
            cert_slack: 1e-6,
            quadrature_rel: 1e-6,
            family: None,
            out_dir: None,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &std::path::Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| anyhow::anyhow!("cannot read config {}: {e}", path.display()))?;
        let cfg: ExperimentConfig = serde_json::from_str(&text)
            .map_err(|e| anyhow::anyhow!("invalid config {}: {e}", path.display()))?;
        if cfg.schema != SCHEMA_VERSION {
            anyhow::bail!("unsupported config schema {} (expected {SCHEMA_VERSION})", cfg.schema);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if self.dim == 0 || self.dim > 128 {
            anyhow::bail!("dim must lie in 1..=128");
        }
        for t in &self.theta_grid {
            if !(*t >= 0.0 && *t <= 1.0) {
                anyhow::bail!("theta grid entries must lie in [0, 1], got {t}");
            }
        }
        for p in &self.p_grid {
            p.to_pnorm()?;
        }
        if self.trials == 0 {
            anyhow::bail!("trials must be positive");
        }
        Ok(())
    }

    pub fn pnorms(&self) -> Vec<PNorm> {
        self.p_grid.iter().map(|p| p.to_pnorm().expect("validated")).collect()
    }

    /// Reduced-cost variant for `--quick`.
    pub fn quick(mut self) -> Self {
        self.trials = (self.trials / 10).max(10);
        self
    }
}
