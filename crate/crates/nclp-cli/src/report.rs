//! Machine-readable reports: JSON for the full record, CSV for the per-case
//! table. Files are written atomically (temp file + rename).

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::config::ExperimentConfig;

/// One checked assertion.
#[derive(Clone, Debug, Serialize)]
pub struct CaseRecord {
    pub experiment: String,
    /// Short machine-friendly label of the check.
    pub case: String,
    /// Compact rendering of the inputs sufficient to reproduce the case.
    pub inputs: String,
    /// Measured quantity (bound, ratio or error, depending on the case).
    pub value: f64,
    /// The limit the measured quantity is compared against.
    pub allowed: f64,
    pub pass: bool,
}

impl CaseRecord {
    pub fn new(
        experiment: &str,
        case: impl Into<String>,
        inputs: impl Into<String>,
        value: f64,
        allowed: f64,
        pass: bool,
    ) -> Self {
        CaseRecord {
            experiment: experiment.to_string(),
            case: case.into(),
            inputs: inputs.into(),
            value,
            allowed,
            pass,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub total: usize,
    pub violations: usize,
    /// Largest `value / allowed` over the comparison cases.
    pub max_ratio: f64,
    pub wall_clock_secs: f64,
    /// Count of cases that failed to converge numerically (reported with
    /// exit code 3 when nonzero).
    pub non_convergences: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: u32,
    pub config: ExperimentConfig,
    pub cases: Vec<CaseRecord>,
    pub summary: Summary,
}

impl Report {
    pub fn assemble(
        config: ExperimentConfig,
        cases: Vec<CaseRecord>,
        wall_clock_secs: f64,
        non_convergences: usize,
    ) -> Self {
        let violations = cases.iter().filter(|c| !c.pass).count();
        let max_ratio = cases
            .iter()
            .filter(|c| c.allowed.is_finite() && c.allowed > 0.0)
            .map(|c| c.value / c.allowed)
            .fold(0.0f64, f64::max);
        let summary = Summary {
            total: cases.len(),
            violations,
            max_ratio,
            wall_clock_secs,
            non_convergences,
        };
        Report { schema: crate::config::SCHEMA_VERSION, config, cases, summary }
    }

    pub fn write(&self, dir: &Path) -> anyhow::Result<()> {
        std::fs::create_dir_all(dir)?;
        let json = serde_json::to_string_pretty(self)?;
        write_atomic(&dir.join("report.json"), json.as_bytes())?;
        let mut csv = String::from("experiment,case,inputs,value,allowed,pass\n");
        for c in &self.cases {
            // inputs are generated without commas or quotes
            csv.push_str(&format!(
                "{},{},{},{:.12e},{:.12e},{}\n",
                c.experiment, c.case, c.inputs, c.value, c.allowed, c.pass
            ));
        }
        write_atomic(&dir.join("cases.csv"), csv.as_bytes())?;
        Ok(())
    }

    pub fn print_table(&self) {
        println!(
            "{:<14} {:<32} {:>14} {:>14}  pass",
            "experiment", "case", "value", "allowed"
        );
        for c in &self.cases {
            println!(
                "{:<14} {:<32} {:>14.6e} {:>14.6e}  {}",
                c.experiment,
                c.case,
                c.value,
                c.allowed,
                if c.pass { "ok" } else { "FAIL" }
            );
            if !c.pass {
                println!("    inputs: {}", c.inputs);
            }
        }
        println!(
            "summary: {} cases, {} violations, max ratio {:.4}, {:.1}s",
            self.summary.total,
            self.summary.violations,
            self.summary.max_ratio,
            self.summary.wall_clock_secs
        );
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}
