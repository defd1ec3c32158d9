//! Runs of (case, band, environment) combinations and their artifacts.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::Context;
use broadbeam_core::analytics::{build_cdf, summary_quantiles, EmpiricalCdf};
use broadbeam_core::pg::{Band, CaseConfig, CaseId, PGGrid};
use broadbeam_core::scenario::Environment;
use broadbeam_core::to_db;
use serde::Serialize;

use crate::config::{environment_label, load_preset, LoadedScenario};
use crate::output::{write_cdf, write_coverage};
use crate::sweep::par_sweep;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BandName {
    Nb,
    Wb,
}

impl BandName {
    pub const ALL: [BandName; 2] = [BandName::Nb, BandName::Wb];

    pub fn name(self) -> &'static str {
        match self {
            BandName::Nb => "nb",
            BandName::Wb => "wb",
        }
    }
}

/// One sweep to perform.
#[derive(Debug, Clone)]
pub struct RunSpec {
    pub case: CaseId,
    pub band_name: BandName,
    pub env: String,
    pub config: CaseConfig,
    pub band: Band,
}

impl RunSpec {
    pub fn new(
        loaded: &LoadedScenario,
        case: CaseId,
        band_name: BandName,
    ) -> anyhow::Result<RunSpec> {
        let config = loaded
            .case_config(case)
            .with_context(|| format!("case {} does not fit the scenario", case.number()))?;
        let band = match band_name {
            BandName::Nb => Band::Narrowband,
            BandName::Wb => Band::Wideband(loaded.subcarriers()?),
        };
        Ok(RunSpec {
            case,
            band_name,
            env: environment_label(&loaded.scenario),
            config,
            band,
        })
    }

    /// File-name stem, e.g. `case3_wb_metal`.
    pub fn stem(&self) -> String {
        format!(
            "case{}_{}_{}",
            self.case.number(),
            self.band_name.name(),
            self.env
        )
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub spec: RunSpec,
    pub grid: PGGrid,
    /// CDF of the grid in dB.
    pub cdf_db: EmpiricalCdf,
}

pub fn execute(spec: RunSpec) -> anyhow::Result<RunResult> {
    log::info!("sweeping {}", spec.stem());
    let grid =
        par_sweep(&spec.config, &spec.band).with_context(|| format!("sweep {}", spec.stem()))?;
    let cdf_db = build_cdf(&grid.pg)?.map_monotone(to_db);
    Ok(RunResult { spec, grid, cdf_db })
}

/// The full study: cases 1–2 on the collocated preset and 3–4 on the
/// distributed one, both bands, all three environments.
pub fn reference_matrix(resolution: Option<f64>) -> anyhow::Result<Vec<RunSpec>> {
    let mut specs = Vec::new();
    for case in CaseId::ALL {
        let mut base = load_preset(&format!("case{}", case.number()))?;
        if let Some(r) = resolution {
            base = base.with_resolution(r);
        }
        for band in BandName::ALL {
            for env in Environment::ALL {
                specs.push(RunSpec::new(&base.with_environment(env), case, band)?);
            }
        }
    }
    Ok(specs)
}

/// Results indexed by (case, band, environment label).
#[derive(Debug, Clone, Default)]
pub struct MatrixResults {
    pub runs: Vec<RunResult>,
}

impl MatrixResults {
    pub fn get(&self, case: CaseId, band: BandName, env: Environment) -> Option<&RunResult> {
        self.runs
            .iter()
            .find(|r| r.spec.case == case && r.spec.band_name == band && r.spec.env == env.name())
    }

    pub fn cdf(
        &self,
        case: CaseId,
        band: BandName,
        env: Environment,
    ) -> anyhow::Result<&EmpiricalCdf> {
        self.get(case, band, env)
            .map(|r| &r.cdf_db)
            .with_context(|| {
                format!(
                    "missing run case{} {} {}",
                    case.number(),
                    band.name(),
                    env.name()
                )
            })
    }
}

pub fn execute_all(specs: Vec<RunSpec>) -> anyhow::Result<MatrixResults> {
    let runs = specs
        .into_iter()
        .map(execute)
        .collect::<anyhow::Result<Vec<_>>>()?;
    Ok(MatrixResults { runs })
}

#[derive(Debug, Serialize)]
pub struct RunSummary {
    pub case: u8,
    pub band: BandName,
    pub environment: String,
    pub samples: usize,
    pub nudged_samples: usize,
    /// (percent, PG in dB)
    pub quantiles_db: Vec<(u32, f64)>,
}

impl RunResult {
    pub fn summary(&self) -> RunSummary {
        RunSummary {
            case: self.spec.case.number(),
            band: self.spec.band_name,
            environment: self.spec.env.clone(),
            samples: self.grid.len(),
            nudged_samples: self.grid.warnings.len(),
            quantiles_db: summary_quantiles(&self.cdf_db).to_vec(),
        }
    }

    /// Writes `coverage_<stem>.csv` and `cdf_<stem>.csv`.
    pub fn write(&self, dir: &Path) -> anyhow::Result<Vec<PathBuf>> {
        let stem = self.spec.stem();
        let coverage = dir.join(format!("coverage_{stem}.csv"));
        let cdf = dir.join(format!("cdf_{stem}.csv"));
        write_coverage(BufWriter::new(create(&coverage)?), &self.grid)?;
        write_cdf(BufWriter::new(create(&cdf)?), &self.cdf_db)?;
        Ok(vec![coverage, cdf])
    }
}

pub fn create(path: &Path) -> anyhow::Result<File> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).with_context(|| format!("create {}", parent.display()))?;
    }
    File::create(path).with_context(|| format!("create {}", path.display()))
}

/// Writes every run plus `summary.json`.
pub fn write_all(results: &MatrixResults, dir: &Path) -> anyhow::Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for r in &results.runs {
        files.extend(r.write(dir)?);
    }
    let summary: Vec<RunSummary> = results.runs.iter().map(RunResult::summary).collect();
    let path = dir.join("summary.json");
    let mut f = BufWriter::new(create(&path)?);
    serde_json::to_writer_pretty(&mut f, &summary)?;
    std::io::Write::write_all(&mut f, b"\n")?;
    files.push(path);
    Ok(files)
}
