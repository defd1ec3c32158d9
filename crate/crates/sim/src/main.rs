use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use broadbeam::acceptance::{grid_criteria, hard_invariants, static_criteria, Criterion, Report};
use broadbeam::config::{load_preset, load_scenario, LoadedScenario};
use broadbeam::experiment::{
    self, execute, execute_all, reference_matrix, BandName, MatrixResults, RunSpec,
};
use broadbeam::output::{fmt_num, write_cdf, write_coverage, write_pattern, write_reflection};
use broadbeam_core::beamforming::{dbf_weights, DualPolWeights};
use broadbeam_core::em::Material;
use broadbeam_core::pg::{total_transmit_energy, CaseConfig, CaseId};
use broadbeam_core::scenario::{Environment, CARRIER_HZ};
use broadbeam_core::{wavelength, Complex64};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "broadbeam",
    version,
    about = "Dual-polarized broad-beam coverage simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep cases over the service area and write coverage/CDF files.
    Run(RunArgs),
    /// Reflection coefficients versus incidence angle.
    Reflection(ReflectionArgs),
    /// Azimuth cut of the total radiated power of an array.
    Pattern(PatternArgs),
    /// Coverage map of one case, band and environment.
    Coverage(SingleArgs),
    /// Empirical CDF (in dB) of one case, band and environment.
    Cdf(SingleArgs),
    /// Transmit energy per case.
    Energy(SourceArgs),
}

#[derive(Args, Clone)]
struct SourceArgs {
    /// Built-in scenario: case1, case2, case3 or case4.
    #[arg(long, conflicts_with = "scenario")]
    preset: Option<String>,
    /// Scenario file (TOML).
    #[arg(long)]
    scenario: Option<PathBuf>,
}

impl SourceArgs {
    fn load(&self) -> Result<Option<LoadedScenario>> {
        Ok(match (&self.preset, &self.scenario) {
            (Some(p), _) => Some(load_preset(p)?),
            (None, Some(path)) => Some(load_scenario(path)?),
            (None, None) => None,
        })
    }

    fn load_required(&self) -> Result<LoadedScenario> {
        self.load()?
            .context("either --preset or --scenario is required")
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum EnvName {
    Los,
    Concrete,
    Metal,
}

impl From<EnvName> for Environment {
    fn from(e: EnvName) -> Self {
        match e {
            EnvName::Los => Environment::Los,
            EnvName::Concrete => Environment::Concrete,
            EnvName::Metal => Environment::Metal,
        }
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Case number; repeatable. Defaults to the scenario's own case.
    #[arg(long = "case", value_parser = clap::value_parser!(u8).range(1..=4))]
    cases: Vec<u8>,
    /// Band; repeatable. Defaults to nb.
    #[arg(long = "band", value_enum)]
    bands: Vec<BandName>,
    /// Environment (walls at the area edges); repeatable. Defaults to the
    /// scenario's own reflectors.
    #[arg(long = "env", value_enum)]
    envs: Vec<EnvName>,
    /// Grid step in metres.
    #[arg(long)]
    grid_res: Option<f64>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Seed for the receiver points of the invariant checks.
    #[arg(long)]
    seed: Option<u64>,
    /// Run the whole study and write the acceptance report.
    #[arg(long, conflicts_with_all = ["preset", "scenario", "cases", "bands", "envs"])]
    all: bool,
}

#[derive(Args)]
struct SingleArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long = "case", value_parser = clap::value_parser!(u8).range(1..=4))]
    case: Option<u8>,
    #[arg(long, value_enum, default_value = "nb")]
    band: BandName,
    #[arg(long, value_enum)]
    env: Option<EnvName>,
    #[arg(long)]
    grid_res: Option<f64>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReflectionArgs {
    /// Material name; repeatable. Defaults to concrete and metal.
    #[arg(long = "material")]
    materials: Vec<String>,
    /// Scenario file providing extra materials and the carrier.
    #[arg(long)]
    scenario: Option<PathBuf>,
    #[arg(long, default_value_t = 0.1)]
    step_deg: f64,
    /// Output file, or directory when several materials are given;
    /// stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum WeightKind {
    /// Broad-beam weights.
    Dbf,
    /// All-ones weights on both polarizations.
    Uniform,
}

#[derive(Args)]
struct PatternArgs {
    #[arg(long, default_value_t = 8)]
    k: usize,
    #[arg(long, value_enum, default_value = "dbf")]
    weights: WeightKind,
    /// Element spacing in metres; half a wavelength when absent.
    #[arg(long)]
    spacing: Option<f64>,
    #[arg(long, default_value_t = CARRIER_HZ)]
    freq: f64,
    #[arg(long, default_value_t = 0.0)]
    theta_deg: f64,
    #[arg(long, default_value_t = 3601)]
    samples: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(experiment::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn single_spec(args: &SingleArgs) -> Result<RunSpec> {
    let mut loaded = args.source.load_required()?;
    if let Some(r) = args.grid_res {
        loaded = loaded.with_resolution(r);
    }
    if let Some(env) = args.env {
        loaded = loaded.with_environment(env.into());
    }
    let case = match args.case {
        Some(n) => CaseId::from_number(n).expect("range checked"),
        None => loaded.case,
    };
    RunSpec::new(&loaded, case, args.band)
}

fn cmd_coverage(args: &SingleArgs) -> Result<()> {
    let r = execute(single_spec(args)?)?;
    write_coverage(output(args.out.as_deref())?, &r.grid)?;
    Ok(())
}

fn cmd_cdf(args: &SingleArgs) -> Result<()> {
    let r = execute(single_spec(args)?)?;
    write_cdf(output(args.out.as_deref())?, &r.cdf_db)?;
    Ok(())
}

fn cmd_reflection(args: &ReflectionArgs) -> Result<()> {
    if !(args.step_deg > 0.0 && args.step_deg <= 90.0) {
        bail!("--step-deg must be in (0, 90]");
    }
    let (freq, registry) = match &args.scenario {
        Some(p) => {
            let s = load_scenario(p)?;
            (s.scenario.carrier_hz, s.materials)
        }
        None => (CARRIER_HZ, Material::registry().to_vec()),
    };
    let names: Vec<String> = if args.materials.is_empty() {
        vec!["concrete".into(), "metal".into()]
    } else {
        args.materials.clone()
    };
    let mats = names
        .iter()
        .map(|n| {
            registry
                .iter()
                .find(|m| m.name == n.as_str())
                .with_context(|| format!("unknown material '{n}'"))
        })
        .collect::<Result<Vec<_>>>()?;
    if mats.len() == 1 {
        write_reflection(output(args.out.as_deref())?, mats[0], freq, args.step_deg)?;
        return Ok(());
    }
    let dir = args
        .out
        .as_deref()
        .context("--out <dir> is required for several materials")?;
    for m in mats {
        let path = dir.join(format!("reflection_{}.csv", m.name));
        write_reflection(
            BufWriter::new(experiment::create(&path)?),
            m,
            freq,
            args.step_deg,
        )?;
    }
    Ok(())
}

fn pattern_weights(kind: WeightKind, k: usize) -> Result<DualPolWeights> {
    Ok(match kind {
        WeightKind::Dbf => dbf_weights(k)?,
        WeightKind::Uniform => {
            let ones = vec![Complex64::new(1.0, 0.0); k];
            DualPolWeights::new(ones.clone(), ones)?
        }
    })
}

fn cmd_pattern(args: &PatternArgs) -> Result<()> {
    let lam = wavelength(args.freq);
    let w = pattern_weights(args.weights, args.k)?;
    let spacing = args.spacing.unwrap_or(lam / 2.0);
    write_pattern(
        output(args.out.as_deref())?,
        &w,
        spacing,
        lam,
        args.theta_deg.to_radians(),
        args.samples,
    )?;
    Ok(())
}

fn energy_rows(configs: &[CaseConfig]) -> Vec<[String; 5]> {
    configs
        .iter()
        .map(|c| {
            [
                c.case.number().to_string(),
                c.slots().to_string(),
                c.scenario.total_antennas().to_string(),
                fmt_num(total_transmit_energy(c)),
                fmt_num(2.0 * c.scenario.total_antennas() as f64),
            ]
        })
        .collect()
}

fn write_energy<W: Write>(out: W, configs: &[CaseConfig]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(["case", "slots", "total_antennas", "energy", "expected"])?;
    for row in energy_rows(configs) {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

fn reference_configs() -> Result<Vec<CaseConfig>> {
    CaseId::ALL
        .iter()
        .map(|&c| Ok(load_preset(&format!("case{}", c.number()))?.case_config(c)?))
        .collect()
}

fn cmd_energy(args: &SourceArgs) -> Result<()> {
    let configs = match args.load()? {
        Some(s) => vec![s.case_config(s.case)?],
        None => reference_configs()?,
    };
    write_energy(io::stdout().lock(), &configs)
}

fn check_invariants(specs: &[RunSpec], seed: u64) -> Vec<String> {
    let mut failures = Vec::new();
    for spec in specs {
        for f in hard_invariants(&spec.config, seed) {
            failures.push(format!("{}: {f}", spec.stem()));
        }
    }
    failures
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut f = BufWriter::new(experiment::create(path)?);
    serde_json::to_writer_pretty(&mut f, value)?;
    f.write_all(b"\n")?;
    Ok(())
}

fn run_all(args: &RunArgs) -> Result<ExitCode> {
    let start = Instant::now();
    let specs = reference_matrix(args.grid_res)?;
    let failures = check_invariants(&specs, args.seed.unwrap_or(0));
    let results: MatrixResults = execute_all(specs)?;
    experiment::write_all(&results, &args.out)?;

    let lam = wavelength(CARRIER_HZ);
    let dbf = dbf_weights(8)?;
    write_pattern(
        BufWriter::new(experiment::create(&args.out.join("pattern.csv"))?),
        &dbf,
        lam / 2.0,
        lam,
        0.0,
        3601,
    )?;
    for m in [Material::concrete(), Material::metal()] {
        let path = args.out.join(format!("reflection_{}.csv", m.name));
        write_reflection(
            BufWriter::new(experiment::create(&path)?),
            &m,
            CARRIER_HZ,
            0.1,
        )?;
    }
    write_energy(
        BufWriter::new(experiment::create(&args.out.join("energy.csv"))?),
        &reference_configs()?,
    )?;

    let mut criteria = static_criteria();
    criteria.extend(grid_criteria(&results)?);
    let secs = start.elapsed().as_secs_f64();
    criteria.push(Criterion {
        id: 14,
        name: "full study runtime",
        passed: secs < 600.0,
        detail: format!("{secs:.1} s for one run; byte identity is checked by the acceptance test"),
    });
    for c in &criteria {
        println!("{}", c.line());
    }
    write_json(&args.out.join("acceptance.json"), &Report::new(criteria))?;
    report_failures(&failures)
}

fn report_failures(failures: &[String]) -> Result<ExitCode> {
    if failures.is_empty() {
        return Ok(ExitCode::SUCCESS);
    }
    for f in failures {
        eprintln!("invariant violated: {f}");
    }
    Ok(ExitCode::from(2))
}

fn cmd_run(args: &RunArgs) -> Result<ExitCode> {
    if let Some(r) = args.grid_res {
        if !(r.is_finite() && r > 0.0) {
            bail!("--grid-res must be > 0");
        }
    }
    if args.all {
        return run_all(args);
    }
    let mut loaded = args.source.load_required()?;
    if let Some(r) = args.grid_res {
        loaded = loaded.with_resolution(r);
    }
    let seed = args.seed.unwrap_or(loaded.seed);
    let cases: Vec<CaseId> = if args.cases.is_empty() {
        vec![loaded.case]
    } else {
        args.cases
            .iter()
            .map(|&n| CaseId::from_number(n).expect("range checked"))
            .collect()
    };
    let bands = if args.bands.is_empty() {
        vec![BandName::Nb]
    } else {
        args.bands.clone()
    };
    let scenarios: Vec<LoadedScenario> = if args.envs.is_empty() {
        vec![loaded]
    } else {
        args.envs
            .iter()
            .map(|&e| loaded.with_environment(e.into()))
            .collect()
    };
    let mut specs = Vec::new();
    for s in &scenarios {
        for &case in &cases {
            for &band in &bands {
                specs.push(RunSpec::new(s, case, band)?);
            }
        }
    }
    let failures = check_invariants(&specs, seed);
    let results = execute_all(specs)?;
    for path in experiment::write_all(&results, &args.out)? {
        println!("{}", path.display());
    }
    report_failures(&failures)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Reflection(a) => cmd_reflection(a).map(|_| ExitCode::SUCCESS),
        Command::Pattern(a) => cmd_pattern(a).map(|_| ExitCode::SUCCESS),
        Command::Coverage(a) => cmd_coverage(a).map(|_| ExitCode::SUCCESS),
        Command::Cdf(a) => cmd_cdf(a).map(|_| ExitCode::SUCCESS),
        Command::Energy(a) => cmd_energy(a).map(|_| ExitCode::SUCCESS),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
