use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use fhlab::asymptotics::{predict_fh, predict_szego};
use fhlab::determinants::{hankel_logdet, toeplitz_logdet, weighted_moments, MomentProblem};
use fhlab::ensembles::{cbeta_sample, gue_sample, lue_sample, ChainOptions};
use fhlab::error::{FhError, Result};
use fhlab::harness::observables::{find_preset, presets, run_physics, write_physics_csv, PhysicsCase};
use fhlab::harness::{catalog, derive_seed, resolve_tier, run_case, write_csv, CaseReport, CaseSpec, RunOptions};
use fhlab::precision::{PrecisionContext, Tier};
use fhlab::symbols::{symbol_fourier, SymbolSpec, DEFAULT_SMOOTH_ORDER};

#[derive(Parser)]
#[command(name = "fhlab", version, about = "Exact determinants against their large-size asymptotics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Builtin case id (repeatable; "all" selects every builtin case).
    #[arg(long, global = true)]
    case: Vec<String>,
    /// JSON configuration file (repeatable).
    #[arg(long, global = true)]
    config: Vec<PathBuf>,
    /// Output directory; results go to stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    precision: Option<PrecisionArg>,
    /// Base seed for Monte Carlo runs.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Size grid override (repeatable).
    #[arg(long, global = true)]
    n: Vec<usize>,
    /// Record wall-clock seconds in the CSV (makes output run-dependent).
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum PrecisionArg {
    Double,
    Extended,
}

#[derive(Clone, Copy, ValueEnum)]
enum EnsembleArg {
    Cbeta,
    Gue,
    Lue,
}

#[derive(Subcommand)]
enum Command {
    /// Large-size prediction for a symbol or a case.
    Predict,
    /// Exact finite-size value for a symbol, a moment problem or a case.
    Exact,
    /// Run cases and compare exact against predicted.
    Verify,
    /// Draw eigenvalue samples.
    Sample {
        #[arg(long, value_enum)]
        ensemble: EnsembleArg,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 2.0)]
        beta: f64,
        #[arg(long, default_value_t = 0.0)]
        aprime: f64,
        #[arg(long, default_value_t = 1)]
        thin: usize,
    },
    /// Tabulate a physical observable.
    Physics,
    /// List builtin cases; with --out, write each as a JSON config.
    ListCases,
}

impl Cli {
    fn tier(&self) -> Option<Tier> {
        match self.precision {
            Some(PrecisionArg::Double) => Some(Tier::Double),
            Some(PrecisionArg::Extended) => Some(Tier::Extended),
            None => Tier::parse(&std::env::var("FHLAB_PRECISION").unwrap_or_default()),
        }
    }

    fn ctx(&self) -> PrecisionContext {
        PrecisionContext::with_tier(self.tier().unwrap_or(Tier::Double))
    }
}

fn read_json(path: &Path) -> Result<Value> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

fn select_cases(cli: &Cli) -> Result<Vec<CaseSpec>> {
    let mut cases = Vec::new();
    for id in &cli.case {
        if id == "all" {
            cases.extend(catalog::builtin());
        } else {
            cases.push(catalog::find(id).ok_or_else(|| FhError::UnknownCase(id.clone()))?);
        }
    }
    for p in &cli.config {
        cases.push(CaseSpec::from_json(&fs::read_to_string(p)?)?);
    }
    if cli.case.is_empty() && cli.config.is_empty() {
        cases = catalog::builtin();
    }
    if !cli.n.is_empty() {
        for c in &mut cases {
            c.n = cli.n.clone();
        }
    }
    Ok(cases)
}

fn emit(out: &Option<PathBuf>, name: &str, bytes: &[u8]) -> Result<()> {
    match out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            fs::write(dir.join(name), bytes)?;
        }
        None => io::stdout().write_all(bytes)?,
    }
    Ok(())
}

fn pretty(v: &impl serde::Serialize) -> Result<Vec<u8>> {
    let mut s = serde_json::to_vec_pretty(v)?;
    s.push(b'\n');
    Ok(s)
}

fn verify(cli: &Cli) -> Result<bool> {
    let cases = select_cases(cli)?;
    let opts = RunOptions { precision: cli.tier(), seed: cli.seed, timings: cli.timings };
    let reports: Vec<CaseReport> = {
        use rayon::prelude::*;
        cases.par_iter().map(|c| run_case(c, &opts)).collect::<Result<Vec<_>>>()?
    };
    let mut csv = Vec::new();
    write_csv(&reports, &mut csv)?;
    emit(&cli.out, "results.csv", &csv)?;
    let summary: Vec<Value> = reports
        .iter()
        .map(|r| {
            json!({
                "case": r.id,
                "formula": r.formula,
                "kind": r.kind,
                "precision": r.precision,
                "seed": r.seed,
                "tolerance": r.tolerance,
                "passed": r.passed,
                "verdict": r.verdict,
                "fit": r.fit,
                "records": r.records,
            })
        })
        .collect();
    if cli.out.is_some() {
        emit(&cli.out, "summary.json", &pretty(&summary)?)?;
    }
    for r in &reports {
        eprintln!("{} {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.id, r.verdict);
    }
    Ok(reports.iter().all(|r| r.passed))
}

enum Target {
    Symbol(SymbolSpec),
    Moments(MomentProblem),
    Case(CaseSpec),
}

/// A config is a case (has "id"), a symbol (under "symbol") or a moment
/// problem (under "moment_problem").
fn target(cli: &Cli) -> Result<Target> {
    if let Some(id) = cli.case.first() {
        return catalog::find(id).map(Target::Case).ok_or_else(|| FhError::UnknownCase(id.clone()));
    }
    let path = cli.config.first().ok_or_else(|| FhError::Invalid("--case or --config required".into()))?;
    let v = read_json(path)?;
    if v.get("id").is_some() {
        let c = CaseSpec::from_json(&v.to_string())?;
        return Ok(Target::Case(c));
    }
    if let Some(s) = v.get("symbol") {
        return Ok(Target::Symbol(serde_json::from_value(s.clone())?));
    }
    if let Some(m) = v.get("moment_problem") {
        return Ok(Target::Moments(serde_json::from_value(m.clone())?));
    }
    Err(FhError::Invalid(format!("{}: expected a case, \"symbol\" or \"moment_problem\"", path.display())))
}

fn sizes(cli: &Cli) -> Result<Vec<usize>> {
    if cli.n.is_empty() {
        Err(FhError::Invalid("--n required".into()))
    } else {
        Ok(cli.n.clone())
    }
}

fn case_side(cli: &Cli, mut c: CaseSpec, exact: bool) -> Result<Value> {
    if !cli.n.is_empty() {
        c.n = cli.n.clone();
    }
    let r = run_case(&c, &RunOptions { precision: cli.tier(), seed: cli.seed, timings: false })?;
    let rows: Vec<Value> = r
        .records
        .iter()
        .map(|x| {
            if exact {
                json!({"n": x.n, "log_modulus": x.log_exact, "phase": x.phase_exact, "error": x.error})
            } else {
                json!({"n": x.n, "log_value": x.log_pred, "phase": x.phase_pred, "degenerate": x.degenerate})
            }
        })
        .collect();
    Ok(json!({"case": r.id, "formula": r.formula, "values": rows}))
}

fn predict(cli: &Cli) -> Result<Value> {
    match target(cli)? {
        Target::Symbol(spec) => {
            let sym = spec.build(DEFAULT_SMOOTH_ORDER)?;
            let p = if sym.singularities.is_empty() { predict_szego(&sym.smooth_log)? } else { predict_fh(&sym)? };
            let values: Vec<Value> = cli
                .n
                .iter()
                .map(|&n| {
                    let z = p.log_at(n as f64);
                    json!({"n": n, "log_value": z.map(|z| z.re), "phase": z.map(|z| z.im)})
                })
                .collect();
            Ok(json!({"prediction": p, "values": values}))
        }
        Target::Case(c) => case_side(cli, c, false),
        Target::Moments(_) => Err(FhError::Invalid("predict takes a symbol or a case".into())),
    }
}

fn exact(cli: &Cli) -> Result<Value> {
    let ctx = cli.ctx();
    match target(cli)? {
        Target::Symbol(spec) => {
            let mut values = Vec::new();
            for n in sizes(cli)? {
                let sym = spec.build(DEFAULT_SMOOTH_ORDER.max(2 * n))?;
                let d = toeplitz_logdet(&symbol_fourier(&sym, n)?, n, ctx)?;
                values.push(json!({"n": n, "log_modulus": d.log_modulus, "phase": d.phase}));
            }
            Ok(json!({"values": values}))
        }
        Target::Moments(p) => {
            let ns = sizes(cli)?;
            let nmax = *ns.iter().max().expect("non-empty");
            let table = weighted_moments(&p, 2 * nmax.max(1) - 2, ctx)?;
            if cli.out.is_some() {
                let mut csv = Vec::new();
                table.write_csv(&mut csv)?;
                emit(&cli.out, "moments.csv", &csv)?;
            }
            let mut values = Vec::new();
            for n in ns {
                let d = hankel_logdet(&table, n, ctx)?;
                values.push(json!({"n": n, "log_modulus": d.log_modulus, "phase": d.phase}));
            }
            Ok(json!({"values": values}))
        }
        Target::Case(c) => case_side(cli, c, true),
    }
}

fn sample(cli: &Cli, ensemble: EnsembleArg, samples: usize, beta: f64, aprime: f64, thin: usize) -> Result<()> {
    let n = *sizes(cli)?.first().expect("non-empty");
    let label = match ensemble {
        EnsembleArg::Cbeta => "cbeta",
        EnsembleArg::Gue => "gue",
        EnsembleArg::Lue => "lue",
    };
    let seed = derive_seed(cli.seed.unwrap_or(0), label, n as u64);
    let batch = match ensemble {
        EnsembleArg::Cbeta => {
            let sweeps = (samples * thin * 4).div_ceil(3);
            cbeta_sample(n, beta, ChainOptions { sweeps, thin, seed })?
        }
        EnsembleArg::Gue => gue_sample(n, samples, seed)?,
        EnsembleArg::Lue => lue_sample(n, aprime, samples, seed)?,
    };
    let mut csv = Vec::new();
    batch.write_csv(&mut csv)?;
    emit(&cli.out, "samples.csv", &csv)
}

fn physics(cli: &Cli) -> Result<()> {
    let mut cases: Vec<PhysicsCase> = Vec::new();
    for id in &cli.case {
        if id == "all" {
            cases.extend(presets());
        } else {
            cases.push(find_preset(id).ok_or_else(|| FhError::UnknownCase(id.clone()))?);
        }
    }
    for p in &cli.config {
        cases.push(serde_json::from_str(&fs::read_to_string(p)?)?);
    }
    if cases.is_empty() {
        return Err(FhError::Invalid("--case or --config required".into()));
    }
    for mut c in cases {
        if !cli.n.is_empty() {
            c.n = cli.n.clone();
        }
        let tier = cli.tier().or(c.precision).unwrap_or(Tier::Double);
        let report = run_physics(&c, tier)?;
        let mut csv = Vec::new();
        write_physics_csv(&report, &mut csv)?;
        emit(&cli.out, &format!("{}.csv", c.id), &csv)?;
        if cli.out.is_some() {
            emit(&cli.out, &format!("{}.json", c.id), &pretty(&report)?)?;
        }
    }
    Ok(())
}

fn list_cases(cli: &Cli) -> Result<()> {
    let all = catalog::builtin();
    if let Some(dir) = &cli.out {
        fs::create_dir_all(dir)?;
        for c in &all {
            fs::write(dir.join(format!("{}.json", c.id)), pretty(c)?)?;
        }
        let pdir = dir.join("physics");
        fs::create_dir_all(&pdir)?;
        for p in presets() {
            fs::write(pdir.join(format!("{}.json", p.id)), pretty(&p)?)?;
        }
        return Ok(());
    }
    let mut out = io::stdout().lock();
    for c in &all {
        let tier = resolve_tier(c, &RunOptions::default());
        writeln!(out, "{}\t{}\t{}\t{}\t{}", c.id, c.setup.name(), c.formula, tier.as_str(), c.description)?;
    }
    for p in presets() {
        writeln!(out, "{}\tphysics\t-\t-\tphysics preset", p.id)?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Verify => verify(cli),
        Command::Predict => {
            emit(&cli.out, "prediction.json", &pretty(&predict(cli)?)?)?;
            Ok(true)
        }
        Command::Exact => {
            emit(&cli.out, "exact.json", &pretty(&exact(cli)?)?)?;
            Ok(true)
        }
        Command::Sample { ensemble, samples, beta, aprime, thin } => {
            sample(cli, *ensemble, *samples, *beta, *aprime, *thin)?;
            Ok(true)
        }
        Command::Physics => {
            physics(cli)?;
            Ok(true)
        }
        Command::ListCases => {
            list_cases(cli)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cli.jobs {
        pool = pool.num_threads(j.max(1));
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match pool.install(|| run(&cli)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(FhError::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
