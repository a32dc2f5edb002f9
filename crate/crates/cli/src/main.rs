//! `invops`: build models, diagnose, solve and construct witnesses from the
//! command line. Every command reads and writes the JSON formats of
//! `invariant_ops::io`; diagnostics exit with the verdict code.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use invariant_ops::diagnostics::{
    diagnose_commuting, diagnose_gh_single, diagnose_gs_single, diagnose_normal_system, diagnose_system,
};
use invariant_ops::io::{self, FieldFile, SymbolFile, SystemFile};
use invariant_ops::models::{
    sphere_rotation_field, sphere_spectrum, synthetic_symbol, torus_spectrum, torus_vector_field,
    DiophantineCoefficient, Recipe,
};
use invariant_ops::solvers::{
    max_block_deviation, solve_single, solve_system_commuting, solve_system_lsq, solve_system_normal,
};
use invariant_ops::witness::{agh_failure_witness, gh_failure_witness, kernel_witness};
use invariant_ops::{
    CoefficientField, DiagnosticReport, Error, InvariantSymbol, RunConfig, SolveOutcome, SpectrumModel, SystemSymbol,
    WitnessBundle, ZeroTol,
};
use serde_json::json;

const EXIT_MALFORMED: u8 = 64;
const EXIT_STRUCTURE: u8 = 65;
const EXIT_STRICT: u8 = 66;

#[derive(Parser)]
#[command(name = "invops", version, about = "Spectral analysis of invariant operators at finite truncation")]
struct Cli {
    #[command(flatten)]
    tol: TolArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct TolArgs {
    /// Absolute part of the zero threshold.
    #[arg(long, global = true, default_value_t = 1e-12)]
    tol_abs: f64,
    /// Relative part of the zero threshold (times block norm and size).
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol_rel: f64,
    /// Compatibility tolerance relative to the block data norm.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol_compat: f64,
    /// Minimum principal angle in radians for an operator switch.
    #[arg(long, global = true, default_value_t = 1e-6)]
    tol_angle: f64,
    /// Relative defect accepted by normality and commutation checks.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol_structure: f64,
    /// Tail fraction of the fit axis.
    #[arg(long, global = true, default_value_t = 0.5)]
    tail: f64,
    /// Degree above which decay counts as super-polynomial.
    #[arg(long, global = true, default_value_t = 10.0)]
    n_probe: f64,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Fail with exit 66 on compatibility or structural failures.
    #[arg(long, global = true)]
    strict: bool,
}

impl TolArgs {
    fn config(&self) -> RunConfig {
        RunConfig {
            ztol: ZeroTol {
                abs: self.tol_abs,
                rel: self.tol_rel,
            },
            compat_tol: self.tol_compat,
            angle_min: self.tol_angle,
            structure_tol: self.tol_structure,
            tail_fraction: self.tail,
            n_probe: self.n_probe,
            seed: self.seed,
            strict: self.strict,
            ..RunConfig::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build a spectrum and a symbol from a built-in model.
    Model {
        #[command(subcommand)]
        model: ModelCmd,
    },
    /// Summarize a spectrum and optionally a symbol or system.
    Info {
        #[arg(long)]
        spectrum: PathBuf,
        #[command(flatten)]
        op: OperatorArgs,
    },
    /// Apply a symbol to a field.
    Apply {
        #[arg(long)]
        spectrum: PathBuf,
        #[arg(long)]
        symbol: PathBuf,
        #[arg(long)]
        field: PathBuf,
        /// Output field file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Gain curves, fits and verdict; the exit code is the verdict.
    Diagnose {
        #[arg(long)]
        spectrum: PathBuf,
        #[command(flatten)]
        op: OperatorArgs,
        #[arg(long, value_enum, default_value_t = DiagnoseMode::Auto)]
        mode: DiagnoseMode,
        /// Output directory for report.json and gains.csv.
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve P u = f or the system P_j u = f_j blockwise.
    Solve {
        #[arg(long)]
        spectrum: PathBuf,
        #[command(flatten)]
        op: OperatorArgs,
        /// Data field, one per equation.
        #[arg(long = "field", alias = "fields", required = true, num_args = 1..)]
        fields: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = Method::Auto)]
        method: Method,
        #[arg(long)]
        out: PathBuf,
    },
    /// Construct a counterexample distribution.
    Witness {
        #[arg(value_enum)]
        kind: WitnessKind,
        #[arg(long)]
        spectrum: PathBuf,
        #[command(flatten)]
        op: OperatorArgs,
        /// Number of blocks to select (gh, agh).
        #[arg(long, default_value_t = 8)]
        count: usize,
        /// Sobolev index of the agh witness.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        s: f64,
        /// Summability exponent of the agh witness; must exceed the manifold dimension.
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the normal and commuting solvers against least squares.
    CompareOracle {
        #[arg(long)]
        spectrum: PathBuf,
        #[command(flatten)]
        op: OperatorArgs,
        #[arg(long = "field", alias = "fields", required = true, num_args = 1..)]
        fields: Vec<PathBuf>,
        /// Optional JSON output; the report is always printed.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct OperatorArgs {
    #[arg(long, conflicts_with = "system")]
    symbol: Option<PathBuf>,
    /// System file; relative operator paths resolve against its directory.
    #[arg(long)]
    system: Option<PathBuf>,
}

#[derive(Subcommand)]
enum ModelCmd {
    /// Flat torus, E = -Laplacian, blocks |xi|^2 <= R^2.
    Torus {
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long)]
        radius_sq: u64,
        /// Field coefficients, e.g. 1, 1/2, golden, liouville:5, (1+sqrt(5))/2.
        #[arg(long = "coeff", value_delimiter = ',', allow_hyphen_values = true)]
        coeffs: Vec<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Round sphere with the rotation field.
    Sphere {
        #[arg(long)]
        degree: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Seeded synthetic symbol over an existing spectrum.
    Synthetic {
        #[arg(long)]
        spectrum: PathBuf,
        /// Recipe JSON, e.g. {"recipe":"planted_gain","profile":{"kind":"power","coefficient":1,"exponent":-1}}.
        #[arg(long)]
        recipe: String,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DiagnoseMode {
    Auto,
    Gh,
    Gs,
    System,
    Normal,
    Commuting,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Auto,
    Single,
    Lsq,
    Normal,
    Commuting,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum WitnessKind {
    Kernel,
    Gh,
    Agh,
}

#[derive(Debug)]
enum Failure {
    Lib(Error),
    Usage(String),
    Strict(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Strict(_) => EXIT_STRICT,
            Failure::Usage(_) => EXIT_STRUCTURE,
            Failure::Lib(e) => match e {
                Error::NonNormal(_)
                | Error::NonCommuting { .. }
                | Error::Precondition(_)
                | Error::NoDecayingSubsequence(_)
                | Error::InsufficientSamples { .. } => EXIT_STRUCTURE,
                _ => EXIT_MALFORMED,
            },
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Lib(e) => write!(f, "{e}"),
            Failure::Usage(m) => write!(f, "{m}"),
            Failure::Strict(m) => write!(f, "strict mode: {m}"),
        }
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_MALFORMED) } else { ExitCode::SUCCESS };
        }
    };
    let cfg = cli.tol.config();
    let result = cfg.validate().map_err(Failure::from).and_then(|_| run(cli.command, &cfg));
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("invops: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn run(command: Command, cfg: &RunConfig) -> Outcome {
    match command {
        Command::Model { model } => cmd_model(model, cfg),
        Command::Info { spectrum, op } => cmd_info(&spectrum, &op, cfg),
        Command::Apply {
            spectrum,
            symbol,
            field,
            out,
        } => cmd_apply(&spectrum, &symbol, &field, &out),
        Command::Diagnose { spectrum, op, mode, out } => cmd_diagnose(&spectrum, &op, mode, &out, cfg),
        Command::Solve {
            spectrum,
            op,
            fields,
            method,
            out,
        } => cmd_solve(&spectrum, &op, &fields, method, &out, cfg),
        Command::Witness {
            kind,
            spectrum,
            op,
            count,
            s,
            rho,
            out,
        } => cmd_witness(kind, &spectrum, &op, count, s, rho, &out, cfg),
        Command::CompareOracle {
            spectrum,
            op,
            fields,
            out,
        } => cmd_compare_oracle(&spectrum, &op, &fields, out.as_deref(), cfg),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Lib(Error::Format(format!("{}: {e}", path.display()))))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(Error::from)?;
    }
    fs::write(path, text).map_err(|e| Failure::Lib(Error::Format(format!("{}: {e}", path.display()))))
}

fn out_dir(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::Lib(Error::Format(format!("{}: {e}", dir.display()))))
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("json value serializes")
}

fn manifest(dir: &Path, command: &str, cfg: &RunConfig, extra: serde_json::Value) -> Result<(), Failure> {
    let v = json!({
        "command": command,
        "seed": cfg.seed,
        "config": cfg,
        "config_hash": cfg.hash(),
        "details": extra,
    });
    write(&dir.join("manifest.json"), &pretty(&v))
}

fn load_spectrum(path: &Path) -> Result<Arc<SpectrumModel>, Failure> {
    Ok(Arc::new(io::spectrum_from_json(&read(path)?)?))
}

fn load_field(path: &Path, spectrum: &Arc<SpectrumModel>) -> Result<CoefficientField, Failure> {
    Ok(FieldFile::from_json(&read(path)?)?.into_field(spectrum.clone())?)
}

fn load_symbol(path: &Path, spectrum: &Arc<SpectrumModel>) -> Result<InvariantSymbol, Failure> {
    Ok(SymbolFile::from_json(&read(path)?)?.into_symbol(spectrum.clone())?)
}

fn load_system(path: &Path, spectrum: &Arc<SpectrumModel>) -> Result<SystemSymbol, Failure> {
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let file = SystemFile::from_json(&read(path)?)?;
    let system = file.into_system(spectrum.clone(), |p| {
        let p = base.join(p);
        fs::read_to_string(&p).map_err(|e| Error::Format(format!("{}: {e}", p.display())))
    })?;
    Ok(system)
}

enum Loaded {
    Single(InvariantSymbol),
    System(SystemSymbol),
}

impl Loaded {
    fn system(&self) -> SystemSymbol {
        match self {
            Loaded::Single(p) => SystemSymbol::single(p.clone()),
            Loaded::System(s) => s.clone(),
        }
    }
}

fn load_operator(op: &OperatorArgs, spectrum: &Arc<SpectrumModel>) -> Result<Loaded, Failure> {
    match (&op.symbol, &op.system) {
        (Some(p), None) => Ok(Loaded::Single(load_symbol(p, spectrum)?)),
        (None, Some(s)) => Ok(Loaded::System(load_system(s, spectrum)?)),
        _ => Err(Failure::Usage("exactly one of --symbol or --system is required".into())),
    }
}

fn cmd_model(model: ModelCmd, cfg: &RunConfig) -> Outcome {
    match model {
        ModelCmd::Torus {
            dim,
            radius_sq,
            coeffs,
            out,
        } => {
            let (spectrum, torus) = torus_spectrum(dim, radius_sq)?;
            out_dir(&out)?;
            write(&out.join("spectrum.json"), &io::spectrum_to_json(&spectrum))?;
            let mut details = json!({ "dim": dim, "radius_sq": radius_sq, "blocks": spectrum.truncation() });
            if !coeffs.is_empty() {
                let a = coeffs
                    .iter()
                    .map(|c| DiophantineCoefficient::parse(c))
                    .collect::<Result<Vec<_>, _>>()?;
                let p = torus_vector_field(&spectrum, &torus, &a)?;
                write(&out.join("symbol.json"), &io::symbol_to_json(&p))?;
                details["coefficients"] = json!(coeffs);
                details["coefficient_values"] = json!(a.iter().map(|c| c.to_f64()).collect::<Vec<_>>());
            }
            manifest(&out, "model torus", cfg, details)?;
        }
        ModelCmd::Sphere { degree, out } => {
            let (spectrum, _) = sphere_spectrum(degree)?;
            let p = sphere_rotation_field(&spectrum)?;
            out_dir(&out)?;
            write(&out.join("spectrum.json"), &io::spectrum_to_json(&spectrum))?;
            write(&out.join("symbol.json"), &io::symbol_to_json(&p))?;
            manifest(&out, "model sphere", cfg, json!({ "degree": degree }))?;
        }
        ModelCmd::Synthetic { spectrum, recipe, out } => {
            let spectrum = load_spectrum(&spectrum)?;
            let recipe: Recipe = serde_json::from_str(&recipe).map_err(|e| Error::InvalidRecipe(e.to_string()))?;
            let syn = synthetic_symbol(&spectrum, &recipe, cfg.seed)?;
            out_dir(&out)?;
            write(&out.join("symbol.json"), &io::symbol_to_json(&syn.symbol))?;
            if let Some(g) = &syn.planted_gains {
                write(&out.join("planted_gains.json"), &pretty(&json!(g)))?;
            }
            manifest(&out, "model synthetic", cfg, json!({ "recipe": recipe }))?;
        }
    }
    Ok(0)
}

fn cmd_info(spectrum: &Path, op: &OperatorArgs, cfg: &RunConfig) -> Outcome {
    let spectrum = load_spectrum(spectrum)?;
    let kk = spectrum.truncation();
    let mut v = json!({
        "spectrum_hash": spectrum.hash(),
        "manifold_dim": spectrum.manifold_dim(),
        "elliptic_order": spectrum.elliptic_order(),
        "blocks": kk,
        "total_dim": spectrum.total_dim(),
        "lambda_max": spectrum.eigenvalue(kk - 1),
        "multiplicity_growth": spectrum.multiplicity_growth_constant(),
    });
    if op.symbol.is_some() || op.system.is_some() {
        let s = load_operator(op, &spectrum)?.system();
        let ops: Vec<_> = s
            .operators()
            .iter()
            .map(|p| {
                json!({
                    "max_norm": p.max_norm(),
                    "normal": p.is_normal(cfg.structure_tol).all,
                    "order_estimate": p.estimate_order(cfg.tail_fraction, cfg.min_samples).ok(),
                })
            })
            .collect();
        v["operators"] = json!(ops);
        v["all_normal"] = json!(s.all_normal(cfg.structure_tol));
        v["all_commuting"] = json!(s.all_commuting(cfg.structure_tol));
    }
    println!("{}", pretty(&v));
    Ok(0)
}

fn cmd_apply(spectrum: &Path, symbol: &Path, field: &Path, out: &Path) -> Outcome {
    let spectrum = load_spectrum(spectrum)?;
    let p = load_symbol(symbol, &spectrum)?;
    let u = load_field(field, &spectrum)?;
    write(out, &io::field_to_json(&p.apply(&u)?))?;
    Ok(0)
}

fn diagnose(loaded: &Loaded, mode: DiagnoseMode, cfg: &RunConfig) -> Result<DiagnosticReport, Failure> {
    let report = match (mode, loaded) {
        (DiagnoseMode::Auto | DiagnoseMode::Gs, Loaded::Single(p)) => diagnose_gs_single(p, cfg),
        (DiagnoseMode::Gh, Loaded::Single(p)) => diagnose_gh_single(p, cfg),
        (DiagnoseMode::Gh | DiagnoseMode::Gs, Loaded::System(_)) => {
            return Err(Failure::Usage("gh/gs modes take a single --symbol; use system".into()))
        }
        (DiagnoseMode::System, l) => diagnose_system(&l.system(), true, cfg),
        (DiagnoseMode::Normal, l) => diagnose_normal_system(&l.system(), cfg)?,
        (DiagnoseMode::Commuting, l) => diagnose_commuting(&l.system(), cfg)?,
        (DiagnoseMode::Auto, Loaded::System(s)) => {
            if s.all_normal(cfg.structure_tol) && s.all_commuting(cfg.structure_tol) {
                diagnose_commuting(s, cfg)?
            } else if s.all_normal(cfg.structure_tol) {
                diagnose_normal_system(s, cfg)?
            } else {
                diagnose_system(s, true, cfg)
            }
        }
    };
    Ok(report)
}

fn cmd_diagnose(spectrum: &Path, op: &OperatorArgs, mode: DiagnoseMode, out: &Path, cfg: &RunConfig) -> Outcome {
    let spectrum = load_spectrum(spectrum)?;
    let loaded = load_operator(op, &spectrum)?;
    let report = diagnose(&loaded, mode, cfg)?;
    out_dir(out)?;
    write(&out.join("report.json"), &report.to_json())?;
    write(&out.join("gains.csv"), &report.to_csv())?;
    println!("{}", report.truncation_note);
    Ok(report.exit_code() as u8)
}

fn solve(loaded: &Loaded, f: &[CoefficientField], method: Method, cfg: &RunConfig) -> Result<SolveOutcome, Failure> {
    let s = loaded.system();
    if f.len() != s.len() {
        return Err(Failure::Usage(format!("{} operator(s) but {} data field(s)", s.len(), f.len())));
    }
    let out = match (method, loaded) {
        (Method::Single, Loaded::Single(p)) => solve_single(p, &f[0], cfg)?,
        (Method::Single, Loaded::System(_)) => {
            return Err(Failure::Usage("method single needs --symbol".into()));
        }
        (Method::Lsq, _) => solve_system_lsq(&s, f, cfg)?,
        (Method::Normal, _) => solve_system_normal(&s, f, cfg)?,
        (Method::Commuting, _) => solve_system_commuting(&s, f, cfg)?,
        (Method::Auto, Loaded::Single(p)) => solve_single(p, &f[0], cfg)?,
        (Method::Auto, Loaded::System(_)) => {
            if s.all_normal(cfg.structure_tol) && s.all_commuting(cfg.structure_tol) {
                solve_system_commuting(&s, f, cfg)?
            } else if s.all_normal(cfg.structure_tol) {
                solve_system_normal(&s, f, cfg)?
            } else {
                solve_system_lsq(&s, f, cfg)?
            }
        }
    };
    Ok(out)
}

fn cmd_solve(
    spectrum: &Path,
    op: &OperatorArgs,
    fields: &[PathBuf],
    method: Method,
    out: &Path,
    cfg: &RunConfig,
) -> Outcome {
    let spectrum = load_spectrum(spectrum)?;
    let loaded = load_operator(op, &spectrum)?;
    let f = fields
        .iter()
        .map(|p| load_field(p, &spectrum))
        .collect::<Result<Vec<_>, _>>()?;
    let outcome = solve(&loaded, &f, method, cfg)?;
    out_dir(out)?;
    write(&out.join("solution.json"), &io::field_to_json(outcome.solution()))?;
    write(&out.join("residual.csv"), &outcome.residual_csv())?;
    let summary = json!({ "summary": outcome.summary(), "config_hash": cfg.hash() });
    write(&out.join("summary.json"), &pretty(&summary))?;
    println!(
        "max residual {:e}; {} compatibility failure(s); {} structural failure(s)",
        outcome.max_residual(),
        outcome.compat_failures.len(),
        outcome.structural_failures.len()
    );
    if cfg.strict && !outcome.is_clean() {
        return Err(Failure::Strict(format!(
            "{} compatibility and {} structural failure(s)",
            outcome.compat_failures.len(),
            outcome.structural_failures.len()
        )));
    }
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_witness(
    kind: WitnessKind,
    spectrum: &Path,
    op: &OperatorArgs,
    count: usize,
    s: f64,
    rho: Option<f64>,
    out: &Path,
    cfg: &RunConfig,
) -> Outcome {
    let spectrum = load_spectrum(spectrum)?;
    let loaded = load_operator(op, &spectrum)?;
    let (bundle, name): (WitnessBundle, &str) = match kind {
        WitnessKind::Kernel => (kernel_witness(&loaded.system(), cfg)?, "kernel"),
        WitnessKind::Gh => (gh_failure_witness(&loaded.system(), count, cfg)?, "gh"),
        WitnessKind::Agh => {
            let Loaded::Single(p) = &loaded else {
                return Err(Failure::Usage("agh witness takes a single --symbol".into()));
            };
            let rho = rho.unwrap_or(spectrum.manifold_dim() as f64 + 1.0);
            (agh_failure_witness(p, s, rho, count, cfg)?, "agh")
        }
    };
    out_dir(out)?;
    write(&out.join("u.json"), &io::field_to_json(&bundle.u))?;
    write(&out.join("u_decay.csv"), &io::field_norms_csv(&bundle.u))?;
    for (j, img) in bundle.images.iter().enumerate() {
        write(&out.join(format!("image_{j}.json")), &io::field_to_json(img))?;
        write(&out.join(format!("image_{j}_decay.csv")), &io::field_norms_csv(img))?;
    }
    let log = serde_json::to_value(bundle.log(name, cfg)).expect("log serializes");
    write(&out.join("log.json"), &pretty(&log))?;
    println!("{name} witness: {} block(s) selected", bundle.construction_log.len());
    Ok(0)
}

fn cmd_compare_oracle(
    spectrum: &Path,
    op: &OperatorArgs,
    fields: &[PathBuf],
    out: Option<&Path>,
    cfg: &RunConfig,
) -> Outcome {
    let spectrum = load_spectrum(spectrum)?;
    let s = load_operator(op, &spectrum)?.system();
    let f = fields
        .iter()
        .map(|p| load_field(p, &spectrum))
        .collect::<Result<Vec<_>, _>>()?;
    if f.len() != s.len() {
        return Err(Failure::Usage(format!("{} operator(s) but {} data field(s)", s.len(), f.len())));
    }
    let lsq = solve_system_lsq(&s, &f, cfg)?;
    let normal = solve_system_normal(&s, &f, cfg)?;
    let mut v = json!({
        "lsq_max_residual": lsq.max_residual(),
        "normal_max_residual": normal.max_residual(),
        "normal_vs_lsq": max_block_deviation(normal.solution(), lsq.solution()),
        "config_hash": cfg.hash(),
    });
    if s.all_commuting(cfg.structure_tol) {
        let commuting = solve_system_commuting(&s, &f, cfg)?;
        v["commuting_max_residual"] = json!(commuting.max_residual());
        v["commuting_vs_lsq"] = json!(max_block_deviation(commuting.solution(), lsq.solution()));
    }
    let text = pretty(&v);
    println!("{text}");
    if let Some(path) = out {
        write(path, &text)?;
    }
    Ok(0)
}
