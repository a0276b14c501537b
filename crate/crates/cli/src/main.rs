use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use wpmin_core::elliptic::SquareLattice;
use wpmin_core::mesh::{self, MeshFormat, Region, SamplingPlan};
use wpmin_core::verify::{self, ReportFormat, RunConfig, Verdict};
use wpmin_core::weierstrass::FamilyKind;
use wpmin_core::Error;

#[derive(Parser, Debug)]
#[command(name = "wpmin", version, about = "Genus-one minimal surfaces on the square torus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run every check for one family and print the report.
    Verify(VerifyArgs),
    /// Solve the period problem and cross-check against the closed form.
    Solve(SolveArgs),
    /// Build a mesh of the immersion and export it.
    Mesh(MeshArgs),
    /// Print the lattice constants.
    Constants(ConstantsArgs),
}

#[derive(Args, Debug)]
struct Common {
    #[arg(long, default_value = "vilhena3")]
    family: String,
    /// Series accuracy target of the evaluator.
    #[arg(long)]
    tolerance: Option<f64>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = verify::DEFAULT_RESOLUTION)]
    resolution: usize,
    #[arg(long, default_value_t = mesh::DEFAULT_CUTOFF)]
    cutoff: f64,
    #[arg(long, value_enum, default_value_t = ReportArg::Json)]
    report: ReportArg,
    /// Also write the report to `<dir>/<family>-report.<ext>`.
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    common: Common,
    /// Also analyse the excluded root lambda = e1.
    #[arg(long)]
    degenerate: bool,
}

#[derive(Args, Debug)]
struct MeshArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = verify::DEFAULT_RESOLUTION)]
    resolution: usize,
    #[arg(long, default_value_t = mesh::DEFAULT_CUTOFF)]
    cutoff: f64,
    #[arg(long, default_value_t = mesh::DEFAULT_CLIP)]
    clip: f64,
    #[arg(long, value_enum, default_value_t = FormatArg::Obj)]
    format: FormatArg,
    #[arg(long, value_enum, default_value_t = RegionArg::Torus)]
    region: RegionArg,
    /// Add the images under the eight-element symmetry group.
    #[arg(long)]
    symmetry_complete: bool,
    #[arg(long, default_value = ".")]
    output_dir: PathBuf,
}

#[derive(Args, Debug)]
struct ConstantsArgs {
    #[arg(long)]
    tolerance: Option<f64>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ReportArg {
    Json,
    Csv,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum FormatArg {
    Obj,
    Ply,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum RegionArg {
    Torus,
    Piece,
}

/// Exit status 2 for configuration errors, 1 for everything else.
enum Failure {
    Config(String),
    Run(anyhow::Error),
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        match err {
            Error::InvalidConfig(_) | Error::Unsupported(_) => Failure::Config(err.to_string()),
            other => Failure::Run(other.into()),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(err: anyhow::Error) -> Self {
        Failure::Run(err)
    }
}

fn parse_family(name: &str) -> Result<FamilyKind, Failure> {
    name.parse::<FamilyKind>()
        .map_err(|_| Failure::Config(format!("unknown family '{name}' (expected one of chen-gackstatter, weber2, vilhena3)")))
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var("WPMIN_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Config(format!("WPMIN_THREADS must be a positive integer, got '{value}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Run(e.into()))
}

fn run_config(common: &Common, resolution: usize, cutoff: f64) -> Result<RunConfig, Failure> {
    let mut config = RunConfig::new(parse_family(&common.family)?);
    config.resolution = resolution;
    config.cutoff = cutoff;
    config.target_accuracy = common.tolerance;
    config.validate()?;
    Ok(config)
}

fn write_file(path: &Path, contents: &[u8]) -> anyhow::Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn print(text: &str) -> Result<(), Failure> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes()).context("writing to stdout")?;
    if !text.ends_with('\n') {
        out.write_all(b"\n").context("writing to stdout")?;
    }
    Ok(())
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(value).map_err(|e| Failure::Run(e.into()))
}

fn cmd_verify(args: &VerifyArgs) -> Result<ExitCode, Failure> {
    let mut config = run_config(&args.common, args.resolution, args.cutoff)?;
    config.report_format = match args.report {
        ReportArg::Json => ReportFormat::Json,
        ReportArg::Csv => ReportFormat::Csv,
    };
    if let Some(dir) = &args.output_dir {
        config.output_dir = dir.clone();
    }
    let report = verify::verify(&config)?;
    let (text, ext) = match config.report_format {
        ReportFormat::Json => (to_json(&report)?, "json"),
        ReportFormat::Csv => (verify::report_to_csv(&report), "csv"),
    };
    if let Some(dir) = &args.output_dir {
        write_file(&dir.join(format!("{}-report.{ext}", config.family)), text.as_bytes())?;
    }
    print(&text)?;
    eprintln!(
        "{}: {} ({} failed checks)",
        config.family,
        if report.overall == Verdict::Pass { "pass" } else { "fail" },
        report.failed_checks.len()
    );
    Ok(if report.overall == Verdict::Pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn lattice_for(tolerance: Option<f64>) -> Result<SquareLattice, Failure> {
    let mut config = RunConfig::new(FamilyKind::Vilhena3);
    config.target_accuracy = tolerance;
    config.evaluation_config().validate()?;
    Ok(config.lattice()?)
}

fn cmd_solve(args: &SolveArgs) -> Result<ExitCode, Failure> {
    let kind = parse_family(&args.common.family)?;
    let lattice = lattice_for(args.common.tolerance)?;
    let report = verify::solve_report(kind, &lattice, args.degenerate)?;
    print(&to_json(&report)?)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_mesh(args: &MeshArgs) -> Result<ExitCode, Failure> {
    let kind = parse_family(&args.common.family)?;
    let lattice = lattice_for(args.common.tolerance)?;
    let plan = SamplingPlan {
        resolution: args.resolution,
        puncture_cutoff: args.cutoff,
        clip_norm: args.clip,
        region: match args.region {
            RegionArg::Torus => Region::Torus,
            RegionArg::Piece => Region::SymmetryPiece,
        },
    };
    plan.validate(lattice.config())?;
    if args.symmetry_complete && kind != FamilyKind::Vilhena3 {
        return Err(Failure::Config(format!("{kind} does not carry the eight-element symmetry group")));
    }
    let surface = verify::solved_surface(kind, &lattice)?;
    let mut built = mesh::build_mesh(&plan, &surface)?;
    let total_curvature = built.total_curvature();
    if args.symmetry_complete {
        built = mesh::symmetry_complete(&built)?;
    }
    let format = match args.format {
        FormatArg::Obj => MeshFormat::Obj,
        FormatArg::Ply => MeshFormat::Ply,
    };
    let path = args
        .output_dir
        .join(format!("{kind}-r{}.{}", args.resolution, format.extension()));
    let text = mesh::mesh_to_string(&built, format)?;
    write_file(&path, text.as_bytes())?;
    let expected = wpmin_core::period::jorge_meeks_total_curvature(1, &kind.end_orders());
    let summary = json!({
        "family": kind,
        "file": path,
        "bytes": text.len(),
        "vertices": built.vertices.len(),
        "faces": built.faces.len(),
        "clipped": built.clipped,
        "total_curvature": total_curvature,
        "expected_total_curvature": expected,
        "rel_deviation": total_curvature.map(|k| ((k - expected) / expected).abs()),
    });
    print(&to_json(&summary)?)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_constants(args: &ConstantsArgs) -> Result<ExitCode, Failure> {
    let lattice = lattice_for(args.tolerance)?;
    print(&to_json(&verify::constants_report(&lattice))?)?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| match &cli.command {
        Command::Verify(a) => cmd_verify(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Mesh(a) => cmd_mesh(a),
        Command::Constants(a) => cmd_constants(a),
    });
    match result {
        Ok(code) => code,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Run(err)) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
