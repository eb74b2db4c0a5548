//! Command-line front end: single solves, benchmark tables, property suite.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use transmission_bie::benchmarks::{run_table, write_table_csv, BenchmarkTable, TableOptions};
use transmission_bie::mie::{mie_far_field, mie_solve};
use transmission_bie::postprocess::{far_field, far_field_error, FarField};
use transmission_bie::properties::{run_properties, write_json_lines, PropertyOptions};
use transmission_bie::{solve, Error, Formulation, GeometryKind, Kappa1Rule, Polarization, Result, TransmissionConfig};

#[derive(Parser)]
#[command(
    name = "tbie",
    version,
    about = "Boundary-integral solvers for 2-D dielectric transmission scattering"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Solve one scattering problem and report iterations and far-field error.
    Solve(SolveArgs),
    /// Reproduce a stored benchmark table as CSV.
    Table(TableArgs),
    /// Run the property suite and print JSON lines.
    Properties(PropertyArgs),
}

#[derive(Args, Default)]
struct SolveArgs {
    /// TOML file with any of the fields below; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    geometry: Option<String>,
    #[arg(long)]
    formulation: Option<String>,
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long)]
    eps1: Option<f64>,
    #[arg(long)]
    eps2: Option<f64>,
    /// E (ν = 1) or H (ν = ε₁/ε₂).
    #[arg(long)]
    polarization: Option<String>,
    /// Transmission constant; must equal 1 or ε₁/ε₂ and selects the polarization.
    #[arg(long)]
    nu: Option<f64>,
    /// `4i`, `omega/4`, `omega` (imaginary offset on (k₁+k₂)/2) or `re,im`.
    #[arg(long)]
    kappa1: Option<String>,
    /// Incidence direction `x,y`.
    #[arg(long)]
    direction: Option<String>,
    /// Half node count: 2n nodes, 4n unknowns.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    directions: Option<usize>,
    /// Far-field CSV; the resolved config is written next to it.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Skip the reference solve used for ε_∞.
    #[arg(long)]
    no_reference: bool,
}

/// The optional-field mirror of [`SolveArgs`] read from a config file.
#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    geometry: Option<String>,
    formulation: Option<String>,
    omega: Option<f64>,
    eps1: Option<f64>,
    eps2: Option<f64>,
    polarization: Option<String>,
    nu: Option<f64>,
    kappa1: Option<String>,
    direction: Option<[f64; 2]>,
    n: Option<usize>,
    tol: Option<f64>,
    directions: Option<usize>,
}

#[derive(Args)]
struct TableArgs {
    /// One of 1, 3, 4, 5, 6, 7.
    id: u8,
    /// Skip rows above this frequency.
    #[arg(long)]
    max_omega: Option<f64>,
    /// CSV path; stdout when absent. The resolved run config is archived beside it.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Iteration counts only.
    #[arg(long)]
    no_errors: bool,
}

#[derive(Args)]
struct PropertyArgs {
    #[arg(long)]
    out: Option<PathBuf>,
    /// κ₁ of the positivity suite as `re,im`.
    #[arg(long, default_value = "2,1")]
    kappa1: String,
    /// Add this value to the single-layer diagonal (fault-injection self-test).
    #[arg(long)]
    inject_diagonal: Option<f64>,
}

fn parse<T: FromStr<Err = Error>>(value: Option<String>, what: &str) -> Result<Option<T>> {
    value
        .map(|v| {
            v.parse::<T>().map_err(|e| match e {
                Error::Config(m) => Error::Config(format!("--{what}: {m}")),
                Error::UnknownName(m) => Error::Config(format!("--{what}: unknown value `{m}`")),
                other => other,
            })
        })
        .transpose()
}

fn parse_pair(s: &str) -> Result<[f64; 2]> {
    let bad = || Error::Config(format!("expected `a,b`, got `{s}`"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    Ok([
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
    ])
}

fn resolve_config(args: &SolveArgs) -> Result<TransmissionConfig> {
    let file: FileConfig = match &args.config {
        Some(path) => toml::from_str(&fs::read_to_string(path)?)?,
        None => FileConfig::default(),
    };
    let geometry: GeometryKind =
        parse(args.geometry.clone().or(file.geometry), "geometry")?.unwrap_or(GeometryKind::Circle);
    let formulation: Formulation =
        parse(args.formulation.clone().or(file.formulation), "formulation")?.unwrap_or(Formulation::SkrLp);
    let eps1 = args.eps1.or(file.eps1).unwrap_or(1.0);
    let eps2 = args.eps2.or(file.eps2).unwrap_or(2.0);
    let explicit_pol: Option<Polarization> = parse(args.polarization.clone().or(file.polarization), "polarization")?;
    let polarization = match (explicit_pol, args.nu.or(file.nu)) {
        (p, None) => p.unwrap_or(Polarization::E),
        (p, Some(nu)) => {
            let implied = if (nu - 1.0).abs() < 1e-12 {
                Polarization::E
            } else if (nu - eps1 / eps2).abs() < 1e-12 {
                Polarization::H
            } else {
                return Err(Error::Config(format!(
                    "nu = {nu} is neither 1 (E) nor eps1/eps2 = {} (H)",
                    eps1 / eps2
                )));
            };
            match p {
                Some(p) if p != implied && (eps1 - eps2).abs() > 0.0 => {
                    return Err(Error::Config(format!("nu = {nu} contradicts polarization {p}")));
                }
                Some(p) => p,
                None => implied,
            }
        }
    };
    let mut config = TransmissionConfig::new(
        geometry,
        formulation,
        args.omega.or(file.omega).unwrap_or(8.0),
        eps2,
        polarization,
        args.n.or(file.n).unwrap_or(32),
    );
    config.eps1 = eps1;
    if let Some(k) = parse::<Kappa1Rule>(args.kappa1.clone().or(file.kappa1), "kappa1")? {
        config.kappa1 = k;
    }
    config.direction = match &args.direction {
        Some(s) => Some(parse_pair(s)?),
        None => file.direction,
    };
    if let Some(t) = args.tol.or(file.tol) {
        config.tol = t;
    }
    if let Some(d) = args.directions.or(file.directions) {
        config.directions = d;
    }
    config.validate()?;
    Ok(config)
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut name = path.file_stem().map(|s| s.to_os_string()).unwrap_or_default();
    name.push(suffix);
    path.with_file_name(name)
}

fn reference(config: &TransmissionConfig) -> Result<(FarField, &'static str)> {
    if config.geometry == GeometryKind::Circle {
        let mie = mie_solve(1.0, config)?;
        return Ok((mie_far_field(&mie, &FarField::angles(config.directions)), "Mie series"));
    }
    let mut fine = config.with_formulation(Formulation::Sk15);
    fine.n *= 2;
    fine.tol = 1e-12;
    Ok((far_field(&solve(&fine)?)?, "SK15 at doubled n, tol 1e-12"))
}

fn run_solve(args: SolveArgs) -> Result<()> {
    let config = resolve_config(&args)?;
    let start = Instant::now();
    let sol = solve(&config)?;
    let elapsed = start.elapsed().as_secs_f64();
    let ff = far_field(&sol)?;
    let kappa = if config.formulation.is_regularized() {
        let k = config.kappa1()?.value();
        format!("{:.6}{:+.6}i", k.re, k.im)
    } else {
        "-".into()
    };
    println!("geometry      {}", config.geometry);
    println!("formulation   {}", config.formulation);
    println!("omega         {}", config.omega);
    println!("eps1, eps2    {}, {}", config.eps1, config.eps2);
    println!("nu            {}", config.nu());
    println!("kappa1        {kappa}");
    println!("unknowns      {}", config.unknowns());
    println!("iterations    {}", sol.iterations());
    println!("residual      {:.3e}", sol.report.final_residual());
    if !args.no_reference {
        let (r, label) = reference(&config)?;
        println!("eps_inf       {:.3e} (vs {label})", far_field_error(&ff, &r)?);
    }
    println!(
        "time          {elapsed:.3} s (assembly {:.3} s, GMRES {:.3} s)",
        sol.assembly_seconds, sol.solve_seconds
    );

    if let Some(out) = &args.out {
        ff.write_csv(fs::File::create(out)?)?;
        fs::write(sibling(out, ".config.toml"), toml::to_string(&config)?)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct TableRun<'a> {
    table: u8,
    max_omega: Option<f64>,
    errors: bool,
    reference_refine: usize,
    reference_tol: f64,
    rows: Vec<&'a TransmissionConfig>,
}

fn run_table_cmd(args: TableArgs) -> Result<bool> {
    let options = TableOptions {
        max_omega: args.max_omega,
        errors: !args.no_errors,
        ..TableOptions::default()
    };
    let table = BenchmarkTable::get(args.id)?;
    let results = run_table(args.id, &options)?;
    let pass = results.iter().all(|r| r.pass);
    match &args.out {
        Some(out) => {
            write_table_csv(&results, fs::File::create(out)?)?;
            let configs: Vec<TransmissionConfig> = table
                .rows_up_to(options.max_omega)
                .iter()
                .flat_map(|row| transmission_bie::benchmarks::COLUMNS.map(|f| table.config(row, f)))
                .collect();
            let archive = TableRun {
                table: args.id,
                max_omega: options.max_omega,
                errors: options.errors,
                reference_refine: options.refine,
                reference_tol: options.reference_tol,
                rows: configs.iter().collect(),
            };
            fs::write(sibling(out, ".config.toml"), toml::to_string(&archive)?)?;
        }
        None => write_table_csv(&results, io::stdout().lock())?,
    }
    for r in results.iter().filter(|r| !r.pass) {
        eprintln!(
            "row {} ({} {} unknowns): {}",
            r.index,
            r.reference.geometry,
            r.reference.unknowns,
            r.checks.join("; ")
        );
    }
    Ok(pass)
}

fn run_properties_cmd(args: PropertyArgs) -> Result<bool> {
    let [re, im] = parse_pair(&args.kappa1)?;
    let options = PropertyOptions {
        kappa1: Complex64::new(re, im),
        diagonal_fault: args.inject_diagonal,
    };
    let records = run_properties(&options);
    match &args.out {
        Some(out) => write_json_lines(&records, fs::File::create(out)?)?,
        None => write_json_lines(&records, io::stdout().lock())?,
    }
    let failed: Vec<_> = records.iter().filter(|r| !r.pass).collect();
    for r in &failed {
        eprintln!(
            "FAIL {}: {} observed {:e}, required {}",
            r.module, r.property, r.observed, r.required
        );
    }
    Ok(failed.is_empty())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Solve(args) => run_solve(args).map(|_| true),
        Command::Table(args) => run_table_cmd(args),
        Command::Properties(args) => run_properties_cmd(args),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            if let Error::NotConverged { history, .. } = &e {
                let shown: Vec<String> = history.iter().map(|r| format!("{r:.2e}")).collect();
                eprintln!("residual history: {}", shown.join(" "));
            }
            let _ = io::stderr().flush();
            ExitCode::FAILURE
        }
    }
}
