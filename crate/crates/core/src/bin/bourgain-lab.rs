use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use bourgain_lab::bench::{
    check_certificate, emit_report, exit_code_for, gen_set_str, init_threads, run_suite, ExperimentConfig, Format,
    SuiteName, EXIT_FAIL, EXIT_PASS,
};
use bourgain_lab::longaps::{find_long_structure, LongApConfig};
use bourgain_lab::roth::{count_threeaps, density_increment_driver, find_threeap, CountMode, DriverConfig};
use bourgain_lab::spectrum::{build_annihilator, greedy_dissociated, ProbeConfig};
use bourgain_lab::{BourgainSystem, Certificate, Error, GroupSet, GroupSpec, Measure, Result};

#[derive(Parser)]
#[command(name = "bourgain-lab", version, about = "Additive combinatorics experiments on finite abelian groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct SetArgs {
    /// Group, e.g. Z1009, Z3^4 or Z4xZ8.
    #[arg(long, default_value = "Z1009")]
    group: String,
    /// Set generator, e.g. interval(10), random(0.3), coset(2;1).
    #[arg(long)]
    set: String,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

impl SetArgs {
    fn load(&self) -> Result<(GroupSpec, GroupSet)> {
        let spec: GroupSpec = self.group.parse()?;
        let a = gen_set_str(&spec, &self.set, self.seed)?;
        Ok((spec, a))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run an acceptance suite and write a report.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long)]
        group: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "json")]
        format: String,
        /// JSON experiment config; flags override its fields.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Constant override, KEY=VALUE (repeatable).
        #[arg(long = "const")]
        constants: Vec<String>,
        /// Suite parameter, KEY=VALUE (repeatable), e.g. trials=50.
        #[arg(long = "param")]
        params: Vec<String>,
    },
    /// Count 3APs and search for one, via brute force and the increment driver.
    Threeaps {
        #[command(flatten)]
        set: SetArgs,
        /// Write the certificate here.
        #[arg(long)]
        cert_out: Option<PathBuf>,
    },
    /// Look for a long progression or coset inside A + A.
    Longaps {
        #[command(flatten)]
        set: SetArgs,
        #[arg(long)]
        cert_out: Option<PathBuf>,
    },
    /// Large spectrum, a dissociated subset and an annihilating system.
    Spectrum {
        #[command(flatten)]
        set: SetArgs,
        #[arg(long, default_value_t = 0.5)]
        eta: f64,
        #[arg(long, default_value_t = 0.25)]
        nu: f64,
    },
    /// Check a certificate against A (3APs) or A + A (progressions, cosets).
    VerifyCert {
        cert: PathBuf,
        #[command(flatten)]
        set: SetArgs,
    },
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn print_json(v: &serde_json::Value) {
    emit(&serde_json::to_string_pretty(v).expect("json"));
}

fn verify(
    suite: &str,
    group: Option<String>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    format: &str,
    config: Option<PathBuf>,
    constants: &[String],
    params: &[String],
) -> Result<i32> {
    let name: SuiteName = suite.parse()?;
    let format: Format = format.parse()?;
    let mut cfg = match &config {
        Some(p) => ExperimentConfig::read(p)?,
        None => ExperimentConfig::default(),
    };
    cfg.operation = name.as_str().into();
    if let Some(g) = group {
        cfg.group = g;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    cfg.output = out.as_ref().map(|p| p.display().to_string());
    for c in constants {
        cfg.override_constant(c)?;
    }
    for p in params {
        let (k, v) = p
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected KEY=VALUE, got `{p}`")))?;
        cfg.params.insert(k.trim().into(), v.trim().into());
    }
    let report = run_suite(name, &cfg)?;
    match &out {
        Some(path) => emit_report(&report, format, path)?,
        None => match format {
            Format::Json => emit(&report.to_json()),
            Format::Csv => emit(report.ledger_csv()?.trim_end()),
        },
    }
    for f in report.failures() {
        eprintln!("FAIL {}::{}", f.suite, f.name);
    }
    eprintln!(
        "{} passed, {} failed, {} logged",
        report.summary.passed, report.summary.failed, report.summary.logged
    );
    Ok(report.exit_code)
}

fn write_cert(cert: &Certificate, path: &Option<PathBuf>) -> Result<()> {
    if let Some(p) = path {
        cert.write(p)?;
    }
    Ok(())
}

fn threeaps(args: &SetArgs, cert_out: &Option<PathBuf>) -> Result<i32> {
    let (spec, a) = args.load()?;
    let brute = count_threeaps(&a, CountMode::Brute);
    let fourier = count_threeaps(&a, CountMode::Fourier);
    let lex = find_threeap(&a);
    let driver = density_increment_driver(&a, &BourgainSystem::whole_group(&spec), &DriverConfig::default())?;
    let cert = driver.certificate().cloned().or(lex.clone());
    if let Some(c) = &cert {
        write_cert(c, cert_out)?;
    }
    print_json(&json!({
        "group": spec.to_string(),
        "set": args.set,
        "size": a.len(),
        "brute": brute,
        "fourier": fourier,
        "agree": brute.total == fourier.total,
        "lex_certificate": lex,
        "driver": driver,
    }));
    Ok(if brute.total == fourier.total { EXIT_PASS } else { EXIT_FAIL })
}

fn longaps(args: &SetArgs, cert_out: &Option<PathBuf>) -> Result<i32> {
    let (spec, a) = args.load()?;
    let s = find_long_structure(&a, &LongApConfig::default())?;
    write_cert(&s.certificate, cert_out)?;
    print_json(&json!({ "group": spec.to_string(), "set": args.set, "result": s }));
    Ok(EXIT_PASS)
}

fn spectrum(args: &SetArgs, eta: f64, nu: f64) -> Result<i32> {
    let (spec, a) = args.load()?;
    if a.is_empty() {
        return Err(Error::InvalidArgument("the set is empty".into()));
    }
    let probe = ProbeConfig {
        seed: args.seed,
        ..ProbeConfig::default()
    };
    let mu = Measure::uniform(&a)?;
    let delta = mu.function().large_spectrum(eta)?;
    let (lambda, m) = greedy_dissociated(&spec, &delta, &mu, &probe)?;
    let base = BourgainSystem::whole_group(&spec);
    let ann = build_annihilator(&base, &a, eta, nu, &Default::default(), &probe)?;
    let render = |v: &[usize]| v.iter().map(|&g| spec.render(g)).collect::<Vec<_>>();
    print_json(&json!({
        "group": spec.to_string(),
        "set": args.set,
        "eta": eta,
        "nu": nu,
        "spectrum": render(&delta),
        "dissociated": render(&lambda),
        "m": m,
        "annihilator": ann.trace,
        "system": ann.system.describe()?,
    }));
    Ok(if ann.trace.chang.holds { EXIT_PASS } else { EXIT_FAIL })
}

fn verify_cert(path: &PathBuf, args: &SetArgs) -> Result<i32> {
    let cert = Certificate::read(path)?;
    let (spec, a) = args.load()?;
    let check = check_certificate(&cert, &a)?;
    print_json(&json!({ "group": spec.to_string(), "kind": cert.kind(), "check": check }));
    Ok(if check.valid { EXIT_PASS } else { EXIT_FAIL })
}

fn run(cli: Cli) -> Result<i32> {
    init_threads()?;
    match cli.command {
        Command::Verify {
            suite,
            group,
            seed,
            out,
            format,
            config,
            constants,
            params,
        } => verify(&suite, group, seed, out, &format, config, &constants, &params),
        Command::Threeaps { set, cert_out } => threeaps(&set, &cert_out),
        Command::Longaps { set, cert_out } => longaps(&set, &cert_out),
        Command::Spectrum { set, eta, nu } => spectrum(&set, eta, nu),
        Command::VerifyCert { cert, set } => verify_cert(&cert, &set),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            // clap uses 0 for --help/--version and 2 for usage errors.
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e) as u8)
        }
    }
}
