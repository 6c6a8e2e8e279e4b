mod cache;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use gonal::algebra::{FieldSpec, FiniteField, ENUMERATION_CAP};
use gonal::construct::{construct_curve, default_profile, ConstructError, Family, SearchConfig, DEFAULT_BUDGET};
use gonal::density::{density_report, DensityConfig, DensityError};
use gonal::verify::{
    count_points_in, verify_certificate, with_jobs, zeta_check, Certificate, VerifiedCurve, VerifyError, ZetaVerdict,
};

const EXIT_VERIFY: u8 = 1;
const EXIT_INFEASIBLE: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_CAP: u8 = 4;
const EXIT_CONFIG: u8 = 64;
const EXIT_SCHEMA: u8 = 65;

#[derive(Parser, Debug)]
#[command(name = "gonal", version, about = "Curves over F_q with prescribed gonality and genus")]
struct Cli {
    /// Worker threads for search and counting (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Repeat for more diagnostics on stderr.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct FieldArgs {
    /// Characteristic.
    #[arg(long)]
    p: u64,
    /// Extension degree over F_p.
    #[arg(long, default_value_t = 1)]
    e: u32,
    /// Ascending coefficients of the defining polynomial of F_q over F_p.
    #[arg(long, value_delimiter = ',')]
    modulus: Option<Vec<u64>>,
}

impl FieldArgs {
    fn spec(&self) -> FieldSpec {
        FieldSpec { p: self.p, e: self.e, modulus: self.modulus.clone() }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Search for a curve and write its certificate.
    Construct {
        #[command(flatten)]
        field: FieldArgs,
        /// Gonality
        #[arg(long)]
        gamma: usize,
        /// Genus
        #[arg(long)]
        genus: u64,
        /// Search seed
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Maximum number of trials
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        /// Certificate path; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-run every check recorded in a certificate.
    Verify {
        /// Certificate path
        #[arg(long)]
        cert: PathBuf,
    },
    /// Count points over F_{q^k}.
    Count {
        /// Certificate path
        #[arg(long)]
        cert: PathBuf,
        /// Extension degree k
        #[arg(long, default_value_t = 1)]
        ext: usize,
        /// Largest q^k to enumerate
        #[arg(long, default_value_t = ENUMERATION_CAP)]
        cap: u64,
    },
    /// Test a genus claim against exact point counts.
    Zeta {
        /// Certificate path
        #[arg(long)]
        cert: PathBuf,
        /// Genus to test (default: the certified genus).
        #[arg(long)]
        genus: Option<u64>,
        /// Largest q^k to enumerate
        #[arg(long, default_value_t = ENUMERATION_CAP)]
        cap: u64,
    },
    /// Truncated Euler product and empirical squarefree frequency.
    Density {
        #[command(flatten)]
        field: FieldArgs,
        /// Gonality
        #[arg(long)]
        gamma: usize,
        /// Degrees d_0,…,d_γ for the Monte-Carlo estimate.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        d: Option<Vec<i64>>,
        /// Monte-Carlo trials
        #[arg(long, default_value_t = 2000)]
        trials: u64,
        /// Sampling seed
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        max_prime_degree: usize,
        /// Largest field order to enumerate
        #[arg(long, default_value_t = ENUMERATION_CAP)]
        cap: u64,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }
}

type Outcome = Result<(), Failure>;

fn verify_code(e: &VerifyError) -> u8 {
    match e {
        VerifyError::Schema(_) => EXIT_SCHEMA,
        VerifyError::CapExceeded { .. } => EXIT_CAP,
        _ => EXIT_VERIFY,
    }
}

fn load_field(args: &FieldArgs) -> Result<Arc<FiniteField>, Failure> {
    cache::field(&args.spec()).map_err(|e| Failure::new(EXIT_CONFIG, format!("invalid field: {e}")))
}

fn load_verified(path: &PathBuf) -> Result<VerifiedCurve, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::new(EXIT_CONFIG, format!("cannot read {}: {e}", path.display())))?;
    let cert = Certificate::from_json(&text).map_err(|e| Failure::new(EXIT_SCHEMA, e.to_string()))?;
    verify_certificate(&cert).map_err(|e| Failure::new(verify_code(&e), e.to_string()))
}

fn construct(cli: &Cli, field: &FieldArgs, gamma: usize, genus: u64, seed: u64, budget: u64, out: &Option<PathBuf>) -> Outcome {
    let k = load_field(field)?;
    let cfg = SearchConfig { seed, budget, jobs: cli.jobs };
    let cert = construct_curve(k, gamma, genus, &cfg).map_err(|e| {
        let code = match &e {
            ConstructError::InfeasibleDegree { .. } | ConstructError::GenusTooSmall(_) => EXIT_INFEASIBLE,
            ConstructError::BudgetExhausted { .. } => EXIT_BUDGET,
            ConstructError::GammaTooSmall(_) => EXIT_CONFIG,
            _ => EXIT_VERIFY,
        };
        Failure::new(code, e.to_string())
    })?;
    let json = cert.to_json();
    let d: Vec<String> = cert.d.iter().map(i64::to_string).collect();
    let summary = format!(
        "N1={} genus={} r={} d=[{}] trials={}",
        cert.checks.n1,
        cert.checks.genus,
        cert.right.r,
        d.join(","),
        cert.meta.trials
    );
    match out {
        Some(path) => {
            fs::write(path, json).map_err(|e| Failure::new(EXIT_CONFIG, format!("cannot write {}: {e}", path.display())))?;
            println!("{summary}");
        }
        None => {
            print!("{json}");
            eprintln!("{summary}");
        }
    }
    Ok(())
}

fn verify(path: &PathBuf) -> Outcome {
    let v = load_verified(path)?;
    let c = v.certificate();
    println!("ok: N1={} genus={} gonality={}", c.checks.n1, c.checks.genus, c.checks.gonality);
    Ok(())
}

fn cap_check(q: u64, k: usize, cap: u64) -> Outcome {
    match q.checked_pow(k as u32) {
        Some(s) if s <= cap => Ok(()),
        _ => Err(Failure::new(
            EXIT_CAP,
            format!("F_{{{q}^{k}}} exceeds the enumeration cap of {cap}"),
        )),
    }
}

fn count(cli: &Cli, path: &PathBuf, ext: usize, cap: u64) -> Outcome {
    if ext == 0 {
        return Err(Failure::new(EXIT_CONFIG, "--ext must be at least 1"));
    }
    let v = load_verified(path)?;
    cap_check(v.field().order(), ext, cap)?;
    let k = cache::extension(v.field(), ext);
    let n = count_points_in(&v, &k, cli.jobs).map_err(|e| Failure::new(verify_code(&e), e.to_string()))?;
    println!("N_{ext}={n}");
    Ok(())
}

fn zeta(cli: &Cli, path: &PathBuf, genus: Option<u64>, cap: u64) -> Outcome {
    let v = load_verified(path)?;
    let g = genus.unwrap_or(v.certificate().genus);
    let q = v.field().order();
    cap_check(q, g as usize + 2, cap)?;
    if cli.verbose > 0 {
        eprintln!("counting N_1..N_{} over extensions of F_{q}", g + 2);
    }
    let verdict = zeta_check(q, g, |k| {
        let ext = cache::extension(v.field(), k as usize);
        count_points_in(&v, &ext, cli.jobs)
    })
    .map_err(|e| Failure::new(verify_code(&e), e.to_string()))?;
    let data = match &verdict {
        ZetaVerdict::Consistent { data } => Some(data),
        ZetaVerdict::Inconsistent { data, .. } => data.as_ref(),
    };
    if let Some(d) = data {
        println!("{:>3}  {:>14}", "k", "N_k");
        for (k, n) in d.counts.iter().enumerate() {
            println!("{:>3}  {:>14}", k + 1, n);
        }
        let l: Vec<String> = d.l_coeffs.iter().map(i128::to_string).collect();
        println!("L(T) coefficients: [{}]", l.join(","));
    }
    match verdict {
        ZetaVerdict::Consistent { .. } => {
            println!("consistent, genus {g}");
            Ok(())
        }
        ZetaVerdict::Inconsistent { reason, .. } => {
            println!("inconsistent, genus {g}: {reason}");
            Err(Failure::new(EXIT_VERIFY, format!("genus {g} is inconsistent with the point counts")))
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn density(
    cli: &Cli,
    field: &FieldArgs,
    gamma: usize,
    d: &Option<Vec<i64>>,
    trials: u64,
    seed: u64,
    max_prime_degree: usize,
    cap: u64,
    json: bool,
) -> Outcome {
    let k = load_field(field)?;
    let profile = default_profile(gamma).map_err(|e| Failure::new(EXIT_CONFIG, e.to_string()))?;
    let family = Family::new(k, profile);
    let cfg = DensityConfig { max_degree: max_prime_degree, degrees: d.clone(), trials, seed, cap, jobs: cli.jobs };
    let report = density_report(&family, &cfg).map_err(|e| {
        let code = match e {
            DensityError::CapExceeded { .. } => EXIT_CAP,
            DensityError::NoTrials | DensityError::BadDegrees(_) | DensityError::NotPrime(_) => EXIT_CONFIG,
            _ => EXIT_VERIFY,
        };
        Failure::new(code, e.to_string())
    })?;
    if json {
        println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
        return Ok(());
    }
    println!("{:<16} {:>3} {:>10} {:>14}  local factor", "p", "deg", "c_p", "residues");
    for f in &report.per_prime {
        let p = serde_json::to_string(&f.p).expect("polynomial serializes");
        println!("{:<16} {:>3} {:>10} {:>14}  {} ({:.6})", p, f.degree, f.c_p, f.residues, f.local_factor, f.approx);
    }
    println!(
        "truncated product (deg p <= {}): {} ({:.6})",
        report.truncation_degree, report.truncated_product, report.truncated_product_approx
    );
    if let (Some(e), Some(diff)) = (report.empirical, report.difference) {
        println!("empirical: {}/{} = {:.6}", e.successes, e.trials, e.frequency);
        println!("|empirical - truncated| = {diff:.6}");
    }
    Ok(())
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Construct { field, gamma, genus, seed, budget, out } => {
            construct(cli, field, *gamma, *genus, *seed, *budget, out)
        }
        Command::Verify { cert } => with_jobs(cli.jobs, || verify(cert)),
        Command::Count { cert, ext, cap } => count(cli, cert, *ext, *cap),
        Command::Zeta { cert, genus, cap } => zeta(cli, cert, *genus, *cap),
        Command::Density { field, gamma, d, trials, seed, max_prime_degree, cap, json } => {
            density(cli, field, *gamma, d, *trials, *seed, *max_prime_degree, *cap, *json)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
