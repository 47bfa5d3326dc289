use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use padic_cnf::bernoulli::{gen_bernoulli, gen_bernoulli_exact, DEFAULT_EXACT_BOUND};
use padic_cnf::characters::{kronecker_char, DirichletChar};
use padic_cnf::lfunctions::{leopoldt_lp, lp_at_one, Normalization};
use padic_cnf::quadfield::{class_number_by_ideals, ExternalFieldData, QuadFieldData};
use padic_cnf::regulators::regulator_bundle;
use padic_cnf::verify::checks::C27_READING;
use padic_cnf::verify::config::RunConfig;
use padic_cnf::verify::report::{emit_report, summary, Format};
use padic_cnf::verify::{exit_code, run_check, ClaimId, EulerVariant, PPower, SignPolicy};
use padic_cnf::{Error, Result};

#[derive(Parser)]
#[command(name = "padic-cnf", version, about = "p-adic class number congruences for real quadratic fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep a grid of fields, primes and levels and check every congruence.
    Verify(VerifyArgs),
    /// Fundamental unit of Q(sqrt d).
    Unit {
        #[arg(long, allow_hyphen_values = true)]
        d: i64,
    },
    /// Narrow and wide class numbers of Q(sqrt d).
    Classnum {
        #[arg(long)]
        d: i64,
    },
    /// Generalized Bernoulli number B_{n,chi} for the Kronecker character of d.
    Bernoulli {
        #[arg(long)]
        n: u64,
        /// Discriminant of the character; 1 is the trivial character.
        #[arg(long, default_value_t = 1)]
        chi_d: i64,
        /// Also reduce mod p^prec.
        #[arg(long)]
        p: Option<u64>,
        #[arg(long, default_value_t = 4)]
        prec: u32,
    },
    /// Leopoldt's Lp(chi) and L_p(1, chi) for the character of Q(sqrt d).
    Lp {
        #[arg(long)]
        d: i64,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 4)]
        prec: u32,
    },
    /// p-adic regulators of Q(sqrt d).
    Regulator {
        #[arg(long)]
        d: i64,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[arg(long, default_value_t = 4)]
        prec: u32,
    },
    /// Write the field document of Q(sqrt d) at p for use with --field-file.
    ExportField {
        #[arg(long)]
        d: i64,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 8)]
        prec: u32,
    },
}

#[derive(Args)]
struct VerifyArgs {
    /// Comma-separated claim ids, e.g. CHK-T26,CHK-P11.
    #[arg(long, value_delimiter = ',')]
    checks: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',')]
    d: Option<Vec<i64>>,
    #[arg(long, value_delimiter = ',')]
    p: Option<Vec<u64>>,
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<u32>>,
    #[arg(long)]
    prec: Option<u32>,
    #[arg(long, value_enum)]
    sign_policy: Option<SignPolicy>,
    /// Restrict to one Euler-factor reading; all are tried by default.
    #[arg(long, value_enum)]
    euler_variant: Option<EulerVariant>,
    /// Restrict to one p-power reading; both are tried by default.
    #[arg(long, value_enum)]
    p_power_variant: Option<PPower>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Omit timings so output is byte-for-byte reproducible.
    #[arg(long)]
    stable: bool,
    #[arg(long)]
    field_file: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    exact_bound: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
}

impl VerifyArgs {
    fn resolve(self) -> Result<RunConfig> {
        let file = match &self.config {
            Some(path) => RunConfig::from_toml(
                &std::fs::read_to_string(path)
                    .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?,
            )?,
            None => RunConfig::default(),
        };
        let flags = RunConfig {
            checks: self.checks,
            d: self.d,
            p: self.p,
            n: self.n,
            prec: self.prec,
            sign_policy: self.sign_policy,
            euler_variant: self.euler_variant,
            p_power_variant: self.p_power_variant,
            format: self.format,
            stable: self.stable.then_some(true),
            field_file: self.field_file,
            exact_bound: self.exact_bound,
            seed: self.seed,
        };
        Ok(flags.or(file))
    }
}

fn verify(args: VerifyArgs) -> Result<i32> {
    let config = args.resolve()?;
    let spec = config.into_spec()?;
    let reports = run_check(&spec)?;
    let format = config.format();
    let tail = summary(&reports, &spec.flags);
    match format {
        Format::Text => {
            if spec.claims.contains(&ClaimId::C27) {
                println!("# CHK-C27: {C27_READING}");
            }
            print!("{}", emit_report(&reports, format));
            print!("{tail}");
        }
        _ => {
            print!("{}", emit_report(&reports, format));
            eprint!("{tail}");
        }
    }
    Ok(exit_code(&reports))
}

fn character(d: i64) -> Result<DirichletChar> {
    if d == 1 {
        Ok(DirichletChar::trivial())
    } else {
        kronecker_char(d)
    }
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Verify(args) => return verify(args),
        Command::Unit { d } => {
            let f = QuadFieldData::from_discriminant(d)?;
            println!("{}: eps = ({} + {} sqrt {})/2, norm {:+}", f.label(), f.x, f.y, f.d, f.norm);
        }
        Command::Classnum { d } => {
            let f = QuadFieldData::from_discriminant(d)?;
            println!("{}: h = {}, h+ = {}, h (ideals) = {}", f.label(), f.h, f.hplus, class_number_by_ideals(f.d)?);
        }
        Command::Bernoulli { n, chi_d, p, prec } => {
            let chi = character(chi_d)?;
            match gen_bernoulli_exact(n, &chi) {
                Ok(b) => println!("B_{{{n},{chi}}} = {b}"),
                Err(e) if p.is_some() => println!("B_{{{n},{chi}}}: {e}"),
                Err(e) => return Err(e),
            }
            if let Some(p) = p {
                println!("B_{{{n},{chi}}} = {}", gen_bernoulli(n, &chi, p, prec, DEFAULT_EXACT_BOUND)?);
            }
        }
        Command::Lp { d, p, prec } => {
            let chi = kronecker_char(d)?;
            let lp = leopoldt_lp(&chi, p, prec)?;
            println!("Lp({chi}) = {} [{:?}]", lp.value, lp.provenance);
            println!("L_p(1, {chi}) = {}", lp_at_one(&chi, p, prec, Normalization::EulerCorrected)?);
        }
        Command::Regulator { d, p, n, prec } => {
            let f = QuadFieldData::from_discriminant(d)?;
            let data = ExternalFieldData::from_quadratic(&f, p, prec.max(n + 2))?;
            let b = regulator_bundle(&data, n, prec)?;
            println!("{} at p = {p}:", f.label());
            println!("  R^(p)   = {} mod {p}", b.rp_mod_p);
            println!("  R^(p,{n}) = {}", b.rpn);
            println!("  R_p     = {} (v_p = {})", b.rp, b.rp.valuation());
        }
        Command::ExportField { d, p, prec } => {
            let f = QuadFieldData::from_discriminant(d)?;
            print!("{}", ExternalFieldData::from_quadratic(&f, p, prec)?.to_toml());
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            let config =
                matches!(e, Error::Config(_) | Error::FieldDocument(_) | Error::NotFundamental(_) | Error::BadPrime(_));
            ExitCode::from(if config { 2 } else { 1 })
        }
    }
}
