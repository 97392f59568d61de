use clap::{Parser, Subcommand, ValueEnum};
use degparity::classify;
use degparity::curve::{parse_ainvs, WeierstrassCurve};
use degparity::error::Error;
use degparity::{arith, hecke2, ingest, modsym};
use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "degparity", version, about = "Parity of modular degrees of elliptic curves")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Tsv,
}

#[derive(Subcommand)]
enum Command {
    /// Verdict of the conductor filter for one curve, as JSON.
    Classify {
        #[arg(long)]
        curve: String,
        #[arg(long)]
        conductor: u64,
    },
    /// Local factors of the mod-2 Hecke algebra at a prime level.
    Hecke {
        #[arg(long)]
        level: u64,
        /// Also print the structure constants of T/2T.
        #[arg(long)]
        dump_structure: bool,
    },
    /// Degree parity of an optimal curve of prime conductor.
    Parity {
        #[arg(long)]
        level: u64,
        #[arg(long)]
        curve: String,
    },
    /// Merel's criterion over primes N = 1 mod 8.
    Merel {
        #[arg(long)]
        max: u64,
    },
    /// Audit a curve database against every criterion.
    Audit {
        #[arg(long)]
        allcurves: PathBuf,
        #[arg(long)]
        degphi: PathBuf,
        #[arg(long)]
        max_level: Option<u64>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Run the modular-symbol checks too.
        #[arg(long)]
        slow: bool,
    },
}

enum Failure {
    Usage(String),
    Anomalies,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn curve_arg(s: &str) -> Result<WeierstrassCurve, Failure> {
    Ok(WeierstrassCurve::new(parse_ainvs(s)?)?)
}

fn run(cli: Cli) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    match cli.command {
        Command::Classify { curve, conductor } => {
            let c = curve_arg(&curve)?;
            let v = classify::theorem_one_filter(&c, &arith::factor(conductor))?;
            writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("verdict serializes"))?;
        }
        Command::Hecke { level, dump_structure } => {
            if !arith::is_prime(level) {
                return Err(Error::NotPrime(level).into());
            }
            let d = hecke2::decomposition_for_level(level)?;
            writeln!(out, "# level {level}, genus {}", modsym::genus_x0(level))?;
            writeln!(out, "factor\td_m\tresidue_degree\teisenstein\ttm_test")?;
            for (i, f) in d.factors.iter().enumerate() {
                writeln!(
                    out,
                    "{i}\t{}\t{}\t{}\t{:?}",
                    f.local_dim,
                    f.residue_degree,
                    f.eisenstein,
                    hecke2::tm_equals_z2(f)
                )?;
            }
            if dump_structure {
                let space = modsym::build_space(level)?;
                let alg = hecke2::reduce_mod2(&hecke2::hecke_lattice(&space)?)?;
                alg.write_structure(level, &mut out)?;
            }
        }
        Command::Parity { level, curve } => {
            let c = curve_arg(&curve)?;
            let v = classify::predict_parity_prime_level(&c, level)?;
            writeln!(out, "{}\t{}", v.parity, v.rule)?;
        }
        Command::Merel { max } => {
            writeln!(out, "level\tcriterion")?;
            for p in arith::primes_up_to(max).into_iter().filter(|p| p % 8 == 1) {
                writeln!(out, "{p}\t{}", arith::merel_criterion(p)?)?;
            }
        }
        Command::Audit { allcurves, degphi, max_level, format, slow } => {
            let (records, diags) = ingest::parse_allcurves(BufReader::new(File::open(&allcurves)?));
            let (degrees, ddiags) = ingest::parse_degphi(BufReader::new(File::open(&degphi)?));
            for d in &diags {
                eprintln!("{}:{}: {}", allcurves.display(), d.line, d.message);
            }
            for d in &ddiags {
                eprintln!("{}:{}: {}", degphi.display(), d.line, d.message);
            }
            let opts = ingest::AuditOptions { max_level, slow, ..Default::default() };
            let report = ingest::audit(&records, &degrees, &opts);
            let text = match format {
                Format::Json => ingest::to_json(&report),
                Format::Tsv => ingest::to_tsv(&report),
            };
            writeln!(out, "{}", text.trim_end())?;
            if report.summary.anomalies > 0 {
                return Err(Failure::Anomalies);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(k) = cli.threads {
        if rayon::ThreadPoolBuilder::new().num_threads(k).build_global().is_err() {
            eprintln!("could not set up {k} worker threads");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Anomalies) => ExitCode::from(1),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
