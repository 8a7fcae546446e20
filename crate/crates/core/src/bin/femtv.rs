//! Command-line front end: evaluation, cached sweeps, relation export,
//! dimension bounds, identity audits, rational fitting, and the Wieferich
//! scan. Exit code is 0 iff no audited identity in the requested scope
//! failed; conjecture monitors never affect the exit code.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use femtv::evaluator::{eval_symbol, sweep, SweepConfig};
use femtv::experiments::{
    audit, conjecture_monitor, dims, fit_combination, relations_at, AUDIT_RANGE,
    MONITORS, SUITES,
};
use femtv::modint::wieferich_scan;
use femtv::recon::FitOutcome;
use femtv::relgen::parse_node;
use femtv::wordalg::Family;
use femtv::Result;

#[derive(Copy, Clone, Debug, ValueEnum)]
enum FamilyArg {
    Es,
    T,
    S,
    At,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Family {
        match f {
            FamilyArg::Es => Family::Es,
            FamilyArg::T => Family::T,
            FamilyArg::S => Family::S,
            FamilyArg::At => Family::At,
        }
    }
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Format {
    Text,
    Json,
    Tsv,
}

/// Finite Euler sums and multiple T/S-values modulo primes.
#[derive(Parser, Debug)]
#[command(name = "femtv", version, about)]
struct Cli {
    /// Cache directory for prime sweeps (default: $FEMTV_CACHE).
    #[arg(long, global = true)]
    cache: Option<PathBuf>,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,

    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Evaluate one symbol at one prime and print the decimal residue.
    Eval {
        /// Canonical symbol, e.g. `T:1,1,1` or `ES:-1,2`.
        symbol: String,
        #[arg(long)]
        prime: u64,
    },
    /// Evaluate a weight inventory over a prime range and persist it.
    Sweep {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long)]
        weight: u32,
        /// Prime range `lo..hi` (inclusive).
        #[arg(long, default_value = "5..300")]
        primes: String,
    },
    /// Export the generated relation system for a family and weight.
    Relations {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long)]
        weight: u32,
    },
    /// Dimension bounds: value-matrix lower bound and relation/certified
    /// upper bound, with the reference table value when known.
    Dims {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long)]
        weight: u32,
        /// Prime range `lo..hi` (inclusive).
        #[arg(long, default_value = "5..2000")]
        primes: String,
    },
    /// Run identity audit suites (all suites and monitors when --suite is
    /// absent). Monitors are report-only.
    Audit {
        #[arg(long)]
        suite: Option<String>,
        /// Prime range `lo..hi` (inclusive).
        #[arg(long, default_value = "5..300")]
        primes: String,
    },
    /// Fit a target as a Q-linear combination of basis nodes.
    Fit {
        /// Target node: a symbol or a constant monomial like `q2^2*b3`.
        target: String,
        /// Basis nodes.
        basis: Vec<String>,
        /// Prime range `lo..hi` (inclusive).
        #[arg(long, default_value = "5..300")]
        primes: String,
    },
    /// Scan for primes with a^(p-1) = 1 mod p^2 in a residue class.
    Wieferich {
        #[arg(long)]
        max: u64,
        #[arg(long = "mod", default_value_t = 1)]
        modulus: u64,
        #[arg(long = "res", default_value_t = 1)]
        res: u64,
    },
}

fn parse_range(s: &str) -> Result<(u64, u64)> {
    let parse_err = |msg: &str| femtv::Error::Invalid(format!("prime range `{s}`: {msg}"));
    let (lo, hi) = s
        .split_once("..")
        .ok_or_else(|| parse_err("expected `lo..hi`"))?;
    let lo = lo.parse().map_err(|_| parse_err("bad lower bound"))?;
    let hi = hi.parse().map_err(|_| parse_err("bad upper bound"))?;
    if lo > hi {
        return Err(parse_err("lower bound exceeds upper bound"));
    }
    Ok((lo, hi))
}

fn cache_dir(cli: &Cli) -> Option<PathBuf> {
    cli.cache
        .clone()
        .or_else(|| std::env::var_os("FEMTV_CACHE").map(PathBuf::from))
}

/// Run one subcommand; `Ok(true)` means every audited identity passed.
fn run(cli: &Cli) -> Result<bool> {
    match &cli.cmd {
        Cmd::Eval { symbol, prime } => {
            let r = eval_symbol(*prime, symbol)?;
            println!("{}", r.value);
            Ok(true)
        }
        Cmd::Sweep {
            family,
            weight,
            primes,
        } => {
            let (lo, hi) = parse_range(primes)?;
            let dir = cache_dir(cli).ok_or_else(|| {
                femtv::Error::Invalid("sweep needs --cache or $FEMTV_CACHE".into())
            })?;
            let fam: Family = (*family).into();
            let vecs = sweep(&SweepConfig {
                prime_lo: lo,
                prime_hi: hi,
                family: fam,
                weight: *weight,
                alternating: fam.signed(),
                symbols: None,
                cache_dir: dir,
            })?;
            println!("{} symbols cached", vecs.len());
            Ok(true)
        }
        Cmd::Relations { family, weight } => {
            let sys = relations_at((*family).into(), *weight);
            print!("{}", sys.export());
            Ok(true)
        }
        Cmd::Dims {
            family,
            weight,
            primes,
        } => {
            let (lo, hi) = parse_range(primes)?;
            let cache = cache_dir(cli);
            let rep = dims((*family).into(), *weight, lo, hi, cache.as_deref())?;
            match cli.format {
                Format::Json => println!("{}", rep.render_json()),
                Format::Tsv => println!(
                    "{}\t{}\t{}\t{}\t{}",
                    rep.family.prefix(),
                    rep.weight,
                    rep.lower,
                    rep.upper,
                    rep.paper.map_or("-".into(), |v| v.to_string())
                ),
                Format::Text => println!("{}", rep.render_text()),
            }
            Ok(true)
        }
        Cmd::Audit { suite, primes } => {
            let (lo, hi) = parse_range(primes)?;
            let suites: Vec<&str> = match suite {
                Some(s) => vec![s.as_str()],
                None => SUITES.to_vec(),
            };
            let mut ok = true;
            for s in &suites {
                let rep = audit(s, lo, hi)?;
                ok &= rep.all_ok();
                match cli.format {
                    Format::Json => print!("{}", rep.render_json()),
                    Format::Tsv => {
                        for i in &rep.identities {
                            let status = match &i.status {
                                femtv::experiments::Status::Verified => "verified",
                                femtv::experiments::Status::Failed { .. } => "failed",
                                femtv::experiments::Status::SuspectedTypo { .. } => {
                                    "suspected-typo"
                                }
                            };
                            println!("{}\t{}\t{}\t{}", rep.suite, i.id, status, i.primes_checked);
                        }
                    }
                    Format::Text => print!("{}", rep.render_text()),
                }
            }
            // Monitors run only in the default everything scope and are
            // report-only by design.
            if suite.is_none() {
                for m in MONITORS {
                    let rep = conjecture_monitor(m, AUDIT_RANGE.0, AUDIT_RANGE.1.max(hi))?;
                    if matches!(cli.format, Format::Text) {
                        print!("{}", rep.render_text());
                    } else {
                        for l in &rep.lines {
                            println!("{}", serde_json::json!({"monitor": rep.name, "line": l}));
                        }
                    }
                }
            }
            Ok(ok)
        }
        Cmd::Fit {
            target,
            basis,
            primes,
        } => {
            let (lo, hi) = parse_range(primes)?;
            let t = parse_node(target)?;
            let b: Vec<_> = basis
                .iter()
                .map(|s| parse_node(s))
                .collect::<Result<_>>()?;
            match fit_combination(&t, &b, lo, hi)? {
                FitOutcome::Fit(coeffs) => {
                    let terms: Vec<String> = coeffs
                        .iter()
                        .zip(basis)
                        .map(|(c, n)| format!("{}/{}*{}", c.numer(), c.denom(), n))
                        .collect();
                    println!("{} = {}", target, terms.join(" + "));
                    Ok(true)
                }
                FitOutcome::NoFit { first_violation } => {
                    println!("no fit (first violation at p={first_violation})");
                    Ok(false)
                }
            }
        }
        Cmd::Wieferich { max, modulus, res } => {
            let hits = wieferich_scan(*max, *modulus, *res)?;
            let strs: Vec<String> = hits.iter().map(u64::to_string).collect();
            println!("{}", strs.join(", "));
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.workers {
        let n = n.max(1);
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
