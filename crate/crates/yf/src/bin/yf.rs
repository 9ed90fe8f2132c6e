use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use yf::cli_io::pipeline::{in_stage, Session};
use yf::cli_io::records::*;
use yf::cli_io::{run_pipeline, write_atomic, RunConfig};
use yf::congruence::scan_with_floor;
use yf::kernels::{build_P_Geg, constants::constants};
use yf::waldspurger::averaged_coefficient;
use yf::Error;

/// Exact computations for quaternionic Yoshida lifts.
#[derive(Parser, Debug)]
#[command(name = "yf", version)]
struct Cli {
    /// Cache directory for stage results.
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Clone)]
struct Level {
    #[arg(long)]
    n1: u64,
    #[arg(long, default_value_t = 1)]
    n2: u64,
}

#[derive(Args, Debug, Clone)]
struct Out {
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Left ideal classes of the Eichler order of level n1·n2.
    Classset {
        #[command(flatten)]
        level: Level,
        #[command(flatten)]
        out: Out,
    },
    /// Brandt matrices B(p) on degree-ν harmonic coefficients.
    Brandt {
        #[command(flatten)]
        level: Level,
        #[arg(long)]
        nu: u32,
        #[arg(long, value_delimiter = ',', default_value = "2,3,5,7")]
        primes: Vec<u64>,
        #[command(flatten)]
        out: Out,
    },
    /// Hecke eigensystems on the essential part.
    Eigen {
        #[command(flatten)]
        level: Level,
        #[arg(long)]
        nu: u32,
        #[arg(long, value_delimiter = ',', default_value = "2,3,5,7")]
        primes: Vec<u64>,
        #[command(flatten)]
        out: Out,
    },
    /// The Gegenbauer kernel of type (μ, ν) in n variables per vector at weight k.
    Kernel {
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long)]
        mu: u32,
        #[arg(long)]
        nu: u32,
        #[command(flatten)]
        out: Out,
    },
    /// A named constant, e.g. `--symbol c7 --params 2,0`.
    Constants {
        #[arg(long)]
        symbol: String,
        #[arg(long, value_delimiter = ',')]
        params: Vec<String>,
        #[command(flatten)]
        out: Out,
    },
    /// Fourier coefficients of the Yoshida lift Y(φ₁, φ₂).
    Lift {
        #[command(flatten)]
        run: RunArgs,
        /// Write the canonically normalized lift instead of Y(φ₁, φ₂).
        #[arg(long)]
        canonical: bool,
        #[command(flatten)]
        out: Out,
    },
    /// Waldspurger lifts of φ₁ and φ₂.
    Wald {
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        out: Out,
    },
    /// Averaged coefficients a(F, d) of a lift table.
    Avg {
        #[arg(long)]
        lift: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "4")]
        d: Vec<u64>,
        #[command(flatten)]
        out: Out,
    },
    /// Resultant congruence scan between two eigen tables.
    Scan {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, value_delimiter = ',')]
        primes: Vec<u64>,
        #[arg(long, default_value_t = yf::congruence::DEFAULT_FLOOR)]
        floor: u64,
        #[command(flatten)]
        out: Out,
    },
    /// Every stage end to end, writing artifacts and a manifest to --out.
    Pipeline {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args, Debug, Clone)]
struct RunArgs {
    #[command(flatten)]
    level: Level,
    #[arg(long)]
    nu1: u32,
    #[arg(long, default_value_t = 0)]
    nu2: u32,
    /// Trace bound of the lift expansion.
    #[arg(long, default_value_t = 12)]
    bound: i64,
    /// Bound of the half-integral weight expansions; 4·bound when absent.
    #[arg(long)]
    q_bound: Option<u64>,
    #[arg(long, value_delimiter = ',', default_value = "2,3,5,7")]
    primes: Vec<u64>,
    #[arg(long, value_delimiter = ',', default_value = "4")]
    d: Vec<u64>,
    #[arg(long)]
    f: Option<String>,
    #[arg(long)]
    g: Option<String>,
}

impl RunArgs {
    fn config(&self, cache: &Option<PathBuf>) -> RunConfig {
        let mut c = RunConfig::new(self.level.n1, self.level.n2, self.nu1, self.nu2, self.bound);
        if let Some(q) = self.q_bound {
            c.q_bound = q;
        }
        c.probe_primes = self.primes.clone();
        c.discriminants = self.d.clone();
        c.f_label = self.f.clone();
        c.g_label = self.g.clone();
        c.cache_dir = cache.clone();
        c
    }
}

fn level_config(l: &Level, primes: &[u64], cache: &Option<PathBuf>) -> RunConfig {
    // the lift parameters are unused by the class set and Brandt stages
    let mut c = RunConfig::new(l.n1, l.n2, 0, 0, 12);
    c.probe_primes = primes.to_vec();
    c.cache_dir = cache.clone();
    c
}

fn emit(out: &Out, text: &str) -> Result<(), Error> {
    match &out.out {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => {
            print!("{}", text);
            Ok(())
        }
    }
}

fn read(path: &PathBuf) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {}", path.display(), e))))
}

/// Ok(true) when every invariant check passed.
fn run(cli: Cli) -> Result<bool, Error> {
    let cache = cli.cache.clone();
    match cli.cmd {
        Cmd::Classset { level, out } => {
            let mut se = Session::new(level_config(&level, &[2], &cache))?;
            emit(&out, &to_json(&se.classset()?))?;
        }
        Cmd::Brandt { level, nu, primes, out } => {
            let mut se = Session::new(level_config(&level, &primes, &cache))?;
            emit(&out, &to_json(&se.brandt(nu)?))?;
        }
        Cmd::Eigen { level, nu, primes, out } => {
            let cfg = level_config(&level, &primes, &cache);
            let n = cfg.level();
            let mut se = Session::new(cfg)?;
            let systems = se.eigen(nu)?;
            let rec = EigenRec {
                level: s(n),
                nu: s(nu),
                systems: systems.iter().map(|e| eigen_system_rec(e, n)).collect(),
            };
            emit(&out, &to_json(&rec))?;
        }
        Cmd::Kernel { k, n, mu, nu, out } => {
            // 2k-dimensional vectors carry α = k
            let alpha = yf::exact_core::rational::ri(k as i64);
            let g = build_P_Geg(k, n, mu, nu, &alpha).map_err(|e| in_stage("kernel", e))?;
            let rec = KernelRec {
                k: s(k),
                n: s(n),
                mu: s(mu),
                nu: s(nu),
                alpha: s(&g.alpha),
                vars: g.poly.vars().iter().cloned().collect(),
                terms: poly_terms(&g.poly),
            };
            emit(&out, &to_json(&rec))?;
        }
        Cmd::Constants { symbol, params, out } => {
            let p: Vec<&str> = params.iter().map(|x| x.as_str()).collect();
            let v = constants(&symbol, &p)?;
            emit(
                &out,
                &to_json(&ConstantRec {
                    symbol,
                    params,
                    value: sym_rec(&v, &v.coefficient.field().cloned()),
                }),
            )?;
        }
        Cmd::Lift { run, canonical, out } => {
            let mut se = Session::new(run.config(&cache))?;
            let (raw, can) = se.lift()?;
            emit(&out, &to_json(&siegel_rec(if canonical { &can } else { &raw })))?;
            return Ok(!raw.is_zero() && raw.is_cuspidal());
        }
        Cmd::Wald { run, out } => {
            let mut se = Session::new(run.config(&cache))?;
            emit(&out, &to_json(&se.wald()?))?;
        }
        Cmd::Avg { lift, d, out } => {
            let f = siegel_of(&from_json(&read(&lift)?)?)?;
            let k = table_field(&f);
            let recs = d
                .iter()
                .map(|&d| Ok(avg_rec(&averaged_coefficient(&f, d)?, &k)))
                .collect::<Result<Vec<_>, Error>>()?;
            emit(&out, &to_json(&recs))?;
        }
        Cmd::Scan { a, b, primes, floor, out } => {
            let ta = eigen_table_of(&from_json(&read(&a)?)?)?;
            let tb = eigen_table_of(&from_json(&read(&b)?)?)?;
            let primes = if primes.is_empty() { ta.primes() } else { primes };
            emit(&out, &to_json(&scan_rec(&scan_with_floor(&ta, &tb, &primes, floor)?)))?;
        }
        Cmd::Pipeline { run, out } => {
            let mut cfg = run.config(&cache);
            cfg.out_dir = Some(out);
            let o = run_pipeline(cfg)?;
            for c in &o.checks {
                eprintln!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            return Ok(o.passed());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads.max(1)).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("yf: {}", e);
            return ExitCode::from(1);
        }
    };
    match pool.install(|| run(cli)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("yf: {}", e);
            // bad input is a usage error; anything else is a failed check
            match e {
                Error::Domain(_) | Error::Format(_) | Error::Io(_) | Error::ExcludedWeight(_) | Error::Truncation(_) => ExitCode::from(1),
                Error::Invariant(_) | Error::NotEigenform(_) | Error::SearchBound(_) => ExitCode::from(2),
            }
        }
    }
}
