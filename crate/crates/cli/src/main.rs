use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use iwasawa_cli::checks::full_selftest;
use iwasawa_cli::commands::{self, Outcome};
use iwasawa_cli::config::RunConfig;
use iwasawa_core::Error;

#[derive(Parser)]
#[command(name = "iwasawa", version, about = "Shintani zeta values and p-adic Iwasawa series")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Shintani cone decomposition with cover certification
    Decompose(Opts),
    /// Residue sets of every ray class, checked by brute force when small
    Residues(Opts),
    /// Exact partial zeta values at s = 1 − m
    Zeta(Opts),
    /// The p-adic series Z_h(χ, T) with optional interpolation checks
    Series(Opts),
    /// μ-invariant with the full norm chain
    Mu(Opts),
    /// Run the built-in check suite
    Selftest(Common),
}

#[derive(Args, Clone)]
struct Common {
    /// rayon worker threads (1 = serial)
    #[arg(long)]
    workers: Option<usize>,
    /// write the JSON report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct Opts {
    /// squarefree D > 1, or 1 for Q
    #[arg(long = "D")]
    d: Option<i64>,
    #[arg(long)]
    p: Option<u64>,
    /// p-adic precision
    #[arg(long = "N")]
    n: Option<u32>,
    #[arg(long)]
    h: Option<u32>,
    #[arg(long)]
    ell: Option<u32>,
    /// modulus generators, `;`-separated (e.g. `sqrt5`, `3*sqrt5`, `2,1`)
    #[arg(long)]
    f: Option<String>,
    /// `trivial`, `quad`, `quad<g>` or an index into the even characters
    #[arg(long)]
    chi: Option<String>,
    /// force the auxiliary prime c
    #[arg(long)]
    twist: Option<u64>,
    /// values of m (s = 1 − m), comma separated
    #[arg(long, value_delimiter = ',')]
    m: Vec<u32>,
    /// also print the sum over classes
    #[arg(long)]
    dedekind: bool,
    /// key=value file; command-line flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
    /// `mu --selftest` runs the check suite
    #[arg(long)]
    selftest: bool,
    #[command(flatten)]
    common: Common,
}

impl Opts {
    fn run_config(&self) -> Result<RunConfig, Error> {
        let mut cfg = RunConfig {
            d: self.d,
            p: self.p,
            n: self.n,
            h: self.h,
            ell: self.ell,
            f: self.f.clone(),
            chi: self.chi.clone(),
            twist: self.twist,
            m: self.m.clone(),
            dedekind: self.dedekind,
        };
        if let Some(path) = &self.config {
            cfg.merge_file(path)?;
        }
        Ok(cfg)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::ClassNumberNotOne(_)
        | Error::TraceNormalizationFailed(_)
        | Error::NoBijection(_)
        | Error::SupportViolation(_)
        | Error::SearchExhausted(_) => 1,
        _ => 2,
    }
}

fn progress(msg: &str) {
    eprintln!("{msg}");
}

fn selftest() -> Outcome {
    let checks = full_selftest(&progress);
    let pass = checks.iter().all(|c| c.pass);
    Outcome { json: json!({"checks": checks, "pass": pass}), pass }
}

fn emit(out: &Option<PathBuf>, o: &Outcome) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(&o.json).map_err(|e| Error::Invalid(e.to_string()))? + "\n";
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Invalid(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let common = match &cli.cmd {
        Cmd::Selftest(c) => c.clone(),
        Cmd::Decompose(o) | Cmd::Residues(o) | Cmd::Zeta(o) | Cmd::Series(o) | Cmd::Mu(o) => o.common.clone(),
    };
    if let Some(w) = common.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(w.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match &cli.cmd {
        Cmd::Selftest(_) => Ok(selftest()),
        Cmd::Mu(o) if o.selftest => Ok(selftest()),
        Cmd::Decompose(o) => o.run_config().and_then(|c| commands::decompose(&c, &progress)),
        Cmd::Residues(o) => o.run_config().and_then(|c| commands::residues(&c, &progress)),
        Cmd::Zeta(o) => o.run_config().and_then(|c| commands::zeta(&c, &progress)),
        Cmd::Series(o) => o.run_config().and_then(|c| commands::series(&c, &progress)),
        Cmd::Mu(o) => o.run_config().and_then(|c| commands::mu(&c, &progress)),
    };
    match result.and_then(|o| emit(&common.out, &o).map(|_| o.pass)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
