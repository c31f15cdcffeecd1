// Copyright 2026 The commhash Authors
// SPDX-License-Identifier: Apache-2.0

use std::fs::File;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use commhash::bench::{fit_points, fit_table, read_table, run_bench, write_csv};
use commhash::Backend;

#[derive(Parser)]
#[command(name = "commhash", version, about = "Multiparty commutative hashing toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Modp,
    Ec,
}

impl From<BackendArg> for Backend {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::Modp => Backend::Modp,
            BackendArg::Ec => Backend::Ec,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Time full sessions for each participant count.
    Bench {
        #[arg(long, value_enum)]
        backend: BackendArg,
        /// Comma-separated participant counts.
        #[arg(long, value_delimiter = ',', default_value = "4,8,16,32,64")]
        sizes: Vec<u32>,
        #[arg(long, default_value_t = 100)]
        trials: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// CSV output path.
        #[arg(long)]
        out: PathBuf,
        /// Print a least-squares fit as JSON.
        #[arg(long)]
        fit: bool,
    },
    /// Fit the published timings table (columns N,ec_s,zp_s).
    Verify {
        #[arg(long)]
        table1: PathBuf,
    },
}

fn run(cli: Cli) -> commhash::Result<()> {
    match cli.command {
        Command::Bench {
            backend,
            sizes,
            trials,
            seed,
            out,
            fit,
        } => {
            let points = run_bench(backend.into(), &sizes, trials, seed)?;
            write_csv(File::create(&out)?, &points)?;
            if fit {
                let f = fit_points(&points)?;
                println!("{}", serde_json::to_string(&f).expect("fit serializes"));
            }
        }
        Command::Verify { table1 } => {
            let rows = read_table(File::open(&table1)?)?;
            let (ec, zp) = fit_table(&rows)?;
            let report = serde_json::json!({ "ec": ec, "zp": zp, "rows": rows.len() });
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
