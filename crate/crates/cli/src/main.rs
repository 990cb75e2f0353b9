// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

mod args;
mod commands;

use std::io::Write;
use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;

use crate::args::Args;

/// Exit status when the output is complete but some metric was undefined.
const EXIT_UNDEFINED: u8 = 2;

fn write_output(args: &Args, csv: &str) -> anyhow::Result<()> {
    match &args.output {
        Some(path) => std::fs::write(path, csv).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(csv.as_bytes())?;
            Ok(stdout.flush()?)
        }
    }
}

fn run(args: &Args) -> anyhow::Result<bool> {
    if let Some(t) = args.threads {
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global().context("configuring worker threads")?;
    }
    let report = commands::run(args)?;
    write_output(args, &report.csv)?;
    Ok(report.complete)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("cfcc: some metrics are undefined and were written as NA");
            ExitCode::from(EXIT_UNDEFINED)
        }
        Err(e) => {
            eprintln!("cfcc: error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
