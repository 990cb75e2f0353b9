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

//! Command-line flags and the small grammars they accept.

use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context};
use cfcc::centrality::MeasureSpec;
use cfcc::{generators, Graph};
use clap::{Parser, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "cfcc", version, about = "Current-flow closeness centrality on large graphs")]
pub struct Args {
    /// Edge-list file: `u v [w]` per line, `#` or `%` comments.
    #[arg(long, conflicts_with = "gen", required_unless_present = "gen")]
    pub input: Option<PathBuf>,

    /// Synthetic graph: path:n, grid:k, ba:n,m0, er:n,p, star:n or clique:n.
    #[arg(long)]
    pub gen: Option<GenSpec>,

    #[arg(long, value_enum, default_value_t = Command::Score)]
    pub command: Command,

    /// Measure(s). `score` uses the first; `compare` and `noise` use all.
    #[arg(long, value_enum, value_delimiter = ',')]
    pub measure: Vec<MeasureName>,

    /// Pivot counts for cf-sampling.
    #[arg(long, value_delimiter = ',', default_value = "20")]
    pub pivots: Vec<usize>,

    /// Error parameters for cf-projection.
    #[arg(long, value_delimiter = ',', default_value = "0.5")]
    pub epsilon: Vec<f64>,

    /// Relative residual target of every solve.
    #[arg(long, default_value_t = 1e-5)]
    pub tau: f64,

    /// Query nodes: all, random:q, or list:a,b,c with ids as in the input.
    #[arg(long, default_value = "random:100")]
    pub query: QuerySpec,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Worker threads; defaults to the number of CPUs.
    #[arg(long)]
    pub threads: Option<usize>,

    /// Output file; stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,

    /// Input ids start at 1; id 0 is rejected.
    #[arg(long)]
    pub one_indexed: bool,

    /// Edge-insertion fractions for `noise`.
    #[arg(long, value_delimiter = ',', default_value = "0.01,0.05,0.1")]
    pub fractions: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Score,
    Compare,
    Noise,
    DegreeCorr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MeasureName {
    CfExact,
    CfSampling,
    CfProjection,
    Sp,
    Degree,
}

impl MeasureName {
    /// Expands to one spec per pivot count or epsilon where applicable.
    pub fn specs(self, pivots: &[usize], epsilon: &[f64], seed: u64) -> Vec<MeasureSpec> {
        match self {
            MeasureName::CfExact => vec![MeasureSpec::CfExact],
            MeasureName::CfSampling => pivots.iter().map(|&k| MeasureSpec::CfSampling { pivots: k, seed }).collect(),
            MeasureName::CfProjection => {
                epsilon.iter().map(|&e| MeasureSpec::CfProjection { epsilon: e, seed }).collect()
            }
            MeasureName::Sp => vec![MeasureSpec::Sp],
            MeasureName::Degree => vec![MeasureSpec::Degree],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GenSpec {
    Path(usize),
    Grid(usize),
    Ba(usize, usize),
    Er(usize, f64),
    Star(usize),
    Clique(usize),
}

impl GenSpec {
    pub fn build(&self, seed: u64) -> Graph {
        match *self {
            GenSpec::Path(n) => generators::path(n),
            GenSpec::Grid(k) => generators::grid(k),
            GenSpec::Ba(n, m0) => generators::barabasi_albert(n, m0, seed),
            GenSpec::Er(n, p) => generators::erdos_renyi(n, p, seed),
            GenSpec::Star(n) => generators::star(n),
            GenSpec::Clique(n) => generators::clique(n),
        }
    }
}

fn parse_num<T: FromStr>(s: &str, what: &str) -> anyhow::Result<T> {
    s.trim().parse().map_err(|_| anyhow!("invalid {what} `{s}`"))
}

impl FromStr for GenSpec {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        let (kind, rest) = s.split_once(':').ok_or_else(|| anyhow!("expected kind:params, got `{s}`"))?;
        let parts: Vec<&str> = rest.split(',').collect();
        let one = |what| -> anyhow::Result<usize> {
            match parts.as_slice() {
                [x] => parse_num(x, what),
                _ => bail!("`{kind}` takes one parameter"),
            }
        };
        let spec = match kind {
            "path" => GenSpec::Path(one("node count")?),
            "grid" => GenSpec::Grid(one("side length")?),
            "star" => GenSpec::Star(one("node count")?),
            "clique" => GenSpec::Clique(one("node count")?),
            "ba" => match parts.as_slice() {
                [n, m0] => GenSpec::Ba(parse_num(n, "node count")?, parse_num(m0, "attachment count")?),
                _ => bail!("`ba` takes n,m0"),
            },
            "er" => match parts.as_slice() {
                [n, p] => {
                    let p: f64 = parse_num(p, "edge probability")?;
                    if !(0.0..=1.0).contains(&p) {
                        bail!("edge probability {p} outside [0, 1]");
                    }
                    GenSpec::Er(parse_num(n, "node count")?, p)
                }
                _ => bail!("`er` takes n,p"),
            },
            _ => bail!("unknown generator `{kind}`"),
        };
        match spec {
            GenSpec::Path(0) | GenSpec::Grid(0) | GenSpec::Star(0) | GenSpec::Clique(0) | GenSpec::Er(0, _) => {
                bail!("generated graph would be empty")
            }
            GenSpec::Ba(n, m0) if m0 == 0 || n <= m0 => bail!("`ba` needs 0 < m0 < n"),
            _ => Ok(spec),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum QuerySpec {
    All,
    Random(usize),
    List(Vec<u64>),
}

impl FromStr for QuerySpec {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        if s == "all" {
            return Ok(QuerySpec::All);
        }
        if let Some(q) = s.strip_prefix("random:") {
            return Ok(QuerySpec::Random(parse_num(q, "query count")?));
        }
        if let Some(list) = s.strip_prefix("list:") {
            let ids = list.split(',').map(|x| parse_num(x, "node id")).collect::<anyhow::Result<Vec<u64>>>()?;
            if ids.is_empty() {
                bail!("empty query list");
            }
            return Ok(QuerySpec::List(ids));
        }
        Err(anyhow!("query must be all, random:q or list:ids, got `{s}`")).context("parsing --query")
    }
}
