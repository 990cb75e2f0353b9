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

//! Command implementations. Each returns the CSV text and whether every
//! reported metric was defined.

use std::fmt::Write as _;
use std::time::Instant;

use anyhow::{bail, Context};
use cfcc::centrality::{sample_pivots, MeasureSpec, ScoreTable};
use cfcc::eval::{compare_rankings, degree_correlations, max_relative_error, noise_resilience};
use cfcc::graph::{laplacian, largest_connected_component, load_edge_list};
use cfcc::solver::{setup, MultigridHierarchy, SolverConfig};
use cfcc::{derive_seed, Error, Graph, LoadOptions};

use crate::args::{Args, Command, MeasureName, QuerySpec};

const GRAPH_STREAM: u64 = 0;
const QUERY_STREAM: u64 = 1;
const MEASURE_STREAM: u64 = 2;
const NOISE_STREAM: u64 = 3;

pub struct Report {
    pub csv: String,
    /// False when some metric was undefined and printed as `NA`.
    pub complete: bool,
}

/// Formats with 12 significant digits.
pub fn fmt_num(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("round trip");
    rounded.to_string()
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

struct RunContext {
    g: Graph,
    query: Vec<usize>,
    cfg: SolverConfig,
    seed: u64,
}

fn load_graph(args: &Args) -> anyhow::Result<Graph> {
    let g = match (&args.input, &args.gen) {
        (Some(path), _) => {
            let file = std::fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
            load_edge_list(std::io::BufReader::new(file), LoadOptions { one_indexed: args.one_indexed })
                .with_context(|| format!("reading {}", path.display()))?
        }
        (None, Some(spec)) => spec.build(derive_seed(args.seed, GRAPH_STREAM)),
        (None, None) => bail!("one of --input or --gen is required"),
    };
    let (lcc, _) = largest_connected_component(&g);
    if lcc.n() < 2 {
        bail!("the largest connected component has fewer than two nodes");
    }
    Ok(lcc)
}

fn select_query(g: &Graph, spec: &QuerySpec, seed: u64) -> anyhow::Result<Vec<usize>> {
    let n = g.n();
    match spec {
        QuerySpec::All => Ok((0..n).collect()),
        QuerySpec::Random(q) => {
            if *q == 0 || *q > n {
                bail!("query count {q} outside 1..={n}");
            }
            Ok(sample_pivots(n, *q, derive_seed(seed, QUERY_STREAM)))
        }
        QuerySpec::List(ids) => ids
            .iter()
            .map(|&id| {
                g.labels()
                    .binary_search(&id)
                    .map_err(|_| anyhow::anyhow!("query node {id} is not in the largest connected component"))
            })
            .collect(),
    }
}

fn build_context(args: &Args) -> anyhow::Result<RunContext> {
    let g = load_graph(args)?;
    let query = select_query(&g, &args.query, args.seed)?;
    let cfg = SolverConfig::default().with_tau(args.tau);
    cfg.validate()?;
    Ok(RunContext { g, query, cfg, seed: args.seed })
}

fn hierarchy(ctx: &RunContext) -> anyhow::Result<MultigridHierarchy> {
    Ok(setup(&laplacian(&ctx.g), &ctx.cfg)?)
}

fn spec_params(spec: &MeasureSpec) -> String {
    match spec {
        MeasureSpec::CfSampling { pivots, .. } => format!("pivots={pivots}"),
        MeasureSpec::CfProjection { epsilon, .. } => format!("epsilon={epsilon}"),
        _ => String::new(),
    }
}

fn header(out: &mut String, command: &str, ctx: &RunContext, extra: &[(&str, String)]) {
    let (n, m, q, seed, tau) = (ctx.g.n(), ctx.g.m(), ctx.query.len(), ctx.seed, ctx.cfg.tau);
    write!(out, "# command={command} n={n} m={m} queries={q} seed={seed} tau={tau:e}").unwrap();
    for (k, v) in extra {
        write!(out, " {k}={v}").unwrap();
    }
    out.push('\n');
}

fn measures(args: &Args, default: &[MeasureName], seed: u64) -> Vec<MeasureSpec> {
    let names = if args.measure.is_empty() { default } else { &args.measure };
    names.iter().flat_map(|m| m.specs(&args.pivots, &args.epsilon, seed)).collect()
}

fn evaluate(spec: &MeasureSpec, ctx: &RunContext, h: Option<&MultigridHierarchy>) -> anyhow::Result<ScoreTable> {
    Ok(spec.evaluate_with(&ctx.g, h, &ctx.query)?)
}

pub fn run(args: &Args) -> anyhow::Result<Report> {
    let ctx = build_context(args)?;
    match args.command {
        Command::Score => score(args, &ctx),
        Command::Compare => compare(args, &ctx),
        Command::Noise => noise(args, &ctx),
        Command::DegreeCorr => degree_corr(args, &ctx),
    }
}

fn score(args: &Args, ctx: &RunContext) -> anyhow::Result<Report> {
    let seed = derive_seed(ctx.seed, MEASURE_STREAM);
    let spec = measures(args, &[MeasureName::CfSampling], seed).into_iter().next().expect("at least one measure");
    let h = if spec.needs_solver() { Some(hierarchy(ctx)?) } else { None };
    let table = evaluate(&spec, ctx, h.as_ref())?;
    let mut out = String::new();
    header(
        &mut out,
        "score",
        ctx,
        &[
            ("measure", spec.measure().to_string()),
            ("params", spec_params(&spec)),
            ("max_residual", fmt_opt(table.max_residual)),
        ],
    );
    out.push_str("node,score\n");
    for (&v, &s) in table.nodes.iter().zip(&table.scores) {
        writeln!(out, "{},{}", ctx.g.label(v), fmt_num(s)).unwrap();
    }
    Ok(Report { csv: out, complete: true })
}

fn metric_cell(r: cfcc::Result<f64>, complete: &mut bool) -> anyhow::Result<String> {
    match r {
        Ok(x) => Ok(fmt_num(x)),
        Err(Error::UndefinedMetric(_)) => {
            *complete = false;
            Ok("NA".into())
        }
        Err(e) => Err(e.into()),
    }
}

fn compare(args: &Args, ctx: &RunContext) -> anyhow::Result<Report> {
    let seed = derive_seed(ctx.seed, MEASURE_STREAM);
    let specs = measures(args, &[MeasureName::CfSampling, MeasureName::CfProjection], seed);
    let t = Instant::now();
    let h = hierarchy(ctx)?;
    let setup_secs = t.elapsed().as_secs_f64();
    let t = Instant::now();
    let exact = evaluate(&MeasureSpec::CfExact, ctx, Some(&h))?;
    let exact_secs = t.elapsed().as_secs_f64();

    let mut out = String::new();
    let mut complete = true;
    let mut worst = exact.max_residual.unwrap_or(0.0);
    let mut rows = String::new();
    writeln!(rows, "cf-exact,,1,0,1,{}", fmt_num(exact_secs)).unwrap();
    for spec in &specs {
        let t = Instant::now();
        let approx = evaluate(spec, ctx, Some(&h))?;
        let secs = t.elapsed().as_secs_f64();
        worst = worst.max(approx.max_residual.unwrap_or(0.0));
        let (rho, inv) = match compare_rankings(&exact.scores, &approx.scores) {
            Ok(c) => (fmt_num(c.spearman), fmt_num(c.inversion_pct)),
            Err(Error::UndefinedMetric(_)) => {
                complete = false;
                let (_, share) = cfcc::eval::rank_inversions(&exact.scores, &approx.scores)?;
                ("NA".into(), fmt_num(100.0 * share))
            }
            Err(e) => return Err(e.into()),
        };
        let emax = metric_cell(max_relative_error(&exact.scores, &approx.scores), &mut complete)?;
        writeln!(rows, "{},{},{rho},{inv},{emax},{}", spec.measure(), spec_params(spec), fmt_num(secs)).unwrap();
    }
    header(&mut out, "compare", ctx, &[("setup_seconds", fmt_num(setup_secs)), ("max_residual", fmt_num(worst))]);
    out.push_str("measure,params,spearman,inversion_pct,e_max,seconds\n");
    out.push_str(&rows);
    Ok(Report { csv: out, complete })
}

fn noise(args: &Args, ctx: &RunContext) -> anyhow::Result<Report> {
    let seed = derive_seed(ctx.seed, MEASURE_STREAM);
    let specs = measures(args, &[MeasureName::CfExact, MeasureName::Sp], seed);
    let mut out = String::new();
    let fractions: Vec<String> = args.fractions.iter().map(|f| f.to_string()).collect();
    header(&mut out, "noise", ctx, &[("fractions", fractions.join(";"))]);
    out.push_str("measure,params,fraction,spearman\n");
    let mut complete = true;
    for spec in &specs {
        let points = noise_resilience(&ctx.g, spec, &ctx.query, &args.fractions, derive_seed(ctx.seed, NOISE_STREAM), &ctx.cfg);
        match points {
            Ok(points) => {
                for p in points {
                    writeln!(out, "{},{},{},{}", spec.measure(), spec_params(spec), p.fraction, fmt_num(p.spearman)).unwrap();
                }
            }
            Err(Error::UndefinedMetric(_)) => {
                complete = false;
                for f in &args.fractions {
                    writeln!(out, "{},{},{f},NA", spec.measure(), spec_params(spec)).unwrap();
                }
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(Report { csv: out, complete })
}

fn degree_corr(args: &Args, ctx: &RunContext) -> anyhow::Result<Report> {
    let pivots = args.pivots[0];
    let seed = derive_seed(ctx.seed, MEASURE_STREAM);
    let results = degree_correlations(&ctx.g, &ctx.query, pivots, seed, &ctx.cfg)?;
    let mut out = String::new();
    header(&mut out, "degree-corr", ctx, &[("pivots", pivots.to_string())]);
    out.push_str("measure,spearman_vs_degree\n");
    let mut complete = true;
    for (measure, r) in results {
        let cell = metric_cell(r, &mut complete)?;
        writeln!(out, "{measure},{cell}").unwrap();
    }
    Ok(Report { csv: out, complete })
}
