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

//! Ranking-quality metrics and the noise-resilience and degree-correlation
//! experiments.

use crate::centrality::{degree_asymptotic, Measure, MeasureSpec};
use crate::derive_seed;
use crate::error::{Error, Result};
use crate::graph::{insert_noise_edges, Graph};
use crate::par;
use crate::solver::SolverConfig;

fn check_pair(xs: &[f64], ys: &[f64]) -> Result<()> {
    if xs.len() != ys.len() {
        return Err(Error::Domain(format!("score vectors differ in length ({} vs {})", xs.len(), ys.len())));
    }
    if xs.len() < 2 {
        return Err(Error::Domain("need at least two scores to compare".into()));
    }
    Ok(())
}

/// Fractional ranks starting at 1; tied values share their average rank.
pub fn fractional_ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && xs[order[j]] == xs[order[i]] {
            j += 1;
        }
        // Positions i..j hold equal values; their ranks are i+1..=j.
        let avg = (i + 1 + j) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = avg;
        }
        i = j;
    }
    ranks
}

/// Spearman rank correlation: Pearson correlation of fractional ranks.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<f64> {
    check_pair(xs, ys)?;
    let rx = fractional_ranks(xs);
    let ry = fractional_ranks(ys);
    let n = rx.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::UndefinedMetric("Spearman correlation of a constant ranking".into()));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Counts pairs `{u, v}` where the approximation ranks `u` strictly below
/// `v` while the exact scores rank `u` at or above `v`, in either
/// orientation of the pair. Returns the count and its share of all pairs.
pub fn rank_inversions(exact: &[f64], approx: &[f64]) -> Result<(usize, f64)> {
    check_pair(exact, approx)?;
    let q = exact.len();
    let inverted = |u: usize, v: usize| approx[u] < approx[v] && exact[u] >= exact[v];
    let mut count = 0;
    for u in 0..q {
        for v in u + 1..q {
            if inverted(u, v) || inverted(v, u) {
                count += 1;
            }
        }
    }
    let pairs = q * (q - 1) / 2;
    Ok((count, count as f64 / pairs as f64))
}

/// `max_v max(r(v), 1/r(v))` with `r(v) = exact(v) / approx(v)`.
pub fn max_relative_error(exact: &[f64], approx: &[f64]) -> Result<f64> {
    if exact.len() != approx.len() || exact.is_empty() {
        return Err(Error::Domain("score vectors must be nonempty and of equal length".into()));
    }
    let mut worst: f64 = 1.0;
    for (&e, &a) in exact.iter().zip(approx) {
        if !(e > 0.0 && a > 0.0) {
            return Err(Error::Domain(format!("relative error needs positive scores, got {e} and {a}")));
        }
        worst = worst.max(e.max(a) / e.min(a));
    }
    Ok(worst)
}

/// Population standard deviation divided by the mean.
pub fn relative_std_dev(scores: &[f64]) -> Result<f64> {
    if scores.is_empty() {
        return Err(Error::Domain("relative standard deviation of no scores".into()));
    }
    let n = scores.len() as f64;
    let mean = scores.iter().sum::<f64>() / n;
    if mean == 0.0 {
        return Err(Error::UndefinedMetric("relative standard deviation with zero mean".into()));
    }
    let var = scores.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    Ok(var.sqrt() / mean)
}

/// Agreement between an approximate and an exact ranking.
#[derive(Debug, Clone, PartialEq)]
pub struct RankComparison {
    pub spearman: f64,
    pub inversions: usize,
    pub inversion_pct: f64,
    pub q: usize,
}

pub fn compare_rankings(exact: &[f64], approx: &[f64]) -> Result<RankComparison> {
    let (inversions, share) = rank_inversions(exact, approx)?;
    Ok(RankComparison { spearman: spearman(exact, approx)?, inversions, inversion_pct: 100.0 * share, q: exact.len() })
}

/// Spearman correlation between the baseline ranking and the ranking after
/// inserting noise edges anchored at the query nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisePoint {
    pub fraction: f64,
    pub spearman: f64,
}

/// Runs one independent perturbation per fraction, each seeded from
/// `(seed, fraction)`. A fraction of exactly 0 is the unperturbed control.
pub fn noise_resilience(
    g: &Graph,
    measure: &MeasureSpec,
    query: &[usize],
    fractions: &[f64],
    seed: u64,
    cfg: &SolverConfig,
) -> Result<Vec<NoisePoint>> {
    if !matches!(measure, MeasureSpec::CfExact | MeasureSpec::CfSampling { .. } | MeasureSpec::Sp) {
        return Err(Error::Domain(format!("noise resilience is defined for cf-exact, cf-sampling and sp, not {}", measure.measure())));
    }
    if let Some(f) = fractions.iter().find(|&&f| !(0.0..=0.5).contains(&f)) {
        return Err(Error::Domain(format!("noise fraction {f} outside (0, 0.5]")));
    }
    let baseline = measure.evaluate(g, query, cfg)?;
    let runs = par::map_indexed(cfg.exec, fractions, |_, &fraction| -> Result<NoisePoint> {
        let perturbed = if fraction == 0.0 {
            baseline.clone()
        } else {
            let noisy = insert_noise_edges(g, fraction, query, derive_seed(seed, fraction.to_bits()))?;
            measure.evaluate(&noisy, query, cfg)?
        };
        Ok(NoisePoint { fraction, spearman: spearman(&baseline.scores, &perturbed.scores)? })
    });
    runs.into_iter().collect()
}

/// Spearman correlation of shortest-path and current-flow closeness with
/// the degree-based score `c_A`.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeCorrelation {
    pub sp_vs_degree: f64,
    pub cf_vs_degree: f64,
}

/// Current-flow closeness is estimated by pivot sampling with `pivots`
/// pivots. A constant `c_A` (regular graphs) is an undefined-metric error.
pub fn degree_correlation_experiment(
    g: &Graph,
    query: &[usize],
    pivots: usize,
    seed: u64,
    cfg: &SolverConfig,
) -> Result<DegreeCorrelation> {
    let [sp, cf] = degree_correlations(g, query, pivots, seed, cfg)?;
    Ok(DegreeCorrelation { sp_vs_degree: sp.1?, cf_vs_degree: cf.1? })
}

/// Same computation with each correlation reported separately, so one
/// undefined value does not hide the other.
pub fn degree_correlations(
    g: &Graph,
    query: &[usize],
    pivots: usize,
    seed: u64,
    cfg: &SolverConfig,
) -> Result<[(Measure, Result<f64>); 2]> {
    let ca = degree_asymptotic(g, query)?;
    let sp = MeasureSpec::Sp.evaluate(g, query, cfg)?;
    let cf = MeasureSpec::CfSampling { pivots, seed }.evaluate(g, query, cfg)?;
    Ok([
        (Measure::SpCloseness, spearman(&sp.scores, &ca.scores)),
        (Measure::CfSampling, spearman(&cf.scores, &ca.scores)),
    ])
}
