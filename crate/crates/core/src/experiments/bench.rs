//! Retrieval benchmark: run strategies over growing fractions of a
//! database and average the pruning counters over a query set.

use std::io::Write;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::params::SearchParams;
use crate::search::{build_index, nn_search, SearchOptions, Strategy};
use crate::series::{Dataset, TimeSeries};

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub params: SearchParams,
    /// Reduced dimension for the index-backed strategies.
    pub d: usize,
    pub strategies: Vec<Strategy>,
    /// Database fractions to sweep; values outside (0, 1] are skipped.
    pub fractions: Vec<f64>,
    pub early_abandon: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            params: SearchParams::new(crate::params::Exponent::Finite(1), 0),
            d: 8,
            strategies: Strategy::ALL.to_vec(),
            fractions: vec![0.2, 0.4, 0.6, 0.8, 1.0],
            early_abandon: false,
        }
    }
}

/// Averages for one (fraction, strategy) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchPoint {
    pub fraction: f64,
    pub db_size: usize,
    pub strategy: Strategy,
    pub avg_candidates_seen: f64,
    pub avg_pruned_by_index: f64,
    pub avg_pruned_by_lb_keogh: f64,
    pub avg_pruned_by_lb_improved: f64,
    pub avg_dtw_evaluations: f64,
    /// `1 - dtw_evaluations / candidates_seen`, averaged over queries.
    pub pruning_fraction: f64,
    pub avg_comparisons: Option<f64>,
    /// Informational only; never asserted.
    pub wall_time_ms: f64,
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub points: Vec<BenchPoint>,
    pub skipped_fractions: Vec<f64>,
    pub query_count: usize,
}

impl BenchReport {
    pub fn point(&self, fraction: f64, strategy: Strategy) -> Option<&BenchPoint> {
        self.points
            .iter()
            .find(|p| p.strategy == strategy && (p.fraction - fraction).abs() < 1e-12)
    }

    pub fn write_csv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(
            out,
            "fraction,db_size,strategy,queries,avg_candidates_seen,avg_pruned_by_index,\
             avg_pruned_by_lb_keogh,avg_pruned_by_lb_improved,avg_dtw_evaluations,\
             pruning_fraction,avg_comparisons,wall_time_ms"
        )?;
        for p in &self.points {
            let comparisons = p
                .avg_comparisons
                .map(|c| format!("{c}"))
                .unwrap_or_default();
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                p.fraction,
                p.db_size,
                p.strategy,
                self.query_count,
                p.avg_candidates_seen,
                p.avg_pruned_by_index,
                p.avg_pruned_by_lb_keogh,
                p.avg_pruned_by_lb_improved,
                p.avg_dtw_evaluations,
                p.pruning_fraction,
                comparisons,
                p.wall_time_ms,
            )?;
        }
        Ok(())
    }
}

/// For each usable fraction, search the first `ceil(f * N)` series with
/// every strategy and average the counters over the queries. Every strategy
/// must agree on the best distance per query.
pub fn run_pruning_bench(
    db: &Dataset<f64>,
    queries: &[TimeSeries<f64>],
    config: &BenchConfig,
) -> Result<BenchReport> {
    if queries.is_empty() {
        return Err(Error::EmptyInput("benchmark needs at least one query"));
    }
    if config.strategies.is_empty() {
        return Err(Error::EmptyInput("benchmark needs at least one strategy"));
    }
    for q in queries {
        if q.len() != db.series_len() {
            return Err(Error::LengthMismatch {
                left: q.len(),
                right: db.series_len(),
            });
        }
    }
    let opts = SearchOptions {
        early_abandon: config.early_abandon,
    };
    let needs_index = config.strategies.iter().any(|s| s.uses_index());

    let mut points = Vec::new();
    let mut skipped = Vec::new();
    for &fraction in &config.fractions {
        if !(fraction > 0.0 && fraction <= 1.0) {
            skipped.push(fraction);
            continue;
        }
        let count = ((fraction * db.len() as f64).ceil() as usize).clamp(1, db.len());
        let slice = db.prefix(count)?;
        let index = if needs_index {
            Some(build_index(&slice, config.d)?)
        } else {
            None
        };
        let index_ref = index.as_ref().map(|(i, c)| (i, c));

        let mut best_per_query: Vec<Option<f64>> = vec![None; queries.len()];
        for &strategy in &config.strategies {
            let started = Instant::now();
            let mut seen = 0f64;
            let mut by_index = 0f64;
            let mut by_keogh = 0f64;
            let mut by_improved = 0f64;
            let mut evals = 0f64;
            let mut pruning = 0f64;
            let mut comparisons = 0f64;
            let mut have_comparisons = true;
            for (qi, query) in queries.iter().enumerate() {
                let out = nn_search(query, &slice, strategy, &config.params, index_ref, opts)?;
                match best_per_query[qi] {
                    None => best_per_query[qi] = Some(out.best_dist),
                    Some(expected) => {
                        if (expected - out.best_dist).abs() > 1e-9 {
                            return Err(Error::StrategyMismatch {
                                details: format!(
                                    "query {qi} at fraction {fraction}: {strategy} found {} vs {}",
                                    out.best_dist, expected
                                ),
                            });
                        }
                    }
                }
                let c = out.counters;
                seen += c.candidates_seen as f64;
                by_index += c.pruned_by_index as f64;
                by_keogh += c.pruned_by_lb_keogh as f64;
                by_improved += c.pruned_by_lb_improved as f64;
                evals += c.dtw_evaluations as f64;
                pruning += 1.0 - c.dtw_evaluations as f64 / c.candidates_seen as f64;
                match out.comparison_count {
                    Some(n) => comparisons += n as f64,
                    None => have_comparisons = false,
                }
            }
            let nq = queries.len() as f64;
            points.push(BenchPoint {
                fraction,
                db_size: count,
                strategy,
                avg_candidates_seen: seen / nq,
                avg_pruned_by_index: by_index / nq,
                avg_pruned_by_lb_keogh: by_keogh / nq,
                avg_pruned_by_lb_improved: by_improved / nq,
                avg_dtw_evaluations: evals / nq,
                pruning_fraction: pruning / nq,
                avg_comparisons: have_comparisons.then_some(comparisons / nq),
                wall_time_ms: started.elapsed().as_secs_f64() * 1e3 / nq,
            });
        }
    }
    Ok(BenchReport {
        points,
        skipped_fractions: skipped,
        query_count: queries.len(),
    })
}
