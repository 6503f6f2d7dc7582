//! Nearest-neighbor retrieval under the constrained DTW.
//!
//! Two linear scans and three index-backed strategies, all exact: a
//! candidate is discarded only when a lower bound on its DTW distance
//! reaches the best distance found so far, so the argmin always survives.
//! In the scan algorithms the roles are: the query's envelope is built
//! once, each candidate `x` is first bounded via `LB_Keogh(x, query)`, and
//! the full DTW — computed as `dtw(query, candidate)` — runs only when
//! every gate passes.
//!
//! Counters record where each candidate was eliminated. For the linear
//! scans, `comparison_count` tallies comparisons between data-point values
//! (envelope builds plus bound loops, full-DTW work excluded); the Keogh
//! scan stays within `(2N+3)n` and the two-pass scan within
//! `(2N+3)n + 5(1-a)Nn`, `a` being the first-pass pruning fraction.

use std::fmt;
use std::str::FromStr;

use crate::bounds::{lb_keogh_counted, lb_keogh_project_counted, second_pass_counted};
use crate::dtw::dtw_slices;
use crate::envelope::envelope_streaming_counted;
use crate::error::{Error, Result};
use crate::norms::{pow_p, root_p};
use crate::params::{Exponent, SearchParams};
use crate::reduction::{envelope_rect, project_series, PiecewiseCover};
use crate::rtree::RTreeIndex;
use crate::scalar::Sample;
use crate::series::{Dataset, TimeSeries};

/// Retrieval strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    LinearKeogh,
    LinearImproved,
    TreeOnly,
    TreeKeogh,
    TreeImproved,
}

impl Strategy {
    pub const ALL: [Strategy; 5] = [
        Strategy::LinearKeogh,
        Strategy::LinearImproved,
        Strategy::TreeOnly,
        Strategy::TreeKeogh,
        Strategy::TreeImproved,
    ];

    pub fn uses_index(self) -> bool {
        matches!(
            self,
            Strategy::TreeOnly | Strategy::TreeKeogh | Strategy::TreeImproved
        )
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Strategy::LinearKeogh => "linear-keogh",
            Strategy::LinearImproved => "linear-improved",
            Strategy::TreeOnly => "tree",
            Strategy::TreeKeogh => "tree-keogh",
            Strategy::TreeImproved => "tree-improved",
        };
        f.write_str(name)
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "linear-keogh" => Ok(Strategy::LinearKeogh),
            "linear-improved" => Ok(Strategy::LinearImproved),
            "tree" => Ok(Strategy::TreeOnly),
            "tree-keogh" => Ok(Strategy::TreeKeogh),
            "tree-improved" => Ok(Strategy::TreeImproved),
            other => Err(Error::InvalidParameter(format!(
                "unknown strategy {other:?} (expected linear-keogh, linear-improved, tree, tree-keogh or tree-improved)"
            ))),
        }
    }
}

/// Per-query pruning instrumentation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchCounters {
    pub candidates_seen: usize,
    pub pruned_by_index: usize,
    pub pruned_by_lb_keogh: usize,
    pub pruned_by_lb_improved: usize,
    pub dtw_evaluations: usize,
}

impl SearchCounters {
    /// Every candidate is accounted for exactly once.
    pub fn balanced(&self) -> bool {
        self.pruned_by_index
            + self.pruned_by_lb_keogh
            + self.pruned_by_lb_improved
            + self.dtw_evaluations
            == self.candidates_seen
    }
}

/// Result of a nearest-neighbor query.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome<T> {
    pub best_id: usize,
    pub best_dist: T,
    pub counters: SearchCounters,
    /// Data-point comparison tally; tracked for the linear scans.
    pub comparison_count: Option<u64>,
}

/// Optional search behavior knobs.
#[derive(Debug, Clone, Copy, Default)]
pub struct SearchOptions {
    /// Abandon bound computations once they reach the running best.
    /// Off by default; the measured benefit is small.
    pub early_abandon: bool,
}

fn check_query<T: Sample>(query: &TimeSeries<T>, db: &Dataset<T>) -> Result<()> {
    if query.len() != db.series_len() {
        return Err(Error::LengthMismatch {
            left: query.len(),
            right: db.series_len(),
        });
    }
    Ok(())
}

/// Linear scan gated by LB_Keogh.
pub fn nn_linear_keogh<T: Sample>(
    query: &TimeSeries<T>,
    db: &Dataset<T>,
    params: &SearchParams,
) -> Result<SearchOutcome<T>> {
    nn_linear_keogh_opts(query, db, params, SearchOptions::default())
}

pub fn nn_linear_keogh_opts<T: Sample>(
    query: &TimeSeries<T>,
    db: &Dataset<T>,
    params: &SearchParams,
    opts: SearchOptions,
) -> Result<SearchOutcome<T>> {
    check_query(query, db)?;
    let n = query.len();
    let w = params.effective_window(n);
    let (env, mut comparisons) = envelope_streaming_counted(query, w);

    let mut counters = SearchCounters {
        candidates_seen: db.len(),
        ..SearchCounters::default()
    };
    let mut best_id = 0usize;
    let mut best = T::infinity();
    for (id, candidate) in db.iter().enumerate() {
        let abandon_at = if opts.early_abandon && best.is_finite() {
            Some(best)
        } else {
            None
        };
        let bound = lb_keogh_counted(
            candidate,
            env.upper(),
            env.lower(),
            params.p,
            abandon_at,
            &mut comparisons,
        );
        if bound.value < best {
            let t = dtw_slices(query, candidate, params.p, w);
            counters.dtw_evaluations += 1;
            if t < best {
                best = t;
                best_id = id;
            }
        } else {
            counters.pruned_by_lb_keogh += 1;
        }
    }
    debug_assert!(counters.balanced());
    Ok(SearchOutcome {
        best_id,
        best_dist: best,
        counters,
        comparison_count: Some(comparisons),
    })
}

/// Linear scan gated by LB_Keogh, then LB_Improved on survivors.
pub fn nn_linear_improved<T: Sample>(
    query: &TimeSeries<T>,
    db: &Dataset<T>,
    params: &SearchParams,
) -> Result<SearchOutcome<T>> {
    nn_linear_improved_opts(query, db, params, SearchOptions::default())
}

pub fn nn_linear_improved_opts<T: Sample>(
    query: &TimeSeries<T>,
    db: &Dataset<T>,
    params: &SearchParams,
    opts: SearchOptions,
) -> Result<SearchOutcome<T>> {
    let p = match params.p {
        Exponent::Finite(p) => p,
        Exponent::Infinity => {
            return Err(Error::UnsupportedExponent(
                "the two-pass bound requires finite p".into(),
            ))
        }
    };
    check_query(query, db)?;
    let n = query.len();
    let w = params.effective_window(n);
    let (env, mut comparisons) = envelope_streaming_counted(query, w);

    let mut counters = SearchCounters {
        candidates_seen: db.len(),
        ..SearchCounters::default()
    };
    let mut best_id = 0usize;
    let mut best = T::infinity();
    let mut projection: Vec<T> = Vec::with_capacity(n);
    for (id, candidate) in db.iter().enumerate() {
        let abandon_power = if opts.early_abandon && best.is_finite() {
            Some(pow_p(best, p))
        } else {
            None
        };
        let first_pass = lb_keogh_project_counted(
            candidate,
            env.upper(),
            env.lower(),
            p,
            abandon_power,
            &mut projection,
            &mut comparisons,
        );
        if root_p(first_pass, p) >= best {
            counters.pruned_by_lb_keogh += 1;
            continue;
        }
        let total = second_pass_counted(
            query,
            &projection,
            w,
            p,
            first_pass,
            abandon_power,
            &mut comparisons,
        );
        if root_p(total, p) >= best {
            counters.pruned_by_lb_improved += 1;
            continue;
        }
        let t = dtw_slices(query, candidate, params.p, w);
        counters.dtw_evaluations += 1;
        if t < best {
            best = t;
            best_id = id;
        }
    }
    debug_assert!(counters.balanced());
    Ok(SearchOutcome {
        best_id,
        best_dist: best,
        counters,
        comparison_count: Some(comparisons),
    })
}

/// Projected points of every series plus the index over them.
pub fn build_index<T: Sample>(
    db: &Dataset<T>,
    d: usize,
) -> Result<(RTreeIndex<T>, PiecewiseCover)> {
    let cover = crate::reduction::make_cover(db.series_len(), d)?;
    let points = db
        .iter()
        .enumerate()
        .map(|(id, s)| Ok((project_series(s, &cover)?, id)))
        .collect::<Result<Vec<_>>>()?;
    let index = RTreeIndex::build(points)?;
    Ok((index, cover))
}

/// Best-first indexed retrieval (`p = 1` only): the stream yields
/// candidates by rectangle distance under the shrinking cutoff `b`;
/// `cascade` decides which lower-bound gates run before the full DTW.
pub fn nn_indexed<T: Sample>(
    query: &TimeSeries<T>,
    db: &Dataset<T>,
    index: &RTreeIndex<T>,
    cover: &PiecewiseCover,
    cascade: Strategy,
    params: &SearchParams,
) -> Result<SearchOutcome<T>> {
    nn_indexed_opts(query, db, index, cover, cascade, params, SearchOptions::default())
}

#[allow(clippy::too_many_arguments)]
pub fn nn_indexed_opts<T: Sample>(
    query: &TimeSeries<T>,
    db: &Dataset<T>,
    index: &RTreeIndex<T>,
    cover: &PiecewiseCover,
    cascade: Strategy,
    params: &SearchParams,
    opts: SearchOptions,
) -> Result<SearchOutcome<T>> {
    if !cascade.uses_index() {
        return Err(Error::InvalidParameter(format!(
            "strategy {cascade} is not index-backed"
        )));
    }
    if params.p != Exponent::Finite(1) {
        return Err(Error::UnsupportedExponent(
            "the piecewise-sum index key is sound for p = 1 only".into(),
        ));
    }
    check_query(query, db)?;
    if cover.series_len() != db.series_len() {
        return Err(Error::LengthMismatch {
            left: cover.series_len(),
            right: db.series_len(),
        });
    }
    if index.len() != db.len() {
        return Err(Error::InvalidParameter(format!(
            "index holds {} entries for a database of {}",
            index.len(),
            db.len()
        )));
    }
    if let Some(d) = index.dim() {
        if d != cover.dim() {
            return Err(Error::DimensionMismatch {
                left: d,
                right: cover.dim(),
            });
        }
    }

    let n = query.len();
    let w = params.effective_window(n);
    let (env, mut comparisons) = envelope_streaming_counted(query, w);
    let query_rect = envelope_rect(&env, cover)?;
    let mut stream = index.candidates(&query_rect)?;

    let mut counters = SearchCounters {
        candidates_seen: db.len(),
        ..SearchCounters::default()
    };
    let mut best_id = 0usize;
    let mut best = T::infinity();
    let mut yielded = 0usize;
    let mut projection: Vec<T> = Vec::with_capacity(n);

    while let Some((id, _key_dist)) = stream.next_below(best) {
        yielded += 1;
        let candidate = db.get(id);
        let abandon_at = if opts.early_abandon && best.is_finite() {
            Some(best) // p = 1: power space and value space coincide
        } else {
            None
        };
        match cascade {
            Strategy::TreeOnly => {}
            Strategy::TreeKeogh => {
                let keogh = lb_keogh_counted(
                    candidate,
                    env.upper(),
                    env.lower(),
                    params.p,
                    abandon_at,
                    &mut comparisons,
                );
                if keogh.value >= best {
                    counters.pruned_by_lb_keogh += 1;
                    continue;
                }
            }
            Strategy::TreeImproved => {
                let first_pass = lb_keogh_project_counted(
                    candidate,
                    env.upper(),
                    env.lower(),
                    1,
                    abandon_at,
                    &mut projection,
                    &mut comparisons,
                );
                if first_pass >= best {
                    counters.pruned_by_lb_keogh += 1;
                    continue;
                }
                let total = second_pass_counted(
                    query,
                    &projection,
                    w,
                    1,
                    first_pass,
                    abandon_at,
                    &mut comparisons,
                );
                if total >= best {
                    counters.pruned_by_lb_improved += 1;
                    continue;
                }
            }
            _ => unreachable!("checked above"),
        }
        let t = dtw_slices(query, candidate, params.p, w);
        counters.dtw_evaluations += 1;
        if t < best {
            best = t;
            best_id = id;
        }
    }
    counters.pruned_by_index = db.len() - yielded;
    debug_assert!(counters.balanced());
    Ok(SearchOutcome {
        best_id,
        best_dist: best,
        counters,
        comparison_count: None,
    })
}

/// Run any strategy; tree strategies require the index/cover pair.
pub fn nn_search<T: Sample>(
    query: &TimeSeries<T>,
    db: &Dataset<T>,
    strategy: Strategy,
    params: &SearchParams,
    index: Option<(&RTreeIndex<T>, &PiecewiseCover)>,
    opts: SearchOptions,
) -> Result<SearchOutcome<T>> {
    match strategy {
        Strategy::LinearKeogh => nn_linear_keogh_opts(query, db, params, opts),
        Strategy::LinearImproved => nn_linear_improved_opts(query, db, params, opts),
        _ => {
            let (index, cover) = index.ok_or_else(|| {
                Error::InvalidParameter(format!("strategy {strategy} needs a prebuilt index"))
            })?;
            nn_indexed_opts(query, db, index, cover, strategy, params, opts)
        }
    }
}

/// Exhaustive DTW scan, the oracle the strategies are tested against.
pub fn nn_exhaustive<T: Sample>(
    query: &TimeSeries<T>,
    db: &Dataset<T>,
    params: &SearchParams,
) -> Result<SearchOutcome<T>> {
    check_query(query, db)?;
    let w = params.effective_window(query.len());
    let mut best_id = 0usize;
    let mut best = T::infinity();
    for (id, candidate) in db.iter().enumerate() {
        let t = dtw_slices(query, candidate, params.p, w);
        if t < best {
            best = t;
            best_id = id;
        }
    }
    Ok(SearchOutcome {
        best_id,
        best_dist: best,
        counters: SearchCounters {
            candidates_seen: db.len(),
            dtw_evaluations: db.len(),
            ..SearchCounters::default()
        },
        comparison_count: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ts(v: &[f64]) -> TimeSeries<f64> {
        TimeSeries::new(v.to_vec()).unwrap()
    }

    fn random_walk_db(count: usize, n: usize, seed: u64) -> Dataset<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let series = (0..count)
            .map(|_| {
                let mut v = Vec::with_capacity(n);
                let mut acc = 0.0f64;
                v.push(acc);
                for _ in 1..n {
                    acc += rng.random_range(-1.0..1.0);
                    v.push(acc);
                }
                TimeSeries::new(v).unwrap()
            })
            .collect();
        Dataset::new(series, None).unwrap()
    }

    #[test]
    fn finds_exact_match() {
        let db = random_walk_db(50, 32, 1);
        let query = db.get(17).clone();
        let params = SearchParams::new(Exponent::Finite(1), 3);
        for strategy in Strategy::ALL {
            let idx = build_index(&db, 8).unwrap();
            let out = nn_search(&query, &db, strategy, &params, Some((&idx.0, &idx.1)), SearchOptions::default()).unwrap();
            assert_eq!(out.best_id, 17, "{strategy}");
            assert_eq!(out.best_dist, 0.0, "{strategy}");
            assert!(out.counters.balanced(), "{strategy}");
        }
    }

    #[test]
    fn singleton_db() {
        let db = Dataset::new(vec![ts(&[1.0, 2.0, 3.0])], None).unwrap();
        let query = ts(&[0.0, 0.0, 0.0]);
        let params = SearchParams::new(Exponent::Finite(1), 1);
        let out = nn_linear_keogh(&query, &db, &params).unwrap();
        assert_eq!(out.best_id, 0);
        assert_eq!(out.counters.dtw_evaluations, 1);
        let improved = nn_linear_improved(&query, &db, &params).unwrap();
        assert_eq!(improved.best_id, 0);
        assert_eq!(improved.best_dist, out.best_dist);
    }

    #[test]
    fn all_strategies_agree_with_exhaustive() {
        let db = random_walk_db(100, 64, 7);
        let queries = random_walk_db(10, 64, 8);
        let params = SearchParams::new(Exponent::Finite(1), 6);
        let (index, cover) = build_index(&db, 8).unwrap();
        for query in queries.iter() {
            let oracle = nn_exhaustive(query, &db, &params).unwrap();
            for strategy in Strategy::ALL {
                let out = nn_search(query, &db, strategy, &params, Some((&index, &cover)), SearchOptions::default()).unwrap();
                assert_eq!(out.best_id, oracle.best_id, "{strategy}");
                assert!((out.best_dist - oracle.best_dist).abs() < 1e-9, "{strategy}");
                assert!(out.counters.balanced(), "{strategy}");
            }
        }
    }

    #[test]
    fn improved_never_needs_more_dtw_than_keogh() {
        let db = random_walk_db(100, 64, 21);
        let queries = random_walk_db(8, 64, 22);
        let params = SearchParams::new(Exponent::Finite(1), 6);
        for query in queries.iter() {
            let keogh = nn_linear_keogh(query, &db, &params).unwrap();
            let improved = nn_linear_improved(query, &db, &params).unwrap();
            assert!(improved.counters.dtw_evaluations <= keogh.counters.dtw_evaluations);
            assert_eq!(improved.best_id, keogh.best_id);
        }
    }

    #[test]
    fn tree_gate_ordering() {
        let db = random_walk_db(300, 64, 31);
        let queries = random_walk_db(5, 64, 32);
        let params = SearchParams::new(Exponent::Finite(1), 6);
        let (index, cover) = build_index(&db, 8).unwrap();
        for query in queries.iter() {
            let only = nn_indexed(query, &db, &index, &cover, Strategy::TreeOnly, &params).unwrap();
            let keogh = nn_indexed(query, &db, &index, &cover, Strategy::TreeKeogh, &params).unwrap();
            let improved =
                nn_indexed(query, &db, &index, &cover, Strategy::TreeImproved, &params).unwrap();
            assert!(improved.counters.dtw_evaluations <= keogh.counters.dtw_evaluations);
            assert!(keogh.counters.dtw_evaluations <= only.counters.dtw_evaluations);
            assert_eq!(only.best_id, keogh.best_id);
            assert_eq!(keogh.best_id, improved.best_id);
        }
    }

    #[test]
    fn second_pass_prunes_spike_fixture() {
        // near-match first, then a candidate the first pass cannot reject
        let query = ts(&[0.0, 5.0, 0.0]);
        let db = Dataset::new(vec![ts(&[0.0, 4.9, 0.0]), ts(&[0.0, 0.0, 0.0])], None).unwrap();
        let params = SearchParams::new(Exponent::Finite(1), 1);
        let out = nn_linear_improved(&query, &db, &params).unwrap();
        assert_eq!(out.best_id, 0);
        assert!((out.best_dist - 0.1).abs() < 1e-9);
        assert_eq!(out.counters.dtw_evaluations, 1);
        assert_eq!(out.counters.pruned_by_lb_keogh, 0);
        assert_eq!(out.counters.pruned_by_lb_improved, 1);
    }

    #[test]
    fn linear_comparison_budgets() {
        let db = random_walk_db(80, 48, 41);
        let queries = random_walk_db(6, 48, 42);
        let params = SearchParams::new(Exponent::Finite(1), 4);
        let n = 48u64;
        let count = db.len() as u64;
        for query in queries.iter() {
            let keogh = nn_linear_keogh(query, &db, &params).unwrap();
            assert!(keogh.comparison_count.unwrap() <= (2 * count + 3) * n);

            let improved = nn_linear_improved(query, &db, &params).unwrap();
            let alpha_survivors =
                (improved.counters.candidates_seen - improved.counters.pruned_by_lb_keogh) as u64;
            assert!(
                improved.comparison_count.unwrap() <= (2 * count + 3) * n + 5 * alpha_survivors * n
            );
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let db = random_walk_db(10, 16, 51);
        let query = ts(&[0.0; 8]);
        let params = SearchParams::new(Exponent::Finite(1), 2);
        assert!(nn_linear_keogh(&query, &db, &params).is_err());

        let good_query = db.get(0).clone();
        let inf = SearchParams::new(Exponent::Infinity, 2);
        assert!(nn_linear_improved(&good_query, &db, &inf).is_err());

        let (index, cover) = build_index(&db, 4).unwrap();
        assert!(nn_indexed(&good_query, &db, &index, &cover, Strategy::TreeOnly, &inf).is_err());
        assert!(
            nn_indexed(&good_query, &db, &index, &cover, Strategy::LinearKeogh, &params).is_err()
        );

        let p2 = SearchParams::new(Exponent::Finite(2), 2);
        assert!(nn_indexed(&good_query, &db, &index, &cover, Strategy::TreeOnly, &p2).is_err());

        // index built over a different database size
        let small = db.prefix(5).unwrap();
        assert!(nn_indexed(&good_query, &small, &index, &cover, Strategy::TreeOnly, &params).is_err());
    }

    #[test]
    fn early_abandon_same_answer() {
        let db = random_walk_db(120, 64, 61);
        let queries = random_walk_db(4, 64, 62);
        let params = SearchParams::new(Exponent::Finite(1), 6);
        let opts = SearchOptions { early_abandon: true };
        for query in queries.iter() {
            let plain = nn_linear_keogh(query, &db, &params).unwrap();
            let fast = nn_linear_keogh_opts(query, &db, &params, opts).unwrap();
            assert_eq!(plain.best_id, fast.best_id);
            assert_eq!(plain.best_dist, fast.best_dist);
            assert!(fast.comparison_count.unwrap() <= plain.comparison_count.unwrap());
        }
    }
}
