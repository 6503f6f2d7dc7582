//! 1-NN classification accuracy across norm exponents.
//!
//! For each database size and each `p`, fresh databases are generated per
//! repetition, queries are drawn from random classes, and a query counts as
//! a hit when its nearest neighbor under `DTW_p` carries its class label.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::datagen::{generate, generate_database, mix_seed, Family, GeneratorSpec};
use crate::error::{Error, Result};
use crate::params::{Exponent, SearchParams};
use crate::search::nn_linear_keogh;
use crate::series::TimeSeries;

#[derive(Debug, Clone)]
pub struct ClassifyConfig {
    pub family: Family,
    /// How many of the family's classes to use; `None` means all.
    pub classes: Option<u32>,
    pub instance_counts: Vec<usize>,
    pub p_list: Vec<Exponent>,
    pub repetitions: usize,
    pub queries_per_rep: usize,
    /// Locality constraint as a fraction of the series length (`w = n/10`
    /// at the default 0.1).
    pub w_fraction: f64,
    /// Series length; `None` uses the family default.
    pub n: Option<usize>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifyPoint {
    pub instances_per_class: usize,
    pub p: Exponent,
    pub mean_accuracy: f64,
}

#[derive(Debug, Clone)]
pub struct ClassReport {
    pub family: Family,
    pub classes: u32,
    pub n: usize,
    pub w: usize,
    pub repetitions: usize,
    pub queries_per_rep: usize,
    pub points: Vec<ClassifyPoint>,
}

impl ClassReport {
    pub fn accuracy(&self, instances_per_class: usize, p: Exponent) -> Option<f64> {
        self.points
            .iter()
            .find(|pt| pt.instances_per_class == instances_per_class && pt.p == p)
            .map(|pt| pt.mean_accuracy)
    }

    pub fn write_csv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(
            out,
            "family,classes,n,w,reps,queries_per_rep,instances_per_class,p,mean_accuracy"
        )?;
        for pt in &self.points {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                self.family,
                self.classes,
                self.n,
                self.w,
                self.repetitions,
                self.queries_per_rep,
                pt.instances_per_class,
                pt.p,
                pt.mean_accuracy
            )?;
        }
        Ok(())
    }
}

pub fn run_classification(config: &ClassifyConfig) -> Result<ClassReport> {
    let family_classes = config.family.class_count().ok_or_else(|| {
        Error::InvalidParameter(format!(
            "family {} has no class structure to classify",
            config.family
        ))
    })?;
    let classes = config.classes.unwrap_or(family_classes);
    if classes == 0 || classes > family_classes {
        return Err(Error::InvalidParameter(format!(
            "classes must lie in 1..={family_classes}"
        )));
    }
    if config.repetitions == 0 || config.queries_per_rep == 0 {
        return Err(Error::InvalidParameter(
            "repetitions and queries_per_rep must be positive".into(),
        ));
    }
    if config.instance_counts.is_empty() || config.p_list.is_empty() {
        return Err(Error::EmptyInput("instance_counts and p_list"));
    }
    let n = config.n.unwrap_or_else(|| config.family.default_length());
    let w = (config.w_fraction * n as f64).floor() as usize;

    let mut hits: Vec<Vec<u64>> =
        vec![vec![0; config.p_list.len()]; config.instance_counts.len()];
    for rep in 0..config.repetitions {
        // one database per (count, rep); queries are shared across p
        let queries: Vec<(u32, TimeSeries<f64>)> = (0..config.queries_per_rep)
            .map(|q| {
                let salt = 0xC1A5_5000u64 ^ ((rep as u64) << 24) ^ q as u64;
                let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(config.seed, salt));
                let class = rng.random_range(1..=classes);
                let series = generate(&GeneratorSpec {
                    family: config.family,
                    class_id: Some(class),
                    n,
                    seed: mix_seed(config.seed, salt ^ 0x5EED),
                })?;
                Ok((class, series))
            })
            .collect::<Result<_>>()?;

        for (ci, &count) in config.instance_counts.iter().enumerate() {
            let db = generate_database::<f64>(
                config.family,
                classes,
                count,
                n,
                mix_seed(config.seed, 0xDB00 ^ rep as u64),
            )?;
            let labels = db.labels().expect("classed families are labeled");
            for (pi, &p) in config.p_list.iter().enumerate() {
                let params = SearchParams::new(p, w);
                for (class, query) in &queries {
                    let out = nn_linear_keogh(query, &db, &params)?;
                    if labels[out.best_id] == i64::from(*class) {
                        hits[ci][pi] += 1;
                    }
                }
            }
        }
    }

    let total = (config.repetitions * config.queries_per_rep) as f64;
    let mut points = Vec::new();
    for (ci, &count) in config.instance_counts.iter().enumerate() {
        for (pi, &p) in config.p_list.iter().enumerate() {
            points.push(ClassifyPoint {
                instances_per_class: count,
                p,
                mean_accuracy: hits[ci][pi] as f64 / total,
            });
        }
    }
    Ok(ClassReport {
        family: config.family,
        classes,
        n,
        w,
        repetitions: config.repetitions,
        queries_per_rep: config.queries_per_rep,
        points,
    })
}
