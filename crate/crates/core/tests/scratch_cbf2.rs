//! Scratch: CBF violation-rate sensitivity to length, and component
//! distances of violating triples.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tsdtw::{dtw, generate, mix_seed, Exponent, Family, GeneratorSpec, SearchParams, TimeSeries64};

fn rate(n: usize, trials: usize, seed: u64) -> (usize, f64) {
    let params = SearchParams::unconstrained(Exponent::Finite(1), n);
    let mut class_rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, 0x7121A));
    let mut violations = 0usize;
    let mut worst: f64 = 0.0;
    for trial in 0..trials {
        let mut series: Vec<TimeSeries64> = Vec::new();
        for slot in 0..3u64 {
            let class = class_rng.random_range(1..=3u32);
            series.push(
                generate(&GeneratorSpec {
                    family: Family::Cbf,
                    class_id: Some(class),
                    n,
                    seed: mix_seed(seed, trial as u64 * 3 + slot),
                })
                .unwrap(),
            );
        }
        let xy = dtw(&series[0], &series[1], &params).unwrap();
        let yz = dtw(&series[1], &series[2], &params).unwrap();
        let xz = dtw(&series[0], &series[2], &params).unwrap();
        let c = xz / (xy + yz);
        if c > 1.0 + 1e-12 {
            violations += 1;
            worst = worst.max(c);
        }
    }
    (violations, worst)
}

#[test]
#[ignore]
fn cbf_rate_by_length() {
    for n in [100usize, 128] {
        let (v, worst) = rate(n, 10_000, 0xACC_06);
        println!("n={n}: {v} violations in 10000, worst C={worst:.4}");
    }
}

#[test]
#[ignore]
fn violator_components() {
    // replay trial 9255 at n=100 and print the component distances
    let n = 100usize;
    let seed = 0xACC_06u64;
    let params = SearchParams::unconstrained(Exponent::Finite(1), n);
    let mut class_rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, 0x7121A));
    let mut classes = [0u32; 3];
    for trial in 0..=9255usize {
        for slot in 0..3usize {
            let c = class_rng.random_range(1..=3u32);
            if trial == 9255 {
                classes[slot] = c;
            }
        }
    }
    let series: Vec<TimeSeries64> = (0..3u64)
        .map(|slot| {
            generate(&GeneratorSpec {
                family: Family::Cbf,
                class_id: Some(classes[slot as usize]),
                n,
                seed: mix_seed(seed, 9255u64 * 3 + slot),
            })
            .unwrap()
        })
        .collect();
    let xy = dtw(&series[0], &series[1], &params).unwrap();
    let yz = dtw(&series[1], &series[2], &params).unwrap();
    let xz = dtw(&series[0], &series[2], &params).unwrap();
    println!("classes={classes:?} xy={xy:.2} yz={yz:.2} xz={xz:.2} C={:.4}", xz / (xy + yz));
    for (i, s) in series.iter().enumerate() {
        let mean = s.iter().sum::<f64>() / n as f64;
        let max = s.iter().cloned().fold(f64::MIN, f64::max);
        println!("series {i}: mean {mean:.2}, max {max:.2}");
    }
}
