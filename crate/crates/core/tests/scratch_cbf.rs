//! Scratch: inspect CBF triangle violations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tsdtw::{dtw, generate, mix_seed, Exponent, Family, GeneratorSpec, SearchParams};

#[test]
#[ignore]
fn inspect_cbf_violations() {
    let n = 100usize;
    let seed = 0xACC_06u64;
    let params = SearchParams::unconstrained(Exponent::Finite(1), n);
    let mut class_rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, 0x7121A));
    let mut worst: Vec<(f64, usize, [u32; 3])> = Vec::new();
    for trial in 0..10_000usize {
        let mut classes = [0u32; 3];
        let mut series = Vec::new();
        for slot in 0..3u64 {
            let class = class_rng.random_range(1..=3u32);
            classes[slot as usize] = class;
            series.push(
                generate::<f64>(&GeneratorSpec {
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
            worst.push((c, trial, classes));
        }
    }
    worst.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    println!("violations: {}", worst.len());
    for (c, trial, classes) in worst.iter().take(12) {
        println!("C={c:.4} trial={trial} classes={classes:?}");
    }
    // distribution of C near 1 for context
    let mut near = 0;
    for (c, _, _) in &worst {
        if *c < 1.02 {
            near += 1;
        }
    }
    println!("violations with C < 1.02: {near}");
}
