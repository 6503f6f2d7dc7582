//! Scratch: search for same-w weak-triangle violations with the
//! brute-force oracle only (independent of the DP).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tsdtw::{dtw_bruteforce, Exponent, SearchParams, TimeSeries64};

#[test]
#[ignore]
fn search_same_w_triangle_violations() {
    let mut rng = ChaCha8Rng::seed_from_u64(12345);
    let n = 6usize;
    let mut found = 0;
    for case in 0..200_000 {
        let mk = |rng: &mut ChaCha8Rng| {
            TimeSeries64::new((0..n).map(|_| rng.random_range(-2i32..=2) as f64).collect())
                .unwrap()
        };
        let x = mk(&mut rng);
        let y = mk(&mut rng);
        let z = mk(&mut rng);
        for w in 1..n - 1 {
            for p in [Exponent::Finite(1), Exponent::Finite(2), Exponent::Infinity] {
                let params = SearchParams::new(p, w);
                let xy = dtw_bruteforce(&x, &y, &params).unwrap();
                let yz = dtw_bruteforce(&y, &z, &params).unwrap();
                let xz = dtw_bruteforce(&x, &z, &params).unwrap();
                let scale = ((2 * w + 1).min(n) as f64).powf(p.inverse());
                if xy + yz < xz / scale - 1e-9 {
                    println!(
                        "VIOLATION case={case} w={w} p={p}: x={:?} y={:?} z={:?}  {xy}+{yz} < {xz}/{scale}",
                        x.samples(), y.samples(), z.samples()
                    );
                    found += 1;
                    if found > 6 {
                        return;
                    }
                }
            }
        }
    }
    println!("violations found: {found}");
}
