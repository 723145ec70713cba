use cylinders::canon::{build_c6, build_o6};
use cylinders::certify::{unlock_search, Chart, SearchOptions};
use std::time::Instant;

fn main() {
    let c6 = build_c6();
    for seed in [0u64, 1, 2, 3] {
        let t0 = Instant::now();
        let opts = SearchOptions { rng_seed: seed, ..SearchOptions::default() };
        let r = unlock_search(&c6, Chart::PerLineRotations, &opts);
        println!("C6 rng_seed={seed}: gain={:+.6e} t={:.4} ({:.2?})", r.best_gain, r.best_t, t0.elapsed());
    }
    let o6 = build_o6();
    for seed in [0u64, 1] {
        let t0 = Instant::now();
        let opts = SearchOptions { rng_seed: seed, t_max: 1e-2, ..SearchOptions::default() };
        let r = unlock_search(&o6, Chart::O6Model, &opts);
        println!("O6 rng_seed={seed}: gain={:+.6e} t={:.2e} ({:.2?})", r.best_gain, r.best_t, t0.elapsed());
    }
}
