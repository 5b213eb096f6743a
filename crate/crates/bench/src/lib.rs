//! Seeded problem generators shared by the benchmarks.

use hext_core::{EcSeq, HolderParams, NormedSpace, PartialMap, Point};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_points(rng: &mut ChaCha8Rng, dim: usize, m: usize) -> Vec<Point> {
    (0..m).map(|_| Point((0..dim).map(|_| rng.gen_range(-10.0..10.0)).collect())).collect()
}

/// Scalar 1-Lipschitz map on `m` random points of `l_inf^dim`.
pub fn scalar_instance(dim: usize, m: usize, seed: u64) -> PartialMap<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = random_points(&mut rng, dim, m);
    let values = points.iter().map(|p| p.0.iter().sum::<f64>() / dim as f64).collect();
    PartialMap::new(NormedSpace::linf(dim).unwrap(), points, values, HolderParams::new(1.0, 1.0).unwrap()).unwrap()
}

/// `c0`-valued map on `m` points of `l2^dim` with prefixes of length `len`,
/// carrying its exact Lipschitz constant.
pub fn c0_instance(dim: usize, m: usize, len: usize, seed: u64) -> PartialMap<EcSeq> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = random_points(&mut rng, dim, m);
    let values = (0..m).map(|_| EcSeq::new((0..len).map(|_| rng.gen_range(-1.0..1.0)).collect(), 0.0)).collect();
    PartialMap::with_optimal_constant(NormedSpace::lp(2.0, dim).unwrap(), points, values, 1.0).unwrap()
}

/// Random points of `l_inf^dim` away from the origin.
pub fn linf_cloud(dim: usize, m: usize, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..m)
        .map(|_| loop {
            let p: Vec<f64> = (0..dim).map(|_| rng.gen_range(-5.0..5.0)).collect();
            if p.iter().any(|c| c.abs() > 0.1) {
                break Point(p);
            }
        })
        .collect()
}
