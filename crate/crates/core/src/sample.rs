//! Seeded random instances for property suites and benchmarks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::extend_core::{PartialMap, TargetValue};
use crate::spaces::{NormedSpace, Point};
use crate::targets::{EcSeq, FiniteFunction, FiniteMetricSpace};

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub const ALPHAS: [f64; 3] = [0.3, 0.5, 1.0];

pub fn alpha(rng: &mut SampleRng) -> f64 {
    *ALPHAS.choose(rng).expect("nonempty")
}

/// One of `l1`, `l2`, `l3`, `l_inf`, a 1-sum of two Euclidean blocks, or a
/// polytope norm, in dimension `1..=max_dim`.
pub fn space(rng: &mut SampleRng, max_dim: usize) -> NormedSpace {
    let dim = rng.gen_range(1..=max_dim.max(1));
    match rng.gen_range(0..6) {
        0 => NormedSpace::lp(1.0, dim).unwrap(),
        1 => NormedSpace::lp(2.0, dim).unwrap(),
        2 => NormedSpace::lp(3.0, dim).unwrap(),
        3 => NormedSpace::linf(dim).unwrap(),
        4 if dim >= 2 => {
            let a = rng.gen_range(1..dim);
            NormedSpace::l1_sum(vec![NormedSpace::lp(2.0, a).unwrap(), NormedSpace::lp(2.0, dim - a).unwrap()]).unwrap()
        }
        _ => {
            let mut rows: Vec<Vec<f64>> =
                (0..dim).map(|i| (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
            for _ in 0..rng.gen_range(1..=3) {
                rows.push((0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect());
            }
            NormedSpace::polytope(rows).unwrap()
        }
    }
}

pub fn points(rng: &mut SampleRng, dim: usize, m: usize, scale: f64) -> Vec<Point> {
    (0..m).map(|_| Point((0..dim).map(|_| rng.gen_range(-scale..scale)).collect())).collect()
}

/// A point of the space outside `taken`.
pub fn fresh_point(rng: &mut SampleRng, dim: usize, scale: f64, taken: &[Point]) -> Point {
    loop {
        let p = Point((0..dim).map(|_| rng.gen_range(-scale..scale)).collect());
        if !taken.contains(&p) {
            return p;
        }
    }
}

fn with_constant<V: TargetValue>(space: NormedSpace, pts: Vec<Point>, values: Vec<V>, alpha: f64) -> PartialMap<V> {
    PartialMap::with_optimal_constant(space, pts, values, alpha).expect("random points are distinct")
}

pub fn scalar_map(rng: &mut SampleRng, space: &NormedSpace, m: usize, alpha: f64) -> PartialMap<f64> {
    let pts = points(rng, space.dim(), m, 5.0);
    let values = (0..m).map(|_| rng.gen_range(-3.0..3.0)).collect();
    with_constant(space.clone(), pts, values, alpha)
}

pub fn vector_map(
    rng: &mut SampleRng,
    space: &NormedSpace,
    m: usize,
    len: usize,
    alpha: f64,
) -> PartialMap<FiniteFunction> {
    let pts = points(rng, space.dim(), m, 5.0);
    let values = (0..m).map(|_| FiniteFunction((0..len).map(|_| rng.gen_range(-3.0..3.0)).collect())).collect();
    with_constant(space.clone(), pts, values, alpha)
}

/// Values in `c0` (`zero_tail`) or `c` with prefixes of length up to `max_len`.
pub fn sequence_map(
    rng: &mut SampleRng,
    space: &NormedSpace,
    m: usize,
    max_len: usize,
    alpha: f64,
    zero_tail: bool,
) -> PartialMap<EcSeq> {
    let pts = points(rng, space.dim(), m, 5.0);
    let values = (0..m)
        .map(|_| {
            let len = rng.gen_range(0..=max_len);
            let prefix = (0..len).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let tail = if zero_tail { 0.0 } else { rng.gen_range(-3.0..3.0) };
            EcSeq::new(prefix, tail)
        })
        .collect();
    with_constant(space.clone(), pts, values, alpha)
}

/// `m` random points of the plane with the Euclidean metric.
pub fn metric_space(rng: &mut SampleRng, m: usize) -> FiniteMetricSpace {
    let pts: Vec<[f64; 2]> = (0..m).map(|_| [rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)]).collect();
    let rho = pts
        .iter()
        .map(|a| pts.iter().map(|b| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()).collect())
        .collect();
    FiniteMetricSpace::new(rho).expect("distinct random points")
}

/// Values are random Lipschitz functions on `K` (random slopes of the distance
/// to a random anchor) so that the mixed excess has structure.
pub fn ck_map(
    rng: &mut SampleRng,
    space: &NormedSpace,
    kspace: &FiniteMetricSpace,
    m: usize,
    alpha: f64,
) -> PartialMap<FiniteFunction> {
    let pts = points(rng, space.dim(), m, 5.0);
    let size = kspace.size();
    let values = (0..m)
        .map(|_| {
            let anchor = rng.gen_range(0..size);
            let slope = rng.gen_range(-2.0..2.0);
            let shift = rng.gen_range(-1.0..1.0);
            FiniteFunction((0..size).map(|t| shift + slope * kspace.rho(anchor, t)).collect())
        })
        .collect();
    with_constant(space.clone(), pts, values, alpha)
}

/// Nonzero points of `[-scale, scale]^dim`.
pub fn linf_cloud(rng: &mut SampleRng, dim: usize, m: usize, scale: f64) -> Vec<Point> {
    (0..m)
        .map(|_| loop {
            let p: Vec<f64> = (0..dim).map(|_| rng.gen_range(-scale..scale)).collect();
            if p.iter().any(|&c| c != 0.0) {
                break Point(p);
            }
        })
        .collect()
}

/// A nonempty random subset of `0..m`, in increasing order.
pub fn subset(rng: &mut SampleRng, m: usize) -> Vec<usize> {
    let k = rng.gen_range(1..=m);
    let mut all: Vec<usize> = (0..m).collect();
    all.shuffle(rng);
    let mut s = all[..k].to_vec();
    s.sort_unstable();
    s
}
