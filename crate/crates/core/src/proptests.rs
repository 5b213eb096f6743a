//! Property tests over randomly generated spaces, sequences and maps.

use crate::{
    c_extend, cone_cover, feasibility_interval, forced_intervals, scalar_extend, sup_dist, EcSeq, HolderParams,
    NormedSpace, PartialMap, Point, Policy,
};
use proptest::prelude::*;

fn space_strategy() -> impl Strategy<Value = NormedSpace> {
    (1usize..=4, 0usize..5).prop_map(|(dim, kind)| match kind {
        0 => NormedSpace::lp(1.0, dim).unwrap(),
        1 => NormedSpace::lp(2.0, dim).unwrap(),
        2 => NormedSpace::lp(3.5, dim).unwrap(),
        3 if dim >= 2 => {
            NormedSpace::l1_sum(vec![NormedSpace::lp(2.0, 1).unwrap(), NormedSpace::lp(2.0, dim - 1).unwrap()]).unwrap()
        }
        _ => NormedSpace::linf(dim).unwrap(),
    })
}

fn vec_of(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0..10.0f64, dim)
}

fn seq_strategy() -> impl Strategy<Value = EcSeq> {
    (prop::collection::vec(-5.0..5.0f64, 0..6), -5.0..5.0f64).prop_map(|(p, t)| EcSeq::new(p, t))
}

fn scale_tol(v: f64) -> f64 {
    1e-9 * v.abs().max(1.0)
}

proptest! {
    #[test]
    fn norms_are_norms(
        (space, x, y, t) in space_strategy()
            .prop_flat_map(|s| { let d = s.dim(); (Just(s), vec_of(d), vec_of(d), -4.0..4.0f64) })
    ) {
        let nx = space.norm(&x).unwrap();
        let ny = space.norm(&y).unwrap();
        let sum: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        let ns = space.norm(&sum).unwrap();
        prop_assert!(ns <= nx + ny + scale_tol(nx + ny));
        let scaled: Vec<f64> = x.iter().map(|a| t * a).collect();
        let nt = space.norm(&scaled).unwrap();
        prop_assert!((nt - t.abs() * nx).abs() <= scale_tol(nt));
        prop_assert!(nx >= 0.0);
        prop_assert_eq!(space.norm(&vec![0.0; space.dim()]).unwrap(), 0.0);
    }

    #[test]
    fn sequence_distance_is_a_metric(a in seq_strategy(), b in seq_strategy(), c in seq_strategy()) {
        prop_assert_eq!(sup_dist(&a, &b), sup_dist(&b, &a));
        prop_assert_eq!(sup_dist(&a, &a), 0.0);
        prop_assert!(sup_dist(&a, &c) <= sup_dist(&a, &b) + sup_dist(&b, &c) + 1e-12);
    }

    #[test]
    fn trailing_tail_entries_do_not_change_a_sequence(p in prop::collection::vec(-5.0..5.0f64, 0..5), t in -5.0..5.0f64, extra in 0usize..4) {
        let mut padded = p.clone();
        padded.extend(std::iter::repeat_n(t, extra));
        prop_assert_eq!(EcSeq::new(padded, t), EcSeq::new(p, t));
    }

    #[test]
    fn scalar_extensions_stay_holder(
        vals in prop::collection::vec(-3.0..3.0f64, 1..7),
        seed_pts in prop::collection::vec(-5.0..5.0f64, 7),
        x in -5.0..5.0f64,
        alpha in prop::sample::select(vec![0.3, 0.5, 1.0]),
    ) {
        let m = vals.len();
        let mut pts: Vec<Point> = Vec::new();
        for &c in &seed_pts[..m] {
            if !pts.iter().any(|p| p.coords()[0] == c) && c != x {
                pts.push(Point(vec![c]));
            }
        }
        prop_assume!(!pts.is_empty());
        let vals = vals[..pts.len()].to_vec();
        let space = NormedSpace::lp(2.0, 1).unwrap();
        let pm = PartialMap::with_optimal_constant(space, pts, vals, alpha).unwrap();
        let xp = Point(vec![x]);
        let iv = feasibility_interval(&pm, &xp).unwrap();
        prop_assert!(!iv.empty);
        for policy in [Policy::Lo, Policy::Hi, Policy::Mid] {
            let v = scalar_extend(&pm, &xp, policy).unwrap();
            prop_assert!(pm.verify_extension(&xp, &v).is_ok());
        }
    }

    #[test]
    fn forced_intervals_shrink_and_contain_the_extension(
        seqs in prop::collection::vec(seq_strategy(), 2..6),
        coords in prop::collection::vec((-5.0..5.0f64, -5.0..5.0f64), 6),
    ) {
        let space = NormedSpace::lp(2.0, 2).unwrap();
        let mut pts: Vec<Point> = Vec::new();
        for &(a, b) in &coords {
            let p = Point(vec![a, b]);
            if !pts.contains(&p) && p != Point(vec![0.0, 0.0]) {
                pts.push(p);
            }
        }
        let m = seqs.len().min(pts.len());
        prop_assume!(m >= 2);
        let big = PartialMap::with_optimal_constant(space, pts[..m].to_vec(), seqs[..m].to_vec(), 1.0).unwrap();
        let small = big.restrict(&(0..m - 1).collect::<Vec<_>>()).unwrap().with_params(big.params());
        let x = Point(vec![0.0, 0.0]);
        let (cb, cs) = (forced_intervals(&big, &x).unwrap(), forced_intervals(&small, &x).unwrap());
        for k in 0..8 {
            prop_assert!(cb.interval_at(k).unwrap().is_subset_of(&cs.interval_at(k).unwrap()));
        }
        let (g, _) = c_extend(&big, &x, Policy::Mid).unwrap();
        for k in 0..8 {
            let iv = cb.interval_at(k).unwrap();
            prop_assert!(g.at(k) >= iv.lo - 1e-9 && g.at(k) <= iv.hi + 1e-9);
        }
    }
}

#[test]
fn holder_params_reject_bad_exponents() {
    assert!(HolderParams::new(1.0, 0.0).is_err());
    assert!(HolderParams::new(1.0, 1.5).is_err());
    assert!(HolderParams::new(-1.0, 0.5).is_err());
    assert!(HolderParams::new(2.0, 0.5).is_ok());
}

#[test]
fn cone_inequality_on_random_pairs() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let spaces = [
        (NormedSpace::lp(2.0, 2).unwrap(), 2000),
        (NormedSpace::linf(3).unwrap(), 2000),
        (NormedSpace::l2_l2_sum(), 40),
    ];
    for (space, pairs) in spaces {
        let cover = cone_cover(&space, 0.5, 2).unwrap();
        let mut shared = 0;
        for _ in 0..pairs {
            // y near a multiple of x, so that most pairs share a cone.
            let x: Vec<f64> = (0..space.dim()).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let s = rng.gen_range(0.1..2.0);
            let y: Vec<f64> = x.iter().map(|v| s * v + rng.gen_range(-0.05..0.05)).collect();
            let (cx, cy) = (cover.assign(&x).unwrap(), cover.assign(&y).unwrap());
            if cx.is_none() || cx != cy {
                continue;
            }
            shared += 1;
            let (nx, ny) = (space.norm(&x).unwrap(), space.norm(&y).unwrap());
            let (big, small, nb, ns) = if nx >= ny { (&x, &y, nx, ny) } else { (&y, &x, ny, nx) };
            let d = space.dist(&Point(big.clone()), &Point(small.clone())).unwrap();
            assert!(d <= nb - 0.5 * ns + 1e-9, "{x:?} {y:?}: {d} > {}", nb - 0.5 * ns);
        }
        assert!(shared > pairs / 10, "only {shared} of {pairs} pairs shared a cone");
    }
}
