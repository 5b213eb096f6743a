//! Batch property suites mirroring the acceptance criteria; `hext selftest`
//! runs them and reports one line per criterion.

use std::time::Instant;

use rand::Rng;
use serde::Serialize;

use crate::counterexample::{gen_counterexample, select_k, selection_value, u_value, v_value, verify_counterexample};
use crate::extend_c::{c0_extend, c_extend, c_feasible, forced_intervals, linf_partition};
use crate::extend_ck::{ck_extend, embed_c_into_ck, infconv_ck, reduce_ck_to_c, xi_modulus};
use crate::extend_core::{feasibility_interval, linf_vector_extend, scalar_extend, Interval, Policy};
use crate::numeric::{le_rel, HOLDER_RTOL};
use crate::sample::{self, SampleRng};
use crate::spaces::{NormedSpace, Point};
use crate::targets::{sup_dist, EcSeq, FiniteFunction, Target};

pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub pass: bool,
    pub cases: usize,
    pub failures: Vec<String>,
    #[serde(skip)]
    pub seconds: f64,
}

/// Failure collector; keeps the first few messages.
struct Tally {
    cases: usize,
    failures: Vec<String>,
    failed: usize,
}

impl Tally {
    fn new() -> Self {
        Tally { cases: 0, failures: Vec::new(), failed: 0 }
    }

    fn expect(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            self.failed += 1;
            if self.failures.len() < 5 {
                self.failures.push(msg());
            }
        }
    }

    fn finish(self, id: u8, name: &'static str, start: Instant, budget: f64) -> CriterionResult {
        let seconds = start.elapsed().as_secs_f64();
        let mut failures = self.failures;
        if seconds > budget {
            failures.push(format!("runtime {seconds:.3}s exceeds {budget}s"));
        }
        CriterionResult { id, name, pass: self.failed == 0 && seconds <= budget, cases: self.cases, failures, seconds }
    }
}

pub fn run_all(seed: u64) -> Vec<CriterionResult> {
    vec![
        counterexample_reproduction(),
        extension_correctness(seed),
        oracle_equivalence(seed + 1),
        c0_algorithm(seed + 2),
        partition_lemma(seed + 3),
        modulus_machinery(seed + 4),
        bridges(seed + 5),
        monotonicity(seed + 6),
    ]
}

pub fn counterexample_reproduction() -> CriterionResult {
    let start = Instant::now();
    let mut t = Tally::new();
    t.cases = 1;
    t.expect(select_k(2, 100) == Ok(11), || "select_k(2, 100) != 11".into());
    t.expect((selection_value(11.0) - 0.38195).abs() < 1e-5, || format!("selection value {}", selection_value(11.0)));
    match gen_counterexample(11.0, 1, 5).and_then(|i| verify_counterexample(&i).map(|c| (i, c))) {
        Err(e) => t.expect(false, || e.to_string()),
        Ok((inst, cert)) => {
            let lip = inst.pm.holder_constant(1.0);
            t.expect(lip <= 1.0 + 1e-9, || format!("Lipschitz constant {lip}"));
            for n in 1..=5u32 {
                for m in 1..=5u32 {
                    let d = sup_dist(&u_value(11.0, n), &v_value(11.0, m));
                    let want = 11f64.powi(2 * n as i32) + 11f64.powi(2 * m as i32) + 0.875;
                    t.expect(d == want, || format!("||u_{n} - v_{m}|| = {d} != {want}"));
                }
            }
            for i in &cert.intervals {
                if i.odd {
                    t.expect(i.lo >= 0.125 - 1e-9, || format!("lo({}) = {}", i.k, i.lo));
                } else {
                    t.expect(i.hi <= -0.125 + 1e-9, || format!("hi({}) = {}", i.k, i.hi));
                }
            }
            t.expect(cert.minimal_prefix_length >= 5, || {
                format!("minimal_prefix_length = {} < 5", cert.minimal_prefix_length)
            });
        }
    }
    t.finish(1, "counterexample reproduction", start, 1.0)
}

fn fresh(rng: &mut SampleRng, space: &NormedSpace, taken: &[Point]) -> Point {
    sample::fresh_point(rng, space.dim(), 5.0, taken)
}

pub fn extension_correctness(seed: u64) -> CriterionResult {
    let start = Instant::now();
    let mut rng = sample::rng(seed);
    let mut t = Tally::new();
    for case in 0..500 {
        t.cases += 1;
        let space = sample::space(&mut rng, 4);
        let m = rng.gen_range(1..=8);
        let alpha = sample::alpha(&mut rng);

        let pm = sample::scalar_map(&mut rng, &space, m, alpha);
        let x = fresh(&mut rng, &space, pm.points());
        match feasibility_interval(&pm, &x) {
            Ok(iv) => t.expect(!iv.empty, || format!("case {case}: empty interval [{}, {}]", iv.lo, iv.hi)),
            Err(e) => t.expect(false, || format!("case {case}: {e}")),
        }
        for policy in [Policy::Lo, Policy::Mid, Policy::Hi] {
            let r = scalar_extend(&pm, &x, policy).and_then(|v| pm.verify_extension(&x, &v));
            t.expect(r.is_ok(), || format!("case {case}: scalar {policy}: {r:?}"));
        }

        let len = rng.gen_range(1..=4);
        let pm = sample::vector_map(&mut rng, &space, m, len, alpha);
        let x = fresh(&mut rng, &space, pm.points());
        let r = linf_vector_extend(&pm, &x, Policy::Mid).and_then(|v| pm.verify_extension(&x, &v));
        t.expect(r.is_ok(), || format!("case {case}: vector: {r:?}"));

        let pm = sample::sequence_map(&mut rng, &space, m, 5, alpha, true);
        let x = fresh(&mut rng, &space, pm.points());
        let r = c0_extend(&pm, &x).and_then(|(v, _)| pm.verify_extension(&x, &v));
        t.expect(r.is_ok(), || format!("case {case}: c0: {r:?}"));

        let pm = sample::sequence_map(&mut rng, &space, m, 5, alpha, false);
        let x = fresh(&mut rng, &space, pm.points());
        let feasible = c_feasible(&pm, &x).map(|f| f.feasible);
        t.expect(feasible == Ok(true), || format!("case {case}: c_feasible {feasible:?}"));
        let r = c_extend(&pm, &x, Policy::Mid).and_then(|(v, _)| pm.verify_extension(&x, &v));
        t.expect(r.is_ok(), || format!("case {case}: c: {r:?}"));

        let size = rng.gen_range(1..=6);
        let k = sample::metric_space(&mut rng, size);
        let pm = sample::ck_map(&mut rng, &space, &k, m, alpha);
        let x = fresh(&mut rng, &space, pm.points());
        let r = infconv_ck(&pm, &x).and_then(|v| pm.verify_extension(&x, &v));
        t.expect(r.is_ok(), || format!("case {case}: C(K) inf-convolution: {r:?}"));
    }
    t.finish(2, "extension correctness", start, 10.0)
}

pub fn oracle_equivalence(seed: u64) -> CriterionResult {
    let start = Instant::now();
    let mut rng = sample::rng(seed);
    let mut t = Tally::new();
    for case in 0..50 {
        t.cases += 1;
        let space = NormedSpace::lp(2.0, rng.gen_range(1..=3)).unwrap();
        let m = rng.gen_range(1..=6);
        let alpha = sample::alpha(&mut rng);
        let pm = sample::scalar_map(&mut rng, &space, m, alpha);
        let x = fresh(&mut rng, &space, pm.points());
        let radii: Vec<f64> = pm.points().iter().map(|p| pm.params().radius(space.dist(p, &x).unwrap())).collect();
        let (j, r0) = radii.iter().enumerate().fold((0, f64::INFINITY), |b, (i, &r)| if r < b.1 { (i, r) } else { b });
        let centre = pm.values()[j];
        let step = 1e-3;
        let n = ((2.0 * r0 + 2.0) / step).ceil() as i64;
        let ok = |v: f64| pm.values().iter().zip(&radii).all(|(f, r)| (v - f).abs() <= *r);
        let mut found: Option<(f64, f64)> = None;
        for i in 0..=n {
            let v = centre - r0 - 1.0 + i as f64 * step;
            if ok(v) {
                found = Some(found.map_or((v, v), |(a, _)| (a, v)));
            }
        }
        let iv = feasibility_interval(&pm, &x).unwrap();
        match found {
            Some((a, b)) => t.expect((a - iv.lo).abs() <= 2e-3 && (b - iv.hi).abs() <= 2e-3, || {
                format!("case {case}: grid [{a}, {b}] vs [{}, {}]", iv.lo, iv.hi)
            }),
            None => t.expect(iv.width() < 2e-3, || format!("case {case}: grid empty, width {}", iv.width())),
        }
    }
    t.finish(3, "oracle equivalence", start, f64::INFINITY)
}

pub fn c0_algorithm(seed: u64) -> CriterionResult {
    let start = Instant::now();
    let mut rng = sample::rng(seed);
    let mut t = Tally::new();
    for case in 0..100 {
        t.cases += 1;
        let space = sample::space(&mut rng, 4);
        let m = rng.gen_range(1..=8);
        let alpha = sample::alpha(&mut rng);
        let pm = sample::sequence_map(&mut rng, &space, m, 6, alpha, true);
        let x = fresh(&mut rng, &space, pm.points());
        let (u, _) = match c0_extend(&pm, &x) {
            Ok(r) => r,
            Err(e) => {
                t.expect(false, || format!("case {case}: {e}"));
                continue;
            }
        };
        t.expect(u.tail() == 0.0, || format!("case {case}: tail {}", u.tail()));
        let len = pm.values().iter().map(EcSeq::prefix_len).chain([u.prefix_len()]).max().unwrap();
        for (y, f) in pm.points().iter().zip(pm.values()) {
            let r = pm.params().radius(space.dist(y, &x).unwrap());
            for n in 0..=len {
                let gap = (f.at(n) - u.at(n)).abs();
                t.expect(le_rel(gap, r, HOLDER_RTOL), || format!("case {case}: n = {n}: {gap} > {r}"));
            }
        }
    }
    t.finish(4, "c0 algorithm", start, f64::INFINITY)
}

fn linf(x: &[f64]) -> f64 {
    x.iter().fold(0.0_f64, |a, v| a.max(v.abs()))
}

pub fn partition_lemma(seed: u64) -> CriterionResult {
    let start = Instant::now();
    let mut rng = sample::rng(seed);
    let mut t = Tally::new();
    let eps = 0.1;
    for case in 0..100 {
        t.cases += 1;
        let dim = rng.gen_range(1..=3);
        let m = rng.gen_range(1..=30);
        let cloud = sample::linf_cloud(&mut rng, dim, m, 5.0);
        let trace = match linf_partition(&cloud, eps) {
            Ok(tr) => tr,
            Err(e) => {
                t.expect(false, || format!("case {case}: {e}"));
                continue;
            }
        };
        let mut seen = vec![false; m];
        for cell in &trace.cells {
            let a = cloud[cell.representative].coords();
            for &i in &cell.members {
                seen[i] = true;
                let x = cloud[i].coords();
                let diff: Vec<f64> = x.iter().zip(a).map(|(p, q)| p - q).collect();
                let (nx, na, d) = (linf(x), linf(a), linf(&diff));
                t.expect(nx >= na - eps - 1e-9 * na, || {
                    format!("case {case}: cell {}: norm {nx} < {na} - eps", cell.id)
                });
                t.expect(d <= nx - na + eps + 1e-9 * nx, || {
                    format!("case {case}: cell {}: {d} > {nx} - {na} + eps", cell.id)
                });
            }
        }
        t.expect(seen.iter().all(|&s| s), || format!("case {case}: uncovered point"));
    }
    t.finish(5, "partition lemma", start, f64::INFINITY)
}

pub fn modulus_machinery(seed: u64) -> CriterionResult {
    let start = Instant::now();
    let mut rng = sample::rng(seed);
    let mut t = Tally::new();
    for case in 0..100 {
        t.cases += 1;
        let size = rng.gen_range(2..=20);
        let k = sample::metric_space(&mut rng, size);
        let space = sample::space(&mut rng, 3);
        let (m, alpha) = (rng.gen_range(1..=5), sample::alpha(&mut rng));
        let pm = sample::ck_map(&mut rng, &space, &k, m, alpha);
        let x = fresh(&mut rng, &space, pm.points());
        let table = match xi_modulus(&pm, &k, &x) {
            Ok(tb) => tb,
            Err(e) => {
                t.expect(false, || format!("case {case}: {e}"));
                continue;
            }
        };
        t.expect(table.xi.windows(2).all(|w| w[0] <= w[1]), || format!("case {case}: xi decreases"));
        t.expect(table.psi[0] == 0.0 && table.psi.iter().all(|&p| p >= 0.0), || format!("case {case}: psi"));
        t.expect(table.phi(0.0) == 0.0, || format!("case {case}: phi(0) != 0"));
        for (l, p) in table.lambda_grid.iter().zip(&table.psi) {
            t.expect(table.phi(*l) >= *p, || format!("case {case}: phi({l}) < psi"));
        }
        match ck_extend(&pm, &k, &x, &table) {
            Ok(g) => {
                for (y, f) in pm.points().iter().zip(pm.values()) {
                    let r = pm.params().radius(space.dist(y, &x).unwrap());
                    let d = f.sup_distance(&g);
                    t.expect(le_rel(d, r, HOLDER_RTOL), || format!("case {case}: ||g - f(y)|| = {d} > {r}"));
                }
            }
            Err(e) => t.expect(false, || format!("case {case}: {e}")),
        }
    }
    t.finish(6, "modulus machinery", start, f64::INFINITY)
}

pub fn bridges(seed: u64) -> CriterionResult {
    let start = Instant::now();
    let mut rng = sample::rng(seed);
    let mut t = Tally::new();
    for case in 0..100 {
        t.cases += 1;
        let size = rng.gen_range(1..=10);
        let k = sample::metric_space(&mut rng, size);
        let f_set = sample::subset(&mut rng, size);
        let e = embed_c_into_ck(&k, &f_set).unwrap();
        let f = FiniteFunction((0..f_set.len()).map(|_| rng.gen_range(-3.0..3.0)).collect());
        let tf = e.extend(&f).unwrap();
        t.expect(e.restrict(&tf).unwrap() == f, || format!("case {case}: R T != id"));
        t.expect(tf.sup_norm() == f.sup_norm(), || format!("case {case}: ||Tf|| != ||f||"));
        let g = FiniteFunction((0..size).map(|_| rng.gen_range(-3.0..3.0)).collect());
        let pg = e.project(&g).unwrap();
        t.expect(e.project(&pg).unwrap() == pg, || format!("case {case}: P P != P"));
        t.expect(pg.sup_norm() <= g.sup_norm(), || format!("case {case}: ||Pg|| > ||g||"));

        let space = sample::space(&mut rng, 3);
        let (m, alpha) = (rng.gen_range(1..=5), sample::alpha(&mut rng));
        let pm = sample::ck_map(&mut rng, &space, &k, m, alpha);
        let w: Vec<(usize, usize)> =
            (0..rng.gen_range(1..=4)).map(|_| (rng.gen_range(0..size), rng.gen_range(0..size))).collect();
        let h = reduce_ck_to_c(&pm, &k, &w).unwrap();
        for i in 0..pm.len() {
            for j in i + 1..pm.len() {
                let dh = sup_dist(&h.values()[i], &h.values()[j]);
                let df = pm.values()[i].sup_distance(&pm.values()[j]);
                t.expect(dh <= df, || format!("case {case}: reduction grows ({i}, {j}): {dh} > {df}"));
            }
        }
    }
    t.finish(7, "bridges", start, f64::INFINITY)
}

pub fn monotonicity(seed: u64) -> CriterionResult {
    let start = Instant::now();
    let mut rng = sample::rng(seed);
    let mut t = Tally::new();
    for case in 0..100 {
        t.cases += 1;
        let space = sample::space(&mut rng, 3);
        let m = rng.gen_range(2..=8);
        let alpha = sample::alpha(&mut rng);
        let big = sample::sequence_map(&mut rng, &space, m, 5, alpha, false);
        let small = big.restrict(&(0..m - 1).collect::<Vec<_>>()).unwrap();
        let x = fresh(&mut rng, &space, big.points());
        let (cb, cs) = (forced_intervals(&big, &x).unwrap(), forced_intervals(&small, &x).unwrap());
        let len = cb.per_coordinate.len().max(cs.per_coordinate.len());
        for k in 0..=len {
            let (ib, is): (Interval, Interval) = (cb.interval_at(k).unwrap(), cs.interval_at(k).unwrap());
            t.expect(ib.is_subset_of(&is), || format!("case {case}: coordinate {k} grows"));
        }
        let (tb, ts) = (cb.tail_interval.unwrap(), cs.tail_interval.unwrap());
        t.expect(tb.is_subset_of(&ts), || format!("case {case}: tail grows"));
    }
    let lengths: Vec<u32> = (1..=5)
        .map(|n| verify_counterexample(&gen_counterexample(11.0, 1, n).unwrap()).unwrap().minimal_prefix_length)
        .collect();
    t.cases += 1;
    t.expect(lengths.windows(2).all(|w| w[0] <= w[1]), || format!("minimal prefix lengths {lengths:?}"));
    t.finish(8, "monotonicity", start, f64::INFINITY)
}
