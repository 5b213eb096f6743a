//! A 1-Lipschitz map from a finite subset of `l2^2 ⊕_1 l2^2` into `c` whose
//! admissible values at the origin alternate in sign.
//!
//! With `x_n = (K^2n, K^n, 0, 0)` and `y_n = (0, 0, K^2n, K^n)`, the values
//! `u_n`, `v_n` are pushed `5/8` above `K^2n` on odd (resp. even) coordinates
//! `k <= n`, and `1/4` otherwise. Since `||x_n|| <= K^2n + 1/2`, any extension
//! `w` at the origin must have `w(k) >= 1/8` on odd `k <= N` and
//! `w(k) <= -1/8` on even `k <= N`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::extend_c::forced_intervals;
use crate::extend_core::{Interval, PartialMap};
use crate::numeric::HOLDER_RTOL;
use crate::spaces::{HolderParams, NormedSpace, Point};
use crate::targets::{sup_dist, EcSeq};

/// Smallest relative resolution of `3/8` against `K^2N` that we accept.
pub const PRECISION_FLOOR: f64 = 1e-12;

/// Slack on the `±1/8` oscillation bounds.
pub const OSCILLATION_TOL: f64 = 1e-9;

/// `½ (1 - K^-2) (K / (K+1))^3`; a usable `K` makes this exceed `3/8`.
pub fn selection_value(k: f64) -> f64 {
    0.5 * (1.0 - 1.0 / (k * k)) * (k / (k + 1.0)).powi(3)
}

pub fn passes_selection(k: f64) -> bool {
    selection_value(k) > 0.375
}

/// Smallest integer in `lo..=hi` passing the selection inequality.
pub fn select_k(lo: u32, hi: u32) -> Result<u32> {
    if lo > hi {
        return Err(Error::invalid(format!("empty search range [{lo}, {hi}]")));
    }
    (lo..=hi)
        .find(|&k| passes_selection(f64::from(k)))
        .ok_or_else(|| Error::invalid(format!("no integer in [{lo}, {hi}] passes the selection inequality")))
}

/// Largest `N` with `0.375 / K^2N >= 1e-12`.
pub fn max_safe_n(k: f64) -> u32 {
    let mut n = 0;
    while 0.375 / k.powi(2 * (n as i32 + 1)) >= PRECISION_FLOOR {
        n += 1;
    }
    n
}

/// One numerically re-checked inequality of the construction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

impl Check {
    fn le(name: String, lhs: f64, rhs: f64) -> Self {
        Check { name, lhs, rhs, pass: lhs <= rhs }
    }

    fn ge(name: String, lhs: f64, rhs: f64) -> Self {
        Check { name, lhs, rhs, pass: lhs >= rhs }
    }

    fn eq(name: String, lhs: f64, rhs: f64) -> Self {
        Check { name, lhs, rhs, pass: lhs == rhs }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexampleInstance {
    #[serde(rename = "K")]
    pub kparam: f64,
    /// Least index from which the cross inequality holds on `n1..=N`.
    pub n0: u32,
    pub n1: u32,
    #[serde(rename = "N")]
    pub n: u32,
    pub pm: PartialMap<EcSeq>,
    pub checks: Vec<Check>,
}

impl CounterexampleInstance {
    pub fn x_point(&self, n: u32) -> Point {
        x_point(self.kparam, n)
    }

    pub fn y_point(&self, n: u32) -> Point {
        y_point(self.kparam, n)
    }

    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

fn x_point(k: f64, n: u32) -> Point {
    let kn = k.powi(n as i32);
    Point(vec![kn * kn, kn, 0.0, 0.0])
}

fn y_point(k: f64, n: u32) -> Point {
    let kn = k.powi(n as i32);
    Point(vec![0.0, 0.0, kn * kn, kn])
}

fn k2n(k: f64, n: u32) -> f64 {
    k.powi(2 * n as i32)
}

/// `u_n`: `K^2n + 5/8` on odd `k <= n` (1-based), `K^2n + 1/4` elsewhere.
pub fn u_value(k: f64, n: u32) -> EcSeq {
    let base = k2n(k, n);
    let prefix = (1..=n).map(|i| if i % 2 == 1 { base + 0.625 } else { base + 0.25 }).collect();
    EcSeq::new(prefix, base + 0.25)
}

/// `v_n`: `-(K^2n + 5/8)` on even `k <= n`, `-(K^2n + 1/4)` elsewhere.
pub fn v_value(k: f64, n: u32) -> EcSeq {
    let base = k2n(k, n);
    let prefix = (1..=n).map(|i| if i % 2 == 0 { -(base + 0.625) } else { -(base + 0.25) }).collect();
    EcSeq::new(prefix, -(base + 0.25))
}

/// Builds the instance on `n1..=N` and re-checks every inequality it relies on.
pub fn gen_counterexample(kparam: f64, n1: u32, n: u32) -> Result<CounterexampleInstance> {
    if !(kparam > 1.0 && kparam.is_finite()) {
        return Err(Error::invalid(format!("K must be a finite real > 1, got {kparam}")));
    }
    if !passes_selection(kparam) {
        return Err(Error::invalid(format!(
            "K = {kparam} fails the selection inequality (value {} <= 3/8)",
            selection_value(kparam)
        )));
    }
    if n1 < 1 || n < n1 {
        return Err(Error::invalid(format!("need 1 <= n1 <= N, got n1 = {n1}, N = {n}")));
    }
    let safe = max_safe_n(kparam);
    if n > safe {
        return Err(Error::PrecisionExceeded { max_safe_n: safe });
    }

    let space = NormedSpace::l2_l2_sum();
    let range: Vec<u32> = (n1..=n).collect();
    let norm = |p: &Point| space.norm_unchecked(p.coords());
    let dist = |p: &Point, q: &Point| space.dist_unchecked(p.coords(), q.coords());
    let k = kparam;

    let cross_ok = |a: u32, b: u32| dist(&x_point(k, a), &y_point(k, b)) >= k2n(k, a) + k2n(k, b) + 0.875;
    let n0 = range
        .iter()
        .copied()
        .find(|&n0| {
            range.iter().filter(|&&a| a >= n0).all(|&a| range.iter().filter(|&&b| b >= n0).all(|&b| cross_ok(a, b)))
        })
        .unwrap_or(n + 1);
    if n0 > n1 {
        return Err(Error::invalid(format!("cross inequality needs n >= {n0} but the instance starts at n1 = {n1}")));
    }

    let mut checks = vec![Check {
        name: "selection: ½(1-K^-2)(K/(K+1))^3 > 3/8".into(),
        lhs: selection_value(k),
        rhs: 0.375,
        pass: passes_selection(k),
    }];
    for &a in &range {
        checks.push(Check::le(format!("||x_{a}|| <= K^{{2n}} + 1/2"), norm(&x_point(k, a)), k2n(k, a) + 0.5));
        checks.push(Check::le(format!("||y_{a}|| <= K^{{2n}} + 1/2"), norm(&y_point(k, a)), k2n(k, a) + 0.5));
    }
    for &a in &range {
        for &b in &range {
            let (xa, yb) = (x_point(k, a), y_point(k, b));
            checks.push(Check::ge(
                format!("||x_{a} - y_{b}|| >= K^{{2n}} + K^{{2m}} + 7/8"),
                dist(&xa, &yb),
                k2n(k, a) + k2n(k, b) + 0.875,
            ));
            let sum = norm(&xa) + norm(&yb);
            checks.push(Check {
                name: format!("||x_{a} - y_{b}|| = ||x_{a}|| + ||y_{b}||"),
                lhs: dist(&xa, &yb),
                rhs: sum,
                pass: (dist(&xa, &yb) - sum).abs() <= 1e-12 * sum,
            });
            checks.push(Check::eq(
                format!("||u_{a} - v_{b}|| = K^{{2n}} + K^{{2m}} + 7/8"),
                sup_dist(&u_value(k, a), &v_value(k, b)),
                k2n(k, a) + k2n(k, b) + 0.875,
            ));
            if a > b {
                let bound = k2n(k, a) - k2n(k, b) + 0.375;
                checks.push(Check::ge(
                    format!("||x_{a} - x_{b}|| >= K^{{2n}} - K^{{2m}} + 3/8"),
                    dist(&xa, &x_point(k, b)),
                    bound,
                ));
                checks.push(Check::ge(
                    format!("||y_{a} - y_{b}|| >= K^{{2n}} - K^{{2m}} + 3/8"),
                    dist(&y_point(k, a), &yb),
                    bound,
                ));
                checks.push(Check::le(
                    format!("||u_{a} - u_{b}|| <= K^{{2n}} - K^{{2m}} + 3/8"),
                    sup_dist(&u_value(k, a), &u_value(k, b)),
                    bound,
                ));
                checks.push(Check::le(
                    format!("||v_{a} - v_{b}|| <= K^{{2n}} - K^{{2m}} + 3/8"),
                    sup_dist(&v_value(k, a), &v_value(k, b)),
                    bound,
                ));
            }
        }
    }

    let points: Vec<Point> = range.iter().map(|&a| x_point(k, a)).chain(range.iter().map(|&a| y_point(k, a))).collect();
    let values: Vec<EcSeq> = range.iter().map(|&a| u_value(k, a)).chain(range.iter().map(|&a| v_value(k, a))).collect();
    let pm = PartialMap::new(space, points, values, HolderParams::new(1.0, 1.0)?)?;
    let lip = pm.holder_constant(1.0);
    checks.push(Check::le("Lipschitz constant <= 1".into(), lip, 1.0 + HOLDER_RTOL));

    if let Some(bad) = checks.iter().find(|c| !c.pass) {
        return Err(Error::Inconsistent(format!("{}: lhs {} rhs {}", bad.name, bad.lhs, bad.rhs)));
    }
    Ok(CounterexampleInstance { kparam, n0, n1, n, pm, checks })
}

/// Forced interval of the 1-based coordinate `k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForcedInterval {
    pub k: u32,
    pub odd: bool,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObstructionCertificate {
    #[serde(rename = "N")]
    pub n: u32,
    pub intervals: Vec<ForcedInterval>,
    pub tail: Interval,
    /// `min lo(k)` over odd `k <= N`.
    pub odd_lo_min: f64,
    /// `max hi(k)` over even `k <= N`; absent when `N = 1`.
    pub even_hi_max: Option<f64>,
    /// Smallest `p` such that some sequence constant after its first `p`
    /// entries meets every forced interval.
    pub minimal_prefix_length: u32,
    pub checks: Vec<Check>,
}

impl ObstructionCertificate {
    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Forced intervals of the instance at the origin and their sign pattern.
pub fn verify_counterexample(inst: &CounterexampleInstance) -> Result<ObstructionCertificate> {
    let origin = Point::origin(4);
    let cert = forced_intervals(&inst.pm, &origin)?;
    let tail = cert.tail_interval.ok_or_else(|| Error::Inconsistent("forced intervals carry no tail".into()))?;
    let n = inst.n;
    let mut intervals = Vec::with_capacity(n as usize);
    for k in 1..=n {
        let iv = cert.interval_at(k as usize - 1).expect("tail interval present");
        if iv.empty {
            return Err(Error::Inconsistent(format!("forced interval {k} is empty: [{}, {}]", iv.lo, iv.hi)));
        }
        intervals.push(ForcedInterval { k, odd: k % 2 == 1, lo: iv.lo, hi: iv.hi });
    }
    if tail.empty {
        return Err(Error::Inconsistent(format!("tail interval is empty: [{}, {}]", tail.lo, tail.hi)));
    }

    let odd_lo_min = intervals.iter().filter(|i| i.odd).map(|i| i.lo).fold(f64::INFINITY, f64::min);
    let even_hi_max = intervals.iter().filter(|i| !i.odd).map(|i| i.hi).reduce(f64::max);

    // A sequence with prefix length p is one constant on every k > p.
    let minimal_prefix_length = (0..=n)
        .find(|&p| !intervals[p as usize..].iter().fold(tail, |acc, i| acc.intersect(&Interval::new(i.lo, i.hi))).empty)
        .expect("p = N leaves only the tail interval");

    let mut checks = Vec::new();
    for i in &intervals {
        if i.odd {
            checks.push(Check::ge(format!("lo({}) >= 1/8 (odd)", i.k), i.lo, 0.125 - OSCILLATION_TOL));
        } else {
            checks.push(Check::le(format!("hi({}) <= -1/8 (even)", i.k), i.hi, -0.125 + OSCILLATION_TOL));
        }
    }
    Ok(ObstructionCertificate { n, intervals, tail, odd_lo_min, even_hi_max, minimal_prefix_length, checks })
}

impl ForcedInterval {
    pub fn contains(&self, inner: &ForcedInterval) -> bool {
        self.lo <= inner.lo && inner.hi <= self.hi
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selection_values() {
        assert!((selection_value(10.0) - 0.3719).abs() < 1e-4);
        assert!(!passes_selection(10.0));
        assert!((selection_value(11.0) - 0.38195).abs() < 1e-5);
        assert!(passes_selection(11.0));
        assert_eq!(select_k(2, 100).unwrap(), 11);
        assert!(select_k(5, 4).is_err());
    }

    #[test]
    fn precision_bound() {
        assert_eq!(max_safe_n(11.0), 5);
        assert_eq!(gen_counterexample(11.0, 1, 6).unwrap_err(), Error::PrecisionExceeded { max_safe_n: 5 });
    }

    #[test]
    fn small_instances() {
        let one = gen_counterexample(11.0, 1, 1).unwrap();
        assert_eq!(one.pm.len(), 2);
        assert_eq!(one.n0, 1);
        let four = gen_counterexample(11.0, 1, 4).unwrap();
        assert_eq!(four.pm.len(), 8);
        assert!(four.pm.holder_constant(1.0) <= 1.0 + 1e-9);
        assert!(gen_counterexample(10.0, 1, 4).is_err());
    }

    #[test]
    fn value_layout() {
        let u = u_value(11.0, 3);
        assert_eq!(u.at(0), 121f64.powi(3) + 0.625);
        assert_eq!(u.at(1), 121f64.powi(3) + 0.25);
        assert_eq!(u.at(2), 121f64.powi(3) + 0.625);
        assert_eq!(u.at(7), 121f64.powi(3) + 0.25);
        let v = v_value(11.0, 2);
        assert_eq!(v.at(0), -(14641.0 + 0.25));
        assert_eq!(v.at(1), -(14641.0 + 0.625));
    }

    #[test]
    fn obstruction_signs() {
        let c = verify_counterexample(&gen_counterexample(11.0, 1, 4).unwrap()).unwrap();
        assert!(c.all_checks_pass());
        assert!(c.odd_lo_min >= 0.125 - 1e-9);
        assert!(c.even_hi_max.unwrap() <= -0.125 + 1e-9);
        let c1 = verify_counterexample(&gen_counterexample(11.0, 1, 1).unwrap()).unwrap();
        assert!(c1.intervals[0].lo >= 0.125 - 1e-9);
        assert!(c1.even_hi_max.is_none());
    }
}
