//! One-point extension into `c` and `c0` for maps with eventually-constant
//! values.

use serde::Serialize;

use super::cones::{data_cones, ConeCover};
use crate::error::{Error, Result};
use crate::extend_core::{certificate, envelope, FeasibilityCertificate, OnePointExtend, PartialMap, Policy};
use crate::numeric::{le_rel, HOLDER_RTOL};
use crate::spaces::Point;
use crate::targets::EcSeq;

/// Fraction of `K dist(x0, M)^alpha` used as the small-coordinate threshold;
/// strictly below one half.
pub const C0_EPSILON_FRACTION: f64 = 0.49;

/// Opening of the cones used by the `c0` construction.
pub const C0_CONE_DELTA: f64 = 0.5;

/// Record of one run of [`c0_extend`]. Indices refer to domain points; `eta`
/// and `signs` are 0-based over sequence positions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct C0Trace {
    pub epsilon: f64,
    /// Positions `n < cutoff` keep `eta[n]` unchanged.
    pub cutoff: usize,
    pub cone_directions: Vec<Point>,
    /// Cone of every domain point.
    pub assignment: Vec<usize>,
    /// Minimal-norm domain point of every cone (after translation).
    pub representatives: Vec<usize>,
    pub eta: Vec<f64>,
    pub signs: Vec<i8>,
}

/// Extends `pm` (all values in `c0`) to `x0` with a value in `c0`, keeping the
/// Hölder constant.
///
/// The point `x0` is moved to the origin. The domain is split into cones
/// around the directions of its points; each cone keeps its smallest-norm
/// point as representative. Positions up to the last one where some
/// representative is at least `epsilon` in absolute value take the midpoint of
/// the scalar admissible interval `eta_n`; beyond that the value is clipped to
/// `sign(eta_n) * min(|eta_n|, max_i |f(x_i)(n)|)`, which vanishes eventually.
pub fn c0_extend(pm: &PartialMap<EcSeq>, x0: &Point) -> Result<(EcSeq, C0Trace)> {
    c0_extend_inner(pm, x0, C0_CONE_DELTA, |points| {
        let space = pm.space();
        Ok(data_cones(space, points, C0_CONE_DELTA))
    })
}

/// As [`c0_extend`], with cones taken from a precomputed sphere covering.
pub fn c0_extend_with_cover(pm: &PartialMap<EcSeq>, x0: &Point, cover: &ConeCover) -> Result<(EcSeq, C0Trace)> {
    if cover.space() != pm.space() {
        return Err(Error::invalid("cone cover belongs to a different space"));
    }
    c0_extend_inner(pm, x0, cover.delta, |points| {
        let assignment = points
            .iter()
            .map(|p| {
                cover.assign(p)?.ok_or_else(|| Error::NetConstruction("domain point not covered by any cone".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((cover.directions.clone(), assignment))
    })
}

fn c0_extend_inner(
    pm: &PartialMap<EcSeq>,
    x0: &Point,
    delta: f64,
    cones: impl FnOnce(&[Vec<f64>]) -> Result<(Vec<Point>, Vec<usize>)>,
) -> Result<(EcSeq, C0Trace)> {
    pm.require_outside(x0)?;
    if let Some(i) = pm.values().iter().position(|v| !v.is_c0()) {
        return Err(Error::invalid(format!("value {i} is not in c0 (tail != 0)")));
    }
    pm.verify_holder()?;

    let params = pm.params();
    let space = pm.space();
    let shifted: Vec<Vec<f64>> = pm.points().iter().map(|p| p.sub(x0).0).collect();
    let norms: Vec<f64> = shifted.iter().map(|p| space.norm_unchecked(p)).collect();
    let radii: Vec<f64> = norms.iter().map(|&n| params.radius(n)).collect();
    let min_norm = norms.iter().copied().fold(f64::INFINITY, f64::min);
    let epsilon = C0_EPSILON_FRACTION * params.radius(min_norm);

    let (directions, assignment) = cones(&shifted)?;
    let mut representatives: Vec<Option<usize>> = vec![None; directions.len()];
    for (i, &c) in assignment.iter().enumerate() {
        match representatives[c] {
            Some(r) if norms[r] <= norms[i] => {}
            _ => representatives[c] = Some(i),
        }
    }
    let representatives: Vec<usize> = representatives.into_iter().flatten().collect();
    for (i, &c) in assignment.iter().enumerate() {
        let rep = representatives
            .iter()
            .copied()
            .find(|&r| assignment[r] == c)
            .expect("every used cone has a representative");
        let gap = space.dist_unchecked(&shifted[i], &shifted[rep]);
        if !le_rel(gap, norms[i] - (1.0 - delta) * norms[rep], HOLDER_RTOL) {
            return Err(Error::Inconsistent(format!(
                "cone inequality fails for point {i} against representative {rep}"
            )));
        }
    }

    let values = pm.values();
    let joint = values.iter().map(EcSeq::prefix_len).max().unwrap_or(0);
    let cutoff = representatives
        .iter()
        .map(|&r| values[r].prefix().iter().rposition(|v| *v != 0.0 && v.abs() >= epsilon).map_or(0, |n| n + 1))
        .max()
        .unwrap_or(0);

    let mut eta = Vec::with_capacity(joint);
    let mut signs = Vec::with_capacity(joint);
    let mut u = Vec::with_capacity(joint);
    for n in 0..joint {
        let iv = envelope(values.iter().map(|v| v.at(n)), &radii).interval;
        if iv.empty {
            return Err(Error::Infeasible { coordinate: n.to_string(), lo: iv.lo, hi: iv.hi });
        }
        let e = iv.mid();
        let sign: i8 = if e < 0.0 { -1 } else { 1 };
        eta.push(e);
        signs.push(sign);
        if n < cutoff {
            u.push(e);
        } else {
            let cap = representatives.iter().map(|&r| values[r].at(n).abs()).fold(0.0, f64::max);
            u.push(f64::from(sign) * e.abs().min(cap));
        }
    }
    let out = EcSeq::new(u, 0.0);

    // |f(x)(n) - u(n)| <= K ||x - x0||^alpha at every position (tails are 0).
    for (i, v) in values.iter().enumerate() {
        for n in 0..joint {
            let gap = (v.at(n) - out.at(n)).abs();
            if !le_rel(gap, radii[i], HOLDER_RTOL) {
                return Err(Error::Inconsistent(format!(
                    "c0 construction violates the bound at point {i}, position {n}: {gap} > {}",
                    radii[i]
                )));
            }
        }
    }
    pm.verify_extension(x0, &out).map_err(|e| Error::Inconsistent(format!("c0 extension failed verification: {e}")))?;

    let trace = C0Trace { epsilon, cutoff, cone_directions: directions, assignment, representatives, eta, signs };
    Ok((out, trace))
}

/// Outcome of the tail-compatibility test for maps into `c`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CFeasibility {
    pub feasible: bool,
    /// `-max_{y,z} (|tail(y) - tail(z)| - K d(y,x)^alpha - K d(z,x)^alpha)`.
    pub margin: f64,
    /// The pair `(y, z)` attaining the margin (`y <= z`).
    pub witness: (usize, usize),
}

/// For eventually-constant data the convergence criterion reduces to the tails:
/// `|tail(y) - tail(z)| <= K d(y,x)^alpha + K d(z,x)^alpha` for all `y, z`.
pub fn c_feasible(pm: &PartialMap<EcSeq>, x: &Point) -> Result<CFeasibility> {
    pm.require_outside(x)?;
    let radii = pm.radii(x)?;
    let tails: Vec<f64> = pm.values().iter().map(EcSeq::tail).collect();
    let mut worst = f64::NEG_INFINITY;
    let mut witness = (0, 0);
    let mut feasible = true;
    for i in 0..tails.len() {
        for j in i..tails.len() {
            let lhs = (tails[i] - tails[j]).abs();
            let rhs = radii[i] + radii[j];
            if lhs - rhs > worst {
                worst = lhs - rhs;
                witness = (i, j);
            }
            feasible &= le_rel(lhs, rhs, HOLDER_RTOL);
        }
    }
    Ok(CFeasibility { feasible, margin: -worst, witness })
}

/// Intervals every admissible value at `x` must respect, position by position
/// over the joint prefix, plus the interval for the common tail.
pub fn forced_intervals(pm: &PartialMap<EcSeq>, x: &Point) -> Result<FeasibilityCertificate> {
    pm.require_outside(x)?;
    let radii = pm.radii(x)?;
    let values = pm.values();
    let joint = values.iter().map(EcSeq::prefix_len).max().unwrap_or(0);
    let coords = (0..joint).map(|n| envelope(values.iter().map(|v| v.at(n)), &radii)).collect();
    let tail = envelope(values.iter().map(EcSeq::tail), &radii);
    Ok(certificate(coords, Some(tail)))
}

/// Lower-envelope record of [`c_extend`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CTrace {
    /// `s[j] = sup_{m >= j} sup_z (f(z)(m) - K d(z,x)^alpha)` for `j` up to the
    /// joint prefix length (inclusive); nonincreasing.
    pub s_values: Vec<f64>,
    /// Limit of `s`, equal to `max_z (tail(z) - K d(z,x)^alpha)`.
    pub s_inf: f64,
    /// Cutoffs where the construction switches to the limit value. For
    /// eventually-constant data one cutoff (the joint prefix length) suffices.
    pub schedule: Vec<usize>,
}

/// Extends `pm` to `x` with a value in `c`. Prefix positions use `policy`
/// inside their forced interval; the tail is `s_inf` clamped into the tail
/// interval, the limit of the lower-envelope construction.
pub fn c_extend(pm: &PartialMap<EcSeq>, x: &Point, policy: Policy) -> Result<(EcSeq, CTrace)> {
    let cert = forced_intervals(pm, x)?;
    let radii = pm.radii(x)?;
    let values = pm.values();
    let tail_iv = cert.tail_interval.expect("forced_intervals always sets the tail");
    for (k, iv) in cert.per_coordinate.iter().enumerate() {
        if iv.empty {
            return Err(Error::Infeasible { coordinate: k.to_string(), lo: iv.lo, hi: iv.hi });
        }
    }
    if tail_iv.empty {
        return Err(Error::Infeasible { coordinate: "tail".into(), lo: tail_iv.lo, hi: tail_iv.hi });
    }

    let lower = |n: Option<usize>| {
        values.iter().zip(&radii).map(|(v, r)| n.map_or(v.tail(), |n| v.at(n)) - r).fold(f64::NEG_INFINITY, f64::max)
    };
    let joint = cert.per_coordinate.len();
    let s_inf = lower(None);
    let mut s_values = vec![s_inf; joint + 1];
    for j in (0..joint).rev() {
        s_values[j] = s_values[j + 1].max(lower(Some(j)));
    }

    let prefix = cert.per_coordinate.iter().map(|iv| iv.pick(policy)).collect();
    let g = EcSeq::new(prefix, tail_iv.clamp(s_inf));
    pm.verify_extension(x, &g).map_err(|e| Error::Inconsistent(format!("c extension failed verification: {e}")))?;
    Ok((g, CTrace { s_values, s_inf, schedule: vec![joint] }))
}

impl OnePointExtend for EcSeq {
    fn extend_one(pm: &PartialMap<Self>, x: &Point, policy: Policy) -> Result<Self> {
        if let Some(i) = pm.position(x) {
            return Ok(pm.values()[i].clone());
        }
        c_extend(pm, x, policy).map(|(g, _)| g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extend_c::cone_cover;
    use crate::spaces::{HolderParams, NormedSpace};
    use crate::targets::sup_dist;

    fn line_map(xs: &[f64], vals: Vec<EcSeq>, k: f64, alpha: f64) -> PartialMap<EcSeq> {
        PartialMap::new(
            NormedSpace::linf(1).unwrap(),
            xs.iter().map(|&x| Point(vec![x])).collect(),
            vals,
            HolderParams::new(k, alpha).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn c0_singleton_zero() {
        let pm = line_map(&[1.0], vec![EcSeq::zero()], 1.0, 1.0);
        let (u, trace) = c0_extend(&pm, &Point(vec![0.0])).unwrap();
        assert_eq!(u, EcSeq::zero());
        assert_eq!(trace.cutoff, 0);
    }

    #[test]
    fn c0_two_points_on_the_line() {
        let pm = line_map(&[1.0, 2.0], vec![EcSeq::new(vec![1.0], 0.0), EcSeq::new(vec![2.0], 0.0)], 1.0, 1.0);
        let x0 = Point(vec![0.0]);
        let (u, trace) = c0_extend(&pm, &x0).unwrap();
        // one cone (positive ray), representative x=1, eps = 0.49, N = 1;
        // eta_1 = mid([max(1-1, 2-2), min(1+1, 2+2)]) = 1
        assert_eq!(trace.representatives, vec![0]);
        assert_eq!(trace.cutoff, 1);
        assert!((trace.epsilon - 0.49).abs() < 1e-15);
        assert_eq!(u, EcSeq::new(vec![1.0], 0.0));
        assert_eq!(sup_dist(&u, &pm.values()[0]), 0.0);
        assert_eq!(sup_dist(&u, &pm.values()[1]), 1.0);

        let cover = cone_cover(pm.space(), 0.5, 2).unwrap();
        let (u2, _) = c0_extend_with_cover(&pm, &x0, &cover).unwrap();
        assert_eq!(u2, u);
    }

    #[test]
    fn c0_rejects_nonzero_tails_and_non_holder_maps() {
        let pm = line_map(&[1.0], vec![EcSeq::constant(1.0)], 1.0, 1.0);
        assert!(matches!(c0_extend(&pm, &Point(vec![0.0])), Err(Error::InvalidInput(_))));
        let pm = line_map(&[1.0, 2.0], vec![EcSeq::new(vec![5.0], 0.0), EcSeq::zero()], 1.0, 1.0);
        assert!(matches!(c0_extend(&pm, &Point(vec![0.0])), Err(Error::NotHolder { .. })));
    }

    #[test]
    fn c0_clips_far_coordinates() {
        // two points in opposite cones with long alternating prefixes
        let a = EcSeq::new(vec![0.3, -0.2, 0.1, 0.05], 0.0);
        let b = EcSeq::new(vec![-0.3, 0.2, -0.1, 0.02], 0.0);
        let pm = line_map(&[1.0, -1.0], vec![a, b], 1.0, 1.0);
        let (u, trace) = c0_extend(&pm, &Point(vec![0.0])).unwrap();
        assert!(u.is_c0());
        assert_eq!(trace.representatives.len(), 2);
        // eps = 0.49 so no coordinate is large: every position is clipped
        assert_eq!(trace.cutoff, 0);
        for n in 0..4 {
            assert!(u.at(n).abs() <= trace.eta[n].abs());
        }
    }

    #[test]
    fn c_feasible_examples() {
        let single = line_map(&[2.0], vec![EcSeq::constant(4.0)], 1.5, 1.0);
        let r = c_feasible(&single, &Point(vec![0.0])).unwrap();
        assert!(r.feasible);
        assert_eq!(r.margin, 2.0 * 1.5 * 2.0);

        let pm = line_map(&[-1.0, 1.0], vec![EcSeq::zero(), EcSeq::constant(1.0)], 1.0, 1.0);
        let r = c_feasible(&pm, &Point(vec![0.0])).unwrap();
        assert!(r.feasible);
        assert_eq!(r.margin, 1.0);
        assert_eq!(r.witness, (0, 1));
    }

    #[test]
    fn forced_intervals_examples() {
        let pm = line_map(&[-1.0, 1.0], vec![EcSeq::zero(), EcSeq::zero()], 1.0, 1.0);
        let cert = forced_intervals(&pm, &Point(vec![0.0])).unwrap();
        assert!(cert.per_coordinate.is_empty());
        let t = cert.tail_interval.unwrap();
        assert_eq!((t.lo, t.hi), (-1.0, 1.0));
        assert_eq!(cert.interval_at(7), Some(t));

        let single = line_map(&[3.0], vec![EcSeq::new(vec![1.0, -2.0], 0.5)], 2.0, 0.5);
        let cert = forced_intervals(&single, &Point(vec![-1.0])).unwrap();
        let r = 2.0 * 4f64.sqrt();
        assert_eq!(cert.per_coordinate[0].lo, 1.0 - r);
        assert_eq!(cert.per_coordinate[1].hi, -2.0 + r);
        assert_eq!(cert.tail_interval.unwrap().mid(), 0.5);
    }

    #[test]
    fn c_extend_examples() {
        let pm = line_map(&[-1.0, 1.0], vec![EcSeq::zero(), EcSeq::constant(1.0)], 1.0, 1.0);
        let (g, trace) = c_extend(&pm, &Point(vec![0.0]), Policy::Mid).unwrap();
        assert_eq!(g, EcSeq::zero());
        assert_eq!(trace.s_inf, 0.0);
        let cert = forced_intervals(&pm, &Point(vec![0.0])).unwrap();
        let t = cert.tail_interval.unwrap();
        assert_eq!((t.lo, t.hi), (0.0, 1.0));

        // singleton: the prefix stays at the center, the tail takes the
        // lower end of its interval
        let f = EcSeq::new(vec![2.0, -1.0], 0.5);
        let pm = line_map(&[1.0], vec![f.clone()], 1.0, 1.0);
        let (g, trace) = c_extend(&pm, &Point(vec![0.0]), Policy::Mid).unwrap();
        assert_eq!(g.prefix(), f.prefix());
        assert_eq!(g.tail(), 0.5 - 1.0);
        assert_eq!(trace.s_values, vec![1.0, -0.5, -0.5]);
    }
}
