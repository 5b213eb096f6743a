//! Extensions into `C(K)` for a finite metric sample `K`.
//!
//! A value `f(y)` is a function on the points of `K`. Write
//! `r_y = K_h d(x,y)^alpha` for the Hölder radius of `y` at the new point `x`,
//! and `m(t,s) = max_{y,z} |f(y)(t) - f(z)(s)| - r_y - r_z` for the mixed
//! excess of a pair of sample points. An extension exists iff `m(t,s)` is
//! dominated by a continuous gauge `phi(rho(t,s))` with `phi(0) = 0`, and then
//!
//! ```text
//!   g(x)(t) = max_{s, z} f(z)(s) - r_z - phi(rho(t,s))
//! ```
//!
//! is one.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extend_core::{OnePointExtend, PartialMap, Policy};
use crate::numeric::HOLDER_RTOL;
use crate::spaces::Point;
use crate::targets::{EcSeq, FiniteFunction, FiniteMetricSpace};

/// Upper bound on the number of harmonic knots (`D / min distance`).
pub const MAX_PHI_KNOTS: usize = 1_000_000;

/// `A_t = max_y f(y)(t) - r_y` and `B_t = min_y f(y)(t) + r_y`.
struct Envelopes {
    lower: Vec<f64>,
    lower_arg: Vec<usize>,
    upper: Vec<f64>,
    upper_arg: Vec<usize>,
    scale: f64,
}

impl Envelopes {
    fn new(pm: &PartialMap<FiniteFunction>, kspace: &FiniteMetricSpace, x: &Point) -> Result<Self> {
        for v in pm.values() {
            kspace.check_function(v)?;
        }
        let radii = pm.radii(x)?;
        let m = kspace.size();
        let mut env = Envelopes {
            lower: vec![f64::NEG_INFINITY; m],
            lower_arg: vec![0; m],
            upper: vec![f64::INFINITY; m],
            upper_arg: vec![0; m],
            scale: 0.0,
        };
        for (y, (f, &r)) in pm.values().iter().zip(&radii).enumerate() {
            for (t, &v) in f.values().iter().enumerate() {
                env.scale = env.scale.max(v.abs() + r);
                if v - r > env.lower[t] {
                    env.lower[t] = v - r;
                    env.lower_arg[t] = y;
                }
                if v + r < env.upper[t] {
                    env.upper[t] = v + r;
                    env.upper_arg[t] = y;
                }
            }
        }
        Ok(env)
    }

    fn tol(&self) -> f64 {
        HOLDER_RTOL * self.scale.max(1.0)
    }

    /// Mixed excess of `(t, s)` with the domain pair attaining it.
    fn excess(&self, t: usize, s: usize) -> (f64, usize, usize, usize, usize) {
        let a = self.lower[t] - self.upper[s];
        let b = self.lower[s] - self.upper[t];
        if a >= b {
            (a, self.lower_arg[t], self.upper_arg[s], t, s)
        } else {
            (b, self.lower_arg[s], self.upper_arg[t], s, t)
        }
    }
}

/// Domain points `y, z` and sample points `t, s` of a mixed-excess pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CkWitness {
    pub y: usize,
    pub z: usize,
    pub t: usize,
    pub s: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CkFeasibility {
    pub feasible: bool,
    /// Largest `m(t,s)` over pairs with `rho(t,s) < delta`.
    pub worst_excess: f64,
    pub witness: CkWitness,
}

fn check_outside(pm: &PartialMap<FiniteFunction>, kspace: &FiniteMetricSpace, x: &Point) -> Result<Envelopes> {
    if let Some(i) = pm.position(x) {
        return Err(Error::PointInDomain(i));
    }
    Envelopes::new(pm, kspace, x)
}

/// Checks `|f(y)(t) - f(z)(s)| <= r_y + r_z` for every pair with
/// `rho(t,s) < delta`.
pub fn ck_feasible(
    pm: &PartialMap<FiniteFunction>,
    kspace: &FiniteMetricSpace,
    x: &Point,
    delta: f64,
) -> Result<CkFeasibility> {
    if !(delta > 0.0) {
        return Err(Error::invalid(format!("delta must be positive, got {delta}")));
    }
    let env = check_outside(pm, kspace, x)?;
    let mut worst = (f64::NEG_INFINITY, 0, 0, 0, 0);
    for t in 0..kspace.size() {
        for s in 0..kspace.size() {
            if kspace.rho(t, s) < delta {
                let e = env.excess(t, s);
                if e.0 > worst.0 {
                    worst = e;
                }
            }
        }
    }
    let (excess, y, z, t, s) = worst;
    Ok(CkFeasibility { feasible: excess <= env.tol(), worst_excess: excess, witness: CkWitness { y, z, t, s } })
}

/// The gauges `xi`, `psi = xi - xi(0)` and the piecewise-linear `phi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulusTable {
    /// Distinct distances of `K`, ascending, from 0 to the diameter.
    pub lambda_grid: Vec<f64>,
    pub xi: Vec<f64>,
    pub xi0: f64,
    pub psi: Vec<f64>,
    pub phi_knots: Vec<f64>,
    pub phi_values: Vec<f64>,
}

impl ModulusTable {
    pub fn diameter(&self) -> f64 {
        *self.lambda_grid.last().expect("grid holds 0 and D")
    }

    /// `psi` is a step function: its value at the largest grid point `<= lambda`.
    pub fn psi_at(&self, lambda: f64) -> f64 {
        let slack = lambda * (1.0 + 1e-12);
        let i = self.lambda_grid.partition_point(|&g| g <= slack);
        self.psi[i.saturating_sub(1)]
    }

    /// Piecewise-linear interpolation of the knots; constant past the ends.
    pub fn phi(&self, lambda: f64) -> f64 {
        let k = &self.phi_knots;
        let v = &self.phi_values;
        if lambda <= k[0] {
            return v[0];
        }
        let i = k.partition_point(|&g| g < lambda);
        if i >= k.len() {
            return *v.last().unwrap();
        }
        let (a, b) = (k[i - 1], k[i]);
        let w = (lambda - a) / (b - a);
        v[i - 1] + w * (v[i] - v[i - 1])
    }
}

/// Builds the modulus table of `pm` at `x` over the sample `K` (at least two
/// points).
pub fn xi_modulus(pm: &PartialMap<FiniteFunction>, kspace: &FiniteMetricSpace, x: &Point) -> Result<ModulusTable> {
    let dmin = kspace
        .min_positive_distance()
        .ok_or_else(|| Error::invalid("K needs at least two points for a positive diameter"))?;
    let env = check_outside(pm, kspace, x)?;
    let diam = kspace.diameter();
    if diam / dmin > MAX_PHI_KNOTS as f64 {
        return Err(Error::invalid(format!(
            "diameter / minimal distance = {} exceeds {MAX_PHI_KNOTS} knots",
            diam / dmin
        )));
    }

    let m = kspace.size();
    let mut pairs: Vec<(f64, f64)> = Vec::with_capacity(m * (m + 1) / 2);
    for t in 0..m {
        for s in t..m {
            pairs.push((kspace.rho(t, s), env.excess(t, s).0));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut lambda_grid: Vec<f64> = Vec::new();
    let mut xi: Vec<f64> = Vec::new();
    let mut running = f64::NEG_INFINITY;
    for (d, e) in pairs {
        running = running.max(e);
        if lambda_grid.last() == Some(&d) {
            *xi.last_mut().unwrap() = running;
        } else {
            lambda_grid.push(d);
            xi.push(running);
        }
    }
    let xi0 = xi[0];
    let psi: Vec<f64> = xi.iter().map(|v| v - xi0).collect();

    let mut table = ModulusTable { lambda_grid, xi, xi0, psi, phi_knots: Vec::new(), phi_values: Vec::new() };

    // phi(D/(n+1)) = psi(D/n), down to the first D/n below the smallest distance.
    let mut knots = vec![(diam, table.psi_at(diam))];
    let mut n = 1usize;
    loop {
        let lam = diam / n as f64;
        knots.push((diam / (n + 1) as f64, table.psi_at(lam)));
        if lam < dmin {
            break;
        }
        n += 1;
    }
    knots.push((0.0, 0.0));
    knots.reverse();
    table.phi_knots = knots.iter().map(|k| k.0).collect();
    table.phi_values = knots.iter().map(|k| k.1).collect();
    Ok(table)
}

/// Largest violation of `m(t,s) <= phi(rho(t,s))`, with its witness.
fn worst_condition(env: &Envelopes, kspace: &FiniteMetricSpace, table: &ModulusTable) -> (f64, CkWitness) {
    let mut worst = (f64::NEG_INFINITY, CkWitness { y: 0, z: 0, t: 0, s: 0 });
    for t in 0..kspace.size() {
        for s in 0..kspace.size() {
            let (e, y, z, tt, ss) = env.excess(t, s);
            let gap = e - table.phi(kspace.rho(t, s));
            if gap > worst.0 {
                worst = (gap, CkWitness { y, z, t: tt, s: ss });
            }
        }
    }
    worst
}

/// `g(x)(t) = max_{s,z} f(z)(s) - r_z - phi(rho(t,s))`, after checking that
/// `phi` dominates the mixed excess everywhere. The result is verified on
/// both sides against every `f(y)`.
pub fn ck_extend(
    pm: &PartialMap<FiniteFunction>,
    kspace: &FiniteMetricSpace,
    x: &Point,
    table: &ModulusTable,
) -> Result<FiniteFunction> {
    let env = check_outside(pm, kspace, x)?;
    let (k, v) = (&table.phi_knots, &table.phi_values);
    if k.is_empty() || k.len() != v.len() || k[0] != 0.0 || v[0] != 0.0 {
        return Err(Error::invalid("phi needs matching knot/value arrays starting at (0, 0)"));
    }
    if k.windows(2).any(|w| !(w[0] < w[1])) || v.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("phi knots must increase strictly and values must be finite"));
    }
    let (gap, w) = worst_condition(&env, kspace, table);
    if gap > env.tol() {
        return Err(Error::ModulusViolated { y: w.y, z: w.z, t: w.t, s: w.s, excess: gap });
    }

    let m = kspace.size();
    let g: Vec<f64> = (0..m)
        .map(|t| (0..m).map(|s| env.lower[s] - table.phi(kspace.rho(t, s))).fold(f64::NEG_INFINITY, f64::max))
        .collect();

    let radii = pm.radii(x)?;
    let tol = env.tol();
    for (y, (f, &r)) in pm.values().iter().zip(&radii).enumerate() {
        for (t, (&fv, &gv)) in f.values().iter().zip(&g).enumerate() {
            if fv - gv > r + tol {
                return Err(Error::Inconsistent(format!("f(y{y})(t{t}) - g(t{t}) = {} exceeds {r}", fv - gv)));
            }
            if gv - fv > r + tol {
                return Err(Error::Inconsistent(format!("g(t{t}) - f(y{y})(t{t}) = {} exceeds {r}", gv - fv)));
            }
        }
    }
    Ok(FiniteFunction(g))
}

/// Pointwise `min_y f(y)(t) + r_y`; `f(x)` on the domain.
pub fn infconv_ck(pm: &PartialMap<FiniteFunction>, x: &Point) -> Result<FiniteFunction> {
    pm.space().check_dim(x.coords())?;
    if let Some(i) = pm.position(x) {
        return Ok(pm.values()[i].clone());
    }
    let radii = pm.radii(x)?;
    let m = pm.values()[0].len();
    let g = (0..m)
        .map(|t| pm.values().iter().zip(&radii).map(|(f, r)| f.values()[t] + r).fold(f64::INFINITY, f64::min))
        .collect();
    Ok(FiniteFunction(g))
}

/// A value at `x` whose Hölder factor against all of `M` is at most `1 + eps`,
/// computed from a subnet.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlmostExtension<V> {
    pub value: V,
    /// Domain indices of the net the value was extended from.
    pub net: Vec<usize>,
    pub delta: f64,
    pub factor: f64,
}

fn greedy_net<V: OnePointExtend>(pm: &PartialMap<V>, delta: f64) -> Vec<usize> {
    let mut net: Vec<usize> = Vec::new();
    for i in 0..pm.len() {
        let p = &pm.points()[i];
        if net.iter().all(|&j| pm.dist(j, p) > delta) {
            net.push(i);
        }
    }
    net
}

/// Extends exactly on shrinking `delta`-nets of `M` (halving `delta` from the
/// diameter of `M`) and returns the first value whose factor against all of
/// `M` is within `1 + eps`.
pub fn almost_extend_net<V: OnePointExtend>(pm: &PartialMap<V>, x: &Point, eps: f64) -> Result<AlmostExtension<V>> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::invalid(format!("eps must be positive, got {eps}")));
    }
    pm.space().check_dim(x.coords())?;
    if let Some(i) = pm.position(x) {
        return Ok(AlmostExtension { value: pm.values()[i].clone(), net: vec![i], delta: 0.0, factor: 1.0 });
    }
    let mut delta = 0.0_f64;
    for i in 0..pm.len() {
        for j in i + 1..pm.len() {
            delta = delta.max(pm.dist(i, &pm.points()[j]));
        }
    }
    loop {
        let net = greedy_net(pm, delta);
        let sub = pm.restrict(&net)?;
        let value = V::extend_one(&sub, x, Policy::Mid)?;
        let factor = pm.extension_factor(x, &value);
        let exact = net.len() == pm.len();
        if factor <= (1.0 + eps) * (1.0 + HOLDER_RTOL) || exact {
            if factor > 1.0 + eps && exact {
                pm.verify_extension(x, &value)?;
            }
            return Ok(AlmostExtension { value, net, delta, factor });
        }
        delta *= 0.5;
    }
}

/// Nearest-point extension from a subset `F` of `K` to all of `K`, with the
/// matching restriction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Embedding {
    /// Indices of `F` in `K`, in the caller's order.
    pub subset: Vec<usize>,
    /// For each point of `K`, the position in `subset` of its nearest point
    /// (ties to the lowest index in `K`).
    pub nearest: Vec<usize>,
}

impl Embedding {
    /// `T`: functions on `F` to functions on `K`.
    pub fn extend(&self, f: &FiniteFunction) -> Result<FiniteFunction> {
        if f.len() != self.subset.len() {
            return Err(Error::DimensionMismatch { expected: self.subset.len(), found: f.len() });
        }
        Ok(FiniteFunction(self.nearest.iter().map(|&i| f.values()[i]).collect()))
    }

    /// `R`: functions on `K` to functions on `F`.
    pub fn restrict(&self, g: &FiniteFunction) -> Result<FiniteFunction> {
        if g.len() != self.nearest.len() {
            return Err(Error::DimensionMismatch { expected: self.nearest.len(), found: g.len() });
        }
        Ok(FiniteFunction(self.subset.iter().map(|&t| g.values()[t]).collect()))
    }

    /// `P = T R`.
    pub fn project(&self, g: &FiniteFunction) -> Result<FiniteFunction> {
        self.extend(&self.restrict(g)?)
    }
}

pub fn embed_c_into_ck(kspace: &FiniteMetricSpace, subset: &[usize]) -> Result<Embedding> {
    if subset.is_empty() {
        return Err(Error::invalid("the subset F must be nonempty"));
    }
    let m = kspace.size();
    for (i, &t) in subset.iter().enumerate() {
        if t >= m {
            return Err(Error::invalid(format!("subset point {t} is outside K (size {m})")));
        }
        if subset[..i].contains(&t) {
            return Err(Error::invalid(format!("subset point {t} is repeated")));
        }
    }
    let nearest = (0..m)
        .map(|t| {
            (0..subset.len())
                .min_by(|&a, &b| {
                    kspace.rho(t, subset[a]).total_cmp(&kspace.rho(t, subset[b])).then(subset[a].cmp(&subset[b]))
                })
                .expect("nonempty subset")
        })
        .collect();
    Ok(Embedding { subset: subset.to_vec(), nearest })
}

/// Reads each `f(y)` along the interleaved witnesses `t1, s1, t2, s2, ...`,
/// giving a map into `c` whose tail repeats the last sample.
pub fn reduce_ck_to_c(
    pm: &PartialMap<FiniteFunction>,
    kspace: &FiniteMetricSpace,
    witnesses: &[(usize, usize)],
) -> Result<PartialMap<EcSeq>> {
    if witnesses.is_empty() {
        return Err(Error::invalid("at least one witness pair is required"));
    }
    let m = kspace.size();
    for v in pm.values() {
        kspace.check_function(v)?;
    }
    if let Some(&(t, s)) = witnesses.iter().find(|&&(t, s)| t >= m || s >= m) {
        return Err(Error::invalid(format!("witness ({t}, {s}) is outside K (size {m})")));
    }
    let w: Vec<usize> = witnesses.iter().flat_map(|&(t, s)| [t, s]).collect();
    let last = *w.last().unwrap();
    let values =
        pm.values().iter().map(|f| EcSeq::new(w.iter().map(|&i| f.values()[i]).collect(), f.values()[last])).collect();
    PartialMap::new(pm.space().clone(), pm.points().to_vec(), values, pm.params())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{HolderParams, NormedSpace};

    fn line_map(xs: &[f64], fs: Vec<Vec<f64>>, k: f64, alpha: f64) -> PartialMap<FiniteFunction> {
        PartialMap::new(
            NormedSpace::linf(1).unwrap(),
            xs.iter().map(|&x| Point(vec![x])).collect(),
            fs.into_iter().map(FiniteFunction).collect(),
            HolderParams::new(k, alpha).unwrap(),
        )
        .unwrap()
    }

    fn three_points() -> FiniteMetricSpace {
        FiniteMetricSpace::from_points_1d(&[0.0, 0.5, 1.0]).unwrap()
    }

    #[test]
    fn xi_example() {
        let pm = line_map(&[0.0], vec![vec![0.0, 0.4, 1.0]], 1.0, 1.0);
        let x = Point(vec![1.0]);
        let t = xi_modulus(&pm, &three_points(), &x).unwrap();
        assert_eq!(t.lambda_grid, vec![0.0, 0.5, 1.0]);
        assert_eq!(t.xi0, -2.0);
        assert!((t.xi[1] - (-1.4)).abs() < 1e-15);
        assert_eq!(t.xi[2], -1.0);
        assert_eq!(t.phi(0.0), 0.0);
        for (i, &l) in t.lambda_grid.iter().enumerate() {
            assert!(t.phi(l) >= t.psi[i]);
        }
        let g = ck_extend(&pm, &three_points(), &x, &t).unwrap();
        // oracle: g(t) = max_s f(s) - 1 - phi(|t - s|)
        let pts = [0.0_f64, 0.5, 1.0];
        let f = [0.0, 0.4, 1.0];
        for (i, &ti) in pts.iter().enumerate() {
            let expect = (0..3).map(|j| f[j] - 1.0 - t.phi((ti - pts[j]).abs())).fold(f64::NEG_INFINITY, f64::max);
            assert_eq!(g.values()[i], expect);
        }
    }

    #[test]
    fn constant_singleton_has_zero_modulus() {
        let pm = line_map(&[0.0], vec![vec![2.0; 3]], 1.5, 0.5);
        let x = Point(vec![4.0]);
        let t = xi_modulus(&pm, &three_points(), &x).unwrap();
        let r = 1.5 * 2.0;
        assert!(t.xi.iter().all(|&v| v == -2.0 * r));
        assert!(t.psi.iter().all(|&v| v == 0.0));
        assert!(t.phi_values.iter().all(|&v| v == 0.0));
        let g = ck_extend(&pm, &three_points(), &x, &t).unwrap();
        assert_eq!(g.values(), &[2.0 - r; 3]);
    }

    #[test]
    fn single_point_sample_is_rejected() {
        let pm = line_map(&[0.0], vec![vec![1.0]], 1.0, 1.0);
        let k = FiniteMetricSpace::from_points_1d(&[0.0]).unwrap();
        assert!(xi_modulus(&pm, &k, &Point(vec![1.0])).is_err());
    }

    #[test]
    fn feasibility_small_delta_is_automatic() {
        let pm = line_map(&[0.0, 1.0], vec![vec![0.0, 1.0, 0.0], vec![0.5, 0.3, 0.9]], 1.0, 1.0);
        let r = ck_feasible(&pm, &three_points(), &Point(vec![3.0]), 0.4).unwrap();
        assert!(r.feasible);
        let single = line_map(&[0.0], vec![vec![0.0, 9.0, -9.0]], 1.0, 1.0);
        assert!(ck_feasible(&single, &three_points(), &Point(vec![1.0]), 0.5).unwrap().feasible);
        // a fixed delta above the sample spacing sees the oscillation of f(y) itself
        let wide = ck_feasible(&single, &three_points(), &Point(vec![1.0]), 0.6).unwrap();
        assert_eq!(wide.worst_excess, 18.0 - 2.0);
        assert!(!wide.feasible);
    }

    #[test]
    fn modulus_violation_is_reported() {
        let pm = line_map(&[0.0], vec![vec![0.0, 0.4, 1.0]], 1.0, 1.0);
        let x = Point(vec![1.0]);
        let mut t = xi_modulus(&pm, &three_points(), &x).unwrap();
        t.phi_values = vec![0.0; t.phi_knots.len()];
        // excess of (t0, t2) is 10 - 2 > phi = 0
        let big = line_map(&[0.0], vec![vec![0.0, 5.0, 10.0]], 1.0, 1.0);
        let err = ck_extend(&big, &three_points(), &x, &t).unwrap_err();
        assert!(matches!(err, Error::ModulusViolated { .. }));
    }

    #[test]
    fn infconv_matches_definition() {
        let pm = line_map(&[0.0, 2.0], vec![vec![0.0, 1.0], vec![1.0, 2.0]], 1.0, 1.0);
        let g = infconv_ck(&pm, &Point(vec![1.0])).unwrap();
        assert_eq!(g.values(), &[1.0, 2.0]);
        assert_eq!(infconv_ck(&pm, &Point(vec![2.0])).unwrap().values(), &[1.0, 2.0]);
    }

    #[test]
    fn embedding_identity_and_constant() {
        let k = three_points();
        let e = embed_c_into_ck(&k, &[0, 1, 2]).unwrap();
        let g = FiniteFunction(vec![3.0, -1.0, 2.0]);
        assert_eq!(e.project(&g).unwrap(), g);
        let e = embed_c_into_ck(&k, &[1]).unwrap();
        assert_eq!(e.extend(&FiniteFunction(vec![-4.0])).unwrap().values(), &[-4.0; 3]);
        assert!(embed_c_into_ck(&k, &[]).is_err());
    }

    #[test]
    fn embedding_ties_go_to_lowest_index() {
        let k = three_points();
        let e = embed_c_into_ck(&k, &[2, 0]).unwrap();
        // point 1 is equidistant from 0 and 2
        assert_eq!(e.subset[e.nearest[1]], 0);
    }

    #[test]
    fn reduction_layout() {
        let pm = line_map(&[0.0, 1.0], vec![vec![1.0, 2.0, 3.0], vec![1.5, 2.5, 3.5]], 1.0, 1.0);
        let h = reduce_ck_to_c(&pm, &three_points(), &[(0, 1)]).unwrap();
        assert_eq!(h.values()[0].prefix(), &[1.0]);
        assert_eq!(h.values()[0].tail(), 2.0);
        assert_eq!(h.values()[0].at(1), 2.0);
        let constant = line_map(&[0.0], vec![vec![7.0; 3]], 1.0, 1.0);
        let h = reduce_ck_to_c(&constant, &three_points(), &[(2, 1), (0, 1)]).unwrap();
        assert_eq!(h.values()[0], EcSeq::constant(7.0));
        assert!(reduce_ck_to_c(&pm, &three_points(), &[(0, 3)]).is_err());
    }

    #[test]
    fn almost_extension_singleton_and_full_net() {
        let pm = PartialMap::new(
            NormedSpace::linf(1).unwrap(),
            vec![Point(vec![0.0])],
            vec![3.0],
            HolderParams::new(1.0, 1.0).unwrap(),
        )
        .unwrap();
        let a = almost_extend_net(&pm, &Point(vec![2.0]), 0.1).unwrap();
        assert_eq!(a.net, vec![0]);
        assert!(a.factor <= 1.0);
    }
}
