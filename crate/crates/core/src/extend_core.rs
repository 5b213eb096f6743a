//! One-point extension of scalar and `l_inf^m`-valued Hölder maps.
//!
//! For a `(K, alpha)`-Hölder map `f` on a finite set `M` and a new point `x`,
//! the admissible values at `x` in one real coordinate form the interval
//!
//! ```text
//!   [ max_y f(y) - K d(x,y)^alpha ,  min_y f(y) + K d(x,y)^alpha ]
//! ```
//!
//! whose upper end is the inf-convolution (McShane) extension and whose lower
//! end is the sup (Whitney) extension. It is nonempty because
//! `d(y,z)^alpha <= d(y,x)^alpha + d(x,z)^alpha` for `alpha <= 1`.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numeric::{le_rel, HOLDER_RTOL};
use crate::spaces::{HolderParams, NormedSpace, Point};
use crate::targets::{FiniteFunction, Target};

/// Extra structure a target needs to live inside a [`PartialMap`].
pub trait TargetValue: Target {
    fn is_finite(&self) -> bool;

    /// Whether two values live in the same space (same length for vectors).
    fn compatible(&self, _other: &Self) -> bool {
        true
    }
}

impl TargetValue for f64 {
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

impl TargetValue for FiniteFunction {
    fn is_finite(&self) -> bool {
        self.values().iter().all(|v| v.is_finite())
    }

    fn compatible(&self, other: &Self) -> bool {
        self.len() == other.len()
    }
}

impl TargetValue for crate::targets::EcSeq {
    fn is_finite(&self) -> bool {
        crate::targets::EcSeq::is_finite(self)
    }
}

/// A map from finitely many points of a normed space into a target space,
/// together with the Hölder parameters it is claimed to satisfy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartialMap<V> {
    space: NormedSpace,
    points: Vec<Point>,
    values: Vec<V>,
    params: HolderParams,
}

impl<V: TargetValue> PartialMap<V> {
    /// Checks shapes and that the points are pairwise distinct. The Hölder
    /// condition itself is not enforced here; see [`PartialMap::verify_holder`].
    pub fn new(space: NormedSpace, points: Vec<Point>, values: Vec<V>, params: HolderParams) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("the domain M must contain at least one point"));
        }
        if points.len() != values.len() {
            return Err(Error::invalid(format!("{} points but {} values", points.len(), values.len())));
        }
        for p in &points {
            space.check_dim(p.coords())?;
            if p.coords().iter().any(|c| !c.is_finite()) {
                return Err(Error::invalid("point coordinates must be finite"));
            }
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite target value {v:?}")));
        }
        if values.iter().any(|v| !v.compatible(&values[0])) {
            return Err(Error::invalid("target values have inconsistent shapes"));
        }
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                if points[i] == points[j] {
                    return Err(Error::CoincidentPoints(i, j));
                }
            }
        }
        Ok(PartialMap { space, points, values, params })
    }

    /// Builds the map with the smallest Hölder constant for `alpha`.
    pub fn with_optimal_constant(space: NormedSpace, points: Vec<Point>, values: Vec<V>, alpha: f64) -> Result<Self> {
        let provisional = HolderParams::new(0.0, alpha)?;
        let mut pm = Self::new(space, points, values, provisional)?;
        pm.params = HolderParams::new(pm.holder_constant(alpha), alpha)?;
        Ok(pm)
    }

    pub fn space(&self) -> &NormedSpace {
        &self.space
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn values(&self) -> &[V] {
        &self.values
    }

    pub fn params(&self) -> HolderParams {
        self.params
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn position(&self, x: &Point) -> Option<usize> {
        self.points.iter().position(|p| p == x)
    }

    pub(crate) fn dist(&self, i: usize, x: &Point) -> f64 {
        self.space.dist_unchecked(self.points[i].coords(), x.coords())
    }

    /// `K d(x, p)^alpha` for every domain point `p`, in order.
    pub fn radii(&self, x: &Point) -> Result<Vec<f64>> {
        self.space.check_dim(x.coords())?;
        Ok((0..self.len()).map(|i| self.params.radius(self.dist(i, x))).collect())
    }

    /// Smallest `K` such that the map is `(K, alpha)`-Hölder; 0 for a singleton.
    pub fn holder_constant(&self, alpha: f64) -> f64 {
        let mut best = 0.0_f64;
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                let d = self.space.dist_unchecked(self.points[i].coords(), self.points[j].coords());
                let num = self.values[i].sup_distance(&self.values[j]);
                best = best.max(num / d.powf(alpha));
            }
        }
        best
    }

    /// Exhaustive pair check of the claimed Hölder condition at relative
    /// tolerance `1e-9`.
    pub fn verify_holder(&self) -> Result<()> {
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                let d = self.space.dist_unchecked(self.points[i].coords(), self.points[j].coords());
                let rhs = self.params.radius(d);
                let lhs = self.values[i].sup_distance(&self.values[j]);
                if !le_rel(lhs, rhs, HOLDER_RTOL) {
                    return Err(self.violation(i, j, lhs, rhs));
                }
            }
        }
        Ok(())
    }

    pub fn is_holder(&self) -> bool {
        self.verify_holder().is_ok()
    }

    /// Checks the new pairs `(x, y)` created by assigning `value` to `x`. In the
    /// returned error the extension point has index `self.len()`.
    pub fn verify_extension(&self, x: &Point, value: &V) -> Result<()> {
        self.space.check_dim(x.coords())?;
        if !value.compatible(&self.values[0]) {
            return Err(Error::invalid("extension value has the wrong shape"));
        }
        for i in 0..self.len() {
            let rhs = self.params.radius(self.dist(i, x));
            let lhs = self.values[i].sup_distance(value);
            if !le_rel(lhs, rhs, HOLDER_RTOL) {
                return Err(self.violation(i, self.len(), lhs, rhs));
            }
        }
        Ok(())
    }

    /// Worst ratio `|g(x) - f(y)| / (K d(x,y)^alpha)` over the domain, i.e.
    /// the factor by which the extension at `x` exceeds `K`.
    pub fn extension_factor(&self, x: &Point, value: &V) -> f64 {
        (0..self.len())
            .map(|i| {
                let lhs = self.values[i].sup_distance(value);
                let rhs = self.params.radius(self.dist(i, x));
                if lhs == 0.0 {
                    0.0
                } else {
                    lhs / rhs
                }
            })
            .fold(0.0, f64::max)
    }

    /// The map on `M ∪ {x}`.
    pub fn extended(&self, x: Point, value: V) -> Result<Self> {
        let mut points = self.points.clone();
        let mut values = self.values.clone();
        points.push(x);
        values.push(value);
        Self::new(self.space.clone(), points, values, self.params)
    }

    /// Restriction to the given domain indices (in the given order).
    pub fn restrict(&self, indices: &[usize]) -> Result<Self> {
        let points = indices.iter().map(|&i| self.points[i].clone()).collect();
        let values = indices.iter().map(|&i| self.values[i].clone()).collect();
        Self::new(self.space.clone(), points, values, self.params)
    }

    pub fn with_params(&self, params: HolderParams) -> Self {
        PartialMap { params, ..self.clone() }
    }

    /// Same map with all points moved by `-shift`.
    pub fn translated(&self, shift: &Point) -> Result<Self> {
        self.space.check_dim(shift.coords())?;
        let points = self.points.iter().map(|p| p.sub(shift)).collect();
        Self::new(self.space.clone(), points, self.values.clone(), self.params)
    }

    pub(crate) fn require_outside(&self, x: &Point) -> Result<()> {
        self.space.check_dim(x.coords())?;
        match self.position(x) {
            Some(i) => Err(Error::PointInDomain(i)),
            None => Ok(()),
        }
    }

    fn violation(&self, i: usize, j: usize, lhs: f64, rhs: f64) -> Error {
        Error::NotHolder { k: self.params.k, alpha: self.params.alpha, i, j, lhs, rhs }
    }
}

/// A closed real interval; `empty` is set when `lo > hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub empty: bool,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi, empty: lo > hi }
    }

    /// Interval from an upper and lower envelope. A crossing smaller than the
    /// Hölder tolerance relative to `scale` is rounding noise and collapses to
    /// the midpoint.
    pub fn from_envelopes(lo: f64, hi: f64, scale: f64) -> Self {
        if lo > hi && lo - hi <= HOLDER_RTOL * scale.max(lo.abs()).max(hi.abs()) {
            let m = 0.5 * (lo + hi);
            return Interval::new(m, m);
        }
        Interval::new(lo, hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, v: f64) -> bool {
        !self.empty && self.lo <= v && v <= self.hi
    }

    pub fn clamp(&self, v: f64) -> f64 {
        v.max(self.lo).min(self.hi)
    }

    pub fn pick(&self, policy: Policy) -> f64 {
        match policy {
            Policy::Lo => self.lo,
            Policy::Hi => self.hi,
            Policy::Mid => self.mid(),
        }
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        Interval::new(self.lo.max(other.lo), self.hi.min(other.hi))
    }

    /// Set inclusion; the empty interval is a subset of everything.
    pub fn is_subset_of(&self, other: &Interval) -> bool {
        self.empty || (!other.empty && other.lo <= self.lo && self.hi <= other.hi)
    }
}

/// Which admissible value to emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Policy {
    Lo,
    Hi,
    #[default]
    Mid,
}

impl FromStr for Policy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lo" => Ok(Policy::Lo),
            "hi" => Ok(Policy::Hi),
            "mid" => Ok(Policy::Mid),
            other => Err(Error::invalid(format!("unknown policy {other:?} (expected lo|hi|mid)"))),
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Policy::Lo => "lo",
            Policy::Hi => "hi",
            Policy::Mid => "mid",
        })
    }
}

/// A target coordinate: a sequence/vector index or the common tail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coordinate {
    Index(usize),
    Tail,
}

impl Serialize for Coordinate {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Coordinate::Index(k) => s.serialize_u64(*k as u64),
            Coordinate::Tail => s.serialize_str("tail"),
        }
    }
}

impl fmt::Display for Coordinate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coordinate::Index(k) => write!(f, "{k}"),
            Coordinate::Tail => f.write_str("tail"),
        }
    }
}

/// The binding constraint of a certificate: the lower envelope is attained at
/// domain point `lower`, the upper at `upper`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Witness {
    pub lower: usize,
    pub upper: usize,
    pub coordinate: Coordinate,
}

/// Coordinatewise admissible ranges for a one-point extension.
///
/// `margin` is the smallest interval width; it is negative exactly when some
/// interval is empty.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeasibilityCertificate {
    pub per_coordinate: Vec<Interval>,
    pub tail_interval: Option<Interval>,
    pub margin: f64,
    pub witness: Option<Witness>,
}

impl FeasibilityCertificate {
    pub fn is_feasible(&self) -> bool {
        self.per_coordinate.iter().chain(&self.tail_interval).all(|i| !i.empty)
    }

    /// The interval governing coordinate `k`; past the stored prefix this is
    /// the tail interval.
    pub fn interval_at(&self, k: usize) -> Option<Interval> {
        self.per_coordinate.get(k).copied().or(self.tail_interval)
    }
}

/// Envelope of the constraints `|v - values[i]| <= radii[i]`.
pub(crate) struct Envelope {
    pub interval: Interval,
    pub lo_arg: usize,
    pub hi_arg: usize,
}

pub(crate) fn envelope(values: impl Iterator<Item = f64>, radii: &[f64]) -> Envelope {
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    let (mut lo_arg, mut hi_arg) = (0, 0);
    let mut scale = 0.0_f64;
    for (i, (v, &r)) in values.zip(radii).enumerate() {
        scale = scale.max(v.abs()).max(r);
        if v - r > lo {
            lo = v - r;
            lo_arg = i;
        }
        if v + r < hi {
            hi = v + r;
            hi_arg = i;
        }
    }
    Envelope { interval: Interval::from_envelopes(lo, hi, scale), lo_arg, hi_arg }
}

/// Assembles a certificate from per-coordinate envelopes.
pub(crate) fn certificate(coords: Vec<Envelope>, tail: Option<Envelope>) -> FeasibilityCertificate {
    let mut margin = f64::INFINITY;
    let mut witness = None;
    let tagged = coords
        .iter()
        .enumerate()
        .map(|(k, e)| (Coordinate::Index(k), e))
        .chain(tail.iter().map(|e| (Coordinate::Tail, e)));
    for (coordinate, e) in tagged {
        if e.interval.width() < margin {
            margin = e.interval.width();
            witness = Some(Witness { lower: e.lo_arg, upper: e.hi_arg, coordinate });
        }
    }
    FeasibilityCertificate {
        per_coordinate: coords.into_iter().map(|e| e.interval).collect(),
        tail_interval: tail.map(|e| e.interval),
        margin,
        witness,
    }
}

/// Admissible values at `x` for a scalar map.
pub fn feasibility_interval(pm: &PartialMap<f64>, x: &Point) -> Result<Interval> {
    pm.require_outside(x)?;
    let radii = pm.radii(x)?;
    Ok(envelope(pm.values().iter().copied(), &radii).interval)
}

/// `inf_u f(u) + K d(u, x)^alpha`; equals `f(x)` on the domain.
pub fn infconv_extend(pm: &PartialMap<f64>, x: &Point) -> Result<f64> {
    pm.space().check_dim(x.coords())?;
    if let Some(i) = pm.position(x) {
        return Ok(pm.values()[i]);
    }
    let radii = pm.radii(x)?;
    Ok(pm.values().iter().zip(&radii).map(|(v, r)| v + r).fold(f64::INFINITY, f64::min))
}

/// `sup_u f(u) - K d(u, x)^alpha`; equals `f(x)` on the domain.
pub fn sup_extend(pm: &PartialMap<f64>, x: &Point) -> Result<f64> {
    pm.space().check_dim(x.coords())?;
    if let Some(i) = pm.position(x) {
        return Ok(pm.values()[i]);
    }
    let radii = pm.radii(x)?;
    Ok(pm.values().iter().zip(&radii).map(|(v, r)| v - r).fold(f64::NEG_INFINITY, f64::max))
}

/// Scalar extension value at `x` chosen by `policy`.
pub fn scalar_extend(pm: &PartialMap<f64>, x: &Point, policy: Policy) -> Result<f64> {
    pm.space().check_dim(x.coords())?;
    if let Some(i) = pm.position(x) {
        return Ok(pm.values()[i]);
    }
    match policy {
        Policy::Lo => sup_extend(pm, x),
        Policy::Hi => infconv_extend(pm, x),
        Policy::Mid => Ok(feasibility_interval(pm, x)?.mid()),
    }
}

/// Coordinate intervals of a vector-valued map at `x`.
pub fn vector_certificate(pm: &PartialMap<FiniteFunction>, x: &Point) -> Result<FeasibilityCertificate> {
    pm.require_outside(x)?;
    let radii = pm.radii(x)?;
    let m = pm.values()[0].len();
    let coords = (0..m).map(|k| envelope(pm.values().iter().map(|v| v.values()[k]), &radii)).collect();
    Ok(certificate(coords, None))
}

/// Coordinatewise one-point extension into `l_inf^m`.
pub fn linf_vector_extend(pm: &PartialMap<FiniteFunction>, x: &Point, policy: Policy) -> Result<FiniteFunction> {
    pm.space().check_dim(x.coords())?;
    if let Some(i) = pm.position(x) {
        return Ok(pm.values()[i].clone());
    }
    let cert = vector_certificate(pm, x)?;
    cert.per_coordinate
        .iter()
        .enumerate()
        .map(|(k, iv)| {
            if iv.empty {
                Err(Error::Infeasible { coordinate: k.to_string(), lo: iv.lo, hi: iv.hi })
            } else {
                Ok(iv.pick(policy))
            }
        })
        .collect::<Result<Vec<_>>>()
        .map(FiniteFunction)
}

/// Targets that admit an exact one-point extension for finite domains.
pub trait OnePointExtend: TargetValue + Sized {
    fn extend_one(pm: &PartialMap<Self>, x: &Point, policy: Policy) -> Result<Self>;
}

impl OnePointExtend for f64 {
    fn extend_one(pm: &PartialMap<Self>, x: &Point, policy: Policy) -> Result<Self> {
        scalar_extend(pm, x, policy)
    }
}

impl OnePointExtend for FiniteFunction {
    fn extend_one(pm: &PartialMap<Self>, x: &Point, policy: Policy) -> Result<Self> {
        linf_vector_extend(pm, x, policy)
    }
}
