//! Finite models of the target spaces: eventually-constant sequences (for `c`
//! and `c0`), vectors / sampled functions (for `l_inf^m` and `C(K)` on a finite
//! metric sample), and plain scalars.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A value space equipped with the supremum distance.
pub trait Target: Clone + std::fmt::Debug {
    fn sup_distance(&self, other: &Self) -> f64;
}

impl Target for f64 {
    fn sup_distance(&self, other: &Self) -> f64 {
        (self - other).abs()
    }
}

/// The sequence `(prefix[0], ..., prefix[p-1], tail, tail, ...)`.
///
/// Indices are 0-based: `at(0)` is the first term. The prefix is kept in
/// canonical form, i.e. it never ends with a copy of the tail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "RawEcSeq")]
pub struct EcSeq {
    prefix: Vec<f64>,
    tail: f64,
}

#[derive(Deserialize)]
struct RawEcSeq {
    #[serde(default)]
    prefix: Vec<f64>,
    tail: f64,
}

impl From<RawEcSeq> for EcSeq {
    fn from(r: RawEcSeq) -> Self {
        EcSeq::new(r.prefix, r.tail)
    }
}

impl EcSeq {
    pub fn new(mut prefix: Vec<f64>, tail: f64) -> Self {
        while prefix.last() == Some(&tail) {
            prefix.pop();
        }
        EcSeq { prefix, tail }
    }

    pub fn constant(value: f64) -> Self {
        EcSeq { prefix: Vec::new(), tail: value }
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn prefix(&self) -> &[f64] {
        &self.prefix
    }

    pub fn tail(&self) -> f64 {
        self.tail
    }

    pub fn prefix_len(&self) -> usize {
        self.prefix.len()
    }

    pub fn at(&self, n: usize) -> f64 {
        self.prefix.get(n).copied().unwrap_or(self.tail)
    }

    pub fn is_c0(&self) -> bool {
        self.tail == 0.0
    }

    pub fn sup_norm(&self) -> f64 {
        self.prefix.iter().fold(self.tail.abs(), |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.tail.is_finite() && self.prefix.iter().all(|v| v.is_finite())
    }

    /// Applies `op` termwise, including the tail.
    pub fn zip_with(&self, other: &EcSeq, op: impl Fn(f64, f64) -> f64) -> EcSeq {
        let n = self.prefix.len().max(other.prefix.len());
        let prefix = (0..n).map(|k| op(self.at(k), other.at(k))).collect();
        EcSeq::new(prefix, op(self.tail, other.tail))
    }
}

impl Target for EcSeq {
    fn sup_distance(&self, other: &Self) -> f64 {
        let n = self.prefix.len().max(other.prefix.len());
        (0..n).fold((self.tail - other.tail).abs(), |m, k| m.max((self.at(k) - other.at(k)).abs()))
    }
}

/// `sup_n |a(n) - b(n)|`.
pub fn sup_dist(a: &EcSeq, b: &EcSeq) -> f64 {
    a.sup_distance(b)
}

/// Values of a function on the points of a finite metric space, or simply a
/// vector of `l_inf^m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FiniteFunction(pub Vec<f64>);

impl FiniteFunction {
    pub fn new(values: Vec<f64>) -> Self {
        FiniteFunction(values)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn sup_norm(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

impl Target for FiniteFunction {
    /// Callers guarantee equal lengths; see [`sup_dist_fn`] for the checked form.
    fn sup_distance(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.len(), other.len());
        self.0.iter().zip(&other.0).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
    }
}

pub fn sup_dist_fn(a: &FiniteFunction, b: &FiniteFunction) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), found: b.len() });
    }
    Ok(a.sup_distance(b))
}

/// A finite metric space given by its distance matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MetricDescriptor")]
pub struct FiniteMetricSpace {
    rho: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(untagged, deny_unknown_fields)]
enum MetricDescriptor {
    Matrix { rho: Vec<Vec<f64>> },
    Line { points_1d: Vec<f64> },
}

impl TryFrom<MetricDescriptor> for FiniteMetricSpace {
    type Error = Error;
    fn try_from(d: MetricDescriptor) -> Result<Self> {
        match d {
            MetricDescriptor::Matrix { rho } => FiniteMetricSpace::new(rho),
            MetricDescriptor::Line { points_1d } => FiniteMetricSpace::from_points_1d(&points_1d),
        }
    }
}

impl FiniteMetricSpace {
    /// Validates symmetry, zero diagonal, positivity off the diagonal and the
    /// triangle inequality (up to rounding).
    pub fn new(rho: Vec<Vec<f64>>) -> Result<Self> {
        let m = rho.len();
        if m == 0 {
            return Err(Error::invalid("metric space must have at least one point"));
        }
        for (i, row) in rho.iter().enumerate() {
            if row.len() != m {
                return Err(Error::DimensionMismatch { expected: m, found: row.len() });
            }
            if row[i] != 0.0 {
                return Err(Error::invalid(format!("rho[{i}][{i}] must be 0")));
            }
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::invalid(format!("rho[{i}][{j}] = {v} is not a distance")));
                }
                if i != j && v == 0.0 {
                    return Err(Error::invalid(format!("points {i} and {j} are at distance 0")));
                }
                if v != rho[j][i] {
                    return Err(Error::invalid(format!("rho is not symmetric at ({i}, {j})")));
                }
            }
        }
        let scale = rho.iter().flatten().fold(0.0_f64, |a, &v| a.max(v));
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    if rho[i][k] > rho[i][j] + rho[j][k] + 1e-12 * scale {
                        return Err(Error::invalid(format!("triangle inequality fails for ({i}, {j}, {k})")));
                    }
                }
            }
        }
        Ok(FiniteMetricSpace { rho })
    }

    /// Points on the real line with `rho = |a - b|`.
    pub fn from_points_1d(points: &[f64]) -> Result<Self> {
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::invalid("points_1d must be finite"));
        }
        let rho = points.iter().map(|a| points.iter().map(|b| (a - b).abs()).collect()).collect();
        Self::new(rho)
    }

    pub fn size(&self) -> usize {
        self.rho.len()
    }

    pub fn rho(&self, t: usize, s: usize) -> f64 {
        self.rho[t][s]
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.rho
    }

    pub fn diameter(&self) -> f64 {
        self.rho.iter().flatten().fold(0.0_f64, |a, &v| a.max(v))
    }

    /// Smallest positive distance, `None` for a single point.
    pub fn min_positive_distance(&self) -> Option<f64> {
        self.rho.iter().flatten().copied().filter(|&v| v > 0.0).min_by(f64::total_cmp)
    }

    pub fn check_function(&self, f: &FiniteFunction) -> Result<()> {
        if f.len() != self.size() {
            return Err(Error::DimensionMismatch { expected: self.size(), found: f.len() });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form_strips_trailing_tail_copies() {
        let s = EcSeq::new(vec![1.0, 2.0, 2.0], 2.0);
        assert_eq!(s.prefix(), &[1.0]);
        assert_eq!(s.at(5), 2.0);
        assert_eq!(EcSeq::new(vec![0.0, 0.0], 0.0), EcSeq::zero());
    }

    #[test]
    fn sup_dist_examples() {
        let a = EcSeq::new(vec![1.0], 0.0);
        assert_eq!(sup_dist(&a, &a.clone()), 0.0);
        assert_eq!(sup_dist(&EcSeq::constant(2.0), &EcSeq::constant(-1.0)), 3.0);
        let a = EcSeq::new(vec![5.0, 3.0], 1.0);
        let b = EcSeq::new(vec![4.0], 0.0);
        // expanded: (5, 3, 1, 1, ...) vs (4, 0, 0, ...)
        assert_eq!(sup_dist(&a, &b), 3.0);
    }

    #[test]
    fn sup_norm_and_c0_membership() {
        let s = EcSeq::new(vec![-4.0, 1.0], 0.0);
        assert_eq!(s.sup_norm(), 4.0);
        assert!(s.is_c0());
        assert!(!EcSeq::constant(0.5).is_c0());
        assert_eq!(EcSeq::constant(-3.0).sup_norm(), 3.0);
    }

    #[test]
    fn finite_function_distance() {
        let a = FiniteFunction(vec![1.0, 2.0]);
        let b = FiniteFunction(vec![0.0, 0.0]);
        assert_eq!(sup_dist_fn(&a, &a).unwrap(), 0.0);
        assert_eq!(sup_dist_fn(&a, &b).unwrap(), 2.0);
        let a = FiniteFunction(vec![0.5, -1.0, 3.0]);
        let b = FiniteFunction(vec![1.0, -1.0, 0.0]);
        assert_eq!(sup_dist_fn(&a, &b).unwrap(), 3.0);
        assert!(sup_dist_fn(&a, &FiniteFunction(vec![0.0])).is_err());
    }

    #[test]
    fn metric_space_validation() {
        let k = FiniteMetricSpace::from_points_1d(&[0.0, 0.5, 1.0]).unwrap();
        assert_eq!(k.size(), 3);
        assert_eq!(k.diameter(), 1.0);
        assert_eq!(k.min_positive_distance(), Some(0.5));
        assert!(FiniteMetricSpace::new(vec![vec![0.0, 1.0], vec![2.0, 0.0]]).is_err());
        assert!(FiniteMetricSpace::new(vec![vec![1.0]]).is_err());
        let bad_triangle = vec![vec![0.0, 1.0, 5.0], vec![1.0, 0.0, 1.0], vec![5.0, 1.0, 0.0]];
        assert!(FiniteMetricSpace::new(bad_triangle).is_err());
        assert!(FiniteMetricSpace::from_points_1d(&[0.0, 0.0]).is_err());
        let single = FiniteMetricSpace::from_points_1d(&[3.0]).unwrap();
        assert_eq!(single.min_positive_distance(), None);
        assert_eq!(single.diameter(), 0.0);
    }

    #[test]
    fn json_forms() {
        let s: EcSeq = serde_json::from_str(r#"{"prefix":[1,2,3,3],"tail":3}"#).unwrap();
        assert_eq!(s.prefix(), &[1.0, 2.0]);
        let k: FiniteMetricSpace = serde_json::from_str(r#"{"points_1d":[0,1,3]}"#).unwrap();
        assert_eq!(k.rho(0, 2), 3.0);
        let k2: FiniteMetricSpace = serde_json::from_str(r#"{"rho":[[0,1],[1,0]]}"#).unwrap();
        assert_eq!(k2.size(), 2);
        let out = serde_json::to_string(&k).unwrap();
        assert!(out.starts_with(r#"{"rho":"#));
    }
}
