//! Finite-dimensional normed spaces and the Hölder gauge `K d(x, y)^alpha`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::holder_radius;

/// A point of a [`NormedSpace`], stored as raw coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(pub Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point(coords)
    }

    pub fn origin(dim: usize) -> Self {
        Point(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn sub(&self, other: &Point) -> Point {
        Point(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn add(&self, other: &Point) -> Point {
        Point(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, s: f64) -> Point {
        Point(self.0.iter().map(|a| a * s).collect())
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Point(v)
    }
}

/// Hölder constant `K >= 0` and exponent `alpha` in `(0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct HolderParams {
    #[serde(rename = "K")]
    pub k: f64,
    pub alpha: f64,
}

#[derive(Deserialize)]
struct RawParams {
    #[serde(rename = "K")]
    k: f64,
    alpha: f64,
}

impl TryFrom<RawParams> for HolderParams {
    type Error = Error;
    fn try_from(raw: RawParams) -> Result<Self> {
        HolderParams::new(raw.k, raw.alpha)
    }
}

impl HolderParams {
    pub fn new(k: f64, alpha: f64) -> Result<Self> {
        if !(k.is_finite() && k >= 0.0) {
            return Err(Error::invalid(format!("Hölder constant must be finite and >= 0, got {k}")));
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::invalid(format!("exponent must lie in (0, 1], got {alpha}")));
        }
        Ok(HolderParams { k, alpha })
    }

    pub fn lipschitz(k: f64) -> Result<Self> {
        Self::new(k, 1.0)
    }

    /// `K t^alpha` for a distance `t`.
    pub fn radius(&self, t: f64) -> f64 {
        holder_radius(self.k, t, self.alpha)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpaceKind {
    /// `l_p^dim`, `1 <= p < inf`.
    Lp { p: f64, dim: usize },
    /// `l_inf^dim`.
    LInf { dim: usize },
    /// 1-direct sum: coordinates are split across the parts in order and the
    /// norm is the sum of the part norms.
    L1Sum(Vec<NormedSpace>),
    /// `||x|| = max_i |f_i(x)|` for the given row functionals.
    Polytope(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpaceDescriptor", into = "SpaceDescriptor")]
pub struct NormedSpace {
    kind: SpaceKind,
    dim: usize,
}

/// JSON form of a [`NormedSpace`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum SpaceDescriptor {
    Lp { p: f64, dim: usize },
    Linf { dim: usize },
    L1sum { parts: Vec<SpaceDescriptor> },
    Polytope { functionals: Vec<Vec<f64>> },
}

impl TryFrom<SpaceDescriptor> for NormedSpace {
    type Error = Error;
    fn try_from(d: SpaceDescriptor) -> Result<Self> {
        match d {
            SpaceDescriptor::Lp { p, dim } => NormedSpace::lp(p, dim),
            SpaceDescriptor::Linf { dim } => NormedSpace::linf(dim),
            SpaceDescriptor::L1sum { parts } => {
                let parts = parts.into_iter().map(NormedSpace::try_from).collect::<Result<Vec<_>>>()?;
                NormedSpace::l1_sum(parts)
            }
            SpaceDescriptor::Polytope { functionals } => NormedSpace::polytope(functionals),
        }
    }
}

impl From<NormedSpace> for SpaceDescriptor {
    fn from(s: NormedSpace) -> Self {
        match s.kind {
            SpaceKind::Lp { p, dim } => SpaceDescriptor::Lp { p, dim },
            SpaceKind::LInf { dim } => SpaceDescriptor::Linf { dim },
            SpaceKind::L1Sum(parts) => {
                SpaceDescriptor::L1sum { parts: parts.into_iter().map(SpaceDescriptor::from).collect() }
            }
            SpaceKind::Polytope(functionals) => SpaceDescriptor::Polytope { functionals },
        }
    }
}

impl NormedSpace {
    pub fn lp(p: f64, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("space dimension must be >= 1"));
        }
        if !(p >= 1.0) || p.is_infinite() {
            return Err(Error::invalid(format!("lp exponent must be finite and >= 1 (use linf for p = inf), got {p}")));
        }
        Ok(NormedSpace { kind: SpaceKind::Lp { p, dim }, dim })
    }

    pub fn linf(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("space dimension must be >= 1"));
        }
        Ok(NormedSpace { kind: SpaceKind::LInf { dim }, dim })
    }

    pub fn l1_sum(parts: Vec<NormedSpace>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::invalid("l1sum needs at least one part"));
        }
        let dim = parts.iter().map(|p| p.dim).sum();
        Ok(NormedSpace { kind: SpaceKind::L1Sum(parts), dim })
    }

    /// Polytope norm from row functionals. The functionals are used as given;
    /// they must span the dual so that the norm is definite.
    pub fn polytope(functionals: Vec<Vec<f64>>) -> Result<Self> {
        let dim = functionals.first().map(Vec::len).unwrap_or(0);
        if dim == 0 {
            return Err(Error::invalid("polytope needs at least one non-empty functional"));
        }
        if let Some(bad) = functionals.iter().find(|f| f.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: bad.len() });
        }
        if functionals.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::invalid("polytope functionals must be finite"));
        }
        if matrix_rank(&functionals) < dim {
            return Err(Error::invalid(
                "polytope functionals do not span the dual; the norm would vanish on a nonzero vector",
            ));
        }
        Ok(NormedSpace { kind: SpaceKind::Polytope(functionals), dim })
    }

    /// The 4-dimensional space `l2^2 (+)_1 l2^2`.
    pub fn l2_l2_sum() -> Self {
        let plane = NormedSpace::lp(2.0, 2).expect("valid");
        NormedSpace::l1_sum(vec![plane.clone(), plane]).expect("valid")
    }

    pub fn kind(&self) -> &SpaceKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: x.len() });
        }
        Ok(())
    }

    pub fn norm(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        Ok(self.norm_unchecked(x))
    }

    pub(crate) fn norm_unchecked(&self, x: &[f64]) -> f64 {
        match &self.kind {
            SpaceKind::Lp { p, .. } => lp_norm(x, *p),
            SpaceKind::LInf { .. } => x.iter().fold(0.0_f64, |m, v| m.max(v.abs())),
            SpaceKind::L1Sum(parts) => {
                let mut offset = 0;
                let mut total = 0.0;
                for part in parts {
                    total += part.norm_unchecked(&x[offset..offset + part.dim]);
                    offset += part.dim;
                }
                total
            }
            SpaceKind::Polytope(fs) => fs.iter().map(|f| dot(f, x).abs()).fold(0.0_f64, f64::max),
        }
    }

    pub fn dist(&self, x: &Point, y: &Point) -> Result<f64> {
        self.check_dim(&x.0)?;
        self.check_dim(&y.0)?;
        Ok(self.dist_unchecked(&x.0, &y.0))
    }

    pub(crate) fn dist_unchecked(&self, x: &[f64], y: &[f64]) -> f64 {
        let diff: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
        self.norm_unchecked(&diff)
    }

    /// `K ||x - y||^alpha`.
    pub fn dist_alpha(&self, x: &Point, y: &Point, params: HolderParams) -> Result<f64> {
        Ok(params.radius(self.dist(x, y)?))
    }

    /// Upper norm-equivalence constant: `||v|| <= c ||v||_inf`. A norm is convex,
    /// so its maximum over the cube is attained at a vertex.
    pub fn sup_over_cube(&self) -> f64 {
        let n = self.dim;
        if n <= 16 {
            let mut best = 0.0_f64;
            let mut v = vec![0.0; n];
            for mask in 0u32..(1u32 << n) {
                for (i, c) in v.iter_mut().enumerate() {
                    *c = if mask & (1 << i) != 0 { 1.0 } else { -1.0 };
                }
                best = best.max(self.norm_unchecked(&v));
            }
            best
        } else {
            (0..n)
                .map(|i| {
                    let mut e = vec![0.0; n];
                    e[i] = 1.0;
                    self.norm_unchecked(&e)
                })
                .sum()
        }
    }

    /// Lower norm-equivalence constant `||v|| >= c ||v||_inf`, when it is known
    /// in closed form. Polytope norms have no cheap exact value.
    pub fn inf_over_cube_surface(&self) -> Option<f64> {
        match &self.kind {
            SpaceKind::Lp { .. } | SpaceKind::LInf { .. } => Some(1.0),
            SpaceKind::L1Sum(parts) => {
                parts.iter().map(NormedSpace::inf_over_cube_surface).try_fold(f64::INFINITY, |m, c| c.map(|c| m.min(c)))
            }
            SpaceKind::Polytope(_) => None,
        }
    }

    /// Linear isometry onto `l_inf^n` for a polytope norm: `x -> (f_i(x))_i`.
    pub fn polytope_embed(&self) -> Result<LinearMap> {
        match &self.kind {
            SpaceKind::Polytope(fs) => Ok(LinearMap { rows: fs.clone(), source_dim: self.dim }),
            _ => Err(Error::invalid("polytope_embed requires a polytope space")),
        }
    }
}

fn lp_norm(x: &[f64], p: f64) -> f64 {
    if p == 1.0 {
        return x.iter().map(|v| v.abs()).sum();
    }
    if p == 2.0 {
        return x.iter().map(|v| v * v).sum::<f64>().sqrt();
    }
    let scale = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    scale * x.iter().map(|v| (v.abs() / scale).powf(p)).sum::<f64>().powf(1.0 / p)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn matrix_rank(rows: &[Vec<f64>]) -> usize {
    let mut m: Vec<Vec<f64>> = rows.to_vec();
    let ncols = m.first().map(Vec::len).unwrap_or(0);
    let scale = m.iter().flatten().fold(0.0_f64, |a, v| a.max(v.abs()));
    let eps = 1e-12 * scale.max(1.0);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..m.len())
            .filter(|&r| m[r][col].abs() > eps)
            .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
        else {
            continue;
        };
        m.swap(rank, pivot);
        for r in 0..m.len() {
            if r != rank {
                let factor = m[r][col] / m[rank][col];
                for c in col..ncols {
                    m[r][c] -= factor * m[rank][c];
                }
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

/// A linear map `R^source_dim -> R^rows.len()` given by its matrix rows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearMap {
    pub rows: Vec<Vec<f64>>,
    pub source_dim: usize,
}

impl LinearMap {
    pub fn target_dim(&self) -> usize {
        self.rows.len()
    }

    pub fn target_space(&self) -> NormedSpace {
        NormedSpace::linf(self.rows.len()).expect("polytope has at least one functional")
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.source_dim {
            return Err(Error::DimensionMismatch { expected: self.source_dim, found: x.len() });
        }
        Ok(self.rows.iter().map(|f| dot(f, x)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{eq_rel, le_rel, NORM_RTOL};

    fn l1_plane() -> NormedSpace {
        NormedSpace::polytope(vec![vec![1.0, 1.0], vec![1.0, -1.0]]).unwrap()
    }

    #[test]
    fn l1sum_of_planes() {
        let s = NormedSpace::l2_l2_sum();
        assert_eq!(s.dim(), 4);
        assert_eq!(s.norm(&[3.0, 4.0, 0.0, 0.0]).unwrap(), 5.0);
        let v = s.norm(&[121.0, 11.0, 0.0, 0.0]).unwrap();
        assert!(eq_rel(v, (11f64.powi(4) + 121.0).sqrt(), NORM_RTOL));
        assert!((v - 121.499).abs() < 1e-3);
        assert!(v <= 11f64.powi(2) + 0.5);
    }

    #[test]
    fn linf_norm() {
        let s = NormedSpace::linf(3).unwrap();
        assert_eq!(s.norm(&[1.0, -2.0, 0.5]).unwrap(), 2.0);
    }

    #[test]
    fn dist_alpha_values() {
        let line = NormedSpace::linf(1).unwrap();
        let o = Point(vec![0.0]);
        let p = HolderParams::new(1.0, 1.0).unwrap();
        assert_eq!(line.dist_alpha(&o, &Point(vec![2.0]), p).unwrap(), 2.0);
        let half = HolderParams::new(1.0, 0.5).unwrap();
        assert_eq!(line.dist_alpha(&o, &Point(vec![4.0]), half).unwrap(), 2.0);
        let plane = NormedSpace::linf(2).unwrap();
        let k2 = HolderParams::new(2.0, 0.5).unwrap();
        let v = plane.dist_alpha(&Point(vec![0.0, 0.0]), &Point(vec![1.0, 3.0]), k2).unwrap();
        assert!((v - 2.0 * 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let s = NormedSpace::linf(2).unwrap();
        assert_eq!(s.norm(&[1.0]), Err(Error::DimensionMismatch { expected: 2, found: 1 }));
    }

    #[test]
    fn invalid_parameters() {
        assert!(NormedSpace::lp(0.5, 2).is_err());
        assert!(NormedSpace::lp(2.0, 0).is_err());
        assert!(NormedSpace::l1_sum(vec![]).is_err());
        assert!(NormedSpace::polytope(vec![vec![1.0, 0.0]]).is_err());
        assert!(NormedSpace::polytope(vec![vec![1.0, 0.0], vec![1.0]]).is_err());
        assert!(HolderParams::new(1.0, 0.0).is_err());
        assert!(HolderParams::new(1.0, 1.5).is_err());
        assert!(HolderParams::new(-1.0, 1.0).is_err());
    }

    #[test]
    fn polytope_on_the_line() {
        let s = NormedSpace::polytope(vec![vec![1.0], vec![-1.0]]).unwrap();
        let t = s.polytope_embed().unwrap();
        assert_eq!(t.apply(&[2.5]).unwrap(), vec![2.5, -2.5]);
        assert_eq!(s.norm(&[-3.0]).unwrap(), 3.0);
    }

    #[test]
    fn polytope_with_coordinate_functionals_is_identity() {
        let s = NormedSpace::polytope(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let t = s.polytope_embed().unwrap();
        assert_eq!(t.apply(&[0.3, -7.0]).unwrap(), vec![0.3, -7.0]);
        assert_eq!(t.target_space(), NormedSpace::linf(2).unwrap());
    }

    #[test]
    fn l1_plane_embeds_isometrically() {
        let s = l1_plane();
        let t = s.polytope_embed().unwrap();
        let tx = t.apply(&[0.3, -0.7]).unwrap();
        assert!((tx[0] + 0.4).abs() < 1e-15 && (tx[1] - 1.0).abs() < 1e-15);
        let linf = NormedSpace::linf(2).unwrap();
        assert!((linf.norm(&tx).unwrap() - 1.0).abs() < 1e-15);
        assert!((s.norm(&[0.3, -0.7]).unwrap() - 1.0).abs() < 1e-15);
        assert!(NormedSpace::linf(2).unwrap().polytope_embed().is_err());
    }

    #[test]
    fn basis_vectors_have_positive_norm() {
        let s = l1_plane();
        for i in 0..2 {
            let mut e = vec![0.0; 2];
            e[i] = 1.0;
            assert!(s.norm(&e).unwrap() > 0.0);
        }
    }

    #[test]
    fn disjoint_supports_add_in_the_sum() {
        let s = NormedSpace::l2_l2_sum();
        let x = [3.0, -4.0, 0.0, 0.0];
        let y = [0.0, 0.0, 1.0, 2.0];
        let diff: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
        assert_eq!(s.norm(&diff).unwrap(), s.norm(&x).unwrap() + s.norm(&y).unwrap());
    }

    #[test]
    fn json_round_trip() {
        let json = r#"{"type":"l1sum","parts":[{"type":"lp","p":2,"dim":2},{"type":"linf","dim":1},{"type":"polytope","functionals":[[1,1],[1,-1]]}]}"#;
        let s: NormedSpace = serde_json_from_str(json);
        assert_eq!(s.dim(), 5);
        assert!(le_rel(s.norm(&[3.0, 4.0, -1.0, 0.5, 0.5]).unwrap(), 7.0, 1e-15));
        let back = serde_json::to_string(&s).unwrap();
        let again: NormedSpace = serde_json_from_str(&back);
        assert_eq!(s, again);
    }

    #[test]
    fn json_rejects_invalid_descriptors() {
        assert!(serde_json::from_str::<NormedSpace>(r#"{"type":"lp","p":0.5,"dim":2}"#).is_err());
        assert!(serde_json::from_str::<NormedSpace>(r#"{"type":"ball","dim":2}"#).is_err());
    }

    fn serde_json_from_str(s: &str) -> NormedSpace {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn cube_constants() {
        let s = NormedSpace::l2_l2_sum();
        assert!((s.sup_over_cube() - 2.0 * 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(s.inf_over_cube_surface(), Some(1.0));
        assert_eq!(l1_plane().inf_over_cube_surface(), None);
        assert_eq!(l1_plane().sup_over_cube(), 2.0);
    }
}
