//! Finite covering of a point set in `l_inf^n` by cells `A_i` with anchors
//! `x^i` such that every member `x` of `A_i` satisfies
//!
//! ```text
//!   ||x|| >= ||x^i|| - eps   and   ||x - x^i|| <= ||x|| - ||x^i|| + eps.
//! ```
//!
//! The construction recurses on the dimension. Inside the face cone
//! `C_{j,s} = { x : x_j = s ||x|| }` the smallest point `a` spans the translated
//! cone `a + C_{j,s}`, where the inequality holds exactly. Every other point is
//! close to a lower-dimensional face `C_{j,s} ∩ C_{k,e}`: it lies in a thin band
//! `|x_j| - e x_k < |a_j| - e a_k`, which is cut into slabs of width below
//! `eps/3`. Each slab is projected onto that face (coordinate `k` replaced by
//! `e |x_j|`, then dropped), and the lemma is applied in dimension `n - 1`
//! with `eps/3`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::le_rel;
use crate::spaces::Point;

/// One cell: indices into the input point list and the anchor index.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cell {
    /// Stable path id, e.g. `j0+/k1-n3/B`.
    pub id: String,
    pub members: Vec<usize>,
    pub representative: usize,
}

/// Band family `(k, e)` of a cone node: width `d = |a_j| - e a_k`, cut into
/// `count` slabs of width `d / count < eps/3`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandFamily {
    pub k: usize,
    pub eta: i8,
    pub width: f64,
    pub count: usize,
    /// Slab numbers (1-based) that received points.
    pub occupied: Vec<usize>,
}

/// One application of the lemma to a face cone in some dimension.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConeNode {
    pub path: String,
    pub dim: usize,
    pub face: usize,
    pub sign: i8,
    pub epsilon: f64,
    /// Input index of the anchor `a` (the point whose projection is the anchor
    /// at this level).
    pub anchor: usize,
    pub bands: Vec<BandFamily>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionTrace {
    pub epsilon: f64,
    pub cells: Vec<Cell>,
    pub nodes: Vec<ConeNode>,
}

/// Point tagged with its index in the caller's list.
#[derive(Clone)]
struct Tagged {
    id: usize,
    x: Vec<f64>,
}

fn linf(x: &[f64]) -> f64 {
    x.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

fn sign_char(s: i8) -> char {
    if s < 0 {
        '-'
    } else {
        '+'
    }
}

/// Minimal norm, ties broken lexicographically on coordinates, then by id.
fn smallest(points: &[Tagged]) -> &Tagged {
    points
        .iter()
        .min_by(|a, b| {
            linf(&a.x)
                .total_cmp(&linf(&b.x))
                .then_with(|| {
                    a.x.iter()
                        .zip(&b.x)
                        .map(|(p, q)| p.total_cmp(q))
                        .find(|o| o.is_ne())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .then_with(|| a.id.cmp(&b.id))
        })
        .expect("nonempty")
}

/// Covers `points` (in `l_inf^n`, origin excluded) by cells satisfying the
/// inequalities above, and checks them exhaustively before returning.
pub fn linf_partition(points: &[Point], epsilon: f64) -> Result<PartitionTrace> {
    if points.is_empty() {
        return Err(Error::invalid("partition needs at least one point"));
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::invalid(format!("epsilon must be positive, got {epsilon}")));
    }
    let n = points[0].dim();
    if n == 0 {
        return Err(Error::invalid("points must have at least one coordinate"));
    }
    for (i, p) in points.iter().enumerate() {
        if p.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, found: p.dim() });
        }
        if p.coords().iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid(format!("point {i} has non-finite coordinates")));
        }
        if linf(p.coords()) == 0.0 {
            return Err(Error::invalid(format!("point {i} is the origin")));
        }
    }

    // Each point goes to the first face cone containing it.
    let mut groups: BTreeMap<(usize, i8), Vec<Tagged>> = BTreeMap::new();
    for (id, p) in points.iter().enumerate() {
        let x = p.coords();
        let norm = linf(x);
        let (j, s) = (0..n)
            .flat_map(|j| [(j, -1i8), (j, 1i8)])
            .find(|&(j, s)| x[j] == f64::from(s) * norm)
            .expect("the max coordinate defines a face cone");
        groups.entry((j, s)).or_default().push(Tagged { id, x: x.to_vec() });
    }

    let mut cells = Vec::new();
    let mut nodes = Vec::new();
    for ((j, s), members) in groups {
        let path = format!("j{j}{}", sign_char(s));
        cover_cone(&members, epsilon, j, s, &path, &mut cells, &mut nodes);
    }
    let trace = PartitionTrace { epsilon, cells, nodes };
    verify_partition(points, &trace)?;
    Ok(trace)
}

fn cover_cone(
    members: &[Tagged],
    eps: f64,
    j: usize,
    s: i8,
    path: &str,
    cells: &mut Vec<Cell>,
    nodes: &mut Vec<ConeNode>,
) {
    let n = members[0].x.len();
    let anchor = smallest(members).clone();
    let sf = f64::from(s);

    if n == 1 {
        // A single ray: ||x - a|| = ||x|| - ||a|| for every member.
        cells.push(Cell {
            id: format!("{path}/ray"),
            members: members.iter().map(|t| t.id).collect(),
            representative: anchor.id,
        });
        nodes.push(ConeNode {
            path: path.to_string(),
            dim: 1,
            face: j,
            sign: s,
            epsilon: eps,
            anchor: anchor.id,
            bands: Vec::new(),
        });
        return;
    }

    let a = &anchor.x;
    let in_translated_cone = |x: &[f64]| {
        let lead = sf * (x[j] - a[j]);
        (0..n).filter(|&k| k != j).all(|k| lead >= (x[k] - a[k]).abs())
    };
    let (inside, outside): (Vec<&Tagged>, Vec<&Tagged>) = members.iter().partition(|t| in_translated_cone(&t.x));
    cells.push(Cell {
        id: format!("{path}/B"),
        members: inside.iter().map(|t| t.id).collect(),
        representative: anchor.id,
    });

    let families: Vec<(usize, i8, f64, usize)> = (0..n)
        .filter(|&k| k != j)
        .flat_map(|k| [(k, -1i8), (k, 1i8)])
        .map(|(k, e)| {
            let width = a[j].abs() - f64::from(e) * a[k];
            let count = (3.0 * width / eps).floor() as usize + 1;
            (k, e, width, count)
        })
        .collect();

    // slab key (family index, slab number) -> members
    let mut slabs: BTreeMap<(usize, usize), Vec<Tagged>> = BTreeMap::new();
    for t in outside {
        let x = &t.x;
        let gap = |&(k, e, width, _): &(usize, i8, f64, usize)| x[j].abs() - f64::from(e) * x[k] - width;
        let fam = families.iter().position(|f| gap(f) < 0.0).unwrap_or_else(|| {
            // Only reachable through rounding at a band edge.
            families
                .iter()
                .enumerate()
                .min_by(|(_, f), (_, g)| gap(f).total_cmp(&gap(g)))
                .map(|(i, _)| i)
                .expect("n >= 2 gives at least two families")
        });
        let (k, e, width, count) = families[fam];
        let v = (x[j].abs() - f64::from(e) * x[k]).max(0.0);
        let slab = if width > 0.0 { ((v / (width / count as f64)).floor() as usize + 1).min(count) } else { 1 };
        // Project onto the face C_{j,s} ∩ C_{k,e} and drop coordinate k.
        let projected: Vec<f64> = x.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, &c)| c).collect();
        slabs.entry((fam, slab)).or_default().push(Tagged { id: t.id, x: projected });
    }

    let mut bands: Vec<BandFamily> = families
        .iter()
        .map(|&(k, eta, width, count)| BandFamily { k, eta, width, count, occupied: Vec::new() })
        .collect();
    for ((fam, slab), projected) in &slabs {
        bands[*fam].occupied.push(*slab);
        let (k, e, _, _) = families[*fam];
        let sub_j = if k > j { j } else { j - 1 };
        let sub_path = format!("{path}/k{k}{}n{slab}", sign_char(e));
        cover_cone(projected, eps / 3.0, sub_j, s, &sub_path, cells, nodes);
    }
    nodes.push(ConeNode { path: path.to_string(), dim: n, face: j, sign: s, epsilon: eps, anchor: anchor.id, bands });
}

/// Exhaustive check of the covering and of both cell inequalities for every
/// member (relative tolerance `1e-9` on the magnitudes involved).
pub fn verify_partition(points: &[Point], trace: &PartitionTrace) -> Result<()> {
    let eps = trace.epsilon;
    let mut covered = vec![false; points.len()];
    for cell in &trace.cells {
        let r = cell.representative;
        if !cell.members.contains(&r) {
            return Err(Error::Inconsistent(format!("cell {} does not contain its representative", cell.id)));
        }
        let xr = points[r].coords();
        let nr = linf(xr);
        for &m in &cell.members {
            covered[m] = true;
            let x = points[m].coords();
            let nx = linf(x);
            let diff: Vec<f64> = x.iter().zip(xr).map(|(a, b)| a - b).collect();
            let d = linf(&diff);
            if !le_rel(nr - eps, nx, 1e-9) {
                return Err(Error::Inconsistent(format!(
                    "cell {}: ||x_{m}|| = {nx} < ||x^i|| - eps = {}",
                    cell.id,
                    nr - eps
                )));
            }
            if !le_rel(d, nx - nr + eps, 1e-9) {
                return Err(Error::Inconsistent(format!(
                    "cell {}: ||x_{m} - x^i|| = {d} > ||x|| - ||x^i|| + eps = {}",
                    cell.id,
                    nx - nr + eps
                )));
            }
        }
    }
    if let Some(i) = covered.iter().position(|c| !c) {
        return Err(Error::Inconsistent(format!("point {i} is not covered by any cell")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[&[f64]]) -> Vec<Point> {
        v.iter().map(|c| Point(c.to_vec())).collect()
    }

    #[test]
    fn one_dimensional_ray() {
        let m = pts(&[&[1.0], &[3.0]]);
        let t = linf_partition(&m, 0.1).unwrap();
        assert_eq!(t.cells.len(), 1);
        assert_eq!(t.cells[0].representative, 0);
        assert_eq!(t.cells[0].members, vec![0, 1]);
    }

    #[test]
    fn both_rays_on_the_line() {
        let m = pts(&[&[1.0], &[-2.0], &[3.0], &[-0.5]]);
        let t = linf_partition(&m, 0.1).unwrap();
        assert_eq!(t.cells.len(), 2);
        assert_eq!(t.cells[0].id, "j0-/ray");
        assert_eq!(t.cells[0].representative, 3);
    }

    #[test]
    fn points_in_one_face_cone() {
        let m = pts(&[&[2.0, 1.0], &[3.0, 1.0], &[5.0, 2.0]]);
        let t = linf_partition(&m, 0.5).unwrap();
        verify_partition(&m, &t).unwrap();
        // (3,1) and (5,2) lie in (2,1) + C_{0,+}
        assert_eq!(t.cells[0].id, "j0+/B");
        assert_eq!(t.cells[0].members, vec![0, 1, 2]);
    }

    #[test]
    fn off_cone_points_go_to_bands() {
        // anchor (1, 0); (4, 3.5) is not in (1,0) + C_{0,+}
        let m = pts(&[&[1.0, 0.0], &[4.0, 3.5], &[4.0, -3.9]]);
        let t = linf_partition(&m, 0.3).unwrap();
        verify_partition(&m, &t).unwrap();
        assert!(t.cells.len() >= 3);
        let root = t.nodes.iter().find(|n| n.path == "j0+").unwrap();
        assert_eq!(root.anchor, 0);
        for b in &root.bands {
            assert!(b.width / (b.count as f64) < 0.3 / 3.0);
        }
    }

    #[test]
    fn verification_catches_bad_cells() {
        let m = pts(&[&[1.0, 0.0], &[1.0, 1.0]]);
        let bogus = PartitionTrace {
            epsilon: 0.01,
            cells: vec![Cell { id: "x".into(), members: vec![0, 1], representative: 0 }],
            nodes: vec![],
        };
        assert!(verify_partition(&m, &bogus).is_err());
        let uncovered = PartitionTrace {
            epsilon: 0.01,
            cells: vec![Cell { id: "x".into(), members: vec![0], representative: 0 }],
            nodes: vec![],
        };
        assert!(verify_partition(&m, &uncovered).is_err());
    }

    #[test]
    fn rejects_origin_and_bad_eps() {
        assert!(linf_partition(&pts(&[&[0.0, 0.0]]), 0.1).is_err());
        assert!(linf_partition(&pts(&[&[1.0, 0.0]]), 0.0).is_err());
        assert!(linf_partition(&[], 0.1).is_err());
    }
}
