//! Cone coverings of a finite-dimensional normed space.
//!
//! If the unit sphere is covered by balls of radius `delta/2` around the
//! directions `u_i`, the cones `C_i = { y != 0 : y/||y|| in B(u_i, delta/2) }`
//! satisfy `||x - y|| <= ||x|| - (1 - delta) ||y||` for `x, y` in the same cone
//! with `||x|| >= ||y||`.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{le_rel, HOLDER_RTOL};
use crate::spaces::{NormedSpace, Point};

/// Refuse to build nets larger than this.
const MAX_DIRECTIONS: usize = 2_000_000;

#[derive(Debug, Clone, Serialize)]
pub struct ConeCover {
    pub delta: f64,
    /// Net centers on the unit sphere. A nonzero `x` belongs to the cone of the
    /// first center within `delta/2` of `x/||x||`.
    pub directions: Vec<Point>,
    /// Number of grid intervals per cube edge used to build the net.
    pub grid_intervals: usize,
    pub probes_checked: usize,
    /// Largest probe-to-net distance seen during verification.
    pub worst_probe_gap: f64,
    #[serde(skip)]
    space: NormedSpace,
}

impl ConeCover {
    pub fn space(&self) -> &NormedSpace {
        &self.space
    }

    /// Cone index of `x`, or `None` for the origin.
    pub fn assign(&self, x: &[f64]) -> Result<Option<usize>> {
        let n = self.space.norm(x)?;
        if n == 0.0 {
            return Ok(None);
        }
        let u: Vec<f64> = x.iter().map(|v| v / n).collect();
        let r = 0.5 * self.delta;
        let hit = self.directions.iter().position(|d| self.space.dist_unchecked(&u, d.coords()) <= r * (1.0 + 1e-12));
        Ok(hit)
    }

    /// The cone inequality for a same-cone pair, ordered internally by norm.
    pub fn cone_inequality_holds(&self, x: &[f64], y: &[f64]) -> Result<bool> {
        let (nx, ny) = (self.space.norm(x)?, self.space.norm(y)?);
        let (big, small, nb, ns) = if nx >= ny { (x, y, nx, ny) } else { (y, x, ny, nx) };
        let lhs = self.space.dist_unchecked(big, small);
        Ok(lhs <= nb - (1.0 - self.delta) * ns + 1e-9 * nb.max(1.0))
    }
}

/// A point of the cube surface grid: face `(axis, sign)` and integer offsets in
/// `0..=m` for every coordinate (the face coordinate is `0` or `m`).
fn grid_key(c: &[f64], m: usize) -> Vec<i64> {
    let mf = m as f64;
    c.iter().map(|v| (((v + 1.0) * 0.5 * mf).round() as i64).clamp(0, m as i64)).collect()
}

/// Enumerates the cube-surface grid with `m` intervals per edge; each surface
/// point is produced once, attached to the lowest axis at which it touches
/// the boundary.
fn cube_surface_grid(dim: usize, m: usize) -> Vec<Vec<f64>> {
    let step = 2.0 / m as f64;
    let coord = |l: usize| if l == m { 1.0 } else { -1.0 + l as f64 * step };
    let mut out = Vec::new();
    for axis in 0..dim {
        for sign in [-1.0, 1.0] {
            let free = dim - 1;
            let total = (m + 1).pow(free as u32);
            'points: for idx in 0..total {
                let mut rest = idx;
                let mut c = vec![0.0; dim];
                for (i, ci) in c.iter_mut().enumerate() {
                    if i == axis {
                        *ci = sign;
                        continue;
                    }
                    let l = rest % (m + 1);
                    rest /= m + 1;
                    *ci = coord(l);
                    if i < axis && (l == 0 || l == m) {
                        continue 'points;
                    }
                }
                out.push(c);
            }
        }
    }
    out
}

fn surface_count(dim: usize, m: usize) -> usize {
    let (a, b) = ((m + 1) as f64, (m as f64 - 1.0).max(0.0));
    (a.powi(dim as i32) - b.powi(dim as i32)) as usize
}

/// Builds a `delta/2`-net of the unit sphere by projecting a cube-surface grid,
/// refining until every probe of a finer, offset grid lies within `delta/2` of
/// a net point. `resolution >= 1` controls the probe density.
///
/// For norms with a known lower equivalence constant the initial grid already
/// satisfies the covering bound `||v|| <= C_up ||v||_inf`,
/// `||v|| >= c_low ||v||_inf` analytically; probing then confirms it.
pub fn cone_cover(space: &NormedSpace, delta: f64, resolution: usize) -> Result<ConeCover> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::invalid(format!("delta must lie in (0, 1], got {delta}")));
    }
    if resolution == 0 {
        return Err(Error::invalid("resolution must be >= 1"));
    }
    let dim = space.dim();
    let c_up = space.sup_over_cube();
    let c_low = match space.inf_over_cube_surface() {
        Some(c) => c,
        None => estimate_lower_constant(space, 8 * resolution.max(2)),
    };
    if c_low <= 0.0 {
        return Err(Error::NetConstruction("norm vanishes on the cube surface".into()));
    }
    let mut m = ((4.0 * c_up / (delta * c_low)).ceil() as usize).max(1);
    let radius = 0.5 * delta;
    loop {
        if dim > 1 && surface_count(dim, m) > MAX_DIRECTIONS {
            return Err(Error::NetConstruction(format!(
                "net with {m} intervals per edge would exceed {MAX_DIRECTIONS} directions (dim {dim}, delta {delta})"
            )));
        }
        let grid = cube_surface_grid(dim, m);
        let mut index = HashMap::with_capacity(grid.len());
        let directions: Vec<Point> = grid
            .iter()
            .enumerate()
            .map(|(i, c)| {
                index.insert(grid_key(c, m), i);
                let n = space.norm_unchecked(c);
                Point(c.iter().map(|v| v / n).collect())
            })
            .collect();

        let probe_m = m * resolution + 1;
        let mut worst = 0.0_f64;
        let mut probes = 0usize;
        let probe_total = surface_count(dim, probe_m);
        let ok = if dim > 1 && probe_total > 4 * MAX_DIRECTIONS {
            false
        } else {
            for p in cube_surface_grid(dim, probe_m) {
                probes += 1;
                let n = space.norm_unchecked(&p);
                let u: Vec<f64> = p.iter().map(|v| v / n).collect();
                let gap = nearest_gap(space, &p, &u, m, &index, &directions);
                worst = worst.max(gap);
            }
            worst <= radius
        };
        if ok {
            return Ok(ConeCover {
                delta,
                directions,
                grid_intervals: m,
                probes_checked: probes,
                worst_probe_gap: worst,
                space: space.clone(),
            });
        }
        if dim > 1 && surface_count(dim, 2 * m) > MAX_DIRECTIONS {
            return Err(Error::NetConstruction(format!(
                "probe gap {worst} exceeds delta/2 = {radius} at {m} intervals per edge; refinement limit reached"
            )));
        }
        m *= 2;
    }
}

/// Distance from the normalized probe `u` to the net points generated by the
/// grid neighbours of the cube point `c`.
fn nearest_gap(
    space: &NormedSpace,
    c: &[f64],
    u: &[f64],
    m: usize,
    index: &HashMap<Vec<i64>, usize>,
    directions: &[Point],
) -> f64 {
    let base = grid_key(c, m);
    let mut best = f64::INFINITY;
    // Rounding picks the nearest grid point on the probe's own face; also try
    // the key snapped onto neighbouring faces, which covers probes near edges.
    let mut candidates = vec![base.clone()];
    for (i, &v) in c.iter().enumerate() {
        if v.abs() < 1.0 {
            let mut snapped = base.clone();
            snapped[i] = if v > 0.0 { m as i64 } else { 0 };
            candidates.push(snapped);
        }
    }
    for key in candidates {
        let key = canonical_surface_key(key, m);
        if let Some(&i) = index.get(&key) {
            best = best.min(space.dist_unchecked(u, directions[i].coords()));
        }
    }
    if best.is_infinite() {
        // Fallback: exhaustive scan (only reached for degenerate probes).
        best = directions.iter().map(|d| space.dist_unchecked(u, d.coords())).fold(f64::INFINITY, f64::min);
    }
    best
}

/// Ensures a key lies on the cube surface (some coordinate at 0 or m).
fn canonical_surface_key(mut key: Vec<i64>, m: usize) -> Vec<i64> {
    let m = m as i64;
    if !key.iter().any(|&l| l == 0 || l == m) {
        let (i, _) =
            key.iter().enumerate().map(|(i, &l)| (i, (l - m / 2).abs())).max_by_key(|&(_, d)| d).expect("nonempty key");
        key[i] = if key[i] * 2 >= m { m } else { 0 };
    }
    key
}

/// Half the smallest norm seen on a cube-surface sample; only a starting
/// point for the refinement loop, which is always probe-checked.
fn estimate_lower_constant(space: &NormedSpace, m: usize) -> f64 {
    let min = cube_surface_grid(space.dim(), m).iter().map(|c| space.norm_unchecked(c)).fold(f64::INFINITY, f64::min);
    0.5 * min
}

/// Greedy `delta/2`-net of the directions of the given nonzero points: each
/// point joins the first existing center within `delta/2`, otherwise its own
/// direction becomes a new center. Returns the centers and the assignment.
pub(crate) fn data_cones(space: &NormedSpace, points: &[Vec<f64>], delta: f64) -> (Vec<Point>, Vec<usize>) {
    let r = 0.5 * delta;
    let mut centers: Vec<Point> = Vec::new();
    let mut assignment = Vec::with_capacity(points.len());
    for p in points {
        let n = space.norm_unchecked(p);
        let u: Vec<f64> = p.iter().map(|v| v / n).collect();
        match centers.iter().position(|c| le_rel(space.dist_unchecked(&u, c.coords()), r, HOLDER_RTOL)) {
            Some(i) => assignment.push(i),
            None => {
                assignment.push(centers.len());
                centers.push(Point(u));
            }
        }
    }
    (centers, assignment)
}
