//! Comparison tolerances shared by every module.

/// Relative tolerance for norm identities (homogeneity, isometries).
pub const NORM_RTOL: f64 = 1e-12;

/// Relative tolerance for Hölder verification.
pub const HOLDER_RTOL: f64 = 1e-9;

/// `lhs <= rhs` up to `rtol` relative to the larger magnitude.
pub fn le_rel(lhs: f64, rhs: f64, rtol: f64) -> bool {
    lhs <= rhs + rtol * lhs.abs().max(rhs.abs())
}

pub fn eq_rel(a: f64, b: f64, rtol: f64) -> bool {
    le_rel(a, b, rtol) && le_rel(b, a, rtol)
}

/// `K * t^alpha`, with `0^alpha = 0`.
pub fn holder_radius(k: f64, t: f64, alpha: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else if alpha == 1.0 {
        k * t
    } else {
        k * t.powf(alpha)
    }
}

/// Max reduction that ignores order of evaluation (ties keep the first index).
pub fn argmax<I: IntoIterator<Item = f64>>(it: I) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in it.into_iter().enumerate() {
        match best {
            Some((_, b)) if v <= b => {}
            _ => best = Some((i, v)),
        }
    }
    best
}

pub fn argmin<I: IntoIterator<Item = f64>>(it: I) -> Option<(usize, f64)> {
    argmax(it.into_iter().map(|v| -v)).map(|(i, v)| (i, -v))
}
