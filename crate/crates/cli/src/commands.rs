//! One function per subcommand; each fills a [`Report`].

use std::fs;
use std::path::Path;

use hext_core::extend_c::{c0_extend, c_extend, c_feasible, forced_intervals, ConeCover};
use hext_core::extend_ck::{
    almost_extend_net, ck_extend, ck_feasible, infconv_ck, reduce_ck_to_c, xi_modulus, ModulusTable,
};
use hext_core::{
    cone_cover, feasibility_interval, gen_counterexample, linf_partition, linf_vector_extend, scalar_extend,
    vector_certificate, verify_counterexample, verify_partition, EcSeq, Error, FiniteFunction, FiniteMetricSpace,
    NormedSpace, OnePointExtend, PartialMap, Point, Policy, SpaceKind,
};
use serde_json::{json, Value};

use crate::output::{json as to_value, Report};
use crate::problem::{self, Map, Overrides, ProblemFile};

/// Caller-side problems: unreadable or malformed input, violated preconditions.
#[derive(Debug)]
pub struct InputError(pub String);

impl From<Error> for InputError {
    fn from(e: Error) -> Self {
        InputError(e.to_string())
    }
}

impl From<String> for InputError {
    fn from(s: String) -> Self {
        InputError(s)
    }
}

fn read(path: &Path) -> Result<Vec<u8>, InputError> {
    fs::read(path).map_err(|e| InputError(format!("cannot read {}: {e}", path.display())))
}

fn load(path: &Path, report: &mut Report) -> Result<ProblemFile, InputError> {
    let bytes = read(path)?;
    report.digest_input(&bytes);
    let text = String::from_utf8(bytes).map_err(|_| InputError(format!("{} is not UTF-8", path.display())))?;
    Ok(problem::parse(&text)?)
}

fn targets(file: &ProblemFile, o: &Overrides) -> Result<Vec<Point>, InputError> {
    let t = file.targets(o);
    if t.is_empty() {
        return Err(InputError("no extension point: give --at or extend_at".into()));
    }
    Ok(t)
}

/// Input maps must satisfy their own Hölder claim before anything is extended.
fn require_holder(map: &Map) -> Result<(), InputError> {
    map.verify_holder().map_err(|e| InputError(format!("input map: {e}")))
}

fn params_json(map: &Map) -> Value {
    let p = map.params();
    json!({ "K": p.k, "alpha": p.alpha })
}

pub fn check(path: &Path, o: &Overrides, report: &mut Report) -> Result<(), InputError> {
    let file = load(path, report)?;
    let map = file.map(o)?;
    let alpha = map.params().alpha;
    let given = o.k.or(file.k).is_some();
    report.result("kind", json!(map.kind()));
    report.result("points", json!(file.points.len()));
    report.result("alpha", json!(alpha));
    report.result("K", json!(map.params().k));
    report.result("K_source", json!(if given { "given" } else { "computed" }));
    report.result("holder_constant", json!(map.holder_constant(alpha)));
    report.check_result("map is (K, alpha)-Hölder", &map.verify_holder());
    Ok(())
}

fn verify_one<V: OnePointExtend>(report: &mut Report, pm: &PartialMap<V>, i: usize, x: &Point, v: &V) {
    report.check_result(format!("extension {i} is (K, alpha)-Hölder on M ∪ {{x}}"), &pm.verify_extension(x, v));
}

fn almost<V: OnePointExtend + serde::Serialize>(
    report: &mut Report,
    pm: &PartialMap<V>,
    i: usize,
    x: &Point,
    eps: f64,
) -> Result<Value, InputError> {
    let a = almost_extend_net(pm, x, eps)?;
    report.check(
        format!("extension {i} has factor <= 1 + eps"),
        a.factor <= (1.0 + eps) * (1.0 + hext_core::numeric::HOLDER_RTOL),
        json!({ "factor": a.factor }),
    );
    let relaxed = pm.with_params(hext_core::HolderParams::new(pm.params().k * (1.0 + eps), pm.params().alpha)?);
    verify_one(report, &relaxed, i, x, &a.value);
    Ok(to_value(&a))
}

/// Sequence algorithm for `extend`; `None` picks c0 when every tail is zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeqTarget {
    C0,
    C,
}

impl std::str::FromStr for SeqTarget {
    type Err = InputError;

    fn from_str(s: &str) -> Result<Self, InputError> {
        match s {
            "c0" => Ok(SeqTarget::C0),
            "c" => Ok(SeqTarget::C),
            _ => Err(InputError(format!("unknown target {s:?} (use c0 or c)"))),
        }
    }
}

pub fn extend(
    path: &Path,
    o: &Overrides,
    policy: Policy,
    eps: Option<f64>,
    target: Option<SeqTarget>,
    report: &mut Report,
) -> Result<(), InputError> {
    let file = load(path, report)?;
    let map = file.map(o)?;
    require_holder(&map)?;
    if target.is_some() && !matches!(map, Map::Sequence(_)) {
        return Err(InputError("--target applies only to sequence-valued problems".into()));
    }
    let c0_data = match &map {
        Map::Sequence(pm) => pm.values().iter().all(EcSeq::is_c0),
        _ => false,
    };
    if target == Some(SeqTarget::C0) && !c0_data {
        return Err(InputError("--target c0 needs every value to have tail 0".into()));
    }
    let use_c0 = target.map_or(c0_data, |t| t == SeqTarget::C0);
    let xs = targets(&file, o)?;
    report.result("kind", json!(map.kind()));
    report.result("params", params_json(&map));
    let mut out = Vec::new();
    for (i, x) in xs.iter().enumerate() {
        let entry = match (&map, eps) {
            (Map::Scalar(pm), Some(e)) => json!({ "at": x, "almost": almost(report, pm, i, x, e)? }),
            (Map::Vector(pm) | Map::Continuous(pm, _), Some(e)) => {
                json!({ "at": x, "almost": almost(report, pm, i, x, e)? })
            }
            (Map::Sequence(pm), Some(e)) => json!({ "at": x, "almost": almost(report, pm, i, x, e)? }),
            (Map::Scalar(pm), None) => {
                let iv = feasibility_interval(pm, x)?;
                let v = scalar_extend(pm, x, policy)?;
                verify_one(report, pm, i, x, &v);
                json!({ "at": x, "interval": iv, "policy": policy, "value": v })
            }
            (Map::Vector(pm), None) => {
                let cert = vector_certificate(pm, x)?;
                let v = linf_vector_extend(pm, x, policy)?;
                verify_one(report, pm, i, x, &v);
                json!({ "at": x, "certificate": cert, "policy": policy, "value": v })
            }
            (Map::Sequence(pm), None) => extend_sequence(report, pm, i, x, policy, use_c0)?,
            (Map::Continuous(pm, _), None) => {
                let v = infconv_ck(pm, x)?;
                verify_one(report, pm, i, x, &v);
                json!({ "at": x, "algorithm": "inf-convolution", "value": v })
            }
        };
        out.push(entry);
    }
    report.result("extensions", Value::Array(out));
    Ok(())
}

fn extend_sequence(
    report: &mut Report,
    pm: &PartialMap<EcSeq>,
    i: usize,
    x: &Point,
    policy: Policy,
    use_c0: bool,
) -> Result<Value, InputError> {
    if use_c0 {
        match c0_extend(pm, x) {
            Ok((v, trace)) => {
                report.check(format!("extension {i} lies in c0"), v.is_c0(), Value::Null);
                let four_case = four_case_bound(pm, x, &v);
                report.check(
                    format!("extension {i} satisfies |f(y)(n) - u(n)| <= K||y - x||^alpha"),
                    four_case.is_ok(),
                    four_case.err().map_or(Value::Null, Value::String),
                );
                verify_one(report, pm, i, x, &v);
                Ok(json!({ "at": x, "algorithm": "c0", "value": v, "trace": trace }))
            }
            Err(e) if e.is_input_error() => Err(e.into()),
            Err(e) => {
                report.check(format!("extension {i} computed"), false, json!(e.to_string()));
                Ok(json!({ "at": x, "algorithm": "c0", "error": e.to_string() }))
            }
        }
    } else {
        let feas = c_feasible(pm, x)?;
        match c_extend(pm, x, policy) {
            Ok((v, trace)) => {
                verify_one(report, pm, i, x, &v);
                Ok(
                    json!({ "at": x, "algorithm": "c", "feasibility": feas, "policy": policy, "value": v, "trace": trace }),
                )
            }
            Err(e) if e.is_input_error() => Err(e.into()),
            Err(e) => {
                report.check(format!("extension {i} computed"), false, json!(e.to_string()));
                Ok(json!({ "at": x, "algorithm": "c", "feasibility": feas, "error": e.to_string() }))
            }
        }
    }
}

/// Coordinatewise bound over every prefix position and the tail.
fn four_case_bound(pm: &PartialMap<EcSeq>, x: &Point, u: &EcSeq) -> Result<(), String> {
    let radii = pm.radii(x).map_err(|e| e.to_string())?;
    let len = pm.values().iter().map(EcSeq::prefix_len).chain([u.prefix_len()]).max().unwrap_or(0);
    for (j, (f, r)) in pm.values().iter().zip(&radii).enumerate() {
        for n in 0..=len {
            let gap = (f.at(n) - u.at(n)).abs();
            if !hext_core::numeric::le_rel(gap, *r, hext_core::numeric::HOLDER_RTOL) {
                return Err(format!("y = {j}, n = {n}: {gap} > {r}"));
            }
        }
    }
    Ok(())
}

pub fn feasible(path: &Path, o: &Overrides, delta: Option<f64>, report: &mut Report) -> Result<(), InputError> {
    let file = load(path, report)?;
    let map = file.map(o)?;
    require_holder(&map)?;
    let xs = targets(&file, o)?;
    report.result("kind", json!(map.kind()));
    report.result("params", params_json(&map));
    let mut out = Vec::new();
    for (i, x) in xs.iter().enumerate() {
        let entry = match &map {
            Map::Scalar(pm) => {
                let iv = feasibility_interval(pm, x)?;
                report.check(format!("interval {i} is nonempty"), !iv.empty, Value::Null);
                json!({ "at": x, "interval": iv })
            }
            Map::Vector(pm) => {
                let cert = vector_certificate(pm, x)?;
                report.check(
                    format!("certificate {i} is feasible"),
                    cert.is_feasible(),
                    json!({ "margin": cert.margin }),
                );
                json!({ "at": x, "certificate": cert })
            }
            Map::Sequence(pm) => {
                let feas = c_feasible(pm, x)?;
                let cert = forced_intervals(pm, x)?;
                report.check(format!("tail condition {i} holds"), feas.feasible, json!({ "margin": feas.margin }));
                report.check(
                    format!("forced intervals {i} are nonempty"),
                    cert.is_feasible(),
                    json!({ "margin": cert.margin }),
                );
                json!({ "at": x, "c_feasibility": feas, "forced_intervals": cert })
            }
            Map::Continuous(pm, k) => {
                let d = delta.or(k.min_positive_distance()).unwrap_or(1.0);
                let r = ck_feasible(pm, k, x, d)?;
                report.check(
                    format!("mixed excess {i} at delta = {d} is <= 0"),
                    r.feasible,
                    json!({ "worst_excess": r.worst_excess }),
                );
                json!({ "at": x, "delta": d, "result": r })
            }
        };
        out.push(entry);
    }
    report.result("feasibility", Value::Array(out));
    Ok(())
}

pub fn partition(path: &Path, o: &Overrides, eps: f64, report: &mut Report) -> Result<(), InputError> {
    let file = load(path, report)?;
    if let Some(space) = o.space.as_ref().or(file.space.as_ref()) {
        if !matches!(space.kind(), SpaceKind::LInf { .. }) {
            return Err(InputError("partition works in l_inf^n; give a linf space".into()));
        }
    }
    let points: Vec<Point> = file.points.iter().cloned().map(Point).collect();
    let trace = linf_partition(&points, eps)?;
    report.check_result("every cell satisfies both inequalities", &verify_partition(&points, &trace));
    report.check(
        "every point is assigned",
        trace.cells.iter().map(|c| c.members.len()).sum::<usize>() >= points.len(),
        Value::Null,
    );
    report.result("epsilon", json!(eps));
    report.result("cells", json!(trace.cells.len()));
    report.result("trace", to_value(&trace));
    Ok(())
}

/// Lattice sample of nonzero points in `[-2, 2]^dim` used to spot-check the
/// cone inequality.
fn lattice(dim: usize) -> Vec<Vec<f64>> {
    let steps: usize = match dim {
        1 => 17,
        2 => 9,
        3 => 5,
        _ => 3,
    };
    let total = steps.pow(dim as u32);
    (0..total)
        .map(|mut idx| {
            (0..dim)
                .map(|_| {
                    let l = idx % steps;
                    idx /= steps;
                    -2.0 + 4.0 * l as f64 / (steps - 1) as f64
                })
                .collect::<Vec<f64>>()
        })
        .filter(|p| p.iter().any(|&c| c != 0.0))
        .collect()
}

fn cone_pairs_hold(cover: &ConeCover) -> Result<usize, String> {
    let sample = lattice(cover.space().dim());
    let assigned: Vec<Option<usize>> =
        sample.iter().map(|p| cover.assign(p).map_err(|e| e.to_string())).collect::<Result<_, _>>()?;
    let mut pairs = 0;
    for i in 0..sample.len() {
        let Some(ci) = assigned[i] else {
            return Err(format!("sample point {:?} is in no cone", sample[i]));
        };
        for j in i + 1..sample.len() {
            if assigned[j] == Some(ci) {
                pairs += 1;
                if !cover.cone_inequality_holds(&sample[i], &sample[j]).map_err(|e| e.to_string())? {
                    return Err(format!("cone {ci}: {:?}, {:?}", sample[i], sample[j]));
                }
            }
        }
    }
    Ok(pairs)
}

pub fn cover(space: &NormedSpace, delta: f64, resolution: usize, report: &mut Report) -> Result<(), InputError> {
    let cover = cone_cover(space, delta, resolution)?;
    report.check(
        "every probe lies within delta/2 of the net",
        cover.worst_probe_gap <= 0.5 * delta * (1.0 + 1e-12),
        json!({ "worst_probe_gap": cover.worst_probe_gap, "probes": cover.probes_checked }),
    );
    match cone_pairs_hold(&cover) {
        Ok(pairs) => report.check("cone inequality on lattice pairs", true, json!({ "pairs": pairs })),
        Err(e) => report.check("cone inequality on lattice pairs", false, json!(e)),
    }
    report.result("space", to_value(space));
    report.result("directions", json!(cover.directions.len()));
    report.result("cover", to_value(&cover));
    Ok(())
}

fn continuous(map: Map) -> Result<(PartialMap<FiniteFunction>, FiniteMetricSpace), InputError> {
    match map {
        Map::Continuous(pm, k) => Ok((pm, k)),
        other => Err(InputError(format!(
            "this command needs array values with a \"metric\" block, got {} values",
            other.kind()
        ))),
    }
}

fn modulus_checks(report: &mut Report, t: &ModulusTable) {
    let nondecreasing = |v: &[f64]| v.windows(2).all(|w| w[0] <= w[1]);
    report.check("xi is nondecreasing", nondecreasing(&t.xi), Value::Null);
    report.check("psi(0) = 0 and psi >= 0", t.psi[0] == 0.0 && t.psi.iter().all(|&p| p >= 0.0), Value::Null);
    report.check("phi(0) = 0", t.phi(0.0) == 0.0, Value::Null);
    report.check("phi is nondecreasing", nondecreasing(&t.phi_values), Value::Null);
    let below: Vec<f64> = t.lambda_grid.iter().zip(&t.psi).filter(|&(&l, &p)| t.phi(l) < p).map(|(&l, _)| l).collect();
    report.check("phi >= psi on the grid", below.is_empty(), if below.is_empty() { Value::Null } else { json!(below) });
}

pub fn ck_extend_cmd(path: &Path, o: &Overrides, modulus: &str, report: &mut Report) -> Result<(), InputError> {
    let file = load(path, report)?;
    let (pm, k) = continuous(file.map(o)?)?;
    pm.verify_holder().map_err(|e| InputError(format!("input map: {e}")))?;
    let xs = targets(&file, o)?;
    let mut out = Vec::new();
    for (i, x) in xs.iter().enumerate() {
        let table = if modulus == "auto" {
            xi_modulus(&pm, &k, x)?
        } else {
            let bytes = read(Path::new(modulus))?;
            report.digest_input(&bytes);
            serde_json::from_slice(&bytes).map_err(|e| InputError(format!("malformed modulus file: {e}")))?
        };
        modulus_checks(report, &table);
        match ck_extend(&pm, &k, x, &table) {
            Ok(g) => {
                let radii = pm.radii(x)?;
                let tol = hext_core::numeric::HOLDER_RTOL;
                let (mut ck1, mut ck2) = (true, true);
                for (f, r) in pm.values().iter().zip(&radii) {
                    for (a, b) in f.values().iter().zip(g.values()) {
                        ck1 &= hext_core::numeric::le_rel(a - b, *r, tol);
                        ck2 &= hext_core::numeric::le_rel(b - a, *r, tol);
                    }
                }
                report.check(format!("extension {i}: f(y)(t) - g(t) <= K d(x,y)^alpha"), ck1, Value::Null);
                report.check(format!("extension {i}: g(t) - f(y)(t) <= K d(x,y)^alpha"), ck2, Value::Null);
                verify_one(report, &pm, i, x, &g);
                out.push(json!({ "at": x, "modulus": table, "value": g }));
            }
            Err(e @ Error::ModulusViolated { .. }) => {
                report.check(format!("extension {i}: modulus dominates the mixed excess"), false, json!(e.to_string()));
                out.push(json!({ "at": x, "modulus": table, "error": e.to_string() }));
            }
            Err(e) => return Err(e.into()),
        }
    }
    report.result("extensions", Value::Array(out));
    Ok(())
}

pub fn ck_check(path: &Path, o: &Overrides, delta: Option<f64>, report: &mut Report) -> Result<(), InputError> {
    let file = load(path, report)?;
    let (pm, k) = continuous(file.map(o)?)?;
    let xs = targets(&file, o)?;
    let d = delta.or(k.min_positive_distance()).unwrap_or(1.0);
    let mut out = Vec::new();
    for (i, x) in xs.iter().enumerate() {
        let r = ck_feasible(&pm, &k, x, d)?;
        report.check(
            format!("point {i}: |f(y)(t) - f(z)(s)| <= K d(y,x)^alpha + K d(z,x)^alpha when rho(t,s) < delta"),
            r.feasible,
            json!({ "worst_excess": r.worst_excess, "witness": r.witness }),
        );
        out.push(json!({ "at": x, "result": r }));
    }
    report.result("delta", json!(d));
    report.result("checks", Value::Array(out));
    Ok(())
}

pub fn reduce(path: &Path, o: &Overrides, witnesses: &Path, report: &mut Report) -> Result<(), InputError> {
    let file = load(path, report)?;
    let (pm, k) = continuous(file.map(o)?)?;
    let bytes = read(witnesses)?;
    report.digest_input(&bytes);
    let w: Vec<(usize, usize)> =
        serde_json::from_slice(&bytes).map_err(|e| InputError(format!("malformed witness file: {e}")))?;
    let h = reduce_ck_to_c(&pm, &k, &w)?;
    let alpha = pm.params().alpha;
    let mut worst: Option<(usize, usize, f64, f64)> = None;
    for i in 0..pm.len() {
        for j in i + 1..pm.len() {
            let dh = hext_core::sup_dist(&h.values()[i], &h.values()[j]);
            let df = hext_core::Target::sup_distance(&pm.values()[i], &pm.values()[j]);
            if dh > df && worst.is_none() {
                worst = Some((i, j, dh, df));
            }
        }
    }
    report.check(
        "||h(y) - h(z)|| <= ||f(y) - f(z)|| for all pairs",
        worst.is_none(),
        worst.map_or(Value::Null, |(i, j, dh, df)| json!({ "y": i, "z": j, "h": dh, "f": df })),
    );
    let spacing: Vec<Value> = w
        .iter()
        .enumerate()
        .map(|(j, &(t, s))| json!({ "j": j + 1, "rho": k.rho(t, s), "below_1_over_j": k.rho(t, s) < 1.0 / (j + 1) as f64 }))
        .collect();
    report.result("witness_spacing", Value::Array(spacing));
    report.result("holder_constant_f", json!(pm.holder_constant(alpha)));
    report.result("holder_constant_h", json!(h.holder_constant(alpha)));
    report.result("values", to_value(&h.values()));
    Ok(())
}

pub fn counterexample(k: f64, n1: u32, n: u32, alpha: f64, report: &mut Report) -> Result<(), InputError> {
    if alpha != 1.0 {
        return Err(InputError("the counterexample is a Lipschitz (alpha = 1) construction".into()));
    }
    let inst = match gen_counterexample(k, n1, n) {
        Ok(inst) => inst,
        Err(e) if !e.is_input_error() => {
            report.check("construction", false, Value::String(e.to_string()));
            return Ok(());
        }
        Err(e) => return Err(e.into()),
    };
    let cert = match verify_counterexample(&inst) {
        Ok(cert) => cert,
        Err(e) => {
            report.check("obstruction", false, Value::String(e.to_string()));
            return Ok(());
        }
    };
    for c in inst.checks.iter().chain(&cert.checks) {
        report.check(c.name.clone(), c.pass, json!({ "lhs": c.lhs, "rhs": c.rhs }));
    }
    report.result("K", json!(inst.kparam));
    report.result("n0", json!(inst.n0));
    report.result("n1", json!(inst.n1));
    report.result("N", json!(inst.n));
    report.result("lipschitz_constant", json!(inst.pm.holder_constant(1.0)));
    report.result("points", to_value(&inst.pm.points()));
    report.result("values", to_value(&inst.pm.values()));
    report.result("intervals", to_value(&cert.intervals));
    report.result("tail_interval", to_value(&cert.tail));
    report.result("odd_lo_min", json!(cert.odd_lo_min));
    report.result("even_hi_max", json!(cert.even_hi_max));
    report.result("minimal_prefix_length", json!(cert.minimal_prefix_length));
    Ok(())
}
