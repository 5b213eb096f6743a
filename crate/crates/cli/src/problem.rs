//! Problem files: a space, Hölder parameters, a finite domain with values and
//! optional extension points.

use hext_core::{EcSeq, Error, FiniteFunction, FiniteMetricSpace, HolderParams, NormedSpace, PartialMap, Point};
use serde::Deserialize;
use serde_json::Value;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub space: Option<NormedSpace>,
    pub alpha: Option<f64>,
    #[serde(rename = "K")]
    pub k: Option<f64>,
    #[serde(default)]
    pub points: Vec<Vec<f64>>,
    #[serde(default)]
    pub values: Vec<Value>,
    pub metric: Option<FiniteMetricSpace>,
    #[serde(default)]
    pub extend_at: Vec<Vec<f64>>,
}

/// The domain map, by target kind.
#[derive(Debug, Clone)]
pub enum Map {
    Scalar(PartialMap<f64>),
    Vector(PartialMap<FiniteFunction>),
    Sequence(PartialMap<EcSeq>),
    Continuous(PartialMap<FiniteFunction>, FiniteMetricSpace),
}

impl Map {
    pub fn kind(&self) -> &'static str {
        match self {
            Map::Scalar(_) => "scalar",
            Map::Vector(_) => "linf",
            Map::Sequence(_) => "c",
            Map::Continuous(..) => "C(K)",
        }
    }

    pub fn params(&self) -> HolderParams {
        match self {
            Map::Scalar(pm) => pm.params(),
            Map::Vector(pm) | Map::Continuous(pm, _) => pm.params(),
            Map::Sequence(pm) => pm.params(),
        }
    }

    pub fn holder_constant(&self, alpha: f64) -> f64 {
        match self {
            Map::Scalar(pm) => pm.holder_constant(alpha),
            Map::Vector(pm) | Map::Continuous(pm, _) => pm.holder_constant(alpha),
            Map::Sequence(pm) => pm.holder_constant(alpha),
        }
    }

    pub fn verify_holder(&self) -> hext_core::Result<()> {
        match self {
            Map::Scalar(pm) => pm.verify_holder(),
            Map::Vector(pm) | Map::Continuous(pm, _) => pm.verify_holder(),
            Map::Sequence(pm) => pm.verify_holder(),
        }
    }
}

/// Flag overrides applied on top of the file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub space: Option<NormedSpace>,
    pub alpha: Option<f64>,
    pub k: Option<f64>,
    pub at: Option<Vec<f64>>,
}

pub fn parse(text: &str) -> Result<ProblemFile, String> {
    serde_json::from_str(text).map_err(|e| format!("malformed problem file: {e}"))
}

/// Parses a space flag: a JSON descriptor, or `linf:D`, `lp:P:D`, `l2l2`.
pub fn parse_space(s: &str) -> Result<NormedSpace, String> {
    if s.trim_start().starts_with('{') {
        return serde_json::from_str(s).map_err(|e| format!("bad --space descriptor: {e}"));
    }
    let parts: Vec<&str> = s.split(':').collect();
    let num = |t: &str| t.parse::<f64>().map_err(|_| format!("bad number {t:?} in --space"));
    let dim = |t: &str| t.parse::<usize>().map_err(|_| format!("bad dimension {t:?} in --space"));
    let space = match parts.as_slice() {
        ["linf", d] => NormedSpace::linf(dim(d)?),
        ["lp", p, d] => NormedSpace::lp(num(p)?, dim(d)?),
        ["l2l2"] => Ok(NormedSpace::l2_l2_sum()),
        _ => return Err(format!("unknown --space {s:?} (use JSON, linf:D, lp:P:D or l2l2)")),
    };
    space.map_err(|e| e.to_string())
}

pub fn parse_point(s: &str) -> Result<Vec<f64>, String> {
    serde_json::from_str(s).map_err(|e| format!("bad --at point (expected a JSON array): {e}"))
}

impl ProblemFile {
    pub fn space(&self, o: &Overrides) -> Result<NormedSpace, Error> {
        if let Some(s) = &o.space {
            return Ok(s.clone());
        }
        if let Some(s) = &self.space {
            return Ok(s.clone());
        }
        let dim = self.points.first().map_or(0, Vec::len);
        NormedSpace::linf(dim)
    }

    pub fn alpha(&self, o: &Overrides) -> f64 {
        o.alpha.or(self.alpha).unwrap_or(1.0)
    }

    pub fn targets(&self, o: &Overrides) -> Vec<Point> {
        match &o.at {
            Some(p) => vec![Point(p.clone())],
            None => self.extend_at.iter().cloned().map(Point).collect(),
        }
    }

    fn points(&self) -> Vec<Point> {
        self.points.iter().cloned().map(Point).collect()
    }

    /// Builds the domain map. Without an explicit `K` the smallest constant
    /// for `alpha` is used.
    pub fn map(&self, o: &Overrides) -> Result<Map, Error> {
        let space = self.space(o)?;
        let alpha = self.alpha(o);
        let k = o.k.or(self.k);
        if self.values.is_empty() {
            return Err(Error::InvalidInput("problem has no values".into()));
        }
        let shape = |v: &Value| match v {
            Value::Number(_) => 0,
            Value::Array(_) => 1,
            Value::Object(_) => 2,
            _ => 3,
        };
        let kind = shape(&self.values[0]);
        if self.values.iter().any(|v| shape(v) != kind) || kind == 3 {
            return Err(Error::InvalidInput(
                "values must all be numbers, all arrays or all {prefix, tail} objects".into(),
            ));
        }
        let decode = |e: serde_json::Error| Error::InvalidInput(format!("bad value: {e}"));
        fn build<V: hext_core::TargetValue>(
            space: NormedSpace,
            points: Vec<Point>,
            values: Vec<V>,
            alpha: f64,
            k: Option<f64>,
        ) -> Result<PartialMap<V>, Error> {
            match k {
                Some(k) => PartialMap::new(space, points, values, HolderParams::new(k, alpha)?),
                None => PartialMap::with_optimal_constant(space, points, values, alpha),
            }
        }
        let points = self.points();
        Ok(match kind {
            0 => {
                let values = self
                    .values
                    .iter()
                    .map(|v| serde_json::from_value(v.clone()).map_err(decode))
                    .collect::<Result<Vec<f64>, _>>()?;
                Map::Scalar(build(space, points, values, alpha, k)?)
            }
            1 => {
                let values = self
                    .values
                    .iter()
                    .map(|v| serde_json::from_value(v.clone()).map(FiniteFunction).map_err(decode))
                    .collect::<Result<Vec<_>, _>>()?;
                let pm = build(space, points, values, alpha, k)?;
                match &self.metric {
                    Some(m) => {
                        for v in pm.values() {
                            m.check_function(v)?;
                        }
                        Map::Continuous(pm, m.clone())
                    }
                    None => Map::Vector(pm),
                }
            }
            _ => {
                let values = self
                    .values
                    .iter()
                    .map(|v| serde_json::from_value(v.clone()).map_err(decode))
                    .collect::<Result<Vec<EcSeq>, _>>()?;
                Map::Sequence(build(space, points, values, alpha, k)?)
            }
        })
    }
}
