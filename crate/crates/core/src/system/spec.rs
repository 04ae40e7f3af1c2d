//! JSON system specs (`"schema": "chainscope-v1"`).
//!
//! ```json
//! {"schema": "chainscope-v1", "kind": "finite", "points": ["a", "b"],
//!  "metric": [["0", "1"], ["1", "0"]], "map": ["b", "a"]}
//! {"schema": "chainscope-v1", "kind": "sft", "adjacency": [[1, 1], [1, 0]]}
//! {"schema": "chainscope-v1", "kind": "grid", "family": {"type": "rotation", "alpha": "1/4"},
//!  "cell_count": 4, "geometry": "circle"}
//! ```
//! `metric` may also be the string `"discrete"`; map entries are labels or indices.

use std::path::Path;

use serde_json::{json, Map, Value};

use super::{discretize, FiniteSystem, Geometry, GridMapSpec, MapFamily, RealParam, SftGraph};
use crate::error::{Error, Result};
use crate::numeric::{format_rational, parse_rational, Rational};

pub const SCHEMA_VERSION: &str = "chainscope-v1";

#[derive(Debug, Clone, PartialEq)]
pub enum SystemModel {
    Finite(FiniteSystem),
    Sft(SftGraph),
    Grid { spec: GridMapSpec, system: FiniteSystem },
}

impl SystemModel {
    /// The finite system to analyze, if this is not a shift.
    pub fn finite(&self) -> Option<&FiniteSystem> {
        match self {
            SystemModel::Finite(s) | SystemModel::Grid { system: s, .. } => Some(s),
            SystemModel::Sft(_) => None,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            SystemModel::Finite(_) => "finite",
            SystemModel::Sft(_) => "sft",
            SystemModel::Grid { .. } => "grid",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    pub name: String,
    pub model: SystemModel,
}

fn spec_err(msg: impl Into<String>) -> Error {
    Error::Spec(msg.into())
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| spec_err(format!("missing field {key:?}")))
}

fn rational_value(v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) => parse_rational(&n.to_string()),
        other => Err(spec_err(format!("expected a rational, got {other}"))),
    }
}

fn real_param(v: &Value) -> Result<RealParam> {
    match v {
        Value::String(s) => RealParam::parse(s),
        Value::Number(n) => match parse_rational(&n.to_string()) {
            Ok(r) => Ok(RealParam::Exact(r)),
            Err(_) => Ok(RealParam::Float(n.as_f64().unwrap_or(f64::NAN))),
        },
        other => Err(spec_err(format!("expected a real parameter, got {other}"))),
    }
}

fn real_param_json(p: &RealParam) -> Value {
    match p {
        RealParam::Float(x) => json!(x),
        other => json!(other.to_string()),
    }
}

impl SystemSpec {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), message: e.to_string() })?;
        Self::from_json(&v)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| spec_err("spec must be a JSON object"))?;
        match obj.get("schema").and_then(Value::as_str) {
            Some(SCHEMA_VERSION) => {}
            Some(other) => return Err(spec_err(format!("unsupported schema {other:?}"))),
            None => return Err(spec_err(format!("missing \"schema\": \"{SCHEMA_VERSION}\""))),
        }
        let name = obj.get("name").and_then(Value::as_str).unwrap_or("unnamed").to_string();
        let kind = field(obj, "kind")?.as_str().ok_or_else(|| spec_err("kind must be a string"))?;
        let model = match kind {
            "finite" => SystemModel::Finite(parse_finite(obj)?),
            "sft" => SystemModel::Sft(parse_sft(obj)?),
            "grid" => {
                let spec = parse_grid(obj)?;
                let system = discretize(&spec)?;
                SystemModel::Grid { spec, system }
            }
            other => return Err(spec_err(format!("unknown kind {other:?}"))),
        };
        Ok(SystemSpec { name, model })
    }

    pub fn to_json(&self) -> Value {
        let mut out = Map::new();
        out.insert("schema".into(), json!(SCHEMA_VERSION));
        out.insert("name".into(), json!(self.name));
        out.insert("kind".into(), json!(self.model.kind()));
        match &self.model {
            SystemModel::Finite(s) => {
                out.insert("points".into(), json!(s.labels()));
                let metric: Vec<Vec<String>> =
                    s.metric_table().iter().map(|row| row.iter().map(format_rational).collect()).collect();
                out.insert("metric".into(), json!(metric));
                let map: Vec<&str> = s.map_table().iter().map(|&v| s.label(v)).collect();
                out.insert("map".into(), json!(map));
            }
            SystemModel::Sft(g) => {
                let adj: Vec<Vec<u8>> = g.adjacency().iter().map(|r| r.iter().map(|&b| b as u8).collect()).collect();
                out.insert("adjacency".into(), json!(adj));
            }
            SystemModel::Grid { spec, .. } => {
                let family = match &spec.family {
                    MapFamily::Tent { slope } => json!({"type": "tent", "slope": real_param_json(slope)}),
                    MapFamily::Rotation { alpha } => json!({"type": "rotation", "alpha": real_param_json(alpha)}),
                    MapFamily::PiecewiseLinear { breakpoints } => {
                        let bp: Vec<[String; 2]> =
                            breakpoints.iter().map(|(x, y)| [format_rational(x), format_rational(y)]).collect();
                        json!({"type": "piecewise-linear", "breakpoints": bp})
                    }
                };
                out.insert("family".into(), family);
                out.insert("cell_count".into(), json!(spec.cell_count));
                out.insert("geometry".into(), serde_json::to_value(spec.geometry).expect("geometry serializes"));
            }
        }
        Value::Object(out)
    }
}

fn parse_finite(obj: &Map<String, Value>) -> Result<FiniteSystem> {
    let points = field(obj, "points")?.as_array().ok_or_else(|| spec_err("points must be an array"))?;
    let labels: Vec<String> = points
        .iter()
        .map(|p| match p {
            Value::String(s) => Ok(s.clone()),
            Value::Number(n) => Ok(n.to_string()),
            other => Err(spec_err(format!("bad point label {other}"))),
        })
        .collect::<Result<_>>()?;
    let n = labels.len();
    let metric: Vec<Vec<Rational>> = match field(obj, "metric")? {
        Value::String(s) if s == "discrete" => (0..n)
            .map(|i| (0..n).map(|j| Rational::from_integer((i != j) as i64)).collect())
            .collect(),
        Value::Array(rows) => rows
            .iter()
            .map(|row| {
                row.as_array()
                    .ok_or_else(|| spec_err("metric rows must be arrays"))?
                    .iter()
                    .map(rational_value)
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?,
        _ => return Err(spec_err("metric must be a table or \"discrete\"")),
    };
    let map_v = field(obj, "map")?.as_array().ok_or_else(|| spec_err("map must be an array"))?;
    let map: Vec<usize> = map_v
        .iter()
        .enumerate()
        .map(|(i, v)| match v {
            Value::String(s) => labels
                .iter()
                .position(|l| l == s)
                .ok_or_else(|| Error::PartialMap(format!("image {s:?} of point {i} is not a point"))),
            Value::Number(k) => k
                .as_u64()
                .map(|k| k as usize)
                .ok_or_else(|| Error::PartialMap(format!("image {k} of point {i} is not an index"))),
            other => Err(Error::PartialMap(format!("image {other} of point {i} is not a point"))),
        })
        .collect::<Result<_>>()?;
    FiniteSystem::new(labels, metric, map)
}

fn parse_sft(obj: &Map<String, Value>) -> Result<SftGraph> {
    let rows = field(obj, "adjacency")?.as_array().ok_or_else(|| spec_err("adjacency must be an array"))?;
    let m: Vec<Vec<u8>> = rows
        .iter()
        .map(|r| {
            r.as_array()
                .ok_or_else(|| spec_err("adjacency rows must be arrays"))?
                .iter()
                .map(|b| b.as_u64().filter(|&b| b <= 1).map(|b| b as u8).ok_or_else(|| spec_err("adjacency entries must be 0 or 1")))
                .collect::<Result<Vec<u8>>>()
        })
        .collect::<Result<_>>()?;
    SftGraph::from_matrix(&m)
}

fn parse_grid(obj: &Map<String, Value>) -> Result<GridMapSpec> {
    let fam = field(obj, "family")?.as_object().ok_or_else(|| spec_err("family must be an object"))?;
    let ty = field(fam, "type")?.as_str().ok_or_else(|| spec_err("family type must be a string"))?;
    let family = match ty {
        "tent" => MapFamily::Tent { slope: real_param(field(fam, "slope")?)? },
        "rotation" => MapFamily::Rotation { alpha: real_param(field(fam, "alpha")?)? },
        "piecewise-linear" => {
            let bp = field(fam, "breakpoints")?.as_array().ok_or_else(|| spec_err("breakpoints must be an array"))?;
            let breakpoints = bp
                .iter()
                .map(|p| match p.as_array().map(Vec::as_slice) {
                    Some([x, y]) => Ok((rational_value(x)?, rational_value(y)?)),
                    _ => Err(spec_err("each breakpoint must be a pair [x, y]")),
                })
                .collect::<Result<_>>()?;
            MapFamily::PiecewiseLinear { breakpoints }
        }
        other => return Err(spec_err(format!("unknown map family {other:?}"))),
    };
    let cell_count = field(obj, "cell_count")?.as_u64().ok_or_else(|| spec_err("cell_count must be a positive integer"))? as usize;
    let geometry = match obj.get("geometry") {
        None => match family {
            MapFamily::Rotation { .. } => Geometry::Circle,
            _ => Geometry::Interval,
        },
        Some(g) => serde_json::from_value(g.clone()).map_err(|_| spec_err("geometry must be \"interval\" or \"circle\""))?,
    };
    Ok(GridMapSpec { family, cell_count, geometry })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::MetricAxiom;

    #[test]
    fn loads_and_round_trips_finite() {
        let text = r#"{"schema":"chainscope-v1","name":"ns","kind":"finite","points":["n","s","t"],
            "metric":"discrete","map":["n","s","s"]}"#;
        let spec = SystemSpec::from_json_str(text).unwrap();
        let again = SystemSpec::from_json(&spec.to_json()).unwrap();
        assert_eq!(spec, again);
    }

    #[test]
    fn triangle_violation_from_json() {
        let text = r#"{"schema":"chainscope-v1","kind":"finite","points":["a","b","c"],
            "metric":[["0","5","1"],["5","0","1"],["1","1","0"]],"map":[1,2,0]}"#;
        match SystemSpec::from_json_str(text) {
            Err(Error::MetricViolation { axiom: MetricAxiom::Triangle, points }) => assert_eq!(points, ["a", "c", "b"]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn grid_and_sft_round_trip() {
        for text in [
            r#"{"schema":"chainscope-v1","kind":"grid","family":{"type":"rotation","alpha":"1/4"},"cell_count":4}"#,
            r#"{"schema":"chainscope-v1","kind":"grid","family":{"type":"tent","slope":2},"cell_count":8}"#,
            r#"{"schema":"chainscope-v1","kind":"sft","adjacency":[[1,1],[1,0]]}"#,
        ] {
            let spec = SystemSpec::from_json_str(text).unwrap();
            assert_eq!(SystemSpec::from_json(&spec.to_json()).unwrap(), spec);
        }
    }

    #[test]
    fn rejects_bad_schema_and_syntax() {
        assert!(matches!(SystemSpec::from_json_str(r#"{"kind":"sft"}"#), Err(Error::Spec(_))));
        assert!(matches!(SystemSpec::from_json_str("{\n\"schema\": }"), Err(Error::Parse { line: 2, .. })));
    }
}
