//! JSON analysis configuration.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::kossowski::TraceOptions;
use crate::metric::{Domain, MetricField, SurfaceMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputKind {
    Map,
    Metric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapConfig {
    pub x: String,
    pub y: String,
    pub z: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<[String; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricConfig {
    #[serde(rename = "E")]
    pub e: String,
    #[serde(rename = "F")]
    pub f: String,
    #[serde(rename = "G")]
    pub g: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    pub u: [f64; 2],
    pub v: [f64; 2],
    #[serde(default)]
    pub periodic_u: bool,
    #[serde(default)]
    pub periodic_v: bool,
}

/// Euler characteristics declared for the Gauss-Bonnet checks.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Topology {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub euler: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub euler_plus: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub euler_minus: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Absolute tolerance on Gauss-Bonnet residuals.
    pub abs_tol: f64,
    /// Relative tolerance of the adaptive quadrature.
    pub quad_tol: f64,
    pub richardson_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            abs_tol: 1e-3,
            quad_tol: 1e-6,
            richardson_tol: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Options {
    /// Explicit seeds for curve tracing; empty means automatic seeding.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub seeds: Vec<[f64; 2]>,
    /// Seed grid for curve tracing.
    pub seed_grid: usize,
    /// Seed grid for cross-cap detection.
    pub crosscap_grid: usize,
    /// Maximum dyadic refinement depth of the quadrature.
    pub depth: usize,
    pub gauss_order: usize,
    /// Number of base tiles per axis.
    pub base_tiles: usize,
    pub richardson_h0: f64,
    pub richardson_levels: usize,
    /// Largest curve-tracing step as a fraction of the domain scale.
    pub max_step: f64,
}

impl Default for Options {
    fn default() -> Self {
        let t = TraceOptions::default();
        Options {
            seeds: Vec::new(),
            seed_grid: t.seed_grid,
            crosscap_grid: 64,
            depth: 8,
            gauss_order: 8,
            base_tiles: 8,
            richardson_h0: t.richardson_h0,
            richardson_levels: t.richardson_levels,
            max_step: t.max_step,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub input: InputKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<MapConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<MetricConfig>,
    pub domain: DomainConfig,
    #[serde(default = "yes")]
    pub oriented: bool,
    /// Defaults to whether `lambda` (or `nu`) is given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub co_oriented: Option<bool>,
    #[serde(default = "plus_one")]
    pub co_orientation_sign: f64,
    #[serde(default)]
    pub topology: Topology,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default = "default_jet_order")]
    pub jet_order: usize,
    #[serde(default)]
    pub options: Options,
}

fn yes() -> bool {
    true
}

fn plus_one() -> f64 {
    1.0
}

fn default_jet_order() -> usize {
    4
}

fn config_error(path: &str, message: impl Into<String>) -> Error {
    Error::Config {
        path: path.to_string(),
        message: message.into(),
    }
}

fn parse_field(path: &str, text: &str) -> Result<Expr> {
    Expr::parse(text).map_err(|e| config_error(path, e.to_string()))
}

impl AnalysisConfig {
    /// Parses and validates a JSON document; errors carry the offending
    /// field path.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: AnalysisConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            config_error(&path, e.inner().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let d = &self.domain;
        if !(d.u[0] < d.u[1]) || !(d.v[0] < d.v[1]) {
            return Err(config_error("domain", "empty parameter rectangle"));
        }
        if d.u.iter().chain(&d.v).any(|x| !x.is_finite()) {
            return Err(config_error("domain", "non-finite bound"));
        }
        if self.jet_order > crate::jet::MAX_ORDER {
            return Err(config_error("jet_order", format!("at most {}", crate::jet::MAX_ORDER)));
        }
        if self.jet_order < 2 {
            return Err(config_error("jet_order", "at least 2"));
        }
        let t = &self.tolerances;
        for (name, x) in [
            ("tolerances.abs_tol", t.abs_tol),
            ("tolerances.quad_tol", t.quad_tol),
            ("tolerances.richardson_tol", t.richardson_tol),
            ("options.richardson_h0", self.options.richardson_h0),
            ("options.max_step", self.options.max_step),
        ] {
            if !(x > 0.0 && x.is_finite()) {
                return Err(config_error(name, "must be positive"));
            }
        }
        if self.co_orientation_sign.abs() != 1.0 {
            return Err(config_error("co_orientation_sign", "must be 1 or -1"));
        }
        let o = &self.options;
        if o.gauss_order == 0 || o.gauss_order > 64 {
            return Err(config_error("options.gauss_order", "must be in 1..=64"));
        }
        if o.base_tiles == 0 {
            return Err(config_error("options.base_tiles", "must be positive"));
        }
        if o.richardson_levels < 2 {
            return Err(config_error("options.richardson_levels", "at least 2"));
        }
        match self.input {
            InputKind::Map if self.map.is_none() => Err(config_error("map", "missing for input \"map\"")),
            InputKind::Metric if self.metric.is_none() => {
                Err(config_error("metric", "missing for input \"metric\""))
            }
            _ => {
                self.build_metric()?;
                Ok(())
            }
        }
    }

    pub fn domain(&self) -> Domain {
        Domain {
            u: self.domain.u,
            v: self.domain.v,
            periodic_u: self.domain.periodic_u,
            periodic_v: self.domain.periodic_v,
        }
    }

    pub fn build_metric(&self) -> Result<MetricField> {
        let domain = self.domain();
        let mut m = match self.input {
            InputKind::Map => {
                let map = self
                    .map
                    .as_ref()
                    .ok_or_else(|| config_error("map", "missing"))?;
                let nu = match &map.nu {
                    Some(n) => Some([
                        parse_field("map.nu[0]", &n[0])?,
                        parse_field("map.nu[1]", &n[1])?,
                        parse_field("map.nu[2]", &n[2])?,
                    ]),
                    None => None,
                };
                MetricField::induced(
                    SurfaceMap {
                        f: [
                            parse_field("map.x", &map.x)?,
                            parse_field("map.y", &map.y)?,
                            parse_field("map.z", &map.z)?,
                        ],
                        nu,
                    },
                    domain,
                )
            }
            InputKind::Metric => {
                let mc = self
                    .metric
                    .as_ref()
                    .ok_or_else(|| config_error("metric", "missing"))?;
                MetricField::direct(
                    parse_field("metric.E", &mc.e)?,
                    parse_field("metric.F", &mc.f)?,
                    parse_field("metric.G", &mc.g)?,
                    mc.lambda
                        .as_deref()
                        .map(|l| parse_field("metric.lambda", l))
                        .transpose()?,
                    domain,
                )
            }
        };
        m.oriented = self.oriented;
        if let Some(c) = self.co_oriented {
            m.co_oriented = c && m.has_lambda();
        }
        m.co_orientation_sign = self.co_orientation_sign;
        Ok(m)
    }

    pub fn metric_arc(&self) -> Result<Arc<MetricField>> {
        Ok(Arc::new(self.build_metric()?))
    }

    pub fn trace_options(&self) -> TraceOptions {
        TraceOptions {
            jet_order: self.jet_order,
            max_step: self.options.max_step,
            richardson_h0: self.options.richardson_h0,
            richardson_levels: self.options.richardson_levels,
            richardson_tol: self.tolerances.richardson_tol,
            seed_grid: self.options.seed_grid,
            ..TraceOptions::default()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PLANE: &str = r#"{
        "input": "map",
        "map": {"x": "u", "y": "v", "z": "0"},
        "domain": {"u": [0, 1], "v": [0, 1]}
    }"#;

    #[test]
    fn minimal_config_uses_defaults() {
        let c = AnalysisConfig::from_json(PLANE).unwrap();
        assert_eq!(c.jet_order, 4);
        assert_eq!(c.options.depth, 8);
        let m = c.build_metric().unwrap();
        let j = m.jets(0.5, 0.5, 0).unwrap();
        assert_eq!((j.e.value(), j.f.value(), j.g.value()), (1.0, 0.0, 1.0));
    }

    #[test]
    fn errors_carry_field_paths() {
        let bad = PLANE.replace("\"z\": \"0\"", "\"z\": \"abs(u)\"");
        match AnalysisConfig::from_json(&bad) {
            Err(Error::Config { path, .. }) => assert_eq!(path, "map.z"),
            other => panic!("{other:?}"),
        }
        let bad = PLANE.replace("[0, 1], \"v\"", "[0, \"x\"], \"v\"");
        match AnalysisConfig::from_json(&bad) {
            Err(Error::Config { path, .. }) => assert!(path.starts_with("domain.u"), "{path}"),
            other => panic!("{other:?}"),
        }
        let bad = PLANE.replace("\"input\"", "\"inptu\"");
        assert!(matches!(AnalysisConfig::from_json(&bad), Err(Error::Config { .. })));
        let bad = PLANE.replace("[0, 1], \"v\"", "[1, 0], \"v\"");
        match AnalysisConfig::from_json(&bad) {
            Err(Error::Config { path, .. }) => assert_eq!(path, "domain"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn round_trips_through_json() {
        let c = AnalysisConfig::from_json(PLANE).unwrap();
        let again = AnalysisConfig::from_json(&c.to_json()).unwrap();
        assert_eq!(c, again);
    }
}
