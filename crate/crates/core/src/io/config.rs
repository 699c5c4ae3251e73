//! Flat-key TOML recipes.
//!
//! A config file holds `key = value` pairs at top level. A file written as a
//! run manifest is accepted too: its `[recipe]` table is used and the rest is
//! ignored. Overrides are `key=value` strings whose value is parsed as a TOML
//! value (bare words fall back to strings) and are applied after the file.

use crate::error::{Error, Result};
use crate::experiments::{linspace, EngineKind, ExperimentRecipe, Figure, GridAxis, NmKind, Param};
use std::path::Path;
use toml::{Table, Value};

/// A recipe together with output-only settings.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub recipe: ExperimentRecipe,
    /// Also render a PNG next to every diagram CSV.
    pub heatmap: bool,
}

impl RunConfig {
    pub fn preset(figure: Figure) -> Self {
        Self {
            recipe: ExperimentRecipe::preset(figure),
            heatmap: false,
        }
    }
}

/// Splits `key=value`.
pub fn parse_override(s: &str) -> Result<(String, String)> {
    match s.split_once('=') {
        Some((k, v)) if !k.trim().is_empty() => Ok((k.trim().to_string(), v.trim().to_string())),
        _ => Err(Error::config(s, "expected key=value")),
    }
}

fn override_value(raw: &str) -> Value {
    format!("v = {raw}")
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()))
}

/// Loads `path` (if any), then applies `overrides` in order.
pub fn parse_recipe(
    figure: Figure,
    path: Option<&Path>,
    overrides: &[(String, String)],
) -> Result<RunConfig> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?,
        None => String::new(),
    };
    parse_recipe_str(figure, &text, overrides).map_err(|e| match (e, path) {
        (Error::Format { message, .. }, Some(p)) => Error::Format {
            path: p.display().to_string(),
            message,
        },
        (e, _) => e,
    })
}

pub fn parse_recipe_str(
    figure: Figure,
    text: &str,
    overrides: &[(String, String)],
) -> Result<RunConfig> {
    let mut table: Table = text.parse().map_err(|e: toml::de::Error| Error::Format {
        path: "<config>".into(),
        message: e.message().to_string(),
    })?;
    if let Some(Value::Table(r)) = table.remove("recipe") {
        table = r;
    }
    let mut entries: Vec<(String, Value)> = table.into_iter().collect();
    for (k, v) in overrides {
        entries.push((k.clone(), override_value(v)));
    }
    resolve(figure, entries)
}

fn resolve(figure: Figure, entries: Vec<(String, Value)>) -> Result<RunConfig> {
    let mut cfg = RunConfig::preset(figure);
    let mut resolution = None;
    for (key, value) in &entries {
        if key == "resolution" {
            resolution = Some(as_usize(key, value)?);
        } else {
            apply(&mut cfg, key, value)?;
        }
    }
    if let Some(n) = resolution {
        if n < 2 {
            return Err(Error::config("resolution", "must be >= 2"));
        }
        for axis in [&mut cfg.recipe.x, &mut cfg.recipe.y] {
            let (a, b) = match (axis.values.first(), axis.values.last()) {
                (Some(a), Some(b)) => (*a, *b),
                _ => continue,
            };
            axis.values = linspace(a, b, n);
        }
    }
    cfg.recipe.validate()?;
    Ok(cfg)
}

fn type_error(key: &str, want: &str, v: &Value) -> Error {
    Error::config(key, format!("expected {want}, got {}", v.type_str()))
}

fn as_f64(key: &str, v: &Value) -> Result<f64> {
    match v {
        Value::Float(f) => Ok(*f),
        Value::Integer(i) => Ok(*i as f64),
        _ => Err(type_error(key, "a number", v)),
    }
}

fn as_usize(key: &str, v: &Value) -> Result<usize> {
    match v {
        Value::Integer(i) if *i >= 0 => Ok(*i as usize),
        Value::Integer(_) => Err(Error::config(key, "must be >= 0")),
        _ => Err(type_error(key, "an integer", v)),
    }
}

fn as_bool(key: &str, v: &Value) -> Result<bool> {
    v.as_bool().ok_or_else(|| type_error(key, "a boolean", v))
}

fn as_str<'a>(key: &str, v: &'a Value) -> Result<&'a str> {
    v.as_str().ok_or_else(|| type_error(key, "a string", v))
}

fn as_list(key: &str, v: &Value) -> Result<Vec<f64>> {
    match v {
        Value::Array(a) => a.iter().map(|x| as_f64(key, x)).collect(),
        _ => Err(type_error(key, "a list of numbers", v)),
    }
}

fn as_param(key: &str, v: &Value) -> Result<Param> {
    let s = as_str(key, v)?;
    Param::from_name(s).ok_or_else(|| Error::config(key, format!("unknown parameter `{s}`")))
}

fn apply(cfg: &mut RunConfig, key: &str, v: &Value) -> Result<()> {
    let r = &mut cfg.recipe;
    match key {
        "figure" => {
            let s = as_str(key, v)?;
            if s != r.figure.name() {
                return Err(Error::config(
                    key,
                    format!("`{s}` does not match command `{}`", r.figure),
                ));
            }
        }
        "engine" => {
            let s = as_str(key, v)?;
            r.engine = EngineKind::from_name(s)
                .ok_or_else(|| Error::config(key, format!("unknown engine `{s}`")))?;
        }
        "omega1" => r.point.omega1 = as_f64(key, v)?,
        "lambda" => r.point.lambda = as_f64(key, v)?,
        "gamma" => r.point.gamma = as_f64(key, v)?,
        "gamma_lf" => r.point.gamma_lf = as_f64(key, v)?,
        "swap_gamma" => r.point.swap_gamma = as_f64(key, v)?,
        "x_param" => r.x.param = as_param(key, v)?,
        "y_param" => r.y.param = as_param(key, v)?,
        "x_values" => r.x.values = as_list(key, v)?,
        "y_values" => r.y.values = as_list(key, v)?,
        "panel_param" => {
            let s = as_str(key, v)?;
            r.panel = if s == "none" {
                None
            } else {
                let p = as_param(key, v)?;
                let values = r.panel.take().map(|a| a.values).unwrap_or_default();
                Some(GridAxis::new(p, values))
            };
        }
        "panel_values" => match &mut r.panel {
            Some(a) => a.values = as_list(key, v)?,
            None => return Err(Error::config(key, "set panel_param first")),
        },
        "compute_c12" => r.compute_c12 = as_bool(key, v)?,
        "nm" => {
            r.nm = match as_str(key, v)? {
                "trace" => Some(NmKind::Trace),
                "entanglement" => Some(NmKind::Entanglement),
                "none" => None,
                s => return Err(Error::config(key, format!("unknown measure `{s}`"))),
            }
        }
        "normalize" => r.normalize = as_bool(key, v)?,
        "t_end" => r.integration.t_end = as_f64(key, v)?,
        "step" => r.integration.step = as_f64(key, v)?,
        "sample_stride" => r.integration.sample_stride = as_usize(key, v)?,
        "me_window" => r.me_window.window = as_usize(key, v)?,
        "me_overlap" => r.me_window.overlap = as_usize(key, v)?,
        "cm_window" => r.cm_window.window = as_usize(key, v)?,
        "cm_overlap" => r.cm_window.overlap = as_usize(key, v)?,
        "j" => r.collision.j = as_f64(key, v)?,
        "dt_s" => r.collision.dt_s = as_f64(key, v)?,
        "dt_s1s2" => r.collision.dt_s1s2 = as_f64(key, v)?,
        "dt_s2e" => r.collision.dt_s2e = as_f64(key, v)?,
        "n_collisions" => r.collision.n_collisions = as_usize(key, v)?,
        "trace_omega1" => r.trace_omega1 = as_f64(key, v)?,
        "trace_gammas" => r.trace_gammas = as_list(key, v)?,
        "trace_omegas" => r.trace_omegas = as_list(key, v)?,
        "parallel" => r.exec.parallel = as_bool(key, v)?,
        "workers" => r.exec.workers = Some(as_usize(key, v)?),
        "heatmap" => cfg.heatmap = as_bool(key, v)?,
        _ => return Err(Error::config(key, "unknown key")),
    }
    Ok(())
}

/// Every resolved setting as flat keys; parsing the result reproduces `cfg`.
pub fn recipe_table(cfg: &RunConfig) -> Table {
    let r = &cfg.recipe;
    let mut t = Table::new();
    let mut put = |k: &str, v: Value| {
        t.insert(k.to_string(), v);
    };
    let f = Value::Float;
    let i = |n: usize| Value::Integer(n as i64);
    let list = |v: &[f64]| Value::Array(v.iter().map(|x| Value::Float(*x)).collect());
    let s = |x: &str| Value::String(x.to_string());
    put("figure", s(r.figure.name()));
    put("engine", s(r.engine.name()));
    put("omega1", f(r.point.omega1));
    put("lambda", f(r.point.lambda));
    put("gamma", f(r.point.gamma));
    put("gamma_lf", f(r.point.gamma_lf));
    put("swap_gamma", f(r.point.swap_gamma));
    put("x_param", s(r.x.param.name()));
    put("x_values", list(&r.x.values));
    put("y_param", s(r.y.param.name()));
    put("y_values", list(&r.y.values));
    match &r.panel {
        Some(p) => {
            put("panel_param", s(p.param.name()));
            put("panel_values", list(&p.values));
        }
        None => put("panel_param", s("none")),
    }
    put("compute_c12", Value::Boolean(r.compute_c12));
    put("nm", s(r.nm.map_or("none", |k| k.name())));
    put("normalize", Value::Boolean(r.normalize));
    put("t_end", f(r.integration.t_end));
    put("step", f(r.integration.step));
    put("sample_stride", i(r.integration.sample_stride));
    put("me_window", i(r.me_window.window));
    put("me_overlap", i(r.me_window.overlap));
    put("cm_window", i(r.cm_window.window));
    put("cm_overlap", i(r.cm_window.overlap));
    put("j", f(r.collision.j));
    put("dt_s", f(r.collision.dt_s));
    put("dt_s1s2", f(r.collision.dt_s1s2));
    put("dt_s2e", f(r.collision.dt_s2e));
    put("n_collisions", i(r.collision.n_collisions));
    put("trace_omega1", f(r.trace_omega1));
    put("trace_gammas", list(&r.trace_gammas));
    put("trace_omegas", list(&r.trace_omegas));
    put("parallel", Value::Boolean(r.exec.parallel));
    if let Some(w) = r.exec.workers {
        put("workers", i(w));
    }
    put("heatmap", Value::Boolean(cfg.heatmap));
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect()
    }

    fn key_of(e: Error) -> String {
        match e {
            Error::Config { key, .. } => key,
            other => panic!("not a config error: {other}"),
        }
    }

    #[test]
    fn empty_config_gives_defaults() {
        let c = parse_recipe_str(Figure::Fig1, "", &[]).unwrap();
        assert_eq!(c.recipe, ExperimentRecipe::preset(Figure::Fig1));
        assert_eq!(c.recipe.point.gamma, 0.01);
        assert_eq!(c.recipe.integration.t_end, 500.0);
    }

    #[test]
    fn rejections_name_the_key() {
        let e = parse_recipe_str(Figure::Fig1, "gamma = -0.1", &[]).unwrap_err();
        assert_eq!(key_of(e), "gamma");
        let e = parse_recipe_str(Figure::Fig1, "colour = 3", &[]).unwrap_err();
        assert_eq!(key_of(e), "colour");
        let e = parse_recipe_str(Figure::Fig4, "n_collisions = 1.5", &[]).unwrap_err();
        assert_eq!(key_of(e), "n_collisions");
        let e = parse_recipe_str(Figure::Fig1, "lambda = \"big\"", &[]).unwrap_err();
        assert_eq!(key_of(e), "lambda");
        let e = parse_recipe_str(Figure::Fig1, "figure = \"fig4\"", &[]).unwrap_err();
        assert_eq!(key_of(e), "figure");
        let e = parse_recipe_str(Figure::Fig1, "", &set(&[("gamma", "-1")])).unwrap_err();
        assert_eq!(key_of(e), "gamma");
        assert!(matches!(
            parse_recipe_str(Figure::Fig1, "gamma = ", &[]),
            Err(Error::Format { .. })
        ));
    }

    #[test]
    fn overrides_win() {
        let c = parse_recipe_str(
            Figure::Fig4,
            "n_collisions = 10000\nlambda = 0.2",
            &set(&[("n_collisions", "500"), ("engine", "collision")]),
        )
        .unwrap();
        assert_eq!(c.recipe.collision.n_collisions, 500);
        assert_eq!(c.recipe.point.lambda, 0.2);
    }

    #[test]
    fn table_round_trips() {
        for f in Figure::ALL {
            let mut c = RunConfig::preset(f);
            c.recipe.exec.workers = Some(2);
            c.heatmap = true;
            let text = toml::to_string(&recipe_table(&c)).unwrap();
            assert_eq!(parse_recipe_str(f, &text, &[]).unwrap(), c);
            let manifest = format!("[manifest]\nversion = \"x\"\n\n[recipe]\n{text}");
            assert_eq!(parse_recipe_str(f, &manifest, &[]).unwrap(), c);
        }
    }

    #[test]
    fn resolution_regrids() {
        let c = parse_recipe_str(Figure::Fig6, "resolution = 41", &[]).unwrap();
        assert_eq!(c.recipe.x.values.len(), 41);
        assert_eq!(c.recipe.y.values[40], 1.5);
        assert_eq!(c.recipe.x.values[20], 1.0);
    }

    #[test]
    fn panel_keys() {
        let c = parse_recipe_str(
            Figure::Sweep,
            "panel_param = \"gamma\"\npanel_values = [0.01, 0.02]",
            &[],
        )
        .unwrap();
        assert_eq!(c.recipe.panel.unwrap().values, vec![0.01, 0.02]);
        let e = parse_recipe_str(Figure::Sweep, "panel_values = [1.0]", &[]).unwrap_err();
        assert_eq!(key_of(e), "panel_values");
    }

    #[test]
    fn override_syntax() {
        assert_eq!(parse_override("a=1").unwrap(), ("a".into(), "1".into()));
        assert!(parse_override("=1").is_err());
        assert_eq!(
            override_value("collision"),
            Value::String("collision".into())
        );
        assert_eq!(override_value("[1, 2.5]").as_array().unwrap().len(), 2);
    }
}
