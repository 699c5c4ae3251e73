//! Runs a resolved recipe and writes its outputs plus a manifest.

use super::config::{recipe_table, RunConfig};
use super::{format_number, write_diagram, write_series, write_text};
use crate::error::{Error, Result};
use crate::experiments::{run_single, run_sweep, run_traces, PhaseDiagram, RecipeKind};
use std::path::Path;
use std::time::Instant;
use toml::{Table, Value};

/// Record of one run, written as `<figure>_manifest.toml`.
#[derive(Clone, Debug, PartialEq)]
pub struct RunManifest {
    pub version: String,
    pub command: String,
    pub recipe: Table,
    pub wall_clock_seconds: f64,
    pub cells_ok: usize,
    pub cells_missing: usize,
    pub cells_flagged: usize,
    /// File names relative to the output directory, in write order.
    pub outputs: Vec<String>,
    /// `file:ix:iy:code` for every missing cell.
    pub missing: Vec<String>,
    pub notes: Vec<String>,
    pub traces: Vec<Table>,
}

impl RunManifest {
    pub fn file_name(&self) -> String {
        format!("{}_manifest.toml", self.command)
    }

    pub fn to_toml(&self) -> String {
        let strings = |v: &[String]| Value::Array(v.iter().cloned().map(Value::String).collect());
        let mut m = Table::new();
        m.insert("tool".into(), Value::String("syncmem".into()));
        m.insert("version".into(), Value::String(self.version.clone()));
        m.insert("command".into(), Value::String(self.command.clone()));
        m.insert(
            "wall_clock_seconds".into(),
            Value::Float(self.wall_clock_seconds),
        );
        m.insert("cells_ok".into(), Value::Integer(self.cells_ok as i64));
        m.insert(
            "cells_missing".into(),
            Value::Integer(self.cells_missing as i64),
        );
        m.insert(
            "cells_flagged".into(),
            Value::Integer(self.cells_flagged as i64),
        );
        m.insert("outputs".into(), strings(&self.outputs));
        m.insert("missing".into(), strings(&self.missing));
        m.insert("notes".into(), strings(&self.notes));
        let mut doc = Table::new();
        doc.insert("manifest".into(), Value::Table(m));
        doc.insert("recipe".into(), Value::Table(self.recipe.clone()));
        if !self.traces.is_empty() {
            doc.insert(
                "traces".into(),
                Value::Array(self.traces.iter().cloned().map(Value::Table).collect()),
            );
        }
        toml::to_string(&doc).expect("manifest serializes")
    }
}

struct Writer<'a> {
    dir: &'a Path,
    heatmap: bool,
    outputs: Vec<String>,
    missing: Vec<String>,
    flagged: usize,
}

impl Writer<'_> {
    fn diagram(&mut self, name: String, d: &PhaseDiagram) -> Result<()> {
        let file = format!("{name}.csv");
        write_diagram(d, &self.dir.join(&file))?;
        for (ix, iy, reason) in d.missing() {
            self.missing
                .push(format!("{file}:{ix}:{iy}:{}", reason.code()));
        }
        self.flagged += d.flagged.len();
        self.outputs.push(file);
        if self.heatmap {
            self.png(&name, d)?;
        }
        Ok(())
    }

    #[cfg(feature = "heatmap")]
    fn png(&mut self, name: &str, d: &PhaseDiagram) -> Result<()> {
        let file = format!("{name}.png");
        super::write_heatmap(d, &self.dir.join(&file))?;
        self.outputs.push(file);
        Ok(())
    }

    #[cfg(not(feature = "heatmap"))]
    fn png(&mut self, _: &str, _: &PhaseDiagram) -> Result<()> {
        Err(Error::config(
            "heatmap",
            "built without the `heatmap` feature",
        ))
    }
}

/// Runs `cfg` and writes every output into `dir` (created if needed).
pub fn execute(cfg: &RunConfig, dir: &Path) -> Result<RunManifest> {
    let started = Instant::now();
    let r = &cfg.recipe;
    r.validate()?;
    if cfg.heatmap && !cfg!(feature = "heatmap") {
        return Err(Error::config(
            "heatmap",
            "built without the `heatmap` feature",
        ));
    }
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let fig = r.figure.name();
    let mut w = Writer {
        dir,
        heatmap: cfg.heatmap,
        outputs: Vec::new(),
        missing: Vec::new(),
        flagged: 0,
    };
    let mut notes = Vec::new();
    let mut traces = Vec::new();
    let (mut ok, mut missing) = (0, 0);
    match r.figure.kind() {
        RecipeKind::Grid => {
            let res = run_sweep(r)?;
            (ok, missing) = res.status_counts();
            for p in &res.panels {
                let suffix = p.tag().map(|t| format!("_{t}")).unwrap_or_default();
                if let Some(d) = &p.c12 {
                    w.diagram(format!("{fig}_c12{suffix}"), d)?;
                }
                if let Some(d) = &p.nm {
                    w.diagram(format!("{fig}_nm{suffix}"), d)?;
                }
                if let (Some(d), true) = (&p.nm_raw, r.normalize) {
                    w.diagram(format!("{fig}_nm_raw{suffix}"), d)?;
                }
                notes.extend(p.notes.iter().map(|n| format!("{fig}{suffix}: {n}")));
            }
        }
        RecipeKind::Traces => {
            for t in run_traces(r)? {
                let file = format!(
                    "{fig}_trace_omega1-{}_swap_gamma-{}.csv",
                    format_number(t.omega1),
                    format_number(t.swap_gamma)
                );
                if w.outputs.contains(&file) {
                    continue;
                }
                write_series(&t.table(), &dir.join(&file))?;
                ok += t.c12.iter().filter(|c| c.is_some()).count();
                missing += t.c12.iter().filter(|c| c.is_none()).count();
                let mut row = Table::new();
                row.insert("file".into(), Value::String(file.clone()));
                row.insert("omega1".into(), Value::Float(t.omega1));
                row.insert("swap_gamma".into(), Value::Float(t.swap_gamma));
                row.insert("nm_final".into(), Value::Float(t.nm_final));
                if let Some(n) = t.first_sync {
                    row.insert("first_sync".into(), Value::Integer(n as i64));
                }
                traces.push(row);
                w.outputs.push(file);
            }
        }
        RecipeKind::Single => {
            let s = run_single(r)?;
            for (name, table) in [("series", &s.dense), ("windows", &s.windows)] {
                let file = format!("{fig}_{name}.csv");
                write_series(table, &dir.join(&file))?;
                w.outputs.push(file);
            }
            let c12 = s.windows.column("C12").unwrap_or_default();
            ok = c12.iter().filter(|c| !c.is_nan()).count();
            missing = c12.len() - ok;
        }
    }
    let manifest = RunManifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        command: fig.to_string(),
        recipe: recipe_table(cfg),
        wall_clock_seconds: started.elapsed().as_secs_f64(),
        cells_ok: ok,
        cells_missing: missing,
        cells_flagged: w.flagged,
        outputs: w.outputs,
        missing: w.missing,
        notes,
        traces,
    };
    write_text(&dir.join(manifest.file_name()), &manifest.to_toml())?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::Figure;
    use crate::io::{parse_recipe, read_diagram};

    fn small(figure: Figure) -> RunConfig {
        let mut c = RunConfig::preset(figure);
        c.recipe.collision.n_collisions = 400;
        c.recipe.x.values.truncate(2);
        c.recipe.y.values.truncate(2);
        if let Some(p) = &mut c.recipe.panel {
            p.values.truncate(1);
        }
        c
    }

    #[test]
    fn grid_outputs_and_manifest_replay() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = small(Figure::Fig4);
        c.heatmap = cfg!(feature = "heatmap");
        let m = execute(&c, dir.path()).unwrap();
        assert_eq!(m.cells_ok + m.cells_missing, 8);
        assert!(m.outputs.contains(&"fig4_c12_swap_gamma-0.csv".to_string()));
        assert!(m
            .outputs
            .contains(&"fig4_nm_raw_swap_gamma-0.csv".to_string()));
        let d = read_diagram(&dir.path().join("fig4_nm_swap_gamma-0.csv")).unwrap();
        assert_eq!((d.nx(), d.ny()), (2, 2));

        let manifest = dir.path().join(m.file_name());
        let replay = parse_recipe(Figure::Fig4, Some(&manifest), &[]).unwrap();
        assert_eq!(replay, c);
        let dir2 = tempfile::tempdir().unwrap();
        let m2 = execute(&replay, dir2.path()).unwrap();
        for f in m2.outputs.iter().filter(|f| f.ends_with(".csv")) {
            let a = std::fs::read(dir.path().join(f)).unwrap();
            let b = std::fs::read(dir2.path().join(f)).unwrap();
            assert_eq!(a, b, "{f}");
        }
    }

    #[test]
    fn trace_outputs() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = RunConfig::preset(Figure::Fig7);
        c.recipe.collision.n_collisions = 400;
        c.recipe.trace_gammas = vec![0.0];
        c.recipe.trace_omegas = vec![1.2, 1.3];
        let m = execute(&c, dir.path()).unwrap();
        assert_eq!(m.outputs.len(), 2);
        assert_eq!(m.traces.len(), 2);
        let text = std::fs::read_to_string(dir.path().join(&m.outputs[0])).unwrap();
        assert!(text.starts_with("n,C12,NM\n200,"));
    }

    #[test]
    fn single_outputs() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = RunConfig::preset(Figure::CmRun);
        c.recipe.collision.n_collisions = 300;
        let m = execute(&c, dir.path()).unwrap();
        assert_eq!(m.outputs, vec!["cm-run_series.csv", "cm-run_windows.csv"]);
        let text = std::fs::read_to_string(dir.path().join("cm-run_series.csv")).unwrap();
        assert!(text.starts_with("n,sx1,sx2,D,NM\n1,"));
    }
}
