//! Figure recipes: parameter grids, per-point simulations and assembly of
//! phase diagrams and time traces.

mod diagram;
mod exec;

pub use diagram::{linspace, zero_crossing, Axis, Metric, MissingReason, PhaseDiagram};
pub use exec::{map_indexed, ExecOptions};

use crate::collision::{self, CollisionConfig};
use crate::error::{Error, Result};
use crate::lindblad::{
    derive_spectrum, pair_distance_series, sync_initial_state, sync_observables,
    IntegrationOptions, SystemParams,
};
use crate::measures::{
    nm_from_distance_series, normalize_diagram, running_nm, sliding_pearson, TimeSeries, WindowSpec,
};
use std::fmt;

/// Threshold on `|C12|` that counts as (anti-)synchronized.
pub const SYNC_THRESHOLD: f64 = 0.9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Figure {
    Fig1,
    Fig2,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
    MeRun,
    CmRun,
    Sweep,
}

impl Figure {
    pub const ALL: [Figure; 10] = [
        Figure::Fig1,
        Figure::Fig2,
        Figure::Fig4,
        Figure::Fig5,
        Figure::Fig6,
        Figure::Fig7,
        Figure::Fig8,
        Figure::MeRun,
        Figure::CmRun,
        Figure::Sweep,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Figure::Fig1 => "fig1",
            Figure::Fig2 => "fig2",
            Figure::Fig4 => "fig4",
            Figure::Fig5 => "fig5",
            Figure::Fig6 => "fig6",
            Figure::Fig7 => "fig7",
            Figure::Fig8 => "fig8",
            Figure::MeRun => "me-run",
            Figure::CmRun => "cm-run",
            Figure::Sweep => "sweep",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|f| f.name() == s)
    }

    pub fn kind(&self) -> RecipeKind {
        match self {
            Figure::Fig7 => RecipeKind::Traces,
            Figure::MeRun | Figure::CmRun => RecipeKind::Single,
            _ => RecipeKind::Grid,
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// What a recipe produces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RecipeKind {
    Grid,
    Traces,
    Single,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EngineKind {
    /// Flat spectral density, rate `gamma`, plus dephasing `gamma_lf` on `s2`.
    MasterEq,
    /// Ohmic rates `gamma * frequency` plus dephasing `gamma_lf` on `s2`.
    MasterEqHybrid,
    Collision,
}

impl EngineKind {
    pub fn name(&self) -> &'static str {
        match self {
            EngineKind::MasterEq => "master_eq",
            EngineKind::MasterEqHybrid => "master_eq_hybrid",
            EngineKind::Collision => "collision",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        [
            EngineKind::MasterEq,
            EngineKind::MasterEqHybrid,
            EngineKind::Collision,
        ]
        .into_iter()
        .find(|e| e.name() == s)
    }
}

/// Parameters that can be swept.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Param {
    Omega1,
    Lambda,
    /// Bath coupling: flat rate or Ohmic prefactor.
    Gamma,
    GammaLf,
    SwapGamma,
}

impl Param {
    pub fn name(&self) -> &'static str {
        match self {
            Param::Omega1 => "omega1",
            Param::Lambda => "lambda",
            Param::Gamma => "gamma",
            Param::GammaLf => "gamma_lf",
            Param::SwapGamma => "swap_gamma",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        [
            Param::Omega1,
            Param::Lambda,
            Param::Gamma,
            Param::GammaLf,
            Param::SwapGamma,
        ]
        .into_iter()
        .find(|p| p.name() == s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NmKind {
    Trace,
    Entanglement,
}

impl NmKind {
    pub fn name(&self) -> &'static str {
        match self {
            NmKind::Trace => "trace",
            NmKind::Entanglement => "entanglement",
        }
    }

    pub fn metric(&self) -> Metric {
        match self {
            NmKind::Trace => Metric::NmTrace,
            NmKind::Entanglement => Metric::NmEntanglement,
        }
    }
}

/// Physical parameters of one simulation.
#[derive(Clone, Debug, PartialEq)]
pub struct PointParams {
    pub omega1: f64,
    pub lambda: f64,
    pub gamma: f64,
    pub gamma_lf: f64,
    pub swap_gamma: f64,
}

impl PointParams {
    pub fn with(&self, p: Param, v: f64) -> Self {
        let mut out = self.clone();
        match p {
            Param::Omega1 => out.omega1 = v,
            Param::Lambda => out.lambda = v,
            Param::Gamma => out.gamma = v,
            Param::GammaLf => out.gamma_lf = v,
            Param::SwapGamma => out.swap_gamma = v,
        }
        out
    }

    pub fn get(&self, p: Param) -> f64 {
        match p {
            Param::Omega1 => self.omega1,
            Param::Lambda => self.lambda,
            Param::Gamma => self.gamma,
            Param::GammaLf => self.gamma_lf,
            Param::SwapGamma => self.swap_gamma,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridAxis {
    pub param: Param,
    pub values: Vec<f64>,
}

impl GridAxis {
    pub fn new(param: Param, values: Vec<f64>) -> Self {
        Self { param, values }
    }

    fn axis(&self) -> Axis {
        Axis::new(self.param.name(), self.values.clone())
    }
}

/// Collision-model stage settings shared by every grid point.
#[derive(Clone, Debug, PartialEq)]
pub struct CollisionTiming {
    pub j: f64,
    pub dt_s: f64,
    pub dt_s1s2: f64,
    pub dt_s2e: f64,
    pub n_collisions: usize,
}

impl Default for CollisionTiming {
    fn default() -> Self {
        let d = CollisionConfig::default();
        Self {
            j: d.j,
            dt_s: d.dt_s,
            dt_s1s2: d.dt_s1s2,
            dt_s2e: d.dt_s2e,
            n_collisions: d.n_collisions,
        }
    }
}

/// Everything needed to reproduce one figure's output.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentRecipe {
    pub figure: Figure,
    pub engine: EngineKind,
    pub point: PointParams,
    pub x: GridAxis,
    pub y: GridAxis,
    pub panel: Option<GridAxis>,
    pub compute_c12: bool,
    pub nm: Option<NmKind>,
    pub normalize: bool,
    pub integration: IntegrationOptions,
    pub me_window: WindowSpec,
    pub collision: CollisionTiming,
    pub cm_window: WindowSpec,
    /// Traces: detuning held fixed while the SWAP angle varies.
    pub trace_omega1: f64,
    pub trace_gammas: Vec<f64>,
    /// Traces: detunings compared at zero SWAP angle.
    pub trace_omegas: Vec<f64>,
    pub exec: ExecOptions,
}

fn fig1_omegas() -> Vec<f64> {
    vec![0.5, 0.7, 0.8, 0.9, 0.95, 1.0, 1.05, 1.1, 1.2, 1.3, 1.5]
}

impl ExperimentRecipe {
    /// Documented defaults for a figure.
    pub fn preset(figure: Figure) -> Self {
        let me_x = GridAxis::new(Param::Omega1, fig1_omegas());
        let me_y = GridAxis::new(Param::Lambda, linspace(0.01, 0.11, 11));
        let mut r = Self {
            figure,
            engine: EngineKind::MasterEq,
            point: PointParams {
                omega1: 1.05,
                lambda: 0.05,
                gamma: 0.01,
                gamma_lf: 0.0,
                swap_gamma: 0.0,
            },
            x: me_x,
            y: me_y,
            panel: None,
            compute_c12: true,
            nm: Some(NmKind::Trace),
            normalize: true,
            integration: IntegrationOptions::default(),
            me_window: WindowSpec {
                window: 1000,
                overlap: 900,
            },
            collision: CollisionTiming::default(),
            cm_window: WindowSpec {
                window: 250,
                overlap: 200,
            },
            trace_omega1: 1.2,
            trace_gammas: vec![0.0, 0.25, 0.5],
            trace_omegas: vec![1.1, 1.2, 1.3],
            exec: ExecOptions::default(),
        };
        let cm_lambda = GridAxis::new(Param::Lambda, linspace(0.02, 0.22, 11));
        match figure {
            Figure::Fig1 | Figure::Sweep | Figure::MeRun => {}
            Figure::Fig2 => {
                r.engine = EngineKind::MasterEqHybrid;
                r.point.gamma_lf = 0.05;
                r.panel = Some(GridAxis::new(Param::Gamma, vec![0.01, 0.001]));
            }
            Figure::Fig4 => {
                r.engine = EngineKind::Collision;
                r.x = GridAxis::new(Param::Omega1, linspace(0.9, 1.1, 11));
                r.y = cm_lambda;
                r.panel = Some(GridAxis::new(Param::SwapGamma, vec![0.0, 0.25, 0.5]));
            }
            Figure::Fig5 => {
                r.engine = EngineKind::Collision;
                r.x = GridAxis::new(Param::SwapGamma, linspace(0.0, 1.5, 11));
                r.y = cm_lambda;
                r.panel = Some(GridAxis::new(Param::Omega1, vec![0.8, 1.0, 1.2]));
            }
            Figure::Fig6 | Figure::Fig8 => {
                r.engine = EngineKind::Collision;
                r.point.lambda = 0.1;
                r.x = GridAxis::new(Param::Omega1, linspace(0.8, 1.2, 11));
                r.y = GridAxis::new(Param::SwapGamma, linspace(0.0, 1.5, 11));
                if figure == Figure::Fig8 {
                    r.compute_c12 = false;
                    r.nm = Some(NmKind::Entanglement);
                }
            }
            Figure::Fig7 => {
                r.engine = EngineKind::Collision;
                r.point.lambda = 0.1;
                r.cm_window = WindowSpec {
                    window: 200,
                    overlap: 150,
                };
            }
            Figure::CmRun => {
                r.engine = EngineKind::Collision;
                r.point.omega1 = 1.2;
                r.point.lambda = 0.1;
            }
        }
        r
    }

    pub fn validate(&self) -> Result<()> {
        self.integration.validate()?;
        for (prefix, w) in [("me", &self.me_window), ("cm", &self.cm_window)] {
            WindowSpec::new(w.window, w.overlap).map_err(|e| match e {
                Error::Config { key, message } => Error::config(format!("{prefix}_{key}"), message),
                e => e,
            })?;
        }
        for (key, v) in [
            ("omega1", self.point.omega1),
            ("lambda", self.point.lambda),
            ("gamma", self.point.gamma),
            ("gamma_lf", self.point.gamma_lf),
            ("swap_gamma", self.point.swap_gamma),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::config(
                    key,
                    format!("must be a finite number >= 0, got {v}"),
                ));
            }
        }
        let mut axes = vec![("x_values", &self.x), ("y_values", &self.y)];
        if let Some(p) = &self.panel {
            axes.push(("panel_values", p));
        }
        if self.figure.kind() == RecipeKind::Grid {
            for (key, a) in &axes {
                if a.values.is_empty() {
                    return Err(Error::config(*key, "must not be empty"));
                }
            }
            if self.x.param == self.y.param {
                return Err(Error::config("y_param", "must differ from x_param"));
            }
            if !self.compute_c12 && self.nm.is_none() {
                return Err(Error::config("nm", "nothing to compute"));
            }
        }
        let mut points = vec![self.point.clone()];
        for (_, a) in &axes {
            for v in &a.values {
                points.push(self.point.with(a.param, *v));
            }
        }
        for v in &self.trace_gammas {
            points.push(self.point.with(Param::SwapGamma, *v));
        }
        for v in self.trace_omegas.iter().chain([&self.trace_omega1]) {
            points.push(self.point.with(Param::Omega1, *v));
        }
        for p in &points {
            self.check_point(p)?;
        }
        if self.engine == EngineKind::Collision {
            let w = self.cm_window.window;
            if self.collision.n_collisions < w {
                return Err(Error::config(
                    "n_collisions",
                    format!("must be >= window ({w})"),
                ));
            }
        } else if self.integration.n_samples() < self.me_window.window {
            return Err(Error::config("t_end", "too short for one Pearson window"));
        }
        if self.nm == Some(NmKind::Entanglement) && self.engine != EngineKind::Collision {
            return Err(Error::config(
                "nm",
                "entanglement measure needs the collision engine",
            ));
        }
        Ok(())
    }

    fn check_point(&self, p: &PointParams) -> Result<()> {
        match self.engine {
            EngineKind::Collision => self.collision_config(p).validate(),
            _ => self.system_params(p).validate(),
        }
    }

    pub fn system_params(&self, p: &PointParams) -> SystemParams {
        match self.engine {
            EngineKind::MasterEqHybrid => {
                SystemParams::ohmic(p.omega1, p.lambda, p.gamma, p.gamma_lf)
            }
            _ => SystemParams {
                gamma_lf: p.gamma_lf,
                ..SystemParams::flat(p.omega1, p.lambda, p.gamma)
            },
        }
    }

    pub fn collision_config(&self, p: &PointParams) -> CollisionConfig {
        CollisionConfig {
            omega1: p.omega1,
            omega2: 1.0,
            lambda: p.lambda,
            j: self.collision.j,
            gamma: p.swap_gamma,
            dt_s: self.collision.dt_s,
            dt_s1s2: self.collision.dt_s1s2,
            dt_s2e: self.collision.dt_s2e,
            n_collisions: self.collision.n_collisions,
        }
    }

    fn gamma_lf(&self, p: &PointParams) -> f64 {
        match self.engine {
            EngineKind::Collision => 0.0,
            _ => p.gamma_lf,
        }
    }
}

/// Value of one cell or the reason it has none.
pub type CellResult = std::result::Result<f64, MissingReason>;

fn numerical(e: Error) -> MissingReason {
    MissingReason::Numerical(e.to_string())
}

/// Late-time Pearson coefficient at one parameter point.
pub fn point_c12(recipe: &ExperimentRecipe, p: &PointParams) -> CellResult {
    let sliding = match recipe.engine {
        EngineKind::Collision => {
            let cfg = recipe.collision_config(p);
            let s = collision::run(&cfg, &collision::default_initial_state()).map_err(numerical)?;
            sliding_pearson(
                &TimeSeries::per_collision(s.sx1),
                &TimeSeries::per_collision(s.sx2),
                recipe.cm_window,
            )
        }
        _ => {
            let spec = derive_spectrum(&recipe.system_params(p)).map_err(numerical)?;
            let obs = sync_observables(
                &spec,
                recipe.gamma_lf(p),
                &sync_initial_state(),
                &recipe.integration,
            )
            .map_err(numerical)?;
            let dt = recipe.integration.sample_dt();
            sliding_pearson(
                &TimeSeries::new(0.0, dt, obs.sx1),
                &TimeSeries::new(0.0, dt, obs.sx2),
                recipe.me_window,
            )
        }
    }
    .map_err(numerical)?;
    sliding.last().ok_or(MissingReason::UndefinedCorrelation)
}

/// Trace-distance (or entanglement) series whose positive increments give the
/// non-Markovianity at one parameter point.
pub fn point_memory_series(
    recipe: &ExperimentRecipe,
    p: &PointParams,
    kind: NmKind,
) -> Result<Vec<f64>> {
    match (recipe.engine, kind) {
        (EngineKind::Collision, NmKind::Trace) => {
            Ok(collision::run_pair(&recipe.collision_config(p))?.distances)
        }
        (EngineKind::Collision, NmKind::Entanglement) => {
            Ok(collision::run_entanglement(&recipe.collision_config(p))?.concurrence)
        }
        (_, NmKind::Trace) => {
            let spec = derive_spectrum(&recipe.system_params(p))?;
            pair_distance_series(&spec, recipe.gamma_lf(p), &recipe.integration)
        }
        (_, NmKind::Entanglement) => Err(Error::config(
            "nm",
            "entanglement measure needs the collision engine",
        )),
    }
}

pub fn point_nm(recipe: &ExperimentRecipe, p: &PointParams, kind: NmKind) -> CellResult {
    point_memory_series(recipe, p, kind)
        .map(|d| nm_from_distance_series(&d))
        .map_err(numerical)
}

/// Outside the secular regime: weak coupling compared to the bath rate while
/// the detuning is no larger than the coupling.
pub fn secular_flag(engine: EngineKind, p: &PointParams) -> bool {
    engine != EngineKind::Collision && p.lambda <= p.gamma && p.lambda >= (p.omega1 - 1.0).abs()
}

/// One panel of a grid sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct Panel {
    pub param: Option<(Param, f64)>,
    pub c12: Option<PhaseDiagram>,
    /// Normalized to its maximum when the recipe asks for it and the grid has
    /// a positive cell.
    pub nm: Option<PhaseDiagram>,
    pub nm_raw: Option<PhaseDiagram>,
    pub notes: Vec<String>,
}

impl Panel {
    /// File-name suffix, e.g. `swap_gamma-0.25`.
    pub fn tag(&self) -> Option<String> {
        self.param
            .map(|(p, v)| format!("{}-{}", p.name(), crate::io::format_number(v)))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub panels: Vec<Panel>,
}

impl SweepResult {
    /// Counts of `(ok, missing)` cells over all diagrams.
    pub fn status_counts(&self) -> (usize, usize) {
        let mut ok = 0;
        let mut missing = 0;
        for p in &self.panels {
            for d in [&p.c12, &p.nm_raw].into_iter().flatten() {
                missing += d.count_missing();
                ok += d.cells().len() - d.count_missing();
            }
        }
        (ok, missing)
    }
}

struct CellOut {
    c12: Option<CellResult>,
    nm: Option<CellResult>,
}

/// Evaluates every grid cell of every panel.
pub fn run_sweep(recipe: &ExperimentRecipe) -> Result<SweepResult> {
    recipe.validate()?;
    let panel_values: Vec<Option<(Param, f64)>> = match &recipe.panel {
        Some(a) => a.values.iter().map(|v| Some((a.param, *v))).collect(),
        None => vec![None],
    };
    let (nx, ny) = (recipe.x.values.len(), recipe.y.values.len());
    let per_panel = nx * ny;
    let point_at = |k: usize| {
        let (pi, rest) = (k / per_panel, k % per_panel);
        let (iy, ix) = (rest / nx, rest % nx);
        let mut p = recipe.point.clone();
        if let Some((param, v)) = panel_values[pi] {
            p = p.with(param, v);
        }
        p.with(recipe.y.param, recipe.y.values[iy])
            .with(recipe.x.param, recipe.x.values[ix])
    };
    let outs = map_indexed(panel_values.len() * per_panel, &recipe.exec, |k| {
        let p = point_at(k);
        CellOut {
            c12: recipe.compute_c12.then(|| point_c12(recipe, &p)),
            nm: recipe.nm.map(|kind| point_nm(recipe, &p, kind)),
        }
    })?;

    let mut panels = Vec::with_capacity(panel_values.len());
    for (pi, pv) in panel_values.iter().enumerate() {
        let blank = |m: Metric| PhaseDiagram::new(recipe.x.axis(), recipe.y.axis(), m);
        let mut c12 = recipe.compute_c12.then(|| blank(Metric::Pearson));
        let mut nm_raw = recipe.nm.map(|k| blank(k.metric()));
        for iy in 0..ny {
            for ix in 0..nx {
                let k = pi * per_panel + iy * nx + ix;
                let out = &outs[k];
                let flag = secular_flag(recipe.engine, &point_at(k));
                for (d, r) in [(&mut c12, &out.c12), (&mut nm_raw, &out.nm)] {
                    if let (Some(d), Some(r)) = (d.as_mut(), r) {
                        match r {
                            Ok(v) => d.set(ix, iy, Some(*v)),
                            Err(reason) => d.set_missing(ix, iy, reason.clone()),
                        }
                        if flag {
                            d.flagged.push((ix, iy));
                        }
                    }
                }
            }
        }
        let mut notes = Vec::new();
        let nm = match (&nm_raw, recipe.normalize) {
            (Some(raw), true) => match normalize_diagram(raw) {
                Ok(n) => Some(n),
                Err(e) => {
                    notes.push(format!("nm left unnormalized: {e}"));
                    Some(raw.clone())
                }
            },
            (raw, _) => raw.clone(),
        };
        panels.push(Panel {
            param: *pv,
            c12,
            nm,
            nm_raw,
            notes,
        });
    }
    Ok(SweepResult { panels })
}

/// Sliding `C12` and running non-Markovianity of one collision-model run.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceResult {
    pub omega1: f64,
    pub swap_gamma: f64,
    /// Collision index at the end of each window.
    pub n: Vec<usize>,
    pub c12: Vec<Option<f64>>,
    /// Cumulative positive increments of the pair distance up to `n`.
    pub nm: Vec<f64>,
    pub nm_final: f64,
    pub first_sync: Option<usize>,
}

/// First window-end index after which `|C12| >= threshold` holds for every
/// remaining window.
pub fn first_permanent_sync(n: &[usize], c12: &[Option<f64>], threshold: f64) -> Option<usize> {
    let ok = |c: &Option<f64>| c.is_some_and(|v| v.abs() >= threshold);
    match c12.iter().rposition(|c| !ok(c)) {
        None => n.first().copied(),
        Some(k) if k + 1 < n.len() => Some(n[k + 1]),
        Some(_) => None,
    }
}

pub fn run_trace(recipe: &ExperimentRecipe, p: &PointParams) -> Result<TraceResult> {
    let cfg = recipe.collision_config(p);
    let s = collision::run(&cfg, &collision::default_initial_state())?;
    let sliding = sliding_pearson(
        &TimeSeries::per_collision(s.sx1),
        &TimeSeries::per_collision(s.sx2),
        recipe.cm_window,
    )?;
    let d = collision::run_pair(&cfg)?.distances;
    let cumulative = running_nm(&d);
    let n: Vec<usize> = (0..sliding.starts.len())
        .map(|k| sliding.window_end(k) + 1)
        .collect();
    let nm = n.iter().map(|&i| cumulative[i]).collect();
    let first_sync = first_permanent_sync(&n, &sliding.values, SYNC_THRESHOLD);
    Ok(TraceResult {
        omega1: p.omega1,
        swap_gamma: p.swap_gamma,
        n,
        c12: sliding.values,
        nm,
        nm_final: *cumulative.last().unwrap_or(&0.0),
        first_sync,
    })
}

/// The two trace families: SWAP angles at fixed detuning, then detunings at
/// zero SWAP angle.
pub fn trace_points(recipe: &ExperimentRecipe) -> Vec<PointParams> {
    let base = recipe.point.with(Param::Omega1, recipe.trace_omega1);
    let mut pts: Vec<PointParams> = recipe
        .trace_gammas
        .iter()
        .map(|g| base.with(Param::SwapGamma, *g))
        .collect();
    pts.extend(recipe.trace_omegas.iter().map(|w| {
        recipe
            .point
            .with(Param::SwapGamma, 0.0)
            .with(Param::Omega1, *w)
    }));
    pts
}

pub fn run_traces(recipe: &ExperimentRecipe) -> Result<Vec<TraceResult>> {
    recipe.validate()?;
    if recipe.engine != EngineKind::Collision {
        return Err(Error::config("engine", "traces need the collision engine"));
    }
    let pts = trace_points(recipe);
    map_indexed(pts.len(), &recipe.exec, |k| run_trace(recipe, &pts[k]))?
        .into_iter()
        .collect()
}

/// Named columns sharing an index column (`t` or `n`).
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesTable {
    pub index_name: String,
    pub index: Vec<f64>,
    pub columns: Vec<(String, Vec<f64>)>,
}

impl SeriesTable {
    pub fn new(index_name: &str, index: Vec<f64>) -> Self {
        Self {
            index_name: index_name.into(),
            index,
            columns: Vec::new(),
        }
    }

    pub fn push(&mut self, name: &str, values: Vec<f64>) {
        self.columns.push((name.into(), values));
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }
}

impl TraceResult {
    pub fn table(&self) -> SeriesTable {
        let mut t = SeriesTable::new("n", self.n.iter().map(|&n| n as f64).collect());
        t.push(
            "C12",
            self.c12.iter().map(|c| c.unwrap_or(f64::NAN)).collect(),
        );
        t.push("NM", self.nm.clone());
        t
    }
}

/// Dense observables of a single run, plus the windowed Pearson series.
#[derive(Clone, Debug, PartialEq)]
pub struct SingleRun {
    pub dense: SeriesTable,
    pub windows: SeriesTable,
}

pub fn run_single(recipe: &ExperimentRecipe) -> Result<SingleRun> {
    recipe.validate()?;
    let p = &recipe.point;
    match recipe.engine {
        EngineKind::Collision => {
            let cfg = recipe.collision_config(p);
            let s = collision::run(&cfg, &collision::default_initial_state())?;
            let d = collision::run_pair(&cfg)?.distances;
            let cumulative = running_nm(&d);
            let n = cfg.n_collisions;
            let sliding = sliding_pearson(
                &TimeSeries::per_collision(s.sx1.clone()),
                &TimeSeries::per_collision(s.sx2.clone()),
                recipe.cm_window,
            )?;
            let mut dense = SeriesTable::new("n", (1..=n).map(|k| k as f64).collect());
            dense.push("sx1", s.sx1);
            dense.push("sx2", s.sx2);
            dense.push("D", d[1..].to_vec());
            dense.push("NM", cumulative[1..].to_vec());
            let ends: Vec<usize> = (0..sliding.starts.len())
                .map(|k| sliding.window_end(k) + 1)
                .collect();
            let mut windows = SeriesTable::new("n", ends.iter().map(|&e| e as f64).collect());
            windows.push(
                "C12",
                sliding
                    .values
                    .iter()
                    .map(|c| c.unwrap_or(f64::NAN))
                    .collect(),
            );
            windows.push("NM", ends.iter().map(|&e| cumulative[e]).collect());
            Ok(SingleRun { dense, windows })
        }
        _ => {
            let spec = derive_spectrum(&recipe.system_params(p))?;
            let glf = recipe.gamma_lf(p);
            let obs = sync_observables(&spec, glf, &sync_initial_state(), &recipe.integration)?;
            let d = pair_distance_series(&spec, glf, &recipe.integration)?;
            let dt = recipe.integration.sample_dt();
            let sliding = sliding_pearson(
                &TimeSeries::new(0.0, dt, obs.sx1.clone()),
                &TimeSeries::new(0.0, dt, obs.sx2.clone()),
                recipe.me_window,
            )?;
            let mut dense = SeriesTable::new("t", obs.times);
            dense.push("sx1", obs.sx1);
            dense.push("sx2", obs.sx2);
            dense.push("D", d.clone());
            dense.push("NM", running_nm(&d));
            let mut windows = SeriesTable::new("t", sliding.centers.clone());
            windows.push(
                "C12",
                sliding
                    .values
                    .iter()
                    .map(|c| c.unwrap_or(f64::NAN))
                    .collect(),
            );
            Ok(SingleRun { dense, windows })
        }
    }
}
