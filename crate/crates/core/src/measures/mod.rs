//! Pearson synchronization, trace-distance and entanglement non-Markovianity.

use crate::error::{Error, Result};
use crate::experiments::PhaseDiagram;
use crate::qcore::{concurrence, DensityMatrix};

/// Uniformly spaced real samples; `t_k = t0 + k dt`.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeSeries {
    pub t0: f64,
    pub dt: f64,
    pub values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(t0: f64, dt: f64, values: Vec<f64>) -> Self {
        Self { t0, dt, values }
    }

    /// Collision-indexed series starting at `n = 1`.
    pub fn per_collision(values: Vec<f64>) -> Self {
        Self::new(1.0, 1.0, values)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.time(k)).collect()
    }
}

/// Sliding window of `window` samples, consecutive windows sharing `overlap`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WindowSpec {
    pub window: usize,
    pub overlap: usize,
}

impl WindowSpec {
    pub fn new(window: usize, overlap: usize) -> Result<Self> {
        if window < 2 {
            return Err(Error::config("window", "must be >= 2"));
        }
        if overlap >= window {
            return Err(Error::config("overlap", "must be smaller than window"));
        }
        Ok(Self { window, overlap })
    }

    pub fn stride(&self) -> usize {
        self.window - self.overlap
    }

    /// Start indices of every complete window in a series of length `len`.
    pub fn starts(&self, len: usize) -> Vec<usize> {
        if len < self.window {
            return Vec::new();
        }
        (0..=(len - self.window)).step_by(self.stride()).collect()
    }
}

/// Relative spread below which a window counts as constant.
const ZERO_SPREAD: f64 = 1e-12;

/// Pearson correlation coefficient of two equal-length samples.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Dimension {
            expected: x.len(),
            found: y.len(),
        });
    }
    let n = x.len();
    if n < 2 {
        return Err(Error::Validation("need at least 2 samples".into()));
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    let flat = |ss: f64, v: &[f64]| {
        let scale = v
            .iter()
            .fold(0.0f64, |m, a| m.max(a.abs()))
            .max(f64::MIN_POSITIVE);
        (ss / n as f64).sqrt() <= ZERO_SPREAD * scale
    };
    if flat(sxx, x) || flat(syy, y) {
        return Err(Error::UndefinedCorrelation("zero variance".into()));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Pearson coefficients over sliding windows; `None` marks constant windows.
#[derive(Clone, Debug, PartialEq)]
pub struct SlidingPearson {
    pub starts: Vec<usize>,
    /// Window centre on the time axis of the input.
    pub centers: Vec<f64>,
    pub values: Vec<Option<f64>>,
    pub window: WindowSpec,
}

impl SlidingPearson {
    /// Coefficient of the last complete window.
    pub fn last(&self) -> Option<f64> {
        self.values.last().copied().flatten()
    }

    /// Index (into the input) of the last sample of window `k`.
    pub fn window_end(&self, k: usize) -> usize {
        self.starts[k] + self.window.window - 1
    }
}

pub fn sliding_pearson(x: &TimeSeries, y: &TimeSeries, spec: WindowSpec) -> Result<SlidingPearson> {
    if x.len() != y.len() {
        return Err(Error::Dimension {
            expected: x.len(),
            found: y.len(),
        });
    }
    if x.len() < spec.window {
        return Err(Error::Validation(format!(
            "series of length {} is shorter than the window {}",
            x.len(),
            spec.window
        )));
    }
    let starts = spec.starts(x.len());
    let half = (spec.window - 1) as f64 / 2.0;
    let centers = starts
        .iter()
        .map(|&s| x.t0 + (s as f64 + half) * x.dt)
        .collect();
    let values = starts
        .iter()
        .map(|&s| {
            let r = s..s + spec.window;
            match pearson(&x.values[r.clone()], &y.values[r]) {
                Ok(c) => Ok(Some(c)),
                Err(Error::UndefinedCorrelation(_)) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_>>()?;
    Ok(SlidingPearson {
        starts,
        centers,
        values,
        window: spec,
    })
}

/// Sum of the positive increments of a distance series.
pub fn nm_from_distance_series(d: &[f64]) -> f64 {
    d.windows(2).map(|w| (w[1] - w[0]).max(0.0)).sum()
}

/// Cumulative positive increments: `out[n]` covers `d[0..=n]`.
pub fn running_nm(d: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(d.len());
    for (k, v) in d.iter().enumerate() {
        if k > 0 {
            acc += (v - d[k - 1]).max(0.0);
        }
        out.push(acc);
    }
    out
}

/// Entanglement non-Markovianity from a concurrence series.
pub fn nm_from_concurrence(e: &[f64]) -> f64 {
    nm_from_distance_series(e)
}

/// Entanglement non-Markovianity of a trajectory of ancilla-system states.
pub fn nm_entanglement(joint: &[DensityMatrix]) -> Result<f64> {
    let e = joint.iter().map(concurrence).collect::<Result<Vec<_>>>()?;
    Ok(nm_from_concurrence(&e))
}

/// Divides every cell by the grid maximum.
pub fn normalize_diagram(d: &PhaseDiagram) -> Result<PhaseDiagram> {
    let max = d.values().fold(f64::NEG_INFINITY, |m, v| m.max(v));
    if !(max > 0.0) {
        return Err(Error::DegenerateNormalization(
            "no strictly positive cell".into(),
        ));
    }
    let mut out = d.clone();
    out.map_values(|v| v / max);
    Ok(out)
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut r = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            r[k] = avg;
        }
        i = j + 1;
    }
    r
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Dimension {
            expected: x.len(),
            found: y.len(),
        });
    }
    pearson(&ranks(x), &ranks(y))
}
