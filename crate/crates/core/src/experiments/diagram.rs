use crate::error::{Error, Result};
use std::fmt;

/// Quantity stored in a [`PhaseDiagram`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Metric {
    Pearson,
    NmTrace,
    NmEntanglement,
}

impl Metric {
    pub fn name(&self) -> &'static str {
        match self {
            Metric::Pearson => "pearson",
            Metric::NmTrace => "nm_trace",
            Metric::NmEntanglement => "nm_entanglement",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "pearson" => Some(Metric::Pearson),
            "nm_trace" => Some(Metric::NmTrace),
            "nm_entanglement" => Some(Metric::NmEntanglement),
            _ => None,
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Axis {
    pub name: String,
    pub values: Vec<f64>,
}

impl Axis {
    pub fn new(name: impl Into<String>, values: Vec<f64>) -> Self {
        Self {
            name: name.into(),
            values,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `n` evenly spaced points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n)
            .map(|k| {
                let f = k as f64 / (n - 1) as f64;
                // Exact endpoints; symmetric rounding in between.
                if k == n - 1 {
                    b
                } else {
                    a + (b - a) * f
                }
            })
            .map(|v| (v * 1e12).round() / 1e12)
            .collect(),
    }
}

/// Why a cell has no value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MissingReason {
    /// Pearson coefficient undefined (a constant window).
    UndefinedCorrelation,
    /// The simulation aborted; the message is kept.
    Numerical(String),
    /// Read back from a file that does not carry reasons.
    Unrecorded,
}

impl MissingReason {
    pub fn code(&self) -> &'static str {
        match self {
            MissingReason::UndefinedCorrelation => "undefined_correlation",
            MissingReason::Numerical(_) => "numerical_abort",
            MissingReason::Unrecorded => "unrecorded",
        }
    }
}

/// Two-parameter grid of a scalar metric. Cells are stored row by row, one
/// row per `y` value.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseDiagram {
    pub x: Axis,
    pub y: Axis,
    pub metric: Metric,
    cells: Vec<Option<f64>>,
    missing: Vec<(usize, usize, MissingReason)>,
    /// Cells outside the regime where the model's approximations are trusted.
    pub flagged: Vec<(usize, usize)>,
}

impl PhaseDiagram {
    pub fn new(x: Axis, y: Axis, metric: Metric) -> Self {
        let n = x.len() * y.len();
        Self {
            x,
            y,
            metric,
            cells: vec![None; n],
            missing: Vec::new(),
            flagged: Vec::new(),
        }
    }

    pub fn nx(&self) -> usize {
        self.x.len()
    }

    pub fn ny(&self) -> usize {
        self.y.len()
    }

    pub fn get(&self, ix: usize, iy: usize) -> Option<f64> {
        self.cells[iy * self.nx() + ix]
    }

    pub fn set(&mut self, ix: usize, iy: usize, v: Option<f64>) {
        let nx = self.nx();
        self.cells[iy * nx + ix] = v;
        self.missing.retain(|(a, b, _)| (*a, *b) != (ix, iy));
    }

    pub fn set_missing(&mut self, ix: usize, iy: usize, reason: MissingReason) {
        self.set(ix, iy, None);
        self.missing.push((ix, iy, reason));
    }

    /// Reason recorded for a missing cell; `Unrecorded` if none was given.
    pub fn missing_reason(&self, ix: usize, iy: usize) -> Option<MissingReason> {
        if self.get(ix, iy).is_some() {
            return None;
        }
        Some(
            self.missing
                .iter()
                .find(|(a, b, _)| (*a, *b) == (ix, iy))
                .map(|(_, _, r)| r.clone())
                .unwrap_or(MissingReason::Unrecorded),
        )
    }

    pub fn missing(&self) -> &[(usize, usize, MissingReason)] {
        &self.missing
    }

    pub fn cells(&self) -> &[Option<f64>] {
        &self.cells
    }

    /// Row `iy` as `(x, value)` pairs.
    pub fn row(&self, iy: usize) -> Vec<(f64, Option<f64>)> {
        (0..self.nx())
            .map(|ix| (self.x.values[ix], self.get(ix, iy)))
            .collect()
    }

    /// Defined cell values in storage order.
    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.cells.iter().filter_map(|c| *c)
    }

    pub fn map_values<F: Fn(f64) -> f64>(&mut self, f: F) {
        for c in self.cells.iter_mut().flatten() {
            *c = f(*c);
        }
    }

    pub fn count_missing(&self) -> usize {
        self.cells.iter().filter(|c| c.is_none()).count()
    }

    /// Checks axis sizes and the metric's value range.
    pub fn validate(&self) -> Result<()> {
        if self.cells.len() != self.nx() * self.ny() {
            return Err(Error::Dimension {
                expected: self.nx() * self.ny(),
                found: self.cells.len(),
            });
        }
        for v in self.values() {
            let ok = match self.metric {
                Metric::Pearson => (-1.0..=1.0).contains(&v),
                _ => v >= 0.0 && v.is_finite(),
            };
            if !ok {
                return Err(Error::Validation(format!(
                    "{} cell out of range: {v}",
                    self.metric
                )));
            }
        }
        Ok(())
    }
}

/// Linear-interpolated `x` where a row of the diagram changes sign, scanning
/// from low to high `x`. Missing cells break adjacency.
pub fn zero_crossing(row: &[(f64, Option<f64>)]) -> Option<f64> {
    row.windows(2).find_map(|w| match (w[0], w[1]) {
        ((x0, Some(a)), (x1, Some(b))) => {
            if a == 0.0 {
                Some(x0)
            } else if a * b < 0.0 {
                Some(x0 + (x1 - x0) * a / (a - b))
            } else {
                None
            }
        }
        _ => None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag() -> PhaseDiagram {
        PhaseDiagram::new(
            Axis::new("omega1", vec![0.9, 1.0, 1.1]),
            Axis::new("lambda", vec![0.05, 0.1]),
            Metric::Pearson,
        )
    }

    #[test]
    fn storage_and_reasons() {
        let mut d = diag();
        d.set(2, 1, Some(0.5));
        assert_eq!(d.get(2, 1), Some(0.5));
        assert_eq!(d.cells()[5], Some(0.5));
        d.set_missing(0, 0, MissingReason::UndefinedCorrelation);
        assert_eq!(
            d.missing_reason(0, 0),
            Some(MissingReason::UndefinedCorrelation)
        );
        assert_eq!(d.missing_reason(1, 0), Some(MissingReason::Unrecorded));
        assert_eq!(d.missing_reason(2, 1), None);
        d.set(0, 0, Some(0.1));
        assert!(d.missing().is_empty());
        d.validate().unwrap();
        d.set(1, 1, Some(1.5));
        assert!(d.validate().is_err());
    }

    #[test]
    fn crossing_interpolates() {
        let row = [(0.9, Some(-1.0)), (1.0, Some(-0.5)), (1.1, Some(0.5))];
        assert!((zero_crossing(&row).unwrap() - 1.05).abs() < 1e-12);
        let gap = [(0.9, Some(-1.0)), (1.0, None), (1.1, Some(0.5))];
        assert_eq!(zero_crossing(&gap), None);
    }

    #[test]
    fn linspace_endpoints() {
        let v = linspace(0.95, 1.05, 11);
        assert_eq!(v.len(), 11);
        assert_eq!(v[0], 0.95);
        assert_eq!(v[10], 1.05);
        assert_eq!(v[5], 1.0);
        assert_eq!(v[3], 0.98);
    }
}
