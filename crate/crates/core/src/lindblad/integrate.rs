use super::rhs::Generator;
use crate::error::{Error, Result};
use crate::qcore::{c64, check_state, CMatrix, DensityMatrix, C64};

/// Tolerance beyond which an integrated state is considered unphysical and
/// the run is aborted.
pub const INTEGRATION_TOL: f64 = 1e-7;

/// Fixed-step RK4 settings. Times are in units of `1/omega2`.
#[derive(Clone, Debug, PartialEq)]
pub struct IntegrationOptions {
    pub t_end: f64,
    pub step: f64,
    /// Record every `sample_stride`-th step.
    pub sample_stride: usize,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        Self {
            t_end: 500.0,
            step: 0.01,
            sample_stride: 10,
        }
    }
}

impl IntegrationOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0) || !self.step.is_finite() {
            return Err(Error::config("step", "must be > 0"));
        }
        if !(self.t_end >= 0.0) || !self.t_end.is_finite() {
            return Err(Error::config("t_end", "must be >= 0"));
        }
        if self.sample_stride == 0 {
            return Err(Error::config("sample_stride", "must be >= 1"));
        }
        Ok(())
    }

    pub fn n_steps(&self) -> usize {
        (self.t_end / self.step).round() as usize
    }

    /// Spacing of recorded samples.
    pub fn sample_dt(&self) -> f64 {
        self.step * self.sample_stride as f64
    }

    pub fn n_samples(&self) -> usize {
        self.n_steps() / self.sample_stride + 1
    }
}

/// Sampled trajectory `(t_k, rho(t_k))`.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
}

/// Integrates `d rho/dt = G(rho)` and hands every sample to `observe`.
///
/// Each step is re-symmetrized; samples failing the state invariants at
/// [`INTEGRATION_TOL`] abort with the offending step index.
pub fn integrate_with<G, F>(
    generator: &G,
    rho0: &DensityMatrix,
    opts: &IntegrationOptions,
    mut observe: F,
) -> Result<()>
where
    G: Generator + ?Sized,
    F: FnMut(f64, &DensityMatrix),
{
    opts.validate()?;
    let dim = generator.dim();
    if rho0.dim() != dim {
        return Err(Error::Dimension {
            expected: dim,
            found: rho0.dim(),
        });
    }
    let labels = rho0.labels().to_vec();
    let n = dim * dim;
    let h = opts.step;
    let zero = c64(0.0, 0.0);
    let mut y: Vec<C64> = rho0.entries().as_slice().to_vec();
    let mut k1 = vec![zero; n];
    let mut k2 = vec![zero; n];
    let mut k3 = vec![zero; n];
    let mut k4 = vec![zero; n];
    let mut tmp = vec![zero; n];

    let emit = |step: usize, y: &[C64], observe: &mut F| -> Result<()> {
        let m = CMatrix::from_column_slice(dim, dim, y);
        check_state(&m, INTEGRATION_TOL).map_err(|e| Error::InvariantViolation {
            step,
            detail: format!("{e} (step size {h} too large?)"),
        })?;
        observe(
            step as f64 * h,
            &DensityMatrix::from_trusted(m, labels.clone()),
        );
        Ok(())
    };

    emit(0, &y, &mut observe)?;
    for step in 1..=opts.n_steps() {
        generator.apply_into(&y, &mut k1);
        for i in 0..n {
            tmp[i] = y[i] + k1[i] * (0.5 * h);
        }
        generator.apply_into(&tmp, &mut k2);
        for i in 0..n {
            tmp[i] = y[i] + k2[i] * (0.5 * h);
        }
        generator.apply_into(&tmp, &mut k3);
        for i in 0..n {
            tmp[i] = y[i] + k3[i] * h;
        }
        generator.apply_into(&tmp, &mut k4);
        for i in 0..n {
            y[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
        }
        symmetrize_flat(&mut y, dim);
        if step % opts.sample_stride == 0 {
            emit(step, &y, &mut observe)?;
        }
    }
    Ok(())
}

fn symmetrize_flat(y: &mut [C64], dim: usize) {
    // Column-major: entry (i, j) lives at j * dim + i.
    for i in 0..dim {
        let d = i * dim + i;
        y[d] = c64(y[d].re, 0.0);
        for j in (i + 1)..dim {
            let (a, b) = (j * dim + i, i * dim + j);
            let avg = (y[a] + y[b].conj()) * 0.5;
            y[a] = avg;
            y[b] = avg.conj();
        }
    }
}

/// Collects the full sampled trajectory.
pub fn integrate<G: Generator + ?Sized>(
    generator: &G,
    rho0: &DensityMatrix,
    opts: &IntegrationOptions,
) -> Result<Trajectory> {
    opts.validate()?;
    let mut traj = Trajectory {
        times: Vec::with_capacity(opts.n_samples()),
        states: Vec::with_capacity(opts.n_samples()),
    };
    integrate_with(generator, rho0, opts, |t, rho| {
        traj.times.push(t);
        traj.states.push(rho.clone());
    })?;
    Ok(traj)
}
