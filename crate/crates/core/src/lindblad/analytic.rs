use super::spectrum::{doublet, outer, DerivedSpectrum, DOWN_DOWN};
use crate::error::{Error, Result};
use crate::qcore::{c64, CMatrix, DensityMatrix, C64};
use std::f64::consts::PI;

/// Coherence coefficient of the reduced `s1` state,
/// `cos^2(theta) e^{-i f1 t - Gt1 t/2} + sin^2(theta) e^{-i f2 t - Gt2 t/2}`
/// with `f1, f2` the transition frequencies of the two quasi-particle modes.
pub fn analytic_q(t: f64, spec: &DerivedSpectrum) -> C64 {
    let (c2, s2) = (spec.cos2(), spec.sin2());
    mode(t, spec.freq1, spec.gt1) * c2 + mode(t, spec.freq2, spec.gt2) * s2
}

fn mode(t: f64, freq: f64, rate: f64) -> C64 {
    C64::from_polar((-0.5 * rate * t).exp(), -freq * t)
}

/// Excited-population coefficient; identically `|q|^2`.
pub fn analytic_p(t: f64, spec: &DerivedSpectrum) -> f64 {
    let (c2, s2) = (spec.cos2(), spec.sin2());
    let cross = 2.0
        * c2
        * s2
        * ((spec.freq1 - spec.freq2) * t).cos()
        * (-0.5 * (spec.gt1 + spec.gt2) * t).exp();
    c2 * c2 * (-spec.gt1 * t).exp() + s2 * s2 * (-spec.gt2 * t).exp() + cross
}

/// Trace distance between the evolved pair, `|q(t)|`.
pub fn analytic_trace_distance(t: f64, spec: &DerivedSpectrum) -> f64 {
    analytic_p(t, spec).max(0.0).sqrt().min(1.0)
}

/// Reduced `s1` state for the initial `(|0> + sign |1>)/sqrt 2`.
pub fn analytic_reduced_pair(t: f64, spec: &DerivedSpectrum, sign: f64) -> DensityMatrix {
    let q = analytic_q(t, spec) * sign;
    let p = analytic_p(t, spec);
    let m = CMatrix::from_row_slice(
        2,
        2,
        &[
            c64(p / 2.0, 0.0),
            q * 0.5,
            q.conj() * 0.5,
            c64(1.0 - p / 2.0, 0.0),
        ],
    );
    DensityMatrix::from_trusted(m, vec!["s1".into()])
}

/// Full two-qubit state for the initial `(|0> + sign |1>)/sqrt 2 (x) |1>`.
pub fn analytic_full_state(t: f64, spec: &DerivedSpectrum, sign: f64) -> DensityMatrix {
    let (s, c) = spec.theta.sin_cos();
    let (th, perp) = doublet(spec.theta);
    let mut vac = vec![c64(0.0, 0.0); 4];
    vac[DOWN_DOWN] = c64(1.0, 0.0);

    let r_tt = 0.5 * c * c * (-spec.gt1 * t).exp();
    let r_pp = 0.5 * s * s * (-spec.gt2 * t).exp();
    let r_tp = mode(t, spec.freq1 - spec.freq2, spec.gt1 + spec.gt2) * (-0.5 * c * s);
    let r_tv = mode(t, spec.freq1, spec.gt1) * (0.5 * sign * c);
    let r_pv = mode(t, spec.freq2, spec.gt2) * (-0.5 * sign * s);

    let basis = [&th, &perp, &vac];
    let coeff = [
        [c64(r_tt, 0.0), r_tp, r_tv],
        [r_tp.conj(), c64(r_pp, 0.0), r_pv],
        [r_tv.conj(), r_pv.conj(), c64(1.0 - r_tt - r_pp, 0.0)],
    ];
    let mut m = CMatrix::zeros(4, 4);
    for (i, a) in basis.iter().enumerate() {
        for (j, b) in basis.iter().enumerate() {
            m += outer(a, b) * coeff[i][j];
        }
    }
    DensityMatrix::from_trusted(m, vec!["s1".into(), "s2".into()])
}

/// Candidate revival maxima `2k pi / R` and minima `(2k - 1) pi / R`.
#[derive(Clone, Debug, PartialEq)]
pub struct Extrema {
    pub maxima: Vec<f64>,
    pub minima: Vec<f64>,
}

pub fn extrema_times(spec: &DerivedSpectrum, t_max: f64) -> Result<Extrema> {
    if !(spec.r > 0.0) {
        return Err(Error::DegenerateSpectrum(
            "R = 0 (lambda = 0 at resonance); no revivals".into(),
        ));
    }
    let limit = t_max * (1.0 + 1e-12);
    let mut maxima = Vec::new();
    let mut minima = Vec::new();
    for k in 1.. {
        let tmin = (2 * k - 1) as f64 * PI / spec.r;
        if tmin > limit {
            break;
        }
        minima.push(tmin);
        let tmax = 2.0 * k as f64 * PI / spec.r;
        if tmax <= limit {
            maxima.push(tmax);
        }
    }
    Ok(Extrema { maxima, minima })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lindblad::integrate::{integrate, IntegrationOptions};
    use crate::lindblad::pair::{evolve_pair_states, pair_initial_states};
    use crate::lindblad::rhs::Liouvillian;
    use crate::lindblad::spectrum::{derive_spectrum, SystemParams};
    use crate::qcore::partial_trace;
    use approx::assert_abs_diff_eq;

    fn max_diff(a: &CMatrix, b: &CMatrix) -> f64 {
        a.iter()
            .zip(b.iter())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn starts_at_one() {
        for &(w1, l) in &[(1.05, 0.05), (0.6, 0.1), (1.0, 0.02)] {
            let spec = derive_spectrum(&SystemParams::flat(w1, l, 0.01)).unwrap();
            assert_abs_diff_eq!(analytic_q(0.0, &spec).re, 1.0, epsilon = 1e-15);
            assert_abs_diff_eq!(analytic_p(0.0, &spec), 1.0, epsilon = 1e-15);
            assert_abs_diff_eq!(analytic_trace_distance(0.0, &spec), 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn p_is_modulus_squared_of_q() {
        for &(w1, l) in &[(1.05, 0.05), (0.6, 0.1), (1.5, 0.25), (1.0, 0.07)] {
            let spec = derive_spectrum(&SystemParams::flat(w1, l, 0.01)).unwrap();
            for k in 0..200 {
                let t = k as f64 * 2.7;
                let q = analytic_q(t, &spec);
                assert!((analytic_p(t, &spec) - q.norm_sqr()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn resonance_closed_form() {
        let spec = derive_spectrum(&SystemParams::flat(1.0, 0.08, 0.01)).unwrap();
        for k in 0..20 {
            let t = 0.37 + 13.1 * k as f64;
            let expect = (-0.01 * t / 4.0).exp() * (spec.r * t / 2.0).cos().abs();
            assert_abs_diff_eq!(analytic_trace_distance(t, &spec), expect, epsilon = 1e-12);
        }
    }

    #[test]
    fn uncoupled_distance_is_monotone() {
        let spec = derive_spectrum(&SystemParams::flat(1.3, 0.0, 0.01)).unwrap();
        let mut prev = analytic_trace_distance(0.0, &spec);
        for k in 1..5000 {
            let d = analytic_trace_distance(k as f64 * 0.1, &spec);
            assert!(d <= prev);
            prev = d;
        }
    }

    #[test]
    fn revival_points_at_resonance() {
        let spec = derive_spectrum(&SystemParams::flat(1.0, 0.05, 0.01)).unwrap();
        let d = |t: f64| analytic_trace_distance(t, &spec);
        let tmin = PI / spec.r;
        let h = 1e-3;
        assert!(d(tmin) < 1e-12);
        assert!(d(tmin) < d(tmin - h) && d(tmin) < d(tmin + h));
        // Decay pulls the revival peak earlier by about Gamma / R^2.
        let tmax = 2.0 * PI / spec.r;
        let shift = 0.01 / (spec.r * spec.r);
        let located = (0..=4000)
            .map(|k| tmax - 2.0 * shift + k as f64 * shift / 1000.0)
            .max_by(|a, b| d(*a).total_cmp(&d(*b)))
            .unwrap();
        assert!(
            (located - (tmax - shift)).abs() < 0.05 * shift,
            "{located} vs {tmax}"
        );
        assert!(d(located) > d(located - 0.5) && d(located) > d(located + 0.5));
    }

    #[test]
    fn extrema_formula() {
        let mut spec = derive_spectrum(&SystemParams::flat(1.0, 0.1, 0.01)).unwrap();
        spec.r = PI;
        let e = extrema_times(&spec, 10.0).unwrap();
        assert_eq!(e.maxima.len(), 5);
        assert_eq!(e.minima.len(), 5);
        for (k, t) in e.maxima.iter().enumerate() {
            assert_abs_diff_eq!(*t, 2.0 * (k + 1) as f64, epsilon = 1e-12);
        }
        for (k, t) in e.minima.iter().enumerate() {
            assert_abs_diff_eq!(*t, 2.0 * k as f64 + 1.0, epsilon = 1e-12);
        }
        let short = extrema_times(&spec, 1.5).unwrap();
        assert!(short.maxima.is_empty());
        assert_eq!(short.minima.len(), 1);
    }

    #[test]
    fn degenerate_spectrum_is_rejected() {
        let spec = derive_spectrum(&SystemParams::flat(1.0, 0.0, 0.01)).unwrap();
        assert!(matches!(
            extrema_times(&spec, 10.0),
            Err(Error::DegenerateSpectrum(_))
        ));
    }

    #[test]
    fn full_state_traces_to_reduced_state() {
        let spec = derive_spectrum(&SystemParams::flat(1.0 + 0.5, 0.25, 0.01)).unwrap();
        assert_abs_diff_eq!(spec.theta, PI / 8.0, epsilon = 1e-15);
        for sign in [1.0, -1.0] {
            let full = analytic_full_state(1.0, &spec, sign);
            full.check(1e-12).unwrap();
            let red = partial_trace(&full, &["s1"]).unwrap();
            let expect = analytic_reduced_pair(1.0, &spec, sign);
            assert!(max_diff(red.entries(), expect.entries()) < 1e-14);
        }
    }

    #[test]
    fn full_state_matches_integration() {
        for &(w1, l) in &[(1.5, 0.25), (0.8, 0.05), (1.0, 0.1)] {
            let spec = derive_spectrum(&SystemParams::flat(w1, l, 0.02)).unwrap();
            let lv = Liouvillian::master_equation(&spec, 0.0);
            let (plus, minus) = pair_initial_states();
            let opts = IntegrationOptions {
                t_end: 60.0,
                step: 0.01,
                sample_stride: 100,
            };
            for (rho0, sign) in [(plus, 1.0), (minus, -1.0)] {
                let traj = integrate(&lv, &rho0, &opts).unwrap();
                for (t, rho) in traj.times.iter().zip(&traj.states) {
                    let exact = analytic_full_state(*t, &spec, sign);
                    assert!(
                        max_diff(rho.entries(), exact.entries()) < 1e-6,
                        "w1 {w1} t = {t}"
                    );
                }
            }
        }
    }

    #[test]
    fn numeric_distance_tracks_analytic() {
        let spec = derive_spectrum(&SystemParams::flat(1.1, 0.05, 0.01)).unwrap();
        let pair = evolve_pair_states(&spec, 0.0, &IntegrationOptions::default()).unwrap();
        let worst = pair
            .times
            .iter()
            .zip(&pair.distances)
            .map(|(t, d)| (d - analytic_trace_distance(*t, &spec)).abs())
            .fold(0.0, f64::max);
        assert!(worst <= 1e-3, "{worst}");
        assert!(pair.distances.iter().all(|d| *d <= 1.0));
    }
}
