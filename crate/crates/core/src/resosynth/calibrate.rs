//! Fitting line lengths to a measured resonance pair.

use serde::Serialize;

use super::find_resonances;
use super::simplex::{minimize, SimplexOptions};
use crate::antmodel::AntennaGeometry;
use crate::error::{Error, Result};
use crate::rfcore::SeriesElement;

/// Objective at or below which a calibration is considered usable.
pub const ACCEPTABLE_OBJECTIVE: f64 = 1e-4;

/// Objective charged when a candidate predicts no resonance at all.
const PENALTY_NONE: f64 = 1e4;
/// Base objective when a candidate predicts only one resonance.
const PENALTY_ONE: f64 = 1e2;

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationOptions {
    /// Open-side length bounds in degrees at 1 GHz; scaled to the geometry's `f_ref`.
    pub theta_open_deg: (f64, f64),
    /// Short-side length bounds in degrees at 1 GHz.
    pub theta_short_deg: (f64, f64),
    pub feed_fraction: (f64, f64),
    /// Let `z0` float within these bounds instead of keeping the initial value.
    pub release_z0: Option<(f64, f64)>,
    pub max_iterations: usize,
    /// Stop once the objective drops below this.
    pub target: f64,
    /// Grid used to bracket predicted resonances.
    pub n_grid: usize,
}

impl Default for CalibrationOptions {
    fn default() -> Self {
        CalibrationOptions {
            theta_open_deg: (10.0, 170.0),
            theta_short_deg: (5.0, 90.0),
            feed_fraction: (0.05, 0.5),
            release_z0: None,
            max_iterations: 500,
            target: 1e-6,
            n_grid: 401,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationResult {
    pub geometry: AntennaGeometry,
    /// Sum of squared relative frequency errors at the fitted geometry.
    pub objective: f64,
    pub initial_objective: f64,
    pub iterations: usize,
    /// Resonances of the fitted geometry in the search window.
    pub predicted: Vec<f64>,
    /// Set when the best objective is above [`ACCEPTABLE_OBJECTIVE`].
    pub warning: Option<String>,
}

impl CalibrationResult {
    pub fn acceptable(&self) -> bool {
        self.warning.is_none()
    }
}

/// Fit the line lengths (and feed tap, and optionally `z0`) of `initial` so the
/// arm loaded with `element` resonates at `measured = (f1, f2)`.
///
/// The search is Nelder–Mead over the option box, started from the initial
/// geometry clamped into that box. Candidates predicting fewer than two
/// resonances are penalized rather than rejected. A poor fit is not an error:
/// the best point found is returned with a warning.
pub fn calibrate<E>(
    initial: &AntennaGeometry,
    element: &E,
    measured: (f64, f64),
    opts: &CalibrationOptions,
) -> Result<CalibrationResult>
where
    E: SeriesElement + ?Sized,
{
    initial.validate()?;
    let (f1, f2) = measured;
    if !(f1 > 0.0 && f2 > f1 && f2.is_finite()) {
        return Err(Error::domain(format!("measured resonances must satisfy 0 < f1 < f2, got {f1}, {f2}")));
    }
    let scale = initial.f_ref / 1e9;
    let mut bounds = vec![
        deg_bounds(opts.theta_open_deg, scale),
        deg_bounds(opts.theta_short_deg, scale),
        opts.feed_fraction,
    ];
    if let Some(z) = opts.release_z0 {
        bounds.push(z);
    }
    for (lo, hi) in &bounds {
        if !(lo < hi && lo.is_finite() && hi.is_finite()) {
            return Err(Error::domain(format!("empty calibration bound [{lo}, {hi}]")));
        }
    }

    let to_geom = |u: &[f64]| -> AntennaGeometry {
        let p: Vec<f64> = u.iter().zip(&bounds).map(|(t, (lo, hi))| lo + t * (hi - lo)).collect();
        let mut g = *initial;
        g.theta_open_ref = p[0];
        g.theta_short_ref = p[1];
        g.feed_fraction = p[2];
        if p.len() > 3 {
            g.z0 = p[3];
        }
        g
    };
    let mut start = vec![
        initial.theta_open_ref,
        initial.theta_short_ref,
        initial.feed_fraction,
    ];
    if opts.release_z0.is_some() {
        start.push(initial.z0);
    }
    let u0: Vec<f64> = start
        .iter()
        .zip(&bounds)
        .map(|(v, (lo, hi))| ((v - lo) / (hi - lo)).clamp(0.0, 1.0))
        .collect();

    let window = (0.5 * f1, 1.5 * f2);
    let objective = |g: &AntennaGeometry| -> f64 {
        match find_resonances(g, element, window.0, window.1, opts.n_grid) {
            Ok(roots) => pair_error(&roots, f1, f2),
            Err(_) => PENALTY_NONE,
        }
    };
    // Measured against the unclamped start so "no worse than the initial
    // guess" holds even when the start lies outside the box.
    let initial_objective = objective(initial);

    let simplex = SimplexOptions {
        initial_step: 0.05,
        max_iterations: opts.max_iterations,
        target: opts.target,
        ..SimplexOptions::default()
    };
    let out = if initial_objective < opts.target {
        None
    } else {
        Some(minimize(|u| objective(&to_geom(u)), &u0, &simplex))
    };

    let (geometry, value, iterations) = match out {
        Some(o) if o.value < initial_objective => (to_geom(&o.x), o.value, o.iterations),
        Some(o) => (*initial, initial_objective, o.iterations),
        None => (*initial, initial_objective, 0),
    };
    let predicted = find_resonances(&geometry, element, window.0, window.1, opts.n_grid)?;
    let warning = (value > ACCEPTABLE_OBJECTIVE).then(|| {
        let msg = format!(
            "calibration to {f1:.6e}/{f2:.6e} Hz stopped at objective {value:.3e} after {iterations} iterations"
        );
        log::warn!("{msg}");
        msg
    });
    Ok(CalibrationResult {
        geometry,
        objective: value,
        initial_objective,
        iterations,
        predicted,
        warning,
    })
}

fn deg_bounds((lo, hi): (f64, f64), scale: f64) -> (f64, f64) {
    ((lo * scale).to_radians(), (hi * scale).to_radians())
}

/// Smallest squared relative error over ordered pairs of predicted roots.
fn pair_error(roots: &[f64], f1: f64, f2: f64) -> f64 {
    let rel = |p: f64, m: f64| ((p - m) / m).powi(2);
    match roots.len() {
        0 => PENALTY_NONE,
        1 => PENALTY_ONE + rel(roots[0], f1).min(rel(roots[0], f2)),
        _ => {
            let mut best = f64::INFINITY;
            for (i, &a) in roots.iter().enumerate() {
                for &b in &roots[i + 1..] {
                    best = best.min(rel(a, f1) + rel(b, f2));
                }
            }
            best
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rfcore::ResonatorNetwork;

    fn net() -> ResonatorNetwork {
        ResonatorNetwork::default()
    }

    #[test]
    fn pair_error_picks_best_ordered_pair() {
        assert_eq!(pair_error(&[], 1.0, 2.0), PENALTY_NONE);
        assert!(pair_error(&[1.0], 1.0, 2.0) >= PENALTY_ONE);
        assert_eq!(pair_error(&[0.5, 1.0, 2.0, 3.0], 1.0, 2.0), 0.0);
    }

    #[test]
    fn own_prediction_is_a_fixed_point() {
        let g = AntennaGeometry::reference().with_end_load(crate::antmodel::EndLoad::Open);
        let roots = find_resonances(&g, &net(), 0.3e9, 4e9, 2001).unwrap();
        assert!(roots.len() >= 2);
        let r = calibrate(&g, &net(), (roots[0], roots[1]), &CalibrationOptions::default()).unwrap();
        assert_eq!(r.iterations, 0);
        assert!(r.objective < 1e-12);
        assert_eq!(r.geometry, g);
    }

    #[test]
    fn fits_reference_targets_from_a_rough_start() {
        let mut g = AntennaGeometry::reference();
        g.theta_open_ref = 45f64.to_radians();
        g.theta_short_ref = 25f64.to_radians();
        let r = calibrate(&g, &net(), (844e6, 1575e6), &CalibrationOptions::default()).unwrap();
        assert!(r.objective < ACCEPTABLE_OBJECTIVE, "{r:?}");
        assert!(r.acceptable());
        assert!(r.objective <= r.initial_objective);
        assert_eq!(r.geometry.z0, g.z0);
    }

    #[test]
    fn unreachable_targets_warn() {
        let g = AntennaGeometry::reference();
        let r = calibrate(&g, &net(), (0.3e9, 3e9), &CalibrationOptions::default()).unwrap();
        assert!(r.warning.is_some());
        assert!(r.objective.is_finite());
        assert!(r.objective <= r.initial_objective);
    }

    #[test]
    fn released_z0_stays_in_bounds() {
        let mut g = AntennaGeometry::reference();
        g.theta_open_ref = 50f64.to_radians();
        let opts = CalibrationOptions {
            release_z0: Some((100.0, 300.0)),
            max_iterations: 60,
            ..CalibrationOptions::default()
        };
        let r = calibrate(&g, &net(), (844e6, 1575e6), &opts).unwrap();
        assert!((100.0..=300.0).contains(&r.geometry.z0));
        assert!(r.objective <= r.initial_objective);
    }

    #[test]
    fn rejects_unordered_targets() {
        let g = AntennaGeometry::reference();
        assert!(calibrate(&g, &net(), (2e9, 1e9), &CalibrationOptions::default()).is_err());
    }
}
