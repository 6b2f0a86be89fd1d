//! Choosing `L` and `C` so the arm resonates at two given frequencies.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::{required_series_impedance, resonance_residual};
use crate::antmodel::AntennaGeometry;
use crate::error::{Error, Result};
use crate::rfcore::{is_pole, LcTank};

/// Largest resistive part of the required series impedance, as a fraction of
/// `z0`, that synthesis will ignore. A lossless tank cannot supply it.
pub const REACTIVE_TOLERANCE: f64 = 0.25;

/// Newton iterations before the numeric solver gives up.
pub const NEWTON_MAX_ITERATIONS: usize = 200;

/// Residual target of the numeric solver, as a fraction of `z0`.
const RESIDUAL_TOL: f64 = 1e-6;

/// Imaginary residue tolerated in the closed-form `L` and `C` (relative).
const REALITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SynthesisMode {
    ClosedForm,
    Numeric,
    /// Closed form, falling back to the numeric solver when the closed-form
    /// values do not actually resonate at both targets.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SynthesisMethod {
    ClosedForm,
    Numeric,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SynthesisResult {
    /// Henries.
    pub l: f64,
    /// Farads.
    pub c: f64,
    pub method: SynthesisMethod,
    /// |Im(resonance residual)| at `f1`, ohms.
    pub residual_f1: f64,
    /// |Im(resonance residual)| at `f2`, ohms.
    pub residual_f2: f64,
}

impl SynthesisResult {
    pub fn tank(&self) -> LcTank {
        LcTank { l: self.l, c: self.c }
    }
}

/// Parallel `L`, `C` that make the arm resonate at both `f1` and `f2`.
///
/// Only the reactive part of the required series impedance is matched. A
/// target whose required impedance has a resistive part above
/// [`REACTIVE_TOLERANCE`]·`z0` is rejected as infeasible.
///
/// The closed form solves the two-frequency conditions in complex arithmetic:
///
/// ```text
/// L = −3j/(4π f1) · Z(f2)·Z(f1) / (2·Z(f2) − Z(f1))
/// C = −j/(2π f1) · (1/Z(f1) − 1/(j·2π f1·L))
/// ```
///
/// and is exact only for `f2 = 2·f1`. The numeric solver runs damped Newton on
/// `(ln L, ln C)` and is exact for any ratio.
pub fn synthesize_lc(geom: &AntennaGeometry, f1: f64, f2: f64, mode: SynthesisMode) -> Result<SynthesisResult> {
    geom.validate()?;
    if !(f1 > 0.0 && f1.is_finite()) {
        return Err(Error::domain(format!("f1 must be positive, got {f1}")));
    }
    if !(f2 > f1 && f2.is_finite()) {
        return Err(Error::domain(format!("need f1 < f2, got f1={f1}, f2={f2}")));
    }
    let x1 = required_reactance(geom, f1)?;
    let x2 = required_reactance(geom, f2)?;
    let targets = Targets { f1, f2, x1, x2 };

    match mode {
        SynthesisMode::ClosedForm => {
            let (l, c) = closed_form(&targets)?;
            finish(geom, &targets, l, c, SynthesisMethod::ClosedForm)
        }
        SynthesisMode::Numeric => {
            let seed = closed_form(&targets).ok();
            let (l, c) = newton(geom.z0, &targets, seed)?;
            finish(geom, &targets, l, c, SynthesisMethod::Numeric)
        }
        SynthesisMode::Auto => {
            let seed = closed_form(&targets).ok();
            if let Some((l, c)) = seed {
                let r = finish(geom, &targets, l, c, SynthesisMethod::ClosedForm)?;
                let tol = RESIDUAL_TOL * geom.z0;
                if r.residual_f1 < tol && r.residual_f2 < tol {
                    return Ok(r);
                }
                log::debug!(
                    "closed form off by {:.3e}/{:.3e} ohm, switching to Newton",
                    r.residual_f1,
                    r.residual_f2
                );
            }
            let (l, c) = newton(geom.z0, &targets, seed)?;
            finish(geom, &targets, l, c, SynthesisMethod::Numeric)
        }
    }
}

struct Targets {
    f1: f64,
    f2: f64,
    x1: f64,
    x2: f64,
}

fn required_reactance(geom: &AntennaGeometry, f: f64) -> Result<f64> {
    let z = required_series_impedance(geom, f)?;
    if is_pole(z) {
        return Err(Error::InfeasibleTarget {
            freq_hz: f,
            reason: "required series impedance is a pole".into(),
        });
    }
    if z.re.abs() > REACTIVE_TOLERANCE * geom.z0 {
        return Err(Error::InfeasibleTarget {
            freq_hz: f,
            reason: format!(
                "required series impedance {:.3}{:+.3}j ohm has a resistive part above {:.3} ohm",
                z.re,
                z.im,
                REACTIVE_TOLERANCE * geom.z0
            ),
        });
    }
    if z.im == 0.0 {
        return Err(Error::InfeasibleTarget {
            freq_hz: f,
            reason: "required series reactance is zero".into(),
        });
    }
    Ok(z.im)
}

fn closed_form(t: &Targets) -> Result<(f64, f64)> {
    let j = Complex64::i();
    let z1 = Complex64::new(0.0, t.x1);
    let z2 = Complex64::new(0.0, t.x2);
    let w1 = 2.0 * PI * t.f1;
    let l = -3.0 * j / (4.0 * PI * t.f1) * z2 * z1 / (2.0 * z2 - z1);
    let c = -j / w1 * (1.0 / z1 - 1.0 / (j * w1 * l));
    let real = |v: Complex64| v.im.abs() <= REALITY_TOL * v.re.abs();
    if !(l.re.is_finite() && c.re.is_finite() && real(l) && real(c)) {
        return Err(Error::InfeasibleTarget {
            freq_hz: t.f1,
            reason: "closed form does not yield real component values".into(),
        });
    }
    if !(l.re > 0.0 && c.re > 0.0) {
        return Err(Error::InfeasibleTarget {
            freq_hz: t.f1,
            reason: format!("closed form gives L={:.4e} H, C={:.4e} F", l.re, c.re),
        });
    }
    Ok((l.re, c.re))
}

fn tank_reactance(l: f64, c: f64, f: f64) -> f64 {
    let w = 2.0 * PI * f;
    w * l / (1.0 - w * w * l * c)
}

/// Damped Newton on `(ln L, ln C)`.
///
/// The equations are written in susceptance form,
/// `ωC − 1/(ωL) = −1/X`, which is smooth in both unknowns and free of the
/// tank pole; convergence is still judged on the reactance residual.
fn newton(z0: f64, t: &Targets, seed: Option<(f64, f64)>) -> Result<(f64, f64)> {
    let (l0, c0) = seed.unwrap_or((10e-9, 1e-12));
    let mut u = [l0.ln(), c0.ln()];
    let freqs = [t.f1, t.f2];
    let b_target = [-1.0 / t.x1, -1.0 / t.x2];

    let eval = |u: &[f64; 2]| -> [f64; 2] {
        let (l, c) = (u[0].exp(), u[1].exp());
        let mut out = [0.0; 2];
        for k in 0..2 {
            let w = 2.0 * PI * freqs[k];
            out[k] = z0 * (w * c - 1.0 / (w * l) - b_target[k]);
        }
        out
    };
    let norm = |v: &[f64; 2]| v[0].hypot(v[1]);
    let converged = |u: &[f64; 2]| {
        let (l, c) = (u[0].exp(), u[1].exp());
        (tank_reactance(l, c, t.f1) - t.x1).abs() < RESIDUAL_TOL * z0
            && (tank_reactance(l, c, t.f2) - t.x2).abs() < RESIDUAL_TOL * z0
    };

    let mut f = eval(&u);
    for _ in 0..NEWTON_MAX_ITERATIONS {
        if converged(&u) {
            return Ok((u[0].exp(), u[1].exp()));
        }
        let (l, c) = (u[0].exp(), u[1].exp());
        // d/d(ln L) [−1/(ωL)] = 1/(ωL);  d/d(ln C) [ωC] = ωC
        let mut jac = [[0.0; 2]; 2];
        for k in 0..2 {
            let w = 2.0 * PI * freqs[k];
            jac[k] = [z0 / (w * l), z0 * w * c];
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let mut step = [
            -(jac[1][1] * f[0] - jac[0][1] * f[1]) / det,
            -(-jac[1][0] * f[0] + jac[0][0] * f[1]) / det,
        ];
        let len = step[0].hypot(step[1]);
        if len > 2.0 {
            step = [step[0] * 2.0 / len, step[1] * 2.0 / len];
        }
        let base = norm(&f);
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let trial = [u[0] + lambda * step[0], u[1] + lambda * step[1]];
            let ft = eval(&trial);
            if norm(&ft) < base || converged(&trial) {
                u = trial;
                f = ft;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if converged(&u) {
        return Ok((u[0].exp(), u[1].exp()));
    }
    Err(Error::Convergence {
        iterations: NEWTON_MAX_ITERATIONS,
        reason: format!(
            "Newton stalled at L={:.4e} H, C={:.4e} F for targets {:.6e}/{:.6e} Hz",
            u[0].exp(),
            u[1].exp(),
            t.f1,
            t.f2
        ),
    })
}

fn finish(geom: &AntennaGeometry, t: &Targets, l: f64, c: f64, method: SynthesisMethod) -> Result<SynthesisResult> {
    let tank = LcTank::new(l, c)?;
    let r1 = resonance_residual(geom, &tank, t.f1)?.im.abs();
    let r2 = resonance_residual(geom, &tank, t.f2)?.im.abs();
    Ok(SynthesisResult {
        l,
        c,
        method,
        residual_f1: r1,
        residual_f2: r2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::antmodel::EndLoad;
    use crate::resosynth::find_resonances;
    use approx::assert_relative_eq;

    /// Independent route: the two conditions are linear in (1/L, C).
    fn linear_oracle(geom: &AntennaGeometry, f1: f64, f2: f64) -> (f64, f64) {
        let x = |f: f64| required_series_impedance(geom, f).unwrap().im;
        let (w1, w2) = (2.0 * PI * f1, 2.0 * PI * f2);
        let (b1, b2) = (-1.0 / x(f1), -1.0 / x(f2));
        // w C − a/w = b  for a = 1/L
        let c = (b2 * w2 - b1 * w1) / (w2 * w2 - w1 * w1);
        let a = w1 * w1 * c - b1 * w1;
        (1.0 / a, c)
    }

    fn open_geom() -> AntennaGeometry {
        AntennaGeometry::new(50.0, 0.4, 0.8, 1e9).unwrap()
    }

    #[test]
    fn numeric_matches_linear_oracle() {
        let g = open_geom();
        for (f1, f2) in [(0.8e9, 1.4e9), (0.7e9, 1.9e9), (0.6e9, 1.8e9)] {
            let (lo, co) = linear_oracle(&g, f1, f2);
            let r = synthesize_lc(&g, f1, f2, SynthesisMode::Numeric).unwrap();
            assert_relative_eq!(r.l, lo, max_relative = 1e-8);
            assert_relative_eq!(r.c, co, max_relative = 1e-8);
            assert!(r.residual_f1 < 1e-6 * g.z0 && r.residual_f2 < 1e-6 * g.z0);
        }
    }

    #[test]
    fn closed_form_exact_at_ratio_two() {
        let g = open_geom();
        let (f1, f2) = (0.8e9, 1.6e9);
        let (lo, co) = linear_oracle(&g, f1, f2);
        let cf = synthesize_lc(&g, f1, f2, SynthesisMode::ClosedForm).unwrap();
        let nm = synthesize_lc(&g, f1, f2, SynthesisMode::Numeric).unwrap();
        assert_relative_eq!(cf.l, lo, max_relative = 1e-9);
        assert_relative_eq!(cf.c, co, max_relative = 1e-9);
        assert_relative_eq!(cf.l, nm.l, max_relative = 0.01);
        assert_relative_eq!(cf.c, nm.c, max_relative = 0.01);
        let auto = synthesize_lc(&g, f1, f2, SynthesisMode::Auto).unwrap();
        assert_eq!(auto.method, SynthesisMethod::ClosedForm);
    }

    #[test]
    fn auto_falls_back_away_from_ratio_two() {
        let g = open_geom();
        let r = synthesize_lc(&g, 0.8e9, 1.4e9, SynthesisMode::Auto).unwrap();
        assert_eq!(r.method, SynthesisMethod::Numeric);
        assert!(r.residual_f1 < 1e-6 * g.z0);
    }

    #[test]
    fn round_trip_through_resonance_finder() {
        let g = open_geom();
        let (f1, f2) = (0.75e9, 1.7e9);
        let r = synthesize_lc(&g, f1, f2, SynthesisMode::Numeric).unwrap();
        let roots = find_resonances(&g, &r.tank(), 0.5 * f1, 1.5 * f2, 2001).unwrap();
        for target in [f1, f2] {
            assert!(roots.iter().any(|f| ((f - target) / target).abs() < 1e-3), "{roots:?}");
        }
    }

    #[test]
    fn reference_geometry_ratio_two_agrees() {
        let g = AntennaGeometry::reference();
        let cf = synthesize_lc(&g, 0.9e9, 1.8e9, SynthesisMode::ClosedForm).unwrap();
        let nm = synthesize_lc(&g, 0.9e9, 1.8e9, SynthesisMode::Numeric).unwrap();
        assert_relative_eq!(cf.l, nm.l, max_relative = 0.01);
        assert_relative_eq!(cf.c, nm.c, max_relative = 0.01);
    }

    #[test]
    fn equal_or_reversed_targets_rejected() {
        let g = open_geom();
        assert!(matches!(
            synthesize_lc(&g, 1e9, 1e9, SynthesisMode::Auto),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            synthesize_lc(&g, 1.2e9, 1e9, SynthesisMode::Numeric),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn resistive_requirement_is_infeasible() {
        let g = AntennaGeometry::new(50.0, 0.4, 0.8, 1e9)
            .unwrap()
            .with_end_load(EndLoad::Impedance(Complex64::new(50.0, 0.0)));
        match synthesize_lc(&g, 0.8e9, 1.6e9, SynthesisMode::Auto) {
            Err(Error::InfeasibleTarget { freq_hz, .. }) => assert_eq!(freq_hz, 0.8e9),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unreachable_pair_fails_cleanly() {
        // Both targets below the quarter-wave frequency need an inductive
        // element at both; with f2 inductance larger than allowed by a tank
        // there is no positive (L, C).
        let g = open_geom();
        let fq = g.quarter_wave_hz();
        let err = synthesize_lc(&g, 0.3 * fq, 0.9 * fq, SynthesisMode::Numeric);
        let (lo, co) = linear_oracle(&g, 0.3 * fq, 0.9 * fq);
        if lo > 0.0 && co > 0.0 {
            assert!(err.is_ok());
        } else {
            assert!(matches!(err, Err(Error::Convergence { .. })), "{err:?}");
        }
    }
}
