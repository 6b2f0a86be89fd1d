//! Dual-resonance analysis and synthesis.
//!
//! The arm resonates where the series element exactly makes up the impedance
//! difference between the two line sections it joins:
//!
//! ```text
//! Z_LC(f) = Z_s(f) − Z_open(f)
//! ```
//!
//! `Z_s` here is the short-side impedance referred to a current flowing toward
//! the open end, i.e. the negative of [`impedance_toward_short`]. With that
//! convention a plain through-connection resonates where the arm is a quarter
//! wave long, and the resonance condition is the familiar
//! `Z_short + Z_LC + Z_open = 0` around the loop.
//!
//! [`find_resonances`] solves this condition on a frequency band,
//! [`synthesize_lc`] inverts it for a pair of target frequencies, and
//! [`calibrate`] fits the line lengths of a geometry to measured resonances.

mod calibrate;
mod simplex;
mod synth;

use std::f64::consts::FRAC_PI_2;

pub use calibrate::{calibrate, CalibrationOptions, CalibrationResult, ACCEPTABLE_OBJECTIVE};
pub use simplex::{minimize, SimplexOptions, SimplexOutcome};
pub use synth::{
    synthesize_lc, SynthesisMethod, SynthesisMode, SynthesisResult, NEWTON_MAX_ITERATIONS, REACTIVE_TOLERANCE,
};

use crate::antmodel::{impedance_toward_open, impedance_toward_short, linear_grid, AntennaGeometry};
use crate::error::{Error, Result};
use crate::rfcore::{clip_pole, Impedance, SeriesElement};

/// Relative bracket width at which bisection stops.
pub const BISECTION_REL_TOL: f64 = 1e-9;

/// Grid points closer than this (relative) to the series element's pole are
/// skipped while bracketing.
pub const POLE_EXCLUSION: f64 = 1e-3;

/// Smallest grid accepted by [`find_resonances`].
pub const MIN_GRID: usize = 16;

/// Series impedance the resonator must present for the arm to resonate at `f`:
/// `Z_s − Z_open = −(Z_short + Z_open)`.
pub fn required_series_impedance(geom: &AntennaGeometry, f: f64) -> Result<Impedance> {
    let z_short = impedance_toward_short(geom, f)?;
    let z_open = impedance_toward_open(geom, f)?;
    Ok(clip_pole(-z_short - z_open))
}

/// `Z_LC(f) − (Z_s(f) − Z_open(f))`; zero at a resonance of the loaded arm.
pub fn resonance_residual<E>(geom: &AntennaGeometry, element: &E, f: f64) -> Result<Impedance>
where
    E: SeriesElement + ?Sized,
{
    let z_lc = element.series_impedance(f)?;
    Ok(clip_pole(z_lc - required_series_impedance(geom, f)?))
}

/// Resonant frequencies of the arm in `[f_start, f_stop]`, ascending.
///
/// The grid is scanned for sign changes of `Im(residual)`. Each bracket is
/// bisected down to [`BISECTION_REL_TOL`]. A sign change caused by a pole
/// bisects onto the pole, where `|Im(residual)|` exceeds both bracket ends;
/// such candidates are dropped. The real part is left out of the
/// test because a lossy end load keeps it away from zero at a true root.
pub fn find_resonances<E>(
    geom: &AntennaGeometry,
    element: &E,
    f_start: f64,
    f_stop: f64,
    n_grid: usize,
) -> Result<Vec<f64>>
where
    E: SeriesElement + ?Sized,
{
    geom.validate()?;
    if n_grid < MIN_GRID {
        return Err(Error::domain(format!("resonance grid needs at least {MIN_GRID} points, got {n_grid}")));
    }
    let pole = element.pole_hz();
    let grid: Vec<f64> = linear_grid(f_start, f_stop, n_grid)?
        .into_iter()
        .filter(|&f| pole.is_none_or(|p| ((f - p) / p).abs() >= POLE_EXCLUSION))
        .collect();

    let samples = grid
        .iter()
        .map(|&f| resonance_residual(geom, element, f).map(|r| (f, r)))
        .collect::<Result<Vec<_>>>()?;

    let mut roots = Vec::new();
    for pair in samples.windows(2) {
        let (fa, ra) = pair[0];
        let (fb, rb) = pair[1];
        if (ra.im < 0.0) == (rb.im < 0.0) {
            continue;
        }
        let root = bisect(geom, element, fa, fb, ra.im < 0.0)?;
        let at_root = resonance_residual(geom, element, root)?.im.abs();
        if at_root < ra.im.abs().max(rb.im.abs()) {
            roots.push(root);
        }
    }
    Ok(roots)
}

fn bisect<E>(geom: &AntennaGeometry, element: &E, mut lo: f64, mut hi: f64, lo_negative: bool) -> Result<f64>
where
    E: SeriesElement + ?Sized,
{
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= BISECTION_REL_TOL * mid {
            return Ok(mid);
        }
        let im = resonance_residual(geom, element, mid)?.im;
        if im == 0.0 {
            return Ok(mid);
        }
        if (im < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Electrical length the series element adds to the arm, `arctan(X/z0)`.
///
/// Positive while the element is inductive, negative while capacitive. At the
/// pole of a parallel tank the reactance is clipped on the positive side, so
/// the value there approaches `+π/2`.
pub fn effective_electrical_length<E>(element: &E, f: f64, z0: f64) -> Result<f64>
where
    E: SeriesElement + ?Sized,
{
    if !(z0 > 0.0) {
        return Err(Error::domain(format!("z0 must be positive, got {z0}")));
    }
    let x = element.series_impedance(f)?.im;
    Ok((x / z0).atan())
}

/// Defect of the quarter-wave condition at `f`, in radians:
/// `θ_open(f) + θ_short(f) + θ_LC(f) − π/2`.
pub fn quarter_wave_residual<E>(geom: &AntennaGeometry, element: &E, f: f64) -> Result<f64>
where
    E: SeriesElement + ?Sized,
{
    let lc = effective_electrical_length(element, f, geom.z0)?;
    Ok(geom.theta_open(f) + geom.theta_short(f) + lc - FRAC_PI_2)
}
