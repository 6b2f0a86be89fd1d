//! Transmission-line model of an inverted-F antenna with a series resonator.
//!
//! The radiating arm is two lossless lines of the same characteristic
//! impedance: one from the resonator to the open end (terminated in `z_end`),
//! one from the resonator to the grounded short. The feed taps the short-side
//! line at `feed_fraction` of its length, measured from the short.
//!
//! ```text
//!   short ──[ff·θs]── feed ──[(1-ff)·θs]── resonator ──[θo]── z_end
//! ```
//!
//! Electrical lengths are given at `f_ref` and scale linearly with frequency.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rfcore::{self, Impedance, SeriesElement, OPEN};

/// Reference impedance of the feed, used for S11.
pub const DEFAULT_Z_REF: f64 = 50.0;

/// Floor applied to return loss of a perfectly matched load.
pub const RETURN_LOSS_FLOOR_DB: f64 = -200.0;

/// Default number of points in a frequency sweep.
pub const DEFAULT_SWEEP_POINTS: usize = 2001;

/// Load at the open end of the arm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndLoad {
    Open,
    Impedance(Impedance),
}

impl EndLoad {
    pub fn impedance(&self) -> Impedance {
        match self {
            EndLoad::Open => OPEN,
            EndLoad::Impedance(z) => *z,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AntennaGeometry {
    /// Characteristic impedance of the arm, ohms.
    pub z0: f64,
    /// Electrical length from the resonator to the open end at `f_ref`, radians.
    pub theta_open_ref: f64,
    /// Electrical length from the resonator to the short at `f_ref`, radians.
    pub theta_short_ref: f64,
    pub f_ref: f64,
    pub z_end: EndLoad,
    /// Feed position along the short-side line: 0 at the short, 1 at the resonator.
    pub feed_fraction: f64,
}

impl AntennaGeometry {
    /// Open-ended arm fed at 15% of the short-side line.
    pub fn new(z0: f64, theta_open_ref: f64, theta_short_ref: f64, f_ref: f64) -> Result<Self> {
        let geom = AntennaGeometry {
            z0,
            theta_open_ref,
            theta_short_ref,
            f_ref,
            z_end: EndLoad::Open,
            feed_fraction: 0.15,
        };
        geom.validate()?;
        Ok(geom)
    }

    /// The reference antenna: line lengths fitted so that the 9.1 nH / 2 pF
    /// resonator resonates at 844 MHz and 1575 MHz, with an end load and feed
    /// tap chosen to give a −6 dB match in both bands over the whole 0–15 V
    /// bias range.
    pub fn reference() -> Self {
        AntennaGeometry {
            z0: 190.0,
            theta_open_ref: REFERENCE_THETA_OPEN_DEG.to_radians(),
            theta_short_ref: REFERENCE_THETA_SHORT_DEG.to_radians(),
            f_ref: 1e9,
            z_end: EndLoad::Impedance(Complex64::new(2000.0, -1250.0)),
            feed_fraction: 0.5,
        }
    }

    pub fn with_end_load(mut self, z_end: EndLoad) -> Self {
        self.z_end = z_end;
        self
    }

    pub fn with_feed_fraction(mut self, feed_fraction: f64) -> Self {
        self.feed_fraction = feed_fraction;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let checks = [
            ("z0", self.z0),
            ("theta_open_ref", self.theta_open_ref),
            ("theta_short_ref", self.theta_short_ref),
            ("f_ref", self.f_ref),
        ];
        for (name, v) in checks {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::domain(format!("{name} must be positive, got {v}")));
            }
        }
        if !(0.0..=1.0).contains(&self.feed_fraction) {
            return Err(Error::domain(format!(
                "feed_fraction must lie in [0, 1], got {}",
                self.feed_fraction
            )));
        }
        if let EndLoad::Impedance(z) = self.z_end {
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::domain("end load must be finite"));
            }
        }
        Ok(())
    }

    pub fn theta_open(&self, f: f64) -> f64 {
        self.theta_open_ref * f / self.f_ref
    }

    pub fn theta_short(&self, f: f64) -> f64 {
        self.theta_short_ref * f / self.f_ref
    }

    /// Frequency at which the two lines together are a quarter wave long.
    pub fn quarter_wave_hz(&self) -> f64 {
        0.5 * PI * self.f_ref / (self.theta_open_ref + self.theta_short_ref)
    }
}

/// Fitted open-side length of [`AntennaGeometry::reference`], degrees at 1 GHz.
pub const REFERENCE_THETA_OPEN_DEG: f64 = 58.014_385_44;
/// Fitted short-side length of [`AntennaGeometry::reference`], degrees at 1 GHz.
pub const REFERENCE_THETA_SHORT_DEG: f64 = 17.989_910_13;

fn check_freq(f: f64) -> Result<()> {
    if f > 0.0 && f.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("frequency must be positive, got {f}")))
    }
}

/// Impedance seen from the resonator looking toward the open end.
pub fn impedance_toward_open(geom: &AntennaGeometry, f: f64) -> Result<Impedance> {
    check_freq(f)?;
    rfcore::line_transform(geom.z0, geom.theta_open(f), geom.z_end.impedance())
}

/// Impedance seen from the resonator looking toward the shorted end.
pub fn impedance_toward_short(geom: &AntennaGeometry, f: f64) -> Result<Impedance> {
    check_freq(f)?;
    rfcore::shorted_stub_impedance(geom.z0, geom.theta_short(f))
}

/// Input impedance at the feed tap.
///
/// The shorted stub below the tap is in parallel with everything above it:
/// the remaining short-side line, terminated in the series element followed
/// by the open-side line.
pub fn input_impedance<E>(geom: &AntennaGeometry, element: &E, f: f64) -> Result<Impedance>
where
    E: SeriesElement + ?Sized,
{
    check_freq(f)?;
    let theta_s = geom.theta_short(f);
    let ff = geom.feed_fraction;
    let to_short = rfcore::shorted_stub_impedance(geom.z0, ff * theta_s)?;
    let beyond = rfcore::clip_pole(element.series_impedance(f)? + impedance_toward_open(geom, f)?);
    let to_open = rfcore::line_transform(geom.z0, (1.0 - ff) * theta_s, beyond)?;
    Ok(rfcore::parallel(to_short, to_open))
}

/// Reflection at the feed, in dB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReturnLoss {
    pub db: f64,
    /// Set when `z_in + z_ref` vanished and the reflection coefficient is
    /// undefined; `db` is then reported as 0.
    pub pole: bool,
}

/// `20·log10|Γ|`, `Γ = (z_in − z_ref)/(z_in + z_ref)`, floored at −200 dB and
/// capped at 0 dB.
pub fn return_loss(z_in: Impedance, z_ref: f64) -> Result<ReturnLoss> {
    if !(z_ref > 0.0 && z_ref.is_finite()) {
        return Err(Error::domain(format!("reference impedance must be positive, got {z_ref}")));
    }
    let sum = z_in + z_ref;
    if sum.norm() == 0.0 {
        return Ok(ReturnLoss { db: 0.0, pole: true });
    }
    let gamma = reflection_coefficient(z_in, z_ref);
    let mag = gamma.norm();
    let db = if mag == 0.0 {
        RETURN_LOSS_FLOOR_DB
    } else {
        (20.0 * mag.log10()).clamp(RETURN_LOSS_FLOOR_DB, 0.0)
    };
    Ok(ReturnLoss { db, pole: false })
}

/// Γ of `z_in` against a real reference impedance. An open-circuit `z_in`
/// gives exactly 1.
pub fn reflection_coefficient(z_in: Impedance, z_ref: f64) -> Complex64 {
    if rfcore::is_pole(z_in) {
        return Complex64::new(1.0, 0.0);
    }
    (z_in - z_ref) / (z_in + z_ref)
}

/// Input impedance and return loss on a linear frequency grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrequencyProfile {
    pub freqs: Vec<f64>,
    pub z_in: Vec<Impedance>,
    pub s11_db: Vec<f64>,
    pub z_ref: f64,
}

impl FrequencyProfile {
    /// Build a profile from raw samples, checking the shape invariants.
    pub fn from_samples(freqs: Vec<f64>, z_in: Vec<Impedance>, s11_db: Vec<f64>, z_ref: f64) -> Result<Self> {
        if freqs.len() != z_in.len() || freqs.len() != s11_db.len() {
            return Err(Error::domain("profile arrays must have equal length"));
        }
        if freqs.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::domain("profile frequencies must be strictly increasing"));
        }
        if s11_db.iter().any(|s| !(*s <= 0.0)) {
            return Err(Error::domain("return loss must be <= 0 dB"));
        }
        Ok(FrequencyProfile {
            freqs,
            z_in,
            s11_db,
            z_ref,
        })
    }

    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }

    pub fn reflection(&self) -> Vec<Complex64> {
        self.z_in
            .iter()
            .map(|z| reflection_coefficient(*z, self.z_ref))
            .collect()
    }

    /// Indices of interior samples that are strictly lower than both neighbours.
    pub fn local_minima(&self) -> Vec<usize> {
        let s = &self.s11_db;
        (1..s.len().saturating_sub(1))
            .filter(|&i| s[i] < s[i - 1] && s[i] < s[i + 1])
            .collect()
    }
}

/// Linear grid of `n` points from `f_start` to `f_stop` inclusive.
pub fn linear_grid(f_start: f64, f_stop: f64, n: usize) -> Result<Vec<f64>> {
    if !(f_start > 0.0 && f_start < f_stop && f_stop.is_finite()) {
        return Err(Error::domain(format!(
            "need 0 < f_start < f_stop, got [{f_start}, {f_stop}]"
        )));
    }
    if n < 2 {
        return Err(Error::domain(format!("need at least 2 points, got {n}")));
    }
    let step = (f_stop - f_start) / (n - 1) as f64;
    Ok((0..n)
        .map(|i| if i == n - 1 { f_stop } else { f_start + step * i as f64 })
        .collect())
}

/// Sweep input impedance and S11 (against [`DEFAULT_Z_REF`]).
pub fn sweep<E>(
    geom: &AntennaGeometry,
    element: &E,
    f_start: f64,
    f_stop: f64,
    n_points: usize,
) -> Result<FrequencyProfile>
where
    E: SeriesElement + ?Sized,
{
    sweep_with_reference(geom, element, f_start, f_stop, n_points, DEFAULT_Z_REF)
}

pub fn sweep_with_reference<E>(
    geom: &AntennaGeometry,
    element: &E,
    f_start: f64,
    f_stop: f64,
    n_points: usize,
    z_ref: f64,
) -> Result<FrequencyProfile>
where
    E: SeriesElement + ?Sized,
{
    geom.validate()?;
    let freqs = linear_grid(f_start, f_stop, n_points)?;
    let mut z_in = Vec::with_capacity(freqs.len());
    let mut s11_db = Vec::with_capacity(freqs.len());
    for &f in &freqs {
        let z = input_impedance(geom, element, f)?;
        s11_db.push(return_loss(z, z_ref)?.db);
        z_in.push(z);
    }
    Ok(FrequencyProfile {
        freqs,
        z_in,
        s11_db,
        z_ref,
    })
}
