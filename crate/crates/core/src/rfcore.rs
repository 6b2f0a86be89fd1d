//! Complex-valued RF primitives.
//!
//! Lumped-element and lossless transmission-line impedances, the parallel LC
//! tank, and the bias-voltage law of the tunable capacitor. Everything here is
//! a pure function of its arguments.
//!
//! Poles are never propagated as infinities: any impedance whose magnitude
//! would exceed [`POLE_CLIP_OHMS`] is scaled back onto that level, keeping its
//! direction in the complex plane. An impedance at the clip level is treated
//! as an open circuit by [`line_transform`].

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Complex impedance in ohms.
pub type Impedance = Complex64;

/// Magnitude at which an impedance is considered an open circuit (a pole).
pub const POLE_CLIP_OHMS: f64 = 1e9;

/// The canonical open circuit: a real impedance at the clip level.
pub const OPEN: Impedance = Complex64::new(POLE_CLIP_OHMS, 0.0);

/// True when `z` sits at (or beyond) the pole clip level.
pub fn is_pole(z: Impedance) -> bool {
    !(z.norm() < POLE_CLIP_OHMS)
}

/// Scale `z` back onto the clip level if it exceeds it.
///
/// Infinite components are mapped onto the matching axis direction; NaN is
/// left alone so that callers can detect it.
pub fn clip_pole(z: Impedance) -> Impedance {
    if z.re.is_infinite() || z.im.is_infinite() {
        let re = if z.re.is_infinite() { z.re.signum() } else { 0.0 };
        let im = if z.im.is_infinite() { z.im.signum() } else { 0.0 };
        let dir = Complex64::new(re, im);
        return dir * (POLE_CLIP_OHMS / dir.norm());
    }
    let mag = z.norm();
    if mag > POLE_CLIP_OHMS {
        z * (POLE_CLIP_OHMS / mag)
    } else {
        z
    }
}

fn positive(name: &str, value: f64) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::domain(format!("{name} must be positive and finite, got {value}")))
    }
}

/// Impedance of an ideal inductor `l` in parallel with an ideal capacitor `c`.
///
/// `(1/(jωl) + jωc)^-1`, purely imaginary. Inductive below the tank's
/// self-resonance and capacitive above it; at the resonance itself the result
/// is `+j·POLE_CLIP_OHMS`.
pub fn parallel_lc_impedance(l: f64, c: f64, f: f64) -> Result<Impedance> {
    positive("inductance", l)?;
    positive("capacitance", c)?;
    positive("frequency", f)?;
    let w = 2.0 * PI * f;
    let denom = 1.0 - w * w * l * c;
    // within rounding of the self-resonance the sign of denom is noise
    let x = if denom.abs() <= 4.0 * f64::EPSILON { POLE_CLIP_OHMS } else { w * l / denom };
    Ok(Complex64::new(0.0, x.clamp(-POLE_CLIP_OHMS, POLE_CLIP_OHMS)))
}

/// Input impedance `j·z0·tan θ` of a short-circuited lossless line.
pub fn shorted_stub_impedance(z0: f64, theta: f64) -> Result<Impedance> {
    positive("characteristic impedance", z0)?;
    let x = z0 * theta.tan();
    Ok(Complex64::new(0.0, x.clamp(-POLE_CLIP_OHMS, POLE_CLIP_OHMS)))
}

/// Transform `z_load` through a lossless line of characteristic impedance
/// `z0` and electrical length `theta`.
///
/// A load at the clip level is an open circuit and maps to `-j·z0·cot θ`.
/// `theta` with `tan θ == 0` returns the load unchanged.
pub fn line_transform(z0: f64, theta: f64, z_load: Impedance) -> Result<Impedance> {
    positive("characteristic impedance", z0)?;
    let t = theta.tan();
    if t == 0.0 {
        return Ok(z_load);
    }
    if is_pole(z_load) {
        return Ok(clip_pole(Complex64::new(0.0, -z0 / t)));
    }
    let j = Complex64::i();
    let num = z_load + j * z0 * t;
    let den = Complex64::new(z0, 0.0) + j * z_load * t;
    if den.norm() <= f64::EPSILON * (z0 + z_load.norm() * t.abs()) {
        return Ok(pole_along(num * z0));
    }
    Ok(clip_pole(z0 * num / den))
}

/// Parallel combination of two impedances. A pole on either side leaves the
/// other side; a vanishing sum gives a pole.
pub fn parallel(a: Impedance, b: Impedance) -> Impedance {
    if is_pole(a) {
        return b;
    }
    if is_pole(b) {
        return a;
    }
    let num = a * b;
    let sum = a + b;
    if sum.norm() <= f64::EPSILON * (a.norm() + b.norm()) {
        if num.norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        return pole_along(num);
    }
    clip_pole(num / sum)
}

fn pole_along(dir: Impedance) -> Impedance {
    let n = dir.norm();
    if n == 0.0 || !n.is_finite() {
        OPEN
    } else {
        dir * (POLE_CLIP_OHMS / n)
    }
}

/// Bias-voltage law of a tunable (BST) capacitor.
///
/// `C(V) = c_max / (1 + (tuning_ratio - 1)·(|V|/v_max)^shape_exponent)`, with
/// `|V|` clamped to `[0, v_max]`. Only the two endpoints are physically
/// pinned; `shape_exponent` controls the curve in between.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VaractorModel {
    pub c_max: f64,
    pub tuning_ratio: f64,
    pub v_max: f64,
    pub shape_exponent: f64,
}

impl Default for VaractorModel {
    /// 2 pF at zero bias with 3.3:1 tuning at 15 V.
    fn default() -> Self {
        VaractorModel {
            c_max: 2e-12,
            tuning_ratio: 3.3,
            v_max: 15.0,
            shape_exponent: 1.0,
        }
    }
}

impl VaractorModel {
    pub fn new(c_max: f64, tuning_ratio: f64, v_max: f64, shape_exponent: f64) -> Result<Self> {
        let model = VaractorModel {
            c_max,
            tuning_ratio,
            v_max,
            shape_exponent,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        positive("c_max", self.c_max)?;
        positive("v_max", self.v_max)?;
        positive("shape_exponent", self.shape_exponent)?;
        if !(self.tuning_ratio >= 1.0 && self.tuning_ratio.is_finite()) {
            return Err(Error::domain(format!(
                "tuning_ratio must be >= 1, got {}",
                self.tuning_ratio
            )));
        }
        Ok(())
    }

    /// Smallest capacitance, reached at `|V| >= v_max`.
    pub fn c_min(&self) -> f64 {
        self.c_max / self.tuning_ratio
    }

    /// Capacitance at bias `v`. The sign of the bias is irrelevant.
    pub fn capacitance(&self, v: f64) -> f64 {
        varactor_capacitance(self, v)
    }
}

/// See [`VaractorModel`]. Out-of-range bias is clamped (and logged).
pub fn varactor_capacitance(model: &VaractorModel, v: f64) -> f64 {
    let mut mag = v.abs();
    if mag.is_nan() {
        log::warn!("varactor bias is NaN, treating as 0 V");
        mag = 0.0;
    }
    if mag > model.v_max {
        log::debug!("varactor bias {v} V clamped to {} V", model.v_max);
        mag = model.v_max;
    }
    if mag == 0.0 {
        return model.c_max;
    }
    if mag == model.v_max {
        return model.c_max / model.tuning_ratio;
    }
    let x = (mag / model.v_max).powf(model.shape_exponent);
    model.c_max / (1.0 + (model.tuning_ratio - 1.0) * x)
}

/// Anything that can sit in series on the radiating arm.
pub trait SeriesElement {
    /// Series impedance at frequency `f_hz`.
    fn series_impedance(&self, f_hz: f64) -> Result<Impedance>;

    /// Frequency of an impedance pole, if the element has one. Resonance
    /// scans skip grid points in its immediate neighbourhood.
    fn pole_hz(&self) -> Option<f64> {
        None
    }
}

/// A direct connection: zero series impedance.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Through;

impl SeriesElement for Through {
    fn series_impedance(&self, _f_hz: f64) -> Result<Impedance> {
        Ok(Complex64::new(0.0, 0.0))
    }
}

/// Ideal parallel LC tank.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LcTank {
    pub l: f64,
    pub c: f64,
}

impl LcTank {
    pub fn new(l: f64, c: f64) -> Result<Self> {
        positive("inductance", l)?;
        positive("capacitance", c)?;
        Ok(LcTank { l, c })
    }

    pub fn resonance_hz(&self) -> f64 {
        1.0 / (2.0 * PI * (self.l * self.c).sqrt())
    }
}

impl SeriesElement for LcTank {
    fn series_impedance(&self, f_hz: f64) -> Result<Impedance> {
        parallel_lc_impedance(self.l, self.c, f_hz)
    }

    fn pole_hz(&self) -> Option<f64> {
        Some(self.resonance_hz())
    }
}

/// The resonator on the antenna arm: inductor `l1` across the tunable
/// capacitor `c1`, with the DC block `c2` and bias resistor `r1`.
///
/// By default only `l1` and `c1` take part in the RF path. `include_c2_in_rf`
/// puts `c2` in series with `c1`; `include_r1_in_rf` shunts `c1` with `r1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonatorNetwork {
    pub l1: f64,
    pub c1: f64,
    pub c2: f64,
    pub r1: f64,
    pub include_c2_in_rf: bool,
    pub include_r1_in_rf: bool,
}

impl Default for ResonatorNetwork {
    /// 9.1 nH, 2 pF (zero bias), 68 pF DC block, 100 kΩ bias feed.
    fn default() -> Self {
        ResonatorNetwork {
            l1: 9.1e-9,
            c1: 2e-12,
            c2: 68e-12,
            r1: 100e3,
            include_c2_in_rf: false,
            include_r1_in_rf: false,
        }
    }
}

impl ResonatorNetwork {
    pub fn new(l1: f64, c1: f64, c2: f64, r1: f64) -> Result<Self> {
        let net = ResonatorNetwork {
            l1,
            c1,
            c2,
            r1,
            include_c2_in_rf: false,
            include_r1_in_rf: false,
        };
        net.validate()?;
        Ok(net)
    }

    pub fn validate(&self) -> Result<()> {
        positive("l1", self.l1)?;
        positive("c1", self.c1)?;
        positive("c2", self.c2)?;
        positive("r1", self.r1)?;
        Ok(())
    }

    /// Same network with a different tunable capacitance.
    pub fn with_c1(mut self, c1: f64) -> Self {
        self.c1 = c1;
        self
    }

    /// Capacitance seen in the RF path (`c1`, or `c1` in series with `c2`).
    pub fn rf_capacitance(&self) -> f64 {
        if self.include_c2_in_rf {
            self.c1 * self.c2 / (self.c1 + self.c2)
        } else {
            self.c1
        }
    }

    /// Self-resonant frequency of the tank, `1/(2π√(l1·C_rf))`.
    pub fn self_resonance_hz(&self) -> f64 {
        1.0 / (2.0 * PI * (self.l1 * self.rf_capacitance()).sqrt())
    }
}

impl SeriesElement for ResonatorNetwork {
    fn series_impedance(&self, f_hz: f64) -> Result<Impedance> {
        self.validate()?;
        if !self.include_c2_in_rf && !self.include_r1_in_rf {
            return parallel_lc_impedance(self.l1, self.c1, f_hz);
        }
        positive("frequency", f_hz)?;
        let w = 2.0 * PI * f_hz;
        let mut cap_branch = Complex64::new(0.0, -1.0 / (w * self.c1));
        if self.include_r1_in_rf {
            cap_branch = parallel(cap_branch, Complex64::new(self.r1, 0.0));
        }
        if self.include_c2_in_rf {
            cap_branch += Complex64::new(0.0, -1.0 / (w * self.c2));
        }
        Ok(parallel(Complex64::new(0.0, w * self.l1), cap_branch))
    }

    fn pole_hz(&self) -> Option<f64> {
        Some(self.self_resonance_hz())
    }
}
