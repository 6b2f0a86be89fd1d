//! Run configuration: TOML with one dotted key per setting.
//!
//! Every key is optional and falls back to the reference antenna with the
//! stock resonator. Unknown keys are rejected.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use ifa_tune::antmodel::{AntennaGeometry, EndLoad, REFERENCE_THETA_OPEN_DEG, REFERENCE_THETA_SHORT_DEG};
use ifa_tune::rfcore::{ResonatorNetwork, VaractorModel};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(untagged)]
pub enum EndLoadSpec {
    /// Only `"open"` is accepted.
    Named(String),
    /// `[re, im]` in ohms.
    Complex([f64; 2]),
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometrySection {
    pub z0_ohm: f64,
    pub theta_open_deg: f64,
    pub theta_short_deg: f64,
    pub f_ref_hz: f64,
    pub z_end: EndLoadSpec,
    pub feed_fraction: f64,
}

impl Default for GeometrySection {
    fn default() -> Self {
        let g = AntennaGeometry::reference();
        GeometrySection {
            z0_ohm: g.z0,
            theta_open_deg: REFERENCE_THETA_OPEN_DEG,
            theta_short_deg: REFERENCE_THETA_SHORT_DEG,
            f_ref_hz: g.f_ref,
            z_end: match g.z_end {
                EndLoad::Open => EndLoadSpec::Named("open".into()),
                EndLoad::Impedance(z) => EndLoadSpec::Complex([z.re, z.im]),
            },
            feed_fraction: g.feed_fraction,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct ResonatorSection {
    pub l1_nh: f64,
    pub c1_pf: f64,
    pub c2_pf: f64,
    pub r1_ohm: f64,
    pub include_c2_in_rf: bool,
    pub include_r1_in_rf: bool,
}

impl Default for ResonatorSection {
    fn default() -> Self {
        let n = ResonatorNetwork::default();
        ResonatorSection {
            l1_nh: n.l1 * 1e9,
            c1_pf: n.c1 * 1e12,
            c2_pf: n.c2 * 1e12,
            r1_ohm: n.r1,
            include_c2_in_rf: n.include_c2_in_rf,
            include_r1_in_rf: n.include_r1_in_rf,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct VaractorSection {
    pub c_max_pf: f64,
    pub tuning_ratio: f64,
    pub v_max_v: f64,
    pub shape_exponent: f64,
}

impl Default for VaractorSection {
    fn default() -> Self {
        let v = VaractorModel::default();
        VaractorSection {
            c_max_pf: v.c_max * 1e12,
            tuning_ratio: v.tuning_ratio,
            v_max_v: v.v_max,
            shape_exponent: v.shape_exponent,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub f_start_hz: f64,
    pub f_stop_hz: f64,
    pub n_points: usize,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            f_start_hz: 0.5e9,
            f_stop_hz: 3e9,
            n_points: 2001,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisSection {
    pub threshold_db: f64,
    pub voltages: Vec<f64>,
    pub band_plan: Option<PathBuf>,
}

impl Default for AnalysisSection {
    fn default() -> Self {
        AnalysisSection {
            threshold_db: -6.0,
            voltages: (0..=15).map(f64::from).collect(),
            band_plan: None,
        }
    }
}

/// File names, relative to `--out` unless absolute. An empty Touchstone or
/// SVG name turns that file off.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub sweep_csv: PathBuf,
    pub touchstone: PathBuf,
    pub svg: PathBuf,
    pub bands_csv: PathBuf,
    pub calibrated: PathBuf,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            sweep_csv: "sweep.csv".into(),
            touchstone: "sweep.s1p".into(),
            svg: "sweep.svg".into(),
            bands_csv: "bands.csv".into(),
            calibrated: "calibrated.toml".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub geometry: GeometrySection,
    pub resonator: ResonatorSection,
    pub varactor: VaractorSection,
    pub sweep: SweepSection,
    pub analysis: AnalysisSection,
    pub output: OutputSection,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |e: ifa_tune::Error| CliError::Config(e.to_string());
        self.geometry().map_err(bad)?.validate().map_err(bad)?;
        self.network().validate().map_err(bad)?;
        self.varactor().validate().map_err(bad)?;
        let s = &self.sweep;
        if !(s.f_start_hz > 0.0 && s.f_start_hz < s.f_stop_hz && s.f_stop_hz.is_finite()) {
            return Err(CliError::Config(format!(
                "sweep range must satisfy 0 < f_start_hz < f_stop_hz, got [{}, {}]",
                s.f_start_hz, s.f_stop_hz
            )));
        }
        if s.n_points < 2 {
            return Err(CliError::Config(format!("sweep.n_points must be at least 2, got {}", s.n_points)));
        }
        if !(self.analysis.threshold_db < 0.0) {
            return Err(CliError::Config(format!(
                "analysis.threshold_db must be negative, got {}",
                self.analysis.threshold_db
            )));
        }
        if self.analysis.voltages.is_empty() {
            return Err(CliError::Config("analysis.voltages must not be empty".into()));
        }
        if let Some(v) = self.analysis.voltages.iter().find(|v| !v.is_finite()) {
            return Err(CliError::Config(format!("analysis.voltages contains {v}")));
        }
        Ok(())
    }

    pub fn geometry(&self) -> Result<AntennaGeometry, ifa_tune::Error> {
        let g = &self.geometry;
        let z_end = match &g.z_end {
            EndLoadSpec::Named(s) if s == "open" => EndLoad::Open,
            EndLoadSpec::Named(s) => {
                return Err(ifa_tune::Error::Domain(format!(
                    "geometry.z_end must be \"open\" or [re, im], got {s:?}"
                )))
            }
            EndLoadSpec::Complex([re, im]) => EndLoad::Impedance(Complex64::new(*re, *im)),
        };
        let geom = AntennaGeometry {
            z0: g.z0_ohm,
            theta_open_ref: g.theta_open_deg.to_radians(),
            theta_short_ref: g.theta_short_deg.to_radians(),
            f_ref: g.f_ref_hz,
            z_end,
            feed_fraction: g.feed_fraction,
        };
        geom.validate()?;
        Ok(geom)
    }

    pub fn network(&self) -> ResonatorNetwork {
        let r = &self.resonator;
        ResonatorNetwork {
            l1: r.l1_nh * 1e-9,
            c1: r.c1_pf * 1e-12,
            c2: r.c2_pf * 1e-12,
            r1: r.r1_ohm,
            include_c2_in_rf: r.include_c2_in_rf,
            include_r1_in_rf: r.include_r1_in_rf,
        }
    }

    pub fn varactor(&self) -> VaractorModel {
        let v = &self.varactor;
        VaractorModel {
            c_max: v.c_max_pf * 1e-12,
            tuning_ratio: v.tuning_ratio,
            v_max: v.v_max_v,
            shape_exponent: v.shape_exponent,
        }
    }

    /// Replace the fitted geometry fields.
    pub fn set_geometry(&mut self, g: &AntennaGeometry) {
        self.geometry.z0_ohm = g.z0;
        self.geometry.theta_open_deg = g.theta_open_ref.to_degrees();
        self.geometry.theta_short_deg = g.theta_short_ref.to_degrees();
        self.geometry.f_ref_hz = g.f_ref;
        self.geometry.feed_fraction = g.feed_fraction;
    }

    /// Flat dotted-key TOML. Floats use the shortest representation that
    /// parses back to the same value.
    pub fn to_toml(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        let g = &self.geometry;
        kv("geometry.z0_ohm", float(g.z0_ohm));
        kv("geometry.theta_open_deg", float(g.theta_open_deg));
        kv("geometry.theta_short_deg", float(g.theta_short_deg));
        kv("geometry.f_ref_hz", float(g.f_ref_hz));
        kv(
            "geometry.z_end",
            match &g.z_end {
                EndLoadSpec::Named(n) => format!("{n:?}"),
                EndLoadSpec::Complex([re, im]) => format!("[{}, {}]", float(*re), float(*im)),
            },
        );
        kv("geometry.feed_fraction", float(g.feed_fraction));
        let r = &self.resonator;
        kv("resonator.l1_nh", float(r.l1_nh));
        kv("resonator.c1_pf", float(r.c1_pf));
        kv("resonator.c2_pf", float(r.c2_pf));
        kv("resonator.r1_ohm", float(r.r1_ohm));
        kv("resonator.include_c2_in_rf", r.include_c2_in_rf.to_string());
        kv("resonator.include_r1_in_rf", r.include_r1_in_rf.to_string());
        let v = &self.varactor;
        kv("varactor.c_max_pf", float(v.c_max_pf));
        kv("varactor.tuning_ratio", float(v.tuning_ratio));
        kv("varactor.v_max_v", float(v.v_max_v));
        kv("varactor.shape_exponent", float(v.shape_exponent));
        let w = &self.sweep;
        kv("sweep.f_start_hz", float(w.f_start_hz));
        kv("sweep.f_stop_hz", float(w.f_stop_hz));
        kv("sweep.n_points", w.n_points.to_string());
        let a = &self.analysis;
        kv("analysis.threshold_db", float(a.threshold_db));
        let volts: Vec<String> = a.voltages.iter().map(|v| float(*v)).collect();
        kv("analysis.voltages", format!("[{}]", volts.join(", ")));
        if let Some(p) = &a.band_plan {
            kv("analysis.band_plan", path(p));
        }
        let o = &self.output;
        kv("output.sweep_csv", path(&o.sweep_csv));
        kv("output.touchstone", path(&o.touchstone));
        kv("output.svg", path(&o.svg));
        kv("output.bands_csv", path(&o.bands_csv));
        kv("output.calibrated", path(&o.calibrated));
        s
    }
}

fn float(v: f64) -> String {
    // Debug always keeps a decimal point, which TOML needs for a float
    format!("{v:?}")
}

fn path(p: &Path) -> String {
    toml::Value::String(p.to_string_lossy().into_owned()).to_string()
}
