use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use ifa_tune::antmodel::{sweep, FrequencyProfile};
use ifa_tune::bandplan::{
    builtin_bandplan, coverage_report, extract_bands, tuning_sweep, tuning_union, BandPlan, ExtractedBand,
    FrequencyIntervalSet, SweepRange, VoltageBands,
};
use ifa_tune::resosynth::{calibrate, synthesize_lc, CalibrationOptions, SynthesisMode};
use ifa_tune::rfcore::varactor_capacitance;
use serde_json::json;

use crate::config::RunConfig;
use crate::output;
use crate::CliError;

/// `z0` range explored by `calibrate --release-z0`, ohms.
const RELEASED_Z0: (f64, f64) = (20.0, 400.0);

pub struct Context {
    pub config: RunConfig,
    pub json: bool,
    pub out: PathBuf,
}

/// Files are collected first and written together once every computation has
/// succeeded.
#[derive(Default)]
struct Files(Vec<(PathBuf, String)>);

impl Files {
    fn add(&mut self, ctx: &Context, name: &Path, body: String) -> PathBuf {
        let path = ctx.out.join(name);
        self.0.push((path.clone(), body));
        path
    }

    fn write(self) -> Result<(), CliError> {
        for (path, body) in self.0 {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
                    path: dir.to_path_buf(),
                    source,
                })?;
            }
            std::fs::write(&path, body).map_err(|source| CliError::Io { path, source })?;
        }
        Ok(())
    }
}

fn show(p: &Path) -> String {
    p.display().to_string()
}

pub fn sweep_cmd(ctx: &Context, bias: Option<f64>) -> Result<String, CliError> {
    let cfg = &ctx.config;
    let geom = cfg.geometry()?;
    let mut net = cfg.network();
    if let Some(v) = bias {
        net = net.with_c1(varactor_capacitance(&cfg.varactor(), v));
    }
    let s = &cfg.sweep;
    let profile = sweep(&geom, &net, s.f_start_hz, s.f_stop_hz, s.n_points)?;
    let label = match bias {
        Some(v) => format!("ifatune sweep, bias {v} V, c1 {:.6} pF", net.c1 * 1e12),
        None => format!("ifatune sweep, c1 {:.6} pF", net.c1 * 1e12),
    };

    let mut files = Files::default();
    let csv = files.add(ctx, &cfg.output.sweep_csv, output::sweep_csv(&profile));
    let enabled = |p: &PathBuf| !p.as_os_str().is_empty();
    let s1p = Some(&cfg.output.touchstone)
        .filter(|p| enabled(p))
        .map(|name| files.add(ctx, name, output::touchstone(&profile, &label)));
    let svg = Some(&cfg.output.svg)
        .filter(|p| enabled(p))
        .map(|name| files.add(ctx, name, output::svg_plot(&profile, cfg.analysis.threshold_db, &label)));
    files.write()?;

    let minima = dips(&profile, cfg.analysis.threshold_db);
    if ctx.json {
        let bands = extract_bands(&profile, cfg.analysis.threshold_db)?;
        let body = json!({
            "command": "sweep",
            "bias_v": bias,
            "c1_pf": net.c1 * 1e12,
            "points": profile.len(),
            "csv": show(&csv),
            "touchstone": s1p.as_deref().map(show),
            "svg": svg.as_deref().map(show),
            "bands": bands,
            "dips": minima.iter().map(|(f, db)| json!({"freq_hz": f, "s11_db": db})).collect::<Vec<_>>(),
        });
        return Ok(pretty(&body));
    }
    let mut text = format!("{label}\n{} points written to {}\n", profile.len(), show(&csv));
    for p in s1p.iter().chain(&svg) {
        text.push_str(&format!("wrote {}\n", show(p)));
    }
    for (f, db) in &minima {
        text.push_str(&format!("dip at {:.3} MHz: {db:.2} dB\n", f / 1e6));
    }
    Ok(text)
}

/// Local S11 minima below the threshold.
fn dips(p: &FrequencyProfile, threshold_db: f64) -> Vec<(f64, f64)> {
    p.local_minima()
        .into_iter()
        .filter(|&i| p.s11_db[i] <= threshold_db)
        .map(|i| (p.freqs[i], p.s11_db[i]))
        .collect()
}

pub fn synthesize_cmd(ctx: &Context, f1: f64, f2: f64, mode: SynthesisMode) -> Result<String, CliError> {
    if !(f1 > 0.0 && f2 > f1 && f2.is_finite()) {
        return Err(CliError::Usage(format!(
            "synthesize needs 0 < f1 < f2, got f1={f1} Hz, f2={f2} Hz"
        )));
    }
    let geom = ctx.config.geometry()?;
    let r = synthesize_lc(&geom, f1, f2, mode)?;
    if ctx.json {
        return Ok(pretty(&json!({
            "command": "synthesize",
            "f1_hz": f1,
            "f2_hz": f2,
            "l_nh": r.l * 1e9,
            "c_pf": r.c * 1e12,
            "method": r.method,
            "residual_f1_ohm": r.residual_f1,
            "residual_f2_ohm": r.residual_f2,
        })));
    }
    let method = match r.method {
        ifa_tune::resosynth::SynthesisMethod::ClosedForm => "closed form",
        ifa_tune::resosynth::SynthesisMethod::Numeric => "numeric",
    };
    Ok(format!(
        "L = {:.6} nH\nC = {:.6} pF\nmethod: {method}\nresidual at {:.3} MHz: {:.3e} ohm\nresidual at {:.3} MHz: {:.3e} ohm\n",
        r.l * 1e9,
        r.c * 1e12,
        f1 / 1e6,
        r.residual_f1,
        f2 / 1e6,
        r.residual_f2
    ))
}

pub fn tune_cmd(ctx: &Context, bands_from: Option<&Path>, plan_path: Option<&Path>) -> Result<String, CliError> {
    let cfg = &ctx.config;
    let plan = match plan_path.or(cfg.analysis.band_plan.as_deref()) {
        Some(p) => BandPlan::load(p)?,
        None => builtin_bandplan(),
    };
    let (rows, union, coverage) = match bands_from {
        Some(path) => {
            let rows = read_bands_csv(path)?;
            let sets: Vec<FrequencyIntervalSet> = rows
                .iter()
                .map(|r| ifa_tune::bandplan::interval_set(&r.bands))
                .collect();
            let union = tuning_union(&sets);
            let coverage = coverage_report(&union, &plan);
            (rows, union, coverage)
        }
        None => {
            let s = &cfg.sweep;
            let range = SweepRange {
                f_start: s.f_start_hz,
                f_stop: s.f_stop_hz,
                n_points: s.n_points,
            };
            let t = tuning_sweep(
                &cfg.geometry()?,
                &cfg.network(),
                &cfg.varactor(),
                &cfg.analysis.voltages,
                range,
                cfg.analysis.threshold_db,
                &plan,
            )?;
            (t.per_voltage, t.union, t.coverage)
        }
    };

    let mut files = Files::default();
    let bands_path = files.add(ctx, &cfg.output.bands_csv, output::bands_csv(&rows));
    files.write()?;

    if ctx.json {
        return Ok(pretty(&json!({
            "command": "tune",
            "source": if bands_from.is_some() { "fixture" } else { "model" },
            "per_voltage": rows,
            "union": union,
            "coverage": coverage,
            "bands_csv": show(&bands_path),
        })));
    }
    let mut text = String::new();
    for r in &rows {
        let set = ifa_tune::bandplan::interval_set(&r.bands);
        let trunc = if r.bands.iter().any(ExtractedBand::truncated) { " (truncated at sweep edge)" } else { "" };
        text.push_str(&format!("{:>6} V: {}{trunc}\n", r.voltage, output::mhz_list(&set)));
    }
    text.push_str(&format!("union: {}\n\n", output::mhz_list(&union)));
    text.push_str(&output::coverage_table(&coverage));
    text.push_str(&format!("wrote {}\n", show(&bands_path)));
    Ok(text)
}

/// Read a bands CSV (the format `tune` writes). Rows are grouped by voltage
/// in order of first appearance.
pub fn read_bands_csv(path: &Path) -> Result<Vec<VoltageBands>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let bad = |line: usize, msg: &str| CliError::Config(format!("{}:{line}: {msg}", path.display()));
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, h)) if h.trim() == output::BANDS_HEADER => {}
        _ => return Err(bad(1, &format!("expected header {:?}", output::BANDS_HEADER))),
    }
    let mut order: Vec<String> = Vec::new();
    let mut groups: BTreeMap<String, VoltageBands> = BTreeMap::new();
    for (i, line) in lines {
        let n = i + 1;
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols.len() != 4 {
            return Err(bad(n, "expected 4 columns"));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad(n, &format!("not a number: {s:?}")));
        let (v, lo, hi) = (num(cols[0])?, num(cols[1])?, num(cols[2])?);
        let truncated = match cols[3] {
            "true" => true,
            "false" => false,
            other => return Err(bad(n, &format!("truncated must be true or false, got {other:?}"))),
        };
        if !(lo <= hi && lo.is_finite() && hi.is_finite() && v.is_finite()) {
            return Err(bad(n, "band edges must satisfy lo <= hi"));
        }
        let key = cols[0].to_string();
        let entry = groups.entry(key.clone()).or_insert_with(|| {
            order.push(key);
            VoltageBands {
                voltage: v,
                c1: f64::NAN,
                bands: Vec::new(),
            }
        });
        entry.bands.push(ExtractedBand {
            lo,
            hi,
            truncated_lo: truncated,
            truncated_hi: truncated,
        });
    }
    if order.is_empty() {
        return Err(bad(1, "no bands"));
    }
    Ok(order
        .into_iter()
        .map(|k| groups.remove(&k).expect("grouped"))
        .collect())
}

pub fn calibrate_cmd(ctx: &Context, f1: f64, f2: f64, release_z0: bool) -> Result<String, CliError> {
    if !(f1 > 0.0 && f2 > f1 && f2.is_finite()) {
        return Err(CliError::Usage(format!(
            "calibrate needs 0 < f1 < f2, got f1={f1} Hz, f2={f2} Hz"
        )));
    }
    let cfg = &ctx.config;
    let geom = cfg.geometry()?;
    let opts = CalibrationOptions {
        release_z0: release_z0.then_some(RELEASED_Z0),
        ..CalibrationOptions::default()
    };
    let r = calibrate(&geom, &cfg.network(), (f1, f2), &opts)?;
    let mut fitted = cfg.clone();
    fitted.set_geometry(&r.geometry);

    let mut files = Files::default();
    let path = files.add(ctx, &cfg.output.calibrated, fitted.to_toml());
    files.write()?;

    let report = if ctx.json {
        pretty(&json!({
            "command": "calibrate",
            "targets_hz": [f1, f2],
            "objective": r.objective,
            "initial_objective": r.initial_objective,
            "iterations": r.iterations,
            "predicted_hz": r.predicted,
            "theta_open_deg": fitted.geometry.theta_open_deg,
            "theta_short_deg": fitted.geometry.theta_short_deg,
            "feed_fraction": fitted.geometry.feed_fraction,
            "z0_ohm": fitted.geometry.z0_ohm,
            "warning": r.warning,
            "config": show(&path),
        }))
    } else {
        let predicted: Vec<String> = r.predicted.iter().map(|f| format!("{:.3}", f / 1e6)).collect();
        format!(
            "objective {:.3e} (start {:.3e}) after {} iterations\ntheta_open {:.6} deg, theta_short {:.6} deg, feed {:.4}, z0 {:.3} ohm\npredicted resonances: {} MHz\nwrote {}\n",
            r.objective,
            r.initial_objective,
            r.iterations,
            fitted.geometry.theta_open_deg,
            fitted.geometry.theta_short_deg,
            fitted.geometry.feed_fraction,
            fitted.geometry.z0_ohm,
            predicted.join(", "),
            show(&path)
        )
    };
    match r.warning {
        Some(w) => Err(CliError::Calibration { report, warning: w }),
        None => Ok(report),
    }
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values always serialize");
    s.push('\n');
    s
}
