//! Text formats written by the commands. All writers are pure functions of
//! their inputs so repeated runs produce identical bytes.

use std::fmt::Write as _;

use ifa_tune::antmodel::FrequencyProfile;
use ifa_tune::bandplan::{CoverageReport, FrequencyIntervalSet, Verdict, VoltageBands};

pub const SWEEP_HEADER: &str = "freq_hz,re_zin_ohm,im_zin_ohm,s11_db";
pub const BANDS_HEADER: &str = "voltage_v,band_lo_hz,band_hi_hz,truncated";
pub const TOUCHSTONE_OPTIONS: &str = "# Hz S RI R 50";

/// `x` in plain decimal notation with nine significant digits.
pub fn sig9(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0.00000000".into();
    }
    let sci = format!("{:.8e}", x.abs());
    let (mant, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    let digits: String = mant.chars().filter(char::is_ascii_digit).collect();
    let body = if exp >= 8 {
        format!("{digits}{}", "0".repeat((exp - 8) as usize))
    } else if exp >= 0 {
        let (int, frac) = digits.split_at(exp as usize + 1);
        format!("{int}.{frac}")
    } else {
        format!("0.{}{digits}", "0".repeat((-exp - 1) as usize))
    };
    if x < 0.0 {
        format!("-{body}")
    } else {
        body
    }
}

pub fn sweep_csv(p: &FrequencyProfile) -> String {
    let mut s = String::with_capacity(64 * p.len());
    s.push_str(SWEEP_HEADER);
    s.push('\n');
    for i in 0..p.len() {
        let z = p.z_in[i];
        let _ = writeln!(
            s,
            "{},{},{},{}",
            sig9(p.freqs[i]),
            sig9(z.re),
            sig9(z.im),
            sig9(p.s11_db[i])
        );
    }
    s
}

/// Version-1 one-port Touchstone, reflection coefficient as real/imaginary.
pub fn touchstone(p: &FrequencyProfile, comment: &str) -> String {
    let mut s = String::with_capacity(48 * p.len());
    let _ = writeln!(s, "! {comment}");
    s.push_str(TOUCHSTONE_OPTIONS);
    s.push('\n');
    for (f, g) in p.freqs.iter().zip(p.reflection()) {
        let _ = writeln!(s, "{} {} {}", sig9(*f), sig9(g.re), sig9(g.im));
    }
    s
}

pub fn bands_csv(rows: &[VoltageBands]) -> String {
    let mut s = String::from(BANDS_HEADER);
    s.push('\n');
    for row in rows {
        for b in &row.bands {
            let _ = writeln!(s, "{},{},{},{}", row.voltage, sig9(b.lo), sig9(b.hi), b.truncated());
        }
    }
    s
}

pub fn mhz_list(set: &FrequencyIntervalSet) -> String {
    if set.is_empty() {
        return "(none)".into();
    }
    set.intervals()
        .iter()
        .map(|iv| format!("[{:.3}, {:.3}] MHz", iv.lo / 1e6, iv.hi / 1e6))
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn coverage_table(report: &CoverageReport) -> String {
    let width = report.systems.iter().map(|s| s.name.len()).max().unwrap_or(6).max(6);
    let mut s = format!("{:<width$}  verdict\n", "system");
    for sys in &report.systems {
        let verdict = match &sys.verdict {
            Verdict::Covered => "covered".to_string(),
            Verdict::Uncovered => "uncovered".to_string(),
            Verdict::Partial { uncovered } => {
                let gaps: Vec<String> = uncovered
                    .iter()
                    .map(|iv| format!("{:.3}-{:.3}", iv.lo / 1e6, iv.hi / 1e6))
                    .collect();
                format!("partial (missing {} MHz)", gaps.join(", "))
            }
        };
        let _ = writeln!(s, "{:<width$}  {verdict}", sys.name);
    }
    let _ = writeln!(s, "overall: {}", if report.overall { "all covered" } else { "not covered" });
    s
}

const W: f64 = 800.0;
const H: f64 = 500.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;

/// Static S11 plot with a dashed rule at `threshold_db`.
pub fn svg_plot(p: &FrequencyProfile, threshold_db: f64, title: &str) -> String {
    let f0 = p.freqs.first().copied().unwrap_or(0.0);
    let f1 = p.freqs.last().copied().unwrap_or(1.0);
    let lowest = p.s11_db.iter().copied().fold(threshold_db, f64::min);
    let y_min = ((lowest / 5.0).floor() * 5.0).max(-60.0);
    let (pw, ph) = (W - LEFT - RIGHT, H - TOP - BOTTOM);
    let x = |f: f64| LEFT + (f - f0) / (f1 - f0) * pw;
    let y = |db: f64| TOP + (db.clamp(y_min, 0.0) / y_min) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 800 500" width="800" height="500" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="800" height="500" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="400" y="20" text-anchor="middle" font-size="14">{}</text>"#, escape(title));
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );

    // y ticks every 5 dB
    let mut db = 0.0;
    while db >= y_min {
        let yy = y(db);
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT}" y1="{yy:.2}" x2="{:.2}" y2="{yy:.2}" stroke="#ddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">{db}</text>"##,
            LEFT + pw,
            LEFT - 6.0,
            yy + 4.0
        );
        db -= 5.0;
    }
    // x ticks at round GHz fractions
    let span = f1 - f0;
    let step = [0.1e9, 0.25e9, 0.5e9, 1e9, 2e9]
        .into_iter()
        .find(|st| span / st <= 12.0)
        .unwrap_or(5e9);
    let mut f = (f0 / step).ceil() * step;
    while f <= f1 + 1e-6 * step {
        let xx = x(f);
        let _ = writeln!(
            s,
            r##"<line x1="{xx:.2}" y1="{TOP}" x2="{xx:.2}" y2="{:.2}" stroke="#ddd"/><text x="{xx:.2}" y="{:.2}" text-anchor="middle">{}</text>"##,
            TOP + ph,
            TOP + ph + 18.0,
            f / 1e9
        );
        f += step;
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">Frequency (GHz)</text>"#,
        LEFT + pw / 2.0,
        H - 15.0
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">S11 (dB)</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0
    );

    let ty = y(threshold_db);
    let _ = writeln!(
        s,
        r#"<line x1="{LEFT}" y1="{ty:.2}" x2="{:.2}" y2="{ty:.2}" stroke="red" stroke-dasharray="6 4"/>"#,
        LEFT + pw
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="end" fill="red">{threshold_db} dB</text>"#,
        LEFT + pw - 4.0,
        ty - 4.0
    );

    let pts: Vec<String> = p
        .freqs
        .iter()
        .zip(&p.s11_db)
        .map(|(f, db)| format!("{:.2},{:.2}", x(*f), y(*db)))
        .collect();
    let _ = writeln!(
        s,
        r#"<polyline fill="none" stroke="navy" stroke-width="1.5" points="{}"/>"#,
        pts.join(" ")
    );
    s.push_str("</svg>\n");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use ifa_tune::antmodel::{sweep, AntennaGeometry};
    use ifa_tune::rfcore::ResonatorNetwork;

    #[test]
    fn sig9_cases() {
        assert_eq!(sig9(500e6), "500000000");
        assert_eq!(sig9(1.5e10), "15000000000");
        assert_eq!(sig9(1_234_567_891.0), "1234567890");
        assert_eq!(sig9(-10.024_994_69), "-10.0249947");
        assert_eq!(sig9(0.0015), "0.00150000000");
        assert_eq!(sig9(1.0), "1.00000000");
        assert_eq!(sig9(-0.0), "0.00000000");
        assert_eq!(sig9(999_999_999.7), "1000000000");
    }

    #[test]
    fn sig9_round_trips_to_one_part_in_1e8() {
        for x in [1.234_567_891_23e-7, 2.236_067_977_5, -2.718_281_828e5, 8.44e8, 6.02e23] {
            let back: f64 = sig9(x).parse().unwrap();
            assert!(((back - x) / x).abs() < 1e-8, "{x} -> {}", sig9(x));
            assert!(!sig9(x).contains('e'));
        }
    }

    fn profile() -> FrequencyProfile {
        sweep(&AntennaGeometry::reference(), &ResonatorNetwork::default(), 0.5e9, 3e9, 11).unwrap()
    }

    #[test]
    fn csv_shape() {
        let text = sweep_csv(&profile());
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], SWEEP_HEADER);
        assert_eq!(lines.len(), 12);
        assert!(lines[1].starts_with("500000000,"));
        assert!(lines[1..].iter().all(|l| l.split(',').count() == 4));
    }

    #[test]
    fn touchstone_shape() {
        let text = touchstone(&profile(), "test");
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[1], TOUCHSTONE_OPTIONS);
        assert_eq!(lines.len(), 13);
        for l in &lines[2..] {
            let cols: Vec<f64> = l.split(' ').map(|c| c.parse().unwrap()).collect();
            assert_eq!(cols.len(), 3);
            assert!(cols[1].hypot(cols[2]) <= 1.0 + 1e-8);
        }
    }

    #[test]
    fn svg_has_viewbox_and_rule() {
        let text = svg_plot(&profile(), -6.0, "0 V");
        assert!(text.contains(r#"viewBox="0 0 800 500""#));
        assert!(text.contains("stroke-dasharray"));
        assert!(text.contains("-6 dB"));
        assert!(text.trim_end().ends_with("</svg>"));
    }
}
