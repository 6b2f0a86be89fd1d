use ifa_tune::bandplan::{
    builtin_bandplan, coverage_report, tuning_union, BandPlan, FrequencyIntervalSet, Interval, Verdict,
};

fn mhz(pairs: &[(f64, f64)]) -> FrequencyIntervalSet {
    FrequencyIntervalSet::new(pairs.iter().map(|&(a, b)| Interval { lo: a * 1e6, hi: b * 1e6 }))
}

#[test]
fn measured_edges_cover_all_six_systems() {
    let lower = [
        mhz(&[(822.0, 866.0)]),
        mhz(&[(862.0, 939.6)]),
        mhz(&[(882.0, 976.4)]),
        mhz(&[(922.0, 1050.0)]),
    ];
    let upper = [
        mhz(&[(1420.0, 1730.0)]),
        mhz(&[(1652.0, 1914.0)]),
        mhz(&[(1768.0, 2006.0)]),
        mhz(&[(2000.0, 2190.0)]),
    ];
    let all: Vec<FrequencyIntervalSet> = lower.iter().chain(&upper).cloned().collect();
    let union = tuning_union(&all);
    assert_eq!(union, mhz(&[(822.0, 1050.0), (1420.0, 2190.0)]));
    let report = coverage_report(&union, &builtin_bandplan());
    assert!(report.overall);

    // the lower band on its own serves only the two GSM systems
    let report = coverage_report(&tuning_union(&lower), &builtin_bandplan());
    let covered: Vec<&str> = report
        .systems
        .iter()
        .filter(|s| s.verdict == Verdict::Covered)
        .map(|s| s.name.as_str())
        .collect();
    assert_eq!(covered, ["GSM-850", "GSM-900"]);
}

#[test]
fn end_bias_points_alone_leave_a_gap() {
    let union = tuning_union(&[mhz(&[(822.0, 866.0)]), mhz(&[(922.0, 1050.0)])]);
    assert_eq!(union.len(), 2);
    let report = coverage_report(&union, &builtin_bandplan());
    assert!(matches!(report.systems[1].verdict, Verdict::Partial { .. }));
}

#[test]
fn plan_file_overrides_builtin() {
    let plan = BandPlan::from_toml_str("\"ISM-915\" = [[902, 928]]").unwrap();
    let r = coverage_report(&mhz(&[(900.0, 930.0)]), &plan);
    assert_eq!(r.systems.len(), 1);
    assert!(r.overall);
}
