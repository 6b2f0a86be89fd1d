//! Operating bands from return-loss profiles, and which systems they serve.
//!
//! A band is a stretch of the sweep where S11 is at or below a threshold
//! (−6 dB by default). Band sets from several bias voltages are merged with
//! [`tuning_union`], and [`coverage_report`] checks the union against a
//! [`BandPlan`]. A system counts as covered only when every one of its
//! intervals lies inside the union.

mod plan;

use rayon::prelude::*;
use serde::Serialize;

pub use plan::{builtin_bandplan, BandPlan, SystemBands};

use crate::antmodel::{sweep, AntennaGeometry, FrequencyProfile};
use crate::error::{Error, Result};
use crate::rfcore::{varactor_capacitance, ResonatorNetwork, VaractorModel};

/// Default band-edge criterion, dB.
pub const DEFAULT_THRESHOLD_DB: f64 = -6.0;

/// Closed frequency interval in hertz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo <= hi && lo.is_finite() && hi.is_finite() {
            Ok(Interval { lo, hi })
        } else {
            Err(Error::domain(format!("invalid interval [{lo}, {hi}]")))
        }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Sorted, pairwise-disjoint intervals. Overlapping and touching intervals
/// are merged on construction.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
#[serde(transparent)]
pub struct FrequencyIntervalSet {
    intervals: Vec<Interval>,
}

impl FrequencyIntervalSet {
    pub fn new(intervals: impl IntoIterator<Item = Interval>) -> Self {
        let mut v: Vec<Interval> = intervals.into_iter().collect();
        v.sort_by(|a, b| a.lo.total_cmp(&b.lo).then(a.hi.total_cmp(&b.hi)));
        let mut out: Vec<Interval> = Vec::with_capacity(v.len());
        for iv in v {
            match out.last_mut() {
                Some(last) if iv.lo <= last.hi => last.hi = last.hi.max(iv.hi),
                _ => out.push(iv),
            }
        }
        FrequencyIntervalSet { intervals: out }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn contains_interval(&self, iv: &Interval) -> bool {
        self.intervals.iter().any(|u| u.lo <= iv.lo && iv.hi <= u.hi)
    }

    /// Parts of `iv` not inside the set.
    pub fn uncovered_part(&self, iv: &Interval) -> Vec<Interval> {
        let mut out = Vec::new();
        let mut cursor = iv.lo;
        for u in &self.intervals {
            if u.hi < cursor {
                continue;
            }
            if u.lo > iv.hi {
                break;
            }
            if u.lo > cursor {
                out.push(Interval { lo: cursor, hi: u.lo });
            }
            cursor = cursor.max(u.hi);
            if cursor >= iv.hi {
                return out;
            }
        }
        if cursor < iv.hi {
            out.push(Interval { lo: cursor, hi: iv.hi });
        }
        out
    }
}

/// A band found in a sweep. `truncated_*` marks an edge that sits on the end
/// of the sweep, where the real band may continue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExtractedBand {
    pub lo: f64,
    pub hi: f64,
    pub truncated_lo: bool,
    pub truncated_hi: bool,
}

impl ExtractedBand {
    pub fn interval(&self) -> Interval {
        Interval { lo: self.lo, hi: self.hi }
    }

    pub fn truncated(&self) -> bool {
        self.truncated_lo || self.truncated_hi
    }
}

pub fn interval_set(bands: &[ExtractedBand]) -> FrequencyIntervalSet {
    FrequencyIntervalSet::new(bands.iter().map(ExtractedBand::interval))
}

/// Stretches of `profile` with `s11_db <= threshold_db`, ascending.
///
/// Interior band edges are placed by linear interpolation between the two
/// samples that straddle the threshold.
pub fn extract_bands(profile: &FrequencyProfile, threshold_db: f64) -> Result<Vec<ExtractedBand>> {
    if !(threshold_db < 0.0) {
        return Err(Error::domain(format!("threshold must be negative, got {threshold_db}")));
    }
    let f = &profile.freqs;
    let s = &profile.s11_db;
    let n = f.len();
    let crossing = |i: usize| -> f64 {
        // threshold lies between samples i and i+1
        let (fa, fb, sa, sb) = (f[i], f[i + 1], s[i], s[i + 1]);
        if sb == sa {
            fa
        } else {
            fa + (threshold_db - sa) * (fb - fa) / (sb - sa)
        }
    };

    let mut bands = Vec::new();
    let mut i = 0;
    while i < n {
        if s[i] > threshold_db {
            i += 1;
            continue;
        }
        let start = i;
        while i + 1 < n && s[i + 1] <= threshold_db {
            i += 1;
        }
        let end = i;
        let (lo, truncated_lo) = if start == 0 { (f[0], true) } else { (crossing(start - 1), false) };
        let (hi, truncated_hi) = if end == n - 1 { (f[n - 1], true) } else { (crossing(end), false) };
        bands.push(ExtractedBand {
            lo,
            hi,
            truncated_lo,
            truncated_hi,
        });
        i += 1;
    }
    Ok(bands)
}

/// Merge band sets from several bias points.
pub fn tuning_union(sets: &[FrequencyIntervalSet]) -> FrequencyIntervalSet {
    FrequencyIntervalSet::new(sets.iter().flat_map(|s| s.intervals.iter().copied()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Covered,
    Partial { uncovered: Vec<Interval> },
    Uncovered,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystemCoverage {
    pub name: String,
    #[serde(flatten)]
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageReport {
    pub systems: Vec<SystemCoverage>,
    /// Every system is covered.
    pub overall: bool,
}

pub fn coverage_report(union: &FrequencyIntervalSet, plan: &BandPlan) -> CoverageReport {
    let systems: Vec<SystemCoverage> = plan
        .systems()
        .iter()
        .map(|sys| {
            let uncovered: Vec<Interval> = sys.intervals.iter().flat_map(|iv| union.uncovered_part(iv)).collect();
            let missing: f64 = uncovered.iter().map(Interval::width).sum();
            let total: f64 = sys.intervals.iter().map(Interval::width).sum();
            let verdict = if uncovered.is_empty() {
                Verdict::Covered
            } else if missing >= total {
                Verdict::Uncovered
            } else {
                Verdict::Partial { uncovered }
            };
            SystemCoverage {
                name: sys.name.clone(),
                verdict,
            }
        })
        .collect();
    let overall = systems.iter().all(|s| s.verdict == Verdict::Covered);
    CoverageReport { systems, overall }
}

/// Sweep range shared by every bias point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRange {
    pub f_start: f64,
    pub f_stop: f64,
    pub n_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VoltageBands {
    pub voltage: f64,
    /// Varactor capacitance at this voltage, farads.
    pub c1: f64,
    pub bands: Vec<ExtractedBand>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TuningSweep {
    pub per_voltage: Vec<VoltageBands>,
    pub union: FrequencyIntervalSet,
    pub coverage: CoverageReport,
}

/// Sweep the antenna at each bias voltage, extract its bands, and report the
/// coverage of their union. Bias points are evaluated in parallel; results
/// keep the order of `voltages`.
pub fn tuning_sweep(
    geom: &AntennaGeometry,
    net_template: &ResonatorNetwork,
    varactor: &VaractorModel,
    voltages: &[f64],
    range: SweepRange,
    threshold_db: f64,
    plan: &BandPlan,
) -> Result<TuningSweep> {
    if voltages.is_empty() {
        return Err(Error::domain("tuning sweep needs at least one voltage"));
    }
    varactor.validate()?;
    net_template.validate()?;
    let per_voltage = voltages
        .par_iter()
        .map(|&v| {
            let c1 = varactor_capacitance(varactor, v);
            let net = net_template.with_c1(c1);
            let profile = sweep(geom, &net, range.f_start, range.f_stop, range.n_points)?;
            Ok(VoltageBands {
                voltage: v,
                c1,
                bands: extract_bands(&profile, threshold_db)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let sets: Vec<FrequencyIntervalSet> = per_voltage.iter().map(|v| interval_set(&v.bands)).collect();
    let union = tuning_union(&sets);
    let coverage = coverage_report(&union, plan);
    Ok(TuningSweep {
        per_voltage,
        union,
        coverage,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::antmodel::linear_grid;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn mhz(lo: f64, hi: f64) -> Interval {
        Interval {
            lo: lo * 1e6,
            hi: hi * 1e6,
        }
    }

    fn set(ivs: &[(f64, f64)]) -> FrequencyIntervalSet {
        FrequencyIntervalSet::new(ivs.iter().map(|&(a, b)| mhz(a, b)))
    }

    fn profile(freqs: Vec<f64>, s11: Vec<f64>) -> FrequencyProfile {
        let z = vec![Complex64::new(50.0, 0.0); freqs.len()];
        FrequencyProfile::from_samples(freqs, z, s11, 50.0).unwrap()
    }

    #[test]
    fn flat_profile_has_no_bands() {
        let f = linear_grid(0.5e9, 1e9, 51).unwrap();
        let p = profile(f, vec![-3.0; 51]);
        assert!(extract_bands(&p, -6.0).unwrap().is_empty());
    }

    #[test]
    fn v_dip_edges_are_interpolated() {
        // s11 = -6 at 900 and 950 MHz, minimum -16 at 925 MHz; grid step 7 MHz
        // so neither crossing is on a sample.
        let f: Vec<f64> = (0..40).map(|i| 800e6 + 7e6 * i as f64).collect();
        let s: Vec<f64> = f.iter().map(|&x| (-16.0 + 10.0 * ((x - 925e6).abs() / 25e6)).min(0.0)).collect();
        let p = profile(f, s);
        let bands = extract_bands(&p, -6.0).unwrap();
        assert_eq!(bands.len(), 1);
        // both crossings fall inside linear segments of the V
        assert!((bands[0].lo - 900e6).abs() < 1e-3, "{}", bands[0].lo);
        assert!((bands[0].hi - 950e6).abs() < 1e-3, "{}", bands[0].hi);
        assert!(!bands[0].truncated());
    }

    #[test]
    fn floor_profile_is_one_truncated_band() {
        let f = linear_grid(0.5e9, 3e9, 101).unwrap();
        let p = profile(f, vec![-200.0; 101]);
        let b = extract_bands(&p, -6.0).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!((b[0].lo, b[0].hi), (0.5e9, 3e9));
        assert!(b[0].truncated_lo && b[0].truncated_hi);
    }

    #[test]
    fn threshold_must_be_negative() {
        let f = linear_grid(0.5e9, 1e9, 11).unwrap();
        let p = profile(f, vec![-3.0; 11]);
        assert!(extract_bands(&p, 0.0).is_err());
    }

    #[test]
    fn union_examples() {
        let u = tuning_union(&[set(&[(822.0, 866.0)]), set(&[(880.0, 940.0)]), set(&[(922.0, 1050.0)])]);
        assert_eq!(u, set(&[(822.0, 866.0), (880.0, 1050.0)]));
        let u = tuning_union(&[set(&[(822.0, 866.0)]), set(&[(850.0, 940.0)]), set(&[(922.0, 1050.0)])]);
        assert_eq!(u.intervals(), &[mhz(822.0, 1050.0)]);
        let u = tuning_union(&[set(&[(822.0, 866.0)]), set(&[(922.0, 1050.0)])]);
        assert_eq!(u.len(), 2);
        let s = set(&[(1.0, 2.0), (3.0, 4.0)]);
        assert_eq!(tuning_union(std::slice::from_ref(&s)), s);
        // touching intervals merge
        assert_eq!(set(&[(1.0, 2.0), (2.0, 3.0)]).intervals(), &[mhz(1.0, 3.0)]);
    }

    #[test]
    fn coverage_examples() {
        let plan = builtin_bandplan();
        let r = coverage_report(&set(&[(822.0, 1050.0), (1420.0, 2190.0)]), &plan);
        assert!(r.overall);
        assert_eq!(r.systems.len(), 6);

        let r = coverage_report(&set(&[(822.0, 1050.0)]), &plan);
        assert!(!r.overall);
        for s in &r.systems {
            let expect = if s.name.starts_with("GSM") { Verdict::Covered } else { Verdict::Uncovered };
            assert_eq!(s.verdict, expect, "{}", s.name);
        }

        let r = coverage_report(&FrequencyIntervalSet::empty(), &plan);
        assert!(!r.overall && r.systems.iter().all(|s| s.verdict == Verdict::Uncovered));
    }

    #[test]
    fn partial_reports_exact_remainder() {
        let plan = builtin_bandplan();
        let r = coverage_report(&set(&[(830.0, 1000.0)]), &plan);
        let gsm850 = &r.systems[0];
        assert_eq!(
            gsm850.verdict,
            Verdict::Partial {
                uncovered: vec![mhz(824.0, 830.0)]
            }
        );
    }

    #[test]
    fn uncovered_part_cases() {
        let s = set(&[(10.0, 20.0), (30.0, 40.0)]);
        assert_eq!(s.uncovered_part(&mhz(12.0, 18.0)), vec![]);
        assert_eq!(s.uncovered_part(&mhz(5.0, 45.0)), vec![mhz(5.0, 10.0), mhz(20.0, 30.0), mhz(40.0, 45.0)]);
        assert_eq!(s.uncovered_part(&mhz(21.0, 29.0)), vec![mhz(21.0, 29.0)]);
    }

    #[test]
    fn plan_totals_lie_inside_measured_tuning_ranges() {
        let plan = builtin_bandplan();
        let lower = mhz(822.0, 1050.0);
        let upper = mhz(1420.0, 2190.0);
        for s in plan.systems() {
            let range = if s.name.starts_with("GSM") { lower } else { upper };
            for iv in &s.intervals {
                assert!(range.lo <= iv.lo && iv.hi <= range.hi, "{} {:?}", s.name, iv);
            }
        }
    }

    #[test]
    fn reference_sweep_two_bands_per_voltage() {
        let geom = AntennaGeometry::reference();
        let range = SweepRange {
            f_start: 0.5e9,
            f_stop: 3e9,
            n_points: 2001,
        };
        let vm = VaractorModel::default();
        let plan = builtin_bandplan();
        let t = tuning_sweep(&geom, &ResonatorNetwork::default(), &vm, &[0.0, 15.0], range, -6.0, &plan).unwrap();
        for v in &t.per_voltage {
            assert_eq!(v.bands.len(), 2, "{} V: {:?}", v.voltage, v.bands);
        }
        let dense = tuning_sweep(
            &geom,
            &ResonatorNetwork::default(),
            &vm,
            &[0.0, 3.0, 6.0, 9.0, 12.0, 15.0],
            range,
            -6.0,
            &plan,
        )
        .unwrap();
        for iv in t.union.intervals() {
            assert!(dense.union.contains_interval(iv));
        }
        let single = tuning_sweep(&geom, &ResonatorNetwork::default(), &vm, &[0.0], range, -6.0, &plan).unwrap();
        assert_eq!(single.union, interval_set(&single.per_voltage[0].bands));
    }

    fn arb_set() -> impl Strategy<Value = FrequencyIntervalSet> {
        prop::collection::vec((0u32..1000, 1u32..200), 0..6)
            .prop_map(|v| FrequencyIntervalSet::new(v.into_iter().map(|(a, w)| mhz(a as f64, (a + w) as f64))))
    }

    proptest! {
        #[test]
        fn normalized_sets_are_sorted_and_disjoint(s in arb_set()) {
            for w in s.intervals().windows(2) {
                prop_assert!(w[0].hi < w[1].lo);
            }
        }

        #[test]
        fn union_is_idempotent_commutative_associative(a in arb_set(), b in arb_set(), c in arb_set()) {
            prop_assert_eq!(tuning_union(&[a.clone(), a.clone()]), a.clone());
            prop_assert_eq!(tuning_union(&[a.clone(), b.clone()]), tuning_union(&[b.clone(), a.clone()]));
            let left = tuning_union(&[tuning_union(&[a.clone(), b.clone()]), c.clone()]);
            let right = tuning_union(&[a.clone(), tuning_union(&[b.clone(), c.clone()])]);
            prop_assert_eq!(left, right);
        }

        #[test]
        fn coverage_is_monotone(a in arb_set(), b in arb_set()) {
            let plan = BandPlan::new(vec![
                SystemBands { name: "A".into(), intervals: vec![mhz(100.0, 150.0)] },
                SystemBands { name: "B".into(), intervals: vec![mhz(400.0, 420.0), mhz(600.0, 700.0)] },
            ]).unwrap();
            let small = coverage_report(&a, &plan);
            let big = coverage_report(&tuning_union(&[a, b]), &plan);
            for (s, l) in small.systems.iter().zip(&big.systems) {
                if s.verdict == Verdict::Covered {
                    prop_assert_eq!(&l.verdict, &Verdict::Covered);
                }
            }
            prop_assert!(!small.overall || big.overall);
        }

        #[test]
        fn band_edges_sit_on_threshold(seed in prop::collection::vec(-20.0f64..0.0, 8..40)) {
            let f = linear_grid(1e9, 2e9, seed.len()).unwrap();
            let step = f[1] - f[0];
            let p = profile(f.clone(), seed.clone());
            let bands = extract_bands(&p, -6.0).unwrap();
            for w in bands.windows(2) {
                prop_assert!(w[0].hi < w[1].lo);
            }
            for b in &bands {
                prop_assert!(b.lo <= b.hi);
                for (edge, trunc) in [(b.lo, b.truncated_lo), (b.hi, b.truncated_hi)] {
                    if trunc { continue; }
                    // interpolate s11 at the edge from its grid cell
                    let i = (((edge - f[0]) / step).floor() as usize).min(f.len() - 2);
                    let t = (edge - f[i]) / step;
                    let s = seed[i] + t * (seed[i + 1] - seed[i]);
                    prop_assert!((s + 6.0).abs() < 1e-6, "edge {} gives {}", edge, s);
                }
            }
        }
    }
}
