//! Named systems and their frequency allocations.

use std::path::Path;

use serde::Serialize;

use super::Interval;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystemBands {
    pub name: String,
    pub intervals: Vec<Interval>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandPlan {
    systems: Vec<SystemBands>,
}

impl BandPlan {
    /// Names must be unique and every interval non-empty.
    pub fn new(systems: Vec<SystemBands>) -> Result<Self> {
        for (i, s) in systems.iter().enumerate() {
            if s.name.trim().is_empty() {
                return Err(Error::BandPlan("system name is empty".into()));
            }
            if systems[..i].iter().any(|o| o.name == s.name) {
                return Err(Error::BandPlan(format!("duplicate system {:?}", s.name)));
            }
            if s.intervals.is_empty() {
                return Err(Error::BandPlan(format!("system {:?} has no intervals", s.name)));
            }
            for iv in &s.intervals {
                if !(iv.lo < iv.hi && iv.lo.is_finite() && iv.hi.is_finite()) {
                    return Err(Error::BandPlan(format!(
                        "system {:?} has an empty interval [{}, {}]",
                        s.name, iv.lo, iv.hi
                    )));
                }
            }
        }
        Ok(BandPlan { systems })
    }

    pub fn systems(&self) -> &[SystemBands] {
        &self.systems
    }

    pub fn get(&self, name: &str) -> Option<&SystemBands> {
        self.systems.iter().find(|s| s.name == name)
    }

    /// Parse a plan from TOML: one key per system, each a list of
    /// `[lo, hi]` pairs in MHz. Edges are rounded to the nearest hertz.
    ///
    /// ```toml
    /// "GSM-900" = [[890, 915], [935, 960]]
    /// GPS = [[1574.397, 1576.443]]
    /// ```
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let table: toml::Table = text.parse().map_err(|e| Error::BandPlan(format!("{e}")))?;
        let mut systems = Vec::with_capacity(table.len());
        for (name, value) in table {
            let pairs = value
                .as_array()
                .ok_or_else(|| Error::BandPlan(format!("{name:?}: expected a list of [lo, hi] pairs")))?;
            let mut intervals = Vec::with_capacity(pairs.len());
            for pair in pairs {
                let edges = pair
                    .as_array()
                    .filter(|p| p.len() == 2)
                    .ok_or_else(|| Error::BandPlan(format!("{name:?}: each entry must be [lo, hi]")))?;
                let mhz = |v: &toml::Value| {
                    v.as_float()
                        .or_else(|| v.as_integer().map(|i| i as f64))
                        .ok_or_else(|| Error::BandPlan(format!("{name:?}: band edges must be numbers")))
                };
                intervals.push(Interval {
                    lo: (mhz(&edges[0])? * 1e6).round(),
                    hi: (mhz(&edges[1])? * 1e6).round(),
                });
            }
            systems.push(SystemBands { name, intervals });
        }
        BandPlan::new(systems)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::BandPlan(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }
}

fn sys(name: &str, mhz: &[(f64, f64)]) -> SystemBands {
    SystemBands {
        name: name.to_string(),
        intervals: mhz.iter().map(|&(lo, hi)| Interval { lo, hi }).collect(),
    }
}

/// The six cellular and navigation systems a dual-band handset antenna of
/// this kind is expected to serve. GPS is the L1 C/A allocation,
/// 1575.42 MHz ± 1.023 MHz.
pub fn builtin_bandplan() -> BandPlan {
    BandPlan {
        systems: vec![
            sys("GSM-850", &[(824e6, 849e6), (869e6, 894e6)]),
            sys("GSM-900", &[(890e6, 915e6), (935e6, 960e6)]),
            sys("GPS", &[(1_574_397_000.0, 1_576_443_000.0)]),
            sys("DCS", &[(1710e6, 1785e6), (1805e6, 1880e6)]),
            sys("PCS", &[(1850e6, 1910e6), (1930e6, 1990e6)]),
            sys("UMTS", &[(1900e6, 1980e6), (2010e6, 2025e6), (2110e6, 2170e6)]),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval { lo, hi }
    }

    #[test]
    fn builtin_lookups() {
        let p = builtin_bandplan();
        assert_eq!(p.systems().len(), 6);
        assert_eq!(p.get("GSM-900").unwrap().intervals, vec![iv(890e6, 915e6), iv(935e6, 960e6)]);
        assert!(p.get("UMTS").unwrap().intervals.contains(&iv(2110e6, 2170e6)));
        assert_eq!(p.get("GPS").unwrap().intervals, vec![iv(1574.397e6, 1576.443e6)]);
        assert!(p.get("LTE").is_none());
        assert!(BandPlan::new(p.systems().to_vec()).is_ok());
    }

    #[test]
    fn gps_is_l1_plus_minus_chip_rate() {
        let plan = builtin_bandplan();
        let gps = &plan.get("GPS").unwrap().intervals[0];
        assert!((0.5 * (gps.lo + gps.hi) - 1575.42e6).abs() < 1e-3);
        assert!((gps.hi - gps.lo - 2.046e6).abs() < 1e-3);
    }

    #[test]
    fn toml_round_trip_of_builtin() {
        let text = r#"
            "GSM-850" = [[824, 849], [869, 894]]
            "GSM-900" = [[890, 915], [935, 960]]
            GPS = [[1574.397, 1576.443]]
            DCS = [[1710, 1785], [1805, 1880]]
            PCS = [[1850, 1910], [1930, 1990]]
            UMTS = [[1900, 1980], [2010, 2025], [2110, 2170]]
        "#;
        assert_eq!(BandPlan::from_toml_str(text).unwrap(), builtin_bandplan());
    }

    #[test]
    fn toml_errors() {
        assert!(BandPlan::from_toml_str("A = 3").is_err());
        assert!(BandPlan::from_toml_str("A = [[1, 2, 3]]").is_err());
        assert!(BandPlan::from_toml_str("A = [[2, 1]]").is_err());
        assert!(BandPlan::from_toml_str("A = [[1, \"x\"]]").is_err());
        assert!(BandPlan::from_toml_str("A = []").is_err());
        assert!(BandPlan::from_toml_str("A = [[1, 2]").is_err());
    }

    #[test]
    fn duplicate_names_rejected() {
        let s = sys("X", &[(1.0, 2.0)]);
        assert!(BandPlan::new(vec![s.clone(), s]).is_err());
    }
}
