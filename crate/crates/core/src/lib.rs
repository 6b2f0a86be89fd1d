//! Modeling and tuning of dual-band inverted-F antennas whose radiating arm
//! carries a parallel LC resonator with a voltage-tuned capacitor.
//!
//! The arm is treated as two lossless transmission lines joined by the
//! resonator. Below its self-resonance the resonator is inductive and makes
//! the arm look longer; above it the resonator is capacitive and makes the arm
//! look shorter. That is what gives the antenna a second band, and tuning the
//! capacitor moves both.
//!
//! * [`rfcore`] holds the impedance primitives and the varactor law.
//! * [`antmodel`] computes feed impedance and S11 sweeps.
//! * [`resosynth`] finds resonances, synthesizes `L` and `C` for a target pair
//!   and calibrates line lengths to measurements.
//! * [`bandplan`] extracts −6 dB bands and checks them against system
//!   allocations.
//!
//! ```
//! use ifa_tune::antmodel::AntennaGeometry;
//! use ifa_tune::resosynth::find_resonances;
//! use ifa_tune::rfcore::ResonatorNetwork;
//!
//! let geom = AntennaGeometry::reference();
//! let net = ResonatorNetwork::default();
//! let f = find_resonances(&geom, &net, 0.5e9, 3e9, 2001).unwrap();
//! assert_eq!(f.len(), 2);
//! assert!((f[0] - 844e6).abs() < 1e3);
//! ```

pub mod antmodel;
pub mod bandplan;
mod error;
pub mod resosynth;
pub mod rfcore;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/lines.md")]
    mod lines {}
    #[doc = include_str!("../../../book/src/resonator.md")]
    mod resonator {}
    #[doc = include_str!("../../../book/src/synthesis.md")]
    mod synthesis {}
    #[doc = include_str!("../../../book/src/bands.md")]
    mod bands {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
