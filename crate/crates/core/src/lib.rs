//! Exact-arithmetic toolkit for quasigroup cellular automata.
//!
//! * [`quasigroup`] and [`builtins`]: Latin-square algebra and fixture tables.
//! * [`automaton`]: local rules, block recoding, preimages, the toggle map and `Ξ`.
//! * [`measure`]: exact cylinder measures, pushforwards, entropy and fiber spectra.
//! * [`eca`]: endomorphic CA on product groups and linear algebra over `F_p`.
//! * [`format`]: the plain-text file formats.

pub mod alphabet;
pub mod automaton;
pub mod builtins;
pub mod eca;
pub mod format;
pub mod group;
pub mod measure;
pub mod quasigroup;

pub use alphabet::{Alphabet, Symbol};
pub use automaton::{AutomatonError, LocalRule, Qgca};
pub use group::{GroupError, GroupTable};
pub use measure::{CylinderMeasure, MeasureError, Prob};
pub use quasigroup::{validate_latin, Quasigroup, QuasigroupError, SubquasigroupSet};
