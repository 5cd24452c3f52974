//! Finite p-groups given by power-commutator presentations.

pub mod catalog;
pub mod collector;
pub mod error;
pub mod identities;
pub mod ops;
pub mod oracle;
pub mod presentation;
pub mod properties;
pub mod sampling;
pub mod structure;
pub mod subgroup;

pub use collector::{build_group, Element, OverlapFailure, OverlapKind, PcGroup};
pub use error::{Error, ParseError, ParseErrorKind, Result};
pub use ops::{GroupOps, Indexed};
pub use presentation::{parse, Diagnostic, Generator, Presentation, Rule, Word};
pub use properties::{CheckMode, Direction, Truth, Verdict, Witness, WitnessKind};
pub use sampling::Mode;
pub use structure::{GroupStats, Limits};
pub use subgroup::Subgroup;
