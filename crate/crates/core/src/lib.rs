//! Arithmetic subsequences of substitutive sequences.
//!
//! Given a substitution `σ` and optionally a coding `φ`, this crate decides
//! whether the fixed point `x` (or `y = φ(x)`) has a constant subsequence
//! `(y_{k+np})_n`, computes the rational part of the spectrum of the
//! generated subshift, and describes all admissible common differences of
//! automatic sequences through a finite period graph.
//!
//! ```
//! use apseq::{corpus, spectrum, constant_ap_witnesses};
//!
//! let sigma = corpus::proper_01_0110();
//! let desc = spectrum(&sigma).unwrap();
//! assert!(desc.member(6).unwrap());
//! let witnesses = constant_ap_witnesses(&sigma, None, 6).unwrap();
//! assert_eq!(witnesses.len(), 2);
//! ```

pub mod apdecide;
pub mod arith;
pub mod corpus;
pub mod error;
pub mod heightgraph;
pub mod intmat;
pub mod oracle;
pub mod periodicity;
pub mod spectrum;
pub mod words;

pub use apdecide::{constant_ap_witnesses, decide, m_exponent, APDecider, APDecision, APWitness};
pub use error::{Error, Result};
pub use heightgraph::{
    build_graph, height, AutoClassification, ClassifyOptions, EssentialPeriod, GraphContext,
    GraphCheck, HeightData, LevelReport, PeriodGraph,
};
pub use intmat::{IntMatrix, RecurrenceData, RowVector};
pub use oracle::{factor_intersection, prefix_ap_scan, ResidueStatus, Status};
pub use periodicity::{complexity, essential_period_scan, periodicity_test, PeriodicityVerdict};
pub use spectrum::{
    dekking_spectrum, host_two_letter, spectrum, spectrum_with, SpectrumAnalysis,
    SpectrumDescriptor, SpectrumMethod, SpectrumOptions, StepThreeTrace,
};
pub use words::{Alphabet, Letter, Morphism, SeedPair, SubstitutionProfile, Word};
