//! Integrated information over finite-dimensional process theories.
//!
//! Processes live in a [`Theory`]; two backends are provided, [`Classical`]
//! (stochastic matrices) and [`Quantum`] (completely positive maps in Choi
//! form). Everything above the backends is generic.

pub mod classical;
pub mod decomposition;
pub mod engine;
pub mod error;
pub mod integration;
pub mod linalg;
pub mod quantum;
pub mod repertoire;
pub mod system;
pub mod theory;
pub mod tol;

pub use classical::Classical;
pub use decomposition::{Decomposition, DecompositionSet, ElementSet};
pub use engine::{
    concept, major_complex, phi_of_repertoire, qshape, qshape_distance, system_phi, Concept, CutKind,
    EngineConfig, Experience, PhiResult, QShape, Split, SystemPhi,
};
pub use error::{Error, Result};
pub use quantum::Quantum;
pub use repertoire::{Direction, Repertoire, RepertoireValue, Repertoires, Variant};
pub use system::SystemType;
pub use theory::{Backend, Factor, Object, Process, State, Theory};
pub use tol::Tolerances;
