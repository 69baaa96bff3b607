//! Numeric tolerances used across the engine.

/// Causality and co-causality checks.
pub const CAUSAL: f64 = 1e-9;
/// Exact-algebra identities on classical tables.
pub const EXACT: f64 = 1e-12;
/// Mass below which an unnormalised repertoire value is declared zero.
pub const ZERO: f64 = 1e-12;
/// Complete positivity and trace preservation of quantum channels.
pub const CPTP: f64 = 1e-8;
/// Smallest admissible eigenvalue of a density matrix.
pub const PSD: f64 = -1e-9;
/// Weak-causality check on repertoire outputs.
pub const WEAK_CAUSAL: f64 = 1e-8;
/// Window inside which two integration values count as tied.
pub const TIE: f64 = 1e-9;
/// Integration values at or below this are reported as exactly zero.
pub const PHI_FLOOR: f64 = 1e-12;

/// Tolerances an engine run is configured with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub causal: f64,
    pub zero: f64,
    pub tie: f64,
    pub phi_floor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            causal: CAUSAL,
            zero: ZERO,
            tie: TIE,
            phi_floor: PHI_FLOOR,
        }
    }
}

/// Clamp numerical noise in a nonnegative integration value.
pub fn snap(value: f64, floor: f64) -> f64 {
    if value <= floor {
        0.0
    } else {
        value
    }
}
