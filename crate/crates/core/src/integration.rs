//! Integration of a family of processes indexed by pairs of decompositions.

use crate::decomposition::{Decomposition, DecompositionSet};
use crate::error::{domain, Result};
use crate::theory::{Process, State, Theory};

#[derive(Debug, Clone, PartialEq)]
pub struct FamilyIntegration {
    pub value: f64,
    /// The first minimising pair of decompositions of the domain and codomain.
    pub witness: Option<(Decomposition, Decomposition)>,
    /// Set when no candidate pair exists; `value` is then 0 by convention.
    pub empty: bool,
}

/// `iso'⁻¹ ∘ (f^B_A ⊗ f^{B'}_{A'}) ∘ iso` for `d1 = (A, A')`, `d2 = (B, B')`.
pub fn split_process<T, F>(family: &F, d1: &Decomposition, d2: &Decomposition) -> Result<Process<T>>
where
    T: Theory,
    F: Fn(&Decomposition, &Decomposition) -> Result<Process<T>>,
{
    let inner = family(d1, d2)?;
    let outer = family(&d1.complement(), &d2.complement())?;
    d1.iso::<T>().then(&inner.tensor(&outer))?.then(&d2.iso_inverse())
}

/// Least distance between `f = family(1, 1)` and its split forms over
/// `dom_set × cod_set`.
///
/// Both pairs made of trivial decompositions, `(1, 1)` and `(0, 0)`, are left
/// out: each reproduces `f` up to a scalar factor of the family.
pub fn family_integration<T, F, D>(
    family: F,
    dom_set: &DecompositionSet,
    cod_set: &DecompositionSet,
    distance: D,
) -> Result<FamilyIntegration>
where
    T: Theory,
    F: Fn(&Decomposition, &Decomposition) -> Result<Process<T>>,
    D: Fn(&Process<T>, &Process<T>) -> Result<f64>,
{
    let f = family(&Decomposition::top(dom_set.parent()), &Decomposition::top(cod_set.parent()))?;
    let mut best: Option<(f64, Decomposition, Decomposition)> = None;
    for d1 in dom_set.members() {
        for d2 in cod_set.members() {
            if (d1.is_top() && d2.is_top()) || (d1.is_bottom() && d2.is_bottom()) {
                continue;
            }
            let d = distance(&f, &split_process(&family, d1, d2)?)?;
            if best.as_ref().map_or(true, |(b, _, _)| d < *b) {
                best = Some((d, d1.clone(), d2.clone()));
            }
        }
    }
    Ok(match best {
        None => FamilyIntegration {
            value: 0.0,
            witness: None,
            empty: true,
        },
        Some((value, d1, d2)) => FamilyIntegration {
            value,
            witness: Some((d1, d2)),
            empty: false,
        },
    })
}

/// The restriction family of `f`: `f|^B_A = retraction_B ∘ f ∘ section_A`,
/// feeding noise into `A'` and discarding `B'`.
pub fn restriction_family<T: Theory>(
    f: &Process<T>,
) -> impl Fn(&Decomposition, &Decomposition) -> Result<Process<T>> + '_ {
    move |d1, d2| {
        if d1.parent() != f.dom() || d2.parent() != f.cod() {
            return domain("decompositions do not match the process");
        }
        d1.section::<T>().then(f)?.then(&d2.retraction())
    }
}

/// `d_m(f, g) = d(f ∘ m, g ∘ m)` for the backend distance on causal states.
pub fn state_dependent_distance<T: Theory>(m: &State<T>, f: &Process<T>, g: &Process<T>) -> Result<f64> {
    m.apply(f)?.distance(&m.apply(g)?)
}
