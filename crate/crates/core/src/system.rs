//! System types, subsystems and cuts.

use crate::decomposition::{Decomposition, DecompositionSet, ElementSet};
use crate::error::{domain, Error, Result};
use crate::theory::{Object, Process, State, Theory};
use crate::tol;

/// An element-factored object with a causal time evolution.
///
/// The cause side uses `reverse` when one is given and the dagger of the
/// evolution otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemType<T: Theory> {
    object: Object,
    names: Vec<String>,
    evolution: Process<T>,
    reverse: Option<Process<T>>,
}

impl<T: Theory> SystemType<T> {
    pub fn new(
        object: Object,
        names: Vec<String>,
        evolution: Process<T>,
        reverse: Option<Process<T>>,
    ) -> Result<Self> {
        if names.len() != object.n_factors() {
            return domain(format!(
                "{} names given for {} elements",
                names.len(),
                object.n_factors()
            ));
        }
        if object.n_factors() > ElementSet::MAX_ELEMENTS {
            return domain("too many elements");
        }
        if *evolution.dom() != object || *evolution.cod() != object {
            return domain("evolution must be an endomorphism of the system object");
        }
        if !evolution.is_causal(tol::CAUSAL) {
            return Err(Error::Validation("time evolution is not causal".into()));
        }
        if let Some(r) = &reverse {
            if *r.dom() != object || *r.cod() != object {
                return domain("reverse evolution must be an endomorphism of the system object");
            }
        }
        Ok(Self {
            object,
            names,
            evolution,
            reverse,
        })
    }

    /// Names default to `1, 2, ..`.
    pub fn unnamed(object: Object, evolution: Process<T>) -> Result<Self> {
        let names = (1..=object.n_factors()).map(|i| i.to_string()).collect();
        Self::new(object, names, evolution, None)
    }

    /// The trivial system on `I` with identity evolution.
    pub fn trivial() -> Self {
        Self {
            object: Object::unit(),
            names: Vec::new(),
            evolution: Process::identity(&Object::unit()),
            reverse: None,
        }
    }

    pub(crate) fn from_parts(
        object: Object,
        names: Vec<String>,
        evolution: Process<T>,
        reverse: Option<Process<T>>,
    ) -> Self {
        Self {
            object,
            names,
            evolution,
            reverse,
        }
    }

    pub fn object(&self) -> &Object {
        &self.object
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn n_elements(&self) -> usize {
        self.object.n_factors()
    }

    pub fn all(&self) -> ElementSet {
        ElementSet::full(self.n_elements())
    }

    pub fn evolution(&self) -> &Process<T> {
        &self.evolution
    }

    pub fn explicit_reverse(&self) -> Option<&Process<T>> {
        self.reverse.as_ref()
    }

    /// The explicit reverse evolution, or the dagger of the evolution.
    pub fn reverse_evolution(&self) -> Process<T> {
        self.reverse.clone().unwrap_or_else(|| self.evolution.dagger())
    }

    pub fn decomposition_set(&self) -> DecompositionSet {
        DecompositionSet::from_elements(&self.object)
    }

    pub fn decomposition(&self, part: ElementSet) -> Result<Decomposition> {
        Decomposition::new(&self.object, part)
    }

    fn with_evolution(&self, evolution: Process<T>, reverse: Option<Process<T>>) -> Self {
        Self::from_parts(self.object.clone(), self.names.clone(), evolution, reverse)
    }
}

/// `s|_J = (id ⊗ discard) ∘ iso_J ∘ s`.
pub fn restrict_state<T: Theory>(s: &State<T>, part: ElementSet) -> Result<State<T>> {
    if !part.is_subset(ElementSet::full(s.object().n_factors())) {
        return domain(format!("{part:?} is not a subset of the elements"));
    }
    s.marginal(&part.indices())
}

fn check_state<T: Theory>(sys: &SystemType<T>, s: &State<T>) -> Result<()> {
    if s.object() != sys.object() {
        return domain("state does not live on the system object");
    }
    if !s.is_causal(tol::CAUSAL) {
        return Err(Error::Validation("system state is not causal".into()));
    }
    Ok(())
}

/// `discard_C' ∘ iso ∘ f ∘ iso⁻¹ ∘ (id_C ⊗ input)`: the part of `f` on `C`
/// with the complement's input fed by `input` and its output discarded.
fn conditioned<T: Theory>(f: &Process<T>, d: &Decomposition, input: &State<T>) -> Result<Process<T>> {
    let c = d.left_object();
    let c_rest = d.right_object();
    let id_c = Process::<T>::identity(&c);
    id_c.tensor(&input.as_process())
        .then(&d.iso_inverse())?
        .then(f)?
        .then(&d.iso())?
        .then(&id_c.tensor(&Process::discard(&c_rest)))
}

/// The subsystem on `part`, conditioned on the complement being in `s|_J'`.
pub fn subsystem<T: Theory>(sys: &SystemType<T>, s: &State<T>, part: ElementSet) -> Result<SystemType<T>> {
    check_state(sys, s)?;
    let d = sys.decomposition(part)?;
    let outside = restrict_state(s, d.right())?;
    let evolution = conditioned(&sys.evolution, &d, &outside)?;
    let reverse = match &sys.reverse {
        Some(r) => Some(conditioned(r, &d, &outside)?),
        None => None,
    };
    let names = part.indices().into_iter().map(|i| sys.names[i].clone()).collect();
    Ok(SystemType::from_parts(d.left_object(), names, evolution, reverse))
}

/// `f` restricted to `part` with the complement's input replaced by noise.
fn noised_part<T: Theory>(f: &Process<T>, obj: &Object, part: ElementSet) -> Result<Process<T>> {
    let d = Decomposition::new(obj, part)?;
    conditioned(f, &d, &State::mixed(&d.right_object()))
}

fn symmetric_cut_process<T: Theory>(f: &Process<T>, obj: &Object, part: ElementSet) -> Result<Process<T>> {
    let d = Decomposition::new(obj, part)?;
    let inner = noised_part(f, obj, part)?;
    let outer = noised_part(f, obj, d.right())?;
    d.iso::<T>().then(&inner.tensor(&outer))?.then(&d.iso_inverse())
}

/// Cuts every influence between `part` and its complement.
///
/// The cut evolution is `iso⁻¹ ∘ (T→C ⊗ T→C') ∘ iso`, where `T→C` feeds the
/// completely mixed state into the complement's input and discards its output.
/// A reverse evolution, if present, is cut the same way.
pub fn symmetric_cut<T: Theory>(sys: &SystemType<T>, part: ElementSet) -> Result<SystemType<T>> {
    let all = sys.all();
    if part.is_empty() || part == all || !part.is_subset(all) {
        return domain(format!("{part:?} is not a nontrivial part of the system"));
    }
    let evolution = symmetric_cut_process(&sys.evolution, &sys.object, part)?;
    let reverse = match &sys.reverse {
        Some(r) => Some(symmetric_cut_process(r, &sys.object, part)?),
        None => None,
    };
    Ok(sys.with_evolution(evolution, reverse))
}

/// Per-element channels `T_i : S -> S_i` (all other outputs discarded).
pub fn element_channels<T: Theory>(f: &Process<T>) -> Result<Vec<Process<T>>> {
    let obj = f.cod();
    (0..obj.n_factors())
        .map(|i| {
            let d = Decomposition::new(obj, ElementSet::singleton(i))?;
            let keep = Process::<T>::identity(&d.left_object()).tensor(&Process::discard(&d.right_object()));
            f.then(&d.iso())?.then(&keep)
        })
        .collect()
}

/// `(T_1 ⊗ .. ⊗ T_n) ∘ copy_n`: the process whose elements update independently.
fn recombine<T: Theory>(obj: &Object, channels: &[Process<T>]) -> Result<Process<T>> {
    let fan_out = (0..channels.len()).fold(Object::unit(), |acc, _| acc.tensor(obj));
    let copy = Process::from_parts(obj.clone(), fan_out, T::copy(obj, channels.len())?);
    let parallel = channels
        .iter()
        .fold(Process::<T>::identity(&Object::unit()), |acc, c| acc.tensor(c));
    copy.then(&parallel)
}

/// Whether `T(s, t) = Π_i T_i(s, t_i)` within `tol`.
pub fn conditional_independence_defect<T: Theory>(f: &Process<T>) -> Result<f64> {
    let obj = f.cod();
    if obj.is_unit() {
        return Ok(0.0);
    }
    let rebuilt = recombine(obj, &element_channels(f)?)?;
    f.max_abs_diff(&rebuilt)
}

/// Conditional independence of the system's evolution (within 1e-9).
pub fn check_conditional_independence<T: Theory>(sys: &SystemType<T>) -> Result<bool> {
    Ok(conditional_independence_defect(&sys.evolution)? <= tol::CAUSAL)
}

/// Replaces every influence from `part` onto the rest by noise, keeping all
/// influences into `part` intact.
///
/// Each element channel `T_i` outside `part` is precomposed with
/// `iso⁻¹ ∘ (mixed ∘ discard ⊗ id) ∘ iso` on the inputs of `part`; the
/// channels are recombined through the copy map.
pub fn directional_cut<T: Theory>(sys: &SystemType<T>, part: ElementSet) -> Result<SystemType<T>> {
    if !T::has_copy() {
        return Err(Error::Unsupported(format!(
            "directional cuts need copy maps, which the {} theory lacks",
            T::BACKEND.name()
        )));
    }
    if sys.reverse.is_some() {
        return Err(Error::Unsupported(
            "directional cuts are not defined for an explicit reverse evolution".into(),
        ));
    }
    let all = sys.all();
    if !part.is_subset(all) {
        return domain(format!("{part:?} is not a subset of the elements"));
    }
    if !check_conditional_independence(sys)? {
        return Err(Error::Validation(
            "evolution is not conditionally independent across elements".into(),
        ));
    }
    let obj = &sys.object;
    let d = Decomposition::new(obj, part)?;
    let c = d.left_object();
    let noise_on_c = Process::<T>::discard(&c)
        .then(&State::mixed(&c).as_process())?
        .tensor(&Process::identity(&d.right_object()));
    let noise = d.iso::<T>().then(&noise_on_c)?.then(&d.iso_inverse())?;
    let channels = element_channels(&sys.evolution)?
        .into_iter()
        .enumerate()
        .map(|(i, ch)| if part.contains(i) { Ok(ch) } else { noise.then(&ch) })
        .collect::<Result<Vec<_>>>()?;
    let evolution = recombine(obj, &channels)?;
    Ok(sys.with_evolution(evolution, None))
}
