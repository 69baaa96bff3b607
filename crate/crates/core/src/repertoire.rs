//! Cause and effect repertoires.
//!
//! Repertoires are evaluated as state transformers: a mechanism state `m` goes
//! in, a state of the purview (or zero) comes out. The cause side is
//! normalised by a state-dependent scalar, so it is not a linear process.

use std::sync::OnceLock;

use crate::decomposition::ElementSet;
use crate::error::{domain, Error, Result};
use crate::system::{restrict_state, SystemType};
use crate::theory::{assemble, Object, Process, State, Theory};
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Cause,
    Effect,
}

impl Direction {
    pub const BOTH: [Direction; 2] = [Direction::Cause, Direction::Effect];

    pub fn name(self) -> &'static str {
        match self {
            Direction::Cause => "cause",
            Direction::Effect => "effect",
        }
    }
}

/// Which family of repertoires to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Variant {
    /// Dagger-based repertoires available in every theory.
    #[default]
    Generic,
    /// Element-factorised repertoires built from copy and compare maps.
    Iit3,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Generic => "generic",
            Variant::Iit3 => "iit3",
        }
    }
}

/// A repertoire output: a causal state, or zero.
#[derive(Debug, Clone, PartialEq)]
pub struct RepertoireValue<T: Theory> {
    pub state: State<T>,
    pub zero: bool,
    /// Normalisation scalar applied on the cause side (0 for zero values).
    pub lambda: Option<f64>,
}

impl<T: Theory> RepertoireValue<T> {
    fn causal(state: State<T>) -> Self {
        Self {
            state,
            zero: false,
            lambda: None,
        }
    }

    fn zero_on(obj: &Object, lambda: Option<f64>) -> Self {
        Self {
            state: State::zero(obj),
            zero: true,
            lambda,
        }
    }

    /// `u / mass(u)`, or zero when the mass is at most `zero_tol`.
    fn normalise(u: State<T>, zero_tol: f64) -> Self {
        let mass = u.mass();
        if mass <= zero_tol {
            Self::zero_on(u.object(), Some(0.0))
        } else {
            let lambda = 1.0 / mass;
            Self {
                state: u.scaled(lambda),
                zero: false,
                lambda: Some(lambda),
            }
        }
    }

    pub fn object(&self) -> &Object {
        self.state.object()
    }

    /// Distance with the zero convention `d(x, 0) = ‖x‖₁`.
    pub fn distance(&self, other: &RepertoireValue<T>) -> Result<f64> {
        crate::theory::distance_with_zero(&self.state, self.zero, &other.state, other.zero)
    }
}

/// Repertoire evaluator for one system type.
#[derive(Debug, Clone)]
pub struct Repertoire<'a, T: Theory> {
    sys: &'a SystemType<T>,
    backward: Process<T>,
    variant: Variant,
    zero_tol: f64,
}

impl<'a, T: Theory> Repertoire<'a, T> {
    pub fn new(sys: &'a SystemType<T>, variant: Variant) -> Result<Self> {
        Self::with_zero_tolerance(sys, variant, tol::ZERO)
    }

    pub fn with_zero_tolerance(sys: &'a SystemType<T>, variant: Variant, zero_tol: f64) -> Result<Self> {
        if variant == Variant::Iit3 && !T::has_copy() {
            return Err(Error::Unsupported(format!(
                "iit3 repertoires need copy maps, which the {} theory lacks",
                T::BACKEND.name()
            )));
        }
        Ok(Self {
            sys,
            backward: sys.reverse_evolution(),
            variant,
            zero_tol,
        })
    }

    pub fn system(&self) -> &'a SystemType<T> {
        self.sys
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    fn check(&self, m: &State<T>, mech: ElementSet, purview: ElementSet) -> Result<()> {
        let all = self.sys.all();
        if !mech.is_subset(all) || !purview.is_subset(all) {
            return domain(format!("{mech:?} or {purview:?} is not a set of system elements"));
        }
        if *m.object() != self.sys.object().select(&mech.indices()) {
            return domain("mechanism state does not live on the mechanism");
        }
        Ok(())
    }

    /// `discard_P' ∘ iso_P ∘ f ∘ iso_M⁻¹ ∘ (m ⊗ mixed_M')`.
    fn push(&self, f: &Process<T>, m: &State<T>, mech: ElementSet, purview: ElementSet) -> Result<State<T>> {
        let obj = self.sys.object();
        let outside = self.sys.all().difference(mech);
        let noise = State::mixed(&obj.select(&outside.indices()));
        let (mi, oi) = (mech.indices(), outside.indices());
        let input = assemble(obj, &[(&mi, m), (&oi, &noise)])?;
        input.apply(f)?.marginal(&purview.indices())
    }

    fn generic_effect(&self, m: &State<T>, mech: ElementSet, purview: ElementSet) -> Result<RepertoireValue<T>> {
        let out = self.push(self.sys.evolution(), m, mech, purview)?;
        Ok(if out.mass() <= self.zero_tol {
            RepertoireValue::zero_on(out.object(), None)
        } else {
            RepertoireValue::causal(out)
        })
    }

    fn generic_cause(&self, m: &State<T>, mech: ElementSet, purview: ElementSet) -> Result<RepertoireValue<T>> {
        let u = self.push(&self.backward, m, mech, purview)?;
        Ok(RepertoireValue::normalise(u, self.zero_tol))
    }

    /// The unnormalised dagger cause `discard_P' ∘ iso_P ∘ T⁻ ∘ iso_M⁻¹ ∘ (m ⊗ mixed_M')`.
    pub fn unnormalised_cause(&self, m: &State<T>, mech: ElementSet, purview: ElementSet) -> Result<State<T>> {
        self.check(m, mech, purview)?;
        self.push(&self.backward, m, mech, purview)
    }

    /// Effect repertoire of `mech` in state `m` over `purview`.
    pub fn effect(&self, m: &State<T>, mech: ElementSet, purview: ElementSet) -> Result<RepertoireValue<T>> {
        self.check(m, mech, purview)?;
        match self.variant {
            Variant::Generic => self.generic_effect(m, mech, purview),
            Variant::Iit3 => {
                if purview.len() <= 1 {
                    return self.generic_effect(m, mech, purview);
                }
                let parts = purview
                    .indices()
                    .into_iter()
                    .map(|j| self.generic_effect(m, mech, ElementSet::singleton(j)))
                    .collect::<Result<Vec<_>>>()?;
                let p_obj = self.sys.object().select(&purview.indices());
                if parts.iter().any(|p| p.zero) {
                    return Ok(RepertoireValue::zero_on(&p_obj, None));
                }
                let slots: Vec<[usize; 1]> = (0..parts.len()).map(|k| [k]).collect();
                let placed: Vec<(&[usize], &State<T>)> =
                    slots.iter().zip(&parts).map(|(k, p)| (&k[..], &p.state)).collect();
                Ok(RepertoireValue::causal(assemble(&p_obj, &placed)?))
            }
        }
    }

    /// Cause repertoire of `mech` in state `m` over `purview`.
    pub fn cause(&self, m: &State<T>, mech: ElementSet, purview: ElementSet) -> Result<RepertoireValue<T>> {
        self.check(m, mech, purview)?;
        match self.variant {
            Variant::Generic => self.generic_cause(m, mech, purview),
            Variant::Iit3 => {
                if mech.len() <= 1 {
                    return self.generic_cause(m, mech, purview);
                }
                let m_obj = m.object().clone();
                let p_obj = self.sys.object().select(&purview.indices());
                let mut factors = Vec::with_capacity(mech.len());
                for (k, i) in mech.indices().into_iter().enumerate() {
                    let m_i = State::from_parts(m_obj.select(&[k]), T::marginal(m, &[k]));
                    let v = self.generic_cause(&m_i, ElementSet::singleton(i), purview)?;
                    if v.zero {
                        return Ok(RepertoireValue::zero_on(&p_obj, Some(0.0)));
                    }
                    factors.push(v.state);
                }
                let refs: Vec<&State<T>> = factors.iter().collect();
                let product = State::from_parts(p_obj.clone(), T::pointwise_product(&p_obj, &refs)?);
                Ok(RepertoireValue::normalise(product, self.zero_tol))
            }
        }
    }

    pub fn value(&self, dir: Direction, m: &State<T>, mech: ElementSet, purview: ElementSet) -> Result<RepertoireValue<T>> {
        match dir {
            Direction::Cause => self.cause(m, mech, purview),
            Direction::Effect => self.effect(m, mech, purview),
        }
    }

    /// Whether every output on probe states of the mechanism is causal or zero.
    pub fn check_weak_causality(&self, probe: Probe, mech: ElementSet, purview: ElementSet) -> Result<bool> {
        let m_obj = self.sys.object().select(&mech.indices());
        for data in T::probe_states(&m_obj) {
            let m = State::from_parts(m_obj.clone(), data);
            let (state, zero) = match probe {
                Probe::Effect => {
                    let v = self.effect(&m, mech, purview)?;
                    (v.state, v.zero)
                }
                Probe::Cause => {
                    let v = self.cause(&m, mech, purview)?;
                    (v.state, v.zero)
                }
                Probe::UnnormalisedCause => {
                    let u = self.unnormalised_cause(&m, mech, purview)?;
                    let z = u.is_zero(tol::WEAK_CAUSAL);
                    (u, z)
                }
            };
            if !zero && !state.is_causal(tol::WEAK_CAUSAL) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Repertoire kinds that can be probed for weak causality.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Probe {
    Effect,
    Cause,
    /// The dagger cause without normalisation.
    UnnormalisedCause,
}

/// Repertoire values of one system state, memoised per `(direction, M, P)`.
///
/// All values are evaluated at `m = s|_M`.
pub struct Repertoires<'a, T: Theory> {
    rep: Repertoire<'a, T>,
    state: &'a State<T>,
    n: usize,
    cache: Vec<OnceLock<Result<RepertoireValue<T>>>>,
}

impl<'a, T: Theory> Repertoires<'a, T> {
    pub fn new(rep: Repertoire<'a, T>, state: &'a State<T>) -> Result<Self> {
        if state.object() != rep.system().object() {
            return domain("state does not live on the system object");
        }
        let n = rep.system().n_elements();
        if n > 8 {
            return domain("repertoire tables are limited to 8 elements");
        }
        let cache = (0..2usize << (2 * n)).map(|_| OnceLock::new()).collect();
        Ok(Self { rep, state, n, cache })
    }

    pub fn repertoire(&self) -> &Repertoire<'a, T> {
        &self.rep
    }

    pub fn system(&self) -> &'a SystemType<T> {
        self.rep.system()
    }

    pub fn state(&self) -> &'a State<T> {
        self.state
    }

    /// Value at `m = s|_M` over `P`.
    pub fn value(&self, dir: Direction, mech: ElementSet, purview: ElementSet) -> Result<RepertoireValue<T>> {
        let all = self.system().all();
        if !mech.is_subset(all) || !purview.is_subset(all) {
            return domain(format!("{mech:?} or {purview:?} is not a set of system elements"));
        }
        let d = match dir {
            Direction::Cause => 0,
            Direction::Effect => 1,
        };
        let slot = (d << (2 * self.n)) | ((mech.bits() as usize) << self.n) | purview.bits() as usize;
        self.cache[slot]
            .get_or_init(|| {
                let m = restrict_state(self.state, mech)?;
                self.rep.value(dir, &m, mech, purview)
            })
            .clone()
    }

    /// `iso⁻¹ ∘ (value(M → P) ⊗ value(I → P'))`, a state of the whole system.
    pub fn extended(&self, dir: Direction, mech: ElementSet, purview: ElementSet) -> Result<RepertoireValue<T>> {
        self.decomposed(dir, (mech, ElementSet::EMPTY), (purview, ElementSet::EMPTY))
    }

    /// `iso⁻¹ ∘ (value(M₁ → P₁) ⊗ value(M₂ → P₂) ⊗ value(I → P'))`.
    pub fn decomposed(
        &self,
        dir: Direction,
        (m1, m2): (ElementSet, ElementSet),
        (p1, p2): (ElementSet, ElementSet),
    ) -> Result<RepertoireValue<T>> {
        if !m1.intersection(m2).is_empty() || !p1.intersection(p2).is_empty() {
            return domain("split parts overlap");
        }
        let all = self.system().all();
        let rest = all.difference(p1.union(p2));
        let first = self.value(dir, m1, p1)?;
        let second = self.value(dir, m2, p2)?;
        let lambda = first.lambda;
        let obj = self.system().object();
        if first.zero || second.zero {
            return Ok(RepertoireValue::zero_on(obj, lambda.map(|_| 0.0)));
        }
        let unconstrained = self.value(dir, ElementSet::EMPTY, rest)?;
        if unconstrained.zero {
            return Ok(RepertoireValue::zero_on(obj, lambda.map(|_| 0.0)));
        }
        let (i1, i2, ir) = (p1.indices(), p2.indices(), rest.indices());
        let state = assemble(
            obj,
            &[(&i1, &first.state), (&i2, &second.state), (&ir, &unconstrained.state)],
        )?;
        Ok(RepertoireValue {
            state,
            zero: false,
            lambda,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{self, Classical};
    use crate::quantum::{self, Quantum};

    fn bits(n: usize) -> Object {
        Object::from_dims(&vec![2; n])
    }

    fn deterministic(obj: &Object, next: impl Fn(usize) -> usize) -> Process<Classical> {
        let n = obj.dim();
        let mut t = vec![0.0; n * n];
        for x in 0..n {
            t[x * n + next(x)] = 1.0;
        }
        Process::new(obj.clone(), obj.clone(), t).unwrap()
    }

    fn sys(t: Process<Classical>) -> SystemType<Classical> {
        SystemType::unnamed(t.dom().clone(), t).unwrap()
    }

    fn and_or() -> SystemType<Classical> {
        sys(deterministic(&bits(2), |x| {
            let (a, b) = (x & 1, x >> 1);
            (a & b) | ((a | b) << 1)
        }))
    }

    fn point(obj: &Object, x: usize) -> State<Classical> {
        classical::point(obj, x).unwrap()
    }

    const ALL2: ElementSet = ElementSet::from_bits(3);

    #[test]
    fn identity_effect_echoes_the_state() {
        let obj = bits(2);
        let s = sys(Process::identity(&obj));
        let rep = Repertoire::new(&s, Variant::Generic).unwrap();
        let m = classical::distribution(&obj, vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        assert_eq!(rep.effect(&m, ALL2, ALL2).unwrap().state, m);
        let c = rep.cause(&point(&obj, 2), ALL2, ALL2).unwrap();
        assert_eq!(c.state, point(&obj, 2));
    }

    #[test]
    fn constant_uniform_dynamics_forget_the_mechanism() {
        let obj = bits(2);
        let t = Process::<Classical>::discard(&obj)
            .then(&State::mixed(&obj).as_process())
            .unwrap();
        let s = sys(t);
        let rep = Repertoire::new(&s, Variant::Generic).unwrap();
        for x in 0..4 {
            let e = rep.effect(&point(&obj, x), ALL2, ElementSet::singleton(1)).unwrap();
            assert!(e.state.approx_eq(&State::mixed(&bits(1)), 1e-15));
        }
    }

    #[test]
    fn and_or_effect_on_or_element() {
        let s = and_or();
        let rep = Repertoire::new(&s, Variant::Generic).unwrap();
        // Mechanism {1} at a = 1 with b noised: OR output is 1 for sure.
        let e = rep.effect(&point(&bits(1), 1), ElementSet::singleton(0), ElementSet::singleton(1)).unwrap();
        assert_eq!(e.state.data(), &vec![0.0, 1.0]);
        // Mechanism {1} at a = 0: OR output copies the noised b.
        let e = rep.effect(&point(&bits(1), 0), ElementSet::singleton(0), ElementSet::singleton(1)).unwrap();
        assert_eq!(e.state.data(), &vec![0.5, 0.5]);
    }

    #[test]
    fn unreachable_state_has_zero_cause() {
        // AND/OR never produces (AND=1, OR=0).
        let s = and_or();
        let rep = Repertoire::new(&s, Variant::Generic).unwrap();
        let v = rep.cause(&point(&bits(2), 1), ALL2, ALL2).unwrap();
        assert!(v.zero);
        assert_eq!(v.lambda, Some(0.0));
    }

    #[test]
    fn copy_cause_inverts_the_copy() {
        // Both bits copy bit 1; at (1,1) the previous bit 1 must have been 1.
        let s = sys(deterministic(&bits(2), |x| (x & 1) * 3));
        let rep = Repertoire::new(&s, Variant::Generic).unwrap();
        let v = rep.cause(&point(&bits(2), 3), ALL2, ElementSet::singleton(0)).unwrap();
        assert_eq!(v.state.data(), &vec![0.0, 1.0]);
        assert_eq!(v.lambda, Some(0.5));
    }

    #[test]
    fn iit3_matches_generic_on_single_elements() {
        let s = and_or();
        let generic = Repertoire::new(&s, Variant::Generic).unwrap();
        let iit3 = Repertoire::new(&s, Variant::Iit3).unwrap();
        for mech in ALL2.subsets() {
            let m_obj = bits(mech.len());
            for x in 0..m_obj.dim() {
                let m = point(&m_obj, x);
                for j in 0..2 {
                    let p = ElementSet::singleton(j);
                    assert_eq!(generic.effect(&m, mech, p).unwrap(), iit3.effect(&m, mech, p).unwrap());
                }
                if mech.len() == 1 {
                    for p in ALL2.subsets() {
                        assert_eq!(generic.cause(&m, mech, p).unwrap(), iit3.cause(&m, mech, p).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn iit3_effect_is_product_of_elements() {
        let s = and_or();
        let iit3 = Repertoire::new(&s, Variant::Iit3).unwrap();
        // Mechanism {1} at a = 0: AND is 0, OR copies noise.
        let e = iit3.effect(&point(&bits(1), 0), ElementSet::singleton(0), ALL2).unwrap();
        assert_eq!(e.state.data(), &vec![0.5, 0.0, 0.5, 0.0]);
    }

    #[test]
    fn iit3_is_rejected_without_copy() {
        let obj = bits(1);
        let s = SystemType::<Quantum>::unnamed(obj.clone(), Process::identity(&obj)).unwrap();
        assert!(matches!(Repertoire::new(&s, Variant::Iit3), Err(Error::Unsupported(_))));
    }

    #[test]
    fn weak_causality() {
        let s = and_or();
        let rep = Repertoire::new(&s, Variant::Generic).unwrap();
        for mech in ALL2.subsets() {
            for p in ALL2.subsets() {
                assert!(rep.check_weak_causality(Probe::Effect, mech, p).unwrap());
                assert!(rep.check_weak_causality(Probe::Cause, mech, p).unwrap());
            }
        }
        // AND/OR is not doubly stochastic, so the raw dagger overshoots.
        assert!(!rep.check_weak_causality(Probe::UnnormalisedCause, ALL2, ALL2).unwrap());
        let swap = sys(deterministic(&bits(2), |x| ((x & 1) << 1) | (x >> 1)));
        let rep = Repertoire::new(&swap, Variant::Generic).unwrap();
        assert!(rep.check_weak_causality(Probe::UnnormalisedCause, ALL2, ALL2).unwrap());
    }

    #[test]
    fn extended_with_full_purview_is_the_value() {
        let s = and_or();
        let st = point(&bits(2), 3);
        let reps = Repertoires::new(Repertoire::new(&s, Variant::Generic).unwrap(), &st).unwrap();
        for dir in Direction::BOTH {
            let v = reps.value(dir, ALL2, ALL2).unwrap();
            let e = reps.extended(dir, ALL2, ALL2).unwrap();
            assert_eq!(v.state, e.state);
        }
    }

    #[test]
    fn trivial_split_reproduces_extended() {
        let s = and_or();
        let st = point(&bits(2), 2);
        let reps = Repertoires::new(Repertoire::new(&s, Variant::Generic).unwrap(), &st).unwrap();
        for dir in Direction::BOTH {
            for mech in ALL2.subsets() {
                for p in ALL2.subsets() {
                    let e = reps.extended(dir, mech, p).unwrap();
                    let d = reps.decomposed(dir, (mech, ElementSet::EMPTY), (p, ElementSet::EMPTY)).unwrap();
                    assert_eq!(e, d);
                }
            }
        }
    }

    #[test]
    fn product_dynamics_decompose_along_the_product() {
        let a = classical::table(&bits(1), &bits(1), &[vec![0.9, 0.1], vec![0.3, 0.7]]).unwrap();
        let b = classical::table(&bits(1), &bits(1), &[vec![0.2, 0.8], vec![0.6, 0.4]]).unwrap();
        let s = sys(a.tensor(&b));
        let st = point(&bits(2), 1);
        let reps = Repertoires::new(Repertoire::new(&s, Variant::Generic).unwrap(), &st).unwrap();
        let (one, two) = (ElementSet::singleton(0), ElementSet::singleton(1));
        for dir in Direction::BOTH {
            let e = reps.extended(dir, ALL2, ALL2).unwrap();
            let d = reps.decomposed(dir, (one, two), (one, two)).unwrap();
            assert!(e.state.approx_eq(&d.state, 1e-15));
        }
    }

    #[test]
    fn quantum_diagonal_embedding_matches_classical() {
        let s = and_or();
        let q = SystemType::<Quantum>::unnamed(bits(2), quantum::embed_classical(s.evolution())).unwrap();
        let crep = Repertoire::new(&s, Variant::Generic).unwrap();
        let qrep = Repertoire::new(&q, Variant::Generic).unwrap();
        for mech in ALL2.subsets() {
            let m_obj = bits(mech.len());
            for x in 0..m_obj.dim() {
                let cm = point(&m_obj, x);
                let qm = quantum::embed_distribution(&cm);
                for p in ALL2.subsets() {
                    for dir in Direction::BOTH {
                        let c = crep.value(dir, &cm, mech, p).unwrap();
                        let v = qrep.value(dir, &qm, mech, p).unwrap();
                        assert_eq!(c.zero, v.zero);
                        let embedded = quantum::embed_distribution(&c.state);
                        assert!(embedded.approx_eq(&v.state, 1e-12));
                    }
                }
            }
        }
    }
}
