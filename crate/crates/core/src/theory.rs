//! The process-theory contract.
//!
//! A backend ([`Theory`]) supplies concrete payloads for processes together
//! with sequential and parallel composition, symmetries, discarding, the
//! completely mixed state, a dagger and a distance on causal states.
//! [`Process`] and [`State`] wrap those payloads with their domain and
//! codomain [`Object`]s and check shapes before delegating.
//!
//! Objects are finite tensor products of *factors* (elements). Product states
//! are indexed little-endian: the first factor varies fastest, so the basis
//! index of `(a_1, .., a_k)` is `a_1 + d_1 * (a_2 + d_2 * (..))`.

use std::fmt::Debug;
use std::sync::Arc;

use crate::error::{domain, Error, Result};

/// Which concrete theory a payload belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Backend {
    Classical,
    Quantum,
}

impl Backend {
    pub fn name(self) -> &'static str {
        match self {
            Backend::Classical => "classical",
            Backend::Quantum => "quantum",
        }
    }
}

/// One tensor factor of an object.
///
/// `metric` is an optional `dim x dim` ground metric used by the classical
/// backend; quantum objects ignore it.
#[derive(Debug, Clone, PartialEq)]
pub struct Factor {
    pub dim: usize,
    pub metric: Option<Arc<[f64]>>,
}

impl Factor {
    pub fn new(dim: usize) -> Self {
        Self { dim, metric: None }
    }

    pub fn with_metric(dim: usize, table: Vec<f64>) -> Result<Self> {
        check_metric(dim, &table)?;
        Ok(Self {
            dim,
            metric: Some(table.into()),
        })
    }
}

fn check_metric(dim: usize, table: &[f64]) -> Result<()> {
    if table.len() != dim * dim {
        return Err(Error::Validation(format!(
            "metric table has {} entries, expected {}",
            table.len(),
            dim * dim
        )));
    }
    let d = |a: usize, b: usize| table[a * dim + b];
    for a in 0..dim {
        if d(a, a) != 0.0 {
            return Err(Error::Validation(format!("metric d({a},{a}) is not zero")));
        }
        for b in 0..dim {
            if !d(a, b).is_finite() || d(a, b) < 0.0 {
                return Err(Error::Validation(format!("metric d({a},{b}) is not a nonnegative number")));
            }
            if a != b && d(a, b) == 0.0 {
                return Err(Error::Validation(format!("metric d({a},{b}) vanishes off the diagonal")));
            }
            if d(a, b) != d(b, a) {
                return Err(Error::Validation(format!("metric is not symmetric at ({a},{b})")));
            }
            for c in 0..dim {
                if d(a, c) > d(a, b) + d(b, c) + 1e-12 {
                    return Err(Error::Validation(format!(
                        "metric violates the triangle inequality at ({a},{b},{c})"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// An object of a process theory: an ordered tensor product of factors.
///
/// The empty product is the trivial object `I`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Object {
    factors: Vec<Factor>,
}

impl Object {
    pub fn unit() -> Self {
        Self::default()
    }

    pub fn new(factors: Vec<Factor>) -> Result<Self> {
        for (i, f) in factors.iter().enumerate() {
            if f.dim == 0 {
                return domain(format!("factor {i} has dimension 0"));
            }
            if let Some(m) = &f.metric {
                check_metric(f.dim, m)?;
            }
        }
        Ok(Self { factors })
    }

    /// Object with the given factor dimensions and no metric tables.
    pub fn from_dims(dims: &[usize]) -> Self {
        Self::new(dims.iter().map(|&d| Factor::new(d)).collect()).expect("dimension must be positive")
    }

    /// Single-factor object.
    pub fn single(dim: usize) -> Self {
        Self::from_dims(&[dim])
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn n_factors(&self) -> usize {
        self.factors.len()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.dim).collect()
    }

    pub fn dim(&self) -> usize {
        self.factors.iter().map(|f| f.dim).product()
    }

    pub fn is_unit(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn tensor(&self, other: &Object) -> Object {
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        Object { factors }
    }

    /// The object formed by the factors at `positions`, in that order.
    pub fn select(&self, positions: &[usize]) -> Object {
        Object {
            factors: positions.iter().map(|&p| self.factors[p].clone()).collect(),
        }
    }

    /// Little-endian strides of the factors.
    pub fn strides(&self) -> Vec<usize> {
        let mut acc = 1;
        self.factors
            .iter()
            .map(|f| {
                let s = acc;
                acc *= f.dim;
                s
            })
            .collect()
    }

    /// Per-factor digits of a basis index.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        self.factors
            .iter()
            .map(|f| {
                let d = index % f.dim;
                index /= f.dim;
                d
            })
            .collect()
    }

    /// Basis index of per-factor digits.
    pub fn index_of(&self, digits: &[usize]) -> usize {
        digits
            .iter()
            .zip(&self.factors)
            .rev()
            .fold(0, |acc, (&d, f)| acc * f.dim + d)
    }

    /// For every basis index of `self`, the index of its restriction to the
    /// factors at `positions` (taken in the given order).
    pub fn sub_indices(&self, positions: &[usize]) -> Vec<usize> {
        let sub_strides: Vec<(usize, usize)> = {
            let mut acc = 1;
            positions
                .iter()
                .map(|&p| {
                    let s = acc;
                    acc *= self.factors[p].dim;
                    (p, s)
                })
                .collect()
        };
        (0..self.dim())
            .map(|x| {
                let digits = self.digits(x);
                sub_strides.iter().map(|&(p, s)| digits[p] * s).sum()
            })
            .collect()
    }

    /// `true` when no factor carries a metric table, in which case the
    /// classical ground metric is the point metric on the whole product.
    pub fn has_point_metric(&self) -> bool {
        self.factors.iter().all(|f| f.metric.is_none())
    }

    /// Full ground metric on basis elements (row-major `dim x dim`).
    ///
    /// Without tables this is the point metric `1 - delta`. Otherwise it is
    /// the sum metric over factors, with the point metric on factors that
    /// carry no table.
    pub fn ground_metric(&self) -> Vec<f64> {
        let n = self.dim();
        let mut table = vec![0.0; n * n];
        if self.has_point_metric() {
            for a in 0..n {
                for b in 0..n {
                    table[a * n + b] = if a == b { 0.0 } else { 1.0 };
                }
            }
            return table;
        }
        let digits: Vec<Vec<usize>> = (0..n).map(|x| self.digits(x)).collect();
        for a in 0..n {
            for b in 0..n {
                table[a * n + b] = self
                    .factors
                    .iter()
                    .enumerate()
                    .map(|(k, f)| {
                        let (x, y) = (digits[a][k], digits[b][k]);
                        match &f.metric {
                            Some(m) => m[x * f.dim + y],
                            None if x == y => 0.0,
                            None => 1.0,
                        }
                    })
                    .sum();
            }
        }
        table
    }
}

/// A concrete process theory.
///
/// Implementations only see payloads whose shapes already match the
/// objects; [`Process`] and [`State`] perform the checks.
pub trait Theory: Copy + Clone + Debug + PartialEq + Send + Sync + 'static {
    type Data: Clone + Debug + PartialEq + Send + Sync;

    const BACKEND: Backend;

    /// Checks the payload shape and positivity (nonnegativity / complete positivity).
    fn validate(dom: &Object, cod: &Object, data: &Self::Data) -> Result<()>;

    fn identity(obj: &Object) -> Self::Data;
    fn zero(dom: &Object, cod: &Object) -> Self::Data;
    fn scalar(value: f64) -> Self::Data;
    /// Value of a process `I -> I`.
    fn scalar_value(data: &Self::Data) -> f64;

    /// `g ∘ f`.
    fn compose(f: &Process<Self>, g: &Process<Self>) -> Self::Data;
    fn tensor(f: &Process<Self>, g: &Process<Self>) -> Self::Data;
    /// Symmetry `obj -> obj.select(order)` sending factor `order[k]` to slot `k`.
    fn permutation(obj: &Object, order: &[usize]) -> Self::Data;
    /// The discarding effect `obj -> I`.
    fn discard(obj: &Object) -> Self::Data;
    /// The completely mixed state `I -> obj`.
    fn mixed(obj: &Object) -> Self::Data;
    fn dagger(f: &Process<Self>) -> Self::Data;

    fn scale(data: &Self::Data, factor: f64) -> Self::Data;
    fn max_abs_diff(a: &Self::Data, b: &Self::Data) -> f64;

    /// `f ∘ s` for a state `s`, evaluated directly.
    fn apply(f: &Process<Self>, s: &State<Self>) -> Self::Data;
    /// `(id ⊗ discard) ∘ iso ∘ s`, keeping the factors at `keep` in that order.
    fn marginal(s: &State<Self>, keep: &[usize]) -> Self::Data;
    /// `iso⁻¹ ∘ (s_1 ⊗ .. ⊗ s_k)` where part `i` sits on the factors `parts[i].0`
    /// of `obj`; the parts must partition the factors.
    fn assemble(obj: &Object, parts: &[(&[usize], &State<Self>)]) -> Self::Data;
    /// `discard ∘ s`.
    fn mass(s: &State<Self>) -> f64;
    /// `‖s‖₁` (total variation mass or trace norm).
    fn norm1(s: &State<Self>) -> f64;
    /// Distance between two causal states of `obj`.
    fn distance(obj: &Object, a: &Self::Data, b: &Self::Data) -> Result<f64>;

    /// States used to probe weak causality: basis states, plus random samples
    /// where basis states do not determine a map.
    fn probe_states(obj: &Object) -> Vec<Self::Data>;

    /// Whether the theory has canonical copy/compare maps.
    fn has_copy() -> bool {
        false
    }

    /// Copying `obj -> obj^{⊗k}`.
    fn copy(_obj: &Object, _k: usize) -> Result<Self::Data> {
        Err(Error::Unsupported(format!(
            "{} theory has no copy maps",
            Self::BACKEND.name()
        )))
    }

    /// Comparison `obj^{⊗k} -> obj`.
    fn compare(_obj: &Object, _k: usize) -> Result<Self::Data> {
        Err(Error::Unsupported(format!(
            "{} theory has no comparison maps",
            Self::BACKEND.name()
        )))
    }

    /// `compare ∘ (s_1 ⊗ .. ⊗ s_k)` for states of the same object.
    fn pointwise_product(obj: &Object, states: &[&State<Self>]) -> Result<Self::Data> {
        let mut joint = State::<Self>::unit();
        let mut big = Object::unit();
        for s in states {
            joint = joint.tensor(s);
            big = big.tensor(obj);
        }
        let cmp = Process::<Self>::from_parts(big, obj.clone(), Self::compare(obj, states.len())?);
        Ok(joint.apply(&cmp)?.data)
    }
}

/// A process `dom -> cod` of theory `T`.
#[derive(Debug, Clone, PartialEq)]
pub struct Process<T: Theory> {
    dom: Object,
    cod: Object,
    data: T::Data,
}

impl<T: Theory> Process<T> {
    /// Builds a process, validating shape and positivity.
    pub fn new(dom: Object, cod: Object, data: T::Data) -> Result<Self> {
        T::validate(&dom, &cod, &data)?;
        Ok(Self { dom, cod, data })
    }

    pub(crate) fn from_parts(dom: Object, cod: Object, data: T::Data) -> Self {
        Self { dom, cod, data }
    }

    pub fn dom(&self) -> &Object {
        &self.dom
    }

    pub fn cod(&self) -> &Object {
        &self.cod
    }

    pub fn data(&self) -> &T::Data {
        &self.data
    }

    pub fn into_data(self) -> T::Data {
        self.data
    }

    pub fn identity(obj: &Object) -> Self {
        Self::from_parts(obj.clone(), obj.clone(), T::identity(obj))
    }

    pub fn zero(dom: &Object, cod: &Object) -> Self {
        Self::from_parts(dom.clone(), cod.clone(), T::zero(dom, cod))
    }

    /// A scalar `I -> I`.
    pub fn scalar(value: f64) -> Self {
        Self::from_parts(Object::unit(), Object::unit(), T::scalar(value))
    }

    /// Value of a scalar process.
    pub fn scalar_value(&self) -> Result<f64> {
        if !self.dom.is_unit() || !self.cod.is_unit() {
            return domain("process is not a scalar");
        }
        Ok(T::scalar_value(&self.data))
    }

    pub fn discard(obj: &Object) -> Self {
        Self::from_parts(obj.clone(), Object::unit(), T::discard(obj))
    }

    /// Symmetry sending factor `order[k]` of `obj` to slot `k`.
    pub fn permutation(obj: &Object, order: &[usize]) -> Result<Self> {
        let mut seen = vec![false; obj.n_factors()];
        if order.len() != obj.n_factors() {
            return domain("permutation length does not match the factor count");
        }
        for &p in order {
            if p >= seen.len() || seen[p] {
                return domain("order is not a permutation of the factors");
            }
            seen[p] = true;
        }
        Ok(Self::from_parts(obj.clone(), obj.select(order), T::permutation(obj, order)))
    }

    /// The swap `a ⊗ b -> b ⊗ a`.
    pub fn swap(a: &Object, b: &Object) -> Self {
        let na = a.n_factors();
        let nb = b.n_factors();
        let order: Vec<usize> = (na..na + nb).chain(0..na).collect();
        Self::permutation(&a.tensor(b), &order).expect("swap order is a permutation")
    }

    /// `g ∘ self`.
    pub fn then(&self, g: &Process<T>) -> Result<Self> {
        compose(self, g)
    }

    pub fn tensor(&self, g: &Process<T>) -> Self {
        tensor(self, g)
    }

    pub fn dagger(&self) -> Self {
        Self::from_parts(self.cod.clone(), self.dom.clone(), T::dagger(self))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::from_parts(self.dom.clone(), self.cod.clone(), T::scale(&self.data, factor))
    }

    /// Whether `discard ∘ self = discard` within `tol`.
    pub fn is_causal(&self, tol: f64) -> bool {
        let lhs = compose(self, &Process::discard(&self.cod)).expect("shapes match");
        T::max_abs_diff(&lhs.data, &T::discard(&self.dom)) <= tol
    }

    /// Whether `self` preserves the completely mixed state within `tol`.
    pub fn is_cocausal(&self, tol: f64) -> bool {
        let mixed = State::<T>::mixed(&self.dom);
        let out = T::apply(self, &mixed);
        T::max_abs_diff(&out, &T::mixed(&self.cod)) <= tol
    }

    /// Largest entrywise difference to a process of the same type.
    pub fn max_abs_diff(&self, other: &Process<T>) -> Result<f64> {
        if self.dom != other.dom || self.cod != other.cod {
            return domain("processes have different types");
        }
        Ok(T::max_abs_diff(&self.data, &other.data))
    }

    pub fn approx_eq(&self, other: &Process<T>, tol: f64) -> bool {
        self.max_abs_diff(other).map(|d| d <= tol).unwrap_or(false)
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        T::max_abs_diff(&self.data, &T::zero(&self.dom, &self.cod)) <= tol
    }

    /// Reads a process `I -> X` as a state of `X`.
    pub fn into_state(self) -> Result<State<T>> {
        if !self.dom.is_unit() {
            return domain("process has a nontrivial domain");
        }
        Ok(State {
            object: self.cod,
            data: self.data,
        })
    }
}

/// `g ∘ f`; fails unless `cod(f) = dom(g)`.
pub fn compose<T: Theory>(f: &Process<T>, g: &Process<T>) -> Result<Process<T>> {
    if f.cod != g.dom {
        return domain(format!(
            "cannot compose: codomain {:?} does not match domain {:?}",
            f.cod.dims(),
            g.dom.dims()
        ));
    }
    Ok(Process::from_parts(f.dom.clone(), g.cod.clone(), T::compose(f, g)))
}

/// `f ⊗ g`.
pub fn tensor<T: Theory>(f: &Process<T>, g: &Process<T>) -> Process<T> {
    Process::from_parts(f.dom.tensor(&g.dom), f.cod.tensor(&g.cod), T::tensor(f, g))
}

/// A state (process with trivial domain) of `object`.
#[derive(Debug, Clone, PartialEq)]
pub struct State<T: Theory> {
    object: Object,
    data: T::Data,
}

impl<T: Theory> State<T> {
    pub fn new(object: Object, data: T::Data) -> Result<Self> {
        T::validate(&Object::unit(), &object, &data)?;
        Ok(Self { object, data })
    }

    pub(crate) fn from_parts(object: Object, data: T::Data) -> Self {
        Self { object, data }
    }

    pub fn object(&self) -> &Object {
        &self.object
    }

    pub fn data(&self) -> &T::Data {
        &self.data
    }

    /// The empty state of `I` (scalar one).
    pub fn unit() -> Self {
        Self::from_parts(Object::unit(), T::scalar(1.0))
    }

    pub fn mixed(obj: &Object) -> Self {
        Self::from_parts(obj.clone(), T::mixed(obj))
    }

    pub fn zero(obj: &Object) -> Self {
        Self::from_parts(obj.clone(), T::zero(&Object::unit(), obj))
    }

    pub fn as_process(&self) -> Process<T> {
        Process::from_parts(Object::unit(), self.object.clone(), self.data.clone())
    }

    pub fn apply(&self, f: &Process<T>) -> Result<State<T>> {
        if f.dom != self.object {
            return domain(format!(
                "cannot apply process on {:?} to a state of {:?}",
                f.dom.dims(),
                self.object.dims()
            ));
        }
        Ok(Self::from_parts(f.cod.clone(), T::apply(f, self)))
    }

    pub fn tensor(&self, other: &State<T>) -> State<T> {
        let p = tensor(&self.as_process(), &other.as_process());
        Self::from_parts(p.cod, p.data)
    }

    /// Keeps the factors at `keep`, in that order, discarding the rest.
    pub fn marginal(&self, keep: &[usize]) -> Result<State<T>> {
        if keep.iter().any(|&p| p >= self.object.n_factors()) {
            return domain("marginal position out of range");
        }
        Ok(Self::from_parts(self.object.select(keep), T::marginal(self, keep)))
    }

    /// `discard ∘ self`.
    pub fn mass(&self) -> f64 {
        T::mass(self)
    }

    pub fn norm1(&self) -> f64 {
        T::norm1(self)
    }

    pub fn is_causal(&self, tol: f64) -> bool {
        (self.mass() - 1.0).abs() <= tol
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        T::max_abs_diff(&self.data, &T::zero(&Object::unit(), &self.object)) <= tol
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::from_parts(self.object.clone(), T::scale(&self.data, factor))
    }

    pub fn max_abs_diff(&self, other: &State<T>) -> Result<f64> {
        if self.object != other.object {
            return domain("states live on different objects");
        }
        Ok(T::max_abs_diff(&self.data, &other.data))
    }

    pub fn approx_eq(&self, other: &State<T>, tol: f64) -> bool {
        self.max_abs_diff(other).map(|d| d <= tol).unwrap_or(false)
    }

    /// Backend distance between causal states.
    pub fn distance(&self, other: &State<T>) -> Result<f64> {
        if self.object != other.object {
            return domain("states live on different objects");
        }
        T::distance(&self.object, &self.data, &other.data)
    }
}

/// Places states on the given factors of `obj` and reorders into `obj`.
pub fn assemble<T: Theory>(obj: &Object, parts: &[(&[usize], &State<T>)]) -> Result<State<T>> {
    let mut seen = vec![false; obj.n_factors()];
    for (positions, s) in parts {
        if obj.select(positions) != *s.object() {
            return domain("part does not match the factors it is placed on");
        }
        for &p in positions.iter() {
            if seen[p] {
                return domain("parts overlap");
            }
            seen[p] = true;
        }
    }
    if seen.iter().any(|s| !s) {
        return domain("parts do not cover the object");
    }
    Ok(State::from_parts(obj.clone(), T::assemble(obj, parts)))
}

/// Distance extended to zero states: `d(x, 0) = ‖x‖₁`.
pub fn distance_with_zero<T: Theory>(
    a: &State<T>,
    a_zero: bool,
    b: &State<T>,
    b_zero: bool,
) -> Result<f64> {
    match (a_zero, b_zero) {
        (true, true) => Ok(0.0),
        (true, false) => Ok(b.norm1()),
        (false, true) => Ok(a.norm1()),
        (false, false) => a.distance(b),
    }
}
