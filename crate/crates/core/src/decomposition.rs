//! Element subsets, element-based decompositions and decomposition sets.
//!
//! An object `S = S_1 ⊗ .. ⊗ S_n` decomposes as `S ≅ S_J ⊗ S_J'` for every
//! subset `J` of its elements; the isomorphism is the symmetry that moves
//! the factors of `J` (ascending) in front of those of `J'` (ascending).

use std::cmp::Ordering;
use std::fmt;

use crate::error::{domain, Result};
use crate::theory::{Object, Process, State, Theory};

/// A subset of element positions `0..n`, stored as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ElementSet(u32);

impl ElementSet {
    pub const EMPTY: ElementSet = ElementSet(0);
    /// Hard ceiling on the number of elements a system may have.
    pub const MAX_ELEMENTS: usize = 32;

    pub const fn from_bits(bits: u32) -> Self {
        Self(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    /// `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        assert!(n <= Self::MAX_ELEMENTS, "at most {} elements", Self::MAX_ELEMENTS);
        if n == 32 {
            Self(u32::MAX)
        } else {
            Self((1u32 << n) - 1)
        }
    }

    pub fn singleton(i: usize) -> Self {
        Self(1 << i)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        Self(indices.into_iter().fold(0, |acc, i| acc | (1 << i)))
    }

    pub fn contains(self, i: usize) -> bool {
        i < 32 && self.0 & (1 << i) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: Self) -> Self {
        Self(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        Self(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        Self(self.0 & !other.0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    /// Indices in ascending order.
    pub fn indices(self) -> Vec<usize> {
        (0..32).filter(|&i| self.contains(i)).collect()
    }

    /// All subsets of `self`, in ascending bitmask order (`∅` first, `self` last).
    pub fn subsets(self) -> impl Iterator<Item = ElementSet> {
        let idx = self.indices();
        (0u64..(1u64 << idx.len())).map(move |k| {
            ElementSet::from_indices(idx.iter().enumerate().filter(|(b, _)| k & (1 << b) != 0).map(|(_, &i)| i))
        })
    }

    /// Reinterprets a set of positions *within* `outer` as a set of global positions.
    ///
    /// Bit `k` of `self` selects the `k`-th smallest element of `outer`.
    pub fn embed(self, outer: ElementSet) -> ElementSet {
        let idx = outer.indices();
        ElementSet::from_indices(self.indices().into_iter().map(|k| idx[k]))
    }

    /// Inverse of [`embed`](Self::embed): positions of `self` relative to `outer`.
    pub fn relative_to(self, outer: ElementSet) -> ElementSet {
        let idx = outer.indices();
        ElementSet::from_indices(
            idx.iter().enumerate().filter(|(_, &g)| self.contains(g)).map(|(k, _)| k),
        )
    }

    /// Lexicographic order of the ascending index lists.
    pub fn lex_cmp(self, other: Self) -> Ordering {
        self.indices().cmp(&other.indices())
    }
}

impl fmt::Debug for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.indices().into_iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", i + 1)?;
        }
        write!(f, "}}")
    }
}

/// A decomposition `S ≅ S_J ⊗ S_J'` of an element-factored object.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    parent: Object,
    left: ElementSet,
}

impl Decomposition {
    pub fn new(parent: &Object, left: ElementSet) -> Result<Self> {
        if !left.is_subset(ElementSet::full(parent.n_factors())) {
            return domain(format!("{left:?} is not a subset of the elements"));
        }
        Ok(Self {
            parent: parent.clone(),
            left,
        })
    }

    /// `1 = (S, I)`.
    pub fn top(parent: &Object) -> Self {
        Self {
            parent: parent.clone(),
            left: ElementSet::full(parent.n_factors()),
        }
    }

    /// `0 = (I, S)`.
    pub fn bottom(parent: &Object) -> Self {
        Self {
            parent: parent.clone(),
            left: ElementSet::EMPTY,
        }
    }

    pub fn parent(&self) -> &Object {
        &self.parent
    }

    pub fn left(&self) -> ElementSet {
        self.left
    }

    pub fn right(&self) -> ElementSet {
        ElementSet::full(self.parent.n_factors()).difference(self.left)
    }

    pub fn is_top(&self) -> bool {
        self.right().is_empty()
    }

    pub fn is_bottom(&self) -> bool {
        self.left.is_empty()
    }

    pub fn left_object(&self) -> Object {
        self.parent.select(&self.left.indices())
    }

    pub fn right_object(&self) -> Object {
        self.parent.select(&self.right().indices())
    }

    /// Factor order of `S_J ⊗ S_J'` in terms of the parent's factors.
    pub fn order(&self) -> Vec<usize> {
        let mut order = self.left.indices();
        order.extend(self.right().indices());
        order
    }

    /// `S -> S_J ⊗ S_J'`.
    pub fn iso<T: Theory>(&self) -> Process<T> {
        Process::permutation(&self.parent, &self.order()).expect("decomposition order is a permutation")
    }

    /// `S_J ⊗ S_J' -> S`.
    pub fn iso_inverse<T: Theory>(&self) -> Process<T> {
        let order = self.order();
        let mut inverse = vec![0; order.len()];
        for (slot, &p) in order.iter().enumerate() {
            inverse[p] = slot;
        }
        Process::permutation(&self.parent.select(&order), &inverse).expect("inverse order is a permutation")
    }

    /// `S -> S_J`: discard the complement.
    pub fn retraction<T: Theory>(&self) -> Process<T> {
        let keep = Process::<T>::identity(&self.left_object()).tensor(&Process::discard(&self.right_object()));
        self.iso::<T>().then(&keep).expect("objects match by construction")
    }

    /// `S_J -> S`: fill the complement with the completely mixed state.
    pub fn section<T: Theory>(&self) -> Process<T> {
        let fill = Process::<T>::identity(&self.left_object()).tensor(&State::mixed(&self.right_object()).as_process());
        fill.then(&self.iso_inverse()).expect("objects match by construction")
    }

    /// `(A, A')⊥ = (A', A)`.
    pub fn complement(&self) -> Self {
        Self {
            parent: self.parent.clone(),
            left: self.right(),
        }
    }

    /// The containment preorder: `J(self) ⊆ J(other)`.
    pub fn preceq(&self, other: &Decomposition) -> bool {
        self.parent == other.parent && self.left.is_subset(other.left)
    }

    /// Mutual containment.
    pub fn equivalent(&self, other: &Decomposition) -> bool {
        self.preceq(other) && other.preceq(self)
    }
}

/// Free-function form of [`Decomposition::complement`].
pub fn complement(d: &Decomposition) -> Decomposition {
    d.complement()
}

/// Free-function form of [`Decomposition::preceq`].
pub fn preceq(d1: &Decomposition, d2: &Decomposition) -> bool {
    d1.preceq(d2)
}

/// Free-function form of [`Decomposition::equivalent`].
pub fn equivalent(d1: &Decomposition, d2: &Decomposition) -> bool {
    d1.equivalent(d2)
}

/// The element-based decomposition set of an object.
///
/// `elements[k]` records which element of the root object the `k`-th factor
/// of `parent` is, so restricted sets can be related back to the root.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionSet {
    parent: Object,
    elements: Vec<usize>,
    members: Vec<Decomposition>,
}

impl DecompositionSet {
    /// `{(S_J, S_J') : J ⊆ elements}`, ordered by bitmask.
    pub fn from_elements(parent: &Object) -> Self {
        let n = parent.n_factors();
        Self::build(parent.clone(), (0..n).collect())
    }

    fn build(parent: Object, elements: Vec<usize>) -> Self {
        let members = ElementSet::full(parent.n_factors())
            .subsets()
            .map(|left| Decomposition {
                parent: parent.clone(),
                left,
            })
            .collect();
        Self {
            parent,
            elements,
            members,
        }
    }

    pub fn parent(&self) -> &Object {
        &self.parent
    }

    pub fn members(&self) -> &[Decomposition] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Root element ids of the parent's factors.
    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn contains(&self, d: &Decomposition) -> bool {
        d.parent == self.parent
    }

    /// `D|_A` along `d = (A, A')`: the element-based set of `A`.
    pub fn restrict(&self, d: &Decomposition) -> Result<DecompositionSet> {
        if !self.contains(d) {
            return domain("decomposition is not a member of the set");
        }
        let elements = d.left.indices().into_iter().map(|k| self.elements[k]).collect();
        Ok(Self::build(d.left_object(), elements))
    }
}

/// Free-function form of [`DecompositionSet::from_elements`].
pub fn from_elements(parent: &Object) -> DecompositionSet {
    DecompositionSet::from_elements(parent)
}

/// Free-function form of [`DecompositionSet::restrict`].
pub fn restrict(set: &DecompositionSet, d: &Decomposition) -> Result<DecompositionSet> {
    set.restrict(d)
}
