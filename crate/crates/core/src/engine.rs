//! The integration algorithm: φ of repertoires, concepts, Q-shapes, system
//! integration over cuts, and the major complex.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::decomposition::ElementSet;
use crate::error::{Error, Result};
use crate::repertoire::{Direction, Repertoire, RepertoireValue, Repertoires, Variant};
use crate::system::{directional_cut, restrict_state, subsystem, symmetric_cut, SystemType};
use crate::theory::{assemble, State, Theory};
use crate::tol::{snap, Tolerances};

/// How a system is cut when measuring its integration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CutKind {
    /// Sever every influence between the two parts.
    #[default]
    Symmetric,
    /// Replace the influence of one part on the other by noise.
    Directional,
}

impl CutKind {
    pub fn name(self) -> &'static str {
        match self {
            CutKind::Symmetric => "symmetric",
            CutKind::Directional => "directional",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EngineConfig {
    pub variant: Variant,
    pub cut: CutKind,
    pub tol: Tolerances,
}

impl EngineConfig {
    pub fn generic() -> Self {
        Self::default()
    }

    /// Element-factorised repertoires with directional cuts.
    pub fn iit3() -> Self {
        Self {
            variant: Variant::Iit3,
            cut: CutKind::Directional,
            tol: Tolerances::default(),
        }
    }
}

/// A split of a mechanism and a purview: `(M₁, M₂)` and `(P₁, P₂)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Split {
    pub mechanism: (ElementSet, ElementSet),
    pub purview: (ElementSet, ElementSet),
}

/// Candidate splits for `φ`: every pair of splits of `mech` and `purview`,
/// identified by their left parts, except the two trivial pairs `(M, P)` and
/// `(∅, ∅)` whose decomposed value is the undecomposed one.
pub fn candidate_splits(mech: ElementSet, purview: ElementSet) -> Vec<Split> {
    let mut out = Vec::new();
    for m1 in mech.subsets() {
        for p1 in purview.subsets() {
            let trivial = (m1 == mech && p1 == purview) || (m1.is_empty() && p1.is_empty());
            if !trivial {
                out.push(Split {
                    mechanism: (m1, mech.difference(m1)),
                    purview: (p1, purview.difference(p1)),
                });
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiResult {
    pub value: f64,
    /// The first split reaching the minimum; `None` when the repertoire value
    /// is zero or no candidate split exists.
    pub split: Option<Split>,
}

impl PhiResult {
    const ZERO: PhiResult = PhiResult {
        value: 0.0,
        split: None,
    };
}

/// `φ` of the repertoire of `mech` over `purview` at the context's state.
pub fn phi_of_repertoire<T: Theory>(
    reps: &Repertoires<'_, T>,
    tol: &Tolerances,
    dir: Direction,
    mech: ElementSet,
    purview: ElementSet,
) -> Result<PhiResult> {
    let whole = reps.extended(dir, mech, purview)?;
    if whole.zero {
        return Ok(PhiResult::ZERO);
    }
    let mut best: Option<(f64, Split)> = None;
    for split in candidate_splits(mech, purview) {
        let parts = reps.decomposed(dir, split.mechanism, split.purview)?;
        let d = whole.distance(&parts)?;
        if best.map_or(true, |(b, _)| d < b) {
            best = Some((d, split));
        }
    }
    Ok(match best {
        None => PhiResult::ZERO,
        Some((d, split)) => PhiResult {
            value: snap(d, tol.phi_floor),
            split: Some(split),
        },
    })
}

/// A mechanism's core cause and core effect, each with its `φ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Concept<T: Theory> {
    pub mechanism: ElementSet,
    pub cause_purview: ElementSet,
    pub effect_purview: ElementSet,
    /// Extended cause repertoire at the core cause, a state of the whole system.
    pub cause: RepertoireValue<T>,
    pub effect: RepertoireValue<T>,
    pub cause_phi: PhiResult,
    pub effect_phi: PhiResult,
    /// `min(φ_cause, φ_effect)`, the intensity both repertoires are scaled by.
    pub phi: f64,
}

/// Picks the maximal `φ`; values within `tie` of the maximum count as tied and
/// are resolved by fewer elements, then lexicographically smallest.
fn core(scores: &[(ElementSet, PhiResult)], tie: f64) -> (ElementSet, PhiResult) {
    let max = scores.iter().map(|(_, r)| r.value).fold(0.0_f64, f64::max);
    scores
        .iter()
        .filter(|(_, r)| r.value >= max - tie)
        .min_by(|(a, _), (b, _)| a.len().cmp(&b.len()).then_with(|| a.lex_cmp(*b)))
        .copied()
        .expect("the purview scan is never empty")
}

/// The concept of `mech`, or `None` when `φ(M) = 0`.
pub fn concept<T: Theory>(reps: &Repertoires<'_, T>, tol: &Tolerances, mech: ElementSet) -> Result<Option<Concept<T>>> {
    if mech.is_empty() {
        return Err(Error::Domain("the empty mechanism has no concept".into()));
    }
    let all = reps.system().all();
    let scan = |dir| -> Result<(ElementSet, PhiResult)> {
        let scores = all
            .subsets()
            .map(|p| Ok((p, phi_of_repertoire(reps, tol, dir, mech, p)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(core(&scores, tol.tie))
    };
    let (pc, cause_phi) = scan(Direction::Cause)?;
    let (pe, effect_phi) = scan(Direction::Effect)?;
    let phi = cause_phi.value.min(effect_phi.value);
    if phi == 0.0 {
        return Ok(None);
    }
    Ok(Some(Concept {
        mechanism: mech,
        cause_purview: pc,
        effect_purview: pe,
        cause: reps.extended(Direction::Cause, mech, pc)?,
        effect: reps.extended(Direction::Effect, mech, pe)?,
        cause_phi,
        effect_phi,
        phi,
    }))
}

/// The concepts of a system state, keyed by mechanism.
#[derive(Debug, Clone, PartialEq)]
pub struct QShape<T: Theory> {
    pub concepts: BTreeMap<ElementSet, Concept<T>>,
}

impl<T: Theory> QShape<T> {
    pub fn empty() -> Self {
        Self {
            concepts: BTreeMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }

    pub fn get(&self, mech: ElementSet) -> Option<&Concept<T>> {
        self.concepts.get(&mech)
    }
}

/// Q-shape of `s` in `sys`.
pub fn qshape<T: Theory>(sys: &SystemType<T>, s: &State<T>, cfg: &EngineConfig) -> Result<QShape<T>> {
    let rep = Repertoire::with_zero_tolerance(sys, cfg.variant, cfg.tol.zero)?;
    let reps = Repertoires::new(rep, s)?;
    let mechanisms: Vec<ElementSet> = sys.all().subsets().filter(|m| !m.is_empty()).collect();
    let concepts = mechanisms
        .par_iter()
        .map(|&m| concept(&reps, &cfg.tol, m))
        .collect::<Result<Vec<_>>>()?;
    Ok(QShape {
        concepts: concepts.into_iter().flatten().map(|c| (c.mechanism, c)).collect(),
    })
}

/// `min(r, t)·d(x, y) + |r − t|` on states paired with intensities.
pub fn pe_distance<T: Theory>(x: &RepertoireValue<T>, r: f64, y: &RepertoireValue<T>, t: f64) -> Result<f64> {
    let weight = r.min(t);
    let d = if weight == 0.0 { 0.0 } else { x.distance(y)? };
    Ok(weight * d + (r - t).abs())
}

/// Sum over mechanisms of the cause and effect proto-experience distances;
/// a mechanism missing from one side counts as intensity zero there.
pub fn qshape_distance<T: Theory>(a: &QShape<T>, b: &QShape<T>) -> Result<f64> {
    let mut keys: Vec<ElementSet> = a.concepts.keys().chain(b.concepts.keys()).copied().collect();
    keys.sort();
    keys.dedup();
    let mut total = 0.0;
    for m in keys {
        match (a.get(m), b.get(m)) {
            (Some(x), Some(y)) => {
                total += pe_distance(&x.cause, x.phi, &y.cause, y.phi)?;
                total += pe_distance(&x.effect, x.phi, &y.effect, y.phi)?;
            }
            (Some(x), None) | (None, Some(x)) => total += 2.0 * x.phi,
            (None, None) => {}
        }
    }
    Ok(total)
}

/// Parts cut off in turn: for symmetric cuts one side of each unordered
/// bipartition (the side holding the first element), for directional cuts
/// every nonempty proper subset.
pub fn cut_parts(n: usize, kind: CutKind) -> Vec<ElementSet> {
    if n < 2 {
        return Vec::new();
    }
    let all = ElementSet::full(n);
    all.subsets()
        .filter(|j| !j.is_empty() && *j != all)
        .filter(|j| kind == CutKind::Directional || j.contains(0))
        .collect()
}

pub fn cut_system<T: Theory>(sys: &SystemType<T>, part: ElementSet, kind: CutKind) -> Result<SystemType<T>> {
    match kind {
        CutKind::Symmetric => symmetric_cut(sys, part),
        CutKind::Directional => directional_cut(sys, part),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemPhi<T: Theory> {
    pub value: f64,
    /// First cut reaching the minimum; `None` when no cut exists.
    pub cut: Option<ElementSet>,
    pub qshape: QShape<T>,
}

/// Integration of the whole system: the least Q-shape distance over cuts.
pub fn system_phi<T: Theory>(sys: &SystemType<T>, s: &State<T>, cfg: &EngineConfig) -> Result<SystemPhi<T>> {
    let q = qshape(sys, s, cfg)?;
    let parts = cut_parts(sys.n_elements(), cfg.cut);
    let distances = parts
        .par_iter()
        .map(|&j| {
            let cut = cut_system(sys, j, cfg.cut)?;
            qshape_distance(&q, &qshape(&cut, s, cfg)?)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut best: Option<(f64, ElementSet)> = None;
    for (&j, &d) in parts.iter().zip(&distances) {
        if best.map_or(true, |(b, _)| d < b) {
            best = Some((d, j));
        }
    }
    Ok(match best {
        None => SystemPhi {
            value: 0.0,
            cut: None,
            qshape: q,
        },
        Some((d, j)) => SystemPhi {
            value: snap(d, cfg.tol.phi_floor),
            cut: Some(j),
            qshape: q,
        },
    })
}

/// One scanned candidate complex.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate<T: Theory> {
    pub elements: ElementSet,
    pub phi: SystemPhi<T>,
}

/// The major complex and its Q-shape embedded into the whole system.
#[derive(Debug, Clone, PartialEq)]
pub struct Experience<T: Theory> {
    /// `None` when no subsystem is integrated at all.
    pub major_complex: Option<ElementSet>,
    /// Concepts of the major complex with mechanisms, purviews and
    /// repertoires carried over to the whole system.
    pub qshape: QShape<T>,
    pub phi: f64,
    /// Every nonempty subsystem, in ascending bitmask order.
    pub candidates: Vec<Candidate<T>>,
}

fn complex_order(a: ElementSet, b: ElementSet) -> Ordering {
    b.len().cmp(&a.len()).then_with(|| a.lex_cmp(b))
}

/// Tensors a repertoire of the subsystem on `outer` with the completely
/// mixed state on the remaining elements.
fn embed_value<T: Theory>(sys: &SystemType<T>, v: &RepertoireValue<T>, outer: ElementSet) -> Result<RepertoireValue<T>> {
    let obj = sys.object();
    let rest = sys.all().difference(outer);
    let (inside, outside) = (outer.indices(), rest.indices());
    let noise = State::mixed(&obj.select(&outside));
    let state = if v.zero {
        State::zero(obj)
    } else {
        assemble(obj, &[(&inside, &v.state), (&outside, &noise)])?
    };
    Ok(RepertoireValue {
        state,
        zero: v.zero,
        lambda: v.lambda,
    })
}

fn embed_qshape<T: Theory>(sys: &SystemType<T>, q: &QShape<T>, outer: ElementSet) -> Result<QShape<T>> {
    let mut concepts = BTreeMap::new();
    for c in q.concepts.values() {
        let lift = |split: Option<Split>| {
            split.map(|s| Split {
                mechanism: (s.mechanism.0.embed(outer), s.mechanism.1.embed(outer)),
                purview: (s.purview.0.embed(outer), s.purview.1.embed(outer)),
            })
        };
        let embedded = Concept {
            mechanism: c.mechanism.embed(outer),
            cause_purview: c.cause_purview.embed(outer),
            effect_purview: c.effect_purview.embed(outer),
            cause: embed_value(sys, &c.cause, outer)?,
            effect: embed_value(sys, &c.effect, outer)?,
            cause_phi: PhiResult {
                split: lift(c.cause_phi.split),
                ..c.cause_phi
            },
            effect_phi: PhiResult {
                split: lift(c.effect_phi.split),
                ..c.effect_phi
            },
            phi: c.phi,
        };
        concepts.insert(embedded.mechanism, embedded);
    }
    Ok(QShape { concepts })
}

/// Scans every nonempty subsystem (conditioned on the rest of `s`) and keeps
/// the most integrated one. Ties within `tol.tie` go to more elements, then
/// the lexicographically smallest set.
pub fn major_complex<T: Theory>(sys: &SystemType<T>, s: &State<T>, cfg: &EngineConfig) -> Result<Experience<T>> {
    let sets: Vec<ElementSet> = sys.all().subsets().filter(|c| !c.is_empty()).collect();
    let candidates = sets
        .par_iter()
        .map(|&c| {
            let sub = subsystem(sys, s, c)?;
            let sub_state = restrict_state(s, c)?;
            Ok(Candidate {
                elements: c,
                phi: system_phi(&sub, &sub_state, cfg)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let max = candidates.iter().map(|c| c.phi.value).fold(0.0_f64, f64::max);
    if max == 0.0 {
        return Ok(Experience {
            major_complex: None,
            qshape: QShape::empty(),
            phi: 0.0,
            candidates,
        });
    }
    let winner = candidates
        .iter()
        .filter(|c| c.phi.value >= max - cfg.tol.tie)
        .min_by(|a, b| complex_order(a.elements, b.elements))
        .expect("the maximum is attained");
    Ok(Experience {
        major_complex: Some(winner.elements),
        qshape: embed_qshape(sys, &winner.phi.qshape, winner.elements)?,
        phi: winner.phi.value,
        candidates,
    })
}
