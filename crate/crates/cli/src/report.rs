//! Machine-readable reports.
//!
//! Every float is written with 17 significant digits (`{:.16e}`), so a report
//! round-trips exactly and repeated runs are byte-identical.

use iit_core::classical::Classical;
use iit_core::engine::{Candidate, Split, SystemPhi};
use iit_core::quantum::Quantum;
use iit_core::{Concept, ElementSet, EngineConfig, Experience, PhiResult, QShape, RepertoireValue, State, Theory};
use serde::Serialize;
use serde_json::value::RawValue;

/// A float serialised with a fixed number of significant digits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return serializer.serialize_none();
        }
        // Normalise -0 so that equal values print identically.
        let x = if self.0 == 0.0 { 0.0 } else { self.0 };
        let raw = RawValue::from_string(format!("{x:.16e}")).map_err(serde::ser::Error::custom)?;
        raw.serialize(serializer)
    }
}

/// How states of a backend are written out.
pub trait Render: Theory {
    fn render(state: &State<Self>) -> StateRepr;
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum StateRepr {
    /// A weight per basis state.
    Distribution(Vec<Num>),
    /// A density matrix of `[re, im]` entries.
    Density(Vec<Vec<[Num; 2]>>),
}

impl Render for Classical {
    fn render(state: &State<Self>) -> StateRepr {
        StateRepr::Distribution(state.data().iter().map(|&x| Num(x)).collect())
    }
}

impl Render for Quantum {
    fn render(state: &State<Self>) -> StateRepr {
        let d = state.object().dim();
        StateRepr::Density(
            state
                .data()
                .chunks(d)
                .map(|row| row.iter().map(|z| [Num(z.re), Num(z.im)]).collect())
                .collect(),
        )
    }
}

/// Element sets are written as lists of element names.
pub fn names_of(names: &[String], set: ElementSet) -> Vec<String> {
    set.indices().into_iter().map(|i| names[i].clone()).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct EngineInfo {
    pub name: &'static str,
    pub version: &'static str,
}

pub const ENGINE: EngineInfo = EngineInfo {
    name: "iit-core",
    version: env!("CARGO_PKG_VERSION"),
};

#[derive(Debug, Clone, Serialize)]
pub struct ToleranceReport {
    pub causal: Num,
    pub zero: Num,
    pub tie: Num,
    pub phi_floor: Num,
}

#[derive(Debug, Clone, Serialize)]
pub struct Header {
    pub engine: EngineInfo,
    pub backend: &'static str,
    pub mode: &'static str,
    pub cut: &'static str,
    pub tolerances: ToleranceReport,
    pub elements: Vec<String>,
    pub state: StateRepr,
}

impl Header {
    pub fn new<T: Render>(names: &[String], cfg: &EngineConfig, state: &State<T>) -> Self {
        Self {
            engine: ENGINE,
            backend: T::BACKEND.name(),
            mode: cfg.variant.name(),
            cut: cfg.cut.name(),
            tolerances: ToleranceReport {
                causal: Num(cfg.tol.causal),
                zero: Num(cfg.tol.zero),
                tie: Num(cfg.tol.tie),
                phi_floor: Num(cfg.tol.phi_floor),
            },
            elements: names.to_vec(),
            state: T::render(state),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SplitReport {
    pub mechanism: [Vec<String>; 2],
    pub purview: [Vec<String>; 2],
}

impl SplitReport {
    pub fn new(names: &[String], s: &Split) -> Self {
        Self {
            mechanism: [names_of(names, s.mechanism.0), names_of(names, s.mechanism.1)],
            purview: [names_of(names, s.purview.0), names_of(names, s.purview.1)],
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ValueReport {
    pub zero: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Num>,
    pub state: StateRepr,
}

impl ValueReport {
    pub fn new<T: Render>(v: &RepertoireValue<T>) -> Self {
        Self {
            zero: v.zero,
            lambda: v.lambda.map(Num),
            state: T::render(&v.state),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SideReport {
    pub purview: Vec<String>,
    pub phi: Num,
    pub split: Option<SplitReport>,
    pub repertoire: ValueReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConceptReport {
    pub mechanism: Vec<String>,
    pub phi: Num,
    pub cause: SideReport,
    pub effect: SideReport,
}

fn side<T: Render>(names: &[String], purview: ElementSet, phi: &PhiResult, v: &RepertoireValue<T>) -> SideReport {
    SideReport {
        purview: names_of(names, purview),
        phi: Num(phi.value),
        split: phi.split.as_ref().map(|s| SplitReport::new(names, s)),
        repertoire: ValueReport::new(v),
    }
}

impl ConceptReport {
    pub fn new<T: Render>(names: &[String], c: &Concept<T>) -> Self {
        Self {
            mechanism: names_of(names, c.mechanism),
            phi: Num(c.phi),
            cause: side(names, c.cause_purview, &c.cause_phi, &c.cause),
            effect: side(names, c.effect_purview, &c.effect_phi, &c.effect),
        }
    }
}

pub fn concepts<T: Render>(names: &[String], q: &QShape<T>) -> Vec<ConceptReport> {
    q.concepts.values().map(|c| ConceptReport::new(names, c)).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct SystemPhiReport {
    pub elements: Vec<String>,
    pub phi: Num,
    /// The part cut off by the minimising cut.
    pub cut: Option<Vec<String>>,
}

impl SystemPhiReport {
    pub fn new<T: Theory>(names: &[String], elements: ElementSet, r: &SystemPhi<T>) -> Self {
        // Subsystem results are indexed relative to the subsystem.
        Self {
            elements: names_of(names, elements),
            phi: Num(r.value),
            cut: r.cut.map(|c| names_of(names, c.embed(elements))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MajorComplexReport {
    pub elements: Option<Vec<String>>,
    pub phi: Num,
    pub concepts: Vec<ConceptReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PhiReport {
    #[serde(flatten)]
    pub header: Header,
    pub system: SystemPhiReport,
    pub concepts: Vec<ConceptReport>,
    pub subsystems: Vec<SystemPhiReport>,
    pub major_complex: MajorComplexReport,
    #[serde(rename = "Phi")]
    pub big_phi: Num,
}

impl PhiReport {
    pub fn new<T: Render>(names: &[String], cfg: &EngineConfig, state: &State<T>, whole: &SystemPhi<T>, exp: &Experience<T>) -> Self {
        let all = ElementSet::full(names.len());
        Self {
            header: Header::new(names, cfg, state),
            system: SystemPhiReport::new(names, all, whole),
            concepts: concepts(names, &whole.qshape),
            subsystems: exp
                .candidates
                .iter()
                .map(|c: &Candidate<T>| SystemPhiReport::new(names, c.elements, &c.phi))
                .collect(),
            major_complex: MajorComplexReport {
                elements: exp.major_complex.map(|m| names_of(names, m)),
                phi: Num(exp.phi),
                concepts: concepts(names, &exp.qshape),
            },
            big_phi: Num(exp.phi),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct QShapeReport {
    #[serde(flatten)]
    pub header: Header,
    pub concepts: Vec<ConceptReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PurviewScore {
    pub purview: Vec<String>,
    pub cause_phi: Num,
    pub effect_phi: Num,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConceptCommandReport {
    #[serde(flatten)]
    pub header: Header,
    pub mechanism: Vec<String>,
    pub purviews: Vec<PurviewScore>,
    pub concept: Option<ConceptReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DirectionReport {
    pub direction: &'static str,
    pub value: ValueReport,
    pub extended: ValueReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decomposed: Option<DecomposedReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecomposedReport {
    pub split: SplitReport,
    pub value: ValueReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct RepertoireReport {
    #[serde(flatten)]
    pub header: Header,
    pub mechanism: Vec<String>,
    pub purview: Vec<String>,
    pub repertoires: Vec<DirectionReport>,
}

pub fn to_json<R: Serialize>(report: &R) -> String {
    let mut text = serde_json::to_string_pretty(report).expect("reports always serialise");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_seventeen_digits() {
        assert_eq!(serde_json::to_string(&Num(0.1)).unwrap(), "1.0000000000000001e-1");
        assert_eq!(serde_json::to_string(&Num(-0.0)).unwrap(), "0.0000000000000000e0");
        assert_eq!(serde_json::to_string(&Num(f64::NAN)).unwrap(), "null");
        let back: f64 = serde_json::from_str(&serde_json::to_string(&Num(1.0 / 3.0)).unwrap()).unwrap();
        assert_eq!(back, 1.0 / 3.0);
    }
}
