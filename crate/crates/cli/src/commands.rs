//! Command implementations. Each returns the report text; `main` decides
//! where it goes.

use iit_core::engine::{concept, major_complex, phi_of_repertoire, qshape, system_phi};
use iit_core::{Direction, ElementSet, Repertoire, Repertoires, State};

use crate::report::{
    concepts, names_of, to_json, ConceptCommandReport, ConceptReport, DecomposedReport, DirectionReport, Header, Num,
    PhiReport, PurviewScore, QShapeReport, Render, RepertoireReport, SplitReport, ValueReport,
};
use crate::spec::{parse_subset, Analysis, Loaded, SpecError};
use crate::ExitCode;

/// A command failure with the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: ExitCode,
    pub message: String,
}

impl Failure {
    pub fn new(code: ExitCode, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl From<SpecError> for Failure {
    fn from(e: SpecError) -> Self {
        let code = match e {
            SpecError::Parse(_) => ExitCode::Parse,
            SpecError::Invalid(_) => ExitCode::Validation,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<iit_core::Error> for Failure {
    fn from(e: iit_core::Error) -> Self {
        Failure::new(ExitCode::Validation, e.to_string())
    }
}

/// Refuses exhaustive searches over more than `limit` elements.
pub fn check_size(loaded: &Loaded, limit: usize) -> Result<(), Failure> {
    let n = loaded.n_elements();
    if n > limit {
        return Err(Failure::new(
            ExitCode::Resource,
            format!(
                "{n} elements exceed the exhaustive-search limit of {limit}; \
                 pass --max-elements {n} to accept the exponential runtime"
            ),
        ));
    }
    Ok(())
}

fn state_of<T: Render>(a: &Analysis<T>) -> Result<&State<T>, Failure> {
    a.state
        .as_ref()
        .ok_or_else(|| Failure::new(ExitCode::Validation, "no system state given (use \"state\" or --state)"))
}

fn subset(names: &[String], text: &str) -> Result<ElementSet, Failure> {
    parse_subset(names, text).map_err(|e| Failure::new(ExitCode::Parse, e))
}

pub fn phi<T: Render>(a: &Analysis<T>) -> Result<String, Failure> {
    let s = state_of(a)?;
    let whole = system_phi(&a.system, s, &a.config)?;
    let exp = major_complex(&a.system, s, &a.config)?;
    Ok(to_json(&PhiReport::new(a.system.names(), &a.config, s, &whole, &exp)))
}

pub fn qshape_cmd<T: Render>(a: &Analysis<T>) -> Result<String, Failure> {
    let s = state_of(a)?;
    let q = qshape(&a.system, s, &a.config)?;
    let names = a.system.names();
    Ok(to_json(&QShapeReport {
        header: Header::new(names, &a.config, s),
        concepts: concepts(names, &q),
    }))
}

pub fn concept_cmd<T: Render>(a: &Analysis<T>, mechanism: &str) -> Result<String, Failure> {
    let s = state_of(a)?;
    let names = a.system.names();
    let mech = subset(names, mechanism)?;
    if mech.is_empty() {
        return Err(Failure::new(ExitCode::Parse, "the mechanism must be nonempty"));
    }
    let rep = Repertoire::with_zero_tolerance(&a.system, a.config.variant, a.config.tol.zero)?;
    let reps = Repertoires::new(rep, s)?;
    let tol = &a.config.tol;
    let purviews = a
        .system
        .all()
        .subsets()
        .map(|p| {
            Ok(PurviewScore {
                purview: names_of(names, p),
                cause_phi: Num(phi_of_repertoire(&reps, tol, Direction::Cause, mech, p)?.value),
                effect_phi: Num(phi_of_repertoire(&reps, tol, Direction::Effect, mech, p)?.value),
            })
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    let c = concept(&reps, tol, mech)?;
    Ok(to_json(&ConceptCommandReport {
        header: Header::new(names, &a.config, s),
        mechanism: names_of(names, mech),
        purviews,
        concept: c.as_ref().map(|c| ConceptReport::new(names, c)),
    }))
}

/// Arguments of the `repertoire` command, as given on the command line.
#[derive(Debug, Clone, Default)]
pub struct RepertoireArgs {
    pub mechanism: String,
    pub purview: String,
    pub direction: Option<Direction>,
    pub mechanism_split: Option<String>,
    pub purview_split: Option<String>,
}

pub fn repertoire_cmd<T: Render>(a: &Analysis<T>, args: &RepertoireArgs) -> Result<String, Failure> {
    let s = state_of(a)?;
    let names = a.system.names();
    let mech = subset(names, &args.mechanism)?;
    let purview = subset(names, &args.purview)?;
    let split = match (&args.mechanism_split, &args.purview_split) {
        (None, None) => None,
        (m1, p1) => {
            let m1 = subset(names, m1.as_deref().unwrap_or(""))?;
            let p1 = subset(names, p1.as_deref().unwrap_or(""))?;
            if !m1.is_subset(mech) || !p1.is_subset(purview) {
                return Err(Failure::new(
                    ExitCode::Parse,
                    "split parts must lie inside the mechanism and the purview",
                ));
            }
            Some(((m1, mech.difference(m1)), (p1, purview.difference(p1))))
        }
    };
    let rep = Repertoire::with_zero_tolerance(&a.system, a.config.variant, a.config.tol.zero)?;
    let reps = Repertoires::new(rep, s)?;
    let directions = match args.direction {
        Some(d) => vec![d],
        None => Direction::BOTH.to_vec(),
    };
    let mut repertoires = Vec::new();
    for dir in directions {
        let decomposed = match split {
            None => None,
            Some((ms, ps)) => {
                let v = reps.decomposed(dir, ms, ps)?;
                Some(DecomposedReport {
                    split: SplitReport::new(
                        names,
                        &iit_core::Split {
                            mechanism: ms,
                            purview: ps,
                        },
                    ),
                    value: ValueReport::new(&v),
                })
            }
        };
        repertoires.push(DirectionReport {
            direction: dir.name(),
            value: ValueReport::new(&reps.value(dir, mech, purview)?),
            extended: ValueReport::new(&reps.extended(dir, mech, purview)?),
            decomposed,
        });
    }
    Ok(to_json(&RepertoireReport {
        header: Header::new(names, &a.config, s),
        mechanism: names_of(names, mech),
        purview: names_of(names, purview),
        repertoires,
    }))
}

/// Runs `f` on whichever backend the specification selected.
#[macro_export]
macro_rules! dispatch {
    ($loaded:expr, $a:ident => $body:expr) => {
        match $loaded {
            $crate::spec::Loaded::Classical($a) => $body,
            $crate::spec::Loaded::Quantum($a) => $body,
        }
    };
}
