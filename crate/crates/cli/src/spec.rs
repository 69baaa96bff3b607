//! System specification files.
//!
//! Basis states of a product of elements are indexed little-endian: element 1
//! varies fastest, so for two bits the order is `00, 10, 01, 11` written as
//! `(x1, x2)`. TPM rows and columns, distributions and density matrices all
//! use this order.

use std::path::Path;

use iit_core::classical::{self, Classical};
use iit_core::quantum::{self, Quantum};
use iit_core::repertoire::Probe;
use iit_core::system::check_conditional_independence;
use iit_core::{
    CutKind, ElementSet, EngineConfig, Error, Factor, Object, Process, Repertoire, State, SystemType, Theory,
    Tolerances, Variant,
};
use num_complex::Complex64;
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendName {
    Classical,
    Quantum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Generic,
    Iit3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Cut {
    Symmetric,
    Directional,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricName {
    Point,
    Table,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementSpec {
    pub name: String,
    #[serde(alias = "dim")]
    pub size: usize,
}

/// A complex number written as `[re, im]`.
pub type ComplexEntry = [f64; 2];

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum DynamicsSpec {
    Table(Vec<Vec<f64>>),
    Kraus { kraus: Vec<Vec<Vec<ComplexEntry>>> },
    Choi { choi: Vec<Vec<ComplexEntry>> },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum StateSpec {
    Label(String),
    Distribution { distribution: Vec<f64> },
    Density { density: Vec<Vec<ComplexEntry>> },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub backend: BackendName,
    pub elements: Vec<ElementSpec>,
    pub dynamics: DynamicsSpec,
    #[serde(default)]
    pub metric: Option<MetricName>,
    #[serde(default)]
    pub metric_tables: Option<Vec<Option<Vec<Vec<f64>>>>>,
    #[serde(default)]
    pub reverse_dynamics: Option<DynamicsSpec>,
    #[serde(default)]
    pub mode: Option<Mode>,
    #[serde(default)]
    pub cut: Option<Cut>,
    #[serde(default)]
    pub state: Option<StateSpec>,
}

/// Why a specification could not be used.
#[derive(Debug)]
pub enum SpecError {
    /// Unreadable file or malformed JSON.
    Parse(String),
    /// Well-formed, but violating the listed invariants.
    Invalid(Vec<String>),
}

impl std::fmt::Display for SpecError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SpecError::Parse(msg) => write!(f, "parse error: {msg}"),
            SpecError::Invalid(items) => {
                write!(f, "invalid specification:")?;
                for item in items {
                    write!(f, "\n  - {item}")?;
                }
                Ok(())
            }
        }
    }
}

impl std::error::Error for SpecError {}

pub fn read_spec(path: &Path) -> Result<SpecFile, SpecError> {
    let text = std::fs::read_to_string(path).map_err(|e| SpecError::Parse(format!("{}: {e}", path.display())))?;
    parse_spec(&text)
}

pub fn parse_spec(text: &str) -> Result<SpecFile, SpecError> {
    serde_json::from_str(text).map_err(|e| SpecError::Parse(e.to_string()))
}

/// Reads `--state`: a path to a JSON state description, or a basis label.
pub fn parse_state_arg(arg: &str) -> Result<StateSpec, SpecError> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| SpecError::Parse(format!("{arg}: {e}")))?;
        return serde_json::from_str(&text).map_err(|e| SpecError::Parse(format!("{arg}: {e}")));
    }
    Ok(StateSpec::Label(arg.to_string()))
}

/// Command-line overrides of the specification.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub mode: Option<Mode>,
    pub cut: Option<Cut>,
    pub state: Option<StateSpec>,
    pub tol_causal: Option<f64>,
    pub tol_zero: Option<f64>,
}

/// A validated system with its engine configuration.
#[derive(Debug, Clone)]
pub struct Analysis<T: Theory> {
    pub system: SystemType<T>,
    pub state: Option<State<T>>,
    pub config: EngineConfig,
}

#[derive(Debug, Clone)]
pub enum Loaded {
    Classical(Analysis<Classical>),
    Quantum(Analysis<Quantum>),
}

impl Loaded {
    pub fn n_elements(&self) -> usize {
        match self {
            Loaded::Classical(a) => a.system.n_elements(),
            Loaded::Quantum(a) => a.system.n_elements(),
        }
    }

    pub fn names(&self) -> &[String] {
        match self {
            Loaded::Classical(a) => a.system.names(),
            Loaded::Quantum(a) => a.system.names(),
        }
    }
}

/// Collects violations instead of stopping at the first one.
#[derive(Default)]
struct Problems(Vec<String>);

impl Problems {
    fn push(&mut self, msg: impl Into<String>) {
        self.0.push(msg.into());
    }

    fn take<T>(&mut self, r: Result<T, String>) -> Option<T> {
        r.map_err(|e| self.push(e)).ok()
    }
}

fn label(obj: &Object, x: usize) -> String {
    obj.digits(x).iter().map(|d| d.to_string()).collect::<Vec<_>>().join(",")
}

fn complex(entry: &ComplexEntry) -> Complex64 {
    Complex64::new(entry[0], entry[1])
}

fn square_complex(rows: &[Vec<ComplexEntry>], n: usize, what: &str) -> Result<Vec<Complex64>, String> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(format!("{what} must be a {n}x{n} matrix"));
    }
    Ok(rows.iter().flatten().map(complex).collect())
}

fn build_object(spec: &SpecFile, problems: &mut Problems) -> Option<Object> {
    let mut names: Vec<&str> = Vec::new();
    for (k, e) in spec.elements.iter().enumerate() {
        if e.size == 0 {
            problems.push(format!("element {} ({}) has size 0", k + 1, e.name));
        }
        if e.name.is_empty() || e.name.contains(',') {
            problems.push(format!("element {} has an empty name or a name containing ','", k + 1));
        }
        if names.contains(&e.name.as_str()) {
            problems.push(format!("element name {} is used twice", e.name));
        }
        names.push(&e.name);
    }
    if spec.elements.len() > ElementSet::MAX_ELEMENTS {
        problems.push(format!("at most {} elements are supported", ElementSet::MAX_ELEMENTS));
        return None;
    }
    let tables = match (spec.metric, &spec.metric_tables) {
        (Some(MetricName::Table), None) => {
            problems.push("metric \"table\" needs metric_tables");
            return None;
        }
        (Some(MetricName::Point) | None, Some(_)) => {
            problems.push("metric_tables given without metric \"table\"");
            return None;
        }
        (_, Some(_)) if spec.backend == BackendName::Quantum => {
            problems.push("metric tables apply to classical systems only");
            return None;
        }
        (_, Some(t)) => {
            if t.len() != spec.elements.len() {
                problems.push(format!("{} metric tables for {} elements", t.len(), spec.elements.len()));
                return None;
            }
            t.clone()
        }
        (_, None) => vec![None; spec.elements.len()],
    };
    if !problems.0.is_empty() {
        return None;
    }
    let factors = spec
        .elements
        .iter()
        .zip(tables)
        .map(|(e, table)| match table {
            None => Ok(Factor::new(e.size)),
            Some(rows) => {
                if rows.len() != e.size || rows.iter().any(|r| r.len() != e.size) {
                    return Err(format!("metric table of {} must be {}x{}", e.name, e.size, e.size));
                }
                Factor::with_metric(e.size, rows.concat()).map_err(|err| format!("metric table of {}: {err}", e.name))
            }
        })
        .collect::<Vec<_>>();
    let factors: Vec<Factor> = factors.into_iter().filter_map(|f| problems.take(f)).collect();
    if factors.len() != spec.elements.len() {
        return None;
    }
    problems.take(Object::new(factors).map_err(|e| e.to_string()))
}

fn classical_table(obj: &Object, d: &DynamicsSpec, what: &str, tol: f64, causal: bool) -> Result<Process<Classical>, String> {
    let DynamicsSpec::Table(rows) = d else {
        return Err(format!("{what} of a classical system must be a table of rows"));
    };
    let n = obj.dim();
    if rows.len() != n {
        return Err(format!("{what} has {} rows, expected {n}", rows.len()));
    }
    if let Some(r) = rows.iter().position(|r| r.len() != n) {
        return Err(format!("{what} row {r} (state {}) has {} entries, expected {n}", label(obj, r), rows[r].len()));
    }
    if causal {
        let mut bad = Vec::new();
        for (r, row) in rows.iter().enumerate() {
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > tol {
                bad.push(format!("{what} row {r} (state {}) sums to {sum}, not 1", label(obj, r)));
            }
        }
        if !bad.is_empty() {
            return Err(bad.join("; "));
        }
    }
    classical::table(obj, obj, rows).map_err(|e| format!("{what}: {e}"))
}

fn quantum_channel(obj: &Object, d: &DynamicsSpec, what: &str, causal: bool) -> Result<Process<Quantum>, String> {
    let n = obj.dim();
    let channel = match d {
        DynamicsSpec::Table(_) => return Err(format!("{what} of a quantum system must be {{kraus}} or {{choi}}")),
        DynamicsSpec::Kraus { kraus } => {
            if kraus.is_empty() {
                return Err(format!("{what} has no Kraus operators"));
            }
            let ops = kraus
                .iter()
                .enumerate()
                .map(|(k, m)| square_complex(m, n, &format!("{what} Kraus operator {k}")))
                .collect::<Result<Vec<_>, _>>()?;
            if causal {
                let defect = quantum::kraus_completeness_defect(obj, &ops);
                if defect > iit_core::tol::CPTP {
                    return Err(format!("{what} Kraus operators are not complete (max |ΣK†K - I| = {defect:e})"));
                }
            }
            quantum::from_kraus(obj, obj, &ops).map_err(|e| format!("{what}: {e}"))?
        }
        DynamicsSpec::Choi { choi } => {
            let j = square_complex(choi, n * n, &format!("{what} Choi matrix"))?;
            quantum::from_choi(obj, obj, j).map_err(|e| format!("{what}: {e}"))?
        }
    };
    if causal && !quantum::is_cptp(&channel) {
        return Err(format!("{what} is not trace preserving"));
    }
    Ok(channel)
}

fn classical_state(obj: &Object, s: &StateSpec, tol: f64) -> Result<State<Classical>, String> {
    match s {
        StateSpec::Label(l) => classical::point(obj, parse_label(obj, l)?).map_err(|e| e.to_string()),
        StateSpec::Distribution { distribution } => {
            if distribution.len() != obj.dim() {
                return Err(format!("state has {} weights, expected {}", distribution.len(), obj.dim()));
            }
            let st = classical::distribution(obj, distribution.clone()).map_err(|e| format!("state: {e}"))?;
            if !st.is_causal(tol) {
                return Err(format!("state weights sum to {}, not 1", st.mass()));
            }
            Ok(st)
        }
        StateSpec::Density { .. } => Err("a classical state is a label or a distribution".into()),
    }
}

fn quantum_state(obj: &Object, s: &StateSpec, tol: f64) -> Result<State<Quantum>, String> {
    match s {
        StateSpec::Label(l) => quantum::basis_state(obj, parse_label(obj, l)?).map_err(|e| e.to_string()),
        StateSpec::Distribution { .. } => Err("a quantum state is a label or a density matrix".into()),
        StateSpec::Density { density } => {
            let m = square_complex(density, obj.dim(), "state density matrix")?;
            let st = quantum::density(obj, m).map_err(|e| format!("state: {e}"))?;
            if !st.is_causal(tol) {
                return Err(format!("state has trace {}, not 1", st.mass()));
            }
            Ok(st)
        }
    }
}

/// Parses a basis label: one digit per element (`"10"`) or a comma list (`"1,0"`).
pub fn parse_label(obj: &Object, text: &str) -> Result<usize, String> {
    let text = text.trim();
    let parts: Vec<&str> = if text.contains(',') {
        text.split(',').map(str::trim).collect()
    } else if text.is_empty() {
        Vec::new()
    } else {
        text.split("").filter(|p| !p.is_empty()).collect()
    };
    if parts.len() != obj.n_factors() {
        return Err(format!("state label {text:?} names {} elements, expected {}", parts.len(), obj.n_factors()));
    }
    let dims = obj.dims();
    let mut digits = Vec::with_capacity(parts.len());
    for (k, p) in parts.iter().enumerate() {
        let d: usize = p.parse().map_err(|_| format!("state label {text:?}: {p:?} is not a number"))?;
        if d >= dims[k] {
            return Err(format!("state label {text:?}: value {d} out of range for element {}", k + 1));
        }
        digits.push(d);
    }
    Ok(obj.index_of(&digits))
}

/// Parses a comma list of element names or 1-based positions; `""` or
/// `"none"` is the empty set.
pub fn parse_subset(names: &[String], text: &str) -> Result<ElementSet, String> {
    let text = text.trim();
    if text.is_empty() || text.eq_ignore_ascii_case("none") {
        return Ok(ElementSet::EMPTY);
    }
    let mut set = ElementSet::EMPTY;
    for item in text.split(',').map(str::trim) {
        let index = names
            .iter()
            .position(|n| n == item)
            .or_else(|| item.parse::<usize>().ok().filter(|&i| i >= 1 && i <= names.len()).map(|i| i - 1))
            .ok_or_else(|| format!("unknown element {item:?}"))?;
        set = set.union(ElementSet::singleton(index));
    }
    Ok(set)
}

fn tolerances(over: &Overrides) -> Tolerances {
    let mut tol = Tolerances::default();
    if let Some(t) = over.tol_causal {
        tol.causal = t;
    }
    if let Some(t) = over.tol_zero {
        tol.zero = t;
    }
    tol
}

fn engine_config(spec: &SpecFile, over: &Overrides, problems: &mut Problems) -> EngineConfig {
    let mode = over.mode.or(spec.mode).unwrap_or(Mode::Generic);
    let cut = over.cut.or(spec.cut).unwrap_or(match mode {
        Mode::Generic => Cut::Symmetric,
        Mode::Iit3 => Cut::Directional,
    });
    if spec.backend == BackendName::Quantum {
        if mode == Mode::Iit3 {
            problems.push("mode iit3 needs copy maps and is only available for classical systems");
        }
        if cut == Cut::Directional {
            problems.push("directional cuts are only available for classical systems");
        }
    }
    if cut == Cut::Directional && spec.reverse_dynamics.is_some() {
        problems.push("directional cuts cannot be combined with reverse_dynamics");
    }
    EngineConfig {
        variant: match mode {
            Mode::Generic => Variant::Generic,
            Mode::Iit3 => Variant::Iit3,
        },
        cut: match cut {
            Cut::Symmetric => CutKind::Symmetric,
            Cut::Directional => CutKind::Directional,
        },
        tol: tolerances(over),
    }
}

/// Largest system for which repertoires are probed for weak causality.
const WEAK_CAUSALITY_LIMIT: usize = 6;

fn check_repertoires<T: Theory>(sys: &SystemType<T>, variant: Variant, zero: f64, problems: &mut Problems) {
    if sys.n_elements() > WEAK_CAUSALITY_LIMIT {
        return;
    }
    let Ok(rep) = Repertoire::with_zero_tolerance(sys, variant, zero) else {
        return;
    };
    for mech in sys.all().subsets() {
        for purview in sys.all().subsets() {
            for probe in [Probe::Effect, Probe::Cause] {
                match rep.check_weak_causality(probe, mech, purview) {
                    Ok(true) => {}
                    Ok(false) => problems.push(format!(
                        "{:?} repertoire of {mech:?} over {purview:?} is neither causal nor zero on some input",
                        probe
                    )),
                    Err(e) => problems.push(e.to_string()),
                }
            }
        }
    }
}

fn finish<T: Theory>(
    obj: Object,
    names: Vec<String>,
    evolution: Option<Process<T>>,
    reverse: Option<Option<Process<T>>>,
    state: Option<Option<State<T>>>,
    config: EngineConfig,
    problems: &mut Problems,
) -> Option<Analysis<T>> {
    let (Some(evolution), Some(reverse), Some(state)) = (evolution, reverse, state) else {
        return None;
    };
    let system = problems.take(SystemType::new(obj, names, evolution, reverse).map_err(|e| e.to_string()))?;
    if T::has_copy() && (config.variant == Variant::Iit3 || config.cut == CutKind::Directional) {
        match check_conditional_independence(&system) {
            Ok(true) => {}
            Ok(false) => problems.push(
                "dynamics are not conditionally independent across elements (T ≠ Π T_i), which iit3 mode and directional cuts require",
            ),
            Err(e) => problems.push(e.to_string()),
        }
    }
    check_repertoires(&system, config.variant, config.tol.zero, problems);
    Some(Analysis { system, state, config })
}

/// Validates a specification and builds the analysis it describes.
pub fn load(spec: &SpecFile, over: &Overrides) -> Result<Loaded, SpecError> {
    let mut problems = Problems::default();
    let config = engine_config(spec, over, &mut problems);
    let obj = build_object(spec, &mut problems);
    let Some(obj) = obj else {
        return Err(SpecError::Invalid(problems.0));
    };
    let names: Vec<String> = spec.elements.iter().map(|e| e.name.clone()).collect();
    let state_spec = over.state.as_ref().or(spec.state.as_ref());
    let tol = config.tol.causal;
    let loaded = match spec.backend {
        BackendName::Classical => {
            let evolution = problems.take(classical_table(&obj, &spec.dynamics, "dynamics", tol, true));
            let reverse = match &spec.reverse_dynamics {
                None => Some(None),
                Some(r) => problems.take(classical_table(&obj, r, "reverse_dynamics", tol, false)).map(Some),
            };
            let state = match state_spec {
                None => Some(None),
                Some(s) => problems.take(classical_state(&obj, s, tol)).map(Some),
            };
            finish(obj, names, evolution, reverse, state, config, &mut problems).map(Loaded::Classical)
        }
        BackendName::Quantum => {
            let evolution = problems.take(quantum_channel(&obj, &spec.dynamics, "dynamics", true));
            let reverse = match &spec.reverse_dynamics {
                None => Some(None),
                Some(r) => problems.take(quantum_channel(&obj, r, "reverse_dynamics", false)).map(Some),
            };
            let state = match state_spec {
                None => Some(None),
                Some(s) => problems.take(quantum_state(&obj, s, tol)).map(Some),
            };
            finish(obj, names, evolution, reverse, state, config, &mut problems).map(Loaded::Quantum)
        }
    };
    match loaded {
        Some(l) if problems.0.is_empty() => Ok(l),
        _ => Err(SpecError::Invalid(problems.0)),
    }
}

impl From<Error> for SpecError {
    fn from(e: Error) -> Self {
        SpecError::Invalid(vec![e.to_string()])
    }
}
