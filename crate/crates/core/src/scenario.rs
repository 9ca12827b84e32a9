//! Scenario files: the batch front end's input.
//!
//! A scenario is a TOML document naming fixtures (a classical model with
//! its measure, a measurement registry, a quantum fixture, an embedding
//! spec, a lattice) and the list of tasks to run over them. Rational
//! weights are written as `"p/q"` strings and complex matrix entries as
//! `"re,im"` so exact values survive serialization. The format is
//! documented in `docs/scenario-format.md`.

use crate::embed::{EmbeddingScheme, SchemeKind};
use crate::error::{Error, Result};
use crate::lang::{self, Formula, Model, ProcedureId, PropertyId, StateId};
use crate::measurement::{MeasurementProcedure, MeasurementRegistry};
use crate::muprob::MuContextualStructure;
use crate::prob::{Event, FiniteProbabilitySpace};
use crate::qstruct::OrthoLattice;
use crate::quantum::{self, DensityOperator, Projector, QuantumModel};
use crate::rational::{parse_rational, Rational};
use serde::Deserialize;
use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

/// Default number of random trials for the sampling checks.
pub const DEFAULT_TRIALS: usize = 100;

/// Default absolute tolerance for float checks.
pub const DEFAULT_FLOAT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum TaskKind {
    CheckModel,
    MeanProb,
    Born,
    Embed,
    Verify,
    WitnessNonclassicality,
    LatticeReport,
}

impl TaskKind {
    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "check-model" => Ok(TaskKind::CheckModel),
            "mean-prob" => Ok(TaskKind::MeanProb),
            "born" => Ok(TaskKind::Born),
            "embed" => Ok(TaskKind::Embed),
            "verify" => Ok(TaskKind::Verify),
            "witness-nonclassicality" => Ok(TaskKind::WitnessNonclassicality),
            "lattice-report" => Ok(TaskKind::LatticeReport),
            other => Err(Error::Scenario(format!("unknown task {other:?}"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            TaskKind::CheckModel => "check-model",
            TaskKind::MeanProb => "mean-prob",
            TaskKind::Born => "born",
            TaskKind::Embed => "embed",
            TaskKind::Verify => "verify",
            TaskKind::WitnessNonclassicality => "witness-nonclassicality",
            TaskKind::LatticeReport => "lattice-report",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    /// Absolute tolerance for float comparisons (quantum side).
    pub float_abs: f64,
    /// Maximum accepted |classical − born| deviation in `verify`.
    pub verify: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            float_abs: DEFAULT_FLOAT_TOL,
            verify: DEFAULT_FLOAT_TOL,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EmbeddingSpec {
    pub scheme: EmbeddingScheme,
    pub groups: Vec<Vec<PropertyId>>,
    pub state_weights: Option<BTreeMap<StateId, Rational>>,
}

#[derive(Debug, Clone)]
pub struct WitnessSpec {
    pub state: StateId,
    pub conditioning: PropertyId,
    /// Pass iff a witness is found (`true`) or iff none exists (`false`).
    pub expect_found: bool,
}

#[derive(Debug, Clone)]
pub struct MeanProbSpec {
    pub a: Formula,
    pub b: Formula,
    pub procedure: Option<ProcedureId>,
}

/// A fully validated scenario, with fixtures converted to domain values.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub seed: u64,
    pub trials: usize,
    pub tasks: Vec<TaskKind>,
    pub tolerances: Tolerances,
    pub structure: Option<MuContextualStructure>,
    pub registry: Option<MeasurementRegistry>,
    pub quantum: Option<QuantumModel>,
    pub embedding: Option<EmbeddingSpec>,
    pub lattice: Option<OrthoLattice>,
    pub witness: Option<WitnessSpec>,
    pub mean_prob: Vec<MeanProbSpec>,
}

impl Scenario {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let file: ScenarioFile = toml::from_str(text)
            .map_err(|e| Error::Scenario(format!("cannot parse scenario: {e}")))?;
        file.build()
    }
}

// -- raw TOML shape ---------------------------------------------------------

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    name: String,
    #[serde(default)]
    seed: u64,
    tasks: Vec<String>,
    trials: Option<usize>,
    #[serde(default)]
    tolerances: TolerancesSection,
    model: Option<ModelSection>,
    registry: Option<RegistrySection>,
    quantum: Option<QuantumSection>,
    embedding: Option<EmbeddingSection>,
    lattice: Option<LatticeSection>,
    witness: Option<WitnessSection>,
    #[serde(default)]
    mean_prob: Vec<MeanProbQuery>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct TolerancesSection {
    float_abs: Option<f64>,
    verify: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelSection {
    universe: Vec<String>,
    #[serde(default)]
    uniform: bool,
    xi: Option<BTreeMap<String, String>>,
    predicates: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RegistrySection {
    procedure: Vec<ProcedureSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProcedureSection {
    id: String,
    measures: Vec<String>,
    contexts: BTreeMap<String, String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct QuantumSection {
    dim: usize,
    states: BTreeMap<String, MatrixSpec>,
    properties: BTreeMap<String, MatrixSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum MatrixSpec {
    /// `"preset:<name>"`
    Preset(String),
    /// Row-major `"re,im"` entries.
    Rows(Vec<Vec<String>>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EmbeddingSection {
    scheme: String,
    #[serde(default = "one")]
    contexts: usize,
    #[serde(default = "one")]
    resolution: usize,
    groups: Vec<Vec<String>>,
    state_weights: Option<BTreeMap<String, String>>,
}

fn one() -> usize {
    1
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LatticeSection {
    elements: Vec<String>,
    leq: Vec<[String; 2]>,
    ortho: BTreeMap<String, String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct WitnessSection {
    state: String,
    conditioning: String,
    expect: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeanProbQuery {
    a: String,
    b: String,
    procedure: Option<String>,
}

impl ScenarioFile {
    fn build(self) -> Result<Scenario> {
        if self.tasks.is_empty() {
            return Err(Error::Scenario("a scenario needs at least one task".into()));
        }
        let tasks: Vec<TaskKind> = self
            .tasks
            .iter()
            .map(|t| TaskKind::parse(t))
            .collect::<Result<_>>()?;

        let defaults = Tolerances::default();
        let tolerances = Tolerances {
            float_abs: self.tolerances.float_abs.unwrap_or(defaults.float_abs),
            verify: self.tolerances.verify.unwrap_or(defaults.verify),
        };

        let structure = self.model.map(build_structure).transpose()?;
        let registry = self.registry.map(build_registry).transpose()?;
        let quantum = self.quantum.map(build_quantum).transpose()?;
        let embedding = self.embedding.map(build_embedding_spec).transpose()?;
        let lattice = self.lattice.map(build_lattice).transpose()?;
        let witness = self
            .witness
            .map(|w| {
                let expect_found = match w.expect.as_deref() {
                    None | Some("found") => true,
                    Some("none") => false,
                    Some(other) => {
                        return Err(Error::Scenario(format!(
                            "witness expectation must be \"found\" or \"none\", got {other:?}"
                        )))
                    }
                };
                Ok(WitnessSpec {
                    state: StateId::new(w.state),
                    conditioning: PropertyId::new(w.conditioning),
                    expect_found,
                })
            })
            .transpose()?;
        let mean_prob = self
            .mean_prob
            .into_iter()
            .map(|q| {
                Ok(MeanProbSpec {
                    a: Formula::from_str(&q.a)?,
                    b: Formula::from_str(&q.b)?,
                    procedure: q.procedure.map(ProcedureId::new),
                })
            })
            .collect::<Result<_>>()?;

        // referenced fixtures must exist
        for task in &tasks {
            match task {
                TaskKind::CheckModel if structure.is_none() => {
                    return Err(Error::Scenario(
                        "check-model needs a [model] section".into(),
                    ))
                }
                TaskKind::MeanProb if structure.is_none() || registry.is_none() => {
                    return Err(Error::Scenario(
                        "mean-prob needs [model] and [registry] sections".into(),
                    ))
                }
                TaskKind::Born if quantum.is_none() => {
                    return Err(Error::Scenario("born needs a [quantum] section".into()))
                }
                TaskKind::Embed | TaskKind::Verify if quantum.is_none() || embedding.is_none() => {
                    return Err(Error::Scenario(
                        "embed/verify need [quantum] and [embedding] sections".into(),
                    ))
                }
                TaskKind::WitnessNonclassicality if witness.is_none() => {
                    return Err(Error::Scenario(
                        "witness-nonclassicality needs a [witness] section".into(),
                    ))
                }
                TaskKind::WitnessNonclassicality | TaskKind::LatticeReport
                    if quantum.is_none() && lattice.is_none() =>
                {
                    return Err(Error::Scenario(
                        "lattice tasks need a [quantum] or [lattice] section".into(),
                    ))
                }
                _ => {}
            }
        }

        Ok(Scenario {
            name: self.name,
            seed: self.seed,
            trials: self.trials.unwrap_or(DEFAULT_TRIALS),
            tasks,
            tolerances,
            structure,
            registry,
            quantum,
            embedding,
            lattice,
            witness,
            mean_prob,
        })
    }
}

fn build_structure(section: ModelSection) -> Result<MuContextualStructure> {
    let mut model = Model::new(section.universe.clone())?;
    for (key, points) in &section.predicates {
        let pred = lang::PredicateId::parse_key(key)?;
        let mut members = Vec::with_capacity(points.len());
        for label in points {
            let idx = model.point_index(label).ok_or_else(|| {
                Error::Scenario(format!("extension of {key} names unknown point {label:?}"))
            })?;
            members.push(idx);
        }
        model.insert_extension(pred, Event::new(members))?;
    }
    let xi = match (section.uniform, section.xi) {
        (true, None) => FiniteProbabilitySpace::uniform(section.universe)?,
        (false, Some(map)) => {
            let entries = section
                .universe
                .iter()
                .map(|label| {
                    let w = map
                        .get(label)
                        .ok_or_else(|| Error::Scenario(format!("no weight for point {label:?}")))?;
                    Ok((label.clone(), parse_rational(w)?))
                })
                .collect::<Result<Vec<_>>>()?;
            FiniteProbabilitySpace::new(entries)?
        }
        (true, Some(_)) => {
            return Err(Error::Scenario(
                "give either uniform = true or an xi table, not both".into(),
            ))
        }
        (false, None) => {
            return Err(Error::Scenario(
                "model needs uniform = true or an xi table".into(),
            ))
        }
    };
    MuContextualStructure::new(model, xi)
}

fn build_registry(section: RegistrySection) -> Result<MeasurementRegistry> {
    let mut registry = MeasurementRegistry::new();
    for proc in section.procedure {
        let contexts = FiniteProbabilitySpace::new(
            proc.contexts
                .into_iter()
                .map(|(c, w)| Ok((c, parse_rational(&w)?)))
                .collect::<Result<Vec<_>>>()?,
        )?;
        registry.insert(MeasurementProcedure::new(
            proc.id,
            proc.measures.into_iter().map(PropertyId::new),
            contexts,
        )?)?;
    }
    Ok(registry)
}

fn build_quantum(section: QuantumSection) -> Result<QuantumModel> {
    let mut model = QuantumModel::new(section.dim)?;
    for (name, spec) in section.states {
        let rho = match spec {
            MatrixSpec::Preset(p) => {
                let preset = p.strip_prefix("preset:").ok_or_else(|| {
                    Error::Scenario(format!("state {name:?}: expected \"preset:<name>\""))
                })?;
                quantum::preset_density(preset, section.dim)?
            }
            MatrixSpec::Rows(rows) => DensityOperator::new(quantum::parse_matrix(&rows)?)?,
        };
        model.insert_state(name, rho)?;
    }
    for (name, spec) in section.properties {
        let p = match spec {
            MatrixSpec::Preset(p) => {
                let preset = p.strip_prefix("preset:").ok_or_else(|| {
                    Error::Scenario(format!("property {name:?}: expected \"preset:<name>\""))
                })?;
                quantum::preset_projector(preset, section.dim)?
            }
            MatrixSpec::Rows(rows) => Projector::new(quantum::parse_matrix(&rows)?)?,
        };
        model.insert_property(name, p)?;
    }
    Ok(model)
}

fn build_embedding_spec(section: EmbeddingSection) -> Result<EmbeddingSpec> {
    let scheme = EmbeddingScheme::new(
        SchemeKind::parse(&section.scheme)?,
        section.contexts,
        section.resolution,
    )?;
    let groups = section
        .groups
        .iter()
        .map(|g| g.iter().map(PropertyId::new).collect())
        .collect();
    let state_weights = section
        .state_weights
        .map(|m| {
            m.into_iter()
                .map(|(s, w)| Ok((StateId::new(s), parse_rational(&w)?)))
                .collect::<Result<BTreeMap<_, _>>>()
        })
        .transpose()?;
    Ok(EmbeddingSpec {
        scheme,
        groups,
        state_weights,
    })
}

fn build_lattice(section: LatticeSection) -> Result<OrthoLattice> {
    let elements: Vec<PropertyId> = section.elements.iter().map(PropertyId::new).collect();
    let leq: Vec<(PropertyId, PropertyId)> = section
        .leq
        .iter()
        .map(|[a, b]| (PropertyId::new(a), PropertyId::new(b)))
        .collect();
    let ortho: BTreeMap<PropertyId, PropertyId> = section
        .ortho
        .iter()
        .map(|(a, b)| (PropertyId::new(a), PropertyId::new(b)))
        .collect();
    OrthoLattice::from_order(elements, &leq, &ortho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    const CLASSICAL: &str = r#"
name = "classical"
seed = 7
tasks = ["check-model", "mean-prob"]

[tolerances]
float_abs = 1e-9

[model]
universe = ["u1", "u2", "u3", "u4"]
uniform = true

[model.predicates]
"S:s0" = ["u2", "u3"]
"P:E@c1" = ["u1", "u2"]
"P:E@c2" = ["u2", "u3"]

[registry]
[[registry.procedure]]
id = "M1"
measures = ["E"]
[registry.procedure.contexts]
c1 = "1/2"
c2 = "1/2"

[[mean_prob]]
a = "P:E@c1(x)"
b = "S:s0(x)"
procedure = "M1"
"#;

    #[test]
    fn classical_scenario_parses_into_domain_values() {
        let sc = Scenario::parse(CLASSICAL).unwrap();
        assert_eq!(sc.name, "classical");
        assert_eq!(sc.seed, 7);
        assert_eq!(sc.tasks, vec![TaskKind::CheckModel, TaskKind::MeanProb]);
        let s = sc.structure.unwrap();
        assert_eq!(s.model().universe_len(), 4);
        assert_eq!(s.mu_absolute(&Formula::state("s0")).unwrap(), ratio(1, 2));
        let reg = sc.registry.unwrap();
        assert_eq!(reg.procedures().count(), 1);
        assert_eq!(sc.mean_prob.len(), 1);
    }

    #[test]
    fn quantum_scenario_with_presets_and_matrices() {
        let text = r#"
name = "q"
tasks = ["born"]

[quantum]
dim = 2
[quantum.states]
"z+" = "preset:z+"
"m" = "preset:maximally-mixed"
[quantum.properties]
"x+" = "preset:x+"
"raw" = [["1,0", "0,0"], ["0,0", "0,0"]]
"#;
        let sc = Scenario::parse(text).unwrap();
        let q = sc.quantum.unwrap();
        assert_eq!(q.dim(), 2);
        assert!(q.state(&"z+".into()).is_ok());
        assert!(q.property(&"raw".into()).is_ok());
    }

    #[test]
    fn missing_fixtures_are_scenario_errors() {
        let text = "name = \"bad\"\ntasks = [\"born\"]\n";
        assert!(matches!(Scenario::parse(text), Err(Error::Scenario(_))));
        assert!(matches!(
            Scenario::parse("name = \"x\"\ntasks = []\n"),
            Err(Error::Scenario(_))
        ));
        assert!(matches!(
            Scenario::parse("name = \"x\"\ntasks = [\"nope\"]\n"),
            Err(Error::Scenario(_))
        ));
    }

    #[test]
    fn malformed_toml_is_reported_with_detail() {
        let err = Scenario::parse("name = \"x\"\ntasks = [").unwrap_err();
        match err {
            Error::Scenario(msg) => assert!(msg.contains("parse"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn explicit_lattice_section_builds() {
        let text = r#"
name = "lat"
tasks = ["lattice-report"]

[lattice]
elements = ["O", "a", "b", "I"]
leq = [["O", "a"], ["O", "b"], ["a", "I"], ["b", "I"]]
[lattice.ortho]
O = "I"
I = "O"
a = "b"
b = "a"
"#;
        let sc = Scenario::parse(text).unwrap();
        let lat = sc.lattice.unwrap();
        assert_eq!(lat.len(), 4);
        assert!(lat.validate().pass());
    }
}
