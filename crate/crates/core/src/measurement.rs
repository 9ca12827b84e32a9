//! Measurement procedures, compatibility, testability, and mean conditional
//! probabilities.
//!
//! Each procedure owns a weighted finite set of contexts. A formula is
//! testable when all properties it mentions are co-measurable by a single
//! procedure and carry one shared context index that some such procedure
//! contains. The mean conditional probability averages exact per-context
//! conditionals with the procedure's context weights; terms are summed in a
//! fixed context order so results are reproducible bit for bit.

use crate::error::{Error, Result};
use crate::lang::{ContextId, Formula, ProcedureId, PropertyId};
use crate::muprob::MuContextualStructure;
use crate::prob::FiniteProbabilitySpace;
use crate::rational::Rational;
use num_traits::{Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};

/// A measurement procedure: the properties it can register and a classical
/// probability space over its microscopic contexts.
#[derive(Debug, Clone)]
pub struct MeasurementProcedure {
    id: ProcedureId,
    measures: BTreeSet<PropertyId>,
    contexts: FiniteProbabilitySpace,
}

impl MeasurementProcedure {
    pub fn new(
        id: impl Into<ProcedureId>,
        measures: impl IntoIterator<Item = PropertyId>,
        contexts: FiniteProbabilitySpace,
    ) -> Result<Self> {
        let measures: BTreeSet<PropertyId> = measures.into_iter().collect();
        if measures.is_empty() {
            return Err(Error::Scenario("procedure measures no property".into()));
        }
        if contexts.is_empty() {
            return Err(Error::Scenario("procedure has no contexts".into()));
        }
        Ok(MeasurementProcedure {
            id: id.into(),
            measures,
            contexts,
        })
    }

    pub fn id(&self) -> &ProcedureId {
        &self.id
    }

    pub fn measures(&self) -> &BTreeSet<PropertyId> {
        &self.measures
    }

    pub fn contexts(&self) -> &FiniteProbabilitySpace {
        &self.contexts
    }

    pub fn context_ids(&self) -> impl Iterator<Item = ContextId> + '_ {
        self.contexts.labels().iter().map(ContextId::new)
    }

    pub fn has_context(&self, c: &ContextId) -> bool {
        self.contexts.point_index(c.as_str()).is_some()
    }
}

/// All registered procedures, indexed by id, with a derived property index.
#[derive(Debug, Clone, Default)]
pub struct MeasurementRegistry {
    procedures: BTreeMap<ProcedureId, MeasurementProcedure>,
}

impl MeasurementRegistry {
    pub fn new() -> Self {
        MeasurementRegistry::default()
    }

    pub fn insert(&mut self, proc: MeasurementProcedure) -> Result<()> {
        if self.procedures.contains_key(proc.id()) {
            return Err(Error::Scenario(format!(
                "duplicate procedure id {}",
                proc.id()
            )));
        }
        self.procedures.insert(proc.id().clone(), proc);
        Ok(())
    }

    pub fn procedures(&self) -> impl Iterator<Item = &MeasurementProcedure> {
        self.procedures.values()
    }

    pub fn procedure(&self, id: &ProcedureId) -> Result<&MeasurementProcedure> {
        self.procedures
            .get(id)
            .ok_or_else(|| Error::UnknownProcedure(id.clone()))
    }

    /// Union of all `measures` sets: the closed world of known properties.
    pub fn known_properties(&self) -> BTreeSet<PropertyId> {
        self.procedures
            .values()
            .flat_map(|p| p.measures.iter().cloned())
            .collect()
    }

    /// Union of all procedures' context sets.
    pub fn known_contexts(&self) -> BTreeSet<ContextId> {
        self.procedures
            .values()
            .flat_map(|p| p.context_ids())
            .collect()
    }

    /// The set of procedures measuring `e` (possibly empty).
    pub fn procedures_measuring(&self, e: &PropertyId) -> Vec<&MeasurementProcedure> {
        self.procedures
            .values()
            .filter(|p| p.measures.contains(e))
            .collect()
    }

    /// Procedures measuring every property in `props`.
    pub fn procedures_measuring_all<'a>(
        &self,
        props: impl IntoIterator<Item = &'a PropertyId>,
    ) -> Vec<&MeasurementProcedure> {
        let props: Vec<&PropertyId> = props.into_iter().collect();
        self.procedures
            .values()
            .filter(|p| props.iter().all(|e| p.measures.contains(*e)))
            .collect()
    }

    /// Compatibility: a nonempty set of properties is compatible iff some
    /// single procedure measures all of them. The relation this induces on
    /// pairs is reflexive and symmetric but need not be transitive.
    pub fn compatible<'a>(&self, props: impl IntoIterator<Item = &'a PropertyId>) -> Result<bool> {
        let props: Vec<&PropertyId> = props.into_iter().collect();
        if props.is_empty() {
            return Err(Error::Scenario(
                "compatibility of an empty property set is undefined".into(),
            ));
        }
        let known = self.known_properties();
        for e in &props {
            if !known.contains(*e) {
                return Err(Error::UnknownProperty((*e).clone()));
            }
        }
        Ok(!self.procedures_measuring_all(props).is_empty())
    }
}

/// Evidence that a formula is testable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Testability {
    /// The formula mentions no properties; any procedure tests it.
    StateOnly,
    /// All occurring properties share `context`, and every procedure listed
    /// measures all of them and contains that context.
    Witnessed {
        context: ContextId,
        procedures: Vec<ProcedureId>,
    },
}

/// Decides testability and returns the witnesses, or `None` when the
/// formula is not testable. Unknown property or context names are errors
/// (registries are closed-world).
pub fn is_testable(reg: &MeasurementRegistry, f: &Formula) -> Result<Option<Testability>> {
    let occurrences = f.property_occurrences();
    if occurrences.is_empty() {
        return Ok(Some(Testability::StateOnly));
    }
    let known_props = reg.known_properties();
    let known_ctx = reg.known_contexts();
    for (e, c) in &occurrences {
        if !known_props.contains(e) {
            return Err(Error::UnknownProperty(e.clone()));
        }
        if !known_ctx.contains(c) {
            return Err(Error::UnknownContext(c.clone()));
        }
    }
    let contexts: BTreeSet<ContextId> = occurrences.iter().map(|(_, c)| c.clone()).collect();
    if contexts.len() != 1 {
        return Ok(None);
    }
    let context = contexts.into_iter().next().expect("one context");
    let props: BTreeSet<PropertyId> = occurrences.into_iter().map(|(e, _)| e).collect();
    let witnesses: Vec<ProcedureId> = reg
        .procedures_measuring_all(props.iter())
        .into_iter()
        .filter(|m| m.has_context(&context))
        .map(|m| m.id().clone())
        .collect();
    if witnesses.is_empty() {
        return Ok(None);
    }
    Ok(Some(Testability::Witnessed {
        context,
        procedures: witnesses,
    }))
}

/// Replaces context `from` by `to` in every property atom of `f`.
pub fn reindex(f: &Formula, from: &ContextId, to: &ContextId) -> Formula {
    f.reindex(from, to)
}

/// The shared context index of the property atoms in `a ∧ b`, or `None`
/// when no property occurs. Errors when the indices are mixed.
fn joint_context(a: &Formula, b: &Formula) -> Result<Option<ContextId>> {
    let mut contexts = a.context_ids();
    contexts.extend(b.context_ids());
    match contexts.len() {
        0 => Ok(None),
        1 => Ok(contexts.into_iter().next()),
        _ => Err(Error::NotJointlyTestable(format!(
            "property atoms carry mixed context indices {}",
            contexts
                .iter()
                .map(|c| c.as_str())
                .collect::<Vec<_>>()
                .join(", ")
        ))),
    }
}

/// Mean conditional probability of `a` given `b` under procedure `m`:
/// the ν-weighted average over the procedure's contexts of the exact
/// conditional probabilities of the formulas reindexed to each context.
///
/// Requires `a ∧ b` to be jointly testable (witnessed by some registered
/// procedure at the formulas' own context index) and `m` to measure every
/// occurring property; reindexing into `m`'s contexts preserves testability.
/// Zero-weight contexts are skipped, so conditioning only needs positive
/// measure on contexts that carry weight.
pub fn mean_conditional(
    s: &MuContextualStructure,
    reg: &MeasurementRegistry,
    a: &Formula,
    b: &Formula,
    m: &ProcedureId,
) -> Result<Rational> {
    let proc = reg.procedure(m)?;
    let joint = a.clone().and(b.clone());
    match is_testable(reg, &joint)? {
        None => {
            return Err(Error::NotJointlyTestable(format!(
                "{joint} has no testability witness"
            )))
        }
        Some(Testability::StateOnly) => {
            // no property atoms: every context yields the same conditional
            return s.mu_conditional(a, b);
        }
        Some(Testability::Witnessed { .. }) => {}
    }
    let props = joint.property_ids();
    if let Some(missing) = props.iter().find(|e| !proc.measures().contains(*e)) {
        return Err(Error::NotJointlyTestable(format!(
            "procedure {m} does not measure property {missing}"
        )));
    }
    let from = joint_context(a, b)?.expect("witnessed formulas carry a context");

    let mut mean = Rational::zero();
    for i in 0..proc.contexts().len() {
        let weight = proc.contexts().weight(i).clone();
        if weight.is_zero() {
            continue;
        }
        let to = ContextId::new(proc.contexts().label(i));
        let a_c = a.reindex(&from, &to);
        let b_c = b.reindex(&from, &to);
        let p = s.mu_conditional(&a_c, &b_c).map_err(|e| match e {
            Error::ZeroConditioningEvent { .. } => Error::ZeroConditioningEvent {
                what: format!("{b_c} (context {to})"),
            },
            other => other,
        })?;
        mean += weight * p;
    }
    Ok(mean)
}

/// One procedure's mean in an independence comparison.
#[derive(Debug, Clone)]
pub struct ProcedureMean {
    pub procedure: ProcedureId,
    pub mean: Rational,
}

#[derive(Debug, Clone)]
pub struct IndependenceReport {
    pub means: Vec<ProcedureMean>,
    /// Largest |mean(M) − mean(N)| over admissible pairs; zero when fewer
    /// than two procedures apply (a vacuous pass).
    pub max_deviation: Rational,
    pub tolerance: Rational,
}

impl IndependenceReport {
    pub fn pass(&self) -> bool {
        self.max_deviation <= self.tolerance
    }
}

/// Computes the mean of `a` given `b` under every procedure measuring all
/// occurring properties and reports the largest pairwise deviation. The
/// mean conditional probability is well defined exactly when this deviation
/// vanishes.
pub fn check_procedure_independence(
    s: &MuContextualStructure,
    reg: &MeasurementRegistry,
    a: &Formula,
    b: &Formula,
    tolerance: Rational,
) -> Result<IndependenceReport> {
    let joint = a.clone().and(b.clone());
    let props = joint.property_ids();
    let admissible: Vec<ProcedureId> = if props.is_empty() {
        reg.procedures().map(|p| p.id().clone()).collect()
    } else {
        reg.procedures_measuring_all(props.iter())
            .into_iter()
            .map(|p| p.id().clone())
            .collect()
    };
    let mut means = Vec::with_capacity(admissible.len());
    for m in &admissible {
        means.push(ProcedureMean {
            procedure: m.clone(),
            mean: mean_conditional(s, reg, a, b, m)?,
        });
    }
    let mut max_deviation = Rational::zero();
    for i in 0..means.len() {
        for j in i + 1..means.len() {
            let d = (&means[i].mean - &means[j].mean).abs();
            if d > max_deviation {
                max_deviation = d;
            }
        }
    }
    Ok(IndependenceReport {
        means,
        max_deviation,
        tolerance,
    })
}
