//! Property-level probability families and their order structure.
//!
//! A family assigns each (state, property) pair a probability — exact
//! rationals for classical models, floats for quantum ones. The family
//! induces a preorder on properties; on an orthocomplemented lattice the
//! per-state maps can be checked for the generalized-measure conditions
//! (normalization at the top, additivity over pairwise-orthogonal
//! families), which is where Boolean and non-Boolean lattices part ways.
//! Sequential conditioning through a first-kind transform replaces the
//! classical ratio, which fails on non-distributive lattices.

use crate::error::{Error, Result};
use crate::lang::{ContextId, Formula, PropertyId, StateId};
use crate::measurement::{mean_conditional, MeasurementRegistry};
use crate::muprob::MuContextualStructure;
use crate::rational::Rational;
use num_traits::{Num, Signed};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Numeric values a probability family can carry.
pub trait ProbValue: Num + Signed + PartialOrd + Clone + fmt::Display {}

impl<T: Num + Signed + PartialOrd + Clone + fmt::Display> ProbValue for T {}

/// The property and state namespaces of a model.
#[derive(Debug, Clone, Default)]
pub struct PropertySpace {
    pub properties: BTreeSet<PropertyId>,
    pub states: BTreeSet<StateId>,
}

impl PropertySpace {
    pub fn new(
        properties: impl IntoIterator<Item = PropertyId>,
        states: impl IntoIterator<Item = StateId>,
    ) -> Self {
        PropertySpace {
            properties: properties.into_iter().collect(),
            states: states.into_iter().collect(),
        }
    }
}

/// Map (state, property) → probability.
#[derive(Debug, Clone, Default)]
pub struct StateProbabilityFamily<P> {
    values: BTreeMap<(StateId, PropertyId), P>,
}

impl<P: ProbValue> StateProbabilityFamily<P> {
    pub fn new() -> Self {
        StateProbabilityFamily {
            values: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, state: StateId, prop: PropertyId, value: P) -> Result<()> {
        if value < P::zero() || value > P::one() {
            return Err(Error::InvalidWeights(format!(
                "probability {value} for ({state}, {prop}) is outside [0,1]"
            )));
        }
        self.values.insert((state, prop), value);
        Ok(())
    }

    pub fn get(&self, state: &StateId, prop: &PropertyId) -> Result<&P> {
        self.values
            .get(&(state.clone(), prop.clone()))
            .ok_or_else(|| Error::Scenario(format!("no probability recorded for ({state}, {prop})")))
    }

    pub fn states(&self) -> BTreeSet<StateId> {
        self.values.keys().map(|(s, _)| s.clone()).collect()
    }

    pub fn properties(&self) -> BTreeSet<PropertyId> {
        self.values.keys().map(|(_, e)| e.clone()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(StateId, PropertyId), &P)> {
        self.values.iter()
    }

    pub fn is_complete(&self, space: &PropertySpace) -> bool {
        space.states.iter().all(|s| {
            space
                .properties
                .iter()
                .all(|e| self.values.contains_key(&(s.clone(), e.clone())))
        })
    }
}

/// The probability a state assigns a property: the context-averaged
/// conditional of the property predicate given the state predicate, under
/// the least admissible procedure. Once procedure independence holds the
/// choice of procedure does not matter.
pub fn property_probability(
    s: &MuContextualStructure,
    reg: &MeasurementRegistry,
    state: &StateId,
    prop: &PropertyId,
) -> Result<Rational> {
    let procs = reg.procedures_measuring(prop);
    let m = procs
        .first()
        .ok_or_else(|| Error::NoProcedure(prop.clone()))?;
    let c0 = ContextId::new(m.contexts().label(0));
    let a = Formula::property(prop.clone(), c0);
    let b = Formula::state(state.clone());
    mean_conditional(s, reg, &a, &b, m.id())
}

/// Builds the full exact-rational family over the given namespaces.
pub fn classical_family(
    s: &MuContextualStructure,
    reg: &MeasurementRegistry,
    space: &PropertySpace,
) -> Result<StateProbabilityFamily<Rational>> {
    let mut family = StateProbabilityFamily::new();
    for state in &space.states {
        for prop in &space.properties {
            let p = property_probability(s, reg, state, prop)?;
            family.insert(state.clone(), prop.clone(), p)?;
        }
    }
    Ok(family)
}

/// The preorder a family induces on properties, together with its
/// symmetrization.
#[derive(Debug, Clone)]
pub struct PropertyPreorder {
    pub properties: Vec<PropertyId>,
    leq: Vec<Vec<bool>>,
}

impl PropertyPreorder {
    pub fn index(&self, e: &PropertyId) -> Result<usize> {
        self.properties
            .iter()
            .position(|p| p == e)
            .ok_or_else(|| Error::UnknownProperty(e.clone()))
    }

    pub fn leq_idx(&self, i: usize, j: usize) -> bool {
        self.leq[i][j]
    }

    pub fn leq(&self, e: &PropertyId, f: &PropertyId) -> Result<bool> {
        Ok(self.leq[self.index(e)?][self.index(f)?])
    }

    pub fn equivalent_idx(&self, i: usize, j: usize) -> bool {
        self.leq[i][j] && self.leq[j][i]
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.properties.len()).all(|i| self.leq[i][i])
    }

    pub fn is_transitive(&self) -> bool {
        let n = self.properties.len();
        (0..n).all(|i| {
            (0..n).all(|j| {
                (0..n).all(|k| !(self.leq[i][j] && self.leq[j][k]) || self.leq[i][k])
            })
        })
    }

    /// Equivalence classes of the symmetrization, as index lists.
    pub fn equivalence_classes(&self) -> Vec<Vec<usize>> {
        let n = self.properties.len();
        let mut class_of = vec![usize::MAX; n];
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for i in 0..n {
            if class_of[i] != usize::MAX {
                continue;
            }
            let c = classes.len();
            class_of[i] = c;
            let mut members = vec![i];
            for j in i + 1..n {
                if class_of[j] == usize::MAX && self.equivalent_idx(i, j) {
                    class_of[j] = c;
                    members.push(j);
                }
            }
            classes.push(members);
        }
        classes
    }
}

/// Pointwise order: `E ≺ F` iff every state values `E` at most `F`, with
/// `slack` absorbing float rounding (pass zero for exact families).
pub fn induced_preorder<P: ProbValue>(
    family: &StateProbabilityFamily<P>,
    slack: &P,
) -> Result<PropertyPreorder> {
    let states: Vec<StateId> = family.states().into_iter().collect();
    let properties: Vec<PropertyId> = family.properties().into_iter().collect();
    for s in &states {
        for e in &properties {
            family.get(s, e)?;
        }
    }
    let n = properties.len();
    let mut leq = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            leq[i][j] = states.iter().all(|s| {
                let vi = family.get(s, &properties[i]).expect("checked complete");
                let vj = family.get(s, &properties[j]).expect("checked complete");
                vi.clone() <= vj.clone() + slack.clone()
            });
        }
    }
    Ok(PropertyPreorder { properties, leq })
}

/// A finite orthocomplemented lattice given by tables.
#[derive(Debug, Clone)]
pub struct OrthoLattice {
    elements: Vec<PropertyId>,
    leq: Vec<Vec<bool>>,
    meet: Vec<Vec<usize>>,
    join: Vec<Vec<usize>>,
    ortho: Vec<usize>,
    bottom: usize,
    top: usize,
}

impl OrthoLattice {
    /// Builds the lattice from an order (given as pairs, closed reflexively
    /// and transitively) and an orthocomplement map. Meets and joins are
    /// computed from the order; their absence is an error.
    pub fn from_order(
        elements: Vec<PropertyId>,
        leq_pairs: &[(PropertyId, PropertyId)],
        ortho_map: &BTreeMap<PropertyId, PropertyId>,
    ) -> Result<Self> {
        let n = elements.len();
        if n == 0 {
            return Err(Error::MalformedLattice("no elements".into()));
        }
        let index = |e: &PropertyId| -> Result<usize> {
            elements
                .iter()
                .position(|x| x == e)
                .ok_or_else(|| Error::MalformedLattice(format!("unknown element {e}")))
        };

        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for (a, b) in leq_pairs {
            leq[index(a)?][index(b)?] = true;
        }
        // transitive closure
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if leq[i][k] && leq[k][j] {
                        leq[i][j] = true;
                    }
                }
            }
        }

        let mut ortho = vec![usize::MAX; n];
        for (e, f) in ortho_map {
            ortho[index(e)?] = index(f)?;
        }
        if let Some(missing) = ortho.iter().position(|&o| o == usize::MAX) {
            return Err(Error::MalformedLattice(format!(
                "element {} has no orthocomplement",
                elements[missing]
            )));
        }

        Self::from_parts(elements, leq, ortho)
    }

    /// Assembles the lattice from a complete order matrix and ortho table,
    /// computing meet and join tables from the order.
    pub fn from_parts(
        elements: Vec<PropertyId>,
        leq: Vec<Vec<bool>>,
        ortho: Vec<usize>,
    ) -> Result<Self> {
        let n = elements.len();
        for i in 0..n {
            for j in 0..n {
                if i != j && leq[i][j] && leq[j][i] {
                    return Err(Error::MalformedLattice(format!(
                        "{} and {} order both ways but are distinct",
                        elements[i], elements[j]
                    )));
                }
            }
        }
        let bottom = (0..n)
            .find(|&b| (0..n).all(|k| leq[b][k]))
            .ok_or_else(|| Error::MalformedLattice("no least element".into()))?;
        let top = (0..n)
            .find(|&t| (0..n).all(|k| leq[k][t]))
            .ok_or_else(|| Error::MalformedLattice("no greatest element".into()))?;

        let glb = |i: usize, j: usize| -> Option<usize> {
            let lower: Vec<usize> = (0..n).filter(|&k| leq[k][i] && leq[k][j]).collect();
            lower
                .iter()
                .copied()
                .find(|&g| lower.iter().all(|&k| leq[k][g]))
        };
        let lub = |i: usize, j: usize| -> Option<usize> {
            let upper: Vec<usize> = (0..n).filter(|&k| leq[i][k] && leq[j][k]).collect();
            upper
                .iter()
                .copied()
                .find(|&g| upper.iter().all(|&k| leq[g][k]))
        };
        let mut meet = vec![vec![0usize; n]; n];
        let mut join = vec![vec![0usize; n]; n];
        for i in 0..n {
            for j in 0..n {
                meet[i][j] = glb(i, j).ok_or_else(|| {
                    Error::MalformedLattice(format!(
                        "{} and {} have no meet",
                        elements[i], elements[j]
                    ))
                })?;
                join[i][j] = lub(i, j).ok_or_else(|| {
                    Error::MalformedLattice(format!(
                        "{} and {} have no join",
                        elements[i], elements[j]
                    ))
                })?;
            }
        }
        Ok(OrthoLattice {
            elements,
            leq,
            meet,
            join,
            ortho,
            bottom,
            top,
        })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[PropertyId] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &PropertyId {
        &self.elements[i]
    }

    pub fn index(&self, e: &PropertyId) -> Result<usize> {
        self.elements
            .iter()
            .position(|x| x == e)
            .ok_or_else(|| Error::UnknownProperty(e.clone()))
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn leq_idx(&self, i: usize, j: usize) -> bool {
        self.leq[i][j]
    }

    pub fn meet_idx(&self, i: usize, j: usize) -> usize {
        self.meet[i][j]
    }

    pub fn join_idx(&self, i: usize, j: usize) -> usize {
        self.join[i][j]
    }

    pub fn ortho_idx(&self, i: usize) -> usize {
        self.ortho[i]
    }

    /// `i ⊥ j`: each lies under the other's orthocomplement.
    pub fn orthogonal_idx(&self, i: usize, j: usize) -> bool {
        self.leq[i][self.ortho[j]] && self.leq[j][self.ortho[i]]
    }

    /// Re-verifies the orthocomplementation laws and order coherence of the
    /// tables. Useful when the tables were generated numerically.
    pub fn validate(&self) -> LatticeLawReport {
        let mut violations = Vec::new();
        let n = self.len();
        for i in 0..n {
            if !self.leq[i][i] {
                violations.push(format!("{} is not ≤ itself", self.elements[i]));
            }
            if self.ortho[self.ortho[i]] != i {
                violations.push(format!(
                    "double orthocomplement of {} is {}",
                    self.elements[i],
                    self.elements[self.ortho[self.ortho[i]]]
                ));
            }
            if self.meet[i][self.ortho[i]] != self.bottom {
                violations.push(format!(
                    "{} ⋒ {} is not the bottom",
                    self.elements[i],
                    self.elements[self.ortho[i]]
                ));
            }
            if self.join[i][self.ortho[i]] != self.top {
                violations.push(format!(
                    "{} ⋓ {} is not the top",
                    self.elements[i],
                    self.elements[self.ortho[i]]
                ));
            }
            if !self.leq[self.bottom][i] {
                violations.push(format!("bottom is not ≤ {}", self.elements[i]));
            }
            if !self.leq[i][self.top] {
                violations.push(format!("{} is not ≤ top", self.elements[i]));
            }
        }
        for i in 0..n {
            for j in 0..n {
                if self.leq[i][j] && !self.leq[self.ortho[j]][self.ortho[i]] {
                    violations.push(format!(
                        "orthocomplement does not reverse {} ≤ {}",
                        self.elements[i], self.elements[j]
                    ));
                }
                for k in 0..n {
                    if self.leq[i][j] && self.leq[j][k] && !self.leq[i][k] {
                        violations.push(format!(
                            "order is not transitive at {}, {}, {}",
                            self.elements[i], self.elements[j], self.elements[k]
                        ));
                    }
                }
            }
        }
        LatticeLawReport { violations }
    }

    /// Whether meet distributes over join everywhere (Boolean-style);
    /// non-distributivity is what makes the classical conditioning ratio
    /// fail to be additive.
    pub fn is_distributive(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| {
            (0..n).all(|j| {
                (0..n).all(|k| {
                    self.meet[i][self.join[j][k]] == self.join[self.meet[i][j]][self.meet[i][k]]
                })
            })
        })
    }
}

#[derive(Debug, Clone, Default)]
pub struct LatticeLawReport {
    pub violations: Vec<String>,
}

impl LatticeLawReport {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

/// All maximal families of pairwise-orthogonal elements, each sorted
/// ascending, in a deterministic order.
pub fn maximal_orthogonal_families(lat: &OrthoLattice) -> Vec<Vec<usize>> {
    let n = lat.len();
    let mut out = Vec::new();
    let mut clique = Vec::new();
    // Bron–Kerbosch without pivoting; lattices here are small
    fn extend(
        lat: &OrthoLattice,
        clique: &mut Vec<usize>,
        candidates: Vec<usize>,
        excluded: Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if candidates.is_empty() && excluded.is_empty() {
            out.push(clique.clone());
            return;
        }
        let mut cands = candidates.clone();
        let mut excl = excluded;
        while let Some(&v) = cands.first() {
            clique.push(v);
            let next_c: Vec<usize> = cands
                .iter()
                .copied()
                .filter(|&u| u != v && lat.orthogonal_idx(u, v))
                .collect();
            let next_x: Vec<usize> = excl
                .iter()
                .copied()
                .filter(|&u| lat.orthogonal_idx(u, v))
                .collect();
            extend(lat, clique, next_c, next_x, out);
            clique.pop();
            cands.retain(|&u| u != v);
            excl.push(v);
        }
    }
    extend(lat, &mut clique, (0..n).collect(), Vec::new(), &mut out);
    for fam in &mut out {
        fam.sort_unstable();
    }
    out.sort();
    out.dedup();
    out
}

#[derive(Debug, Clone)]
pub struct GpmViolation {
    /// Element names of the offending orthogonal family.
    pub family: Vec<String>,
    pub join_value: String,
    pub summed_value: String,
}

#[derive(Debug, Clone, Default)]
pub struct GpmReport {
    /// Value at the top element when it misses 1.
    pub normalization_failure: Option<String>,
    pub additivity_violations: Vec<GpmViolation>,
    pub families_checked: usize,
}

impl GpmReport {
    pub fn pass(&self) -> bool {
        self.normalization_failure.is_none() && self.additivity_violations.is_empty()
    }
}

/// Checks the generalized-measure conditions for one state: value 1 at the
/// top, and additivity over every maximal pairwise-orthogonal family.
pub fn is_generalized_probability_measure<P: ProbValue>(
    lat: &OrthoLattice,
    family: &StateProbabilityFamily<P>,
    state: &StateId,
    tol: &P,
) -> Result<GpmReport> {
    let mut report = GpmReport::default();
    let top_value = family.get(state, lat.element(lat.top()))?.clone();
    if (top_value.clone() - P::one()).abs() > *tol {
        report.normalization_failure = Some(top_value.to_string());
    }
    let families = maximal_orthogonal_families(lat);
    report.families_checked = families.len();
    for fam in families {
        let join = fam
            .iter()
            .copied()
            .reduce(|a, b| lat.join_idx(a, b))
            .expect("families are nonempty");
        let join_value = family.get(state, lat.element(join))?.clone();
        let mut sum = P::zero();
        for &i in &fam {
            sum = sum + family.get(state, lat.element(i))?.clone();
        }
        if (join_value.clone() - sum.clone()).abs() > *tol {
            report.additivity_violations.push(GpmViolation {
                family: fam.iter().map(|&i| lat.element(i).to_string()).collect(),
                join_value: join_value.to_string(),
                summed_value: sum.to_string(),
            });
        }
    }
    Ok(report)
}

/// An orthogonal pair on which the classical conditioning ratio fails to be
/// additive.
#[derive(Debug, Clone)]
pub struct ConditioningFailureWitness<P> {
    pub e1: PropertyId,
    pub e2: PropertyId,
    /// `P_S((E1 ⋓ E2) ⋒ F) / P_S(F)`
    pub left: P,
    /// `P_S(E1 ⋒ F)/P_S(F) + P_S(E2 ⋒ F)/P_S(F)`
    pub right: P,
}

/// Searches the lattice for an orthogonal pair witnessing the failure of
/// ratio conditioning, scanning pairs in element order. Returns `None` when
/// the ratio is additive everywhere (as it is on distributive lattices).
pub fn classical_conditioning_failure_witness<P: ProbValue>(
    lat: &OrthoLattice,
    family: &StateProbabilityFamily<P>,
    state: &StateId,
    conditioning: &PropertyId,
    tol: &P,
) -> Result<Option<ConditioningFailureWitness<P>>> {
    let f = lat.index(conditioning)?;
    let pf = family.get(state, conditioning)?.clone();
    if pf <= P::zero() {
        return Err(Error::ZeroConditioningEvent {
            what: format!("property {conditioning} in state {state}"),
        });
    }
    let n = lat.len();
    for i in 0..n {
        for j in i + 1..n {
            if !lat.orthogonal_idx(i, j) {
                continue;
            }
            let joined = lat.join_idx(i, j);
            let left =
                family.get(state, lat.element(lat.meet_idx(joined, f)))?.clone() / pf.clone();
            let right = family.get(state, lat.element(lat.meet_idx(i, f)))?.clone() / pf.clone()
                + family.get(state, lat.element(lat.meet_idx(j, f)))?.clone() / pf.clone();
            if (left.clone() - right.clone()).abs() > *tol {
                return Ok(Some(ConditioningFailureWitness {
                    e1: lat.element(i).clone(),
                    e2: lat.element(j).clone(),
                    left,
                    right,
                }));
            }
        }
    }
    Ok(None)
}

/// Applies a first-kind transform: maps `state` to a state that values
/// `prop` with certainty. The certainty postcondition is verified, never
/// assumed.
pub fn first_kind_transform<P: ProbValue>(
    t_map: &BTreeMap<StateId, StateId>,
    family: &StateProbabilityFamily<P>,
    state: &StateId,
    prop: &PropertyId,
    tol: &P,
) -> Result<StateId> {
    let v = family.get(state, prop)?.clone();
    if v.abs() <= *tol {
        return Err(Error::NotInDomain {
            state: state.clone(),
            property: prop.clone(),
        });
    }
    let t = t_map.get(state).ok_or_else(|| Error::NotInDomain {
        state: state.clone(),
        property: prop.clone(),
    })?;
    let vt = family.get(t, prop)?.clone();
    if (vt.clone() - P::one()).abs() > *tol {
        return Err(Error::PostconditionViolated(format!(
            "transform for {prop} sends {state} to {t}, which values it at {vt}, not 1"
        )));
    }
    Ok(t.clone())
}

/// Probability of `e` after a first-kind measurement of `f` on `state`:
/// the transformed state's value at `e`.
pub fn conditional_q_probability<P: ProbValue>(
    family: &StateProbabilityFamily<P>,
    t_maps: &BTreeMap<PropertyId, BTreeMap<StateId, StateId>>,
    state: &StateId,
    e: &PropertyId,
    f: &PropertyId,
    tol: &P,
) -> Result<P> {
    let t_map = t_maps
        .get(f)
        .ok_or_else(|| Error::NoProcedure(f.clone()))?;
    let t = first_kind_transform(t_map, family, state, f, tol)?;
    family.get(&t, e).cloned()
}
