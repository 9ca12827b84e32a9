//! Constructions of classical models whose context-averaged conditionals
//! reproduce a quantum model's Born values.
//!
//! Three schemes realize the two available sources of randomness:
//!
//! * `ontic` — the universe carries all the randomness. Each state becomes a
//!   block of `R` equally weighted points and each property's extension cuts
//!   off a prefix of every block sized by the Born value. Extensions do not
//!   depend on the context, so per-context conditionals already equal the
//!   Born values; exact whenever `R·born` is an integer.
//! * `deterministic-context` — the contexts carry all the randomness. Every
//!   per-context conditional is 0 or 1 (a state block is either wholly
//!   inside or wholly outside the extension); only the uniform average over
//!   `N` contexts approximates the Born value, within `1/(2N)`.
//! * `hybrid` — both sources active: per-context block prefixes with
//!   context-skewed sizes averaging to the Born value; exact whenever
//!   `N·R·born` is an integer.
//!
//! Properties measured by more than one procedure always get ontic-style
//! extensions in every context of every owning procedure, which makes the
//! per-procedure means agree exactly.

use crate::error::{Error, Result};
use crate::lang::{ContextId, Formula, Model, PredicateId, ProcedureId, PropertyId, StateId};
use crate::measurement::{check_procedure_independence, MeasurementProcedure, MeasurementRegistry};
use crate::muprob::MuContextualStructure;
use crate::prob::{Event, FiniteProbabilitySpace};
use crate::qstruct::property_probability;
use crate::quantum::{born, kappa_compatible, QuantumModel};
use crate::rational::{self, Rational};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeKind {
    Ontic,
    DeterministicContext,
    Hybrid,
}

impl SchemeKind {
    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "ontic" => Ok(SchemeKind::Ontic),
            "deterministic-context" => Ok(SchemeKind::DeterministicContext),
            "hybrid" => Ok(SchemeKind::Hybrid),
            other => Err(Error::Scenario(format!(
                "unknown embedding scheme {other:?}"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SchemeKind::Ontic => "ontic",
            SchemeKind::DeterministicContext => "deterministic-context",
            SchemeKind::Hybrid => "hybrid",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EmbeddingScheme {
    pub kind: SchemeKind,
    /// Number of contexts per procedure.
    pub context_count: usize,
    /// Ontic resolution: points per state block.
    pub resolution: usize,
}

impl EmbeddingScheme {
    pub fn new(kind: SchemeKind, context_count: usize, resolution: usize) -> Result<Self> {
        if context_count == 0 || resolution == 0 {
            return Err(Error::Scenario(
                "context count and resolution must be at least 1".into(),
            ));
        }
        Ok(EmbeddingScheme {
            kind,
            context_count,
            resolution,
        })
    }
}

/// A Born value that was not representable at the requested resolution and
/// was rounded to the nearest admissible value.
#[derive(Debug, Clone)]
pub struct ResolutionFallback {
    pub state: StateId,
    pub property: PropertyId,
    pub born_value: f64,
    pub approximated: Rational,
    /// |approximated − born|, bounded by half the grid step.
    pub bias: f64,
}

/// A classical model, measure and registry built to match a quantum target.
#[derive(Debug, Clone)]
pub struct Embedding {
    structure: MuContextualStructure,
    registry: MeasurementRegistry,
    target: QuantumModel,
    scheme: EmbeddingScheme,
    groups: Vec<Vec<PropertyId>>,
    fallbacks: Vec<ResolutionFallback>,
}

impl Embedding {
    pub fn structure(&self) -> &MuContextualStructure {
        &self.structure
    }

    pub fn registry(&self) -> &MeasurementRegistry {
        &self.registry
    }

    pub fn target(&self) -> &QuantumModel {
        &self.target
    }

    pub fn scheme(&self) -> &EmbeddingScheme {
        &self.scheme
    }

    pub fn groups(&self) -> &[Vec<PropertyId>] {
        &self.groups
    }

    /// Born values that had to be rounded; empty means the construction is
    /// exact by design.
    pub fn fallbacks(&self) -> &[ResolutionFallback] {
        &self.fallbacks
    }
}

/// Rounds to the nearest integer, ties upward.
fn round_half_up(x: &Rational) -> BigInt {
    (x + rational::ratio(1, 2)).floor().to_integer()
}

struct UniverseLayout {
    states: Vec<StateId>,
    resolution: usize,
}

impl UniverseLayout {
    fn block(&self, state_index: usize) -> Event {
        let start = state_index * self.resolution;
        Event::new(start..start + self.resolution)
    }

    fn block_prefix(&self, state_index: usize, count: usize) -> Event {
        let start = state_index * self.resolution;
        Event::new(start..start + count.min(self.resolution))
    }

    fn labels(&self) -> Vec<String> {
        let mut labels = Vec::with_capacity(self.states.len() * self.resolution);
        for s in &self.states {
            for r in 1..=self.resolution {
                labels.push(format!("{s}#{r}"));
            }
        }
        labels
    }
}

/// Builds the classical model. `groups` lists, per procedure, the target
/// properties it measures; a property may appear in several groups. Groups
/// must be pairwise commutation-compatible in the target. `state_weights`
/// scales the per-state blocks of the measure (uniform when `None`); every
/// weight must be positive.
pub fn build_embedding(
    target: &QuantumModel,
    groups: &[Vec<PropertyId>],
    scheme: EmbeddingScheme,
    state_weights: Option<&BTreeMap<StateId, Rational>>,
) -> Result<Embedding> {
    let n_ctx = scheme.context_count;
    let resolution = scheme.resolution;

    // group sanity: known properties, pairwise compatible, full coverage
    let mut owners: BTreeMap<PropertyId, Vec<usize>> = BTreeMap::new();
    for (gi, group) in groups.iter().enumerate() {
        let members: Vec<&PropertyId> = group.iter().collect::<BTreeSet<_>>().into_iter().collect();
        for (ai, a) in members.iter().enumerate() {
            target.property(a)?;
            for b in members.iter().skip(ai + 1) {
                if !kappa_compatible(target.property(a)?, target.property(b)?)? {
                    return Err(Error::IncompatibleGroup {
                        group: gi,
                        a: (*a).clone(),
                        b: (*b).clone(),
                    });
                }
            }
        }
        for e in members {
            owners.entry(e.clone()).or_default().push(gi);
        }
    }
    for (e, _) in target.properties() {
        if !owners.contains_key(e) {
            return Err(Error::NoProcedure(e.clone()));
        }
    }

    let states: Vec<StateId> = target.states().map(|(s, _)| s.clone()).collect();
    if states.is_empty() {
        return Err(Error::Scenario("target has no states".into()));
    }
    let weights: Vec<Rational> = match state_weights {
        None => {
            let w = Rational::new(BigInt::one(), BigInt::from(states.len() as i64));
            vec![w; states.len()]
        }
        Some(map) => {
            let mut out = Vec::with_capacity(states.len());
            for s in &states {
                let w = map
                    .get(s)
                    .ok_or_else(|| Error::UnknownState(s.clone()))?
                    .clone();
                if !w.is_positive() {
                    return Err(Error::InvalidWeights(format!(
                        "state weight for {s} must be positive"
                    )));
                }
                out.push(w);
            }
            let total: Rational = out.iter().sum();
            if !total.is_one() {
                return Err(Error::InvalidWeights(format!(
                    "state weights sum to {}, not 1",
                    rational::format_rational(&total)
                )));
            }
            out
        }
    };

    let layout = UniverseLayout {
        states: states.clone(),
        resolution,
    };
    let labels = layout.labels();
    let r_rational = Rational::new(BigInt::from(resolution as i64), BigInt::one());
    let xi_entries: Vec<(String, Rational)> = labels
        .iter()
        .enumerate()
        .map(|(i, l)| (l.clone(), weights[i / resolution].clone() / r_rational.clone()))
        .collect();
    let xi = FiniteProbabilitySpace::new(xi_entries)?;

    let mut model = Model::new(labels)?;
    for (si, s) in states.iter().enumerate() {
        model.insert_extension(PredicateId::State(s.clone()), layout.block(si))?;
    }

    // procedures and their uniformly weighted contexts
    let mut registry = MeasurementRegistry::new();
    let mut group_contexts: Vec<Vec<ContextId>> = Vec::with_capacity(groups.len());
    for (gi, group) in groups.iter().enumerate() {
        let proc_id = ProcedureId::new(format!("M{}", gi + 1));
        let ctx_labels: Vec<String> = (1..=n_ctx).map(|j| format!("M{}.c{j}", gi + 1)).collect();
        group_contexts.push(ctx_labels.iter().map(ContextId::new).collect());
        let contexts = FiniteProbabilitySpace::uniform(ctx_labels)?;
        registry.insert(MeasurementProcedure::new(
            proc_id,
            group.iter().cloned(),
            contexts,
        )?)?;
    }

    let mut fallbacks: Vec<ResolutionFallback> = Vec::new();
    let n_big = BigInt::from(n_ctx as i64);
    let r_big = BigInt::from(resolution as i64);

    let props: Vec<PropertyId> = target.properties().map(|(e, _)| e.clone()).collect();
    for e in &props {
        let owning = &owners[e];
        let shared = owning.len() > 1;
        let projector = target.property(e)?;
        let born_values: Vec<(f64, Rational)> = states
            .iter()
            .map(|s| {
                let b = born(target.state(s)?, projector)?;
                let exact = rational::from_f64_exact(b)
                    .ok_or_else(|| Error::NotADensityOperator("non-finite Born value".into()))?;
                Ok((b, exact))
            })
            .collect::<Result<_>>()?;

        let style = if shared { SchemeKind::Ontic } else { scheme.kind };
        match style {
            SchemeKind::Ontic => {
                // one prefix count per state, reused in every context
                let mut ext = Event::empty();
                for (si, (b_float, b)) in born_values.iter().enumerate() {
                    let k = round_half_up(&(b * r_rational.clone()));
                    let approximated = Rational::new(k.clone(), r_big.clone());
                    if approximated != *b {
                        fallbacks.push(ResolutionFallback {
                            state: states[si].clone(),
                            property: e.clone(),
                            born_value: *b_float,
                            bias: rational::to_f64(&(&approximated - b).abs()),
                            approximated,
                        });
                    }
                    let k = k.to_usize().unwrap_or(0);
                    ext = ext.union(&layout.block_prefix(si, k));
                }
                for &gi in owning {
                    for c in &group_contexts[gi] {
                        model.insert_extension(
                            PredicateId::Property(e.clone(), c.clone()),
                            ext.clone(),
                        )?;
                    }
                }
            }
            SchemeKind::DeterministicContext => {
                let gi = owning[0];
                for (j, c) in group_contexts[gi].iter().enumerate() {
                    // a whole state block joins iff born ≥ (2j−1)/(2N) for
                    // 1-based j; exact comparison, ties include the block
                    let threshold = Rational::new(
                        BigInt::from((2 * (j + 1) - 1) as i64),
                        BigInt::from(2) * n_big.clone(),
                    );
                    let mut ext = Event::empty();
                    for (si, (_, b)) in born_values.iter().enumerate() {
                        if *b >= threshold {
                            ext = ext.union(&layout.block(si));
                        }
                    }
                    model.insert_extension(PredicateId::Property(e.clone(), c.clone()), ext)?;
                }
            }
            SchemeKind::Hybrid => {
                let gi = owning[0];
                let mut context_exts = vec![Event::empty(); n_ctx];
                for (si, (b_float, b)) in born_values.iter().enumerate() {
                    let scaled = b * Rational::new(n_big.clone() * r_big.clone(), BigInt::one());
                    let total_big = round_half_up(&scaled);
                    let approximated =
                        Rational::new(total_big.clone(), n_big.clone() * r_big.clone());
                    if approximated != *b {
                        fallbacks.push(ResolutionFallback {
                            state: states[si].clone(),
                            property: e.clone(),
                            born_value: *b_float,
                            bias: rational::to_f64(&(&approximated - b).abs()),
                            approximated,
                        });
                    }
                    let total = total_big.to_usize().unwrap_or(0).min(n_ctx * resolution);
                    for (j, theta) in skewed_split(total, n_ctx, resolution).into_iter().enumerate()
                    {
                        context_exts[j] = context_exts[j].union(&layout.block_prefix(si, theta));
                    }
                }
                for (j, c) in group_contexts[gi].iter().enumerate() {
                    model.insert_extension(
                        PredicateId::Property(e.clone(), c.clone()),
                        context_exts[j].clone(),
                    )?;
                }
            }
        }
    }

    let structure = MuContextualStructure::new(model, xi)?;
    Ok(Embedding {
        structure,
        registry,
        target: target.clone(),
        scheme,
        groups: groups.to_vec(),
        fallbacks,
    })
}

/// Splits `total` cells over `n` contexts of capacity `cap` each, summing
/// to `total`: balanced floor/ceil shares, plus a one-unit skew between the
/// first and last context when the shares would otherwise all coincide
/// strictly inside (0, cap). The skew keeps per-context conditionals
/// distinct without moving the average.
fn skewed_split(total: usize, n: usize, cap: usize) -> Vec<usize> {
    let base = total / n;
    let rem = total % n;
    let mut shares: Vec<usize> = (0..n).map(|j| base + usize::from(j < rem)).collect();
    if rem == 0 && n >= 2 && base >= 1 && base < cap {
        shares[0] = base + 1;
        shares[n - 1] = base - 1;
    }
    shares
}

/// One (state, property) comparison row.
#[derive(Debug, Clone)]
pub struct EmbeddingRow {
    pub state: StateId,
    pub property: PropertyId,
    pub classical_mean: Rational,
    pub born_value: f64,
    /// Exact |classical − born| (the float is dyadic, so this is exact).
    pub deviation: Rational,
}

#[derive(Debug, Clone)]
pub struct EmbeddingReport {
    pub rows: Vec<EmbeddingRow>,
    pub max_deviation: f64,
    /// True when every deviation is the exact rational zero.
    pub exact: bool,
    /// Pairs compatible in the registry but not commuting in the target.
    pub compatibility_violations: Vec<(PropertyId, PropertyId)>,
    /// Multi-procedure properties whose per-procedure means differ, with
    /// the offending state and the deviation.
    pub independence_failures: Vec<(PropertyId, StateId, String)>,
    pub fallback_count: usize,
    pub tolerance: f64,
}

impl EmbeddingReport {
    pub fn pass(&self) -> bool {
        self.max_deviation <= self.tolerance
            && self.compatibility_violations.is_empty()
            && self.independence_failures.is_empty()
    }
}

/// Compares every classical mean against the target's Born value, checks
/// that registry compatibility implies commutation in the target, and that
/// properties owned by several procedures have procedure-independent means.
pub fn verify_embedding(e: &Embedding, tolerance: f64) -> Result<EmbeddingReport> {
    let mut rows = Vec::new();
    let mut max_deviation = Rational::zero();
    for (s, rho) in e.target.states() {
        for (prop, projector) in e.target.properties() {
            let classical = property_probability(&e.structure, &e.registry, s, prop)?;
            let born_value = born(rho, projector)?;
            let born_exact = rational::from_f64_exact(born_value)
                .ok_or_else(|| Error::NotADensityOperator("non-finite Born value".into()))?;
            let deviation = (&classical - &born_exact).abs();
            if deviation > max_deviation {
                max_deviation = deviation.clone();
            }
            rows.push(EmbeddingRow {
                state: s.clone(),
                property: prop.clone(),
                classical_mean: classical,
                born_value,
                deviation,
            });
        }
    }

    let mut compatibility_violations = Vec::new();
    let props: Vec<PropertyId> = e.target.properties().map(|(p, _)| p.clone()).collect();
    for (i, a) in props.iter().enumerate() {
        for b in props.iter().skip(i + 1) {
            if e.registry.compatible([a, b])?
                && !kappa_compatible(e.target.property(a)?, e.target.property(b)?)?
            {
                compatibility_violations.push((a.clone(), b.clone()));
            }
        }
    }

    let mut independence_failures = Vec::new();
    for prop in &props {
        let measuring = e.registry.procedures_measuring(prop);
        if measuring.len() < 2 {
            continue;
        }
        let c0 = ContextId::new(measuring[0].contexts().label(0));
        let a = Formula::property(prop.clone(), c0);
        for (s, _) in e.target.states() {
            let b = Formula::state(s.clone());
            let report =
                check_procedure_independence(&e.structure, &e.registry, &a, &b, Rational::zero())?;
            if !report.pass() {
                independence_failures.push((
                    prop.clone(),
                    s.clone(),
                    rational::format_rational(&report.max_deviation),
                ));
            }
        }
    }

    Ok(EmbeddingReport {
        exact: max_deviation.is_zero(),
        max_deviation: rational::to_f64(&max_deviation),
        rows,
        compatibility_violations,
        independence_failures,
        fallback_count: e.fallbacks.len(),
        tolerance,
    })
}

/// Per-context conditional probabilities `p(E@C | S)` over every context of
/// every procedure measuring the property.
pub fn per_context_conditionals(
    e: &Embedding,
    state: &StateId,
    prop: &PropertyId,
) -> Result<Vec<(ProcedureId, ContextId, Rational)>> {
    let b = Formula::state(state.clone());
    let mut out = Vec::new();
    for m in e.registry.procedures_measuring(prop) {
        for c in m.context_ids() {
            let a = Formula::property(prop.clone(), c.clone());
            out.push((m.id().clone(), c, e.structure.mu_conditional(&a, &b)?));
        }
    }
    Ok(out)
}

/// Evidence that both sources of randomness are active in a built model.
#[derive(Debug, Clone, Default)]
pub struct RandomnessEvidence {
    /// Some (state, property, context) whose per-context conditional lies
    /// strictly between 0 and 1: universe randomness is live there.
    pub interior_conditional: Option<(StateId, PropertyId, ContextId)>,
    /// Some (state, property) whose conditionals differ across two contexts
    /// of one procedure: context randomness is live there.
    pub context_variation: Option<(StateId, PropertyId, ContextId, ContextId)>,
}

impl RandomnessEvidence {
    pub fn both_sources_active(&self) -> bool {
        self.interior_conditional.is_some() && self.context_variation.is_some()
    }
}

pub fn randomness_evidence(e: &Embedding) -> Result<RandomnessEvidence> {
    let mut evidence = RandomnessEvidence::default();
    let states: Vec<StateId> = e.target.states().map(|(s, _)| s.clone()).collect();
    let props: Vec<PropertyId> = e.target.properties().map(|(p, _)| p.clone()).collect();
    for s in &states {
        let b = Formula::state(s.clone());
        for prop in &props {
            for m in e.registry.procedures_measuring(prop) {
                let mut first: Option<(ContextId, Rational)> = None;
                for c in m.context_ids() {
                    let a = Formula::property(prop.clone(), c.clone());
                    let p = e.structure.mu_conditional(&a, &b)?;
                    if evidence.interior_conditional.is_none()
                        && p.is_positive()
                        && p < Rational::one()
                    {
                        evidence.interior_conditional = Some((s.clone(), prop.clone(), c.clone()));
                    }
                    match &first {
                        None => first = Some((c, p)),
                        Some((c0, p0)) => {
                            if evidence.context_variation.is_none() && *p0 != p {
                                evidence.context_variation =
                                    Some((s.clone(), prop.clone(), c0.clone(), c));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(evidence)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum;
    use crate::rational::ratio;

    /// States z+, z-, x+; properties the z+ and x+ projectors in separate
    /// (non-commuting) groups.
    fn qubit_target() -> QuantumModel {
        let mut model = QuantumModel::new(2).unwrap();
        for s in ["z+", "z-", "x+"] {
            model
                .insert_state(s, quantum::preset_density(s, 2).unwrap())
                .unwrap();
        }
        for e in ["z+", "x+"] {
            model
                .insert_property(e, quantum::preset_projector(e, 2).unwrap())
                .unwrap();
        }
        model
    }

    fn two_groups() -> Vec<Vec<PropertyId>> {
        vec![vec!["z+".into()], vec!["x+".into()]]
    }

    #[test]
    fn ontic_embedding_reproduces_born_values_exactly() {
        let target = qubit_target();
        let scheme = EmbeddingScheme::new(SchemeKind::Ontic, 1, 4).unwrap();
        let e = build_embedding(&target, &two_groups(), scheme, None).unwrap();
        assert!(e.fallbacks().is_empty());
        let report = verify_embedding(&e, 0.0).unwrap();
        assert!(report.exact);
        assert!(report.pass());
        assert_eq!(report.rows.len(), 6);
    }

    #[test]
    fn ontic_single_pair_example_at_resolution_two() {
        let mut target = QuantumModel::new(2).unwrap();
        target
            .insert_state("z+", quantum::preset_density("z+", 2).unwrap())
            .unwrap();
        target
            .insert_property("x+", quantum::preset_projector("x+", 2).unwrap())
            .unwrap();
        let scheme = EmbeddingScheme::new(SchemeKind::Ontic, 1, 2).unwrap();
        let e = build_embedding(&target, &[vec!["x+".into()]], scheme, None).unwrap();
        let p =
            property_probability(e.structure(), e.registry(), &"z+".into(), &"x+".into()).unwrap();
        assert_eq!(p, ratio(1, 2));
    }

    #[test]
    fn ontic_conditionals_are_context_invariant() {
        let target = qubit_target();
        let scheme = EmbeddingScheme::new(SchemeKind::Ontic, 3, 4).unwrap();
        let e = build_embedding(&target, &two_groups(), scheme, None).unwrap();
        for s in ["z+", "z-", "x+"] {
            for prop in ["z+", "x+"] {
                let per = per_context_conditionals(&e, &s.into(), &prop.into()).unwrap();
                assert!(per.windows(2).all(|w| w[0].2 == w[1].2));
            }
        }
        // still exact under many contexts
        assert!(verify_embedding(&e, 0.0).unwrap().pass());
    }

    #[test]
    fn deterministic_context_conditionals_are_zero_or_one() {
        let target = qubit_target();
        let scheme = EmbeddingScheme::new(SchemeKind::DeterministicContext, 4, 1).unwrap();
        let e = build_embedding(&target, &two_groups(), scheme, None).unwrap();
        for s in ["z+", "z-", "x+"] {
            for prop in ["z+", "x+"] {
                for (_, _, p) in per_context_conditionals(&e, &s.into(), &prop.into()).unwrap() {
                    assert!(p.is_zero() || p.is_one(), "conditional {p} not 0/1");
                }
            }
        }
        // N = 4 and Born values in {0, 1/2, 1}: the average is exact
        let report = verify_embedding(&e, 0.0).unwrap();
        assert!(report.pass(), "max deviation {}", report.max_deviation);
    }

    #[test]
    fn deterministic_context_deviation_bound_is_met() {
        // born(z+, E) = 3/4 for a Bloch vector at cos θ = 1/2; N = 10 puts
        // the mean at 8/10, hitting the 1/(2N) bound exactly
        let mut target = QuantumModel::new(2).unwrap();
        target
            .insert_state("s", quantum::preset_density("z+", 2).unwrap())
            .unwrap();
        let c: f64 = 0.5;
        let sine = (1.0f64 - c * c).sqrt();
        target
            .insert_property(
                "E",
                quantum::preset_projector(&format!("bloch:{sine},0,{c}"), 2).unwrap(),
            )
            .unwrap();
        let scheme = EmbeddingScheme::new(SchemeKind::DeterministicContext, 10, 1).unwrap();
        let e = build_embedding(&target, &[vec!["E".into()]], scheme, None).unwrap();
        let mean =
            property_probability(e.structure(), e.registry(), &"s".into(), &"E".into()).unwrap();
        let born_exact = rational::from_f64_exact(
            born(
                target.state(&"s".into()).unwrap(),
                target.property(&"E".into()).unwrap(),
            )
            .unwrap(),
        )
        .unwrap();
        let deviation = (mean - born_exact).abs();
        assert!(deviation <= ratio(1, 20), "deviation {deviation}");
    }

    #[test]
    fn hybrid_activates_both_randomness_sources() {
        let target = qubit_target();
        let scheme = EmbeddingScheme::new(SchemeKind::Hybrid, 2, 4).unwrap();
        let e = build_embedding(&target, &two_groups(), scheme, None).unwrap();
        let evidence = randomness_evidence(&e).unwrap();
        assert!(evidence.both_sources_active(), "{evidence:?}");
        // N·R·born integral for born ∈ {0, 1/2, 1} at N=2, R=4
        assert!(e.fallbacks().is_empty());
        let report = verify_embedding(&e, 0.0).unwrap();
        assert!(report.pass(), "max deviation {}", report.max_deviation);
    }

    #[test]
    fn incompatible_groups_are_rejected() {
        let target = qubit_target();
        let err = build_embedding(
            &target,
            &[vec!["z+".into(), "x+".into()]],
            EmbeddingScheme::new(SchemeKind::Ontic, 1, 2).unwrap(),
            None,
        )
        .unwrap_err();
        assert!(matches!(err, Error::IncompatibleGroup { group: 0, .. }));
    }

    #[test]
    fn uncovered_properties_are_rejected() {
        let target = qubit_target();
        let err = build_embedding(
            &target,
            &[vec!["z+".into()]],
            EmbeddingScheme::new(SchemeKind::Ontic, 1, 2).unwrap(),
            None,
        )
        .unwrap_err();
        assert!(matches!(err, Error::NoProcedure(_)));
    }

    #[test]
    fn irrational_born_values_fall_back_with_bounded_bias() {
        let mut target = QuantumModel::new(2).unwrap();
        target
            .insert_state("z+", quantum::preset_density("z+", 2).unwrap())
            .unwrap();
        // born(z+, E) = (1 + cos 1)/2, not on any 1/R grid
        let c = 1.0f64.cos();
        let sine = (1.0 - c * c).sqrt();
        target
            .insert_property(
                "E",
                quantum::preset_projector(&format!("bloch:{sine},0,{c}"), 2).unwrap(),
            )
            .unwrap();
        let scheme = EmbeddingScheme::new(SchemeKind::Ontic, 1, 8).unwrap();
        let e = build_embedding(&target, &[vec!["E".into()]], scheme, None).unwrap();
        assert_eq!(e.fallbacks().len(), 1);
        let fb = &e.fallbacks()[0];
        assert!(fb.bias <= 1.0 / 16.0 + 1e-12, "bias {}", fb.bias);
        let report = verify_embedding(&e, 1.0 / 16.0 + 1e-12).unwrap();
        assert!(report.pass());
        assert!(!report.exact);
    }

    #[test]
    fn shared_properties_have_procedure_independent_means() {
        // identity commutes with everything, so it may sit in both groups
        let mut target = qubit_target();
        target
            .insert_property("I", quantum::preset_projector("identity", 2).unwrap())
            .unwrap();
        let groups = vec![
            vec![PropertyId::new("z+"), PropertyId::new("I")],
            vec![PropertyId::new("x+"), PropertyId::new("I")],
        ];
        let scheme = EmbeddingScheme::new(SchemeKind::DeterministicContext, 5, 2).unwrap();
        let e = build_embedding(&target, &groups, scheme, None).unwrap();
        // N = 5 is odd, so born = 1/2 averages to 3/5: inside the 1/(2N) bound
        let report = verify_embedding(&e, 1.0 / 10.0).unwrap();
        assert!(report.independence_failures.is_empty(), "{report:?}");
        assert!(report.pass(), "max deviation {}", report.max_deviation);
        // the shared property keeps exact (ontic) rows even in this scheme
        assert!(report
            .rows
            .iter()
            .filter(|r| r.property.as_str() == "I")
            .all(|r| r.deviation.is_zero()));
    }

    #[test]
    fn custom_state_weights_must_be_positive_and_normalized() {
        let target = qubit_target();
        let scheme = EmbeddingScheme::new(SchemeKind::Ontic, 1, 4).unwrap();
        let mut weights = BTreeMap::new();
        weights.insert(StateId::new("z+"), ratio(1, 2));
        weights.insert(StateId::new("z-"), ratio(1, 4));
        weights.insert(StateId::new("x+"), ratio(1, 4));
        let e = build_embedding(&target, &two_groups(), scheme, Some(&weights)).unwrap();
        assert!(verify_embedding(&e, 0.0).unwrap().pass());

        weights.insert(StateId::new("x+"), ratio(1, 2));
        assert!(build_embedding(&target, &two_groups(), scheme, Some(&weights)).is_err());
        weights.insert(StateId::new("x+"), ratio(0, 1));
        weights.insert(StateId::new("z-"), ratio(1, 2));
        assert!(build_embedding(&target, &two_groups(), scheme, Some(&weights)).is_err());
    }

    #[test]
    fn corrupted_measure_is_named_in_the_report() {
        let target = qubit_target();
        let scheme = EmbeddingScheme::new(SchemeKind::Ontic, 1, 4).unwrap();
        let e = build_embedding(&target, &two_groups(), scheme, None).unwrap();
        // rebuild with a skewed (still normalized) measure: shift weight
        // from the last point to the first
        let old = e.structure().xi();
        let n = old.len();
        let mut entries: Vec<(String, Rational)> = (0..n)
            .map(|i| (old.label(i).to_string(), old.weight(i).clone()))
            .collect();
        let delta = ratio(1, 24);
        entries[0].1 = &entries[0].1 + &delta;
        entries[n - 1].1 = &entries[n - 1].1 - &delta;
        let xi = FiniteProbabilitySpace::new(entries).unwrap();
        let skewed = Embedding {
            structure: MuContextualStructure::new(e.structure().model().clone(), xi).unwrap(),
            registry: e.registry().clone(),
            target: e.target().clone(),
            scheme: *e.scheme(),
            groups: e.groups().to_vec(),
            fallbacks: Vec::new(),
        };
        let report = verify_embedding(&skewed, 0.0).unwrap();
        assert!(!report.pass());
        assert!(report.rows.iter().any(|r| !r.deviation.is_zero()));
    }
}
