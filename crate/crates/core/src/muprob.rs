//! Conditional probabilities of formulas under a measure on the universe.
//!
//! Pairs a [`Model`] with an exact probability measure over its universe and
//! evaluates conditional probabilities of formulas through their extensions.
//! Conditioning is only defined on formulas with nonzero measure; asking for
//! anything else is a hard error, never 0/0 = 0.

use crate::error::{Error, Result};
use crate::lang::{Formula, Model, PredicateId};
use crate::prob::FiniteProbabilitySpace;
use crate::rational::Rational;
use num_traits::{One, Zero};
use rand::Rng;

#[derive(Debug, Clone)]
pub struct MuContextualStructure {
    model: Model,
    xi: FiniteProbabilitySpace,
}

impl MuContextualStructure {
    /// The measure's points must be exactly the model universe, in order.
    pub fn new(model: Model, xi: FiniteProbabilitySpace) -> Result<Self> {
        if model.universe() != xi.labels() {
            return Err(Error::UniverseMismatch(format!(
                "universe has {} points, measure has {}",
                model.universe_len(),
                xi.len()
            )));
        }
        Ok(MuContextualStructure { model, xi })
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn xi(&self) -> &FiniteProbabilitySpace {
        &self.xi
    }

    /// Whether `f` has nonzero measure, i.e. is admissible as a
    /// conditioning formula. Membership is computed on demand because the
    /// measure may be swapped between experiments.
    pub fn is_positive(&self, f: &Formula) -> Result<bool> {
        Ok(!self.xi.measure(&self.model.extension(f)?)?.is_zero())
    }

    /// Conditional probability of `a` given `b`, exact.
    pub fn mu_conditional(&self, a: &Formula, b: &Formula) -> Result<Rational> {
        let ext_b = self.model.extension(b)?;
        let pb = self.xi.measure(&ext_b)?;
        if pb.is_zero() {
            return Err(Error::ZeroConditioningEvent {
                what: b.to_string(),
            });
        }
        let ext_a = self.model.extension(a)?;
        Ok(self.xi.measure(&ext_a.intersection(&ext_b))? / pb)
    }

    /// Absolute probability: conditioning on the full universe.
    pub fn mu_absolute(&self, a: &Formula) -> Result<Rational> {
        self.xi.measure(&self.model.extension(a)?)
    }

    /// Verifies that `α ↦ p(α | b)` behaves as a probability measure:
    /// certainty on full-extension formulas, additivity on disjoint pairs,
    /// and inclusion–exclusion on arbitrary pairs. Formulas are sampled
    /// from the registered predicates; all comparisons are exact.
    pub fn check_conditional_measure(
        &self,
        b: &Formula,
        trials: usize,
        rng: &mut impl Rng,
    ) -> Result<ConditionalMeasureReport> {
        if !self.is_positive(b)? {
            return Err(Error::ZeroConditioningEvent {
                what: b.to_string(),
            });
        }
        let preds: Vec<PredicateId> = self.model.predicates().map(|(p, _)| p.clone()).collect();
        let mut report = ConditionalMeasureReport {
            trials,
            ..ConditionalMeasureReport::default()
        };
        if preds.is_empty() {
            return Ok(report);
        }
        for _ in 0..trials {
            let alpha = random_formula(&preds, 3, rng);

            // certainty: any formula with full extension gets probability 1
            let tautology = alpha.clone().or(alpha.clone().not());
            let p = self.mu_conditional(&tautology, b)?;
            if !p.is_one() {
                report.certainty_failures.push(CertaintyFailure {
                    formula: tautology.to_string(),
                    value: p,
                });
            }

            // additivity on a disjoint pair: α∧γ and α∧¬γ never overlap
            let gamma = random_formula(&preds, 3, rng);
            let a1 = alpha.clone().and(gamma.clone());
            let a2 = alpha.clone().and(gamma.clone().not());
            let lhs = self.mu_conditional(&a1.clone().or(a2.clone()), b)?;
            let rhs = self.mu_conditional(&a1, b)? + self.mu_conditional(&a2, b)?;
            if lhs != rhs {
                report.additivity_failures.push(AdditivityFailure {
                    left: a1.to_string(),
                    right: a2.to_string(),
                    union_value: lhs,
                    summed_value: rhs,
                });
            }

            // inclusion–exclusion on an arbitrary (possibly overlapping) pair
            let union = self.mu_conditional(&alpha.clone().or(gamma.clone()), b)?;
            let by_parts = self.mu_conditional(&alpha, b)? + self.mu_conditional(&gamma, b)?
                - self.mu_conditional(&alpha.clone().and(gamma.clone()), b)?;
            if union != by_parts {
                report.inclusion_exclusion_failures.push(AdditivityFailure {
                    left: alpha.to_string(),
                    right: gamma.to_string(),
                    union_value: union,
                    summed_value: by_parts,
                });
            }
        }
        Ok(report)
    }
}

/// Uniformly random formula over the given atoms, up to the given depth.
pub fn random_formula(preds: &[PredicateId], depth: usize, rng: &mut impl Rng) -> Formula {
    if depth == 0 || rng.random_range(0..4usize) == 0 {
        let i = rng.random_range(0..preds.len());
        return Formula::Atom(preds[i].clone());
    }
    match rng.random_range(0..3usize) {
        0 => random_formula(preds, depth - 1, rng).not(),
        1 => random_formula(preds, depth - 1, rng).and(random_formula(preds, depth - 1, rng)),
        _ => random_formula(preds, depth - 1, rng).or(random_formula(preds, depth - 1, rng)),
    }
}

#[derive(Debug, Clone)]
pub struct CertaintyFailure {
    pub formula: String,
    pub value: Rational,
}

#[derive(Debug, Clone)]
pub struct AdditivityFailure {
    pub left: String,
    pub right: String,
    pub union_value: Rational,
    pub summed_value: Rational,
}

#[derive(Debug, Clone, Default)]
pub struct ConditionalMeasureReport {
    pub trials: usize,
    pub certainty_failures: Vec<CertaintyFailure>,
    pub additivity_failures: Vec<AdditivityFailure>,
    pub inclusion_exclusion_failures: Vec<AdditivityFailure>,
}

impl ConditionalMeasureReport {
    pub fn pass(&self) -> bool {
        self.certainty_failures.is_empty()
            && self.additivity_failures.is_empty()
            && self.inclusion_exclusion_failures.is_empty()
    }
}
