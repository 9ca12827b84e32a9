//! Finite classical probability spaces with exact rational weights.
//!
//! The event algebra is the full power set of the sample space, so every
//! subset is measurable and all measure arithmetic is exact. Spaces serve
//! both as the measure over a model universe and as the weighted context
//! set attached to a measurement procedure.

use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use num_traits::{One, Signed, Zero};
use rand::Rng;
use std::collections::BTreeMap;
use std::collections::BTreeSet;

/// Hard cap on sample-space size.
pub const MAX_POINTS: usize = 1 << 20;

/// A measurable event: a set of point indices into some sample space.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Event {
    members: BTreeSet<usize>,
}

impl Event {
    pub fn new(members: impl IntoIterator<Item = usize>) -> Self {
        Event {
            members: members.into_iter().collect(),
        }
    }

    pub fn empty() -> Self {
        Event::default()
    }

    /// The full event over a space of `n` points.
    pub fn full(n: usize) -> Self {
        Event::new(0..n)
    }

    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, point: usize) -> bool {
        self.members.contains(&point)
    }

    pub fn union(&self, other: &Event) -> Event {
        Event {
            members: self.members.union(&other.members).copied().collect(),
        }
    }

    pub fn intersection(&self, other: &Event) -> Event {
        Event {
            members: self.members.intersection(&other.members).copied().collect(),
        }
    }

    pub fn complement(&self, space_len: usize) -> Event {
        Event {
            members: (0..space_len).filter(|i| !self.members.contains(i)).collect(),
        }
    }

    pub fn is_subset(&self, other: &Event) -> bool {
        self.members.is_subset(&other.members)
    }

    pub fn is_disjoint(&self, other: &Event) -> bool {
        self.members.is_disjoint(&other.members)
    }
}

impl FromIterator<usize> for Event {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        Event::new(iter)
    }
}

/// A finite sample space with one exact rational weight per point.
///
/// Construction via [`FiniteProbabilitySpace::new`] enforces normalization;
/// [`FiniteProbabilitySpace::new_unchecked`] skips it so that diagnostic
/// checks have malformed inputs to detect.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteProbabilitySpace {
    points: Vec<String>,
    weights: Vec<Rational>,
    index: BTreeMap<String, usize>,
}

impl FiniteProbabilitySpace {
    pub fn new(entries: Vec<(String, Rational)>) -> Result<Self> {
        let space = Self::new_unchecked(entries)?;
        for (i, w) in space.weights.iter().enumerate() {
            if w.is_negative() {
                return Err(Error::InvalidWeights(format!(
                    "weight of point {:?} is negative",
                    space.points[i]
                )));
            }
        }
        let total: Rational = space.weights.iter().sum();
        if !total.is_one() {
            return Err(Error::InvalidWeights(format!(
                "weights sum to {}, not 1",
                rational::format_rational(&total)
            )));
        }
        Ok(space)
    }

    /// Builds the space without normalization or sign checks. Label
    /// uniqueness and the size cap are still enforced.
    pub fn new_unchecked(entries: Vec<(String, Rational)>) -> Result<Self> {
        if entries.len() > MAX_POINTS {
            return Err(Error::SpaceTooLarge {
                len: entries.len(),
                max: MAX_POINTS,
            });
        }
        let mut points = Vec::with_capacity(entries.len());
        let mut weights = Vec::with_capacity(entries.len());
        let mut index = BTreeMap::new();
        for (i, (label, w)) in entries.into_iter().enumerate() {
            if index.insert(label.clone(), i).is_some() {
                return Err(Error::InvalidWeights(format!(
                    "duplicate point label {label:?}"
                )));
            }
            points.push(label);
            weights.push(w);
        }
        Ok(FiniteProbabilitySpace {
            points,
            weights,
            index,
        })
    }

    /// Uniform distribution over the given labels.
    pub fn uniform(labels: Vec<String>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidWeights("empty sample space".into()));
        }
        let n = labels.len();
        let w = Rational::new(1.into(), (n as i64).into());
        Self::new(labels.into_iter().map(|l| (l, w.clone())).collect())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.points
    }

    pub fn label(&self, i: usize) -> &str {
        &self.points[i]
    }

    pub fn point_index(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn weight(&self, i: usize) -> &Rational {
        &self.weights[i]
    }

    pub fn full_event(&self) -> Event {
        Event::full(self.len())
    }

    /// Exact measure of an event: the sum of its point weights.
    pub fn measure(&self, e: &Event) -> Result<Rational> {
        let mut total = Rational::zero();
        for i in e.members() {
            if i >= self.len() {
                return Err(Error::MemberOutOfSpace {
                    index: i,
                    space_len: self.len(),
                });
            }
            total += &self.weights[i];
        }
        Ok(total)
    }

    /// Exact conditional measure of `a` given `b`.
    pub fn conditional(&self, a: &Event, b: &Event) -> Result<Rational> {
        let pb = self.measure(b)?;
        if pb.is_zero() {
            return Err(Error::ZeroConditioningEvent {
                what: format!("event with {} points", b.len()),
            });
        }
        let pab = self.measure(&a.intersection(b))?;
        Ok(pab / pb)
    }

    /// Verifies normalization and finite additivity over randomly sampled
    /// disjoint event families. All comparisons are exact.
    pub fn check_kolmogorov(&self, trials: usize, rng: &mut impl Rng) -> KolmogorovReport {
        let mut report = KolmogorovReport {
            trials,
            ..KolmogorovReport::default()
        };
        for (i, w) in self.weights.iter().enumerate() {
            if w.is_negative() {
                report.negative_points.push(self.points[i].clone());
            }
        }
        let total: Rational = self.weights.iter().sum();
        if !total.is_one() {
            report.normalization_deficit = Some(Rational::one() - &total);
        }
        for _ in 0..trials {
            let family = sample_disjoint_family(self.len(), rng);
            let union = family
                .iter()
                .fold(Event::empty(), |acc, e| acc.union(e));
            let sum: Rational = family
                .iter()
                .map(|e| self.measure(e).expect("members in range"))
                .sum();
            let whole = self.measure(&union).expect("members in range");
            if sum != whole {
                report.additivity_violations.push(AdditivityViolation {
                    family_sizes: family.iter().map(Event::len).collect(),
                    union_measure: whole,
                    summed_measure: sum,
                });
            }
        }
        report
    }
}

/// Splits a random subset of `0..n` into pairwise disjoint events.
fn sample_disjoint_family(n: usize, rng: &mut impl Rng) -> Vec<Event> {
    if n == 0 {
        return vec![Event::empty()];
    }
    let parts = rng.random_range(1..=4usize);
    let mut family = vec![BTreeSet::new(); parts];
    for point in 0..n {
        // slot == parts drops the point, so the family need not cover Ω
        let slot = rng.random_range(0..=parts);
        if slot < parts {
            family[slot].insert(point);
        }
    }
    family.into_iter().map(Event::new).collect()
}

/// One exact additivity failure: `μ(∪Δᵢ) ≠ Σ μ(Δᵢ)`.
#[derive(Debug, Clone)]
pub struct AdditivityViolation {
    pub family_sizes: Vec<usize>,
    pub union_measure: Rational,
    pub summed_measure: Rational,
}

#[derive(Debug, Clone, Default)]
pub struct KolmogorovReport {
    pub trials: usize,
    /// `1 − Σ weights` when nonzero.
    pub normalization_deficit: Option<Rational>,
    pub negative_points: Vec<String>,
    pub additivity_violations: Vec<AdditivityViolation>,
}

impl KolmogorovReport {
    pub fn pass(&self) -> bool {
        self.normalization_deficit.is_none()
            && self.negative_points.is_empty()
            && self.additivity_violations.is_empty()
    }
}
