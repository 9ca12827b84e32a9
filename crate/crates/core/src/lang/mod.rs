//! A monadic predicate language over states and context-indexed properties.
//!
//! Atoms are either a state predicate `S:<name>(x)` or a property-in-context
//! predicate `P:<name>@<ctx>(x)`; formulas combine atoms with `!`, `&`, `|`.
//! A [`Model`] assigns each registered predicate an extension (a subset of a
//! finite universe), which induces extensions, truth values, and a logical
//! preorder for all formulas.
//!
//! Grammar (EBNF, also documented in `docs/formula-grammar.md`):
//!
//! ```text
//! formula  = or ;
//! or       = and { "|" and } ;            (* left-associative *)
//! and      = unary { "&" unary } ;        (* left-associative *)
//! unary    = "!" unary | primary ;
//! primary  = atom | "(" formula ")" ;
//! atom     = "S" ":" name "(" "x" ")"
//!          | "P" ":" name "@" name "(" "x" ")" ;
//! name     = { letter | digit | "_" | "+" | "-" | "." }- ;
//! ```

mod parser;

pub use parser::parse;

use crate::error::{Error, Result};
use crate::prob::{Event, MAX_POINTS};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

macro_rules! identifier {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(String);

        impl $name {
            pub fn new(s: impl Into<String>) -> Self {
                $name(s.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                $name(s.to_string())
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                $name(s)
            }
        }
    };
}

identifier!(
    /// Name of a state (an element of the state namespace).
    StateId
);
identifier!(
    /// Name of a property, without any context index.
    PropertyId
);
identifier!(
    /// Name of a microscopic context.
    ContextId
);
identifier!(
    /// Name of a measurement procedure.
    ProcedureId
);

/// A monadic predicate: a state, or a property paired with a context index.
///
/// The three identifier namespaces are kept disjoint structurally: a state
/// name and a property name never collide because they live in different
/// variants.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PredicateId {
    State(StateId),
    Property(PropertyId, ContextId),
}

impl PredicateId {
    pub fn state(name: impl Into<StateId>) -> Self {
        PredicateId::State(name.into())
    }

    pub fn property(name: impl Into<PropertyId>, ctx: impl Into<ContextId>) -> Self {
        PredicateId::Property(name.into(), ctx.into())
    }

    /// Parses the key form used in scenario files: `S:<name>` or `P:<name>@<ctx>`.
    pub fn parse_key(text: &str) -> Result<Self> {
        parser::parse_predicate_key(text)
    }
}

impl fmt::Display for PredicateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PredicateId::State(s) => write!(f, "S:{s}"),
            PredicateId::Property(p, c) => write!(f, "P:{p}@{c}"),
        }
    }
}

/// A well-formed formula: atoms closed under negation, conjunction and
/// disjunction. The language has a single individual variable, so no binder
/// is stored.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Atom(PredicateId),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(pred: PredicateId) -> Self {
        Formula::Atom(pred)
    }

    pub fn state(name: impl Into<StateId>) -> Self {
        Formula::Atom(PredicateId::state(name))
    }

    pub fn property(name: impl Into<PropertyId>, ctx: impl Into<ContextId>) -> Self {
        Formula::Atom(PredicateId::property(name, ctx))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        Formula::Not(Box::new(self))
    }

    pub fn and(self, other: Formula) -> Self {
        Formula::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Formula) -> Self {
        Formula::Or(Box::new(self), Box::new(other))
    }

    /// All atoms, in syntactic order.
    pub fn atoms(&self) -> Vec<&PredicateId> {
        let mut out = Vec::new();
        self.walk(&mut |p| out.push(p));
        out
    }

    fn walk<'a>(&'a self, visit: &mut impl FnMut(&'a PredicateId)) {
        match self {
            Formula::Atom(p) => visit(p),
            Formula::Not(f) => f.walk(visit),
            Formula::And(l, r) | Formula::Or(l, r) => {
                l.walk(visit);
                r.walk(visit);
            }
        }
    }

    /// Distinct properties occurring in the formula, with their context index.
    pub fn property_occurrences(&self) -> BTreeSet<(PropertyId, ContextId)> {
        self.atoms()
            .into_iter()
            .filter_map(|p| match p {
                PredicateId::Property(e, c) => Some((e.clone(), c.clone())),
                PredicateId::State(_) => None,
            })
            .collect()
    }

    /// Distinct context indices carried by property atoms.
    pub fn context_ids(&self) -> BTreeSet<ContextId> {
        self.property_occurrences()
            .into_iter()
            .map(|(_, c)| c)
            .collect()
    }

    /// Distinct property names, without context indices.
    pub fn property_ids(&self) -> BTreeSet<PropertyId> {
        self.property_occurrences()
            .into_iter()
            .map(|(e, _)| e)
            .collect()
    }

    /// Replaces the context index `from` by `to` in every property atom.
    /// Structure is otherwise unchanged.
    pub fn reindex(&self, from: &ContextId, to: &ContextId) -> Formula {
        match self {
            Formula::Atom(PredicateId::Property(e, c)) if c == from => {
                Formula::property(e.clone(), to.clone())
            }
            Formula::Atom(_) => self.clone(),
            Formula::Not(f) => f.reindex(from, to).not(),
            Formula::And(l, r) => l.reindex(from, to).and(r.reindex(from, to)),
            Formula::Or(l, r) => l.reindex(from, to).or(r.reindex(from, to)),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Atom(_) | Formula::Not(_) => 3,
            Formula::And(_, _) => 2,
            Formula::Or(_, _) => 1,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let prec = self.precedence();
        let parens = prec < min;
        if parens {
            f.write_str("(")?;
        }
        match self {
            Formula::Atom(PredicateId::State(s)) => write!(f, "S:{s}(x)")?,
            Formula::Atom(PredicateId::Property(e, c)) => write!(f, "P:{e}@{c}(x)")?,
            Formula::Not(inner) => {
                f.write_str("!")?;
                inner.fmt_prec(f, 3)?;
            }
            Formula::And(l, r) => {
                l.fmt_prec(f, 2)?;
                f.write_str(" & ")?;
                // left-associative: a nested And on the right needs parens
                r.fmt_prec(f, 3)?;
            }
            Formula::Or(l, r) => {
                l.fmt_prec(f, 1)?;
                f.write_str(" | ")?;
                r.fmt_prec(f, 2)?;
            }
        }
        if parens {
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// Canonical form: minimal parentheses under the grammar's precedence.
/// `parse(f.to_string())` returns `f` unchanged.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

impl std::str::FromStr for Formula {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse(s)
    }
}

/// An interpretation of the single variable: one point of the universe.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Interpretation {
    target: usize,
}

impl Interpretation {
    pub fn at_index(model: &Model, target: usize) -> Result<Self> {
        if target >= model.universe_len() {
            return Err(Error::MemberOutOfSpace {
                index: target,
                space_len: model.universe_len(),
            });
        }
        Ok(Interpretation { target })
    }

    pub fn at_point(model: &Model, label: &str) -> Result<Self> {
        let target = model
            .point_index(label)
            .ok_or_else(|| Error::UniverseMismatch(format!("no point labeled {label:?}")))?;
        Ok(Interpretation { target })
    }

    pub fn target(&self) -> usize {
        self.target
    }
}

/// A finite universe together with an extension for each registered
/// predicate. Registration is closed-world: evaluating an unregistered atom
/// is an error, never an implicit empty extension.
#[derive(Debug, Clone)]
pub struct Model {
    universe: Vec<String>,
    index: BTreeMap<String, usize>,
    ext: BTreeMap<PredicateId, Event>,
}

impl Model {
    pub fn new(universe: Vec<String>) -> Result<Self> {
        if universe.len() > MAX_POINTS {
            return Err(Error::SpaceTooLarge {
                len: universe.len(),
                max: MAX_POINTS,
            });
        }
        let mut index = BTreeMap::new();
        for (i, label) in universe.iter().enumerate() {
            if index.insert(label.clone(), i).is_some() {
                return Err(Error::UniverseMismatch(format!(
                    "duplicate universe point {label:?}"
                )));
            }
        }
        Ok(Model {
            universe,
            index,
            ext: BTreeMap::new(),
        })
    }

    pub fn universe(&self) -> &[String] {
        &self.universe
    }

    pub fn universe_len(&self) -> usize {
        self.universe.len()
    }

    pub fn point_index(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    /// Registers a predicate. The extension must lie inside the universe
    /// and the predicate must be new.
    pub fn insert_extension(&mut self, pred: PredicateId, extension: Event) -> Result<()> {
        if let Some(bad) = extension.members().find(|&i| i >= self.universe.len()) {
            return Err(Error::ExtensionOutsideUniverse { pred, index: bad });
        }
        if self.ext.contains_key(&pred) {
            return Err(Error::DuplicatePredicate(pred));
        }
        self.ext.insert(pred, extension);
        Ok(())
    }

    pub fn predicates(&self) -> impl Iterator<Item = (&PredicateId, &Event)> {
        self.ext.iter()
    }

    pub fn predicate_extension(&self, pred: &PredicateId) -> Result<&Event> {
        self.ext
            .get(pred)
            .ok_or_else(|| Error::UnknownPredicate(pred.clone()))
    }

    /// Pairs of distinct predicates sharing one extension. The formal
    /// semantics asks for an injective extension map; generated models
    /// may violate it, so this is a diagnostic rather than a construction
    /// error.
    pub fn injectivity_violations(&self) -> Vec<(PredicateId, PredicateId)> {
        let mut by_ext: BTreeMap<&Event, Vec<&PredicateId>> = BTreeMap::new();
        for (p, e) in &self.ext {
            by_ext.entry(e).or_default().push(p);
        }
        let mut out = Vec::new();
        for preds in by_ext.values() {
            for pair in preds.windows(2) {
                out.push((pair[0].clone(), pair[1].clone()));
            }
        }
        out
    }

    /// Recursive extension semantics: complement, intersection, union.
    pub fn extension(&self, f: &Formula) -> Result<Event> {
        match f {
            Formula::Atom(p) => self.predicate_extension(p).cloned(),
            Formula::Not(inner) => Ok(self.extension(inner)?.complement(self.universe.len())),
            Formula::And(l, r) => Ok(self.extension(l)?.intersection(&self.extension(r)?)),
            Formula::Or(l, r) => Ok(self.extension(l)?.union(&self.extension(r)?)),
        }
    }

    /// Truth under an interpretation: membership of the target point in the
    /// formula's extension.
    pub fn truth(&self, sigma: Interpretation, f: &Formula) -> Result<bool> {
        Ok(self.extension(f)?.contains(sigma.target))
    }

    /// Logical preorder: `a < b` iff every interpretation making `a` true
    /// makes `b` true. On a finite universe with all point valuations this
    /// is extension inclusion.
    pub fn logical_leq(&self, a: &Formula, b: &Formula) -> Result<bool> {
        Ok(self.extension(a)?.is_subset(&self.extension(b)?))
    }
}

/// The quotient of a formula list by logical equivalence, with the induced
/// partial order on classes.
#[derive(Debug, Clone)]
pub struct LindenbaumQuotient {
    /// Class index of each input formula.
    pub class_of: Vec<usize>,
    /// Extension shared by each class.
    pub class_extensions: Vec<Event>,
    /// Index (into the input list) of one representative per class.
    pub class_representatives: Vec<usize>,
    universe_len: usize,
}

impl LindenbaumQuotient {
    pub fn class_count(&self) -> usize {
        self.class_extensions.len()
    }

    /// Induced order on classes: extension inclusion.
    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.class_extensions[i].is_subset(&self.class_extensions[j])
    }

    /// Verifies, order-theoretically, that the classes form a Boolean
    /// lattice: every pair has a meet and join, bounds exist, complements
    /// exist and are unique, and meet distributes over join. The check uses
    /// only the induced order, not set identities, so it independently
    /// confirms the lattice structure.
    pub fn check_boolean_lattice(&self) -> std::result::Result<(), String> {
        let n = self.class_count();
        if n == 0 {
            return Err("no classes".into());
        }
        let leq: Vec<Vec<bool>> = (0..n)
            .map(|i| (0..n).map(|j| self.leq(i, j)).collect())
            .collect();

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
                meet[i][j] = glb(i, j).ok_or_else(|| format!("classes {i},{j} have no meet"))?;
                join[i][j] = lub(i, j).ok_or_else(|| format!("classes {i},{j} have no join"))?;
            }
        }

        let bottom = (0..n)
            .find(|&b| (0..n).all(|k| leq[b][k]))
            .ok_or("no least class")?;
        let top = (0..n)
            .find(|&t| (0..n).all(|k| leq[k][t]))
            .ok_or("no greatest class")?;

        for i in 0..n {
            let complements: Vec<usize> = (0..n)
                .filter(|&j| meet[i][j] == bottom && join[i][j] == top)
                .collect();
            if complements.len() != 1 {
                return Err(format!(
                    "class {i} has {} complements, expected exactly 1",
                    complements.len()
                ));
            }
        }

        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if meet[i][join[j][k]] != join[meet[i][j]][meet[i][k]] {
                        return Err(format!("distributivity fails at classes ({i},{j},{k})"));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn universe_len(&self) -> usize {
        self.universe_len
    }
}

/// Groups formulas by extension equality and returns the quotient with its
/// induced order. On a finite universe with all point valuations, extension
/// equality coincides with logical equivalence.
pub fn lindenbaum_classes(model: &Model, formulas: &[Formula]) -> Result<LindenbaumQuotient> {
    let mut class_of = Vec::with_capacity(formulas.len());
    let mut class_extensions: Vec<Event> = Vec::new();
    let mut class_representatives = Vec::new();
    let mut lookup: BTreeMap<Event, usize> = BTreeMap::new();
    for (i, f) in formulas.iter().enumerate() {
        let ext = model.extension(f)?;
        let class = match lookup.get(&ext) {
            Some(&c) => c,
            None => {
                let c = class_extensions.len();
                lookup.insert(ext.clone(), c);
                class_extensions.push(ext);
                class_representatives.push(i);
                c
            }
        };
        class_of.push(class);
    }
    Ok(LindenbaumQuotient {
        class_of,
        class_extensions,
        class_representatives,
        universe_len: model.universe_len(),
    })
}
