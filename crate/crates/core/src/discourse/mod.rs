//! SDRT-style discourse structures: elementary and complex units, relation
//! instances, histories and underspecified forms.
//!
//! Commitments are finite sets of literals. A relation contributes the atom
//! `rel(name,source,target)` plus any content atoms it carries; its veridicality
//! table decides whether the content of its arguments stays committed.

mod completion;
mod dot;
mod validate;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::Player;

pub use completion::{completions, Completion, CompletionReport, DroppedCombination};
pub use dot::to_dot;
pub use validate::{validate_history, CoherenceReport, Violation};

pub type UnitId = String;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiscourseError {
    #[error("incoherent input: {0}")]
    Incoherent(String),
    #[error("unknown relation name `{0}`")]
    UnknownRelation(String),
    #[error("invalid underspecified form `{ulf}`: {reason}")]
    InvalidForm { ulf: String, reason: String },
}

/// A possibly negated atom, written `a` or `!a`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub atom: String,
    pub negated: bool,
}

impl Literal {
    pub fn pos(atom: impl Into<String>) -> Self {
        Literal { atom: atom.into(), negated: false }
    }

    pub fn neg(atom: impl Into<String>) -> Self {
        Literal { atom: atom.into(), negated: true }
    }

    pub fn complement(&self) -> Literal {
        Literal { atom: self.atom.clone(), negated: !self.negated }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "!{}", self.atom)
        } else {
            f.write_str(&self.atom)
        }
    }
}

impl FromStr for Literal {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (negated, atom) = match s.strip_prefix('!') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        if atom.is_empty() || atom.starts_with('!') {
            return Err(format!("malformed literal {s:?}"));
        }
        Ok(Literal { atom: atom.to_string(), negated })
    }
}

impl Serialize for Literal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Literal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Elementary discourse unit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edu {
    pub id: UnitId,
    pub speaker: Player,
    #[serde(default)]
    pub label: String,
    #[serde(default)]
    pub commitments: BTreeSet<Literal>,
}

impl Edu {
    pub fn new(id: impl Into<String>, speaker: Player, commitments: &[Literal]) -> Self {
        Edu {
            id: id.into(),
            speaker,
            label: String::new(),
            commitments: commitments.iter().cloned().collect(),
        }
    }
}

/// Complex discourse unit grouping other units into one relational argument.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cdu {
    pub id: UnitId,
    pub members: Vec<UnitId>,
}

impl Cdu {
    pub fn new(id: impl Into<String>, members: &[&str]) -> Self {
        Cdu { id: id.into(), members: members.iter().map(|m| m.to_string()).collect() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Unit {
    Edu(Edu),
    Cdu(Cdu),
}

impl Unit {
    pub fn id(&self) -> &str {
        match self {
            Unit::Edu(e) => &e.id,
            Unit::Cdu(c) => &c.id,
        }
    }
}

impl From<Edu> for Unit {
    fn from(e: Edu) -> Self {
        Unit::Edu(e)
    }
}

impl From<Cdu> for Unit {
    fn from(c: Cdu) -> Self {
        Unit::Cdu(c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationName {
    Background,
    Iqap,
    Qap,
    Correction,
    Explanation,
    ConfirmationQuestion,
    QuestionFollowup,
    Result,
    Reiteration,
    Elaboration,
    Contrast,
}

/// Whether a relation commits its speaker to the content of each argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Veridicality {
    pub source: bool,
    pub target: bool,
}

impl RelationName {
    pub const ALL: [RelationName; 11] = [
        RelationName::Background,
        RelationName::Iqap,
        RelationName::Qap,
        RelationName::Correction,
        RelationName::Explanation,
        RelationName::ConfirmationQuestion,
        RelationName::QuestionFollowup,
        RelationName::Result,
        RelationName::Reiteration,
        RelationName::Elaboration,
        RelationName::Contrast,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RelationName::Background => "background",
            RelationName::Iqap => "iqap",
            RelationName::Qap => "qap",
            RelationName::Correction => "correction",
            RelationName::Explanation => "explanation",
            RelationName::ConfirmationQuestion => "confirmation_question",
            RelationName::QuestionFollowup => "question_followup",
            RelationName::Result => "result",
            RelationName::Reiteration => "reiteration",
            RelationName::Elaboration => "elaboration",
            RelationName::Contrast => "contrast",
        }
    }

    /// The fixed veridicality table. Correction retracts its source;
    /// a confirmation question commits to neither argument.
    pub fn veridicality(self) -> Veridicality {
        match self {
            RelationName::Correction => Veridicality { source: false, target: true },
            RelationName::ConfirmationQuestion => Veridicality { source: false, target: false },
            _ => Veridicality { source: true, target: true },
        }
    }
}

impl fmt::Display for RelationName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RelationName {
    type Err = DiscourseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RelationName::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| DiscourseError::UnknownRelation(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RelationInstance {
    pub relation: RelationName,
    pub source: UnitId,
    pub target: UnitId,
    /// Extra content the relation itself commits to (e.g. an enriched reading).
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub content: BTreeSet<Literal>,
}

impl RelationInstance {
    pub fn new(relation: RelationName, source: impl Into<String>, target: impl Into<String>) -> Self {
        RelationInstance {
            relation,
            source: source.into(),
            target: target.into(),
            content: BTreeSet::new(),
        }
    }

    pub fn with_content(mut self, content: &[Literal]) -> Self {
        self.content.extend(content.iter().cloned());
        self
    }

    pub fn veridical(&self) -> Veridicality {
        self.relation.veridicality()
    }

    /// The relation-specific atom `rel(name,source,target)`.
    pub fn atom(&self) -> Literal {
        Literal::pos(self.key())
    }

    pub fn key(&self) -> String {
        format!("rel({},{},{})", self.relation, self.source, self.target)
    }
}

impl fmt::Display for RelationInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({},{})", self.relation, self.source, self.target)?;
        if !self.content.is_empty() {
            let atoms: Vec<String> = self.content.iter().map(|l| l.to_string()).collect();
            write!(f, "[{}]", atoms.join(","))?;
        }
        Ok(())
    }
}

/// Which ULF and which slot choices produced a history.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub ulf: String,
    pub choices: Vec<usize>,
}

/// A fully specified discourse structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct History {
    pub units: Vec<Unit>,
    pub relations: Vec<RelationInstance>,
    pub provenance: Option<Provenance>,
}

impl History {
    pub fn new(units: Vec<Unit>, relations: Vec<RelationInstance>) -> Self {
        History { units, relations, provenance: None }
    }

    pub fn unit(&self, id: &str) -> Option<&Unit> {
        self.units.iter().find(|u| u.id() == id)
    }

    pub fn edus(&self) -> impl Iterator<Item = &Edu> {
        self.units.iter().filter_map(|u| match u {
            Unit::Edu(e) => Some(e),
            Unit::Cdu(_) => None,
        })
    }

    pub fn relation_set(&self) -> BTreeSet<&RelationInstance> {
        self.relations.iter().collect()
    }

    /// EDU ids reachable from `id` through CDU membership (including `id` itself
    /// when it is an EDU). Cycles are cut.
    pub(crate) fn member_edus(&self, id: &str) -> BTreeSet<UnitId> {
        let index: BTreeMap<&str, &Unit> = self.units.iter().map(|u| (u.id(), u)).collect();
        let mut out = BTreeSet::new();
        let mut seen = BTreeSet::new();
        let mut stack = vec![id.to_string()];
        while let Some(current) = stack.pop() {
            if !seen.insert(current.clone()) {
                continue;
            }
            match index.get(current.as_str()) {
                Some(Unit::Edu(e)) => {
                    out.insert(e.id.clone());
                }
                Some(Unit::Cdu(c)) => stack.extend(c.members.iter().cloned()),
                None => {}
            }
        }
        out
    }
}

/// Finite set of literals; `inconsistent` is set when an atom occurs with its negation.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct CommitmentSet {
    pub atoms: BTreeSet<Literal>,
    pub inconsistent: bool,
}

impl CommitmentSet {
    pub fn from_atoms(atoms: BTreeSet<Literal>) -> Self {
        let inconsistent = atoms.iter().any(|l| atoms.contains(&l.complement()));
        CommitmentSet { atoms, inconsistent }
    }

    /// Atoms occurring both positively and negatively.
    pub fn contradictions(&self) -> Vec<String> {
        self.atoms
            .iter()
            .filter(|l| !l.negated && self.atoms.contains(&l.complement()))
            .map(|l| l.atom.clone())
            .collect()
    }

    pub fn contains(&self, literal: &Literal) -> bool {
        self.atoms.contains(literal)
    }

    pub fn is_superset(&self, other: &CommitmentSet) -> bool {
        self.atoms.is_superset(&other.atoms)
    }

    /// True when some literal here has its complement in `other`.
    pub fn conflicts_with(&self, other: &CommitmentSet) -> bool {
        self.atoms.iter().any(|l| other.atoms.contains(&l.complement()))
    }
}

/// Commitments without the coherence precondition; used by the validator.
pub(crate) fn derive_commitments(h: &History) -> CommitmentSet {
    let mut retracted: BTreeSet<UnitId> = BTreeSet::new();
    for rel in &h.relations {
        let v = rel.veridical();
        if !v.source {
            retracted.extend(h.member_edus(&rel.source));
        }
        if !v.target {
            retracted.extend(h.member_edus(&rel.target));
        }
    }
    let mut atoms = BTreeSet::new();
    for edu in h.edus() {
        if !retracted.contains(&edu.id) {
            atoms.extend(edu.commitments.iter().cloned());
        }
    }
    for rel in &h.relations {
        atoms.insert(rel.atom());
        atoms.extend(rel.content.iter().cloned());
    }
    CommitmentSet::from_atoms(atoms)
}

pub(crate) fn require_coherent(h: &History) -> Result<(), DiscourseError> {
    let report = validate_history(h);
    if report.is_coherent() {
        Ok(())
    } else {
        Err(DiscourseError::Incoherent(report.summary()))
    }
}

/// The commitment set of a coherent history.
pub fn commitments(h: &History) -> Result<CommitmentSet, DiscourseError> {
    require_coherent(h)?;
    Ok(derive_commitments(h))
}

/// `h1 ⊨ h2`: the commitments of `h1` include those of `h2`.
pub fn entails(h1: &History, h2: &History) -> Result<bool, DiscourseError> {
    Ok(commitments(h1)?.is_superset(&commitments(h2)?))
}

/// Neither history entails the other.
pub fn semantically_distinct(h1: &History, h2: &History) -> Result<bool, DiscourseError> {
    let c1 = commitments(h1)?;
    let c2 = commitments(h2)?;
    Ok(!c1.is_superset(&c2) && !c2.is_superset(&c1))
}

/// Specification of a discourse with unresolved relation slots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnderspecifiedForm {
    pub id: String,
    /// Unit ids in play order.
    pub order: Vec<UnitId>,
    /// Definitions of every unit the form may use (EDUs and CDUs).
    pub units: Vec<Unit>,
    pub fixed: Vec<RelationInstance>,
    /// Exactly one candidate is chosen per slot.
    pub slots: Vec<Vec<RelationInstance>>,
}

impl UnderspecifiedForm {
    pub fn check(&self) -> Result<(), DiscourseError> {
        let known: BTreeSet<&str> = self.units.iter().map(|u| u.id()).collect();
        let fail = |reason: String| DiscourseError::InvalidForm { ulf: self.id.clone(), reason };
        for id in &self.order {
            if !known.contains(id.as_str()) {
                return Err(fail(format!("unit `{id}` in order is not defined")));
            }
        }
        let in_scope = |id: &str| known.contains(id);
        for rel in self.fixed.iter().chain(self.slots.iter().flatten()) {
            for end in [&rel.source, &rel.target] {
                if !in_scope(end) {
                    return Err(fail(format!("relation {rel} references unknown unit `{end}`")));
                }
            }
        }
        for (i, slot) in self.slots.iter().enumerate() {
            if slot.is_empty() {
                return Err(fail(format!("slot {i} has no candidates")));
            }
            let distinct: BTreeSet<&RelationInstance> = slot.iter().collect();
            if distinct.len() != slot.len() {
                return Err(fail(format!("slot {i} repeats a candidate")));
            }
        }
        Ok(())
    }

    /// Product of slot sizes.
    pub fn combination_count(&self) -> usize {
        self.slots.iter().map(Vec::len).product()
    }
}
