use std::collections::BTreeSet;

use serde::Serialize;

use super::AnalysisError;
use crate::discourse::{
    commitments, require_coherent, validate_history, Edu, History, Literal, RelationInstance, RelationName, Unit,
};
use crate::game::{admissible_attacks, Move};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttackEntry {
    pub attack: Move,
    pub rebuttal: Option<Move>,
}

pub type AttackScript = Vec<AttackEntry>;

/// Names an attack may target in `h`: unit ids, committed literals and
/// relation keys.
fn targets(h: &History) -> BTreeSet<String> {
    let mut out: BTreeSet<String> = h.units.iter().map(|u| u.id().to_string()).collect();
    for rel in &h.relations {
        out.insert(rel.key());
        out.insert(rel.to_string());
    }
    out.extend(crate::discourse::derive_commitments(h).atoms.iter().map(Literal::to_string));
    out
}

/// Every admissible attack on `h` in the script has a rebuttal.
pub fn e_defensible(h: &History, script: &[AttackEntry], disinterested: bool) -> bool {
    let names = targets(h);
    script.iter().all(|entry| {
        let on_h = entry.attack.attack_target.as_ref().is_some_and(|t| names.contains(t));
        let admissible = !admissible_attacks(std::slice::from_ref(&entry.attack), disinterested).is_empty();
        !(on_h && entry.attack.is_attack() && admissible) || entry.rebuttal.is_some()
    })
}

/// Attaches a new fact carrying `trigger` to `anchor` with `relation`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtenderRule {
    pub trigger: Literal,
    pub relation: RelationName,
    pub anchor: String,
    /// Whether the new fact is the relation's source rather than its target.
    pub fact_is_source: bool,
}

/// Whether the rules extend `h` to every new fact, giving a coherent and
/// E-defensible history.
pub fn is_predictive(
    h: &History,
    new_facts: &[Edu],
    rules: &[ExtenderRule],
    script: &[AttackEntry],
    disinterested: bool,
) -> Result<bool, AnalysisError> {
    require_coherent(h)?;
    let mut extended = h.clone();
    for fact in new_facts {
        let known: BTreeSet<String> = extended.units.iter().map(|u| u.id().to_string()).collect();
        let Some(rule) = rules.iter().find(|r| fact.commitments.contains(&r.trigger) && known.contains(&r.anchor)) else {
            return Ok(false);
        };
        let rel = if rule.fact_is_source {
            RelationInstance::new(rule.relation, fact.id.clone(), rule.anchor.clone())
        } else {
            RelationInstance::new(rule.relation, rule.anchor.clone(), fact.id.clone())
        };
        extended.units.push(Unit::Edu(fact.clone()));
        extended.relations.push(rel);
    }
    Ok(validate_history(&extended).is_coherent() && e_defensible(&extended, script, disinterested))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TwoHistoryVerdict {
    #[serde(rename = "E_wins")]
    EWins,
    #[serde(rename = "A_wins")]
    AWins,
    #[serde(rename = "both_lose")]
    BothLose,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TwoHistoryReport {
    pub verdict: TwoHistoryVerdict,
    pub e_defensible: bool,
    pub a_defensible: bool,
    /// The two histories commit to some atom and its negation.
    pub contradictory: bool,
}

/// E wins when only E's history survives its attacks, A symmetrically;
/// otherwise both lose.
pub fn two_history_outcome(
    h_e: &History,
    h_a: &History,
    against_e: &[AttackEntry],
    against_a: &[AttackEntry],
    disinterested: bool,
) -> Result<TwoHistoryReport, AnalysisError> {
    let c_e = commitments(h_e)?;
    let c_a = commitments(h_a)?;
    let e_ok = e_defensible(h_e, against_e, disinterested);
    let a_ok = e_defensible(h_a, against_a, disinterested);
    let verdict = match (e_ok, a_ok) {
        (true, false) => TwoHistoryVerdict::EWins,
        (false, true) => TwoHistoryVerdict::AWins,
        _ => TwoHistoryVerdict::BothLose,
    };
    Ok(TwoHistoryReport { verdict, e_defensible: e_ok, a_defensible: a_ok, contradictory: c_e.conflicts_with(&c_a) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::AttackKind;
    use crate::Player;

    fn edu(id: &str, speaker: Player, atoms: &[&str]) -> Edu {
        let lits: Vec<Literal> = atoms.iter().map(|a| a.parse().unwrap()).collect();
        Edu::new(id, speaker, &lits)
    }

    fn single(id: &str, atoms: &[&str]) -> History {
        History::new(vec![edu(id, Player::Zero, atoms).into()], vec![])
    }

    fn attack(kind: AttackKind, target: &str) -> Move {
        Move::attack("attack", Player::One, kind, target)
    }

    fn entry(kind: AttackKind, target: &str, rebutted: bool) -> AttackEntry {
        AttackEntry { attack: attack(kind, target), rebuttal: rebutted.then(|| Move::new("rebut", Player::Zero)) }
    }

    #[test]
    fn defensibility_examples() {
        let h = single("e1", &["a"]);
        assert!(e_defensible(&h, &[], true));
        assert!(!e_defensible(&h, &[entry(AttackKind::Evidence, "a", false)], true));
        assert!(e_defensible(&h, &[entry(AttackKind::Evidence, "a", true)], true));
        assert!(e_defensible(&h, &[entry(AttackKind::AdHominem, "e1", false)], true));
        assert!(!e_defensible(&h, &[entry(AttackKind::AdHominem, "e1", false)], false));
        // Attacks on something outside the history are not about it.
        assert!(e_defensible(&h, &[entry(AttackKind::Evidence, "zzz", false)], true));
    }

    #[test]
    fn predictiveness_examples() {
        let h = single("e1", &["a"]);
        assert!(is_predictive(&h, &[], &[], &[], true).unwrap());
        let rule = ExtenderRule {
            trigger: Literal::pos("b"),
            relation: RelationName::Result,
            anchor: "e1".into(),
            fact_is_source: false,
        };
        let fact = edu("e2", Player::Zero, &["b"]);
        assert!(is_predictive(&h, &[fact.clone()], &[rule.clone()], &[], true).unwrap());
        let stray = edu("e3", Player::Zero, &["c"]);
        assert!(!is_predictive(&h, &[stray], &[rule.clone()], &[], true).unwrap());
        // An unrebutted attack on the new relation blocks predictiveness.
        let key = RelationInstance::new(RelationName::Result, "e1", "e2").key();
        let blocked = [entry(AttackKind::Coherence, &key, false)];
        assert!(!is_predictive(&h, &[fact], &[rule], &blocked, true).unwrap());
    }

    #[test]
    fn two_history_verdicts() {
        let h_e = single("e1", &["a"]);
        let h_a = single("a1", &["!a"]);
        let standing_e = [entry(AttackKind::Evidence, "a", false)];
        let standing_a = [entry(AttackKind::Evidence, "!a", false)];
        let rebutted_e = [entry(AttackKind::Evidence, "a", true)];
        let rebutted_a = [entry(AttackKind::Evidence, "!a", true)];

        let r = two_history_outcome(&h_e, &h_a, &rebutted_e, &standing_a, true).unwrap();
        assert_eq!(r.verdict, TwoHistoryVerdict::EWins);
        assert!(r.contradictory);
        let r = two_history_outcome(&h_e, &h_a, &standing_e, &standing_a, true).unwrap();
        assert_eq!(r.verdict, TwoHistoryVerdict::BothLose);
        let r = two_history_outcome(&h_e, &h_a, &rebutted_e, &rebutted_a, true).unwrap();
        assert_eq!(r.verdict, TwoHistoryVerdict::BothLose);
        assert_eq!(serde_json::to_value(r.verdict).unwrap(), "both_lose");
    }
}
