use serde::Serialize;

use super::{validate_history, History, Provenance, UnderspecifiedForm, Violation};

/// A coherent history obtained by resolving every slot of a form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Completion {
    /// Position of the slot-choice vector in lexicographic order.
    pub index: usize,
    pub choices: Vec<usize>,
    pub history: History,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DroppedCombination {
    pub index: usize,
    pub choices: Vec<usize>,
    pub violations: Vec<Violation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CompletionReport {
    pub completions: Vec<Completion>,
    pub dropped: Vec<DroppedCombination>,
}

impl CompletionReport {
    pub fn get(&self, index: usize) -> Option<&Completion> {
        self.completions.iter().find(|c| c.index == index)
    }

    pub fn indices(&self) -> Vec<usize> {
        self.completions.iter().map(|c| c.index).collect()
    }

    pub fn raw_count(&self) -> usize {
        self.completions.len() + self.dropped.len()
    }
}

/// Decodes a lexicographic combination index into one choice per slot,
/// the last slot varying fastest.
fn decode(mut index: usize, sizes: &[usize]) -> Vec<usize> {
    let mut choices = vec![0; sizes.len()];
    for (slot, &size) in sizes.iter().enumerate().rev() {
        choices[slot] = index % size;
        index /= size;
    }
    choices
}

/// Enumerates the Cartesian product of slot candidates in canonical order.
/// Incoherent combinations are dropped and listed with their violations.
pub fn completions(u: &UnderspecifiedForm) -> CompletionReport {
    let sizes: Vec<usize> = u.slots.iter().map(Vec::len).collect();
    let total = u.combination_count();
    let mut report = CompletionReport::default();
    for index in 0..total {
        let choices = decode(index, &sizes);
        let mut relations = u.fixed.clone();
        for (slot, &choice) in u.slots.iter().zip(&choices) {
            relations.push(slot[choice].clone());
        }
        let mut history = History::new(u.units.clone(), relations);
        history.provenance = Some(Provenance { ulf: u.id.clone(), choices: choices.clone() });
        let check = validate_history(&history);
        if check.is_coherent() {
            report.completions.push(Completion { index, choices, history });
        } else {
            report.dropped.push(DroppedCombination { index, choices, violations: check.violations });
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discourse::{Edu, RelationInstance, RelationName, Unit};
    use crate::Player;

    fn form(units: &[&str], fixed: Vec<RelationInstance>, slots: Vec<Vec<RelationInstance>>) -> UnderspecifiedForm {
        UnderspecifiedForm {
            id: "u".into(),
            order: units.iter().map(|s| s.to_string()).collect(),
            units: units.iter().map(|s| Unit::Edu(Edu::new(*s, Player::Zero, &[]))).collect(),
            fixed,
            slots,
        }
    }

    fn rel(name: RelationName, s: &str, t: &str) -> RelationInstance {
        RelationInstance::new(name, s, t)
    }

    #[test]
    fn zero_slots_yield_the_fixed_history() {
        let u = form(&["a"], vec![], vec![]);
        let report = completions(&u);
        assert_eq!(report.completions.len(), 1);
        assert_eq!(report.completions[0].choices, Vec::<usize>::new());
    }

    #[test]
    fn one_binary_slot_yields_two() {
        let u = form(
            &["a", "b"],
            vec![],
            vec![vec![rel(RelationName::Background, "a", "b"), rel(RelationName::Iqap, "a", "b")]],
        );
        let report = completions(&u);
        assert_eq!(report.indices(), vec![0, 1]);
        assert_eq!(report.completions[1].history.relations[0].relation, RelationName::Iqap);
    }

    #[test]
    fn invalid_combinations_are_dropped_with_a_reason() {
        // Choosing b->a in the second slot closes a cycle with the fixed a->b.
        let u = form(
            &["a", "b", "c"],
            vec![rel(RelationName::Result, "a", "b")],
            vec![
                vec![rel(RelationName::Background, "b", "c"), rel(RelationName::Background, "a", "c")],
                vec![rel(RelationName::Elaboration, "b", "c"), rel(RelationName::Contrast, "b", "a")],
            ],
        );
        let report = completions(&u);
        assert_eq!(report.raw_count(), 4);
        assert_eq!(report.indices(), vec![0, 2]);
        assert_eq!(report.dropped.len(), 2);
        for d in &report.dropped {
            assert_eq!(d.choices[1], 1);
            assert!(d.violations.iter().any(|v| v.kind() == "relation_cycle"));
        }
    }

    #[test]
    fn decode_is_lexicographic() {
        let sizes = [2, 2, 2];
        let all: Vec<Vec<usize>> = (0..8).map(|i| decode(i, &sizes)).collect();
        assert_eq!(all[0], vec![0, 0, 0]);
        assert_eq!(all[1], vec![0, 0, 1]);
        assert_eq!(all[4], vec![1, 0, 0]);
        assert_eq!(all[7], vec![1, 1, 1]);
    }
}
