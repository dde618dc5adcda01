use std::collections::BTreeSet;

use super::GameError;
use crate::discourse::{require_coherent, History, RelationInstance};
use crate::rational::{self, Rational};

/// Jaccard distance between the relation-instance sets of two histories.
pub fn history_distance(h1: &History, h2: &History) -> Result<Rational, GameError> {
    require_coherent(h1)?;
    require_coherent(h2)?;
    Ok(relation_distance(&h1.relation_set(), &h2.relation_set()))
}

pub(crate) fn relation_distance(a: &BTreeSet<&RelationInstance>, b: &BTreeSet<&RelationInstance>) -> Rational {
    let union = a.union(b).count();
    if union == 0 {
        return rational::zero();
    }
    let diff = a.symmetric_difference(b).count();
    rational::ratio(diff as i64, union as i64)
}

/// Whether E's history stays within `margin` of the reference over the last
/// `ceil(horizon/4)` of the first `horizon` rounds.
pub fn external_truth_win(
    chain: &[(History, History)],
    margin: &Rational,
    horizon: usize,
) -> Result<bool, GameError> {
    if horizon > chain.len() {
        return Err(GameError::HorizonTooLong { horizon, available: chain.len() });
    }
    if horizon == 0 {
        return Err(GameError::BadWindow { window: 0, horizon });
    }
    let window = horizon.div_ceil(4);
    for (reference, e) in &chain[horizon - window..horizon] {
        if &history_distance(reference, e)? > margin {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discourse::{Edu, RelationName, Unit};
    use crate::rational::ratio;
    use crate::Player;

    fn units(n: usize) -> Vec<Unit> {
        (0..n).map(|i| Edu::new(format!("u{i}"), Player::Zero, &[]).into()).collect()
    }

    /// A chain u0 → u1 → … with the given relation names.
    fn chain(names: &[RelationName]) -> History {
        let rels = names
            .iter()
            .enumerate()
            .map(|(i, r)| RelationInstance::new(*r, format!("u{i}"), format!("u{}", i + 1)))
            .collect();
        History::new(units(names.len() + 1), rels)
    }

    use RelationName::*;

    #[test]
    fn identical_histories_have_distance_zero() {
        let h = chain(&[Background, Result, Elaboration]);
        assert_eq!(history_distance(&h, &h).unwrap(), rational::zero());
        let single = History::new(units(1), vec![]);
        assert_eq!(history_distance(&single, &single).unwrap(), rational::zero());
    }

    #[test]
    fn one_unique_relation_each_side() {
        let h1 = chain(&[Background, Result, Elaboration, Explanation]);
        let h2 = chain(&[Background, Result, Elaboration, Contrast]);
        assert_eq!(history_distance(&h1, &h2).unwrap(), ratio(2, 5));
    }

    #[test]
    fn disjoint_relations_have_distance_one() {
        let h1 = chain(&[Background, Result]);
        let h2 = chain(&[Contrast, Elaboration]);
        assert_eq!(history_distance(&h1, &h2).unwrap(), rational::one());
    }

    #[test]
    fn incoherent_input_rejected() {
        let bad = History::new(units(2), vec![]);
        let err = history_distance(&bad, &bad).unwrap_err();
        assert!(err.to_string().starts_with("incoherent input"));
    }

    #[test]
    fn external_truth_examples() {
        let reference = chain(&[Background, Result, Elaboration, Explanation]);
        let equal: Vec<_> = (0..8).map(|_| (reference.clone(), reference.clone())).collect();
        assert!(external_truth_win(&equal, &rational::zero(), 8).unwrap());

        let off = chain(&[Background, Result, Elaboration, Contrast]);
        let diverging: Vec<_> = (0..8).map(|_| (reference.clone(), off.clone())).collect();
        assert!(!external_truth_win(&diverging, &rational::zero(), 8).unwrap());

        // Five-edge reference; E recovers one more edge per round up to four.
        let reference5 = chain(&[Background, Result, Elaboration, Explanation, Qap]);
        let partial = |j: usize| History::new(units(j + 1), reference5.relations[..j].to_vec());
        let decaying: Vec<_> = (0..8).map(|r| (reference5.clone(), partial(r.min(4)))).collect();
        assert_eq!(history_distance(&reference5, &partial(4)).unwrap(), ratio(1, 5));
        assert!(external_truth_win(&decaying, &ratio(1, 4), 8).unwrap());
        assert!(!external_truth_win(&decaying, &ratio(1, 10), 8).unwrap());
        // Early rounds lie outside the trailing window.
        assert!(!external_truth_win(&decaying, &ratio(1, 4), 3).unwrap());
        assert!(matches!(external_truth_win(&equal, &rational::zero(), 9), Err(GameError::HorizonTooLong { .. })));
    }
}
