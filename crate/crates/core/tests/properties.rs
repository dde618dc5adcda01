use std::collections::BTreeSet;

use megame_core::discourse::{entails, Edu, History, Literal, RelationInstance, RelationName};
use megame_core::epistemic::{bayes_update, Distribution};
use megame_core::game::{attack_ratio, discounted_score, dual, AttackKind, Move, Play};
use megame_core::rational::{ratio, Rational};
use megame_core::Player;
use num_traits::Signed;
use proptest::prelude::*;

fn player(b: bool) -> Player {
    if b {
        Player::One
    } else {
        Player::Zero
    }
}

fn arb_play() -> impl Strategy<Value = Play> {
    prop::collection::vec((any::<bool>(), 0u8..3), 0..12).prop_map(|ms| {
        let moves = ms.into_iter().map(|(p, s)| Move::new(format!("m{s}"), player(p))).collect();
        Play::from_moves(moves).unwrap()
    })
}

/// Chain-shaped histories over a small atom pool, so that any two of them
/// are coherent and comparable.
fn arb_history() -> impl Strategy<Value = History> {
    prop::collection::vec(prop::collection::btree_set(0u8..4, 0..3), 1..4).prop_map(|units| {
        let edus: Vec<Edu> = units
            .iter()
            .enumerate()
            .map(|(i, atoms)| {
                let lits: Vec<Literal> = atoms.iter().map(|a| Literal::pos(format!("a{a}"))).collect();
                Edu::new(format!("u{i}"), Player::Zero, &lits)
            })
            .collect();
        let rels = (1..edus.len())
            .map(|i| RelationInstance::new(RelationName::Elaboration, format!("u{}", i - 1), format!("u{i}")))
            .collect();
        History::new(edus.into_iter().map(Into::into).collect(), rels)
    })
}

proptest! {
    #[test]
    fn dual_is_a_length_preserving_involution(p in arb_play()) {
        let d = dual(&p);
        prop_assert_eq!(d.len(), p.len());
        prop_assert_eq!(d.move_count(), p.move_count());
        prop_assert_eq!(dual(&d), p);
    }

    #[test]
    fn entailment_is_a_preorder(a in arb_history(), b in arb_history(), c in arb_history()) {
        prop_assert!(entails(&a, &a).unwrap());
        if entails(&a, &b).unwrap() && entails(&b, &c).unwrap() {
            prop_assert!(entails(&a, &c).unwrap());
        }
    }

    #[test]
    fn attack_ratio_is_a_proportion(
        ms in prop::collection::vec((any::<bool>(), 0u8..4, any::<bool>()), 0..14),
        disinterested in any::<bool>(),
    ) {
        let kinds = [AttackKind::None, AttackKind::Evidence, AttackKind::AdHominem, AttackKind::Consistency];
        let moves: Vec<Move> = ms
            .iter()
            .enumerate()
            .map(|(i, &(p, k, answered))| {
                let m = if kinds[k as usize].is_attack() {
                    Move::attack("x", player(p), kinds[k as usize], "claim")
                } else {
                    Move::new("x", player(p))
                };
                let m = m.with_id(format!("m{i}"));
                if answered { m.answered(format!("m{}", i + 1)) } else { m }
            })
            .collect();
        let play = Play::from_moves(moves).unwrap();
        for attacker in Player::BOTH {
            let r = attack_ratio(&play, attacker, disinterested);
            prop_assert!(!r.is_negative() && r <= ratio(1, 1));
        }
    }

    #[test]
    fn discounted_score_is_bounded(
        ms in prop::collection::vec((any::<bool>(), -5i64..=5), 0..16),
        g in 0i64..10,
    ) {
        let gamma = ratio(g, 10);
        let moves: Vec<Move> = ms.iter().map(|&(p, s)| Move::new(s.to_string(), player(p))).collect();
        let play = Play::from_moves(moves).unwrap();
        let score = discounted_score(&play, &gamma, |m| ratio(m.payload.parse().unwrap(), 1)).unwrap();
        let bound = ratio(5, 1) / (ratio(1, 1) - &gamma);
        prop_assert!(score.abs() <= bound);
    }

    #[test]
    fn bayes_update_preserves_ratios_inside_the_event(
        weights in prop::collection::vec(1i64..20, 1..8),
        mask in prop::collection::vec(any::<bool>(), 8),
    ) {
        let total: i64 = weights.iter().sum();
        let prior = Distribution::new(weights.iter().enumerate().map(|(k, w)| (k, ratio(*w, total)))).unwrap();
        let event: BTreeSet<usize> = (0..weights.len()).filter(|&k| mask[k]).collect();
        match bayes_update(&prior, &event) {
            Err(_) => prop_assert!(event.is_empty()),
            Ok(post) => {
                prop_assert_eq!(post.sum(), ratio(1, 1));
                prop_assert!(post.support().all(|k| event.contains(k)));
                for &i in &event {
                    for &j in &event {
                        let lhs: Rational = post.weight(&i) * prior.weight(&j);
                        prop_assert_eq!(lhs, post.weight(&j) * prior.weight(&i));
                    }
                }
            }
        }
    }
}
