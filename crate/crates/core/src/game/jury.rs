use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::attack::{attack_ratios, discounted_score, limit_verdict, LimitVerdict};
use super::Play;
use crate::rational::{self, Exact, Rational};
use crate::Player;

/// Finitely evaluable predicates over plays.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Predicate {
    Always,
    Never,
    LastSpeaker(Player),
    FirstSpeaker(Player),
    /// `player` made at least one move with `payload`.
    Contains { player: Player, payload: String },
    /// `player` made strictly more `payload` moves than the opponent.
    CountGreater { player: Player, payload: String },
    /// Both players made equally many `payload` moves.
    CountEqual { payload: String },
    Not(Box<Predicate>),
    And(Vec<Predicate>),
    Or(Vec<Predicate>),
}

impl Predicate {
    fn count(p: &Play, player: Player, payload: &str) -> usize {
        p.moves().filter(|m| m.player == player && m.payload == payload).count()
    }

    pub fn holds(&self, p: &Play) -> bool {
        match self {
            Predicate::Always => true,
            Predicate::Never => false,
            Predicate::LastSpeaker(pl) => p.last_player() == Some(*pl),
            Predicate::FirstSpeaker(pl) => p.turns().first().map(|t| t.player()) == Some(*pl),
            Predicate::Contains { player, payload } => Self::count(p, *player, payload) > 0,
            Predicate::CountGreater { player, payload } => {
                Self::count(p, *player, payload) > Self::count(p, player.opponent(), payload)
            }
            Predicate::CountEqual { payload } => {
                Self::count(p, Player::Zero, payload) == Self::count(p, Player::One, payload)
            }
            Predicate::Not(inner) => !inner.holds(p),
            Predicate::And(parts) => parts.iter().all(|q| q.holds(p)),
            Predicate::Or(parts) => parts.iter().any(|q| q.holds(p)),
        }
    }
}

/// A winning condition for one player.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum WinCondition {
    Finite {
        predicate: Predicate,
    },
    /// The defender wins when the good-attack ratio of `attacker` tends to zero,
    /// approximated at a finite horizon.
    LimitRatio {
        attacker: Player,
        window: usize,
        #[serde(with = "rational::exact")]
        epsilon: Rational,
        horizon: usize,
        #[serde(default)]
        disinterested: bool,
    },
    /// Wins when the discounted score of `player`'s moves reaches `threshold`.
    Discounted {
        player: Player,
        #[serde(with = "rational::exact")]
        gamma: Rational,
        #[serde(with = "rational::exact")]
        threshold: Rational,
        scores: BTreeMap<String, Exact>,
    },
}

/// `Some(b)` when the condition is decided on this finite play.
pub fn evaluate_condition(condition: &WinCondition, p: &Play) -> Option<bool> {
    match condition {
        WinCondition::Finite { predicate } => Some(predicate.holds(p)),
        WinCondition::LimitRatio { attacker, window, epsilon, horizon, disinterested } => {
            let prefixes = p.move_prefixes();
            let ratios = attack_ratios(&prefixes[1..], *attacker, *disinterested);
            match limit_verdict(&ratios, *window, epsilon, *horizon) {
                Ok(LimitVerdict::WinE) => Some(true),
                Ok(LimitVerdict::NotWinE) => Some(false),
                Ok(LimitVerdict::Undecided) | Err(_) => None,
            }
        }
        WinCondition::Discounted { player, gamma, threshold, scores } => {
            let scorer = |m: &super::Move| -> Rational {
                if m.player != *player {
                    return rational::zero();
                }
                scores.get(&m.payload).map(|e| e.0.clone()).unwrap_or_else(rational::zero)
            };
            let score = discounted_score(p, gamma, scorer).ok()?;
            let max_abs = scores.values().map(|e| e.0.abs()).max().unwrap_or_else(rational::zero);
            // Largest contribution the remaining moves could still make.
            let mut tail = max_abs / (rational::one() - gamma);
            for _ in 0..p.move_count() {
                tail *= gamma;
            }
            if tail.is_zero() && p.move_count() == 0 {
                return None;
            }
            if &score - &tail >= *threshold {
                Some(true)
            } else if &score + &tail < *threshold {
                Some(false)
            } else {
                None
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Win(Player),
    Undecided,
    /// Neither or both conditions hold (only possible when not win-lose).
    NoWinner,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Win(Player::Zero) => "win_0",
            Verdict::Win(Player::One) => "win_1",
            Verdict::Undecided => "undecided",
            Verdict::NoWinner => "no_winner",
        }
    }
}

impl Serialize for Verdict {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

/// Winning conditions of a jury. When `win_lose` is set, player 1 wins exactly
/// when player 0 does not and `win1` is ignored.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Jury {
    pub win0: WinCondition,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub win1: Option<WinCondition>,
    #[serde(default)]
    pub win_lose: bool,
}

impl Jury {
    pub fn win_lose(win0: WinCondition) -> Self {
        Jury { win0, win1: None, win_lose: true }
    }

    pub fn pair(win0: WinCondition, win1: WinCondition) -> Self {
        Jury { win0, win1: Some(win1), win_lose: false }
    }

    /// Whether `p` belongs to `player`'s winning condition, if decided.
    pub fn holds(&self, player: Player, p: &Play) -> Option<bool> {
        match player {
            Player::Zero => evaluate_condition(&self.win0, p),
            Player::One if self.win_lose => evaluate_condition(&self.win0, p).map(|b| !b),
            Player::One => match &self.win1 {
                Some(c) => evaluate_condition(c, p),
                None => Some(false),
            },
        }
    }
}

pub fn evaluate_win(j: &Jury, p: &Play) -> Verdict {
    match (j.holds(Player::Zero, p), j.holds(Player::One, p)) {
        (Some(true), Some(false)) => Verdict::Win(Player::Zero),
        (Some(false), Some(true)) => Verdict::Win(Player::One),
        (Some(_), Some(_)) => Verdict::NoWinner,
        _ => Verdict::Undecided,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{AttackKind, Move, Turn};
    use crate::rational::ratio;

    fn play(speakers: &[u64]) -> Play {
        let moves = speakers.iter().map(|&s| Move::new("m", Player::from_index(s).unwrap())).collect();
        Play::from_moves(moves).unwrap()
    }

    #[test]
    fn last_speaker_predicate() {
        let j = Jury::pair(
            WinCondition::Finite { predicate: Predicate::LastSpeaker(Player::Zero) },
            WinCondition::Finite { predicate: Predicate::LastSpeaker(Player::One) },
        );
        assert_eq!(evaluate_win(&j, &play(&[1, 0])), Verdict::Win(Player::Zero));
        assert_eq!(evaluate_win(&j, &play(&[0, 1])), Verdict::Win(Player::One));
        assert_eq!(evaluate_win(&j, &Play::empty()), Verdict::NoWinner);
    }

    #[test]
    fn limit_ratio_below_horizon_is_undecided() {
        let j = Jury::win_lose(WinCondition::LimitRatio {
            attacker: Player::One,
            window: 2,
            epsilon: ratio(1, 10),
            horizon: 10,
            disinterested: false,
        });
        let p = Play::from_turns(vec![
            Turn::of(Player::Zero, &["claim"]).unwrap(),
            Turn::new(Player::One, vec![Move::attack("doubt", Player::One, AttackKind::Evidence, "claim")]).unwrap(),
        ])
        .unwrap();
        assert_eq!(evaluate_win(&j, &p), Verdict::Undecided);
    }

    #[test]
    fn win_lose_never_double_wins() {
        let j = Jury::win_lose(WinCondition::Finite { predicate: Predicate::Always });
        for p in [play(&[0]), play(&[1, 0, 1]), Play::empty()] {
            let both = j.holds(Player::Zero, &p) == Some(true) && j.holds(Player::One, &p) == Some(true);
            assert!(!both);
        }
    }

    #[test]
    fn discounted_condition_resolves_once_tail_is_small() {
        let mut scores = BTreeMap::new();
        scores.insert("good".to_string(), Exact(rational::one()));
        let cond = WinCondition::Discounted {
            player: Player::Zero,
            gamma: ratio(1, 2),
            threshold: ratio(1, 1),
            scores,
        };
        // After one scoring move: score 1, tail bound 1 → undecided.
        let one = Play::from_turns(vec![Turn::of(Player::Zero, &["good"]).unwrap()]).unwrap();
        assert_eq!(evaluate_condition(&cond, &one), None);
        // After two: score 3/2, tail bound 1/2 → reaches 1.
        let two = Play::from_turns(vec![Turn::of(Player::Zero, &["good", "good"]).unwrap()]).unwrap();
        assert_eq!(evaluate_condition(&cond, &two), Some(true));
        // Opponent-only play: score 0, tail 1/4 after two moves → cannot reach 1.
        let other = Play::from_turns(vec![Turn::of(Player::One, &["good", "good"]).unwrap()]).unwrap();
        assert_eq!(evaluate_condition(&cond, &other), Some(false));
    }

    #[test]
    fn predicate_json_shape() {
        let p = Predicate::Or(vec![
            Predicate::CountGreater { player: Player::Zero, payload: "a".into() },
            Predicate::And(vec![Predicate::CountEqual { payload: "a".into() }, Predicate::LastSpeaker(Player::Zero)]),
        ]);
        let text = serde_json::to_string(&p).unwrap();
        assert_eq!(
            text,
            r#"{"or":[{"count_greater":{"player":0,"payload":"a"}},{"and":[{"count_equal":{"payload":"a"}},{"last_speaker":0}]}]}"#
        );
        let back: Predicate = serde_json::from_str(&text).unwrap();
        assert_eq!(back, p);
    }
}
