//! Message Exchange game mechanics: labeled moves, alternating plays and their
//! duals, jury winning conditions, attack bookkeeping and a finite solver.

mod attack;
mod distance;
mod jury;
mod solve;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::Player;

pub use attack::{
    admissible_attacks, attack_ratio, attack_ratios, discounted_score, estimate_limit_win, limit_verdict,
    LimitVerdict,
};
pub use distance::{external_truth_win, history_distance};
pub use jury::{evaluate_condition, evaluate_win, Jury, Predicate, Verdict, WinCondition};
pub use solve::{solve_finite, GameNode, GameTree, NodePath, Solution};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GameError {
    #[error("wrong player: turn by player {got} cannot follow a turn by player {last}")]
    WrongPlayer { last: Player, got: Player },
    #[error("empty turn")]
    EmptyTurn,
    #[error("move labeled for player {mv} inside a turn of player {turn}")]
    MixedTurn { turn: Player, mv: Player },
    #[error("attack move `{0}` has no target")]
    UntargetedAttack(String),
    #[error("discount factor {0} outside [0,1)")]
    BadDiscount(String),
    #[error("horizon {horizon} exceeds the {available} available prefixes")]
    HorizonTooLong { horizon: usize, available: usize },
    #[error("invalid window {window} for horizon {horizon}")]
    BadWindow { window: usize, horizon: usize },
    #[error("leaf at {0} is not classified win-lose")]
    NotWinLose(String),
    #[error("malformed game tree: {0}")]
    MalformedTree(String),
    #[error(transparent)]
    Discourse(#[from] crate::discourse::DiscourseError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttackKind {
    #[default]
    None,
    Evidence,
    Consistency,
    Coherence,
    AdHominem,
    GeneralSkeptical,
}

impl AttackKind {
    pub fn is_attack(self) -> bool {
        self != AttackKind::None
    }

    /// Attacks a disinterested jury disregards.
    pub fn is_irrelevant_to_evidence(self) -> bool {
        matches!(self, AttackKind::AdHominem | AttackKind::GeneralSkeptical)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Move {
    pub id: Option<String>,
    /// Unit id or vocabulary symbol.
    pub payload: String,
    pub player: Player,
    pub attack_kind: AttackKind,
    pub attack_target: Option<String>,
    pub answered_by: Option<String>,
}

impl Move {
    pub fn new(payload: impl Into<String>, player: Player) -> Self {
        Move {
            id: None,
            payload: payload.into(),
            player,
            attack_kind: AttackKind::None,
            attack_target: None,
            answered_by: None,
        }
    }

    pub fn attack(payload: impl Into<String>, player: Player, kind: AttackKind, target: impl Into<String>) -> Self {
        Move { attack_kind: kind, attack_target: Some(target.into()), ..Move::new(payload, player) }
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = Some(id.into());
        self
    }

    pub fn answered(mut self, by: impl Into<String>) -> Self {
        self.answered_by = Some(by.into());
        self
    }

    pub fn is_attack(&self) -> bool {
        self.attack_kind.is_attack()
    }

    pub fn check(&self) -> Result<(), GameError> {
        if self.is_attack() && self.attack_target.is_none() {
            return Err(GameError::UntargetedAttack(self.payload.clone()));
        }
        Ok(())
    }

    fn flipped(&self) -> Move {
        Move { player: self.player.opponent(), ..self.clone() }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.payload, self.player)
    }
}

/// A nonempty string of moves by one player.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Turn {
    player: Player,
    moves: Vec<Move>,
}

impl Turn {
    pub fn new(player: Player, moves: Vec<Move>) -> Result<Self, GameError> {
        if moves.is_empty() {
            return Err(GameError::EmptyTurn);
        }
        for m in &moves {
            if m.player != player {
                return Err(GameError::MixedTurn { turn: player, mv: m.player });
            }
            m.check()?;
        }
        Ok(Turn { player, moves })
    }

    /// A turn of plain moves with the given payloads.
    pub fn of(player: Player, payloads: &[&str]) -> Result<Self, GameError> {
        Turn::new(player, payloads.iter().map(|p| Move::new(*p, player)).collect())
    }

    pub fn player(&self) -> Player {
        self.player
    }

    pub fn moves(&self) -> &[Move] {
        &self.moves
    }

    pub fn payloads(&self) -> Vec<&str> {
        self.moves.iter().map(|m| m.payload.as_str()).collect()
    }

    fn dual(&self) -> Turn {
        Turn { player: self.player.opponent(), moves: self.moves.iter().map(Move::flipped).collect() }
    }
}

impl fmt::Display for Turn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:[{}]", self.player, self.payloads().join(" "))
    }
}

/// An alternating sequence of turns.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Play {
    turns: Vec<Turn>,
}

impl Play {
    pub fn empty() -> Self {
        Play::default()
    }

    pub fn from_turns(turns: Vec<Turn>) -> Result<Self, GameError> {
        turns.into_iter().try_fold(Play::empty(), |play, turn| play.extend(turn))
    }

    /// Groups a flat move sequence into maximal same-player turns.
    pub fn from_moves(moves: Vec<Move>) -> Result<Self, GameError> {
        let mut turns: Vec<Turn> = Vec::new();
        let mut current: Vec<Move> = Vec::new();
        for m in moves {
            if current.last().is_some_and(|last| last.player != m.player) {
                let player = current[0].player;
                turns.push(Turn::new(player, std::mem::take(&mut current))?);
            }
            current.push(m);
        }
        if !current.is_empty() {
            let player = current[0].player;
            turns.push(Turn::new(player, current)?);
        }
        Ok(Play { turns })
    }

    /// Appends `turn`, enforcing alternation. Either player may open.
    pub fn extend(&self, turn: Turn) -> Result<Play, GameError> {
        if let Some(last) = self.turns.last() {
            if last.player == turn.player {
                return Err(GameError::WrongPlayer { last: last.player, got: turn.player });
            }
        }
        let mut turns = self.turns.clone();
        turns.push(turn);
        Ok(Play { turns })
    }

    pub fn turns(&self) -> &[Turn] {
        &self.turns
    }

    pub fn moves(&self) -> impl Iterator<Item = &Move> {
        self.turns.iter().flat_map(|t| t.moves.iter())
    }

    pub fn move_count(&self) -> usize {
        self.turns.iter().map(|t| t.moves.len()).sum()
    }

    pub fn len(&self) -> usize {
        self.turns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.turns.is_empty()
    }

    pub fn last_player(&self) -> Option<Player> {
        self.turns.last().map(|t| t.player)
    }

    /// Every move prefix of the play, from the empty prefix to the full play.
    pub fn move_prefixes(&self) -> Vec<Play> {
        let moves: Vec<Move> = self.moves().cloned().collect();
        (0..=moves.len())
            .map(|n| Play::from_moves(moves[..n].to_vec()).expect("prefix of a valid play"))
            .collect()
    }
}

/// Flips every player label; payloads and order are unchanged.
pub fn dual(p: &Play) -> Play {
    Play { turns: p.turns.iter().map(Turn::dual).collect() }
}

impl fmt::Display for Play {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.turns.iter().map(|t| t.to_string()).collect();
        f.write_str(&parts.join(" "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn turn(p: Player, payloads: &[&str]) -> Turn {
        Turn::of(p, payloads).unwrap()
    }

    #[test]
    fn extend_from_empty() {
        let p = Play::empty().extend(turn(Player::Zero, &["m"])).unwrap();
        assert_eq!(p.len(), 1);
    }

    #[test]
    fn extend_rejects_same_player() {
        let p = Play::empty().extend(turn(Player::Zero, &["m"])).unwrap();
        let err = p.extend(turn(Player::Zero, &["m"])).unwrap_err();
        assert!(err.to_string().starts_with("wrong player"));
        // input unchanged
        assert_eq!(p.len(), 1);
    }

    #[test]
    fn extend_with_move_string() {
        let p = Play::empty()
            .extend(turn(Player::Zero, &["m"]))
            .unwrap()
            .extend(turn(Player::One, &["m1", "m2"]))
            .unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p.turns()[1].payloads(), vec!["m1", "m2"]);
    }

    #[test]
    fn empty_turn_rejected() {
        assert_eq!(Turn::new(Player::Zero, vec![]).unwrap_err().to_string(), "empty turn");
    }

    #[test]
    fn attack_needs_target() {
        let mut m = Move::new("x", Player::One);
        m.attack_kind = AttackKind::Evidence;
        assert!(matches!(Turn::new(Player::One, vec![m]), Err(GameError::UntargetedAttack(_))));
    }

    #[test]
    fn dual_flips_speakers() {
        assert_eq!(dual(&Play::empty()), Play::empty());
        let p = Play::from_turns(vec![
            turn(Player::Zero, &["a"]),
            turn(Player::One, &["b"]),
            turn(Player::Zero, &["c"]),
        ])
        .unwrap();
        let d = dual(&p);
        let speakers: Vec<Player> = d.turns().iter().map(Turn::player).collect();
        assert_eq!(speakers, vec![Player::One, Player::Zero, Player::One]);
        assert_eq!(d.moves().map(|m| m.payload.clone()).collect::<Vec<_>>(), vec!["a", "b", "c"]);
        assert!(d.moves().zip(p.moves()).all(|(x, y)| x.player == y.player.opponent()));
        assert_eq!(dual(&d), p);
    }

    #[test]
    fn from_moves_groups_runs() {
        let moves = vec![
            Move::new("a", Player::One),
            Move::new("b", Player::One),
            Move::new("c", Player::Zero),
        ];
        let p = Play::from_moves(moves).unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p.move_count(), 3);
        assert_eq!(p.move_prefixes().len(), 4);
    }
}
