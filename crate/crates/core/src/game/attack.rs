use std::collections::BTreeSet;

use num_traits::{One, Zero};

use super::{GameError, Move, Play};
use crate::rational::{self, Rational};
use crate::Player;

/// Drops the attacks a disinterested jury disregards.
pub fn admissible_attacks(ms: &[Move], disinterested: bool) -> Vec<Move> {
    ms.iter()
        .filter(|m| !(disinterested && m.attack_kind.is_irrelevant_to_evidence()))
        .cloned()
        .collect()
}

/// Share of `attacker`'s attacks that are good: admissible and not answered by
/// a move present in the play. Zero when there are no attacks.
pub fn attack_ratio(p: &Play, attacker: Player, disinterested: bool) -> Rational {
    let ids: BTreeSet<&str> = p.moves().filter_map(|m| m.id.as_deref()).collect();
    let attacks: Vec<Move> = p.moves().filter(|m| m.player == attacker && m.is_attack()).cloned().collect();
    if attacks.is_empty() {
        return rational::zero();
    }
    let good = admissible_attacks(&attacks, disinterested)
        .iter()
        .filter(|m| !m.answered_by.as_deref().is_some_and(|a| ids.contains(a)))
        .count();
    rational::ratio(good as i64, attacks.len() as i64)
}

pub fn attack_ratios(ps: &[Play], attacker: Player, disinterested: bool) -> Vec<Rational> {
    ps.iter().map(|p| attack_ratio(p, attacker, disinterested)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LimitVerdict {
    WinE,
    NotWinE,
    Undecided,
}

impl LimitVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            LimitVerdict::WinE => "win_E",
            LimitVerdict::NotWinE => "not_win_E",
            LimitVerdict::Undecided => "undecided",
        }
    }
}

/// Finite-horizon reading of "the ratio tends to 0" on the first `horizon`
/// values of `ratios`, judged on the trailing `window` of them.
pub fn limit_verdict(
    ratios: &[Rational],
    window: usize,
    epsilon: &Rational,
    horizon: usize,
) -> Result<LimitVerdict, GameError> {
    if horizon > ratios.len() {
        return Err(GameError::HorizonTooLong { horizon, available: ratios.len() });
    }
    if window == 0 || window > horizon {
        return Err(GameError::BadWindow { window, horizon });
    }
    let tail = &ratios[horizon - window..horizon];
    let nonincreasing = tail.windows(2).all(|w| w[1] <= w[0]);
    let nondecreasing = tail.windows(2).all(|w| w[1] >= w[0]);
    let last = &tail[window - 1];
    let min = tail.iter().min().expect("nonempty window");
    Ok(if nonincreasing && last < epsilon {
        LimitVerdict::WinE
    } else if nondecreasing && min >= epsilon {
        LimitVerdict::NotWinE
    } else {
        LimitVerdict::Undecided
    })
}

/// `limit_verdict` over the attack ratios of a prefix chain.
pub fn estimate_limit_win(
    ps: &[Play],
    attacker: Player,
    disinterested: bool,
    window: usize,
    epsilon: &Rational,
    horizon: usize,
) -> Result<LimitVerdict, GameError> {
    limit_verdict(&attack_ratios(ps, attacker, disinterested), window, epsilon, horizon)
}

/// `Σ gamma^n · scorer(move_n)` over moves in play order.
pub fn discounted_score(p: &Play, gamma: &Rational, scorer: impl Fn(&Move) -> Rational) -> Result<Rational, GameError> {
    if gamma < &rational::zero() || gamma >= &Rational::one() {
        return Err(GameError::BadDiscount(gamma.to_string()));
    }
    let mut total = Rational::zero();
    let mut weight = Rational::one();
    for m in p.moves() {
        total += &weight * scorer(m);
        weight *= gamma;
    }
    Ok(total)
}
