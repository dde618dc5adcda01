use std::collections::BTreeSet;

use num_traits::Zero;
use serde::Serialize;

use super::AnalysisError;
use crate::discourse::{entails, semantically_distinct};
use crate::epistemic::{check_prior_symmetry, interpret, EpistemicError};
use crate::game::{dual, evaluate_win, Jury, Move, Play};
use crate::scenarios::GameSpec;
use crate::Player;

/// Completions of `ulf` with positive kernel mass under some type tuple in the
/// support of `jt`'s prior, in index order.
pub fn live_histories(spec: &GameSpec, jt: &str, ulf: &str) -> Result<Vec<usize>, AnalysisError> {
    if spec.ulf(ulf).is_none() {
        return Err(AnalysisError::UnknownUlf(ulf.to_string()));
    }
    let ts = &spec.type_space;
    let prior = ts.prior(jt).map_err(|_| AnalysisError::UnknownJuryType(jt.to_string()))?;
    let mut live = BTreeSet::new();
    for types in prior.marginal(|p| p.types.clone()).support() {
        for (h, w) in interpret(ts, jt, types, ulf)?.iter() {
            if !w.is_zero() {
                live.insert(*h);
            }
        }
    }
    Ok(live.into_iter().collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AmbiguityReport {
    pub ulf: String,
    pub jury_type: String,
    pub live: Vec<usize>,
    /// First semantically distinct pair of live histories, if any.
    pub distinct_pair: Option<(usize, usize)>,
    pub ambiguous: bool,
}

pub fn is_ambiguous(spec: &GameSpec, jt: &str, ulf: &str) -> Result<AmbiguityReport, AnalysisError> {
    let live = live_histories(spec, jt, ulf)?;
    let mut distinct_pair = None;
    'outer: for (i, &a) in live.iter().enumerate() {
        for &b in &live[i + 1..] {
            let ha = spec.history(ulf, a).expect("live index is a completion");
            let hb = spec.history(ulf, b).expect("live index is a completion");
            if semantically_distinct(ha, hb)? {
                distinct_pair = Some((a, b));
                break 'outer;
            }
        }
    }
    Ok(AmbiguityReport {
        ulf: ulf.to_string(),
        jury_type: jt.to_string(),
        ambiguous: live.len() > 1 && distinct_pair.is_some(),
        live,
        distinct_pair,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DogWhistleWitness {
    pub loaded_history: usize,
    pub grammar_history: usize,
    pub affected_jury: String,
    pub denial_available: bool,
}

/// Looks for a live enriched reading that entails `grammar_h` and that some
/// jury in `pool` scores strictly higher.
pub fn is_dog_whistle(
    spec: &GameSpec,
    jt: &str,
    ulf: &str,
    grammar_h: usize,
    pool: &[String],
) -> Result<Option<DogWhistleWitness>, AnalysisError> {
    let report = spec.completion_report(ulf).ok_or_else(|| AnalysisError::UnknownUlf(ulf.to_string()))?;
    let grammar = &report
        .get(grammar_h)
        .ok_or_else(|| AnalysisError::InvalidCompletion { ulf: ulf.to_string(), index: grammar_h })?
        .history;
    let live = live_histories(spec, jt, ulf)?;
    if live.len() < 2 || !live.contains(&grammar_h) {
        return Ok(None);
    }
    for &loaded in live.iter().filter(|&&h| h != grammar_h) {
        let candidate = spec.history(ulf, loaded).expect("live index is a completion");
        if !entails(candidate, grammar)? {
            continue;
        }
        for jury in pool {
            let score = |index: usize| {
                spec.score(jury, ulf, index).cloned().ok_or_else(|| AnalysisError::MissingScore {
                    jury_type: jury.clone(),
                    ulf: ulf.to_string(),
                    index,
                })
            };
            if score(loaded)? > score(grammar_h)? {
                return Ok(Some(DogWhistleWitness {
                    loaded_history: loaded,
                    grammar_history: grammar_h,
                    affected_jury: jury.clone(),
                    denial_available: true,
                }));
            }
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Indifference {
    Pass { plays_checked: usize },
    Counterexample { play: String, dual: String, verdict: String, dual_verdict: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Symmetry {
    Pass,
    Fail,
    Incomparable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DisinterestVerdict {
    NecessaryConditionsMet,
    NotDisinterested,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DisinterestReport {
    pub jury_type: String,
    pub maxlen: usize,
    pub indifference: Indifference,
    pub symmetry: Symmetry,
    pub verdict: DisinterestVerdict,
}

/// Checks `ρ ∈ Win_i ⇔ dual(ρ) ∈ Win_{1-i}` on every nonempty play of at most
/// `maxlen` moves over `vocabulary`, shortest plays first.
pub fn check_indifference(j: &Jury, vocabulary: &[String], maxlen: usize) -> Indifference {
    let letters: Vec<(Player, &str)> =
        Player::BOTH.iter().flat_map(|p| vocabulary.iter().map(move |v| (*p, v.as_str()))).collect();
    let base = letters.len();
    let mut checked = 0;
    if base == 0 {
        return Indifference::Pass { plays_checked: 0 };
    }
    for len in 1..=maxlen {
        let mut digits = vec![0usize; len];
        loop {
            let moves = digits.iter().map(|&d| Move::new(letters[d].1, letters[d].0)).collect();
            let play = Play::from_moves(moves).expect("plain moves group into turns");
            let d = dual(&play);
            checked += 1;
            let symmetric = Player::BOTH.iter().all(|&i| j.holds(i, &play) == j.holds(i.opponent(), &d));
            if !symmetric {
                return Indifference::Counterexample {
                    play: play.to_string(),
                    dual: d.to_string(),
                    verdict: evaluate_win(j, &play).as_str().to_string(),
                    dual_verdict: evaluate_win(j, &d).as_str().to_string(),
                };
            }
            if !advance(&mut digits, base) {
                break;
            }
        }
    }
    Indifference::Pass { plays_checked: checked }
}

/// Odometer step with the last position fastest; false after the last word.
fn advance(digits: &mut [usize], base: usize) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

/// Necessary conditions only: indifference towards player identity and
/// symmetric priors.
pub fn is_disinterested(spec: &GameSpec, jt: &str, maxlen: usize) -> Result<DisinterestReport, AnalysisError> {
    let jury = spec.jury(jt).ok_or_else(|| AnalysisError::UnknownJuryType(jt.to_string()))?;
    let indifference = check_indifference(jury, &spec.vocabulary, maxlen);
    let symmetry = match check_prior_symmetry(&spec.type_space, jt) {
        Ok(true) => Symmetry::Pass,
        Ok(false) => Symmetry::Fail,
        Err(EpistemicError::IncomparableTypeSets) => Symmetry::Incomparable,
        Err(e) => return Err(e.into()),
    };
    let met = matches!(indifference, Indifference::Pass { .. }) && symmetry == Symmetry::Pass;
    Ok(DisinterestReport {
        jury_type: jt.to_string(),
        maxlen,
        indifference,
        symmetry,
        verdict: if met { DisinterestVerdict::NecessaryConditionsMet } else { DisinterestVerdict::NotDisinterested },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{Predicate, WinCondition};

    fn vocab(words: &[&str]) -> Vec<String> {
        words.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn player_zero_always_wins_fails_at_length_one() {
        let j = Jury::win_lose(WinCondition::Finite { predicate: Predicate::Always });
        match check_indifference(&j, &vocab(&["m"]), 3) {
            Indifference::Counterexample { play, .. } => assert_eq!(play, "0:[m]"),
            other => panic!("expected counterexample, got {other:?}"),
        }
    }

    #[test]
    fn last_speaker_pair_is_indifferent() {
        let j = Jury::pair(
            WinCondition::Finite { predicate: Predicate::LastSpeaker(Player::Zero) },
            WinCondition::Finite { predicate: Predicate::LastSpeaker(Player::One) },
        );
        let r = check_indifference(&j, &vocab(&["a", "b"]), 4);
        // 4 + 16 + 64 + 256 sequences.
        assert_eq!(r, Indifference::Pass { plays_checked: 340 });
    }
}
