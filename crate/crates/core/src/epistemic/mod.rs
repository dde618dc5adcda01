//! Harsanyi type spaces: priors over type and strategy profiles, interpretation
//! kernels over completions, and Bayesian belief trajectories.

mod distribution;

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::game::Turn;
use crate::rational::{self, Rational};
use crate::scenarios::GameSpec;
use crate::Player;

pub use distribution::{bayes_update, condition, Distribution};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EpistemicError {
    #[error("distribution sums to {sum}, not 1")]
    NotNormalized { sum: String },
    #[error("negative weight {0}")]
    NegativeWeight(String),
    #[error("distribution has empty support")]
    EmptySupport,
    #[error("conditioning on null event")]
    NullEvent,
    #[error("kernel gap: no entry for jury type `{jury_type}`, types ({t0}, {t1}), ulf `{ulf}`")]
    KernelGap { jury_type: String, t0: String, t1: String, ulf: String },
    #[error("completion {0} has zero mixture mass")]
    ZeroMixture(usize),
    #[error("unknown jury type `{0}`")]
    UnknownJuryType(String),
    #[error("script exhausted: {requested} rounds requested, {available} scripted")]
    ScriptExhausted { requested: usize, available: usize },
    #[error("incomparable type sets")]
    IncomparableTypeSets,
}

/// One player's type and strategy for each player. A missing strategy leaves
/// that player unconstrained by play.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Profile {
    pub types: [String; 2],
    pub strategies: [Option<String>; 2],
}

impl Profile {
    pub fn new(t0: &str, s0: Option<&str>, t1: &str, s1: Option<&str>) -> Self {
        Profile {
            types: [t0.to_string(), t1.to_string()],
            strategies: [s0.map(str::to_string), s1.map(str::to_string)],
        }
    }
}

pub type TypeTuple = [String; 2];

/// A pure strategy over the scripted rounds (1-based): the single payload its
/// owner plays in each listed round. Unlisted rounds are unconstrained.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct StrategyTable {
    pub id: String,
    pub owner: Player,
    pub moves: BTreeMap<u32, String>,
}

impl StrategyTable {
    pub fn new(id: &str, owner: Player, moves: &[(u32, &str)]) -> Self {
        StrategyTable { id: id.to_string(), owner, moves: moves.iter().map(|(r, m)| (*r, m.to_string())).collect() }
    }

    /// Whether the owner's moves in each elapsed round match the table.
    pub fn matches(&self, rounds: &[Vec<Turn>]) -> bool {
        rounds.iter().enumerate().all(|(i, turns)| {
            let Some(expected) = self.moves.get(&(i as u32 + 1)) else {
                return true;
            };
            let played: Vec<&str> = turns
                .iter()
                .filter(|t| t.player() == self.owner)
                .flat_map(|t| t.payloads())
                .collect();
            played == [expected.as_str()]
        })
    }
}

/// The tables consistent with the owner's moves in the elapsed rounds.
pub fn compatible(tables: &[StrategyTable], rounds: &[Vec<Turn>]) -> Vec<StrategyTable> {
    tables.iter().filter(|t| t.matches(rounds)).cloned().collect()
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct KernelKey {
    pub jury_type: String,
    pub types: TypeTuple,
    pub ulf: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeSpace {
    pub player_types: [Vec<String>; 2],
    pub jury_types: Vec<String>,
    pub strategies: Vec<StrategyTable>,
    pub priors: BTreeMap<String, Distribution<Profile>>,
    pub kernels: BTreeMap<KernelKey, Distribution<usize>>,
    /// Identification of player 0's types with player 1's.
    pub bijection: Option<BTreeMap<String, String>>,
    /// Surviving completion indices per ULF.
    pub completions: BTreeMap<String, Vec<usize>>,
}

impl TypeSpace {
    pub fn prior(&self, jt: &str) -> Result<&Distribution<Profile>, EpistemicError> {
        self.priors.get(jt).ok_or_else(|| EpistemicError::UnknownJuryType(jt.to_string()))
    }

    pub fn table(&self, id: &str) -> Option<&StrategyTable> {
        self.strategies.iter().find(|t| t.id == id)
    }

    pub fn tables_of(&self, owner: Player) -> Vec<StrategyTable> {
        self.strategies.iter().filter(|t| t.owner == owner).cloned().collect()
    }

    /// Profiles whose strategies are all compatible with the elapsed rounds.
    pub fn compatible_profile(&self, profile: &Profile, rounds: &[Vec<Turn>]) -> bool {
        profile.strategies.iter().flatten().all(|id| self.table(id).is_some_and(|t| t.matches(rounds)))
    }

    /// The compatibility event within the support of `jt`'s prior.
    pub fn event(&self, jt: &str, rounds: &[Vec<Turn>]) -> Result<BTreeSet<Profile>, EpistemicError> {
        Ok(self.prior(jt)?.support().filter(|p| self.compatible_profile(p, rounds)).cloned().collect())
    }
}

/// The kernel entry for the arguments. A ULF with a single completion needs
/// no entry.
pub fn interpret<'a>(
    ts: &'a TypeSpace,
    jt: &str,
    types: &TypeTuple,
    ulf: &str,
) -> Result<std::borrow::Cow<'a, Distribution<usize>>, EpistemicError> {
    let key = KernelKey { jury_type: jt.to_string(), types: types.clone(), ulf: ulf.to_string() };
    if let Some(d) = ts.kernels.get(&key) {
        return Ok(std::borrow::Cow::Borrowed(d));
    }
    match ts.completions.get(ulf).map(Vec::as_slice) {
        Some([only]) => Ok(std::borrow::Cow::Owned(Distribution::point(*only))),
        _ => Err(EpistemicError::KernelGap {
            jury_type: jt.to_string(),
            t0: types[0].clone(),
            t1: types[1].clone(),
            ulf: ulf.to_string(),
        }),
    }
}

/// `Σ_types belief(types) · ξ(jt, types, ulf)`.
pub fn marginal_over_histories(
    ts: &TypeSpace,
    jt: &str,
    belief: &Distribution<TypeTuple>,
    ulf: &str,
) -> Result<Distribution<usize>, EpistemicError> {
    let mut mix: BTreeMap<usize, Rational> = BTreeMap::new();
    for (types, w) in belief.iter() {
        for (h, q) in interpret(ts, jt, types, ulf)?.iter() {
            *mix.entry(*h).or_insert_with(rational::zero) += w * q;
        }
    }
    Distribution::new(mix)
}

/// Posterior over type tuples after observing completion `h`.
pub fn marginal_over_types(
    ts: &TypeSpace,
    jt: &str,
    belief: &Distribution<TypeTuple>,
    ulf: &str,
    h: usize,
) -> Result<Distribution<TypeTuple>, EpistemicError> {
    let mut joint = Vec::new();
    for (types, w) in belief.iter() {
        joint.push((types.clone(), w * interpret(ts, jt, types, ulf)?.weight(&h)));
    }
    Distribution::normalized(joint).map_err(|_| EpistemicError::ZeroMixture(h))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BeliefPoint {
    pub round: usize,
    /// Designated player's types in declared order, zeros kept.
    pub marginal: Vec<(String, Rational)>,
    /// Mass of the compatibility event under the previous belief.
    pub event_mass: Option<Rational>,
    pub posterior: Distribution<Profile>,
}

impl BeliefPoint {
    pub fn probability(&self, player_type: &str) -> Option<&Rational> {
        self.marginal.iter().find(|(t, _)| t == player_type).map(|(_, p)| p)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BeliefTrajectory {
    pub jury_type: String,
    pub designated: Player,
    pub points: Vec<BeliefPoint>,
}

impl BeliefTrajectory {
    /// The designated type's probability at every recorded round.
    pub fn series(&self, player_type: &str) -> Vec<Rational> {
        self.points.iter().filter_map(|p| p.probability(player_type).cloned()).collect()
    }
}

fn type_marginal(ts: &TypeSpace, designated: Player, d: &Distribution<Profile>) -> Vec<(String, Rational)> {
    let i = designated.index();
    ts.player_types[i].iter().map(|t| (t.clone(), d.mass(|p| &p.types[i] == t))).collect()
}

/// Conditions `jt`'s prior on each of the first `n` scripted rounds in turn.
pub fn run_script(
    ts: &TypeSpace,
    jt: &str,
    rounds: &[Vec<Turn>],
    designated: Player,
    n: usize,
) -> Result<BeliefTrajectory, EpistemicError> {
    if n > rounds.len() {
        return Err(EpistemicError::ScriptExhausted { requested: n, available: rounds.len() });
    }
    let mut belief = ts.prior(jt)?.clone();
    let mut points =
        vec![BeliefPoint { round: 0, marginal: type_marginal(ts, designated, &belief), event_mass: None, posterior: belief.clone() }];
    for k in 1..=n {
        let elapsed = &rounds[..k];
        let event = |p: &Profile| ts.compatible_profile(p, elapsed);
        let mass = belief.mass(event);
        belief = condition(&belief, event)?;
        points.push(BeliefPoint {
            round: k,
            marginal: type_marginal(ts, designated, &belief),
            event_mass: Some(mass),
            posterior: belief.clone(),
        });
    }
    Ok(BeliefTrajectory { jury_type: jt.to_string(), designated, points })
}

pub fn run_rounds(spec: &GameSpec, jt: &str, n: usize) -> Result<BeliefTrajectory, EpistemicError> {
    run_script(&spec.type_space, jt, &spec.rounds, spec.designated_player, n)
}

/// Whether `jt`'s prior over type pairs is invariant under exchanging the
/// players' roles through the declared bijection.
pub fn check_prior_symmetry(ts: &TypeSpace, jt: &str) -> Result<bool, EpistemicError> {
    let prior = ts.prior(jt)?;
    let [t0, t1] = &ts.player_types;
    if t0.len() == 1 && t1.len() == 1 {
        return Ok(true);
    }
    let Some(b) = &ts.bijection else {
        return Err(EpistemicError::IncomparableTypeSets);
    };
    let images: BTreeSet<&String> = b.values().collect();
    let domain_ok = t0.len() == t1.len() && t0.iter().all(|t| b.get(t).is_some_and(|u| t1.contains(u)));
    if !domain_ok || images.len() != t1.len() {
        return Err(EpistemicError::IncomparableTypeSets);
    }
    let inverse: BTreeMap<&String, &String> = b.iter().map(|(k, v)| (v, k)).collect();
    let pairs = prior.marginal(|p| p.types.clone());
    for a in t0 {
        for c in t1 {
            let swapped = [inverse[c].clone(), b[a].clone()];
            if pairs.weight(&[a.clone(), c.clone()]) != pairs.weight(&swapped) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SafetyReport {
    pub events_equal: bool,
    pub posteriors_equal: bool,
    pub holds: bool,
    pub note: Option<String>,
}

/// Equal compatibility events must yield equal posteriors.
pub fn safety_check(ts: &TypeSpace, jt: &str, p1: &[Vec<Turn>], p2: &[Vec<Turn>]) -> Result<SafetyReport, EpistemicError> {
    let prior = ts.prior(jt)?;
    let e1 = ts.event(jt, p1)?;
    let e2 = ts.event(jt, p2)?;
    let post1 = bayes_update(prior, &e1).ok();
    let post2 = bayes_update(prior, &e2).ok();
    let events_equal = e1 == e2;
    let posteriors_equal = post1 == post2;
    Ok(SafetyReport {
        events_equal,
        posteriors_equal,
        holds: !events_equal || posteriors_equal,
        note: (!events_equal).then(|| "events differ".to_string()),
    })
}
