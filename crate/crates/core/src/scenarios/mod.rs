//! Scenario documents: loading, validation and the built-in examples.

pub mod doc;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::analysis::{AttackEntry, AttackScript, Grounds, TruthGame};
use crate::discourse::{
    completions, Cdu, CompletionReport, History, RelationInstance, UnderspecifiedForm, Unit,
};
use crate::epistemic::{Distribution, KernelKey, Profile, StrategyTable, TypeSpace};
use crate::game::{GameError, GameTree, Jury, Play, Turn, Verdict};
use crate::rational::{self, Rational};
use crate::Player;

use doc::{LeafDoc, MoveDoc, ScenarioDoc, TurnDoc};

pub const BUILTIN_NAMES: [&str; 4] = ["sheehan", "lepen", "march_for_science", "truth_toy"];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScenarioError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("dangling reference: {kind} `{id}` in {context}")]
    Dangling { kind: &'static str, id: String, context: String },
    #[error("illegal script: {0}")]
    IllegalScript(String),
    #[error("{what} sums to {sum}, not 1 (deficit {deficit})")]
    NotNormalized { what: String, sum: String, deficit: String },
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error("unknown scenario `{name}`; valid names: {}", valid.join(", "))]
    UnknownBuiltin { name: String, valid: Vec<String> },
}

/// A leaf rule for the finite game built over the script.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LeafRule {
    Jury,
    PosteriorThreshold { player_type: String, threshold: Rational, above: Player },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveSpec {
    pub jury_type: String,
    pub options: [Vec<String>; 2],
    pub leaf: LeafRule,
}

/// A loaded, validated scenario.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameSpec {
    pub id: String,
    pub units: Vec<Unit>,
    /// Relation catalog by id.
    pub relations: BTreeMap<String, RelationInstance>,
    pub ulfs: Vec<UnderspecifiedForm>,
    pub completions: BTreeMap<String, CompletionReport>,
    pub vocabulary: Vec<String>,
    pub type_space: TypeSpace,
    pub prefix: Play,
    /// Turns of each scripted round after the prefix.
    pub rounds: Vec<Vec<Turn>>,
    pub juries: BTreeMap<String, Jury>,
    pub scores: BTreeMap<String, BTreeMap<String, BTreeMap<usize, Rational>>>,
    pub designated_player: Player,
    pub truth_game: Option<TruthGame>,
    pub solve: Option<SolveSpec>,
    doc: ScenarioDoc,
}

impl GameSpec {
    pub fn doc(&self) -> &ScenarioDoc {
        &self.doc
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.doc).expect("scenario documents serialize")
    }

    pub fn ulf(&self, id: &str) -> Option<&UnderspecifiedForm> {
        self.ulfs.iter().find(|u| u.id == id)
    }

    pub fn completion_report(&self, ulf: &str) -> Option<&CompletionReport> {
        self.completions.get(ulf)
    }

    pub fn history(&self, ulf: &str, index: usize) -> Option<&History> {
        self.completions.get(ulf)?.get(index).map(|c| &c.history)
    }

    pub fn jury(&self, jt: &str) -> Option<&Jury> {
        self.juries.get(jt)
    }

    /// Score of completion `index` of `ulf` for jury type `jt`.
    pub fn score(&self, jt: &str, ulf: &str, index: usize) -> Option<&Rational> {
        self.scores.get(jt)?.get(ulf)?.get(&index)
    }

    /// Scripted turns after the prefix, in order.
    pub fn scripted_turns(&self) -> Vec<Turn> {
        self.rounds.iter().flatten().cloned().collect()
    }

    /// The full scripted play: prefix followed by the first `n` rounds.
    pub fn play_after(&self, n: usize) -> Play {
        let mut play = self.prefix.clone();
        for turn in self.rounds.iter().take(n).flatten() {
            play = play.extend(turn.clone()).expect("script validated at load");
        }
        play
    }

    /// Splits the turns after the prefix into rounds of the scripted shape.
    pub fn rounds_of(&self, play: &Play) -> Vec<Vec<Turn>> {
        let per_round = self.rounds.first().map(Vec::len).unwrap_or(1).max(1);
        let after: Vec<Turn> = play.turns()[self.prefix.len().min(play.len())..].to_vec();
        after.chunks(per_round).map(<[Turn]>::to_vec).collect()
    }

    /// The finite game of `depth` turns after the prefix described by the
    /// scenario's `solve` section.
    pub fn game_tree(&self, depth: usize) -> Result<GameTree, ScenarioError> {
        let solve = self.solve.as_ref().ok_or_else(|| ScenarioError::Invalid("scenario has no solve section".into()))?;
        let available = self.scripted_turns().len();
        if depth > available {
            return Err(ScenarioError::Invalid(format!(
                "depth {depth} exceeds the {available} scripted turns"
            )));
        }
        let options = solve.options.clone();
        let expand = move |p: &Play| -> Vec<Turn> {
            let mover = p.last_player().map(Player::opponent).unwrap_or(Player::Zero);
            options[mover.index()]
                .iter()
                .map(|m| Turn::of(mover, &[m.as_str()]).expect("nonempty turn"))
                .collect()
        };
        let classify = |p: &Play| self.classify_leaf(solve, p);
        GameTree::build(self.prefix.clone(), depth, &expand, &classify).map_err(|e| ScenarioError::Invalid(e.to_string()))
    }

    fn classify_leaf(&self, solve: &SolveSpec, p: &Play) -> Verdict {
        match &solve.leaf {
            LeafRule::Jury => match self.jury(&solve.jury_type) {
                Some(j) => crate::game::evaluate_win(j, p),
                None => Verdict::Undecided,
            },
            LeafRule::PosteriorThreshold { player_type, threshold, above } => {
                let rounds = self.rounds_of(p);
                let i = self.designated_player.index();
                let posterior = self
                    .type_space
                    .prior(&solve.jury_type)
                    .ok()
                    .and_then(|prior| crate::epistemic::condition(prior, |x| self.type_space.compatible_profile(x, &rounds)).ok());
                let exceeds = posterior.is_some_and(|d| &d.mass(|x| &x.types[i] == player_type) > threshold);
                Verdict::Win(if exceeds { *above } else { above.opponent() })
            }
        }
    }
}

fn parse_error(e: serde_json::Error) -> ScenarioError {
    ScenarioError::Parse { line: e.line(), column: e.column(), message: e.to_string() }
}

/// Parses and validates a scenario document.
pub fn load_scenario(text: &str) -> Result<GameSpec, ScenarioError> {
    let doc: ScenarioDoc = serde_json::from_str(text).map_err(parse_error)?;
    from_doc(doc)
}

pub fn builtin(name: &str) -> Result<GameSpec, ScenarioError> {
    let text = match name {
        "sheehan" => include_str!("../../scenarios/sheehan.json"),
        "lepen" => include_str!("../../scenarios/lepen.json"),
        "march_for_science" => include_str!("../../scenarios/march_for_science.json"),
        "truth_toy" => include_str!("../../scenarios/truth_toy.json"),
        _ => {
            return Err(ScenarioError::UnknownBuiltin {
                name: name.to_string(),
                valid: BUILTIN_NAMES.iter().map(|s| s.to_string()).collect(),
            })
        }
    };
    load_scenario(text)
}

fn dangling(kind: &'static str, id: &str, context: impl Into<String>) -> ScenarioError {
    ScenarioError::Dangling { kind, id: id.to_string(), context: context.into() }
}

fn normalized<K: Ord + Clone>(
    what: String,
    weights: Vec<(K, Rational)>,
) -> Result<Distribution<K>, ScenarioError> {
    let sum: Rational = weights.iter().map(|(_, w)| w.clone()).sum();
    if sum != rational::one() {
        return Err(ScenarioError::NotNormalized {
            what,
            deficit: (rational::one() - &sum).to_string(),
            sum: sum.to_string(),
        });
    }
    Distribution::new(weights).map_err(|e| ScenarioError::Invalid(e.to_string()))
}

pub fn from_doc(doc: ScenarioDoc) -> Result<GameSpec, ScenarioError> {
    // Units.
    let mut units: Vec<Unit> = doc.units.iter().cloned().map(Unit::Edu).collect();
    units.extend(doc.cdus.iter().map(|c| Unit::Cdu(Cdu { id: c.id.clone(), members: c.members.clone() })));
    let mut seen = BTreeSet::new();
    for u in &units {
        if !seen.insert(u.id().to_string()) {
            return Err(ScenarioError::Invalid(format!("duplicate unit id `{}`", u.id())));
        }
    }
    for c in &doc.cdus {
        for m in &c.members {
            if !seen.contains(m) {
                return Err(dangling("unit", m, format!("members of `{}`", c.id)));
            }
        }
    }
    let unit_by_id: BTreeMap<&str, &Unit> = units.iter().map(|u| (u.id(), u)).collect();

    // Relation catalog.
    let mut relations = BTreeMap::new();
    for r in &doc.relations {
        for end in [&r.source, &r.target] {
            if !unit_by_id.contains_key(end.as_str()) {
                return Err(dangling("unit", end, format!("relation `{}`", r.id)));
            }
        }
        let inst = RelationInstance::new(r.relation, r.source.clone(), r.target.clone()).with_content(&r.content);
        if relations.insert(r.id.clone(), inst).is_some() {
            return Err(ScenarioError::Invalid(format!("duplicate relation id `{}`", r.id)));
        }
    }

    // ULFs and their completions.
    let mut ulfs = Vec::new();
    let mut reports = BTreeMap::new();
    for u in &doc.ulfs {
        let context = format!("ulf `{}`", u.id);
        let scope: Vec<String> = match &u.units {
            Some(ids) => ids.clone(),
            None => units.iter().map(|x| x.id().to_string()).collect(),
        };
        let mut ulf_units = Vec::new();
        for id in &scope {
            let unit = unit_by_id.get(id.as_str()).ok_or_else(|| dangling("unit", id, context.clone()))?;
            ulf_units.push((*unit).clone());
        }
        let rel = |id: &String| relations.get(id).cloned().ok_or_else(|| dangling("relation", id, context.clone()));
        let fixed = u.fixed.iter().map(rel).collect::<Result<Vec<_>, _>>()?;
        let slots = u
            .slots
            .iter()
            .map(|s| s.iter().map(rel).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        let form = UnderspecifiedForm {
            id: u.id.clone(),
            order: u.order.clone().unwrap_or_else(|| {
                ulf_units.iter().filter(|x| matches!(x, Unit::Edu(_))).map(|x| x.id().to_string()).collect()
            }),
            units: ulf_units,
            fixed,
            slots,
        };
        form.check().map_err(|e| ScenarioError::Invalid(e.to_string()))?;
        if reports.contains_key(&form.id) {
            return Err(ScenarioError::Invalid(format!("duplicate ulf id `{}`", form.id)));
        }
        reports.insert(form.id.clone(), completions(&form));
        ulfs.push(form);
    }
    let surviving: BTreeMap<String, Vec<usize>> = reports.iter().map(|(k, r)| (k.clone(), r.indices())).collect();

    // Types and strategies.
    let player_types = doc.types.players.clone();
    let jury_types = doc.types.jury.clone();
    for (i, ts) in player_types.iter().enumerate() {
        if ts.is_empty() {
            return Err(ScenarioError::Invalid(format!("player {i} has no types")));
        }
    }
    if jury_types.is_empty() {
        return Err(ScenarioError::Invalid("no jury types".into()));
    }
    if let Some(b) = &doc.types.bijection {
        for (a, c) in b {
            if !player_types[0].contains(a) {
                return Err(dangling("type", a, "bijection"));
            }
            if !player_types[1].contains(c) {
                return Err(dangling("type", c, "bijection"));
            }
        }
    }
    let vocabulary = doc.vocabulary.moves.clone();
    let mut strategies = Vec::new();
    for s in &doc.strategies {
        for (round, payload) in &s.moves {
            if *round == 0 {
                return Err(ScenarioError::Invalid(format!("strategy `{}` uses round 0; rounds start at 1", s.id)));
            }
            if !vocabulary.contains(payload) {
                return Err(dangling("move", payload, format!("strategy `{}`", s.id)));
            }
        }
        if strategies.iter().any(|t: &StrategyTable| t.id == s.id) {
            return Err(ScenarioError::Invalid(format!("duplicate strategy id `{}`", s.id)));
        }
        strategies.push(StrategyTable { id: s.id.clone(), owner: s.owner, moves: s.moves.clone() });
    }

    // Priors.
    let mut priors = BTreeMap::new();
    for jt in &jury_types {
        let entries = doc.priors.get(jt).ok_or_else(|| dangling("prior", jt, "priors"))?;
        let mut weights = Vec::new();
        for e in entries {
            for i in 0..2 {
                if !player_types[i].contains(&e.types[i]) {
                    return Err(dangling("type", &e.types[i], format!("prior of `{jt}`")));
                }
                if let Some(s) = &e.strategies[i] {
                    match strategies.iter().find(|t| &t.id == s) {
                        Some(t) if t.owner.index() == i => {}
                        Some(_) => {
                            return Err(ScenarioError::Invalid(format!(
                                "strategy `{s}` in prior of `{jt}` is not owned by player {i}"
                            )))
                        }
                        None => return Err(dangling("strategy", s, format!("prior of `{jt}`"))),
                    }
                }
            }
            let profile = Profile { types: e.types.clone(), strategies: e.strategies.clone() };
            weights.push((profile, e.p.0.clone()));
        }
        priors.insert(jt.clone(), normalized(format!("prior of `{jt}`"), weights)?);
    }
    for jt in doc.priors.keys() {
        if !jury_types.contains(jt) {
            return Err(dangling("jury type", jt, "priors"));
        }
    }

    // Kernels.
    let mut kernels = BTreeMap::new();
    for k in &doc.kernels {
        let context = format!("kernel for `{}` on `{}`", k.jury_type, k.ulf);
        if !jury_types.contains(&k.jury_type) {
            return Err(dangling("jury type", &k.jury_type, context));
        }
        for i in 0..2 {
            if !player_types[i].contains(&k.types[i]) {
                return Err(dangling("type", &k.types[i], context.clone()));
            }
        }
        let valid = surviving.get(&k.ulf).ok_or_else(|| dangling("ulf", &k.ulf, context.clone()))?;
        for idx in k.dist.keys() {
            if !valid.contains(idx) {
                return Err(dangling("completion", &idx.to_string(), context.clone()));
            }
        }
        let weights = k.dist.iter().map(|(i, p)| (*i, p.0.clone())).collect();
        let dist = normalized(context.clone(), weights)?;
        let key = KernelKey { jury_type: k.jury_type.clone(), types: k.types.clone(), ulf: k.ulf.clone() };
        if kernels.insert(key, dist).is_some() {
            return Err(ScenarioError::Invalid(format!("duplicate {context}")));
        }
    }
    for (ulf, valid) in &surviving {
        if valid.len() < 2 {
            continue;
        }
        for (jt, prior) in &priors {
            for types in prior.marginal(|p| p.types.clone()).support() {
                let key = KernelKey { jury_type: jt.clone(), types: types.clone(), ulf: ulf.clone() };
                if !kernels.contains_key(&key) {
                    return Err(ScenarioError::Invalid(format!(
                        "kernel gap: no entry for jury type `{jt}`, types ({}, {}), ulf `{ulf}`",
                        types[0], types[1]
                    )));
                }
            }
        }
    }

    let type_space = TypeSpace {
        player_types,
        jury_types: jury_types.clone(),
        strategies,
        priors,
        kernels,
        bijection: doc.types.bijection.clone(),
        completions: surviving.clone(),
    };

    // Script.
    let is_payload = |p: &str| unit_by_id.contains_key(p) || vocabulary.iter().any(|v| v == p);
    let to_turn = |t: &TurnDoc, context: &str| -> Result<Turn, ScenarioError> {
        for m in &t.moves {
            if !is_payload(m.payload()) {
                return Err(dangling("move", m.payload(), context.to_string()));
            }
        }
        Turn::new(t.player, t.moves.iter().map(|m| m.to_move(t.player)).collect())
            .map_err(|e| ScenarioError::IllegalScript(format!("{context}: {e}")))
    };
    let mut play = Play::empty();
    for (i, t) in doc.script.prefix.iter().enumerate() {
        let turn = to_turn(t, &format!("prefix turn {}", i + 1))?;
        play = play.extend(turn).map_err(|e| ScenarioError::IllegalScript(format!("prefix turn {}: {e}", i + 1)))?;
    }
    let prefix = play.clone();
    let mut rounds = Vec::new();
    for (r, turns) in doc.script.rounds.iter().enumerate() {
        let mut round = Vec::new();
        for t in turns {
            let turn = to_turn(t, &format!("round {}", r + 1))?;
            play = play
                .extend(turn.clone())
                .map_err(|e: GameError| ScenarioError::IllegalScript(format!("round {}: {e}", r + 1)))?;
            round.push(turn);
        }
        rounds.push(round);
    }

    // Juries and scores.
    for jt in doc.jury.win.keys() {
        if !jury_types.contains(jt) {
            return Err(dangling("jury type", jt, "jury.win"));
        }
    }
    let mut scores = BTreeMap::new();
    for (jt, per_ulf) in &doc.jury.scores {
        if !jury_types.contains(jt) {
            return Err(dangling("jury type", jt, "jury.scores"));
        }
        let mut out = BTreeMap::new();
        for (ulf, table) in per_ulf {
            let valid = surviving.get(ulf).ok_or_else(|| dangling("ulf", ulf, "jury.scores"))?;
            for idx in table.keys() {
                if !valid.contains(idx) {
                    return Err(dangling("completion", &idx.to_string(), format!("scores of `{jt}` on `{ulf}`")));
                }
            }
            out.insert(ulf.clone(), table.iter().map(|(i, s)| (*i, s.0.clone())).collect());
        }
        scores.insert(jt.clone(), out);
    }

    let truth_game = match &doc.truth_game {
        None => None,
        Some(tg) => Some(load_truth_game(tg, &surviving)?),
    };

    let solve = match &doc.solve {
        None => None,
        Some(s) => {
            if !jury_types.contains(&s.jury_type) {
                return Err(dangling("jury type", &s.jury_type, "solve"));
            }
            for m in s.options.iter().flatten() {
                if !is_payload(m) {
                    return Err(dangling("move", m, "solve options"));
                }
            }
            let leaf = match &s.leaf {
                LeafDoc::Jury => {
                    if !doc.jury.win.contains_key(&s.jury_type) {
                        return Err(dangling("jury", &s.jury_type, "solve"));
                    }
                    LeafRule::Jury
                }
                LeafDoc::PosteriorThreshold { player_type, threshold, above } => {
                    if !type_space.player_types[doc.designated_player.index()].contains(player_type) {
                        return Err(dangling("type", player_type, "solve"));
                    }
                    LeafRule::PosteriorThreshold {
                        player_type: player_type.clone(),
                        threshold: threshold.0.clone(),
                        above: *above,
                    }
                }
            };
            Some(SolveSpec { jury_type: s.jury_type.clone(), options: s.options.clone(), leaf })
        }
    };

    Ok(GameSpec {
        id: doc.id.clone(),
        units,
        relations,
        ulfs,
        completions: reports,
        vocabulary,
        type_space,
        prefix,
        rounds,
        juries: doc.jury.win.clone(),
        scores,
        designated_player: doc.designated_player,
        truth_game,
        solve,
        doc,
    })
}

fn load_truth_game(
    tg: &doc::TruthGameDoc,
    surviving: &BTreeMap<String, Vec<usize>>,
) -> Result<TruthGame, ScenarioError> {
    for ulf in [&tg.e_ulf, &tg.a_ulf] {
        match surviving.get(ulf) {
            None => return Err(dangling("ulf", ulf, "truth_game")),
            Some(v) if v.len() != 1 => {
                return Err(ScenarioError::Invalid(format!("truth_game ulf `{ulf}` must have exactly one completion")))
            }
            Some(_) => {}
        }
    }
    let mut priors: [BTreeMap<String, Rational>; 2] = Default::default();
    let mut grounds: [BTreeMap<String, Grounds>; 2] = Default::default();
    for (i, p) in tg.players.iter().enumerate() {
        for (fact, q) in &p.prior {
            if !tg.facts.contains(fact) {
                return Err(dangling("fact", fact, format!("truth_game player {i}")));
            }
            if !rational::in_unit_interval(&q.0) {
                return Err(ScenarioError::Invalid(format!("belief {} in `{fact}` outside [0,1]", q.0)));
            }
            priors[i].insert(fact.clone(), q.0.clone());
        }
        for fact in &tg.facts {
            if !priors[i].contains_key(fact) {
                return Err(ScenarioError::Invalid(format!("truth_game player {i} has no belief in `{fact}`")));
            }
        }
        for (fact, g) in &p.grounds {
            if !tg.facts.contains(fact) {
                return Err(dangling("fact", fact, format!("truth_game grounds of player {i}")));
            }
            grounds[i].insert(fact.clone(), *g);
        }
    }
    let script = |entries: &[doc::ScriptEntryDoc], attacker: Player| -> Result<AttackScript, ScenarioError> {
        entries
            .iter()
            .map(|e| {
                let attack = e.attack.to_move(attacker);
                attack.check().map_err(|err| ScenarioError::Invalid(err.to_string()))?;
                Ok(AttackEntry { attack, rebuttal: e.rebuttal.as_ref().map(|r: &MoveDoc| r.to_move(attacker.opponent())) })
            })
            .collect()
    };
    Ok(TruthGame {
        facts: tg.facts.clone(),
        priors,
        grounds,
        truth_interested: [tg.players[0].truth_interested, tg.players[1].truth_interested],
        e_ulf: tg.e_ulf.clone(),
        a_ulf: tg.a_ulf.clone(),
        against_e: script(&tg.against_e, Player::One)?,
        against_a: script(&tg.against_a, Player::Zero)?,
        disinterested: tg.disinterested,
    })
}
