//! Serialized form of a scenario document.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::analysis::Grounds;
use crate::discourse::{Edu, Literal, RelationName};
use crate::game::{AttackKind, Jury, Move};
use crate::rational::Exact;
use crate::Player;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDoc {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub units: Vec<Edu>,
    #[serde(default)]
    pub cdus: Vec<CduDoc>,
    #[serde(default)]
    pub relations: Vec<RelationDoc>,
    pub ulfs: Vec<UlfDoc>,
    #[serde(default)]
    pub vocabulary: VocabularyDoc,
    pub types: TypesDoc,
    #[serde(default)]
    pub strategies: Vec<StrategyDoc>,
    pub priors: BTreeMap<String, Vec<PriorEntry>>,
    #[serde(default)]
    pub kernels: Vec<KernelDoc>,
    #[serde(default)]
    pub script: ScriptDoc,
    #[serde(default)]
    pub jury: JuryDoc,
    pub designated_player: Player,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truth_game: Option<TruthGameDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solve: Option<SolveDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CduDoc {
    pub id: String,
    pub members: Vec<String>,
}

/// A named relation instance that ULFs refer to by id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationDoc {
    pub id: String,
    pub relation: RelationName,
    pub source: String,
    pub target: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub content: Vec<Literal>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UlfDoc {
    pub id: String,
    /// Units in play order; defaults to every declared unit.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<Vec<String>>,
    /// Units (EDUs and CDUs) in scope; defaults to every declared unit.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub units: Option<Vec<String>>,
    #[serde(default)]
    pub fixed: Vec<String>,
    #[serde(default)]
    pub slots: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VocabularyDoc {
    #[serde(default)]
    pub moves: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TypesDoc {
    pub players: [Vec<String>; 2],
    pub jury: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bijection: Option<BTreeMap<String, String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyDoc {
    pub id: String,
    pub owner: Player,
    pub moves: BTreeMap<u32, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriorEntry {
    pub types: [String; 2],
    #[serde(default)]
    pub strategies: [Option<String>; 2],
    pub p: Exact,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelDoc {
    pub jury_type: String,
    pub types: [String; 2],
    pub ulf: String,
    pub dist: BTreeMap<usize, Exact>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScriptDoc {
    #[serde(default)]
    pub prefix: Vec<TurnDoc>,
    #[serde(default)]
    pub rounds: Vec<Vec<TurnDoc>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TurnDoc {
    pub player: Player,
    pub moves: Vec<MoveDoc>,
}

/// A move written as a bare payload or as a full record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MoveDoc {
    Plain(String),
    Full(FullMove),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FullMove {
    pub payload: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    #[serde(default)]
    pub attack_kind: AttackKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attack_target: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub answered_by: Option<String>,
}

impl MoveDoc {
    pub fn payload(&self) -> &str {
        match self {
            MoveDoc::Plain(p) => p,
            MoveDoc::Full(f) => &f.payload,
        }
    }

    pub fn to_move(&self, player: Player) -> Move {
        match self {
            MoveDoc::Plain(p) => Move::new(p.clone(), player),
            MoveDoc::Full(f) => Move {
                id: f.id.clone(),
                payload: f.payload.clone(),
                player,
                attack_kind: f.attack_kind,
                attack_target: f.attack_target.clone(),
                answered_by: f.answered_by.clone(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JuryDoc {
    /// Winning conditions per jury type.
    #[serde(default)]
    pub win: BTreeMap<String, Jury>,
    /// Per jury type, per ULF, a score for each completion index.
    #[serde(default)]
    pub scores: BTreeMap<String, BTreeMap<String, BTreeMap<usize, Exact>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruthGameDoc {
    pub facts: Vec<String>,
    pub players: [TruthPlayerDoc; 2],
    /// ULFs whose single completions are E's (player 0) and A's histories.
    pub e_ulf: String,
    pub a_ulf: String,
    #[serde(default)]
    pub against_e: Vec<ScriptEntryDoc>,
    #[serde(default)]
    pub against_a: Vec<ScriptEntryDoc>,
    #[serde(default)]
    pub disinterested: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruthPlayerDoc {
    pub prior: BTreeMap<String, Exact>,
    #[serde(default)]
    pub grounds: BTreeMap<String, Grounds>,
    pub truth_interested: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScriptEntryDoc {
    pub attack: MoveDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rebuttal: Option<MoveDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveDoc {
    pub jury_type: String,
    /// Single-move turn options per player.
    pub options: [Vec<String>; 2],
    pub leaf: LeafDoc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LeafDoc {
    /// The jury's own winning conditions decide each leaf.
    Jury,
    /// `above` wins when the posterior of `player_type` exceeds `threshold`.
    PosteriorThreshold { player_type: String, threshold: Exact, above: Player },
}
