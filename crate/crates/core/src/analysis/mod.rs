//! Decision predicates over scenarios: ambiguity, dog whistles, disinterested
//! juries, truth-interested revision, agreement and defensibility.

mod defense;
mod interpretation;
mod truth;

use thiserror::Error;

pub use defense::{
    e_defensible, is_predictive, two_history_outcome, AttackEntry, AttackScript, ExtenderRule, TwoHistoryReport,
    TwoHistoryVerdict,
};
pub use interpretation::{
    check_indifference, is_ambiguous, is_disinterested, is_dog_whistle, live_histories, AmbiguityReport,
    DisinterestReport, DisinterestVerdict, DogWhistleWitness, Indifference, Symmetry,
};
pub use truth::{
    agreement_family, liminf_update, simulate_agreement, sweep_agreement, truth_interested_update, AgreementInstance,
    AgreementOutcome, AgreementStatus, EvidenceOutcome, Grounds, Stance, SweepReport, TruthGame,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("unknown ulf `{0}`")]
    UnknownUlf(String),
    #[error("unknown jury type `{0}`")]
    UnknownJuryType(String),
    #[error("completion {index} is not a valid completion of `{ulf}`")]
    InvalidCompletion { ulf: String, index: usize },
    #[error("no score for completion {index} of `{ulf}` under jury type `{jury_type}`")]
    MissingScore { jury_type: String, ulf: String, index: usize },
    #[error("missing likelihoods for a surviving confirmation")]
    MissingLikelihoods,
    #[error("probability {0} outside [0,1]")]
    BadProbability(String),
    #[error("max_rounds must be positive")]
    ZeroRounds,
    #[error("horizon {horizon} invalid for {available} outcomes")]
    BadHorizon { horizon: usize, available: usize },
    #[error("invalid grid step {0}")]
    BadGrid(String),
    #[error(transparent)]
    Epistemic(#[from] crate::epistemic::EpistemicError),
    #[error(transparent)]
    Discourse(#[from] crate::discourse::DiscourseError),
}
