use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{AnalysisError, AttackScript};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvidenceOutcome {
    ConfirmationSurvives,
    NoSurvivingConfirmation,
    UnrebuttedRefutation,
}

fn check_probability(p: &Rational) -> Result<(), AnalysisError> {
    if rational::in_unit_interval(p) {
        Ok(())
    } else {
        Err(AnalysisError::BadProbability(p.to_string()))
    }
}

/// Revises belief `p` in a claim after one exchange about it. `likelihoods`
/// are `(P(evidence | a), P(evidence | not a))`.
pub fn truth_interested_update(
    p: &Rational,
    o: EvidenceOutcome,
    likelihoods: Option<&(Rational, Rational)>,
) -> Result<Rational, AnalysisError> {
    check_probability(p)?;
    match o {
        EvidenceOutcome::NoSurvivingConfirmation => Ok(p.clone().min(rational::half())),
        EvidenceOutcome::UnrebuttedRefutation => Ok(rational::zero()),
        EvidenceOutcome::ConfirmationSurvives => {
            let (l1, l2) = likelihoods.ok_or(AnalysisError::MissingLikelihoods)?;
            check_probability(l1)?;
            check_probability(l2)?;
            let num = p * l1;
            let den = &num + (rational::one() - p) * l2;
            if den.is_zero() {
                return Ok(p.clone());
            }
            Ok(num / den)
        }
    }
}

/// Minimum of the update chain over the last `ceil(horizon/4)` of its first
/// `horizon` values.
pub fn liminf_update(
    p: &Rational,
    outcomes: &[(EvidenceOutcome, Option<(Rational, Rational)>)],
    horizon: usize,
) -> Result<Rational, AnalysisError> {
    if horizon == 0 || outcomes.len() < horizon {
        return Err(AnalysisError::BadHorizon { horizon, available: outcomes.len() });
    }
    let mut chain = Vec::with_capacity(horizon);
    let mut current = p.clone();
    for (o, l) in &outcomes[..horizon] {
        current = truth_interested_update(&current, *o, l.as_ref())?;
        chain.push(current.clone());
    }
    let window = horizon.div_ceil(4);
    Ok(chain[horizon - window..].iter().min().expect("nonempty window").clone())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Grounds {
    Strong,
    Weak,
}

/// Position on a fact: accepted above 1/2, rejected below, open at 1/2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stance {
    Reject,
    Open,
    Accept,
}

impl Stance {
    pub fn of(p: &Rational) -> Stance {
        match p.cmp(&rational::half()) {
            Ordering::Less => Stance::Reject,
            Ordering::Equal => Stance::Open,
            Ordering::Greater => Stance::Accept,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgreementInstance {
    pub facts: Vec<String>,
    pub priors: [BTreeMap<String, Rational>; 2],
    /// Quality of each player's grounds per fact; missing means strong.
    pub grounds: [BTreeMap<String, Grounds>; 2],
    pub truth_interested: [bool; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AgreementStatus {
    Agreed,
    Disagreed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AgreementOutcome {
    pub status: AgreementStatus,
    /// Each player's history: their stance on every fact.
    pub final_histories: [BTreeMap<String, Stance>; 2],
    #[serde(skip)]
    pub final_beliefs: [BTreeMap<String, Rational>; 2],
    pub rounds_used: usize,
}

fn histories(beliefs: &[BTreeMap<String, Rational>; 2]) -> [BTreeMap<String, Stance>; 2] {
    [0, 1].map(|i| beliefs[i].iter().map(|(f, p)| (f.clone(), Stance::of(p))).collect())
}

/// Attack and defense rounds over contested facts. Each round takes the next
/// contested fact in order. When exactly one player's grounds on it are weak,
/// that player loses the exchange and, if truth-interested, adopts the
/// opponent's belief. Otherwise truth-interested players move to 1/2.
pub fn simulate_agreement(inst: &AgreementInstance, max_rounds: usize) -> Result<AgreementOutcome, AnalysisError> {
    if max_rounds == 0 {
        return Err(AnalysisError::ZeroRounds);
    }
    let mut beliefs = inst.priors.clone();
    for b in &beliefs {
        for p in b.values() {
            check_probability(p)?;
        }
    }
    let grounds = |i: usize, f: &str| inst.grounds[i].get(f).copied().unwrap_or(Grounds::Strong);
    let mut cursor = 0;
    let mut rounds = 0;
    loop {
        let h = histories(&beliefs);
        let contested: Vec<usize> =
            (0..inst.facts.len()).filter(|&k| h[0].get(&inst.facts[k]) != h[1].get(&inst.facts[k])).collect();
        if contested.is_empty() {
            return Ok(AgreementOutcome {
                status: AgreementStatus::Agreed,
                final_histories: h,
                final_beliefs: beliefs,
                rounds_used: rounds,
            });
        }
        if rounds == max_rounds {
            return Ok(AgreementOutcome {
                status: AgreementStatus::Disagreed,
                final_histories: h,
                final_beliefs: beliefs,
                rounds_used: rounds,
            });
        }
        rounds += 1;
        let k = contested.iter().copied().find(|&k| k >= cursor).unwrap_or(contested[0]);
        cursor = k + 1;
        let fact = &inst.facts[k];
        let weak = [grounds(0, fact) == Grounds::Weak, grounds(1, fact) == Grounds::Weak];
        if weak[0] != weak[1] {
            let loser = if weak[0] { 0 } else { 1 };
            if inst.truth_interested[loser] {
                let adopted = beliefs[1 - loser][fact].clone();
                beliefs[loser].insert(fact.clone(), adopted);
            }
        } else {
            for i in 0..2 {
                if inst.truth_interested[i] {
                    beliefs[i].insert(fact.clone(), rational::half());
                }
            }
        }
    }
}

/// Grid `0, step, 2·step, …, 1`.
fn grid(step: &Rational) -> Result<Vec<Rational>, AnalysisError> {
    let bad = || AnalysisError::BadGrid(step.to_string());
    if step <= &rational::zero() || step > &rational::one() {
        return Err(bad());
    }
    let n = rational::one() / step;
    if !n.is_integer() {
        return Err(bad());
    }
    let n: i64 = n.to_integer().try_into().map_err(|_| bad())?;
    Ok((0..=n).map(|k| step * rational::int(k)).collect())
}

const FULL_PRODUCT_LIMIT: usize = 20_000;

/// Instances over `n_facts` facts with beliefs on the grid. When the full
/// product of per-fact belief pairs is small it is enumerated; otherwise each
/// grid pair `(a, b)` is spread over the facts by fixed shifts. Every belief
/// assignment is paired with five grounds patterns: the four uniform ones and
/// one alternating per fact.
pub fn agreement_family(
    n_facts: usize,
    step: &Rational,
    truth_interested: [bool; 2],
) -> Result<Vec<AgreementInstance>, AnalysisError> {
    let values = grid(step)?;
    let m = values.len();
    let facts: Vec<String> = (1..=n_facts).map(|k| format!("f{k}")).collect();
    let pairs = m * m;
    let full = pairs.checked_pow(n_facts as u32).is_some_and(|c| c <= FULL_PRODUCT_LIMIT);
    let mut assignments: Vec<Vec<(usize, usize)>> = Vec::new();
    if full {
        let total = pairs.pow(n_facts as u32);
        for mut code in 0..total {
            let mut row = Vec::with_capacity(n_facts);
            for _ in 0..n_facts {
                let c = code % pairs;
                code /= pairs;
                row.push((c / m, c % m));
            }
            assignments.push(row);
        }
    } else {
        for a in 0..m {
            for b in 0..m {
                assignments.push((0..n_facts).map(|k| ((a + k) % m, (b + 3 * k) % m)).collect());
            }
        }
    }
    let mut out = Vec::with_capacity(assignments.len() * 5);
    for row in &assignments {
        let priors = [0, 1].map(|i| {
            facts
                .iter()
                .zip(row)
                .map(|(f, pair)| (f.clone(), values[if i == 0 { pair.0 } else { pair.1 }].clone()))
                .collect::<BTreeMap<_, _>>()
        });
        for pattern in 0..5 {
            let grounds = [0, 1].map(|i| {
                facts
                    .iter()
                    .enumerate()
                    .map(|(k, f)| {
                        let weak = if pattern < 4 { pattern & (1 << i) != 0 } else { k % 2 == i };
                        (f.clone(), if weak { Grounds::Weak } else { Grounds::Strong })
                    })
                    .collect::<BTreeMap<_, _>>()
            });
            out.push(AgreementInstance { facts: facts.clone(), priors: priors.clone(), grounds, truth_interested });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SweepReport {
    pub instances: usize,
    pub agreed: usize,
    pub max_rounds_used: usize,
    /// Largest `rounds_used - |facts|` among agreed instances.
    pub max_excess_rounds: i64,
}

impl SweepReport {
    pub fn rate(&self) -> Rational {
        if self.instances == 0 {
            return rational::one();
        }
        rational::ratio(self.agreed as i64, self.instances as i64)
    }
}

pub fn sweep_agreement(family: &[AgreementInstance], max_rounds: usize) -> Result<SweepReport, AnalysisError> {
    let mut report = SweepReport { instances: 0, agreed: 0, max_rounds_used: 0, max_excess_rounds: i64::MIN };
    for inst in family {
        let o = simulate_agreement(inst, max_rounds)?;
        report.instances += 1;
        report.max_rounds_used = report.max_rounds_used.max(o.rounds_used);
        if o.status == AgreementStatus::Agreed {
            report.agreed += 1;
            report.max_excess_rounds = report.max_excess_rounds.max(o.rounds_used as i64 - inst.facts.len() as i64);
        }
    }
    if report.agreed == 0 {
        report.max_excess_rounds = 0;
    }
    Ok(report)
}

/// A two-history truth game between E (player 0) and A (player 1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthGame {
    pub facts: Vec<String>,
    pub priors: [BTreeMap<String, Rational>; 2],
    pub grounds: [BTreeMap<String, Grounds>; 2],
    pub truth_interested: [bool; 2],
    pub e_ulf: String,
    pub a_ulf: String,
    /// A's attacks on E's history with E's rebuttals.
    pub against_e: AttackScript,
    /// E's attacks on A's history with A's rebuttals.
    pub against_a: AttackScript,
    pub disinterested: bool,
}

impl TruthGame {
    pub fn instance(&self) -> AgreementInstance {
        AgreementInstance {
            facts: self.facts.clone(),
            priors: self.priors.clone(),
            grounds: self.grounds.clone(),
            truth_interested: self.truth_interested,
        }
    }
}
