//! `megame`: simulations, checks and solvers for Message Exchange games.

use std::io::{self, Write};
use std::path::Path;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use megame_core::analysis::{
    agreement_family, is_ambiguous, is_disinterested, is_dog_whistle, live_histories, sweep_agreement,
    DisinterestVerdict,
};
use megame_core::epistemic::run_rounds;
use megame_core::game::solve_finite;
use megame_core::rational::{self, format_significant};
use megame_core::scenarios::{builtin, load_scenario, GameSpec, BUILTIN_NAMES};

#[derive(Parser)]
#[command(name = "megame", version, about = "Message Exchange game simulations and checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit the jury's belief trajectory over the scripted rounds.
    Run(RunArgs),
    /// Run one of the analysis predicates and print a JSON report.
    Check {
        #[command(subcommand)]
        kind: CheckKind,
    },
    /// List every slot combination of an underspecified form.
    Enumerate {
        scenario: String,
        #[arg(long)]
        ulf: String,
    },
    /// Sweep a prior grid and report how often the players agree.
    Agree(AgreeArgs),
    /// Solve the finite game over the script by backward induction.
    Solve {
        scenario: String,
        #[arg(long)]
        depth: usize,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Builtin scenario name or path to a scenario file.
    scenario: String,
    /// Jury type to simulate; every jury type when omitted.
    #[arg(long)]
    jury_type: Option<String>,
    /// Number of rounds; all scripted rounds when omitted.
    #[arg(long)]
    rounds: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Jsonl,
}

#[derive(Subcommand)]
enum CheckKind {
    /// Necessary conditions for a disinterested jury.
    Disinterested {
        scenario: String,
        #[arg(long)]
        jury_type: String,
        /// Longest move sequence checked for indifference.
        #[arg(long, default_value_t = 4)]
        maxlen: usize,
    },
    /// Search for a dog-whistle witness.
    Dogwhistle {
        scenario: String,
        /// Jury type whose live readings are searched; all when omitted.
        #[arg(long)]
        jury_type: Option<String>,
        /// Defaults to the scenario's first form.
        #[arg(long)]
        ulf: Option<String>,
        /// Completion index of the grammatical reading.
        #[arg(long, default_value_t = 0)]
        grammar: usize,
    },
    /// Whether a form has semantically distinct live readings.
    Ambiguity {
        scenario: String,
        #[arg(long)]
        jury_type: Option<String>,
        #[arg(long)]
        ulf: Option<String>,
    },
    /// Whether every form has at least one coherent completion.
    Coherence {
        scenario: String,
        #[arg(long)]
        ulf: Option<String>,
    },
}

#[derive(Args)]
struct AgreeArgs {
    scenario: String,
    #[arg(long, default_value_t = 10)]
    max_rounds: usize,
    /// Grid step for prior beliefs, as `n/d`.
    #[arg(long, default_value = "1/10")]
    grid: String,
    /// Which players are truth-interested; the scenario's setting when omitted.
    #[arg(long, value_enum)]
    truth_interested: Option<Interested>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Interested {
    Both,
    First,
    Second,
    Neither,
}

impl Interested {
    fn flags(self) -> [bool; 2] {
        match self {
            Interested::Both => [true, true],
            Interested::First => [true, false],
            Interested::Second => [false, true],
            Interested::Neither => [false, false],
        }
    }
}

/// Outcome of a command: 0 positive, 1 negative.
type Status = u8;

fn load(arg: &str) -> Result<GameSpec> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {arg}"))?;
        return load_scenario(&text).with_context(|| format!("loading {arg}"));
    }
    if BUILTIN_NAMES.contains(&arg) {
        return Ok(builtin(arg)?);
    }
    bail!("`{arg}` is neither a scenario file nor a builtin ({})", BUILTIN_NAMES.join(", "))
}

fn jury_types(spec: &GameSpec, requested: Option<&String>) -> Result<Vec<String>> {
    match requested {
        Some(jt) if spec.type_space.jury_types.contains(jt) => Ok(vec![jt.clone()]),
        Some(jt) => bail!("unknown jury type `{jt}`; scenario declares {}", spec.type_space.jury_types.join(", ")),
        None => Ok(spec.type_space.jury_types.clone()),
    }
}

fn ulf_ids(spec: &GameSpec, requested: Option<&String>) -> Result<Vec<String>> {
    match requested {
        Some(u) if spec.ulf(u).is_some() => Ok(vec![u.clone()]),
        Some(u) => bail!("unknown ulf `{u}`"),
        None => Ok(spec.ulfs.iter().map(|u| u.id.clone()).collect()),
    }
}

fn first_ulf(spec: &GameSpec, requested: Option<&String>) -> Result<String> {
    ulf_ids(spec, requested)?.into_iter().next().ok_or_else(|| anyhow!("scenario has no underspecified forms"))
}

fn report(out: &mut impl Write, command: &str, spec: &GameSpec, body: Value, status: Status) -> Result<Status> {
    let doc = json!({ "command": command, "scenario": spec.id, "report": body, "exit_status": status });
    writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
    Ok(status)
}

fn cmd_run(args: &RunArgs, out: &mut impl Write) -> Result<Status> {
    let spec = load(&args.scenario)?;
    let jts = jury_types(&spec, args.jury_type.as_ref())?;
    let rounds = args.rounds.unwrap_or(spec.rounds.len());
    let mut csv_out = csv::Writer::from_writer(Vec::new());
    if let Format::Csv = args.format {
        csv_out.write_record(["round", "jury_type", "player_type", "probability_num", "probability_den", "probability_float"])?;
    }
    for jt in &jts {
        let traj = run_rounds(&spec, jt, rounds)?;
        for point in &traj.points {
            for (ty, p) in &point.marginal {
                match args.format {
                    Format::Csv => csv_out.write_record([
                        point.round.to_string(),
                        jt.clone(),
                        ty.clone(),
                        p.numer().to_string(),
                        p.denom().to_string(),
                        format_significant(p, 12),
                    ])?,
                    Format::Jsonl => {
                        let row = json!({
                            "round": point.round,
                            "jury_type": jt,
                            "player_type": ty,
                            "probability": rational::to_json(p),
                            "probability_float": format_significant(p, 12),
                            "event_mass": point.event_mass.as_ref().map(rational::to_json),
                        });
                        writeln!(out, "{row}")?;
                    }
                }
            }
        }
    }
    if let Format::Csv = args.format {
        out.write_all(&csv_out.into_inner()?)?;
    }
    Ok(0)
}

fn cmd_check(kind: &CheckKind, out: &mut impl Write) -> Result<Status> {
    match kind {
        CheckKind::Disinterested { scenario, jury_type, maxlen } => {
            let spec = load(scenario)?;
            jury_types(&spec, Some(jury_type))?;
            let r = is_disinterested(&spec, jury_type, *maxlen)?;
            let status = if r.verdict == DisinterestVerdict::NecessaryConditionsMet { 0 } else { 1 };
            report(out, "check disinterested", &spec, serde_json::to_value(&r)?, status)
        }
        CheckKind::Dogwhistle { scenario, jury_type, ulf, grammar } => {
            let spec = load(scenario)?;
            let ulf = first_ulf(&spec, ulf.as_ref())?;
            let pool = spec.type_space.jury_types.clone();
            let mut witness = None;
            for jt in jury_types(&spec, jury_type.as_ref())? {
                if let Some(w) = is_dog_whistle(&spec, &jt, &ulf, *grammar, &pool)? {
                    witness = Some((jt, w));
                    break;
                }
            }
            let status = if witness.is_some() { 0 } else { 1 };
            let body = match witness {
                Some((jt, w)) => json!({ "ulf": ulf, "jury_type": jt, "witness": w }),
                None => json!({ "ulf": ulf, "witness": null }),
            };
            report(out, "check dogwhistle", &spec, body, status)
        }
        CheckKind::Ambiguity { scenario, jury_type, ulf } => {
            let spec = load(scenario)?;
            let ulf = first_ulf(&spec, ulf.as_ref())?;
            let mut reports = Vec::new();
            for jt in jury_types(&spec, jury_type.as_ref())? {
                reports.push(is_ambiguous(&spec, &jt, &ulf)?);
            }
            let status = if reports.iter().any(|r| r.ambiguous) { 0 } else { 1 };
            report(out, "check ambiguity", &spec, serde_json::to_value(&reports)?, status)
        }
        CheckKind::Coherence { scenario, ulf } => {
            let spec = load(scenario)?;
            let mut forms = Vec::new();
            let mut ok = true;
            for id in ulf_ids(&spec, ulf.as_ref())? {
                let r = spec.completion_report(&id).expect("known ulf");
                ok &= !r.completions.is_empty();
                forms.push(json!({
                    "ulf": id,
                    "coherent": r.indices(),
                    "dropped": r.dropped,
                }));
            }
            report(out, "check coherence", &spec, json!({ "forms": forms, "coherent": ok }), if ok { 0 } else { 1 })
        }
    }
}

fn cmd_enumerate(scenario: &str, ulf: &str, out: &mut impl Write) -> Result<Status> {
    let spec = load(scenario)?;
    let r = spec.completion_report(ulf).ok_or_else(|| anyhow!("unknown ulf `{ulf}`"))?;
    let live: Vec<(String, Vec<usize>)> = spec
        .type_space
        .jury_types
        .iter()
        .map(|jt| Ok((jt.clone(), live_histories(&spec, jt, ulf)?)))
        .collect::<Result<_>>()?;
    let mut rows: Vec<(usize, Value)> = Vec::new();
    for c in &r.completions {
        let juries: Vec<&String> = live.iter().filter(|(_, l)| l.contains(&c.index)).map(|(jt, _)| jt).collect();
        rows.push((c.index, json!({ "index": c.index, "choices": c.choices, "coherent": true, "live": juries })));
    }
    for d in &r.dropped {
        let kinds: Vec<&str> = d.violations.iter().map(|v| v.kind()).collect();
        rows.push((
            d.index,
            json!({ "index": d.index, "choices": d.choices, "coherent": false, "live": [], "violations": kinds }),
        ));
    }
    rows.sort_by_key(|(i, _)| *i);
    for (_, row) in rows {
        writeln!(out, "{row}")?;
    }
    Ok(0)
}

fn cmd_agree(args: &AgreeArgs, out: &mut impl Write) -> Result<Status> {
    let spec = load(&args.scenario)?;
    if args.max_rounds == 0 {
        bail!("--max-rounds must be positive");
    }
    let step = rational::parse(&args.grid).ok_or_else(|| anyhow!("invalid grid step `{}`", args.grid))?;
    let game = spec.truth_game.as_ref().ok_or_else(|| anyhow!("scenario `{}` has no truth_game section", spec.id))?;
    let flags = args.truth_interested.map(Interested::flags).unwrap_or(game.truth_interested);
    let mut sizes = Vec::new();
    let mut all_agreed = true;
    for n in 1..=game.facts.len() {
        let family = agreement_family(n, &step, flags)?;
        let r = sweep_agreement(&family, args.max_rounds)?;
        all_agreed &= r.agreed == r.instances;
        sizes.push(json!({
            "facts": n,
            "instances": r.instances,
            "agreed": r.agreed,
            "rate": rational::to_json(&r.rate()),
            "max_rounds_used": r.max_rounds_used,
        }));
    }
    let scenario_run = megame_core::analysis::simulate_agreement(
        &megame_core::analysis::AgreementInstance { truth_interested: flags, ..game.instance() },
        args.max_rounds,
    )?;
    let body = json!({
        "truth_interested": flags,
        "grid": step.to_string(),
        "max_rounds": args.max_rounds,
        "sweeps": sizes,
        "scenario_instance": scenario_run,
        "all_agreed": all_agreed,
    });
    report(out, "agree", &spec, body, if all_agreed { 0 } else { 1 })
}

fn cmd_solve(scenario: &str, depth: usize, out: &mut impl Write) -> Result<Status> {
    let spec = load(scenario)?;
    let tree = spec.game_tree(depth)?;
    let sol = solve_finite(&tree)?;
    let strategy: serde_json::Map<String, Value> =
        sol.strategy.iter().map(|(path, turn)| (path.to_string(), Value::from(turn.to_string()))).collect();
    let body = json!({
        "depth": depth,
        "leaves": tree.root.leaf_count(),
        "winner": sol.winner.index(),
        "strategy": strategy,
        "verified": sol.wins_every_playout(&tree),
    });
    report(out, "solve", &spec, body, 0)
}

fn dispatch(cli: &Cli) -> Result<Status> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match &cli.command {
        Command::Run(args) => cmd_run(args, &mut out),
        Command::Check { kind } => cmd_check(kind, &mut out),
        Command::Enumerate { scenario, ulf } => cmd_enumerate(scenario, ulf, &mut out),
        Command::Agree(args) => cmd_agree(args, &mut out),
        Command::Solve { scenario, depth } => cmd_solve(scenario, *depth, &mut out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match dispatch(&cli) {
        Ok(status) => ExitCode::from(status),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
