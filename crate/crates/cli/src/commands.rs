//! Command implementations. Each returns the text to print and the exit code.

use std::fmt::Write as _;

use hgs_core::exist::{
    construct_n_ins, exists_necessary, exists_possible, search_no_ncs_counterexample, Answer,
    ExistOptions, SearchConstraints, SearchOptions, StrangerPairs,
};
use hgs_core::oracle::{enumerate_partitions, oracle_mode, oracle_resolutions, OracleBudget};
use hgs_core::random::{random_game, RandomGameParams};
use hgs_core::verify::{verify, VerifyOptions};
use hgs_core::{
    utility, AgentId, Coalition, Game, Mode, Notion, Partition, Resolution, ResolutionMode,
    StabilityQuery, Witness,
};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::format::{coalition_list, partition_lists, write_game, CliError, GameDoc};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exit {
    /// Stable, exists, found.
    Success = 0,
    /// Unstable, does not exist, not found.
    Negative = 1,
    InputError = 2,
    BudgetExceeded = 3,
}

#[derive(Debug)]
pub struct Report {
    pub exit: Exit,
    pub text: String,
}

impl Report {
    fn new(exit: Exit, text: String) -> Self {
        Report { exit, text }
    }

    fn json(exit: Exit, value: serde_json::Value) -> Self {
        let mut text = serde_json::to_string_pretty(&value).expect("reports serialize");
        text.push('\n');
        Report { exit, text }
    }
}

/// Maps library errors to the exit-code contract.
pub fn error_report(err: &CliError) -> Report {
    let exit = match err {
        CliError::Invalid(e) => core_exit(e),
        _ => Exit::InputError,
    };
    Report::new(exit, format!("error: {err}\n"))
}

fn core_exit(e: &hgs_core::Error) -> Exit {
    use hgs_core::Error as E;
    match e {
        E::TooManyResolutions { .. }
        | E::TooManyCoalitions { .. }
        | E::TooManyPartitions { .. }
        | E::StepLimit { .. }
        | E::CanonicalFormCap { .. } => Exit::BudgetExceeded,
        _ => Exit::InputError,
    }
}

type CmdResult = Result<Report, CliError>;

fn u(game: &Game, r: &Resolution, i: AgentId, c: Coalition) -> i64 {
    utility(game, r, i, c).expect("witness coalitions contain their agents")
}

fn resolution_pairs(r: &Resolution) -> Vec<serde_json::Value> {
    r.pairs()
        .map(|(i, j, o)| json!({ "from": i.0 + 1, "to": j.0 + 1, "outcome": o.to_string() }))
        .collect()
}

/// Lines comparing both sides of every inequality the witness relies on.
fn witness_lines(game: &Game, p: &Partition, notion: Notion, w: &Witness) -> Vec<String> {
    let mut lines = Vec::new();
    match w {
        Witness::Deviation {
            agent,
            target,
            resolution: r,
        } => {
            let i = *agent;
            let home = p.coalition_of(i);
            let joined = target.with(i);
            lines.push(format!("agent {i} leaves {home} for {joined}"));
            lines.push(format!(
                "agent {i}: u({joined}) = {} > u({home}) = {}",
                u(game, r, i, joined),
                u(game, r, i, home)
            ));
            if matches!(notion, Notion::Is | Notion::Cis) {
                for j in target.iter() {
                    lines.push(format!(
                        "agent {j} admits: u({joined}) = {} >= u({target}) = {}",
                        u(game, r, j, joined),
                        u(game, r, j, *target)
                    ));
                }
            }
            if notion == Notion::Cis {
                let left = home.without(i);
                for k in left.iter() {
                    lines.push(format!(
                        "agent {k} releases: u({left}) = {} >= u({home}) = {}",
                        u(game, r, k, left),
                        u(game, r, k, home)
                    ));
                }
            }
        }
        Witness::Blocking {
            coalition,
            resolution: r,
            weak,
        } => {
            let verb = if *weak { "weakly blocks" } else { "blocks" };
            lines.push(format!("coalition {coalition} {verb}"));
            for i in coalition.iter() {
                let home = p.coalition_of(i);
                let (new, old) = (u(game, r, i, *coalition), u(game, r, i, home));
                let op = if new > old { ">" } else { ">=" };
                lines.push(format!(
                    "agent {i}: u({coalition}) = {new} {op} u({home}) = {old}"
                ));
            }
        }
    }
    lines
}

pub fn run_verify(
    game: &Game,
    p: &Partition,
    query: StabilityQuery,
    opts: &VerifyOptions,
    json: bool,
) -> CmdResult {
    let verdict = verify(game, p, query, opts)?;
    let exit = if verdict.is_stable() {
        Exit::Success
    } else {
        Exit::Negative
    };
    let Some(w) = verdict.witness() else {
        return Ok(if json {
            Report::json(
                exit,
                json!({ "query": query.to_string(), "partition": partition_lists(p), "stable": true }),
            )
        } else {
            Report::new(exit, format!("stable: {p} is {query}\n"))
        });
    };
    let r = w.resolution();
    let utilities: Vec<(AgentId, i64)> = game
        .agents()
        .map(|i| (i, u(game, r, i, p.coalition_of(i))))
        .collect();
    let lines = witness_lines(game, p, query.notion, w);
    if json {
        let witness = match w {
            Witness::Deviation { agent, target, .. } => json!({
                "kind": "deviation", "agent": agent.0 + 1, "target": coalition_list(*target),
            }),
            Witness::Blocking {
                coalition, weak, ..
            } => json!({
                "kind": "blocking", "coalition": coalition_list(*coalition), "weak": weak,
            }),
        };
        return Ok(Report::json(
            exit,
            json!({
                "query": query.to_string(),
                "partition": partition_lists(p),
                "stable": false,
                "witness": witness,
                "resolution": resolution_pairs(r),
                "inequalities": lines,
                "utilities": utilities.iter().map(|(i, v)| json!({ "agent": i.0 + 1, "utility": v })).collect::<Vec<_>>(),
            }),
        ));
    }
    let mut text = format!("unstable: {p} is not {query}\nresolution: {r}\n");
    for l in lines {
        let _ = writeln!(text, "  {l}");
    }
    text.push_str("utilities under this resolution:\n");
    for (i, v) in utilities {
        let _ = writeln!(text, "  agent {i} in {}: {v}", p.coalition_of(i));
    }
    Ok(Report::new(exit, text))
}

pub fn run_exists(
    game: &Game,
    notion: Notion,
    mode: Mode,
    opts: &ExistOptions,
    json: bool,
) -> CmdResult {
    let a = match mode {
        Mode::Possible => exists_possible(game, notion, opts)?,
        Mode::Necessary => exists_necessary(game, notion, opts)?,
    };
    let query = StabilityQuery::new(notion, mode);
    let exit = match a.answer {
        Answer::Exists => Exit::Success,
        Answer::DoesNotExist => Exit::Negative,
        Answer::Unknown => Exit::BudgetExceeded,
    };
    if json {
        return Ok(Report::json(
            exit,
            json!({
                "query": query.to_string(),
                "answer": format!("{:?}", a.answer).to_lowercase(),
                "certificate": a.certificate.as_ref().map(partition_lists),
                "method": a.method.to_string(),
            }),
        ));
    }
    let text = match (&a.answer, &a.certificate) {
        (Answer::Exists, Some(p)) => format!("{query} partition: {p}\nmethod: {}\n", a.method),
        (Answer::DoesNotExist, _) => {
            format!("none: no {query} partition exists\nmethod: {}\n", a.method)
        }
        _ => format!(
            "unknown (cap): {} agents exceed the enumeration cap of {}\n",
            game.agent_count(),
            opts.partition_cap
        ),
    };
    Ok(Report::new(exit, text))
}

pub fn run_construct(game: &Game, json: bool) -> CmdResult {
    let p = construct_n_ins(game);
    Ok(if json {
        Report::json(
            Exit::Success,
            json!({ "query": "N-INS", "partition": partition_lists(&p) }),
        )
    } else {
        Report::new(Exit::Success, format!("{p}\n"))
    })
}

pub fn run_oracle(
    game: &Game,
    p: &Partition,
    query: StabilityQuery,
    budget: &OracleBudget,
    json: bool,
) -> CmdResult {
    let mode = ResolutionMode::default_for(game);
    let stable = oracle_mode(game, p, query, mode, budget)?;
    let count = oracle_resolutions(game, mode, budget)?.len();
    let exit = if stable {
        Exit::Success
    } else {
        Exit::Negative
    };
    Ok(if json {
        Report::json(
            exit,
            json!({ "query": query.to_string(), "partition": partition_lists(p), "stable": stable, "resolutions": count }),
        )
    } else {
        let verdict = if stable { "stable" } else { "unstable" };
        Report::new(
            exit,
            format!("{verdict}: {p} checked against {count} resolutions for {query}\n"),
        )
    })
}

#[derive(Debug, Serialize)]
struct RandomDoc {
    seed: u64,
    game: GameDoc,
}

pub fn run_gen_random(params: &RandomGameParams, seed: u64, json: bool) -> CmdResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let game = random_game(params, &mut rng)?;
    Ok(if json {
        let doc = RandomDoc {
            seed,
            game: GameDoc::new(&game),
        };
        Report::json(
            Exit::Success,
            serde_json::to_value(doc).expect("serializable"),
        )
    } else {
        Report::new(Exit::Success, write_game(&game))
    })
}

/// Searches for a game without a necessarily core stable partition and
/// prints any hit with a per-partition refutation.
pub fn run_search(
    constraints: &SearchConstraints,
    n_max: usize,
    opts: &SearchOptions,
    json: bool,
) -> CmdResult {
    let report = search_no_ncs_counterexample(constraints, n_max, opts)?;
    let examined: Vec<_> = report
        .examined
        .iter()
        .map(|&(n, c)| json!({ "agents": n, "games": c }))
        .collect();
    let Some(hit) = &report.found else {
        let exit = if report.complete {
            Exit::Negative
        } else {
            Exit::BudgetExceeded
        };
        return Ok(if json {
            Report::json(
                exit,
                json!({ "found": false, "complete": report.complete, "searched_up_to": report.searched_up_to, "examined": examined }),
            )
        } else {
            let mut text = format!("none found up to {} agents\n", report.searched_up_to);
            if !report.complete {
                let _ = writeln!(
                    text,
                    "partial: stopped at the partition cap of {} agents (asked for {n_max})",
                    opts.partition_cap
                );
            }
            for (n, c) in &report.examined {
                let _ = writeln!(text, "  {n} agents: {c} games checked");
            }
            Report::new(exit, text)
        });
    };
    let game = &hit.game;
    let query = StabilityQuery::new(Notion::Cs, Mode::Necessary);
    let budget = OracleBudget {
        max_agents: opts.partition_cap,
        ..OracleBudget::default()
    };
    let mut transcript = Vec::new();
    for p in enumerate_partitions(game.agent_count(), &budget)? {
        let verdict = verify(game, &p, query, &opts.verify)?;
        let oracle = oracle_mode(game, &p, query, ResolutionMode::Joint, &budget)?;
        let line = match verdict.witness() {
            Some(Witness::Blocking {
                coalition,
                resolution,
                ..
            }) => {
                format!(
                    "{p}: blocked by {coalition} under {resolution}; oracle: {}",
                    if oracle { "stable" } else { "unstable" }
                )
            }
            _ => format!(
                "{p}: verifier found no blocking coalition; oracle: {}",
                if oracle { "stable" } else { "unstable" }
            ),
        };
        transcript.push(line);
    }
    let confirmed = if hit.oracle_confirmed {
        "confirmed"
    } else {
        "NOT confirmed"
    };
    Ok(if json {
        Report::json(
            Exit::Success,
            json!({ "found": true, "game": GameDoc::new(game), "oracle_confirmed": hit.oracle_confirmed, "examined": examined, "transcript": transcript }),
        )
    } else {
        let mut text = format!(
            "found a {}-agent game with no {query} partition:\n",
            game.agent_count()
        );
        text.push_str(&write_game(game));
        let _ = writeln!(
            text,
            "oracle: {confirmed} over every partition and resolution"
        );
        for l in transcript {
            let _ = writeln!(text, "  {l}");
        }
        Report::new(Exit::Success, text)
    })
}

/// Replaces the stranger-pair count of a preset.
pub fn with_stranger_pairs(
    mut constraints: SearchConstraints,
    pairs: Option<usize>,
) -> SearchConstraints {
    if let Some(k) = pairs {
        constraints.stranger_pairs = StrangerPairs::Exactly(k);
    }
    constraints
}
