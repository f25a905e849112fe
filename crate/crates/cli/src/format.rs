//! Game and partition text formats.
//!
//! A game file starts with `<fohgs|eohgs> <n> [symmetric]`, followed by
//! `friend i j`, `stranger i j` or `enemy i j` lines with 1-indexed agents.
//! Symmetric files list each unordered pair once. Unlisted pairs are
//! enemies and `#` starts a comment.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use hgs_core::{AgentId, Coalition, Game, GameBuilder, Orientation, Partition, RelationKind};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CliError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("{0}")]
    Invalid(#[from] hgs_core::Error),
    #[error("partition: {0}")]
    Partition(String),
    #[error("cannot read {0}")]
    Io(String),
}

fn syntax(line: usize, message: impl Into<String>) -> CliError {
    CliError::Syntax {
        line,
        message: message.into(),
    }
}

fn orientation_name(o: Orientation) -> &'static str {
    match o {
        Orientation::FriendOriented => "fohgs",
        Orientation::EnemyOriented => "eohgs",
    }
}

fn kind_name(k: RelationKind) -> &'static str {
    match k {
        RelationKind::Friend => "friend",
        RelationKind::Enemy => "enemy",
        RelationKind::Stranger => "stranger",
    }
}

fn parse_agent(token: &str, n: usize, line: usize) -> Result<usize, CliError> {
    let a: usize = token
        .parse()
        .map_err(|_| syntax(line, format!("expected an agent number, got `{token}`")))?;
    if a == 0 || a > n {
        return Err(syntax(line, format!("agent {a} out of range 1..={n}")));
    }
    Ok(a - 1)
}

pub fn parse_game(text: &str) -> Result<Game, CliError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (header_line, header) = lines
        .next()
        .ok_or_else(|| syntax(1, "missing header line"))?;
    let words: Vec<&str> = header.split_whitespace().collect();
    let orientation = match words.first().map(|w| w.to_ascii_lowercase()).as_deref() {
        Some("fohgs") => Orientation::FriendOriented,
        Some("eohgs") => Orientation::EnemyOriented,
        _ => {
            return Err(syntax(
                header_line,
                "header must start with `fohgs` or `eohgs`",
            ))
        }
    };
    let n: usize = words
        .get(1)
        .and_then(|w| w.parse().ok())
        .ok_or_else(|| syntax(header_line, "header needs an agent count"))?;
    let symmetric = match words.get(2).copied() {
        None => false,
        Some("symmetric") => true,
        Some(other) => {
            return Err(syntax(
                header_line,
                format!("unexpected `{other}` in header"),
            ))
        }
    };
    if words.len() > 3 {
        return Err(syntax(header_line, "header has trailing words"));
    }

    let mut draft = GameBuilder::new(orientation, n).symmetric(symmetric);
    for (line, body) in lines {
        let words: Vec<&str> = body.split_whitespace().collect();
        let [kind, i, j] = words[..] else {
            return Err(syntax(line, "expected `friend|stranger|enemy <i> <j>`"));
        };
        let kind = match kind.to_ascii_lowercase().as_str() {
            "friend" => RelationKind::Friend,
            "stranger" => RelationKind::Stranger,
            "enemy" => RelationKind::Enemy,
            other => return Err(syntax(line, format!("unknown relation `{other}`"))),
        };
        let (i, j) = (parse_agent(i, n, line)?, parse_agent(j, n, line)?);
        if i == j {
            return Err(syntax(
                line,
                format!("agent {} cannot relate to itself", i + 1),
            ));
        }
        if let Some(previous) = draft.get(i, j) {
            return Err(syntax(
                line,
                format!(
                    "pair ({}, {}) already listed as {}",
                    i + 1,
                    j + 1,
                    kind_name(previous)
                ),
            ));
        }
        if symmetric {
            draft.set_mutual(i, j, kind);
        } else {
            draft.set(i, j, kind);
        }
    }
    Ok(draft.fill_unset(RelationKind::Enemy).build()?)
}

pub fn write_game(game: &Game) -> String {
    let n = game.agent_count();
    let symmetric = game.symmetric_flag();
    let mut out = format!("{} {}", orientation_name(game.orientation()), n);
    if symmetric {
        out.push_str(" symmetric");
    }
    out.push('\n');
    for i in 0..n {
        for j in 0..n {
            if i == j || (symmetric && j < i) {
                continue;
            }
            let kind = game.relation(AgentId(i), AgentId(j));
            if kind != RelationKind::Enemy {
                let _ = writeln!(out, "{} {} {}", kind_name(kind), i + 1, j + 1);
            }
        }
    }
    out
}

/// Parses brace groups such as `{1,2} {3}` into a partition of `n` agents.
pub fn parse_partition(text: &str, n: usize) -> Result<Partition, CliError> {
    let bad = |m: String| CliError::Partition(m);
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        let body = rest
            .strip_prefix('{')
            .ok_or_else(|| bad(format!("expected `{{` at `{rest}`")))?;
        let close = body.find('}').ok_or_else(|| bad("unclosed `{`".into()))?;
        let mut group = Vec::new();
        for token in body[..close]
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
        {
            let a: usize = token
                .parse()
                .map_err(|_| bad(format!("`{token}` is not an agent number")))?;
            if a == 0 || a > n {
                return Err(bad(format!("agent {a} out of range 1..={n}")));
            }
            group.push(a - 1);
        }
        if group.is_empty() {
            return Err(bad("empty coalition `{}`".into()));
        }
        groups.push(group);
        rest = body[close + 1..].trim_start_matches(|c: char| c.is_whitespace() || c == ',');
    }
    let mut seen = BTreeSet::new();
    for a in groups.iter().flatten() {
        if !seen.insert(*a) {
            return Err(bad(format!("agent {} appears twice", a + 1)));
        }
    }
    Partition::from_coalitions(
        n,
        groups
            .iter()
            .map(|g| g.iter().map(|&a| AgentId(a)).collect::<Coalition>()),
    )
    .map_err(|e| bad(e.to_string()))
}

/// JSON form of a game.
#[derive(Debug, Serialize)]
pub struct GameDoc {
    pub orientation: &'static str,
    pub agents: usize,
    pub symmetric: bool,
    pub friends: Vec<[usize; 2]>,
    pub strangers: Vec<[usize; 2]>,
}

impl GameDoc {
    pub fn new(game: &Game) -> Self {
        let n = game.agent_count();
        let symmetric = game.symmetric_flag();
        let mut doc = GameDoc {
            orientation: orientation_name(game.orientation()),
            agents: n,
            symmetric,
            friends: Vec::new(),
            strangers: Vec::new(),
        };
        for i in 0..n {
            for j in 0..n {
                if i == j || (symmetric && j < i) {
                    continue;
                }
                match game.relation(AgentId(i), AgentId(j)) {
                    RelationKind::Friend => doc.friends.push([i + 1, j + 1]),
                    RelationKind::Stranger => doc.strangers.push([i + 1, j + 1]),
                    RelationKind::Enemy => {}
                }
            }
        }
        doc
    }
}

pub fn coalition_list(c: Coalition) -> Vec<usize> {
    c.iter().map(|a| a.0 + 1).collect()
}

pub fn partition_lists(p: &Partition) -> Vec<Vec<usize>> {
    p.coalitions().iter().map(|&c| coalition_list(c)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const STAR: &str = "eohgs 3 symmetric\nfriend 1 2\nfriend 1 3\nstranger 2 3\n";

    #[test]
    fn parses_the_star() {
        let g = parse_game(STAR).unwrap();
        assert_eq!(g.orientation(), Orientation::EnemyOriented);
        assert_eq!(g.relation(AgentId(1), AgentId(2)), RelationKind::Stranger);
        assert_eq!(g.relation(AgentId(2), AgentId(0)), RelationKind::Friend);
        assert!(g.is_symmetric());
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let g =
            parse_game("# two strangers\n\nfohgs 2 symmetric # header\nstranger 1 2\n").unwrap();
        assert!(g.has_strangers());
    }

    #[test]
    fn out_of_range_agents_are_located() {
        let err = parse_game("fohgs 2 symmetric\nfriend 1 3\n").unwrap_err();
        assert_eq!(err.to_string(), "line 2: agent 3 out of range 1..=2");
    }

    #[test]
    fn other_syntax_errors() {
        for (text, line) in [
            ("", 1),
            ("xohgs 2", 1),
            ("fohgs", 1),
            ("fohgs 2 sym", 1),
            ("fohgs 2\nfriend 1", 2),
            ("fohgs 2\nlikes 1 2", 2),
            ("fohgs 2\nfriend 1 1", 2),
            ("fohgs 3 symmetric\nfriend 1 2\nstranger 2 1", 3),
        ] {
            match parse_game(text) {
                Err(CliError::Syntax { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?} gave {other:?}"),
            }
        }
    }

    #[test]
    fn validation_failures_surface() {
        assert!(matches!(parse_game("fohgs 0"), Err(CliError::Invalid(_))));
    }

    #[test]
    fn asymmetric_files_list_ordered_pairs() {
        let g = parse_game("fohgs 2\nfriend 1 2\nstranger 2 1\n").unwrap();
        assert_eq!(g.relation(AgentId(0), AgentId(1)), RelationKind::Friend);
        assert_eq!(g.relation(AgentId(1), AgentId(0)), RelationKind::Stranger);
        assert_eq!(write_game(&g), "fohgs 2\nfriend 1 2\nstranger 2 1\n");
    }

    #[test]
    fn partitions_parse_and_fail() {
        let p = parse_partition("{1,2} {3}", 3).unwrap();
        assert_eq!(p.to_string(), "{1,2} {3}");
        assert_eq!(parse_partition(" {3},{2, 1} ", 3).unwrap(), p);
        for bad in [
            "{1,1}",
            "{1,2}",
            "{1,2,3,4}",
            "{1,2} 3",
            "{1,2",
            "{} {1,2,3}",
            "{a,2,3}",
        ] {
            assert!(parse_partition(bad, 3).is_err(), "{bad}");
        }
    }

    fn arb_game() -> impl Strategy<Value = Game> {
        (
            prop_oneof![
                Just(Orientation::FriendOriented),
                Just(Orientation::EnemyOriented)
            ],
            1usize..7,
            any::<bool>(),
            proptest::collection::vec(0u8..3, 36),
        )
            .prop_map(|(o, n, symmetric, kinds)| {
                let mut draft = GameBuilder::new(o, n).symmetric(symmetric);
                let mut k = 0;
                for i in 0..n {
                    for j in 0..n {
                        if i == j || (symmetric && j < i) {
                            continue;
                        }
                        let kind = [
                            RelationKind::Friend,
                            RelationKind::Enemy,
                            RelationKind::Stranger,
                        ][kinds[k] as usize];
                        k += 1;
                        if symmetric {
                            draft.set_mutual(i, j, kind);
                        } else {
                            draft.set(i, j, kind);
                        }
                    }
                }
                draft.build().unwrap()
            })
    }

    proptest! {
        #[test]
        fn game_files_round_trip(game in arb_game()) {
            let text = write_game(&game);
            let back = parse_game(&text).unwrap();
            prop_assert_eq!(&back, &game);
            prop_assert_eq!(write_game(&back), text);
        }

        #[test]
        fn partitions_round_trip(labels in proptest::collection::vec(0usize..4, 1..8)) {
            let p = Partition::from_labels(&labels);
            prop_assert_eq!(parse_partition(&p.to_string(), labels.len()).unwrap(), p);
        }
    }
}
