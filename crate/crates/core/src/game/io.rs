//! Plain-text game and partition files.
//!
//! Additive game: `p ahg <n> [sym]`, then `v <i> <j> <value>` lines; with
//! `sym`, each unordered pair appears once and is mirrored on load.
//! Boolean game: `p bhg <n>`, then `g <i> <infix formula>` per agent.
//! Partition: one block per line, space-separated agent ids.
//! Agent ids are 0-based everywhere. `c` lines are comments.

use std::fmt::Write as _;

use super::goal::parse_goal;
use super::{AdditiveGame, BooleanGame, Coalition, GameError, Goal, Partition};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct GameParseError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> GameParseError {
    GameParseError {
        line,
        message: message.into(),
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            None
        } else {
            Some((i + 1, line))
        }
    })
}

pub fn parse_additive_game(text: &str) -> Result<AdditiveGame, GameError> {
    let mut lines = content_lines(text);
    let (line_no, header) = lines.next().ok_or_else(|| err(1, "empty file"))?;
    let mut parts = header.split_whitespace();
    if parts.next() != Some("p") || parts.next() != Some("ahg") {
        return Err(err(line_no, "expected header `p ahg <n> [sym]`").into());
    }
    let n: usize = parts
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| err(line_no, "expected agent count"))?;
    let symmetric = match parts.next() {
        None => false,
        Some("sym") => true,
        Some(tok) => return Err(err(line_no, format!("unexpected token `{tok}`")).into()),
    };
    if n > Coalition::MAX_AGENTS {
        return Err(err(line_no, format!("{n} agents exceed the 64 agent limit")).into());
    }
    let mut game = AdditiveGame::new(n);
    for (line_no, line) in lines {
        let mut parts = line.split_whitespace();
        if parts.next() != Some("v") {
            return Err(err(line_no, "expected `v <i> <j> <value>`").into());
        }
        let mut int = |what: &str| -> Result<i64, GameParseError> {
            parts
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| err(line_no, format!("expected {what}")))
        };
        let i = int("agent id")?;
        let j = int("agent id")?;
        let value = int("value")?;
        let check = |a: i64| -> Result<usize, GameParseError> {
            usize::try_from(a)
                .ok()
                .filter(|&a| a < n)
                .ok_or_else(|| err(line_no, format!("agent id {a} out of range for {n} agents")))
        };
        let (i, j) = (check(i)?, check(j)?);
        if i == j {
            return Err(err(line_no, "self-valuation is not allowed").into());
        }
        if symmetric {
            game.set_symmetric_value(i, j, value);
        } else {
            game.set_value(i, j, value);
        }
    }
    Ok(game)
}

/// When `symmetric` is requested the table must actually be symmetric and
/// each unordered pair is written once.
pub fn format_additive_game(game: &AdditiveGame, symmetric: bool) -> String {
    let mut out = String::new();
    let n = game.n();
    if symmetric {
        debug_assert!(game.check_symmetry_and_sparsity().0);
        writeln!(out, "p ahg {n} sym").unwrap();
        for i in 0..n {
            for &(j, v) in game.valuations_of(i) {
                if i < j {
                    writeln!(out, "v {i} {j} {v}").unwrap();
                }
            }
        }
    } else {
        writeln!(out, "p ahg {n}").unwrap();
        for i in 0..n {
            for &(j, v) in game.valuations_of(i) {
                writeln!(out, "v {i} {j} {v}").unwrap();
            }
        }
    }
    out
}

pub fn parse_boolean_game(text: &str) -> Result<BooleanGame, GameError> {
    let mut lines = content_lines(text);
    let (line_no, header) = lines.next().ok_or_else(|| err(1, "empty file"))?;
    let mut parts = header.split_whitespace();
    if parts.next() != Some("p") || parts.next() != Some("bhg") {
        return Err(err(line_no, "expected header `p bhg <n>`").into());
    }
    let n: usize = parts
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| err(line_no, "expected agent count"))?;
    if parts.next().is_some() {
        return Err(err(line_no, "trailing tokens after header").into());
    }
    let mut goals: Vec<Option<Goal>> = vec![None; n];
    for (line_no, line) in lines {
        let rest = line
            .strip_prefix('g')
            .ok_or_else(|| err(line_no, "expected `g <i> <formula>`"))?
            .trim_start();
        let (id_tok, formula_text) = rest
            .split_once(char::is_whitespace)
            .ok_or_else(|| err(line_no, "expected `g <i> <formula>`"))?;
        let agent: usize = id_tok
            .parse()
            .map_err(|_| err(line_no, format!("bad agent id `{id_tok}`")))?;
        if agent >= n {
            return Err(err(line_no, format!("agent id {agent} out of range")).into());
        }
        if goals[agent].is_some() {
            return Err(err(line_no, format!("duplicate goal for agent {agent}")).into());
        }
        let goal = parse_goal(formula_text).map_err(|e| err(line_no, e.to_string()))?;
        goals[agent] = Some(goal);
    }
    let goals = goals
        .into_iter()
        .enumerate()
        .map(|(agent, g)| g.ok_or(GameError::MissingGoal(agent)))
        .collect::<Result<Vec<_>, _>>()?;
    BooleanGame::new(goals)
}

pub fn format_boolean_game(game: &BooleanGame) -> String {
    let mut out = String::new();
    writeln!(out, "p bhg {}", game.n()).unwrap();
    for agent in 0..game.n() {
        writeln!(out, "g {agent} {}", game.goal(agent)).unwrap();
    }
    out
}

/// Parse a partition over `n` agents: one block per line.
pub fn parse_partition(text: &str, n: usize) -> Result<Partition, GameError> {
    let mut blocks = Vec::new();
    for (line_no, line) in content_lines(text) {
        let mut members = Vec::new();
        for tok in line.split_whitespace() {
            let agent: usize = tok
                .parse()
                .map_err(|_| err(line_no, format!("bad agent id `{tok}`")))?;
            if agent >= n {
                return Err(err(line_no, format!("agent id {agent} out of range")).into());
            }
            members.push(agent);
        }
        blocks.push(Coalition::from_members(members));
    }
    Partition::new(n, blocks)
}

pub fn format_partition(partition: &Partition) -> String {
    let mut out = String::new();
    for block in partition.blocks() {
        let ids: Vec<String> = block.members().map(|a| a.to_string()).collect();
        writeln!(out, "{}", ids.join(" ")).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn additive_round_trip_symmetric() {
        let text = "p ahg 3 sym\nv 0 1 20\nv 1 2 -100\n";
        let g = parse_additive_game(text).unwrap();
        assert_eq!(g.value(1, 0), 20);
        assert_eq!(g.value(2, 1), -100);
        assert_eq!(format_additive_game(&g, true), text);
    }

    #[test]
    fn additive_asymmetric() {
        let g = parse_additive_game("p ahg 2\nv 0 1 5\n").unwrap();
        assert_eq!(g.value(0, 1), 5);
        assert_eq!(g.value(1, 0), 0);
    }

    #[test]
    fn boolean_round_trip() {
        let text = "p bhg 3\ng 0 (1 | 2) & !0\ng 1 !2\ng 2 0 -> 1\n";
        let g = parse_boolean_game(text).unwrap();
        let round = format_boolean_game(&g);
        let again = parse_boolean_game(&round).unwrap();
        for agent in 0..3 {
            assert_eq!(g.goal(agent), again.goal(agent));
        }
    }

    #[test]
    fn boolean_missing_goal_rejected() {
        let e = parse_boolean_game("p bhg 2\ng 0 1\n").unwrap_err();
        assert!(matches!(e, GameError::MissingGoal(1)));
    }

    #[test]
    fn partition_round_trip() {
        let p = parse_partition("0 2\n1\n", 3).unwrap();
        assert_eq!(p.blocks().len(), 2);
        assert_eq!(format_partition(&p), "0 2\n1\n");
        assert!(parse_partition("0\n", 2).is_err());
        assert!(parse_partition("0 1\n1\n", 2).is_err());
    }
}
