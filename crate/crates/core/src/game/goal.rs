//! Propositional goal formulas over agent atoms. Evaluation is structural
//! recursion against a coalition bit-vector; no normal-form conversion is
//! performed.

use std::collections::BTreeSet;
use std::fmt;

use super::{AgentId, Coalition};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Goal {
    Atom(AgentId),
    Not(Box<Goal>),
    And(Box<Goal>, Box<Goal>),
    Or(Box<Goal>, Box<Goal>),
    Implies(Box<Goal>, Box<Goal>),
}

impl Goal {
    pub fn atom(agent: AgentId) -> Goal {
        Goal::Atom(agent)
    }

    pub fn not(g: Goal) -> Goal {
        Goal::Not(Box::new(g))
    }

    pub fn and(a: Goal, b: Goal) -> Goal {
        Goal::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Goal, b: Goal) -> Goal {
        Goal::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Goal, b: Goal) -> Goal {
        Goal::Implies(Box::new(a), Box::new(b))
    }

    /// Conjunction of a non-empty list, left-associated.
    pub fn conj<I: IntoIterator<Item = Goal>>(goals: I) -> Goal {
        let mut it = goals.into_iter();
        let first = it.next().expect("conj of empty list");
        it.fold(first, Goal::and)
    }

    /// Disjunction of a non-empty list, left-associated.
    pub fn disj<I: IntoIterator<Item = Goal>>(goals: I) -> Goal {
        let mut it = goals.into_iter();
        let first = it.next().expect("disj of empty list");
        it.fold(first, Goal::or)
    }

    pub fn eval(&self, coalition: Coalition) -> bool {
        match self {
            Goal::Atom(a) => coalition.contains(*a),
            Goal::Not(g) => !g.eval(coalition),
            Goal::And(a, b) => a.eval(coalition) && b.eval(coalition),
            Goal::Or(a, b) => a.eval(coalition) || b.eval(coalition),
            Goal::Implies(a, b) => !a.eval(coalition) || b.eval(coalition),
        }
    }

    /// All atoms occurring in the formula, each once.
    pub fn atoms(&self) -> impl Iterator<Item = AgentId> {
        let mut set = BTreeSet::new();
        self.collect_atoms(&mut set);
        set.into_iter()
    }

    fn collect_atoms(&self, out: &mut BTreeSet<AgentId>) {
        match self {
            Goal::Atom(a) => {
                out.insert(*a);
            }
            Goal::Not(g) => g.collect_atoms(out),
            Goal::And(a, b) | Goal::Or(a, b) | Goal::Implies(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    /// Number of distinct atoms other than `agent` mentioned in the goal.
    pub fn mentioned_others(&self, agent: AgentId) -> usize {
        self.atoms().filter(|&a| a != agent).count()
    }
}

/// Infix rendering with minimal parentheses; precedence `!` > `&` > `|` > `->`,
/// `->` right-associative.
impl fmt::Display for Goal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

impl Goal {
    fn prec(&self) -> u8 {
        match self {
            Goal::Atom(_) => 4,
            Goal::Not(_) => 3,
            Goal::And(..) => 2,
            Goal::Or(..) => 1,
            Goal::Implies(..) => 0,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let p = self.prec();
        let parens = p < min;
        if parens {
            write!(f, "(")?;
        }
        match self {
            Goal::Atom(a) => write!(f, "{a}")?,
            Goal::Not(g) => {
                write!(f, "!")?;
                g.fmt_prec(f, 3)?;
            }
            Goal::And(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, " & ")?;
                b.fmt_prec(f, 3)?;
            }
            Goal::Or(a, b) => {
                a.fmt_prec(f, 1)?;
                write!(f, " | ")?;
                b.fmt_prec(f, 2)?;
            }
            Goal::Implies(a, b) => {
                a.fmt_prec(f, 1)?;
                write!(f, " -> ")?;
                b.fmt_prec(f, 0)?;
            }
        }
        if parens {
            write!(f, ")")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("goal formula, column {column}: {message}")]
pub struct GoalParseError {
    pub column: usize,
    pub message: String,
}

struct GoalParser<'a> {
    input: &'a [u8],
    pos: usize,
}

impl<'a> GoalParser<'a> {
    fn err(&self, message: impl Into<String>) -> GoalParseError {
        GoalParseError {
            column: self.pos + 1,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.input.len() && self.input[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.input.get(self.pos).copied()
    }

    fn eat(&mut self, expected: u8) -> bool {
        if self.peek() == Some(expected) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    // implies := or ('->' implies)?
    fn implies(&mut self) -> Result<Goal, GoalParseError> {
        let left = self.or()?;
        self.skip_ws();
        if self.input[self.pos..].starts_with(b"->") {
            self.pos += 2;
            let right = self.implies()?;
            return Ok(Goal::implies(left, right));
        }
        Ok(left)
    }

    fn or(&mut self) -> Result<Goal, GoalParseError> {
        let mut left = self.and()?;
        while self.peek() == Some(b'|') {
            self.pos += 1;
            left = Goal::or(left, self.and()?);
        }
        Ok(left)
    }

    fn and(&mut self) -> Result<Goal, GoalParseError> {
        let mut left = self.unary()?;
        while self.peek() == Some(b'&') {
            self.pos += 1;
            left = Goal::and(left, self.unary()?);
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Goal, GoalParseError> {
        match self.peek() {
            Some(b'!') => {
                self.pos += 1;
                Ok(Goal::not(self.unary()?))
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.implies()?;
                if !self.eat(b')') {
                    return Err(self.err("expected `)`"));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self
                    .input
                    .get(self.pos)
                    .is_some_and(u8::is_ascii_digit)
                {
                    self.pos += 1;
                }
                let text = std::str::from_utf8(&self.input[start..self.pos]).unwrap();
                text.parse::<AgentId>()
                    .map(Goal::atom)
                    .map_err(|_| self.err(format!("agent id `{text}` out of range")))
            }
            Some(c) => Err(self.err(format!("unexpected character `{}`", c as char))),
            None => Err(self.err("unexpected end of formula")),
        }
    }
}

/// Parse an infix goal formula with integer atoms and operators `! & | ->`.
pub fn parse_goal(text: &str) -> Result<Goal, GoalParseError> {
    let mut parser = GoalParser {
        input: text.as_bytes(),
        pos: 0,
    };
    let goal = parser.implies()?;
    parser.skip_ws();
    if parser.pos != parser.input.len() {
        return Err(parser.err("trailing input after formula"));
    }
    Ok(goal)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_and_associativity() {
        let g = parse_goal("!1 & 2 | 3 -> 4 -> 5").unwrap();
        // ((!1 & 2) | 3) -> (4 -> 5)
        assert_eq!(
            g,
            Goal::implies(
                Goal::or(Goal::and(Goal::not(Goal::atom(1)), Goal::atom(2)), Goal::atom(3)),
                Goal::implies(Goal::atom(4), Goal::atom(5)),
            )
        );
    }

    #[test]
    fn parentheses_override() {
        let g = parse_goal("1 & (2 | 3)").unwrap();
        assert_eq!(
            g,
            Goal::and(Goal::atom(1), Goal::or(Goal::atom(2), Goal::atom(3)))
        );
    }

    #[test]
    fn display_round_trips() {
        let cases = [
            "1 & (2 | 3)",
            "!1 & 2 | 3 -> 4 -> 5",
            "!(1 -> 2)",
            "(1 | 2) & !3",
        ];
        for text in cases {
            let g = parse_goal(text).unwrap();
            assert_eq!(parse_goal(&g.to_string()).unwrap(), g, "case {text}");
        }
    }

    #[test]
    fn parse_errors_have_positions() {
        let e = parse_goal("1 & ").unwrap_err();
        assert_eq!(e.column, 5);
        assert!(parse_goal("1 )").is_err());
        assert!(parse_goal("").is_err());
    }

    #[test]
    fn eval_implies() {
        let g = parse_goal("0 -> 1").unwrap();
        assert!(!g.eval(Coalition::from_members([0])));
        assert!(g.eval(Coalition::from_members([0, 1])));
        assert!(g.eval(Coalition::from_members([2])));
    }
}
