//! Hedonic games in additive and Boolean (dichotomous) representation,
//! together with coalitions, partitions, and preference queries.

mod goal;
mod io;

pub use goal::{parse_goal, Goal, GoalParseError};
pub use io::{
    format_additive_game, format_boolean_game, format_partition, parse_additive_game,
    parse_boolean_game, parse_partition, GameParseError,
};

use std::cmp::Ordering;
use thiserror::Error;

/// Dense agent index in `[0, n)`.
pub type AgentId = usize;

/// Default concrete stand-in for "minus infinity" valuations.
pub const DEFAULT_MINUS_INFINITY: i64 = -100;

#[derive(Debug, Error)]
pub enum GameError {
    #[error("agent {agent} out of range for {n} agents")]
    AgentOutOfRange { agent: AgentId, n: usize },
    #[error("agent {0} is not a member of the coalition")]
    NotAMember(AgentId),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("agent {0} has no goal formula")]
    MissingGoal(AgentId),
    #[error(
        "minus-infinity constant {minus_infinity} is too small: agent {agent} can gather {positive} from positive valuations"
    )]
    MinusInfinityTooSmall {
        agent: AgentId,
        positive: i64,
        minus_infinity: i64,
    },
    #[error(transparent)]
    Parse(#[from] GameParseError),
}

/// A set of agents with fixed-width bit-vector semantics (at most 64 agents).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Coalition(u64);

impl Coalition {
    pub const MAX_AGENTS: usize = 64;

    pub fn empty() -> Self {
        Coalition(0)
    }

    pub fn singleton(agent: AgentId) -> Self {
        debug_assert!(agent < Self::MAX_AGENTS);
        Coalition(1 << agent)
    }

    pub fn from_members<I: IntoIterator<Item = AgentId>>(members: I) -> Self {
        let mut bits = 0u64;
        for a in members {
            debug_assert!(a < Self::MAX_AGENTS);
            bits |= 1 << a;
        }
        Coalition(bits)
    }

    pub fn from_bits(bits: u64) -> Self {
        Coalition(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn contains(self, agent: AgentId) -> bool {
        agent < Self::MAX_AGENTS && self.0 >> agent & 1 == 1
    }

    pub fn with(self, agent: AgentId) -> Self {
        Coalition(self.0 | 1 << agent)
    }

    pub fn without(self, agent: AgentId) -> Self {
        Coalition(self.0 & !(1 << agent))
    }

    pub fn union(self, other: Self) -> Self {
        Coalition(self.0 | other.0)
    }

    pub fn intersects(self, other: Self) -> bool {
        self.0 & other.0 != 0
    }

    pub fn is_subset_of(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn lowest(self) -> Option<AgentId> {
        if self.0 == 0 {
            None
        } else {
            Some(self.0.trailing_zeros() as AgentId)
        }
    }

    pub fn members(self) -> impl Iterator<Item = AgentId> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let a = bits.trailing_zeros() as AgentId;
                bits &= bits - 1;
                Some(a)
            }
        })
    }
}

/// Canonical order: by size first, then lexicographic on the sorted member
/// list (so for equal sizes the coalition with the smaller lowest member
/// comes first).
impl Ord for Coalition {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.members().cmp(other.members()))
    }
}

impl PartialOrd for Coalition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A disjoint cover of the agent set `[0, n)` by non-empty coalitions.
/// Blocks are normalized to ascending order of their lowest member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    n: usize,
    blocks: Vec<Coalition>,
    block_index: Vec<usize>,
}

impl Partition {
    pub fn new(n: usize, mut blocks: Vec<Coalition>) -> Result<Self, GameError> {
        if n > Coalition::MAX_AGENTS {
            return Err(GameError::InvalidPartition(format!(
                "{n} agents exceed the {} agent limit",
                Coalition::MAX_AGENTS
            )));
        }
        let mut covered = 0u64;
        for block in &blocks {
            if block.is_empty() {
                return Err(GameError::InvalidPartition("empty block".into()));
            }
            if block.bits() & covered != 0 {
                return Err(GameError::InvalidPartition("blocks overlap".into()));
            }
            covered |= block.bits();
        }
        let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        if covered != full {
            return Err(GameError::InvalidPartition(format!(
                "blocks cover {covered:#b}, expected all of [0, {n})"
            )));
        }
        blocks.sort_by_key(|b| b.lowest());
        let mut block_index = vec![0usize; n];
        for (i, block) in blocks.iter().enumerate() {
            for a in block.members() {
                block_index[a] = i;
            }
        }
        Ok(Partition {
            n,
            blocks,
            block_index,
        })
    }

    pub fn singletons(n: usize) -> Self {
        Partition::new(n, (0..n).map(Coalition::singleton).collect()).expect("valid by construction")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Coalition] {
        &self.blocks
    }

    /// The block containing `agent`.
    pub fn block_of(&self, agent: AgentId) -> Result<Coalition, GameError> {
        if agent >= self.n {
            return Err(GameError::AgentOutOfRange { agent, n: self.n });
        }
        Ok(self.blocks[self.block_index[agent]])
    }
}

/// How an agent ranks one coalition against another.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preference {
    PrefersFirst,
    Indifferent,
    PrefersSecond,
}

impl Preference {
    fn from_scores(first: i64, second: i64) -> Self {
        match first.cmp(&second) {
            Ordering::Greater => Preference::PrefersFirst,
            Ordering::Equal => Preference::Indifferent,
            Ordering::Less => Preference::PrefersSecond,
        }
    }
}

/// Additively separable game: integer valuations `v_i(j)`, stored sparsely
/// per agent with neighbors in ascending order. Utility of a coalition is
/// the sum of the member valuations.
#[derive(Debug, Clone)]
pub struct AdditiveGame {
    n: usize,
    valuations: Vec<Vec<(AgentId, i64)>>,
    minus_infinity: i64,
}

impl AdditiveGame {
    pub fn new(n: usize) -> Self {
        Self::with_minus_infinity(n, DEFAULT_MINUS_INFINITY)
    }

    pub fn with_minus_infinity(n: usize, minus_infinity: i64) -> Self {
        assert!(n <= Coalition::MAX_AGENTS);
        AdditiveGame {
            n,
            valuations: vec![Vec::new(); n],
            minus_infinity,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn minus_infinity(&self) -> i64 {
        self.minus_infinity
    }

    pub fn valuations_of(&self, agent: AgentId) -> &[(AgentId, i64)] {
        &self.valuations[agent]
    }

    pub fn set_value(&mut self, from: AgentId, to: AgentId, value: i64) {
        assert!(from < self.n && to < self.n && from != to);
        let row = &mut self.valuations[from];
        match row.binary_search_by_key(&to, |&(j, _)| j) {
            Ok(pos) => {
                if value == 0 {
                    row.remove(pos);
                } else {
                    row[pos].1 = value;
                }
            }
            Err(pos) => {
                if value != 0 {
                    row.insert(pos, (to, value));
                }
            }
        }
    }

    pub fn set_symmetric_value(&mut self, a: AgentId, b: AgentId, value: i64) {
        self.set_value(a, b, value);
        self.set_value(b, a, value);
    }

    pub fn value(&self, from: AgentId, to: AgentId) -> i64 {
        self.valuations[from]
            .binary_search_by_key(&to, |&(j, _)| j)
            .map(|pos| self.valuations[from][pos].1)
            .unwrap_or(0)
    }

    /// Sum of `v_agent(j)` over the other members of the coalition.
    pub fn utility(&self, agent: AgentId, coalition: Coalition) -> Result<i64, GameError> {
        if agent >= self.n {
            return Err(GameError::AgentOutOfRange { agent, n: self.n });
        }
        if !coalition.contains(agent) {
            return Err(GameError::NotAMember(agent));
        }
        Ok(self.utility_unchecked(agent, coalition))
    }

    pub(crate) fn utility_unchecked(&self, agent: AgentId, coalition: Coalition) -> i64 {
        self.valuations[agent]
            .iter()
            .filter(|&&(j, _)| coalition.contains(j))
            .map(|&(_, v)| v)
            .sum()
    }

    pub fn compare(
        &self,
        agent: AgentId,
        first: Coalition,
        second: Coalition,
    ) -> Result<Preference, GameError> {
        Ok(Preference::from_scores(
            self.utility(agent, first)?,
            self.utility(agent, second)?,
        ))
    }

    /// True iff no agent strictly prefers its singleton to its block.
    pub fn is_individually_rational(&self, partition: &Partition) -> Result<bool, GameError> {
        for agent in 0..self.n {
            if self.utility(agent, partition.block_of(agent)?)? < 0 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Whether the valuation table is symmetric, and the maximum per-agent
    /// count of non-zero valuations.
    pub fn check_symmetry_and_sparsity(&self) -> (bool, usize) {
        let symmetric = (0..self.n).all(|i| {
            self.valuations[i]
                .iter()
                .all(|&(j, v)| self.value(j, i) == v)
        });
        let max_degree = self
            .valuations
            .iter()
            .map(|row| row.len())
            .max()
            .unwrap_or(0);
        (symmetric, max_degree)
    }

    /// Checks that positive valuations can never outweigh a single
    /// minus-infinity edge, so that a coalition containing such an edge is
    /// never individually rational.
    pub fn check_minus_infinity_margin(&self) -> Result<(), GameError> {
        for agent in 0..self.n {
            let positive: i64 = self.valuations[agent]
                .iter()
                .map(|&(_, v)| v.max(0))
                .sum();
            if positive + self.minus_infinity >= 0 {
                return Err(GameError::MinusInfinityTooSmall {
                    agent,
                    positive,
                    minus_infinity: self.minus_infinity,
                });
            }
        }
        Ok(())
    }
}

/// Boolean hedonic game: each agent approves exactly the coalitions that
/// satisfy its goal formula over agent atoms.
#[derive(Debug, Clone)]
pub struct BooleanGame {
    n: usize,
    goals: Vec<Goal>,
    /// Per agent, the symmetric closure of "mentions in the goal": bit j is
    /// set when either goal refers to the other agent.
    mention_masks: Vec<u64>,
}

impl BooleanGame {
    pub fn new(goals: Vec<Goal>) -> Result<Self, GameError> {
        let n = goals.len();
        if n > Coalition::MAX_AGENTS {
            return Err(GameError::InvalidPartition(format!(
                "{n} agents exceed the {} agent limit",
                Coalition::MAX_AGENTS
            )));
        }
        for goal in &goals {
            if let Some(atom) = goal.atoms().find(|&a| a >= n) {
                return Err(GameError::AgentOutOfRange { agent: atom, n });
            }
        }
        let mut mention_masks = vec![0u64; n];
        for (agent, goal) in goals.iter().enumerate() {
            for atom in goal.atoms() {
                if atom != agent {
                    mention_masks[agent] |= 1 << atom;
                    mention_masks[atom] |= 1 << agent;
                }
            }
        }
        Ok(BooleanGame {
            n,
            goals,
            mention_masks,
        })
    }

    /// Whether either agent's goal mentions the other; an agent's approval
    /// of a coalition depends only on the members it is related to.
    pub fn mentions(&self, a: AgentId, b: AgentId) -> bool {
        self.mention_masks[a] >> b & 1 == 1
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn goal(&self, agent: AgentId) -> &Goal {
        &self.goals[agent]
    }

    /// A coalition is approved iff the goal holds under "atom j is true
    /// iff j is a member".
    pub fn approves(&self, agent: AgentId, coalition: Coalition) -> Result<bool, GameError> {
        if agent >= self.n {
            return Err(GameError::AgentOutOfRange { agent, n: self.n });
        }
        if !coalition.contains(agent) {
            return Err(GameError::NotAMember(agent));
        }
        Ok(self.goals[agent].eval(coalition))
    }

    pub fn compare(
        &self,
        agent: AgentId,
        first: Coalition,
        second: Coalition,
    ) -> Result<Preference, GameError> {
        Ok(Preference::from_scores(
            self.approves(agent, first)? as i64,
            self.approves(agent, second)? as i64,
        ))
    }

    pub fn is_individually_rational(&self, partition: &Partition) -> Result<bool, GameError> {
        for agent in 0..self.n {
            let here = self.approves(agent, partition.block_of(agent)?)?;
            let alone = self.approves(agent, Coalition::singleton(agent))?;
            if alone && !here {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coalition_canonical_order() {
        let a = Coalition::from_members([0, 3]);
        let b = Coalition::from_members([1, 2]);
        let c = Coalition::singleton(5);
        let mut v = vec![b, a, c];
        v.sort();
        assert_eq!(v, vec![c, a, b]);
    }

    #[test]
    fn partition_validation() {
        let ok = Partition::new(3, vec![Coalition::from_members([0, 2]), Coalition::singleton(1)]);
        assert!(ok.is_ok());
        let overlap = Partition::new(
            2,
            vec![Coalition::from_members([0, 1]), Coalition::singleton(1)],
        );
        assert!(overlap.is_err());
        let gap = Partition::new(3, vec![Coalition::from_members([0, 1])]);
        assert!(gap.is_err());
        let empty = Partition::new(1, vec![Coalition::singleton(0), Coalition::empty()]);
        assert!(empty.is_err());
    }

    #[test]
    fn additive_utility_and_singleton() {
        let mut g = AdditiveGame::new(3);
        g.set_value(0, 1, 20);
        g.set_value(0, 2, -10);
        assert_eq!(g.utility(0, Coalition::from_members([0, 1, 2])).unwrap(), 10);
        assert_eq!(g.utility(0, Coalition::singleton(0)).unwrap(), 0);
        assert!(matches!(
            g.utility(0, Coalition::singleton(1)),
            Err(GameError::NotAMember(0))
        ));
    }

    #[test]
    fn additive_utility_is_additive() {
        let mut g = AdditiveGame::new(4);
        g.set_value(0, 1, 3);
        g.set_value(0, 2, -7);
        g.set_value(0, 3, 5);
        let s = Coalition::from_members([0, 1]);
        for j in 2..4 {
            let before = g.utility(0, s).unwrap();
            let after = g.utility(0, s.with(j)).unwrap();
            assert_eq!(after - before, g.value(0, j));
        }
    }

    #[test]
    fn compare_additive() {
        let mut g = AdditiveGame::new(3);
        g.set_value(0, 1, 34);
        g.set_value(0, 2, 30);
        let s = Coalition::from_members([0, 1]);
        let t = Coalition::from_members([0, 2]);
        assert_eq!(g.compare(0, s, t).unwrap(), Preference::PrefersFirst);
        assert_eq!(g.compare(0, s, s).unwrap(), Preference::Indifferent);
    }

    #[test]
    fn boolean_goal_example() {
        // goal of 0: (1 | 2) & !3
        let goal = Goal::and(
            Goal::or(Goal::atom(1), Goal::atom(2)),
            Goal::not(Goal::atom(3)),
        );
        let g = BooleanGame::new(vec![goal, Goal::atom(1), Goal::atom(2), Goal::atom(3)]).unwrap();
        assert!(g.approves(0, Coalition::from_members([0, 1])).unwrap());
        assert!(!g.approves(0, Coalition::from_members([0, 1, 3])).unwrap());
    }

    #[test]
    fn boolean_compare_dichotomy() {
        let g = BooleanGame::new(vec![Goal::atom(1), Goal::atom(1)]).unwrap();
        let s = Coalition::from_members([0, 1]);
        let alone = Coalition::singleton(0);
        assert_eq!(g.compare(0, s, alone).unwrap(), Preference::PrefersFirst);
        // both approved -> indifferent
        assert_eq!(g.compare(1, s, s).unwrap(), Preference::Indifferent);
    }

    #[test]
    fn boolean_ir_unsatisfied_both_ways() {
        // agent 0 wants agent 1; alone it is unsatisfied, so any block is IR for it
        let g = BooleanGame::new(vec![Goal::atom(1), Goal::not(Goal::atom(0))]).unwrap();
        let p = Partition::new(2, vec![Coalition::from_members([0, 1])]).unwrap();
        // agent 1 is satisfied alone but not here, so the pair is not IR
        assert!(!g.is_individually_rational(&p).unwrap());
        // agent 0 is unsatisfied both here and alone: still IR for agent 0
        let h = BooleanGame::new(vec![Goal::atom(1), Goal::atom(0)]).unwrap();
        assert!(h.is_individually_rational(&p).unwrap());
        assert!(h
            .is_individually_rational(&Partition::singletons(2))
            .unwrap());
    }

    #[test]
    fn additive_ir_checks() {
        let mut g = AdditiveGame::new(2);
        g.set_symmetric_value(0, 1, -100);
        let pair = Partition::new(2, vec![Coalition::from_members([0, 1])]).unwrap();
        assert!(!g.is_individually_rational(&pair).unwrap());
        assert!(g.is_individually_rational(&Partition::singletons(2)).unwrap());
    }

    #[test]
    fn symmetry_and_sparsity() {
        let mut g = AdditiveGame::new(3);
        g.set_value(0, 1, 1);
        assert_eq!(g.check_symmetry_and_sparsity(), (false, 1));
        g.set_value(1, 0, 1);
        assert_eq!(g.check_symmetry_and_sparsity(), (true, 1));
        let empty = AdditiveGame::new(3);
        assert_eq!(empty.check_symmetry_and_sparsity(), (true, 0));
    }
}
