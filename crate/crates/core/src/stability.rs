//! Stability checks and exhaustive stable-partition search.
//!
//! Both preference representations are score-representable: an agent ranks
//! coalitions by an integer score (additive utility, or 1/0 approval for
//! dichotomous goals). The solver works against the [`ScoredGame`] trait.
//!
//! Search strategy: enumerate individually rational coalitions once, then
//! cover the agent set with disjoint IR coalitions (exact cover with
//! most-constrained-agent-first branching). Blocking checks are restricted
//! to IR coalitions, which is exact: an IR partition can only be (weakly)
//! blocked by an IR coalition, and a non-IR partition is always (weakly)
//! blocked by an IR singleton.

use thiserror::Error;

use crate::game::{AdditiveGame, AgentId, BooleanGame, Coalition, Partition};

pub mod naive;

/// Default cap on agent count for IR-coalition enumeration.
pub const DEFAULT_AGENT_CAP: usize = 26;
/// Default work budget for the stable-partition search.
pub const DEFAULT_BUDGET: u64 = 100_000_000;
/// Cap on agent count for full set-partition enumeration (Bell growth).
pub const PARTITION_ENUM_CAP: usize = 13;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabilityConcept {
    Core,
    StrictCore,
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("{n} agents exceed the configured cap of {cap}")]
    AgentCapExceeded { n: usize, cap: usize },
    #[error("work budget of {budget} exhausted after {work_units} units; result inconclusive")]
    BudgetExceeded { budget: u64, work_units: u64 },
}

/// Integer-score view of a hedonic game: higher score means more preferred,
/// equal scores mean indifference.
pub trait ScoredGame {
    fn agent_count(&self) -> usize;

    /// Score of a coalition for one of its members.
    fn score(&self, agent: AgentId, coalition: Coalition) -> i64;

    fn singleton_score(&self, agent: AgentId) -> i64 {
        self.score(agent, Coalition::singleton(agent))
    }

    /// Pairs that can never share an individually rational coalition;
    /// used to prune subset enumeration.
    fn conflicting(&self, _a: AgentId, _b: AgentId) -> bool {
        false
    }

    /// Whether one agent's presence can affect the other's score. Must be
    /// symmetric. When a coalition splits into groups with no interaction
    /// between them, every member's score must equal its score in its own
    /// group; the solver then restricts blocks and blocking coalitions to
    /// interaction-connected coalitions. The conservative default relates
    /// every pair, which disables the restriction.
    fn interacts(&self, _a: AgentId, _b: AgentId) -> bool {
        true
    }
}

impl ScoredGame for AdditiveGame {
    fn agent_count(&self) -> usize {
        self.n()
    }

    fn score(&self, agent: AgentId, coalition: Coalition) -> i64 {
        self.utility_unchecked(agent, coalition)
    }

    fn singleton_score(&self, _agent: AgentId) -> i64 {
        0
    }

    fn conflicting(&self, a: AgentId, b: AgentId) -> bool {
        // A minus-infinity edge swamps any achievable positive sum.
        self.value(a, b) <= self.minus_infinity() || self.value(b, a) <= self.minus_infinity()
    }

    fn interacts(&self, a: AgentId, b: AgentId) -> bool {
        self.value(a, b) != 0 || self.value(b, a) != 0
    }
}

impl ScoredGame for BooleanGame {
    fn agent_count(&self) -> usize {
        self.n()
    }

    fn score(&self, agent: AgentId, coalition: Coalition) -> i64 {
        self.goal(agent).eval(coalition) as i64
    }

    fn interacts(&self, a: AgentId, b: AgentId) -> bool {
        self.mentions(a, b)
    }
}

/// Outcome of an exhaustive stable-partition search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Stable(Partition),
    NoStablePartition,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub ir_coalitions: usize,
    pub candidates_examined: u64,
    pub work_units: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    pub outcome: Outcome,
    /// A blocking (or weakly blocking) coalition observed during the search,
    /// if any candidate was rejected.
    pub sample_blocker: Option<Coalition>,
    pub stats: SolveStats,
}

#[derive(Debug, Clone, Copy)]
pub struct SolverConfig {
    pub agent_cap: usize,
    pub budget: u64,
    /// Disables internal parallelism. The solver is currently sequential
    /// either way; results are identical regardless of this flag.
    pub sequential: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            agent_cap: DEFAULT_AGENT_CAP,
            budget: DEFAULT_BUDGET,
            sequential: false,
        }
    }
}

/// IR coalition table with per-member scores, rows in canonical order.
struct IrTable {
    rows: Vec<IrRow>,
    /// Row indices containing each agent, ascending (hence canonical order).
    per_agent: Vec<Vec<u32>>,
}

struct IrRow {
    coalition: Coalition,
    /// Scores aligned with `coalition.members()` order.
    member_scores: Vec<i64>,
}

/// Conflict masks: agents that may never join a set containing i.
fn conflict_masks<G: ScoredGame>(game: &G) -> Vec<u64> {
    let n = game.agent_count();
    (0..n)
        .map(|i| {
            let mut mask = 0u64;
            for j in 0..n {
                if i != j && game.conflicting(i, j) {
                    mask |= 1 << j;
                }
            }
            mask
        })
        .collect()
}

/// Enumerate every conflict-free subset connected in the interaction
/// graph, each exactly once (rooted at its lowest member). Emits the
/// subsets in no particular order.
fn connected_conflict_free_subsets<G: ScoredGame>(game: &G, conflict: &[u64]) -> Vec<Coalition> {
    let n = game.agent_count();
    // symmetrized interaction adjacency
    let mut nbr: Vec<u64> = vec![0; n];
    for i in 0..n {
        for j in (i + 1)..n {
            if game.interacts(i, j) || game.interacts(j, i) {
                nbr[i] |= 1 << j;
                nbr[j] |= 1 << i;
            }
        }
    }

    fn rec(
        nbr: &[u64],
        conflict: &[u64],
        above: u64,
        set: u64,
        ext: u64,
        conflicted: u64,
        banned: u64,
        out: &mut Vec<Coalition>,
    ) {
        out.push(Coalition::from_bits(set));
        let mut ext = ext;
        let mut banned = banned;
        while ext != 0 {
            let u = ext.trailing_zeros() as usize;
            ext &= ext - 1;
            let child_set = set | 1 << u;
            let child_conflicted = conflicted | conflict[u];
            let child_ext =
                (ext | (nbr[u] & above)) & !child_set & !child_conflicted & !banned;
            rec(
                nbr,
                conflict,
                above,
                child_set,
                child_ext,
                child_conflicted,
                banned,
                out,
            );
            banned |= 1 << u;
        }
    }

    let mut out = Vec::new();
    for root in 0..n {
        let above = if root + 1 >= 64 { 0 } else { !0u64 << (root + 1) };
        rec(
            &nbr,
            conflict,
            above,
            1 << root,
            nbr[root] & above & !conflict[root],
            conflict[root],
            0,
            &mut out,
        );
    }
    out
}

/// The solver's working set: connected, conflict-free, individually
/// rational coalitions.
///
/// Restricting to interaction-connected coalitions is exact whenever
/// [`ScoredGame::interacts`] honours its contract: splitting a block into
/// interaction components changes no member's score, so if any stable
/// partition exists one with connected blocks does, and the canonically
/// smallest (weakly) blocking coalition is itself connected, since a
/// disconnected one delegates to the component containing a strictly
/// improving member.
fn build_ir_table<G: ScoredGame>(game: &G, cap: usize) -> Result<IrTable, SolveError> {
    let n = game.agent_count();
    if n > cap || n > Coalition::MAX_AGENTS {
        return Err(SolveError::AgentCapExceeded { n, cap });
    }
    let conflict = conflict_masks(game);
    let mut coalitions: Vec<Coalition> = connected_conflict_free_subsets(game, &conflict)
        .into_iter()
        .filter(|&c| {
            c.members()
                .all(|i| game.score(i, c) >= game.singleton_score(i))
        })
        .collect();
    coalitions.sort();

    let rows: Vec<IrRow> = coalitions
        .into_iter()
        .map(|coalition| IrRow {
            member_scores: coalition.members().map(|i| game.score(i, coalition)).collect(),
            coalition,
        })
        .collect();
    let mut per_agent = vec![Vec::new(); n];
    for (idx, row) in rows.iter().enumerate() {
        for a in row.coalition.members() {
            per_agent[a].push(idx as u32);
        }
    }
    Ok(IrTable { rows, per_agent })
}

/// All non-empty coalitions that are individually rational for every member,
/// in canonical order (size, then lexicographic member order). Unlike the
/// solver's internal table this does not restrict to interaction-connected
/// coalitions.
pub fn enumerate_ir_coalitions<G: ScoredGame>(
    game: &G,
    cap: usize,
) -> Result<Vec<Coalition>, SolveError> {
    let n = game.agent_count();
    if n > cap || n > Coalition::MAX_AGENTS {
        return Err(SolveError::AgentCapExceeded { n, cap });
    }
    let conflict = conflict_masks(game);
    let mut coalitions: Vec<Coalition> = Vec::new();
    // DFS over subsets in increasing agent order, pruning conflicting pairs.
    let mut stack: Vec<(usize, u64, u64)> = vec![(0, 0, 0)]; // (next agent, bits, forbidden)
    while let Some((next, bits, forbidden)) = stack.pop() {
        if next == n {
            if bits != 0 {
                let c = Coalition::from_bits(bits);
                let ir = c
                    .members()
                    .all(|i| game.score(i, c) >= game.singleton_score(i));
                if ir {
                    coalitions.push(c);
                }
            }
            continue;
        }
        stack.push((next + 1, bits, forbidden));
        if forbidden >> next & 1 == 0 {
            stack.push((next + 1, bits | 1 << next, forbidden | conflict[next]));
        }
    }
    coalitions.sort();
    Ok(coalitions)
}

fn current_scores<G: ScoredGame>(game: &G, partition: &Partition) -> Vec<i64> {
    (0..game.agent_count())
        .map(|i| game.score(i, partition.block_of(i).expect("agent in range")))
        .collect()
}

fn row_rejects(row: &IrRow, current: &[i64], concept: StabilityConcept) -> bool {
    match concept {
        StabilityConcept::Core => row
            .coalition
            .members()
            .zip(&row.member_scores)
            .all(|(i, &s)| s > current[i]),
        StabilityConcept::StrictCore => {
            let mut strict = false;
            for (i, &s) in row.coalition.members().zip(&row.member_scores) {
                if s < current[i] {
                    return false;
                }
                strict |= s > current[i];
            }
            strict
        }
    }
}

fn find_rejecting_coalition<G: ScoredGame>(
    game: &G,
    partition: &Partition,
    concept: StabilityConcept,
    cap: usize,
) -> Result<Option<Coalition>, SolveError> {
    let table = build_ir_table(game, cap)?;
    let current = current_scores(game, partition);
    Ok(table
        .rows
        .iter()
        .find(|row| row_rejects(row, &current, concept))
        .map(|row| row.coalition))
}

/// Canonically smallest coalition in which every member strictly prefers the
/// coalition to its current block, if any.
pub fn find_blocking_coalition<G: ScoredGame>(
    game: &G,
    partition: &Partition,
) -> Result<Option<Coalition>, SolveError> {
    find_rejecting_coalition(game, partition, StabilityConcept::Core, Coalition::MAX_AGENTS)
}

/// Canonically smallest coalition every member weakly prefers, with at least
/// one strict preference, if any.
pub fn find_weakly_blocking_coalition<G: ScoredGame>(
    game: &G,
    partition: &Partition,
) -> Result<Option<Coalition>, SolveError> {
    find_rejecting_coalition(
        game,
        partition,
        StabilityConcept::StrictCore,
        Coalition::MAX_AGENTS,
    )
}

pub fn is_stable<G: ScoredGame>(
    game: &G,
    partition: &Partition,
    concept: StabilityConcept,
) -> Result<bool, SolveError> {
    Ok(
        find_rejecting_coalition(game, partition, concept, Coalition::MAX_AGENTS)?.is_none(),
    )
}

/// Exhaustive, exact search for a stable partition.
///
/// Branches over IR coalitions covering the most-constrained unassigned
/// agent. After each placement every IR coalition that just became fully
/// assigned is tested against the (now final) blocks of its members; a hit
/// prunes the subtree. A completed cover has therefore been checked against
/// every IR coalition and is stable.
pub fn find_stable_partition<G: ScoredGame>(
    game: &G,
    concept: StabilityConcept,
    config: &SolverConfig,
) -> Result<SolveResult, SolveError> {
    let n = game.agent_count();
    let table = build_ir_table(game, config.agent_cap)?;
    let full: u64 = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };

    let mut search = Search {
        table: &table,
        concept,
        n,
        full,
        budget: config.budget,
        assigned: 0,
        current: vec![0i64; n],
        chosen: Vec::new(),
        stats: SolveStats {
            ir_coalitions: table.rows.len(),
            candidates_examined: 0,
            work_units: 0,
        },
        sample_blocker: None,
    };

    let found = search.dfs()?;
    let outcome = match found {
        true => {
            let blocks = search
                .chosen
                .iter()
                .map(|&r| table.rows[r as usize].coalition)
                .collect();
            Outcome::Stable(Partition::new(n, blocks).expect("cover is a valid partition"))
        }
        false => Outcome::NoStablePartition,
    };
    Ok(SolveResult {
        outcome,
        sample_blocker: search.sample_blocker,
        stats: search.stats,
    })
}

struct Search<'a> {
    table: &'a IrTable,
    concept: StabilityConcept,
    n: usize,
    full: u64,
    budget: u64,
    assigned: u64,
    current: Vec<i64>,
    chosen: Vec<u32>,
    stats: SolveStats,
    sample_blocker: Option<Coalition>,
}

/// Verdict of one propagation pass over the IR table.
enum Step {
    /// No completion of the current partial cover can be stable.
    Conflict,
    /// Every agent is assigned and no row rejects the finished partition.
    Complete,
    /// Some unassigned agent has exactly one available coalition left.
    Forced(u32),
    /// Branch on this agent (the one with the fewest available coalitions).
    Branch(AgentId),
}

impl Search<'_> {
    fn dfs(&mut self) -> Result<bool, SolveError> {
        let placed_before = self.chosen.len();
        let result = self.dfs_inner();
        // unwind forced placements unless they are part of a found cover
        if !matches!(result, Ok(true)) {
            while self.chosen.len() > placed_before {
                self.unplace(self.chosen[self.chosen.len() - 1]);
            }
        }
        result
    }

    fn dfs_inner(&mut self) -> Result<bool, SolveError> {
        let branch_agent = loop {
            match self.propagate() {
                Step::Conflict => return Ok(false),
                Step::Complete => {
                    self.stats.candidates_examined += 1;
                    return Ok(true);
                }
                Step::Forced(row_idx) => {
                    self.charge()?;
                    self.place(row_idx);
                }
                Step::Branch(agent) => break agent,
            }
        };
        let options: Vec<u32> = self.table.per_agent[branch_agent]
            .iter()
            .copied()
            .filter(|&r| self.table.rows[r as usize].coalition.bits() & self.assigned == 0)
            .collect();
        for row_idx in options {
            self.charge()?;
            self.place(row_idx);
            if self.dfs()? {
                return Ok(true);
            }
            self.unplace(row_idx);
        }
        Ok(false)
    }

    fn charge(&mut self) -> Result<(), SolveError> {
        self.stats.work_units += 1;
        if self.stats.work_units > self.budget {
            return Err(SolveError::BudgetExceeded {
                budget: self.budget,
                work_units: self.stats.work_units,
            });
        }
        Ok(())
    }

    fn place(&mut self, row_idx: u32) {
        let row = &self.table.rows[row_idx as usize];
        self.assigned |= row.coalition.bits();
        for (i, &s) in row.coalition.members().zip(&row.member_scores) {
            self.current[i] = s;
        }
        self.chosen.push(row_idx);
    }

    fn unplace(&mut self, row_idx: u32) {
        let popped = self.chosen.pop();
        debug_assert_eq!(popped, Some(row_idx));
        self.assigned &= !self.table.rows[row_idx as usize].coalition.bits();
    }

    /// One pass over the IR table establishes, for every unassigned agent,
    /// how many coalitions are still available to it and the best score any
    /// of them offers; a second pass detects inevitable blockers.
    ///
    /// A row intersecting the assigned region is an inevitable blocker when
    /// its assigned members already (weakly) prefer it to their final
    /// blocks and its unassigned members cannot reach the score the row
    /// offers them in any still-available coalition: whatever blocks they
    /// end up in, the row rejects the completed partition. On a completed
    /// cover the second pass degenerates into a full stability check.
    fn propagate(&mut self) -> Step {
        let n = self.n;
        let mut available = vec![0u32; n];
        let mut last_row = vec![0u32; n];
        let mut best_score = vec![i64::MIN; n];
        for (idx, row) in self.table.rows.iter().enumerate() {
            if row.coalition.bits() & self.assigned != 0 {
                continue;
            }
            for (i, &s) in row.coalition.members().zip(&row.member_scores) {
                available[i] += 1;
                last_row[i] = idx as u32;
                if s > best_score[i] {
                    best_score[i] = s;
                }
            }
        }
        // an unassigned agent with no available coalition is a dead end
        for agent in 0..n {
            if self.assigned >> agent & 1 == 0 && available[agent] == 0 {
                return Step::Conflict;
            }
        }

        for row in &self.table.rows {
            let bits = row.coalition.bits();
            if bits & self.assigned == 0 {
                continue;
            }
            let mut weakly_ok = true;
            let mut strict = false;
            let mut all_strict = true;
            for (i, &s) in row.coalition.members().zip(&row.member_scores) {
                let reachable = if self.assigned >> i & 1 == 1 {
                    self.current[i]
                } else {
                    best_score[i]
                };
                if s < reachable {
                    weakly_ok = false;
                    break;
                }
                strict |= s > reachable;
                all_strict &= s > reachable;
            }
            if !weakly_ok {
                continue;
            }
            let inevitable = match self.concept {
                StabilityConcept::Core => all_strict,
                StabilityConcept::StrictCore => strict,
            };
            if inevitable {
                self.sample_blocker.get_or_insert(row.coalition);
                return Step::Conflict;
            }
        }

        if self.assigned == self.full {
            return Step::Complete;
        }
        let branch = (0..n)
            .filter(|&a| self.assigned >> a & 1 == 0)
            .min_by_key(|&a| available[a])
            .expect("some agent is unassigned");
        if available[branch] == 1 {
            Step::Forced(last_row[branch])
        } else {
            Step::Branch(branch)
        }
    }
}

/// Every set partition of `[0, n)` exactly once, in restricted-growth-string
/// order.
pub fn enumerate_partitions(n: usize) -> Result<impl Iterator<Item = Partition>, SolveError> {
    if n > PARTITION_ENUM_CAP {
        return Err(SolveError::AgentCapExceeded {
            n,
            cap: PARTITION_ENUM_CAP,
        });
    }
    let mut rgs: Option<Vec<usize>> = Some(vec![0; n]);
    Ok(std::iter::from_fn(move || {
        let current = rgs.take()?;
        let partition = partition_from_rgs(n, &current);
        rgs = next_rgs(current);
        Some(partition)
    }))
}

fn partition_from_rgs(n: usize, rgs: &[usize]) -> Partition {
    if n == 0 {
        return Partition::new(0, Vec::new()).expect("empty partition");
    }
    let block_count = rgs.iter().copied().max().unwrap_or(0) + 1;
    let mut blocks = vec![Coalition::empty(); block_count];
    for (agent, &b) in rgs.iter().enumerate() {
        blocks[b] = blocks[b].with(agent);
    }
    Partition::new(n, blocks).expect("restricted growth string is a valid partition")
}

fn next_rgs(mut rgs: Vec<usize>) -> Option<Vec<usize>> {
    let n = rgs.len();
    if n == 0 {
        return None;
    }
    // Increment the rightmost position that may still grow.
    for i in (1..n).rev() {
        let max_prefix = rgs[..i].iter().copied().max().unwrap_or(0);
        if rgs[i] <= max_prefix {
            rgs[i] += 1;
            for slot in rgs.iter_mut().skip(i + 1) {
                *slot = 0;
            }
            return Some(rgs);
        }
    }
    None
}
