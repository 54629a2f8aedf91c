//! Constructions from restricted exists-forall DNF formulas to hedonic
//! games, in two flavours: a Boolean game whose strict core is non-empty
//! exactly when the formula is true, and a symmetric sparse additive game
//! for which truth, strict-core existence, and core existence coincide.
//! Also the witness builders used to certify both directions, the
//! feasibility predicate for the additive gadget, and assignment
//! extraction from stable partitions.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::formula::{
    FormulaError, Literal, MatrixKind, OuterQuantifier, QbfFormula, RestrictionReport, VarId,
};
use crate::game::{
    AdditiveGame, AgentId, BooleanGame, Coalition, GameError, Goal, Partition,
};

#[derive(Debug, Error)]
pub enum ReductionError {
    #[error("formula violates the occurrence restrictions: {}", .0.failures().join("; "))]
    NotRestricted(RestrictionReport),
    #[error("formula has the wrong shape: {0}")]
    WrongShape(&'static str),
    #[error("artifact is not a {0} reduction")]
    WrongArtifactKind(&'static str),
    #[error("assignment does not cover variable {0}")]
    MissingAssignment(VarId),
    #[error("clause {0} is not satisfied by the assignment")]
    ClauseUnsatisfied(usize),
    #[error("feasible coalition {0:?} fits neither lemma case")]
    LemmaViolation(Coalition),
    #[error("partition does not have the structure of a stable outcome: {0}")]
    UnexpectedStructure(String),
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Game(#[from] GameError),
}

/// Role of an agent in a reduced game, linking it back to formula structure.
/// Clause indices are 0-based positions in the clause list of the negated
/// matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AgentRole {
    XLiteral { var: VarId, negated: bool },
    YLiteral { var: VarId, negated: bool },
    THelper { var: VarId },
    FHelper { var: VarId },
    TPrime { var: VarId },
    FPrime { var: VarId },
    Clause { index: usize },
    ClausePrime { index: usize },
    Phi,
}

#[derive(Debug, Clone)]
pub enum ReducedGame {
    Boolean(BooleanGame),
    Additive(AdditiveGame),
}

/// A generated game together with the metadata tying agents to the encoded
/// formula.
#[derive(Debug, Clone)]
pub struct ReductionArtifact {
    pub game: ReducedGame,
    /// Role of each agent, indexed by agent id.
    pub roles: Vec<AgentRole>,
    /// The restricted formula actually encoded (for the additive game this
    /// includes the fresh tautology variable and its clause).
    pub source: QbfFormula,
    /// Clauses of the negated matrix, in agent-numbering order.
    pub clauses: Vec<Vec<Literal>>,
    /// Per clause, the literal agents of its occurrences (2-3 entries,
    /// duplicates possible for repeated literals).
    pub clause_literals: Vec<Vec<AgentId>>,
    /// Per agent, the distinct clause indices its literal occurs in
    /// (empty for non-literal agents).
    pub literal_clauses: Vec<Vec<usize>>,
    /// Fresh tautology variables added in front of the formula; empty for
    /// the Boolean construction.
    pub star_vars: Vec<VarId>,
    role_index: HashMap<AgentRole, AgentId>,
}

impl ReductionArtifact {
    pub fn agent_count(&self) -> usize {
        self.roles.len()
    }

    pub fn agent(&self, role: AgentRole) -> Option<AgentId> {
        self.role_index.get(&role).copied()
    }

    pub fn boolean(&self) -> Result<&BooleanGame, ReductionError> {
        match &self.game {
            ReducedGame::Boolean(g) => Ok(g),
            ReducedGame::Additive(_) => Err(ReductionError::WrongArtifactKind("Boolean")),
        }
    }

    pub fn additive(&self) -> Result<&AdditiveGame, ReductionError> {
        match &self.game {
            ReducedGame::Additive(g) => Ok(g),
            ReducedGame::Boolean(_) => Err(ReductionError::WrongArtifactKind("additive")),
        }
    }

    /// Sidecar role map: one `r <agent-id> <kind> <params...>` line per agent.
    pub fn format_roles(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        for (agent, role) in self.roles.iter().enumerate() {
            let line = match role {
                AgentRole::XLiteral { var, negated } => {
                    format!("x {var} {}", if *negated { "neg" } else { "pos" })
                }
                AgentRole::YLiteral { var, negated } => {
                    format!("y {var} {}", if *negated { "neg" } else { "pos" })
                }
                AgentRole::THelper { var } => format!("t {var}"),
                AgentRole::FHelper { var } => format!("f {var}"),
                AgentRole::TPrime { var } => format!("tp {var}"),
                AgentRole::FPrime { var } => format!("fp {var}"),
                AgentRole::Clause { index } => format!("c {index}"),
                AgentRole::ClausePrime { index } => format!("cp {index}"),
                AgentRole::Phi => "phi".to_string(),
            };
            writeln!(out, "r {agent} {line}").unwrap();
        }
        out
    }
}

fn check_restricted_dnf(formula: &QbfFormula) -> Result<(), ReductionError> {
    if formula.outer != OuterQuantifier::Exists || formula.matrix_kind != MatrixKind::Dnf {
        return Err(ReductionError::WrongShape(
            "expected an exists-forall formula with a DNF matrix",
        ));
    }
    let report = formula.validate_restricted();
    if !report.all_ok() {
        return Err(ReductionError::NotRestricted(report));
    }
    Ok(())
}

struct Layout {
    roles: Vec<AgentRole>,
    role_index: HashMap<AgentRole, AgentId>,
}

impl Layout {
    fn new() -> Self {
        Layout {
            roles: Vec::new(),
            role_index: HashMap::new(),
        }
    }

    fn add(&mut self, role: AgentRole) -> AgentId {
        let id = self.roles.len();
        self.roles.push(role);
        let previous = self.role_index.insert(role, id);
        debug_assert!(previous.is_none(), "role assigned twice");
        id
    }

    fn get(&self, role: AgentRole) -> AgentId {
        self.role_index[&role]
    }
}

/// Map each CNF clause occurrence to its literal agent, and each literal
/// agent to the distinct clauses it occurs in.
fn index_clause_literals(
    source: &QbfFormula,
    clauses: &[Vec<Literal>],
    layout: &Layout,
    agent_count: usize,
) -> Result<(Vec<Vec<AgentId>>, Vec<Vec<usize>>), ReductionError> {
    let mut clause_literals: Vec<Vec<AgentId>> = Vec::with_capacity(clauses.len());
    let mut literal_clauses: Vec<Vec<usize>> = vec![Vec::new(); agent_count];
    for (k, clause) in clauses.iter().enumerate() {
        let mut agents = Vec::with_capacity(clause.len());
        for lit in clause {
            let role = if source.is_x_var(lit.var) {
                AgentRole::XLiteral {
                    var: lit.var,
                    negated: lit.negated,
                }
            } else {
                AgentRole::YLiteral {
                    var: lit.var,
                    negated: lit.negated,
                }
            };
            let agent = layout.get(role);
            agents.push(agent);
            if literal_clauses[agent].last() != Some(&k) {
                literal_clauses[agent].push(k);
            }
        }
        clause_literals.push(agents);
    }
    // Occurrence structure implied by the restrictions: one clause per
    // x-literal, at most two per y-literal.
    for (agent, clauses_of) in literal_clauses.iter().enumerate() {
        match layout.roles[agent] {
            AgentRole::XLiteral { .. } if clauses_of.len() != 1 => {
                return Err(ReductionError::UnexpectedStructure(format!(
                    "x-literal agent {agent} occurs in {} clauses",
                    clauses_of.len()
                )));
            }
            AgentRole::YLiteral { .. } if clauses_of.len() > 2 => {
                return Err(ReductionError::UnexpectedStructure(format!(
                    "y-literal agent {agent} occurs in {} clauses",
                    clauses_of.len()
                )));
            }
            _ => {}
        }
    }
    Ok((clause_literals, literal_clauses))
}

/// Boolean-game construction. Agents: per x-variable the quadruple
/// x, x-bar, t, f; per y-variable the pair y, y-bar; one agent per clause of
/// the negated matrix; and a single formula agent. Goals follow the gadget
/// list; a 2-literal clause repeats its second literal in the goal.
pub fn reduce_to_boolean_game(formula: &QbfFormula) -> Result<ReductionArtifact, ReductionError> {
    check_restricted_dnf(formula)?;
    if formula.x_vars.is_empty() {
        return Err(ReductionError::WrongShape(
            "the Boolean construction needs at least one x-variable",
        ));
    }
    let negated = formula.negate_dnf_to_cnf()?;
    let clauses = negated.terms.clone();

    let mut layout = Layout::new();
    for &var in &formula.x_vars {
        layout.add(AgentRole::XLiteral { var, negated: false });
        layout.add(AgentRole::XLiteral { var, negated: true });
        layout.add(AgentRole::THelper { var });
        layout.add(AgentRole::FHelper { var });
    }
    for &var in &formula.y_vars {
        layout.add(AgentRole::YLiteral { var, negated: false });
        layout.add(AgentRole::YLiteral { var, negated: true });
    }
    for index in 0..clauses.len() {
        layout.add(AgentRole::Clause { index });
    }
    let phi = layout.add(AgentRole::Phi);
    let agent_count = layout.roles.len();

    let (clause_literals, literal_clauses) =
        index_clause_literals(formula, &clauses, &layout, agent_count)?;

    let mut goals: Vec<Option<Goal>> = vec![None; agent_count];
    for &var in &formula.x_vars {
        let x = layout.get(AgentRole::XLiteral { var, negated: false });
        let xbar = layout.get(AgentRole::XLiteral { var, negated: true });
        let t = layout.get(AgentRole::THelper { var });
        let f = layout.get(AgentRole::FHelper { var });
        goals[x] = Some(Goal::conj([
            Goal::atom(f),
            Goal::not(Goal::atom(t)),
            Goal::atom(xbar),
        ]));
        goals[xbar] = Some(Goal::conj([
            Goal::atom(t),
            Goal::not(Goal::atom(f)),
            Goal::atom(x),
        ]));
        goals[t] = Some(Goal::not(Goal::atom(phi)));
        goals[f] = Some(Goal::not(Goal::atom(phi)));
    }
    for &var in &formula.y_vars {
        let y = layout.get(AgentRole::YLiteral { var, negated: false });
        let ybar = layout.get(AgentRole::YLiteral { var, negated: true });
        goals[y] = Some(Goal::not(Goal::atom(ybar)));
        goals[ybar] = Some(Goal::not(Goal::atom(y)));
    }
    for (index, agents) in clause_literals.iter().enumerate() {
        let c = layout.get(AgentRole::Clause { index });
        // l1 | l2 | l3, with l2 = l3 for 2-literal clauses.
        let mut lits = agents.clone();
        if lits.len() == 2 {
            lits.push(lits[1]);
        }
        let literals = Goal::disj(lits.into_iter().map(Goal::atom));
        let inner = if index + 1 < clauses.len() {
            Goal::and(
                literals,
                Goal::atom(layout.get(AgentRole::Clause { index: index + 1 })),
            )
        } else {
            literals
        };
        goals[c] = Some(Goal::or(Goal::not(Goal::atom(phi)), inner));
    }
    {
        let first_x = formula.x_vars[0];
        let c1 = layout.get(AgentRole::Clause { index: 0 });
        let x1 = layout.get(AgentRole::XLiteral { var: first_x, negated: false });
        let x1bar = layout.get(AgentRole::XLiteral { var: first_x, negated: true });
        goals[phi] = Some(Goal::and(
            Goal::atom(c1),
            Goal::or(Goal::atom(x1), Goal::atom(x1bar)),
        ));
    }
    let goals: Vec<Goal> = goals.into_iter().map(|g| g.expect("goal set")).collect();
    let game = BooleanGame::new(goals)?;

    Ok(ReductionArtifact {
        game: ReducedGame::Boolean(game),
        roles: layout.roles.clone(),
        source: formula.clone(),
        clauses,
        clause_literals,
        literal_clauses,
        star_vars: Vec::new(),
        role_index: layout.role_index,
    })
}

/// Append fresh variables and prepend their tautological clauses to the
/// negated matrix; on the DNF side this prepends contradictory terms, so
/// the truth value and the occurrence restrictions are preserved. At least
/// one variable is added, and enough of them that the clause list has at
/// least three entries: a clause agent on a shorter cycle cannot collect
/// 13 + 13 + 5 from two distinct neighbors plus a literal, which the
/// deviation argument relies on.
fn augment_with_stars(formula: &QbfFormula) -> Result<(QbfFormula, Vec<VarId>), ReductionError> {
    let first_star = formula
        .x_vars
        .iter()
        .chain(&formula.y_vars)
        .copied()
        .max()
        .unwrap_or(0)
        + 1;
    let star_count = (3usize.saturating_sub(formula.terms.len())).max(1);
    let mut x_vars = formula.x_vars.clone();
    let mut stars = Vec::with_capacity(star_count);
    let mut terms = Vec::with_capacity(formula.terms.len() + star_count);
    for k in 0..star_count {
        let star = first_star + k as VarId;
        x_vars.push(star);
        stars.push(star);
        terms.push(vec![Literal::negative(star), Literal::positive(star)]);
    }
    terms.extend(formula.terms.iter().cloned());
    let augmented = QbfFormula::new(
        x_vars,
        formula.y_vars.clone(),
        formula.outer,
        formula.matrix_kind,
        terms,
    )?;
    debug_assert!(augmented.validate_restricted().all_ok());
    Ok((augmented, stars))
}

/// Additive-game construction. The formula is first augmented with fresh
/// tautology variables and their clauses (one variable normally, more for
/// very short formulas). Agents: per x-variable
/// the sextuple x, x-bar, t, f, t', f'; per y-variable the pair y, y-bar;
/// per clause the pair c, c'. Valuations are symmetric; clause agents sit on
/// a 13-valued cycle (indices modulo the clause count), literal-clause edges
/// are 5, helper edges 30, and incompatible pairs get the minus-infinity
/// constant.
pub fn reduce_to_additive_game(formula: &QbfFormula) -> Result<ReductionArtifact, ReductionError> {
    check_restricted_dnf(formula)?;
    let (source, star_vars) = augment_with_stars(formula)?;
    let negated = source.negate_dnf_to_cnf()?;
    let clauses = negated.terms.clone();
    let clause_count = clauses.len();

    let mut layout = Layout::new();
    for &var in &source.x_vars {
        layout.add(AgentRole::XLiteral { var, negated: false });
        layout.add(AgentRole::XLiteral { var, negated: true });
        layout.add(AgentRole::THelper { var });
        layout.add(AgentRole::FHelper { var });
        layout.add(AgentRole::TPrime { var });
        layout.add(AgentRole::FPrime { var });
    }
    for &var in &source.y_vars {
        layout.add(AgentRole::YLiteral { var, negated: false });
        layout.add(AgentRole::YLiteral { var, negated: true });
    }
    for index in 0..clause_count {
        layout.add(AgentRole::Clause { index });
        layout.add(AgentRole::ClausePrime { index });
    }
    let agent_count = layout.roles.len();

    let (clause_literals, literal_clauses) =
        index_clause_literals(&source, &clauses, &layout, agent_count)?;

    let minus_inf = crate::game::DEFAULT_MINUS_INFINITY;
    let mut pairs: BTreeMap<(AgentId, AgentId), i64> = BTreeMap::new();
    let mut set = |a: AgentId, b: AgentId, v: i64| {
        debug_assert_ne!(a, b);
        let key = (a.min(b), a.max(b));
        let previous = pairs.insert(key, v);
        debug_assert!(
            previous.is_none() || previous == Some(v),
            "conflicting valuations for pair {key:?}: {previous:?} vs {v}"
        );
    };

    let clause_agent = |index: usize| layout.get(AgentRole::Clause { index });
    let prime_agent = |index: usize| layout.get(AgentRole::ClausePrime { index });

    for &var in &source.x_vars {
        let x = layout.get(AgentRole::XLiteral { var, negated: false });
        let xbar = layout.get(AgentRole::XLiteral { var, negated: true });
        let t = layout.get(AgentRole::THelper { var });
        let f = layout.get(AgentRole::FHelper { var });
        let tp = layout.get(AgentRole::TPrime { var });
        let fp = layout.get(AgentRole::FPrime { var });
        set(x, xbar, -10);
        set(x, f, 20);
        set(x, t, 14);
        set(xbar, t, 20);
        set(xbar, f, 14);
        set(t, tp, 30);
        set(f, fp, 30);
        set(t, f, minus_inf);
        for lit_agent in [x, xbar] {
            set(lit_agent, tp, minus_inf);
            set(lit_agent, fp, minus_inf);
        }
        for &k in &literal_clauses[x] {
            set(x, clause_agent(k), 5);
            set(x, prime_agent(k), minus_inf);
            set(t, clause_agent(k), minus_inf);
        }
        for &k in &literal_clauses[xbar] {
            set(xbar, clause_agent(k), 5);
            set(xbar, prime_agent(k), minus_inf);
            set(f, clause_agent(k), minus_inf);
        }
    }
    for &var in &source.y_vars {
        let y = layout.get(AgentRole::YLiteral { var, negated: false });
        let ybar = layout.get(AgentRole::YLiteral { var, negated: true });
        set(y, ybar, minus_inf);
        for lit_agent in [y, ybar] {
            for &k in &literal_clauses[lit_agent] {
                set(lit_agent, clause_agent(k), 5);
                set(lit_agent, prime_agent(k), minus_inf);
            }
        }
    }
    for k in 0..clause_count {
        set(clause_agent(k), prime_agent(k), 30);
        let next = (k + 1) % clause_count;
        if next != k {
            set(clause_agent(k), clause_agent(next), 13);
            set(clause_agent(k), prime_agent(next), minus_inf);
            set(prime_agent(k), clause_agent(next), minus_inf);
        }
    }

    let mut game = AdditiveGame::with_minus_infinity(agent_count, minus_inf);
    for (&(a, b), &v) in &pairs {
        game.set_symmetric_value(a, b, v);
    }
    game.check_minus_infinity_margin()?;

    Ok(ReductionArtifact {
        game: ReducedGame::Additive(game),
        roles: layout.roles.clone(),
        source,
        clauses,
        clause_literals,
        literal_clauses,
        star_vars,
        role_index: layout.role_index,
    })
}

/// Feasibility for the additive gadget: individually rational, and every
/// supported member (clause, t, or f agent) obtains utility at least 30.
pub fn is_feasible_coalition(
    artifact: &ReductionArtifact,
    coalition: Coalition,
) -> Result<bool, ReductionError> {
    let game = artifact.additive()?;
    if coalition.is_empty() {
        return Err(ReductionError::UnexpectedStructure("empty coalition".into()));
    }
    for agent in coalition.members() {
        let utility = game.utility(agent, coalition)?;
        if utility < 0 {
            return Ok(false);
        }
        let supported = matches!(
            artifact.roles[agent],
            AgentRole::Clause { .. } | AgentRole::THelper { .. } | AgentRole::FHelper { .. }
        );
        if supported && utility < 30 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The two shapes a feasible coalition containing a clause agent can take.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LemmaCase {
    /// Each clause member is paired with its own helper and isolated from
    /// its cycle neighbors and literals.
    CaseA,
    /// All clause agents are present, every clause has a literal agent in
    /// the coalition, and some literal of the fresh star variable is present.
    CaseB,
}

/// Classify a feasible coalition that contains a clause agent. A coalition
/// fitting neither case would contradict the structural lemma and is
/// reported as an error.
pub fn feasibility_lemma_cases(
    artifact: &ReductionArtifact,
    coalition: Coalition,
) -> Result<LemmaCase, ReductionError> {
    let clause_count = artifact.clauses.len();
    let clause_members: Vec<usize> = (0..clause_count)
        .filter(|&k| coalition.contains(artifact.agent(AgentRole::Clause { index: k }).unwrap()))
        .collect();
    if clause_members.is_empty() {
        return Err(ReductionError::UnexpectedStructure(
            "coalition contains no clause agent".into(),
        ));
    }
    if !is_feasible_coalition(artifact, coalition)? {
        return Err(ReductionError::UnexpectedStructure(
            "coalition is not feasible".into(),
        ));
    }

    if clause_members.len() == clause_count {
        for (k, agents) in artifact.clause_literals.iter().enumerate() {
            if !agents.iter().any(|&a| coalition.contains(a)) {
                return Err(ReductionError::LemmaViolation(coalition));
            }
            let _ = k;
        }
        let has_star = artifact.star_vars.iter().any(|&star| {
            [false, true].into_iter().any(|negated| {
                artifact
                    .agent(AgentRole::XLiteral { var: star, negated })
                    .is_some_and(|a| coalition.contains(a))
            })
        });
        if !has_star {
            return Err(ReductionError::LemmaViolation(coalition));
        }
        return Ok(LemmaCase::CaseB);
    }

    for &k in &clause_members {
        let prime = artifact.agent(AgentRole::ClausePrime { index: k }).unwrap();
        if !coalition.contains(prime) {
            return Err(ReductionError::LemmaViolation(coalition));
        }
        let prev = (k + clause_count - 1) % clause_count;
        let next = (k + 1) % clause_count;
        for neighbor in [prev, next] {
            if neighbor != k
                && coalition.contains(artifact.agent(AgentRole::Clause { index: neighbor }).unwrap())
            {
                return Err(ReductionError::LemmaViolation(coalition));
            }
        }
        if artifact.clause_literals[k]
            .iter()
            .any(|&a| coalition.contains(a))
        {
            return Err(ReductionError::LemmaViolation(coalition));
        }
    }
    Ok(LemmaCase::CaseA)
}

fn lookup_x(
    assignment: &BTreeMap<VarId, bool>,
    var: VarId,
) -> Result<bool, ReductionError> {
    assignment
        .get(&var)
        .copied()
        .ok_or(ReductionError::MissingAssignment(var))
}

/// Witness partition for the Boolean game: each x-gadget groups the two
/// literals with t (true variable) or f (false variable); everyone else is
/// a singleton.
pub fn boolean_witness_partition(
    artifact: &ReductionArtifact,
    x_assignment: &BTreeMap<VarId, bool>,
) -> Result<Partition, ReductionError> {
    artifact.boolean()?;
    let n = artifact.agent_count();
    let mut grouped = Coalition::empty();
    let mut blocks = Vec::new();
    for &var in &artifact.source.x_vars {
        let value = lookup_x(x_assignment, var)?;
        let x = artifact.agent(AgentRole::XLiteral { var, negated: false }).unwrap();
        let xbar = artifact.agent(AgentRole::XLiteral { var, negated: true }).unwrap();
        let helper = if value {
            artifact.agent(AgentRole::THelper { var }).unwrap()
        } else {
            artifact.agent(AgentRole::FHelper { var }).unwrap()
        };
        let block = Coalition::from_members([helper, x, xbar]);
        grouped = grouped.union(block);
        blocks.push(block);
    }
    for agent in 0..n {
        if !grouped.contains(agent) {
            blocks.push(Coalition::singleton(agent));
        }
    }
    Ok(Partition::new(n, blocks)?)
}

/// Witness partition for the additive game: x-gadgets split into the
/// assigned triangle, the spare helper pair, and the leftover prime;
/// clause agents pair with their primes; y-literals stay single.
pub fn additive_witness_partition(
    artifact: &ReductionArtifact,
    x_assignment: &BTreeMap<VarId, bool>,
) -> Result<Partition, ReductionError> {
    artifact.additive()?;
    let n = artifact.agent_count();
    let mut blocks = Vec::new();
    for &var in &artifact.source.x_vars {
        let value = lookup_x(x_assignment, var)?;
        let x = artifact.agent(AgentRole::XLiteral { var, negated: false }).unwrap();
        let xbar = artifact.agent(AgentRole::XLiteral { var, negated: true }).unwrap();
        let t = artifact.agent(AgentRole::THelper { var }).unwrap();
        let f = artifact.agent(AgentRole::FHelper { var }).unwrap();
        let tp = artifact.agent(AgentRole::TPrime { var }).unwrap();
        let fp = artifact.agent(AgentRole::FPrime { var }).unwrap();
        if value {
            blocks.push(Coalition::from_members([t, x, xbar]));
            blocks.push(Coalition::singleton(tp));
            blocks.push(Coalition::from_members([f, fp]));
        } else {
            blocks.push(Coalition::from_members([f, x, xbar]));
            blocks.push(Coalition::singleton(fp));
            blocks.push(Coalition::from_members([t, tp]));
        }
    }
    for &var in &artifact.source.y_vars {
        for negated in [false, true] {
            let a = artifact.agent(AgentRole::YLiteral { var, negated }).unwrap();
            blocks.push(Coalition::singleton(a));
        }
    }
    for index in 0..artifact.clauses.len() {
        blocks.push(Coalition::from_members([
            artifact.agent(AgentRole::Clause { index }).unwrap(),
            artifact.agent(AgentRole::ClausePrime { index }).unwrap(),
        ]));
    }
    Ok(Partition::new(n, blocks)?)
}

/// The deviating coalition induced by an assignment satisfying every clause
/// of the negated matrix: all clause agents plus the agents of all true
/// literals (and, in the Boolean game, the formula agent).
pub fn blocking_coalition_from_y(
    artifact: &ReductionArtifact,
    x_assignment: &BTreeMap<VarId, bool>,
    y_assignment: &BTreeMap<VarId, bool>,
) -> Result<Coalition, ReductionError> {
    let value_of = |var: VarId| -> Result<bool, ReductionError> {
        x_assignment
            .get(&var)
            .or_else(|| y_assignment.get(&var))
            .copied()
            .ok_or(ReductionError::MissingAssignment(var))
    };
    for (k, clause) in artifact.clauses.iter().enumerate() {
        let satisfied = clause
            .iter()
            .map(|lit| Ok(lit.holds_under(value_of(lit.var)?)))
            .collect::<Result<Vec<_>, ReductionError>>()?
            .into_iter()
            .any(|b| b);
        if !satisfied {
            return Err(ReductionError::ClauseUnsatisfied(k));
        }
    }

    let mut members = Coalition::empty();
    for index in 0..artifact.clauses.len() {
        members = members.with(artifact.agent(AgentRole::Clause { index }).unwrap());
    }
    for &var in &artifact.source.x_vars {
        let negated = !value_of(var)?; // the true literal of the variable
        members = members.with(artifact.agent(AgentRole::XLiteral { var, negated }).unwrap());
    }
    for &var in &artifact.source.y_vars {
        let negated = !value_of(var)?;
        members = members.with(artifact.agent(AgentRole::YLiteral { var, negated }).unwrap());
    }
    if let Some(phi) = artifact.agent(AgentRole::Phi) {
        members = members.with(phi);
    }
    Ok(members)
}

/// Read the x-assignment off a stable partition. Additive: a variable is
/// true when its positive literal shares a block with t, false when with f.
/// Boolean: exactly one of the two literal agents has its goal satisfied,
/// and the unsatisfied one names the true literal.
pub fn extract_x_assignment(
    artifact: &ReductionArtifact,
    partition: &Partition,
) -> Result<BTreeMap<VarId, bool>, ReductionError> {
    let mut assignment = BTreeMap::new();
    match &artifact.game {
        ReducedGame::Additive(_) => {
            for &var in &artifact.source.x_vars {
                let x = artifact.agent(AgentRole::XLiteral { var, negated: false }).unwrap();
                let t = artifact.agent(AgentRole::THelper { var }).unwrap();
                let f = artifact.agent(AgentRole::FHelper { var }).unwrap();
                let block = partition.block_of(x)?;
                let with_t = block.contains(t);
                let with_f = block.contains(f);
                match (with_t, with_f) {
                    (true, false) => assignment.insert(var, true),
                    (false, true) => assignment.insert(var, false),
                    _ => {
                        return Err(ReductionError::UnexpectedStructure(format!(
                            "x-literal of variable {var} is with {}",
                            if with_t { "both t and f" } else { "neither t nor f" }
                        )))
                    }
                };
            }
        }
        ReducedGame::Boolean(game) => {
            for &var in &artifact.source.x_vars {
                let x = artifact.agent(AgentRole::XLiteral { var, negated: false }).unwrap();
                let xbar = artifact.agent(AgentRole::XLiteral { var, negated: true }).unwrap();
                let x_satisfied = game.approves(x, partition.block_of(x)?)?;
                let xbar_satisfied = game.approves(xbar, partition.block_of(xbar)?)?;
                if x_satisfied == xbar_satisfied {
                    return Err(ReductionError::UnexpectedStructure(format!(
                        "literals of variable {var} are {} satisfied",
                        if x_satisfied { "both" } else { "neither" }
                    )));
                }
                // The literal that is not satisfied is set true.
                assignment.insert(var, !x_satisfied);
            }
        }
    }
    Ok(assignment)
}
