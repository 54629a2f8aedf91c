//! Command-line front end: formula evaluation and restriction, game
//! construction, stable-partition search, partition verification, the
//! end-to-end agreement check, and corpus generation.
//!
//! Exit codes: 0 success or agreement, 1 internal error or disagreement,
//! 2 parse error, 3 restriction violation, 4 inconclusive (cap or budget).

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use hedonic::corpus::generate_corpus;
use hedonic::formula::{
    format_qbf, parse_qbf, FormulaError, MatrixKind, OuterQuantifier, RestrictOutcome,
};
use hedonic::game::{
    format_additive_game, format_boolean_game, format_partition, parse_additive_game,
    parse_boolean_game, parse_partition, GameError,
};
use hedonic::reductions::{reduce_to_additive_game, reduce_to_boolean_game, ReductionError};
use hedonic::stability::{
    find_blocking_coalition, find_stable_partition, find_weakly_blocking_coalition, Outcome,
    ScoredGame, SolveError, SolveResult, SolverConfig, StabilityConcept,
};

const EXIT_INTERNAL: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_RESTRICTION: u8 = 3;
const EXIT_INCONCLUSIVE: u8 = 4;

/// Default agent cap for the CLI; large enough for the additive
/// construction on small formulas.
const CLI_AGENT_CAP: usize = 40;

#[derive(Parser)]
#[command(name = "hedonic", about = "Hedonic game solver and formula toolkit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConceptArg {
    Core,
    StrictCore,
}

impl From<ConceptArg> for StabilityConcept {
    fn from(c: ConceptArg) -> Self {
        match c {
            ConceptArg::Core => StabilityConcept::Core,
            ConceptArg::StrictCore => StabilityConcept::StrictCore,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum TargetArg {
    Boolean,
    Additive,
}

#[derive(Parser)]
struct SolveFlags {
    #[arg(long, default_value_t = CLI_AGENT_CAP)]
    cap_agents: usize,
    #[arg(long, default_value_t = hedonic::stability::DEFAULT_BUDGET)]
    budget: u64,
    /// Disable solver parallelism (results are identical either way).
    #[arg(long)]
    sequential: bool,
}

impl SolveFlags {
    fn config(&self) -> SolverConfig {
        SolverConfig {
            agent_cap: self.cap_agents,
            budget: self.budget,
            sequential: self.sequential,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a quantified formula by exhaustive assignment search.
    QbfEval { file: PathBuf },
    /// Transform a forall-exists CNF into restricted occurrence form.
    QbfRestrict {
        file: PathBuf,
        /// Write the restricted formula here instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Build a game from a restricted exists-forall DNF formula.
    Reduce {
        file: PathBuf,
        #[arg(long, value_enum)]
        target: TargetArg,
        /// Output prefix; writes PREFIX.bhg or PREFIX.ahg plus PREFIX.roles.
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Search for a stable partition of a game file.
    Solve {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "core")]
        concept: ConceptArg,
        /// Write the stable partition here when one is found.
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        flags: SolveFlags,
    },
    /// Check a partition for stability and report a blocking coalition.
    Verify {
        game: PathBuf,
        partition: PathBuf,
        #[arg(long, value_enum, default_value = "core")]
        concept: ConceptArg,
    },
    /// Compare formula truth with stable-partition existence in both
    /// constructed games.
    Roundtrip {
        file: PathBuf,
        #[command(flatten)]
        flags: SolveFlags,
    },
    /// Generate a seeded corpus of restricted formulas.
    GenCorpus {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 40)]
        count: usize,
        #[arg(long, default_value_t = 2)]
        max_x: usize,
        #[arg(long, default_value_t = 2)]
        max_y: usize,
        /// Output directory for the .qdnf files.
        #[arg(short, long)]
        output: PathBuf,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::new(EXIT_INTERNAL, e.to_string())
    }
}

impl From<FormulaError> for Failure {
    fn from(e: FormulaError) -> Self {
        let code = match &e {
            FormulaError::TruthCapExceeded { .. } => EXIT_INCONCLUSIVE,
            _ => EXIT_PARSE,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<GameError> for Failure {
    fn from(e: GameError) -> Self {
        Failure::new(EXIT_PARSE, e.to_string())
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        Failure::new(EXIT_INCONCLUSIVE, format!("INCONCLUSIVE\n{e}"))
    }
}

impl From<ReductionError> for Failure {
    fn from(e: ReductionError) -> Self {
        let code = match &e {
            ReductionError::NotRestricted(_) => EXIT_RESTRICTION,
            ReductionError::WrongShape(_) => EXIT_PARSE,
            ReductionError::Formula(f) => {
                let code = match f {
                    FormulaError::TruthCapExceeded { .. } => EXIT_INCONCLUSIVE,
                    _ => EXIT_PARSE,
                };
                return Failure::new(code, f.to_string());
            }
            _ => EXIT_INTERNAL,
        };
        Failure::new(code, e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", path.display())))
}

fn run_qbf_eval(file: &Path) -> Result<(), Failure> {
    let formula = parse_qbf(&read(file)?)?;
    let value = formula.qbf_truth_default()?;
    println!("{}", if value { "TRUE" } else { "FALSE" });
    println!("x_vars={}", formula.x_vars.len());
    println!("y_vars={}", formula.y_vars.len());
    println!("terms={}", formula.terms.len());
    Ok(())
}

fn run_qbf_restrict(file: &Path, output: Option<&Path>) -> Result<(), Failure> {
    let formula = parse_qbf(&read(file)?)?;
    if formula.outer != OuterQuantifier::Forall || formula.matrix_kind != MatrixKind::Cnf {
        return Err(Failure::new(
            EXIT_PARSE,
            "restriction expects a forall-exists formula with a CNF matrix",
        ));
    }
    match hedonic::formula::restrict(&formula)? {
        RestrictOutcome::TriviallyTrue => println!("TRIVIALLY_TRUE"),
        RestrictOutcome::TriviallyFalse => println!("TRIVIALLY_FALSE"),
        RestrictOutcome::Restricted { formula, copies } => {
            println!("RESTRICTED");
            println!("x_vars={}", formula.x_vars.len());
            println!("y_vars={}", formula.y_vars.len());
            println!("terms={}", formula.terms.len());
            println!("copied_vars={}", copies.len());
            let text = format_qbf(&formula);
            match output {
                Some(path) => std::fs::write(path, text)?,
                None => print!("{text}"),
            }
        }
    }
    Ok(())
}

fn run_reduce(file: &Path, target: TargetArg, prefix: &Path) -> Result<(), Failure> {
    let formula = parse_qbf(&read(file)?)?;
    let (artifact, extension, text) = match target {
        TargetArg::Boolean => {
            let artifact = reduce_to_boolean_game(&formula)?;
            let text = format_boolean_game(artifact.boolean().unwrap());
            (artifact, "bhg", text)
        }
        TargetArg::Additive => {
            let artifact = reduce_to_additive_game(&formula)?;
            let text = format_additive_game(artifact.additive().unwrap(), true);
            (artifact, "ahg", text)
        }
    };
    let game_path = prefix.with_extension(extension);
    let roles_path = prefix.with_extension("roles");
    std::fs::write(&game_path, text)?;
    std::fs::write(&roles_path, artifact.format_roles())?;
    println!("agents={}", artifact.agent_count());
    println!("clauses={}", artifact.clauses.len());
    println!("game_file={}", game_path.display());
    println!("roles_file={}", roles_path.display());
    Ok(())
}

enum AnyGame {
    Additive(hedonic::game::AdditiveGame),
    Boolean(hedonic::game::BooleanGame),
}

impl AnyGame {
    fn parse(text: &str) -> Result<Self, Failure> {
        let header = text
            .lines()
            .map(str::trim)
            .find(|l| !l.is_empty() && !l.starts_with('c'))
            .unwrap_or("");
        match header.split_whitespace().nth(1) {
            Some("ahg") => Ok(AnyGame::Additive(parse_additive_game(text)?)),
            Some("bhg") => Ok(AnyGame::Boolean(parse_boolean_game(text)?)),
            _ => Err(Failure::new(
                EXIT_PARSE,
                "expected a `p ahg` or `p bhg` header",
            )),
        }
    }

    fn n(&self) -> usize {
        match self {
            AnyGame::Additive(g) => g.n(),
            AnyGame::Boolean(g) => g.n(),
        }
    }
}

fn print_solve_result(result: &SolveResult, output: Option<&Path>) -> Result<(), Failure> {
    match &result.outcome {
        Outcome::Stable(partition) => {
            println!("STABLE_PARTITION");
            print!("{}", format_partition(partition));
            if let Some(path) = output {
                std::fs::write(path, format_partition(partition))?;
            }
        }
        Outcome::NoStablePartition => println!("NO_STABLE_PARTITION"),
    }
    println!("ir_coalitions={}", result.stats.ir_coalitions);
    println!("candidates_examined={}", result.stats.candidates_examined);
    println!("work_units={}", result.stats.work_units);
    Ok(())
}

fn run_solve(
    file: &Path,
    concept: StabilityConcept,
    output: Option<&Path>,
    config: &SolverConfig,
) -> Result<(), Failure> {
    let result = match AnyGame::parse(&read(file)?)? {
        AnyGame::Additive(g) => find_stable_partition(&g, concept, config)?,
        AnyGame::Boolean(g) => find_stable_partition(&g, concept, config)?,
    };
    print_solve_result(&result, output)
}

fn run_verify(
    game_file: &Path,
    partition_file: &Path,
    concept: StabilityConcept,
) -> Result<(), Failure> {
    let game = AnyGame::parse(&read(game_file)?)?;
    let partition = parse_partition(&read(partition_file)?, game.n())?;
    let blocker = match (&game, concept) {
        (AnyGame::Additive(g), StabilityConcept::Core) => find_blocking_coalition(g, &partition)?,
        (AnyGame::Additive(g), StabilityConcept::StrictCore) => {
            find_weakly_blocking_coalition(g, &partition)?
        }
        (AnyGame::Boolean(g), StabilityConcept::Core) => find_blocking_coalition(g, &partition)?,
        (AnyGame::Boolean(g), StabilityConcept::StrictCore) => {
            find_weakly_blocking_coalition(g, &partition)?
        }
    };
    match blocker {
        None => println!("STABLE"),
        Some(s) => {
            let ids: Vec<String> = s.members().map(|a| a.to_string()).collect();
            println!("BLOCKED");
            println!("blocking_coalition={}", ids.join(" "));
        }
    }
    Ok(())
}

fn existence<G: ScoredGame>(
    game: &G,
    concept: StabilityConcept,
    config: &SolverConfig,
) -> Result<bool, Failure> {
    let result = find_stable_partition(game, concept, config)?;
    Ok(matches!(result.outcome, Outcome::Stable(_)))
}

fn run_roundtrip(file: &Path, config: &SolverConfig) -> Result<(), Failure> {
    let formula = parse_qbf(&read(file)?)?;
    let oracle = formula.qbf_truth_default()?;

    let boolean = reduce_to_boolean_game(&formula)?;
    let additive = reduce_to_additive_game(&formula)?;
    let boolean_strict = existence(boolean.boolean().unwrap(), StabilityConcept::StrictCore, config)?;
    let additive_strict =
        existence(additive.additive().unwrap(), StabilityConcept::StrictCore, config)?;
    let additive_core = existence(additive.additive().unwrap(), StabilityConcept::Core, config)?;

    let fmt = |b: bool| if b { "EXISTS" } else { "NONE" };
    println!("oracle={}", if oracle { "TRUE" } else { "FALSE" });
    println!("boolean_strict_core={}", fmt(boolean_strict));
    println!("additive_strict_core={}", fmt(additive_strict));
    println!("additive_core={}", fmt(additive_core));
    let agree = boolean_strict == oracle && additive_strict == oracle && additive_core == oracle;
    println!("agreement={}", if agree { "TRUE" } else { "FALSE" });
    if agree {
        Ok(())
    } else {
        Err(Failure::new(
            EXIT_INTERNAL,
            "verdicts disagree with the oracle",
        ))
    }
}

fn run_gen_corpus(
    seed: u64,
    count: usize,
    max_x: usize,
    max_y: usize,
    dir: &Path,
) -> Result<(), Failure> {
    let formulas = generate_corpus(seed, count, max_x, max_y)
        .map_err(|e| Failure::new(EXIT_INTERNAL, e.to_string()))?;
    std::fs::create_dir_all(dir)?;
    let mut true_count = 0;
    for (i, formula) in formulas.iter().enumerate() {
        let value = formula.qbf_truth_default()?;
        true_count += usize::from(value);
        let mut text = String::new();
        writeln!(
            text,
            "c seed={seed} index={i} truth={}",
            if value { "TRUE" } else { "FALSE" }
        )
        .unwrap();
        text.push_str(&format_qbf(formula));
        let path = dir.join(format!("formula_{i:03}.qdnf"));
        std::fs::write(path, text)?;
    }
    println!("count={}", formulas.len());
    println!("true={true_count}");
    println!("false={}", formulas.len() - true_count);
    println!("dir={}", dir.display());
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::QbfEval { file } => run_qbf_eval(&file),
        Command::QbfRestrict { file, output } => run_qbf_restrict(&file, output.as_deref()),
        Command::Reduce {
            file,
            target,
            output,
        } => run_reduce(&file, target, &output),
        Command::Solve {
            file,
            concept,
            output,
            flags,
        } => run_solve(&file, concept.into(), output.as_deref(), &flags.config()),
        Command::Verify {
            game,
            partition,
            concept,
        } => run_verify(&game, &partition, concept.into()),
        Command::Roundtrip { file, flags } => run_roundtrip(&file, &flags.config()),
        Command::GenCorpus {
            seed,
            count,
            max_x,
            max_y,
            output,
        } => run_gen_corpus(seed, count, max_x, max_y, &output),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("{}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
