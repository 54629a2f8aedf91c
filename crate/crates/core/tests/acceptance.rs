//! End-to-end acceptance checks tying formula truth to game stability.
//! Each test prints a single PASS line on success (visible with
//! `cargo test --test acceptance -- --nocapture`).

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hedonic::corpus::generate_corpus;
use hedonic::formula::{
    parse_qbf, restrict, Literal, MatrixKind, OuterQuantifier, QbfFormula, RestrictOutcome, VarId,
};
use hedonic::game::{AdditiveGame, BooleanGame, Coalition, Goal, Partition};
use hedonic::reductions::{
    additive_witness_partition, blocking_coalition_from_y, boolean_witness_partition,
    reduce_to_additive_game, reduce_to_boolean_game, AgentRole, ReductionArtifact,
};
use hedonic::stability::naive::{find_stable_partition_naive, is_stable_full};
use hedonic::stability::{
    find_stable_partition, is_stable, Outcome, SolverConfig, StabilityConcept,
};

const CORPUS_SEED: u64 = 1;

fn solver_config() -> SolverConfig {
    SolverConfig {
        agent_cap: 40,
        ..SolverConfig::default()
    }
}

/// 38 generated formulas plus the two hand-built fixtures.
fn corpus() -> Vec<QbfFormula> {
    let mut formulas = generate_corpus(CORPUS_SEED, 38, 2, 2).expect("corpus generation");
    formulas.push(parse_qbf(include_str!("fixtures/min_restricted.qdnf")).unwrap());
    formulas.push(parse_qbf(include_str!("fixtures/true_restricted.qdnf")).unwrap());
    assert!(formulas.len() >= 40);
    for f in &formulas {
        assert!(f.validate_restricted().all_ok());
        assert!(f.x_vars.len() <= 2 && f.y_vars.len() <= 2);
    }
    formulas
}

fn stable_exists<G: hedonic::stability::ScoredGame>(
    game: &G,
    concept: StabilityConcept,
) -> (bool, Option<Partition>) {
    let result = find_stable_partition(game, concept, &solver_config())
        .expect("solver must stay within budget");
    match result.outcome {
        Outcome::Stable(p) => (true, Some(p)),
        Outcome::NoStablePartition => (false, None),
    }
}

/// Full assignments of the augmented x-block: the certifying assignment
/// extended with every combination of star values.
fn star_extensions(
    artifact: &ReductionArtifact,
    base: &BTreeMap<VarId, bool>,
) -> Vec<BTreeMap<VarId, bool>> {
    let stars = &artifact.star_vars;
    let mut out = Vec::new();
    for bits in 0..(1u32 << stars.len()) {
        let mut full = base.clone();
        for (i, &star) in stars.iter().enumerate() {
            full.insert(star, bits >> i & 1 == 1);
        }
        out.push(full);
    }
    out
}

#[test]
fn criterion_1_tri_equivalence() {
    let formulas = corpus();
    let dir = tempfile::tempdir().unwrap();
    let mut trues = 0;
    for (i, f) in formulas.iter().enumerate() {
        let truth = f.qbf_truth_default().unwrap();
        trues += usize::from(truth);

        // the library agrees across all three games
        let boolean = reduce_to_boolean_game(f).unwrap();
        let additive = reduce_to_additive_game(f).unwrap();
        let (b_strict, _) = stable_exists(boolean.boolean().unwrap(), StabilityConcept::StrictCore);
        let (a_strict, _) =
            stable_exists(additive.additive().unwrap(), StabilityConcept::StrictCore);
        let (a_core, _) = stable_exists(additive.additive().unwrap(), StabilityConcept::Core);
        assert_eq!(b_strict, truth, "formula {i}: Boolean strict core");
        assert_eq!(a_strict, truth, "formula {i}: additive strict core");
        assert_eq!(a_core, truth, "formula {i}: additive core");

        // and the command-line roundtrip reports the agreement with exit 0
        let path = dir.path().join(format!("formula_{i}.qdnf"));
        std::fs::write(&path, hedonic::formula::format_qbf(f)).unwrap();
        let output = std::process::Command::new(env!("CARGO_BIN_EXE_hedonic"))
            .arg("roundtrip")
            .arg(&path)
            .output()
            .expect("binary runs");
        let stdout = String::from_utf8_lossy(&output.stdout);
        assert_eq!(output.status.code(), Some(0), "formula {i}: {stdout}");
        assert!(stdout.contains("agreement=TRUE"), "formula {i}: {stdout}");
        let expected = format!("oracle={}", if truth { "TRUE" } else { "FALSE" });
        assert!(stdout.contains(&expected), "formula {i}: {stdout}");
    }
    println!(
        "ACCEPTANCE 1 PASS: truth, strict-core, and core existence agree on {} formulas ({} true)",
        formulas.len(),
        trues
    );
}

#[test]
fn criterion_2_witness_partitions() {
    let mut checked = 0;
    for f in corpus() {
        if !f.qbf_truth_default().unwrap() {
            continue;
        }
        let certs = f.certifying_x_assignments(24).unwrap();
        assert!(!certs.is_empty());
        let boolean = reduce_to_boolean_game(&f).unwrap();
        let additive = reduce_to_additive_game(&f).unwrap();
        for x in &certs {
            let pi = boolean_witness_partition(&boolean, x).unwrap();
            assert!(
                is_stable(boolean.boolean().unwrap(), &pi, StabilityConcept::StrictCore).unwrap(),
                "Boolean witness not strict-core stable"
            );
            for full in star_extensions(&additive, x) {
                let pi = additive_witness_partition(&additive, &full).unwrap();
                assert!(
                    is_stable(additive.additive().unwrap(), &pi, StabilityConcept::StrictCore)
                        .unwrap(),
                    "additive witness not strict-core stable"
                );
                checked += 1;
            }
        }
    }
    assert!(checked > 0);
    println!("ACCEPTANCE 2 PASS: {checked} witness partitions are strict-core stable");
}

#[test]
fn criterion_3_blocking_witnesses() {
    let mut checked = 0;
    for f in corpus() {
        let artifact = reduce_to_additive_game(&f).unwrap();
        let game = artifact.additive().unwrap();
        let x_vars = artifact.source.x_vars.clone();
        let y_vars = artifact.source.y_vars.clone();
        for x_bits in 0..(1u32 << x_vars.len()) {
            let x: BTreeMap<VarId, bool> = x_vars
                .iter()
                .enumerate()
                .map(|(i, &v)| (v, x_bits >> i & 1 == 1))
                .collect();
            for y_bits in 0..(1u32 << y_vars.len()) {
                let y: BTreeMap<VarId, bool> = y_vars
                    .iter()
                    .enumerate()
                    .map(|(i, &v)| (v, y_bits >> i & 1 == 1))
                    .collect();
                let Ok(blocker) = blocking_coalition_from_y(&artifact, &x, &y) else {
                    continue;
                };
                let pi = additive_witness_partition(&artifact, &x).unwrap();
                for agent in blocker.members() {
                    let inside = game.utility(agent, blocker).unwrap();
                    let outside = game.utility(agent, pi.block_of(agent).unwrap()).unwrap();
                    assert!(inside > outside, "member {agent} does not strictly gain");
                    match artifact.roles[agent] {
                        AgentRole::Clause { .. } => {
                            assert!(inside >= 31, "clause agent got {inside}")
                        }
                        AgentRole::XLiteral { .. } => {
                            assert_eq!(inside, 5);
                            assert_eq!(outside, 4);
                        }
                        _ => {}
                    }
                }
                checked += 1;
            }
        }
    }
    assert!(checked > 0);
    println!("ACCEPTANCE 3 PASS: {checked} deviating coalitions strictly block with the expected utilities");
}

fn random_goal(rng: &mut ChaCha8Rng, n: usize, depth: usize) -> Goal {
    if depth == 0 || rng.gen_bool(0.3) {
        return Goal::atom(rng.gen_range(0..n));
    }
    match rng.gen_range(0..4) {
        0 => Goal::not(random_goal(rng, n, depth - 1)),
        1 => Goal::and(random_goal(rng, n, depth - 1), random_goal(rng, n, depth - 1)),
        2 => Goal::or(random_goal(rng, n, depth - 1), random_goal(rng, n, depth - 1)),
        _ => Goal::implies(random_goal(rng, n, depth - 1), random_goal(rng, n, depth - 1)),
    }
}

#[test]
fn criterion_4_boolean_core_never_empty() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for trial in 0..200 {
        let n = rng.gen_range(1..=8);
        let goals = (0..n).map(|_| random_goal(&mut rng, n, 3)).collect();
        let game = BooleanGame::new(goals).unwrap();
        let (exists, witness) = stable_exists(&game, StabilityConcept::Core);
        assert!(exists, "trial {trial}: no core-stable partition found");
        let witness = witness.unwrap();
        assert!(is_stable_full(&game, &witness, StabilityConcept::Core));
    }
    println!("ACCEPTANCE 4 PASS: 200 random Boolean games all admit a core-stable partition");
}

fn random_additive(rng: &mut ChaCha8Rng, n: usize) -> AdditiveGame {
    let mut game = AdditiveGame::new(n);
    let values = [-100i64, -7, -2, 0, 0, 1, 4, 9];
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.gen_bool(0.6) {
                game.set_value(i, j, values[rng.gen_range(0..values.len())]);
            }
        }
    }
    game
}

#[test]
fn criterion_5_solver_cross_validation() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for trial in 0..100 {
        let n = rng.gen_range(1..=7);
        let game = random_additive(&mut rng, n);
        for concept in [StabilityConcept::Core, StabilityConcept::StrictCore] {
            let fast = find_stable_partition(&game, concept, &solver_config()).unwrap();
            let slow = find_stable_partition_naive(&game, concept).unwrap();
            let fast_exists = matches!(fast.outcome, Outcome::Stable(_));
            let slow_exists = matches!(slow, Outcome::Stable(_));
            assert_eq!(fast_exists, slow_exists, "trial {trial} {concept:?}");
            if let Outcome::Stable(p) = &fast.outcome {
                assert!(is_stable_full(&game, p, concept), "fast witness fails");
            }
            if let Outcome::Stable(p) = &slow {
                assert!(is_stable(&game, p, concept).unwrap(), "slow witness fails");
            }
        }
    }
    println!("ACCEPTANCE 5 PASS: solver verdicts match the naive solver on 100 random additive games");
}

fn random_forall_exists_cnf(rng: &mut ChaCha8Rng) -> QbfFormula {
    loop {
        let nx = rng.gen_range(1..=3usize);
        let ny = rng.gen_range(1..=3usize);
        let x_vars: Vec<VarId> = (1..=nx as VarId).collect();
        let y_vars: Vec<VarId> = (nx as VarId + 1..=(nx + ny) as VarId).collect();
        let clauses = rng.gen_range(1..=5);
        let terms: Vec<Vec<Literal>> = (0..clauses)
            .map(|_| {
                let len = rng.gen_range(1..=3);
                (0..len)
                    .map(|_| {
                        let var = rng.gen_range(1..=(nx + ny) as VarId);
                        if rng.gen_bool(0.5) {
                            Literal::positive(var)
                        } else {
                            Literal::negative(var)
                        }
                    })
                    .collect()
            })
            .collect();
        if let Ok(f) = QbfFormula::new(
            x_vars,
            y_vars,
            OuterQuantifier::Forall,
            MatrixKind::Cnf,
            terms,
        ) {
            return f;
        }
    }
}

#[test]
fn criterion_6_restriction_preserves_truth() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut nontrivial = 0;
    for trial in 0..100 {
        let f = random_forall_exists_cnf(&mut rng);
        let truth = f.qbf_truth_default().unwrap();
        match restrict(&f).unwrap() {
            RestrictOutcome::TriviallyTrue => assert!(truth, "trial {trial}"),
            RestrictOutcome::TriviallyFalse => assert!(!truth, "trial {trial}"),
            RestrictOutcome::Restricted { formula, .. } => {
                let report = formula.validate_restricted();
                assert!(report.all_ok(), "trial {trial}: {:?}", report.failures());
                assert_eq!(formula.qbf_truth_default().unwrap(), truth, "trial {trial}");
                nontrivial += 1;
            }
        }
    }
    assert!(nontrivial > 0);
    println!(
        "ACCEPTANCE 6 PASS: restriction preserved truth on 100 random instances ({nontrivial} nontrivial)"
    );
}

#[test]
fn criterion_7_structural_bounds() {
    for f in corpus() {
        let additive = reduce_to_additive_game(&f).unwrap();
        let (symmetric, degree) = additive.additive().unwrap().check_symmetry_and_sparsity();
        assert!(symmetric, "additive game not symmetric");
        assert!(degree <= 10, "degree {degree} exceeds 10");

        let boolean = reduce_to_boolean_game(&f).unwrap();
        let game = boolean.boolean().unwrap();
        for agent in 0..game.n() {
            let mentions = game.goal(agent).mentioned_others(agent);
            assert!(mentions <= 5, "goal of agent {agent} mentions {mentions}");
        }
    }
    println!("ACCEPTANCE 7 PASS: every additive game is symmetric with degree <= 10, every goal mentions <= 5 agents");
}

#[test]
fn criterion_8_strict_core_implies_core() {
    let mut checked = 0;
    // witness partitions from the corpus
    for f in corpus() {
        if !f.qbf_truth_default().unwrap() {
            continue;
        }
        let x = f.certifying_x_assignments(24).unwrap().remove(0);
        let boolean = reduce_to_boolean_game(&f).unwrap();
        let pi = boolean_witness_partition(&boolean, &x).unwrap();
        let game = boolean.boolean().unwrap();
        if is_stable(game, &pi, StabilityConcept::StrictCore).unwrap() {
            assert!(is_stable(game, &pi, StabilityConcept::Core).unwrap());
            checked += 1;
        }
        let additive = reduce_to_additive_game(&f).unwrap();
        for full in star_extensions(&additive, &x) {
            let pi = additive_witness_partition(&additive, &full).unwrap();
            let game = additive.additive().unwrap();
            if is_stable(game, &pi, StabilityConcept::StrictCore).unwrap() {
                assert!(is_stable(game, &pi, StabilityConcept::Core).unwrap());
                checked += 1;
            }
        }
    }
    // random small games and partitions
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..200 {
        let n = rng.gen_range(1..=6);
        let game = random_additive(&mut rng, n);
        let mut groups: BTreeMap<usize, Coalition> = BTreeMap::new();
        for agent in 0..n {
            let label = rng.gen_range(0..n);
            let entry = groups.entry(label).or_insert_with(Coalition::empty);
            *entry = entry.with(agent);
        }
        let blocks: Vec<Coalition> = groups.into_values().collect();
        let pi = Partition::new(n, blocks).unwrap();
        if is_stable(&game, &pi, StabilityConcept::StrictCore).unwrap() {
            assert!(is_stable(&game, &pi, StabilityConcept::Core).unwrap());
            checked += 1;
        }
    }
    assert!(checked > 0);
    println!("ACCEPTANCE 8 PASS: strict-core stability implied core stability on {checked} stable partitions");
}
