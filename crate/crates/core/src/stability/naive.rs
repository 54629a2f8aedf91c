//! Reference solver used for cross-validation: enumerates every set
//! partition and tests every non-empty subset, with no IR restriction and
//! no pruning. Exponential in the agent count; intended for games of at
//! most a dozen agents.

use super::{
    enumerate_partitions, Outcome, ScoredGame, SolveError, StabilityConcept, PARTITION_ENUM_CAP,
};
use crate::game::{Coalition, Partition};

/// Smallest (canonical order) coalition that rejects the partition under the
/// concept, scanning all `2^n - 1` non-empty subsets.
pub fn find_rejecting_coalition_full<G: ScoredGame>(
    game: &G,
    partition: &Partition,
    concept: StabilityConcept,
) -> Option<Coalition> {
    let n = game.agent_count();
    assert!(n <= 25, "full subset scan is limited to 25 agents");
    let current: Vec<i64> = (0..n)
        .map(|i| game.score(i, partition.block_of(i).expect("agent in range")))
        .collect();
    let mut subsets: Vec<Coalition> = (1u64..1 << n).map(Coalition::from_bits).collect();
    subsets.sort();
    subsets.into_iter().find(|&s| {
        let mut strict = false;
        for i in s.members() {
            let score = game.score(i, s);
            match concept {
                StabilityConcept::Core => {
                    if score <= current[i] {
                        return false;
                    }
                }
                StabilityConcept::StrictCore => {
                    if score < current[i] {
                        return false;
                    }
                    strict |= score > current[i];
                }
            }
        }
        concept == StabilityConcept::Core || strict
    })
}

pub fn is_stable_full<G: ScoredGame>(
    game: &G,
    partition: &Partition,
    concept: StabilityConcept,
) -> bool {
    find_rejecting_coalition_full(game, partition, concept).is_none()
}

/// First stable partition in restricted-growth-string order, or the
/// exhaustive negative verdict.
pub fn find_stable_partition_naive<G: ScoredGame>(
    game: &G,
    concept: StabilityConcept,
) -> Result<Outcome, SolveError> {
    let n = game.agent_count();
    if n > PARTITION_ENUM_CAP {
        return Err(SolveError::AgentCapExceeded {
            n,
            cap: PARTITION_ENUM_CAP,
        });
    }
    for partition in enumerate_partitions(n)? {
        if is_stable_full(game, &partition, concept) {
            return Ok(Outcome::Stable(partition));
        }
    }
    Ok(Outcome::NoStablePartition)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::AdditiveGame;
    use crate::stability::{find_stable_partition, SolverConfig};

    #[test]
    fn naive_agrees_with_solver_on_small_game() {
        let mut g = AdditiveGame::new(4);
        g.set_symmetric_value(0, 1, 3);
        g.set_symmetric_value(1, 2, -2);
        g.set_symmetric_value(2, 3, 4);
        for concept in [StabilityConcept::Core, StabilityConcept::StrictCore] {
            let fast = find_stable_partition(&g, concept, &SolverConfig::default()).unwrap();
            let slow = find_stable_partition_naive(&g, concept).unwrap();
            let fast_exists = matches!(fast.outcome, Outcome::Stable(_));
            let slow_exists = matches!(slow, Outcome::Stable(_));
            assert_eq!(fast_exists, slow_exists);
        }
    }
}
