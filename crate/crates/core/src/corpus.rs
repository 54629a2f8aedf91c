//! Seeded generation of small restricted exists-forall DNF formulas for
//! testing and benchmarking. Formulas are sampled directly in restricted
//! form: the fixed multiset of literal occurrences (each x-variable once
//! per sign, each y-variable three times with both signs) is dealt into
//! terms of two or three literals, rejecting deals that put three
//! x-literals in one term.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::formula::{Literal, MatrixKind, OuterQuantifier, QbfFormula, VarId};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("corpus needs at least 2 formulas to contain both labels, got {0}")]
    CountTooSmall(usize),
    #[error("variable bounds must allow at least one x-variable")]
    NoXVariables,
    #[error("could not produce both a true and a false formula within {0} attempts")]
    NoLabelMix(usize),
}

const SAMPLE_ATTEMPTS: usize = 10_000;

/// Sample one restricted formula with exactly `m` x-variables and `n`
/// y-variables. X-variables get ids `1..=m`, y-variables `m+1..=m+n`.
pub fn sample_restricted(rng: &mut impl Rng, m: usize, n: usize) -> QbfFormula {
    assert!(m >= 1, "need at least one x-variable");
    let x_vars: Vec<VarId> = (1..=m as VarId).collect();
    let y_vars: Vec<VarId> = (m as VarId + 1..=(m + n) as VarId).collect();

    let mut occurrences: Vec<Literal> = Vec::with_capacity(2 * m + 3 * n);
    for &v in &x_vars {
        occurrences.push(Literal::positive(v));
        occurrences.push(Literal::negative(v));
    }
    for &v in &y_vars {
        // three occurrences, both signs present
        let extra_negated = rng.gen_bool(0.5);
        occurrences.push(Literal::positive(v));
        occurrences.push(Literal::negative(v));
        occurrences.push(if extra_negated {
            Literal::negative(v)
        } else {
            Literal::positive(v)
        });
    }
    let total = occurrences.len();

    loop {
        // choose how many 3-literal terms; the remainder splits into pairs
        let feasible: Vec<usize> = (0..=total / 3)
            .filter(|&t3| (total - 3 * t3) % 2 == 0)
            .collect();
        let t3 = *feasible.choose(rng).expect("total >= 2 always splits");
        let t2 = (total - 3 * t3) / 2;

        occurrences.shuffle(rng);
        let mut terms: Vec<Vec<Literal>> = Vec::with_capacity(t3 + t2);
        let mut it = occurrences.iter().copied();
        for _ in 0..t3 {
            terms.push(vec![
                it.next().unwrap(),
                it.next().unwrap(),
                it.next().unwrap(),
            ]);
        }
        for _ in 0..t2 {
            terms.push(vec![it.next().unwrap(), it.next().unwrap()]);
        }
        terms.shuffle(rng);

        let three_x = terms.iter().any(|t| {
            t.len() == 3 && t.iter().all(|lit| lit.var <= m as VarId)
        });
        if three_x {
            continue;
        }
        let formula = QbfFormula::new(
            x_vars.clone(),
            y_vars.clone(),
            OuterQuantifier::Exists,
            MatrixKind::Dnf,
            terms,
        )
        .expect("sampled terms are well formed");
        debug_assert!(formula.validate_restricted().all_ok());
        return formula;
    }
}

/// Generate `count` restricted formulas with up to `max_x` x-variables and
/// up to `max_y` y-variables, guaranteeing that both true and false
/// formulas appear. Deterministic in the seed.
pub fn generate_corpus(
    seed: u64,
    count: usize,
    max_x: usize,
    max_y: usize,
) -> Result<Vec<QbfFormula>, CorpusError> {
    if count < 2 {
        return Err(CorpusError::CountTooSmall(count));
    }
    if max_x < 1 {
        return Err(CorpusError::NoXVariables);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sample = |rng: &mut ChaCha8Rng| {
        let m = rng.gen_range(1..=max_x);
        let n = rng.gen_range(0..=max_y);
        sample_restricted(rng, m, n)
    };

    let mut formulas: Vec<QbfFormula> = (0..count).map(|_| sample(&mut rng)).collect();
    let truth = |f: &QbfFormula| f.qbf_truth_default().expect("small formula");
    let mut seen_true = formulas.iter().any(&truth);
    let mut seen_false = formulas.iter().any(|f| !truth(f));
    let mut attempts = 0;
    while !(seen_true && seen_false) {
        if attempts >= SAMPLE_ATTEMPTS {
            return Err(CorpusError::NoLabelMix(SAMPLE_ATTEMPTS));
        }
        attempts += 1;
        let candidate = sample(&mut rng);
        let value = truth(&candidate);
        if (value && !seen_true) || (!value && !seen_false) {
            seen_true |= value;
            seen_false |= !value;
            let last = formulas.len() - 1;
            formulas[last] = candidate;
            // keep room for the other label if still missing
            if !(seen_true && seen_false) {
                formulas.swap(0, last);
            }
        }
    }
    Ok(formulas)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_are_restricted() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let m = rng.gen_range(1..=2);
            let n = rng.gen_range(0..=2);
            let f = sample_restricted(&mut rng, m, n);
            assert!(f.validate_restricted().all_ok());
            assert_eq!(f.x_vars.len(), m);
            assert_eq!(f.y_vars.len(), n);
        }
    }

    #[test]
    fn corpus_is_deterministic_and_mixed() {
        let a = generate_corpus(42, 40, 2, 2).unwrap();
        let b = generate_corpus(42, 40, 2, 2).unwrap();
        assert_eq!(a.len(), 40);
        for (fa, fb) in a.iter().zip(&b) {
            assert_eq!(fa.terms, fb.terms);
        }
        let truths: Vec<bool> = a.iter().map(|f| f.qbf_truth_default().unwrap()).collect();
        assert!(truths.iter().any(|&t| t));
        assert!(truths.iter().any(|&t| !t));
    }

    #[test]
    fn bad_parameters_rejected() {
        assert!(matches!(
            generate_corpus(1, 1, 2, 2),
            Err(CorpusError::CountTooSmall(1))
        ));
        assert!(matches!(
            generate_corpus(1, 5, 0, 2),
            Err(CorpusError::NoXVariables)
        ));
    }
}
