//! Occurrence-restriction transformation for forall-exists CNF formulas:
//! unit propagation, then relabelling of every variable occurrence with
//! fresh existential copies tied together by implication wheels.

use std::collections::BTreeMap;

use super::{FormulaError, Literal, MatrixKind, OuterQuantifier, QbfFormula, VarId};

/// Result of [`restrict`]. Degenerate inputs collapse during unit
/// propagation and are reported as tagged trivial outcomes rather than
/// errors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RestrictOutcome {
    Restricted {
        formula: QbfFormula,
        /// Original variable id -> fresh copy ids, in occurrence (wheel) order.
        copies: BTreeMap<VarId, Vec<VarId>>,
    },
    /// Propagation satisfied every clause: the matrix is a tautology.
    TriviallyTrue,
    /// Propagation derived an empty clause, or forced a universal variable.
    TriviallyFalse,
}

/// Transform a forall-exists CNF formula (terms of at most 3 literals) into
/// an equivalent one in which every universal variable occurs exactly once
/// positive and once negative, and every existential variable occurs exactly
/// three times with both signs present.
///
/// Universal variables keep their quantifier; each of their occurrences is
/// replaced by a fresh existential copy and an implication wheel running
/// through the original variable is appended as 2-literal clauses. Original
/// existential variables are discarded entirely in favour of their copies,
/// whose wheel closes on itself. A variable occurring once still gets a
/// length-1 wheel, since a lone occurrence could never meet the occurrence
/// counts.
pub fn restrict(f: &QbfFormula) -> Result<RestrictOutcome, FormulaError> {
    if f.outer != OuterQuantifier::Forall {
        return Err(FormulaError::WrongQuantifier {
            expected: OuterQuantifier::Forall,
            actual: f.outer,
        });
    }
    if f.matrix_kind != MatrixKind::Cnf {
        return Err(FormulaError::WrongMatrixKind {
            expected: MatrixKind::Cnf,
            actual: f.matrix_kind,
        });
    }

    let mut clauses: Vec<Vec<Literal>> = f.terms.clone();
    match propagate_units(&mut clauses, &f.x_vars) {
        Propagation::Contradiction => return Ok(RestrictOutcome::TriviallyFalse),
        Propagation::AllSatisfied => return Ok(RestrictOutcome::TriviallyTrue),
        Propagation::Done => {}
    }

    let mut next_var: VarId = f
        .x_vars
        .iter()
        .chain(&f.y_vars)
        .copied()
        .max()
        .unwrap_or(0)
        + 1;
    let mut copies: BTreeMap<VarId, Vec<VarId>> = BTreeMap::new();
    let mut wheel_clauses: Vec<Vec<Literal>> = Vec::new();
    let mut new_y_vars: Vec<VarId> = Vec::new();
    let mut kept_x_vars: Vec<VarId> = Vec::new();

    // Occurrence positions per variable, in term order left-to-right.
    let occurrences = |clauses: &[Vec<Literal>], var: VarId| -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (ti, term) in clauses.iter().enumerate() {
            for (li, lit) in term.iter().enumerate() {
                if lit.var == var {
                    out.push((ti, li));
                }
            }
        }
        out
    };

    for &x in &f.x_vars {
        let occ = occurrences(&clauses, x);
        if occ.is_empty() {
            // Propagation removed every occurrence; the variable is vacuous.
            continue;
        }
        kept_x_vars.push(x);
        let fresh: Vec<VarId> = (0..occ.len())
            .map(|_| {
                let v = next_var;
                next_var += 1;
                v
            })
            .collect();
        for (&(ti, li), &copy) in occ.iter().zip(&fresh) {
            clauses[ti][li].var = copy;
        }
        // (x -> c1), (c1 -> c2), ..., (cn -> x)
        let mut prev = Literal::positive(x);
        for &copy in &fresh {
            wheel_clauses.push(vec![prev.negate(), Literal::positive(copy)]);
            prev = Literal::positive(copy);
        }
        wheel_clauses.push(vec![prev.negate(), Literal::positive(x)]);
        new_y_vars.extend(&fresh);
        copies.insert(x, fresh);
    }

    for &y in &f.y_vars {
        let occ = occurrences(&clauses, y);
        if occ.is_empty() {
            continue;
        }
        let fresh: Vec<VarId> = (0..occ.len())
            .map(|_| {
                let v = next_var;
                next_var += 1;
                v
            })
            .collect();
        for (&(ti, li), &copy) in occ.iter().zip(&fresh) {
            clauses[ti][li].var = copy;
        }
        // Closed wheel among the copies; the original variable is discarded.
        for r in 0..fresh.len() {
            let from = fresh[r];
            let to = fresh[(r + 1) % fresh.len()];
            wheel_clauses.push(vec![Literal::negative(from), Literal::positive(to)]);
        }
        new_y_vars.extend(&fresh);
        copies.insert(y, fresh);
    }

    clauses.extend(wheel_clauses);
    let formula = QbfFormula::new(
        kept_x_vars,
        new_y_vars,
        OuterQuantifier::Forall,
        MatrixKind::Cnf,
        clauses,
    )?;
    Ok(RestrictOutcome::Restricted { formula, copies })
}

enum Propagation {
    Done,
    AllSatisfied,
    Contradiction,
}

/// Iterated unit propagation over a CNF clause list. A unit clause on a
/// universal variable falsifies the matrix for one of its values, so the
/// forall-exists formula is false outright.
fn propagate_units(clauses: &mut Vec<Vec<Literal>>, x_vars: &[VarId]) -> Propagation {
    loop {
        let unit = clauses.iter().find_map(|c| {
            if c.len() == 1 {
                Some(c[0])
            } else {
                None
            }
        });
        let Some(lit) = unit else {
            return if clauses.is_empty() {
                Propagation::AllSatisfied
            } else {
                Propagation::Done
            };
        };
        if x_vars.contains(&lit.var) {
            return Propagation::Contradiction;
        }
        let mut empty = false;
        clauses.retain_mut(|clause| {
            if clause.iter().any(|l| *l == lit) {
                return false; // satisfied
            }
            clause.retain(|l| *l != lit.negate());
            if clause.is_empty() {
                empty = true;
            }
            true
        });
        if empty {
            return Propagation::Contradiction;
        }
        if clauses.is_empty() {
            return Propagation::AllSatisfied;
        }
    }
}
