//! Two-block quantified Boolean formulas with a flat DNF or CNF matrix,
//! plus the occurrence-restriction transformation and a brute-force
//! truth oracle for desk-scale instances.

mod parse;
mod restrict;

pub use parse::{format_qbf, parse_qbf, ParseError};
pub use restrict::{restrict, RestrictOutcome};

use std::collections::{BTreeMap, HashMap};
use thiserror::Error;

/// Variable identifier as it appears in QDNF/QCNF files (1-based, DIMACS style).
pub type VarId = u32;

/// Default cap on total variable count for the brute-force oracle.
pub const DEFAULT_TRUTH_CAP: usize = 24;

#[derive(Debug, Error)]
pub enum FormulaError {
    #[error("variable {0} appears in the matrix but is not quantified")]
    Unquantified(VarId),
    #[error("variable {0} is quantified twice")]
    QuantifiedTwice(VarId),
    #[error("formula has no terms")]
    EmptyMatrix,
    #[error("term {index} has {size} literals, expected 1..=3")]
    TermSize { index: usize, size: usize },
    #[error("operation requires a {expected:?} matrix, got {actual:?}")]
    WrongMatrixKind {
        expected: MatrixKind,
        actual: MatrixKind,
    },
    #[error("operation requires outer quantifier {expected:?}, got {actual:?}")]
    WrongQuantifier {
        expected: OuterQuantifier,
        actual: OuterQuantifier,
    },
    #[error("assignment does not cover variable {0}")]
    MissingAssignment(VarId),
    #[error("{count} variables exceed the brute-force cap of {cap}")]
    TruthCapExceeded { count: usize, cap: usize },
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// A possibly negated occurrence of a variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub var: VarId,
    pub negated: bool,
}

impl Literal {
    pub fn positive(var: VarId) -> Self {
        Literal { var, negated: false }
    }

    pub fn negative(var: VarId) -> Self {
        Literal { var, negated: true }
    }

    pub fn negate(self) -> Self {
        Literal {
            var: self.var,
            negated: !self.negated,
        }
    }

    /// Signed DIMACS-style representation: negative integers are negated literals.
    pub fn to_signed(self) -> i64 {
        if self.negated {
            -(self.var as i64)
        } else {
            self.var as i64
        }
    }

    pub fn holds_under(self, value: bool) -> bool {
        value != self.negated
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    Dnf,
    Cnf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OuterQuantifier {
    Exists,
    Forall,
}

/// A prenex formula with two quantifier blocks: the outer block binds
/// `x_vars`, the inner block binds `y_vars` with the opposite quantifier.
/// `(Exists, Dnf)` is the shape of the hard problem; `(Forall, Cnf)` is its dual.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QbfFormula {
    pub x_vars: Vec<VarId>,
    pub y_vars: Vec<VarId>,
    pub outer: OuterQuantifier,
    pub matrix_kind: MatrixKind,
    pub terms: Vec<Vec<Literal>>,
}

impl QbfFormula {
    pub fn new(
        x_vars: Vec<VarId>,
        y_vars: Vec<VarId>,
        outer: OuterQuantifier,
        matrix_kind: MatrixKind,
        terms: Vec<Vec<Literal>>,
    ) -> Result<Self, FormulaError> {
        let f = QbfFormula {
            x_vars,
            y_vars,
            outer,
            matrix_kind,
            terms,
        };
        f.validate()?;
        Ok(f)
    }

    fn validate(&self) -> Result<(), FormulaError> {
        if self.terms.is_empty() {
            return Err(FormulaError::EmptyMatrix);
        }
        let mut seen: HashMap<VarId, ()> = HashMap::new();
        for &v in self.x_vars.iter().chain(&self.y_vars) {
            if seen.insert(v, ()).is_some() {
                return Err(FormulaError::QuantifiedTwice(v));
            }
        }
        for (index, term) in self.terms.iter().enumerate() {
            if term.is_empty() || term.len() > 3 {
                return Err(FormulaError::TermSize {
                    index,
                    size: term.len(),
                });
            }
            for lit in term {
                if !seen.contains_key(&lit.var) {
                    return Err(FormulaError::Unquantified(lit.var));
                }
            }
        }
        Ok(())
    }

    pub fn var_count(&self) -> usize {
        self.x_vars.len() + self.y_vars.len()
    }

    pub fn is_x_var(&self, var: VarId) -> bool {
        self.x_vars.contains(&var)
    }

    /// Evaluate the matrix under a total assignment.
    /// DNF: true iff some term has all literals true.
    /// CNF: true iff every term has some literal true.
    pub fn evaluate_matrix(
        &self,
        assignment: &HashMap<VarId, bool>,
    ) -> Result<bool, FormulaError> {
        let lookup = |lit: &Literal| -> Result<bool, FormulaError> {
            assignment
                .get(&lit.var)
                .map(|&v| lit.holds_under(v))
                .ok_or(FormulaError::MissingAssignment(lit.var))
        };
        match self.matrix_kind {
            MatrixKind::Dnf => {
                let mut any = false;
                for term in &self.terms {
                    let mut all = true;
                    for lit in term {
                        all &= lookup(lit)?;
                    }
                    any |= all;
                }
                Ok(any)
            }
            MatrixKind::Cnf => {
                let mut all = true;
                for term in &self.terms {
                    let mut any = false;
                    for lit in term {
                        any |= lookup(lit)?;
                    }
                    all &= any;
                }
                Ok(all)
            }
        }
    }

    /// Negate every literal and flip the matrix kind; quantifiers are unchanged.
    /// The result's matrix is the pointwise negation of the input's.
    pub fn negate_dnf_to_cnf(&self) -> Result<QbfFormula, FormulaError> {
        if self.matrix_kind != MatrixKind::Dnf {
            return Err(FormulaError::WrongMatrixKind {
                expected: MatrixKind::Dnf,
                actual: self.matrix_kind,
            });
        }
        Ok(self.negated_matrix())
    }

    /// De Morgan negation of the matrix: applies in both directions and is an involution.
    pub fn negated_matrix(&self) -> QbfFormula {
        QbfFormula {
            x_vars: self.x_vars.clone(),
            y_vars: self.y_vars.clone(),
            outer: self.outer,
            matrix_kind: match self.matrix_kind {
                MatrixKind::Dnf => MatrixKind::Cnf,
                MatrixKind::Cnf => MatrixKind::Dnf,
            },
            terms: self
                .terms
                .iter()
                .map(|t| t.iter().map(|l| l.negate()).collect())
                .collect(),
        }
    }

    /// The dual formula: negated matrix and flipped outer quantifier.
    /// `qbf_truth(f.dual()) == !qbf_truth(f)`.
    pub fn dual(&self) -> QbfFormula {
        let mut d = self.negated_matrix();
        d.outer = match self.outer {
            OuterQuantifier::Exists => OuterQuantifier::Forall,
            OuterQuantifier::Forall => OuterQuantifier::Exists,
        };
        d
    }

    /// Exact truth value by two-level enumeration:
    /// outer Exists means "some x-assignment such that all y-assignments satisfy the matrix",
    /// outer Forall means "every x-assignment has some satisfying y-assignment".
    pub fn qbf_truth(&self, cap: usize) -> Result<bool, FormulaError> {
        let masks = self.certifying_x_masks(cap)?;
        Ok(match self.outer {
            OuterQuantifier::Exists => !masks.is_empty(),
            OuterQuantifier::Forall => masks.len() == 1usize << self.x_vars.len(),
        })
    }

    pub fn qbf_truth_default(&self) -> Result<bool, FormulaError> {
        self.qbf_truth(DEFAULT_TRUTH_CAP)
    }

    /// All outer-block assignments for which the inner check succeeds
    /// (for Exists: all y-assignments satisfy; for Forall: some y-assignment satisfies),
    /// as maps from variable id to value.
    pub fn certifying_x_assignments(
        &self,
        cap: usize,
    ) -> Result<Vec<BTreeMap<VarId, bool>>, FormulaError> {
        let masks = self.certifying_x_masks(cap)?;
        Ok(masks
            .into_iter()
            .map(|m| {
                self.x_vars
                    .iter()
                    .enumerate()
                    .map(|(i, &v)| (v, m >> i & 1 == 1))
                    .collect()
            })
            .collect())
    }

    fn certifying_x_masks(&self, cap: usize) -> Result<Vec<u64>, FormulaError> {
        let count = self.var_count();
        if count > cap || cap > 63 {
            return Err(FormulaError::TruthCapExceeded { count, cap });
        }
        let compiled = CompiledMatrix::new(self);
        let xn = self.x_vars.len();
        let yn = self.y_vars.len();
        let mut out = Vec::new();
        for xm in 0u64..1u64 << xn {
            let mut inner_ok = match self.outer {
                OuterQuantifier::Exists => true, // need all y to satisfy
                OuterQuantifier::Forall => false, // need some y to satisfy
            };
            for ym in 0u64..1u64 << yn {
                let asg = xm | ym << xn;
                let sat = compiled.eval(asg);
                match self.outer {
                    OuterQuantifier::Exists => {
                        if !sat {
                            inner_ok = false;
                            break;
                        }
                    }
                    OuterQuantifier::Forall => {
                        if sat {
                            inner_ok = true;
                            break;
                        }
                    }
                }
            }
            if inner_ok {
                out.push(xm);
            }
        }
        Ok(out)
    }

    /// DNF trivial-truth check: a term made only of x-literals is satisfiable by the
    /// outer block alone and holds for every inner assignment.
    pub fn eliminate_trivial_terms(&self) -> Result<TrivialCheck, FormulaError> {
        if self.matrix_kind != MatrixKind::Dnf {
            return Err(FormulaError::WrongMatrixKind {
                expected: MatrixKind::Dnf,
                actual: self.matrix_kind,
            });
        }
        if self.outer != OuterQuantifier::Exists {
            return Err(FormulaError::WrongQuantifier {
                expected: OuterQuantifier::Exists,
                actual: self.outer,
            });
        }
        let all_x = |term: &Vec<Literal>| term.iter().all(|l| self.is_x_var(l.var));
        if self.terms.iter().any(all_x) {
            Ok(TrivialCheck::TriviallyTrue)
        } else {
            Ok(TrivialCheck::Unchanged(self.clone()))
        }
    }

    /// Check the occurrence restrictions of the hard problem:
    /// term sizes in {2,3}; each x-variable exactly once positive and once negative;
    /// each y-variable exactly three times with both signs present; no term with
    /// three x-literals.
    pub fn validate_restricted(&self) -> RestrictionReport {
        let term_sizes_ok = self.terms.iter().all(|t| t.len() == 2 || t.len() == 3);

        let mut pos: BTreeMap<VarId, usize> = BTreeMap::new();
        let mut neg: BTreeMap<VarId, usize> = BTreeMap::new();
        for term in &self.terms {
            for lit in term {
                *if lit.negated { &mut neg } else { &mut pos }
                    .entry(lit.var)
                    .or_insert(0) += 1;
            }
        }
        let occ = |m: &BTreeMap<VarId, usize>, v: VarId| m.get(&v).copied().unwrap_or(0);

        let x_occurrences_ok = self
            .x_vars
            .iter()
            .all(|&v| occ(&pos, v) == 1 && occ(&neg, v) == 1);
        let y_occurrences_ok = self.y_vars.iter().all(|&v| {
            let p = occ(&pos, v);
            let n = occ(&neg, v);
            p + n == 3 && p >= 1 && n >= 1
        });
        let no_three_x_terms = self
            .terms
            .iter()
            .all(|t| t.iter().filter(|l| self.is_x_var(l.var)).count() <= 2);

        RestrictionReport {
            term_sizes_ok,
            x_occurrences_ok,
            y_occurrences_ok,
            no_three_x_terms,
        }
    }
}

/// Outcome of [`QbfFormula::eliminate_trivial_terms`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TrivialCheck {
    TriviallyTrue,
    Unchanged(QbfFormula),
}

/// Per-check results of the occurrence restrictions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RestrictionReport {
    pub term_sizes_ok: bool,
    pub x_occurrences_ok: bool,
    pub y_occurrences_ok: bool,
    pub no_three_x_terms: bool,
}

impl RestrictionReport {
    pub fn all_ok(&self) -> bool {
        self.term_sizes_ok && self.x_occurrences_ok && self.y_occurrences_ok && self.no_three_x_terms
    }

    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.term_sizes_ok {
            out.push("term sizes must be 2 or 3");
        }
        if !self.x_occurrences_ok {
            out.push("each x-variable must occur exactly once positive and once negative");
        }
        if !self.y_occurrences_ok {
            out.push("each y-variable must occur exactly three times with both signs");
        }
        if !self.no_three_x_terms {
            out.push("no term may contain three x-literals");
        }
        out
    }
}

/// Matrix compiled to bitmask tests over a dense variable order
/// (x-block first, then y-block). Used by the truth oracle.
struct CompiledMatrix {
    kind: MatrixKind,
    terms: Vec<(u64, u64)>, // (positive mask, negative mask)
}

impl CompiledMatrix {
    fn new(f: &QbfFormula) -> Self {
        let mut index: HashMap<VarId, usize> = HashMap::new();
        for (i, &v) in f.x_vars.iter().chain(&f.y_vars).enumerate() {
            index.insert(v, i);
        }
        let terms = f
            .terms
            .iter()
            .map(|t| {
                let mut pos = 0u64;
                let mut neg = 0u64;
                for lit in t {
                    let bit = 1u64 << index[&lit.var];
                    if lit.negated {
                        neg |= bit;
                    } else {
                        pos |= bit;
                    }
                }
                (pos, neg)
            })
            .collect();
        CompiledMatrix {
            kind: f.matrix_kind,
            terms,
        }
    }

    fn eval(&self, asg: u64) -> bool {
        match self.kind {
            MatrixKind::Dnf => self
                .terms
                .iter()
                .any(|&(pos, neg)| asg & pos == pos && asg & neg == 0),
            MatrixKind::Cnf => self
                .terms
                .iter()
                .all(|&(pos, neg)| asg & pos != 0 || neg & !asg != 0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lit(signed: i64) -> Literal {
        if signed < 0 {
            Literal::negative((-signed) as VarId)
        } else {
            Literal::positive(signed as VarId)
        }
    }

    fn dnf(x: &[VarId], y: &[VarId], terms: &[&[i64]]) -> QbfFormula {
        QbfFormula::new(
            x.to_vec(),
            y.to_vec(),
            OuterQuantifier::Exists,
            MatrixKind::Dnf,
            terms.iter().map(|t| t.iter().map(|&s| lit(s)).collect()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn evaluate_dnf_matrix() {
        // (x1 & y2) | (!x1 & !y2)
        let f = dnf(&[1], &[2], &[&[1, 2], &[-1, -2]]);
        let mut a = HashMap::new();
        a.insert(1, true);
        a.insert(2, true);
        assert!(f.evaluate_matrix(&a).unwrap());
        a.insert(2, false);
        assert!(!f.evaluate_matrix(&a).unwrap());
    }

    #[test]
    fn evaluate_cnf_dual_of_dnf() {
        let f = dnf(&[1], &[2], &[&[1, 2], &[-1, -2]]);
        let g = f.negate_dnf_to_cnf().unwrap();
        // (!x1 | !y2) & (x1 | y2) under {x1=T, y2=F} -> true
        let mut a = HashMap::new();
        a.insert(1, true);
        a.insert(2, false);
        assert!(g.evaluate_matrix(&a).unwrap());
        // pointwise negation over all four assignments
        for bits in 0..4u32 {
            let mut a = HashMap::new();
            a.insert(1, bits & 1 == 1);
            a.insert(2, bits & 2 == 2);
            assert_eq!(
                g.evaluate_matrix(&a).unwrap(),
                !f.evaluate_matrix(&a).unwrap()
            );
        }
    }

    #[test]
    fn evaluate_missing_variable_errors() {
        let f = dnf(&[1], &[2], &[&[1, 2]]);
        let mut a = HashMap::new();
        a.insert(1, true);
        assert!(matches!(
            f.evaluate_matrix(&a),
            Err(FormulaError::MissingAssignment(2))
        ));
    }

    #[test]
    fn truth_simple_cases() {
        // E x1 A y2 (x1 & y2) | (x1 & !y2) -> true with x1 = T
        let t = dnf(&[1], &[2], &[&[1, 2], &[1, -2]]);
        assert!(t.qbf_truth_default().unwrap());
        // E x1 A y2 (x1 & y2) | (!x1 & !y2) -> false (4-row table)
        let f = dnf(&[1], &[2], &[&[1, 2], &[-1, -2]]);
        assert!(!f.qbf_truth_default().unwrap());
    }

    #[test]
    fn truth_all_x_term_is_true() {
        let f = dnf(&[1, 2], &[3], &[&[1, -2], &[-1, 3], &[2, -3, 3]]);
        assert_eq!(
            f.eliminate_trivial_terms().unwrap(),
            TrivialCheck::TriviallyTrue
        );
        assert!(f.qbf_truth_default().unwrap());
    }

    #[test]
    fn eliminate_trivial_identity_without_all_x_term() {
        let f = dnf(&[1], &[2], &[&[1, 2], &[-1, -2]]);
        assert_eq!(
            f.eliminate_trivial_terms().unwrap(),
            TrivialCheck::Unchanged(f.clone())
        );
    }

    #[test]
    fn truth_cap_enforced() {
        let f = dnf(&[1], &[2], &[&[1, 2]]);
        assert!(matches!(
            f.qbf_truth(1),
            Err(FormulaError::TruthCapExceeded { count: 2, cap: 1 })
        ));
    }

    #[test]
    fn negation_is_involution() {
        let f = dnf(&[1], &[2, 3], &[&[1, -2], &[-1, 3, -3]]);
        let back = f.negate_dnf_to_cnf().unwrap().negated_matrix();
        assert_eq!(back, f);
    }

    #[test]
    fn dual_flips_truth() {
        let cases = [
            dnf(&[1], &[2], &[&[1, 2], &[1, -2]]),
            dnf(&[1], &[2], &[&[1, 2], &[-1, -2]]),
            dnf(&[1, 2], &[3], &[&[1, 3], &[-2, -3], &[-1, 2, 3]]),
        ];
        for f in cases {
            assert_eq!(
                f.qbf_truth_default().unwrap(),
                !f.dual().qbf_truth_default().unwrap()
            );
        }
    }

    #[test]
    fn restriction_report_violations() {
        // x1 occurring twice positively
        let f = dnf(&[1], &[2], &[&[1, 2], &[1, -2, 2]]);
        let r = f.validate_restricted();
        assert!(!r.x_occurrences_ok);
        // three-x term
        let g = dnf(&[1, 2, 3], &[4], &[&[1, 2, 3], &[-1, -2, 4], &[-3, -4, 4]]);
        assert!(!g.validate_restricted().no_three_x_terms);
    }

    #[test]
    fn restriction_report_accepts_fixture_shape() {
        // m=1 n=1: (x1 & y2) | (!x1 & !y2 & y2)
        let f = dnf(&[1], &[2], &[&[1, 2], &[-1, -2, 2]]);
        assert!(f.validate_restricted().all_ok());
    }

    #[test]
    fn rejects_degenerate_inputs() {
        assert!(matches!(
            QbfFormula::new(vec![], vec![], OuterQuantifier::Exists, MatrixKind::Dnf, vec![]),
            Err(FormulaError::EmptyMatrix)
        ));
        assert!(matches!(
            QbfFormula::new(
                vec![1],
                vec![1],
                OuterQuantifier::Exists,
                MatrixKind::Dnf,
                vec![vec![lit(1)]]
            ),
            Err(FormulaError::QuantifiedTwice(1))
        ));
        assert!(matches!(
            QbfFormula::new(
                vec![1],
                vec![],
                OuterQuantifier::Exists,
                MatrixKind::Dnf,
                vec![vec![lit(1), lit(2)]]
            ),
            Err(FormulaError::Unquantified(2))
        ));
    }
}
