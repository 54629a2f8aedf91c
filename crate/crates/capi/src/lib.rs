//! C bindings for the hedonic game toolkit.
//!
//! All functions return a `HedonicStatus` code; results come back through
//! out-pointers to opaque handles or malloc-style strings. Handles must be
//! released with the matching `_free` function, strings with
//! `hedonic_string_free`. On any non-OK status a thread-local message is
//! available via `hedonic_last_error_message`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::ptr;

use hedonic::formula::{parse_qbf, restrict, QbfFormula, RestrictOutcome, DEFAULT_TRUTH_CAP};
use hedonic::game::{
    format_additive_game, format_boolean_game, format_partition, parse_additive_game,
    parse_boolean_game, parse_partition, AdditiveGame, BooleanGame, Partition,
};
use hedonic::reductions::{reduce_to_additive_game, reduce_to_boolean_game, ReducedGame};
use hedonic::stability::naive::find_rejecting_coalition_full;
use hedonic::stability::{
    find_blocking_coalition, find_stable_partition, find_weakly_blocking_coalition, Outcome,
    ScoredGame, SolverConfig, StabilityConcept,
};

/// Status codes returned by every API function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HedonicStatus {
    /// Success.
    HedonicOk = 0,
    /// Unexpected internal failure.
    HedonicErrInternal = 1,
    /// Input text failed to parse.
    HedonicErrParse = 2,
    /// Formula violates the restricted occurrence form.
    HedonicErrRestriction = 3,
    /// Instance exceeds the configured budget or agent cap.
    HedonicErrBudget = 4,
    /// Null pointer or out-of-range argument.
    HedonicErrArgument = 5,
}

use HedonicStatus::*;

/// Stability concepts accepted by solve and verify calls.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HedonicConcept {
    HedonicCore = 0,
    HedonicStrictCore = 1,
}

/// Game constructions available from a restricted formula.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HedonicTarget {
    HedonicTargetBoolean = 0,
    HedonicTargetAdditive = 1,
}

/// Result of the occurrence-form transformation.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HedonicRestrictOutcome {
    HedonicRestricted = 0,
    HedonicTriviallyTrue = 1,
    HedonicTriviallyFalse = 2,
}

/// Opaque quantified formula handle.
pub struct HedonicFormula(QbfFormula);

enum GameKind {
    Additive(AdditiveGame),
    Boolean(BooleanGame),
}

/// Opaque game handle (additive or Boolean).
pub struct HedonicGame(GameKind);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn fail(status: HedonicStatus, message: impl std::fmt::Display) -> HedonicStatus {
    let text = message.to_string().replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(text).unwrap_or_default();
    });
    status
}

/// Message describing the most recent error on this thread. The pointer
/// stays valid until the next failing call on the same thread. Never null.
#[no_mangle]
pub extern "C" fn hedonic_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

unsafe fn read_utf8<'a>(text: *const c_char) -> Result<&'a str, HedonicStatus> {
    if text.is_null() {
        return Err(fail(HedonicErrArgument, "null text pointer"));
    }
    CStr::from_ptr(text)
        .to_str()
        .map_err(|e| fail(HedonicErrParse, format!("input is not UTF-8: {e}")))
}

fn concept_of(concept: HedonicConcept) -> StabilityConcept {
    match concept {
        HedonicConcept::HedonicCore => StabilityConcept::Core,
        HedonicConcept::HedonicStrictCore => StabilityConcept::StrictCore,
    }
}

fn export_string(text: String, out: *mut *mut c_char) -> HedonicStatus {
    match CString::new(text) {
        Ok(s) => {
            unsafe { *out = s.into_raw() };
            HedonicOk
        }
        Err(e) => fail(HedonicErrInternal, e),
    }
}

/// Parse a quantified formula from text.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hedonic_formula_parse(
    text: *const c_char,
    out: *mut *mut HedonicFormula,
) -> HedonicStatus {
    if out.is_null() {
        return fail(HedonicErrArgument, "null output pointer");
    }
    let text = match read_utf8(text) {
        Ok(t) => t,
        Err(status) => return status,
    };
    match parse_qbf(text) {
        Ok(f) => {
            *out = Box::into_raw(Box::new(HedonicFormula(f)));
            HedonicOk
        }
        Err(e) => fail(HedonicErrParse, e),
    }
}

/// Release a formula handle. Accepts null.
///
/// # Safety
/// `formula` must have come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn hedonic_formula_free(formula: *mut HedonicFormula) {
    if !formula.is_null() {
        drop(Box::from_raw(formula));
    }
}

/// Decide the formula by exhaustive assignment search; writes 1 for true,
/// 0 for false.
///
/// # Safety
/// `formula` must be a live handle and `out_truth` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hedonic_formula_truth(
    formula: *const HedonicFormula,
    out_truth: *mut i32,
) -> HedonicStatus {
    if formula.is_null() || out_truth.is_null() {
        return fail(HedonicErrArgument, "null pointer");
    }
    match (*formula).0.qbf_truth(DEFAULT_TRUTH_CAP) {
        Ok(v) => {
            *out_truth = i32::from(v);
            HedonicOk
        }
        Err(e) => fail(HedonicErrBudget, e),
    }
}

/// Transform a forall-exists CNF into restricted occurrence form. On
/// `HEDONIC_RESTRICTED` a fresh formula handle is written to `out`;
/// on the trivial outcomes `out` receives null.
///
/// # Safety
/// `formula` must be a live handle; `out` and `out_outcome` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn hedonic_formula_restrict(
    formula: *const HedonicFormula,
    out: *mut *mut HedonicFormula,
    out_outcome: *mut HedonicRestrictOutcome,
) -> HedonicStatus {
    if formula.is_null() || out.is_null() || out_outcome.is_null() {
        return fail(HedonicErrArgument, "null pointer");
    }
    *out = ptr::null_mut();
    match restrict(&(*formula).0) {
        Ok(RestrictOutcome::Restricted { formula, .. }) => {
            *out_outcome = HedonicRestrictOutcome::HedonicRestricted;
            *out = Box::into_raw(Box::new(HedonicFormula(formula)));
            HedonicOk
        }
        Ok(RestrictOutcome::TriviallyTrue) => {
            *out_outcome = HedonicRestrictOutcome::HedonicTriviallyTrue;
            HedonicOk
        }
        Ok(RestrictOutcome::TriviallyFalse) => {
            *out_outcome = HedonicRestrictOutcome::HedonicTriviallyFalse;
            HedonicOk
        }
        Err(e) => fail(HedonicErrRestriction, e),
    }
}

/// Serialize a formula back to its text format.
///
/// # Safety
/// `formula` must be a live handle and `out_text` a valid pointer; free the
/// result with `hedonic_string_free`.
#[no_mangle]
pub unsafe extern "C" fn hedonic_formula_format(
    formula: *const HedonicFormula,
    out_text: *mut *mut c_char,
) -> HedonicStatus {
    if formula.is_null() || out_text.is_null() {
        return fail(HedonicErrArgument, "null pointer");
    }
    export_string(hedonic::formula::format_qbf(&(*formula).0), out_text)
}

/// Build a game from a restricted formula.
///
/// # Safety
/// `formula` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hedonic_reduce(
    formula: *const HedonicFormula,
    target: HedonicTarget,
    out: *mut *mut HedonicGame,
) -> HedonicStatus {
    if formula.is_null() || out.is_null() {
        return fail(HedonicErrArgument, "null pointer");
    }
    let reduced = match target {
        HedonicTarget::HedonicTargetBoolean => reduce_to_boolean_game(&(*formula).0),
        HedonicTarget::HedonicTargetAdditive => reduce_to_additive_game(&(*formula).0),
    };
    match reduced {
        Ok(artifact) => {
            let kind = match artifact.game {
                ReducedGame::Additive(g) => GameKind::Additive(g),
                ReducedGame::Boolean(g) => GameKind::Boolean(g),
            };
            *out = Box::into_raw(Box::new(HedonicGame(kind)));
            HedonicOk
        }
        Err(e) => fail(HedonicErrRestriction, e),
    }
}

/// Parse a game file (`p ahg` or `p bhg` header) from text.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hedonic_game_parse(
    text: *const c_char,
    out: *mut *mut HedonicGame,
) -> HedonicStatus {
    if out.is_null() {
        return fail(HedonicErrArgument, "null output pointer");
    }
    let text = match read_utf8(text) {
        Ok(t) => t,
        Err(status) => return status,
    };
    let header_kind = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('c'))
        .and_then(|l| l.split_whitespace().nth(1));
    let parsed = match header_kind {
        Some("ahg") => parse_additive_game(text).map(GameKind::Additive),
        Some("bhg") => parse_boolean_game(text).map(GameKind::Boolean),
        _ => {
            return fail(HedonicErrParse, "expected a `p ahg` or `p bhg` header");
        }
    };
    match parsed {
        Ok(kind) => {
            *out = Box::into_raw(Box::new(HedonicGame(kind)));
            HedonicOk
        }
        Err(e) => fail(HedonicErrParse, e),
    }
}

/// Release a game handle. Accepts null.
///
/// # Safety
/// `game` must have come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn hedonic_game_free(game: *mut HedonicGame) {
    if !game.is_null() {
        drop(Box::from_raw(game));
    }
}

/// Number of agents in the game.
///
/// # Safety
/// `game` must be a live handle and `out_count` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hedonic_game_agent_count(
    game: *const HedonicGame,
    out_count: *mut usize,
) -> HedonicStatus {
    if game.is_null() || out_count.is_null() {
        return fail(HedonicErrArgument, "null pointer");
    }
    *out_count = match &(*game).0 {
        GameKind::Additive(g) => g.n(),
        GameKind::Boolean(g) => g.n(),
    };
    HedonicOk
}

/// Serialize a game back to its text format.
///
/// # Safety
/// `game` must be a live handle and `out_text` a valid pointer; free the
/// result with `hedonic_string_free`.
#[no_mangle]
pub unsafe extern "C" fn hedonic_game_format(
    game: *const HedonicGame,
    out_text: *mut *mut c_char,
) -> HedonicStatus {
    if game.is_null() || out_text.is_null() {
        return fail(HedonicErrArgument, "null pointer");
    }
    let text = match &(*game).0 {
        GameKind::Additive(g) => {
            let (symmetric, _) = g.check_symmetry_and_sparsity();
            format_additive_game(g, symmetric)
        }
        GameKind::Boolean(g) => format_boolean_game(g),
    };
    export_string(text, out_text)
}

fn solve_any<G: ScoredGame>(
    game: &G,
    concept: StabilityConcept,
    budget: u64,
    out_exists: *mut i32,
    out_partition: *mut *mut c_char,
) -> HedonicStatus {
    let config = SolverConfig {
        agent_cap: 40,
        budget: if budget == 0 {
            SolverConfig::default().budget
        } else {
            budget
        },
        ..SolverConfig::default()
    };
    match find_stable_partition(game, concept, &config) {
        Ok(result) => match result.outcome {
            Outcome::Stable(p) => {
                unsafe { *out_exists = 1 };
                export_string(format_partition(&p), out_partition)
            }
            Outcome::NoStablePartition => {
                unsafe {
                    *out_exists = 0;
                    *out_partition = ptr::null_mut();
                }
                HedonicOk
            }
        },
        Err(e) => fail(HedonicErrBudget, e),
    }
}

/// Search exhaustively for a stable partition. Writes 1 and the partition
/// text (one block per line) when one exists, 0 and null otherwise.
/// `budget` of 0 means the default work budget.
///
/// # Safety
/// `game` must be a live handle; `out_exists` and `out_partition` valid
/// pointers. Free the partition with `hedonic_string_free`.
#[no_mangle]
pub unsafe extern "C" fn hedonic_solve(
    game: *const HedonicGame,
    concept: HedonicConcept,
    budget: u64,
    out_exists: *mut i32,
    out_partition: *mut *mut c_char,
) -> HedonicStatus {
    if game.is_null() || out_exists.is_null() || out_partition.is_null() {
        return fail(HedonicErrArgument, "null pointer");
    }
    let concept = concept_of(concept);
    match &(*game).0 {
        GameKind::Additive(g) => solve_any(g, concept, budget, out_exists, out_partition),
        GameKind::Boolean(g) => solve_any(g, concept, budget, out_exists, out_partition),
    }
}

fn verify_any<G: ScoredGame>(
    game: &G,
    partition: &Partition,
    concept: StabilityConcept,
    out_stable: *mut i32,
    out_blocker: *mut *mut c_char,
) -> HedonicStatus {
    let blocker = if game.agent_count() <= 20 {
        Ok(find_rejecting_coalition_full(game, partition, concept))
    } else {
        match concept {
            StabilityConcept::Core => find_blocking_coalition(game, partition),
            StabilityConcept::StrictCore => find_weakly_blocking_coalition(game, partition),
        }
    };
    match blocker {
        Ok(None) => {
            unsafe {
                *out_stable = 1;
                *out_blocker = ptr::null_mut();
            }
            HedonicOk
        }
        Ok(Some(s)) => {
            unsafe { *out_stable = 0 };
            let ids: Vec<String> = s.members().map(|a| a.to_string()).collect();
            export_string(ids.join(" "), out_blocker)
        }
        Err(e) => fail(HedonicErrBudget, e),
    }
}

/// Test a partition for stability. Writes 1 when stable; otherwise 0 plus
/// the members of a rejecting coalition as a space-separated string.
///
/// # Safety
/// `game` must be a live handle, `partition_text` NUL-terminated, and the
/// out-pointers valid. Free the blocker with `hedonic_string_free`.
#[no_mangle]
pub unsafe extern "C" fn hedonic_verify(
    game: *const HedonicGame,
    partition_text: *const c_char,
    concept: HedonicConcept,
    out_stable: *mut i32,
    out_blocker: *mut *mut c_char,
) -> HedonicStatus {
    if game.is_null() || out_stable.is_null() || out_blocker.is_null() {
        return fail(HedonicErrArgument, "null pointer");
    }
    let text = match read_utf8(partition_text) {
        Ok(t) => t,
        Err(status) => return status,
    };
    let n = match &(*game).0 {
        GameKind::Additive(g) => g.n(),
        GameKind::Boolean(g) => g.n(),
    };
    let partition = match parse_partition(text, n) {
        Ok(p) => p,
        Err(e) => return fail(HedonicErrParse, e),
    };
    let concept = concept_of(concept);
    match &(*game).0 {
        GameKind::Additive(g) => verify_any(g, &partition, concept, out_stable, out_blocker),
        GameKind::Boolean(g) => verify_any(g, &partition, concept, out_stable, out_blocker),
    }
}

/// Release a string returned by this library. Accepts null.
///
/// # Safety
/// `text` must have come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn hedonic_string_free(text: *mut c_char) {
    if !text.is_null() {
        drop(CString::from_raw(text));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(text: &str) -> CString {
        CString::new(text).unwrap()
    }

    const TRUE_FORMULA: &str = "p qdnf 2 1 3\ne 1 2 0\na 3 0\n1 2 0\n-1 3 -3 0\n-2 3 0\n";
    const FALSE_FORMULA: &str = "p qdnf 1 1 2\ne 1 0\na 2 0\n1 2 0\n-1 -2 2 0\n";

    unsafe fn parse_formula(text: &str) -> *mut HedonicFormula {
        let mut handle = ptr::null_mut();
        assert_eq!(
            hedonic_formula_parse(c(text).as_ptr(), &mut handle),
            HedonicOk
        );
        handle
    }

    #[test]
    fn parse_truth_roundtrip() {
        unsafe {
            let f = parse_formula(TRUE_FORMULA);
            let mut truth = -1;
            assert_eq!(hedonic_formula_truth(f, &mut truth), HedonicOk);
            assert_eq!(truth, 1);

            let mut text = ptr::null_mut();
            assert_eq!(hedonic_formula_format(f, &mut text), HedonicOk);
            let round = CStr::from_ptr(text).to_str().unwrap().to_owned();
            hedonic_string_free(text);
            hedonic_formula_free(f);

            let f2 = parse_formula(&round);
            let mut truth2 = -1;
            assert_eq!(hedonic_formula_truth(f2, &mut truth2), HedonicOk);
            assert_eq!(truth2, 1);
            hedonic_formula_free(f2);
        }
    }

    #[test]
    fn parse_error_sets_message() {
        unsafe {
            let mut handle = ptr::null_mut();
            let status = hedonic_formula_parse(c("p qdnf x\n").as_ptr(), &mut handle);
            assert_eq!(status, HedonicErrParse);
            let message = CStr::from_ptr(hedonic_last_error_message());
            assert!(!message.to_bytes().is_empty());
        }
    }

    #[test]
    fn null_arguments_are_rejected() {
        unsafe {
            assert_eq!(
                hedonic_formula_parse(ptr::null(), ptr::null_mut()),
                HedonicErrArgument
            );
            let mut truth = 0;
            assert_eq!(
                hedonic_formula_truth(ptr::null(), &mut truth),
                HedonicErrArgument
            );
        }
    }

    #[test]
    fn restrict_produces_new_formula() {
        unsafe {
            let cnf = "p qcnf 1 1 2\na 1 0\ne 2 0\n1 2 0\n-1 -2 0\n";
            let f = parse_formula(cnf);
            let mut restricted = ptr::null_mut();
            let mut outcome = HedonicRestrictOutcome::HedonicTriviallyFalse;
            assert_eq!(
                hedonic_formula_restrict(f, &mut restricted, &mut outcome),
                HedonicOk
            );
            assert_eq!(outcome, HedonicRestrictOutcome::HedonicRestricted);
            assert!(!restricted.is_null());
            hedonic_formula_free(restricted);
            hedonic_formula_free(f);
        }
    }

    #[test]
    fn reduce_solve_verify_pipeline() {
        unsafe {
            for (text, expected) in [(TRUE_FORMULA, 1), (FALSE_FORMULA, 0)] {
                let f = parse_formula(text);
                let mut game = ptr::null_mut();
                assert_eq!(
                    hedonic_reduce(f, HedonicTarget::HedonicTargetAdditive, &mut game),
                    HedonicOk
                );
                let mut count = 0usize;
                assert_eq!(hedonic_game_agent_count(game, &mut count), HedonicOk);
                assert!(count > 0);

                let mut exists = -1;
                let mut partition = ptr::null_mut();
                assert_eq!(
                    hedonic_solve(
                        game,
                        HedonicConcept::HedonicStrictCore,
                        0,
                        &mut exists,
                        &mut partition,
                    ),
                    HedonicOk
                );
                assert_eq!(exists, expected);

                if exists == 1 {
                    let mut stable = -1;
                    let mut blocker = ptr::null_mut();
                    assert_eq!(
                        hedonic_verify(
                            game,
                            partition,
                            HedonicConcept::HedonicStrictCore,
                            &mut stable,
                            &mut blocker,
                        ),
                        HedonicOk
                    );
                    assert_eq!(stable, 1);
                    assert!(blocker.is_null());
                }
                hedonic_string_free(partition);
                hedonic_game_free(game);
                hedonic_formula_free(f);
            }
        }
    }

    #[test]
    fn game_parse_and_format_roundtrip() {
        unsafe {
            let text = "p ahg 2 sym\nv 0 1 5\n";
            let mut game = ptr::null_mut();
            assert_eq!(hedonic_game_parse(c(text).as_ptr(), &mut game), HedonicOk);
            let mut formatted = ptr::null_mut();
            assert_eq!(hedonic_game_format(game, &mut formatted), HedonicOk);
            let round = CStr::from_ptr(formatted).to_str().unwrap().to_owned();
            hedonic_string_free(formatted);
            let mut game2 = ptr::null_mut();
            assert_eq!(hedonic_game_parse(c(&round).as_ptr(), &mut game2), HedonicOk);
            let mut n = 0usize;
            assert_eq!(hedonic_game_agent_count(game2, &mut n), HedonicOk);
            assert_eq!(n, 2);
            hedonic_game_free(game2);
            hedonic_game_free(game);
        }
    }
}
