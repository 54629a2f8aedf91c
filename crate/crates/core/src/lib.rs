//! Solver and verification toolkit for hedonic coalition-formation games:
//! additive and Boolean (dichotomous) games, core and strict-core stability,
//! two-block quantified Boolean formulas, and the formula-to-game
//! constructions tying the two together.

pub mod corpus;
pub mod formula;
pub mod game;
pub mod reductions;
pub mod stability;
