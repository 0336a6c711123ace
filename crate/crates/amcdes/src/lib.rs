//! Decision procedures for the alternating-time µ-calculus with disjunctive
//! explicit strategies: parsing, model checking over concurrent game
//! structures, one-step and global satisfiability, and witness extraction.

pub mod cgses;
pub mod corpus;
pub mod error;
pub mod formula;
pub mod games;
pub mod mc;
pub mod onestep;
pub mod resolution;
pub mod sat;

pub use cgses::{Cgses, JointMove, StateData};
pub use error::{FormulaError, McError, ModelError, OneStepError, ResolutionError, SatError};
pub use formula::{closure, parse, parse_infer, Closure, Coalition, Commitment, Formula, JointExplicit, Modality, Signature};
pub use games::{Owner, ParityGame, Solution};
