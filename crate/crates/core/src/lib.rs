//! Nominal residual automata over equality atoms.
//!
//! Orbit enumeration for data words, nondeterministic nominal automata with
//! guessing, observation-table rows with their join-irreducibility, and a
//! learner for residual nominal languages driven by a membership and
//! equivalence teacher.

pub mod atoms;
pub mod automaton;
pub mod corpus;
pub mod learner;
pub mod orbits;
pub mod rows;
pub mod teacher;

pub use atoms::{Atom, Nominal, Permutation, SupportSet};
pub use automaton::{StateOrbit, SymbolicAutomaton, TransitionLine};
pub use orbits::{AlphabetSpec, Letter, Tag, Word, WordPattern};
