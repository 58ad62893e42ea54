//! Symbolic nondeterministic nominal automata.
//!
//! A state orbit is a name plus a register count; a state is a name plus an
//! injective register assignment. A transition line denotes exactly one orbit
//! of transition triples: equal variable names are equal atoms, distinct names
//! distinct atoms. Variables that occur only in the destination are guessed.

mod construct;
mod format;
mod simulate;
mod universality;

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use thiserror::Error;

use crate::orbits::{AlphabetError, AlphabetSpec, Tag};

pub use construct::{anchor, anchor_top, reverse, union};
pub use format::{parse, render, ParseError};
pub use simulate::{accepts, ConfigSet, Configuration, Reg, Simulator};
pub use universality::{
    bounded_universality_counterexample, is_universal_residual, UniversalityVerdict, Witness,
};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateOrbit {
    pub name: String,
    pub dimension: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TransitionLine {
    pub src: String,
    pub src_vars: Vec<String>,
    pub tag: Tag,
    pub letter_vars: Vec<String>,
    pub dst: String,
    pub dst_vars: Vec<String>,
}

impl TransitionLine {
    pub fn new(
        src: &str,
        src_vars: &[&str],
        tag: &str,
        letter_vars: &[&str],
        dst: &str,
        dst_vars: &[&str],
    ) -> Self {
        let owned = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect();
        TransitionLine {
            src: src.to_string(),
            src_vars: owned(src_vars),
            tag: Tag::new(tag),
            letter_vars: owned(letter_vars),
            dst: dst.to_string(),
            dst_vars: owned(dst_vars),
        }
    }

    /// Destination variables bound by neither the source nor the letter.
    pub fn guessed_vars(&self) -> Vec<&str> {
        self.dst_vars
            .iter()
            .filter(|v| !self.src_vars.contains(v) && !self.letter_vars.contains(v))
            .map(|v| v.as_str())
            .collect()
    }
}

fn fmt_term(f: &mut fmt::Formatter<'_>, name: &str, vars: &[String]) -> fmt::Result {
    if vars.is_empty() {
        f.write_str(name)
    } else {
        write!(f, "{name}({})", vars.join(","))
    }
}

impl fmt::Display for TransitionLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("trans ")?;
        fmt_term(f, &self.src, &self.src_vars)?;
        f.write_str(" ")?;
        fmt_term(f, self.tag.as_str(), &self.letter_vars)?;
        f.write_str(" ")?;
        fmt_term(f, &self.dst, &self.dst_vars)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AutomatonError {
    #[error("duplicate state `{0}`")]
    DuplicateState(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("state `{state}` has dimension {expected}, got {found} variables")]
    Dimension {
        state: String,
        expected: usize,
        found: usize,
    },
    #[error(transparent)]
    Alphabet(#[from] AlphabetError),
    #[error("variable `{0}` repeated in a state term")]
    DuplicateVariable(String),
    #[error("alphabets differ")]
    AlphabetMismatch,
    #[error("name `{0}` already in use")]
    NameCollision(String),
}

/// Orbit-level description of a nominal automaton (guessing allowed).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolicAutomaton {
    pub alphabet: AlphabetSpec,
    pub states: Vec<StateOrbit>,
    pub initial: BTreeSet<String>,
    pub final_states: BTreeSet<String>,
    pub transitions: Vec<TransitionLine>,
}

impl SymbolicAutomaton {
    /// Builds and validates an automaton.
    pub fn new(
        alphabet: AlphabetSpec,
        states: Vec<StateOrbit>,
        initial: impl IntoIterator<Item = String>,
        final_states: impl IntoIterator<Item = String>,
        transitions: Vec<TransitionLine>,
    ) -> Result<Self, AutomatonError> {
        let aut = SymbolicAutomaton {
            alphabet,
            states,
            initial: initial.into_iter().collect(),
            final_states: final_states.into_iter().collect(),
            transitions,
        };
        aut.validate()?;
        Ok(aut)
    }

    /// The automaton with no states (empty language).
    pub fn empty(alphabet: AlphabetSpec) -> Self {
        SymbolicAutomaton {
            alphabet,
            states: Vec::new(),
            initial: BTreeSet::new(),
            final_states: BTreeSet::new(),
            transitions: Vec::new(),
        }
    }

    pub fn state(&self, name: &str) -> Option<&StateOrbit> {
        self.states.iter().find(|s| s.name == name)
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s.name == name)
    }

    pub fn validate(&self) -> Result<(), AutomatonError> {
        let mut names = HashSet::new();
        for s in &self.states {
            if !names.insert(s.name.as_str()) {
                return Err(AutomatonError::DuplicateState(s.name.clone()));
            }
        }
        for n in self.initial.iter().chain(&self.final_states) {
            if !names.contains(n.as_str()) {
                return Err(AutomatonError::UnknownState(n.clone()));
            }
        }
        for t in &self.transitions {
            self.check_term(&t.src, &t.src_vars)?;
            self.check_term(&t.dst, &t.dst_vars)?;
            match self.alphabet.arity(&t.tag) {
                None => return Err(AlphabetError::UnknownTag(t.tag.to_string()).into()),
                Some(a) if a != t.letter_vars.len() => {
                    return Err(AlphabetError::Arity {
                        tag: t.tag.to_string(),
                        expected: a,
                        found: t.letter_vars.len(),
                    }
                    .into())
                }
                _ => {}
            }
        }
        Ok(())
    }

    fn check_term(&self, name: &str, vars: &[String]) -> Result<(), AutomatonError> {
        let st = self
            .state(name)
            .ok_or_else(|| AutomatonError::UnknownState(name.to_string()))?;
        if st.dimension != vars.len() {
            return Err(AutomatonError::Dimension {
                state: name.to_string(),
                expected: st.dimension,
                found: vars.len(),
            });
        }
        let mut seen = HashSet::new();
        for v in vars {
            if !seen.insert(v) {
                return Err(AutomatonError::DuplicateVariable(v.clone()));
            }
        }
        Ok(())
    }

    /// Syntactic non-guessing check: initial orbits carry no registers and no
    /// line stores an atom that is neither in the source nor in the letter.
    pub fn is_non_guessing(&self) -> bool {
        self.initial
            .iter()
            .all(|n| self.state(n).is_none_or(|s| s.dimension == 0))
            && self.transitions.iter().all(|t| t.guessed_vars().is_empty())
    }

    /// Number of state orbits.
    pub fn orbit_count(&self) -> usize {
        self.states.len()
    }
}

impl fmt::Display for SymbolicAutomaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_state() -> SymbolicAutomaton {
        SymbolicAutomaton::new(
            AlphabetSpec::atoms(),
            vec![StateOrbit {
                name: "q".into(),
                dimension: 0,
            }],
            ["q".to_string()],
            ["q".to_string()],
            vec![TransitionLine::new("q", &[], "a", &["x"], "q", &[])],
        )
        .unwrap()
    }

    #[test]
    fn validation_catches_bad_lines() {
        let mut a = one_state();
        a.transitions
            .push(TransitionLine::new("q", &["x"], "a", &["x"], "q", &[]));
        assert!(matches!(
            a.validate(),
            Err(AutomatonError::Dimension { .. })
        ));

        let mut a = one_state();
        a.transitions
            .push(TransitionLine::new("q", &[], "b", &["x"], "q", &[]));
        assert!(matches!(a.validate(), Err(AutomatonError::Alphabet(_))));

        let mut a = one_state();
        a.initial.insert("nope".into());
        assert_eq!(
            a.validate(),
            Err(AutomatonError::UnknownState("nope".into()))
        );
    }

    #[test]
    fn guessing_detection() {
        let a = one_state();
        assert!(a.is_non_guessing());
        let mut b = a.clone();
        b.states.push(StateOrbit {
            name: "r".into(),
            dimension: 1,
        });
        b.transitions
            .push(TransitionLine::new("q", &[], "a", &["x"], "r", &["y"]));
        assert!(!b.is_non_guessing());
    }
}
