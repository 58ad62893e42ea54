//! Universality for residual automata.
//!
//! In a residual automaton every state accepts a derivative of the language,
//! so the language is universal iff some state is initial, every state is
//! final and every state has a successor on every letter. The last condition
//! only has to be checked on orbit representatives of `Q × Σ`.

use std::fmt;

use super::{Simulator, SymbolicAutomaton};
use crate::atoms::Atom;
use crate::orbits::{enumerate_word_orbits, instantiations, Letter, Word};

/// Why an automaton is not universal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    EmptyInitial,
    NonFinalState(String),
    /// `state(0, …, k-1)` has no successor on `letter`.
    MissingTransition {
        state: String,
        letter: Letter,
    },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::EmptyInitial => f.write_str("EmptyInitial"),
            Witness::NonFinalState(q) => write!(f, "NonFinalState({q})"),
            Witness::MissingTransition { state, letter } => {
                write!(f, "MissingTransition({state}, {letter})")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniversalityVerdict {
    pub universal: bool,
    pub witness: Option<Witness>,
}

/// Decides universality, assuming (without checking) that `aut` is residual.
pub fn is_universal_residual(aut: &SymbolicAutomaton) -> UniversalityVerdict {
    let no = |w| UniversalityVerdict {
        universal: false,
        witness: Some(w),
    };
    if aut.initial.is_empty() {
        return no(Witness::EmptyInitial);
    }
    if let Some(q) = aut
        .states
        .iter()
        .find(|q| !aut.final_states.contains(&q.name))
    {
        return no(Witness::NonFinalState(q.name.clone()));
    }
    let sim = Simulator::new(aut);
    let patterns = aut.alphabet.letter_patterns();
    for (qi, q) in aut.states.iter().enumerate() {
        let regs: Vec<Atom> = (0..q.dimension as u32).map(Atom).collect();
        for pat in &patterns {
            let word = Word(vec![pat.clone()]);
            for inst in instantiations(&word, &regs, q.dimension as u32) {
                if sim.run_from(qi, &regs, &inst).is_empty() {
                    return no(Witness::MissingTransition {
                        state: q.name.clone(),
                        letter: inst.0[0].clone(),
                    });
                }
            }
        }
    }
    UniversalityVerdict {
        universal: true,
        witness: None,
    }
}

/// The first orbit representative of length `<= max_len` that `aut`
/// rejects, if any.
pub fn bounded_universality_counterexample(
    aut: &SymbolicAutomaton,
    max_len: usize,
) -> Option<Word> {
    let sim = Simulator::new(aut);
    enumerate_word_orbits(&aut.alphabet, max_len)
        .into_iter()
        .map(|p| p.into_word())
        .find(|w| !sim.accepts(w).expect("enumerated over the alphabet"))
}
