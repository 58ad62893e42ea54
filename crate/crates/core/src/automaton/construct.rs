//! Anchoring constructions, disjoint union and reversal.

use super::{AutomatonError, StateOrbit, SymbolicAutomaton, TransitionLine};
use crate::orbits::{restricted_growth_strings, Tag};

fn vars(k: usize) -> Vec<String> {
    (0..k).map(|i| format!("x{i}")).collect()
}

/// Extends `aut` with, per state orbit `q` of dimension `k`, letters
/// `uq_q/k` and `q_q/k` and an initial anchor state `uq_q` that loops on its
/// own letter and moves to `q` on `q_q` with the same atoms.
pub fn anchor(aut: &SymbolicAutomaton) -> Result<SymbolicAutomaton, AutomatonError> {
    let mut out = aut.clone();
    for q in &aut.states {
        for tag in [format!("uq_{}", q.name), format!("q_{}", q.name)] {
            if out.alphabet.arity(&Tag::new(&tag)).is_some() {
                return Err(AutomatonError::NameCollision(tag));
            }
            out.alphabet.add(Tag::new(&tag), q.dimension)?;
        }
    }
    for q in &aut.states {
        let under = format!("uq_{}", q.name);
        if out.state(&under).is_some() {
            return Err(AutomatonError::NameCollision(under));
        }
        out.states.push(StateOrbit {
            name: under.clone(),
            dimension: q.dimension,
        });
        out.initial.insert(under.clone());
        let xs = vars(q.dimension);
        out.transitions.push(TransitionLine {
            src: under.clone(),
            src_vars: xs.clone(),
            tag: Tag::new(&under),
            letter_vars: xs.clone(),
            dst: under.clone(),
            dst_vars: xs.clone(),
        });
        out.transitions.push(TransitionLine {
            src: under,
            src_vars: xs.clone(),
            tag: Tag::new(&format!("q_{}", q.name)),
            letter_vars: xs.clone(),
            dst: q.name.clone(),
            dst_vars: xs,
        });
    }
    out.validate()?;
    Ok(out)
}

/// Like [`anchor`], plus an accepting initial state (named `top`, or with
/// underscores appended if taken) that loops on every original letter; the
/// original initial states stop being initial.
pub fn anchor_top(aut: &SymbolicAutomaton) -> Result<SymbolicAutomaton, AutomatonError> {
    let mut out = anchor(aut)?;
    let mut top = "top".to_string();
    while out.state(&top).is_some() {
        top.push('_');
    }
    out.states.push(StateOrbit {
        name: top.clone(),
        dimension: 0,
    });
    out.initial = aut
        .states
        .iter()
        .map(|q| format!("uq_{}", q.name))
        .chain([top.clone()])
        .collect();
    out.final_states.insert(top.clone());
    for (tag, arity) in aut.alphabet.sorted() {
        for rgs in restricted_growth_strings(arity) {
            out.transitions.push(TransitionLine {
                src: top.clone(),
                src_vars: vec![],
                tag: tag.clone(),
                letter_vars: rgs.iter().map(|i| format!("y{i}")).collect(),
                dst: top.clone(),
                dst_vars: vec![],
            });
        }
    }
    out.validate()?;
    Ok(out)
}

/// Disjoint union; states are renamed `u0_*` and `u1_*`.
pub fn union(
    a1: &SymbolicAutomaton,
    a2: &SymbolicAutomaton,
) -> Result<SymbolicAutomaton, AutomatonError> {
    if a1.alphabet.sorted() != a2.alphabet.sorted() {
        return Err(AutomatonError::AlphabetMismatch);
    }
    let mut out = SymbolicAutomaton::empty(a1.alphabet.clone());
    for (i, a) in [a1, a2].into_iter().enumerate() {
        let rn = |n: &str| format!("u{i}_{n}");
        out.states.extend(a.states.iter().map(|s| StateOrbit {
            name: rn(&s.name),
            dimension: s.dimension,
        }));
        out.initial.extend(a.initial.iter().map(|n| rn(n)));
        out.final_states
            .extend(a.final_states.iter().map(|n| rn(n)));
        out.transitions
            .extend(a.transitions.iter().map(|t| TransitionLine {
                src: rn(&t.src),
                dst: rn(&t.dst),
                ..t.clone()
            }));
    }
    out.validate()?;
    Ok(out)
}

/// Swaps initial and final states and flips every transition.
pub fn reverse(aut: &SymbolicAutomaton) -> SymbolicAutomaton {
    SymbolicAutomaton {
        alphabet: aut.alphabet.clone(),
        states: aut.states.clone(),
        initial: aut.final_states.clone(),
        final_states: aut.initial.clone(),
        transitions: aut
            .transitions
            .iter()
            .map(|t| TransitionLine {
                src: t.dst.clone(),
                src_vars: t.dst_vars.clone(),
                tag: t.tag.clone(),
                letter_vars: t.letter_vars.clone(),
                dst: t.src.clone(),
                dst_vars: t.src_vars.clone(),
            })
            .collect(),
    }
}
