use std::collections::BTreeSet;

use thiserror::Error;

use super::table::ObservationTable;
use crate::atoms::{Atom, Nominal};
use crate::automaton::{Simulator, StateOrbit, SymbolicAutomaton, TransitionLine};
use crate::orbits::{for_each_partial_injection, instantiations, Word};
use crate::rows::{is_generated_by, Row, RowFamily};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HypothesisError {
    #[error("table is not join-closed at {0}")]
    NotClosed(Word),
    #[error("table is not join-consistent")]
    NotConsistent,
}

#[derive(Clone, Debug)]
pub struct HypothesisState {
    pub name: String,
    /// Row label whose row this state is.
    pub owner: Word,
    pub row: Row,
}

/// A conjectured automaton; state `i` of the automaton is `states[i]`, with
/// registers holding the row's support tuple.
#[derive(Clone, Debug)]
pub struct Hypothesis {
    pub automaton: SymbolicAutomaton,
    pub states: Vec<HypothesisState>,
}

/// Concrete atoms above everything in `used`.
fn fresh_atoms(used: &[Atom], n: usize) -> Vec<Atom> {
    let from = used.iter().map(|a| a.0 + 1).max().unwrap_or(0);
    (from..from + n as u32).map(Atom).collect()
}

impl ObservationTable {
    /// Rows that are join-irreducible and upper, one per orbit, each with the
    /// first row label realizing it.
    fn hypothesis_states(&mut self) -> Vec<HypothesisState> {
        let n = self.classes().len();
        let mut out = Vec::new();
        for c in 0..n {
            if !self.classes()[c].upper || !self.is_ji(c) {
                continue;
            }
            let members = self.classes()[c].members.clone();
            let first = members
                .into_iter()
                .find(|&i| self.extended()[i].word().len() <= self.l())
                .expect("upper class has a row label");
            let owner = self.extended()[first].word().clone();
            let row = self.row_of(&owner);
            out.push(HypothesisState {
                name: String::new(),
                owner,
                row,
            });
        }
        out.sort_by(|a, b| a.owner.cmp(&b.owner));
        for (i, q) in out.iter_mut().enumerate() {
            q.name = format!("q{i}");
        }
        out
    }

    /// The automaton whose states are the join-irreducible upper rows.
    pub fn build_hypothesis(&mut self) -> Result<Hypothesis, HypothesisError> {
        assert!(self.is_filled(), "table must be filled");
        if self.find_consistency_defect().is_some() {
            return Err(HypothesisError::NotConsistent);
        }
        let states = self.hypothesis_states();
        let q_family = RowFamily::new(states.iter().map(|q| q.row.clone()).collect());
        for p in self.extended().to_vec() {
            let r = self.row(&p);
            if !is_generated_by(r, &q_family).expect("same columns") {
                return Err(HypothesisError::NotClosed(p.into_word()));
            }
        }

        let eps = self.row_of(&Word::empty());
        let mut aut = SymbolicAutomaton::empty(self.alphabet().clone());
        for q in &states {
            aut.states.push(StateOrbit {
                name: q.name.clone(),
                dimension: q.row.dimension(),
            });
            if q.row.leq(&eps).expect("same columns") {
                aut.initial.insert(q.name.clone());
            }
            if q.row.value(&Word::empty()).expect("ε is a column") {
                aut.final_states.insert(q.name.clone());
            }
        }

        let letters = self.alphabet().letter_patterns();
        for q in &states {
            let x = q.row.support_tuple().to_vec();
            let xvars: Vec<String> = (0..x.len()).map(|i| format!("x{i}")).collect();
            for lp in &letters {
                let lw = Word(vec![lp.clone()]);
                for aw in instantiations(&lw, &x, q.owner.atom_bound()) {
                    let a = &aw.0[0];
                    let target = self.row_of(&q.owner.push(a.clone()));
                    // registers, then the letter's new atoms
                    let mut known = x.clone();
                    let mut names = xvars.clone();
                    let mut letter_vars = Vec::new();
                    for &at in &a.atoms {
                        match known.iter().position(|&k| k == at) {
                            Some(i) => letter_vars.push(names[i].clone()),
                            None => {
                                known.push(at);
                                names.push(format!("y{}", names.len() - x.len()));
                                letter_vars.push(names.last().expect("pushed").clone());
                            }
                        }
                    }
                    let mut used = known.clone();
                    used.extend(target.support_tuple());
                    used.extend(q.owner.atoms_in_order());
                    for r in &states {
                        let d = r.row.dimension();
                        let guesses = fresh_atoms(&used, d);
                        let mut lines = BTreeSet::new();
                        for_each_partial_injection(d, known.len(), &mut |inj| {
                            let mut g = 0;
                            let mut tuple = Vec::with_capacity(d);
                            let mut dst_vars = Vec::with_capacity(d);
                            for t in inj {
                                match t {
                                    Some(i) => {
                                        tuple.push(known[*i]);
                                        dst_vars.push(names[*i].clone());
                                    }
                                    None => {
                                        tuple.push(guesses[g]);
                                        dst_vars.push(format!("g{g}"));
                                        g += 1;
                                    }
                                }
                            }
                            if r.row.with_tuple(tuple).leq(&target).expect("same columns") {
                                lines.insert(dst_vars);
                            }
                        });
                        for dst_vars in lines {
                            aut.transitions.push(TransitionLine {
                                src: q.name.clone(),
                                src_vars: xvars.clone(),
                                tag: a.tag.clone(),
                                letter_vars: letter_vars.clone(),
                                dst: r.name.clone(),
                                dst_vars,
                            });
                        }
                    }
                }
            }
        }
        debug_assert!(aut.validate().is_ok(), "{:?}", aut.validate());
        Ok(Hypothesis {
            automaton: aut,
            states,
        })
    }
}

impl Hypothesis {
    /// Pairs `(s·e)` with `s` a state's row label and `e` a column
    /// representative relative to `s`, on which the state's language and the
    /// table disagree.
    pub fn table_disagreements(&self, table: &ObservationTable) -> Vec<Word> {
        let sim = Simulator::new(&self.automaton);
        let mut bad = Vec::new();
        for (i, q) in self.states.iter().enumerate() {
            let atoms = q.owner.atoms_in_order();
            for col in table.columns().patterns() {
                for e in instantiations(col.word(), &atoms, q.owner.atom_bound()) {
                    let se = q.owner.concat(&e);
                    let expected = table.answer(&se).expect("table is filled");
                    if sim.accepts_from(i, q.row.support_tuple(), &e) != expected {
                        bad.push(se);
                    }
                }
            }
        }
        bad
    }
}
