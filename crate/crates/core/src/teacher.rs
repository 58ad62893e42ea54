//! Simulated teacher: membership and bounded equivalence queries.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::atoms::{Atom, Nominal};
use crate::automaton::{Simulator, SymbolicAutomaton};
use crate::orbits::{AlphabetError, AlphabetSpec, Letter, Word};

/// A membership backend.
pub trait Language: Send + Sync {
    fn alphabet(&self) -> &AlphabetSpec;

    /// Membership of a word over [`Language::alphabet`].
    fn contains(&self, w: &Word) -> bool;
}

impl Language for Simulator {
    fn alphabet(&self) -> &AlphabetSpec {
        Simulator::alphabet(self)
    }

    fn contains(&self, w: &Word) -> bool {
        self.accepts(w).unwrap_or(false)
    }
}

/// A language given by a plain function.
pub struct PredicateLanguage {
    alphabet: AlphabetSpec,
    pred: Box<dyn Fn(&Word) -> bool + Send + Sync>,
}

impl PredicateLanguage {
    pub fn new(
        alphabet: AlphabetSpec,
        pred: impl Fn(&Word) -> bool + Send + Sync + 'static,
    ) -> Self {
        PredicateLanguage {
            alphabet,
            pred: Box::new(pred),
        }
    }
}

impl Language for PredicateLanguage {
    fn alphabet(&self) -> &AlphabetSpec {
        &self.alphabet
    }

    fn contains(&self, w: &Word) -> bool {
        (self.pred)(w)
    }
}

/// Counts membership queries against a backend.
#[derive(Clone)]
pub struct MembershipOracle {
    backing: Arc<dyn Language>,
    queries: Arc<AtomicU64>,
}

impl MembershipOracle {
    pub fn new(backing: Arc<dyn Language>) -> Self {
        MembershipOracle {
            backing,
            queries: Arc::new(AtomicU64::new(0)),
        }
    }

    pub fn from_automaton(aut: &SymbolicAutomaton) -> Self {
        Self::new(Arc::new(Simulator::new(aut)))
    }

    pub fn alphabet(&self) -> &AlphabetSpec {
        self.backing.alphabet()
    }

    pub fn language(&self) -> &Arc<dyn Language> {
        &self.backing
    }

    pub fn member(&self, w: &Word) -> Result<bool, AlphabetError> {
        self.backing.alphabet().check_word(w)?;
        self.queries.fetch_add(1, Ordering::Relaxed);
        Ok(self.backing.contains(w))
    }

    pub fn query_count(&self) -> u64 {
        self.queries.load(Ordering::Relaxed)
    }
}

impl fmt::Debug for MembershipOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MembershipOracle")
            .field("alphabet", self.alphabet())
            .field("queries", &self.query_count())
            .finish()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EquivalenceAnswer {
    /// Agreement on every word of length at most the depth.
    Yes,
    Counterexample(Word),
}

/// Compares a hypothesis with the target on every word orbit up to a depth.
#[derive(Debug)]
pub struct EquivalenceOracle {
    target: Arc<dyn Language>,
    depth: usize,
    queries: AtomicU64,
}

impl fmt::Debug for dyn Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Language over {}", self.alphabet())
    }
}

/// The one-letter extensions of a canonical word with `m` atoms that are
/// again canonical, in sorted order.
pub(crate) fn canonical_extensions(alph: &AlphabetSpec, m: u32) -> Vec<Letter> {
    fn go(arity: usize, cur: &mut Vec<u32>, next: u32, out: &mut Vec<Vec<u32>>) {
        if cur.len() == arity {
            out.push(cur.clone());
            return;
        }
        for a in 0..=next {
            cur.push(a);
            go(arity, cur, next.max(a + 1), out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for (tag, arity) in alph.sorted() {
        let mut pats = Vec::new();
        go(arity, &mut Vec::new(), m, &mut pats);
        for p in pats {
            out.push(Letter {
                tag: tag.clone(),
                atoms: p.into_iter().map(Atom).collect(),
            });
        }
    }
    out
}

impl EquivalenceOracle {
    pub fn new(target: Arc<dyn Language>, depth: usize) -> Self {
        EquivalenceOracle {
            target,
            depth,
            queries: AtomicU64::new(0),
        }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn query_count(&self) -> u64 {
        self.queries.load(Ordering::Relaxed)
    }

    /// The least disagreeing orbit representative (by length, then word
    /// order) of length at most the depth.
    pub fn equivalent(&self, hyp: &SymbolicAutomaton) -> EquivalenceAnswer {
        self.queries.fetch_add(1, Ordering::Relaxed);
        let sim = Simulator::new(hyp);
        let alph = self.target.alphabet();
        let mut level = vec![(Word::empty(), sim.start())];
        for len in 0..=self.depth {
            for (w, run) in &level {
                if run.accepting() != self.target.contains(w) {
                    return EquivalenceAnswer::Counterexample(w.clone());
                }
            }
            if len == self.depth {
                break;
            }
            let mut next = Vec::new();
            for (w, run) in &level {
                for l in canonical_extensions(alph, w.atom_bound()) {
                    let mut r = run.clone();
                    r.feed(&l);
                    next.push((w.push(l), r));
                }
            }
            next.sort_by(|a, b| a.0.cmp(&b.0));
            level = next;
        }
        EquivalenceAnswer::Yes
    }
}

/// A membership oracle and an equivalence oracle for the same target.
#[derive(Debug)]
pub struct Teacher {
    pub membership: MembershipOracle,
    pub equivalence: EquivalenceOracle,
}

impl Teacher {
    pub fn new(target: Arc<dyn Language>, eq_depth: usize) -> Self {
        Teacher {
            membership: MembershipOracle::new(target.clone()),
            equivalence: EquivalenceOracle::new(target, eq_depth),
        }
    }

    pub fn alphabet(&self) -> &AlphabetSpec {
        self.membership.alphabet()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::parse;
    use crate::orbits::word_orbits_of_length;

    #[test]
    fn extensions_enumerate_each_orbit_once() {
        let alph = AlphabetSpec::new([("a", 1), ("p", 2)]).unwrap();
        let mut level = vec![Word::empty()];
        for len in 1..=3 {
            let mut next: Vec<Word> = level
                .iter()
                .flat_map(|w| {
                    canonical_extensions(&alph, w.atom_bound())
                        .into_iter()
                        .map(move |l| w.push(l))
                })
                .collect();
            next.sort();
            let expect: Vec<Word> = word_orbits_of_length(&alph, len)
                .into_iter()
                .map(|p| p.into_word())
                .collect();
            assert_eq!(next, expect);
            level = next;
        }
    }

    #[test]
    fn empty_hypothesis_against_everything() {
        let all = parse("alphabet a 1\nstate q 0\ninitial q\nfinal q\ntrans q a(x) q\n").unwrap();
        let none = parse("alphabet a 1\n").unwrap();
        let eq = EquivalenceOracle::new(Arc::new(Simulator::new(&all)), 3);
        assert_eq!(
            eq.equivalent(&none),
            EquivalenceAnswer::Counterexample(Word::empty())
        );
        assert_eq!(eq.equivalent(&all), EquivalenceAnswer::Yes);
        assert_eq!(eq.query_count(), 2);
    }

    #[test]
    fn membership_counts_and_checks_alphabet() {
        let all = parse("alphabet a 1\nstate q 0\ninitial q\nfinal q\ntrans q a(x) q\n").unwrap();
        let m = MembershipOracle::from_automaton(&all);
        assert!(m.member(&Word::over_a(&[1, 2])).unwrap());
        assert!(m.member(&"b(1)".parse().unwrap()).is_err());
        assert_eq!(m.query_count(), 1);
    }
}
