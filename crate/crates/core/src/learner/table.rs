use std::collections::{BTreeSet, HashMap};

use crate::atoms::{Atom, Nominal};
use crate::orbits::{
    canonicalize, enumerate_word_orbits, instantiations, AlphabetError, AlphabetSpec, Letter, Word,
    WordPattern,
};
use crate::rows::{is_join_irreducible, ColumnSet, Row, RowFamily};
use crate::teacher::MembershipOracle;

/// `row(s·a)` is join-irreducible in the table but not an upper row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosednessDefect {
    pub s: Word,
    pub a: Letter,
}

impl ClosednessDefect {
    pub fn word(&self) -> Word {
        self.s.push(self.a.clone())
    }
}

/// `row(s1) <= row(s2)` while `e` is in `row(s1·a)` but not in `row(s2·a)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConsistencyDefect {
    pub s1: Word,
    pub s2: Word,
    pub a: Letter,
    pub e: Word,
}

#[derive(Clone, Debug)]
pub(crate) struct RowClass {
    pub rep: Row,
    /// indices into `extended`, in order
    pub members: Vec<usize>,
    pub upper: bool,
    pub ji: Option<bool>,
}

/// Rows are indexed by `S = Σ^{≤l}`, extensions by `Σ^{≤l+1}`; both are
/// kept as sorted orbit representatives.
#[derive(Clone, Debug)]
pub struct ObservationTable {
    alphabet: AlphabetSpec,
    l: usize,
    extended: Vec<WordPattern>,
    columns: ColumnSet,
    answers: HashMap<WordPattern, bool>,
    rows: HashMap<WordPattern, Row>,
    classes: Option<(Vec<RowClass>, Vec<usize>)>,
}

impl ObservationTable {
    /// `S = E = {ε}`.
    pub fn new(alphabet: AlphabetSpec) -> Self {
        Self::with_length(alphabet, 0, ColumnSet::new([]))
    }

    pub fn with_length(alphabet: AlphabetSpec, l: usize, columns: ColumnSet) -> Self {
        let extended = enumerate_word_orbits(&alphabet, l + 1);
        ObservationTable {
            alphabet,
            l,
            extended,
            columns,
            answers: HashMap::new(),
            rows: HashMap::new(),
            classes: None,
        }
    }

    pub fn alphabet(&self) -> &AlphabetSpec {
        &self.alphabet
    }

    /// Longest row label.
    pub fn l(&self) -> usize {
        self.l
    }

    pub fn columns(&self) -> &ColumnSet {
        &self.columns
    }

    /// Row labels.
    pub fn s(&self) -> impl Iterator<Item = &WordPattern> + '_ {
        self.extended
            .iter()
            .filter(move |p| p.word().len() <= self.l)
    }

    /// Row labels and their one-letter extensions.
    pub fn extended(&self) -> &[WordPattern] {
        &self.extended
    }

    pub fn answers(&self) -> &HashMap<WordPattern, bool> {
        &self.answers
    }

    pub fn answer(&self, w: &Word) -> Option<bool> {
        self.answers.get(&canonicalize(w)).copied()
    }

    pub fn is_filled(&self) -> bool {
        self.extended.iter().all(|p| self.rows.contains_key(p))
    }

    /// Queries every missing `t·e` and computes the rows.
    pub fn fill(&mut self, oracle: &MembershipOracle) -> Result<(), AlphabetError> {
        for p in &self.extended {
            if self.rows.contains_key(p) {
                continue;
            }
            let t = p.word();
            let tuple: Vec<Atom> = (0..t.atom_bound()).map(Atom).collect();
            let answers = &mut self.answers;
            let mut failure = None;
            let row = Row::from_fn(&self.columns, tuple, |e| {
                let key = canonicalize(&t.concat(e));
                if let Some(&b) = answers.get(&key) {
                    return b;
                }
                match oracle.member(key.word()) {
                    Ok(b) => {
                        answers.insert(key, b);
                        b
                    }
                    Err(err) => {
                        failure.get_or_insert(err);
                        false
                    }
                }
            });
            if let Some(err) = failure {
                return Err(err);
            }
            self.rows.insert(p.clone(), row);
        }
        Ok(())
    }

    /// The row of a canonical label.
    pub fn row(&self, p: &WordPattern) -> &Row {
        self.rows.get(p).expect("table is filled")
    }

    /// The row of any word whose orbit is a label.
    pub fn row_of(&self, w: &Word) -> Row {
        let p = canonicalize(w);
        let r = self.row(&p);
        let order = w.atoms_in_order();
        r.with_tuple(
            r.support_tuple()
                .iter()
                .map(|a| order[a.0 as usize])
                .collect(),
        )
    }

    pub(crate) fn classes(&mut self) -> &mut Vec<RowClass> {
        if self.classes.is_none() {
            let mut classes: Vec<RowClass> = Vec::new();
            let mut class_of = Vec::with_capacity(self.extended.len());
            let mut sigs = Vec::new();
            for (i, p) in self.extended.iter().enumerate() {
                let r = &self.rows[p];
                let sig = r.orbit_signature();
                let upper = p.word().len() <= self.l;
                let found = classes
                    .iter()
                    .zip(&sigs)
                    .position(|(c, s)| *s == sig && c.rep.same_orbit(r).expect("same columns"));
                match found {
                    Some(c) => {
                        classes[c].members.push(i);
                        classes[c].upper |= upper;
                        class_of.push(c);
                    }
                    None => {
                        class_of.push(classes.len());
                        classes.push(RowClass {
                            rep: r.clone(),
                            members: vec![i],
                            upper,
                            ji: None,
                        });
                        sigs.push(sig);
                    }
                }
            }
            self.classes = Some((classes, class_of));
        }
        &mut self.classes.as_mut().expect("just computed").0
    }

    fn class_of(&mut self, i: usize) -> usize {
        self.classes();
        self.classes.as_ref().expect("computed").1[i]
    }

    pub(crate) fn family(&mut self) -> RowFamily {
        RowFamily::new(self.classes().iter().map(|c| c.rep.clone()).collect())
    }

    pub(crate) fn is_ji(&mut self, class: usize) -> bool {
        if let Some(b) = self.classes()[class].ji {
            return b;
        }
        let fam = self.family();
        let rep = self.classes()[class].rep.clone();
        let b = is_join_irreducible(&rep, &fam, false).expect("same columns");
        self.classes()[class].ji = Some(b);
        b
    }

    /// First extension (by length, then word order) whose row is
    /// join-irreducible and not an upper row.
    pub fn find_closedness_defect(&mut self) -> Option<ClosednessDefect> {
        assert!(self.is_filled(), "table must be filled");
        for i in 0..self.extended.len() {
            if self.extended[i].word().len() <= self.l {
                continue;
            }
            let c = self.class_of(i);
            if self.classes()[c].upper || self.classes()[c].rep.is_empty() {
                continue;
            }
            if self.is_ji(c) {
                let w = &self.extended[i].word().0;
                let (a, s) = w.split_last().expect("nonempty extension");
                return Some(ClosednessDefect {
                    s: Word(s.to_vec()),
                    a: a.clone(),
                });
            }
        }
        None
    }

    /// Adds `Σ^{≤|sa|}` to the row labels.
    pub fn close_step(&mut self, defect: &ClosednessDefect) {
        self.extend_to(defect.s.len() + 1);
    }

    /// Makes `S = Σ^{≤l}` (never shrinks).
    pub fn extend_to(&mut self, l: usize) {
        if l <= self.l {
            return;
        }
        self.l = l;
        self.extended = enumerate_word_orbits(&self.alphabet, l + 1);
        self.classes = None;
    }

    /// Orbit representatives of pairs of row labels: `s1` canonical, `s2`
    /// placed relative to the atoms of `s1`.
    fn label_pairs(&self) -> Vec<(Word, Word)> {
        let s: Vec<&Word> = self.s().map(|p| p.word()).collect();
        let mut out = Vec::new();
        for s1 in &s {
            let atoms: Vec<Atom> = (0..s1.atom_bound()).map(Atom).collect();
            for s2 in &s {
                for s2i in instantiations(s2, &atoms, s1.atom_bound()) {
                    out.push(((*s1).clone(), s2i));
                }
            }
        }
        out
    }

    /// The pairs of label representatives with `row(s1) <= row(s2)`.
    pub fn row_preorder(&self) -> BTreeSet<(Word, Word)> {
        self.label_pairs()
            .into_iter()
            .filter(|(s1, s2)| self.row_of(s1).leq(&self.row_of(s2)).expect("same columns"))
            .collect()
    }

    /// First violation of `row(s1) <= row(s2) ⇒ row(s1·a) <= row(s2·a)`.
    pub fn find_consistency_defect(&self) -> Option<ConsistencyDefect> {
        assert!(self.is_filled(), "table must be filled");
        let letters = self.alphabet.letter_patterns();
        for (s1, s2) in self.label_pairs() {
            if s1 == s2 {
                continue;
            }
            let r1 = self.row_of(&s1);
            let r2 = self.row_of(&s2);
            if !r1.leq(&r2).expect("same columns") {
                continue;
            }
            let mut both = s1.atoms_in_order();
            for a in s2.atoms_in_order() {
                if !both.contains(&a) {
                    both.push(a);
                }
            }
            let fresh = s1.atom_bound().max(s2.atom_bound());
            for lp in &letters {
                let lw = Word(vec![lp.clone()]);
                for aw in instantiations(&lw, &both, fresh) {
                    let a = aw.0[0].clone();
                    let x1 = self.row_of(&s1.push(a.clone()));
                    let x2 = self.row_of(&s2.push(a.clone()));
                    if let Some(e) = x1.excess(&x2).expect("same columns") {
                        return Some(ConsistencyDefect { s1, s2, a, e });
                    }
                }
            }
        }
        None
    }

    /// Adds the orbit of `a·e` and its suffixes to the columns.
    pub fn consistency_step(&mut self, defect: &ConsistencyDefect) {
        self.add_columns(Word(vec![defect.a.clone()]).concat(&defect.e));
    }

    /// Adds the orbits of all suffixes of `cex` to the columns.
    pub fn handle_counterexample(&mut self, cex: &Word) {
        self.add_columns(cex.clone());
    }

    /// Returns whether the columns changed.
    pub fn add_columns(&mut self, w: Word) -> bool {
        let next = self.columns.extended([w]);
        if next.len() == self.columns.len() {
            return false;
        }
        self.columns = next;
        self.rows.clear();
        self.classes = None;
        true
    }
}
