//! Letters, words and their orbits.
//!
//! For pure equality atoms the orbit of a word is determined by its tag
//! sequence and the equality pattern of its atoms, so the canonical
//! representative relabels atoms `0, 1, 2, …` in order of first occurrence.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::atoms::{Atom, Nominal, SupportSet};

/// Name of a letter constructor.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tag(Arc<str>);

impl Tag {
    pub fn new(name: &str) -> Self {
        Tag(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

impl From<&str> for Tag {
    fn from(s: &str) -> Self {
        Tag::new(s)
    }
}

/// A letter `tag(a1, …, ak)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub tag: Tag,
    pub atoms: Vec<Atom>,
}

impl Letter {
    pub fn new(tag: impl Into<Tag>, atoms: impl IntoIterator<Item = u32>) -> Self {
        Letter {
            tag: tag.into(),
            atoms: atoms.into_iter().map(Atom).collect(),
        }
    }
}

impl Nominal for Letter {
    fn for_each_atom(&self, f: &mut dyn FnMut(Atom)) {
        for &a in &self.atoms {
            f(a)
        }
    }
    fn map_atoms(&self, f: &dyn Fn(Atom) -> Atom) -> Self {
        Letter {
            tag: self.tag.clone(),
            atoms: self.atoms.iter().map(|&a| f(a)).collect(),
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.tag)?;
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")")
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A finite data word.
///
/// Words are ordered by length first, then lexicographically by letters
/// (tag name, then atom ids).
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        Word(v)
    }

    pub fn push(&self, letter: Letter) -> Word {
        let mut v = self.0.clone();
        v.push(letter);
        Word(v)
    }

    /// All suffixes, from the whole word down to the empty word.
    pub fn suffixes(&self) -> impl Iterator<Item = Word> + '_ {
        (0..=self.0.len()).map(move |i| Word(self.0[i..].to_vec()))
    }

    pub fn reversed(&self) -> Word {
        Word(self.0.iter().rev().cloned().collect())
    }

    /// Shorthand for words over the single constructor `a/1`.
    pub fn over_a(atoms: &[u32]) -> Word {
        Word(atoms.iter().map(|&x| Letter::new("a", [x])).collect())
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Nominal for Word {
    fn for_each_atom(&self, f: &mut dyn FnMut(Atom)) {
        for l in &self.0 {
            l.for_each_atom(f);
        }
    }
    fn map_atoms(&self, f: &dyn Fn(Atom) -> Atom) -> Self {
        Word(self.0.iter().map(|l| l.map_atoms(f)).collect())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("eps");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨{self}⟩")
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WordSyntaxError {
    #[error("malformed letter `{0}`")]
    Letter(String),
    #[error("atom `{0}` is not a non-negative integer")]
    Atom(String),
}

impl FromStr for Word {
    type Err = WordSyntaxError;

    /// Parses `tag(n1,…,nk) tag(…) …`; `eps` (or blank input) is the empty word.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() || s == "eps" {
            return Ok(Word::empty());
        }
        let mut letters = Vec::new();
        let mut rest = s;
        while !rest.is_empty() {
            let end = rest
                .char_indices()
                .find(|&(_, c)| c == '(' || c.is_whitespace())
                .map(|(i, _)| i)
                .unwrap_or(rest.len());
            let tag = &rest[..end];
            if tag.is_empty() || !tag.chars().all(|c| c.is_alphanumeric() || c == '_') {
                return Err(WordSyntaxError::Letter(rest.to_string()));
            }
            rest = rest[end..].trim_start();
            let mut atoms = Vec::new();
            if let Some(after) = rest.strip_prefix('(') {
                let close = after
                    .find(')')
                    .ok_or_else(|| WordSyntaxError::Letter(rest.to_string()))?;
                let inner = after[..close].trim();
                if !inner.is_empty() {
                    for tok in inner.split(',') {
                        let tok = tok.trim();
                        let n: u32 = tok
                            .parse()
                            .map_err(|_| WordSyntaxError::Atom(tok.to_string()))?;
                        atoms.push(Atom(n));
                    }
                }
                rest = after[close + 1..].trim_start();
            }
            letters.push(Letter {
                tag: Tag::new(tag),
                atoms,
            });
        }
        Ok(Word(letters))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlphabetError {
    #[error("duplicate tag `{0}`")]
    DuplicateTag(String),
    #[error("unknown tag `{0}`")]
    UnknownTag(String),
    #[error("tag `{tag}` has arity {expected}, got {found} atoms")]
    Arity {
        tag: String,
        expected: usize,
        found: usize,
    },
}

/// Finite list of letter constructors `tag/arity`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AlphabetSpec {
    constructors: Vec<(Tag, usize)>,
}

impl AlphabetSpec {
    pub fn new<I, S>(constructors: I) -> Result<Self, AlphabetError>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: AsRef<str>,
    {
        let mut out = AlphabetSpec::default();
        for (tag, arity) in constructors {
            out.add(Tag::new(tag.as_ref()), arity)?;
        }
        Ok(out)
    }

    /// The one-constructor alphabet `{a/1}`, i.e. plain atoms.
    pub fn atoms() -> Self {
        Self::new([("a", 1)]).expect("static alphabet")
    }

    pub fn add(&mut self, tag: Tag, arity: usize) -> Result<(), AlphabetError> {
        if self.arity(&tag).is_some() {
            return Err(AlphabetError::DuplicateTag(tag.to_string()));
        }
        self.constructors.push((tag, arity));
        Ok(())
    }

    pub fn constructors(&self) -> &[(Tag, usize)] {
        &self.constructors
    }

    pub fn arity(&self, tag: &Tag) -> Option<usize> {
        self.constructors
            .iter()
            .find(|(t, _)| t == tag)
            .map(|&(_, a)| a)
    }

    /// Constructors sorted by tag name (the enumeration order).
    pub fn sorted(&self) -> Vec<(Tag, usize)> {
        let mut v = self.constructors.clone();
        v.sort();
        v
    }

    /// Maximum arity: the atom-dimension of the alphabet.
    pub fn atom_dimension(&self) -> usize {
        self.constructors.iter().map(|&(_, a)| a).max().unwrap_or(0)
    }

    pub fn check_letter(&self, l: &Letter) -> Result<(), AlphabetError> {
        match self.arity(&l.tag) {
            None => Err(AlphabetError::UnknownTag(l.tag.to_string())),
            Some(expected) if expected != l.atoms.len() => Err(AlphabetError::Arity {
                tag: l.tag.to_string(),
                expected,
                found: l.atoms.len(),
            }),
            Some(_) => Ok(()),
        }
    }

    pub fn check_word(&self, w: &Word) -> Result<(), AlphabetError> {
        w.letters().iter().try_for_each(|l| self.check_letter(l))
    }

    /// Orbit representatives of single letters (one per tag and equality
    /// pattern of its slots), in enumeration order.
    pub fn letter_patterns(&self) -> Vec<Letter> {
        let mut out = Vec::new();
        for (tag, arity) in self.sorted() {
            for rgs in restricted_growth_strings(arity) {
                out.push(Letter {
                    tag: tag.clone(),
                    atoms: rgs.into_iter().map(|x| Atom(x as u32)).collect(),
                });
            }
        }
        out
    }
}

impl fmt::Display for AlphabetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .constructors
            .iter()
            .map(|(t, a)| format!("{t}/{a}"))
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Canonical orbit representative of a word: atoms relabelled `0, 1, …`
/// in order of first occurrence.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WordPattern(Word);

impl WordPattern {
    pub fn word(&self) -> &Word {
        &self.0
    }

    pub fn into_word(self) -> Word {
        self.0
    }

    /// Number of distinct atoms.
    pub fn slots(&self) -> usize {
        self.0.atom_bound() as usize
    }
}

impl fmt::Display for WordPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Canonical representative of an orbit under permutations fixing `fixed`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AWordPattern {
    pub fixed: SupportSet,
    pub word: Word,
}

/// Relabels every atom in first-occurrence order.
pub fn canonicalize(w: &Word) -> WordPattern {
    WordPattern(relabel(w, &[], 0))
}

/// Keeps the atoms of `fixed`, relabels all others to fresh ids starting
/// just above `max(fixed)`, in first-occurrence order.
pub fn a_canonicalize(w: &Word, fixed: &SupportSet) -> AWordPattern {
    let fresh_from = fixed.iter().next_back().map(|a| a.0 + 1).unwrap_or(0);
    let keep: Vec<Atom> = fixed.iter().copied().collect();
    let mut renaming: HashMap<Atom, Atom> = keep.iter().map(|&a| (a, a)).collect();
    let mut next = fresh_from;
    let word = Word(
        w.0.iter()
            .map(|l| Letter {
                tag: l.tag.clone(),
                atoms: l
                    .atoms
                    .iter()
                    .map(|a| {
                        *renaming.entry(*a).or_insert_with(|| {
                            next += 1;
                            Atom(next - 1)
                        })
                    })
                    .collect(),
            })
            .collect(),
    );
    AWordPattern {
        fixed: fixed.clone(),
        word,
    }
}

/// Maps `keep[i]` to `i` and every other atom to `fresh_from, fresh_from+1, …`
/// in first-occurrence order.
pub(crate) fn relabel(w: &Word, keep: &[Atom], fresh_from: u32) -> Word {
    let mut renaming: Vec<(Atom, Atom)> = keep
        .iter()
        .enumerate()
        .map(|(i, &a)| (a, Atom(i as u32)))
        .collect();
    let mut next = fresh_from;
    Word(
        w.0.iter()
            .map(|l| Letter {
                tag: l.tag.clone(),
                atoms: l
                    .atoms
                    .iter()
                    .map(|a| match renaming.iter().find(|(x, _)| x == a) {
                        Some(&(_, b)) => b,
                        None => {
                            let b = Atom(next);
                            next += 1;
                            renaming.push((*a, b));
                            b
                        }
                    })
                    .collect(),
            })
            .collect(),
    )
}

/// One representative per orbit of words of length `<= max_len`, ordered by
/// length, then tags, then atom pattern.
pub fn enumerate_word_orbits(alph: &AlphabetSpec, max_len: usize) -> Vec<WordPattern> {
    let mut out = Vec::new();
    for len in 0..=max_len {
        out.extend(word_orbits_of_length(alph, len));
    }
    out
}

/// Orbit representatives of words of exactly `len` letters, sorted.
pub fn word_orbits_of_length(alph: &AlphabetSpec, len: usize) -> Vec<WordPattern> {
    let tags = alph.sorted();
    let mut out = Vec::new();
    if tags.is_empty() && len > 0 {
        return out;
    }
    let mut seq = vec![0usize; len];
    loop {
        let slots: usize = seq.iter().map(|&t| tags[t].1).sum();
        for rgs in restricted_growth_strings(slots) {
            let mut pos = 0;
            let letters = seq
                .iter()
                .map(|&t| {
                    let (tag, arity) = &tags[t];
                    let atoms = rgs[pos..pos + arity]
                        .iter()
                        .map(|&x| Atom(x as u32))
                        .collect();
                    pos += arity;
                    Letter {
                        tag: tag.clone(),
                        atoms,
                    }
                })
                .collect();
            out.push(WordPattern(Word(letters)));
        }
        // next tag sequence (odometer, last position fastest)
        let mut i = len;
        loop {
            if i == 0 {
                out.sort();
                return out;
            }
            i -= 1;
            seq[i] += 1;
            if seq[i] < tags.len() {
                break;
            }
            seq[i] = 0;
        }
    }
}

/// Splits the orbit of `pattern` into orbits under permutations fixing
/// `fixed`: every partial injection from the pattern's atom slots into
/// `fixed`, with the unmapped slots sent to fresh atoms above `max(fixed)`.
pub fn split_into_a_orbits(pattern: &WordPattern, fixed: &SupportSet) -> Vec<AWordPattern> {
    let targets: Vec<Atom> = fixed.iter().copied().collect();
    let fresh_from = targets.last().map(|a| a.0 + 1).unwrap_or(0);
    let mut out: Vec<AWordPattern> = instantiations(pattern.word(), &targets, fresh_from)
        .into_iter()
        .map(|word| AWordPattern {
            fixed: fixed.clone(),
            word,
        })
        .collect();
    out.sort();
    out
}

/// Instantiates a canonical pattern: each atom slot goes to a distinct
/// element of `targets` or to a fresh atom `>= fresh_from` (fresh atoms
/// numbered in slot order). One word per partial injection.
pub fn instantiations(pattern: &Word, targets: &[Atom], fresh_from: u32) -> Vec<Word> {
    let slots = pattern.atom_bound() as usize;
    let mut out = Vec::new();
    for_each_partial_injection(slots, targets.len(), &mut |assign| {
        let mut next = fresh_from;
        let image: Vec<Atom> = assign
            .iter()
            .map(|t| match t {
                Some(j) => targets[*j],
                None => {
                    next += 1;
                    Atom(next - 1)
                }
            })
            .collect();
        out.push(pattern.map_atoms(&|a| image[a.0 as usize]));
    });
    out
}

/// p(k): number of partial permutations (partial injections) of a k-set,
/// `sum_i C(k,i)^2 i!`. Saturates at `u128::MAX`.
pub fn count_partial_permutations(k: usize) -> u128 {
    let mut total: u128 = 0;
    let mut binom: u128 = 1; // C(k, i)
    let mut fact: u128 = 1; // i!
    for i in 0..=k {
        if i > 0 {
            binom = binom.saturating_mul((k - i + 1) as u128) / i as u128;
            fact = fact.saturating_mul(i as u128);
        }
        total = total.saturating_add(binom.saturating_mul(binom).saturating_mul(fact));
    }
    total
}

/// Representatives of the minimal orbits. `below(x, y)` must decide whether
/// some element of the orbit of `x` is below some element of the orbit of `y`.
pub fn minimal_orbits<T: Clone>(reps: &[T], below: impl Fn(&T, &T) -> bool) -> Vec<T> {
    reps.iter()
        .enumerate()
        .filter(|&(i, x)| {
            !reps
                .iter()
                .enumerate()
                .any(|(j, y)| j != i && below(y, x) && !below(x, y))
        })
        .map(|(_, x)| x.clone())
        .collect()
}

/// Restricted growth strings of length `n`: canonical encodings of the set
/// partitions of `n` slots, in lexicographic order.
pub fn restricted_growth_strings(n: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, cur: &mut Vec<usize>, max: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        let limit = if cur.is_empty() { 0 } else { max + 1 };
        for v in 0..=limit {
            cur.push(v);
            go(n, cur, max.max(v), out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, &mut Vec::with_capacity(n), 0, &mut out);
    out
}

/// Calls `f` for every partial injection from `n` slots into `m` targets,
/// `None` meaning "unmapped". Order: slot 0 varies slowest, `None` first.
pub fn for_each_partial_injection(n: usize, m: usize, f: &mut dyn FnMut(&[Option<usize>])) {
    fn go(
        i: usize,
        n: usize,
        m: usize,
        used: &mut Vec<bool>,
        cur: &mut Vec<Option<usize>>,
        f: &mut dyn FnMut(&[Option<usize>]),
    ) {
        if i == n {
            f(cur);
            return;
        }
        cur.push(None);
        go(i + 1, n, m, used, cur, f);
        cur.pop();
        for j in 0..m {
            if !used[j] {
                used[j] = true;
                cur.push(Some(j));
                go(i + 1, n, m, used, cur, f);
                cur.pop();
                used[j] = false;
            }
        }
    }
    go(0, n, m, &mut vec![false; m], &mut Vec::with_capacity(n), f);
}

/// Counts orbits of words per length; a convenience for tables and CLI output.
pub fn orbit_counts_by_length(alph: &AlphabetSpec, max_len: usize) -> BTreeMap<usize, usize> {
    (0..=max_len)
        .map(|l| (l, word_orbits_of_length(alph, l).len()))
        .collect()
}
