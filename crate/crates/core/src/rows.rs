//! Rows of an observation table as finitely supported subsets of the columns.
//!
//! A row is stored relative to a tuple of atoms (always its least support):
//! for every column orbit and every way the column's atom slots can meet the
//! tuple, one bit. These are exactly the orbits of the columns under
//! permutations fixing the tuple, so the bits determine the whole (infinite)
//! subset. Permuting a row only renames its tuple.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use thiserror::Error;

use crate::atoms::{Atom, Nominal, Permutation, SupportSet};
use crate::orbits::{canonicalize, for_each_partial_injection, Word, WordPattern};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RowError {
    #[error("rows are over different column sets")]
    MismatchedColumns,
    #[error("column {0} is not in the column set")]
    UnknownColumn(Word),
}

/// Slot placement relative to a tuple: position `p` or a fresh atom.
type Placement = Option<usize>;

/// Keys of the rows with a tuple of length `k`.
#[derive(Debug)]
pub struct Layout {
    k: usize,
    /// (column index, code per slot); codes `< k` are tuple positions, codes
    /// `>= k` fresh atoms numbered in slot order.
    keys: Vec<(usize, Vec<u32>)>,
    index: HashMap<(usize, Vec<u32>), usize>,
    /// keys grouped by highest tuple position used (`0` = none, `p+1` = `p`)
    by_max_pos: Vec<Vec<usize>>,
}

impl Layout {
    fn new(k: usize, patterns: &[WordPattern]) -> Self {
        let mut keys = Vec::new();
        for (c, p) in patterns.iter().enumerate() {
            for_each_partial_injection(p.slots(), k, &mut |inj| {
                let mut next = k as u32;
                let codes: Vec<u32> = inj
                    .iter()
                    .map(|t| match t {
                        Some(j) => *j as u32,
                        None => {
                            next += 1;
                            next - 1
                        }
                    })
                    .collect();
                keys.push((c, codes));
            });
        }
        let index = keys
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, k)| (k, i))
            .collect();
        let mut by_max_pos = vec![Vec::new(); k + 1];
        for (i, (_, codes)) in keys.iter().enumerate() {
            let m = codes
                .iter()
                .filter(|&&c| (c as usize) < k)
                .map(|&c| c as usize + 1)
                .max()
                .unwrap_or(0);
            by_max_pos[m].push(i);
        }
        Layout {
            k,
            keys,
            index,
            by_max_pos,
        }
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    fn key_for(&self, col: usize, slots: &[Placement]) -> usize {
        let mut next = self.k as u32;
        let codes: Vec<u32> = slots
            .iter()
            .map(|s| match s {
                Some(p) => *p as u32,
                None => {
                    next += 1;
                    next - 1
                }
            })
            .collect();
        self.index[&(col, codes)]
    }

    fn placements(&self, key: usize) -> (usize, Vec<Placement>) {
        let (c, codes) = &self.keys[key];
        let k = self.k as u32;
        (
            *c,
            codes
                .iter()
                .map(|&x| (x < k).then_some(x as usize))
                .collect(),
        )
    }
}

#[derive(Debug)]
struct ColumnsInner {
    patterns: Vec<WordPattern>,
    index: HashMap<WordPattern, usize>,
    layouts: RwLock<HashMap<usize, Arc<Layout>>>,
}

/// Orbit representatives of the column words: contains the empty word and is
/// suffix-closed. Cheap to clone.
#[derive(Clone, Debug)]
pub struct ColumnSet {
    inner: Arc<ColumnsInner>,
}

impl ColumnSet {
    /// Closes the given orbits under suffixes and adds the empty word.
    pub fn new<I: IntoIterator<Item = Word>>(words: I) -> Self {
        let mut pats: Vec<WordPattern> = vec![canonicalize(&Word::empty())];
        for w in words {
            for s in w.suffixes() {
                pats.push(canonicalize(&s));
            }
        }
        pats.sort();
        pats.dedup();
        let index = pats
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, p)| (p, i))
            .collect();
        ColumnSet {
            inner: Arc::new(ColumnsInner {
                patterns: pats,
                index,
                layouts: RwLock::new(HashMap::new()),
            }),
        }
    }

    /// This set plus the given words (and their suffixes).
    pub fn extended<I: IntoIterator<Item = Word>>(&self, words: I) -> Self {
        let mut all: Vec<Word> = self.patterns().iter().map(|p| p.word().clone()).collect();
        all.extend(words);
        ColumnSet::new(all)
    }

    pub fn patterns(&self) -> &[WordPattern] {
        &self.inner.patterns
    }

    pub fn len(&self) -> usize {
        self.inner.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.inner.index.contains_key(&canonicalize(w))
    }

    pub fn layout(&self, k: usize) -> Arc<Layout> {
        if let Some(l) = self.inner.layouts.read().expect("layout cache").get(&k) {
            return l.clone();
        }
        let l = Arc::new(Layout::new(k, &self.inner.patterns));
        self.inner
            .layouts
            .write()
            .expect("layout cache")
            .entry(k)
            .or_insert(l)
            .clone()
    }

    fn same(&self, other: &ColumnSet) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.patterns == other.inner.patterns
    }

    /// Realizes a key: the column with its slots placed on `tuple`, fresh
    /// slots taking atoms `fresh_from, fresh_from+1, …`.
    fn realize(&self, layout: &Layout, key: usize, tuple: &[Atom], fresh_from: u32) -> Word {
        let (c, codes) = &layout.keys[key];
        let k = layout.k as u32;
        let atoms: Vec<Atom> = codes
            .iter()
            .map(|&x| {
                if x < k {
                    tuple[x as usize]
                } else {
                    Atom(fresh_from + (x - k))
                }
            })
            .collect();
        self.inner.patterns[*c]
            .word()
            .map_atoms(&|a| atoms[a.0 as usize])
    }
}

/// A finitely supported set of columns, stored over its least support.
#[derive(Clone)]
pub struct Row {
    columns: ColumnSet,
    layout: Arc<Layout>,
    tuple: Vec<Atom>,
    bits: Vec<bool>,
}

fn fresh_above(atoms: &[Atom]) -> u32 {
    atoms.iter().map(|a| a.0 + 1).max().unwrap_or(0)
}

impl Row {
    /// The row `{ e | member(e) }` for a subset supported by `tuple`.
    /// `member` is called once per orbit of columns relative to `tuple`.
    pub fn from_fn(
        columns: &ColumnSet,
        tuple: Vec<Atom>,
        mut member: impl FnMut(&Word) -> bool,
    ) -> Row {
        let layout = columns.layout(tuple.len());
        let fresh = fresh_above(&tuple);
        let bits = (0..layout.len())
            .map(|key| member(&columns.realize(&layout, key, &tuple, fresh)))
            .collect();
        Row {
            columns: columns.clone(),
            layout,
            tuple,
            bits,
        }
        .minimized()
    }

    /// The empty row.
    pub fn bottom(columns: &ColumnSet) -> Row {
        Row::from_fn(columns, Vec::new(), |_| false)
    }

    pub fn columns(&self) -> &ColumnSet {
        &self.columns
    }

    /// Least support, in the row's internal order.
    pub fn support_tuple(&self) -> &[Atom] {
        &self.tuple
    }

    pub fn support(&self) -> SupportSet {
        self.tuple.iter().copied().collect()
    }

    pub fn dimension(&self) -> usize {
        self.tuple.len()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.contains(&true)
    }

    /// Number of true entries among the orbit representatives.
    pub fn popcount(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    fn check(&self, other: &Row) -> Result<(), RowError> {
        if self.columns.same(&other.columns) {
            Ok(())
        } else {
            Err(RowError::MismatchedColumns)
        }
    }

    fn place(&self, atoms: impl Iterator<Item = Atom>) -> Vec<Placement> {
        atoms
            .map(|a| self.tuple.iter().position(|&x| x == a))
            .collect()
    }

    /// Whether the concrete column `e` is in the row.
    pub fn value(&self, e: &Word) -> Result<bool, RowError> {
        let pat = canonicalize(e);
        let col = *self
            .columns
            .inner
            .index
            .get(&pat)
            .ok_or_else(|| RowError::UnknownColumn(e.clone()))?;
        let slots = self.place(e.atoms_in_order().into_iter());
        Ok(self.bits[self.layout.key_for(col, &slots)])
    }

    pub fn apply(&self, p: &Permutation) -> Row {
        Row {
            tuple: self.tuple.iter().map(|&a| p.get(a)).collect(),
            ..self.clone()
        }
    }

    /// Drops every atom whose swap with a fresh atom leaves the row unchanged.
    fn minimized(self) -> Row {
        let k = self.tuple.len();
        let keep: Vec<usize> = (0..k).filter(|&i| !self.removable(i)).collect();
        if keep.len() == k {
            return self;
        }
        let layout = self.columns.layout(keep.len());
        let bits = (0..layout.len())
            .map(|key| {
                let (c, pl) = layout.placements(key);
                let pl: Vec<Placement> = pl.into_iter().map(|p| p.map(|p| keep[p])).collect();
                self.bits[self.layout.key_for(c, &pl)]
            })
            .collect();
        Row {
            tuple: keep.iter().map(|&i| self.tuple[i]).collect(),
            columns: self.columns,
            layout,
            bits,
        }
    }

    fn removable(&self, i: usize) -> bool {
        (0..self.layout.len()).all(|key| {
            let (c, mut pl) = self.layout.placements(key);
            match pl.iter().position(|&p| p == Some(i)) {
                None => true,
                Some(s) => {
                    pl[s] = None;
                    self.bits[key] == self.bits[self.layout.key_for(c, &pl)]
                }
            }
        })
    }

    /// Inclusion of the denoted subsets.
    pub fn leq(&self, other: &Row) -> Result<bool, RowError> {
        Ok(self.excess(other)?.is_none())
    }

    /// Some concrete column in `self` but not in `other`.
    pub fn excess(&self, other: &Row) -> Result<Option<Word>, RowError> {
        self.check(other)?;
        // atoms of `other` that are fresh for `self`
        let extra: Vec<usize> = (0..other.tuple.len())
            .filter(|&j| !self.tuple.contains(&other.tuple[j]))
            .collect();
        let own: Vec<Placement> = other.place(self.tuple.iter().copied());
        for key in 0..self.layout.len() {
            if !self.bits[key] {
                continue;
            }
            let (c, pl) = self.layout.placements(key);
            let fresh: Vec<usize> = (0..pl.len()).filter(|&s| pl[s].is_none()).collect();
            let mut bad: Option<Vec<Option<usize>>> = None;
            for_each_partial_injection(fresh.len(), extra.len(), &mut |inj| {
                if bad.is_some() {
                    return;
                }
                let mut slots: Vec<Placement> = pl.iter().map(|p| p.and_then(|p| own[p])).collect();
                for (f, t) in fresh.iter().zip(inj) {
                    slots[*f] = t.map(|t| extra[t]);
                }
                if !other.bits[other.layout.key_for(c, &slots)] {
                    bad = Some(inj.to_vec());
                }
            });
            if let Some(inj) = bad {
                let mut next = fresh_above(&self.tuple).max(fresh_above(&other.tuple));
                let mut fi = fresh.iter().zip(inj);
                let atoms: Vec<Atom> = pl
                    .iter()
                    .map(|p| match p {
                        Some(p) => self.tuple[*p],
                        None => match fi.next().and_then(|(_, t)| t) {
                            Some(t) => other.tuple[extra[t]],
                            None => {
                                next += 1;
                                Atom(next - 1)
                            }
                        },
                    })
                    .collect();
                let e = self.columns.inner.patterns[c]
                    .word()
                    .map_atoms(&|a| atoms[a.0 as usize]);
                return Ok(Some(e));
            }
        }
        Ok(None)
    }

    /// Equality of the denoted subsets.
    pub fn denotes_same(&self, other: &Row) -> Result<bool, RowError> {
        self.check(other)?;
        if self.support() != other.support() || self.popcount() != other.popcount() {
            return Ok(false);
        }
        self.leq(other)
    }

    /// Whether some permutation maps `self` onto `other`.
    pub fn same_orbit(&self, other: &Row) -> Result<bool, RowError> {
        self.check(other)?;
        Ok(self.orbit_map(other).is_some())
    }

    /// A bijection `σ` of tuple positions with `σ·self = other`, if any.
    fn orbit_map(&self, other: &Row) -> Option<Vec<usize>> {
        let k = self.tuple.len();
        if k != other.tuple.len() || self.popcount() != other.popcount() {
            return None;
        }
        // keys that use no tuple position are fixed by every bijection
        if self.layout.by_max_pos[0]
            .iter()
            .any(|&key| self.bits[key] != other.bits[key])
        {
            return None;
        }
        let mut sigma = vec![usize::MAX; k];
        let mut used = vec![false; k];
        self.orbit_search(other, 0, &mut sigma, &mut used)
            .then_some(sigma)
    }

    fn orbit_search(&self, other: &Row, p: usize, sigma: &mut [usize], used: &mut [bool]) -> bool {
        let k = sigma.len();
        if p == k {
            return true;
        }
        for q in 0..k {
            if used[q] {
                continue;
            }
            sigma[p] = q;
            let consistent = self.layout.by_max_pos[p + 1].iter().all(|&key| {
                let (c, pl) = self.layout.placements(key);
                let mapped: Vec<Placement> = pl.iter().map(|x| x.map(|x| sigma[x])).collect();
                self.bits[key] == other.bits[other.layout.key_for(c, &mapped)]
            });
            if consistent {
                used[q] = true;
                if self.orbit_search(other, p + 1, sigma, used) {
                    return true;
                }
                used[q] = false;
            }
        }
        false
    }

    /// Cheap orbit invariant: equal for rows in one orbit.
    pub fn orbit_signature(&self) -> (usize, Vec<usize>) {
        let mut per_col = vec![0; self.columns.len()];
        for (key, &b) in self.bits.iter().enumerate() {
            if b {
                per_col[self.layout.keys[key].0] += 1;
            }
        }
        (self.tuple.len(), per_col)
    }

    /// The renaming of this row that puts `tuple` in place of its support
    /// tuple (position by position).
    pub fn with_tuple(&self, tuple: Vec<Atom>) -> Row {
        assert_eq!(tuple.len(), self.tuple.len());
        Row {
            tuple,
            ..self.clone()
        }
    }

    /// Each orbit representative of the columns relative to the support,
    /// realized with fresh atoms above the support, with its bit.
    pub fn entries(&self) -> Vec<(Word, bool)> {
        let fresh = fresh_above(&self.tuple);
        (0..self.layout.len())
            .map(|key| {
                (
                    self.columns.realize(&self.layout, key, &self.tuple, fresh),
                    self.bits[key],
                )
            })
            .collect()
    }
}

impl fmt::Debug for Row {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Row {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (w, b)) in self.entries().into_iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{w}: {}", b as u8)?;
        }
        f.write_str("}")
    }
}

/// Orbit representatives of an equivariant family of rows.
#[derive(Clone, Debug, Default)]
pub struct RowFamily {
    pub rows: Vec<Row>,
}

impl RowFamily {
    pub fn new(rows: Vec<Row>) -> Self {
        RowFamily { rows }
    }

    /// Keeps one representative per orbit (first occurrence wins).
    pub fn dedup_orbits(&self) -> RowFamily {
        let mut out: Vec<Row> = Vec::new();
        let mut sigs: Vec<(usize, Vec<usize>)> = Vec::new();
        for r in &self.rows {
            let sig = r.orbit_signature();
            let dup = out
                .iter()
                .zip(&sigs)
                .any(|(o, s)| *s == sig && r.orbit_map(o).is_some());
            if !dup {
                out.push(r.clone());
                sigs.push(sig);
            }
        }
        RowFamily { rows: out }
    }

    /// Whether some member of the family's orbit closure equals `r`.
    pub fn contains_orbit_of(&self, r: &Row) -> bool {
        self.rows.iter().any(|y| y.orbit_map(r).is_some())
    }
}

/// Join of every `π·y ≤ target` (`< target` if `strict`; with
/// `supp(π·y) ⊆ supp(target)` if `uniform`) over family members `y`,
/// as a row over `target`'s support.
pub fn join_below(
    target: &Row,
    family: &RowFamily,
    strict: bool,
    uniform: bool,
) -> Result<Row, RowError> {
    let mut acc = vec![false; target.bits.len()];
    let goal = &target.bits;
    for y in &family.rows {
        target.check(y)?;
        if uniform && y.tuple.len() > target.tuple.len() {
            continue;
        }
        let mut search = JoinSearch {
            target,
            y,
            strict,
            uniform,
            acc: &mut acc,
            sigma: vec![None; y.tuple.len()],
            used: vec![false; target.tuple.len()],
        };
        if !search.prefix_ok(0) {
            continue;
        }
        search.go(0);
        if acc == *goal {
            break;
        }
    }
    Ok(Row {
        columns: target.columns.clone(),
        layout: target.layout.clone(),
        tuple: target.tuple.clone(),
        bits: acc,
    })
}

struct JoinSearch<'a> {
    target: &'a Row,
    y: &'a Row,
    strict: bool,
    uniform: bool,
    acc: &'a mut Vec<bool>,
    /// image of each position of `y`: a target position or fresh
    sigma: Vec<Placement>,
    used: Vec<bool>,
}

impl JoinSearch<'_> {
    fn done(&self) -> bool {
        *self.acc == self.target.bits
    }

    /// Keys of `y` whose positions are all decided, placed with their fresh
    /// slots outside the target support, must be true in the target.
    fn prefix_ok(&self, group: usize) -> bool {
        self.y.layout.by_max_pos[group].iter().all(|&key| {
            if !self.y.bits[key] {
                return true;
            }
            let (c, pl) = self.y.layout.placements(key);
            let slots: Vec<Placement> = pl.iter().map(|p| p.and_then(|p| self.sigma[p])).collect();
            self.target.bits[self.target.layout.key_for(c, &slots)]
        })
    }

    fn go(&mut self, p: usize) {
        if self.done() {
            return;
        }
        let ky = self.y.tuple.len();
        if p == ky {
            self.leaf();
            return;
        }
        if !self.uniform {
            self.sigma[p] = None;
            if self.prefix_ok(p + 1) {
                self.go(p + 1);
            }
        }
        for q in 0..self.target.tuple.len() {
            if self.used[q] {
                continue;
            }
            self.sigma[p] = Some(q);
            self.used[q] = true;
            if self.prefix_ok(p + 1) {
                self.go(p + 1);
            }
            self.used[q] = false;
        }
        self.sigma[p] = None;
    }

    fn leaf(&mut self) {
        let target = self.target;
        let free: Vec<usize> = (0..target.tuple.len()).filter(|&q| !self.used[q]).collect();
        let mut image = vec![false; target.bits.len()];
        let mut valid = true;
        for key in 0..self.y.layout.len() {
            if !self.y.bits[key] {
                continue;
            }
            let (c, pl) = self.y.layout.placements(key);
            let fresh: Vec<usize> = (0..pl.len()).filter(|&s| pl[s].is_none()).collect();
            let base: Vec<Placement> = pl.iter().map(|p| p.and_then(|p| self.sigma[p])).collect();
            for_each_partial_injection(fresh.len(), free.len(), &mut |inj| {
                if !valid {
                    return;
                }
                let mut slots = base.clone();
                for (f, t) in fresh.iter().zip(inj) {
                    slots[*f] = t.map(|t| free[t]);
                }
                let tk = target.layout.key_for(c, &slots);
                if target.bits[tk] {
                    image[tk] = true;
                } else {
                    valid = false;
                }
            });
            if !valid {
                return;
            }
        }
        let bijective =
            self.y.tuple.len() == target.tuple.len() && self.sigma.iter().all(Option::is_some);
        if self.strict && bijective && image == target.bits {
            return;
        }
        for (a, b) in self.acc.iter_mut().zip(&image) {
            *a |= *b;
        }
    }
}

/// Join-irreducibility in the family: not the join of strictly smaller
/// members. The standard notion also requires non-emptiness; the uniform
/// variant only joins members supported inside the row's support.
pub fn is_join_irreducible(r: &Row, family: &RowFamily, uniform: bool) -> Result<bool, RowError> {
    if !uniform && r.is_empty() {
        return Ok(false);
    }
    Ok(join_below(r, family, true, uniform)?.bits != r.bits)
}

/// Whether `target` is a join of family members.
pub fn is_generated_by(target: &Row, family: &RowFamily) -> Result<bool, RowError> {
    Ok(join_below(target, family, false, false)?.bits == target.bits)
}
