//! Atoms, finite permutations and least supports.
//!
//! Atoms are opaque names: only equality between them is meaningful. Every
//! value that mentions atoms implements [`Nominal`], which gives the group
//! action of finite permutations and the least support (for the term-like
//! values in this crate, the set of atoms occurring in the value).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// A data value. The numeric id is a name, nothing more.
#[derive(
    Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize,
)]
pub struct Atom(pub u32);

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u32> for Atom {
    fn from(id: u32) -> Self {
        Atom(id)
    }
}

/// A finite set of atoms, used as the (least) support of a value.
pub type SupportSet = BTreeSet<Atom>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PermutationError {
    #[error("atom {0} is mapped twice")]
    NotInjective(Atom),
    #[error("domain and image differ, so the mapping is not a permutation")]
    NotClosed,
}

/// A bijection on atoms that moves only finitely many of them.
///
/// Atoms outside the stored map are fixed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Permutation {
    map: BTreeMap<Atom, Atom>,
}

impl Permutation {
    pub fn identity() -> Self {
        Self::default()
    }

    /// Builds a permutation from `(from, to)` pairs. Fixed points may be
    /// omitted; the pairs must form a bijection from a finite set onto itself.
    pub fn from_pairs<I>(pairs: I) -> Result<Self, PermutationError>
    where
        I: IntoIterator<Item = (Atom, Atom)>,
    {
        let mut map = BTreeMap::new();
        let mut image = BTreeSet::new();
        for (from, to) in pairs {
            if map.insert(from, to).is_some() || !image.insert(to) {
                return Err(PermutationError::NotInjective(from));
            }
        }
        let domain: BTreeSet<Atom> = map.keys().copied().collect();
        if domain != image {
            return Err(PermutationError::NotClosed);
        }
        map.retain(|a, b| a != b);
        Ok(Self { map })
    }

    /// The transposition exchanging `a` and `b`.
    pub fn swap(a: Atom, b: Atom) -> Self {
        if a == b {
            return Self::identity();
        }
        Self {
            map: BTreeMap::from([(a, b), (b, a)]),
        }
    }

    /// The cycle `atoms[0] -> atoms[1] -> ... -> atoms[0]`.
    pub fn cycle(atoms: &[Atom]) -> Result<Self, PermutationError> {
        let n = atoms.len();
        Self::from_pairs((0..n).map(|i| (atoms[i], atoms[(i + 1) % n])))
    }

    pub fn get(&self, a: Atom) -> Atom {
        self.map.get(&a).copied().unwrap_or(a)
    }

    /// `self ∘ other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        let mut map = BTreeMap::new();
        for &a in self.map.keys().chain(other.map.keys()) {
            let b = self.get(other.get(a));
            if a != b {
                map.insert(a, b);
            }
        }
        Permutation { map }
    }

    pub fn invert(&self) -> Permutation {
        Permutation {
            map: self.map.iter().map(|(&a, &b)| (b, a)).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.map.is_empty()
    }

    /// Atoms actually moved by the permutation.
    pub fn moved(&self) -> impl Iterator<Item = Atom> + '_ {
        self.map.keys().copied()
    }

    pub fn fixes_all(&self, atoms: &SupportSet) -> bool {
        atoms.iter().all(|&a| self.get(a) == a)
    }
}

/// Values carrying atoms, with the structural permutation action.
pub trait Nominal: Sized {
    /// Visits every atom occurrence.
    fn for_each_atom(&self, f: &mut dyn FnMut(Atom));

    /// Structurally renames every atom.
    fn map_atoms(&self, f: &dyn Fn(Atom) -> Atom) -> Self;

    fn apply(&self, p: &Permutation) -> Self {
        self.map_atoms(&|a| p.get(a))
    }

    /// Least support: the set of atoms occurring in the value.
    fn support(&self) -> SupportSet {
        let mut out = SupportSet::new();
        self.for_each_atom(&mut |a| {
            out.insert(a);
        });
        out
    }

    /// Distinct atoms in order of first occurrence.
    fn atoms_in_order(&self) -> Vec<Atom> {
        let mut out = Vec::new();
        self.for_each_atom(&mut |a| {
            if !out.contains(&a) {
                out.push(a);
            }
        });
        out
    }

    /// One more than the largest atom id occurring (0 for atom-free values).
    fn atom_bound(&self) -> u32 {
        let mut m = 0;
        self.for_each_atom(&mut |a| m = m.max(a.0 + 1));
        m
    }
}

impl Nominal for Atom {
    fn for_each_atom(&self, f: &mut dyn FnMut(Atom)) {
        f(*self)
    }
    fn map_atoms(&self, f: &dyn Fn(Atom) -> Atom) -> Self {
        f(*self)
    }
}

impl<T: Nominal> Nominal for Vec<T> {
    fn for_each_atom(&self, f: &mut dyn FnMut(Atom)) {
        for x in self {
            x.for_each_atom(f);
        }
    }
    fn map_atoms(&self, f: &dyn Fn(Atom) -> Atom) -> Self {
        self.iter().map(|x| x.map_atoms(f)).collect()
    }
}

impl Nominal for SupportSet {
    fn for_each_atom(&self, f: &mut dyn FnMut(Atom)) {
        for &a in self {
            f(a)
        }
    }
    fn map_atoms(&self, f: &dyn Fn(Atom) -> Atom) -> Self {
        self.iter().map(|&a| f(a)).collect()
    }
}

/// Least support of any nominal value.
pub fn support<T: Nominal>(v: &T) -> SupportSet {
    v.support()
}

/// Applies `p` to `v`.
pub fn apply<T: Nominal>(p: &Permutation, v: &T) -> T {
    v.apply(p)
}
