//! A brute-force model of rows: rows with supports inside {0, 1, 2} and
//! columns with at most two atoms are compared as finite sets of concrete
//! columns over the atoms 0..8, which is enough room for every configuration
//! of two supports and one column.
//!
//! Each `check_*` function builds the fixture for a seed and reports the
//! first disagreement with the model.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeSet, HashSet};
use std::hash::{Hash, Hasher};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nomlearn::atoms::Permutation;
use nomlearn::rows::{is_generated_by, is_join_irreducible, join_below, ColumnSet, Row, RowFamily};
use nomlearn::{AlphabetSpec, Atom, Word};

const UNIVERSE: u32 = 8;

#[derive(Clone, Debug)]
pub enum Spec {
    /// A pseudo-random subset supported by `tuple`.
    Base {
        tuple: Vec<u32>,
        seed: u64,
        density: u64,
    },
    Union(Vec<Spec>),
    /// The subset moved by a permutation of `0..UNIVERSE` (given as images).
    Moved(Box<Spec>, Vec<u32>),
}

impl Spec {
    fn member(&self, e: &Word) -> bool {
        match self {
            Spec::Base {
                tuple,
                seed,
                density,
            } => {
                let mut outside: Vec<u32> = Vec::new();
                let codes: Vec<(bool, usize)> = e
                    .0
                    .iter()
                    .flat_map(|l| l.atoms.iter())
                    .map(|a| match tuple.iter().position(|&t| t == a.0) {
                        Some(i) => (true, i),
                        None => {
                            let j = outside.iter().position(|&o| o == a.0).unwrap_or_else(|| {
                                outside.push(a.0);
                                outside.len() - 1
                            });
                            (false, j)
                        }
                    })
                    .collect();
                let mut h = DefaultHasher::new();
                (seed, super::relabel(e).to_string(), codes).hash(&mut h);
                h.finish() % 100 < *density
            }
            Spec::Union(parts) => parts.iter().any(|p| p.member(e)),
            Spec::Moved(inner, perm) => {
                let inv = |a: Atom| {
                    Atom(
                        perm.iter()
                            .position(|&x| x == a.0)
                            .map_or(a.0, |i| i as u32),
                    )
                };
                inner.member(&nomlearn::Nominal::map_atoms(e, &inv))
            }
        }
    }

    fn atoms(&self) -> BTreeSet<u32> {
        match self {
            Spec::Base { tuple, .. } => tuple.iter().copied().collect(),
            Spec::Union(parts) => parts.iter().flat_map(|p| p.atoms()).collect(),
            Spec::Moved(inner, perm) => inner.atoms().iter().map(|&a| perm[a as usize]).collect(),
        }
    }
}

pub struct Model {
    columns: Vec<Word>,
}

impl Model {
    fn set(&self, member: impl Fn(&Word) -> bool) -> u128 {
        self.columns
            .iter()
            .enumerate()
            .filter(|(_, e)| member(e))
            .fold(0u128, |acc, (i, _)| acc | (1 << i))
    }

    fn swap(a: u32, b: u32) -> Vec<u32> {
        (0..UNIVERSE)
            .map(|x| {
                if x == a {
                    b
                } else if x == b {
                    a
                } else {
                    x
                }
            })
            .collect()
    }

    /// Least support: atoms whose swap with an unused atom changes the set.
    fn least_support(&self, s: &Spec) -> Vec<u32> {
        let base = self.set(|e| s.member(e));
        s.atoms()
            .into_iter()
            .filter(|&a| {
                let moved = Spec::Moved(Box::new(s.clone()), Self::swap(a, UNIVERSE - 1));
                self.set(|e| moved.member(e)) != base
            })
            .collect()
    }

    /// Every translate of `s` inside the universe, with its support mask.
    fn translates(&self, s: &Spec) -> HashSet<(u128, u8)> {
        let supp = self.least_support(s);
        let pool: Vec<Atom> = (0..UNIVERSE).map(Atom).collect();
        let mut out = HashSet::new();
        for img in super::injective_tuples(&pool, supp.len()) {
            let img: Vec<u32> = img.iter().map(|a| a.0).collect();
            let mut perm = vec![u32::MAX; UNIVERSE as usize];
            for (a, b) in supp.iter().zip(&img) {
                perm[*a as usize] = *b;
            }
            let mut rest = (0..UNIVERSE).filter(|b| !img.contains(b));
            for slot in perm.iter_mut() {
                if *slot == u32::MAX {
                    *slot = rest.next().unwrap();
                }
            }
            let moved = Spec::Moved(Box::new(s.clone()), perm);
            let mask = img.iter().fold(0u8, |m, &b| m | (1 << b));
            out.insert((self.set(|e| moved.member(e)), mask));
        }
        out
    }
}

pub struct Fixture {
    pub model: Model,
    pub cols: ColumnSet,
    pub specs: Vec<Spec>,
    pub rows: Vec<Row>,
    /// the equivariant closure of the family, as concrete sets
    pub closure: HashSet<(u128, u8)>,
}

fn random_base<R: Rng>(rng: &mut R) -> Spec {
    let mut atoms = [0, 1, 2];
    atoms.shuffle(rng);
    let k = rng.gen_range(0..=3);
    Spec::Base {
        tuple: atoms[..k].to_vec(),
        seed: rng.gen(),
        density: [25, 45, 65][rng.gen_range(0..3)],
    }
}

fn local_perm<R: Rng>(rng: &mut R) -> Vec<u32> {
    let mut p: Vec<u32> = vec![0, 1, 2];
    p.shuffle(rng);
    p.extend(3..UNIVERSE);
    p
}

pub fn fixture(seed: u64) -> Fixture {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let choices = ["a(0)", "a(0) a(0)", "a(0) a(1)"];
    let mut col_words: Vec<Word> = choices
        .iter()
        .filter(|_| rng.gen_bool(0.7))
        .map(|s| s.parse().unwrap())
        .collect();
    if col_words.is_empty() {
        col_words.push("a(0) a(1)".parse().unwrap());
    }
    let cols = ColumnSet::new(col_words);
    let patterns: BTreeSet<Word> = cols.patterns().iter().map(|p| p.word().clone()).collect();
    let alph = AlphabetSpec::atoms();
    let columns: Vec<Word> = (0..=2)
        .flat_map(|len| super::all_words(&alph, len, UNIVERSE))
        .filter(|w| patterns.contains(&super::relabel(w)))
        .collect();
    assert!(columns.len() <= 128);
    let model = Model { columns };

    let n = rng.gen_range(1..=4);
    let mut specs: Vec<Spec> = Vec::new();
    for _ in 0..n {
        let s = if !specs.is_empty() && rng.gen_bool(0.4) {
            let parts = (0..rng.gen_range(1..=2))
                .map(|_| {
                    let src = specs[rng.gen_range(0..specs.len())].clone();
                    Spec::Moved(Box::new(src), local_perm(&mut rng))
                })
                .collect();
            Spec::Union(parts)
        } else {
            random_base(&mut rng)
        };
        specs.push(s);
    }
    let rows: Vec<Row> = specs
        .iter()
        .map(|s| {
            let tuple: Vec<Atom> = s.atoms().into_iter().map(Atom).collect();
            Row::from_fn(&cols, tuple, |e| s.member(e))
        })
        .collect();
    let closure = specs.iter().flat_map(|s| model.translates(s)).collect();
    Fixture {
        model,
        cols,
        specs,
        rows,
        closure,
    }
}

impl Fixture {
    fn concrete(&self, r: &Row) -> u128 {
        self.model.set(|e| r.value(e).unwrap())
    }

    fn support_mask(&self, s: &Spec) -> u8 {
        self.model
            .least_support(s)
            .iter()
            .fold(0, |m, &a| m | (1 << a))
    }

    /// Join of the closure members below `x` (strictly, if asked; inside
    /// the support `supp`, if given).
    fn oracle_join_below(&self, x: u128, strict: bool, supp: Option<u8>) -> u128 {
        self.closure
            .iter()
            .filter(|(z, m)| {
                z & !x == 0 && !(strict && *z == x) && supp.is_none_or(|s| m & !s == 0)
            })
            .fold(0, |acc, (z, _)| acc | z)
    }

    fn oracle_ji(&self, i: usize, uniform: bool) -> bool {
        let x = self.model.set(|e| self.specs[i].member(e));
        let supp = uniform.then(|| self.support_mask(&self.specs[i]));
        if !uniform && x == 0 {
            return false;
        }
        self.oracle_join_below(x, true, supp) != x
    }

    fn family(&self) -> RowFamily {
        RowFamily::new(self.rows.clone())
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

pub fn check_denotation(seed: u64) -> Result<(), String> {
    let f = fixture(seed);
    for (i, (s, r)) in f.specs.iter().zip(&f.rows).enumerate() {
        ensure(f.concrete(r) == f.model.set(|e| s.member(e)), || {
            format!("seed {seed}, row {i}: set")
        })?;
        let supp: Vec<u32> = r.support().iter().map(|a| a.0).collect();
        ensure(supp == f.model.least_support(s), || {
            format!("seed {seed}, row {i}: support")
        })?;
    }
    Ok(())
}

pub fn check_join_irreducible(seed: u64) -> Result<(), String> {
    let f = fixture(seed);
    let fam = f.family();
    for i in 0..f.rows.len() {
        for uniform in [false, true] {
            let got = is_join_irreducible(&f.rows[i], &fam, uniform).unwrap();
            ensure(got == f.oracle_ji(i, uniform), || {
                format!("seed {seed}, row {i}, uniform {uniform}: {}", f.rows[i])
            })?;
        }
    }
    Ok(())
}

/// Joins below each member, in all four modes; uniform joins are below plain ones.
pub fn check_joins_below(seed: u64) -> Result<(), String> {
    let f = fixture(seed);
    let fam = f.family();
    for (i, r) in f.rows.iter().enumerate() {
        let x = f.concrete(r);
        for strict in [false, true] {
            let plain = join_below(r, &fam, strict, false).unwrap();
            for uniform in [false, true] {
                let supp = uniform.then(|| f.support_mask(&f.specs[i]));
                let got = join_below(r, &fam, strict, uniform).unwrap();
                ensure(
                    f.concrete(&got) == f.oracle_join_below(x, strict, supp),
                    || format!("seed {seed}, row {i}, strict {strict}, uniform {uniform}"),
                )?;
                ensure(got.leq(&plain).unwrap(), || {
                    format!("seed {seed}, row {i}: uniform join")
                })?;
            }
        }
    }
    Ok(())
}

pub fn check_generated_by(seed: u64) -> Result<(), String> {
    let f = fixture(seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed + 10_000);
    let target = random_base(&mut rng);
    let tuple: Vec<Atom> = target.atoms().into_iter().map(Atom).collect();
    let t_row = Row::from_fn(&f.cols, tuple, |e| target.member(e));
    let t = f.model.set(|e| target.member(e));
    let fam = f.family();
    ensure(
        is_generated_by(&t_row, &fam).unwrap() == (f.oracle_join_below(t, false, None) == t),
        || format!("seed {seed}: random target"),
    )?;
    for (i, r) in f.rows.iter().enumerate() {
        ensure(is_generated_by(r, &fam).unwrap(), || {
            format!("seed {seed}: member {i}")
        })?;
    }
    ensure(
        is_generated_by(&Row::bottom(&f.cols), &fam).unwrap(),
        || format!("seed {seed}: bottom"),
    )
}

/// Indices of the join-irreducible members of the subfamily `members`.
fn ji_reps(f: &Fixture, fam: &RowFamily, members: &[usize]) -> Vec<usize> {
    members
        .iter()
        .copied()
        .filter(|&i| is_join_irreducible(&f.rows[i], fam, false).unwrap())
        .collect()
}

fn same_orbit_in(f: &Fixture, i: usize, among: &[usize]) -> bool {
    among
        .iter()
        .any(|&j| f.rows[i].same_orbit(&f.rows[j]).unwrap())
}

fn subfamily(f: &Fixture, mask: u32) -> (Vec<usize>, RowFamily) {
    let y: Vec<usize> = (0..f.rows.len())
        .filter(|&i| mask & (1 << i) != 0)
        .collect();
    let fam = RowFamily::new(y.iter().map(|&i| f.rows[i].clone()).collect());
    (y, fam)
}

/// Every member is the join of the irreducibles below it.
pub fn check_irreducibles_generate(seed: u64) -> Result<(), String> {
    let f = fixture(seed);
    let fam = f.family();
    let all: Vec<usize> = (0..f.rows.len()).collect();
    let ji = ji_reps(&f, &fam, &all);
    let ji_fam = RowFamily::new(ji.iter().map(|&i| f.rows[i].clone()).collect());
    let ji_closure: HashSet<(u128, u8)> = ji
        .iter()
        .flat_map(|&i| f.model.translates(&f.specs[i]))
        .collect();
    for (i, r) in f.rows.iter().enumerate() {
        ensure(is_generated_by(r, &ji_fam).unwrap(), || {
            format!("seed {seed}, row {i}")
        })?;
        let x = f.concrete(r);
        let below = ji_closure
            .iter()
            .filter(|(z, _)| z & !x == 0)
            .fold(0, |a, (z, _)| a | z);
        ensure(below == x, || format!("seed {seed}, row {i}: model join"))?;
    }
    Ok(())
}

/// A subfamily generating the family contains all its irreducibles.
/// Returns the number of generating subfamilies examined.
pub fn check_generating_subfamilies(seed: u64) -> Result<usize, String> {
    let f = fixture(seed);
    let all: Vec<usize> = (0..f.rows.len()).collect();
    let ji_x = ji_reps(&f, &f.family(), &all);
    let mut checked = 0;
    for mask in 1u32..(1 << f.rows.len()) {
        let (y, y_fam) = subfamily(&f, mask);
        if !f.rows.iter().all(|r| is_generated_by(r, &y_fam).unwrap()) {
            continue;
        }
        checked += 1;
        for &i in &ji_x {
            ensure(same_orbit_in(&f, i, &y), || {
                format!("seed {seed}, mask {mask:b}, row {i}")
            })?;
        }
    }
    Ok(checked)
}

/// If the irreducibles of a subfamily generate the family, they are its
/// irreducibles. Returns the number of such subfamilies.
pub fn check_absolute_irreducibles(seed: u64) -> Result<usize, String> {
    let f = fixture(seed);
    let all: Vec<usize> = (0..f.rows.len()).collect();
    let ji_x = ji_reps(&f, &f.family(), &all);
    let mut checked = 0;
    for mask in 1u32..(1 << f.rows.len()) {
        let (y, y_fam) = subfamily(&f, mask);
        let ji_y = ji_reps(&f, &y_fam, &y);
        let ji_y_fam = RowFamily::new(ji_y.iter().map(|&i| f.rows[i].clone()).collect());
        if !f
            .rows
            .iter()
            .all(|r| is_generated_by(r, &ji_y_fam).unwrap())
        {
            continue;
        }
        checked += 1;
        let same = ji_x.iter().all(|&i| same_orbit_in(&f, i, &ji_y))
            && ji_y.iter().all(|&i| same_orbit_in(&f, i, &ji_x));
        ensure(same, || format!("seed {seed}, mask {mask:b}"))?;
    }
    Ok(checked)
}

pub fn check_partial_order(seed: u64) -> Result<(), String> {
    let f = fixture(seed);
    for a in &f.rows {
        ensure(a.leq(a).unwrap(), || format!("seed {seed}: reflexivity"))?;
        for b in &f.rows {
            let ab = a.leq(b).unwrap();
            ensure(ab == (f.concrete(a) & !f.concrete(b) == 0), || {
                format!("seed {seed}: order")
            })?;
            if ab && b.leq(a).unwrap() {
                ensure(a.denotes_same(b).unwrap(), || {
                    format!("seed {seed}: antisymmetry")
                })?;
            }
            for c in &f.rows {
                if ab && b.leq(c).unwrap() {
                    ensure(a.leq(c).unwrap(), || format!("seed {seed}: transitivity"))?;
                }
            }
        }
    }
    Ok(())
}

/// Comparable members of one orbit are equal.
pub fn check_orbit_rigidity(seed: u64) -> Result<(), String> {
    let f = fixture(seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed + 20_000);
    for r in &f.rows {
        let p = Permutation::from_pairs(
            local_perm(&mut rng)
                .into_iter()
                .enumerate()
                .map(|(i, b)| (Atom(i as u32), Atom(b))),
        )
        .unwrap();
        let moved = r.apply(&p);
        if r.leq(&moved).unwrap() {
            ensure(r.denotes_same(&moved).unwrap(), || {
                format!("seed {seed}: {r}")
            })?;
        }
    }
    Ok(())
}
