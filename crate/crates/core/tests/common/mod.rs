//! Brute-force oracles shared by the integration tests. The oracles never
//! call the library's orbit, simulation or lattice code; `lattice` also holds
//! the checks that compare the library with its model.

#![allow(dead_code)]

pub mod lattice;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::seq::SliceRandom;
use rand::Rng;

use nomlearn::{
    AlphabetSpec, Atom, Letter, StateOrbit, SymbolicAutomaton, Tag, TransitionLine, Word,
};

/// First-occurrence relabelling, written out independently.
pub fn relabel(w: &Word) -> Word {
    let mut seen: Vec<Atom> = Vec::new();
    Word(
        w.0.iter()
            .map(|l| Letter {
                tag: l.tag.clone(),
                atoms: l
                    .atoms
                    .iter()
                    .map(|a| {
                        let i = seen.iter().position(|x| x == a).unwrap_or_else(|| {
                            seen.push(*a);
                            seen.len() - 1
                        });
                        Atom(i as u32)
                    })
                    .collect(),
            })
            .collect(),
    )
}

/// Every word of length `len` with atoms drawn from `0..universe`.
pub fn all_words(alph: &AlphabetSpec, len: usize, universe: u32) -> Vec<Word> {
    let mut out = vec![Word(vec![])];
    for _ in 0..len {
        let mut next = Vec::new();
        for w in &out {
            for (tag, arity) in alph.constructors() {
                let mut tuples: Vec<Vec<Atom>> = vec![vec![]];
                for _ in 0..*arity {
                    tuples = tuples
                        .into_iter()
                        .flat_map(|t| {
                            (0..universe).map(move |a| {
                                let mut t = t.clone();
                                t.push(Atom(a));
                                t
                            })
                        })
                        .collect();
                }
                for t in tuples {
                    let mut w2 = w.0.clone();
                    w2.push(Letter {
                        tag: tag.clone(),
                        atoms: t,
                    });
                    next.push(Word(w2));
                }
            }
        }
        out = next;
    }
    out
}

/// Orbits of words of length `len`, found by relabelling every word over a
/// universe large enough to realize all equality patterns.
pub fn brute_orbits(alph: &AlphabetSpec, len: usize) -> BTreeSet<Word> {
    let universe = (len * alph.atom_dimension()).max(1) as u32;
    all_words(alph, len, universe).iter().map(relabel).collect()
}

/// Partial injections from an `n`-set to an `m`-set, by enumerating all
/// functions into `m + 1` values (the extra value meaning undefined).
pub fn brute_partial_injections(n: usize, m: usize) -> usize {
    let mut count = 0;
    let total = (m + 1).pow(n as u32);
    for code in 0..total {
        let mut c = code;
        let mut used = vec![false; m];
        let mut ok = true;
        for _ in 0..n {
            let v = c % (m + 1);
            c /= m + 1;
            if v < m {
                if used[v] {
                    ok = false;
                    break;
                }
                used[v] = true;
            }
        }
        if ok {
            count += 1;
        }
    }
    count
}

/// Set partitions of an `n`-set, by brute-force labelling and relabelling.
pub fn brute_bell(n: usize) -> usize {
    let mut seen = BTreeSet::new();
    let total = n.pow(n as u32).max(1);
    for code in 0..total {
        let mut c = code;
        let mut labels = Vec::new();
        for _ in 0..n {
            labels.push(c % n.max(1));
            c /= n.max(1);
        }
        let mut map = HashMap::new();
        let canon: Vec<usize> = labels
            .iter()
            .map(|l| {
                let k = map.len();
                *map.entry(*l).or_insert(k)
            })
            .collect();
        seen.insert(canon);
    }
    seen.len()
}

/// A concrete configuration: state index and register contents.
type Config = (usize, Vec<Atom>);

/// Acceptance by explicit configuration sets over a finite universe: the
/// atoms of `w` plus enough spare atoms that guessing never runs short.
pub fn brute_accepts(aut: &SymbolicAutomaton, w: &Word) -> bool {
    let kmax = aut.states.iter().map(|s| s.dimension).max().unwrap_or(0);
    let mut universe: Vec<Atom> = Vec::new();
    for l in &w.0 {
        for a in &l.atoms {
            if !universe.contains(a) {
                universe.push(*a);
            }
        }
    }
    let top = universe.iter().map(|a| a.0 + 1).max().unwrap_or(0);
    for i in 0..(2 * kmax as u32 + 1) {
        universe.push(Atom(top + i));
    }
    let idx: HashMap<&str, usize> = aut
        .states
        .iter()
        .enumerate()
        .map(|(i, s)| (s.name.as_str(), i))
        .collect();

    let mut configs: BTreeSet<Config> = BTreeSet::new();
    for name in &aut.initial {
        let q = idx[name.as_str()];
        for regs in injective_tuples(&universe, aut.states[q].dimension) {
            configs.insert((q, regs));
        }
    }
    for l in &w.0 {
        let mut next = BTreeSet::new();
        for (q, regs) in &configs {
            for t in &aut.transitions {
                if idx[t.src.as_str()] != *q || t.tag != l.tag {
                    continue;
                }
                let mut vals: BTreeMap<&str, Atom> = BTreeMap::new();
                let mut ok = true;
                for (v, a) in t
                    .src_vars
                    .iter()
                    .zip(regs)
                    .chain(t.letter_vars.iter().zip(&l.atoms))
                {
                    match vals.get(v.as_str()) {
                        Some(b) if b != a => ok = false,
                        _ => {
                            vals.insert(v, *a);
                        }
                    }
                }
                if !ok {
                    continue;
                }
                let bound: BTreeSet<Atom> = vals.values().copied().collect();
                if bound.len() != vals.len() {
                    continue;
                }
                let guessed: Vec<&str> = t
                    .dst_vars
                    .iter()
                    .map(|s| s.as_str())
                    .filter(|v| !vals.contains_key(v))
                    .collect::<BTreeSet<_>>()
                    .into_iter()
                    .collect();
                let free: Vec<Atom> = universe
                    .iter()
                    .copied()
                    .filter(|a| !bound.contains(a))
                    .collect();
                for g in injective_tuples(&free, guessed.len()) {
                    let mut full = vals.clone();
                    for (v, a) in guessed.iter().zip(g) {
                        full.insert(v, a);
                    }
                    let regs2: Vec<Atom> = t.dst_vars.iter().map(|v| full[v.as_str()]).collect();
                    next.insert((idx[t.dst.as_str()], regs2));
                }
            }
        }
        configs = next;
    }
    configs
        .iter()
        .any(|(q, _)| aut.final_states.contains(&aut.states[*q].name))
}

pub fn injective_tuples(pool: &[Atom], k: usize) -> Vec<Vec<Atom>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|t: Vec<Atom>| {
                pool.iter()
                    .filter(|a| !t.contains(a))
                    .map(|a| {
                        let mut t = t.clone();
                        t.push(*a);
                        t
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    out
}

/// A small random automaton over `{a/1, b/2}` (or only `a/1`) with up to
/// three states of dimension at most two. Lines may guess.
pub fn random_automaton<R: Rng>(rng: &mut R, binary: bool) -> SymbolicAutomaton {
    let alph = if binary {
        AlphabetSpec::new([("a", 1), ("b", 2)]).unwrap()
    } else {
        AlphabetSpec::atoms()
    };
    let n = rng.gen_range(1..=3);
    let states: Vec<StateOrbit> = (0..n)
        .map(|i| StateOrbit {
            name: format!("s{i}"),
            dimension: rng.gen_range(0..=2),
        })
        .collect();
    let mut initial = BTreeSet::new();
    initial.insert(states[0].name.clone());
    let mut final_states = BTreeSet::new();
    for s in &states {
        if rng.gen_bool(0.3) {
            initial.insert(s.name.clone());
        }
        if rng.gen_bool(0.5) {
            final_states.insert(s.name.clone());
        }
    }
    let pool = ["u", "v", "w", "z"];
    let mut transitions = Vec::new();
    for _ in 0..rng.gen_range(1..=6) {
        let src = &states[rng.gen_range(0..n)];
        let dst = &states[rng.gen_range(0..n)];
        let (tag, arity) = alph.constructors()[rng.gen_range(0..alph.constructors().len())].clone();
        let src_vars: Vec<String> = (0..src.dimension).map(|i| format!("x{i}")).collect();
        let mut avail: Vec<String> = src_vars.clone();
        avail.extend(pool.iter().map(|s| s.to_string()));
        let letter_vars: Vec<String> = (0..arity)
            .map(|_| avail[rng.gen_range(0..avail.len())].clone())
            .collect();
        let mut dst_pool: Vec<String> = src_vars.clone();
        dst_pool.extend(letter_vars.iter().cloned());
        dst_pool.push("g".into());
        dst_pool.sort();
        dst_pool.dedup();
        dst_pool.shuffle(rng);
        if dst_pool.len() < dst.dimension {
            continue;
        }
        let dst_vars: Vec<String> = dst_pool[..dst.dimension].to_vec();
        transitions.push(TransitionLine {
            src: src.name.clone(),
            src_vars,
            tag: Tag::new(tag.as_str()),
            letter_vars,
            dst: dst.name.clone(),
            dst_vars,
        });
    }
    SymbolicAutomaton::new(alph, states, initial, final_states, transitions)
        .expect("valid random automaton")
}

/// Canonical word patterns up to `max_len`, from the brute-force enumeration.
pub fn brute_patterns_upto(alph: &AlphabetSpec, max_len: usize) -> Vec<Word> {
    let mut out = Vec::new();
    for len in 0..=max_len {
        out.extend(brute_orbits(alph, len));
    }
    out
}
