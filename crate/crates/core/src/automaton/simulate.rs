//! Membership by breadth-first simulation over canonical configurations.
//!
//! A guessed atom that has not (yet) occurred in the input is kept as an
//! abstract fresh marker. Any two choices of such atoms are related by a
//! permutation fixing the input seen so far, so one marker stands for all of
//! them; when the input later shows a new atom, a marker may turn into it.

use std::collections::{BTreeSet, HashMap};

use super::SymbolicAutomaton;
use crate::atoms::Atom;
use crate::orbits::{for_each_partial_injection, AlphabetError, AlphabetSpec, Letter, Tag, Word};

/// Register content: an input atom or an abstract fresh atom.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Reg {
    Atom(Atom),
    Fresh(u32),
}

/// A state of the automaton up to renaming of fresh markers. Markers are
/// numbered `0, 1, …` in register order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    pub state: usize,
    pub regs: Vec<Reg>,
}

impl Configuration {
    fn canonical(state: usize, mut regs: Vec<Reg>) -> Self {
        let mut order: Vec<u32> = Vec::new();
        for r in regs.iter_mut() {
            if let Reg::Fresh(m) = *r {
                let i = match order.iter().position(|&x| x == m) {
                    Some(i) => i,
                    None => {
                        order.push(m);
                        order.len() - 1
                    }
                };
                *r = Reg::Fresh(i as u32);
            }
        }
        Configuration { state, regs }
    }
}

pub type ConfigSet = BTreeSet<Configuration>;

#[derive(Clone, Debug)]
struct Line {
    dst: usize,
    nvars: usize,
    src_vars: Vec<usize>,
    letter_vars: Vec<usize>,
    dst_vars: Vec<usize>,
    guessed: Vec<usize>,
}

/// Compiled form of an automaton for fast stepping.
#[derive(Clone, Debug)]
pub struct Simulator {
    alphabet: AlphabetSpec,
    names: Vec<String>,
    dims: Vec<usize>,
    tags: HashMap<Tag, usize>,
    /// lines[state][tag]
    lines: Vec<Vec<Vec<Line>>>,
    initial: Vec<usize>,
    is_final: Vec<bool>,
}

impl Simulator {
    pub fn new(aut: &SymbolicAutomaton) -> Self {
        let names: Vec<String> = aut.states.iter().map(|s| s.name.clone()).collect();
        let idx = |n: &str| {
            names
                .iter()
                .position(|x| x == n)
                .expect("validated automaton")
        };
        let tags: HashMap<Tag, usize> = aut
            .alphabet
            .constructors()
            .iter()
            .enumerate()
            .map(|(i, (t, _))| (t.clone(), i))
            .collect();
        let mut lines = vec![vec![Vec::new(); tags.len()]; names.len()];
        for t in &aut.transitions {
            fn index<'a>(vs: &'a [String], vars: &mut Vec<&'a str>) -> Vec<usize> {
                vs.iter()
                    .map(|v| match vars.iter().position(|x| x == v) {
                        Some(i) => i,
                        None => {
                            vars.push(v);
                            vars.len() - 1
                        }
                    })
                    .collect()
            }
            let mut vars: Vec<&str> = Vec::new();
            let src_vars = index(&t.src_vars, &mut vars);
            let letter_vars = index(&t.letter_vars, &mut vars);
            let bound = vars.len();
            let dst_vars = index(&t.dst_vars, &mut vars);
            let line = Line {
                dst: idx(&t.dst),
                nvars: vars.len(),
                src_vars,
                letter_vars,
                dst_vars,
                guessed: (bound..vars.len()).collect(),
            };
            lines[idx(&t.src)][tags[&t.tag]].push(line);
        }
        Simulator {
            alphabet: aut.alphabet.clone(),
            dims: aut.states.iter().map(|s| s.dimension).collect(),
            initial: aut.initial.iter().map(|n| idx(n)).collect(),
            is_final: names.iter().map(|n| aut.final_states.contains(n)).collect(),
            names,
            tags,
            lines,
        }
    }

    pub fn alphabet(&self) -> &AlphabetSpec {
        &self.alphabet
    }

    pub fn state_name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Configurations of the initial orbits, with all registers fresh.
    pub fn initial_configs(&self) -> ConfigSet {
        self.initial
            .iter()
            .map(|&q| Configuration {
                state: q,
                regs: (0..self.dims[q] as u32).map(Reg::Fresh).collect(),
            })
            .collect()
    }

    pub fn is_accepting(&self, configs: &ConfigSet) -> bool {
        configs.iter().any(|c| self.is_final[c.state])
    }

    /// Successors of `configs` on `letter`, where `seen` lists the atoms of
    /// the input read so far (not including `letter`).
    pub fn step(&self, configs: &ConfigSet, letter: &Letter, seen: &[Atom]) -> ConfigSet {
        let mut out = ConfigSet::new();
        let Some(&tag) = self.tags.get(&letter.tag) else {
            return out;
        };
        let mut new_atoms: Vec<Atom> = Vec::new();
        for &a in &letter.atoms {
            if !seen.contains(&a) && !new_atoms.contains(&a) {
                new_atoms.push(a);
            }
        }
        let mut known: Vec<Atom> = seen.to_vec();
        known.extend(&new_atoms);

        for cfg in configs {
            let lines = &self.lines[cfg.state][tag];
            if lines.is_empty() {
                continue;
            }
            let markers = cfg
                .regs
                .iter()
                .filter(|r| matches!(r, Reg::Fresh(_)))
                .count();
            for_each_partial_injection(markers, new_atoms.len(), &mut |assign| {
                let regs: Vec<Reg> = cfg
                    .regs
                    .iter()
                    .map(|&r| match r {
                        Reg::Fresh(m) => match assign[m as usize] {
                            Some(j) => Reg::Atom(new_atoms[j]),
                            None => r,
                        },
                        _ => r,
                    })
                    .collect();
                for line in lines {
                    fire(line, &regs, letter, &known, &mut out);
                }
            });
        }
        debug_assert!(
            {
                let k = self.dims.iter().copied().max().unwrap_or(0) as u32;
                let bound = (self.names.len() as u128)
                    .saturating_mul(((known.len() as u128) + k as u128).saturating_pow(k));
                (out.len() as u128) <= bound
            },
            "configuration count exceeds |Q|·(|W|+k)^k"
        );
        out
    }

    /// Runs `word` from the initial configurations.
    pub fn run(&self, word: &Word) -> Result<ConfigSet, AlphabetError> {
        self.alphabet.check_word(word)?;
        Ok(self.run_from_set(self.initial_configs(), Vec::new(), word))
    }

    /// Runs `word` from the concrete state `state(regs)`.
    pub fn run_from(&self, state: usize, regs: &[Atom], word: &Word) -> ConfigSet {
        let start = ConfigSet::from([Configuration {
            state,
            regs: regs.iter().map(|&a| Reg::Atom(a)).collect(),
        }]);
        self.run_from_set(start, regs.to_vec(), word)
    }

    fn run_from_set(&self, mut configs: ConfigSet, mut seen: Vec<Atom>, word: &Word) -> ConfigSet {
        for l in word.letters() {
            if configs.is_empty() {
                break;
            }
            configs = self.step(&configs, l, &seen);
            for &a in &l.atoms {
                if !seen.contains(&a) {
                    seen.push(a);
                }
            }
        }
        configs
    }

    pub fn accepts(&self, word: &Word) -> Result<bool, AlphabetError> {
        Ok(self.is_accepting(&self.run(word)?))
    }

    /// Whether `state(regs)` accepts `word`.
    pub fn accepts_from(&self, state: usize, regs: &[Atom], word: &Word) -> bool {
        self.is_accepting(&self.run_from(state, regs, word))
    }

    /// Starts an incremental run from the initial configurations.
    pub fn start(&self) -> Run<'_> {
        Run {
            sim: self,
            configs: self.initial_configs(),
            seen: Vec::new(),
        }
    }
}

/// Matches one line against a resolved configuration and concrete letter.
fn fire(line: &Line, regs: &[Reg], letter: &Letter, known: &[Atom], out: &mut ConfigSet) {
    let mut vals: Vec<Option<Reg>> = vec![None; line.nvars];
    for (i, &v) in line.src_vars.iter().enumerate() {
        vals[v] = Some(regs[i]);
    }
    for (j, &v) in line.letter_vars.iter().enumerate() {
        let a = Reg::Atom(letter.atoms[j]);
        match vals[v] {
            None => vals[v] = Some(a),
            Some(x) if x == a => {}
            Some(_) => return,
        }
    }
    // distinct variables must carry distinct values
    let bound: Vec<Reg> = vals.iter().flatten().copied().collect();
    for i in 0..bound.len() {
        if bound[i + 1..].contains(&bound[i]) {
            return;
        }
    }
    if line.guessed.is_empty() {
        let regs = line.dst_vars.iter().map(|&v| vals[v].unwrap()).collect();
        out.insert(Configuration::canonical(line.dst, regs));
        return;
    }
    // guessed variables: an unused input atom or a brand-new marker
    let candidates: Vec<Atom> = known
        .iter()
        .copied()
        .filter(|a| !bound.contains(&Reg::Atom(*a)))
        .collect();
    let next_marker = regs
        .iter()
        .filter_map(|r| match r {
            Reg::Fresh(m) => Some(m + 1),
            _ => None,
        })
        .max()
        .unwrap_or(0);
    for_each_partial_injection(line.guessed.len(), candidates.len(), &mut |assign| {
        let mut vals = vals.clone();
        let mut fresh = next_marker;
        for (g, &v) in line.guessed.iter().enumerate() {
            vals[v] = Some(match assign[g] {
                Some(j) => Reg::Atom(candidates[j]),
                None => {
                    fresh += 1;
                    Reg::Fresh(fresh - 1)
                }
            });
        }
        let regs = line.dst_vars.iter().map(|&v| vals[v].unwrap()).collect();
        out.insert(Configuration::canonical(line.dst, regs));
    });
}

/// An incremental run, one letter at a time.
#[derive(Clone, Debug)]
pub struct Run<'s> {
    sim: &'s Simulator,
    configs: ConfigSet,
    seen: Vec<Atom>,
}

impl Run<'_> {
    pub fn feed(&mut self, letter: &Letter) {
        if !self.configs.is_empty() {
            self.configs = self.sim.step(&self.configs, letter, &self.seen);
        }
        for &a in &letter.atoms {
            if !self.seen.contains(&a) {
                self.seen.push(a);
            }
        }
    }

    pub fn accepting(&self) -> bool {
        self.sim.is_accepting(&self.configs)
    }

    pub fn configs(&self) -> &ConfigSet {
        &self.configs
    }
}

/// Convenience wrapper: compiles `aut` and runs `w`.
pub fn accepts(aut: &SymbolicAutomaton, w: &Word) -> Result<bool, AlphabetError> {
    Simulator::new(aut).accepts(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::parse;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    // last letter does not occur earlier; the atom is guessed up front
    const LAST_UNIQUE: &str = "\
alphabet a 1
state q 1
state f 0
initial q f
final f
trans q(x) a(x) f
trans q(x) a(y) q(x)
";

    #[test]
    fn guessing_run() {
        let aut = parse(LAST_UNIQUE).unwrap();
        let sim = Simulator::new(&aut);
        assert!(sim.accepts(&Word::empty()).unwrap());
        assert!(sim.accepts(&w("a(1)")).unwrap());
        assert!(sim.accepts(&w("a(1) a(2)")).unwrap());
        assert!(!sim.accepts(&w("a(1) a(2) a(1)")).unwrap());
        assert!(!sim.accepts(&w("a(1) a(1)")).unwrap());
        assert!(sim.accepts(&w("a(1) a(1) a(2)")).unwrap());
    }

    #[test]
    fn rejects_foreign_letters() {
        let aut = parse(LAST_UNIQUE).unwrap();
        assert!(accepts(&aut, &w("b(1)")).is_err());
        assert!(accepts(&aut, &w("a(1,2)")).is_err());
    }

    #[test]
    fn guessed_register_may_match_seen_atom() {
        // on some letter, guess a different atom; the next letter must equal it
        let aut = parse(
            "alphabet a 1
state p 0
state r 1
state f 0
initial p
final f
trans p a(x) p
trans p a(x) r(y)
trans r(y) a(y) f
",
        )
        .unwrap();
        let sim = Simulator::new(&aut);
        assert!(sim.accepts(&w("a(1) a(2) a(1)")).unwrap());
        assert!(sim.accepts(&w("a(1) a(2)")).unwrap());
        assert!(!sim.accepts(&w("a(1) a(1)")).unwrap());
        assert!(!sim.accepts(&w("a(1) a(2) a(2)")).unwrap());
        assert!(!sim.accepts(&w("a(1)")).unwrap());
    }

    #[test]
    fn run_from_concrete_state() {
        let aut = parse(LAST_UNIQUE).unwrap();
        let sim = Simulator::new(&aut);
        let q = sim.state_index("q").unwrap();
        assert!(sim.accepts_from(q, &[Atom(4)], &w("a(2) a(4)")));
        assert!(!sim.accepts_from(q, &[Atom(4)], &w("a(2) a(3)")));
    }
}
