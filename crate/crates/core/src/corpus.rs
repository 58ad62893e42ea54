//! Built-in example languages, each as an automaton plus an independent
//! membership predicate.
//!
//! Entries are produced by a registry of [`Family`] objects; a family may
//! take a numeric parameter (`Ak:3`).

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::atoms::Atom;
use crate::automaton::{parse, StateOrbit, SymbolicAutomaton, TransitionLine};
use crate::orbits::{AlphabetSpec, Word};
use crate::teacher::{Language, PredicateLanguage};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CorpusError {
    #[error("unknown corpus entry `{0}`")]
    Unknown(String),
    #[error("`{name}` needs a parameter >= 1, got `{param}`")]
    BadParameter { name: String, param: String },
}

/// Known facts about an entry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntryInfo {
    /// Accepted by some residual automaton.
    pub residual: bool,
    pub deterministic: bool,
    /// Longest shortest characterising word of the canonical residual automaton.
    pub characterising_length: Option<usize>,
    /// State orbits of the canonical residual automaton.
    pub canonical_orbits: Option<usize>,
}

pub struct CorpusEntry {
    pub name: String,
    pub automaton: SymbolicAutomaton,
    pub predicate: Arc<dyn Language>,
    pub info: EntryInfo,
}

impl CorpusEntry {
    /// Default depth for bounded equivalence: twice the characterising
    /// length plus one, or 6 when that length is unknown.
    pub fn default_eq_depth(&self) -> usize {
        self.info.characterising_length.map_or(6, |l| 2 * l + 1)
    }
}

impl fmt::Debug for CorpusEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CorpusEntry")
            .field("name", &self.name)
            .field("info", &self.info)
            .finish_non_exhaustive()
    }
}

/// A named producer of corpus entries.
pub trait Family: Send + Sync {
    fn name(&self) -> &'static str;

    /// Whether the name takes a `:k` parameter.
    fn parametric(&self) -> bool {
        false
    }

    fn build(&self, param: Option<usize>) -> CorpusEntry;
}

struct Fixed {
    name: &'static str,
    text: &'static str,
    pred: fn(&Word) -> bool,
    info: EntryInfo,
}

impl Family for Fixed {
    fn name(&self) -> &'static str {
        self.name
    }

    fn build(&self, _: Option<usize>) -> CorpusEntry {
        let automaton = parse(self.text).expect("built-in automaton");
        CorpusEntry {
            name: self.name.to_string(),
            predicate: Arc::new(PredicateLanguage::new(
                automaton.alphabet.clone(),
                self.pred,
            )),
            automaton,
            info: self.info.clone(),
        }
    }
}

struct AkFamily;

impl Family for AkFamily {
    fn name(&self) -> &'static str {
        "Ak"
    }

    fn parametric(&self) -> bool {
        true
    }

    fn build(&self, param: Option<usize>) -> CorpusEntry {
        let k = param.unwrap_or(1).max(1);
        CorpusEntry {
            name: format!("Ak:{k}"),
            automaton: ak_automaton(k),
            predicate: Arc::new(PredicateLanguage::new(anc_alphabet(), move |w| {
                ak_contains(k, w)
            })),
            info: EntryInfo {
                residual: true,
                deterministic: false,
                characterising_length: Some(k.max(2)),
                canonical_orbits: Some(2),
            },
        }
    }
}

fn anc_alphabet() -> AlphabetSpec {
    AlphabetSpec::new([("a", 1), ("anc", 1)]).expect("static alphabet")
}

/// The registry, in listing order.
pub fn registry() -> Vec<Box<dyn Family>> {
    vec![
        Box::new(Fixed {
            name: "Ld",
            text: LD,
            pred: ld_contains,
            info: EntryInfo {
                residual: true,
                deterministic: true,
                characterising_length: Some(2),
                canonical_orbits: Some(3),
            },
        }),
        Box::new(Fixed {
            name: "Lngr",
            text: LNGR,
            pred: lngr_contains,
            info: EntryInfo {
                residual: true,
                deterministic: false,
                characterising_length: Some(2),
                canonical_orbits: None,
            },
        }),
        Box::new(Fixed {
            name: "Ln",
            text: LN,
            pred: ln_contains,
            info: EntryInfo {
                residual: false,
                deterministic: false,
                characterising_length: None,
                canonical_orbits: None,
            },
        }),
        Box::new(Fixed {
            name: "Lr",
            text: LR,
            pred: lr_contains,
            info: EntryInfo {
                residual: true,
                deterministic: false,
                characterising_length: Some(2),
                canonical_orbits: None,
            },
        }),
        Box::new(Fixed {
            name: "Lng",
            text: LNG,
            pred: lng_contains,
            info: EntryInfo {
                residual: false,
                deterministic: false,
                characterising_length: None,
                canonical_orbits: None,
            },
        }),
        Box::new(Fixed {
            name: "Compress",
            text: COMPRESS,
            pred: compress_contains,
            info: EntryInfo {
                residual: true,
                deterministic: true,
                characterising_length: Some(2),
                canonical_orbits: Some(2),
            },
        }),
        Box::new(Fixed {
            name: "Lfu",
            text: LFU,
            pred: lfu_contains,
            info: EntryInfo {
                residual: true,
                deterministic: true,
                characterising_length: Some(1),
                canonical_orbits: None,
            },
        }),
        Box::new(AkFamily),
    ]
}

/// All addressable names (`Ak` listed as `Ak:k`).
pub fn names() -> Vec<String> {
    registry()
        .iter()
        .map(|f| {
            if f.parametric() {
                format!("{}:k", f.name())
            } else {
                f.name().to_string()
            }
        })
        .collect()
}

/// Looks up `Name`, `Name:k`, optionally prefixed with `builtin:`.
pub fn get(name: &str) -> Result<CorpusEntry, CorpusError> {
    let bare = name.strip_prefix("builtin:").unwrap_or(name);
    let (base, param) = match bare.split_once(':') {
        Some((b, p)) => (b, Some(p)),
        None => (bare, None),
    };
    let fam = registry()
        .into_iter()
        .find(|f| f.name() == base)
        .ok_or_else(|| CorpusError::Unknown(name.to_string()))?;
    let param = match (fam.parametric(), param) {
        (false, None) => None,
        (false, Some(_)) => return Err(CorpusError::Unknown(name.to_string())),
        (true, p) => {
            let p = p.unwrap_or("");
            match p.parse::<usize>() {
                Ok(k) if k >= 1 => Some(k),
                _ => {
                    return Err(CorpusError::BadParameter {
                        name: base.to_string(),
                        param: p.to_string(),
                    })
                }
            }
        }
    };
    Ok(fam.build(param))
}

/// `A_k`: a `k`-register state that reads anchors of its own atoms and
/// atoms outside it, and an accepting state entered by reading one of its atoms.
pub fn ak_automaton(k: usize) -> SymbolicAutomaton {
    let xs: Vec<String> = (1..=k).map(|i| format!("x{i}")).collect();
    let xr: Vec<&str> = xs.iter().map(String::as_str).collect();
    let mut lines = vec![TransitionLine::new("s", &xr, "a", &["y"], "s", &xr)];
    for x in &xr {
        lines.push(TransitionLine::new("s", &xr, "anc", &[x], "s", &xr));
        lines.push(TransitionLine::new("s", &xr, "a", &[x], "top", &[]));
    }
    SymbolicAutomaton::new(
        anc_alphabet(),
        vec![
            StateOrbit {
                name: "s".into(),
                dimension: k,
            },
            StateOrbit {
                name: "top".into(),
                dimension: 0,
            },
        ],
        ["s".to_string()],
        ["top".to_string()],
        lines,
    )
    .expect("well-formed")
}

const LD: &str = "\
# first atom equals last atom (length >= 2)
alphabet a 1
state q0 0
state q1 1
state q2 1
initial q0
final q2
trans q0 a(x) q1(x)
trans q1(x) a(y) q1(x)
trans q1(x) a(x) q2(x)
trans q2(x) a(x) q2(x)
trans q2(x) a(y) q1(x)
";

const LNGR: &str = "\
# some atom occurs twice
alphabet a 1
state q0 0
state q1 1
state q2 0
initial q0
final q2
trans q0 a(x) q0
trans q0 a(x) q1(x)
trans q1(x) a(y) q1(x)
trans q1(x) a(x) q1(x)
trans q1(x) a(x) q2
trans q2 a(x) q2
";

const LN: &str = "\
# empty, or the last atom does not occur before
alphabet a 1
state q 1
state f 0
initial q f
final f
trans q(x) a(x) f
trans q(x) a(y) q(x)
";

const LR: &str = "\
# as Ln, with anchors for the guessed atom
alphabet a 1
alphabet anc 1
state q 1
state f 0
initial q f
final f
trans q(x) a(x) f
trans q(x) a(y) q(x)
trans q(x) anc(x) q(x)
";

const LNG: &str = "\
# u a b v a c with c different from b
alphabet a 1
state q0 0
state q1 1
state q2 2
state q2e 1
state q3 1
state q4 0
initial q0
final q4
trans q0 a(x) q0
trans q0 a(x) q1(x)
trans q1(x) a(y) q2(x,y)
trans q1(x) a(x) q2e(x)
trans q2(x,y) a(z) q2(x,y)
trans q2(x,y) a(x) q2(x,y)
trans q2(x,y) a(y) q2(x,y)
trans q2(x,y) a(x) q3(y)
trans q2e(x) a(z) q2e(x)
trans q2e(x) a(x) q2e(x)
trans q2e(x) a(x) q3(x)
trans q3(y) a(z) q4
";

const COMPRESS: &str = "\
# a b b ... b with a different from b
alphabet a 1
state q0 0
state q1 1
state q2 1
state sink 0
initial q0
final q1 q2
trans q0 a(x) q1(x)
trans q1(x) a(y) q2(y)
trans q1(x) a(x) sink
trans q2(y) a(y) q2(y)
trans q2(y) a(z) sink
trans sink a(x) sink
";

const LFU: &str = "\
# empty, or the first atom does not occur again
alphabet a 1
state q0 0
state q1 1
initial q0
final q0 q1
trans q0 a(x) q1(x)
trans q1(x) a(y) q1(x)
";

fn atoms_of(w: &Word) -> Vec<Atom> {
    w.letters().iter().map(|l| l.atoms[0]).collect()
}

fn ld_contains(w: &Word) -> bool {
    let a = atoms_of(w);
    a.len() >= 2 && a[0] == a[a.len() - 1]
}

fn lngr_contains(w: &Word) -> bool {
    let a = atoms_of(w);
    (0..a.len()).any(|i| a[i + 1..].contains(&a[i]))
}

fn ln_contains(w: &Word) -> bool {
    let a = atoms_of(w);
    match a.split_last() {
        None => true,
        Some((last, before)) => !before.contains(last),
    }
}

fn lr_contains(w: &Word) -> bool {
    let Some((last, before)) = w.letters().split_last() else {
        return true;
    };
    if last.tag.as_str() != "a" {
        return false;
    }
    let x = last.atoms[0];
    before.iter().all(|l| match l.tag.as_str() {
        "a" => l.atoms[0] != x,
        _ => l.atoms[0] == x,
    })
}

fn lng_contains(w: &Word) -> bool {
    let a = atoms_of(w);
    let n = a.len();
    if n < 4 {
        return false;
    }
    let j = n - 2;
    (0..=j - 2).any(|i| a[i] == a[j] && a[i + 1] != a[j + 1])
}

fn compress_contains(w: &Word) -> bool {
    let a = atoms_of(w);
    match a.len() {
        0 => false,
        1 => true,
        _ => a[1] != a[0] && a[2..].iter().all(|&b| b == a[1]),
    }
}

fn lfu_contains(w: &Word) -> bool {
    let a = atoms_of(w);
    a.is_empty() || !a[1..].contains(&a[0])
}

fn ak_contains(k: usize, w: &Word) -> bool {
    let Some((last, before)) = w.letters().split_last() else {
        return false;
    };
    if last.tag.as_str() != "a" {
        return false;
    }
    let x = last.atoms[0];
    let mut plain = Vec::new();
    let mut anchored = vec![x];
    for l in before {
        let v = if l.tag.as_str() == "a" {
            &mut plain
        } else {
            &mut anchored
        };
        if !v.contains(&l.atoms[0]) {
            v.push(l.atoms[0]);
        }
    }
    anchored.len() <= k && !anchored.iter().any(|a| plain.contains(a))
}
