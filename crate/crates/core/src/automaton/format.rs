//! Line-based text format.
//!
//! ```text
//! # comment
//! alphabet a 1
//! state q0 0
//! state q1 1
//! initial q0
//! final q1
//! trans q0 a(x) q1(x)
//! trans q1(x) a(y) q1(x)
//! ```

use std::fmt::Write as _;

use thiserror::Error;

use super::{AutomatonError, StateOrbit, SymbolicAutomaton, TransitionLine};
use crate::orbits::{AlphabetSpec, Tag};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Invalid {
        line: usize,
        #[source]
        source: AutomatonError,
    },
}

impl ParseError {
    pub fn line(&self) -> usize {
        match self {
            ParseError::Syntax { line, .. } | ParseError::Invalid { line, .. } => *line,
        }
    }
}

fn is_ident(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_alphanumeric() || c == '_' || c == '\'' || c == '-')
}

/// `name` or `name(v1,...,vk)`.
fn parse_term(tok: &str, line: usize) -> Result<(String, Vec<String>), ParseError> {
    let err = |msg: String| ParseError::Syntax { line, msg };
    let (name, vars) = match tok.find('(') {
        None => (tok, Vec::new()),
        Some(open) => {
            let inner = tok[open + 1..]
                .strip_suffix(')')
                .ok_or_else(|| err(format!("unbalanced parentheses in `{tok}`")))?;
            let vars: Vec<String> = if inner.trim().is_empty() {
                Vec::new()
            } else {
                inner.split(',').map(|v| v.trim().to_string()).collect()
            };
            (&tok[..open], vars)
        }
    };
    if !is_ident(name) {
        return Err(err(format!("bad name `{name}`")));
    }
    if let Some(v) = vars.iter().find(|v| !is_ident(v)) {
        return Err(err(format!("bad variable `{v}`")));
    }
    Ok((name.to_string(), vars))
}

/// Splits a `trans` body into three terms; spaces inside parentheses are allowed.
fn split_terms(body: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut depth = 0i32;
    for c in body.chars() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        if c.is_whitespace() {
            if depth > 0 {
                continue;
            }
            if !cur.is_empty() {
                out.push(std::mem::take(&mut cur));
            }
        } else {
            cur.push(c);
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

pub fn parse(text: &str) -> Result<SymbolicAutomaton, ParseError> {
    let mut alphabet = AlphabetSpec::default();
    let mut aut = SymbolicAutomaton::empty(AlphabetSpec::default());
    // line numbers, for reporting validation errors at the right place
    let mut trans_lines = Vec::new();
    let mut init_lines = Vec::new();
    let mut final_lines = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (kw, rest) = content
            .split_once(char::is_whitespace)
            .map(|(k, r)| (k, r.trim()))
            .unwrap_or((content, ""));
        let syntax = |msg: String| ParseError::Syntax { line, msg };
        match kw {
            "alphabet" => {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                let [tag, arity] = parts[..] else {
                    return Err(syntax("expected `alphabet <tag> <arity>`".into()));
                };
                if !is_ident(tag) {
                    return Err(syntax(format!("bad tag `{tag}`")));
                }
                let arity: usize = arity
                    .parse()
                    .map_err(|_| syntax(format!("bad arity `{arity}`")))?;
                alphabet
                    .add(Tag::new(tag), arity)
                    .map_err(|e| ParseError::Invalid {
                        line,
                        source: e.into(),
                    })?;
            }
            "state" => {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                let [name, dim] = parts[..] else {
                    return Err(syntax("expected `state <name> <dimension>`".into()));
                };
                if !is_ident(name) {
                    return Err(syntax(format!("bad state name `{name}`")));
                }
                let dimension: usize = dim
                    .parse()
                    .map_err(|_| syntax(format!("bad dimension `{dim}`")))?;
                if aut.state(name).is_some() {
                    return Err(ParseError::Invalid {
                        line,
                        source: AutomatonError::DuplicateState(name.to_string()),
                    });
                }
                aut.states.push(StateOrbit {
                    name: name.to_string(),
                    dimension,
                });
            }
            "initial" | "final" => {
                for name in rest.split_whitespace() {
                    if !is_ident(name) {
                        return Err(syntax(format!("bad state name `{name}`")));
                    }
                    if kw == "initial" {
                        aut.initial.insert(name.to_string());
                        init_lines.push((name.to_string(), line));
                    } else {
                        aut.final_states.insert(name.to_string());
                        final_lines.push((name.to_string(), line));
                    }
                }
            }
            "trans" => {
                let terms = split_terms(rest);
                if terms.len() != 3 {
                    return Err(syntax(
                        "expected `trans <src>(..) <tag>(..) <dst>(..)`".into(),
                    ));
                }
                let (src, src_vars) = parse_term(&terms[0], line)?;
                let (tag, letter_vars) = parse_term(&terms[1], line)?;
                let (dst, dst_vars) = parse_term(&terms[2], line)?;
                aut.transitions.push(TransitionLine {
                    src,
                    src_vars,
                    tag: Tag::new(&tag),
                    letter_vars,
                    dst,
                    dst_vars,
                });
                trans_lines.push(line);
            }
            other => return Err(syntax(format!("unknown keyword `{other}`"))),
        }
    }
    aut.alphabet = alphabet;

    for (name, line) in init_lines.iter().chain(&final_lines) {
        if aut.state(name).is_none() {
            return Err(ParseError::Invalid {
                line: *line,
                source: AutomatonError::UnknownState(name.clone()),
            });
        }
    }
    for (t, &line) in aut.transitions.iter().zip(&trans_lines) {
        let one = SymbolicAutomaton {
            alphabet: aut.alphabet.clone(),
            states: aut.states.clone(),
            initial: Default::default(),
            final_states: Default::default(),
            transitions: vec![t.clone()],
        };
        one.validate()
            .map_err(|source| ParseError::Invalid { line, source })?;
    }
    debug_assert!(aut.validate().is_ok());
    Ok(aut)
}

fn term(out: &mut String, name: &str, vars: &[String]) {
    out.push_str(name);
    if !vars.is_empty() {
        let _ = write!(out, "({})", vars.join(","));
    }
}

pub fn render(aut: &SymbolicAutomaton) -> String {
    let mut out = String::new();
    for (tag, arity) in aut.alphabet.constructors() {
        let _ = writeln!(out, "alphabet {tag} {arity}");
    }
    for s in &aut.states {
        let _ = writeln!(out, "state {} {}", s.name, s.dimension);
    }
    let names = |set: &std::collections::BTreeSet<String>| {
        set.iter().map(String::as_str).collect::<Vec<_>>().join(" ")
    };
    let _ = writeln!(out, "initial {}", names(&aut.initial).trim_end());
    let _ = writeln!(out, "final {}", names(&aut.final_states).trim_end());
    for t in &aut.transitions {
        out.push_str("trans ");
        term(&mut out, &t.src, &t.src_vars);
        out.push(' ');
        term(&mut out, t.tag.as_str(), &t.letter_vars);
        out.push(' ');
        term(&mut out, &t.dst, &t.dst_vars);
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# first letter stored
alphabet a 1
state q0 0
state q1 1   # one register
initial q0
final q1
trans q0 a(x) q1(x)
trans q1(x) a(y) q1(x)
trans q1(x) a(x) q1(x)
";

    #[test]
    fn parse_and_render() {
        let aut = parse(SAMPLE).unwrap();
        assert_eq!(aut.states.len(), 2);
        assert_eq!(aut.transitions.len(), 3);
        let again = parse(&render(&aut)).unwrap();
        assert_eq!(aut, again);
    }

    #[test]
    fn one_state_renders_five_lines() {
        let aut = parse("alphabet a 1\nstate q 0\ninitial q\nfinal q\ntrans q a(x) q\n").unwrap();
        assert_eq!(render(&aut).lines().count(), 5);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = parse("alphabet a 1\nstate q 2\ntrans q(x,x) a(y) q(x,y)\n").unwrap_err();
        assert_eq!(e.line(), 3);
        assert!(matches!(
            e,
            ParseError::Invalid {
                source: AutomatonError::DuplicateVariable(_),
                ..
            }
        ));

        let e = parse("alphabet a 1\nstate q 0\n\ntrans q b(x) q\n").unwrap_err();
        assert_eq!(e.line(), 4);

        let e = parse("alphabet a 1\nstate q 0\ninitial r\n").unwrap_err();
        assert_eq!(e.line(), 3);

        let e = parse("alphabet a 1\nbogus\n").unwrap_err();
        assert!(matches!(e, ParseError::Syntax { line: 2, .. }));

        let e = parse("state q 0\ntrans q a(x q\n").unwrap_err();
        assert_eq!(e.line(), 2);
    }

    #[test]
    fn sections_in_any_order() {
        let aut = parse("trans q a(x) q\ninitial q\nstate q 0\nalphabet a 1\n").unwrap();
        assert!(aut.final_states.is_empty());
        assert_eq!(aut.transitions.len(), 1);
    }
}
