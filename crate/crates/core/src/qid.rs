//! Quasi-identities in the language of lattices, with an exhaustive
//! evaluator over finite lattices.
//!
//! Concrete syntax:
//!
//! ```text
//! qid     := vars "|" [premise ("&" premise)*] "=>" formula
//! vars    := ident ("," ident)*
//! formula := term (("=" | "<=") term)+
//! term    := meet ("v" meet)*
//! meet    := atom ("^" atom)*
//! atom    := ident | "(" term ")"
//! ```
//!
//! `v` is the join operator wherever an operator may appear and a variable
//! name elsewhere, so `a v v` is the join of `a` and `v`. The Unicode forms
//! `∨ ∧ ≤ ⟹` are accepted as well. `s <= t` is sugar for `s v t = t`, and a
//! chain `t1 = t2 = ... = tk` stands for the equations `ti = tk`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::FiniteLattice;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QidError {
    #[error("syntax error at {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("undeclared variable `{name}` at {position}")]
    UndeclaredVariable { name: String, position: usize },
    #[error("variable `{0}` declared twice")]
    DuplicateVariable(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(usize),
    Join(Box<Term>, Box<Term>),
    Meet(Box<Term>, Box<Term>),
}

impl Term {
    pub fn join(a: Term, b: Term) -> Term {
        Term::Join(Box::new(a), Box::new(b))
    }

    pub fn meet(a: Term, b: Term) -> Term {
        Term::Meet(Box::new(a), Box::new(b))
    }

    pub fn eval(&self, l: &FiniteLattice, assignment: &[usize]) -> usize {
        match self {
            Term::Var(i) => assignment[*i],
            Term::Join(a, b) => l.join(a.eval(l, assignment), b.eval(l, assignment)),
            Term::Meet(a, b) => l.meet(a.eval(l, assignment), b.eval(l, assignment)),
        }
    }

    /// Largest variable index occurring in the term.
    pub fn max_var(&self) -> usize {
        match self {
            Term::Var(i) => *i,
            Term::Join(a, b) | Term::Meet(a, b) => a.max_var().max(b.max_var()),
        }
    }

    fn rename(&self, map: &[usize]) -> Term {
        match self {
            Term::Var(i) => Term::Var(map[*i]),
            Term::Join(a, b) => Term::join(a.rename(map), b.rename(map)),
            Term::Meet(a, b) => Term::meet(a.rename(map), b.rename(map)),
        }
    }

    fn write(&self, names: &[String], out: &mut String) {
        match self {
            Term::Var(i) => out.push_str(&names[*i]),
            Term::Join(a, b) => {
                a.write(names, out);
                out.push_str(" v ");
                wrap(b, matches!(**b, Term::Join(..)), names, out);
            }
            Term::Meet(a, b) => {
                wrap(a, matches!(**a, Term::Join(..)), names, out);
                out.push('^');
                wrap(b, !matches!(**b, Term::Var(_)), names, out);
            }
        }
    }
}

fn wrap(t: &Term, parens: bool, names: &[String], out: &mut String) {
    if parens {
        out.push('(');
        t.write(names, out);
        out.push(')');
    } else {
        t.write(names, out);
    }
}

/// `lhs = rhs`. When `leq` is set the equation came from `s <= rhs` and
/// `lhs` is `s v rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Equation {
    pub lhs: Term,
    pub rhs: Term,
    pub leq: bool,
}

impl Equation {
    pub fn eq(lhs: Term, rhs: Term) -> Self {
        Equation { lhs, rhs, leq: false }
    }

    pub fn le(s: Term, t: Term) -> Self {
        Equation {
            lhs: Term::join(s, t.clone()),
            rhs: t,
            leq: true,
        }
    }

    pub fn holds(&self, l: &FiniteLattice, assignment: &[usize]) -> bool {
        self.lhs.eval(l, assignment) == self.rhs.eval(l, assignment)
    }

    pub fn max_var(&self) -> usize {
        self.lhs.max_var().max(self.rhs.max_var())
    }

    fn rename(&self, map: &[usize]) -> Self {
        Equation {
            lhs: self.lhs.rename(map),
            rhs: self.rhs.rename(map),
            leq: self.leq,
        }
    }

    fn write(&self, names: &[String], out: &mut String) {
        match (&self.lhs, self.leq) {
            (Term::Join(s, t), true) if **t == self.rhs => {
                s.write(names, out);
                out.push_str(" <= ");
            }
            _ => {
                self.lhs.write(names, out);
                out.push_str(" = ");
            }
        }
        self.rhs.write(names, out);
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuasiIdentity {
    pub variables: Vec<String>,
    pub premises: Vec<Equation>,
    pub conclusion: Equation,
}

impl QuasiIdentity {
    /// Same sentence with variable `i` renamed to `names[i]`.
    pub fn with_names(&self, names: Vec<String>) -> Self {
        assert_eq!(names.len(), self.variables.len());
        QuasiIdentity {
            variables: names,
            ..self.clone()
        }
    }

    /// Same sentence with the variables declared in a different order:
    /// new position `order[j]`'s variable becomes variable `j`.
    pub fn reorder_variables(&self, order: &[usize]) -> Self {
        let mut map = vec![0; order.len()];
        for (j, &old) in order.iter().enumerate() {
            map[old] = j;
        }
        QuasiIdentity {
            variables: order.iter().map(|&i| self.variables[i].clone()).collect(),
            premises: self.premises.iter().map(|e| e.rename(&map)).collect(),
            conclusion: self.conclusion.rename(&map),
        }
    }

    pub fn with_premise_order(&self, order: &[usize]) -> Self {
        QuasiIdentity {
            premises: order.iter().map(|&i| self.premises[i].clone()).collect(),
            ..self.clone()
        }
    }
}

impl fmt::Display for QuasiIdentity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = self.variables.join(",");
        out.push_str(" | ");
        for (i, p) in self.premises.iter().enumerate() {
            if i > 0 {
                out.push_str(" & ");
            }
            p.write(&self.variables, &mut out);
        }
        if !self.premises.is_empty() {
            out.push(' ');
        }
        out.push_str("=> ");
        self.conclusion.write(&self.variables, &mut out);
        f.write_str(&out)
    }
}

pub const THETA_SOURCE: &str = "a,b,c,u,v | u <= a v b v v & v <= a v c v u & (a v u)^(b v c) <= a \
     & (a v b)^(a v u) = (a v c)^(a v v) = (a v u)^(a v v) = a => u <= a";

pub const JSD_SOURCE: &str = "x,y,z | x v y = x v z => x v y = x v (y^z)";

/// The five-variable quasi-identity separating finite atomistic biatomic
/// join-semidistributive lattices from general finite ones.
pub fn theta() -> QuasiIdentity {
    let [a, b, c, u, v] = [0, 1, 2, 3, 4].map(Term::Var);
    let j = |x: &Term, y: &Term| Term::join(x.clone(), y.clone());
    let premises = vec![
        Equation::le(u.clone(), j(&j(&a, &b), &v)),
        Equation::le(v.clone(), j(&j(&a, &c), &u)),
        Equation::le(Term::meet(j(&a, &u), j(&b, &c)), a.clone()),
        Equation::eq(Term::meet(j(&a, &b), j(&a, &u)), a.clone()),
        Equation::eq(Term::meet(j(&a, &c), j(&a, &v)), a.clone()),
        Equation::eq(Term::meet(j(&a, &u), j(&a, &v)), a.clone()),
    ];
    QuasiIdentity {
        variables: ["a", "b", "c", "u", "v"].map(String::from).to_vec(),
        premises,
        conclusion: Equation::le(u, a),
    }
}

/// `x v y = x v z => x v y = x v (y ^ z)`.
pub fn join_semidistributivity() -> QuasiIdentity {
    let [x, y, z] = [0, 1, 2].map(Term::Var);
    QuasiIdentity {
        variables: ["x", "y", "z"].map(String::from).to_vec(),
        premises: vec![Equation::eq(
            Term::join(x.clone(), y.clone()),
            Term::join(x.clone(), z.clone()),
        )],
        conclusion: Equation::eq(Term::join(x.clone(), y), Term::join(x, Term::meet(Term::Var(1), z))),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Comma,
    Bar,
    Amp,
    Implies,
    Eq,
    Le,
    Join,
    Meet,
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, QidError> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        let next = chars.get(i + 1).map(|&(_, c)| c);
        let single = match c {
            ',' => Some(Tok::Comma),
            '|' => Some(Tok::Bar),
            '&' => Some(Tok::Amp),
            '^' | '∧' => Some(Tok::Meet),
            '∨' => Some(Tok::Join),
            '≤' => Some(Tok::Le),
            '⟹' | '⇒' => Some(Tok::Implies),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(t) = single {
            out.push((t, pos));
            i += 1;
        } else if c.is_whitespace() {
            i += 1;
        } else if c == '=' && next == Some('>') {
            out.push((Tok::Implies, pos));
            i += 2;
        } else if c == '=' {
            out.push((Tok::Eq, pos));
            i += 1;
        } else if c == '<' && next == Some('=') {
            out.push((Tok::Le, pos));
            i += 2;
        } else if c.is_alphabetic() || c == '_' {
            let mut j = i;
            while j < chars.len() && (chars[j].1.is_alphanumeric() || chars[j].1 == '_' || chars[j].1 == '\'') {
                j += 1;
            }
            let name: String = chars[i..j].iter().map(|&(_, c)| c).collect();
            out.push((Tok::Ident(name), pos));
            i = j;
        } else {
            return Err(QidError::Syntax {
                position: pos,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
    end: usize,
    vars: Vec<String>,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(t, _)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |&(_, p)| p)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, QidError> {
        Err(QidError::Syntax {
            position: self.pos(),
            message: message.into(),
        })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), QidError> {
        if self.peek() == Some(&tok) {
            self.at += 1;
            Ok(())
        } else {
            self.error(format!("expected {what}"))
        }
    }

    // `v` in operator position is the join.
    fn at_join(&self) -> bool {
        matches!(self.peek(), Some(Tok::Join)) || matches!(self.peek(), Some(Tok::Ident(s)) if s == "v")
    }

    fn declarations(&mut self) -> Result<(), QidError> {
        if self.peek() == Some(&Tok::Bar) {
            return Ok(());
        }
        loop {
            match self.peek().cloned() {
                Some(Tok::Ident(name)) => {
                    if self.vars.contains(&name) {
                        return Err(QidError::DuplicateVariable(name));
                    }
                    self.vars.push(name);
                    self.at += 1;
                }
                _ => return self.error("expected a variable name"),
            }
            if self.peek() == Some(&Tok::Comma) {
                self.at += 1;
            } else {
                return Ok(());
            }
        }
    }

    fn term(&mut self) -> Result<Term, QidError> {
        let mut t = self.meet()?;
        while self.at_join() {
            self.at += 1;
            let rhs = self.meet()?;
            t = Term::join(t, rhs);
        }
        Ok(t)
    }

    fn meet(&mut self) -> Result<Term, QidError> {
        let mut t = self.atom()?;
        while self.peek() == Some(&Tok::Meet) {
            self.at += 1;
            let rhs = self.atom()?;
            t = Term::meet(t, rhs);
        }
        Ok(t)
    }

    fn atom(&mut self) -> Result<Term, QidError> {
        let position = self.pos();
        match self.peek().cloned() {
            Some(Tok::Ident(name)) => {
                self.at += 1;
                match self.vars.iter().position(|v| *v == name) {
                    Some(i) => Ok(Term::Var(i)),
                    None => Err(QidError::UndeclaredVariable { name, position }),
                }
            }
            Some(Tok::LParen) => {
                self.at += 1;
                let t = self.term()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(t)
            }
            _ => self.error("expected a term"),
        }
    }

    fn formula(&mut self) -> Result<Vec<Equation>, QidError> {
        let first = self.term()?;
        match self.peek() {
            Some(Tok::Le) => {
                self.at += 1;
                let rhs = self.term()?;
                if matches!(self.peek(), Some(Tok::Le | Tok::Eq)) {
                    return self.error("`<=` cannot be chained");
                }
                Ok(vec![Equation::le(first, rhs)])
            }
            Some(Tok::Eq) => {
                let mut terms = vec![first];
                while self.peek() == Some(&Tok::Eq) {
                    self.at += 1;
                    terms.push(self.term()?);
                }
                if self.peek() == Some(&Tok::Le) {
                    return self.error("`<=` cannot follow `=`");
                }
                let last = terms.pop().expect("at least two terms");
                Ok(terms.into_iter().map(|t| Equation::eq(t, last.clone())).collect())
            }
            _ => self.error("expected `=` or `<=`"),
        }
    }
}

pub fn parse_qid(text: &str) -> Result<QuasiIdentity, QidError> {
    let mut p = Parser {
        toks: tokenize(text)?,
        at: 0,
        end: text.len(),
        vars: Vec::new(),
    };
    p.declarations()?;
    p.expect(Tok::Bar, "`|`")?;
    let mut premises = Vec::new();
    if p.peek() != Some(&Tok::Implies) {
        loop {
            premises.extend(p.formula()?);
            if p.peek() == Some(&Tok::Amp) {
                p.at += 1;
            } else {
                break;
            }
        }
    }
    p.expect(Tok::Implies, "`=>`")?;
    let conclusion_pos = p.pos();
    let mut conclusion = p.formula()?;
    if conclusion.len() != 1 {
        return Err(QidError::Syntax {
            position: conclusion_pos,
            message: "the conclusion must be a single equation".into(),
        });
    }
    if p.peek().is_some() {
        return p.error("trailing input");
    }
    Ok(QuasiIdentity {
        variables: p.vars,
        premises,
        conclusion: conclusion.pop().expect("one equation"),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub holds: bool,
    /// Element per variable, in declaration order.
    pub counterexample: Option<Vec<usize>>,
    /// Complete assignments whose status was settled, pruned subtrees
    /// included.
    pub assignments_checked: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictJson {
    pub holds: bool,
    pub counterexample: Option<BTreeMap<String, String>>,
    pub assignments_checked: u64,
}

impl Verdict {
    pub fn to_json(&self, l: &FiniteLattice, q: &QuasiIdentity) -> VerdictJson {
        VerdictJson {
            holds: self.holds,
            counterexample: self.counterexample.as_ref().map(|c| {
                q.variables
                    .iter()
                    .zip(c)
                    .map(|(v, &x)| (v.clone(), l.label(x).to_string()))
                    .collect()
            }),
            assignments_checked: self.assignments_checked,
        }
    }
}

/// (all premises hold, conclusion holds) under `assignment`.
pub fn check_assignment(l: &FiniteLattice, q: &QuasiIdentity, assignment: &[usize]) -> (bool, bool) {
    (
        q.premises.iter().all(|p| p.holds(l, assignment)),
        q.conclusion.holds(l, assignment),
    )
}

/// Exhaustive search over all assignments in lexicographic order. Each
/// premise is tested as soon as its last variable is bound, and a subtree is
/// skipped once the conclusion is already true on the bound prefix.
pub fn evaluate(l: &FiniteLattice, q: &QuasiIdentity) -> Verdict {
    let k = q.variables.len();
    let n = l.len() as u64;
    // Closed formulas (no variables) cannot be written in the grammar, but
    // an empty declaration list still has exactly one assignment.
    if k == 0 {
        let (p, c) = check_assignment(l, q, &[]);
        return Verdict {
            holds: !p || c,
            counterexample: (p && !c).then(Vec::new),
            assignments_checked: 1,
        };
    }
    let mut at_level: Vec<Vec<&Equation>> = vec![Vec::new(); k];
    for p in &q.premises {
        at_level[p.max_var()].push(p);
    }
    let conclusion_level = q.conclusion.max_var();
    let mut subtree = vec![1u64; k + 1];
    for d in (0..k).rev() {
        subtree[d] = subtree[d + 1].saturating_mul(n);
    }

    let mut search = Search {
        l,
        q,
        at_level: &at_level,
        conclusion_level,
        subtree: &subtree,
        assignment: vec![0; k],
        checked: 0,
    };
    let found = search.descend(0);
    Verdict {
        holds: !found,
        counterexample: found.then(|| search.assignment.clone()),
        assignments_checked: search.checked,
    }
}

struct Search<'a> {
    l: &'a FiniteLattice,
    q: &'a QuasiIdentity,
    at_level: &'a [Vec<&'a Equation>],
    conclusion_level: usize,
    subtree: &'a [u64],
    assignment: Vec<usize>,
    checked: u64,
}

impl Search<'_> {
    // Binds variable `d`; returns true with the counterexample left in
    // `assignment`.
    fn descend(&mut self, d: usize) -> bool {
        let k = self.assignment.len();
        for x in 0..self.l.len() {
            self.assignment[d] = x;
            let below = self.subtree[d + 1];
            if !self.at_level[d].iter().all(|p| p.holds(self.l, &self.assignment)) {
                self.checked = self.checked.saturating_add(below);
                continue;
            }
            if d >= self.conclusion_level && self.q.conclusion.holds(self.l, &self.assignment) {
                self.checked = self.checked.saturating_add(below);
                continue;
            }
            if d + 1 == k {
                self.checked = self.checked.saturating_add(1);
                return true;
            }
            if self.descend(d + 1) {
                return true;
            }
        }
        false
    }
}
