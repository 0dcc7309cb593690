//! Boolean event formulas over a declared universe of variables.
//!
//! Formulas use the ASCII signature `~ & | 0 1` with the usual precedence
//! (`~` binds tighter than `&`, which binds tighter than `|`). Worlds are
//! total truth assignments, enumerated lexicographically on the bit tuple
//! with the first declared variable as the most significant bit.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Default maximum number of variables whose worlds may be enumerated.
pub const DEFAULT_WORLD_CAP: usize = 20;

/// Hard ceiling for the world cap; worlds are packed into a `u64`.
pub const MAX_WORLD_CAP: usize = 30;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("invalid variable name `{0}`")]
    InvalidName(String),
    #[error("duplicate variable `{0}` in universe")]
    DuplicateVariable(String),
    #[error("universe of {size} variables exceeds the cap of {cap}")]
    UniverseTooLarge { size: usize, cap: usize },
    #[error("universe must declare at least one variable")]
    EmptyUniverse,
    #[error("not a miniterm: {0}")]
    NotAMiniterm(String),
}

fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// An ordered list of distinct variable names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Universe {
    names: Arc<[String]>,
}

impl Universe {
    pub fn new<I, S>(names: I) -> Result<Self, FormulaError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(FormulaError::EmptyUniverse);
        }
        let mut seen = HashMap::new();
        for (i, name) in names.iter().enumerate() {
            if !is_identifier(name) {
                return Err(FormulaError::InvalidName(name.clone()));
            }
            if seen.insert(name.as_str(), i).is_some() {
                return Err(FormulaError::DuplicateVariable(name.clone()));
            }
        }
        Ok(Universe {
            names: names.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

/// A total truth assignment to the variables of a universe.
///
/// Bit `j` of the declared order is stored at position `len - 1 - j` of
/// `code`, so the integer order of codes is the lexicographic order of the
/// bit tuples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct World {
    code: u64,
    len: u8,
}

impl World {
    pub fn from_code(code: u64, len: usize) -> Self {
        debug_assert!(len <= MAX_WORLD_CAP && (len == 64 || code >> len == 0));
        World {
            code,
            len: len as u8,
        }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let code = bits.iter().fold(0u64, |acc, &b| (acc << 1) | u64::from(b));
        World::from_code(code, bits.len())
    }

    pub fn code(&self) -> u64 {
        self.code
    }

    pub fn len(&self) -> usize {
        usize::from(self.len)
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Truth value of the variable at declared position `index`.
    pub fn get(&self, index: usize) -> bool {
        assert!(index < self.len(), "variable index out of range");
        (self.code >> (self.len() - 1 - index)) & 1 == 1
    }

    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len()).map(move |i| self.get(i))
    }

    /// Number of variables assigned true.
    pub fn ones(&self) -> usize {
        self.code.count_ones() as usize
    }

    /// The miniterm coding this world, e.g. `X1 & ~X2`.
    pub fn miniterm(&self, universe: &Universe) -> Formula {
        assert_eq!(universe.len(), self.len(), "world/universe size mismatch");
        let literals = universe.names().iter().enumerate().map(|(i, name)| {
            let var = Formula::Var(Var {
                name: name.clone(),
                index: i,
            });
            if self.get(i) {
                var
            } else {
                Formula::Not(Box::new(var))
            }
        });
        literals
            .reduce(|acc, lit| Formula::And(Box::new(acc), Box::new(lit)))
            .expect("nonempty universe")
    }
}

impl fmt::Display for World {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for bit in self.bits() {
            f.write_str(if bit { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Enumerate all `2^n` worlds of the universe in lexicographic order.
pub fn enumerate_worlds(universe: &Universe) -> Result<Vec<World>, FormulaError> {
    enumerate_worlds_capped(universe, DEFAULT_WORLD_CAP)
}

pub fn enumerate_worlds_capped(universe: &Universe, cap: usize) -> Result<Vec<World>, FormulaError> {
    let n = universe.len();
    let cap = cap.min(MAX_WORLD_CAP);
    if n > cap {
        return Err(FormulaError::UniverseTooLarge { size: n, cap });
    }
    Ok((0..1u64 << n).map(|code| World::from_code(code, n)).collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Var {
    pub name: String,
    /// Position of the variable in the universe the formula was parsed over.
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Const(bool),
    Var(Var),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(l: Formula, r: Formula) -> Formula {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Formula {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn var(universe: &Universe, name: &str) -> Result<Formula, FormulaError> {
        let index = universe
            .index_of(name)
            .ok_or_else(|| FormulaError::UnknownVariable(name.to_string()))?;
        Ok(Formula::Var(Var {
            name: name.to_string(),
            index,
        }))
    }

    /// Truth value of the formula in world `w`.
    ///
    /// Panics if the formula mentions a variable index outside `w`.
    pub fn evaluate(&self, w: &World) -> bool {
        match self {
            Formula::Const(b) => *b,
            Formula::Var(v) => w.get(v.index),
            Formula::Not(f) => !f.evaluate(w),
            Formula::And(l, r) => l.evaluate(w) && r.evaluate(w),
            Formula::Or(l, r) => l.evaluate(w) || r.evaluate(w),
        }
    }

    /// Names of the variables occurring in the formula, sorted and deduplicated.
    pub fn variables(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out.sort_unstable();
        out.dedup();
        out
    }

    fn collect_vars<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Formula::Const(_) => {}
            Formula::Var(v) => out.push(&v.name),
            Formula::Not(f) => f.collect_vars(out),
            Formula::And(l, r) | Formula::Or(l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
        }
    }

    /// Re-resolve variable indices against another universe containing all
    /// of this formula's variables.
    pub fn reindex(&self, universe: &Universe) -> Result<Formula, FormulaError> {
        Ok(match self {
            Formula::Const(b) => Formula::Const(*b),
            Formula::Var(v) => Formula::var(universe, &v.name)?,
            Formula::Not(f) => Formula::not(f.reindex(universe)?),
            Formula::And(l, r) => Formula::and(l.reindex(universe)?, r.reindex(universe)?),
            Formula::Or(l, r) => Formula::or(l.reindex(universe)?, r.reindex(universe)?),
        })
    }

    /// Decide logical equivalence by comparing truth tables over the universe.
    pub fn equivalent(&self, other: &Formula, universe: &Universe) -> Result<bool, FormulaError> {
        let worlds = enumerate_worlds(universe)?;
        Ok(worlds.iter().all(|w| self.evaluate(w) == other.evaluate(w)))
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Or(..) => 0,
            Formula::And(..) => 1,
            Formula::Not(_) => 2,
            Formula::Const(_) | Formula::Var(_) => 3,
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Binary operators are printed left-associatively, so a right child of
        // equal precedence needs parentheses to survive a re-parse.
        fn child(f: &mut fmt::Formatter<'_>, node: &Formula, min: u8) -> fmt::Result {
            if node.precedence() < min {
                write!(f, "({node})")
            } else {
                write!(f, "{node}")
            }
        }
        match self {
            Formula::Const(b) => f.write_str(if *b { "1" } else { "0" }),
            Formula::Var(v) => f.write_str(&v.name),
            Formula::Not(inner) => {
                f.write_str("~")?;
                child(f, inner, 2)
            }
            Formula::And(l, r) => {
                child(f, l, 1)?;
                f.write_str(" & ")?;
                child(f, r, 2)
            }
            Formula::Or(l, r) => {
                child(f, l, 0)?;
                f.write_str(" | ")?;
                child(f, r, 1)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Token<'a> {
    Ident(&'a str),
    Zero,
    One,
    Not,
    And,
    Or,
    LParen,
    RParen,
}

impl Token<'_> {
    fn describe(&self) -> String {
        match self {
            Token::Ident(s) => format!("identifier `{s}`"),
            Token::Zero => "`0`".into(),
            Token::One => "`1`".into(),
            Token::Not => "`~`".into(),
            Token::And => "`&`".into(),
            Token::Or => "`|`".into(),
            Token::LParen => "`(`".into(),
            Token::RParen => "`)`".into(),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token<'_>)>, FormulaError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let tok = match c {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
                continue;
            }
            b'~' => Token::Not,
            b'&' => Token::And,
            b'|' => Token::Or,
            b'(' => Token::LParen,
            b')' => Token::RParen,
            b'0' => Token::Zero,
            b'1' => Token::One,
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                tokens.push((start, Token::Ident(&text[start..i])));
                continue;
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(FormulaError::Syntax {
                    position: i,
                    message: format!("unexpected character `{ch}`"),
                });
            }
        };
        tokens.push((i, tok));
        i += 1;
    }
    Ok(tokens)
}

struct Parser<'a, 'u> {
    tokens: Vec<(usize, Token<'a>)>,
    pos: usize,
    end: usize,
    universe: &'u Universe,
}

impl<'a> Parser<'a, '_> {
    fn peek(&self) -> Option<Token<'a>> {
        self.tokens.get(self.pos).map(|&(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |&(p, _)| p)
    }

    fn error(&self, message: impl Into<String>) -> FormulaError {
        FormulaError::Syntax {
            position: self.offset(),
            message: message.into(),
        }
    }

    fn expr(&mut self) -> Result<Formula, FormulaError> {
        let mut lhs = self.conjunction()?;
        while self.peek() == Some(Token::Or) {
            self.pos += 1;
            let rhs = self.conjunction()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, FormulaError> {
        let mut lhs = self.negation()?;
        while self.peek() == Some(Token::And) {
            self.pos += 1;
            let rhs = self.negation()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn negation(&mut self) -> Result<Formula, FormulaError> {
        if self.peek() == Some(Token::Not) {
            self.pos += 1;
            return Ok(Formula::not(self.negation()?));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Formula, FormulaError> {
        let tok = self
            .peek()
            .ok_or_else(|| self.error("unexpected end of input"))?;
        let node = match tok {
            Token::Ident(name) => {
                if self.universe.index_of(name).is_none() {
                    return Err(FormulaError::UnknownVariable(name.to_string()));
                }
                Formula::var(self.universe, name)?
            }
            Token::Zero => Formula::Const(false),
            Token::One => Formula::Const(true),
            Token::LParen => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(Token::RParen) {
                    return Err(self.error("expected `)`"));
                }
                inner
            }
            other => return Err(self.error(format!("unexpected {}", other.describe()))),
        };
        self.pos += 1;
        Ok(node)
    }
}

/// Parse a formula whose variables must all belong to `universe`.
pub fn parse(text: &str, universe: &Universe) -> Result<Formula, FormulaError> {
    let mut parser = Parser {
        tokens: tokenize(text)?,
        pos: 0,
        end: text.len(),
        universe,
    };
    let formula = parser.expr()?;
    if let Some(tok) = parser.peek() {
        return Err(parser.error(format!("unexpected {}", tok.describe())));
    }
    Ok(formula)
}

/// Count non-negated and negated conjuncts of a miniterm over `universe`.
pub fn miniterm_counts(f: &Formula, universe: &Universe) -> Result<(usize, usize), FormulaError> {
    fn literals<'f>(f: &'f Formula, out: &mut Vec<(&'f Var, bool)>) -> Result<(), FormulaError> {
        match f {
            Formula::And(l, r) => {
                literals(l, out)?;
                literals(r, out)
            }
            Formula::Var(v) => {
                out.push((v, true));
                Ok(())
            }
            Formula::Not(inner) => match inner.as_ref() {
                Formula::Var(v) => {
                    out.push((v, false));
                    Ok(())
                }
                other => Err(FormulaError::NotAMiniterm(format!(
                    "negation of non-variable `{other}`"
                ))),
            },
            other => Err(FormulaError::NotAMiniterm(format!(
                "`{other}` is not a literal"
            ))),
        }
    }

    let mut lits = Vec::new();
    literals(f, &mut lits)?;
    let mut seen = vec![false; universe.len()];
    let (mut pos, mut neg) = (0, 0);
    for (var, positive) in lits {
        let idx = universe
            .index_of(&var.name)
            .ok_or_else(|| FormulaError::UnknownVariable(var.name.clone()))?;
        if std::mem::replace(&mut seen[idx], true) {
            return Err(FormulaError::NotAMiniterm(format!(
                "variable `{}` occurs more than once",
                var.name
            )));
        }
        if positive {
            pos += 1;
        } else {
            neg += 1;
        }
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(FormulaError::NotAMiniterm(format!(
            "variable `{}` is missing",
            universe.names()[missing]
        )));
    }
    Ok((pos, neg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn uni(names: &[&str]) -> Universe {
        Universe::new(names.iter().copied()).unwrap()
    }

    fn v(u: &Universe, name: &str) -> Formula {
        Formula::var(u, name).unwrap()
    }

    #[test]
    fn parses_negation_and_conjunction() {
        let u = uni(&["X1", "X2"]);
        let f = parse("~X1 & X2", &u).unwrap();
        assert_eq!(f, Formula::and(Formula::not(v(&u, "X1")), v(&u, "X2")));
    }

    #[test]
    fn parentheses_override_precedence() {
        let u = uni(&["X1", "X2", "X3"]);
        let f = parse("X1 | (X2 & ~X3)", &u).unwrap();
        let expected = Formula::or(
            v(&u, "X1"),
            Formula::and(v(&u, "X2"), Formula::not(v(&u, "X3"))),
        );
        assert_eq!(f, expected);
        // without parentheses the same tree results from precedence alone
        assert_eq!(parse("X1|X2&~X3", &u).unwrap(), expected);
        assert_eq!(
            parse("(X1 | X2) & X3", &u).unwrap(),
            Formula::and(Formula::or(v(&u, "X1"), v(&u, "X2")), v(&u, "X3"))
        );
    }

    #[test]
    fn double_operator_is_a_syntax_error_at_second_operator() {
        let u = uni(&["X1", "X2"]);
        match parse("X1 & & X2", &u) {
            Err(FormulaError::Syntax { position, .. }) => assert_eq!(position, 5),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn syntax_errors() {
        let u = uni(&["X1"]);
        for bad in ["", "(X1", "X1)", "X1 X1", "X1 $", "~", "X1 |"] {
            assert!(
                matches!(parse(bad, &u), Err(FormulaError::Syntax { .. })),
                "{bad:?} should not parse"
            );
        }
        assert_eq!(
            parse("X1 & Y", &u),
            Err(FormulaError::UnknownVariable("Y".into()))
        );
    }

    #[test]
    fn constants_and_whitespace() {
        let u = uni(&["a"]);
        assert_eq!(parse(" 0 ", &u).unwrap(), Formula::Const(false));
        assert_eq!(
            parse("~(1)|a", &u).unwrap(),
            Formula::or(Formula::not(Formula::Const(true)), v(&u, "a"))
        );
    }

    #[test]
    fn evaluation_examples() {
        let u = uni(&["X1", "X2", "X3"]);
        let f = parse("X1 & ~X2", &u).unwrap();
        assert!(f.evaluate(&World::from_bits(&[true, false, false])));
        let lem = parse("X1 | ~X1", &u).unwrap();
        for w in enumerate_worlds(&u).unwrap() {
            assert!(lem.evaluate(&w));
        }
        let fifa = parse("X1 & X2 & ~X3", &u).unwrap();
        assert!(!fifa.evaluate(&World::from_bits(&[true, true, true])));
    }

    #[test]
    fn worlds_are_lexicographic() {
        let one = enumerate_worlds(&uni(&["X1"])).unwrap();
        assert_eq!(one.iter().map(|w| w.to_string()).collect::<Vec<_>>(), ["0", "1"]);
        let two = enumerate_worlds(&uni(&["X1", "X2"])).unwrap();
        assert_eq!(
            two.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
            ["00", "01", "10", "11"]
        );
        assert!(two[1].get(1) && !two[1].get(0));
    }

    #[test]
    fn world_cap_is_enforced() {
        let names: Vec<String> = (1..=21).map(|i| format!("X{i}")).collect();
        let u = Universe::new(names).unwrap();
        assert_eq!(
            enumerate_worlds(&u),
            Err(FormulaError::UniverseTooLarge { size: 21, cap: 20 })
        );
        let small = uni(&["a", "b", "c"]);
        assert!(enumerate_worlds_capped(&small, 2).is_err());
    }

    #[test]
    fn universe_validation() {
        assert!(Universe::new(Vec::<String>::new()).is_err());
        assert!(Universe::new(["X1", "X1"]).is_err());
        assert!(Universe::new(["1X"]).is_err());
    }

    #[test]
    fn miniterm_counting() {
        let u = uni(&["X1", "X2", "X3"]);
        let f = parse("X1 & ~X2 & ~X3", &u).unwrap();
        assert_eq!(miniterm_counts(&f, &u).unwrap(), (1, 2));
        let partial = parse("X1 & X2", &u).unwrap();
        assert!(matches!(
            miniterm_counts(&partial, &u),
            Err(FormulaError::NotAMiniterm(_))
        ));
        let u2 = uni(&["X1", "X2"]);
        let neg = parse("~X1 & ~X2", &u2).unwrap();
        assert_eq!(miniterm_counts(&neg, &u2).unwrap(), (0, 2));
        let dup = parse("X1 & ~X1", &u2).unwrap();
        assert!(miniterm_counts(&dup, &u2).is_err());
        let disj = parse("X1 | X2", &u2).unwrap();
        assert!(miniterm_counts(&disj, &u2).is_err());
    }

    #[test]
    fn world_miniterm_round_trips() {
        let u = uni(&["X1", "X2", "X3"]);
        for w in enumerate_worlds(&u).unwrap() {
            let t = w.miniterm(&u);
            let (pos, neg) = miniterm_counts(&t, &u).unwrap();
            assert_eq!(pos, w.ones());
            assert_eq!(pos + neg, 3);
            for other in enumerate_worlds(&u).unwrap() {
                assert_eq!(t.evaluate(&other), other == w);
            }
        }
    }

    #[test]
    fn enumeration_is_stable() {
        let u = uni(&["p", "q", "r", "s"]);
        let a: Vec<String> = enumerate_worlds(&u).unwrap().iter().map(|w| w.to_string()).collect();
        let b: Vec<String> = enumerate_worlds(&u).unwrap().iter().map(|w| w.to_string()).collect();
        assert_eq!(a.join(","), b.join(","));
    }

    const NAMES: [&str; 6] = ["A", "B", "C", "D", "E", "F"];

    fn arb_formula(n: usize) -> impl Strategy<Value = Formula> {
        let leaf = prop_oneof![
            any::<bool>().prop_map(Formula::Const),
            (0..n).prop_map(|i| Formula::Var(Var {
                name: NAMES[i].to_string(),
                index: i
            })),
        ];
        leaf.prop_recursive(5, 32, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(Formula::not),
                (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::and(l, r)),
                (inner.clone(), inner).prop_map(|(l, r)| Formula::or(l, r)),
            ]
        })
    }

    fn universe(n: usize) -> Universe {
        Universe::new(NAMES[..n].iter().copied()).unwrap()
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(f in arb_formula(4)) {
            let u = universe(4);
            let printed = f.to_string();
            let reparsed = parse(&printed, &u).unwrap();
            prop_assert_eq!(&reparsed, &f);
            prop_assert_eq!(reparsed.to_string(), printed);
        }

        #[test]
        fn formula_is_join_of_its_atoms(f in arb_formula(6)) {
            let u = universe(6);
            let worlds = enumerate_worlds(&u).unwrap();
            let atoms: Vec<Formula> = worlds
                .iter()
                .filter(|w| f.evaluate(w))
                .map(|w| w.miniterm(&u))
                .collect();
            let join = atoms
                .into_iter()
                .reduce(Formula::or)
                .unwrap_or(Formula::Const(false));
            for w in &worlds {
                prop_assert_eq!(f.evaluate(w), join.evaluate(w));
            }
        }

        #[test]
        fn de_morgan_and_distributivity(
            f in arb_formula(4), g in arb_formula(4), h in arb_formula(4)
        ) {
            let u = universe(4);
            let lhs = Formula::not(Formula::and(f.clone(), g.clone()));
            let rhs = Formula::or(Formula::not(f.clone()), Formula::not(g.clone()));
            prop_assert!(lhs.equivalent(&rhs, &u).unwrap());
            let lhs = Formula::and(f.clone(), Formula::or(g.clone(), h.clone()));
            let rhs = Formula::or(Formula::and(f.clone(), g), Formula::and(f, h));
            prop_assert!(lhs.equivalent(&rhs, &u).unwrap());
        }
    }
}
