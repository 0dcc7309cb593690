//! Line-oriented book files.
//!
//! ```text
//! # FIFA: at most one winner
//! vars X1 X2 X3
//! constraint ~(X1&X2) & ~(X1&X3) & ~(X2&X3)
//! X1 := 0.5
//! X2 := 1/4
//! query X1 | X2
//! ```
//!
//! `vars` must come first. Several `constraint` lines are conjoined.
//! Probabilities are exact: decimals are base-10 fractions.

use std::sync::Arc;

use num_traits::{One, Signed};
use thiserror::Error;

use crate::algebra::{AlgebraError, EventAlgebra};
use crate::coherence::{Book, CoherenceError};
use crate::formula::{parse, Formula, FormulaError, Universe};
use crate::rational::{parse_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BookFileError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Formula { line: usize, source: FormulaError },
    #[error("line {line}: probability {value} is outside [0, 1]")]
    OutOfRange { line: usize, value: Rational },
    #[error("missing `vars` declaration")]
    MissingVars,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Coherence(#[from] CoherenceError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssessmentLine {
    pub line: usize,
    pub formula: Formula,
    pub probability: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BookFile {
    pub universe: Universe,
    pub constraint: Option<Formula>,
    pub assessments: Vec<AssessmentLine>,
    pub queries: Vec<Formula>,
}

fn keyword<'a>(line: &'a str, word: &str) -> Option<&'a str> {
    let rest = line.strip_prefix(word)?;
    (rest.is_empty() || rest.starts_with(char::is_whitespace)).then(|| rest.trim())
}

pub fn parse_book_file(text: &str) -> Result<BookFile, BookFileError> {
    let mut universe: Option<Universe> = None;
    let mut constraint: Option<Formula> = None;
    let mut assessments = Vec::new();
    let mut queries = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let syntax = |message: String| BookFileError::Syntax { line, message };
        let formula = |src: &str, u: &Universe| {
            parse(src, u).map_err(|source| BookFileError::Formula { line, source })
        };

        if let Some(rest) = keyword(content, "vars") {
            if universe.is_some() {
                return Err(syntax("duplicate `vars` declaration".into()));
            }
            let u = Universe::new(rest.split_whitespace())
                .map_err(|source| BookFileError::Formula { line, source })?;
            universe = Some(u);
            continue;
        }
        let Some(u) = universe.as_ref() else {
            return Err(syntax("expected `vars` before any other line".into()));
        };
        if let Some(rest) = keyword(content, "constraint") {
            let c = formula(rest, u)?;
            constraint = Some(match constraint.take() {
                Some(prev) => Formula::and(prev, c),
                None => c,
            });
        } else if let Some(rest) = keyword(content, "query") {
            queries.push(formula(rest, u)?);
        } else if let Some((lhs, rhs)) = content.split_once(":=") {
            let probability = parse_rational(rhs).map_err(|e| syntax(e.to_string()))?;
            if probability.is_negative() || probability > Rational::one() {
                return Err(BookFileError::OutOfRange {
                    line,
                    value: probability,
                });
            }
            assessments.push(AssessmentLine {
                line,
                formula: formula(lhs, u)?,
                probability,
            });
        } else {
            return Err(syntax(format!("cannot read `{content}`")));
        }
    }

    Ok(BookFile {
        universe: universe.ok_or(BookFileError::MissingVars)?,
        constraint,
        assessments,
        queries,
    })
}

impl BookFile {
    pub fn algebra(&self, cap: usize) -> Result<Arc<EventAlgebra>, BookFileError> {
        Ok(Arc::new(EventAlgebra::build_capped(
            self.universe.clone(),
            self.constraint.clone(),
            cap,
        )?))
    }

    pub fn book(&self, algebra: &Arc<EventAlgebra>) -> Result<Book, BookFileError> {
        let mut book = Book::new(algebra.clone());
        for a in &self.assessments {
            book.push_formula(&a.formula, a.probability.clone())?;
        }
        Ok(book)
    }

    pub fn parse_query(&self, text: &str) -> Result<Formula, FormulaError> {
        parse(text, &self.universe)
    }
}
