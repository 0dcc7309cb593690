//! Reports for book files, in text and JSON form, and an LP-free verifier
//! for the JSON certificates.
//!
//! Every number in a JSON report is a string `p/q` (or `p` for integers).

use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{Event, EventAlgebra};
use crate::bookfile::{BookFile, BookFileError};
use crate::coherence::{
    integer_stakes, payoff_matrix, AffineBound, Book, ProbInterval, Verdict,
};
use crate::formula::Formula;
use crate::rational::{fmt_decimal, fmt_rational, parse_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssessmentEntry {
    pub formula: String,
    pub probability: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundEntry {
    pub coefficients: Vec<String>,
    pub constant: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pair<T> {
    pub lo: T,
    pub hi: T,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryEntry {
    pub query: String,
    /// `[lo, hi]`, or `None` when no state extends the book.
    pub interval: Option<[String; 2]>,
    pub witnesses: Option<Pair<Vec<String>>>,
    pub bounds: Option<Pair<BoundEntry>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportVerdict {
    Consistent,
    Inconsistent,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub verdict: ReportVerdict,
    pub variables: Vec<String>,
    pub worlds: Vec<String>,
    pub assessments: Vec<AssessmentEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<Vec<String>>,
    /// Integer bettor stakes, one per assessment.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stakes: Option<Vec<String>>,
    /// Bookmaker balance in each world under `stakes`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub balances: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub queries: Vec<QueryEntry>,
}

fn strs<'a>(values: impl IntoIterator<Item = &'a Rational>) -> Vec<String> {
    values.into_iter().map(fmt_rational).collect()
}

fn bound_entry(b: &AffineBound) -> BoundEntry {
    BoundEntry {
        coefficients: strs(&b.coefficients),
        constant: fmt_rational(&b.constant),
    }
}

/// `value` followed by its `k`-digit decimal rounding when `decimal` is set.
pub fn with_decimal(value: &str, decimal: Option<usize>) -> String {
    match (decimal, parse_rational(value)) {
        (Some(k), Ok(r)) => format!("{value} ({})", fmt_decimal(&r, k)),
        _ => value.to_string(),
    }
}

impl Report {
    /// The report of a consistency check.
    pub fn check(file: &BookFile, book: &Book, verdict: &Verdict) -> Report {
        let algebra = book.algebra();
        let mut report = Report {
            verdict: ReportVerdict::Consistent,
            variables: algebra.universe().names().to_vec(),
            worlds: algebra.worlds().iter().map(|w| w.to_string()).collect(),
            assessments: file
                .assessments
                .iter()
                .map(|a| AssessmentEntry {
                    formula: a.formula.to_string(),
                    probability: fmt_rational(&a.probability),
                })
                .collect(),
            state: None,
            stakes: None,
            balances: None,
            queries: Vec::new(),
        };
        match verdict {
            Verdict::Consistent(state) => report.state = Some(strs(state.masses())),
            Verdict::Inconsistent(stakes) => {
                let stakes: Vec<Rational> = integer_stakes(stakes)
                    .into_iter()
                    .map(Rational::from_integer)
                    .collect();
                let balances = payoff_matrix(book).balances(&stakes);
                report.verdict = ReportVerdict::Inconsistent;
                report.stakes = Some(strs(&stakes));
                report.balances = Some(strs(&balances));
            }
        }
        report
    }

    pub fn push_query(&mut self, query: &Formula, interval: &ProbInterval) {
        let entry = match interval {
            ProbInterval::Empty => QueryEntry {
                query: query.to_string(),
                interval: None,
                witnesses: None,
                bounds: None,
            },
            ProbInterval::Interval {
                lo,
                hi,
                witness_lo,
                witness_hi,
                bound_lo,
                bound_hi,
            } => QueryEntry {
                query: query.to_string(),
                interval: Some([fmt_rational(lo), fmt_rational(hi)]),
                witnesses: Some(Pair {
                    lo: strs(witness_lo.masses()),
                    hi: strs(witness_hi.masses()),
                }),
                bounds: Some(Pair {
                    lo: bound_entry(bound_lo),
                    hi: bound_entry(bound_hi),
                }),
            },
        };
        self.queries.push(entry);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Human-readable form. With `decimal = Some(k)` every rational is
    /// followed by its `k`-digit decimal rounding.
    pub fn to_text(&self, decimal: Option<usize>) -> String {
        let num = |s: &str| with_decimal(s, decimal);
        let header = format!("worlds over {}", self.variables.join(" "));
        let table = |out: &mut String, values: &[String]| {
            for (w, v) in self.worlds.iter().zip(values) {
                let _ = writeln!(out, "  {w}  {}", num(v));
            }
        };
        let mut out = String::new();
        match self.verdict {
            ReportVerdict::Consistent => {
                out.push_str("CONSISTENT\n");
                if let Some(state) = &self.state {
                    let _ = writeln!(out, "state ({header}):");
                    table(&mut out, state);
                }
            }
            ReportVerdict::Inconsistent => {
                out.push_str("INCONSISTENT\n");
                if let (Some(stakes), Some(balances)) = (&self.stakes, &self.balances) {
                    out.push_str("bettor stakes:\n");
                    for (a, s) in self.assessments.iter().zip(stakes) {
                        let _ = writeln!(out, "  {}  {}", a.formula, num(s));
                    }
                    let _ = writeln!(out, "bookmaker balances ({header}):");
                    table(&mut out, balances);
                }
            }
        }
        out
    }

    /// Text for the interval queries only.
    pub fn queries_text(&self, decimal: Option<usize>) -> String {
        let num = |s: &str| with_decimal(s, decimal);
        let mut out = String::new();
        for q in &self.queries {
            let _ = writeln!(out, "query {}", q.query);
            match (&q.interval, &q.witnesses) {
                (Some([lo, hi]), Some(w)) => {
                    let _ = writeln!(out, "{lo} {hi}");
                    if decimal.is_some() {
                        let _ = writeln!(out, "{} {}", num(lo), num(hi));
                    }
                    for (name, masses) in [("lo", &w.lo), ("hi", &w.hi)] {
                        let _ = writeln!(out, "witness {name}:");
                        for (world, m) in self.worlds.iter().zip(masses) {
                            let _ = writeln!(out, "  {world}  {}", num(m));
                        }
                    }
                }
                _ => out.push_str("EMPTY\n"),
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Book(#[from] BookFileError),
    #[error("malformed report: {0}")]
    Malformed(String),
    #[error("certificate rejected: {0}")]
    Rejected(String),
}

fn reject<T>(message: impl Into<String>) -> Result<T, VerifyError> {
    Err(VerifyError::Rejected(message.into()))
}

fn read_numbers(values: &[String], len: usize, what: &str) -> Result<Vec<Rational>, VerifyError> {
    if values.len() != len {
        return reject(format!("{what} has {} entries, expected {len}", values.len()));
    }
    values
        .iter()
        .map(|v| parse_rational(v).map_err(|e| VerifyError::Malformed(format!("{what}: {e}"))))
        .collect()
}

/// Masses of a state: nonnegative, one per world, summing to one.
fn read_state(values: &[String], worlds: usize, what: &str) -> Result<Vec<Rational>, VerifyError> {
    let masses = read_numbers(values, worlds, what)?;
    if masses.iter().any(Signed::is_negative) {
        return reject(format!("{what} has a negative mass"));
    }
    if masses.iter().sum::<Rational>() != Rational::one() {
        return reject(format!("{what} does not sum to 1"));
    }
    Ok(masses)
}

fn mass_of(masses: &[Rational], event: &Event) -> Rational {
    event.members().map(|i| &masses[i]).sum()
}

fn check_state_prices(masses: &[Rational], events: &[Event], prices: &[Rational], what: &str) -> Result<(), VerifyError> {
    for (j, (e, p)) in events.iter().zip(prices).enumerate() {
        if mass_of(masses, e) != *p {
            return reject(format!("{what} gives assessment {} the value {}, not {}", j + 1, fmt_rational(&mass_of(masses, e)), fmt_rational(p)));
        }
    }
    Ok(())
}

/// Bookmaker balance in world `i`: `Σ_j s_j (β_j − [w_i ∈ h_j])`.
fn balance(events: &[Event], prices: &[Rational], stakes: &[Rational], i: usize) -> Rational {
    events
        .iter()
        .zip(prices)
        .zip(stakes)
        .map(|((e, p), s)| {
            let indicator = if e.contains(i) { Rational::one() } else { Rational::zero() };
            s * (p - indicator)
        })
        .sum()
}

/// Re-check a JSON report against the book file it claims to describe,
/// using only event membership and rational arithmetic.
pub fn verify_report(file: &BookFile, report: &Report, max_vars: usize) -> Result<(), VerifyError> {
    let algebra: std::sync::Arc<EventAlgebra> = file.algebra(max_vars)?;
    let n = algebra.len();

    if report.variables != algebra.universe().names() {
        return reject("variables differ from the book");
    }
    let worlds: Vec<String> = algebra.worlds().iter().map(|w| w.to_string()).collect();
    if report.worlds != worlds {
        return reject("world list differs from the book");
    }
    if report.assessments.len() != file.assessments.len() {
        return reject("assessment count differs from the book");
    }
    let mut events = Vec::new();
    let mut prices = Vec::new();
    for (entry, a) in report.assessments.iter().zip(&file.assessments) {
        let p = parse_rational(&entry.probability).map_err(|e| VerifyError::Malformed(e.to_string()))?;
        if p != a.probability {
            return reject(format!("price of `{}` differs from the book", entry.formula));
        }
        let f = file.parse_query(&entry.formula).map_err(|e| VerifyError::Malformed(e.to_string()))?;
        let event = algebra.event_of(&a.formula).map_err(BookFileError::from)?;
        if algebra.event_of(&f).map_err(BookFileError::from)? != event {
            return reject(format!("`{}` is not the event of the book", entry.formula));
        }
        events.push(event);
        prices.push(p);
    }

    match report.verdict {
        ReportVerdict::Consistent => {
            let state = report.state.as_ref().ok_or_else(|| VerifyError::Malformed("missing state".into()))?;
            let masses = read_state(state, n, "state")?;
            check_state_prices(&masses, &events, &prices, "state")?;
        }
        ReportVerdict::Inconsistent => {
            let (Some(stakes), Some(balances)) = (&report.stakes, &report.balances) else {
                return Err(VerifyError::Malformed("missing stakes or balances".into()));
            };
            let stakes = read_numbers(stakes, events.len(), "stakes")?;
            let balances = read_numbers(balances, n, "balances")?;
            for i in 0..n {
                let b = balance(&events, &prices, &stakes, i);
                if b != balances[i] {
                    return reject(format!("balance in world {} is {}, report says {}", worlds[i], fmt_rational(&b), fmt_rational(&balances[i])));
                }
                if !b.is_negative() {
                    return reject(format!("bookmaker does not lose in world {}", worlds[i]));
                }
            }
        }
    }

    for q in &report.queries {
        let f = file.parse_query(&q.query).map_err(|e| VerifyError::Malformed(e.to_string()))?;
        let query = algebra.event_of(&f).map_err(BookFileError::from)?;
        match (&q.interval, &q.witnesses, &q.bounds) {
            (None, None, None) => {
                if report.verdict != ReportVerdict::Inconsistent {
                    return reject(format!("`{}` is empty but the book is not shown inconsistent", q.query));
                }
            }
            (Some([lo, hi]), Some(w), Some(b)) => {
                if report.verdict != ReportVerdict::Consistent {
                    return reject(format!("`{}` has an interval but the book is inconsistent", q.query));
                }
                for (end, masses, bound, lower) in [(lo, &w.lo, &b.lo, true), (hi, &w.hi, &b.hi, false)] {
                    let end = parse_rational(end).map_err(|e| VerifyError::Malformed(e.to_string()))?;
                    let masses = read_state(masses, n, "witness")?;
                    check_state_prices(&masses, &events, &prices, "witness")?;
                    if mass_of(&masses, &query) != end {
                        return reject(format!("witness does not attain {} on `{}`", fmt_rational(&end), q.query));
                    }
                    let coefficients = read_numbers(&bound.coefficients, events.len(), "bound")?;
                    let constant = parse_rational(&bound.constant).map_err(|e| VerifyError::Malformed(e.to_string()))?;
                    let priced: Rational = coefficients.iter().zip(&prices).map(|(c, p)| c * p).sum::<Rational>() + &constant;
                    if priced != end {
                        return reject(format!("bound on `{}` prices to {}, not {}", q.query, fmt_rational(&priced), fmt_rational(&end)));
                    }
                    for i in 0..n {
                        let value: Rational = events
                            .iter()
                            .zip(&coefficients)
                            .filter(|(e, _)| e.contains(i))
                            .map(|(_, c)| c)
                            .sum::<Rational>()
                            + &constant;
                        let indicator = if query.contains(i) { Rational::one() } else { Rational::zero() };
                        if (lower && value > indicator) || (!lower && value < indicator) {
                            return reject(format!("bound on `{}` fails in world {}", q.query, worlds[i]));
                        }
                    }
                }
                let (lo, hi) = (parse_rational(lo).unwrap(), parse_rational(hi).unwrap());
                if lo > hi {
                    return reject(format!("interval of `{}` is reversed", q.query));
                }
            }
            _ => return Err(VerifyError::Malformed(format!("query `{}` is incomplete", q.query))),
        }
    }
    Ok(())
}
