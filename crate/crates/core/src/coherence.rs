//! De Finetti coherence: payoff matrices, Dutch books and probability
//! intervals.
//!
//! A [`Book`] posts prices `β_j` on events `h_j`. In world `i` the bookmaker's
//! balance for a bettor's stake `s_j` on `h_j` is `(β_j - [i ∈ h_j]) s_j`, so
//! the payoff matrix `M` has entries `β_j - η_i(h_j)` and `Ms` lists the
//! bookmaker's balance in every world. A book is consistent iff some state
//! reproduces every price; otherwise a stake vector makes every balance
//! negative.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::algebra::{meet_all, AlgebraError, Event, EventAlgebra, StateVector};
use crate::formula::{Formula, Universe, World, DEFAULT_WORLD_CAP};
use crate::ratlp::{self, LinearProgram, LpError, LpOutcome, Relation, Solver};
use crate::rational::{common_denominator, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoherenceError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("probability {0} is outside [0, 1]")]
    OutOfRange(Rational),
    #[error("certificate failed verification: {0}")]
    CertificateFailure(String),
    #[error("an empty list of events has no common world")]
    NoEvents,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assessment {
    pub event: Event,
    pub probability: Rational,
    /// Source text of the event, when known.
    pub label: Option<String>,
}

/// A finite list of priced events over one algebra.
#[derive(Debug, Clone)]
pub struct Book {
    algebra: Arc<EventAlgebra>,
    entries: Vec<Assessment>,
}

impl Book {
    pub fn new(algebra: Arc<EventAlgebra>) -> Self {
        Book {
            algebra,
            entries: Vec::new(),
        }
    }

    pub fn algebra(&self) -> &Arc<EventAlgebra> {
        &self.algebra
    }

    pub fn entries(&self) -> &[Assessment] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn push(&mut self, event: Event, probability: Rational) -> Result<(), CoherenceError> {
        self.push_labeled(event, probability, None)
    }

    pub fn push_labeled(
        &mut self,
        event: Event,
        probability: Rational,
        label: Option<String>,
    ) -> Result<(), CoherenceError> {
        if event.algebra_id() != self.algebra.id() {
            return Err(AlgebraError::AlgebraMismatch.into());
        }
        if probability.is_negative() || probability > Rational::one() {
            return Err(CoherenceError::OutOfRange(probability));
        }
        self.entries.push(Assessment {
            event,
            probability,
            label,
        });
        Ok(())
    }

    pub fn push_formula(&mut self, f: &Formula, probability: Rational) -> Result<(), CoherenceError> {
        let event = self.algebra.event_of(f)?;
        self.push_labeled(event, probability, Some(f.to_string()))
    }

    /// A copy of the book with one more assessment.
    pub fn with(&self, event: Event, probability: Rational) -> Result<Book, CoherenceError> {
        let mut extended = self.clone();
        extended.push(event, probability)?;
        Ok(extended)
    }

    pub fn probabilities(&self) -> impl Iterator<Item = &Rational> {
        self.entries.iter().map(|a| &a.probability)
    }

    pub fn payoff_matrix(&self) -> PayoffMatrix {
        payoff_matrix(self)
    }
}

/// Worlds × assessments matrix with entries `β_j - η_i(h_j)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PayoffMatrix {
    rows: Vec<Vec<Rational>>,
    columns: usize,
}

impl PayoffMatrix {
    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    pub fn num_worlds(&self) -> usize {
        self.rows.len()
    }

    pub fn num_assessments(&self) -> usize {
        self.columns
    }

    pub fn get(&self, world: usize, assessment: usize) -> &Rational {
        &self.rows[world][assessment]
    }

    /// The bookmaker's balance in each world for the bettor's stakes `s`.
    pub fn balances(&self, stakes: &[Rational]) -> Vec<Rational> {
        ratlp::mat_vec(&self.rows, stakes)
    }
}

pub fn payoff_matrix(book: &Book) -> PayoffMatrix {
    let rows = (0..book.algebra.len())
        .map(|i| {
            book.entries
                .iter()
                .map(|a| {
                    if a.event.contains(i) {
                        &a.probability - Rational::one()
                    } else {
                        a.probability.clone()
                    }
                })
                .collect()
        })
        .collect();
    PayoffMatrix {
        rows,
        columns: book.len(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    /// A state extending the book.
    Consistent(StateVector),
    /// Bettor stakes with every bookmaker balance at most `-1` and the
    /// largest balance exactly `-1`.
    Inconsistent(Vec<Rational>),
}

impl Verdict {
    pub fn is_consistent(&self) -> bool {
        matches!(self, Verdict::Consistent(_))
    }
}

/// Scale stakes by the least common denominator so every stake is an
/// integer. Balances scale by the same positive factor.
pub fn integer_stakes(stakes: &[Rational]) -> Vec<BigInt> {
    let lcm = Rational::from_integer(common_denominator(stakes));
    stakes.iter().map(|s| (s * &lcm).to_integer()).collect()
}

/// Check that `state` reproduces every price of `book` exactly.
pub fn check_extension(book: &Book, state: &StateVector) -> Result<bool, CoherenceError> {
    for a in &book.entries {
        if state.value(&a.event)? != a.probability {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Check that `stakes` is a normalized Dutch book against `book`.
pub fn check_dutch_book(book: &Book, stakes: &[Rational]) -> bool {
    if stakes.len() != book.len() {
        return false;
    }
    let balances = payoff_matrix(book).balances(stakes);
    let minus_one = -Rational::one();
    balances.iter().all(|b| *b <= minus_one) && balances.contains(&minus_one)
}

fn verify_verdict(book: &Book, verdict: &Verdict) -> Result<(), CoherenceError> {
    let ok = match verdict {
        Verdict::Consistent(state) => {
            state.algebra_id() == book.algebra.id() && check_extension(book, state)?
        }
        Verdict::Inconsistent(stakes) => check_dutch_book(book, stakes),
    };
    if ok {
        Ok(())
    } else {
        Err(CoherenceError::CertificateFailure(format!("{verdict:?}")))
    }
}

/// Decide consistency with the default solver.
pub fn assess(book: &Book) -> Result<Verdict, CoherenceError> {
    assess_with(&Solver::default(), book)
}

/// Decide consistency of `book`, returning a state extending it or a
/// normalized Dutch book.
///
/// One feasibility program over world masses `u >= 0` with `Σu = 1` and
/// `uᵀM = 0` settles both arms: a feasible point is the state, and the
/// Farkas multipliers of the `uᵀM = 0` rows are stakes against the book.
pub fn assess_with(solver: &Solver, book: &Book) -> Result<Verdict, CoherenceError> {
    let matrix = payoff_matrix(book);
    let n = book.algebra.len();
    let mut lp = LinearProgram::new(n).all_nonnegative();
    for j in 0..book.len() {
        let column = matrix.rows.iter().map(|row| row[j].clone()).collect();
        lp = lp.constrain(column, Relation::Eq, Rational::zero());
    }
    lp = lp.constrain(vec![Rational::one(); n], Relation::Eq, Rational::one());

    let verdict = match solver.solve(&lp)? {
        LpOutcome::Feasible { point } => Verdict::Consistent(book.algebra.state(point)?),
        LpOutcome::Infeasible { farkas } => {
            let raw = &farkas[..book.len()];
            let stakes = ratlp::normalize_stakes(&matrix.rows, raw).ok_or_else(|| {
                CoherenceError::CertificateFailure("Farkas multipliers give no Dutch book".into())
            })?;
            Verdict::Inconsistent(stakes)
        }
        other => unreachable!("feasibility program returned {other:?}"),
    };
    verify_verdict(book, &verdict)?;
    Ok(verdict)
}

/// An affine combination `constant + Σ_j coefficients[j]·[w ∈ h_j]` of the
/// book's event indicators. Every state extending the book gives it the
/// value `constant + Σ_j coefficients[j]·β_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineBound {
    pub coefficients: Vec<Rational>,
    pub constant: Rational,
}

impl AffineBound {
    /// Value of the combination in world `i`.
    pub fn at_world(&self, book: &Book, i: usize) -> Rational {
        book.entries
            .iter()
            .zip(&self.coefficients)
            .filter(|(a, _)| a.event.contains(i))
            .map(|(_, c)| c)
            .sum::<Rational>()
            + &self.constant
    }

    /// Value under any state extending the book.
    pub fn priced(&self, book: &Book) -> Rational {
        book.probabilities()
            .zip(&self.coefficients)
            .map(|(p, c)| p * c)
            .sum::<Rational>()
            + &self.constant
    }
}

/// If `bound` lies below (`lower`) or above the query indicator in every
/// world, the value it certifies for the query; otherwise `None`.
pub fn check_interval_bound(book: &Book, query: &Event, bound: &AffineBound, lower: bool) -> Option<Rational> {
    if bound.coefficients.len() != book.len() || query.algebra_id() != book.algebra.id() {
        return None;
    }
    let dominated = (0..book.algebra.len()).all(|i| {
        let q = if query.contains(i) { Rational::one() } else { Rational::zero() };
        let b = bound.at_world(book, i);
        if lower {
            b <= q
        } else {
            b >= q
        }
    });
    dominated.then(|| bound.priced(book))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProbInterval {
    Empty,
    Interval {
        lo: Rational,
        hi: Rational,
        witness_lo: StateVector,
        witness_hi: StateVector,
        /// Pointwise lower bound on the query certifying `σ(query) >= lo`.
        bound_lo: AffineBound,
        /// Pointwise upper bound on the query certifying `σ(query) <= hi`.
        bound_hi: AffineBound,
    },
}

impl ProbInterval {
    pub fn bounds(&self) -> Option<(&Rational, &Rational)> {
        match self {
            ProbInterval::Empty => None,
            ProbInterval::Interval { lo, hi, .. } => Some((lo, hi)),
        }
    }

    pub fn contains(&self, q: &Rational) -> bool {
        self.bounds().is_some_and(|(lo, hi)| lo <= q && q <= hi)
    }
}

pub fn fundamental_interval(book: &Book, query: &Event) -> Result<ProbInterval, CoherenceError> {
    fundamental_interval_with(&Solver::default(), book, query)
}

/// The set of values `σ(query)` over all states `σ` extending the book:
/// empty, or a closed interval whose endpoints are attained by the returned
/// witness states.
pub fn fundamental_interval_with(
    solver: &Solver,
    book: &Book,
    query: &Event,
) -> Result<ProbInterval, CoherenceError> {
    if query.algebra_id() != book.algebra.id() {
        return Err(AlgebraError::AlgebraMismatch.into());
    }
    let n = book.algebra.len();
    let indicator = |e: &Event| -> Vec<Rational> {
        (0..n)
            .map(|i| if e.contains(i) { Rational::one() } else { Rational::zero() })
            .collect()
    };
    let mut lp = LinearProgram::new(n).all_nonnegative();
    for a in &book.entries {
        lp = lp.constrain(indicator(&a.event), Relation::Eq, a.probability.clone());
    }
    lp = lp.constrain(vec![Rational::one(); n], Relation::Eq, Rational::one());
    let objective = indicator(query);

    // The duals of the price rows and the normalization row form an affine
    // bound on the query indicator; for a maximization they come negated.
    let m = book.len();
    let extreme = |lp: LinearProgram, negate: bool| -> Result<Option<(Rational, StateVector, AffineBound)>, CoherenceError> {
        let outcome = solver.solve(&lp)?;
        if !ratlp::verify(&lp, &outcome) {
            return Err(CoherenceError::CertificateFailure(format!("{outcome:?}")));
        }
        match outcome {
            LpOutcome::Optimal { point, value, duals } => {
                let mut duals: Vec<Rational> = if negate {
                    duals.into_iter().map(|d| -d).collect()
                } else {
                    duals
                };
                let constant = duals.pop().expect("normalization row");
                debug_assert_eq!(duals.len(), m);
                let bound = AffineBound { coefficients: duals, constant };
                Ok(Some((value, book.algebra.state(point)?, bound)))
            }
            LpOutcome::Infeasible { .. } => Ok(None),
            other => unreachable!("bounded program returned {other:?}"),
        }
    };

    let Some((lo, witness_lo, bound_lo)) = extreme(lp.clone().minimize(objective.clone()), false)? else {
        return Ok(ProbInterval::Empty);
    };
    let (hi, witness_hi, bound_hi) = extreme(lp.maximize(objective), true)?
        .ok_or_else(|| CoherenceError::CertificateFailure("maximization infeasible".into()))?;
    if check_interval_bound(book, query, &bound_lo, true).as_ref() != Some(&lo)
        || check_interval_bound(book, query, &bound_hi, false).as_ref() != Some(&hi)
    {
        return Err(CoherenceError::CertificateFailure("interval bounds".into()));
    }
    Ok(ProbInterval::Interval {
        lo,
        hi,
        witness_lo,
        witness_hi,
        bound_lo,
        bound_hi,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LogicalVerdict {
    /// A surviving world in which every event is true.
    Satisfiable { index: usize, world: World },
    Unsatisfiable,
}

/// Find a world where all events hold at once.
pub fn logical_consistency(
    algebra: &EventAlgebra,
    events: &[Event],
) -> Result<LogicalVerdict, CoherenceError> {
    if events.iter().any(|e| e.algebra_id() != algebra.id()) {
        return Err(AlgebraError::AlgebraMismatch.into());
    }
    let meet = meet_all(events)?.ok_or(CoherenceError::NoEvents)?;
    let first = meet.members().next();
    Ok(match first {
        Some(index) => LogicalVerdict::Satisfiable {
            index,
            world: algebra.worlds()[index],
        },
        None => LogicalVerdict::Unsatisfiable,
    })
}

/// Whether re-assessing `book` after adding the variables of `larger` (with
/// the same background constraint) yields the same verdict.
pub fn ambient_invariance_check(book: &Book, larger: &Universe) -> Result<bool, CoherenceError> {
    ambient_invariance_check_capped(book, larger, DEFAULT_WORLD_CAP)
}

pub fn ambient_invariance_check_capped(
    book: &Book,
    larger: &Universe,
    cap: usize,
) -> Result<bool, CoherenceError> {
    let (big, projection) = book.algebra.extend_capped(larger.clone(), cap)?;
    let big = Arc::new(big);
    let mut lifted = Book::new(big.clone());
    for a in &book.entries {
        lifted.push_labeled(
            a.event.lift(&big, &projection),
            a.probability.clone(),
            a.label.clone(),
        )?;
    }
    Ok(assess(book)?.is_consistent() == assess(&lifted)?.is_consistent())
}
