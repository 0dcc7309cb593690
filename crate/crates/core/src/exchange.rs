//! Product states and exchangeable states on free algebras.
//!
//! An exchangeable state on `F_n` gives every miniterm with `k` positive
//! literals the same value `q_k`, so it is stored as the class vector
//! `(q_0, ..., q_n)`. The extremal exchangeable states `ξ_{N,K}` spread unit
//! mass uniformly over the `C(N,K)` miniterms with `K` positive literals;
//! every exchangeable state on `F_N` is the mixture `Σ λ_K ξ_{N,K}` with
//! `λ_K = C(N,K) q_K`.

use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::algebra::{EventAlgebra, StateVector};
use crate::rational::{binomial_row, from_biguint, int, Rational};

/// Default cap on the number of variables of an exchangeable state.
pub const DEFAULT_MAX_N: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExchangeError {
    #[error("probability {0} is outside [0, 1]")]
    ProbabilityOutOfRange(Rational),
    #[error("K = {k} is outside 0..={n}")]
    IndexOutOfRange { k: usize, n: usize },
    #[error("N = {n} exceeds the cap of {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("need at least one variable")]
    NoVariables,
    #[error("cannot restrict a state on F_{from} to F_{to}")]
    BadRestriction { from: usize, to: usize },
    #[error("class value q_{0} is negative")]
    Negative(usize),
    #[error("class values have total mass {0}, not 1")]
    NotNormalized(Rational),
    #[error("expected {expected} values, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("masses are not constant on a class of miniterms")]
    NotExchangeable,
}

fn check_probability(p: &Rational) -> Result<(), ExchangeError> {
    if p.is_negative() || *p > Rational::one() {
        Err(ExchangeError::ProbabilityOutOfRange(p.clone()))
    } else {
        Ok(())
    }
}

fn check_size(n: usize, cap: usize) -> Result<(), ExchangeError> {
    if n == 0 {
        Err(ExchangeError::NoVariables)
    } else if n > cap {
        Err(ExchangeError::CapExceeded { n, cap })
    } else {
        Ok(())
    }
}

/// `p^pos (1-p)^neg`, with `0^0 = 1`.
pub fn product_state_value(p: &Rational, pos: usize, neg: usize) -> Result<Rational, ExchangeError> {
    check_probability(p)?;
    Ok(num_traits::pow(p.clone(), pos) * num_traits::pow(Rational::one() - p, neg))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExchangeableState {
    values: Vec<Rational>,
}

impl ExchangeableState {
    /// Build from class values `q_0..=q_n`, checking nonnegativity and
    /// `Σ C(n,k) q_k = 1`.
    pub fn new(values: Vec<Rational>) -> Result<Self, ExchangeError> {
        if values.len() < 2 {
            return Err(ExchangeError::NoVariables);
        }
        if let Some(k) = values.iter().position(Signed::is_negative) {
            return Err(ExchangeError::Negative(k));
        }
        let n = values.len() - 1;
        let total: Rational = binomial_row(n as u64)
            .iter()
            .zip(&values)
            .map(|(c, q)| from_biguint(c) * q)
            .sum();
        if !total.is_one() {
            return Err(ExchangeError::NotNormalized(total));
        }
        Ok(ExchangeableState { values })
    }

    /// Number of variables `n` of the underlying free algebra.
    pub fn n(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    /// Value on any miniterm with `pos` positive literals.
    pub fn value(&self, pos: usize) -> &Rational {
        &self.values[pos]
    }

    /// The product state `π_p` on `F_n`.
    pub fn product(p: &Rational, n: usize) -> Result<Self, ExchangeError> {
        Self::product_capped(p, n, DEFAULT_MAX_N)
    }

    pub fn product_capped(p: &Rational, n: usize, cap: usize) -> Result<Self, ExchangeError> {
        check_size(n, cap)?;
        let values = (0..=n)
            .map(|k| product_state_value(p, k, n - k))
            .collect::<Result<_, _>>()?;
        Ok(ExchangeableState { values })
    }

    /// Expand to a state vector on the free algebra over `n` variables.
    pub fn to_state_vector(&self, algebra: &EventAlgebra) -> Option<StateVector> {
        if algebra.universe().len() != self.n() || algebra.len() != 1 << self.n() {
            return None;
        }
        let masses = algebra.worlds().iter().map(|w| self.values[w.ones()].clone()).collect();
        algebra.state(masses).ok()
    }

    /// Recover the class vector of a state on a free algebra, if its masses
    /// depend only on the number of true variables.
    pub fn from_state_vector(
        algebra: &EventAlgebra,
        state: &StateVector,
    ) -> Result<Self, ExchangeError> {
        let n = algebra.universe().len();
        if algebra.len() != 1 << n {
            return Err(ExchangeError::NotExchangeable);
        }
        let mut values: Vec<Option<Rational>> = vec![None; n + 1];
        for (w, m) in algebra.worlds().iter().zip(state.masses()) {
            match &values[w.ones()] {
                None => values[w.ones()] = Some(m.clone()),
                Some(v) if v == m => {}
                Some(_) => return Err(ExchangeError::NotExchangeable),
            }
        }
        Self::new(values.into_iter().map(|v| v.expect("every class is inhabited")).collect())
    }
}

impl fmt::Display for ExchangeableState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.values.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// The extremal exchangeable state `ξ_{N,K}`.
pub fn xi_state(big_n: usize, k: usize) -> Result<ExchangeableState, ExchangeError> {
    xi_state_capped(big_n, k, DEFAULT_MAX_N)
}

pub fn xi_state_capped(big_n: usize, k: usize, cap: usize) -> Result<ExchangeableState, ExchangeError> {
    check_size(big_n, cap)?;
    if k > big_n {
        return Err(ExchangeError::IndexOutOfRange { k, n: big_n });
    }
    let row = binomial_row(big_n as u64);
    let mut values = vec![Rational::zero(); big_n + 1];
    values[k] = from_biguint(&row[k]).recip();
    Ok(ExchangeableState { values })
}

/// Convex weights `λ_0..=λ_N` on the extremal states of `F_N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixtureWeights {
    weights: Vec<Rational>,
}

impl MixtureWeights {
    pub fn new(weights: Vec<Rational>) -> Result<Self, ExchangeError> {
        if weights.len() < 2 {
            return Err(ExchangeError::NoVariables);
        }
        if let Some(k) = weights.iter().position(Signed::is_negative) {
            return Err(ExchangeError::Negative(k));
        }
        let total: Rational = weights.iter().sum();
        if !total.is_one() {
            return Err(ExchangeError::NotNormalized(total));
        }
        Ok(MixtureWeights { weights })
    }

    pub fn big_n(&self) -> usize {
        self.weights.len() - 1
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    /// `Σ λ_K ξ_{N,K}` as a class vector on `F_N`.
    pub fn reconstruct(&self) -> ExchangeableState {
        let row = binomial_row(self.big_n() as u64);
        let values = self
            .weights
            .iter()
            .zip(&row)
            .map(|(l, c)| l / from_biguint(c))
            .collect();
        ExchangeableState { values }
    }

    /// The product mixture `Σ λ_K π_{K/N}`.
    pub fn product_mixture(&self) -> ProductMixture {
        ProductMixture {
            weights: self.clone(),
        }
    }
}

/// Express an exchangeable state on `F_N` as a mixture of `ξ_{N,K}`.
pub fn decompose(state: &ExchangeableState) -> MixtureWeights {
    let row = binomial_row(state.n() as u64);
    let weights = row
        .iter()
        .zip(state.values())
        .map(|(c, q)| from_biguint(c) * q)
        .collect();
    MixtureWeights { weights }
}

/// Restrict an exchangeable state on `F_N` to the subalgebra `F_n` generated
/// by its first `n` variables.
///
/// For an `F_n` miniterm with `k` positive literals, the `F_N` miniterms
/// below it with `K` positive literals number `C(N-n, K-k)`, each carrying
/// `λ_K / C(N,K)`.
pub fn restrict(state: &ExchangeableState, n: usize) -> Result<ExchangeableState, ExchangeError> {
    let big_n = state.n();
    if n == 0 || n > big_n {
        return Err(ExchangeError::BadRestriction { from: big_n, to: n });
    }
    let lambda = decompose(state);
    let full = binomial_row(big_n as u64);
    let extra = binomial_row((big_n - n) as u64);
    let values = (0..=n)
        .map(|k| {
            (k..=big_n - n + k)
                .filter(|&big_k| !lambda.weights[big_k].is_zero())
                .map(|big_k| {
                    &lambda.weights[big_k] * from_biguint(&extra[big_k - k]) / from_biguint(&full[big_k])
                })
                .sum()
        })
        .collect();
    Ok(ExchangeableState { values })
}

/// The product mixture `t ↦ Σ_K λ_K (K/N)^pos(t) (1-K/N)^neg(t)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductMixture {
    weights: MixtureWeights,
}

impl ProductMixture {
    pub fn weights(&self) -> &MixtureWeights {
        &self.weights
    }

    /// Value on a miniterm with `pos` positive and `neg` negated literals.
    pub fn value(&self, pos: usize, neg: usize) -> Rational {
        let big_n = self.weights.big_n();
        let denom = int(big_n as i64);
        self.weights
            .weights
            .iter()
            .enumerate()
            .filter(|(_, l)| !l.is_zero())
            .map(|(big_k, l)| {
                let p = int(big_k as i64) / &denom;
                l * product_state_value(&p, pos, neg).expect("K/N lies in [0, 1]")
            })
            .sum()
    }

    /// The mixture as an exchangeable state on `F_n`.
    pub fn on(&self, n: usize) -> Result<ExchangeableState, ExchangeError> {
        if n == 0 {
            return Err(ExchangeError::NoVariables);
        }
        ExchangeableState::new((0..=n).map(|k| self.value(k, n - k)).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Approximation {
    pub weights: MixtureWeights,
    pub mixture: ProductMixture,
    /// Class values of the state restricted to `F_n`.
    pub restricted: ExchangeableState,
    /// Class values of the product mixture on `F_n`.
    pub approximant: ExchangeableState,
    /// Largest per-miniterm discrepancy over the `n + 1` classes.
    pub sup_error: Rational,
}

/// Compare the restriction of `state` to `F_n` with the product mixture
/// built from its extremal weights.
pub fn mixture_approximation(
    state: &ExchangeableState,
    n: usize,
) -> Result<Approximation, ExchangeError> {
    let restricted = restrict(state, n)?;
    let weights = decompose(state);
    let mixture = weights.product_mixture();
    let approximant = mixture.on(n)?;
    let sup_error = restricted
        .values()
        .iter()
        .zip(approximant.values())
        .map(|(a, b)| (a - b).abs())
        .max()
        .expect("at least two classes");
    Ok(Approximation {
        weights,
        mixture,
        restricted,
        approximant,
        sup_error,
    })
}
