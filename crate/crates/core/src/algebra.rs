//! Finite boolean algebras represented by their atoms.
//!
//! An [`EventAlgebra`] keeps the worlds of a universe that satisfy an optional
//! background constraint. Events are subsets of those surviving worlds and
//! states are rational probability vectors over them.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use fixedbitset::FixedBitSet;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::formula::{enumerate_worlds_capped, Formula, FormulaError, Universe, World, DEFAULT_WORLD_CAP};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error("the constraint leaves no possible world")]
    EmptyAlgebra,
    #[error("objects belong to different algebras")]
    AlgebraMismatch,
    #[error("expected {expected} masses, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("state mass at world {0} is negative")]
    NegativeMass(usize),
    #[error("state masses sum to {0}, not 1")]
    NotNormalized(Rational),
    #[error("world index {0} out of range")]
    BadWorld(usize),
    #[error("universe `{0}` is not contained in the larger universe")]
    NotAnExtension(String),
}

static NEXT_ALGEBRA_ID: AtomicU64 = AtomicU64::new(1);

/// Identity token shared by an algebra and everything built from it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AlgebraId(u64);

impl AlgebraId {
    fn fresh() -> Self {
        AlgebraId(NEXT_ALGEBRA_ID.fetch_add(1, Ordering::Relaxed))
    }
}

#[derive(Debug, Clone)]
pub struct EventAlgebra {
    id: AlgebraId,
    universe: Universe,
    worlds: Vec<World>,
    constraint: Option<Formula>,
}

impl EventAlgebra {
    /// The algebra generated by `universe`, with the worlds violating
    /// `constraint` deleted.
    pub fn build(universe: Universe, constraint: Option<Formula>) -> Result<Self, AlgebraError> {
        Self::build_capped(universe, constraint, DEFAULT_WORLD_CAP)
    }

    pub fn build_capped(
        universe: Universe,
        constraint: Option<Formula>,
        cap: usize,
    ) -> Result<Self, AlgebraError> {
        let constraint = constraint.map(|c| c.reindex(&universe)).transpose()?;
        let mut worlds = enumerate_worlds_capped(&universe, cap)?;
        if let Some(c) = &constraint {
            worlds.retain(|w| c.evaluate(w));
        }
        if worlds.is_empty() {
            return Err(AlgebraError::EmptyAlgebra);
        }
        Ok(EventAlgebra {
            id: AlgebraId::fresh(),
            universe,
            worlds,
            constraint,
        })
    }

    /// The free algebra over `universe`.
    pub fn free(universe: Universe) -> Result<Self, AlgebraError> {
        Self::build(universe, None)
    }

    pub fn id(&self) -> AlgebraId {
        self.id
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn worlds(&self) -> &[World] {
        &self.worlds
    }

    pub fn len(&self) -> usize {
        self.worlds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.worlds.is_empty()
    }

    pub fn constraint(&self) -> Option<&Formula> {
        self.constraint.as_ref()
    }

    pub fn event_of(&self, f: &Formula) -> Result<Event, AlgebraError> {
        let f = f.reindex(&self.universe)?;
        let mut members = FixedBitSet::with_capacity(self.len());
        for (i, w) in self.worlds.iter().enumerate() {
            members.set(i, f.evaluate(w));
        }
        Ok(self.event(members))
    }

    pub fn event_from_indices(
        &self,
        indices: impl IntoIterator<Item = usize>,
    ) -> Result<Event, AlgebraError> {
        let mut members = FixedBitSet::with_capacity(self.len());
        for i in indices {
            if i >= self.len() {
                return Err(AlgebraError::BadWorld(i));
            }
            members.insert(i);
        }
        Ok(self.event(members))
    }

    pub fn bottom(&self) -> Event {
        self.event(FixedBitSet::with_capacity(self.len()))
    }

    pub fn top(&self) -> Event {
        let mut members = FixedBitSet::with_capacity(self.len());
        members.insert_range(..);
        self.event(members)
    }

    /// The atom holding exactly the world at `index`.
    pub fn atom(&self, index: usize) -> Result<Event, AlgebraError> {
        self.event_from_indices([index])
    }

    fn event(&self, members: FixedBitSet) -> Event {
        Event {
            algebra: self.id,
            members,
        }
    }

    pub fn state(&self, masses: Vec<Rational>) -> Result<StateVector, AlgebraError> {
        if masses.len() != self.len() {
            return Err(AlgebraError::WrongLength {
                expected: self.len(),
                got: masses.len(),
            });
        }
        if let Some(i) = masses.iter().position(Signed::is_negative) {
            return Err(AlgebraError::NegativeMass(i));
        }
        let total: Rational = masses.iter().sum();
        if !total.is_one() {
            return Err(AlgebraError::NotNormalized(total));
        }
        Ok(StateVector {
            algebra: self.id,
            masses,
        })
    }

    /// The {0,1}-valued state concentrated on one world.
    pub fn point_mass(&self, index: usize) -> Result<StateVector, AlgebraError> {
        if index >= self.len() {
            return Err(AlgebraError::BadWorld(index));
        }
        let masses = (0..self.len())
            .map(|i| if i == index { Rational::one() } else { Rational::zero() })
            .collect();
        self.state(masses)
    }

    pub fn uniform(&self) -> StateVector {
        let each = Rational::new(1.into(), self.len().into());
        StateVector {
            algebra: self.id,
            masses: vec![each; self.len()],
        }
    }

    /// The same constraint over a universe with additional variables, plus
    /// for each world of the new algebra the index of its restriction in
    /// this one.
    pub fn extend(&self, larger: Universe) -> Result<(EventAlgebra, Vec<usize>), AlgebraError> {
        self.extend_capped(larger, DEFAULT_WORLD_CAP)
    }

    pub fn extend_capped(
        &self,
        larger: Universe,
        cap: usize,
    ) -> Result<(EventAlgebra, Vec<usize>), AlgebraError> {
        let positions = self
            .universe
            .names()
            .iter()
            .map(|n| larger.index_of(n).ok_or_else(|| AlgebraError::NotAnExtension(n.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        let big = EventAlgebra::build_capped(larger, self.constraint.clone(), cap)?;
        let projection = big
            .worlds
            .iter()
            .map(|w| {
                let bits: Vec<bool> = positions.iter().map(|&p| w.get(p)).collect();
                let small = World::from_bits(&bits);
                self.index_of_world(&small)
                    .expect("constraint survivors project onto survivors")
            })
            .collect();
        Ok((big, projection))
    }

    pub fn index_of_world(&self, w: &World) -> Option<usize> {
        self.worlds.binary_search(w).ok()
    }
}

/// A set of surviving worlds of one algebra.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Event {
    algebra: AlgebraId,
    members: FixedBitSet,
}

impl Event {
    pub fn algebra_id(&self) -> AlgebraId {
        self.algebra
    }

    pub fn contains(&self, world_index: usize) -> bool {
        self.members.contains(world_index)
    }

    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.ones()
    }

    pub fn count(&self) -> usize {
        self.members.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_clear()
    }

    /// Number of worlds of the underlying algebra.
    pub fn universe_size(&self) -> usize {
        self.members.len()
    }

    fn check(&self, other: &Event) -> Result<(), AlgebraError> {
        if self.algebra == other.algebra {
            Ok(())
        } else {
            Err(AlgebraError::AlgebraMismatch)
        }
    }

    pub fn meet(&self, other: &Event) -> Result<Event, AlgebraError> {
        self.check(other)?;
        let mut members = self.members.clone();
        members.intersect_with(&other.members);
        Ok(Event { algebra: self.algebra, members })
    }

    pub fn join(&self, other: &Event) -> Result<Event, AlgebraError> {
        self.check(other)?;
        let mut members = self.members.clone();
        members.union_with(&other.members);
        Ok(Event { algebra: self.algebra, members })
    }

    pub fn complement(&self) -> Event {
        let mut members = self.members.clone();
        members.toggle_range(..);
        Event { algebra: self.algebra, members }
    }

    /// `self <= other` in the algebra order.
    pub fn is_below(&self, other: &Event) -> Result<bool, AlgebraError> {
        self.check(other)?;
        Ok(self.members.is_subset(&other.members))
    }

    /// Re-interpret in a larger algebra through a world projection from
    /// [`EventAlgebra::extend`].
    pub fn lift(&self, big: &EventAlgebra, projection: &[usize]) -> Event {
        debug_assert_eq!(projection.len(), big.len());
        let mut members = FixedBitSet::with_capacity(big.len());
        for (i, &p) in projection.iter().enumerate() {
            members.set(i, self.members.contains(p));
        }
        Event { algebra: big.id, members }
    }
}

pub fn meet_all<'a>(events: impl IntoIterator<Item = &'a Event>) -> Result<Option<Event>, AlgebraError> {
    let mut iter = events.into_iter();
    let Some(first) = iter.next() else {
        return Ok(None);
    };
    iter.try_fold(first.clone(), |acc, e| acc.meet(e)).map(Some)
}

pub fn join_all<'a>(events: impl IntoIterator<Item = &'a Event>) -> Result<Option<Event>, AlgebraError> {
    let mut iter = events.into_iter();
    let Some(first) = iter.next() else {
        return Ok(None);
    };
    iter.try_fold(first.clone(), |acc, e| acc.join(e)).map(Some)
}

/// A state: nonnegative rational masses on the worlds, summing to one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateVector {
    algebra: AlgebraId,
    masses: Vec<Rational>,
}

impl StateVector {
    pub fn algebra_id(&self) -> AlgebraId {
        self.algebra
    }

    pub fn masses(&self) -> &[Rational] {
        &self.masses
    }

    /// Value of the state on `e`: the scalar product of masses and the
    /// membership indicator.
    pub fn value(&self, e: &Event) -> Result<Rational, AlgebraError> {
        if self.algebra != e.algebra {
            return Err(AlgebraError::AlgebraMismatch);
        }
        Ok(e.members().map(|i| &self.masses[i]).sum())
    }
}

impl fmt::Display for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.masses.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Scalar-product evaluation of a state on an event.
pub fn state_value(s: &StateVector, e: &Event) -> Result<Rational, AlgebraError> {
    s.value(e)
}
