//! Exact rational linear programming with checkable certificates.
//!
//! [`solve`] runs a dense two-phase simplex over big rationals with Bland's
//! least-index rule. Every outcome carries a certificate that [`verify`]
//! re-checks using nothing but exact arithmetic on the original program:
//!
//! * `Optimal` carries the point and dual multipliers whose dual objective
//!   equals the primal one;
//! * `Infeasible` carries Farkas multipliers combining the rows into `0 >= c`
//!   with `c > 0`;
//! * `Unbounded` carries a feasible point and an improving recession ray.
//!
//! Multipliers are reported in the "`>=` orientation": a `<=` row
//! `a·x <= b` is read as `-a·x >= -b`, and the multiplier of any inequality
//! row is nonnegative. Equality rows take free multipliers.

use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::Rational;

/// Default cap on simplex pivots per solve.
pub const DEFAULT_MAX_PIVOTS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("malformed linear program: {0}")]
    Malformed(String),
    #[error("pivot limit of {0} exceeded")]
    PivotLimit(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl Relation {
    /// Orientation sign turning the row into a `>=` row.
    fn sign(self) -> i8 {
        match self {
            Relation::Le => -1,
            Relation::Eq | Relation::Ge => 1,
        }
    }

    fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Relation::Le => lhs <= rhs,
            Relation::Eq => lhs == rhs,
            Relation::Ge => lhs >= rhs,
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Minimize,
    Maximize,
    Feasibility,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Bounds {
    pub lower: Option<Rational>,
    pub upper: Option<Rational>,
}

impl Bounds {
    pub fn free() -> Self {
        Bounds::default()
    }

    pub fn nonnegative() -> Self {
        Bounds {
            lower: Some(Rational::zero()),
            upper: None,
        }
    }

    fn contains(&self, x: &Rational) -> bool {
        self.lower.as_ref().is_none_or(|l| x >= l) && self.upper.as_ref().is_none_or(|u| x <= u)
    }
}

/// A linear program over `num_vars` rational variables. Variables are free
/// unless bounded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub direction: Direction,
    pub objective: Vec<Rational>,
    pub constraints: Vec<Constraint>,
    pub bounds: Vec<Bounds>,
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            num_vars,
            direction: Direction::Feasibility,
            objective: vec![Rational::zero(); num_vars],
            constraints: Vec::new(),
            bounds: vec![Bounds::free(); num_vars],
        }
    }

    pub fn minimize(mut self, objective: Vec<Rational>) -> Self {
        self.direction = Direction::Minimize;
        self.objective = objective;
        self
    }

    pub fn maximize(mut self, objective: Vec<Rational>) -> Self {
        self.direction = Direction::Maximize;
        self.objective = objective;
        self
    }

    pub fn constrain(mut self, coeffs: Vec<Rational>, relation: Relation, rhs: Rational) -> Self {
        self.constraints.push(Constraint { coeffs, relation, rhs });
        self
    }

    pub fn bound(mut self, var: usize, lower: Option<Rational>, upper: Option<Rational>) -> Self {
        self.bounds[var] = Bounds { lower, upper };
        self
    }

    pub fn all_nonnegative(mut self) -> Self {
        self.bounds = vec![Bounds::nonnegative(); self.num_vars];
        self
    }

    fn validate(&self) -> Result<(), LpError> {
        let n = self.num_vars;
        if self.objective.len() != n {
            return Err(LpError::Malformed(format!(
                "objective has {} coefficients for {n} variables",
                self.objective.len()
            )));
        }
        if self.bounds.len() != n {
            return Err(LpError::Malformed(format!(
                "{} bounds for {n} variables",
                self.bounds.len()
            )));
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != n {
                return Err(LpError::Malformed(format!(
                    "constraint {i} has {} coefficients for {n} variables",
                    c.coeffs.len()
                )));
            }
        }
        for (k, b) in self.bounds.iter().enumerate() {
            if let (Some(l), Some(u)) = (&b.lower, &b.upper) {
                if l > u {
                    return Err(LpError::Malformed(format!(
                        "variable {k} has lower bound {l} above upper bound {u}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Whether `x` satisfies every row and bound exactly.
    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        x.len() == self.num_vars
            && self.constraints.iter().all(|c| c.relation.holds(&dot(&c.coeffs, x), &c.rhs))
            && self.bounds.iter().zip(x).all(|(b, v)| b.contains(v))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal {
        point: Vec<Rational>,
        value: Rational,
        /// Dual multipliers, one per constraint, in the `>=` orientation.
        duals: Vec<Rational>,
    },
    Feasible {
        point: Vec<Rational>,
    },
    Infeasible {
        /// Farkas multipliers, one per constraint, in the `>=` orientation.
        farkas: Vec<Rational>,
    },
    Unbounded {
        point: Vec<Rational>,
        ray: Vec<Rational>,
    },
}

impl LpOutcome {
    pub fn point(&self) -> Option<&[Rational]> {
        match self {
            LpOutcome::Optimal { point, .. }
            | LpOutcome::Feasible { point }
            | LpOutcome::Unbounded { point, .. } => Some(point),
            LpOutcome::Infeasible { .. } => None,
        }
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(self, LpOutcome::Infeasible { .. })
    }
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .filter(|(x, _)| !x.is_zero())
        .map(|(x, y)| x * y)
        .sum()
}

#[derive(Debug, Clone)]
enum VarMap {
    /// x = offset + z
    Shift { col: usize, offset: Rational },
    /// x = offset - z
    Mirror { col: usize, offset: Rational },
    /// x = z⁺ - z⁻
    Split { pos: usize, neg: usize },
}

impl VarMap {
    fn value(&self, z: &[Rational]) -> Rational {
        match self {
            VarMap::Shift { col, offset } => offset + &z[*col],
            VarMap::Mirror { col, offset } => offset - &z[*col],
            VarMap::Split { pos, neg } => &z[*pos] - &z[*neg],
        }
    }

    fn direction(&self, dz: &[Rational]) -> Rational {
        match self {
            VarMap::Shift { col, .. } => dz[*col].clone(),
            VarMap::Mirror { col, .. } => -dz[*col].clone(),
            VarMap::Split { pos, neg } => &dz[*pos] - &dz[*neg],
        }
    }
}

/// Dense simplex tableau over `Ãz = b̃, z >= 0` with `b̃ >= 0`.
///
/// Columns are laid out as structural, slack, then one artificial per row;
/// the last entry of every row is the right-hand side.
struct Tableau {
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    /// Reduced costs; the final entry is minus the objective value.
    reduced: Vec<Rational>,
    cost: Vec<Rational>,
    first_artificial: usize,
    pivots: usize,
    max_pivots: usize,
}

enum PhaseEnd {
    Optimal,
    Unbounded(usize),
}

impl Tableau {
    fn width(&self) -> usize {
        self.reduced.len() - 1
    }

    fn rhs(&self, r: usize) -> &Rational {
        &self.rows[r][self.width()]
    }

    fn set_cost(&mut self, cost: Vec<Rational>) {
        let width = self.width();
        let mut reduced: Vec<Rational> = cost.iter().cloned().chain([Rational::zero()]).collect();
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = &cost[b];
            if cb.is_zero() {
                continue;
            }
            for j in 0..=width {
                let entry = &self.rows[r][j];
                if !entry.is_zero() {
                    reduced[j] -= cb * entry;
                }
            }
        }
        self.reduced = reduced;
        self.cost = cost;
    }

    fn pivot(&mut self, r: usize, c: usize) -> Result<(), LpError> {
        self.pivots += 1;
        if self.pivots > self.max_pivots {
            return Err(LpError::PivotLimit(self.max_pivots));
        }
        let inv = self.rows[r][c].recip();
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        let pivot_row = std::mem::take(&mut self.rows[r]);
        let eliminate = |row: &mut Vec<Rational>| {
            let factor = row[c].clone();
            if factor.is_zero() {
                return;
            }
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &factor * p;
                }
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(&mut self.reduced);
        self.rows[r] = pivot_row;
        self.basis[r] = c;
        Ok(())
    }

    /// Bland's rule: least-index entering column among non-artificial
    /// columns, ratio-test ties broken by least basic index.
    fn run(&mut self) -> Result<PhaseEnd, LpError> {
        loop {
            let Some(enter) = (0..self.first_artificial).find(|&j| self.reduced[j].is_negative()) else {
                return Ok(PhaseEnd::Optimal);
            };
            let mut leave: Option<(usize, Rational)> = None;
            for r in 0..self.rows.len() {
                let a = &self.rows[r][enter];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(r) / a;
                let better = match &leave {
                    None => true,
                    Some((best_r, best)) => {
                        ratio < *best || (ratio == *best && self.basis[r] < self.basis[*best_r])
                    }
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, enter)?,
                None => return Ok(PhaseEnd::Unbounded(enter)),
            }
        }
    }

    /// Row multipliers `c_B B⁻¹`, read off the artificial columns.
    fn duals(&self) -> Vec<Rational> {
        (0..self.rows.len())
            .map(|i| {
                let col = self.first_artificial + i;
                &self.cost[col] - &self.reduced[col]
            })
            .collect()
    }

    fn basic_solution(&self) -> Vec<Rational> {
        let mut z = vec![Rational::zero(); self.width()];
        for (r, &b) in self.basis.iter().enumerate() {
            z[b] = self.rhs(r).clone();
        }
        z
    }
}

/// Solver configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Solver {
    pub max_pivots: usize,
}

impl Default for Solver {
    fn default() -> Self {
        Solver {
            max_pivots: DEFAULT_MAX_PIVOTS,
        }
    }
}

impl Solver {
    pub fn solve(&self, lp: &LinearProgram) -> Result<LpOutcome, LpError> {
        lp.validate()?;

        // Substitute bounded variables so every structural column is >= 0.
        let mut maps = Vec::with_capacity(lp.num_vars);
        let mut num_struct = 0;
        let mut bound_rows = Vec::new();
        for b in &lp.bounds {
            let map = match (&b.lower, &b.upper) {
                (Some(l), upper) => {
                    if let Some(u) = upper {
                        bound_rows.push((num_struct, u - l));
                    }
                    VarMap::Shift { col: num_struct, offset: l.clone() }
                }
                (None, Some(u)) => VarMap::Mirror { col: num_struct, offset: u.clone() },
                (None, None) => {
                    num_struct += 1;
                    VarMap::Split { pos: num_struct - 1, neg: num_struct }
                }
            };
            num_struct += 1;
            maps.push(map);
        }

        // Rows over structural columns: (coeffs, relation, rhs).
        let mut raw: Vec<(Vec<Rational>, Relation, Rational)> = Vec::new();
        for c in &lp.constraints {
            let mut coeffs = vec![Rational::zero(); num_struct];
            let mut rhs = c.rhs.clone();
            for (a, map) in c.coeffs.iter().zip(&maps) {
                if a.is_zero() {
                    continue;
                }
                match map {
                    VarMap::Shift { col, offset } => {
                        coeffs[*col] += a;
                        rhs -= a * offset;
                    }
                    VarMap::Mirror { col, offset } => {
                        coeffs[*col] -= a;
                        rhs -= a * offset;
                    }
                    VarMap::Split { pos, neg } => {
                        coeffs[*pos] += a;
                        coeffs[*neg] -= a;
                    }
                }
            }
            raw.push((coeffs, c.relation, rhs));
        }
        for (col, width) in bound_rows {
            let mut coeffs = vec![Rational::zero(); num_struct];
            coeffs[col] = Rational::one();
            raw.push((coeffs, Relation::Le, width));
        }

        let num_rows = raw.len();
        let num_slack = raw.iter().filter(|(_, rel, _)| *rel != Relation::Eq).count();
        let first_artificial = num_struct + num_slack;
        let width = first_artificial + num_rows;

        let mut rows = Vec::with_capacity(num_rows);
        let mut flips = Vec::with_capacity(num_rows);
        let mut slack = num_struct;
        for (i, (coeffs, rel, rhs)) in raw.into_iter().enumerate() {
            let mut row = coeffs;
            row.resize(width + 1, Rational::zero());
            match rel {
                Relation::Le => {
                    row[slack] = Rational::one();
                    slack += 1;
                }
                Relation::Ge => {
                    row[slack] = -Rational::one();
                    slack += 1;
                }
                Relation::Eq => {}
            }
            row[width] = rhs;
            let flip = row[width].is_negative();
            if flip {
                for v in row.iter_mut() {
                    *v = -std::mem::take(v);
                }
            }
            row[first_artificial + i] = Rational::one();
            rows.push(row);
            flips.push(flip);
        }

        let mut tab = Tableau {
            rows,
            basis: (first_artificial..width).collect(),
            reduced: vec![Rational::zero(); width + 1],
            cost: Vec::new(),
            first_artificial,
            pivots: 0,
            max_pivots: self.max_pivots,
        };

        // Map standard-form row multipliers back onto the original rows.
        let to_original = |y: Vec<Rational>| -> Vec<Rational> {
            lp.constraints
                .iter()
                .zip(y.into_iter().zip(&flips))
                .map(|(c, (yi, &flip))| {
                    let w = if flip { -yi } else { yi };
                    if c.relation.sign() < 0 {
                        -w
                    } else {
                        w
                    }
                })
                .collect()
        };

        // Phase one: minimize the sum of artificials.
        let phase_one: Vec<Rational> = (0..width)
            .map(|j| if j >= first_artificial { Rational::one() } else { Rational::zero() })
            .collect();
        tab.set_cost(phase_one);
        if let PhaseEnd::Unbounded(_) = tab.run()? {
            unreachable!("phase one is bounded below by zero");
        }
        if tab.reduced[width].is_negative() {
            return Ok(LpOutcome::Infeasible {
                farkas: to_original(tab.duals()),
            });
        }

        // Drive zero-level artificials out of the basis where possible. Rows
        // where no structural or slack entry is nonzero are redundant and
        // keep their artificial at zero for good.
        for r in 0..num_rows {
            if tab.basis[r] >= first_artificial {
                if let Some(c) = (0..first_artificial).find(|&j| !tab.rows[r][j].is_zero()) {
                    tab.pivot(r, c)?;
                }
            }
        }

        let point_of = |z: &[Rational]| -> Vec<Rational> { maps.iter().map(|m| m.value(z)).collect() };

        if lp.direction == Direction::Feasibility {
            return Ok(LpOutcome::Feasible {
                point: point_of(&tab.basic_solution()),
            });
        }

        let negate = lp.direction == Direction::Maximize;
        let mut cost = vec![Rational::zero(); width];
        for (c, map) in lp.objective.iter().zip(&maps) {
            let c = if negate { -c.clone() } else { c.clone() };
            match map {
                VarMap::Shift { col, .. } => cost[*col] = c,
                VarMap::Mirror { col, .. } => cost[*col] = -c,
                VarMap::Split { pos, neg } => {
                    cost[*neg] = -c.clone();
                    cost[*pos] = c;
                }
            }
        }
        tab.set_cost(cost);
        match tab.run()? {
            PhaseEnd::Optimal => {
                let point = point_of(&tab.basic_solution());
                let value = dot(&lp.objective, &point);
                Ok(LpOutcome::Optimal {
                    point,
                    value,
                    duals: to_original(tab.duals()),
                })
            }
            PhaseEnd::Unbounded(enter) => {
                let mut dz = vec![Rational::zero(); width];
                dz[enter] = Rational::one();
                for (r, &b) in tab.basis.iter().enumerate() {
                    dz[b] = -tab.rows[r][enter].clone();
                }
                Ok(LpOutcome::Unbounded {
                    point: point_of(&tab.basic_solution()),
                    ray: maps.iter().map(|m| m.direction(&dz)).collect(),
                })
            }
        }
    }
}

/// Solve with the default pivot cap.
pub fn solve(lp: &LinearProgram) -> Result<LpOutcome, LpError> {
    Solver::default().solve(lp)
}

/// Reduced costs `c - Σ yᵢ σᵢ aᵢ` for `>=`-oriented multipliers `y`, or
/// `None` when a multiplier has the wrong sign or length.
fn residual(lp: &LinearProgram, c: &[Rational], y: &[Rational]) -> Option<Vec<Rational>> {
    if y.len() != lp.constraints.len() {
        return None;
    }
    let mut r = c.to_vec();
    for (row, yi) in lp.constraints.iter().zip(y) {
        if row.relation != Relation::Eq && yi.is_negative() {
            return None;
        }
        if yi.is_zero() {
            continue;
        }
        let signed = if row.relation.sign() < 0 { -yi.clone() } else { yi.clone() };
        for (rk, a) in r.iter_mut().zip(&row.coeffs) {
            *rk -= &signed * a;
        }
    }
    Some(r)
}

/// `Σ yᵢ σᵢ bᵢ` plus the bound terms for reduced costs `r`, or `None` if a
/// nonzero reduced cost has no bound to pay for it.
fn certified_bound(lp: &LinearProgram, y: &[Rational], r: &[Rational]) -> Option<Rational> {
    let mut total: Rational = lp
        .constraints
        .iter()
        .zip(y)
        .map(|(row, yi)| {
            let v = yi * &row.rhs;
            if row.relation.sign() < 0 {
                -v
            } else {
                v
            }
        })
        .sum();
    for (rk, b) in r.iter().zip(&lp.bounds) {
        if rk.is_positive() {
            total += rk * b.lower.as_ref()?;
        } else if rk.is_negative() {
            total += rk * b.upper.as_ref()?;
        }
    }
    Some(total)
}

/// Re-check an outcome's certificate against `lp` with exact arithmetic.
pub fn verify(lp: &LinearProgram, outcome: &LpOutcome) -> bool {
    if lp.validate().is_err() {
        return false;
    }
    match outcome {
        LpOutcome::Feasible { point } => lp.direction == Direction::Feasibility && lp.is_feasible(point),
        LpOutcome::Optimal { point, value, duals } => {
            if lp.direction == Direction::Feasibility || !lp.is_feasible(point) {
                return false;
            }
            if dot(&lp.objective, point) != *value {
                return false;
            }
            // Certify min c'x with c' = c (minimize) or -c (maximize).
            let (c, primal) = match lp.direction {
                Direction::Maximize => (lp.objective.iter().map(|v| -v.clone()).collect::<Vec<_>>(), -value.clone()),
                _ => (lp.objective.clone(), value.clone()),
            };
            let Some(r) = residual(lp, &c, duals) else {
                return false;
            };
            certified_bound(lp, duals, &r).is_some_and(|dual| dual == primal)
        }
        LpOutcome::Infeasible { farkas } => {
            let zero = vec![Rational::zero(); lp.num_vars];
            let Some(r) = residual(lp, &zero, farkas) else {
                return false;
            };
            certified_bound(lp, farkas, &r).is_some_and(|c| c.is_positive())
        }
        LpOutcome::Unbounded { point, ray } => {
            if ray.len() != lp.num_vars || !lp.is_feasible(point) {
                return false;
            }
            let rows_ok = lp.constraints.iter().all(|c| {
                let ad = dot(&c.coeffs, ray);
                c.relation.holds(&ad, &Rational::zero())
            });
            let bounds_ok = lp.bounds.iter().zip(ray).all(|(b, d)| {
                (b.lower.is_none() || !d.is_negative()) && (b.upper.is_none() || !d.is_positive())
            });
            let gain = dot(&lp.objective, ray);
            let improves = match lp.direction {
                Direction::Maximize => gain.is_positive(),
                Direction::Minimize => gain.is_negative(),
                Direction::Feasibility => false,
            };
            rows_ok && bounds_ok && improves
        }
    }
}

/// The two mutually exclusive alternatives of Gordan's theorem for a matrix
/// `M` with `n` rows and `m` columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GordanWitness {
    /// `s` with every coordinate of `Ms` at most `-1`, and some coordinate
    /// equal to `-1`.
    Negative(Vec<Rational>),
    /// Nonnegative `u` summing to one with `uᵀM = 0`.
    Balanced(Vec<Rational>),
}

pub fn mat_vec(m: &[Vec<Rational>], s: &[Rational]) -> Vec<Rational> {
    m.iter().map(|row| dot(row, s)).collect()
}

pub fn vec_mat(u: &[Rational], m: &[Vec<Rational>], cols: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); cols];
    for (ui, row) in u.iter().zip(m) {
        if ui.is_zero() {
            continue;
        }
        for (o, v) in out.iter_mut().zip(row) {
            *o += ui * v;
        }
    }
    out
}

/// Scale `s` so the largest coordinate of `Ms` is exactly `-1`.
pub fn normalize_stakes(m: &[Vec<Rational>], s: &[Rational]) -> Option<Vec<Rational>> {
    let balances = mat_vec(m, s);
    let worst = balances.iter().max()?;
    if !worst.is_negative() {
        return None;
    }
    let scale = -worst.recip();
    Some(s.iter().map(|v| v * &scale).collect())
}

/// Decide which arm of Gordan's alternative holds for `m` (`n × cols`).
pub fn gordan(m: &[Vec<Rational>], cols: usize) -> Result<GordanWitness, LpError> {
    gordan_with(&Solver::default(), m, cols)
}

pub fn gordan_with(solver: &Solver, m: &[Vec<Rational>], cols: usize) -> Result<GordanWitness, LpError> {
    if m.is_empty() || cols == 0 || m.iter().any(|row| row.len() != cols) {
        return Err(LpError::Malformed("gordan needs a nonempty rectangular matrix".into()));
    }
    let lp = m.iter().fold(LinearProgram::new(cols), |lp, row| {
        lp.constrain(row.clone(), Relation::Le, -Rational::one())
    });
    match solver.solve(&lp)? {
        LpOutcome::Feasible { point } => {
            let s = normalize_stakes(m, &point).expect("feasible stakes have negative balances");
            Ok(GordanWitness::Negative(s))
        }
        LpOutcome::Infeasible { farkas } => {
            let total: Rational = farkas.iter().sum();
            Ok(GordanWitness::Balanced(farkas.iter().map(|v| v / &total).collect()))
        }
        other => unreachable!("feasibility program returned {other:?}"),
    }
}

/// Exact re-check of a Gordan witness.
pub fn verify_gordan(m: &[Vec<Rational>], cols: usize, witness: &GordanWitness) -> bool {
    match witness {
        GordanWitness::Negative(s) => {
            let balances = mat_vec(m, s);
            s.len() == cols
                && balances.iter().all(|b| *b <= -Rational::one())
                && balances.iter().any(|b| *b == -Rational::one())
        }
        GordanWitness::Balanced(u) => {
            u.len() == m.len()
                && u.iter().all(|v| !v.is_negative())
                && u.iter().sum::<Rational>().is_one()
                && vec_mat(u, m, cols).iter().all(Zero::is_zero)
        }
    }
}
