//! Exact feasibility of mixed strict/non-strict rational linear systems.
//!
//! Equalities are eliminated by substitution first. The remaining inequalities go to
//! Fourier–Motzkin elimination in low dimension and to a two-phase simplex with Bland's
//! rule otherwise. Both return an exact witness.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub const FM_MAX_DIMENSION: usize = 4;

/// Above this many constraints in one elimination stage FM hands over to the simplex.
const FM_CONSTRAINT_CAP: usize = 4000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    /// `a·x = b`
    Eq,
    /// `a·x ≥ b`
    Ge,
    /// `a·x > b`
    Gt,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Constraint {
    pub coeffs: Vec<BigRational>,
    pub relation: Relation,
    pub rhs: BigRational,
}

impl Constraint {
    pub fn satisfied_by(&self, x: &[BigRational]) -> bool {
        let lhs = dot(&self.coeffs, x);
        match self.relation {
            Relation::Eq => lhs == self.rhs,
            Relation::Ge => lhs >= self.rhs,
            Relation::Gt => lhs > self.rhs,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinearSystem {
    dimension: usize,
    constraints: Vec<Constraint>,
}

impl LinearSystem {
    pub fn new(dimension: usize) -> Self {
        Self {
            dimension,
            constraints: Vec::new(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn push(&mut self, coeffs: Vec<BigRational>, relation: Relation, rhs: BigRational) {
        assert_eq!(
            coeffs.len(),
            self.dimension,
            "constraint length must equal system dimension"
        );
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
    }

    pub fn equals(&mut self, coeffs: Vec<BigRational>, rhs: BigRational) -> &mut Self {
        self.push(coeffs, Relation::Eq, rhs);
        self
    }

    pub fn ge(&mut self, coeffs: Vec<BigRational>, rhs: BigRational) -> &mut Self {
        self.push(coeffs, Relation::Ge, rhs);
        self
    }

    pub fn gt(&mut self, coeffs: Vec<BigRational>, rhs: BigRational) -> &mut Self {
        self.push(coeffs, Relation::Gt, rhs);
        self
    }

    /// `a·x ≤ b`
    pub fn le(&mut self, coeffs: Vec<BigRational>, rhs: BigRational) -> &mut Self {
        self.push(coeffs.into_iter().map(|c| -c).collect(), Relation::Ge, -rhs);
        self
    }

    /// `a·x < b`
    pub fn lt(&mut self, coeffs: Vec<BigRational>, rhs: BigRational) -> &mut Self {
        self.push(coeffs.into_iter().map(|c| -c).collect(), Relation::Gt, -rhs);
        self
    }

    pub fn extend(&mut self, other: &LinearSystem) {
        assert_eq!(self.dimension, other.dimension, "dimension mismatch");
        self.constraints.extend(other.constraints.iter().cloned());
    }

    pub fn satisfied_by(&self, x: &[BigRational]) -> bool {
        x.len() == self.dimension && self.constraints.iter().all(|c| c.satisfied_by(x))
    }
}

/// A witness point, or `None` when the system is infeasible.
pub fn rational_feasible(system: &LinearSystem) -> Option<Vec<BigRational>> {
    if system.dimension <= FM_MAX_DIMENSION {
        feasible_fourier_motzkin(system)
    } else {
        feasible_simplex(system)
    }
}

pub fn feasible_fourier_motzkin(system: &LinearSystem) -> Option<Vec<BigRational>> {
    let reduced = Reduced::eliminate_equalities(system)?;
    let y = match fm_solve(&reduced.inequalities, reduced.free.len()) {
        FmOutcome::Witness(y) => y,
        FmOutcome::Infeasible => return None,
        FmOutcome::TooLarge => simplex_solve(&reduced.inequalities, reduced.free.len())?,
    };
    Some(reduced.lift(&y))
}

pub fn feasible_simplex(system: &LinearSystem) -> Option<Vec<BigRational>> {
    let reduced = Reduced::eliminate_equalities(system)?;
    let y = simplex_solve(&reduced.inequalities, reduced.free.len())?;
    Some(reduced.lift(&y))
}

fn dot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter()
        .zip(b)
        .fold(BigRational::zero(), |acc, (x, y)| acc + x * y)
}

/// Inequality `coeffs·y (≥|>) rhs` in the free variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Ineq {
    coeffs: Vec<BigRational>,
    rhs: BigRational,
    strict: bool,
}

/// The system after solving the equalities: `x = offset + basis·y` over the free variables.
struct Reduced {
    dimension: usize,
    free: Vec<usize>,
    /// pivot variable -> (constant, coefficients on free variables)
    pivots: Vec<(usize, BigRational, Vec<BigRational>)>,
    inequalities: Vec<Ineq>,
}

impl Reduced {
    fn eliminate_equalities(system: &LinearSystem) -> Option<Self> {
        let n = system.dimension;
        let mut rows: Vec<(Vec<BigRational>, BigRational)> = system
            .constraints
            .iter()
            .filter(|c| c.relation == Relation::Eq)
            .map(|c| (c.coeffs.clone(), c.rhs.clone()))
            .collect();
        let mut pivot_cols = Vec::new();
        let mut r = 0;
        for c in 0..n {
            let Some(p) = (r..rows.len()).find(|&i| !rows[i].0[c].is_zero()) else {
                continue;
            };
            rows.swap(r, p);
            let inv = rows[r].0[c].recip();
            for v in rows[r].0.iter_mut() {
                *v *= &inv;
            }
            rows[r].1 *= &inv;
            for i in 0..rows.len() {
                if i == r || rows[i].0[c].is_zero() {
                    continue;
                }
                let f = rows[i].0[c].clone();
                let (pivot_coeffs, pivot_rhs) = rows[r].clone();
                for (v, pv) in rows[i].0.iter_mut().zip(&pivot_coeffs) {
                    *v -= &f * pv;
                }
                rows[i].1 -= &f * pivot_rhs;
            }
            pivot_cols.push(c);
            r += 1;
        }
        if rows[r..].iter().any(|(_, b)| !b.is_zero()) {
            return None;
        }
        let free: Vec<usize> = (0..n).filter(|c| !pivot_cols.contains(c)).collect();
        let pivots: Vec<(usize, BigRational, Vec<BigRational>)> = pivot_cols
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let coeffs = free.iter().map(|&f| -rows[i].0[f].clone()).collect();
                (c, rows[i].1.clone(), coeffs)
            })
            .collect();
        let mut reduced = Reduced {
            dimension: n,
            free,
            pivots,
            inequalities: Vec::new(),
        };
        for c in &system.constraints {
            let strict = match c.relation {
                Relation::Eq => continue,
                Relation::Ge => false,
                Relation::Gt => true,
            };
            let mut coeffs: Vec<BigRational> =
                reduced.free.iter().map(|&f| c.coeffs[f].clone()).collect();
            let mut rhs = c.rhs.clone();
            for (col, constant, expr) in &reduced.pivots {
                let a = &c.coeffs[*col];
                if a.is_zero() {
                    continue;
                }
                rhs -= a * constant;
                for (v, e) in coeffs.iter_mut().zip(expr) {
                    *v += a * e;
                }
            }
            reduced.inequalities.push(Ineq {
                coeffs,
                rhs,
                strict,
            });
        }
        Some(reduced)
    }

    fn lift(&self, y: &[BigRational]) -> Vec<BigRational> {
        let mut x = vec![BigRational::zero(); self.dimension];
        for (f, v) in self.free.iter().zip(y) {
            x[*f] = v.clone();
        }
        for (col, constant, expr) in &self.pivots {
            x[*col] = constant + dot(expr, y);
        }
        x
    }
}

enum FmOutcome {
    Witness(Vec<BigRational>),
    Infeasible,
    TooLarge,
}

/// Scales so the first nonzero coefficient has absolute value 1; trivial rows are kept as is.
fn normalize(mut c: Ineq) -> Ineq {
    if let Some(lead) = c.coeffs.iter().find(|v| !v.is_zero()).map(|v| v.abs()) {
        for v in c.coeffs.iter_mut() {
            *v /= &lead;
        }
        c.rhs /= &lead;
    }
    c
}

/// Keeps only the tightest constraint per direction.
fn prune(constraints: Vec<Ineq>) -> Vec<Ineq> {
    let mut best: std::collections::BTreeMap<Vec<BigRational>, (BigRational, bool)> =
        std::collections::BTreeMap::new();
    for c in constraints.into_iter().map(normalize) {
        match best.get_mut(&c.coeffs) {
            Some((rhs, strict)) => {
                if c.rhs > *rhs || (c.rhs == *rhs && c.strict) {
                    *rhs = c.rhs;
                    *strict = c.strict;
                }
            }
            None => {
                best.insert(c.coeffs, (c.rhs, c.strict));
            }
        }
    }
    best.into_iter()
        .map(|(coeffs, (rhs, strict))| Ineq {
            coeffs,
            rhs,
            strict,
        })
        .collect()
}

fn fm_solve(inequalities: &[Ineq], dim: usize) -> FmOutcome {
    // stages[k] constrains variables 0..=k only; stages[dim] would be the constant checks
    let mut stages: Vec<Vec<Ineq>> = vec![Vec::new(); dim + 1];
    let mut current = prune(inequalities.to_vec());
    for k in (0..dim).rev() {
        let mut lower = Vec::new();
        let mut upper = Vec::new();
        let mut next = Vec::new();
        for c in &current {
            let a = &c.coeffs[k];
            if a.is_positive() {
                lower.push(c);
            } else if a.is_negative() {
                upper.push(c);
            } else {
                next.push(c.clone());
            }
        }
        if next.len() + lower.len() * upper.len() > FM_CONSTRAINT_CAP {
            return FmOutcome::TooLarge;
        }
        for l in &lower {
            for u in &upper {
                let (fl, fu) = (l.coeffs[k].clone(), -u.coeffs[k].clone());
                let coeffs = l
                    .coeffs
                    .iter()
                    .zip(&u.coeffs)
                    .map(|(a, b)| a / &fl + b / &fu)
                    .collect();
                next.push(Ineq {
                    coeffs,
                    rhs: &l.rhs / &fl + &u.rhs / &fu,
                    strict: l.strict || u.strict,
                });
            }
        }
        stages[k] = current;
        current = prune(next);
    }
    for c in &current {
        debug_assert!(c.coeffs.iter().all(Zero::is_zero));
        let ok = if c.strict {
            c.rhs.is_negative()
        } else {
            !c.rhs.is_positive()
        };
        if !ok {
            return FmOutcome::Infeasible;
        }
    }
    let mut y = vec![BigRational::zero(); dim];
    for k in 0..dim {
        let mut lo: Option<(BigRational, bool)> = None;
        let mut hi: Option<(BigRational, bool)> = None;
        for c in &stages[k] {
            let a = &c.coeffs[k];
            if a.is_zero() {
                continue;
            }
            let rest: BigRational = (0..k).map(|i| &c.coeffs[i] * &y[i]).sum();
            let bound = (&c.rhs - rest) / a;
            if a.is_positive() {
                let tighter = match &lo {
                    None => true,
                    Some((b, s)) => bound > *b || (bound == *b && c.strict && !s),
                };
                if tighter {
                    lo = Some((bound, c.strict));
                }
            } else {
                let tighter = match &hi {
                    None => true,
                    Some((b, s)) => bound < *b || (bound == *b && c.strict && !s),
                };
                if tighter {
                    hi = Some((bound, c.strict));
                }
            }
        }
        y[k] = match (lo, hi) {
            (Some((l, _)), Some((h, _))) => (l + h) / BigRational::from_integer(2.into()),
            (Some((l, _)), None) => l + BigRational::one(),
            (None, Some((h, _))) => h - BigRational::one(),
            (None, None) => BigRational::zero(),
        };
    }
    FmOutcome::Witness(y)
}

/// Two-phase dense tableau simplex with Bland's rule.
///
/// Columns: `y⁺ (dim) | y⁻ (dim) | ε | slacks (m + 1) | artificials`. Row `m` is `ε + s = 1`.
fn simplex_solve(inequalities: &[Ineq], dim: usize) -> Option<Vec<BigRational>> {
    let m = inequalities.len();
    let any_strict = inequalities.iter().any(|c| c.strict);
    let eps = 2 * dim;
    let slack0 = eps + 1;
    let art0 = slack0 + m + 1;
    let rows = m + 1;
    let width = art0 + rows;
    let mut t: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); width + 1]; rows];
    for (r, c) in inequalities.iter().enumerate() {
        for j in 0..dim {
            t[r][j] = c.coeffs[j].clone();
            t[r][dim + j] = -c.coeffs[j].clone();
        }
        if c.strict {
            t[r][eps] = -BigRational::one();
        }
        t[r][slack0 + r] = -BigRational::one();
        t[r][width] = c.rhs.clone();
    }
    t[m][eps] = BigRational::one();
    t[m][slack0 + m] = BigRational::one();
    t[m][width] = BigRational::one();
    for row in t.iter_mut() {
        if row[width].is_negative() {
            for v in row.iter_mut() {
                *v = -std::mem::take(v);
            }
        }
    }
    let mut basis = Vec::with_capacity(rows);
    for (r, row) in t.iter_mut().enumerate() {
        row[art0 + r] = BigRational::one();
        basis.push(art0 + r);
    }

    // phase 1: minimize the sum of artificials
    let mut cost = vec![BigRational::zero(); width + 1];
    for c in cost.iter_mut().skip(art0).take(rows) {
        *c = BigRational::one();
    }
    run_simplex(&mut t, &mut basis, &cost, width, |j| j < art0);
    let infeasibility: BigRational = basis
        .iter()
        .enumerate()
        .filter(|(_, &b)| b >= art0)
        .map(|(r, _)| t[r][width].clone())
        .sum();
    if infeasibility.is_positive() {
        return None;
    }
    // drive remaining zero-level artificials out of the basis
    for r in 0..rows {
        if basis[r] < art0 {
            continue;
        }
        if let Some(j) = (0..art0).find(|&j| !t[r][j].is_zero()) {
            pivot(&mut t, &mut basis, r, j);
        }
    }

    if any_strict {
        // phase 2: maximize ε, i.e. minimize −ε
        let mut cost = vec![BigRational::zero(); width + 1];
        cost[eps] = -BigRational::one();
        run_simplex(&mut t, &mut basis, &cost, width, |j| j < art0);
    }
    let mut values = vec![BigRational::zero(); width];
    for (r, &b) in basis.iter().enumerate() {
        values[b] = t[r][width].clone();
    }
    if any_strict && !values[eps].is_positive() {
        return None;
    }
    Some((0..dim).map(|j| &values[j] - &values[dim + j]).collect())
}

fn pivot(t: &mut [Vec<BigRational>], basis: &mut [usize], r: usize, c: usize) {
    let inv = t[r][c].recip();
    for v in t[r].iter_mut() {
        *v *= &inv;
    }
    let pivot_row = t[r].clone();
    for (i, row) in t.iter_mut().enumerate() {
        if i == r || row[c].is_zero() {
            continue;
        }
        let f = row[c].clone();
        for (v, p) in row.iter_mut().zip(&pivot_row) {
            if !p.is_zero() {
                *v -= &f * p;
            }
        }
    }
    basis[r] = c;
}

/// Minimizes `cost·x` from the current basic feasible solution using Bland's rule.
fn run_simplex(
    t: &mut [Vec<BigRational>],
    basis: &mut [usize],
    cost: &[BigRational],
    width: usize,
    allowed: impl Fn(usize) -> bool,
) {
    loop {
        // reduced cost c_j − c_B·B⁻¹A_j
        let entering = (0..width)
            .filter(|&j| allowed(j) && !basis.contains(&j))
            .find(|&j| {
                let mut reduced = cost[j].clone();
                for (r, &b) in basis.iter().enumerate() {
                    if !cost[b].is_zero() && !t[r][j].is_zero() {
                        reduced -= &cost[b] * &t[r][j];
                    }
                }
                reduced.is_negative()
            });
        let Some(j) = entering else { return };
        let mut leave: Option<(usize, BigRational)> = None;
        for r in 0..t.len() {
            if !t[r][j].is_positive() {
                continue;
            }
            let ratio = &t[r][width] / &t[r][j];
            let better = match &leave {
                None => true,
                Some((lr, lratio)) => {
                    ratio < *lratio || (ratio == *lratio && basis[r] < basis[*lr])
                }
            };
            if better {
                leave = Some((r, ratio));
            }
        }
        // the ε ≤ 1 row and artificial bounds keep every objective here bounded
        let Some((r, _)) = leave else { return };
        pivot(t, basis, r, j);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;
    use proptest::prelude::*;

    fn q(v: i64) -> BigRational {
        rat(v, 1)
    }

    fn qs(v: &[i64]) -> Vec<BigRational> {
        v.iter().map(|&x| q(x)).collect()
    }

    fn both(s: &LinearSystem) -> (Option<Vec<BigRational>>, Option<Vec<BigRational>>) {
        (feasible_fourier_motzkin(s), feasible_simplex(s))
    }

    #[test]
    fn open_unit_interval_has_midpoint_witness() {
        let mut s = LinearSystem::new(1);
        s.gt(qs(&[1]), q(0)).lt(qs(&[1]), q(1));
        assert_eq!(rational_feasible(&s), Some(vec![rat(1, 2)]));
        let w = feasible_simplex(&s).unwrap();
        assert!(s.satisfied_by(&w));
    }

    #[test]
    fn contradictory_strict_pair_is_infeasible() {
        let mut s = LinearSystem::new(1);
        s.gt(qs(&[1]), q(0)).lt(qs(&[1]), q(0));
        assert_eq!(both(&s), (None, None));
    }

    #[test]
    fn triangle_with_strict_cut() {
        let mut s = LinearSystem::new(2);
        s.ge(qs(&[1, 0]), q(0))
            .ge(qs(&[0, 1]), q(0))
            .le(qs(&[1, 1]), q(1))
            .gt(qs(&[1, 0]), rat(1, 2));
        let (a, b) = both(&s);
        for w in [a.unwrap(), b.unwrap()] {
            assert!(s.satisfied_by(&w));
            assert!(w[0] > rat(1, 2) && w[0] <= q(1));
        }
    }

    #[test]
    fn equalities_are_respected() {
        let mut s = LinearSystem::new(3);
        s.equals(qs(&[1, 1, 0]), q(2))
            .equals(qs(&[0, 1, -1]), q(0))
            .gt(qs(&[1, 0, 0]), q(0));
        let (a, b) = both(&s);
        assert!(s.satisfied_by(&a.unwrap()));
        assert!(s.satisfied_by(&b.unwrap()));
        let mut bad = LinearSystem::new(2);
        bad.equals(qs(&[1, 1]), q(1)).equals(qs(&[2, 2]), q(3));
        assert_eq!(both(&bad), (None, None));
    }

    #[test]
    fn closed_point_is_feasible_open_point_is_not() {
        let mut s = LinearSystem::new(2);
        s.ge(qs(&[1, 0]), q(1))
            .le(qs(&[1, 0]), q(1))
            .ge(qs(&[0, 1]), q(3))
            .le(qs(&[0, 1]), q(3));
        assert_eq!(rational_feasible(&s), Some(qs(&[1, 3])));
        s.gt(qs(&[1, 1]), q(4));
        assert_eq!(both(&s), (None, None));
    }

    #[test]
    fn empty_system_is_feasible() {
        let s = LinearSystem::new(5);
        assert!(rational_feasible(&s).is_some());
        assert!(rational_feasible(&LinearSystem::new(0)).is_some());
    }

    #[test]
    fn high_dimension_uses_simplex() {
        let mut s = LinearSystem::new(6);
        for i in 0..6 {
            let mut e = vec![q(0); 6];
            e[i] = q(1);
            s.gt(e.clone(), q(i as i64));
            s.lt(e, q(i as i64 + 1));
        }
        let w = rational_feasible(&s).unwrap();
        assert!(s.satisfied_by(&w));
        s.lt(vec![q(1); 6], q(15));
        assert!(rational_feasible(&s).is_none());
    }

    /// Grid oracle over points with denominators dividing 4 in `[-6, 6]^dim`; only
    /// used where the feasible region is either empty or has nonempty interior.
    fn grid_has_point(s: &LinearSystem, dim: usize) -> bool {
        let steps: Vec<BigRational> = (-24..=24).map(|k| rat(k, 4)).collect();
        let mut idx = vec![0usize; dim];
        loop {
            let x: Vec<BigRational> = idx.iter().map(|&i| steps[i].clone()).collect();
            if s.satisfied_by(&x) {
                return true;
            }
            let mut p = 0;
            loop {
                if p == dim {
                    return false;
                }
                idx[p] += 1;
                if idx[p] < steps.len() {
                    break;
                }
                idx[p] = 0;
                p += 1;
            }
        }
    }

    fn arb_system(dim: usize) -> impl Strategy<Value = LinearSystem> {
        prop::collection::vec(
            (
                prop::collection::vec(-10i64..=10, dim),
                -10i64..=10,
                any::<bool>(),
            ),
            1..6,
        )
        .prop_map(move |rows| {
            let mut s = LinearSystem::new(dim);
            // box keeps everything bounded so the grid oracle is meaningful
            for i in 0..dim {
                let mut e = vec![q(0); dim];
                e[i] = q(1);
                s.gt(e.clone(), q(-6));
                s.lt(e, q(6));
            }
            for (coeffs, rhs, strict) in rows {
                if strict {
                    s.gt(qs(&coeffs), q(rhs));
                } else {
                    s.ge(qs(&coeffs), q(rhs));
                }
            }
            s
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(96))]

        #[test]
        fn fm_and_simplex_agree(s in (1usize..=4).prop_flat_map(arb_system)) {
            let (a, b) = both(&s);
            prop_assert_eq!(a.is_some(), b.is_some());
            if let Some(w) = a { prop_assert!(s.satisfied_by(&w)); }
            if let Some(w) = b { prop_assert!(s.satisfied_by(&w)); }
        }

        #[test]
        fn grid_point_implies_feasible(s in (1usize..=2).prop_flat_map(arb_system)) {
            let found = grid_has_point(&s, s.dimension());
            let w = rational_feasible(&s);
            if found {
                prop_assert!(w.is_some());
            }
            if let Some(w) = w {
                prop_assert!(s.satisfied_by(&w));
            }
        }
    }
}
