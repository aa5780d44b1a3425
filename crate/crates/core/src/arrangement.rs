//! Hypertoric data and the combinatorics of the real hyperplane arrangement.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::linalg::{content, rat_int, rational_feasible, subsets, IntMatrix, LinearSystem};
use crate::symbolic::{Monomial, Var};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArrangementError {
    #[error("need n >= d >= 1, got d = {d}, n = {n}")]
    BadSize { d: usize, n: usize },
    #[error("vector {index} has length {found}, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("vector {index} is not primitive")]
    NonPrimitive { index: usize },
    #[error("vectors have rank {rank} < {d}")]
    RankDeficient { rank: usize, d: usize },
    #[error("vectors do not span the lattice over Z (Smith invariant {invariant})")]
    NotSpanning { invariant: BigInt },
    #[error("no d-subset of the vectors is a Z-basis")]
    NoUnimodularBasis,
    #[error("{what} has {found} entries, expected {expected}")]
    LiftLength {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("circuit {support:?} pairs to zero with the lift")]
    DegenerateLift { support: Vec<usize> },
    #[error("sign vector defines an empty chamber")]
    EmptyChamber,
}

/// Input before normalization. `lambda_c`, when present, is the full complex lift as
/// `(re, im)` pairs and overrides the tropical constants for smoothness questions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawData {
    pub d: usize,
    pub u: Vec<Vec<BigInt>>,
    pub lambda_r: Vec<BigRational>,
    pub trop_const: Vec<BigRational>,
    pub lambda_c: Option<Vec<(BigRational, BigRational)>>,
}

impl RawData {
    pub fn new(
        d: usize,
        u: Vec<Vec<BigInt>>,
        lambda_r: Vec<BigRational>,
        trop_const: Vec<BigRational>,
    ) -> Self {
        RawData {
            d,
            u,
            lambda_r,
            trop_const,
            lambda_c: None,
        }
    }

    pub fn with_complex(mut self, lambda_c: Vec<(BigRational, BigRational)>) -> Self {
        self.lambda_c = Some(lambda_c);
        self
    }
}

/// Normalized hypertoric data. Indices are 0-based; `u[i] = e_i` for `i < d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HypertoricData {
    pub d: usize,
    pub n: usize,
    pub u: Vec<Vec<BigInt>>,
    /// `a[ℓ - d][i]` with `u_ℓ = Σ a_{ℓi} u_i`.
    pub a: Vec<Vec<BigInt>>,
    pub lambda_r: Vec<BigRational>,
    pub lambda_c: Vec<(BigRational, BigRational)>,
    /// True when `lambda_c` was taken from the tropical constants.
    pub complex_from_tropical: bool,
    pub trop_const: Vec<BigRational>,
    pub kahler: Vec<Var>,
    /// `order[k]` is the input index of normalized vector `k`.
    pub order: Vec<usize>,
    /// Columns are the chosen input basis.
    pub basis: IntMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealHyperplane {
    pub index: usize,
    pub normal: Vec<BigInt>,
    pub offset: BigRational,
}

fn shift_offsets(d: usize, a_rows: &[Vec<BigInt>], vals: &mut [BigRational]) {
    let base: Vec<BigRational> = vals[..d].to_vec();
    for (k, v) in vals.iter_mut().enumerate() {
        let pairing: BigRational = a_rows[k]
            .iter()
            .zip(&base)
            .map(|(c, b)| rat_int(c) * b)
            .sum();
        *v -= pairing;
    }
}

pub fn load_and_normalize(raw: &RawData) -> Result<HypertoricData, ArrangementError> {
    let d = raw.d;
    let n = raw.u.len();
    if d == 0 || n < d {
        return Err(ArrangementError::BadSize { d, n });
    }
    for (index, v) in raw.u.iter().enumerate() {
        if v.len() != d {
            return Err(ArrangementError::DimensionMismatch {
                index,
                expected: d,
                found: v.len(),
            });
        }
        if !content(v).is_one() {
            return Err(ArrangementError::NonPrimitive { index });
        }
    }
    for (what, len) in [
        ("lambdaR", raw.lambda_r.len()),
        ("tropConst", raw.trop_const.len()),
    ] {
        if len != n {
            return Err(ArrangementError::LiftLength {
                what,
                expected: n,
                found: len,
            });
        }
    }
    if let Some(c) = &raw.lambda_c {
        if c.len() != n {
            return Err(ArrangementError::LiftLength {
                what: "lambdaC",
                expected: n,
                found: c.len(),
            });
        }
    }
    let m = IntMatrix::from_columns(&raw.u).expect("checked lengths");
    let rank = m.rank();
    if rank < d {
        return Err(ArrangementError::RankDeficient { rank, d });
    }
    if let Some(invariant) = m.smith_invariants().into_iter().find(|s| !s.is_one()) {
        return Err(ArrangementError::NotSpanning { invariant });
    }
    let chosen = subsets(n, d)
        .into_iter()
        .find(|s| {
            m.select_columns(s)
                .determinant()
                .expect("square")
                .abs()
                .is_one()
        })
        .ok_or(ArrangementError::NoUnimodularBasis)?;
    let mut order = chosen.clone();
    order.extend((0..n).filter(|i| !chosen.contains(i)));
    let basis = m.select_columns(&chosen);
    let coords: Vec<Vec<BigInt>> = order
        .iter()
        .map(|&i| basis.solve_integer(&raw.u[i]).expect("unimodular basis"))
        .collect();
    let mut lambda_r: Vec<BigRational> = order.iter().map(|&i| raw.lambda_r[i].clone()).collect();
    shift_offsets(d, &coords, &mut lambda_r);
    let trop_const: Vec<BigRational> = order.iter().map(|&i| raw.trop_const[i].clone()).collect();
    let (mut re, mut im): (Vec<BigRational>, Vec<BigRational>) = match &raw.lambda_c {
        Some(c) => order.iter().map(|&i| c[i].clone()).unzip(),
        None => (trop_const.clone(), vec![BigRational::zero(); n]),
    };
    shift_offsets(d, &coords, &mut re);
    shift_offsets(d, &coords, &mut im);
    let kahler = (d..n).map(|l| Var::new(format!("q{}", l + 1))).collect();
    Ok(HypertoricData {
        d,
        n,
        a: coords[d..].to_vec(),
        u: coords,
        lambda_r,
        lambda_c: re.into_iter().zip(im).collect(),
        complex_from_tropical: raw.lambda_c.is_none(),
        trop_const,
        kahler,
        order,
        basis,
    })
}

impl HypertoricData {
    pub fn hyperplanes(&self) -> Vec<RealHyperplane> {
        (0..self.n)
            .map(|i| RealHyperplane {
                index: i,
                normal: self.u[i].clone(),
                offset: self.lambda_r[i].clone(),
            })
            .collect()
    }

    pub fn matrix(&self) -> IntMatrix {
        IntMatrix::from_columns(&self.u).expect("consistent lengths")
    }

    /// Basis indices `i < d` with `a_{ki} ≠ 0`; for `k < d` this is `{k}`.
    pub fn support(&self, k: usize) -> Vec<usize> {
        (0..self.d).filter(|&i| !self.u[k][i].is_zero()).collect()
    }

    /// Hyperplanes whose support contains the basis index `j`.
    pub fn j_set(&self, j: usize) -> Vec<usize> {
        (0..self.n).filter(|&k| !self.u[k][j].is_zero()).collect()
    }

    pub fn normal_rat(&self, i: usize) -> Vec<BigRational> {
        self.u[i].iter().map(rat_int).collect()
    }

    /// `∩_{i∈I} H_{ℝ,i}` as an equality system.
    pub fn real_system(&self, set: &[usize]) -> LinearSystem {
        let mut sys = LinearSystem::new(self.d);
        for &i in set {
            sys.equals(self.normal_rat(i), self.lambda_r[i].clone());
        }
        sys
    }

    pub fn real_intersects(&self, set: &[usize]) -> bool {
        rational_feasible(&self.real_system(set)).is_some()
    }

    /// `∩ A_i` with `A_i = H_{ℝ,i} × H_{ℂ,i}`; the complex part splits into real and
    /// imaginary equality systems.
    pub fn full_intersects(&self, set: &[usize]) -> bool {
        if !self.real_intersects(set) {
            return false;
        }
        let mut re = LinearSystem::new(self.d);
        let mut im = LinearSystem::new(self.d);
        for &i in set {
            re.equals(self.normal_rat(i), self.lambda_c[i].0.clone());
            im.equals(self.normal_rat(i), self.lambda_c[i].1.clone());
        }
        rational_feasible(&re).is_some() && rational_feasible(&im).is_some()
    }

    pub fn rank_of(&self, set: &[usize]) -> usize {
        let cols: Vec<Vec<BigInt>> = set.iter().map(|&i| self.u[i].clone()).collect();
        if cols.is_empty() {
            return 0;
        }
        IntMatrix::from_columns(&cols).expect("consistent").rank()
    }

    /// `Σ_{i} x_i · λ̂_{ℝ,i}`.
    pub fn pair_lambda(&self, x: &[BigInt]) -> BigRational {
        x.iter()
            .zip(&self.lambda_r)
            .map(|(c, l)| rat_int(c) * l)
            .sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnimodularVerdict {
    pub unimodular: bool,
    pub witness: Option<(Vec<usize>, BigInt)>,
}

/// Every nonsingular maximal minor of the columns `u` is ±1.
pub fn check_unimodular_vectors(d: usize, u: &[Vec<BigInt>]) -> UnimodularVerdict {
    if u.len() >= d && d > 0 {
        let m = IntMatrix::from_columns(u).expect("consistent lengths");
        for s in subsets(u.len(), d) {
            let det = m.select_columns(&s).determinant().expect("square");
            if !det.is_zero() && !det.abs().is_one() {
                return UnimodularVerdict {
                    unimodular: false,
                    witness: Some((s, det)),
                };
            }
        }
    }
    UnimodularVerdict {
        unimodular: true,
        witness: None,
    }
}

pub fn check_unimodular(h: &HypertoricData) -> UnimodularVerdict {
    check_unimodular_vectors(h.d, &h.u)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleVerdict {
    pub simple: bool,
    pub violation: Option<Vec<usize>>,
}

/// Subsets up to size `d + 1` suffice: a larger intersecting family contains an
/// intersecting `(d+1)`-subfamily, which already has rank below its size.
pub fn check_simple_real(h: &HypertoricData) -> SimpleVerdict {
    for k in 1..=(h.d + 1).min(h.n) {
        for s in subsets(h.n, k) {
            if h.real_intersects(&s) && h.rank_of(&s) != k {
                return SimpleVerdict {
                    simple: false,
                    violation: Some(s),
                };
            }
        }
    }
    SimpleVerdict {
        simple: true,
        violation: None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Smoothness {
    Smooth,
    Orbifold,
    Singular,
}

impl fmt::Display for Smoothness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Smoothness::Smooth => "SMOOTH",
            Smoothness::Orbifold => "ORBIFOLD",
            Smoothness::Singular => "SINGULAR",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SmoothFailure {
    /// `d + 1` of the `A_i` meet.
    ExcessIntersection(Vec<usize>),
    /// An intersecting `d`-subset does not span over ℤ.
    NotBasis(Vec<usize>, BigInt),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmoothVerdict {
    pub verdict: Smoothness,
    pub certificate: Option<SmoothFailure>,
}

pub fn check_smooth(h: &HypertoricData) -> SmoothVerdict {
    let d = h.d;
    if h.n > d {
        for s in subsets(h.n, d + 1) {
            if h.full_intersects(&s) {
                return SmoothVerdict {
                    verdict: Smoothness::Singular,
                    certificate: Some(SmoothFailure::ExcessIntersection(s)),
                };
            }
        }
    }
    let m = h.matrix();
    for s in subsets(h.n, d) {
        if !h.full_intersects(&s) {
            continue;
        }
        let det = m.select_columns(&s).determinant().expect("square");
        if !det.abs().is_one() {
            return SmoothVerdict {
                verdict: Smoothness::Orbifold,
                certificate: Some(SmoothFailure::NotBasis(s, det)),
            };
        }
    }
    SmoothVerdict {
        verdict: Smoothness::Smooth,
        certificate: None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    pub support: Vec<usize>,
    pub plus: Vec<usize>,
    pub minus: Vec<usize>,
    /// Primitive class in ℤⁿ with `λ̂_ℝ · β > 0`.
    pub beta: Vec<BigInt>,
    /// `Some(ℓ)` for the circuit of the relation `u_ℓ = Σ a_{ℓi} u_i`.
    pub distinguished: Option<usize>,
    /// `q^{β_S}` in the distinguished parameters.
    pub parameter: Monomial,
}

/// Primitive generator of the kernel of the columns `set`, spread into ℤⁿ.
fn circuit_vector(h: &HypertoricData, set: &[usize]) -> Option<Vec<BigInt>> {
    let cols: Vec<Vec<BigInt>> = set.iter().map(|&i| h.u[i].clone()).collect();
    let ker = IntMatrix::from_columns(&cols)
        .expect("consistent")
        .kernel_lattice();
    if ker.basis.len() != 1 {
        return None;
    }
    let mut out = vec![BigInt::zero(); h.n];
    for (k, &i) in set.iter().enumerate() {
        out[i] = ker.basis[0][k].clone();
    }
    Some(out)
}

/// Expands `β ∈ 𝔨_ℤ` in the distinguished circuit classes.
pub fn circuit_parameter(h: &HypertoricData, beta: &[BigInt]) -> Monomial {
    let mut m = Monomial::one();
    for l in h.d..h.n {
        if beta[l].is_zero() {
            continue;
        }
        let sign = if h.lambda_r[l].is_negative() { -1 } else { 1 };
        let e: i64 = i64::try_from(&beta[l]).expect("small coefficient") * sign;
        m = m.mul(&Monomial::var_pow(h.kahler[l - h.d].clone(), e));
    }
    m
}

pub fn circuits(h: &HypertoricData) -> Result<Vec<Circuit>, ArrangementError> {
    let mut found: Vec<Vec<usize>> = Vec::new();
    for k in 1..=(h.d + 1).min(h.n) {
        for s in subsets(h.n, k) {
            if found.iter().any(|c| c.iter().all(|i| s.contains(i))) {
                continue;
            }
            if !h.real_intersects(&s) {
                found.push(s);
            }
        }
    }
    let mut out = Vec::with_capacity(found.len());
    for support in found {
        let mut beta =
            circuit_vector(h, &support).ok_or_else(|| ArrangementError::DegenerateLift {
                support: support.clone(),
            })?;
        let pairing = h.pair_lambda(&beta);
        if pairing.is_zero() {
            return Err(ArrangementError::DegenerateLift { support });
        }
        if pairing.is_negative() {
            beta.iter_mut().for_each(|b| *b = -b.clone());
        }
        let plus = support
            .iter()
            .copied()
            .filter(|&i| beta[i].is_positive())
            .collect();
        let minus = support
            .iter()
            .copied()
            .filter(|&i| beta[i].is_negative())
            .collect();
        let distinguished = (h.d..h.n).find(|&l| {
            let mut s = h.support(l);
            s.push(l);
            s == support
        });
        let parameter = circuit_parameter(h, &beta);
        out.push(Circuit {
            support,
            plus,
            minus,
            beta,
            distinguished,
            parameter,
        });
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn as_rat(self) -> BigRational {
        match self {
            Sign::Plus => BigRational::one(),
            Sign::Minus => -BigRational::one(),
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

fn halfspace(h: &HypertoricData, sys: &mut LinearSystem, i: usize, s: Sign, strict: bool) {
    let coeffs: Vec<BigRational> = h
        .normal_rat(i)
        .into_iter()
        .map(|c| c * s.as_rat())
        .collect();
    let rhs = h.lambda_r[i].clone() * s.as_rat();
    if strict {
        sys.gt(coeffs, rhs);
    } else {
        sys.ge(coeffs, rhs);
    }
}

/// `Δ = ∩ {σ_i(⟨s,u_i⟩ − λ̂_i) > 0}`.
pub fn chamber_system(h: &HypertoricData, sigma: &[Sign]) -> LinearSystem {
    let mut sys = LinearSystem::new(h.d);
    for (i, &s) in sigma.iter().enumerate() {
        halfspace(h, &mut sys, i, s, true);
    }
    sys
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealChamber {
    pub signs: Vec<Sign>,
    pub witness: Vec<BigRational>,
}

/// All sign vectors with a nonempty open chamber, in lexicographic order (`+` first).
pub fn real_chambers(h: &HypertoricData) -> Vec<RealChamber> {
    fn go(
        h: &HypertoricData,
        prefix: &mut Vec<Sign>,
        sys: &LinearSystem,
        out: &mut Vec<RealChamber>,
    ) {
        let i = prefix.len();
        if i == h.n {
            let witness = rational_feasible(sys).expect("checked on the way down");
            out.push(RealChamber {
                signs: prefix.clone(),
                witness,
            });
            return;
        }
        for s in [Sign::Plus, Sign::Minus] {
            let mut next = sys.clone();
            halfspace(h, &mut next, i, s, true);
            if rational_feasible(&next).is_some() {
                prefix.push(s);
                go(h, prefix, &next, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(h, &mut Vec::new(), &LinearSystem::new(h.d), &mut out);
    out
}

/// A non-face intersection `V_J` with `Δ_J = ∩_{j∈J} H^{σ̄(j)}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplementPiece {
    pub j: Vec<usize>,
    pub halfspaces: Vec<(usize, Sign)>,
}

pub fn cotangent_complement(
    h: &HypertoricData,
    sigma: &[Sign],
) -> Result<Vec<ComplementPiece>, ArrangementError> {
    if sigma.len() != h.n {
        return Err(ArrangementError::LiftLength {
            what: "sign vector",
            expected: h.n,
            found: sigma.len(),
        });
    }
    if rational_feasible(&chamber_system(h, sigma)).is_none() {
        return Err(ArrangementError::EmptyChamber);
    }
    let mut closure = LinearSystem::new(h.d);
    for (i, &s) in sigma.iter().enumerate() {
        halfspace(h, &mut closure, i, s, false);
    }
    let mut out = Vec::new();
    for k in 1..=h.n {
        for j in subsets(h.n, k) {
            let meet = h.real_system(&j);
            if rational_feasible(&meet).is_none() {
                continue;
            }
            let mut face = meet;
            face.extend(&closure);
            if rational_feasible(&face).is_some() {
                continue;
            }
            let halfspaces = j.iter().map(|&i| (i, sigma[i].flip())).collect();
            out.push(ComplementPiece { j, halfspaces });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{int, rat};

    fn raw(d: usize, u: &[&[i64]], lr: &[i64], tc: &[i64]) -> RawData {
        RawData::new(
            d,
            u.iter()
                .map(|v| v.iter().map(|&x| int(x)).collect())
                .collect(),
            lr.iter().map(|&x| rat(x, 1)).collect(),
            tc.iter().map(|&x| rat(x, 1)).collect(),
        )
    }

    fn tp2(l3: i64) -> HypertoricData {
        load_and_normalize(&raw(
            2,
            &[&[1, 0], &[0, 1], &[-1, -1]],
            &[0, 0, l3],
            &[0, 0, 5],
        ))
        .unwrap()
    }

    fn a3(offsets: &[i64]) -> HypertoricData {
        load_and_normalize(&raw(1, &[&[1], &[1], &[1], &[1]], offsets, &[0, 1, 2, 3])).unwrap()
    }

    #[test]
    fn normalizes_cotangent_of_projective_plane() {
        let h = tp2(1);
        assert_eq!(h.order, vec![0, 1, 2]);
        assert_eq!(h.a, vec![vec![int(-1), int(-1)]]);
        assert_eq!(h.kahler, vec![Var::new("q3")]);
    }

    #[test]
    fn square_case_has_no_relations() {
        let h = load_and_normalize(&raw(2, &[&[1, 0], &[0, 1]], &[0, 0], &[0, 0])).unwrap();
        assert!(h.a.is_empty());
    }

    #[test]
    fn rejects_bad_vectors() {
        assert_eq!(
            load_and_normalize(&raw(2, &[&[2, 0], &[0, 1]], &[0, 0], &[0, 0])),
            Err(ArrangementError::NonPrimitive { index: 0 })
        );
        assert_eq!(
            load_and_normalize(&raw(2, &[&[1, 1], &[1, -1]], &[0, 0], &[0, 0])),
            Err(ArrangementError::NotSpanning { invariant: int(2) })
        );
        assert!(matches!(
            load_and_normalize(&raw(2, &[&[1, 1], &[-1, -1]], &[0, 0], &[0, 0])),
            Err(ArrangementError::RankDeficient { rank: 1, .. })
        ));
    }

    #[test]
    fn reorders_and_shifts_lift() {
        let h = load_and_normalize(&raw(
            2,
            &[&[1, 1], &[2, 1], &[1, 0]],
            &[3, 5, 7],
            &[0, 0, 0],
        ))
        .unwrap();
        assert_eq!(h.order, vec![0, 1, 2]);
        assert_eq!(h.u[2], vec![int(-1), int(1)]);
        assert_eq!(h.lambda_r, vec![rat(0, 1), rat(0, 1), rat(7 + 3 - 5, 1)]);
        let h = load_and_normalize(&raw(
            2,
            &[&[1, 0], &[1, 0], &[0, 1]],
            &[1, 2, 0],
            &[0, 0, 0],
        ))
        .unwrap();
        assert_eq!(h.order, vec![0, 2, 1]);
        assert_eq!(h.lambda_r[2], rat(1, 1));
    }

    #[test]
    fn unimodularity() {
        assert!(check_unimodular(&tp2(1)).unimodular);
        assert!(check_unimodular(&a3(&[0, 1, 2, 3])).unimodular);
        let v = check_unimodular_vectors(2, &[vec![int(1), int(0)], vec![int(1), int(2)]]);
        assert!(!v.unimodular);
        assert_eq!(v.witness.unwrap().1.abs(), int(2));
    }

    #[test]
    fn simplicity() {
        assert!(check_simple_real(&tp2(1)).simple);
        assert_eq!(check_simple_real(&tp2(0)).violation, Some(vec![0, 1, 2]));
        let h = load_and_normalize(&raw(1, &[&[1]], &[0], &[0])).unwrap();
        assert!(check_simple_real(&h).simple);
    }

    #[test]
    fn smoothness() {
        let mut r = raw(2, &[&[1, 0], &[0, 1], &[-1, -1]], &[0, 0, 1], &[0, 0, 0]);
        r = r.with_complex(vec![(rat(0, 1), rat(0, 1)); 3]);
        assert_eq!(
            check_smooth(&load_and_normalize(&r).unwrap()).verdict,
            Smoothness::Smooth
        );
        assert_eq!(check_smooth(&a3(&[0, 1, 2, 3])).verdict, Smoothness::Smooth);
        let r = raw(1, &[&[1], &[1], &[1], &[1]], &[2, 2, 2, 2], &[0, 0, 0, 0]).with_complex(vec![
            (
                rat(0, 1),
                rat(0, 1)
            );
            4
        ]);
        let v = check_smooth(&load_and_normalize(&r).unwrap());
        assert_ne!(v.verdict, Smoothness::Smooth);
        assert_eq!(
            v.certificate,
            Some(SmoothFailure::ExcessIntersection(vec![0, 1]))
        );
    }

    #[test]
    fn circuits_of_examples() {
        let c = circuits(&tp2(1)).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].support, vec![0, 1, 2]);
        assert_eq!(c[0].beta, vec![int(1), int(1), int(1)]);
        assert_eq!(c[0].distinguished, Some(2));
        assert_eq!(c[0].parameter, Monomial::var(Var::new("q3")));

        let h = a3(&[0, 1, 2, 3]);
        let c = circuits(&h).unwrap();
        assert_eq!(c.len(), 6);
        for circ in &c {
            assert!(h.pair_lambda(&circ.beta).is_positive());
            assert_eq!(circ.plus.len(), 1);
            assert_eq!(circ.minus.len(), 1);
        }

        let h = load_and_normalize(&raw(1, &[&[1], &[-1]], &[0, 1], &[0, 0])).unwrap();
        let c = circuits(&h).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].beta, vec![int(1), int(1)]);
    }

    #[test]
    fn derived_parameters_follow_the_kernel_basis() {
        let h = a3(&[0, 1, 2, 3]);
        let c = circuits(&h).unwrap();
        let c23 = c.iter().find(|c| c.support == vec![1, 2]).unwrap();
        assert_eq!(c23.distinguished, None);
        assert_eq!(
            c23.parameter,
            Monomial::from_pairs([(Var::new("q2"), -1), (Var::new("q3"), 1)])
        );
    }

    #[test]
    fn chambers_and_complement() {
        let h = tp2(1);
        let ch = real_chambers(&h);
        assert_eq!(ch.len(), 7);
        let tri = ch
            .iter()
            .find(|c| c.signs == vec![Sign::Minus, Sign::Minus, Sign::Minus])
            .expect("bounded triangle");
        assert!(cotangent_complement(&h, &tri.signs).unwrap().is_empty());

        let h = load_and_normalize(&raw(1, &[&[1], &[-1]], &[0, 1], &[0, 0])).unwrap();
        assert!(cotangent_complement(&h, &[Sign::Minus, Sign::Minus])
            .unwrap()
            .is_empty());

        let h = a3(&[0, 1, 2, 3]);
        let mid = [Sign::Plus, Sign::Plus, Sign::Minus, Sign::Minus];
        let js: Vec<Vec<usize>> = cotangent_complement(&h, &mid)
            .unwrap()
            .into_iter()
            .map(|p| p.j)
            .collect();
        assert_eq!(js, vec![vec![0], vec![3]]);
        assert_eq!(
            cotangent_complement(&h, &[Sign::Minus, Sign::Plus, Sign::Plus, Sign::Plus]),
            Err(ArrangementError::EmptyChamber)
        );
    }
}
