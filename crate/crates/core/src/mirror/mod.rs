//! Disc classes, open Gromov–Witten values, generating functions and the mirror equations,
//! plus the chart-glued resolution in [`atlas`].

pub mod atlas;
mod wall;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::arrangement::HypertoricData;
use crate::linalg::rat;
use crate::symbolic::{LaurentPoly, Monomial, RationalFn, SymbolicError, Var};

pub use atlas::{
    build_atlas, build_atlas_from, chamber_transition, stratum_embedding, verify_atlas,
    verify_volume_form, volume_form, Atlas, AtlasReport, Chart, ChartId, ChartKind, CheckResult,
    StratumChart, Transition, VolumeEntry, VolumeReport,
};
pub use wall::WallMonomial;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MirrorError {
    #[error("direction {0} is out of range")]
    BadDirection(usize),
    #[error("chamber label has the wrong length")]
    BadChamber,
    #[error("point does not lie on the variety: equation {0} evaluates to {1}")]
    NotOnVariety(usize, String),
    #[error("point leaves coordinate {0} unassigned")]
    Unassigned(String),
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
    #[error(transparent)]
    Tropical(#[from] crate::tropical::TropicalError),
    #[error("frame of stratum {0} is not a lattice basis")]
    FrameNotBasis(String),
    #[error("charts {0} and {1} are not adjacent")]
    NotAdjacent(String, String),
}

pub fn z_var(i: usize) -> Var {
    Var::new(format!("Z{i}"))
}

pub fn u_var(j: usize) -> Var {
    Var::new(format!("u{j}"))
}

pub fn v_var(j: usize) -> Var {
    Var::new(format!("v{j}"))
}

/// Chamber-chart coordinate `𝐮^{(𝐡)}_j`.
pub fn chart_u(j: usize) -> Var {
    Var::new(format!("U{j}"))
}

/// Chamber-chart coordinate `𝐯^{(𝐡)}_j`.
pub fn chart_v(j: usize) -> Var {
    Var::new(format!("V{j}"))
}

/// `𝐙_k` for a 0-based hyperplane index: `Z_{k+1}` for `k < d`, else `q_{k+1} ∏ 𝐙_i^{a_{ki}}`.
pub fn big_z(h: &HypertoricData, k: usize) -> Monomial {
    if k < h.d {
        return Monomial::var(z_var(k + 1));
    }
    let mut m = Monomial::var(h.kahler[k - h.d].clone());
    for (i, a) in h.u[k].iter().enumerate() {
        let e = a.to_i64().expect("small coefficient");
        m = m.mul(&Monomial::var_pow(z_var(i + 1), e));
    }
    m
}

/// `1 + 𝐙_k`.
pub fn wall_factor(h: &HypertoricData, k: usize) -> LaurentPoly {
    &LaurentPoly::one() + &LaurentPoly::monomial(big_z(h, k))
}

/// `𝐣`: hyperplanes with nonzero `j`-th coordinate (1-based `j`), as 0-based indices.
pub fn j_collection(h: &HypertoricData, j: usize) -> Vec<usize> {
    h.j_set(j - 1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum End {
    Minus,
    Plus,
}

impl fmt::Display for End {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            End::Minus => "minus",
            End::Plus => "plus",
        })
    }
}

/// `β^±_j + Σ_{k∈alphas} α_k`. `homology` is over `(β_1..β_d, α_1..α_n)`; the end says which
/// of `β^±_j` the unit `β` coefficient stands for.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DiscClass {
    pub j: usize,
    pub end: End,
    pub alphas: Vec<usize>,
    pub homology: Vec<i64>,
}

impl fmt::Display for DiscClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = match self.end {
            End::Minus => "-",
            End::Plus => "+",
        };
        write!(f, "b{sign}{}", self.j)?;
        for k in &self.alphas {
            write!(f, "+a{}", k + 1)?;
        }
        Ok(())
    }
}

/// A general relative class `Σ c_i β^{end}_i + Σ e_k α_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelativeClass {
    pub end: End,
    pub beta: Vec<i64>,
    pub alpha: Vec<i64>,
}

fn check_chamber(h: &HypertoricData, chamber: &[usize], j: usize) -> Result<(), MirrorError> {
    if chamber.len() != h.n {
        return Err(MirrorError::BadChamber);
    }
    if j == 0 || j > h.d {
        return Err(MirrorError::BadDirection(j));
    }
    Ok(())
}

/// The walls a disc of the given end may cross: `{k : h_k = j}` for the minus end and
/// `{k : u_k^{(j)} ≠ 0, h_k ≠ j}` for the plus end.
pub fn index_set(h: &HypertoricData, chamber: &[usize], j: usize, end: End) -> Vec<usize> {
    match end {
        End::Minus => (0..h.n).filter(|&k| chamber[k] == j).collect(),
        End::Plus => (0..h.n)
            .filter(|&k| !h.u[k][j - 1].is_zero() && chamber[k] != j)
            .collect(),
    }
}

pub fn maslov2_classes(
    h: &HypertoricData,
    chamber: &[usize],
    j: usize,
    end: End,
) -> Result<Vec<DiscClass>, MirrorError> {
    check_chamber(h, chamber, j)?;
    let idx = index_set(h, chamber, j, end);
    let mut out = Vec::with_capacity(1 << idx.len());
    for mask in 0u64..(1 << idx.len()) {
        let alphas: Vec<usize> = idx
            .iter()
            .enumerate()
            .filter(|(b, _)| mask & (1 << b) != 0)
            .map(|(_, &k)| k)
            .collect();
        let mut homology = vec![0i64; h.d + h.n];
        homology[j - 1] = 1;
        for &k in &alphas {
            homology[h.d + k] = 1;
        }
        out.push(DiscClass {
            j,
            end,
            alphas,
            homology,
        });
    }
    Ok(out)
}

/// `n_β` in the given chamber: 1 on `β^±_j + Σ δ_k α_k` with `δ_k ∈ {0,1}` supported on the
/// admissible walls, 0 otherwise.
pub fn open_gw(h: &HypertoricData, chamber: &[usize], class: &RelativeClass) -> u8 {
    if class.beta.len() != h.d || class.alpha.len() != h.n || chamber.len() != h.n {
        return 0;
    }
    let ones: Vec<usize> = (0..h.d).filter(|&i| class.beta[i] == 1).collect();
    if ones.len() != 1 || class.beta.iter().any(|&c| c != 0 && c != 1) {
        return 0;
    }
    let j = ones[0] + 1;
    let idx = index_set(h, chamber, j, class.end);
    let ok = class
        .alpha
        .iter()
        .enumerate()
        .all(|(k, &e)| e == 0 || (e == 1 && idx.contains(&k)));
    u8::from(ok)
}

pub fn relative_class(h: &HypertoricData, c: &DiscClass) -> RelativeClass {
    RelativeClass {
        end: c.end,
        beta: c.homology[..h.d].to_vec(),
        alpha: c.homology[h.d..].to_vec(),
    }
}

/// `(𝐮_j, 𝐯_j)` on the chamber, summed over Maslov-2 classes weighted by `n_β`, in the chart
/// coordinate `U_j` and the global `𝐙`. Gauge and sphere constants are 1.
pub fn generating_functions(
    h: &HypertoricData,
    chamber: &[usize],
    j: usize,
) -> Result<(LaurentPoly, LaurentPoly), MirrorError> {
    let mut sums = Vec::with_capacity(2);
    for (end, e) in [(End::Minus, 1), (End::Plus, -1)] {
        let mut total = LaurentPoly::zero();
        for c in maslov2_classes(h, chamber, j, end)? {
            if open_gw(h, chamber, &relative_class(h, &c)) == 0 {
                continue;
            }
            let mut m = Monomial::var_pow(chart_u(j), e);
            for &k in &c.alphas {
                m = m.mul(&big_z(h, k));
            }
            total.add_term(m, rat(1, 1));
        }
        sums.push(total);
    }
    let v = sums.pop().expect("two ends");
    let u = sums.pop().expect("two ends");
    Ok((u, v))
}

/// Closed forms `𝐮_j = U_j ∏_{h_k=j}(1+𝐙_k)` and `𝐯_j = U_j⁻¹ ∏_{k∈𝐣, h_k≠j}(1+𝐙_k)`.
pub fn generating_functions_factored(
    h: &HypertoricData,
    chamber: &[usize],
    j: usize,
) -> (WallMonomial, WallMonomial) {
    let mut u = WallMonomial::var(chart_u(j));
    let mut v = WallMonomial::monomial(Monomial::var_pow(chart_u(j), -1));
    for k in j_collection(h, j) {
        if chamber[k] == j {
            u.add_factor(k, 1);
        } else {
            v.add_factor(k, 1);
        }
    }
    (u, v)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MirrorEquation {
    pub j: usize,
    /// `𝐣` as 0-based hyperplane indices.
    pub factors: Vec<usize>,
    pub factor_polys: Vec<LaurentPoly>,
}

impl MirrorEquation {
    pub fn rhs(&self) -> LaurentPoly {
        self.factor_polys
            .iter()
            .fold(LaurentPoly::one(), |acc, f| &acc * f)
    }

    pub fn lhs(&self) -> LaurentPoly {
        LaurentPoly::monomial(Monomial::var(u_var(self.j)).mul(&Monomial::var(v_var(self.j))))
    }

    /// `𝐮_j𝐯_j − ∏(1+𝐙_k)`.
    pub fn defining(&self) -> RationalFn {
        RationalFn::from(&self.lhs() - &self.rhs())
    }
}

impl fmt::Display for MirrorEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "u{j}*v{j} = ", j = self.j)?;
        if self.factor_polys.is_empty() {
            return f.write_str("1");
        }
        for (i, p) in self.factor_polys.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            let (m, _) = p.terms().find(|(m, _)| !m.is_one()).expect("1 + monomial");
            write!(f, "(1+{})", kahler_first(m))?;
        }
        Ok(())
    }
}

/// `q` variables before `Z` variables, as in `q2*Z1`.
pub fn kahler_first(m: &Monomial) -> String {
    let (q, z): (Vec<_>, Vec<_>) = m.iter().partition(|(v, _)| v.name().starts_with('q'));
    let parts: Vec<String> = [q, z]
        .into_iter()
        .map(|p| Monomial::from_pairs(p.into_iter().map(|(v, e)| (v.clone(), *e))))
        .filter(|p| !p.is_one())
        .map(|p| p.to_string())
        .collect();
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join("*")
    }
}

pub fn mirror_equations(h: &HypertoricData) -> Vec<MirrorEquation> {
    (1..=h.d)
        .map(|j| {
            let factors = j_collection(h, j);
            let factor_polys = factors.iter().map(|&k| wall_factor(h, k)).collect();
            MirrorEquation {
                j,
                factors,
                factor_polys,
            }
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointVerdict {
    SmoothPoint,
    SingularPoint,
}

impl fmt::Display for PointVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PointVerdict::SmoothPoint => "SMOOTH_POINT",
            PointVerdict::SingularPoint => "SINGULAR_POINT",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointReport {
    pub verdict: PointVerdict,
    pub jacobian_rank: usize,
    pub jacobian: Vec<Vec<RationalFn>>,
}

/// Rank over the field of rational functions by Gaussian elimination.
pub fn rank_over_field(rows: &[Vec<RationalFn>]) -> usize {
    let mut m: Vec<Vec<RationalFn>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let pivot = m[rank][c].clone();
        for r in 0..m.len() {
            if r == rank || m[r][c].is_zero() {
                continue;
            }
            let f = &m[r][c] / &pivot;
            for cc in c..cols {
                let t = &f * &m[rank][cc];
                m[r][cc] = &m[r][cc] - &t;
            }
        }
        rank += 1;
    }
    rank
}

/// Ambient coordinates `(𝐮_1, 𝐯_1, …, 𝐮_d, 𝐯_d, 𝐙_1, …, 𝐙_d)`.
pub fn ambient_coordinates(d: usize) -> Vec<Var> {
    let mut out = Vec::with_capacity(3 * d);
    for j in 1..=d {
        out.push(u_var(j));
        out.push(v_var(j));
    }
    out.extend((1..=d).map(z_var));
    out
}

pub fn singular_point_check(
    equations: &[MirrorEquation],
    point: &BTreeMap<Var, RationalFn>,
) -> Result<PointReport, MirrorError> {
    let d = equations.len();
    let coords = ambient_coordinates(d);
    if let Some(v) = coords.iter().find(|v| !point.contains_key(*v)) {
        return Err(MirrorError::Unassigned(v.to_string()));
    }
    let mut jacobian = Vec::with_capacity(d);
    for (i, eq) in equations.iter().enumerate() {
        let f = eq.defining();
        let val = f.substitute(point)?;
        if !val.is_zero() {
            return Err(MirrorError::NotOnVariety(i + 1, val.to_string()));
        }
        let row = coords
            .iter()
            .map(|x| f.derivative(x).substitute(point))
            .collect::<Result<Vec<_>, _>>()?;
        jacobian.push(row);
    }
    let jacobian_rank = rank_over_field(&jacobian);
    let verdict = if jacobian_rank < d {
        PointVerdict::SingularPoint
    } else {
        PointVerdict::SmoothPoint
    };
    Ok(PointReport {
        verdict,
        jacobian_rank,
        jacobian,
    })
}

/// One component `{1 + 𝐙_k = 0}` of the period support, written as `𝐙_k = −1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodHyperplane {
    pub k: usize,
    pub monomial: Monomial,
}

impl fmt::Display for PeriodHyperplane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = -1", kahler_first(&self.monomial))
    }
}

pub fn period_support(h: &HypertoricData) -> Vec<PeriodHyperplane> {
    (0..h.n)
        .map(|k| PeriodHyperplane {
            k,
            monomial: big_z(h, k),
        })
        .collect()
}

/// Integer exponent vector helper for frame data.
pub(crate) fn small(v: &BigInt) -> i64 {
    v.to_i64().expect("small integer")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::{load_and_normalize, RawData};
    use crate::linalg::int;

    fn data(d: usize, u: &[&[i64]], lr: &[i64], tc: &[i64]) -> HypertoricData {
        load_and_normalize(&RawData::new(
            d,
            u.iter()
                .map(|v| v.iter().map(|&x| int(x)).collect())
                .collect(),
            lr.iter().map(|&x| rat(x, 1)).collect(),
            tc.iter().map(|&x| rat(x, 1)).collect(),
        ))
        .unwrap()
    }

    fn tp1() -> HypertoricData {
        data(1, &[&[1], &[-1]], &[0, 1], &[0, 1])
    }

    fn tp2() -> HypertoricData {
        data(2, &[&[1, 0], &[0, 1], &[-1, -1]], &[0, 0, 1], &[0, 0, 5])
    }

    fn poly(s: &[(i64, &[(&str, i64)])]) -> LaurentPoly {
        LaurentPoly::from_terms(s.iter().map(|(c, m)| {
            (
                Monomial::from_pairs(m.iter().map(|&(v, e)| (Var::new(v), e))),
                rat(*c, 1),
            )
        }))
    }

    #[test]
    fn disc_classes_of_cotangent_line() {
        let h = tp1();
        let c = maslov2_classes(&h, &[1, 0], 1, End::Minus).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c[1].alphas, vec![0]);
        assert_eq!(
            maslov2_classes(&h, &[0, 0], 1, End::Minus).unwrap().len(),
            1
        );
        assert_eq!(maslov2_classes(&h, &[0, 0], 1, End::Plus).unwrap().len(), 4);
    }

    #[test]
    fn open_gw_values() {
        let h = tp1();
        let base = RelativeClass {
            end: End::Minus,
            beta: vec![1],
            alpha: vec![0, 0],
        };
        assert_eq!(open_gw(&h, &[0, 0], &base), 1);
        let twice = RelativeClass {
            alpha: vec![2, 0],
            ..base.clone()
        };
        assert_eq!(open_gw(&h, &[1, 0], &twice), 0);
        let wall_only = RelativeClass {
            beta: vec![0],
            alpha: vec![1, 0],
            ..base
        };
        assert_eq!(open_gw(&h, &[1, 0], &wall_only), 0);
    }

    #[test]
    fn generating_functions_of_cotangent_line() {
        let h = tp1();
        let (u, v) = generating_functions(&h, &[1, 0], 1).unwrap();
        assert_eq!(u, poly(&[(1, &[("U1", 1)]), (1, &[("U1", 1), ("Z1", 1)])]));
        assert_eq!(
            v,
            poly(&[
                (1, &[("U1", -1)]),
                (1, &[("U1", -1), ("q2", 1), ("Z1", -1)])
            ])
        );
        let (u, v) = generating_functions(&h, &[0, 0], 1).unwrap();
        assert_eq!(u, poly(&[(1, &[("U1", 1)])]));
        let expected = &(&wall_factor(&h, 0) * &wall_factor(&h, 1)) * &poly(&[(1, &[("U1", -1)])]);
        assert_eq!(v, expected);
    }

    #[test]
    fn factored_and_summed_forms_agree() {
        let h = tp2();
        let (u, _) = generating_functions(&h, &[0, 0, 1], 1).unwrap();
        let (uf, _) = generating_functions_factored(&h, &[0, 0, 1], 1);
        assert_eq!(RationalFn::from(u), uf.to_rational(&h));
        assert_eq!(uf.display(&h), "U1*(1+q3*Z1^-1*Z2^-1)");
    }

    #[test]
    fn equations_of_examples() {
        let eqs: Vec<String> = mirror_equations(&tp2())
            .iter()
            .map(|e| e.to_string())
            .collect();
        assert_eq!(
            eqs,
            vec![
                "u1*v1 = (1+Z1)*(1+q3*Z1^-1*Z2^-1)",
                "u2*v2 = (1+Z2)*(1+q3*Z1^-1*Z2^-1)"
            ]
        );
        assert_eq!(
            mirror_equations(&tp1())[0].to_string(),
            "u1*v1 = (1+Z1)*(1+q2*Z1^-1)"
        );
        let a3 = data(1, &[&[1], &[1], &[1], &[1]], &[0, 1, 2, 3], &[0, 1, 2, 3]);
        assert_eq!(
            mirror_equations(&a3)[0].to_string(),
            "u1*v1 = (1+Z1)*(1+q2*Z1)*(1+q3*Z1)*(1+q4*Z1)"
        );
    }

    fn point(pairs: &[(&str, RationalFn)]) -> BTreeMap<Var, RationalFn> {
        pairs
            .iter()
            .map(|(v, f)| (Var::new(*v), f.clone()))
            .collect()
    }

    #[test]
    fn singular_points() {
        let q = RationalFn::var("q3");
        let eqs = mirror_equations(&tp2());
        let p = point(&[
            ("u1", RationalFn::zero()),
            ("v1", RationalFn::zero()),
            ("u2", RationalFn::one()),
            ("v2", RationalFn::zero()),
            ("Z1", RationalFn::int(-1)),
            ("Z2", q.clone()),
        ]);
        assert_eq!(
            singular_point_check(&eqs, &p).unwrap().verdict,
            PointVerdict::SingularPoint
        );

        let eqs = mirror_equations(&tp1());
        let p = point(&[
            ("u1", RationalFn::zero()),
            ("v1", RationalFn::zero()),
            ("Z1", RationalFn::int(-1)),
        ]);
        assert_eq!(
            singular_point_check(&eqs, &p).unwrap().verdict,
            PointVerdict::SmoothPoint
        );
        let q = RationalFn::var("q2");
        let v1 = &(&RationalFn::int(2) * &(&RationalFn::one() + &q)) / &RationalFn::int(2);
        let p = point(&[
            ("u1", RationalFn::int(2)),
            ("v1", v1),
            ("Z1", RationalFn::one()),
        ]);
        assert_eq!(
            singular_point_check(&eqs, &p).unwrap().verdict,
            PointVerdict::SmoothPoint
        );
        let off = point(&[
            ("u1", RationalFn::one()),
            ("v1", RationalFn::one()),
            ("Z1", RationalFn::one()),
        ]);
        assert!(matches!(
            singular_point_check(&eqs, &off),
            Err(MirrorError::NotOnVariety(1, _))
        ));
    }

    #[test]
    fn period_support_loci() {
        let s: Vec<String> = period_support(&tp2())
            .iter()
            .map(|p| p.to_string())
            .collect();
        assert_eq!(s, vec!["Z1 = -1", "Z2 = -1", "q3*Z1^-1*Z2^-1 = -1"]);
        let s: Vec<String> = period_support(&tp1())
            .iter()
            .map(|p| p.to_string())
            .collect();
        assert_eq!(s, vec!["Z1 = -1", "q2*Z1^-1 = -1"]);
    }
}
