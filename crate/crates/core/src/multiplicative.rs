//! The multiplicative hypertoric side: the matrix `Π`, invariant monomials, and the ring map
//! `φ` from the mirror ring, checked as exact rational identities.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::arrangement::HypertoricData;
use crate::linalg::{IntMatrix, LinalgError};
use crate::mirror::{j_collection, u_var, v_var, wall_factor};
use crate::symbolic::{LaurentPoly, Monomial, RationalFn, SymbolicError, Var};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MultiplicativeError {
    #[error("matrix is not totally unimodular: minor on rows {rows:?}, columns {cols:?} is {det}")]
    NotTotallyUnimodular {
        rows: Vec<usize>,
        cols: Vec<usize>,
        det: BigInt,
    },
    #[error("monomial is not invariant; functional {functional:?} pairs to {pairing}")]
    NotInvariant {
        functional: Vec<BigInt>,
        pairing: BigInt,
    },
    #[error("image of {0} does not reduce to the relation ring")]
    NotReducible(String),
    #[error("variable {0} is not a mirror coordinate")]
    UnknownVariable(String),
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub fn z_small(j: usize) -> Var {
    Var::new(format!("z{j}"))
}

pub fn w_small(j: usize) -> Var {
    Var::new(format!("w{j}"))
}

pub fn t_var(j: usize) -> Var {
    Var::new(format!("t{j}"))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiMatrix {
    /// `n × d`, row `j` is `π*_{j·}`.
    pub entries: IntMatrix,
    pub totally_unimodular: bool,
    pub witness: Option<(Vec<usize>, Vec<usize>, BigInt)>,
}

impl PiMatrix {
    pub fn from_rows(rows: &[Vec<BigInt>]) -> Result<Self, MultiplicativeError> {
        let entries = IntMatrix::from_rows(rows)?;
        let mut witness = None;
        'outer: for k in 1..=entries.rows().min(entries.cols()) {
            for m in entries.square_minors(k)? {
                if m.det.abs() > BigInt::one() {
                    witness = Some((m.rows, m.cols, m.det));
                    break 'outer;
                }
            }
        }
        Ok(PiMatrix {
            entries,
            totally_unimodular: witness.is_none(),
            witness,
        })
    }

    pub fn n(&self) -> usize {
        self.entries.rows()
    }

    pub fn d(&self) -> usize {
        self.entries.cols()
    }

    pub fn entry(&self, j: usize, i: usize) -> i64 {
        self.entries.get(j, i).to_i64().expect("small entry")
    }

    pub fn require_tu(&self) -> Result<(), MultiplicativeError> {
        match &self.witness {
            None => Ok(()),
            Some((rows, cols, det)) => Err(MultiplicativeError::NotTotallyUnimodular {
                rows: rows.clone(),
                cols: cols.clone(),
                det: det.clone(),
            }),
        }
    }
}

pub fn pi_matrix(h: &HypertoricData) -> Result<PiMatrix, MultiplicativeError> {
    PiMatrix::from_rows(&h.u)
}

/// `𝐳_i` and `𝐰_i` (1-based `i`) in `z_j, w_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantGenerators {
    pub bold_z: Vec<Monomial>,
    pub bold_w: Vec<Monomial>,
}

pub fn invariant_generators(pi: &PiMatrix) -> Result<InvariantGenerators, MultiplicativeError> {
    pi.require_tu()?;
    let mut bold_z = Vec::with_capacity(pi.d());
    let mut bold_w = Vec::with_capacity(pi.d());
    for i in 0..pi.d() {
        let mut z = Monomial::one();
        let mut w = Monomial::one();
        for j in 0..pi.n() {
            let p = pi.entry(j, i);
            if p >= 0 {
                z = z.mul(&Monomial::var_pow(z_small(j + 1), p));
                w = w.mul(&Monomial::var_pow(w_small(j + 1), p));
            } else {
                z = z.mul(&Monomial::var_pow(w_small(j + 1), -p));
                w = w.mul(&Monomial::var_pow(z_small(j + 1), -p));
            }
        }
        bold_z.push(z);
        bold_w.push(w);
    }
    Ok(InvariantGenerators { bold_z, bold_w })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SignRule {
    /// `(−1)` to the parity of `Σ_j |π*_{ji}|`.
    #[default]
    Parity,
    /// `(−1)` to the sign of the same sum, i.e. always `−1`.
    Signum,
}

/// The ring map `φ`, with optional per-coordinate sign perturbations.
#[derive(Clone, Debug)]
pub struct Phi {
    pub pi: PiMatrix,
    pub generators: InvariantGenerators,
    pub signs: Vec<i8>,
    kahler: Vec<Var>,
    d: usize,
    a: Vec<Vec<i64>>,
}

impl Phi {
    pub fn new(h: &HypertoricData) -> Result<Self, MultiplicativeError> {
        Phi::with_rule(h, SignRule::Parity)
    }

    pub fn with_rule(h: &HypertoricData, rule: SignRule) -> Result<Self, MultiplicativeError> {
        let pi = pi_matrix(h)?;
        let generators = invariant_generators(&pi)?;
        let signs = (0..h.d)
            .map(|i| {
                let total: i64 = (0..pi.n()).map(|j| pi.entry(j, i).abs()).sum();
                match rule {
                    SignRule::Parity if total % 2 == 0 => 1,
                    SignRule::Parity => -1,
                    SignRule::Signum if total == 0 => 1,
                    SignRule::Signum => -1,
                }
            })
            .collect();
        let a = (0..pi.n())
            .map(|j| (0..h.d).map(|i| pi.entry(j, i)).collect())
            .collect();
        Ok(Phi {
            pi,
            generators,
            signs,
            kahler: h.kahler.clone(),
            d: h.d,
            a,
        })
    }

    /// Negates the sign attached to `φ(𝐮_i)` (1-based `i`).
    pub fn perturb_sign(&mut self, i: usize) {
        self.signs[i - 1] = -self.signs[i - 1];
    }

    /// `t_j` in the relation ring: free for `j ≤ d`, otherwise
    /// `(−1)^{σ_j+1} q_j ∏_i (1+t_i)^{a_{ji}} − 1`.
    pub fn t(&self, j: usize) -> RationalFn {
        if j <= self.d {
            return RationalFn::var(t_var(j));
        }
        let row = &self.a[j - 1];
        let sigma: i64 = row.iter().sum();
        let sign = if sigma.rem_euclid(2) == 0 { -1 } else { 1 };
        let mut out =
            &RationalFn::int(sign) * &RationalFn::var(self.kahler[j - 1 - self.d].clone());
        for (i, &e) in row.iter().enumerate() {
            let base = &RationalFn::one() + &RationalFn::var(t_var(i + 1));
            out = &out * &base.pow(e).expect("1 + t_i is nonzero");
        }
        &out - &RationalFn::one()
    }

    /// Rewrites a monomial in `z, w` whose `z_j` and `w_j` exponents agree as a function of `t`.
    pub fn reduce(&self, m: &Monomial) -> Result<RationalFn, MultiplicativeError> {
        let mut out = RationalFn::one();
        for j in 1..=self.pi.n() {
            let ez = m.exponent(&z_small(j));
            let ew = m.exponent(&w_small(j));
            if ez != ew {
                return Err(MultiplicativeError::NotReducible(m.to_string()));
            }
            if ez != 0 {
                out = &out * &self.t(j).pow(ez)?;
            }
        }
        Ok(out)
    }

    fn parse(name: &str, prefix: char) -> Option<usize> {
        name.strip_prefix(prefix)?.parse().ok()
    }

    fn apply_term(
        &self,
        m: &Monomial,
        c: &num_rational::BigRational,
    ) -> Result<RationalFn, MultiplicativeError> {
        let mut zw = Monomial::one();
        let mut sign: i64 = 1;
        let mut rest = RationalFn::constant(c.clone());
        for (v, e) in m.iter().map(|(v, e)| (v, *e)) {
            let name = v.name();
            let in_range = |i: usize| (1..=self.d).contains(&i);
            if let Some(i) = Phi::parse(name, 'u').filter(|&i| in_range(i)) {
                zw = zw.mul(&self.generators.bold_z[i - 1].pow(e));
                if self.signs[i - 1] < 0 && e.rem_euclid(2) == 1 {
                    sign = -sign;
                }
            } else if let Some(i) = Phi::parse(name, 'v').filter(|&i| in_range(i)) {
                zw = zw.mul(&self.generators.bold_w[i - 1].pow(e));
            } else if let Some(i) = Phi::parse(name, 'Z').filter(|&i| in_range(i)) {
                let image = &RationalFn::int(-1) - &RationalFn::var(t_var(i));
                rest = &rest * &image.pow(e)?;
            } else if self.kahler.contains(v) {
                rest = &rest * &RationalFn::monomial(&Monomial::var_pow(v.clone(), e));
            } else {
                return Err(MultiplicativeError::UnknownVariable(name.to_string()));
            }
        }
        let reduced = self.reduce(&zw)?;
        Ok(&(&RationalFn::int(sign) * &rest) * &reduced)
    }

    /// `φ` on a Laurent polynomial in `u_i, v_i, Z_i` and the Kähler variables.
    pub fn apply(&self, expr: &LaurentPoly) -> Result<RationalFn, MultiplicativeError> {
        let mut out = RationalFn::zero();
        for (m, c) in expr.terms() {
            out = &out + &self.apply_term(m, c)?;
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiEquation {
    /// 1-based coordinate.
    pub i: usize,
    pub lhs: RationalFn,
    pub rhs: RationalFn,
    pub residual: RationalFn,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiReport {
    pub equations: Vec<PhiEquation>,
    /// `φ(1+𝐙_ℓ) + t_ℓ` for every hyperplane (1-based `ℓ`).
    pub cancellations: Vec<(usize, RationalFn)>,
}

impl PhiReport {
    pub fn passed(&self) -> bool {
        self.equations.iter().all(|e| e.residual.is_zero())
            && self.cancellations.iter().all(|(_, r)| r.is_zero())
    }
}

pub fn verify_phi(h: &HypertoricData) -> Result<PhiReport, MultiplicativeError> {
    verify_phi_with(h, &Phi::new(h)?)
}

pub fn verify_phi_with(h: &HypertoricData, phi: &Phi) -> Result<PhiReport, MultiplicativeError> {
    let mut equations = Vec::with_capacity(h.d);
    for i in 1..=h.d {
        let uv = LaurentPoly::monomial(Monomial::var(u_var(i)).mul(&Monomial::var(v_var(i))));
        let lhs = phi.apply(&uv)?;
        let rhs = j_collection(h, i)
            .into_iter()
            .try_fold(RationalFn::one(), |acc, k| {
                phi.apply(&wall_factor(h, k)).map(|f| &acc * &f)
            })?;
        let residual = &lhs - &rhs;
        equations.push(PhiEquation {
            i,
            lhs,
            rhs,
            residual,
        });
    }
    let mut cancellations = Vec::with_capacity(h.n);
    for k in 0..h.n {
        let image = phi.apply(&wall_factor(h, k))?;
        cancellations.push((k + 1, &image + &phi.t(k + 1)));
    }
    Ok(PhiReport {
        equations,
        cancellations,
    })
}

/// `bz_i = 𝐳_i`, `bw_i = 𝐰_i`, `t_j = z_j w_j`:
/// `∏ 𝐳_i^{bold_z[i]} 𝐰_i^{bold_w[i]} ∏_j (z_j w_j)^{pairs[j]}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantDecomposition {
    pub bold_z: Vec<i64>,
    pub bold_w: Vec<i64>,
    pub pairs: Vec<i64>,
}

impl InvariantDecomposition {
    pub fn expand(&self, gens: &InvariantGenerators) -> Monomial {
        let mut m = Monomial::one();
        for (i, &e) in self.bold_z.iter().enumerate() {
            m = m.mul(&gens.bold_z[i].pow(e));
        }
        for (i, &e) in self.bold_w.iter().enumerate() {
            m = m.mul(&gens.bold_w[i].pow(e));
        }
        for (j, &e) in self.pairs.iter().enumerate() {
            m = m.mul(&Monomial::from_pairs([
                (z_small(j + 1), e),
                (w_small(j + 1), e),
            ]));
        }
        m
    }
}

impl fmt::Display for InvariantDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        let mut push = |name: String, e: i64| match e {
            0 => {}
            1 => parts.push(name),
            _ => parts.push(format!("{name}^{e}")),
        };
        for (i, &e) in self.bold_z.iter().enumerate() {
            push(format!("bz{}", i + 1), e);
        }
        for (i, &e) in self.bold_w.iter().enumerate() {
            push(format!("bw{}", i + 1), e);
        }
        for (j, &e) in self.pairs.iter().enumerate() {
            push(format!("t{}", j + 1), e);
        }
        if parts.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&parts.join("*"))
        }
    }
}

/// Factors an invariant monomial in `z, w` through the generators, or returns the character
/// functional that detects non-invariance.
pub fn decompose_invariant(
    pi: &PiMatrix,
    m: &Monomial,
) -> Result<InvariantDecomposition, MultiplicativeError> {
    pi.require_tu()?;
    let (n, d) = (pi.n(), pi.d());
    let diff: Vec<BigInt> = (1..=n)
        .map(|j| BigInt::from(m.exponent(&z_small(j)) - m.exponent(&w_small(j))))
        .collect();
    let kernel = pi.entries.transpose().kernel_lattice();
    for iota in &kernel.basis {
        let pairing: BigInt = iota.iter().zip(&diff).map(|(a, b)| a * b).sum();
        if !pairing.is_zero() {
            return Err(MultiplicativeError::NotInvariant {
                functional: iota.clone(),
                pairing,
            });
        }
    }
    let x = pi
        .entries
        .solve_integer(&diff)
        .ok_or_else(|| MultiplicativeError::NotInvariant {
            functional: Vec::new(),
            pairing: BigInt::zero(),
        })?;
    let x: Vec<i64> = x
        .iter()
        .map(|v| v.to_i64().expect("small exponent"))
        .collect();
    let gens = invariant_generators(pi)?;
    let mut out = InvariantDecomposition {
        bold_z: x.iter().map(|&v| v.max(0)).collect(),
        bold_w: x.iter().map(|&v| (-v).max(0)).collect(),
        pairs: vec![0; n],
    };
    let peeled = m.div(&out.expand(&gens));
    for j in 0..n {
        out.pairs[j] = peeled.exponent(&z_small(j + 1));
    }
    debug_assert_eq!(out.bold_z.len(), d);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::{load_and_normalize, RawData};
    use crate::linalg::{int, rat};

    fn data(d: usize, u: &[&[i64]], lr: &[i64]) -> HypertoricData {
        load_and_normalize(&RawData::new(
            d,
            u.iter()
                .map(|v| v.iter().map(|&x| int(x)).collect())
                .collect(),
            lr.iter().map(|&x| rat(x, 1)).collect(),
            lr.iter().map(|&x| rat(x, 1)).collect(),
        ))
        .unwrap()
    }

    fn tp1() -> HypertoricData {
        data(1, &[&[1], &[-1]], &[0, 1])
    }

    fn tp2() -> HypertoricData {
        data(2, &[&[1, 0], &[0, 1], &[-1, -1]], &[0, 0, 1])
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn pi_of_examples() {
        let p = pi_matrix(&tp1()).unwrap();
        assert!(p.totally_unimodular);
        assert_eq!(p.entries.column(0), ints(&[1, -1]));
        let p = pi_matrix(&tp2()).unwrap();
        assert!(p.totally_unimodular);
        assert_eq!(
            p.entries.to_rows(),
            vec![ints(&[1, 0]), ints(&[0, 1]), ints(&[-1, -1])]
        );
    }

    #[test]
    fn non_tu_witness() {
        let p = PiMatrix::from_rows(&[ints(&[1, 0]), ints(&[1, 2])]).unwrap();
        assert!(!p.totally_unimodular);
        assert_eq!(p.witness.as_ref().unwrap().2, int(2));
        assert!(invariant_generators(&p).is_err());
    }

    #[test]
    fn generators_follow_sign_rule() {
        let g = invariant_generators(&pi_matrix(&tp1()).unwrap()).unwrap();
        assert_eq!(g.bold_z[0].to_string(), "w2*z1");
        assert_eq!(g.bold_w[0].to_string(), "w1*z2");
        let g = invariant_generators(&pi_matrix(&tp2()).unwrap()).unwrap();
        assert_eq!(
            g.bold_z[1],
            Monomial::from_pairs([(z_small(2), 1), (w_small(3), 1)])
        );
        assert_eq!(
            g.bold_w[1],
            Monomial::from_pairs([(w_small(2), 1), (z_small(3), 1)])
        );
        let id = PiMatrix::from_rows(&[ints(&[1, 0]), ints(&[0, 1])]).unwrap();
        let g = invariant_generators(&id).unwrap();
        assert_eq!(g.bold_z[0], Monomial::var(z_small(1)));
        assert_eq!(g.bold_w[1], Monomial::var(w_small(2)));
    }

    #[test]
    fn key_cancellation_on_cotangent_line() {
        let h = tp1();
        let phi = Phi::new(&h).unwrap();
        let image = phi.apply(&wall_factor(&h, 1)).unwrap();
        // 1 + q2 (−1 − t1)^{-1}, and 1 + t2 = q2 / (1 + t1).
        let t1 = RationalFn::var(t_var(1));
        let q = RationalFn::var(Var::new("q2"));
        let by_hand = &RationalFn::one() + &(&q / &(&RationalFn::int(-1) - &t1));
        assert_eq!(image, by_hand);
        let t2 = &(&q / &(&RationalFn::one() + &t1)) - &RationalFn::one();
        assert_eq!(phi.t(2), t2);
        assert_eq!(image, -t2);
    }

    #[test]
    fn product_of_generators_is_t1_t2() {
        let h = tp1();
        let phi = Phi::new(&h).unwrap();
        let uv = LaurentPoly::monomial(Monomial::var(u_var(1)).mul(&Monomial::var(v_var(1))));
        assert_eq!(phi.apply(&uv).unwrap(), &phi.t(1) * &phi.t(2));
        assert!(phi.apply(&LaurentPoly::var(u_var(1))).is_err());
    }

    #[test]
    fn verify_on_examples() {
        for h in [tp1(), tp2(), data(1, &[&[1], &[1], &[1]], &[0, 1, 2])] {
            let report = verify_phi(&h).unwrap();
            assert!(report.passed(), "{report:?}");
        }
    }

    #[test]
    fn square_case_is_trivially_exact() {
        let h = data(2, &[&[1, 0], &[0, 1]], &[0, 0]);
        let report = verify_phi(&h).unwrap();
        assert!(report.passed());
        assert_eq!(report.equations[0].rhs, -RationalFn::var(t_var(1)));
    }

    #[test]
    fn perturbed_sign_breaks_identity() {
        let h = tp2();
        let mut phi = Phi::new(&h).unwrap();
        phi.perturb_sign(1);
        assert!(!verify_phi_with(&h, &phi).unwrap().passed());
        let signum = Phi::with_rule(&tp1(), SignRule::Signum).unwrap();
        assert!(!verify_phi_with(&tp1(), &signum).unwrap().passed());
    }

    #[test]
    fn decompositions() {
        let pi = pi_matrix(&tp1()).unwrap();
        let gens = invariant_generators(&pi).unwrap();
        let m = Monomial::from_pairs([(z_small(1), 1), (w_small(2), 1)]);
        let dec = decompose_invariant(&pi, &m).unwrap();
        assert_eq!(dec.to_string(), "bz1");
        assert_eq!(dec.expand(&gens), m);
        let m = Monomial::from_pairs([(z_small(1), 1), (w_small(1), 1)]);
        assert_eq!(decompose_invariant(&pi, &m).unwrap().to_string(), "t1");
        let err = decompose_invariant(&pi, &Monomial::var(z_small(1))).unwrap_err();
        assert_eq!(
            err,
            MultiplicativeError::NotInvariant {
                functional: ints(&[1, 1]),
                pairing: int(1)
            }
        );
    }
}
