use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::gcd::{exact_div, poly_gcd};
use super::{LaurentPoly, Monomial, SymbolicError, Var};

/// Quotient of polynomials in canonical form: numerator and denominator have
/// nonnegative exponents, no common factor (monomial or otherwise), and the denominator's
/// leading coefficient is 1. Two rational functions are equal iff their forms coincide.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalFn {
    num: LaurentPoly,
    den: LaurentPoly,
}

/// A scalar in ℚ(q): a rational function whose variables are Kähler parameters.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ParamScalar(pub RationalFn);

impl ParamScalar {
    pub fn one() -> Self {
        ParamScalar(RationalFn::one())
    }

    pub fn param(name: &str) -> Self {
        ParamScalar(RationalFn::var(name))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl fmt::Display for ParamScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl RationalFn {
    pub fn new(num: LaurentPoly, den: LaurentPoly) -> Result<Self, SymbolicError> {
        if den.is_zero() {
            return Err(SymbolicError::ZeroDenominator);
        }
        Ok(Self::normalize(num, den))
    }

    pub fn zero() -> Self {
        RationalFn {
            num: LaurentPoly::zero(),
            den: LaurentPoly::one(),
        }
    }

    pub fn one() -> Self {
        RationalFn::from_poly(LaurentPoly::one())
    }

    pub fn int(v: i64) -> Self {
        RationalFn::from_poly(LaurentPoly::int(v))
    }

    pub fn constant(c: BigRational) -> Self {
        RationalFn::from_poly(LaurentPoly::constant(c))
    }

    pub fn var(v: impl Into<Var>) -> Self {
        RationalFn::from_poly(LaurentPoly::var(v))
    }

    pub fn monomial(m: &Monomial) -> Self {
        RationalFn::from_poly(LaurentPoly::monomial(m.clone()))
    }

    pub fn from_poly(p: LaurentPoly) -> Self {
        Self::normalize(p, LaurentPoly::one())
    }

    pub fn numer(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn denom(&self) -> &LaurentPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn as_constant(&self) -> Option<&BigRational> {
        if self.den.is_one() {
            if self.num.is_zero() {
                return None;
            }
            self.num.as_constant()
        } else {
            None
        }
    }

    /// Laurent polynomial form when the denominator is a monomial.
    pub fn as_laurent(&self) -> Option<LaurentPoly> {
        let (m, c) = self.den.as_term()?;
        Some(self.num.mul_monomial(&m.inv()).scale(&c.recip()))
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut v = self.num.vars();
        v.extend(self.den.vars());
        v
    }

    /// The canonical representative of `num / den`; `den` must be nonzero.
    pub fn normalize(num: LaurentPoly, den: LaurentPoly) -> Self {
        assert!(!den.is_zero(), "normalize called with zero denominator");
        if num.is_zero() {
            return RationalFn::zero();
        }
        let mn = num.min_monomial();
        let md = den.min_monomial();
        let mut n = num.mul_monomial(&mn.inv());
        let mut d = den.mul_monomial(&md.inv());
        let (pos, neg) = mn.div(&md).split();
        if let Some(c) = d.as_constant().cloned() {
            n = n.scale(&c.recip());
            d = LaurentPoly::one();
        } else {
            let g = poly_gcd(&n, &d);
            if !g.is_one() {
                n = exact_div(&n, &g).expect("gcd divides numerator");
                d = exact_div(&d, &g).expect("gcd divides denominator");
            }
        }
        n = n.mul_monomial(&pos);
        d = d.mul_monomial(&neg);
        let lc = d
            .leading_term()
            .map(|(_, c)| c.clone())
            .expect("nonzero denominator");
        if !lc.is_one() {
            let inv = lc.recip();
            n = n.scale(&inv);
            d = d.scale(&inv);
        }
        RationalFn { num: n, den: d }
    }

    pub fn inv(&self) -> Result<Self, SymbolicError> {
        RationalFn::new(self.den.clone(), self.num.clone())
    }

    pub fn pow(&self, k: i64) -> Result<Self, SymbolicError> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let e = k.unsigned_abs() as u32;
        Ok(RationalFn {
            num: base.num.pow(e),
            den: base.den.pow(e),
        })
    }

    pub fn checked_div(&self, rhs: &RationalFn) -> Result<Self, SymbolicError> {
        if rhs.is_zero() {
            return Err(SymbolicError::ZeroDenominator);
        }
        Ok(RationalFn::normalize(
            &self.num * &rhs.den,
            &self.den * &rhs.num,
        ))
    }

    pub fn derivative(&self, v: &Var) -> RationalFn {
        let n = &(&self.num.derivative(v) * &self.den) - &(&self.num * &self.den.derivative(v));
        RationalFn::normalize(n, &self.den * &self.den)
    }

    /// Composes with `binding`; unbound variables stay as they are.
    pub fn substitute(&self, binding: &BTreeMap<Var, RationalFn>) -> Result<Self, SymbolicError> {
        let mut cache: BTreeMap<(Var, i64), RationalFn> = BTreeMap::new();
        let n = substitute_poly(&self.num, binding, &mut cache)?;
        let d = substitute_poly(&self.den, binding, &mut cache)?;
        n.checked_div(&d)
    }

    /// Substitutes rational constants; unbound variables stay.
    pub fn eval_partial(&self, values: &BTreeMap<Var, BigRational>) -> Result<Self, SymbolicError> {
        RationalFn::new(self.num.eval_partial(values), self.den.eval_partial(values))
    }
}

fn substitute_poly(
    p: &LaurentPoly,
    binding: &BTreeMap<Var, RationalFn>,
    cache: &mut BTreeMap<(Var, i64), RationalFn>,
) -> Result<RationalFn, SymbolicError> {
    // accumulate as a single fraction over a running common denominator
    let mut acc_num = LaurentPoly::zero();
    let mut acc_den = LaurentPoly::one();
    for (m, c) in p.terms() {
        let mut factor = RationalFn::constant(c.clone());
        let mut kept = Vec::new();
        for (v, e) in m.iter() {
            match binding.get(v) {
                Some(val) => {
                    let key = (v.clone(), *e);
                    let pw = match cache.get(&key) {
                        Some(x) => x.clone(),
                        None => {
                            if *e < 0 && val.is_zero() {
                                return Err(SymbolicError::ZeroSubstitution(v.to_string()));
                            }
                            let x = val.pow(*e)?;
                            cache.insert(key, x.clone());
                            x
                        }
                    };
                    factor = &factor * &pw;
                }
                None => kept.push((v.clone(), *e)),
            }
        }
        let factor = &factor * &RationalFn::monomial(&Monomial::from_pairs(kept));
        if factor.den == acc_den {
            acc_num = &acc_num + &factor.num;
        } else {
            acc_num = &(&acc_num * &factor.den) + &(&factor.num * &acc_den);
            acc_den = &acc_den * &factor.den;
        }
    }
    Ok(RationalFn::normalize(acc_num, acc_den))
}

impl Add for &RationalFn {
    type Output = RationalFn;
    fn add(self, rhs: &RationalFn) -> RationalFn {
        if self.den == rhs.den {
            return RationalFn::normalize(&self.num + &rhs.num, self.den.clone());
        }
        RationalFn::normalize(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl Sub for &RationalFn {
    type Output = RationalFn;
    fn sub(self, rhs: &RationalFn) -> RationalFn {
        self + &(-rhs)
    }
}

impl Mul for &RationalFn {
    type Output = RationalFn;
    fn mul(self, rhs: &RationalFn) -> RationalFn {
        if self.is_zero() || rhs.is_zero() {
            return RationalFn::zero();
        }
        if self.den.is_one()
            && rhs.den.is_one()
            && (self.num.as_term().is_some() || rhs.num.as_term().is_some())
        {
            return RationalFn {
                num: &self.num * &rhs.num,
                den: LaurentPoly::one(),
            };
        }
        RationalFn::normalize(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

/// Panics on division by zero; use [`RationalFn::checked_div`] to handle it.
impl Div for &RationalFn {
    type Output = RationalFn;
    fn div(self, rhs: &RationalFn) -> RationalFn {
        self.checked_div(rhs)
            .expect("division by zero rational function")
    }
}

impl Neg for &RationalFn {
    type Output = RationalFn;
    fn neg(self) -> RationalFn {
        RationalFn {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for RationalFn {
            type Output = RationalFn;
            fn $f(self, rhs: RationalFn) -> RationalFn {
                (&self).$f(&rhs)
            }
        }
        impl $tr<&RationalFn> for RationalFn {
            type Output = RationalFn;
            fn $f(self, rhs: &RationalFn) -> RationalFn {
                (&self).$f(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for RationalFn {
    type Output = RationalFn;
    fn neg(self) -> RationalFn {
        -&self
    }
}

impl From<LaurentPoly> for RationalFn {
    fn from(p: LaurentPoly) -> Self {
        RationalFn::from_poly(p)
    }
}

impl Zero for RationalFn {
    fn zero() -> Self {
        RationalFn::zero()
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl One for RationalFn {
    fn one() -> Self {
        RationalFn::one()
    }
}

fn needs_parens(p: &LaurentPoly) -> bool {
    p.len() > 1
        || p.terms()
            .next()
            .is_some_and(|(m, c)| !m.is_one() && !c.is_one())
}

/// `num` when the denominator is 1, otherwise `(num)/(den)` with parentheses only where
/// needed.
impl fmt::Display for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        if self.num.len() > 1 {
            write!(f, "({})", self.num)?;
        } else {
            write!(f, "{}", self.num)?;
        }
        if needs_parens(&self.den) {
            write!(f, "/({})", self.den)
        } else {
            write!(f, "/{}", self.den)
        }
    }
}

impl fmt::Debug for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(name: &str) -> RationalFn {
        RationalFn::var(name)
    }
    fn c(k: i64) -> RationalFn {
        RationalFn::int(k)
    }

    #[test]
    fn cancels_common_factor() {
        let z = v("Z");
        let f = (&(&z * &z) - &c(1)) / (&z - &c(1));
        assert_eq!(f, &z + &c(1));
    }

    #[test]
    fn cancels_parameter() {
        let f = (&v("q") * &v("Z")) / v("q");
        assert_eq!(f, v("Z"));
    }

    #[test]
    fn clears_laurent_tail() {
        let z = v("Z");
        let f = &c(1) + &(&v("q") / &z);
        assert_eq!(
            f.numer(),
            &(&LaurentPoly::var("Z") + &LaurentPoly::var("q"))
        );
        assert_eq!(f.denom(), &LaurentPoly::var("Z"));
        assert_eq!(f.to_string(), "(Z + q)/Z");
    }

    #[test]
    fn zero_denominator_rejected() {
        assert_eq!(
            RationalFn::new(LaurentPoly::one(), LaurentPoly::zero()),
            Err(SymbolicError::ZeroDenominator)
        );
        assert!(v("x").checked_div(&RationalFn::zero()).is_err());
    }

    #[test]
    fn substitution_examples() {
        let (u, w, z) = (v("u"), v("w"), v("Z"));
        let one_z = &c(1) + &z;
        let mut b = BTreeMap::new();
        b.insert(Var::new("u"), &u / &one_z);
        b.insert(Var::new("w"), &w * &one_z);
        assert_eq!((&u * &w).substitute(&b).unwrap(), &u * &w);

        let mut b = BTreeMap::new();
        b.insert(Var::new("Z2"), &v("q") / &v("Z1"));
        let f = &c(1) + &v("Z2");
        assert_eq!(f.substitute(&b).unwrap(), (&v("Z1") + &v("q")) / v("Z1"));

        let mut b = BTreeMap::new();
        b.insert(Var::new("Z"), z.clone());
        assert_eq!(z.substitute(&b).unwrap(), z);
    }

    #[test]
    fn substitution_reports_zero_denominators() {
        let mut b = BTreeMap::new();
        b.insert(Var::new("x"), c(1) - v("y"));
        let f = c(1) / (c(1) - v("x"));
        assert_eq!(f.substitute(&b).unwrap(), c(1) / v("y"));
        b.insert(Var::new("x"), c(1));
        assert!(f.substitute(&b).is_err());
    }

    fn arb_rf() -> impl Strategy<Value = RationalFn> {
        let poly = prop::collection::vec((-3i64..=3, -1i64..=2, 0i64..=1, 0i64..=1), 1..4)
            .prop_map(|ts| {
                LaurentPoly::from_terms(ts.into_iter().map(|(k, a, b, q)| {
                    (
                        Monomial::from_pairs([
                            (Var::new("x"), a),
                            (Var::new("y"), b),
                            (Var::new("q"), q),
                        ]),
                        BigRational::from_integer(k.into()),
                    )
                }))
            });
        (poly.clone(), poly)
            .prop_filter_map("nonzero denominator", |(n, d)| RationalFn::new(n, d).ok())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn normalization_is_idempotent_and_canonical(f in arb_rf(), g in arb_rf()) {
            let again = RationalFn::normalize(f.numer().clone(), f.denom().clone());
            prop_assert_eq!(&again, &f);
            prop_assume!(!g.is_zero());
            // f = (f·g)/g regardless of the path
            prop_assert_eq!(&(&f * &g) / &g, f.clone());
            prop_assert_eq!(&(&f + &g) - &g, f.clone());
        }

        #[test]
        fn field_axioms(a in arb_rf(), b in arb_rf(), c in arb_rf()) {
            prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        }
    }
}
