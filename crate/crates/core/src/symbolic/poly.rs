use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{Monomial, Var};

/// Finite ℚ-linear combination of Laurent monomials. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentPoly {
    terms: BTreeMap<Monomial, BigRational>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::term(Monomial::one(), c)
    }

    pub fn int(c: i64) -> Self {
        Self::constant(BigRational::from_integer(c.into()))
    }

    pub fn var(v: impl Into<Var>) -> Self {
        Self::term(Monomial::var(v.into()), BigRational::one())
    }

    pub fn monomial(m: Monomial) -> Self {
        Self::term(m, BigRational::one())
    }

    pub fn term(m: Monomial, c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Self { terms }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, BigRational)>) -> Self {
        let mut p = Self::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// Terms in ascending monomial order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(One::is_one)
    }

    pub fn as_constant(&self) -> Option<&BigRational> {
        match self.terms.len() {
            0 => None,
            1 => self.terms.get(&Monomial::one()),
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.is_zero() || self.as_constant().is_some()
    }

    /// The single term of a monomial-times-scalar, if that is what this is.
    pub fn as_term(&self) -> Option<(&Monomial, &BigRational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    pub fn coefficient(&self, m: &Monomial) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.terms
            .keys()
            .flat_map(|m| m.iter().map(|(v, _)| v.clone()))
            .collect()
    }

    pub fn contains_var(&self, v: &Var) -> bool {
        self.terms.keys().any(|m| m.exponent(v) != 0)
    }

    pub fn is_polynomial(&self) -> bool {
        self.terms.keys().all(Monomial::is_polynomial)
    }

    /// Exponentwise minimum over all terms (absent variables count as 0).
    pub fn min_monomial(&self) -> Monomial {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return Monomial::one();
        };
        it.fold(first.clone(), |acc, m| acc.meet(m))
    }

    pub fn degree_in(&self, v: &Var) -> i64 {
        self.terms.keys().map(|m| m.exponent(v)).max().unwrap_or(0)
    }

    /// Coefficients with respect to `v`, each free of `v`.
    pub fn coefficients_in(&self, v: &Var) -> BTreeMap<i64, LaurentPoly> {
        let mut out: BTreeMap<i64, LaurentPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.exponent(v))
                .or_default()
                .add_term(m.without(v), c.clone());
        }
        out
    }

    pub fn coefficient_in(&self, v: &Var, e: i64) -> LaurentPoly {
        LaurentPoly::from_terms(
            self.terms
                .iter()
                .filter(|(m, _)| m.exponent(v) == e)
                .map(|(m, c)| (m.without(v), c.clone())),
        )
    }

    pub fn scale(&self, c: &BigRational) -> LaurentPoly {
        if c.is_zero() {
            return LaurentPoly::zero();
        }
        LaurentPoly {
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> LaurentPoly {
        LaurentPoly {
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.mul(m), c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, k: u32) -> LaurentPoly {
        if let Some((m, c)) = self.as_term() {
            return LaurentPoly::term(m.pow(k as i64), num_traits::pow(c.clone(), k as usize));
        }
        let mut out = LaurentPoly::one();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                out = &out * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        out
    }

    pub fn derivative(&self, v: &Var) -> LaurentPoly {
        LaurentPoly::from_terms(self.terms.iter().filter_map(|(m, c)| {
            let e = m.exponent(v);
            (e != 0).then(|| {
                (
                    m.mul(&Monomial::var_pow(v.clone(), -1)),
                    c * BigRational::from_integer(e.into()),
                )
            })
        }))
    }

    /// Replaces variables by rational constants where bound; others are kept.
    pub fn eval_partial(&self, values: &BTreeMap<Var, BigRational>) -> LaurentPoly {
        LaurentPoly::from_terms(self.terms.iter().map(|(m, c)| {
            let mut coeff = c.clone();
            let mut rest = Vec::new();
            for (v, e) in m.iter() {
                match values.get(v) {
                    Some(x) => {
                        let p = num_traits::pow(x.clone(), e.unsigned_abs() as usize);
                        coeff *= if *e < 0 { p.recip() } else { p };
                    }
                    None => rest.push((v.clone(), *e)),
                }
            }
            (Monomial::from_pairs(rest), coeff)
        }))
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for LaurentPoly {
            type Output = LaurentPoly;
            fn $f(self, rhs: LaurentPoly) -> LaurentPoly {
                (&self).$f(&rhs)
            }
        }
        impl $tr<&LaurentPoly> for LaurentPoly {
            type Output = LaurentPoly;
            fn $f(self, rhs: &LaurentPoly) -> LaurentPoly {
                (&self).$f(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -&self
    }
}

pub(crate) fn fmt_rational(c: &BigRational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

/// Descending monomial order, e.g. `Z1^2 - 1/2*Z1 + 3`.
impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            let abs = c.abs();
            match (i, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if m.is_one() {
                f.write_str(&fmt_rational(&abs))?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{}*{m}", fmt_rational(&abs))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(terms: &[(i64, &[(&str, i64)])]) -> LaurentPoly {
        LaurentPoly::from_terms(terms.iter().map(|(c, m)| {
            (
                Monomial::from_pairs(m.iter().map(|&(v, e)| (Var::new(v), e))),
                BigRational::from_integer((*c).into()),
            )
        }))
    }

    #[test]
    fn zero_coefficients_vanish() {
        let a = p(&[(1, &[("x", 1)]), (1, &[])]);
        let b = p(&[(-1, &[("x", 1)])]);
        assert_eq!(&a + &b, LaurentPoly::one());
        assert!((&a - &a).is_zero());
    }

    #[test]
    fn laurent_product_cancels() {
        let a = p(&[(1, &[("Z", 1)]), (1, &[])]);
        let b = p(&[(1, &[("Z", -1)])]);
        assert_eq!(&a * &b, p(&[(1, &[]), (1, &[("Z", -1)])]));
    }

    #[test]
    fn display_is_descending() {
        let a = p(&[(1, &[]), (-2, &[("x", 1)]), (1, &[("x", 2)])]);
        assert_eq!(a.to_string(), "x^2 - 2*x + 1");
        assert_eq!(LaurentPoly::zero().to_string(), "0");
    }

    #[test]
    fn derivative_of_laurent_terms() {
        let a = p(&[(1, &[("x", 2), ("y", 1)]), (3, &[("x", -1)])]);
        assert_eq!(
            a.derivative(&Var::new("x")),
            p(&[(2, &[("x", 1), ("y", 1)]), (-3, &[("x", -2)])])
        );
    }

    fn arb_poly() -> impl Strategy<Value = LaurentPoly> {
        prop::collection::vec((-3i64..=3, -2i64..=2, -2i64..=2, -1i64..=1), 0..5).prop_map(|ts| {
            LaurentPoly::from_terms(ts.into_iter().map(|(c, a, b, q)| {
                (
                    Monomial::from_pairs([
                        (Var::new("x"), a),
                        (Var::new("y"), b),
                        (Var::new("q"), q),
                    ]),
                    BigRational::from_integer(c.into()),
                )
            }))
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a + &b) - &b, a.clone());
            prop_assert_eq!(a.pow(3), &(&a * &a) * &a);
        }

        #[test]
        fn leibniz_rule(a in arb_poly(), b in arb_poly()) {
            let x = Var::new("x");
            prop_assert_eq!(
                (&a * &b).derivative(&x),
                &(&a.derivative(&x) * &b) + &(&a * &b.derivative(&x))
            );
        }
    }
}
