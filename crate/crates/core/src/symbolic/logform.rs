use std::collections::BTreeMap;
use std::fmt;

use super::{RationalFn, SymbolicError, Var};

/// A logarithmic differential form `Σ f_I · dlog x_{i₁} ∧ … ∧ dlog x_{i_p}` with each
/// index tuple stored sorted and the permutation sign folded into its coefficient.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LogForm {
    degree: usize,
    terms: BTreeMap<Vec<Var>, RationalFn>,
}

impl LogForm {
    pub fn zero(degree: usize) -> Self {
        LogForm {
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(f: RationalFn) -> Self {
        let mut terms = BTreeMap::new();
        if !f.is_zero() {
            terms.insert(Vec::new(), f);
        }
        LogForm { degree: 0, terms }
    }

    /// `dlog v`
    pub fn basis(v: Var) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![v], RationalFn::one());
        LogForm { degree: 1, terms }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<Var>, &RationalFn)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, vars: &[Var]) -> RationalFn {
        let mut key = vars.to_vec();
        let Some(sign) = sort_with_sign(&mut key) else {
            return RationalFn::zero();
        };
        let c = self
            .terms
            .get(&key)
            .cloned()
            .unwrap_or_else(RationalFn::zero);
        if sign < 0 {
            -c
        } else {
            c
        }
    }

    fn add_term(&mut self, key: Vec<Var>, c: RationalFn) {
        if c.is_zero() {
            return;
        }
        let sum = match self.terms.remove(&key) {
            Some(old) => &old + &c,
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(key, sum);
        }
    }

    pub fn add(&self, other: &LogForm) -> LogForm {
        assert_eq!(
            self.degree, other.degree,
            "adding forms of different degree"
        );
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &LogForm) -> LogForm {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> LogForm {
        self.scale(&RationalFn::int(-1))
    }

    pub fn scale(&self, f: &RationalFn) -> LogForm {
        let mut out = LogForm::zero(self.degree);
        for (k, c) in &self.terms {
            out.add_term(k.clone(), c * f);
        }
        out
    }

    pub fn wedge(&self, other: &LogForm) -> LogForm {
        let mut out = LogForm::zero(self.degree + other.degree);
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let mut key: Vec<Var> = ka.iter().chain(kb).cloned().collect();
                let Some(sign) = sort_with_sign(&mut key) else {
                    continue;
                };
                let c = ca * cb;
                out.add_term(key, if sign < 0 { -c } else { c });
            }
        }
        out
    }

    pub fn wedge_all<'a>(forms: impl IntoIterator<Item = &'a LogForm>) -> LogForm {
        forms
            .into_iter()
            .fold(LogForm::scalar(RationalFn::one()), |acc, f| acc.wedge(f))
    }
}

/// Sorts in place and returns the permutation sign, or `None` on a repeated entry.
fn sort_with_sign(key: &mut [Var]) -> Option<i32> {
    let mut sign = 1;
    for i in 1..key.len() {
        let mut j = i;
        while j > 0 && key[j - 1] > key[j] {
            key.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
        if j > 0 && key[j - 1] == key[j] {
            return None;
        }
    }
    if key.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some(sign)
}

/// `dlog f` over the coordinate variables `coords`; every other symbol is a constant.
/// The coefficient of `dlog x` is `x·∂f/∂x / f`.
pub fn dlog(f: &RationalFn, coords: &[Var]) -> Result<LogForm, SymbolicError> {
    if f.is_zero() {
        return Err(SymbolicError::LogOfZero);
    }
    let mut out = LogForm::zero(1);
    let num = RationalFn::from_poly(f.numer().clone());
    let den = RationalFn::from_poly(f.denom().clone());
    for x in coords {
        let xv = RationalFn::var(x.clone());
        let mut coeff = RationalFn::zero();
        if f.numer().contains_var(x) {
            coeff = &coeff + &(&(&xv * &num.derivative(x)) / &num);
        }
        if f.denom().contains_var(x) {
            coeff = &coeff - &(&(&xv * &den.derivative(x)) / &den);
        }
        out.add_term(vec![x.clone()], coeff);
    }
    Ok(out)
}

impl fmt::Display for LogForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (k, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({c})")?;
            for v in k {
                write!(f, "*dlog({v})")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::{LaurentPoly, Monomial};
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn v(s: &str) -> RationalFn {
        RationalFn::var(s)
    }
    fn var(s: &str) -> Var {
        Var::new(s)
    }

    #[test]
    fn dlog_of_monomial() {
        let f = &v("Z1") * &(&v("Z2") * &v("Z2"));
        let coords = [var("Z1"), var("Z2")];
        let expected =
            LogForm::basis(var("Z1")).add(&LogForm::basis(var("Z2")).scale(&RationalFn::int(2)));
        assert_eq!(dlog(&f, &coords).unwrap(), expected);
    }

    #[test]
    fn dlog_of_one_plus_z() {
        let z = v("Z");
        let f = &RationalFn::one() + &z;
        let expected = LogForm::basis(var("Z")).scale(&(&z / &f));
        assert_eq!(dlog(&f, &[var("Z")]).unwrap(), expected);
    }

    #[test]
    fn parameters_are_constants() {
        let f = &v("q") / &(&v("Z1") * &v("Z2"));
        let expected = LogForm::basis(var("Z1"))
            .add(&LogForm::basis(var("Z2")))
            .neg();
        assert_eq!(dlog(&f, &[var("Z1"), var("Z2")]).unwrap(), expected);
        assert_eq!(
            dlog(&RationalFn::zero(), &[]),
            Err(SymbolicError::LogOfZero)
        );
    }

    #[test]
    fn wedge_is_antisymmetric() {
        let du = LogForm::basis(var("u"));
        let dz = LogForm::basis(var("Z"));
        assert!(dz.wedge(&dz).is_zero());
        assert_eq!(du.wedge(&dz), dz.wedge(&du).neg());
        let f = v("f");
        let g = v("g");
        let a = LogForm::basis(var("Z1")).scale(&f);
        let b = LogForm::basis(var("Z2")).scale(&g);
        assert_eq!(a.wedge(&b).coefficient(&[var("Z1"), var("Z2")]), &f * &g);
        assert_eq!(a.wedge(&b).coefficient(&[var("Z2"), var("Z1")]), -(&f * &g));
    }

    fn arb_rf() -> impl Strategy<Value = RationalFn> {
        let poly =
            prop::collection::vec((1i64..=3, -1i64..=2, 0i64..=1, 0i64..=1), 1..3).prop_map(|ts| {
                LaurentPoly::from_terms(ts.into_iter().map(|(k, a, b, q)| {
                    (
                        Monomial::from_pairs([(var("x"), a), (var("y"), b), (var("q"), q)]),
                        BigRational::from_integer(k.into()),
                    )
                }))
            });
        (poly.clone(), poly).prop_filter_map("nonzero", |(n, d)| {
            RationalFn::new(n, d).ok().filter(|f| !f.is_zero())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn dlog_is_a_homomorphism(f in arb_rf(), g in arb_rf()) {
            let coords = [var("x"), var("y")];
            let lhs = dlog(&(&f * &g), &coords).unwrap();
            let rhs = dlog(&f, &coords).unwrap().add(&dlog(&g, &coords).unwrap());
            prop_assert!(lhs.sub(&rhs).is_zero());
        }

        #[test]
        fn forms_in_a_small_span_wedge_to_zero(fs in prop::collection::vec((arb_rf(), arb_rf()), 3)) {
            let forms: Vec<LogForm> = fs
                .iter()
                .map(|(a, b)| LogForm::basis(var("x")).scale(a).add(&LogForm::basis(var("y")).scale(b)))
                .collect();
            prop_assert!(LogForm::wedge_all(&forms).is_zero());
        }
    }
}
