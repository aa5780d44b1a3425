use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

/// A named variable. Ordering is by name with embedded integers compared numerically,
/// so `Z2 < Z10` and `x1_2 < x1_10`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Var(Arc<str>);

impl Var {
    pub fn new(name: impl AsRef<str>) -> Self {
        Var(Arc::from(name.as_ref()))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Var {
    fn from(s: &str) -> Self {
        Var::new(s)
    }
}

impl From<String> for Var {
    fn from(s: String) -> Self {
        Var::new(s)
    }
}

fn chunks(s: &str) -> impl Iterator<Item = (bool, &str)> {
    let bytes = s.as_bytes();
    let mut i = 0;
    std::iter::from_fn(move || {
        if i >= bytes.len() {
            return None;
        }
        let digit = bytes[i].is_ascii_digit();
        let start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() == digit {
            i += 1;
        }
        Some((digit, &s[start..i]))
    })
}

fn natural_cmp(a: &str, b: &str) -> Ordering {
    let mut ca = chunks(a);
    let mut cb = chunks(b);
    loop {
        match (ca.next(), cb.next()) {
            (None, None) => return a.cmp(b),
            (None, Some(_)) => return Ordering::Less,
            (Some(_), None) => return Ordering::Greater,
            (Some((true, x)), Some((true, y))) => {
                let x = x.trim_start_matches('0');
                let y = y.trim_start_matches('0');
                let ord = x.len().cmp(&y.len()).then_with(|| x.cmp(y));
                if ord != Ordering::Equal {
                    return ord;
                }
            }
            (Some((_, x)), Some((_, y))) => {
                let ord = x.cmp(y);
                if ord != Ordering::Equal {
                    return ord;
                }
            }
        }
    }
}

impl Ord for Var {
    fn cmp(&self, other: &Self) -> Ordering {
        natural_cmp(&self.0, &other.0)
    }
}

impl PartialOrd for Var {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Sparse Laurent monomial: variables sorted, exponents nonzero.
///
/// Ordered lexicographically: the smallest variable whose exponents differ decides, and
/// the larger exponent wins.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(Var, i64)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: Var) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn var_pow(v: Var, e: i64) -> Self {
        if e == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(v, e)])
        }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Var, i64)>) -> Self {
        let mut m = Monomial::one();
        for (v, e) in pairs {
            m = m.mul(&Monomial::var_pow(v, e));
        }
        m
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Var, i64)> {
        self.0.iter()
    }

    pub fn exponent(&self, v: &Var) -> i64 {
        self.0
            .binary_search_by(|(w, _)| w.cmp(v))
            .map_or(0, |i| self.0[i].1)
    }

    pub fn is_polynomial(&self) -> bool {
        self.0.iter().all(|(_, e)| *e > 0)
    }

    pub fn total_degree(&self) -> i64 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    fn merge(&self, other: &Monomial, f: impl Fn(i64, i64) -> i64) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() || j < other.0.len() {
            let ord = match (self.0.get(i), other.0.get(j)) {
                (Some(a), Some(b)) => a.0.cmp(&b.0),
                (Some(_), None) => Ordering::Less,
                _ => Ordering::Greater,
            };
            let (v, e) = match ord {
                Ordering::Less => {
                    i += 1;
                    (self.0[i - 1].0.clone(), f(self.0[i - 1].1, 0))
                }
                Ordering::Greater => {
                    j += 1;
                    (other.0[j - 1].0.clone(), f(0, other.0[j - 1].1))
                }
                Ordering::Equal => {
                    i += 1;
                    j += 1;
                    (
                        self.0[i - 1].0.clone(),
                        f(self.0[i - 1].1, other.0[j - 1].1),
                    )
                }
            };
            if e != 0 {
                out.push((v, e));
            }
        }
        Monomial(out)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        self.merge(other, |a, b| a + b)
    }

    pub fn div(&self, other: &Monomial) -> Monomial {
        self.merge(other, |a, b| a - b)
    }

    /// Exponentwise minimum, treating absent variables as exponent 0.
    pub fn meet(&self, other: &Monomial) -> Monomial {
        self.merge(other, i64::min)
    }

    pub fn join(&self, other: &Monomial) -> Monomial {
        self.merge(other, i64::max)
    }

    pub fn inv(&self) -> Monomial {
        Monomial(self.0.iter().map(|(v, e)| (v.clone(), -e)).collect())
    }

    pub fn pow(&self, k: i64) -> Monomial {
        if k == 0 {
            return Monomial::one();
        }
        Monomial(self.0.iter().map(|(v, e)| (v.clone(), e * k)).collect())
    }

    /// Splits into the positive-exponent and negative-exponent parts, both returned with
    /// nonnegative exponents: `self = pos / neg`.
    pub fn split(&self) -> (Monomial, Monomial) {
        let pos = self.0.iter().filter(|(_, e)| *e > 0).cloned().collect();
        let neg = self
            .0
            .iter()
            .filter(|(_, e)| *e < 0)
            .map(|(v, e)| (v.clone(), -e))
            .collect();
        (Monomial(pos), Monomial(neg))
    }

    /// Drops the given variable.
    pub fn without(&self, v: &Var) -> Monomial {
        Monomial(self.0.iter().filter(|(w, _)| w != v).cloned().collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        let (mut i, mut j) = (0, 0);
        loop {
            match (self.0.get(i), other.0.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some((_, e)), None) => return e.cmp(&0),
                (None, Some((_, e))) => return 0.cmp(e),
                (Some((va, ea)), Some((vb, eb))) => match va.cmp(vb) {
                    Ordering::Less => return ea.cmp(&0),
                    Ordering::Greater => return 0.cmp(eb),
                    Ordering::Equal => {
                        if ea != eb {
                            return ea.cmp(eb);
                        }
                        i += 1;
                        j += 1;
                    }
                },
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn write_factors(
    f: &mut fmt::Formatter<'_>,
    factors: &[(Var, i64)],
    first: &mut bool,
) -> fmt::Result {
    for (v, e) in factors {
        if !*first {
            f.write_str("*")?;
        }
        *first = false;
        if *e == 1 {
            write!(f, "{v}")?;
        } else {
            write!(f, "{v}^{e}")?;
        }
    }
    Ok(())
}

/// Positive exponents first, then negative ones, each group in variable order; `1` for the
/// empty monomial.
impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        let pos: Vec<_> = self.0.iter().filter(|(_, e)| *e > 0).cloned().collect();
        let neg: Vec<_> = self.0.iter().filter(|(_, e)| *e < 0).cloned().collect();
        let mut first = true;
        write_factors(f, &pos, &mut first)?;
        write_factors(f, &neg, &mut first)
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(pairs: &[(&str, i64)]) -> Monomial {
        Monomial::from_pairs(pairs.iter().map(|&(v, e)| (Var::new(v), e)))
    }

    #[test]
    fn natural_variable_order() {
        assert!(Var::new("Z2") < Var::new("Z10"));
        assert!(Var::new("Z1") < Var::new("q3"));
        assert!(Var::new("x1_2") < Var::new("x1_10"));
        assert!(Var::new("U1") < Var::new("Z1"));
    }

    #[test]
    fn display_groups_positive_before_negative() {
        assert_eq!(
            m(&[("Z1", -1), ("Z2", -1), ("q3", 1)]).to_string(),
            "q3*Z1^-1*Z2^-1"
        );
        assert_eq!(m(&[("u1", 1), ("v1", 1)]).to_string(), "u1*v1");
        assert_eq!(Monomial::one().to_string(), "1");
    }

    #[test]
    fn arithmetic_cancels_exponents() {
        let a = m(&[("x", 2), ("y", -1)]);
        let b = m(&[("x", -2), ("z", 3)]);
        assert_eq!(a.mul(&b), m(&[("y", -1), ("z", 3)]));
        assert!(a.mul(&a.inv()).is_one());
        assert_eq!(a.meet(&b), m(&[("x", -2), ("y", -1)]));
        assert_eq!(a.exponent(&Var::new("x")), 2);
    }

    #[test]
    fn lex_order_is_a_monomial_order_on_polynomials() {
        let x = m(&[("x", 1)]);
        let y2 = m(&[("y", 2)]);
        assert!(x > y2);
        assert!(y2 > Monomial::one());
        let w = m(&[("y", 1)]);
        assert_eq!(x.cmp(&y2), x.mul(&w).cmp(&y2.mul(&w)));
    }
}
