//! Multivariate polynomial gcd over ℚ by recursive primitive pseudo-remainder sequences.
//! Inputs must have nonnegative exponents.

use num_rational::BigRational;
use num_traits::Zero;

use super::{LaurentPoly, Monomial, Var};

/// Divides by the leading coefficient; zero stays zero.
pub(crate) fn monic(p: LaurentPoly) -> LaurentPoly {
    match p.leading_term() {
        Some((_, c)) => {
            let inv = c.recip();
            p.scale(&inv)
        }
        None => p,
    }
}

/// Exact quotient `a / b` when `b` divides `a` in the polynomial ring, else `None`.
pub fn exact_div(a: &LaurentPoly, b: &LaurentPoly) -> Option<LaurentPoly> {
    let (lm, lc) = b.leading_term()?;
    if let Some(c) = b.as_constant() {
        return Some(a.scale(&c.recip()));
    }
    let mut rem = a.clone();
    let mut quot = LaurentPoly::zero();
    while let Some((m, c)) = rem.leading_term() {
        let qm = m.div(lm);
        if !qm.is_polynomial() {
            return None;
        }
        let qc: BigRational = c / lc;
        let t = LaurentPoly::term(qm, qc);
        rem = &rem - &(&t * b);
        quot = &quot + &t;
    }
    Some(quot)
}

/// gcd of the coefficients of `p` viewed as a polynomial in `v`.
fn content_in(p: &LaurentPoly, v: &Var) -> LaurentPoly {
    let mut g = LaurentPoly::zero();
    for c in p.coefficients_in(v).into_values() {
        g = poly_gcd(&g, &c);
        if g.is_one() {
            break;
        }
    }
    g
}

fn primitive_part_in(p: &LaurentPoly, v: &Var) -> LaurentPoly {
    let c = content_in(p, v);
    if c.is_zero() {
        return p.clone();
    }
    // scaling to monic also keeps rational coefficients from growing along the sequence
    monic(exact_div(p, &c).expect("content divides its polynomial"))
}

fn pseudo_remainder(f: &LaurentPoly, g: &LaurentPoly, v: &Var) -> LaurentPoly {
    let dg = g.degree_in(v);
    let lcg = g.coefficient_in(v, dg);
    let mut r = f.clone();
    while !r.is_zero() && r.degree_in(v) >= dg {
        let dr = r.degree_in(v);
        let lcr = r.coefficient_in(v, dr);
        let shift = LaurentPoly::monomial(Monomial::var_pow(v.clone(), dr - dg));
        r = &(&r * &lcg) - &(&(&lcr * &shift) * g);
    }
    r
}

/// Dense univariate gcd over ℚ, coefficients in ascending degree.
fn dense_gcd(mut a: Vec<BigRational>, mut b: Vec<BigRational>) -> usize {
    fn trim(v: &mut Vec<BigRational>) {
        while v.last().is_some_and(Zero::is_zero) {
            v.pop();
        }
    }
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        while a.len() >= b.len() {
            let f = a.last().expect("nonempty") / b.last().expect("nonempty");
            let shift = a.len() - b.len();
            for (i, bi) in b.iter().enumerate() {
                let t = &f * bi;
                a[i + shift] -= t;
            }
            trim(&mut a);
            if a.is_empty() {
                break;
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}

/// Sound coprimality certificate: for each shared variable, specializing the others at a
/// point that keeps both leading coefficients alive gives coprime univariate images.
/// `false` means "not certified", not "not coprime".
fn certified_coprime(a: &LaurentPoly, b: &LaurentPoly) -> bool {
    let va = a.vars();
    let vb = b.vars();
    let all: Vec<Var> = va.union(&vb).cloned().collect();
    for v in va.intersection(&vb) {
        let mut ok = false;
        for attempt in 0..3i64 {
            let point: std::collections::BTreeMap<Var, BigRational> = all
                .iter()
                .filter(|w| *w != v)
                .enumerate()
                .map(|(i, w)| {
                    (
                        w.clone(),
                        BigRational::from_integer((2 + 3 * i as i64 + 7 * attempt).into()),
                    )
                })
                .collect();
            let ia = a.eval_partial(&point);
            let ib = b.eval_partial(&point);
            if ia.degree_in(v) != a.degree_in(v) || ib.degree_in(v) != b.degree_in(v) {
                continue;
            }
            let dense = |p: &LaurentPoly| {
                let mut out = vec![BigRational::zero(); p.degree_in(v) as usize + 1];
                for (m, c) in p.terms() {
                    out[m.exponent(v) as usize] += c;
                }
                out
            };
            if dense_gcd(dense(&ia), dense(&ib)) == 0 {
                ok = true;
            }
            break;
        }
        if !ok {
            return false;
        }
    }
    true
}

/// Monic greatest common divisor (zero only when both inputs are zero).
pub fn poly_gcd(a: &LaurentPoly, b: &LaurentPoly) -> LaurentPoly {
    if a.is_zero() {
        return monic(b.clone());
    }
    if b.is_zero() {
        return monic(a.clone());
    }
    if a.is_constant() || b.is_constant() {
        return LaurentPoly::one();
    }
    if a == b {
        return monic(a.clone());
    }
    // monomial factors split off cheaply
    let ma = a.min_monomial();
    let mb = b.min_monomial();
    let common = ma.meet(&mb);
    if !ma.is_one() || !mb.is_one() {
        let a0 = a.mul_monomial(&ma.inv());
        let b0 = b.mul_monomial(&mb.inv());
        return poly_gcd(&a0, &b0).mul_monomial(&common);
    }
    if certified_coprime(a, b) {
        return LaurentPoly::one();
    }
    let va = a.vars();
    let vb = b.vars();
    // main variable: smallest combined degree keeps the remainder sequence short
    let v = va
        .union(&vb)
        .min_by_key(|v| a.degree_in(v) + b.degree_in(v))
        .cloned()
        .expect("nonconstant input has a variable");
    if !va.contains(&v) {
        return poly_gcd(a, &content_in(b, &v));
    }
    if !vb.contains(&v) {
        return poly_gcd(&content_in(a, &v), b);
    }
    let ca = content_in(a, &v);
    let cb = content_in(b, &v);
    let c = poly_gcd(&ca, &cb);
    let mut f = exact_div(a, &ca).expect("content divides");
    let mut g = exact_div(b, &cb).expect("content divides");
    if f.degree_in(&v) < g.degree_in(&v) {
        std::mem::swap(&mut f, &mut g);
    }
    let g = loop {
        let r = pseudo_remainder(&f, &g, &v);
        if r.is_zero() {
            break g;
        }
        if r.degree_in(&v) == 0 {
            break LaurentPoly::one();
        }
        f = g;
        g = primitive_part_in(&r, &v);
    };
    monic(&c * &primitive_part_in(&g, &v))
}
