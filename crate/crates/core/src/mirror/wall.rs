use std::collections::BTreeMap;

use crate::arrangement::HypertoricData;
use crate::symbolic::{Monomial, RationalFn, SymbolicError, Var};

use super::{big_z, wall_factor};

/// A monomial times wall factors `∏_k (1+𝐙_k)^{e_k}`, the shape of every gluing map.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct WallMonomial {
    pub monomial: Monomial,
    /// Hyperplane index → nonzero exponent.
    pub factors: BTreeMap<usize, i64>,
}

impl WallMonomial {
    pub fn one() -> Self {
        WallMonomial::default()
    }

    pub fn var(v: Var) -> Self {
        WallMonomial::monomial(Monomial::var(v))
    }

    pub fn monomial(m: Monomial) -> Self {
        WallMonomial {
            monomial: m,
            factors: BTreeMap::new(),
        }
    }

    pub fn add_factor(&mut self, k: usize, e: i64) {
        let entry = self.factors.entry(k).or_insert(0);
        *entry += e;
        if *entry == 0 {
            self.factors.remove(&k);
        }
    }

    pub fn mul(&self, other: &WallMonomial) -> WallMonomial {
        let mut out = WallMonomial::monomial(self.monomial.mul(&other.monomial));
        out.factors = self.factors.clone();
        for (&k, &e) in &other.factors {
            out.add_factor(k, e);
        }
        out
    }

    pub fn pow(&self, e: i64) -> WallMonomial {
        let mut out = WallMonomial::monomial(self.monomial.pow(e));
        for (&k, &x) in &self.factors {
            out.add_factor(k, x * e);
        }
        out
    }

    pub fn inv(&self) -> WallMonomial {
        self.pow(-1)
    }

    /// Replaces bound variables by their images; other variables stay.
    pub fn substitute(&self, images: &BTreeMap<Var, WallMonomial>) -> WallMonomial {
        let mut out = WallMonomial::one();
        out.factors = self.factors.clone();
        for (v, e) in self.monomial.iter() {
            match images.get(v) {
                Some(img) => out = out.mul(&img.pow(*e)),
                None => out.monomial = out.monomial.mul(&Monomial::var_pow(v.clone(), *e)),
            }
        }
        out
    }

    pub fn to_rational(&self, h: &HypertoricData) -> RationalFn {
        self.try_rational(h).expect("wall factors are nonzero")
    }

    pub fn try_rational(&self, h: &HypertoricData) -> Result<RationalFn, SymbolicError> {
        let mut out = RationalFn::monomial(&self.monomial);
        for (&k, &e) in &self.factors {
            out = &out * &RationalFn::from(wall_factor(h, k)).pow(e)?;
        }
        Ok(out)
    }

    pub fn display(&self, h: &HypertoricData) -> String {
        let mut parts = Vec::new();
        if !self.monomial.is_one() || self.factors.is_empty() {
            parts.push(self.monomial.to_string());
        }
        for (&k, &e) in &self.factors {
            if e == 1 {
                parts.push(format!("(1+{})", big_z(h, k)));
            } else {
                parts.push(format!("(1+{})^{e}", big_z(h, k)));
            }
        }
        parts.join("*")
    }
}
