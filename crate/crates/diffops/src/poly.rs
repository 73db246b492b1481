//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Terms are stored in a `BTreeMap` keyed by exponent vector, so iteration
//! order (and therefore every printed or serialized form) is deterministic.
//! Zero coefficients are never stored.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::mono::Mono;
use crate::rat::{rat_abs, Rat};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    n: usize,
    terms: BTreeMap<Mono, Rat>,
}

impl Poly {
    pub fn zero(n: usize) -> Poly {
        Poly {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(n: usize) -> Poly {
        Poly::constant(n, Rat::one())
    }

    pub fn constant(n: usize, c: Rat) -> Poly {
        let mut p = Poly::zero(n);
        if !c.is_zero() {
            p.terms.insert(Mono::zero(n), c);
        }
        p
    }

    pub fn var(n: usize, j: usize) -> Poly {
        Poly::monomial(Mono::unit(n, j), Rat::one())
    }

    pub fn monomial(m: Mono, c: Rat) -> Poly {
        let n = m.nvars();
        let mut p = Poly::zero(n);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn from_terms(n: usize, terms: Vec<(Mono, Rat)>) -> Result<Poly> {
        let mut p = Poly::zero(n);
        for (m, c) in terms {
            if m.nvars() != n {
                return Err(Error::ArityMismatch(format!(
                    "monomial over {} variables in a {}-variable polynomial",
                    m.nvars(),
                    n
                )));
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &Rat)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Mono) -> Rat {
        self.terms.get(m).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn constant_term(&self) -> Rat {
        self.coeff(&Mono::zero(self.n))
    }

    /// Some(c) when the polynomial is a constant (including zero).
    pub fn as_constant(&self) -> Option<Rat> {
        if self.terms.is_empty() {
            return Some(Rat::zero());
        }
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            if m.is_zero() {
                return Some(c.clone());
            }
        }
        None
    }

    pub fn add_term(&mut self, m: Mono, c: Rat) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().clone() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, o: &Poly) -> Poly {
        debug_assert_eq!(self.n, o.n);
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(m.clone(), c.clone());
        }
        r
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Poly {
        Poly {
            n: self.n,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.n);
        }
        Poly {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(m, k)| (m.clone(), k * c))
                .collect(),
        }
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        debug_assert_eq!(self.n, o.n);
        let mut r = Poly::zero(self.n);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                let m = ma.checked_add(mb).expect("exponent overflow in product");
                r.add_term(m, ca * cb);
            }
        }
        r
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut acc = Poly::one(self.n);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn deg(&self) -> Option<u64> {
        self.terms.keys().map(|m| m.deg()).max()
    }

    pub fn wdeg(&self, weights: &[u32]) -> Option<u64> {
        self.terms.keys().map(|m| m.wdeg(weights)).max()
    }

    /// True when every term has the same weighted degree.
    pub fn is_homogeneous(&self, weights: &[u32]) -> bool {
        let mut degs = self.terms.keys().map(|m| m.wdeg(weights));
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    /// The weighted-degree-`d` part.
    pub fn homogeneous_part(&self, weights: &[u32], d: u64) -> Poly {
        Poly {
            n: self.n,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.wdeg(weights) == d)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn derivative(&self, j: usize) -> Poly {
        let mut r = Poly::zero(self.n);
        for (m, c) in &self.terms {
            let e = m.0[j];
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2.0[j] = e - 1;
            r.add_term(m2, c * Rat::from_integer(e.into()));
        }
        r
    }

    /// Leading term under graded-lex, used by exact division.
    fn lead(&self) -> Option<(&Mono, &Rat)> {
        self.terms
            .iter()
            .max_by(|(a, _), (b, _)| a.grlex(b))
    }

    /// Exact division: errors unless `g` divides `self` on the nose.
    pub fn divide_exact(&self, g: &Poly) -> Result<Poly> {
        debug_assert_eq!(self.n, g.n);
        if g.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let (gl, gc) = g.lead().unwrap();
        let gl = gl.clone();
        let gc = gc.clone();
        let mut rem = self.clone();
        let mut quot = Poly::zero(self.n);
        while let Some((rl, rc)) = rem.lead() {
            if !gl.divides(rl) {
                return Err(Error::NotDivisible);
            }
            let m = rl.sub(&gl);
            let c = rc / &gc;
            let t = Poly::monomial(m, c);
            quot = quot.add(&t);
            rem = rem.sub(&t.mul(g));
        }
        Ok(quot)
    }

    pub fn divides(&self, other: &Poly) -> bool {
        other.divide_exact(self).is_ok()
    }

    /// Terms sorted descending graded-lex, the canonical display order.
    pub fn sorted_terms(&self) -> Vec<(Mono, Rat)> {
        let mut v: Vec<(Mono, Rat)> = self
            .terms
            .iter()
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        v.sort_by(|(a, _), (b, _)| b.grlex(a));
        v
    }
}

/// Writes a signed sum of rendered terms, shared by the polynomial and
/// operator displays.
pub fn fmt_signed_sum(
    f: &mut fmt::Formatter<'_>,
    terms: &[(String, Rat)],
) -> fmt::Result {
    if terms.is_empty() {
        return write!(f, "0");
    }
    for (idx, (body, c)) in terms.iter().enumerate() {
        let neg = c.is_negative();
        let a = rat_abs(c);
        if idx == 0 {
            if neg {
                write!(f, "-")?;
            }
        } else if neg {
            write!(f, " - ")?;
        } else {
            write!(f, " + ")?;
        }
        if body.is_empty() {
            write!(f, "{a}")?;
        } else if a.is_one() {
            write!(f, "{body}")?;
        } else {
            write!(f, "{a}*{body}")?;
        }
    }
    Ok(())
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<(String, Rat)> = self
            .sorted_terms()
            .into_iter()
            .map(|(m, c)| (m.render("x").unwrap_or_default(), c))
            .collect();
        fmt_signed_sum(f, &terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_i};

    fn p_x2_minus_y(n: usize) -> Poly {
        // x1^2 - x2
        Poly::from_terms(
            n,
            vec![
                (Mono::new(vec![2, 0]).unwrap(), rat_i(1)),
                (Mono::new(vec![0, 1]).unwrap(), rat_i(-1)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn ring_basics() {
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let f = x.mul(&x).sub(&y);
        assert_eq!(f, p_x2_minus_y(2));
        assert_eq!(f.add(&f.neg()), Poly::zero(2));
        let g = f.mul(&f);
        assert_eq!(g.coeff(&Mono::new(vec![4, 0]).unwrap()), rat_i(1));
        assert_eq!(g.coeff(&Mono::new(vec![2, 1]).unwrap()), rat_i(-2));
        assert_eq!(g.coeff(&Mono::new(vec![0, 2]).unwrap()), rat_i(1));
    }

    #[test]
    fn no_zero_terms_stored() {
        let x = Poly::var(1, 0);
        let z = x.sub(&x);
        assert!(z.is_zero());
        assert_eq!(z.num_terms(), 0);
        let s = x.add(&Poly::constant(1, rat_i(0)));
        assert_eq!(s.num_terms(), 1);
    }

    #[test]
    fn exact_division() {
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let f = x.add(&y).mul(&x.sub(&y));
        let q = f.divide_exact(&x.add(&y)).unwrap();
        assert_eq!(q, x.sub(&y));
        assert_eq!(f.divide_exact(&x), Err(Error::NotDivisible));
        // (x + y)^3 / (x + y)^2
        let s = x.add(&y);
        assert_eq!(s.pow(3).divide_exact(&s.pow(2)).unwrap(), s);
        assert!(s.divide_exact(&Poly::zero(2)).is_err());
    }

    #[test]
    fn division_error_does_not_lose_input() {
        let x = Poly::var(1, 0);
        let f = x.pow(2).add(&Poly::one(1));
        assert_eq!(f.divide_exact(&x), Err(Error::NotDivisible));
        assert_eq!(f.coeff(&Mono::new(vec![2]).unwrap()), rat_i(1));
    }

    #[test]
    fn display_canonical() {
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let f = x
            .pow(2)
            .scale(&rat(3, 2))
            .sub(&y)
            .add(&Poly::one(2));
        assert_eq!(f.to_string(), "3/2*x1^2 - x2 + 1");
        assert_eq!(Poly::zero(2).to_string(), "0");
        assert_eq!(Poly::one(2).neg().to_string(), "-1");
    }

    #[test]
    fn derivative_and_homogeneity() {
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let f = x.pow(2).mul(&y).add(&y.pow(3));
        assert_eq!(f.derivative(0), x.mul(&y).scale(&rat_i(2)));
        assert!(f.is_homogeneous(&[1, 1]));
        assert!(!f.add(&x).is_homogeneous(&[1, 1]));
        assert!(f.is_homogeneous(&[1, 1]));
        assert_eq!(f.homogeneous_part(&[1, 2], 4), x.pow(2).mul(&y));
    }
}
