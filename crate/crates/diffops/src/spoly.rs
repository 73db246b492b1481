//! Dense univariate polynomials in the parameter `s` over the rationals.
//!
//! These are the coefficients of s-parametric operators and the value domain
//! of Bernstein-Sato polynomials.  `binom_s(i)` is the degree-`i` polynomial
//! `s (s-1) ... (s-i+1) / i!`, the generic binomial coefficient.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::rat::{rat_abs, rat_i, Rat};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SPoly {
    /// Coefficient of `s^k` at index `k`; no trailing zeros.
    c: Vec<Rat>,
}

impl SPoly {
    pub fn zero() -> SPoly {
        SPoly { c: Vec::new() }
    }

    pub fn one() -> SPoly {
        SPoly::constant(Rat::one())
    }

    pub fn s() -> SPoly {
        SPoly::from_coeffs(vec![Rat::zero(), Rat::one()])
    }

    pub fn constant(r: Rat) -> SPoly {
        SPoly::from_coeffs(vec![r])
    }

    pub fn from_coeffs(c: Vec<Rat>) -> SPoly {
        let mut p = SPoly { c };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.c.last().map(|x| x.is_zero()).unwrap_or(false) {
            self.c.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn deg(&self) -> Option<usize> {
        if self.c.is_empty() {
            None
        } else {
            Some(self.c.len() - 1)
        }
    }

    pub fn coeff(&self, k: usize) -> Rat {
        self.c.get(k).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.c
    }

    pub fn leading(&self) -> Option<&Rat> {
        self.c.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().map(|c| c.is_one()).unwrap_or(false)
    }

    pub fn add(&self, o: &SPoly) -> SPoly {
        let n = self.c.len().max(o.c.len());
        let mut c = Vec::with_capacity(n);
        for k in 0..n {
            c.push(self.coeff(k) + o.coeff(k));
        }
        SPoly::from_coeffs(c)
    }

    pub fn sub(&self, o: &SPoly) -> SPoly {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> SPoly {
        SPoly {
            c: self.c.iter().map(|x| -x).collect(),
        }
    }

    pub fn scale(&self, r: &Rat) -> SPoly {
        if r.is_zero() {
            return SPoly::zero();
        }
        SPoly {
            c: self.c.iter().map(|x| x * r).collect(),
        }
    }

    pub fn mul(&self, o: &SPoly) -> SPoly {
        if self.is_zero() || o.is_zero() {
            return SPoly::zero();
        }
        let mut c = vec![Rat::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        SPoly::from_coeffs(c)
    }

    pub fn eval(&self, at: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for a in self.c.iter().rev() {
            acc = acc * at + a;
        }
        acc
    }

    pub fn eval_int(&self, t: i64) -> Rat {
        self.eval(&rat_i(t))
    }

    /// `binom_s(i) = s (s-1) ... (s-i+1) / i!`.
    pub fn binom_s(i: u32) -> SPoly {
        let mut acc = SPoly::one();
        for k in 0..i {
            let factor = SPoly::from_coeffs(vec![rat_i(-(k as i64)), Rat::one()]);
            acc = acc.mul(&factor);
        }
        let mut fact = Rat::one();
        for k in 1..=i {
            fact *= rat_i(k as i64);
        }
        acc.scale(&(Rat::one() / fact))
    }

    /// Product of monic linear factors `(s - r)` over the given roots.
    pub fn from_roots(roots: &[Rat]) -> SPoly {
        let mut acc = SPoly::one();
        for r in roots {
            acc = acc.mul(&SPoly::from_coeffs(vec![-r, Rat::one()]));
        }
        acc
    }
}

impl fmt::Display for SPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for k in (0..self.c.len()).rev() {
            let a = &self.c[k];
            if a.is_zero() {
                continue;
            }
            let neg = a.is_negative();
            let ab = rat_abs(a);
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let body = match k {
                0 => String::new(),
                1 => "s".to_string(),
                _ => format!("s^{k}"),
            };
            if body.is_empty() {
                write!(f, "{ab}")?;
            } else if ab.is_one() {
                write!(f, "{body}")?;
            } else {
                write!(f, "{ab}*{body}")?;
            }
        }
        Ok(())
    }
}
