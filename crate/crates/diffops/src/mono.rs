//! Exponent vectors shared by polynomials and operators.

use std::cmp::Ordering;

use crate::error::{Error, Result};

/// Construction guard: exponents must stay below 2^31.
pub const EXP_LIMIT: u32 = 1 << 31;

/// A fixed-length exponent vector.  Ordering is lexicographic, which keeps
/// map iteration deterministic; graded orders are built on top where needed.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mono(pub Vec<u32>);

impl Mono {
    pub fn new(exps: Vec<u32>) -> Result<Mono> {
        if exps.iter().any(|&e| e >= EXP_LIMIT) {
            return Err(Error::ExponentOverflow);
        }
        Ok(Mono(exps))
    }

    pub fn zero(n: usize) -> Mono {
        Mono(vec![0; n])
    }

    pub fn unit(n: usize, j: usize) -> Mono {
        let mut e = vec![0; n];
        e[j] = 1;
        Mono(e)
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// Total degree.
    pub fn deg(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    /// Weighted degree with respect to positive integer weights.
    pub fn wdeg(&self, weights: &[u32]) -> u64 {
        self.0
            .iter()
            .zip(weights)
            .map(|(&e, &w)| e as u64 * w as u64)
            .sum()
    }

    pub fn checked_add(&self, o: &Mono) -> Result<Mono> {
        Mono::new(
            self.0
                .iter()
                .zip(&o.0)
                .map(|(&a, &b)| a.saturating_add(b))
                .collect(),
        )
    }

    pub fn divides(&self, o: &Mono) -> bool {
        self.0.iter().zip(&o.0).all(|(&a, &b)| a <= b)
    }

    /// Componentwise difference; caller must know `o` divides `self`.
    pub fn sub(&self, o: &Mono) -> Mono {
        Mono(self.0.iter().zip(&o.0).map(|(&a, &b)| a - b).collect())
    }

    pub fn lcm(&self, o: &Mono) -> Mono {
        Mono(self.0.iter().zip(&o.0).map(|(&a, &b)| a.max(b)).collect())
    }

    pub fn gcd(&self, o: &Mono) -> Mono {
        Mono(self.0.iter().zip(&o.0).map(|(&a, &b)| a.min(b)).collect())
    }

    pub fn scale(&self, k: u32) -> Result<Mono> {
        Mono::new(
            self.0
                .iter()
                .map(|&a| a.saturating_mul(k))
                .collect::<Vec<_>>(),
        )
    }

    /// Graded-lexicographic comparison (total degree first, then lex).
    pub fn grlex(&self, o: &Mono) -> Ordering {
        self.deg().cmp(&o.deg()).then_with(|| self.0.cmp(&o.0))
    }

    /// Renders with the given variable name prefix and 1-based indices,
    /// e.g. `x1^2*x3`.  Returns `None` for the empty monomial.
    pub fn render(&self, prefix: &str) -> Option<String> {
        let mut parts = Vec::new();
        for (j, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if e == 1 {
                parts.push(format!("{prefix}{}", j + 1));
            } else {
                parts.push(format!("{prefix}{}^{}", j + 1, e));
            }
        }
        if parts.is_empty() {
            None
        } else {
            Some(parts.join("*"))
        }
    }
}

/// Enumerates all exponent vectors with `wdeg <= budget` for the given
/// scaled integer weights, in lexicographic order.
pub fn monos_within(weights: &[u64], budget: u64) -> Vec<Mono> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; weights.len()];
    fn rec(weights: &[u64], budget: u64, j: usize, cur: &mut Vec<u32>, out: &mut Vec<Mono>) {
        if j == weights.len() {
            out.push(Mono(cur.clone()));
            return;
        }
        let w = weights[j];
        let mut used: u64 = 0;
        let mut e: u32 = 0;
        loop {
            if used > budget {
                break;
            }
            cur[j] = e;
            rec(weights, budget - used, j + 1, cur, out);
            e += 1;
            used = e as u64 * w;
        }
        cur[j] = 0;
    }
    rec(weights, budget, 0, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic() {
        let a = Mono::new(vec![2, 0, 1]).unwrap();
        let b = Mono::new(vec![1, 3, 0]).unwrap();
        assert_eq!(a.checked_add(&b).unwrap(), Mono(vec![3, 3, 1]));
        assert_eq!(a.lcm(&b), Mono(vec![2, 3, 1]));
        assert_eq!(a.gcd(&b), Mono(vec![1, 0, 0]));
        assert!(!b.divides(&a));
        assert!(Mono(vec![1, 0, 0]).divides(&a));
        assert_eq!(a.deg(), 3);
        assert_eq!(a.wdeg(&[1, 2, 3]), 5);
    }

    #[test]
    fn overflow_guard() {
        assert!(Mono::new(vec![EXP_LIMIT]).is_err());
        assert!(Mono::new(vec![EXP_LIMIT - 1]).is_ok());
    }

    #[test]
    fn enumeration_counts() {
        // Vectors with a + b <= 4: C(6, 2) = 15.
        assert_eq!(monos_within(&[1, 1], 4).len(), 15);
        // Weight-2 variable: 1, x, x^2 within budget 4 paired with b <= ...
        let ms = monos_within(&[2, 1], 4);
        assert_eq!(
            ms.len(),
            (0..=2).map(|a| (4 - 2 * a) + 1).sum::<u64>() as usize
        );
    }

    #[test]
    fn render_forms() {
        let m = Mono::new(vec![2, 0, 1]).unwrap();
        assert_eq!(m.render("x").unwrap(), "x1^2*x3");
        assert!(Mono::zero(3).render("x").is_none());
    }
}
