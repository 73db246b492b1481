//! Weyl algebra elements in normal form.
//!
//! An operator is a finite sum `sum c_(a,b) x^a d^b` with every `x` factor
//! to the left of every `d` factor.  Multiplication re-normalizes with the
//! closed-form expansion
//!
//! `d^b x^a = sum_k binom(b, k) * a!/(a-k)! * x^(a-k) d^(b-k)`
//!
//! applied coordinatewise.  Coefficients are either exact rationals or
//! polynomials in the central parameter `s`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::mono::Mono;
use crate::poly::{fmt_signed_sum, Poly};
use crate::rat::{binom_i64, falling, Rat};
use crate::spoly::SPoly;

/// Coefficient domains for operators: rationals, or polynomials in `s`
/// (which is central, so coefficients always commute with everything).
pub trait OpCoeff: Clone + PartialEq + fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn mul_rat(&self, r: &Rat) -> Self;
    fn from_rat(r: Rat) -> Self;
}

impl OpCoeff for Rat {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn mul_rat(&self, r: &Rat) -> Self {
        self * r
    }
    fn from_rat(r: Rat) -> Self {
        r
    }
}

impl OpCoeff for SPoly {
    fn zero() -> Self {
        SPoly::zero()
    }
    fn one() -> Self {
        SPoly::one()
    }
    fn is_zero(&self) -> bool {
        SPoly::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        SPoly::add(self, o)
    }
    fn neg(&self) -> Self {
        SPoly::neg(self)
    }
    fn mul(&self, o: &Self) -> Self {
        SPoly::mul(self, o)
    }
    fn mul_rat(&self, r: &Rat) -> Self {
        self.scale(r)
    }
    fn from_rat(r: Rat) -> Self {
        SPoly::constant(r)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeylOp<C: OpCoeff> {
    n: usize,
    terms: BTreeMap<(Mono, Mono), C>,
}

/// Operator with rational coefficients.
pub type QOp = WeylOp<Rat>;
/// Operator with coefficients in `Q[s]`.
pub type SOp = WeylOp<SPoly>;

impl<C: OpCoeff> WeylOp<C> {
    pub fn zero(n: usize) -> Self {
        WeylOp {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(n: usize) -> Self {
        WeylOp::term(Mono::zero(n), Mono::zero(n), C::one())
    }

    pub fn constant(n: usize, c: C) -> Self {
        WeylOp::term(Mono::zero(n), Mono::zero(n), c)
    }

    pub fn x_var(n: usize, j: usize) -> Self {
        WeylOp::term(Mono::unit(n, j), Mono::zero(n), C::one())
    }

    pub fn d_var(n: usize, j: usize) -> Self {
        WeylOp::term(Mono::zero(n), Mono::unit(n, j), C::one())
    }

    pub fn term(x: Mono, d: Mono, c: C) -> Self {
        let n = x.nvars();
        debug_assert_eq!(n, d.nvars());
        let mut op = WeylOp::zero(n);
        op.add_term(x, d, c);
        op
    }

    /// The multiplication operator given by a polynomial.
    pub fn from_poly(p: &Poly) -> Self {
        let n = p.nvars();
        let mut op = WeylOp::zero(n);
        for (m, c) in p.terms() {
            op.add_term(m.clone(), Mono::zero(n), C::from_rat(c.clone()));
        }
        op
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

    pub fn terms(&self) -> impl Iterator<Item = (&(Mono, Mono), &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, x: &Mono, d: &Mono) -> C {
        self.terms
            .get(&(x.clone(), d.clone()))
            .cloned()
            .unwrap_or_else(C::zero)
    }

    /// Maximal total `d`-degree; 0 for the zero operator.
    pub fn order(&self) -> u32 {
        self.terms
            .keys()
            .map(|(_, d)| d.deg() as u32)
            .max()
            .unwrap_or(0)
    }

    /// Maximal weighted operator degree `wdeg(a) - wdeg(b)` over the terms.
    pub fn wdeg_max(&self, weights: &[u32]) -> Option<i64> {
        self.terms
            .keys()
            .map(|(a, b)| a.wdeg(weights) as i64 - b.wdeg(weights) as i64)
            .max()
    }

    /// True when every term has the same weighted operator degree.
    pub fn is_whomogeneous(&self, weights: &[u32]) -> bool {
        let mut it = self
            .terms
            .keys()
            .map(|(a, b)| a.wdeg(weights) as i64 - b.wdeg(weights) as i64);
        match it.next() {
            None => true,
            Some(d) => it.all(|e| e == d),
        }
    }

    pub fn as_constant(&self) -> Option<C> {
        if self.terms.is_empty() {
            return Some(C::zero());
        }
        if self.terms.len() == 1 {
            let ((a, b), c) = self.terms.iter().next().unwrap();
            if a.is_zero() && b.is_zero() {
                return Some(c.clone());
            }
        }
        None
    }

    pub fn add_term(&mut self, x: Mono, d: Mono, c: C) {
        if c.is_zero() {
            return;
        }
        let key = (x, d);
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().add(&c);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        debug_assert_eq!(self.n, o.n);
        let mut r = self.clone();
        for ((a, b), c) in &o.terms {
            r.add_term(a.clone(), b.clone(), c.clone());
        }
        r
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        WeylOp {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.clone(), c.neg()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return WeylOp::zero(self.n);
        }
        WeylOp {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (k.clone(), v.mul(c)))
                .collect(),
        }
    }

    pub fn scale_rat(&self, r: &Rat) -> Self {
        self.scale(&C::from_rat(r.clone()))
    }

    /// Normal-ordered product.
    pub fn mul(&self, o: &Self) -> Self {
        debug_assert_eq!(self.n, o.n);
        let n = self.n;
        let mut r = WeylOp::zero(n);
        for ((a1, b1), c1) in &self.terms {
            for ((a2, b2), c2) in &o.terms {
                let c12 = c1.mul(c2);
                // k ranges over the box 0 <= k_j <= min(b1_j, a2_j).
                let kmax: Vec<u32> = (0..n).map(|j| b1.0[j].min(a2.0[j])).collect();
                let mut k = vec![0u32; n];
                loop {
                    let mut scal = num_bigint::BigInt::one();
                    for j in 0..n {
                        if k[j] > 0 {
                            scal *= binom_i64(b1.0[j] as i64, k[j]).to_integer();
                            scal *= falling(a2.0[j], k[j]);
                        }
                    }
                    let xm = Mono(
                        (0..n)
                            .map(|j| a1.0[j] + a2.0[j] - k[j])
                            .collect::<Vec<_>>(),
                    );
                    let dm = Mono(
                        (0..n)
                            .map(|j| b1.0[j] + b2.0[j] - k[j])
                            .collect::<Vec<_>>(),
                    );
                    r.add_term(xm, dm, c12.mul_rat(&Rat::from_integer(scal)));
                    // Odometer step through the box.
                    let mut j = 0;
                    loop {
                        if j == n {
                            break;
                        }
                        if k[j] < kmax[j] {
                            k[j] += 1;
                            break;
                        }
                        k[j] = 0;
                        j += 1;
                    }
                    if j == n {
                        break;
                    }
                }
            }
        }
        r
    }

    pub fn commutator(&self, o: &Self) -> Self {
        self.mul(o).sub(&o.mul(self))
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = WeylOp::one(self.n);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// The chain `d^(0) = d, d^(i) = [d^(i-1), f]` up to `i = order(d)`;
    /// every later entry vanishes because each bracket drops the order.
    pub fn bracket_chain(&self, f: &Poly) -> Vec<Self> {
        let fop = WeylOp::from_poly(f);
        let mut chain = vec![self.clone()];
        let ord = self.order();
        for _ in 0..ord {
            let last = chain.last().unwrap();
            chain.push(last.commutator(&fop));
        }
        chain
    }

    pub fn map_coeffs<D: OpCoeff>(&self, f: impl Fn(&C) -> D) -> WeylOp<D> {
        let mut r = WeylOp::zero(self.n);
        for ((a, b), c) in &self.terms {
            r.add_term(a.clone(), b.clone(), f(c));
        }
        r
    }
}

impl QOp {
    /// Applies the operator to a polynomial:
    /// `x^a d^b (x^m) = m!/(m-b)! x^(m-b+a)`.
    pub fn apply(&self, f: &Poly) -> Poly {
        debug_assert_eq!(self.n, f.nvars());
        let n = self.n;
        let mut r = Poly::zero(n);
        for ((a, b), c) in &self.terms {
            for (m, cf) in f.terms() {
                if !b.divides(m) {
                    continue;
                }
                let mut scal = num_bigint::BigInt::one();
                for j in 0..n {
                    scal *= falling(m.0[j], b.0[j]);
                }
                let mono = m.sub(b).checked_add(a).expect("exponent overflow");
                r.add_term(mono, c * cf * Rat::from_integer(scal));
            }
        }
        r
    }

    /// Some(p) when the operator is plain multiplication by `p`.
    pub fn to_poly(&self) -> Option<Poly> {
        if self.terms.keys().any(|(_, b)| !b.is_zero()) {
            return None;
        }
        let mut p = Poly::zero(self.n);
        for ((a, _), c) in &self.terms {
            p.add_term(a.clone(), c.clone());
        }
        Some(p)
    }

    /// Substitutes linear images for the variables: `xs[j]` replaces `x_j`
    /// and `sum_i ds[j][i] d_i` replaces `d_j`.  Used by group actions.
    pub fn substitute_linear(&self, xs: &[Poly], ds: &[Vec<Rat>]) -> QOp {
        let n = self.n;
        let mut r = WeylOp::zero(n);
        for ((a, b), c) in &self.terms {
            let mut xpart = Poly::one(n);
            for j in 0..n {
                for _ in 0..a.0[j] {
                    xpart = xpart.mul(&xs[j]);
                }
            }
            // The d-part is a polynomial in the commuting d variables.
            let mut dpart = Poly::one(n);
            for j in 0..n {
                let image = Poly::from_terms(
                    n,
                    (0..n)
                        .map(|i| (Mono::unit(n, i), ds[j][i].clone()))
                        .collect(),
                )
                .expect("substitution image");
                for _ in 0..b.0[j] {
                    dpart = dpart.mul(&image);
                }
            }
            for (xm, cx) in xpart.terms() {
                for (dm, cd) in dpart.terms() {
                    r.add_term(xm.clone(), dm.clone(), c * cx * cd);
                }
            }
        }
        r
    }

    pub fn lift_s(&self) -> SOp {
        self.map_coeffs(|c| SPoly::constant(c.clone()))
    }
}

impl SOp {
    /// Substitutes an integer (or rational) value for `s`.
    pub fn specialize_s(&self, t: &Rat) -> QOp {
        let mut r = WeylOp::zero(self.n);
        for ((a, b), c) in &self.terms {
            r.add_term(a.clone(), b.clone(), c.eval(t));
        }
        r
    }

    /// Maximal degree in `s` over the coefficients.
    pub fn s_degree(&self) -> Option<usize> {
        self.terms.values().filter_map(|c| c.deg()).max()
    }

    /// Writes the operator as `sum_k delta_k s^k` with rational operators.
    pub fn s_coefficient(&self, k: usize) -> QOp {
        let mut r = WeylOp::zero(self.n);
        for ((a, b), c) in &self.terms {
            r.add_term(a.clone(), b.clone(), c.coeff(k));
        }
        r
    }
}

/// Both sides of the conjugation identity
/// `d f^j = sum_i binom(j, i) f^(j-i) d^(i)`
/// as exact operators; requires `j - order(d) >= 0` so that no negative
/// power of `f` appears (use the localized verifier otherwise).
pub fn commute_f_sides(op: &QOp, f: &Poly, j: u32) -> (QOp, QOp) {
    let fop: QOp = WeylOp::from_poly(f);
    let lhs = op.mul(&fop.pow(j));
    let chain = op.bracket_chain(f);
    let mut rhs = WeylOp::zero(op.nvars());
    for (i, di) in chain.iter().enumerate() {
        let i = i as u32;
        let b = binom_i64(j as i64, i);
        if num_traits::Zero::is_zero(&b) || j < i {
            continue;
        }
        rhs = rhs.add(&fop.pow(j - i).mul(di).scale_rat(&b));
    }
    (lhs, rhs)
}

/// Exact check of the conjugation identity for nonnegative powers.
pub fn commute_identity_exact(op: &QOp, f: &Poly, j: u32) -> bool {
    let (lhs, rhs) = commute_f_sides(op, f, j);
    lhs == rhs
}

/// The mirrored identity `f^j d = sum_i (-1)^i binom(j, i) d^(i) f^(j-i)`.
pub fn commute_identity_mirror(op: &QOp, f: &Poly, j: u32) -> bool {
    let fop: QOp = WeylOp::from_poly(f);
    let lhs = fop.pow(j).mul(op);
    let chain = op.bracket_chain(f);
    let mut rhs = WeylOp::zero(op.nvars());
    for (i, di) in chain.iter().enumerate() {
        let i = i as u32;
        if j < i {
            continue;
        }
        let mut b = binom_i64(j as i64, i);
        if i % 2 == 1 {
            b = -b;
        }
        rhs = rhs.add(&di.mul(&fop.pow(j - i)).scale_rat(&b));
    }
    lhs == rhs
}

impl fmt::Display for QOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms: Vec<((Mono, Mono), Rat)> = self
            .terms
            .iter()
            .map(|(k, c)| (k.clone(), c.clone()))
            .collect();
        terms.sort_by(|((ax, ad), _), ((bx, bd), _)| {
            let da = ax.deg() + ad.deg();
            let db = bx.deg() + bd.deg();
            db.cmp(&da).then_with(|| (bx, bd).cmp(&(ax, ad)))
        });
        let rendered: Vec<(String, Rat)> = terms
            .into_iter()
            .map(|((a, b), c)| {
                let xs = a.render("x");
                let ds = b.render("d");
                let body = match (xs, ds) {
                    (Some(x), Some(d)) => format!("{x}*{d}"),
                    (Some(x), None) => x,
                    (None, Some(d)) => d,
                    (None, None) => String::new(),
                };
                (body, c)
            })
            .collect();
        fmt_signed_sum(f, &rendered)
    }
}

impl fmt::Display for SOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((a, b), c) in &self.terms {
            if first {
                first = false;
            } else {
                write!(f, " + ")?;
            }
            let xs = a.render("x");
            let ds = b.render("d");
            let body = match (xs, ds) {
                (Some(x), Some(d)) => format!("{x}*{d}"),
                (Some(x), None) => x,
                (None, Some(d)) => d,
                (None, None) => String::new(),
            };
            if body.is_empty() {
                write!(f, "({c})")?;
            } else {
                write!(f, "({c})*{body}")?;
            }
        }
        Ok(())
    }
}

/// A deterministic pseudo-random operator for property suites: draws up to
/// `nterms` monomial terms with the given bounds.
pub fn random_qop(
    rng: &mut impl rand::Rng,
    n: usize,
    max_xdeg: u32,
    max_order: u32,
    nterms: usize,
) -> QOp {
    let mut op = WeylOp::zero(n);
    for _ in 0..nterms {
        let a = Mono(
            (0..n)
                .map(|_| rng.gen_range(0..=max_xdeg))
                .collect::<Vec<_>>(),
        );
        let b = Mono(
            (0..n)
                .map(|_| rng.gen_range(0..=max_order))
                .collect::<Vec<_>>(),
        );
        if b.deg() > max_order as u64 {
            continue;
        }
        let num = rng.gen_range(-6i64..=6);
        let den = rng.gen_range(1i64..=3);
        op.add_term(a, b, crate::rat::rat(num, den));
    }
    op
}

/// Deterministic pseudo-random polynomial for property suites.
pub fn random_poly(rng: &mut impl rand::Rng, n: usize, max_deg: u32, nterms: usize) -> Poly {
    let mut p = Poly::zero(n);
    for _ in 0..nterms {
        let m = Mono(
            (0..n)
                .map(|_| rng.gen_range(0..=max_deg))
                .collect::<Vec<_>>(),
        );
        if m.deg() > max_deg as u64 {
            continue;
        }
        let num = rng.gen_range(-5i64..=5);
        p.add_term(m, crate::rat::rat_i(num));
    }
    p
}

/// Parses operator construction errors for mismatched variable counts.
pub fn check_same_arity<C: OpCoeff>(a: &WeylOp<C>, b: &WeylOp<C>) -> Result<()> {
    if a.nvars() != b.nvars() {
        return Err(Error::ArityMismatch(format!(
            "operators over {} and {} variables",
            a.nvars(),
            b.nvars()
        )));
    }
    Ok(())
}
