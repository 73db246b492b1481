//! Prime-characteristic toolkit: divided-power operators over F_p with
//! the level filtration by p-th-power linearity, Frobenius powers and
//! monomial colons, splitting ideals via Fedder's criterion, F-purity
//! and strong F-regularity scans, and Veronese decomposition counts.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::mono::{monos_within, Mono};

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::BadParameter(format!("{p} is not prime")))
    }
}

/// binom(a, b) for small arguments, exact in u128.
fn small_binom(a: u64, b: u64) -> u128 {
    if b > a {
        return 0;
    }
    let b = b.min(a - b);
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for k in 0..b {
        num *= (a - k) as u128;
        den *= (k + 1) as u128;
    }
    num / den
}

/// Binomial coefficient mod p by Lucas' theorem: the product of the
/// digitwise binomials in base p.
pub fn lucas_binom(m: u64, k: u64, p: u64) -> u64 {
    let mut m = m;
    let mut k = k;
    let mut acc: u64 = 1;
    while m > 0 || k > 0 {
        let md = m % p;
        let kd = k % p;
        acc = acc * ((small_binom(md, kd) % p as u128) as u64) % p;
        if acc == 0 {
            return 0;
        }
        m /= p;
        k /= p;
    }
    acc
}

/// Sparse multivariate polynomial over F_p; coefficients stored in [1, p).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpPoly {
    p: u64,
    n: usize,
    terms: BTreeMap<Mono, u64>,
}

impl FpPoly {
    pub fn zero(p: u64, n: usize) -> Result<FpPoly> {
        check_prime(p)?;
        Ok(FpPoly {
            p,
            n,
            terms: BTreeMap::new(),
        })
    }

    pub fn one(p: u64, n: usize) -> Result<FpPoly> {
        FpPoly::monomial(p, Mono::zero(n), 1)
    }

    pub fn var(p: u64, n: usize, j: usize) -> Result<FpPoly> {
        FpPoly::monomial(p, Mono::unit(n, j), 1)
    }

    pub fn monomial(p: u64, m: Mono, c: u64) -> Result<FpPoly> {
        check_prime(p)?;
        let n = m.nvars();
        let mut f = FpPoly {
            p,
            n,
            terms: BTreeMap::new(),
        };
        f.insert(m, c);
        Ok(f)
    }

    fn insert(&mut self, m: Mono, c: u64) {
        let c = c % self.p;
        if c == 0 {
            return;
        }
        let v = (self.terms.get(&m).copied().unwrap_or(0) + c) % self.p;
        if v == 0 {
            self.terms.remove(&m);
        } else {
            self.terms.insert(m, v);
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &u64)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Mono) -> u64 {
        self.terms.get(m).copied().unwrap_or(0)
    }

    /// Maximal total degree; None for the zero polynomial.
    pub fn deg(&self) -> Option<u64> {
        self.terms.keys().map(|m| m.deg()).max()
    }

    pub fn add(&self, o: &FpPoly) -> FpPoly {
        let mut out = self.clone();
        for (m, &c) in &o.terms {
            out.insert(m.clone(), c);
        }
        out
    }

    pub fn scale(&self, c: u64) -> FpPoly {
        let mut out = FpPoly {
            p: self.p,
            n: self.n,
            terms: BTreeMap::new(),
        };
        for (m, &v) in &self.terms {
            out.insert(m.clone(), v * (c % self.p) % self.p);
        }
        out
    }

    pub fn mul(&self, o: &FpPoly) -> FpPoly {
        let mut out = FpPoly {
            p: self.p,
            n: self.n,
            terms: BTreeMap::new(),
        };
        for (m1, &c1) in &self.terms {
            for (m2, &c2) in &o.terms {
                let m = m1.checked_add(m2).expect("exponent overflow in product");
                out.insert(m, c1 * c2 % self.p);
            }
        }
        out
    }

    pub fn pow(&self, k: u64) -> FpPoly {
        let mut acc = FpPoly::one(self.p, self.n).expect("prime already checked");
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }
}

impl fmt::Display for FpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| match (m.render("x"), *c) {
                (None, c) => format!("{c}"),
                (Some(s), 1) => s,
                (Some(s), c) => format!("{c}*{s}"),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Divided-power differential operator: a sum of terms c * x^a * D^(b)
/// where D^(b) acts on x^m by binom(m, b) x^{m-b} with binomials mod p.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DpOp {
    p: u64,
    n: usize,
    terms: BTreeMap<(Mono, Mono), u64>,
}

impl DpOp {
    pub fn zero(p: u64, n: usize) -> Result<DpOp> {
        check_prime(p)?;
        Ok(DpOp {
            p,
            n,
            terms: BTreeMap::new(),
        })
    }

    pub fn one(p: u64, n: usize) -> Result<DpOp> {
        DpOp::term(p, Mono::zero(n), Mono::zero(n), 1)
    }

    pub fn term(p: u64, x: Mono, d: Mono, c: u64) -> Result<DpOp> {
        check_prime(p)?;
        if x.nvars() != d.nvars() {
            return Err(Error::ArityMismatch("operator term".into()));
        }
        let n = x.nvars();
        let mut op = DpOp {
            p,
            n,
            terms: BTreeMap::new(),
        };
        op.insert(x, d, c);
        Ok(op)
    }

    /// The divided power D^(beta).
    pub fn dp(p: u64, beta: Mono) -> Result<DpOp> {
        let n = beta.nvars();
        DpOp::term(p, Mono::zero(n), beta, 1)
    }

    pub fn from_fp_poly(f: &FpPoly) -> DpOp {
        let mut op = DpOp {
            p: f.p,
            n: f.n,
            terms: BTreeMap::new(),
        };
        for (m, &c) in &f.terms {
            op.insert(m.clone(), Mono::zero(f.n), c);
        }
        op
    }

    fn insert(&mut self, x: Mono, d: Mono, c: u64) {
        let c = c % self.p;
        if c == 0 {
            return;
        }
        let key = (x, d);
        let v = (self.terms.get(&key).copied().unwrap_or(0) + c) % self.p;
        if v == 0 {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, v);
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Mono, Mono), &u64)> {
        self.terms.iter()
    }

    /// Order as a differential operator: the maximal |beta|.
    pub fn order(&self) -> u64 {
        self.terms.keys().map(|(_, b)| b.deg()).max().unwrap_or(0)
    }

    pub fn add(&self, o: &DpOp) -> DpOp {
        let mut out = self.clone();
        for ((x, d), &c) in &o.terms {
            out.insert(x.clone(), d.clone(), c);
        }
        out
    }

    pub fn scale(&self, c: u64) -> DpOp {
        let mut out = DpOp {
            p: self.p,
            n: self.n,
            terms: BTreeMap::new(),
        };
        for ((x, d), &v) in &self.terms {
            out.insert(x.clone(), d.clone(), v * (c % self.p) % self.p);
        }
        out
    }

    /// Normal-form product.  D^(b) x^m = sum_k binom(m, k) x^{m-k} D^(b-k)
    /// componentwise, and D^(a) D^(b) = binom(a+b, a) D^(a+b), with all
    /// binomials reduced by Lucas' theorem.
    pub fn mul(&self, o: &DpOp) -> DpOp {
        assert_eq!(self.p, o.p, "mixed characteristics");
        assert_eq!(self.n, o.n, "mixed arities");
        let mut out = DpOp {
            p: self.p,
            n: self.n,
            terms: BTreeMap::new(),
        };
        for ((a1, b1), &c1) in &self.terms {
            for ((a2, b2), &c2) in &o.terms {
                let cap: Vec<u32> = (0..self.n).map(|j| b1.0[j].min(a2.0[j])).collect();
                let mut k = vec![0u32; self.n];
                loop {
                    let mut coeff = c1 * c2 % self.p;
                    for j in 0..self.n {
                        coeff = coeff * lucas_binom(a2.0[j] as u64, k[j] as u64, self.p)
                            % self.p;
                    }
                    let rest: Vec<u32> = (0..self.n).map(|j| b1.0[j] - k[j]).collect();
                    for j in 0..self.n {
                        coeff = coeff
                            * lucas_binom(
                                (rest[j] + b2.0[j]) as u64,
                                b2.0[j] as u64,
                                self.p,
                            )
                            % self.p;
                    }
                    if coeff != 0 {
                        let x: Vec<u32> =
                            (0..self.n).map(|j| a1.0[j] + a2.0[j] - k[j]).collect();
                        let d: Vec<u32> = (0..self.n).map(|j| rest[j] + b2.0[j]).collect();
                        out.insert(Mono(x), Mono(d), coeff);
                    }
                    if !odometer(&mut k, &cap) {
                        break;
                    }
                }
            }
        }
        out
    }

    pub fn commutator(&self, o: &DpOp) -> DpOp {
        self.mul(o).add(&o.mul(self).scale(self.p - 1))
    }

    /// Action on a polynomial: x^a D^(b) (x^m) = binom(m, b) x^{m-b+a}.
    pub fn apply(&self, f: &FpPoly) -> FpPoly {
        assert_eq!(self.p, f.p, "mixed characteristics");
        let mut out = FpPoly {
            p: self.p,
            n: self.n,
            terms: BTreeMap::new(),
        };
        for ((a, b), &c) in &self.terms {
            for (m, &cm) in &f.terms {
                if !b.divides(m) {
                    continue;
                }
                let mut coeff = c * cm % self.p;
                for j in 0..self.n {
                    coeff =
                        coeff * lucas_binom(m.0[j] as u64, b.0[j] as u64, self.p) % self.p;
                }
                if coeff != 0 {
                    let m2 = m.sub(b).checked_add(a).expect("exponent overflow");
                    out.insert(m2, coeff);
                }
            }
        }
        out
    }

    /// The least e such that the operator commutes with multiplication by
    /// every x_j^{p^e}, found by exact symbolic commutators and
    /// cross-checked against the digit bound max_j ceil(log_p(b_j + 1)).
    pub fn level_of(&self) -> u32 {
        let formula = self
            .terms
            .keys()
            .flat_map(|(_, b)| b.0.iter())
            .map(|&bj| {
                let mut e = 0u32;
                let mut q = 1u64;
                while q <= bj as u64 {
                    q *= self.p;
                    e += 1;
                }
                e
            })
            .max()
            .unwrap_or(0);
        let mut level = 0;
        'search: for e in 0..=formula {
            let q = self.p.pow(e);
            for j in 0..self.n {
                let xq = DpOp::from_fp_poly(
                    &FpPoly::monomial(
                        self.p,
                        Mono::unit(self.n, j)
                            .scale(u32::try_from(q).expect("p^e fits u32"))
                            .expect("exponent overflow"),
                        1,
                    )
                    .expect("prime already checked"),
                );
                if !self.commutator(&xq).is_zero() {
                    continue 'search;
                }
            }
            level = e;
            break;
        }
        assert_eq!(level, formula, "level characterizations disagree");
        level
    }
}

fn odometer(k: &mut [u32], cap: &[u32]) -> bool {
    for j in 0..k.len() {
        if k[j] < cap[j] {
            k[j] += 1;
            return true;
        }
        k[j] = 0;
    }
    false
}

impl fmt::Display for DpOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|((x, d), c)| {
                let mut factors = Vec::new();
                if *c != 1 || (x.is_zero() && d.is_zero()) {
                    factors.push(format!("{c}"));
                }
                if let Some(s) = x.render("x") {
                    factors.push(s);
                }
                for (j, &e) in d.0.iter().enumerate() {
                    if e == 1 {
                        factors.push(format!("D{}", j + 1));
                    } else if e > 1 {
                        factors.push(format!("D{}^({})", j + 1, e));
                    }
                }
                factors.join("*")
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Monomial ideal given by its minimal generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialIdeal {
    n: usize,
    gens: Vec<Mono>,
}

impl MonomialIdeal {
    pub fn new(n: usize, gens: Vec<Mono>) -> Result<MonomialIdeal> {
        for g in &gens {
            if g.nvars() != n {
                return Err(Error::ArityMismatch("ideal generator".into()));
            }
        }
        Ok(MonomialIdeal {
            n,
            gens: minimalize(gens),
        })
    }

    pub fn zero(n: usize) -> MonomialIdeal {
        MonomialIdeal { n, gens: vec![] }
    }

    pub fn unit(n: usize) -> MonomialIdeal {
        MonomialIdeal {
            n,
            gens: vec![Mono::zero(n)],
        }
    }

    /// The homogeneous maximal ideal (x_1, ..., x_n).
    pub fn maximal(n: usize) -> MonomialIdeal {
        MonomialIdeal {
            n,
            gens: minimalize((0..n).map(|j| Mono::unit(n, j)).collect()),
        }
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn gens(&self) -> &[Mono] {
        &self.gens
    }

    pub fn is_zero_ideal(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn is_unit(&self) -> bool {
        self.gens.iter().any(|g| g.is_zero())
    }

    pub fn member(&self, m: &Mono) -> bool {
        self.gens.iter().any(|g| g.divides(m))
    }

    pub fn member_poly(&self, f: &FpPoly) -> bool {
        f.terms().all(|(m, _)| self.member(m))
    }

    pub fn min_gen_degree(&self) -> Option<u64> {
        self.gens.iter().map(|g| g.deg()).min()
    }

    /// Bracket power: generator-wise q-th powers.
    pub fn frobenius_power(&self, q: u64) -> Result<MonomialIdeal> {
        let k = u32::try_from(q).map_err(|_| Error::ExponentOverflow)?;
        let gens = self
            .gens
            .iter()
            .map(|g| g.scale(k))
            .collect::<Result<Vec<_>>>()?;
        MonomialIdeal::new(self.n, gens)
    }

    /// (self : m) for a single monomial m.
    pub fn colon_mono(&self, m: &Mono) -> MonomialIdeal {
        let gens = self
            .gens
            .iter()
            .map(|g| {
                Mono(
                    g.0.iter()
                        .zip(&m.0)
                        .map(|(&a, &b)| a.saturating_sub(b))
                        .collect(),
                )
            })
            .collect();
        MonomialIdeal {
            n: self.n,
            gens: minimalize(gens),
        }
    }

    pub fn intersect(&self, o: &MonomialIdeal) -> MonomialIdeal {
        let mut gens = Vec::new();
        for g in &self.gens {
            for h in &o.gens {
                gens.push(g.lcm(h));
            }
        }
        MonomialIdeal {
            n: self.n,
            gens: minimalize(gens),
        }
    }

    /// (self : o) as the intersection of the single-monomial colons.
    pub fn colon(&self, o: &MonomialIdeal) -> MonomialIdeal {
        if o.is_zero_ideal() {
            return MonomialIdeal::unit(self.n);
        }
        let mut acc = MonomialIdeal::unit(self.n);
        for m in &o.gens {
            acc = acc.intersect(&self.colon_mono(m));
        }
        acc
    }

    pub fn contains(&self, o: &MonomialIdeal) -> bool {
        o.gens.iter().all(|g| self.member(g))
    }
}

fn minimalize(mut gens: Vec<Mono>) -> Vec<Mono> {
    gens.sort();
    gens.dedup();
    let keep: Vec<Mono> = gens
        .iter()
        .filter(|g| !gens.iter().any(|h| h != *g && h.divides(g)))
        .cloned()
        .collect();
    keep
}

impl fmt::Display for MonomialIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.gens.is_empty() {
            return write!(f, "(0)");
        }
        let mut gens = self.gens.clone();
        gens.sort_by(|a, b| b.cmp(a));
        let parts: Vec<String> = gens
            .iter()
            .map(|g| g.render("x").unwrap_or_else(|| "1".into()))
            .collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Presentation of the ring the splitting ideals are computed for.
#[derive(Clone, Debug)]
pub enum RingPresentation {
    Polynomial { p: u64, n: usize },
    MonomialQuotient { p: u64, n: usize, ideal: MonomialIdeal },
    PrincipalQuotient { f: FpPoly },
}

impl RingPresentation {
    pub fn p(&self) -> u64 {
        match self {
            RingPresentation::Polynomial { p, .. } => *p,
            RingPresentation::MonomialQuotient { p, .. } => *p,
            RingPresentation::PrincipalQuotient { f } => f.p(),
        }
    }

    pub fn nvars(&self) -> usize {
        match self {
            RingPresentation::Polynomial { n, .. } => *n,
            RingPresentation::MonomialQuotient { n, .. } => *n,
            RingPresentation::PrincipalQuotient { f } => f.nvars(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_prime(self.p())?;
        match self {
            RingPresentation::Polynomial { .. } => Ok(()),
            RingPresentation::MonomialQuotient { n, ideal, .. } => {
                if ideal.nvars() != *n {
                    return Err(Error::ArityMismatch("quotient ideal".into()));
                }
                if ideal.is_unit() {
                    return Err(Error::UnsupportedPresentation("unit ideal".into()));
                }
                Ok(())
            }
            RingPresentation::PrincipalQuotient { f } => {
                if f.is_zero() {
                    return Err(Error::UnsupportedPresentation(
                        "zero hypersurface equation; use the polynomial presentation".into(),
                    ));
                }
                if f.deg() == Some(0) {
                    return Err(Error::UnsupportedPresentation("unit ideal".into()));
                }
                Ok(())
            }
        }
    }
}

/// Named fixtures used across tests and the command-line interface.
pub fn ring_fixture(name: &str) -> Result<RingPresentation> {
    match name {
        "poly-p2-2" => Ok(RingPresentation::Polynomial { p: 2, n: 2 }),
        "xy-hypersurface-p2" => Ok(RingPresentation::MonomialQuotient {
            p: 2,
            n: 2,
            ideal: MonomialIdeal::new(2, vec![Mono(vec![1, 1])])?,
        }),
        "quadric-p3" => {
            // F_3[a, b, c] / (b^2 - a c)
            let b2 = FpPoly::monomial(3, Mono(vec![0, 2, 0]), 1)?;
            let ac = FpPoly::monomial(3, Mono(vec![1, 0, 1]), 2)?;
            Ok(RingPresentation::PrincipalQuotient { f: b2.add(&ac) })
        }
        "cusp-p5" => {
            // F_5[x, y] / (x^2 + y^3)
            let x2 = FpPoly::monomial(5, Mono(vec![2, 0]), 1)?;
            let y3 = FpPoly::monomial(5, Mono(vec![0, 3]), 1)?;
            Ok(RingPresentation::PrincipalQuotient { f: x2.add(&y3) })
        }
        "singh-swanson-p2" => {
            // F_2[s,t,u,v,w,x,y,z] / (s u^2 x^2 + s v^2 y^2 + t u x v y + t w^2 z^2);
            // slow beyond q = 2, kept as an optional fixture.
            let mk = |e: [u32; 8]| FpPoly::monomial(2, Mono(e.to_vec()), 1);
            let f = mk([1, 0, 2, 0, 0, 2, 0, 0])?
                .add(&mk([1, 0, 0, 2, 0, 0, 2, 0])?)
                .add(&mk([0, 1, 1, 1, 0, 1, 1, 0])?)
                .add(&mk([0, 1, 0, 0, 2, 0, 0, 2])?);
            Ok(RingPresentation::PrincipalQuotient { f })
        }
        other => Err(Error::Parse(format!("unknown ring fixture '{other}'"))),
    }
}

/// One computed splitting ideal I_e.
#[derive(Clone, Debug)]
pub struct SplittingIdeal {
    pub e: u32,
    pub q: u64,
    pub window: u64,
    pub contains_one: bool,
    /// Exact minimal generators on the monomial routes; None when the
    /// presentation forces the graded-kernel route.
    pub monomial: Option<MonomialIdeal>,
    /// (degree, dim of the I_e piece, ambient dim) for degrees up to the
    /// window.
    pub graded_dims: Vec<(u64, usize, usize)>,
    pub graded_basis: BTreeMap<u64, Vec<FpPoly>>,
}

fn monomials_of_degree(n: usize, d: u64) -> Vec<Mono> {
    monos_within(&vec![1u64; n], d)
        .into_iter()
        .filter(|m| m.deg() == d)
        .collect()
}

/// Splitting ideal by Fedder's criterion: r lies in I_e exactly when
/// r * (I^[q] : I) is contained in m^[q].  Monomial presentations reduce
/// to the exact colon m^[q] : (I^[q] : I); a principal I = (f) uses
/// (I^[q] : I) = (f^{q-1}) and per-degree kernels over F_p.
pub fn splitting_ideal(ring: &RingPresentation, e: u32, window: u64) -> Result<SplittingIdeal> {
    ring.validate()?;
    if e == 0 {
        return Err(Error::BadParameter("splitting ideals start at e = 1".into()));
    }
    let p = ring.p();
    let n = ring.nvars();
    let q = p
        .checked_pow(e)
        .ok_or(Error::ExponentOverflow)?;
    let mq = MonomialIdeal::maximal(n).frobenius_power(q)?;
    match ring {
        RingPresentation::Polynomial { .. } => Ok(monomial_splitting(e, q, window, n, p, mq)),
        RingPresentation::MonomialQuotient { ideal, .. } => {
            let colon = ideal.frobenius_power(q)?.colon(ideal);
            let result = mq.colon(&colon);
            Ok(monomial_splitting(e, q, window, n, p, result))
        }
        RingPresentation::PrincipalQuotient { f } => {
            let g = f.pow(q - 1);
            let mut graded_dims = Vec::new();
            let mut graded_basis = BTreeMap::new();
            for d in 0..=window {
                let cands = monomials_of_degree(n, d);
                let mut rowdict: BTreeMap<Mono, usize> = BTreeMap::new();
                let mut cols: Vec<Vec<(usize, u64)>> = Vec::new();
                for r in &cands {
                    let prod = g.mul(&FpPoly::monomial(p, r.clone(), 1)?);
                    let mut entries = Vec::new();
                    for (m, &c) in prod.terms() {
                        if mq.member(m) {
                            continue;
                        }
                        let next = rowdict.len();
                        let row = *rowdict.entry(m.clone()).or_insert(next);
                        entries.push((row, c));
                    }
                    cols.push(entries);
                }
                let nrows = rowdict.len();
                let mut mat = vec![vec![0u64; cands.len()]; nrows];
                for (cidx, entries) in cols.iter().enumerate() {
                    for &(ridx, c) in entries {
                        mat[ridx][cidx] = c;
                    }
                }
                let kernel = fp_kernel(mat, cands.len(), p);
                let basis: Vec<FpPoly> = kernel
                    .iter()
                    .map(|v| {
                        let mut poly = FpPoly::zero(p, n).expect("prime checked");
                        for (cidx, &c) in v.iter().enumerate() {
                            if c != 0 {
                                poly.insert(cands[cidx].clone(), c);
                            }
                        }
                        poly
                    })
                    .collect();
                graded_dims.push((d, basis.len(), cands.len()));
                graded_basis.insert(d, basis);
            }
            let contains_one = graded_dims[0].1 == 1;
            Ok(SplittingIdeal {
                e,
                q,
                window,
                contains_one,
                monomial: None,
                graded_dims,
                graded_basis,
            })
        }
    }
}

fn monomial_splitting(
    e: u32,
    q: u64,
    window: u64,
    n: usize,
    p: u64,
    ideal: MonomialIdeal,
) -> SplittingIdeal {
    let mut graded_dims = Vec::new();
    let mut graded_basis = BTreeMap::new();
    for d in 0..=window {
        let cands = monomials_of_degree(n, d);
        let members: Vec<Mono> = cands
            .iter()
            .filter(|m| ideal.member(m))
            .cloned()
            .collect();
        graded_dims.push((d, members.len(), cands.len()));
        graded_basis.insert(
            d,
            members
                .into_iter()
                .map(|m| FpPoly::monomial(p, m, 1).expect("prime"))
                .collect(),
        );
    }
    SplittingIdeal {
        e,
        q,
        window,
        contains_one: ideal.is_unit(),
        monomial: Some(ideal),
        graded_dims,
        graded_basis,
    }
}

/// Direct check of the splitting-ideal definition for e = 1 on monomial
/// presentations: the maps R^{1/p} -> R are spanned by u-multiples of the
/// componentwise projection onto x^{(p-1, ..., p-1)}, with u running over
/// the colon module; a monomial r splits exactly when some such map sends
/// r^{1/p} to a unit.
pub fn brute_force_splitting_ideal(
    ring: &RingPresentation,
    window: u64,
) -> Result<Vec<Mono>> {
    ring.validate()?;
    let p = ring.p();
    let n = ring.nvars();
    let colon = match ring {
        RingPresentation::Polynomial { .. } => MonomialIdeal::unit(n),
        RingPresentation::MonomialQuotient { ideal, .. } => {
            ideal.frobenius_power(p)?.colon(ideal)
        }
        RingPresentation::PrincipalQuotient { .. } => {
            return Err(Error::UnsupportedPresentation(
                "brute force check needs monomial data".into(),
            ))
        }
    };
    let box_cap = u32::try_from(p - 1).expect("small prime");
    let phi_target = Mono(vec![box_cap; n]);
    let mut members = Vec::new();
    for r in monos_within(&vec![1u64; n], window) {
        let big = r.0.iter().any(|&a| a as u64 >= p);
        let splits = if big {
            false
        } else {
            // Enumerate every u in the colon module with exponents below p;
            // only those can pair r into the projection target.
            let mut found = false;
            for u in monos_within(&vec![1u64; n], (p - 1) * n as u64) {
                if u.0.iter().any(|&a| a > box_cap) || !colon.member(&u) {
                    continue;
                }
                if let Ok(prod) = u.checked_add(&r) {
                    if prod == phi_target {
                        found = true;
                        break;
                    }
                }
            }
            found
        };
        if !splits {
            members.push(r);
        }
    }
    Ok(minimalize(members))
}

/// Scan over e with verdicts on F-purity and strong F-regularity.
#[derive(Clone, Debug)]
pub struct SplittingReport {
    pub p: u64,
    pub e_max: u32,
    pub window: u64,
    pub ideals: Vec<SplittingIdeal>,
    pub f_pure: bool,
    pub chain_verified: bool,
    /// Least a >= 1 with I_{a+e} inside m^{p^e} for every e the window can
    /// verify; evidence for strong F-regularity.
    pub witness_a: Option<u32>,
    /// The tail of the chain repeats a nonzero ideal; evidence against.
    pub stabilized_nonzero: bool,
    pub strictly_shrinking: bool,
    pub verdict: String,
}

pub fn f_regularity_scan(
    ring: &RingPresentation,
    e_max: u32,
    window: u64,
) -> Result<SplittingReport> {
    if e_max == 0 {
        return Err(Error::BadParameter("need e_max >= 1".into()));
    }
    let mut ideals = Vec::new();
    for e in 1..=e_max {
        ideals.push(splitting_ideal(ring, e, window)?);
    }
    let p = ring.p();
    let f_pure = !ideals[0].contains_one;
    for ideal in &ideals {
        if ideal.contains_one == f_pure {
            return Err(Error::BadParameter(
                "F-purity disagrees across levels".into(),
            ));
        }
    }
    let mut chain_verified = true;
    let mut strictly_shrinking = ideals.len() > 1;
    for w in ideals.windows(2) {
        let (lo, hi) = (&w[1], &w[0]);
        if !ideal_contains(hi, lo, p) {
            chain_verified = false;
        }
        if ideal_equal(hi, lo) {
            strictly_shrinking = false;
        }
    }
    let stabilized_nonzero = ideals.len() > 1 && {
        let last = &ideals[ideals.len() - 1];
        let prev = &ideals[ideals.len() - 2];
        ideal_equal(last, prev) && !ideal_is_zero_on_window(last)
    };
    let mut witness_a = None;
    'outer: for a in 1..e_max {
        for e in 1..=(e_max - a) {
            match ideal_in_m_power(&ideals[(a + e - 1) as usize], p.pow(e)) {
                Some(true) => {}
                _ => continue 'outer,
            }
        }
        witness_a = Some(a);
        break;
    }
    let verdict = if !f_pure {
        "not F-pure".to_string()
    } else if stabilized_nonzero {
        "F-pure, not strongly F-regular (window)".to_string()
    } else if let Some(a) = witness_a {
        format!("F-pure, strong-F-regularity evidence (witness a = {a})")
    } else if strictly_shrinking {
        "F-pure, strong-F-regularity evidence (strictly shrinking)".to_string()
    } else {
        "F-pure, inconclusive (window)".to_string()
    };
    Ok(SplittingReport {
        p,
        e_max,
        window,
        ideals,
        f_pure,
        chain_verified,
        witness_a,
        stabilized_nonzero,
        strictly_shrinking,
        verdict,
    })
}

fn ideal_contains(big: &SplittingIdeal, small: &SplittingIdeal, p: u64) -> bool {
    match (&big.monomial, &small.monomial) {
        (Some(bi), Some(si)) => bi.contains(si),
        _ => {
            for (d, basis) in &small.graded_basis {
                let Some(target) = big.graded_basis.get(d) else {
                    return false;
                };
                let n = if basis.is_empty() {
                    continue;
                } else {
                    basis[0].nvars()
                };
                let cands = monomials_of_degree(n, *d);
                let reduced = fp_row_reduce(
                    target
                        .iter()
                        .map(|f| poly_vector(f, &cands))
                        .collect(),
                    p,
                );
                for f in basis {
                    if !fp_in_row_space(&reduced, poly_vector(f, &cands), p) {
                        return false;
                    }
                }
            }
            true
        }
    }
}

fn ideal_equal(a: &SplittingIdeal, b: &SplittingIdeal) -> bool {
    match (&a.monomial, &b.monomial) {
        (Some(ai), Some(bi)) => ai == bi,
        _ => a.graded_dims == b.graded_dims,
    }
}

fn ideal_is_zero_on_window(a: &SplittingIdeal) -> bool {
    match &a.monomial {
        Some(ideal) => ideal.is_zero_ideal(),
        None => a.graded_dims.iter().all(|(_, dim, _)| *dim == 0),
    }
}

/// Some(true) when containment in the ordinary power m^k is verified,
/// Some(false) when refuted, None when the window cannot decide.
fn ideal_in_m_power(a: &SplittingIdeal, k: u64) -> Option<bool> {
    match &a.monomial {
        Some(ideal) => Some(ideal.gens().iter().all(|g| g.deg() >= k)),
        None => {
            if a.window + 1 < k {
                return None;
            }
            Some(
                a.graded_dims
                    .iter()
                    .all(|(d, dim, _)| *d >= k || *dim == 0),
            )
        }
    }
}

fn poly_vector(f: &FpPoly, cands: &[Mono]) -> Vec<u64> {
    cands.iter().map(|m| f.coeff(m)).collect()
}

pub(crate) fn fp_inv(a: u64, p: u64) -> u64 {
    // Fermat inverse; p is prime and a nonzero mod p.
    let mut acc = 1u64;
    let mut base = a % p;
    let mut k = p - 2;
    while k > 0 {
        if k & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        k >>= 1;
    }
    acc
}

fn fp_row_reduce(mut rows: Vec<Vec<u64>>, p: u64) -> Vec<Vec<u64>> {
    let cols = rows.first().map(|r| r.len()).unwrap_or(0);
    let mut out: Vec<Vec<u64>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    for row in rows.iter_mut() {
        let mut r = row.clone();
        for (prow, &pc) in out.iter().zip(&pivots) {
            if r[pc] != 0 {
                let factor = r[pc];
                for j in 0..cols {
                    r[j] = (r[j] + (p - factor % p) % p * prow[j]) % p;
                }
            }
        }
        if let Some(lead) = (0..cols).find(|&j| r[j] != 0) {
            let inv = fp_inv(r[lead], p);
            for x in r.iter_mut() {
                *x = *x * inv % p;
            }
            out.push(r);
            pivots.push(lead);
        }
    }
    out
}

fn fp_in_row_space(reduced: &[Vec<u64>], mut v: Vec<u64>, p: u64) -> bool {
    for prow in reduced {
        let pc = prow.iter().position(|&x| x != 0).expect("reduced row");
        if v[pc] != 0 {
            let factor = v[pc];
            for j in 0..v.len() {
                v[j] = (v[j] + (p - factor) % p * prow[j]) % p;
            }
        }
    }
    v.iter().all(|&x| x == 0)
}

/// Null-space basis of the matrix (rows are constraints) over F_p.
fn fp_kernel(rows: Vec<Vec<u64>>, cols: usize, p: u64) -> Vec<Vec<u64>> {
    let reduced = fp_row_reduce(rows, p);
    let mut pivot_of_col: BTreeMap<usize, usize> = BTreeMap::new();
    for (i, row) in reduced.iter().enumerate() {
        let pc = row.iter().position(|&x| x != 0).expect("reduced row");
        pivot_of_col.insert(pc, i);
    }
    let mut kernel = Vec::new();
    for free in 0..cols {
        if pivot_of_col.contains_key(&free) {
            continue;
        }
        let mut v = vec![0u64; cols];
        v[free] = 1;
        for (&pc, &ri) in pivot_of_col.iter().rev() {
            let mut s: u64 = 0;
            for j in (pc + 1)..cols {
                s = (s + reduced[ri][j] * v[j]) % p;
            }
            v[pc] = (p - s % p) % p;
        }
        kernel.push(v);
    }
    kernel
}

/// Multiplicity of the class-j graded summand of the q-th root of the
/// r-th Veronese of a polynomial ring in n variables:
/// #\{gamma in [0, p^e)^n : sum gamma = j mod r\}.
pub fn veronese_ffrt(n: usize, r: u64, p: u64, e: u32) -> Result<BTreeMap<u64, u128>> {
    check_prime(p)?;
    if n == 0 || r == 0 {
        return Err(Error::BadParameter("need n >= 1 and r >= 1".into()));
    }
    let q = p
        .checked_pow(e)
        .filter(|&q| q <= 1 << 31)
        .ok_or(Error::ExponentOverflow)?;
    let full = q / r;
    let rem = q % r;
    let hist: Vec<u128> = (0..r)
        .map(|t| full as u128 + if t < rem { 1 } else { 0 })
        .collect();
    let mut counts = vec![0u128; r as usize];
    counts[0] = 1;
    for _ in 0..n {
        let mut next = vec![0u128; r as usize];
        for (t, &c) in counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (g, &h) in hist.iter().enumerate() {
                let slot = (t + g) % r as usize;
                next[slot] += c * h;
            }
        }
        counts = next;
    }
    Ok(counts
        .into_iter()
        .enumerate()
        .map(|(j, c)| (j as u64, c))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn lucas_matches_factorials() {
        for p in [2u64, 3, 5] {
            for m in 0..=12u64 {
                for k in 0..=m {
                    let exact = (small_binom(m, k) % p as u128) as u64;
                    assert_eq!(lucas_binom(m, k, p), exact, "binom({m},{k}) mod {p}");
                }
            }
            assert_eq!(lucas_binom(5, 7, p), 0);
        }
    }

    #[test]
    fn dp_action_goldens() {
        for p in [2u64, 3, 5] {
            let xp = FpPoly::monomial(p, Mono(vec![u32::try_from(p).unwrap()]), 1).unwrap();
            let dpp = DpOp::dp(p, Mono(vec![u32::try_from(p).unwrap()])).unwrap();
            assert_eq!(dpp.apply(&xp), FpPoly::one(p, 1).unwrap());
            let d1 = DpOp::dp(p, Mono(vec![1])).unwrap();
            assert!(d1.apply(&xp).is_zero());
        }
    }

    #[test]
    fn dp_defining_relation() {
        let p = 5;
        let d = DpOp::dp(p, Mono(vec![1])).unwrap();
        let x = DpOp::from_fp_poly(&FpPoly::var(p, 1, 0).unwrap());
        let expected = DpOp::term(p, Mono(vec![1]), Mono(vec![1]), 1)
            .unwrap()
            .add(&DpOp::one(p, 1).unwrap());
        assert_eq!(d.mul(&x), expected);
    }

    fn random_dp(rng: &mut ChaCha8Rng, p: u64, n: usize) -> DpOp {
        let mut op = DpOp::zero(p, n).unwrap();
        for _ in 0..3 {
            let x = Mono((0..n).map(|_| rng.gen_range(0..4)).collect());
            let d = Mono((0..n).map(|_| rng.gen_range(0..4)).collect());
            op = op
                .add(&DpOp::term(p, x, d, rng.gen_range(1..p)).unwrap());
        }
        op
    }

    fn random_fp_poly(rng: &mut ChaCha8Rng, p: u64, n: usize) -> FpPoly {
        let mut f = FpPoly::zero(p, n).unwrap();
        for _ in 0..4 {
            let m = Mono((0..n).map(|_| rng.gen_range(0..5)).collect());
            f = f.add(&FpPoly::monomial(p, m, rng.gen_range(1..p)).unwrap());
        }
        f
    }

    #[test]
    fn dp_associative_and_action_compatible() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for p in [2u64, 3] {
            for _ in 0..40 {
                let n = rng.gen_range(1..=2);
                let a = random_dp(&mut rng, p, n);
                let b = random_dp(&mut rng, p, n);
                let c = random_dp(&mut rng, p, n);
                assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
                let f = random_fp_poly(&mut rng, p, n);
                assert_eq!(a.mul(&b).apply(&f), a.apply(&b.apply(&f)));
            }
        }
    }

    #[test]
    fn level_goldens() {
        let d1 = DpOp::dp(2, Mono(vec![1])).unwrap();
        assert_eq!(d1.level_of(), 1);
        let d2 = DpOp::dp(2, Mono(vec![2])).unwrap();
        assert_eq!(d2.level_of(), 2);
        let x = DpOp::from_fp_poly(&FpPoly::var(2, 1, 0).unwrap());
        assert_eq!(x.level_of(), 0);
        assert_eq!(DpOp::zero(3, 2).unwrap().level_of(), 0);
    }

    #[test]
    fn level_detected_on_monomial_basis() {
        // A level-e operator moves some x^m when bracketed with a smaller
        // power, and moves none at p^e.
        let p = 3u64;
        let op = DpOp::dp(p, Mono(vec![4])).unwrap(); // level 2: 3 < 4+1 <= 9
        assert_eq!(op.level_of(), 2);
        let x3 = DpOp::from_fp_poly(
            &FpPoly::monomial(p, Mono(vec![3]), 1).unwrap(),
        );
        let bracket = op.commutator(&x3);
        assert!(!bracket.is_zero());
        let mut moved = false;
        for m in 0..10u32 {
            let probe = FpPoly::monomial(p, Mono(vec![m]), 1).unwrap();
            if !bracket.apply(&probe).is_zero() {
                moved = true;
            }
        }
        assert!(moved);
        let x9 = DpOp::from_fp_poly(
            &FpPoly::monomial(p, Mono(vec![9]), 1).unwrap(),
        );
        assert!(op.commutator(&x9).is_zero());
    }

    #[test]
    fn order_level_containments() {
        // Order <= i forces level <= ceil(log_p(i + 1)).
        for p in [2u64, 3] {
            for n in 1..=2usize {
                for beta in monos_within(&vec![1u64; n], 8) {
                    let i = beta.deg();
                    let op = DpOp::dp(p, beta).unwrap();
                    let mut bound = 0u32;
                    let mut q = 1u64;
                    while q < i + 1 {
                        q *= p;
                        bound += 1;
                    }
                    assert!(op.level_of() <= bound);
                }
            }
        }
        // Level <= e forces order <= n (p^e - 1).
        for p in [2u64, 3] {
            for n in 1..=2usize {
                for e in 0..=2u32 {
                    let cap = (p.pow(e) - 1) as u64;
                    for beta in monos_within(&vec![1u64; n], cap * n as u64) {
                        if beta.0.iter().any(|&b| b as u64 > cap) {
                            continue;
                        }
                        let op = DpOp::dp(p, beta.clone()).unwrap();
                        assert!(op.level_of() <= e);
                        assert!(op.order() <= n as u64 * cap);
                    }
                }
            }
        }
    }

    #[test]
    fn frobenius_and_colon_goldens() {
        let xy = MonomialIdeal::new(2, vec![Mono(vec![1, 1])]).unwrap();
        assert_eq!(
            xy.frobenius_power(2).unwrap().gens(),
            &[Mono(vec![2, 2])]
        );
        let m = MonomialIdeal::maximal(2);
        assert_eq!(
            m.frobenius_power(2).unwrap().gens(),
            &[Mono(vec![0, 2]), Mono(vec![2, 0])]
        );
        let mixed = MonomialIdeal::new(2, vec![Mono(vec![2, 0]), Mono(vec![1, 1])]).unwrap();
        assert_eq!(
            mixed.frobenius_power(3).unwrap().gens(),
            &[Mono(vec![3, 3]), Mono(vec![6, 0])]
        );

        let x2y2 = MonomialIdeal::new(2, vec![Mono(vec![2, 2])]).unwrap();
        assert_eq!(x2y2.colon_mono(&Mono(vec![1, 1])).gens(), &[Mono(vec![1, 1])]);
        let mq = MonomialIdeal::new(2, vec![Mono(vec![2, 0]), Mono(vec![0, 2])]).unwrap();
        let res = mq.colon_mono(&Mono(vec![1, 1]));
        assert_eq!(res.gens(), &[Mono(vec![0, 1]), Mono(vec![1, 0])]);
    }

    #[test]
    fn minimalization_and_membership() {
        let ideal =
            MonomialIdeal::new(2, vec![Mono(vec![1, 0]), Mono(vec![2, 1]), Mono(vec![1, 0])])
                .unwrap();
        assert_eq!(ideal.gens(), &[Mono(vec![1, 0])]);
        assert!(ideal.member(&Mono(vec![3, 2])));
        assert!(!ideal.member(&Mono(vec![0, 5])));
        let a = MonomialIdeal::new(2, vec![Mono(vec![2, 0])]).unwrap();
        let b = MonomialIdeal::new(2, vec![Mono(vec![0, 3])]).unwrap();
        assert_eq!(a.intersect(&b).gens(), &[Mono(vec![2, 3])]);
    }

    #[test]
    fn splitting_goldens() {
        let xy = ring_fixture("xy-hypersurface-p2").unwrap();
        let i1 = splitting_ideal(&xy, 1, 4).unwrap();
        assert_eq!(
            i1.monomial.as_ref().unwrap().gens(),
            &[Mono(vec![0, 1]), Mono(vec![1, 0])]
        );
        assert!(!i1.contains_one);

        let poly = ring_fixture("poly-p2-2").unwrap();
        for e in 1..=3u32 {
            let ie = splitting_ideal(&poly, e, 4).unwrap();
            let q = 2u64.pow(e);
            let expected = MonomialIdeal::maximal(2).frobenius_power(q).unwrap();
            assert_eq!(ie.monomial.as_ref().unwrap(), &expected);
        }

        let cusp = ring_fixture("cusp-p5").unwrap();
        let i1 = splitting_ideal(&cusp, 1, 3).unwrap();
        assert!(i1.contains_one, "cusp over F_5 is not F-pure");
    }

    #[test]
    fn brute_force_agrees_with_fedder() {
        for name in ["xy-hypersurface-p2", "poly-p2-2"] {
            let ring = ring_fixture(name).unwrap();
            let bf = brute_force_splitting_ideal(&ring, 4).unwrap();
            let fedder = splitting_ideal(&ring, 1, 4).unwrap();
            let gens = fedder.monomial.as_ref().unwrap().gens();
            assert_eq!(bf.as_slice(), gens, "{name}");
        }
    }

    #[test]
    fn scan_xy_hypersurface() {
        let ring = ring_fixture("xy-hypersurface-p2").unwrap();
        let report = f_regularity_scan(&ring, 4, 4).unwrap();
        assert!(report.f_pure);
        assert!(report.chain_verified);
        for ideal in &report.ideals {
            assert_eq!(
                ideal.monomial.as_ref().unwrap(),
                &MonomialIdeal::maximal(2)
            );
        }
        assert!(report.stabilized_nonzero);
        assert_eq!(report.witness_a, None);
        assert_eq!(report.verdict, "F-pure, not strongly F-regular (window)");
    }

    #[test]
    fn scan_polynomial_ring() {
        let ring = ring_fixture("poly-p2-2").unwrap();
        let report = f_regularity_scan(&ring, 4, 4).unwrap();
        assert!(report.f_pure);
        assert!(report.chain_verified);
        assert_eq!(report.witness_a, Some(1));
        assert!(report.verdict.contains("witness a = 1"));
    }

    #[test]
    fn scan_quadric() {
        let ring = ring_fixture("quadric-p3").unwrap();
        let report = f_regularity_scan(&ring, 3, 8).unwrap();
        assert!(report.f_pure);
        assert!(report.chain_verified);
        assert!(report.strictly_shrinking);
        assert!(!report.stabilized_nonzero);
        assert!(report.verdict.contains("strong-F-regularity evidence"));
    }

    #[test]
    fn cusp_not_f_pure() {
        let ring = ring_fixture("cusp-p5").unwrap();
        let report = f_regularity_scan(&ring, 2, 4).unwrap();
        assert!(!report.f_pure);
        assert_eq!(report.verdict, "not F-pure");
    }

    #[test]
    fn singh_swanson_smoke() {
        let ring = ring_fixture("singh-swanson-p2").unwrap();
        let i1 = splitting_ideal(&ring, 1, 2).unwrap();
        assert!(!i1.contains_one, "the hypersurface is F-pure at q = 2");
    }

    #[test]
    fn veronese_goldens() {
        let counts = veronese_ffrt(1, 2, 3, 1).unwrap();
        assert_eq!(counts[&0], 2);
        assert_eq!(counts[&1], 1);
        let counts = veronese_ffrt(2, 2, 3, 1).unwrap();
        assert_eq!(counts[&0], 5);
        assert_eq!(counts[&1], 4);
        let counts = veronese_ffrt(2, 1, 5, 1).unwrap();
        assert_eq!(counts[&0], 25);
        for (n, r, p, e) in [(1usize, 3u64, 2u64, 2u32), (2, 4, 3, 1), (3, 2, 2, 2)] {
            let counts = veronese_ffrt(n, r, p, e).unwrap();
            let total: u128 = counts.values().sum();
            assert_eq!(total, (p as u128).pow(e * n as u32));
            // the set of classes that occur is stable across e
            let support = |m: &BTreeMap<u64, u128>| {
                m.iter().filter(|(_, &c)| c > 0).map(|(&j, _)| j).collect::<Vec<_>>()
            };
            let again = veronese_ffrt(n, r, p, e + 1).unwrap();
            assert_eq!(support(&counts), support(&again));
        }
    }
}
