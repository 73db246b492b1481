//! D-module structures on localizations R_f and on R_f[s] f^s: the
//! recursive localization action, the Theta homomorphism into s-parametric
//! operators, integer specialization, a bounded search for Bernstein-Sato
//! pairs (b, delta), and growth reports giving holonomicity evidence.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::bernstein::{eps_and_order_domination, WeightedRingSpec};
use crate::error::{Error, Result};
use crate::filtration::{dim_estimate, DimSequence, GrowthEstimate};
use crate::invariants::FiniteMatrixGroup;
use crate::linalg::{solve_system, Eliminator, SRow};
use crate::mono::{monos_within, Mono};
use crate::poly::Poly;
use crate::rat::{binom_i64, rat_i, Rat};
use crate::spoly::SPoly;
use crate::weyl::{QOp, SOp, WeylOp};

/// Ambient localization R_f: a fixed nonzero denominator base.
#[derive(Clone, Debug)]
pub struct LocalizedRing {
    f: Poly,
    n: usize,
}

/// A fraction p / f^t.  Normalized so that f does not divide p when t > 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalizedElement {
    pub num: Poly,
    pub t: u32,
}

impl LocalizedRing {
    pub fn new(f: Poly) -> Result<LocalizedRing> {
        if f.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = f.nvars();
        Ok(LocalizedRing { f, n })
    }

    pub fn f(&self) -> &Poly {
        &self.f
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn from_poly(&self, p: Poly) -> LocalizedElement {
        LocalizedElement { num: p, t: 0 }
    }

    pub fn zero(&self) -> LocalizedElement {
        self.from_poly(Poly::zero(self.n))
    }

    pub fn elt(&self, num: Poly, t: u32) -> LocalizedElement {
        self.normalize(num, t)
    }

    fn normalize(&self, mut num: Poly, mut t: u32) -> LocalizedElement {
        if num.is_zero() {
            return LocalizedElement {
                num,
                t: 0,
            };
        }
        while t > 0 {
            match num.divide_exact(&self.f) {
                Ok(q) => {
                    num = q;
                    t -= 1;
                }
                Err(_) => break,
            }
        }
        LocalizedElement { num, t }
    }

    pub fn add(&self, a: &LocalizedElement, b: &LocalizedElement) -> LocalizedElement {
        let t = a.t.max(b.t);
        let num = a
            .num
            .mul(&self.f.pow(t - a.t))
            .add(&b.num.mul(&self.f.pow(t - b.t)));
        self.normalize(num, t)
    }

    pub fn sub(&self, a: &LocalizedElement, b: &LocalizedElement) -> LocalizedElement {
        self.add(a, &self.scale(b, &rat_i(-1)))
    }

    pub fn scale(&self, a: &LocalizedElement, c: &Rat) -> LocalizedElement {
        LocalizedElement {
            num: a.num.scale(c),
            t: if c.is_zero() { 0 } else { a.t },
        }
    }

    pub fn mul(&self, a: &LocalizedElement, b: &LocalizedElement) -> LocalizedElement {
        self.normalize(a.num.mul(&b.num), a.t + b.t)
    }

    /// Multiplies by f^k for any integer k.
    pub fn mul_fpow(&self, a: &LocalizedElement, k: i64) -> LocalizedElement {
        if a.num.is_zero() {
            return self.zero();
        }
        if k >= 0 {
            let k = k as u32;
            if k <= a.t {
                LocalizedElement {
                    num: a.num.clone(),
                    t: a.t - k,
                }
            } else {
                self.normalize(a.num.mul(&self.f.pow(k - a.t)), 0)
            }
        } else {
            self.normalize(a.num.clone(), a.t + (-k) as u32)
        }
    }

    pub fn eq(&self, a: &LocalizedElement, b: &LocalizedElement) -> bool {
        a.num.mul(&self.f.pow(b.t)) == b.num.mul(&self.f.pow(a.t))
    }

    /// The unique extension of the operator action to R_f, by recursion on
    /// the operator order: delta(p/f^t) = (delta(p) - [delta, f^t](p/f^t))/f^t.
    pub fn act(&self, op: &QOp, v: &LocalizedElement) -> LocalizedElement {
        if op.is_zero() || v.num.is_zero() {
            return self.zero();
        }
        if v.t == 0 {
            return self.from_poly(op.apply(&v.num));
        }
        if op.order() == 0 {
            let g = op.to_poly().expect("order-zero operator is a polynomial");
            return self.normalize(v.num.mul(&g), v.t);
        }
        let ft = WeylOp::from_poly(&self.f.pow(v.t));
        let comm = op.commutator(&ft);
        let w = self.act(&comm, v);
        let direct = self.from_poly(op.apply(&v.num));
        let diff = self.sub(&direct, &w);
        self.mul_fpow(&diff, -(v.t as i64))
    }

    /// Closed form of the same action:
    /// delta(p/f^t) = sum_i binom(-t, i) delta^(i)(p) / f^(t+i).
    pub fn act_closed(&self, op: &QOp, v: &LocalizedElement) -> LocalizedElement {
        let chain = op.bracket_chain(&self.f);
        let mut acc = self.zero();
        for (i, di) in chain.iter().enumerate() {
            let c = binom_i64(-(v.t as i64), i as u32);
            if c.is_zero() {
                continue;
            }
            let w = self.from_poly(di.apply(&v.num).scale(&c));
            let w = self.mul_fpow(&w, -((v.t + i as u32) as i64));
            acc = self.add(&acc, &w);
        }
        acc
    }

    /// Checks `delta f^j = sum_i binom(j, i) f^(j-i) delta^(i)` for any
    /// integer j by applying both sides to a probe element of R_f.
    pub fn commute_probe(&self, op: &QOp, j: i64, v: &LocalizedElement) -> bool {
        let lhs = self.act(op, &self.mul_fpow(v, j));
        let chain = op.bracket_chain(&self.f);
        let mut rhs = self.zero();
        for (i, di) in chain.iter().enumerate() {
            let c = binom_i64(j, i as u32);
            if c.is_zero() {
                continue;
            }
            let w = self.scale(&self.act(di, v), &c);
            let w = self.mul_fpow(&w, j - i as i64);
            rhs = self.add(&rhs, &w);
        }
        self.eq(&lhs, &rhs)
    }
}

impl LocalizedElement {
    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl std::fmt::Display for LocalizedElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.t == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / f^{}", self.num, self.t)
        }
    }
}

/// An s-parametric operator with cleared denominators: f^(-fpow) * num.
#[derive(Clone, Debug)]
pub struct SFrac {
    pub fpow: u32,
    pub num: SOp,
}

/// Theta(delta) = sum_i binom(s, i) f^(-i) delta^(i), the ring map that
/// carries the operator action across to R_f[s] f^s.
pub fn theta_hom(ring: &LocalizedRing, op: &QOp) -> SFrac {
    let m = op.order();
    let chain = op.bracket_chain(&ring.f);
    let mut num = WeylOp::<SPoly>::zero(ring.n);
    for (i, di) in chain.iter().enumerate() {
        let fterm = WeylOp::<SPoly>::from_poly(&ring.f.pow(m - i as u32));
        let term = fterm.mul(&di.lift_s()).scale(&SPoly::binom_s(i as u32));
        num = num.add(&term);
    }
    SFrac { fpow: m, num }
}

/// Product of two cleared-denominator operators, moving the numerator of
/// the left factor across the right factor's f-power by the commutation
/// identity.
pub fn sfrac_mul(ring: &LocalizedRing, a: &SFrac, b: &SFrac) -> SFrac {
    let ord = a.num.order();
    let chain = a.num.bracket_chain(&ring.f);
    let total = a.fpow + b.fpow + ord;
    let mut num = WeylOp::<SPoly>::zero(ring.n);
    for (i, ai) in chain.iter().enumerate() {
        let c = binom_i64(-(b.fpow as i64), i as u32);
        if c.is_zero() {
            continue;
        }
        let shift = total - a.fpow - b.fpow - i as u32;
        let fterm = WeylOp::<SPoly>::from_poly(&ring.f.pow(shift));
        let term = fterm.mul(ai).mul(&b.num).scale_rat(&c);
        num = num.add(&term);
    }
    SFrac { fpow: total, num }
}

/// Equality after clearing to a common left f-power.
pub fn sfrac_eq(ring: &LocalizedRing, a: &SFrac, b: &SFrac) -> bool {
    let m = a.fpow.max(b.fpow);
    let fa = WeylOp::<SPoly>::from_poly(&ring.f.pow(m - a.fpow));
    let fb = WeylOp::<SPoly>::from_poly(&ring.f.pow(m - b.fpow));
    fa.mul(&a.num) == fb.mul(&b.num)
}

/// An element a(s) f^s of R_f[s] f^s: coefficient k is the R_f coefficient
/// of s^k.
#[derive(Clone, Debug)]
pub struct FsElement {
    pub coeffs: Vec<LocalizedElement>,
}

impl FsElement {
    pub fn from_localized(v: LocalizedElement) -> FsElement {
        FsElement { coeffs: vec![v] }
    }

    /// The bare symbol f^s.
    pub fn fs(ring: &LocalizedRing) -> FsElement {
        FsElement::from_localized(ring.from_poly(Poly::one(ring.n)))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
}

pub fn fs_eq(ring: &LocalizedRing, a: &FsElement, b: &FsElement) -> bool {
    let len = a.coeffs.len().max(b.coeffs.len());
    for k in 0..len {
        let za = ring.zero();
        let x = a.coeffs.get(k).unwrap_or(&za);
        let y = b.coeffs.get(k).unwrap_or(&za);
        if !ring.eq(x, y) {
            return false;
        }
    }
    true
}

pub fn fs_add(ring: &LocalizedRing, a: &FsElement, b: &FsElement) -> FsElement {
    let len = a.coeffs.len().max(b.coeffs.len());
    let mut coeffs = Vec::with_capacity(len);
    for k in 0..len {
        let za = ring.zero();
        let x = a.coeffs.get(k).unwrap_or(&za);
        let y = b.coeffs.get(k).unwrap_or(&za);
        coeffs.push(ring.add(x, y));
    }
    FsElement { coeffs }
}

/// Multiplies a(s) f^s by a scalar polynomial q(s).
pub fn fs_scale_spoly(ring: &LocalizedRing, q: &SPoly, u: &FsElement) -> FsElement {
    let qdeg = q.deg().unwrap_or(0);
    let mut coeffs = vec![ring.zero(); u.coeffs.len() + qdeg];
    for (j, cj) in q.coeffs().iter().enumerate() {
        if cj.is_zero() {
            continue;
        }
        for (m, vm) in u.coeffs.iter().enumerate() {
            let add = ring.scale(vm, cj);
            coeffs[j + m] = ring.add(&coeffs[j + m], &add);
        }
    }
    FsElement { coeffs }
}

/// The action of D[s] on R_f[s] f^s:
/// delta . (a(s) f^s) = sum_i binom(s, i) f^(-i) delta^(i)(a(s)) f^s.
pub fn fs_act(ring: &LocalizedRing, op: &SOp, u: &FsElement) -> FsElement {
    let kmax = op.s_degree().unwrap_or(0);
    let mut slots: BTreeMap<usize, LocalizedElement> = BTreeMap::new();
    for k in 0..=kmax {
        let dk = op.s_coefficient(k);
        if dk.is_zero() {
            continue;
        }
        let chain = dk.bracket_chain(&ring.f);
        for (m, vm) in u.coeffs.iter().enumerate() {
            if vm.is_zero() {
                continue;
            }
            for (i, di) in chain.iter().enumerate() {
                let w = ring.act(di, vm);
                if w.is_zero() {
                    continue;
                }
                let w = ring.mul_fpow(&w, -(i as i64));
                let bs = SPoly::binom_s(i as u32);
                for (j, cj) in bs.coeffs().iter().enumerate() {
                    if cj.is_zero() {
                        continue;
                    }
                    let slot = slots.entry(k + m + j).or_insert_with(|| ring.zero());
                    *slot = ring.add(slot, &ring.scale(&w, cj));
                }
            }
        }
    }
    let len = slots.keys().next_back().map_or(0, |k| k + 1);
    let mut coeffs = vec![ring.zero(); len.max(1)];
    for (k, v) in slots {
        coeffs[k] = v;
    }
    FsElement { coeffs }
}

/// Substitutes s -> t and folds f^t into the fraction.
pub fn specialize(ring: &LocalizedRing, u: &FsElement, t: i64) -> LocalizedElement {
    let mut acc = ring.zero();
    let mut power = rat_i(1);
    for vm in &u.coeffs {
        acc = ring.add(&acc, &ring.scale(vm, &power));
        power *= rat_i(t);
    }
    ring.mul_fpow(&acc, t)
}

/// A verified Bernstein-Sato pair within declared search bounds.
#[derive(Clone, Debug)]
pub struct BsSolution {
    pub b: SPoly,
    pub delta: SOp,
    pub verified: bool,
    pub minimal_in_search: bool,
    pub level: u64,
    pub s_degree: u32,
    pub b_degree: u32,
    pub invariant_space: bool,
}

/// Searches for the least-degree monic b(s) with
/// delta . (f f^s) = b(s) f^s for some delta in the level-`level`
/// Bernstein space (optionally its G-invariant part) tensored with
/// {1, s, .., s^sdeg}.  Minimality is relative to these bounds.
pub fn bs_solve(
    f: &Poly,
    level: u64,
    sdeg: u32,
    bdeg_max: u32,
    group: Option<&FiniteMatrixGroup>,
) -> Result<Option<BsSolution>> {
    if f.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let n = f.nvars();
    let spec = WeightedRingSpec::standard(n, 2)?;
    let ring = LocalizedRing::new(f.clone())?;
    let basis_ops: Vec<QOp> = match group {
        None => spec
            .basis(level)
            .into_iter()
            .map(|(x, d)| WeylOp::term(x, d, rat_i(1)))
            .collect(),
        Some(g) => {
            if !g.is_grading_preserving(spec.weights()) {
                return Err(Error::GradingNotPreserved);
            }
            if crate::invariants::reynolds_poly(g, f) != *f {
                return Err(Error::BadParameter(
                    "denominator polynomial is not invariant".into(),
                ));
            }
            crate::invariants::invariant_bf_basis(g, &spec, level)?.basis
        }
    };
    if basis_ops.is_empty() {
        return Ok(None);
    }
    let m = basis_ops.iter().map(|op| op.order()).max().unwrap_or(0);
    let u_f = FsElement::from_localized(ring.from_poly(f.clone()));

    // Cleared image of each basis operator: f^m * (eta . f f^s) lies in
    // S[s]; store it as coefficients over (monomial, s-power) keys.
    let mut images: Vec<BTreeMap<(Mono, usize), Rat>> = Vec::with_capacity(basis_ops.len());
    for eta in &basis_ops {
        let acted = fs_act(&ring, &eta.lift_s(), &u_f);
        let mut entry = BTreeMap::new();
        for (j, vj) in acted.coeffs.iter().enumerate() {
            let cleared = ring.mul_fpow(vj, m as i64);
            assert_eq!(cleared.t, 0, "clearing f^m must reach the ring");
            for (mono, c) in cleared.num.terms() {
                entry.insert((mono.clone(), j), c.clone());
            }
        }
        images.push(entry);
    }
    let fm = f.pow(m);

    for d in 0..=bdeg_max {
        // Unknown columns: (basis op, s-power) pairs, then b_0..b_(d-1).
        let nops = basis_ops.len();
        let kmax = sdeg as usize;
        let ncols = nops * (kmax + 1) + d as usize;
        let mut rows: BTreeMap<(Mono, usize), BTreeMap<usize, Rat>> = BTreeMap::new();
        for (e, img) in images.iter().enumerate() {
            for ((mono, j), c) in img {
                for k in 0..=kmax {
                    let col = e * (kmax + 1) + k;
                    let key = (mono.clone(), j + k);
                    let slot = rows.entry(key).or_default();
                    let cur = slot.entry(col).or_insert_with(Rat::zero);
                    *cur += c;
                }
            }
        }
        // b(s) f^m on the right: monic s^d term is the inhomogeneity, the
        // lower coefficients are unknowns with sign flipped to the left.
        for (mono, c) in fm.terms() {
            for j in 0..d as usize {
                let col = nops * (kmax + 1) + j;
                let slot = rows.entry((mono.clone(), j)).or_default();
                let cur = slot.entry(col).or_insert_with(Rat::zero);
                *cur -= c;
            }
        }
        let mut eqs: Vec<(SRow, Rat)> = Vec::with_capacity(rows.len());
        let mut keys: Vec<(Mono, usize)> = rows.keys().cloned().collect();
        for (mono, _) in fm.terms() {
            let key = (mono.clone(), d as usize);
            if !rows.contains_key(&key) {
                keys.push(key);
            }
        }
        keys.sort();
        keys.dedup();
        for key in keys {
            let lhs: SRow = rows
                .get(&key)
                .map(|r| {
                    r.iter()
                        .filter(|(_, c)| !c.is_zero())
                        .map(|(j, c)| (*j, c.clone()))
                        .collect()
                })
                .unwrap_or_default();
            let rhs = if key.1 == d as usize {
                fm.coeff(&key.0)
            } else {
                Rat::zero()
            };
            eqs.push((lhs, rhs));
        }
        let Some(sol) = solve_system(eqs, ncols) else {
            continue;
        };
        let mut delta = WeylOp::<SPoly>::zero(n);
        for (e, eta) in basis_ops.iter().enumerate() {
            for k in 0..=kmax {
                let c = &sol[e * (kmax + 1) + k];
                if c.is_zero() {
                    continue;
                }
                let mut sc = vec![Rat::zero(); k + 1];
                sc[k] = c.clone();
                let spow = SPoly::from_coeffs(sc);
                delta = delta.add(&eta.lift_s().scale(&spow));
            }
        }
        let mut bc = vec![Rat::zero(); d as usize + 1];
        for j in 0..d as usize {
            bc[j] = sol[nops * (kmax + 1) + j].clone();
        }
        bc[d as usize] = rat_i(1);
        let b = SPoly::from_coeffs(bc);
        let verified = verify_bs_pair(f, &delta, &b, sdeg + m + 1);
        return Ok(Some(BsSolution {
            b,
            delta,
            verified,
            minimal_in_search: true,
            level,
            s_degree: sdeg,
            b_degree: d,
            invariant_space: group.is_some(),
        }));
    }
    Ok(None)
}

/// Independent check by integer specialization:
/// delta|_(s=t) applied to f^(t+1) equals b(t) f^t for t = 0..tmax.
pub fn verify_bs_pair(f: &Poly, delta: &SOp, b: &SPoly, tmax: u32) -> bool {
    for t in 0..=tmax {
        let dt = delta.specialize_s(&rat_i(t as i64));
        let lhs = dt.apply(&f.pow(t + 1));
        let rhs = f.pow(t).scale(&b.eval(&rat_i(t as i64)));
        if lhs != rhs {
            return false;
        }
    }
    true
}

/// Which module the growth report describes.
#[derive(Clone, Debug)]
pub enum GrowthModule {
    PolyRing,
    Localized(Poly),
}

#[derive(Clone, Debug)]
pub struct HolonomicReport {
    pub dims: DimSequence,
    pub estimate: GrowthEstimate,
    pub ring_dim: u64,
    pub matches_ring_dim: bool,
    pub stretch: u64,
    pub fpow_step: u64,
}

/// Exact level dimensions of the standard filtration on R, or of the
/// filtration f^(-C j) [R]_(<= j (C a + 1)) on R_f, with a growth fit.
/// The fitted degree equalling dim R is the holonomicity evidence.
pub fn holonomic_growth_report(
    module: &GrowthModule,
    spec: &WeightedRingSpec,
    imax: u64,
    window: usize,
) -> Result<HolonomicReport> {
    let n = spec.n() as u64;
    match module {
        GrowthModule::PolyRing => {
            let dims = spec.r_dim_seq(imax);
            let estimate = dim_estimate(&dims, window)?;
            let matches = estimate.stable && estimate.degree == crate::rat::rat_u(n);
            Ok(HolonomicReport {
                dims,
                estimate,
                ring_dim: n,
                matches_ring_dim: matches,
                stretch: 0,
                fpow_step: 0,
            })
        }
        GrowthModule::Localized(f) => {
            if f.is_zero() {
                return Err(Error::DivisionByZero);
            }
            if f.nvars() != spec.n() {
                return Err(Error::ArityMismatch("denominator arity".into()));
            }
            let a = f
                .wdeg(spec.weights())
                .ok_or(Error::DivisionByZero)?;
            let eps = eps_and_order_domination(spec, 0);
            let c = eps.c;
            let stride = c * a + 1;
            let ring = LocalizedRing::new(f.clone())?;
            let weights: Vec<u64> = spec.weights().iter().map(|w| *w as u64).collect();
            let mut dims = Vec::with_capacity(imax as usize + 1);
            for j in 0..=imax {
                let budget = j * stride;
                let tpow = (c * j) as u32;
                // Normalize every spanning fraction, then lift back to the
                // common denominator f^tpow and rank the numerators.
                let lifted: Vec<Poly> = monos_within(&weights, budget)
                    .into_iter()
                    .map(|mono| {
                        let v = ring.elt(Poly::monomial(mono, rat_i(1)), tpow);
                        v.num.mul(&f.pow(tpow - v.t))
                    })
                    .collect();
                let mut dict: BTreeMap<Mono, usize> = BTreeMap::new();
                for p in &lifted {
                    for (m2, _) in p.terms() {
                        let next = dict.len();
                        dict.entry(m2.clone()).or_insert(next);
                    }
                }
                let mut elim = Eliminator::new(dict.len());
                let mut rank = 0usize;
                for p in &lifted {
                    let mut row: Vec<(usize, Rat)> = p
                        .terms()
                        .map(|(m2, c2)| (dict[m2], c2.clone()))
                        .collect();
                    row.sort_by_key(|(col, _)| *col);
                    if elim.add_row(row).is_some() {
                        rank += 1;
                    }
                }
                dims.push(rank as u64);
            }
            let dims = DimSequence::new(format!("R_f levels, f = {f}"), dims);
            let estimate = dim_estimate(&dims, window)?;
            let matches = estimate.stable && estimate.degree == crate::rat::rat_u(n);
            Ok(HolonomicReport {
                dims,
                estimate,
                ring_dim: n,
                matches_ring_dim: matches,
                stretch: c,
                fpow_step: stride,
            })
        }
    }
}
