//! Growth bookkeeping for filtrations: dimension sequences, exact
//! quasi-polynomial fits, domination certificates, reindexing, and the
//! multiplicity inequalities used by the holonomicity bounds.

use std::fmt::Write as _;

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::bernstein::WeightedRingSpec;
use crate::error::{Error, Result};
use crate::linalg::Eliminator;
use crate::mono::Mono;
use crate::poly::Poly;
use crate::rat::{floor_pow, rat_i, rat_u, Rat};
use crate::weyl::WeylOp;

/// A labelled sequence `dim F_0, dim F_1, ...`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimSequence {
    label: String,
    dims: Vec<u64>,
}

impl DimSequence {
    pub fn new(label: impl Into<String>, dims: Vec<u64>) -> DimSequence {
        DimSequence {
            label: label.into(),
            dims,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dims(&self) -> &[u64] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,dim\n");
        for (i, d) in self.dims.iter().enumerate() {
            let _ = writeln!(out, "{i},{d}");
        }
        out
    }

    pub fn from_csv(label: impl Into<String>, text: &str) -> Result<DimSequence> {
        let mut dims = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split(',');
            let a = parts.next().unwrap_or("").trim();
            let b = parts.next().unwrap_or("").trim();
            if dims.is_empty() && a.parse::<u64>().is_err() {
                continue; // header row
            }
            let i: usize = a
                .parse()
                .map_err(|_| Error::Parse(format!("bad index '{a}'")))?;
            let d: u64 = b
                .parse()
                .map_err(|_| Error::Parse(format!("bad dimension '{b}'")))?;
            if i != dims.len() {
                return Err(Error::Parse(format!(
                    "indices must be consecutive from 0, got {i} at position {}",
                    dims.len()
                )));
            }
            dims.push(d);
        }
        Ok(DimSequence::new(label, dims))
    }

    /// Reindexed sequence `G_i = F_(floor(i^s))` for `s = p/q >= 1`.
    pub fn reindex_power(&self, p: u32, q: u32, imax: u64) -> Result<DimSequence> {
        if q == 0 || (p as u64) < (q as u64) {
            return Err(Error::BadParameter(
                "reindexing exponent must be a rational >= 1".into(),
            ));
        }
        let mut dims = Vec::with_capacity(imax as usize + 1);
        for i in 0..=imax {
            let j = floor_pow(i, p, q)?;
            let j = usize::try_from(j)
                .map_err(|_| Error::BadParameter("reindexed level too large".into()))?;
            let d = *self.dims.get(j).ok_or(Error::TooShortSequence {
                len: self.dims.len(),
                need: j + 1,
            })?;
            dims.push(d);
        }
        Ok(DimSequence::new(
            format!("{} reindexed by {p}/{q}", self.label),
            dims,
        ))
    }
}

/// Result of a degree/multiplicity fit on a dimension sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct GrowthEstimate {
    pub degree: Rat,
    pub multiplicity: Rat,
    pub stable: bool,
    pub window: usize,
    pub period: u64,
}

/// Fits a growth degree by iterated finite differences with period
/// detection (periods 1..6).  When a quasi-polynomial matches the trailing
/// `2 * window` entries exactly, the fit is flagged stable and the degree
/// and multiplicity are exact; otherwise a log-slope estimate over the
/// trailing window is reported with the stable flag cleared.
pub fn dim_estimate(seq: &DimSequence, window: usize) -> Result<GrowthEstimate> {
    if window < 4 {
        return Err(Error::BadParameter("window must be at least 4".into()));
    }
    let m = seq.dims.len();
    if m < 2 * window {
        return Err(Error::TooShortSequence {
            len: m,
            need: 2 * window,
        });
    }
    let lo = m - 2 * window;
    for t in 1u64..=6 {
        if let Some((deg, mult)) = periodic_fit(&seq.dims, lo, t) {
            return Ok(GrowthEstimate {
                degree: rat_u(deg),
                multiplicity: mult,
                stable: true,
                window,
                period: t,
            });
        }
    }
    // Fallback: two-point log slope over the trailing window.
    let i1 = m - 1;
    let i0 = m - 1 - window;
    let d1 = seq.dims[i1].max(1) as f64;
    let d0 = seq.dims[i0].max(1) as f64;
    let raw = (d1 / d0).ln() / ((i1 as f64) / (i0 as f64)).ln();
    let degree = snap_rational(raw);
    let dexp = degree.to_f64().unwrap_or(raw);
    let mut best = 0f64;
    for i in i0..=i1 {
        if seq.dims[i] == 0 {
            continue;
        }
        let v = seq.dims[i] as f64 / (i as f64).powf(dexp);
        if v > best {
            best = v;
        }
    }
    Ok(GrowthEstimate {
        degree,
        multiplicity: rat_from_f64(best, 100_000),
        stable: false,
        window,
        period: 0,
    })
}

/// Exact quasi-polynomial fit with period `t` on `dims[lo..]`; returns
/// (degree, multiplicity) when every residue class is polynomial there.
fn periodic_fit(dims: &[u64], lo: usize, t: u64) -> Option<(u64, Rat)> {
    let t = t as usize;
    let mut class_results = Vec::new();
    for c in 0..t {
        let vals: Vec<Rat> = (lo..dims.len())
            .filter(|i| i % t == c)
            .map(|i| rat_u(dims[i]))
            .collect();
        if vals.len() < 3 {
            return None;
        }
        class_results.push(class_fit(&vals, t as u64)?);
    }
    let deg = class_results.iter().map(|(d, _)| *d).max().unwrap();
    let mult = class_results
        .iter()
        .filter(|(d, _)| *d == deg)
        .map(|(_, l)| l.clone())
        .max()?;
    Some((deg, mult))
}

/// Polynomial fit of one residue class: the values sit at indices spaced
/// `stride` apart.  Returns (degree, leading coefficient) when some level
/// of iterated differences vanishes identically.
fn class_fit(vals: &[Rat], stride: u64) -> Option<(u64, Rat)> {
    const DEG_CAP: usize = 12;
    let mut row: Vec<Rat> = vals.to_vec();
    if row.iter().all(|v| v.is_zero()) {
        return Some((0, Rat::zero()));
    }
    let mut level = 0usize;
    loop {
        if row.iter().all(|v| v.is_zero()) {
            // Differences vanished at `level`; degree is level - 1.
            let d = level - 1;
            let prev = d; // recompute the constant row's value below
            let mut r: Vec<Rat> = vals.to_vec();
            for _ in 0..prev {
                r = diffs(&r);
            }
            let lead = r[0].clone()
                / (rat_u(stride).pow_u(d as u32) * factorial_rat(d as u32));
            return Some((d as u64, lead));
        }
        if level >= DEG_CAP || row.len() < 2 {
            return None;
        }
        row = diffs(&row);
        level += 1;
    }
}

fn diffs(v: &[Rat]) -> Vec<Rat> {
    v.windows(2).map(|w| &w[1] - &w[0]).collect()
}

fn factorial_rat(k: u32) -> Rat {
    let mut acc = Rat::one();
    for j in 2..=k {
        acc *= rat_u(j as u64);
    }
    acc
}

trait PowU {
    fn pow_u(&self, e: u32) -> Rat;
}

impl PowU for Rat {
    fn pow_u(&self, e: u32) -> Rat {
        let mut acc = Rat::one();
        for _ in 0..e {
            acc *= self;
        }
        acc
    }
}

/// Snaps a float to the nearest rational with denominator at most 4 when
/// close enough, otherwise keeps three decimals.
fn snap_rational(x: f64) -> Rat {
    for den in 1u64..=4 {
        let num = (x * den as f64).round();
        if (x - num / den as f64).abs() < 0.08 {
            return Rat::new((num as i64).into(), (den as i64).into());
        }
    }
    rat_from_f64(x, 1000)
}

fn rat_from_f64(x: f64, max_den: u64) -> Rat {
    if !x.is_finite() {
        return Rat::zero();
    }
    let scaled = (x * max_den as f64).round() as i64;
    Rat::new(scaled.into(), (max_den as i64).into())
}

/// A filtration exposed through explicit spanning vectors per level, in a
/// common coordinate space keyed by monomial pairs.
pub type SpanKey = (Mono, Mono);
pub type SpanVec = Vec<(SpanKey, Rat)>;

pub trait LevelBasis {
    fn span(&self, i: u64) -> Vec<SpanVec>;
    fn label(&self) -> String;
}

pub fn poly_to_span(p: &Poly) -> SpanVec {
    p.terms()
        .map(|(m, c)| ((m.clone(), Mono::zero(m.nvars())), c.clone()))
        .collect()
}

pub fn op_to_span(op: &WeylOp<Rat>) -> SpanVec {
    op.terms()
        .map(|((a, b), c)| ((a.clone(), b.clone()), c.clone()))
        .collect()
}

/// Explicitly listed filtration, mainly for fixtures and negative tests.
pub struct ExplicitLevels {
    pub name: String,
    pub levels: Vec<Vec<SpanVec>>,
}

impl LevelBasis for ExplicitLevels {
    fn span(&self, i: u64) -> Vec<SpanVec> {
        let i = (i as usize).min(self.levels.len().saturating_sub(1));
        self.levels.get(i).cloned().unwrap_or_default()
    }
    fn label(&self) -> String {
        self.name.clone()
    }
}

/// Bernstein levels of the full operator algebra as a span handle.
pub struct BfLevels<'a>(pub &'a WeightedRingSpec);

impl LevelBasis for BfLevels<'_> {
    fn span(&self, i: u64) -> Vec<SpanVec> {
        self.0
            .basis(i)
            .into_iter()
            .map(|(x, d)| vec![((x, d), Rat::one())])
            .collect()
    }
    fn label(&self) -> String {
        format!("bernstein slope {}", self.0.slope())
    }
}

/// Weighted-degree levels of the polynomial ring as a span handle.
pub struct RPolyLevels<'a>(pub &'a WeightedRingSpec);

impl LevelBasis for RPolyLevels<'_> {
    fn span(&self, i: u64) -> Vec<SpanVec> {
        let n = self.0.n();
        self.0
            .r_basis(i)
            .into_iter()
            .map(|m| vec![((m, Mono::zero(n)), Rat::one())])
            .collect()
    }
    fn label(&self) -> String {
        format!("poly ring n={}", self.0.n())
    }
}

/// Module filtration generated by finitely many polynomials under the
/// operator levels: level `i` spans `{delta(v)}` over the level basis.
pub struct ModuleSpanLevels<'a> {
    pub spec: &'a WeightedRingSpec,
    pub gens: Vec<Poly>,
}

impl LevelBasis for ModuleSpanLevels<'_> {
    fn span(&self, i: u64) -> Vec<SpanVec> {
        let mut out = Vec::new();
        for (x, d) in self.spec.basis(i) {
            let op: WeylOp<Rat> = WeylOp::term(x, d, Rat::one());
            for g in &self.gens {
                let img = op.apply(g);
                if !img.is_zero() {
                    out.push(poly_to_span(&img));
                }
            }
        }
        out
    }
    fn label(&self) -> String {
        format!("module over {} gens", self.gens.len())
    }
}

/// Reindexed filtration `G_i = F_(floor(i^(p/q)))`.
pub struct Reindexed<'a> {
    pub inner: &'a dyn LevelBasis,
    pub p: u32,
    pub q: u32,
}

impl LevelBasis for Reindexed<'_> {
    fn span(&self, i: u64) -> Vec<SpanVec> {
        let j = floor_pow(i, self.p, self.q).expect("reindex level");
        self.inner.span(j)
    }
    fn label(&self) -> String {
        format!("{} reindexed {}/{}", self.inner.label(), self.p, self.q)
    }
}

/// Rank of each level's span, as a dimension sequence.
pub fn dim_sequence_of(handle: &dyn LevelBasis, imax: u64) -> DimSequence {
    let mut dims = Vec::with_capacity(imax as usize + 1);
    for i in 0..=imax {
        dims.push(span_rank(handle.span(i)) as u64);
    }
    DimSequence::new(handle.label(), dims)
}

fn span_rank(vecs: Vec<SpanVec>) -> usize {
    let mut dict = std::collections::BTreeMap::new();
    let rows: Vec<Vec<(usize, Rat)>> = vecs
        .iter()
        .map(|v| {
            let mut row: Vec<(usize, Rat)> = v
                .iter()
                .map(|(k, c)| {
                    let next = dict.len();
                    let col = *dict.entry(k.clone()).or_insert(next);
                    (col, c.clone())
                })
                .collect();
            row.sort_by_key(|(c, _)| *c);
            row
        })
        .collect();
    let mut e = Eliminator::new(dict.len());
    for r in rows {
        e.add_row(r);
    }
    e.rank()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Domination {
    /// `F_i` inside `G_(C i)`.
    Linear { c: u64 },
    /// `F_i` inside `G_(i + j)`.
    Shift { j: u64 },
}

impl Domination {
    fn target(&self, i: u64) -> u64 {
        match self {
            Domination::Linear { c } => c * i,
            Domination::Shift { j } => i + j,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DominationReport {
    pub kind: Domination,
    pub checked_upto: u64,
    pub certified: bool,
    pub first_failure: Option<DominationFailure>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DominationFailure {
    pub level: u64,
    pub target_level: u64,
    pub witness: String,
}

/// Checks `F_i` inside `G_(target(i))` for `i <= window` by exact span
/// membership; on failure reports the first witness vector.
pub fn check_domination(
    f: &dyn LevelBasis,
    g: &dyn LevelBasis,
    kind: Domination,
    window: u64,
) -> DominationReport {
    for i in 0..=window {
        let target = kind.target(i);
        let gvecs = g.span(target);
        let fvecs = f.span(i);
        let mut dict = std::collections::BTreeMap::new();
        let to_row = |v: &SpanVec, dict: &mut std::collections::BTreeMap<SpanKey, usize>| {
            let mut row: Vec<(usize, Rat)> = v
                .iter()
                .map(|(k, c)| {
                    let next = dict.len();
                    let col = *dict.entry(k.clone()).or_insert(next);
                    (col, c.clone())
                })
                .collect();
            row.sort_by_key(|(c, _)| *c);
            row
        };
        let grows: Vec<_> = gvecs.iter().map(|v| to_row(v, &mut dict)).collect();
        let frows: Vec<_> = fvecs.iter().map(|v| to_row(v, &mut dict)).collect();
        let mut e = Eliminator::new(dict.len());
        for r in grows {
            e.add_row(r);
        }
        for (v, row) in fvecs.iter().zip(frows) {
            let (inside, _) = e.contains(row);
            if !inside {
                let witness = v
                    .iter()
                    .map(|((x, d), c)| format!("{c}*x^{:?}d^{:?}", x.0, d.0))
                    .collect::<Vec<_>>()
                    .join(" + ");
                return DominationReport {
                    kind,
                    checked_upto: window,
                    certified: false,
                    first_failure: Some(DominationFailure {
                        level: i,
                        target_level: target,
                        witness,
                    }),
                };
            }
        }
    }
    DominationReport {
        kind,
        checked_upto: window,
        certified: true,
        first_failure: None,
    }
}

/// Degree comparison for the Bernstein inequality: a faithful module's
/// growth degree is at least half the algebra's, and when multiplicities
/// are supplied the quantitative bound is checked exactly.
#[derive(Clone, Debug)]
pub struct BernsteinCheck {
    pub algebra: GrowthEstimate,
    pub module: GrowthEstimate,
    pub degree_holds: bool,
    pub degree_equality_case: bool,
    pub multiplicity_holds: Option<bool>,
}

pub fn bernstein_check(
    algebra_seq: &DimSequence,
    module_seq: &DimSequence,
    window: usize,
    c: Option<u64>,
) -> Result<BernsteinCheck> {
    let fa = dim_estimate(algebra_seq, window)?;
    let fm = dim_estimate(module_seq, window)?;
    let degree_holds = fm.degree.clone() * rat_i(2) >= fa.degree;
    let degree_equality_case = fm.degree.clone() * rat_i(2) == fa.degree;
    let multiplicity_holds = match c {
        None => None,
        Some(c) => {
            if !fm.degree.is_integer() {
                None
            } else {
                let theta = fm.degree.to_integer().to_u32().unwrap_or(0);
                // e(G)^2 (C+1)^theta (C+2)^theta >= e(F), squared form of
                // the multiplicity bound.
                let lhs = fm.multiplicity.clone()
                    * fm.multiplicity.clone()
                    * rat_u(c + 1).pow_u(theta)
                    * rat_u(c + 2).pow_u(theta);
                Some(lhs >= fa.multiplicity)
            }
        }
    };
    Ok(BernsteinCheck {
        algebra: fa,
        module: fm,
        degree_holds,
        degree_equality_case,
        multiplicity_holds,
    })
}

/// Holonomic length bound `e(G)^2 (C+1)^theta (C+2)^theta / e(F)`.
pub fn length_bound(e_g: &Rat, e_f: &Rat, c: u64, theta: &Rat) -> Result<Rat> {
    if !e_g.is_positive() || !e_f.is_positive() {
        return Err(Error::BadParameter(
            "multiplicities must be positive".into(),
        ));
    }
    if !theta.is_integer() || theta.is_negative() {
        return Err(Error::BadParameter(
            "degree parameter must be a nonnegative integer".into(),
        ));
    }
    let t = theta.to_integer().to_u32().ok_or_else(|| {
        Error::BadParameter("degree parameter too large".into())
    })?;
    Ok(e_g * e_g * rat_u(c + 1).pow_u(t) * rat_u(c + 2).pow_u(t) / e_f)
}
