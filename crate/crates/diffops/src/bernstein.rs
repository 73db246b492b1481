//! Weighted Bernstein filtrations on the Weyl algebra.
//!
//! For a polynomial ring with positive variable weights `w_1..w_n` and a
//! slope `a > max w_j`, the level of a monomial operator `x^a d^b` is
//! `sum a_j w_j + sum b_j (a - w_j)`; level `i` collects everything of
//! level at most `i`.  Level zero is exactly the scalars, which is what
//! makes multiplicity and simplicity arguments work.

use num_traits::{Signed, ToPrimitive};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::filtration::DimSequence;
use crate::mono::{monos_within, Mono};
use crate::rat::{rat_i, rat_u, Rat};
use crate::weyl::{OpCoeff, WeylOp};

#[derive(Clone, Debug, PartialEq)]
pub struct WeightedRingSpec {
    n: usize,
    weights: Vec<u32>,
    slope: Rat,
}

impl WeightedRingSpec {
    pub fn new(n: usize, weights: Vec<u32>, slope: Rat) -> Result<WeightedRingSpec> {
        if n == 0 || weights.len() != n {
            return Err(Error::BadParameter(format!(
                "need {n} positive weights for {n} variables"
            )));
        }
        if weights.iter().any(|&w| w == 0) {
            return Err(Error::BadParameter("weights must be positive".into()));
        }
        if !slope.is_positive() {
            return Err(Error::BadParameter("slope must be positive".into()));
        }
        let wmax = *weights.iter().max().unwrap();
        if slope <= rat_u(wmax as u64) {
            return Err(Error::BadParameter(format!(
                "slope {slope} must exceed the maximum weight {wmax}"
            )));
        }
        Ok(WeightedRingSpec { n, weights, slope })
    }

    /// Standard weights 1 and an integer slope.
    pub fn standard(n: usize, slope: u32) -> Result<WeightedRingSpec> {
        WeightedRingSpec::new(n, vec![1; n], rat_u(slope as u64))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn slope(&self) -> &Rat {
        &self.slope
    }

    pub fn wmax(&self) -> u32 {
        *self.weights.iter().max().unwrap()
    }

    /// Denominator `q` of the slope; all level arithmetic is done on
    /// integers after scaling by `q`.
    pub fn scale(&self) -> u64 {
        self.slope.denom().to_u64().expect("slope denominator")
    }

    fn slope_num(&self) -> u64 {
        self.slope.numer().to_u64().expect("slope numerator")
    }

    /// Scaled weights of `x_1..x_n, d_1..d_n` as one vector of length 2n.
    pub fn scaled_pair_weights(&self) -> Vec<u64> {
        let q = self.scale();
        let p = self.slope_num();
        let mut v: Vec<u64> = self.weights.iter().map(|&w| q * w as u64).collect();
        v.extend(self.weights.iter().map(|&w| p - q * w as u64));
        v
    }

    /// Scaled level of a monomial pair.
    pub fn scaled_level(&self, x: &Mono, d: &Mono) -> u64 {
        let q = self.scale();
        let p = self.slope_num();
        let mut s: u64 = 0;
        for j in 0..self.n {
            s += x.0[j] as u64 * q * self.weights[j] as u64;
            s += d.0[j] as u64 * (p - q * self.weights[j] as u64);
        }
        s
    }

    /// Level of a monomial pair as an exact rational.
    pub fn level_pair(&self, x: &Mono, d: &Mono) -> Rat {
        rat_u(self.scaled_level(x, d)) / rat_u(self.scale())
    }

    /// Maximal level over the terms of an operator; `None` when zero.
    pub fn op_level<C: OpCoeff>(&self, op: &WeylOp<C>) -> Option<Rat> {
        op.terms()
            .map(|((a, b), _)| self.scaled_level(a, b))
            .max()
            .map(|s| rat_u(s) / rat_u(self.scale()))
    }

    /// Membership in level `i`; the zero operator belongs to every level.
    pub fn member<C: OpCoeff>(&self, op: &WeylOp<C>, i: u64) -> bool {
        let budget = i.checked_mul(self.scale()).expect("level budget");
        op.terms()
            .all(|((a, b), _)| self.scaled_level(a, b) <= budget)
    }

    /// Monomial basis of level `i`, sorted by (level, x-exponents,
    /// d-exponents) so enumeration is reproducible.
    pub fn basis(&self, i: u64) -> Vec<(Mono, Mono)> {
        let budget = i.checked_mul(self.scale()).expect("level budget");
        let pw = self.scaled_pair_weights();
        let mut pairs: Vec<(u64, Mono, Mono)> = monos_within(&pw, budget)
            .into_iter()
            .map(|m| {
                let x = Mono(m.0[..self.n].to_vec());
                let d = Mono(m.0[self.n..].to_vec());
                (self.scaled_level(&x, &d), x, d)
            })
            .collect();
        pairs.sort();
        pairs.into_iter().map(|(_, x, d)| (x, d)).collect()
    }

    /// Dimension of level `i` by knapsack counting (no enumeration).
    pub fn dim(&self, i: u64) -> u128 {
        let budget = i.checked_mul(self.scale()).expect("level budget");
        let counts = exact_sum_counts(&self.scaled_pair_weights(), budget);
        counts.iter().sum()
    }

    /// Dimension sequence `dim B_0, ..., dim B_imax`.
    pub fn dim_seq(&self, imax: u64) -> DimSequence {
        let q = self.scale();
        let budget = imax.checked_mul(q).expect("level budget");
        let counts = exact_sum_counts(&self.scaled_pair_weights(), budget);
        let dims = cumulative_at_multiples(&counts, q, imax);
        DimSequence::new(
            format!("bernstein n={} slope={}", self.n, self.slope),
            dims,
        )
    }

    /// Dimension sequence of the weighted-degree filtration of the
    /// polynomial ring itself.
    pub fn r_dim_seq(&self, imax: u64) -> DimSequence {
        let q = self.scale();
        let xw: Vec<u64> = self.weights.iter().map(|&w| q * w as u64).collect();
        let budget = imax.checked_mul(q).expect("level budget");
        let counts = exact_sum_counts(&xw, budget);
        let dims = cumulative_at_multiples(&counts, q, imax);
        DimSequence::new(format!("poly ring n={}", self.n), dims)
    }

    /// Monomials of the polynomial ring with weighted degree at most `i`.
    pub fn r_basis(&self, i: u64) -> Vec<Mono> {
        let xw: Vec<u64> = self.weights.iter().map(|&w| w as u64).collect();
        monos_within(&xw, i)
    }
}

/// Knapsack table: `out[j]` counts exponent vectors with scaled weighted
/// sum exactly `j`.
fn exact_sum_counts(weights: &[u64], budget: u64) -> Vec<u128> {
    let b = budget as usize;
    let mut ways = vec![0u128; b + 1];
    ways[0] = 1;
    for &w in weights {
        let w = w as usize;
        if w == 0 {
            continue;
        }
        for j in w..=b {
            ways[j] += ways[j - w];
        }
    }
    ways
}

fn cumulative_at_multiples(counts: &[u128], q: u64, imax: u64) -> Vec<u64> {
    let mut dims = Vec::with_capacity(imax as usize + 1);
    let mut acc: u128 = 0;
    let mut next = 0usize;
    for i in 0..=imax {
        let upto = (i * q) as usize;
        while next <= upto {
            acc += counts[next];
            next += 1;
        }
        dims.push(u64::try_from(acc).expect("dimension fits u64"));
    }
    dims
}

/// Comparison constant for two slopes over the same weighted ring:
/// levels of slope `b >= a` embed into levels of slope `a`, and conversely
/// with a linear stretch `C`.
#[derive(Clone, Debug, Serialize)]
pub struct SlopeWitness {
    pub c: u64,
    pub checked_upto: u64,
    pub ok: bool,
    pub failure: Option<String>,
}

pub fn slope_witness(
    low: &WeightedRingSpec,
    high: &WeightedRingSpec,
    imax: u64,
) -> Result<SlopeWitness> {
    if low.n() != high.n() || low.weights() != high.weights() {
        return Err(Error::BadParameter(
            "slope comparison needs identical weights".into(),
        ));
    }
    if low.slope() > high.slope() {
        return Err(Error::BadParameter(
            "first spec must have the smaller slope".into(),
        ));
    }
    let c = if low.slope() == high.slope() {
        1u64
    } else {
        // smallest integer C with b <= C (a - w)
        let gap = low.slope() - rat_u(low.wmax() as u64);
        let c = (high.slope() / gap).ceil().to_integer();
        c.to_u64().ok_or_else(|| {
            Error::BadParameter("comparison constant exceeds u64".into())
        })?
    };
    let mut failure = None;
    'outer: for i in 0..=imax {
        // Higher slope levels sit inside the same lower slope level.
        for (x, d) in high.basis(i) {
            let op: WeylOp<Rat> = WeylOp::term(x.clone(), d.clone(), rat_i(1));
            if !low.member(&op, i) {
                failure = Some(format!(
                    "x^{:?} d^{:?} in high level {i} escapes low level {i}",
                    x.0, d.0
                ));
                break 'outer;
            }
        }
        // Lower slope levels embed after stretching by C.
        for (x, d) in low.basis(i) {
            let op: WeylOp<Rat> = WeylOp::term(x.clone(), d.clone(), rat_i(1));
            if !high.member(&op, c * i) {
                failure = Some(format!(
                    "x^{:?} d^{:?} in low level {i} escapes high level {}",
                    x.0,
                    d.0,
                    c * i
                ));
                break 'outer;
            }
        }
    }
    Ok(SlopeWitness {
        c,
        checked_upto: imax,
        ok: failure.is_none(),
        failure,
    })
}

/// Associated-graded commutativity probe: commutators of elements at
/// levels `i` and `j` must drop to level `i + j - 1`.
#[derive(Clone, Debug, Serialize)]
pub struct GrCommutativityReport {
    pub samples: u64,
    pub ok: bool,
    pub failure: Option<String>,
}

pub fn gr_commutativity_check(
    spec: &WeightedRingSpec,
    i: u64,
    j: u64,
    samples: u64,
    seed: u64,
) -> GrCommutativityReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bi = spec.basis(i);
    let bj = spec.basis(j);
    let mut failure = None;
    for _ in 0..samples {
        let a = random_combination(&mut rng, &bi, 3);
        let b = random_combination(&mut rng, &bj, 3);
        let c = a.commutator(&b);
        let bound = i + j;
        let ok = if bound == 0 {
            c.is_zero()
        } else {
            spec.member(&c, bound - 1)
        };
        if !ok {
            failure = Some(format!(
                "commutator of levels {i}, {j} reached level {:?}",
                spec.op_level(&c).map(|l| l.to_string())
            ));
            break;
        }
    }
    GrCommutativityReport {
        samples,
        ok: failure.is_none(),
        failure,
    }
}

fn random_combination(
    rng: &mut impl Rng,
    basis: &[(Mono, Mono)],
    terms: usize,
) -> WeylOp<Rat> {
    let n = basis
        .first()
        .map(|(x, _)| x.nvars())
        .unwrap_or(1);
    let mut op = WeylOp::zero(n);
    for _ in 0..terms {
        let k = rng.gen_range(0..basis.len());
        let num = rng.gen_range(-4i64..=4);
        let den = rng.gen_range(1i64..=2);
        let (x, d) = &basis[k];
        op.add_term(x.clone(), d.clone(), crate::rat::rat(num, den));
    }
    op
}

/// The order bound extracted from the slope gap: with
/// `eps = a - max w`, every operator in level `i` has order at most
/// `ceil(1/eps) * i`.
#[derive(Clone, Debug, Serialize)]
pub struct EpsOrderReport {
    pub eps: String,
    pub c: u64,
    pub checked_upto: u64,
    pub ok: bool,
}

pub fn eps_and_order_domination(spec: &WeightedRingSpec, imax: u64) -> EpsOrderReport {
    let eps = spec.slope() - rat_u(spec.wmax() as u64);
    let c = (rat_i(1) / &eps).ceil().to_integer().to_u64().unwrap_or(u64::MAX);
    let mut ok = true;
    'outer: for i in 0..=imax {
        for (_, d) in spec.basis(i) {
            if d.deg() > c * i {
                ok = false;
                break 'outer;
            }
        }
    }
    EpsOrderReport {
        eps: eps.to_string(),
        c,
        checked_upto: imax,
        ok,
    }
}
