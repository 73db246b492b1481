//! Finite matrix groups over the rationals acting on polynomials and on
//! differential operators: Reynolds averaging, invariant filtration bases,
//! differential powers and the differential signature of the invariant
//! ring, and the direct-summand compatibility check.

use std::collections::BTreeSet;

use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bernstein::WeightedRingSpec;
use crate::dmod::{LocalizedElement, LocalizedRing};
use crate::error::{Error, Result};
use crate::linalg::{
    kernel_dense, mat_identity, mat_inv, mat_mul, mat_rank, mat_transpose, Eliminator, Mat,
};
use crate::mono::{monos_within, Mono};
use crate::poly::Poly;
use crate::rat::{rat, rat_i, rat_u, Rat};
use crate::weyl::{random_qop, QOp, WeylOp};

/// A finite subgroup of GL_n(Q), stored as its complete element list.
#[derive(Clone, Debug)]
pub struct FiniteMatrixGroup {
    n: usize,
    elements: Vec<Mat>,
}

impl FiniteMatrixGroup {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Mat] {
        &self.elements
    }

    pub fn trivial(n: usize) -> FiniteMatrixGroup {
        FiniteMatrixGroup {
            n,
            elements: vec![mat_identity(n)],
        }
    }

    /// The group generated by sign flips on every coordinate at once.
    pub fn cyclic_sign(n: usize) -> FiniteMatrixGroup {
        let mut m = mat_identity(n);
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = rat_i(-1);
        }
        group_closure(&[m], 2).expect("order-2 closure")
    }

    /// The full symmetric group on n coordinates as permutation matrices.
    pub fn permutation(n: usize) -> Result<FiniteMatrixGroup> {
        if n == 0 || n > 6 {
            return Err(Error::BadParameter(
                "permutation fixture supports 1..6 variables".into(),
            ));
        }
        let mut gens = Vec::new();
        for k in 0..n.saturating_sub(1) {
            let mut m = mat_identity(n);
            m[k][k] = Rat::zero();
            m[k + 1][k + 1] = Rat::zero();
            m[k][k + 1] = rat_i(1);
            m[k + 1][k] = rat_i(1);
            gens.push(m);
        }
        if gens.is_empty() {
            return Ok(FiniteMatrixGroup::trivial(n));
        }
        group_closure(&gens, 720)
    }

    /// Independent sign flips on the coordinates picked by `mask`.
    pub fn diag_signs(mask: &[bool]) -> Result<FiniteMatrixGroup> {
        let n = mask.len();
        let mut gens = Vec::new();
        for (j, flip) in mask.iter().enumerate() {
            if *flip {
                let mut m = mat_identity(n);
                m[j][j] = rat_i(-1);
                gens.push(m);
            }
        }
        if gens.is_empty() {
            return Ok(FiniteMatrixGroup::trivial(n));
        }
        group_closure(&gens, 1 << n.min(16))
    }

    /// The order-4 planar rotation group generated by (x, y) -> (-y, x).
    pub fn rotation4() -> FiniteMatrixGroup {
        let g = vec![
            vec![Rat::zero(), rat_i(-1)],
            vec![rat_i(1), Rat::zero()],
        ];
        group_closure(&[g], 4).expect("order-4 closure")
    }

    /// True when every element maps each variable to a combination of
    /// variables of the same weight, so the filtration levels are stable.
    pub fn is_grading_preserving(&self, weights: &[u32]) -> bool {
        if weights.len() != self.n {
            return false;
        }
        self.elements.iter().all(|g| {
            (0..self.n).all(|i| {
                (0..self.n).all(|j| g[i][j].is_zero() || weights[i] == weights[j])
            })
        })
    }
}

/// Builds a named fixture group: `trivial(n)`, `cyclic-sign(n)`,
/// `perm(n)`, `diag-signs(bits)` with a 0/1 mask string, or `rot4`.
pub fn fixture(name: &str) -> Result<FiniteMatrixGroup> {
    let parse_arg = |name: &str, prefix: &str| -> Result<String> {
        let inner = name
            .strip_prefix(prefix)
            .and_then(|r| r.strip_prefix('('))
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| Error::Parse(format!("malformed fixture '{name}'")))?;
        Ok(inner.to_string())
    };
    if name == "rot4" {
        return Ok(FiniteMatrixGroup::rotation4());
    }
    if name.starts_with("trivial") {
        let arg = parse_arg(name, "trivial")?;
        let n: usize = arg.parse().map_err(|_| Error::Parse(format!("bad arity '{arg}'")))?;
        return Ok(FiniteMatrixGroup::trivial(n));
    }
    if name.starts_with("cyclic-sign") {
        let arg = parse_arg(name, "cyclic-sign")?;
        let n: usize = arg.parse().map_err(|_| Error::Parse(format!("bad arity '{arg}'")))?;
        return Ok(FiniteMatrixGroup::cyclic_sign(n));
    }
    if name.starts_with("perm") {
        let arg = parse_arg(name, "perm")?;
        let n: usize = arg.parse().map_err(|_| Error::Parse(format!("bad arity '{arg}'")))?;
        return FiniteMatrixGroup::permutation(n);
    }
    if name.starts_with("diag-signs") {
        let arg = parse_arg(name, "diag-signs")?;
        let mask: Vec<bool> = arg
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::Parse(format!("mask must be 0/1 bits, got '{c}'"))),
            })
            .collect::<Result<_>>()?;
        return FiniteMatrixGroup::diag_signs(&mask);
    }
    Err(Error::Parse(format!("unknown group fixture '{name}'")))
}

/// Closes a generating set under multiplication; errors when the closure
/// grows past `max_order` (infinite or oversized group).
pub fn group_closure(gens: &[Mat], max_order: usize) -> Result<FiniteMatrixGroup> {
    if gens.is_empty() {
        return Err(Error::BadParameter("no generators".into()));
    }
    let n = gens[0].len();
    for g in gens {
        if g.len() != n || g.iter().any(|row| row.len() != n) {
            return Err(Error::ArityMismatch("generator shape".into()));
        }
        if mat_inv(g).is_none() {
            return Err(Error::SingularMatrix);
        }
    }
    let mut seen: BTreeSet<Mat> = BTreeSet::new();
    seen.insert(mat_identity(n));
    let mut frontier: Vec<Mat> = vec![mat_identity(n)];
    while let Some(u) = frontier.pop() {
        for g in gens {
            let w = mat_mul(&u, g);
            if seen.insert(w.clone()) {
                if seen.len() > max_order {
                    return Err(Error::GroupTooLarge(max_order));
                }
                frontier.push(w);
            }
        }
    }
    Ok(FiniteMatrixGroup {
        n,
        elements: seen.into_iter().collect(),
    })
}

/// Elements g with rank(I - g) = 1 on the defining representation.
pub fn pseudoreflections(group: &FiniteMatrixGroup) -> Vec<Mat> {
    let id = mat_identity(group.n);
    group
        .elements
        .iter()
        .filter(|g| {
            let diff: Mat = id
                .iter()
                .zip(g.iter())
                .map(|(ri, gi)| ri.iter().zip(gi.iter()).map(|(a, b)| a - b).collect())
                .collect();
            mat_rank(&diff) == 1
        })
        .cloned()
        .collect()
}

/// g acting on a polynomial: x_j picks up the j-th column of g.
pub fn act_poly(g: &Mat, f: &Poly) -> Poly {
    let n = g.len();
    let mut out = Poly::zero(n);
    for (m, c) in f.terms() {
        let mut term = Poly::constant(n, c.clone());
        for j in 0..n {
            if m.0[j] == 0 {
                continue;
            }
            let image = Poly::from_terms(
                n,
                (0..n).map(|i| (Mono::unit(n, i), g[i][j].clone())).collect(),
            )
            .expect("linear image");
            for _ in 0..m.0[j] {
                term = term.mul(&image);
            }
        }
        out = out.add(&term);
    }
    out
}

/// g acting on an operator by conjugation: variables move by g and the
/// partials by the contragredient (inverse transpose), which preserves the
/// commutation relations.
pub fn act_op(g: &Mat, op: &QOp) -> QOp {
    let n = g.len();
    let h = mat_transpose(&mat_inv(g).expect("group element invertible"));
    let xs: Vec<Poly> = (0..n)
        .map(|j| {
            Poly::from_terms(
                n,
                (0..n).map(|i| (Mono::unit(n, i), g[i][j].clone())).collect(),
            )
            .expect("linear image")
        })
        .collect();
    let ds: Vec<Vec<Rat>> = (0..n)
        .map(|j| (0..n).map(|i| h[i][j].clone()).collect())
        .collect();
    op.substitute_linear(&xs, &ds)
}

/// The Reynolds average over the group.
pub fn reynolds_poly(group: &FiniteMatrixGroup, f: &Poly) -> Poly {
    let mut acc = Poly::zero(group.n);
    for g in &group.elements {
        acc = acc.add(&act_poly(g, f));
    }
    acc.scale(&rat(1, group.order() as i64))
}

pub fn reynolds_op(group: &FiniteMatrixGroup, op: &QOp) -> QOp {
    let mut acc = WeylOp::zero(group.n);
    for g in &group.elements {
        acc = acc.add(&act_op(g, op));
    }
    acc.scale_rat(&rat(1, group.order() as i64))
}

/// The G-fixed subspace of a Bernstein level, with a canonical basis.
#[derive(Clone, Debug)]
pub struct InvariantOperatorSpace {
    pub level: u64,
    pub basis: Vec<QOp>,
}

impl InvariantOperatorSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// Basis of (B_i)^G by row-reducing the Reynolds images of the level
/// basis.  Requires the group to preserve the weighting so that the level
/// spaces are stable under the action.
pub fn invariant_bf_basis(
    group: &FiniteMatrixGroup,
    spec: &WeightedRingSpec,
    i: u64,
) -> Result<InvariantOperatorSpace> {
    if group.n != spec.n() {
        return Err(Error::ArityMismatch("group versus ring arity".into()));
    }
    if !group.is_grading_preserving(spec.weights()) {
        return Err(Error::GradingNotPreserved);
    }
    let keys = spec.basis(i);
    let dict: std::collections::BTreeMap<(Mono, Mono), usize> = keys
        .iter()
        .cloned()
        .enumerate()
        .map(|(c, k)| (k, c))
        .collect();
    let mut elim = Eliminator::new(keys.len());
    for key in &keys {
        let op = WeylOp::term(key.0.clone(), key.1.clone(), rat_i(1));
        let avg = reynolds_op(group, &op);
        if avg.is_zero() {
            continue;
        }
        let mut row: Vec<(usize, Rat)> = avg
            .terms()
            .map(|(k, c)| {
                let col = *dict
                    .get(k)
                    .expect("grading-preserving action stays in the level");
                (col, c.clone())
            })
            .collect();
        row.sort_by_key(|(c, _)| *c);
        elim.add_row(row);
    }
    let basis = elim
        .pivot_rows()
        .into_iter()
        .map(|row| {
            let mut op = WeylOp::zero(spec.n());
            for (col, c) in row {
                let (x, d) = &keys[col];
                op.add_term(x.clone(), d.clone(), c);
            }
            op
        })
        .collect();
    Ok(InvariantOperatorSpace { level: i, basis })
}

/// Exact fixed-space dimension from the trace formula
/// (1/|G|) sum_g trace(g | B_i) — the cross-check for the row-reduced
/// basis.
pub fn invariant_dimension_by_trace(
    group: &FiniteMatrixGroup,
    spec: &WeightedRingSpec,
    i: u64,
) -> Result<Rat> {
    if !group.is_grading_preserving(spec.weights()) {
        return Err(Error::GradingNotPreserved);
    }
    let keys = spec.basis(i);
    let mut total = Rat::zero();
    for g in &group.elements {
        let mut tr = Rat::zero();
        for key in &keys {
            let op = WeylOp::term(key.0.clone(), key.1.clone(), rat_i(1));
            let img = act_op(g, &op);
            tr += img.coeff(&key.0, &key.1);
        }
        total += tr;
    }
    Ok(total / rat_u(group.order() as u64))
}

/// Graded data of the i-th differential power of the invariant ring.
#[derive(Clone, Debug)]
pub struct DiffPowerReport {
    pub i: u64,
    pub degree_cutoff: u64,
    /// dim of [R^G / m^<i>]_d for d = 0..=degree_cutoff.
    pub quotient_graded_dims: Vec<u64>,
    pub total_dim: u64,
    pub pairing_rank: u64,
}

/// Invariant polynomials of exact weighted degree d, as a reduced basis.
fn invariant_poly_basis(group: &FiniteMatrixGroup, weights: &[u32], d: u64) -> Vec<Poly> {
    let n = weights.len();
    let w64: Vec<u64> = weights.iter().map(|w| *w as u64).collect();
    let monos: Vec<Mono> = monos_within(&w64, d)
        .into_iter()
        .filter(|m| m.wdeg(weights) == d)
        .collect();
    let dict: std::collections::BTreeMap<Mono, usize> = monos
        .iter()
        .cloned()
        .enumerate()
        .map(|(c, m)| (m, c))
        .collect();
    let mut elim = Eliminator::new(monos.len());
    for m in &monos {
        let avg = reynolds_poly(group, &Poly::monomial(m.clone(), rat_i(1)));
        if avg.is_zero() {
            continue;
        }
        let mut row: Vec<(usize, Rat)> = avg
            .terms()
            .map(|(k, c)| (dict[k], c.clone()))
            .collect();
        row.sort_by_key(|(c, _)| *c);
        elim.add_row(row);
    }
    elim.pivot_rows()
        .into_iter()
        .map(|row| {
            let mut p = Poly::zero(n);
            for (col, c) in row {
                p.add_term(monos[col].clone(), c);
            }
            p
        })
        .collect()
}

/// Invariant constant-coefficient operators of weighted partial degree d
/// and order at most `max_order`, as a reduced basis.
fn invariant_partial_basis(
    group: &FiniteMatrixGroup,
    weights: &[u32],
    d: u64,
    max_order: u64,
) -> Vec<QOp> {
    let n = weights.len();
    let w64: Vec<u64> = weights.iter().map(|w| *w as u64).collect();
    let monos: Vec<Mono> = monos_within(&w64, d)
        .into_iter()
        .filter(|m| m.wdeg(weights) == d && (m.deg() as u64) <= max_order)
        .collect();
    let dict: std::collections::BTreeMap<Mono, usize> = monos
        .iter()
        .cloned()
        .enumerate()
        .map(|(c, m)| (m, c))
        .collect();
    let mut elim = Eliminator::new(monos.len());
    for m in &monos {
        let op = WeylOp::term(Mono::zero(n), m.clone(), rat_i(1));
        let avg = reynolds_op(group, &op);
        if avg.is_zero() {
            continue;
        }
        let mut row: Vec<(usize, Rat)> = avg
            .terms()
            .map(|((_, b), c)| (dict[b], c.clone()))
            .collect();
        row.sort_by_key(|(c, _)| *c);
        elim.add_row(row);
    }
    elim.pivot_rows()
        .into_iter()
        .map(|row| {
            let mut op = WeylOp::zero(n);
            for (col, c) in row {
                op.add_term(Mono::zero(n), monos[col].clone(), c);
            }
            op
        })
        .collect()
}

/// Computes m^<i> of R^G degree by degree through the evaluation pairing
/// between invariant operators of order < i and invariant forms.  A
/// homogeneous form of degree d escapes m^<i> exactly when some invariant
/// operator of order < i and partial degree d sends it to a nonzero
/// constant; only degrees d <= wmax (i-1) can escape.
pub fn differential_power(
    group: &FiniteMatrixGroup,
    spec: &WeightedRingSpec,
    i: u64,
) -> Result<DiffPowerReport> {
    if i == 0 {
        return Err(Error::BadParameter("power index must be positive".into()));
    }
    if !group.is_grading_preserving(spec.weights()) {
        return Err(Error::GradingNotPreserved);
    }
    let cutoff = (spec.wmax() as u64) * (i - 1);
    let mut graded = Vec::with_capacity(cutoff as usize + 1);
    graded.push(1u64); // constants never land in the maximal ideal
    let mut rank_total = 1u64;
    for d in 1..=cutoff {
        let cols = invariant_poly_basis(group, spec.weights(), d);
        if cols.is_empty() {
            graded.push(0);
            continue;
        }
        let rows = invariant_partial_basis(group, spec.weights(), d, i - 1);
        // Pairing matrix: constant term of (row operator)(column form).
        let p: Vec<Vec<Rat>> = rows
            .iter()
            .map(|op| {
                cols.iter()
                    .map(|form| op.apply(form).coeff(&Mono::zero(spec.n())))
                    .collect()
            })
            .collect();
        let rank = mat_rank(&p) as u64;
        let nullity = kernel_dense(&p, cols.len()).len() as u64;
        debug_assert_eq!(rank + nullity, cols.len() as u64);
        graded.push(cols.len() as u64 - nullity);
        rank_total += rank;
    }
    let total_dim = graded.iter().sum();
    Ok(DiffPowerReport {
        i,
        degree_cutoff: cutoff,
        quotient_graded_dims: graded,
        total_dim,
        pairing_rank: rank_total,
    })
}

/// Normalized differential-power dimensions: value at i is
/// d! dim(R^G/m^<i>) / i^d with d the Krull dimension.
#[derive(Clone, Debug)]
pub struct SignatureEstimate {
    pub dims: Vec<u64>,
    pub values: Vec<Rat>,
    pub trailing: Rat,
    pub krull_dim: u64,
}

pub fn diff_signature_estimate(
    group: &FiniteMatrixGroup,
    spec: &WeightedRingSpec,
    imax: u64,
) -> Result<SignatureEstimate> {
    if imax == 0 {
        return Err(Error::BadParameter("need at least one power".into()));
    }
    let d = spec.n() as u32;
    let mut dims = Vec::with_capacity(imax as usize);
    let mut values = Vec::with_capacity(imax as usize);
    let mut dfact = rat_i(1);
    for k in 2..=d as u64 {
        dfact *= rat_u(k);
    }
    for i in 1..=imax {
        let rep = differential_power(group, spec, i)?;
        dims.push(rep.total_dim);
        let mut ipow = rat_i(1);
        for _ in 0..d {
            ipow *= rat_u(i);
        }
        values.push(dfact.clone() * rat_u(rep.total_dim) / ipow);
    }
    let window = (values.len() / 3).max(1);
    let trailing = values[values.len() - window..]
        .iter()
        .cloned()
        .max()
        .expect("nonempty window");
    Ok(SignatureEstimate {
        dims,
        values,
        trailing,
        krull_dim: d as u64,
    })
}

/// Basis of the invariant order-one operators of negative degree: the
/// fixed space of the contragredient representation on the span of the
/// partials.
pub fn negative_degree_order1(group: &FiniteMatrixGroup) -> Vec<QOp> {
    let n = group.n;
    let mut avg = vec![vec![Rat::zero(); n]; n];
    for g in &group.elements {
        let h = mat_transpose(&mat_inv(g).expect("invertible"));
        for i in 0..n {
            for j in 0..n {
                avg[i][j] += &h[i][j];
            }
        }
    }
    let scale = rat(1, group.order() as i64);
    let mut elim = Eliminator::new(n);
    for j in 0..n {
        let row: Vec<(usize, Rat)> = (0..n)
            .filter(|i| !avg[*i][j].is_zero())
            .map(|i| (i, avg[i][j].clone() * &scale))
            .collect();
        elim.add_row(row);
    }
    elim.pivot_rows()
        .into_iter()
        .map(|row| {
            let mut op = WeylOp::zero(n);
            for (col, c) in row {
                op.add_term(Mono::zero(n), Mono::unit(n, col), c);
            }
            op
        })
        .collect()
}

/// Outcome of the differential-direct-summand compatibility check:
/// averaging after acting equals acting by the averaged operator on
/// invariant probes, in R and (for invariant f) in R_f.
#[derive(Clone, Debug)]
pub struct SummandReport {
    pub samples: usize,
    pub probes: usize,
    pub ok: bool,
    pub failure: Option<String>,
}

pub fn summand_check(
    group: &FiniteMatrixGroup,
    spec: &WeightedRingSpec,
    probes: &[Poly],
    f: Option<&Poly>,
    samples: usize,
    seed: u64,
) -> Result<SummandReport> {
    let n = spec.n();
    for v in probes {
        if reynolds_poly(group, v) != *v {
            return Err(Error::BadParameter(format!(
                "probe {v} is not invariant"
            )));
        }
    }
    let ring = match f {
        Some(f) => {
            if reynolds_poly(group, f) != *f {
                return Err(Error::BadParameter(
                    "denominator polynomial is not invariant".into(),
                ));
            }
            Some(LocalizedRing::new(f.clone())?)
        }
        None => None,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checked = 0usize;
    for _ in 0..samples {
        let op = random_qop(&mut rng, n, 3, 3, 4);
        let avg = reynolds_op(group, &op);
        for v in probes {
            checked += 1;
            match &ring {
                None => {
                    let lhs = reynolds_poly(group, &op.apply(v));
                    let rhs = avg.apply(v);
                    if lhs != rhs {
                        return Ok(SummandReport {
                            samples,
                            probes: probes.len(),
                            ok: false,
                            failure: Some(format!("polynomial probe {v}")),
                        });
                    }
                }
                Some(ring) => {
                    for t in 0..3u32 {
                        let elt = ring.elt(v.clone(), t);
                        let acted = ring.act(&op, &elt);
                        let lhs = LocalizedElement {
                            num: reynolds_poly(group, &acted.num),
                            t: acted.t,
                        };
                        let rhs = ring.act(&avg, &elt);
                        if !ring.eq(&lhs, &rhs) {
                            return Ok(SummandReport {
                                samples,
                                probes: probes.len(),
                                ok: false,
                                failure: Some(format!("localized probe {v} / f^{t}")),
                            });
                        }
                    }
                }
            }
        }
    }
    let _ = checked;
    Ok(SummandReport {
        samples,
        probes: probes.len(),
        ok: true,
        failure: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weyl::random_poly;

    fn swap2() -> Mat {
        vec![
            vec![Rat::zero(), rat_i(1)],
            vec![rat_i(1), Rat::zero()],
        ]
    }

    #[test]
    fn closure_orders() {
        assert_eq!(FiniteMatrixGroup::cyclic_sign(2).order(), 2);
        assert_eq!(group_closure(&[swap2()], 10).unwrap().order(), 2);
        assert_eq!(FiniteMatrixGroup::permutation(3).unwrap().order(), 6);
        assert_eq!(
            FiniteMatrixGroup::diag_signs(&[true, true]).unwrap().order(),
            4
        );
        assert_eq!(FiniteMatrixGroup::rotation4().order(), 4);
        // An infinite group trips the cap.
        let stretch = vec![
            vec![rat_i(2), Rat::zero()],
            vec![Rat::zero(), rat_i(1)],
        ];
        assert!(matches!(
            group_closure(&[stretch], 100),
            Err(Error::GroupTooLarge(_))
        ));
    }

    #[test]
    fn fixture_names() {
        assert_eq!(fixture("cyclic-sign(1)").unwrap().order(), 2);
        assert_eq!(fixture("perm(3)").unwrap().order(), 6);
        assert_eq!(fixture("diag-signs(10)").unwrap().order(), 2);
        assert_eq!(fixture("rot4").unwrap().order(), 4);
        assert_eq!(fixture("trivial(2)").unwrap().order(), 1);
        assert!(fixture("nonsense").is_err());
    }

    #[test]
    fn pseudoreflection_detection() {
        assert!(pseudoreflections(&FiniteMatrixGroup::cyclic_sign(2)).is_empty());
        assert!(pseudoreflections(&FiniteMatrixGroup::trivial(2)).is_empty());
        let sw = group_closure(&[swap2()], 10).unwrap();
        assert_eq!(pseudoreflections(&sw).len(), 1);
        let ds = FiniteMatrixGroup::diag_signs(&[true, true]).unwrap();
        assert_eq!(pseudoreflections(&ds).len(), 2);
        assert!(pseudoreflections(&FiniteMatrixGroup::rotation4()).is_empty());
    }

    #[test]
    fn reynolds_poly_goldens() {
        let g = FiniteMatrixGroup::cyclic_sign(1);
        let x = Poly::var(1, 0);
        assert!(reynolds_poly(&g, &x).is_zero());
        assert_eq!(reynolds_poly(&g, &x.pow(2)), x.pow(2));
        let triv = FiniteMatrixGroup::trivial(1);
        assert_eq!(reynolds_poly(&triv, &x), x);
    }

    #[test]
    fn reynolds_idempotent_and_fixed() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for group in [FiniteMatrixGroup::cyclic_sign(2), FiniteMatrixGroup::rotation4()] {
            for _ in 0..25 {
                let op = random_qop(&mut rng, 2, 3, 2, 3);
                let avg = reynolds_op(&group, &op);
                assert_eq!(reynolds_op(&group, &avg), avg);
                for g in group.elements() {
                    assert_eq!(act_op(g, &avg), avg);
                }
            }
        }
    }

    #[test]
    fn reynolds_right_linear_over_invariants() {
        let group = FiniteMatrixGroup::cyclic_sign(2);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let op = random_qop(&mut rng, 2, 2, 2, 3);
            let eta = reynolds_op(&group, &random_qop(&mut rng, 2, 2, 2, 3));
            let lhs = reynolds_op(&group, &op.mul(&eta));
            let rhs = reynolds_op(&group, &op).mul(&eta);
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn action_respects_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let group = FiniteMatrixGroup::rotation4();
        for g in group.elements() {
            for _ in 0..8 {
                let a = random_qop(&mut rng, 2, 2, 2, 3);
                let b = random_qop(&mut rng, 2, 2, 2, 3);
                assert_eq!(act_op(g, &a.mul(&b)), act_op(g, &a).mul(&act_op(g, &b)));
                let p = random_poly(&mut rng, 2, 3, 3);
                assert_eq!(act_poly(g, &a.apply(&p)), act_op(g, &a).apply(&act_poly(g, &p)));
            }
        }
    }

    #[test]
    fn invariant_level_bases() {
        let spec = WeightedRingSpec::standard(1, 2).unwrap();
        let group = FiniteMatrixGroup::cyclic_sign(1);
        let space = invariant_bf_basis(&group, &spec, 2).unwrap();
        assert_eq!(space.dim(), 4);
        for op in &space.basis {
            for g in group.elements() {
                assert_eq!(&act_op(g, op), op);
            }
            assert!(spec.member(op, 2));
        }
        let space = invariant_bf_basis(&group, &spec, 1).unwrap();
        assert_eq!(space.dim(), 1);
        // Trivial group keeps the full level.
        let triv = FiniteMatrixGroup::trivial(1);
        let space = invariant_bf_basis(&triv, &spec, 3).unwrap();
        assert_eq!(space.dim() as u128, spec.dim(3));
    }

    #[test]
    fn invariant_dimension_trace_crosscheck() {
        let spec = WeightedRingSpec::standard(2, 2).unwrap();
        for group in [
            FiniteMatrixGroup::cyclic_sign(2),
            FiniteMatrixGroup::rotation4(),
            FiniteMatrixGroup::diag_signs(&[true, true]).unwrap(),
        ] {
            for i in 0..=5 {
                let by_basis = invariant_bf_basis(&group, &spec, i).unwrap().dim();
                let by_trace = invariant_dimension_by_trace(&group, &spec, i).unwrap();
                assert_eq!(rat_u(by_basis as u64), by_trace, "level {i}");
            }
        }
    }

    #[test]
    fn differential_powers_trivial_group() {
        let spec = WeightedRingSpec::standard(1, 2).unwrap();
        let triv = FiniteMatrixGroup::trivial(1);
        for i in 1..=12 {
            let rep = differential_power(&triv, &spec, i).unwrap();
            assert_eq!(rep.total_dim, i, "m^<i> = m^i in one variable");
            assert_eq!(rep.pairing_rank, rep.total_dim);
        }
        let spec2 = WeightedRingSpec::standard(2, 2).unwrap();
        let triv2 = FiniteMatrixGroup::trivial(2);
        for i in 1..=8 {
            let rep = differential_power(&triv2, &spec2, i).unwrap();
            assert_eq!(rep.total_dim, i * (i + 1) / 2);
            assert_eq!(rep.pairing_rank, rep.total_dim);
        }
    }

    #[test]
    fn differential_powers_sign_group() {
        let spec = WeightedRingSpec::standard(1, 2).unwrap();
        let group = FiniteMatrixGroup::cyclic_sign(1);
        for i in 1..=12 {
            let rep = differential_power(&group, &spec, i).unwrap();
            assert_eq!(rep.total_dim, i.div_ceil(2), "dim at i = {i}");
            assert_eq!(rep.pairing_rank, rep.total_dim);
        }
    }

    #[test]
    fn signature_estimates() {
        let spec = WeightedRingSpec::standard(1, 2).unwrap();
        let triv = FiniteMatrixGroup::trivial(1);
        let est = diff_signature_estimate(&triv, &spec, 8).unwrap();
        assert!(est.values.iter().all(|v| *v == rat_i(1)));
        let group = FiniteMatrixGroup::cyclic_sign(1);
        let est = diff_signature_estimate(&group, &spec, 10).unwrap();
        assert_eq!(est.values[9], rat(1, 2));
        assert!(est.values.iter().all(|v| *v > Rat::zero()));
        let spec2 = WeightedRingSpec::standard(2, 2).unwrap();
        let triv2 = FiniteMatrixGroup::trivial(2);
        let est = diff_signature_estimate(&triv2, &spec2, 8).unwrap();
        // 2 C(i+1, 2) / i^2 = (i+1)/i
        assert_eq!(est.values[7], rat(9, 8));
    }

    #[test]
    fn negative_degree_operators() {
        assert!(negative_degree_order1(&FiniteMatrixGroup::cyclic_sign(1)).is_empty());
        let triv = FiniteMatrixGroup::trivial(1);
        let ops = negative_degree_order1(&triv);
        assert_eq!(ops, vec![WeylOp::d_var(1, 0)]);
        let half = FiniteMatrixGroup::diag_signs(&[true, false]).unwrap();
        let ops = negative_degree_order1(&half);
        assert_eq!(ops, vec![WeylOp::d_var(2, 1)]);
        assert!(negative_degree_order1(&FiniteMatrixGroup::rotation4()).is_empty());
    }

    #[test]
    fn summand_compatibility() {
        let spec = WeightedRingSpec::standard(1, 2).unwrap();
        let group = FiniteMatrixGroup::cyclic_sign(1);
        let x2 = Poly::var(1, 0).pow(2);
        let probes = vec![Poly::one(1), x2.clone()];
        let rep = summand_check(&group, &spec, &probes, None, 30, 11).unwrap();
        assert!(rep.ok, "{:?}", rep.failure);
        let rep = summand_check(&group, &spec, &probes, Some(&x2), 15, 12).unwrap();
        assert!(rep.ok, "{:?}", rep.failure);
        // Non-invariant probes are rejected.
        assert!(summand_check(&group, &spec, &[Poly::var(1, 0)], None, 5, 13).is_err());
    }
}
