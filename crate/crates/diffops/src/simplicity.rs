//! Linear-simplicity certificates: commutator reduction of a nonzero
//! operator to a nonzero scalar, and exact membership tests
//! 1 in B_(Ci) delta B_(Ci), for the full operator algebra and for
//! invariant subalgebras.  Every certificate is replay-verified.

use std::collections::BTreeMap;

use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bernstein::WeightedRingSpec;
use crate::error::{Error, Result};
use crate::invariants::{invariant_bf_basis, FiniteMatrixGroup};
use crate::linalg::Eliminator;
use crate::mono::Mono;
use crate::poly::Poly;
use crate::rat::{rat_i, Rat};
use crate::weyl::{QOp, WeylOp};

/// One commutator move: bracket with the indicated generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Move {
    /// Bracket with d_j.
    D(usize),
    /// Bracket with x_j.
    X(usize),
}

impl Move {
    pub fn operand(&self, n: usize) -> QOp {
        match self {
            Move::D(j) => WeylOp::d_var(n, *j),
            Move::X(j) => WeylOp::from_poly(&Poly::var(n, *j)),
        }
    }
}

/// A replayable reduction of delta to a nonzero constant.
#[derive(Clone, Debug)]
pub struct ReductionCertificate {
    pub start: QOp,
    pub moves: Vec<Move>,
    pub constant: Rat,
    pub verified: bool,
}

/// Greedy commutator reduction.  While some term carries an x-exponent,
/// bracket with the d_j whose maximal exponent over the stored terms is
/// largest (smallest j on ties): every surviving term maps injectively, so
/// the result stays nonzero.  Then strip d-exponents the same way with
/// x_j brackets.  The move count is bounded by the maximal total degree.
pub fn reduce_to_unit(op: &QOp, spec: &WeightedRingSpec) -> Result<ReductionCertificate> {
    if op.is_zero() {
        return Err(Error::BadParameter("cannot reduce the zero operator".into()));
    }
    if op.nvars() != spec.n() {
        return Err(Error::ArityMismatch("operator versus ring arity".into()));
    }
    let n = op.nvars();
    let mut cur = op.clone();
    let mut moves = Vec::new();
    loop {
        let pick_x = best_index(&cur, true);
        if let Some(j) = pick_x {
            cur = cur.commutator(&WeylOp::d_var(n, j));
            moves.push(Move::D(j));
            continue;
        }
        let pick_d = best_index(&cur, false);
        if let Some(j) = pick_d {
            cur = cur.commutator(&WeylOp::from_poly(&Poly::var(n, j)));
            moves.push(Move::X(j));
            continue;
        }
        break;
    }
    let constant = cur
        .as_constant()
        .ok_or_else(|| Error::BadParameter("reduction left a non-constant".into()))?;
    if constant.is_zero() {
        return Err(Error::BadParameter("reduction reached zero".into()));
    }
    let cert = ReductionCertificate {
        start: op.clone(),
        moves,
        constant,
        verified: false,
    };
    let replayed = replay_reduction(&cert)?;
    if replayed != cert.constant {
        return Err(Error::BadParameter("replay mismatch".into()));
    }
    Ok(ReductionCertificate {
        verified: true,
        ..cert
    })
}

/// The smallest index whose maximal exponent over the stored terms is
/// largest; None when every term has a zero exponent block.
fn best_index(op: &QOp, xs: bool) -> Option<usize> {
    let n = op.nvars();
    let mut best: Option<(u32, usize)> = None;
    for j in 0..n {
        let m = op
            .terms()
            .map(|((a, b), _)| if xs { a.0[j] } else { b.0[j] })
            .max()
            .unwrap_or(0);
        if m > 0 && best.map_or(true, |(bm, _)| m > bm) {
            best = Some((m, j));
        }
    }
    best.map(|(_, j)| j)
}

/// Replays the moves from the starting operator; the result must be the
/// stated constant.
pub fn replay_reduction(cert: &ReductionCertificate) -> Result<Rat> {
    let n = cert.start.nvars();
    let mut cur = cert.start.clone();
    for mv in &cert.moves {
        cur = cur.commutator(&mv.operand(n));
    }
    cur.as_constant()
        .ok_or_else(|| Error::BadParameter("replay left a non-constant".into()))
}

/// An explicit expression 1 = sum_k c_k alpha_k delta beta_k with the
/// multipliers drawn from the level-(C i) space.
#[derive(Clone, Debug)]
pub struct MembershipCertificate {
    pub level: u64,
    pub c: u64,
    pub combination: Vec<(QOp, QOp, Rat)>,
    pub verified: bool,
}

/// Multiplies the combination out and checks it is exactly 1.
pub fn verify_membership(delta: &QOp, cert: &MembershipCertificate) -> bool {
    let n = delta.nvars();
    let mut acc = WeylOp::zero(n);
    for (a, b, c) in &cert.combination {
        acc = acc.add(&a.mul(delta).mul(b).scale_rat(c));
    }
    acc == WeylOp::one(n)
}

/// Searches for 1 in the span of alpha delta beta over basis pairs of the
/// level-(C i) space (the G-invariant part when a group is given), by
/// incremental exact elimination with combination tracking.  Pairs are fed
/// lowest level first and the scan stops as soon as 1 is reached.
pub fn membership_certificate(
    delta: &QOp,
    i: u64,
    c: u64,
    spec: &WeightedRingSpec,
    group: Option<&FiniteMatrixGroup>,
) -> Result<Option<MembershipCertificate>> {
    if delta.is_zero() {
        return Err(Error::BadParameter("zero operator".into()));
    }
    if !spec.member(delta, i) {
        return Err(Error::NotInLevel(format!(
            "operator does not lie in level {i}"
        )));
    }
    let side_ops: Vec<QOp> = match group {
        None => spec
            .basis(c * i)
            .into_iter()
            .map(|(x, d)| WeylOp::term(x, d, rat_i(1)))
            .collect(),
        Some(g) => {
            if !spec_member_invariant(delta, g, spec, i)? {
                return Err(Error::NotInLevel(
                    "operator does not lie in the invariant level space".into(),
                ));
            }
            invariant_bf_basis(g, spec, c * i)?.basis
        }
    };
    if side_ops.is_empty() {
        return Ok(None);
    }
    // Pair ordering: cheapest first by summed level.
    let levels: Vec<Rat> = side_ops
        .iter()
        .map(|op| spec.op_level(op).unwrap_or_else(Rat::zero))
        .collect();
    let mut order: Vec<(usize, usize)> = (0..side_ops.len())
        .flat_map(|a| (0..side_ops.len()).map(move |b| (a, b)))
        .collect();
    order.sort_by(|p, q| {
        let lp = &levels[p.0] + &levels[p.1];
        let lq = &levels[q.0] + &levels[q.1];
        lp.cmp(&lq).then(p.cmp(q))
    });

    // Coordinate dictionary grows on demand; the eliminator's real block
    // is bounded by the level of any product.
    let mut dict: BTreeMap<(Mono, Mono), usize> = BTreeMap::new();
    let bound = real_block_bound(spec, (2 * c + 1) * i);
    let mut elim = Eliminator::new(bound);
    let n = delta.nvars();
    let unit_key = (Mono::zero(n), Mono::zero(n));
    dict.insert(unit_key.clone(), 0);
    let target = vec![(0usize, rat_i(1))];
    for (k, (a, b)) in order.iter().enumerate() {
        let prod = side_ops[*a].mul(delta).mul(&side_ops[*b]);
        if prod.is_zero() {
            continue;
        }
        let mut row: Vec<(usize, Rat)> = prod
            .terms()
            .map(|(key, coeff)| {
                let next = dict.len();
                let col = *dict.entry(key.clone()).or_insert(next);
                assert!(col < bound, "product escaped the level bound");
                (col, coeff.clone())
            })
            .collect();
        row.push((bound + k, rat_i(1)));
        row.sort_by_key(|(col, _)| *col);
        if elim.add_row(row).is_none() {
            continue;
        }
        let (inside, residual) = elim.contains(target.clone());
        if !inside {
            continue;
        }
        let mut combination = Vec::new();
        for (col, coeff) in residual {
            if col >= bound {
                let pair = order[col - bound];
                combination.push((
                    side_ops[pair.0].clone(),
                    side_ops[pair.1].clone(),
                    -coeff,
                ));
            }
        }
        let cert = MembershipCertificate {
            level: i,
            c,
            combination,
            verified: false,
        };
        if !verify_membership(delta, &cert) {
            return Err(Error::BadParameter(
                "membership combination failed verification".into(),
            ));
        }
        return Ok(Some(MembershipCertificate {
            verified: true,
            ..cert
        }));
    }
    Ok(None)
}

fn spec_member_invariant(
    delta: &QOp,
    group: &FiniteMatrixGroup,
    spec: &WeightedRingSpec,
    i: u64,
) -> Result<bool> {
    if !spec.member(delta, i) {
        return Ok(false);
    }
    Ok(crate::invariants::reynolds_op(group, delta) == *delta)
}

fn real_block_bound(spec: &WeightedRingSpec, level: u64) -> usize {
    spec.dim(level).min(1_000_000) as usize
}

/// Converts a reduction certificate into a membership combination by
/// expanding the iterated bracket: each subset of moves multiplies delta
/// from the left in reverse order with an alternating sign.  For integral
/// slopes the side words stay within level i times max(w_j, a - w_j).
pub fn membership_from_reduction(
    cert: &ReductionCertificate,
    spec: &WeightedRingSpec,
) -> Result<MembershipCertificate> {
    let n = cert.start.nvars();
    let m = cert.moves.len();
    if m > 20 {
        return Err(Error::BadParameter("move sequence too long to expand".into()));
    }
    let inv = rat_i(1) / &cert.constant;
    let mut combination = Vec::new();
    for mask in 0u32..(1 << m) {
        let mut left = WeylOp::one(n);
        let mut right = WeylOp::one(n);
        let mut sign = 1i64;
        for (k, mv) in cert.moves.iter().enumerate() {
            if mask & (1 << k) != 0 {
                left = mv.operand(n).mul(&left);
                sign = -sign;
            } else {
                right = right.mul(&mv.operand(n));
            }
        }
        combination.push((left, right, rat_i(sign) * &inv));
    }
    let level = spec
        .op_level(&cert.start)
        .unwrap_or_else(Rat::zero)
        .ceil()
        .to_integer()
        .to_u64()
        .unwrap_or(0)
        .max(1);
    let cmax = cert
        .moves
        .iter()
        .map(|mv| match mv {
            Move::X(j) => rat_i(spec.weights()[*j] as i64),
            Move::D(j) => spec.slope() - rat_i(spec.weights()[*j] as i64),
        })
        .max()
        .unwrap_or_else(|| rat_i(1));
    let c = (cmax.ceil().to_integer().to_u64().unwrap_or(1)).max(1);
    let mc = MembershipCertificate {
        level,
        c,
        combination,
        verified: false,
    };
    if !verify_membership(&cert.start, &mc) {
        return Err(Error::BadParameter(
            "bracket expansion failed verification".into(),
        ));
    }
    Ok(MembershipCertificate {
        verified: true,
        ..mc
    })
}

/// Per-level table of the least verified constant over sampled operators.
#[derive(Clone, Debug, Serialize)]
pub struct MinConstantEntry {
    pub level: u64,
    pub sampled: usize,
    /// max over sampled delta of the least certifying C; None when some
    /// delta exceeded the cap.
    pub max_c: Option<u64>,
    pub capped: usize,
}

pub fn min_constant_table(
    spec: &WeightedRingSpec,
    group: Option<&FiniteMatrixGroup>,
    imax: u64,
    cmax: u64,
    random_samples: usize,
    seed: u64,
) -> Result<Vec<MinConstantEntry>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for i in 0..=imax {
        let basis_ops: Vec<QOp> = match group {
            None => spec
                .basis(i)
                .into_iter()
                .map(|(x, d)| WeylOp::term(x, d, rat_i(1)))
                .collect(),
            Some(g) => invariant_bf_basis(g, spec, i)?.basis,
        };
        let mut samples = basis_ops.clone();
        for _ in 0..random_samples {
            if basis_ops.is_empty() {
                break;
            }
            let mut combo = WeylOp::zero(spec.n());
            for _ in 0..2 {
                let pick = rng.gen_range(0..basis_ops.len());
                let coeff = rat_i([1i64, -1, 2, 3][rng.gen_range(0..4)]);
                combo = combo.add(&basis_ops[pick].scale_rat(&coeff));
            }
            if !combo.is_zero() {
                samples.push(combo);
            }
        }
        let mut worst: Option<u64> = Some(0);
        let mut capped = 0usize;
        for delta in &samples {
            let mut found = None;
            for c in 0..=cmax {
                if membership_certificate(delta, i, c, spec, group)?.is_some() {
                    found = Some(c);
                    break;
                }
            }
            match found {
                Some(c) => {
                    worst = worst.map(|w| w.max(c));
                }
                None => {
                    capped += 1;
                    worst = None;
                }
            }
        }
        out.push(MinConstantEntry {
            level: i,
            sampled: samples.len(),
            max_c: worst,
            capped,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a1() -> WeightedRingSpec {
        WeightedRingSpec::standard(1, 2).unwrap()
    }

    #[test]
    fn reduce_goldens() {
        let spec = a1();
        let x = WeylOp::from_poly(&Poly::var(1, 0));
        let cert = reduce_to_unit(&x, &spec).unwrap();
        assert_eq!(cert.moves, vec![Move::D(0)]);
        assert_eq!(cert.constant, rat_i(-1));
        assert!(cert.verified);

        let five = WeylOp::constant(1, rat_i(5));
        let cert = reduce_to_unit(&five, &spec).unwrap();
        assert!(cert.moves.is_empty());
        assert_eq!(cert.constant, rat_i(5));

        let xd = WeylOp::term(Mono::unit(1, 0), Mono::unit(1, 0), rat_i(1));
        let cert = reduce_to_unit(&xd, &spec).unwrap();
        assert_eq!(cert.moves, vec![Move::D(0), Move::X(0)]);
        assert_eq!(cert.constant, rat_i(-1));
    }

    #[test]
    fn reduce_full_basis() {
        let spec = a1();
        for i in 0..=6 {
            for (x, d) in spec.basis(i) {
                let total = (x.deg() + d.deg()) as usize;
                let op = WeylOp::term(x, d, rat_i(1));
                let cert = reduce_to_unit(&op, &spec).unwrap();
                assert!(cert.verified);
                assert!(cert.moves.len() <= total.max(1));
            }
        }
        assert!(reduce_to_unit(&WeylOp::zero(1), &spec).is_err());
    }

    #[test]
    fn reduce_multiterm() {
        let spec = a1();
        let op = WeylOp::from_poly(&Poly::var(1, 0).add(&Poly::one(1)))
            .add(&WeylOp::d_var(1, 0).pow(2));
        let cert = reduce_to_unit(&op, &spec).unwrap();
        assert!(cert.verified);
        assert!(!cert.constant.is_zero());
    }

    #[test]
    fn membership_goldens() {
        let spec = a1();
        let x = WeylOp::from_poly(&Poly::var(1, 0));
        let cert = membership_certificate(&x, 1, 1, &spec, None)
            .unwrap()
            .unwrap();
        assert!(cert.verified);
        assert!(verify_membership(&x, &cert));

        let one = WeylOp::one(1);
        let cert = membership_certificate(&one, 0, 0, &spec, None)
            .unwrap()
            .unwrap();
        assert!(cert.verified);

        // Level check is enforced.
        let x3 = WeylOp::from_poly(&Poly::var(1, 0).pow(3));
        assert!(matches!(
            membership_certificate(&x3, 1, 1, &spec, None),
            Err(Error::NotInLevel(_))
        ));
    }

    #[test]
    fn membership_monotone_in_c() {
        let spec = a1();
        let xd = WeylOp::term(Mono::unit(1, 0), Mono::unit(1, 0), rat_i(1));
        let at1 = membership_certificate(&xd, 2, 1, &spec, None).unwrap();
        let at2 = membership_certificate(&xd, 2, 2, &spec, None).unwrap();
        assert!(at1.is_some());
        assert!(at2.is_some());
    }

    #[test]
    fn membership_full_basis_c1() {
        let spec = a1();
        for i in 1..=4 {
            for (x, d) in spec.basis(i) {
                let op = WeylOp::term(x, d, rat_i(1));
                let cert = membership_certificate(&op, i, 1, &spec, None)
                    .unwrap()
                    .unwrap_or_else(|| panic!("no certificate at level {i}"));
                assert!(cert.verified);
            }
        }
    }

    #[test]
    fn invariant_membership() {
        let spec = a1();
        let group = FiniteMatrixGroup::cyclic_sign(1);
        let x2 = WeylOp::from_poly(&Poly::var(1, 0).pow(2));
        let mut found = None;
        for c in 1..=5 {
            if let Some(cert) =
                membership_certificate(&x2, 2, c, &spec, Some(&group)).unwrap()
            {
                found = Some((c, cert));
                break;
            }
        }
        let (_, cert) = found.expect("certificate within C <= 5");
        assert!(cert.verified);
        for (a, b, _) in &cert.combination {
            assert!(spec.member(a, cert.c * cert.level));
            assert!(spec.member(b, cert.c * cert.level));
        }
    }

    #[test]
    fn table_full_weyl() {
        let spec = a1();
        let table = min_constant_table(&spec, None, 4, 3, 2, 17).unwrap();
        for entry in &table {
            assert_eq!(entry.capped, 0);
            assert!(entry.max_c.unwrap() <= 1, "level {}", entry.level);
        }
    }

    #[test]
    fn bracket_expansion_certificate() {
        let spec = a1();
        for i in 1..=4 {
            for (x, d) in spec.basis(i) {
                let op = WeylOp::term(x, d, rat_i(1));
                let red = reduce_to_unit(&op, &spec).unwrap();
                let m = red.moves.len();
                let inv = rat_i(1) / &red.constant;
                let mut acc = WeylOp::zero(1);
                let mut max_side_level = Rat::zero();
                for mask in 0u32..(1 << m) {
                    let mut left = WeylOp::one(1);
                    let mut right = WeylOp::one(1);
                    let mut sign = 1i64;
                    for (k, mv) in red.moves.iter().enumerate() {
                        if mask & (1 << k) != 0 {
                            left = mv.operand(1).mul(&left);
                            sign = -sign;
                        } else {
                            right = right.mul(&mv.operand(1));
                        }
                    }
                    for side in [&left, &right] {
                        if let Some(l) = spec.op_level(side) {
                            if l > max_side_level {
                                max_side_level = l.clone();
                            }
                        }
                    }
                    acc = acc.add(&left.mul(&op).mul(&right).scale_rat(&(rat_i(sign) * &inv)));
                }
                assert_eq!(acc, WeylOp::one(1));
                // C = max(w, a - w) = 1 for the standard slope-2 grading.
                assert!(max_side_level <= rat_i(i as i64));
            }
        }
    }
}
