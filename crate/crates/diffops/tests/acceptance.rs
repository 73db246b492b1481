//! Acceptance suite: eleven end-to-end checks, one pass line each.
//! Every golden value is pinned against an independent closed form or an
//! explicit replay oracle, never against the code under test.

use std::process::Command;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use diffops::bernstein::{gr_commutativity_check, WeightedRingSpec};
use diffops::charp::{
    brute_force_splitting_ideal, f_regularity_scan, ring_fixture, splitting_ideal, DpOp,
    MonomialIdeal,
};
use diffops::dmod::{
    bs_solve, fs_act, fs_scale_spoly, holonomic_growth_report, sfrac_eq, sfrac_mul, specialize,
    theta_hom, verify_bs_pair, FsElement, GrowthModule, LocalizedRing,
};
use diffops::filtration::{bernstein_check, dim_estimate, length_bound};
use diffops::invariants::{differential_power, diff_signature_estimate, fixture};
use diffops::mono::Mono;
use diffops::poly::Poly;
use diffops::rat::{binom_u128, rat, rat_i};
use diffops::simplicity::{membership_certificate, min_constant_table, reduce_to_unit};
use diffops::spoly::SPoly;
use diffops::weyl::{commute_identity_exact, random_poly, random_qop, WeylOp};

use num_traits::{Signed, Zero};

fn pass(name: &str) {
    println!("acceptance {name}: pass");
}

#[test]
fn acceptance_01_commutation_identity() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for k in 0u32..500 {
        let n = 1 + (k as usize % 2);
        let op = random_qop(&mut rng, n, 3, 3, 3);
        let mut f = random_poly(&mut rng, n, 3, 3);
        if f.is_zero() {
            f = Poly::var(n, 0);
        }
        let j = rand::Rng::gen_range(&mut rng, 0..=6u32);
        assert!(commute_identity_exact(&op, &f, j), "triple {k}");
        if k % 5 == 0 {
            let ring = LocalizedRing::new(f).unwrap();
            let probe = ring.elt(Poly::one(n), 1);
            let jn = rand::Rng::gen_range(&mut rng, -4i64..0);
            assert!(ring.commute_probe(&op, jn, &probe), "probe {k}");
        }
    }
    assert!(start.elapsed() < Duration::from_secs(10));
    pass("01 commutation identity suite");
}

#[test]
fn acceptance_02_bernstein_dimension_counting() {
    let s1 = WeightedRingSpec::standard(1, 2).unwrap();
    let seq1 = s1.dim_seq(200);
    for i in 0u64..=50 {
        assert_eq!(seq1.dims()[i as usize], (i + 1) * (i + 2) / 2, "n=1 i={i}");
    }
    let s2 = WeightedRingSpec::standard(2, 2).unwrap();
    let seq2 = s2.dim_seq(200);
    for i in 0u64..=50 {
        let expected = binom_u128(i + 4, 4) as u64;
        assert_eq!(seq2.dims()[i as usize], expected, "n=2 i={i}");
    }
    let fit1 = dim_estimate(&seq1, 8).unwrap();
    assert!(fit1.stable);
    assert_eq!(fit1.degree, rat_i(2));
    assert_eq!(fit1.multiplicity, rat(1, 2));
    let fit2 = dim_estimate(&seq2, 8).unwrap();
    assert!(fit2.stable);
    assert_eq!(fit2.degree, rat_i(4));
    assert_eq!(fit2.multiplicity, rat(1, 24));
    for fit in [&fit1, &fit2] {
        assert!(fit.multiplicity.is_positive());
    }
    pass("02 filtration dimension counting");
}

#[test]
fn acceptance_03_module_degree_evidence() {
    let spec = WeightedRingSpec::standard(1, 2).unwrap();
    let algebra = spec.dim_seq(40);
    let ring_rep = holonomic_growth_report(&GrowthModule::PolyRing, &spec, 40, 8).unwrap();
    assert_eq!(ring_rep.estimate.degree, rat_i(1));
    assert!(ring_rep.matches_ring_dim);

    let loc_rep = holonomic_growth_report(
        &GrowthModule::Localized(Poly::var(1, 0)),
        &spec,
        30,
        6,
    )
    .unwrap();
    assert_eq!(loc_rep.estimate.degree, rat_i(1));
    assert!(loc_rep.matches_ring_dim);

    // Both module degrees sit at the lower bound: 2 * 1 = deg of the
    // algebra, the equality case.
    for module in [&ring_rep.dims, &loc_rep.dims] {
        let check = bernstein_check(&algebra, module, 6, Some(1)).unwrap();
        assert!(check.degree_holds);
        assert!(check.degree_equality_case);
    }
    pass("03 module degree lower bound");
}

#[test]
fn acceptance_04_functional_equation_goldens() {
    let cases: [(&str, usize, Poly, SPoly); 3] = [
        (
            "x",
            1,
            Poly::var(1, 0),
            SPoly::from_coeffs(vec![rat_i(1), rat_i(1)]),
        ),
        (
            "x^2",
            1,
            Poly::var(1, 0).pow(2),
            SPoly::from_coeffs(vec![rat(1, 2), rat(3, 2), rat_i(1)]),
        ),
        (
            "x^2 + y^2",
            2,
            Poly::var(2, 0).pow(2).add(&Poly::var(2, 1).pow(2)),
            SPoly::from_coeffs(vec![rat_i(1), rat_i(2), rat_i(1)]),
        ),
    ];
    for (name, _n, f, expected_b) in &cases {
        let start = Instant::now();
        let sol = bs_solve(f, 8, 1, 3, None).unwrap().expect("pair exists");
        assert_eq!(&sol.b, expected_b, "b for {name}");
        assert!(sol.verified);
        assert!(verify_bs_pair(f, &sol.delta, &sol.b, 6), "oracle {name}");
        assert!(start.elapsed() < Duration::from_secs(120), "{name}");
    }

    // Invariant solve: delta restricted to operators fixed by x -> -x.
    let start = Instant::now();
    let g = fixture("cyclic-sign(1)").unwrap();
    let f = Poly::var(1, 0).pow(2);
    let sol = bs_solve(&f, 8, 1, 3, Some(&g)).unwrap().expect("pair exists");
    assert_eq!(
        sol.b,
        SPoly::from_coeffs(vec![rat(1, 2), rat(3, 2), rat_i(1)])
    );
    assert!(sol.verified && sol.invariant_space);
    assert!(verify_bs_pair(&f, &sol.delta, &sol.b, 6));
    assert!(start.elapsed() < Duration::from_secs(120));
    pass("04 functional equation goldens");
}

#[test]
fn acceptance_05_theta_homomorphism() {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    for k in 0..100 {
        let n = 1 + (k % 2);
        let mut f = random_poly(&mut rng, n, 2, 2);
        if f.is_zero() {
            f = Poly::var(n, 0);
        }
        let ring = LocalizedRing::new(f).unwrap();
        let a = random_qop(&mut rng, n, 2, 2, 2);
        let b = random_qop(&mut rng, n, 2, 2, 2);
        let lhs = theta_hom(&ring, &a.mul(&b));
        let rhs = sfrac_mul(&ring, &theta_hom(&ring, &a), &theta_hom(&ring, &b));
        assert!(sfrac_eq(&ring, &lhs, &rhs), "pair {k}");
    }

    for k in 0..100 {
        let mut f = random_poly(&mut rng, 1, 2, 2);
        if f.is_zero() {
            f = Poly::var(1, 0);
        }
        let ring = LocalizedRing::new(f).unwrap();
        let sc = SPoly::from_coeffs(vec![rat_i(1), rat_i(2)]);
        let op = random_qop(&mut rng, 1, 2, 2, 2).lift_s().scale(&sc);
        let a = ring.elt(random_poly(&mut rng, 1, 2, 2), 1);
        let u = fs_scale_spoly(&ring, &SPoly::s(), &FsElement::from_localized(a));
        for t in -3i64..=5 {
            let lhs = specialize(&ring, &fs_act(&ring, &op, &u), t);
            let rhs = ring.act(&op.specialize_s(&rat_i(t)), &specialize(&ring, &u, t));
            assert!(ring.eq(&lhs, &rhs), "sample {k}, t = {t}");
        }
    }
    pass("05 theta homomorphism");
}

#[test]
fn acceptance_06_simplicity_certificates() {
    let start = Instant::now();
    let spec = WeightedRingSpec::standard(1, 2).unwrap();
    for i in 0u64..=6 {
        for (x, d) in spec.basis(i) {
            let op = WeylOp::term(x, d, rat_i(1));
            let red = reduce_to_unit(&op, &spec).unwrap();
            assert!(red.verified && !red.constant.is_zero());
            let mem = membership_certificate(&op, i, 1, &spec, None)
                .unwrap()
                .expect("constant 1 certifies");
            assert!(mem.verified);
            assert_eq!(mem.c, 1);
        }
    }

    let g = fixture("cyclic-sign(1)").unwrap();
    let table = min_constant_table(&spec, Some(&g), 6, 5, 2, 106).unwrap();
    for entry in &table {
        assert_eq!(entry.capped, 0, "level {}", entry.level);
        let c = entry.max_c.expect("finite constant");
        assert!(c <= 5, "level {}", entry.level);
    }
    assert!(start.elapsed() < Duration::from_secs(300));
    pass("06 simplicity certificates");
}

#[test]
fn acceptance_07_differential_signature() {
    let spec = WeightedRingSpec::standard(1, 2).unwrap();
    let trivial = fixture("trivial(1)").unwrap();
    let sign = fixture("cyclic-sign(1)").unwrap();
    for i in 1u64..=12 {
        let rep = differential_power(&trivial, &spec, i).unwrap();
        assert_eq!(rep.total_dim, i, "trivial i={i}");
        assert_eq!(rep.pairing_rank, rep.total_dim, "trivial i={i}");
        let rep = differential_power(&sign, &spec, i).unwrap();
        assert_eq!(rep.total_dim, i.div_ceil(2), "sign i={i}");
        assert_eq!(rep.pairing_rank, rep.total_dim, "sign i={i}");
    }

    let est = diff_signature_estimate(&trivial, &spec, 12).unwrap();
    for v in &est.values {
        assert_eq!(v, &rat_i(1));
    }
    // Values converge to 1/2: exactly 1/2 at even i, 1/2 + 1/(2i) at odd i.
    let est = diff_signature_estimate(&sign, &spec, 12).unwrap();
    for (k, v) in est.values.iter().enumerate() {
        let i = (k + 1) as i64;
        if i % 2 == 0 {
            assert_eq!(v, &rat(1, 2), "i={i}");
        } else {
            assert_eq!(v, &(rat(1, 2) + rat(1, 2 * i)), "i={i}");
        }
    }
    assert!(est.trailing >= rat(1, 2));
    assert!(est.trailing - rat(1, 2) <= rat(1, 18));

    let spec2 = WeightedRingSpec::standard(2, 2).unwrap();
    let fixtures: [(&str, &WeightedRingSpec); 5] = [
        ("trivial(1)", &spec),
        ("cyclic-sign(1)", &spec),
        ("cyclic-sign(2)", &spec2),
        ("rot4", &spec2),
        ("perm(2)", &spec2),
    ];
    for (name, sp) in fixtures {
        let g = fixture(name).unwrap();
        let est = diff_signature_estimate(&g, sp, 8).unwrap();
        assert!(est.trailing.is_positive(), "{name}");
        assert!(est.values.iter().all(|v| v.is_positive()), "{name}");
    }
    pass("07 differential signature");
}

#[test]
fn acceptance_08_graded_commutativity() {
    let s1 = WeightedRingSpec::standard(1, 2).unwrap();
    let rep = gr_commutativity_check(&s1, 3, 3, 300, 108);
    assert!(rep.ok, "{:?}", rep.failure);
    assert_eq!(rep.samples, 300);
    let s2 = WeightedRingSpec::new(2, vec![1, 2], rat_i(3)).unwrap();
    let rep = gr_commutativity_check(&s2, 2, 3, 200, 109);
    assert!(rep.ok, "{:?}", rep.failure);
    assert_eq!(rep.samples, 200);
    pass("08 graded commutativity");
}

fn ceil_log(p: u64, m: u64) -> u32 {
    let mut e = 0;
    let mut pe = 1u64;
    while pe < m {
        pe *= p;
        e += 1;
    }
    e
}

#[test]
fn acceptance_09_frobenius_toolkit() {
    let start = Instant::now();

    let ring = ring_fixture("xy-hypersurface-p2").unwrap();
    let rep = f_regularity_scan(&ring, 4, 8).unwrap();
    for ideal in &rep.ideals {
        assert_eq!(
            ideal.monomial.as_ref().unwrap(),
            &MonomialIdeal::maximal(2),
            "e = {}",
            ideal.e
        );
    }
    assert!(rep.f_pure && rep.stabilized_nonzero);
    assert_eq!(rep.verdict, "F-pure, not strongly F-regular (window)");

    let rep = f_regularity_scan(&ring_fixture("poly-p2-2").unwrap(), 3, 8).unwrap();
    assert_eq!(rep.witness_a, Some(1));

    let rep = f_regularity_scan(&ring_fixture("quadric-p3").unwrap(), 3, 8).unwrap();
    assert!(rep.f_pure && rep.strictly_shrinking && rep.chain_verified);

    for name in ["xy-hypersurface-p2", "poly-p2-2"] {
        let ring = ring_fixture(name).unwrap();
        let brute = brute_force_splitting_ideal(&ring, 4).unwrap();
        let fedder = splitting_ideal(&ring, 1, 4).unwrap();
        assert_eq!(
            brute.as_slice(),
            fedder.monomial.as_ref().unwrap().gens(),
            "{name}"
        );
    }

    // Containments between order and level, exhaustively in a box.
    for p in [2u64, 3] {
        for n in 1usize..=2 {
            let mut betas = Vec::new();
            for a in 0u32..=8 {
                if n == 1 {
                    betas.push(Mono(vec![a]));
                    continue;
                }
                for b in 0u32..=(8 - a) {
                    betas.push(Mono(vec![a, b]));
                }
            }
            for beta in betas {
                let op = DpOp::dp(p, beta.clone()).unwrap();
                let order = op.order();
                let level = op.level_of();
                assert!(
                    level <= ceil_log(p, order + 1),
                    "p={p} beta={:?}",
                    beta.0
                );
            }
            for e in 1u32..=2 {
                let q = p.pow(e);
                let mut all = vec![Mono::zero(n)];
                for j in 0..n {
                    let mut grown = Vec::new();
                    for m in &all {
                        for v in 0..q {
                            let mut next = m.0.clone();
                            next[j] = v as u32;
                            grown.push(Mono(next));
                        }
                    }
                    all = grown;
                }
                for beta in all {
                    let op = DpOp::dp(p, beta).unwrap();
                    assert!(op.level_of() <= e);
                    assert!(op.order() <= (n as u64) * (q - 1));
                }
            }
        }
    }
    assert!(start.elapsed() < Duration::from_secs(180));
    pass("09 frobenius splitting toolkit");
}

#[test]
fn acceptance_10_length_bound() {
    let bound = length_bound(&rat_i(1), &rat(1, 2), 1, &rat_i(1)).unwrap();
    assert_eq!(bound, rat_i(12));
    pass("10 length bound");
}

fn run_job(args: &[&str]) -> (Vec<u8>, Vec<u8>, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_diffops"))
        .args(args)
        .output()
        .expect("binary runs");
    (out.stdout, out.stderr, out.status.code().unwrap_or(-1))
}

#[test]
fn acceptance_11_deterministic_reports() {
    let jobs: Vec<Vec<&str>> = vec![
        vec!["bf", "dim", "--n", "1", "--weights", "1", "--slope", "2", "--imax", "50", "--csv"],
        vec!["bf", "dim", "--n", "2", "--slope", "2", "--imax", "50"],
        vec!["bf", "basis", "--n", "1", "--slope", "2", "--level", "3"],
        vec!["bf", "check", "--n", "1", "--slope", "2", "--imax", "8", "--seed", "9"],
        vec!["weyl", "mul", "--n", "2", "--a", "x1*d2 + d1^2", "--b", "x2^2*d1"],
        vec!["weyl", "commute", "--n", "1", "--op", "x*d^2", "--f", "x^2 - 1", "--j", "3"],
        vec!["filtration", "estimate", "--dims", "1,3,6,10,15,21,28,36,45,55,66", "--window", "4", "--csv"],
        vec!["filtration", "reindex", "--dims", "1,2,3,4,5,6,7,8,9,10,11,12,13,14,15,16,17", "--p", "2", "--q", "1", "--imax", "4"],
        vec!["filtration", "bernstein", "--algebra", "1,3,6,10,15,21,28,36,45,55", "--module", "1,2,3,4,5,6,7,8,9,10", "--window", "4", "--c", "1"],
        vec!["filtration", "length-bound", "--eg", "1", "--ef", "1/2", "--c", "1", "--theta", "1"],
        vec!["invariants", "basis", "--n", "1", "--slope", "2", "--group", "cyclic-sign(1)", "--level", "4"],
        vec!["invariants", "signature", "--n", "1", "--slope", "2", "--group", "cyclic-sign(1)", "--imax", "8", "--csv"],
        vec!["invariants", "power", "--n", "2", "--slope", "2", "--group", "rot4", "--i", "3"],
        vec!["invariants", "reynolds", "--n", "2", "--group", "rot4", "--f", "x^2 + x*y"],
        vec!["simplicity", "reduce", "--n", "1", "--slope", "2", "--op", "x^2*d - 5*d^3"],
        vec!["simplicity", "membership", "--n", "1", "--slope", "2", "--op", "x + d", "--level", "1", "--c", "1"],
        vec!["simplicity", "table", "--n", "1", "--slope", "2", "--imax", "4", "--cmax", "3", "--seed", "5"],
        vec!["bs", "solve", "--f", "x^2", "--level", "6", "--sdeg", "1", "--bdeg", "3"],
        vec!["bs", "solve", "--n", "2", "--f", "x^2 + y^2", "--level", "6", "--sdeg", "1", "--bdeg", "3"],
        vec!["dmod", "act", "--n", "1", "--f", "x", "--op", "d^2", "--num", "x^2 + 1", "--t", "1"],
        vec!["dmod", "theta", "--n", "1", "--f", "x^2 - 1", "--op", "x*d"],
        vec!["dmod", "growth", "--n", "1", "--slope", "2", "--f", "x", "--imax", "8", "--window", "4", "--csv"],
        vec!["charp", "split", "--ring", "xy-hypersurface-p2", "--emax", "3"],
        vec!["charp", "split", "--ring", "quadric-p3", "--emax", "2", "--window", "6"],
        vec!["charp", "ffrt", "--n", "2", "--r", "2", "--p", "3", "--e", "1", "--csv"],
        vec!["charp", "level", "--n", "2", "--p", "3", "--op", "x1*D2^(4)"],
    ];
    for job in &jobs {
        let (out1, err1, code1) = run_job(job);
        let (out2, err2, code2) = run_job(job);
        assert_eq!(code1, 0, "job {job:?}: {}", String::from_utf8_lossy(&err1));
        assert_eq!(code1, code2, "job {job:?}");
        assert_eq!(out1, out2, "job {job:?}");
        assert_eq!(err1, err2, "job {job:?}");
    }

    // Spot goldens through the CLI surface.
    let (out, _, _) = run_job(&["bf", "dim", "--n", "1", "--weights", "1", "--slope", "2", "--imax", "50", "--csv"]);
    let text = String::from_utf8(out).unwrap();
    assert_eq!(text.lines().last().unwrap(), "50,1326");
    let (out, _, _) = run_job(&["bs", "solve", "--f", "x^2", "--level", "6", "--sdeg", "1", "--bdeg", "3"]);
    let v: serde_json::Value = serde_json::from_slice(&out).unwrap();
    assert_eq!(v["result"]["b"], serde_json::json!("s^2 + 3/2*s + 1/2"));
    let (out, _, _) = run_job(&["charp", "split", "--ring", "xy-hypersurface-p2", "--emax", "3"]);
    let v: serde_json::Value = serde_json::from_slice(&out).unwrap();
    assert_eq!(
        v["result"]["verdict"],
        serde_json::json!("F-pure, not strongly F-regular (window)")
    );

    // Usage errors exit 2 and name the failing field.
    let (_, err, code) = run_job(&["bf", "dim", "--n", "2", "--weights", "1", "--slope", "2"]);
    assert_eq!(code, 2);
    assert!(String::from_utf8_lossy(&err).contains("--weights"));
    pass("11 deterministic reports");
}
