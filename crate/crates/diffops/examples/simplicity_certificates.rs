//! Certificates of linear simplicity: bracket reductions to a unit and
//! explicit combinations showing 1 in B_Ci delta B_Ci.

use diffops::bernstein::WeightedRingSpec;
use diffops::invariants::fixture;
use diffops::simplicity::{
    membership_certificate, membership_from_reduction, min_constant_table, reduce_to_unit, Move,
};
use diffops::text::parse_qop;

fn move_name(m: &Move) -> String {
    match m {
        Move::D(j) => format!("[ , d{}]", j + 1),
        Move::X(j) => format!("[ , x{}]", j + 1),
    }
}

fn main() {
    let spec = WeightedRingSpec::standard(1, 2).unwrap();

    // Iterated brackets with coordinates and partials kill the top
    // exponents one at a time until only a constant is left.
    println!("== reduction to a unit ==");
    for s in ["x", "x*d", "x^2*d - 5*d^3", "x^3*d^2 + x"] {
        let op = parse_qop(s, 1).unwrap();
        let cert = reduce_to_unit(&op, &spec).unwrap();
        let moves: Vec<String> = cert.moves.iter().map(move_name).collect();
        println!(
            "{s}: {} moves -> constant {}, verified = {}",
            cert.moves.len(),
            cert.constant,
            cert.verified
        );
        if !moves.is_empty() {
            println!("    {}", moves.join(" then "));
        }
        assert!(cert.verified);
    }

    // A membership certificate writes 1 = sum c_k alpha_k delta beta_k
    // with the side factors confined to level C*i.
    println!("\n== membership certificates, delta in B_1 with C = 1 ==");
    for s in ["x", "d", "x + d"] {
        let delta = parse_qop(s, 1).unwrap();
        let cert = membership_certificate(&delta, 1, 1, &spec, None)
            .unwrap()
            .expect("certificate exists");
        println!("delta = {s}: {} terms, verified = {}", cert.combination.len(), cert.verified);
        for (l, r, c) in &cert.combination {
            println!("    ({c}) * ({l}) delta ({r})");
        }
        assert!(cert.verified);
    }

    // Expanding a bracket reduction gives a membership certificate whose
    // constant matches the reduction moves.
    println!("\n== membership from a reduction ==");
    let op = parse_qop("x^2*d", 1).unwrap();
    let red = reduce_to_unit(&op, &spec).unwrap();
    let mem = membership_from_reduction(&red, &spec).unwrap();
    println!(
        "x^2*d reduces in {} moves; expanded certificate has {} terms at C = {}",
        red.moves.len(),
        mem.combination.len(),
        mem.c
    );
    assert!(mem.verified);

    // Scanning whole levels gives the least constants that certify every
    // operator there.
    println!("\n== least constants over full levels ==");
    let table = min_constant_table(&spec, None, 4, 3, 2, 5).unwrap();
    for e in &table {
        println!(
            "  level {}: sampled {}, max C = {:?}, capped = {}",
            e.level, e.sampled, e.max_c, e.capped
        );
    }

    // Restricted to invariants of x -> -x the constants grow: the side
    // factors must themselves be invariant.
    println!("\n== invariant side factors for cyclic-sign(1) ==");
    let g = fixture("cyclic-sign(1)").unwrap();
    let delta = parse_qop("x^2", 1).unwrap();
    for c in 1..=5 {
        match membership_certificate(&delta, 2, c, &spec, Some(&g)).unwrap() {
            Some(cert) => {
                println!("delta = x^2: C = {c} works, {} terms", cert.combination.len());
                break;
            }
            None => println!("delta = x^2: C = {c} has no certificate"),
        }
    }
}
