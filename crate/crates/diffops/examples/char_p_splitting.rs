//! The characteristic-p toolkit: divided-power operators, splitting
//! ideals through the Fedder-style colon computation, F-purity and
//! F-regularity diagnostics, and Veronese Frobenius decompositions.

use diffops::charp::{
    brute_force_splitting_ideal, f_regularity_scan, ring_fixture, splitting_ideal, veronese_ffrt,
    MonomialIdeal,
};
use diffops::mono::Mono;
use diffops::text::{parse_dp_op, parse_fp_poly};

fn main() {
    // In F_p the honest partials die on p-th powers; the divided powers
    // D^(k) survive and generate the full operator ring.
    println!("== divided powers over F_2 ==");
    let d1 = parse_dp_op("d", 1, 2).unwrap();
    let d2 = parse_dp_op("D1^(2)", 1, 2).unwrap();
    let x4 = parse_fp_poly("x^4", 1, 2).unwrap();
    println!("d * d            = {}", d1.mul(&d1));
    println!("d(x^4)           = {}", d1.apply(&x4));
    println!("D^(2)(x^4)       = {}", d2.apply(&x4));
    println!(
        "D^(4)(x^4)       = {}",
        parse_dp_op("D1^(4)", 1, 2).unwrap().apply(&x4)
    );
    println!("D^(2) * D^(2)    = {}", d2.mul(&d2));
    println!("level of d       = {}", d1.level_of());
    println!("level of D^(2)   = {}", d2.level_of());
    println!("level of D^(4)   = {}", parse_dp_op("D1^(4)", 1, 2).unwrap().level_of());

    // Monomial ideal combinatorics drive the exact splitting route.
    println!("\n== colon arithmetic ==");
    let n = 2;
    let xy = MonomialIdeal::new(n, vec![Mono(vec![1, 1])]).unwrap();
    let fro = xy.frobenius_power(4).unwrap();
    println!("I = {xy}, I^[4] = {fro}");
    println!("I^[4] : I = {}", fro.colon(&xy));
    println!("m^[4] : (I^[4] : I) = {}", MonomialIdeal::maximal(n).frobenius_power(4).unwrap().colon(&fro.colon(&xy)));

    // Splitting ideals I_e: everything whose p^e-th root cannot be split
    // off.  For k[x,y]/(xy) the chain is stuck at the maximal ideal.
    println!("\n== splitting ideals for k[x,y]/(xy), p = 2 ==");
    let ring = ring_fixture("xy-hypersurface-p2").unwrap();
    for e in 1..=3 {
        let ideal = splitting_ideal(&ring, e, 8).unwrap();
        println!(
            "  I_{e} = {} (contains 1: {})",
            ideal.monomial.as_ref().unwrap(),
            ideal.contains_one
        );
    }
    let brute = brute_force_splitting_ideal(&ring, 8).unwrap();
    let fedder = splitting_ideal(&ring, 1, 8).unwrap();
    println!(
        "  brute-force enumeration at e = 1 agrees: {}",
        brute.as_slice() == fedder.monomial.as_ref().unwrap().gens()
    );

    // The scan turns the chain into a verdict.
    println!("\n== F-regularity scans ==");
    for name in ["xy-hypersurface-p2", "poly-p2-2", "quadric-p3", "cusp-p5"] {
        let ring = ring_fixture(name).unwrap();
        let rep = f_regularity_scan(&ring, 3, 8).unwrap();
        println!("  {name}: {}", rep.verdict);
        if let Some(a) = rep.witness_a {
            println!("    uniform witness a = {a}");
        }
    }

    // Veronese subrings have finite Frobenius representation type: R^(1/q)
    // decomposes into the r graded classes with these multiplicities.
    println!("\n== Veronese class multiplicities ==");
    for (n, r, p, e) in [(1, 2, 3, 1), (2, 2, 3, 1), (2, 3, 2, 2)] {
        let classes = veronese_ffrt(n, r, p, e).unwrap();
        let shown: Vec<String> = classes.iter().map(|(j, m)| format!("{j}: {m}")).collect();
        println!("  n = {n}, r = {r}, p = {p}, e = {e}: {{{}}}", shown.join(", "));
    }
}
