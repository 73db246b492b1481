//! The functional equation delta(s) f^(s+1) = b(s) f^s: searching for the
//! pair, verifying it on integer specializations, and the invariant
//! variant where delta must commute with a group action.

use diffops::dmod::{bs_solve, verify_bs_pair};
use diffops::invariants::fixture;
use diffops::rat::rat_i;
use diffops::text::parse_poly;

fn main() {
    println!("== classical examples ==");
    for (s, n, level) in [("x", 1, 2), ("x^2", 1, 6), ("x^2 + y^2", 2, 6), ("x*y", 2, 6)] {
        let f = parse_poly(s, n).unwrap();
        match bs_solve(&f, level, 1, 4, None).unwrap() {
            Some(sol) => {
                println!("f = {s}");
                println!("  b(s)   = {}", sol.b);
                println!("  delta  = {}", sol.delta);
                println!(
                    "  verified = {}, minimal in search = {}, level = {}",
                    sol.verified, sol.minimal_in_search, sol.level
                );
                assert!(sol.verified);
            }
            None => println!("f = {s}: nothing in the window"),
        }
    }

    // The verifier replays the equation at s = 0..6 exactly.
    println!("\n== explicit re-verification ==");
    let f = parse_poly("x^2", 1).unwrap();
    let sol = bs_solve(&f, 6, 1, 3, None).unwrap().unwrap();
    let ok = verify_bs_pair(&f, &sol.delta, &sol.b, 6);
    println!("x^2: b(s) = {}, replay through t = 6: {ok}", sol.b);
    assert!(ok);
    // b factors through its rational roots: b(-1) = b(-1/2) = 0.
    println!("b(-1)   = {}", sol.b.eval(&rat_i(-1)));
    println!("b(0)    = {}", sol.b.eval(&rat_i(0)));

    // Restricting delta to operators invariant under x -> -x still finds
    // the same b for f = x^2, with an equivariant witness.
    println!("\n== invariant operator space ==");
    let g = fixture("cyclic-sign(1)").unwrap();
    let sol = bs_solve(&f, 6, 1, 3, Some(&g)).unwrap().unwrap();
    println!("b(s)  = {}", sol.b);
    println!("delta = {} (invariant space: {})", sol.delta, sol.invariant_space);
    assert!(sol.verified && sol.invariant_space);

    // A polynomial with no solution at too small a level: the search
    // window matters.
    println!("\n== window sensitivity ==");
    let f3 = parse_poly("x^3", 1).unwrap();
    match bs_solve(&f3, 2, 1, 4, None).unwrap() {
        Some(sol) => println!("x^3 at level 2: b = {}", sol.b),
        None => println!("x^3 at level 2: no pair in the window"),
    }
    match bs_solve(&f3, 8, 1, 4, None).unwrap() {
        Some(sol) => {
            println!("x^3 at level 8: b = {}", sol.b);
            assert!(sol.verified);
        }
        None => println!("x^3 at level 8: no pair in the window"),
    }
}
