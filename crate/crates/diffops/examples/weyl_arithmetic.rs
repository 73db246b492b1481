//! Normal forms in the Weyl algebra, commutators, and conjugation of an
//! operator past a power of a polynomial.

use diffops::dmod::LocalizedRing;
use diffops::poly::Poly;
use diffops::text::{parse_poly, parse_qop};
use diffops::weyl::{commute_f_sides, commute_identity_exact, commute_identity_mirror};

fn main() {
    let n = 1;
    let d = parse_qop("d", n).unwrap();
    let x = parse_qop("x", n).unwrap();

    println!("== products in normal form ==");
    println!("d * x       = {}", d.mul(&x));
    println!("x * d       = {}", x.mul(&d));
    println!("[d, x]      = {}", d.commutator(&x));
    println!("(x*d)^3     = {}", x.mul(&d).pow(3));

    let op = parse_qop("x^2*d + 3*d^2", n).unwrap();
    let f = parse_poly("x^3 - 2*x", n).unwrap();
    println!("\n== action on a polynomial ==");
    println!("op          = {op}");
    println!("f           = {f}");
    println!("op(f)       = {}", op.apply(&f));

    // delta f^j = sum_i binom(j, i) f^(j-i) delta_i, where delta_i is the
    // i-fold bracket with f.  Both sides expand to the same normal form.
    println!("\n== conjugation past f^j ==");
    for j in [0u32, 1, 2, 4] {
        let (lhs, rhs) = commute_f_sides(&op, &f, j);
        assert!(commute_identity_exact(&op, &f, j));
        assert!(commute_identity_mirror(&op, &f, j));
        println!("j = {j}: both sides have {} terms, equal", lhs.terms().count());
        assert_eq!(lhs, rhs);
    }

    // The same identity probed for negative powers inside R_f.
    println!("\n== negative powers, probed in the localization ==");
    let ring = LocalizedRing::new(f.clone()).unwrap();
    let probe = ring.elt(Poly::one(n), 1);
    for j in [-1i64, -2, -3] {
        let ok = ring.commute_probe(&op, j, &probe);
        println!("j = {j}: identity on 1/f holds: {ok}");
        assert!(ok);
    }

    println!("\n== two variables ==");
    let laplace = parse_qop("d1^2 + d2^2", 2).unwrap();
    let r2 = parse_poly("x^2 + y^2", 2).unwrap();
    println!("Laplacian(r^2)     = {}", laplace.apply(&r2));
    println!("[Laplacian, x1]    = {}", laplace.commutator(&parse_qop("x1", 2).unwrap()));
}
