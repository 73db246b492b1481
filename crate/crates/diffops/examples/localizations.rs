//! Operator actions on localizations R_f, the closed-form action through
//! bracket chains, and the Theta homomorphism into R_f[s] f^s.

use diffops::dmod::{fs_act, fs_scale_spoly, specialize, theta_hom, FsElement, LocalizedRing};
use diffops::poly::Poly;
use diffops::rat::rat_i;
use diffops::spoly::SPoly;
use diffops::text::{parse_poly, parse_qop};

fn main() {
    let n = 1;
    let f = parse_poly("x", n).unwrap();
    let ring = LocalizedRing::new(f).unwrap();
    let d = parse_qop("d", n).unwrap();

    println!("== actions on R_x ==");
    let one_over_x = ring.elt(Poly::one(n), 1);
    let v = ring.act(&d, &one_over_x);
    println!("d(1/x)       = ({})/x^{}", v.num, v.t);
    let w = ring.act(&d, &v);
    println!("d^2(1/x)     = ({})/x^{}", w.num, w.t);

    let op = parse_qop("x*d^2 + d", n).unwrap();
    let u = ring.elt(parse_poly("x^2 + 1", n).unwrap(), 3);
    let direct = ring.act(&op, &u);
    let closed = ring.act_closed(&op, &u);
    println!("op((x^2+1)/x^3) = ({})/x^{}", direct.num, direct.t);
    assert!(ring.eq(&direct, &closed));
    println!("closed-form action agrees");

    // Conjugation identity delta f^j on probes, j negative.
    println!("\n== commutation probes at negative powers ==");
    for j in [-1i64, -2, -4] {
        let ok = ring.commute_probe(&op, j, &u);
        println!("j = {j}: {ok}");
        assert!(ok);
    }

    // Theta rewrites an operator as an s-parametric one acting on formal
    // powers f^s; on R_x the partial turns into multiplication by s/x.
    println!("\n== Theta homomorphism and f^s ==");
    let sf = theta_hom(&ring, &d);
    println!("Theta(d) = x^-{} * ({})", sf.fpow, sf.num);
    let fs = FsElement::fs(&ring);
    let dfs = fs_act(&ring, &d.lift_s(), &fs);
    println!(
        "d . f^s = (({})/x^{}) s f^s",
        dfs.coeffs[1].num, dfs.coeffs[1].t
    );

    // Specializing s to an integer t commutes with acting.
    let sop = op.lift_s();
    let u = fs_scale_spoly(&ring, &SPoly::s(), &FsElement::from_localized(ring.elt(Poly::one(n), 1)));
    for t in -3i64..=3 {
        let lhs = specialize(&ring, &fs_act(&ring, &sop, &u), t);
        let rhs = ring.act(&sop.specialize_s(&rat_i(t)), &specialize(&ring, &u, t));
        assert!(ring.eq(&lhs, &rhs));
    }
    println!("specialization square commutes for t in -3..=3");

    // A second ring: localization at a product needs higher denominators.
    println!("\n== R_f for f = x^2 - 1 ==");
    let f2 = parse_poly("x^2 - 1", n).unwrap();
    let ring2 = LocalizedRing::new(f2).unwrap();
    let e = ring2.elt(Poly::one(n), 1);
    let de = ring2.act(&d, &e);
    println!("d(1/f)       = ({})/f^{}", de.num, de.t);
    let dde = ring2.act(&d, &de);
    println!("d^2(1/f)     = ({})/f^{}", dde.num, dde.t);
}
