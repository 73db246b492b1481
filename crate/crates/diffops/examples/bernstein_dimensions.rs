//! Weighted Bernstein filtrations: level membership, bases, dimension
//! sequences, and the comparison constants between different slopes.

use diffops::bernstein::{
    eps_and_order_domination, gr_commutativity_check, slope_witness, WeightedRingSpec,
};
use diffops::rat::rat;
use diffops::text::parse_qop;
use diffops::weyl::WeylOp;

fn main() {
    // Standard filtration on A_1: weight 1 on x, slope 2, so level of
    // x^a d^b is a + b.
    let spec = WeightedRingSpec::standard(1, 2).unwrap();
    println!("== A_1, weight 1, slope 2 ==");
    print!("dims B_0..B_10:");
    for i in 0..=10 {
        print!(" {}", spec.dim(i));
    }
    println!();

    println!("basis of B_2:");
    for (x, d) in spec.basis(2) {
        println!("  {}", WeylOp::term(x, d, rat(1, 1)));
    }

    let op = parse_qop("x^2*d - 5*d^3", 1).unwrap();
    let lv = spec.op_level(&op).unwrap();
    println!("level of {op}: {lv}");
    println!("member of B_2: {}", spec.member(&op, 2));
    println!("member of B_3: {}", spec.member(&op, 3));

    // Fractional slope with uneven weights.  Levels are rational; the
    // level of x^a d^b is sum a_j w_j + sum b_j (slope - w_j).
    let wspec = WeightedRingSpec::new(2, vec![1, 2], rat(5, 2)).unwrap();
    println!("\n== weights (1,2), slope 5/2 ==");
    print!("dims B_0..B_8:");
    for i in 0..=8 {
        print!(" {}", wspec.dim(i));
    }
    println!();
    let op2 = parse_qop("x2*d1^2", 2).unwrap();
    println!("level of {op2}: {}", wspec.op_level(&op2).unwrap());

    // Two slopes on the same weights compare through a uniform constant:
    // B^low_i sits inside B^high_(c i) and vice versa with the roles of the
    // levels stretched.
    println!("\n== slope comparison ==");
    let low = WeightedRingSpec::standard(1, 2).unwrap();
    let high = WeightedRingSpec::standard(1, 3).unwrap();
    let w = slope_witness(&low, &high, 12).unwrap();
    println!(
        "c = {}, checked through level {}, ok = {}",
        w.c, w.checked_upto, w.ok
    );

    // Order domination: differential order of anything in B_i stays below
    // a linear function of i.
    println!("\n== order domination ==");
    let rep = eps_and_order_domination(&spec, 12);
    println!(
        "eps = {}, C = {}, checked through level {}, ok = {}",
        rep.eps, rep.c, rep.checked_upto, rep.ok
    );

    // The associated graded algebra is commutative: brackets drop a level.
    println!("\n== gr commutativity sample ==");
    let gr = gr_commutativity_check(&spec, 3, 3, 200, 17);
    println!("samples = {}, ok = {}", gr.samples, gr.ok);
    assert!(w.ok && rep.ok && gr.ok);
}
