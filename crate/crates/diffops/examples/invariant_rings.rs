//! Invariant rings of finite matrix groups: Reynolds averaging, invariant
//! operator spaces, differential powers, and the differential signature.

use diffops::bernstein::WeightedRingSpec;
use diffops::invariants::{
    diff_signature_estimate, differential_power, fixture, invariant_bf_basis,
    invariant_dimension_by_trace, negative_degree_order1, pseudoreflections, reynolds_poly,
    summand_check,
};
use diffops::text::parse_poly;

fn main() {
    // Z/2 acting by x -> -x.  Invariants are k[x^2].
    let g = fixture("cyclic-sign(1)").unwrap();
    let spec = WeightedRingSpec::standard(1, 2).unwrap();
    println!("== cyclic-sign(1), order {} ==", g.order());
    println!("pseudoreflections: {}", pseudoreflections(&g).len());

    for s in ["x", "x^2", "x^3", "1 + x + x^2"] {
        let f = parse_poly(s, 1).unwrap();
        println!("Reynolds({s}) = {}", reynolds_poly(&g, &f));
    }

    // Invariant operators in each Bernstein level; the trace formula counts
    // them without listing.
    println!("\ninvariant operator space per level:");
    for i in 0..=4 {
        let space = invariant_bf_basis(&g, &spec, i).unwrap();
        let by_trace = invariant_dimension_by_trace(&g, &spec, i).unwrap();
        println!("  level {i}: dim {} (trace formula {})", space.basis.len(), by_trace);
        if i == 2 {
            for op in &space.basis {
                println!("    {op}");
            }
        }
    }

    // The i-th differential power collects what operators of the invariant
    // ring of level up to i can reach; its drop against the maximal ideal
    // powers feeds the signature.
    println!("\n== differential powers ==");
    for i in 1..=4 {
        let rep = differential_power(&g, &spec, i).unwrap();
        println!(
            "  i = {i}: total dim {}, pairing rank {}",
            rep.total_dim, rep.pairing_rank
        );
    }

    // Signature values converge to the free-rank density of R over R^G.
    println!("\n== differential signature ==");
    let est = diff_signature_estimate(&g, &spec, 10).unwrap();
    println!("values: {:?}", est.values.iter().map(|v| v.to_string()).collect::<Vec<_>>());
    println!("trailing estimate: {}", est.trailing);

    // The rotation group of order 4 on two variables.
    let rot = fixture("rot4").unwrap();
    let spec2 = WeightedRingSpec::standard(2, 2).unwrap();
    println!("\n== rot4 on two variables, order {} ==", rot.order());
    let est2 = diff_signature_estimate(&rot, &spec2, 8).unwrap();
    println!("trailing estimate: {}", est2.trailing);
    println!(
        "negative-degree order-1 invariant operators: {}",
        negative_degree_order1(&rot).len()
    );

    // Direct summand probe: Reynolds splits the inclusion R^G -> R.
    let probes: Vec<_> = ["x^2 + y^2", "x^2*y^2"]
        .iter()
        .map(|s| parse_poly(s, 2).unwrap())
        .collect();
    let sm = summand_check(&rot, &spec2, &probes, None, 50, 11).unwrap();
    println!("summand check: ok = {} over {} samples", sm.ok, sm.samples);
    assert!(sm.ok);
}
