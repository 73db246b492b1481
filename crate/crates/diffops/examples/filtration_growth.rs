//! Dimension sequences of filtered algebras and modules: polynomial
//! growth fits, reindexing, domination certificates, and the degree and
//! multiplicity inequalities for faithful modules.

use diffops::bernstein::WeightedRingSpec;
use diffops::filtration::{
    bernstein_check, check_domination, dim_estimate, length_bound, BfLevels, Domination,
    RPolyLevels,
};
use diffops::rat::{rat, rat_i};

fn main() {
    let spec = WeightedRingSpec::standard(1, 2).unwrap();
    let algebra = spec.dim_seq(24);
    println!("== growth of B_i in A_1 ==");
    println!("dims: {:?}", &algebra.dims()[..12]);
    let fit = dim_estimate(&algebra, 6).unwrap();
    println!(
        "degree = {}, multiplicity = {}, stable = {}",
        fit.degree, fit.multiplicity, fit.stable
    );

    let module = spec.r_dim_seq(24);
    println!("\n== growth of the induced filtration on R ==");
    println!("dims: {:?}", &module.dims()[..12]);
    let mfit = dim_estimate(&module, 6).unwrap();
    println!(
        "degree = {}, multiplicity = {}, stable = {}",
        mfit.degree, mfit.multiplicity, mfit.stable
    );

    // Reindexing i -> floor(i^2) turns degree-1 growth into degree-2.
    println!("\n== reindexing along i -> i^2 ==");
    let stretched = module.reindex_power(2, 1, 4).unwrap();
    println!("dims: {:?}", stretched.dims());

    // R_i = B_i(1) sits inside B_i acting on 1; the certificate checks the
    // containment of spans level by level.
    println!("\n== domination certificates ==");
    let b = BfLevels(&spec);
    let r = RPolyLevels(&spec);
    let rep = check_domination(&r, &b, Domination::Linear { c: 1 }, 8);
    println!(
        "R_i inside B_i spans: certified = {}, checked through {}",
        rep.certified, rep.checked_upto
    );
    assert!(rep.certified);

    // Degree inequality for a faithful module: 2 deg(M) >= deg(B).  For
    // M = R over A_1 this is the equality case 2*1 = 2.
    println!("\n== module degree and multiplicity inequalities ==");
    let check = bernstein_check(&algebra, &module, 6, Some(1)).unwrap();
    println!(
        "algebra degree {}, module degree {}",
        check.algebra.degree, check.module.degree
    );
    println!(
        "degree_holds = {}, equality case = {}, multiplicity_holds = {:?}",
        check.degree_holds, check.degree_equality_case, check.multiplicity_holds
    );
    assert!(check.degree_holds && check.degree_equality_case);

    // Multiplicities bound the length of a filtered module directly.
    println!("\n== length bound ==");
    let bound = length_bound(&rat_i(1), &rat(1, 2), 1, &rat_i(1)).unwrap();
    println!("e_G = 1, e_F = 1/2, C = 1, theta = 1  =>  length <= {bound}");
}
