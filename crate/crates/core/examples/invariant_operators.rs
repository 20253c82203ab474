// The invariant operators on symbols: sl(2) and Heisenberg brackets, the
// commutation relations with the inversions and the ideal generator Z.

use confquant::invariant::{
    commutation_residual, commutator, compose, ideal_generator_z, CommutationRelation,
    InvariantOperator as I,
};
use confquant::metric::FlatMetric;
use confquant::poly::Poly;
use confquant::scalar::{int, rat};

pub fn run_example() -> confquant::Result<()> {
    let m = FlatMetric::new(2, 1)?;
    let p = Poly::parse(3, "x1^2*xi2*xi3 + x3*xi1^2 - 2*x2*xi2")?;
    let op = |o: I| move |q: &Poly| compose(&[o], &m, q);

    let dg = commutator(op(I::D), op(I::G), &p);
    assert_eq!(dg, compose(&[I::L], &m, &p));
    println!("[D, G] P = L P = {dg}");
    let tr = commutator(op(I::T), op(I::R), &p);
    assert_eq!(tr, compose(&[I::E], &m, &p).scale_rat(&int(4)));
    println!("[T, R] P = 4 E P");

    let delta = rat(2, 5);
    for rel in CommutationRelation::ALL {
        assert!(commutation_residual(rel, &delta, &m, &p)?.is_zero());
    }
    println!("all six commutation relations hold at delta = {delta}");

    let z2 = ideal_generator_z(&FlatMetric::euclidean(2), &Poly::parse(2, "x1^3*xi1*xi2^2 + x2*xi1")?);
    assert!(z2.is_zero());
    let z3 = ideal_generator_z(&FlatMetric::euclidean(3), &Poly::parse(3, "x3^2")?);
    println!("Z vanishes in dimension 2; in dimension 3, Z(x3^2) = {z3}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> confquant::Result<()> {
    run_example()
}
