// The quantized geodesic Hamiltonian and the quantum minimal coupling.

use confquant::coefficients::{c_coefficient, Weights};
use confquant::curved::{quantize_geodesic, quantize_minimal_coupling, ConnectionJet};
use confquant::geometry::curvature_from_jets;
use confquant::geometry::examples::sphere;
use confquant::scalar::{int, rat};

pub fn run_example() -> confquant::Result<()> {
    let m = sphere(&int(1), &[rat(1, 2), rat(1, 3), rat(1, 4)]);
    let r = curvature_from_jets(&m)?.scalar;
    let w = Weights::euclidean(3, rat(1, 2), rat(1, 2));
    let c = c_coefficient(&w).expect("generic weights");
    assert_eq!(c, rat(-9, 40));
    let h = quantize_geodesic(&w, &m, &int(1))?;
    println!("half-densities on the unit 3-sphere (R = {r}): C = {c}");
    println!("  -(Delta + C R): {}", serde_json::to_string(&h).expect("json"));

    let a = ConnectionJet::new(
        vec![int(1), rat(-1, 2), int(0)],
        vec![vec![int(0), int(1), int(0)], vec![int(0), int(0), rat(1, 3)], vec![int(2), int(0), int(0)]],
    )?;
    let hbar = rat(1, 2);
    let coupled = quantize_minimal_coupling(&w, &m, &a, &hbar)?;
    println!("  minimal coupling: A0 = {}", coupled.a0);
    let zero = quantize_minimal_coupling(&w, &m, &ConnectionJet::zero(3), &hbar)?;
    assert_eq!(zero, quantize_geodesic(&w, &m, &hbar)?);

    for (l, mu) in [(rat(1, 2), rat(1, 2)), (int(0), int(0)), (rat(1, 4), rat(3, 4))] {
        let w = Weights::euclidean(3, l.clone(), mu.clone());
        let anomaly = (int(1) - &l - &mu) / (int(1) - w.delta());
        println!("  lambda = {l}, mu = {mu}: anomaly coefficient {anomaly}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> confquant::Result<()> {
    run_example()
}
