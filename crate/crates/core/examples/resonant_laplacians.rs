// The resonant Laplacians: Yamabe, Laplace, the new invariant Laplacian and
// the Sturm-Liouville operator on the line.

use confquant::coefficients::{c_coefficient, Weights};
use confquant::curved::{resonant_laplacians, LaplacianCase};
use confquant::geometry::examples::sphere;
use confquant::geometry::{DiffeoJet1D, MetricJet2};
use confquant::linalg;
use confquant::scalar::{int, rat};

pub fn run_example() -> confquant::Result<()> {
    for n in 2..=6usize {
        let mut row = Vec::new();
        for case in [LaplacianCase::Yamabe, LaplacianCase::Laplace, LaplacianCase::New] {
            let c = case.scalar_coefficient(n)?;
            let (l, mu) = case.weights(n)?;
            assert_eq!(c_coefficient(&Weights::euclidean(n, l, mu)), Some(c.clone()));
            row.push(format!("{} {c}", case.name()));
        }
        println!("n = {n}: {}", row.join(", "));
    }
    let point: Vec<_> = (0..4).map(|i| rat(1, i + 2)).collect();
    let y = resonant_laplacians(LaplacianCase::Yamabe, &sphere(&int(1), &point), None, &int(1))?;
    println!("Yamabe operator on the unit 4-sphere: A0 = {}", y.a0);

    let phi = DiffeoJet1D::exponential(int(2))?;
    let fp = phi.presentation();
    let line = MetricJet2::presentation(&fp, &linalg::identity(1))?;
    let sl = resonant_laplacians(LaplacianCase::SturmLiouville, &line, Some(&fp), &rat(1, 3))?;
    println!("Sturm-Liouville operator for phi = exp: {}", serde_json::to_string(&sl).expect("json"));
    Ok(())
}

#[allow(dead_code)]
fn main() -> confquant::Result<()> {
    run_example()
}
