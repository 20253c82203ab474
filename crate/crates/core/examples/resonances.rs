// Resonant shifts, their admissible weights and the lambda-free solve of
// the equivariance system.

use confquant::coefficients::{resonance_report, solve_lambda_free, LambdaFreeSolution};
use confquant::scalar::rat;

pub fn run_example() -> confquant::Result<()> {
    for n in [1usize, 2, 4] {
        let report = resonance_report(n)?;
        println!("n = {n}: resonances {}", report.resonant_deltas.join(", "));
        for (delta, pairs) in &report.pairs {
            let pairs: Vec<_> = pairs.iter().map(ToString::to_string).collect();
            println!("  delta = {delta}: (lambda, mu) in {}", pairs.join(", "));
        }
    }
    match solve_lambda_free(4, &rat(5, 4))? {
        LambdaFreeSolution::Finite(sols) => {
            let lambdas: Vec<_> = sols.iter().map(|(l, _)| l.to_string()).collect();
            println!("n = 4, delta = 5/4: solvable exactly for lambda in {}", lambdas.join(", "));
            assert_eq!(lambdas, ["-1/4", "0"]);
        }
        other => panic!("expected finitely many lambdas, got {other:?}"),
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> confquant::Result<()> {
    run_example()
}
