// Equivariance of the quantization map under every conformal generator,
// and how a perturbed coefficient breaks it.

use confquant::coefficients::Weights;
use confquant::flat::{equivariance_residual_with, monomial_basis, QuantizationParams};
use confquant::scalar::rat;
use confquant::vector_field::VectorFieldGenerator;
use confquant::verify::mutation_detected;

pub fn run_example() -> confquant::Result<()> {
    let w = Weights::new(2, 1, rat(1, 3), rat(3, 4))?;
    let set = QuantizationParams::new(w.clone()).coefficients()?;
    let basis = monomial_basis(3, 1, 2);
    let mut checked = 0;
    for x in VectorFieldGenerator::all(w.metric()) {
        for p in &basis {
            assert!(equivariance_residual_with(&set, &x, p)?.is_zero());
            checked += 1;
        }
    }
    println!("{w}: {checked} generator/symbol pairs, every residual is zero");

    let inversion = VectorFieldGenerator::inversion(w.metric(), 0);
    println!("inversion generator {inversion}: field {:?}", inversion.field().components().iter().map(|c| c.to_string()).collect::<Vec<_>>());

    assert!(mutation_detected(&set, "beta3", &basis, false)?);
    println!("adding 1 to beta3 produces a nonzero residual");
    Ok(())
}

#[allow(dead_code)]
fn main() -> confquant::Result<()> {
    run_example()
}
