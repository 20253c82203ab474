// Quantizing polynomial symbols on flat space, with and without a Planck
// constant, and applying the resulting operator to a density.

use confquant::coefficients::Weights;
use confquant::flat::{apply_operator, quantize, quantize_ansatz, QuantizationParams, Symbol2};
use confquant::poly::Poly;
use confquant::scalar::{int, rat};

pub fn run_example() -> confquant::Result<()> {
    let w = Weights::euclidean(2, rat(1, 2), rat(1, 2));
    let h = Symbol2::parse("xi1^2 + xi2^2", w.clone())?;
    let params = QuantizationParams::new(w.clone()).with_hbar(int(1));
    let laplacian = quantize(&params, &h)?;
    println!("Q(xi1^2 + xi2^2) with hbar = 1 has symbol {}", laplacian.to_symbol());
    assert_eq!(laplacian.to_symbol(), Poly::parse(2, "-xi1^2 - xi2^2")?);

    let s = Symbol2::parse("x1*xi1*xi2 + x2^2*xi1 + 3", Weights::euclidean(2, rat(1, 3), rat(3, 4)))?;
    let plain = QuantizationParams::new(s.weights().clone());
    let op = quantize(&plain, &s)?;
    assert_eq!(op, quantize_ansatz(&plain, &s)?);
    println!("Q({}) = {}", s.poly(), op.to_symbol());

    let f = Poly::parse(2, "x1^2*x2")?;
    println!("applied to {f}: {}", apply_operator(&op, &f)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> confquant::Result<()> {
    run_example()
}
