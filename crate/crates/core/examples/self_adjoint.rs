// Formal self-adjointness of the quantization when lambda + mu = 1.

use confquant::coefficients::Weights;
use confquant::flat::{formal_adjoint, quantize_components, QuantizationParams, Symbol2};
use confquant::scalar::{int, rat};

pub fn run_example() -> confquant::Result<()> {
    let symbol = "x1^2*xi1*xi2 - x2*xi2 + x1*x2";
    for l in [int(0), rat(1, 4), rat(1, 2)] {
        let w = Weights::euclidean(2, l.clone(), int(1) - &l);
        let params = QuantizationParams::new(w.clone()).with_hbar(rat(2, 3)).with_free_value(rat(1, 7));
        let q = quantize_components(&params, &Symbol2::parse(symbol, w.clone())?)?;
        assert_eq!(formal_adjoint(&q), q);
        println!("{w}: Q(P) is formally self-adjoint");
    }
    let w = Weights::euclidean(2, rat(1, 3), rat(3, 4));
    let params = QuantizationParams::new(w.clone()).with_hbar(int(1));
    let q = quantize_components(&params, &Symbol2::parse("x1*xi1", w.clone())?)?;
    let diff = formal_adjoint(&q).sub(&q);
    println!("{w}: Q*(x1 xi1) - Q(x1 xi1) = {}", diff.to_symbol());
    assert!(!diff.is_zero());
    Ok(())
}

#[allow(dead_code)]
fn main() -> confquant::Result<()> {
    run_example()
}
