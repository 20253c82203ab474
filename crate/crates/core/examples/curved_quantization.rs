// Quantizing symbol jets on a curved background, and the flat reduction.

use confquant::coefficients::Weights;
use confquant::curved::{quantize_curved_with, quantize_second_order, PointOperator, SymbolJet2};
use confquant::flat::{quantize_components_with, QuantizationParams, Symbol2};
use confquant::geometry::examples::sphere;
use confquant::geometry::MetricJet2;
use confquant::metric::FlatMetric;
use confquant::scalar::{int, rat, Rational};

pub fn run_example() -> confquant::Result<()> {
    let w = Weights::euclidean(3, rat(1, 3), rat(3, 4));
    let point = [rat(1, 2), rat(-1, 3), int(1)];
    let s = Symbol2::parse("x1*xi1^2 + x2*x3*xi2*xi3 - xi3 + x1^2", w.clone())?;
    let jet = SymbolJet2::from_symbol(&s, &point)?;

    let on_sphere = quantize_second_order(&w, &sphere(&int(1), &point), &jet, None)?;
    println!("on the unit sphere: {}", serde_json::to_string(&on_sphere).expect("json"));

    let set = QuantizationParams::new(w.clone()).coefficients()?;
    let hbar = rat(1, 2);
    let flat = MetricJet2::flat(&FlatMetric::euclidean(3));
    let curved = quantize_curved_with(&set, &flat, &jet, None, Some(&hbar))?;
    let poly = quantize_components_with(&set, s.poly(), Some(&hbar))?;
    let frozen = PointOperator::from_polynomial(&poly, &point, &w)?;
    assert_eq!(curved, frozen);
    println!("flat background: curved output equals the polynomial operator frozen at {:?}",
        point.iter().map(Rational::to_string).collect::<Vec<_>>());
    Ok(())
}

#[allow(dead_code)]
fn main() -> confquant::Result<()> {
    run_example()
}
