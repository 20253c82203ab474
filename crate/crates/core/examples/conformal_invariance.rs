// The curved quantization depends only on the conformal class: rescaling
// the metric by a factor leaves the operator unchanged.

use confquant::coefficients::{default_coefficients, Weights};
use confquant::curved::{conformal_invariance_difference, random::symbol_jet};
use confquant::geometry::random::{factor_jet, metric_jet};
use confquant::geometry::MetricJet2;
use confquant::linalg;
use confquant::random::PolyGen;
use confquant::scalar::{int, rat};

pub fn run_example() -> confquant::Result<()> {
    let mut g = PolyGen::new(2024, 4);
    let w = Weights::euclidean(4, rat(1, 3), rat(3, 4));
    let set = default_coefficients(&w)?;
    for k in 0..3 {
        let m = metric_jet(&mut g, &[1, 1, 1, -1]);
        let f = factor_jet(&mut g, 4);
        let s = symbol_jet(&mut g, &w);
        let d = conformal_invariance_difference(&set, &m, &f, &s, None)?;
        assert!(d.is_zero());
        println!("n = 4 sample {k}: Q(F g) - Q(g) = 0");
    }

    let w2 = Weights::euclidean(2, rat(1, 2), rat(1, 2));
    let set2 = default_coefficients(&w2)?;
    let fp = factor_jet(&mut g, 2);
    let m2 = MetricJet2::presentation(&fp, &linalg::identity(2))?;
    let f = factor_jet(&mut g, 2);
    let s = symbol_jet(&mut g, &w2);
    let d = conformal_invariance_difference(&set2, &m2, &f, &s, Some(&fp))?;
    assert!(d.is_zero());
    println!("n = 2 through a presentation with factor F = {}: difference 0", fp.f);

    let mut wrong = set.clone();
    wrong.set("beta5", Some(set.require("beta5")? + int(1)))?;
    let m = metric_jet(&mut g, &[1, 1, 1, 1]);
    let d = conformal_invariance_difference(&wrong, &m, &factor_jet(&mut g, 4), &symbol_jet(&mut g, &w), None)?;
    println!("with beta5 off by one the difference is {}", d.max_abs());
    Ok(())
}

#[allow(dead_code)]
fn main() -> confquant::Result<()> {
    run_example()
}
