// Closed-form coefficients of the quantization map, the half-density
// specialization and a resonant family with its free parameters.

use confquant::coefficients::{coefficients, generic_coefficients, Weights};
use confquant::scalar::{int, rat};

pub fn run_example() -> confquant::Result<()> {
    let w = Weights::euclidean(3, rat(1, 3), rat(3, 4));
    let set = generic_coefficients(&w)?;
    println!("{w}");
    for name in ["alpha", "beta1", "beta2", "beta3", "beta4", "beta5", "beta6", "C"] {
        println!("  {name:6} = {}", set.require(name)?);
    }

    for n in 1..=4usize {
        let half = generic_coefficients(&Weights::euclidean(n, rat(1, 2), rat(1, 2)))?;
        let nn = int(n as i64);
        assert_eq!(half.gamma4, Some(&nn / (int(8) * (&nn + int(1)) * (&nn + int(2)))));
        println!(
            "half-densities, n = {n}: gamma2 = {}, gamma4 = {}, gamma5 = {}",
            half.require("gamma2")?,
            half.require("gamma4")?,
            half.require("gamma5")?
        );
    }

    let laplace = Weights::euclidean(2, int(0), int(1));
    let family = coefficients(&laplace, None, false)?;
    let open: Vec<_> = family.free_parameters.iter().map(|p| p.name.as_str()).collect();
    println!("{laplace}: resonant, free parameters {}", open.join(", "));
    assert!(open.contains(&"gamma3"));
    Ok(())
}

#[allow(dead_code)]
fn main() -> confquant::Result<()> {
    run_example()
}
