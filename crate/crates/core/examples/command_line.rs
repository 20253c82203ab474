// Driving the command line in process: JSON on stdout, exit codes for
// resonance and admissibility errors.

use confquant::cli::run_with;

fn run(args: &[&str]) -> (i32, serde_json::Value) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run_with(std::iter::once("confquant").chain(args.iter().copied()), &mut out, &mut err);
    let json = serde_json::from_slice(&out).unwrap_or(serde_json::Value::Null);
    (code, json)
}

pub fn run_example() -> confquant::Result<()> {
    let (code, json) = run(&["coeffs", "--n", "2", "--p", "2", "--q", "0", "--lambda", "1/2", "--mu", "1/2"]);
    assert_eq!(code, 0);
    println!("coeffs: gamma4 = {}", json["coefficients"]["gamma4"]);

    let (code, json) = run(&["quantize", "--example", "yamabe", "--n", "4"]);
    assert_eq!(code, 0);
    println!("yamabe, n = 4: scalar coefficient {}", json["scalar_coefficient"]);

    let (code, _) = run(&["coeffs", "--n", "2", "--lambda", "1/4", "--mu", "5/4"]);
    println!("inadmissible resonant pair: exit {code}");
    assert_eq!(code, 3);

    let (code, json) = run(&["resonances", "--n", "3"]);
    println!("resonances for n = 3: {} (exit {code})", json["resonant_deltas"]);
    Ok(())
}

#[allow(dead_code)]
fn main() -> confquant::Result<()> {
    run_example()
}
