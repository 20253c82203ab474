//! Runs every example's `run_example`.

mod coefficients {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/coefficients.rs"));
}

#[test]
fn coefficients_runs() {
    coefficients::run_example().expect("coefficients example should run");
}

mod command_line {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/command_line.rs"));
}

#[test]
fn command_line_runs() {
    command_line::run_example().expect("command_line example should run");
}

mod conformal_invariance {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/conformal_invariance.rs"));
}

#[test]
fn conformal_invariance_runs() {
    conformal_invariance::run_example().expect("conformal_invariance example should run");
}

mod curvature {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/curvature.rs"));
}

#[test]
fn curvature_runs() {
    curvature::run_example().expect("curvature example should run");
}

mod curved_quantization {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/curved_quantization.rs"));
}

#[test]
fn curved_quantization_runs() {
    curved_quantization::run_example().expect("curved_quantization example should run");
}

mod equivariance {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/equivariance.rs"));
}

#[test]
fn equivariance_runs() {
    equivariance::run_example().expect("equivariance example should run");
}

mod flat_quantization {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/flat_quantization.rs"));
}

#[test]
fn flat_quantization_runs() {
    flat_quantization::run_example().expect("flat_quantization example should run");
}

mod geodesic_and_coupling {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/geodesic_and_coupling.rs"));
}

#[test]
fn geodesic_and_coupling_runs() {
    geodesic_and_coupling::run_example().expect("geodesic_and_coupling example should run");
}

mod invariant_operators {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/invariant_operators.rs"));
}

#[test]
fn invariant_operators_runs() {
    invariant_operators::run_example().expect("invariant_operators example should run");
}

mod resonances {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/resonances.rs"));
}

#[test]
fn resonances_runs() {
    resonances::run_example().expect("resonances example should run");
}

mod resonant_laplacians {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/resonant_laplacians.rs"));
}

#[test]
fn resonant_laplacians_runs() {
    resonant_laplacians::run_example().expect("resonant_laplacians example should run");
}

mod self_adjoint {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/self_adjoint.rs"));
}

#[test]
fn self_adjoint_runs() {
    self_adjoint::run_example().expect("self_adjoint example should run");
}

mod verification {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/verification.rs"));
}

#[test]
fn verification_runs() {
    verification::run_example().expect("verification example should run");
}
