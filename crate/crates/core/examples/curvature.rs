// Curvature from metric 2-jets, conformal rescaling by two routes and the
// Schwarzian derivative.

use confquant::geometry::examples::{hyperbolic, sphere};
use confquant::geometry::{
    conformal_rescale, curvature_from_jets, rescaled_curvature_closed_form, schwarzian_1d,
    schwarzian_nd, ConformalFactorJet, DiffeoJet1D, MetricJet2,
};
use confquant::linalg;
use confquant::scalar::{int, rat};

pub fn run_example() -> confquant::Result<()> {
    let s3 = sphere(&int(2), &[rat(1, 2), int(0), rat(-1, 3)]);
    let r = curvature_from_jets(&s3)?.scalar;
    println!("sphere of radius 2 in dimension 3: R = {r}");
    assert_eq!(r, rat(3, 2));
    let h = curvature_from_jets(&hyperbolic(&[int(1), rat(1, 2)]))?.scalar;
    println!("hyperbolic plane: R = {h}");

    let f = ConformalFactorJet::new(rat(3, 2), vec![int(1), rat(-1, 2), int(0)], vec![
        vec![int(1), int(0), rat(1, 2)],
        vec![int(0), int(-1), int(0)],
        vec![rat(1, 2), int(0), int(2)],
    ])?;
    let direct = curvature_from_jets(&conformal_rescale(&s3, &f))?;
    let closed = rescaled_curvature_closed_form(&s3, &f)?;
    assert_eq!(direct.ricci, closed.ricci);
    println!("R of F g: {} (direct) = {} (closed form)", direct.scalar, closed.scalar);

    let phi = DiffeoJet1D::exponential(rat(5, 2))?;
    println!("Schwarzian of exp: {}", schwarzian_1d(&phi)?);
    let fp = phi.presentation();
    let line = MetricJet2::presentation(&fp, &linalg::identity(1))?;
    assert_eq!(schwarzian_nd(&fp, &line)?.scalar(), Some(&rat(-1, 2)));
    Ok(())
}

#[allow(dead_code)]
fn main() -> confquant::Result<()> {
    run_example()
}
