//! Acceptance criteria, one line per criterion. Runs without the libtest
//! harness so every line is printed.

use std::time::Instant;

use confquant::coefficients::{c_coefficient, default_coefficients, Weights};
use confquant::curved::random::connection_jet;
use confquant::curved::{
    quantize_curved_with, quantize_geodesic, quantize_minimal_coupling,
    ConnectionJet, LaplacianCase, SymbolJet2,
};
use confquant::geometry::examples::sphere;
use confquant::geometry::random::metric_jet;
use confquant::metric::FlatMetric;
use confquant::random::{PolyGen, DEFAULT_SEED};
use confquant::scalar::{int, rat, ExactScalar, Rational};
use confquant::verify::{
    inversion_matches_definition, random_generic_weights, resonance_table_matches, run_suite,
    signatures, system_matches_closed_form, Suite, VerifyOptions,
};
use confquant::Result;

type Outcome = Result<std::result::Result<String, String>>;

fn suite(s: Suite, opts: VerifyOptions) -> Outcome {
    let r = run_suite(s, &opts)?;
    Ok(if r.passed() {
        Ok(format!("{} cases", r.cases_run))
    } else {
        let first = &r.failures[0];
        Err(format!(
            "{} of {} cases failed; first: {}: {}",
            r.failures.len(),
            r.cases_run,
            first.case_id,
            first.residual
        ))
    })
}

fn opts() -> VerifyOptions {
    VerifyOptions::default()
}

fn criterion_2() -> Outcome {
    let mut count = 0;
    for n in 1..=4usize {
        let mut g = PolyGen::new(DEFAULT_SEED + n as u64, n);
        for _ in 0..50 {
            let w = random_generic_weights(&mut g, n);
            if !system_matches_closed_form(&w)? {
                return Ok(Err(format!("system solution differs from closed form at {w}")));
            }
            count += 1;
        }
    }
    let half = run_suite(Suite::System, &opts())?;
    if !half.passed() {
        return Ok(Err(format!("{:?}", half.failures)));
    }
    Ok(Ok(format!("{count} random weights, half-density n = 1..6")))
}

fn criterion_3() -> Outcome {
    for n in 1..=6 {
        if !resonance_table_matches(n)? {
            return Ok(Err(format!("resonance data differs at n = {n}")));
        }
    }
    Ok(Ok("n = 1..6".into()))
}

fn criterion_7() -> Outcome {
    let mut count = 0;
    for n in 1..=3usize {
        let mut g = PolyGen::new(DEFAULT_SEED ^ 0x77, n);
        let sigs = signatures(n);
        for k in 0..100 {
            let (p, q) = sigs[k % sigs.len()];
            let m = FlatMetric::new(p, q)?;
            let (l, mu) = (g.rational(), g.rational());
            let a = g.operator(3, 6);
            if !inversion_matches_definition(&m, &l, &mu, &a)? {
                return Ok(Err(format!("n = {n} operator #{k} disagrees")));
            }
            count += 1;
        }
    }
    Ok(Ok(format!("{count} random operators")))
}

fn criterion_10() -> Outcome {
    for n in 2..=6usize {
        let nr = int(n as i64);
        let expected = [
            (LaplacianCase::Yamabe, -(&nr - int(2)) / (int(4) * (&nr - int(1)))),
            (LaplacianCase::Laplace, int(0)),
            (LaplacianCase::New, int(1) / ((&nr - int(1)) * (&nr + int(2)))),
        ];
        for (case, c) in expected {
            let (l, mu) = case.weights(n)?;
            let w = Weights::euclidean(n, l, mu);
            let from_set = default_coefficients(&w)?.c;
            if case.scalar_coefficient(n)? != c || c_coefficient(&w) != Some(c.clone()) || from_set != Some(c) {
                return Ok(Err(format!("{} at n = {n}", case.name())));
            }
        }
        let half = Weights::euclidean(n, rat(1, 2), rat(1, 2));
        let c = -(&nr * &nr) / (int(4) * (&nr - int(1)) * (&nr + int(2)));
        if c_coefficient(&half) != Some(c) {
            return Ok(Err(format!("half-density coefficient at n = {n}")));
        }
    }
    let hbar = rat(2, 3);
    let m3 = sphere(&int(1), &[rat(1, 2), rat(1, 3), rat(1, 4)]);
    let half = Weights::euclidean(3, rat(1, 2), rat(1, 2));
    let geo = quantize_geodesic(&half, &m3, &hbar)?;
    let general = quantize_curved_with(
        &default_coefficients(&half)?,
        &m3,
        &SymbolJet2::geodesic(half.clone(), &m3)?,
        None,
        Some(&hbar),
    )?;
    if geo != general {
        return Ok(Err("geodesic operator differs from the general formula".into()));
    }
    let mut g = PolyGen::new(DEFAULT_SEED ^ 0x10, 3);
    for n in 2..=3usize {
        for (l, mu) in [
            (rat(1, 2), rat(1, 2)),
            (rat(1, 3), rat(3, 4)),
            (int(0), int(0)),
            (rat(1, 5), rat(4, 5)),
            (rat(1, 4), rat(1, 4)),
        ] {
            let w = Weights::euclidean(n, l.clone(), mu.clone());
            let m = metric_jet(&mut g, &vec![1; n]);
            let a = connection_jet(&mut g, n);
            let mut e = vec![vec![int(0); n]; n];
            e[0][n - 1] = rat(3, 2);
            e[n - 1][0] = rat(-1, 3);
            e[n - 1][n - 1] = int(2);
            let shifted = ConnectionJet::new(
                a.a.clone(),
                a.da.iter().zip(&e).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect()).collect(),
            )?;
            let q0 = quantize_minimal_coupling(&w, &m, &a, &hbar)?;
            let q1 = quantize_minimal_coupling(&w, &m, &shifted, &hbar)?;
            let gi = m.inverse();
            let tr: Rational = (0..n).flat_map(|j| (0..n).map(move |k| (j, k))).map(|(j, k)| &gi[j][k] * &e[j][k]).sum();
            let anomaly = (int(1) - &l - &mu) / (int(1) - w.delta());
            let change = &q1.a0 - &q0.a0;
            let ih = ExactScalar::imag(hbar.clone());
            if change != &ih * &ExactScalar::real((&anomaly - int(1)) * &tr) {
                return Ok(Err(format!("coupling response differs at {w}")));
            }
            let anomaly_free = change == &ih * &ExactScalar::real(-tr.clone());
            if anomaly_free != (&l + &mu == int(1)) {
                return Ok(Err(format!("anomaly vanishing does not track lambda + mu = 1 at {w}")));
            }
            if q1.a1 != q0.a1 || q1.a2 != q0.a2 {
                return Ok(Err(format!("derivative of A leaked into higher orders at {w}")));
            }
        }
    }
    Ok(Ok("n = 2..6; coupling anomaly iff lambda + mu != 1".into()))
}

fn main() {
    let total = Instant::now();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        ("1 equivariance", Box::new(|| suite(Suite::Equivariance, opts()))),
        ("2 coefficient closed forms", Box::new(criterion_2)),
        ("3 resonance table", Box::new(criterion_3)),
        ("4 commutant and commutators", Box::new(|| suite(Suite::Commutators, opts()))),
        ("5 ideal", Box::new(|| suite(Suite::Ideal, opts()))),
        ("6 dual construction agreement", Box::new(|| suite(Suite::Agreement, opts()))),
        ("7 inversion-action lemma", Box::new(criterion_7)),
        ("8 conformal invariance", Box::new(|| suite(Suite::ConformalInvariance, opts()))),
        ("9 curvature transforms", Box::new(|| suite(Suite::CurvatureTransforms, opts()))),
        ("10 applications", Box::new(criterion_10)),
        ("11 self-adjointness", Box::new(|| suite(Suite::Adjoint, opts()))),
    ];
    let mut failed = 0;
    for (name, f) in &criteria {
        let start = Instant::now();
        let outcome = match f() {
            Ok(o) => o,
            Err(e) => Err(format!("error: {e}")),
        };
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {name}: PASS ({detail}; {secs:.1}s)"),
            Err(detail) => {
                failed += 1;
                println!("criterion {name}: FAIL ({detail}; {secs:.1}s)");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed, {:.1}s",
        criteria.len() - failed,
        total.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
