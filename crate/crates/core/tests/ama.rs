use adaprox::ama::{run_adaama, AmaProblem, QuadraticPsi};
use adaprox::prox::{BoxIndicator, L1Norm};
use adaprox::smooth::Quadratic;
use adaprox::solvers::{run_adapg, StoppingRule};
use adaprox::stepsize::FixedParams;
use adaprox::{linalg, CompositeProblem, SparseMatrix};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Instance {
    ama: AmaProblem,
    dual: CompositeProblem,
    m: usize,
}

fn instance(n: usize, m: usize, lambda: f64, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    let q = &b * b.transpose() + DMatrix::identity(n, n) * 0.5;
    let lin: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
    let a_dense: Vec<f64> = (0..m * n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let a = SparseMatrix::from_dense(m, n, &a_dense).unwrap();
    let ama = AmaProblem::new(QuadraticPsi::new(q.clone(), lin.clone()).unwrap(), L1Norm::new(lambda), a).unwrap();

    let a_mat = DMatrix::from_row_slice(m, n, &a_dense);
    let q_inv = q.cholesky().unwrap().inverse();
    let h = &a_mat * &q_inv * a_mat.transpose();
    let h = (&h + h.transpose()) * 0.5;
    let c = -(&a_mat * &q_inv * DVector::from_vec(lin));
    let dual = CompositeProblem::new(
        Quadratic::new(h, c.iter().copied().collect(), 0.0).unwrap(),
        BoxIndicator::symmetric(lambda),
    );
    Instance { ama, dual, m }
}

#[test]
fn converges_to_the_dense_dual_solution() {
    let inst = instance(12, 8, 0.3, 5);
    let y0 = vec![0.0; inst.m];
    let sol = run_adaama(&inst.ama, &y0, 1.0, FixedParams::default(), StoppingRule::new(20_000, 1e-11)).unwrap();
    let reference = run_adapg(&inst.dual, &y0, 1.0, FixedParams::default(), StoppingRule::new(20_000, 1e-12)).unwrap();
    assert!(linalg::dist(&sol.y, &reference.x) <= 1e-8 * (1.0 + linalg::norm(&reference.x)));
    // some multipliers sit on the box boundary, so the l1 term is active
    assert!(reference.x.iter().any(|v| (v.abs() - 0.3).abs() < 1e-12));
    let last = sol.trace.records.last().unwrap();
    assert!(last.duality_gap.unwrap().to_f64().abs() < 1e-7);
}

#[test]
fn primal_residual_trends_to_zero() {
    let inst = instance(10, 6, 0.5, 8);
    let sol = run_adaama(&inst.ama, &vec![0.1; inst.m], 1.0, FixedParams::default(), StoppingRule::iterations(400))
        .unwrap();
    let res: Vec<f64> = sol.trace.records.iter().map(|r| r.primal_residual).collect();
    let window = 50;
    let early: f64 = res[..window].iter().sum::<f64>() / window as f64;
    let late: f64 = res[res.len() - window..].iter().sum::<f64>() / window as f64;
    assert!(late < 1e-6 * early.max(1.0), "{early:e} -> {late:e}");
}

#[test]
fn every_preset_solves_the_dual() {
    let inst = instance(10, 10, 0.2, 13);
    let y0 = vec![0.0; inst.m];
    for preset in adaprox::stepsize::preset_table1() {
        let sol = run_adaama(&inst.ama, &y0, 0.01, preset.params(), StoppingRule::new(50_000, 1e-9)).unwrap();
        assert_eq!(sol.trace.stop_reason, adaprox::StopReason::Tolerance, "{}", preset.name);
        let y = &sol.y;
        assert!(y.iter().all(|v| v.abs() <= 0.2 * (1.0 + 1e-9)));
    }
}
