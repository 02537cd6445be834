//! Analytic gradients against central finite differences.

use coolplan::nn::{lstm_loss_grad, mlp_loss_grad, LstmModel, MlpModel};
use coolplan::rng::rng_for;
use rand::Rng;

const EPS: f64 = 1e-5;
const REL_TOL: f64 = 1e-4;
/// Components smaller than this are compared absolutely.
const FLOOR: f64 = 1e-6;

fn rel_err(a: f64, n: f64) -> f64 {
    (a - n).abs() / a.abs().max(n.abs()).max(FLOOR)
}

fn check<F: Fn(&[f64]) -> f64>(params: &[f64], analytic: &[f64], loss: F) -> f64 {
    let mut p = params.to_vec();
    let mut worst: f64 = 0.0;
    for k in 0..p.len() {
        let orig = p[k];
        p[k] = orig + EPS;
        let up = loss(&p);
        p[k] = orig - EPS;
        let down = loss(&p);
        p[k] = orig;
        let numeric = (up - down) / (2.0 * EPS);
        worst = worst.max(rel_err(analytic[k], numeric));
    }
    worst
}

pub fn mlp_worst_error(config: u64) -> f64 {
    let mut rng = rng_for(config, 1);
    let input = rng.random_range(1..6);
    let hidden = rng.random_range(1..7);
    let m = rng.random_range(1..6);
    let model = MlpModel::init(input, hidden, &mut rng);
    let mut model = model;
    model.b1.iter_mut().for_each(|b| *b = rng.random_range(-0.5..0.5));
    model.b2 = rng.random_range(-0.5..0.5);
    let xs: Vec<Vec<f64>> = (0..m).map(|_| (0..input).map(|_| rng.random_range(-2.0..2.0)).collect()).collect();
    let ys: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
    let refs: Vec<&[f64]> = xs.iter().map(|x| x.as_slice()).collect();
    let (_, g) = mlp_loss_grad(&model, &refs, &ys).unwrap();
    let params = model.params();
    check(&params, &g, |p| {
        let mut mm = model.clone();
        mm.set_params(p);
        mlp_loss_grad(&mm, &refs, &ys).unwrap().0
    })
}

pub fn lstm_worst_error(config: u64) -> f64 {
    let mut rng = rng_for(config, 2);
    let input = rng.random_range(1..4);
    let hidden = rng.random_range(1..5);
    let len = rng.random_range(1..6);
    let m = rng.random_range(1..4);
    let mut model = LstmModel::init(input, hidden, &mut rng);
    model.b.iter_mut().for_each(|b| *b = rng.random_range(-0.5..0.5));
    model.bd = rng.random_range(-0.5..0.5);
    let seqs: Vec<Vec<Vec<f64>>> = (0..m)
        .map(|_| (0..len).map(|_| (0..input).map(|_| rng.random_range(-2.0..2.0)).collect()).collect())
        .collect();
    let ys: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
    let refs: Vec<&[Vec<f64>]> = seqs.iter().map(|s| s.as_slice()).collect();
    let (_, g) = lstm_loss_grad(&model, &refs, &ys).unwrap();
    let params = model.params();
    check(&params, &g, |p| {
        let mut mm = model.clone();
        mm.set_params(p);
        lstm_loss_grad(&mm, &refs, &ys).unwrap().0
    })
}

#[test]
fn mlp_gradient_matches_finite_differences() {
    for c in 0..25 {
        let e = mlp_worst_error(c);
        assert!(e < REL_TOL, "config {c}: {e:e}");
    }
}

#[test]
fn lstm_gradient_matches_finite_differences() {
    for c in 0..25 {
        let e = lstm_worst_error(c);
        assert!(e < REL_TOL, "config {c}: {e:e}");
    }
}

#[test]
fn lstm_reference_shape_input2_hidden3_seq4() {
    let mut rng = rng_for(77, 0);
    let model = LstmModel::init(2, 3, &mut rng);
    let seqs: Vec<Vec<Vec<f64>>> = (0..3)
        .map(|_| (0..4).map(|_| vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]).collect())
        .collect();
    let refs: Vec<&[Vec<f64>]> = seqs.iter().map(|s| s.as_slice()).collect();
    let ys = [0.3, -0.2, 0.9];
    let (_, g) = lstm_loss_grad(&model, &refs, &ys).unwrap();
    let e = check(&model.params(), &g, |p| {
        let mut mm = model.clone();
        mm.set_params(p);
        lstm_loss_grad(&mm, &refs, &ys).unwrap().0
    });
    assert!(e < REL_TOL, "{e:e}");
}
