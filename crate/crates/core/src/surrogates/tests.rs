use super::*;
use crate::sampling::build_nested_design;
use crate::testbed::{find_pair, Hypercube};

fn unit1() -> Hypercube {
    Hypercube::unit(1)
}

fn grid1(n: usize) -> Vec<Vec<f64>> {
    (0..n).map(|i| vec![(i as f64 + 0.5) / n as f64]).collect()
}

#[test]
fn constant_data_gives_constant_predictor() {
    let x = grid1(5);
    let y = vec![3.25; 5];
    let m = train_kriging(&unit1(), &x, &y, &TrainerConfig::default(), 1).unwrap();
    assert!(m.is_constant());
    assert_eq!(m.trend_mean(), 3.25);
    for q in [0.0, 0.33, 1.0] {
        let p = m.predict(&[q]).unwrap();
        assert_eq!(p.mean, 3.25);
        assert_eq!(p.variance, 0.0);
    }
}

#[test]
fn linear_function_is_recovered_between_samples() {
    let x = grid1(10);
    let f = |v: f64| 2.0 * v + 1.0;
    let y: Vec<f64> = x.iter().map(|p| f(p[0])).collect();
    let m = train_kriging(&unit1(), &x, &y, &TrainerConfig::default(), 3).unwrap();
    for i in 0..9 {
        let q = (i as f64 + 1.0) / 10.0;
        let pred = m.predict_mean(&[q]).unwrap();
        assert!((pred - f(q)).abs() <= 1e-3 * f(q).abs(), "x={q} pred={pred}");
    }
}

#[test]
fn training_is_deterministic() {
    let pair = find_pair("currin").unwrap();
    let design = build_nested_design(8, 16, 2, 4).unwrap();
    let x: Vec<Vec<f64>> = design.high_points().iter().map(|u| pair.domain().from_unit(u)).collect();
    let y: Vec<f64> = x.iter().map(|p| pair.evaluate(crate::testbed::Fidelity::High, p).unwrap()).collect();
    let a = train_kriging(pair.domain(), &x, &y, &TrainerConfig::default(), 9).unwrap();
    let b = train_kriging(pair.domain(), &x, &y, &TrainerConfig::default(), 9).unwrap();
    assert_eq!(a.length_scales(), b.length_scales());
    assert_eq!(a.trend_mean().to_bits(), b.trend_mean().to_bits());
}

#[test]
fn duplicate_and_bad_inputs() {
    let cfg = TrainerConfig::default();
    let x = vec![vec![0.2], vec![0.2], vec![0.5]];
    assert!(matches!(train_kriging(&unit1(), &x, &[1.0, 2.0, 3.0], &cfg, 0), Err(Error::Degenerate(_))));
    let x = grid1(3);
    assert!(matches!(train_kriging(&unit1(), &x, &[1.0, f64::NAN, 3.0], &cfg, 0), Err(Error::Data(_))));
    assert!(matches!(train_kriging(&unit1(), &x, &[1.0, 2.0], &cfg, 0), Err(Error::Size(_))));
    assert!(matches!(train_kriging(&unit1(), &x[..1], &[1.0], &cfg, 0), Err(Error::Size(_))));
    let outside = vec![vec![0.1], vec![1.5]];
    assert!(matches!(train_kriging(&unit1(), &outside, &[1.0, 2.0], &cfg, 0), Err(Error::Domain { .. })));
}

#[test]
fn interpolates_and_has_zero_variance_at_training_points() {
    let pair = find_pair("forrester").unwrap();
    let x = grid1(7);
    let y: Vec<f64> = x.iter().map(|p| pair.evaluate(crate::testbed::Fidelity::High, p).unwrap()).collect();
    let m = train_kriging(pair.domain(), &x, &y, &TrainerConfig::default(), 5).unwrap();
    let range = y.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - y.iter().cloned().fold(f64::INFINITY, f64::min);
    for (p, v) in x.iter().zip(&y) {
        let pr = m.predict(p).unwrap();
        assert!((pr.mean - v).abs() <= 1e-6 * range);
        assert!(pr.variance <= 1e-8 * m.process_variance().max(1.0));
    }
    assert!(m.predict(&[1.2]).is_err());
}

#[test]
fn far_variance_tends_to_process_variance() {
    // Short length scales are forced by a narrow search box, so a query far
    // from the data has negligible correlation with it and the variance is
    // sigma^2 * (1 - r' R^-1 r) -> sigma^2.
    let cfg = TrainerConfig { length_scale_bounds: (1e-2, 2e-2), ..Default::default() };
    let dom = Hypercube::new(vec![0.0], vec![10.0]).unwrap();
    let x = vec![vec![0.0], vec![0.1], vec![0.2], vec![0.3]];
    let y = vec![0.0, 1.0, -1.0, 0.5];
    let m = train_kriging(&dom, &x, &y, &cfg, 2).unwrap();
    let p = m.predict(&[9.0]).unwrap();
    assert!((p.variance - m.process_variance()).abs() <= 1e-12 * m.process_variance());
    assert!((p.mean - m.trend_mean()).abs() < 1e-12);
}

#[test]
fn symmetric_data_gives_symmetric_predictions() {
    let x = grid1(6);
    let y: Vec<f64> = x.iter().map(|p| (p[0] - 0.5).powi(2)).collect();
    let m = train_kriging(&unit1(), &x, &y, &TrainerConfig::default(), 8).unwrap();
    for q in [0.05, 0.2, 0.37] {
        let a = m.predict(&[q]).unwrap();
        let b = m.predict(&[1.0 - q]).unwrap();
        assert!((a.mean - b.mean).abs() < 1e-8, "{} vs {}", a.mean, b.mean);
        assert!((a.variance - b.variance).abs() < 1e-8);
    }
}

#[test]
fn affine_output_rescaling_commutes() {
    let pair = find_pair("forrester").unwrap();
    let x = grid1(6);
    let y: Vec<f64> = x.iter().map(|p| pair.evaluate(crate::testbed::Fidelity::High, p).unwrap()).collect();
    let (a, b) = (3.5, -20.0);
    let y2: Vec<f64> = y.iter().map(|v| a * v + b).collect();
    let cfg = TrainerConfig::default();
    let m1 = train_kriging(pair.domain(), &x, &y, &cfg, 4).unwrap();
    let m2 = train_kriging(pair.domain(), &x, &y2, &cfg, 4).unwrap();
    for q in [0.03, 0.31, 0.64, 0.97] {
        let p1 = a * m1.predict_mean(&[q]).unwrap() + b;
        let p2 = m2.predict_mean(&[q]).unwrap();
        assert!((p1 - p2).abs() <= 1e-8 * p2.abs().max(1.0), "{p1} vs {p2}");
    }
}

#[test]
fn optimizer_beats_every_start_point() {
    let pair = find_pair("currin").unwrap();
    let design = build_nested_design(10, 10, 2, 6).unwrap();
    let x: Vec<Vec<f64>> = design.high_points().iter().map(|u| pair.domain().from_unit(u)).collect();
    let y: Vec<f64> = x.iter().map(|p| pair.evaluate(crate::testbed::Fidelity::High, p).unwrap()).collect();
    let cfg = TrainerConfig::default();
    let m = train_kriging(pair.domain(), &x, &y, &cfg, 12).unwrap();
    for start in multistart_points(2, &cfg, 12) {
        let ls: Vec<f64> = start.iter().map(|t| t.exp()).collect();
        if let Some(ll) = concentrated_log_likelihood(pair.domain(), &x, &y, &ls, &cfg) {
            assert!(m.log_likelihood() >= ll - 1e-9, "{} < {}", m.log_likelihood(), ll);
        }
    }
}

fn nested_data(
    pair_id: &str,
    n_h: usize,
    n_l: usize,
    seed: u64,
) -> (crate::testbed::FunctionPair, Vec<Vec<f64>>, Vec<f64>, Vec<Vec<f64>>, Vec<f64>) {
    use crate::testbed::Fidelity;
    let pair = find_pair(pair_id).unwrap();
    let design = build_nested_design(n_h, n_l, pair.dim(), seed).unwrap();
    let xh: Vec<Vec<f64>> = design.high_points().iter().map(|u| pair.domain().from_unit(u)).collect();
    let xl: Vec<Vec<f64>> = design.low_points().iter().map(|u| pair.domain().from_unit(u)).collect();
    let yh = xh.iter().map(|p| pair.evaluate(Fidelity::High, p).unwrap()).collect();
    let yl = xl.iter().map(|p| pair.evaluate(Fidelity::Low, p).unwrap()).collect();
    (pair, xh, yh, xl, yl)
}

#[test]
fn identical_sources_give_unit_rho() {
    use crate::testbed::Fidelity;
    let (pair, xh, yh, xl, _) = nested_data("forrester", 5, 12, 3);
    let yl: Vec<f64> = xl.iter().map(|p| pair.evaluate(Fidelity::High, p).unwrap()).collect();
    let m = train_cokriging(pair.domain(), &xh, &yh, &xl, &yl, &TrainerConfig::default(), 1).unwrap();
    assert!((m.scale_rho() - 1.0).abs() < 0.05, "rho = {}", m.scale_rho());
    let scale = yh.iter().map(|v| v * v).sum::<f64>() / yh.len() as f64;
    assert!(m.diff_model().process_variance() <= 1e-8 * scale);
}

#[test]
fn zero_low_fidelity_reduces_to_kriging() {
    let (pair, xh, yh, xl, _) = nested_data("forrester", 5, 10, 7);
    let yl = vec![0.0; xl.len()];
    let cfg = TrainerConfig::default();
    let ck = train_cokriging(pair.domain(), &xh, &yh, &xl, &yl, &cfg, 21).unwrap();
    let k = train_kriging(pair.domain(), &xh, &yh, &cfg, 21).unwrap();
    for i in 0..=20 {
        let q = [i as f64 / 20.0];
        assert!((ck.predict_mean(&q).unwrap() - k.predict_mean(&q).unwrap()).abs() < 1e-8);
    }
}

#[test]
fn cokriging_interpolates_high_fidelity_data() {
    let (pair, xh, yh, xl, yl) = nested_data("currin", 6, 18, 11);
    let m = train_cokriging(pair.domain(), &xh, &yh, &xl, &yl, &TrainerConfig::default(), 2).unwrap();
    for (p, v) in xh.iter().zip(&yh) {
        let pred = m.predict_mean(p).unwrap();
        assert!((pred - v).abs() <= 1e-6 * v.abs().max(1.0), "{pred} vs {v}");
    }
    let expected = m.scale_rho() * m.low_model().predict_mean(&[0.3, 0.6]).unwrap()
        + m.diff_model().predict_mean(&[0.3, 0.6]).unwrap();
    assert_eq!(m.predict_mean(&[0.3, 0.6]).unwrap(), expected);
}

#[test]
fn non_nested_design_is_rejected() {
    let x_low = grid1(6);
    let x_high = vec![vec![0.123], vec![0.5]];
    let r = train_cokriging(&unit1(), &x_high, &[1.0, 2.0], &x_low, &[0.0, 1.0, 2.0, 3.0, 4.0, 5.0], &TrainerConfig::default(), 0);
    assert!(matches!(r, Err(Error::Design(_))));
}

#[test]
fn accuracy_of_perfect_and_flipped_models() {
    struct Exact(crate::testbed::FunctionPair, f64);
    impl Surrogate for Exact {
        fn predict(&self, x: &[f64]) -> Result<Prediction> {
            let v = self.0.evaluate(crate::testbed::Fidelity::High, x)?;
            Ok(Prediction { mean: self.1 * v, variance: 0.0 })
        }
    }
    let pair = find_pair("forrester").unwrap();
    let pts = grid1(50);
    let r = accuracy(&Exact(pair.clone(), 1.0), &pair, &pts).unwrap();
    assert!((r.p_corr - 1.0).abs() < 1e-12);
    assert_eq!(r.n_test, 50);
    let r = accuracy(&Exact(pair.clone(), -1.0), &pair, &pts).unwrap();
    assert!((r.p_corr + 1.0).abs() < 1e-12);
    assert!(accuracy(&Exact(pair.clone(), 0.0), &pair, &pts).is_err());
    assert!(accuracy(&Exact(pair.clone(), 1.0), &pair, &pts[..2]).is_err());
}

#[test]
fn accuracy_is_invariant_to_positive_affine_means() {
    struct Scaled(KrigingModel, f64, f64);
    impl Surrogate for Scaled {
        fn predict(&self, x: &[f64]) -> Result<Prediction> {
            let p = self.0.predict(x)?;
            Ok(Prediction { mean: self.1 * p.mean + self.2, variance: p.variance })
        }
    }
    let (pair, xh, yh, _, _) = nested_data("forrester", 4, 8, 5);
    let m = train_kriging(pair.domain(), &xh, &yh, &TrainerConfig::default(), 0).unwrap();
    let pts = grid1(100);
    let base = accuracy(&m, &pair, &pts).unwrap().p_corr;
    let moved = accuracy(&Scaled(m, 4.0, 17.0), &pair, &pts).unwrap().p_corr;
    assert!((base - moved).abs() < 1e-12);
}

#[test]
fn model_json_round_trip() {
    let (pair, xh, yh, xl, yl) = nested_data("forrester", 4, 9, 2);
    let cfg = TrainerConfig::default();
    let models = [
        SurrogateModel::Kriging(train_kriging(pair.domain(), &xh, &yh, &cfg, 1).unwrap()),
        SurrogateModel::CoKriging(train_cokriging(pair.domain(), &xh, &yh, &xl, &yl, &cfg, 1).unwrap()),
    ];
    for m in models {
        let text = model_to_json(&m);
        let back = model_from_json(&text).unwrap();
        assert_eq!(back.kind(), m.kind());
        for q in [0.1, 0.45, 0.8] {
            let a = m.predict_mean(&[q]).unwrap();
            let b = back.predict_mean(&[q]).unwrap();
            assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
        }
    }
    assert!(model_from_json(r#"{"format":"bifid-model","version":9,"model":{}}"#).is_err());
}

#[test]
fn config_validation() {
    assert!(TrainerConfig::default().validate().is_ok());
    assert!(TrainerConfig { length_scale_bounds: (0.0, 1.0), ..Default::default() }.validate().is_err());
    assert!(TrainerConfig { nugget: 1.0, ..Default::default() }.validate().is_err());
    assert!(TrainerConfig { rho_bounds: (1.0, -1.0), ..Default::default() }.validate().is_err());
    assert!(TrainerConfig { n_starts: 0, ..Default::default() }.validate().is_err());
    assert_eq!("co-kriging".parse::<ModelKind>().unwrap(), ModelKind::CoKriging);
}
