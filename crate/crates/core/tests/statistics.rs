use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::Rng;
use sbm_change::rng;
use sbm_change::{cut_counts, sample_sbm, t_statistic, Graph, Partition, SbmParams};

/// `(1/4) x^T (D - A) x` and `(1/4) x^T (D + A) x` from dense matrices.
fn quadratic_forms(g: &Graph, x: &Partition) -> (f64, f64) {
    let n = g.n();
    let a = DMatrix::from_fn(n, n, |i, j| f64::from(u8::from(g.has_edge(i, j))));
    let d = DMatrix::from_diagonal(&DVector::from_fn(n, |i, _| g.degree(i) as f64));
    let xv = DVector::from_fn(n, |i, _| f64::from(x.label(i)));
    let across = (xv.transpose() * (&d - &a) * &xv)[(0, 0)] / 4.0;
    let within = (xv.transpose() * (&d + &a) * &xv)[(0, 0)] / 4.0;
    (across, within)
}

fn random_instance(seed: u64) -> (Graph, Partition) {
    let mut r = rng::stream(seed);
    let n = r.random_range(2..=60);
    let p: f64 = r.random_range(0.0..0.5);
    let edges: Vec<(usize, usize)> =
        (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).filter(|_| r.random_bool(p)).collect();
    let x = Partition::from_signs((0..n).map(|_| r.random_bool(0.5)));
    (Graph::from_edges(n, edges).unwrap(), x)
}

#[test]
fn counts_equal_quadratic_forms() {
    for seed in 0..200 {
        let (g, x) = random_instance(seed);
        let c = cut_counts(&g, &x).unwrap();
        let (across, within) = quadratic_forms(&g, &x);
        assert_eq!(c.across as f64, across);
        assert_eq!(c.within as f64, within);
        assert_eq!(c.total(), g.edge_count() as u64);
        assert_eq!(t_statistic(&g, &x).unwrap(), c.within as i64 - c.across as i64);
    }
}

#[test]
fn statistic_is_signed_edge_sum() {
    let (g, x) = random_instance(999);
    let direct: i64 = g.edge_iter().map(|(u, v)| i64::from(x.label(u) * x.label(v))).sum();
    assert_eq!(t_statistic(&g, &x).unwrap(), direct);
}

#[test]
fn null_across_mean_is_bn_over_4() {
    let params = SbmParams::new(400, 12.0, 4.0).unwrap();
    let x = Partition::halves(400);
    let trials = 600;
    let samples: Vec<f64> = (0..trials)
        .map(|t| cut_counts(&sample_sbm(&params, &x, rng::derive(5, "null", t)).unwrap(), &x).unwrap().across as f64)
        .collect();
    let mean = samples.iter().sum::<f64>() / trials as f64;
    let var = samples.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (trials - 1) as f64;
    let se = (var / trials as f64).sqrt();
    assert!((mean - 400.0).abs() < 4.0 * se, "mean {mean} se {se}");
}

proptest! {
    #[test]
    fn quadratic_identity_holds(seed in any::<u64>()) {
        let (g, x) = random_instance(seed);
        let c = cut_counts(&g, &x).unwrap();
        let (across, within) = quadratic_forms(&g, &x);
        prop_assert_eq!(c.across as f64, across);
        prop_assert_eq!(c.within as f64, within);
    }
}
