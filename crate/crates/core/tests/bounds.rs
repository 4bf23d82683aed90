use sbm_change::{gof_bc_bound, perturb_partition, tst_converse, Partition, PerturbMode};

/// Product of per-pair Bhattacharyya coefficients between the two laws.
fn brute_force_bc(n: usize, s: usize, a: f64, b: f64) -> f64 {
    let x = Partition::halves(n);
    let y = perturb_partition(&x, s, PerturbMode::RandomRelabel, 1).unwrap();
    let nf = n as f64;
    let prob = |same: bool| if same { a / nf } else { b / nf };
    let mut product = 1.0;
    for u in 0..n {
        for v in u + 1..n {
            let p = prob(x.label(u) == x.label(v));
            let q = prob(y.label(u) == y.label(v));
            product *= (p * q).sqrt() + ((1.0 - p) * (1.0 - q)).sqrt();
        }
    }
    product
}

#[test]
fn bc_matches_pairwise_product() {
    for n in 2..=12usize {
        for s in 0..=n / 2 {
            for a in 0..=n {
                for b in 0..=n {
                    let (a, b) = (a as f64, b as f64);
                    let closed = gof_bc_bound(n, s, a, b).unwrap();
                    let brute = brute_force_bc(n, s, a, b);
                    assert!((closed - brute).abs() <= 1e-12, "n={n} s={s} a={a} b={b}: {closed} vs {brute}");
                }
            }
        }
    }
}

#[test]
fn bc_example() {
    let v = gof_bc_bound(10, 2, 4.0, 1.0).unwrap();
    let base = 0.2 + (0.6f64 * 0.9).sqrt();
    assert!((v - base.powi(16)).abs() < 1e-12);
    assert!((v - brute_force_bc(10, 2, 4.0, 1.0)).abs() < 1e-12);
}

#[test]
fn converse_at_reference_point() {
    let c = tst_converse(1000, 100, 15.0, 5.0).unwrap();
    assert_eq!(c.tau, 2500.0 / 990.0);
    assert!((c.tau - 2.525).abs() < 1e-3);
    assert_eq!(c.beta_upper, None);
}

#[test]
fn huge_graphs_stay_finite() {
    let c = tst_converse(1_000_000, 1000, 3.0, 2.9).unwrap();
    assert!(c.tau.is_finite() && c.gamma.is_finite() && c.gamma_upper.is_finite());
    assert!(c.risk_lower.unwrap().is_finite());
    assert!(gof_bc_bound(1_000_000, 400_000, 3.0, 1.0).unwrap() >= 0.0);
}
