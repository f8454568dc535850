use proptest::prelude::*;
use vfarm::stats::{dcorr, distance_matrix, double_center, Column};

/// dCov² via the three-term expansion, without double centering.
fn dcov2_expansion(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let a = |i: usize, j: usize| (x[i] - x[j]).abs();
    let b = |i: usize, j: usize| (y[i] - y[j]).abs();
    let idx = 0..x.len();
    let mut s1 = 0.0;
    let mut sa = 0.0;
    let mut sb = 0.0;
    let mut s3 = 0.0;
    for i in idx.clone() {
        let mut ra = 0.0;
        let mut rb = 0.0;
        for j in idx.clone() {
            s1 += a(i, j) * b(i, j);
            sa += a(i, j);
            sb += b(i, j);
            ra += a(i, j);
            rb += b(i, j);
        }
        s3 += ra * rb;
    }
    s1 / (n * n) + (sa / (n * n)) * (sb / (n * n)) - 2.0 * s3 / (n * n * n)
}

fn oracle(x: &[f64], y: &[f64]) -> f64 {
    let vxy = dcov2_expansion(x, y).max(0.0);
    let vx = dcov2_expansion(x, x);
    let vy = dcov2_expansion(y, y);
    if vx <= 0.0 || vy <= 0.0 {
        return 0.0;
    }
    (vxy / (vx * vy).sqrt()).sqrt()
}

fn pairs() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (2usize..=30).prop_flat_map(|n| (prop::collection::vec(-100.0..100.0f64, n), prop::collection::vec(-100.0..100.0f64, n)))
}

fn num(v: &[f64]) -> Column {
    Column::Numeric(v.to_vec())
}

proptest! {
    #[test]
    fn matches_brute_force((x, y) in pairs()) {
        let d = dcorr(&num(&x), &num(&y)).unwrap();
        prop_assume!(!d.degenerate);
        prop_assert!((d.rho - oracle(&x, &y)).abs() < 1e-10, "{} vs {}", d.rho, oracle(&x, &y));
    }

    #[test]
    fn symmetric_and_bounded((x, y) in pairs()) {
        let a = dcorr(&num(&x), &num(&y)).unwrap().rho;
        let b = dcorr(&num(&y), &num(&x)).unwrap().rho;
        prop_assert!((a - b).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&a));
    }

    #[test]
    fn self_correlation_is_one(x in prop::collection::vec(-100.0..100.0f64, 2..30)) {
        let d = dcorr(&num(&x), &num(&x)).unwrap();
        prop_assume!(!d.degenerate);
        prop_assert!((d.rho - 1.0).abs() < 1e-10);
    }

    #[test]
    fn affine_invariance((x, y) in pairs(), s in 0.1..10.0f64, t in -50.0..50.0f64, flip in any::<bool>()) {
        let k = if flip { -s } else { s };
        let x2: Vec<f64> = x.iter().map(|v| k * v + t).collect();
        let a = dcorr(&num(&x), &num(&y)).unwrap();
        let b = dcorr(&num(&x2), &num(&y)).unwrap();
        prop_assume!(!a.degenerate);
        prop_assert!((a.rho - b.rho).abs() < 1e-9);
    }

    #[test]
    fn centered_rows_and_columns_sum_to_zero(x in prop::collection::vec(-100.0..100.0f64, 2..30)) {
        let a = double_center(&distance_matrix(&num(&x)).unwrap());
        let scale = a.data.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        for i in 0..a.n {
            prop_assert!(a.row(i).iter().sum::<f64>().abs() < 1e-10 * scale * a.n as f64);
            prop_assert!((0..a.n).map(|r| a.get(r, i)).sum::<f64>().abs() < 1e-10 * scale * a.n as f64);
        }
    }

    #[test]
    fn categorical_matches_indicator_coding(labels in prop::collection::vec(0u8..3, 2..30), y in prop::collection::vec(-10.0..10.0f64, 30)) {
        // the discrete metric on k labels equals the Euclidean metric on
        // one-hot vectors scaled by 1/sqrt(2)
        let n = labels.len();
        let y = &y[..n];
        let cat = Column::Categorical(labels.iter().map(|l| format!("c{l}")).collect());
        let d = dcorr(&cat, &num(y)).unwrap();
        prop_assume!(!d.degenerate);
        let dm = distance_matrix(&cat).unwrap();
        for i in 0..n {
            for j in 0..n {
                let expect = if labels[i] == labels[j] { 0.0 } else { 1.0 };
                prop_assert_eq!(dm.get(i, j), expect);
            }
        }
        prop_assert!((0.0..=1.0).contains(&d.rho));
    }
}

#[test]
fn oracle_agrees_on_a_fixed_case() {
    let x = [1.0, 2.0, 3.0, 4.0, 5.0];
    let y = [1.0, 4.0, 9.0, 16.0, 25.0];
    let d = dcorr(&num(&x), &num(&y)).unwrap();
    assert!((d.rho - oracle(&x, &y)).abs() < 1e-12);
    assert!(d.rho > 0.9);
}
