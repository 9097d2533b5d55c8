mod common;

use coinmirror::metrics::METRIC_COLUMNS;
use coinmirror::stats::{correlation_matrix, pearson, stars, two_tailed_p};
use coinmirror::Error;
use statrs::distribution::{ContinuousCDF, StudentsT};

use common::{column, permutation_p, reference_rows, REFERENCE_CORRELATIONS};

#[test]
fn pearson_examples() {
    let xs = [1.0, 2.0, 4.0, 8.0];
    let neg: Vec<f64> = xs.iter().map(|x| -x).collect();
    assert!((pearson(&xs, &xs).unwrap() - 1.0).abs() < 1e-15);
    assert!((pearson(&xs, &neg).unwrap() + 1.0).abs() < 1e-15);
    assert!(matches!(pearson(&xs, &[3.0; 4]), Err(Error::ZeroVariance)));
    assert!(matches!(pearson(&xs, &xs[..3]), Err(Error::LengthMismatch { .. })));
    assert!(pearson(&xs[..2], &xs[..2]).is_err());
}

#[test]
fn creativity_against_oscillations() {
    let rows = reference_rows();
    let r = pearson(&column(&rows, "creativity"), &column(&rows, "bc_oscillations")).unwrap();
    assert!((r + 0.830).abs() < 0.02, "{r}");
}

#[test]
fn p_value_examples() {
    for n in [3, 10, 100] {
        assert_eq!(two_tailed_p(0.0, n).unwrap(), 1.0);
    }
    assert!((two_tailed_p(-0.830, 10).unwrap() - 0.003).abs() < 0.0005);
    assert!(two_tailed_p(0.930, 10).unwrap() < 0.0005);
    assert_eq!(two_tailed_p(1.0, 10).unwrap(), 0.0);
    assert!(two_tailed_p(0.5, 2).is_err());
}

#[test]
fn p_values_agree_with_students_t() {
    for n in [3usize, 5, 10, 30, 200] {
        let df = (n - 2) as f64;
        let t_dist = StudentsT::new(0.0, 1.0, df).unwrap();
        for i in 1..100 {
            let r = i as f64 / 100.0;
            let t = r * (df / (1.0 - r * r)).sqrt();
            let want = 2.0 * (1.0 - t_dist.cdf(t));
            let got = two_tailed_p(r, n).unwrap();
            assert!((got - want).abs() < 1e-9, "r={r} n={n}: {got} vs {want}");
        }
    }
}

#[test]
fn reference_pairs_reproduced() {
    let table = correlation_matrix(&reference_rows(), &METRIC_COLUMNS).unwrap();
    for (x, y, r, p, mark) in REFERENCE_CORRELATIONS {
        let cell = table.get(x, y).unwrap();
        let (got_r, got_p) = (cell.r.unwrap(), cell.p.unwrap());
        assert!((got_r - r).abs() <= 0.02, "{x}/{y}: r {got_r} vs {r}");
        assert!((got_p - p).abs() <= 0.005, "{x}/{y}: p {got_p} vs {p}");
        assert_eq!(cell.n, 10);
        assert_eq!(cell.stars(), mark, "{x}/{y}");
    }
}

#[test]
fn star_thresholds() {
    assert_eq!(stars(0.0099), "**");
    assert_eq!(stars(0.01), "*");
    assert_eq!(stars(0.0499), "*");
    assert_eq!(stars(0.05), "");
}

#[test]
fn matrix_shape_and_errors() {
    let rows = reference_rows();
    let table = correlation_matrix(&rows, &["creativity", "awvci", "group_dc"]).unwrap();
    assert_eq!(table.pairs().count(), 3);
    let diag = table.get("awvci", "awvci").unwrap();
    assert_eq!((diag.r, diag.p), (Some(1.0), None));
    assert_eq!(table.get("awvci", "creativity"), table.get("creativity", "awvci"));
    let err = correlation_matrix(&rows, &["creativity", "nonsense"]).unwrap_err();
    assert!(err.to_string().contains("nonsense"));
    assert!(correlation_matrix(&rows[..2], &["creativity", "awvci"]).is_err());
}

#[test]
fn permutation_oracle_on_reference_pairs() {
    let rows = reference_rows();
    for (i, (x, y, ..)) in REFERENCE_CORRELATIONS.iter().enumerate() {
        let (xs, ys) = (column(&rows, x), column(&rows, y));
        let analytic = two_tailed_p(pearson(&xs, &ys).unwrap(), xs.len()).unwrap();
        let perm = permutation_p(&xs, &ys, 100_000, 7 + i as u64);
        assert!(
            (perm - analytic).abs() <= 0.01,
            "{x}/{y}: permutation {perm} vs analytic {analytic}"
        );
    }
}
