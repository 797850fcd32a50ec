use evalkit::statlab::{
    bootstrap_mean_ci, chi_square_2x2, ecdf_percentile, ema_update, mann_whitney_u, r1_penalty, shapiro_wilk,
    ContingencyTable2x2, DEFAULT_FD_STEP, DEFAULT_R1_GAMMA, DEFAULT_EMA_BETA,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, StandardNormal};
use statrs::distribution::{ContinuousCDF, Normal};

/// Wins plus half-ties over all pairs.
fn pair_count(x: &[i32], y: &[i32]) -> f64 {
    let mut u = 0.0;
    for a in x {
        for b in y {
            if a > b {
                u += 1.0;
            } else if a == b {
                u += 0.5;
            }
        }
    }
    u
}

/// Two-sided exact p-value by enumerating every split of the pooled sample.
fn enumerated_p(x: &[i32], y: &[i32]) -> f64 {
    let pooled: Vec<i32> = x.iter().chain(y).copied().collect();
    let (n, total) = (x.len(), pooled.len());
    let observed = pair_count(x, y);
    let (mut below, mut above, mut all) = (0u64, 0u64, 0u64);
    for mask in 0u32..(1 << total) {
        if mask.count_ones() as usize != n {
            continue;
        }
        let (mut a, mut b) = (Vec::new(), Vec::new());
        for (i, &v) in pooled.iter().enumerate() {
            if mask >> i & 1 == 1 {
                a.push(v)
            } else {
                b.push(v)
            }
        }
        let u = pair_count(&a, &b);
        all += 1;
        below += (u <= observed) as u64;
        above += (u >= observed) as u64;
    }
    (2.0 * below.min(above) as f64 / all as f64).min(1.0)
}

#[test]
fn mann_whitney_matches_pair_counting() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut exact_checked = 0;
    for _ in 0..500 {
        let n = rng.random_range(1..=8);
        let m = rng.random_range(1..=8);
        let range = rng.random_range(3..40);
        let x: Vec<i32> = (0..n).map(|_| rng.random_range(0..range)).collect();
        let y: Vec<i32> = (0..m).map(|_| rng.random_range(0..range)).collect();
        let r = mann_whitney_u(&x, &y).unwrap();
        assert_eq!(r.statistic, pair_count(&x, &y), "{x:?} {y:?}");
        assert_eq!(r.details["u_x"] + r.details["u_y"], (n * m) as f64);
        let tied = x.iter().chain(&y).enumerate().any(|(i, a)| x.iter().chain(&y).skip(i + 1).any(|b| a == b));
        if !tied {
            let p = enumerated_p(&x, &y);
            assert!((r.p_value - p).abs() < 1e-12, "{x:?} {y:?}: {} vs {p}", r.p_value);
            exact_checked += 1;
        }
    }
    assert!(exact_checked > 50, "{exact_checked}");
}

#[test]
fn mann_whitney_reference_values() {
    // scipy.stats.mannwhitneyu(method="exact") and (method="asymptotic")
    let r = mann_whitney_u(&[1, 2, 5, 7], &[3, 4, 6, 9, 10]).unwrap();
    assert_eq!(r.statistic, 5.0);
    assert!((r.p_value - 0.2857142857142857).abs() < 1e-12);
    let r = mann_whitney_u(&[1, 2, 2, 7], &[2, 4, 6, 9, 10]).unwrap();
    assert_eq!(r.statistic, 4.0);
    assert!((r.p_value - 0.17060874485083155).abs() < 1e-12);
    let r = mann_whitney_u(&[1, 2], &[3, 4]).unwrap();
    assert_eq!(r.statistic, 0.0);
    let same = [3.0, 1.0, 4.0, 1.0, 5.0, 9.0, 2.0, 6.0];
    let r = mann_whitney_u(&same, &same).unwrap();
    assert_eq!(r.statistic, 32.0);
    assert!(r.p_value > 0.99);
    assert!(mann_whitney_u::<f64>(&[], &[1.0]).is_err());
}

#[test]
fn shapiro_wilk_on_normal_quantiles() {
    let normal = Normal::new(0.0, 1.0).unwrap();
    let x: Vec<f64> = (1..=50).map(|i| normal.inverse_cdf((i as f64 - 0.5) / 50.0)).collect();
    let r = shapiro_wilk(&x).unwrap();
    // scipy.stats.shapiro on the same fixture
    assert!((r.statistic - 0.9992035683859155).abs() < 0.005, "{}", r.statistic);
    assert!((r.statistic - 0.9992035683859155).abs() < 1e-6, "{}", r.statistic);
    assert!(r.p_value > 0.99);
}

#[test]
fn shapiro_wilk_rejects_exponential_samples() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let exp = Exp::new(1.0).unwrap();
    let rejected = (0..200)
        .filter(|_| {
            let x: Vec<f64> = (0..50).map(|_| exp.sample(&mut rng)).collect();
            shapiro_wilk(&x).unwrap().p_value < 0.05
        })
        .count();
    assert!(rejected >= 180, "{rejected}/200");
}

#[test]
fn shapiro_wilk_keeps_its_size_on_normal_samples() {
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    let rejected = (0..400)
        .filter(|_| {
            let x: Vec<f64> = (0..30).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            shapiro_wilk(&x).unwrap().p_value < 0.05
        })
        .count();
    assert!((8..=36).contains(&rejected), "{rejected}/400");
}

#[test]
fn bootstrap_interval_covers_the_mean() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let trials = 1000;
    let covered = (0..trials)
        .filter(|&t| {
            let x: Vec<f64> = (0..100).map(|_| 3.0 + rng.sample::<f64, _>(StandardNormal)).collect();
            let ci = bootstrap_mean_ci(&x, 1000, 0.95, t).unwrap();
            ci.ci_low <= 3.0 && 3.0 <= ci.ci_high
        })
        .count();
    let rate = covered as f64 / trials as f64;
    assert!((0.93..=0.97).contains(&rate), "coverage {rate}");
}

#[test]
fn bootstrap_edge_cases() {
    let flat = bootstrap_mean_ci(&[2.5; 40], 500, 0.95, 1).unwrap();
    assert_eq!((flat.mean, flat.ci_low, flat.ci_high), (2.5, 2.5, 2.5));
    let x = [1.0, 4.0, 2.0, 8.0, 5.0];
    assert_eq!(bootstrap_mean_ci(&x, 500, 0.9, 7).unwrap(), bootstrap_mean_ci(&x, 500, 0.9, 7).unwrap());
    assert!(bootstrap_mean_ci(&x, 10, 0.9, 7).is_err());
    assert!(bootstrap_mean_ci(&[], 500, 0.9, 7).is_err());
}

/// Pearson statistic from the textbook formula, no library code involved.
fn chi_square_oracle(t: [[f64; 2]; 2]) -> f64 {
    let total = t[0][0] + t[0][1] + t[1][0] + t[1][1];
    let rows = [t[0][0] + t[0][1], t[1][0] + t[1][1]];
    let cols = [t[0][0] + t[1][0], t[0][1] + t[1][1]];
    let mut chi = 0.0;
    for r in 0..2 {
        for c in 0..2 {
            let e = rows[r] * cols[c] / total;
            chi += (t[r][c] - e).powi(2) / e;
        }
    }
    chi
}

#[test]
fn chi_square_on_the_turing_table() {
    let table = ContingencyTable2x2::new([[537, 63], [60, 540]]);
    let r = chi_square_2x2(&table, false).unwrap();
    let oracle = chi_square_oracle([[537.0, 63.0], [60.0, 540.0]]);
    assert!((oracle - 758.4489612240307).abs() < 1e-9);
    assert!((r.statistic - oracle).abs() < 1e-9, "{}", r.statistic);
    assert!((r.p_value / 5.838574352512954e-167 - 1.0).abs() < 1e-6, "{}", r.p_value);
    assert_eq!(r.df, Some(1));
    // expected counts come from the marginals
    assert_eq!(r.details["expected_real_images_correct"], 298.5);
    assert_eq!(r.details["expected_real_images_incorrect"], 301.5);
    assert!((r.statistic - 666.67).abs() > 50.0);

    let null = chi_square_2x2(&ContingencyTable2x2::new([[10, 10], [10, 10]]), false).unwrap();
    assert_eq!((null.statistic, null.p_value), (0.0, 1.0));
}

#[test]
fn r1_penalty_matches_analytic_gradients() {
    let gamma = DEFAULT_R1_GAMMA;
    assert_eq!(gamma, 8.0);
    for a in [-3.0, -0.5, 0.25, 2.0, 7.5] {
        let samples = vec![vec![-1.3], vec![0.0], vec![0.7], vec![4.2]];
        let got = r1_penalty(|x: &[f64]| a * x[0], &samples, gamma, DEFAULT_FD_STEP).unwrap();
        let expected = 4.0 * a * a;
        assert!((got - expected).abs() <= 1e-4 * expected, "a={a}: {got}");
    }
    let samples = vec![vec![1.0, 0.0], vec![0.0, 2.0]];
    let got = r1_penalty(|x: &[f64]| x[0] * x[0] + x[1] * x[1], &samples, gamma, DEFAULT_FD_STEP).unwrap();
    assert!((got - 40.0).abs() <= 1e-4 * 40.0, "{got}");
    let flat = r1_penalty(|_: &[f64]| 3.0, &samples, gamma, DEFAULT_FD_STEP).unwrap();
    assert_eq!(flat, 0.0);
    assert!(r1_penalty(|x: &[f64]| 1.0 / x[0], &[vec![0.0]], gamma, DEFAULT_FD_STEP).is_err());
}

#[test]
fn ema_with_the_training_beta() {
    assert_eq!(DEFAULT_EMA_BETA, 0.998);
    let out = ema_update(&[1.0], &[0.0], DEFAULT_EMA_BETA).unwrap();
    assert!((out[0] - 0.998).abs() < 1e-15);
    assert_eq!(ema_update(&[1.0, 2.0], &[5.0, 6.0], 1.0).unwrap(), vec![1.0, 2.0]);
    assert_eq!(ema_update(&[1.0, 2.0], &[5.0, 6.0], 0.0).unwrap(), vec![5.0, 6.0]);
    assert!(ema_update(&[1.0], &[1.0, 2.0], 0.5).is_err());
}

#[test]
fn ecdf_examples() {
    let v = [1.0, 2.0, 3.0, 4.0, 5.0];
    assert_eq!(ecdf_percentile(&v, &3.0).unwrap(), 0.6);
    assert_eq!(ecdf_percentile(&v, &0.5).unwrap(), 0.0);
    assert_eq!(ecdf_percentile(&v, &5.0).unwrap(), 1.0);
}

proptest! {
    #[test]
    fn r1_is_exact_enough_for_cubics(c in prop::array::uniform4(-2.0f64..2.0), x in -2.0f64..2.0) {
        // f = c0 + c1 x + c2 x^2 + c3 x^3, f' analytic
        let f = |v: &[f64]| c[0] + c[1] * v[0] + c[2] * v[0].powi(2) + c[3] * v[0].powi(3);
        let grad = c[1] + 2.0 * c[2] * x + 3.0 * c[3] * x * x;
        let expected = 4.0 * grad * grad;
        let got = r1_penalty(f, &[vec![x]], 8.0, DEFAULT_FD_STEP).unwrap();
        prop_assert!((got - expected).abs() <= 1e-4 * expected.max(1e-3), "{} vs {}", got, expected);
    }

    #[test]
    fn shapiro_is_affine_invariant(seed in any::<u64>(), a in 0.01f64..100.0, b in -1e3f64..1e3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<f64> = (0..25).map(|_| rng.random::<f64>()).collect();
        let y: Vec<f64> = x.iter().map(|v| a * v + b).collect();
        let (wx, wy) = (shapiro_wilk(&x).unwrap().statistic, shapiro_wilk(&y).unwrap().statistic);
        prop_assert!(wx <= 1.0);
        prop_assert!((wx - wy).abs() <= 1e-9);
    }

    #[test]
    fn chi_square_is_transpose_and_swap_invariant(t in prop::array::uniform4(1u64..500)) {
        let table = ContingencyTable2x2::new([[t[0], t[1]], [t[2], t[3]]]);
        let base = chi_square_2x2(&table, false).unwrap().statistic;
        prop_assert!((chi_square_2x2(&table.transpose(), false).unwrap().statistic - base).abs() <= 1e-9 * base.max(1.0));
        prop_assert!((chi_square_2x2(&table.swap_rows(), false).unwrap().statistic - base).abs() <= 1e-9 * base.max(1.0));
    }

    #[test]
    fn ecdf_is_monotone(mut v in prop::collection::vec(-10.0f64..10.0, 1..50), q1 in -12.0f64..12.0, q2 in -12.0f64..12.0) {
        v.sort_by(f64::total_cmp);
        let (lo, hi) = if q1 <= q2 { (q1, q2) } else { (q2, q1) };
        prop_assert!(ecdf_percentile(&v, &lo).unwrap() <= ecdf_percentile(&v, &hi).unwrap());
    }

    #[test]
    fn mwu_u_sum_is_nm(x in prop::collection::vec(0i32..6, 1..30), y in prop::collection::vec(0i32..6, 1..30)) {
        let r = mann_whitney_u(&x, &y).unwrap();
        prop_assert_eq!(r.details["u_x"] + r.details["u_y"], (x.len() * y.len()) as f64);
    }
}
