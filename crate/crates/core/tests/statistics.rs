//! Monte Carlo checks of the random model. Seeds are fixed, so every run is
//! the same draw; tolerances are at least three standard errors.

use cycle_lists::constructive::{
    check_condition1, find_k1_set_family, is_good_scheme, GoodSchemeConfig,
};
use cycle_lists::experiment::{
    estimate_p, mu_finite, predict, regime_sweep, s_from_t, sample_clique_counts, Method,
    PaletteRule, RunOptions,
};
use cycle_lists::{
    count_identical_list_cliques, sample_scheme, CyclePower, RngStream, SchemeParams,
};

fn frequency(trials: u64, mut hit: impl FnMut(u64) -> bool) -> f64 {
    (0..trials).filter(|&i| hit(i)).count() as f64 / trials as f64
}

#[test]
fn clique_count_mean_matches_expectation() {
    let g = CyclePower::new(5000, 2).unwrap();
    let p = SchemeParams::new(2, 12).unwrap();
    let mu = mu_finite(5000, 2, 2, 12).unwrap();
    let mean = (0..10_000u64)
        .map(|i| {
            count_identical_list_cliques(&g, &sample_scheme(&g, p, &RngStream::new(21, i))) as f64
        })
        .sum::<f64>()
        / 10_000.0;
    assert!((mean - mu).abs() / mu < 0.05, "mean {mean} vs {mu}");
}

#[test]
fn condition1_holds_with_huge_palette() {
    let g = CyclePower::new(1000, 2).unwrap();
    let p = SchemeParams::new(2, 1000).unwrap();
    let f = frequency(2000, |i| {
        check_condition1(&g, &sample_scheme(&g, p, &RngStream::new(22, i)))
            .unwrap()
            .0
    });
    assert!(f >= 0.99, "{f}");
}

#[test]
fn families_exist_at_moderate_palettes() {
    let n = 10_000;
    let g = CyclePower::new(n, 2).unwrap();
    let p = SchemeParams::new(2, s_from_t(n, 2, 4.0).unwrap()).unwrap();
    let cfg = GoodSchemeConfig::with_d(2.0).unwrap();
    let f = frequency(500, |i| {
        find_k1_set_family(&g, &sample_scheme(&g, p, &RngStream::new(23, i)), &cfg)
            .unwrap()
            .is_some()
    });
    assert!(f >= 0.99, "{f}");
}

#[test]
fn good_schemes_are_typical_with_huge_palette() {
    let g = CyclePower::new(1000, 2).unwrap();
    let p = SchemeParams::new(2, 1000).unwrap();
    let cfg = GoodSchemeConfig::with_d(2.0).unwrap();
    let f = frequency(1000, |i| {
        is_good_scheme(&g, &sample_scheme(&g, p, &RngStream::new(24, i)), &cfg)
            .unwrap()
            .is_good
    });
    assert!(f >= 0.99, "{f}");
}

#[test]
fn uncoloured_probability_near_poisson_prediction() {
    let g = CyclePower::new(5000, 2).unwrap();
    let opts = RunOptions {
        method: Method::ConstructiveFirst,
        config: Some(GoodSchemeConfig::with_d(2.0).unwrap()),
        ..Default::default()
    };
    let est = estimate_p(&g, SchemeParams::new(2, 20).unwrap(), 10_000, 25, &opts).unwrap();
    let predicted = (-mu_finite(5000, 2, 2, 20).unwrap()).exp();
    assert!(
        (est.p_hat - predicted).abs() <= 0.02,
        "{} vs {predicted}",
        est.p_hat
    );
}

#[test]
fn sweep_tracks_the_finite_prediction() {
    let n_list = [1000, 2000, 4000, 8000, 16_000];
    let rows = regime_sweep(
        2,
        2,
        &n_list,
        &PaletteRule::Scaling(vec![2.0]),
        2000,
        26,
        &RunOptions::default(),
    )
    .unwrap();
    assert_eq!(rows.len(), n_list.len());
    let gap = |i: usize| rows[i].p_predicted.unwrap() - rows[i].p_hat;
    for row in &rows {
        assert_eq!(row.mu_limit, Some(0.25));
        // rounding s keeps the finite prediction within 0.07 of the limit here
        assert!(
            (row.p_predicted.unwrap() - (-0.25f64).exp()).abs() < 0.07,
            "{row:?}"
        );
    }
    // other obstructions pull small-n estimates below the prediction; that
    // bias fades as n grows
    let last = rows.len() - 1;
    let pred = rows[last].p_predicted.unwrap();
    let se = (pred * (1.0 - pred) / rows[last].trials as f64).sqrt();
    assert!(gap(last).abs() < 4.0 * se, "{:?}", rows[last]);
    assert!(gap(0) > gap(last), "{rows:?}");
    let limit = (-0.25f64).exp();
    assert!((rows[last].p_hat - limit).abs() < (rows[0].p_hat - limit).abs());
}

#[test]
fn regimes_away_from_the_threshold() {
    let sub = regime_sweep(
        2,
        2,
        &[10_000],
        &PaletteRule::Fixed(vec![3]),
        500,
        27,
        &RunOptions::default(),
    )
    .unwrap();
    assert!(sub[0].p_hat <= 0.01);
    let sup = regime_sweep(
        2,
        1,
        &[1001],
        &PaletteRule::Fixed(vec![3]),
        500,
        27,
        &RunOptions::default(),
    )
    .unwrap();
    assert!(sup[0].p_hat >= 0.99);
    // c > k has no Poisson prediction
    assert!(sup[0].mu_finite.is_none() && sup[0].p_predicted.is_none());
    assert!(predict(1001, 2, 1, 3, Some(1.0)).is_none());
}

#[test]
fn poisson_fit_accepts_the_model() {
    let g = CyclePower::new(5000, 2).unwrap();
    let fit = sample_clique_counts(&g, SchemeParams::new(2, 13).unwrap(), 10_000, 28, 0).unwrap();
    assert_eq!(fit.histogram.iter().sum::<u64>(), 10_000);
    assert!(fit.p_value > 0.01, "{fit:?}");
    assert!(fit.degrees_of_freedom >= 2);
}
