mod common;

use common::oracle;
use midasvol::diagnostics::{arch_lm, chi_square_sf, jarque_bera, ljung_box, ljung_box_squared, DEFAULT_ARCH_LAGS};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn iid(seed: u64, n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
}

fn arch1(seed: u64, n: usize, omega: f64, alpha: f64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut prev: f64 = 0.0;
    (0..n)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            prev = (omega + alpha * prev * prev).sqrt() * z;
            prev
        })
        .collect()
}

#[test]
fn jarque_bera_alternating_series() {
    let x: Vec<f64> = (0..600).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
    let jb = jarque_bera(&x).unwrap();
    assert!((jb.statistic - 100.0).abs() < 1e-9, "{}", jb.statistic);
    assert_eq!(jb.df, 2);
    assert!((jb.p_value - (-50.0f64).exp()).abs() < 1e-25);
}

#[test]
fn chi_square_tail_matches_series_at_reference_points() {
    let dfs = [1, 2, 3, 4, 5, 7, 10, 12, 20, 36];
    let fractions = [0.1, 0.5, 1.0, 1.7, 3.0];
    let mut checked = 0;
    for &df in &dfs {
        for &f in &fractions {
            let x = f * df as f64;
            let got = chi_square_sf(x, df);
            let want = oracle::chi_square_sf_series(x, df);
            assert!((got - want).abs() <= 1e-10, "df={df} x={x}: {got} vs {want}");
            checked += 1;
        }
    }
    assert_eq!(checked, 50);
}

#[test]
fn chi_square_edges() {
    assert_eq!(chi_square_sf(0.0, 3), 1.0);
    assert_eq!(chi_square_sf(f64::INFINITY, 3), 0.0);
    assert!((chi_square_sf(2.0, 2) - (-1.0f64).exp()).abs() < 1e-15);
}

#[test]
fn arch_lm_has_power_against_arch1() {
    let rejections = (0..100)
        .filter(|&s| arch_lm(&arch1(1000 + s, 1000, 1.0, 0.5), DEFAULT_ARCH_LAGS).unwrap().p_value < 0.01)
        .count();
    assert!(rejections >= 99, "{rejections}/100");
}

#[test]
fn tests_hold_size_under_iid_noise() {
    let reps = 400;
    let (mut lb, mut lb2, mut arch) = (0, 0, 0);
    for s in 0..reps {
        let x = iid(s, 1000);
        lb += (ljung_box(&x, 20).unwrap().p_value < 0.05) as usize;
        lb2 += (ljung_box_squared(&x, 20).unwrap().p_value < 0.05) as usize;
        arch += (arch_lm(&x, 12).unwrap().p_value < 0.05) as usize;
    }
    for (name, hits) in [("lb", lb), ("lb2", lb2), ("arch", arch)] {
        let rate = hits as f64 / reps as f64;
        assert!((0.02..=0.09).contains(&rate), "{name}: {rate}");
    }
}

#[test]
fn ljung_box_detects_ar1() {
    let e = iid(9, 1000);
    let mut x = vec![0.0; e.len()];
    for i in 1..e.len() {
        x[i] = 0.4 * x[i - 1] + e[i];
    }
    assert!(ljung_box(&x, 10).unwrap().p_value < 1e-6);
}

#[test]
fn constant_input_is_degenerate_or_error() {
    let x = vec![0.0; 200];
    assert!(jarque_bera(&x).is_err());
    assert!(ljung_box(&x, 10).is_err());
}
