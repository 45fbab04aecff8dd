mod common;

use common::oracle;

use midasvol::rmtindex::{
    construct_index, default_groups, equicorrelation, jacobi_eigen, orthonormality_error, GroupConfig,
};
use midasvol::{MonthlySeries, YearMonth};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

#[test]
fn equicorrelation_spectrum_and_uniform_vector() {
    for n in [2, 3, 5, 10, 18, 44] {
        for rho in [0.05, 0.3, 0.6, 0.95] {
            let eig = jacobi_eigen(&equicorrelation(n, rho), 1e-14).unwrap();
            let top = 1.0 + (n as f64 - 1.0) * rho;
            assert!((eig.eigenvalues[0] - top).abs() <= 1e-10, "n={n} rho={rho}");
            for j in 1..n {
                assert!((eig.eigenvalues[j] - (1.0 - rho)).abs() <= 1e-10, "n={n} rho={rho} j={j}");
            }
            let u = eig.eigenvectors.column(0);
            let sign = u.sum().signum();
            let target = 1.0 / (n as f64).sqrt();
            for v in u.iter() {
                assert!((sign * v - target).abs() <= 1e-10, "n={n} rho={rho}: {v}");
            }
            assert!(orthonormality_error(&eig.eigenvectors) <= 1e-10);
        }
    }
}

#[test]
fn three_by_three_matches_closed_form_roots() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let a = DMatrix::from_fn(3, 3, |_, _| rng.gen_range(-2.0..2.0));
        let s = (&a + a.transpose()) * 0.5;
        let tr = s.trace();
        let minors = s[(0, 0)] * s[(1, 1)] - s[(0, 1)] * s[(1, 0)] + s[(0, 0)] * s[(2, 2)] - s[(0, 2)] * s[(2, 0)]
            + s[(1, 1)] * s[(2, 2)]
            - s[(1, 2)] * s[(2, 1)];
        let det = s.determinant();
        let want = oracle::cubic_roots(-tr, minors, -det);
        let eig = jacobi_eigen(&s, 1e-14).unwrap();
        for (got, w) in eig.eigenvalues.iter().zip(want) {
            assert!((got - w).abs() <= 1e-8, "{got} vs {w}");
        }
        assert!((eig.reconstruct() - &s).amax() <= 1e-12);
    }
}

fn one_factor_panel(seed: u64, n: usize, months: usize) -> (Vec<MonthlySeries>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = YearMonth::new(2000, 1).unwrap();
    let factor: Vec<f64> = (0..months).map(|_| normal(&mut rng)).collect();
    let panel = (0..n)
        .map(|i| {
            let load = rng.gen_range(0.6..1.2);
            let level = rng.gen_range(0.0..3.0);
            let noise = rng.gen_range(0.2..0.5);
            let v = factor.iter().map(|f| level + load * f + noise * normal(&mut rng)).collect();
            MonthlySeries::from_start(format!("E{i:02}"), start, v).unwrap()
        })
        .collect();
    (panel, factor)
}

#[test]
fn one_factor_index_tracks_factor_and_mean() {
    for seed in 0..20 {
        let (panel, factor) = one_factor_panel(seed, 10, 286);
        let group = GroupConfig { name: "G".into(), members: panel.iter().map(|s| s.label().to_string()).collect() };
        let ep = construct_index(&group, &panel).unwrap();
        let index = ep.index.unwrap();
        let mean: Vec<f64> = (0..286).map(|t| panel.iter().map(|s| s.values()[t]).sum::<f64>() / 10.0).collect();
        let c_factor = oracle::pearson(index.values(), &factor);
        let c_mean = oracle::pearson(index.values(), &mean);
        assert!(c_factor >= 0.95, "seed {seed}: corr with factor {c_factor}");
        assert!(c_mean >= 0.99, "seed {seed}: corr with mean {c_mean}");
        assert!((ep.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(ep.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
    }
}

#[test]
fn members_are_intersected_before_correlating() {
    let (mut panel, _) = one_factor_panel(1, 3, 60);
    let late = YearMonth::new(2001, 1).unwrap();
    let last = panel[0].last_month().unwrap();
    panel[2] = panel[2].slice(late, last).unwrap();
    let group = GroupConfig { name: "G".into(), members: vec!["E00".into(), "E01".into(), "E02".into()] };
    let index = construct_index(&group, &panel).unwrap().index.unwrap();
    assert_eq!(index.first_month(), Some(late));
    assert_eq!(index.len(), 48);
}

#[test]
fn group_errors_name_the_problem() {
    let (panel, _) = one_factor_panel(2, 3, 40);
    let single = GroupConfig { name: "Solo".into(), members: vec!["E00".into()] };
    assert!(construct_index(&single, &panel).unwrap_err().to_string().contains("Solo"));
    let missing = GroupConfig { name: "G".into(), members: vec!["E00".into(), "XYZ".into()] };
    assert!(construct_index(&missing, &panel).unwrap_err().to_string().contains("XYZ"));
}

#[test]
fn default_groups_cover_eighteen_indices() {
    let groups = default_groups();
    assert_eq!(groups.len(), 18);
    assert!(groups.iter().all(|g| g.validate().is_ok()));
}
