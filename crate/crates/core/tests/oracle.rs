use mdiforest_core::geometry::Cell;
use mdiforest_core::oracle::{
    best_population_split, build_theoretical_tree, criterion_correlated, criterion_linear,
    criterion_multiplicative, mc_criterion, PopulationModel, TieBreak,
};
use mdiforest_core::synthdata::ModelSpec;
use proptest::prelude::*;

fn cell(lo: &[f64], hi: &[f64]) -> Cell {
    Cell::new(lo.to_vec(), hi.to_vec()).unwrap()
}

#[test]
fn linear_values() {
    assert_eq!(
        criterion_linear(&Cell::unit(1), &[1.0], 0, 0.5).unwrap(),
        1.0 / 16.0
    );
    assert!(criterion_linear(&Cell::unit(1), &[1.0], 0, 1e-12).unwrap() < 1e-12);
    assert!(criterion_linear(&Cell::unit(1), &[1.0], 0, 1.0).is_err());

    let c = cell(&[0.25, 0.25], &[0.75, 0.75]);
    let exact = criterion_linear(&c, &[1.0, 1.0], 0, 0.4).unwrap();
    let spec = ModelSpec::linear(vec![1.0, 1.0], 0.0).unwrap();
    let mc = mc_criterion(&spec, &c, 0, 0.4, 1_000_000, 5).unwrap();
    assert!((exact - mc.value).abs() <= 3e-3);
}

#[test]
fn multiplicative_quadrants() {
    let f =
        |lo: &[f64], hi: &[f64], j| criterion_multiplicative(&cell(lo, hi), 1.0, j, 0.5).unwrap();
    assert_eq!(f(&[0.0, 0.0], &[1.0, 1.0], 0), 0.25);
    assert_eq!(f(&[0.0, 0.0], &[0.5, 1.0], 1), 1.0 / 16.0);
    assert_eq!(f(&[0.5, 0.0], &[1.0, 1.0], 1), 9.0 / 16.0);
}

#[test]
fn correlated_root() {
    for beta in 1..=5 {
        assert_eq!(
            criterion_correlated(&Cell::unit(3), beta, 1.0, 0, 0.5).unwrap(),
            0.25
        );
        assert_eq!(
            criterion_correlated(&Cell::unit(3), beta, 1.0, 1, 0.5).unwrap(),
            0.25
        );
    }
    assert_eq!(
        criterion_correlated(&Cell::unit(3), 0, 1.0, 0, 0.5).unwrap(),
        1.0 / 16.0
    );
    for alpha in [0.5, 1.0, 3.0] {
        let g = criterion_correlated(&Cell::unit(3), 2, alpha, 2, 0.5).unwrap();
        assert!((g - alpha * alpha / 16.0).abs() < 1e-15);
    }
    // an off-diagonal cell has no mass
    assert!(
        criterion_correlated(&cell(&[0.0, 0.5, 0.0], &[0.5, 1.0, 1.0]), 1, 1.0, 0, 0.25).is_err()
    );
}

#[test]
fn independent_inputs_flip_at_one() {
    let root = |alpha| {
        let m = PopulationModel::Correlated { beta: 0, alpha };
        best_population_split(&m, &Cell::unit(3), &[0, 1, 2], TieBreak::default())
            .unwrap()
            .unwrap()
            .0
            .dim
    };
    assert_eq!(root(0.9), 0);
    assert_eq!(root(1.1), 2);
}

#[test]
fn theoretical_tree_explains_variance() {
    let m = PopulationModel::Linear {
        alphas: vec![1.0, -2.0, 0.5],
    };
    let tree = build_theoretical_tree::<f64>(&m, 9, TieBreak::default()).unwrap();
    let total: f64 = tree.population_mdi().iter().sum();
    let leaf = tree.leaf_variance().unwrap();
    let v = (1.0 + 4.0 + 0.25) / 12.0;
    assert!((total + leaf - v).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn linear_peaks_at_midpoint(a in 0.0..0.5f64, w in 0.05..0.5f64, t in 0.01..0.99f64, alpha in -3.0..3.0f64) {
        let c = cell(&[a], &[a + w]);
        let mid = criterion_linear(&c, &[alpha], 0, a + w / 2.0).unwrap();
        let other = criterion_linear(&c, &[alpha], 0, a + w * t).unwrap();
        prop_assert!(other <= mid + 1e-15);
        prop_assert!((mid - alpha * alpha / 4.0 * (w / 2.0).powi(2)).abs() < 1e-14);
    }
}
