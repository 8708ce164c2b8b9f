//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::time::{Duration, Instant};

use mdiforest_core::cart::{fit_tree, FitParams};
use mdiforest_core::forest::{fit_forest, forest_mdi, ForestParams};
use mdiforest_core::geometry::Cell;
use mdiforest_core::mdi::{empirical_mdi, group_mdi};
use mdiforest_core::oracle::{
    best_population_split, build_theoretical_tree, correlated_root_criterion,
    grid_verify_center_split, mc_criterion, tree_disagreement_exact, PopulationModel, Rational,
    Rect, Scalar, TieBreak,
};
use mdiforest_core::synthdata::{
    correlated_group_variance, generate, population_variance, sample_diagonal_blocks,
    theoretical_correlation, ComponentFn, ModelSpec,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SIGMA: f64 = 0.1;

type Criterion = (&'static str, Duration, fn() -> Verdict);

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: String) -> Verdict {
    Verdict { passed, detail }
}

fn exact_decomposition() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for case in 0..50 {
        let sigma = rng.random_range(0.0..1.0);
        let spec = match case % 4 {
            0 => {
                let d = rng.random_range(1..=5);
                ModelSpec::linear((0..d).map(|_| rng.random_range(-2.0..2.0)).collect(), sigma)
            }
            1 => {
                let cat = [
                    ComponentFn::Identity,
                    ComponentFn::CenteredQuadratic,
                    ComponentFn::Sine,
                ];
                let d = rng.random_range(1..=4);
                ModelSpec::additive((0..d).map(|_| cat[rng.random_range(0..3)]).collect(), sigma)
            }
            2 => ModelSpec::multiplicative(
                rng.random_range(0.2..2.0),
                rng.random_range(1..=4),
                sigma,
            ),
            _ => ModelSpec::correlated(rng.random_range(0..=4), rng.random_range(0.0..3.0), sigma),
        }
        .unwrap();
        let n = rng.random_range(20..3000);
        let data = generate(&spec, n, rng.random()).unwrap();
        let d = spec.d();
        let params = FitParams {
            nodesize: rng.random_range(1..=10),
            max_depth: None,
            mtry: Some(rng.random_range(1..=d)),
            seed: rng.random(),
        };
        let tree = fit_tree(&data, &params).unwrap();
        let k = rng.random_range(0..=tree.depth() + 2);
        let r = empirical_mdi(&tree.truncate(k), &data).unwrap();
        worst = worst.max(r.identity_residual.abs() / r.empirical_variance_y.max(1.0));
    }
    verdict(
        worst <= 1e-9,
        format!("max |V(Y) - sum MDI - R_n| / max(1, V(Y)) = {worst:.2e} over 50 cases"),
    )
}

fn saturation() -> Verdict {
    let mut ok = true;
    let mut worst_r2: f64 = 0.0;
    for (i, spec) in [
        ModelSpec::linear(vec![1.0, 2.0, 0.5], 0.3),
        ModelSpec::multiplicative(1.0, 3, 0.5),
        ModelSpec::correlated(2, 1.0, 0.2),
    ]
    .into_iter()
    .enumerate()
    {
        let data = generate(&spec.unwrap(), 3000, 40 + i as u64).unwrap();
        let r = empirical_mdi(&fit_tree(&data, &FitParams::default()).unwrap(), &data).unwrap();
        ok &= r.risk == 0.0;
        worst_r2 = worst_r2.max((r.r_squared - 1.0).abs());
    }
    ok &= worst_r2 <= 1e-12;
    let spec = ModelSpec::linear(vec![1.0, 1.0], 1.0).unwrap();
    let data = generate(&spec, 10_000, 2).unwrap();
    let total = empirical_mdi(&fit_tree(&data, &FitParams::default()).unwrap(), &data)
        .unwrap()
        .total_mdi;
    let v = 1.0 / 6.0;
    let in_band = (v + 0.85..=v + 1.15).contains(&total);
    verdict(
        ok && in_band,
        format!(
            "risk 0 on 3 fully grown trees, max |r2 - 1| = {worst_r2:.1e}; noisy total MDI {total:.4} in [{:.4}, {:.4}]",
            v + 0.85,
            v + 1.15
        ),
    )
}

fn random_side(rng: &mut ChaCha8Rng, min_width: f64) -> (f64, f64) {
    let w = rng.random_range(min_width..=1.0);
    let a = rng.random_range(0.0..=1.0 - w);
    (a, (a + w).min(1.0))
}

fn correlated_cell(rng: &mut ChaCha8Rng, beta: u32) -> Cell {
    let big_r = (1u64 << beta) as f64;
    let (x1, x2) = if beta >= 1 && rng.random_bool(0.5) {
        // whole run of 2^b' squares, second side possibly widened
        let b = rng.random_range(1..=beta);
        let r = (1u64 << b) as f64;
        let start = rng.random_range(0..(big_r / r) as u64) as f64 * r / big_r;
        let end = start + r / big_r;
        let lo2 = if rng.random_bool(0.5) {
            start * rng.random::<f64>()
        } else {
            start
        };
        let hi2 = if rng.random_bool(0.5) {
            end + (1.0 - end) * rng.random::<f64>()
        } else {
            end
        };
        ((start, end), (lo2, hi2))
    } else {
        // part of one square; the second side may reach past it
        let i = rng.random_range(0..1u64 << beta) as f64;
        let w = 1.0 / big_r;
        let (a, b) = random_side(rng, 0.3);
        let (c, e) = random_side(rng, 0.3);
        let x1 = ((i + a) * w, (i + b) * w);
        let mut x2 = ((i + c) * w, (i + e) * w);
        if rng.random_bool(0.3) {
            x2 = (
                x2.0 * rng.random::<f64>(),
                x2.1 + (1.0 - x2.1) * rng.random::<f64>(),
            );
        }
        (x1, x2)
    };
    let x3 = random_side(rng, 0.05);
    Cell::new(vec![x1.0, x2.0, x3.0], vec![x1.1, x2.1, x3.1]).unwrap()
}

fn oracle_vs_monte_carlo() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut lines = Vec::new();
    let mut ok = true;
    for family in ["linear", "multiplicative", "correlated"] {
        let mut pass = 0;
        for case in 0..100u64 {
            let (model, cell) = match family {
                "linear" => {
                    let d = rng.random_range(2..=3);
                    let alphas = (0..d).map(|_| rng.random_range(-2.0..2.0)).collect();
                    let lo_hi: Vec<_> = (0..d).map(|_| random_side(&mut rng, 0.05)).collect();
                    (
                        PopulationModel::Linear { alphas },
                        Cell::new(
                            lo_hi.iter().map(|s| s.0).collect(),
                            lo_hi.iter().map(|s| s.1).collect(),
                        ),
                    )
                }
                "multiplicative" => {
                    let d = rng.random_range(2..=3);
                    let lo_hi: Vec<_> = (0..d).map(|_| random_side(&mut rng, 0.05)).collect();
                    (
                        PopulationModel::Multiplicative {
                            alpha: rng.random_range(0.5..2.0),
                            d,
                        },
                        Cell::new(
                            lo_hi.iter().map(|s| s.0).collect(),
                            lo_hi.iter().map(|s| s.1).collect(),
                        ),
                    )
                }
                _ => {
                    let beta = rng.random_range(0..=3);
                    (
                        PopulationModel::Correlated {
                            beta,
                            alpha: rng.random_range(0.0..2.5),
                        },
                        Ok(correlated_cell(&mut rng, beta)),
                    )
                }
            };
            let cell = cell.unwrap();
            let j = rng.random_range(0..model.d());
            let (a, b) = cell.side(j);
            let s = a + (b - a) * rng.random_range(0.01..0.99);
            let exact = model
                .criterion(&Rect::<f64>::from_cell(&cell), j, &s)
                .unwrap();
            let spec = model.to_spec().unwrap();
            let est = mc_criterion(&spec, &cell, j, s, 1_000_000, 1000 + case).unwrap();
            if (exact - est.value).abs() <= 3.0 * est.std_error + 1e-12 {
                pass += 1;
            }
        }
        ok &= pass >= 97;
        lines.push(format!("{family} {pass}/100"));
    }
    verdict(
        ok,
        format!("within 3 SE at 1e6 draws: {}", lines.join(", ")),
    )
}

fn forest_report(spec: &ModelSpec, n: usize, depth: usize, nodesize: usize, seed: u64) -> Vec<f64> {
    let data = generate(spec, n, seed).unwrap();
    let params = ForestParams {
        n_trees: 100,
        mtry: Some(spec.d()),
        nodesize,
        max_depth: Some(depth),
        bootstrap: true,
        seed,
    };
    let forest = fit_forest(&data, &params).unwrap();
    forest_mdi(&forest, &data).unwrap().per_variable
}

fn rel(v: f64, t: f64) -> f64 {
    ((v - t) / t).abs()
}

fn linear_model() -> Verdict {
    let model = PopulationModel::Linear {
        alphas: vec![1.0, 2.0],
    };
    let pop = build_theoretical_tree::<f64>(&model, 12, TieBreak::default())
        .unwrap()
        .population_mdi();
    let targets = [1.0 / 12.0, 4.0 / 12.0];
    let pop_err = (0..2)
        .map(|j| (pop[j] - targets[j]).abs())
        .fold(0.0, f64::max);
    let spec = ModelSpec::linear(vec![1.0, 2.0, 0.0], SIGMA).unwrap();
    let emp = forest_report(&spec, 50_000, 8, 50, 4);
    let emp_err = (0..2).map(|j| rel(emp[j], targets[j])).fold(0.0, f64::max);
    verdict(
        pop_err <= 1e-3 && emp_err <= 0.15 && emp[2] <= 0.01,
        format!(
            "population k=12 max abs error {pop_err:.1e}; forest MDI ({:.4}, {:.4}, {:.4}) vs (0.0833, 0.3333, 0), max rel error {emp_err:.3}",
            emp[0], emp[1], emp[2]
        ),
    )
}

fn multiplicative_model() -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for d in [2usize, 3] {
        let target = (4.0f64 / 3.0).powi(d as i32) - 1.0;
        let model = PopulationModel::Multiplicative { alpha: 1.0, d };
        let pop: f64 = build_theoretical_tree::<f64>(&model, 14, TieBreak::default())
            .unwrap()
            .population_mdi()
            .iter()
            .sum();
        let spec = ModelSpec::multiplicative(1.0, d, SIGMA).unwrap();
        let emp: f64 = forest_report(&spec, 50_000, 10, 1, 5 + d as u64)
            .iter()
            .sum();
        ok &= (pop - target).abs() <= 1e-2 && rel(emp, target) <= 0.15;
        parts.push(format!(
            "d={d}: target {target:.4}, population k=14 {pop:.4}, forest {emp:.4} (rel {:.3})",
            rel(emp, target)
        ));
    }
    verdict(ok, parts.join("; "))
}

fn multiplicative_disagreement() -> Verdict {
    let mut worst: f64 = 0.0;
    for alpha in [1.0, 0.5, 3.0] {
        let model = PopulationModel::Multiplicative { alpha, d: 2 };
        for k in 2..=8 {
            let got = tree_disagreement_exact(&model, k).unwrap().to_f64();
            worst = worst.max((got - alpha * alpha / 16.0).abs());
        }
    }
    verdict(
        worst <= 1e-12,
        format!("max |gap - alpha^2/16| = {worst:.1e} for k = 2..8"),
    )
}

fn correlation() -> Verdict {
    let n = 100_000;
    let mut ok = true;
    let mut parts = Vec::new();
    for beta in 0..=3u32 {
        let x = sample_diagonal_blocks(n, beta, 7).unwrap();
        let (a, b): (Vec<f64>, Vec<f64>) = x.chunks(2).map(|r| (r[0], r[1])).unzip();
        let (ma, mb) = (
            a.iter().sum::<f64>() / n as f64,
            b.iter().sum::<f64>() / n as f64,
        );
        let cov = a
            .iter()
            .zip(&b)
            .map(|(x, y)| (x - ma) * (y - mb))
            .sum::<f64>();
        let va = a.iter().map(|x| (x - ma).powi(2)).sum::<f64>();
        let vb = b.iter().map(|y| (y - mb).powi(2)).sum::<f64>();
        let rho = cov / (va * vb).sqrt();
        let err = (rho - theoretical_correlation(beta)).abs();
        ok &= err <= 3.0 / (n as f64).sqrt();
        parts.push(format!("beta={beta}: {rho:.4} (err {err:.1e})"));
    }
    verdict(ok, parts.join(", "))
}

fn center_split() -> Verdict {
    let mut ok = true;
    let mut points = Vec::new();
    for beta in 0..=5u32 {
        let r = grid_verify_center_split(beta).unwrap();
        ok &= r.certified;
        points.push(r.n_points);
    }
    let mut worst_gain: f64 = 0.0;
    for beta in 1..=5u32 {
        for j in [0, 1] {
            let m = PopulationModel::Correlated { beta, alpha: 1.0 };
            let g = m
                .criterion(&Rect::<Rational>::unit(3), j, &Rational::ratio(1, 2))
                .unwrap();
            worst_gain = worst_gain.max((g.to_f64() - 0.25).abs());
        }
        let root = |alpha: f64| {
            let m = PopulationModel::Correlated { beta, alpha };
            best_population_split(&m, &Cell::unit(3), &[0, 1, 2], TieBreak::default())
                .unwrap()
                .unwrap()
                .0
                .dim
        };
        ok &= root(1.9) < 2 && root(2.1) == 2;
    }
    ok &= worst_gain <= 1e-12;
    // independent inputs: one square, gain 1/16
    let g0 = correlated_root_criterion(0, 0.5);
    ok &= (g0 - 1.0 / 16.0).abs() <= 1e-15;
    verdict(
        ok,
        format!(
            "grid certified for beta 0..5 ({} points at beta=5); root gain 1/4 within {worst_gain:.0e} and flip between 1.9 and 2.1 for beta 1..5; beta=0 gain {g0} (independent inputs)",
            points[5]
        ),
    )
}

fn correlated_groups() -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for beta in [1u32, 2] {
        let spec = ModelSpec::correlated(beta, 1.0, SIGMA).unwrap();
        let data = generate(&spec, 50_000, 9 + beta as u64).unwrap();
        let params = ForestParams {
            n_trees: 100,
            mtry: Some(3),
            max_depth: Some(10),
            seed: 9 + beta as u64,
            ..ForestParams::default()
        };
        let report = forest_mdi(&fit_forest(&data, &params).unwrap(), &data).unwrap();
        let (group, x3) = group_mdi(&report, &[1, 2]).unwrap();
        let gt = correlated_group_variance(beta);
        let x3t = population_variance(&spec).unwrap().per_variable[2].unwrap();
        ok &= rel(group, gt) <= 0.15 && rel(x3, x3t) <= 0.15;
        parts.push(format!(
            "beta={beta}: group {group:.4} vs {gt:.4} (rel {:.3}), X3 {x3:.4} vs {x3t:.4} (rel {:.3})",
            rel(group, gt),
            rel(x3, x3t)
        ));
    }
    verdict(ok, parts.join("; "))
}

fn correlated_disagreement() -> Verdict {
    let mut worst: f64 = 0.0;
    for beta in 1..=3u32 {
        let m = PopulationModel::Correlated { beta, alpha: 1.0 };
        let got = tree_disagreement_exact(&m, beta as usize + 12)
            .unwrap()
            .to_f64();
        worst = worst.max((got - (1.0 - 0.25f64.powi(beta as i32)) / 3.0).abs());
    }
    verdict(
        worst <= 1e-6,
        format!("max |gap - (1 - 4^-beta)/3| = {worst:.1e} for beta 1..3"),
    )
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        (
            "exact decomposition",
            Duration::from_secs(30),
            exact_decomposition,
        ),
        (
            "fully grown saturation",
            Duration::from_secs(60),
            saturation,
        ),
        (
            "closed form vs Monte Carlo",
            Duration::from_secs(300),
            oracle_vs_monte_carlo,
        ),
        (
            "linear model limits",
            Duration::from_secs(300),
            linear_model,
        ),
        (
            "multiplicative model limits",
            Duration::from_secs(600),
            multiplicative_model,
        ),
        (
            "multiplicative tree disagreement",
            Duration::from_secs(1),
            multiplicative_disagreement,
        ),
        (
            "diagonal-blocks correlation",
            Duration::from_secs(10),
            correlation,
        ),
        (
            "center split and root flip",
            Duration::from_secs(1800),
            center_split,
        ),
        (
            "correlated group importance",
            Duration::from_secs(600),
            correlated_groups,
        ),
        (
            "correlated tree disagreement",
            Duration::from_secs(60),
            correlated_disagreement,
        ),
    ];
    let mut failures = 0;
    for (i, (name, budget, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let v = run();
        let took = start.elapsed();
        let passed = v.passed && took <= budget;
        if !passed {
            failures += 1;
        }
        println!(
            "criterion {:>2} {} {name}: {} [{:.2} s, budget {} s]",
            i + 1,
            if passed { "PASS" } else { "FAIL" },
            v.detail,
            took.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("acceptance: {} of 10 criteria passed", 10 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
