//! Experiment harness behind the `mdiforest` binary.
//!
//! Each subcommand writes a CSV whose leading `#` lines echo the
//! configuration and the build version, and whose trailing `#` line records
//! the wall-clock runtime. Everything between them depends only on the
//! configuration.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::cart::{fit_tree, FitParams};
use crate::error::{Error, Result};
use crate::forest::{fit_forest, per_tree_mdi, ForestParams};
use crate::geometry::Cell;
use crate::mdi::{empirical_mdi, group_mdi, MdiReport};
use crate::oracle::{
    best_population_split, build_theoretical_tree, tree_disagreement, PopulationModel, TieBreak,
};
use crate::rng::{derive_seed, Stream};
use crate::synthdata::{
    correlated_group_variance, generate, population_variance, ComponentFn, Dataset, ModelSpec,
};

pub const VERSION: &str = env!("MDIFOREST_VERSION");

/// Relative tolerance of the desk-scale convergence checks.
pub const REL_TOL: f64 = 0.15;
/// Absolute tolerance for variables whose target importance is zero.
pub const ABS_TOL: f64 = 0.01;

#[derive(Debug, Parser)]
#[command(name = "mdiforest", version = VERSION, about = "MDI experiments for CART and random forests")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Training-set decomposition V̂[Y] = ΣMDI + risk at every depth of one tree.
    Decompose(Config),
    /// Forest MDI against V[m_j(X_j)] for additive and linear models.
    Additive(Config),
    /// Forest MDI against α²((4/3)^d − 1) for the multiplicative model.
    Multiplicative(Config),
    /// Group MDI and root-split choice under correlated inputs.
    Correlated(Config),
}

#[derive(Debug, Clone, Args)]
pub struct Config {
    /// linear | additive | multiplicative | correlated
    #[arg(long, default_value = "linear")]
    pub model: String,
    /// Coefficients (linear, default 1,2) or a single α (default 1).
    #[arg(long, value_delimiter = ',')]
    pub alpha: Vec<f64>,
    /// Component functions of the additive model: identity, quadratic, sine.
    #[arg(long, value_delimiter = ',', default_value = "identity,sine")]
    pub components: Vec<String>,
    /// Dimension of the multiplicative model.
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long, default_value_t = 2)]
    pub beta: u32,
    #[arg(long, default_value_t = 0.1)]
    pub sigma: f64,
    #[arg(long, default_value_t = 10_000)]
    pub n: usize,
    #[arg(long, default_value_t = 100)]
    pub trees: usize,
    /// Depth cap k (unlimited when omitted).
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub nodesize: usize,
    /// Candidate variables per node (defaults to d).
    #[arg(long)]
    pub mtry: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub reps: usize,
    /// Depth of the theoretical tree used for oracle columns.
    #[arg(long, default_value_t = 12)]
    pub oracle_depth: usize,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Exit with status 2 when a tolerance check fails.
    #[arg(long)]
    pub check: bool,
    /// Read the dataset from a CSV (`decompose` only).
    #[arg(long)]
    pub data: Option<PathBuf>,
}

impl Config {
    fn echo(&self, command: &str) -> String {
        let model = match command {
            "multiplicative" | "correlated" => command,
            _ => self.model.as_str(),
        };
        format!(
            "command={command} model={} alpha={:?} components={:?} dim={} beta={} sigma={} n={} \
             trees={} depth={:?} nodesize={} mtry={:?} seed={} reps={} oracle_depth={} data={:?}",
            model,
            self.alpha,
            self.components,
            self.dim,
            self.beta,
            self.sigma,
            self.n,
            self.trees,
            self.depth,
            self.nodesize,
            self.mtry,
            self.seed,
            self.reps,
            self.oracle_depth,
            self.data
        )
    }

    fn single_alpha(&self) -> Result<f64> {
        match self.alpha.as_slice() {
            [] => Ok(1.0),
            [a] => Ok(*a),
            _ => Err(Error::Parameter(format!(
                "model {} takes a single alpha, got {:?}",
                self.model, self.alpha
            ))),
        }
    }

    pub fn spec(&self) -> Result<ModelSpec> {
        match self.model.as_str() {
            "linear" if self.alpha.is_empty() => ModelSpec::linear(vec![1.0, 2.0], self.sigma),
            "linear" => ModelSpec::linear(self.alpha.clone(), self.sigma),
            "additive" => {
                let comps = self
                    .components
                    .iter()
                    .map(|c| c.parse::<ComponentFn>())
                    .collect::<Result<Vec<_>>>()?;
                ModelSpec::additive(comps, self.sigma)
            }
            "multiplicative" => {
                ModelSpec::multiplicative(self.single_alpha()?, self.dim, self.sigma)
            }
            "correlated" => ModelSpec::correlated(self.beta, self.single_alpha()?, self.sigma),
            other => Err(Error::UnsupportedModel(format!("unknown model {other:?}"))),
        }
    }

    fn forest_params(&self, d: usize, seed: u64) -> ForestParams {
        ForestParams {
            n_trees: self.trees,
            mtry: Some(self.mtry.unwrap_or(d)),
            nodesize: self.nodesize,
            max_depth: self.depth,
            bootstrap: true,
            seed,
        }
    }

    fn rep_seed(&self, rep: usize) -> u64 {
        derive_seed(self.seed, Stream::Experiment, rep as u64)
    }
}

/// Data rows of one experiment and whether all tolerance checks held.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub csv: String,
    pub passed: bool,
}

struct Table {
    w: csv::Writer<Vec<u8>>,
}

impl Table {
    fn new(header: &[&str]) -> Result<Self> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header)?;
        Ok(Table { w })
    }

    fn row(&mut self, fields: &[String]) -> Result<()> {
        self.w.write_record(fields)?;
        Ok(())
    }

    fn finish(self) -> Result<String> {
        let bytes = self.w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }
}

fn f(v: f64) -> String {
    v.to_string()
}

fn rel_ok(value: f64, target: f64) -> bool {
    if target == 0.0 {
        value.abs() <= ABS_TOL
    } else {
        ((value - target) / target).abs() <= REL_TOL
    }
}

fn rel_err(value: f64, target: f64) -> f64 {
    if target == 0.0 {
        value.abs()
    } else {
        (value - target) / target
    }
}

fn mean_report(forest_reports: &[MdiReport]) -> Result<MdiReport> {
    MdiReport::average(forest_reports)
}

/// One tree (nodesize and mtry from the config) and its decomposition at
/// every truncation depth.
pub fn run_decompose(cfg: &Config) -> Result<Outcome> {
    let data = match &cfg.data {
        Some(path) => Dataset::read_csv(File::open(path)?)?,
        None => generate(&cfg.spec()?, cfg.n, cfg.rep_seed(0))?,
    };
    let params = FitParams {
        nodesize: cfg.nodesize,
        max_depth: cfg.depth,
        mtry: cfg.mtry,
        seed: cfg.rep_seed(0),
    };
    let tree = fit_tree(&data, &params)?;
    let mut t = Table::new(&["k", "total_mdi", "risk", "residual", "r_squared", "vary"])?;
    let mut passed = true;
    for k in 0..=tree.depth() {
        let r = empirical_mdi(&tree.truncate(k), &data)?;
        passed &= r.identity_residual.abs() <= 1e-9 * r.empirical_variance_y.max(1.0);
        t.row(&[
            k.to_string(),
            f(r.total_mdi),
            f(r.risk),
            f(r.identity_residual),
            f(r.r_squared),
            f(r.empirical_variance_y),
        ])?;
    }
    if cfg.nodesize == 1 && cfg.depth.is_none() {
        let r = empirical_mdi(&tree, &data)?;
        let distinct = (1..data.n()).all(|i| data.row(i) != data.row(0));
        if distinct {
            passed &= r.risk.abs() <= 1e-12 && (r.r_squared - 1.0).abs() <= 1e-12;
        }
    }
    Ok(Outcome {
        csv: t.finish()?,
        passed,
    })
}

/// Forest MDI per variable against `V[m_j(X_j)]`, with the theoretical-tree
/// value for linear models.
pub fn run_additive_linear(cfg: &Config) -> Result<Outcome> {
    let spec = cfg.spec()?;
    let targets = population_variance(&spec)?;
    let oracle = match PopulationModel::from_spec(&spec) {
        Ok(m @ PopulationModel::Linear { .. }) => {
            let t = build_theoretical_tree::<f64>(&m, cfg.oracle_depth, TieBreak::default())?;
            Some(t.population_mdi())
        }
        _ => None,
    };
    let mut t = Table::new(&[
        "rep",
        "variable",
        "mdi",
        "target",
        "rel_error",
        "oracle_mdi",
    ])?;
    let mut passed = true;
    for rep in 0..cfg.reps {
        let seed = cfg.rep_seed(rep);
        let data = generate(&spec, cfg.n, seed)?;
        let forest = fit_forest(&data, &cfg.forest_params(spec.d(), seed))?;
        let report = mean_report(&per_tree_mdi(&forest, &data)?)?;
        for j in 0..spec.d() {
            let target = targets.per_variable[j].unwrap_or(f64::NAN);
            let v = report.per_variable[j];
            passed &= rel_ok(v, target);
            t.row(&[
                rep.to_string(),
                (j + 1).to_string(),
                f(v),
                f(target),
                f(rel_err(v, target)),
                oracle.as_ref().map_or(String::new(), |o| f(o[j])),
            ])?;
        }
    }
    Ok(Outcome {
        csv: t.finish()?,
        passed,
    })
}

/// Sum of forest MDI against `α²((4/3)^d − 1)`, the symmetry gap between
/// variables and the exact disagreement of the two extreme theoretical trees.
pub fn run_multiplicative(cfg: &Config) -> Result<Outcome> {
    let mut cfg = cfg.clone();
    cfg.model = "multiplicative".into();
    let spec = cfg.spec()?;
    let alpha = cfg.single_alpha()?;
    let target = population_variance(&spec)?.total;
    let model = PopulationModel::from_spec(&spec)?;
    let oracle_total: f64 =
        build_theoretical_tree::<f64>(&model, cfg.oracle_depth, TieBreak::default())?
            .population_mdi()
            .iter()
            .sum();
    let disagreement = if cfg.dim == 2 {
        f(tree_disagreement(&model, cfg.oracle_depth.max(2))?)
    } else {
        String::new()
    };
    let mut t = Table::new(&[
        "rep",
        "mdi",
        "total_mdi",
        "target",
        "rel_error",
        "symmetry_gap",
        "oracle_total",
        "disagreement",
        "disagreement_target",
    ])?;
    let mut passed = true;
    for rep in 0..cfg.reps {
        let seed = cfg.rep_seed(rep);
        let data = generate(&spec, cfg.n, seed)?;
        let forest = fit_forest(&data, &cfg.forest_params(spec.d(), seed))?;
        let report = mean_report(&per_tree_mdi(&forest, &data)?)?;
        let hi = report.per_variable.iter().copied().fold(f64::MIN, f64::max);
        let lo = report.per_variable.iter().copied().fold(f64::MAX, f64::min);
        let gap = (hi - lo) / (report.total_mdi / spec.d() as f64);
        passed &= rel_ok(report.total_mdi, target);
        t.row(&[
            rep.to_string(),
            report
                .per_variable
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(";"),
            f(report.total_mdi),
            f(target),
            f(rel_err(report.total_mdi, target)),
            f(gap),
            f(oracle_total),
            disagreement.clone(),
            if cfg.dim == 2 {
                f(alpha * alpha / 16.0)
            } else {
                String::new()
            },
        ])?;
    }
    Ok(Outcome {
        csv: t.finish()?,
        passed,
    })
}

/// Group importance of `(X_1, X_2)`, importance of `X_3`, root-split choices
/// across the forest, and the extreme-tree disagreement.
pub fn run_correlated(cfg: &Config) -> Result<Outcome> {
    let mut cfg = cfg.clone();
    cfg.model = "correlated".into();
    let spec = cfg.spec()?;
    let alpha = cfg.single_alpha()?;
    let group_target = correlated_group_variance(cfg.beta);
    let x3_target = alpha * alpha / 12.0;
    let model = PopulationModel::from_spec(&spec)?;
    let (root, _) = best_population_split(&model, &Cell::unit(3), &[0, 1, 2], TieBreak::default())?
        .ok_or_else(|| Error::Internal("constant regression function".into()))?;
    let expect_x3 = root.dim == 2;
    let disagreement = tree_disagreement(&model, cfg.beta as usize + cfg.oracle_depth)?;
    let disagreement_target = (1.0 - 0.25f64.powi(cfg.beta as i32)) / 3.0;
    let mut t = Table::new(&[
        "rep",
        "group_mdi",
        "group_target",
        "group_rel_error",
        "x3_mdi",
        "x3_target",
        "x3_rel_error",
        "root_split_x1",
        "root_split_x2",
        "root_split_x3",
        "oracle_root_dim",
        "disagreement",
        "disagreement_target",
    ])?;
    let mut passed = (disagreement - disagreement_target).abs() <= 1e-6;
    for rep in 0..cfg.reps {
        let seed = cfg.rep_seed(rep);
        let data = generate(&spec, cfg.n, seed)?;
        let forest = fit_forest(&data, &cfg.forest_params(3, seed))?;
        let report = mean_report(&per_tree_mdi(&forest, &data)?)?;
        let (group, x3) = group_mdi(&report, &[1, 2])?;
        let mut counts = [0usize; 3];
        for tree in forest.trees() {
            if let Some(s) = tree.root().split {
                counts[s.dim] += 1;
            }
        }
        let x3_share = counts[2] as f64 / forest.trees().len() as f64;
        passed &= rel_ok(group, group_target) && rel_ok(x3, x3_target);
        if cfg.mtry.unwrap_or(3) == 3 {
            passed &= if expect_x3 {
                x3_share == 1.0
            } else {
                x3_share == 0.0
            };
        }
        t.row(&[
            rep.to_string(),
            f(group),
            f(group_target),
            f(rel_err(group, group_target)),
            f(x3),
            f(x3_target),
            f(rel_err(x3, x3_target)),
            counts[0].to_string(),
            counts[1].to_string(),
            counts[2].to_string(),
            (root.dim + 1).to_string(),
            f(disagreement),
            f(disagreement_target),
        ])?;
    }
    Ok(Outcome {
        csv: t.finish()?,
        passed,
    })
}

/// Run a parsed command line; returns the process exit status.
pub fn run(cli: Cli) -> Result<i32> {
    let start = Instant::now();
    let (name, cfg) = match &cli.command {
        Command::Decompose(c) => ("decompose", c),
        Command::Additive(c) => ("additive", c),
        Command::Multiplicative(c) => ("multiplicative", c),
        Command::Correlated(c) => ("correlated", c),
    };
    let outcome = match &cli.command {
        Command::Decompose(c) => run_decompose(c)?,
        Command::Additive(c) => run_additive_linear(c)?,
        Command::Multiplicative(c) => run_multiplicative(c)?,
        Command::Correlated(c) => run_correlated(c)?,
    };
    let mut text = String::new();
    writeln!(text, "# mdiforest {VERSION}").expect("String write");
    writeln!(text, "# config: {}", cfg.echo(name)).expect("String write");
    text.push_str(&outcome.csv);
    writeln!(text, "# checks_passed: {}", outcome.passed).expect("String write");
    writeln!(
        text,
        "# runtime_seconds: {:.3}",
        start.elapsed().as_secs_f64()
    )
    .expect("String write");
    match &cfg.out {
        Some(path) => std::fs::write(path, text)?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(if cfg.check && !outcome.passed { 2 } else { 0 })
}

/// Entry point used by the binary.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
