//! Random forests: bootstrap resampling plus per-node variable subsampling,
//! with averaged predictions and averaged MDI.

use rand::Rng;
use rayon::prelude::*;

use crate::cart::{fit_tree_on, FitParams, Tree};
use crate::error::{Error, Result};
use crate::mdi::{empirical_mdi, MdiReport};
use crate::rng::{derive_seed, stream, Stream};
use crate::synthdata::Dataset;

#[derive(Debug, Clone, PartialEq)]
pub struct ForestParams {
    pub n_trees: usize,
    /// `None` means `ceil(d / 3)`.
    pub mtry: Option<usize>,
    pub nodesize: usize,
    pub max_depth: Option<usize>,
    /// Draw `n` rows with replacement for each tree.
    pub bootstrap: bool,
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 100,
            mtry: None,
            nodesize: 1,
            max_depth: None,
            bootstrap: true,
            seed: 0,
        }
    }
}

impl ForestParams {
    pub fn resolved_mtry(&self, d: usize) -> usize {
        self.mtry.unwrap_or(d.div_ceil(3).max(1))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Forest {
    trees: Vec<Tree>,
    params: ForestParams,
}

impl Forest {
    pub fn trees(&self) -> &[Tree] {
        &self.trees
    }

    pub fn params(&self) -> &ForestParams {
        &self.params
    }

    /// Bootstrap multiset of tree `t` (all rows when bootstrap is off).
    pub fn tree_sample(&self, t: usize) -> &[u32] {
        self.trees[t].training_rows()
    }

    pub fn predict(&self, point: &[f64]) -> Result<f64> {
        let mut s = 0.0;
        for t in &self.trees {
            s += t.predict(point)?;
        }
        Ok(s / self.trees.len() as f64)
    }
}

fn bootstrap_rows(n: usize, seed: u64, t: usize) -> Vec<u32> {
    let mut rng = stream(seed, Stream::Bootstrap, t as u64);
    (0..n).map(|_| rng.random_range(0..n as u32)).collect()
}

/// Fit `n_trees` trees in parallel. Every tree draws from its own streams, so
/// the result does not depend on scheduling.
pub fn fit_forest(dataset: &Dataset, params: &ForestParams) -> Result<Forest> {
    if params.n_trees == 0 {
        return Err(Error::Parameter("n_trees must be >= 1".into()));
    }
    let mtry = params.resolved_mtry(dataset.d());
    let trees = (0..params.n_trees)
        .into_par_iter()
        .map(|t| {
            let rows = if params.bootstrap {
                bootstrap_rows(dataset.n(), params.seed, t)
            } else {
                (0..dataset.n() as u32).collect()
            };
            let fit = FitParams {
                nodesize: params.nodesize,
                max_depth: params.max_depth,
                mtry: Some(mtry),
                seed: derive_seed(params.seed, Stream::TreeSeed, t as u64),
            };
            fit_tree_on(dataset, rows, &fit)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Forest {
        trees,
        params: params.clone(),
    })
}

/// Per-tree MDI reports, each computed on that tree's own training sample.
pub fn per_tree_mdi(forest: &Forest, dataset: &Dataset) -> Result<Vec<MdiReport>> {
    forest
        .trees
        .par_iter()
        .map(|t| empirical_mdi(t, dataset))
        .collect()
}

/// Element-wise average of the per-tree reports.
pub fn forest_mdi(forest: &Forest, dataset: &Dataset) -> Result<MdiReport> {
    MdiReport::average(&per_tree_mdi(forest, dataset)?)
}

pub fn forest_predict(forest: &Forest, point: &[f64]) -> Result<f64> {
    forest.predict(point)
}

/// Mean squared error of the forest on `dataset`.
pub fn forest_mse(forest: &Forest, dataset: &Dataset) -> Result<f64> {
    let mut s = 0.0;
    for i in 0..dataset.n() {
        let r = dataset.y()[i] - forest.predict(dataset.row(i))?;
        s += r * r;
    }
    Ok(s / dataset.n() as f64)
}
