//! Regression trees, random forests and Mean Decrease Impurity, together with
//! a population-level "theoretical tree" built from exact split criteria.

pub mod cart;
pub mod cli;
pub mod error;
pub mod forest;
pub mod geometry;
pub mod mdi;
pub mod oracle;
pub mod rng;
pub mod synthdata;

pub use cart::{fit_tree, fit_tree_on, FitParams, Tree, TreeNode};
pub use error::{Error, Result};
pub use forest::{fit_forest, forest_mdi, forest_predict, Forest, ForestParams};
pub use geometry::{Cell, Split};
pub use mdi::{empirical_mdi, empirical_risk, group_mdi, MdiReport};
pub use synthdata::{generate, ComponentFn, Dataset, ModelKind, ModelSpec};
