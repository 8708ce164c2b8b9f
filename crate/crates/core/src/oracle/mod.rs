//! Population side: closed-form split criteria, theoretical trees and their
//! MDI, a grid certificate for the correlated model, and a Monte Carlo
//! criterion used to validate the closed forms.

mod closed_form;
mod grid;
mod montecarlo;
mod scalar;
mod tree;

pub use closed_form::{
    block_gain, correlated_root_criterion, correlated_support, criterion_correlated,
    criterion_linear, criterion_multiplicative, linear_gain, CorrelatedSupport, PopulationModel,
    Rect, MAX_CERTIFIED_BETA,
};
pub use grid::{grid_verify_center_split, GridReport};
pub use montecarlo::{mc_criterion, McEstimate, MIN_DRAWS};
pub use scalar::Scalar;
pub use tree::{
    best_population_split, build_theoretical_tree, build_with_policy, extreme_trees,
    population_mdi, tree_disagreement, tree_disagreement_exact, SplitContext, TheoreticalNode,
    TheoreticalTree, TieBreak,
};

/// Exact rational type used by the theoretical trees.
pub type Rational = num_rational::BigRational;
