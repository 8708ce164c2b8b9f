//! Theoretical trees: CART grown on the population criterion.

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::str::FromStr;

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::geometry::{Cell, Split};

use super::closed_form::{PopulationModel, Rect};
use super::scalar::Scalar;

/// Rule for choosing among variables whose best cuts have equal gain.
///
/// `PreferLowDim` and `PreferHighDim` first favor the variable split least
/// recently on the path from the root (never-split variables first), then
/// the lowest or highest index. `RoundRobin` scans variables cyclically from
/// `depth mod d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    #[default]
    PreferLowDim,
    PreferHighDim,
    RoundRobin,
}

impl FromStr for TieBreak {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "prefer-low-dim" | "low" => Ok(TieBreak::PreferLowDim),
            "prefer-high-dim" | "high" => Ok(TieBreak::PreferHighDim),
            "round-robin" => Ok(TieBreak::RoundRobin),
            _ => Err(Error::Parameter(format!("unknown tie-break policy {s:?}"))),
        }
    }
}

/// What a tie-break rule may look at.
#[derive(Debug, Clone, Copy)]
pub struct SplitContext<'a> {
    pub depth: usize,
    pub d: usize,
    /// Variables split on from the root down to the parent, in order.
    pub path_dims: &'a [usize],
    /// Whole diagonal squares in the cell (correlated model only).
    pub block_count: Option<i64>,
}

impl TieBreak {
    /// Pick one of `tied` (ascending, non-empty).
    pub fn choose(self, ctx: &SplitContext<'_>, tied: &[usize]) -> usize {
        let last_use = |j: usize| ctx.path_dims.iter().rposition(|&p| p == j);
        match self {
            TieBreak::PreferLowDim => *tied
                .iter()
                .min_by_key(|&&j| (last_use(j).map_or(0, |p| p + 1), j))
                .expect("non-empty tie set"),
            TieBreak::PreferHighDim => *tied
                .iter()
                .min_by_key(|&&j| (last_use(j).map_or(0, |p| p + 1), usize::MAX - j))
                .expect("non-empty tie set"),
            TieBreak::RoundRobin => {
                let start = ctx.depth % ctx.d;
                *tied
                    .iter()
                    .min_by_key(|&&j| (j + ctx.d - start) % ctx.d)
                    .expect("non-empty tie set")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TheoreticalNode<S> {
    pub cell: Rect<S>,
    pub depth: usize,
    /// `P(X ∈ A)`.
    pub p_star: S,
    /// `E[m(X) | X ∈ A]`.
    pub mean: S,
    /// `(dim, threshold)`, 0-based `dim`.
    pub split: Option<(usize, S)>,
    pub gain: Option<S>,
    pub children: Option<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TheoreticalTree<S> {
    pub model: PopulationModel,
    /// `None` for the custom policies used to build extreme trees.
    pub tie_break: Option<TieBreak>,
    nodes: Vec<TheoreticalNode<S>>,
}

impl<S: Scalar> TheoreticalTree<S> {
    pub fn nodes(&self) -> &[TheoreticalNode<S>] {
        &self.nodes
    }

    pub fn depth(&self) -> usize {
        self.nodes.iter().map(|n| n.depth).max().unwrap_or(0)
    }

    pub fn leaves(&self) -> impl Iterator<Item = &TheoreticalNode<S>> {
        self.nodes.iter().filter(|n| n.split.is_none())
    }

    /// Truncation at depth `k` (a prefix of the breadth-first node list).
    pub fn truncate(&self, k: usize) -> Self {
        let keep = self.nodes.partition_point(|n| n.depth <= k);
        let mut nodes = self.nodes[..keep].to_vec();
        for n in nodes.iter_mut().filter(|n| n.depth == k) {
            n.split = None;
            n.gain = None;
            n.children = None;
        }
        TheoreticalTree {
            model: self.model.clone(),
            tie_break: self.tie_break,
            nodes,
        }
    }

    /// `MDI*(X_j) = Σ_{A split on j} p*_A L*_A`.
    pub fn population_mdi(&self) -> Vec<S> {
        let mut out = vec![S::zero(); self.model.d()];
        for n in &self.nodes {
            if let (Some((j, _)), Some(g)) = (&n.split, &n.gain) {
                out[*j] = out[*j].clone() + n.p_star.clone() * g.clone();
            }
        }
        out
    }

    /// `Σ_{leaves} p*_A V[m(X) | X ∈ A]`, the part of `V[m(X)]` left
    /// unexplained by the tree.
    pub fn leaf_variance(&self) -> Result<S> {
        let mut total = S::zero();
        for leaf in self.leaves() {
            total = total + leaf.p_star.clone() * self.model.variance(&leaf.cell)?;
        }
        Ok(total)
    }

    /// Cells of the leaves in breadth-first order.
    pub fn leaf_cells(&self) -> Vec<Rect<S>> {
        self.leaves().map(|l| l.cell.clone()).collect()
    }

    pub fn to_f64(&self) -> TheoreticalTree<f64> {
        let conv = |r: &Rect<S>| Rect {
            lower: r.lower.iter().map(Scalar::to_f64).collect(),
            upper: r.upper.iter().map(Scalar::to_f64).collect(),
        };
        TheoreticalTree {
            model: self.model.clone(),
            tie_break: self.tie_break,
            nodes: self
                .nodes
                .iter()
                .map(|n| TheoreticalNode {
                    cell: conv(&n.cell),
                    depth: n.depth,
                    p_star: n.p_star.to_f64(),
                    mean: n.mean.to_f64(),
                    split: n.split.as_ref().map(|(j, z)| (*j, z.to_f64())),
                    gain: n.gain.as_ref().map(Scalar::to_f64),
                    children: n.children,
                })
                .collect(),
        }
    }

    /// Same layout as empirical trees, with `p_star` in the `n` column.
    pub fn to_text(&self) -> String {
        let mut out = String::from("# depth dim z gain p_star mean\n");
        for n in &self.nodes {
            match (&n.split, &n.gain) {
                (Some((j, z)), Some(g)) => writeln!(
                    out,
                    "{} {} {} {} {} {}",
                    n.depth,
                    j + 1,
                    z.to_f64(),
                    g.to_f64(),
                    n.p_star.to_f64(),
                    n.mean.to_f64()
                ),
                _ => writeln!(
                    out,
                    "{} - - - {} {}",
                    n.depth,
                    n.p_star.to_f64(),
                    n.mean.to_f64()
                ),
            }
            .expect("writing to a String cannot fail");
        }
        out
    }
}

/// Best cut over `candidates` for a cell, with ties resolved by `choose`.
fn best_in_cell<S: Scalar>(
    model: &PopulationModel,
    cell: &Rect<S>,
    candidates: &[usize],
    ctx: &SplitContext<'_>,
    choose: &dyn Fn(&SplitContext<'_>, &[usize]) -> usize,
) -> Result<Option<(usize, S, S)>> {
    let mut found: Vec<(usize, S, S)> = Vec::with_capacity(candidates.len());
    for &j in candidates {
        let (z, g) = model.best_along(cell, j)?;
        found.push((j, z, g));
    }
    let Some(max) = found.iter().map(|f| f.2.clone()).reduce(S::max_of) else {
        return Ok(None);
    };
    if max <= S::zero() {
        return Ok(None);
    }
    let tied: Vec<usize> = found
        .iter()
        .filter(|f| f.2.is_tie(&max))
        .map(|f| f.0)
        .collect();
    let pick = choose(ctx, &tied);
    Ok(found.into_iter().find(|f| f.0 == pick))
}

fn check_dims(model: &PopulationModel, dims: &[usize]) -> Result<Vec<usize>> {
    let d = model.d();
    if let Some(&j) = dims.iter().find(|&&j| j >= d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: j + 1,
        });
    }
    let mut v = dims.to_vec();
    v.sort_unstable();
    v.dedup();
    Ok(v)
}

/// Population-optimal split of `cell` over `candidate_dims` (0-based).
/// Returns `None` when the regression function is constant on the cell.
pub fn best_population_split(
    model: &PopulationModel,
    cell: &Cell,
    candidate_dims: &[usize],
    tie_break: TieBreak,
) -> Result<Option<(Split, f64)>> {
    model.validate()?;
    let dims = check_dims(model, candidate_dims)?;
    let rect = Rect::<f64>::from_cell(cell);
    let ctx = SplitContext {
        depth: 0,
        d: model.d(),
        path_dims: &[],
        block_count: model.block_count(&rect)?,
    };
    let best = best_in_cell(model, &rect, &dims, &ctx, &|c, t| tie_break.choose(c, t))?;
    Ok(best.map(|(j, z, g)| (Split::new(j, z), g)))
}

/// Grow the population tree to depth `k` with a custom tie rule.
pub fn build_with_policy<S: Scalar>(
    model: &PopulationModel,
    k: usize,
    choose: &dyn Fn(&SplitContext<'_>, &[usize]) -> usize,
) -> Result<TheoreticalTree<S>> {
    model.validate()?;
    let d = model.d();
    let dims: Vec<usize> = (0..d).collect();
    let root = Rect::<S>::unit(d);
    let mut nodes = vec![TheoreticalNode {
        p_star: model.mass(&root)?,
        mean: model.mean(&root)?,
        cell: root,
        depth: 0,
        split: None,
        gain: None,
        children: None,
    }];
    let mut paths: Vec<Vec<usize>> = vec![Vec::new()];
    let mut queue = VecDeque::from([0usize]);
    while let Some(id) = queue.pop_front() {
        let depth = nodes[id].depth;
        if depth >= k {
            continue;
        }
        let cell = nodes[id].cell.clone();
        let ctx = SplitContext {
            depth,
            d,
            path_dims: &paths[id],
            block_count: model.block_count(&cell)?,
        };
        let Some((j, z, g)) = best_in_cell(model, &cell, &dims, &ctx, choose)? else {
            continue;
        };
        let (l, r) = cell.split(j, &z);
        let mut child_path = paths[id].clone();
        child_path.push(j);
        let base = nodes.len();
        for c in [l, r] {
            nodes.push(TheoreticalNode {
                p_star: model.mass(&c)?,
                mean: model.mean(&c)?,
                cell: c,
                depth: depth + 1,
                split: None,
                gain: None,
                children: None,
            });
            paths.push(child_path.clone());
        }
        let node = &mut nodes[id];
        node.split = Some((j, z));
        node.gain = Some(g);
        node.children = Some((base, base + 1));
        queue.push_back(base);
        queue.push_back(base + 1);
    }
    Ok(TheoreticalTree {
        model: model.clone(),
        tie_break: None,
        nodes,
    })
}

/// Theoretical tree to depth `k`.
pub fn build_theoretical_tree<S: Scalar>(
    model: &PopulationModel,
    k: usize,
    tie_break: TieBreak,
) -> Result<TheoreticalTree<S>> {
    let mut tree = build_with_policy(model, k, &|c, t| tie_break.choose(c, t))?;
    tree.tie_break = Some(tie_break);
    Ok(tree)
}

/// Per-variable population MDI of a theoretical tree.
pub fn population_mdi<S: Scalar>(tree: &TheoreticalTree<S>) -> Vec<S> {
    tree.population_mdi()
}

/// The two extreme trees whose importance of `x_1` differs:
/// `(lower, higher)` in `MDI*(X_1)`.
pub fn extreme_trees(
    model: &PopulationModel,
    k: usize,
) -> Result<(TheoreticalTree<BigRational>, TheoreticalTree<BigRational>)> {
    match model {
        PopulationModel::Multiplicative { d: 2, .. } => {
            // Both orders of the two root cuts give the four quadrants; below
            // that both trees follow the same path-independent rule.
            let low = build_with_policy(model, k, &|c, t| {
                if c.depth < 2 {
                    TieBreak::PreferLowDim.choose(c, t)
                } else {
                    t[0]
                }
            })?;
            let high = build_with_policy(model, k, &|c, t| {
                if c.depth < 2 {
                    TieBreak::PreferHighDim.choose(c, t)
                } else {
                    t[0]
                }
            })?;
            Ok((low, high))
        }
        PopulationModel::Correlated { .. } => {
            // While a cell spans several diagonal squares, x_1 and x_2 tie;
            // one tree always cuts x_1 there, the other always x_2. Both
            // reach the same effective supports afterwards.
            let high = build_with_policy(model, k, &|_, t| t[0])?;
            let low = build_with_policy(model, k, &|c, t| {
                if c.block_count.is_some_and(|r| r > 1) && t.contains(&1) {
                    1
                } else {
                    t[0]
                }
            })?;
            Ok((low, high))
        }
        _ => Err(Error::UnsupportedModel(format!(
            "no extreme-tree construction for {model}"
        ))),
    }
}

/// Exact gap in `MDI*(X_1)` between the two extreme trees at depth `k`.
pub fn tree_disagreement_exact(model: &PopulationModel, k: usize) -> Result<BigRational> {
    let (low, high) = extreme_trees(model, k)?;
    Ok(high.population_mdi()[0].clone() - low.population_mdi()[0].clone())
}

/// [`tree_disagreement_exact`] rounded to `f64`.
pub fn tree_disagreement(model: &PopulationModel, k: usize) -> Result<f64> {
    Ok(tree_disagreement_exact(model, k)?.to_f64())
}
