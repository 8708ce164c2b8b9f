//! Empirical CART for regression.
//!
//! Trees grow breadth-first: the root cell `[0,1]^d` is queued, and each
//! dequeued node holding more than `nodesize` samples is cut at the split that
//! maximizes the decrease in within-cell variance. Thresholds sit halfway
//! between consecutive distinct sample values. Argmax ties go to the lowest
//! variable index, then the lowest threshold.
//!
//! Nodes are stored in creation order, which is also depth order, so the
//! truncation of a tree at depth `k` is a prefix of its node arena.

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::ops::Range;

use rand::seq::index::sample as sample_indices;

use crate::error::{Error, Result};
use crate::geometry::{Cell, Split};
use crate::rng::{stream, Stream};
use crate::synthdata::Dataset;

/// Growth parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct FitParams {
    /// A node is split only if it holds more than `nodesize` samples.
    pub nodesize: usize,
    /// Optional depth cap `k`.
    pub max_depth: Option<usize>,
    /// Candidate variables drawn per node; `None` means all `d`.
    pub mtry: Option<usize>,
    /// Seed of the per-node variable draws.
    pub seed: u64,
}

impl Default for FitParams {
    fn default() -> Self {
        FitParams {
            nodesize: 1,
            max_depth: None,
            mtry: None,
            seed: 0,
        }
    }
}

impl FitParams {
    pub fn resolved_mtry(&self, d: usize) -> Result<usize> {
        let m = self.mtry.unwrap_or(d);
        if m == 0 || m > d {
            return Err(Error::Parameter(format!(
                "mtry must be in 1..={d}, got {m}"
            )));
        }
        Ok(m)
    }

    fn validate(&self, d: usize) -> Result<usize> {
        if self.nodesize == 0 {
            return Err(Error::Parameter("nodesize must be >= 1".into()));
        }
        self.resolved_mtry(d)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeNode {
    pub cell: Cell,
    pub depth: usize,
    /// `N_n(A)`.
    pub n_samples: usize,
    /// Mean response of the node's samples.
    pub mean_y: f64,
    /// Positions of this node's samples in [`Tree::sample_order`].
    pub samples: Range<usize>,
    pub split: Option<Split>,
    /// Impurity decrease `L_{n,A}` of the chosen split (within-cell normalized).
    pub gain: Option<f64>,
    pub children: Option<(usize, usize)>,
}

impl TreeNode {
    pub fn is_leaf(&self) -> bool {
        self.split.is_none()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    nodes: Vec<TreeNode>,
    sample_order: Vec<u32>,
    params: FitParams,
    d: usize,
    source_n: usize,
}

impl Tree {
    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn root(&self) -> &TreeNode {
        &self.nodes[0]
    }

    pub fn params(&self) -> &FitParams {
        &self.params
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Number of training samples (size of the bootstrap multiset, if any).
    pub fn training_n(&self) -> usize {
        self.sample_order.len()
    }

    /// Number of rows of the dataset the tree was fitted on.
    pub fn source_n(&self) -> usize {
        self.source_n
    }

    /// Dataset rows (with multiplicity) used to grow the tree.
    pub fn training_rows(&self) -> &[u32] {
        &self.sample_order
    }

    /// Rows held by `node`.
    pub fn node_rows(&self, node: &TreeNode) -> &[u32] {
        &self.sample_order[node.samples.clone()]
    }

    pub fn depth(&self) -> usize {
        self.nodes.iter().map(|n| n.depth).max().unwrap_or(0)
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| n.is_leaf()).count()
    }

    pub fn leaves(&self) -> impl Iterator<Item = &TreeNode> {
        self.nodes.iter().filter(|n| n.is_leaf())
    }

    /// Index of the leaf containing `point`.
    pub fn leaf_index(&self, point: &[f64]) -> Result<usize> {
        if point.len() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got: point.len(),
            });
        }
        let mut i = 0;
        while let (Some(split), Some((l, r))) = (self.nodes[i].split, self.nodes[i].children) {
            i = if split.goes_left(point) { l } else { r };
        }
        Ok(i)
    }

    pub fn predict(&self, point: &[f64]) -> Result<f64> {
        Ok(self.nodes[self.leaf_index(point)?].mean_y)
    }

    /// Copy of the tree with every node below depth `k` removed.
    pub fn truncate(&self, k: usize) -> Tree {
        let keep = self.nodes.partition_point(|n| n.depth <= k);
        let mut nodes = self.nodes[..keep].to_vec();
        for n in nodes.iter_mut().filter(|n| n.depth == k) {
            n.split = None;
            n.gain = None;
            n.children = None;
        }
        let mut params = self.params.clone();
        params.max_depth = Some(params.max_depth.map_or(k, |m| m.min(k)));
        Tree {
            nodes,
            sample_order: self.sample_order.clone(),
            params,
            d: self.d,
            source_n: self.source_n,
        }
    }

    /// Nodes, splits and gains coincide (parameters and sample order within
    /// nodes are ignored).
    pub fn same_structure(&self, other: &Tree) -> bool {
        self.nodes == other.nodes
    }

    /// Line-oriented export, one node per line in breadth-first order:
    /// `depth dim z gain n mean`, with `-` in the split columns of leaves and
    /// 1-based variable indices.
    pub fn to_text(&self) -> String {
        let mut out = String::from("# depth dim z gain n mean\n");
        for node in &self.nodes {
            match (node.split, node.gain) {
                (Some(s), Some(g)) => writeln!(
                    out,
                    "{} {} {} {} {} {}",
                    node.depth,
                    s.dim + 1,
                    s.threshold,
                    g,
                    node.n_samples,
                    node.mean_y
                ),
                _ => writeln!(
                    out,
                    "{} - - - {} {}",
                    node.depth, node.n_samples, node.mean_y
                ),
            }
            .expect("writing to a String cannot fail");
        }
        out
    }
}

/// One parsed line of the text tree format.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeRecord {
    pub depth: usize,
    /// `(dim, threshold, gain)` with a 0-based `dim`.
    pub split: Option<(usize, f64, f64)>,
    /// `n` for empirical trees, `p_star` for theoretical ones.
    pub weight: f64,
    pub mean: f64,
    pub children: Option<(usize, usize)>,
}

/// Parse the text format written by [`Tree::to_text`] (and by theoretical
/// trees). Children are recovered from the breadth-first layout.
pub fn parse_tree_text(text: &str) -> Result<Vec<NodeRecord>> {
    let bad = |line: &str| Error::Parameter(format!("malformed tree line {line:?}"));
    let num = |s: &str, line: &str| s.parse::<f64>().map_err(|_| bad(line));
    let mut records = Vec::new();
    for line in text.lines().map(str::trim) {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 6 {
            return Err(bad(line));
        }
        let depth = f[0].parse::<usize>().map_err(|_| bad(line))?;
        let split = if f[1] == "-" {
            None
        } else {
            let dim = f[1].parse::<usize>().map_err(|_| bad(line))?;
            if dim == 0 {
                return Err(bad(line));
            }
            Some((dim - 1, num(f[2], line)?, num(f[3], line)?))
        };
        records.push(NodeRecord {
            depth,
            split,
            weight: num(f[4], line)?,
            mean: num(f[5], line)?,
            children: None,
        });
    }
    let mut next = 1;
    for i in 0..records.len() {
        if records[i].split.is_some() {
            if next + 1 >= records.len() {
                return Err(Error::Parameter(
                    "tree text ends before all children".into(),
                ));
            }
            records[i].children = Some((next, next + 1));
            next += 2;
        }
    }
    if next != records.len() {
        return Err(Error::Parameter("tree text has orphan nodes".into()));
    }
    Ok(records)
}

/// `L_{n,A}(j, z)` evaluated directly from its definition: the variance of
/// the responses in `indices` minus the size-weighted variances of the two
/// children. An empty child contributes zero.
pub fn empirical_criterion(
    dataset: &Dataset,
    indices: &[u32],
    cell: &Cell,
    split: &Split,
) -> Result<f64> {
    if indices.is_empty() {
        return Err(Error::EmptyCell);
    }
    if cell.dim() != dataset.d() {
        return Err(Error::DimensionMismatch {
            expected: dataset.d(),
            got: cell.dim(),
        });
    }
    cell.check_split(split)?;
    let y = dataset.y();
    let mean = |it: &mut dyn Iterator<Item = f64>| {
        let (s, c) = it.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
        if c == 0 {
            0.0
        } else {
            s / c as f64
        }
    };
    let all_mean = mean(&mut indices.iter().map(|&i| y[i as usize]));
    let left = |i: u32| split.goes_left(dataset.row(i as usize));
    let l_mean = mean(&mut indices.iter().filter(|&&i| left(i)).map(|&i| y[i as usize]));
    let r_mean = mean(
        &mut indices
            .iter()
            .filter(|&&i| !left(i))
            .map(|&i| y[i as usize]),
    );
    let n = indices.len() as f64;
    let (mut parent, mut children) = (0.0, 0.0);
    for &i in indices {
        let v = y[i as usize];
        parent += (v - all_mean) * (v - all_mean);
        let c = if left(i) { l_mean } else { r_mean };
        children += (v - c) * (v - c);
    }
    Ok(((parent - children) / n).max(0.0))
}

/// Best cut along one variable from `(x, y - mean)` pairs sorted by `x`.
/// Returns `(threshold, score)` where
/// `score = S_L^2 / n_L + S_R^2 / n_R` and `S` are centered response sums.
fn scan_sorted(pairs: &[(f64, f64)], total: f64) -> Option<(f64, f64)> {
    let n = pairs.len();
    let mut best: Option<(f64, f64)> = None;
    let mut s_left = 0.0;
    for k in 0..n.saturating_sub(1) {
        s_left += pairs[k].1;
        let (x0, x1) = (pairs[k].0, pairs[k + 1].0);
        if x1 <= x0 {
            continue;
        }
        let n_left = (k + 1) as f64;
        let n_right = (n - k - 1) as f64;
        let s_right = total - s_left;
        let score = s_left * s_left / n_left + s_right * s_right / n_right;
        if best.is_none_or(|(_, b)| score > b) {
            let mut z = 0.5 * (x0 + x1);
            if z <= x0 {
                z = x1;
            }
            best = Some((z, score));
        }
    }
    best
}

/// Turn a split score into a gain, clamping rounding noise at zero.
fn gain_from_score(score: f64, total: f64, n: f64, node_var: f64) -> Result<f64> {
    let gain = (score - total * total / n) / n;
    if gain < 0.0 {
        if -gain > 1e-9 * node_var.max(f64::MIN_POSITIVE) && -gain > 1e-300 {
            return Err(Error::Internal(format!(
                "negative split gain {gain:e} exceeds rounding slack (node variance {node_var:e})"
            )));
        }
        return Ok(0.0);
    }
    Ok(gain)
}

struct NodeStats {
    mean: f64,
    total: f64,
    var: f64,
}

fn node_stats(y: &[f64], rows: impl Iterator<Item = u32> + Clone) -> NodeStats {
    let (s, c) = rows
        .clone()
        .fold((0.0, 0usize), |(s, c), i| (s + y[i as usize], c + 1));
    let mean = s / c as f64;
    let (total, ss) = rows.fold((0.0, 0.0), |(t, q), i| {
        let v = y[i as usize] - mean;
        (t + v, q + v * v)
    });
    NodeStats {
        mean,
        total,
        var: ss / c as f64,
    }
}

/// Exhaustive best split over `candidate_dims` (0-based).
///
/// Returns `None` when no candidate variable takes two distinct values in the
/// node or when the best gain is zero.
pub fn best_split(
    dataset: &Dataset,
    indices: &[u32],
    candidate_dims: &[usize],
) -> Result<Option<(Split, f64)>> {
    if indices.is_empty() {
        return Err(Error::EmptyCell);
    }
    if let Some(&j) = candidate_dims.iter().find(|&&j| j >= dataset.d()) {
        return Err(Error::DimensionMismatch {
            expected: dataset.d(),
            got: j + 1,
        });
    }
    let y = dataset.y();
    let stats = node_stats(y, indices.iter().copied());
    let mut dims = candidate_dims.to_vec();
    dims.sort_unstable();
    dims.dedup();
    let mut pairs = Vec::with_capacity(indices.len());
    let mut best: Option<(Split, f64)> = None;
    for j in dims {
        pairs.clear();
        pairs.extend(
            indices
                .iter()
                .map(|&i| (dataset.x(i as usize, j), y[i as usize] - stats.mean)),
        );
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        if let Some((z, score)) = scan_sorted(&pairs, stats.total) {
            if best.is_none_or(|(_, b)| score > b) {
                best = Some((Split::new(j, z), score));
            }
        }
    }
    finish_best(best, stats.total, indices.len(), stats.var)
}

fn finish_best(
    best: Option<(Split, f64)>,
    total: f64,
    n: usize,
    var: f64,
) -> Result<Option<(Split, f64)>> {
    match best {
        Some((split, score)) => {
            let gain = gain_from_score(score, total, n as f64, var)?;
            Ok((gain > 0.0).then_some((split, gain)))
        }
        None => Ok(None),
    }
}

/// Grow a tree on every row of `dataset`.
pub fn fit_tree(dataset: &Dataset, params: &FitParams) -> Result<Tree> {
    let rows: Vec<u32> = (0..dataset.n() as u32).collect();
    fit_tree_on(dataset, rows, params)
}

/// Grow a tree on the multiset `rows` of dataset rows (e.g. a bootstrap draw).
pub fn fit_tree_on(dataset: &Dataset, rows: Vec<u32>, params: &FitParams) -> Result<Tree> {
    let d = dataset.d();
    let mtry = params.validate(d)?;
    if rows.is_empty() {
        return Err(Error::EmptyCell);
    }
    if let Some(&bad) = rows.iter().find(|&&r| r as usize >= dataset.n()) {
        return Err(Error::Mismatch(format!(
            "row {bad} outside dataset of {}",
            dataset.n()
        )));
    }
    let m = rows.len();
    let y = dataset.y();

    // Per-variable orderings of sample slots; each node owns the same
    // contiguous range in every ordering.
    let mut sorted: Vec<Vec<u32>> = (0..d)
        .map(|j| {
            let mut s: Vec<u32> = (0..m as u32).collect();
            s.sort_by(|&a, &b| {
                dataset
                    .x(rows[a as usize] as usize, j)
                    .total_cmp(&dataset.x(rows[b as usize] as usize, j))
            });
            s
        })
        .collect();
    let mut goes_left = vec![false; m];
    let mut scratch: Vec<u32> = Vec::with_capacity(m);
    let mut pairs: Vec<(f64, f64)> = Vec::with_capacity(m);

    let root_stats = node_stats(y, rows.iter().copied());
    let mut nodes = vec![TreeNode {
        cell: Cell::unit(d),
        depth: 0,
        n_samples: m,
        mean_y: root_stats.mean,
        samples: 0..m,
        split: None,
        gain: None,
        children: None,
    }];
    let mut queue = VecDeque::from([0usize]);

    while let Some(id) = queue.pop_front() {
        let (range, depth) = (nodes[id].samples.clone(), nodes[id].depth);
        if range.len() <= params.nodesize || params.max_depth.is_some_and(|k| depth >= k) {
            continue;
        }
        let slot_rows = sorted[0][range.clone()].iter().map(|&s| rows[s as usize]);
        let stats = node_stats(y, slot_rows);

        let candidates: Vec<usize> = if mtry == d {
            (0..d).collect()
        } else {
            let mut rng = stream(params.seed, Stream::Mtry, id as u64);
            let mut c = sample_indices(&mut rng, d, mtry).into_vec();
            c.sort_unstable();
            c
        };

        let mut best: Option<(Split, f64)> = None;
        for &j in &candidates {
            pairs.clear();
            pairs.extend(sorted[j][range.clone()].iter().map(|&s| {
                let r = rows[s as usize] as usize;
                (dataset.x(r, j), y[r] - stats.mean)
            }));
            if let Some((z, score)) = scan_sorted(&pairs, stats.total) {
                if best.is_none_or(|(_, b)| score > b) {
                    best = Some((Split::new(j, z), score));
                }
            }
        }
        let Some((split, gain)) = finish_best(best, stats.total, range.len(), stats.var)? else {
            continue;
        };

        for &s in &sorted[0][range.clone()] {
            goes_left[s as usize] =
                dataset.x(rows[s as usize] as usize, split.dim) < split.threshold;
        }
        let mut n_left = 0;
        for order in sorted.iter_mut() {
            scratch.clear();
            let seg = &mut order[range.clone()];
            let mut w = 0;
            for k in 0..seg.len() {
                let s = seg[k];
                if goes_left[s as usize] {
                    seg[w] = s;
                    w += 1;
                } else {
                    scratch.push(s);
                }
            }
            seg[w..].copy_from_slice(&scratch);
            n_left = w;
        }
        let mid = range.start + n_left;
        let (lcell, rcell) = nodes[id].cell.split(&split)?;
        let child = |cell: Cell, r: Range<usize>| {
            let st = node_stats(y, sorted[0][r.clone()].iter().map(|&s| rows[s as usize]));
            TreeNode {
                cell,
                depth: depth + 1,
                n_samples: r.len(),
                mean_y: st.mean,
                samples: r,
                split: None,
                gain: None,
                children: None,
            }
        };
        let left = child(lcell, range.start..mid);
        let right = child(rcell, mid..range.end);
        let (li, ri) = (nodes.len(), nodes.len() + 1);
        nodes.push(left);
        nodes.push(right);
        let node = &mut nodes[id];
        node.split = Some(split);
        node.gain = Some(gain);
        node.children = Some((li, ri));
        queue.push_back(li);
        queue.push_back(ri);
    }

    let sample_order = sorted[0].iter().map(|&s| rows[s as usize]).collect();
    Ok(Tree {
        nodes,
        sample_order,
        params: params.clone(),
        d,
        source_n: dataset.n(),
    })
}

/// Free-function form of [`Tree::truncate`].
pub fn truncate(tree: &Tree, k: usize) -> Tree {
    tree.truncate(k)
}

/// Free-function form of [`Tree::predict`].
pub fn predict(tree: &Tree, point: &[f64]) -> Result<f64> {
    tree.predict(point)
}
