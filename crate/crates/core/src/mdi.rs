//! Mean Decrease Impurity of fitted trees and the exact decomposition
//! `V̂[Y] = Σ_j MDI_j + R_n` that ties it to the training risk.

use std::io::Write;

use crate::cart::{empirical_criterion, Tree};
use crate::error::{Error, Result};
use crate::synthdata::Dataset;

#[derive(Debug, Clone, PartialEq)]
pub struct MdiReport {
    /// Importance of each variable, indexed 0-based (reported 1-based).
    pub per_variable: Vec<f64>,
    pub total_mdi: f64,
    /// Biased (1/n) variance of the training responses.
    pub empirical_variance_y: f64,
    /// Mean squared training residual.
    pub risk: f64,
    pub r_squared: f64,
    /// `V̂[Y] - total_mdi - risk`; zero up to rounding.
    pub identity_residual: f64,
}

impl MdiReport {
    fn assemble(per_variable: Vec<f64>, vary: f64, risk: f64) -> Self {
        let total_mdi: f64 = per_variable.iter().sum();
        let r_squared = if vary > 0.0 { total_mdi / vary } else { 0.0 };
        MdiReport {
            per_variable,
            total_mdi,
            empirical_variance_y: vary,
            risk,
            r_squared,
            identity_residual: vary - total_mdi - risk,
        }
    }

    pub fn d(&self) -> usize {
        self.per_variable.len()
    }

    /// Element-wise mean of several reports over the same variables.
    pub fn average(reports: &[MdiReport]) -> Result<MdiReport> {
        let first = reports
            .first()
            .ok_or_else(|| Error::Parameter("cannot average zero reports".into()))?;
        let d = first.d();
        if let Some(r) = reports.iter().find(|r| r.d() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: r.d(),
            });
        }
        let m = reports.len() as f64;
        let mean = |f: &dyn Fn(&MdiReport) -> f64| reports.iter().map(f).sum::<f64>() / m;
        let per_variable = (0..d)
            .map(|j| mean(&|r: &MdiReport| r.per_variable[j]))
            .collect::<Vec<_>>();
        Ok(MdiReport {
            total_mdi: per_variable.iter().sum(),
            per_variable,
            empirical_variance_y: mean(&|r| r.empirical_variance_y),
            risk: mean(&|r| r.risk),
            r_squared: mean(&|r| r.r_squared),
            identity_residual: mean(&|r| r.identity_residual),
        })
    }

    /// `variable,importance` rows followed by the footer rows `__risk__`,
    /// `__total__`, `__vary__` and `__residual__`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["variable", "importance"])?;
        self.write_rows(&mut out, None)?;
        out.flush()?;
        Ok(())
    }

    fn write_rows<W: Write>(&self, out: &mut csv::Writer<W>, tree: Option<&str>) -> Result<()> {
        let mut row = |name: String, v: f64| -> Result<()> {
            match tree {
                Some(t) => out.write_record([t.to_string(), name, v.to_string()])?,
                None => out.write_record([name, v.to_string()])?,
            }
            Ok(())
        };
        for (j, v) in self.per_variable.iter().enumerate() {
            row((j + 1).to_string(), *v)?;
        }
        row("__risk__".into(), self.risk)?;
        row("__total__".into(), self.total_mdi)?;
        row("__vary__".into(), self.empirical_variance_y)?;
        row("__residual__".into(), self.identity_residual)?;
        Ok(())
    }
}

/// CSV with a leading `tree` column: one block per tree, then the average
/// labelled `mean`.
pub fn write_forest_mdi_csv<W: Write>(per_tree: &[MdiReport], w: W) -> Result<()> {
    let avg = MdiReport::average(per_tree)?;
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["tree", "variable", "importance"])?;
    for (t, r) in per_tree.iter().enumerate() {
        r.write_rows(&mut out, Some(&t.to_string()))?;
    }
    avg.write_rows(&mut out, Some("mean"))?;
    out.flush()?;
    Ok(())
}

fn check_pairing(tree: &Tree, dataset: &Dataset) -> Result<()> {
    if tree.d() != dataset.d() {
        return Err(Error::DimensionMismatch {
            expected: tree.d(),
            got: dataset.d(),
        });
    }
    if tree.source_n() != dataset.n() {
        return Err(Error::Mismatch(format!(
            "tree was fitted on {} rows, dataset has {}",
            tree.source_n(),
            dataset.n()
        )));
    }
    Ok(())
}

fn training_variance(tree: &Tree, dataset: &Dataset) -> f64 {
    let y = dataset.y();
    let rows = tree.training_rows();
    let m = rows.len() as f64;
    let mean = rows.iter().map(|&i| y[i as usize]).sum::<f64>() / m;
    rows.iter()
        .map(|&i| (y[i as usize] - mean).powi(2))
        .sum::<f64>()
        / m
}

/// Mean squared residual of the tree's predictions over its training sample
/// (with multiplicity for bootstrap samples).
pub fn empirical_risk(tree: &Tree, dataset: &Dataset) -> Result<f64> {
    check_pairing(tree, dataset)?;
    let y = dataset.y();
    let rows = tree.training_rows();
    let mut s = 0.0;
    for &i in rows {
        let r = y[i as usize] - tree.predict(dataset.row(i as usize))?;
        s += r * r;
    }
    Ok(s / rows.len() as f64)
}

/// Mean squared residual on an arbitrary dataset (e.g. a held-out sample).
pub fn prediction_mse(tree: &Tree, dataset: &Dataset) -> Result<f64> {
    let mut s = 0.0;
    for i in 0..dataset.n() {
        let r = dataset.y()[i] - tree.predict(dataset.row(i))?;
        s += r * r;
    }
    Ok(s / dataset.n() as f64)
}

/// `MDI_j = Σ_{A split on j} (N_n(A)/n) · L_{n,A}` using the gains stored at
/// fit time.
pub fn empirical_mdi(tree: &Tree, dataset: &Dataset) -> Result<MdiReport> {
    check_pairing(tree, dataset)?;
    let n = tree.training_n() as f64;
    let mut per_variable = vec![0.0; tree.d()];
    for node in tree.nodes() {
        if let (Some(s), Some(g)) = (node.split, node.gain) {
            per_variable[s.dim] += node.n_samples as f64 / n * g;
        }
    }
    Ok(MdiReport::assemble(
        per_variable,
        training_variance(tree, dataset),
        empirical_risk(tree, dataset)?,
    ))
}

/// Same report with every gain re-evaluated from the criterion's definition
/// on the node's samples. Used to cross-check the stored gains.
pub fn empirical_mdi_recomputed(tree: &Tree, dataset: &Dataset) -> Result<MdiReport> {
    check_pairing(tree, dataset)?;
    let n = tree.training_n() as f64;
    let mut per_variable = vec![0.0; tree.d()];
    for node in tree.nodes() {
        if let Some(s) = node.split {
            let g = empirical_criterion(dataset, tree.node_rows(node), &node.cell, &s)?;
            per_variable[s.dim] += node.n_samples as f64 / n * g;
        }
    }
    Ok(MdiReport::assemble(
        per_variable,
        training_variance(tree, dataset),
        empirical_risk(tree, dataset)?,
    ))
}

/// `(Σ_{j∈group} MDI_j, Σ_{j∉group} MDI_j)` for a 1-based index set.
pub fn group_mdi(report: &MdiReport, group: &[usize]) -> Result<(f64, f64)> {
    let d = report.d();
    let mut inside = vec![false; d];
    for &g in group {
        if g == 0 || g > d {
            return Err(Error::Parameter(format!("variable {g} outside 1..={d}")));
        }
        inside[g - 1] = true;
    }
    let (mut a, mut b) = (0.0, 0.0);
    for (j, v) in report.per_variable.iter().enumerate() {
        if inside[j] {
            a += v;
        } else {
            b += v;
        }
    }
    Ok((a, b))
}
