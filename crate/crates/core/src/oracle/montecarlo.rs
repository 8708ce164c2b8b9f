//! Monte Carlo estimate of the population criterion, independent of the
//! closed forms.
//!
//! Draws `X | X ∈ A` by rejection from the model's input law and evaluates
//! the noiseless criterion `p_L p_R (μ_L − μ_R)²`. Draws are split into
//! groups with their own streams; the groups drive a delete-one jackknife
//! that yields a bias-corrected estimate and its standard error.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::Cell;
use crate::rng::{stream, Stream};
use crate::synthdata::{ModelKind, ModelSpec};

pub const MIN_DRAWS: usize = 10_000;
const GROUPS: usize = 50;
const MIN_ACCEPTANCE: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub acceptance_rate: f64,
}

#[derive(Debug, Clone, Copy, Default)]
struct Sums {
    n_left: f64,
    s_left: f64,
    n_right: f64,
    s_right: f64,
    proposals: u64,
}

impl Sums {
    fn add(self, o: Sums) -> Sums {
        Sums {
            n_left: self.n_left + o.n_left,
            s_left: self.s_left + o.s_left,
            n_right: self.n_right + o.n_right,
            s_right: self.s_right + o.s_right,
            proposals: self.proposals + o.proposals,
        }
    }

    fn sub(self, o: Sums) -> Sums {
        Sums {
            n_left: self.n_left - o.n_left,
            s_left: self.s_left - o.s_left,
            n_right: self.n_right - o.n_right,
            s_right: self.s_right - o.s_right,
            proposals: self.proposals - o.proposals,
        }
    }

    fn criterion(&self) -> f64 {
        let n = self.n_left + self.n_right;
        if self.n_left == 0.0 || self.n_right == 0.0 {
            return 0.0;
        }
        let diff = self.s_left / self.n_left - self.s_right / self.n_right;
        (self.n_left / n) * (self.n_right / n) * diff * diff
    }
}

/// Proposal law for `X | X ∈ A`.
enum Proposal {
    /// Uniform on the cell; every draw is accepted.
    Uniform,
    /// Uniform on the diagonal squares meeting the cell's first side, then
    /// `x_3` uniform on the cell's third side; draws outside the cell are
    /// rejected.
    Blocks { first: u64, count: u64, width: f64 },
}

fn proposal(spec: &ModelSpec, cell: &Cell) -> Proposal {
    match spec.kind {
        ModelKind::Correlated { beta, .. } => {
            let r = (1u64 << beta) as f64;
            let (a, b) = cell.side(0);
            let first = ((a * r).floor() as u64).min((1u64 << beta) - 1);
            let last = (((b * r).ceil() as u64).max(first + 1) - 1).min((1u64 << beta) - 1);
            Proposal::Blocks {
                first,
                count: last - first + 1,
                width: 1.0 / r,
            }
        }
        _ => Proposal::Uniform,
    }
}

#[allow(clippy::too_many_arguments)]
fn run_group(
    spec: &ModelSpec,
    cell: &Cell,
    prop: &Proposal,
    dim: usize,
    s: f64,
    quota: usize,
    seed: u64,
    group: usize,
) -> Result<Sums> {
    let mut rng = stream(seed, Stream::MonteCarlo, group as u64);
    let d = cell.dim();
    let mut x = vec![0.0; d];
    let mut acc = Sums::default();
    let mut accepted = 0usize;
    while accepted < quota {
        acc.proposals += 1;
        match prop {
            Proposal::Uniform => {
                for (j, xj) in x.iter_mut().enumerate() {
                    let (a, b) = cell.side(j);
                    *xj = a + (b - a) * rng.random::<f64>();
                }
            }
            Proposal::Blocks {
                first,
                count,
                width,
            } => {
                let k = first + rng.random_range(0..*count);
                let base = k as f64 * width;
                x[0] = base + width * rng.random::<f64>();
                x[1] = base + width * rng.random::<f64>();
                let (a, b) = cell.side(2);
                x[2] = a + (b - a) * rng.random::<f64>();
                if !cell.contains_unchecked(&x) {
                    if acc.proposals >= 100_000
                        && (accepted as f64) < MIN_ACCEPTANCE * acc.proposals as f64
                    {
                        return Err(Error::InfeasibleCell {
                            rate: accepted as f64 / acc.proposals as f64,
                        });
                    }
                    continue;
                }
            }
        }
        accepted += 1;
        let m = spec.regression(&x);
        if x[dim] < s {
            acc.n_left += 1.0;
            acc.s_left += m;
        } else {
            acc.n_right += 1.0;
            acc.s_right += m;
        }
    }
    Ok(acc)
}

/// Estimate `L*_A(j, s)` from `n_draws` conditional draws. Noise is ignored:
/// it does not change the criterion.
pub fn mc_criterion(
    spec: &ModelSpec,
    cell: &Cell,
    j: usize,
    s: f64,
    n_draws: usize,
    seed: u64,
) -> Result<McEstimate> {
    spec.validate()?;
    if cell.dim() != spec.d() {
        return Err(Error::DimensionMismatch {
            expected: spec.d(),
            got: cell.dim(),
        });
    }
    if n_draws < MIN_DRAWS {
        return Err(Error::Parameter(format!(
            "need at least {MIN_DRAWS} draws, got {n_draws}"
        )));
    }
    cell.check_split(&crate::geometry::Split::new(j, s))?;
    let prop = proposal(spec, cell);
    let groups: Vec<Sums> = (0..GROUPS)
        .into_par_iter()
        .map(|g| {
            let quota = n_draws / GROUPS + usize::from(g < n_draws % GROUPS);
            run_group(spec, cell, &prop, j, s, quota, seed, g)
        })
        .collect::<Result<_>>()?;
    let total = groups.iter().fold(Sums::default(), |a, &g| a.add(g));
    let full = total.criterion();
    let leave_out: Vec<f64> = groups.iter().map(|&g| total.sub(g).criterion()).collect();
    let k = GROUPS as f64;
    let mean_lo = leave_out.iter().sum::<f64>() / k;
    let var = leave_out.iter().map(|v| (v - mean_lo).powi(2)).sum::<f64>() * (k - 1.0) / k;
    Ok(McEstimate {
        value: k * full - (k - 1.0) * mean_lo,
        std_error: var.sqrt(),
        acceptance_rate: (total.n_left + total.n_right) / total.proposals as f64,
    })
}
