//! Certification that the root criterion of the correlated model peaks at
//! `s = 1/2`.
//!
//! `|∂L*(1, s)/∂s| ≤ 6 + 12·4^β`, so on a grid of pitch
//! `ε = (1/4 − m_β)/(6 + 12·4^β)` with `m_β = L*(1, 1/2 − 2^{−β})`, grid
//! values below `m_β` outside `[1/2 − 2^{−β}, 1/2 + 2^{−β}]` bound the
//! criterion there strictly below `1/4 = L*(1, 1/2)`.

use crate::error::{Error, Result};

use super::closed_form::{correlated_root_criterion, MAX_CERTIFIED_BETA};

const EDGE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct GridReport {
    pub beta: u32,
    pub pitch: f64,
    pub lipschitz: f64,
    /// `m_β`; `None` when the central interval covers `[0, 1]`.
    pub threshold: Option<f64>,
    pub n_points: usize,
    /// Largest grid value outside the central interval and where it occurs.
    pub max_outside: Option<(f64, f64)>,
    /// Grid points outside the central interval whose value reaches `m_β`.
    pub offending: Vec<f64>,
    /// Criterion non-decreasing on grid points of `[1/2 − 2^{−β}, 1/2]` and
    /// non-increasing on `[1/2, 1/2 + 2^{−β}]`.
    pub central_unimodal: bool,
    pub argmax: f64,
    pub max_value: f64,
    pub certified: bool,
}

/// Evaluate the root criterion on the certification grid.
pub fn grid_verify_center_split(beta: u32) -> Result<GridReport> {
    if beta > MAX_CERTIFIED_BETA {
        return Err(Error::Parameter(format!(
            "grid certification is limited to beta <= {MAX_CERTIFIED_BETA}, got {beta}"
        )));
    }
    let f = |s: f64| correlated_root_criterion(beta, s);
    let center = f(0.5);
    let lipschitz = 6.0 + 12.0 * 4f64.powi(beta as i32);
    let radius = 0.5f64.powi(beta as i32);
    let (lo, hi) = (0.5 - radius, 0.5 + radius);

    // For β = 0 the interval is empty on the left of 0 and the argument is
    // vacuous; for β = 1 it covers the whole unit interval.
    let threshold = (lo > 0.0).then(|| f(lo));
    let m = threshold.unwrap_or(0.0);
    let pitch = if center > m {
        (center - m) / lipschitz
    } else {
        1.0 / lipschitz
    };
    let steps = (1.0 / pitch).ceil() as usize;

    let mut max_outside: Option<(f64, f64)> = None;
    let mut offending = Vec::new();
    let (mut argmax, mut max_value) = (0.0, f64::NEG_INFINITY);
    let mut central_unimodal = true;
    let mut prev_central: Option<(f64, f64)> = None;
    for i in 0..=steps {
        let s = (i as f64 * pitch).min(1.0);
        let v = f(s);
        if v > max_value {
            max_value = v;
            argmax = s;
        }
        // i·pitch can land an ulp past an endpoint that is itself a grid point
        if s < lo - EDGE || s > hi + EDGE {
            if max_outside.is_none_or(|(_, b)| v > b) {
                max_outside = Some((s, v));
            }
            if threshold.is_some_and(|t| v >= t) {
                offending.push(s);
            }
        } else {
            if let Some((ps, pv)) = prev_central {
                let rising = ps < 0.5;
                let falling = s > 0.5;
                if (rising && s <= 0.5 && v < pv) || (falling && ps >= 0.5 && v > pv) {
                    central_unimodal = false;
                }
            }
            prev_central = Some((s, v));
        }
    }
    // the grid need not contain 1/2 itself
    if center >= max_value {
        max_value = center;
        argmax = 0.5;
    }
    Ok(GridReport {
        beta,
        pitch,
        lipschitz,
        threshold,
        n_points: steps + 1,
        max_outside,
        certified: offending.is_empty() && central_unimodal && argmax == 0.5,
        offending,
        central_unimodal,
        argmax,
        max_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_betas() {
        let r0 = grid_verify_center_split(0).unwrap();
        assert!(r0.certified);
        assert_eq!(r0.threshold, None);
        assert_eq!(r0.max_value, 1.0 / 16.0);
        let r1 = grid_verify_center_split(1).unwrap();
        assert!(r1.certified);
        assert_eq!(r1.max_value, 0.25);
        assert!(r1.max_outside.is_none());
    }

    #[test]
    fn beta_three_is_certified() {
        let r = grid_verify_center_split(3).unwrap();
        assert!(r.certified, "{r:?}");
        assert!(r.max_outside.unwrap().1 < r.threshold.unwrap());
    }

    #[test]
    fn all_certified_betas() {
        for beta in 0..=MAX_CERTIFIED_BETA {
            assert!(
                grid_verify_center_split(beta).unwrap().certified,
                "beta {beta}"
            );
        }
    }

    #[test]
    fn beta_six_is_refused() {
        assert!(grid_verify_center_split(6).is_err());
    }
}
