//! Exact population split criteria, cell masses and conditional moments.
//!
//! All three criteria come from `L = p_L μ_L² + p_R μ_R² − μ²` evaluated on
//! the conditional law of `X` given the cell.

use std::fmt;

use crate::error::{Error, Result};
use crate::geometry::Cell;
use crate::synthdata::{ModelKind, ModelSpec};

use super::scalar::{is_power_of_two, pow2, Scalar};

/// Largest block exponent for which the center split is certified.
pub const MAX_CERTIFIED_BETA: u32 = 5;

/// Regression functions with closed-form population criteria.
#[derive(Debug, Clone, PartialEq)]
pub enum PopulationModel {
    /// `m(x) = Σ α_j x_j` on the uniform cube.
    Linear { alphas: Vec<f64> },
    /// `m(x) = 2^d α Π x_j` on the uniform cube.
    Multiplicative { alpha: f64, d: usize },
    /// `m(x) = x_1 + x_2 + α x_3`, `(x_1, x_2)` uniform on `2^β` diagonal
    /// squares, `x_3` uniform and independent.
    Correlated { beta: u32, alpha: f64 },
}

impl fmt::Display for PopulationModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PopulationModel::Linear { alphas } => write!(f, "linear(alpha={alphas:?})"),
            PopulationModel::Multiplicative { alpha, d } => {
                write!(f, "multiplicative(alpha={alpha}, d={d})")
            }
            PopulationModel::Correlated { beta, alpha } => {
                write!(f, "correlated(beta={beta}, alpha={alpha})")
            }
        }
    }
}

/// Bounds of a cell in a chosen number type.
#[derive(Debug, Clone, PartialEq)]
pub struct Rect<S> {
    pub lower: Vec<S>,
    pub upper: Vec<S>,
}

impl<S: Scalar> Rect<S> {
    pub fn from_cell(cell: &Cell) -> Self {
        Rect {
            lower: cell.lower().iter().map(|&v| S::from_f64(v)).collect(),
            upper: cell.upper().iter().map(|&v| S::from_f64(v)).collect(),
        }
    }

    pub fn unit(d: usize) -> Self {
        Rect {
            lower: vec![S::zero(); d],
            upper: vec![S::one(); d],
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn width(&self, j: usize) -> S {
        self.upper[j].clone() - self.lower[j].clone()
    }

    pub fn mid(&self, j: usize) -> S {
        (self.lower[j].clone() + self.upper[j].clone()) / S::from_int(2)
    }

    pub fn to_cell(&self) -> Result<Cell> {
        Cell::new(
            self.lower.iter().map(Scalar::to_f64).collect(),
            self.upper.iter().map(Scalar::to_f64).collect(),
        )
    }

    /// `(A_L, A_R)` for a cut along `j` at `z`.
    pub fn split(&self, j: usize, z: &S) -> (Rect<S>, Rect<S>) {
        let mut l = self.clone();
        let mut r = self.clone();
        l.upper[j] = z.clone();
        r.lower[j] = z.clone();
        (l, r)
    }
}

/// `(α²/4)(s − a)(b − s)` inside `(a, b)`, zero outside.
pub fn linear_gain<S: Scalar>(a: &S, b: &S, alpha: &S, s: &S) -> S {
    if s <= a || s >= b {
        return S::zero();
    }
    alpha.sq() / S::from_int(4) * (s.clone() - a.clone()) * (b.clone() - s.clone())
}

/// Criterion of a cut at `u` along the first coordinate for `x_1 + x_2`,
/// with `(x_1, x_2)` uniform on `r` equal squares along the diagonal of the
/// unit square. With `ℓ = ⌊r u⌋`,
/// `μ_L = u/2 + (2ℓ+1)/(2r) − (ℓ²+ℓ)/(2r²u)` and `μ_R = (1 − u μ_L)/(1 − u)`.
pub fn block_gain<S: Scalar>(r: i64, u: &S) -> S {
    let (zero, one) = (S::zero(), S::one());
    if *u <= zero || *u >= one {
        return zero;
    }
    let two = S::from_int(2);
    let rr = S::from_int(r);
    let l = S::from_int((u.clone() * rr.clone()).floor_int());
    let mu_l = u.clone() / two.clone()
        + (two.clone() * l.clone() + one.clone()) / (two.clone() * rr.clone())
        - (l.sq() + l) / (two * rr.sq() * u.clone());
    let mu_r = (one.clone() - u.clone() * mu_l.clone()) / (one.clone() - u.clone());
    let v = u.clone() * mu_l.sq() + (one.clone() - u.clone()) * mu_r.sq() - one;
    S::max_of(v, zero)
}

/// Root criterion `L*(1, s)` of the correlated model (`2^β` blocks).
pub fn correlated_root_criterion(beta: u32, s: f64) -> f64 {
    block_gain(1i64 << beta, &s)
}

/// Effective support of `(x_1, x_2)` inside a cell of the correlated model.
#[derive(Debug, Clone, PartialEq)]
pub enum CorrelatedSupport<S> {
    /// `r` consecutive whole diagonal squares spanning `[c, c + w]²`.
    Blocks { c: S, w: S, r: i64 },
    /// Part of a single square: uniform on `[lo_1, hi_1] × [lo_2, hi_2]`.
    Rect { lo: [S; 2], hi: [S; 2] },
}

/// Classify a cell of the correlated model. Cells cutting several squares
/// without covering them whole fall outside the closed form.
pub fn correlated_support<S: Scalar>(beta: u32, rect: &Rect<S>) -> Result<CorrelatedSupport<S>> {
    if rect.dim() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            got: rect.dim(),
        });
    }
    let big_r: S = pow2(beta);
    // squares [i/R, (i+1)/R]² meeting side j with positive length
    let first = |j: usize| (rect.lower[j].clone() * big_r.clone()).floor_int();
    let last = |j: usize| -(-(rect.upper[j].clone() * big_r.clone())).floor_int() - 1;
    let i0 = first(0).max(first(1));
    let i1 = last(0).min(last(1));
    if i0 > i1 {
        return Err(Error::EmptyCell);
    }
    let edge = |i: i64| S::from_int(i) / big_r.clone();
    if i0 == i1 {
        let (bl, bu) = (edge(i0), edge(i0 + 1));
        let lo = [0, 1].map(|j| S::max_of(rect.lower[j].clone(), bl.clone()));
        let hi = [0, 1].map(|j| S::min_of(rect.upper[j].clone(), bu.clone()));
        return Ok(CorrelatedSupport::Rect { lo, hi });
    }
    let (c, e) = (edge(i0), edge(i1 + 1));
    let whole = (0..2).all(|j| rect.lower[j] <= c && rect.upper[j] >= e);
    if !whole {
        return Err(Error::UnsupportedCell(format!(
            "cell cuts diagonal squares {i0}..={i1} without covering them"
        )));
    }
    Ok(CorrelatedSupport::Blocks {
        w: e - c.clone(),
        c,
        r: i1 - i0 + 1,
    })
}

impl PopulationModel {
    pub fn from_spec(spec: &ModelSpec) -> Result<Self> {
        spec.validate()?;
        Ok(match &spec.kind {
            ModelKind::Linear { alphas } => PopulationModel::Linear {
                alphas: alphas.clone(),
            },
            ModelKind::Multiplicative { alpha, d } => PopulationModel::Multiplicative {
                alpha: *alpha,
                d: *d,
            },
            ModelKind::Correlated { beta, alpha } => PopulationModel::Correlated {
                beta: *beta,
                alpha: *alpha,
            },
            ModelKind::Additive { .. } => {
                return Err(Error::UnsupportedModel(
                    "additive models have no closed-form criterion".into(),
                ))
            }
        })
    }

    /// Noiseless generative spec with the same regression function.
    pub fn to_spec(&self) -> Result<ModelSpec> {
        match self {
            PopulationModel::Linear { alphas } => ModelSpec::linear(alphas.clone(), 0.0),
            PopulationModel::Multiplicative { alpha, d } => {
                ModelSpec::multiplicative(*alpha, *d, 0.0)
            }
            PopulationModel::Correlated { beta, alpha } => {
                ModelSpec::correlated(*beta, *alpha, 0.0)
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.to_spec().map(|_| ())
    }

    pub fn d(&self) -> usize {
        match self {
            PopulationModel::Linear { alphas } => alphas.len(),
            PopulationModel::Multiplicative { d, .. } => *d,
            PopulationModel::Correlated { .. } => 3,
        }
    }

    fn check_rect<S: Scalar>(&self, rect: &Rect<S>) -> Result<()> {
        if rect.dim() != self.d() || rect.upper.len() != self.d() {
            return Err(Error::DimensionMismatch {
                expected: self.d(),
                got: rect.dim(),
            });
        }
        Ok(())
    }

    fn check_cut<S: Scalar>(&self, rect: &Rect<S>, j: usize, s: &S) -> Result<()> {
        self.check_rect(rect)?;
        if j >= self.d() {
            return Err(Error::DimensionMismatch {
                expected: self.d(),
                got: j + 1,
            });
        }
        if !(*s > rect.lower[j] && *s < rect.upper[j]) {
            return Err(Error::InvalidSplit {
                dim: j + 1,
                threshold: s.to_f64(),
                lower: rect.lower[j].to_f64(),
                upper: rect.upper[j].to_f64(),
            });
        }
        Ok(())
    }

    /// `Π_{ℓ≠j} (a_ℓ + b_ℓ)²`.
    fn product_others<S: Scalar>(rect: &Rect<S>, j: usize) -> S {
        (0..rect.dim())
            .filter(|&l| l != j)
            .fold(S::one(), |acc, l| {
                acc * (rect.lower[l].clone() + rect.upper[l].clone()).sq()
            })
    }

    /// Population criterion `L*_A(j, s)`.
    pub fn criterion<S: Scalar>(&self, rect: &Rect<S>, j: usize, s: &S) -> Result<S> {
        self.check_cut(rect, j, s)?;
        let (a, b) = (&rect.lower[j], &rect.upper[j]);
        Ok(match self {
            PopulationModel::Linear { alphas } => linear_gain(a, b, &S::from_f64(alphas[j]), s),
            PopulationModel::Multiplicative { alpha, .. } => {
                linear_gain(a, b, &(S::from_int(2) * S::from_f64(*alpha)), s)
                    * Self::product_others(rect, j)
            }
            PopulationModel::Correlated { beta, alpha } => {
                if j == 2 {
                    linear_gain(a, b, &S::from_f64(*alpha), s)
                } else {
                    match correlated_support(*beta, rect)? {
                        CorrelatedSupport::Blocks { c, w, r } => {
                            let u = (s.clone() - c) / w.clone();
                            w.sq() * block_gain(r, &u)
                        }
                        CorrelatedSupport::Rect { lo, hi } => {
                            linear_gain(&lo[j], &hi[j], &S::one(), s)
                        }
                    }
                }
            }
        })
    }

    /// Best cut along `j` and its criterion value. Every model is maximized
    /// at the center of the support of `x_j` within the cell.
    pub fn best_along<S: Scalar>(&self, rect: &Rect<S>, j: usize) -> Result<(S, S)> {
        self.check_rect(rect)?;
        let sixteen = S::from_int(16);
        Ok(match self {
            PopulationModel::Linear { alphas } => {
                let g = S::from_f64(alphas[j]).sq() * rect.width(j).sq() / sixteen;
                (rect.mid(j), g)
            }
            PopulationModel::Multiplicative { alpha, .. } => {
                let g = S::from_f64(*alpha).sq() * rect.width(j).sq() / S::from_int(4)
                    * Self::product_others(rect, j);
                (rect.mid(j), g)
            }
            PopulationModel::Correlated { beta, alpha } => {
                if j == 2 {
                    let g = S::from_f64(*alpha).sq() * rect.width(2).sq() / sixteen;
                    return Ok((rect.mid(2), g));
                }
                match correlated_support(*beta, rect)? {
                    CorrelatedSupport::Blocks { c, w, r } => {
                        if !is_power_of_two(r) || r > 1 << MAX_CERTIFIED_BETA {
                            return Err(Error::UnsupportedCell(format!(
                                "center split not certified for {r} diagonal squares"
                            )));
                        }
                        let half = S::ratio(1, 2);
                        let g = w.sq() * block_gain(r, &half);
                        (c + w * half, g)
                    }
                    CorrelatedSupport::Rect { lo, hi } => {
                        let wj = hi[j].clone() - lo[j].clone();
                        let z = (lo[j].clone() + hi[j].clone()) / S::from_int(2);
                        (z, wj.sq() / sixteen)
                    }
                }
            }
        })
    }

    /// Number of whole diagonal squares of a correlated cell; `None` for other
    /// models and for cells inside a single square.
    pub fn block_count<S: Scalar>(&self, rect: &Rect<S>) -> Result<Option<i64>> {
        match self {
            PopulationModel::Correlated { beta, .. } => match correlated_support(*beta, rect)? {
                CorrelatedSupport::Blocks { r, .. } => Ok(Some(r)),
                CorrelatedSupport::Rect { .. } => Ok(None),
            },
            _ => Ok(None),
        }
    }

    /// `P(X ∈ A)`.
    pub fn mass<S: Scalar>(&self, rect: &Rect<S>) -> Result<S> {
        self.check_rect(rect)?;
        let volume =
            |dims: std::ops::Range<usize>| dims.fold(S::one(), |acc, j| acc * rect.width(j));
        Ok(match self {
            PopulationModel::Correlated { beta, .. } => {
                let w3 = rect.width(2);
                let big_r: S = pow2(*beta);
                match correlated_support(*beta, rect)? {
                    CorrelatedSupport::Blocks { r, .. } => S::from_int(r) / big_r * w3,
                    CorrelatedSupport::Rect { lo, hi } => {
                        let area =
                            (hi[0].clone() - lo[0].clone()) * (hi[1].clone() - lo[1].clone());
                        big_r * area * w3
                    }
                }
            }
            _ => volume(0..self.d()),
        })
    }

    /// `E[m(X) | X ∈ A]`.
    pub fn mean<S: Scalar>(&self, rect: &Rect<S>) -> Result<S> {
        self.check_rect(rect)?;
        Ok(match self {
            PopulationModel::Linear { alphas } => (0..self.d()).fold(S::zero(), |acc, j| {
                acc + S::from_f64(alphas[j]) * rect.mid(j)
            }),
            PopulationModel::Multiplicative { alpha, d } => (0..*d)
                .fold(S::from_f64(*alpha), |acc, j| {
                    acc * (rect.lower[j].clone() + rect.upper[j].clone())
                }),
            PopulationModel::Correlated { beta, alpha } => {
                let x3 = S::from_f64(*alpha) * rect.mid(2);
                match correlated_support(*beta, rect)? {
                    CorrelatedSupport::Blocks { c, w, .. } => S::from_int(2) * c + w + x3,
                    CorrelatedSupport::Rect { lo, hi } => {
                        let two = S::from_int(2);
                        (lo[0].clone() + hi[0].clone()) / two.clone()
                            + (lo[1].clone() + hi[1].clone()) / two
                            + x3
                    }
                }
            }
        })
    }

    /// `V[m(X) | X ∈ A]`.
    pub fn variance<S: Scalar>(&self, rect: &Rect<S>) -> Result<S> {
        self.check_rect(rect)?;
        let twelve = S::from_int(12);
        Ok(match self {
            PopulationModel::Linear { alphas } => (0..self.d()).fold(S::zero(), |acc, j| {
                acc + S::from_f64(alphas[j]).sq() * rect.width(j).sq() / twelve.clone()
            }),
            PopulationModel::Multiplicative { alpha, d } => {
                // E[x²] on [a, b] is (a² + ab + b²)/3; m = 2^d α Π x_j.
                let mut second = S::from_f64(*alpha).sq();
                for j in 0..*d {
                    let (a, b) = (rect.lower[j].clone(), rect.upper[j].clone());
                    second = second * S::from_int(4) * (a.sq() + a.clone() * b.clone() + b.sq())
                        / S::from_int(3);
                }
                second - self.mean(rect)?.sq()
            }
            PopulationModel::Correlated { beta, alpha } => {
                let x3 = S::from_f64(*alpha).sq() * rect.width(2).sq() / twelve.clone();
                match correlated_support(*beta, rect)? {
                    CorrelatedSupport::Blocks { w, r, .. } => {
                        let v = S::ratio(1, 3) - S::one() / (S::from_int(6) * S::from_int(r).sq());
                        w.sq() * v + x3
                    }
                    CorrelatedSupport::Rect { lo, hi } => {
                        ((hi[0].clone() - lo[0].clone()).sq()
                            + (hi[1].clone() - lo[1].clone()).sq())
                            / twelve
                            + x3
                    }
                }
            }
        })
    }
}

fn rect_of(cell: &Cell) -> Rect<f64> {
    Rect::from_cell(cell)
}

/// `L*_A(j, s)` for `m(x) = Σ α_j x_j`: `(α_j²/4)(s − a_j)(b_j − s)`.
pub fn criterion_linear(cell: &Cell, alphas: &[f64], j: usize, s: f64) -> Result<f64> {
    PopulationModel::Linear {
        alphas: alphas.to_vec(),
    }
    .criterion(&rect_of(cell), j, &s)
}

/// `L*_A(j, s)` for `m(x) = 2^d α Π x_j`:
/// `α²(s − a_j)(b_j − s) Π_{ℓ≠j}(a_ℓ + b_ℓ)²`.
pub fn criterion_multiplicative(cell: &Cell, alpha: f64, j: usize, s: f64) -> Result<f64> {
    PopulationModel::Multiplicative {
        alpha,
        d: cell.dim(),
    }
    .criterion(&rect_of(cell), j, &s)
}

/// `L*_A(j, s)` for the correlated model.
pub fn criterion_correlated(cell: &Cell, beta: u32, alpha: f64, j: usize, s: f64) -> Result<f64> {
    PopulationModel::Correlated { beta, alpha }.criterion(&rect_of(cell), j, &s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type Q = BigRational;

    fn q(n: i64, d: i64) -> Q {
        Q::ratio(n, d)
    }

    fn cell(lo: &[f64], hi: &[f64]) -> Cell {
        Cell::new(lo.to_vec(), hi.to_vec()).unwrap()
    }

    #[test]
    fn linear_values() {
        assert_eq!(
            criterion_linear(&Cell::unit(1), &[1.0], 0, 0.5).unwrap(),
            1.0 / 16.0
        );
        let tiny = criterion_linear(&Cell::unit(1), &[1.0], 0, 1e-12).unwrap();
        assert!(tiny < 1e-12);
        assert!(criterion_linear(&Cell::unit(1), &[1.0], 0, 1.0).is_err());
    }

    #[test]
    fn multiplicative_values_are_exact() {
        let m = PopulationModel::Multiplicative { alpha: 1.0, d: 2 };
        let half = q(1, 2);
        let root = Rect::<Q>::unit(2);
        assert_eq!(m.criterion(&root, 0, &half).unwrap(), q(1, 4));
        let (left, right) = root.split(0, &half);
        assert_eq!(m.criterion(&left, 1, &half).unwrap(), q(1, 16));
        assert_eq!(m.criterion(&right, 1, &half).unwrap(), q(9, 16));
        // the left half ties between the two variables
        assert_eq!(
            m.best_along(&left, 0).unwrap().1,
            m.best_along(&left, 1).unwrap().1
        );
        assert!(m.criterion(&right, 1, &half).unwrap() > m.criterion(&root, 0, &half).unwrap());
        assert_eq!(
            criterion_multiplicative(&cell(&[0.5, 0.0], &[1.0, 1.0]), 1.0, 1, 0.5).unwrap(),
            9.0 / 16.0
        );
    }

    #[test]
    fn block_formula_matches_direct_integration() {
        // p_L μ_L = Σ_{i<ℓ} (2i+1)/r² + (u − ℓ/r)(u/2 + (3ℓ+1)/(2r)).
        for r in [1i64, 2, 3, 4, 8] {
            for k in 1..40 {
                let u = q(k, 40);
                let l = (u.clone() * Q::from_int(r)).floor_int();
                let mut left = Q::from_int(0);
                for i in 0..l {
                    left += q(2 * i + 1, r * r);
                }
                left += (u.clone() - q(l, r)) * (u.clone() / Q::from_int(2) + q(3 * l + 1, 2 * r));
                let right = Q::from_int(1) - left.clone();
                let one = Q::from_int(1);
                let direct = left.sq() / u.clone() + right.sq() / (one.clone() - u.clone()) - one;
                assert_eq!(block_gain(r, &u), direct, "r={r} u={u}");
            }
        }
    }

    #[test]
    fn single_block_reduces_to_uniform_square() {
        for k in 1..20 {
            let u = q(k, 20);
            assert_eq!(
                block_gain(1, &u),
                linear_gain(&q(0, 1), &q(1, 1), &q(1, 1), &u)
            );
        }
    }

    #[test]
    fn correlated_root_values() {
        for beta in 1..=5 {
            let m = PopulationModel::Correlated { beta, alpha: 1.0 };
            let g: Q = m.criterion(&Rect::unit(3), 0, &q(1, 2)).unwrap();
            assert_eq!(g, q(1, 4), "beta={beta}");
            assert_eq!(m.criterion(&Rect::unit(3), 1, &q(1, 2)).unwrap(), q(1, 4));
        }
        // a single square (independent inputs): the uniform value 1/16
        let m = PopulationModel::Correlated {
            beta: 0,
            alpha: 1.0,
        };
        assert_eq!(
            m.criterion(&Rect::<Q>::unit(3), 0, &q(1, 2)).unwrap(),
            q(1, 16)
        );
        for alpha in [0.5, 1.0, 2.5] {
            let g = criterion_correlated(&Cell::unit(3), 3, alpha, 2, 0.5).unwrap();
            assert!((g - alpha * alpha / 16.0).abs() < 1e-15);
        }
    }

    #[test]
    fn third_variable_ignores_the_first_two_sides() {
        let m = PopulationModel::Correlated {
            beta: 2,
            alpha: 1.5,
        };
        let mut a = Rect::<Q>::unit(3);
        a.lower[2] = q(1, 4);
        let mut b = a.clone();
        b.upper[0] = q(1, 2);
        b.upper[1] = q(1, 2);
        let mut c = a.clone();
        c.lower[0] = q(1, 8);
        c.upper[0] = q(3, 16);
        c.upper[1] = q(1, 4);
        for s in [q(1, 3), q(1, 2), q(7, 8)] {
            let ga = m.criterion(&a, 2, &s).unwrap();
            assert_eq!(ga, m.criterion(&b, 2, &s).unwrap());
            assert_eq!(ga, m.criterion(&c, 2, &s).unwrap());
        }
        assert_eq!(m.best_along(&a, 2).unwrap(), m.best_along(&c, 2).unwrap());
    }

    #[test]
    fn support_classification() {
        let beta = 2;
        let mut r = Rect::<Q>::unit(3);
        assert_eq!(
            correlated_support(beta, &r).unwrap(),
            CorrelatedSupport::Blocks {
                c: q(0, 1),
                w: q(1, 1),
                r: 4
            }
        );
        r.upper[0] = q(1, 2);
        assert_eq!(
            correlated_support(beta, &r).unwrap(),
            CorrelatedSupport::Blocks {
                c: q(0, 1),
                w: q(1, 2),
                r: 2
            }
        );
        r.upper[0] = q(3, 8);
        assert!(matches!(
            correlated_support(beta, &r),
            Err(Error::UnsupportedCell(_))
        ));
        r.upper[0] = q(1, 4);
        assert_eq!(
            correlated_support(beta, &r).unwrap(),
            CorrelatedSupport::Rect {
                lo: [q(0, 1), q(0, 1)],
                hi: [q(1, 4), q(1, 4)]
            }
        );
        r.lower[1] = q(1, 2);
        assert_eq!(correlated_support(beta, &r), Err(Error::EmptyCell));
    }

    #[test]
    fn masses_and_moments() {
        let m = PopulationModel::Correlated {
            beta: 1,
            alpha: 1.0,
        };
        let root = Rect::<Q>::unit(3);
        assert_eq!(m.mass(&root).unwrap(), q(1, 1));
        assert_eq!(m.mean(&root).unwrap(), q(3, 2));
        assert_eq!(m.variance(&root).unwrap(), q(7, 24) + q(1, 12));
        let (l, r) = root.split(0, &q(1, 2));
        assert_eq!(m.mass(&l).unwrap() + m.mass(&r).unwrap(), q(1, 1));
        let mm = PopulationModel::Multiplicative { alpha: 1.0, d: 3 };
        assert_eq!(mm.variance(&Rect::<Q>::unit(3)).unwrap(), q(37, 27));
        assert_eq!(mm.mean(&Rect::<Q>::unit(3)).unwrap(), q(1, 1));
        let lm = PopulationModel::Linear {
            alphas: vec![1.0, 2.0],
        };
        assert_eq!(lm.variance(&Rect::<Q>::unit(2)).unwrap(), q(5, 12));
    }

    #[test]
    fn linear_best_split() {
        let lm = PopulationModel::Linear {
            alphas: vec![1.0, 2.0],
        };
        let root = Rect::<Q>::unit(2);
        assert_eq!(lm.best_along(&root, 1).unwrap(), (q(1, 2), q(1, 4)));
        assert_eq!(lm.best_along(&root, 0).unwrap(), (q(1, 2), q(1, 16)));
    }

    #[test]
    fn additive_has_no_closed_form() {
        let spec = ModelSpec::additive(vec![crate::synthdata::ComponentFn::Sine], 0.0).unwrap();
        assert!(matches!(
            PopulationModel::from_spec(&spec),
            Err(Error::UnsupportedModel(_))
        ));
    }
}
