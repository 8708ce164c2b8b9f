//! Seeded generators for the synthetic regression models and their exact
//! moments.
//!
//! Four generative families are supported:
//!
//! * `additive`: `Y = sum_j m_j(X_j) + eps`, `X ~ U([0,1]^d)`, with `m_j` taken
//!   from a small catalog of univariate functions;
//! * `linear`: `Y = sum_j alpha_j X_j + eps`;
//! * `multiplicative`: `Y = 2^d alpha prod_j X_j + eps`;
//! * `correlated`: `Y = X_1 + X_2 + alpha X_3 + eps` where `(X_1, X_2)` is
//!   uniform on `2^beta` diagonal squares and `X_3 ~ U([0,1])` independently.
//!
//! Noise is `sigma * N(0,1)` drawn with `rand_distr`'s ziggurat
//! `StandardNormal` (rand_distr 0.5) from a ChaCha8 stream that is separate
//! from the input stream.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::rng::{stream, Stream};

/// `n x d` design matrix (row-major, entries in `[0,1]`) and response vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    n: usize,
    d: usize,
    x: Vec<f64>,
    y: Vec<f64>,
}

impl Dataset {
    pub fn new(x: Vec<f64>, y: Vec<f64>, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::Parameter("dataset dimension must be >= 1".into()));
        }
        let n = y.len();
        if n == 0 {
            return Err(Error::Parameter(
                "dataset must hold at least one sample".into(),
            ));
        }
        if x.len() != n * d {
            return Err(Error::DimensionMismatch {
                expected: n * d,
                got: x.len(),
            });
        }
        if let Some(bad) = x.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::Parameter(format!("input value {bad} outside [0,1]")));
        }
        if let Some(bad) = y.iter().find(|v| !v.is_finite()) {
            return Err(Error::Parameter(format!("non-finite response {bad}")));
        }
        Ok(Dataset { n, d, x, y })
    }

    pub fn from_rows(rows: &[Vec<f64>], y: Vec<f64>) -> Result<Self> {
        let d = rows.first().map(|r| r.len()).unwrap_or(0);
        if rows.len() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: rows.len(),
                got: y.len(),
            });
        }
        let mut x = Vec::with_capacity(rows.len() * d);
        for r in rows {
            if r.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: r.len(),
                });
            }
            x.extend_from_slice(r);
        }
        Dataset::new(x, y, d)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.x[i * self.d..(i + 1) * self.d]
    }

    #[inline]
    pub fn x(&self, i: usize, j: usize) -> f64 {
        self.x[i * self.d + j]
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn x_flat(&self) -> &[f64] {
        &self.x
    }

    /// Column `j` as a vector.
    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i, j)).collect()
    }

    /// Write as CSV with header `x1,...,xd,y`. Values use Rust's shortest
    /// round-trip decimal form, so reading back is bit-exact.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        let mut header: Vec<String> = (1..=self.d).map(|j| format!("x{j}")).collect();
        header.push("y".into());
        wtr.write_record(&header)?;
        for i in 0..self.n {
            let mut rec: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            rec.push(self.y[i].to_string());
            wtr.write_record(&rec)?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(r);
        let headers = rdr.headers()?.clone();
        let cols = headers.len();
        if cols < 2 || headers.get(cols - 1) != Some("y") {
            return Err(Error::Csv("expected header x1,...,xd,y".into()));
        }
        for (j, h) in headers.iter().take(cols - 1).enumerate() {
            if h != format!("x{}", j + 1) {
                return Err(Error::Csv(format!("unexpected column name {h:?}")));
            }
        }
        let d = cols - 1;
        let mut x = Vec::new();
        let mut y = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            for (j, field) in rec.iter().enumerate() {
                let v: f64 = field
                    .trim()
                    .parse()
                    .map_err(|_| Error::Csv(format!("cannot parse {field:?} as a number")))?;
                if j < d {
                    x.push(v);
                } else {
                    y.push(v);
                }
            }
        }
        Dataset::new(x, y, d)
    }
}

/// Univariate component functions available to the additive model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComponentFn {
    /// `x`
    Identity,
    /// `(x - 1/2)^2`
    CenteredQuadratic,
    /// `sin(2 pi x)`
    Sine,
}

impl ComponentFn {
    pub fn eval(self, x: f64) -> f64 {
        match self {
            ComponentFn::Identity => x,
            ComponentFn::CenteredQuadratic => (x - 0.5) * (x - 0.5),
            ComponentFn::Sine => (2.0 * std::f64::consts::PI * x).sin(),
        }
    }

    /// `V[m(U)]` for `U ~ U([0,1])`.
    pub fn variance(self) -> f64 {
        match self {
            ComponentFn::Identity => 1.0 / 12.0,
            ComponentFn::CenteredQuadratic => 1.0 / 180.0,
            ComponentFn::Sine => 0.5,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ComponentFn::Identity => "identity",
            ComponentFn::CenteredQuadratic => "quadratic",
            ComponentFn::Sine => "sine",
        }
    }
}

impl FromStr for ComponentFn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "identity" | "id" | "x" => Ok(ComponentFn::Identity),
            "quadratic" | "centered_quadratic" => Ok(ComponentFn::CenteredQuadratic),
            "sine" | "sin" => Ok(ComponentFn::Sine),
            other => Err(Error::UnsupportedModel(format!(
                "unknown component function {other:?} (catalog: identity, quadratic, sine)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelKind {
    Additive { components: Vec<ComponentFn> },
    Linear { alphas: Vec<f64> },
    Multiplicative { alpha: f64, d: usize },
    Correlated { beta: u32, alpha: f64 },
}

/// A synthetic generative model together with its noise level.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub sigma: f64,
}

/// Largest block exponent accepted by the diagonal-blocks sampler.
pub const MAX_BETA: u32 = 30;

impl ModelSpec {
    pub fn additive(components: Vec<ComponentFn>, sigma: f64) -> Result<Self> {
        Self::checked(ModelKind::Additive { components }, sigma)
    }

    pub fn linear(alphas: Vec<f64>, sigma: f64) -> Result<Self> {
        Self::checked(ModelKind::Linear { alphas }, sigma)
    }

    pub fn multiplicative(alpha: f64, d: usize, sigma: f64) -> Result<Self> {
        Self::checked(ModelKind::Multiplicative { alpha, d }, sigma)
    }

    pub fn correlated(beta: u32, alpha: f64, sigma: f64) -> Result<Self> {
        Self::checked(ModelKind::Correlated { beta, alpha }, sigma)
    }

    fn checked(kind: ModelKind, sigma: f64) -> Result<Self> {
        let spec = ModelSpec { kind, sigma };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return Err(Error::Parameter(format!(
                "sigma must be >= 0, got {}",
                self.sigma
            )));
        }
        match &self.kind {
            ModelKind::Additive { components } if components.is_empty() => Err(Error::Parameter(
                "additive model needs at least one component".into(),
            )),
            ModelKind::Linear { alphas } if alphas.is_empty() => Err(Error::Parameter(
                "linear model needs at least one coefficient".into(),
            )),
            ModelKind::Linear { alphas } if alphas.iter().any(|a| !a.is_finite()) => Err(
                Error::Parameter("linear coefficients must be finite".into()),
            ),
            ModelKind::Multiplicative { d: 0, .. } => {
                Err(Error::Parameter("multiplicative model needs d >= 1".into()))
            }
            ModelKind::Multiplicative { alpha, .. } | ModelKind::Correlated { alpha, .. }
                if !alpha.is_finite() =>
            {
                Err(Error::Parameter("alpha must be finite".into()))
            }
            ModelKind::Correlated { beta, .. } if *beta > MAX_BETA => Err(Error::Parameter(
                format!("beta must be <= {MAX_BETA}, got {beta}"),
            )),
            _ => Ok(()),
        }
    }

    pub fn d(&self) -> usize {
        match &self.kind {
            ModelKind::Additive { components } => components.len(),
            ModelKind::Linear { alphas } => alphas.len(),
            ModelKind::Multiplicative { d, .. } => *d,
            ModelKind::Correlated { .. } => 3,
        }
    }

    pub fn name(&self) -> &'static str {
        match &self.kind {
            ModelKind::Additive { .. } => "additive",
            ModelKind::Linear { .. } => "linear",
            ModelKind::Multiplicative { .. } => "multiplicative",
            ModelKind::Correlated { .. } => "correlated",
        }
    }

    /// Noiseless regression function `m(x)`.
    pub fn regression(&self, x: &[f64]) -> f64 {
        match &self.kind {
            ModelKind::Additive { components } => {
                components.iter().zip(x).map(|(f, &v)| f.eval(v)).sum()
            }
            ModelKind::Linear { alphas } => alphas.iter().zip(x).map(|(a, v)| a * v).sum(),
            ModelKind::Multiplicative { alpha, d } => {
                let scale = 2f64.powi(*d as i32) * alpha;
                scale * x.iter().product::<f64>()
            }
            ModelKind::Correlated { alpha, .. } => x[0] + x[1] + alpha * x[2],
        }
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ModelKind::Additive { components } => {
                let names: Vec<&str> = components.iter().map(|c| c.name()).collect();
                write!(f, "additive(components={})", names.join("|"))?
            }
            ModelKind::Linear { alphas } => {
                let a: Vec<String> = alphas.iter().map(|v| v.to_string()).collect();
                write!(f, "linear(alpha={})", a.join("|"))?
            }
            ModelKind::Multiplicative { alpha, d } => {
                write!(f, "multiplicative(alpha={alpha};d={d})")?
            }
            ModelKind::Correlated { beta, alpha } => {
                write!(f, "correlated(beta={beta};alpha={alpha})")?
            }
        }
        write!(f, " sigma={}", self.sigma)
    }
}

fn check_nd(n: usize, d: usize) -> Result<()> {
    if n == 0 || d == 0 {
        return Err(Error::Parameter(format!(
            "need n >= 1 and d >= 1, got n={n}, d={d}"
        )));
    }
    Ok(())
}

/// `n x d` i.i.d. uniform draws (row-major).
pub fn sample_uniform_cube(n: usize, d: usize, seed: u64) -> Result<Vec<f64>> {
    check_nd(n, d)?;
    let mut rng = stream(seed, Stream::Inputs, 0);
    Ok((0..n * d).map(|_| rng.random::<f64>()).collect())
}

fn draw_block_pair<R: Rng>(rng: &mut R, beta: u32) -> (f64, f64) {
    let blocks = 1u64 << beta;
    let j = rng.random_range(0..blocks) as f64;
    let h = 1.0 / blocks as f64;
    let u1: f64 = rng.random();
    let u2: f64 = rng.random();
    ((j + u1) * h, (j + u2) * h)
}

/// `n x 2` draws from the law uniform on the `2^beta` diagonal squares
/// `[j/2^beta, (j+1)/2^beta)^2`.
pub fn sample_diagonal_blocks(n: usize, beta: u32, seed: u64) -> Result<Vec<f64>> {
    check_nd(n, 2)?;
    if beta > MAX_BETA {
        return Err(Error::Parameter(format!("beta must be <= {MAX_BETA}")));
    }
    let mut rng = stream(seed, Stream::Inputs, 0);
    let mut out = Vec::with_capacity(2 * n);
    for _ in 0..n {
        let (a, b) = draw_block_pair(&mut rng, beta);
        out.push(a);
        out.push(b);
    }
    Ok(out)
}

/// `Corr(X_1, X_2) = 1 - 4^{-beta}` under the diagonal-blocks law.
pub fn theoretical_correlation(beta: u32) -> f64 {
    1.0 - 0.25f64.powi(beta as i32)
}

/// Draw `n` samples from `spec`.
pub fn generate(spec: &ModelSpec, n: usize, seed: u64) -> Result<Dataset> {
    spec.validate()?;
    let d = spec.d();
    check_nd(n, d)?;
    let x = match &spec.kind {
        ModelKind::Correlated { beta, .. } => {
            let mut rng = stream(seed, Stream::Inputs, 0);
            let mut x = Vec::with_capacity(3 * n);
            for _ in 0..n {
                let (a, b) = draw_block_pair(&mut rng, *beta);
                x.push(a);
                x.push(b);
                x.push(rng.random::<f64>());
            }
            x
        }
        _ => sample_uniform_cube(n, d, seed)?,
    };
    let mut noise = stream(seed, Stream::Noise, 0);
    let y = (0..n)
        .map(|i| {
            let m = spec.regression(&x[i * d..(i + 1) * d]);
            if spec.sigma > 0.0 {
                let e: f64 = noise.sample(StandardNormal);
                m + spec.sigma * e
            } else {
                m
            }
        })
        .collect();
    Dataset::new(x, y, d)
}

/// Exact variance decomposition of the regression function.
#[derive(Debug, Clone, PartialEq)]
pub struct VarianceReport {
    /// `V[m(X)]`.
    pub total: f64,
    /// `V[m_j(X_j)]` for each variable, when the model is additive in it.
    pub per_variable: Vec<Option<f64>>,
    /// `V[X_1 + X_2]` for the correlated model.
    pub group_12: Option<f64>,
}

/// `V[X_1 + X_2] = 1/3 - 4^{-beta}/6` under the diagonal-blocks law.
pub fn correlated_group_variance(beta: u32) -> f64 {
    1.0 / 3.0 - 0.25f64.powi(beta as i32) / 6.0
}

pub fn population_variance(spec: &ModelSpec) -> Result<VarianceReport> {
    spec.validate()?;
    Ok(match &spec.kind {
        ModelKind::Additive { components } => {
            let per: Vec<f64> = components.iter().map(|c| c.variance()).collect();
            VarianceReport {
                total: per.iter().sum(),
                per_variable: per.into_iter().map(Some).collect(),
                group_12: None,
            }
        }
        ModelKind::Linear { alphas } => {
            let per: Vec<f64> = alphas.iter().map(|a| a * a / 12.0).collect();
            VarianceReport {
                total: per.iter().sum(),
                per_variable: per.into_iter().map(Some).collect(),
                group_12: None,
            }
        }
        ModelKind::Multiplicative { alpha, d } => VarianceReport {
            total: alpha * alpha * ((4.0f64 / 3.0).powi(*d as i32) - 1.0),
            per_variable: vec![None; *d],
            group_12: None,
        },
        ModelKind::Correlated { beta, alpha } => {
            let group = correlated_group_variance(*beta);
            let third = alpha * alpha / 12.0;
            VarianceReport {
                total: group + third,
                per_variable: vec![Some(1.0 / 12.0), Some(1.0 / 12.0), Some(third)],
                group_12: Some(group),
            }
        }
    })
}
