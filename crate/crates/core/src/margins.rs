//! Binary linear classification: scores, 0-1 and hinge losses, hard and soft
//! margins, and discretized grids of linear classifiers.
//!
//! A hypothesis `(u, b)` with `|u| = 1` scores an input as `<u, z> - b`. A point is
//! classified correctly iff `score * y > 0`; a zero score is an error.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{FiniteDataDomain, FiniteHypothesisSpace, PROBABILITY_SUM_TOL, TIE_TOL};

const UNIT_NORM_TOL: f64 = 1e-10;
// Slack in ceil((1 - r) n) so that r = k/n computed in floating point keeps its integer meaning.
const COUNT_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledPoint {
    pub z: Vec<f64>,
    pub y: i8,
}

impl LabeledPoint {
    pub fn new(z: Vec<f64>, y: i8) -> Result<Self> {
        if y != 1 && y != -1 {
            return Err(Error::Domain(format!("label {y} is not -1 or +1")));
        }
        if z.iter().any(|c| !c.is_finite()) {
            return Err(Error::Domain("non-finite input coordinate".into()));
        }
        Ok(Self { z, y })
    }
}

/// Oriented hyperplane `{z : <u, z> = b}` with unit normal `u`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearHypothesis {
    u: Vec<f64>,
    b: f64,
}

impl LinearHypothesis {
    pub fn new(u: Vec<f64>, b: f64) -> Result<Self> {
        let norm = u.iter().map(|c| c * c).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::Domain(format!("direction has norm {norm}, expected 1")));
        }
        if !b.is_finite() {
            return Err(Error::Domain("bias is not finite".into()));
        }
        Ok(Self { u, b })
    }

    /// Normalizes `direction` to unit length.
    pub fn from_direction(direction: Vec<f64>, b: f64) -> Result<Self> {
        let norm = direction.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Domain("direction must be non-zero".into()));
        }
        Self::new(direction.into_iter().map(|c| c / norm).collect(), b)
    }

    pub fn direction(&self) -> &[f64] {
        &self.u
    }

    pub fn bias(&self) -> f64 {
        self.b
    }

    pub fn dimension(&self) -> usize {
        self.u.len()
    }

    /// Same orientation with bias `b - shift`, so every score grows by `shift`.
    pub fn translated(&self, shift: f64) -> Self {
        Self {
            u: self.u.clone(),
            b: self.b - shift,
        }
    }
}

/// `<u, z> - b`.
pub fn score(h: &LinearHypothesis, z: &[f64]) -> Result<f64> {
    if h.u.len() != z.len() {
        return Err(Error::LengthMismatch {
            left: h.u.len(),
            right: z.len(),
        });
    }
    Ok(h.u.iter().zip(z).map(|(a, b)| a * b).sum::<f64>() - h.b)
}

/// Signed score `Phi(h, z) * y`.
pub fn signed_score(h: &LinearHypothesis, point: &LabeledPoint) -> Result<f64> {
    Ok(score(h, &point.z)? * f64::from(point.y))
}

/// 0 if the point is strictly on the correct side, 1 otherwise.
pub fn zero_one_loss(h: &LinearHypothesis, point: &LabeledPoint) -> Result<f64> {
    Ok(if signed_score(h, point)? > 0.0 { 0.0 } else { 1.0 })
}

/// `max(0, 1 - score * y / gamma)`.
pub fn hinge_loss(h: &LinearHypothesis, point: &LabeledPoint, gamma: f64) -> Result<f64> {
    if !(gamma > 0.0) {
        return Err(Error::Domain(format!("hinge margin {gamma} must be positive")));
    }
    Ok((1.0 - signed_score(h, point)? / gamma).max(0.0))
}

/// Value of the margin function `m_{r,x}(h)` and a maximizing index set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginResult {
    pub r: f64,
    /// `+inf` when the empty set is admissible (`r = 1`).
    pub value: f64,
    pub selected: Vec<usize>,
}

/// Smallest admissible subset size `ceil((1 - r) n)`.
pub fn retained_count(n: usize, r: f64) -> usize {
    ((1.0 - r) * n as f64 - COUNT_SLACK).ceil().max(0.0) as usize
}

/// `max over |I| >= (1 - r) n of min_{i in I} Phi(h, z_i) y_i`.
///
/// The maximum is attained by the `k = ceil((1 - r) n)` largest signed scores
/// (ties broken by lower index), so the value is the k-th largest score. At
/// `r = 1` the empty set is admissible and the value is `+inf`.
pub fn margin_value(h: &LinearHypothesis, data: &[LabeledPoint], r: f64) -> Result<MarginResult> {
    if data.is_empty() {
        return Err(Error::Empty("margin data"));
    }
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::Domain(format!("error fraction r = {r} is not in [0, 1]")));
    }
    let scores = data.iter().map(|p| signed_score(h, p)).collect::<Result<Vec<_>>>()?;
    let k = retained_count(data.len(), r);
    let mut order: Vec<usize> = (0..data.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    order.truncate(k);
    let value = order.last().map_or(f64::INFINITY, |&i| scores[i]);
    Ok(MarginResult {
        r,
        value,
        selected: order,
    })
}

/// Margin function by enumeration of every admissible index subset.
/// Exponential in `data.len()`; used as a reference for [`margin_value`].
pub fn margin_value_exhaustive(h: &LinearHypothesis, data: &[LabeledPoint], r: f64) -> Result<f64> {
    let n = data.len();
    if n == 0 || n > 20 {
        return Err(Error::Domain(format!("exhaustive margin needs 1..=20 points, got {n}")));
    }
    let scores = data.iter().map(|p| signed_score(h, p)).collect::<Result<Vec<_>>>()?;
    let need = (1.0 - r) * n as f64 - COUNT_SLACK;
    let mut best = f64::NEG_INFINITY;
    for mask in 0u32..(1 << n) {
        if (mask.count_ones() as f64) < need {
            continue;
        }
        let min = (0..n)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| scores[i])
            .fold(f64::INFINITY, f64::min);
        best = best.max(min);
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PriorKind {
    Uniform,
    /// Weights proportional to the standard normal density of the bias.
    GaussianProjected,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MarginLoss {
    ZeroOne,
    Hinge { gamma: f64 },
}

/// A product grid of unit directions and biases with a strictly positive prior.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearGrid {
    pub hypotheses: Vec<LinearHypothesis>,
    pub prior: Vec<f64>,
    pub dimension: usize,
    pub angular_steps: usize,
    pub bias_steps: usize,
    pub bias_range: f64,
    pub prior_kind: PriorKind,
}

impl LinearGrid {
    /// Tabulates `loss` for every grid hypothesis on every point of `domain`.
    pub fn tabulate(
        &self,
        domain: &FiniteDataDomain<LabeledPoint>,
        loss: MarginLoss,
    ) -> Result<FiniteHypothesisSpace<LinearHypothesis>> {
        if let Some(p) = domain.points().iter().find(|p| p.z.len() != self.dimension) {
            return Err(Error::LengthMismatch {
                left: self.dimension,
                right: p.z.len(),
            });
        }
        if let MarginLoss::Hinge { gamma } = loss {
            if !(gamma > 0.0) {
                return Err(Error::Domain(format!("hinge margin {gamma} must be positive")));
            }
        }
        FiniteHypothesisSpace::tabulate(self.hypotheses.clone(), self.prior.clone(), domain, move |h, x| {
            let s = signed_score(h, x).unwrap_or(f64::NAN);
            match loss {
                MarginLoss::ZeroOne => {
                    if s > 0.0 {
                        0.0
                    } else {
                        1.0
                    }
                }
                MarginLoss::Hinge { gamma } => (1.0 - s / gamma).max(0.0),
            }
        })
    }

    pub fn len(&self) -> usize {
        self.hypotheses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hypotheses.is_empty()
    }
}

fn directions(d: usize, steps: usize) -> Vec<Vec<f64>> {
    match d {
        2 => (0..steps)
            .map(|k| {
                let t = std::f64::consts::TAU * k as f64 / steps as f64;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        _ => {
            // Fibonacci sphere.
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..steps)
                .map(|i| {
                    let y = 1.0 - 2.0 * (i as f64 + 0.5) / steps as f64;
                    let radius = (1.0 - y * y).sqrt();
                    let t = golden * i as f64;
                    vec![t.cos() * radius, y, t.sin() * radius]
                })
                .collect()
        }
    }
}

/// Grid of `angular_steps` unit directions times `bias_steps` biases evenly spaced in
/// `[-bias_range, bias_range]` (a single bias of 0 when `bias_steps == 1`).
///
/// Directions are equiangular for `d = 2` and a Fibonacci sphere for `d = 3`.
pub fn build_linear_grid(
    d: usize,
    angular_steps: usize,
    bias_steps: usize,
    bias_range: f64,
    prior_kind: PriorKind,
) -> Result<LinearGrid> {
    if d != 2 && d != 3 {
        return Err(Error::Domain(format!("unsupported dimension {d}; expected 2 or 3")));
    }
    if angular_steps < 4 {
        return Err(Error::Domain(format!(
            "angular_steps = {angular_steps} must be at least 4"
        )));
    }
    if bias_steps == 0 || !(bias_range >= 0.0 && bias_range.is_finite()) {
        return Err(Error::Domain(
            "bias grid needs bias_steps >= 1 and a finite bias_range >= 0".into(),
        ));
    }
    let biases: Vec<f64> = if bias_steps == 1 {
        vec![0.0]
    } else {
        (0..bias_steps)
            .map(|k| -bias_range + 2.0 * bias_range * k as f64 / (bias_steps - 1) as f64)
            .collect()
    };
    let mut hypotheses = Vec::with_capacity(angular_steps * bias_steps);
    let mut weights = Vec::with_capacity(angular_steps * bias_steps);
    for u in directions(d, angular_steps) {
        for &b in &biases {
            weights.push(match prior_kind {
                PriorKind::Uniform => 1.0,
                PriorKind::GaussianProjected => (-0.5 * b * b).exp(),
            });
            hypotheses.push(LinearHypothesis::from_direction(u.clone(), b)?);
        }
    }
    let total: f64 = weights.iter().sum();
    let prior: Vec<f64> = weights.into_iter().map(|w| w / total).collect();
    debug_assert!((prior.iter().sum::<f64>() - 1.0).abs() <= PROBABILITY_SUM_TOL);
    Ok(LinearGrid {
        hypotheses,
        prior,
        dimension: d,
        angular_steps,
        bias_steps,
        bias_range,
        prior_kind,
    })
}

/// `m*_{r,x}`: largest margin value over the grid.
pub fn max_margin(grid: &LinearGrid, data: &[LabeledPoint], r: f64) -> Result<f64> {
    if grid.is_empty() {
        return Err(Error::Empty("hypothesis grid"));
    }
    grid.hypotheses
        .iter()
        .map(|h| margin_value(h, data, r).map(|m| m.value))
        .try_fold(f64::NEG_INFINITY, |acc, v| v.map(|v| acc.max(v)))
}

/// Fraction of points misclassified by `h`.
pub fn empirical_zero_one(h: &LinearHypothesis, data: &[LabeledPoint]) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::Empty("margin data"));
    }
    let errors = data.iter().map(|p| zero_one_loss(h, p)).sum::<Result<f64>>()?;
    Ok(errors / data.len() as f64)
}

/// Checks `{h : L_hat(h, x) <= r} = {h : 0 < m_{r,x}(h) <= m*_{r,x}}` on every grid hypothesis.
pub fn level_set_equality_check(grid: &LinearGrid, data: &[LabeledPoint], r: f64) -> Result<bool> {
    let m_star = max_margin(grid, data, r)?;
    for h in &grid.hypotheses {
        let low_loss = empirical_zero_one(h, data)? <= r + TIE_TOL;
        let m = margin_value(h, data, r)?.value;
        let in_margin_set = m > 0.0 && m <= m_star;
        if low_loss != in_margin_set {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Writes points as CSV with header `z_1,..,z_d,y`.
pub fn write_dataset_csv<W: Write>(writer: W, points: &[LabeledPoint]) -> Result<()> {
    let d = points.first().map_or(0, |p| p.z.len());
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<String> = (1..=d).map(|i| format!("z_{i}")).collect();
    header.push("y".into());
    w.write_record(&header)?;
    for p in points {
        if p.z.len() != d {
            return Err(Error::LengthMismatch {
                left: d,
                right: p.z.len(),
            });
        }
        let mut rec: Vec<String> = p.z.iter().map(|c| c.to_string()).collect();
        rec.push(p.y.to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_dataset_csv<R: Read>(reader: R) -> Result<Vec<LabeledPoint>> {
    let mut r = csv::Reader::from_reader(reader);
    let header = r.headers()?.clone();
    let d = header
        .len()
        .checked_sub(1)
        .filter(|d| *d > 0)
        .ok_or_else(|| Error::Format("dataset header needs z_1..z_d and y".into()))?;
    if header.get(d) != Some("y") || (0..d).any(|i| header.get(i) != Some(format!("z_{}", i + 1).as_str())) {
        return Err(Error::Format(format!("unexpected dataset header {header:?}")));
    }
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let parse = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| Error::Format(format!("{s:?}: {e}")))
        };
        let z = (0..d).map(|i| parse(&rec[i])).collect::<Result<Vec<_>>>()?;
        let y: i8 = rec[d]
            .trim()
            .parse()
            .map_err(|e| Error::Format(format!("label {:?}: {e}", &rec[d])))?;
        out.push(LabeledPoint::new(z, y)?);
    }
    Ok(out)
}
