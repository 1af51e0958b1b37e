//! Growth profiles of directed balls and a crude polynomial/exponential
//! classifier.

use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{GroupElement, StepDistribution};

/// Minimum log-linear slope for an exponential classification.
pub const EXPONENTIAL_RATE_FLOOR: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GrowthClass {
    Polynomial,
    Exponential,
    Undetermined,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GrowthRow {
    pub r: usize,
    /// `|B(a, r)|`
    pub ball: usize,
    /// `|∂B(a, r)|`
    pub boundary: usize,
    /// Vertices first reached at distance `r + 1`.
    pub new_vertices: usize,
}

/// Least-squares line `y = intercept + slope * x` with its residual sum of squares.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub rss: f64,
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> LineFit {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let rss = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    LineFit { slope, intercept, rss }
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthProfile {
    pub family: String,
    pub rows: Vec<GrowthRow>,
    /// Fit of `log |B|` against `r` over the top half of radii.
    pub exponential_fit: Option<LineFit>,
    /// Fit of `log |B|` against `log r` over the top half of radii.
    pub polynomial_fit: Option<LineFit>,
    pub class: GrowthClass,
    /// Set when the size cap stopped enumeration before `r_max`.
    pub truncated: bool,
}

impl GrowthProfile {
    pub fn exponential_rate(&self) -> Option<f64> {
        self.exponential_fit.map(|f| f.slope)
    }

    pub fn polynomial_degree(&self) -> Option<f64> {
        self.polynomial_fit.map(|f| f.slope)
    }

    /// Slope of `log |B|` against `log r` over radii in `[lo, hi]`.
    pub fn loglog_slope(&self, lo: usize, hi: usize) -> Option<f64> {
        let pts: Vec<_> = self.rows.iter().filter(|row| row.r >= lo.max(1) && row.r <= hi).collect();
        if pts.len() < 2 {
            return None;
        }
        let xs: Vec<f64> = pts.iter().map(|row| (row.r as f64).ln()).collect();
        let ys: Vec<f64> = pts.iter().map(|row| (row.ball as f64).ln()).collect();
        Some(fit_line(&xs, &ys).slope)
    }
}

/// Ball and boundary sizes for `r = 0..=r_max` from one breadth-first sweep
/// to depth `r_max + 1`.
///
/// Since the boundary of `B(a, r)` is the sphere at distance `r + 1`, the
/// boundary count and the new-vertex count agree; both are kept so the
/// identity `|B(a, s)| = 1 + Σ_{r<s} |∂B(a, r)|` can be checked downstream.
pub fn growth_profile(
    center: &GroupElement,
    steps: &StepDistribution,
    r_max: usize,
    cap: usize,
) -> Result<GrowthProfile> {
    if r_max < 2 {
        return Err(Error::InvalidArgument(format!("growth profile needs r_max >= 2, got {r_max}")));
    }
    let mut dist: HashMap<GroupElement, usize> = HashMap::from([(center.clone(), 0)]);
    let mut layers = vec![1usize];
    let mut queue = VecDeque::from([center.clone()]);
    let mut truncated = false;
    'bfs: while let Some(v) = queue.pop_front() {
        let d = dist[&v];
        if d > r_max {
            break;
        }
        for s in steps.steps() {
            let w = v.try_mul(&s.element)?;
            if !dist.contains_key(&w) {
                if dist.len() >= cap {
                    truncated = true;
                    break 'bfs;
                }
                dist.insert(w.clone(), d + 1);
                if layers.len() <= d + 1 {
                    layers.push(0);
                }
                layers[d + 1] += 1;
                queue.push_back(w);
            }
        }
    }
    // A truncated sweep leaves the last started layer incomplete.
    let complete = if truncated { layers.len().saturating_sub(2) } else { layers.len() - 1 };
    let top = complete.min(r_max + 1);
    let mut rows = Vec::new();
    let mut ball = 0usize;
    for r in 0..top {
        ball += layers[r];
        let next = layers[r + 1];
        rows.push(GrowthRow { r, ball, boundary: next, new_vertices: next });
    }
    let truncated = truncated || rows.len() < r_max + 1;

    let r_top = rows.last().map_or(0, |row| row.r);
    let fit_rows: Vec<&GrowthRow> = rows.iter().filter(|row| row.r >= 1 && 2 * row.r >= r_top).collect();
    let (exponential_fit, polynomial_fit) = if fit_rows.len() >= 3 {
        let ys: Vec<f64> = fit_rows.iter().map(|row| (row.ball as f64).ln()).collect();
        let lin: Vec<f64> = fit_rows.iter().map(|row| row.r as f64).collect();
        let log: Vec<f64> = fit_rows.iter().map(|row| (row.r as f64).ln()).collect();
        (Some(fit_line(&lin, &ys)), Some(fit_line(&log, &ys)))
    } else {
        (None, None)
    };
    let class = match (exponential_fit, polynomial_fit) {
        (Some(e), Some(p)) if e.rss < p.rss && e.slope > EXPONENTIAL_RATE_FLOOR => GrowthClass::Exponential,
        (Some(e), Some(p)) if p.rss < e.rss => GrowthClass::Polynomial,
        _ => GrowthClass::Undetermined,
    };
    Ok(GrowthProfile {
        family: steps.family().to_string(),
        rows,
        exponential_fit,
        polynomial_fit,
        class,
        truncated,
    })
}
