//! Monte Carlo estimates of exit measures, used as an independent check on
//! the linear solver.
//!
//! Walk `i` draws from stream `i` of a ChaCha8 generator seeded with the run
//! seed, so counts do not depend on thread scheduling. Steps are chosen by
//! comparing one `u64` draw with the cumulative probabilities scaled to
//! `2^64`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::ball::{DirectedBall, Target};
use crate::error::{Error, Result};
use crate::exit::ExitMeasure;
use crate::group::GroupElement;
use crate::linalg::Scalar;

/// Steps after which a walk is abandoned.
pub const STEP_CAP: u64 = 1_000_000;

#[derive(Clone, Debug)]
pub struct EmpiricalExitMeasure {
    ball: Arc<DirectedBall>,
    start: usize,
    samples: u64,
    counts: Vec<u64>,
    capped: u64,
    seed: u64,
}

impl EmpiricalExitMeasure {
    /// Wraps precomputed counts; `samples` is their sum.
    pub fn from_counts(ball: Arc<DirectedBall>, start: usize, counts: Vec<u64>, seed: u64) -> Result<Self> {
        if counts.len() != ball.boundary_len() || start >= ball.interior_len() {
            return Err(Error::InvalidArgument("counts do not match the ball".into()));
        }
        let samples = counts.iter().sum();
        Ok(Self { ball, start, samples, counts, capped: 0, seed })
    }

    pub fn ball(&self) -> &Arc<DirectedBall> {
        &self.ball
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn samples(&self) -> u64 {
        self.samples
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Walks abandoned at [`STEP_CAP`]; a run is valid only when this is zero.
    pub fn capped(&self) -> u64 {
        self.capped
    }

    pub fn is_valid(&self) -> bool {
        self.capped == 0
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn frequency(&self, x: usize) -> f64 {
        self.counts[x] as f64 / self.samples as f64
    }
}

fn thresholds(ball: &DirectedBall) -> Vec<u128> {
    let scale = BigInt::from(1u128 << 64);
    let mut acc = num_rational::BigRational::from_integer(0.into());
    let mut out = Vec::with_capacity(ball.steps().len());
    for step in ball.steps().steps() {
        acc += &step.prob;
        out.push((acc.numer() * &scale / acc.denom()).to_u128().expect("at most 2^64"));
    }
    *out.last_mut().expect("non-empty support") = 1u128 << 64;
    out
}

/// Runs `n` walks from `start` until they leave the ball.
pub fn sample_exit(ball: Arc<DirectedBall>, start: &GroupElement, n: u64, seed: u64) -> Result<EmpiricalExitMeasure> {
    if n == 0 {
        return Err(Error::InvalidArgument("sample count must be positive".into()));
    }
    let s = ball.interior_index(start)?;
    let cuts = thresholds(&ball);
    let m = ball.boundary_len();
    let base = ChaCha8Rng::seed_from_u64(seed);
    let tally = (0..n)
        .into_par_iter()
        .fold(
            || vec![0u64; m + 1],
            |mut acc, i| {
                let mut rng = base.clone();
                rng.set_stream(i);
                let mut v = s;
                let mut steps = 0;
                loop {
                    if steps == STEP_CAP {
                        acc[m] += 1;
                        break;
                    }
                    let u = rng.next_u64() as u128;
                    let k = cuts.partition_point(|&c| c <= u);
                    steps += 1;
                    match ball.edges(v)[k].target {
                        Target::Interior(w) => v = w,
                        Target::Boundary(x) => {
                            acc[x] += 1;
                            break;
                        }
                    }
                }
                acc
            },
        )
        .reduce(
            || vec![0u64; m + 1],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let capped = tally[m];
    let counts = tally[..m].to_vec();
    Ok(EmpiricalExitMeasure { ball, start: s, samples: n, counts, capped, seed })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Comparison {
    pub max_abs_diff: f64,
    pub total_variation: f64,
    /// Largest `|count/N - μ| / sqrt(μ(1-μ)/N)` over boundary vertices with `μ ≥ 10/N`.
    pub z_max: f64,
}

/// Compares frequencies with the solved exit row of the same start vertex.
pub fn compare_to_exact<T: Scalar>(emp: &EmpiricalExitMeasure, em: &ExitMeasure<T>) -> Result<Comparison> {
    let (b1, b2) = (emp.ball(), em.ball());
    let same = Arc::ptr_eq(b1, b2)
        || (b1.center() == b2.center()
            && b1.radius() == b2.radius()
            && b1.steps() == b2.steps()
            && b1.boundary() == b2.boundary());
    if !same {
        return Err(Error::InvalidArgument("empirical and exact measures are on different balls".into()));
    }
    compare_to_row(emp, em.row(emp.start()))
}

/// [`compare_to_exact`] against a single solved row `μ(start, ·)`.
pub fn compare_to_row<T: Scalar>(emp: &EmpiricalExitMeasure, row: &[T]) -> Result<Comparison> {
    if row.len() != emp.counts().len() {
        return Err(Error::InvalidArgument("exit row does not match the ball boundary".into()));
    }
    let n = emp.samples() as f64;
    let mut out = Comparison { max_abs_diff: 0.0, total_variation: 0.0, z_max: 0.0 };
    for (x, mu) in row.iter().enumerate() {
        let mu = mu.to_f64();
        let d = (emp.frequency(x) - mu).abs();
        out.max_abs_diff = out.max_abs_diff.max(d);
        out.total_variation += d / 2.0;
        if mu >= 10.0 / n && mu < 1.0 {
            out.z_max = out.z_max.max(d / (mu * (1.0 - mu) / n).sqrt());
        }
    }
    Ok(out)
}

/// Rounds `μ(start, ·) N` to integers summing to `N` by largest remainders.
pub fn rounded_counts<T: Scalar>(em: &ExitMeasure<T>, start: usize, n: u64) -> Vec<u64> {
    let scaled: Vec<f64> = em.row(start).iter().map(|mu| mu.to_f64() * n as f64).collect();
    let mut counts: Vec<u64> = scaled.iter().map(|x| x.floor() as u64).collect();
    let short = n.saturating_sub(counts.iter().sum());
    let mut order: Vec<usize> = (0..scaled.len()).collect();
    order.sort_by(|&i, &j| (scaled[j] - scaled[j].floor()).total_cmp(&(scaled[i] - scaled[i].floor())).then(i.cmp(&j)));
    for &i in order.iter().take(short as usize) {
        counts[i] += 1;
    }
    counts
}
