//! Exit measures `μ_S(v, x)` of a finite vertex set and the discrepancy
//! `ε(S; a, b)`.
//!
//! With `Q` the interior-to-interior step matrix and `R` the
//! interior-to-boundary one, the exit measure solves `(I - Q) M = R`. The
//! system is factored once, eliminating vertices in reverse breadth-first
//! order (outermost shell first), and then solved per boundary column or per
//! interior row, whichever is cheaper.

use std::io::Write;
use std::sync::Arc;

use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ball::{DirectedBall, Target};
use crate::error::{Error, Result};
use crate::group::{GroupElement, StepDistribution};
use crate::linalg::{Scalar, SparseLu, SparseMatrix};

pub const DEFAULT_EXACT_THRESHOLD: usize = 20_000;

/// Largest interior for which [`Mode::Auto`] still solves exactly.
pub const AUTO_EXACT_LIMIT: usize = 2_000;

/// Row-sum tolerance in float mode.
pub const FLOAT_ROW_SUM_TOL: f64 = 1e-12;

/// Harmonicity tolerance in float mode.
pub const FLOAT_HARMONIC_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
    /// Exact up to [`AUTO_EXACT_LIMIT`] interior vertices, float beyond.
    Auto,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Mode::Exact),
            "float" => Ok(Mode::Float),
            "auto" => Ok(Mode::Auto),
            _ => Err(Error::InvalidArgument(format!("unknown mode `{s}`"))),
        }
    }
}

/// A factored exit problem on one ball.
pub struct ExitSolver<T> {
    ball: Arc<DirectedBall>,
    lu: SparseLu<T>,
    /// Per interior vertex, the one-step probabilities of leaving to each boundary vertex.
    exits: Vec<Vec<(usize, T)>>,
}

impl<T: Scalar> ExitSolver<T> {
    pub fn new(ball: Arc<DirectedBall>) -> Result<Self> {
        Self::with_threshold(ball, DEFAULT_EXACT_THRESHOLD)
    }

    pub fn with_threshold(ball: Arc<DirectedBall>, exact_threshold: usize) -> Result<Self> {
        let n = ball.interior_len();
        if T::EXACT && n > exact_threshold {
            return Err(Error::ExactTooLarge { interior: n, threshold: exact_threshold });
        }
        let probs: Vec<T> = ball.steps().steps().iter().map(|s| T::from_rational(&s.prob)).collect();
        let mut a = SparseMatrix::new(n);
        let mut exits = vec![Vec::new(); n];
        for v in 0..n {
            let pv = position(n, v);
            a.add(pv, pv, T::one());
            for e in ball.edges(v) {
                match e.target {
                    Target::Interior(w) => a.add(pv, position(n, w), -probs[e.step].clone()),
                    Target::Boundary(x) => exits[v].push((x, probs[e.step].clone())),
                }
            }
        }
        let lu = SparseLu::factor(a)?;
        Ok(Self { ball, lu, exits })
    }

    pub fn ball(&self) -> &Arc<DirectedBall> {
        &self.ball
    }

    /// `μ(v, ·)` over the boundary, via one transposed solve.
    pub fn row(&self, v: usize) -> Vec<T> {
        let n = self.ball.interior_len();
        let mut rhs = vec![T::zero(); n];
        rhs[position(n, v)] = T::one();
        let green = self.lu.solve_transpose(&rhs);
        let mut out = vec![T::zero(); self.ball.boundary_len()];
        for (u, exits) in self.exits.iter().enumerate() {
            let g = &green[position(n, u)];
            if g.is_zero() {
                continue;
            }
            for (x, p) in exits {
                out[*x].add_mul(g, p);
            }
        }
        out
    }

    /// `μ(·, x)` over the interior, via one solve.
    pub fn column(&self, x: usize) -> Vec<T> {
        let n = self.ball.interior_len();
        let mut rhs = vec![T::zero(); n];
        for (u, exits) in self.exits.iter().enumerate() {
            for (y, p) in exits {
                if *y == x {
                    rhs[position(n, u)] = rhs[position(n, u)].clone() + p.clone();
                }
            }
        }
        let sol = self.lu.solve(&rhs);
        (0..n).map(|v| sol[position(n, v)].clone()).collect()
    }

    /// The full matrix `μ(v, x)`.
    pub fn measure(&self) -> ExitMeasure<T> {
        let n = self.ball.interior_len();
        let m = self.ball.boundary_len();
        let rows = if n <= m {
            (0..n).map(|v| self.row(v)).collect()
        } else {
            let mut rows = vec![Vec::with_capacity(m); n];
            for x in 0..m {
                for (row, val) in rows.iter_mut().zip(self.column(x)) {
                    row.push(val);
                }
            }
            rows
        };
        ExitMeasure { ball: self.ball.clone(), rows }
    }
}

fn position(n: usize, v: usize) -> usize {
    n - 1 - v
}

/// Solves the full exit measure of a ball.
pub fn exit_measure<T: Scalar>(ball: Arc<DirectedBall>) -> Result<ExitMeasure<T>> {
    Ok(ExitSolver::<T>::new(ball)?.measure())
}

/// `M[v][x] = μ_S(v, x)` for interior `v` and boundary `x`.
#[derive(Clone, Debug)]
pub struct ExitMeasure<T> {
    ball: Arc<DirectedBall>,
    rows: Vec<Vec<T>>,
}

/// Outcome of checking the structural invariants of an exit measure.
#[derive(Clone, Debug)]
pub struct ExitInvariants<T> {
    pub nonnegative: bool,
    /// `max_v |Σ_x μ(v, x) - 1|`
    pub row_sum_defect: T,
    /// `max_{v,x} |μ(v, x) - Σ_s p(s) μ(v s, x)|` with `μ(y, x) = [y = x]` on the boundary.
    pub harmonic_residual: T,
    /// `μ(center, x) > 0` for every boundary `x`.
    pub center_positive: bool,
}

impl<T: Scalar> ExitInvariants<T> {
    /// Exact equality in exact mode; the float tolerances otherwise.
    pub fn holds(&self) -> bool {
        let (row_ok, harm_ok) = if T::EXACT {
            (self.row_sum_defect.is_zero(), self.harmonic_residual.is_zero())
        } else {
            (
                self.row_sum_defect.to_f64() <= FLOAT_ROW_SUM_TOL,
                self.harmonic_residual.to_f64() <= FLOAT_HARMONIC_TOL,
            )
        };
        self.nonnegative && row_ok && harm_ok && self.center_positive
    }
}

impl<T: Scalar> ExitMeasure<T> {
    pub fn from_rows(ball: Arc<DirectedBall>, rows: Vec<Vec<T>>) -> Self {
        Self { ball, rows }
    }

    pub fn ball(&self) -> &Arc<DirectedBall> {
        &self.ball
    }

    pub fn is_exact(&self) -> bool {
        T::EXACT
    }

    pub fn get(&self, v: usize, x: usize) -> &T {
        &self.rows[v][x]
    }

    pub fn row(&self, v: usize) -> &[T] {
        &self.rows[v]
    }

    pub fn rows(&self) -> &[Vec<T>] {
        &self.rows
    }

    /// `μ(y, x)` for `y` interior or on the boundary.
    pub fn value_at(&self, y: Target, x: usize) -> T {
        match y {
            Target::Interior(v) => self.rows[v][x].clone(),
            Target::Boundary(b) if b == x => T::one(),
            Target::Boundary(_) => T::zero(),
        }
    }

    pub fn check_invariants(&self) -> ExitInvariants<T> {
        let probs: Vec<T> = self.ball.steps().steps().iter().map(|s| T::from_rational(&s.prob)).collect();
        let mut nonnegative = true;
        let mut row_sum_defect = T::zero();
        let mut harmonic_residual = T::zero();
        for (v, row) in self.rows.iter().enumerate() {
            let mut sum = T::zero();
            for val in row {
                if *val < T::zero() {
                    nonnegative = false;
                }
                sum = sum + val.clone();
            }
            let d = (sum - T::one()).abs_val();
            if d > row_sum_defect {
                row_sum_defect = d;
            }
            for x in 0..row.len() {
                let mut avg = T::zero();
                for e in self.ball.edges(v) {
                    avg.add_mul(&probs[e.step], &self.value_at(e.target, x));
                }
                let r = (row[x].clone() - avg).abs_val();
                if r > harmonic_residual {
                    harmonic_residual = r;
                }
            }
        }
        let center_positive = self.rows[0].iter().all(|v| *v > T::zero());
        ExitInvariants { nonnegative, row_sum_defect, harmonic_residual, center_positive }
    }

    pub fn epsilon(&self, a: &GroupElement, b: &GroupElement) -> Result<EpsilonReport<T>> {
        let ai = self.ball.interior_index(a)?;
        let bi = self.ball.interior_index(b)?;
        Ok(epsilon_from_rows(&self.rows[ai], &self.rows[bi]))
    }

    /// Writes `interior_index, boundary_index, <value columns>` rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "interior_index,boundary_index,{}", T::CSV_COLUMNS.join(","))?;
        for (v, row) in self.rows.iter().enumerate() {
            for (x, val) in row.iter().enumerate() {
                writeln!(w, "{},{},{}", v, x, val.csv_fields().join(","))?;
            }
        }
        Ok(())
    }
}

/// `ε(S; a, b)` with its maximizer and per-boundary discrepancies.
#[derive(Clone, Debug, PartialEq)]
pub struct EpsilonReport<T> {
    pub value: T,
    /// Boundary index attaining the maximum (smallest index on ties), `None`
    /// when every discrepancy is zero.
    pub argmax: Option<usize>,
    /// `(x, |μ(a,x) - μ(b,x)| / μ(a,x))` for every `x` with `μ(a, x) > 0`.
    pub discrepancies: Vec<(usize, T)>,
    /// Boundary vertices with `μ(a, x) = 0 < μ(b, x)`, excluded from the maximum.
    pub excluded_mass_count: usize,
}

/// Computes `ε` from the two exit rows `μ(a, ·)` and `μ(b, ·)`.
pub fn epsilon_from_rows<T: Scalar>(row_a: &[T], row_b: &[T]) -> EpsilonReport<T> {
    let mut value = T::zero();
    let mut argmax = None;
    let mut discrepancies = Vec::new();
    let mut excluded_mass_count = 0;
    for (x, (ma, mb)) in row_a.iter().zip(row_b).enumerate() {
        if *ma > T::zero() {
            let d = (ma.clone() - mb.clone()).abs_val().div_ref(ma);
            if d > value {
                value = d.clone();
                argmax = Some(x);
            }
            discrepancies.push((x, d));
        } else if *mb > T::zero() {
            excluded_mass_count += 1;
        }
    }
    EpsilonReport { value, argmax, discrepancies, excluded_mass_count }
}

/// `max_x |μ_B(a, x) - Σ_{y ∈ ∂A} μ_A(a, y) μ_B(y, x)|` for nested `A ⊆ B`,
/// the strong Markov decomposition at the exit time from `A`.
pub fn strong_markov_residual<T: Scalar>(
    inner: &ExitMeasure<T>,
    outer: &ExitMeasure<T>,
    a: &GroupElement,
) -> Result<T> {
    let a_in = inner.ball().interior_index(a)?;
    let a_out = outer.ball().interior_index(a)?;
    let mut composed = vec![T::zero(); outer.ball().boundary_len()];
    for (y, mu_a_y) in inner.row(a_in).iter().enumerate() {
        let yv = inner.ball().boundary_vertex(y);
        let target = outer
            .ball()
            .target_of(yv)
            .ok_or_else(|| Error::NotNested(format!("exit vertex {yv} of the inner set is not in the outer closure")))?;
        for (x, c) in composed.iter_mut().enumerate() {
            c.add_mul(mu_a_y, &outer.value_at(target, x));
        }
    }
    let mut worst = T::zero();
    for (x, c) in composed.into_iter().enumerate() {
        let d = (outer.get(a_out, x).clone() - c).abs_val();
        if d > worst {
            worst = d;
        }
    }
    Ok(worst)
}

/// A value produced in either arithmetic mode.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Exact(BigRational),
    Float(f64),
}

impl Value {
    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(q) => q.to_f64(),
            Value::Float(x) => *x,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Value::Exact(_))
    }
}

impl std::fmt::Display for Value {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Value::Exact(q) => write!(f, "{q}"),
            Value::Float(x) => write!(f, "{x:e}"),
        }
    }
}

/// One radius of an ε scan.
#[derive(Clone, Debug)]
pub struct ScanPoint {
    pub r: usize,
    pub value: Value,
    pub argmax: Option<GroupElement>,
    pub excluded_mass_count: usize,
    /// `μ(b, x_n) / μ(a, x_n)` at the maximizer `x_n`, the value at `b` of the
    /// normalized harmonic approximation built from this ball.
    pub fn_at_b: Option<Value>,
    pub interior: usize,
    pub boundary: usize,
}

struct PairSolve<T> {
    report: EpsilonReport<T>,
    fn_at_b: Option<T>,
}

fn solve_pair<T: Scalar>(ball: &Arc<DirectedBall>, ai: usize, bi: usize) -> Result<PairSolve<T>> {
    let solver = ExitSolver::<T>::new(ball.clone())?;
    let (row_a, row_b) = (solver.row(ai), solver.row(bi));
    let report = epsilon_from_rows(&row_a, &row_b);
    let fn_at_b = report.argmax.map(|x| row_b[x].div_ref(&row_a[x]));
    Ok(PairSolve { report, fn_at_b })
}

/// `ε(B(a, r); a, b)` at a single radius.
pub fn epsilon_at(
    a: &GroupElement,
    b: &GroupElement,
    steps: &StepDistribution,
    r: usize,
    mode: Mode,
) -> Result<ScanPoint> {
    epsilon_on_ball(Arc::new(DirectedBall::build(a, steps, r)?), b, mode)
}

/// `ε(S; a, b)` on a prebuilt ball centered at `a`.
pub fn epsilon_on_ball(ball: Arc<DirectedBall>, b: &GroupElement, mode: Mode) -> Result<ScanPoint> {
    let bi = ball.interior_index(b)?;
    let exact = match mode {
        Mode::Exact => true,
        Mode::Float => false,
        Mode::Auto => ball.interior_len() <= AUTO_EXACT_LIMIT,
    };
    let (value, argmax, excluded, fn_at_b) = if exact {
        let s = solve_pair::<BigRational>(&ball, 0, bi)?;
        (Value::Exact(s.report.value), s.report.argmax, s.report.excluded_mass_count, s.fn_at_b.map(Value::Exact))
    } else {
        let s = solve_pair::<f64>(&ball, 0, bi)?;
        (Value::Float(s.report.value), s.report.argmax, s.report.excluded_mass_count, s.fn_at_b.map(Value::Float))
    };
    Ok(ScanPoint {
        r: ball.radius(),
        value,
        argmax: argmax.map(|x| ball.boundary_vertex(x).clone()),
        excluded_mass_count: excluded,
        fn_at_b,
        interior: ball.interior_len(),
        boundary: ball.boundary_len(),
    })
}

/// `r ↦ ε(B(a, r); a, b)` over `radii`, solved concurrently. Requires
/// `b ∈ B(a, min r)`.
pub fn epsilon_scan(
    a: &GroupElement,
    b: &GroupElement,
    steps: &StepDistribution,
    radii: &[usize],
    mode: Mode,
) -> Result<Vec<ScanPoint>> {
    let r_min = *radii.iter().min().ok_or_else(|| Error::InvalidArgument("empty radius range".into()))?;
    let first = DirectedBall::build(a, steps, r_min)?;
    if !first.contains(b) {
        return Err(Error::NotInterior(format!("{b} (not in B({a}, {r_min}))")));
    }
    radii.par_iter().map(|&r| epsilon_at(a, b, steps, r, mode)).collect()
}

/// Whether a sequence of scan values is nonincreasing, exactly when both
/// neighbours are exact and within `tol` otherwise.
pub fn is_nonincreasing(points: &[ScanPoint], tol: f64) -> bool {
    points.windows(2).all(|w| match (&w[0].value, &w[1].value) {
        (Value::Exact(x), Value::Exact(y)) => y <= x,
        (x, y) => y.to_f64() <= x.to_f64() + tol,
    })
}
