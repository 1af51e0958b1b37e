//! Normalized exit-measure functions `f_n(v) = μ(v, x_n) / μ(a, x_n)`, the
//! monotonicity of `ε` under inclusion, the geodesic telescoping chain and
//! the growth certificate.

use std::collections::{BTreeMap, VecDeque};
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::ball::{DirectedBall, Target};
use crate::error::{Error, Result};
use crate::exit::{epsilon_from_rows, ExitMeasure, ExitSolver};
use crate::group::{Group, GroupElement, StepDistribution};
use crate::linalg::Scalar;

/// Outcome of [`select_extremal_boundary`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extremal {
    Boundary(usize),
    /// Every discrepancy is zero.
    MeasuresIdentical,
}

/// The boundary vertex maximizing `|μ(a,x) - μ(b,x)| / μ(a,x)`.
pub fn select_extremal_boundary<T: Scalar>(
    em: &ExitMeasure<T>,
    a: &GroupElement,
    b: &GroupElement,
) -> Result<Extremal> {
    Ok(match em.epsilon(a, b)?.argmax {
        Some(x) => Extremal::Boundary(x),
        None => Extremal::MeasuresIdentical,
    })
}

/// A function on a ball and its boundary.
#[derive(Clone, Debug)]
pub struct HarmonicApprox<T> {
    ball: Arc<DirectedBall>,
    base: usize,
    target: Option<usize>,
    interior: Vec<T>,
    boundary: Vec<T>,
}

/// Structural checks on a [`HarmonicApprox`].
#[derive(Clone, Debug)]
pub struct HarmonicReport<T> {
    pub base_value_is_one: bool,
    pub nonnegative: bool,
    /// Positive at every interior vertex from which the target is reachable
    /// inside the ball; vacuous without a target.
    pub positive_where_reachable: bool,
    pub harmonic_residual: T,
}

impl<T: Scalar> HarmonicReport<T> {
    pub fn holds(&self, tol: f64) -> bool {
        let harmonic = if T::EXACT { self.harmonic_residual.is_zero() } else { self.harmonic_residual.to_f64() <= tol };
        self.base_value_is_one && self.nonnegative && self.positive_where_reachable && harmonic
    }
}

impl<T: Scalar> HarmonicApprox<T> {
    /// `f_n(v) = μ(v, x) / μ(a, x)` on the interior, `[y = x] / μ(a, x)` on the boundary.
    pub fn build_fn(em: &ExitMeasure<T>, a: &GroupElement, x: usize) -> Result<Self> {
        let ball = em.ball().clone();
        let base = ball.interior_index(a)?;
        let norm = em.get(base, x).clone();
        if norm.is_zero() {
            return Err(Error::ZeroExit(format!("μ({a}, {}) = 0", ball.boundary_vertex(x))));
        }
        let interior = (0..ball.interior_len()).map(|v| em.get(v, x).div_ref(&norm)).collect();
        let mut boundary = vec![T::zero(); ball.boundary_len()];
        boundary[x] = T::one().div_ref(&norm);
        Ok(Self { ball, base, target: Some(x), interior, boundary })
    }

    pub fn constant(ball: Arc<DirectedBall>, value: T) -> Self {
        let interior = vec![value.clone(); ball.interior_len()];
        let boundary = vec![value; ball.boundary_len()];
        Self { ball, base: 0, target: None, interior, boundary }
    }

    pub fn ball(&self) -> &Arc<DirectedBall> {
        &self.ball
    }

    pub fn target(&self) -> Option<usize> {
        self.target
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn interior_values(&self) -> &[T] {
        &self.interior
    }

    pub fn boundary_values(&self) -> &[T] {
        &self.boundary
    }

    pub fn at(&self, t: Target) -> &T {
        match t {
            Target::Interior(v) => &self.interior[v],
            Target::Boundary(x) => &self.boundary[x],
        }
    }

    pub fn value(&self, g: &GroupElement) -> Option<&T> {
        self.ball.target_of(g).map(|t| self.at(t))
    }

    /// `max_v |f(v) - Σ_s p(s) f(v s)|` over the interior.
    pub fn harmonicity_residual(&self) -> T {
        let probs: Vec<T> = self.ball.steps().steps().iter().map(|s| T::from_rational(&s.prob)).collect();
        let mut worst = T::zero();
        for v in 0..self.ball.interior_len() {
            let mut avg = T::zero();
            for e in self.ball.edges(v) {
                avg.add_mul(&probs[e.step], self.at(e.target));
            }
            let r = (self.interior[v].clone() - avg).abs_val();
            if r > worst {
                worst = r;
            }
        }
        worst
    }

    pub fn check(&self) -> HarmonicReport<T> {
        let nonnegative = self.interior.iter().chain(&self.boundary).all(|v| *v >= T::zero());
        let positive_where_reachable = match self.target {
            None => true,
            Some(x) => reaching(&self.ball, x).into_iter().zip(&self.interior).all(|(r, v)| !r || *v > T::zero()),
        };
        let base_value_is_one = match self.target {
            Some(_) => self.interior[self.base] == T::one(),
            None => true,
        };
        HarmonicReport { base_value_is_one, nonnegative, positive_where_reachable, harmonic_residual: self.harmonicity_residual() }
    }
}

/// Interior vertices from which boundary vertex `x` is reachable without
/// leaving the ball.
fn reaching(ball: &DirectedBall, x: usize) -> Vec<bool> {
    let n = ball.interior_len();
    let mut preds = vec![Vec::new(); n];
    for v in 0..n {
        for e in ball.edges(v) {
            if let Target::Interior(w) = e.target {
                preds[w].push(v);
            }
        }
    }
    let mut seen = vec![false; n];
    let mut queue: VecDeque<usize> = ball.boundary_predecessors(x).iter().copied().collect();
    for &v in &queue {
        seen[v] = true;
    }
    while let Some(w) = queue.pop_front() {
        for &v in &preds[w] {
            if !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    seen
}

/// `|f(v) - Σ_x μ(v, x) f(x)|`.
pub fn optional_stopping_check<T: Scalar>(f: &HarmonicApprox<T>, em: &ExitMeasure<T>, v: usize) -> T {
    let mut sum = T::zero();
    for (mu, fx) in em.row(v).iter().zip(f.boundary_values()) {
        sum.add_mul(mu, fx);
    }
    (f.interior_values()[v].clone() - sum).abs_val()
}

/// [`optional_stopping_check`] maximized over the interior.
pub fn optional_stopping_max<T: Scalar>(f: &HarmonicApprox<T>, em: &ExitMeasure<T>) -> T {
    let mut worst = T::zero();
    for v in 0..em.ball().interior_len() {
        let r = optional_stopping_check(f, em, v);
        if r > worst {
            worst = r;
        }
    }
    worst
}

/// `ε(A; a, b)` against `ε(B; a, b)` for `A ⊆ B`.
#[derive(Clone, Debug, Serialize)]
pub struct MonotonicityReport<T> {
    pub eps_inner: T,
    pub eps_outer: T,
    pub holds: bool,
    /// Boundary vertices of `A` with `μ_A(a, y) = 0 < μ_A(b, y)`; when nonzero
    /// the inequality is not guaranteed.
    pub excluded_inner: usize,
}

/// Compares `ε` on nested balls; rejects pairs whose interiors are not nested.
pub fn verify_monotonicity<T: Scalar>(
    inner: Arc<DirectedBall>,
    outer: Arc<DirectedBall>,
    a: &GroupElement,
    b: &GroupElement,
) -> Result<MonotonicityReport<T>> {
    if outer.embed(&inner).is_none() {
        return Err(Error::NotNested(format!(
            "B({}, {}) is not contained in B({}, {})",
            inner.center(),
            inner.radius(),
            outer.center(),
            outer.radius()
        )));
    }
    let pair = |ball: Arc<DirectedBall>| -> Result<_> {
        let (ai, bi) = (ball.interior_index(a)?, ball.interior_index(b)?);
        let solver = ExitSolver::<T>::new(ball)?;
        Ok(epsilon_from_rows(&solver.row(ai), &solver.row(bi)))
    };
    let (ri, ro) = (pair(inner)?, pair(outer)?);
    Ok(MonotonicityReport { holds: ro.value <= ri.value, eps_inner: ri.value, eps_outer: ro.value, excluded_inner: ri.excluded_mass_count })
}

/// Result of a randomized verifier, serialized as a report.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub lemma: String,
    pub family: String,
    pub params: BTreeMap<String, String>,
    pub instances: usize,
    pub failures: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Random nested pairs `B(e, r_A) ⊆ B(c, r_B)` with `r_A ≤ r_B ≤ r_max` and
/// `c ∈ B(e, r_B - r_A)`, and random `a, b ∈ B(e, r_A)`. Instance `i` draws
/// from stream `i` of a generator seeded with `seed`.
pub fn monotonicity_suite(steps: &StepDistribution, instances: usize, r_max: usize, seed: u64) -> Result<SuiteReport> {
    use rand::Rng;
    if r_max == 0 {
        return Err(Error::InvalidArgument("radius bound must be positive".into()));
    }
    let group = Group::new(steps.family().clone())?;
    let e = group.identity();
    let balls: Vec<Arc<DirectedBall>> =
        (0..=r_max).map(|r| DirectedBall::build(e, steps, r).map(Arc::new)).collect::<Result<_>>()?;
    let outcomes: Vec<Result<Option<String>>> = (0..instances)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let rb = rng.random_range(1..=r_max);
            let ra = rng.random_range(1..=rb);
            let offset = &balls[rb - ra];
            let c = offset.vertex(rng.random_range(0..offset.interior_len())).clone();
            let inner = balls[ra].clone();
            let a = inner.vertex(rng.random_range(0..inner.interior_len())).clone();
            let b = inner.vertex(rng.random_range(0..inner.interior_len())).clone();
            let outer = Arc::new(DirectedBall::build(&c, steps, rb)?);
            let rep = verify_monotonicity::<BigRational>(inner, outer, &a, &b)?;
            Ok((!rep.holds || rep.excluded_inner > 0).then(|| {
                format!(
                    "instance {i}: A=B(e,{ra}) B=B({c},{rb}) a={a} b={b}: eps(A)={} eps(B)={} excluded={}",
                    rep.eps_inner, rep.eps_outer, rep.excluded_inner
                )
            }))
        })
        .collect();
    let mut failures = Vec::new();
    for o in outcomes {
        if let Some(f) = o? {
            failures.push(f);
        }
    }
    let params = BTreeMap::from([
        ("r_max".to_string(), r_max.to_string()),
        ("seed".to_string(), seed.to_string()),
    ]);
    Ok(SuiteReport { lemma: "monotonicity".into(), family: steps.family().to_string(), params, instances, failures })
}

/// One-step discrepancies on balls around a fixed center `a`:
/// `forward[s][k] = ε(B(a,s); a, a·s_k)` and `reverse[s][k] = ε(B(a,s); a·s_k, a)`
/// for `1 ≤ s ≤ r_max` and each step `s_k`. Row 0 is empty.
#[derive(Clone, Debug)]
pub struct OneStepTable<T> {
    pub forward: Vec<Vec<T>>,
    pub reverse: Vec<Vec<T>>,
}

impl<T: Scalar> OneStepTable<T> {
    pub fn build(center: &GroupElement, steps: &StepDistribution, r_max: usize) -> Result<Self> {
        let mut forward = vec![Vec::new()];
        let mut reverse = vec![Vec::new()];
        for s in 1..=r_max {
            let ball = Arc::new(DirectedBall::build(center, steps, s)?);
            let solver = ExitSolver::<T>::new(ball.clone())?;
            let row_a = solver.row(0);
            let (mut f, mut r) = (Vec::new(), Vec::new());
            for step in steps.steps() {
                let b = center.try_mul(&step.element)?;
                let row_b = solver.row(ball.interior_index(&b)?);
                f.push(epsilon_from_rows(&row_a, &row_b).value);
                r.push(epsilon_from_rows(&row_b, &row_a).value);
            }
            forward.push(f);
            reverse.push(r);
        }
        Ok(Self { forward, reverse })
    }

    pub fn r_max(&self) -> usize {
        self.forward.len() - 1
    }

    /// `max_k ε(B(a, s); a, a·s_k)`.
    pub fn forward_max(&self, s: usize) -> T {
        self.forward[s].iter().fold(T::zero(), |m, v| if *v > m { v.clone() } else { m })
    }
}

/// How one telescoping ratio is bounded.
#[derive(Clone, Debug, PartialEq)]
pub enum RatioBound<T> {
    /// Translated one-step discrepancies on `B(a, radius)`.
    Epsilon { radius: usize, forward: T, reverse: T },
    /// The final ratio `μ(γ_r, x)` is at least the step probability `p`.
    Step { p: T },
}

#[derive(Clone, Debug)]
pub struct RatioCheck<T> {
    /// `μ(γ_i, x) / μ(γ_{i+1}, x)`
    pub ratio: T,
    /// `|ratio - 1|`
    pub deviation: T,
    /// `|1 - μ(γ_{i+1}, x) / μ(γ_i, x)|`
    pub defect: T,
    /// `ε(B(a, r); γ_i, γ_{i+1})` when `γ_{i+1}` is interior.
    pub pair_epsilon: Option<T>,
    pub bound: RatioBound<T>,
    /// `deviation ≤ forward` (or `ratio ≥ p` for the last step).
    pub within_bound: bool,
    /// `defect ≤ pair_epsilon ≤ forward` and `deviation ≤ reverse`.
    pub chain_holds: bool,
}

#[derive(Clone, Debug)]
pub struct TelescopeRecord<T> {
    pub boundary: usize,
    pub geodesic: Vec<GroupElement>,
    pub checks: Vec<RatioCheck<T>>,
    pub product: T,
    /// `product == μ(a, x)`, exactly or to `1e-12` relative in float mode.
    pub product_matches: bool,
}

impl<T> TelescopeRecord<T> {
    pub fn ratios(&self) -> impl Iterator<Item = &T> {
        self.checks.iter().map(|c| &c.ratio)
    }
}

fn close<T: Scalar>(x: &T, y: &T) -> bool {
    if T::EXACT {
        x == y
    } else {
        (x.to_f64() - y.to_f64()).abs() <= 1e-12 * y.to_f64().abs().max(1e-300)
    }
}

/// Ratios `μ(γ_i, x) / μ(γ_{i+1}, x)` for `i = 0..=r` along the geodesic
/// `a = γ_0, ..., γ_{r+1} = x`, with `μ(x, x) = 1`, each checked against the
/// translated one-step bound. `table` must be centered at the ball's center.
pub fn geodesic_ratio_trace<T: Scalar>(em: &ExitMeasure<T>, table: &OneStepTable<T>, x: usize) -> Result<TelescopeRecord<T>> {
    let ball = em.ball();
    let r = ball.radius();
    if table.r_max() < r {
        return Err(Error::InvalidArgument(format!("one-step table reaches radius {}, need {r}", table.r_max())));
    }
    let path = ball.geodesic_indices(x);
    let mut targets: Vec<Target> = path.iter().map(|&v| Target::Interior(v)).collect();
    targets.push(Target::Boundary(x));
    let mu: Vec<T> = targets.iter().map(|&t| em.value_at(t, x)).collect();
    if let Some(i) = mu.iter().position(|m| m.is_zero()) {
        return Err(Error::ZeroExit(format!("μ(γ_{i}, {}) = 0", ball.boundary_vertex(x))));
    }
    let p = T::from_rational(ball.steps().min_prob());
    let mut checks = Vec::with_capacity(r + 1);
    let mut product = T::one();
    for i in 0..=r {
        let ratio = mu[i].div_ref(&mu[i + 1]);
        product = product.mul_ref(&ratio);
        let deviation = (ratio.clone() - T::one()).abs_val();
        let defect = (T::one() - mu[i + 1].div_ref(&mu[i])).abs_val();
        let step = ball
            .edges(path[i])
            .iter()
            .find(|e| e.target == targets[i + 1])
            .map(|e| e.step)
            .expect("geodesic follows edges");
        let pair_epsilon = match targets[i + 1] {
            Target::Interior(w) => Some(epsilon_from_rows(em.row(path[i]), em.row(w)).value),
            Target::Boundary(_) => None,
        };
        let check = if i < r {
            let forward = table.forward[r - i][step].clone();
            let reverse = table.reverse[r - i][step].clone();
            let pe = pair_epsilon.clone().expect("interior successor");
            RatioCheck {
                within_bound: deviation <= forward,
                chain_holds: defect <= pe && pe <= forward && deviation <= reverse,
                bound: RatioBound::Epsilon { radius: r - i, forward, reverse },
                ratio,
                deviation,
                defect,
                pair_epsilon,
            }
        } else {
            let ok = ratio >= p;
            RatioCheck {
                within_bound: ok,
                chain_holds: ok,
                bound: RatioBound::Step { p: p.clone() },
                ratio,
                deviation,
                defect,
                pair_epsilon,
            }
        };
        checks.push(check);
    }
    let product_matches = close(&product, &mu[0]);
    let geodesic = targets
        .iter()
        .map(|&t| match t {
            Target::Interior(v) => ball.vertex(v).clone(),
            Target::Boundary(j) => ball.boundary_vertex(j).clone(),
        })
        .collect();
    Ok(TelescopeRecord { boundary: x, geodesic, checks, product, product_matches })
}

/// Counts over every boundary vertex of one ball.
#[derive(Clone, Debug, Default, Serialize)]
pub struct TelescopeSummary {
    pub family: String,
    pub radius: usize,
    pub boundary: usize,
    pub ratios: usize,
    pub product_failures: usize,
    /// Ratios with `|ratio - 1|` above the forward one-step bound.
    pub bound_failures: usize,
    /// Ratios breaking the rigorous chain.
    pub chain_failures: usize,
}

impl TelescopeSummary {
    pub fn passed(&self) -> bool {
        self.product_failures == 0 && self.bound_failures == 0 && self.chain_failures == 0
    }
}

/// Runs [`geodesic_ratio_trace`] on every boundary vertex of `B(a, r)`.
pub fn telescope_ball<T: Scalar>(
    center: &GroupElement,
    steps: &StepDistribution,
    r: usize,
) -> Result<(TelescopeSummary, Vec<TelescopeRecord<T>>)> {
    let ball = Arc::new(DirectedBall::build(center, steps, r)?);
    let em = ExitSolver::<T>::new(ball.clone())?.measure();
    let table = OneStepTable::<T>::build(center, steps, r.max(1))?;
    let mut summary = TelescopeSummary { family: steps.family().to_string(), radius: r, boundary: ball.boundary_len(), ..Default::default() };
    let records = (0..ball.boundary_len()).map(|x| geodesic_ratio_trace(&em, &table, x)).collect::<Result<Vec<_>>>()?;
    for rec in &records {
        summary.ratios += rec.checks.len();
        summary.product_failures += usize::from(!rec.product_matches);
        summary.bound_failures += rec.checks.iter().filter(|c| !c.within_bound).count();
        summary.chain_failures += rec.checks.iter().filter(|c| !c.chain_holds).count();
    }
    Ok((summary, records))
}

#[derive(Clone, Debug)]
pub struct CertificateRow<T> {
    pub r: usize,
    /// `max_k ε(B(a, r); a, a·s_k)`
    pub one_step_max: T,
    /// One-step discrepancies are at most `δ` for every `s ∈ (r₀, r]`.
    pub premise_holds: bool,
    /// `(1 - δ)^{r - r₀} p^{r₀}`
    pub bound: BigRational,
    /// `(1 - δ)^{max(r - r₀, 0)} p^{min(r, r₀) + 1}`, what the telescoping
    /// chain yields for balls containing their radius-`r` sphere.
    pub chain_bound: BigRational,
    pub min_mu: T,
    pub boundary_size: usize,
    /// `min μ ≥ bound` and `|∂B| ≤ 1 / bound`.
    pub conclusion_holds: bool,
    /// `min μ ≥ chain_bound`.
    pub chain_conclusion_holds: bool,
}

#[derive(Clone, Debug)]
pub struct GrowthCertificate<T> {
    pub family: String,
    pub delta: BigRational,
    pub r0: usize,
    pub p: BigRational,
    pub rows: Vec<CertificateRow<T>>,
    /// Radii `s` at which some one-step discrepancy exceeds `δ`.
    pub failing_radii: Vec<usize>,
}

impl<T: Scalar> GrowthCertificate<T> {
    /// Radii `r > r₀` where the premise holds but the stated conclusion does
    /// not. At `r ≤ r₀` the premise is vacuous and the stated bound can exceed
    /// the true minimum, which is only guaranteed to be `p^{r+1}`.
    pub fn violations(&self) -> Vec<usize> {
        self.rows
            .iter()
            .filter(|r| r.r > self.r0 && r.premise_holds && !r.conclusion_holds)
            .map(|r| r.r)
            .collect()
    }

    /// Radii where the premise holds but the chain conclusion does not; any
    /// entry is a solver defect.
    pub fn chain_violations(&self) -> Vec<usize> {
        self.rows.iter().filter(|r| r.premise_holds && !r.chain_conclusion_holds).map(|r| r.r).collect()
    }

    /// Whether the premise holds on all of `(r₀, s_max]`.
    pub fn premise_holds(&self) -> bool {
        self.rows.last().is_some_and(|r| r.premise_holds)
    }
}

/// Checks the one-step premise `ε(B(e, s); e, e·s_k) ≤ δ` for `r₀ < s ≤ s_max`
/// and the resulting lower bound on `min_x μ_{B(e,r)}(e, x)` for `1 ≤ r ≤ s_max`.
pub fn growth_certificate<T: Scalar>(
    steps: &StepDistribution,
    delta: &BigRational,
    r0: usize,
    s_max: usize,
) -> Result<GrowthCertificate<T>> {
    if *delta <= BigRational::zero() || *delta >= BigRational::one() {
        return Err(Error::InvalidArgument(format!("delta {delta} not in (0, 1)")));
    }
    if r0 < 1 || r0 >= s_max {
        return Err(Error::InvalidArgument(format!("need 1 <= r0 < s_max, got r0={r0}, s_max={s_max}")));
    }
    let group = Group::new(steps.family().clone())?;
    let e = group.identity();
    let table = OneStepTable::<T>::build(e, steps, s_max)?;
    let p = steps.min_prob().clone();
    let keep = BigRational::one() - delta;
    let delta_t = T::from_rational(delta);
    let mut rows = Vec::with_capacity(s_max);
    let mut failing_radii = Vec::new();
    let mut premise = true;
    for r in 1..=s_max {
        let one_step_max = table.forward_max(r);
        if one_step_max > delta_t {
            failing_radii.push(r);
            if r > r0 {
                premise = false;
            }
        }
        let ball = Arc::new(DirectedBall::build(e, steps, r)?);
        let row = ExitSolver::<T>::new(ball.clone())?.row(0);
        let min_mu = row.iter().fold(T::one(), |m, v| if *v < m { v.clone() } else { m });
        let bound = keep.pow(r as i32 - r0 as i32) * p.pow(r0 as i32);
        let chain_bound = keep.pow(r.saturating_sub(r0) as i32) * p.pow(r.min(r0) as i32 + 1);
        let size_ok = BigRational::from_integer(ball.boundary_len().into()) <= bound.recip();
        rows.push(CertificateRow {
            r,
            premise_holds: premise,
            conclusion_holds: min_mu >= T::from_rational(&bound) && size_ok,
            chain_conclusion_holds: min_mu >= T::from_rational(&chain_bound),
            one_step_max,
            bound,
            chain_bound,
            min_mu,
            boundary_size: ball.boundary_len(),
        });
    }
    Ok(GrowthCertificate { family: steps.family().to_string(), delta: delta.clone(), r0, p, rows, failing_radii })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exit::exit_measure;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn setup(spec: &str, r: usize) -> (Group, ExitMeasure<BigRational>) {
        let g = Group::from_spec(spec).unwrap();
        let ball = Arc::new(DirectedBall::build(g.identity(), &g.uniform_steps(), r).unwrap());
        (g.clone(), exit_measure(ball).unwrap())
    }

    #[test]
    fn extremal_examples() {
        let (g, em) = setup("free:2", 1);
        let x = select_extremal_boundary(&em, g.identity(), &g.word("a").unwrap()).unwrap();
        assert_eq!(x, Extremal::Boundary(0));
        assert_eq!(
            select_extremal_boundary(&em, g.identity(), g.identity()).unwrap(),
            Extremal::MeasuresIdentical
        );
    }

    #[test]
    fn fn_values() {
        let (g, em) = setup("z:1", 2);
        let x = em.ball().boundary_index_of(&g.parse_element("3").unwrap()).unwrap();
        let f = HarmonicApprox::build_fn(&em, g.identity(), x).unwrap();
        assert_eq!(f.value(&g.parse_element("1").unwrap()), Some(&q(4, 3)));
        assert!(f.check().holds(0.0));
        assert!(optional_stopping_max(&f, &em).is_zero());

        let (g, em) = setup("free:2", 1);
        let f = HarmonicApprox::build_fn(&em, g.identity(), 0).unwrap();
        assert_eq!(f.value(&g.word("a").unwrap()), Some(&q(13, 4)));
        assert_eq!(f.value(g.identity()), Some(&q(1, 1)));
    }

    #[test]
    fn constant_is_harmonic() {
        let (_, em) = setup("heis", 2);
        let f = HarmonicApprox::constant(em.ball().clone(), q(1, 1));
        assert!(f.harmonicity_residual().is_zero());
    }

    #[test]
    fn monotone_z1() {
        let g = Group::from_spec("z:1").unwrap();
        let steps = g.uniform_steps();
        let one = g.parse_element("1").unwrap();
        let a = Arc::new(DirectedBall::build(g.identity(), &steps, 1).unwrap());
        let b = Arc::new(DirectedBall::build(g.identity(), &steps, 2).unwrap());
        let rep = verify_monotonicity::<BigRational>(a.clone(), b.clone(), g.identity(), &one).unwrap();
        assert_eq!((rep.eps_inner.clone(), rep.eps_outer.clone(), rep.holds), (q(1, 2), q(1, 3), true));
        assert!(matches!(
            verify_monotonicity::<BigRational>(b, a, g.identity(), &one),
            Err(Error::NotNested(_))
        ));
    }

    #[test]
    fn z1_trace() {
        let (g, em) = setup("z:1", 2);
        let table = OneStepTable::build(g.identity(), em.ball().steps(), 2).unwrap();
        let x = em.ball().boundary_index_of(&g.parse_element("3").unwrap()).unwrap();
        let rec = geodesic_ratio_trace(&em, &table, x).unwrap();
        let ratios: Vec<_> = rec.ratios().cloned().collect();
        assert_eq!(ratios, vec![q(3, 4), q(4, 5), q(5, 6)]);
        assert_eq!(rec.product, q(1, 2));
        assert!(rec.product_matches);
        assert!(rec.checks.iter().all(|c| c.within_bound && c.chain_holds));
    }

    #[test]
    fn certificate_z1() {
        let g = Group::from_spec("z:1").unwrap();
        let cert = growth_certificate::<BigRational>(&g.uniform_steps(), &q(1, 4), 4, 12).unwrap();
        assert!(cert.premise_holds());
        assert!(cert.violations().is_empty() && cert.chain_violations().is_empty());
        assert_eq!(cert.rows[4].one_step_max, q(1, 6));
        assert!(growth_certificate::<BigRational>(&g.uniform_steps(), &q(1, 4), 12, 12).is_err());
    }
}
