//! Experiment runners. Each writes its files through a [`Sink`] and returns
//! the invariant failures it observed.

use std::sync::Arc;

use harmlab::ball::DirectedBall;
use harmlab::cache::BallCache;
use harmlab::exit::{epsilon_on_ball, is_nonincreasing, ExitSolver, ScanPoint, AUTO_EXACT_LIMIT, FLOAT_HARMONIC_TOL};
use harmlab::growth::growth_profile;
use harmlab::harmonic::{
    growth_certificate, monotonicity_suite, optional_stopping_max, select_extremal_boundary, telescope_ball,
    Extremal, HarmonicApprox, RatioBound,
};
use harmlab::linalg::Scalar;
use harmlab::walk::{compare_to_row, sample_exit};
use harmlab::{GroupElement, GroupFamily, Mode, StepDistribution, Value};
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Experiment, ExperimentConfig, Resolved};
use crate::output::{float, slug, Sink};
use crate::RunError;

/// What a finished run observed.
#[derive(Debug, Default)]
pub struct Report {
    pub lines: Vec<String>,
    pub failures: Vec<String>,
}

pub fn run(cfg: &ExperimentConfig, sink: &mut Sink) -> Result<Report, RunError> {
    let r = cfg.resolve()?;
    let mut report = Report::default();
    match cfg.experiment {
        Experiment::Ball => ball(cfg, &r, sink, &mut report)?,
        Experiment::Exit => exit(cfg, &r, sink, &mut report)?,
        Experiment::EpsilonScan => epsilon_scan(cfg, &r, sink, &mut report)?,
        Experiment::Growth => growth(cfg, &r, sink, &mut report)?,
        Experiment::Certify => certify(cfg, &r, sink, &mut report)?,
        Experiment::Lemma2 => lemma2(cfg, &r, sink, &mut report)?,
        Experiment::Telescope => telescope(cfg, &r, sink, &mut report)?,
        Experiment::Simulate => simulate(cfg, &r, sink, &mut report)?,
        Experiment::ProbeGrigorchuk => probe(cfg, &r, sink, &mut report)?,
    }
    Ok(report)
}

fn build(cfg: &ExperimentConfig, center: &GroupElement, steps: &StepDistribution, radius: usize) -> Result<DirectedBall, RunError> {
    let cache = BallCache::from_env();
    if let Some(c) = &cache {
        if let Some(b) = c.load(center, steps, radius)? {
            return Ok(b);
        }
    }
    let b = DirectedBall::build_capped(center, steps, radius, cfg.size_cap)?;
    if let Some(c) = &cache {
        c.store(&b)?;
    }
    Ok(b)
}

fn use_exact(mode: Mode, interior: usize) -> bool {
    match mode {
        Mode::Exact => true,
        Mode::Float => false,
        Mode::Auto => interior <= AUTO_EXACT_LIMIT,
    }
}

fn mode_name(exact: bool) -> &'static str {
    if exact {
        "exact"
    } else {
        "float"
    }
}

/// `3/4`, `1` or `7.5e-1`.
fn show<T: Scalar>(v: &T) -> String {
    match v.csv_fields().as_slice() {
        [n, d] if d == "1" => n.clone(),
        [n, d] => format!("{n}/{d}"),
        fields => fields.join(","),
    }
}

fn ball(cfg: &ExperimentConfig, r: &Resolved, sink: &mut Sink, report: &mut Report) -> Result<(), RunError> {
    let radius = cfg.radius_max;
    let b = build(cfg, &r.a, &r.steps, radius)?;
    let mut rows = Vec::new();
    for (i, v) in b.vertices().iter().enumerate() {
        rows.push(vec!["interior".into(), i.to_string(), v.to_string(), b.distance(i).to_string()]);
    }
    for (j, x) in b.boundary().iter().enumerate() {
        rows.push(vec!["boundary".into(), j.to_string(), x.to_string(), (radius + 1).to_string()]);
    }
    let name = format!("ball_{}_r{radius}", slug(&cfg.group));
    sink.csv(&format!("{name}.csv"), &["kind", "index", "element", "distance"], &rows)?;
    let layers: Vec<Vec<String>> = b
        .layer_sizes()
        .iter()
        .enumerate()
        .map(|(d, n)| vec![d.to_string(), n.to_string(), "count".into()])
        .collect();
    sink.plot(&format!("{name}_layers.tsv"), &["r", "value", "mode"], &layers)?;
    report.lines.push(format!(
        "B({}, {radius}) in {}: {} interior, {} boundary",
        r.a,
        cfg.group,
        b.interior_len(),
        b.boundary_len()
    ));
    Ok(())
}

#[derive(Serialize)]
struct ExitSummary {
    family: String,
    center: String,
    radius: usize,
    mode: &'static str,
    interior: usize,
    boundary: usize,
    nonnegative: bool,
    row_sum_defect: String,
    harmonic_residual: String,
    center_positive: bool,
    invariants_hold: bool,
    fn_target: Option<String>,
    fn_invariants_hold: Option<bool>,
    optional_stopping_residual: Option<String>,
}

/// Exit measure, its invariants and the normalized function at the `(a, b)`
/// maximizer.
fn exit_with<T: Scalar>(ball: Arc<DirectedBall>, r: &Resolved) -> Result<(harmlab::ExitMeasure<T>, ExitSummary), RunError> {
    let em = ExitSolver::<T>::new(ball.clone())?.measure();
    let inv = em.check_invariants();
    let mut summary = ExitSummary {
        family: ball.steps().family().to_string(),
        center: ball.center().to_string(),
        radius: ball.radius(),
        mode: mode_name(T::EXACT),
        interior: ball.interior_len(),
        boundary: ball.boundary_len(),
        nonnegative: inv.nonnegative,
        row_sum_defect: show(&inv.row_sum_defect),
        harmonic_residual: show(&inv.harmonic_residual),
        center_positive: inv.center_positive,
        invariants_hold: inv.holds(),
        fn_target: None,
        fn_invariants_hold: None,
        optional_stopping_residual: None,
    };
    if ball.contains(&r.b) {
        if let Extremal::Boundary(x) = select_extremal_boundary(&em, ball.center(), &r.b)? {
            let f = HarmonicApprox::build_fn(&em, ball.center(), x)?;
            let os = optional_stopping_max(&f, &em);
            let os_ok = if T::EXACT { os.is_zero() } else { os.to_f64() <= FLOAT_HARMONIC_TOL };
            summary.fn_target = Some(ball.boundary_vertex(x).to_string());
            summary.fn_invariants_hold = Some(f.check().holds(FLOAT_HARMONIC_TOL) && os_ok);
            summary.optional_stopping_residual = Some(show(&os));
        }
    }
    Ok((em, summary))
}

fn exit(cfg: &ExperimentConfig, r: &Resolved, sink: &mut Sink, report: &mut Report) -> Result<(), RunError> {
    let radius = cfg.radius_max;
    let ball = Arc::new(build(cfg, &r.a, &r.steps, radius)?);
    let name = format!("exit_{}_r{radius}", slug(&cfg.group));
    let mut bytes = Vec::new();
    let summary = if use_exact(cfg.mode, ball.interior_len()) {
        let (em, s) = exit_with::<BigRational>(ball, r)?;
        em.write_csv(&mut bytes)?;
        s
    } else {
        let (em, s) = exit_with::<f64>(ball, r)?;
        em.write_csv(&mut bytes)?;
        s
    };
    sink.write(&format!("{name}.csv"), &bytes)?;
    sink.json(&format!("{name}.json"), &summary)?;
    if !summary.invariants_hold {
        report.failures.push(format!("exit measure invariants fail on {name}"));
    }
    if summary.fn_invariants_hold == Some(false) {
        report.failures.push(format!("f_n invariants fail on {name}"));
    }
    report.lines.push(format!(
        "exit measure of B({}, {radius}) ({} mode): {} x {}, invariants {}",
        r.a,
        summary.mode,
        summary.interior,
        summary.boundary,
        if summary.invariants_hold { "hold" } else { "FAIL" }
    ));
    Ok(())
}

fn value_columns(v: &Value, mode: Mode) -> Vec<String> {
    match (mode, v) {
        (Mode::Exact, Value::Exact(q)) => vec![q.numer().to_string(), q.denom().to_string()],
        (Mode::Float, x) => vec![float(x.to_f64())],
        (_, Value::Exact(q)) => vec![q.numer().to_string(), q.denom().to_string(), float(v.to_f64())],
        (_, Value::Float(x)) => vec![String::new(), String::new(), float(*x)],
    }
}

fn value_header(mode: Mode) -> Vec<&'static str> {
    match mode {
        Mode::Exact => vec!["eps_num", "eps_den"],
        Mode::Float => vec!["eps_float"],
        Mode::Auto => vec!["eps_num", "eps_den", "eps_float"],
    }
}

/// Computes each radius independently; a resource error stops the scan but
/// keeps the radii below it.
fn scan_points(cfg: &ExperimentConfig, r: &Resolved) -> Result<(Vec<ScanPoint>, Option<RunError>), RunError> {
    let first = DirectedBall::build_capped(&r.a, &r.steps, cfg.radius_min, cfg.size_cap)?;
    if !first.contains(&r.b) {
        return Err(RunError::Input(format!("{} is not in B({}, {})", r.b, r.a, cfg.radius_min)));
    }
    let results: Vec<_> = cfg
        .radii()
        .par_iter()
        .map(|&radius| {
            let ball = Arc::new(build(cfg, &r.a, &r.steps, radius)?);
            epsilon_on_ball(ball, &r.b, cfg.mode).map_err(RunError::from)
        })
        .collect();
    let mut points = Vec::new();
    for res in results {
        match res {
            Ok(p) => points.push(p),
            Err(e @ RunError::Resource(_)) => return Ok((points, Some(e))),
            Err(e) => return Err(e),
        }
    }
    Ok((points, None))
}

fn epsilon_scan(cfg: &ExperimentConfig, r: &Resolved, sink: &mut Sink, report: &mut Report) -> Result<(), RunError> {
    let (points, stopped) = scan_points(cfg, r)?;
    let mut header = vec!["family", "a", "b", "r"];
    header.extend(value_header(cfg.mode));
    header.extend(["argmax_boundary", "excluded_mass_count"]);
    let mut rows = Vec::new();
    let mut curve = Vec::new();
    let mut fn_curve = Vec::new();
    for p in &points {
        let mut row = vec![cfg.group.clone(), r.a.to_string(), r.b.to_string(), p.r.to_string()];
        row.extend(value_columns(&p.value, cfg.mode));
        row.push(p.argmax.as_ref().map(|x| x.to_string()).unwrap_or_default());
        row.push(p.excluded_mass_count.to_string());
        rows.push(row);
        let m = mode_name(p.value.is_exact());
        curve.push(vec![p.r.to_string(), float(p.value.to_f64()), m.into()]);
        if let Some(f) = &p.fn_at_b {
            fn_curve.push(vec![p.r.to_string(), float(f.to_f64()), m.into()]);
        }
    }
    let name = format!("epsilon_{}", slug(&cfg.group));
    sink.csv(&format!("{name}.csv"), &header, &rows)?;
    sink.plot(&format!("{name}.tsv"), &["r", "value", "mode"], &curve)?;
    sink.plot(&format!("fn_{}.tsv", slug(&cfg.group)), &["r", "value", "mode"], &fn_curve)?;
    if !is_nonincreasing(&points, 1e-9) {
        report.failures.push(format!("epsilon scan on {} is not nonincreasing", cfg.group));
    }
    for p in &points {
        report.lines.push(format!("{} r={:>2} eps={} ({})", cfg.group, p.r, p.value, mode_name(p.value.is_exact())));
    }
    match stopped {
        Some(e) => {
            sink.write(&format!("{name}.partial"), format!("{e}\n").as_bytes())?;
            Err(e)
        }
        None => Ok(()),
    }
}

#[derive(Serialize)]
struct GrowthSummary {
    family: String,
    class: harmlab::growth::GrowthClass,
    exponential_rate: Option<f64>,
    polynomial_degree: Option<f64>,
    loglog_slope_8_16: Option<f64>,
    truncated: bool,
}

fn growth(cfg: &ExperimentConfig, r: &Resolved, sink: &mut Sink, report: &mut Report) -> Result<(), RunError> {
    let p = growth_profile(&r.a, &r.steps, cfg.radius_max, cfg.size_cap)?;
    let rows: Vec<Vec<String>> = p
        .rows
        .iter()
        .map(|row| {
            vec![cfg.group.clone(), row.r.to_string(), row.ball.to_string(), row.boundary.to_string(), row.new_vertices.to_string()]
        })
        .collect();
    let name = format!("growth_{}", slug(&cfg.group));
    sink.csv(&format!("{name}.csv"), &["family", "r", "ball", "boundary", "new_vertices"], &rows)?;
    let curve: Vec<Vec<String>> = p
        .rows
        .iter()
        .map(|row| vec![row.r.to_string(), row.ball.to_string(), row.boundary.to_string(), float((row.ball as f64).ln())])
        .collect();
    sink.plot(&format!("{name}.tsv"), &["r", "ball", "boundary", "log_ball"], &curve)?;
    let summary = GrowthSummary {
        family: cfg.group.clone(),
        class: p.class,
        exponential_rate: p.exponential_rate(),
        polynomial_degree: p.polynomial_degree(),
        loglog_slope_8_16: p.loglog_slope(8, 16),
        truncated: p.truncated,
    };
    sink.json(&format!("{name}.json"), &summary)?;
    report.lines.push(format!(
        "{}: {:?} growth, |B({})| = {}{}",
        cfg.group,
        p.class,
        p.rows.last().map_or(0, |r| r.r),
        p.rows.last().map_or(0, |r| r.ball),
        if p.truncated { " (truncated by size cap)" } else { "" }
    ));
    if p.truncated {
        sink.write(&format!("{name}.partial"), b"size cap reached\n")?;
        return Err(RunError::Resource(format!("growth enumeration of {} hit the size cap {}", cfg.group, cfg.size_cap)));
    }
    Ok(())
}

#[derive(Serialize)]
struct CertificateSummary {
    family: String,
    delta: String,
    r0: usize,
    p: String,
    premise_holds: bool,
    failing_radii: Vec<usize>,
    violations: Vec<usize>,
    chain_violations: Vec<usize>,
    message: String,
}

fn certify_with<T: Scalar>(cfg: &ExperimentConfig, r: &Resolved, sink: &mut Sink, report: &mut Report) -> Result<(), RunError> {
    let cert = growth_certificate::<T>(&r.steps, &r.delta, cfg.r0, cfg.radius_max).map_err(|e| match e {
        harmlab::Error::InvalidArgument(m) => RunError::Input(m),
        e => e.into(),
    })?;
    let mut header = vec!["family", "delta", "r0", "r", "premise_holds", "bound_num", "bound_den"];
    header.extend(if T::EXACT { vec!["min_mu_num", "min_mu_den"] } else { vec!["min_mu_float"] });
    header.extend(["boundary_size", "conclusion_holds"]);
    let mut rows = Vec::new();
    let mut curve = Vec::new();
    for row in &cert.rows {
        let mut line = vec![
            cfg.group.clone(),
            cert.delta.to_string(),
            cert.r0.to_string(),
            row.r.to_string(),
            row.premise_holds.to_string(),
            row.bound.numer().to_string(),
            row.bound.denom().to_string(),
        ];
        line.extend(row.min_mu.csv_fields());
        line.extend([row.boundary_size.to_string(), row.conclusion_holds.to_string()]);
        rows.push(line);
        curve.push(vec![
            row.r.to_string(),
            float(Scalar::to_f64(&row.bound)),
            float(row.min_mu.to_f64()),
            row.conclusion_holds.to_string(),
        ]);
    }
    let name = format!("certificate_{}", slug(&cfg.group));
    sink.csv(&format!("{name}.csv"), &header, &rows)?;
    sink.plot(&format!("{name}.tsv"), &["r", "bound", "measured_min_mu", "holds"], &curve)?;
    let violations = cert.violations();
    let chain_violations = cert.chain_violations();
    let above: Vec<usize> = cert.failing_radii.iter().copied().filter(|&s| s > cfg.r0).collect();
    let message = if above.is_empty() {
        format!(
            "premise holds for r0 < s <= {}: one-step eps <= {} throughout",
            cfg.radius_max, cert.delta
        )
    } else {
        let list: Vec<String> = cert.failing_radii.iter().map(|s| s.to_string()).collect();
        format!("premise fails: one-step eps > {} at s = {}", cert.delta, list.join(","))
    };
    report.lines.push(format!("{}: {message}", cfg.group));
    if !violations.is_empty() {
        report.failures.push(format!("{}: premise holds but bound fails at r = {violations:?}", cfg.group));
    }
    if !chain_violations.is_empty() {
        report.failures.push(format!("{}: chain bound fails at r = {chain_violations:?}", cfg.group));
    }
    let summary = CertificateSummary {
        family: cfg.group.clone(),
        delta: cert.delta.to_string(),
        r0: cert.r0,
        p: cert.p.to_string(),
        premise_holds: cert.premise_holds(),
        failing_radii: cert.failing_radii.clone(),
        violations,
        chain_violations,
        message,
    };
    sink.json(&format!("{name}.json"), &summary)?;
    Ok(())
}

fn certify(cfg: &ExperimentConfig, r: &Resolved, sink: &mut Sink, report: &mut Report) -> Result<(), RunError> {
    if cfg.mode == Mode::Float {
        certify_with::<f64>(cfg, r, sink, report)
    } else {
        certify_with::<BigRational>(cfg, r, sink, report)
    }
}

fn lemma2(cfg: &ExperimentConfig, r: &Resolved, sink: &mut Sink, report: &mut Report) -> Result<(), RunError> {
    let suite = monotonicity_suite(&r.steps, cfg.instances, cfg.radius_max, cfg.seed)?;
    sink.json(&format!("lemma2_{}.json", slug(&cfg.group)), &suite)?;
    report.lines.push(format!(
        "{}: {} nested-ball instances, {} failures",
        cfg.group,
        suite.instances,
        suite.failures.len()
    ));
    report.failures.extend(suite.failures);
    Ok(())
}

fn telescope_with<T: Scalar>(cfg: &ExperimentConfig, r: &Resolved, sink: &mut Sink, report: &mut Report) -> Result<(), RunError> {
    let mut summaries = Vec::new();
    let mut rows = Vec::new();
    for radius in cfg.radii() {
        let (summary, records) = telescope_ball::<T>(&r.a, &r.steps, radius)?;
        for rec in &records {
            let x = rec.geodesic.last().expect("non-empty geodesic").to_string();
            for (i, c) in rec.checks.iter().enumerate() {
                let (kind, bound) = match &c.bound {
                    RatioBound::Epsilon { forward, .. } => ("epsilon", show(forward)),
                    RatioBound::Step { p } => ("step", show(p)),
                };
                rows.push(vec![
                    radius.to_string(),
                    x.clone(),
                    i.to_string(),
                    show(&c.ratio),
                    show(&c.deviation),
                    kind.into(),
                    bound,
                    c.within_bound.to_string(),
                    c.chain_holds.to_string(),
                ]);
            }
        }
        if !summary.passed() {
            report.failures.push(format!("telescoping chain fails on {} r={radius}: {summary:?}", cfg.group));
        }
        report.lines.push(format!(
            "{} r={radius}: {} boundary vertices, {} ratios, {} product / {} bound / {} chain failures",
            cfg.group, summary.boundary, summary.ratios, summary.product_failures, summary.bound_failures, summary.chain_failures
        ));
        summaries.push(summary);
    }
    let name = format!("telescope_{}", slug(&cfg.group));
    sink.csv(
        &format!("{name}.csv"),
        &["r", "boundary", "i", "ratio", "deviation", "bound_kind", "bound", "within_bound", "chain_holds"],
        &rows,
    )?;
    sink.json(&format!("{name}.json"), &summaries)?;
    Ok(())
}

fn telescope(cfg: &ExperimentConfig, r: &Resolved, sink: &mut Sink, report: &mut Report) -> Result<(), RunError> {
    if cfg.mode == Mode::Float {
        telescope_with::<f64>(cfg, r, sink, report)
    } else {
        telescope_with::<BigRational>(cfg, r, sink, report)
    }
}

/// Largest standardized deviation accepted by a cross-check.
pub const Z_LIMIT: f64 = 5.0;

#[derive(Serialize)]
struct SimulationSummary {
    family: String,
    radius: usize,
    start: String,
    samples: u64,
    seed: u64,
    capped: u64,
    max_abs_diff: f64,
    total_variation: f64,
    z_max: f64,
}

fn simulate(cfg: &ExperimentConfig, r: &Resolved, sink: &mut Sink, report: &mut Report) -> Result<(), RunError> {
    let radius = cfg.radius_max;
    let ball = Arc::new(build(cfg, &r.a, &r.steps, radius)?);
    let emp = sample_exit(ball.clone(), &r.a, cfg.samples, cfg.seed)?;
    let (cmp, mu): (_, Vec<f64>) = if use_exact(cfg.mode, ball.interior_len()) {
        let row = ExitSolver::<BigRational>::new(ball.clone())?.row(emp.start());
        (compare_to_row(&emp, &row)?, row.iter().map(Scalar::to_f64).collect())
    } else {
        let row = ExitSolver::<f64>::new(ball.clone())?.row(emp.start());
        (compare_to_row(&emp, &row)?, row)
    };
    let rows: Vec<Vec<String>> = (0..ball.boundary_len())
        .map(|x| {
            vec![
                x.to_string(),
                ball.boundary_vertex(x).to_string(),
                emp.counts()[x].to_string(),
                float(emp.frequency(x)),
                float(mu[x]),
            ]
        })
        .collect();
    let name = format!("simulate_{}_r{radius}", slug(&cfg.group));
    sink.csv(&format!("{name}.csv"), &["boundary_index", "element", "count", "frequency", "mu"], &rows)?;
    let summary = SimulationSummary {
        family: cfg.group.clone(),
        radius,
        start: r.a.to_string(),
        samples: emp.samples(),
        seed: emp.seed(),
        capped: emp.capped(),
        max_abs_diff: cmp.max_abs_diff,
        total_variation: cmp.total_variation,
        z_max: cmp.z_max,
    };
    sink.json(&format!("{name}.json"), &summary)?;
    report.lines.push(format!(
        "{} r={radius}: N={} z_max={:.3} TV={:.2e} max|diff|={:.2e}",
        cfg.group, summary.samples, cmp.z_max, cmp.total_variation, cmp.max_abs_diff
    ));
    if !emp.is_valid() {
        report.failures.push(format!("{}: {} walks hit the step cap", cfg.group, emp.capped()));
    }
    if cmp.z_max >= Z_LIMIT {
        report.failures.push(format!("{}: simulated exits disagree with the solver, z_max = {}", cfg.group, cmp.z_max));
    }
    Ok(())
}

#[derive(Serialize)]
struct ProbeRow {
    r: usize,
    ball: usize,
    boundary: usize,
    mode: &'static str,
    eps: String,
    exit_invariants: bool,
    fn_invariants: Option<bool>,
}

#[derive(Serialize)]
struct ProbeSummary {
    family: String,
    relations: Vec<(String, bool)>,
    sizes_strictly_increasing: bool,
    rows: Vec<ProbeRow>,
}

const GRIGORCHUK_RELATIONS: &[&str] = &["aa", "bb", "cc", "dd", "bcd", "cdb", "dbc", "adadadad"];

fn probe(cfg: &ExperimentConfig, r: &Resolved, sink: &mut Sink, report: &mut Report) -> Result<(), RunError> {
    let relations: Vec<(String, bool)> = if *r.group.family() == GroupFamily::Grigorchuk {
        GRIGORCHUK_RELATIONS
            .iter()
            .map(|w| Ok((w.to_string(), r.group.word(w)?.is_identity())))
            .collect::<Result<_, harmlab::Error>>()?
    } else {
        Vec::new()
    };
    for (w, ok) in &relations {
        if !ok {
            report.failures.push(format!("relation {w} = e fails"));
        }
    }
    let mut rows = Vec::new();
    let mut csv_rows = Vec::new();
    for radius in cfg.radii() {
        let ball = Arc::new(build(cfg, &r.a, &r.steps, radius)?);
        let exact = use_exact(cfg.mode, ball.interior_len());
        let (eps, summary) = if exact {
            let (em, s) = exit_with::<BigRational>(ball.clone(), r)?;
            let eps = if ball.contains(&r.b) { Some(Value::Exact(em.epsilon(&r.a, &r.b)?.value)) } else { None };
            (eps, s)
        } else {
            let (em, s) = exit_with::<f64>(ball.clone(), r)?;
            let eps = if ball.contains(&r.b) { Some(Value::Float(em.epsilon(&r.a, &r.b)?.value)) } else { None };
            (eps, s)
        };
        if !summary.invariants_hold || summary.fn_invariants_hold == Some(false) {
            report.failures.push(format!("invariants fail on B({}, {radius})", r.a));
        }
        let eps_text = eps.as_ref().map(|v| v.to_string()).unwrap_or_default();
        csv_rows.push(vec![
            radius.to_string(),
            ball.interior_len().to_string(),
            ball.boundary_len().to_string(),
            mode_name(exact).into(),
            eps_text.clone(),
            eps.as_ref().map(|v| float(v.to_f64())).unwrap_or_default(),
            summary.invariants_hold.to_string(),
            summary.fn_invariants_hold.map(|b| b.to_string()).unwrap_or_default(),
        ]);
        report.lines.push(format!(
            "{} r={radius}: |B|={} |dB|={} eps={eps_text} invariants {}",
            cfg.group,
            ball.interior_len(),
            ball.boundary_len(),
            if summary.invariants_hold { "hold" } else { "FAIL" }
        ));
        rows.push(ProbeRow {
            r: radius,
            ball: ball.interior_len(),
            boundary: ball.boundary_len(),
            mode: mode_name(exact),
            eps: eps_text,
            exit_invariants: summary.invariants_hold,
            fn_invariants: summary.fn_invariants_hold,
        });
    }
    let sizes_strictly_increasing = rows.windows(2).all(|w| w[1].ball > w[0].ball);
    if !sizes_strictly_increasing {
        report.failures.push("ball sizes are not strictly increasing".into());
    }
    let name = format!("probe_{}", slug(&cfg.group));
    sink.csv(
        &format!("{name}.csv"),
        &["r", "ball", "boundary", "mode", "eps", "eps_float", "exit_invariants", "fn_invariants"],
        &csv_rows,
    )?;
    sink.json(&format!("{name}.json"), &ProbeSummary { family: cfg.group.clone(), relations, sizes_strictly_increasing, rows })?;
    Ok(())
}
