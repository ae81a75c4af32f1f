//! Command execution. Each command assembles its whole report before
//! anything is written.

use std::fs::File;
use std::io::{BufReader, Write};
use std::path::Path;

use anyhow::{anyhow, bail, ensure, Context, Result};
use intrinsic_core::convex::{
    kappa_matrix_with, maximal_metric, maximality_certificate, MaximalMetricProblem, PairStatus, SolverReport,
    SolverSettings,
};
use intrinsic_core::graph::{complete_graph, cycle_graph, make_no_intrinsic_example, make_star, path_graph};
use intrinsic_core::metric::{universal_bound_metric, vertex_loads_with};
use intrinsic_core::oracle::{kappa_lower_bound_search, maximality_check_exhaustive, z_segment_maximal_family, GridSpec};
use intrinsic_core::radial::{
    antitree_profile, build_cutoffs, classify_divergence, detect_radial_symmetry, finite_ball_metric,
    generate_antitree, generate_tree, normalized_cutoffs, radial_gradient, radialize, series_terms, tree_profile,
    RadialProfile,
};
use intrinsic_core::star::largest_metric_decision;
use intrinsic_core::{GraphFunction, PseudoMetric, WeightedGraph};
use serde::Serialize;

use crate::args::{Cli, Command, Family, Format, Global, Measures, OracleCommand, RadialCommand, RadialSource};
use crate::formats::{read_graph, read_metric, write_graph, write_metric, write_profile};

/// How a command finished once its report is written.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    NotConverged,
}

#[derive(Debug, Clone, Serialize)]
pub struct Tolerances {
    pub eps_feas: f64,
    pub tol_solve: f64,
    pub tau_tri: f64,
    pub tau_rad: f64,
    pub max_iterations: usize,
    pub horizon: Option<usize>,
}

impl Tolerances {
    fn from_global(g: &Global) -> Result<Self> {
        for (name, v) in [("eps-feas", g.eps_feas), ("tol-solve", g.tol_solve), ("tau-tri", g.tau_tri), ("tau-rad", g.tau_rad)] {
            ensure!(v > 0.0 && v.is_finite(), "--{name} must be positive, got {v}");
        }
        ensure!(g.max_iterations > 0, "--max-iterations must be positive");
        Ok(Tolerances {
            eps_feas: g.eps_feas,
            tol_solve: g.tol_solve,
            tau_tri: g.tau_tri,
            tau_rad: g.tau_rad,
            max_iterations: g.max_iterations,
            horizon: g.horizon,
        })
    }

    fn solver(&self) -> SolverSettings {
        SolverSettings { tol_solve: self.tol_solve, max_iterations: self.max_iterations }
    }
}

/// The serialised form of [`SolverReport`].
#[derive(Debug, Clone, Serialize)]
pub struct ReportJson {
    pub value: f64,
    pub converged: bool,
    pub iterations: usize,
    pub max_violation: f64,
    pub stationarity: f64,
}

impl From<&SolverReport> for ReportJson {
    fn from(r: &SolverReport) -> Self {
        ReportJson {
            value: r.value,
            converged: r.converged,
            iterations: r.iterations,
            max_violation: r.max_violation,
            stationarity: r.stationarity,
        }
    }
}

struct Ctx<'a> {
    global: &'a Global,
    tol: Tolerances,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn graph(&self) -> Result<WeightedGraph> {
        let path = self.global.input.as_ref().ok_or_else(|| anyhow!("this command needs --input <graph.json>"))?;
        let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
        read_graph(BufReader::new(file)).with_context(|| format!("reading {}", path.display()))
    }

    fn json(&mut self, value: &impl Serialize) -> Result<()> {
        serde_json::to_writer_pretty(&mut *self.out, value)?;
        writeln!(self.out)?;
        Ok(())
    }

    /// Rows with a header; used for every CSV table except metrics and profiles.
    fn table(&mut self, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
        let mut w = csv::Writer::from_writer(&mut *self.out);
        w.write_record(header)?;
        for row in rows {
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn labels(g: &WeightedGraph) -> Vec<String> {
    (0..g.vertex_count()).map(|u| g.label(u)).collect()
}

fn load_metric(path: &Path, g: &WeightedGraph, tau_tri: f64) -> Result<PseudoMetric> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    let (header, metric) = read_metric(BufReader::new(file)).with_context(|| format!("reading {}", path.display()))?;
    ensure!(
        metric.vertex_count() == g.vertex_count(),
        "metric has {} vertices, graph has {}",
        metric.vertex_count(),
        g.vertex_count()
    );
    ensure!(header == labels(g), "metric header {:?} does not match the graph labels {:?}", header, labels(g));
    metric.check_triangle(tau_tri).with_context(|| format!("{} is not a pseudo metric", path.display()))?;
    Ok(metric)
}

fn save_metric(path: &Path, labels: &[String], metric: &PseudoMetric) -> Result<()> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    write_metric(labels, metric, file)?;
    Ok(())
}

fn num(v: f64) -> String {
    if v.is_infinite() {
        "inf".into()
    } else {
        v.to_string()
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<Status> {
    let tol = Tolerances::from_global(&cli.global)?;
    let mut ctx = Ctx { global: &cli.global, tol, out, err };
    match &cli.command {
        Command::Check { metric } => check(&mut ctx, metric),
        Command::Kappa { metric_out } => kappa(&mut ctx, metric_out.as_deref()),
        Command::Maximal { objective, floor, delta, metric_out } => {
            maximal(&mut ctx, objective, floor.as_deref(), *delta, metric_out.as_deref())
        }
        Command::Star => star(&mut ctx),
        Command::Radial { command } => radial(&mut ctx, command),
        Command::Generate { family } => generate(&mut ctx, family),
        Command::Oracle { command } => oracle(&mut ctx, command),
    }
}

#[derive(Serialize)]
struct LoadRow {
    vertex: usize,
    label: String,
    load: f64,
}

#[derive(Serialize)]
struct CheckReport {
    tolerances: Tolerances,
    loads: Vec<LoadRow>,
    max_load: f64,
    worst_vertex: Option<usize>,
    verdict: &'static str,
}

fn verdict(intrinsic: bool) -> &'static str {
    if intrinsic {
        "intrinsic"
    } else {
        "not intrinsic"
    }
}

fn check(ctx: &mut Ctx<'_>, metric: &Path) -> Result<Status> {
    let g = ctx.graph()?;
    let sigma = load_metric(metric, &g, ctx.tol.tau_tri)?;
    let profile = vertex_loads_with(&g, &sigma, ctx.tol.eps_feas)?;
    let report = CheckReport {
        tolerances: ctx.tol.clone(),
        loads: profile.loads.iter().enumerate().map(|(u, &load)| LoadRow { vertex: u, label: g.label(u), load }).collect(),
        max_load: profile.max_load(),
        worst_vertex: profile.worst_vertex(),
        verdict: verdict(profile.is_intrinsic()),
    };
    match ctx.global.format {
        Format::Json => ctx.json(&report)?,
        Format::Csv => {
            let rows = report.loads.iter().map(|r| vec![r.vertex.to_string(), r.label.clone(), num(r.load)]).collect::<Vec<_>>();
            ctx.table(&["vertex", "label", "load"], rows)?;
            let worst = report.worst_vertex.map_or("none".to_string(), |v| v.to_string());
            writeln!(ctx.err, "verdict: {}, max load {} at vertex {worst}", report.verdict, report.max_load)?;
        }
    }
    Ok(Status::Ok)
}

#[derive(Serialize)]
struct KappaPair {
    x: usize,
    y: usize,
    kappa: f64,
    universal_bound: f64,
    report: ReportJson,
}

#[derive(Serialize)]
struct KappaReport {
    tolerances: Tolerances,
    labels: Vec<String>,
    metric: Vec<Vec<f64>>,
    pairs: Vec<KappaPair>,
    all_converged: bool,
    max_excess_over_universal_bound: f64,
    max_load: f64,
    worst_vertex: Option<usize>,
    kappa_intrinsic: bool,
}

fn kappa(ctx: &mut Ctx<'_>, metric_out: Option<&Path>) -> Result<Status> {
    let g = ctx.graph()?;
    let table = kappa_matrix_with(&g, ctx.tol.solver())?;
    let bound = universal_bound_metric(&g);
    let loads = vertex_loads_with(&g, &table.metric, ctx.tol.eps_feas)?;
    let labels = labels(&g);
    let report = KappaReport {
        tolerances: ctx.tol.clone(),
        labels: labels.clone(),
        metric: table.metric.to_rows(),
        pairs: table
            .reports
            .iter()
            .map(|(x, y, r)| KappaPair {
                x: *x,
                y: *y,
                kappa: table.metric.get(*x, *y),
                universal_bound: bound.get(*x, *y),
                report: r.into(),
            })
            .collect(),
        all_converged: table.all_converged(),
        max_excess_over_universal_bound: table.metric.max_excess_over(&bound)?,
        max_load: loads.max_load(),
        worst_vertex: loads.worst_vertex(),
        kappa_intrinsic: loads.is_intrinsic(),
    };
    if let Some(path) = metric_out {
        save_metric(path, &labels, &table.metric)?;
    }
    match ctx.global.format {
        Format::Json => ctx.json(&report)?,
        Format::Csv => {
            write_metric(&labels, &table.metric, &mut *ctx.out)?;
            for p in report.pairs.iter().filter(|p| !p.report.converged) {
                writeln!(ctx.err, "pair ({}, {}) did not converge", p.x, p.y)?;
            }
            writeln!(ctx.err, "max excess over d_s: {}", report.max_excess_over_universal_bound)?;
            writeln!(ctx.err, "kappa intrinsic: {}", if report.kappa_intrinsic { "yes" } else { "no" })?;
        }
    }
    Ok(if report.all_converged { Status::Ok } else { Status::NotConverged })
}

fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

fn parse_list<T: std::str::FromStr>(text: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    text.split(',').map(|s| s.trim().parse::<T>().map_err(|e| anyhow!("cannot read `{}`: {e}", s.trim()))).collect()
}

fn build_problem<'a>(g: &'a WeightedGraph, objective: &str) -> Result<MaximalMetricProblem<'a>> {
    let problem = MaximalMetricProblem::new(g);
    let n = g.vertex_count();
    if objective == "all" {
        return Ok(problem);
    }
    if let Some(rest) = objective.strip_prefix("pair:") {
        let parts: Vec<f64> = parse_list(rest)?;
        ensure!(parts.len() == 2 || parts.len() == 3, "pair objective is `pair:X,Y[,REST]`");
        ensure!(parts[..2].iter().all(|v| *v >= 0.0 && v.fract() == 0.0), "pair objective needs vertex indices");
        let rest = parts.get(2).copied().unwrap_or(1e-3);
        ensure!(rest > 0.0, "objective weights must be positive");
        return Ok(problem.concentrated_on(parts[0] as usize, parts[1] as usize, rest)?);
    }
    if let Some(list) = objective.strip_prefix("weights:") {
        let weights: Vec<f64> = parse_list(list)?;
        ensure!(weights.len() == pair_count(n), "{} weights given for {} pairs", weights.len(), pair_count(n));
        ensure!(weights.iter().all(|&c| c > 0.0 && c.is_finite()), "objective weights must be positive");
        return Ok(problem.with_objective(weights));
    }
    bail!("unknown objective `{objective}`; expected all, pair:X,Y[,REST] or weights:C1,...")
}

#[derive(Serialize)]
struct CertificateRow {
    x: usize,
    y: usize,
    passes: bool,
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    vertex: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    load: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    via: Option<usize>,
}

#[derive(Serialize)]
struct MaximalReport {
    tolerances: Tolerances,
    delta: f64,
    labels: Vec<String>,
    metric: Vec<Vec<f64>>,
    report: ReportJson,
    objective_value: f64,
    active_triangles: usize,
    rounds: usize,
    max_load: f64,
    intrinsic: bool,
    certified: bool,
    certificate: Vec<CertificateRow>,
}

fn maximal(ctx: &mut Ctx<'_>, objective: &str, floor: Option<&Path>, delta: f64, metric_out: Option<&Path>) -> Result<Status> {
    ensure!(delta > 0.0, "--delta must be positive");
    let g = ctx.graph()?;
    let mut problem = build_problem(&g, objective)?.with_settings(ctx.tol.solver());
    if let Some(path) = floor {
        problem = problem.with_floor(load_metric(path, &g, ctx.tol.tau_tri)?);
    }
    let sol = maximal_metric(&problem)?;
    let cert = maximality_certificate(&g, &sol.metric, delta, ctx.tol.eps_feas)?;
    let loads = vertex_loads_with(&g, &sol.metric, ctx.tol.eps_feas)?;
    let objective_value = sol.metric.pairs().zip(&problem.objective).map(|((_, _, v), c)| c * v).sum();
    let labels = labels(&g);
    let report = MaximalReport {
        tolerances: ctx.tol.clone(),
        delta,
        labels: labels.clone(),
        metric: sol.metric.to_rows(),
        report: (&sol.report).into(),
        objective_value,
        active_triangles: sol.active_triangles,
        rounds: sol.rounds,
        max_load: loads.max_load(),
        intrinsic: loads.is_intrinsic(),
        certified: cert.iter().all(|c| c.passes()),
        certificate: cert
            .iter()
            .map(|c| {
                let (status, vertex, load, via) = match c.status {
                    PairStatus::LoadBound { vertex, load } => ("load_bound", Some(vertex), Some(load), None),
                    PairStatus::TriangleDominated { via } => ("triangle_dominated", None, None, Some(via)),
                    PairStatus::Raisable => ("raisable", None, None, None),
                };
                CertificateRow { x: c.x, y: c.y, passes: c.passes(), status, vertex, load, via }
            })
            .collect(),
    };
    if let Some(path) = metric_out {
        save_metric(path, &labels, &sol.metric)?;
    }
    match ctx.global.format {
        Format::Json => ctx.json(&report)?,
        Format::Csv => {
            write_metric(&labels, &sol.metric, &mut *ctx.out)?;
            writeln!(
                ctx.err,
                "objective {}, converged {}, certified {}",
                report.objective_value, report.report.converged, report.certified
            )?;
        }
    }
    Ok(if sol.report.converged { Status::Ok } else { Status::NotConverged })
}

#[derive(Serialize)]
struct StarReport {
    is_star: bool,
    centers: Vec<usize>,
    condition_per_center: Vec<bool>,
    verdict: bool,
    reason: String,
}

fn star(ctx: &mut Ctx<'_>) -> Result<Status> {
    let g = ctx.graph()?;
    let d = largest_metric_decision(&g);
    let report = StarReport {
        is_star: d.classification.is_star,
        centers: d.classification.centers,
        condition_per_center: d.classification.measure_condition,
        verdict: d.verdict,
        reason: d.reason.to_string(),
    };
    match ctx.global.format {
        Format::Json => ctx.json(&report)?,
        Format::Csv => {
            let join = |v: Vec<String>| v.join(";");
            let row = vec![
                report.is_star.to_string(),
                join(report.centers.iter().map(|c| c.to_string()).collect()),
                join(report.condition_per_center.iter().map(|c| c.to_string()).collect()),
                report.verdict.to_string(),
                report.reason.clone(),
            ];
            ctx.table(&["is_star", "centers", "condition_per_center", "verdict", "reason"], [row])?;
        }
    }
    Ok(Status::Ok)
}

fn truncate(profile: RadialProfile, horizon: Option<usize>) -> Result<RadialProfile> {
    let Some(r) = horizon.filter(|&r| r < profile.horizon()) else {
        return Ok(profile);
    };
    let cut = RadialProfile::new(
        profile.root,
        profile.sphere_mass[..=r].to_vec(),
        profile.kappa_plus[..r].to_vec(),
        profile.kappa_minus[..=r].to_vec(),
    )?;
    Ok(match profile.growth {
        Some(growth) => cut.with_growth(growth),
        None => cut,
    })
}

/// Profile from the input graph or the generator flags, with the concrete
/// graph when one is needed.
fn radial_source(ctx: &Ctx<'_>, src: &RadialSource, need_graph: bool) -> Result<(RadialProfile, Option<WeightedGraph>)> {
    let horizon = ctx.tol.horizon;
    if !src.tree && !src.antitree {
        ensure!(
            src.sizes.is_none() && src.alpha.is_none() && src.exp_alpha.is_none(),
            "generator flags need --tree or --antitree"
        );
        let g = ctx.graph()?;
        let profile = detect_radial_symmetry(&g, src.root, ctx.tol.tau_rad)?;
        return Ok((truncate(profile, horizon)?, Some(g)));
    }
    let radii = || src.radii.or(horizon).ok_or_else(|| anyhow!("--alpha and --exp-alpha need --radii or --horizon"));
    let profile = match (&src.sizes, src.alpha, src.exp_alpha) {
        (Some(sizes), None, None) => {
            let floats: Vec<f64> = sizes.iter().map(|&s| s as f64).collect();
            if src.tree {
                tree_profile(&floats)?
            } else {
                antitree_profile(&floats)?
            }
        }
        (None, Some(alpha), None) if src.tree => RadialProfile::tree_polynomial(alpha, radii()?)?,
        (None, Some(alpha), None) => RadialProfile::antitree_polynomial(alpha, radii()?)?,
        (None, None, Some(alpha)) => RadialProfile::tree_stretched_exponential(alpha, radii()?)?,
        _ => bail!("give exactly one of --sizes, --alpha, --exp-alpha"),
    };
    let profile = truncate(profile, horizon)?;
    if !need_graph {
        return Ok((profile, None));
    }
    let sizes: Vec<usize> = profile.sphere_mass.iter().map(|&m| m as usize).collect();
    let (graph, _) = if src.tree { generate_tree(&sizes)? } else { generate_antitree(&sizes)? };
    Ok((profile, Some(graph)))
}

#[derive(Serialize)]
struct ProfileRow {
    r: usize,
    sphere_mass: f64,
    kappa_plus: Option<f64>,
    kappa_minus: f64,
    boundary: Option<f64>,
    term_iii: Option<f64>,
    term_v: Option<f64>,
    partial_sum_iii: Option<f64>,
    partial_sum_v: Option<f64>,
}

#[derive(Serialize)]
struct ProfileReport {
    tolerances: Tolerances,
    root: usize,
    horizon: usize,
    boundary_identity_defect: f64,
    rows: Vec<ProfileRow>,
}

#[derive(Serialize)]
struct SeriesRowJson {
    r: usize,
    term_iii: f64,
    term_v: f64,
    partial_sum_iii: f64,
    partial_sum_v: f64,
}

#[derive(Serialize)]
struct SeriesReport {
    tolerances: Tolerances,
    horizon: usize,
    verdict_iii: String,
    verdict_v: String,
    rows: Vec<SeriesRowJson>,
}

#[derive(Serialize)]
struct CutoffRow {
    r: usize,
    chi: f64,
    gradient_sq: f64,
}

#[derive(Serialize)]
struct CutoffReport {
    tolerances: Tolerances,
    n: usize,
    closes_at: Option<usize>,
    max_gradient_sq: f64,
    rows: Vec<CutoffRow>,
}

#[derive(Serialize)]
struct BallReport {
    rho: f64,
    closes_at: Option<usize>,
}

#[derive(Serialize)]
struct MetricReport {
    tolerances: Tolerances,
    chain: Vec<usize>,
    blocks: Vec<Vec<usize>>,
    truncated: bool,
    gradient_budget: f64,
    sigma_from_root: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ball: Option<BallReport>,
}

#[derive(Serialize)]
struct RadializeReport {
    tolerances: Tolerances,
    ray: Vec<usize>,
    phi: Vec<f64>,
    c_squared: f64,
    forward_max: f64,
    weak_max: f64,
    forward_bound_holds: bool,
    weak_bound_holds: bool,
}

fn radial(ctx: &mut Ctx<'_>, command: &RadialCommand) -> Result<Status> {
    match command {
        RadialCommand::Profile { source } => {
            let (p, _) = radial_source(ctx, source, false)?;
            match ctx.global.format {
                Format::Csv => write_profile(&p, &mut *ctx.out)?,
                Format::Json => {
                    let series = series_terms(&p);
                    let horizon = p.horizon();
                    let rows = (0..=horizon)
                        .map(|r| {
                            let s = series.iter().find(|s| s.r == r);
                            ProfileRow {
                                r,
                                sphere_mass: p.sphere_mass[r],
                                kappa_plus: (r < horizon).then(|| p.kappa_plus[r]),
                                kappa_minus: p.kappa_minus[r],
                                boundary: (r < horizon).then(|| p.boundary(r)),
                                term_iii: s.map(|s| s.term_iii),
                                term_v: s.map(|s| s.term_v),
                                partial_sum_iii: s.map(|s| s.partial_iii),
                                partial_sum_v: s.map(|s| s.partial_v),
                            }
                        })
                        .collect();
                    let report = ProfileReport {
                        tolerances: ctx.tol.clone(),
                        root: p.root,
                        horizon,
                        boundary_identity_defect: p.boundary_identity_defect(),
                        rows,
                    };
                    ctx.json(&report)?;
                }
            }
        }
        RadialCommand::Series { source } => {
            let (p, _) = radial_source(ctx, source, false)?;
            let verdicts = classify_divergence(&p);
            let rows: Vec<SeriesRowJson> = series_terms(&p)
                .into_iter()
                .map(|s| SeriesRowJson {
                    r: s.r,
                    term_iii: s.term_iii,
                    term_v: s.term_v,
                    partial_sum_iii: s.partial_iii,
                    partial_sum_v: s.partial_v,
                })
                .collect();
            match ctx.global.format {
                Format::Json => {
                    let report = SeriesReport {
                        tolerances: ctx.tol.clone(),
                        horizon: p.horizon(),
                        verdict_iii: verdicts.term_iii.to_string(),
                        verdict_v: verdicts.term_v.to_string(),
                        rows,
                    };
                    ctx.json(&report)?;
                }
                Format::Csv => {
                    let table = rows.iter().map(|s| {
                        vec![s.r.to_string(), num(s.term_iii), num(s.term_v), num(s.partial_sum_iii), num(s.partial_sum_v)]
                    });
                    ctx.table(&["r", "term_iii", "term_v", "partial_sum_iii", "partial_sum_v"], table.collect::<Vec<_>>())?;
                    writeln!(ctx.err, "term (iii): {}, term (v): {}", verdicts.term_iii, verdicts.term_v)?;
                }
            }
        }
        RadialCommand::Cutoffs { source, n } => {
            let (p, _) = radial_source(ctx, source, false)?;
            let c = build_cutoffs(&p, *n)?;
            let grad = radial_gradient(&p, &c.function)?;
            let rows: Vec<CutoffRow> = c
                .function
                .values()
                .iter()
                .zip(grad.values())
                .enumerate()
                .map(|(r, (&chi, &gradient_sq))| CutoffRow { r, chi, gradient_sq })
                .collect();
            match ctx.global.format {
                Format::Json => {
                    let report = CutoffReport {
                        tolerances: ctx.tol.clone(),
                        n: c.n,
                        closes_at: c.closes_at,
                        max_gradient_sq: c.max_gradient_sq,
                        rows,
                    };
                    ctx.json(&report)?;
                }
                Format::Csv => {
                    let table = rows.iter().map(|row| vec![row.r.to_string(), num(row.chi), num(row.gradient_sq)]);
                    ctx.table(&["r", "chi", "gradient_sq"], table.collect::<Vec<_>>())?;
                }
            }
        }
        RadialCommand::Metric { source, start, rho } => {
            let (p, _) = radial_source(ctx, source, false)?;
            let chain = normalized_cutoffs(&p, *start)?;
            let metric = finite_ball_metric(&p, chain.functions, ctx.tol.eps_feas)?;
            let from_root = metric.from_root();
            match ctx.global.format {
                Format::Json => {
                    let report = MetricReport {
                        tolerances: ctx.tol.clone(),
                        chain: chain.chain,
                        blocks: chain.blocks,
                        truncated: chain.truncated,
                        gradient_budget: metric.gradient_budget,
                        sigma_from_root: from_root,
                        ball: rho.map(|rho| BallReport { rho, closes_at: metric.ball_closes_at(rho) }),
                    };
                    ctx.json(&report)?;
                }
                Format::Csv => {
                    let table = from_root.iter().enumerate().map(|(r, &s)| vec![r.to_string(), num(s)]);
                    ctx.table(&["r", "sigma_from_root"], table.collect::<Vec<_>>())?;
                    if let Some(rho) = rho {
                        writeln!(ctx.err, "ball of radius {rho} closes at {:?}", metric.ball_closes_at(*rho))?;
                    }
                }
            }
        }
        RadialCommand::Radialize { source, function } => {
            let (p, g) = radial_source(ctx, source, true)?;
            let g = g.expect("graph requested");
            let text = std::fs::read_to_string(function).with_context(|| format!("cannot read {}", function.display()))?;
            let values: Vec<f64> = serde_json::from_str(&text).with_context(|| format!("reading {}", function.display()))?;
            let r = radialize(&g, &p, &GraphFunction(values))?;
            let report = RadializeReport {
                tolerances: ctx.tol.clone(),
                forward_bound_holds: r.forward_bound_holds(ctx.tol.eps_feas),
                weak_bound_holds: r.weak_bound_holds(ctx.tol.eps_feas),
                ray: r.ray,
                phi: r.function.0,
                c_squared: r.c_squared,
                forward_max: r.forward_max,
                weak_max: r.weak_max,
            };
            match ctx.global.format {
                Format::Json => ctx.json(&report)?,
                Format::Csv => {
                    let table = report.ray.iter().zip(&report.phi).enumerate().map(|(r, (v, f))| vec![r.to_string(), v.to_string(), num(*f)]);
                    ctx.table(&["r", "vertex", "phi"], table.collect::<Vec<_>>())?;
                }
            }
        }
    }
    Ok(Status::Ok)
}

fn unit_measures(m: &Measures) -> Vec<f64> {
    match (&m.measure, m.n) {
        (Some(measure), _) => measure.clone(),
        (None, Some(n)) => vec![1.0; n],
        (None, None) => Vec::new(),
    }
}

fn generate(ctx: &mut Ctx<'_>, family: &Family) -> Result<Status> {
    let g = match family {
        Family::Tree { sizes } => generate_tree(sizes)?.0,
        Family::Antitree { sizes } => generate_antitree(sizes)?.0,
        Family::Star { leaves, center, weights } => make_star(leaves, *center, weights)?,
        Family::Path(m) => path_graph(unit_measures(m))?,
        Family::Cycle(m) => cycle_graph(unit_measures(m))?,
        Family::Complete(m) => complete_graph(unit_measures(m))?,
        Family::NoIntrinsic { n } => make_no_intrinsic_example(*n)?,
    };
    write_graph(&g, &mut *ctx.out)?;
    Ok(Status::Ok)
}

#[derive(Serialize)]
struct OracleKappa {
    x: usize,
    y: usize,
    lower_bound: f64,
}

fn oracle(ctx: &mut Ctx<'_>, command: &OracleCommand) -> Result<Status> {
    match command {
        OracleCommand::Kappa { x, y, half_width } => {
            let g = ctx.graph()?;
            let spec = GridSpec { half_width: *half_width, ..GridSpec::default() };
            let lower_bound = kappa_lower_bound_search(&g, *x, *y, &spec)?;
            ctx.json(&OracleKappa { x: *x, y: *y, lower_bound })?;
        }
        OracleCommand::Maximality { metric, delta } => {
            let g = ctx.graph()?;
            let rho = load_metric(metric, &g, ctx.tol.tau_tri)?;
            let maximal = maximality_check_exhaustive(&g, &rho, *delta)?;
            ctx.json(&serde_json::json!({ "delta": delta, "maximal": maximal }))?;
        }
        OracleCommand::ZSegment { values, tol } => {
            let holds = z_segment_maximal_family(values.len(), &GraphFunction(values.clone()), *tol)?;
            ctx.json(&serde_json::json!({ "length": values.len(), "holds": holds }))?;
        }
    }
    Ok(Status::Ok)
}
