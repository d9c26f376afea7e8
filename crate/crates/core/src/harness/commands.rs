use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::config::{RunConfig, SCHEMA_VERSION};
use super::output::{cell, fmt_f64, to_csv, to_json};
use crate::duality::{
    classify_plane_pair, dictionary_agrees, dual_segment_type, equidistant_curvatures, k_star, plane_dual,
    polyhedral_dual, random_lorentz, random_plane, OrientedPlane, PlanePair,
};
use crate::earthquake::{certify, earthquake, EarthquakePath};
use crate::error::{Error, Result};
use crate::laminations::{lamination_intersection_in_frame, MultiCurve, OrbitFrame};
use crate::moebius::MinkowskiVec;
use crate::scalar::{with_precision, BigReal, Real};
use crate::solvers::{
    earthquake_family_member, minimize_length, project_current, u_map, uniform_u_convergence_sweep,
    weighted_length, CurvatureParam, SolveReport, SweepReport,
};
use crate::surface::{validate_rep, CurveClass, FenchelNielsen, MarkedSurface, PantsGraph, RepDiagnostics};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Surface,
    VerifyLemma,
    Ukmap,
    Project,
    Duality,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Surface => "surface",
            Command::VerifyLemma => "verify-lemma",
            Command::Ukmap => "ukmap",
            Command::Project => "project",
            Command::Duality => "duality",
        }
    }

    fn file_stem(self) -> &'static str {
        match self {
            Command::VerifyLemma => "verify_lemma",
            other => other.name(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail,
    BudgetExhausted,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Pass => 0,
            Outcome::Fail => 1,
            Outcome::BudgetExhausted => 3,
        }
    }
}

/// Exit code for a failed command.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Validation(_) | Error::Parse(_) | Error::UnsupportedFastPath(_) | Error::Degenerate(_) => 2,
        Error::BudgetExhausted { .. } => 3,
        Error::Solver(_) | Error::Conditioning { .. } | Error::NonFilling(_) | Error::NotLeftEarthquake { .. } => 4,
        Error::NotHyperbolic { .. } | Error::NotGeodesic { .. } | Error::Construction { .. } => 1,
    }
}

/// Summary JSON plus extra files, named relative to the output directory.
#[derive(Debug, Clone)]
pub struct CommandOutput {
    pub outcome: Outcome,
    pub summary: String,
    pub files: Vec<(String, String)>,
}

pub fn run(command: Command, cfg: &RunConfig) -> Result<CommandOutput> {
    cfg.validate()?;
    let mut out = match command {
        Command::Surface => surface(cfg)?,
        Command::VerifyLemma => verify_lemma(cfg)?,
        Command::Ukmap => ukmap(cfg)?,
        Command::Project => project(cfg)?,
        Command::Duality => duality(cfg)?,
    };
    out.files.insert(0, (format!("{}.json", command.file_stem()), out.summary.clone()));
    Ok(out)
}

fn words(l: &MultiCurve) -> (String, String) {
    let w: Vec<String> = l.components.iter().map(|(c, _)| c.word.to_string()).collect();
    let x: Vec<String> = l.components.iter().map(|(_, x)| fmt_f64(*x)).collect();
    (w.join(";"), x.join(";"))
}

fn outcome(pass: bool) -> Outcome {
    if pass {
        Outcome::Pass
    } else {
        Outcome::Fail
    }
}

#[derive(Serialize)]
struct SurfaceSummary {
    schema_version: u32,
    command: &'static str,
    genus: usize,
    precision_bits: usize,
    diagnostics: RepDiagnostics,
    pants_lengths: Vec<f64>,
    length_recovery_error: f64,
    valid: bool,
}

fn surface(cfg: &RunConfig) -> Result<CommandOutput> {
    let doc = cfg
        .surface
        .as_ref()
        .ok_or_else(|| Error::Validation("config has no \"surface\" section".into()))?;
    let (topo, coords) = doc.parts()?;
    let s = MarkedSurface::new(&topo, &coords)?;
    let diagnostics = with_precision(s.bits(), || validate_rep(s.rep(), &topo));
    let pants = (0..topo.curve_count()).map(|j| topo.curve_class(j)).collect::<Vec<_>>();
    let (pants_lengths, err) = match s.lengths(&pants) {
        Ok(l) => {
            let e = l.iter().zip(&coords.lengths).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            (l, e)
        }
        Err(_) => (vec![], f64::INFINITY),
    };
    let valid = diagnostics.valid && err < 1e-9;
    let summary = SurfaceSummary {
        schema_version: SCHEMA_VERSION,
        command: "surface",
        genus: topo.genus,
        precision_bits: s.bits(),
        diagnostics,
        pants_lengths,
        length_recovery_error: err,
        valid,
    };
    Ok(CommandOutput {
        outcome: outcome(valid),
        summary: to_json(&summary)?,
        files: vec![],
    })
}

/// One row of the length-estimate suite.
#[derive(Debug, Clone, Serialize)]
pub struct LemmaRow {
    pub seed: u64,
    pub genus: usize,
    pub gamma: String,
    pub support: String,
    pub weights: String,
    pub t: f64,
    pub i: Option<f64>,
    pub l0: f64,
    pub lt: f64,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub outcome: Outcome,
}

pub const LEMMA_COLUMNS: [&str; 12] =
    ["seed", "genus", "gamma", "support", "weights", "t", "i", "L0", "Lt", "lower", "upper", "pass"];

impl LemmaRow {
    fn cells(&self) -> Vec<String> {
        vec![
            self.seed.to_string(),
            self.genus.to_string(),
            self.gamma.clone(),
            self.support.clone(),
            self.weights.clone(),
            fmt_f64(self.t),
            cell(self.i),
            fmt_f64(self.l0),
            fmt_f64(self.lt),
            cell(self.lower),
            cell(self.upper),
            match self.outcome {
                Outcome::Pass => "true",
                Outcome::Fail => "false",
                Outcome::BudgetExhausted => "budget",
            }
            .into(),
        ]
    }

    /// Distance by which the measured length leaves the bounds, or zero.
    fn excess(&self) -> f64 {
        match (self.lower, self.upper) {
            (Some(lo), Some(hi)) => (lo - self.lt).max(self.lt - hi).max(0.0),
            _ => 0.0,
        }
    }
}

/// A random configuration of the suite: lengths in `[0.5, 3]`, twists in
/// `[-1, 1]`, and weights in `[0.1, 5]` on a non-empty set of pants curves.
pub fn lemma_configuration(seed: u64, topo: &PantsGraph) -> Result<(FenchelNielsen, MultiCurve)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = topo.curve_count();
    let f = FenchelNielsen::new(
        (0..n).map(|_| rng.gen_range(0.5..3.0)).collect(),
        (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect(),
    );
    let mut comps = Vec::new();
    while comps.is_empty() {
        for j in 0..n {
            if rng.gen_bool(0.5) {
                comps.push((topo.curve_class(j), rng.gen_range(0.1..5.0)));
            }
        }
    }
    Ok((f, MultiCurve::new(comps)?))
}

pub fn lemma_rows(cfg: &RunConfig, seed: u64) -> Result<Vec<LemmaRow>> {
    let lc = &cfg.lemma;
    let topo = PantsGraph::standard(lc.genus)?;
    let (f, l) = lemma_configuration(seed, &topo)?;
    let (support, weights) = words(&l);
    let marking = topo.marking_set();
    let base = MarkedSurface::new(&topo, &f)?;
    let frame = base.frame()?;
    let l0 = base.lengths(&marking)?;
    let inter = marking
        .iter()
        .map(|g| match lamination_intersection_in_frame(&frame, &l, g, &cfg.budget) {
            Ok(i) => Ok(Some(i)),
            Err(Error::BudgetExhausted { .. }) => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<Vec<_>>>()?;
    let measured = lc
        .grid
        .iter()
        .map(|&t| earthquake(&EarthquakePath::new(&topo, &f, &l, t, lc.method), &cfg.budget)?.lengths(&marking))
        .collect::<Result<Vec<_>>>()?;
    let sign = if lc.wrong_sign { -1.0 } else { 1.0 };
    let mut rows = Vec::new();
    for (k, g) in marking.iter().enumerate() {
        let series: Vec<(f64, f64)> = lc.grid.iter().zip(&measured).map(|(&t, m)| (t, m[k])).collect();
        let cert = inter[k].map(|i| certify(g, &l, sign * i, l0[k], &series, cfg.slack));
        for (r, &(t, lt)) in series.iter().enumerate() {
            let row = cert.as_ref().map(|c| &c.rows[r]);
            rows.push(LemmaRow {
                seed,
                genus: lc.genus,
                gamma: g.word.to_string(),
                support: support.clone(),
                weights: weights.clone(),
                t,
                i: inter[k],
                l0: l0[k],
                lt,
                lower: row.map(|x| x.lower),
                upper: row.map(|x| x.upper),
                outcome: match row {
                    None => Outcome::BudgetExhausted,
                    Some(x) => outcome(x.pass),
                },
            });
        }
    }
    Ok(rows)
}

#[derive(Serialize)]
struct Violation {
    seed: u64,
    gamma: String,
    t: f64,
    excess: f64,
}

#[derive(Serialize)]
struct LemmaSummary {
    schema_version: u32,
    command: &'static str,
    seed: u64,
    genus: usize,
    configs: usize,
    grid: Vec<f64>,
    slack: f64,
    wrong_sign: bool,
    rows: usize,
    passed: usize,
    failed: usize,
    budget_exhausted: usize,
    /// Largest amount by which a measured length leaves its bounds.
    max_slack_used: f64,
    /// Smallest distance from a measured length to the nearer bound.
    min_margin: f64,
    worst: Option<Violation>,
    pass: bool,
}

/// Per-configuration seeds drawn from the run seed.
pub fn config_seeds(seed: u64, n: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.next_u64()).collect()
}

fn verify_lemma(cfg: &RunConfig) -> Result<CommandOutput> {
    let seed = cfg.require_seed()?;
    let lc = &cfg.lemma;
    if lc.grid.is_empty() {
        return Err(Error::Validation("empty t grid".into()));
    }
    if let Some(t) = lc.grid.iter().find(|t| !(**t >= 0.0) || !t.is_finite()) {
        return Err(Error::Validation(format!("t grid values must be >= 0, got {t}")));
    }
    if lc.configs == 0 {
        return Err(Error::Validation("verify-lemma needs at least one configuration".into()));
    }
    let seeds = config_seeds(seed, lc.configs);
    let per: Vec<Result<Vec<LemmaRow>>> = seeds.par_iter().map(|&s| lemma_rows(cfg, s)).collect();
    let rows: Vec<LemmaRow> = per.into_iter().collect::<Result<Vec<_>>>()?.into_iter().flatten().collect();
    let count = |o: Outcome| rows.iter().filter(|r| r.outcome == o).count();
    let (passed, failed, budget) = (count(Outcome::Pass), count(Outcome::Fail), count(Outcome::BudgetExhausted));
    let worst = rows
        .iter()
        .filter(|r| r.excess() > 0.0)
        .max_by(|a, b| a.excess().total_cmp(&b.excess()))
        .map(|r| Violation {
            seed: r.seed,
            gamma: r.gamma.clone(),
            t: r.t,
            excess: r.excess(),
        });
    let min_margin = rows
        .iter()
        .filter_map(|r| Some((r.lt - r.lower?).min(r.upper? - r.lt)))
        .fold(f64::INFINITY, f64::min);
    let summary = LemmaSummary {
        schema_version: SCHEMA_VERSION,
        command: "verify-lemma",
        seed,
        genus: lc.genus,
        configs: lc.configs,
        grid: lc.grid.clone(),
        slack: cfg.slack,
        wrong_sign: lc.wrong_sign,
        rows: rows.len(),
        passed,
        failed,
        budget_exhausted: budget,
        max_slack_used: rows.iter().map(LemmaRow::excess).fold(0.0, f64::max),
        min_margin,
        worst,
        pass: failed == 0 && budget == 0,
    };
    let table: Vec<Vec<String>> = rows.iter().map(LemmaRow::cells).collect();
    let result = if budget > 0 && failed == 0 {
        Outcome::BudgetExhausted
    } else {
        outcome(failed == 0)
    };
    Ok(CommandOutput {
        outcome: result,
        summary: to_json(&summary)?,
        files: vec![("verify_lemma.csv".into(), to_csv(&LEMMA_COLUMNS, &table)?)],
    })
}

/// One `(K, pair)` entry of the convergence table.
#[derive(Debug, Clone, Serialize)]
pub struct UkRow {
    pub pair: usize,
    pub seed: u64,
    pub k: f64,
    pub k_star: f64,
    pub gamma: String,
    pub support: String,
    pub weights: String,
    /// `i(u_K(h_K), γ)`.
    pub recovered: f64,
    /// `i(l, γ)`.
    pub limit: f64,
    pub gap: f64,
    /// `L_{m0}(γ) / sqrt|K*|`.
    pub bound: f64,
    pub iterations: usize,
    pub residual: f64,
    pub pass: bool,
}

const UK_COLUMNS: [&str; 14] = [
    "pair", "seed", "k", "k_star", "gamma", "support", "weights", "recovered", "limit", "gap", "bound", "iterations",
    "residual", "pass",
];

const SWEEP_COLUMNS: [&str; 10] =
    ["k", "k_star", "t", "length", "intersection", "limit", "bound", "deviation", "limit_gap", "pass"];

/// Base surface, lamination and a curve crossing it, for one pair of the
/// convergence table.
pub fn uk_pair(seed: u64, topo: &PantsGraph, cfg: &RunConfig) -> Result<(FenchelNielsen, MultiCurve, CurveClass, OrbitFrame)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = topo.curve_count();
    let m0 = FenchelNielsen::new(
        (0..n).map(|_| rng.gen_range(0.8..2.5)).collect(),
        (0..n).map(|_| rng.gen_range(-0.5..0.5)).collect(),
    );
    let mut comps = Vec::new();
    while comps.is_empty() {
        for j in 0..n {
            if rng.gen_bool(0.5) {
                comps.push((topo.curve_class(j), rng.gen_range(0.2..3.0)));
            }
        }
    }
    let l = MultiCurve::new(comps)?;
    let frame = MarkedSurface::new(topo, &m0)?.frame()?;
    let mut crossing = Vec::new();
    for g in topo.marking_set() {
        if lamination_intersection_in_frame(&frame, &l, &g, &cfg.budget)? > 0.0 {
            crossing.push(g);
        }
    }
    let gamma = crossing[rng.gen_range(0..crossing.len())].clone();
    Ok((m0, l, gamma, frame))
}

fn uk_rows(cfg: &RunConfig, pair: usize, seed: u64, ks: &[CurvatureParam]) -> Result<Vec<UkRow>> {
    let topo = PantsGraph::standard(2)?;
    let (m0, l, gamma, frame) = uk_pair(seed, &topo, cfg)?;
    let (support, weights) = words(&l);
    let pants: Vec<CurveClass> = (0..topo.curve_count()).map(|j| topo.curve_class(j)).collect();
    let base_length = MarkedSurface::new(&topo, &m0)?.length(&gamma)?;
    let limit = lamination_intersection_in_frame(&frame, &l, &gamma, &cfg.budget)?;
    ks.iter()
        .map(|k| {
            let h = earthquake_family_member(&topo, k, &m0, &l)?;
            let (u, report) = u_map(&topo, k, &h, &m0, &pants, &cfg.solver)?;
            let recovered = lamination_intersection_in_frame(&frame, &u, &gamma, &cfg.budget)?;
            let bound = base_length / k.scale();
            let gap = (recovered - limit).abs();
            Ok(UkRow {
                pair,
                seed,
                k: k.k(),
                k_star: k.star(),
                gamma: gamma.word.to_string(),
                support: support.clone(),
                weights: weights.clone(),
                recovered,
                limit,
                gap,
                bound,
                iterations: report.iterations,
                residual: report.residual,
                pass: gap <= bound + cfg.slack,
            })
        })
        .collect()
}

/// `(1 - t) a + t b`, merging equal curves and dropping zero weights.
fn interpolate(a: &MultiCurve, b: &MultiCurve, t: f64) -> Result<MultiCurve> {
    let mut comps: Vec<(CurveClass, f64)> = Vec::new();
    for (c, w) in a.components.iter().map(|(c, w)| (c, (1.0 - t) * w)).chain(b.components.iter().map(|(c, w)| (c, t * w))) {
        match comps.iter_mut().find(|(d, _)| d.word == c.word) {
            Some((_, x)) => *x += w,
            None => comps.push((c.clone(), w)),
        }
    }
    comps.retain(|(_, w)| *w > 0.0);
    MultiCurve::new(comps)
}

#[derive(Serialize)]
struct UkSummary {
    schema_version: u32,
    command: &'static str,
    seed: u64,
    ks: Vec<f64>,
    pairs: usize,
    slack: f64,
    table: Vec<UkRow>,
    max_gap: f64,
    /// Whether the bound shrinks along the curvature list for every pair.
    bound_decreasing: bool,
    sweep: SweepReport,
    pass: bool,
}

fn curvatures(ks: &[f64]) -> Result<Vec<CurvatureParam>> {
    if ks.is_empty() {
        return Err(Error::Validation("empty curvature list".into()));
    }
    ks.iter().map(|&k| CurvatureParam::new(k)).collect()
}

fn ukmap(cfg: &RunConfig) -> Result<CommandOutput> {
    let seed = cfg.require_seed()?;
    let uc = &cfg.ukmap;
    let ks = curvatures(&uc.ks)?;
    let sc = &uc.sweep;
    if sc.grid.is_empty() {
        return Err(Error::Validation("empty t grid".into()));
    }
    let sweep_ks = curvatures(&sc.ks)?;
    let seeds = config_seeds(seed, uc.pairs);
    let per: Vec<Result<Vec<UkRow>>> =
        seeds.par_iter().enumerate().map(|(p, &s)| uk_rows(cfg, p, s, &ks)).collect();
    let table: Vec<UkRow> = per.into_iter().collect::<Result<Vec<_>>>()?.into_iter().flatten().collect();
    let bound_decreasing = table
        .chunks(ks.len())
        .all(|rows| rows.windows(2).all(|w| w[1].bound < w[0].bound));

    let (topo, m0) = sc.base.parts()?;
    let start = MultiCurve::from_json(&sc.start)?;
    let end = MultiCurve::from_json(&sc.end)?;
    let gamma = sc.base.curve(&sc.gamma)?;
    let lt = |t: f64| interpolate(&start, &end, t);
    let fam = |k: &CurvatureParam, t: f64| earthquake_family_member(&topo, k, &m0, &lt(t)?);
    let sweep =
        uniform_u_convergence_sweep(&topo, &m0, &sweep_ks, &sc.grid, &fam, &lt, &gamma, cfg.slack, &cfg.solver, &cfg.budget)?;

    let pass = table.iter().all(|r| r.pass) && bound_decreasing && sweep.pass;
    let summary = UkSummary {
        schema_version: SCHEMA_VERSION,
        command: "ukmap",
        seed,
        ks: uc.ks.clone(),
        pairs: uc.pairs,
        slack: cfg.slack,
        max_gap: table.iter().map(|r| r.gap).fold(0.0, f64::max),
        table: table.clone(),
        bound_decreasing,
        sweep: sweep.clone(),
        pass,
    };
    let uk_table: Vec<Vec<String>> = table
        .iter()
        .map(|r| {
            vec![
                r.pair.to_string(),
                r.seed.to_string(),
                fmt_f64(r.k),
                fmt_f64(r.k_star),
                r.gamma.clone(),
                r.support.clone(),
                r.weights.clone(),
                fmt_f64(r.recovered),
                fmt_f64(r.limit),
                fmt_f64(r.gap),
                fmt_f64(r.bound),
                r.iterations.to_string(),
                fmt_f64(r.residual),
                r.pass.to_string(),
            ]
        })
        .collect();
    let sweep_table: Vec<Vec<String>> = sweep
        .rows
        .iter()
        .map(|r| {
            let mut v: Vec<String> = [r.k, r.k_star, r.t, r.length, r.intersection, r.limit, r.bound, r.deviation, r.limit_gap]
                .iter()
                .map(|x| fmt_f64(*x))
                .collect();
            v.push(r.pass.to_string());
            v
        })
        .collect();
    Ok(CommandOutput {
        outcome: outcome(pass),
        summary: to_json(&summary)?,
        files: vec![
            ("ukmap.csv".into(), to_csv(&UK_COLUMNS, &uk_table)?),
            ("ukmap_sweep.csv".into(), to_csv(&SWEEP_COLUMNS, &sweep_table)?),
        ],
    })
}

#[derive(Serialize)]
struct Restart {
    start: FenchelNielsen,
    minimizer: FenchelNielsen,
    iterations: usize,
    distance: f64,
}

#[derive(Serialize)]
struct ProjectSummary {
    schema_version: u32,
    command: &'static str,
    seed: u64,
    current: serde_json::Value,
    omega: serde_json::Value,
    minimizer: FenchelNielsen,
    value: f64,
    report: SolveReport,
    restarts: Vec<Restart>,
    /// Largest coordinate distance between minimizers from different starts.
    agreement: f64,
    scale: f64,
    /// Coordinate distance between the projections of the current and of its multiple.
    scale_gap: f64,
    pass: bool,
}

fn coord_distance(a: &FenchelNielsen, b: &FenchelNielsen) -> f64 {
    a.lengths
        .iter()
        .zip(&b.lengths)
        .chain(a.twists.iter().zip(&b.twists))
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn project(cfg: &RunConfig) -> Result<CommandOutput> {
    let seed = cfg.require_seed()?;
    let pc = &cfg.project;
    let topo = PantsGraph::standard(pc.genus)?;
    let mu = match &pc.current {
        Some(v) => MultiCurve::from_json(v)?,
        None => MultiCurve::new(topo.marking_set().into_iter().map(|c| (c, 1.0)).collect())?,
    };
    let omega = match &pc.omega {
        Some(v) => MultiCurve::from_json(v)?,
        None => MultiCurve::empty(),
    };
    let start = pc.start.clone().unwrap_or_else(|| FenchelNielsen::uniform(pc.genus, 1.5));
    let (p, report) = project_current(&topo, &mu, &omega, &start, &cfg.minimizer, &cfg.budget)?;
    let total = mu.plus(&omega);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = topo.curve_count();
    let starts: Vec<FenchelNielsen> = (0..pc.restarts)
        .map(|_| {
            FenchelNielsen::new(
                (0..n).map(|_| rng.gen_range(0.8..2.5)).collect(),
                (0..n).map(|_| rng.gen_range(-0.5..0.5)).collect(),
            )
        })
        .collect();
    let restarts = starts
        .into_par_iter()
        .map(|s| {
            let (q, r) = minimize_length(&topo, &total, &s, &cfg.minimizer)?;
            Ok(Restart {
                distance: coord_distance(&p, &q),
                start: s,
                minimizer: q,
                iterations: r.iterations,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let agreement = restarts.iter().map(|r| r.distance).fold(0.0, f64::max);
    let (scaled, _) =
        project_current(&topo, &mu.scaled(pc.scale)?, &omega_scaled(&omega, pc.scale)?, &start, &cfg.minimizer, &cfg.budget)?;
    let scale_gap = coord_distance(&p, &scaled);
    let pass = report.converged && agreement <= pc.agreement_tol && scale_gap <= pc.scale_tol;
    let summary = ProjectSummary {
        schema_version: SCHEMA_VERSION,
        command: "project",
        seed,
        current: mu.to_json(),
        omega: omega.to_json(),
        value: weighted_length(&topo, &total, &p)?,
        minimizer: p,
        report,
        restarts,
        agreement,
        scale: pc.scale,
        scale_gap,
        pass,
    };
    Ok(CommandOutput {
        outcome: outcome(pass),
        summary: to_json(&summary)?,
        files: vec![],
    })
}

fn omega_scaled(omega: &MultiCurve, s: f64) -> Result<MultiCurve> {
    if omega.is_empty() {
        Ok(MultiCurve::empty())
    } else {
        omega.scaled(s)
    }
}

#[derive(Debug, Default, Serialize)]
pub struct CaseCounts {
    pub intersecting: usize,
    pub asymptotic: usize,
    pub nested: usize,
    pub opposed: usize,
}

#[derive(Serialize)]
struct CurvatureCheck {
    distances: usize,
    /// `|K_III - K/(K+1)| / |K_III|` in double precision.
    max_relative_gap: f64,
    /// `|K_III - K/tanh^2 d|` in double precision.
    max_stable_gap: f64,
    /// `|K_III - K/(K+1)|` at 256 bits.
    max_wide_gap: f64,
}

#[derive(Serialize)]
struct DualitySummary {
    schema_version: u32,
    command: &'static str,
    seed: u64,
    pairs: usize,
    cases: CaseCounts,
    case_agreement: usize,
    max_length_gap: f64,
    max_involution_error: f64,
    transforms: usize,
    max_lorentz_gap: f64,
    curvature: CurvatureCheck,
    cap_edges: Vec<f64>,
    pass: bool,
}

fn pair_length(p: &PlanePair) -> (u8, f64) {
    match *p {
        PlanePair::Intersecting { angle } => (0, angle),
        PlanePair::Asymptotic { nested } => (1 + u8::from(nested), 0.0),
        PlanePair::Disjoint { distance, nested } => (3 + u8::from(nested), distance),
    }
}

/// Whether the two sides of the dictionary agree, with their length gap.
fn dictionary_gap(p1: &OrientedPlane, p2: &OrientedPlane, tol: f64) -> Result<(bool, f64)> {
    let pair = classify_plane_pair(p1, p2)?;
    let seg = dual_segment_type(&plane_dual(p1), &plane_dual(p2))?;
    let gap = match (pair, seg) {
        (PlanePair::Intersecting { angle }, crate::duality::DualSegment::Spacelike { length }) => (angle - length).abs(),
        (PlanePair::Disjoint { distance, .. }, crate::duality::DualSegment::Timelike { length, .. }) => {
            (distance - length).abs()
        }
        _ => 0.0,
    };
    Ok((dictionary_agrees(&pair, &seg, tol), gap))
}

fn duality(cfg: &RunConfig) -> Result<CommandOutput> {
    let seed = cfg.require_seed()?;
    let dc = &cfg.duality;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs: Vec<(OrientedPlane, OrientedPlane)> =
        (0..dc.pairs).map(|_| (random_plane(&mut rng, dc.spread), random_plane(&mut rng, dc.spread))).collect();
    let mut cases = CaseCounts::default();
    let mut agree = 0;
    let mut max_gap: f64 = 0.0;
    let mut inv: f64 = 0.0;
    for (p1, p2) in &pairs {
        match classify_plane_pair(p1, p2)? {
            PlanePair::Intersecting { .. } => cases.intersecting += 1,
            PlanePair::Asymptotic { .. } => cases.asymptotic += 1,
            PlanePair::Disjoint { nested: true, .. } => cases.nested += 1,
            PlanePair::Disjoint { nested: false, .. } => cases.opposed += 1,
        }
        let (ok, gap) = dictionary_gap(p1, p2, dc.tol)?;
        agree += usize::from(ok);
        max_gap = max_gap.max(gap);
        for p in [p1, p2] {
            let back = plane_dual(p).dual_plane();
            let e = (0..4).map(|k| (back.normal().coords[k] - p.normal().coords[k]).abs()).fold(0.0, f64::max);
            inv = inv.max(e);
        }
    }
    let mut lorentz: f64 = 0.0;
    let mut lorentz_cases = true;
    for _ in 0..dc.transforms {
        let m = random_lorentz(&mut rng, dc.rapidity);
        for (p1, p2) in &pairs {
            let a = pair_length(&classify_plane_pair(p1, p2)?);
            let b = pair_length(&classify_plane_pair(&p1.transform(&m)?, &p2.transform(&m)?)?);
            lorentz_cases &= a.0 == b.0;
            lorentz = lorentz.max((a.1 - b.1).abs());
        }
    }

    let mut curvature = CurvatureCheck {
        distances: dc.distances,
        max_relative_gap: 0.0,
        max_stable_gap: 0.0,
        max_wide_gap: 0.0,
    };
    for j in 0..dc.distances {
        let d = if dc.distances == 1 { 0.05 } else { 0.05 + 4.95 * j as f64 / (dc.distances - 1) as f64 };
        let c = equidistant_curvatures(&d)?;
        let tanh2 = d.tanh() * d.tanh();
        curvature.max_relative_gap = curvature.max_relative_gap.max((c.k_third - k_star(&c.k)).abs() / c.k_third.abs());
        curvature.max_stable_gap = curvature.max_stable_gap.max((c.k_third - c.k / tanh2).abs());
        let wide = with_precision(256, || -> Result<f64> {
            let cb = equidistant_curvatures(&BigReal::from_f64(d))?;
            Ok((cb.k_third.clone() - k_star(&cb.k)).abs().to_f64())
        })?;
        curvature.max_wide_gap = curvature.max_wide_gap.max(wide);
    }

    let tilt: f64 = 0.5;
    let faces = (0..3)
        .map(|j| {
            let a = 2.0 * std::f64::consts::PI * j as f64 / 3.0;
            OrientedPlane::from_normal(MinkowskiVec::new(0.0, tilt.sin() * a.cos(), tilt.sin() * a.sin(), tilt.cos()))
        })
        .collect::<Result<Vec<_>>>()?;
    let cap = polyhedral_dual(&faces, &[(0, 1), (1, 2), (2, 0)])?;
    let cap_edges: Vec<f64> = cap.edges.iter().map(|e| e.length).collect();
    let cap_ok = cap_edges.iter().all(|l| (l - cap_edges[0]).abs() <= 1e-12);

    let pass = agree == pairs.len()
        && max_gap <= dc.tol
        && inv <= 1e-12
        && lorentz_cases
        && lorentz <= dc.tol
        && curvature.max_relative_gap < 1e-12
        && curvature.max_stable_gap < 1e-12
        && curvature.max_wide_gap < 1e-12
        && cap_ok;
    let summary = DualitySummary {
        schema_version: SCHEMA_VERSION,
        command: "duality",
        seed,
        pairs: pairs.len(),
        cases,
        case_agreement: agree,
        max_length_gap: max_gap,
        max_involution_error: inv,
        transforms: dc.transforms,
        max_lorentz_gap: lorentz,
        curvature,
        cap_edges,
        pass,
    };
    Ok(CommandOutput {
        outcome: outcome(pass),
        summary: to_json(&summary)?,
        files: vec![],
    })
}
