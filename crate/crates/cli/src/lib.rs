//! Batch front end: configuration loading, experiment orchestration, and
//! deterministic CSV/JSON/SVG artifact output.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use horseshoe_thermo::maps::{self, MapParams, Point3};
use horseshoe_thermo::potentials::{self, PotentialSpec, Verdict};
use horseshoe_thermo::symbolic::{self, InducingParams, TwoSidedWindow, Word};
use horseshoe_thermo::{expansion, inducing, measures, thermo};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Front-end error; `Config` maps to exit code 3, the rest to 1.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("run error: {0}")]
    Run(String),
}

impl From<horseshoe_thermo::Error> for CliError {
    fn from(e: horseshoe_thermo::Error) -> Self {
        CliError::Run(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Run(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

/// Final status of a successful run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    /// A numerical certificate legitimately failed to decide.
    Inconclusive,
}

/// Process exit code for a finished run.
pub fn exit_code(r: &Result<Outcome>) -> u8 {
    match r {
        Ok(Outcome::Success) => 0,
        Ok(Outcome::Inconclusive) => 2,
        Err(CliError::Config(_)) => 3,
        Err(_) => 1,
    }
}

/// The experiment catalogue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    PressureCurve,
    PhaseScan,
    InduceStats,
    Gibbs,
    AdmissibleCheck,
    ProjectiveCheck,
    HypTimes,
    Entropy,
    SemiconjugacyTest,
    KacAbramov,
}

impl Experiment {
    pub const ALL: [Experiment; 10] = [
        Experiment::PressureCurve,
        Experiment::PhaseScan,
        Experiment::InduceStats,
        Experiment::Gibbs,
        Experiment::AdmissibleCheck,
        Experiment::ProjectiveCheck,
        Experiment::HypTimes,
        Experiment::Entropy,
        Experiment::SemiconjugacyTest,
        Experiment::KacAbramov,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::PressureCurve => "pressure-curve",
            Experiment::PhaseScan => "phase-scan",
            Experiment::InduceStats => "induce-stats",
            Experiment::Gibbs => "gibbs",
            Experiment::AdmissibleCheck => "admissible-check",
            Experiment::ProjectiveCheck => "projective-check",
            Experiment::HypTimes => "hyp-times",
            Experiment::Entropy => "entropy",
            Experiment::SemiconjugacyTest => "semiconjugacy-test",
            Experiment::KacAbramov => "kac-abramov",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Declarative potential description.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PotentialConfig {
    /// `log |DF^c|`.
    Central,
    Constant {
        value: f64,
    },
    /// The Hölder ramp family: `peak` below `c0`, ramp to `floor` at `z=1`.
    Ramp {
        c0: f64,
        peak: f64,
        floor: f64,
        xi: f64,
        #[serde(default = "default_scale")]
        scale: f64,
    },
}

fn default_scale() -> f64 {
    1.0
}

impl Default for PotentialConfig {
    fn default() -> Self {
        PotentialConfig::Central
    }
}

/// Truncation knobs shared by the experiments.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Truncations {
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "default_l")]
    pub l: usize,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    #[serde(default = "default_depth")]
    pub depth: usize,
}

fn default_k() -> usize {
    8
}
fn default_l() -> usize {
    8
}
fn default_n_max() -> usize {
    30
}
fn default_depth() -> usize {
    8
}

impl Default for Truncations {
    fn default() -> Self {
        Truncations { k: 8, l: 8, n_max: 30, depth: 8 }
    }
}

/// A fully resolved run: experiment, parameters, truncations, seed, output.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub map_params: MapParams,
    pub inducing: InducingParams,
    #[serde(default)]
    pub potential: PotentialConfig,
    pub experiment: Experiment,
    #[serde(default)]
    pub truncations: Truncations,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default = "default_threads")]
    pub threads: usize,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}
fn default_threads() -> usize {
    1
}

/// Parses and validates a config file; all failures map to exit code 3.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

/// Parses a config from a JSON string with field-level diagnostics.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let cfg: RunConfig = serde_json::from_str(text)
        .map_err(|e| CliError::Config(format!("line {}, column {}: {e}", e.line(), e.column())))?;
    validate(&cfg)?;
    Ok(cfg)
}

fn validate(cfg: &RunConfig) -> Result<()> {
    let t = &cfg.truncations;
    if !(2..=12).contains(&t.k) {
        return Err(CliError::Config(format!("truncations.k = {} outside 2..=12", t.k)));
    }
    if !(2..=12).contains(&t.l) {
        return Err(CliError::Config(format!("truncations.l = {} outside 2..=12", t.l)));
    }
    if t.n_max < 10 {
        return Err(CliError::Config(format!("truncations.n_max = {} below 10", t.n_max)));
    }
    if t.depth == 0 || t.depth > 64 {
        return Err(CliError::Config(format!("truncations.depth = {} outside 1..=64", t.depth)));
    }
    if cfg.threads == 0 || cfg.threads > 64 {
        return Err(CliError::Config(format!("threads = {} outside 1..=64", cfg.threads)));
    }
    if let PotentialConfig::Ramp { c0, peak, floor, xi, .. } = cfg.potential {
        if !(0.0 < c0 && c0 < 1.0) || peak <= floor || !(0.0 < xi && xi <= 1.0) {
            return Err(CliError::Config(
                "potential.ramp requires 0 < c0 < 1, peak > floor, 0 < xi <= 1".into(),
            ));
        }
    }
    Ok(())
}

fn resolve_potential(cfg: &PotentialConfig, params: &MapParams) -> Result<PotentialSpec> {
    Ok(match cfg {
        PotentialConfig::Central => potentials::central_potential(params),
        PotentialConfig::Constant { value } => PotentialSpec::constant(*value),
        PotentialConfig::Ramp { c0, peak, floor, xi, scale } => {
            potentials::example_potential(*c0, *peak, *floor, *xi)?.scale(*scale)
        }
    })
}

// ---------------------------------------------------------------------------
// artifact writers

/// Writes bytes atomically: temp file in the target directory, then rename.
fn atomic_write(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf> {
    let target = dir.join(name);
    let tmp = dir.join(format!(".{name}.tmp"));
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, &target)?;
    Ok(target)
}

/// Shortest-roundtrip float formatting; deterministic across runs.
fn fmt_f(v: f64) -> String {
    format!("{v}")
}

/// RFC-4180: comma separation, CRLF record terminators, quoting only when a
/// field contains a comma, quote, or newline.
fn csv_bytes(header: &[&str], rows: &[Vec<String>]) -> Vec<u8> {
    let quote = |f: &str| -> String {
        if f.contains(',') || f.contains('"') || f.contains('\n') {
            format!("\"{}\"", f.replace('"', "\"\""))
        } else {
            f.to_string()
        }
    };
    let mut out = String::new();
    out.push_str(&header.iter().map(|h| quote(h)).collect::<Vec<_>>().join(","));
    out.push_str("\r\n");
    for row in rows {
        out.push_str(&row.iter().map(|f| quote(f)).collect::<Vec<_>>().join(","));
        out.push_str("\r\n");
    }
    out.into_bytes()
}

/// Plot flavor for [`emit_plot`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    Line,
    Scatter,
}

/// Deterministic SVG 1.1: fixed canvas, no timestamps, data mapped into a
/// margin box. Errors on an empty table.
pub fn emit_plot(points: &[(f64, f64)], kind: PlotKind, title: &str) -> Result<String> {
    if points.is_empty() {
        return Err(CliError::Run("empty table: nothing to plot".into()));
    }
    let (w, h, m) = (640.0, 480.0, 48.0);
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for (x, y) in points {
        x0 = x0.min(*x);
        x1 = x1.max(*x);
        y0 = y0.min(*y);
        y1 = y1.max(*y);
    }
    if x1 - x0 < 1e-12 {
        x1 = x0 + 1.0;
    }
    if y1 - y0 < 1e-12 {
        y1 = y0 + 1.0;
    }
    let px = |x: f64| m + (x - x0) / (x1 - x0) * (w - 2.0 * m);
    let py = |y: f64| h - m - (y - y0) / (y1 - y0) * (h - 2.0 * m);
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "<text x=\"{:.2}\" y=\"24\" font-family=\"monospace\" font-size=\"14\">{title}</text>\n",
        w / 2.0 - 4.0 * title.len() as f64
    ));
    svg.push_str(&format!(
        "<line x1=\"{m}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"black\"/>\n",
        h - m,
        w - m,
        h - m
    ));
    svg.push_str(&format!(
        "<line x1=\"{m}\" y1=\"{m}\" x2=\"{m}\" y2=\"{:.2}\" stroke=\"black\"/>\n",
        h - m
    ));
    match kind {
        PlotKind::Line => {
            let pts: Vec<String> = points.iter().map(|(x, y)| format!("{:.2},{:.2}", px(*x), py(*y))).collect();
            svg.push_str(&format!(
                "<polyline points=\"{}\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\"/>\n",
                pts.join(" ")
            ));
        }
        PlotKind::Scatter => {
            for (x, y) in points {
                svg.push_str(&format!(
                    "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.5\" fill=\"#d62728\"/>\n",
                    px(*x),
                    py(*y)
                ));
            }
        }
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

// ---------------------------------------------------------------------------
// orchestration

struct Artifacts<'a> {
    dir: &'a Path,
    written: Vec<String>,
}

impl<'a> Artifacts<'a> {
    fn new(dir: &'a Path) -> Self {
        Artifacts { dir, written: Vec::new() }
    }

    fn csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
        atomic_write(self.dir, name, &csv_bytes(header, rows))?;
        self.written.push(name.to_string());
        Ok(())
    }

    fn json(&mut self, name: &str, value: &serde_json::Value) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        atomic_write(self.dir, name, text.as_bytes())?;
        self.written.push(name.to_string());
        Ok(())
    }

    fn svg(&mut self, name: &str, points: &[(f64, f64)], kind: PlotKind, title: &str) -> Result<()> {
        let svg = emit_plot(points, kind, title)?;
        atomic_write(self.dir, name, svg.as_bytes())?;
        self.written.push(name.to_string());
        Ok(())
    }
}

/// Runs the configured experiment and writes its artifacts plus a manifest
/// echoing the resolved config.
pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    validate(cfg)?;
    fs::create_dir_all(&cfg.output_dir)?;
    let dir = cfg.output_dir.clone();
    let mut art = Artifacts::new(&dir);
    let outcome = match cfg.experiment {
        Experiment::PressureCurve => run_pressure_curve(cfg, &mut art)?,
        Experiment::PhaseScan => run_phase_scan(cfg, &mut art)?,
        Experiment::InduceStats => run_induce_stats(cfg, &mut art)?,
        Experiment::Gibbs => run_gibbs(cfg, &mut art)?,
        Experiment::AdmissibleCheck => run_admissible_check(cfg, &mut art)?,
        Experiment::ProjectiveCheck => run_projective_check(cfg, &mut art)?,
        Experiment::HypTimes => run_hyp_times(cfg, &mut art)?,
        Experiment::Entropy => run_entropy(cfg, &mut art)?,
        Experiment::SemiconjugacyTest => run_semiconjugacy(cfg, &mut art)?,
        Experiment::KacAbramov => run_kac_abramov(cfg, &mut art)?,
    };
    let manifest = serde_json::json!({
        "config": cfg,
        "artifacts": art.written,
        "outcome": match outcome { Outcome::Success => "success", Outcome::Inconclusive => "inconclusive" },
    });
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    atomic_write(&dir, "manifest.json", text.as_bytes())?;
    Ok(outcome)
}

fn t_grid() -> Vec<f64> {
    (0..=40).map(|i| i as f64 * 0.05).collect()
}

/// Splits the grid into per-thread chunks; results are reassembled in grid
/// order so the thread count never changes the output.
fn parallel_curve(grid: &[f64], l: usize, params: &MapParams, threads: usize) -> Result<Vec<expansion::PressureRow>> {
    let threads = threads.min(grid.len()).max(1);
    if threads == 1 {
        return Ok(expansion::pressure_curve(grid, l, params)?);
    }
    let chunk = grid.len().div_ceil(threads);
    let results: Vec<horseshoe_thermo::error::Result<Vec<expansion::PressureRow>>> =
        std::thread::scope(|s| {
            let handles: Vec<_> = grid
                .chunks(chunk)
                .map(|c| s.spawn(move || expansion::pressure_curve(c, l, params)))
                .collect();
            handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
        });
    let mut rows = Vec::with_capacity(grid.len());
    for r in results {
        rows.extend(r?);
    }
    Ok(rows)
}

fn curve_rows_csv(rows: &[expansion::PressureRow]) -> Vec<Vec<String>> {
    rows.iter()
        .map(|r| vec![fmt_f(r.t), fmt_f(r.branch_q), fmt_f(r.branch_hyp), fmt_f(r.p_hat)])
        .collect()
}

fn run_pressure_curve(cfg: &RunConfig, art: &mut Artifacts) -> Result<Outcome> {
    let grid = t_grid();
    let rows = parallel_curve(&grid, cfg.truncations.l, &cfg.map_params, cfg.threads)?;
    art.csv("pressure-curve.csv", &["t", "branch_q", "branch_hyp", "p_hat"], &curve_rows_csv(&rows))?;
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.t, r.p_hat)).collect();
    art.svg("pressure-curve.svg", &pts, PlotKind::Line, "pressure curve")?;
    art.json(
        "pressure-curve.json",
        &serde_json::json!({
            "l": cfg.truncations.l,
            "t_min": grid.first(),
            "t_max": grid.last(),
            "rows": rows.len(),
            "p_hat_at_zero": rows.first().map(|r| r.p_hat),
        }),
    )?;
    Ok(Outcome::Success)
}

fn run_phase_scan(cfg: &RunConfig, art: &mut Artifacts) -> Result<Outcome> {
    let grid = t_grid();
    let rows = parallel_curve(&grid, cfg.truncations.l, &cfg.map_params, cfg.threads)?;
    art.csv("phase-scan.csv", &["t", "branch_q", "branch_hyp", "p_hat"], &curve_rows_csv(&rows))?;
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.t, r.p_hat)).collect();
    art.svg("phase-scan.svg", &pts, PlotKind::Line, "phase scan")?;
    match expansion::detect_phase_transition(&rows) {
        Ok((t0, slope_jump)) => {
            art.json(
                "phase-scan.json",
                &serde_json::json!({
                    "l": cfg.truncations.l,
                    "t0_hat": t0,
                    "slope_jump": slope_jump,
                    "detected": true,
                }),
            )?;
            Ok(Outcome::Success)
        }
        Err(horseshoe_thermo::Error::NotFound) => {
            art.json(
                "phase-scan.json",
                &serde_json::json!({ "l": cfg.truncations.l, "detected": false }),
            )?;
            Ok(Outcome::Inconclusive)
        }
        Err(e) => Err(e.into()),
    }
}

fn run_induce_stats(cfg: &RunConfig, art: &mut Artifacts) -> Result<Outcome> {
    let alpha = cfg.inducing.alpha();
    let tau = cfg.inducing.tau();
    let mut rows = Vec::new();
    let mut all_ok = true;
    for i in 2..=cfg.truncations.k {
        let level = symbolic::enumerate_level(i, alpha)?;
        let mut identity_ok = true;
        let mut bound_ok = true;
        for c in &level {
            let d = symbolic::block_decompose(c.word())?;
            identity_ok &= d.length_identity_lhs() == i;
            bound_ok &= c.word().ones() as f64 >= tau * i as f64;
        }
        all_ok &= identity_ok && bound_ok;
        let example = level.first().map(|c| c.word().to_string()).unwrap_or_default();
        rows.push(vec![
            i.to_string(),
            level.len().to_string(),
            example,
            identity_ok.to_string(),
            bound_ok.to_string(),
        ]);
    }
    art.csv("induce-stats.csv", &["level", "count", "example", "identity_ok", "bound_ok"], &rows)?;
    art.json(
        "induce-stats.json",
        &serde_json::json!({
            "alpha": alpha,
            "tau": tau,
            "block_cutoff": cfg.inducing.block_cutoff(),
            "k": cfg.truncations.k,
            "all_ok": all_ok,
        }),
    )?;
    Ok(if all_ok { Outcome::Success } else { Outcome::Inconclusive })
}

fn run_gibbs(cfg: &RunConfig, art: &mut Artifacts) -> Result<Outcome> {
    let phi = resolve_potential(&cfg.potential, &cfg.map_params)?;
    let table = inducing::InducedPotentialTable::build(
        &phi,
        cfg.truncations.k,
        cfg.inducing.alpha(),
        cfg.truncations.depth,
        &cfg.map_params,
    )?;
    let g = thermo::gibbs_approx(&table)?;
    let tail = thermo::exponential_tail_check(&g)?;
    let rows: Vec<Vec<String>> = g
        .cylinder_measure
        .iter()
        .map(|(c, m)| vec![c.word().to_string(), c.level().to_string(), fmt_f(*m)])
        .collect();
    art.csv("gibbs.csv", &["cylinder", "level", "mass"], &rows)?;
    art.json(
        "gibbs.json",
        &serde_json::json!({
            "k": cfg.truncations.k,
            "alphabet": g.cylinder_measure.len(),
            "pressure_lower": g.pressure.lower,
            "pressure_upper": g.pressure.upper,
            "pressure_point": g.pressure.eigen_point,
            "eigenvalue_log": g.eigenvalue_log,
            "eigen_gap_ratio": g.eigen_gap_ratio,
            "gibbs_constant": g.gibbs_constant,
            "tail_theta": tail.theta,
            "tail_c": tail.c,
        }),
    )?;
    let decisive = tail.theta < 1.0 && g.pressure.lower <= g.pressure.upper + 1e-9;
    Ok(if decisive { Outcome::Success } else { Outcome::Inconclusive })
}

fn run_admissible_check(cfg: &RunConfig, art: &mut Artifacts) -> Result<Outcome> {
    let PotentialConfig::Ramp { c0, peak, floor, xi, .. } = cfg.potential else {
        return Err(CliError::Config("admissible-check requires a ramp potential".into()));
    };
    let fam = potentials::AdmissibleFamily::new(c0, peak, floor, xi)?;
    let (mu_max, _) = measures::markov_equilibrium(&PotentialSpec::zero(), cfg.truncations.l, &cfg.map_params)?;
    let integral = mu_max.integral(&fam.base);
    let interval = potentials::t_interval(&fam, integral)?;
    let phi_t0 = fam.potential_at(interval.t0);
    let (_, pressure) = measures::markov_equilibrium(&phi_t0, cfg.truncations.l, &cfg.map_params)?;
    let c2 = potentials::check_c2(&phi_t0, 1, pressure, &cfg.map_params)?;
    let profile = potentials::check_c1(&fam.base, cfg.inducing.alpha(), 6, &cfg.map_params)?;
    let (fit_c, fit_a) = profile.fit.unwrap_or((f64::NAN, f64::NAN));
    art.json(
        "admissible-check.json",
        &serde_json::json!({
            "t0": interval.t0,
            "t1_lower": interval.t1_lower,
            "nonempty": interval.nonempty,
            "variation_at_t0": fam.variation_at(interval.t0),
            "c2_verdict": format!("{:?}", c2.verdict),
            "c2_sup_lower": c2.sup_lower,
            "c2_sup_upper": c2.sup_upper,
            "c1_fit_c": fit_c,
            "c1_fit_a": fit_a,
            "c1_certified": profile.certified(),
        }),
    )?;
    let decisive = interval.nonempty && c2.verdict != Verdict::Inconclusive && profile.fit.is_some();
    Ok(if decisive { Outcome::Success } else { Outcome::Inconclusive })
}

fn run_projective_check(cfg: &RunConfig, art: &mut Artifacts) -> Result<Outcome> {
    let u = resolve_potential(&cfg.potential, &cfg.map_params)?;
    let v = u.add_constant(0.2);
    let phi = potentials::projective_example(&u, &v, &cfg.map_params)?;
    let d1 = potentials::check_d1(&phi, &u, 24, &cfg.map_params);
    let family = measures::dirac_family(&cfg.map_params);
    let d2 = potentials::check_d2(&phi, &family, horseshoe_thermo::h_top())?;
    art.json(
        "projective-check.json",
        &serde_json::json!({
            "d1_min_slack": d1.min_slack,
            "d1_pass": d1.pass,
            "d2_sup_integral": d2.sup_integral,
            "d2_pass": d2.pass,
        }),
    )?;
    Ok(Outcome::Success)
}

fn run_hyp_times(cfg: &RunConfig, art: &mut Artifacts) -> Result<Outcome> {
    let params = &cfg.map_params;
    let hp = expansion::HypTimeParams::new(0.66, 0.05)?;
    let c = (1.0 / 0.66f64).ln();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut rows = Vec::new();
    let mut all_ok = true;
    let mut points = Vec::new();
    let record = |orbit: &expansion::OrbitRecord,
                      kind: &str,
                      idx: usize,
                      rows: &mut Vec<Vec<String>>,
                      points: &mut Vec<(f64, f64)>,
                      all_ok: &mut bool|
     -> Result<()> {
        let n = orbit.len() as f64;
        let mean = orbit.log_min_expansion.iter().sum::<f64>() / n;
        let a = orbit.log_min_expansion.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let d = expansion::frequency_d(orbit, &hp)?;
        let bound = if a > c { ((mean - c) / (a - c)).max(0.0) } else { 0.0 };
        let ok = d + 1e-12 >= bound;
        *all_ok &= ok;
        points.push((mean, d));
        rows.push(vec![
            format!("{kind}-{idx}"),
            fmt_f(mean),
            fmt_f(d),
            fmt_f(bound),
            ok.to_string(),
        ]);
        Ok(())
    };
    for i in 0..100 {
        let logs: Vec<f64> = (0..150).map(|_| rng.gen_range(-0.3..1.2)).collect();
        let orbit = expansion::OrbitRecord::synthetic(logs);
        record(&orbit, "synthetic", i, &mut rows, &mut points, &mut all_ok)?;
    }
    for i in 0..100 {
        // the x = 0 column of S1 is invariant under G, so these orbits are
        // honest dynamical orbits that never escape
        let y = (i as f64 + 0.5) / 100.0;
        let orbit = expansion::OrbitRecord::from_planar_orbit(&Point3::new(0.0, y, 0.0), 150, params)?;
        record(&orbit, "dynamical", i, &mut rows, &mut points, &mut all_ok)?;
    }
    art.csv("hyp-times.csv", &["orbit", "mean_log_expansion", "d", "pliss_bound", "ok"], &rows)?;
    art.svg("hyp-times.svg", &points, PlotKind::Scatter, "hyperbolic time frequency")?;
    art.json(
        "hyp-times.json",
        &serde_json::json!({
            "orbits": rows.len(),
            "sigma_h": 0.66,
            "all_ok": all_ok,
        }),
    )?;
    Ok(if all_ok { Outcome::Success } else { Outcome::Inconclusive })
}

fn run_entropy(cfg: &RunConfig, art: &mut Artifacts) -> Result<Outcome> {
    let r = measures::topological_entropy_estimate(cfg.truncations.n_max)?;
    art.json(
        "entropy.json",
        &serde_json::json!({
            "spectral": r.spectral,
            "count_growth": r.count_growth,
            "n_used": r.n_used,
        }),
    )?;
    Ok(Outcome::Success)
}

fn random_window(rng: &mut ChaCha8Rng, depth: usize) -> Result<TwoSidedWindow> {
    let admissible = |rng: &mut ChaCha8Rng, n: usize, end_zero: bool| -> Vec<u8> {
        let mut bits = Vec::with_capacity(n);
        let mut prev = false;
        for j in 0..n {
            let force = prev || (end_zero && j + 1 == n);
            let b = if force { 0 } else { u8::from(rng.gen::<f64>() < 0.4) };
            bits.push(b);
            prev = b == 1;
        }
        bits
    };
    let past = admissible(rng, depth, true);
    let future = admissible(rng, depth, false);
    Ok(TwoSidedWindow::new(
        Word::from_bits(&past).map_err(CliError::from)?,
        Word::from_bits(&future).map_err(CliError::from)?,
    )?)
}

fn run_semiconjugacy(cfg: &RunConfig, art: &mut Artifacts) -> Result<Outcome> {
    let params = &cfg.map_params;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut max_semi = 0.0f64;
    let mut checked = 0usize;
    while checked < 10_000 {
        let win = random_window(&mut rng, 60)?;
        let (p, _) = symbolic::point_from_itinerary(&win, params)?;
        let Ok(fp) = maps::horseshoe_f_inv_auto(&p, params) else { continue };
        let lhs = maps::projection_pi(&fp)?;
        let rhs = maps::planar_g(&maps::projection_pi(&p)?, params)?;
        max_semi = max_semi.max(lhs.split_dist(&rhs));
        checked += 1;
    }
    // shift equivariance: one F application against the reconstruction from
    // the shifted window, on 100 random orbits
    let mut max_shift = 0.0f64;
    for _ in 0..100 {
        let win = random_window(&mut rng, 60)?;
        let (p, _) = symbolic::point_from_itinerary(&win, params)?;
        let shifted = win.shifted()?;
        let (q, _) = symbolic::point_from_itinerary(&shifted, params)?;
        let fp = maps::horseshoe_f(&p, params)?;
        max_shift = max_shift.max(fp.split_dist(&q));
    }
    let pass = max_semi < 1e-12 && max_shift < 1e-5;
    art.json(
        "semiconjugacy-test.json",
        &serde_json::json!({
            "points": checked,
            "max_semiconjugacy_error": max_semi,
            "orbits": 100,
            "max_shift_error": max_shift,
            "pass": pass,
        }),
    )?;
    Ok(if pass { Outcome::Success } else { Outcome::Inconclusive })
}

fn run_kac_abramov(cfg: &RunConfig, art: &mut Artifacts) -> Result<Outcome> {
    let params = &cfg.map_params;
    let alpha = cfg.inducing.alpha();
    let mut alphabet = Vec::new();
    for i in 2..=cfg.truncations.k {
        alphabet.extend(symbolic::enumerate_level(i, alpha)?);
    }
    if alphabet.len() < 2 {
        return Err(CliError::Run("alphabet too small for kac-abramov".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut rows = Vec::new();
    let mut max_err = 0.0f64;
    for pair in 0..50 {
        let raw: Vec<f64> = (0..alphabet.len()).map(|_| rng.gen_range(0.1..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let weights: Vec<_> = alphabet.iter().cloned().zip(raw.iter().map(|w| w / total)).collect();
        let nu = inducing::FiniteShiftMeasure::new(weights, alpha)?;
        let peak = rng.gen_range(0.5..1.5);
        let floor = peak - rng.gen_range(0.5..1.0);
        let shift = rng.gen_range(-1.0..1.0);
        let phi = potentials::example_potential(0.84, peak, floor, 1.0)?.add_constant(shift);
        let rep = inducing::kac_abramov_check(&nu, &phi, cfg.truncations.depth, params, cfg.seed ^ pair)?;
        max_err = max_err.max(rep.abs_err);
        rows.push(vec![pair.to_string(), fmt_f(rep.lhs), fmt_f(rep.rhs), fmt_f(rep.abs_err)]);
    }
    // Bernoulli entropy identity on a fixed two-atom measure
    let two = inducing::FiniteShiftMeasure::new(
        vec![(alphabet[0].clone(), 0.5), (alphabet[1].clone(), 0.5)],
        alpha,
    )?;
    let phi1 = PotentialSpec::constant(1.0);
    let rep = inducing::kac_abramov_check(&two, &phi1, cfg.truncations.depth, params, cfg.seed)?;
    let entropy = rep.entropy.ok_or_else(|| CliError::Run("entropy identity unavailable".into()))?;
    art.csv("kac-abramov.csv", &["pair", "lhs", "rhs", "abs_err"], &rows)?;
    art.json(
        "kac-abramov.json",
        &serde_json::json!({
            "pairs": 50,
            "max_abs_err": max_err,
            "entropy_predicted": entropy.predicted,
            "entropy_estimated": entropy.estimated,
            "entropy_rel_err": entropy.rel_err,
        }),
    )?;
    let pass = max_err < 1e-12 && entropy.rel_err < 0.05;
    Ok(if pass { Outcome::Success } else { Outcome::Inconclusive })
}
