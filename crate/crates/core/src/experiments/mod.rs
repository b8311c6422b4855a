//! Named presets for the benchmark problems and the driver that turns a
//! configuration into a convergence table.

pub mod solutions;

use std::fs;
use std::path::{Path, PathBuf};

use log::info;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::argmax::{DictionarySpec, Parameterization, SearchConfig, Searcher};
use crate::dictionary::{Activation, BiasRange, Expansion, MultiIndex};
use crate::error::{Error, Result};
use crate::greedy::{oga, rga, GreedyRun, OgaConfig, RgaConfig, Selector, Snapshot, StopReason};
use crate::metrics::{
    error_norms, export_breakpoints, relative_gap_values, sample_embedded, ConvergenceReport, ExactSolution,
};
use crate::problem::{
    assemble_energy, assemble_nonlinear, assemble_penalized, assemble_pinn, BoundaryCondition, BoundaryScaling,
    EllipticProblem, Field, NonlinearEnergyProblem, Objective, PinnProblem, QuadraticObjective,
};
use crate::quadrature::{
    boundary_monte_carlo, boundary_rule, disk_polar_gauss, gauss_grid, halton_with_offset, monte_carlo, BoxDomain,
    Domain, SampleRegion,
};

use solutions::Manufactured;

/// Every preset name accepted by [`ExperimentConfig::preset`].
pub const PRESETS: [&str; 9] = [
    "ex1-neumann",
    "ex1-dirichlet",
    "ex1-pinn",
    "ex2-peaks",
    "ex3-2d",
    "ex3-2d-pinn",
    "ex4-biharmonic",
    "ex5-highdim",
    "ex6-poisson-boltzmann",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", deny_unknown_fields)]
pub enum Algorithm {
    Oga {
        #[serde(default = "default_eps_gram")]
        eps_gram: f64,
        #[serde(default = "default_stop_rel")]
        stop_rel: f64,
    },
    Rga {
        m: f64,
    },
}

fn default_eps_gram() -> f64 {
    OgaConfig::default().eps_gram
}

fn default_stop_rel() -> f64 {
    OgaConfig::default().stop_rel
}

impl Algorithm {
    fn oga() -> Self {
        Algorithm::Oga { eps_gram: default_eps_gram(), stop_rel: default_stop_rel() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", deny_unknown_fields)]
pub enum Loss {
    Energy,
    /// Dirichlet penalty with `δ = delta_coef · n⁻²`.
    Penalized { delta_coef: f64 },
    Pinn,
}

/// Number of samples as a function of the neuron count.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", deny_unknown_fields)]
pub enum SamplePolicy {
    /// `samples` for every `n`.
    Fixed,
    /// `max(⌈n² / divisor⌉, floor)`.
    NSquared { divisor: f64, floor: usize },
}

impl SamplePolicy {
    pub fn count(&self, n: usize, fixed: usize) -> usize {
        match self {
            SamplePolicy::Fixed => fixed,
            SamplePolicy::NSquared { divisor, floor } => {
                (((n * n) as f64 / divisor).ceil() as usize).max(*floor)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSpec {
    /// Gauss nodes per cell minus one.
    pub t: usize,
    /// Cells per dimension of the training rule.
    pub cells: usize,
    /// Cells per dimension of the error rule (radial cells on the disk).
    pub fine_cells: usize,
    /// Interior sample count for Monte-Carlo and Halton rules.
    pub samples: usize,
    /// Boundary samples per face.
    pub boundary_samples: usize,
    /// Angular nodes of the polar error rule.
    pub fine_angles: usize,
    pub policy: SamplePolicy,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            t: 2,
            cells: 40_000,
            fine_cells: 80_000,
            samples: 0,
            boundary_samples: 0,
            fine_angles: 0,
            policy: SamplePolicy::Fixed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub preset: String,
    pub schedule: Vec<usize>,
    pub seed: u64,
    pub quadrature: QuadratureSpec,
    pub search: SearchConfig,
    pub algorithm: Algorithm,
    pub loss: Loss,
    pub full_scale: bool,
}

impl ExperimentConfig {
    /// Desk-scale defaults of a preset.
    pub fn preset(name: &str) -> Result<Self> {
        let doubling = |lo: usize, hi: usize| -> Vec<usize> {
            std::iter::successors(Some(lo), |n| Some(n * 2)).take_while(|n| *n <= hi).collect()
        };
        let q = QuadratureSpec::default;
        let q2d = |cells| QuadratureSpec { cells, fine_cells: 2 * cells, ..q() };
        let mut c = ExperimentConfig {
            preset: name.to_string(),
            schedule: doubling(16, 256),
            seed: 0,
            quadrature: q(),
            search: SearchConfig::default(),
            algorithm: Algorithm::oga(),
            loss: Loss::Energy,
            full_scale: false,
        };
        match name {
            "ex1-neumann" | "ex2-peaks" => {}
            "ex1-dirichlet" => c.loss = Loss::Penalized { delta_coef: 0.1 },
            "ex1-pinn" => {
                c.schedule = doubling(16, 128);
                c.loss = Loss::Pinn;
                c.quadrature.samples = 10_000;
            }
            "ex3-2d" => {
                c.schedule = doubling(16, 128);
                c.quadrature = q2d(100);
            }
            "ex3-2d-pinn" => {
                c.schedule = doubling(16, 128);
                c.loss = Loss::Pinn;
                c.quadrature = QuadratureSpec { samples: 20_000, boundary_samples: 2000, ..q2d(100) };
            }
            "ex4-biharmonic" => {
                c.schedule = doubling(16, 64);
                c.quadrature = q2d(100);
            }
            "ex5-highdim" => {
                c.schedule = doubling(16, 64);
                c.quadrature = QuadratureSpec { samples: 1_000_000, ..q() };
            }
            "ex6-poisson-boltzmann" => {
                c.schedule = doubling(16, 512);
                c.algorithm = Algorithm::Rga { m: 20.0 };
                c.quadrature = QuadratureSpec {
                    samples: 10_000,
                    fine_cells: 100,
                    fine_angles: 512,
                    policy: SamplePolicy::NSquared { divisor: 10.0, floor: 10_000 },
                    ..q()
                };
            }
            other => return Err(Error::UnknownPreset(other.to_string())),
        }
        Ok(c)
    }

    /// Full-size schedules and quadrature.
    pub fn full_scale(name: &str) -> Result<Self> {
        let mut c = Self::preset(name)?;
        c.full_scale = true;
        let doubling = |hi: usize| -> Vec<usize> {
            std::iter::successors(Some(16usize), |n| Some(n * 2)).take_while(|n| *n <= hi).collect()
        };
        match name {
            "ex1-neumann" | "ex1-pinn" | "ex6-poisson-boltzmann" => c.schedule = doubling(2048),
            "ex1-dirichlet" | "ex2-peaks" => c.schedule = doubling(512),
            "ex3-2d" => {
                c.schedule = doubling(256);
                c.schedule.push(356);
            }
            "ex3-2d-pinn" => c.schedule = doubling(2048),
            "ex4-biharmonic" | "ex5-highdim" => c.schedule = doubling(256),
            _ => {}
        }
        if matches!(name, "ex3-2d" | "ex3-2d-pinn" | "ex4-biharmonic") {
            c.quadrature.cells = 400;
            c.quadrature.fine_cells = 800;
        }
        if name == "ex5-highdim" {
            c.quadrature.samples = 100_000_000;
        }
        Ok(c)
    }

    /// Applies a partial JSON document on top of `self`.
    pub fn merge_json(&self, overrides: &Value) -> Result<Self> {
        let mut base = serde_json::to_value(self).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        merge(&mut base, overrides);
        let merged: ExperimentConfig =
            serde_json::from_value(base).map_err(|e| Error::InvalidArgument(format!("config: {e}")))?;
        Ok(merged)
    }

    /// Preset defaults (desk or full scale per the file's `full_scale`)
    /// overridden by a JSON file.
    pub fn from_json_file(path: &Path, preset: Option<&str>) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let v: Value = serde_json::from_str(&text).map_err(|e| Error::InvalidArgument(format!("config: {e}")))?;
        let name = preset
            .map(str::to_string)
            .or_else(|| v.get("preset").and_then(Value::as_str).map(str::to_string))
            .ok_or_else(|| Error::InvalidArgument("config names no preset".into()))?;
        let full = v.get("full_scale").and_then(Value::as_bool).unwrap_or(false);
        let base = if full { Self::full_scale(&name)? } else { Self::preset(&name)? };
        let mut c = base.merge_json(&v)?;
        c.preset = name;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !PRESETS.contains(&self.preset.as_str()) {
            return Err(Error::UnknownPreset(self.preset.clone()));
        }
        if self.schedule.is_empty() || self.schedule[0] == 0 || self.schedule.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("neuron schedule must be positive and strictly increasing".into()));
        }
        self.search.validate()?;
        match &self.algorithm {
            Algorithm::Oga { eps_gram, stop_rel } => {
                OgaConfig { iterations: 1, eps_gram: *eps_gram, stop_rel: *stop_rel }.validate()?
            }
            Algorithm::Rga { m } => RgaConfig { m: *m, iterations: 1 }.validate()?,
        }
        let expected = match self.preset.as_str() {
            "ex1-dirichlet" => "penalized",
            "ex1-pinn" | "ex3-2d-pinn" => "pinn",
            _ => "energy",
        };
        let actual = match &self.loss {
            Loss::Energy => "energy",
            Loss::Penalized { delta_coef } => {
                if !(*delta_coef > 0.0 && delta_coef.is_finite()) {
                    return Err(Error::InvalidArgument("delta_coef must be positive".into()));
                }
                "penalized"
            }
            Loss::Pinn => "pinn",
        };
        if actual != expected {
            return Err(Error::InvalidArgument(format!(
                "preset {} uses the {expected} loss, not {actual}",
                self.preset
            )));
        }
        if self.preset == "ex6-poisson-boltzmann" && matches!(self.algorithm, Algorithm::Oga { .. }) {
            return Err(Error::InvalidArgument("OGA needs a quadratic objective; use RGA for ex6".into()));
        }
        let q = &self.quadrature;
        if q.t == 0 || q.cells == 0 || q.fine_cells == 0 {
            return Err(Error::InvalidArgument("quadrature t and cell counts must be positive".into()));
        }
        Ok(())
    }
}

fn merge(base: &mut Value, patch: &Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                match b.get_mut(k) {
                    Some(slot) if slot.is_object() && v.is_object() && !is_tagged(v) => merge(slot, v),
                    _ => {
                        b.insert(k.clone(), v.clone());
                    }
                }
            }
        }
        (b, p) => *b = p.clone(),
    }
}

/// Tagged enums are replaced wholesale.
fn is_tagged(v: &Value) -> bool {
    v.get("kind").is_some()
}

/// Output of [`run`].
#[derive(Clone, Debug)]
pub struct ExperimentReport {
    pub report: ConvergenceReport,
    /// Sorted breakpoints per scheduled `n` (1-D presets only).
    pub breakpoints: Vec<(usize, Vec<f64>)>,
    /// Quadrature noise floor in the energy norm (ex5 only).
    pub noise_floor: Option<f64>,
}

impl ExperimentReport {
    pub fn to_text(&self) -> String {
        self.report.to_text()
    }

    pub fn to_csv(&self) -> String {
        self.report.to_csv()
    }

    pub fn breakpoints_csv(&self) -> Option<String> {
        if self.breakpoints.is_empty() {
            return None;
        }
        let mut s = String::from("n,breakpoint\n");
        for (n, bps) in &self.breakpoints {
            for b in bps {
                s.push_str(&format!("{n},{}\n", crate::metrics::format_sci(*b)));
            }
        }
        Some(s)
    }

    /// Writes `<name>.csv`, `<name>.txt` and, if present, `<name>-breakpoints.csv`.
    pub fn write(&self, dir: &Path, name: &str) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut out = Vec::new();
        let mut put = |file: String, body: String| -> Result<()> {
            let p = dir.join(file);
            fs::write(&p, body)?;
            out.push(p);
            Ok(())
        };
        put(format!("{name}.csv"), self.to_csv())?;
        put(format!("{name}.txt"), self.to_text())?;
        if let Some(b) = self.breakpoints_csv() {
            put(format!("{name}-breakpoints.csv"), b)?;
        }
        Ok(out)
    }
}

type Row = Vec<Option<f64>>;

enum Target<'a> {
    Quadratic(&'a QuadraticObjective),
    General(&'a dyn Objective),
}

/// Runs one greedy trajectory to `max(ns)` and evaluates `row` at every `n` in `ns`.
fn trajectory<F>(
    config: &ExperimentConfig,
    target: Target,
    dict: &DictionarySpec,
    ns: &[usize],
    report: &mut ConvergenceReport,
    mut row: F,
) -> Result<Vec<(usize, Row)>>
where
    F: FnMut(usize, &Expansion, f64) -> Result<Row>,
{
    let iterations = *ns.iter().max().unwrap_or(&0);
    let mut searcher = Searcher::new(dict.clone(), config.search.clone())?;
    let mut rows = Vec::new();
    let started = std::time::Instant::now();
    let mut observer = |s: &Snapshot| -> Result<()> {
        if ns.contains(&s.n) {
            info!("{}: n = {} objective {:.6e} ({:.1?})", config.preset, s.n, s.objective, started.elapsed());
            rows.push((s.n, row(s.n, s.expansion, s.objective)?));
        }
        Ok(())
    };
    let run: GreedyRun = match (&config.algorithm, target) {
        (Algorithm::Oga { eps_gram, stop_rel }, Target::Quadratic(obj)) => {
            let c = OgaConfig { iterations, eps_gram: *eps_gram, stop_rel: *stop_rel };
            oga(obj, &mut searcher, &c, &mut observer)?
        }
        (Algorithm::Rga { m }, Target::Quadratic(obj)) => {
            rga(obj, &mut searcher, &RgaConfig { m: *m, iterations }, &mut observer)?
        }
        (Algorithm::Rga { m }, Target::General(obj)) => {
            rga(obj, &mut searcher, &RgaConfig { m: *m, iterations }, &mut observer)?
        }
        (Algorithm::Oga { .. }, Target::General(_)) => {
            return Err(Error::InvalidArgument("OGA needs a quadratic objective".into()))
        }
    };
    let fallbacks = run.history.iter().filter(|r| r.refine_fallback).count();
    if fallbacks > 0 {
        report.add_metadata(format!("refine fallbacks (n <= {iterations})"), fallbacks.to_string());
    }
    if run.stop != StopReason::Completed {
        let at = run.iterations();
        report.add_metadata(format!("stop (n_max = {iterations})"), format!("{:?} after {at} iterations", run.stop));
        let value = run.history.last().map(|r| r.objective).unwrap_or(f64::NAN);
        for &n in ns.iter().filter(|n| **n > at) {
            rows.push((n, row(n, &run.expansion, value)?));
        }
    }
    Ok(rows)
}

fn relu_dict(k: u32, dim: usize, domain: &Domain) -> DictionarySpec {
    DictionarySpec::relu(k, dim, domain.radius())
}

fn interval() -> BoxDomain {
    BoxDomain { lo: vec![-1.0], hi: vec![1.0] }
}

/// Runs a preset and returns its convergence table.
pub fn run(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let name = config.preset.as_str();
    let q = &config.quadrature;
    let mut report = ConvergenceReport::new(name.to_string(), Vec::new());
    report.add_metadata("preset", name);
    report.add_metadata("seed", config.seed.to_string());
    report.add_metadata("algorithm", format!("{:?}", config.algorithm));
    let mut breakpoints = Vec::new();
    let mut noise_floor = None;
    let rows = match name {
        "ex1-neumann" | "ex1-dirichlet" | "ex2-peaks" => {
            let m = match name {
                "ex1-neumann" => solutions::cosine_1d(std::f64::consts::PI),
                "ex1-dirichlet" => solutions::cosine_1d(std::f64::consts::FRAC_PI_2),
                _ => solutions::peaks_1d(),
            };
            let dom = interval();
            let rule = gauss_grid(&dom, &[q.cells], q.t)?;
            let fine = gauss_grid(&dom, &[q.fine_cells], q.t)?;
            let brule = boundary_rule(&dom, 1, q.t)?;
            report.add_metadata("quadrature", format!("Gauss t={} L={} (errors: L={})", q.t, q.cells, q.fine_cells));
            let dict = relu_dict(2, 1, &Domain::Box(dom.clone()));
            let want_bps = name == "ex2-peaks";
            let base = line_problem(&m, dom.clone(), BoundaryCondition::NaturalNeumann);
            let penalized = matches!(config.loss, Loss::Penalized { .. });
            report.columns =
                if penalized { vec!["l2".into(), "a_delta".into()] } else { vec!["l2".into(), "h1".into()] };
            if let Loss::Penalized { delta_coef } = config.loss {
                report.add_metadata("penalty", format!("delta = {delta_coef} * n^-2"));
                let mut rows = Vec::new();
                for &n in &config.schedule {
                    let mut p = base.clone();
                    p.boundary = BoundaryCondition::DirichletPenalty { delta: delta_coef / (n * n) as f64 };
                    let obj = assemble_penalized(&p, &rule, &brule)?;
                    rows.extend(trajectory(config, Target::Quadratic(&obj), &dict, &[n], &mut report, |_, u, _| {
                        let e = error_norms(u, &m.exact, &fine, 1, Some(&p), Some(&brule))?;
                        Ok(vec![Some(e.l2), e.a_delta])
                    })?);
                }
                rows
            } else {
                let obj = assemble_energy(&base, &rule)?;
                trajectory(config, Target::Quadratic(&obj), &dict, &config.schedule, &mut report, |n, u, _| {
                    if want_bps {
                        breakpoints.push((n, export_breakpoints(u, -1.0, 1.0)?));
                    }
                    let e = error_norms(u, &m.exact, &fine, 1, None, None)?;
                    Ok(vec![Some(e.l2), e.h(1)])
                })?
            }
        }
        "ex1-pinn" | "ex3-2d-pinn" => run_pinn(config, &mut report)?,
        "ex3-2d" | "ex4-biharmonic" => {
            let (m, dom, k, order) = if name == "ex3-2d" {
                (solutions::cosine_2d(), BoxDomain::cube(2, 0.0, 1.0)?, 2, 1)
            } else {
                (solutions::bump_2d(), BoxDomain::cube(2, -1.0, 1.0)?, 3, 2)
            };
            let rule = gauss_grid(&dom, &[q.cells, q.cells], q.t)?;
            let fine = gauss_grid(&dom, &[q.fine_cells, q.fine_cells], q.t)?;
            report.add_metadata(
                "quadrature",
                format!("Gauss t={} {}x{} (errors: {}x{})", q.t, q.cells, q.cells, q.fine_cells, q.fine_cells),
            );
            let top: Vec<(MultiIndex, Field)> = if order == 1 {
                (0..2).map(|i| (MultiIndex::axis(2, i, 1), Field::Const(1.0))).collect()
            } else {
                MultiIndex::all_of_order(2, 2).into_iter().map(|a| (a.clone(), Field::Const(a.multinomial()))).collect()
            };
            let p = EllipticProblem {
                order,
                top,
                zero: Field::Const(1.0),
                source: m.source.clone(),
                domain: Domain::Box(dom.clone()),
                boundary: BoundaryCondition::NaturalNeumann,
            };
            let obj = assemble_energy(&p, &rule)?;
            let dict = relu_dict(k, 2, &p.domain);
            report.columns = if order == 1 { vec!["l2".into(), "h1".into()] } else { vec!["l2".into(), "a".into()] };
            trajectory(config, Target::Quadratic(&obj), &dict, &config.schedule, &mut report, |_, u, _| {
                let e = error_norms(u, &m.exact, &fine, order, Some(&p), None)?;
                Ok(vec![Some(e.l2), if order == 1 { e.h(1) } else { e.energy }])
            })?
        }
        "ex5-highdim" => {
            let (rows, floor) = run_highdim(config, &mut report)?;
            noise_floor = Some(floor);
            rows
        }
        "ex6-poisson-boltzmann" => run_poisson_boltzmann(config, &mut report)?,
        other => return Err(Error::UnknownPreset(other.to_string())),
    };
    let mut rows = rows;
    rows.sort_by_key(|r| r.0);
    for (n, r) in rows {
        report.push_row(n, r)?;
    }
    breakpoints.sort_by_key(|b| b.0);
    Ok(ExperimentReport { report, breakpoints, noise_floor })
}

fn line_problem(m: &Manufactured, dom: BoxDomain, boundary: BoundaryCondition) -> EllipticProblem {
    EllipticProblem {
        order: 1,
        top: vec![(MultiIndex::axis(1, 0, 1), Field::Const(1.0))],
        zero: Field::Const(1.0),
        source: m.source.clone(),
        domain: Domain::Box(dom),
        boundary,
    }
}

/// `−Δu + u` as PINN operator terms.
fn shifted_laplacian(d: usize) -> Vec<(MultiIndex, Field)> {
    let mut op: Vec<(MultiIndex, Field)> = (0..d).map(|i| (MultiIndex::axis(d, i, 2), Field::Const(-1.0))).collect();
    op.push((MultiIndex::zero(d), Field::Const(1.0)));
    op
}

fn run_pinn(config: &ExperimentConfig, report: &mut ConvergenceReport) -> Result<Vec<(usize, Row)>> {
    let q = &config.quadrature;
    let one_d = config.preset == "ex1-pinn";
    let (m, dom, scaling) = if one_d {
        (solutions::cosine_1d(std::f64::consts::PI), interval(), BoundaryScaling::Sum)
    } else {
        (solutions::cosine_2d(), BoxDomain::cube(2, 0.0, 1.0)?, BoundaryScaling::Mean)
    };
    let d = dom.dim();
    let interior = monte_carlo(&SampleRegion::Box(dom.clone()), q.samples, config.seed)?;
    let brule = boundary_monte_carlo(&dom, q.boundary_samples.max(1), config.seed.wrapping_add(1))?;
    let fine_cells = if one_d { q.fine_cells } else { q.fine_cells.max(2 * q.cells) };
    let fine = gauss_grid(&dom, &vec![fine_cells; d], q.t)?;
    report.add_metadata(
        "quadrature",
        format!(
            "uniform collocation N_f={} N_bc={} ({:?}); errors: Gauss t={} cells={}",
            q.samples,
            brule.len(),
            scaling,
            q.t,
            fine_cells
        ),
    );
    let p = PinnProblem {
        operator: shifted_laplacian(d),
        source: m.source.clone(),
        boundary_traces: vec![1],
        boundary_scaling: scaling,
        domain: Domain::Box(dom.clone()),
    };
    let obj = assemble_pinn(&p, &interior, Some(&brule))?;
    let dict = relu_dict(3, d, &p.domain);
    report.columns = vec!["pinn_loss".into(), "l2".into(), "h1".into()];
    trajectory(config, Target::Quadratic(&obj), &dict, &config.schedule, report, |_, u, value| {
        let e = error_norms(u, &m.exact, &fine, 1, None, None)?;
        Ok(vec![Some(value), Some(e.l2), e.h(1)])
    })
}

fn run_highdim(config: &ExperimentConfig, report: &mut ConvergenceReport) -> Result<(Vec<(usize, Row)>, f64)> {
    const DIM: usize = 10;
    let q = &config.quadrature;
    let m = solutions::cosine_sum(DIM);
    let dom = BoxDomain::cube(DIM, 0.0, 1.0)?;
    let rule = halton_with_offset(&dom, q.samples, 0)?;
    let fine = halton_with_offset(&dom, q.samples, q.samples as u64)?;
    let p = EllipticProblem {
        order: 1,
        top: (0..DIM).map(|i| (MultiIndex::axis(DIM, i, 1), Field::from_fn(solutions::highdim_coefficient))).collect(),
        zero: Field::Const(1.0),
        source: m.source.clone(),
        domain: Domain::Box(dom),
        boundary: BoundaryCondition::NaturalNeumann,
    };
    let obj = assemble_energy(&p, &rule)?;
    let dict = DictionarySpec {
        activation: Activation::ReluPower(2),
        dim: DIM,
        params: Parameterization::Axes { bias: BiasRange::new(-2.0, 2.0)? },
        radius: p.domain.radius(),
    };
    let floor = noise_floor(&obj, &m.exact, &mut Searcher::new(dict.clone(), config.search.clone())?)?;
    report.add_metadata("quadrature", format!("Halton N={} (errors: next {} Halton points)", q.samples, q.samples));
    report.add_metadata("noise floor", crate::metrics::format_sci(floor));
    report.columns = vec!["l2".into(), "h1".into()];
    let rows = trajectory(config, Target::Quadratic(&obj), &dict, &config.schedule, report, |_, u, _| {
        let e = error_norms(u, &m.exact, &fine, 1, None, None)?;
        Ok(vec![Some(e.l2), e.h(1)])
    })?;
    Ok((rows, floor))
}

/// Quadrature noise floor in the discrete energy norm: `|ℓ_N(g)| / ‖g‖_{a,N}`
/// for the dictionary element `g` selected against the residual functional
/// `ℓ_N(v) = a_N(u, v) − f_N(v)` of the exact solution `u`. The continuous
/// residual vanishes, so `ℓ_N` is pure quadrature error.
pub fn noise_floor(obj: &QuadraticObjective, exact: &dyn ExactSolution, selector: &mut impl Selector) -> Result<f64> {
    let ju = sample_embedded(obj.embedding(), exact)?;
    let f = obj.gradient_functional(&ju)?;
    let Some(c) = selector.select(&f)? else { return Ok(0.0) };
    let col = obj.embed(&c.neuron)?;
    let norm = col.weighted_dot(&col, obj.weights()).sqrt();
    Ok(if norm > 0.0 { c.pairing.abs() / norm } else { 0.0 })
}

fn run_poisson_boltzmann(config: &ExperimentConfig, report: &mut ConvergenceReport) -> Result<Vec<(usize, Row)>> {
    const KAPPA: f64 = 1.0;
    const RADIUS: f64 = 2.0;
    let q = &config.quadrature;
    let m = solutions::radial_cosine(KAPPA);
    let domain = Domain::Disk { radius: RADIUS };
    let problem = NonlinearEnergyProblem { kappa: KAPPA, source: m.source.clone(), domain: domain.clone() };
    let fine_rule = disk_polar_gauss(RADIUS, q.fine_cells, q.t, q.fine_angles.max(1))?;
    let fine = assemble_nonlinear(&problem, &fine_rule)?;
    let r_exact = fine.value_embedded(&sample_embedded(fine.embedding(), &m.exact)?)?;
    let r_zero = fine.value(&Expansion::new())?;
    report.add_metadata(
        "quadrature",
        format!(
            "Monte-Carlo N = {:?} (base {}); gap on polar Gauss {}x{} t={}",
            q.policy, q.samples, q.fine_cells, q.fine_angles, q.t
        ),
    );
    let dict = DictionarySpec {
        activation: Activation::Sigmoid,
        dim: 2,
        params: Parameterization::Box { lo: -20.0, hi: 20.0 },
        radius: RADIUS,
    };
    report.columns = vec!["gap".into()];
    // Rows sharing a sample count share one trajectory.
    let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
    for &n in &config.schedule {
        let count = q.policy.count(n, q.samples);
        match groups.iter_mut().find(|g| g.0 == count) {
            Some(g) => g.1.push(n),
            None => groups.push((count, vec![n])),
        }
    }
    let mut rows = Vec::new();
    for (count, ns) in groups {
        report.add_metadata(format!("N for n in {ns:?}"), count.to_string());
        let rule = monte_carlo(&SampleRegion::Disk { radius: RADIUS }, count, config.seed)?;
        let obj = assemble_nonlinear(&problem, &rule)?;
        rows.extend(trajectory(config, Target::General(&obj), &dict, &ns, report, |_, u, _| {
            Ok(vec![Some(relative_gap_values(fine.value(u)?, r_exact, r_zero)?)])
        })?);
    }
    Ok(rows)
}
