//! Error norms against analytic solutions and convergence tables.

use std::fmt::Write as _;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::dictionary::{Expansion, MultiIndex};
use crate::error::{Error, Result};
use crate::problem::{BoundaryCondition, Coefficient, Embedded, Embedding, EllipticProblem, Objective};
use crate::quadrature::{neumaier_sum, BoundaryRule, PointSet, QuadratureRule};

/// Analytic solution with hand-derived partial derivatives.
pub trait ExactSolution: Send + Sync {
    fn dim(&self) -> usize;

    /// Highest derivative order available.
    fn max_order(&self) -> usize;

    /// `∂^α u(x)` for `|α| <= max_order`.
    fn partial(&self, x: &[f64], alpha: &MultiIndex) -> f64;

    fn value(&self, x: &[f64]) -> f64 {
        self.partial(x, &MultiIndex::zero(self.dim()))
    }
}

/// [`ExactSolution`] backed by a closure `(x, α) ↦ ∂^α u(x)`.
#[derive(Clone)]
pub struct AnalyticSolution {
    dim: usize,
    max_order: usize,
    f: Arc<dyn Fn(&[f64], &MultiIndex) -> f64 + Send + Sync>,
}

impl AnalyticSolution {
    pub fn new<F>(dim: usize, max_order: usize, f: F) -> Self
    where
        F: Fn(&[f64], &MultiIndex) -> f64 + Send + Sync + 'static,
    {
        AnalyticSolution { dim, max_order, f: Arc::new(f) }
    }
}

impl std::fmt::Debug for AnalyticSolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "AnalyticSolution(dim={}, max_order={})", self.dim, self.max_order)
    }
}

impl ExactSolution for AnalyticSolution {
    fn dim(&self) -> usize {
        self.dim
    }

    fn max_order(&self) -> usize {
        self.max_order
    }

    fn partial(&self, x: &[f64], alpha: &MultiIndex) -> f64 {
        (self.f)(x, alpha)
    }
}

/// `∂^α u` at every point, one vector per entry of `alphas`.
pub fn eval_partials(u: &Expansion, points: &PointSet, alphas: &[MultiIndex]) -> Result<Vec<Vec<f64>>> {
    let d = points.dim();
    if let Some(ud) = u.dim() {
        if ud != d {
            return Err(Error::DimensionMismatch { expected: d, found: ud });
        }
    }
    let na = alphas.len();
    let orders = alphas.iter().map(|a| a.order()).max().unwrap_or(0) + 1;
    if orders > 16 {
        return Err(Error::InvalidArgument("derivative order above 15".into()));
    }
    // Per neuron: coefficient times ω^α.
    let scaled: Vec<Vec<f64>> =
        u.terms.iter().map(|(c, g)| alphas.iter().map(|a| c * a.monomial(&g.omega)).collect()).collect();
    let mut flat = vec![0.0; points.len() * na];
    const CHUNK: usize = 512;
    flat.par_chunks_mut(CHUNK * na.max(1)).enumerate().for_each(|(ci, out)| {
        let mut buf = [0.0; 16];
        let start = ci * CHUNK;
        for (k, row) in out.chunks_mut(na.max(1)).enumerate() {
            let x = points.point(start + k);
            for ((_, g), sc) in u.terms.iter().zip(&scaled) {
                g.activation.derivatives_into(g.preactivation(x), &mut buf[..orders]);
                for (a, alpha) in alphas.iter().enumerate() {
                    row[a] += sc[a] * buf[alpha.order()];
                }
            }
        }
    });
    let mut out = vec![Vec::with_capacity(points.len()); na];
    for row in flat.chunks(na.max(1)) {
        for (a, v) in row.iter().take(na).enumerate() {
            out[a].push(*v);
        }
    }
    Ok(out)
}

/// `∂^α (u_exact − u_n)` at every point.
fn error_partials(
    u: &Expansion,
    exact: &dyn ExactSolution,
    points: &PointSet,
    alphas: &[MultiIndex],
) -> Result<Vec<Vec<f64>>> {
    if exact.dim() != points.dim() {
        return Err(Error::DimensionMismatch { expected: points.dim(), found: exact.dim() });
    }
    if let Some(a) = alphas.iter().find(|a| a.order() > exact.max_order()) {
        return Err(Error::UnsupportedDerivative { requested: a.order(), supported: exact.max_order() });
    }
    let mut vals = eval_partials(u, points, alphas)?;
    for (a, alpha) in alphas.iter().enumerate() {
        for (p, v) in vals[a].iter_mut().enumerate() {
            *v = exact.partial(points.point(p), alpha) - *v;
            if !v.is_finite() {
                return Err(Error::Numeric { context: format!("error in ∂^{alpha}"), index: p });
            }
        }
    }
    Ok(vals)
}

fn weighted_sq(w: &[f64], coef: Option<&[f64]>, e: &[f64]) -> f64 {
    match coef {
        Some(c) => neumaier_sum(w.iter().zip(c).zip(e).map(|((w, c), e)| w * c * e * e)),
        None => neumaier_sum(w.iter().zip(e).map(|(w, e)| w * e * e)),
    }
}

/// Error norms of one iterate.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ErrorNorms {
    pub l2: f64,
    /// `|e|_{H^j}` for `j = 1..=m`.
    pub seminorms: Vec<f64>,
    /// Energy norm `√a(e, e)`, when a problem is given.
    pub energy: Option<f64>,
    /// `√a_δ(e, e)`, when a Dirichlet penalty and boundary rule are given.
    pub a_delta: Option<f64>,
}

impl ErrorNorms {
    /// Full `H^j` norm `(‖e‖² + Σ_{i≤j} |e|²_{H^i})^{1/2}`.
    pub fn h(&self, j: usize) -> Option<f64> {
        if j > self.seminorms.len() {
            return None;
        }
        Some((self.l2.powi(2) + self.seminorms[..j].iter().map(|s| s * s).sum::<f64>()).sqrt())
    }
}

/// L², `H^j` seminorms up to `max_order`, and optionally the energy and
/// `a,δ` norms of `u_exact − u`, all on `fine`.
pub fn error_norms(
    u: &Expansion,
    exact: &dyn ExactSolution,
    fine: &QuadratureRule,
    max_order: usize,
    problem: Option<&EllipticProblem>,
    boundary: Option<&BoundaryRule>,
) -> Result<ErrorNorms> {
    let d = fine.dim();
    let mut alphas = vec![MultiIndex::zero(d)];
    for j in 1..=max_order {
        alphas.extend(MultiIndex::all_of_order(d, j as u32));
    }
    if let Some(p) = problem {
        for (a, _) in &p.top {
            if !alphas.contains(a) {
                alphas.push(a.clone());
            }
        }
    }
    let pts = fine.points();
    let w = fine.weights();
    let e = error_partials(u, exact, pts, &alphas)?;
    let sq: Vec<f64> = e.iter().map(|v| weighted_sq(w, None, v)).collect();
    let l2 = sq[0].sqrt();
    let seminorms = (1..=max_order)
        .map(|j| alphas.iter().zip(&sq).filter(|(a, _)| a.order() == j).map(|(_, s)| s).sum::<f64>().sqrt())
        .collect();
    let mut norms = ErrorNorms { l2, seminorms, energy: None, a_delta: None };
    if let Some(p) = problem {
        let a0 = p.zero.sample(pts);
        let mut energy_sq = weighted_sq(w, Some(&a0), &e[0]);
        for (alpha, coef) in &p.top {
            let i = alphas.iter().position(|a| a == alpha).unwrap_or(0);
            energy_sq += weighted_sq(w, Some(&coef.sample(pts)), &e[i]);
        }
        norms.energy = Some(energy_sq.sqrt());
        if let (BoundaryCondition::DirichletPenalty { delta }, Some(br)) = (&p.boundary, boundary) {
            norms.a_delta = Some((energy_sq + boundary_penalty(u, exact, br, p.order)? / delta).sqrt());
        }
    }
    Ok(norms)
}

/// `Σ_{k<m} Σ_j w̃_j (∂_ν^k e(x̃_j))²` for `k <= 1`.
fn boundary_penalty(u: &Expansion, exact: &dyn ExactSolution, br: &BoundaryRule, order: usize) -> Result<f64> {
    let d = br.points().dim();
    let mut alphas = vec![MultiIndex::zero(d)];
    if order > 1 {
        alphas.extend((0..d).map(|i| MultiIndex::axis(d, i, 1)));
    }
    if order > 2 {
        return Err(Error::UnsupportedDerivative { requested: order - 1, supported: 1 });
    }
    let e = error_partials(u, exact, br.points(), &alphas)?;
    let w = br.weights();
    let mut total = weighted_sq(w, None, &e[0]);
    if order > 1 {
        let dn: Vec<f64> = (0..br.len())
            .map(|p| {
                let nrm = br.normals().point(p);
                (0..d).map(|i| nrm[i] * e[1 + i][p]).sum()
            })
            .collect();
        total += weighted_sq(w, None, &dn);
    }
    Ok(total)
}

/// `J(u_exact)` for an arbitrary embedding.
pub fn sample_embedded(embedding: &Embedding, exact: &dyn ExactSolution) -> Result<Embedded> {
    let mut blocks = Vec::with_capacity(embedding.blocks.len());
    for b in &embedding.blocks {
        if let Some(t) = b.terms.iter().find(|t| t.alpha.order() > exact.max_order()) {
            return Err(Error::UnsupportedDerivative { requested: t.alpha.order(), supported: exact.max_order() });
        }
        let v: Vec<f64> = (0..b.len())
            .map(|p| {
                let x = b.points.point(p);
                b.terms
                    .iter()
                    .map(|t| {
                        let c = match &t.coef {
                            Coefficient::Const(c) => *c,
                            Coefficient::PerPoint(v) => v[p],
                        };
                        c * exact.partial(x, &t.alpha)
                    })
                    .sum()
            })
            .collect();
        blocks.push(Some(v));
    }
    Ok(Embedded { blocks })
}

/// `(R(u_n) − R(u)) / (R(0) − R(u))` with `R` evaluated by `objective`
/// (typically assembled on a fine rule).
pub fn relative_gap<O: Objective + ?Sized>(objective: &O, u_n: &Expansion, exact: &dyn ExactSolution) -> Result<f64> {
    let r_exact = objective.value_embedded(&sample_embedded(objective.embedding(), exact)?)?;
    let r_zero = objective.value(&Expansion::new())?;
    relative_gap_values(objective.value(u_n)?, r_exact, r_zero)
}

pub fn relative_gap_values(r_n: f64, r_exact: f64, r_zero: f64) -> Result<f64> {
    let den = r_zero - r_exact;
    if !(den != 0.0 && den.is_finite()) {
        return Err(Error::InvalidArgument("R(0) = R(u): degenerate problem".into()));
    }
    Ok((r_n - r_exact) / den)
}

/// Sorted breakpoints `−b/ω` of 1-D neurons inside `[lo, hi]`.
pub fn export_breakpoints(u: &Expansion, lo: f64, hi: f64) -> Result<Vec<f64>> {
    if let Some(d) = u.dim() {
        if d != 1 {
            return Err(Error::UnsupportedDomain(format!("breakpoints need d = 1, got d = {d}")));
        }
    }
    let mut out: Vec<f64> =
        u.terms.iter().filter_map(|(_, g)| g.breakpoint_1d()).filter(|x| *x >= lo && *x <= hi).collect();
    out.sort_by(f64::total_cmp);
    Ok(out)
}

/// `log(e_prev / e_curr) / log(n_curr / n_prev)`; `None` unless both errors are positive.
pub fn order(n_prev: usize, e_prev: f64, n_curr: usize, e_curr: f64) -> Option<f64> {
    if !(e_prev > 0.0 && e_curr > 0.0 && n_curr > n_prev) {
        return None;
    }
    Some((e_prev / e_curr).ln() / (n_curr as f64 / n_prev as f64).ln())
}

/// Orders between consecutive rows; the first entry is `None`.
pub fn order_table(rows: &[(usize, f64)]) -> Vec<Option<f64>> {
    let mut out = vec![None; rows.len()];
    for i in 1..rows.len() {
        out[i] = order(rows[i - 1].0, rows[i - 1].1, rows[i].0, rows[i].1);
    }
    out
}

/// Negated least-squares slope of `log e` against `log n`.
pub fn fitted_order(rows: &[(usize, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> =
        rows.iter().filter(|(_, e)| *e > 0.0 && e.is_finite()).map(|(n, e)| ((*n as f64).ln(), e.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(-sxy / sxx)
}

/// C-style `%.6e`: `7.860000e-04`.
pub fn format_sci(v: f64) -> String {
    if !v.is_finite() {
        return format!("{v}");
    }
    let s = format!("{v:.6e}");
    let (mant, exp) = s.split_once('e').unwrap_or((&s, "0"));
    let exp: i32 = exp.parse().unwrap_or(0);
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mant}e{sign}{:02}", exp.abs())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportRow {
    pub n: usize,
    /// One entry per column; `None` if not computed.
    pub values: Vec<Option<f64>>,
}

/// Convergence table: error columns per `n` plus metadata.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<ReportRow>,
    pub metadata: Vec<(String, String)>,
}

impl ConvergenceReport {
    pub fn new(title: impl Into<String>, columns: Vec<String>) -> Self {
        ConvergenceReport { title: title.into(), columns, rows: Vec::new(), metadata: Vec::new() }
    }

    pub fn push_row(&mut self, n: usize, values: Vec<Option<f64>>) -> Result<()> {
        if values.len() != self.columns.len() {
            return Err(Error::DimensionMismatch { expected: self.columns.len(), found: values.len() });
        }
        if self.rows.last().is_some_and(|r| r.n >= n) {
            return Err(Error::InvalidArgument(format!("row n = {n} is not increasing")));
        }
        self.rows.push(ReportRow { n, values });
        Ok(())
    }

    pub fn add_metadata(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.metadata.push((key.into(), value.into()));
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// `(n, value)` pairs of one column, skipping absent entries.
    pub fn series(&self, name: &str) -> Vec<(usize, f64)> {
        let Some(c) = self.column_index(name) else { return Vec::new() };
        self.rows.iter().filter_map(|r| r.values[c].map(|v| (r.n, v))).collect()
    }

    /// Orders of one column aligned with the rows.
    pub fn orders(&self, c: usize) -> Vec<Option<f64>> {
        let mut out = vec![None; self.rows.len()];
        for i in 1..self.rows.len() {
            if let (Some(a), Some(b)) = (self.rows[i - 1].values[c], self.rows[i].values[c]) {
                out[i] = order(self.rows[i - 1].n, a, self.rows[i].n, b);
            }
        }
        out
    }

    pub fn fitted_order(&self, name: &str) -> Option<f64> {
        fitted_order(&self.series(name))
    }

    /// CSV: `n`, the error columns, then one `order_<col>` column per error column.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n");
        for c in &self.columns {
            let _ = write!(s, ",{c}");
        }
        for c in &self.columns {
            let _ = write!(s, ",order_{c}");
        }
        s.push('\n');
        let orders: Vec<Vec<Option<f64>>> = (0..self.columns.len()).map(|c| self.orders(c)).collect();
        for (i, r) in self.rows.iter().enumerate() {
            let _ = write!(s, "{}", r.n);
            for v in &r.values {
                let _ = write!(s, ",{}", v.map(format_sci).unwrap_or_default());
            }
            for o in &orders {
                let _ = write!(s, ",{}", o[i].map(format_sci).unwrap_or_default());
            }
            s.push('\n');
        }
        s
    }

    /// Aligned text table with an order column after every error column.
    pub fn to_text(&self) -> String {
        let mut header = vec!["n".to_string()];
        for c in &self.columns {
            header.push(c.clone());
            header.push("order".into());
        }
        let orders: Vec<Vec<Option<f64>>> = (0..self.columns.len()).map(|c| self.orders(c)).collect();
        let mut cells = vec![header];
        for (i, r) in self.rows.iter().enumerate() {
            let mut row = vec![r.n.to_string()];
            for (c, v) in r.values.iter().enumerate() {
                row.push(v.map(|x| format!("{x:.2e}")).unwrap_or_else(|| "-".into()));
                row.push(orders[c][i].map(|x| format!("{x:.2}")).unwrap_or_else(|| "-".into()));
            }
            cells.push(row);
        }
        let widths: Vec<usize> =
            (0..cells[0].len()).map(|j| cells.iter().map(|r| r[j].chars().count()).max().unwrap_or(0)).collect();
        let mut s = String::new();
        if !self.title.is_empty() {
            let _ = writeln!(s, "{}", self.title);
        }
        for row in &cells {
            let line: Vec<String> = row.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
            let _ = writeln!(s, "{}", line.join("  ").trim_end());
        }
        for (k, v) in &self.metadata {
            let _ = writeln!(s, "# {k}: {v}");
        }
        s
    }
}
