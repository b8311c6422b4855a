//! Interior and boundary quadrature rules.
//!
//! Constructors: composite tensor-product Gauss–Legendre grids on boxes,
//! Halton quasi-Monte-Carlo points, seeded Monte-Carlo samples on boxes and
//! disks, a polar Gauss rule on the disk, and boundary rules on box
//! boundaries with outward normals attached.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Flat row-major storage of `len` points in `R^dim`.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
}

impl PointSet {
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("points must have dimension >= 1".into()));
        }
        if coords.len() % dim != 0 {
            return Err(Error::InvalidArgument(format!(
                "{} coordinates do not split into points of dimension {dim}",
                coords.len()
            )));
        }
        Ok(PointSet { dim, coords })
    }

    pub fn from_points(dim: usize, points: &[Vec<f64>]) -> Result<Self> {
        let mut coords = Vec::with_capacity(points.len() * dim);
        for p in points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: p.len() });
            }
            coords.extend_from_slice(p);
        }
        PointSet::new(dim, coords)
    }

    pub fn empty(dim: usize) -> Self {
        PointSet { dim, coords: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> std::slice::ChunksExact<'_, f64> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// `ω·x_i` for every point.
    pub fn project(&self, omega: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend(self.iter().map(|x| x.iter().zip(omega).map(|(a, b)| a * b).sum::<f64>()));
    }
}

/// Axis-aligned box `Π [lo_i, hi_i]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxDomain {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoxDomain {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.is_empty() || lo.len() != hi.len() {
            return Err(Error::InvalidArgument("box bounds must have equal, nonzero length".into()));
        }
        for (a, b) in lo.iter().zip(&hi) {
            if !(a.is_finite() && b.is_finite()) {
                return Err(Error::InvalidArgument("box bounds must be finite".into()));
            }
            if a >= b {
                return Err(Error::InvalidArgument(format!("empty box side [{a}, {b}]")));
            }
        }
        Ok(BoxDomain { lo, hi })
    }

    /// `[lo, hi]^dim`.
    pub fn cube(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        BoxDomain::new(vec![lo; dim], vec![hi; dim])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(a, b)| b - a).product()
    }

    /// Largest Euclidean norm over the box corners.
    pub fn radius(&self) -> f64 {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| a.abs().max(b.abs()).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter().zip(self.lo.iter().zip(&self.hi)).all(|(v, (a, b))| *a <= *v && *v <= *b)
    }

    /// Total measure of the boundary (sum of face measures; 2 for an interval).
    pub fn boundary_measure(&self) -> f64 {
        let d = self.dim();
        if d == 1 {
            return 2.0;
        }
        let vol = self.volume();
        (0..d).map(|i| 2.0 * vol / (self.hi[i] - self.lo[i])).sum()
    }
}

/// Descriptor of the region a rule integrates over.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Domain {
    Box(BoxDomain),
    /// Disk centered at the origin.
    Disk { radius: f64 },
    BoxBoundary(BoxDomain),
}

impl Domain {
    pub fn dim(&self) -> usize {
        match self {
            Domain::Box(b) | Domain::BoxBoundary(b) => b.dim(),
            Domain::Disk { .. } => 2,
        }
    }

    /// Lebesgue measure (surface measure for boundaries).
    pub fn measure(&self) -> f64 {
        match self {
            Domain::Box(b) => b.volume(),
            Domain::Disk { radius } => PI * radius * radius,
            Domain::BoxBoundary(b) => b.boundary_measure(),
        }
    }

    /// Largest distance from the origin to a point of the domain.
    pub fn radius(&self) -> f64 {
        match self {
            Domain::Box(b) | Domain::BoxBoundary(b) => b.radius(),
            Domain::Disk { radius } => *radius,
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Domain::Box(b) | Domain::BoxBoundary(b) => b.contains(x),
            Domain::Disk { radius } => x.iter().map(|v| v * v).sum::<f64>() <= radius * radius * (1.0 + 1e-14),
        }
    }
}

/// Points with positive weights approximating `∫_Ω f dx ≈ Σ w_i f(x_i)`.
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    points: Arc<PointSet>,
    weights: Vec<f64>,
    domain: Domain,
}

impl QuadratureRule {
    pub fn new(points: PointSet, weights: Vec<f64>, domain: Domain) -> Result<Self> {
        check_weights(&points, &weights)?;
        Ok(QuadratureRule { points: Arc::new(points), weights, domain })
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn shared_points(&self) -> Arc<PointSet> {
        Arc::clone(&self.points)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points.dim()
    }

    pub fn weight_sum(&self) -> f64 {
        neumaier_sum(self.weights.iter().copied())
    }

    /// `Σ w_i f(x_i)`; a non-finite `f(x_i)` is reported with its index.
    pub fn integrate<F: Fn(&[f64]) -> f64>(&self, f: F) -> Result<f64> {
        integrate_points(&self.points, &self.weights, f)
    }
}

/// Quadrature over `∂Ω` carrying the outward unit normal at each point.
#[derive(Clone, Debug)]
pub struct BoundaryRule {
    points: Arc<PointSet>,
    weights: Vec<f64>,
    normals: PointSet,
    domain: Domain,
}

impl BoundaryRule {
    pub fn new(points: PointSet, weights: Vec<f64>, normals: PointSet, domain: Domain) -> Result<Self> {
        check_weights(&points, &weights)?;
        if normals.len() != points.len() || normals.dim() != points.dim() {
            return Err(Error::InvalidArgument("one normal per boundary point required".into()));
        }
        for (i, n) in normals.iter().enumerate() {
            let len = n.iter().map(|v| v * v).sum::<f64>().sqrt();
            if (len - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidArgument(format!("normal {i} is not unit length")));
            }
        }
        Ok(BoundaryRule { points: Arc::new(points), weights, normals, domain })
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn shared_points(&self) -> Arc<PointSet> {
        Arc::clone(&self.points)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn normals(&self) -> &PointSet {
        &self.normals
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weight_sum(&self) -> f64 {
        neumaier_sum(self.weights.iter().copied())
    }

    pub fn integrate<F: Fn(&[f64]) -> f64>(&self, f: F) -> Result<f64> {
        integrate_points(&self.points, &self.weights, f)
    }
}

fn check_weights(points: &PointSet, weights: &[f64]) -> Result<()> {
    if points.len() != weights.len() {
        return Err(Error::InvalidArgument(format!(
            "{} points but {} weights",
            points.len(),
            weights.len()
        )));
    }
    if let Some(i) = weights.iter().position(|w| !(*w > 0.0 && w.is_finite())) {
        return Err(Error::InvalidArgument(format!("weight {i} is not positive")));
    }
    Ok(())
}

fn integrate_points<F: Fn(&[f64]) -> f64>(points: &PointSet, weights: &[f64], f: F) -> Result<f64> {
    let mut acc = NeumaierSum::default();
    for (i, (x, w)) in points.iter().zip(weights).enumerate() {
        let v = f(x);
        if !v.is_finite() {
            return Err(Error::Numeric { context: format!("integrand value {v}"), index: i });
        }
        acc.add(w * v);
    }
    Ok(acc.total())
}

/// Compensated (Neumaier) summation accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

pub fn neumaier_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = NeumaierSum::default();
    for v in values {
        acc.add(v);
    }
    acc.total()
}

/// Gauss–Legendre nodes and weights with `n` points on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite Gauss rule on `[lo, hi]` with `cells` equal cells and `t + 1`
/// nodes per cell; nodes are returned in increasing order.
pub fn composite_gauss_1d(lo: f64, hi: f64, cells: usize, t: usize) -> (Vec<f64>, Vec<f64>) {
    let (xi, wi) = gauss_legendre(t + 1);
    let h = (hi - lo) / cells as f64;
    let mut nodes = Vec::with_capacity(cells * (t + 1));
    let mut weights = Vec::with_capacity(cells * (t + 1));
    for c in 0..cells {
        let mid = lo + (c as f64 + 0.5) * h;
        for (x, w) in xi.iter().zip(&wi) {
            nodes.push(mid + 0.5 * h * x);
            weights.push(0.5 * h * w);
        }
    }
    (nodes, weights)
}

/// Tensor-product composite Gauss–Legendre rule on a box.
///
/// Each cell carries `(t + 1)^d` nodes, so the rule integrates piecewise
/// polynomials of per-variable degree `2t + 1` on the cell partition exactly.
/// The last coordinate varies fastest.
pub fn gauss_grid(domain: &BoxDomain, cells_per_dim: &[usize], t: usize) -> Result<QuadratureRule> {
    let domain = BoxDomain::new(domain.lo.clone(), domain.hi.clone())?;
    let d = domain.dim();
    if cells_per_dim.len() != d {
        return Err(Error::DimensionMismatch { expected: d, found: cells_per_dim.len() });
    }
    if cells_per_dim.iter().any(|&c| c == 0) {
        return Err(Error::InvalidArgument("each dimension needs at least one cell".into()));
    }
    let axes: Vec<(Vec<f64>, Vec<f64>)> = (0..d)
        .map(|i| composite_gauss_1d(domain.lo[i], domain.hi[i], cells_per_dim[i], t))
        .collect();
    let total: usize = axes.iter().map(|(n, _)| n.len()).product();
    let mut coords = Vec::with_capacity(total * d);
    let mut weights = Vec::with_capacity(total);
    let mut idx = vec![0usize; d];
    for _ in 0..total {
        let mut w = 1.0;
        for (axis, &i) in idx.iter().enumerate() {
            coords.push(axes[axis].0[i]);
            w *= axes[axis].1[i];
        }
        weights.push(w);
        for axis in (0..d).rev() {
            idx[axis] += 1;
            if idx[axis] < axes[axis].0.len() {
                break;
            }
            idx[axis] = 0;
        }
    }
    QuadratureRule::new(PointSet::new(d, coords)?, weights, Domain::Box(domain))
}

/// The first `count` primes.
pub fn first_primes(count: usize) -> Vec<u64> {
    let mut primes = Vec::with_capacity(count);
    let mut candidate = 2u64;
    while primes.len() < count {
        if primes.iter().take_while(|&&p| p * p <= candidate).all(|&p| candidate % p != 0) {
            primes.push(candidate);
        }
        candidate += 1;
    }
    primes
}

/// Radical inverse of `index` in the given base.
pub fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut scale = inv;
    let mut out = 0.0;
    while index > 0 {
        out += (index % base) as f64 * scale;
        index /= base;
        scale *= inv;
    }
    out
}

/// Largest dimension accepted by [`halton`].
pub const HALTON_MAX_DIM: usize = 64;

/// Halton points with indices `offset + 1 ..= offset + count`, scaled to the
/// box, with equal weights `|Ω| / count`. Index 0 (the origin) is never used.
pub fn halton_with_offset(domain: &BoxDomain, count: usize, offset: u64) -> Result<QuadratureRule> {
    let d = domain.dim();
    if count == 0 {
        return Err(Error::InvalidArgument("Halton rule needs at least one point".into()));
    }
    if d > HALTON_MAX_DIM {
        return Err(Error::InvalidArgument(format!(
            "Halton sequence supports at most {HALTON_MAX_DIM} dimensions"
        )));
    }
    let primes = first_primes(d);
    let mut coords = Vec::with_capacity(count * d);
    for i in 0..count as u64 {
        let index = offset + i + 1;
        for (axis, &p) in primes.iter().enumerate() {
            let u = radical_inverse(index, p);
            coords.push(domain.lo[axis] + (domain.hi[axis] - domain.lo[axis]) * u);
        }
    }
    let w = domain.volume() / count as f64;
    QuadratureRule::new(PointSet::new(d, coords)?, vec![w; count], Domain::Box(domain.clone()))
}

/// First `count` Halton points (skipping index 0) on the box.
pub fn halton(domain: &BoxDomain, count: usize) -> Result<QuadratureRule> {
    halton_with_offset(domain, count, 0)
}

/// Sampling region for [`monte_carlo`].
#[derive(Clone, Debug, PartialEq)]
pub enum SampleRegion {
    Box(BoxDomain),
    Disk { radius: f64 },
}

/// I.i.d. uniform samples with weights `|Ω| / count`, reproducible from `seed`.
///
/// Disk samples use the polar map `(R √u, 2π v)`.
pub fn monte_carlo(region: &SampleRegion, count: usize, seed: u64) -> Result<QuadratureRule> {
    if count == 0 {
        return Err(Error::InvalidArgument("Monte-Carlo rule needs at least one sample".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match region {
        SampleRegion::Box(b) => {
            let d = b.dim();
            let mut coords = Vec::with_capacity(count * d);
            for _ in 0..count {
                for axis in 0..d {
                    let u: f64 = rng.random();
                    coords.push(b.lo[axis] + (b.hi[axis] - b.lo[axis]) * u);
                }
            }
            let w = b.volume() / count as f64;
            QuadratureRule::new(PointSet::new(d, coords)?, vec![w; count], Domain::Box(b.clone()))
        }
        SampleRegion::Disk { radius } => {
            if !(*radius > 0.0 && radius.is_finite()) {
                return Err(Error::InvalidArgument("disk radius must be positive".into()));
            }
            let mut coords = Vec::with_capacity(count * 2);
            for _ in 0..count {
                let u: f64 = rng.random();
                let v: f64 = rng.random();
                let r = radius * u.sqrt();
                let theta = 2.0 * PI * v;
                coords.push(r * theta.cos());
                coords.push(r * theta.sin());
            }
            let domain = Domain::Disk { radius: *radius };
            let w = domain.measure() / count as f64;
            QuadratureRule::new(PointSet::new(2, coords)?, vec![w; count], domain)
        }
    }
}

/// Polar Gauss rule on the disk of the given radius: composite Gauss in the
/// radius (with the `r dr` Jacobian folded into the weights) times an
/// equispaced angular rule, which is exact for trigonometric polynomials of
/// degree below `angles`.
pub fn disk_polar_gauss(radius: f64, radial_cells: usize, t: usize, angles: usize) -> Result<QuadratureRule> {
    if !(radius > 0.0 && radius.is_finite()) || radial_cells == 0 || angles == 0 {
        return Err(Error::InvalidArgument("invalid polar rule parameters".into()));
    }
    let (rs, rw) = composite_gauss_1d(0.0, radius, radial_cells, t);
    let dtheta = 2.0 * PI / angles as f64;
    let mut coords = Vec::with_capacity(rs.len() * angles * 2);
    let mut weights = Vec::with_capacity(rs.len() * angles);
    for (r, w) in rs.iter().zip(&rw) {
        for j in 0..angles {
            let theta = (j as f64 + 0.5) * dtheta;
            coords.push(r * theta.cos());
            coords.push(r * theta.sin());
            weights.push(w * r * dtheta);
        }
    }
    QuadratureRule::new(PointSet::new(2, coords)?, weights, Domain::Disk { radius })
}

/// Deterministic boundary rule on a box.
///
/// * 1-D: the two endpoints with unit weights and normals `∓1`.
/// * 2-D: a composite Gauss rule with `cells_per_edge` cells of `t + 1`
///   nodes on each edge. Corners are never nodes.
pub fn boundary_rule(domain: &BoxDomain, cells_per_edge: usize, t: usize) -> Result<BoundaryRule> {
    match domain.dim() {
        1 => endpoint_rule(domain),
        2 => {
            if cells_per_edge == 0 {
                return Err(Error::InvalidArgument("need at least one cell per edge".into()));
            }
            let mut pts = Vec::new();
            let mut weights = Vec::new();
            let mut normals = Vec::new();
            for axis in 0..2 {
                let other = 1 - axis;
                let (nodes, w) = composite_gauss_1d(domain.lo[other], domain.hi[other], cells_per_edge, t);
                for (side, fixed) in [(-1.0, domain.lo[axis]), (1.0, domain.hi[axis])] {
                    for (x, wx) in nodes.iter().zip(&w) {
                        let mut p = [0.0; 2];
                        p[axis] = fixed;
                        p[other] = *x;
                        let mut n = [0.0; 2];
                        n[axis] = side;
                        pts.extend_from_slice(&p);
                        normals.extend_from_slice(&n);
                        weights.push(*wx);
                    }
                }
            }
            BoundaryRule::new(
                PointSet::new(2, pts)?,
                weights,
                PointSet::new(2, normals)?,
                Domain::BoxBoundary(domain.clone()),
            )
        }
        d => Err(Error::UnsupportedDomain(format!(
            "deterministic boundary rule for a {d}-dimensional box; use boundary_monte_carlo"
        ))),
    }
}

fn endpoint_rule(domain: &BoxDomain) -> Result<BoundaryRule> {
    BoundaryRule::new(
        PointSet::new(1, vec![domain.lo[0], domain.hi[0]])?,
        vec![1.0, 1.0],
        PointSet::new(1, vec![-1.0, 1.0])?,
        Domain::BoxBoundary(domain.clone()),
    )
}

/// Uniform random samples on every face of a box (`per_face` each), with
/// weights `face measure / per_face`. Samples never land on lower-dimensional
/// edges. In 1-D the exact endpoint rule is returned.
pub fn boundary_monte_carlo(domain: &BoxDomain, per_face: usize, seed: u64) -> Result<BoundaryRule> {
    let d = domain.dim();
    if d == 1 {
        return endpoint_rule(domain);
    }
    if per_face == 0 {
        return Err(Error::InvalidArgument("need at least one sample per face".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vol = domain.volume();
    let mut pts = Vec::with_capacity(2 * d * per_face * d);
    let mut normals = Vec::with_capacity(2 * d * per_face * d);
    let mut weights = Vec::with_capacity(2 * d * per_face);
    for axis in 0..d {
        let face = vol / (domain.hi[axis] - domain.lo[axis]);
        for (side, fixed) in [(-1.0, domain.lo[axis]), (1.0, domain.hi[axis])] {
            for _ in 0..per_face {
                for k in 0..d {
                    if k == axis {
                        pts.push(fixed);
                        normals.push(side);
                    } else {
                        let mut u: f64 = rng.random();
                        while u == 0.0 {
                            u = rng.random();
                        }
                        pts.push(domain.lo[k] + (domain.hi[k] - domain.lo[k]) * u);
                        normals.push(0.0);
                    }
                }
                weights.push(face / per_face as f64);
            }
        }
    }
    BoundaryRule::new(
        PointSet::new(d, pts)?,
        weights,
        PointSet::new(d, normals)?,
        Domain::BoxBoundary(domain.clone()),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn interval(lo: f64, hi: f64) -> BoxDomain {
        BoxDomain::new(vec![lo], vec![hi]).unwrap()
    }

    #[test]
    fn gauss_legendre_integrates_monomials() {
        for n in 1..8 {
            let (x, w) = gauss_legendre(n);
            for p in 0..(2 * n) {
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(p as i32)).sum();
                let exact = if p % 2 == 1 { 0.0 } else { 2.0 / (p as f64 + 1.0) };
                assert!((q - exact).abs() < 1e-14, "n={n} p={p} q={q}");
            }
        }
    }

    #[test]
    fn gauss_grid_examples() {
        let rule = gauss_grid(&interval(-1.0, 1.0), &[2], 2).unwrap();
        assert_eq!(rule.len(), 6);
        assert!((rule.weight_sum() - 2.0).abs() < 1e-15);

        let cubic = gauss_grid(&interval(0.0, 1.0), &[1], 1).unwrap();
        let q = cubic.integrate(|x| x[0].powi(3)).unwrap();
        assert!((q - 0.25).abs() < 1e-16);

        let kink = rule.integrate(|x| x[0].max(0.0).powi(2)).unwrap();
        assert!((kink - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn gauss_grid_rejects_bad_boxes() {
        assert!(gauss_grid(&BoxDomain { lo: vec![1.0], hi: vec![1.0] }, &[2], 2).is_err());
        assert!(gauss_grid(&BoxDomain { lo: vec![0.0], hi: vec![f64::INFINITY] }, &[2], 2).is_err());
        assert!(gauss_grid(&interval(0.0, 1.0), &[0], 2).is_err());
    }

    #[test]
    fn integrate_examples() {
        let rule = gauss_grid(&interval(-1.0, 1.0), &[1000], 2).unwrap();
        assert!((rule.integrate(|_| 1.0).unwrap() - 2.0).abs() < 1e-13);
        let c2 = rule.integrate(|x| (PI * x[0]).cos().powi(2)).unwrap();
        assert!((c2 - 1.0).abs() < 1e-10);

        let empty = QuadratureRule::new(PointSet::empty(1), vec![], Domain::Box(interval(0.0, 1.0))).unwrap();
        assert_eq!(empty.integrate(|_| 1.0).unwrap(), 0.0);
    }

    #[test]
    fn integrate_reports_non_finite_point() {
        let rule = gauss_grid(&interval(0.0, 1.0), &[2], 0).unwrap();
        let err = rule.integrate(|x| if x[0] > 0.5 { f64::NAN } else { 1.0 }).unwrap_err();
        assert_eq!(err, Error::Numeric { context: "integrand value NaN".into(), index: 1 });
    }

    #[test]
    fn halton_first_points() {
        let unit = BoxDomain::cube(2, 0.0, 1.0).unwrap();
        let rule = halton(&unit, 3).unwrap();
        let expected = [[0.5, 1.0 / 3.0], [0.25, 2.0 / 3.0], [0.75, 1.0 / 9.0]];
        for (p, e) in rule.points().iter().zip(expected) {
            assert!((p[0] - e[0]).abs() < 1e-15 && (p[1] - e[1]).abs() < 1e-15);
        }
        let four = halton(&unit, 4).unwrap();
        assert!(four.weights().iter().all(|&w| w == 0.25));
        let one = halton(&interval(0.0, 1.0), 1).unwrap();
        assert_eq!(one.points().point(0), &[0.5]);
    }

    #[test]
    fn halton_integrates_product() {
        let unit = BoxDomain::cube(2, 0.0, 1.0).unwrap();
        let rule = halton(&unit, 100_000).unwrap();
        let q = rule.integrate(|x| x[0] * x[1]).unwrap();
        assert!((q - 0.25).abs() < 1e-3);
    }

    #[test]
    fn monte_carlo_is_reproducible_and_in_domain() {
        let disk = SampleRegion::Disk { radius: 2.0 };
        let a = monte_carlo(&disk, 500, 7).unwrap();
        let b = monte_carlo(&disk, 500, 7).unwrap();
        assert_eq!(a.points(), b.points());
        assert!(a.points().iter().all(|p| p[0] * p[0] + p[1] * p[1] <= 4.0));
        assert!((a.weight_sum() - 4.0 * PI).abs() < 1e-12);
        let c = monte_carlo(&disk, 500, 8).unwrap();
        assert_ne!(a.points(), c.points());
    }

    #[test]
    fn disk_polar_gauss_area_and_moments() {
        let rule = disk_polar_gauss(2.0, 8, 2, 32).unwrap();
        assert!((rule.weight_sum() - 4.0 * PI).abs() < 1e-12);
        // ∫ r² over the disk of radius 2 = 2π · 2⁴/4 = 8π.
        let q = rule.integrate(|x| x[0] * x[0] + x[1] * x[1]).unwrap();
        assert!((q - 8.0 * PI).abs() < 1e-11);
    }

    #[test]
    fn boundary_rule_examples() {
        let r1 = boundary_rule(&interval(-1.0, 1.0), 1, 2).unwrap();
        assert_eq!(r1.points().coords(), &[-1.0, 1.0]);
        assert_eq!(r1.weights(), &[1.0, 1.0]);
        assert_eq!(r1.normals().coords(), &[-1.0, 1.0]);

        let sq = BoxDomain::cube(2, 0.0, 1.0).unwrap();
        let r2 = boundary_rule(&sq, 4, 2).unwrap();
        assert!((r2.weight_sum() - 4.0).abs() < 1e-14);
        for (p, n) in r2.points().iter().zip(r2.normals().iter()) {
            if p[0] == 1.0 {
                assert_eq!(n, &[1.0, 0.0]);
            }
        }
        let cube = BoxDomain::cube(3, 0.0, 1.0).unwrap();
        assert!(matches!(boundary_rule(&cube, 2, 1), Err(Error::UnsupportedDomain(_))));
    }

    #[test]
    fn boundary_monte_carlo_covers_faces() {
        let sq = BoxDomain::cube(2, 0.0, 1.0).unwrap();
        let r = boundary_monte_carlo(&sq, 100, 3).unwrap();
        assert_eq!(r.len(), 400);
        assert!((r.weight_sum() - 4.0).abs() < 1e-12);
        for (p, n) in r.points().iter().zip(r.normals().iter()) {
            let on_face = (0..2).any(|k| n[k] != 0.0 && (p[k] == 0.0 || p[k] == 1.0));
            assert!(on_face);
        }
    }
}
