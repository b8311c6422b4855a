//! Linear evaluation maps `v ↦ J(v)` and the linear functionals they induce.
//!
//! An [`Embedding`] is a list of [`Block`]s. Each block owns one coordinate
//! per point of a shared point set; the coordinate value for `v` at point
//! `x_p` is `Σ_t coef_t(p) ∂^{α_t} v(x_p)`. Energy objectives use one block per
//! multi-index, PINN objectives put a whole differential operator into one
//! block, and boundary traces carry the normal components as coefficients.

use std::sync::Arc;

use crate::dictionary::{Activation, MultiIndex, RidgeNeuron};
use crate::error::{Error, Result};
use crate::quadrature::PointSet;

/// Coefficient of a term: constant or sampled per point.
#[derive(Clone, Debug, PartialEq)]
pub enum Coefficient {
    Const(f64),
    PerPoint(Arc<Vec<f64>>),
}

impl Coefficient {
    #[inline]
    pub fn at(&self, p: usize) -> f64 {
        match self {
            Coefficient::Const(c) => *c,
            Coefficient::PerPoint(v) => v[p],
        }
    }
}

/// `coef · ∂^α`.
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub alpha: MultiIndex,
    pub coef: Coefficient,
}

impl Term {
    pub fn new(alpha: MultiIndex, coef: Coefficient) -> Self {
        Term { alpha, coef }
    }

    pub fn unit(alpha: MultiIndex) -> Self {
        Term { alpha, coef: Coefficient::Const(1.0) }
    }
}

/// One group of coordinates: a linear differential expression sampled at
/// every point of `points`.
#[derive(Clone, Debug)]
pub struct Block {
    pub name: String,
    pub points: Arc<PointSet>,
    pub terms: Vec<Term>,
}

impl Block {
    pub fn new(name: impl Into<String>, points: Arc<PointSet>, terms: Vec<Term>) -> Result<Self> {
        let block = Block { name: name.into(), points, terms };
        for t in &block.terms {
            if t.alpha.dim() != block.points.dim() {
                return Err(Error::DimensionMismatch { expected: block.points.dim(), found: t.alpha.dim() });
            }
            if let Coefficient::PerPoint(v) = &t.coef {
                if v.len() != block.points.len() {
                    return Err(Error::InvalidArgument(format!(
                        "block `{}`: {} coefficients for {} points",
                        block.name,
                        v.len(),
                        block.points.len()
                    )));
                }
            }
        }
        Ok(block)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn max_order(&self) -> usize {
        self.terms.iter().map(|t| t.alpha.order()).max().unwrap_or(0)
    }
}

/// Block-structured coordinate vector. `None` marks an all-zero block.
#[derive(Clone, Debug, PartialEq)]
pub struct Embedded {
    pub blocks: Vec<Option<Vec<f64>>>,
}

impl Embedded {
    pub fn zeros(embedding: &Embedding) -> Self {
        Embedded { blocks: vec![None; embedding.blocks.len()] }
    }

    pub fn dense(embedding: &Embedding) -> Self {
        Embedded { blocks: embedding.blocks.iter().map(|b| Some(vec![0.0; b.len()])).collect() }
    }

    pub fn block(&self, i: usize) -> Option<&[f64]> {
        self.blocks[i].as_deref()
    }

    /// Flat copy with explicit zeros, in block order.
    pub fn to_flat(&self, embedding: &Embedding) -> Vec<f64> {
        let mut out = Vec::with_capacity(embedding.len());
        for (blk, b) in self.blocks.iter().zip(&embedding.blocks) {
            match blk {
                Some(v) => out.extend_from_slice(v),
                None => out.extend(std::iter::repeat_n(0.0, b.len())),
            }
        }
        out
    }

    /// `self *= factor`.
    pub fn scale(&mut self, factor: f64) {
        for v in self.blocks.iter_mut().flatten() {
            v.iter_mut().for_each(|x| *x *= factor);
        }
    }

    /// `self += a · other`; zero blocks of `self` are materialized as needed.
    pub fn axpy(&mut self, a: f64, other: &Embedded) {
        for (mine, theirs) in self.blocks.iter_mut().zip(&other.blocks) {
            let Some(theirs) = theirs else { continue };
            match mine {
                Some(v) => v.iter_mut().zip(theirs).for_each(|(x, y)| *x += a * y),
                None => *mine = Some(theirs.iter().map(|y| a * y).collect()),
            }
        }
    }

    /// `Σ_blocks Σ_p w_p x_p y_p` with per-block weights.
    pub fn weighted_dot(&self, other: &Embedded, weights: &[Arc<Vec<f64>>]) -> f64 {
        let mut acc = 0.0;
        for ((x, y), w) in self.blocks.iter().zip(&other.blocks).zip(weights) {
            if let (Some(x), Some(y)) = (x, y) {
                acc += x.iter().zip(y).zip(w.iter()).map(|((a, b), c)| a * b * c).sum::<f64>();
            }
        }
        acc
    }

    /// Unweighted `Σ x_p y_p`.
    pub fn dot(&self, other: &Embedded) -> f64 {
        let mut acc = 0.0;
        for (x, y) in self.blocks.iter().zip(&other.blocks) {
            if let (Some(x), Some(y)) = (x, y) {
                acc += x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();
            }
        }
        acc
    }
}

/// Ordered collection of blocks defining `J`.
#[derive(Clone, Debug)]
pub struct Embedding {
    dim: usize,
    pub blocks: Vec<Block>,
}

impl Embedding {
    pub fn new(dim: usize, blocks: Vec<Block>) -> Result<Self> {
        for b in &blocks {
            if b.points.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: b.points.dim() });
            }
        }
        Ok(Embedding { dim, blocks })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Total number of coordinates.
    pub fn len(&self) -> usize {
        self.blocks.iter().map(Block::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn max_order(&self) -> usize {
        self.blocks.iter().map(Block::max_order).max().unwrap_or(0)
    }

    /// Smoothness gate: `ReLU^k` must satisfy `k >= max order + 1`.
    pub fn check_activation(&self, activation: Activation) -> Result<()> {
        let needed = self.max_order() + 1;
        if let Activation::ReluPower(k) = activation {
            if (k as usize) < needed {
                return Err(Error::UnsupportedDerivative { requested: needed, supported: k as usize });
            }
        } else if activation.max_derivative() < needed {
            return Err(Error::UnsupportedDerivative { requested: needed, supported: activation.max_derivative() });
        }
        Ok(())
    }

    /// `J(g)`.
    pub fn embed(&self, g: &RidgeNeuron) -> Result<Embedded> {
        if g.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: g.dim() });
        }
        self.check_activation(g.activation)?;
        let mut cache: Vec<(*const PointSet, Vec<f64>)> = Vec::new();
        let mut blocks = Vec::with_capacity(self.blocks.len());
        for block in &self.blocks {
            let active: Vec<(&Term, f64)> = block
                .terms
                .iter()
                .map(|t| (t, t.alpha.monomial(&g.omega)))
                .filter(|(_, m)| *m != 0.0)
                .collect();
            if active.is_empty() || block.is_empty() {
                blocks.push(None);
                continue;
            }
            let key = Arc::as_ptr(&block.points);
            let idx = match cache.iter().position(|(k, _)| *k == key) {
                Some(i) => i,
                None => {
                    let mut t = Vec::new();
                    block.points.project(&g.omega, &mut t);
                    t.iter_mut().for_each(|v| *v += g.bias);
                    cache.push((key, t));
                    cache.len() - 1
                }
            };
            let t = &cache[idx].1;
            let mut out = vec![0.0; block.len()];
            for (term, m) in active {
                let order = term.alpha.order();
                match &term.coef {
                    Coefficient::Const(c) => {
                        let s = c * m;
                        for (o, &tp) in out.iter_mut().zip(t) {
                            *o += s * g.activation.derivative_unchecked(tp, order);
                        }
                    }
                    Coefficient::PerPoint(c) => {
                        for ((o, &tp), cp) in out.iter_mut().zip(t).zip(c.iter()) {
                            *o += cp * m * g.activation.derivative_unchecked(tp, order);
                        }
                    }
                }
            }
            blocks.push(Some(out));
        }
        Ok(Embedded { blocks })
    }

    /// Linear functional `g ↦ ⟨dual, J(g)⟩` in reduced form.
    pub fn functional(&self, dual: &Embedded) -> Functional {
        let mut groups: Vec<FunctionalGroup> = Vec::new();
        for (block, c) in self.blocks.iter().zip(&dual.blocks) {
            let Some(c) = c else { continue };
            let key = Arc::as_ptr(&block.points);
            let gi = match groups.iter().position(|g| Arc::as_ptr(&g.points) == key) {
                Some(i) => i,
                None => {
                    groups.push(FunctionalGroup { points: Arc::clone(&block.points), terms: Vec::new() });
                    groups.len() - 1
                }
            };
            let group = &mut groups[gi];
            for term in &block.terms {
                let ti = match group.terms.iter().position(|(a, _)| *a == term.alpha) {
                    Some(i) => i,
                    None => {
                        group.terms.push((term.alpha.clone(), vec![0.0; block.len()]));
                        group.terms.len() - 1
                    }
                };
                let w = &mut group.terms[ti].1;
                match &term.coef {
                    Coefficient::Const(k) => w.iter_mut().zip(c).for_each(|(x, y)| *x += k * y),
                    Coefficient::PerPoint(k) => {
                        w.iter_mut().zip(c).zip(k.iter()).for_each(|((x, y), z)| *x += z * y)
                    }
                }
            }
        }
        Functional { dim: self.dim, groups }
    }
}

/// Terms of a functional sharing one point set.
#[derive(Clone, Debug)]
pub struct FunctionalGroup {
    pub points: Arc<PointSet>,
    /// `(α, weights)` with value contribution `Σ_p weights[p] ∂^α g(x_p)`.
    pub terms: Vec<(MultiIndex, Vec<f64>)>,
}

/// Linear functional on neurons,
/// `ℓ(g) = Σ_groups Σ_terms Σ_p c_p ω^α σ^(|α|)(ω·x_p + b)`.
#[derive(Clone, Debug)]
pub struct Functional {
    dim: usize,
    pub groups: Vec<FunctionalGroup>,
}

/// A functional restricted to a fixed direction: `ℓ(b) = Σ_p Σ_j β_{p,j} σ^(j)(t_p + b)`.
#[derive(Clone, Debug, Default)]
pub struct Projected {
    pub t: Vec<f64>,
    /// Row-major `len × (max_order + 1)`.
    pub beta: Vec<f64>,
    pub orders: usize,
}

impl Projected {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    #[inline]
    pub fn beta(&self, p: usize) -> &[f64] {
        &self.beta[p * self.orders..(p + 1) * self.orders]
    }

    /// Direct evaluation at bias `b`.
    pub fn eval(&self, activation: Activation, b: f64) -> f64 {
        let relu = matches!(activation, Activation::ReluPower(_));
        let mut buf = [0.0; 16];
        let buf = &mut buf[..self.orders];
        let mut acc = 0.0;
        for (p, &t) in self.t.iter().enumerate() {
            let s = t + b;
            if relu && s <= 0.0 {
                continue;
            }
            activation.derivatives_into(s, buf);
            acc += self.beta(p).iter().zip(buf.iter()).map(|(x, y)| x * y).sum::<f64>();
        }
        acc
    }
}

/// Value, gradient and Hessian of a functional in the Cartesian
/// parameters `(ω_1, ..., ω_d, b)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalModel {
    pub value: f64,
    pub grad: Vec<f64>,
    /// Row-major `(d + 1) × (d + 1)`.
    pub hess: Vec<f64>,
}

impl Functional {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_order(&self) -> usize {
        self.groups
            .iter()
            .flat_map(|g| g.terms.iter().map(|(a, _)| a.order()))
            .max()
            .unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.groups.iter().map(|g| g.points.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// True if every weight is exactly zero.
    pub fn is_zero(&self) -> bool {
        self.groups.iter().all(|g| g.terms.iter().all(|(_, w)| w.iter().all(|v| *v == 0.0)))
    }

    /// Largest absolute weight; a scale for tolerances.
    pub fn max_abs_weight(&self) -> f64 {
        self.groups
            .iter()
            .flat_map(|g| g.terms.iter().flat_map(|(_, w)| w.iter()))
            .fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// `ℓ(g)`.
    pub fn eval(&self, g: &RidgeNeuron) -> f64 {
        let mut acc = 0.0;
        let mut t = Vec::new();
        for group in &self.groups {
            group.points.project(&g.omega, &mut t);
            for (alpha, w) in &group.terms {
                let m = alpha.monomial(&g.omega);
                if m == 0.0 {
                    continue;
                }
                let order = alpha.order();
                let mut s = 0.0;
                for (&tp, &wp) in t.iter().zip(w) {
                    if wp != 0.0 {
                        s += wp * g.activation.derivative_unchecked(tp + g.bias, order);
                    }
                }
                acc += m * s;
            }
        }
        acc
    }

    /// Reduce to the one-dimensional problem in the bias for direction `omega`.
    pub fn project(&self, omega: &[f64], out: &mut Projected) {
        let orders = self.max_order() + 1;
        out.orders = orders;
        out.t.clear();
        out.beta.clear();
        let mut t = Vec::new();
        for group in &self.groups {
            group.points.project(omega, &mut t);
            let start = out.t.len();
            out.t.extend_from_slice(&t);
            out.beta.resize(out.t.len() * orders, 0.0);
            for (alpha, w) in &group.terms {
                let m = alpha.monomial(omega);
                if m == 0.0 {
                    continue;
                }
                let j = alpha.order();
                for (p, wp) in w.iter().enumerate() {
                    out.beta[(start + p) * orders + j] += m * wp;
                }
            }
        }
    }

    /// Local model at `(omega, bias)`; the Hessian is skipped when `hessian` is false.
    pub fn local_model(&self, omega: &[f64], bias: f64, activation: Activation, hessian: bool) -> LocalModel {
        let d = self.dim;
        let n = d + 1;
        let mut value = 0.0;
        let mut grad = vec![0.0; n];
        let mut hess = vec![0.0; if hessian { n * n } else { 0 }];
        let mut t = Vec::new();
        let mut dm = vec![0.0; d];
        let mut ddm = vec![0.0; d * d];
        for group in &self.groups {
            group.points.project(omega, &mut t);
            for (alpha, w) in &group.terms {
                let j = alpha.order();
                let m = alpha.monomial(omega);
                for i in 0..d {
                    dm[i] = alpha.monomial_partial(omega, i);
                }
                if hessian {
                    for i in 0..d {
                        for l in 0..d {
                            ddm[i * d + l] = alpha.monomial_second_partial(omega, i, l);
                        }
                    }
                }
                if m == 0.0 && dm.iter().all(|v| *v == 0.0) && (!hessian || ddm.iter().all(|v| *v == 0.0)) {
                    continue;
                }
                for (p, &wp) in w.iter().enumerate() {
                    if wp == 0.0 {
                        continue;
                    }
                    let s = t[p] + bias;
                    let s0 = activation.derivative_unchecked(s, j);
                    let s1 = activation.derivative_unchecked(s, j + 1);
                    let x = group.points.point(p);
                    value += wp * m * s0;
                    for i in 0..d {
                        grad[i] += wp * (dm[i] * s0 + m * s1 * x[i]);
                    }
                    grad[d] += wp * m * s1;
                    if hessian {
                        let s2 = activation.derivative_unchecked(s, j + 2);
                        for i in 0..d {
                            for l in 0..d {
                                hess[i * n + l] += wp
                                    * (ddm[i * d + l] * s0
                                        + dm[i] * s1 * x[l]
                                        + dm[l] * s1 * x[i]
                                        + m * s2 * x[i] * x[l]);
                            }
                            let cross = wp * (dm[i] * s1 + m * s2 * x[i]);
                            hess[i * n + d] += cross;
                            hess[d * n + i] += cross;
                        }
                        hess[d * n + d] += wp * m * s2;
                    }
                }
            }
        }
        LocalModel { value, grad, hess }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn energy_1d(points: Vec<f64>) -> Embedding {
        let pts = Arc::new(PointSet::new(1, points).unwrap());
        Embedding::new(
            1,
            vec![
                Block::new("value", Arc::clone(&pts), vec![Term::unit(MultiIndex::zero(1))]).unwrap(),
                Block::new("d/dx", pts, vec![Term::unit(MultiIndex::axis(1, 0, 1))]).unwrap(),
            ],
        )
        .unwrap()
    }

    #[test]
    fn embed_layout_is_values_then_derivatives() {
        let emb = energy_1d(vec![0.25, 0.5]);
        let g = RidgeNeuron::new(vec![1.0], 0.0, Activation::ReluPower(2));
        let j = emb.embed(&g).unwrap().to_flat(&emb);
        assert_eq!(j, vec![0.0625, 0.25, 0.5, 1.0]);
    }

    #[test]
    fn embed_of_inactive_neuron_is_zero() {
        let emb = energy_1d(vec![-0.5, 0.0, 0.5]);
        let g = RidgeNeuron::new(vec![1.0], -2.0, Activation::ReluPower(2));
        assert!(emb.embed(&g).unwrap().to_flat(&emb).iter().all(|v| *v == 0.0));
    }

    #[test]
    fn smoothness_gate() {
        let emb = energy_1d(vec![0.5]);
        let g = RidgeNeuron::new(vec![1.0], 0.0, Activation::ReluPower(1));
        assert_eq!(emb.embed(&g).unwrap_err(), Error::UnsupportedDerivative { requested: 2, supported: 1 });
    }

    #[test]
    fn functional_matches_dot_with_embedding() {
        let emb = energy_1d(vec![-0.7, -0.1, 0.3, 0.9]);
        let dual = Embedded { blocks: vec![Some(vec![0.5, -1.0, 2.0, 0.25]), Some(vec![1.0, 0.0, -0.5, 3.0])] };
        let f = emb.functional(&dual);
        for (w, b) in [(1.0, 0.2), (-1.0, 0.4), (1.0, -0.5)] {
            let g = RidgeNeuron::new(vec![w], b, Activation::ReluPower(2));
            let direct = dual.dot(&emb.embed(&g).unwrap());
            assert!((f.eval(&g) - direct).abs() < 1e-14);
            let mut proj = Projected::default();
            f.project(&[w], &mut proj);
            assert!((proj.eval(g.activation, b) - direct).abs() < 1e-14);
            let lm = f.local_model(&[w], b, g.activation, true);
            assert!((lm.value - direct).abs() < 1e-14);
        }
    }

    #[test]
    fn local_model_matches_finite_differences() {
        let pts = Arc::new(PointSet::new(2, vec![0.1, 0.2, 0.7, -0.3, -0.4, 0.5, 0.9, 0.8]).unwrap());
        let emb = Embedding::new(
            2,
            vec![
                Block::new("value", Arc::clone(&pts), vec![Term::unit(MultiIndex::zero(2))]).unwrap(),
                Block::new("dx", Arc::clone(&pts), vec![Term::unit(MultiIndex::axis(2, 0, 1))]).unwrap(),
                Block::new("dy", pts, vec![Term::unit(MultiIndex::axis(2, 1, 1))]).unwrap(),
            ],
        )
        .unwrap();
        let dual = Embedded {
            blocks: vec![
                Some(vec![0.3, -0.2, 0.5, 0.1]),
                Some(vec![1.0, 0.4, -0.6, 0.2]),
                Some(vec![-0.3, 0.8, 0.1, 0.5]),
            ],
        };
        let f = emb.functional(&dual);
        let act = Activation::Sigmoid;
        let (om, b) = ([0.8, -0.6], 0.3);
        let lm = f.local_model(&om, b, act, true);
        let h = 1e-5;
        let val = |p: &[f64]| f.eval(&RidgeNeuron::new(vec![p[0], p[1]], p[2], act));
        let base = [om[0], om[1], b];
        for i in 0..3 {
            let mut a = base;
            let mut c = base;
            a[i] += h;
            c[i] -= h;
            let fd = (val(&a) - val(&c)) / (2.0 * h);
            assert!((fd - lm.grad[i]).abs() < 1e-8, "grad {i}");
            let la = f.local_model(&[a[0], a[1]], a[2], act, false);
            let lc = f.local_model(&[c[0], c[1]], c[2], act, false);
            for k in 0..3 {
                let fd2 = (la.grad[k] - lc.grad[k]) / (2.0 * h);
                assert!((fd2 - lm.hess[i * 3 + k]).abs() < 1e-7, "hess {i},{k}");
            }
        }
    }
}
