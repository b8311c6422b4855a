//! Ridge-function dictionary elements `σ(ω·x + b)` and their derivatives.
//!
//! A [`RidgeNeuron`] stores its direction in Cartesian form. For the `ReLU^k`
//! dictionaries the direction is a unit vector and the bias lives in a
//! [`BiasRange`]; for smooth activations the parameters live in a box.
//!
//! Partial derivatives follow from the chain rule:
//! `∂^α σ(ω·x + b) = ω^α σ^(|α|)(ω·x + b)`.

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Highest sigmoid derivative order with a precomputed polynomial.
const SIGMOID_MAX_ORDER: usize = 8;

/// Univariate activation function of a ridge neuron.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Activation {
    /// `max(0, t)^k` with `k >= 1`.
    ReluPower(u32),
    /// Logistic sigmoid `1 / (1 + e^{-t})`.
    Sigmoid,
}

impl Activation {
    /// Largest derivative order the activation supports.
    ///
    /// For `ReLU^k` the `k`-th derivative is the (scaled) Heaviside step,
    /// which is still well defined away from the kink.
    pub fn max_derivative(&self) -> usize {
        match *self {
            Activation::ReluPower(k) => k as usize,
            Activation::Sigmoid => SIGMOID_MAX_ORDER,
        }
    }

    /// Degree of the polynomial pieces, if the activation is piecewise polynomial.
    pub fn piecewise_degree(&self) -> Option<u32> {
        match *self {
            Activation::ReluPower(k) => Some(k),
            Activation::Sigmoid => None,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.derivative_unchecked(t, 0)
    }

    /// `σ^(order)(t)`, failing if the order exceeds [`Self::max_derivative`].
    pub fn derivative(&self, t: f64, order: usize) -> Result<f64> {
        if order > self.max_derivative() {
            return Err(Error::UnsupportedDerivative {
                requested: order,
                supported: self.max_derivative(),
            });
        }
        Ok(self.derivative_unchecked(t, order))
    }

    /// `σ^(order)(t)` without the order check.
    ///
    /// `ReLU^k` derivatives of order `> k` are zero almost everywhere and are
    /// reported as zero. At the kink `t = 0` every derivative is zero.
    #[inline]
    pub fn derivative_unchecked(&self, t: f64, order: usize) -> f64 {
        match *self {
            Activation::ReluPower(k) => relu_power_derivative(k, t, order),
            Activation::Sigmoid => sigmoid_derivative(t, order),
        }
    }

    /// `out[j] = σ^(j)(t)` for `j < out.len()`, sharing the work across orders.
    #[inline]
    pub fn derivatives_into(&self, t: f64, out: &mut [f64]) {
        match *self {
            Activation::ReluPower(k) => {
                if t <= 0.0 {
                    out.iter_mut().for_each(|v| *v = 0.0);
                    return;
                }
                for (j, v) in out.iter_mut().enumerate() {
                    *v = relu_power_derivative(k, t, j);
                }
            }
            Activation::Sigmoid => {
                let s = 1.0 / (1.0 + (-t).exp());
                let polys = sigmoid_polynomials();
                for (j, v) in out.iter_mut().enumerate() {
                    *v = match polys.get(j) {
                        Some(p) => p.iter().rev().fold(0.0, |acc, c| acc * s + c),
                        None => f64::NAN,
                    };
                }
            }
        }
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Activation::ReluPower(k) => write!(f, "ReLU^{k}"),
            Activation::Sigmoid => write!(f, "sigmoid"),
        }
    }
}

/// Falling factorial `k (k-1) ... (k-j+1)`.
#[inline]
pub(crate) fn falling_factorial(k: u32, j: usize) -> f64 {
    let mut out = 1.0;
    for i in 0..j {
        out *= (k as f64) - i as f64;
    }
    out
}

#[inline]
fn relu_power_derivative(k: u32, t: f64, order: usize) -> f64 {
    if t <= 0.0 || order > k as usize {
        return 0.0;
    }
    let exp = k as i32 - order as i32;
    falling_factorial(k, order) * t.powi(exp)
}

fn sigmoid_polynomials() -> &'static Vec<Vec<f64>> {
    static POLYS: OnceLock<Vec<Vec<f64>>> = OnceLock::new();
    POLYS.get_or_init(|| {
        // σ^(n) = p_n(σ), with p_0(s) = s and p_{n+1}(s) = p_n'(s) s (1 - s).
        let mut polys = vec![vec![0.0, 1.0]];
        for n in 0..SIGMOID_MAX_ORDER {
            let p = &polys[n];
            let dp: Vec<f64> = (1..p.len()).map(|i| i as f64 * p[i]).collect();
            let mut next = vec![0.0; dp.len() + 2];
            for (i, c) in dp.iter().enumerate() {
                next[i + 1] += c;
                next[i + 2] -= c;
            }
            polys.push(next);
        }
        polys
    })
}

#[inline]
fn sigmoid_derivative(t: f64, order: usize) -> f64 {
    let s = 1.0 / (1.0 + (-t).exp());
    if order == 0 {
        return s;
    }
    let Some(p) = sigmoid_polynomials().get(order) else {
        return f64::NAN;
    };
    p.iter().rev().fold(0.0, |acc, c| acc * s + c)
}

/// Multi-index `α` selecting the partial derivative `∂^α`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultiIndex(exponents)
    }

    pub fn zero(dim: usize) -> Self {
        MultiIndex(vec![0; dim])
    }

    /// `e_axis * order`, e.g. `(0, 2)` for `∂²/∂y²`.
    pub fn axis(dim: usize, axis: usize, order: u32) -> Self {
        let mut e = vec![0; dim];
        e[axis] = order;
        MultiIndex(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `|α|`.
    pub fn order(&self) -> usize {
        self.0.iter().map(|&a| a as usize).sum()
    }

    /// `ω^α = Π ω_i^{α_i}`.
    #[inline]
    pub fn monomial(&self, omega: &[f64]) -> f64 {
        let mut out = 1.0;
        for (&a, &w) in self.0.iter().zip(omega) {
            if a > 0 {
                out *= w.powi(a as i32);
            }
        }
        out
    }

    /// `∂ω^α / ∂ω_i`.
    pub fn monomial_partial(&self, omega: &[f64], i: usize) -> f64 {
        let a = self.0[i];
        if a == 0 {
            return 0.0;
        }
        let mut out = a as f64;
        for (j, (&e, &w)) in self.0.iter().zip(omega).enumerate() {
            let e = if j == i { e - 1 } else { e };
            if e > 0 {
                out *= w.powi(e as i32);
            }
        }
        out
    }

    /// `∂²ω^α / ∂ω_i ∂ω_j`.
    pub fn monomial_second_partial(&self, omega: &[f64], i: usize, j: usize) -> f64 {
        let mut exps = self.0.clone();
        let mut factor = 1.0;
        for idx in [i, j] {
            if exps[idx] == 0 {
                return 0.0;
            }
            factor *= exps[idx] as f64;
            exps[idx] -= 1;
        }
        factor * MultiIndex(exps).monomial(omega)
    }

    /// Multinomial coefficient `|α|! / α!`.
    pub fn multinomial(&self) -> f64 {
        let fact = |n: usize| (1..=n).map(|i| i as f64).product::<f64>();
        fact(self.order()) / self.0.iter().map(|&a| fact(a as usize)).product::<f64>()
    }

    /// All multi-indices in `dim` variables with `|α| = order`, in
    /// lexicographically decreasing order (`(2,0), (1,1), (0,2)`).
    pub fn all_of_order(dim: usize, order: u32) -> Vec<MultiIndex> {
        fn rec(dim: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            if prefix.len() + 1 == dim {
                prefix.push(left);
                out.push(MultiIndex(prefix.clone()));
                prefix.pop();
                return;
            }
            for a in (0..=left).rev() {
                prefix.push(a);
                rec(dim, left - a, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        if dim == 0 {
            return out;
        }
        rec(dim, order, &mut Vec::with_capacity(dim), &mut out);
        out
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

/// Admissible bias interval `[c₁, c₂]` for a `ReLU^k` dictionary.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiasRange {
    pub lo: f64,
    pub hi: f64,
}

impl BiasRange {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidArgument(format!("bias range [{lo}, {hi}] is empty")));
        }
        Ok(BiasRange { lo, hi })
    }

    /// `[-2, 2]` when the domain sits in the unit ball, `±(ρ + 1)` otherwise,
    /// where `ρ` is the largest distance from the origin to the domain.
    pub fn for_radius(rho: f64) -> Self {
        if rho <= 1.0 {
            BiasRange { lo: -2.0, hi: 2.0 }
        } else {
            BiasRange { lo: -(rho + 1.0), hi: rho + 1.0 }
        }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn clamp(&self, b: f64) -> f64 {
        b.clamp(self.lo, self.hi)
    }
}

/// One dictionary element `σ(ω·x + b)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RidgeNeuron {
    pub omega: Vec<f64>,
    pub bias: f64,
    pub activation: Activation,
}

impl RidgeNeuron {
    pub fn new(omega: Vec<f64>, bias: f64, activation: Activation) -> Self {
        RidgeNeuron { omega, bias, activation }
    }

    /// Neuron with `omega` rescaled to unit length.
    pub fn unit(omega: Vec<f64>, bias: f64, activation: Activation) -> Result<Self> {
        let norm = omega.iter().map(|w| w * w).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidArgument("direction must be nonzero".into()));
        }
        Ok(RidgeNeuron {
            omega: omega.into_iter().map(|w| w / norm).collect(),
            bias,
            activation,
        })
    }

    pub fn dim(&self) -> usize {
        self.omega.len()
    }

    #[inline]
    pub fn preactivation(&self, x: &[f64]) -> f64 {
        self.omega.iter().zip(x).map(|(w, xi)| w * xi).sum::<f64>() + self.bias
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: x.len() });
        }
        Ok(())
    }

    /// `σ(ω·x + b)`.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        Ok(self.activation.eval(self.preactivation(x)))
    }

    /// `∂^α σ(ω·x + b) = ω^α σ^(|α|)(ω·x + b)`.
    pub fn partial(&self, x: &[f64], alpha: &MultiIndex) -> Result<f64> {
        self.check_dim(x)?;
        if alpha.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: alpha.dim() });
        }
        let s = self.activation.derivative(self.preactivation(x), alpha.order())?;
        Ok(alpha.monomial(&self.omega) * s)
    }

    /// `-x/ω` style breakpoint for 1-D neurons: the point where `ω x + b = 0`.
    pub fn breakpoint_1d(&self) -> Option<f64> {
        match self.omega.as_slice() {
            [w] if *w != 0.0 => Some(-self.bias / w),
            _ => None,
        }
    }
}

/// Sparse expansion `u = Σ a_i g_i`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Expansion {
    pub terms: Vec<(f64, RidgeNeuron)>,
}

impl Expansion {
    pub fn new() -> Self {
        Expansion { terms: Vec::new() }
    }

    pub fn from_terms(terms: Vec<(f64, RidgeNeuron)>) -> Result<Self> {
        let u = Expansion { terms };
        u.validate()?;
        Ok(u)
    }

    fn validate(&self) -> Result<()> {
        let Some((_, first)) = self.terms.first() else {
            return Ok(());
        };
        for (_, g) in &self.terms[1..] {
            if g.dim() != first.dim() {
                return Err(Error::DimensionMismatch { expected: first.dim(), found: g.dim() });
            }
            if std::mem::discriminant(&g.activation) != std::mem::discriminant(&first.activation) {
                return Err(Error::InvalidArgument(
                    "all neurons of an expansion must share the activation kind".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn dim(&self) -> Option<usize> {
        self.terms.first().map(|(_, g)| g.dim())
    }

    /// `Σ |a_i|`.
    pub fn l1_norm(&self) -> f64 {
        self.terms.iter().map(|(a, _)| a.abs()).sum()
    }

    pub fn push(&mut self, coefficient: f64, neuron: RidgeNeuron) {
        self.terms.push((coefficient, neuron));
    }

    /// Multiplies every coefficient by `factor`.
    pub fn scale(&mut self, factor: f64) {
        for (a, _) in &mut self.terms {
            *a *= factor;
        }
    }

    /// Concatenation `self + other` (no merging of equal neurons).
    pub fn concat(&self, other: &Expansion) -> Result<Expansion> {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Expansion::from_terms(terms)
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        let mut acc = 0.0;
        for (a, g) in &self.terms {
            acc += a * g.eval(x)?;
        }
        Ok(acc)
    }

    /// `Σ a_i ∂^α g_i(x)`; zero for the empty expansion.
    pub fn partial(&self, x: &[f64], alpha: &MultiIndex) -> Result<f64> {
        let mut acc = 0.0;
        for (a, g) in &self.terms {
            acc += a * g.partial(x, alpha)?;
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn relu2_1d(w: f64, b: f64) -> RidgeNeuron {
        RidgeNeuron::new(vec![w], b, Activation::ReluPower(2))
    }

    #[test]
    fn neuron_eval_examples() {
        let g = relu2_1d(1.0, 0.0);
        assert_eq!(g.eval(&[0.5]).unwrap(), 0.25);
        assert_eq!(g.eval(&[-0.5]).unwrap(), 0.0);
        let g2 = RidgeNeuron::new(vec![0.6, 0.8], -0.5, Activation::ReluPower(2));
        assert!((g2.eval(&[1.0, 1.0]).unwrap() - 0.81).abs() < 1e-15);
    }

    #[test]
    fn neuron_eval_rejects_dimension_mismatch() {
        let g = relu2_1d(1.0, 0.0);
        assert_eq!(
            g.eval(&[0.5, 0.1]),
            Err(Error::DimensionMismatch { expected: 1, found: 2 })
        );
    }

    #[test]
    fn neuron_partial_examples() {
        let g = relu2_1d(1.0, 0.0);
        let a1 = MultiIndex::new(vec![1]);
        let a2 = MultiIndex::new(vec![2]);
        assert_eq!(g.partial(&[0.5], &a1).unwrap(), 1.0);
        assert_eq!(g.partial(&[0.5], &a2).unwrap(), 2.0);
        assert_eq!(g.partial(&[0.0], &a2).unwrap(), 0.0);
        let a3 = MultiIndex::new(vec![3]);
        assert!(matches!(
            g.partial(&[0.5], &a3),
            Err(Error::UnsupportedDerivative { requested: 3, supported: 2 })
        ));
    }

    #[test]
    fn partial_uses_direction_monomial() {
        let g = RidgeNeuron::new(vec![0.6, 0.8], 0.1, Activation::ReluPower(3));
        let x = [0.3, 0.4];
        let t: f64 = 0.6 * 0.3 + 0.8 * 0.4 + 0.1;
        let mixed = g.partial(&x, &MultiIndex::new(vec![1, 1])).unwrap();
        assert!((mixed - 0.6 * 0.8 * 6.0 * t).abs() < 1e-14);
    }

    #[test]
    fn expansion_partial_examples() {
        let empty = Expansion::new();
        assert_eq!(empty.partial(&[0.3], &MultiIndex::zero(1)).unwrap(), 0.0);

        let single = Expansion::from_terms(vec![(2.0, relu2_1d(1.0, 0.0))]).unwrap();
        assert_eq!(single.partial(&[0.5], &MultiIndex::zero(1)).unwrap(), 0.5);

        let g = relu2_1d(0.7_f64.signum(), 0.2);
        let cancel = Expansion::from_terms(vec![(1.0, g.clone()), (-1.0, g)]).unwrap();
        for x in [-0.9, -0.1, 0.0, 0.4, 1.0] {
            assert_eq!(cancel.eval(&[x]).unwrap(), 0.0);
        }
    }

    #[test]
    fn expansion_rejects_mixed_activation_kinds() {
        let a = relu2_1d(1.0, 0.0);
        let b = RidgeNeuron::new(vec![1.0], 0.0, Activation::Sigmoid);
        assert!(Expansion::from_terms(vec![(1.0, a), (1.0, b)]).is_err());
    }

    #[test]
    fn sigmoid_derivative_polynomials() {
        let t = 0.37_f64;
        let s = 1.0 / (1.0 + (-t).exp());
        let act = Activation::Sigmoid;
        assert!((act.derivative(t, 1).unwrap() - s * (1.0 - s)).abs() < 1e-15);
        let d2 = s * (1.0 - s) * (1.0 - 2.0 * s);
        assert!((act.derivative(t, 2).unwrap() - d2).abs() < 1e-15);
        let d3 = s * (1.0 - s) * (1.0 - 6.0 * s + 6.0 * s * s);
        assert!((act.derivative(t, 3).unwrap() - d3).abs() < 1e-15);
    }

    #[test]
    fn all_of_order_lists_multi_indices() {
        let second = MultiIndex::all_of_order(2, 2);
        assert_eq!(
            second,
            vec![
                MultiIndex::new(vec![2, 0]),
                MultiIndex::new(vec![1, 1]),
                MultiIndex::new(vec![0, 2])
            ]
        );
        let weights: Vec<f64> = second.iter().map(|a| a.multinomial()).collect();
        assert_eq!(weights, vec![1.0, 2.0, 1.0]);
        assert_eq!(MultiIndex::all_of_order(3, 1).len(), 3);
    }

    #[test]
    fn bias_range_defaults() {
        assert_eq!(BiasRange::for_radius(1.0), BiasRange { lo: -2.0, hi: 2.0 });
        let r = BiasRange::for_radius(2.0_f64.sqrt());
        assert!((r.hi - (2.0_f64.sqrt() + 1.0)).abs() < 1e-15);
    }
}
