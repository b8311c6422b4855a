//! Safeguarded local maximization of `s · ℓ(g(q))` in chart coordinates `q`.

use super::{sphere, Candidate, DictionarySpec, Parameterization, RefineMethod, SearchConfig};
use crate::dictionary::{Activation, RidgeNeuron};
use crate::problem::Functional;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Chart {
    /// Only the bias moves.
    Fixed,
    /// Hyperspherical angles plus bias.
    Sphere,
    /// Cartesian `(ω, b)` clamped to a box.
    Box,
}

struct Problem<'a> {
    f: &'a Functional,
    act: Activation,
    chart: Chart,
    omega0: Vec<f64>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    sign: f64,
}

impl Problem<'_> {
    fn decode(&self, q: &[f64]) -> RidgeNeuron {
        let n = q.len();
        match self.chart {
            Chart::Fixed => RidgeNeuron::new(self.omega0.clone(), q[0], self.act),
            Chart::Sphere => RidgeNeuron::new(sphere::direction(&q[..n - 1]), q[n - 1], self.act),
            Chart::Box => RidgeNeuron::new(q[..n - 1].to_vec(), q[n - 1], self.act),
        }
    }

    fn project(&self, q: &mut [f64]) {
        for ((v, lo), hi) in q.iter_mut().zip(&self.lo).zip(&self.hi) {
            *v = v.clamp(*lo, *hi);
        }
    }

    fn value(&self, q: &[f64]) -> f64 {
        self.sign * self.f.eval(&self.decode(q))
    }

    /// Chart gradient and (optionally) Hessian of `s · ℓ`.
    fn model(&self, q: &[f64], hessian: bool) -> (f64, Vec<f64>, Vec<f64>) {
        let g = self.decode(q);
        let d = g.dim();
        let nc = d + 1;
        let lm = self.f.local_model(&g.omega, g.bias, self.act, hessian);
        let s = self.sign;
        let value = s * lm.value;
        match self.chart {
            Chart::Fixed => {
                let h = if hessian { vec![s * lm.hess[d * nc + d]] } else { Vec::new() };
                (value, vec![s * lm.grad[d]], h)
            }
            Chart::Box => {
                let grad = lm.grad.iter().map(|v| s * v).collect();
                let h = lm.hess.iter().map(|v| s * v).collect();
                (value, grad, h)
            }
            Chart::Sphere => {
                let m = d - 1;
                let theta = &q[..m];
                let jac = sphere::jacobian(theta);
                let n = m + 1;
                let mut grad = vec![0.0; n];
                for a in 0..m {
                    grad[a] = s * (0..d).map(|i| lm.grad[i] * jac[i * m + a]).sum::<f64>();
                }
                grad[m] = s * lm.grad[d];
                let mut h = Vec::new();
                if hessian {
                    h = vec![0.0; n * n];
                    let sec = sphere::second_derivatives(theta);
                    for a in 0..m {
                        for b in 0..m {
                            let mut acc = 0.0;
                            for i in 0..d {
                                acc += lm.grad[i] * sec[i][a * m + b];
                                for j in 0..d {
                                    acc += jac[i * m + a] * lm.hess[i * nc + j] * jac[j * m + b];
                                }
                            }
                            h[a * n + b] = s * acc;
                        }
                        let cross: f64 = (0..d).map(|i| lm.hess[i * nc + d] * jac[i * m + a]).sum();
                        h[a * n + m] = s * cross;
                        h[m * n + a] = s * cross;
                    }
                    h[m * n + m] = s * lm.hess[d * nc + d];
                }
                (value, grad, h)
            }
        }
    }
}

/// Solves `A x = b` for symmetric positive definite `A`; `None` if not SPD.
fn cholesky_solve(a: &[f64], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if !(s > 0.0) || !s.is_finite() {
                    return None;
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    let mut y = vec![0.0; n];
    for i in 0..n {
        let s: f64 = (0..i).map(|k| l[i * n + k] * y[k]).sum();
        y[i] = (b[i] - s) / l[i * n + i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| l[k * n + i] * x[k]).sum();
        x[i] = (y[i] - s) / l[i * n + i];
    }
    Some(x)
}

fn chart_for(dict: &DictionarySpec, fixed: bool) -> Chart {
    match dict.params {
        _ if fixed => Chart::Fixed,
        Parameterization::Axes { .. } => Chart::Fixed,
        Parameterization::Sphere { .. } if dict.dim == 1 => Chart::Fixed,
        Parameterization::Sphere { .. } => Chart::Sphere,
        Parameterization::Box { .. } => Chart::Box,
    }
}

/// Refines `seed` locally; never returns a smaller `|ℓ|` than the seed.
pub fn refine(f: &Functional, seed: Candidate, dict: &DictionarySpec, config: &SearchConfig) -> Candidate {
    run(f, seed, dict, config, chart_for(dict, false))
}

pub(crate) fn refine_fixed_direction(
    f: &Functional,
    seed: Candidate,
    dict: &DictionarySpec,
    config: &SearchConfig,
) -> Candidate {
    run(f, seed, dict, config, Chart::Fixed)
}

fn run(f: &Functional, seed: Candidate, dict: &DictionarySpec, config: &SearchConfig, chart: Chart) -> Candidate {
    if seed.pairing == 0.0 || !seed.pairing.is_finite() {
        return seed;
    }
    let d = dict.dim;
    let (mut q, lo, hi) = match (chart, &dict.params) {
        (Chart::Box, Parameterization::Box { lo, hi }) => {
            let mut q = seed.neuron.omega.clone();
            q.push(seed.neuron.bias);
            (q, vec![*lo; d + 1], vec![*hi; d + 1])
        }
        (Chart::Sphere, Parameterization::Sphere { bias }) => {
            let mut q = sphere::angles(&seed.neuron.omega);
            q.push(seed.neuron.bias);
            let mut lo = vec![f64::NEG_INFINITY; d];
            let mut hi = vec![f64::INFINITY; d];
            lo[d - 1] = bias.lo;
            hi[d - 1] = bias.hi;
            (q, lo, hi)
        }
        _ => {
            let r = dict.bias_range();
            (vec![seed.neuron.bias], vec![r.lo], vec![r.hi])
        }
    };
    let problem = Problem {
        f,
        act: dict.activation,
        chart,
        omega0: seed.neuron.omega.clone(),
        lo,
        hi,
        sign: seed.pairing.signum(),
    };
    let newton = config.refine == RefineMethod::Newton;
    let mut current = problem.value(&q);
    if !current.is_finite() {
        return Candidate { refine_fallback: true, ..seed };
    }
    let default_step = 0.05 * dict.bias_range().width();
    for _ in 0..config.refine_iters {
        let (_, g, h) = problem.model(&q, true);
        if g.iter().any(|v| !v.is_finite()) || h.iter().any(|v| !v.is_finite()) {
            return Candidate { refine_fallback: true, ..seed };
        }
        let gnorm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if gnorm == 0.0 {
            break;
        }
        let n = g.len();
        let neg_h: Vec<f64> = h.iter().map(|v| -v).collect();
        let newton_step = if newton { cholesky_solve(&neg_h, &g) } else { None };
        let step = newton_step.unwrap_or_else(|| {
            let curv: f64 =
                (0..n).map(|i| g[i] * (0..n).map(|j| neg_h[i * n + j] * g[j]).sum::<f64>()).sum();
            let tau = if curv > 0.0 { gnorm * gnorm / curv } else { default_step / gnorm };
            g.iter().map(|v| tau * v).collect()
        });
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..=config.max_halvings {
            let mut trial: Vec<f64> = q.iter().zip(&step).map(|(a, s)| a + alpha * s).collect();
            problem.project(&mut trial);
            let v = problem.value(&trial);
            if !v.is_finite() {
                return Candidate { refine_fallback: true, ..seed };
            }
            if v > current {
                let gain = v - current;
                q = trial;
                current = v;
                accepted = gain > 1e-14 * current.abs();
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    let neuron = problem.decode(&q);
    let pairing = f.eval(&neuron);
    if pairing.abs() > seed.pairing.abs() {
        Candidate { neuron, pairing, refine_fallback: false }
    } else {
        seed
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cholesky_solves_and_rejects_indefinite() {
        let a = [4.0, 1.0, 1.0, 3.0];
        let x = cholesky_solve(&a, &[1.0, 2.0]).unwrap();
        assert!((4.0 * x[0] + x[1] - 1.0).abs() < 1e-14 && (x[0] + 3.0 * x[1] - 2.0).abs() < 1e-14);
        assert!(cholesky_solve(&[1.0, 2.0, 2.0, 1.0], &[1.0, 1.0]).is_none());
    }
}
