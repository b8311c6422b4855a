//! Manufactured solutions and their source terms.

use std::f64::consts::PI;

use crate::dictionary::MultiIndex;
use crate::metrics::AnalyticSolution;
use crate::problem::Field;

/// `d^k/dx^k cos(c x)`.
fn cos_derivative(c: f64, x: f64, k: usize) -> f64 {
    c.powi(k as i32) * (c * x + k as f64 * PI / 2.0).cos()
}

/// Exact solution and source of a preset.
#[derive(Clone, Debug)]
pub struct Manufactured {
    pub exact: AnalyticSolution,
    pub source: Field,
}

/// `u = cos(c x)` for `−u'' + u = f`.
pub fn cosine_1d(c: f64) -> Manufactured {
    Manufactured {
        exact: AnalyticSolution::new(1, 4, move |x, a| cos_derivative(c, x[0], a.order())),
        source: Field::from_fn(move |x| (1.0 + c * c) * (c * x[0]).cos()),
    }
}

const PEAK_K: f64 = 0.01;
const PEAKS: [(f64, f64); 3] = [(0.5, -0.5), (1.0, 0.0), (0.5, 0.5)];

/// `G, G', G''` for the three-Gaussian envelope.
fn peaks_envelope(x: f64) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (a, c) in PEAKS {
        let s = x - c;
        let g = a * (-s * s / PEAK_K).exp();
        out[0] += g;
        out[1] += -2.0 * s / PEAK_K * g;
        out[2] += (4.0 * s * s / (PEAK_K * PEAK_K) - 2.0 / PEAK_K) * g;
    }
    out
}

/// `u = (1+x)³(1−x) G(x)` and its first two derivatives.
fn peaks_derivatives(x: f64) -> [f64; 3] {
    let p = [
        (1.0 + x).powi(3) * (1.0 - x),
        2.0 - 6.0 * x * x - 4.0 * x * x * x,
        -12.0 * x * (1.0 + x),
    ];
    let g = peaks_envelope(x);
    [p[0] * g[0], p[1] * g[0] + p[0] * g[1], p[2] * g[0] + 2.0 * p[1] * g[1] + p[0] * g[2]]
}

/// Three-peak solution of `−u'' + u = f` on `(−1, 1)`.
pub fn peaks_1d() -> Manufactured {
    Manufactured {
        exact: AnalyticSolution::new(1, 2, |x, a| peaks_derivatives(x[0])[a.order()]),
        source: Field::from_fn(|x| {
            let d = peaks_derivatives(x[0]);
            d[0] - d[2]
        }),
    }
}

/// `u = cos(2πx) cos(2πy)` for `−Δu + u = f`.
pub fn cosine_2d() -> Manufactured {
    let c = 2.0 * PI;
    Manufactured {
        exact: AnalyticSolution::new(2, 4, move |x, a| {
            cos_derivative(c, x[0], a.0[0] as usize) * cos_derivative(c, x[1], a.0[1] as usize)
        }),
        source: Field::from_fn(move |x| (1.0 + 2.0 * c * c) * (c * x[0]).cos() * (c * x[1]).cos()),
    }
}

/// Coefficients of `(s² − 1)⁴`, lowest degree first.
const BUMP: [f64; 9] = [1.0, 0.0, -4.0, 0.0, 6.0, 0.0, -4.0, 0.0, 1.0];

/// `Σ_{i>=k} c_i i!/(i−k)! s^{i−k}`.
fn horner_from(c: &[f64], s: f64, k: usize) -> f64 {
    c.iter().enumerate().skip(k).rev().fold(0.0, |acc, (i, ci)| {
        let ff: f64 = (0..k).map(|j| (i - j) as f64).product();
        acc * s + ci * ff
    })
}

/// `u = (x²−1)⁴ (y²−1)⁴` for `Δ²u + u = f`.
pub fn bump_2d() -> Manufactured {
    let p = |s: f64, k: usize| horner_from(&BUMP, s, k);
    Manufactured {
        exact: AnalyticSolution::new(2, 4, move |x, a| p(x[0], a.0[0] as usize) * p(x[1], a.0[1] as usize)),
        source: Field::from_fn(move |x| {
            let (px, py) = (p(x[0], 0), p(x[1], 0));
            p(x[0], 4) * py + 2.0 * p(x[0], 2) * p(x[1], 2) + px * p(x[1], 4) + px * py
        }),
    }
}

/// `α(x) = √(1 + Σ (x_i − ½)²)`.
pub fn highdim_coefficient(x: &[f64]) -> f64 {
    (1.0 + x.iter().map(|v| (v - 0.5).powi(2)).sum::<f64>()).sqrt()
}

/// `u = Σ cos(π x_i)` for `−∇·(α∇u) + u = f` on `(0, 1)^d`.
pub fn cosine_sum(dim: usize) -> Manufactured {
    Manufactured {
        exact: AnalyticSolution::new(dim, 4, |x, a: &MultiIndex| {
            let nz: Vec<usize> = (0..x.len()).filter(|&i| a.0[i] != 0).collect();
            match nz.as_slice() {
                [] => x.iter().map(|v| (PI * v).cos()).sum(),
                [i] => cos_derivative(PI, x[*i], a.0[*i] as usize),
                _ => 0.0,
            }
        }),
        source: Field::from_fn(|x| {
            let al = highdim_coefficient(x);
            x.iter()
                .map(|&v| PI * (v - 0.5) * (PI * v).sin() / al + PI * PI * al * (PI * v).cos() + (PI * v).cos())
                .sum()
        }),
    }
}

/// `u = cos(π r / 2)` for `−Δu + κ sinh u = f` on the disk of radius 2.
pub fn radial_cosine(kappa: f64) -> Manufactured {
    let c = PI / 2.0;
    Manufactured {
        exact: AnalyticSolution::new(2, 1, move |x, a| {
            let r = x[0].hypot(x[1]);
            match a.order() {
                0 => (c * r).cos(),
                _ => {
                    if r == 0.0 {
                        return 0.0;
                    }
                    let i = if a.0[0] == 1 { 0 } else { 1 };
                    -c * (c * r).sin() * x[i] / r
                }
            }
        }),
        source: Field::from_fn(move |x| {
            let r = x[0].hypot(x[1]);
            let u = (c * r).cos();
            // sin(cr)/r → c at the origin.
            let tail = if r < 1e-8 { c * c } else { c * (c * r).sin() / r };
            c * c * u + tail + kappa * u.sinh()
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_polynomial_derivatives() {
        let s = 0.3_f64;
        assert!((horner_from(&BUMP, s, 0) - (s * s - 1.0).powi(4)).abs() < 1e-14);
        assert!((horner_from(&BUMP, s, 1) - 8.0 * s * (s * s - 1.0).powi(3)).abs() < 1e-14);
    }
}
