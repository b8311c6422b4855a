//! Bias search for piecewise-polynomial activations.
//!
//! For a fixed direction and `σ = ReLU^k`, the functional
//! `ℓ(b) = Σ_p Σ_j β_{p,j} σ^(j)(t_p + b)` is a polynomial of degree `k` in `b`
//! on every interval between consecutive breakpoints `−t_p`: point `p`
//! contributes `Σ_e a_{p,e} b^e` once `b > −t_p`. Prefix sums of `a_{p,e}`
//! in sorted order give every piece.

use crate::dictionary::{falling_factorial, Activation, BiasRange};
use crate::problem::Projected;

/// Number of interval candidates re-evaluated directly.
const DIRECT_CHECKS: usize = 4;

/// `table[j][e] = k!/(k−j)! · C(k−j, e)`.
pub(crate) fn expansion_table(k: u32, orders: usize) -> Vec<Vec<f64>> {
    let k = k as usize;
    (0..orders)
        .map(|j| {
            let m = k.saturating_sub(j);
            (0..=k)
                .map(|e| if j <= k && e <= m { falling_factorial(k as u32, j) * binomial(m, e) } else { 0.0 })
                .collect()
        })
        .collect()
}

fn binomial(n: usize, r: usize) -> f64 {
    (0..r).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Coefficients of point `p`'s active polynomial in `b`, added into `out`.
#[inline]
fn add_point_poly(k: usize, table: &[Vec<f64>], t: f64, beta: &[f64], out: &mut [f64]) {
    let mut tp = [1.0; 16];
    for s in 1..=k {
        tp[s] = tp[s - 1] * t;
    }
    for (j, &bj) in beta.iter().enumerate() {
        if bj == 0.0 || j > k {
            continue;
        }
        let m = k - j;
        for e in 0..=m {
            out[e] += bj * table[j][e] * tp[m - e];
        }
    }
}

#[inline]
pub(crate) fn poly_eval(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, v| acc * x + v)
}

/// `ℓ(b_i)` on the uniform grid `b_i = lo + i·step`, `i = 0..count`, in
/// `O(N k + count k)` by bucketing points on the grid.
pub(crate) fn grid_values(proj: &Projected, k: u32, lo: f64, step: f64, count: usize) -> Vec<f64> {
    let ku = k as usize;
    let table = expansion_table(k, proj.orders);
    let mut buckets = vec![0.0; (count + 1) * (ku + 1)];
    for (p, &t) in proj.t.iter().enumerate() {
        // First grid index with b_i > −t.
        let x = (-t - lo) / step;
        let first = if x < 0.0 { 0 } else { (x.floor() as usize).saturating_add(1) };
        if first >= count {
            continue;
        }
        add_point_poly(ku, &table, t, proj.beta(p), &mut buckets[first * (ku + 1)..(first + 1) * (ku + 1)]);
    }
    let mut acc = vec![0.0; ku + 1];
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        for e in 0..=ku {
            acc[e] += buckets[i * (ku + 1) + e];
        }
        out.push(poly_eval(&acc, lo + i as f64 * step));
    }
    out
}

/// Real roots of the polynomial `c` strictly inside `(lo, hi)`.
pub(crate) fn roots_in(c: &[f64], lo: f64, hi: f64, out: &mut Vec<f64>) {
    let mut deg = c.len();
    while deg > 0 && c[deg - 1] == 0.0 {
        deg -= 1;
    }
    let c = &c[..deg];
    let push = |r: f64, out: &mut Vec<f64>| {
        if r.is_finite() && r > lo && r < hi {
            out.push(r);
        }
    };
    match deg {
        0 | 1 => {}
        2 => push(-c[0] / c[1], out),
        3 => {
            let (a, b, cc) = (c[2], c[1], c[0]);
            let disc = b * b - 4.0 * a * cc;
            if disc < 0.0 {
                return;
            }
            let q = -0.5 * (b + b.signum() * disc.sqrt());
            if q != 0.0 {
                push(q / a, out);
                push(cc / q, out);
            } else {
                push(0.0, out);
            }
        }
        _ => {
            const PIECES: usize = 32;
            let h = (hi - lo) / PIECES as f64;
            let mut x0 = lo;
            let mut f0 = poly_eval(c, x0);
            for i in 1..=PIECES {
                let x1 = lo + i as f64 * h;
                let f1 = poly_eval(c, x1);
                if f0 == 0.0 {
                    push(x0, out);
                } else if f0 * f1 < 0.0 {
                    let (mut a, mut b, mut fa) = (x0, x1, f0);
                    for _ in 0..80 {
                        let m = 0.5 * (a + b);
                        let fm = poly_eval(c, m);
                        if fa * fm <= 0.0 {
                            b = m;
                        } else {
                            a = m;
                            fa = fm;
                        }
                    }
                    push(0.5 * (a + b), out);
                }
                x0 = x1;
                f0 = f1;
            }
        }
    }
}

/// Exact maximizer of `|ℓ(b)|` over `b ∈ [lo, hi]` for one direction.
///
/// `order` lists point indices by decreasing `t`. Returns `(b, ℓ(b))` with
/// `ℓ` evaluated directly at the returned bias.
pub(crate) fn exact_bias_search(proj: &Projected, k: u32, order: &[u32], range: BiasRange) -> (f64, f64) {
    let ku = k as usize;
    let table = expansion_table(k, proj.orders);
    let mut poly = vec![0.0; ku + 1];
    let mut dpoly = vec![0.0; ku];
    let mut best: Vec<(f64, f64)> = Vec::with_capacity(DIRECT_CHECKS + 1);
    let mut roots = Vec::new();
    let consider = |b: f64, v: f64, best: &mut Vec<(f64, f64)>| {
        let pos = best.iter().position(|(_, w)| v.abs() > w.abs()).unwrap_or(best.len());
        if pos < DIRECT_CHECKS {
            best.insert(pos, (b, v));
            best.truncate(DIRECT_CHECKS);
        }
    };
    // Before any point activates the functional vanishes.
    consider(range.lo, 0.0, &mut best);
    let n = order.len();
    let mut i = 0;
    while i < n {
        let t = proj.t[order[i] as usize];
        while i < n && proj.t[order[i] as usize] == t {
            let p = order[i] as usize;
            add_point_poly(ku, &table, proj.t[p], proj.beta(p), &mut poly);
            i += 1;
        }
        let left = -t;
        if left >= range.hi {
            break;
        }
        let right = if i < n { -proj.t[order[i] as usize] } else { f64::INFINITY };
        if right < range.lo {
            continue;
        }
        let hi = right.min(range.hi);
        let lo = left.max(range.lo);
        consider(hi, poly_eval(&poly, hi), &mut best);
        if lo > left {
            consider(lo, poly_eval(&poly, lo), &mut best);
        } else {
            // The left end itself belongs to the previous piece; approach it from inside.
            let b = left + 1e-12 * (1.0 + left.abs());
            if b < hi {
                consider(b, poly_eval(&poly, b), &mut best);
            }
        }
        for e in 1..=ku {
            dpoly[e - 1] = e as f64 * poly[e];
        }
        roots.clear();
        roots_in(&dpoly, lo, hi, &mut roots);
        for &r in &roots {
            consider(r, poly_eval(&poly, r), &mut best);
        }
    }
    let act = Activation::ReluPower(k);
    let mut out = (range.lo, 0.0_f64);
    for &(b, _) in &best {
        let v = proj.eval(act, b);
        if v.abs() > out.1.abs() {
            out = (b, v);
        }
    }
    out
}

/// Point indices sorted by decreasing `t` (stable for ties).
pub(crate) fn descending_order(t: &[f64]) -> Vec<u32> {
    let mut idx: Vec<u32> = (0..t.len() as u32).collect();
    idx.sort_by(|&a, &b| t[b as usize].total_cmp(&t[a as usize]));
    idx
}

#[cfg(test)]
mod tests {
    use super::*;

    fn projected(t: Vec<f64>, beta: Vec<f64>, orders: usize) -> Projected {
        Projected { t, beta, orders }
    }

    #[test]
    fn grid_values_match_direct_evaluation() {
        let proj = projected(vec![0.3, -0.2, 0.9, -0.7], vec![1.0, 0.5, -2.0, 0.1, 0.3, -1.0, 0.7, 0.2], 2);
        let (lo, step, count) = (-2.0, 0.1, 41);
        let vals = grid_values(&proj, 2, lo, step, count);
        for (i, v) in vals.iter().enumerate() {
            let b = lo + i as f64 * step;
            let direct = proj.eval(Activation::ReluPower(2), b);
            assert!((v - direct).abs() < 1e-12, "b={b} {v} {direct}");
        }
    }

    #[test]
    fn exact_search_beats_dense_grid() {
        let proj = projected(vec![0.5], vec![1.0, -1.5, 0.25], 3);
        let range = BiasRange::new(-2.0, 2.0).unwrap();
        let (_, v) = exact_bias_search(&proj, 3, &descending_order(&proj.t), range);
        let act = Activation::ReluPower(3);
        let grid = (0..=100_000).map(|i| proj.eval(act, -2.0 + 4.0 * i as f64 / 100_000.0).abs());
        let g = grid.fold(0.0, f64::max);
        assert!(v.abs() >= g - 1e-9);
    }

    #[test]
    fn quadratic_roots() {
        let mut r = Vec::new();
        roots_in(&[-1.0, 0.0, 1.0], -2.0, 2.0, &mut r);
        r.sort_by(f64::total_cmp);
        assert_eq!(r.len(), 2);
        assert!((r[0] + 1.0).abs() < 1e-15 && (r[1] - 1.0).abs() < 1e-15);
        let mut cubic = Vec::new();
        roots_in(&[0.0, -1.0, 0.0, 1.0], -0.5, 2.0, &mut cubic);
        cubic.sort_by(f64::total_cmp);
        assert_eq!(cubic.len(), 2);
        assert!(cubic[0].abs() < 1e-12 && (cubic[1] - 1.0).abs() < 1e-12);
    }
}
