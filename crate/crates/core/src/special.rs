//! Log-domain special functions.
//!
//! Factorials and binomials are always routed through log-gamma. Where two
//! huge log-gamma values would be subtracted (large sums `S` of geometric
//! draws), the Stirling remainder and Loader's deviance term are used instead
//! so that results keep absolute accuracy near 1e-12 even when `ln S!` is of
//! order 1e7.

use std::f64::consts::PI;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

pub fn ln_factorial(k: u64) -> f64 {
    libm::lgamma(k as f64 + 1.0)
}

/// `ln Γ(x) - ((x - 1/2) ln x - x + ln √(2π))` for `x > 0`.
pub fn stirling_correction(x: f64) -> f64 {
    if x >= 10.0 {
        // Bernoulli series; eight terms give < 1e-17 at x = 10.
        const C: [f64; 8] = [
            1.0 / 12.0,
            -1.0 / 360.0,
            1.0 / 1260.0,
            -1.0 / 1680.0,
            1.0 / 1188.0,
            -691.0 / 360_360.0,
            1.0 / 156.0,
            -3617.0 / 122_400.0,
        ];
        let inv = 1.0 / x;
        let inv2 = inv * inv;
        let mut acc = 0.0;
        for c in C.iter().rev() {
            acc = acc * inv2 + c;
        }
        acc * inv
    } else {
        ln_gamma(x) - ((x - 0.5) * x.ln() - x + LN_SQRT_2PI)
    }
}

/// Deviance term `x ln(x/m) + m - x`, evaluated without cancellation when
/// `x` is close to `m`.
pub fn bd0(x: f64, m: f64) -> f64 {
    if x == 0.0 {
        return m;
    }
    if (x - m).abs() < 0.1 * (x + m) {
        let mut v = (x - m) / (x + m);
        let s = (x - m) * v;
        let mut ej = 2.0 * x * v;
        v *= v;
        let mut sum = s;
        for j in 1..1000 {
            ej *= v;
            let next = sum + ej / (2 * j + 1) as f64;
            if next == sum {
                return next;
            }
            sum = next;
        }
        sum
    } else {
        x * (x / m).ln() + m - x
    }
}

/// `ln B(a, b)` for `a, b > 0`.
pub fn ln_beta(a: f64, b: f64) -> f64 {
    let (p, q) = if a < b { (a, b) } else { (b, a) };
    let total = p + q;
    if p >= 10.0 {
        let corr = stirling_correction(p) + stirling_correction(q) - stirling_correction(total);
        -0.5 * q.ln() + LN_SQRT_2PI + corr + (p - 0.5) * (p / total).ln()
            + q * (-p / total).ln_1p()
    } else if q >= 10.0 {
        let corr = stirling_correction(q) - stirling_correction(total);
        ln_gamma(p) + corr + p - p * total.ln() + (q - 0.5) * (-p / total).ln_1p()
    } else {
        ln_gamma(p) + ln_gamma(q) - ln_gamma(total)
    }
}

/// `ln C(n, k)`.
pub fn ln_choose(n: u64, k: u64) -> f64 {
    assert!(k <= n, "ln_choose requires k <= n");
    if k == 0 || k == n {
        return 0.0;
    }
    -((n as f64) + 1.0).ln() - ln_beta((n - k) as f64 + 1.0, k as f64 + 1.0)
}

/// Log probability of `counts` under a multinomial with `counts.len()` equal
/// cells, i.e. `ln(S! / ∏ yᵢ!) - S ln n` with `S = Σ yᵢ`.
pub fn ln_multinomial_uniform(counts: &[u64]) -> f64 {
    let n = counts.len() as f64;
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let s = total as f64;
    let cell_mean = s / n;
    let mut deviance = 0.0;
    let mut corrections = 0.0;
    let mut half_logs = 0.0;
    for &y in counts {
        deviance += bd0(y as f64, cell_mean);
        if y > 0 {
            let y = y as f64;
            corrections += stirling_correction(y);
            half_logs += 0.5 * (2.0 * PI * y).ln();
        }
    }
    stirling_correction(s) - corrections - deviance + 0.5 * (2.0 * PI * s).ln() - half_logs
}

/// Numerically stable logistic function.
pub fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}
