//! Adaptive Gauss–Kronrod quadrature of the defining marginal-likelihood
//! integrals. Deliberately independent of the library: factorials are plain
//! sums of logarithms and every density is written out by hand.

#![allow(dead_code)]

use std::f64::consts::PI;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

fn adapt<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let (k, err) = kronrod(f, a, b);
    if err <= tol || depth == 0 {
        return k;
    }
    let m = 0.5 * (a + b);
    adapt(f, a, m, 0.5 * tol, depth - 1) + adapt(f, m, b, 0.5 * tol, depth - 1)
}

/// `ln ∫_a^b exp(log_f(x)) dx`, rescaled by the integrand maximum on a grid
/// and split at that maximum so the peak is resolved.
pub fn log_integrate<F: Fn(f64) -> f64>(log_f: F, a: f64, b: f64) -> f64 {
    let grid = 4000;
    let mut best = (f64::NEG_INFINITY, 0.5 * (a + b));
    for i in 1..grid {
        let x = a + (b - a) * i as f64 / grid as f64;
        let v = log_f(x);
        if v > best.0 {
            best = (v, x);
        }
    }
    let (peak, at) = best;
    let g = |x: f64| {
        let v = log_f(x) - peak;
        if v.is_nan() {
            0.0
        } else {
            v.exp()
        }
    };
    let width = (b - a) / grid as f64;
    let mut cuts = vec![a];
    for off in [-20.0, -3.0, -1.0, 1.0, 3.0, 20.0] {
        let x = at + off * width;
        if x > a && x < b {
            cuts.push(x);
        }
    }
    cuts.push(b);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut total = 0.0;
    for w in cuts.windows(2) {
        total += adapt(&g, w[0], w[1], 1e-14, 40);
    }
    peak + total.ln()
}

pub fn ln_fact(k: u64) -> f64 {
    (2..=k).map(|i| (i as f64).ln()).sum()
}

fn ln_poisson_pmf(y: u64, rate: f64) -> f64 {
    if rate == 0.0 {
        return if y == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    -rate + y as f64 * rate.ln() - ln_fact(y)
}

fn ln_normal_pdf(x: f64, mean: f64, sd: f64) -> f64 {
    -0.5 * (2.0 * PI).ln() - sd.ln() - (x - mean) * (x - mean) / (2.0 * sd * sd)
}

/// λ = t/(1-t) maps (0,1) onto (0,∞).
fn over_positive_reals<F: Fn(f64) -> f64>(log_f: F) -> f64 {
    log_integrate(
        |t| {
            let lambda = t / (1.0 - t);
            log_f(lambda) - 2.0 * (1.0 - t).ln()
        },
        0.0,
        1.0,
    )
}

/// μ = c + w t/(1-t²) maps (-1,1) onto ℝ.
fn over_reals<F: Fn(f64) -> f64>(log_f: F, centre: f64, scale: f64) -> f64 {
    log_integrate(
        |t| {
            let d = 1.0 - t * t;
            let mu = centre + scale * t / d;
            log_f(mu) + scale.ln() + (1.0 + t * t).ln() - 2.0 * d.ln()
        },
        -1.0,
        1.0,
    )
}

/// ∫ Exp(λ; 1) ∏ Poisson(yᵢ; λ) dλ
pub fn poisson_full(y: &[u64]) -> f64 {
    over_positive_reals(|lambda| -lambda + y.iter().map(|&v| ln_poisson_pmf(v, lambda)).sum::<f64>())
}

/// ∫₀¹ ∏ p(1-p)^{yᵢ} dp
pub fn geometric_full(y: &[u64]) -> f64 {
    log_integrate(
        |p| y.iter().map(|&v| p.ln() + v as f64 * (1.0 - p).ln()).sum(),
        0.0,
        1.0,
    )
}

/// ∫ Exp(λ; 1) Poisson(S; nλ) dλ
pub fn poisson_sum(s: u64, n: usize) -> f64 {
    over_positive_reals(|lambda| -lambda + ln_poisson_pmf(s, n as f64 * lambda))
}

/// ∫₀¹ NegBin(S; n, p) dp with pmf C(n+S-1, S) pⁿ (1-p)^S
pub fn geometric_sum(s: u64, n: usize) -> f64 {
    let ln_binom = ln_fact(n as u64 + s - 1) - ln_fact(s) - ln_fact(n as u64 - 1);
    log_integrate(
        |p| ln_binom + n as f64 * p.ln() + s as f64 * (1.0 - p).ln(),
        0.0,
        1.0,
    )
}

fn centring(y: &[f64], sigma: f64, a: f64) -> (f64, f64) {
    let n = y.len() as f64;
    let mean = y.iter().sum::<f64>() / n;
    let precision = n / (sigma * sigma) + 1.0 / (a * a);
    (mean * (n / (sigma * sigma)) / precision, precision.sqrt().recip())
}

/// ∫ N(μ; 0, a²) ∏ N(yᵢ; μ, σ²) dμ
pub fn normal_full(y: &[f64], sigma: f64, a: f64) -> f64 {
    let (c, w) = centring(y, sigma, a);
    over_reals(
        |mu| ln_normal_pdf(mu, 0.0, a) + y.iter().map(|&v| ln_normal_pdf(v, mu, sigma)).sum::<f64>(),
        c,
        w,
    )
}

/// ∫ N(μ; 0, a²) N(ȳ; μ, σ²/n) dμ
pub fn normal_mean(mean: f64, n: usize, sigma: f64, a: f64) -> f64 {
    let sd = sigma / (n as f64).sqrt();
    let (c, w) = centring(&vec![mean; n], sigma, a);
    over_reals(|mu| ln_normal_pdf(mu, 0.0, a) + ln_normal_pdf(mean, mu, sd), c, w)
}
