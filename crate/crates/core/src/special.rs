//! Regularized incomplete beta function and binomial weights.

use statrs::function::gamma::ln_gamma;

const CF_MAX_ITER: usize = 300;
const CF_TOL: f64 = 1e-12;
const TINY: f64 = 1e-300;

/// `log B(a, b)`.
pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Regularized incomplete beta `I_x(a, b)` for `a, b > 0`.
///
/// Modified Lentz evaluation of the continued fraction, applied directly
/// when `x < (a + 1)/(a + b + 2)` and to `1 - I_{1-x}(b, a)` otherwise.
pub fn beta_reg(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    if x < (a + 1.0) / (a + b + 2.0) {
        front(a, b, x) * beta_cf(a, b, x) / a
    } else {
        1.0 - front(b, a, 1.0 - x) * beta_cf(b, a, 1.0 - x) / b
    }
}

/// `1 - I_x(a, b)` without cancellation for `x` near 1.
pub fn beta_reg_upper(a: f64, b: f64, x: f64) -> f64 {
    beta_reg(b, a, 1.0 - x)
}

fn front(a: f64, b: f64, x: f64) -> f64 {
    (a * x.ln() + b * (-x).ln_1p() - ln_beta(a, b)).exp()
}

fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=CF_MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < CF_TOL {
            break;
        }
    }
    h
}

/// `P(lo < X < hi)` for `X ~ Beta(a, b)`, choosing the tail that avoids
/// subtracting two numbers close to one.
pub fn beta_interval(a: f64, b: f64, lo: f64, hi: f64) -> f64 {
    let lo = lo.clamp(0.0, 1.0);
    let hi = hi.clamp(0.0, 1.0);
    if hi <= lo {
        return 0.0;
    }
    let lower = beta_reg(a, b, hi) - beta_reg(a, b, lo);
    if lower > 0.5 {
        return lower;
    }
    let upper = beta_reg_upper(a, b, lo) - beta_reg_upper(a, b, hi);
    if beta_reg(a, b, lo) > 0.5 {
        upper.max(0.0)
    } else {
        lower.max(0.0)
    }
}

/// Binomial probability `C(n, k) p^k (1-p)^{n-k}`.
pub fn binomial_pmf(n: u64, k: u64, p: f64) -> f64 {
    if k > n {
        return 0.0;
    }
    if p == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if p == 1.0 {
        return if k == n { 1.0 } else { 0.0 };
    }
    let (n, k) = (n as f64, k as f64);
    let ln_choose = ln_gamma(n + 1.0) - ln_gamma(k + 1.0) - ln_gamma(n - k + 1.0);
    (ln_choose + k * p.ln() + (n - k) * (-p).ln_1p()).exp()
}
