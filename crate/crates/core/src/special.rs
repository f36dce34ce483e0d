//! Log-space special functions used by the Bayes-factor tests.
//!
//! Everything here works with natural logarithms so that marginal
//! likelihoods for tens of thousands of trials stay representable.

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// Maximum continued-fraction terms before [`ln_beta_reg`] gives up.
const CF_MAX_ITER: usize = 200_000;
const CF_EPS: f64 = 1e-16;
const CF_TINY: f64 = 1e-300;

/// Natural log of the gamma function for `x > 0`.
///
/// Uses the asymptotic Stirling series once `x >= 15`, shifting smaller
/// arguments upward with the recurrence `Γ(x+1) = xΓ(x)`. Relative accuracy
/// is close to machine precision across the positive axis.
pub fn ln_gamma(x: f64) -> f64 {
    if x.is_nan() || x <= 0.0 {
        return f64::NAN;
    }
    if x.is_infinite() {
        return f64::INFINITY;
    }
    if x < 15.0 {
        // Γ(x) = Γ(x + m) / (x (x+1) ... (x+m-1))
        let mut shift = 1.0;
        let mut z = x;
        while z < 15.0 {
            shift *= z;
            z += 1.0;
        }
        return stirling(z) - shift.ln();
    }
    stirling(x)
}

fn stirling(x: f64) -> f64 {
    // Bernoulli-number series, truncated where terms drop below 1e-17 for x >= 15.
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = inv
        * (1.0 / 12.0
            - inv2
                * (1.0 / 360.0
                    - inv2
                        * (1.0 / 1260.0
                            - inv2 * (1.0 / 1680.0 - inv2 * (1.0 / 1188.0 - inv2 * (691.0 / 360_360.0))))));
    (x - 0.5) * x.ln() - x + HALF_LN_2PI + series
}

/// `ln B(a, b) = lnΓ(a) + lnΓ(b) − lnΓ(a + b)`, bitwise symmetric in `a, b`.
pub fn ln_beta(a: f64, b: f64) -> f64 {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    ln_gamma(lo) + ln_gamma(hi) - ln_gamma(a + b)
}

/// Natural log of the regularized incomplete beta function `I_x(a, b)`.
///
/// Evaluated with the Lentz continued fraction on whichever tail converges
/// fastest; the complementary tail is folded back through `ln_1p` so that
/// both `I ≈ 0` and `I ≈ 1` keep full relative accuracy in log space.
///
/// Returns `None` if the continued fraction fails to converge.
pub fn ln_beta_reg(a: f64, b: f64, x: f64) -> Option<f64> {
    if !(a > 0.0 && b > 0.0) || x.is_nan() {
        return None;
    }
    if x <= 0.0 {
        return Some(f64::NEG_INFINITY);
    }
    if x >= 1.0 {
        return Some(0.0);
    }
    if x < (a + 1.0) / (a + b + 2.0) {
        ln_beta_reg_direct(a, b, x)
    } else {
        let ln_tail = ln_beta_reg_direct(b, a, 1.0 - x)?;
        Some(ln_1m_exp(ln_tail))
    }
}

/// `ln(1 − e^v)` for `v <= 0`, accurate at both ends.
pub fn ln_1m_exp(v: f64) -> f64 {
    if v > -std::f64::consts::LN_2 {
        (-v.exp_m1()).ln()
    } else {
        (-v.exp()).ln_1p()
    }
}

/// `ln(e^a + e^b)` without overflow.
pub fn ln_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

fn ln_beta_reg_direct(a: f64, b: f64, x: f64) -> Option<f64> {
    let ln_front = a * x.ln() + b * (-x).ln_1p() - ln_beta(a, b) - a.ln();
    let cf = beta_continued_fraction(a, b, x)?;
    Some(ln_front + cf.ln())
}

// Modified Lentz evaluation of the incomplete-beta continued fraction.
fn beta_continued_fraction(a: f64, b: f64, x: f64) -> Option<f64> {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < CF_TINY {
        d = CF_TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=CF_MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;

        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < CF_TINY {
            d = CF_TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < CF_TINY {
            c = CF_TINY;
        }
        d = 1.0 / d;
        h *= d * c;

        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < CF_TINY {
            d = CF_TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < CF_TINY {
            c = CF_TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < CF_EPS {
            return Some(h);
        }
    }
    None
}

/// `ln C(n, k)`.
pub fn ln_choose(n: u64, k: u64) -> f64 {
    debug_assert!(k <= n);
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}
