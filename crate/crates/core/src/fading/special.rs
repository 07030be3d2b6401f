//! Special functions the likelihoods need beyond what `statrs` provides.

pub use statrs::function::gamma::{digamma, ln_gamma};

/// Trigamma function for `x > 0`: recurrence up to `x >= 10`, then the
/// asymptotic series.
pub fn trigamma(mut x: f64) -> f64 {
    let mut acc = 0.0;
    while x < 10.0 {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    acc + inv
        + inv2 / 2.0
        + inv * inv2
            * (1.0 / 6.0
                + inv2 * (-1.0 / 30.0 + inv2 * (1.0 / 42.0 + inv2 * (-1.0 / 30.0 + inv2 * 5.0 / 66.0))))
}

/// `ln I0(x)` for `x >= 0`, with `I0` the modified Bessel function of the
/// first kind. Power series up to 30, asymptotic expansion above.
pub fn ln_bessel_i0(x: f64) -> f64 {
    let x = x.abs();
    if x <= 30.0 {
        let q = x * x / 4.0;
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 1.0;
        loop {
            term *= q / (k * k);
            sum += term;
            if term < sum * 1e-17 {
                break;
            }
            k += 1.0;
        }
        sum.ln()
    } else {
        // I0(x) ~ e^x / sqrt(2 pi x) * sum_k ((2k-1)!!)^2 / (k! (8x)^k)
        let r = 1.0 / (8.0 * x);
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..12 {
            let odd = (2 * k - 1) as f64;
            term *= odd * odd * r / k as f64;
            sum += term;
        }
        x - 0.5 * (2.0 * std::f64::consts::PI * x).ln() + sum.ln()
    }
}
