//! Complex scalar helpers: a cancellation-safe expm1 and the principal
//! exponential integral E1, used for the analytic tails of truncated
//! contour integrals.

use num_complex::Complex64;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// exp(z) - 1 without cancellation for small |z|.
pub fn cexpm1(z: Complex64) -> Complex64 {
    if z.norm() > 0.5 {
        return z.exp() - 1.0;
    }
    // Taylor sum; |z| <= 0.5 converges in a handful of terms.
    let mut term = z;
    let mut sum = z;
    for n in 2..40 {
        term = term * z / n as f64;
        sum += term;
        if term.norm() <= 1e-18 * sum.norm() {
            break;
        }
    }
    sum
}

/// Principal-branch exponential integral E1(z) for |arg z| < pi, z != 0.
///
/// Power series near the origin, modified-Lentz continued fraction
/// elsewhere. Accurate to ~1e-14 relative on the arguments used here
/// (never close to the negative real axis at large modulus).
pub fn e1(z: Complex64) -> Complex64 {
    debug_assert!(z.norm() > 0.0, "E1 undefined at 0");
    if z.norm() <= 6.0 {
        // E1(z) = -gamma - ln z + sum_{k>=1} (-1)^{k+1} z^k / (k k!)
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = Complex64::new(0.0, 0.0);
        for k in 1..120 {
            term = term * z / k as f64;
            let contrib = term / k as f64;
            if k % 2 == 1 {
                sum += contrib;
            } else {
                sum -= contrib;
            }
            if contrib.norm() <= 1e-18 * (1.0 + sum.norm()) {
                break;
            }
        }
        -EULER_GAMMA - z.ln() + sum
    } else {
        // E1(z) = exp(-z) * 1/(z+1- 1/(z+3- 4/(z+5- 9/(z+7- ...))))
        let tiny = Complex64::new(1e-290, 0.0);
        let mut b = z + 1.0;
        let mut c = Complex64::new(1e290, 0.0);
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..400 {
            let a = -((i * i) as f64);
            b += 2.0;
            d = a * d + b;
            if d.norm() < 1e-290 {
                d = tiny;
            }
            c = b + a / c;
            if c.norm() < 1e-290 {
                c = tiny;
            }
            d = 1.0 / d;
            let del = d * c;
            h *= del;
            if (del - 1.0).norm() < 1e-15 {
                break;
            }
        }
        (-z).exp() * h
    }
}
