//! Scalar distribution functions and a 1-D maximizer.
//!
//! Thin wrappers around `statrs`' error-function kernels, plus the two
//! closed-form quantiles used by the transformation suite and a Brent-style
//! derivative-free maximizer used by the latent-correlation estimators.

use statrs::function::erf;

const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Standard normal CDF.
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * erf::erfc(-x / SQRT_2)
}

/// Standard normal density.
pub fn norm_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Standard normal quantile. `p` must lie in (0, 1); the endpoints map to
/// the corresponding infinities.
pub fn norm_inv_cdf(p: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&p));
    -SQRT_2 * erf::erfc_inv(2.0 * p)
}

/// Φ(b) − Φ(a) for a ≤ b, evaluated on whichever tail loses less precision.
pub fn norm_cdf_diff(a: f64, b: f64) -> f64 {
    debug_assert!(a <= b);
    if a + b > 0.0 {
        // Both bounds in the upper region: difference of upper tails.
        0.5 * (erf::erfc(a / SQRT_2) - erf::erfc(b / SQRT_2))
    } else {
        0.5 * (erf::erfc(-b / SQRT_2) - erf::erfc(-a / SQRT_2))
    }
}

/// Quantile of Gamma(shape = 1/2, scale = 1).
///
/// Gamma(1/2, 1) is χ²₁/2, so the quantile reduces to the square of a
/// normal quantile: F⁻¹(u) = Φ⁻¹((1+u)/2)² / 2.
pub fn gamma_half_inv_cdf(u: f64) -> f64 {
    debug_assert!((0.0..1.0).contains(&u));
    let z = norm_inv_cdf(0.5 * (1.0 + u));
    0.5 * z * z
}

/// Quantile of Pareto(shape = a, scale = 1): (1−u)^(−1/a).
pub fn pareto_inv_cdf(u: f64, shape: f64) -> f64 {
    debug_assert!((0.0..1.0).contains(&u));
    (1.0 - u).powf(-1.0 / shape)
}

/// Maximize a 1-D function on `[lo, hi]` by golden-section search with
/// successive parabolic interpolation (Brent's method, sign-flipped).
///
/// Returns `(argmax, max)`. `tol` is the absolute tolerance on the argument.
/// The function must be finite on the interval; unimodality gives the global
/// maximum, otherwise a local one — callers bracket with a coarse scan first.
pub fn brent_max<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    debug_assert!(lo < hi);
    const GOLD: f64 = 0.381_966_011_250_105_1; // (3 − √5)/2
    let mut a = lo;
    let mut b = hi;
    let mut x = a + GOLD * (b - a);
    let mut w = x;
    let mut v = x;
    let mut fx = f(x);
    let mut fw = fx;
    let mut fv = fx;
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;

    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let tol1 = tol.max(1e-12 * x.abs());
        let tol2 = 2.0 * tol1;
        if (x - m).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut use_golden = true;
        if e.abs() > tol1 {
            // Fit a parabola through (v,fv), (w,fw), (x,fx).
            let r = (x - w) * (fx - fv);
            let q0 = (x - v) * (fx - fw);
            let mut p = (x - v) * q0 - (x - w) * r;
            let mut q = 2.0 * (q0 - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let e_old = e;
            e = d;
            if p.abs() < (0.5 * q * e_old).abs() && p > q * (a - x) && p < q * (b - x) {
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = if m > x { tol1 } else { -tol1 };
                }
                use_golden = false;
            }
        }
        if use_golden {
            e = if x < m { b - x } else { a - x };
            d = GOLD * e;
        }
        let u = if d.abs() >= tol1 {
            x + d
        } else if d > 0.0 {
            x + tol1
        } else {
            x - tol1
        };
        let fu = f(u);
        if fu >= fx {
            if u < x {
                b = x;
            } else {
                a = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu >= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu >= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    (x, fx)
}
