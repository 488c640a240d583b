//! Sine and cosine integrals on the real and imaginary rays, and the scaled
//! exponential integrals used by the closed forms of the Nevanlinna functions.
//!
//! Conventions:
//! - `Si(z) = ∫₀^z sin t / t dt`, `Cin(z) = ∫₀^z (1 − cos t)/t dt` (both entire).
//! - On the imaginary ray `Si(iy) = i·Shi(y)` and `Cin(iy) = −Chin(y)` with
//!   `Chin(y) = ∫₀^y (cosh s − 1)/s ds`.
//! - `exp_e1(z) = e^z E1(z)` on the principal sheet, cut along the negative axis.

use num_complex::Complex;

use crate::point::{Side, SpectralPoint};
use crate::real::{euler_gamma, Real};

/// Magnitude at which the Taylor branches hand over to the large-argument branches.
pub const SERIES_SWITCH: f64 = 6.0;

/// Default magnitude bound on the real ray.
pub const REAL_RAY_LIMIT: f64 = 1.0e15;

const CF_MAX_ITER: usize = 20_000;

/// Ray on which a `RayPoint` lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Ray {
    PositiveReal,
    PositiveImaginary,
}

/// Point `r` or `i·r` with `r ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayPoint<T> {
    pub magnitude: T,
    pub ray: Ray,
}

impl<T: Real> RayPoint<T> {
    pub fn real(magnitude: T) -> Self {
        Self { magnitude, ray: Ray::PositiveReal }
    }

    pub fn imaginary(magnitude: T) -> Self {
        Self { magnitude, ray: Ray::PositiveImaginary }
    }

    /// The point as a complex number.
    pub fn to_complex(self) -> Complex<T> {
        match self.ray {
            Ray::PositiveReal => Complex::new(self.magnitude, T::zero()),
            Ray::PositiveImaginary => Complex::new(T::zero(), self.magnitude),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum SpecfunError {
    #[error("argument magnitude {magnitude:e} exceeds the supported limit {limit:e}")]
    Range { magnitude: f64, limit: f64 },
    #[error("argument outside the function domain: {0}")]
    Domain(&'static str),
}

/// Largest supported magnitude for the given ray.
pub fn ray_limit<T: Real>(ray: Ray) -> T {
    match ray {
        Ray::PositiveReal => T::lit(REAL_RAY_LIMIT),
        Ray::PositiveImaginary => T::max_value().ln() - T::one(),
    }
}

fn check<T: Real>(z: RayPoint<T>, limit: T) -> Result<(), SpecfunError> {
    if !(z.magnitude >= T::zero()) || !z.magnitude.is_finite() {
        return Err(SpecfunError::Domain("magnitude must be finite and nonnegative"));
    }
    if z.magnitude > limit {
        return Err(SpecfunError::Range {
            magnitude: z.magnitude.to_f64().unwrap_or(f64::INFINITY),
            limit: limit.to_f64().unwrap_or(f64::INFINITY),
        });
    }
    Ok(())
}

/// Sine integral on a ray.
pub fn si<T: Real>(z: RayPoint<T>) -> Result<Complex<T>, SpecfunError> {
    si_bounded(z, ray_limit(z.ray))
}

/// Sine integral with an explicit magnitude bound.
pub fn si_bounded<T: Real>(z: RayPoint<T>, limit: T) -> Result<Complex<T>, SpecfunError> {
    check(z, limit)?;
    let r = z.magnitude;
    let small = r <= T::lit(SERIES_SWITCH);
    Ok(match z.ray {
        Ray::PositiveReal => {
            let v = if small { si_series(r) } else { si_large(r) };
            Complex::new(v, T::zero())
        }
        Ray::PositiveImaginary => {
            let v = if small { shi_series(r) } else { shi_large(r) };
            Complex::new(T::zero(), v)
        }
    })
}

/// Entire cosine integral `Cin` on a ray.
pub fn cin<T: Real>(z: RayPoint<T>) -> Result<Complex<T>, SpecfunError> {
    cin_bounded(z, ray_limit(z.ray))
}

/// `Cin` with an explicit magnitude bound.
pub fn cin_bounded<T: Real>(z: RayPoint<T>, limit: T) -> Result<Complex<T>, SpecfunError> {
    check(z, limit)?;
    let r = z.magnitude;
    let small = r <= T::lit(SERIES_SWITCH);
    let v = match z.ray {
        Ray::PositiveReal => {
            if small {
                cin_series(r)
            } else {
                cin_large(r)
            }
        }
        Ray::PositiveImaginary => {
            if small {
                -chin_series(r)
            } else {
                -chin_large(r)
            }
        }
    };
    Ok(Complex::new(v, T::zero()))
}

/// `γ + ½ Ln(−μx²) − Cin(√μ x)` for `μ` on the negative axis or on a cut side.
pub fn ci_sym<T: Real>(mu: SpectralPoint<T>, x: T) -> Result<Complex<T>, SpecfunError> {
    if !(x > T::zero()) {
        return Err(SpecfunError::Domain("x must be positive"));
    }
    let g = euler_gamma::<T>();
    let half_pi = T::FRAC_PI_2();
    match mu.side {
        Side::OffAxis => {
            if mu.mu.im != T::zero() {
                return Err(SpecfunError::Domain("only the negative axis and the cut are supported"));
            }
            if mu.mu.re == T::zero() {
                return Err(SpecfunError::Domain("logarithmic singularity at μ = 0"));
            }
            if mu.mu.re > T::zero() {
                return Err(SpecfunError::Domain("positive μ needs a cut side"));
            }
            let y = (-mu.mu.re).sqrt() * x;
            let c = cin(RayPoint::imaginary(y))?;
            Ok(Complex::new(g + y.ln(), T::zero()) - c)
        }
        Side::AboveCut | Side::BelowCut => {
            let t = mu.mu.re.sqrt() * x;
            let c = cin(RayPoint::real(t))?;
            let v = Complex::new(g + t.ln() - c.re, -half_pi);
            Ok(if mu.side == Side::AboveCut { v } else { v.conj() })
        }
    }
}

/// Taylor series of `Si` on the real axis.
pub fn si_series<T: Real>(x: T) -> T {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut n = 0usize;
    loop {
        let k = T::count(2 * n + 2);
        let k1 = T::count(2 * n + 3);
        term = -term * x2 / (k * k1);
        let add = term / k1;
        sum = sum + add;
        n += 1;
        if add.abs() <= T::epsilon() * sum.abs() * T::lit(0.1) || n > 200 {
            return sum;
        }
    }
}

/// Taylor series of `Cin` on the real axis.
pub fn cin_series<T: Real>(x: T) -> T {
    let x2 = x * x;
    let mut term = T::one();
    let mut sum = T::zero();
    let mut n = 1usize;
    loop {
        let k = T::count(2 * n);
        term = -term * x2 / (k * T::count(2 * n - 1));
        let add = -term / k;
        sum = sum + add;
        if add.abs() <= T::epsilon() * sum.abs() * T::lit(0.1) || n > 200 {
            return sum;
        }
        n += 1;
    }
}

/// Taylor series of `Shi` (all terms positive).
pub fn shi_series<T: Real>(y: T) -> T {
    let y2 = y * y;
    let mut term = y;
    let mut sum = y;
    let mut n = 0usize;
    loop {
        let k1 = T::count(2 * n + 3);
        term = term * y2 / (T::count(2 * n + 2) * k1);
        let add = term / k1;
        sum = sum + add;
        n += 1;
        if add <= T::epsilon() * sum * T::lit(0.1) || n > 2000 {
            return sum;
        }
    }
}

/// Taylor series of `Chin` (all terms positive).
pub fn chin_series<T: Real>(y: T) -> T {
    let y2 = y * y;
    let mut term = T::one();
    let mut sum = T::zero();
    let mut n = 1usize;
    loop {
        let k = T::count(2 * n);
        term = term * y2 / (k * T::count(2 * n - 1));
        let add = term / k;
        sum = sum + add;
        if add <= T::epsilon() * sum * T::lit(0.1) || n > 2000 {
            return sum;
        }
        n += 1;
    }
}

/// Auxiliary functions `f, g` with `Si = π/2 − f cos − g sin`, `Ci = f sin − g cos`.
pub fn aux_fg<T: Real>(x: T) -> (T, T) {
    let h = exp_e1(Complex::new(T::zero(), x));
    (-h.im, h.re)
}

/// `Si` on the real axis from the auxiliary functions.
pub fn si_large<T: Real>(x: T) -> T {
    let (f, g) = aux_fg(x);
    let (s, c) = x.sin_cos();
    T::FRAC_PI_2() - f * c - g * s
}

/// `Cin` on the real axis from the auxiliary functions.
pub fn cin_large<T: Real>(x: T) -> T {
    let (f, g) = aux_fg(x);
    let (s, c) = x.sin_cos();
    let ci = f * s - g * c;
    euler_gamma::<T>() + x.ln() - ci
}

/// `Shi(y) = (Ei(y) + E1(y))/2`.
pub fn shi_large<T: Real>(y: T) -> T {
    let ei = y.exp() * exp_ei_real(y);
    let e1 = (-y).exp() * exp_e1_real(y);
    T::lit(0.5) * (ei + e1)
}

/// `Chin(y) = (Ei(y) − E1(y))/2 − γ − ln y`.
pub fn chin_large<T: Real>(y: T) -> T {
    let ei = y.exp() * exp_ei_real(y);
    let e1 = (-y).exp() * exp_e1_real(y);
    T::lit(0.5) * (ei - e1) - euler_gamma::<T>() - y.ln()
}

/// `e^{−a} Ei(a)` for real `a > 0`.
pub fn exp_ei_real<T: Real>(a: T) -> T {
    if a <= T::lit(40.0) {
        let mut term = T::one();
        let mut sum = T::zero();
        let mut k = 1usize;
        loop {
            let kk = T::count(k);
            term = term * a / kk;
            let add = term / kk;
            sum = sum + add;
            if add <= T::epsilon() * sum * T::lit(0.1) || k > 1000 {
                break;
            }
            k += 1;
        }
        (-a).exp() * (euler_gamma::<T>() + a.ln() + sum)
    } else {
        // Divergent asymptotic series, truncated at its smallest term.
        let mut term = T::one();
        let mut sum = T::one();
        let mut k = 1usize;
        loop {
            let next = term * T::count(k) / a;
            if next >= term || next <= T::epsilon() * sum * T::lit(0.1) {
                if next < term {
                    sum = sum + next;
                }
                break;
            }
            term = next;
            sum = sum + term;
            k += 1;
        }
        sum / a
    }
}

/// `e^{a} E1(a)` for real `a > 0`.
pub fn exp_e1_real<T: Real>(a: T) -> T {
    if a <= T::lit(1.5) {
        // E1(a) = −γ − ln a − Σ (−a)^k/(k·k!)
        let mut term = T::one();
        let mut sum = T::zero();
        let mut k = 1usize;
        loop {
            let kk = T::count(k);
            term = -term * a / kk;
            let add = term / kk;
            sum = sum + add;
            if add.abs() <= T::epsilon() * T::lit(0.01) || k > 200 {
                break;
            }
            k += 1;
        }
        a.exp() * (-euler_gamma::<T>() - a.ln() - sum)
    } else {
        exp_e1_cf(Complex::new(a, T::zero())).re
    }
}

/// `e^z E1(z)` on the principal sheet, `z ≠ 0`, `|arg z| < π`.
pub fn exp_e1<T: Real>(z: Complex<T>) -> Complex<T> {
    let r = z.norm();
    let near_negative_axis = z.re < T::zero() && z.im.abs() < -z.re;
    if r <= T::lit(2.0) || (near_negative_axis && r <= T::lit(40.0)) {
        exp_e1_series(z)
    } else if r > T::lit(40.0) {
        exp_e1_asymptotic(z)
    } else {
        exp_e1_cf(z)
    }
}

fn exp_e1_series<T: Real>(z: Complex<T>) -> Complex<T> {
    let mut term = Complex::new(T::one(), T::zero());
    let mut sum = Complex::new(T::zero(), T::zero());
    let mut k = 1usize;
    let scale = z.norm().exp();
    loop {
        let kk = T::count(k);
        term = -term * z / kk;
        let add = term / kk;
        sum = sum + add;
        if add.norm() <= T::epsilon() * T::lit(0.01) * scale.max(sum.norm()) || k > 2000 {
            break;
        }
        k += 1;
    }
    let e1 = -z.ln() - sum - euler_gamma::<T>();
    z.exp() * e1
}

fn exp_e1_asymptotic<T: Real>(z: Complex<T>) -> Complex<T> {
    // e^z E1(z) ~ (1/z) Σ (−1)^k k!/z^k
    let one = Complex::new(T::one(), T::zero());
    let mut term = one;
    let mut sum = one;
    let mut k = 1usize;
    loop {
        let next = -term * T::count(k) / z;
        if next.norm() >= term.norm() || next.norm() <= T::epsilon() * T::lit(0.1) * sum.norm() {
            if next.norm() < term.norm() {
                sum = sum + next;
            }
            break;
        }
        term = next;
        sum = sum + term;
        k += 1;
    }
    sum / z
}

/// Modified Lentz evaluation of `e^z E1(z) = 1/(z+1− 1/(z+3− 4/(z+5− …)))`.
fn exp_e1_cf<T: Real>(z: Complex<T>) -> Complex<T> {
    let tiny = T::min_positive_value().sqrt();
    let tiny_c = Complex::new(tiny, T::zero());
    let two = T::lit(2.0);
    let mut b = z + T::one();
    let mut f = b;
    if f.norm() == T::zero() {
        f = tiny_c;
    }
    let mut c = f;
    let mut d = Complex::new(T::zero(), T::zero());
    for n in 1..CF_MAX_ITER {
        let nn = T::count(n);
        let a = -(nn * nn);
        b = b + two;
        d = b + d * a;
        if d.norm() == T::zero() {
            d = tiny_c;
        }
        c = b + Complex::new(a, T::zero()) / c;
        if c.norm() == T::zero() {
            c = tiny_c;
        }
        d = d.inv();
        let delta = c * d;
        f = f * delta;
        if (delta - T::one()).norm() <= T::epsilon() {
            break;
        }
    }
    f.inv()
}

/// `e^{−a} Ei*(a)` for `Re a > 0`, where `Ei*(a) = −E1(−a) + iπ sgn(Im a)`
/// continues the real `Ei` off the positive axis from the upper and lower half-planes.
pub fn exp_ei_star<T: Real>(a: Complex<T>) -> Complex<T> {
    if a.im == T::zero() {
        return Complex::new(exp_ei_real(a.re), T::zero());
    }
    let s = if a.im > T::zero() { T::one() } else { -T::one() };
    let branch = Complex::new(T::zero(), s * T::PI()) * (-a).exp();
    if a.norm() > T::lit(40.0) {
        // Ei*(a) e^{−a} ~ (1/a) Σ k!/a^k + iπ sgn e^{−a}
        let one = Complex::new(T::one(), T::zero());
        let mut term = one;
        let mut sum = one;
        let mut k = 1usize;
        loop {
            let next = term * T::count(k) / a;
            if next.norm() >= term.norm() || next.norm() <= T::epsilon() * T::lit(0.1) * sum.norm() {
                if next.norm() < term.norm() {
                    sum = sum + next;
                }
                break;
            }
            term = next;
            sum = sum + term;
            k += 1;
        }
        return sum / a + branch;
    }
    -exp_e1(-a) + branch
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn series_small_values() {
        assert_relative_eq!(si_series(1.0_f64), 0.946_083_070_367_183_0, max_relative = 1e-15);
        assert_relative_eq!(cin_series(1.0_f64), 0.239_811_742_000_564_7, max_relative = 1e-14);
    }

    #[test]
    fn branches_meet_at_switch() {
        for &x in &[4.0_f64, 5.0, 6.0, 7.0, 8.0] {
            assert!((si_series(x) - si_large(x)).abs() < 1e-13, "si at {x}");
            assert!((cin_series(x) - cin_large(x)).abs() < 1e-13, "cin at {x}");
            assert!((shi_series(x) - shi_large(x)).abs() < 1e-12 * shi_series(x), "shi at {x}");
            assert!((chin_series(x) - chin_large(x)).abs() < 1e-12 * chin_series(x), "chin at {x}");
        }
    }

    #[test]
    fn generic_f32_instantiation() {
        let v = si(RayPoint::real(core::f32::consts::PI)).unwrap();
        assert!((v.re - 1.851_937_f32).abs() < 1e-5);
    }
}
