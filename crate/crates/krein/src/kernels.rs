//! Coordinate-space kernel of `R_μ v`, closed-form inner products, and the
//! Krein resolvent as a quadratic form on radial test functions.
//!
//! Momentum-space conventions: `v(p) = p^{−1/2}` for one source and
//! `v_−(p) = p^{−1/2}(1 − e^{ip·x})/√2` for the antisymmetric pair. Angular
//! averages reduce `|1 − e^{ip·x}|²/2` to `1 − sin(px)/(px)`.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64 as C;

use crate::nevanlinna::{
    krein_denominator, one_minus_sinc, Channel, ExtensionConfig, NevanlinnaError, SpectralPoint,
};
use crate::point::Side;
use crate::quad::{integrate_oscillatory, integrate_semi_infinite, Oscillator, OscillatorySpec, QuadConfig, QuadError};

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum KernelError {
    #[error("domain error: {0}")]
    Domain(&'static str),
    #[error("κ − σ(μ) vanishes at μ = {0}")]
    Pole(C),
    #[error(transparent)]
    Nevanlinna(#[from] NevanlinnaError),
    #[error(transparent)]
    Quadrature(#[from] QuadError<f64>),
    #[error(transparent)]
    ComplexQuadrature(#[from] QuadError<C>),
}

/// Radial momentum profile `f(|p|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadialTestFunction {
    /// `e^{−(p/width)²}`.
    Gaussian { width: f64 },
    /// `(1 + p²)^{−power/2}`, `power ≥ 2`.
    Rational { power: u32 },
}

impl RadialTestFunction {
    pub fn gaussian(width: f64) -> Result<Self, KernelError> {
        if !(width > 0.0) || !width.is_finite() {
            return Err(KernelError::Domain("gaussian width must be positive"));
        }
        Ok(Self::Gaussian { width })
    }

    pub fn rational(power: u32) -> Result<Self, KernelError> {
        if power < 2 {
            return Err(KernelError::Domain("rational power must be at least 2"));
        }
        Ok(Self::Rational { power })
    }

    pub fn eval(&self, p: f64) -> f64 {
        match *self {
            Self::Gaussian { width } => (-(p / width).powi(2)).exp(),
            Self::Rational { power } => (1.0 + p * p).powf(-0.5 * power as f64),
        }
    }

    /// `‖f‖² = 4π ∫ p² f² dp`.
    pub fn norm_sq(&self) -> f64 {
        match *self {
            Self::Gaussian { width } => 4.0 * PI * PI.sqrt() * width.powi(3) / (8.0 * SQRT_2),
            Self::Rational { power } => {
                // 4π ∫ p²(1+p²)^{−n} dp = 2π B(3/2, n − 3/2)
                let n = power as f64;
                2.0 * PI * beta(1.5, n - 1.5)
            }
        }
    }
}

fn beta(a: f64, b: f64) -> f64 {
    // Only half-integer/integer arguments occur; Γ via the recurrence from Γ(1/2), Γ(1).
    fn gamma(x: f64) -> f64 {
        let mut g = if (x - x.floor()).abs() > 0.25 { PI.sqrt() } else { 1.0 };
        let mut t = if (x - x.floor()).abs() > 0.25 { 0.5 } else { 1.0 };
        while t < x - 0.25 {
            g *= t;
            t += 1.0;
        }
        g
    }
    gamma(a) * gamma(b) / gamma(a + b)
}

fn quad_cfg() -> QuadConfig<f64> {
    QuadConfig::with_tol(1e-12)
}

fn check_negative(mu: f64) -> Result<f64, KernelError> {
    if !(mu < 0.0) || !mu.is_finite() {
        return Err(KernelError::Domain("mu must be negative and finite"));
    }
    Ok((-mu).sqrt())
}

/// `(R_μ v)(r)` for the single-source vector `v(p) = p^{−1/2}`.
pub fn r_v_coordinate(mu: f64, r: f64) -> Result<f64, KernelError> {
    r_v_coordinate_with(mu, r, &quad_cfg())
}

/// [`r_v_coordinate`] with explicit quadrature settings.
pub fn r_v_coordinate_with(mu: f64, r: f64, quad: &QuadConfig<f64>) -> Result<f64, KernelError> {
    check_negative(mu)?;
    if !(r > 0.0) || !r.is_finite() {
        return Err(KernelError::Domain("r must be positive"));
    }
    let c = -mu * r * r;
    let spec = OscillatorySpec::new(1.0, Oscillator::Sin, move |s: f64| s.sqrt() / (s * s + c));
    let q = integrate_oscillatory(&spec, quad)?;
    Ok(4.0 * PI / ((2.0 * PI).powf(1.5) * r.sqrt()) * q.value.re)
}

/// `(R_μ v_−, v_−)`-type inner product `2π²(1 − e^{−mx})/(2m)`, `m = √−μ`.
pub fn inner_p(mu: f64, x: f64) -> Result<f64, KernelError> {
    let m = check_negative(mu)?;
    check_x(x)?;
    Ok(2.0 * PI * PI * (-(-m * x).exp_m1()) / (2.0 * m))
}

/// Companion inner product with the `1/p` weight,
/// `2π²[1/(2m³) − 1/(m⁴x) + e^{−mx}/(m⁴x) + e^{−mx}/(2m³)]`.
pub fn inner_inv_p(mu: f64, x: f64) -> Result<f64, KernelError> {
    let m = check_negative(mu)?;
    check_x(x)?;
    let y = m * x;
    // Bracket times m³: 1/2 + e^{−y}/2 − (1 − e^{−y})/y, small-y series where it cancels.
    let b = if y < 0.5 {
        // Σ_{k≥2} (−1)^k [1/(2·k!) − 1/(k+1)!] y^k
        let mut sum = 0.0;
        let mut pw = y * y;
        let mut fact = 2.0;
        for k in 2..22 {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sum += sign * (0.5 - 1.0 / (k + 1) as f64) / fact * pw;
            pw *= y;
            fact *= (k + 1) as f64;
        }
        sum
    } else {
        0.5 + 0.5 * (-y).exp() + (-y).exp_m1() / y
    };
    Ok(2.0 * PI * PI * b / (m * m * m))
}

fn check_x(x: f64) -> Result<(), KernelError> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(KernelError::Domain("x must be positive"));
    }
    Ok(())
}

fn resolvent_point(mu: SpectralPoint) -> Result<C, KernelError> {
    if mu.side != Side::OffAxis && !mu.is_negative_real() {
        return Err(KernelError::Domain("krein_form needs μ off the positive half-axis"));
    }
    if mu.mu.norm() == 0.0 {
        return Err(KernelError::Domain("μ = 0"));
    }
    Ok(mu.mu)
}

/// Free form `(f, R_μ f) = 4π ∫ p² f²/(p² − μ) dp`.
pub fn free_form(mu: SpectralPoint, f: &RadialTestFunction) -> Result<C, KernelError> {
    free_form_with(mu, f, &quad_cfg())
}

fn free_form_with(mu: SpectralPoint, f: &RadialTestFunction, quad: &QuadConfig<f64>) -> Result<C, KernelError> {
    let m = resolvent_point(mu)?;
    let q = integrate_semi_infinite(|p: f64| C::from(4.0 * PI * p * p * f.eval(p).powi(2)) / (p * p - m), 0.0, quad)?;
    Ok(q.value)
}

/// `(R_μ̄ v, f)` for the source vector of the channel.
pub fn source_overlap(mu: SpectralPoint, f: &RadialTestFunction, cfg: &ExtensionConfig) -> Result<C, KernelError> {
    source_overlap_with(mu, f, cfg, &quad_cfg())
}

fn source_overlap_with(mu: SpectralPoint, f: &RadialTestFunction, cfg: &ExtensionConfig, quad: &QuadConfig<f64>) -> Result<C, KernelError> {
    let m = resolvent_point(mu)?;
    let x = cfg.x;
    let weight: Box<dyn Fn(f64) -> f64> = match cfg.channel {
        Channel::SingleSourceScalar => Box::new(|_p| 1.0),
        Channel::TwoSourceScalarMinus => Box::new(move |p| one_minus_sinc(p * x) / SQRT_2),
        other => return Err(NevanlinnaError::UnsupportedChannel(other).into()),
    };
    let q = integrate_semi_infinite(
        |p: f64| C::from(4.0 * PI * p * p.sqrt() * weight(p) * f.eval(p)) / (p * p - m),
        0.0,
        quad,
    )?;
    Ok(q.value)
}

/// `(f, R^κ_μ f) = (f, R_μ f) + (f, R_μ v)(R_μ̄ v, f)/(κ − σ(μ))` for real radial `f`.
pub fn krein_form(mu: SpectralPoint, f: &RadialTestFunction, cfg: &ExtensionConfig) -> Result<C, KernelError> {
    krein_form_with(mu, f, cfg, &quad_cfg())
}

/// [`krein_form`] with explicit quadrature settings.
pub fn krein_form_with(mu: SpectralPoint, f: &RadialTestFunction, cfg: &ExtensionConfig, quad: &QuadConfig<f64>) -> Result<C, KernelError> {
    let free = free_form_with(mu, f, quad)?;
    let c = source_overlap_with(mu, f, cfg, quad)?;
    let den = krein_denominator(mu, cfg)?;
    if den.norm() == 0.0 {
        return Err(KernelError::Pole(mu.mu));
    }
    Ok(free + c * c / den)
}

/// Spectral density `(1/2πi)[1/(κ − σ(λ+i0)) − 1/(κ − σ(λ−i0))]·λ^{1/2}` before taking the real part.
pub fn sqrt_spectral_weight_complex(lambda: f64, cfg: &ExtensionConfig) -> Result<C, KernelError> {
    if !cfg.channel.is_minus() {
        return Err(NevanlinnaError::UnsupportedChannel(cfg.channel).into());
    }
    let up = krein_denominator(SpectralPoint::above(lambda).map_err(|_| KernelError::Domain("lambda must be positive"))?, cfg)?;
    let down = krein_denominator(SpectralPoint::below(lambda).map_err(|_| KernelError::Domain("lambda must be positive"))?, cfg)?;
    Ok((up.inv() - down.inv()) / C::new(0.0, 2.0 * PI) * lambda.sqrt())
}

/// Real spectral density multiplying the rank-one kernel in `L_κ^{1/2}`.
pub fn sqrt_spectral_weight(lambda: f64, cfg: &ExtensionConfig) -> Result<f64, KernelError> {
    Ok(sqrt_spectral_weight_complex(lambda, cfg)?.re)
}
