//! Positivity of the extension and the admissible source separation.

use crate::nevanlinna::{krein_denominator, limit_at_zero, Channel, ExtensionConfig, NevanlinnaError, SpectralPoint};
use crate::real::EULER_GAMMA;

/// Relative band around `x_b` reported as [`Verdict::Boundary`].
pub const BOUNDARY_BAND: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Positive,
    NegativeEigenvalue,
    Boundary,
}

/// Interval `[lo, hi]` on the negative axis with `κ − σ(lo) > 0 > κ − σ(hi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositivityReport {
    pub verdict: Verdict,
    pub pole_mu: Option<f64>,
    pub bracket: Option<Bracket>,
    /// Separation radius; `None` for channels without one.
    pub x_b: Option<f64>,
}

/// Boundary radius from bisection, with its bracket in `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryRoot {
    pub x_b: f64,
    pub bracket: (f64, f64),
    /// `κ − σ(0⁻)` at the returned radius.
    pub residual: f64,
}

/// `x_b` such that `lim_{μ→0⁻} (κ − σ(μ)) = 0`.
///
/// Closed form `e^{1−γ}/√κ̃` for the scalar minus channel; bisection for the vector minus channels.
pub fn x_boundary(kappa_tilde: f64, channel: Channel) -> Result<f64, NevanlinnaError> {
    match channel {
        Channel::TwoSourceScalarMinus => {
            ExtensionConfig::new(kappa_tilde, 1.0, channel)?;
            Ok((1.0 - EULER_GAMMA).exp() / kappa_tilde.sqrt())
        }
        Channel::VectorVMinus | Channel::VectorUMinus => Ok(x_boundary_bisection(kappa_tilde, channel)?.x_b),
        other => Err(NevanlinnaError::UnsupportedChannel(other)),
    }
}

/// Root of the `μ → 0⁻` limit of `κ − σ` in `x`, by bisection on `ln x`.
pub fn x_boundary_bisection(kappa_tilde: f64, channel: Channel) -> Result<BoundaryRoot, NevanlinnaError> {
    if !channel.is_minus() {
        return Err(NevanlinnaError::UnsupportedChannel(channel));
    }
    let base = ExtensionConfig::new(kappa_tilde, 1.0, channel)?;
    let f = |u: f64| limit_at_zero(&base.with_x(u.exp())?);
    // The limit decreases in x: positive for small separations, negative for large ones.
    let centre = -0.5 * kappa_tilde.ln();
    let (mut lo, mut hi) = (centre - 1.0, centre + 1.0);
    while f(lo)? <= 0.0 {
        lo -= 2.0 * (hi - lo);
    }
    while f(hi)? >= 0.0 {
        hi += 2.0 * (hi - lo);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x_b = (0.5 * (lo + hi)).exp();
    let residual = limit_at_zero(&base.with_x(x_b)?)?;
    Ok(BoundaryRoot { x_b, bracket: (lo.exp(), hi.exp()), residual })
}

fn den(mu: f64, cfg: &ExtensionConfig) -> f64 {
    match SpectralPoint::negative(mu) {
        Ok(p) => krein_denominator(p, cfg).map(|d| d.re).unwrap_or(f64::NAN),
        Err(_) => f64::NAN,
    }
}

/// Unique zero of `κ − σ` on the negative axis, bisected in `ln(−μ)`.
///
/// `κ − σ` is decreasing in `μ`, so a sign change certifies a single root.
pub fn find_pole(cfg: &ExtensionConfig) -> Option<(f64, Bracket)> {
    let scale = cfg.kappa_tilde * 1e6 * (1.0f64).max(1.0 / (cfg.kappa_tilde * cfg.x * cfg.x));
    let mut lo = -scale;
    let mut hi = -cfg.kappa_tilde * 1e-8;
    let mut tries = 0;
    while den(lo, cfg) <= 0.0 {
        lo *= 1e3;
        tries += 1;
        if tries > 60 || !lo.is_finite() {
            return None;
        }
    }
    tries = 0;
    while den(hi, cfg) >= 0.0 {
        hi *= 1e-3;
        tries += 1;
        if tries > 90 || hi == 0.0 {
            return None;
        }
    }
    let (mut a, mut b) = ((-lo).ln(), (-hi).ln());
    // Stop at a log-width where the sign of κ − σ is still resolved above rounding.
    while a - b > 1e-13 {
        let m = 0.5 * (a + b);
        if m >= a || m <= b {
            break;
        }
        if den(-m.exp(), cfg) > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    let bracket = Bracket { lo: -a.exp(), hi: -b.exp() };
    let pole = if den(bracket.lo, cfg).abs() < den(bracket.hi, cfg).abs() { bracket.lo } else { bracket.hi };
    Some((pole, bracket))
}

/// Positivity verdict for the extension described by `cfg`.
pub fn classify(cfg: &ExtensionConfig) -> PositivityReport {
    let neg = |pole: Option<(f64, Bracket)>, x_b| PositivityReport {
        verdict: Verdict::NegativeEigenvalue,
        pole_mu: pole.map(|p| p.0),
        bracket: pole.map(|p| p.1),
        x_b,
    };
    match cfg.channel {
        Channel::SingleSourceScalar => {
            let k = cfg.kappa_tilde;
            neg(Some((-k, Bracket { lo: -k, hi: -k })), None)
        }
        Channel::VectorVPlus | Channel::VectorUPlus => neg(find_pole(cfg), None),
        ch => {
            let x_b = x_boundary(cfg.kappa_tilde, ch).ok();
            let xb = x_b.unwrap_or(f64::NAN);
            if (cfg.x - xb).abs() <= BOUNDARY_BAND * xb {
                return PositivityReport { verdict: Verdict::Boundary, pole_mu: None, bracket: None, x_b };
            }
            if cfg.x < xb {
                return PositivityReport { verdict: Verdict::Positive, pole_mu: None, bracket: None, x_b };
            }
            neg(find_pole(cfg), x_b)
        }
    }
}
