//! Nevanlinna functions σ of the one- and two-source extensions, their
//! derivatives, boundary gaps, and the limits at the spectral edge.
//!
//! Everything is expressed through `J(z) = 4π ∫₀^∞ sin s /(s² − z) ds` at `z = μx²`.
//! On the negative axis `J = 2π (P + Q)/a` with `a = √(−μ)·x`, `P = e^{−a}Ei*(a)`, `Q = e^{a}E1(a)`;
//! this is the sine/cosine-integral closed form written without its large cancellations.
//! Near `z = 0` a logarithmic power series `A(z) + Ln(−z)·B(z) + Σ c_j z^{−j}` replaces the
//! closed form so that pole and logarithm cancellations are done exactly on coefficients.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64 as C;

use crate::point::{Side, SpectralPoint as GenericPoint};
use crate::real::EULER_GAMMA;
use crate::specfun::{exp_e1, exp_e1_real, exp_ei_real, exp_ei_star};

pub type SpectralPoint = GenericPoint<f64>;

/// `|μx²|` up to which the logarithmic power series is used.
pub const SERIES_RADIUS: f64 = 4.0;
const SERIES_TERMS: usize = 26;

/// Extension channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channel {
    SingleSourceScalar,
    TwoSourceScalarMinus,
    VectorVMinus,
    VectorUMinus,
    VectorVPlus,
    VectorUPlus,
}

impl Channel {
    pub const ALL: [Channel; 6] = [
        Channel::SingleSourceScalar,
        Channel::TwoSourceScalarMinus,
        Channel::VectorVMinus,
        Channel::VectorUMinus,
        Channel::VectorVPlus,
        Channel::VectorUPlus,
    ];

    /// Channels whose σ can stay below κ on the whole negative axis.
    pub fn is_minus(self) -> bool {
        matches!(self, Channel::TwoSourceScalarMinus | Channel::VectorVMinus | Channel::VectorUMinus)
    }

    pub fn is_vector(self) -> bool {
        matches!(self, Channel::VectorVMinus | Channel::VectorUMinus | Channel::VectorVPlus | Channel::VectorUPlus)
    }

    /// Short name used on the command line.
    pub fn name(self) -> &'static str {
        match self {
            Channel::SingleSourceScalar => "single",
            Channel::TwoSourceScalarMinus => "scalar-minus",
            Channel::VectorVMinus => "vector-v-minus",
            Channel::VectorUMinus => "vector-u-minus",
            Channel::VectorVPlus => "vector-v-plus",
            Channel::VectorUPlus => "vector-u-plus",
        }
    }

    pub fn from_name(s: &str) -> Option<Channel> {
        Channel::ALL.into_iter().find(|c| c.name() == s)
    }

    fn family(self) -> Option<Family> {
        match self {
            Channel::SingleSourceScalar => None,
            Channel::TwoSourceScalarMinus => Some(Family::Scalar),
            Channel::VectorVMinus | Channel::VectorUMinus => Some(Family::VectorMinus),
            Channel::VectorVPlus | Channel::VectorUPlus => Some(Family::VectorPlus),
        }
    }
}

impl std::fmt::Display for Channel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum NevanlinnaError {
    #[error("domain error: {0}")]
    Domain(&'static str),
    #[error("operation not defined for channel {0}")]
    UnsupportedChannel(Channel),
}

/// Channel, coupling scale κ̃ and source separation x.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtensionConfig {
    pub kappa_tilde: f64,
    pub x: f64,
    pub channel: Channel,
}

impl ExtensionConfig {
    pub fn new(kappa_tilde: f64, x: f64, channel: Channel) -> Result<Self, NevanlinnaError> {
        if !(kappa_tilde > 0.0) || !kappa_tilde.is_finite() {
            return Err(NevanlinnaError::Domain("kappa_tilde must be positive and finite"));
        }
        if channel != Channel::SingleSourceScalar && (!(x > 0.0) || !x.is_finite()) {
            return Err(NevanlinnaError::Domain("x must be positive and finite"));
        }
        Ok(Self { kappa_tilde, x, channel })
    }

    pub fn with_x(self, x: f64) -> Result<Self, NevanlinnaError> {
        Self::new(self.kappa_tilde, x, self.channel)
    }

    pub fn with_kappa_tilde(self, kappa_tilde: f64) -> Result<Self, NevanlinnaError> {
        Self::new(kappa_tilde, self.x, self.channel)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Family {
    Scalar,
    VectorMinus,
    VectorPlus,
}

impl Family {
    /// Coefficient of `ln(κ̃/−μ)` in σ.
    fn log_weight(self) -> f64 {
        match self {
            Family::Scalar => 2.0 * PI,
            Family::VectorMinus | Family::VectorPlus => 4.0 * PI / 3.0,
        }
    }
}

/// `A(z) + Ln(−z)·B(z) + Σ_j poles[j]·z^{−(j+1)}` with real coefficients.
#[derive(Debug, Clone)]
struct LogSeries {
    a: Vec<f64>,
    b: Vec<f64>,
    poles: Vec<f64>,
}

impl LogSeries {
    fn zero() -> Self {
        Self { a: vec![0.0; SERIES_TERMS], b: vec![0.0; SERIES_TERMS], poles: vec![0.0; 4] }
    }

    fn deriv(&self) -> Self {
        let mut out = Self::zero();
        for n in 1..self.a.len() {
            out.a[n - 1] += n as f64 * self.a[n];
        }
        // d/dz [L·B] = L·B′ + B/z
        for n in 1..self.b.len() {
            out.b[n - 1] += n as f64 * self.b[n];
            out.a[n - 1] += self.b[n];
        }
        out.poles[0] += self.b[0];
        for j in 0..self.poles.len() - 1 {
            out.poles[j + 1] -= (j + 1) as f64 * self.poles[j];
        }
        out.snap();
        out
    }

    fn axpy(&mut self, c: f64, o: &Self) {
        for n in 0..self.a.len() {
            self.a[n] += c * o.a[n];
            self.b[n] += c * o.b[n];
        }
        for j in 0..self.poles.len() {
            self.poles[j] += c * o.poles[j];
        }
    }

    /// Coefficients that cancel analytically come out at rounding level; set them to zero.
    fn snap(&mut self) {
        let scale = self.a.iter().chain(&self.b).chain(&self.poles).fold(0.0_f64, |m, v| m.max(v.abs()));
        for p in self.poles.iter_mut().chain(self.b.iter_mut().take(1)) {
            if p.abs() <= 64.0 * f64::EPSILON * scale {
                *p = 0.0;
            }
        }
    }

    fn eval(&self, z: C, l: C) -> C {
        let horner = |c: &[f64]| c.iter().rev().fold(C::new(0.0, 0.0), |acc, &v| acc * z + v);
        let mut v = horner(&self.a) + l * horner(&self.b);
        if self.poles.iter().any(|&p| p != 0.0) {
            let inv = z.inv();
            let mut pw = inv;
            for &p in &self.poles {
                v += pw * p;
                pw *= inv;
            }
        }
        v
    }
}

/// Series for `J(z)` with `w = −z`: `J = 2π[−(2γ + Ln w)·C(w) + D(w)]`,
/// `C(w) = Σ wⁿ/(2n+1)!`, `D(w) = Σ 2H_{2n+1} wⁿ/(2n+1)!`.
fn j_series() -> &'static LogSeries {
    static CELL: OnceLock<LogSeries> = OnceLock::new();
    CELL.get_or_init(|| {
        let mut s = LogSeries::zero();
        let mut fact = 1.0_f64;
        let mut harmonic = 0.0_f64;
        for n in 0..SERIES_TERMS {
            let m = 2 * n + 1;
            if n == 0 {
                fact = 1.0;
                harmonic = 1.0;
            } else {
                fact *= ((m - 1) * m) as f64;
                harmonic += 1.0 / (m - 1) as f64 + 1.0 / m as f64;
            }
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let c = sign / fact;
            let d = sign * 2.0 * harmonic / fact;
            s.a[n] = 2.0 * PI * (-2.0 * EULER_GAMMA * c + d);
            s.b[n] = -2.0 * PI * c;
        }
        s
    })
}

struct FamilySeries {
    s: LogSeries,
    s1: LogSeries,
    s2: LogSeries,
}

fn family_series(f: Family) -> &'static FamilySeries {
    static SCALAR: OnceLock<FamilySeries> = OnceLock::new();
    static VMINUS: OnceLock<FamilySeries> = OnceLock::new();
    static VPLUS: OnceLock<FamilySeries> = OnceLock::new();
    let cell = match f {
        Family::Scalar => &SCALAR,
        Family::VectorMinus => &VMINUS,
        Family::VectorPlus => &VPLUS,
    };
    cell.get_or_init(|| {
        let j = j_series();
        let mut s = LogSeries::zero();
        match f {
            Family::Scalar => {
                // S = −2π·Ln(−z) − J
                s.b[0] = -2.0 * PI;
                s.axpy(-1.0, j);
            }
            Family::VectorMinus | Family::VectorPlus => {
                // S = −(4π/3)·Ln(−z) ± (8π/z + 4J′)
                let sign = if f == Family::VectorMinus { 1.0 } else { -1.0 };
                let mut v = j.deriv();
                for c in v.a.iter_mut().chain(v.b.iter_mut()).chain(v.poles.iter_mut()) {
                    *c *= 4.0;
                }
                v.poles[0] += 8.0 * PI;
                v.snap();
                s.b[0] = -4.0 * PI / 3.0;
                s.axpy(sign, &v);
                s.snap();
            }
        }
        let s1 = s.deriv();
        let s2 = s1.deriv();
        FamilySeries { s, s1, s2 }
    })
}

/// Reduced argument `z = μx²` with its side-resolved `Ln(−z)`.
#[derive(Debug, Clone, Copy)]
struct ZArg {
    z: C,
    l: C,
    side: Side,
}

fn zarg(mu: &SpectralPoint, x: f64) -> Result<ZArg, NevanlinnaError> {
    if mu.mu.re == 0.0 && mu.mu.im == 0.0 {
        return Err(NevanlinnaError::Domain("μ = 0 is a logarithmic branch point"));
    }
    if !(x > 0.0) || !x.is_finite() {
        return Err(NevanlinnaError::Domain("x must be positive"));
    }
    if mu.side == Side::OffAxis && mu.mu.im == 0.0 && mu.mu.re > 0.0 {
        return Err(NevanlinnaError::Domain("point on the cut needs a side tag"));
    }
    Ok(ZArg { z: mu.mu * (x * x), l: mu.ln_neg(x * x), side: mu.side })
}

/// `(a, P, Q)` for the closed forms; on the cut `a = ∓it`.
fn closed_pq(za: &ZArg) -> (C, C, C) {
    match za.side {
        Side::OffAxis => {
            let a = (-za.z).sqrt();
            if a.im == 0.0 {
                (a, C::new(exp_ei_real(a.re), 0.0), C::new(exp_e1_real(a.re), 0.0))
            } else {
                (a, exp_ei_star(a), exp_e1(a))
            }
        }
        Side::AboveCut | Side::BelowCut => {
            let t = za.z.re.sqrt();
            let h = exp_e1(C::new(0.0, t));
            let e = C::new(t.cos(), t.sin());
            let a = C::new(0.0, -t);
            let p = -h - C::new(0.0, PI) * e;
            let q = h.conj();
            if za.side == Side::AboveCut {
                (a, p, q)
            } else {
                (a.conj(), p.conj(), q.conj())
            }
        }
    }
}

/// `[J, J′, J″, J‴]` in the variable `z` from the closed forms.
fn j_closed_all(za: &ZArg) -> [C; 4] {
    let (a, p, q) = closed_pq(za);
    let a2 = a * a;
    let a3 = a2 * a;
    let j0 = (p + q) * (2.0 * PI) / a;
    let j1 = ((a + 1.0) * p + (-a + 1.0) * q) * PI / a3;
    let j2 = ((a2 + a * 3.0 + 3.0) * p + (a2 - a * 3.0 + 3.0) * q - a * 2.0) * PI / (a3 * a2 * 2.0);
    let j3 = ((a3 + a2 * 6.0 + a * 15.0 + 15.0) * p + (-a3 + a2 * 6.0 - a * 15.0 + 15.0) * q - a * 14.0) * PI
        / (a3 * a3 * a * 4.0);
    [j0, j1, j2, j3]
}

fn j_all(za: &ZArg) -> [C; 4] {
    if za.z.norm() <= SERIES_RADIUS {
        let j = j_series();
        let j1 = j.deriv();
        let j2 = j1.deriv();
        let j3 = j2.deriv();
        [j.eval(za.z, za.l), j1.eval(za.z, za.l), j2.eval(za.z, za.l), j3.eval(za.z, za.l)]
    } else {
        j_closed_all(za)
    }
}

/// `J(μx²)`.
pub fn j_closed(mu: SpectralPoint, x: f64) -> Result<C, NevanlinnaError> {
    Ok(j_all(&zarg(&mu, x)?)[0])
}

/// `J′(z)` at `z = μx²`.
pub fn j_prime(mu: SpectralPoint, x: f64) -> Result<C, NevanlinnaError> {
    Ok(j_all(&zarg(&mu, x)?)[1])
}

/// `[J, J′, J″, J‴]` at `z = μx²`.
pub fn j_derivatives(mu: SpectralPoint, x: f64) -> Result<[C; 4], NevanlinnaError> {
    Ok(j_all(&zarg(&mu, x)?))
}

/// Closed-form branch only (no small-argument series); exposed for switch-point checks.
pub fn j_derivatives_closed_form(mu: SpectralPoint, x: f64) -> Result<[C; 4], NevanlinnaError> {
    Ok(j_closed_all(&zarg(&mu, x)?))
}

/// Series branch only; exposed for switch-point checks.
pub fn j_derivatives_series(mu: SpectralPoint, x: f64) -> Result<[C; 4], NevanlinnaError> {
    let za = zarg(&mu, x)?;
    let j = j_series();
    let j1 = j.deriv();
    let j2 = j1.deriv();
    let j3 = j2.deriv();
    Ok([j.eval(za.z, za.l), j1.eval(za.z, za.l), j2.eval(za.z, za.l), j3.eval(za.z, za.l)])
}

/// `S, S′, S″` of the family at `z`, where `σ − κ = k·ln(κ̃x²) + S(z)`.
fn family_jet(f: Family, za: &ZArg) -> (C, C, C) {
    if za.z.norm() <= SERIES_RADIUS {
        let fs = family_series(f);
        return (fs.s.eval(za.z, za.l), fs.s1.eval(za.z, za.l), fs.s2.eval(za.z, za.l));
    }
    let j = j_closed_all(za);
    let z = za.z;
    let zi = z.inv();
    match f {
        Family::Scalar => {
            let s = za.l * (-2.0 * PI) - j[0];
            let s1 = zi * (-2.0 * PI) - j[1];
            let s2 = zi * zi * (2.0 * PI) - j[2];
            (s, s1, s2)
        }
        Family::VectorMinus | Family::VectorPlus => {
            let sign = if f == Family::VectorMinus { 1.0 } else { -1.0 };
            let k = 4.0 * PI / 3.0;
            let v0 = zi * (8.0 * PI) + j[1] * 4.0;
            let v1 = zi * zi * (-8.0 * PI) + j[2] * 4.0;
            let v2 = zi * zi * zi * (16.0 * PI) + j[3] * 4.0;
            (za.l * (-k) + v0 * sign, zi * (-k) + v1 * sign, zi * zi * k + v2 * sign)
        }
    }
}

/// Krein denominator with its first derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaJet {
    /// `κ − σ(μ)`.
    pub den: C,
    /// `∂σ/∂μ`.
    pub sigma_mu: C,
    /// `∂σ/∂x` (zero for the single source).
    pub sigma_x: C,
    /// `∂²σ/∂μ∂x`.
    pub sigma_mu_x: C,
}

/// Denominator and derivatives at `μ` for the given configuration.
pub fn sigma_jet(mu: SpectralPoint, cfg: &ExtensionConfig) -> Result<SigmaJet, NevanlinnaError> {
    let Some(f) = cfg.channel.family() else {
        if mu.mu.norm() == 0.0 {
            return Err(NevanlinnaError::Domain("μ = 0 is a logarithmic branch point"));
        }
        let den = mu.ln_neg(1.0 / cfg.kappa_tilde) * (2.0 * PI);
        let sigma_mu = -mu.mu.inv() * (2.0 * PI);
        return Ok(SigmaJet { den, sigma_mu, sigma_x: C::new(0.0, 0.0), sigma_mu_x: C::new(0.0, 0.0) });
    };
    let x = cfg.x;
    let za = zarg(&mu, x)?;
    let k = f.log_weight();
    let (s, s1, s2) = family_jet(f, &za);
    let sigma = s + k * (cfg.kappa_tilde * x * x).ln();
    Ok(SigmaJet {
        den: -sigma,
        sigma_mu: s1 * (x * x),
        sigma_x: (za.z * s1 * 2.0 + 2.0 * k) / x,
        sigma_mu_x: (s1 + za.z * s2) * (2.0 * x),
    })
}

/// `κ − σ(μ)`.
pub fn krein_denominator(mu: SpectralPoint, cfg: &ExtensionConfig) -> Result<C, NevanlinnaError> {
    Ok(sigma_jet(mu, cfg)?.den)
}

/// `σ′(μ)`.
pub fn sigma_prime(mu: SpectralPoint, cfg: &ExtensionConfig) -> Result<C, NevanlinnaError> {
    Ok(sigma_jet(mu, cfg)?.sigma_mu)
}

/// `∂σ/∂x`.
pub fn sigma_x(mu: SpectralPoint, cfg: &ExtensionConfig) -> Result<C, NevanlinnaError> {
    Ok(sigma_jet(mu, cfg)?.sigma_x)
}

/// Jump `σ(λ+i0) − σ(λ−i0)` across the positive half-axis (minus channels).
pub fn gap(lambda: f64, cfg: &ExtensionConfig) -> Result<C, NevanlinnaError> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(NevanlinnaError::Domain("lambda must be positive"));
    }
    let t = lambda.sqrt() * cfg.x;
    match cfg.channel {
        Channel::TwoSourceScalarMinus => Ok(C::new(0.0, 4.0 * PI * PI * one_minus_sinc(t))),
        Channel::VectorVMinus | Channel::VectorUMinus => Ok(C::new(0.0, 8.0 * PI * PI * vector_gap_bracket(t))),
        other => Err(NevanlinnaError::UnsupportedChannel(other)),
    }
}

/// `Im σ(λ+i0)`, half the gap, as a real number.
pub fn gap_density(lambda: f64, cfg: &ExtensionConfig) -> Result<f64, NevanlinnaError> {
    Ok(0.5 * gap(lambda, cfg)?.im)
}

/// `1 − sin t / t` without cancellation at small `t`.
pub fn one_minus_sinc(t: f64) -> f64 {
    if t.abs() < 0.5 {
        // Σ_{k≥1} (−1)^{k+1} t^{2k}/(2k+1)!
        let t2 = t * t;
        let mut term = t2 / 6.0;
        let mut sum = term;
        for k in 2..12 {
            term *= -t2 / ((2 * k) * (2 * k + 1)) as f64;
            sum += term;
        }
        sum
    } else {
        1.0 - t.sin() / t
    }
}

/// `1/3 + cos t/t² − sin t/t³` without cancellation at small `t`.
fn vector_gap_bracket(t: f64) -> f64 {
    if t.abs() < 1.0 {
        // Σ_{k≥2} (−1)^k 2k t^{2k−2}/(2k+1)!
        let t2 = t * t;
        let mut sum = 0.0;
        let mut pw = t2;
        let mut fact = 120.0;
        for k in 2..16 {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sum += sign * (2 * k) as f64 * pw / fact;
            pw *= t2;
            fact *= ((2 * k + 2) * (2 * k + 3)) as f64;
        }
        sum
    } else {
        let (s, c) = t.sin_cos();
        1.0 / 3.0 + c / (t * t) - s / (t * t * t)
    }
}

/// `lim_{μ→0⁻} (κ − σ(μ))` for the minus channels, from the constant term of the series.
pub fn limit_at_zero(cfg: &ExtensionConfig) -> Result<f64, NevanlinnaError> {
    let f = match cfg.channel.family() {
        Some(f @ (Family::Scalar | Family::VectorMinus)) => f,
        _ => return Err(NevanlinnaError::UnsupportedChannel(cfg.channel)),
    };
    let fs = family_series(f);
    debug_assert!(fs.s.b[0] == 0.0 && fs.s.poles.iter().all(|&p| p == 0.0));
    let s0 = fs.s.a[0];
    Ok(-(s0 + f.log_weight() * (cfg.kappa_tilde * cfg.x * cfg.x).ln()))
}

/// Leading small-`μ` remainder coefficient: `κ − σ = limit − c·z·Ln(−z) + …`
/// returns `c`, the coefficient of `z·Ln(−z)` in `σ − κ`.
pub fn small_mu_log_coefficient(channel: Channel) -> Result<f64, NevanlinnaError> {
    match channel.family() {
        Some(f) => Ok(family_series(f).s.b[1]),
        None => Err(NevanlinnaError::UnsupportedChannel(channel)),
    }
}
