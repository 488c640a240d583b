//! Regularized traces of functions of the extension, computed as spectral
//! integrals over the cut in the variable `t = √λ`.
//!
//! With `D(λ) = κ − σ(λ+i0)` the basic identity is
//! `Tr[f(L_κ) − f(L)] = (1/π) ∫ f(λ) Im[σ′(λ)/D(λ)] dλ`.
//! Divergent traces are exposed only as truncated values with a fitted growth
//! model, as differences between geometries, or as `x`-derivatives.

use std::f64::consts::PI;

use num_complex::Complex64 as C;

use crate::kernels::{inner_p, KernelError};
use crate::nevanlinna::{
    gap, krein_denominator, sigma_jet, Channel, ExtensionConfig, NevanlinnaError, SigmaJet, SpectralPoint,
};
use crate::positivity::{classify, x_boundary, Verdict};
use crate::quad::{integrate, integrate_breakpoints, integrate_partitioned, integrate_semi_infinite, QuadConfig, QuadError};

/// Relative distance from `x_b` inside which [`tr_e_combined`] refuses to evaluate.
pub const BOUNDARY_EXCLUSION: f64 = 1e-3;

/// Number of half-periods `π/x` integrated panel by panel before the tail.
const HEAD_PANELS: f64 = 2000.0;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum TraceError {
    #[error("extension is not positive ({0:?})")]
    NotPositive(Verdict),
    #[error("separation within {BOUNDARY_EXCLUSION:e}·x_b of the boundary radius")]
    NearBoundary,
    #[error("configurations differ in κ̃ or channel")]
    Mismatch,
    #[error("domain error: {0}")]
    Domain(&'static str),
    #[error("cutoff fit failed: {0}")]
    Fit(&'static str),
    #[error(transparent)]
    Nevanlinna(#[from] NevanlinnaError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Quadrature(#[from] QuadError<f64>),
}

/// Growth model of a truncated trace in the cutoff `Λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DivergenceModel {
    /// `a·ln ln Λ + b`.
    LogLog { a: f64, b: f64 },
    /// `−a ∫_b^Λ dλ/(√λ ln²λ)`, asymptotically `−2a√Λ/ln²Λ`.
    SqrtOverLog2 { a: f64, b: f64 },
    Convergent,
}

impl DivergenceModel {
    pub fn eval(&self, cutoff: f64) -> f64 {
        match *self {
            Self::LogLog { a, b } => a * cutoff.ln().ln() + b,
            Self::SqrtOverLog2 { a, b } => -a * sqrt_log2_integral(b, cutoff),
            Self::Convergent => f64::NAN,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceEstimate {
    pub truncated_value: f64,
    pub cutoff: f64,
    pub model: DivergenceModel,
    /// Limit `Λ → ∞`; present only for [`DivergenceModel::Convergent`].
    pub extrapolated: Option<f64>,
    /// `(Λ, value)` pairs used for the fit.
    pub samples: Vec<(f64, f64)>,
    /// Largest relative deviation of the fitted model over `samples`.
    pub fit_residual: f64,
}

/// First term of the `ω` decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OmegaWeight {
    /// Angular weight `1 − sin(px)/(px)` of the antisymmetric source.
    #[default]
    VMinus,
    /// Bare density `4π∫p²dp/(p² − ρ)²`.
    SingleSource,
}

/// The three terms whose sum is `ω_κ[R_ρ v]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmegaTerms {
    pub free: f64,
    pub gap_term: f64,
    pub denominator_term: f64,
}

impl OmegaTerms {
    pub fn total(&self) -> f64 {
        self.free + self.gap_term + self.denominator_term
    }
}

type CutoffSweep = fn(&TraceSolver, &[f64], &ExtensionConfig) -> Result<Vec<f64>, TraceError>;

/// Quadrature settings shared by every trace integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceSolver {
    pub quad: QuadConfig<f64>,
}

impl Default for TraceSolver {
    fn default() -> Self {
        Self::with_tol(1e-11)
    }
}

impl TraceSolver {
    pub fn with_tol(tol: f64) -> Self {
        Self { quad: QuadConfig { abs_tol: tol, rel_tol: tol, max_evals: 200_000_000 } }
    }
}

fn accept(r: Result<crate::quad::QuadResult<f64>, QuadError<f64>>) -> Result<f64, TraceError> {
    match r {
        Ok(q) => Ok(q.value),
        Err(QuadError::RoundoffLimited { best }) => Ok(best.value),
        Err(e) => Err(e.into()),
    }
}

fn require_positive(cfg: &ExtensionConfig) -> Result<(), TraceError> {
    match classify(cfg).verdict {
        Verdict::Positive => Ok(()),
        v => Err(TraceError::NotPositive(v)),
    }
}

fn require_scalar(cfg: &ExtensionConfig) -> Result<(), TraceError> {
    if cfg.channel != Channel::TwoSourceScalarMinus {
        return Err(NevanlinnaError::UnsupportedChannel(cfg.channel).into());
    }
    Ok(())
}

fn jet(t: f64, cfg: &ExtensionConfig) -> Option<SigmaJet> {
    sigma_jet(SpectralPoint::above(t * t).ok()?, cfg).ok()
}

fn finite(v: Option<f64>) -> f64 {
    v.filter(|v| v.is_finite()).unwrap_or(f64::NAN)
}

/// Half period of the oscillations of `D` in `t`.
fn half_period(x: f64) -> f64 {
    PI / x
}

/// Geometric points down to `0` and uniform ones of spacing `h` up to `end`.
fn head_points(h: f64, end: f64) -> Vec<f64> {
    let mut pts = vec![0.0];
    let mut g: Vec<f64> = (1..=40).map(|k| h * 0.5f64.powi(k)).filter(|&p| p < end).collect();
    g.reverse();
    pts.extend(g);
    let mut k = 1.0;
    while k * h < end {
        pts.push(k * h);
        k += 1.0;
    }
    pts.push(end);
    pts
}

/// `∫₀^{c}` for every cutoff `c` in increasing `cuts`, in one pass.
fn cumulative<F: Fn(f64) -> f64>(f: F, h: f64, cuts: &[f64], cfg: &QuadConfig<f64>) -> Result<Vec<f64>, TraceError> {
    let end = *cuts.last().ok_or(TraceError::Domain("no cutoffs"))?;
    let mut pts = head_points(h, end);
    pts.extend_from_slice(cuts);
    pts.sort_by(|a, b| a.total_cmp(b));
    pts.dedup();
    let mut out = Vec::with_capacity(cuts.len());
    let mut acc = 0.0;
    let mut lo = 0.0;
    for &c in cuts {
        let seg: Vec<f64> = pts.iter().copied().filter(|&p| p >= lo && p <= c).collect();
        if seg.len() >= 2 {
            acc += accept(integrate_breakpoints(&f, &seg, cfg))?;
        }
        out.push(acc);
        lo = c;
    }
    Ok(out)
}

#[derive(Clone, Copy)]
enum Tail {
    /// Non-oscillating algebraic decay: mapped semi-infinite rule.
    Smooth,
    /// Conditionally convergent oscillation: panels with epsilon acceleration.
    Oscillating,
}

fn full_integral<F: Fn(f64) -> f64>(f: F, h: f64, head_end: f64, tail: Tail, cfg: &QuadConfig<f64>) -> Result<f64, TraceError> {
    let end = (head_end / h).ceil().max(1.0) * h;
    let head = cumulative(&f, h, &[end], cfg)?[0];
    let rest = match tail {
        Tail::Smooth => accept(integrate_semi_infinite(&f, end, cfg))?,
        Tail::Oscillating => accept(integrate_partitioned(&f, end, h, cfg))?,
    };
    Ok(head + rest)
}

fn default_head(x: f64) -> f64 {
    HEAD_PANELS * half_period(x)
}

// ---------------------------------------------------------------------------
// Integrands and domain checks

fn gap_im(t: f64, cfg: &ExtensionConfig) -> f64 {
    finite(gap(t * t, cfg).ok().map(|g| g.im))
}

fn check_rho(rho: f64) -> Result<(), TraceError> {
    if !(rho < 0.0) || !rho.is_finite() {
        return Err(TraceError::Domain("rho must be negative and finite"));
    }
    Ok(())
}

fn ln_integrand(t: f64, cfg: &ExtensionConfig) -> f64 {
    finite(jet(t, cfg).map(|j| -(j.sigma_mu / j.den).im * (t * t).ln() * 2.0 * t / PI))
}

fn sqrt_integrand(t: f64, cfg: &ExtensionConfig) -> f64 {
    finite(jet(t, cfg).map(|j| (j.sigma_mu / j.den).im * 2.0 * t * t / PI))
}

/// `e^{iy}(1 − iy) − 1`.
fn phi(y: f64) -> C {
    if y < 0.5 {
        // Σ_{n≥2} (iy)^n (1 − n)/n!
        let iy = C::new(0.0, y);
        let mut pw = iy * iy;
        let mut fact = 2.0;
        let mut sum = C::new(0.0, 0.0);
        for n in 2..24 {
            sum += pw * ((1 - n) as f64 / fact);
            pw *= iy;
            fact *= (n + 1) as f64;
        }
        sum
    } else {
        C::from_polar(1.0, y) * C::new(1.0, -y) - 1.0
    }
}

/// `e^{iy} − 1 − iy(1 + e^{iy})/2`.
fn psi(y: f64) -> C {
    if y < 0.5 {
        // Σ_{m≥3} (iy)^m (2 − m)/(2·m!)
        let iy = C::new(0.0, y);
        let mut pw = iy * iy * iy;
        let mut fact = 6.0;
        let mut sum = C::new(0.0, 0.0);
        for m in 3..25 {
            sum += pw * ((2 - m) as f64 / (2.0 * fact));
            pw *= iy;
            fact *= (m + 1) as f64;
        }
        sum
    } else {
        let e = C::from_polar(1.0, y);
        e - 1.0 - C::new(0.0, y) * (e + 1.0) * 0.5
    }
}

/// `1 − e^{iy}` without cancellation in the real part.
fn one_minus_phase(y: f64) -> C {
    C::new(2.0 * (0.5 * y).sin().powi(2), -y.sin())
}

fn e_integrand(t: f64, cfg: &ExtensionConfig) -> f64 {
    let x = cfg.x;
    let b = phi(t * x) / (t * t * t * x);
    finite(jet(t, cfg).map(|j| PI * t * (b / j.den).im))
}

fn lp_integrand(t: f64, cfg: &ExtensionConfig) -> f64 {
    let x = cfg.x;
    let f = psi(t * x) * (2.0 * PI * PI / (t * t * t * x));
    finite(jet(t, cfg).map(|j| 2.0 * t * (f / j.den).im / PI))
}

fn lm_integrand(t: f64, cfg: &ExtensionConfig) -> f64 {
    let g = C::new(0.0, PI * PI) * one_minus_phase(t * cfg.x) / (t * t);
    finite(jet(t, cfg).map(|j| 2.0 * t * (g / j.den).im / PI))
}

fn check_e_domain(cfg: &ExtensionConfig) -> Result<(), TraceError> {
    require_scalar(cfg)?;
    require_positive(cfg)?;
    let xb = x_boundary(cfg.kappa_tilde, cfg.channel)?;
    if (cfg.x - xb).abs() < BOUNDARY_EXCLUSION * xb {
        return Err(TraceError::NearBoundary);
    }
    Ok(())
}

/// Cutoffs `Λ_lo·10^k` spanning four decades and containing `Λ`.
fn fit_window(cutoff: f64) -> Vec<f64> {
    let lo = (cutoff * 1e-4).max(1e2);
    (0..5).map(|k| lo * 10f64.powi(k)).collect()
}

fn check_cutoff(cutoff: f64) -> Result<(), TraceError> {
    if !(cutoff > 1.0) || !cutoff.is_finite() {
        return Err(TraceError::Domain("cutoff must exceed 1"));
    }
    Ok(())
}

fn same_family(a: &ExtensionConfig, b: &ExtensionConfig) -> Result<(), TraceError> {
    if a.kappa_tilde != b.kappa_tilde || a.channel != b.channel {
        return Err(TraceError::Mismatch);
    }
    Ok(())
}

fn cuts_in_t(lambdas: &[f64]) -> Result<Vec<f64>, TraceError> {
    if lambdas.iter().any(|l| !(*l > 0.0) || !l.is_finite()) || lambdas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(TraceError::Domain("cutoffs must be positive and increasing"));
    }
    Ok(lambdas.iter().map(|l| l.sqrt()).collect())
}

type Fitter = fn(&[(f64, f64)]) -> Result<(DivergenceModel, f64), TraceError>;

fn fit_ln(s: &[(f64, f64)]) -> Result<(DivergenceModel, f64), TraceError> {
    let (a, b, r) = fit_log_log(s)?;
    Ok((DivergenceModel::LogLog { a, b }, r))
}

fn fit_sqrt(s: &[(f64, f64)]) -> Result<(DivergenceModel, f64), TraceError> {
    let (a, b, r) = fit_sqrt_over_log2(s)?;
    Ok((DivergenceModel::SqrtOverLog2 { a, b }, r))
}

impl TraceSolver {
    fn cumulative<F: Fn(f64) -> f64>(&self, f: F, x: f64, lambdas: &[f64]) -> Result<Vec<f64>, TraceError> {
        cumulative(f, half_period(x), &cuts_in_t(lambdas)?, &self.quad)
    }

    fn full<F: Fn(f64) -> f64>(&self, f: F, x: f64, head_end: f64, tail: Tail) -> Result<f64, TraceError> {
        full_integral(f, half_period(x), head_end, tail, &self.quad)
    }

    fn estimate(
        &self,
        cutoff: f64,
        cfg: &ExtensionConfig,
        values: CutoffSweep,
        fit: Fitter,
    ) -> Result<TraceEstimate, TraceError> {
        check_cutoff(cutoff)?;
        let mut cuts = fit_window(cutoff);
        if !cuts.contains(&cutoff) {
            cuts.push(cutoff);
            cuts.sort_by(|a, b| a.total_cmp(b));
        }
        let vals = values(self, &cuts, cfg)?;
        let at = cuts.iter().position(|&c| c == cutoff).unwrap_or(0);
        let samples: Vec<(f64, f64)> = cuts.iter().copied().zip(vals.iter().copied()).collect();
        let (model, fit_residual) = fit(&samples)?;
        Ok(TraceEstimate { truncated_value: vals[at], cutoff, model, extrapolated: None, samples, fit_residual })
    }

    fn gap_term(&self, rho: f64, cfg: &ExtensionConfig) -> Result<f64, TraceError> {
        let f = |t: f64| {
            let l = t * t;
            gap_im(t, cfg) * 2.0 * l / (l - rho).powi(2)
        };
        let head = default_head(cfg.x).max(20.0 * (-rho).sqrt());
        Ok(-self.full(f, cfg.x, head, Tail::Smooth)? / (2.0 * PI))
    }

    fn denominator_term(&self, rho: f64, cfg: &ExtensionConfig) -> Result<f64, TraceError> {
        let point = SpectralPoint::negative(rho).map_err(|_| TraceError::Domain("rho must be negative"))?;
        let d_rho = krein_denominator(point, cfg)?.re;
        let f = |t: f64| {
            let l = t * t;
            let d = finite(jet(t, cfg).map(|j| j.den.norm_sqr()));
            gap_im(t, cfg) * 2.0 * l / ((l - rho).powi(2) * d)
        };
        let head = default_head(cfg.x).max(20.0 * (-rho).sqrt());
        Ok(d_rho * d_rho * self.full(f, cfg.x, head, Tail::Smooth)? / (2.0 * PI))
    }

    /// The three terms of `ω_κ[R_ρ v]` for the scalar antisymmetric channel.
    pub fn omega_terms(&self, rho: f64, cfg: &ExtensionConfig, weight: OmegaWeight) -> Result<OmegaTerms, TraceError> {
        check_rho(rho)?;
        require_scalar(cfg)?;
        require_positive(cfg)?;
        let free = match weight {
            OmegaWeight::VMinus => inner_p(rho, cfg.x)?,
            OmegaWeight::SingleSource => PI * PI / (-rho).sqrt(),
        };
        Ok(OmegaTerms { free, gap_term: self.gap_term(rho, cfg)?, denominator_term: self.denominator_term(rho, cfg)? })
    }

    pub fn decay_l1_l2(&self, cutoff: f64, cfg: &ExtensionConfig) -> Result<(f64, f64), TraceError> {
        if !(cutoff >= 10.0) || !cutoff.is_finite() {
            return Err(TraceError::Domain("cutoff must be at least 10"));
        }
        if !cfg.channel.is_minus() {
            return Err(NevanlinnaError::UnsupportedChannel(cfg.channel).into());
        }
        require_positive(cfg)?;
        Ok((self.gap_term(-cutoff, cfg)?, self.denominator_term(-cutoff, cfg)?))
    }

    pub fn tr_ln_values(&self, lambdas: &[f64], cfg: &ExtensionConfig) -> Result<Vec<f64>, TraceError> {
        require_positive(cfg)?;
        self.cumulative(|t| ln_integrand(t, cfg), cfg.x, lambdas)
    }

    pub fn tr_ln_truncated(&self, cutoff: f64, cfg: &ExtensionConfig) -> Result<TraceEstimate, TraceError> {
        self.estimate(cutoff, cfg, Self::tr_ln_values, fit_ln)
    }

    pub fn tr_ln_diff(&self, cfg1: &ExtensionConfig, cfg2: &ExtensionConfig) -> Result<f64, TraceError> {
        same_family(cfg1, cfg2)?;
        require_positive(cfg1)?;
        require_positive(cfg2)?;
        if cfg1 == cfg2 {
            return Ok(0.0);
        }
        let f = |t: f64| {
            let a1 = jet(t, cfg1).map(|j| j.den.arg());
            let a2 = jet(t, cfg2).map(|j| j.den.arg());
            finite(a1.zip(a2).map(|(a1, a2)| 2.0 * (a1 - a2) / (PI * t)))
        };
        let xm = cfg1.x.max(cfg2.x);
        self.full(f, xm, default_head(xm), Tail::Oscillating)
    }

    pub fn dx_tr_ln(&self, cfg: &ExtensionConfig) -> Result<f64, TraceError> {
        require_positive(cfg)?;
        let f = |t: f64| finite(jet(t, cfg).map(|j| -2.0 * (j.sigma_x / j.den).im / (PI * t)));
        self.full(f, cfg.x, default_head(cfg.x), Tail::Oscillating)
    }

    pub fn dx_tr_ln_direct(&self, cfg: &ExtensionConfig) -> Result<f64, TraceError> {
        if !cfg.channel.is_vector() || !cfg.channel.is_minus() {
            return Err(NevanlinnaError::UnsupportedChannel(cfg.channel).into());
        }
        require_positive(cfg)?;
        let f = |t: f64| {
            finite(jet(t, cfg).map(|j| {
                let d = j.sigma_mu_x / j.den + j.sigma_mu * j.sigma_x / (j.den * j.den);
                d.im * (t * t).ln() * 2.0 * t / PI
            }))
        };
        self.full(f, cfg.x, default_head(cfg.x), Tail::Oscillating)
    }

    pub fn tr_sqrt_values(&self, lambdas: &[f64], cfg: &ExtensionConfig) -> Result<Vec<f64>, TraceError> {
        require_positive(cfg)?;
        self.cumulative(|t| sqrt_integrand(t, cfg), cfg.x, lambdas)
    }

    pub fn tr_sqrt_truncated(&self, cutoff: f64, cfg: &ExtensionConfig) -> Result<TraceEstimate, TraceError> {
        self.estimate(cutoff, cfg, Self::tr_sqrt_values, fit_sqrt)
    }

    pub fn tr_sqrt_regulated(&self, cutoff: f64, cfg: &ExtensionConfig) -> Result<f64, TraceError> {
        check_cutoff(cutoff)?;
        require_positive(cfg)?;
        let end = 49.0 * cutoff;
        let f = |t: f64| sqrt_integrand(t, cfg) * (-t * t / cutoff).exp();
        Ok(self.cumulative(f, cfg.x, &[end])?[0])
    }

    pub fn dx_tr_sqrt(&self, cfg: &ExtensionConfig) -> Result<f64, TraceError> {
        require_positive(cfg)?;
        let f = |t: f64| finite(jet(t, cfg).map(|j| -(j.sigma_x / j.den).im / PI));
        self.full(f, cfg.x, default_head(cfg.x), Tail::Oscillating)
    }

    fn e_family(&self, lambdas: &[f64], cfg: &ExtensionConfig, f: fn(f64, &ExtensionConfig) -> f64) -> Result<Vec<f64>, TraceError> {
        check_e_domain(cfg)?;
        self.cumulative(|t| f(t, cfg), cfg.x, lambdas)
    }

    pub fn tr_lp_values(&self, lambdas: &[f64], cfg: &ExtensionConfig) -> Result<Vec<f64>, TraceError> {
        self.e_family(lambdas, cfg, lp_integrand)
    }

    pub fn tr_lm_values(&self, lambdas: &[f64], cfg: &ExtensionConfig) -> Result<Vec<f64>, TraceError> {
        self.e_family(lambdas, cfg, lm_integrand)
    }

    pub fn tr_e_values(&self, lambdas: &[f64], cfg: &ExtensionConfig) -> Result<Vec<f64>, TraceError> {
        self.e_family(lambdas, cfg, e_integrand)
    }

    pub fn tr_e_combined(&self, cfg: &ExtensionConfig) -> Result<f64, TraceError> {
        check_e_domain(cfg)?;
        self.full(|t| e_integrand(t, cfg), cfg.x, default_head(cfg.x), Tail::Oscillating)
    }

    pub fn tr_e_truncated(&self, cutoff: f64, cfg: &ExtensionConfig) -> Result<TraceEstimate, TraceError> {
        let limit = self.tr_e_combined(cfg)?;
        let mut est = self.estimate(cutoff, cfg, Self::tr_e_values, |_| Ok((DivergenceModel::Convergent, 0.0)))?;
        est.fit_residual = est.samples.iter().map(|&(_, v)| ((v - limit) / limit).abs()).fold(0.0, f64::max);
        est.extrapolated = Some(limit);
        Ok(est)
    }

    pub fn overlap_lower_bound(&self, cfg: &ExtensionConfig) -> Result<f64, TraceError> {
        Ok((-self.tr_e_combined(cfg)?).exp())
    }
}

// ---------------------------------------------------------------------------
// Default-tolerance entry points

/// The three terms whose sum is `ω_κ[R_ρ v]`.
pub fn omega_terms(rho: f64, cfg: &ExtensionConfig, weight: OmegaWeight) -> Result<OmegaTerms, TraceError> {
    TraceSolver::default().omega_terms(rho, cfg, weight)
}

/// `ω_κ[R_ρ v]` with the default weight.
pub fn omega_on_rv(rho: f64, cfg: &ExtensionConfig) -> Result<f64, TraceError> {
    omega_on_rv_with(rho, cfg, OmegaWeight::default())
}

pub fn omega_on_rv_with(rho: f64, cfg: &ExtensionConfig, weight: OmegaWeight) -> Result<f64, TraceError> {
    Ok(omega_terms(rho, cfg, weight)?.total())
}

/// Cutoff-rescaled gap and denominator integrals at `ρ = −Λ`; both decay like `Λ^{−1/2}`.
pub fn decay_l1_l2(cutoff: f64, cfg: &ExtensionConfig) -> Result<(f64, f64), TraceError> {
    TraceSolver::default().decay_l1_l2(cutoff, cfg)
}

/// `Tr(ln L − ln L_κ)` truncated at each cutoff in `lambdas` (increasing).
pub fn tr_ln_values(lambdas: &[f64], cfg: &ExtensionConfig) -> Result<Vec<f64>, TraceError> {
    TraceSolver::default().tr_ln_values(lambdas, cfg)
}

/// Truncated log-trace with its `a·ln ln Λ + b` growth fitted over four decades.
pub fn tr_ln_truncated(cutoff: f64, cfg: &ExtensionConfig) -> Result<TraceEstimate, TraceError> {
    TraceSolver::default().tr_ln_truncated(cutoff, cfg)
}

/// `Tr ln L_{κ,1} − Tr ln L_{κ,2}` for two separations.
///
/// After one integration by parts: `(1/π)∫ (arg D₁ − arg D₂)/λ dλ`, absolutely convergent.
pub fn tr_ln_diff(cfg1: &ExtensionConfig, cfg2: &ExtensionConfig) -> Result<f64, TraceError> {
    TraceSolver::default().tr_ln_diff(cfg1, cfg2)
}

/// `∂_x Tr ln L_κ` via `(1/π)∫ Im[−σ_x/D]/λ dλ`.
pub fn dx_tr_ln(cfg: &ExtensionConfig) -> Result<f64, TraceError> {
    TraceSolver::default().dx_tr_ln(cfg)
}

/// `∂_x Tr ln L_κ` from `(1/π)∫ Im ∂_x(σ′/D) ln λ dλ` without the parts transform (vector channels).
pub fn dx_tr_ln_direct(cfg: &ExtensionConfig) -> Result<f64, TraceError> {
    TraceSolver::default().dx_tr_ln_direct(cfg)
}

/// `Tr(L_κ^{1/2} − L^{1/2})` truncated at each cutoff in `lambdas` (increasing).
pub fn tr_sqrt_values(lambdas: &[f64], cfg: &ExtensionConfig) -> Result<Vec<f64>, TraceError> {
    TraceSolver::default().tr_sqrt_values(lambdas, cfg)
}

/// Truncated square-root trace with its `√Λ/ln²Λ` growth fitted over four decades.
pub fn tr_sqrt_truncated(cutoff: f64, cfg: &ExtensionConfig) -> Result<TraceEstimate, TraceError> {
    TraceSolver::default().tr_sqrt_truncated(cutoff, cfg)
}

/// Square-root trace with the smooth regulator `e^{−λ/Λ}`.
pub fn tr_sqrt_regulated(cutoff: f64, cfg: &ExtensionConfig) -> Result<f64, TraceError> {
    TraceSolver::default().tr_sqrt_regulated(cutoff, cfg)
}

/// `∂_x Tr L_κ^{1/2}` via `(1/2π)∫ Im[−σ_x/D] λ^{−1/2} dλ`.
pub fn dx_tr_sqrt(cfg: &ExtensionConfig) -> Result<f64, TraceError> {
    TraceSolver::default().dx_tr_sqrt(cfg)
}

/// Truncated trace with `λ^{−1/2}` weights; grows without bound.
pub fn tr_lp_values(lambdas: &[f64], cfg: &ExtensionConfig) -> Result<Vec<f64>, TraceError> {
    TraceSolver::default().tr_lp_values(lambdas, cfg)
}

/// Truncated companion trace with `λ^{1/2}` weights; grows without bound.
pub fn tr_lm_values(lambdas: &[f64], cfg: &ExtensionConfig) -> Result<Vec<f64>, TraceError> {
    TraceSolver::default().tr_lm_values(lambdas, cfg)
}

/// Combined trace truncated at each cutoff; equals `¼(TrLp + TrLm)` there.
pub fn tr_e_values(lambdas: &[f64], cfg: &ExtensionConfig) -> Result<Vec<f64>, TraceError> {
    TraceSolver::default().tr_e_values(lambdas, cfg)
}

/// `Im (π/2)∫₀^∞ D⁻¹[(e^{i√λx} − 1)/(λ^{3/2}x) − i e^{i√λx}/λ] dλ`.
pub fn tr_e_combined(cfg: &ExtensionConfig) -> Result<f64, TraceError> {
    TraceSolver::default().tr_e_combined(cfg)
}

/// Truncated combined trace together with its limit.
pub fn tr_e_truncated(cutoff: f64, cfg: &ExtensionConfig) -> Result<TraceEstimate, TraceError> {
    TraceSolver::default().tr_e_truncated(cutoff, cfg)
}

/// Lower bound `exp(−tr_e_combined)` on the normalized vacuum overlap.
pub fn overlap_lower_bound(cfg: &ExtensionConfig) -> Result<f64, TraceError> {
    TraceSolver::default().overlap_lower_bound(cfg)
}

// ---------------------------------------------------------------------------
// Fits

fn check_samples(samples: &[(f64, f64)]) -> Result<(), TraceError> {
    if samples.len() < 3 {
        return Err(TraceError::Fit("need at least three samples"));
    }
    if samples.iter().any(|&(l, v)| !(l > 1.0) || !v.is_finite()) {
        return Err(TraceError::Fit("samples need Λ > 1 and finite values"));
    }
    Ok(())
}

fn max_rel_dev(samples: &[(f64, f64)], model: impl Fn(f64) -> f64) -> f64 {
    samples.iter().map(|&(l, v)| ((model(l) - v) / v).abs()).fold(0.0, f64::max)
}

/// Least-squares `a·ln ln Λ + b`; returns `(a, b, max relative deviation)`.
pub fn fit_log_log(samples: &[(f64, f64)]) -> Result<(f64, f64, f64), TraceError> {
    check_samples(samples)?;
    if samples.iter().any(|&(l, _)| l <= std::f64::consts::E) {
        return Err(TraceError::Fit("ln ln Λ needs Λ > e"));
    }
    let n = samples.len() as f64;
    let xs: Vec<f64> = samples.iter().map(|&(l, _)| l.ln().ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = samples.iter().map(|s| s.1).sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(samples).map(|(x, s)| (x - mx) * (s.1 - my)).sum();
    let a = sxy / sxx;
    let b = my - a * mx;
    Ok((a, b, max_rel_dev(samples, |l| a * l.ln().ln() + b)))
}

/// `∫_b^Λ dλ/(√λ ln²λ) = ∫ e^s/(2s²) ds` over `s ∈ [ln√b, ln√Λ]`.
pub fn sqrt_log2_integral(b: f64, cutoff: f64) -> f64 {
    let (s0, s1) = (0.5 * b.ln(), 0.5 * cutoff.ln());
    integrate(|s: f64| s.exp() / (2.0 * s * s), s0, s1, &QuadConfig::with_tol(1e-13))
        .map(|r| r.value)
        .unwrap_or_else(|e| e.best().map(|r| r.value).unwrap_or(f64::NAN))
}

/// Relative least squares for `a` at fixed basis values.
fn scale_fit(samples: &[(f64, f64)], basis: &[f64]) -> (f64, f64) {
    let (mut num, mut den) = (0.0, 0.0);
    for (&(_, v), &m) in samples.iter().zip(basis) {
        let w = 1.0 / (v * v);
        num += -m * v * w;
        den += m * m * w;
    }
    let a = num / den;
    let sse = samples.iter().zip(basis).map(|(&(_, v), &m)| ((-a * m - v) / v).powi(2)).sum();
    (a, sse)
}

/// Fit of `−a∫_b^Λ dλ/(√λ ln²λ)`; returns `(a, b, max relative deviation)`.
pub fn fit_sqrt_over_log2(samples: &[(f64, f64)]) -> Result<(f64, f64, f64), TraceError> {
    check_samples(samples)?;
    let lmin = samples.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
    let (u0, u1) = (1.5f64.ln(), (0.5 * lmin).ln());
    if !(u1 > u0) {
        return Err(TraceError::Fit("smallest cutoff too small for the infrared scale"));
    }
    let cost = |u: f64| {
        let b = u.exp();
        let basis: Vec<f64> = samples.iter().map(|&(l, _)| sqrt_log2_integral(b, l)).collect();
        scale_fit(samples, &basis)
    };
    let n = 120;
    let grid: Vec<f64> = (0..=n).map(|k| u0 + (u1 - u0) * k as f64 / n as f64).collect();
    let best = (0..=n).min_by(|&i, &j| cost(grid[i]).1.total_cmp(&cost(grid[j]).1)).unwrap_or(0);
    let (mut lo, mut hi) = (grid[best.saturating_sub(1)], grid[(best + 1).min(n)]);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let m1 = hi - g * (hi - lo);
        let m2 = lo + g * (hi - lo);
        if cost(m1).1 < cost(m2).1 {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let u = 0.5 * (lo + hi);
    let (a, _) = cost(u);
    let b = u.exp();
    Ok((a, b, max_rel_dev(samples, |l| -a * sqrt_log2_integral(b, l))))
}

/// One-parameter fit `−a√Λ/ln²Λ`; returns `(a, max relative deviation)`.
pub fn fit_sqrt_over_log2_bare(samples: &[(f64, f64)]) -> Result<(f64, f64), TraceError> {
    check_samples(samples)?;
    let basis: Vec<f64> = samples.iter().map(|&(l, _)| l.sqrt() / l.ln().powi(2)).collect();
    let (a, _) = scale_fit(samples, &basis);
    Ok((a, max_rel_dev(samples, |l| -a * l.sqrt() / l.ln().powi(2))))
}
