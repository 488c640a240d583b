//! Finite-rank brute-force models: `H = diag(p_i²) − v vᵀ/c` on a momentum grid.
//!
//! Eigenvalues solve the secular equation `c − Σ v_i²/(p_i² − μ) = 0`, one below
//! `p_0²` and one in each gap `(p_{k−1}², p_k²)`. Each root is stored as the offset
//! `τ_k = p_k² − e_k` so that trace differences `f(e_k) − f(p_k²)` keep their digits.

use std::f64::consts::PI;
use std::sync::OnceLock;

use rayon::prelude::*;

use crate::kernels::RadialTestFunction;
use crate::nevanlinna::{krein_denominator, one_minus_sinc, Channel, ExtensionConfig, NevanlinnaError, SpectralPoint};

/// Reference point where the finite model is matched to the continuum `κ − σ`.
pub const MU_REF: f64 = -1.0;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),
    #[error("no sign change of the secular function in bracket {index} = ({lo:e}, {hi:e})")]
    Bracket { index: usize, lo: f64, hi: f64 },
    #[error("negative eigenvalue {0:e}: the finite model is not positive")]
    NegativeEigenvalue(f64),
    #[error(transparent)]
    Nevanlinna(#[from] NevanlinnaError),
}

/// Roots of the secular equation as offsets below the node squares.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    /// `τ_k = p_k² − e_k > 0`.
    pub offsets: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct GridModel {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub v_eff: Vec<f64>,
    /// `(μ_ref, κ − σ(μ_ref))`.
    pub kappa_ref: (f64, f64),
    pub p_max: f64,
    pub channel: Channel,
    pub x: f64,
    c: f64,
    spectrum: OnceLock<Result<Spectrum, OracleError>>,
}

/// Gauss–Legendre nodes and weights on `[−1, 1]` by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() <= 1e-16 * z.abs().max(1.0) {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Momentum grid with nodes `p = u²`, Gauss–Legendre in `u ∈ (0, √p_max)`.
///
/// Scalar minus channel: `v_i² = w_i (1 − sin(p_i x)/(p_i x))/p_i`; single source: `v_i² = w_i/p_i`.
pub fn build_grid(cfg: &ExtensionConfig, n: usize, p_max: f64) -> Result<GridModel, OracleError> {
    if n < 16 {
        return Err(OracleError::InvalidGrid("need at least 16 nodes"));
    }
    // ∫_{p_max}^∞ dp/(p(p²+1)) ≤ 1/(2 p_max²) ≤ 1e−6
    if !p_max.is_finite() || 2.0 * p_max * p_max < 1e6 {
        return Err(OracleError::InvalidGrid("p_max too small for a 1e-6 tail"));
    }
    let angular: Box<dyn Fn(f64) -> f64> = match cfg.channel {
        Channel::SingleSourceScalar => Box::new(|_| 1.0),
        Channel::TwoSourceScalarMinus => {
            let x = cfg.x;
            Box::new(move |p| one_minus_sinc(p * x))
        }
        other => return Err(NevanlinnaError::UnsupportedChannel(other).into()),
    };
    let (t, wt) = gauss_legendre(n);
    let half = 0.5 * p_max.sqrt();
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    let mut v_eff = Vec::with_capacity(n);
    for (ti, wi) in t.iter().zip(&wt) {
        let u = half * (ti + 1.0);
        let p = u * u;
        let w = 4.0 * PI * p * p * 2.0 * u * wi * half;
        nodes.push(p);
        weights.push(w);
        v_eff.push((w * angular(p) / p).sqrt());
    }
    let target = krein_denominator(SpectralPoint::negative(MU_REF).expect("negative reference point"), cfg)?.re;
    let c = target + nodes.iter().zip(&v_eff).map(|(p, v)| v * v / (p * p - MU_REF)).sum::<f64>();
    Ok(GridModel {
        nodes,
        weights,
        v_eff,
        kappa_ref: (MU_REF, target),
        p_max,
        channel: cfg.channel,
        x: cfg.x,
        c,
        spectrum: OnceLock::new(),
    })
}

impl GridModel {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Finite `κ − σ_N(μ)`.
    pub fn denominator(&self, mu: f64) -> f64 {
        self.c - self.nodes.iter().zip(&self.v_eff).map(|(p, v)| v * v / (p * p - mu)).sum::<f64>()
    }

    /// `σ_N(μ) − σ_N(ν)`.
    pub fn sigma_difference(&self, mu: f64, nu: f64) -> f64 {
        self.denominator(nu) - self.denominator(mu)
    }

    /// Secular function and its τ-derivative at `e = p_k² − τ`.
    fn secular(&self, k: usize, tau: f64) -> (f64, f64) {
        let pk2 = self.nodes[k] * self.nodes[k];
        let mut f = self.c;
        let mut df = 0.0;
        for (i, (p, v)) in self.nodes.iter().zip(&self.v_eff).enumerate() {
            let d = if i == k { tau } else { (p * p - pk2) + tau };
            let v2 = v * v;
            f -= v2 / d;
            df += v2 / (d * d);
        }
        (f, df)
    }

    fn solve_bracket(&self, k: usize) -> Result<f64, OracleError> {
        let pk2 = self.nodes[k] * self.nodes[k];
        let mut lo = 0.0;
        let mut hi = if k > 0 {
            let pm = self.nodes[k - 1];
            pk2 - pm * pm
        } else {
            let mut h = pk2 + 1.0;
            while self.secular(0, h).0 <= 0.0 {
                h *= 4.0;
                if !h.is_finite() {
                    return Err(OracleError::Bracket { index: 0, lo: f64::NEG_INFINITY, hi: pk2 });
                }
            }
            h
        };
        // Secular function increases in τ: −∞ at τ→0⁺, positive at the far end.
        let mut tau = 0.5 * hi;
        for _ in 0..200 {
            let (f, df) = self.secular(k, tau);
            if f == 0.0 {
                return Ok(tau);
            }
            if f < 0.0 {
                lo = tau;
            } else {
                hi = tau;
            }
            let newton = tau - f / df;
            let next = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
            if (next - tau).abs() <= 4.0 * f64::EPSILON * tau || hi - lo <= 4.0 * f64::EPSILON * hi {
                return Ok(next);
            }
            tau = next;
        }
        if hi > lo {
            Ok(tau)
        } else {
            Err(OracleError::Bracket { index: k, lo: pk2 - hi, hi: pk2 - lo })
        }
    }

    /// Offsets of all roots, one per bracket (computed once, in parallel).
    pub fn spectrum(&self) -> Result<&Spectrum, OracleError> {
        self.spectrum
            .get_or_init(|| {
                let offsets: Result<Vec<f64>, OracleError> =
                    (0..self.len()).into_par_iter().map(|k| self.solve_bracket(k)).collect();
                offsets.map(|offsets| Spectrum { offsets })
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    pub fn eigenvalue(&self, k: usize) -> Result<f64, OracleError> {
        let p = self.nodes[k];
        Ok(p * p - self.spectrum()?.offsets[k])
    }

    /// `q_k ∝ v/(p² − e_k)`, normalized.
    pub fn eigenvector(&self, k: usize) -> Result<Vec<f64>, OracleError> {
        let tau = self.spectrum()?.offsets[k];
        let pk2 = self.nodes[k] * self.nodes[k];
        let mut q: Vec<f64> = self
            .nodes
            .iter()
            .zip(&self.v_eff)
            .enumerate()
            .map(|(i, (p, v))| v / if i == k { tau } else { (p * p - pk2) + tau })
            .collect();
        let norm = q.iter().map(|a| a * a).sum::<f64>().sqrt();
        q.iter_mut().for_each(|a| *a /= norm);
        Ok(q)
    }

    /// `‖(H − e_k) q_k‖` with `H = diag(p²) − v vᵀ/c`.
    pub fn eigenvector_residual(&self, k: usize) -> Result<f64, OracleError> {
        let q = self.eigenvector(k)?;
        let tau = self.spectrum()?.offsets[k];
        let pk2 = self.nodes[k] * self.nodes[k];
        let vq: f64 = self.v_eff.iter().zip(&q).map(|(v, a)| v * a).sum();
        let r2: f64 = self
            .nodes
            .iter()
            .zip(&self.v_eff)
            .zip(&q)
            .enumerate()
            .map(|(i, ((p, v), a))| {
                let d = if i == k { tau } else { (p * p - pk2) + tau };
                let r = d * a - v * vq / self.c;
                r * r
            })
            .sum();
        Ok(r2.sqrt())
    }

    /// Eigenvalues in bracket order.
    pub fn eigenvalues(&self) -> Result<Vec<f64>, OracleError> {
        let s = self.spectrum()?;
        Ok(self.nodes.iter().zip(&s.offsets).map(|(p, t)| p * p - t).collect())
    }

    /// Sum over eigenpairs of `g(e_k)·(q_k·a)(q_k·b)`.
    fn spectral_form(&self, a: &[f64], b: &[f64], g: impl Fn(f64) -> f64 + Sync) -> Result<f64, OracleError> {
        let s = self.spectrum()?;
        let terms: Vec<f64> = (0..self.len())
            .into_par_iter()
            .map(|k| {
                let tau = s.offsets[k];
                let pk2 = self.nodes[k] * self.nodes[k];
                let (mut nn, mut qa, mut qb) = (0.0, 0.0, 0.0);
                for i in 0..self.len() {
                    let p = self.nodes[i];
                    let d = if i == k { tau } else { (p * p - pk2) + tau };
                    let q = self.v_eff[i] / d;
                    nn += q * q;
                    qa += q * a[i];
                    qb += q * b[i];
                }
                g(pk2 - tau) * qa * qb / nn
            })
            .collect();
        Ok(terms.iter().sum())
    }
}

/// `secular_eigenvalues(model)`: all `N` eigenvalues of the finite model.
pub fn secular_eigenvalues(model: &GridModel) -> Result<Vec<f64>, OracleError> {
    model.eigenvalues()
}

/// Spectral function applied by [`oracle_trace`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TraceFunction {
    Sqrt,
    Ln,
    Resolvent { mu: f64 },
    /// Quadratic form of `H^{1/2}` on the finite `R_ρ v`.
    OmegaOnRv { rho: f64 },
    /// `√e·e^{−e/Λ}`, the smoothly cut square root.
    RegulatedSqrt { cutoff: f64 },
}

/// `Σ_k [f(e_k) − f(p_k²)]`, or the `ω` quadratic form for [`TraceFunction::OmegaOnRv`].
pub fn oracle_trace(model: &GridModel, f: TraceFunction) -> Result<f64, OracleError> {
    let s = model.spectrum()?;
    let pairs = model.nodes.iter().zip(&s.offsets);
    let needs_positive = matches!(f, TraceFunction::Sqrt | TraceFunction::Ln | TraceFunction::RegulatedSqrt { .. } | TraceFunction::OmegaOnRv { .. });
    if needs_positive {
        let e0 = model.eigenvalue(0)?;
        if e0 <= 0.0 {
            return Err(OracleError::NegativeEigenvalue(e0));
        }
    }
    let terms: Vec<f64> = match f {
        TraceFunction::Sqrt => pairs.map(|(p, t)| -t / ((p * p - t).sqrt() + p)).collect(),
        TraceFunction::Ln => pairs.map(|(p, t)| (-t / (p * p)).ln_1p()).collect(),
        TraceFunction::Resolvent { mu } => pairs
            .map(|(p, t)| {
                let a = p * p - mu;
                t / (a * (a - t))
            })
            .collect(),
        TraceFunction::RegulatedSqrt { cutoff } => pairs
            .map(|(p, t)| {
                let e = p * p - t;
                e.sqrt() * (-e / cutoff).exp() - p * (-p * p / cutoff).exp()
            })
            .collect(),
        TraceFunction::OmegaOnRv { rho } => {
            let u: Vec<f64> = model.nodes.iter().zip(&model.v_eff).map(|(p, v)| v / (p * p - rho)).collect();
            return model.spectral_form(&u, &u, f64::sqrt);
        }
    };
    Ok(terms.iter().sum())
}

/// Resolvent form `(f, (H_full − μ)^{−1} f)` of the two-channel finite model.
///
/// The component of `f` along the angular profile of the source vector,
/// `f∥ = √w·f·√((1 − sinc)/2)`, sees the rank-one model; the orthogonal
/// remainder `w f² − f∥²` is free.
pub fn oracle_krein_form(model: &GridModel, mu: f64, f: &RadialTestFunction) -> Result<f64, OracleError> {
    let x = model.x;
    let single = model.channel == Channel::SingleSourceScalar;
    let mut par = Vec::with_capacity(model.len());
    let mut free = 0.0;
    for (p, w) in model.nodes.iter().zip(&model.weights) {
        let fp = f.eval(*p);
        let full = w * fp * fp;
        let along = if single { full } else { full * 0.5 * one_minus_sinc(p * x) };
        par.push(along.sqrt());
        free += (full - along) / (p * p - mu);
    }
    Ok(free + model.spectral_form(&par, &par, |e| 1.0 / (e - mu))?)
}
