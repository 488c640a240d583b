//! Spectral parameter with an explicit side tag for boundary values on the cut.

use num_complex::Complex;

use crate::real::Real;

/// Which boundary value is meant for a point on the positive real axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    /// Ordinary point off the closed positive half-axis.
    OffAxis,
    /// Limit from the upper half-plane, `λ + i0`.
    AboveCut,
    /// Limit from the lower half-plane, `λ − i0`.
    BelowCut,
}

/// Complex spectral parameter `μ` together with its side tag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPoint<T> {
    pub mu: Complex<T>,
    pub side: Side,
}

/// Reason a `SpectralPoint` could not be formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum PointError {
    #[error("side-tagged point must lie on the open positive real axis")]
    NotOnCut,
    #[error("off-axis point lies on the cut [0, ∞); tag it with a side")]
    OnCut,
    #[error("non-finite spectral parameter")]
    NonFinite,
}

impl<T: Real> SpectralPoint<T> {
    /// Off-axis point; rejects the closed positive half-axis.
    pub fn off_axis(mu: Complex<T>) -> Result<Self, PointError> {
        if !(mu.re.is_finite() && mu.im.is_finite()) {
            return Err(PointError::NonFinite);
        }
        if mu.im == T::zero() && mu.re >= T::zero() {
            return Err(PointError::OnCut);
        }
        Ok(Self { mu, side: Side::OffAxis })
    }

    /// Real negative point `μ < 0`.
    pub fn negative(mu: T) -> Result<Self, PointError> {
        Self::off_axis(Complex::new(mu, T::zero()))
    }

    /// Boundary value `λ + i0`.
    pub fn above(lambda: T) -> Result<Self, PointError> {
        Self::on_cut(lambda, Side::AboveCut)
    }

    /// Boundary value `λ − i0`.
    pub fn below(lambda: T) -> Result<Self, PointError> {
        Self::on_cut(lambda, Side::BelowCut)
    }

    fn on_cut(lambda: T, side: Side) -> Result<Self, PointError> {
        if !lambda.is_finite() {
            return Err(PointError::NonFinite);
        }
        if lambda <= T::zero() {
            return Err(PointError::NotOnCut);
        }
        Ok(Self { mu: Complex::new(lambda, T::zero()), side })
    }

    /// Complex conjugate point (swaps cut sides).
    pub fn conj(self) -> Self {
        let side = match self.side {
            Side::OffAxis => Side::OffAxis,
            Side::AboveCut => Side::BelowCut,
            Side::BelowCut => Side::AboveCut,
        };
        Self { mu: self.mu.conj(), side }
    }

    /// True for a real point on the negative half-axis.
    pub fn is_negative_real(&self) -> bool {
        self.side == Side::OffAxis && self.mu.im == T::zero() && self.mu.re < T::zero()
    }

    /// Principal `Ln(−μ·s)` for a positive scale `s`, resolved by side on the cut.
    pub fn ln_neg(&self, scale: T) -> Complex<T> {
        let pi = T::PI();
        match self.side {
            Side::OffAxis => (-self.mu * scale).ln(),
            Side::AboveCut => Complex::new((self.mu.re * scale).ln(), -pi),
            Side::BelowCut => Complex::new((self.mu.re * scale).ln(), pi),
        }
    }
}
