//! Plot data.

use std::f64::consts::PI;

use krein::nevanlinna::{krein_denominator, limit_at_zero, Channel, ExtensionConfig, NevanlinnaError, SpectralPoint};
use krein::positivity::x_boundary;

use crate::output::Table;

/// `σ − κ` on the negative axis at separation `x`, at `x_b`, and the single-source
/// reference `2π ln(κ̃/−μ)`.
pub fn sigma_curves(kappa_tilde: f64, x: f64, mus: &[f64]) -> Result<Table, NevanlinnaError> {
    let channel = Channel::TwoSourceScalarMinus;
    let xb = x_boundary(kappa_tilde, channel)?;
    let at_x = ExtensionConfig::new(kappa_tilde, x, channel)?;
    let at_xb = ExtensionConfig::new(kappa_tilde, xb, channel)?;
    let mut t = Table::new(&["mu", "sigma_x", "sigma_xb", "log_reference"]);
    for &mu in mus {
        let p = SpectralPoint::negative(mu).map_err(|_| NevanlinnaError::Domain("mu must be negative"))?;
        let s = -krein_denominator(p, &at_x)?.re;
        let sb = -krein_denominator(p, &at_xb)?.re;
        t.push(vec![mu.into(), s.into(), sb.into(), (2.0 * PI * (kappa_tilde / -mu).ln()).into()]);
    }
    t.note("x", x.into());
    t.note("x_b", xb.into());
    t.note("sigma_at_zero_xb", (-limit_at_zero(&at_xb)?).into());
    Ok(t)
}
