use krein::nevanlinna::{krein_denominator, Channel, ExtensionConfig, SpectralPoint};
use krein::positivity::*;
use krein::real::EULER_GAMMA;

const X_B_SCALAR: f64 = 1.526_205_111_595_863_9;
const X_B_VECTOR: f64 = 2.129_990_816_973_089_5;

fn cfg(kt: f64, x: f64, ch: Channel) -> ExtensionConfig {
    ExtensionConfig::new(kt, x, ch).unwrap()
}

fn den(mu: f64, c: &ExtensionConfig) -> f64 {
    krein_denominator(SpectralPoint::negative(mu).unwrap(), c).unwrap().re
}

#[test]
fn boundary_radius_scalar() {
    let xb = x_boundary(1.0, Channel::TwoSourceScalarMinus).unwrap();
    assert!((xb - X_B_SCALAR).abs() < 1e-15);
    let root = x_boundary_bisection(1.0, Channel::TwoSourceScalarMinus).unwrap();
    assert!((root.x_b - xb).abs() <= 1e-10);
    assert!(root.bracket.0 <= xb && xb <= root.bracket.1);
    // 2π ln κ̃x² + 4π(γ − 1) = 0 at the root.
    let r = 2.0 * std::f64::consts::PI * (xb * xb).ln() + 4.0 * std::f64::consts::PI * (EULER_GAMMA - 1.0);
    assert!(r.abs() < 1e-13);
    let half = x_boundary(4.0, Channel::TwoSourceScalarMinus).unwrap();
    assert_eq!(half, 0.5 * xb);
}

#[test]
fn boundary_radius_scales_with_coupling() {
    for k in 0..=40 {
        let kt = 10f64.powf(-2.0 + 0.1 * k as f64);
        let xb = x_boundary_bisection(kt, Channel::TwoSourceScalarMinus).unwrap().x_b;
        assert!((xb * kt.sqrt() - X_B_SCALAR).abs() <= 1e-10, "κ̃={kt}");
    }
}

#[test]
fn boundary_radius_vector() {
    for ch in [Channel::VectorUMinus, Channel::VectorVMinus] {
        let root = x_boundary_bisection(1.0, ch).unwrap();
        assert!((root.x_b - X_B_VECTOR).abs() <= 1e-10, "{}", root.x_b);
        assert!(root.bracket.0 < root.bracket.1);
        assert!(root.residual.abs() < 1e-12);
        assert_eq!(x_boundary(1.0, ch).unwrap(), root.x_b);
    }
    assert!(x_boundary(1.0, Channel::VectorVPlus).is_err());
    assert!(x_boundary(1.0, Channel::SingleSourceScalar).is_err());
}

#[test]
fn positive_below_boundary() {
    let c = cfg(1.0, 1.0, Channel::TwoSourceScalarMinus);
    let r = classify(&c);
    assert_eq!(r.verdict, Verdict::Positive);
    assert!(r.pole_mu.is_none() && r.bracket.is_none());
    // Dense sign scan confirms.
    for k in 0..=1400 {
        let mu = -10f64.powf(6.0 - 0.01 * k as f64);
        assert!(den(mu, &c) > 0.0, "μ={mu}");
    }
}

#[test]
fn negative_eigenvalue_above_boundary() {
    let c = cfg(1.0, 2.0, Channel::TwoSourceScalarMinus);
    let r = classify(&c);
    assert_eq!(r.verdict, Verdict::NegativeEigenvalue);
    let p = r.pole_mu.unwrap();
    let b = r.bracket.unwrap();
    assert!(p < 0.0 && b.lo <= p && p <= b.hi && b.hi < 0.0);
    assert!(den(b.lo, &c) > 0.0 && den(b.hi, &c) < 0.0);
    assert!(den(p, &c).abs() <= 1e-10);
    // No second sign change.
    let mut changes = 0;
    let mut prev = den(-1e6, &c);
    for k in 1..=1000 {
        let d = den(-10f64.powf(6.0 - 0.014 * k as f64), &c);
        if d.signum() != prev.signum() {
            changes += 1;
        }
        prev = d;
    }
    assert_eq!(changes, 1);
}

#[test]
fn single_source_and_plus_channels() {
    let r = classify(&cfg(2.0, 1.0, Channel::SingleSourceScalar));
    assert_eq!(r.verdict, Verdict::NegativeEigenvalue);
    assert_eq!(r.pole_mu, Some(-2.0));
    for kt in [0.01, 1.0, 50.0] {
        for x in [0.1, 1.0, 5.0] {
            for ch in [Channel::VectorVPlus, Channel::VectorUPlus] {
                let c = cfg(kt, x, ch);
                let r = classify(&c);
                assert_eq!(r.verdict, Verdict::NegativeEigenvalue);
                let p = r.pole_mu.unwrap();
                assert!(den(p, &c).abs() <= 1e-10 * den(10.0 * p, &c).abs().max(1.0), "{ch} κ̃={kt} x={x}");
            }
        }
    }
}

#[test]
fn verdict_flips_once_along_sweep() {
    let mut last = Verdict::Positive;
    let mut flips = 0;
    let mut poles = Vec::new();
    for k in 0..=200 {
        let x = 1.0 + k as f64 * 0.005;
        let r = classify(&cfg(1.0, x, Channel::TwoSourceScalarMinus));
        if r.verdict != last {
            flips += 1;
            last = r.verdict;
        }
        if let Some(p) = r.pole_mu {
            poles.push((x, p));
        }
    }
    assert_eq!(flips, 1);
    // pole_mu → 0⁻ monotonically as x ↓ x_b.
    for w in poles.windows(2) {
        assert!(w[0].1 > w[1].1);
    }
    for eps in [1e-2, 1e-4, 1e-6] {
        let r = classify(&cfg(1.0, X_B_SCALAR * (1.0 + eps), Channel::TwoSourceScalarMinus));
        let p = r.pole_mu.unwrap();
        assert!(p < 0.0 && p > -10.0 * eps, "ε={eps}: {p}");
    }
}

#[test]
fn boundary_band() {
    for ch in [Channel::TwoSourceScalarMinus, Channel::VectorVMinus] {
        let xb = x_boundary(1.0, ch).unwrap();
        assert_eq!(classify(&cfg(1.0, xb, ch)).verdict, Verdict::Boundary);
        assert_eq!(classify(&cfg(1.0, xb * (1.0 + 5e-10), ch)).verdict, Verdict::Boundary);
        assert_eq!(classify(&cfg(1.0, xb * (1.0 - 2e-9), ch)).verdict, Verdict::Positive);
        assert_eq!(classify(&cfg(1.0, xb * (1.0 + 2e-9), ch)).verdict, Verdict::NegativeEigenvalue);
        let r = classify(&cfg(1.0, xb * (1.0 + 2e-9), ch));
        assert!(r.pole_mu.is_some());
    }
}
