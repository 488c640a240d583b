use std::f64::consts::PI;

use krein::kernels::*;
use krein::nevanlinna::{krein_denominator, Channel, ExtensionConfig, SpectralPoint};
use krein::quad::{integrate_oscillatory, integrate_semi_infinite, Oscillator, OscillatorySpec, QuadConfig};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn quad<F: Fn(f64) -> f64>(f: F) -> f64 {
    integrate_semi_infinite(f, 0.0, &QuadConfig::with_tol(1e-13)).unwrap().value
}

fn scalar(kt: f64, x: f64) -> ExtensionConfig {
    ExtensionConfig::new(kt, x, Channel::TwoSourceScalarMinus).unwrap()
}

#[test]
fn coordinate_kernel_reference_values() {
    // (μ, r, value) from an independent oscillatory quadrature at 25 digits.
    for (mu, r, want) in [
        (-1.0, 1.0, 0.485_168_094_924_409_49),
        (-1.0, 0.01, 18.228_049_944_768_850),
        (-1.0, 3.0, 0.051_190_061_908_153_183),
        (-4.0, 0.5, 0.686_131_299_872_817_08),
    ] {
        let v = r_v_coordinate(mu, r).unwrap();
        assert!((v - want).abs() <= 1e-9 * want, "μ={mu} r={r}: {v} vs {want}");
    }
}

#[test]
fn coordinate_kernel_small_radius() {
    // r^{1/2}·value → 2 with an O(r^{1/2}) deficit.
    let mut last = f64::INFINITY;
    for r in [1e-2_f64, 1e-4, 1e-6, 1e-8] {
        let s = r.sqrt() * r_v_coordinate(-1.0, r).unwrap();
        let deficit = 2.0 - s;
        assert!(deficit > 0.0 && deficit < last);
        assert!(deficit / r.sqrt() < 2.0 && deficit / r.sqrt() > 1.5, "r={r}: {deficit}");
        last = deficit;
    }
    let a = 1e-4f64.sqrt() * r_v_coordinate(-1.0, 1e-4).unwrap();
    let b = 1e-8f64.sqrt() * r_v_coordinate(-1.0, 1e-8).unwrap();
    assert!((a - b).abs() / b < 1e-2);
}

#[test]
fn coordinate_kernel_p_variable_and_scaling() {
    for r in [0.3, 1.0, 2.0] {
        let cutoff = 4000.0 * PI / r;
        let pts: Vec<f64> = (0..=4000).map(|k| k as f64 * PI / r).collect();
        let head = krein::quad::integrate_breakpoints(
            |p: f64| p.sqrt() * (p * r).sin() / (p * p + 1.0),
            &pts,
            &QuadConfig::with_tol(1e-13),
        )
        .unwrap()
        .value;
        // Leading tail term of ∫ p^{−3/2} sin(pr) beyond the last zero.
        let tail = cutoff.powf(-1.5) / r;
        let p_form = 4.0 * PI / (2.0 * PI).powf(1.5) / r * (head + tail);
        let v = r_v_coordinate(-1.0, r).unwrap();
        assert!((v - p_form).abs() <= 1e-7 * v.abs(), "r={r}: {v} vs {p_form}");
    }
    for (mu, r) in [(-4.0, 0.5), (-0.01, 7.0), (-100.0, 0.05)] {
        let lhs = r_v_coordinate(mu, r).unwrap();
        let rhs = (-mu).powf(0.25) * r_v_coordinate(-1.0, (-mu).sqrt() * r).unwrap();
        assert!((lhs - rhs).abs() <= 1e-9 * lhs.abs());
    }
    assert!(r_v_coordinate(1.0, 1.0).is_err());
    assert!(r_v_coordinate(-1.0, 0.0).is_err());
}

#[test]
fn inner_products_closed_forms() {
    for (mu, x) in [(-2.0, 1.0), (-1.0, 1.0), (-0.3, 4.0), (-9.0, 0.2), (-1.0, 1e-3)] {
        let m2: f64 = -mu;
        // Split 1 − sin(px)/(px): plain part by the semi-infinite map, sine part zero-partitioned.
        let osc = |env: Box<dyn Fn(f64) -> f64>| {
            let spec = OscillatorySpec::new(x, Oscillator::Sin, env);
            integrate_oscillatory(&spec, &QuadConfig::with_tol(1e-13)).unwrap().value.re
        };
        let p = quad(|p| 4.0 * PI * p * p / (p * p + m2).powi(2))
            - osc(Box::new(move |p| 4.0 * PI * p / x / (p * p + m2).powi(2)));
        let ip = inner_p(mu, x).unwrap();
        assert!((ip - p).abs() <= 1e-8 * p, "inner_p μ={mu} x={x}: {ip} vs {p}");
        if x >= 0.1 {
            let q = quad(|p| 4.0 * PI / (p * p + m2).powi(2))
                - osc(Box::new(move |p| if p == 0.0 { 4.0 * PI * x / m2.powi(2) } else { 4.0 * PI / (p * x) / (p * p + m2).powi(2) }));
            let iq = inner_inv_p(mu, x).unwrap();
            assert!((iq - q).abs() <= 1e-8 * q, "inner_inv_p μ={mu} x={x}: {iq} vs {q}");
        } else {
            let q = quad(|p| 4.0 * PI * krein::nevanlinna::one_minus_sinc(p * x) / (p * p + m2).powi(2));
            let iq = inner_inv_p(mu, x).unwrap();
            assert!((iq - q).abs() <= 1e-8 * q, "inner_inv_p μ={mu} x={x}: {iq} vs {q}");
        }
    }
    assert!((inner_p(-1.0, 1e3).unwrap() - PI * PI).abs() < 1e-14);
    assert!((inner_inv_p(-1.0, 1e9).unwrap() - PI * PI * (1.0 - 2e-9)).abs() < 1e-14);
    assert!(inner_p(-1.0, 1e-14).unwrap() < 1e-12);
    // Leading small-x behaviour π²x²/(6m) of the 1/p product.
    let x = 1e-4;
    assert!((inner_inv_p(-1.0, x).unwrap() / (PI * PI * x * x / 6.0) - 1.0).abs() < 1e-3);
    // Both sides of the series switch at mx = 1/2 against 30-digit values.
    for (y, want) in [
        (0.4999, 0.322_161_545_868_714_09),
        (0.5001, 0.322_388_746_971_479_93),
        (0.1, 0.015_651_008_980_992_674),
        (2.0, 2.671_411_414_109_495),
    ] {
        let v = inner_inv_p(-1.0, y).unwrap();
        assert!((v - want).abs() <= 1e-14 * want, "y={y}: {v} vs {want}");
    }
}

#[test]
fn test_function_norms() {
    for f in [
        RadialTestFunction::gaussian(0.7).unwrap(),
        RadialTestFunction::gaussian(2.0).unwrap(),
        RadialTestFunction::rational(2).unwrap(),
        RadialTestFunction::rational(3).unwrap(),
        RadialTestFunction::rational(5).unwrap(),
    ] {
        let q = quad(|p| 4.0 * PI * p * p * f.eval(p).powi(2));
        assert!((f.norm_sq() - q).abs() <= 1e-9 * q, "{f:?}");
    }
    assert!(RadialTestFunction::rational(1).is_err());
    assert!(RadialTestFunction::gaussian(0.0).is_err());
}

#[test]
fn krein_form_reference_value() {
    // Free part and source overlap at μ = −1 for e^{−p²}, frozen from a 25-digit quadrature.
    let f = RadialTestFunction::gaussian(1.0).unwrap();
    let c = scalar(1.0, 1.0);
    let mu = SpectralPoint::negative(-1.0).unwrap();
    let free = free_form(mu, &f).unwrap();
    let ov = source_overlap(mu, &f, &c).unwrap();
    assert!((free.re - 1.238_403_968_444_676_4).abs() < 1e-11);
    assert!((ov.re - 0.286_968_241_960_135_3).abs() < 1e-11);
    let den = krein_denominator(mu, &c).unwrap().re;
    let k = krein_form(mu, &f, &c).unwrap();
    assert!((k.re - (free.re + ov.re * ov.re / den)).abs() < 1e-14);
    assert_eq!(k.im, 0.0);
}

#[test]
fn krein_form_weak_coupling_limit() {
    // κ − σ grows like 2π ln(1/κ̃), so the correction decays like c²/(2π ln(1/κ̃)).
    let f = RadialTestFunction::gaussian(1.0).unwrap();
    let mu = SpectralPoint::negative(-1.0).unwrap();
    let free = free_form(mu, &f).unwrap();
    let c = source_overlap(mu, &f, &scalar(1.0, 1.0)).unwrap();
    let mut last = f64::INFINITY;
    for kt in [1e-3, 1e-12, 1e-50, 1e-100, 1e-300] {
        let k = krein_form(mu, &f, &scalar(kt, 1.0)).unwrap();
        let corr = (k - free).norm();
        assert!(corr < last);
        last = corr;
        if kt <= 1e-100 {
            let lead = c.norm_sqr() / (2.0 * PI * (1.0 / kt).ln());
            assert!((corr / lead - 1.0).abs() < 0.05, "κ̃={kt}: {corr} vs {lead}");
        }
    }
}

#[test]
fn krein_form_conjugate_symmetry_and_monotonicity() {
    let c = scalar(1.0, 1.0);
    for f in [RadialTestFunction::gaussian(1.3).unwrap(), RadialTestFunction::rational(3).unwrap()] {
        for mu in [Complex64::new(-1.0, 0.5), Complex64::new(2.0, 1.0), Complex64::new(-0.1, 3.0)] {
            let a = krein_form(SpectralPoint::off_axis(mu).unwrap(), &f, &c).unwrap();
            let b = krein_form(SpectralPoint::off_axis(mu.conj()).unwrap(), &f, &c).unwrap();
            assert!((a - b.conj()).norm() <= 1e-13 * a.norm());
            // Nevanlinna property of the resolvent form.
            assert!(a.im > 0.0);
        }
        let mut last = f64::NEG_INFINITY;
        for k in 0..60 {
            let mu = -10f64.powf(2.0 - 0.1 * k as f64);
            let v = krein_form(SpectralPoint::negative(mu).unwrap(), &f, &c).unwrap().re;
            assert!(v > last, "μ={mu}");
            last = v;
        }
    }
    assert!(krein_form(SpectralPoint::above(1.0).unwrap(), &RadialTestFunction::gaussian(1.0).unwrap(), &c).is_err());
    let vec = ExtensionConfig::new(1.0, 1.0, Channel::VectorVMinus).unwrap();
    assert!(krein_form(SpectralPoint::negative(-1.0).unwrap(), &RadialTestFunction::gaussian(1.0).unwrap(), &vec).is_err());
}

#[test]
fn angular_average_identity() {
    // 3D overlap of f with (1 − e^{ip·x})/√2 against its radial reduction, by a product rule over cos θ.
    let f = RadialTestFunction::gaussian(1.0).unwrap();
    let x = 1.3;
    let nodes = 4000;
    let radial = quad(|p| {
        let mut s = 0.0;
        for j in 0..nodes {
            // Midpoint rule in cos θ.
            let c = -1.0 + (2.0 * j as f64 + 1.0) / nodes as f64;
            s += (1.0 - (p * x * c).cos()) / nodes as f64;
        }
        4.0 * PI * p * p.sqrt() * s * f.eval(p) / (p * p + 1.0) / std::f64::consts::SQRT_2
    });
    let reduced = source_overlap(SpectralPoint::negative(-1.0).unwrap(), &f, &scalar(1.0, x)).unwrap().re;
    assert!((radial - reduced).abs() <= 1e-5 * reduced, "{radial} vs {reduced}");
}

#[test]
fn sqrt_weight_properties() {
    let c = scalar(1.0, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let lambda = 10f64.powf(rng.gen_range(-6.0..6.0));
        let w = sqrt_spectral_weight_complex(lambda, &c).unwrap();
        assert!(w.im.abs() <= 1e-12 * w.re.abs().max(1e-300) || w.im.abs() <= 1e-12);
        assert!(w.re >= 0.0);
    }
    // Algebraic cross-check at λ = 1.
    let g = krein::nevanlinna::gap(1.0, &c).unwrap();
    let d = krein_denominator(SpectralPoint::above(1.0).unwrap(), &c).unwrap();
    let alt = g / (Complex64::new(0.0, 2.0 * PI) * d.norm_sqr());
    let w = sqrt_spectral_weight(1.0, &c).unwrap();
    assert!((w - alt.re).abs() <= 1e-10 * w && alt.im.abs() <= 1e-15);
    // Vanishes at the edge for x < x_b.
    // Edge behaviour w ≈ π λ^{3/2}/(3 D₀²), D₀ = κ − σ(0⁻).
    let d0 = krein::nevanlinna::limit_at_zero(&c).unwrap();
    let mut last = f64::INFINITY;
    for lambda in [1e-2_f64, 1e-4, 1e-6, 1e-8] {
        let w = sqrt_spectral_weight(lambda, &c).unwrap();
        assert!(w < last);
        last = w;
        if lambda <= 1e-6 {
            let lead = PI * lambda.powf(1.5) / (3.0 * d0 * d0);
            assert!((w / lead - 1.0).abs() < 1e-3, "λ={lambda}: {w} vs {lead}");
        }
    }
    assert!(sqrt_spectral_weight(1.0, &ExtensionConfig::new(1.0, 1.0, Channel::VectorVPlus).unwrap()).is_err());
}
