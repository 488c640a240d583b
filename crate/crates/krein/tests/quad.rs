use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use krein::quad::*;
use krein::specfun;
use num_complex::Complex64;

fn cfg(tol: f64) -> QuadConfig<f64> {
    QuadConfig::with_tol(tol)
}

#[test]
fn semi_infinite_corpus() {
    let r = integrate_semi_infinite(|p: f64| (-p).exp(), 0.0, &cfg(1e-12)).unwrap();
    assert!((r.value - 1.0).abs() < 1e-10, "{r:?}");
    let r = integrate_semi_infinite(|p: f64| 1.0 / (p * p + 1.0), 0.0, &cfg(1e-12)).unwrap();
    assert!((r.value - FRAC_PI_2).abs() < 1e-10);
    let r = integrate_semi_infinite(|p: f64| p * p / (p * p + 1.0).powi(2), 0.0, &cfg(1e-12)).unwrap();
    assert!((r.value - FRAC_PI_4).abs() < 1e-10);
    assert!(r.abs_err >= 0.0 && r.n_evals > 0);
}

#[test]
fn sqrt_substitution_handles_inverse_root() {
    // ∫₀^∞ p^{-1/2} e^{-p} dp = √π
    let r = integrate_semi_infinite_sqrt(|p: f64| (-p).exp() / p.sqrt(), &cfg(1e-12)).unwrap();
    assert!((r.value - PI.sqrt()).abs() < 1e-10);
}

#[test]
fn complex_integrand() {
    // ∫₀^∞ e^{-(1-i)p} dp = 1/(1-i)
    let r = integrate_semi_infinite(|p: f64| (Complex64::new(-1.0, 1.0) * p).exp(), 0.0, &cfg(1e-12)).unwrap();
    let exact = Complex64::new(1.0, -1.0).inv();
    assert!((r.value - exact).norm() < 1e-10);
}

#[test]
fn oscillatory_dirichlet_integral() {
    let spec = OscillatorySpec::new(1.0, Oscillator::Sin, |p: f64| if p == 0.0 { 1.0 } else { 1.0 / p });
    let r = integrate_oscillatory(&spec, &cfg(1e-11)).unwrap();
    assert!((r.value.re - FRAC_PI_2).abs() < 1e-8, "{r:?}");
    assert_eq!(r.value.im, 0.0);
}

#[test]
fn oscillatory_against_dense_adaptive_and_closed_form() {
    let spec = OscillatorySpec::new(2.0, Oscillator::Sin, |p: f64| 1.0 / (p * p + 1.0));
    let osc = integrate_oscillatory(&spec, &cfg(1e-12)).unwrap().value.re;
    // Dense splitting over [0, 2000π]; the remainder from its leading asymptotic term.
    let pts: Vec<f64> = (0..=4000).map(|k| k as f64 * PI / 2.0).collect();
    let head = integrate_breakpoints(|p: f64| (2.0 * p).sin() / (p * p + 1.0), &pts, &cfg(1e-13)).unwrap();
    let end = *pts.last().unwrap();
    let tail = (2.0 * end).cos() / (2.0 * (end * end + 1.0));
    let dense = head.value + tail;
    assert!((osc - dense).abs() < 1e-8, "osc {osc} dense {dense}");
    // ∫₀^∞ sin(ap)/(p²+1) dp = (e^{-a}Ei(a) + e^{a}E1(a))/2
    let exact = 0.5 * (specfun::exp_ei_real(2.0) + specfun::exp_e1_real(2.0));
    assert!((osc - exact).abs() < 1e-10, "osc {osc} exact {exact}");
}

#[test]
fn oscillatory_zero_envelope() {
    let spec = OscillatorySpec::new(3.0, Oscillator::Exp, |_p: f64| 0.0);
    let r = integrate_oscillatory(&spec, &cfg(1e-10)).unwrap();
    assert_eq!(r.value, Complex64::new(0.0, 0.0));
}

#[test]
fn oscillatory_exponential_phase() {
    // ∫₀^∞ e^{ip}/(p²+1) dp: real part (π/2)e^{-1}, imaginary part from the scaled Ei/E1 pair.
    let spec = OscillatorySpec::new(1.0, Oscillator::Exp, |p: f64| 1.0 / (p * p + 1.0));
    let r = integrate_oscillatory(&spec, &cfg(1e-11)).unwrap();
    assert!((r.value.re - FRAC_PI_2 * (-1.0f64).exp()).abs() < 1e-9);
    let exact_im = 0.5 * (specfun::exp_ei_real(1.0) + specfun::exp_e1_real(1.0));
    assert!((r.value.im - exact_im).abs() < 1e-9);
}

#[test]
fn sine_integral_matches_partitioned_quadrature() {
    let x = 1.0e4;
    let n = (x / PI).floor() as usize;
    let mut pts: Vec<f64> = (0..=n).map(|k| k as f64 * PI).collect();
    pts.push(x);
    let q = integrate_breakpoints(|t: f64| if t == 0.0 { 1.0 } else { t.sin() / t }, &pts, &cfg(1e-12)).unwrap();
    let s = specfun::si(specfun::RayPoint::real(x)).unwrap().re;
    assert!((q.value - s).abs() < 1e-8, "quad {} si {}", q.value, s);
}

#[test]
fn linearity() {
    let f = |p: f64| (-p).exp() * p.cos();
    let g = |p: f64| 1.0 / (1.0 + p * p * p);
    let (a, b) = (0.7, -2.3);
    let c = cfg(1e-11);
    let rf = integrate_semi_infinite(f, 0.0, &c).unwrap();
    let rg = integrate_semi_infinite(g, 0.0, &c).unwrap();
    let rc = integrate_semi_infinite(|p| a * f(p) + b * g(p), 0.0, &c).unwrap();
    let bound = 2.0 * (a.abs() * rf.abs_err + b.abs() * rg.abs_err + rc.abs_err) + 1e-14;
    assert!((rc.value - (a * rf.value + b * rg.value)).abs() <= bound);
}

#[test]
fn refinement_does_not_increase_error() {
    type Case = (Box<dyn Fn(f64) -> f64>, f64);
    let corpus: Vec<Case> = vec![
        (Box::new(|p: f64| (-p).exp()), 1.0),
        (Box::new(|p: f64| 1.0 / (p * p + 1.0)), FRAC_PI_2),
        (Box::new(|p: f64| p * p / (p * p + 1.0).powi(2)), FRAC_PI_4),
    ];
    for (f, exact) in &corpus {
        let mut last = f64::INFINITY;
        for tol in [1e-4, 1e-6, 1e-8, 1e-10, 1e-12] {
            let r = integrate_semi_infinite(f, 0.0, &cfg(tol)).unwrap();
            let err = (r.value - exact).abs();
            assert!(err <= last.max(1e-15), "tol {tol}: {err} > {last}");
            last = err;
        }
    }
}

#[test]
fn deterministic_across_threads() {
    let run = || integrate_semi_infinite(|p: f64| p.sin().powi(2) * (-p / 3.0).exp() / (1.0 + p), 0.0, &cfg(1e-10)).unwrap().value;
    let base = run();
    let handles: Vec<_> = (0..4).map(|_| std::thread::spawn(run)).collect();
    for h in handles {
        assert_eq!(h.join().unwrap().to_bits(), base.to_bits());
    }
}

#[test]
fn errors_are_reported() {
    let r = integrate(|p: f64| 1.0 / p, 0.0, 1.0, &QuadConfig { abs_tol: 1e-12, rel_tol: 1e-12, max_evals: 2000 });
    assert!(r.is_err());
    let e = r.unwrap_err();
    assert!(matches!(e, QuadError::NonFinite { .. } | QuadError::BudgetExceeded { .. } | QuadError::RoundoffLimited { .. }));
    let nan = integrate(|_p: f64| f64::NAN, 0.0, 1.0, &cfg(1e-8));
    assert!(matches!(nan, Err(QuadError::NonFinite { .. })));
    let budget = integrate(|p: f64| (1.0 / p).sin(), 1e-9, 1.0, &QuadConfig { abs_tol: 1e-14, rel_tol: 1e-14, max_evals: 500 });
    match budget {
        Err(QuadError::BudgetExceeded { best }) => assert!(best.value.is_finite()),
        other => panic!("expected budget error, got {other:?}"),
    }
}
