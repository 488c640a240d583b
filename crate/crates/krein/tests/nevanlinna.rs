use std::f64::consts::PI;

use krein::nevanlinna::*;
use krein::quad::{integrate_oscillatory, integrate_semi_infinite, Oscillator, OscillatorySpec, QuadConfig};
use krein::real::EULER_GAMMA;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// (kind, re μ or λ, im μ, x, [J, J′, J″, J‴]) at 40-digit working precision.
type JRow = (&'static str, f64, f64, f64, [(f64, f64); 4]);

const JREF: &[JRow] = &[
    ("neg", -1.0, 0.0, 1.0, [(8.1274399678016052, 0.0), (4.3804789828772109, 0.0), (5.4609858126764245, 0.0), (11.605991623820571, 0.0)]),
    ("neg", -0.01, 0.0, 1.0, [(34.322577580604135, 0.0), (621.90452332012375, 0.0), (62727.816401635733, 0.0), (12555909.059902143, 0.0)]),
    ("neg", -100.0, 0.0, 1.0, [(0.12862330910765369, 0.0), (0.0013211880560524086, 0.0), (2.7216828250941028e-5, 0.0), (8.4179819281475389e-7, 0.0)]),
    ("neg", -1e-06, 0.0, 1.3, [(88.821338978127634, 0.0), (3717845.6268222275, 0.0), (2199917207877.9706, 0.0), (2.6034526836664989e+18, 0.0)]),
    ("neg", -4.0, 0.0, 1.0, [(3.2415308837832725, 0.0), (0.64800041724482671, 0.0), (0.24924629585390247, 0.0), (0.1471915757741502, 0.0)]),
    ("neg", -4.2, 0.0, 1.0, [(3.1167271381250782, 0.0), (0.60094318315982509, 0.0), (0.22204721628959393, 0.0), (0.12553786068615872, 0.0)]),
    ("neg", -3.9, 0.0, 1.0, [(3.3076021988909021, 0.0), (0.67368151300218546, 0.0), (0.2645862157390941, 0.0), (0.15983027618604613, 0.0)]),
    ("neg", -10000.0, 0.0, 1.0, [(0.0012568886913509909, 0.0), (1.2571406246839023e-7, 0.0), (2.5147857247098209e-11, 0.0), (7.5458724317371761e-15, 0.0)]),
    ("off", -1.0, 2.0, 1.0, [(4.1379776858320405, 3.8138791266690442), (0.081869716087200038, 1.7353296765526253), (-0.8141348010499424, 0.67155763296039697), (-0.9716043618203689, -0.33313704667595595)]),
    ("off", 3.0, 0.5, 1.0, [(-3.9685436649328355, 10.208565097833521), (-2.0956304977884774, -1.8666730543532632), (1.0333948440872109, -0.033004431953043025), (-0.54004374837689483, 0.23635013869086158)]),
    ("off", 0.5, -2.0, 1.5, [(0.31258779611735675, -4.2216845597048252), (-0.78074316168346692, -0.30112186727855158), (-0.12922633891611146, 0.23868469827463196), (0.11504782639193201, 0.05777478510852115)]),
    ("off", -0.001, 0.002, 1.0, [(43.670712232494281, 6.9395340103886587), (1248.6611917379434, 2512.1164918185326), (-754190.83692837546, 1004890.8859377278), (-1105714929.4756086, -201229439.55831016)]),
    ("off", 10.0, 0.001, 1.0, [(-7.3509532636646001, -0.12867463767457343), (0.43366777311969896, -0.98020656723924106), (0.087322763627955889, 0.15024226034400987), (-0.029532097983240805, -0.013053076013741269)]),
    ("up", 1.0, 0.0, 1.0, [(2.855773735528366, 16.609971470098024), (-7.575365239952576, -2.9724157191340916), (7.5075117724569792, 0.30613071117663136), (-13.733345467564511, -0.022222848158055501)]),
    ("up", 0.01, 0.0, 1.0, [(34.17351096638256, 19.706326566266455), (-634.71679369725666, -3.2865794402981022), (62937.254744531002, 0.32875188805393913), (-12576853.112700526, -0.023486006032227663)]),
    ("up", 3.9, 0.0, 1.0, [(-6.4919861927171735, 9.1904933281237852), (-1.2575673518414232, -2.173178254729419), (0.69328487130715166, 0.24670360258030312), (-0.31083910252174914, -0.018837036607282835)]),
    ("up", 4.1, 0.0, 1.0, [(-6.7300351022549567, 8.7607667057581746), (-1.1248632900443237, -2.1242128240741598), (0.63501502438989464, 0.2429579413833405), (-0.27303254117009706, -0.01861991400971008)]),
    ("up", 100.0, 0.0, 1.0, [(-1.7796513049348781, -1.0738546300638493), (0.063187170517208461, -0.077443767411698082), (0.003187161439220089, 0.0038462930863350944), (-0.00023450536961993358, 9.7452091370867846e-5)]),
    ("up", 1000000.0, 0.0, 1.0, [(0.011088351667396661, 0.016321947904810798), (-8.1665118450914887e-6, 5.542298032486885e-6), (-2.7629797417351179e-9, -4.0888004232514299e-9), (2.0485385522198636e-12, -1.3753525070635927e-12)]),
    ("up", 2.5, 0.0, 0.7, [(1.3189021631977019, 15.948884811151813), (-6.1717752290987578, -2.9040964631463629), (5.1945892827321141, 0.30116203422987044), (-7.6326584476159824, -0.021943648806600299)]),
];

fn point(kind: &str, a: f64, b: f64) -> SpectralPoint {
    match kind {
        "neg" => SpectralPoint::negative(a).unwrap(),
        "off" => SpectralPoint::off_axis(Complex64::new(a, b)).unwrap(),
        "up" => SpectralPoint::above(a).unwrap(),
        _ => unreachable!(),
    }
}

fn close(a: Complex64, b: Complex64, rel: f64) -> bool {
    (a - b).norm() <= rel * b.norm().max(1e-300)
}

fn cfg(channel: Channel, x: f64) -> ExtensionConfig {
    ExtensionConfig::new(1.0, x, channel).unwrap()
}

#[test]
fn j_reference_values() {
    for &(kind, a, b, x, js) in JREF {
        let got = j_derivatives(point(kind, a, b), x).unwrap();
        for (n, (g, &(re, im))) in got.iter().zip(js.iter()).enumerate() {
            let want = Complex64::new(re, im);
            assert!(close(*g, want, 1e-11), "{kind} {a} {b} x={x} J^({n}): {g} vs {want}");
        }
        if kind == "up" {
            let down = j_derivatives(SpectralPoint::below(a).unwrap(), x).unwrap();
            for (u, d) in got.iter().zip(down.iter()) {
                assert_eq!(*u, d.conj());
            }
        }
    }
}

#[test]
fn series_and_closed_form_agree_at_switch() {
    let mut pts = Vec::new();
    for r in [3.0, 3.5, 3.99, 4.0, 4.5] {
        for k in 0..16 {
            let th = PI * (k as f64 + 0.5) / 16.0;
            pts.push(SpectralPoint::off_axis(Complex64::from_polar(r, th)).unwrap());
        }
        pts.push(SpectralPoint::negative(-r).unwrap());
        pts.push(SpectralPoint::above(r).unwrap());
        pts.push(SpectralPoint::below(r).unwrap());
    }
    for mu in pts {
        let s = j_derivatives_series(mu, 1.0).unwrap();
        let c = j_derivatives_closed_form(mu, 1.0).unwrap();
        for n in 0..4 {
            assert!(close(s[n], c[n], 1e-11), "{:?} J^({n}): {} vs {}", mu.mu, s[n], c[n]);
        }
    }
}

#[test]
fn j_matches_sine_quadrature() {
    for (mu, x) in [(-1.0, 1.0), (-0.25, 2.0), (-9.0, 0.5)] {
        let z: f64 = mu * x * x;
        let spec = OscillatorySpec::new(1.0, Oscillator::Sin, move |s: f64| 4.0 * PI / (s * s - z));
        let q = integrate_oscillatory(&spec, &QuadConfig::with_tol(1e-12)).unwrap().value.re;
        let j = j_closed(SpectralPoint::negative(mu).unwrap(), x).unwrap();
        assert!((j.re - q).abs() <= 1e-10 * q.abs(), "μ={mu} x={x}: {} vs {q}", j.re);
        assert_eq!(j.im, 0.0);
    }
}

#[test]
fn scalar_sigma_prime_matches_spectral_integral() {
    // σ′(μ) = 4π ∫₀^∞ (p − sin(px)/x)/(p² − μ)² dp
    for (mu, x) in [(-1.0, 1.0), (-0.3, 1.7), (-20.0, 0.4)] {
        let q = integrate_semi_infinite(
            move |p: f64| 4.0 * PI * p * one_minus_sinc(p * x) / (p * p - mu).powi(2),
            0.0,
            &QuadConfig::with_tol(1e-11),
        )
        .unwrap()
        .value;
        let c = cfg(Channel::TwoSourceScalarMinus, x);
        let s = sigma_prime(SpectralPoint::negative(mu).unwrap(), &c).unwrap();
        assert!((s.re - q).abs() <= 1e-9 * q, "μ={mu} x={x}: {} vs {q}", s.re);
    }
}

fn central<F: Fn(f64) -> Complex64>(f: F, t: f64, h: f64) -> Complex64 {
    (f(t - 2.0 * h) - f(t + 2.0 * h) + (f(t + h) - f(t - h)) * 8.0) / (12.0 * h)
}

#[test]
fn derivatives_match_finite_differences() {
    for ch in Channel::ALL {
        for (mu, x) in [(-0.5, 1.0), (-3.0, 1.1), (-12.0, 0.9), (-0.01, 2.0)] {
            let c = cfg(ch, x);
            let den = |m: f64, xx: f64| krein_denominator(SpectralPoint::negative(m).unwrap(), &c.with_x(xx).unwrap()).unwrap();
            let jet = sigma_jet(SpectralPoint::negative(mu).unwrap(), &c).unwrap();
            let h = 1e-3 * mu.abs();
            let dmu = -central(|m| den(m, x), mu, h);
            assert!(close(jet.sigma_mu, dmu, 1e-7), "{ch} μ={mu}: σ_μ {} vs {dmu}", jet.sigma_mu);
            if ch != Channel::SingleSourceScalar {
                let dx = -central(|xx| den(mu, xx), x, 1e-3 * x);
                assert!((jet.sigma_x - dx).norm() <= 1e-7 * dx.norm().max(1.0), "{ch} μ={mu}: σ_x {} vs {dx}", jet.sigma_x);
                let dmux = central(|xx| sigma_prime(SpectralPoint::negative(mu).unwrap(), &c.with_x(xx).unwrap()).unwrap(), x, 1e-3 * x);
                assert!((jet.sigma_mu_x - dmux).norm() <= 1e-6 * dmux.norm().max(1.0), "{ch} μ={mu}: σ_μx {} vs {dmux}", jet.sigma_mu_x);
            }
        }
    }
}

#[test]
fn herglotz_property() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for ch in Channel::ALL {
        for _ in 0..1000 {
            let re = rng.gen_range(-50.0..50.0);
            let im = 10f64.powf(rng.gen_range(-4.0..1.5));
            let x = rng.gen_range(0.1..3.0);
            let c = cfg(ch, x);
            let mu = SpectralPoint::off_axis(Complex64::new(re, im)).unwrap();
            let d = krein_denominator(mu, &c).unwrap();
            assert!(d.im < 0.0, "{ch} μ={re}+{im}i x={x}: Im σ = {}", -d.im);
            let dc = krein_denominator(mu.conj(), &c).unwrap();
            assert!(close(dc, d.conj(), 1e-14), "{ch}: conjugation");
        }
    }
}

#[test]
fn real_on_negative_axis() {
    for ch in Channel::ALL {
        for mu in [-1e-8, -0.1, -3.0, -4.0, -4.5, -1e3, -1e6] {
            let j = sigma_jet(SpectralPoint::negative(mu).unwrap(), &cfg(ch, 1.0)).unwrap();
            assert_eq!(j.den.im, 0.0);
            assert_eq!(j.sigma_mu.im, 0.0);
            assert!(j.sigma_mu.re > 0.0, "{ch} μ={mu}: σ′ must be positive");
        }
    }
}

#[test]
fn gap_closed_form_matches_sides_and_offset() {
    for ch in [Channel::TwoSourceScalarMinus, Channel::VectorVMinus, Channel::VectorUMinus] {
        for x in [0.5, 1.0, 2.0] {
            let c = cfg(ch, x);
            for k in 0..=30 {
                let lambda = 10f64.powf(-3.0 + 0.2 * k as f64);
                let g = gap(lambda, &c).unwrap();
                let up = krein_denominator(SpectralPoint::above(lambda).unwrap(), &c).unwrap();
                let down = krein_denominator(SpectralPoint::below(lambda).unwrap(), &c).unwrap();
                assert!((down - up - g).norm() <= 1e-10 * up.norm().max(1.0), "{ch} λ={lambda}: sides");
                assert!(g.re == 0.0 && g.im >= 0.0);
                assert_eq!(gap_density(lambda, &c).unwrap(), 0.5 * g.im);
                if (1.0..=1e3).contains(&lambda) {
                    let eps = 1e-7 * lambda;
                    let dp = krein_denominator(SpectralPoint::off_axis(Complex64::new(lambda, eps)).unwrap(), &c).unwrap();
                    let dm = krein_denominator(SpectralPoint::off_axis(Complex64::new(lambda, -eps)).unwrap(), &c).unwrap();
                    assert!((dm - dp - g).norm() <= 1e-5 * g.norm().max(1e-3), "{ch} λ={lambda}: offset {} vs {g}", dm - dp);
                }
            }
        }
    }
    let single = cfg(Channel::SingleSourceScalar, 1.0);
    assert!(matches!(gap(1.0, &single), Err(NevanlinnaError::UnsupportedChannel(_))));
    assert!(gap(-1.0, &cfg(Channel::VectorVMinus, 1.0)).is_err());
}

#[test]
fn gap_small_argument_branch_is_continuous() {
    // (t, vector gap, scalar gap) at λ = t², x = 1
    let table = [
        (0.3, 0.23611040379602127, 0.58951717401618295),
        (0.999999, 2.5396144184096045, 6.2584627745032295),
        (1.000001, 2.5396242145923622, 6.2584865538289826),
        (2.0, 9.130129884903465, 21.52960583296148),
    ];
    for (t, v, sc) in table {
        let lambda = t * t;
        let gv = gap(lambda, &cfg(Channel::VectorVMinus, 1.0)).unwrap().im;
        let gs = gap(lambda, &cfg(Channel::TwoSourceScalarMinus, 1.0)).unwrap().im;
        assert!((gv - v).abs() <= 1e-13 * v, "t={t}: {gv} vs {v}");
        assert!((gs - sc).abs() <= 1e-13 * sc, "t={t}: {gs} vs {sc}");
    }
    let v = one_minus_sinc(1e-4);
    assert!((v - (1e-8 / 6.0 - 1e-16 / 120.0)).abs() <= 1e-15 * v);
}

#[test]
fn limits_at_spectral_edge() {
    let g = EULER_GAMMA;
    for (kt, x) in [(1.0, 1.0), (2.5, 0.7), (0.1, 3.0)] {
        let c = ExtensionConfig::new(kt, x, Channel::TwoSourceScalarMinus).unwrap();
        let want = -(2.0 * PI * (kt * x * x).ln() + 4.0 * PI * (g - 1.0));
        let l = limit_at_zero(&c).unwrap();
        assert!((l - want).abs() < 1e-13, "{l} vs {want}");
        let near = krein_denominator(SpectralPoint::negative(-1e-12).unwrap(), &c).unwrap().re;
        assert!((near - l).abs() < 1e-9);

        let v = ExtensionConfig::new(kt, x, Channel::VectorVMinus).unwrap();
        let want = -(4.0 * PI / 3.0 * (kt * x * x).ln() + 8.0 * PI * (g / 3.0 - 4.0 / 9.0));
        let l = limit_at_zero(&v).unwrap();
        assert!((l - want).abs() < 1e-13, "{l} vs {want}");
    }
    assert!(limit_at_zero(&cfg(Channel::VectorVPlus, 1.0)).is_err());
    assert!(limit_at_zero(&cfg(Channel::SingleSourceScalar, 1.0)).is_err());
}

#[test]
fn small_mu_remainder() {
    let c = small_mu_log_coefficient(Channel::TwoSourceScalarMinus).unwrap();
    assert!((c + PI / 3.0).abs() < 1e-14, "{c}");
    // (κ − σ − limit)/z is affine in ln(−z) with slope −c.
    let cf = cfg(Channel::TwoSourceScalarMinus, 1.0);
    let l = limit_at_zero(&cf).unwrap();
    let q = |z: f64| (krein_denominator(SpectralPoint::negative(z).unwrap(), &cf).unwrap().re - l) / z;
    let slope = (q(-1e-6) - q(-1e-8)) / ((1e-6f64).ln() - (1e-8f64).ln());
    assert!((slope + c).abs() < 1e-3, "{slope} vs {}", -c);
}

#[test]
fn single_source_channel() {
    let c = ExtensionConfig::new(2.0, 1.0, Channel::SingleSourceScalar).unwrap();
    let j = sigma_jet(SpectralPoint::negative(-0.5).unwrap(), &c).unwrap();
    assert!((j.den.re - 2.0 * PI * (0.25f64).ln()).abs() < 1e-14);
    assert!((j.sigma_mu.re - 4.0 * PI).abs() < 1e-14);
    assert_eq!(j.sigma_x, Complex64::new(0.0, 0.0));
    let up = krein_denominator(SpectralPoint::above(1.0).unwrap(), &c).unwrap();
    assert!((up.im + 2.0 * PI * PI).abs() < 1e-14);
}

#[test]
fn config_validation_and_names() {
    assert!(ExtensionConfig::new(0.0, 1.0, Channel::VectorVMinus).is_err());
    assert!(ExtensionConfig::new(1.0, -1.0, Channel::VectorVMinus).is_err());
    assert!(ExtensionConfig::new(1.0, f64::NAN, Channel::TwoSourceScalarMinus).is_err());
    for ch in Channel::ALL {
        assert_eq!(Channel::from_name(ch.name()), Some(ch));
        assert_eq!(ch.to_string(), ch.name());
    }
    assert_eq!(Channel::from_name("bogus"), None);
}

proptest! {
    #[test]
    fn u_and_v_channels_coincide(mu in -100.0_f64..-1e-6, x in 0.05_f64..5.0) {
        let p = SpectralPoint::negative(mu).unwrap();
        let a = krein_denominator(p, &cfg(Channel::VectorUMinus, x)).unwrap();
        let b = krein_denominator(p, &cfg(Channel::VectorVMinus, x)).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn sigma_increases_on_negative_axis(mu in -100.0_f64..-1e-6, x in 0.05_f64..5.0) {
        for ch in Channel::ALL {
            let c = cfg(ch, x);
            let a = krein_denominator(SpectralPoint::negative(mu).unwrap(), &c).unwrap().re;
            let b = krein_denominator(SpectralPoint::negative(mu * 0.999).unwrap(), &c).unwrap().re;
            prop_assert!(b <= a + 1e-12 * a.abs().max(1.0));
        }
    }
}
