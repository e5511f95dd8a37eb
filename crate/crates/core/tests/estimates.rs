mod common;

use common::{params, rel};
use kplab::estimates::*;
use kplab::evolution::{free_block, free_evolve, CutoffSpec};
use kplab::fields::transform::to_physical_dims;
use kplab::fields::{random_field, BandSpec, GridParams, GridSpec, NormSpec, SpaceTimeField, SpectralField};
use kplab::{DispersionParams, Error};
use num_complex::Complex64;
use std::f64::consts::PI;

fn small_grid(y_dims: usize, t_points: usize) -> GridSpec {
    GridSpec::new(GridParams {
        k_max: 4,
        y_points: 16,
        y_length: 8.0 * PI,
        y_dims,
        t_points,
        t_window: 2.5,
    })
    .unwrap()
}

fn band(lo: i64, hi: i64, eta: f64) -> BandSpec {
    BandSpec {
        k_lo: lo,
        k_hi: hi,
        eta_max: eta,
        amplitude: 1.0,
    }
}

/// `|| psi (e^{it phase} u0)(e^{it phase} v0) ||_{L^2}` by sampling every time
/// level on a lattice fine enough for the product.
fn dense_strichartz_numerator(u0: &SpectralField, v0: &SpectralField, cutoff: CutoffSpec, p: &DispersionParams) -> f64 {
    let g = *u0.grid();
    let (nx, ny) = (4 * g.k_max() + 2, 2 * g.y_points());
    let mut total = 0.0;
    for t in g.times() {
        let a = to_physical_dims(&free_evolve(u0, t, p), nx, ny).unwrap();
        let b = to_physical_dims(&free_evolve(v0, t, p), nx, ny).unwrap();
        let psi = cutoff.eval(t);
        let s: f64 = a.values().iter().zip(b.values()).map(|(x, y)| (x * y * psi).norm_sqr()).sum();
        total += s * a.cell_measure() * g.d_t();
    }
    total.sqrt()
}

#[test]
fn strichartz_matches_dense_time_sampling() {
    for (d, alpha) in [(1, 2.0), (2, 2.5)] {
        let g = small_grid(d, 256);
        let p = params(alpha, d);
        let u0 = random_field(g, &band(1, 3, 0.5), 3).unwrap();
        let v0 = random_field(g, &band(2, 4, 0.5), 4).unwrap();
        let cutoff = CutoffSpec::new(1.0).unwrap();
        let ratio = strichartz2d_ratio(&u0, &v0, 0.25, 0.0, cutoff, &p).unwrap();
        let den = u0.sobolev_norm(0.25, 0.0) * v0.sobolev_norm(0.0, 0.0);
        let dense = dense_strichartz_numerator(&u0, &v0, cutoff, &p) / den;
        assert!(rel(ratio, dense) < 1e-8, "d = {d}: {ratio} vs {dense}");
    }
}

#[test]
fn strichartz3d_single_mode() {
    let g = small_grid(2, 256);
    let p = params(2.0, 2);
    let mut u0 = SpectralField::zeros(g);
    u0.set(1, [0, 0], Complex64::new(1.0, 0.0)).unwrap();
    let ratio = strichartz3d_ratio(&u0, &u0, 0.6, 0.6, &p).unwrap();
    let wide = CutoffSpec::new(g.t_window() / 2.0).unwrap();
    let dense = dense_strichartz_numerator(&u0, &u0, wide, &p) / u0.sobolev_norm(0.6, 0.0).powi(2);
    assert!(rel(ratio, dense) < 1e-8, "{ratio} vs {dense}");

    // |u v| = conv^2 everywhere, so the numerator is conv^2 (2 pi)^{1/2} L ||psi||.
    let conv = g.space_constant() * g.eta_measure();
    let psi_l2 = (g.times().iter().map(|t| wide.eval(*t).powi(2)).sum::<f64>() * g.d_t()).sqrt();
    let closed = conv * conv * (2.0 * PI).sqrt() * g.y_length() * psi_l2 / (g.eta_measure() * 2f64.powf(0.6));
    assert!(rel(ratio, closed) < 1e-12, "{ratio} vs {closed}");
}

#[test]
fn zero_denominators_and_bad_inputs() {
    let g = small_grid(1, 64);
    let p = params(2.0, 1);
    let u0 = random_field(g, &band(1, 2, 0.5), 1).unwrap();
    let zero = SpectralField::zeros(g);
    let cutoff = CutoffSpec::new(1.0).unwrap();
    assert!(matches!(strichartz2d_ratio(&u0, &zero, 0.25, 0.0, cutoff, &p), Err(Error::ZeroDenominator)));
    assert!(strichartz3d_ratio(&u0, &u0, 0.6, 0.6, &p).is_err());
    let u = free_block(&u0, Some(cutoff), &p).unwrap();
    let v = SpaceTimeField::new(g, vec![]);
    let x = NormSpec::x(0.0, 0.0, 0.55);
    assert!(matches!(bilinear_ratio(&u, &v, &x, &x, &p), Err(Error::ZeroDenominator)));
    assert!(bilinear_ratio(&u, &u, &NormSpec::y(0.0, 0.0, 0.0), &x, &p).is_err());
}

#[test]
fn bilinear_single_lattice_point() {
    let g = small_grid(1, 64);
    let p = params(3.0, 1);
    let (m, k, n) = (5, 2, [3, 0]);
    let v = Complex64::new(0.7, -0.2);
    let u = SpaceTimeField::delta(g, m, k, n, v);
    let rhs = NormSpec::x_weighted(0.2, 0.1, 0.55, 0.4);
    let lhs = NormSpec::x_weighted(0.2, 0.1, -0.45, 0.4);
    let ratio = bilinear_ratio(&u, &u, &lhs, &rhs, &p).unwrap();

    let bracket = |x: f64| (1.0 + x * x).sqrt();
    let weight = |spec: &NormSpec, m: i64, k: i64, n: i64| {
        let eta = n as f64 * g.d_eta();
        let sigma = m as f64 * g.d_tau() - p.phase_raw(k, eta * eta);
        let kb = bracket(k as f64).powf(p.alpha() + 1.0);
        bracket(k as f64).powf(spec.s1)
            * bracket(eta).powf(spec.s2)
            * bracket(sigma).powf(spec.b)
            * (1.0 + bracket(sigma) / kb).powf(spec.beta)
    };
    let cell = (g.d_tau() * g.eta_measure()).sqrt();
    let c = (2.0 * PI).powf(-1.5) * g.d_tau() * g.eta_measure();
    let out = 2.0 * k as f64 * c * v.norm_sqr() * weight(&lhs, 2 * m, 2 * k, 2 * n[0]) * cell;
    let inp = v.norm() * weight(&rhs, m, k, n[0]) * cell;
    let expect = out / (inp * inp);
    assert!(rel(ratio, expect) < 1e-10, "{ratio} vs {expect}");
}

#[test]
fn bilinear_matches_dense_product() {
    // tau support of the product stays inside the base window, so dense samples are exact.
    let g = small_grid(1, 128);
    let p = params(2.0, 1);
    let cutoff = CutoffSpec::new(1.0).unwrap();
    let u0 = random_field(g, &band(1, 2, 0.5), 11).unwrap();
    let v0 = random_field(g, &band(1, 2, 0.5), 12).unwrap();
    let u = free_block(&u0, Some(cutoff), &p).unwrap();
    let v = free_block(&v0, Some(cutoff), &p).unwrap();
    let rhs = NormSpec::x(0.3, 0.0, 0.55);
    let lhs = NormSpec::x(0.3, 0.0, -0.45);
    let ratio = bilinear_ratio(&u, &v, &lhs, &rhs, &p).unwrap();

    let (nx, ny) = (4 * g.k_max() + 2, 2 * g.y_points());
    let mut samples: std::collections::BTreeMap<(i64, i64), Vec<Complex64>> = Default::default();
    for (j, t) in g.times().into_iter().enumerate() {
        let psi = cutoff.eval(t);
        let a = to_physical_dims(&free_evolve(&u0, t, &p), nx, ny).unwrap();
        let b = to_physical_dims(&free_evolve(&v0, t, &p), nx, ny).unwrap();
        // Coefficients of the product via a direct DFT of the samples.
        let prod: Vec<Complex64> = a.values().iter().zip(b.values()).map(|(x, y)| x * y * psi * psi).collect();
        let conv = g.space_constant() * g.eta_measure();
        for k in -4i64..=4 {
            if k == 0 {
                continue;
            }
            for n in -(g.y_points() as i64)..(g.y_points() as i64) {
                let mut acc = Complex64::new(0.0, 0.0);
                for ix in 0..nx {
                    for iy in 0..ny {
                        let x = 2.0 * PI * ix as f64 / nx as f64;
                        let y = -g.y_length() / 2.0 + iy as f64 * g.y_length() / ny as f64;
                        let eta = n as f64 * g.d_eta();
                        acc += prod[ix * ny + iy] * Complex64::from_polar(1.0, -(k as f64 * x + eta * y));
                    }
                }
                let coef = acc / (nx * ny) as f64 * (2.0 * PI) * g.y_length() / (conv * 2.0 * PI * g.y_length())
                    * Complex64::new(0.0, k as f64);
                samples.entry((k, n)).or_insert_with(|| vec![Complex64::new(0.0, 0.0); g.t_points()])[j] = coef;
            }
        }
    }
    let dense = SpaceTimeField::from_samples(g, samples.into_iter().map(|((k, n), s)| (k, [n, 0], s)).collect()).unwrap();
    let num = kplab::fields::norms::bourgain_norm(&dense, &lhs, &p).unwrap();
    let den = kplab::fields::norms::bourgain_norm(&u, &rhs, &p).unwrap()
        * kplab::fields::norms::bourgain_norm(&v, &rhs, &p).unwrap();
    assert!(rel(ratio, num / den) < 1e-8, "{ratio} vs {}", num / den);
}

#[test]
fn bilinear_symmetric() {
    let g = small_grid(1, 256);
    let p = params(3.0, 1);
    let cutoff = CutoffSpec::new(1.0).unwrap();
    let u = free_block(&random_field(g, &band(1, 4, 0.5), 1).unwrap(), Some(cutoff), &p).unwrap();
    let v = free_block(&random_field(g, &band(2, 3, 0.5), 2).unwrap(), Some(cutoff), &p).unwrap();
    let rhs = NormSpec::x_weighted(0.2, 0.0, 0.55, 0.4);
    let lhs = NormSpec::z(0.2, 0.0, 0.4);
    let a = bilinear_ratio(&u, &v, &lhs, &rhs, &p).unwrap();
    let b = bilinear_ratio(&v, &u, &lhs, &rhs, &p).unwrap();
    assert!(rel(a, b) < 1e-10);
}

#[test]
fn adversarial_generators() {
    let g = GridSpec::new(GridParams {
        k_max: 64,
        y_points: 64,
        y_length: 16.0 * PI,
        y_dims: 1,
        t_points: 64,
        t_window: 2.5,
    })
    .unwrap();
    let shape = PairShape::default();
    let (u, v) = adversarial_pair(PairKind::Comparable, 16, g, 7, &shape).unwrap();
    for f in [&u, &v] {
        assert!(f.support().count() > 0);
        assert!(f.support().all(|(m, _)| (16..=32).contains(&m.k.abs())));
        assert!(f.hermitian_defect() < 1e-15);
    }
    assert_eq!(adversarial_pair(PairKind::Comparable, 16, g, 7, &shape).unwrap(), (u.clone(), v.clone()));
    assert_ne!(adversarial_pair(PairKind::Comparable, 16, g, 8, &shape).unwrap().0, u);

    let (u, v) = adversarial_pair(PairKind::HighHighToLow, 16, g, 7, &shape).unwrap();
    assert!(u.support().all(|(m, _)| (16..=32).contains(&m.k)));
    assert!(v.support().all(|(m, _)| (-32..=-16).contains(&m.k)));
    let p = params(2.0, 1);
    let su = kplab::evolution::free_signals(&u, kplab::evolution::TimeProfile::Unit, &p).unwrap();
    let sv = kplab::evolution::free_signals(&v, kplab::evolution::TimeProfile::Unit, &p).unwrap();
    let w = product_field(&g, &su, &sv, false).unwrap();
    assert!(!w.modes().is_empty());
    assert!(w.modes().iter().all(|m| m.k.abs() as usize <= g.k_max() / 4));

    let (u, _) = adversarial_pair(PairKind::LowHigh, 16, g, 7, &shape).unwrap();
    assert!(u.support().all(|(m, _)| m.k.abs() <= 2));
    let (u, v) = adversarial_pair(PairKind::Knapp, 16, g, 7, &shape).unwrap();
    assert_eq!(u, v);
    assert!(u.support().all(|(m, _)| m.k.abs() == 16 && (u.eta(m.n)[0]).abs() <= 2.0 + 1e-12));

    assert!(matches!(
        adversarial_pair(PairKind::Comparable, 40, g, 7, &shape),
        Err(Error::BandExceedsGrid(_))
    ));
}

#[test]
fn counterexample_two_routes_and_closed_form() {
    let p = params(2.0, 1);
    let quad = Quadrature::default();
    for (n, hw) in [(8, 1.0), (64, 1.0), (256, 0.25), (128, 1.0 / 128.0)] {
        let cfg = CounterexampleConfig::new(n, hw).unwrap();
        let v = counterexample_lhs(&cfg, &p, &quad).unwrap();
        assert!(rel(v.lhs, v.lhs_direct) < 1e-2, "{v:?}");
        assert!(rel(v.lhs, v.lhs_exact) < 1e-6, "{v:?}");
        assert!(v.warnings.is_empty(), "{v:?}");
    }
    let scaled = |n: u64| {
        let v = counterexample_lhs(&CounterexampleConfig::new(n, 1.0).unwrap(), &p, &quad).unwrap();
        v.lhs / (n as f64).sqrt()
    };
    assert!(rel(scaled(64), scaled(256)) < 0.25);
    let tiny = counterexample_lhs(&CounterexampleConfig::new(64, 1e-10).unwrap(), &p, &quad).unwrap();
    assert!(tiny.lhs < 1e-3);
}

#[test]
fn counterexample_growth_laws() {
    let p = params(2.0, 1);
    let ns = [8, 16, 32, 64, 128, 256];
    let q = Quadrature::default();
    let flat = counterexample_verdict(&ns, 1.0, 0.0, 0.0, &p, &q).unwrap();
    assert!((flat.fit.exponent - 0.5).abs() < 0.15 && flat.verdict == Verdict::EstimateFails);
    let thin = counterexample_verdict(&ns, 1.0, -1.0, 0.0, &p, &q).unwrap();
    assert!((thin.fit.exponent - 1.0).abs() < 0.15 && thin.verdict == Verdict::EstimateFails);
    let smooth = counterexample_verdict(&ns, 1.0, 0.0, 1.0, &p, &q).unwrap();
    assert_eq!(smooth.verdict, Verdict::NoFailureDetected);
}
