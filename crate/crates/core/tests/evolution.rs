mod common;

use std::f64::consts::PI;

use common::{gaussian_mode, grid, params, rel};
use kplab::evolution::{
    cumulative_integral, evolve_nonlinear, free_block, free_evolve, free_signals, nonlinearity,
    picard_solve, CutoffSpec, PicardOptions, SolveConfig, TimeProfile,
};
use kplab::fields::spacetime::TimeSignal;
use kplab::fields::transform::{to_physical, to_spectral, PhysicalField};
use kplab::fields::{random_field, BandSpec, SpectralField};
use kplab::Error;
use num_complex::Complex64;

fn band_field(k_max: usize, seed: u64) -> SpectralField {
    let g = grid(k_max, 32, 32.0, 1);
    random_field(g, &BandSpec { k_lo: 1, k_hi: k_max as i64 / 3, eta_max: 1.0, amplitude: 1.0 }, seed)
        .unwrap()
}

#[test]
fn free_evolve_is_unitary_group() {
    let p = params(2.5, 1);
    let f = band_field(12, 1);
    assert_eq!(free_evolve(&f, 0.0, &p), f);
    for (s, t) in [(0.3, -1.7), (2.1, 0.4), (-0.05, 0.05)] {
        let a = free_evolve(&f, s, &p);
        assert!(rel(a.l2_norm(), f.l2_norm()) < 1e-12);
        let two = free_evolve(&a, t, &p);
        let one = free_evolve(&f, s + t, &p);
        assert!(two.sub(&one).unwrap().l2_norm() < 1e-12 * f.l2_norm());
    }
}

fn psi_sq_integral(c: CutoffSpec) -> f64 {
    let m = 400_000;
    let a = c.support();
    let h = 2.0 * a / m as f64;
    (0..m).map(|i| c.eval(-a + (i as f64 + 0.5) * h).powi(2)).sum::<f64>() * h
}

#[test]
fn free_block_single_mode_matches_direct_sum() {
    let g = grid(4, 16, 16.0, 1);
    let p = params(2.0, 1);
    let mut f = SpectralField::zeros(g);
    f.set(3, [2, 0], Complex64::new(0.7, -0.2)).unwrap();
    let cut = CutoffSpec::new(1.0).unwrap();
    let block = free_block(&f, Some(cut), &p).unwrap();
    assert_eq!(block.modes().len(), 1);
    let eta = 2.0 * g.d_eta();
    let ph = 27.0 - eta * eta / 3.0;
    let times = g.times();
    let seg = &block.modes()[0].segments[0];
    let mut peak = (0.0, 0.0);
    for (i, v) in seg.values.iter().enumerate() {
        let tau = (seg.start + i as i64) as f64 * g.d_tau();
        let direct: Complex64 = times
            .iter()
            .map(|t| Complex64::new(0.7, -0.2) * Complex64::from_polar(cut.eval(*t), (ph - tau) * t))
            .sum::<Complex64>()
            * (g.d_t() / (2.0 * PI).sqrt());
        assert!((direct - v).norm() < 1e-12);
        if v.norm() > peak.1 {
            peak = (tau, v.norm());
        }
    }
    assert!((peak.0 - ph).abs() <= g.d_tau());
    let expect = psi_sq_integral(cut).sqrt() * f.l2_norm();
    assert!(rel(block.l2_norm(), expect) < 1e-8);
}

#[test]
fn free_block_norm_is_cutoff_times_data() {
    let f = band_field(12, 2);
    let p = params(3.0, 1);
    for t in [0.5, 1.0, 1.25] {
        let cut = CutoffSpec::new(t).unwrap();
        let block = free_block(&f, Some(cut), &p).unwrap();
        let expect = psi_sq_integral(cut).sqrt() * f.l2_norm();
        assert!(rel(block.l2_norm(), expect) < 1e-8, "T = {t}");
    }
    assert!(matches!(
        free_block(&f, Some(CutoffSpec::new(1.3).unwrap()), &p),
        Err(Error::WindowTooSmall { .. })
    ));
    let taper = free_block(&f, None, &p).unwrap();
    assert!(taper.l2_norm() > 0.0);
}

#[test]
fn unit_profile_reproduces_free_flow_samples() {
    let f = band_field(9, 3);
    let g = *f.grid();
    let p = params(2.0, 1);
    let signals = free_signals(&f, TimeProfile::Unit, &p).unwrap();
    let times = g.times();
    for j in [0usize, 17, 128, 255] {
        let at = free_evolve(&f, times[j], &p);
        for s in &signals {
            let TimeSignal { center, envelope } = &s.signal;
            let v = envelope[j] * Complex64::from_polar(1.0, *center as f64 * g.d_tau() * times[j]);
            assert!((v - at.get(s.k, s.n)).norm() < 1e-12);
        }
    }
}

#[test]
fn nonlinearity_of_cosine() {
    let g = grid(8, 16, 16.0, 1);
    let u = PhysicalField::sample(g, |x, _| Complex64::new(x.cos(), 0.0));
    let f = to_spectral(&u).unwrap();
    let n = nonlinearity(&f, 2.0 / 3.0);
    let plain = g.space_constant() * g.eta_measure();
    for (m, c) in n.support() {
        if c.norm() > 1e-14 {
            assert_eq!((m.k.abs(), m.n[0]), (2, 0));
            assert!((c.norm() * plain - 0.25).abs() < 1e-13);
        }
    }
    let back = to_physical(&n);
    for (i, v) in back.values().iter().enumerate() {
        let x = 2.0 * PI * (i / 16) as f64 / g.x_points() as f64;
        assert!((v - Complex64::new(0.5 * (2.0 * x).sin(), 0.0)).norm() < 1e-13);
    }
    let z = SpectralField::zeros(g);
    assert_eq!(nonlinearity(&z, 2.0 / 3.0), z);
}

#[test]
fn nonlinearity_is_skew() {
    for seed in 0..4 {
        let f = band_field(12, seed);
        let n = nonlinearity(&f, 2.0 / 3.0);
        let ip = f.inner(&n);
        assert!(ip.re.abs() < 1e-10 * f.l2_norm() * n.l2_norm(), "{ip}");
    }
}

#[test]
fn dealiased_product_matches_direct_convolution() {
    for y_dims in [1, 2] {
        let g = grid(12, 16, 16.0, y_dims);
        let band = BandSpec { k_lo: 1, k_hi: 4, eta_max: 0.3 * 2.0 * PI, amplitude: 1.0 };
        let u = random_field(g, &band, 5).unwrap();
        let v = random_field(g, &band, 6).unwrap();
        let prod = kplab::evolution::nonlinear::product(&u, &v, 2.0 / 3.0);
        let c = g.space_constant() * g.eta_measure();
        for m in prod.modes() {
            let mut s = Complex64::new(0.0, 0.0);
            for (a, x) in u.support() {
                let y = v.get(m.k - a.k, [m.n[0] - a.n[0], m.n[1] - a.n[1]]);
                s += x * y;
            }
            s *= c;
            assert!((prod.coeffs()[m.index] - s).norm() < 1e-12 * (1.0 + s.norm()));
        }
    }
}

#[test]
fn zero_data_and_linear_limit() {
    let g = grid(8, 16, 16.0, 1);
    let p = params(2.0, 1);
    let z = SpectralField::zeros(g);
    let traj = evolve_nonlinear(&z, &SolveConfig::new(0.01, 0.1), &p).unwrap();
    assert!(traj.states.iter().all(|s| *s == z));

    let f = band_field(9, 4);
    let mut cfg = SolveConfig::new(0.01, 0.2);
    cfg.nonlinear = false;
    let traj = evolve_nonlinear(&f, &cfg, &params(2.0, 1)).unwrap();
    for (t, s) in traj.times.iter().zip(&traj.states) {
        let exact = free_evolve(&f, *t, &params(2.0, 1));
        assert!(s.sub(&exact).unwrap().l2_norm() < 1e-12 * f.l2_norm());
    }
}

#[test]
fn blowup_guard() {
    let f = band_field(9, 4).scaled(Complex64::new(400.0, 0.0));
    let r = evolve_nonlinear(&f, &SolveConfig::new(0.05, 1.0), &params(2.0, 1));
    assert!(matches!(r, Err(Error::Blowup { .. })), "{r:?}");
}

#[test]
fn integrator_order_probe() {
    let g = grid(16, 64, 32.0 * PI, 1);
    let p = params(2.0, 1);
    let f = gaussian_mode(g, 1, 0.5, 0.5);
    let run = |dt: f64| {
        evolve_nonlinear(&f, &SolveConfig::new(dt, 0.5), &p).unwrap().last().clone()
    };
    let (a, b, c) = (run(0.02), run(0.01), run(0.005));
    let e1 = a.sub(&b).unwrap().l2_norm();
    let e2 = b.sub(&c).unwrap().l2_norm();
    let order = (e1 / e2).log2();
    println!("order probe: e1 = {e1:e}, e2 = {e2:e}, order = {order}");
    assert!(order > 3.5);
}

#[test]
fn cumulative_rule_is_fourth_order() {
    let err = |m: usize| {
        let h = 1.0 / m as f64;
        let g: Vec<Complex64> = (0..=m).map(|i| Complex64::from_polar(1.0, 3.0 * i as f64 * h)).collect();
        let out = cumulative_integral(&g, h);
        (0..=m)
            .map(|j| {
                let t = j as f64 * h;
                let exact = (Complex64::from_polar(1.0, 3.0 * t) - 1.0) / Complex64::new(0.0, 3.0);
                (out[j] - exact).norm()
            })
            .fold(0.0, f64::max)
    };
    let order = (err(32) / err(64)).log2();
    assert!(order > 3.7, "{order}");
}

#[test]
fn picard_first_iterate_and_zero() {
    let f = band_field(9, 5);
    let p = params(2.0, 1);
    let cut = CutoffSpec::new(0.05).unwrap();
    let r = picard_solve(&f, cut, 1, &p, &PicardOptions::default()).unwrap();
    for (t, u) in r.times.iter().zip(&r.iterate) {
        let free = free_evolve(&f, *t, &p);
        assert!(u.sub(&free).unwrap().l2_norm() < 1e-10 * f.l2_norm());
    }
    let z = SpectralField::zeros(*f.grid());
    let r = picard_solve(&z, cut, 3, &p, &PicardOptions::default()).unwrap();
    assert!(r.iterate.iter().all(|u| u.l2_norm() == 0.0));
    assert!(r.diffs.iter().all(|d| *d == 0.0));
}

#[test]
fn picard_matches_integrator() {
    let g = grid(16, 64, 32.0 * PI, 1);
    let p = params(2.0, 1);
    let f = gaussian_mode(g, 1, 0.5, 0.5);
    let cut = CutoffSpec::new(0.05).unwrap();
    let r = picard_solve(&f, cut, 8, &p, &PicardOptions { t_steps: 64, dealias: 2.0 / 3.0 }).unwrap();
    let e = evolve_nonlinear(&f, &SolveConfig::new(0.05 / 64.0, 0.05), &p).unwrap();
    let diff = r.iterate.last().unwrap().sub(e.last()).unwrap().l2_norm();
    let duhamel = e.last().sub(&free_evolve(&f, 0.05, &p)).unwrap().l2_norm();
    println!("picard vs etdrk4: {diff:e}, nonlinear part {duhamel:e}, diffs {:?}", r.diffs);
    assert!(diff < 1e-6 && duhamel > 1e3 * diff);
    for w in r.diffs.windows(2).skip(1) {
        if w[1] > 1e-13 * f.l2_norm() {
            assert!(w[1] < w[0]);
        }
    }
}
