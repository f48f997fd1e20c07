use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use scs_core::analytic::*;
use scs_core::point_process::{PowerTail, RadialDensity, TabulatedDensity};
use scs_core::transforms::SystemSpec;

fn plane() -> RadialDensity {
    RadialDensity::power_law(2.0 * PI, 1.0)
}

fn tail(eps: f64, l: usize, eta: f64) -> TailPoint {
    tail_from_charfn(&CharFn::homogeneous(eps, l).unwrap(), eta).unwrap()
}

/// The power series of the log conditional characteristic function,
/// `sum_n (i w K)^n / n! int_{r1}^inf lambda(r) r^(-n eps) dr`, for
/// `lambda = 2 pi r` and `eps = 4`, where each moment is `2 pi r1^(2 - 4n) / (4n - 2)`.
fn series_log_conditional(w: f64, r1: f64) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut term = Complex64::new(1.0, 0.0);
    for n in 1..=120 {
        term *= Complex64::new(0.0, w) / n as f64;
        let moment = 2.0 * PI * r1.powi(2 - 4 * n) / (4 * n - 2) as f64;
        sum += term * moment;
    }
    sum
}

#[test]
fn conditional_charfn_closed_form_series_and_quadrature_agree() {
    let d = plane();
    for w in [0.1, 1.0, 10.0] {
        let closed = charfn_pi_given_r1(w, 1.0, &d, 4.0, 1.0).unwrap();
        let series = series_log_conditional(w, 1.0).exp();
        let quad = log_conditional_numeric(&d, 4.0, 1.0, w).unwrap().exp();
        assert!(
            (closed - series).norm() < 1e-8,
            "w = {w}: {closed} vs {series}"
        );
        assert!((closed - quad).norm() < 1e-8, "w = {w}: {closed} vs {quad}");
    }
    assert_eq!(
        charfn_pi_given_r1(0.0, 1.0, &d, 4.0, 1.0).unwrap(),
        Complex64::new(1.0, 0.0)
    );
}

#[test]
fn general_density_path_matches_closed_form() {
    // 2 pi r written as a table with a declared tail, so every stage of the
    // evaluation is numerical.
    let table = TabulatedDensity::new(
        vec![0.0, 1.0],
        vec![0.0, 2.0 * PI],
        Some(PowerTail {
            c: 2.0 * PI,
            p: 1.0,
        }),
    )
    .unwrap();
    let d = RadialDensity::Tabulated(table);
    for w in [0.3, 1.0, 5.0] {
        let general = charfn_inv_cir(w, &d, 4.0).unwrap();
        let closed = charfn_inv_cir_homogeneous(w, 4.0, 2).unwrap();
        assert!(
            (general - closed).norm() < 1e-6,
            "w = {w}: {general} vs {closed}"
        );
    }
}

#[test]
fn homogeneous_charfn_ignores_dimension_given_ratio() {
    for w in [0.01, 0.5, 3.0, 40.0, 200.0] {
        let a = charfn_inv_cir_homogeneous(w, 4.0, 2).unwrap();
        let b = charfn_inv_cir_homogeneous(w, 2.0, 1).unwrap();
        assert!((a - b).norm() < 1e-14);
    }
    assert!(CharFn::homogeneous(2.0, 2).is_err());
}

#[test]
fn tails_collapse_across_dimensions() {
    for (l, eps) in [(2usize, 4.0), (3, 4.5)] {
        for eta in [0.5, 1.0, 2.0, 10.0] {
            let a = tail(eps, l, eta).p;
            let b = tail(eps / l as f64, 1, eta).p;
            assert!(
                (a - b).abs() <= 1e-6,
                "(l, eps) = ({l}, {eps}), eta = {eta}"
            );
        }
    }
}

#[test]
fn tail_matches_high_precision_reference() {
    // l = 2, eps = 4, evaluated with 15-digit oscillatory quadrature of the
    // same inversion integral in arbitrary precision.
    let reference = [
        (0.1, 0.999833615975704),
        (0.2, 0.988097999177826),
        (0.3, 0.950592925429586),
        (0.5, 0.845702973762781),
        (0.7, 0.748774035385588),
        (0.9, 0.670124785287207),
        (1.0, 0.636619772367375),
    ];
    for (eta, want) in reference {
        let t = tail(4.0, 2, eta);
        assert!((t.p - want).abs() < 1e-8, "eta = {eta}: {} vs {want}", t.p);
        assert!(t.err < 1e-6);
    }
}

#[test]
fn k_constant_matches_sinc() {
    // P(C/I > 1) = sin(pi b) / (pi b) with b = l / eps.
    for (eps, l) in [(4.0, 2usize), (3.0, 1), (3.0, 2), (4.0, 1)] {
        let b = l as f64 / eps;
        let want = (PI * b).sin() / (PI * b);
        let t = tail(eps, l, 1.0);
        assert!(
            (t.p - want).abs() < 1e-6,
            "eps = {eps}, l = {l}: {} vs {want}",
            t.p
        );
    }
}

#[test]
fn power_law_regime() {
    let one = tail(4.0, 2, 1.0).p;
    for eta in [2.0, 4.0, 5.0, 10.0, 16.0] {
        let ratio = tail(4.0, 2, eta).p / one;
        assert!((ratio - eta.powf(-0.5)).abs() < 1e-4, "eta = {eta}");
    }
    let k = k_constant(4.0, 2).unwrap();
    let closed = powerlaw_tail(10.0, 4.0, 2, k).unwrap();
    assert!((closed - tail(4.0, 2, 10.0).p).abs() < 1e-6);
}

#[test]
fn threshold_zero_is_certain() {
    assert_eq!(tail(4.0, 2, 0.0).p, 1.0);
    assert!(tail_from_charfn(&CharFn::homogeneous(4.0, 2).unwrap(), -1.0).is_err());
}

#[test]
fn cinr_reduces_to_cir_without_noise() {
    let d = plane();
    for w in [0.2, 2.0, 20.0] {
        assert_eq!(
            charfn_inv_cinr(w, &d, 4.0, 1.0, 0.0).unwrap(),
            charfn_inv_cir_homogeneous(w, 4.0, 2).unwrap()
        );
    }
}

#[test]
fn cinr_tail_decreases_with_noise_and_tends_to_cir() {
    let cir = tail(4.0, 2, 1.0).p;
    let mut prev = cir;
    for n in [1e-6, 0.1, 1.0] {
        let spec = SystemSpec::homogeneous(1.0, 2, 4.0).with_noise(1.0, n);
        let p = tail_from_charfn(&system_charfn(&spec).unwrap(), 1.0)
            .unwrap()
            .p;
        if n == 1e-6 {
            assert!((p - cir).abs() < 1e-4, "{p} vs {cir}");
        }
        assert!(p <= prev + 1e-6, "N = {n}: {p} > {prev}");
        prev = p;
    }
    assert!(prev < cir - 0.01);
}

#[test]
fn few_bs_tracks_exact_curve() {
    let fb = FewBsConstants::new(4.0, 2).unwrap();
    let ratios: Vec<f64> = log_grid(1.0, 100.0, 12)
        .unwrap()
        .into_iter()
        .map(|eta| tail(4.0, 2, eta).p / fb.tail(eta).unwrap().p)
        .collect();
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let var = ratios.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / ratios.len() as f64;
    assert!(var.sqrt() / mean < 1e-3);
    for eta in log_grid(0.1, 1.0, 10).unwrap() {
        let gap = (tail(4.0, 2, eta).p - fb.tail(eta).unwrap().p).abs();
        assert!(gap <= 0.02, "eta = {eta}: gap {gap}");
    }
}

#[test]
fn few_bs_curve_for_spec() {
    let spec = SystemSpec::homogeneous(3.0, 2, 4.0);
    let c = few_bs_curve(&spec, &[0.0, 0.5, 1.0, 4.0]).unwrap();
    assert_eq!(c.p[0], 1.0);
    assert!((c.p[3] / c.p[2] - 0.5).abs() < 1e-12);
    assert!(few_bs_curve(&spec.clone().with_noise(1.0, 1.0), &[1.0]).is_err());
}

#[test]
fn analytic_curve_is_valid() {
    let spec = SystemSpec::homogeneous(1.0, 1, 3.0);
    let grid: Vec<f64> = std::iter::once(0.0)
        .chain(log_grid(0.1, 50.0, 8).unwrap())
        .collect();
    let c = analytic_tail_curve(&spec, &grid).unwrap();
    c.validate().unwrap();
    assert_eq!(c.p[0], 1.0);
    assert_eq!(c.method, Method::Analytic);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn charfn_is_bounded_and_hermitian(beta in 0.05f64..0.95, w in 0.0f64..500.0) {
        let phi = CharFn::power_law(beta);
        let a = phi.eval(w).unwrap();
        let b = phi.eval(-w).unwrap();
        prop_assert!(a.norm() <= 1.0 + 1e-9);
        prop_assert!((a - b.conj()).norm() < 1e-14);
    }

    #[test]
    fn noisy_charfn_is_bounded(beta in 0.2f64..0.9, n in 0.0f64..2.0, w in 0.0f64..50.0) {
        let d = RadialDensity::power_law(beta + 1.0, beta - 1.0);
        let phi = CharFn::with_noise(d, 1.0, 1.0, n).unwrap();
        prop_assert!(phi.eval(w).unwrap().norm() <= 1.0 + 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn tail_curves_are_monotone(beta in 0.2f64..0.9) {
        let phi = CharFn::power_law(beta);
        let c = tail_curve(&phi, &[0.0, 0.2, 0.6, 1.0, 3.0, 20.0]).unwrap();
        prop_assert!(c.validate().is_ok());
    }
}
