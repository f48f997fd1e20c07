use std::f64::consts::PI;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use scs_core::montecarlo::{ks_distance, run_campaign, McConfig};
use scs_core::point_process::{homogeneous_equivalent, DistanceStream, RadialDensity};
use scs_core::transforms::*;

fn ramp() -> RadialDensity {
    RadialDensity::tabulated(vec![0.0, 10.0], vec![0.0, 10.0]).unwrap()
}

fn lambda0(spec: &SystemSpec) -> f64 {
    match spec.density {
        DensitySpec::Homogeneous { lambda0 } => lambda0,
        ref other => panic!("{other:?}"),
    }
}

/// Two runs of independent streams agree within 3 combined SE everywhere.
fn agree_3se(a: &SystemSpec, b: &SystemSpec, eta: &[f64], seed: u64) {
    let cfg = McConfig::default().with_eta(eta.to_vec());
    let x = run_campaign(a, &cfg.clone().with_seed(seed)).unwrap();
    let y = run_campaign(b, &cfg.with_seed(seed + 1)).unwrap();
    for (i, e) in eta.iter().enumerate() {
        let s = (x.cinr.err[i].powi(2) + y.cinr.err[i].powi(2)).sqrt();
        let d = (x.cinr.p[i] - y.cinr.p[i]).abs();
        assert!(
            d <= 3.0 * s,
            "eta = {e}: {} vs {}",
            x.cinr.p[i],
            y.cinr.p[i]
        );
    }
}

#[test]
fn homogeneous_fading_scales_intensity() {
    for (l, eps) in [(1usize, 3.0), (2, 4.0), (3, 4.5)] {
        for fading in [
            FadingModel::Constant { psi0: 2.0 },
            FadingModel::LogNormal { sigma_db: 8.0 },
            FadingModel::TwoPoint { g: 5.0, q: 0.25 },
        ] {
            let spec = SystemSpec::homogeneous(1.7, l, eps).with_fading(fading);
            let got = lambda0(&spec.absorb_fading().unwrap());
            let want = 1.7 * fading.moment(l as f64 / eps).unwrap();
            assert!((got - want).abs() <= 1e-14 * want);
        }
    }
}

#[test]
fn lognormal_example_in_natural_units() {
    let sigma = db_to_natural(8.0);
    let spec =
        SystemSpec::homogeneous(1.0, 2, 4.0).with_fading(FadingModel::LogNormal { sigma_db: 8.0 });
    let want = (2.0 * sigma * sigma / 16.0).exp();
    assert!((lambda0(&spec.absorb_fading().unwrap()) - want).abs() < 1e-13 * want);
    assert_eq!(lognormal_density_gain(sigma, 4.0, 2), want);
    assert_eq!(lognormal_density_gain_db(8.0, 4.0, 2), want);
    assert!((db_to_natural(10.0) - 10f64.ln()).abs() < 1e-15);
}

#[test]
fn sectorized_antenna_example() {
    let (g, theta, eps) = (8.0, PI / 3.0, 3.5);
    let spec = SystemSpec::homogeneous(2.0, 2, eps).with_fading(FadingModel::sectorized(g, theta));
    let want = 2.0 * g.powf(2.0 / eps) * theta / (2.0 * PI);
    assert!((lambda0(&spec.absorb_fading().unwrap()) - want).abs() < 1e-14 * want);
    assert_eq!(sectorized_density(2.0, g, theta, eps), want);
}

#[test]
fn fading_on_tables_follows_the_definition() {
    // bar lambda(r) = E[Psi^(1/eps) lambda(Psi^(1/eps) r)], exact for two points.
    let eps = 4.0;
    let d = RadialDensity::tabulated(vec![0.0, 2.0, 6.0], vec![1.0, 4.0, 0.5]).unwrap();
    let (g, q) = (3.0, 0.4);
    let faded = absorb_fading(&d, eps, &FadingModel::TwoPoint { g, q }).unwrap();
    let s = g.powf(1.0 / eps);
    for r in [0.1, 0.9, 1.5, 3.0, 4.2, 5.9] {
        let want = q * s * d.value(s * r);
        assert!((faded.value(r) - want).abs() < 1e-12, "r = {r}");
    }
    // Log-normal on a power law stays a power law with a moment factor.
    let pl = RadialDensity::power_law(2.0, 0.5);
    let f = FadingModel::LogNormal { sigma_db: 6.0 };
    match absorb_fading(&pl, eps, &f).unwrap() {
        RadialDensity::PowerLaw { c, p } => {
            assert!((c - 2.0 * f.moment(1.5 / eps).unwrap()).abs() < 1e-13 && p == 0.5)
        }
        other => panic!("{other:?}"),
    }
    // Substituting u = Psi^(1/eps) r shows the total mass is unchanged.
    let faded = absorb_fading(&d, eps, &f).unwrap();
    let want = d.total_mass();
    assert!(
        (faded.total_mass() - want).abs() < 1e-12 * want,
        "{} vs {want}",
        faded.total_mass()
    );
}

#[test]
fn explicit_fading_matches_absorbed_density() {
    for (i, fading) in [
        FadingModel::Constant { psi0: 3.0 },
        FadingModel::LogNormal { sigma_db: 6.0 },
        FadingModel::TwoPoint { g: 2.0, q: 0.7 },
    ]
    .into_iter()
    .enumerate()
    {
        let spec =
            SystemSpec::with_density(ramp(), PathLossModel::inverse_power(4.0)).with_fading(fading);
        let absorbed = spec.absorb_fading().unwrap();
        let cfg = McConfig::default();
        let a = run_campaign(&spec, &cfg.clone().with_seed(10 * i as u64)).unwrap();
        let b = run_campaign(&absorbed, &cfg.with_seed(10 * i as u64 + 1)).unwrap();
        let ks = ks_distance(&a.cir_samples(), &b.cir_samples());
        assert!(ks < 0.02, "{fading:?}: KS {ks}");
    }
}

#[test]
fn fading_leaves_homogeneous_tail_unchanged() {
    let eta = [0.2, 1.0, 5.0, 30.0];
    let base = SystemSpec::homogeneous(1.0, 2, 4.0);
    agree_3se(
        &base,
        &base
            .clone()
            .with_fading(FadingModel::LogNormal { sigma_db: 10.0 }),
        &eta,
        40,
    );
}

#[test]
fn canonical_pathloss_examples() {
    let d = ramp();
    assert_eq!(
        canonicalize_pathloss(&d, &PathLossModel::inverse_power(1.0)).unwrap(),
        d
    );
    match canonicalize_pathloss(
        &homogeneous_equivalent(1.0, 2).unwrap(),
        &PathLossModel::inverse_power(4.0),
    )
    .unwrap()
    {
        RadialDensity::PowerLaw { c, p } => assert!((c - PI / 2.0).abs() < 1e-15 && p == -0.5),
        other => panic!("{other:?}"),
    }
    // General h: lambda(h^-1(s)) / h'(h^-1(s)), held as a piecewise-linear
    // table on a geometric grid of spacing about 1%.
    let h = PathLossModel::Polynomial {
        coeffs: vec![0.0, 1.0, 1.0],
    };
    let line = homogeneous_equivalent(1.0, 1).unwrap();
    let canon = canonicalize_pathloss(&line, &h).unwrap();
    for s in [0.05f64, 0.7, 3.0, 40.0, 900.0] {
        let x = (-1.0 + (1.0 + 4.0 * s).sqrt()) / 2.0;
        let want = 2.0 / (2.0 * x + 1.0);
        assert!(
            (canon.value(s) - want).abs() < 1e-4 * want,
            "s = {s}: {} vs {want}",
            canon.value(s)
        );
    }
}

#[test]
fn general_pathloss_simulates_like_its_canonical_form() {
    let raw = SystemSpec::homogeneous(1.0, 1, 2.0);
    let raw = SystemSpec {
        pathloss: PathLossModel::Polynomial {
            coeffs: vec![0.0, 1.0, 1.0],
        },
        ..raw
    };
    raw.validate().unwrap();
    agree_3se(
        &raw,
        &raw.canonicalize_pathloss().unwrap(),
        &[0.3, 1.0, 3.0, 10.0],
        50,
    );
}

#[test]
fn canonical_pathloss_preserves_received_powers() {
    // Strongest received power, 1 / h(R1) against 1 / R1'.
    let spec = SystemSpec::homogeneous(1.0, 2, 4.0);
    let canon = spec.canonicalize_pathloss().unwrap();
    let strongest = |s: &SystemSpec, seed: u64| -> Vec<f64> {
        let d = s.radial_density().unwrap();
        (0..20_000u64)
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed + i);
                let r = DistanceStream::new(&d)
                    .unwrap()
                    .next_distance(&mut rng)
                    .unwrap()
                    .unwrap();
                1.0 / s.pathloss.h(r)
            })
            .collect()
    };
    let ks = ks_distance(&strongest(&spec, 0), &strongest(&canon, 1_000_000));
    assert!(ks < 0.02, "KS {ks}");
}

#[test]
fn noise_canonicalization_examples() {
    assert_eq!(canonicalize_noise(1.0, 4.0, 1.0, 0.3, 2).unwrap(), 0.3);
    assert_eq!(canonicalize_noise(4.0, 4.0, 2.0, 8.0, 2).unwrap(), 0.25);
    assert!(canonicalize_noise(1e6, 4.0, 1.0, 1.0, 2).unwrap() < 1e-11);
    assert!(matches!(
        canonicalize_noise(1.0, 2.0, 1.0, 1.0, 2),
        Err(scs_core::Error::Stability(_))
    ));
    let spec = SystemSpec::homogeneous(4.0, 2, 4.0).with_noise(2.0, 8.0);
    let c = spec.canonicalize_noise().unwrap();
    assert_eq!((lambda0(&c), c.k, c.n), (1.0, 1.0, 0.25));
}

#[test]
fn noise_canonicalization_preserves_cinr() {
    let spec = SystemSpec::homogeneous(4.0, 2, 4.0).with_noise(2.0, 8.0);
    agree_3se(
        &spec,
        &spec.canonicalize_noise().unwrap(),
        &[0.3, 1.0, 4.0],
        60,
    );
    // Power-law densities are rescaled to the reference (p + 1) r^p.
    let pl = SystemSpec::with_density(
        RadialDensity::power_law(5.0, 0.5),
        PathLossModel::inverse_power(3.0),
    )
    .with_noise(3.0, 0.5);
    agree_3se(&pl, &pl.canonicalize_noise().unwrap(), &[0.3, 1.0, 4.0], 70);
}

#[test]
fn reduce_examples() {
    let plain = SystemSpec::with_density(ramp(), PathLossModel::inverse_power(1.0));
    let r = reduce(&plain).unwrap();
    assert_eq!((r.density, r.noise), (ramp(), 0.0));

    let shadowed =
        SystemSpec::homogeneous(1.0, 2, 4.0).with_fading(FadingModel::LogNormal { sigma_db: 8.0 });
    let bar = lognormal_density_gain_db(8.0, 4.0, 2);
    match reduce(&shadowed).unwrap().density {
        RadialDensity::PowerLaw { c, p } => {
            assert!((c - bar * 2.0 * PI / 4.0).abs() < 1e-13 && p == -0.5)
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn reduced_systems_simulate_alike() {
    let eta = [0.3, 1.0, 4.0];
    let systems = [
        SystemSpec::homogeneous(2.0, 2, 4.0)
            .with_fading(FadingModel::LogNormal { sigma_db: 6.0 })
            .with_noise(1.5, 0.4),
        SystemSpec::with_density(ramp(), PathLossModel::inverse_power(3.0))
            .with_fading(FadingModel::TwoPoint { g: 3.0, q: 0.5 }),
    ];
    for (i, s) in systems.iter().enumerate() {
        agree_3se(s, &reduce(s).unwrap().to_spec(), &eta, 80 + 10 * i as u64);
    }
}

#[test]
fn spec_files_round_trip_every_kind() {
    let specs = [
        SystemSpec::homogeneous(1.0, 3, 5.0).with_fading(FadingModel::TwoPoint { g: 2.0, q: 0.3 }),
        SystemSpec::with_density(
            ramp(),
            PathLossModel::Polynomial {
                coeffs: vec![0.0, 1.0, 1.0],
            },
        ),
        SystemSpec::with_density(
            RadialDensity::power_law(2.0, 0.5),
            PathLossModel::inverse_power(3.0),
        )
        .with_noise(2.0, 0.1),
    ];
    for s in specs {
        assert_eq!(SystemSpec::from_json(&s.to_json().unwrap()).unwrap(), s);
    }
    let custom = SystemSpec::with_density(ramp(), PathLossModel::custom(Cube));
    assert!(custom.to_json().is_err());
}

struct Cube;

impl PathLoss for Cube {
    fn h(&self, x: f64) -> f64 {
        x * x * x
    }
    fn derivative(&self, x: f64) -> f64 {
        3.0 * x * x
    }
    fn inverse(&self, r: f64) -> Option<f64> {
        Some(r.cbrt())
    }
}

#[test]
fn custom_pathloss_matches_inverse_power() {
    let a = canonicalize_pathloss(&ramp(), &PathLossModel::custom(Cube)).unwrap();
    let b = canonicalize_pathloss(&ramp(), &PathLossModel::inverse_power(3.0)).unwrap();
    for s in [0.5, 10.0, 300.0, 999.0] {
        assert!(
            (a.value(s) - b.value(s)).abs() < 1e-6 * b.value(s).max(1e-12),
            "s = {s}"
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn noise_formula(l0 in 0.01f64..100.0, k in 0.01f64..100.0, n in 0.0f64..10.0, eps in 3.01f64..6.0) {
        let got = canonicalize_noise(l0, eps, k, n, 3).unwrap();
        prop_assert!((got - n * l0.powf(-eps / 3.0) / k).abs() <= 1e-12 * got.max(1e-300));
    }

    #[test]
    fn fading_moments_match_samples(sigma in 0.0f64..8.0, m in 0.1f64..1.0, seed in any::<u64>()) {
        let f = FadingModel::LogNormal { sigma_db: sigma };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 20_000;
        let xs: Vec<f64> = (0..n).map(|_| f.sample(&mut rng).powf(m)).collect();
        prop_assert!(xs.iter().all(|&x| x >= 0.0));
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
        let se = (var / n as f64).sqrt();
        prop_assert!((mean - f.moment(m).unwrap()).abs() <= 5.0 * se + 1e-12);
    }

    #[test]
    fn power_law_canonicalization_exponent(l in 1usize..=3, extra in 0.1f64..3.0, l0 in 0.1f64..10.0) {
        let eps = l as f64 + extra;
        let c = lambda0_b(l0, l);
        match canonicalize_pathloss(&homogeneous_equivalent(l0, l).unwrap(), &PathLossModel::inverse_power(eps)).unwrap() {
            RadialDensity::PowerLaw { c: c2, p } => {
                prop_assert!((c2 - c / eps).abs() <= 1e-12 * c);
                prop_assert!((p - (l as f64 / eps - 1.0)).abs() <= 1e-14);
            }
            other => prop_assert!(false, "{:?}", other),
        }
    }
}

fn lambda0_b(l0: f64, l: usize) -> f64 {
    l0 * [2.0, 2.0 * PI, 4.0 * PI][l - 1]
}
