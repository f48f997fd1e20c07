use std::f64::consts::PI;

use proptest::prelude::*;
use scs_core::montecarlo::{run_campaign, McConfig};
use scs_core::point_process::*;
use scs_core::transforms::{PathLossModel, SystemSpec};

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

#[test]
fn homogeneous_equivalents_by_dimension() {
    let cases = [
        (1.0, 1usize, 2.0, 0.0),
        (1.0, 2, 2.0 * PI, 1.0),
        (3.0, 3, 12.0 * PI, 2.0),
    ];
    for (l0, l, c, p) in cases {
        assert_eq!(
            homogeneous_equivalent(l0, l).unwrap(),
            RadialDensity::power_law(c, p)
        );
    }
    assert!(homogeneous_equivalent(1.0, 4).is_err());
    assert!(homogeneous_equivalent(0.0, 2).is_err());
}

#[test]
fn mapping_uniform_fields_matches_homogeneous() {
    let grid: Vec<f64> = (0..=40).map(|i| i as f64 * 0.25).collect();
    for (l, l0) in [(2usize, 1.5), (3, 0.7)] {
        let mapped = map_to_1d(&SpatialDensity::uniform(l, l0).unwrap(), &grid).unwrap();
        let want = homogeneous_equivalent(l0, l).unwrap();
        for &r in &grid {
            assert!(
                close(mapped.value(r), want.value(r), 1e-10),
                "l = {l}, r = {r}"
            );
        }
    }
}

#[test]
fn half_plane_maps_to_half_the_circle() {
    let grid: Vec<f64> = (1..=20).map(|i| i as f64 * 0.5).collect();
    let half = SpatialDensity::new(2, |x| if x[1] >= 0.0 { 2.0 } else { 0.0 }).unwrap();
    let mapped = map_to_1d(&half, &grid).unwrap();
    for &r in &grid {
        assert!(close(mapped.value(r), PI * 2.0 * r, 1e-6), "r = {r}");
    }
}

#[test]
fn line_translation_examples() {
    let c = translate_density(&LineDensity::Constant { value: 1.5 }, 7.0).unwrap();
    for r in [0.0, 1.0, 100.0] {
        assert_eq!(c.value(r), 3.0);
    }
    let right = LineDensity::Interval {
        lo: Some(0.0),
        hi: None,
        value: 1.0,
    };
    let d = translate_density(&right, 0.0).unwrap();
    for r in [0.1, 1.0, 50.0] {
        assert_eq!(d.value(r), 1.0);
    }
    // 1{-5 <= x < 5} seen from y = 5: nothing at r = 0, one side on (0, 10].
    let d = translate_density(&LineDensity::indicator(-5.0, 5.0), 5.0).unwrap();
    assert_eq!(d.value(0.0), 0.0);
    for r in [1e-9, 3.0, 9.999, 10.0] {
        assert_eq!(d.value(r), 1.0, "r = {r}");
    }
    assert_eq!(d.value(10.001), 0.0);
    assert!((d.total_mass() - 10.0).abs() < 1e-12);
}

#[test]
fn spatial_translation_examples() {
    let grid: Vec<f64> = (1..=16).map(|i| i as f64 * 0.25).collect();
    let uniform = SpatialDensity::uniform(2, 1.0).unwrap();
    let moved = translate_spatial(&uniform, &[3.0, -2.0], &grid).unwrap();
    let right = SpatialDensity::new(2, |x| if x[0] > 0.0 { 1.0 } else { 0.0 }).unwrap();
    let at_origin = translate_spatial(&right, &[0.0, 0.0], &grid).unwrap();
    let inside = translate_spatial(&right, &[5.0, 0.0], &grid).unwrap();
    for &r in &grid {
        assert!(close(moved.value(r), 2.0 * PI * r, 1e-10));
        assert!(close(at_origin.value(r), PI * r, 1e-6), "r = {r}");
        assert!(close(inside.value(r), 2.0 * PI * r, 1e-10), "r = {r}");
    }
}

#[test]
fn scaling_examples() {
    let d = RadialDensity::power_law(3.0, 0.5);
    assert_eq!(
        scale_density(&d, 2.0).unwrap(),
        RadialDensity::power_law(3.0 * 2f64.powf(-1.5), 0.5)
    );
    let plane = homogeneous_equivalent(1.0, 2).unwrap();
    match scale_density(&plane, 2.0).unwrap() {
        RadialDensity::PowerLaw { c, p } => assert!((c - PI / 2.0).abs() < 1e-15 && p == 1.0),
        other => panic!("{other:?}"),
    }
    assert_eq!(scale_density(&d, 1.0).unwrap(), d);
    assert!(scale_density(&d, 0.0).is_err());
    assert!(scale_density(&d, -1.0).is_err());

    // Tables and shifted densities obey (1/a) lambda(r / a) too.
    let t = RadialDensity::tabulated(vec![0.0, 1.0, 4.0], vec![1.0, 3.0, 0.5]).unwrap();
    let s = translate_density(&LineDensity::indicator(-1.0, 3.0), 0.5).unwrap();
    for d in [t, s] {
        let scaled = scale_density(&d, 2.5).unwrap();
        for r in [0.3, 1.7, 4.4, 8.0, 12.0] {
            assert!(
                close(scaled.value(r), d.value(r / 2.5) / 2.5, 1e-12),
                "r = {r}"
            );
        }
    }
}

#[test]
fn empty_density_yields_no_points() {
    let zero = RadialDensity::power_law(0.0, 0.0);
    for seed in 0..20 {
        assert!(sample_distances(&zero, 10.0, seed).unwrap().is_empty());
    }
}

fn mean_count(d: &RadialDensity, r_max: f64, trials: u64) -> f64 {
    (0..trials)
        .map(|s| sample_distances(d, r_max, s).unwrap().len() as f64)
        .sum::<f64>()
        / trials as f64
}

#[test]
fn mean_count_matches_measure() {
    let t = 2000;
    let plane = homogeneous_equivalent(1.0, 2).unwrap();
    let table = RadialDensity::tabulated(vec![0.0, 2.0, 5.0], vec![0.0, 8.0, 2.0]).unwrap();
    for (d, r_max) in [(plane, 10.0), (table, 5.0)] {
        let measure = d.cumulative(r_max);
        let m = mean_count(&d, r_max, t);
        assert!(
            (m - measure).abs() <= 4.0 * (measure / t as f64).sqrt(),
            "{m} vs {measure}"
        );
    }
    assert!((homogeneous_equivalent(1.0, 2).unwrap().cumulative(10.0) - 100.0 * PI).abs() < 1e-9);
}

#[test]
fn nearest_distance_follows_its_law() {
    // F(r) = 1 - exp(-lambda0 b_l r^l / l) for l = 2 and the thinned table.
    let plane = homogeneous_equivalent(1.0, 2).unwrap();
    let table = RadialDensity::tabulated(vec![0.0, 1.0, 3.0], vec![2.0, 0.5, 1.5]).unwrap();
    for d in [plane, table] {
        let mut r1: Vec<f64> = (0..20_000u64)
            .filter_map(|s| {
                sample_distances(&d, 3.0, s)
                    .unwrap()
                    .distances
                    .first()
                    .copied()
            })
            .collect();
        r1.sort_by(f64::total_cmp);
        let n = r1.len() as f64;
        // Conditional on at least one point in [0, 3].
        let norm = 1.0 - (-d.cumulative(3.0)).exp();
        let ks = r1
            .iter()
            .enumerate()
            .map(|(i, &r)| {
                let f = (1.0 - (-d.cumulative(r)).exp()) / norm;
                (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
            })
            .fold(0.0, f64::max);
        assert!(ks < 0.02, "KS {ks}");
    }
}

#[test]
fn counts_in_disjoint_intervals_are_uncorrelated() {
    let d = homogeneous_equivalent(1.0, 2).unwrap();
    let pairs: Vec<(f64, f64)> = (0..20_000u64)
        .map(|s| {
            let o = sample_distances(&d, 2.0, s).unwrap();
            (o.count_in(0.0, 1.0) as f64, o.count_in(1.0, 2.0) as f64)
        })
        .collect();
    let n = pairs.len() as f64;
    let (ma, mb) = (
        pairs.iter().map(|p| p.0).sum::<f64>() / n,
        pairs.iter().map(|p| p.1).sum::<f64>() / n,
    );
    let cov = pairs.iter().map(|p| (p.0 - ma) * (p.1 - mb)).sum::<f64>() / n;
    let va = pairs.iter().map(|p| (p.0 - ma).powi(2)).sum::<f64>() / n;
    let vb = pairs.iter().map(|p| (p.1 - mb).powi(2)).sum::<f64>() / n;
    let rho = cov / (va * vb).sqrt();
    assert!(rho.abs() < 0.02, "correlation {rho}");
}

#[test]
fn nearest_distance_pdf() {
    let d = homogeneous_equivalent(1.0, 2).unwrap();
    for r in [0.1, 0.5, 1.0, 2.0] {
        let want = 2.0 * PI * r * (-PI * r * r).exp();
        assert!((pdf_r1(&d, r) - want).abs() < 1e-14);
    }
    // Midpoint rule on [0, 6]; the remaining mass is below e^-100.
    let n = 60_000;
    let h = 6.0 / n as f64;
    let total: f64 = (0..n).map(|i| pdf_r1(&d, (i as f64 + 0.5) * h) * h).sum();
    assert!((total - 1.0).abs() < 1e-8, "{total}");
    for r in [0.3, 1.2] {
        assert_eq!(pdf_rk_given_rk1(&d, r, r), d.value(r));
    }
    assert!(pdf_rk_given_rk1(&d, 1.0, 1.5) == 0.0);
}

#[test]
fn tabulated_density_from_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.csv");
    std::fs::write(&path, "r,lambda\n0,1\n2,3\n4,0\n").unwrap();
    let t = TabulatedDensity::from_csv(&path).unwrap();
    let d = RadialDensity::Tabulated(t);
    assert_eq!(d.value(1.0), 2.0);
    assert_eq!(d.value(5.0), 0.0);
    assert!((d.total_mass() - 7.0).abs() < 1e-12);
    std::fs::write(&path, "r,lambda\n0,1\n2,3\n1,0\n").unwrap();
    assert!(TabulatedDensity::from_csv(&path).is_err());
}

#[test]
fn stability_checks() {
    assert!(homogeneous_equivalent(1.0, 2)
        .unwrap()
        .check_stable(4.0)
        .is_ok());
    assert!(homogeneous_equivalent(1.0, 2)
        .unwrap()
        .check_stable(2.0)
        .is_err());
    assert!(RadialDensity::power_law(1.0, -1.5).validate().is_err());
    let bounded = RadialDensity::tabulated(vec![0.0, 5.0], vec![1.0, 1.0]).unwrap();
    assert!(bounded.check_stable(0.5).is_ok());
}

#[test]
fn stretching_distances_leaves_cir_unchanged() {
    let d = RadialDensity::tabulated(vec![0.0, 10.0], vec![0.0, 10.0]).unwrap();
    let eta = vec![0.3, 1.0, 3.0, 10.0];
    let cfg = McConfig::default().with_eta(eta.clone());
    let a = run_campaign(
        &SystemSpec::with_density(d.clone(), PathLossModel::inverse_power(4.0)),
        &cfg.clone().with_seed(1),
    )
    .unwrap();
    let scaled = scale_density(&d, 3.0).unwrap();
    let b = run_campaign(
        &SystemSpec::with_density(scaled, PathLossModel::inverse_power(4.0)),
        &cfg.with_seed(2),
    )
    .unwrap();
    for (i, e) in eta.iter().enumerate() {
        let s = (a.cir.err[i].powi(2) + b.cir.err[i].powi(2)).sqrt();
        assert!((a.cir.p[i] - b.cir.p[i]).abs() <= 3.0 * s, "eta = {e}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn samples_are_sorted_and_inside(seed in any::<u64>(), r_max in 0.5f64..20.0, c in 0.1f64..5.0, p in -0.5f64..2.0) {
        let d = RadialDensity::power_law(c, p);
        let o = sample_distances(&d, r_max, seed).unwrap();
        prop_assert!(o.distances.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(o.distances.iter().all(|&r| r > 0.0 && r <= r_max));
    }

    #[test]
    fn inverse_cumulative_inverts(c in 0.1f64..5.0, p in -0.9f64..3.0, r in 0.01f64..50.0) {
        let d = RadialDensity::power_law(c, p);
        let back = d.inverse_cumulative(d.cumulative(r)).unwrap();
        prop_assert!((back - r).abs() <= 1e-9 * r);
    }

    #[test]
    fn conditional_pdf_starts_at_density(c in 0.1f64..5.0, p in 0.0f64..2.0, r in 0.01f64..5.0) {
        let d = RadialDensity::power_law(c, p);
        prop_assert!((pdf_rk_given_rk1(&d, r, r) - d.value(r)).abs() <= 1e-14 * d.value(r).max(1.0));
    }
}
