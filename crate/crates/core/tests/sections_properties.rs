use std::f64::consts::PI;

use proptest::prelude::*;
use symwrap::maps::{build_phi, PhaseMap};
use symwrap::quotient::reduce;
use symwrap::sampling::stream;
use symwrap::sections::{sample_generic_z, section_membership, section_of_phi, w_set, SectionStatus};
use symwrap::EmbeddingConfig;

#[test]
fn forward_images_are_section_members() {
    let config = EmbeddingConfig::new(2, 2.0).unwrap();
    let phi = build_phi(&config).unwrap();
    let mut rng = stream(21, 0);
    let mut misses = 0;
    for _ in 0..100_000 {
        let x = phi.domain().sample(&mut rng).unwrap();
        let y = phi.eval(&x).unwrap();
        misses += usize::from(!section_membership([y[0], y[1]], &y[2..], &config));
    }
    assert_eq!(misses, 0);
}

#[test]
fn random_generic_sections_share_one_area() {
    for c in [1.0, 1.5, 2.0, PI] {
        let config = EmbeddingConfig::new(2, c).unwrap();
        for z in sample_generic_z(&config, 100, 8) {
            let s = section_of_phi(&z, &config);
            assert_eq!(s.status, SectionStatus::Generic);
            assert_eq!(s.analytic_area, 1.0 / c);
            assert!((s.w.total_length() - 1.0 / c).abs() < 1e-12);
        }
    }
}

#[test]
fn trailing_coordinates_select_empty_sections() {
    let config = EmbeddingConfig::new(3, 2.0).unwrap();
    let phi = build_phi(&config).unwrap();
    let mut rng = stream(22, 0);
    for _ in 0..10_000 {
        let x = phi.domain().sample(&mut rng).unwrap();
        let y = phi.eval(&x).unwrap();
        assert!(section_membership([y[0], y[1]], &y[2..], &config));
        let mut moved = y[2..].to_vec();
        moved[2] = 1.5;
        assert!(!section_membership([y[0], y[1]], &moved, &config));
    }
}

/// Independent measure of `{P ∈ (0,1) : (target − c·P) mod c ∈ (0,1)}` by
/// splitting `(0,1)` at the breakpoints of the affine map.
fn oracle_length(target: f64, c: f64) -> f64 {
    let mut cuts = vec![0.0, 1.0];
    for k in -2..=(c.ceil() as i64 + 2) {
        for shift in [0.0, 1.0] {
            let p = (target - shift - k as f64 * c) / c;
            if p > 0.0 && p < 1.0 {
                cuts.push(p);
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.windows(2)
        .filter(|w| {
            let mid = 0.5 * (w[0] + w[1]);
            let p2 = (target - c * mid).rem_euclid(c);
            p2 > 0.0 && p2 < 1.0
        })
        .map(|w| w[1] - w[0])
        .sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn w_length_matches_piecewise_oracle(c in 1.0f64..6.0, t in 0.0f64..1.0) {
        let target = t * c;
        let w = w_set(reduce(target, c).unwrap(), c).unwrap();
        prop_assert!((w.total_length() - oracle_length(target, c)).abs() < 1e-12);
        prop_assert!((w.total_length() - 1.0 / c).abs() < 1e-12);
    }

    #[test]
    fn section_area_is_constant(c in 1.0f64..5.0, x in 0.001f64..0.999, y in 0.001f64..0.999) {
        let config = EmbeddingConfig::new(2, c).unwrap();
        let s = section_of_phi(&[x, y * c], &config);
        if s.status == SectionStatus::Generic {
            prop_assert_eq!(s.analytic_area, 1.0 / c);
        }
    }
}
