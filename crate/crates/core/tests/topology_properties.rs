use std::f64::consts::PI;

use symwrap::sampling::stream;
use symwrap::sections::{sample_generic_z, section_of_phi};
use symwrap::topology::{
    area_convergence, bounded_hull, check_complement_connected, complement_components,
    random_nested_pair, rasterize_section, rasterize_section_raw, square_slit,
};
use symwrap::EmbeddingConfig;

#[test]
fn component_count_is_resolution_invariant() {
    for c in [1.5, PI] {
        let config = EmbeddingConfig::new(2, c).unwrap();
        for z in sample_generic_z(&config, 6, 50) {
            let counts: Vec<usize> = [256, 512, 1024]
                .iter()
                .map(|&n| check_complement_connected(&z, &config, n).unwrap().components)
                .collect();
            assert_eq!(counts, vec![1, 1, 1], "{z:?}");
        }
    }
}

#[test]
fn raster_area_converges_monotonically() {
    let config = EmbeddingConfig::new(2, 2.0).unwrap();
    let zs = sample_generic_z(&config, 12, 51);
    let conv = area_convergence(&config, &zs, &[256, 512, 1024]).unwrap();
    assert!(conv.monotone, "{conv:?}");
    for (n, e) in conv.resolutions.iter().zip(&conv.mean_errors) {
        assert!(*e <= 2.0 * conv.fitted_c / *n as f64, "{conv:?}");
    }
}

#[test]
fn hull_is_monotone_on_nested_fixtures() {
    let mut rng = stream(52, 0);
    for _ in 0..1000 {
        let (a, b) = random_nested_pair(&mut rng, 40);
        let (ha, hb) = (bounded_hull(&a).unwrap(), bounded_hull(&b).unwrap());
        assert!(ha.is_subset_of(&hb).unwrap());
        assert_eq!(bounded_hull(&ha).unwrap(), ha);
    }
}

#[test]
fn sections_are_their_own_hulls() {
    let config = EmbeddingConfig::new(2, 2.0).unwrap();
    for z in sample_generic_z(&config, 8, 53) {
        let r = rasterize_section(&z, &config, 256).unwrap();
        assert_eq!(bounded_hull(&r).unwrap(), r);
    }
}

#[test]
fn slit_is_the_only_exit() {
    // W is a single band away from both ends here, so without the slit the
    // inner free disc around y0 is enclosed
    let config = EmbeddingConfig::new(2, 2.0).unwrap();
    let z = [0.3, 0.7];
    let s = section_of_phi(&z, &config);
    assert_eq!(s.w.len(), 1);
    let raw = rasterize_section_raw(&s, 512).unwrap();
    assert!(complement_components(&raw).count() >= 2);
    let carved = rasterize_section(&z, &config, 512).unwrap();
    assert_eq!(complement_components(&carved).count(), 1);
    assert!(square_slit(&s).is_some());
}
