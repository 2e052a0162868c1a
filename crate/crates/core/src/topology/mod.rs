//! Raster topology of sections: complement connectivity, the slit witness
//! and bounded hulls.

pub mod checks;
pub mod fixtures;
pub mod labels;
pub mod raster;

pub use checks::{
    area_convergence, check_complement_connected, check_hull_bound, connectivity_sweep,
    rasterize_disc_sections, rasterize_section, rasterize_section_of, rasterize_section_raw,
    slit_path_witness, square_slit, AreaConvergence, ConnectivityReport, HullCell, HullReport,
    SlitWitness, MIN_CONNECTIVITY_N, MIN_RASTER_N,
};
pub use fixtures::{annulus, annulus_with_slit, disk, fixture_by_name, random_nested_pair, FIXTURE_NAMES};
pub use labels::{bounded_hull, complement_components, label_components, Connectivity, RegionLabels};
pub use raster::{Raster, RunLengthRaster};
