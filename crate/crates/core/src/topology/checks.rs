use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use super::labels::{bounded_hull, complement_components};
use super::raster::Raster;
use crate::config::EmbeddingConfig;
use crate::error::{Error, Result};
use crate::maps::plane::{Lambda, Point2};
use crate::sections::{section_of_phi, SectionDescription, SectionStatus, ZGrid};

pub const MIN_RASTER_N: usize = 64;
/// Below this resolution connectivity verdicts are advisory.
pub const MIN_CONNECTIVITY_N: usize = 256;

fn require_resolution(n: usize, min: usize) -> Result<()> {
    if n < min {
        return Err(Error::InvalidArgument(format!("raster resolution {n} is below {min}")));
    }
    Ok(())
}

/// End points of the slit `λ(−cQ², t)`, `t ∈ (0, 1)`: a straight segment from
/// the square boundary (`t → 0`) to `y₀` (`t → 1`), since `κ` maps rays to rays.
pub fn square_slit(section: &SectionDescription) -> Option<[Point2; 2]> {
    let s = section.slit_angle()?;
    let lambda = Lambda::new();
    let y0 = lambda.puncture();
    let mid = lambda.forward_closed([s, 0.5]).ok()?;
    let d = [mid[0] - y0[0], mid[1] - y0[1]];
    let m = d[0].abs().max(d[1].abs());
    let scale = 0.5 / m;
    Some([[y0[0] + d[0] * scale, y0[1] + d[1] * scale], y0])
}

/// Cell-center rasterization of the section on the unit square, padded by one
/// free ring, without slit carving.
pub fn rasterize_section_raw(section: &SectionDescription, n: usize) -> Result<Raster> {
    require_resolution(n, MIN_RASTER_N)?;
    let r = if section.is_generic() {
        Raster::from_predicate(n, [0.0, 0.0], 1.0, |y| section.contains(y))?
    } else {
        Raster::empty(n, [0.0, 0.0], 1.0)?
    };
    Ok(r.padded(1))
}

/// [`rasterize_section_raw`] with the cells crossed by the slit freed.
pub fn rasterize_section_of(section: &SectionDescription, n: usize) -> Result<Raster> {
    let mut r = rasterize_section_raw(section, n)?;
    if let Some([a, b]) = square_slit(section) {
        r.carve_polyline(&[a, b]);
    }
    Ok(r)
}

pub fn rasterize_section(z: &[f64], config: &EmbeddingConfig, n: usize) -> Result<Raster> {
    rasterize_section_of(&section_of_phi(z, config), n)
}

#[derive(Debug, Clone, Serialize)]
pub struct ConnectivityReport {
    pub z: Vec<f64>,
    pub status: SectionStatus,
    pub n: usize,
    pub components: usize,
    pub raw_components: usize,
    pub occupied_area: f64,
    pub perimeter: f64,
    pub connected: bool,
}

/// Complement connectivity of the section over `z` in the plane, with and
/// without the slit carved.
pub fn check_complement_connected(
    z: &[f64],
    config: &EmbeddingConfig,
    n: usize,
) -> Result<ConnectivityReport> {
    require_resolution(n, MIN_CONNECTIVITY_N)?;
    let section = section_of_phi(z, config);
    let raw = rasterize_section_raw(&section, n)?;
    let raw_components = complement_components(&raw).count();
    let mut carved = raw;
    if let Some([a, b]) = square_slit(&section) {
        carved.carve_polyline(&[a, b]);
    }
    let components = complement_components(&carved).count();
    Ok(ConnectivityReport {
        z: z.to_vec(),
        status: section.status,
        n,
        components,
        raw_components,
        occupied_area: carved.area(),
        perimeter: carved.perimeter(),
        connected: components == 1,
    })
}

/// Connectivity at every `(z, N)`, z-major, with the z values processed in parallel.
pub fn connectivity_sweep(
    config: &EmbeddingConfig,
    zs: &[Vec<f64>],
    ns: &[usize],
) -> Result<Vec<ConnectivityReport>> {
    let per_z: Vec<Result<Vec<ConnectivityReport>>> = zs
        .par_iter()
        .map(|z| ns.iter().map(|&n| check_complement_connected(z, config, n)).collect())
        .collect();
    let mut out = Vec::with_capacity(zs.len() * ns.len());
    for r in per_z {
        out.extend(r?);
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct SlitWitness {
    pub z: Vec<f64>,
    pub slit_angle: f64,
    pub steps: usize,
    pub t: Vec<f64>,
    pub points: Vec<Point2>,
    pub members: usize,
    pub all_outside: bool,
    /// Distance from the `t → 0` sample to the square boundary.
    pub start_boundary_distance: f64,
    /// Distance from the `t → 1` sample to `y₀`.
    pub end_puncture_distance: f64,
    pub passed: bool,
}

/// Samples `y(t) = λ(−cQ², t)` at `t = k/(steps+1)` and tests section membership.
pub fn slit_path_witness(z: &[f64], config: &EmbeddingConfig, steps: usize) -> Result<SlitWitness> {
    let section = section_of_phi(z, config);
    let Some(s) = section.slit_angle() else {
        return Err(Error::InvalidArgument(format!("z = {z:?} has no generic section")));
    };
    if steps == 0 {
        return Err(Error::InvalidArgument("slit witness needs at least one step".into()));
    }
    let lambda = Lambda::new();
    let t: Vec<f64> = (1..=steps).map(|k| k as f64 / (steps + 1) as f64).collect();
    let points = t
        .iter()
        .map(|&t| lambda.forward_closed([s, t]))
        .collect::<Result<Vec<_>>>()?;
    let members = points.iter().filter(|&&y| section.contains(y)).count();
    let first = points[0];
    let last = points[steps - 1];
    let start_boundary_distance = first[0].min(first[1]).min(1.0 - first[0]).min(1.0 - first[1]);
    let y0 = lambda.puncture();
    let end_puncture_distance = (last[0] - y0[0]).hypot(last[1] - y0[1]);
    let scale = steps as f64;
    let passed = members == 0
        && start_boundary_distance <= 1.0 / scale
        && end_puncture_distance <= 1.0 / scale.sqrt();
    Ok(SlitWitness {
        z: z.to_vec(),
        slit_angle: s,
        steps,
        t,
        points,
        members,
        all_outside: members == 0,
        start_boundary_distance,
        end_puncture_distance,
        passed,
    })
}

/// `V = κ⁻¹(section)` and the `ψ`-section over the same `z`, rasterized on
/// `[−r, r]²`, slit carved along the radial ray, padded by one free ring.
pub fn rasterize_disc_sections(section: &SectionDescription, n: usize, r: f64) -> Result<(Raster, Raster)> {
    require_resolution(n, MIN_RASTER_N)?;
    let origin = [-r, -r];
    let mut v = Raster::empty(n, origin, 2.0 * r)?;
    let mut psi = v.clone();
    if section.is_generic() {
        for j in 0..n {
            for i in 0..n {
                let (a, b) = section.disc_membership(v.center(i, j));
                v.set(i, j, a);
                psi.set(i, j, b);
            }
        }
    }
    let (mut v, mut psi) = (v.padded(1), psi.padded(1));
    if let Some(s) = section.slit_angle() {
        let theta = 2.0 * PI * s;
        let reach = r + 2.0 * v.cell_size();
        let slit = [[0.0, 0.0], [reach * theta.cos(), reach * theta.sin()]];
        v.carve_polyline(&slit);
        psi.carve_polyline(&slit);
    }
    Ok((v, psi))
}

#[derive(Debug, Clone, Serialize)]
pub struct HullCell {
    pub z: Vec<f64>,
    pub status: SectionStatus,
    pub v_area: f64,
    pub v_is_own_hull: bool,
    pub psi_area: f64,
    pub hull_area: f64,
    pub psi_is_own_hull: bool,
    pub hull_idempotent: bool,
    pub hull_within_v: bool,
    pub perimeter: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct HullReport {
    pub a: f64,
    pub c: f64,
    pub n: usize,
    pub grid: ZGrid,
    pub max_hull_area: f64,
    pub max_excess: f64,
    pub cells: Vec<HullCell>,
    pub passed: bool,
}

fn hull_cell(section: &SectionDescription, a: f64, n: usize, r: f64) -> Result<HullCell> {
    let (v, psi) = rasterize_disc_sections(section, n, r)?;
    let v_hull = bounded_hull(&v)?;
    let psi_hull = bounded_hull(&psi)?;
    let hull_idempotent = bounded_hull(&psi_hull)? == psi_hull;
    let perimeter = psi.perimeter();
    let tolerance = 4.0 * perimeter * v.cell_size();
    let hull_area = psi_hull.area();
    let v_is_own_hull = v_hull == v;
    let passed = hull_area <= a + tolerance && hull_idempotent && v_is_own_hull;
    Ok(HullCell {
        z: section.z.clone(),
        status: section.status,
        v_area: v.area(),
        v_is_own_hull,
        psi_area: psi.area(),
        hull_area,
        psi_is_own_hull: psi_hull == psi,
        hull_idempotent,
        hull_within_v: psi_hull.is_subset_of(&v)?,
        perimeter,
        tolerance,
        passed,
    })
}

/// Bounded-hull areas of the `ψ`-sections over a `z` grid against the bound `a`.
pub fn check_hull_bound(a: f64, config: &EmbeddingConfig, grid: ZGrid, n: usize) -> Result<HullReport> {
    let expected = EmbeddingConfig::for_hull_bound(config.n, a)?;
    if (expected.c - config.c).abs() > 1e-12 * config.c || (grid.c - config.c).abs() > 1e-12 * config.c {
        return Err(Error::Config(format!("hull bound a = {a} needs c = 1/a on config and grid")));
    }
    let cells = grid
        .points(config.z_dim())
        .par_iter()
        .map(|z| hull_cell(&section_of_phi(z, config), a, n, config.r))
        .collect::<Result<Vec<_>>>()?;
    let max_hull_area = cells.iter().map(|c| c.hull_area).fold(0.0, f64::max);
    let max_excess = cells
        .iter()
        .map(|c| c.hull_area - a - c.tolerance)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(HullReport {
        a,
        c: config.c,
        n,
        grid,
        max_hull_area,
        max_excess,
        passed: cells.iter().all(|c| c.passed),
        cells,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct AreaConvergence {
    pub resolutions: Vec<usize>,
    /// Mean `|raster area − 1/c|` over the tested `z`, per resolution.
    pub mean_errors: Vec<f64>,
    /// Least-squares `C` in `error ≈ C/N`.
    pub fitted_c: f64,
    pub monotone: bool,
}

/// Convergence of carved raster areas to the analytic `1/c`.
pub fn area_convergence(config: &EmbeddingConfig, zs: &[Vec<f64>], ns: &[usize]) -> Result<AreaConvergence> {
    let target = 1.0 / config.c;
    let mut mean_errors = Vec::with_capacity(ns.len());
    for &n in ns {
        let errs = zs
            .par_iter()
            .map(|z| rasterize_section(z, config, n).map(|r| (r.area() - target).abs()))
            .collect::<Result<Vec<_>>>()?;
        mean_errors.push(errs.iter().sum::<f64>() / errs.len().max(1) as f64);
    }
    let inv: Vec<f64> = ns.iter().map(|&n| 1.0 / n as f64).collect();
    let fitted_c = mean_errors.iter().zip(&inv).map(|(e, x)| e * x).sum::<f64>()
        / inv.iter().map(|x| x * x).sum::<f64>();
    let monotone = mean_errors.windows(2).all(|w| w[1] <= w[0]);
    Ok(AreaConvergence {
        resolutions: ns.to_vec(),
        mean_errors,
        fitted_c,
        monotone,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sections::sample_generic_z;

    fn cfg(c: f64) -> EmbeddingConfig {
        EmbeddingConfig::new(2, c).unwrap()
    }

    #[test]
    fn puncture_rasterizes_empty() {
        let c = cfg(2.0);
        let r = rasterize_section(&c.z0, &c, 64).unwrap();
        assert_eq!(r.occupied_count(), 0);
        assert!(check_complement_connected(&c.z0, &c, 256).unwrap().connected);
        assert!(rasterize_section(&c.z0, &c, 32).is_err());
        assert!(check_complement_connected(&c.z0, &c, 128).is_err());
    }

    #[test]
    fn raster_area_near_one_over_c() {
        let c = cfg(2.0);
        let r = rasterize_section(&[0.3, 0.7], &c, 1024).unwrap();
        assert!((r.area() - 0.5).abs() < 2.0 * r.perimeter() / 1024.0, "{}", r.area());
    }

    #[test]
    fn slit_cells_are_free_and_square_slit_hits_the_boundary() {
        let c = cfg(1.5);
        let s = section_of_phi(&[0.2, 0.4], &c);
        let [a, b] = square_slit(&s).unwrap();
        assert_eq!(b, [0.5, 0.5]);
        let m = (a[0] - 0.5).abs().max((a[1] - 0.5).abs());
        assert!((m - 0.5).abs() < 1e-12);
        let r = rasterize_section_of(&s, 256).unwrap();
        for (i, j) in r.segment_cells(a, b) {
            assert!(!r.get(i, j));
        }
    }

    #[test]
    fn generic_complements_connect_only_through_the_slit() {
        for c in [1.0, 2.0, PI] {
            let config = cfg(c);
            for z in sample_generic_z(&config, 5, 11) {
                let rep = check_complement_connected(&z, &config, 256).unwrap();
                assert!(rep.connected, "{rep:?}");
            }
        }
        // c = 2 sections are two bands around an inner free ring, closed off without the slit
        let config = cfg(2.0);
        let rep = check_complement_connected(&[0.3, 0.7], &config, 256).unwrap();
        assert!(rep.raw_components > 1, "{rep:?}");
    }

    #[test]
    fn witness_examples() {
        let config = cfg(2.0);
        let w = slit_path_witness(&[0.3, 0.7], &config, 1000).unwrap();
        assert!(w.passed, "{} {} {}", w.members, w.start_boundary_distance, w.end_puncture_distance);
        assert!(w.start_boundary_distance < 1e-2);
        assert!(slit_path_witness(&config.z0, &config, 10).is_err());
        assert!(slit_path_witness(&[0.3, 0.7], &config, 0).is_err());
    }

    #[test]
    fn hull_cells_small() {
        let config = EmbeddingConfig::for_hull_bound(2, 0.5).unwrap();
        let rep = check_hull_bound(0.5, &config, ZGrid::new(3, 3, 2.0).unwrap(), 256).unwrap();
        assert!(rep.passed, "{rep:#?}");
        assert_eq!(rep.cells[4].status, SectionStatus::Puncture);
        assert_eq!(rep.cells[4].hull_area, 0.0);
        for cell in rep.cells.iter().filter(|c| c.status == SectionStatus::Generic) {
            assert!(cell.hull_within_v);
            assert!((cell.v_area - 0.5).abs() < 0.05, "{cell:?}");
        }
        assert!(check_hull_bound(0.25, &config, ZGrid::new(2, 2, 2.0).unwrap(), 256).is_err());
    }

    #[test]
    fn convergence_improves_with_resolution() {
        let config = cfg(2.0);
        let zs = sample_generic_z(&config, 4, 3);
        let conv = area_convergence(&config, &zs, &[128, 256, 512]).unwrap();
        assert!(conv.monotone, "{conv:?}");
        assert!(conv.fitted_c > 0.0);
    }
}
