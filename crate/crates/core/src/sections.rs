//! Sections `{y : (y, z) ∈ φ(cube)}` of the cube embedding.
//!
//! For `z` in the punctured rectangle, `(Q², P̄₂) = λ'⁻¹(z)` and the section
//! pulled back by `λ` is the ribbon `V × W` on the cylinder: `V` is the circle
//! minus the slit point `−c·Q²` and `W ⊂ (0, 1)` has length `1/c`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::config::EmbeddingConfig;
use crate::error::{Error, Result};
use crate::maps::embedding::invert_wrapped_shear;
use crate::maps::plane::{Lambda, LambdaPrime, Point2};
use crate::quotient::{
    circle_distance, preimage_affine_mod, reduce, reduce_unchecked, CircleIntervalSet,
    CircleValue, Interval, LineIntervalSet,
};
use crate::sampling::{open_uniform, stream};

/// Points whose angle is within this distance of the slit count as on the slit.
/// Covers the round-off of one `λ` round trip.
pub const SLIT_TOLERANCE: f64 = 1e-12;

/// Generic-grid assertions skip this neighborhood of `z₀`.
pub const PUNCTURE_EXCLUSION: f64 = 1e-3;

const MC_CHUNK: usize = 1 << 15;

/// `V = (R/Z) ∖ {−c·Q²}`.
pub fn v_set(q2: f64, c: f64) -> Result<CircleIntervalSet> {
    if !(q2 > 0.0 && q2 < 1.0) {
        return Err(crate::error::domain_error("v_set", &[q2]));
    }
    Ok(CircleIntervalSet::punctured(reduce(-c * q2, 1.0)?))
}

/// `W = {P₁ ∈ (0,1) : ∃ p₂ ∈ (0,1), c·P₁ + p₂ ≡ P̄₂ (mod c)}`.
pub fn w_set(p2bar: CircleValue, c: f64) -> Result<LineIntervalSet> {
    if (p2bar.period() - c).abs() > 1e-12 * c {
        return Err(Error::InvalidArgument(format!(
            "P2 lives on R/{}Z, expected R/{c}Z",
            p2bar.period()
        )));
    }
    preimage_affine_mod(p2bar, c, Interval::new(0.0, 1.0), Interval::new(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SectionStatus {
    Empty,
    Puncture,
    Generic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CylinderParams {
    pub q2: f64,
    pub p2bar: CircleValue,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectionDescription {
    pub z: Vec<f64>,
    pub status: SectionStatus,
    pub cylinder: Option<CylinderParams>,
    pub v: CircleIntervalSet,
    pub w: LineIntervalSet,
    pub analytic_area: f64,
    #[serde(skip)]
    c: f64,
}

fn empty_section(z: &[f64], c: f64, status: SectionStatus) -> SectionDescription {
    SectionDescription {
        z: z.to_vec(),
        status,
        cylinder: None,
        v: CircleIntervalSet::empty(1.0).expect("unit period"),
        w: LineIntervalSet::empty(),
        analytic_area: 0.0,
        c,
    }
}

/// The section of `φ((0,1)^{2n})` over `z ∈ R^{2n−2}`.
pub fn section_of_phi(z: &[f64], config: &EmbeddingConfig) -> SectionDescription {
    let c = config.c;
    let inside = z.len() == config.z_dim()
        && z[0] > 0.0
        && z[0] < 1.0
        && z[1] > 0.0
        && z[1] < c
        && z[2..].iter().all(|&v| v > 0.0 && v < 1.0);
    if !inside {
        return empty_section(z, c, SectionStatus::Empty);
    }
    if z[0] == config.z0[0] && z[1] == config.z0[1] {
        return empty_section(z, c, SectionStatus::Puncture);
    }
    let lp = LambdaPrime::new(c).expect("validated c");
    let Some((q2, p2)) = lp.inverse_fast([z[0], z[1]]) else {
        return empty_section(z, c, SectionStatus::Puncture);
    };
    let p2bar = reduce(p2, c).expect("positive period");
    SectionDescription {
        z: z.to_vec(),
        status: SectionStatus::Generic,
        cylinder: Some(CylinderParams { q2, p2bar }),
        v: v_set(q2, c).expect("q2 in (0,1)"),
        w: w_set(p2bar, c).expect("matching period"),
        // V has length 1 and W has length 1/c, and λ preserves area
        analytic_area: 1.0 / c,
        c,
    }
}

impl SectionDescription {
    pub fn is_generic(&self) -> bool {
        self.status == SectionStatus::Generic
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// The slit point `−c·Q² mod 1` on the cylinder circle.
    pub fn slit_angle(&self) -> Option<f64> {
        self.cylinder
            .map(|p| reduce_unchecked(-self.c * p.q2, 1.0))
    }

    /// Membership of a cylinder point `(Q̄¹, P₁)` in `V × W`.
    #[inline]
    pub fn ribbon_contains(&self, q1bar: f64, p1: f64) -> bool {
        match self.slit_angle() {
            Some(slit) => circle_distance(q1bar, slit, 1.0) > SLIT_TOLERANCE && self.w.contains(p1),
            None => false,
        }
    }

    /// Membership of `y ∈ R²`: `λ⁻¹(y) ∈ V × W`.
    #[inline]
    pub fn contains(&self, y: Point2) -> bool {
        if !self.is_generic() {
            return false;
        }
        match Lambda::new().inverse_fast(y) {
            Some((q, p)) => self.ribbon_contains(q, p),
            None => false,
        }
    }

    /// Membership of a disc point `w ∈ B²_r` in `κ⁻¹(section)`; since
    /// `λ = κ ∘ χ` this is `χ⁻¹(w) ∈ V × W`.
    #[inline]
    pub fn disc_contains(&self, w: Point2) -> bool {
        if !self.is_generic() {
            return false;
        }
        match chi_inverse_unit(w) {
            Some((q, p)) => self.ribbon_contains(q, p),
            None => false,
        }
    }

    /// Membership of a disc point in the section of `ψ(B^{2n}_r)` over the same `z`.
    ///
    /// The unique cube preimage of `(κ(w), z)` under `φ` must come from the
    /// ball: `Σ |κ⁻¹(pair)|² < r²`, where `|κ⁻¹(s)| = 2m/√π` for the
    /// Chebyshev distance `m` of `s` from the square center.
    #[inline]
    pub fn psi_contains(&self, w: Point2) -> bool {
        self.disc_membership(w).1
    }

    /// `(disc_contains(w), psi_contains(w))` sharing one `χ⁻¹` evaluation.
    #[inline]
    pub fn disc_membership(&self, w: Point2) -> (bool, bool) {
        let Some(params) = self.cylinder else {
            return (false, false);
        };
        let Some((q1bar, p1)) = chi_inverse_unit(w) else {
            return (false, false);
        };
        if !self.ribbon_contains(q1bar, p1) {
            return (false, false);
        }
        let Some(cube) =
            invert_wrapped_shear(self.c, q1bar, p1, params.q2, params.p2bar.representative())
        else {
            return (true, false);
        };
        let m2 = |a: f64, b: f64| {
            let m = (a - 0.5).abs().max((b - 0.5).abs());
            m * m
        };
        let mut sum = m2(cube[0], cube[1]) + m2(cube[2], cube[3]);
        for pair in self.z[2..].chunks_exact(2) {
            sum += m2(pair[0], pair[1]);
        }
        // (4/π)·Σm² < r² = 1/π
        (true, 4.0 * sum < 1.0)
    }
}

/// `χ⁻¹` for the unit cylinder: `(angle/2π mod 1, 1 − π|w|²)` on the open
/// punctured disc of radius `π^{−1/2}`.
#[inline]
fn chi_inverse_unit([u, v]: Point2) -> Option<(f64, f64)> {
    let r2 = u * u + v * v;
    let p = 1.0 - PI * r2;
    if !(r2 > 0.0 && p > 0.0) {
        return None;
    }
    Some((reduce_unchecked(v.atan2(u) / (2.0 * PI), 1.0), p))
}

/// Is `y` in the section of `φ` over `z`?
pub fn section_membership(y: Point2, z: &[f64], config: &EmbeddingConfig) -> bool {
    section_of_phi(z, config).contains(y)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AreaEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub samples: usize,
    pub seed: u64,
}

impl AreaEstimate {
    /// Whether `value` is within `k` standard errors of the estimate. A zero
    /// standard error requires exact agreement.
    pub fn agrees_with(&self, value: f64, k: f64) -> bool {
        (self.estimate - value).abs() <= k * self.stderr
    }
}

/// Monte Carlo area of a section by membership over the unit square.
pub fn section_area_mc(section: &SectionDescription, samples: usize, seed: u64) -> Result<AreaEstimate> {
    if samples < 10_000 {
        return Err(Error::InvalidArgument(format!(
            "need at least 10^4 samples, got {samples}"
        )));
    }
    Ok(mc_area(section, samples, seed))
}

fn mc_area(section: &SectionDescription, samples: usize, seed: u64) -> AreaEstimate {
    let hits: usize = if section.is_generic() {
        (0..samples.div_ceil(MC_CHUNK))
            .into_par_iter()
            .map(|k| {
                let mut rng = stream(seed, k as u64);
                let count = MC_CHUNK.min(samples - k * MC_CHUNK);
                (0..count)
                    .filter(|_| {
                        let y = [open_uniform(&mut rng, 0.0, 1.0), open_uniform(&mut rng, 0.0, 1.0)];
                        section.contains(y)
                    })
                    .count()
            })
            .sum()
    } else {
        0
    };
    let p = hits as f64 / samples as f64;
    AreaEstimate {
        estimate: p,
        stderr: (p * (1.0 - p) / samples as f64).sqrt(),
        samples,
        seed,
    }
}

/// Cell-centered grid over `(0,1) × (0,c)` for the first two `z` coordinates;
/// the remaining coordinates are fixed at `1/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZGrid {
    pub nx: usize,
    pub ny: usize,
    pub c: f64,
}

impl ZGrid {
    pub fn new(nx: usize, ny: usize, c: f64) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::InvalidArgument("empty z-grid".into()));
        }
        Ok(ZGrid { nx, ny, c })
    }

    pub fn cell_area(&self) -> f64 {
        self.c / (self.nx * self.ny) as f64
    }

    /// Row-major cell centers.
    pub fn points(&self, z_dim: usize) -> Vec<Vec<f64>> {
        let mut out = Vec::with_capacity(self.nx * self.ny);
        for j in 0..self.ny {
            for i in 0..self.nx {
                let mut z = vec![0.5; z_dim];
                z[0] = (i as f64 + 0.5) / self.nx as f64;
                z[1] = (j as f64 + 0.5) * self.c / self.ny as f64;
                out.push(z);
            }
        }
        out
    }
}

/// True when `z` is away from the puncture `z₀` by at least [`PUNCTURE_EXCLUSION`].
pub fn away_from_puncture(z: &[f64], config: &EmbeddingConfig) -> bool {
    (z[0] - config.z0[0]).hypot(z[1] - config.z0[1]) >= PUNCTURE_EXCLUSION
}

/// `count` uniform points of `(0,1) × (0,c)` at least [`PUNCTURE_EXCLUSION`]
/// from `z₀`, trailing coordinates fixed at `1/2`.
pub fn sample_generic_z(config: &EmbeddingConfig, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = stream(seed, 0);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut z = vec![0.5; config.z_dim()];
        z[0] = open_uniform(&mut rng, 0.0, 1.0);
        z[1] = open_uniform(&mut rng, 0.0, config.c);
        if away_from_puncture(&z, config) {
            out.push(z);
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct FubiniReport {
    pub grid: ZGrid,
    pub cells: usize,
    pub generic_cells: usize,
    pub max_area: f64,
    pub min_generic_area: f64,
    /// `Σ area(z)·cell_area`, which should equal the cube volume 1.
    pub integral: f64,
    pub monte_carlo: bool,
    pub samples_per_cell: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(skip)]
    pub cell_areas: Vec<CellArea>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CellArea {
    pub z: Vec<f64>,
    pub status: SectionStatus,
    pub analytic_area: f64,
    pub mc: Option<AreaEstimate>,
}

/// Integrates section area over the `z` grid. With `samples_per_cell == 0`
/// analytic areas are used, otherwise per-cell Monte Carlo estimates with
/// independent streams.
pub fn fubini_check(
    config: &EmbeddingConfig,
    grid: ZGrid,
    samples_per_cell: usize,
    seed: u64,
    tolerance: f64,
) -> Result<FubiniReport> {
    if (grid.c - config.c).abs() > 1e-12 * config.c {
        return Err(Error::InvalidArgument("z-grid does not cover (0,1) x (0,c)".into()));
    }
    let points = grid.points(config.z_dim());
    let cell_areas: Vec<CellArea> = points
        .par_iter()
        .enumerate()
        .map(|(k, z)| {
            let s = section_of_phi(z, config);
            let mc = (samples_per_cell > 0)
                .then(|| mc_area(&s, samples_per_cell, seed.wrapping_add(k as u64)));
            CellArea {
                z: z.clone(),
                status: s.status,
                analytic_area: s.analytic_area,
                mc,
            }
        })
        .collect();
    let areas: Vec<(bool, f64)> = cell_areas
        .iter()
        .map(|a| {
            let area = a.mc.map_or(a.analytic_area, |m| m.estimate);
            (a.status == SectionStatus::Generic, area)
        })
        .collect();
    let integral = areas.iter().map(|&(_, a)| a).sum::<f64>() * grid.cell_area();
    let max_area = areas.iter().map(|&(_, a)| a).fold(0.0, f64::max);
    let min_generic_area = areas
        .iter()
        .filter(|&&(g, _)| g)
        .map(|&(_, a)| a)
        .fold(f64::INFINITY, f64::min);
    let floor = 1.0 / config.c;
    let max_ok = if samples_per_cell == 0 {
        max_area >= floor
    } else {
        max_area >= floor - tolerance
    };
    Ok(FubiniReport {
        grid,
        cells: areas.len(),
        generic_cells: areas.iter().filter(|&&(g, _)| g).count(),
        max_area,
        min_generic_area,
        integral,
        monte_carlo: samples_per_cell > 0,
        samples_per_cell,
        seed,
        tolerance,
        passed: max_ok && (integral - 1.0).abs() <= tolerance,
        cell_areas,
    })
}
