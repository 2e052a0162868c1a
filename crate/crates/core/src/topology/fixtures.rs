//! Synthetic occupancy rasters with known complement topology, all on the
//! unit box and padded by one free ring.

use rand::Rng;

use super::raster::Raster;
use crate::error::{Error, Result};

const CENTER: [f64; 2] = [0.5, 0.5];
const INNER: f64 = 0.2;
const OUTER: f64 = 0.4;

fn radius(p: [f64; 2]) -> f64 {
    (p[0] - CENTER[0]).hypot(p[1] - CENTER[1])
}

fn build(n: usize, pred: impl Fn([f64; 2]) -> bool + Sync) -> Raster {
    Raster::from_predicate(n, [0.0, 0.0], 1.0, pred)
        .expect("positive resolution")
        .padded(1)
}

/// Closed ring `0.2 ≤ |y − c| ≤ 0.4`: complement has a hole and an outside.
pub fn annulus(n: usize) -> Raster {
    build(n, |p| (INNER..=OUTER).contains(&radius(p)))
}

/// The ring cut by a zero-width radial slit carved through every crossed cell.
pub fn annulus_with_slit(n: usize) -> Raster {
    let mut r = annulus(n);
    r.carve_polyline(&[CENTER, [1.0, 0.53]]);
    r
}

/// Solid disk `|y − c| ≤ 0.4`.
pub fn disk(n: usize) -> Raster {
    build(n, |p| radius(p) <= OUTER)
}

pub const FIXTURE_NAMES: [&str; 4] = ["annulus", "annulus-slit", "disk", "empty"];

pub fn fixture_by_name(name: &str, n: usize) -> Result<Raster> {
    match name {
        "annulus" => Ok(annulus(n)),
        "annulus-slit" => Ok(annulus_with_slit(n)),
        "disk" => Ok(disk(n)),
        "empty" => Ok(build(n, |_| false)),
        other => Err(Error::InvalidArgument(format!(
            "unknown fixture {other:?}, expected one of {FIXTURE_NAMES:?}"
        ))),
    }
}

#[derive(Debug, Clone, Copy)]
struct Ring {
    center: [f64; 2],
    inner: f64,
    outer: f64,
}

impl Ring {
    fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let center = [rng.random_range(0.3..0.7), rng.random_range(0.3..0.7)];
        let outer = rng.random_range(0.05..0.25);
        let inner = if rng.random_bool(0.6) { rng.random_range(0.0..outer * 0.8) } else { 0.0 };
        Ring { center, inner, outer }
    }

    fn contains(&self, p: [f64; 2]) -> bool {
        let d = (p[0] - self.center[0]).hypot(p[1] - self.center[1]);
        d >= self.inner && d <= self.outer
    }
}

/// Random `A ⊆ B`: `A` is a union of rings and disks, `B` adds more.
pub fn random_nested_pair<R: Rng + ?Sized>(rng: &mut R, n: usize) -> (Raster, Raster) {
    let base: Vec<Ring> = (0..rng.random_range(1..4)).map(|_| Ring::random(rng)).collect();
    let extra: Vec<Ring> = (0..rng.random_range(1..3)).map(|_| Ring::random(rng)).collect();
    let a = build(n, |p| base.iter().any(|r| r.contains(p)));
    let b = build(n, |p| base.iter().chain(&extra).any(|r| r.contains(p)));
    (a, b)
}
