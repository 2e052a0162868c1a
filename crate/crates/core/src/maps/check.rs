//! Sampling-based verification of phase maps.

use std::collections::HashMap;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use super::embedding::{Phi, Psi};
use super::phase::{symplectic_defect, PhaseMap};
use crate::error::{Error, Result};
use crate::sampling::{open_uniform, stream};

/// Samples drawn per deterministic stream in the parallel drivers.
const CHUNK: usize = 1 << 14;

/// Fourth-order central-difference Jacobian with step `h`.
pub fn fd_jacobian(map: &dyn PhaseMap, x: &[f64], h: f64) -> Result<DMatrix<f64>> {
    let d = map.dim();
    let mut j = DMatrix::zeros(d, d);
    let mut probe = x.to_vec();
    for col in 0..d {
        let mut at = |t: f64| -> Result<Vec<f64>> {
            probe[col] = x[col] + t;
            let y = map.eval(&probe);
            probe[col] = x[col];
            y
        };
        let (a, b, c, e) = (at(2.0 * h)?, at(h)?, at(-h)?, at(-2.0 * h)?);
        for row in 0..d {
            j[(row, col)] = (-a[row] + 8.0 * b[row] - 8.0 * c[row] + e[row]) / (12.0 * h);
        }
    }
    Ok(j)
}

#[derive(Debug, Clone, Serialize)]
pub struct SymplecticReport {
    pub map: String,
    pub samples: usize,
    pub seed: u64,
    pub margin: f64,
    pub rejected: usize,
    pub max_deviation: f64,
    pub worst_point: Vec<f64>,
    /// `‖JᵀΩJ − Ω‖∞` with finite-difference Jacobians, when requested.
    pub fd_max_deviation: Option<f64>,
    /// Largest entrywise gap between analytic and finite-difference Jacobians,
    /// relative to the largest analytic entry.
    pub fd_max_jacobian_error: Option<f64>,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct SymplecticOptions {
    pub samples: usize,
    pub tolerance: f64,
    pub seed: u64,
    /// Skip sample points within this distance of a singular locus or the domain boundary.
    pub margin: f64,
    /// Finite-difference step for the cross-check; `None` skips it.
    pub fd_step: Option<f64>,
}

/// Draws `samples` smooth domain points and reports the worst `‖JᵀΩJ − Ω‖∞`.
pub fn check_symplectic(map: &dyn PhaseMap, opts: SymplecticOptions) -> Result<SymplecticReport> {
    if opts.samples == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    let domain = map.domain();
    let mut rng = stream(opts.seed, 0);
    let max_attempts = 1000 * opts.samples;
    let mut points = Vec::with_capacity(opts.samples);
    let mut attempts = 0;
    while points.len() < opts.samples {
        if attempts >= max_attempts {
            return Err(Error::Sampling {
                attempts,
                accepted: points.len(),
            });
        }
        attempts += 1;
        let x = domain.sample(&mut rng)?;
        let clearance = map.singular_distance(&x).min(domain.boundary_distance(&x));
        if clearance >= opts.margin {
            points.push(x);
        }
    }

    struct Row {
        dev: f64,
        fd_dev: f64,
        fd_err: f64,
    }
    let rows: Vec<Row> = points
        .par_iter()
        .map(|x| -> Result<Row> {
            let j = map.jacobian(x)?;
            let dev = symplectic_defect(&j);
            let (fd_dev, fd_err) = match opts.fd_step {
                Some(h) => {
                    let f = fd_jacobian(map, x, h)?;
                    let scale = j.abs().max().max(1.0);
                    (symplectic_defect(&f), (&f - &j).abs().max() / scale)
                }
                None => (0.0, 0.0),
            };
            Ok(Row { dev, fd_dev, fd_err })
        })
        .collect::<Result<_>>()?;

    let (worst, max_dev) = rows
        .iter()
        .enumerate()
        .fold((0, 0.0_f64), |(wi, wd), (i, r)| if r.dev > wd { (i, r.dev) } else { (wi, wd) });
    let fd_dev = rows.iter().map(|r| r.fd_dev).fold(0.0, f64::max);
    let fd_err = rows.iter().map(|r| r.fd_err).fold(0.0, f64::max);
    Ok(SymplecticReport {
        map: map.name(),
        samples: opts.samples,
        seed: opts.seed,
        margin: opts.margin,
        rejected: attempts - opts.samples,
        max_deviation: max_dev,
        worst_point: points[worst].clone(),
        fd_max_deviation: opts.fd_step.map(|_| fd_dev),
        fd_max_jacobian_error: opts.fd_step.map(|_| fd_err),
        tolerance: opts.tolerance,
        passed: max_dev < opts.tolerance,
    })
}

/// Seeded samples from `map`'s domain together with their images, in parallel.
fn sample_images(map: &dyn PhaseMap, samples: usize, seed: u64) -> Result<Vec<(Vec<f64>, Vec<f64>)>> {
    let domain = map.domain();
    let chunks = samples.div_ceil(CHUNK);
    let nested: Vec<Vec<(Vec<f64>, Vec<f64>)>> = (0..chunks)
        .into_par_iter()
        .map(|k| -> Result<_> {
            let mut rng = stream(seed, k as u64);
            let count = CHUNK.min(samples - k * CHUNK);
            (0..count)
                .map(|_| {
                    let x = domain.sample(&mut rng)?;
                    let y = map.eval(&x)?;
                    Ok((x, y))
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(nested.into_iter().flatten().collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct ContainmentReport {
    pub map: String,
    pub samples: usize,
    pub seed: u64,
    pub inside: usize,
    pub passed: bool,
}

pub fn check_phi_containment(phi: &Phi, samples: usize, seed: u64) -> Result<ContainmentReport> {
    let pts = sample_images(phi, samples, seed)?;
    let inside = pts.iter().filter(|(_, y)| phi.in_codomain(y)).count();
    Ok(ContainmentReport {
        map: phi.name(),
        samples,
        seed,
        inside,
        passed: inside == samples,
    })
}

pub fn check_psi_containment(psi: &Psi, samples: usize, seed: u64) -> Result<ContainmentReport> {
    let pts = sample_images(psi, samples, seed)?;
    let inside = pts.iter().filter(|(_, y)| psi.first_factor_inside(y)).count();
    Ok(ContainmentReport {
        map: psi.name(),
        samples,
        seed,
        inside,
        passed: inside == samples,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct InjectivityReport {
    pub map: String,
    pub samples: usize,
    pub seed: u64,
    pub image_tolerance: f64,
    pub min_preimage_separation: f64,
    /// Image pairs within tolerance whose preimages are at least the separation apart.
    pub collisions: usize,
    /// Image pairs within tolerance whose preimages are closer than the separation.
    pub near_pairs: usize,
    pub passed: bool,
}

fn sup_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max)
}

/// Hash-grid search for image pairs closer than `image_tol` (sup norm) whose
/// preimages are at least `min_sep` apart.
pub fn check_injectivity(
    map: &dyn PhaseMap,
    samples: usize,
    seed: u64,
    image_tol: f64,
    min_sep: f64,
) -> Result<InjectivityReport> {
    let pts = sample_images(map, samples, seed)?;
    // A close pair is close in the first two coordinates; bucket on those.
    let key = |y: &[f64]| ((y[0] / image_tol).floor() as i64, (y[1] / image_tol).floor() as i64);
    let mut grid: HashMap<(i64, i64), Vec<u32>> = HashMap::with_capacity(pts.len());
    let mut collisions = 0;
    let mut near_pairs = 0;
    for (i, (x, y)) in pts.iter().enumerate() {
        let (kx, ky) = key(y);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(bucket) = grid.get(&(kx + dx, ky + dy)) {
                    for &j in bucket {
                        let (xj, yj) = &pts[j as usize];
                        if sup_distance(y, yj) < image_tol {
                            if sup_distance(x, xj) >= min_sep {
                                collisions += 1;
                            } else {
                                near_pairs += 1;
                            }
                        }
                    }
                }
            }
        }
        grid.entry((kx, ky)).or_default().push(i as u32);
    }
    Ok(InjectivityReport {
        map: map.name(),
        samples,
        seed,
        image_tolerance: image_tol,
        min_preimage_separation: min_sep,
        collisions,
        near_pairs,
        passed: collisions == 0,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct VolumeReport {
    pub samples: usize,
    pub seed: u64,
    pub estimate: f64,
    pub stderr: f64,
}

/// Monte Carlo volume of `φ((0,1)^{2n})` inside its polydisc, using the
/// analytic preimage as the membership test.
pub fn image_volume(phi: &Phi, samples: usize, seed: u64) -> VolumeReport {
    let dim = phi.config().dim();
    let c = phi.config().c;
    let chunks = samples.div_ceil(CHUNK);
    let hits: usize = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream(seed, k as u64);
            let count = CHUNK.min(samples - k * CHUNK);
            let mut y = vec![0.0; dim];
            (0..count)
                .filter(|_| {
                    for (i, v) in y.iter_mut().enumerate() {
                        *v = open_uniform(&mut rng, 0.0, if i == 3 { c } else { 1.0 });
                    }
                    phi.preimage(&y).is_some()
                })
                .count()
        })
        .sum();
    let p = hits as f64 / samples as f64;
    VolumeReport {
        samples,
        seed,
        estimate: c * p,
        stderr: c * (p * (1.0 - p) / samples as f64).sqrt(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::EmbeddingConfig;
    use crate::maps::embedding::{build_phi, build_psi};
    use crate::maps::phase::{shear, Domain, Identity, Restricted};

    fn opts(samples: usize, fd: bool) -> SymplecticOptions {
        SymplecticOptions {
            samples,
            tolerance: 1e-8,
            seed: 42,
            margin: 1e-4,
            fd_step: fd.then_some(1e-6),
        }
    }

    #[test]
    fn identity_has_zero_deviation() {
        let id = Restricted {
            map: Identity(4),
            domain: Domain::unit_cube(4),
        };
        let r = check_symplectic(&id, opts(100, true)).unwrap();
        assert_eq!(r.max_deviation, 0.0);
        assert!(r.passed);
    }

    #[test]
    fn shear_is_exactly_symplectic() {
        let s = Restricted {
            map: shear(2.0).unwrap(),
            domain: Domain::unit_cube(4),
        };
        let r = check_symplectic(&s, opts(1000, true)).unwrap();
        assert!(r.max_deviation < 1e-12);
        assert!(r.fd_max_deviation.unwrap() < 1e-8);
    }

    #[test]
    fn unbounded_domain_cannot_be_sampled() {
        assert!(check_symplectic(&shear(2.0).unwrap(), opts(10, false)).is_err());
        assert!(check_symplectic(&Identity(2), opts(0, false)).is_err());
    }

    #[test]
    fn impossible_margin_is_a_sampling_error() {
        let id = Restricted {
            map: Identity(2),
            domain: Domain::unit_cube(2),
        };
        let mut o = opts(10, false);
        o.margin = 0.6;
        assert!(matches!(check_symplectic(&id, o), Err(Error::Sampling { .. })));
    }

    #[test]
    fn phi_is_symplectic() {
        let phi = build_phi(&EmbeddingConfig::new(2, 1.5).unwrap()).unwrap();
        let r = check_symplectic(&phi, opts(10_000, false)).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn composed_jacobian_matches_finite_differences() {
        let phi = build_phi(&EmbeddingConfig::new(2, 2.0).unwrap()).unwrap();
        let r = check_symplectic(&phi, opts(2_000, true)).unwrap();
        assert!(r.fd_max_jacobian_error.unwrap() < 1e-5, "{r:?}");
        let psi = build_psi(&EmbeddingConfig::new(2, 2.0).unwrap(), 0.5).unwrap();
        let r = check_symplectic(&psi, opts(2_000, true)).unwrap();
        assert!(r.fd_max_jacobian_error.unwrap() < 1e-5, "{r:?}");
    }

    #[test]
    fn image_volume_is_one() {
        let phi = build_phi(&EmbeddingConfig::new(2, 2.0).unwrap()).unwrap();
        let v = image_volume(&phi, 200_000, 5);
        assert!((v.estimate - 1.0).abs() < 0.02, "{v:?}");
    }

    /// A deliberately non-injective map must produce collisions.
    #[test]
    fn injectivity_detects_folding() {
        #[derive(Debug)]
        struct Fold;
        impl PhaseMap for Fold {
            fn dim(&self) -> usize {
                2
            }
            fn name(&self) -> String {
                "fold".into()
            }
            fn domain(&self) -> Domain {
                Domain::unit_cube(2)
            }
            fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
                // quantize so distinct points share images
                Ok(vec![(x[0] * 10.0).floor(), (x[1] * 10.0).floor()])
            }
            fn jacobian(&self, _: &[f64]) -> Result<DMatrix<f64>> {
                Ok(DMatrix::zeros(2, 2))
            }
        }
        let r = check_injectivity(&Fold, 1000, 1, 1e-7, 1e-3).unwrap();
        assert!(r.collisions > 0 && !r.passed);
    }
}
