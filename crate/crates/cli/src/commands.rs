use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use serde_json::json;
use symwrap::maps::{
    build_phi, build_psi, check_injectivity, check_phi_containment, check_psi_containment,
    check_symplectic, image_volume, PhaseMap, SymplecticOptions, SymplecticReport,
};
use symwrap::sampling::stream;
use symwrap::sections::{
    away_from_puncture, fubini_check, section_area_mc, section_of_phi, SectionStatus, ZGrid,
};
use symwrap::topology::{
    annulus, area_convergence, bounded_hull, check_complement_connected, check_hull_bound,
    complement_components, connectivity_sweep, fixture_by_name, rasterize_section,
    rasterize_section_of, slit_path_witness, Raster,
};
use symwrap::EmbeddingConfig;

use crate::report::{csv_float, Check, Report};
use crate::spec::{Command, Format, RunSpec};
use crate::svg::{raster_svg, ribbon_svg, square_svg};
use crate::CliError;

/// A finished run: the report and the artifact files, not yet written.
#[derive(Debug)]
pub struct Outcome {
    pub report: Report,
    pub files: Vec<(String, Vec<u8>)>,
}

impl Outcome {
    pub fn report_name(&self) -> String {
        format!("{}.json", self.report.spec.command.name())
    }

    /// Writes the artifacts and the report into `dir`.
    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        let io = |path: &Path| {
            let path = path.to_path_buf();
            move |source| CliError::Io { path, source }
        };
        fs::create_dir_all(dir).map_err(io(dir))?;
        for (name, bytes) in &self.files {
            let path = dir.join(name);
            fs::write(&path, bytes).map_err(io(&path))?;
        }
        let path = dir.join(self.report_name());
        fs::write(&path, self.report.to_json()).map_err(io(&path))
    }
}

struct Timer {
    enabled: bool,
    phases: BTreeMap<String, f64>,
}

impl Timer {
    fn phase<T>(&mut self, name: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        if self.enabled {
            *self.phases.entry(name.to_string()).or_default() += start.elapsed().as_secs_f64();
        }
        out
    }
}

struct Run {
    spec: RunSpec,
    config: EmbeddingConfig,
    report: Report,
    files: Vec<(String, Vec<u8>)>,
    timer: Timer,
}

impl Run {
    fn file(&mut self, name: String, bytes: Vec<u8>) {
        self.report.artifacts.push(name.clone());
        self.files.push((name, bytes));
    }

    fn full_z(&self, xy: &[f64]) -> Vec<f64> {
        let mut z = vec![0.5; self.config.z_dim()];
        z[..2].copy_from_slice(&xy[..2]);
        z
    }
}

pub fn run(spec: RunSpec) -> Result<Outcome, CliError> {
    spec.validate()?;
    let config = spec.config()?;
    let mut run = Run {
        report: Report::new(spec.clone()),
        timer: Timer {
            enabled: spec.timings,
            phases: BTreeMap::new(),
        },
        spec,
        config,
        files: Vec::new(),
    };
    match run.spec.command {
        Command::Verify => verify(&mut run)?,
        Command::Sections => sections(&mut run)?,
        Command::Topology => topology(&mut run)?,
        Command::Plot => plot(&mut run)?,
    }
    if run.timer.enabled {
        run.report.timings = Some(run.timer.phases);
    }
    Ok(Outcome {
        report: run.report,
        files: run.files,
    })
}

fn symplectic_checks(report: &mut Report, key: &str, sym: &SymplecticReport, fd_tol: f64) {
    report.push(
        Check::new(format!("{key}_symplectic"), sym.passed, sym.max_deviation, sym.tolerance)
            .with_details(sym),
    );
    let fd = sym.fd_max_deviation.unwrap_or(f64::INFINITY);
    report.push(Check::new(format!("{key}_symplectic_fd"), fd < fd_tol, fd, fd_tol).with_details(json!({
        "fd_max_jacobian_error": sym.fd_max_jacobian_error,
    })));
}

fn verify(run: &mut Run) -> Result<(), CliError> {
    let (spec, config) = (run.spec.clone(), run.config.clone());
    let tol = &spec.tolerances;
    let phi = build_phi(&config)?;
    let psi = build_psi(&config, 1.0 / config.c)?;
    let opts = SymplecticOptions {
        samples: spec.symplectic_samples,
        tolerance: tol.symplectic,
        seed: spec.seed,
        margin: config.singular_margin,
        fd_step: Some(config.fd_step),
    };
    let sym_phi = run.timer.phase("symplectic_phi", || check_symplectic(&phi, opts))?;
    symplectic_checks(&mut run.report, "phi", &sym_phi, tol.symplectic_fd);
    let sym_psi = run.timer.phase("symplectic_psi", || check_symplectic(&psi, opts))?;
    symplectic_checks(&mut run.report, "psi", &sym_psi, tol.symplectic_fd);

    let cont = run
        .timer
        .phase("containment_phi", || check_phi_containment(&phi, spec.samples, spec.seed.wrapping_add(1)))?;
    run.report
        .push(Check::new("phi_containment", cont.passed, cont.inside, cont.samples).with_details(&cont));
    let cont = run
        .timer
        .phase("containment_psi", || check_psi_containment(&psi, spec.samples, spec.seed.wrapping_add(2)))?;
    run.report
        .push(Check::new("psi_containment", cont.passed, cont.inside, cont.samples).with_details(&cont));

    let inj = run.timer.phase("injectivity", || {
        check_injectivity(
            &phi,
            spec.samples,
            spec.seed.wrapping_add(3),
            tol.injectivity_image,
            tol.injectivity_separation,
        )
    })?;
    run.report.push(
        Check::new("phi_injectivity", inj.passed, inj.collisions, 0).with_details(&inj),
    );

    let vol = run.timer.phase("volume", || image_volume(&phi, spec.samples, spec.seed.wrapping_add(4)));
    let ok = (vol.estimate - 1.0).abs() <= tol.mc_sigmas * vol.stderr;
    run.report.push(
        Check::new("phi_image_volume", ok, vol.estimate, 1.0)
            .with_stderr(vol.stderr)
            .with_details(&vol),
    );

    if config.n > 2 {
        let domain = phi.domain();
        let mut rng = stream(spec.seed.wrapping_add(5), 0);
        let mut mismatches = 0usize;
        let count = spec.symplectic_samples;
        for _ in 0..count {
            let x = domain.sample(&mut rng)?;
            let y = phi.eval(&x)?;
            mismatches += usize::from(y[4..] != x[4..]);
        }
        run.report
            .push(Check::new("trailing_identity", mismatches == 0, mismatches, 0).with_details(json!({ "samples": count })));
    }
    Ok(())
}

#[derive(Serialize)]
struct SpotCheck {
    z: Vec<f64>,
    analytic_area: f64,
    mc_area: f64,
    mc_stderr: f64,
    samples: usize,
    seed: u64,
    within: bool,
}

fn sections(run: &mut Run) -> Result<(), CliError> {
    let (spec, config) = (run.spec.clone(), run.config.clone());
    let tol = &spec.tolerances;
    let c = config.c;
    let target = 1.0 / c;
    let grid = ZGrid::new(spec.grid[0], spec.grid[1], c)?;

    let analytic =
        run.timer.phase("analytic", || fubini_check(&config, grid, 0, spec.seed, tol.fubini_analytic))?;
    let generic: Vec<_> = analytic.cell_areas.iter().filter(|a| a.status == SectionStatus::Generic).collect();
    let exact = generic.iter().filter(|a| a.analytic_area == target).count();
    run.report.push(
        Check::new("analytic_area", exact == generic.len(), json!({ "exact": exact, "generic": generic.len() }), target)
            .with_details(json!({ "cells": analytic.cells, "puncture_cells": analytic.cells - generic.len() })),
    );
    run.report.push(Check::new("sharpness_max_area", analytic.max_area >= target, analytic.max_area, target));
    run.report.push(
        Check::new("fubini_analytic", (analytic.integral - 1.0).abs() <= tol.fubini_analytic, analytic.integral, tol.fubini_analytic)
            .with_details(&analytic),
    );

    let mc = run
        .timer
        .phase("fubini_mc", || fubini_check(&config, grid, spec.cell_samples, spec.seed, tol.fubini_mc))?;
    run.report.push(
        Check::new("fubini_mc", mc.passed, mc.integral, tol.fubini_mc).with_details(&mc),
    );

    let spots_z: Vec<Vec<f64>> = {
        let pool: Vec<&Vec<f64>> = generic.iter().map(|a| &a.z).filter(|z| away_from_puncture(z, &config)).collect();
        let k = spec.spot_checks.min(pool.len());
        (0..k).map(|i| pool[i * pool.len() / k].clone()).collect()
    };
    let spots = run.timer.phase("spot_checks", || {
        spots_z
            .iter()
            .enumerate()
            .map(|(i, z)| {
                let s = section_of_phi(z, &config);
                let seed = spec.seed.wrapping_add(1_000_000 + i as u64);
                let est = section_area_mc(&s, spec.samples, seed)?;
                Ok(SpotCheck {
                    z: z.clone(),
                    analytic_area: s.analytic_area,
                    mc_area: est.estimate,
                    mc_stderr: est.stderr,
                    samples: est.samples,
                    seed,
                    within: est.agrees_with(target, tol.mc_sigmas),
                })
            })
            .collect::<symwrap::Result<Vec<_>>>()
    })?;
    let worst = spots
        .iter()
        .map(|s| if s.mc_stderr > 0.0 { (s.mc_area - target).abs() / s.mc_stderr } else if s.mc_area == target { 0.0 } else { f64::INFINITY })
        .fold(0.0, f64::max);
    run.report.push(
        Check::new("mc_spot_checks", !spots.is_empty() && spots.iter().all(|s| s.within), json!({ "max_sigmas": worst }), tol.mc_sigmas)
            .with_details(&spots),
    );

    if spec.wants(Format::Csv) {
        let zd = config.z_dim();
        let mut csv = String::from("kind");
        for k in 1..=zd {
            csv.push_str(&format!(",z{k}"));
        }
        csv.push_str(",status,analytic_area,mc_area,mc_stderr,mc_samples\n");
        let status = |s: SectionStatus| match s {
            SectionStatus::Empty => "empty",
            SectionStatus::Puncture => "puncture",
            SectionStatus::Generic => "generic",
        };
        for cell in &mc.cell_areas {
            let m = cell.mc.expect("per-cell estimates requested");
            csv.push_str("grid");
            for v in &cell.z {
                csv.push(',');
                csv.push_str(&csv_float(*v));
            }
            csv.push_str(&format!(
                ",{},{},{},{},{}\n",
                status(cell.status),
                csv_float(cell.analytic_area),
                csv_float(m.estimate),
                csv_float(m.stderr),
                m.samples
            ));
        }
        for s in &spots {
            csv.push_str("spot");
            for v in &s.z {
                csv.push(',');
                csv.push_str(&csv_float(*v));
            }
            csv.push_str(&format!(
                ",generic,{},{},{},{}\n",
                csv_float(s.analytic_area),
                csv_float(s.mc_area),
                csv_float(s.mc_stderr),
                s.samples
            ));
        }
        run.file("sections.csv".into(), csv.into_bytes());
    }
    Ok(())
}

fn raster_files(run: &mut Run, stem: &str, raster: &Raster) {
    if run.spec.wants(Format::Pgm) {
        run.file(format!("{stem}.pgm"), raster.to_pgm());
        run.file(format!("{stem}.rle.json"), raster.to_rle_json().into_bytes());
    }
}

fn topology(run: &mut Run) -> Result<(), CliError> {
    if let Some(name) = run.spec.fixture.clone() {
        return fixture(run, &name);
    }
    if run.spec.hull {
        return hull(run);
    }
    let (spec, config) = (run.spec.clone(), run.config.clone());
    let grid = ZGrid::new(spec.grid[0], spec.grid[1], config.c)?;
    let zs: Vec<Vec<f64>> = grid
        .points(config.z_dim())
        .into_iter()
        .filter(|z| away_from_puncture(z, &config))
        .collect();
    let ns = spec.resolutions.clone();
    let sweep = run.timer.phase("connectivity", || connectivity_sweep(&config, &zs, &ns))?;
    for &n in &ns {
        let at: Vec<_> = sweep.iter().filter(|r| r.n == n).collect();
        let connected = at.iter().filter(|r| r.connected).count();
        let max_components = at.iter().map(|r| r.components).max().unwrap_or(0);
        run.report.push(
            Check::new(
                format!("complement_connected_N{n}"),
                connected == at.len(),
                json!({ "connected": connected, "max_components": max_components }),
                at.len(),
            )
            .with_details(json!({
                "advisory": n < symwrap::topology::MIN_CONNECTIVITY_N,
                "without_slit_max_components": at.iter().map(|r| r.raw_components).max(),
            })),
        );
    }
    let mut z0 = vec![0.5; config.z_dim()];
    z0[..2].copy_from_slice(&config.z0);
    let n0 = ns.iter().copied().min().unwrap_or(256);
    let punct = check_complement_connected(&z0, &config, n0)?;
    run.report
        .push(Check::new("puncture_complement", punct.connected, punct.components, 1).with_details(&punct));

    let witnesses = run.timer.phase("slit_witness", || {
        zs.iter()
            .map(|z| slit_path_witness(z, &config, spec.witness_steps))
            .collect::<symwrap::Result<Vec<_>>>()
    })?;
    let members: usize = witnesses.iter().map(|w| w.members).sum();
    let failed = witnesses.iter().filter(|w| !w.passed).count();
    let worst_start = witnesses.iter().map(|w| w.start_boundary_distance).fold(0.0, f64::max);
    let worst_end = witnesses.iter().map(|w| w.end_puncture_distance).fold(0.0, f64::max);
    run.report.push(
        Check::new("slit_witness", failed == 0, json!({ "members": members, "failed_paths": failed }), 0).with_details(json!({
            "paths": witnesses.len(),
            "steps": spec.witness_steps,
            "max_start_boundary_distance": worst_start,
            "max_end_puncture_distance": worst_end,
        })),
    );

    let controls: Vec<usize> = ns.iter().map(|&n| complement_components(&annulus(n)).count()).collect();
    run.report.push(Check::new(
        "negative_control_annulus",
        controls.iter().all(|&k| k == 2),
        &controls,
        2,
    ));

    let sample: Vec<Vec<f64>> = zs.iter().take(10).cloned().collect();
    let mut sorted = ns.clone();
    sorted.sort_unstable();
    sorted.dedup();
    let conv = run.timer.phase("area_convergence", || area_convergence(&config, &sample, &sorted))?;
    run.report.diagnostics = json!({ "area_convergence": conv });

    if spec.wants(Format::Csv) {
        let mut csv = String::from("z1,z2,N,components,components_without_slit,connected,occupied_area,perimeter\n");
        for r in &sweep {
            csv.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                csv_float(r.z[0]),
                csv_float(r.z[1]),
                r.n,
                r.components,
                r.raw_components,
                r.connected,
                csv_float(r.occupied_area),
                csv_float(r.perimeter)
            ));
        }
        run.file("topology.csv".into(), csv.into_bytes());
    }
    if spec.wants(Format::Pgm) {
        let z = match &spec.z {
            Some(xy) => run.full_z(xy),
            None => zs.first().cloned().unwrap_or(z0),
        };
        for &n in &ns {
            let r = rasterize_section(&z, &config, n)?;
            raster_files(run, &format!("section-N{n}"), &r);
        }
    }
    Ok(())
}

fn fixture(run: &mut Run, name: &str) -> Result<(), CliError> {
    let expected = match name {
        "annulus" => 2,
        _ => 1,
    };
    for n in run.spec.resolutions.clone() {
        let r = fixture_by_name(name, n)?;
        let labels = complement_components(&r);
        let hull = bounded_hull(&r)?;
        run.report.push(
            Check::new(format!("fixture_{name}_N{n}"), labels.count() == expected, labels.count(), expected).with_details(json!({
                "complement_connected": labels.count() == 1,
                "area": r.area(),
                "hull_area": hull.area(),
                "hull_equals_set": hull == r,
            })),
        );
        raster_files(run, &format!("fixture-{name}-N{n}"), &r);
    }
    Ok(())
}

fn hull(run: &mut Run) -> Result<(), CliError> {
    let (spec, config) = (run.spec.clone(), run.config.clone());
    let a = spec.a.expect("validated");
    let grid = ZGrid::new(spec.grid[0], spec.grid[1], config.c)?;
    let mut csv = String::from("z1,z2,N,status,v_area,v_is_own_hull,psi_area,hull_area,hull_idempotent,perimeter,tolerance\n");
    for &n in &spec.resolutions {
        let rep = run.timer.phase("hull", || check_hull_bound(a, &config, grid, n))?;
        let generic: Vec<_> = rep.cells.iter().filter(|c| c.status == SectionStatus::Generic).collect();
        let over = rep.cells.iter().filter(|c| c.hull_area > a + c.tolerance).count();
        run.report.push(
            Check::new(format!("hull_bound_N{n}"), over == 0, json!({ "max_hull_area": rep.max_hull_area, "max_excess": rep.max_excess }), json!({ "bound": a, "tolerance": "4 * perimeter * cell" }))
                .with_details(json!({ "cells": rep.cells.len(), "over_bound": over })),
        );
        let own = generic.iter().filter(|c| c.v_is_own_hull).count();
        run.report.push(Check::new(format!("kappa_section_is_own_hull_N{n}"), own == generic.len(), own, generic.len()));
        let idem = rep.cells.iter().filter(|c| c.hull_idempotent).count();
        run.report.push(Check::new(format!("hull_idempotent_N{n}"), idem == rep.cells.len(), idem, rep.cells.len()));
        let within = generic.iter().filter(|c| c.hull_within_v).count();
        let psi_own = generic.iter().filter(|c| c.psi_is_own_hull).count();
        run.report.diagnostics = json!({ "hull_within_kappa_section": within, "psi_section_is_own_hull": psi_own, "generic_cells": generic.len() });
        for c in &rep.cells {
            csv.push_str(&format!(
                "{},{},{n},{:?},{},{},{},{},{},{},{}\n",
                csv_float(c.z[0]),
                csv_float(c.z[1]),
                c.status,
                csv_float(c.v_area),
                c.v_is_own_hull,
                csv_float(c.psi_area),
                csv_float(c.hull_area),
                c.hull_idempotent,
                csv_float(c.perimeter),
                csv_float(c.tolerance)
            ));
        }
    }
    if spec.wants(Format::Csv) {
        run.file("hull.csv".into(), csv.into_bytes());
    }
    Ok(())
}

fn plot(run: &mut Run) -> Result<(), CliError> {
    let xy = run.spec.z.clone().unwrap_or_else(|| vec![0.3, 0.7]);
    let z = run.full_z(&xy);
    let section = section_of_phi(&z, &run.config);
    let n = run.spec.resolutions[0];
    let raster = rasterize_section_of(&section, n)?;
    run.file("ribbon.svg".into(), ribbon_svg(&section).into_bytes());
    run.file("square.svg".into(), square_svg(&section).into_bytes());
    run.file("raster.svg".into(), raster_svg(&section, &raster).into_bytes());
    raster_files(run, "raster", &raster);
    run.report.diagnostics = json!({
        "section": section,
        "slit_angle": section.slit_angle(),
        "raster_area": raster.area(),
    });
    Ok(())
}
