use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::maps::plane::Point2;

/// Boolean occupancy on a regular grid of square cells, row-major with row 0
/// at the bottom.
#[derive(Debug, Clone, PartialEq)]
pub struct Raster {
    resolution: usize,
    nx: usize,
    ny: usize,
    origin: Point2,
    cell: f64,
    cells: Vec<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunLengthRaster {
    pub width: usize,
    pub height: usize,
    pub origin: Point2,
    pub cell: f64,
    /// Alternating run lengths in row-major order, starting with a free run.
    pub runs: Vec<usize>,
}

impl Raster {
    pub fn empty(resolution: usize, origin: Point2, side: f64) -> Result<Self> {
        if resolution == 0 || side.is_nan() || side <= 0.0 {
            return Err(Error::InvalidArgument("raster needs N > 0 and a positive side".into()));
        }
        Ok(Raster {
            resolution,
            nx: resolution,
            ny: resolution,
            origin,
            cell: side / resolution as f64,
            cells: vec![false; resolution * resolution],
        })
    }

    /// `N × N` cells over `origin + [0, side]²`, occupied where `pred` holds at
    /// the cell center. Rows are evaluated in parallel.
    pub fn from_predicate<F>(resolution: usize, origin: Point2, side: f64, pred: F) -> Result<Self>
    where
        F: Fn(Point2) -> bool + Sync,
    {
        let mut r = Raster::empty(resolution, origin, side)?;
        let (nx, cell) = (r.nx, r.cell);
        r.cells
            .par_chunks_mut(nx)
            .enumerate()
            .for_each(|(j, row)| {
                let y = origin[1] + (j as f64 + 0.5) * cell;
                for (i, v) in row.iter_mut().enumerate() {
                    *v = pred([origin[0] + (i as f64 + 0.5) * cell, y]);
                }
            });
        Ok(r)
    }

    /// Serial variant of [`Raster::from_predicate`] for callers that already
    /// parallelize over rasters.
    pub fn from_predicate_serial<F>(resolution: usize, origin: Point2, side: f64, pred: F) -> Result<Self>
    where
        F: Fn(Point2) -> bool,
    {
        let mut r = Raster::empty(resolution, origin, side)?;
        for j in 0..r.ny {
            let y = origin[1] + (j as f64 + 0.5) * r.cell;
            for i in 0..r.nx {
                r.cells[j * r.nx + i] = pred([origin[0] + (i as f64 + 0.5) * r.cell, y]);
            }
        }
        Ok(r)
    }

    /// The same raster surrounded by `k` rings of free cells.
    pub fn padded(&self, k: usize) -> Raster {
        let (nx, ny) = (self.nx + 2 * k, self.ny + 2 * k);
        let mut cells = vec![false; nx * ny];
        for j in 0..self.ny {
            let dst = (j + k) * nx + k;
            cells[dst..dst + self.nx].copy_from_slice(&self.cells[j * self.nx..(j + 1) * self.nx]);
        }
        Raster {
            resolution: self.resolution,
            nx,
            ny,
            origin: [
                self.origin[0] - k as f64 * self.cell,
                self.origin[1] - k as f64 * self.cell,
            ],
            cell: self.cell,
            cells,
        }
    }

    /// The nominal `N` the raster was created with (before padding).
    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn width(&self) -> usize {
        self.nx
    }

    pub fn height(&self) -> usize {
        self.ny
    }

    pub fn origin(&self) -> Point2 {
        self.origin
    }

    pub fn cell_size(&self) -> f64 {
        self.cell
    }

    pub fn cells(&self) -> &[bool] {
        &self.cells
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.cells[j * self.nx + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        self.cells[j * self.nx + i] = v;
    }

    pub fn center(&self, i: usize, j: usize) -> Point2 {
        [
            self.origin[0] + (i as f64 + 0.5) * self.cell,
            self.origin[1] + (j as f64 + 0.5) * self.cell,
        ]
    }

    pub fn occupied_count(&self) -> usize {
        self.cells.iter().filter(|&&v| v).count()
    }

    pub fn area(&self) -> f64 {
        self.occupied_count() as f64 * self.cell * self.cell
    }

    /// Length of the boundary between occupied and free cells, counting
    /// cell edges (cells outside the grid are free).
    pub fn perimeter(&self) -> f64 {
        let mut edges = 0usize;
        for j in 0..self.ny {
            for i in 0..self.nx {
                if !self.get(i, j) {
                    continue;
                }
                edges += usize::from(i == 0 || !self.get(i - 1, j));
                edges += usize::from(i + 1 == self.nx || !self.get(i + 1, j));
                edges += usize::from(j == 0 || !self.get(i, j - 1));
                edges += usize::from(j + 1 == self.ny || !self.get(i, j + 1));
            }
        }
        edges as f64 * self.cell
    }

    /// Whether any cell in the outermost ring is occupied.
    pub fn touches_margin(&self) -> bool {
        let (nx, ny) = (self.nx, self.ny);
        (0..nx).any(|i| self.get(i, 0) || self.get(i, ny - 1))
            || (0..ny).any(|j| self.get(0, j) || self.get(nx - 1, j))
    }

    pub fn same_grid(&self, other: &Raster) -> bool {
        self.nx == other.nx && self.ny == other.ny && self.cell == other.cell && self.origin == other.origin
    }

    pub fn is_subset_of(&self, other: &Raster) -> Result<bool> {
        if !self.same_grid(other) {
            return Err(Error::InvalidArgument("rasters live on different grids".into()));
        }
        Ok(self.cells.iter().zip(&other.cells).all(|(&a, &b)| !a || b))
    }

    pub fn union(&self, other: &Raster) -> Result<Raster> {
        if !self.same_grid(other) {
            return Err(Error::InvalidArgument("rasters live on different grids".into()));
        }
        let mut out = self.clone();
        out.cells.iter_mut().zip(&other.cells).for_each(|(a, &b)| *a |= b);
        Ok(out)
    }

    /// Visits every cell the segment `a → b` passes through, in order, each
    /// sharing an edge with the previous one. Cells off the grid are skipped.
    pub fn segment_cells(&self, a: Point2, b: Point2) -> Vec<(usize, usize)> {
        let to_grid = |p: Point2| [(p[0] - self.origin[0]) / self.cell, (p[1] - self.origin[1]) / self.cell];
        let (ga, gb) = (to_grid(a), to_grid(b));
        let d = [gb[0] - ga[0], gb[1] - ga[1]];
        let mut cell = [ga[0].floor() as i64, ga[1].floor() as i64];
        let last = [gb[0].floor() as i64, gb[1].floor() as i64];
        let step = [d[0].signum() as i64, d[1].signum() as i64];
        let axis_setup = |k: usize| {
            if d[k] == 0.0 {
                (f64::INFINITY, f64::INFINITY)
            } else {
                let next = if d[k] > 0.0 { cell[k] as f64 + 1.0 } else { cell[k] as f64 };
                ((next - ga[k]) / d[k], 1.0 / d[k].abs())
            }
        };
        let (mut t_max_x, dt_x) = axis_setup(0);
        let (mut t_max_y, dt_y) = axis_setup(1);
        let mut out = Vec::new();
        let limit = (last[0] - cell[0]).unsigned_abs() + (last[1] - cell[1]).unsigned_abs() + 1;
        for _ in 0..=limit {
            if cell[0] >= 0 && cell[1] >= 0 && (cell[0] as usize) < self.nx && (cell[1] as usize) < self.ny {
                out.push((cell[0] as usize, cell[1] as usize));
            }
            if cell == last {
                break;
            }
            if t_max_x < t_max_y {
                cell[0] += step[0];
                t_max_x += dt_x;
            } else {
                cell[1] += step[1];
                t_max_y += dt_y;
            }
        }
        out
    }

    /// Frees every cell crossed by the polyline.
    pub fn carve_polyline(&mut self, points: &[Point2]) {
        for w in points.windows(2) {
            for (i, j) in self.segment_cells(w[0], w[1]) {
                self.set(i, j, false);
            }
        }
    }

    /// Binary PGM (`P5`), occupied cells black, top row first.
    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.nx, self.ny).into_bytes();
        for j in (0..self.ny).rev() {
            out.extend((0..self.nx).map(|i| if self.get(i, j) { 0u8 } else { 255u8 }));
        }
        out
    }

    pub fn to_run_length(&self) -> RunLengthRaster {
        let mut runs = Vec::new();
        let mut current = false;
        let mut len = 0usize;
        for &v in &self.cells {
            if v != current {
                runs.push(len);
                current = v;
                len = 0;
            }
            len += 1;
        }
        runs.push(len);
        RunLengthRaster {
            width: self.nx,
            height: self.ny,
            origin: self.origin,
            cell: self.cell,
            runs,
        }
    }

    pub fn to_rle_json(&self) -> String {
        serde_json::to_string(&self.to_run_length()).expect("plain data serializes")
    }
}
