use serde::Serialize;

use super::raster::Raster;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Connectivity {
    Four,
    Eight,
}

/// Connected components of the cells with a given occupancy value.
#[derive(Debug, Clone)]
pub struct RegionLabels {
    width: usize,
    height: usize,
    labels: Vec<u32>,
    sizes: Vec<usize>,
    touches_border: Vec<bool>,
}

impl RegionLabels {
    pub const UNLABELED: u32 = u32::MAX;

    pub fn count(&self) -> usize {
        self.sizes.len()
    }

    pub fn label(&self, i: usize, j: usize) -> u32 {
        self.labels[j * self.width + i]
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn touches_border(&self) -> &[bool] {
        &self.touches_border
    }

    pub fn border_components(&self) -> usize {
        self.touches_border.iter().filter(|&&b| b).count()
    }

    pub fn height(&self) -> usize {
        self.height
    }
}

/// Flood-fill labeling of the cells whose occupancy equals `value`.
pub fn label_components(raster: &Raster, value: bool, connectivity: Connectivity) -> RegionLabels {
    let (w, h) = (raster.width(), raster.height());
    let cells = raster.cells();
    let mut labels = vec![RegionLabels::UNLABELED; w * h];
    let mut sizes = Vec::new();
    let mut touches = Vec::new();
    let mut stack = Vec::new();
    const FOUR: [(i64, i64); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];
    const EIGHT: [(i64, i64); 8] = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)];
    let neighbors: &[(i64, i64)] = match connectivity {
        Connectivity::Four => &FOUR,
        Connectivity::Eight => &EIGHT,
    };
    for start in 0..w * h {
        if cells[start] != value || labels[start] != RegionLabels::UNLABELED {
            continue;
        }
        let id = sizes.len() as u32;
        labels[start] = id;
        stack.push(start);
        let (mut size, mut border) = (0usize, false);
        while let Some(k) = stack.pop() {
            size += 1;
            let (i, j) = ((k % w) as i64, (k / w) as i64);
            if i == 0 || j == 0 || i == w as i64 - 1 || j == h as i64 - 1 {
                border = true;
            }
            for &(di, dj) in neighbors {
                let (a, b) = (i + di, j + dj);
                if a < 0 || b < 0 || a >= w as i64 || b >= h as i64 {
                    continue;
                }
                let m = b as usize * w + a as usize;
                if cells[m] == value && labels[m] == RegionLabels::UNLABELED {
                    labels[m] = id;
                    stack.push(m);
                }
            }
        }
        sizes.push(size);
        touches.push(border);
    }
    RegionLabels {
        width: w,
        height: h,
        labels,
        sizes,
        touches_border: touches,
    }
}

/// 4-connected components of the free cells.
pub fn complement_components(raster: &Raster) -> RegionLabels {
    label_components(raster, false, Connectivity::Four)
}

/// Occupancy together with every free component that avoids the outer ring.
pub fn bounded_hull(raster: &Raster) -> Result<Raster> {
    if raster.touches_margin() {
        return Err(Error::AmbiguousHull);
    }
    let labels = complement_components(raster);
    let mut hull = raster.clone();
    for j in 0..raster.height() {
        for i in 0..raster.width() {
            let l = labels.label(i, j);
            if l != RegionLabels::UNLABELED && !labels.touches_border()[l as usize] {
                hull.set(i, j, true);
            }
        }
    }
    Ok(hull)
}
