//! Terrain grid and a deliberately simple deterministic fire model.
//!
//! The domain is a rectangle of square cells, each carrying fuel mass and
//! temperature. Burning cells (at or above ignition temperature, with fuel
//! left) consume fuel and push heat into their four neighbors; everything
//! else relaxes toward ambient. All updates are synchronous: a step reads
//! only the pre-step state, so cell iteration order cannot matter. There is
//! no wind, no spotting, and no randomness; the model exists to give the
//! swarm something consistent to fight, not to predict real fires.

use crate::vec2::Vec2;
use serde::{Deserialize, Serialize};

/// Fire model constants. Temperatures in kelvin, rates per second.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FireParams {
    pub ambient_temperature: f64,
    /// A cell at or above this temperature with fuel left is burning.
    pub ignition_temperature: f64,
    /// Temperature assigned to freshly ignited cells.
    pub flame_temperature: f64,
    /// Fuel mass burned per second in a burning cell.
    pub burn_rate: f64,
    /// Fraction of the temperature difference a burning cell pushes into
    /// each cooler neighbor per second.
    pub diffusion_rate: f64,
    /// Relaxation rate toward ambient for non-burning cells.
    pub cooling_rate: f64,
    /// Kelvin removed from a cell by one full water payload.
    pub quench_per_unit: f64,
}

/// Rectangular cell grid covering `[0, width] x [0, height]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TerrainGrid {
    width: f64,
    height: f64,
    cell_size: f64,
    ncols: usize,
    nrows: usize,
    fuel: Vec<f64>,
    temperature: Vec<f64>,
    ever_hot: Vec<bool>,
    peak_temperature: f64,
    scratch_temp: Vec<f64>,
    scratch_burn: Vec<bool>,
}

impl TerrainGrid {
    /// Uniform grid at ambient temperature with homogeneous fuel.
    pub fn new(width: f64, height: f64, cell_size: f64, ambient: f64, initial_fuel: f64) -> Self {
        assert!(width > 0.0 && height > 0.0 && cell_size > 0.0);
        let ncols = (width / cell_size).ceil() as usize;
        let nrows = (height / cell_size).ceil() as usize;
        let n = ncols * nrows;
        TerrainGrid {
            width,
            height,
            cell_size,
            ncols,
            nrows,
            fuel: vec![initial_fuel; n],
            temperature: vec![ambient; n],
            ever_hot: vec![false; n],
            peak_temperature: ambient,
            scratch_temp: vec![0.0; n],
            scratch_burn: vec![false; n],
        }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    /// Row-major index of the cell containing `p`, or None outside the
    /// domain. Points exactly on the far edges belong to the last cell.
    pub fn cell_index(&self, p: Vec2) -> Option<usize> {
        if !(0.0..=self.width).contains(&p.x) || !(0.0..=self.height).contains(&p.y) {
            return None;
        }
        let ix = ((p.x / self.cell_size) as usize).min(self.ncols - 1);
        let iy = ((p.y / self.cell_size) as usize).min(self.nrows - 1);
        Some(iy * self.ncols + ix)
    }

    pub fn cell_center(&self, idx: usize) -> Vec2 {
        let ix = idx % self.ncols;
        let iy = idx / self.ncols;
        Vec2::new(
            (ix as f64 + 0.5) * self.cell_size,
            (iy as f64 + 0.5) * self.cell_size,
        )
    }

    pub fn temperature_at(&self, idx: usize) -> f64 {
        self.temperature[idx]
    }

    pub fn fuel_at(&self, idx: usize) -> f64 {
        self.fuel[idx]
    }

    fn is_burning(&self, idx: usize, params: &FireParams) -> bool {
        self.temperature[idx] >= params.ignition_temperature && self.fuel[idx] > 0.0
    }

    fn note_heat(&mut self, params: &FireParams) {
        for idx in 0..self.temperature.len() {
            let t = self.temperature[idx];
            if t >= params.ignition_temperature {
                self.ever_hot[idx] = true;
            }
            if t > self.peak_temperature {
                self.peak_temperature = t;
            }
        }
    }

    pub fn total_fuel(&self) -> f64 {
        self.fuel.iter().sum()
    }

    pub fn hot_cell_count(&self, params: &FireParams) -> usize {
        self.temperature
            .iter()
            .filter(|&&t| t >= params.ignition_temperature)
            .count()
    }

    pub fn cells_ever_ignited(&self) -> usize {
        self.ever_hot.iter().filter(|&&b| b).count()
    }

    pub fn peak_temperature(&self) -> f64 {
        self.peak_temperature
    }

}

/// Sets every fuel-bearing cell containing one of `points` to flame
/// temperature. Points outside the domain are ignored.
pub fn ignite(grid: &mut TerrainGrid, points: &[Vec2], params: &FireParams) {
    for &p in points {
        if let Some(idx) = grid.cell_index(p) {
            if grid.fuel[idx] > 0.0 {
                grid.temperature[idx] = params.flame_temperature;
            }
        }
    }
    grid.note_heat(params);
}

/// Advances the fire by `dt` seconds, synchronously from the pre-step state.
pub fn step_fire(grid: &mut TerrainGrid, params: &FireParams, dt: f64) {
    let ncols = grid.ncols;
    let nrows = grid.nrows;
    let mut burning = std::mem::take(&mut grid.scratch_burn);
    for idx in 0..burning.len() {
        burning[idx] = grid.is_burning(idx, params);
    }
    let mut next_t = std::mem::take(&mut grid.scratch_temp);
    for iy in 0..nrows {
        for ix in 0..ncols {
            let idx = iy * ncols + ix;
            let t0 = grid.temperature[idx];
            let mut heat_in = 0.0;
            let mut add = |n_idx: usize| {
                if burning[n_idx] {
                    heat_in += (grid.temperature[n_idx] - t0).max(0.0);
                }
            };
            if ix > 0 {
                add(idx - 1);
            }
            if ix + 1 < ncols {
                add(idx + 1);
            }
            if iy > 0 {
                add(idx - ncols);
            }
            if iy + 1 < nrows {
                add(idx + ncols);
            }
            let mut t1 = t0 + dt * params.diffusion_rate * heat_in;
            if !burning[idx] {
                t1 -= dt * params.cooling_rate * (t0 - params.ambient_temperature);
            }
            next_t[idx] = t1.max(params.ambient_temperature);
        }
    }
    for idx in 0..grid.fuel.len() {
        if burning[idx] {
            grid.fuel[idx] = (grid.fuel[idx] - params.burn_rate * dt).max(0.0);
        }
    }
    std::mem::swap(&mut grid.temperature, &mut next_t);
    grid.scratch_temp = next_t;
    grid.scratch_burn = burning;
    grid.note_heat(params);
}

/// Removes `quench_per_unit * amount` kelvin from the cell containing
/// `position`, floored at ambient. `amount` is a payload fraction. Returns
/// false when the position lies outside the domain.
pub fn pour_water(grid: &mut TerrainGrid, params: &FireParams, position: Vec2, amount: f64) -> bool {
    debug_assert!(amount >= 0.0);
    match grid.cell_index(position) {
        Some(idx) => {
            let t = grid.temperature[idx] - params.quench_per_unit * amount;
            grid.temperature[idx] = t.max(params.ambient_temperature);
            true
        }
        None => false,
    }
}

/// Temperature of the cell containing `position`, or None outside.
pub fn hotspot_measurement(grid: &TerrainGrid, position: Vec2) -> Option<f64> {
    grid.cell_index(position).map(|idx| grid.temperature[idx])
}

/// True when no cell is at or above ignition temperature.
pub fn all_fires_out(grid: &TerrainGrid, params: &FireParams) -> bool {
    grid.temperature
        .iter()
        .all(|&t| t < params.ignition_temperature)
}
