//! Intensity and traversability rasters plus their shared CSV format.
//!
//! File layout: a header line `# width height cell_size`, then one
//! comma-separated line per grid row (row 0 is `y = 0`).

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Aabb, Vec3};
use crate::scalar::{normal, uniform, Real};

/// Row-major raster with square cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Raster<T> {
    pub width: usize,
    pub height: usize,
    /// Meters per cell side.
    pub cell_size: T,
    pub values: Vec<T>,
}

impl<T: Real> Raster<T> {
    pub fn new(width: usize, height: usize, cell_size: T, values: Vec<T>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Grid("width and height must be at least 1".into()));
        }
        if values.len() != width * height {
            return Err(Error::Grid(format!(
                "expected {} values, got {}",
                width * height,
                values.len()
            )));
        }
        if !(cell_size > T::zero()) {
            return Err(Error::Grid("cell size must be positive".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Grid("non-finite cell value".into()));
        }
        Ok(Self { width, height, cell_size, values })
    }

    pub fn filled(width: usize, height: usize, cell_size: T, value: T) -> Result<Self> {
        Self::new(width, height, cell_size, vec![value; width * height])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, col: usize, row: usize) -> T {
        self.values[row * self.width + col]
    }

    /// Horizontal extent in meters as `(x, y)`.
    pub fn extent(&self) -> (T, T) {
        (
            self.cell_size * T::of_usize(self.width),
            self.cell_size * T::of_usize(self.height),
        )
    }

    /// Cell containing the planar point, or `None` outside the raster.
    pub fn cell_at(&self, x: T, y: T) -> Option<(usize, usize)> {
        if !(x >= T::zero() && y >= T::zero()) {
            return None;
        }
        let col = (x / self.cell_size).floor().to_usize()?;
        let row = (y / self.cell_size).floor().to_usize()?;
        (col < self.width && row < self.height).then_some((col, row))
    }

    pub fn value_at(&self, x: T, y: T) -> Option<T> {
        self.cell_at(x, y).map(|(c, r)| self.get(c, r))
    }

    /// Center of a cell in meters.
    pub fn cell_center(&self, col: usize, row: usize) -> (T, T) {
        let h = T::half();
        (
            (T::of_usize(col) + h) * self.cell_size,
            (T::of_usize(row) + h) * self.cell_size,
        )
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# {} {} {}", self.width, self.height, self.cell_size)?;
        let mut line = String::new();
        for row in 0..self.height {
            line.clear();
            for col in 0..self.width {
                if col > 0 {
                    line.push(',');
                }
                let _ = write!(line, "{}", self.get(col, row));
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty grid file".into()))??;
        let fields: Vec<&str> = header
            .trim()
            .strip_prefix('#')
            .ok_or_else(|| Error::Parse("missing `# width height cell_size` header".into()))?
            .split_whitespace()
            .collect();
        if fields.len() != 3 {
            return Err(Error::Parse(format!("bad grid header `{header}`")));
        }
        let width: usize = fields[0]
            .parse()
            .map_err(|_| Error::Parse(format!("bad width `{}`", fields[0])))?;
        let height: usize = fields[1]
            .parse()
            .map_err(|_| Error::Parse(format!("bad height `{}`", fields[1])))?;
        let cell_size = parse_scalar::<T>(fields[2])?;
        let mut values = Vec::with_capacity(width * height);
        for (i, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let before = values.len();
            for tok in line.split(',') {
                values.push(parse_scalar::<T>(tok.trim())?);
            }
            if values.len() - before != width {
                return Err(Error::Parse(format!(
                    "row {i} has {} values, expected {width}",
                    values.len() - before
                )));
            }
        }
        Self::new(width, height, cell_size, values)
    }
}

fn parse_scalar<T: Real>(tok: &str) -> Result<T> {
    let v: f64 = tok
        .parse()
        .map_err(|_| Error::Parse(format!("bad number `{tok}`")))?;
    Ok(T::of(v))
}

/// Raw map intensities (e.g. a grey-level image); higher means deeper / bluer water.
pub type IntensityGrid<T> = Raster<T>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellClass {
    Coast,
    Uncertain,
    Water,
}

/// Clustered map: coast cells hold 0, water cells hold 1, uncertain cells hold a
/// value from the configured band strictly between them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraversabilityGrid<T> {
    pub raster: Raster<T>,
    pub classes: Vec<CellClass>,
}

impl<T: Real> TraversabilityGrid<T> {
    /// Builds a grid from traversability values, deriving labels from them.
    pub fn from_values(raster: Raster<T>) -> Result<Self> {
        let classes = raster
            .values
            .iter()
            .map(|&v| {
                if v == T::zero() {
                    Ok(CellClass::Coast)
                } else if v == T::one() {
                    Ok(CellClass::Water)
                } else if v > T::zero() && v < T::one() {
                    Ok(CellClass::Uncertain)
                } else {
                    Err(Error::Grid(format!("traversability {v} outside [0, 1]")))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { raster, classes })
    }

    /// Grid where every cell is navigable water.
    pub fn open_water(width: usize, height: usize, cell_size: T) -> Result<Self> {
        Self::from_values(Raster::filled(width, height, cell_size, T::one())?)
    }

    pub fn width(&self) -> usize {
        self.raster.width
    }

    pub fn height(&self) -> usize {
        self.raster.height
    }

    pub fn cell_size(&self) -> T {
        self.raster.cell_size
    }

    pub fn extent(&self) -> (T, T) {
        self.raster.extent()
    }

    pub fn value_at(&self, x: T, y: T) -> Option<T> {
        self.raster.value_at(x, y)
    }

    pub fn class_at(&self, x: T, y: T) -> Option<CellClass> {
        self.raster
            .cell_at(x, y)
            .map(|(c, r)| self.classes[r * self.raster.width + c])
    }

    pub fn is_water(&self, x: T, y: T) -> bool {
        self.class_at(x, y) == Some(CellClass::Water)
    }

    /// Coast, or off the map.
    pub fn is_forbidden(&self, x: T, y: T) -> bool {
        !matches!(
            self.class_at(x, y),
            Some(CellClass::Water) | Some(CellClass::Uncertain)
        )
    }

    pub fn count(&self, class: CellClass) -> usize {
        self.classes.iter().filter(|&&c| c == class).count()
    }

    /// Cells of the largest 4-connected navigable region, row-major.
    /// Water pockets cut off by coast are excluded.
    pub fn main_water_body(&self) -> Vec<bool> {
        let (w, h) = (self.width(), self.height());
        let open = |k: usize| self.classes[k] != CellClass::Coast;
        let mut label = vec![usize::MAX; w * h];
        let (mut best, mut best_size) = (usize::MAX, 0);
        let mut stack = Vec::new();
        for seed in 0..w * h {
            if !open(seed) || label[seed] != usize::MAX {
                continue;
            }
            label[seed] = seed;
            stack.push(seed);
            let mut size = 0;
            while let Some(k) = stack.pop() {
                size += 1;
                let (c, r) = (k % w, k / w);
                let mut visit = |n: usize| {
                    if open(n) && label[n] == usize::MAX {
                        label[n] = seed;
                        stack.push(n);
                    }
                };
                if c > 0 {
                    visit(k - 1);
                }
                if c + 1 < w {
                    visit(k + 1);
                }
                if r > 0 {
                    visit(k - w);
                }
                if r + 1 < h {
                    visit(k + w);
                }
            }
            if size > best_size {
                (best, best_size) = (seed, size);
            }
        }
        label.iter().map(|&l| l == best).collect()
    }

    /// True when the straight segment never crosses a forbidden cell
    /// (sampled at half-cell spacing).
    pub fn segment_clear(&self, a: Vec3<T>, b: Vec3<T>) -> bool {
        let len = (b - a).horizontal_norm();
        let step = self.cell_size() * T::half();
        let n = (len / step).ceil().to_usize().unwrap_or(0).max(1);
        (0..=n).all(|i| {
            let p = a.lerp(b, T::of_usize(i) / T::of_usize(n));
            !self.is_forbidden(p.x, p.y)
        })
    }

    /// Operating volume over the grid with the given depth.
    pub fn volume(&self, depth: T) -> Aabb<T> {
        let (ex, ey) = self.extent();
        Aabb {
            min: Vec3::zero(),
            max: Vec3::new(ex, ey, depth),
        }
    }
}

/// Circular island used by the synthetic map generator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Island<T> {
    pub x: T,
    pub y: T,
    /// Radius in meters at which the shoreline sits.
    pub radius: T,
}

/// Synthetic stand-in for a geographic image: islands rendered as smooth
/// bumps in a noisy water intensity field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticMap<T> {
    pub width: usize,
    pub height: usize,
    pub cell_size: T,
    pub islands: Vec<Island<T>>,
    /// Standard deviation of per-cell intensity noise.
    pub noise: T,
}

impl<T: Real> SyntheticMap<T> {
    /// Random islands with radii drawn in `radius_range` (meters).
    pub fn random<R: Rng + ?Sized>(
        width: usize,
        height: usize,
        cell_size: T,
        island_count: usize,
        radius_range: (T, T),
        noise: T,
        rng: &mut R,
    ) -> Self {
        let ex = cell_size * T::of_usize(width);
        let ey = cell_size * T::of_usize(height);
        let islands = (0..island_count)
            .map(|_| Island {
                x: uniform(rng, T::zero(), ex),
                y: uniform(rng, T::zero(), ey),
                radius: uniform(rng, radius_range.0, radius_range.1),
            })
            .collect();
        Self { width, height, cell_size, islands, noise }
    }

    /// Intensity is ~0.9 in open water, falls through a shallow band near each
    /// shoreline and reaches ~0.1 on land.
    pub fn render<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<IntensityGrid<T>> {
        let mut values = Vec::with_capacity(self.width * self.height);
        let water = T::of(0.9);
        let land = T::of(0.1);
        let shallow = T::of(0.5);
        for row in 0..self.height {
            for col in 0..self.width {
                let cx = (T::of_usize(col) + T::half()) * self.cell_size;
                let cy = (T::of_usize(row) + T::half()) * self.cell_size;
                // signed distance to the nearest shoreline, negative inside land
                let d = self
                    .islands
                    .iter()
                    .map(|is| (cx - is.x).hypot(cy - is.y) - is.radius)
                    .fold(T::infinity(), T::min);
                let band = self.cell_size * T::of(3.0);
                let base = if d <= T::zero() {
                    land
                } else if d < band {
                    shallow
                } else {
                    water
                };
                let v = if self.noise > T::zero() {
                    normal(rng, base, self.noise)
                } else {
                    base
                };
                values.push(v.max(T::zero()).min(T::one()));
            }
        }
        Raster::new(self.width, self.height, self.cell_size, values)
    }
}
