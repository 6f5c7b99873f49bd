use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::RasterError;

/// A pixel coordinate. `x` is the column, `y` the row, origin top-left.
///
/// Points order in raster-scan order: by row, then by column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Point {
    pub x: u32,
    pub y: u32,
}

impl Point {
    pub const fn new(x: u32, y: u32) -> Self {
        Point { x, y }
    }

    /// Squared Euclidean distance to `other`.
    pub fn dist_sq(&self, other: &Point) -> u64 {
        let dx = self.x.abs_diff(other.x) as u64;
        let dy = self.y.abs_diff(other.y) as u64;
        dx * dx + dy * dy
    }
}

impl Ord for Point {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.y, self.x).cmp(&(other.y, other.x))
    }
}

impl PartialOrd for Point {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Axis-aligned box; `x_min`/`y_min` inclusive, `x_max`/`y_max` exclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BoundingBox {
    pub x_min: u32,
    pub y_min: u32,
    pub x_max: u32,
    pub y_max: u32,
}

impl BoundingBox {
    pub const fn new(x_min: u32, y_min: u32, x_max: u32, y_max: u32) -> Self {
        BoundingBox {
            x_min,
            y_min,
            x_max,
            y_max,
        }
    }

    pub fn width(&self) -> u32 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> u32 {
        self.y_max - self.y_min
    }

    pub fn area(&self) -> u64 {
        self.width() as u64 * self.height() as u64
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.x_min && p.x < self.x_max && p.y >= self.y_min && p.y < self.y_max
    }

    /// Pixels inside the box in raster order.
    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        (self.y_min..self.y_max)
            .flat_map(move |y| (self.x_min..self.x_max).map(move |x| Point::new(x, y)))
    }

    pub fn as_array(&self) -> [u32; 4] {
        [self.x_min, self.y_min, self.x_max, self.y_max]
    }
}

/// An 8-bit RGB scene, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageRaster {
    width: u32,
    height: u32,
    pixels: Vec<[u8; 3]>,
}

impl ImageRaster {
    pub fn new(width: u32, height: u32, pixels: Vec<[u8; 3]>) -> Result<Self, RasterError> {
        check_dims(width, height, pixels.len())?;
        Ok(ImageRaster {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: u32, height: u32, rgb: [u8; 3]) -> Result<Self, RasterError> {
        Self::new(width, height, vec![rgb; width as usize * height as usize])
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixels(&self) -> &[[u8; 3]] {
        &self.pixels
    }

    pub fn get(&self, x: u32, y: u32) -> [u8; 3] {
        self.pixels[y as usize * self.width as usize + x as usize]
    }

    pub fn set(&mut self, x: u32, y: u32, rgb: [u8; 3]) {
        self.pixels[y as usize * self.width as usize + x as usize] = rgb;
    }

    pub fn in_bounds(&self, p: Point) -> bool {
        p.x < self.width && p.y < self.height
    }
}

/// A row-major binary raster; `true` marks building pixels.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryMask {
    width: u32,
    height: u32,
    bits: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: u32, height: u32, bits: Vec<bool>) -> Result<Self, RasterError> {
        check_dims(width, height, bits.len())?;
        Ok(BinaryMask {
            width,
            height,
            bits,
        })
    }

    pub fn empty(width: u32, height: u32) -> Result<Self, RasterError> {
        Self::new(width, height, vec![false; width as usize * height as usize])
    }

    pub fn full(width: u32, height: u32) -> Result<Self, RasterError> {
        Self::new(width, height, vec![true; width as usize * height as usize])
    }

    /// Builds a mask from an ASCII sketch: `#` or `1` is set, anything else clear.
    pub fn from_rows(rows: &[&str]) -> Result<Self, RasterError> {
        let height = rows.len() as u32;
        let width = rows.first().map_or(0, |r| r.chars().count()) as u32;
        let mut bits = Vec::with_capacity(width as usize * height as usize);
        for row in rows {
            if row.chars().count() as u32 != width {
                return Err(RasterError::RaggedRows);
            }
            bits.extend(row.chars().map(|c| c == '#' || c == '1'));
        }
        Self::new(width, height, bits)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn dims(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, x: u32, y: u32) -> bool {
        self.bits[y as usize * self.width as usize + x as usize]
    }

    /// Like [`get`](Self::get) but `false` outside the raster.
    pub fn get_signed(&self, x: i64, y: i64) -> bool {
        x >= 0
            && y >= 0
            && (x as u64) < self.width as u64
            && (y as u64) < self.height as u64
            && self.get(x as u32, y as u32)
    }

    pub fn set(&mut self, x: u32, y: u32, v: bool) {
        self.bits[y as usize * self.width as usize + x as usize] = v;
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn in_bounds(&self, p: Point) -> bool {
        p.x < self.width && p.y < self.height
    }

    /// Set pixels in raster order.
    pub fn ones(&self) -> impl Iterator<Item = Point> + '_ {
        let w = self.width as usize;
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(i, _)| Point::new((i % w) as u32, (i / w) as u32))
    }
}

fn check_dims(width: u32, height: u32, len: usize) -> Result<(), RasterError> {
    if width == 0 || height == 0 {
        return Err(RasterError::ZeroDimension);
    }
    let expected = width as usize * height as usize;
    if len != expected {
        return Err(RasterError::PixelCount {
            expected,
            actual: len,
        });
    }
    Ok(())
}

/// One connected building instance.
///
/// Pixels are kept sorted in raster order. A bitmap over the bounding box
/// backs constant-time membership queries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceMask {
    id: u32,
    pixels: Vec<Point>,
    bbox: BoundingBox,
    local: Vec<bool>,
}

impl InstanceMask {
    /// Validating constructor: `id` must be positive, `pixels` non-empty and
    /// 8-connected. Duplicates are dropped.
    pub fn new(id: u32, mut pixels: Vec<Point>) -> Result<Self, RasterError> {
        if id == 0 {
            return Err(RasterError::ZeroInstanceId);
        }
        if pixels.is_empty() {
            return Err(RasterError::EmptyInstance);
        }
        pixels.sort_unstable();
        pixels.dedup();
        let inst = Self::from_sorted(id, pixels);
        if !inst.is_connected() {
            return Err(RasterError::Disconnected { id });
        }
        Ok(inst)
    }

    /// `pixels` must be sorted, deduplicated and non-empty.
    pub(crate) fn from_sorted(id: u32, pixels: Vec<Point>) -> Self {
        debug_assert!(!pixels.is_empty());
        let (mut x_min, mut x_max) = (u32::MAX, 0);
        for p in &pixels {
            x_min = x_min.min(p.x);
            x_max = x_max.max(p.x);
        }
        let bbox = BoundingBox::new(
            x_min,
            pixels[0].y,
            x_max + 1,
            pixels[pixels.len() - 1].y + 1,
        );
        let mut local = vec![false; bbox.area() as usize];
        let bw = bbox.width() as usize;
        for p in &pixels {
            local[(p.y - bbox.y_min) as usize * bw + (p.x - bbox.x_min) as usize] = true;
        }
        InstanceMask {
            id,
            pixels,
            bbox,
            local,
        }
    }

    pub fn id(&self) -> u32 {
        self.id
    }

    pub fn pixels(&self) -> &[Point] {
        &self.pixels
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn bbox(&self) -> BoundingBox {
        self.bbox
    }

    pub fn contains(&self, p: Point) -> bool {
        self.bbox.contains(p)
            && self.local[(p.y - self.bbox.y_min) as usize * self.bbox.width() as usize
                + (p.x - self.bbox.x_min) as usize]
    }

    pub(crate) fn contains_signed(&self, x: i64, y: i64) -> bool {
        x >= 0
            && y >= 0
            && x <= u32::MAX as i64
            && y <= u32::MAX as i64
            && self.contains(Point::new(x as u32, y as u32))
    }

    /// Number of pixels shared with `other`.
    pub fn overlap(&self, other: &InstanceMask) -> usize {
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        small.pixels.iter().filter(|p| large.contains(**p)).count()
    }

    /// Rasterizes the instance onto a `width` x `height` canvas.
    pub fn to_mask(&self, width: u32, height: u32) -> Result<BinaryMask, RasterError> {
        let mut mask = BinaryMask::empty(width, height)?;
        for p in &self.pixels {
            if !mask.in_bounds(*p) {
                return Err(RasterError::OutOfBounds { x: p.x, y: p.y });
            }
            mask.set(p.x, p.y, true);
        }
        Ok(mask)
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.local.len()];
        let bw = self.bbox.width() as i64;
        let start = self.pixels[0];
        let idx = |p: Point| {
            ((p.y - self.bbox.y_min) as i64 * bw + (p.x - self.bbox.x_min) as i64) as usize
        };
        seen[idx(start)] = true;
        let mut stack = vec![start];
        let mut visited = 1;
        while let Some(p) = stack.pop() {
            for (dx, dy) in NEIGHBORS_8 {
                let (nx, ny) = (p.x as i64 + dx, p.y as i64 + dy);
                if self.contains_signed(nx, ny) {
                    let q = Point::new(nx as u32, ny as u32);
                    if !seen[idx(q)] {
                        seen[idx(q)] = true;
                        visited += 1;
                        stack.push(q);
                    }
                }
            }
        }
        visited == self.pixels.len()
    }
}

pub(crate) const NEIGHBORS_8: [(i64, i64); 8] = [
    (-1, -1),
    (0, -1),
    (1, -1),
    (-1, 0),
    (1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];
