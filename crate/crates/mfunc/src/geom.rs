//! Axis-aligned rectangles and cell-centered grid geometry shared by the
//! density and histogram modules.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Closed axis-aligned rectangle `[x0, x1] x [y0, y1]` in the z-plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rectangle {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rectangle {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Self> {
        let r = Rectangle { x0, x1, y0, y1 };
        if !(x0.is_finite() && x1.is_finite() && y0.is_finite() && y1.is_finite()) {
            return Err(Error::Domain(format!("rectangle has non-finite edge: {r:?}")));
        }
        if x1 < x0 || y1 < y0 {
            return Err(Error::Domain(format!("rectangle has negative extent: {r:?}")));
        }
        Ok(r)
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.x0 && x <= self.x1 && y >= self.y0 && y <= self.y1
    }

    pub fn contains_rect(&self, other: &Rectangle) -> bool {
        other.x0 >= self.x0 && other.x1 <= self.x1 && other.y0 >= self.y0 && other.y1 <= self.y1
    }

    /// Area of the intersection with `other` (zero if disjoint).
    pub fn overlap_area(&self, other: &Rectangle) -> f64 {
        let w = (self.x1.min(other.x1) - self.x0.max(other.x0)).max(0.0);
        let h = (self.y1.min(other.y1) - self.y0.max(other.y0)).max(0.0);
        w * h
    }

    /// Mirror image under complex conjugation `z -> conj(z)`.
    pub fn conjugate(&self) -> Rectangle {
        Rectangle {
            x0: self.x0,
            x1: self.x1,
            y0: -self.y1,
            y1: -self.y0,
        }
    }
}

/// Rectangular grid of `nx * ny` equal cells covering `rect`; values live at
/// cell centers. Row-major storage, x fastest.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridGeometry {
    pub rect: Rectangle,
    pub nx: usize,
    pub ny: usize,
}

impl GridGeometry {
    pub fn new(rect: Rectangle, nx: usize, ny: usize) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::Domain("grid must have at least one cell per axis".into()));
        }
        if rect.area() == 0.0 {
            return Err(Error::Domain("grid rectangle must have positive area".into()));
        }
        Ok(GridGeometry { rect, nx, ny })
    }

    pub fn dx(&self) -> f64 {
        self.rect.width() / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        self.rect.height() / self.ny as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.dx() * self.dy()
    }

    pub fn n_cells(&self) -> usize {
        self.nx * self.ny
    }

    pub fn node_x(&self, ix: usize) -> f64 {
        self.rect.x0 + (ix as f64 + 0.5) * self.dx()
    }

    pub fn node_y(&self, iy: usize) -> f64 {
        self.rect.y0 + (iy as f64 + 0.5) * self.dy()
    }

    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.nx + ix
    }

    pub fn cell_rect(&self, ix: usize, iy: usize) -> Rectangle {
        Rectangle {
            x0: self.rect.x0 + ix as f64 * self.dx(),
            x1: self.rect.x0 + (ix + 1) as f64 * self.dx(),
            y0: self.rect.y0 + iy as f64 * self.dy(),
            y1: self.rect.y0 + (iy + 1) as f64 * self.dy(),
        }
    }

    /// Cell containing `(x, y)`, or `None` outside `[x0, x1) x [y0, y1)`.
    pub fn bin_of(&self, x: f64, y: f64) -> Option<(usize, usize)> {
        if !(x >= self.rect.x0 && x < self.rect.x1 && y >= self.rect.y0 && y < self.rect.y1) {
            return None;
        }
        let ix = ((x - self.rect.x0) / self.dx()) as usize;
        let iy = ((y - self.rect.y0) / self.dy()) as usize;
        Some((ix.min(self.nx - 1), iy.min(self.ny - 1)))
    }

    /// Decile boundary rectangles `[x0, x_i] x [y0, y_j]` for i, j in 1..=10,
    /// snapped to cell edges. This is the fixed 100-rectangle family used by
    /// the Kolmogorov-Smirnov style discrepancy report; snapping makes both the
    /// histogram count and the density mass exact on each rectangle.
    pub fn decile_rectangles(&self) -> Vec<Rectangle> {
        let mut out = Vec::with_capacity(100);
        for j in 1..=10usize {
            let cy = (j * self.ny).div_ceil(10);
            let y1 = self.rect.y0 + cy as f64 * self.dy();
            for i in 1..=10usize {
                let cx = (i * self.nx).div_ceil(10);
                let x1 = self.rect.x0 + cx as f64 * self.dx();
                out.push(Rectangle {
                    x0: self.rect.x0,
                    x1,
                    y0: self.rect.y0,
                    y1,
                });
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rectangle_validation() {
        assert!(Rectangle::new(0.0, 1.0, 0.0, 1.0).is_ok());
        assert!(Rectangle::new(1.0, 0.0, 0.0, 1.0).is_err());
        assert!(Rectangle::new(0.0, f64::NAN, 0.0, 1.0).is_err());
        // degenerate (zero-area) rectangles are allowed
        assert!(Rectangle::new(0.5, 0.5, 0.0, 1.0).is_ok());
    }

    #[test]
    fn overlap_area_cases() {
        let a = Rectangle::new(0.0, 2.0, 0.0, 2.0).unwrap();
        let b = Rectangle::new(1.0, 3.0, 1.0, 3.0).unwrap();
        assert_eq!(a.overlap_area(&b), 1.0);
        let c = Rectangle::new(5.0, 6.0, 5.0, 6.0).unwrap();
        assert_eq!(a.overlap_area(&c), 0.0);
    }

    #[test]
    fn grid_binning_roundtrip() {
        let rect = Rectangle::new(-1.0, 1.0, -2.0, 2.0).unwrap();
        let g = GridGeometry::new(rect, 8, 16).unwrap();
        for iy in 0..g.ny {
            for ix in 0..g.nx {
                let (x, y) = (g.node_x(ix), g.node_y(iy));
                assert_eq!(g.bin_of(x, y), Some((ix, iy)));
            }
        }
        assert_eq!(g.bin_of(1.0, 0.0), None);
        assert_eq!(g.bin_of(-1.0, -2.0), Some((0, 0)));
    }

    #[test]
    fn decile_family_has_100_nested_rects() {
        let rect = Rectangle::new(-1.0, 1.0, -1.0, 1.0).unwrap();
        let g = GridGeometry::new(rect, 33, 33).unwrap();
        let fam = g.decile_rectangles();
        assert_eq!(fam.len(), 100);
        // the largest one is the full rectangle
        assert_eq!(fam[99], rect);
        for r in &fam {
            assert!(rect.contains_rect(r));
        }
    }
}
