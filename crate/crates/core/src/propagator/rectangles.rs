use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::spectral::{FrequencyLattice, SpectralFunction};

/// Axis-aligned box `[a₁,b₁] × [a₂,b₂]` in the frequency plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rectangle {
    pub x: (f64, f64),
    pub y: (f64, f64),
}

impl Rectangle {
    pub fn new(x: (f64, f64), y: (f64, f64)) -> Result<Self> {
        let ok = |(a, b): (f64, f64)| a.is_finite() && b.is_finite() && b > a;
        if !ok(x) || !ok(y) {
            return Err(invalid(format!("box {x:?} x {y:?} needs finite sides of positive length")));
        }
        Ok(Self { x, y })
    }

    pub fn area(&self) -> f64 {
        (self.x.1 - self.x.0) * (self.y.1 - self.y.0)
    }

    fn overlaps(&self, other: &Self) -> bool {
        let open = |a: (f64, f64), b: (f64, f64)| a.0 < b.1 && b.0 < a.1;
        open(self.x, other.x) && open(self.y, other.y)
    }
}

/// Finite union of pairwise-disjoint boxes, standing for the indicator `χ_A`.
#[derive(Debug, Clone, PartialEq)]
pub struct RectangleSet {
    boxes: Vec<Rectangle>,
}

impl RectangleSet {
    /// Boxes may share edges but not interior points.
    pub fn new(boxes: Vec<Rectangle>) -> Result<Self> {
        if boxes.is_empty() {
            return Err(invalid("a rectangle set needs at least one box"));
        }
        for (i, a) in boxes.iter().enumerate() {
            if let Some(j) = boxes[i + 1..].iter().position(|b| a.overlaps(b)) {
                return Err(invalid(format!("boxes {i} and {} overlap", i + 1 + j)));
            }
        }
        Ok(Self { boxes })
    }

    pub fn boxes(&self) -> &[Rectangle] {
        &self.boxes
    }

    pub fn area(&self) -> f64 {
        self.boxes.iter().map(Rectangle::area).sum()
    }

    /// Lattice indicator by cell-center membership in half-open boxes `[a, b)`.
    ///
    /// Boxes whose edges sit on cell boundaries are reproduced with exact area.
    pub fn rasterize(&self, lattice: &FrequencyLattice) -> Result<SpectralFunction> {
        if lattice.dim() != 2 {
            return Err(invalid("rectangle sets live in two dimensions"));
        }
        let one = Complex64::new(1.0, 0.0);
        let mut modes = Vec::new();
        for b in &self.boxes {
            let (x0, x1) = lattice.axis_index_range(b.x.0, b.x.1);
            let (y0, y1) = lattice.axis_index_range(b.y.0, b.y.1);
            for i in x0..=x1 {
                for j in y0..=y1 {
                    modes.push(([i, j], one));
                }
            }
        }
        SpectralFunction::from_modes(*lattice, modes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_overlap_but_allows_shared_edges() {
        let a = Rectangle::new((0.0, 1.0), (0.0, 1.0)).unwrap();
        let b = Rectangle::new((1.0, 2.0), (0.0, 1.0)).unwrap();
        let c = Rectangle::new((0.5, 1.5), (0.5, 1.5)).unwrap();
        assert!(RectangleSet::new(vec![a, b]).is_ok());
        assert!(RectangleSet::new(vec![a, c]).is_err());
        assert!(Rectangle::new((1.0, 1.0), (0.0, 1.0)).is_err());
    }

    #[test]
    fn aligned_boxes_rasterize_to_their_area() {
        let lat = FrequencyLattice::new(2, 0.25, 32.0).unwrap();
        let set = RectangleSet::new(vec![
            Rectangle::new((16.0, 17.0), (16.0, 24.0)).unwrap(),
            Rectangle::new((-3.0, -1.0), (2.0, 2.5)).unwrap(),
        ])
        .unwrap();
        let f = set.rasterize(&lat).unwrap();
        let cells = f.len() as f64 * lat.cell_volume();
        assert!((cells - set.area()).abs() < 1e-12);
    }
}
