use serde::{Deserialize, Serialize};

use crate::device::CurrentMap;
use crate::error::{Error, Result};
use crate::grid::Pixel;

/// Ordered measurements `(x_j, y_j)`, never containing a location twice.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ObservationSet {
    rows: usize,
    cols: usize,
    pairs: Vec<(Pixel, f64)>,
    measured: Vec<bool>,
}

impl ObservationSet {
    pub fn new(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            pairs: Vec::new(),
            measured: vec![false; rows * cols],
        }
    }

    pub fn push(&mut self, x: Pixel, y: f64) -> Result<()> {
        if x.row >= self.rows || x.col >= self.cols {
            return Err(Error::Domain(format!("location ({}, {}) lies outside the grid", x.row, x.col)));
        }
        let i = x.index(self.cols);
        if self.measured[i] {
            return Err(Error::DuplicateMeasurement { row: x.row, col: x.col });
        }
        self.measured[i] = true;
        self.pairs.push((x, y));
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(Pixel, f64)] {
        &self.pairs
    }

    /// Pairs `start..end` (0-based, end exclusive).
    pub fn slice(&self, start: usize, end: usize) -> &[(Pixel, f64)] {
        &self.pairs[start..end]
    }

    pub fn locations(&self) -> impl Iterator<Item = Pixel> + '_ {
        self.pairs.iter().map(|(p, _)| *p)
    }

    pub fn contains(&self, x: Pixel) -> bool {
        x.row < self.rows && x.col < self.cols && self.measured[x.index(self.cols)]
    }

    /// Row-major measured mask.
    pub fn mask(&self) -> &[bool] {
        &self.measured
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }
}

/// The initial uniform-grid scan that every reconstruction is conditioned on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditioningInput {
    pub locations: Vec<Pixel>,
    pub values: Vec<f64>,
}

impl ConditioningInput {
    pub fn from_map(map: &CurrentMap, locations: &[Pixel]) -> Self {
        Self {
            locations: locations.to_vec(),
            values: locations.iter().map(|&p| map.at(p)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.locations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.locations.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_and_bounds() {
        let mut o = ObservationSet::new(4, 4);
        o.push(Pixel::new(1, 2), 0.5).unwrap();
        assert!(matches!(
            o.push(Pixel::new(1, 2), 0.1),
            Err(Error::DuplicateMeasurement { row: 1, col: 2 })
        ));
        assert!(o.push(Pixel::new(4, 0), 0.0).is_err());
        assert_eq!(o.len(), 1);
        assert!(o.contains(Pixel::new(1, 2)));
        assert!(!o.contains(Pixel::new(2, 1)));
    }
}
