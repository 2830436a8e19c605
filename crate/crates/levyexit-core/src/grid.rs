//! Uniform node set over the bounded domain.

use crate::error::{Error, Result};

/// Uniform grid with `n_cells` subintervals: nodes `x_j = a + j h` for
/// `j = 0..=n_cells`, `h = (b - a) / n_cells`.
///
/// Interior nodes are computed in the barycentric form
/// `x_j = (a (N - j) + b j) / N`, which pins `x_0 = a`, `x_N = b` exactly
/// and makes the node set bitwise mirror-symmetric on symmetric domains.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    a: f64,
    b: f64,
    n_cells: usize,
    h: f64,
    nodes: Vec<f64>,
}

impl Grid {
    /// Build a grid over `domain` with an even `n_cells >= 4`.
    pub fn build(domain: (f64, f64), n_cells: usize) -> Result<Grid> {
        let (a, b) = domain;
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidDomain(a, b));
        }
        if n_cells < 4 || n_cells % 2 != 0 {
            return Err(Error::InvalidCells(n_cells));
        }
        let n = n_cells as f64;
        let h = (b - a) / n;
        let nodes = (0..=n_cells)
            .map(|j| {
                if j == 0 {
                    a
                } else if j == n_cells {
                    b
                } else {
                    (a * (n - j as f64) + b * j as f64) / n
                }
            })
            .collect();
        Ok(Grid {
            a,
            b,
            n_cells,
            h,
            nodes,
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Number of subintervals N.
    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    /// Grid spacing `h = (b - a) / N`.
    pub fn h(&self) -> f64 {
        self.h
    }

    /// All nodes `x_0 .. x_N` (length `N + 1`).
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn node(&self, j: usize) -> f64 {
        self.nodes[j]
    }

    /// Distance from node `j` to the left boundary, computed as `j * h` so
    /// that mirrored nodes get bitwise-equal distances.
    pub fn dist_left(&self, j: usize) -> f64 {
        j as f64 * self.h
    }

    /// Distance from node `j` to the right boundary, `(N - j) * h`.
    pub fn dist_right(&self, j: usize) -> f64 {
        (self.n_cells - j) as f64 * self.h
    }

    /// Index of the grid node equal to `x`, if one matches to round-off.
    pub fn node_index_of(&self, x: f64) -> Option<usize> {
        let scale = self.h.max(x.abs());
        let guess = ((x - self.a) / self.h).round();
        if guess < 0.0 || guess > self.n_cells as f64 {
            return None;
        }
        let j = guess as usize;
        if (self.nodes[j] - x).abs() <= 1e-9 * scale {
            Some(j)
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_symmetric_grid_is_exact() {
        let g = Grid::build((-1.0, 1.0), 4).unwrap();
        assert_eq!(g.nodes(), &[-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert_eq!(g.h(), 0.5);
    }

    #[test]
    fn paper_resolution_spacing() {
        let g = Grid::build((-1.0, 1.0), 160).unwrap();
        assert_eq!(g.h(), 1.0 / 80.0);
        assert_eq!(g.node(0), -1.0);
        assert_eq!(g.node(160), 1.0);
    }

    #[test]
    fn integer_grid() {
        let g = Grid::build((-4.0, 4.0), 8).unwrap();
        let want: Vec<f64> = (-4..=4).map(|k| k as f64).collect();
        assert_eq!(g.nodes(), &want[..]);
    }

    #[test]
    fn rejects_bad_cell_counts() {
        assert!(matches!(
            Grid::build((-1.0, 1.0), 5),
            Err(Error::InvalidCells(5))
        ));
        assert!(matches!(
            Grid::build((-1.0, 1.0), 2),
            Err(Error::InvalidCells(2))
        ));
    }

    #[test]
    fn nodes_mirror_on_symmetric_domain() {
        let g = Grid::build((-1.5, 1.5), 30).unwrap();
        for j in 0..=30 {
            assert_eq!(g.node(j), -g.node(30 - j), "node {j}");
            assert_eq!(g.dist_left(j), g.dist_right(30 - j));
        }
    }

    #[test]
    fn nodes_are_uniform_to_roundoff() {
        let g = Grid::build((-1.1, 0.0), 220).unwrap();
        for j in 0..220 {
            let step = g.node(j + 1) - g.node(j);
            assert!((step - g.h()).abs() < 1e-14);
        }
    }

    #[test]
    fn probe_lookup() {
        let g = Grid::build((-1.0, 1.0), 20).unwrap();
        assert_eq!(g.node_index_of(-0.5), Some(5));
        assert_eq!(g.node_index_of(1.0), Some(20));
        assert_eq!(g.node_index_of(0.123), None);
        assert_eq!(g.node_index_of(7.0), None);
    }
}
