//! Uniform tensor grids on boxes in ℂ^d.

use num_complex::Complex64;

use crate::error::GridError;

/// A box `Π_a {|Re(z_a − c_a)| ≤ L_a, |Im(z_a − c_a)| ≤ L_a}` sampled with `N_a` nodes per real axis.
///
/// Real axes are ordered `Re z_1, Im z_1, Re z_2, …`; the last axis varies fastest in the flat
/// node index.
#[derive(Clone, Debug, PartialEq)]
pub struct GridChart {
    center: Vec<Complex64>,
    half_widths: Vec<f64>,
    resolution: Vec<usize>,
    strides: Vec<usize>,
    n_nodes: usize,
}

/// Maximum complex dimension of a grid chart.
pub const MAX_GRID_DIM: usize = 3;

impl GridChart {
    pub fn new(center: Vec<Complex64>, half_widths: Vec<f64>, resolution: Vec<usize>) -> Result<Self, GridError> {
        let d = center.len();
        if d == 0 || d > MAX_GRID_DIM {
            return Err(GridError::InvalidChart(format!("complex dimension {d} outside 1..={MAX_GRID_DIM}")));
        }
        if half_widths.len() != d || resolution.len() != d {
            return Err(GridError::InvalidChart("center, half-widths and resolutions differ in length".into()));
        }
        if half_widths.iter().any(|&l| !(l.is_finite() && l > 0.0)) {
            return Err(GridError::InvalidChart("half-widths must be positive".into()));
        }
        if resolution.iter().any(|&n| n < 8) {
            return Err(GridError::InvalidChart("at least 8 nodes per axis are required".into()));
        }
        let counts: Vec<usize> = resolution.iter().flat_map(|&n| [n, n]).collect();
        let mut strides = vec![1usize; 2 * d];
        for r in (0..2 * d - 1).rev() {
            strides[r] = strides[r + 1] * counts[r + 1];
        }
        let n_nodes = strides[0] * counts[0];
        if n_nodes > 400_000_000 {
            return Err(GridError::InvalidChart(format!("{n_nodes} nodes exceed the supported size")));
        }
        Ok(GridChart { center, half_widths, resolution, strides, n_nodes })
    }

    /// A chart with equal half-width and resolution in every coordinate.
    pub fn uniform(center: Vec<Complex64>, half_width: f64, resolution: usize) -> Result<Self, GridError> {
        let d = center.len();
        Self::new(center, vec![half_width; d], vec![resolution; d])
    }

    /// The polydisc-enclosing box `[-L, L]^{2d}` centered at the origin.
    pub fn centered(dim: usize, half_width: f64, resolution: usize) -> Result<Self, GridError> {
        Self::uniform(vec![Complex64::new(0.0, 0.0); dim], half_width, resolution)
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn real_dim(&self) -> usize {
        2 * self.center.len()
    }

    pub fn center(&self) -> &[Complex64] {
        &self.center
    }

    pub fn half_widths(&self) -> &[f64] {
        &self.half_widths
    }

    pub fn resolution(&self) -> &[usize] {
        &self.resolution
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    /// Node count along real axis `r`.
    pub fn axis_len(&self, r: usize) -> usize {
        self.resolution[r / 2]
    }

    pub fn stride(&self, r: usize) -> usize {
        self.strides[r]
    }

    /// Spacing of complex coordinate `a` (shared by its real and imaginary axes).
    pub fn step(&self, a: usize) -> f64 {
        2.0 * self.half_widths[a] / (self.resolution[a] - 1) as f64
    }

    pub fn min_step(&self) -> f64 {
        (0..self.dim()).map(|a| self.step(a)).fold(f64::INFINITY, f64::min)
    }

    pub fn max_step(&self) -> f64 {
        (0..self.dim()).map(|a| self.step(a)).fold(0.0, f64::max)
    }

    /// Lebesgue volume of one grid cell.
    pub fn cell_volume(&self) -> f64 {
        (0..self.dim()).map(|a| self.step(a) * self.step(a)).product()
    }

    pub fn axis_index(&self, node: usize, r: usize) -> usize {
        (node / self.strides[r]) % self.axis_len(r)
    }

    pub fn indices(&self, node: usize, out: &mut [usize]) {
        for (r, o) in out.iter_mut().enumerate().take(self.real_dim()) {
            *o = self.axis_index(node, r);
        }
    }

    pub fn axis_coord(&self, r: usize, i: usize) -> f64 {
        let a = r / 2;
        let c = if r % 2 == 0 { self.center[a].re } else { self.center[a].im };
        c - self.half_widths[a] + i as f64 * self.step(a)
    }

    pub fn real_coords(&self, node: usize, out: &mut [f64]) {
        for (r, o) in out.iter_mut().enumerate().take(self.real_dim()) {
            *o = self.axis_coord(r, self.axis_index(node, r));
        }
    }

    pub fn point(&self, node: usize) -> Vec<Complex64> {
        (0..self.dim())
            .map(|a| Complex64::new(self.axis_coord(2 * a, self.axis_index(node, 2 * a)), self.axis_coord(2 * a + 1, self.axis_index(node, 2 * a + 1))))
            .collect()
    }

    pub fn point_into(&self, node: usize, out: &mut [Complex64]) {
        for (a, o) in out.iter_mut().enumerate().take(self.dim()) {
            *o = Complex64::new(self.axis_coord(2 * a, self.axis_index(node, 2 * a)), self.axis_coord(2 * a + 1, self.axis_index(node, 2 * a + 1)));
        }
    }

    /// Whether every index of the node is at least `margin` away from the box boundary.
    pub fn is_interior(&self, node: usize, margin: usize) -> bool {
        (0..self.real_dim()).all(|r| {
            let i = self.axis_index(node, r);
            i >= margin && i + margin < self.axis_len(r)
        })
    }

    /// Node nearest to a point, clamped to the grid.
    pub fn nearest_node(&self, x: &[Complex64]) -> usize {
        let mut node = 0;
        for r in 0..self.real_dim() {
            let a = r / 2;
            let v = if r % 2 == 0 { x[a].re - self.center[a].re } else { x[a].im - self.center[a].im };
            let i = ((v + self.half_widths[a]) / self.step(a)).round().clamp(0.0, (self.axis_len(r) - 1) as f64) as usize;
            node += i * self.strides[r];
        }
        node
    }

    /// Largest radius of a Euclidean ball at `x` that stays inside the region excluding a
    /// boundary layer of `margin` nodes.
    pub fn inner_radius(&self, x: &[Complex64], margin: usize) -> f64 {
        let mut r = f64::INFINITY;
        for a in 0..self.dim() {
            let l = self.half_widths[a] - margin as f64 * self.step(a);
            let dx = x[a].re - self.center[a].re;
            let dy = x[a].im - self.center[a].im;
            r = r.min(l - dx.abs()).min(l - dy.abs());
        }
        r.max(0.0)
    }

    pub fn same_grid(&self, other: &GridChart) -> bool {
        self == other
    }
}

/// An axis-aligned box in the real coordinates of a chart, half-open `[lo, hi)` per axis.
#[derive(Clone, Debug, PartialEq)]
pub struct RealBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl RealBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        assert_eq!(lo.len(), hi.len());
        RealBox { lo, hi }
    }

    /// The whole real space.
    pub fn everything(real_dim: usize) -> Self {
        RealBox { lo: vec![f64::NEG_INFINITY; real_dim], hi: vec![f64::INFINITY; real_dim] }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter().zip(self.lo.iter().zip(&self.hi)).all(|(v, (l, h))| *v >= *l && *v < *h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometry() {
        let g = GridChart::centered(2, 1.0, 11).unwrap();
        assert_eq!(g.n_nodes(), 11usize.pow(4));
        assert!((g.step(0) - 0.2).abs() < 1e-15);
        let x = [Complex64::new(0.2, -0.4), Complex64::new(1.0, 0.0)];
        let n = g.nearest_node(&x);
        let p = g.point(n);
        assert!((p[0] - x[0]).norm() < 1e-12 && (p[1] - x[1]).norm() < 1e-12);
        assert!(!g.is_interior(n, 1));
        assert!(GridChart::centered(4, 1.0, 11).is_err());
        assert!(GridChart::centered(1, 1.0, 4).is_err());
    }
}
