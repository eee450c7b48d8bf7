//! Uniform cell grid for fixed-radius neighbour queries.

use super::linalg::Vec3;
use super::GeometryError;
use std::collections::HashMap;

/// Immutable spatial hash over a point set.
///
/// Cells are cubes of edge `cell_size`; a query of radius `r ≤ cell_size` touches at most
/// 3 cells per axis. Points are identified by their index in the slice given to
/// [`NeighborGrid::new`].
#[derive(Debug, Clone)]
pub struct NeighborGrid {
    cell_size: f64,
    cells: HashMap<(i64, i64, i64), Vec<usize>>,
    points: Vec<Vec3>,
}

/// Inclusive distance test shared by the grid and brute-force paths.
#[inline]
pub fn within(a: Vec3, b: Vec3, radius: f64) -> bool {
    a.distance_squared(b) <= radius * radius
}

impl NeighborGrid {
    pub fn new(points: &[Vec3], cell_size: f64) -> Result<Self, GeometryError> {
        if !(cell_size.is_finite() && cell_size > 0.0) {
            return Err(GeometryError::InvalidCellSize(cell_size));
        }
        let mut cells: HashMap<(i64, i64, i64), Vec<usize>> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            if !p.is_finite() {
                return Err(GeometryError::NonFinite);
            }
            cells.entry(Self::cell_of(*p, cell_size)).or_default().push(i);
        }
        Ok(Self { cell_size, cells, points: points.to_vec() })
    }

    fn cell_of(p: Vec3, cell: f64) -> (i64, i64, i64) {
        ((p.x / cell).floor() as i64, (p.y / cell).floor() as i64, (p.z / cell).floor() as i64)
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Calls `visit(index, squared_distance)` for every indexed point within `radius`
    /// (inclusive) of `center`. Visiting order is unspecified.
    pub fn for_each_within(
        &self,
        center: Vec3,
        radius: f64,
        mut visit: impl FnMut(usize, f64),
    ) -> Result<(), GeometryError> {
        if radius > self.cell_size {
            return Err(GeometryError::RadiusExceedsCell { radius, cell: self.cell_size });
        }
        // Pad the box slightly so rounding in the cell division can never drop a boundary point.
        let pad = radius + 1e-9 * (1.0 + center.x.abs().max(center.y.abs()).max(center.z.abs()));
        let lo = Self::cell_of(center - Vec3::new(pad, pad, pad), self.cell_size);
        let hi = Self::cell_of(center + Vec3::new(pad, pad, pad), self.cell_size);
        let r2 = radius * radius;
        for cx in lo.0..=hi.0 {
            for cy in lo.1..=hi.1 {
                for cz in lo.2..=hi.2 {
                    if let Some(ids) = self.cells.get(&(cx, cy, cz)) {
                        for &i in ids {
                            let d2 = self.points[i].distance_squared(center);
                            if d2 <= r2 {
                                visit(i, d2);
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Indices within `radius` of `center`, ascending.
    pub fn within(&self, center: Vec3, radius: f64) -> Result<Vec<usize>, GeometryError> {
        let mut out = Vec::new();
        self.for_each_within(center, radius, |i, _| out.push(i))?;
        out.sort_unstable();
        Ok(out)
    }

    /// Smallest squared distance from `center` to an indexed point within `radius`.
    pub fn nearest_squared_within(&self, center: Vec3, radius: f64) -> Result<Option<f64>, GeometryError> {
        let mut best: Option<f64> = None;
        self.for_each_within(center, radius, |_, d2| {
            best = Some(best.map_or(d2, |b: f64| b.min(d2)));
        })?;
        Ok(best)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn matches_brute_force_on_random_points() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let pts: Vec<Vec3> = (0..400)
            .map(|_| Vec3::new(rng.gen_range(-20.0..20.0), rng.gen_range(-20.0..20.0), rng.gen_range(-20.0..20.0)))
            .collect();
        let grid = NeighborGrid::new(&pts, 5.0).unwrap();
        for _ in 0..50 {
            let c = Vec3::new(rng.gen_range(-25.0..25.0), rng.gen_range(-25.0..25.0), rng.gen_range(-25.0..25.0));
            let r = rng.gen_range(0.5..5.0);
            let brute: Vec<usize> = (0..pts.len()).filter(|&i| within(pts[i], c, r)).collect();
            assert_eq!(grid.within(c, r).unwrap(), brute);
        }
    }

    #[test]
    fn boundary_is_inclusive() {
        let pts = vec![Vec3::new(6.0, 0.0, 0.0), Vec3::new(-6.0, 0.0, 0.0), Vec3::new(0.0, 6.000001, 0.0)];
        let grid = NeighborGrid::new(&pts, 6.0).unwrap();
        assert_eq!(grid.within(Vec3::ZERO, 6.0).unwrap(), vec![0, 1]);
    }

    #[test]
    fn oversized_radius_rejected() {
        let grid = NeighborGrid::new(&[Vec3::ZERO], 2.0).unwrap();
        assert!(matches!(grid.within(Vec3::ZERO, 3.0), Err(GeometryError::RadiusExceedsCell { .. })));
    }
}
