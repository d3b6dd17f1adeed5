//! Level-set extraction: the super-level region `{u > λ}` and an
//! interpolated point cloud on its boundary.
//!
//! Contours are read edge-by-edge: every grid edge whose endpoint values
//! straddle `λ` contributes one linearly interpolated crossing point.  On
//! a plane this is the point set of marching squares (each interior edge
//! is visited once, so no duplicates); on a line or radial grid it is the
//! set of interval crossings.  One-dimensional crossings are embedded in
//! the plane as `[x, 0]` so that all downstream set metrics share one
//! point type.

use super::{Field, GridKind};

/// The super-level set of a field at one threshold.
#[derive(Debug, Clone)]
pub struct LevelSet {
    /// Threshold in (0,1).
    pub lambda: f64,
    /// Time of the underlying field.
    pub time: f64,
    /// Interpolated boundary points (1-D crossings embedded as `[x, 0]`).
    pub points: Vec<[f64; 2]>,
    /// Per-node mask of `{u > λ}`, in field storage order.
    pub upper_region_mask: Vec<bool>,
}

/// Extract the `λ`-contour of a field by linear interpolation along grid
/// edges.  An empty contour (field entirely above or below `λ`) is valid.
pub fn extract_level_set(field: &Field, lambda: f64) -> LevelSet {
    assert!(
        (0.0..1.0).contains(&lambda) && lambda > 0.0,
        "the threshold must lie strictly inside (0,1)"
    );
    let grid = field.grid();
    let u = field.values();
    let h = grid.spacing();
    let mut points = Vec::new();

    let crossing = |a: f64, b: f64| -> Option<f64> {
        // Fraction along the edge where the value passes λ.
        if (a > lambda) == (b > lambda) || a == b {
            None
        } else {
            Some((lambda - a) / (b - a))
        }
    };

    match grid.kind() {
        GridKind::Line | GridKind::Radial(_) => {
            let lo = grid.bounds()[0].0;
            for i in 0..u.len() - 1 {
                if let Some(t) = crossing(u[i], u[i + 1]) {
                    points.push([lo + (i as f64 + t) * h, 0.0]);
                }
            }
        }
        GridKind::Plane => {
            let shape = grid.shape();
            let (nx, ny) = (shape[0], shape[1]);
            let (xlo, _) = grid.bounds()[0];
            let (ylo, _) = grid.bounds()[1];
            for j in 0..ny {
                for i in 0..nx {
                    let idx = j * nx + i;
                    let x = xlo + i as f64 * h;
                    let y = ylo + j as f64 * h;
                    if i + 1 < nx {
                        if let Some(t) = crossing(u[idx], u[idx + 1]) {
                            points.push([x + t * h, y]);
                        }
                    }
                    if j + 1 < ny {
                        if let Some(t) = crossing(u[idx], u[idx + nx]) {
                            points.push([x, y + t * h]);
                        }
                    }
                }
            }
        }
    }

    LevelSet {
        lambda,
        time: field.time(),
        points,
        upper_region_mask: u.iter().map(|&v| v > lambda).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pde::{Field, Grid};

    #[test]
    fn monotone_profile_crossing_is_located() {
        // A sigmoid translated by s crosses its midpoint value at x = s.
        let h = 0.1;
        let s = 2.34;
        let grid = Grid::line(-10.0, 10.0, h);
        let n = grid.len();
        let profile = |z: f64| 1.0 / (1.0 + (z / 2f64.sqrt()).exp());
        let values: Vec<f64> = (0..n).map(|i| profile(-10.0 + i as f64 * h - s)).collect();
        let field = Field::from_values(grid, 0.0, values);
        let ls = extract_level_set(&field, 0.5);
        assert_eq!(ls.points.len(), 1);
        assert!(
            (ls.points[0][0] - s).abs() < h * h,
            "crossing at {}",
            ls.points[0][0]
        );
    }

    #[test]
    fn saturated_field_has_empty_contour_and_full_mask() {
        let grid = Grid::line(-1.0, 1.0, 0.1);
        let n = grid.len();
        let field = Field::from_values(grid, 0.0, vec![1.0; n]);
        let ls = extract_level_set(&field, 0.3);
        assert!(ls.points.is_empty());
        assert!(ls.upper_region_mask.iter().all(|&m| m));
    }

    #[test]
    fn radial_bump_contour_is_a_circle() {
        // u = exp(−|x|²) on the plane: the λ-contour is the circle of
        // radius √(−ln λ), located within an interpolation error well
        // under the spacing.
        let h = 0.1;
        let grid = Grid::plane((-3.0, 3.0), (-3.0, 3.0), h);
        let n = grid.len();
        let values: Vec<f64> = (0..n)
            .map(|idx| {
                let p = grid.node(idx);
                (-(p[0] * p[0] + p[1] * p[1])).exp()
            })
            .collect();
        let field = Field::from_values(grid, 0.0, values);
        let lambda: f64 = 0.5;
        let target = (-(lambda.ln())).sqrt();
        let ls = extract_level_set(&field, lambda);
        assert!(ls.points.len() > 50);
        for p in &ls.points {
            let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
            assert!((r - target).abs() < h, "point at radius {r}, want {target}");
        }
    }

    #[test]
    fn interior_edges_are_counted_once() {
        // A field with a single node above λ yields exactly the four
        // crossings of that node's edges.
        let grid = Grid::plane((-1.0, 1.0), (-1.0, 1.0), 0.5);
        let shape = grid.shape();
        let nx = shape[0];
        let mut values = vec![0.0; grid.len()];
        values[2 * nx + 2] = 1.0; // centre node
        let field = Field::from_values(grid, 0.0, values);
        let ls = extract_level_set(&field, 0.25);
        assert_eq!(ls.points.len(), 4);
    }
}
