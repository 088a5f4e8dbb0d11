//! Lagrange bases on the reference triangle and the affine element map.

use crate::error::{Error, Result};
use crate::mesh::Point2;

/// Upper bound on the local basis size (quadratic elements).
pub const MAX_BASIS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReferenceElement {
    degree: usize,
}

impl ReferenceElement {
    pub fn new(degree: usize) -> Result<Self> {
        match degree {
            1 | 2 => Ok(ReferenceElement { degree }),
            _ => Err(Error::invalid(format!(
                "polynomial degree must be 1 or 2, got {degree}"
            ))),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `(p + 1)(p + 2) / 2`
    pub fn n_basis(&self) -> usize {
        (self.degree + 1) * (self.degree + 2) / 2
    }

    /// Reference coordinates of the nodes: vertices, then for quadratics the
    /// midpoints of edges (0,1), (1,2), (2,0).
    pub fn nodes(&self) -> Vec<[f64; 2]> {
        let mut nodes = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        if self.degree == 2 {
            nodes.extend([[0.5, 0.0], [0.5, 0.5], [0.0, 0.5]]);
        }
        nodes
    }

    /// Basis values at a reference point; only the first `n_basis` entries
    /// are meaningful.
    pub fn values(&self, p: [f64; 2]) -> [f64; MAX_BASIS] {
        let l = barycentric(p);
        let mut out = [0.0; MAX_BASIS];
        match self.degree {
            1 => out[..3].copy_from_slice(&l),
            _ => {
                for i in 0..3 {
                    out[i] = l[i] * (2.0 * l[i] - 1.0);
                    out[3 + i] = 4.0 * l[i] * l[(i + 1) % 3];
                }
            }
        }
        out
    }

    /// Reference gradients at a reference point.
    pub fn gradients(&self, p: [f64; 2]) -> [[f64; 2]; MAX_BASIS] {
        let l = barycentric(p);
        let mut out = [[0.0; 2]; MAX_BASIS];
        match self.degree {
            1 => out[..3].copy_from_slice(&BARY_GRAD),
            _ => {
                for i in 0..3 {
                    let j = (i + 1) % 3;
                    let s = 4.0 * l[i] - 1.0;
                    out[i] = [s * BARY_GRAD[i][0], s * BARY_GRAD[i][1]];
                    out[3 + i] = [
                        4.0 * (l[j] * BARY_GRAD[i][0] + l[i] * BARY_GRAD[j][0]),
                        4.0 * (l[j] * BARY_GRAD[i][1] + l[i] * BARY_GRAD[j][1]),
                    ];
                }
            }
        }
        out
    }
}

const BARY_GRAD: [[f64; 2]; 3] = [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]];

fn barycentric(p: [f64; 2]) -> [f64; 3] {
    [1.0 - p[0] - p[1], p[0], p[1]]
}

/// Affine map from the reference triangle onto a physical triangle.
#[derive(Debug, Clone, Copy)]
pub struct AffineMap {
    origin: Point2,
    jac: [[f64; 2]; 2],
    inv: [[f64; 2]; 2],
    det: f64,
}

impl AffineMap {
    pub fn new(corners: [Point2; 3]) -> Self {
        let [a, b, c] = corners;
        let jac = [[b.x - a.x, c.x - a.x], [b.y - a.y, c.y - a.y]];
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        let inv = [
            [jac[1][1] / det, -jac[0][1] / det],
            [-jac[1][0] / det, jac[0][0] / det],
        ];
        AffineMap {
            origin: a,
            jac,
            inv,
            det,
        }
    }

    /// Twice the signed area.
    pub fn det(&self) -> f64 {
        self.det
    }

    pub fn to_physical(&self, p: [f64; 2]) -> Point2 {
        Point2::new(
            self.origin.x + self.jac[0][0] * p[0] + self.jac[0][1] * p[1],
            self.origin.y + self.jac[1][0] * p[0] + self.jac[1][1] * p[1],
        )
    }

    pub fn to_reference(&self, x: Point2) -> [f64; 2] {
        let (dx, dy) = (x.x - self.origin.x, x.y - self.origin.y);
        [
            self.inv[0][0] * dx + self.inv[0][1] * dy,
            self.inv[1][0] * dx + self.inv[1][1] * dy,
        ]
    }

    /// Maps a reference gradient to a physical one: `J^{-T} g`.
    pub fn gradient(&self, g: [f64; 2]) -> [f64; 2] {
        [
            self.inv[0][0] * g[0] + self.inv[1][0] * g[1],
            self.inv[0][1] * g[0] + self.inv[1][1] * g[1],
        ]
    }
}
