//! Small fixed-size vector and matrix types plus a one-sided Jacobi SVD for 3×3 matrices.

use serde::{Deserialize, Serialize};
use std::ops::{Add, AddAssign, Index, Mul, Neg, Sub};

/// A point or displacement in Å.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(self.y * o.z - self.z * o.y, self.z * o.x - self.x * o.z, self.x * o.y - self.y * o.x)
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn distance_squared(self, o: Vec3) -> f64 {
        (self - o).norm_squared()
    }

    pub fn distance(self, o: Vec3) -> f64 {
        self.distance_squared(o).sqrt()
    }

    pub fn scale(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    /// Arithmetic mean of a non-empty point set; zero for an empty one.
    pub fn centroid(points: &[Vec3]) -> Vec3 {
        if points.is_empty() {
            return Vec3::ZERO;
        }
        let mut sum = Vec3::ZERO;
        for p in points {
            sum += *p;
        }
        sum.scale(1.0 / points.len() as f64)
    }
}

impl From<[f64; 3]> for Vec3 {
    fn from(a: [f64; 3]) -> Self {
        Vec3::new(a[0], a[1], a[2])
    }
}

impl From<Vec3> for [f64; 3] {
    fn from(v: Vec3) -> Self {
        v.to_array()
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, o: Vec3) {
        self.x += o.x;
        self.y += o.y;
        self.z += o.z;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl Index<usize> for Vec3 {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        match i {
            0 => &self.x,
            1 => &self.y,
            2 => &self.z,
            _ => panic!("Vec3 index {i} out of range"),
        }
    }
}

/// Row-major 3×3 matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat3(pub [[f64; 3]; 3]);

impl Mat3 {
    pub const IDENTITY: Mat3 = Mat3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
    pub const ZERO: Mat3 = Mat3([[0.0; 3]; 3]);

    pub fn from_columns(c0: Vec3, c1: Vec3, c2: Vec3) -> Mat3 {
        Mat3([[c0.x, c1.x, c2.x], [c0.y, c1.y, c2.y], [c0.z, c1.z, c2.z]])
    }

    pub fn column(&self, j: usize) -> Vec3 {
        Vec3::new(self.0[0][j], self.0[1][j], self.0[2][j])
    }

    pub fn set_column(&mut self, j: usize, v: Vec3) {
        self.0[0][j] = v.x;
        self.0[1][j] = v.y;
        self.0[2][j] = v.z;
    }

    pub fn transpose(&self) -> Mat3 {
        let m = &self.0;
        Mat3([[m[0][0], m[1][0], m[2][0]], [m[0][1], m[1][1], m[2][1]], [m[0][2], m[1][2], m[2][2]]])
    }

    pub fn determinant(&self) -> f64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    pub fn apply(&self, v: Vec3) -> Vec3 {
        let m = &self.0;
        Vec3::new(
            m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
            m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
            m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z,
        )
    }

    /// Rotation by `angle` radians about the unit `axis` (Rodrigues).
    pub fn rotation(axis: Vec3, angle: f64) -> Mat3 {
        let n = axis.norm();
        let (x, y, z) = (axis.x / n, axis.y / n, axis.z / n);
        let (s, c) = angle.sin_cos();
        let t = 1.0 - c;
        Mat3([
            [t * x * x + c, t * x * y - s * z, t * x * z + s * y],
            [t * x * y + s * z, t * y * y + c, t * y * z - s * x],
            [t * x * z - s * y, t * y * z + s * x, t * z * z + c],
        ])
    }

    /// Largest absolute entry of `selfᵀ·self − I`.
    pub fn orthonormality_error(&self) -> f64 {
        let p = self.transpose() * *self;
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((p.0[i][j] - target).abs());
            }
        }
        worst
    }
}

impl Mul for Mat3 {
    type Output = Mat3;
    fn mul(self, o: Mat3) -> Mat3 {
        let mut out = [[0.0; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = (0..3).map(|k| self.0[i][k] * o.0[k][j]).sum();
            }
        }
        Mat3(out)
    }
}

/// `a = u · diag(s) · vᵀ` with `u` and `v` proper rotations.
///
/// Singular values are ordered `s[0] ≥ s[1] ≥ |s[2]|`; the last one carries the sign of
/// `det(a)` so that both factors stay in SO(3).
#[derive(Debug, Clone, Copy)]
pub struct SignedSvd {
    pub u: Mat3,
    pub s: [f64; 3],
    pub v: Mat3,
}

const JACOBI_MAX_SWEEPS: usize = 64;

/// One-sided (Hestenes) Jacobi SVD specialised to 3×3.
pub fn svd3(a: &Mat3) -> SignedSvd {
    let mut work = *a;
    let mut v = Mat3::IDENTITY;

    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for (p, q) in [(0usize, 1usize), (0, 2), (1, 2)] {
            let cp = work.column(p);
            let cq = work.column(q);
            let alpha = cp.norm_squared();
            let beta = cq.norm_squared();
            let gamma = cp.dot(cq);
            if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                continue;
            }
            rotated = true;
            let zeta = (beta - alpha) / (2.0 * gamma);
            let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
            let c = 1.0 / (1.0 + t * t).sqrt();
            let s = c * t;
            work.set_column(p, cp.scale(c) - cq.scale(s));
            work.set_column(q, cp.scale(s) + cq.scale(c));
            let vp = v.column(p);
            let vq = v.column(q);
            v.set_column(p, vp.scale(c) - vq.scale(s));
            v.set_column(q, vp.scale(s) + vq.scale(c));
        }
        if !rotated {
            break;
        }
    }

    let mut order = [0usize, 1, 2];
    let norms = [work.column(0).norm(), work.column(1).norm(), work.column(2).norm()];
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));

    let mut v_sorted = Mat3::from_columns(v.column(order[0]), v.column(order[1]), v.column(order[2]));
    let mut a_cols = [work.column(order[0]), work.column(order[1]), work.column(order[2])];
    if v_sorted.determinant() < 0.0 {
        v_sorted.set_column(2, -v_sorted.column(2));
        a_cols[2] = -a_cols[2];
    }

    let s0 = a_cols[0].norm();
    let s1 = a_cols[1].norm();
    let tiny = f64::EPSILON * 64.0 * s0.max(f64::MIN_POSITIVE);

    let u0 = if s0 > 0.0 { a_cols[0].scale(1.0 / s0) } else { Vec3::new(1.0, 0.0, 0.0) };
    let u1 = if s1 > tiny {
        let g = a_cols[1] - u0.scale(u0.dot(a_cols[1]));
        let gn = g.norm();
        if gn > tiny {
            g.scale(1.0 / gn)
        } else {
            any_orthogonal(u0)
        }
    } else {
        any_orthogonal(u0)
    };
    let u2 = u0.cross(u1);
    let s2 = u2.dot(a_cols[2]);

    SignedSvd { u: Mat3::from_columns(u0, u1, u2), s: [s0, s1, s2], v: v_sorted }
}

fn any_orthogonal(u: Vec3) -> Vec3 {
    let pick = if u.x.abs() <= u.y.abs() && u.x.abs() <= u.z.abs() {
        Vec3::new(1.0, 0.0, 0.0)
    } else if u.y.abs() <= u.z.abs() {
        Vec3::new(0.0, 1.0, 0.0)
    } else {
        Vec3::new(0.0, 0.0, 1.0)
    };
    let w = pick - u.scale(u.dot(pick));
    w.scale(1.0 / w.norm())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reconstruct(svd: &SignedSvd) -> Mat3 {
        let d = Mat3([[svd.s[0], 0.0, 0.0], [0.0, svd.s[1], 0.0], [0.0, 0.0, svd.s[2]]]);
        svd.u * d * svd.v.transpose()
    }

    fn assert_close(a: &Mat3, b: &Mat3, tol: f64) {
        for i in 0..3 {
            for j in 0..3 {
                assert!((a.0[i][j] - b.0[i][j]).abs() < tol, "{a:?} vs {b:?}");
            }
        }
    }

    #[test]
    fn svd_reconstructs_general_matrix() {
        let a = Mat3([[2.0, -1.0, 0.5], [0.3, 4.0, 1.0], [-2.0, 0.1, 3.0]]);
        let svd = svd3(&a);
        assert_close(&reconstruct(&svd), &a, 1e-12);
        assert!(svd.u.orthonormality_error() < 1e-12);
        assert!(svd.v.orthonormality_error() < 1e-12);
        assert!((svd.u.determinant() - 1.0).abs() < 1e-12);
        assert!((svd.v.determinant() - 1.0).abs() < 1e-12);
        assert!(svd.s[0] >= svd.s[1] && svd.s[1] >= svd.s[2].abs());
    }

    #[test]
    fn svd_negative_determinant_carries_sign_in_last_value() {
        let a = Mat3([[1.0, 0.0, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, -3.0]]);
        let svd = svd3(&a);
        assert_close(&reconstruct(&svd), &a, 1e-12);
        assert!(svd.s[2] < 0.0);
        assert!((svd.s[2] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn svd_rank_one_and_zero() {
        let a = Mat3([[1.0, 2.0, 3.0], [2.0, 4.0, 6.0], [3.0, 6.0, 9.0]]);
        let svd = svd3(&a);
        assert_close(&reconstruct(&svd), &a, 1e-11);
        assert!(svd.u.orthonormality_error() < 1e-12);

        let z = svd3(&Mat3::ZERO);
        assert_eq!(z.s, [0.0, 0.0, 0.0]);
        assert!(z.u.orthonormality_error() < 1e-12);
    }

    #[test]
    fn rotation_is_orthonormal() {
        let r = Mat3::rotation(Vec3::new(1.0, 2.0, -0.5), 1.1);
        assert!(r.orthonormality_error() < 1e-14);
        assert!((r.determinant() - 1.0).abs() < 1e-14);
    }
}
