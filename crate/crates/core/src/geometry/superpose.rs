//! Least-squares rigid superposition (Kabsch) and plain RMSD.

use super::linalg::{svd3, Mat3, Vec3};
use super::GeometryError;
use serde::{Deserialize, Serialize};

/// `x ↦ rotation · x + translation`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RigidTransform {
    pub rotation: Mat3,
    pub translation: Vec3,
}

impl RigidTransform {
    pub const IDENTITY: RigidTransform = RigidTransform { rotation: Mat3::IDENTITY, translation: Vec3::ZERO };

    pub fn apply(&self, p: Vec3) -> Vec3 {
        self.rotation.apply(p) + self.translation
    }

    pub fn apply_all(&self, points: &[Vec3]) -> Vec<Vec3> {
        points.iter().map(|&p| self.apply(p)).collect()
    }

    /// `self` after `first`.
    pub fn compose(&self, first: &RigidTransform) -> RigidTransform {
        RigidTransform {
            rotation: self.rotation * first.rotation,
            translation: self.rotation.apply(first.translation) + self.translation,
        }
    }

    pub fn is_proper_rotation(&self, tol: f64) -> bool {
        self.rotation.orthonormality_error() <= tol && (self.rotation.determinant() - 1.0).abs() <= tol
    }
}

/// Outcome of [`kabsch`].
#[derive(Debug, Clone, Copy)]
pub struct Superposition {
    pub transform: RigidTransform,
    /// RMSD between the transformed mobile set and the target set.
    pub rmsd: f64,
    /// Set when the mobile points are (nearly) collinear or coincident, so the rotation is
    /// not unique. The returned rotation is still optimal.
    pub degenerate: bool,
}

const DEGENERACY_RATIO: f64 = 1e-10;

/// Finds the rigid motion minimising `Σ‖R·p + t − q‖²` over corresponding points.
///
/// `mobile` is moved onto `target`.
pub fn kabsch(mobile: &[Vec3], target: &[Vec3]) -> Result<Superposition, GeometryError> {
    if mobile.len() != target.len() {
        return Err(GeometryError::LengthMismatch { left: mobile.len(), right: target.len() });
    }
    if mobile.len() < 3 {
        return Err(GeometryError::TooFewPoints { needed: 3, got: mobile.len() });
    }

    let cm = Vec3::centroid(mobile);
    let ct = Vec3::centroid(target);

    // H = Σ (p − p̄)(q − q̄)ᵀ
    let mut h = [[0.0; 3]; 3];
    for (p, q) in mobile.iter().zip(target) {
        let a = *p - cm;
        let b = *q - ct;
        for i in 0..3 {
            for j in 0..3 {
                h[i][j] += a[i] * b[j];
            }
        }
    }
    let h = Mat3(h);
    let svd = svd3(&h);

    // With U, V ∈ SO(3) and the sign folded into s[2], R = V·Uᵀ is already reflection-free.
    let rotation = svd.v * svd.u.transpose();
    let translation = ct - rotation.apply(cm);
    let transform = RigidTransform { rotation, translation };

    let degenerate = svd.s[0] == 0.0 || svd.s[1] <= DEGENERACY_RATIO * svd.s[0];
    let moved = transform.apply_all(mobile);
    let rmsd = rmsd(&moved, target)?;
    Ok(Superposition { transform, rmsd, degenerate })
}

/// Root-mean-square deviation without any fitting.
pub fn rmsd(a: &[Vec3], b: &[Vec3]) -> Result<f64, GeometryError> {
    Ok((sum_squared_deviation(a, b)? / a.len() as f64).sqrt())
}

/// `Σ‖aᵢ − bᵢ‖²`; both sides must be non-empty and of equal length.
pub fn sum_squared_deviation(a: &[Vec3], b: &[Vec3]) -> Result<f64, GeometryError> {
    if a.len() != b.len() {
        return Err(GeometryError::LengthMismatch { left: a.len(), right: b.len() });
    }
    if a.is_empty() {
        return Err(GeometryError::TooFewPoints { needed: 1, got: 0 });
    }
    Ok(a.iter().zip(b).map(|(p, q)| p.distance_squared(*q)).sum())
}
