//! su(2) model of Euclidean 3-space.
//!
//! The basis is
//!
//! ```text
//! e1 = (1/2) [[0, i], [i, 0]],   e2 = (1/2) [[0, -1], [1, 0]],   e3 = (1/2) [[i, 0], [0, -i]],
//! ```
//!
//! orthonormal for the inner product `<X, Y> = -2 tr(XY)` and satisfying
//! `[e1, e2] = e3` cyclically, so the matrix bracket corresponds to the vector
//! cross product and `Ad` acts by rotations.

use num_complex::Complex64;
use thiserror::Error;

/// Tolerance for membership checks (unitarity, anti-Hermitian/trace residuals),
/// measured in max-entry norm. Loop-group truncation noise in this crate stays
/// around 1e-9 at the default truncation order, so 1e-8 separates it cleanly
/// from genuine loss of the reality condition.
pub const SU2_TOL: f64 = 1e-8;

type C64 = Complex64;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[derive(Debug, Error, PartialEq)]
pub enum AlgebraError {
    /// Anti-Hermitian or trace residual above [`SU2_TOL`]; signals upstream
    /// loss of the reality structure.
    #[error("matrix is not in su(2): residual {residual:.3e}")]
    NotInSu2 { residual: f64 },
    /// `F^* F - I` residual above [`SU2_TOL`].
    #[error("frame is not unitary: residual {residual:.3e}")]
    NotUnitary { residual: f64 },
}

/// Point or tangent vector of Euclidean 3-space.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scale(self, s: f64) -> Vec3 {
        Vec3::new(s * self.x, s * self.y, s * self.z)
    }

    /// Scalar triple product det(a, b, c).
    pub fn det3(a: Vec3, b: Vec3, c: Vec3) -> f64 {
        a.dot(b.cross(c))
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl std::ops::Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl std::ops::Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl std::ops::Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        self.scale(-1.0)
    }
}

/// Complex 2x2 matrix, row major: [[a, b], [c, d]].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2C {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
}

impl Mat2C {
    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Mat2C { a, b, c, d }
    }

    pub fn zero() -> Self {
        Mat2C::new(c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0))
    }

    pub fn identity() -> Self {
        Mat2C::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0))
    }

    pub fn trace(&self) -> C64 {
        self.a + self.d
    }

    pub fn det(&self) -> C64 {
        self.a * self.d - self.b * self.c
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Mat2C {
        Mat2C::new(self.a.conj(), self.c.conj(), self.b.conj(), self.d.conj())
    }

    pub fn scale(&self, s: C64) -> Mat2C {
        Mat2C::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }

    pub fn scale_re(&self, s: f64) -> Mat2C {
        self.scale(c(s, 0.0))
    }

    /// Exact inverse via the adjugate; caller guarantees det away from zero.
    pub fn inverse(&self) -> Mat2C {
        let det = self.det();
        Mat2C::new(self.d / det, -self.b / det, -self.c / det, self.a / det)
    }

    pub fn commutator(&self, o: &Mat2C) -> Mat2C {
        *self * *o - *o * *self
    }

    /// Max-entry absolute value.
    pub fn norm_max(&self) -> f64 {
        self.a
            .norm()
            .max(self.b.norm())
            .max(self.c.norm())
            .max(self.d.norm())
    }

    pub fn is_finite(&self) -> bool {
        self.a.is_finite() && self.b.is_finite() && self.c.is_finite() && self.d.is_finite()
    }

    /// Exponential of a traceless matrix: by Cayley-Hamilton `A^2 = -det(A) I`,
    /// so `exp(A) = cos(t) I + sinc(t) A` with `t^2 = det(A)`.
    pub fn exp_traceless(&self) -> Mat2C {
        let t = self.det().sqrt();
        let sinc = if t.norm() < 1e-12 {
            c(1.0, 0.0) - t * t / c(6.0, 0.0)
        } else {
            t.sin() / t
        };
        let cos = t.cos();
        Mat2C::new(
            cos + sinc * self.a,
            sinc * self.b,
            sinc * self.c,
            cos + sinc * self.d,
        )
    }
}

impl std::ops::Add for Mat2C {
    type Output = Mat2C;
    fn add(self, o: Mat2C) -> Mat2C {
        Mat2C::new(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)
    }
}

impl std::ops::Sub for Mat2C {
    type Output = Mat2C;
    fn sub(self, o: Mat2C) -> Mat2C {
        Mat2C::new(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)
    }
}

impl std::ops::Mul for Mat2C {
    type Output = Mat2C;
    fn mul(self, o: Mat2C) -> Mat2C {
        Mat2C::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}

impl std::ops::Neg for Mat2C {
    type Output = Mat2C;
    fn neg(self) -> Mat2C {
        self.scale_re(-1.0)
    }
}

/// Basis vector e1 = (1/2)[[0, i], [i, 0]].
pub fn e1() -> Mat2C {
    Mat2C::new(c(0.0, 0.0), c(0.0, 0.5), c(0.0, 0.5), c(0.0, 0.0))
}

/// Basis vector e2 = (1/2)[[0, -1], [1, 0]].
pub fn e2() -> Mat2C {
    Mat2C::new(c(0.0, 0.0), c(-0.5, 0.0), c(0.5, 0.0), c(0.0, 0.0))
}

/// Basis vector e3 = (1/2)[[i, 0], [0, -i]].
pub fn e3() -> Mat2C {
    Mat2C::new(c(0.0, 0.5), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -0.5))
}

/// Inner product `<X, Y> = -2 tr(XY)`.
pub fn inner(x: &Mat2C, y: &Mat2C) -> f64 {
    (-2.0 * (*x * *y).trace()).re
}

/// Identification R^3 -> su(2), v |-> v.x e1 + v.y e2 + v.z e3.
pub fn vec_to_su2(v: Vec3) -> Mat2C {
    Mat2C::new(
        c(0.0, 0.5 * v.z),
        c(-0.5 * v.y, 0.5 * v.x),
        c(0.5 * v.y, 0.5 * v.x),
        c(0.0, -0.5 * v.z),
    )
}

/// Residual of membership in su(2): max-entry norm of the Hermitian part plus
/// the trace magnitude.
pub fn su2_residual(m: &Mat2C) -> f64 {
    let herm = (*m + m.dagger()).scale_re(0.5);
    herm.norm_max() + m.trace().norm() * 0.5
}

/// Inverse identification su(2) -> R^3. Errors when the residual against the
/// anti-Hermitian traceless form exceeds [`SU2_TOL`].
pub fn su2_to_vec(m: &Mat2C) -> Result<Vec3, AlgebraError> {
    let residual = su2_residual(m);
    if !residual.is_finite() || residual > SU2_TOL {
        return Err(AlgebraError::NotInSu2 { residual });
    }
    Ok(su2_to_vec_unchecked(m))
}

/// Component extraction `v_i = <m, e_i>` without the membership check.
pub fn su2_to_vec_unchecked(m: &Mat2C) -> Vec3 {
    Vec3::new(inner(m, &e1()), inner(m, &e2()), inner(m, &e3()))
}

/// `F^* F - I` residual in max-entry norm.
pub fn unitarity_residual(f: &Mat2C) -> f64 {
    (f.dagger() * *f - Mat2C::identity()).norm_max()
}

/// Rotation `v |-> Ad_F v = F v F^{-1}` under the su(2) identification.
/// Errors when `F` fails the unitarity check at [`SU2_TOL`].
pub fn adjoint_rotate(f: &Mat2C, v: Vec3) -> Result<Vec3, AlgebraError> {
    let residual = unitarity_residual(f);
    if !residual.is_finite() || residual > SU2_TOL {
        return Err(AlgebraError::NotUnitary { residual });
    }
    let m = *f * vec_to_su2(v) * f.inverse();
    Ok(su2_to_vec_unchecked(&m))
}
