//! Linear Lie groups GL(n), SO(n), SL(n) and their Lie algebras.
//!
//! [`GroupElement`] and [`AlgebraElement`] pair a matrix with the family it
//! was validated against. Public constructors check membership at an
//! explicit tolerance; values derived inside the crate from valid inputs
//! (products, exponentials of algebra elements, logarithms of group
//! elements) are trusted without re-validation.

use alloc::format;

use crate::expm::mat_exp;
use crate::matrix::inverse_general;
use crate::rng::NormalSampler;
use crate::{Error, Result, SquareMatrix};

/// Membership tolerance for values the library constructs itself.
pub const CONSTRUCTED_TOL: f64 = 1e-9;
/// Membership tolerance for user-supplied data such as printed initial
/// conditions (four-decimal rotation matrices are orthogonal to ~1e-4).
pub const DATA_TOL: f64 = 5e-4;
/// Default guard band below π for the closed-form SO(3) logarithm.
pub const DEFAULT_ANGLE_GUARD: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GroupKind {
    /// General linear group: invertible matrices.
    GL,
    /// Special orthogonal group: `XXᵀ = Iₙ`, `det X = 1`.
    SO,
    /// Special linear group: `det X = 1`.
    SL,
}

impl GroupKind {
    pub fn name(&self) -> &'static str {
        match self {
            GroupKind::GL => "GL",
            GroupKind::SO => "SO",
            GroupKind::SL => "SL",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GroupFamily {
    kind: GroupKind,
    n: usize,
}

impl GroupFamily {
    pub fn new(kind: GroupKind, n: usize) -> Result<Self> {
        let min = match kind {
            GroupKind::GL => 1,
            GroupKind::SO | GroupKind::SL => 2,
        };
        if n < min {
            return Err(Error::domain(format!(
                "{}({n}) needs n >= {min}",
                kind.name()
            )));
        }
        Ok(GroupFamily { kind, n })
    }

    pub fn so3() -> Self {
        GroupFamily {
            kind: GroupKind::SO,
            n: 3,
        }
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn is_so3(&self) -> bool {
        self.kind == GroupKind::SO && self.n == 3
    }

    fn check_dim(&self, m: &SquareMatrix) -> Result<()> {
        if m.dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: m.dim(),
            });
        }
        Ok(())
    }
}

impl core::fmt::Display for GroupFamily {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}({})", self.kind.name(), self.n)
    }
}

/// Defining-equation defect of `x` for `family`: `‖XXᵀ − I‖` for SO,
/// `|det X − 1|` for SL, and `0` for GL.
pub fn membership_defect(x: &SquareMatrix, family: GroupFamily) -> Result<f64> {
    family.check_dim(x)?;
    Ok(match family.kind {
        GroupKind::GL => 0.0,
        GroupKind::SO => (&(x * &x.transpose()) - &SquareMatrix::identity(family.n)).operator_norm(),
        GroupKind::SL => (x.determinant() - 1.0).abs(),
    })
}

pub fn is_in_group(x: &SquareMatrix, family: GroupFamily, tol: f64) -> Result<bool> {
    family.check_dim(x)?;
    Ok(match family.kind {
        GroupKind::GL => x.determinant().abs() > tol,
        GroupKind::SO => membership_defect(x, family)? <= tol && x.determinant() > 0.0,
        GroupKind::SL => membership_defect(x, family)? <= tol,
    })
}

/// Defect of `a` against the algebra's defining equation:
/// `‖A + Aᵀ‖` for so(n), `|tr A|` for sl(n), `0` for gl(n).
pub fn algebra_defect(a: &SquareMatrix, family: GroupFamily) -> Result<f64> {
    family.check_dim(a)?;
    Ok(match family.kind {
        GroupKind::GL => 0.0,
        GroupKind::SO => (a + &a.transpose()).operator_norm(),
        GroupKind::SL => a.trace().abs(),
    })
}

pub fn is_in_algebra(a: &SquareMatrix, family: GroupFamily, tol: f64) -> Result<bool> {
    Ok(algebra_defect(a, family)? <= tol)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement {
    family: GroupFamily,
    mat: SquareMatrix,
}

impl GroupElement {
    pub fn new(family: GroupFamily, mat: SquareMatrix, tol: f64) -> Result<Self> {
        if !is_in_group(&mat, family, tol)? {
            return Err(Error::domain(format!("matrix is not in {family} at tolerance {tol}")));
        }
        Ok(GroupElement { family, mat })
    }

    pub fn identity(family: GroupFamily) -> Self {
        GroupElement {
            family,
            mat: SquareMatrix::identity(family.n),
        }
    }

    pub(crate) fn trusted(family: GroupFamily, mat: SquareMatrix) -> Self {
        debug_assert_eq!(family.n, mat.dim());
        GroupElement { family, mat }
    }

    pub fn family(&self) -> GroupFamily {
        self.family
    }

    pub fn mat(&self) -> &SquareMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> SquareMatrix {
        self.mat
    }

    pub fn compose(&self, other: &GroupElement) -> Result<GroupElement> {
        if self.family != other.family {
            return Err(Error::FamilyMismatch);
        }
        Ok(GroupElement::trusted(self.family, &self.mat * &other.mat))
    }

    pub fn inverse(&self) -> Result<GroupElement> {
        Ok(GroupElement::trusted(self.family, inverse_general(&self.mat)?))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement {
    family: GroupFamily,
    mat: SquareMatrix,
}

impl AlgebraElement {
    pub fn new(family: GroupFamily, mat: SquareMatrix, tol: f64) -> Result<Self> {
        if !is_in_algebra(&mat, family, tol)? {
            return Err(Error::domain(format!(
                "matrix is not in the Lie algebra of {family} at tolerance {tol}"
            )));
        }
        Ok(AlgebraElement { family, mat })
    }

    pub fn zero(family: GroupFamily) -> Self {
        AlgebraElement {
            family,
            mat: SquareMatrix::zeros(family.n),
        }
    }

    pub(crate) fn trusted(family: GroupFamily, mat: SquareMatrix) -> Self {
        debug_assert_eq!(family.n, mat.dim());
        AlgebraElement { family, mat }
    }

    pub fn family(&self) -> GroupFamily {
        self.family
    }

    pub fn mat(&self) -> &SquareMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> SquareMatrix {
        self.mat
    }

    /// `exp(A)`, which lies in the group of the same family.
    pub fn exp(&self) -> Result<GroupElement> {
        Ok(GroupElement::trusted(self.family, mat_exp(&self.mat)?))
    }
}

/// Projection onto the Lie algebra: `(A − Aᵀ)/2` for so(n),
/// `A − (tr A / n) Iₙ` for sl(n), identity for gl(n).
pub fn project_algebra(a: &SquareMatrix, family: GroupFamily) -> Result<AlgebraElement> {
    family.check_dim(a)?;
    let mat = match family.kind {
        GroupKind::GL => a.clone(),
        GroupKind::SO => (a - &a.transpose()).scale(0.5),
        GroupKind::SL => {
            let shift = a.trace() / family.n as f64;
            a - &SquareMatrix::identity(family.n).scale(shift)
        }
    };
    Ok(AlgebraElement::trusted(family, mat))
}

/// The anti-symmetric projection `π_a(A) = (A − Aᵀ)/2`.
pub fn antisymmetric_part(a: &SquareMatrix) -> SquareMatrix {
    (a - &a.transpose()).scale(0.5)
}

/// Skew-symmetric matrix with `skew3(v) w = v × w`.
pub fn skew3(v: [f64; 3]) -> AlgebraElement {
    let [a, b, c] = v;
    AlgebraElement::trusted(
        GroupFamily::so3(),
        SquareMatrix::from_rows([[0.0, -c, b], [c, 0.0, -a], [-b, a, 0.0]]),
    )
}

/// Inverse of [`skew3`] applied to the skew-symmetric part of `a`.
pub fn unskew3(a: &SquareMatrix) -> Result<[f64; 3]> {
    if a.dim() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: a.dim(),
        });
    }
    let sym = (a + &a.transpose()).max_abs() * 0.5;
    if sym > CONSTRUCTED_TOL * a.max_abs().max(1.0) {
        return Err(Error::domain(format!(
            "matrix has a symmetric part of size {sym}"
        )));
    }
    Ok([
        0.5 * (a[(2, 1)] - a[(1, 2)]),
        0.5 * (a[(0, 2)] - a[(2, 0)]),
        0.5 * (a[(1, 0)] - a[(0, 1)]),
    ])
}

fn require_so3(r: &GroupElement) -> Result<()> {
    if !r.family.is_so3() {
        return Err(Error::domain(format!(
            "expected an element of SO(3), got {}",
            r.family
        )));
    }
    Ok(())
}

/// Angle of the axis-angle decomposition, `arccos((tr R − 1)/2)` in `[0, π]`.
pub fn rotation_angle(r: &GroupElement) -> Result<f64> {
    require_so3(r)?;
    Ok(angle_from_trace(r.mat.trace()))
}

pub(crate) fn angle_from_trace(trace: f64) -> f64 {
    libm::acos(((trace - 1.0) * 0.5).clamp(-1.0, 1.0))
}

/// `θ / sin θ`, with its Taylor expansion near zero.
pub(crate) fn theta_over_sin(theta: f64) -> f64 {
    if theta < 1e-4 {
        let t2 = theta * theta;
        1.0 + t2 / 6.0 + 7.0 * t2 * t2 / 360.0
    } else {
        theta / libm::sin(theta)
    }
}

/// Closed-form SO(3) logarithm `log R = (θ / sin θ) π_a(R)`.
pub fn log_so3_closed_form(r: &GroupElement) -> Result<AlgebraElement> {
    log_so3_closed_form_with_guard(r, DEFAULT_ANGLE_GUARD)
}

pub fn log_so3_closed_form_with_guard(r: &GroupElement, guard: f64) -> Result<AlgebraElement> {
    require_so3(r)?;
    let theta = angle_from_trace(r.mat.trace());
    if theta >= core::f64::consts::PI - guard {
        return Err(Error::NearBranchCut { angle: theta });
    }
    Ok(AlgebraElement::trusted(
        r.family,
        antisymmetric_part(&r.mat).scale(theta_over_sin(theta)),
    ))
}

/// `N = exp(skew3(v))` with the components of `v` drawn i.i.d. from
/// `Normal(0, σ²)`. Always draws three normals so the stream position does
/// not depend on `sigma`.
pub fn random_rotation(sigma: f64, sampler: &mut NormalSampler) -> GroupElement {
    let v = [
        sigma * sampler.standard_normal(),
        sigma * sampler.standard_normal(),
        sigma * sampler.standard_normal(),
    ];
    if sigma == 0.0 {
        return GroupElement::identity(GroupFamily::so3());
    }
    skew3(v).exp().expect("exponential of a finite 3x3 matrix")
}

pub fn random_rotation_seeded(sigma: f64, seed: u64) -> GroupElement {
    random_rotation(sigma, &mut NormalSampler::new(seed))
}

/// `‖π(X⁻¹V) − X⁻¹V‖`, where π projects onto the Lie algebra; zero exactly
/// when `V` is tangent to the group at `X`.
pub fn tangency_defect(x: &GroupElement, v: &SquareMatrix) -> Result<f64> {
    x.mat.check_same(v)?;
    let w = x.mat.solve_left(v)?;
    let p = project_algebra(&w, x.family)?;
    Ok((p.mat() - &w).operator_norm())
}

/// Nearest group element in the sense of the family's retraction: the
/// orthogonal polar factor for SO, determinant normalisation for SL, and
/// the matrix itself for GL.
pub fn project_to_group(x: &SquareMatrix, family: GroupFamily, tol: f64) -> Result<SquareMatrix> {
    family.check_dim(x)?;
    let n = family.n;
    match family.kind {
        GroupKind::GL => {
            inverse_general(x)?;
            Ok(x.clone())
        }
        GroupKind::SL => {
            let det = x.determinant();
            if det <= 0.0 {
                return Err(Error::domain("SL projection needs a positive determinant"));
            }
            Ok(x.scale(libm::pow(det, -1.0 / n as f64)))
        }
        GroupKind::SO => {
            if x.determinant() <= 0.0 {
                return Err(Error::domain("SO projection needs a positive determinant"));
            }
            // Newton iteration for the orthogonal polar factor
            let mut q = x.clone();
            for _ in 0..100 {
                let next = (&q + &inverse_general(&q)?.transpose()).scale(0.5);
                let step = (&next - &q).max_abs();
                q = next;
                if step <= tol {
                    return Ok(q);
                }
            }
            Err(Error::NonConvergence {
                what: "polar decomposition",
                iterations: 100,
            })
        }
    }
}
