//! Invariant metrics on the unit disc and the unit polydisc `U^n`.
//!
//! Everything here is closed form. Points of `U^n` are validated once at
//! construction ([`PolydiscPoint::new`]); the distance functions then assume
//! interior inputs.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

/// Coordinates with modulus at or above `1 - INTERIOR_MARGIN` are rejected.
pub const INTERIOR_MARGIN: f64 = 1e-14;

/// Largest value below 1.0; pseudo-hyperbolic distances are clamped to it.
pub const BELOW_ONE: f64 = 1.0 - f64::EPSILON / 2.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("a point of U^n needs at least one coordinate")]
    Empty,
    #[error("coordinate {index} is not finite")]
    NotFinite { index: usize },
    #[error("coordinate {index} has modulus {modulus}, outside the open unit disc")]
    OutsideDisc { index: usize, modulus: f64 },
    #[error("direction must have a nonzero component")]
    ZeroDirection,
}

/// A point of the open unit polydisc.
#[derive(Debug, Clone, PartialEq)]
pub struct PolydiscPoint {
    coords: Vec<Complex64>,
}

/// Serialized as a list of `[re, im]` pairs.
impl Serialize for PolydiscPoint {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.coords.iter().map(|c| [c.re, c.im]))
    }
}

impl PolydiscPoint {
    pub fn new(coords: Vec<Complex64>) -> Result<Self, GeometryError> {
        if coords.is_empty() {
            return Err(GeometryError::Empty);
        }
        for (index, c) in coords.iter().enumerate() {
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(GeometryError::NotFinite { index });
            }
            let modulus = c.norm();
            if modulus >= 1.0 - INTERIOR_MARGIN {
                return Err(GeometryError::OutsideDisc { index, modulus });
            }
        }
        Ok(Self { coords })
    }

    /// Builds a point from `(re, im)` pairs.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self, GeometryError> {
        Self::new(pairs.iter().map(|&(re, im)| Complex64::new(re, im)).collect())
    }

    /// Builds a point with real coordinates.
    pub fn from_reals(xs: &[f64]) -> Result<Self, GeometryError> {
        Self::new(xs.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn origin(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be at least 1");
        Self {
            coords: vec![Complex64::new(0.0, 0.0); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<Complex64> {
        self.coords
    }

    /// `|||z||| = max_j |z_j|`.
    pub fn sup_norm(&self) -> f64 {
        sup_norm(&self.coords)
    }

    /// The point `r·z`; `r` must lie in `[0, 1]`.
    pub fn dilate(&self, r: f64) -> Self {
        assert!((0.0..=1.0).contains(&r), "dilation factor {r} outside [0, 1]");
        Self {
            coords: self.coords.iter().map(|c| c * r).collect(),
        }
    }
}

/// A nonzero vector of `C^n`, used as a tangent direction.
#[derive(Debug, Clone, PartialEq)]
pub struct Direction {
    components: Vec<Complex64>,
}

impl Direction {
    pub fn new(components: Vec<Complex64>) -> Result<Self, GeometryError> {
        if components.is_empty() {
            return Err(GeometryError::Empty);
        }
        for (index, c) in components.iter().enumerate() {
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(GeometryError::NotFinite { index });
            }
        }
        if components.iter().all(|c| c.norm_sqr() == 0.0) {
            return Err(GeometryError::ZeroDirection);
        }
        Ok(Self { components })
    }

    /// The coordinate direction `e_j` (zero based).
    pub fn unit(dim: usize, j: usize) -> Self {
        assert!(j < dim);
        let mut components = vec![Complex64::new(0.0, 0.0); dim];
        components[j] = Complex64::new(1.0, 0.0);
        Self { components }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Complex64] {
        &self.components
    }
}

/// Maximum coordinate modulus. Accepts any tuple, not just interior points.
pub fn sup_norm(z: &[Complex64]) -> f64 {
    z.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Pseudo-hyperbolic distance `|(z − w)/(1 − z·conj(w))|` on the unit disc.
pub fn rho(z: Complex64, w: Complex64) -> Result<f64, GeometryError> {
    for (index, c) in [z, w].into_iter().enumerate() {
        if !c.re.is_finite() || !c.im.is_finite() {
            return Err(GeometryError::NotFinite { index });
        }
        let modulus = c.norm();
        if modulus >= 1.0 {
            return Err(GeometryError::OutsideDisc { index, modulus });
        }
    }
    Ok(pseudo_hyperbolic(z, w))
}

/// Unchecked pseudo-hyperbolic distance for inputs already known to be
/// interior. Exactly symmetric in its arguments; clamped to [`BELOW_ONE`]
/// when rounding would push it to 1.
pub fn pseudo_hyperbolic(z: Complex64, w: Complex64) -> f64 {
    let num = (z - w).norm();
    if num == 0.0 {
        return 0.0;
    }
    let den = (Complex64::new(1.0, 0.0) - z * w.conj()).norm();
    (num / den).min(BELOW_ONE)
}

/// `1 − ρ(z,w)²` evaluated as `(1 − |z|²)(1 − |w|²)/|1 − z·conj(w)|²`,
/// which keeps full relative precision when `ρ` is close to 1.
pub fn one_minus_rho_sq(z: Complex64, w: Complex64) -> f64 {
    let den = (Complex64::new(1.0, 0.0) - z * w.conj()).norm_sqr();
    one_minus_abs_sq(z) * one_minus_abs_sq(w) / den
}

fn one_minus_abs_sq(z: Complex64) -> f64 {
    let r = z.norm();
    (1.0 - r) * (1.0 + r)
}

/// `artanh(t) = ½·log((1+t)/(1−t))` on `[0, 1)`.
pub fn artanh(t: f64) -> f64 {
    0.5 * (t.ln_1p() - (-t).ln_1p())
}

/// Hyperbolic distance `artanh(ρ(z,w))` on the disc, computed from
/// [`one_minus_rho_sq`] so that it stays finite and accurate near the
/// boundary. Exactly symmetric in its arguments.
pub fn disc_distance(z: Complex64, w: Complex64) -> f64 {
    let r = pseudo_hyperbolic(z, w);
    if r == 0.0 {
        return 0.0;
    }
    if r < 0.5 {
        return artanh(r);
    }
    // artanh(r) = log(1 + r) − ½·log(1 − r²)
    r.ln_1p() - 0.5 * one_minus_rho_sq(z, w).ln()
}

/// Componentwise automorphism `φ_a(w)_j = (w_j − a_j)/(1 − conj(a_j)·w_j)`.
///
/// Fails only if rounding pushes an image coordinate onto the interior
/// margin, which needs both points within about `1e-7` of the boundary.
///
/// # Panics
/// If the dimensions differ.
pub fn moebius(a: &PolydiscPoint, w: &PolydiscPoint) -> Result<PolydiscPoint, GeometryError> {
    PolydiscPoint::new(moebius_coords(a.coords(), w.coords()))
}

/// Raw componentwise Möbius map without interior validation.
pub fn moebius_coords(a: &[Complex64], w: &[Complex64]) -> Vec<Complex64> {
    assert_eq!(a.len(), w.len(), "dimension mismatch");
    a.iter()
        .zip(w)
        .map(|(&a, &w)| (w - a) / (Complex64::new(1.0, 0.0) - a.conj() * w))
        .collect()
}

/// Kobayashi distance `k_{U^n}(z, w) = artanh(|||φ_z(w)|||)`.
///
/// Evaluated as the maximum over coordinates of [`disc_distance`], which is
/// the same quantity because `artanh` is increasing.
///
/// # Panics
/// If the dimensions differ.
pub fn kobayashi(z: &PolydiscPoint, w: &PolydiscPoint) -> f64 {
    kobayashi_coords(z.coords(), w.coords())
}

pub fn kobayashi_coords(z: &[Complex64], w: &[Complex64]) -> f64 {
    assert_eq!(z.len(), w.len(), "dimension mismatch");
    z.iter()
        .zip(w)
        .map(|(&a, &b)| disc_distance(a, b))
        .fold(0.0, f64::max)
}

/// Bergman metric `H_z(u, conj(v)) = Σ u_j·conj(v_j)/(1 − |z_j|²)²`.
///
/// # Panics
/// If the dimensions differ.
pub fn bergman_metric(z: &PolydiscPoint, u: &Direction, v: &Direction) -> Complex64 {
    assert_eq!(z.dim(), u.dim(), "dimension mismatch");
    assert_eq!(z.dim(), v.dim(), "dimension mismatch");
    z.coords()
        .iter()
        .zip(u.components().iter().zip(v.components()))
        .map(|(zj, (uj, vj))| {
            let w = one_minus_abs_sq(*zj);
            uj * vj.conj() / (w * w)
        })
        .sum()
}
