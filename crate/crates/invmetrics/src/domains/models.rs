//! Model domains: the disc, the ball, polydiscs, annuli, diagonal
//! ellipsoids, the Reinhardt domain `D_alpha` and the cap models.
//!
//! Polydiscs and `D_alpha` carry max-type defining functions and are exempt
//! from the C^2 operations (Levi forms, convexity margins); they are used
//! for membership, closed forms and sup-norm grids only.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::defining::{
    AnnulusDefining, BallDefining, DefiningFunction, DynDefining, EllipsoidDefining,
    HalfSpaceCapDefining,
};
use crate::error::Error;
use crate::Result;

/// Tag identifying a model domain, kept alongside the defining function so
/// closed forms and exact membership predicates can dispatch on it.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelDomain {
    UnitDisc,
    Ball { n: usize },
    Polydisc { n: usize },
    /// Normalized to outer radius 1.
    Annulus { r_minus: f64 },
    Ellipsoid { coeffs: Vec<f64>, exponents: Vec<u32> },
    ReinhardtDAlpha { alpha: f64 },
    HalfSpaceCap { kind: CapKind },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CapKind {
    Flat,
    Saddle,
    Bowl,
}

impl ModelDomain {
    /// Independent membership predicate (used to cross-check `contains`).
    pub fn contains_analytic(&self, z: &[Complex64]) -> bool {
        match self {
            ModelDomain::UnitDisc => z[0].norm() < 1.0,
            ModelDomain::Ball { .. } => crate::linalg::norm(z) < 1.0,
            ModelDomain::Polydisc { .. } => z.iter().all(|c| c.norm() < 1.0),
            ModelDomain::Annulus { r_minus } => {
                let m = z[0].norm();
                *r_minus < m && m < 1.0
            }
            ModelDomain::Ellipsoid { coeffs, exponents } => {
                z.iter()
                    .zip(coeffs.iter().zip(exponents))
                    .map(|(zj, (&a, &p))| a * zj.norm_sqr().powi(p as i32))
                    .sum::<f64>()
                    < 1.0
            }
            ModelDomain::ReinhardtDAlpha { alpha } => {
                z[0].norm() < 1.0 && z[1].norm() < 1.0 && (z[0] * z[1]).norm() < *alpha
            }
            ModelDomain::HalfSpaceCap { kind } => {
                let cap = match kind {
                    CapKind::Flat => HalfSpaceCapDefining::flat(z.len()),
                    CapKind::Saddle => HalfSpaceCapDefining::saddle(z.len()),
                    CapKind::Bowl => HalfSpaceCapDefining::bowl(z.len()),
                };
                // Re-derive the inequality rather than calling value().
                let n = z.len();
                let mut q = 0.0;
                for (j, zj) in z[..n - 1].iter().enumerate() {
                    q += cap.tangential[2 * j] * zj.re * zj.re
                        + cap.tangential[2 * j + 1] * zj.im * zj.im;
                }
                z[n - 1].re < cap.height - q - cap.confine * crate::linalg::norm_sq(z).powi(2)
            }
        }
    }

    /// Whether the defining function is genuinely C^2 (max-type models are
    /// exempt from curvature operations).
    pub fn is_c2(&self) -> bool {
        !matches!(self, ModelDomain::Polydisc { .. } | ModelDomain::ReinhardtDAlpha { .. })
    }
}

/// `|z_j|^2 - 1`: one polydisc face.
#[derive(Debug, Clone)]
pub struct CoordinateDiscDefining {
    pub j: usize,
    pub n: usize,
}

impl DefiningFunction for CoordinateDiscDefining {
    fn dimension(&self) -> usize {
        self.n
    }
    fn value(&self, z: &[Complex64]) -> f64 {
        z[self.j].norm_sqr() - 1.0
    }
    fn gradient(&self, z: &[Complex64]) -> Vec<Complex64> {
        let mut g = vec![Complex64::new(0.0, 0.0); self.n];
        g[self.j] = 2.0 * z[self.j];
        g
    }
    fn real_hessian(&self, _z: &[Complex64]) -> DMatrix<f64> {
        let mut h = DMatrix::zeros(2 * self.n, 2 * self.n);
        h[(2 * self.j, 2 * self.j)] = 2.0;
        h[(2 * self.j + 1, 2 * self.j + 1)] = 2.0;
        h
    }
}

/// `|z_1 z_2|^2 - alpha^2`: the hyperbola face of `D_alpha`.
#[derive(Debug, Clone)]
pub struct ProductModulusDefining {
    pub alpha: f64,
}

impl DefiningFunction for ProductModulusDefining {
    fn dimension(&self) -> usize {
        2
    }
    fn value(&self, z: &[Complex64]) -> f64 {
        z[0].norm_sqr() * z[1].norm_sqr() - self.alpha * self.alpha
    }
    fn gradient(&self, z: &[Complex64]) -> Vec<Complex64> {
        vec![2.0 * z[0] * z[1].norm_sqr(), 2.0 * z[1] * z[0].norm_sqr()]
    }
    fn real_hessian(&self, z: &[Complex64]) -> DMatrix<f64> {
        let (s1, s2) = (z[0].norm_sqr(), z[1].norm_sqr());
        let u = crate::linalg::realify(z);
        let mut h = DMatrix::zeros(4, 4);
        h[(0, 0)] = 2.0 * s2;
        h[(1, 1)] = 2.0 * s2;
        h[(2, 2)] = 2.0 * s1;
        h[(3, 3)] = 2.0 * s1;
        for i in 0..2 {
            for k in 2..4 {
                h[(i, k)] = 4.0 * u[i] * u[k];
                h[(k, i)] = h[(i, k)];
            }
        }
        h
    }
}

/// Pointwise maximum of several pieces; derivatives come from the active
/// branch (first maximal piece), which is the correct branch away from the
/// corner set.
pub struct MaxDefining {
    pub parts: Vec<DynDefining>,
}

impl MaxDefining {
    fn active(&self, z: &[Complex64]) -> usize {
        let mut best = 0usize;
        let mut bv = f64::NEG_INFINITY;
        for (i, p) in self.parts.iter().enumerate() {
            let v = p.value(z);
            if v > bv {
                bv = v;
                best = i;
            }
        }
        best
    }
}

impl DefiningFunction for MaxDefining {
    fn dimension(&self) -> usize {
        self.parts[0].dimension()
    }
    fn value(&self, z: &[Complex64]) -> f64 {
        self.parts.iter().map(|p| p.value(z)).fold(f64::NEG_INFINITY, f64::max)
    }
    fn gradient(&self, z: &[Complex64]) -> Vec<Complex64> {
        self.parts[self.active(z)].gradient(z)
    }
    fn real_hessian(&self, z: &[Complex64]) -> DMatrix<f64> {
        self.parts[self.active(z)].real_hessian(z)
    }
}

/// Builds the defining function for a model tag.
pub fn model_defining(model: &ModelDomain) -> DynDefining {
    match model {
        ModelDomain::UnitDisc => Arc::new(BallDefining { n: 1 }),
        ModelDomain::Ball { n } => Arc::new(BallDefining { n: *n }),
        ModelDomain::Polydisc { n } => Arc::new(MaxDefining {
            parts: (0..*n)
                .map(|j| Arc::new(CoordinateDiscDefining { j, n: *n }) as DynDefining)
                .collect(),
        }),
        ModelDomain::Annulus { r_minus } => Arc::new(AnnulusDefining { r_minus: *r_minus }),
        ModelDomain::Ellipsoid { coeffs, exponents } => Arc::new(
            EllipsoidDefining::new(coeffs.clone(), exponents.clone())
                .expect("validated at construction"),
        ),
        ModelDomain::ReinhardtDAlpha { alpha } => Arc::new(MaxDefining {
            parts: vec![
                Arc::new(CoordinateDiscDefining { j: 0, n: 2 }) as DynDefining,
                Arc::new(CoordinateDiscDefining { j: 1, n: 2 }) as DynDefining,
                Arc::new(ProductModulusDefining { alpha: *alpha }) as DynDefining,
            ],
        }),
        ModelDomain::HalfSpaceCap { kind } => {
            let cap = match kind {
                CapKind::Flat => HalfSpaceCapDefining::flat(2),
                CapKind::Saddle => HalfSpaceCapDefining::saddle(2),
                CapKind::Bowl => HalfSpaceCapDefining::bowl(2),
            };
            Arc::new(cap)
        }
    }
}

/// Dimension of a model tag.
pub fn model_dimension(model: &ModelDomain) -> usize {
    match model {
        ModelDomain::UnitDisc | ModelDomain::Annulus { .. } => 1,
        ModelDomain::Ball { n } | ModelDomain::Polydisc { n } => *n,
        ModelDomain::Ellipsoid { coeffs, .. } => coeffs.len(),
        ModelDomain::ReinhardtDAlpha { .. } | ModelDomain::HalfSpaceCap { .. } => 2,
    }
}

/// Validates model parameters.
pub fn validate_model(model: &ModelDomain) -> Result<()> {
    match model {
        ModelDomain::Annulus { r_minus } => {
            if !(0.0 <= *r_minus && *r_minus < 1.0) {
                return Err(Error::Invalid(format!(
                    "annulus needs 0 <= r_minus < r_plus (normalized r_minus = {r_minus})"
                )));
            }
        }
        ModelDomain::ReinhardtDAlpha { alpha } => {
            if !(0.0 < *alpha && *alpha <= 1.0) {
                return Err(Error::Invalid(format!("D_alpha needs alpha in (0,1], got {alpha}")));
            }
        }
        ModelDomain::Ball { n } | ModelDomain::Polydisc { n } => {
            if *n == 0 {
                return Err(Error::Invalid("dimension must be positive".into()));
            }
        }
        ModelDomain::Ellipsoid { coeffs, exponents } => {
            EllipsoidDefining::new(coeffs.clone(), exponents.clone())?;
        }
        _ => {}
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn polydisc_membership() {
        let m = ModelDomain::Polydisc { n: 2 };
        assert!(m.contains_analytic(&[c(0.9, 0.0), c(0.0, -0.9)]));
        assert!(!m.contains_analytic(&[c(1.1, 0.0), c(0.0, 0.0)]));
        let f = model_defining(&m);
        assert!(f.value(&[c(0.9, 0.0), c(0.0, -0.9)]) < 0.0);
        assert!(f.value(&[c(1.1, 0.0), c(0.0, 0.0)]) > 0.0);
    }

    #[test]
    fn d_alpha_membership_examples() {
        let m = ModelDomain::ReinhardtDAlpha { alpha: 0.5 };
        assert!(m.contains_analytic(&[c(0.9, 0.0), c(0.5, 0.0)]));
        assert!(!m.contains_analytic(&[c(0.9, 0.0), c(0.9, 0.0)])); // product 0.81 > 0.5
        let f = model_defining(&m);
        assert!(f.value(&[c(0.9, 0.0), c(0.5, 0.0)]) < 0.0);
        assert!(f.value(&[c(0.9, 0.0), c(0.9, 0.0)]) > 0.0);
    }

    #[test]
    fn annulus_validation() {
        assert!(validate_model(&ModelDomain::Annulus { r_minus: 0.3 }).is_ok());
        assert!(validate_model(&ModelDomain::Annulus { r_minus: 1.2 }).is_err());
        assert!(validate_model(&ModelDomain::ReinhardtDAlpha { alpha: 0.0 }).is_err());
    }

    #[test]
    fn product_modulus_fd() {
        let f = ProductModulusDefining { alpha: 0.5 };
        let probes = vec![
            vec![c(0.4, 0.2), c(-0.3, 0.6)],
            vec![c(0.8, -0.1), c(0.2, 0.3)],
        ];
        super::super::defining::validate_c2(&f, &probes, 1e-6, 1e-5).unwrap();
    }
}
