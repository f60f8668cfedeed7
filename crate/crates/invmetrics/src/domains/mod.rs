//! Bounded domains in C^n described by C^2 defining functions, together
//! with the geometric data the rest of the crate consumes: membership,
//! outward normals, Levi forms, strong-convexity margins, signed distance
//! and boundary grids.

pub mod config;
pub mod defining;
pub mod grid;
pub mod models;

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub use config::DomainSpec;
pub use defining::{
    validate_c2, BallDefining, DefiningFunction, DynDefining, EllipsoidDefining,
    HalfSpaceCapDefining, Perturbation, PerturbedDefining,
};
pub use grid::{BoundaryGrid, GridLevel};
pub use models::{CapKind, ModelDomain};

use crate::error::Error;
use crate::linalg::{complexify, norm, orthogonal_complement, realify, sym_min_eigenvalue};
use crate::Result;

pub const TOL_BOUNDARY: f64 = 1e-12;

/// A bounded domain `{r < 0}` with an interior base point and a radius of a
/// ball containing it. The optional model tag unlocks closed forms and
/// exact membership predicates.
#[derive(Clone)]
pub struct Domain {
    pub defining: DynDefining,
    pub interior_point: Vec<Complex64>,
    pub bounding_radius: f64,
    pub model: Option<ModelDomain>,
    pub name: String,
}

/// Result of a membership query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Membership {
    /// Strictly inside; the margin is `-r(z)`.
    Interior { margin: f64 },
    Boundary,
    Exterior,
}

impl Domain {
    pub fn from_parts(
        defining: DynDefining,
        interior_point: Vec<Complex64>,
        bounding_radius: f64,
        model: Option<ModelDomain>,
        name: impl Into<String>,
    ) -> Result<Self> {
        let d = Self { defining, interior_point, bounding_radius, model, name: name.into() };
        if d.defining.value(&d.interior_point) >= 0.0 {
            return Err(Error::Invalid(format!(
                "interior point of '{}' is not interior (r = {})",
                d.name,
                d.defining.value(&d.interior_point)
            )));
        }
        Ok(d)
    }

    pub fn unit_disc() -> Self {
        Self::model(ModelDomain::UnitDisc).expect("static model")
    }

    pub fn ball(n: usize) -> Result<Self> {
        Self::model(ModelDomain::Ball { n })
    }

    pub fn polydisc(n: usize) -> Result<Self> {
        Self::model(ModelDomain::Polydisc { n })
    }

    /// Annulus `r_minus < |z| < r_plus`, normalized internally to outer
    /// radius 1.
    pub fn annulus(r_minus: f64, r_plus: f64) -> Result<Self> {
        if !(0.0 <= r_minus && r_minus < r_plus) {
            return Err(Error::Invalid(format!(
                "annulus needs 0 <= r_minus < r_plus, got ({r_minus}, {r_plus})"
            )));
        }
        Self::model(ModelDomain::Annulus { r_minus: r_minus / r_plus })
    }

    pub fn ellipsoid(coeffs: Vec<f64>, exponents: Vec<u32>) -> Result<Self> {
        Self::model(ModelDomain::Ellipsoid { coeffs, exponents })
    }

    pub fn d_alpha(alpha: f64) -> Result<Self> {
        Self::model(ModelDomain::ReinhardtDAlpha { alpha })
    }

    pub fn half_space_cap(kind: CapKind) -> Result<Self> {
        Self::model(ModelDomain::HalfSpaceCap { kind })
    }

    /// Ball perturbed by `h(z - center)`; `center` defaults to the normal
    /// form position `(0', 1)` when `at_north_pole` is set.
    pub fn perturbed_ball(n: usize, h: Perturbation, at_north_pole: bool) -> Result<Self> {
        let mut center = vec![Complex64::new(0.0, 0.0); n];
        if at_north_pole {
            center[n - 1] = Complex64::new(1.0, 0.0);
        }
        let defining = Arc::new(PerturbedDefining {
            base: Arc::new(BallDefining { n }),
            h,
            center,
        });
        Domain::from_parts(
            defining,
            vec![Complex64::new(0.0, 0.0); n],
            1.5,
            None,
            "perturbed-ball",
        )
    }

    pub fn model(model: ModelDomain) -> Result<Self> {
        models::validate_model(&model)?;
        let n = models::model_dimension(&model);
        let defining = models::model_defining(&model);
        let interior_point = match &model {
            ModelDomain::Annulus { r_minus } => {
                vec![Complex64::new((r_minus + 1.0) / 2.0, 0.0)]
            }
            _ => vec![Complex64::new(0.0, 0.0); n],
        };
        let bounding_radius = match &model {
            ModelDomain::UnitDisc | ModelDomain::Ball { .. } | ModelDomain::Annulus { .. } => 1.0,
            ModelDomain::Polydisc { n } => (*n as f64).sqrt(),
            ModelDomain::ReinhardtDAlpha { .. } => 2f64.sqrt(),
            ModelDomain::Ellipsoid { coeffs, exponents } => coeffs
                .iter()
                .zip(exponents)
                .map(|(&a, &p)| (1.0 / a).powf(1.0 / p as f64))
                .sum::<f64>()
                .sqrt(),
            ModelDomain::HalfSpaceCap { kind } => {
                let cap = match kind {
                    CapKind::Flat => HalfSpaceCapDefining::flat(2),
                    CapKind::Saddle => HalfSpaceCapDefining::saddle(2),
                    CapKind::Bowl => HalfSpaceCapDefining::bowl(2),
                };
                // value >= x_n - h - |q| s + eps s^2 > 0 once eps s^2
                // dominates; generous closed-form bound.
                let qmax = cap
                    .tangential
                    .iter()
                    .fold(0.0f64, |acc, q| acc.max(q.abs()));
                (((qmax + 1.0) / cap.confine) + cap.height / cap.confine).sqrt() + 1.0
            }
        };
        let name = format!("{model:?}");
        Domain::from_parts(defining, interior_point, bounding_radius, Some(model), name)
    }

    pub fn dimension(&self) -> usize {
        self.defining.dimension()
    }

    pub fn diameter_bound(&self) -> f64 {
        2.0 * self.bounding_radius
    }

    /// Membership classification with the default boundary tolerance.
    pub fn contains(&self, z: &[Complex64]) -> Membership {
        self.contains_with_tol(z, TOL_BOUNDARY)
    }

    pub fn contains_with_tol(&self, z: &[Complex64], tol: f64) -> Membership {
        let v = self.defining.value(z);
        if v < -tol {
            Membership::Interior { margin: -v }
        } else if v.abs() <= tol {
            Membership::Boundary
        } else {
            Membership::Exterior
        }
    }

    /// Outward unit normal (gradient direction) at a boundary point.
    pub fn outward_normal(&self, z: &[Complex64]) -> Result<Vec<Complex64>> {
        let g = self.defining.gradient(z);
        let gn = norm(&g);
        if gn < 1e-10 {
            return Err(Error::DegenerateGradient { norm: gn });
        }
        Ok(g.iter().map(|c| c / gn).collect())
    }

    /// Levi form `sum (d^2 r / dz_j dz_bar_k)(a) X_j conj(X_k)` extracted
    /// from the real Hessian by the standard complexification.
    pub fn levi_form(&self, a: &[Complex64], x: &[Complex64]) -> f64 {
        levi_form_of(self.defining.as_ref(), a, x)
    }

    /// Minimum over the grid of the smallest eigenvalue of the real Hessian
    /// restricted to the real tangent space of the boundary. Positive
    /// values certify strong convexity on the grid.
    pub fn strong_convexity_margin(&self, grid: &BoundaryGrid) -> f64 {
        assert!(!grid.is_empty(), "strong_convexity_margin needs a nonempty grid");
        let mut min_eig = f64::INFINITY;
        for p in &grid.points {
            min_eig = min_eig.min(tangent_hessian_min_eig(self.defining.as_ref(), p));
        }
        min_eig
    }

    /// Signed distance to the boundary: negative inside the closure,
    /// positive outside. Foot points are found by multistart projection
    /// (coarse boundary grid candidates refined by a KKT Newton iteration).
    pub fn signed_distance(&self, z: &[Complex64]) -> Result<f64> {
        let starts = self.projection_starts(z);
        let max_iter = 80;
        let mut best: Option<f64> = None;
        for y0 in starts {
            if let Some(foot) = kkt_project(self.defining.as_ref(), z, &y0, max_iter) {
                let d = crate::linalg::dist(&foot, z);
                best = Some(best.map_or(d, |b: f64| b.min(d)));
            }
        }
        let d = best.ok_or(Error::NoConvergence { max_iter })?;
        Ok(if self.defining.value(z) <= 0.0 { -d } else { d })
    }

    fn projection_starts(&self, z: &[Complex64]) -> Vec<Vec<Complex64>> {
        let mut starts = Vec::new();
        // Gradient-flow projection of z itself.
        if let Some(y) = level_project(self.defining.as_ref(), z) {
            starts.push(y);
        }
        // Nearest points of a coarse boundary grid.
        if let Ok(g) = self.boundary_grid(GridLevel::Coarse) {
            let mut scored: Vec<(f64, usize)> = g
                .points
                .iter()
                .enumerate()
                .map(|(i, p)| (crate::linalg::dist(p, z), i))
                .collect();
            scored.sort_by(|a, b| a.0.total_cmp(&b.0));
            for &(_, i) in scored.iter().take(4) {
                starts.push(g.points[i].clone());
            }
        }
        starts
    }

    /// Boundary grid at a given refinement level. Planar models use circle
    /// grids; everything else is ray cast from the interior point.
    pub fn boundary_grid(&self, level: GridLevel) -> Result<BoundaryGrid> {
        let n = self.dimension();
        match &self.model {
            Some(ModelDomain::UnitDisc) => {
                Ok(grid::circle_grid(&[1.0], grid::default_counts(1, level)[0]))
            }
            Some(ModelDomain::Annulus { r_minus }) => {
                if *r_minus == 0.0 {
                    return Err(Error::Invalid(
                        "punctured disc has no inner boundary circle".into(),
                    ));
                }
                Ok(grid::circle_grid(&[*r_minus, 1.0], grid::default_counts(1, level)[0]))
            }
            Some(ModelDomain::Polydisc { n }) => Ok(polydisc_torus_grid(*n, level)),
            Some(ModelDomain::ReinhardtDAlpha { .. }) => Err(Error::Invalid(
                "D_alpha is exempt from boundary-grid operations".into(),
            )),
            _ => grid::ray_cast_grid(self, &grid::default_counts(n, level)),
        }
    }
}

/// Distinguished boundary (torus) grid of the polydisc; by the iterated
/// maximum principle this is the right grid for sup norms of holomorphic
/// functions.
fn polydisc_torus_grid(n: usize, level: GridLevel) -> BoundaryGrid {
    let count = match level {
        GridLevel::Coarse => 24usize,
        GridLevel::Standard => 48,
        GridLevel::Fine => 96,
    };
    let tau = std::f64::consts::TAU;
    let mut points = Vec::new();
    let mut idx = vec![0usize; n];
    loop {
        let p: Vec<Complex64> = idx
            .iter()
            .map(|&k| Complex64::from_polar(1.0, tau * k as f64 / count as f64))
            .collect();
        points.push(p);
        let mut carry = 0;
        loop {
            idx[carry] += 1;
            if idx[carry] < count {
                break;
            }
            idx[carry] = 0;
            carry += 1;
            if carry == n {
                break;
            }
        }
        if carry == n {
            break;
        }
    }
    let normals = points
        .iter()
        .map(|p| {
            // On the torus every |z_j| = 1; use the first coordinate's face.
            let mut nv = vec![Complex64::new(0.0, 0.0); n];
            nv[0] = p[0];
            nv
        })
        .collect();
    BoundaryGrid { points, normals, mesh: tau / count as f64 }
}

/// Levi form from the real Hessian by complexification:
/// `h_jk = (1/4) [H(x_j,x_k) + H(y_j,y_k) + i (H(x_j,y_k) - H(y_j,x_k))]`.
pub fn levi_form_of(f: &dyn DefiningFunction, a: &[Complex64], x: &[Complex64]) -> f64 {
    let n = f.dimension();
    let h = f.real_hessian(a);
    let mut total = Complex64::new(0.0, 0.0);
    for j in 0..n {
        for k in 0..n {
            let re = h[(2 * j, 2 * k)] + h[(2 * j + 1, 2 * k + 1)];
            let im = h[(2 * j, 2 * k + 1)] - h[(2 * j + 1, 2 * k)];
            let hjk = Complex64::new(re, im) * 0.25;
            total += hjk * x[j] * x[k].conj();
        }
    }
    total.re
}

/// Smallest eigenvalue of the real Hessian restricted to the real tangent
/// space (orthogonal complement of the gradient) at a boundary point.
pub fn tangent_hessian_min_eig(f: &dyn DefiningFunction, p: &[Complex64]) -> f64 {
    let h = f.real_hessian(p);
    let g = realify(&f.gradient(p));
    let basis = orthogonal_complement(&g);
    let restricted = basis.transpose() * h * &basis;
    sym_min_eigenvalue(&restricted)
}

/// First-order projection onto the zero level set along the gradient flow.
fn level_project(f: &dyn DefiningFunction, z: &[Complex64]) -> Option<Vec<Complex64>> {
    let mut y = z.to_vec();
    for _ in 0..100 {
        let v = f.value(&y);
        if v.abs() < 1e-13 {
            return Some(y);
        }
        let g = f.gradient(&y);
        let g2 = crate::linalg::norm_sq(&g);
        if g2 < 1e-20 {
            return None;
        }
        for (yj, gj) in y.iter_mut().zip(&g) {
            *yj -= v * gj / g2;
        }
    }
    if f.value(&y).abs() < 1e-10 {
        Some(y)
    } else {
        None
    }
}

/// Newton iteration on the foot-point system `y - z + lambda grad r(y) = 0`,
/// `r(y) = 0`, in realified coordinates.
fn kkt_project(
    f: &dyn DefiningFunction,
    z: &[Complex64],
    y0: &[Complex64],
    max_iter: usize,
) -> Option<Vec<Complex64>> {
    let n2 = 2 * f.dimension();
    let x = realify(z);
    let mut y = realify(y0);
    let mut lambda = 0.0f64;
    // Initialize lambda from the current residual: lambda ~ <x - y, g>/|g|^2.
    {
        let yz = complexify(y.as_slice());
        let g = realify(&f.gradient(&yz));
        let g2 = g.norm_squared();
        if g2 > 1e-20 {
            lambda = (&x - &y).dot(&g) / g2 * (-1.0);
        }
    }
    for _ in 0..max_iter {
        let yz = complexify(y.as_slice());
        let g = realify(&f.gradient(&yz));
        let h = f.real_hessian(&yz);
        let rv = f.value(&yz);
        let mut fvec = DVector::zeros(n2 + 1);
        for i in 0..n2 {
            fvec[i] = y[i] - x[i] + lambda * g[i];
        }
        fvec[n2] = rv;
        if fvec.norm() < 1e-12 {
            return Some(complexify(y.as_slice()));
        }
        let mut jac = DMatrix::zeros(n2 + 1, n2 + 1);
        for i in 0..n2 {
            for k in 0..n2 {
                jac[(i, k)] = (if i == k { 1.0 } else { 0.0 }) + lambda * h[(i, k)];
            }
            jac[(i, n2)] = g[i];
            jac[(n2, i)] = g[i];
        }
        let lu = jac.lu();
        let step = lu.solve(&fvec)?;
        let mut damping = 1.0;
        // Backtrack if the step explodes.
        for _ in 0..30 {
            let mut y_try = y.clone();
            for i in 0..n2 {
                y_try[i] -= damping * step[i];
            }
            let l_try = lambda - damping * step[n2];
            let yz_try = complexify(y_try.as_slice());
            let g_try = realify(&f.gradient(&yz_try));
            let mut fn_new = 0.0;
            for i in 0..n2 {
                let r = y_try[i] - x[i] + l_try * g_try[i];
                fn_new += r * r;
            }
            let rv_try = f.value(&yz_try);
            fn_new += rv_try * rv_try;
            if fn_new.sqrt() < fvec.norm() || damping < 1e-4 {
                y = y_try;
                lambda = l_try;
                break;
            }
            damping *= 0.5;
        }
    }
    let yz = complexify(y.as_slice());
    if f.value(&yz).abs() < 1e-9 {
        Some(yz)
    } else {
        None
    }
}
