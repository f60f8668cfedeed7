//! C^2 defining functions and a small calculus for composing them.
//!
//! A defining function is a real-valued C^2 function on C^n carrying its
//! analytic gradient and real Hessian. Real coordinates are interleaved
//! `(x_1, y_1, ..., x_n, y_n)`; the gradient is packed as complex components
//! `g_j = dr/dx_j + i dr/dy_j` (so the outward normal is `g / |g|`).
//!
//! Composition with holomorphic maps, multiplication by smooth factors and
//! offsets are provided as combinators with exact chain rules, so the
//! scaling construction can carry second derivatives analytically.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::Error;
use crate::linalg::{norm_sq, realify_jacobian};
use crate::sympoly::SymPoly;
use crate::Result;

/// A real-valued C^2 function on C^n with analytic first and second
/// derivatives. Used both for defining functions of domains and for smooth
/// multiplier factors.
pub trait DefiningFunction: Send + Sync {
    fn dimension(&self) -> usize;
    fn value(&self, z: &[Complex64]) -> f64;
    /// Packed real gradient: component `j` is `dr/dx_j + i dr/dy_j`.
    fn gradient(&self, z: &[Complex64]) -> Vec<Complex64>;
    /// Real Hessian, `2n x 2n`, interleaved coordinate ordering.
    fn real_hessian(&self, z: &[Complex64]) -> DMatrix<f64>;
}

pub type DynDefining = Arc<dyn DefiningFunction>;

/// `rho(z) = -1 + ||z||^2`, the defining function of the unit ball.
#[derive(Debug, Clone)]
pub struct BallDefining {
    pub n: usize,
}

impl DefiningFunction for BallDefining {
    fn dimension(&self) -> usize {
        self.n
    }
    fn value(&self, z: &[Complex64]) -> f64 {
        -1.0 + norm_sq(z)
    }
    fn gradient(&self, z: &[Complex64]) -> Vec<Complex64> {
        z.iter().map(|c| 2.0 * c).collect()
    }
    fn real_hessian(&self, _z: &[Complex64]) -> DMatrix<f64> {
        DMatrix::identity(2 * self.n, 2 * self.n) * 2.0
    }
}

/// `-1 + sum a_j |z_j|^{2 p_j}`; diagonal Reinhardt ellipsoids.
#[derive(Debug, Clone)]
pub struct EllipsoidDefining {
    pub coeffs: Vec<f64>,
    pub exponents: Vec<u32>,
}

impl EllipsoidDefining {
    pub fn new(coeffs: Vec<f64>, exponents: Vec<u32>) -> Result<Self> {
        if coeffs.len() != exponents.len() || coeffs.is_empty() {
            return Err(Error::Invalid("coefficient/exponent length mismatch".into()));
        }
        if coeffs.iter().any(|&a| a <= 0.0) || exponents.iter().any(|&p| p == 0) {
            return Err(Error::Invalid(
                "ellipsoid coefficients must be positive, exponents >= 1".into(),
            ));
        }
        Ok(Self { coeffs, exponents })
    }
}

impl DefiningFunction for EllipsoidDefining {
    fn dimension(&self) -> usize {
        self.coeffs.len()
    }
    fn value(&self, z: &[Complex64]) -> f64 {
        -1.0 + z
            .iter()
            .zip(self.coeffs.iter().zip(&self.exponents))
            .map(|(zj, (&a, &p))| a * zj.norm_sqr().powi(p as i32))
            .sum::<f64>()
    }
    fn gradient(&self, z: &[Complex64]) -> Vec<Complex64> {
        z.iter()
            .zip(self.coeffs.iter().zip(&self.exponents))
            .map(|(zj, (&a, &p))| {
                let s = zj.norm_sqr();
                if p == 1 {
                    2.0 * a * zj
                } else if s == 0.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    2.0 * a * p as f64 * s.powi(p as i32 - 1) * zj
                }
            })
            .collect()
    }
    fn real_hessian(&self, z: &[Complex64]) -> DMatrix<f64> {
        let n = self.dimension();
        let mut h = DMatrix::zeros(2 * n, 2 * n);
        for (j, (zj, (&a, &p))) in z.iter().zip(self.coeffs.iter().zip(&self.exponents)).enumerate()
        {
            let s = zj.norm_sqr();
            let pf = p as f64;
            // f = a s^p: f_xx = 2 a p s^{p-1} + 4 a p (p-1) s^{p-2} x^2, etc.
            let (d1, d2) = if p == 1 {
                (a, 0.0)
            } else if p == 2 {
                (a * 2.0 * s, a * 2.0)
            } else if s == 0.0 {
                (0.0, 0.0)
            } else {
                (a * pf * s.powi(p as i32 - 1), a * pf * (pf - 1.0) * s.powi(p as i32 - 2))
            };
            h[(2 * j, 2 * j)] = 2.0 * d1 + 4.0 * d2 * zj.re * zj.re;
            h[(2 * j + 1, 2 * j + 1)] = 2.0 * d1 + 4.0 * d2 * zj.im * zj.im;
            h[(2 * j, 2 * j + 1)] = 4.0 * d2 * zj.re * zj.im;
            h[(2 * j + 1, 2 * j)] = h[(2 * j, 2 * j + 1)];
        }
        h
    }
}

/// Smooth defining function of the annulus `r_minus < |z| < 1` in C:
/// `(|z|^2 - r_minus^2)(|z|^2 - 1)`.
#[derive(Debug, Clone)]
pub struct AnnulusDefining {
    pub r_minus: f64,
}

impl AnnulusDefining {
    fn g(&self, s: f64) -> f64 {
        (s - self.r_minus * self.r_minus) * (s - 1.0)
    }
    fn dg(&self, s: f64) -> f64 {
        2.0 * s - (1.0 + self.r_minus * self.r_minus)
    }
}

impl DefiningFunction for AnnulusDefining {
    fn dimension(&self) -> usize {
        1
    }
    fn value(&self, z: &[Complex64]) -> f64 {
        self.g(z[0].norm_sqr())
    }
    fn gradient(&self, z: &[Complex64]) -> Vec<Complex64> {
        vec![2.0 * self.dg(z[0].norm_sqr()) * z[0]]
    }
    fn real_hessian(&self, z: &[Complex64]) -> DMatrix<f64> {
        let s = z[0].norm_sqr();
        let (x, y) = (z[0].re, z[0].im);
        let d1 = self.dg(s);
        let d2 = 2.0;
        let mut h = DMatrix::zeros(2, 2);
        h[(0, 0)] = 2.0 * d1 + 4.0 * d2 * x * x;
        h[(1, 1)] = 2.0 * d1 + 4.0 * d2 * y * y;
        h[(0, 1)] = 4.0 * d2 * x * y;
        h[(1, 0)] = h[(0, 1)];
        h
    }
}

/// Bounded cap model: `re z_n - height + q-quadratic(z') + confine ||z||^4`.
///
/// The tangential quadratic coefficients act on the real coordinates of
/// `z' = (z_1, ..., z_{n-1})`; a saddle choice produces a boundary point
/// where strong convexity fails with a negative margin, the flat choice
/// produces a flat face.
#[derive(Debug, Clone)]
pub struct HalfSpaceCapDefining {
    pub n: usize,
    pub height: f64,
    /// Length `2(n-1)`: coefficients for `(x_1, y_1, ..., x_{n-1}, y_{n-1})`.
    pub tangential: Vec<f64>,
    pub confine: f64,
}

impl HalfSpaceCapDefining {
    pub fn flat(n: usize) -> Self {
        Self { n, height: 0.25, tangential: vec![0.0; 2 * (n - 1)], confine: 0.05 }
    }
    pub fn saddle(n: usize) -> Self {
        let mut t = vec![0.5; 2 * (n - 1)];
        t[0] = -0.75;
        Self { n, height: 0.25, tangential: t, confine: 0.05 }
    }
    pub fn bowl(n: usize) -> Self {
        Self { n, height: 0.25, tangential: vec![0.5; 2 * (n - 1)], confine: 0.05 }
    }
    /// The boundary point on the `x_n` axis (where `x_n = h - confine x_n^4`
    /// solves to first order; refined by Newton).
    pub fn pole(&self) -> Vec<Complex64> {
        let mut xn = self.height;
        for _ in 0..50 {
            let f = xn - self.height + self.confine * xn.powi(4);
            let df = 1.0 + 4.0 * self.confine * xn.powi(3);
            xn -= f / df;
        }
        let mut z = vec![Complex64::new(0.0, 0.0); self.n];
        z[self.n - 1] = Complex64::new(xn, 0.0);
        z
    }
}

impl DefiningFunction for HalfSpaceCapDefining {
    fn dimension(&self) -> usize {
        self.n
    }
    fn value(&self, z: &[Complex64]) -> f64 {
        let mut v = z[self.n - 1].re - self.height;
        for (j, zj) in z[..self.n - 1].iter().enumerate() {
            v += self.tangential[2 * j] * zj.re * zj.re
                + self.tangential[2 * j + 1] * zj.im * zj.im;
        }
        v + self.confine * norm_sq(z).powi(2)
    }
    fn gradient(&self, z: &[Complex64]) -> Vec<Complex64> {
        let s = norm_sq(z);
        let mut g: Vec<Complex64> =
            z.iter().map(|zj| 4.0 * self.confine * s * zj).collect();
        for (j, zj) in z[..self.n - 1].iter().enumerate() {
            g[j] += Complex64::new(
                2.0 * self.tangential[2 * j] * zj.re,
                2.0 * self.tangential[2 * j + 1] * zj.im,
            );
        }
        g[self.n - 1] += Complex64::new(1.0, 0.0);
        g
    }
    fn real_hessian(&self, z: &[Complex64]) -> DMatrix<f64> {
        let n = self.n;
        let s = norm_sq(z);
        let u = crate::linalg::realify(z);
        // Hessian of confine * s^2 is 4 confine (s I + 2 u u^T).
        let mut h = DMatrix::identity(2 * n, 2 * n) * (4.0 * self.confine * s);
        for i in 0..2 * n {
            for k in 0..2 * n {
                h[(i, k)] += 8.0 * self.confine * u[i] * u[k];
            }
        }
        for j in 0..n - 1 {
            h[(2 * j, 2 * j)] += 2.0 * self.tangential[2 * j];
            h[(2 * j + 1, 2 * j + 1)] += 2.0 * self.tangential[2 * j + 1];
        }
        h
    }
}

/// Perturbation term added to a base defining function.
#[derive(Debug, Clone)]
pub enum Perturbation {
    /// Polynomial in the real coordinates.
    Poly(SymPoly),
    /// `amplitude * ||z||^power` with odd power (C^2 but not analytic).
    NormPower { amplitude: f64, power: u32 },
}

impl Perturbation {
    pub fn value(&self, z: &[Complex64]) -> f64 {
        match self {
            Perturbation::Poly(p) => p.value(z),
            Perturbation::NormPower { amplitude, power } => {
                amplitude * norm_sq(z).powf(*power as f64 / 2.0)
            }
        }
    }
    pub fn gradient(&self, z: &[Complex64]) -> Vec<Complex64> {
        match self {
            Perturbation::Poly(p) => p.gradient(z),
            Perturbation::NormPower { amplitude, power } => {
                let s = norm_sq(z);
                let p = *power as f64;
                if s == 0.0 {
                    return vec![Complex64::new(0.0, 0.0); z.len()];
                }
                let factor = amplitude * p * s.powf(p / 2.0 - 1.0);
                z.iter().map(|zj| factor * zj).collect()
            }
        }
    }
    pub fn real_hessian(&self, z: &[Complex64]) -> DMatrix<f64> {
        match self {
            Perturbation::Poly(p) => p.real_hessian(z),
            Perturbation::NormPower { amplitude, power } => {
                let n = z.len();
                let s = norm_sq(z);
                let p = *power as f64;
                if s == 0.0 {
                    return DMatrix::zeros(2 * n, 2 * n);
                }
                let u = crate::linalg::realify(z);
                let d1 = amplitude * p * s.powf(p / 2.0 - 1.0);
                let d2 = amplitude * p * (p - 2.0) * s.powf(p / 2.0 - 2.0);
                let mut h = DMatrix::identity(2 * n, 2 * n) * d1;
                for i in 0..2 * n {
                    for k in 0..2 * n {
                        h[(i, k)] += d2 * u[i] * u[k];
                    }
                }
                h
            }
        }
    }
}

/// `base(z) + h(z - center)`.
pub struct PerturbedDefining {
    pub base: DynDefining,
    pub h: Perturbation,
    pub center: Vec<Complex64>,
}

impl DefiningFunction for PerturbedDefining {
    fn dimension(&self) -> usize {
        self.base.dimension()
    }
    fn value(&self, z: &[Complex64]) -> f64 {
        let shifted = crate::linalg::sub(z, &self.center);
        self.base.value(z) + self.h.value(&shifted)
    }
    fn gradient(&self, z: &[Complex64]) -> Vec<Complex64> {
        let shifted = crate::linalg::sub(z, &self.center);
        let mut g = self.base.gradient(z);
        for (gj, hj) in g.iter_mut().zip(self.h.gradient(&shifted)) {
            *gj += hj;
        }
        g
    }
    fn real_hessian(&self, z: &[Complex64]) -> DMatrix<f64> {
        let shifted = crate::linalg::sub(z, &self.center);
        self.base.real_hessian(z) + self.h.real_hessian(&shifted)
    }
}

/// `base(z) + offset`.
pub struct OffsetDefining {
    pub base: DynDefining,
    pub offset: f64,
}

impl DefiningFunction for OffsetDefining {
    fn dimension(&self) -> usize {
        self.base.dimension()
    }
    fn value(&self, z: &[Complex64]) -> f64 {
        self.base.value(z) + self.offset
    }
    fn gradient(&self, z: &[Complex64]) -> Vec<Complex64> {
        self.base.gradient(z)
    }
    fn real_hessian(&self, z: &[Complex64]) -> DMatrix<f64> {
        self.base.real_hessian(z)
    }
}

/// `constant * base(z)`.
pub struct ScaledDefining {
    pub base: DynDefining,
    pub factor: f64,
}

impl DefiningFunction for ScaledDefining {
    fn dimension(&self) -> usize {
        self.base.dimension()
    }
    fn value(&self, z: &[Complex64]) -> f64 {
        self.factor * self.base.value(z)
    }
    fn gradient(&self, z: &[Complex64]) -> Vec<Complex64> {
        self.base.gradient(z).into_iter().map(|g| self.factor * g).collect()
    }
    fn real_hessian(&self, z: &[Complex64]) -> DMatrix<f64> {
        self.base.real_hessian(z) * self.factor
    }
}

/// Product `factor(z) * base(z)` of two C^2 functions (full product rule).
pub struct ProductDefining {
    pub factor: DynDefining,
    pub base: DynDefining,
}

impl DefiningFunction for ProductDefining {
    fn dimension(&self) -> usize {
        self.base.dimension()
    }
    fn value(&self, z: &[Complex64]) -> f64 {
        self.factor.value(z) * self.base.value(z)
    }
    fn gradient(&self, z: &[Complex64]) -> Vec<Complex64> {
        let (fv, bv) = (self.factor.value(z), self.base.value(z));
        self.factor
            .gradient(z)
            .into_iter()
            .zip(self.base.gradient(z))
            .map(|(gf, gb)| gf * bv + gb * fv)
            .collect()
    }
    fn real_hessian(&self, z: &[Complex64]) -> DMatrix<f64> {
        let (fv, bv) = (self.factor.value(z), self.base.value(z));
        let gf = crate::linalg::realify(&self.factor.gradient(z));
        let gb = crate::linalg::realify(&self.base.gradient(z));
        let mut h = self.factor.real_hessian(z) * bv + self.base.real_hessian(z) * fv;
        for i in 0..h.nrows() {
            for k in 0..h.ncols() {
                h[(i, k)] += gf[i] * gb[k] + gb[i] * gf[k];
            }
        }
        h
    }
}

/// `constant + 2 Re(sum b_j z_j)`: the affine multipliers used by the
/// normal-form construction. Packed gradient is `2 conj(b)`.
#[derive(Debug, Clone)]
pub struct LinearRealPart {
    pub constant: f64,
    pub b: Vec<Complex64>,
}

impl DefiningFunction for LinearRealPart {
    fn dimension(&self) -> usize {
        self.b.len()
    }
    fn value(&self, z: &[Complex64]) -> f64 {
        self.constant + 2.0 * crate::linalg::dot(&self.b, z).re
    }
    fn gradient(&self, _z: &[Complex64]) -> Vec<Complex64> {
        self.b.iter().map(|bj| 2.0 * bj.conj()).collect()
    }
    fn real_hessian(&self, _z: &[Complex64]) -> DMatrix<f64> {
        DMatrix::zeros(2 * self.b.len(), 2 * self.b.len())
    }
}

// ---------------------------------------------------------------------------
// Holomorphic maps with derivatives, and composition of a C^2 function with
// a holomorphic map.
// ---------------------------------------------------------------------------

/// A holomorphic map C^n -> C^m together with its complex Jacobian and
/// second derivatives, enough to chain-rule C^2 data through it.
pub trait HoloMap: Send + Sync {
    fn dim_in(&self) -> usize;
    fn dim_out(&self) -> usize;
    fn apply(&self, z: &[Complex64]) -> Result<Vec<Complex64>>;
    /// `m x n` matrix of `d Phi_i / d z_j`.
    fn jacobian(&self, z: &[Complex64]) -> DMatrix<Complex64>;
    /// `n x n` matrix of `d^2 Phi_i / d z_j d z_k` for component `i`.
    fn second_derivative(&self, z: &[Complex64], i: usize) -> DMatrix<Complex64>;
}

pub type DynHoloMap = Arc<dyn HoloMap>;

/// Affine holomorphic map `z -> L z + b`.
pub struct AffineHoloMap {
    pub linear: DMatrix<Complex64>,
    pub offset: Vec<Complex64>,
}

impl HoloMap for AffineHoloMap {
    fn dim_in(&self) -> usize {
        self.linear.ncols()
    }
    fn dim_out(&self) -> usize {
        self.linear.nrows()
    }
    fn apply(&self, z: &[Complex64]) -> Result<Vec<Complex64>> {
        let mut out = self.offset.clone();
        for i in 0..self.linear.nrows() {
            for j in 0..self.linear.ncols() {
                out[i] += self.linear[(i, j)] * z[j];
            }
        }
        Ok(out)
    }
    fn jacobian(&self, _z: &[Complex64]) -> DMatrix<Complex64> {
        self.linear.clone()
    }
    fn second_derivative(&self, _z: &[Complex64], _i: usize) -> DMatrix<Complex64> {
        DMatrix::zeros(self.dim_in(), self.dim_in())
    }
}

/// Identity except on one coordinate: `w_i = z_i + (1/2) z^T Q z`.
pub struct QuadraticShearMap {
    pub q: DMatrix<Complex64>,
    pub target: usize,
}

impl HoloMap for QuadraticShearMap {
    fn dim_in(&self) -> usize {
        self.q.nrows()
    }
    fn dim_out(&self) -> usize {
        self.q.nrows()
    }
    fn apply(&self, z: &[Complex64]) -> Result<Vec<Complex64>> {
        let mut out = z.to_vec();
        let mut quad = Complex64::new(0.0, 0.0);
        for j in 0..z.len() {
            for k in 0..z.len() {
                quad += self.q[(j, k)] * z[j] * z[k];
            }
        }
        out[self.target] += 0.5 * quad;
        Ok(out)
    }
    fn jacobian(&self, z: &[Complex64]) -> DMatrix<Complex64> {
        let n = z.len();
        let mut j = DMatrix::identity(n, n);
        for k in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for l in 0..n {
                acc += 0.5 * (self.q[(k, l)] + self.q[(l, k)]) * z[l];
            }
            j[(self.target, k)] += acc;
        }
        j
    }
    fn second_derivative(&self, _z: &[Complex64], i: usize) -> DMatrix<Complex64> {
        let n = self.q.nrows();
        if i == self.target {
            (self.q.clone() + self.q.transpose()) * Complex64::new(0.5, 0.0)
        } else {
            DMatrix::zeros(n, n)
        }
    }
}

/// The scaling automorphism `A_t` as a `HoloMap` with derivatives.
pub struct ScalingHoloMap {
    pub t: f64,
    pub n: usize,
}

impl HoloMap for ScalingHoloMap {
    fn dim_in(&self) -> usize {
        self.n
    }
    fn dim_out(&self) -> usize {
        self.n
    }
    fn apply(&self, z: &[Complex64]) -> Result<Vec<Complex64>> {
        crate::hyperbolic::BallScalingAutomorphism { t: self.t, n: self.n }.apply(z)
    }
    fn jacobian(&self, z: &[Complex64]) -> DMatrix<Complex64> {
        let n = self.n;
        let t = self.t;
        let s = (1.0 - t * t).sqrt();
        let d = Complex64::new(1.0, 0.0) + t * z[n - 1];
        let mut j = DMatrix::zeros(n, n);
        for k in 0..n - 1 {
            j[(k, k)] = s / d;
            j[(k, n - 1)] = -s * t * z[k] / (d * d);
        }
        j[(n - 1, n - 1)] = (1.0 - t * t) / (d * d);
        j
    }
    fn second_derivative(&self, z: &[Complex64], i: usize) -> DMatrix<Complex64> {
        let n = self.n;
        let t = self.t;
        let s = (1.0 - t * t).sqrt();
        let d = Complex64::new(1.0, 0.0) + t * z[n - 1];
        let mut m = DMatrix::zeros(n, n);
        if i < n - 1 {
            let mixed = -s * t / (d * d);
            m[(i, n - 1)] = mixed;
            m[(n - 1, i)] = mixed;
            m[(n - 1, n - 1)] = 2.0 * s * t * t * z[i] / (d * d * d);
        } else {
            m[(n - 1, n - 1)] = -2.0 * t * (1.0 - t * t) / (d * d * d);
        }
        m
    }
}

/// Composition `A(B(z))` of holomorphic maps.
pub struct ComposedHoloMap {
    pub outer: DynHoloMap,
    pub inner: DynHoloMap,
}

impl HoloMap for ComposedHoloMap {
    fn dim_in(&self) -> usize {
        self.inner.dim_in()
    }
    fn dim_out(&self) -> usize {
        self.outer.dim_out()
    }
    fn apply(&self, z: &[Complex64]) -> Result<Vec<Complex64>> {
        self.outer.apply(&self.inner.apply(z)?)
    }
    fn jacobian(&self, z: &[Complex64]) -> DMatrix<Complex64> {
        let w = self.inner.apply(z).expect("jacobian inside pole");
        self.outer.jacobian(&w) * self.inner.jacobian(z)
    }
    fn second_derivative(&self, z: &[Complex64], i: usize) -> DMatrix<Complex64> {
        let w = self.inner.apply(z).expect("second derivative inside pole");
        let jb = self.inner.jacobian(z);
        let ja = self.outer.jacobian(&w);
        let mut m = jb.transpose() * self.outer.second_derivative(&w, i) * &jb;
        for l in 0..self.inner.dim_out() {
            let sl = self.inner.second_derivative(z, l);
            m += sl * ja[(i, l)];
        }
        m
    }
}

/// `u(Phi(z))` for real C^2 `u` and holomorphic `Phi`.
pub struct HoloComposeDefining {
    pub base: DynDefining,
    pub map: DynHoloMap,
}

impl DefiningFunction for HoloComposeDefining {
    fn dimension(&self) -> usize {
        self.map.dim_in()
    }
    fn value(&self, z: &[Complex64]) -> f64 {
        let w = self.map.apply(z).expect("composition evaluated at a pole");
        self.base.value(&w)
    }
    fn gradient(&self, z: &[Complex64]) -> Vec<Complex64> {
        let w = self.map.apply(z).expect("composition evaluated at a pole");
        let gu = self.base.gradient(&w);
        let jc = self.map.jacobian(z);
        let n = self.map.dim_in();
        let m = self.map.dim_out();
        // G^v_k = sum_i conj(J_{i k}) G^u_i.
        (0..n)
            .map(|k| (0..m).map(|i| jc[(i, k)].conj() * gu[i]).sum())
            .collect()
    }
    fn real_hessian(&self, z: &[Complex64]) -> DMatrix<f64> {
        let w = self.map.apply(z).expect("composition evaluated at a pole");
        let gu = self.base.gradient(&w);
        let hu = self.base.real_hessian(&w);
        let jc = self.map.jacobian(z);
        let jr = realify_jacobian(&jc);
        let n = self.map.dim_in();
        let mut h = jr.transpose() * hu * &jr;
        // Curvature terms: u_{x_i} HessR(Re Phi_i) + u_{y_i} HessR(Im Phi_i).
        for i in 0..self.map.dim_out() {
            let (ux, uy) = (gu[i].re, gu[i].im);
            if ux == 0.0 && uy == 0.0 {
                continue;
            }
            let s = self.map.second_derivative(z, i);
            for j in 0..n {
                for k in 0..n {
                    let sjk = s[(j, k)];
                    // Re Phi: [[Re, -Im], [-Im, -Re]]; Im Phi: [[Im, Re], [Re, -Im]].
                    h[(2 * j, 2 * k)] += ux * sjk.re + uy * sjk.im;
                    h[(2 * j, 2 * k + 1)] += ux * (-sjk.im) + uy * sjk.re;
                    h[(2 * j + 1, 2 * k)] += ux * (-sjk.im) + uy * sjk.re;
                    h[(2 * j + 1, 2 * k + 1)] += ux * (-sjk.re) + uy * (-sjk.im);
                }
            }
        }
        h
    }
}

/// User-supplied callables validated against finite differences on
/// construction.
pub struct CallableDefining {
    pub n: usize,
    pub value_fn: Box<dyn Fn(&[Complex64]) -> f64 + Send + Sync>,
    pub gradient_fn: Box<dyn Fn(&[Complex64]) -> Vec<Complex64> + Send + Sync>,
    pub hessian_fn: Box<dyn Fn(&[Complex64]) -> DMatrix<f64> + Send + Sync>,
}

impl CallableDefining {
    /// Validates the callables against central differences on the probes.
    pub fn validated(self, probes: &[Vec<Complex64>]) -> Result<Self> {
        validate_c2(&self, probes, 1e-6, 1e-5)?;
        Ok(self)
    }
}

impl DefiningFunction for CallableDefining {
    fn dimension(&self) -> usize {
        self.n
    }
    fn value(&self, z: &[Complex64]) -> f64 {
        (self.value_fn)(z)
    }
    fn gradient(&self, z: &[Complex64]) -> Vec<Complex64> {
        (self.gradient_fn)(z)
    }
    fn real_hessian(&self, z: &[Complex64]) -> DMatrix<f64> {
        (self.hessian_fn)(z)
    }
}

// ---------------------------------------------------------------------------
// Finite-difference validation
// ---------------------------------------------------------------------------

/// Central finite-difference gradient (packed complex components).
pub fn fd_gradient(f: &dyn DefiningFunction, z: &[Complex64], h: f64) -> Vec<Complex64> {
    let n = z.len();
    let mut out = Vec::with_capacity(n);
    let mut zp = z.to_vec();
    for j in 0..n {
        zp[j] = z[j] + Complex64::new(h, 0.0);
        let fxp = f.value(&zp);
        zp[j] = z[j] - Complex64::new(h, 0.0);
        let fxm = f.value(&zp);
        zp[j] = z[j] + Complex64::new(0.0, h);
        let fyp = f.value(&zp);
        zp[j] = z[j] - Complex64::new(0.0, h);
        let fym = f.value(&zp);
        zp[j] = z[j];
        out.push(Complex64::new((fxp - fxm) / (2.0 * h), (fyp - fym) / (2.0 * h)));
    }
    out
}

/// Central finite differences of the analytic gradient.
pub fn fd_hessian(f: &dyn DefiningFunction, z: &[Complex64], h: f64) -> DMatrix<f64> {
    let n = z.len();
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    let mut zp = z.to_vec();
    for k in 0..2 * n {
        let j = k / 2;
        let step = if k % 2 == 0 { Complex64::new(h, 0.0) } else { Complex64::new(0.0, h) };
        zp[j] = z[j] + step;
        let gp = crate::linalg::realify(&f.gradient(&zp));
        zp[j] = z[j] - step;
        let gm = crate::linalg::realify(&f.gradient(&zp));
        zp[j] = z[j];
        for i in 0..2 * n {
            m[(i, k)] = (gp[i] - gm[i]) / (2.0 * h);
        }
    }
    // Symmetrize (the FD columns already nearly agree).
    let mt = m.transpose();
    (m + mt) * 0.5
}

/// Checks analytic derivatives against finite differences on the probes.
pub fn validate_c2(
    f: &dyn DefiningFunction,
    probes: &[Vec<Complex64>],
    tol_grad: f64,
    tol_hess: f64,
) -> Result<()> {
    for z in probes {
        let g = f.gradient(z);
        let g_fd = fd_gradient(f, z, 1e-5);
        let gnorm = crate::linalg::norm(&g).max(1.0);
        let gerr = crate::linalg::dist(&g, &g_fd);
        if gerr > tol_grad * gnorm {
            return Err(Error::Invalid(format!(
                "gradient mismatch: |analytic - fd| = {gerr:.3e} at relative tolerance {tol_grad:.1e}"
            )));
        }
        let hm = f.real_hessian(z);
        let h_fd = fd_hessian(f, z, 1e-4);
        let hnorm = hm.norm().max(1.0);
        let herr = (hm.clone() - h_fd).norm();
        if herr > tol_hess * hnorm {
            return Err(Error::Invalid(format!(
                "hessian mismatch: |analytic - fd| = {herr:.3e} at relative tolerance {tol_hess:.1e}"
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_points(n: usize, count: usize, radius: f64, seed: u64) -> Vec<Vec<Complex64>> {
        let mut rng = StdRng::seed_from_u64(seed);
        (0..count)
            .map(|_| {
                (0..n)
                    .map(|_| {
                        Complex64::new(
                            rng.gen_range(-radius..radius),
                            rng.gen_range(-radius..radius),
                        )
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn ball_defining_fd() {
        let f = BallDefining { n: 2 };
        validate_c2(&f, &random_points(2, 20, 0.8, 1), 1e-6, 1e-5).unwrap();
    }

    #[test]
    fn ellipsoid_defining_fd() {
        let f = EllipsoidDefining::new(vec![1.0, 2.0], vec![1, 2]).unwrap();
        validate_c2(&f, &random_points(2, 20, 0.8, 2), 1e-6, 1e-5).unwrap();
    }

    #[test]
    fn annulus_defining_fd() {
        let f = AnnulusDefining { r_minus: 0.3 };
        let probes: Vec<_> = random_points(1, 20, 0.9, 3)
            .into_iter()
            .filter(|z| z[0].norm() > 0.1)
            .collect();
        validate_c2(&f, &probes, 1e-6, 1e-5).unwrap();
    }

    #[test]
    fn cap_defining_fd() {
        for f in [
            HalfSpaceCapDefining::flat(2),
            HalfSpaceCapDefining::saddle(2),
            HalfSpaceCapDefining::bowl(2),
        ] {
            validate_c2(&f, &random_points(2, 15, 0.6, 4), 1e-6, 1e-5).unwrap();
        }
    }

    #[test]
    fn norm_power_perturbation_fd() {
        let f = PerturbedDefining {
            base: Arc::new(BallDefining { n: 2 }),
            h: Perturbation::NormPower { amplitude: 1.0, power: 3 },
            center: vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        };
        let probes: Vec<_> = random_points(2, 20, 0.7, 5)
            .into_iter()
            .filter(|z| crate::linalg::dist(z, &f.center) > 0.05)
            .collect();
        validate_c2(&f, &probes, 1e-6, 1e-5).unwrap();
    }

    #[test]
    fn product_and_linear_real_part_fd() {
        let factor = LinearRealPart {
            constant: 1.0,
            b: vec![Complex64::new(0.3, -0.2), Complex64::new(0.1, 0.4)],
        };
        let f = ProductDefining {
            factor: Arc::new(factor),
            base: Arc::new(BallDefining { n: 2 }),
        };
        validate_c2(&f, &random_points(2, 20, 0.7, 6), 1e-6, 1e-5).unwrap();
    }

    #[test]
    fn holo_compose_against_fd() {
        // rho composed with A_t must match FD derivatives.
        let compose = HoloComposeDefining {
            base: Arc::new(BallDefining { n: 2 }),
            map: Arc::new(ScalingHoloMap { t: 0.7, n: 2 }),
        };
        let probes: Vec<_> = random_points(2, 20, 0.6, 7);
        validate_c2(&compose, &probes, 1e-6, 1e-5).unwrap();
    }

    #[test]
    fn quadratic_shear_fd() {
        let mut q = DMatrix::zeros(2, 2);
        q[(0, 0)] = Complex64::new(0.4, 0.1);
        q[(0, 1)] = Complex64::new(-0.2, 0.3);
        q[(1, 0)] = Complex64::new(-0.2, 0.3);
        q[(1, 1)] = Complex64::new(0.0, -0.5);
        let compose = HoloComposeDefining {
            base: Arc::new(BallDefining { n: 2 }),
            map: Arc::new(QuadraticShearMap { q, target: 1 }),
        };
        validate_c2(&compose, &random_points(2, 20, 0.6, 8), 1e-6, 1e-5).unwrap();
    }

    #[test]
    fn composed_holo_map_fd() {
        let mut q = DMatrix::zeros(2, 2);
        q[(0, 0)] = Complex64::new(0.2, -0.1);
        let shear = QuadraticShearMap { q, target: 1 };
        let map = ComposedHoloMap {
            outer: Arc::new(ScalingHoloMap { t: 0.5, n: 2 }),
            inner: Arc::new(shear),
        };
        let compose = HoloComposeDefining {
            base: Arc::new(EllipsoidDefining::new(vec![1.0, 2.0], vec![1, 1]).unwrap()),
            map: Arc::new(map),
        };
        validate_c2(&compose, &random_points(2, 15, 0.5, 9), 1e-6, 1e-5).unwrap();
    }

    #[test]
    fn sympoly_perturbation_fd() {
        let p = SymPoly::parse("0.5*x1^3 + 0.1*y2^2*x1", 2).unwrap();
        let f = PerturbedDefining {
            base: Arc::new(BallDefining { n: 2 }),
            h: Perturbation::Poly(p),
            center: vec![Complex64::new(0.0, 0.0); 2],
        };
        validate_c2(&f, &random_points(2, 20, 0.8, 10), 1e-6, 1e-5).unwrap();
    }

    #[test]
    fn callable_validation_rejects_wrong_gradient() {
        let f = CallableDefining {
            n: 1,
            value_fn: Box::new(|z| -1.0 + z[0].norm_sqr()),
            gradient_fn: Box::new(|z| vec![3.0 * z[0]]), // wrong on purpose
            hessian_fn: Box::new(|_| DMatrix::identity(2, 2) * 2.0),
        };
        let probes = vec![vec![Complex64::new(0.4, 0.2)]];
        assert!(f.validated(&probes).is_err());
    }
}
