//! Boundary sample grids with outward unit normals.
//!
//! Model boundaries are sampled through product grids in angular
//! coordinates; generic star-shaped boundaries through deterministic ray
//! casting from an interior point (bracketing followed by Newton on the
//! defining function along the ray).

use num_complex::Complex64;

use super::Domain;
use crate::error::Error;
use crate::linalg::{norm, realify};
use crate::Result;

/// Boundary samples, their outward unit normals and the (approximate)
/// maximal gap between adjacent samples.
#[derive(Debug, Clone)]
pub struct BoundaryGrid {
    pub points: Vec<Vec<Complex64>>,
    pub normals: Vec<Vec<Complex64>>,
    pub mesh: f64,
}

impl BoundaryGrid {
    pub fn len(&self) -> usize {
        self.points.len()
    }
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Directions of a product angular grid on the unit sphere of C^n.
///
/// `n = 1`: `counts[0]` points on the circle. `n = 2`: moduli
/// `(cos a, sin a)` with `a` on a half-open grid of `[0, pi/2]` and full
/// phase grids. `n = 3`: two modulus angles and three phases.
pub fn sphere_directions(n: usize, counts: &[usize]) -> Vec<Vec<Complex64>> {
    let tau = std::f64::consts::TAU;
    match n {
        1 => {
            let m = counts[0];
            (0..m)
                .map(|k| vec![Complex64::from_polar(1.0, tau * k as f64 / m as f64)])
                .collect()
        }
        2 => {
            let (na, n1, n2) = (counts[0], counts[1], counts[2]);
            let mut dirs = Vec::with_capacity(na * n1 * n2);
            for ia in 0..na {
                // Interior nodes of [0, pi/2] so both axes get sampled
                // without duplicating degenerate phase circles.
                let a = std::f64::consts::FRAC_PI_2 * (ia as f64 + 0.5) / na as f64;
                let (c, s) = (a.cos(), a.sin());
                for i1 in 0..n1 {
                    let p1 = Complex64::from_polar(c, tau * i1 as f64 / n1 as f64);
                    for i2 in 0..n2 {
                        let p2 = Complex64::from_polar(s, tau * i2 as f64 / n2 as f64);
                        dirs.push(vec![p1, p2]);
                    }
                }
            }
            dirs
        }
        3 => {
            let (na, nb, np) = (counts[0], counts[1], counts[2]);
            let mut dirs = Vec::new();
            for ia in 0..na {
                let a = std::f64::consts::FRAC_PI_2 * (ia as f64 + 0.5) / na as f64;
                for ib in 0..nb {
                    let b = std::f64::consts::FRAC_PI_2 * (ib as f64 + 0.5) / nb as f64;
                    let m = [a.cos(), a.sin() * b.cos(), a.sin() * b.sin()];
                    for i1 in 0..np {
                        for i2 in 0..np {
                            for i3 in 0..np {
                                dirs.push(vec![
                                    Complex64::from_polar(m[0], tau * i1 as f64 / np as f64),
                                    Complex64::from_polar(m[1], tau * i2 as f64 / np as f64),
                                    Complex64::from_polar(m[2], tau * i3 as f64 / np as f64),
                                ]);
                            }
                        }
                    }
                }
            }
            dirs
        }
        _ => panic!("sphere_directions supports n <= 3"),
    }
}

/// Default direction counts per dimension (coarse / standard / fine).
pub fn default_counts(n: usize, level: GridLevel) -> Vec<usize> {
    match (n, level) {
        (1, GridLevel::Coarse) => vec![64],
        (1, GridLevel::Standard) => vec![256],
        (1, GridLevel::Fine) => vec![1024],
        (2, GridLevel::Coarse) => vec![8, 12, 12],
        (2, GridLevel::Standard) => vec![16, 24, 24],
        (2, GridLevel::Fine) => vec![32, 48, 48],
        (3, GridLevel::Coarse) => vec![4, 4, 6],
        (3, GridLevel::Standard) => vec![6, 6, 8],
        (3, GridLevel::Fine) => vec![8, 8, 12],
        _ => panic!("unsupported dimension {n}"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridLevel {
    Coarse,
    Standard,
    Fine,
}

/// Finds the boundary crossing of `t -> r(center + t dir)` in `(0, t_max]`.
pub fn ray_root(domain: &Domain, dir: &[Complex64], t_max: f64) -> Option<f64> {
    let center = &domain.interior_point;
    let r = |t: f64| {
        let z: Vec<Complex64> =
            center.iter().zip(dir).map(|(c, d)| c + d * t).collect();
        domain.defining.value(&z)
    };
    let steps = 64;
    let mut t_lo = 0.0f64;
    let mut v_lo = r(0.0);
    if v_lo >= 0.0 {
        return None;
    }
    let mut bracket = None;
    for k in 1..=steps {
        let t = t_max * k as f64 / steps as f64;
        let v = r(t);
        if v >= 0.0 {
            bracket = Some((t_lo, v_lo, t));
            break;
        }
        t_lo = t;
        v_lo = v;
    }
    let (mut lo, _, mut hi) = bracket?;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if r(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    // Newton polish along the ray.
    let mut t = 0.5 * (lo + hi);
    for _ in 0..60 {
        let z: Vec<Complex64> = center.iter().zip(dir).map(|(c, d)| c + d * t).collect();
        let v = domain.defining.value(&z);
        if v.abs() < 1e-14 {
            break;
        }
        let g = domain.defining.gradient(&z);
        // d/dt r(center + t dir) = <realified g, realified dir>.
        let gr = realify(&g);
        let dr = realify(dir);
        let slope = gr.dot(&dr);
        if slope.abs() < 1e-14 {
            break;
        }
        let step = v / slope;
        t -= step;
        if !(lo - 1e-6..=hi + 1e-6).contains(&t) {
            t = 0.5 * (lo + hi); // fall back to the bisection estimate
            break;
        }
    }
    Some(t)
}

/// Boundary grid by ray casting along a product angular direction grid.
/// Works for domains star-shaped around their interior point (all the
/// smooth models and the blended families are).
pub fn ray_cast_grid(domain: &Domain, counts: &[usize]) -> Result<BoundaryGrid> {
    let n = domain.dimension();
    let dirs = sphere_directions(n, counts);
    let mut points = Vec::with_capacity(dirs.len());
    let mut normals = Vec::with_capacity(dirs.len());
    let mut max_radius = 0.0f64;
    for dir in &dirs {
        let t = ray_root(domain, dir, domain.bounding_radius * 1.5 + 1.0).ok_or(
            Error::NoConvergence { max_iter: 64 },
        )?;
        let z: Vec<Complex64> =
            domain.interior_point.iter().zip(dir).map(|(c, d)| c + d * t).collect();
        let g = domain.defining.gradient(&z);
        let gn = norm(&g);
        if gn < 1e-10 {
            return Err(Error::DegenerateGradient { norm: gn });
        }
        normals.push(g.iter().map(|c| c / gn).collect());
        points.push(z);
        max_radius = max_radius.max(t);
    }
    // Mesh estimate: largest angular spacing times the largest radius.
    let max_count = counts.iter().copied().max().unwrap_or(1).max(1);
    let mesh = std::f64::consts::TAU / max_count as f64 * max_radius;
    Ok(BoundaryGrid { points, normals, mesh })
}

/// Circle grid(s) for planar models; the annulus gets both circles.
pub fn circle_grid(radii: &[f64], count: usize) -> BoundaryGrid {
    let tau = std::f64::consts::TAU;
    let mut points = Vec::new();
    let mut normals = Vec::new();
    for (ri, &r) in radii.iter().enumerate() {
        for k in 0..count {
            let z = Complex64::from_polar(r, tau * k as f64 / count as f64);
            points.push(vec![z]);
            // Outward for the domain: outer circle points out, inner in.
            let sign = if radii.len() > 1 && ri == 0 { -1.0 } else { 1.0 };
            normals.push(vec![sign * z / r]);
        }
    }
    let rmax = radii.iter().cloned().fold(0.0f64, f64::max);
    BoundaryGrid { points, normals, mesh: tau / count as f64 * rmax }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_grid_sits_on_sphere() {
        let d = Domain::ball(2).unwrap();
        let g = ray_cast_grid(&d, &default_counts(2, GridLevel::Coarse)).unwrap();
        assert!(!g.is_empty());
        for (p, nv) in g.points.iter().zip(&g.normals) {
            assert!((crate::linalg::norm(p) - 1.0).abs() < 1e-10);
            assert!((crate::linalg::norm(nv) - 1.0).abs() < 1e-12);
            // Sphere normal is the point itself.
            assert!(crate::linalg::dist(p, nv) < 1e-9);
        }
    }

    #[test]
    fn annulus_circles() {
        let g = circle_grid(&[0.3, 1.0], 64);
        assert_eq!(g.len(), 128);
        // Inner normals point toward the origin.
        assert!((g.points[0][0].norm() - 0.3).abs() < 1e-15);
        assert!((g.normals[0][0] + g.points[0][0] / 0.3).norm() < 1e-15);
    }

    #[test]
    fn ellipsoid_grid_normals_match_gradient() {
        let d = Domain::ellipsoid(vec![1.0, 2.0], vec![1, 2]).unwrap();
        let g = ray_cast_grid(&d, &default_counts(2, GridLevel::Coarse)).unwrap();
        for (p, nv) in g.points.iter().zip(&g.normals) {
            assert!(d.defining.value(p).abs() < 1e-10);
            let grad = d.defining.gradient(p);
            let gn = crate::linalg::norm(&grad);
            let unit: Vec<Complex64> = grad.iter().map(|c| c / gn).collect();
            assert!(crate::linalg::dist(nv, &unit) < 1e-12);
        }
    }
}
