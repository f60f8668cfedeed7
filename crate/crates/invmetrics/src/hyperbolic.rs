//! Exact hyperbolic geometry of the unit disc, the unit ball and the annulus.
//!
//! The distance convention is `p = arctanh` of the Moebius difference
//! quotient, i.e. `p = (1/2) log((1+m)/(1-m))`. All other modules inherit
//! this normalization; it is the one for which the boundary ratio
//! `c(z_0, z) / (-log dist(z, boundary))` tends to `1/2`.

use num_complex::Complex64;

use crate::error::Error;
use crate::linalg::{herm, norm, norm_sq, scale, sub};
use crate::Result;

/// Moebius automorphism of the unit disc sending `a` to 0, with a phase.
#[derive(Debug, Clone, Copy)]
pub struct MoebiusMap {
    pub a: Complex64,
    pub phase: Complex64,
}

impl MoebiusMap {
    pub fn new(a: Complex64, phase: Complex64) -> Result<Self> {
        if a.norm() >= 1.0 {
            return Err(Error::Invalid(format!("|a| = {} must be < 1", a.norm())));
        }
        if (phase.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::Invalid("phase must be unimodular".into()));
        }
        Ok(Self { a, phase })
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        self.phase * (z - self.a) / (Complex64::new(1.0, 0.0) - self.a.conj() * z)
    }

    pub fn inverse(&self) -> MoebiusMap {
        // (phase (z - a)/(1 - conj(a) z))^{-1}: w -> (w/phase + a)/(1 + conj(a) w/phase)
        MoebiusMap {
            a: -self.a * self.phase,
            phase: self.phase.conj(),
        }
    }
}

/// Poincare distance of the unit disc, `arctanh` of the Moebius quotient.
pub fn poincare_distance(z: Complex64, w: Complex64) -> f64 {
    let m = ((z - w) / (Complex64::new(1.0, 0.0) - z.conj() * w)).norm();
    m.atanh()
}

/// Poincare (Caratheodory-Reiffen) density of the disc: `|v| / (1 - |z|^2)`.
pub fn poincare_metric(z: Complex64, v: Complex64) -> f64 {
    v.norm() / (1.0 - z.norm_sqr())
}

/// The standard involutive automorphism of the ball exchanging `a` and 0.
///
/// `phi_a(w) = (a - P_a w - s_a Q_a w) / (1 - <w, a>)` with
/// `P_a` the projection onto `C a`, `Q_a = I - P_a`, `s_a = sqrt(1- |a|^2)`.
pub fn ball_moebius(a: &[Complex64], w: &[Complex64]) -> Vec<Complex64> {
    let na2 = norm_sq(a);
    if na2 == 0.0 {
        return w.iter().map(|c| -c).collect();
    }
    let s = (1.0 - na2).sqrt();
    let wa = herm(w, a); // <w, a>
    let denom = Complex64::new(1.0, 0.0) - wa;
    let p: Vec<Complex64> = scale(a, wa / na2);
    let q: Vec<Complex64> = sub(w, &p);
    a.iter()
        .zip(p.iter().zip(q.iter()))
        .map(|(aj, (pj, qj))| (aj - pj - s * qj) / denom)
        .collect()
}

/// Exact invariant distance of the unit ball (equal to c = k = l there).
pub fn ball_distance(z: &[Complex64], w: &[Complex64]) -> f64 {
    norm(&ball_moebius(z, w)).atanh()
}

/// Exact invariant metric of the unit ball (equal to gamma = kappa there).
///
/// `kappa(z; v)^2 = (|v|^2 (1 - |z|^2) + |<v, z>|^2) / (1 - |z|^2)^2`.
pub fn ball_metric(z: &[Complex64], v: &[Complex64]) -> f64 {
    let r2 = norm_sq(z);
    let s = 1.0 - r2;
    ((norm_sq(v) * s + herm(v, z).norm_sqr()) / (s * s)).sqrt()
}

/// Scaling family `A_t`: automorphisms of the ball fixing `(0', 1)` that
/// push every compact subset of `{re z_n > -1}` toward that point as
/// `t -> 1`.
#[derive(Debug, Clone, Copy)]
pub struct BallScalingAutomorphism {
    pub t: f64,
    pub n: usize,
}

impl BallScalingAutomorphism {
    pub fn new(t: f64, n: usize) -> Result<Self> {
        if !(0.0 < t && t < 1.0) {
            return Err(Error::Invalid(format!("t = {t} must lie in (0,1)")));
        }
        if n == 0 {
            return Err(Error::Invalid("dimension must be positive".into()));
        }
        Ok(Self { t, n })
    }

    /// `A_t(z) = ((1-t^2)^{1/2} z' / (1 + t z_n), (z_n + t)/(1 + t z_n))`.
    pub fn apply(&self, z: &[Complex64]) -> Result<Vec<Complex64>> {
        assert_eq!(z.len(), self.n);
        let zn = z[self.n - 1];
        let denom = Complex64::new(1.0, 0.0) + self.t * zn;
        if denom.norm() < 1e-14 {
            return Err(Error::PoleHit { denom: denom.norm() });
        }
        let s = (1.0 - self.t * self.t).sqrt();
        let mut out = Vec::with_capacity(self.n);
        for zj in &z[..self.n - 1] {
            out.push(s * zj / denom);
        }
        out.push((zn + self.t) / denom);
        Ok(out)
    }
}

/// Exact Kobayashi (= Lempert) distance of the annulus `r_minus < |z| < 1`.
///
/// Computed through the universal covering by the strip `0 < Im w < pi`
/// with covering map `w -> exp(i a w)`, `a = -ln(r_minus)/pi`; the distance
/// is the minimum over deck translates `w + 2 pi k / a` of the hyperbolic
/// strip distance. The strip density matching the arctanh convention is
/// `|dw| / (2 sin(Im w))`.
pub fn annulus_kobayashi(r_minus: f64, z: Complex64, w: Complex64) -> Result<f64> {
    if !(0.0 < r_minus && r_minus < 1.0) {
        return Err(Error::Invalid(format!(
            "annulus inner radius {r_minus} must lie in (0,1)"
        )));
    }
    for (name, p) in [("z", z), ("w", w)] {
        let m = p.norm();
        if m <= r_minus || m >= 1.0 {
            return Err(Error::LiftFailure {
                reason: format!("{name} with |{name}| = {m} is outside the open annulus"),
            });
        }
    }
    let a = -r_minus.ln() / std::f64::consts::PI;
    // Lift: w = theta/a - i ln|z| / a, so Im lift in (0, pi).
    let lift = |p: Complex64| Complex64::new(p.arg() / a, -p.norm().ln() / a);
    let lz = lift(z);
    let lw = lift(w);
    let period = 2.0 * std::f64::consts::PI / a;

    let mut best = f64::INFINITY;
    let mut radius = 3i64;
    loop {
        for k in -radius..=radius {
            let shifted = Complex64::new(lw.re + period * k as f64, lw.im);
            best = best.min(strip_distance(lz, shifted));
        }
        // Distances grow monotonically once the real offset exceeds the
        // current minimum's reach; stop when the nearest excluded lift is
        // already worse.
        let next = Complex64::new(lw.re + period * (radius + 1) as f64, lw.im);
        let fence = strip_distance(lz, next).min(strip_distance(
            lz,
            Complex64::new(lw.re - period * (radius + 1) as f64, lw.im),
        ));
        if fence > best {
            return Ok(best);
        }
        radius *= 2;
        if radius > 1 << 20 {
            return Err(Error::LiftFailure {
                reason: "deck minimization did not stabilize".into(),
            });
        }
    }
}

/// Hyperbolic distance of the strip `0 < Im w < pi` in the arctanh
/// normalization, evaluated stably for large real offsets:
/// `d(w1, w2) = arctanh |sinh((w1-w2)/2) / sinh((w1-conj(w2))/2)|`.
pub fn strip_distance(w1: Complex64, w2: Complex64) -> f64 {
    let num = ((w1 - w2) / 2.0).sinh();
    let den = ((w1 - w2.conj()) / 2.0).sinh();
    // For huge real offsets both sinh overflow; their ratio tends to 1.
    if !num.is_finite() || !den.is_finite() {
        let d = (w1.re - w2.re).abs();
        // arctanh(1 - eps) ~ ln(2/eps)/2; the leading term is d/2.
        return d / 2.0;
    }
    let m = (num / den).norm();
    if m >= 1.0 {
        f64::INFINITY
    } else {
        m.atanh()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    // Oracle for the distance convention: p = (1/2) log((1+m)/(1-m)).
    fn half_log_ratio(m: f64) -> f64 {
        0.5 * ((1.0 + m) / (1.0 - m)).ln()
    }

    #[test]
    fn poincare_distance_zero() {
        assert_eq!(poincare_distance(c(0.0, 0.0), c(0.0, 0.0)), 0.0);
    }

    #[test]
    fn poincare_distance_half() {
        let d = poincare_distance(c(0.0, 0.0), c(0.5, 0.0));
        assert!((d - half_log_ratio(0.5)).abs() < 1e-15);
        assert!((d - 0.5493061443340549).abs() < 1e-12);
    }

    #[test]
    fn poincare_distance_symmetric_pair() {
        // Moebius quotient |(0.5+0.5)/(1+0.25)| = 0.8.
        let d = poincare_distance(c(0.5, 0.0), c(-0.5, 0.0));
        assert!((d - half_log_ratio(0.8)).abs() < 1e-14);
        assert!((d - 1.0986122886681098).abs() < 1e-12);
    }

    #[test]
    fn poincare_metric_values() {
        assert!((poincare_metric(c(0.0, 0.0), c(1.0, 0.0)) - 1.0).abs() < 1e-15);
        assert!((poincare_metric(c(0.5, 0.0), c(1.0, 0.0)) - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(poincare_metric(c(0.3, -0.2), c(0.0, 0.0)), 0.0);
    }

    #[test]
    fn moebius_invariance_of_distance() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..200 {
            let a = c(rng.gen_range(-0.7..0.7), rng.gen_range(-0.7..0.7));
            let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let m = MoebiusMap::new(a, c(theta.cos(), theta.sin())).unwrap();
            let z = c(rng.gen_range(-0.6..0.6), rng.gen_range(-0.6..0.6));
            let w = c(rng.gen_range(-0.6..0.6), rng.gen_range(-0.6..0.6));
            let d0 = poincare_distance(z, w);
            let d1 = poincare_distance(m.apply(z), m.apply(w));
            assert!((d0 - d1).abs() < 1e-12, "moebius invariance failed");
        }
    }

    #[test]
    fn moebius_maps_a_to_zero_and_inverts() {
        let m = MoebiusMap::new(c(0.3, -0.4), c(0.0, 1.0)).unwrap();
        assert!(m.apply(m.a).norm() < 1e-14);
        let inv = m.inverse();
        let z = c(0.25, 0.1);
        assert!((inv.apply(m.apply(z)) - z).norm() < 1e-14);
    }

    #[test]
    fn ball_distance_reduces_to_disc() {
        let z = vec![c(0.0, 0.0), c(0.0, 0.0)];
        let w = vec![c(0.5, 0.0), c(0.0, 0.0)];
        assert!((ball_distance(&z, &w) - 0.5493061443340549).abs() < 1e-12);
        assert_eq!(ball_distance(&w, &w), 0.0);
    }

    #[test]
    fn ball_distance_on_a_diameter() {
        // Disc geodesic through both points: m = 0.6/1.09.
        let z = vec![c(0.3, 0.0), c(0.0, 0.0)];
        let w = vec![c(-0.3, 0.0), c(0.0, 0.0)];
        let oracle = half_log_ratio(0.6 / 1.09);
        assert!((ball_distance(&z, &w) - oracle).abs() < 1e-13);
    }

    #[test]
    fn ball_moebius_is_involution() {
        let mut rng = StdRng::seed_from_u64(13);
        for _ in 0..100 {
            let a = vec![
                c(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)),
                c(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)),
            ];
            let w = vec![
                c(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)),
                c(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)),
            ];
            let back = ball_moebius(&a, &ball_moebius(&a, &w));
            assert!(crate::linalg::dist(&back, &w) < 1e-12);
        }
    }

    #[test]
    fn ball_metric_matches_disc_density_on_radius() {
        let z = vec![c(0.5, 0.0), c(0.0, 0.0)];
        let v = vec![c(1.0, 0.0), c(0.0, 0.0)];
        assert!((ball_metric(&z, &v) - 4.0 / 3.0).abs() < 1e-14);
        let z0 = vec![c(0.0, 0.0), c(0.0, 0.0)];
        assert!((ball_metric(&z0, &v) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn scaling_automorphism_values() {
        let a = BallScalingAutomorphism::new(0.5, 2).unwrap();
        let img = a.apply(&[c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!((img[0].norm()) < 1e-15);
        assert!((img[1] - c(0.5, 0.0)).norm() < 1e-15);

        // Fixes (0', 1) for every t.
        for &t in &[0.1, 0.5, 0.9, 0.999] {
            let at = BallScalingAutomorphism::new(t, 2).unwrap();
            let fix = at.apply(&[c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
            assert!((fix[1] - c(1.0, 0.0)).norm() < 1e-14);
            assert!(fix[0].norm() < 1e-14);
        }
    }

    #[test]
    fn scaling_automorphism_ball_identity() {
        // ||A_t(z)||^2 - 1 = (1-t^2)(||z||^2 - 1)/|1 + t z_n|^2.
        let mut rng = StdRng::seed_from_u64(99);
        for _ in 0..500 {
            let t = rng.gen_range(0.05..0.95);
            let a = BallScalingAutomorphism::new(t, 2).unwrap();
            let z = vec![
                c(rng.gen_range(-0.7..0.7), rng.gen_range(-0.7..0.7)),
                c(rng.gen_range(-0.7..0.7), rng.gen_range(-0.7..0.7)),
            ];
            let img = a.apply(&z).unwrap();
            let lhs = norm_sq(&img) - 1.0;
            let denom = (c(1.0, 0.0) + t * z[1]).norm_sqr();
            let rhs = (1.0 - t * t) * (norm_sq(&z) - 1.0) / denom;
            assert!((lhs - rhs).abs() < 1e-12, "ball identity violated");
            if norm_sq(&z) < 1.0 {
                assert!(norm_sq(&img) < 1.0, "A_t must map the ball into itself");
            }
        }
    }

    #[test]
    fn scaling_automorphism_pole() {
        let a = BallScalingAutomorphism::new(0.9999999, 1).unwrap();
        let z = [c(-1.0 / 0.9999999, 0.0)];
        assert!(matches!(a.apply(&z), Err(Error::PoleHit { .. })));
    }

    #[test]
    fn annulus_distance_same_point() {
        assert_eq!(annulus_kobayashi(0.25, c(0.5, 0.0), c(0.5, 0.0)).unwrap(), 0.0);
    }

    #[test]
    fn annulus_distance_same_ray_matches_disc_model_oracle() {
        // Independent oracle: map the k = 0 lifts into the unit disc via
        // w -> Cayley(exp(w)) and use the disc distance. For nearby points
        // the k = 0 deck index is optimal.
        let r: f64 = 0.25;
        let a = -r.ln() / std::f64::consts::PI;
        let lift = |p: Complex64| Complex64::new(p.arg() / a, -p.norm().ln() / a);
        let to_disc = |w: Complex64| {
            let e = w.exp();
            (e - Complex64::i()) / (e + Complex64::i())
        };
        let z = c(0.5, 0.0);
        let w = c(0.7, 0.0);
        let oracle = poincare_distance(to_disc(lift(z)), to_disc(lift(w)));
        let got = annulus_kobayashi(r, z, w).unwrap();
        assert!(
            (got - oracle).abs() < 1e-12,
            "covering distance {got} vs disc-model oracle {oracle}"
        );

        // Deck indices +/-1 must be strictly worse for this pair.
        let period = 2.0 * std::f64::consts::PI / a;
        for k in [-1.0, 1.0] {
            let shifted = Complex64::new(lift(w).re + period * k, lift(w).im);
            assert!(strip_distance(lift(z), shifted) > got);
        }
    }

    #[test]
    fn annulus_distance_symmetry_and_triangle() {
        let mut rng = StdRng::seed_from_u64(2024);
        let r = 0.25;
        let sample = |rng: &mut StdRng| {
            let m = rng.gen_range(0.3..0.95);
            let t = rng.gen_range(0.0..std::f64::consts::TAU);
            Complex64::from_polar(m, t)
        };
        for _ in 0..100 {
            let z = sample(&mut rng);
            let w = sample(&mut rng);
            let u = sample(&mut rng);
            let dzw = annulus_kobayashi(r, z, w).unwrap();
            let dwz = annulus_kobayashi(r, w, z).unwrap();
            assert!((dzw - dwz).abs() < 1e-10, "symmetry violated");
            let dzu = annulus_kobayashi(r, z, u).unwrap();
            let duw = annulus_kobayashi(r, u, w).unwrap();
            assert!(dzw <= dzu + duw + 1e-10, "triangle inequality violated");
        }
    }

    #[test]
    fn annulus_rejects_points_outside() {
        assert!(matches!(
            annulus_kobayashi(0.3, c(0.2, 0.0), c(0.5, 0.0)),
            Err(Error::LiftFailure { .. })
        ));
    }
}
