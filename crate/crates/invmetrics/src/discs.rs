//! Analytic discs with finite coefficient expansions, boundary traces,
//! Fourier analysis for holomorphic-extension tests and a grid estimator
//! for the Hoelder-1/2 norm.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::Error;
use crate::Result;

/// Polynomial map from the closed unit disc to C^n:
/// `f(lambda) = sum_{j=0..d} c_j lambda^j` with `c_j` in C^n.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticDisc {
    pub n: usize,
    /// `(degree + 1) x n` coefficient rows.
    pub coefficients: Vec<Vec<Complex64>>,
}

impl AnalyticDisc {
    pub fn new(n: usize, coefficients: Vec<Vec<Complex64>>) -> Result<Self> {
        if n == 0 || coefficients.is_empty() {
            return Err(Error::Invalid("disc needs n >= 1 and at least one row".into()));
        }
        if coefficients.iter().any(|row| row.len() != n) {
            return Err(Error::Invalid("coefficient rows must have length n".into()));
        }
        Ok(Self { n, coefficients })
    }

    pub fn constant(z: &[Complex64]) -> Self {
        Self { n: z.len(), coefficients: vec![z.to_vec()] }
    }

    /// Affine disc `z + lambda w`.
    pub fn affine(z: &[Complex64], w: &[Complex64]) -> Self {
        Self { n: z.len(), coefficients: vec![z.to_vec(), w.to_vec()] }
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// Horner evaluation.
    pub fn evaluate(&self, lambda: Complex64) -> Vec<Complex64> {
        let mut acc = self.coefficients.last().expect("nonempty").clone();
        for row in self.coefficients.iter().rev().skip(1) {
            for (a, c) in acc.iter_mut().zip(row) {
                *a = *a * lambda + c;
            }
        }
        acc
    }

    /// Derivative `f'(lambda)` by Horner on the derived coefficients.
    pub fn derivative(&self, lambda: Complex64) -> Vec<Complex64> {
        if self.coefficients.len() == 1 {
            return vec![Complex64::new(0.0, 0.0); self.n];
        }
        let mut acc = vec![Complex64::new(0.0, 0.0); self.n];
        for j in (1..self.coefficients.len()).rev() {
            for (a, c) in acc.iter_mut().zip(&self.coefficients[j]) {
                *a = *a * lambda + c * j as f64;
            }
        }
        acc
    }

    /// Reparametrized disc `lambda -> f(s lambda)`.
    pub fn scaled_parameter(&self, s: Complex64) -> AnalyticDisc {
        let mut coefficients = self.coefficients.clone();
        let mut p = Complex64::new(1.0, 0.0);
        for row in coefficients.iter_mut() {
            for c in row.iter_mut() {
                *c *= p;
            }
            p *= s;
        }
        AnalyticDisc { n: self.n, coefficients }
    }

    /// Uniform boundary samples `f(e^{2 pi i j / count})`.
    pub fn boundary_trace(&self, count: usize) -> Result<BoundaryTrace> {
        if !count.is_power_of_two() {
            return Err(Error::Invalid("trace length must be a power of two".into()));
        }
        if count < 4 * (self.degree() + 1) {
            return Err(Error::Invalid(format!(
                "trace length {count} must be >= 4 (degree + 1) = {}",
                4 * (self.degree() + 1)
            )));
        }
        let tau = std::f64::consts::TAU;
        let samples = (0..count)
            .map(|j| self.evaluate(Complex64::from_polar(1.0, tau * j as f64 / count as f64)))
            .collect();
        Ok(BoundaryTrace { n: self.n, samples })
    }

    /// Sup-norm gap between two discs measured on the boundary circle (by
    /// the maximum principle this equals the closed-disc sup of the
    /// holomorphic difference).
    pub fn sup_gap(&self, other: &AnalyticDisc, count: usize) -> f64 {
        let tau = std::f64::consts::TAU;
        (0..count)
            .map(|j| {
                let l = Complex64::from_polar(1.0, tau * j as f64 / count as f64);
                crate::linalg::dist(&self.evaluate(l), &other.evaluate(l))
            })
            .fold(0.0, f64::max)
    }

    /// Drops trailing negligible coefficient rows (relative to the largest).
    pub fn trimmed(mut self, rel_tol: f64) -> Self {
        let scale = self
            .coefficients
            .iter()
            .flat_map(|r| r.iter())
            .map(|c| c.norm())
            .fold(0.0f64, f64::max)
            .max(1e-300);
        while self.coefficients.len() > 1 {
            let last = self.coefficients.last().unwrap();
            if last.iter().map(|c| c.norm()).fold(0.0f64, f64::max) > rel_tol * scale {
                break;
            }
            self.coefficients.pop();
        }
        self
    }

    // -- text serialization ------------------------------------------------

    /// Structured text form: dimension, degree, one row of interleaved
    /// re/im pairs per coefficient. Floats use the shortest round-trip
    /// decimal form, so serialize/parse is bit exact for finite values.
    pub fn to_text(&self) -> String {
        let mut out = String::from("analytic-disc v1\n");
        out.push_str(&format!("dimension {}\n", self.n));
        out.push_str(&format!("degree {}\n", self.degree()));
        for row in &self.coefficients {
            out.push('c');
            for c in row {
                out.push_str(&format!(" {} {}", c.re, c.im));
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty document".into()))?;
        if header.trim() != "analytic-disc v1" {
            return Err(Error::Parse(format!("unexpected header '{header}'")));
        }
        let dim_line = lines.next().ok_or_else(|| Error::Parse("missing dimension".into()))?;
        let n: usize = parse_kv(dim_line, "dimension")?;
        if n == 0 || n > 64 {
            return Err(Error::Parse(format!("dimension {n} out of range")));
        }
        let deg_line = lines.next().ok_or_else(|| Error::Parse("missing degree".into()))?;
        let degree: usize = parse_kv(deg_line, "degree")?;
        if degree > 16_384 {
            return Err(Error::Parse(format!("degree {degree} out of range")));
        }
        let mut coefficients = Vec::with_capacity(degree + 1);
        for _ in 0..=degree {
            let line = lines.next().ok_or_else(|| Error::Parse("missing coefficient row".into()))?;
            let mut parts = line.split_whitespace();
            if parts.next() != Some("c") {
                return Err(Error::Parse("coefficient rows must start with 'c'".into()));
            }
            let nums: Vec<f64> = parts
                .map(|p| p.parse::<f64>().map_err(|_| Error::Parse(format!("bad float '{p}'"))))
                .collect::<Result<_>>()?;
            if nums.len() != 2 * n {
                return Err(Error::Parse(format!(
                    "row has {} numbers, expected {}",
                    nums.len(),
                    2 * n
                )));
            }
            coefficients.push(
                (0..n).map(|k| Complex64::new(nums[2 * k], nums[2 * k + 1])).collect(),
            );
        }
        if lines.next().is_some() {
            return Err(Error::Parse("trailing content after coefficient rows".into()));
        }
        AnalyticDisc::new(n, coefficients)
    }
}

fn parse_kv<T: std::str::FromStr>(line: &str, key: &str) -> Result<T> {
    let mut parts = line.split_whitespace();
    if parts.next() != Some(key) {
        return Err(Error::Parse(format!("expected '{key} <value>', got '{line}'")));
    }
    let v = parts.next().ok_or_else(|| Error::Parse(format!("missing value for {key}")))?;
    if parts.next().is_some() {
        return Err(Error::Parse(format!("trailing tokens after {key}")));
    }
    v.parse().map_err(|_| Error::Parse(format!("bad value for {key}")))
}

/// Samples of a map on the uniform grid `exp(2 pi i j / N)`, `N` a power of
/// two.
#[derive(Debug, Clone)]
pub struct BoundaryTrace {
    pub n: usize,
    pub samples: Vec<Vec<Complex64>>,
}

impl BoundaryTrace {
    pub fn from_fn(
        n: usize,
        count: usize,
        mut f: impl FnMut(Complex64) -> Vec<Complex64>,
    ) -> Result<Self> {
        if !count.is_power_of_two() || count < 8 {
            return Err(Error::Invalid("trace length must be a power of two >= 8".into()));
        }
        let tau = std::f64::consts::TAU;
        let samples: Vec<Vec<Complex64>> = (0..count)
            .map(|j| f(Complex64::from_polar(1.0, tau * j as f64 / count as f64)))
            .collect();
        if samples.iter().any(|s| s.len() != n) {
            return Err(Error::Invalid("sample dimension mismatch".into()));
        }
        Ok(Self { n, samples })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Mean squared sample energy `(1/N) sum |g_j|^2` (Parseval left side).
    pub fn sample_energy(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| crate::linalg::norm_sq(s))
            .sum::<f64>()
            / self.len() as f64
    }
}

/// Two-sided Fourier data of a boundary trace: coefficients indexed
/// `-N/2 .. N/2 - 1` per component, with the energies of the negative and
/// nonnegative index ranges.
#[derive(Debug, Clone)]
pub struct FourierTail {
    pub n: usize,
    pub count: usize,
    /// Per component: coefficients in bin order `0, 1, ..., N/2-1, -N/2, ..., -1`
    /// (standard FFT layout, already divided by N).
    pub coefficients: Vec<Vec<Complex64>>,
    pub negative_energy: f64,
    pub positive_energy: f64,
}

impl FourierTail {
    /// Coefficient of `zeta^k` for component `comp`, `-N/2 <= k < N/2`.
    pub fn coefficient(&self, comp: usize, k: i64) -> Complex64 {
        let nn = self.count as i64;
        assert!(k >= -nn / 2 && k < nn / 2);
        let bin = if k >= 0 { k } else { k + nn } as usize;
        self.coefficients[comp][bin]
    }

    /// Relative negative energy `E_- / (E_- + E_+)` (0 when the trace
    /// vanishes identically).
    pub fn relative_negative_energy(&self) -> f64 {
        let total = self.negative_energy + self.positive_energy;
        if total == 0.0 {
            0.0
        } else {
            self.negative_energy / total
        }
    }
}

/// Discrete Fourier transform of a boundary trace; the nonnegative modes
/// form the candidate holomorphic extension.
pub struct ExtensionResidual {
    pub tail: FourierTail,
    /// Analytic disc synthesized from the modes `k >= 0`.
    pub extension: AnalyticDisc,
}

/// Fourier data of the trace plus the holomorphic part as a disc. The
/// negative energy near zero certifies approximate holomorphic
/// extendability of the trace.
pub fn holomorphic_extension_residual(trace: &BoundaryTrace) -> Result<ExtensionResidual> {
    let count = trace.len();
    if count < 8 {
        return Err(Error::Invalid("need at least 8 samples".into()));
    }
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(count);
    let mut coefficients = Vec::with_capacity(trace.n);
    let mut neg = 0.0f64;
    let mut pos = 0.0f64;
    for comp in 0..trace.n {
        let mut buf: Vec<Complex64> = trace.samples.iter().map(|s| s[comp]).collect();
        fft.process(&mut buf);
        for c in buf.iter_mut() {
            *c /= count as f64;
        }
        for (bin, c) in buf.iter().enumerate() {
            if bin >= count / 2 {
                neg += c.norm_sqr();
            } else {
                pos += c.norm_sqr();
            }
        }
        coefficients.push(buf);
    }
    // Synthesize the nonnegative part, trimming trailing zeros.
    let mut rows: Vec<Vec<Complex64>> = (0..count / 2)
        .map(|j| (0..trace.n).map(|comp| coefficients[comp][j]).collect())
        .collect();
    while rows.len() > 1 {
        let last = rows.last().unwrap();
        if last.iter().map(|c| c.norm()).fold(0.0f64, f64::max) > 1e-14 {
            break;
        }
        rows.pop();
    }
    let extension = AnalyticDisc::new(trace.n, rows)?;
    Ok(ExtensionResidual {
        tail: FourierTail {
            n: trace.n,
            count,
            coefficients,
            negative_energy: neg,
            positive_energy: pos,
        },
        extension,
    })
}

/// Grid estimate of the Hoelder-1/2 data of a boundary trace: the maximal
/// difference quotient over dyadically spaced pairs plus the sup norm. A
/// lower estimate of the true norm (it is a max over a finite set).
#[derive(Debug, Clone, Copy)]
pub struct HolderEstimate {
    pub sup: f64,
    pub quotient: f64,
}

impl HolderEstimate {
    pub fn norm(&self) -> f64 {
        self.sup + self.quotient
    }
}

pub fn holder_half_norm_trace(trace: &BoundaryTrace) -> HolderEstimate {
    let count = trace.len();
    let sup = trace
        .samples
        .iter()
        .map(|s| crate::linalg::norm(s))
        .fold(0.0, f64::max);
    let mut quotient = 0.0f64;
    let mut gap = 1usize;
    while gap <= count / 2 {
        // Chord |zeta_j - zeta_{j+gap}| = 2 sin(pi gap / N).
        let chord = 2.0 * (std::f64::consts::PI * gap as f64 / count as f64).sin();
        let denom = chord.sqrt();
        for j in 0..count {
            let k = (j + gap) % count;
            let d = crate::linalg::dist(&trace.samples[j], &trace.samples[k]);
            quotient = quotient.max(d / denom);
        }
        gap *= 2;
    }
    HolderEstimate { sup, quotient }
}

/// Hoelder estimate of a disc via its boundary trace (`count >= 256`).
pub fn holder_half_norm(disc: &AnalyticDisc, count: usize) -> Result<HolderEstimate> {
    let count = count.max(256).next_power_of_two().max(4 * (disc.degree() + 1)).next_power_of_two();
    Ok(holder_half_norm_trace(&disc.boundary_trace(count)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn evaluate_matches_naive_sum() {
        let mut rng = StdRng::seed_from_u64(3);
        let coeffs: Vec<Vec<Complex64>> = (0..4)
            .map(|_| {
                (0..2)
                    .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect()
            })
            .collect();
        let f = AnalyticDisc::new(2, coeffs.clone()).unwrap();
        let l = c(0.5, 0.0);
        let naive: Vec<Complex64> = (0..2)
            .map(|k| {
                (0..4)
                    .map(|j| coeffs[j][k] * l.powu(j as u32))
                    .sum::<Complex64>()
            })
            .collect();
        assert!(crate::linalg::dist(&f.evaluate(l), &naive) < 1e-14);
    }

    #[test]
    fn evaluate_trivial_cases() {
        let z = vec![c(0.3, -0.1), c(0.2, 0.4)];
        let f = AnalyticDisc::constant(&z);
        assert_eq!(f.evaluate(c(0.7, 0.2)), z);

        let e1 = AnalyticDisc::affine(&[c(0.0, 0.0), c(0.0, 0.0)], &[c(1.0, 0.0), c(0.0, 0.0)]);
        let at_i = e1.evaluate(Complex64::i());
        assert!((at_i[0] - Complex64::i()).norm() < 1e-15);
        assert_eq!(at_i[1], c(0.0, 0.0));
    }

    #[test]
    fn derivative_matches_fd() {
        let f = AnalyticDisc::new(
            1,
            vec![vec![c(0.1, 0.0)], vec![c(0.0, 0.5)], vec![c(-0.3, 0.2)]],
        )
        .unwrap();
        let l = c(0.2, -0.3);
        let h = 1e-6;
        let fd = (f.evaluate(l + c(h, 0.0))[0] - f.evaluate(l - c(h, 0.0))[0]) / (2.0 * h);
        assert!((f.derivative(l)[0] - fd).norm() < 1e-9);
    }

    #[test]
    fn extension_residual_of_pure_modes() {
        // g = zeta^2: holomorphic, no negative energy.
        let t = BoundaryTrace::from_fn(1, 64, |z| vec![z * z]).unwrap();
        let res = holomorphic_extension_residual(&t).unwrap();
        assert!(res.tail.negative_energy < 1e-25);
        assert!((res.tail.positive_energy - 1.0).abs() < 1e-12);
        assert!((res.extension.coefficients[2][0] - c(1.0, 0.0)).norm() < 1e-12);

        // g = conj(zeta): single k = -1 mode.
        let t = BoundaryTrace::from_fn(1, 64, |z| vec![z.conj()]).unwrap();
        let res = holomorphic_extension_residual(&t).unwrap();
        assert!((res.tail.negative_energy - 1.0).abs() < 1e-12);
        assert!(res.tail.positive_energy < 1e-25);
        assert!((res.tail.coefficient(0, -1) - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn parseval_and_round_trip() {
        let mut rng = StdRng::seed_from_u64(17);
        for _ in 0..20 {
            let deg = rng.gen_range(0..12usize);
            let coeffs: Vec<Vec<Complex64>> = (0..=deg)
                .map(|_| vec![c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))])
                .collect();
            let f = AnalyticDisc::new(1, coeffs).unwrap();
            let trace = f.boundary_trace(128).unwrap();
            let res = holomorphic_extension_residual(&trace).unwrap();
            // Parseval.
            let coeff_energy = res.tail.negative_energy + res.tail.positive_energy;
            assert!((trace.sample_energy() - coeff_energy).abs() < 1e-10);
            // Round trip disc -> trace -> fft -> disc.
            assert!(res.tail.negative_energy < 1e-22);
            let back = res.extension;
            assert_eq!(back.degree(), f.degree());
            for (r1, r2) in back.coefficients.iter().zip(&f.coefficients) {
                assert!(crate::linalg::dist(r1, r2) < 1e-10);
            }
        }
    }

    #[test]
    fn holder_quotient_examples() {
        let constant = AnalyticDisc::constant(&[c(0.3, 0.1)]);
        let h = holder_half_norm(&constant, 256).unwrap();
        assert_eq!(h.quotient, 0.0);

        // f(lambda) = lambda e_1: quotient maximized at antipodal pairs,
        // |zeta - eta| / |zeta - eta|^{1/2} = sqrt(2).
        let e1 = AnalyticDisc::affine(&[c(0.0, 0.0)], &[c(1.0, 0.0)]);
        let h = holder_half_norm(&e1, 256).unwrap();
        assert!((h.quotient - 2f64.sqrt()).abs() < 1e-12);
        assert!((h.sup - 1.0).abs() < 1e-12);
    }

    #[test]
    fn holder_estimator_stable_under_refinement_for_sqrt_trace() {
        // Square-root boundary singularity: g(zeta) = sqrt(1 - zeta)
        // (principal branch) is exactly C^{1/2}.
        let make = |count: usize| {
            BoundaryTrace::from_fn(1, count, |z| vec![(Complex64::new(1.0, 0.0) - z).sqrt()])
                .unwrap()
        };
        let h256 = holder_half_norm_trace(&make(256));
        let h512 = holder_half_norm_trace(&make(512));
        // Monotone under refinement and stable within 5%.
        assert!(h512.quotient >= h256.quotient - 1e-12);
        assert!((h512.quotient - h256.quotient) / h256.quotient < 0.05);
    }

    #[test]
    fn holder_monotone_under_refinement_random_disc() {
        let mut rng = StdRng::seed_from_u64(29);
        let coeffs: Vec<Vec<Complex64>> = (0..6)
            .map(|_| vec![c(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5))])
            .collect();
        let f = AnalyticDisc::new(1, coeffs).unwrap();
        let a = holder_half_norm(&f, 256).unwrap();
        let b = holder_half_norm(&f, 512).unwrap();
        assert!(b.quotient + 1e-12 >= a.quotient);
    }

    #[test]
    fn text_round_trip_bit_exact() {
        let f = AnalyticDisc::new(
            2,
            vec![
                vec![c(0.1, -0.25), c(1.0 / 3.0, 0.0)],
                vec![c(-0.0, 1e-300), c(2.5e17, -3.125)],
            ],
        )
        .unwrap();
        let text = f.to_text();
        let back = AnalyticDisc::from_text(&text).unwrap();
        assert_eq!(f.n, back.n);
        assert_eq!(f.coefficients.len(), back.coefficients.len());
        for (r1, r2) in f.coefficients.iter().zip(&back.coefficients) {
            for (a, b) in r1.iter().zip(r2) {
                assert_eq!(a.re.to_bits(), b.re.to_bits());
                assert_eq!(a.im.to_bits(), b.im.to_bits());
            }
        }
    }

    #[test]
    fn text_parse_rejects_malformed() {
        assert!(AnalyticDisc::from_text("").is_err());
        assert!(AnalyticDisc::from_text("analytic-disc v1\ndimension 0\ndegree 0\nc\n").is_err());
        assert!(AnalyticDisc::from_text("analytic-disc v1\ndimension 1\ndegree 1\nc 1 2\n").is_err());
        assert!(
            AnalyticDisc::from_text("analytic-disc v1\ndimension 1\ndegree 0\nc 1 2\nextra\n")
                .is_err()
        );
    }

    #[test]
    fn trace_length_validation() {
        let f = AnalyticDisc::affine(&[c(0.0, 0.0)], &[c(1.0, 0.0)]);
        assert!(f.boundary_trace(4).is_err()); // < 4 (d+1)
        assert!(f.boundary_trace(12).is_err()); // not a power of two
        assert!(f.boundary_trace(8).is_ok());
    }
}
