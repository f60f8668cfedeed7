//! Structured text description of domains (key-value document, TOML
//! syntax): a tag, model parameters and an optional boundary perturbation
//! given as a symbolic polynomial in the real coordinates `x_j`, `y_j` or
//! as an odd power of the norm.

use serde::{Deserialize, Serialize};

use super::models::CapKind;
use super::{Domain, Perturbation};
use crate::error::Error;
use crate::sympoly::SymPoly;
use crate::Result;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DomainSpec {
    /// One of `unit_disc`, `ball`, `polydisc`, `annulus`, `ellipsoid`,
    /// `d_alpha`, `half_space_cap`, `perturbed_ball`.
    pub tag: String,
    #[serde(default)]
    pub dimension: Option<usize>,
    #[serde(default)]
    pub r_minus: Option<f64>,
    #[serde(default)]
    pub r_plus: Option<f64>,
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub coeffs: Option<Vec<f64>>,
    #[serde(default)]
    pub exponents: Option<Vec<u32>>,
    #[serde(default)]
    pub cap_kind: Option<String>,
    /// Perturbation polynomial in `x1..xn, y1..yn`.
    #[serde(default)]
    pub h_poly: Option<String>,
    /// Alternative perturbation `h_amplitude * ||z||^h_norm_power`.
    #[serde(default)]
    pub h_norm_power: Option<u32>,
    #[serde(default)]
    pub h_amplitude: Option<f64>,
    /// Where the perturbation is centered: `origin` (default) or
    /// `north_pole` for the normal-form position `(0', 1)`.
    #[serde(default)]
    pub h_center: Option<String>,
}

impl DomainSpec {
    pub fn ball(n: usize) -> Self {
        Self {
            tag: "ball".into(),
            dimension: Some(n),
            r_minus: None,
            r_plus: None,
            alpha: None,
            coeffs: None,
            exponents: None,
            cap_kind: None,
            h_poly: None,
            h_norm_power: None,
            h_amplitude: None,
            h_center: None,
        }
    }

    pub fn parse_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(format!("domain spec: {e}")))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("domain spec serializes")
    }

    fn perturbation(&self, n: usize) -> Result<Option<Perturbation>> {
        if let Some(expr) = &self.h_poly {
            if self.h_norm_power.is_some() {
                return Err(Error::Invalid(
                    "give either h_poly or h_norm_power, not both".into(),
                ));
            }
            return Ok(Some(Perturbation::Poly(SymPoly::parse(expr, n)?)));
        }
        if let Some(p) = self.h_norm_power {
            if p < 3 || p % 2 == 0 {
                return Err(Error::Invalid(format!(
                    "h_norm_power must be an odd integer >= 3, got {p}"
                )));
            }
            return Ok(Some(Perturbation::NormPower {
                amplitude: self.h_amplitude.unwrap_or(1.0),
                power: p,
            }));
        }
        Ok(None)
    }

    /// Builds the domain this spec describes.
    pub fn build(&self) -> Result<Domain> {
        let n = self.dimension.unwrap_or(match self.tag.as_str() {
            "unit_disc" | "annulus" => 1,
            _ => 2,
        });
        if n == 0 || n > 3 {
            return Err(Error::Invalid(format!("dimension {n} not supported (1..=3)")));
        }
        match self.tag.as_str() {
            "unit_disc" => Ok(Domain::unit_disc()),
            "ball" => {
                if let Some(h) = self.perturbation(n)? {
                    let north = matches!(self.h_center.as_deref(), Some("north_pole"));
                    Domain::perturbed_ball(n, h, north)
                } else {
                    Domain::ball(n)
                }
            }
            "perturbed_ball" => {
                let h = self.perturbation(n)?.ok_or_else(|| {
                    Error::Invalid("perturbed_ball needs h_poly or h_norm_power".into())
                })?;
                let north = matches!(self.h_center.as_deref(), Some("north_pole"));
                Domain::perturbed_ball(n, h, north)
            }
            "polydisc" => Domain::polydisc(n),
            "annulus" => Domain::annulus(
                self.r_minus.ok_or_else(|| Error::Invalid("annulus needs r_minus".into()))?,
                self.r_plus.unwrap_or(1.0),
            ),
            "ellipsoid" => {
                let coeffs = self
                    .coeffs
                    .clone()
                    .ok_or_else(|| Error::Invalid("ellipsoid needs coeffs".into()))?;
                let exponents = self
                    .exponents
                    .clone()
                    .unwrap_or_else(|| vec![1; coeffs.len()]);
                Domain::ellipsoid(coeffs, exponents)
            }
            "d_alpha" => Domain::d_alpha(
                self.alpha.ok_or_else(|| Error::Invalid("d_alpha needs alpha".into()))?,
            ),
            "half_space_cap" => {
                let kind = match self.cap_kind.as_deref().unwrap_or("bowl") {
                    "flat" => CapKind::Flat,
                    "saddle" => CapKind::Saddle,
                    "bowl" => CapKind::Bowl,
                    other => {
                        return Err(Error::Invalid(format!("unknown cap kind '{other}'")))
                    }
                };
                Domain::half_space_cap(kind)
            }
            other => Err(Error::Invalid(format!("unknown domain tag '{other}'"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_ball() {
        let spec = DomainSpec::parse_toml("tag = \"ball\"\ndimension = 2\n").unwrap();
        let d = spec.build().unwrap();
        assert_eq!(d.dimension(), 2);
        assert_eq!(d.model, Some(super::super::ModelDomain::Ball { n: 2 }));
    }

    #[test]
    fn parse_annulus_normalizes() {
        let spec = DomainSpec::parse_toml("tag = \"annulus\"\nr_minus = 0.5\nr_plus = 2.0\n")
            .unwrap();
        let d = spec.build().unwrap();
        assert_eq!(d.model, Some(super::super::ModelDomain::Annulus { r_minus: 0.25 }));
    }

    #[test]
    fn parse_perturbed_ball_with_poly() {
        let text = "tag = \"ball\"\ndimension = 2\nh_poly = \"0.01*x1^2\"\n";
        let d = DomainSpec::parse_toml(text).unwrap().build().unwrap();
        assert!(d.model.is_none());
        let z = [num_complex::Complex64::new(0.5, 0.0), num_complex::Complex64::new(0.0, 0.0)];
        let expected = -1.0 + 0.25 + 0.01 * 0.25;
        assert!((d.defining.value(&z) - expected).abs() < 1e-15);
    }

    #[test]
    fn round_trip_spec_document() {
        let spec = DomainSpec {
            tag: "ellipsoid".into(),
            dimension: Some(2),
            coeffs: Some(vec![1.0, 2.0]),
            exponents: Some(vec![1, 2]),
            ..DomainSpec::ball(2)
        };
        let text = spec.to_toml();
        let back = DomainSpec::parse_toml(&text).unwrap();
        assert_eq!(spec, back);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(DomainSpec::parse_toml("tag = \"annulus\"\n").unwrap().build().is_err());
        assert!(DomainSpec::parse_toml("tag = \"nope\"\n").unwrap().build().is_err());
        assert!(DomainSpec::parse_toml("tag = 3\n").is_err());
        let both = "tag = \"ball\"\nh_poly = \"x1\"\nh_norm_power = 3\n";
        assert!(DomainSpec::parse_toml(both).unwrap().build().is_err());
    }
}
