use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point_process::{
    homogeneous_equivalent, unit_sphere_measure, LineDensity, RadialDensity, TabulatedDensity,
};

use super::fading::{absorb_fading, FadingModel};
use super::pathloss::{canonicalize_pathloss, PathLossModel};

/// How the BS density of a system is described in a spec file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DensitySpec {
    /// Uniform intensity `lambda0` in `dimension` dimensions.
    Homogeneous {
        lambda0: f64,
    },
    PowerLaw {
        c: f64,
        p: f64,
    },
    Tabulated(TabulatedDensity),
    /// Two-column `(r, lambda)` CSV, resolved relative to the spec file.
    Csv {
        path: PathBuf,
    },
    Shifted {
        base: LineDensity,
        y: f64,
    },
}

impl From<RadialDensity> for DensitySpec {
    fn from(d: RadialDensity) -> Self {
        match d {
            RadialDensity::PowerLaw { c, p } => DensitySpec::PowerLaw { c, p },
            RadialDensity::Tabulated(t) => DensitySpec::Tabulated(t),
            RadialDensity::Shifted { base, y } => DensitySpec::Shifted { base, y },
        }
    }
}

/// A complete system: BS density, path loss, fading, transmit gain `K` and
/// noise power `N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub density: DensitySpec,
    pub pathloss: PathLossModel,
    #[serde(default)]
    pub fading: FadingModel,
    #[serde(rename = "K", default = "one")]
    pub k: f64,
    #[serde(rename = "N", default)]
    pub n: f64,
    /// Needed for homogeneous densities; informational otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
}

fn one() -> f64 {
    1.0
}

/// A system reduced to path loss `1/R`, unit gain and no fading; only the
/// density and the residual noise remain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CanonicalSystem {
    pub density: RadialDensity,
    pub noise: f64,
}

impl CanonicalSystem {
    pub fn to_spec(&self) -> SystemSpec {
        SystemSpec {
            density: self.density.clone().into(),
            pathloss: PathLossModel::inverse_power(1.0),
            fading: FadingModel::default(),
            k: 1.0,
            n: self.noise,
            dimension: None,
        }
    }
}

impl SystemSpec {
    /// Homogeneous `l`-dimensional system with path loss `R^-epsilon`.
    pub fn homogeneous(lambda0: f64, l: usize, epsilon: f64) -> Self {
        SystemSpec {
            density: DensitySpec::Homogeneous { lambda0 },
            pathloss: PathLossModel::inverse_power(epsilon),
            fading: FadingModel::default(),
            k: 1.0,
            n: 0.0,
            dimension: Some(l),
        }
    }

    pub fn with_density(density: RadialDensity, pathloss: PathLossModel) -> Self {
        SystemSpec {
            density: density.into(),
            pathloss,
            fading: FadingModel::default(),
            k: 1.0,
            n: 0.0,
            dimension: None,
        }
    }

    pub fn with_fading(mut self, fading: FadingModel) -> Self {
        self.fading = fading;
        self
    }

    pub fn with_noise(mut self, k: f64, n: f64) -> Self {
        self.k = k;
        self.n = n;
        self
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Read a spec file; relative CSV paths are resolved against its directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut spec = Self::from_json(&std::fs::read_to_string(path)?)?;
        if let DensitySpec::Csv { path: csv } = &mut spec.density {
            if csv.is_relative() {
                if let Some(dir) = path.parent() {
                    *csv = dir.join(&*csv);
                }
            }
        }
        Ok(spec)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn epsilon(&self) -> Option<f64> {
        self.pathloss.exponent()
    }

    /// Radial density as seen from the MS.
    pub fn radial_density(&self) -> Result<RadialDensity> {
        Ok(match &self.density {
            DensitySpec::Homogeneous { lambda0 } => {
                let l = self
                    .dimension
                    .ok_or_else(|| Error::Schema("homogeneous density needs a dimension".into()))?;
                homogeneous_equivalent(*lambda0, l)?
            }
            DensitySpec::PowerLaw { c, p } => RadialDensity::power_law(*c, *p),
            DensitySpec::Tabulated(t) => RadialDensity::Tabulated(t.clone()),
            DensitySpec::Csv { path } => {
                RadialDensity::Tabulated(TabulatedDensity::from_csv(path)?)
            }
            DensitySpec::Shifted { base, y } => RadialDensity::Shifted {
                base: base.clone(),
                y: *y,
            },
        })
    }

    /// Parameter checks plus stability of the density under the path loss.
    pub fn validate(&self) -> Result<()> {
        if !(self.k > 0.0 && self.k.is_finite()) {
            return Err(Error::domain("K must be positive"));
        }
        if !(self.n >= 0.0 && self.n.is_finite()) {
            return Err(Error::domain("N must be non-negative"));
        }
        if let Some(l) = self.dimension {
            unit_sphere_measure(l)?;
        }
        self.fading.validate()?;
        self.pathloss.validate()?;
        let density = self.radial_density()?;
        match self.pathloss.exponent() {
            Some(eps) => density.check_stable(eps),
            None => canonicalize_pathloss(&density, &self.pathloss)?.check_stable(1.0),
        }
    }

    /// Replace fading by the equivalent change of density.
    ///
    /// Needs a power-law path loss; with a general path loss the fading is
    /// absorbed after canonicalization instead, see [`reduce`].
    pub fn absorb_fading(&self) -> Result<SystemSpec> {
        self.fading.validate()?;
        let eps = self.epsilon().ok_or_else(|| {
            Error::Equivalence(
                "fading absorption needs a power-law path loss; reduce the path loss first".into(),
            )
        })?;
        let density = match (&self.density, self.dimension) {
            (DensitySpec::Homogeneous { lambda0 }, Some(l)) => DensitySpec::Homogeneous {
                lambda0: lambda0 * self.fading.moment(l as f64 / eps)?,
            },
            _ => absorb_fading(&self.radial_density()?, eps, &self.fading)?.into(),
        };
        Ok(SystemSpec {
            density,
            fading: FadingModel::default(),
            ..self.clone()
        })
    }

    /// Replace the path loss by `1/R` through a change of density.
    pub fn canonicalize_pathloss(&self) -> Result<SystemSpec> {
        let density = canonicalize_pathloss(&self.radial_density()?, &self.pathloss)?;
        Ok(SystemSpec {
            density: density.into(),
            pathloss: PathLossModel::inverse_power(1.0),
            ..self.clone()
        })
    }

    /// Normalize `K` to 1 and, for homogeneous and power-law densities,
    /// rescale distances to a reference intensity, folding both into `N`.
    pub fn canonicalize_noise(&self) -> Result<SystemSpec> {
        let eps = self.epsilon();
        match (&self.density, self.dimension, eps) {
            (DensitySpec::Homogeneous { lambda0 }, Some(l), Some(eps)) => {
                let n = canonicalize_noise(*lambda0, eps, self.k, self.n, l)?;
                Ok(SystemSpec {
                    density: DensitySpec::Homogeneous { lambda0: 1.0 },
                    k: 1.0,
                    n,
                    ..self.clone()
                })
            }
            (_, _, Some(eps)) if self.n > 0.0 => {
                if let RadialDensity::PowerLaw { c, p } = self.radial_density()? {
                    if c > 0.0 {
                        let (density, n) = rescale_power_law(c, p, eps, self.k, self.n);
                        return Ok(SystemSpec {
                            density: density.into(),
                            k: 1.0,
                            n,
                            ..self.clone()
                        });
                    }
                }
                Ok(self.unit_gain())
            }
            _ => Ok(self.unit_gain()),
        }
    }

    fn unit_gain(&self) -> SystemSpec {
        SystemSpec {
            k: 1.0,
            n: self.n / self.k,
            ..self.clone()
        }
    }
}

/// Stretch distances of `c r^p` by `a` so that the density becomes
/// `(p+1) r^p` (unit mass within unit distance), returning the new density
/// and noise `N / (K a^eps)`.
fn rescale_power_law(c: f64, p: f64, eps: f64, k: f64, n: f64) -> (RadialDensity, f64) {
    let a = (c / (p + 1.0)).powf(1.0 / (p + 1.0));
    (RadialDensity::power_law(p + 1.0, p), n / (k * a.powf(eps)))
}

/// Noise power of the equivalent homogeneous system with unit density and
/// unit gain: `N lambda0^(-eps/l) / K`.
pub fn canonicalize_noise(lambda0: f64, epsilon: f64, k: f64, n: f64, l: usize) -> Result<f64> {
    unit_sphere_measure(l)?;
    if !(lambda0 > 0.0 && k > 0.0 && n >= 0.0) {
        return Err(Error::domain("need lambda0 > 0, K > 0 and N >= 0"));
    }
    if !(epsilon > l as f64) {
        return Err(Error::stability(format!(
            "path-loss exponent {epsilon} must exceed the dimension {l}"
        )));
    }
    Ok(n * lambda0.powf(-epsilon / l as f64) / k)
}

/// Reduce a system to its canonical form: fading is absorbed, the path loss
/// becomes `1/R`, and the gain is folded into the noise.
///
/// For power-law path losses fading is absorbed first; a general path loss
/// has no exponent to absorb against, so there the path loss is
/// canonicalized first and fading absorbed with unit exponent. The two
/// orders agree whenever both apply.
pub fn reduce(spec: &SystemSpec) -> Result<CanonicalSystem> {
    spec.validate()?;
    let density = spec.radial_density()?;
    let density = match spec.epsilon() {
        Some(eps) => {
            let faded = absorb_fading(&density, eps, &spec.fading)?;
            canonicalize_pathloss(&faded, &spec.pathloss)?
        }
        None => {
            let canon = canonicalize_pathloss(&density, &spec.pathloss)?;
            absorb_fading(&canon, 1.0, &spec.fading)?
        }
    };
    let noise = spec.n / spec.k;
    if noise > 0.0 {
        if let RadialDensity::PowerLaw { c, p } = density {
            if c > 0.0 {
                let (density, noise) = rescale_power_law(c, p, 1.0, 1.0, noise);
                return Ok(CanonicalSystem { density, noise });
            }
        }
    }
    Ok(CanonicalSystem { density, noise })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noise_arithmetic() {
        assert_eq!(canonicalize_noise(4.0, 4.0, 2.0, 8.0, 2).unwrap(), 0.25);
        assert_eq!(canonicalize_noise(1.0, 3.0, 1.0, 0.7, 1).unwrap(), 0.7);
        assert!(matches!(
            canonicalize_noise(1.0, 2.0, 1.0, 1.0, 2),
            Err(Error::Stability(_))
        ));
    }

    #[test]
    fn json_round_trip() {
        let spec = SystemSpec::homogeneous(1.0, 2, 4.0)
            .with_fading(FadingModel::LogNormal { sigma_db: 8.0 })
            .with_noise(2.0, 0.5);
        let text = spec.to_json().unwrap();
        assert!(text.contains("\"K\""));
        assert_eq!(SystemSpec::from_json(&text).unwrap(), spec);
    }

    #[test]
    fn unknown_fields_and_kinds_are_schema_errors() {
        let bad =
            r#"{"density": {"kind": "blob"}, "pathloss": {"kind": "inverse_power", "epsilon": 4}}"#;
        assert!(matches!(SystemSpec::from_json(bad), Err(Error::Schema(_))));
        let extra = r#"{"density": {"kind": "power_law", "c": 1, "p": 0}, "pathloss": {"kind": "inverse_power", "epsilon": 4}, "colour": 1}"#;
        assert!(matches!(
            SystemSpec::from_json(extra),
            Err(Error::Schema(_))
        ));
    }
}
