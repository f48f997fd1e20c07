use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::transforms::{absorb_fading, reduce, DensitySpec, SystemSpec};

use super::charfn::CharFn;
use super::fewbs::FewBsConstants;
use super::inversion::tail_from_charfn;

/// How a tail curve was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Analytic,
    FewBs,
    MonteCarlo,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Analytic => "analytic",
            Method::FewBs => "fewbs",
            Method::MonteCarlo => "mc",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(Method::Analytic),
            "fewbs" => Ok(Method::FewBs),
            "mc" => Ok(Method::MonteCarlo),
            other => Err(Error::Schema(format!("unknown method {other:?}"))),
        }
    }
}

/// Tail probabilities on a threshold grid.
///
/// `err` holds the quadrature error for analytic curves and the standard
/// error for Monte-Carlo curves, whose trial count is in `trials`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailCurve {
    pub method: Method,
    pub eta: Vec<f64>,
    pub p: Vec<f64>,
    pub err: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
}

#[derive(Serialize, Deserialize)]
struct CurveRow {
    eta: f64,
    p: f64,
    err: f64,
    method: String,
}

impl TailCurve {
    /// Check bounds, `p(0) = 1`, and monotonicity up to the stated errors.
    pub fn validate(&self) -> Result<()> {
        let n = self.eta.len();
        if self.p.len() != n || self.err.len() != n {
            return Err(Error::domain("tail curve columns differ in length"));
        }
        for i in 0..n {
            let (eta, p) = (self.eta[i], self.p[i]);
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::domain(format!(
                    "tail probability {p} at eta = {eta} is outside [0, 1]"
                )));
            }
            if eta == 0.0 && p != 1.0 {
                return Err(Error::domain(format!("tail at eta = 0 is {p}, not 1")));
            }
            if i > 0 {
                if !(eta > self.eta[i - 1]) {
                    return Err(Error::domain("thresholds must be strictly increasing"));
                }
                let slack = self.err[i] + self.err[i - 1] + 1e-12;
                if p > self.p[i - 1] + slack {
                    return Err(Error::domain(format!(
                        "tail increases from {} to {p} at eta = {eta}",
                        self.p[i - 1]
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn write_csv(&self, w: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(w);
        for i in 0..self.eta.len() {
            w.serialize(CurveRow {
                eta: self.eta[i],
                p: self.p[i],
                err: self.err[i],
                method: self.method.to_string(),
            })?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let mut rdr = csv::Reader::from_path(path)?;
        let mut curve = TailCurve {
            method: Method::Analytic,
            eta: vec![],
            p: vec![],
            err: vec![],
            trials: None,
        };
        for row in rdr.deserialize::<CurveRow>() {
            let row = row?;
            curve.method = row.method.parse()?;
            curve.eta.push(row.eta);
            curve.p.push(row.p);
            curve.err.push(row.err);
        }
        Ok(curve)
    }

    /// Value at a grid threshold.
    pub fn at(&self, eta: f64) -> Option<(f64, f64)> {
        self.eta
            .iter()
            .position(|e| *e == eta)
            .map(|i| (self.p[i], self.err[i]))
    }
}

fn check_grid(etas: &[f64]) -> Result<()> {
    if etas.iter().any(|e| !(*e >= 0.0 && e.is_finite())) {
        return Err(Error::domain("thresholds must be finite and non-negative"));
    }
    if etas.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::domain("thresholds must be strictly increasing"));
    }
    Ok(())
}

/// Invert `phi` on a grid; grid points are evaluated in parallel.
pub fn tail_curve(phi: &CharFn, etas: &[f64]) -> Result<TailCurve> {
    check_grid(etas)?;
    let points = etas
        .par_iter()
        .map(|&eta| tail_from_charfn(phi, eta))
        .collect::<Result<Vec<_>>>()?;
    let curve = TailCurve {
        method: Method::Analytic,
        eta: etas.to_vec(),
        p: points.iter().map(|t| t.p).collect(),
        err: points.iter().map(|t| t.err).collect(),
        trials: None,
    };
    curve.validate()?;
    Ok(curve)
}

/// Characteristic function of the inverse C/(I+N) of a full system.
///
/// Homogeneous fields without noise use the closed form directly, since
/// neither the intensity nor fading change it. With a power-law path loss
/// only fading is absorbed and the exponent is kept, which avoids
/// re-tabulating the density; other path losses go through the canonical
/// reduction.
pub fn system_charfn(spec: &SystemSpec) -> Result<CharFn> {
    spec.validate()?;
    if let Some(eps) = spec.epsilon() {
        if let (DensitySpec::Homogeneous { .. }, Some(l)) = (&spec.density, spec.dimension) {
            if spec.n == 0.0 {
                return CharFn::homogeneous(eps, l);
            }
        }
        let faded = absorb_fading(&spec.radial_density()?, eps, &spec.fading)?;
        return CharFn::with_noise(faded, eps, spec.k, spec.n);
    }
    let canon = reduce(spec)?;
    CharFn::with_noise(canon.density, 1.0, 1.0, canon.noise)
}

/// Exact tail curve of a system.
pub fn analytic_tail_curve(spec: &SystemSpec, etas: &[f64]) -> Result<TailCurve> {
    tail_curve(&system_charfn(spec)?, etas)
}

/// Few-BS curve of a homogeneous system; fading and intensity do not enter.
pub fn few_bs_curve(spec: &SystemSpec, etas: &[f64]) -> Result<TailCurve> {
    check_grid(etas)?;
    spec.validate()?;
    let (l, eps) = match (&spec.density, spec.dimension, spec.epsilon()) {
        (DensitySpec::Homogeneous { .. }, Some(l), Some(eps)) if spec.n == 0.0 => (l, eps),
        _ => {
            return Err(Error::domain(
                "the few-BS approximation needs a noise-free homogeneous field with power-law path loss",
            ))
        }
    };
    let fb = FewBsConstants::new(eps, l)?;
    let mut curve = TailCurve {
        method: Method::FewBs,
        eta: etas.to_vec(),
        p: Vec::with_capacity(etas.len()),
        err: Vec::with_capacity(etas.len()),
        trials: None,
    };
    for &eta in etas {
        let t = if eta == 0.0 {
            super::inversion::TailPoint { p: 1.0, err: 0.0 }
        } else {
            fb.tail(eta)?
        };
        curve.p.push(t.p);
        curve.err.push(t.err);
    }
    curve.validate()?;
    Ok(curve)
}

/// `n` thresholds spaced evenly in `log(eta)` between `lo` and `hi`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo && n >= 1) {
        return Err(Error::domain(
            "log grid needs 0 < lo <= hi and at least one point",
        ));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    let step = (hi / lo).ln() / (n - 1) as f64;
    let mut g: Vec<f64> = (0..n).map(|i| lo * (step * i as f64).exp()).collect();
    g[n - 1] = hi;
    Ok(g)
}
