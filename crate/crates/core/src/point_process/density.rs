use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Piecewise-linear table of a non-negative function, zero outside its grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TableData", into = "TableData")]
pub struct Table {
    x: Vec<f64>,
    v: Vec<f64>,
    /// Integral from `x[0]` to `x[i]`.
    cum: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct TableData {
    x: Vec<f64>,
    values: Vec<f64>,
}

impl TryFrom<TableData> for Table {
    type Error = Error;
    fn try_from(d: TableData) -> Result<Self> {
        Table::new(d.x, d.values)
    }
}

impl From<Table> for TableData {
    fn from(t: Table) -> Self {
        TableData {
            x: t.x,
            values: t.v,
        }
    }
}

impl Table {
    pub fn new(x: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if x.len() != v.len() || x.len() < 2 {
            return Err(Error::Schema(
                "table needs at least two points and equal-length columns".into(),
            ));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) || x.iter().any(|t| !t.is_finite()) {
            return Err(Error::Schema(
                "table abscissae must be finite and strictly increasing".into(),
            ));
        }
        if v.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return Err(Error::domain(
                "density values must be finite and non-negative",
            ));
        }
        let mut cum = Vec::with_capacity(x.len());
        cum.push(0.0);
        for i in 1..x.len() {
            cum.push(cum[i - 1] + 0.5 * (v[i] + v[i - 1]) * (x[i] - x[i - 1]));
        }
        Ok(Self { x, v, cum })
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn values(&self) -> &[f64] {
        &self.v
    }

    pub fn first(&self) -> f64 {
        self.x[0]
    }

    pub fn last(&self) -> f64 {
        self.x[self.x.len() - 1]
    }

    pub fn total(&self) -> f64 {
        self.cum[self.cum.len() - 1]
    }

    pub fn max(&self) -> f64 {
        self.v.iter().cloned().fold(0.0, f64::max)
    }

    /// Index `i` with `x[i] <= t < x[i+1]`, for `t` inside the grid.
    fn segment(&self, t: f64) -> usize {
        let i = self.x.partition_point(|&xi| xi <= t);
        i.saturating_sub(1).min(self.x.len() - 2)
    }

    pub fn value(&self, t: f64) -> f64 {
        if t < self.first() || t > self.last() || t.is_nan() {
            return 0.0;
        }
        let i = self.segment(t);
        let w = (t - self.x[i]) / (self.x[i + 1] - self.x[i]);
        self.v[i] + w * (self.v[i + 1] - self.v[i])
    }

    /// Integral from `x[0]` to `t` (clamped to the grid).
    pub fn integral_to(&self, t: f64) -> f64 {
        if t <= self.first() {
            return 0.0;
        }
        if t >= self.last() {
            return self.total();
        }
        let i = self.segment(t);
        let dt = t - self.x[i];
        let slope = (self.v[i + 1] - self.v[i]) / (self.x[i + 1] - self.x[i]);
        self.cum[i] + self.v[i] * dt + 0.5 * slope * dt * dt
    }

    /// Smallest `t` with `integral_to(t) = s`, for `0 <= s <= total`.
    pub fn inverse_integral(&self, s: f64) -> f64 {
        if s <= 0.0 {
            // Skip a leading zero-density stretch.
            let i = self.cum.partition_point(|&c| c <= 0.0);
            return self.x[i.saturating_sub(1)];
        }
        if s >= self.total() {
            return self.last();
        }
        let i = self.cum.partition_point(|&c| c < s) - 1;
        let target = s - self.cum[i];
        let h = self.x[i + 1] - self.x[i];
        let slope = (self.v[i + 1] - self.v[i]) / h;
        let vi = self.v[i];
        // Root of vi*t + slope*t^2/2 = target, written to avoid cancellation.
        let disc = (vi * vi + 2.0 * slope * target).max(0.0);
        let t = 2.0 * target / (vi + disc.sqrt());
        self.x[i] + if t.is_finite() { t.clamp(0.0, h) } else { h }
    }

    pub fn map(&self, fx: impl Fn(f64) -> f64, fv: impl Fn(f64) -> f64) -> Result<Self> {
        Table::new(
            self.x.iter().map(|&t| fx(t)).collect(),
            self.v.iter().map(|&t| fv(t)).collect(),
        )
    }
}

/// BS density on the whole line, `d(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LineDensity {
    Constant {
        value: f64,
    },
    /// `value` on `[lo, hi)`; a missing bound means unbounded on that side.
    Interval {
        lo: Option<f64>,
        hi: Option<f64>,
        value: f64,
    },
    Tabulated(Table),
    Sum {
        parts: Vec<LineDensity>,
    },
}

impl LineDensity {
    pub fn indicator(lo: f64, hi: f64) -> Self {
        LineDensity::Interval {
            lo: Some(lo),
            hi: Some(hi),
            value: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v >= 0.0;
        match self {
            LineDensity::Constant { value } if !ok(*value) => {
                Err(Error::domain("line density must be non-negative"))
            }
            LineDensity::Interval { lo, hi, value } => {
                if !ok(*value) {
                    return Err(Error::domain("line density must be non-negative"));
                }
                if let (Some(a), Some(b)) = (lo, hi) {
                    if !(a < b) {
                        return Err(Error::domain("interval needs lo < hi"));
                    }
                }
                Ok(())
            }
            LineDensity::Sum { parts } => parts.iter().try_for_each(|p| p.validate()),
            _ => Ok(()),
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        match self {
            LineDensity::Constant { value } => *value,
            LineDensity::Interval { lo, hi, value } => {
                let above = lo.is_none_or(|a| x >= a);
                let below = hi.is_none_or(|b| x < b);
                if above && below {
                    *value
                } else {
                    0.0
                }
            }
            LineDensity::Tabulated(t) => t.value(x),
            LineDensity::Sum { parts } => parts.iter().map(|p| p.value(x)).sum(),
        }
    }

    /// `D(x1) - D(x0)` for an antiderivative `D`, with `x0 <= x1`.
    pub fn integral(&self, x0: f64, x1: f64) -> f64 {
        match self {
            LineDensity::Constant { value } => value * (x1 - x0),
            LineDensity::Interval { lo, hi, value } => {
                let a = lo.unwrap_or(f64::NEG_INFINITY);
                let b = hi.unwrap_or(f64::INFINITY);
                let u = x1.clamp(a, b);
                let l = x0.clamp(a, b);
                value * (u - l).max(0.0)
            }
            LineDensity::Tabulated(t) => t.integral_to(x1) - t.integral_to(x0),
            LineDensity::Sum { parts } => parts.iter().map(|p| p.integral(x0, x1)).sum(),
        }
    }

    pub fn sup(&self) -> f64 {
        match self {
            LineDensity::Constant { value } | LineDensity::Interval { value, .. } => *value,
            LineDensity::Tabulated(t) => t.max(),
            LineDensity::Sum { parts } => parts.iter().map(|p| p.sup()).sum(),
        }
    }

    /// Value approached as `|x| -> infinity` on the heavier side; zero for
    /// compactly supported densities.
    fn far_level(&self) -> f64 {
        match self {
            LineDensity::Constant { value } => *value,
            LineDensity::Interval { lo, hi, value } => {
                if lo.is_none() || hi.is_none() {
                    *value
                } else {
                    0.0
                }
            }
            LineDensity::Tabulated(_) => 0.0,
            LineDensity::Sum { parts } => parts.iter().map(|p| p.far_level()).sum(),
        }
    }

    /// Points where the density jumps or has a kink.
    fn breakpoints(&self, out: &mut Vec<f64>) {
        match self {
            LineDensity::Constant { .. } => {}
            LineDensity::Interval { lo, hi, .. } => out.extend(lo.iter().chain(hi.iter())),
            LineDensity::Tabulated(t) => out.extend_from_slice(t.x()),
            LineDensity::Sum { parts } => parts.iter().for_each(|p| p.breakpoints(out)),
        }
    }

    /// Largest `|x - y|` at which the density can be nonzero.
    fn reach(&self, y: f64) -> f64 {
        match self {
            LineDensity::Constant { value } => {
                if *value > 0.0 {
                    f64::INFINITY
                } else {
                    0.0
                }
            }
            LineDensity::Interval { lo, hi, value } => match (lo, hi) {
                _ if *value == 0.0 => 0.0,
                (Some(a), Some(b)) => (a - y).abs().max((b - y).abs()),
                _ => f64::INFINITY,
            },
            LineDensity::Tabulated(t) => (t.first() - y).abs().max((t.last() - y).abs()),
            LineDensity::Sum { parts } => parts.iter().map(|p| p.reach(y)).fold(0.0, f64::max),
        }
    }

    /// `(1/a) d(x/a)`.
    pub fn scaled(&self, a: f64) -> Result<Self> {
        Ok(match self {
            LineDensity::Constant { value } => LineDensity::Constant { value: value / a },
            LineDensity::Interval { lo, hi, value } => LineDensity::Interval {
                lo: lo.map(|t| t * a),
                hi: hi.map(|t| t * a),
                value: value / a,
            },
            LineDensity::Tabulated(t) => LineDensity::Tabulated(t.map(|x| x * a, |v| v / a)?),
            LineDensity::Sum { parts } => LineDensity::Sum {
                parts: parts.iter().map(|p| p.scaled(a)).collect::<Result<_>>()?,
            },
        })
    }
}

/// Power-law continuation `c r^p` of a tabulated density beyond its grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerTail {
    pub c: f64,
    pub p: f64,
}

impl PowerTail {
    /// `int_{r0}^{r1} c s^p ds`.
    fn integral(&self, r0: f64, r1: f64) -> f64 {
        if self.p == -1.0 {
            self.c * (r1 / r0).ln()
        } else {
            let q = self.p + 1.0;
            self.c * (r1.powf(q) - r0.powf(q)) / q
        }
    }

    /// `r1` such that `integral(r0, r1) = s`, or `None` if the tail mass is
    /// smaller than `s`.
    fn inverse(&self, r0: f64, s: f64) -> Option<f64> {
        if self.p == -1.0 {
            return Some(r0 * (s / self.c).exp());
        }
        let q = self.p + 1.0;
        let base = r0.powf(q) + q * s / self.c;
        if base <= 0.0 {
            None
        } else {
            Some(base.powf(1.0 / q))
        }
    }
}

/// Tabulated radial density with an optional power-law tail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabulatedDensity {
    #[serde(flatten)]
    pub table: Table,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<PowerTail>,
}

impl TabulatedDensity {
    pub fn new(r: Vec<f64>, lambda: Vec<f64>, tail: Option<PowerTail>) -> Result<Self> {
        if r.first().is_some_and(|&r0| r0 < 0.0) {
            return Err(Error::domain("radial grid must start at r >= 0"));
        }
        if let Some(t) = tail {
            if !(t.c.is_finite() && t.c >= 0.0 && t.p.is_finite()) {
                return Err(Error::domain("power tail needs finite c >= 0 and finite p"));
            }
        }
        Ok(Self {
            table: Table::new(r, lambda)?,
            tail,
        })
    }

    /// Load a two-column `(r, lambda)` CSV with a header row.
    pub fn from_csv(path: impl AsRef<Path>) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_path(path)?;
        if reader.headers()?.len() != 2 {
            return Err(Error::Schema(
                "density CSV must have exactly two columns (r, lambda)".into(),
            ));
        }
        let mut r = Vec::new();
        let mut lambda = Vec::new();
        for row in reader.deserialize::<(f64, f64)>() {
            let (a, b) = row?;
            r.push(a);
            lambda.push(b);
        }
        Self::new(r, lambda, None)
    }
}

/// Density `lambda(r)` of BS distances from the mobile station, `r >= 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RadialDensity {
    /// `c r^p`.
    PowerLaw {
        c: f64,
        p: f64,
    },
    Tabulated(TabulatedDensity),
    /// `d(y - r) + d(y + r)`: a line density seen from position `y`.
    Shifted {
        base: LineDensity,
        y: f64,
    },
}

impl RadialDensity {
    pub fn power_law(c: f64, p: f64) -> Self {
        RadialDensity::PowerLaw { c, p }
    }

    pub fn tabulated(r: Vec<f64>, lambda: Vec<f64>) -> Result<Self> {
        Ok(RadialDensity::Tabulated(TabulatedDensity::new(
            r, lambda, None,
        )?))
    }

    /// Structural checks: finite parameters and non-negative values.
    pub fn validate(&self) -> Result<()> {
        match self {
            RadialDensity::PowerLaw { c, p } => {
                if !(c.is_finite() && *c >= 0.0 && p.is_finite()) {
                    return Err(Error::domain(
                        "power-law density needs finite c >= 0 and finite p",
                    ));
                }
                if *c > 0.0 && *p <= -1.0 {
                    return Err(Error::stability(format!(
                        "density c r^{p} has infinite mass near the origin (need p > -1)"
                    )));
                }
                Ok(())
            }
            RadialDensity::Tabulated(_) => Ok(()),
            RadialDensity::Shifted { base, y } => {
                if !y.is_finite() {
                    return Err(Error::domain("MS position must be finite"));
                }
                base.validate()
            }
        }
    }

    pub fn value(&self, r: f64) -> f64 {
        if r < 0.0 {
            return 0.0;
        }
        match self {
            RadialDensity::PowerLaw { c, p } => {
                if *c == 0.0 {
                    0.0
                } else {
                    c * r.powf(*p)
                }
            }
            RadialDensity::Tabulated(t) => match t.tail {
                Some(tail) if r > t.table.last() => tail.c * r.powf(tail.p),
                _ => t.table.value(r),
            },
            RadialDensity::Shifted { base, y } => base.value(y - r) + base.value(y + r),
        }
    }

    /// `Lambda(r) = int_0^r lambda`.
    pub fn cumulative(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        match self {
            RadialDensity::PowerLaw { c, p } => {
                if *c == 0.0 {
                    0.0
                } else {
                    c * r.powf(p + 1.0) / (p + 1.0)
                }
            }
            RadialDensity::Tabulated(t) => {
                let inside = t.table.integral_to(r);
                match t.tail {
                    Some(tail) if r > t.table.last() => inside + tail.integral(t.table.last(), r),
                    _ => inside,
                }
            }
            RadialDensity::Shifted { base, y } => base.integral(y - r, y + r),
        }
    }

    /// `Lambda(infinity)`, possibly infinite.
    pub fn total_mass(&self) -> f64 {
        match self {
            RadialDensity::PowerLaw { c, .. } => {
                if *c == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            RadialDensity::Tabulated(t) => match t.tail {
                None => t.table.total(),
                Some(tail) if tail.c == 0.0 => t.table.total(),
                Some(tail) if tail.p < -1.0 => {
                    let r0 = t.table.last();
                    t.table.total() + tail.c * r0.powf(tail.p + 1.0) / -(tail.p + 1.0)
                }
                Some(_) => f64::INFINITY,
            },
            RadialDensity::Shifted { base, y } => {
                let reach = base.reach(*y);
                if reach.is_finite() {
                    self.cumulative(reach)
                } else if base.far_level() > 0.0 {
                    f64::INFINITY
                } else {
                    self.cumulative(reach.min(1e300))
                }
            }
        }
    }

    /// Smallest `r` with `Lambda(r) >= s`, or `None` when `s` exceeds the
    /// total mass.
    pub fn inverse_cumulative(&self, s: f64) -> Option<f64> {
        if s < 0.0 || s.is_nan() {
            return None;
        }
        match self {
            RadialDensity::PowerLaw { c, p } => {
                if *c == 0.0 {
                    return if s == 0.0 { Some(0.0) } else { None };
                }
                Some(((p + 1.0) * s / c).powf(1.0 / (p + 1.0)))
            }
            RadialDensity::Tabulated(t) => {
                let inside = t.table.total();
                if s <= inside {
                    return Some(t.table.inverse_integral(s));
                }
                match t.tail {
                    Some(tail) if tail.c > 0.0 => tail.inverse(t.table.last(), s - inside),
                    _ => None,
                }
            }
            RadialDensity::Shifted { .. } => {
                if s >= self.total_mass() {
                    return None;
                }
                // Bracket then bisect; Lambda is continuous and non-decreasing.
                let mut hi = 1.0;
                while self.cumulative(hi) < s {
                    hi *= 2.0;
                    if !hi.is_finite() {
                        return None;
                    }
                }
                let mut lo = 0.0;
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if self.cumulative(mid) < s {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                Some(hi)
            }
        }
    }

    /// Upper bound of `lambda` on `[0, r_max]`; infinite for densities that
    /// blow up at the origin.
    pub fn sup_on(&self, r_max: f64) -> f64 {
        match self {
            RadialDensity::PowerLaw { c, p } => {
                if *c == 0.0 {
                    0.0
                } else if *p < 0.0 {
                    f64::INFINITY
                } else {
                    c * r_max.powf(*p)
                }
            }
            RadialDensity::Tabulated(t) => {
                let table = &t.table;
                let mut m = table
                    .x()
                    .iter()
                    .zip(table.values())
                    .filter(|(x, _)| **x <= r_max)
                    .map(|(_, v)| *v)
                    .fold(0.0, f64::max);
                m = m.max(table.value(r_max.min(table.last())));
                if let Some(tail) = t.tail {
                    if r_max > table.last() {
                        let a = tail.c * table.last().powf(tail.p);
                        let b = tail.c * r_max.powf(tail.p);
                        m = m.max(a).max(b);
                    }
                }
                m
            }
            RadialDensity::Shifted { base, .. } => 2.0 * base.sup(),
        }
    }

    /// Radius beyond which the density vanishes, if any.
    pub fn support_end(&self) -> Option<f64> {
        match self {
            RadialDensity::PowerLaw { c, .. } => (*c == 0.0).then_some(0.0),
            RadialDensity::Tabulated(t) => match t.tail {
                Some(tail) if tail.c > 0.0 => None,
                _ => Some(t.table.last()),
            },
            RadialDensity::Shifted { base, y } => {
                let reach = base.reach(*y);
                reach.is_finite().then_some(reach)
            }
        }
    }

    /// Radii in `(0, infinity)` where the density is not smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = match self {
            RadialDensity::PowerLaw { .. } => Vec::new(),
            RadialDensity::Tabulated(t) => t.table.x().to_vec(),
            RadialDensity::Shifted { base, y } => {
                let mut raw = Vec::new();
                base.breakpoints(&mut raw);
                raw.into_iter().map(|x| (x - y).abs()).collect()
            }
        };
        out.retain(|r| *r > 0.0 && r.is_finite());
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    /// Check the stability conditions for path-loss exponent `epsilon`:
    /// finite mass near the origin and finite `int lambda(r) r^-epsilon`
    /// towards infinity.
    pub fn check_stable(&self, epsilon: f64) -> Result<()> {
        self.validate()?;
        if !(epsilon > 0.0) {
            return Err(Error::domain("path-loss exponent must be positive"));
        }
        let fail = |why: String| Err(Error::stability(why));
        match self {
            RadialDensity::PowerLaw { c, p } => {
                if *c > 0.0 && p - epsilon >= -1.0 {
                    return fail(format!(
                        "density c r^{p} with exponent {epsilon}: far-field interference diverges (need p - epsilon < -1)"
                    ));
                }
            }
            RadialDensity::Tabulated(t) => {
                if let Some(tail) = t.tail {
                    if tail.c > 0.0 && tail.p - epsilon >= -1.0 {
                        return fail(format!(
                            "tabulated density tail r^{} with exponent {epsilon} diverges",
                            tail.p
                        ));
                    }
                }
            }
            RadialDensity::Shifted { base, .. } => {
                if base.far_level() > 0.0 && epsilon <= 1.0 {
                    return fail(format!(
                        "line density constant at infinity needs exponent > 1, got {epsilon}"
                    ));
                }
            }
        }
        Ok(())
    }

    /// Degree of the far-field growth, `lambda(r) ~ r^q` as `r -> infinity`;
    /// `None` for compact support.
    pub fn far_exponent(&self) -> Option<f64> {
        match self {
            RadialDensity::PowerLaw { c, p } => (*c > 0.0).then_some(*p),
            RadialDensity::Tabulated(t) => t.tail.filter(|t| t.c > 0.0).map(|t| t.p),
            RadialDensity::Shifted { base, .. } => (base.far_level() > 0.0).then_some(0.0),
        }
    }
}
