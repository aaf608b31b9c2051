//! Parametrized families of curves, the r-distance between sampled members,
//! and empirical continuity certification against the countable subfamily of
//! dyadic parameters plus parameter-interval endpoints.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Last sampled parameter fraction; `1 - 2^-10`.
pub const GRID_EDGE: f64 = 1.0 - 1.0 / 1024.0;

/// A real interval with possibly infinite, always open, infinite endpoints.
///
/// A degenerate closed interval `[x, x]` is allowed; it parametrizes
/// single-curve families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn new(lo: f64, hi: f64, lo_closed: bool, hi_closed: bool) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() {
            return Err(Error::Domain("interval endpoint is NaN".into()));
        }
        if (lo.is_infinite() && lo_closed) || (hi.is_infinite() && hi_closed) {
            return Err(Error::Domain("infinite interval endpoints must be open".into()));
        }
        let degenerate_ok = lo == hi && lo_closed && hi_closed;
        if !(lo < hi || degenerate_ok) {
            return Err(Error::Domain(format!("empty interval ({lo}, {hi})")));
        }
        Ok(Interval { lo, hi, lo_closed, hi_closed })
    }

    pub fn closed_open(lo: f64, hi: f64) -> Self {
        Interval::new(lo, hi, true, false).expect("valid interval")
    }

    pub fn open(lo: f64, hi: f64) -> Self {
        Interval::new(lo, hi, false, false).expect("valid interval")
    }

    pub fn point(x: f64) -> Self {
        Interval::new(x, x, true, true).expect("valid interval")
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_closed { x >= self.lo } else { x > self.lo };
        let below = if self.hi_closed { x <= self.hi } else { x < self.hi };
        above && below
    }

    /// Endpoints that belong to the interval (the set `D` of the countable
    /// subfamily).
    pub fn included_endpoints(&self) -> Vec<f64> {
        let mut out = Vec::new();
        if self.lo_closed {
            out.push(self.lo);
        }
        if self.hi_closed && self.hi != self.lo {
            out.push(self.hi);
        }
        out
    }

    /// Monotone homeomorphism from `(0, 1)` onto the interior.
    pub fn sigma(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::Domain(format!("curve fraction {u} outside (0, 1)")));
        }
        if self.is_point() {
            return Ok(self.lo);
        }
        let t = match (self.lo.is_finite(), self.hi.is_finite()) {
            (true, true) => self.lo + u * (self.hi - self.lo),
            (true, false) => self.lo - (1.0 - u).ln(),
            (false, true) => self.hi + u.ln(),
            (false, false) => (PI * (u - 0.5)).tan(),
        };
        Ok(t)
    }

    /// Standard sampling grid of `n + 1` parameters, from the closed lower
    /// endpoint (or `sigma(2^-10)`) up to `sigma(1 - 2^-10)`.
    pub fn grid(&self, n: usize) -> Vec<f64> {
        assert!(n >= 1, "grid needs at least two points");
        if self.is_point() {
            return vec![self.lo; n + 1];
        }
        let u_lo = if self.lo_closed { 0.0 } else { 1.0 - GRID_EDGE };
        (0..=n)
            .map(|i| {
                let u = if i == n { GRID_EDGE } else { u_lo + (GRID_EDGE - u_lo) * i as f64 / n as f64 };
                if u == 0.0 {
                    self.lo
                } else {
                    self.sigma(u).expect("grid fraction inside (0, 1)")
                }
            })
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
struct IntervalRepr {
    lo: Option<f64>,
    hi: Option<f64>,
    lo_closed: bool,
    hi_closed: bool,
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        IntervalRepr {
            lo: self.lo.is_finite().then_some(self.lo),
            hi: self.hi.is_finite().then_some(self.hi),
            lo_closed: self.lo_closed,
            hi_closed: self.hi_closed,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = IntervalRepr::deserialize(d)?;
        Interval::new(
            r.lo.unwrap_or(f64::NEG_INFINITY),
            r.hi.unwrap_or(f64::INFINITY),
            r.lo_closed,
            r.hi_closed,
        )
        .map_err(serde::de::Error::custom)
    }
}

/// One curve of a family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CurveKind {
    /// `t e^{i angle}`, `t` in `[0, 1)`.
    Radius { angle: f64 },
    /// `t e^{i angle}`, `t` in `[0, inf)`; a zero-to-infinity curve.
    Ray { angle: f64 },
    /// `e^{(1 + i slope) t}`, `t < 0`.
    LogSpiral { slope: f64 },
    /// `(1 - e^{-t}) e^{it}`, `t > 0`.
    SingleSpiral,
    /// Piecewise-linear interpolation of `points` at the strictly increasing
    /// `knots`.
    Polyline { knots: Vec<f64>, points: Vec<Complex64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSpec {
    #[serde(flatten)]
    pub kind: CurveKind,
    pub domain: Interval,
}

impl CurveSpec {
    pub fn radius(angle: f64) -> Self {
        CurveSpec { kind: CurveKind::Radius { angle }, domain: Interval::closed_open(0.0, 1.0) }
    }

    pub fn ray(angle: f64) -> Self {
        CurveSpec {
            kind: CurveKind::Ray { angle },
            domain: Interval::new(0.0, f64::INFINITY, true, false).expect("valid interval"),
        }
    }

    pub fn log_spiral(slope: f64) -> Self {
        CurveSpec { kind: CurveKind::LogSpiral { slope }, domain: Interval::open(f64::NEG_INFINITY, 0.0) }
    }

    pub fn single_spiral() -> Self {
        CurveSpec { kind: CurveKind::SingleSpiral, domain: Interval::open(0.0, f64::INFINITY) }
    }

    pub fn polyline(knots: Vec<f64>, points: Vec<Complex64>) -> Result<Self> {
        if knots.len() < 2 || knots.len() != points.len() {
            return Err(Error::Domain("polyline needs >= 2 knots, one point per knot".into()));
        }
        if knots.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Domain("polyline knots must be strictly increasing".into()));
        }
        let domain = Interval::new(knots[0], knots[knots.len() - 1], true, true)?;
        Ok(CurveSpec { kind: CurveKind::Polyline { knots, points }, domain })
    }

    pub fn eval(&self, t: f64) -> Result<Complex64> {
        if !self.domain.contains(t) {
            return Err(Error::Domain(format!("parameter t = {t} outside curve domain")));
        }
        Ok(self.eval_unchecked(t))
    }

    fn eval_unchecked(&self, t: f64) -> Complex64 {
        match &self.kind {
            CurveKind::Radius { angle } | CurveKind::Ray { angle } => Complex64::from_polar(t, *angle),
            CurveKind::LogSpiral { slope } => (Complex64::new(1.0, *slope) * t).exp(),
            CurveKind::SingleSpiral => Complex64::from_polar(-(-t).exp_m1(), t),
            CurveKind::Polyline { knots, points } => {
                let i = match knots.partition_point(|&k| k <= t) {
                    0 => 0,
                    i if i >= knots.len() => knots.len() - 2,
                    i => i - 1,
                };
                let w = (t - knots[i]) / (knots[i + 1] - knots[i]);
                points[i] + (points[i + 1] - points[i]) * w
            }
        }
    }

    /// `z(sigma(u))` for a fraction `u` in `(0, 1)`.
    pub fn point_at(&self, u: f64) -> Result<Complex64> {
        let t = self.domain.sigma(u)?;
        Ok(self.eval_unchecked(t))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coverage {
    /// Every boundary point is the endpoint of some member.
    Full,
    /// Members end on a proper subset of the boundary.
    Partial,
    /// Members wind around without a boundary limit.
    Accumulating,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyClass {
    UnitDisc,
    ZeroToInfinity,
}

/// Family generator. Each variant fixes the shared curve interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilyKind {
    Radii,
    Rays,
    LogSpirals,
    SingleSpiral,
    /// A one-member family holding an explicit curve.
    Single { curve: CurveSpec },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveFamily {
    pub kind: FamilyKind,
    pub param_domain: Interval,
    pub domain: Interval,
    pub base_point: Complex64,
    pub coverage: Coverage,
    pub class: FamilyClass,
}

impl CurveFamily {
    pub fn from_kind(kind: FamilyKind) -> Result<Self> {
        let two_pi = 2.0 * PI;
        let zero = Complex64::new(0.0, 0.0);
        let family = match &kind {
            FamilyKind::Radii => CurveFamily {
                param_domain: Interval::closed_open(0.0, two_pi),
                domain: CurveSpec::radius(0.0).domain,
                base_point: zero,
                coverage: Coverage::Full,
                class: FamilyClass::UnitDisc,
                kind,
            },
            FamilyKind::Rays => CurveFamily {
                param_domain: Interval::closed_open(0.0, two_pi),
                domain: CurveSpec::ray(0.0).domain,
                base_point: zero,
                coverage: Coverage::Full,
                class: FamilyClass::ZeroToInfinity,
                kind,
            },
            // Every restricted spiral ends at 1, so coverage is partial.
            FamilyKind::LogSpirals => CurveFamily {
                param_domain: Interval::open(f64::NEG_INFINITY, f64::INFINITY),
                domain: CurveSpec::log_spiral(0.0).domain,
                base_point: zero,
                coverage: Coverage::Partial,
                class: FamilyClass::UnitDisc,
                kind,
            },
            FamilyKind::SingleSpiral => CurveFamily {
                param_domain: Interval::point(0.0),
                domain: CurveSpec::single_spiral().domain,
                base_point: zero,
                coverage: Coverage::Accumulating,
                class: FamilyClass::UnitDisc,
                kind,
            },
            FamilyKind::Single { curve } => {
                let grid = curve.domain.grid(256);
                let start = curve.eval(grid[0])?;
                let interior_ok = grid[1..grid.len() - 1]
                    .iter()
                    .all(|&t| curve.eval(t).map(|z| z.norm() < 1.0).unwrap_or(false));
                if !interior_ok {
                    return Err(Error::Domain("single curve leaves the unit disc".into()));
                }
                CurveFamily {
                    param_domain: Interval::point(0.0),
                    domain: curve.domain,
                    base_point: start,
                    coverage: Coverage::Partial,
                    class: FamilyClass::UnitDisc,
                    kind,
                }
            }
        };
        Ok(family)
    }

    pub fn radii() -> Self {
        Self::from_kind(FamilyKind::Radii).expect("built-in family")
    }

    pub fn rays() -> Self {
        Self::from_kind(FamilyKind::Rays).expect("built-in family")
    }

    pub fn log_spirals() -> Self {
        Self::from_kind(FamilyKind::LogSpirals).expect("built-in family")
    }

    pub fn single_spiral() -> Self {
        Self::from_kind(FamilyKind::SingleSpiral).expect("built-in family")
    }

    pub fn single(curve: CurveSpec) -> Result<Self> {
        Self::from_kind(FamilyKind::Single { curve })
    }

    pub fn is_single_curve(&self) -> bool {
        self.param_domain.is_point()
    }

    /// The member `z_alpha`.
    pub fn member(&self, alpha: f64) -> Result<CurveSpec> {
        if !self.param_domain.contains(alpha) {
            return Err(Error::Domain(format!("family parameter {alpha} outside J")));
        }
        Ok(match &self.kind {
            FamilyKind::Radii => CurveSpec::radius(alpha),
            FamilyKind::Rays => CurveSpec::ray(alpha),
            FamilyKind::LogSpirals => CurveSpec::log_spiral(alpha),
            FamilyKind::SingleSpiral => CurveSpec::single_spiral(),
            FamilyKind::Single { curve } => curve.clone(),
        })
    }

    /// Standard parameter grid shared by all members.
    pub fn grid(&self, n: usize) -> Vec<f64> {
        self.domain.grid(n)
    }

    pub fn sample(&self, alpha: f64, grid: &[f64]) -> Result<SampledCurve> {
        SampledCurve::sample(&self.member(alpha)?, grid)
    }
}

#[derive(Serialize, Deserialize)]
struct FamilyRepr {
    #[serde(flatten)]
    kind: FamilyKind,
    #[serde(default)]
    param_domain: Option<Interval>,
    #[serde(default)]
    domain: Option<Interval>,
    #[serde(default)]
    coverage: Option<Coverage>,
}

impl Serialize for CurveFamily {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FamilyRepr {
            kind: self.kind.clone(),
            param_domain: Some(self.param_domain),
            domain: Some(self.domain),
            coverage: Some(self.coverage),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CurveFamily {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = FamilyRepr::deserialize(d)?;
        let mut family = CurveFamily::from_kind(r.kind).map_err(D::Error::custom)?;
        if let Some(dom) = r.domain {
            if dom != family.domain {
                return Err(D::Error::custom("curve domain does not match the family kind"));
            }
        }
        if let Some(cov) = r.coverage {
            if cov != family.coverage {
                return Err(D::Error::custom("coverage does not match the family kind"));
            }
        }
        // Restricting the parameter range is allowed.
        if let Some(pd) = r.param_domain {
            let inside = |x: f64| {
                x.is_infinite() && family.param_domain.lo.is_infinite()
                    || x.is_infinite() && family.param_domain.hi.is_infinite()
                    || family.param_domain.contains(x)
                    || x == family.param_domain.hi
            };
            if !(inside(pd.lo) && inside(pd.hi)) {
                return Err(D::Error::custom("parameter domain escapes the family's J"));
            }
            family.param_domain = pd;
        }
        Ok(family)
    }
}

/// Evaluates `z_alpha(t)`.
pub fn eval_curve(family: &CurveFamily, alpha: f64, t: f64) -> Result<Complex64> {
    family.member(alpha)?.eval(t)
}

/// `z_alpha(sigma_I(u))`.
pub fn curve_point(family: &CurveFamily, alpha: f64, u: f64) -> Result<Complex64> {
    family.member(alpha)?.point_at(u)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Endpoint {
    Point(Complex64),
    Accumulating,
}

/// Numerical boundary limit of `z_alpha(t)` as `t -> sup I`, normalized to
/// modulus 1.
pub fn endpoint(family: &CurveFamily, alpha: f64, tol: f64) -> Result<Endpoint> {
    if family.class != FamilyClass::UnitDisc {
        return Err(Error::Usage("endpoints exist only for unit-disc families".into()));
    }
    let curve = family.member(alpha)?;
    let mut prev: Option<Complex64> = None;
    for k in 1..=52 {
        let u = 1.0 - (0.5f64).powi(k);
        let z = curve.point_at(u)?;
        if let Some(p) = prev {
            if (z - p).norm() < tol {
                return Ok(Endpoint::Point(z / z.norm()));
            }
        }
        prev = Some(z);
    }
    if family.coverage == Coverage::Accumulating {
        Ok(Endpoint::Accumulating)
    } else {
        Err(Error::Certification(format!("no boundary limit for alpha = {alpha} within tolerance {tol}")))
    }
}

/// A curve evaluated on a parameter grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledCurve {
    pub parameters: Vec<f64>,
    pub points: Vec<Complex64>,
}

impl SampledCurve {
    pub fn sample(curve: &CurveSpec, grid: &[f64]) -> Result<Self> {
        if grid.windows(2).any(|w| !(w[0] < w[1])) && !curve.domain.is_point() {
            return Err(Error::Usage("sample grid must be strictly increasing".into()));
        }
        let points = grid.iter().map(|&t| curve.eval(t)).collect::<Result<Vec<_>>>()?;
        Ok(SampledCurve { parameters: grid.to_vec(), points })
    }

    /// Euclidean distance from `z` to the polyline through the samples.
    pub fn distance_to(&self, z: Complex64) -> f64 {
        if self.points.len() == 1 {
            return (z - self.points[0]).norm();
        }
        self.points
            .windows(2)
            .map(|w| segment_distance(z, w[0], w[1]))
            .fold(f64::INFINITY, f64::min)
    }
}

fn segment_distance(z: Complex64, a: Complex64, b: Complex64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (z - a).norm();
    }
    let w = ((z - a) * d.conj()).re / len2;
    (z - (a + d * w.clamp(0.0, 1.0))).norm()
}

fn check_grids(c1: &SampledCurve, c2: &SampledCurve) -> Result<()> {
    if c1.parameters != c2.parameters {
        return Err(Error::Usage("r-distance needs identical parameter grids".into()));
    }
    Ok(())
}

/// Sup over the common grid of `|z_1(t) - z_2(t)|`.
pub fn r_distance(c1: &SampledCurve, c2: &SampledCurve) -> Result<f64> {
    check_grids(c1, c2)?;
    Ok(c1.points.iter().zip(&c2.points).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
}

/// r-distance restricted to grid indices where either curve lies in
/// `|z| <= j`. An empty index set gives 0.
pub fn truncated_r_distance(c1: &SampledCurve, c2: &SampledCurve, j: u32) -> Result<f64> {
    check_grids(c1, c2)?;
    let j = j as f64;
    Ok(c1
        .points
        .iter()
        .zip(&c2.points)
        .filter(|(a, b)| a.norm() <= j || b.norm() <= j)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max))
}

/// A member of the countable subfamily: a dyadic rational `num / 2^depth`
/// or an endpoint of `J` that belongs to `J`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubfamilyMember {
    Dyadic { num: i64, depth: u32 },
    Endpoint { value: f64 },
}

impl SubfamilyMember {
    pub fn dyadic(num: i64, depth: u32) -> Self {
        let (mut num, mut depth) = (num, depth);
        while depth > 0 && num % 2 == 0 {
            num /= 2;
            depth -= 1;
        }
        SubfamilyMember::Dyadic { num, depth }
    }

    pub fn value(&self) -> f64 {
        match *self {
            SubfamilyMember::Dyadic { num, depth } => num as f64 / (depth as f64).exp2(),
            SubfamilyMember::Endpoint { value } => value,
        }
    }

    /// Exact dyadic representation of `x` if its depth is at most `max_depth`.
    pub fn exact_dyadic(x: f64, max_depth: u32) -> Option<Self> {
        for depth in 0..=max_depth {
            let scaled = x * (depth as f64).exp2();
            if scaled.fract() == 0.0 && scaled.abs() < 9.0e15 {
                return Some(SubfamilyMember::dyadic(scaled as i64, depth));
            }
        }
        None
    }
}

/// Limits for the subfamily search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubfamilySearch {
    pub max_depth: u32,
    pub grid_points: usize,
}

impl Default for SubfamilySearch {
    fn default() -> Self {
        SubfamilySearch { max_depth: 30, grid_points: 512 }
    }
}

/// Distance used by continuity certification: full r-distance on unit-disc
/// families, truncated at modulus `j` on zero-to-infinity families.
pub fn member_distance(family: &CurveFamily, alpha: f64, beta: f64, j: u32, grid: &[f64]) -> Result<f64> {
    let c1 = family.sample(alpha, grid)?;
    let c2 = family.sample(beta, grid)?;
    match family.class {
        FamilyClass::UnitDisc => r_distance(&c1, &c2),
        FamilyClass::ZeroToInfinity => truncated_r_distance(&c1, &c2, j),
    }
}

/// Finds a member of the countable subfamily within `delta` of `z_alpha`.
pub fn nearest_subfamily_member(
    family: &CurveFamily,
    alpha: f64,
    delta: f64,
    j: u32,
    search: &SubfamilySearch,
) -> Result<SubfamilyMember> {
    if !(delta > 0.0) {
        return Err(Error::Usage("delta must be positive".into()));
    }
    if !family.param_domain.contains(alpha) {
        return Err(Error::Domain(format!("family parameter {alpha} outside J")));
    }
    if family.param_domain.included_endpoints().contains(&alpha) {
        return Ok(SubfamilyMember::Endpoint { value: alpha });
    }
    if let Some(m) = SubfamilyMember::exact_dyadic(alpha, search.max_depth) {
        return Ok(m);
    }
    let grid = family.grid(search.grid_points);
    for depth in 0..=search.max_depth {
        let scale = (depth as f64).exp2();
        let lo = (alpha * scale).floor();
        let mut candidates = [lo, lo + 1.0];
        if (alpha * scale - lo) > 0.5 {
            candidates.swap(0, 1);
        }
        for c in candidates {
            let beta = c / scale;
            if !family.param_domain.contains(beta) {
                continue;
            }
            if member_distance(family, alpha, beta, j, &grid)? < delta {
                return Ok(SubfamilyMember::dyadic(c as i64, depth));
            }
        }
    }
    for e in family.param_domain.included_endpoints() {
        if member_distance(family, alpha, e, j, &grid)? < delta {
            return Ok(SubfamilyMember::Endpoint { value: e });
        }
    }
    Err(Error::Certification(format!(
        "no subfamily member within {delta} of alpha = {alpha} at depth {}",
        search.max_depth
    )))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuityEntry {
    pub alpha: f64,
    pub witness: Option<SubfamilyMember>,
    pub distance: Option<f64>,
    pub ok: bool,
    pub diagnostic: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuityReport {
    pub delta: f64,
    pub j: u32,
    pub entries: Vec<ContinuityEntry>,
    pub pass: bool,
}

/// Runs [`nearest_subfamily_member`] for every grid parameter; failures are
/// recorded, never raised.
pub fn certify_continuous(
    family: &CurveFamily,
    delta: f64,
    j: u32,
    alphas: &[f64],
    search: &SubfamilySearch,
) -> ContinuityReport {
    let grid = family.grid(search.grid_points);
    let entries: Vec<ContinuityEntry> = alphas
        .iter()
        .map(|&alpha| match nearest_subfamily_member(family, alpha, delta, j, search) {
            Ok(w) => {
                let distance = member_distance(family, alpha, w.value(), j, &grid).ok();
                ContinuityEntry { alpha, witness: Some(w), distance, ok: true, diagnostic: None }
            }
            Err(e) => ContinuityEntry { alpha, witness: None, distance: None, ok: false, diagnostic: Some(e.to_string()) },
        })
        .collect();
    let pass = entries.iter().all(|e| e.ok);
    ContinuityReport { delta, j, entries, pass }
}

/// Equispaced parameters over `J` (one per cell, avoiding open endpoints).
pub fn alpha_grid(family: &CurveFamily, n: usize) -> Vec<f64> {
    let j = family.param_domain;
    if j.is_point() {
        return vec![j.lo];
    }
    (0..n).map(|i| j.sigma((i as f64 + 0.5) / n as f64).expect("fraction in (0, 1)")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radius_examples() {
        let f = CurveFamily::radii();
        assert_eq!(eval_curve(&f, 0.0, 0.5).unwrap(), Complex64::new(0.5, 0.0));
        let z = eval_curve(&f, PI, 0.25).unwrap();
        assert!((z - Complex64::new(-0.25, 0.0)).norm() < 1e-16);
        assert!(matches!(eval_curve(&f, 7.0, 0.5), Err(Error::Domain(_))));
        assert!(matches!(eval_curve(&f, 0.0, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn log_spiral_examples() {
        let f = CurveFamily::log_spirals();
        let z = eval_curve(&f, 0.0, -(2f64.ln())).unwrap();
        assert!((z - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        let z = curve_point(&f, 0.0, 0.5).unwrap();
        assert!((z - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        assert_eq!(f.coverage, Coverage::Partial);
    }

    #[test]
    fn endpoints() {
        let tol = 1e-12;
        match endpoint(&CurveFamily::radii(), PI / 2.0, tol).unwrap() {
            Endpoint::Point(z) => assert!((z - Complex64::i()).norm() < 1e-9),
            e => panic!("{e:?}"),
        }
        for alpha in [-3.0, 0.0, 2.5] {
            match endpoint(&CurveFamily::log_spirals(), alpha, tol).unwrap() {
                Endpoint::Point(z) => assert!((z - 1.0).norm() < 1e-9),
                e => panic!("{e:?}"),
            }
        }
        assert_eq!(endpoint(&CurveFamily::single_spiral(), 0.0, tol).unwrap(), Endpoint::Accumulating);
        assert!(endpoint(&CurveFamily::rays(), 0.0, tol).is_err());
    }

    #[test]
    fn single_spiral_point() {
        let f = CurveFamily::single_spiral();
        let u = -(-6.0 * PI).exp_m1();
        let z = curve_point(&f, 0.0, u).unwrap();
        let expect = 1.0 - (-6.0 * PI).exp();
        assert!((z.re - expect).abs() < 1e-12 && z.im.abs() < 1e-6);
        assert!(curve_point(&f, 0.0, 1.0).is_err());
        assert!(curve_point(&f, 0.0, 0.0).is_err());
    }

    #[test]
    fn radii_distance_closed_form() {
        let f = CurveFamily::radii();
        let grid = f.grid(1024);
        assert_eq!(*grid.last().unwrap(), GRID_EDGE);
        let a = f.sample(0.0, &grid).unwrap();
        let b = f.sample(PI / 2.0, &grid).unwrap();
        let d = r_distance(&a, &b).unwrap();
        assert!((d - 2f64.sqrt() * GRID_EDGE).abs() < 1e-12);
        assert!((d - 1.412833).abs() < 1e-6);
        assert_eq!(r_distance(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn polyline_offset_distance() {
        let grid = Interval::closed_open(0.0, 1.0).grid(64);
        let radius = SampledCurve::sample(&CurveSpec::radius(0.0), &grid).unwrap();
        let knots = vec![0.0, 1.0];
        let pts = vec![Complex64::new(0.01, 0.0), Complex64::new(1.01, 0.0)];
        let shifted = SampledCurve::sample(&CurveSpec::polyline(knots, pts).unwrap(), &grid).unwrap();
        assert!((r_distance(&radius, &shifted).unwrap() - 0.01).abs() < 1e-15);
    }

    #[test]
    fn mismatched_grids_rejected() {
        let f = CurveFamily::radii();
        let a = f.sample(0.0, &f.grid(10)).unwrap();
        let b = f.sample(0.0, &f.grid(11)).unwrap();
        assert!(matches!(r_distance(&a, &b), Err(Error::Usage(_))));
        assert!(matches!(truncated_r_distance(&a, &b, 1), Err(Error::Usage(_))));
    }

    #[test]
    fn truncated_rays() {
        let delta = 0.1;
        let grid: Vec<f64> = (0..=40).map(|i| i as f64 * 0.1).collect();
        let r0 = SampledCurve::sample(&CurveSpec::ray(0.0), &grid).unwrap();
        let r1 = SampledCurve::sample(&CurveSpec::ray(delta), &grid).unwrap();
        let d = truncated_r_distance(&r0, &r1, 2).unwrap();
        assert!((d - 4.0 * (delta / 2.0).sin()).abs() < 1e-12);
        assert_eq!(truncated_r_distance(&r0, &r0, 3).unwrap(), 0.0);
        // Vacuous maximum.
        let far: Vec<f64> = (0..10).map(|i| 10.0 + i as f64).collect();
        let f0 = SampledCurve::sample(&CurveSpec::ray(0.0), &far).unwrap();
        let f1 = SampledCurve::sample(&CurveSpec::ray(1.0), &far).unwrap();
        assert_eq!(truncated_r_distance(&f0, &f1, 2).unwrap(), 0.0);
    }

    #[test]
    fn subfamily_examples() {
        let f = CurveFamily::radii();
        let s = SubfamilySearch::default();
        let m = nearest_subfamily_member(&f, 0.5, 0.05, 1, &s).unwrap();
        assert_eq!(m, SubfamilyMember::Dyadic { num: 1, depth: 1 });

        let m = nearest_subfamily_member(&f, PI / 4.0, 0.05, 1, &s).unwrap();
        let grid = f.grid(s.grid_points);
        assert!(member_distance(&f, PI / 4.0, m.value(), 1, &grid).unwrap() < 0.05);
        // 25/32 qualifies too.
        assert!(member_distance(&f, PI / 4.0, 25.0 / 32.0, 1, &grid).unwrap() < 0.05);

        let err = nearest_subfamily_member(&f, PI / 4.0, 1e-12, 1, &s).unwrap_err();
        assert!(matches!(err, Error::Certification(_)));

        assert_eq!(
            nearest_subfamily_member(&f, 0.0, 0.01, 1, &s).unwrap(),
            SubfamilyMember::Endpoint { value: 0.0 }
        );
    }

    #[test]
    fn certify_single_curve_family() {
        let f = CurveFamily::single_spiral();
        let r = certify_continuous(&f, 1e-3, 1, &alpha_grid(&f, 5), &SubfamilySearch::default());
        assert!(r.pass);
        assert_eq!(r.entries.len(), 1);
        assert_eq!(r.entries[0].witness, Some(SubfamilyMember::Endpoint { value: 0.0 }));
    }

    #[test]
    fn degenerate_family_with_endpoints() {
        let j = Interval::new(0.0, 1.0, true, true).unwrap();
        assert_eq!(j.included_endpoints(), vec![0.0, 1.0]);
        let mut f = CurveFamily::radii();
        f.param_domain = Interval::new(0.0, 2.0_f64.sqrt(), true, true).unwrap();
        let m = nearest_subfamily_member(&f, 2.0_f64.sqrt(), 1e-9, 1, &SubfamilySearch::default()).unwrap();
        assert_eq!(m, SubfamilyMember::Endpoint { value: 2.0_f64.sqrt() });
    }

    #[test]
    fn interval_validation() {
        assert!(Interval::new(1.0, 0.0, true, true).is_err());
        assert!(Interval::new(f64::NEG_INFINITY, 0.0, true, false).is_err());
        assert!(Interval::new(0.0, 0.0, true, false).is_err());
        let j: Interval = serde_json::from_str(r#"{"lo":null,"hi":0.0,"lo_closed":false,"hi_closed":false}"#).unwrap();
        assert_eq!(j.lo, f64::NEG_INFINITY);
    }

    #[test]
    fn family_serde() {
        let f: CurveFamily = serde_json::from_str(r#"{"kind":"radii"}"#).unwrap();
        assert_eq!(f, CurveFamily::radii());
        let text = serde_json::to_string(&f).unwrap();
        let back: CurveFamily = serde_json::from_str(&text).unwrap();
        assert_eq!(back, f);
        assert!(serde_json::from_str::<CurveFamily>(r#"{"kind":"hyperbolas"}"#).is_err());
    }
}
