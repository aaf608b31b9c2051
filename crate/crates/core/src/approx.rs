//! Simultaneous polynomial approximation on finitely many disjoint closed
//! disks.
//!
//! Fits are discrete weighted least-squares problems on boundary samples.
//! The basis is orthonormalized against the sample inner product by an
//! Arnoldi recurrence (multiply by `z`, then Gram-Schmidt twice), so no
//! monomial Vandermonde matrix is ever formed. The resulting polynomial is
//! stored as the Hessenberg recurrence plus expansion coefficients and is
//! always evaluated through that recurrence.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::enumeration::unit_from_turns;
use crate::error::{Error, Result};
use crate::poly::Evaluable;

/// Monomial coefficients are flagged unreliable above this amplification.
pub const MONOMIAL_CONDITION_LIMIT: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disk {
    pub center: Complex64,
    pub radius: f64,
}

impl Disk {
    pub fn new(center: Complex64, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() || !center.re.is_finite() || !center.im.is_finite() {
            return Err(Error::Domain(format!("invalid disk radius {radius}")));
        }
        Ok(Disk { center, radius })
    }

    pub fn contains(&self, z: Complex64) -> bool {
        (z - self.center).norm() <= self.radius
    }

    /// Signed gap between the closed disks; positive iff disjoint.
    pub fn gap(&self, other: &Disk) -> f64 {
        (self.center - other.center).norm() - self.radius - other.radius
    }

    pub fn scaled(&self, factor: f64) -> Disk {
        Disk { center: self.center, radius: self.radius * factor }
    }
}

/// `n` equispaced points `center + radius e^{i(2 pi k / n + phase)}`.
pub fn sample_disk_boundary(disk: &Disk, n: usize, phase: f64) -> Vec<Complex64> {
    let shift = phase / (2.0 * PI);
    (0..n)
        .map(|k| disk.center + unit_from_turns(k as f64 / n as f64 + shift) * disk.radius)
        .collect()
}

/// Phase of the control grid interleaved with an `n`-point fit grid.
pub fn control_phase(fit_samples: usize) -> f64 {
    PI / (2 * fit_samples) as f64
}

/// Max of `|f - target|` over `n_control` boundary points at `phase`.
pub fn sup_error_at(f: &dyn Evaluable, target: &dyn Evaluable, disk: &Disk, n_control: usize, phase: f64) -> f64 {
    sample_disk_boundary(disk, n_control, phase)
        .into_iter()
        .map(|z| (f.eval(z) - target.eval(z)).norm())
        .fold(0.0, f64::max)
}

/// Boundary sup error; by the maximum-modulus principle this controls the
/// error over the closed disk for holomorphic `f - target`.
pub fn sup_error(f: &dyn Evaluable, target: &dyn Evaluable, disk: &Disk, n_control: usize) -> Result<f64> {
    if n_control < 64 {
        return Err(Error::Usage(format!("need at least 64 control samples, got {n_control}")));
    }
    Ok(sup_error_at(f, target, disk, n_control, 0.0))
}

/// One region of a simultaneous fit.
pub struct PieceTarget<'a> {
    pub region: Disk,
    pub target: &'a dyn Evaluable,
    pub tolerance: f64,
    pub fit_samples: usize,
    pub control_samples: usize,
}

impl<'a> PieceTarget<'a> {
    /// Control grid twice as dense as the fit grid.
    pub fn new(region: Disk, target: &'a dyn Evaluable, tolerance: f64, fit_samples: usize) -> Self {
        PieceTarget { region, target, tolerance, fit_samples, control_samples: 2 * fit_samples }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitConfig {
    pub max_degree: usize,
    /// Nested degrees to try; empty means doubling from 8 up to
    /// `max_degree`.
    pub schedule: Vec<usize>,
    /// Accept once every control error is below this fraction of its
    /// tolerance; the rest is margin for grid gaps.
    pub accept_fraction: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig { max_degree: 512, schedule: Vec::new(), accept_fraction: 0.5 }
    }
}

impl FitConfig {
    pub fn with_max_degree(max_degree: usize) -> Self {
        FitConfig { max_degree, ..Default::default() }
    }

    pub fn degrees(&self) -> Vec<usize> {
        if !self.schedule.is_empty() {
            let mut s: Vec<usize> = self.schedule.iter().copied().filter(|&d| d <= self.max_degree).collect();
            s.sort_unstable();
            s.dedup();
            return s;
        }
        let mut out = Vec::new();
        let mut d = 8;
        while d < self.max_degree {
            out.push(d);
            d *= 2;
        }
        out.push(self.max_degree);
        out
    }

    /// Fit samples per piece: twice the top degree plus a small pad.
    pub fn default_fit_samples(&self) -> usize {
        2 * self.max_degree + 32
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PieceReport {
    pub tolerance: f64,
    pub control_error: f64,
    pub fit_error: f64,
    /// Half the largest jump between neighbouring control samples.
    pub gap_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeRecord {
    pub degree: usize,
    pub residual: f64,
    pub worst_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub success: bool,
    pub degree: usize,
    pub pieces: Vec<PieceReport>,
    pub history: Vec<DegreeRecord>,
}

/// Polynomial in a sample-orthonormal basis.
///
/// Basis values obey `P_0 = p0` and
/// `h[k][k+1] P_{k+1}(z) = z P_k(z) - sum_{j<=k} h[k][j] P_j(z)`,
/// where `h[k]` is the `k`-th Hessenberg column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedPolynomial {
    pub p0: f64,
    pub hessenberg: Vec<Vec<Complex64>>,
    pub coeffs: Vec<Complex64>,
    pub monomial: Option<Vec<Complex64>>,
    pub monomial_reliable: bool,
}

impl FittedPolynomial {
    pub fn zero() -> Self {
        FittedPolynomial {
            p0: 1.0,
            hessenberg: Vec::new(),
            coeffs: vec![Complex64::zero()],
            monomial: Some(Vec::new()),
            monomial_reliable: true,
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn neg(&self) -> Self {
        FittedPolynomial {
            p0: self.p0,
            hessenberg: self.hessenberg.clone(),
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
            monomial: self.monomial.as_ref().map(|m| m.iter().map(|c| -c).collect()),
            monomial_reliable: self.monomial_reliable,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.degree();
        if self.hessenberg.len() < d {
            return Err(Error::Format("recurrence shorter than degree".into()));
        }
        for (k, col) in self.hessenberg.iter().enumerate().take(d) {
            if col.len() != k + 2 || col[k + 1].is_zero() {
                return Err(Error::Format(format!("malformed recurrence column {k}")));
            }
        }
        Ok(())
    }

    fn basis_step(&self, k: usize, z: Complex64, vals: &[Complex64]) -> Complex64 {
        let col = &self.hessenberg[k];
        let mut v = z * vals[k];
        for (j, h) in col.iter().enumerate().take(k + 1) {
            v -= h * vals[j];
        }
        v / col[k + 1]
    }

    pub fn eval_recurrence(&self, z: Complex64) -> Complex64 {
        let d = self.degree();
        let mut vals = Vec::with_capacity(d + 1);
        vals.push(Complex64::new(self.p0, 0.0));
        let mut acc = self.coeffs[0] * vals[0];
        for k in 0..d {
            let next = self.basis_step(k, z, &vals);
            vals.push(next);
            acc += self.coeffs[k + 1] * next;
        }
        acc
    }

    pub fn derivative_recurrence(&self, z: Complex64) -> Complex64 {
        let d = self.degree();
        let mut vals = vec![Complex64::new(self.p0, 0.0)];
        let mut ders = vec![Complex64::zero()];
        let mut acc = Complex64::zero();
        for k in 0..d {
            let col = &self.hessenberg[k];
            let mut dv = vals[k] + z * ders[k];
            for (j, h) in col.iter().enumerate().take(k + 1) {
                dv -= h * ders[j];
            }
            let next_d = dv / col[k + 1];
            let next = self.basis_step(k, z, &vals);
            vals.push(next);
            ders.push(next_d);
            acc += self.coeffs[k + 1] * next_d;
        }
        acc
    }

    /// Expands the recurrence into monomial coefficients.
    pub fn to_monomial(&self) -> Vec<Complex64> {
        let d = self.degree();
        let mut basis: Vec<Vec<Complex64>> = vec![vec![Complex64::new(self.p0, 0.0)]];
        let mut out = vec![self.coeffs[0] * self.p0];
        out.resize(d + 1, Complex64::zero());
        for k in 0..d {
            let col = &self.hessenberg[k];
            let mut next = vec![Complex64::zero(); k + 2];
            for (i, c) in basis[k].iter().enumerate() {
                next[i + 1] += c;
            }
            for (j, h) in col.iter().enumerate().take(k + 1) {
                for (i, c) in basis[j].iter().enumerate() {
                    next[i] -= h * c;
                }
            }
            for c in next.iter_mut() {
                *c /= col[k + 1];
            }
            for (i, c) in next.iter().enumerate() {
                out[i] += self.coeffs[k + 1] * c;
            }
            basis.push(next);
        }
        while out.last().is_some_and(|c| c.is_zero()) {
            out.pop();
        }
        out
    }

    /// Attaches monomial coefficients, flagging them unreliable when
    /// `sum |a_k| R^k` exceeds the sampled maximum by more than
    /// [`MONOMIAL_CONDITION_LIMIT`] or anything overflows.
    fn attach_monomial(&mut self, samples: &[Complex64]) {
        let mono = self.to_monomial();
        let finite = mono.iter().all(|c| c.re.is_finite() && c.im.is_finite());
        if !finite {
            self.monomial = None;
            self.monomial_reliable = false;
            return;
        }
        let r = samples.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
        let mut weight = 1.0;
        let mut amplified = 0.0;
        for c in &mono {
            amplified += c.norm() * weight;
            weight *= r;
        }
        let peak = samples.iter().map(|&z| self.eval_recurrence(z).norm()).fold(0.0, f64::max);
        self.monomial_reliable =
            amplified == 0.0 || (amplified.is_finite() && amplified <= MONOMIAL_CONDITION_LIMIT * peak);
        self.monomial = Some(mono);
    }
}

impl Evaluable for FittedPolynomial {
    fn eval(&self, z: Complex64) -> Complex64 {
        self.eval_recurrence(z)
    }

    fn derivative(&self, z: Complex64) -> Option<Complex64> {
        Some(self.derivative_recurrence(z))
    }
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

struct PieceData {
    fit: std::ops::Range<usize>,
    ctrl: std::ops::Range<usize>,
    tolerance: f64,
}

/// Fits one polynomial to all pieces; see the module docs.
pub fn fit_simultaneous(pieces: &[PieceTarget<'_>], config: &FitConfig) -> Result<(FittedPolynomial, FitReport)> {
    if pieces.is_empty() {
        return Err(Error::Precondition("no pieces to fit".into()));
    }
    for (i, a) in pieces.iter().enumerate() {
        if !(a.tolerance > 0.0) || a.fit_samples < 8 || a.control_samples < 8 {
            return Err(Error::Precondition(format!("piece {i}: tolerance and sample counts must be positive")));
        }
        for b in &pieces[i + 1..] {
            if !(a.region.gap(&b.region) > 0.0) {
                return Err(Error::Precondition("fit regions overlap".into()));
            }
        }
    }
    let degrees = config.degrees();
    let max_degree = *degrees.last().unwrap_or(&0);
    let total_fit: usize = pieces.iter().map(|p| p.fit_samples).sum();
    if total_fit <= max_degree {
        return Err(Error::Precondition(format!("{total_fit} fit samples cannot determine degree {max_degree}")));
    }

    let mut fit_z = Vec::with_capacity(total_fit);
    let mut weights = Vec::with_capacity(total_fit);
    let mut fit_y = Vec::with_capacity(total_fit);
    let mut ctrl_z = Vec::new();
    let mut ctrl_y = Vec::new();
    let mut meta = Vec::with_capacity(pieces.len());
    for p in pieces {
        let fs = fit_z.len();
        let cs = ctrl_z.len();
        for z in sample_disk_boundary(&p.region, p.fit_samples, 0.0) {
            fit_z.push(z);
            fit_y.push(p.target.eval(z));
            weights.push(1.0 / p.tolerance);
        }
        let phase = PI / p.control_samples as f64;
        for z in sample_disk_boundary(&p.region, p.control_samples, phase) {
            ctrl_z.push(z);
            ctrl_y.push(p.target.eval(z));
        }
        meta.push(PieceData { fit: fs..fit_z.len(), ctrl: cs..ctrl_z.len(), tolerance: p.tolerance });
    }
    if fit_y.iter().chain(&ctrl_y).any(|y| !(y.re.is_finite() && y.im.is_finite())) {
        return Err(Error::Precondition("target is not finite on the samples".into()));
    }

    let wnorm = weights.iter().map(|w| w * w).sum::<f64>().sqrt();
    let p0 = 1.0 / wnorm;
    let mut q: Vec<Vec<Complex64>> = vec![weights.iter().map(|w| Complex64::new(w * p0, 0.0)).collect()];
    let mut ctrl_basis: Vec<Vec<Complex64>> = vec![vec![Complex64::new(p0, 0.0); ctrl_z.len()]];
    let mut hessenberg: Vec<Vec<Complex64>> = Vec::new();
    let mut residual: Vec<Complex64> = fit_y.iter().zip(&weights).map(|(y, w)| y * w).collect();
    let mut coeffs: Vec<Complex64> = Vec::new();
    let mut ctrl_approx = vec![Complex64::zero(); ctrl_z.len()];

    let project = |col: &[Complex64], ctrl_col: &[Complex64], residual: &mut Vec<Complex64>, coeffs: &mut Vec<Complex64>, ctrl_approx: &mut Vec<Complex64>| {
        let c = inner(col, residual);
        for (r, qv) in residual.iter_mut().zip(col) {
            *r -= c * qv;
        }
        for (a, b) in ctrl_approx.iter_mut().zip(ctrl_col) {
            *a += c * b;
        }
        coeffs.push(c);
    };
    project(&q[0], &ctrl_basis[0], &mut residual, &mut coeffs, &mut ctrl_approx);

    let measure = |residual: &[Complex64], ctrl_approx: &[Complex64]| -> Vec<PieceReport> {
        meta.iter()
            .map(|m| {
                let ctrl_err: Vec<f64> = m.ctrl.clone().map(|i| (ctrl_approx[i] - ctrl_y[i]).norm()).collect();
                let control_error = ctrl_err.iter().copied().fold(0.0, f64::max);
                let n = m.ctrl.len();
                let gap_bound = (0..n)
                    .map(|i| {
                        let a = ctrl_approx[m.ctrl.start + i] - ctrl_y[m.ctrl.start + i];
                        let b = ctrl_approx[m.ctrl.start + (i + 1) % n] - ctrl_y[m.ctrl.start + (i + 1) % n];
                        0.5 * (a - b).norm()
                    })
                    .fold(0.0, f64::max);
                let fit_error = m.fit.clone().map(|i| residual[i].norm() / weights[i]).fold(0.0, f64::max);
                PieceReport { tolerance: m.tolerance, control_error, fit_error, gap_bound }
            })
            .collect()
    };

    let mut history = Vec::new();
    let mut best: Option<(f64, usize, Vec<PieceReport>)> = None;
    let mut accepted: Option<(usize, Vec<PieceReport>)> = None;
    let mut degree = 0;
    for &target_degree in &degrees {
        while degree < target_degree {
            let k = degree;
            let mut v: Vec<Complex64> = q[k].iter().zip(&fit_z).map(|(qv, z)| qv * z).collect();
            let mut col = vec![Complex64::zero(); k + 2];
            for _pass in 0..2 {
                let proj: Vec<Complex64> = q.iter().map(|qj| inner(qj, &v)).collect();
                for (j, c) in proj.iter().enumerate() {
                    for (vi, qi) in v.iter_mut().zip(&q[j]) {
                        *vi -= c * qi;
                    }
                    col[j] += c;
                }
            }
            let h = norm(&v);
            if !(h > 1e-300) {
                return Err(Error::Precondition(format!("basis breakdown at degree {}", k + 1)));
            }
            col[k + 1] = Complex64::new(h, 0.0);
            for vi in v.iter_mut() {
                *vi /= h;
            }
            let ctrl_next: Vec<Complex64> = ctrl_z
                .iter()
                .enumerate()
                .map(|(i, z)| {
                    let mut acc = z * ctrl_basis[k][i];
                    for (j, hj) in col.iter().enumerate().take(k + 1) {
                        acc -= hj * ctrl_basis[j][i];
                    }
                    acc / h
                })
                .collect();
            q.push(v);
            ctrl_basis.push(ctrl_next);
            hessenberg.push(col);
            project(&q[k + 1], &ctrl_basis[k + 1], &mut residual, &mut coeffs, &mut ctrl_approx);
            degree += 1;
        }
        let reports = measure(&residual, &ctrl_approx);
        let worst_ratio = reports.iter().map(|r| r.control_error / r.tolerance).fold(0.0, f64::max);
        history.push(DegreeRecord { degree, residual: norm(&residual), worst_ratio });
        if best.as_ref().is_none_or(|(b, _, _)| worst_ratio < *b) {
            best = Some((worst_ratio, degree, reports.clone()));
        }
        if worst_ratio < config.accept_fraction {
            accepted = Some((degree, reports));
            break;
        }
    }

    let (success, degree, pieces_report) = match accepted {
        Some((d, r)) => (true, d, r),
        None => {
            let (_, d, r) = best.expect("at least one degree tried");
            (false, d, r)
        }
    };
    coeffs.truncate(degree + 1);
    hessenberg.truncate(degree);
    let mut fitted = FittedPolynomial { p0, hessenberg, coeffs, monomial: None, monomial_reliable: false };
    fitted.attach_monomial(&fit_z);
    let report = FitReport { success, degree, pieces: pieces_report, history };
    Ok((fitted, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Polynomial;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn boundary_samples() {
        let unit = Disk::new(c(0.0, 0.0), 1.0).unwrap();
        let pts = sample_disk_boundary(&unit, 4, 0.0);
        assert_eq!(pts, vec![c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)]);
        let d = Disk::new(c(2.0, 0.0), 0.5).unwrap();
        assert_eq!(sample_disk_boundary(&d, 2, 0.0), vec![c(2.5, 0.0), c(1.5, 0.0)]);
        let a = sample_disk_boundary(&unit, 16, 0.0);
        let b = sample_disk_boundary(&unit, 16, PI / 16.0);
        for x in &a {
            assert!(b.iter().all(|y| (x - y).norm() > 0.1));
        }
        assert!(Disk::new(c(0.0, 0.0), 0.0).is_err());
    }

    #[test]
    fn sup_error_examples() {
        let unit = Disk::new(c(0.0, 0.0), 1.0).unwrap();
        let p = Polynomial::new(vec![c(1.0, 2.0), c(0.0, 1.0)]);
        assert_eq!(sup_error(&p, &p, &unit, 64).unwrap(), 0.0);
        let shifted = Polynomial::new(vec![c(1.5, 2.0), c(0.0, 1.0)]);
        assert!((sup_error(&shifted, &p, &unit, 64).unwrap() - 0.5).abs() < 1e-15);
        let z = Polynomial::new(vec![c(0.0, 0.0), c(1.0, 0.0)]);
        assert!((sup_error(&z, &Polynomial::zero(), &unit, 128).unwrap() - 1.0).abs() < 1e-15);
        assert!(sup_error(&z, &z, &unit, 10).is_err());
    }

    #[test]
    fn recovers_z_squared() {
        let target = Polynomial::new(vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let disk = Disk::new(c(0.0, 0.0), 1.0).unwrap();
        let pieces = [PieceTarget::new(disk, &target, 1e-6, 64)];
        let cfg = FitConfig { max_degree: 8, schedule: vec![2, 4, 8], accept_fraction: 0.5 };
        let (f, report) = fit_simultaneous(&pieces, &cfg).unwrap();
        assert!(report.success);
        assert_eq!(report.degree, 2);
        assert!(report.pieces[0].control_error <= 1e-13);
        let z = c(1.0, 1.0);
        assert!((f.eval(z) - c(0.0, 2.0)).norm() < 1e-12);
        let mono = f.monomial.clone().unwrap();
        assert!(f.monomial_reliable);
        assert!((mono[2] - c(1.0, 0.0)).norm() < 1e-12);
        assert!(mono[0].norm() < 1e-12 && mono[1].norm() < 1e-12);
        assert!((f.derivative_recurrence(z) - c(2.0, 2.0)).norm() < 1e-12);
    }

    #[test]
    fn overlapping_regions_rejected() {
        let zero = Polynomial::zero();
        let a = Disk::new(c(0.0, 0.0), 0.5).unwrap();
        let b = Disk::new(c(0.8, 0.0), 0.4).unwrap();
        let pieces = [PieceTarget::new(a, &zero, 1e-3, 64), PieceTarget::new(b, &zero, 1e-3, 64)];
        let err = fit_simultaneous(&pieces, &FitConfig::with_max_degree(16)).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn zero_target_gives_zero() {
        let zero = Polynomial::zero();
        let a = Disk::new(c(0.0, 0.0), 0.3).unwrap();
        let b = Disk::new(c(0.9, 0.0), 0.05).unwrap();
        let pieces = [PieceTarget::new(a, &zero, 1e-3, 64), PieceTarget::new(b, &zero, 1e-3, 64)];
        let (f, report) = fit_simultaneous(&pieces, &FitConfig::with_max_degree(16)).unwrap();
        assert!(report.success);
        assert!(f.coeffs.iter().all(|c| c.is_zero()));
        assert_eq!(f.eval(c(0.4, 0.4)), Complex64::zero());
    }

    #[test]
    fn schedule_defaults() {
        assert_eq!(FitConfig::with_max_degree(512).degrees(), vec![8, 16, 32, 64, 128, 256, 512]);
        assert_eq!(FitConfig::with_max_degree(100).degrees(), vec![8, 16, 32, 64, 100]);
        let cfg = FitConfig { max_degree: 20, schedule: vec![30, 4, 12, 4], accept_fraction: 0.5 };
        assert_eq!(cfg.degrees(), vec![4, 12]);
    }

    #[test]
    fn negation_is_exact() {
        let target = Polynomial::new(vec![c(0.3, 0.1), c(-1.0, 0.2), c(0.5, 0.5)]);
        let disk = Disk::new(c(0.1, 0.0), 0.7).unwrap();
        let pieces = [PieceTarget::new(disk, &target, 1e-6, 64)];
        let (f, _) = fit_simultaneous(&pieces, &FitConfig::with_max_degree(8)).unwrap();
        let g = f.neg();
        for z in [c(0.2, 0.3), c(-0.5, 0.1)] {
            assert_eq!(f.eval(z) + g.eval(z), Complex64::zero());
        }
    }
}
