//! Independent certification of universality claims.
//!
//! Everything here recomputes errors from the stored series and raw indices.
//! Sup norms are taken over boundary samples of `L_m` on a grid whose phase
//! is an irrational fraction of the spacing, so it never coincides with any
//! fit or builder grid.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::approx::{sample_disk_boundary, Disk};
use crate::builder::{CurveRef, ResolvedTask, SearchLimits, UniversalSeries};
use crate::curves::{CurveFamily, SampledCurve};
use crate::enumeration::{boundary_point, poly, scale, subfamily_curve, SubfamilyCurve};
use crate::error::{Error, Result};
use crate::poly::{Evaluable, Polynomial};

/// Fewest boundary samples a certificate may use.
pub const MIN_CONTROL_SAMPLES: usize = 64;

/// Verifier grid phase: `pi (sqrt 5 - 1) / n`, i.e. the golden fraction of
/// the grid spacing.
pub fn verifier_phase(n_control: usize) -> f64 {
    PI * (5f64.sqrt() - 1.0) / n_control as f64
}

/// Raw indices of an `O_C(m, j, p, s, t, l, k, n)` claim.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MembershipIndices {
    pub m: u32,
    #[serde(with = "crate::format::big_decimal")]
    pub j: BigUint,
    pub p: u64,
    pub s: u64,
    pub t: u64,
    pub l: u64,
    pub k: u64,
    pub n: u64,
}

impl MembershipIndices {
    pub fn validate(&self) -> Result<()> {
        let small = [self.m as u64, self.p, self.s, self.t, self.l, self.k, self.n];
        if small.contains(&0) || self.j.is_zero() {
            return Err(Error::Usage("membership indices must all be >= 1".into()));
        }
        Ok(())
    }
}

impl fmt::Display for MembershipIndices {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{},{},{},{},{}", self.m, self.j, self.p, self.s, self.t, self.l, self.k, self.n)
    }
}

impl FromStr for MembershipIndices {
    type Err = Error;

    /// Parses `m,j,p,s,t,l,k,n`.
    fn from_str(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(',').map(str::trim).collect();
        if parts.len() != 8 {
            return Err(Error::Usage(format!("expected 8 comma-separated indices, got {:?}", text)));
        }
        let small = |i: usize| -> Result<u64> {
            parts[i].parse().map_err(|_| Error::Usage(format!("index {:?} is not a natural number", parts[i])))
        };
        let j: BigUint = parts[1].parse().map_err(|_| Error::Usage(format!("index {:?} is not a natural number", parts[1])))?;
        let m = u32::try_from(small(0)?).map_err(|_| Error::Usage("m is too large".into()))?;
        let idx = MembershipIndices { m, j, p: small(2)?, s: small(3)?, t: small(4)?, l: small(5)?, k: small(6)?, n: small(7)? };
        idx.validate()?;
        Ok(idx)
    }
}

/// A concrete window claim: `|f(a z + b) - target(z)| < 1/s` on `L_m` and
/// `|b - zeta| < 1/t`.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowClaim<'a> {
    pub m: u32,
    pub target: &'a Polynomial,
    pub s: u64,
    pub t: u64,
    pub zeta: Complex64,
    pub a: f64,
    pub b: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub task: Option<usize>,
    pub indices: Option<MembershipIndices>,
    pub m: u32,
    pub s: u64,
    pub t: u64,
    pub zeta: Complex64,
    pub a: f64,
    pub b: Complex64,
    #[serde(with = "crate::format::extended_float")]
    pub sup_error: f64,
    pub zeta_distance: f64,
    /// `1/s - sup_error`.
    #[serde(with = "crate::format::extended_float")]
    pub margin: f64,
    pub n_control: usize,
    pub phase: f64,
    pub pass: bool,
    pub verifier_hash: String,
    pub reason: Option<String>,
}

impl Certificate {
    pub fn accuracy(&self) -> f64 {
        1.0 / self.s as f64
    }

    /// Recomputes the verdict from the stored numbers.
    pub fn recheck(&self) -> bool {
        let margin = self.accuracy() - self.sup_error;
        margin == self.margin && (margin > 0.0 && self.zeta_distance < 1.0 / self.t as f64) == self.pass
    }
}

/// Hash of the verifier grid settings recorded in each certificate.
pub fn verifier_hash(n_control: usize, phase: f64) -> String {
    let text = format!("boundary-grid;n={n_control};phase={phase:.16e}");
    hex::encode(Sha256::digest(text.as_bytes()))
}

fn check_samples(n_control: usize) -> Result<()> {
    if n_control < MIN_CONTROL_SAMPLES {
        return Err(Error::Usage(format!("need at least {MIN_CONTROL_SAMPLES} control samples, got {n_control}")));
    }
    Ok(())
}

/// Boundary sup of `|f(a z + b) - target(z)|` over `|z| = m`, stopping as
/// soon as the running max reaches `stop_at`.
fn window_error(f: &dyn Evaluable, claim: &WindowClaim<'_>, n_control: usize, stop_at: f64) -> f64 {
    let lm = Disk { center: Complex64::zero(), radius: claim.m as f64 };
    let mut worst = 0.0f64;
    for z in sample_disk_boundary(&lm, n_control, verifier_phase(n_control)) {
        let e = (f.eval(z * claim.a + claim.b) - claim.target.horner(z)).norm();
        if !(e <= worst) {
            worst = if e.is_nan() { f64::INFINITY } else { e };
            if worst >= stop_at {
                break;
            }
        }
    }
    worst
}

fn window_escapes(claim: &WindowClaim<'_>) -> bool {
    !(claim.a > 0.0 && claim.a * claim.m as f64 + claim.b.norm() < 1.0)
}

/// Certifies a window claim.
pub fn certify_window(f: &dyn Evaluable, claim: &WindowClaim<'_>, n_control: usize) -> Result<Certificate> {
    check_samples(n_control)?;
    let phase = verifier_phase(n_control);
    let zeta_distance = (claim.b - claim.zeta).norm();
    let accuracy = 1.0 / claim.s as f64;
    let mut cert = Certificate {
        task: None,
        indices: None,
        m: claim.m,
        s: claim.s,
        t: claim.t,
        zeta: claim.zeta,
        a: claim.a,
        b: claim.b,
        sup_error: f64::INFINITY,
        zeta_distance,
        margin: f64::NEG_INFINITY,
        n_control,
        phase,
        pass: false,
        verifier_hash: verifier_hash(n_control, phase),
        reason: None,
    };
    if window_escapes(claim) {
        cert.reason = Some(format!(
            "window a L_m + b leaves the unit disc: a m + |b| = {:.17e}",
            claim.a * claim.m as f64 + claim.b.norm()
        ));
        return Ok(cert);
    }
    cert.sup_error = window_error(f, claim, n_control, f64::INFINITY);
    cert.margin = accuracy - cert.sup_error;
    let near = zeta_distance < 1.0 / claim.t as f64;
    cert.pass = cert.margin > 0.0 && near;
    if !cert.pass {
        cert.reason = Some(if cert.margin > 0.0 {
            format!("anchor is {zeta_distance:.6e} from the boundary point, need < 1/{}", claim.t)
        } else {
            format!("sup error {:.6e} is not below 1/{}", cert.sup_error, claim.s)
        });
    }
    Ok(cert)
}

/// Window geometry `(a_k, b_{nlp})` and target `p_j` decoded from indices.
pub fn decode_indices(idx: &MembershipIndices, family: &CurveFamily, depth: u32) -> Result<(f64, Complex64, Complex64, Polynomial)> {
    idx.validate()?;
    let zeta = boundary_point(idx.p);
    let curve = subfamily_curve(family, zeta, idx.l, depth)?;
    let b = curve.anchor(zeta, idx.n)?;
    Ok((scale(idx.k), b, zeta, poly(&idx.j)?.to_complex()))
}

/// `O_C(m, j, p, s, t, l, k, n)` membership of `f`.
pub fn membership(f: &dyn Evaluable, idx: &MembershipIndices, family: &CurveFamily, n_control: usize, depth: u32) -> Result<Certificate> {
    let (a, b, zeta, target) = decode_indices(idx, family, depth)?;
    let claim = WindowClaim { m: idx.m, target: &target, s: idx.s, t: idx.t, zeta, a, b };
    let mut cert = certify_window(f, &claim, n_control)?;
    cert.indices = Some(idx.clone());
    Ok(cert)
}

/// Relaxed membership: the anchor only has to lie within `1/h` of the
/// sampled curve.
pub fn relaxed_membership(
    f: &dyn Evaluable,
    claim: &WindowClaim<'_>,
    curve: &SampledCurve,
    h: u64,
    n_control: usize,
) -> Result<Certificate> {
    if h < 1 {
        return Err(Error::Usage("tube index h must be >= 1".into()));
    }
    let mut cert = certify_window(f, claim, n_control)?;
    let off = curve.distance_to(claim.b);
    if cert.pass && !(off < 1.0 / h as f64) {
        cert.pass = false;
        cert.reason = Some(format!("anchor is {off:.6e} off the curve, need < 1/{h}"));
    }
    Ok(cert)
}

/// Margin `1/s - error` of a passing claim. Any perturbation whose sup on
/// the window stays below it keeps the claim passing.
pub fn openness_margin(f: &dyn Evaluable, claim: &WindowClaim<'_>, n_control: usize) -> Result<f64> {
    let cert = certify_window(f, claim, n_control)?;
    if !cert.pass {
        return Err(Error::Usage(format!(
            "membership fails: {}",
            cert.reason.unwrap_or_else(|| "unknown".into())
        )));
    }
    Ok(cert.margin)
}

#[derive(Debug, Clone, PartialEq)]
pub enum VerifyOutcome {
    Found { l: u64, k: u64, n: u64, certificate: Certificate },
    /// Largest margin seen. Scans stop early once a window clearly fails, so
    /// this is an upper bound on the true margin of that window.
    NotFound { best_margin: f64 },
}

fn candidate_curves(family: &CurveFamily, task: &ResolvedTask, limits: &SearchLimits) -> Result<Vec<(u64, SubfamilyCurve)>> {
    let ls: Vec<u64> = match task.curve {
        CurveRef::Subfamily(Some(l)) => vec![l],
        _ => (1..=limits.l_max).collect(),
    };
    let mut out: Vec<(u64, SubfamilyCurve)> = Vec::new();
    for l in ls {
        let c = subfamily_curve(family, task.zeta, l, limits.subfamily_depth)?;
        // Different l can resolve to the same member; scanning it twice is
        // pointless.
        if !out.iter().any(|(_, prev)| prev.member == c.member) {
            out.push((l, c));
        }
    }
    Ok(out)
}

/// Searches for a witness `(l, k, n)` for `task`, scanning `l`, then `k`,
/// then `n`, and returns the first passing certificate.
pub fn verify_target(
    f: &dyn Evaluable,
    task: &ResolvedTask,
    family: &CurveFamily,
    limits: &SearchLimits,
    n_control: usize,
) -> Result<VerifyOutcome> {
    check_samples(n_control)?;
    let accuracy = task.accuracy();
    let proximity = task.proximity();
    let m = task.m as f64;
    let mut best = f64::NEG_INFINITY;
    for (l, curve) in candidate_curves(family, task, limits)? {
        let anchors: Vec<(u64, Complex64)> = (1..=limits.n_max)
            .map(|n| curve.anchor(task.zeta, n).map(|b| (n, b)))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .filter(|(_, b)| (b - task.zeta).norm() < proximity)
            .collect();
        for k in 1..=limits.k_max {
            let a = scale(k);
            for &(n, b) in &anchors {
                if a * m + b.norm() >= 1.0 {
                    continue;
                }
                let claim = WindowClaim { m: task.m, target: &task.target, s: task.s, t: task.t, zeta: task.zeta, a, b };
                let err = window_error(f, &claim, n_control, accuracy);
                best = best.max(accuracy - err);
                if err < accuracy {
                    let mut certificate = certify_window(f, &claim, n_control)?;
                    if let (Some(j), Some(p)) = (&task.j, task.p) {
                        certificate.indices =
                            Some(MembershipIndices { m: task.m, j: j.clone(), p, s: task.s, t: task.t, l, k, n });
                    }
                    return Ok(VerifyOutcome::Found { l, k, n, certificate });
                }
            }
        }
    }
    Ok(VerifyOutcome::NotFound { best_margin: best })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snap {
    pub k: u64,
    pub n: u64,
    /// Distance from the window to the unit circle.
    pub d: f64,
    pub lipschitz: f64,
    pub delta: f64,
    pub certificate: Certificate,
}

/// Max `|f'|` over the disk `|w - b| <= r`, sampled on its boundary.
pub fn lipschitz_bound(f: &dyn Evaluable, b: Complex64, r: f64, n: usize) -> Result<f64> {
    let disk = Disk::new(b, r)?;
    let mut worst = 0.0f64;
    for w in sample_disk_boundary(&disk, n, verifier_phase(n)) {
        let d = f
            .derivative(w)
            .ok_or_else(|| Error::Usage("snapping needs an analytic derivative".into()))?;
        worst = worst.max(d.norm());
    }
    Ok(worst)
}

/// Smallest `k` with `|a_k - a| < eps`. Within a dyadic level the indices
/// increase with the value, and earlier levels have smaller indices.
pub fn nearest_scale_index(a: f64, eps: f64) -> Option<u64> {
    for level in 0..62u32 {
        let den = ((level + 1) as f64).exp2();
        // Odd numerators c = 2b + 1 with c / den > a - eps.
        let lo = ((a - eps) * den).floor().max(0.0) as u64;
        let c = if lo % 2 == 0 { lo + 1 } else { lo + 2 };
        let c = if c as f64 / den > a - eps { c } else { c + 2 };
        if c as f64 >= den {
            continue;
        }
        if (c as f64 / den - a).abs() < eps {
            return Some((1u64 << level) + (c - 1) / 2);
        }
    }
    None
}

/// Replaces a witness `(a, b)` that passes at accuracy `1/(2s)` by the
/// nearest enumerated `(a_k, b_{nlp})`, then certifies it at accuracy `1/s`.
///
/// Let `d = 1 - (a m + |b|)`. On the disk `D(b, a m + d/2)` the series has
/// Lipschitz constant `Lip`; with `delta = min(d/2, 0.9 / (2 s Lip))` any
/// window moved by less than `delta` changes the error by less than
/// `1/(2s)`. The scale moves by `< delta/(2m)` and the anchor by
/// `< min(delta/2, 1/t - |b - zeta|)`.
pub fn snap_witness(
    f: &dyn Evaluable,
    a: f64,
    b: Complex64,
    task: &ResolvedTask,
    curve: &SubfamilyCurve,
    n_control: usize,
    n_max: u64,
) -> Result<Snap> {
    let claim = WindowClaim { m: task.m, target: &task.target, s: task.s, t: task.t, zeta: task.zeta, a, b };
    let pre = certify_window(f, &claim, n_control)?;
    let zeta_distance = (b - task.zeta).norm();
    if window_escapes(&claim) || !(pre.sup_error < 0.5 * task.accuracy()) || !(zeta_distance < task.proximity()) {
        return Err(Error::Usage(format!(
            "witness does not pass at accuracy 1/(2s): error {:.6e}, |b - zeta| = {zeta_distance:.6e}",
            pre.sup_error
        )));
    }
    let m = task.m as f64;
    let d = 1.0 - (a * m + b.norm());
    let lip = lipschitz_bound(f, b, a * m + d / 2.0, n_control.max(4096))?;
    let delta = if lip > 0.0 { (d / 2.0).min(0.9 * task.accuracy() / (2.0 * lip)) } else { d / 2.0 };

    let k = nearest_scale_index(a, delta / (2.0 * m))
        .ok_or_else(|| Error::Certification(format!("no dyadic scale within {:.3e} of {a}", delta / (2.0 * m))))?;
    let reach = (delta / 2.0).min(task.proximity() - zeta_distance);
    let mut found = None;
    for n in 1..=n_max {
        if (curve.anchor(task.zeta, n)? - b).norm() < reach {
            found = Some(n);
            break;
        }
    }
    let n = found.ok_or_else(|| Error::Certification(format!("no anchor within {reach:.3e} among the first {n_max}")))?;
    let snapped = WindowClaim { a: scale(k), b: curve.anchor(task.zeta, n)?, ..claim };
    let certificate = certify_window(f, &snapped, n_control)?;
    Ok(Snap { k, n, d, lipschitz: lip, delta, certificate })
}

/// Re-certifies every recorded witness of a series on the verifier grid.
///
/// Witnesses carrying full indices are decoded from `(m, j, p, s, t, l, k,
/// n)` alone; the decoded anchor must equal the recorded one bit for bit.
/// Witnesses for explicit targets or boundary points are checked at their
/// recorded `(a, b)`.
pub fn certify_series(series: &UniversalSeries, n_control: usize, depth: u32) -> Result<Vec<Certificate>> {
    let mut out = Vec::with_capacity(series.witnesses.len());
    for w in &series.witnesses {
        let task = series
            .tasks
            .get(w.task)
            .ok_or_else(|| Error::Format(format!("witness refers to missing task {}", w.task)))?
            .resolve()?;
        let mut cert = match (&w.j, w.p) {
            (Some(j), Some(p)) => {
                let j: BigUint = j.parse().map_err(|_| Error::Format(format!("bad target index {j:?}")))?;
                let idx = MembershipIndices { m: w.m, j, p, s: w.s, t: w.t, l: w.l, k: w.k, n: w.n };
                let mut cert = membership(series, &idx, &series.family, n_control, depth)?;
                if cert.b != w.b || cert.a != w.a {
                    cert.pass = false;
                    cert.reason = Some("indices do not reproduce the recorded witness".into());
                }
                cert
            }
            _ => {
                let claim = WindowClaim { m: w.m, target: &task.target, s: w.s, t: w.t, zeta: task.zeta, a: w.a, b: w.b };
                certify_window(series, &claim, n_control)?
            }
        };
        cert.task = Some(w.task);
        out.push(cert);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builder::{Task, TargetSpec, ZetaSpec};

    fn constant(c: f64) -> Polynomial {
        Polynomial::constant(Complex64::new(c, 0.0))
    }

    fn radii_claim(target: &Polynomial, s: u64, a: f64, b: f64) -> WindowClaim<'_> {
        WindowClaim { m: 1, target, s, t: 8, zeta: Complex64::new(1.0, 0.0), a, b: Complex64::new(b, 0.0) }
    }

    #[test]
    fn constant_function_passes_with_full_margin() {
        let c = constant(2.5);
        let cert = certify_window(&c, &radii_claim(&c, 4, 1.0 / 64.0, 15.0 / 16.0), 1024).unwrap();
        assert!(cert.pass);
        assert_eq!(cert.sup_error, 0.0);
        assert_eq!(cert.margin, 0.25);
        assert!(cert.recheck());
    }

    #[test]
    fn zero_against_one_fails() {
        let zero = Polynomial::zero();
        let one = constant(1.0);
        let cert = certify_window(&zero, &radii_claim(&one, 2, 1.0 / 64.0, 15.0 / 16.0), 1024).unwrap();
        assert!(!cert.pass);
        assert_eq!(cert.sup_error, 1.0);
        assert!(cert.recheck());
    }

    #[test]
    fn escaping_window_fails_with_reason() {
        let c = constant(1.0);
        let cert = certify_window(&c, &radii_claim(&c, 2, 0.25, 0.8), 1024).unwrap();
        assert!(!cert.pass);
        assert!(cert.reason.unwrap().contains("leaves the unit disc"));
    }

    #[test]
    fn membership_decodes_indices() {
        let family = CurveFamily::radii();
        let idx: MembershipIndices = "1,2,1,2,8,1,32,15".parse().unwrap();
        let one = constant(1.0);
        let cert = membership(&one, &idx, &family, 1024, 12).unwrap();
        assert!(cert.pass);
        assert_eq!(cert.b, Complex64::new(15.0 / 16.0, 0.0));
        assert_eq!(cert.a, 1.0 / 64.0);
        assert_eq!(idx.to_string(), "1,2,1,2,8,1,32,15");
        assert!("1,2,3".parse::<MembershipIndices>().is_err());
        assert!("0,2,1,2,8,1,32,15".parse::<MembershipIndices>().is_err());
    }

    #[test]
    fn relaxed_tube() {
        let family = CurveFamily::radii();
        let grid = family.grid(512);
        let curve = family.sample(0.0, &grid).unwrap();
        let c = constant(1.0);
        let h = 100u64;
        let on = radii_claim(&c, 2, 1.0 / 64.0, 0.9);
        assert!(relaxed_membership(&c, &on, &curve, h, 1024).unwrap().pass);
        let half = WindowClaim { b: Complex64::new(0.9, 0.5 / h as f64), ..on.clone() };
        assert!(relaxed_membership(&c, &half, &curve, h, 1024).unwrap().pass);
        let far = WindowClaim { b: Complex64::new(0.9, 2.0 / h as f64), ..on };
        assert!(!relaxed_membership(&c, &far, &curve, h, 1024).unwrap().pass);
    }

    #[test]
    fn openness_examples() {
        let c = constant(1.0);
        let claim = radii_claim(&c, 4, 1.0 / 64.0, 15.0 / 16.0);
        let delta = openness_margin(&c, &claim, 1024).unwrap();
        assert_eq!(delta, 0.25);
        let nudged = constant(1.0 + delta / 2.0);
        assert!(certify_window(&nudged, &claim, 1024).unwrap().pass);
        let pushed = constant(1.0 + 2.0 * delta);
        assert!(!certify_window(&pushed, &claim, 1024).unwrap().pass);
        assert!(openness_margin(&pushed, &claim, 1024).is_err());
    }

    fn task(target: &str, s: u64) -> ResolvedTask {
        Task::new(1, TargetSpec::Index(target.into()), s, ZetaSpec::Index(1), CurveRef::Subfamily(Some(1)), 8)
            .resolve()
            .unwrap()
    }

    #[test]
    fn search_finds_first_admissible_window_for_zero() {
        let family = CurveFamily::radii();
        let zero = Polynomial::zero();
        let limits = SearchLimits { k_max: 64, n_max: 64, ..SearchLimits::default() };
        match verify_target(&zero, &task("1", 1000), &family, &limits, 256).unwrap() {
            VerifyOutcome::Found { l, k, n, certificate } => {
                assert_eq!(certificate.sup_error, 0.0);
                // k = 1 is a = 1/2, which never fits next to 1; k = 2 is
                // a = 1/4 and needs |b| < 3/4, which is too far from 1.
                assert_eq!(l, 1);
                assert!(scale(k) + certificate.b.norm() < 1.0);
                assert!(n >= 1);
                assert_eq!(certificate.indices.unwrap().k, k);
            }
            other => panic!("expected a witness, got {other:?}"),
        }
    }

    #[test]
    fn search_reports_best_margin() {
        let family = CurveFamily::radii();
        let zero = Polynomial::zero();
        let limits = SearchLimits { k_max: 16, n_max: 16, ..SearchLimits::default() };
        match verify_target(&zero, &task("2", 2), &family, &limits, 256).unwrap() {
            VerifyOutcome::NotFound { best_margin } => assert_eq!(best_margin, -0.5),
            other => panic!("expected no witness, got {other:?}"),
        }
    }

    #[test]
    fn nearest_scale() {
        assert_eq!(nearest_scale_index(0.5, 0.01), Some(1));
        assert_eq!(nearest_scale_index(1.0 / 64.0, 1e-4), Some(32));
        let k = nearest_scale_index(0.3, 1e-3).unwrap();
        assert!((scale(k) - 0.3).abs() < 1e-3);
        // No smaller index lands within the tolerance.
        assert!((1..k).all(|i| (scale(i) - 0.3).abs() >= 1e-3));
    }

    #[test]
    fn snapping_a_constant() {
        let family = CurveFamily::radii();
        let t = task("2", 4);
        let curve = subfamily_curve(&family, t.zeta, 1, 12).unwrap();
        let one = constant(1.0);
        let snap = snap_witness(&one, 0.017, Complex64::new(0.93, 0.0), &t, &curve, 1024, 1 << 16).unwrap();
        assert!(snap.certificate.pass);
        assert_eq!(snap.certificate.sup_error, 0.0);
        assert_eq!(snap.lipschitz, 0.0);
        // Zero margin: f = 0 against target 1 at s = 1 has error exactly 1.
        let t1 = task("2", 1);
        let zero = Polynomial::zero();
        assert!(snap_witness(&zero, 0.017, Complex64::new(0.93, 0.0), &t1, &curve, 1024, 1 << 16).is_err());
    }
}
