use std::path::{Path, PathBuf};

use num_bigint::BigUint;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use tuniv::builder::{
    build_universal, decompose as decompose_series, BuildConfig, BuildStatus, CurveRef, SeriesTerm, TargetSpec, Task,
    UniversalSeries, ZetaSpec,
};
use tuniv::curves::{alpha_grid, certify_continuous, CurveFamily, SubfamilySearch};
use tuniv::enumeration::{boundary_point, poly, rational_at, scale, tuple_at};
use tuniv::format::{config_hash, CertificateFile, SeriesFile};
use tuniv::verify::{certify_series, membership, verify_target, Certificate, MembershipIndices, VerifyOutcome};
use tuniv::{Error, Evaluable, Polynomial};

use crate::io::{read_json, read_text, write_canonical};
use crate::EnumKind;

#[derive(Debug, Default)]
pub struct Overrides {
    pub max_degree: Option<usize>,
    pub control_samples: Option<usize>,
    pub seed: Option<u64>,
}

impl Overrides {
    fn apply(&self, config: &mut BuildConfig) {
        if let Some(d) = self.max_degree {
            config.fit.max_degree = d;
        }
        if let Some(n) = self.control_samples {
            config.control_samples = n;
        }
        if self.seed.is_some() {
            config.seed = self.seed;
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct FamilyCertifyConfig {
    pub family: CurveFamily,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_alpha_samples")]
    pub alpha_samples: usize,
    #[serde(default = "default_j")]
    pub j: u32,
    #[serde(default)]
    pub search: SubfamilySearch,
}

fn default_delta() -> f64 {
    0.05
}
fn default_alpha_samples() -> usize {
    64
}
fn default_j() -> u32 {
    1
}

pub fn family_certify(config: &Path, report: Option<&Path>) -> anyhow::Result<bool> {
    let cfg: FamilyCertifyConfig = read_json(config)?;
    if !(cfg.delta > 0.0) || cfg.alpha_samples == 0 || cfg.j == 0 {
        return Err(Error::Usage("delta > 0, alpha_samples >= 1 and j >= 1 required".into()).into());
    }
    let alphas = alpha_grid(&cfg.family, cfg.alpha_samples);
    let result = certify_continuous(&cfg.family, cfg.delta, cfg.j, &alphas, &cfg.search);
    let failures = result.entries.iter().filter(|e| !e.ok).count();
    println!(
        "family certify: {} members, delta {}, {} failures -> {}",
        result.entries.len(),
        cfg.delta,
        failures,
        if result.pass { "PASS" } else { "FAIL" }
    );
    for e in result.entries.iter().filter(|e| !e.ok).take(5) {
        println!("  alpha {:.6}: {}", e.alpha, e.diagnostic.as_deref().unwrap_or("no witness"));
    }
    if let Some(path) = report {
        write_canonical(path, &result)?;
    }
    Ok(result.pass)
}

pub fn enum_show(kind: EnumKind, index: &str) -> anyhow::Result<bool> {
    let bad = || Error::Usage(format!("index {index:?} must be a natural number >= 1"));
    let small = || -> anyhow::Result<u64> {
        match index.parse::<u64>() {
            Ok(i) if i >= 1 => Ok(i),
            _ => Err(bad().into()),
        }
    };
    match kind {
        EnumKind::Scale => {
            let k = small()?;
            println!("a_{k} = {}", scale(k));
        }
        EnumKind::Boundary => {
            let p = small()?;
            let z = boundary_point(p);
            // Adding 0.0 turns -0 into 0 for display.
            println!("zeta_{p} = {} + {}i", z.re + 0.0, z.im + 0.0);
        }
        EnumKind::Rational => {
            let idx: BigUint = index.parse().map_err(|_| bad())?;
            if idx == 0u32.into() {
                return Err(bad().into());
            }
            println!("r_{index} = {}", rational_at(&idx));
        }
        EnumKind::Poly => {
            let j: BigUint = index.parse().map_err(|_| bad())?;
            if j == 0u32.into() {
                return Err(bad().into());
            }
            println!("p_{index}(z) = {}", poly(&j)?);
        }
        EnumKind::Tuple => {
            let i = small()?;
            let t = tuple_at(i);
            println!("tuple_{i} = ({}, {}, {}, {}, {}, {})", t[0], t[1], t[2], t[3], t[4], t[5]);
        }
    }
    Ok(true)
}

fn print_certificates(certs: &[Certificate]) {
    println!("{:>4} {:>5} {:>5} {:>12} {:>12} {:>12} {:>6}", "task", "s", "t", "sup_error", "margin", "|b-zeta|", "pass");
    for c in certs {
        println!(
            "{:>4} {:>5} {:>5} {:>12.4e} {:>12.4e} {:>12.4e} {:>6}",
            c.task.map_or("-".to_string(), |t| t.to_string()),
            c.s,
            c.t,
            c.sup_error,
            c.margin,
            c.zeta_distance,
            if c.pass { "yes" } else { "no" }
        );
        if let Some(reason) = &c.reason {
            println!("       {reason}");
        }
    }
}

fn certificate_path(out: &Path, report: Option<&Path>) -> PathBuf {
    report.map(Path::to_path_buf).unwrap_or_else(|| out.with_extension("certificates.json"))
}

/// Builds, writes the series, then re-certifies it from the written file.
fn build_and_certify(config: &BuildConfig, out: &Path, report: &Path) -> anyhow::Result<bool> {
    let hash = config_hash(config)?;
    let outcome = build_universal(config)?;
    write_canonical(out, &SeriesFile::new(&outcome.series, hash.clone()))?;

    let reloaded = SeriesFile::parse(&read_text(out)?, false)?.to_series()?;
    let certs = certify_series(&reloaded, config.control_samples, reloaded.search.subfamily_depth)?;
    print_certificates(&certs);
    let file = CertificateFile::new(certs, hash);
    write_canonical(report, &file)?;

    let complete = match &outcome.status {
        BuildStatus::Complete => true,
        BuildStatus::Aborted { task, reason } => {
            eprintln!("build aborted at task {task}: {reason}");
            false
        }
    };
    println!(
        "build: {} of {} tasks, max degree {} -> {}",
        outcome.series.witnesses.len(),
        config.tasks.len(),
        outcome.series.max_degree(),
        if complete && file.all_pass() { "PASS" } else { "FAIL" }
    );
    Ok(complete && file.all_pass())
}

pub fn build(config: &Path, out: &Path, report: Option<&Path>, overrides: &Overrides) -> anyhow::Result<bool> {
    let mut cfg: BuildConfig = read_json(config)?;
    overrides.apply(&mut cfg);
    cfg.validate()?;
    build_and_certify(&cfg, out, &certificate_path(out, report))
}

#[derive(Debug)]
pub struct VerifyOptions {
    pub control_samples: usize,
    pub k_max: u64,
    pub n_max: u64,
    pub allow_version_mismatch: bool,
}

fn check_indices_match(task: &Task, idx: &MembershipIndices) -> anyhow::Result<()> {
    let r = task.resolve()?;
    let same = r.m == idx.m
        && r.s == idx.s
        && r.t == idx.t
        && r.p.is_none_or(|p| p == idx.p)
        && r.j.as_ref().is_none_or(|j| *j == idx.j)
        && !matches!(task.curve, CurveRef::Subfamily(Some(l)) if l != idx.l);
    if !same {
        return Err(Error::Usage(format!("indices {idx} do not describe the given task")).into());
    }
    Ok(())
}

pub fn verify(
    series_path: &Path,
    task: Option<&Path>,
    indices: Option<&str>,
    report: &Path,
    opts: &VerifyOptions,
) -> anyhow::Result<bool> {
    let file = SeriesFile::parse(&read_text(series_path)?, opts.allow_version_mismatch)?;
    let series = file.to_series()?;
    let depth = series.search.subfamily_depth;
    let task: Option<Task> = task.map(read_json).transpose()?;

    let certs = match (indices, &task) {
        (Some(text), _) => {
            let idx: MembershipIndices = text.parse()?;
            if let Some(t) = &task {
                check_indices_match(t, &idx)?;
            }
            vec![membership(&series, &idx, &series.family, opts.control_samples, depth)?]
        }
        (None, Some(t)) => {
            let resolved = t.resolve()?;
            let mut limits = series.search;
            limits.k_max = opts.k_max;
            limits.n_max = opts.n_max;
            match verify_target(&series, &resolved, &series.family, &limits, opts.control_samples)? {
                VerifyOutcome::Found { l, k, n, certificate } => {
                    println!("witness found at l = {l}, k = {k}, n = {n}");
                    vec![certificate]
                }
                VerifyOutcome::NotFound { best_margin } => {
                    println!("no witness with k <= {}, n <= {}; best margin {best_margin:.4e}", opts.k_max, opts.n_max);
                    Vec::new()
                }
            }
        }
        (None, None) => certify_series(&series, opts.control_samples, depth)?,
    };
    print_certificates(&certs);
    let pass = !certs.is_empty() && certs.iter().all(|c| c.pass);
    write_canonical(report, &CertificateFile::new(certs, file.config_hash))?;
    println!("verify: {}", if pass { "PASS" } else { "FAIL" });
    Ok(pass)
}

#[derive(Debug, Serialize, Deserialize)]
pub struct DecomposeConfig {
    pub build: BuildConfig,
    /// Monomial coefficients of `f`, lowest degree first.
    pub f: Vec<Complex64>,
    pub tasks_g: Vec<Task>,
    pub tasks_h: Vec<Task>,
}

/// Points checked for the identity `g - h = f`.
pub const IDENTITY_POINTS: usize = 1000;
pub const IDENTITY_RADIUS: f64 = 0.99;
pub const IDENTITY_TOLERANCE: f64 = 1e-12;

/// Checks `g - h = f`: the `h` terms must be the `g` terms followed by the
/// negated terms of `f`, and the values must agree on random points of
/// `|z| <= IDENTITY_RADIUS`. Returns the largest pointwise deviation.
pub fn identity_gap(f: &[SeriesTerm], g: &UniversalSeries, h: &UniversalSeries, seed: u64) -> Option<f64> {
    let n = g.terms.len();
    if h.terms.len() != n + f.len() || h.terms[..n] != g.terms[..] {
        return None;
    }
    if h.terms[n..].iter().zip(f).any(|(a, b)| *a != b.neg()) {
        return None;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..IDENTITY_POINTS {
        let r = IDENTITY_RADIUS * rng.gen::<f64>().sqrt();
        let theta = rng.gen::<f64>() * std::f64::consts::TAU;
        let z = Complex64::from_polar(r, theta);
        let fz: Complex64 = f.iter().map(|t| t.eval(z)).sum();
        worst = worst.max((g.eval(z) - h.eval(z) - fz).norm());
    }
    Some(worst)
}

pub fn decompose(config: &Path, out: &Path, report: Option<&Path>, overrides: &Overrides) -> anyhow::Result<bool> {
    let mut cfg: DecomposeConfig = read_json(config)?;
    overrides.apply(&mut cfg.build);
    cfg.build.validate()?;
    let hash = config_hash(&cfg)?;
    let f = vec![SeriesTerm::Exact(Polynomial::new(cfg.f.clone()))];
    let d = decompose_series(&f, &cfg.tasks_g, &cfg.tasks_h, &cfg.build)?;

    let g_path = out.with_extension("g.json");
    let h_path = out.with_extension("h.json");
    write_canonical(&g_path, &SeriesFile::new(&d.g, hash.clone()))?;
    write_canonical(&h_path, &SeriesFile::new(&d.h, hash.clone()))?;

    let n = cfg.build.control_samples;
    let mut certs = certify_series(&d.g, n, d.g.search.subfamily_depth)?;
    let mut h_certs = certify_series(&d.h, n, d.h.search.subfamily_depth)?;
    for c in h_certs.iter_mut() {
        c.task = c.task.map(|t| t + cfg.tasks_g.len());
    }
    certs.append(&mut h_certs);
    print_certificates(&certs);

    let gap = identity_gap(&f, &d.g, &d.h, cfg.build.seed.unwrap_or(0));
    let identity_ok = gap.is_some_and(|g| g <= IDENTITY_TOLERANCE);
    match gap {
        Some(g) => println!("identity g - h = f: max deviation {g:.3e} on {IDENTITY_POINTS} points"),
        None => println!("identity g - h = f: terms do not match"),
    }
    let complete = match &d.status {
        BuildStatus::Complete => true,
        BuildStatus::Aborted { task, reason } => {
            eprintln!("decomposition aborted at task {task}: {reason}");
            false
        }
    };
    let file = CertificateFile::new(certs, hash);
    write_canonical(&certificate_path(out, report), &file)?;
    let pass = complete && identity_ok && file.all_pass();
    println!("decompose: {}", if pass { "PASS" } else { "FAIL" });
    Ok(pass)
}

/// Three tasks on the radii family: constant target 1 at accuracies 1/2,
/// 1/4, 1/8 near the first three boundary points, proximity 1/8.
pub fn demo_config() -> BuildConfig {
    let tasks = [(2, 1), (4, 2), (8, 3)]
        .into_iter()
        .map(|(s, p)| Task::new(1, TargetSpec::Index("2".into()), s, ZetaSpec::Index(p), CurveRef::Subfamily(None), 8))
        .collect();
    BuildConfig::new(CurveFamily::radii(), tasks)
}

pub fn demo(out: &Path) -> anyhow::Result<bool> {
    let cfg = demo_config();
    write_canonical(&out.join("config.json"), &cfg)?;
    println!("demo: radii family, 3 tasks, outputs in {}", out.display());
    build_and_certify(&cfg, &out.join("series.json"), &out.join("certificates.json"))
}
