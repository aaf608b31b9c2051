//! Series assembly.
//!
//! Each task gets a window `a_k L_m + b` anchored on a subfamily curve near
//! its boundary point. A correction polynomial is then fitted so that the
//! new partial sum reproduces the task target on the window, while staying
//! within a geometric budget `tau_i = T 2^{-i}` of zero on the frozen
//! region. The frozen region holds the core disk and every completed window,
//! so earlier certificates survive later steps.

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::approx::{fit_simultaneous, sup_error_at, Disk, FitConfig, FitReport, FittedPolynomial, PieceTarget};
use crate::curves::{member_distance, CurveFamily, SubfamilyMember, SubfamilySearch};
use crate::enumeration::{boundary_point, poly, poly_index, smallest_scale_below, subfamily_curve, SubfamilyCurve};
use crate::error::{Error, Result};
use crate::poly::{Evaluable, Polynomial, RationalPolynomial};
use crate::verify::verifier_phase;

/// Largest denominator accepted when recovering an exact target index from
/// decimal coefficients.
pub const TARGET_MAX_DENOMINATOR: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetSpec {
    /// Index `j` of the enumerated polynomial `p_j`, in decimal.
    Index(String),
    /// Explicit monomial coefficients, lowest degree first.
    Coefficients(Vec<Complex64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZetaSpec {
    Index(u64),
    Point(Complex64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveRef {
    /// The subfamily curve `C_{pl}`; `None` picks the smallest workable `l`.
    Subfamily(Option<u64>),
    /// A family member `z_alpha`; anchors go on the first `C_{pl}` within
    /// r-distance `1/(2t)` of it.
    Member(f64),
}

/// One universality goal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Task {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub m: u32,
    pub target: TargetSpec,
    pub s: u64,
    pub zeta: ZetaSpec,
    pub curve: CurveRef,
    pub t: u64,
}

/// Task with its target and boundary point evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedTask {
    pub m: u32,
    pub target: Polynomial,
    pub j: Option<BigUint>,
    pub s: u64,
    pub zeta: Complex64,
    pub p: Option<u64>,
    pub curve: CurveRef,
    pub t: u64,
}

impl ResolvedTask {
    pub fn accuracy(&self) -> f64 {
        1.0 / self.s as f64
    }

    pub fn proximity(&self) -> f64 {
        1.0 / self.t as f64
    }
}

impl Task {
    pub fn new(m: u32, target: TargetSpec, s: u64, zeta: ZetaSpec, curve: CurveRef, t: u64) -> Self {
        Task { label: None, m, target, s, zeta, curve, t }
    }

    pub fn resolve(&self) -> Result<ResolvedTask> {
        if self.m < 1 || self.s < 1 || self.t < 1 {
            return Err(Error::Usage("task indices m, s, t must be >= 1".into()));
        }
        let (target, j) = match &self.target {
            TargetSpec::Index(text) => {
                let j: BigUint =
                    text.parse().map_err(|_| Error::Usage(format!("target index {text:?} is not a natural number")))?;
                if j.is_zero() {
                    return Err(Error::Usage("target index starts at 1".into()));
                }
                (poly(&j)?.to_complex(), Some(j))
            }
            TargetSpec::Coefficients(c) => {
                let p = Polynomial::new(c.clone());
                let j = RationalPolynomial::from_complex(&p, TARGET_MAX_DENOMINATOR).ok().map(|q| poly_index(&q));
                (p, j)
            }
        };
        let (zeta, p) = match self.zeta {
            ZetaSpec::Index(p) => {
                if p < 1 {
                    return Err(Error::Usage("boundary index starts at 1".into()));
                }
                (boundary_point(p), Some(p))
            }
            ZetaSpec::Point(z) => {
                if (z.norm() - 1.0).abs() > 1e-15 {
                    return Err(Error::Usage(format!("boundary point {z} is not on the unit circle")));
                }
                (z, None)
            }
        };
        Ok(ResolvedTask { m: self.m, target, j, s: self.s, zeta, p, curve: self.curve, t: self.t })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrozenPolicy {
    /// Fixed core disk; each completed window is added as its own protected
    /// disk.
    Protect,
    /// One growing disk `r_{i+1} = R + (1 - R)/4`, `R = max(r_i, |b| + a m)`.
    Swallow,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchLimits {
    /// Scan bound for scales in `verify_target`.
    pub k_max: u64,
    /// Scan bound for anchors.
    pub n_max: u64,
    /// Largest subfamily curve index tried.
    pub l_max: u64,
    /// Depth of the subfamily enumeration.
    pub subfamily_depth: u32,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits { k_max: 1024, n_max: 4096, l_max: 64, subfamily_depth: 12 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuildConfig {
    pub family: CurveFamily,
    #[serde(default)]
    pub tasks: Vec<Task>,
    #[serde(default)]
    pub fit: FitConfig,
    /// Boundary samples per window for measurement and verification.
    #[serde(default = "default_control_samples")]
    pub control_samples: usize,
    #[serde(default)]
    pub search: SearchLimits,
    /// Radius of the core disk on which the series stays near 0.
    #[serde(default = "default_core_radius")]
    pub core_radius: f64,
    #[serde(default = "default_policy")]
    pub frozen_policy: FrozenPolicy,
    /// Completed windows are protected at this multiple of their radius.
    #[serde(default = "default_dilation")]
    pub protect_dilation: f64,
    #[serde(default = "default_true")]
    pub deterministic: bool,
    /// Reserved; no randomness is used.
    #[serde(default)]
    pub seed: Option<u64>,
}

fn default_control_samples() -> usize {
    1024
}
fn default_core_radius() -> f64 {
    0.5
}
fn default_policy() -> FrozenPolicy {
    FrozenPolicy::Protect
}
fn default_dilation() -> f64 {
    1.25
}
fn default_true() -> bool {
    true
}

impl BuildConfig {
    pub fn new(family: CurveFamily, tasks: Vec<Task>) -> Self {
        BuildConfig {
            family,
            tasks,
            fit: FitConfig::default(),
            control_samples: default_control_samples(),
            search: SearchLimits::default(),
            core_radius: default_core_radius(),
            frozen_policy: default_policy(),
            protect_dilation: default_dilation(),
            deterministic: true,
            seed: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.core_radius) {
            return Err(Error::Usage("core radius must lie in [0, 1)".into()));
        }
        if self.fit.max_degree < 1 || self.control_samples < 64 {
            return Err(Error::Usage("max_degree >= 1 and control_samples >= 64 required".into()));
        }
        if !(self.fit.accept_fraction > 0.0 && self.fit.accept_fraction <= 1.0) {
            return Err(Error::Usage("accept_fraction must lie in (0, 1]".into()));
        }
        if !(self.protect_dilation >= 1.0) {
            return Err(Error::Usage("protect_dilation must be >= 1".into()));
        }
        let s = &self.search;
        if s.k_max < 1 || s.n_max < 1 || s.l_max < 1 {
            return Err(Error::Usage("search limits must be positive".into()));
        }
        Ok(())
    }
}

/// A term of a series.
#[derive(Debug, Clone, PartialEq)]
pub enum SeriesTerm {
    Fitted(FittedPolynomial),
    Exact(Polynomial),
}

impl SeriesTerm {
    pub fn neg(&self) -> SeriesTerm {
        match self {
            SeriesTerm::Fitted(f) => SeriesTerm::Fitted(f.neg()),
            SeriesTerm::Exact(p) => SeriesTerm::Exact(p.neg()),
        }
    }

    pub fn degree(&self) -> usize {
        match self {
            SeriesTerm::Fitted(f) => f.degree(),
            SeriesTerm::Exact(p) => p.degree(),
        }
    }
}

impl Evaluable for SeriesTerm {
    fn eval(&self, z: Complex64) -> Complex64 {
        match self {
            SeriesTerm::Fitted(f) => f.eval_recurrence(z),
            SeriesTerm::Exact(p) => p.horner(z),
        }
    }

    fn derivative(&self, z: Complex64) -> Option<Complex64> {
        Some(match self {
            SeriesTerm::Fitted(f) => f.derivative_recurrence(z),
            SeriesTerm::Exact(p) => p.horner_derivative(z),
        })
    }
}

/// Sum of terms, evaluated termwise.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TermSum(pub Vec<SeriesTerm>);

impl Evaluable for TermSum {
    fn eval(&self, z: Complex64) -> Complex64 {
        self.0.iter().map(|t| t.eval(z)).sum()
    }

    fn derivative(&self, z: Complex64) -> Option<Complex64> {
        self.0.iter().map(|t| t.derivative(z)).sum()
    }
}

/// Chosen `(a_k, b_{nlp})` and its measurements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub task: usize,
    pub step: usize,
    pub m: u32,
    pub j: Option<String>,
    pub p: Option<u64>,
    pub s: u64,
    pub t: u64,
    pub l: u64,
    pub k: u64,
    pub n: u64,
    pub a: f64,
    pub b: Complex64,
    pub zeta: Complex64,
    pub member: SubfamilyMember,
    pub window: Disk,
    pub delta: f64,
    pub fit_degree: usize,
    /// Window control error of the partial sum right after this step.
    pub achieved_error: f64,
    pub zeta_distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepBudget {
    pub step: usize,
    pub task: usize,
    pub tau: f64,
    pub fit_degree: usize,
    pub success: bool,
    /// Measured `sup |q|` on the core circle.
    pub core_drift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskBudget {
    pub task: usize,
    pub allowance: f64,
    /// Measured `sup |q_i|` on this task's window for each later step.
    pub debits: Vec<f64>,
    pub consumed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BudgetLedger {
    pub tail_budget: f64,
    pub steps: Vec<StepBudget>,
    pub tasks: Vec<TaskBudget>,
}

/// A finite universal series: corrections, witnesses and the budget ledger.
#[derive(Debug, Clone, PartialEq)]
pub struct UniversalSeries {
    pub terms: Vec<SeriesTerm>,
    pub witnesses: Vec<Witness>,
    pub ledger: BudgetLedger,
    pub family: CurveFamily,
    pub tasks: Vec<Task>,
    pub core_radius: f64,
    /// Limits used to resolve subfamily curves; verifiers decode with the same.
    pub search: SearchLimits,
}

impl UniversalSeries {
    pub fn empty(family: CurveFamily) -> Self {
        UniversalSeries {
            terms: Vec::new(),
            witnesses: Vec::new(),
            ledger: BudgetLedger { tail_budget: 0.0, steps: Vec::new(), tasks: Vec::new() },
            family,
            tasks: Vec::new(),
            core_radius: 0.0,
            search: SearchLimits::default(),
        }
    }

    pub fn max_degree(&self) -> usize {
        self.terms.iter().map(SeriesTerm::degree).max().unwrap_or(0)
    }
}

impl Evaluable for UniversalSeries {
    fn eval(&self, z: Complex64) -> Complex64 {
        self.terms.iter().map(|t| t.eval(z)).sum()
    }

    fn derivative(&self, z: Complex64) -> Option<Complex64> {
        self.terms.iter().map(|t| t.derivative(z)).sum()
    }
}

/// Geometry chosen for one task.
#[derive(Debug, Clone, PartialEq)]
pub struct Placement {
    pub l: u64,
    pub k: u64,
    pub n: u64,
    pub a: f64,
    pub b: Complex64,
    pub delta: f64,
    pub window: Disk,
    pub curve: SubfamilyCurve,
}

/// Region the next correction must leave (nearly) untouched.
#[derive(Debug, Clone, PartialEq)]
pub struct FrozenRegion {
    /// Radius of the centred disk; 0 means no core.
    pub radius: f64,
    pub protected: Vec<(usize, Disk)>,
}

impl FrozenRegion {
    pub fn core(radius: f64) -> Self {
        FrozenRegion { radius, protected: Vec::new() }
    }
}

/// Picks `b` first (smallest `n`), then `a_k` (smallest `k`) for `C_{pl}`.
///
/// With `delta = (1 - r)/2`, the anchor satisfies
/// `|b - zeta| < min(1/t, delta/2)` and `|b| < 1`, and then
/// `a_k < min(delta/(2m), (1 - |b|)/(2m), clearance/(3m))`, where the
/// clearance is the distance from `b` to the nearest protected disk.
pub fn place_window_on(
    curve: &SubfamilyCurve,
    frozen: &FrozenRegion,
    task: &ResolvedTask,
    n_max: u64,
) -> Result<(u64, u64, f64, Complex64, f64, Disk)> {
    if !(frozen.radius < 1.0) {
        return Err(Error::TaskRejected("frozen region reaches the unit circle".into()));
    }
    let delta = (1.0 - frozen.radius) / 2.0;
    let m = task.m as f64;
    let reach = task.proximity().min(delta / 2.0);
    for n in 1..=n_max {
        let b = curve.anchor(task.zeta, n)?;
        if !((b - task.zeta).norm() < reach && b.norm() < 1.0) {
            continue;
        }
        let clearance =
            frozen.protected.iter().map(|(_, d)| (b - d.center).norm() - d.radius).fold(f64::INFINITY, f64::min);
        if !(clearance > 0.0) {
            continue;
        }
        let bound = (delta / (2.0 * m)).min((1.0 - b.norm()) / (2.0 * m)).min(clearance / (3.0 * m));
        let Some(k) = smallest_scale_below(bound) else { continue };
        let a = crate::enumeration::scale(k);
        let window = Disk::new(b, a * m)?;
        return Ok((k, n, a, b, delta, window));
    }
    Err(Error::TaskRejected(format!(
        "no anchor within {reach:.3e} of the boundary point among the first {n_max}"
    )))
}

/// Resolves the task curve and places its window, trying `l = 1, 2, ...`
/// when the curve index is left open.
pub fn place_window(
    family: &CurveFamily,
    frozen: &FrozenRegion,
    task: &ResolvedTask,
    limits: &SearchLimits,
) -> Result<Placement> {
    let try_l = |l: u64| -> Result<Placement> {
        let curve = subfamily_curve(family, task.zeta, l, limits.subfamily_depth)?;
        if let CurveRef::Member(alpha) = task.curve {
            let grid = family.grid(SubfamilySearch::default().grid_points);
            let d = member_distance(family, alpha, curve.member.value(), 1, &grid)?;
            if !(d < 0.5 * task.proximity()) {
                return Err(Error::TaskRejected(format!("C_pl at l = {l} is {d:.3e} from the task curve")));
            }
        }
        let (k, n, a, b, delta, window) = place_window_on(&curve, frozen, task, limits.n_max)?;
        Ok(Placement { l, k, n, a, b, delta, window, curve })
    };
    match task.curve {
        CurveRef::Subfamily(Some(l)) => try_l(l),
        CurveRef::Subfamily(None) | CurveRef::Member(_) => {
            let mut last = Error::TaskRejected("no curve index tried".into());
            for l in 1..=limits.l_max {
                match try_l(l) {
                    Ok(p) => return Ok(p),
                    Err(e @ Error::TaskRejected(_)) => last = e,
                    Err(e) => return Err(e),
                }
            }
            Err(Error::TaskRejected(format!("no curve index up to {} admits a window: {last}", limits.l_max)))
        }
    }
}

/// `target((z - b)/a) + offset(z) - partial(z)`.
struct WindowTarget<'a> {
    target: &'a Polynomial,
    a: f64,
    b: Complex64,
    offset: Option<&'a TermSum>,
    partial: &'a [SeriesTerm],
}

impl Evaluable for WindowTarget<'_> {
    fn eval(&self, z: Complex64) -> Complex64 {
        let mut v = self.target.horner((z - self.b) / self.a);
        if let Some(off) = self.offset {
            v += off.eval(z);
        }
        v - self.partial.iter().map(|t| t.eval(z)).sum::<Complex64>()
    }
}

/// Mutable state of a build.
#[derive(Debug, Clone)]
pub struct BuildState {
    pub terms: Vec<SeriesTerm>,
    pub frozen: FrozenRegion,
    pub witnesses: Vec<Witness>,
    pub ledger: BudgetLedger,
    pub fit_reports: Vec<FitReport>,
}

impl BuildState {
    pub fn new(core_radius: f64, tail_budget: f64) -> Self {
        BuildState {
            terms: Vec::new(),
            frozen: FrozenRegion::core(core_radius),
            witnesses: Vec::new(),
            ledger: BudgetLedger { tail_budget, steps: Vec::new(), tasks: Vec::new() },
            fit_reports: Vec::new(),
        }
    }

    pub fn step_index(&self) -> usize {
        self.terms.len() + 1
    }
}

fn frozen_tolerance(tail_budget: f64, step: usize) -> f64 {
    tail_budget * 0.5f64.powi(step as i32)
}

/// Fits one correction for `task` and appends it. `offset` is added to the
/// window target (used by decomposition).
pub fn build_step(
    state: &mut BuildState,
    task_index: usize,
    task: &ResolvedTask,
    offset: Option<&TermSum>,
    config: &BuildConfig,
) -> Result<()> {
    let placement = place_window(&config.family, &state.frozen, task, &config.search)?;
    let step = state.step_index();
    let tau = frozen_tolerance(state.ledger.tail_budget, step);
    let fit_samples = config.fit.default_fit_samples();

    let window_target = WindowTarget { target: &task.target, a: placement.a, b: placement.b, offset, partial: &state.terms };
    let zero = Polynomial::zero();
    let mut pieces = vec![PieceTarget::new(placement.window, &window_target, 0.5 * task.accuracy(), fit_samples)];
    if state.frozen.radius > 0.0 {
        let core = Disk::new(Complex64::zero(), state.frozen.radius)?;
        pieces.push(PieceTarget::new(core, &zero, tau, fit_samples));
    }
    for (_, d) in &state.frozen.protected {
        pieces.push(PieceTarget::new(*d, &zero, tau, fit_samples));
    }
    let (q, report) = fit_simultaneous(&pieces, &config.fit)?;
    let success = report.success;
    let achieved_error = report.pieces[0].control_error;
    let fit_degree = report.degree;
    drop(pieces);

    let n_ctrl = config.control_samples;
    let phase = verifier_phase(n_ctrl);
    let core_drift = if state.frozen.radius > 0.0 {
        let core = Disk::new(Complex64::zero(), state.frozen.radius)?;
        sup_error_at(&q, &zero, &core, n_ctrl, phase)
    } else {
        0.0
    };
    state.ledger.steps.push(StepBudget { step, task: task_index, tau, fit_degree, success, core_drift });
    state.fit_reports.push(report);
    if !success {
        return Err(Error::Certification(format!(
            "step {step}: degree budget {} exhausted for task {task_index}",
            config.fit.max_degree
        )));
    }

    for tb in state.ledger.tasks.iter_mut() {
        let w = state.witnesses.iter().find(|w| w.task == tb.task).map(|w| w.window).expect("witness per budget");
        let debit = sup_error_at(&q, &zero, &w, n_ctrl, phase);
        tb.debits.push(debit);
        tb.consumed += debit;
    }

    state.terms.push(SeriesTerm::Fitted(q));
    state.witnesses.push(Witness {
        task: task_index,
        step,
        m: task.m,
        j: task.j.as_ref().map(|j| j.to_string()),
        p: task.p,
        s: task.s,
        t: task.t,
        l: placement.l,
        k: placement.k,
        n: placement.n,
        a: placement.a,
        b: placement.b,
        zeta: task.zeta,
        member: placement.curve.member,
        window: placement.window,
        delta: placement.delta,
        fit_degree,
        achieved_error,
        zeta_distance: (placement.b - task.zeta).norm(),
    });
    state.ledger.tasks.push(TaskBudget { task: task_index, allowance: 0.25 * task.accuracy(), debits: Vec::new(), consumed: 0.0 });
    match config.frozen_policy {
        FrozenPolicy::Protect => {
            state.frozen.protected.push((task_index, placement.window.scaled(config.protect_dilation)));
        }
        FrozenPolicy::Swallow => {
            let reach = state.frozen.radius.max(placement.b.norm() + placement.window.radius);
            state.frozen.radius = reach + (1.0 - reach) / 4.0;
            state.frozen.protected.clear();
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub enum BuildStatus {
    Complete,
    Aborted { task: usize, reason: String },
}

#[derive(Debug, Clone)]
pub struct BuildOutcome {
    pub series: UniversalSeries,
    pub status: BuildStatus,
    pub fit_reports: Vec<FitReport>,
}

impl BuildOutcome {
    pub fn is_complete(&self) -> bool {
        self.status == BuildStatus::Complete
    }
}

fn tail_budget(tasks: &[ResolvedTask]) -> f64 {
    if tasks.is_empty() {
        return 0.0;
    }
    tasks.iter().map(|t| 0.25 * t.accuracy()).fold(f64::INFINITY, f64::min)
}

fn run_steps(
    config: &BuildConfig,
    order: &[(usize, &ResolvedTask, Option<&TermSum>)],
    budget: f64,
) -> (BuildState, BuildStatus) {
    let mut state = BuildState::new(config.core_radius, budget);
    for &(idx, task, offset) in order {
        if let Err(e) = build_step(&mut state, idx, task, offset, config) {
            return (state, BuildStatus::Aborted { task: idx, reason: e.to_string() });
        }
    }
    (state, BuildStatus::Complete)
}

/// Processes the task list in order. Invalid input is an error; a build that
/// runs out of degree budget or anchors returns the partial series with an
/// `Aborted` status.
pub fn build_universal(config: &BuildConfig) -> Result<BuildOutcome> {
    config.validate()?;
    let resolved = config.tasks.iter().map(Task::resolve).collect::<Result<Vec<_>>>()?;
    let budget = tail_budget(&resolved);
    let order: Vec<_> = resolved.iter().enumerate().map(|(i, t)| (i, t, None)).collect();
    let (state, status) = run_steps(config, &order, budget);
    let series = UniversalSeries {
        terms: state.terms,
        witnesses: state.witnesses,
        ledger: state.ledger,
        family: config.family.clone(),
        tasks: config.tasks.clone(),
        core_radius: config.core_radius,
        search: config.search,
    };
    Ok(BuildOutcome { series, status, fit_reports: state.fit_reports })
}

#[derive(Debug, Clone)]
pub struct Decomposition {
    pub g: UniversalSeries,
    pub h: UniversalSeries,
    pub status: BuildStatus,
}

/// Writes `f = g - h` with both `g` and `h` universal for their task lists.
///
/// One correction stream `u` is built with tasks interleaved `g_1, h_1,
/// g_2, ...`. A `g`-task pulls its window target back against `u`; an
/// `h`-task against `u - f`. Then `g = u` and `h = u - f` termwise.
pub fn decompose(f: &[SeriesTerm], tasks_g: &[Task], tasks_h: &[Task], config: &BuildConfig) -> Result<Decomposition> {
    config.validate()?;
    let rg = tasks_g.iter().map(Task::resolve).collect::<Result<Vec<_>>>()?;
    let rh = tasks_h.iter().map(Task::resolve).collect::<Result<Vec<_>>>()?;
    let all: Vec<ResolvedTask> = rg.iter().chain(&rh).cloned().collect();
    let budget = tail_budget(&all);
    let f_sum = TermSum(f.to_vec());

    // Indices: g-tasks keep 0..G, h-tasks are numbered G..G+H.
    let mut order: Vec<(usize, &ResolvedTask, Option<&TermSum>)> = Vec::new();
    for i in 0..rg.len().max(rh.len()) {
        if let Some(t) = rg.get(i) {
            order.push((i, t, None));
        }
        if let Some(t) = rh.get(i) {
            order.push((rg.len() + i, t, Some(&f_sum)));
        }
    }
    let (state, status) = run_steps(config, &order, budget);

    let g_count = rg.len();
    let mut g_witnesses = Vec::new();
    let mut h_witnesses = Vec::new();
    for w in &state.witnesses {
        if w.task < g_count {
            g_witnesses.push(w.clone());
        } else {
            let mut w = w.clone();
            w.task -= g_count;
            h_witnesses.push(w);
        }
    }
    let split_ledger = |keep_g: bool| {
        let mut ledger = state.ledger.clone();
        ledger.tasks.retain(|t| (t.task < g_count) == keep_g);
        if !keep_g {
            for t in ledger.tasks.iter_mut() {
                t.task -= g_count;
            }
        }
        ledger
    };
    let g = UniversalSeries {
        terms: state.terms.clone(),
        witnesses: g_witnesses,
        ledger: split_ledger(true),
        family: config.family.clone(),
        tasks: tasks_g.to_vec(),
        core_radius: config.core_radius,
        search: config.search,
    };
    let mut h_terms = state.terms.clone();
    h_terms.extend(f.iter().map(SeriesTerm::neg));
    let h = UniversalSeries {
        terms: h_terms,
        witnesses: h_witnesses,
        ledger: split_ledger(false),
        family: config.family.clone(),
        tasks: tasks_h.to_vec(),
        core_radius: config.core_radius,
        search: config.search,
    };
    Ok(Decomposition { g, h, status })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumeration::scale;

    fn radius_task(p: u64, t: u64) -> ResolvedTask {
        Task::new(1, TargetSpec::Index("1".into()), 2, ZetaSpec::Index(p), CurveRef::Subfamily(Some(1)), t)
            .resolve()
            .unwrap()
    }

    #[test]
    fn placement_with_core_03() {
        let family = CurveFamily::radii();
        let task = radius_task(1, 8);
        let p = place_window(&family, &FrozenRegion::core(0.3), &task, &SearchLimits::default()).unwrap();
        assert!((p.delta - 0.35).abs() < 1e-15);
        assert_eq!((p.n, p.k), (15, 32));
        assert_eq!(p.b, Complex64::new(15.0 / 16.0, 0.0));
        assert_eq!(p.a, 1.0 / 64.0);
    }

    #[test]
    fn placement_empty_history_strict() {
        // delta = 1/2; |b - 1| < 1/4 strictly rules out 3/4, so n = 7.
        let family = CurveFamily::radii();
        let task = radius_task(1, 2);
        let p = place_window(&family, &FrozenRegion::core(0.0), &task, &SearchLimits::default()).unwrap();
        assert_eq!(p.delta, 0.5);
        assert_eq!((p.n, p.b.re), (7, 7.0 / 8.0));
        assert_eq!((p.k, p.a), (16, 1.0 / 32.0));
        assert_eq!(scale(3), 0.75);
    }

    #[test]
    fn placement_rejected_off_target() {
        // The radius to -1 never comes near 1.
        let curve = SubfamilyCurve {
            member: SubfamilyMember::Endpoint { value: std::f64::consts::PI },
            curve: crate::curves::CurveSpec::radius(std::f64::consts::PI),
            endpoint: Some(Complex64::new(-1.0, 0.0)),
            accumulating: false,
        };
        let task = radius_task(1, 8);
        let err = place_window_on(&curve, &FrozenRegion::core(0.3), &task, 4096).unwrap_err();
        assert!(matches!(err, Error::TaskRejected(_)));
    }

    #[test]
    fn placement_avoids_protected_windows() {
        let family = CurveFamily::radii();
        let task = radius_task(1, 8);
        let mut frozen = FrozenRegion::core(0.5);
        let first = place_window(&family, &frozen, &task, &SearchLimits::default()).unwrap();
        frozen.protected.push((0, first.window.scaled(1.25)));
        let second = place_window(&family, &frozen, &task, &SearchLimits::default()).unwrap();
        assert!(second.window.gap(&first.window.scaled(1.25)) > 0.0);
        assert!(second.b.norm() + second.window.radius < 1.0);
    }

    #[test]
    fn auto_curve_index_near_minus_one() {
        let family = CurveFamily::radii();
        let task =
            Task::new(1, TargetSpec::Index("1".into()), 2, ZetaSpec::Index(2), CurveRef::Subfamily(None), 8).resolve().unwrap();
        let p = place_window(&family, &FrozenRegion::core(0.5), &task, &SearchLimits::default()).unwrap();
        assert!(p.l > 1);
        assert!((p.b - task.zeta).norm() < 0.125);
    }

    #[test]
    fn task_validation() {
        let bad = Task::new(0, TargetSpec::Index("1".into()), 2, ZetaSpec::Index(1), CurveRef::Subfamily(None), 8);
        assert!(bad.resolve().is_err());
        let off = Task::new(1, TargetSpec::Index("1".into()), 2, ZetaSpec::Point(Complex64::new(0.5, 0.0)), CurveRef::Subfamily(None), 8);
        assert!(off.resolve().is_err());
        let exact = Task::new(
            1,
            TargetSpec::Coefficients(vec![Complex64::new(1.0, 0.0)]),
            2,
            ZetaSpec::Index(1),
            CurveRef::Subfamily(None),
            8,
        );
        assert_eq!(exact.resolve().unwrap().j, Some(BigUint::from(2u32)));
    }

    #[test]
    fn tau_schedule() {
        let t = 1.0 / 32.0;
        assert_eq!(frozen_tolerance(t, 1), t / 2.0);
        assert_eq!(frozen_tolerance(t, 2), t / 4.0);
    }
}
