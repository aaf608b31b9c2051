//! Benchmark-only crate; see `benches/`.

use tuniv::builder::{BuildConfig, CurveRef, TargetSpec, Task, ZetaSpec};
use tuniv::curves::CurveFamily;

/// Three-task build on the radii family, the same shape the demo uses.
pub fn small_build() -> BuildConfig {
    let task = |s, p| Task::new(1, TargetSpec::Index("2".into()), s, ZetaSpec::Index(p), CurveRef::Subfamily(None), 8);
    BuildConfig::new(CurveFamily::radii(), vec![task(2, 1), task(4, 2), task(8, 3)])
}
